"""
Verification reports

Every command produces a Report: one CheckEntry per verified claim, each
tied to a fixed registry of claims, plus a per-status summary.  Reports
serialise deterministically (no timestamps, sorted keys) so that two runs
with the same configuration are byte-identical.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from core import __version__

logger = logging.getLogger("qcurve.report_generator")

PASS = "pass"
FAIL = "fail"
DISCREPANCY = "discrepancy"
INCONCLUSIVE = "inconclusive"
STATUSES = (PASS, FAIL, DISCREPANCY, INCONCLUSIVE)


class UnknownClaimError(Exception):
    """Raised when an entry names a claim outside the registry."""


# ---------------------------------------------------------------------------
# Claim registry
# ---------------------------------------------------------------------------
CLAIMS: dict[str, str] = {
    "descent.identities": "a⁵ + b⁵ = (a + b)·φ(a, b), φ = φ₁φ₂ and (a + b)² = −ω̄φ₁ − ωφ₂",
    "descent.residue_lemmas": "a + b and φ(a, b) share only 5, to the first power; other primes of φ are 1 mod 5",
    "descent.classification": "a solution is of shape φ = c^p (5 ∤ a + b) or φ = 5c^p (5 | a + b)",
    "frey.discriminant": "Δ(E) = 2⁶ω̄φφ₁",
    "frey.twist_scaling": "E_γ is the quadratic twist of E by γ = 2θ² − θ − 5",
    "frey.conductor": "conductor of E_γ at P2 and P5 by the 2-adic valuation of a + b",
    "frey.multiplicative": "E_γ is semistable at every prime dividing φ(a, b) outside 5",
    "frey.twist2_conductor": "when 2 ∥ a + b the twist E_γ,2 has P2-exponent 0 or 4",
    "frey.trace_p3": "a_P3(E_γ) = −18 whenever 3 | a + b",
    "frey.reduction_p3": "E_γ mod P3 is the same curve for every pair with 3 | a + b",
    "frey.twist_trace_sign": "a_P changes sign under a twist by a non-square unit",
    "isogeny.mu": "E is 2-isogenous over K(√−2) to its Galois conjugate, with dual of degree 2",
    "quer.epsilon": "ε = ε₂ε₅ has order 4, conductor 20 and conj(ε)(3) = −i",
    "quer.cocycle": "the degree cocycle of the Q-curve satisfies the 2-cocycle condition",
    "quer.embedding": "N_σ₀(α₀) = −1, N_σ₁(α₁) = 5 and σ₁(α₀)/α₀ = σ₀(α₁)/α₁",
    "quer.splitting": "the splitting map β has rational coboundary with ζ = −1",
    "quer.gamma": "γ = 2θ² − θ − 5 has norm 5 and is a unit at P2 and P3",
    "quer.sqrt_m2_norm": "the relative norm of √−2 from K(√−2) to K is 2",
    "weil.milne": "N_B = Nm(N_E)·Disc(K)² for every case",
    "weil.serre_levels": "the Serre levels are 1600, 800, 400 and 100",
    "weil.table_row": "conductors of the four 2-dimensional pieces multiply to N_B and agree in ρ/ρ^σ pairs",
    "weil.twisted_level": "the χ₈-twisted Serre level is 400 or 100",
    "newforms.schema": "the newform dataset parses with exact coefficients",
    "newforms.census": "8 CM, 12 S2 and 10 S3 forms at levels 100, 400, 1600; 4 S2 and 10 S3 at 800",
    "newforms.invariants": "a_1 = 1, Weil bound, inner twist by the nebentypus and multiplicativity",
    "newforms.s3_parity": "S3 forms of level 1600 have even coefficients",
    "eliminate.hecke_trace": "a_P3(f) = α⁴ + β⁴ is 14 or 2 for a₃ ∈ {±(2i − 2), ±(i − 1)}",
    "eliminate.form": "each newform is eliminated outside a finite set or congruence classes",
    "eliminate.s2_cross_check": "direct norm primes lie inside the fourth-power norm primes",
    "eliminate.twist_match": "f ⊗ χ₈ is a newform of level 800 for every S3 form of level 1600",
    "theorem.conditions": "no non-trivial primitive solution for the stated primes",
    "theorem.density": "the excluded exponents have density 1/4 (d = 2) and 1/2 (d = 3)",
    "theorem.bound": "the stated lower bound on p against the bound derived from exceptional sets",
    "search.trivial_only": "small-height search finds only trivial solutions",
    "eligible.density": "empirical density of eligible exponents approaches the stated density",
}


# ---------------------------------------------------------------------------
# Data Models
# ---------------------------------------------------------------------------
@dataclass
class CheckEntry:
    """Single entry in the audit trail."""
    claim: str
    status: str
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.claim not in CLAIMS:
            raise UnknownClaimError(f"unknown claim {self.claim!r}")
        if self.status not in STATUSES:
            raise ValueError(f"status must be one of {STATUSES}, got {self.status!r}")

    @property
    def anchor(self) -> str:
        return CLAIMS[self.claim]

    def to_dict(self) -> dict:
        return {
            "claim": self.claim,
            "anchor": self.anchor,
            "status": self.status,
            "details": self.details,
        }


@dataclass
class Report:
    command: str
    entries: list[CheckEntry] = field(default_factory=list)
    version: str = __version__

    def add(self, claim: str, ok: bool, details: Optional[dict] = None, *, otherwise: str = FAIL) -> CheckEntry:
        """Record *ok* as pass, otherwise with status *otherwise*."""
        entry = CheckEntry(claim, PASS if ok else otherwise, dict(details or {}))
        self.entries.append(entry)
        if entry.status != PASS:
            logger.warning("%s: %s %s", self.command, entry.status, claim)
        return entry

    def record(self, claim: str, status: str, details: Optional[dict] = None) -> CheckEntry:
        entry = CheckEntry(claim, status, dict(details or {}))
        self.entries.append(entry)
        return entry

    @property
    def summary(self) -> dict[str, int]:
        return {s: sum(1 for e in self.entries if e.status == s) for s in STATUSES}

    def exit_code(self, strict: bool = False) -> int:
        counts = self.summary
        if counts[FAIL] or (strict and counts[DISCREPANCY]):
            return 1
        return 0

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "entries": [e.to_dict() for e in self.entries],
            "summary": self.summary,
            "version": self.version,
        }


# ---------------------------------------------------------------------------
# Serialisation
# ---------------------------------------------------------------------------
def _plain(value: Any) -> Any:
    """JSON-ready copy; exact numbers that JSON lacks become strings."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(_plain(v) for v in value)
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    return str(value)


def _text(report: Report) -> str:
    lines = [f"{report.command} (version {report.version})"]
    for entry in report.entries:
        lines.append(f"[{entry.status.upper()}] {entry.claim}: {entry.anchor}")
        for key in sorted(entry.details):
            value = _plain(entry.details[key])
            if not isinstance(value, str):
                value = json.dumps(value, sort_keys=True, ensure_ascii=False)
            lines.append(f"    {key}: {value}")
    counts = report.summary
    lines.append("summary: " + ", ".join(f"{s}={counts[s]}" for s in STATUSES))
    return "\n".join(lines) + "\n"


def emit_report(report: Report, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(_plain(report.to_dict()), indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if fmt == "text":
        return _text(report)
    raise ValueError(f"Unsupported report format: {fmt}")


def write_report(report: Report, fmt: str, output: str | Path) -> Path:
    path = Path(output)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(emit_report(report, fmt), encoding="utf-8")
    logger.info("Saved report → %s", path)
    return path
