"""
Weierstrass coordinate changes.

A change of variables [u, r, s, t] with u ≠ 0 acts on points as

    x = u²x' + r
    y = u³y' + su²x' + t

In homogeneous coordinates this is the affine map

    [x]   [u²    0   r] [x']
    [y] = [su²  u³   t] [y']
    [1]   [0     0   1] [1 ]

and it carries a Weierstrass model (a₁, a₂, a₃, a₄, a₆) to (a₁', …, a₆') with

    u a₁'  = a₁ + 2s
    u²a₂'  = a₂ − sa₁ + 3r − s²
    u³a₃'  = a₃ + ra₁ + 2t
    u⁴a₄'  = a₄ − sa₃ + 2ra₂ − (t + rs)a₁ + 3r² − 2st
    u⁶a₆'  = a₆ + ra₄ + r²a₂ + r³ − ta₃ − t² − rta₁

The record is the audit trail of every step Tate's algorithm takes toward
a minimal model.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

logger = logging.getLogger("qcurve.transform")

Coefficients = tuple[Any, Any, Any, Any, Any]


@dataclass(frozen=True)
class WeierstrassTransform:
    """Immutable [u, r, s, t] with entries in the base field of the curve."""
    u: Any = 1
    r: Any = 0
    s: Any = 0
    t: Any = 0

    def __post_init__(self):
        if self.u == 0:
            raise ValueError("u must be nonzero in a Weierstrass change of variables")

    @classmethod
    def identity(cls) -> "WeierstrassTransform":
        return cls()

    @classmethod
    def scaling(cls, u) -> "WeierstrassTransform":
        return cls(u=u)

    @classmethod
    def translation(cls, r=0, s=0, t=0) -> "WeierstrassTransform":
        return cls(r=r, s=s, t=t)

    def is_identity(self) -> bool:
        return self.u == 1 and self.r == 0 and self.s == 0 and self.t == 0

    def apply(self, coeffs: Sequence) -> Coefficients:
        """Coefficients of the transformed model."""
        a1, a2, a3, a4, a6 = coeffs
        u, r, s, t = self.u, self.r, self.s, self.t
        n1 = a1 + 2 * s
        n2 = a2 - s * a1 + 3 * r - s * s
        n3 = a3 + r * a1 + 2 * t
        n4 = a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t
        n6 = a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1
        if u == 1:
            return n1, n2, n3, n4, n6
        ui = Fraction(1) / u
        ui2 = ui * ui
        ui3 = ui2 * ui
        return n1 * ui, n2 * ui2, n3 * ui3, n4 * ui2 * ui2, n6 * ui3 * ui3

    def compose(self, other: "WeierstrassTransform") -> "WeierstrassTransform":
        """The single change equal to applying *self* first and *other* second."""
        u1, r1, s1, t1 = self.u, self.r, self.s, self.t
        u2, r2, s2, t2 = other.u, other.r, other.s, other.t
        return WeierstrassTransform(
            u=u1 * u2,
            r=r1 + u1 * u1 * r2,
            s=s1 + u1 * s2,
            t=t1 + u1 * u1 * s1 * r2 + u1 * u1 * u1 * t2,
        )

    def affine_matrix(self) -> tuple[tuple[Any, Any, Any], ...]:
        """3×3 homogeneous matrix sending (x', y', 1) to (x, y, 1)."""
        u2 = self.u * self.u
        return (
            (u2, 0, self.r),
            (self.s * u2, u2 * self.u, self.t),
            (0, 0, 1),
        )

    def apply_to_point(self, x, y) -> tuple[Any, Any]:
        """Image (x, y) on the original model of a point (x', y') on the new one."""
        u2 = self.u * self.u
        return u2 * x + self.r, u2 * self.u * y + self.s * u2 * x + self.t

    def to_audit_dict(self) -> dict:
        """Serialisable dictionary for logging / JSON export."""
        return {"u": str(self.u), "r": str(self.r), "s": str(self.s), "t": str(self.t)}


def compose_all(steps: Sequence[WeierstrassTransform]) -> WeierstrassTransform:
    total = WeierstrassTransform.identity()
    for step in steps:
        total = total.compose(step)
    logger.debug("composed %d coordinate changes", len(steps))
    return total
