# qcurve: exact verification of the modular method for x⁵ + y⁵ = d·z^p, d ∈ {2, 3}
# Number fields, Frey Q-curves, conductors, Galois data and newform elimination

__version__ = "1.0.0"
