"""Hadamard products of noncommutative polynomials, exactly.

Branching programs and circuits over Q, F_p and F_{p^k}; deterministic and
randomized identity testing; bridges between acyclic grammars and monotone
circuits; and a small exact lab for a +-1 correlation polynomial built from
finite-field characters.
"""

__version__ = "0.1.0"
