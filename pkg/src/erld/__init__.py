"""Desk-scale laboratory for upper tails of λ(G(n,p)) and Hom(C_2t, G(n,p))."""

__version__ = "0.1.0"
