"""Exact twists of small quantum groups u_q(g) at roots of unity."""

__version__ = "0.1.0"
