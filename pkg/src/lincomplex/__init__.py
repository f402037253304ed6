"""Linear complexes of subspaces of finite projective spaces and their null polarities."""

__version__ = "0.1.0"
