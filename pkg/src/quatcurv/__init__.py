"""Quaternionic differential operators (D_MT, Laplacians, Lame) on orthogonal coordinate charts."""

__version__ = "0.1.0"
