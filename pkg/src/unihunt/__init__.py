"""Classification of unimodular lattices through cyclic neighbors of Z^n."""

__version__ = "0.1.0"
