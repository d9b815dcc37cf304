"""Finite-model workbench for relations, exact completions, protomodularity and torsion theories."""

__version__ = "0.1.0"
