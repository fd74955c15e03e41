"""Exact toric laboratory for singularity invariants, MMP runs and termination certificates."""

__version__ = "0.1.0"
