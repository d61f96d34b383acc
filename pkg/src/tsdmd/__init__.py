"""Transformed-snapshot DMD: equation-free reduced order models for
hyperbolic PDEs built from solution snapshots, discontinuity-aligning
spatial transforms, and dynamic mode decomposition."""

__version__ = "0.1.0"
