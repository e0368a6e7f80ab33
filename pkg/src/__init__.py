"""
Continuous-variable teleportation through lossy channels.

Closed-form fidelities for squeezed and number states, the optimizations
built on them, a phase-space grid oracle and a Monte-Carlo rebuild of the
measurement, driven from a small CLI.
"""

__version__ = "1.0.0"
