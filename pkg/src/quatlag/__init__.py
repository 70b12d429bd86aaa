"""Quaternion attitude tracking on a 4-DOF Lagrangian model of a rigid spacecraft."""

__version__ = "0.1.0"
