"""Weakly-supervised 3D gaze learning from looking-at-each-other geometry."""

__version__ = "0.1.0"
