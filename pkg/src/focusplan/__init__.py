"""Focus-distance planning for fixed multi-camera networks."""

__version__ = "0.1.0"
