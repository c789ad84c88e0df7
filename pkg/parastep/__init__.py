"""
Parastep: hyperbolic step of parabolic self-maps of the upper half-plane.

The numerical library lives in :mod:`parastep.hstep`; this package adds the
map spec file format, output writers and the command line.
"""

from __future__ import annotations

from .hstep import __version__

__all__ = ["__version__"]
