"""orbitlet: dilation groups, dual-orbit envelopes, vanishing-moment orders,
and desk-scale continuous wavelet transforms."""

from . import algebra, atoms, embeddedness, groups, orbit, quadrature, transform

__all__ = ["algebra", "atoms", "embeddedness", "groups", "orbit",
           "quadrature", "transform"]
__version__ = "0.1.0"
