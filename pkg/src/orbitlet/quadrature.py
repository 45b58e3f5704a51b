"""Quadrature building blocks: composite Gauss panels and dyadic log-axes.

The improper integrals in this package concentrate mass near a coordinate
hyperplane (or the origin) and decay polynomially at infinity, so axes are
covered by dyadic rings [2^k, 2^(k+1)] carrying fixed-order Gauss-Legendre
nodes, optionally mirrored to the negative half-line, plus uniform Gauss
panels for the regular directions.  Summation uses np.sum, whose pairwise
reduction keeps results deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl(order: int) -> tuple[np.ndarray, np.ndarray]:
    if order not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(order)
        _GL_CACHE[order] = (x, w)
    return _GL_CACHE[order]


def gauss_panel(a: float, b: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = _gl(order)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return mid + half * x, half * w


def composite_gauss(a: float, b: float, panels: int, order: int):
    """Uniform panels on [a, b], Gauss-Legendre nodes per panel."""
    edges = np.linspace(a, b, panels + 1)
    nodes, weights = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        x, w = gauss_panel(lo, hi, order)
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


def signed_dyadic_axis(kmin: int, kmax: int, order: int,
                       include_center: bool = False):
    """Nodes covering +-[2^kmin, 2^kmax] by per-ring Gauss panels.

    With include_center, the gap (-2^kmin, 2^kmin) gets one Gauss panel too
    (only valid when the integrand is regular across zero).
    """
    nodes, weights = [], []
    for k in range(kmin, kmax):
        x, w = gauss_panel(2.0 ** k, 2.0 ** (k + 1), order)
        nodes.extend([x, -x])
        weights.extend([w, w])
    if include_center:
        x, w = gauss_panel(-(2.0 ** kmin), 2.0 ** kmin, order)
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)


@dataclass
class Axis:
    nodes: np.ndarray
    weights: np.ndarray


def tensor_eval(axes: list[Axis], func, chunk: int = 1 << 19) -> float:
    """Integrate func over the tensor grid of axes.

    func takes an (n, d) array of points and returns (n,) values; evaluation
    is chunked to bound memory.
    """
    grids = np.meshgrid(*[ax.nodes for ax in axes], indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    wgrids = np.meshgrid(*[ax.weights for ax in axes], indexing="ij")
    wts = wgrids[0].ravel().copy()
    for wg in wgrids[1:]:
        wts *= wg.ravel()
    total = 0.0
    for start in range(0, pts.shape[0], chunk):
        sl = slice(start, start + chunk)
        total += float(np.sum(func(pts[sl]) * wts[sl]))
    return total


@dataclass
class StagedResult:
    value: float
    converged: bool
    stages: int
    history: tuple


def staged_refinement(make_value, rtol: float = 1e-4, max_stages: int = 12,
                      min_stages: int = 2) -> StagedResult:
    """Run make_value(stage) until successive values stabilize.

    Stops at relative change < rtol between consecutive stages (after
    min_stages) or at max_stages with converged=False.
    """
    history = []
    prev = None
    for stage in range(max_stages):
        val = make_value(stage)
        history.append(val)
        if prev is not None and stage + 1 >= min_stages:
            denom = max(abs(val), 1e-300)
            if abs(val - prev) <= rtol * denom:
                return StagedResult(val, True, stage + 1, tuple(history))
        prev = val
    return StagedResult(history[-1], False, max_stages, tuple(history))
