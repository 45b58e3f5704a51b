"""Tests for orbit geometry, envelopes, sections, and measure transfer."""

import math

import numpy as np
import pytest

from orbitlet import groups as gr
from orbitlet import orbit as ob


def test_orbit_kinds():
    assert ob.orbit_of(gr.Shearlet2D(0.5)).kind == ob.FIRST_COORD
    assert ob.orbit_of(gr.Similitude(3)).kind == ob.PUNCTURED
    assert ob.orbit_of(gr.Diagonal(2)).kind == ob.CROSS
    assert ob.orbit_of(gr.toeplitz_shearlet_group(3)).kind == ob.FIRST_COORD
    block = ob.orbit_of(gr.DirectProduct((gr.Diagonal(1), gr.Shearlet2D(0.5))))
    assert block.kind == ob.BLOCK and block.dim == 3


def test_dist_first_coordinate():
    orbit = ob.orbit_of(gr.Shearlet2D(0.5))
    d, eta = ob.dist_to_complement(orbit, [0.3, 5.0])
    assert d == pytest.approx(0.3)
    assert np.allclose(eta, [0.0, 5.0])


def test_dist_cross():
    orbit = ob.orbit_of(gr.Diagonal(2))
    d, eta = ob.dist_to_complement(orbit, [2.0, -0.5])
    assert d == pytest.approx(0.5)
    assert np.allclose(eta, [2.0, 0.0])


def test_dist_punctured():
    orbit = ob.orbit_of(gr.Similitude(2))
    d, eta = ob.dist_to_complement(orbit, [3.0, 4.0])
    assert d == pytest.approx(5.0)
    assert np.allclose(eta, [0.0, 0.0])


def test_dist_block_product():
    spec = gr.DirectProduct((gr.Diagonal(1), gr.Shearlet2D(0.5)))
    orbit = ob.orbit_of(spec)
    d, eta = ob.dist_to_complement(orbit, [2.0, 0.7, 9.0])
    assert d == pytest.approx(0.7)
    assert np.allclose(eta, [2.0, 0.0, 9.0])


def test_dist_rejects_complement_point():
    orbit = ob.orbit_of(gr.Shearlet2D(0.5))
    with pytest.raises(ob.OrbitError):
        ob.dist_to_complement(orbit, [0.0, 1.0])


def test_envelope_orthogonality_and_bounds():
    rng = np.random.default_rng(0)
    for spec in (gr.Shearlet2D(0.5), gr.Similitude(3), gr.Diagonal(3)):
        orbit = ob.orbit_of(spec)
        pts = rng.normal(size=(200, spec.dim)) * 3
        pts = pts[np.array([ob.in_orbit(orbit, p) for p in pts])]
        dist, eta = ob.nearest_complement(orbit, pts)
        # eta is orthogonal to xi - eta for the euclidean nearest point
        inner = np.einsum("ni,ni->n", eta, pts - eta)
        assert np.abs(inner).max() < 1e-10
        a = ob.envelope_values(orbit, pts)
        assert (a <= 1.0 + 1e-12).all()
        assert (a <= 1.0 / (1.0 + np.linalg.norm(pts, axis=1)) + 1e-12).all()


def test_envelope_examples():
    orbit = ob.orbit_of(gr.toeplitz_shearlet_group(3))
    v = ob.envelope_A(orbit, [1.0, 0.0, 0.0])
    assert v.a == pytest.approx(0.5)
    # punctured 1-D style: along the ray (r, 0) of the similitude orbit
    orbit2 = ob.orbit_of(gr.Similitude(2))
    for r in (0.1, 0.5, 2.0, 7.0):
        v = ob.envelope_A(orbit2, [r, 0.0])
        assert v.a == pytest.approx(min(r, 1.0 / (1.0 + r)))


def test_envelope_AH_shearlet_formula():
    spec = gr.Shearlet2D(0.5)
    rng = np.random.default_rng(1)
    for _ in range(50):
        a = float(np.exp(rng.uniform(-2, 2)))
        b = float(rng.uniform(-4, 4))
        h = gr.shearlet2d_element(spec, a, b)
        expected = min(a / (1.0 + abs(b)), 1.0 / (1.0 + math.hypot(a, b)))
        assert ob.envelope_AH(spec, h) == pytest.approx(expected)


def test_envelope_AH_identity():
    spec = gr.toeplitz_shearlet_group(3)
    assert ob.envelope_AH(spec, gr.identity(spec)) == pytest.approx(0.5)


def test_envelope_AH_generalized_bounds():
    # A_H(h) <= exp(r) and A_H(h) <= C exp(-r) along the diagonal subgroup
    spec = gr.standard_shearlet_group(3)
    for r in np.linspace(-3, 3, 25):
        h = gr.element_from_factored(spec, 1, float(r), np.zeros(2))
        ah = ob.envelope_AH(spec, h)
        assert ah <= math.exp(r) + 1e-12
        assert ah <= 2.0 * math.exp(-r)


def test_orbit_section_roundtrip():
    rng = np.random.default_rng(2)
    specs = [gr.Shearlet2D(0.5), gr.standard_shearlet_group(3),
             gr.toeplitz_shearlet_group(4), gr.Diagonal(3), gr.Similitude(2),
             gr.DirectProduct((gr.Diagonal(1), gr.Shearlet2D(0.5)))]
    for spec in specs:
        orbit = ob.orbit_of(spec)
        count = 0
        while count < 100:
            xi = rng.normal(size=spec.dim) * 2
            if not ob.in_orbit(orbit, xi):
                continue
            h = ob.orbit_section(spec, xi)
            assert np.allclose(gr.dual_action(h, orbit.base_point), xi,
                               rtol=1e-10, atol=1e-12)
            count += 1


def test_orbit_section_base_point_is_identity():
    spec = gr.standard_shearlet_group(3)
    h = ob.orbit_section(spec, [1.0, 0.0, 0.0])
    assert np.allclose(h.matrix, np.eye(3), atol=1e-12)


def test_orbit_section_shearlet_ab():
    spec = gr.Shearlet2D(0.5)
    h = ob.orbit_section(spec, [4.0, 1.0])
    _, a, b = gr.shearlet2d_ab(h)
    assert (a, b) == (pytest.approx(4.0), pytest.approx(1.0))


def test_orbit_membership_invariance():
    rng = np.random.default_rng(3)
    for spec in (gr.Shearlet2D(0.5), gr.Diagonal(3), gr.Similitude(2)):
        orbit = ob.orbit_of(spec)
        sample = gr.sample_group(spec, rng, 50, 2.0, 2.0)
        for mat in sample.matrices[:20]:
            xi = rng.normal(size=spec.dim)
            while not ob.in_orbit(orbit, xi):
                xi = rng.normal(size=spec.dim)
            assert ob.in_orbit(orbit, mat.T @ xi)


# --- quadrature --------------------------------------------------------------

def gaussian(pts):
    return np.exp(-np.pi * np.einsum("ni,ni->n", pts, pts))


def test_orbit_integral_gaussian_2d():
    orbit = ob.orbit_of(gr.Shearlet2D(0.5))
    res = ob.orbit_integral(orbit, gaussian, rtol=1e-4)
    assert res.converged
    assert res.value == pytest.approx(1.0, rel=1e-3)


def test_orbit_integral_envelope_power_finite():
    orbit = ob.orbit_of(gr.Shearlet2D(0.5))
    k = 4  # > d
    res = ob.orbit_integral(orbit, lambda p: ob.envelope_values(orbit, p) ** k)
    assert res.converged
    assert 0 < res.value < math.inf


def test_haar_transfer_shearlet2d():
    report = ob.haar_transfer_check(gr.Shearlet2D(0.5), gaussian)
    assert report.rel_error < 1e-3, report


def test_haar_transfer_standard_3d():
    report = ob.haar_transfer_check(gr.standard_shearlet_group(3), gaussian)
    assert report.rel_error < 1e-3, report


def test_haar_transfer_similitude_2d():
    report = ob.haar_transfer_check(gr.Similitude(2), gaussian)
    assert report.rel_error < 1e-3, report


def test_haar_transfer_diagonal_2d():
    report = ob.haar_transfer_check(gr.Diagonal(2), gaussian)
    assert report.rel_error < 1e-3, report


# --- envelope regularity properties ------------------------------------------

CATALOG = [gr.Shearlet2D(0.5), gr.Similitude(2), gr.Diagonal(2),
           gr.standard_shearlet_group(3), gr.toeplitz_shearlet_group(3)]


def _orbit_points(orbit, rng, n):
    pts = np.empty((0, orbit.dim))
    while len(pts) < n:
        cand = rng.normal(size=(2 * n, orbit.dim)) * 2.5
        keep = np.array([ob.in_orbit(orbit, p) for p in cand])
        pts = np.concatenate([pts, cand[keep]])
    return pts[:n]


@pytest.mark.parametrize("spec", CATALOG, ids=lambda s: str(s)[:30])
def test_moderateness_bound(spec):
    rng = np.random.default_rng(4)
    orbit = ob.orbit_of(spec)
    pts = _orbit_points(orbit, rng, 10_000)
    mats = gr.sample_near_identity(spec, rng, 64, radius=0.5)
    a0 = ob.envelope_values(orbit, pts)
    worst = 0.0
    for mat in mats:
        moved = pts @ mat  # rows: (h^T xi)^T = xi^T h
        ratio = ob.envelope_values(orbit, moved) / a0
        worst = max(worst, float(ratio.max()))
    assert worst <= 64.0, worst


@pytest.mark.parametrize("spec", CATALOG, ids=lambda s: str(s)[:30])
def test_norm_robustness(spec):
    rng = np.random.default_rng(5)
    orbit = ob.orbit_of(spec)
    pts = _orbit_points(orbit, rng, 10_000)
    a2 = ob.envelope_values(orbit, pts)
    ainf = ob.envelope_values_maxnorm(orbit, pts)
    ratio = ainf / a2
    assert ratio.max() <= 16.0
    assert ratio.min() >= 1.0 / 16.0


def test_conjugation_equivalence():
    # envelope of the conjugated group at g^T xi stays within two-sided
    # constant factors of the original envelope
    rng = np.random.default_rng(6)
    spec = gr.Shearlet2D(0.5)
    orbit = ob.orbit_of(spec)
    g = np.array([[1.0, 0.4], [-0.3, 1.1]])
    pts = _orbit_points(orbit, rng, 5_000)
    a1 = ob.envelope_values(orbit, pts)
    # nearest point of (g^T O)^c to g^T xi: minimize |g^T(xi - eta)| over
    # eta_1 = 0, a 1-D least-squares problem in eta_2
    gt = g.T
    col = gt[:, 1]
    moved = pts @ g
    coef = (moved @ col) / (col @ col)
    zeta = np.outer(coef, col)
    dist = np.linalg.norm(moved - zeta, axis=1)
    a2 = np.minimum(dist / (1.0 + np.linalg.norm(zeta, axis=1)),
                    1.0 / (1.0 + np.linalg.norm(moved, axis=1)))
    ratio = a2 / a1
    assert ratio.max() <= 100.0
    assert ratio.min() >= 1.0 / 100.0
    # and the spread itself should be modest for this mild g
    assert ratio.max() / ratio.min() < 50.0


def test_block_product_envelope_inequality():
    # A_H(h)^2 <= A_H1(h1) A_H2(h2) for block-diagonal products; the block
    # envelope uses the exact product-space distance, not the per-block
    # product, so this is an inequality rather than an identity
    rng = np.random.default_rng(7)
    f1, f2 = gr.Diagonal(1), gr.Shearlet2D(0.5)
    spec = gr.DirectProduct((f1, f2))
    orbit = ob.orbit_of(spec)
    o1, o2 = ob.orbit_of(f1), ob.orbit_of(f2)
    s1 = gr.sample_group(f1, rng, 300, 2.0, 2.0)
    s2 = gr.sample_group(f2, rng, 300, 2.0, 2.0)
    duals = np.concatenate([s1.dual_points, s2.dual_points], axis=1)
    a = ob.envelope_values(orbit, duals)
    a1 = ob.envelope_values(o1, s1.dual_points)
    a2 = ob.envelope_values(o2, s2.dual_points)
    assert (a ** 2 <= a1 * a2 * (1 + 1e-12)).all()


def test_envelope_AH_continuity_along_path():
    spec = gr.Shearlet2D(0.5)
    rs = np.linspace(-2, 2, 400)
    vals = [ob.envelope_AH(spec, gr.element_from_factored(spec, 1, float(r), [0.7]))
            for r in rs]
    jumps = np.abs(np.diff(vals))
    assert jumps.max() < 0.02


def test_orbit_density_closed_forms():
    pts = np.array([[0.5, 3.0], [2.0, -1.0]])
    shear = ob.orbit_density(gr.Shearlet2D(0.5), pts)
    assert np.allclose(shear, np.abs(pts[:, 0]) ** -2)
    sim = ob.orbit_density(gr.Similitude(2), pts)
    assert np.allclose(sim, np.linalg.norm(pts, axis=1) ** -2.0)
    diag = ob.orbit_density(gr.Diagonal(2), pts)
    assert np.allclose(diag, 1.0 / np.abs(pts).prod(axis=1))
    # generalized shearlet density agrees with Delta_H/|det| at the section
    spec = gr.standard_shearlet_group(3)
    xi = np.array([0.8, 1.5, -0.4])
    h = ob.orbit_section(spec, xi)
    det, dh, _ = gr.modular_data(spec, h)
    assert ob.orbit_density(spec, xi[None])[0] == pytest.approx(dh / abs(det))
