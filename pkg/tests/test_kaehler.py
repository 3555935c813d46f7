"""Metric, connection, Kaehler residuals, and curvature tensors."""

import numpy as np
import pytest

from plurimean import kaehler
from plurimean.chartcalc import eval_jet
from plurimean.fixtures import get_immersion, registry
from plurimean.forms import compute_geometry

ADMITTED = [r.name for r in registry(include_controls=False)]


def _jet(name, per_axis=5):
    imm = get_immersion(name)
    pts = imm.grid(per_axis, margin=0.05)
    return imm, pts, eval_jet(imm, pts, mode="analytic")


@pytest.mark.parametrize("name", ADMITTED)
def test_metric_is_spd_and_J_compatible(name):
    imm, _, jet = _jet(name)
    g, ginv, _, _ = kaehler.metric_data(jet)
    assert np.allclose(np.einsum("gik,gkj->gij", g, ginv),
                       np.eye(jet.chart_dim), atol=1e-10)
    orth, par = kaehler.kaehler_residual(imm, jet)
    assert orth < 1e-8
    assert par < 1e-8


def test_skewed_chart_breaks_J_orthogonality():
    imm, _, jet = _jet("skewed-plane")
    orth, _ = kaehler.kaehler_residual(imm, jet)
    assert orth > 1e-2


@pytest.mark.parametrize("name", ["catenoid", "sphere", "veronese",
                                  "product-spheres"])
def test_metric_derivative_against_fd_oracle(name):
    imm, pts, jet = _jet(name)
    _, _, dg, _ = kaehler.metric_data(jet)
    h = 1e-5
    d = jet.chart_dim
    for i in range(d):
        ei = np.zeros(d)
        ei[i] = h
        gp = kaehler.induced_metric(imm.jet_fn(pts + ei))
        gm = kaehler.induced_metric(imm.jet_fn(pts - ei))
        fd = (gp - gm) / (2.0 * h)
        assert np.max(np.abs(dg[:, i] - fd)) < 1e-7


def test_catenoid_christoffel_closed_form():
    # conformal factor cosh^2(u): Gamma^u_uu = tanh u, Gamma^u_vv = -tanh u,
    # Gamma^v_uv = tanh u, all other symbols zero
    imm, pts, jet = _jet("catenoid")
    _, _, _, Gamma = kaehler.metric_data(jet)
    t = np.tanh(pts[:, 0])
    expected = np.zeros_like(Gamma)
    expected[:, 0, 0, 0] = t
    expected[:, 0, 1, 1] = -t
    expected[:, 1, 0, 1] = expected[:, 1, 1, 0] = t
    assert np.max(np.abs(Gamma - expected)) < 1e-12


@pytest.mark.parametrize("name", ADMITTED)
def test_curvature_symmetries(name):
    geom = compute_geometry(get_immersion(name),
                            get_immersion(name).grid(5, margin=0.05))
    assert kaehler.curvature_symmetry_residual(geom.R) < 1e-12
    m = geom.imm.complex_dim
    assert kaehler.kaehler_curvature_identity_residual(geom.R, m) < 1e-10


def test_sphere_constant_curvature_one():
    # R_ijkl = g_il g_jk - g_ik g_jl for the unit sphere
    imm = get_immersion("sphere")
    geom = compute_geometry(imm, imm.grid(5, margin=0.05))
    g = geom.g
    expected = (np.einsum("gil,gjk->gijkl", g, g)
                - np.einsum("gik,gjl->gijkl", g, g))
    assert np.max(np.abs(geom.R - expected)) < 1e-12


def test_sphere_shape_operator_is_minus_identity():
    imm = get_immersion("sphere")
    geom = compute_geometry(imm, imm.grid(5, margin=0.05))
    xi = geom.jet.value  # outward unit normal of the unit sphere
    A = kaehler.shape_operator(geom.alpha, geom.g, geom.ginv,
                               geom.jet.d1, xi)
    assert np.max(np.abs(A + np.eye(2))) < 1e-12


def test_shape_operator_rejects_tangent_field():
    imm = get_immersion("sphere")
    geom = compute_geometry(imm, imm.grid(5, margin=0.05))
    xi = geom.jet.d1[:, 0, :]  # tangent, not normal
    with pytest.raises(ValueError, match="not normal"):
        kaehler.shape_operator(geom.alpha, geom.g, geom.ginv,
                               geom.jet.d1, xi)


@pytest.mark.parametrize("name", ADMITTED)
def test_normal_frame_is_orthonormal_and_normal(name):
    _, _, jet = _jet(name)
    fr = kaehler.normal_frame(jet)
    k = fr.shape[1]
    gram = np.einsum("gax,gbx->gab", fr, fr)
    assert np.max(np.abs(gram - np.eye(k))) < 1e-12
    assert np.max(np.abs(np.einsum("gax,gix->gai", fr, jet.d1))) < 1e-10


@pytest.mark.parametrize("name", ["veronese", "product-spheres"])
def test_normal_curvature_antisymmetries(name):
    imm = get_immersion(name)
    geom = compute_geometry(imm, imm.grid(5, margin=0.05))
    assert np.max(np.abs(geom.RN
                         + geom.RN.transpose(0, 2, 1, 3, 4))) < 1e-12
    assert np.max(np.abs(geom.RN
                         + geom.RN.transpose(0, 1, 2, 4, 3))) < 1e-12


@pytest.mark.parametrize("name", ["sphere", "cylinder", "catenoid",
                                  "veronese", "product-spheres",
                                  "standard-embedding"])
def test_rn_vanishes_on_holomorphic_pairs_for_parallel_fixtures(name):
    imm = get_immersion(name)
    geom = compute_geometry(imm, imm.grid(5, margin=0.05))
    assert kaehler.rn_tprime_residual(geom.RN, imm.complex_dim) < 1e-10


@pytest.mark.parametrize("name", ["sphere", "cylinder", "veronese",
                                  "product-spheres"])
def test_sublemma_intertwining(name):
    imm = get_immersion(name)
    geom = compute_geometry(imm, imm.grid(5, margin=0.05))
    assert kaehler.sublemma_residual(geom) < 1e-10
