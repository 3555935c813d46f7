"""Projector-valued Gauss maps, normal subbundles, isotropy residuals."""

import numpy as np
import pytest

from plurimean import forms, gaussmaps
from plurimean.chartcalc import RankError
from plurimean.fixtures import get_immersion, registry

ADMITTED = [r.name for r in registry(include_controls=False)]

# verified subbundle ranks (tau', N°, N') per fixture
EXPECTED_RANKS = {
    "plane": (1, 0, 0),
    "sphere": (1, 1, 0),
    "ellipsoid": (1, 1, 1),
    "cylinder": (1, 1, 1),
    "catenoid": (1, 0, 1),
    "helicoid": (1, 0, 1),
    "holomorphic-curve": (1, 0, 1),
    "product-spheres": (2, 2, 0),
    "veronese": (1, 1, 1),
    "standard-embedding": (1, 1, 0),
}


def _geom(name, per_axis=5):
    imm = get_immersion(name)
    return forms.compute_geometry(imm, imm.grid(per_axis, margin=0.05))


def _bundles(name, per_axis=5):
    imm = get_immersion(name)
    pts = imm.grid(per_axis, margin=0.05)
    geom = forms.compute_geometry(imm, pts)
    bun, dP = gaussmaps.projector_derivatives(imm, pts)
    return geom, bun, dP


@pytest.mark.parametrize("name", ADMITTED)
def test_gauss_projection_lands_in_grassmannian(name):
    geom = _geom(name)
    P = gaussmaps.gauss_projection(geom.jet)
    idem, symm, tr = gaussmaps.grassmann_invariants(
        P, geom.jet.chart_dim)
    assert max(idem, symm, tr) < 1e-10


@pytest.mark.parametrize("name", ADMITTED)
def test_gauss_differential_two_routes(name):
    imm = get_immersion(name)
    res = gaussmaps.dgauss_check(imm, imm.grid(5, margin=0.05))
    assert res < 1e-5


@pytest.mark.parametrize("name", ["sphere", "cylinder", "catenoid",
                                  "veronese", "standard-embedding"])
def test_levi_form_vanishes_on_parallel_fixtures(name):
    assert gaussmaps.gauss_levi_residual(_geom(name)) < 1e-10


def test_levi_form_detects_nonparallel_control():
    assert gaussmaps.gauss_levi_residual(_geom("ellipsoid")) > 1e-2


def test_projector_from_generators_properties():
    rng = np.random.default_rng(0)
    gens = rng.standard_normal((6, 2, 5)) + 1j * rng.standard_normal(
        (6, 2, 5))
    P, r = gaussmaps.projector_from_generators(gens)
    assert r == 2
    assert np.max(np.abs(np.einsum("gxy,gyz->gxz", P, P) - P)) < 1e-12
    assert np.max(np.abs(P - P.transpose(0, 2, 1).conj())) < 1e-12
    # generators themselves are fixed by the projector
    assert np.max(np.abs(np.einsum("gxy,gky->gkx", P, gens)
                         - gens)) < 1e-12


def test_projector_rank_zero_with_scale():
    noise = 1e-14 * np.random.default_rng(1).standard_normal((4, 2, 5))
    P, r = gaussmaps.projector_from_generators(noise.astype(complex),
                                               scale=1.0)
    assert r == 0
    assert np.max(np.abs(P)) == 0.0


def test_projector_rejects_grid_varying_rank():
    gens = np.zeros((3, 2, 4), dtype=complex)
    gens[:, 0, 0] = 1.0
    gens[2, 1, 1] = 1.0  # rank jumps from 1 to 2 at the last point
    with pytest.raises(RankError, match="rank varies"):
        gaussmaps.projector_from_generators(gens)


@pytest.mark.parametrize("name", ADMITTED)
def test_subbundle_ranks(name):
    geom = _geom(name)
    bun = gaussmaps.bundle_projectors(geom)
    assert (bun.ranks["tau'"], bun.ranks["N°"],
            bun.ranks["N'"]) == EXPECTED_RANKS[name]
    # tau'' is the conjugate bundle, N^c the full normal complement
    n = geom.imm.ambient_dim
    total = bun.P_T + bun.P_Nc
    assert np.max(np.abs(total - np.eye(n))) < 1e-10


@pytest.mark.parametrize("name", ADMITTED)
def test_superhorizontality_universal(name):
    _, bun, dP = _bundles(name)
    assert gaussmaps.superhorizontality_residual(bun, dP) < 1e-5


@pytest.mark.parametrize("name,small", [
    ("catenoid", True), ("holomorphic-curve", True), ("plane", True),
    ("veronese", False), ("sphere", False),
])
def test_holomorphicity_routes_agree(name, small):
    geom, bun, dP = _bundles(name)
    r1, r2 = gaussmaps.holomorphicity_residuals(geom, bun, dP)
    if small:
        assert r1 < 1e-6 and r2 < 1e-5
    else:
        assert r1 > 1e-1 and r2 > 1e-1


def test_half_isotropy_veronese_and_cylinder():
    geom, bun, _ = _bundles("veronese")
    t1, t2 = gaussmaps.half_isotropy_residual(geom, bun)
    assert t1 < 1e-6 and t2 < 1e-6
    geom, bun, _ = _bundles("cylinder")
    t1, _ = gaussmaps.half_isotropy_residual(geom, bun)
    assert t1 > 1e-2


def test_isotropy_decomposition_veronese():
    geom, bun, dP = _bundles("veronese")
    rep = gaussmaps.isotropy_decomposition(geom, bun, dP)
    assert rep.isotropic
    assert rep.orthogonality < 1e-8
    assert rep.parallelity < 1e-5
    conj_sym, no_real, iso = gaussmaps.isotropy_invariants(bun)
    assert conj_sym < 1e-10
    assert no_real < 1e-10
    assert iso < 1e-10


def test_isotropy_decomposition_rejects_catenoid():
    geom, bun, dP = _bundles("catenoid")
    rep = gaussmaps.isotropy_decomposition(geom, bun, dP)
    assert not rep.isotropic
    assert rep.orthogonality > 1e-2


@pytest.mark.parametrize("name", ["veronese", "holomorphic-curve",
                                  "product-spheres",
                                  "standard-embedding"])
def test_differential_chain(name):
    geom, bun, dP = _bundles(name)
    ch = gaussmaps.differential_chain_residuals(geom, bun, dP)
    assert max(ch.values()) < 1e-4


@pytest.mark.parametrize("name", ["sphere", "veronese",
                                  "product-spheres",
                                  "standard-embedding"])
def test_gauss_section_on_spherical_fixtures(name):
    geom, bun, _ = _bundles(name)
    mc = forms.mean_curvature_and_sphere_reduction(geom)
    normality, tangency, spread = gaussmaps.gauss_section_check(
        geom, bun, mc)
    assert max(normality, tangency, spread) < 1e-9


def test_gauss_section_requires_spherical():
    geom, bun, _ = _bundles("catenoid")
    mc = forms.mean_curvature_and_sphere_reduction(geom)
    with pytest.raises(ValueError, match="not spherical"):
        gaussmaps.gauss_section_check(geom, bun, mc)
