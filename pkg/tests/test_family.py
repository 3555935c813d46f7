"""Associated family: rotated forms, structure equations, integration,
rigid matching, and the normal-bundle automorphism."""

import numpy as np
import pytest

from plurimean import family, forms, gaussmaps
from plurimean.fixtures import get_immersion, registry

PPMC = [r.name for r in registry() if r.flags["ppmc"]]


def _geom(name, per_axis=5):
    imm = get_immersion(name)
    return forms.compute_geometry(imm, imm.grid(per_axis, margin=0.05))


@pytest.mark.parametrize("theta", family.THETA_SWEEP)
def test_rotation_is_orthogonal_and_periodic(theta):
    J = get_immersion("catenoid").J
    R = family.rotation(J, theta)
    assert np.allclose(R.T @ R, np.eye(2))
    assert np.allclose(family.rotation(J, theta + 2 * np.pi), R)


@pytest.mark.parametrize("name", ["catenoid", "veronese",
                                  "product-spheres", "ellipsoid"])
@pytest.mark.parametrize("theta", [0.0, np.pi / 8, np.pi / 3, np.pi / 2])
def test_rotated_form_type_decomposition(name, theta):
    # alpha_theta = e^{2it} a^{(2,0)} + a^{(1,1)} + e^{-2it} a^{(0,2)}
    geom = _geom(name)
    assert family.rotate_form_component_residual(geom, theta) < 1e-12


def test_rotation_by_pi_fixes_alpha():
    geom = _geom("veronese")
    rot = family.rotate_form(geom.alpha, geom.imm.J, np.pi)
    assert np.max(np.abs(rot - geom.alpha)) < 1e-12


@pytest.mark.parametrize("name", PPMC)
@pytest.mark.parametrize("theta", family.THETA_SWEEP)
def test_structure_equations_hold_on_ppmc_fixtures(name, theta):
    g, c, r = family.structure_equation_residuals(_geom(name), theta)
    assert g < 1e-10
    assert c < 1e-10
    assert r < 1e-10


def test_structure_equations_fail_on_ellipsoid():
    _, c, _ = family.structure_equation_residuals(_geom("ellipsoid"),
                                                  np.pi / 4)
    assert c > 1e-2


@pytest.mark.parametrize("name", ["catenoid", "helicoid",
                                  "holomorphic-curve", "plane"])
@pytest.mark.parametrize("theta", [np.pi / 8, np.pi / 2, np.pi])
def test_closedness_on_pluriminimal_fixtures(name, theta):
    assert family.closedness_residual(_geom(name), theta) < 1e-10


def test_closedness_fails_for_nonminimal_surface():
    assert family.closedness_residual(_geom("sphere"), np.pi / 2) > 1e-2


def test_integration_at_theta_zero_recovers_catenoid():
    imm = get_immersion("catenoid")
    member = family.integrate_family(imm, 0.0, per_axis=21)
    target = imm.evaluate(member.pts)
    _, _, rms = family.rigid_match(member.values, target)
    assert rms < 1e-7  # O(h^4) quadrature error at a 21-point grid
    assert member.metric_deviation < 1e-12


def test_conjugate_surface_is_the_helicoid():
    cat = get_immersion("catenoid")
    member = family.integrate_family(cat, np.pi / 2, per_axis=41)
    target = get_immersion("helicoid").evaluate(member.pts)
    _, _, rms = family.rigid_match(member.values, target)
    assert rms < 1e-5
    assert member.metric_deviation < 1e-12


@pytest.mark.parametrize("theta", family.THETA_SWEEP[1:])
def test_family_members_are_isometric(theta):
    member = family.integrate_family(get_immersion("catenoid"), theta,
                                     per_axis=21)
    assert member.metric_deviation < 1e-5


def test_integration_rejects_non_closed_form():
    with pytest.raises(ValueError, match="not closed"):
        family.integrate_family(get_immersion("sphere"), np.pi / 2)


def test_integration_limited_to_surfaces():
    with pytest.raises(NotImplementedError):
        family.integrate_family(get_immersion("product-spheres"),
                                np.pi / 2)


@pytest.mark.parametrize("seed", range(10))
def test_rigid_match_recovers_random_motion(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((60, 3))
    Q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    if seed % 2:
        Q[:, 0] *= -1.0  # reflections are allowed
    t = rng.standard_normal(3)
    B = A @ Q.T + t
    Qh, th, rms = family.rigid_match(A, B)
    assert rms < 1e-12
    assert np.max(np.abs(Qh - Q)) < 1e-10
    assert np.max(np.abs(th - t)) < 1e-10


def test_rigid_match_rejects_shape_mismatch():
    with pytest.raises(ValueError):
        family.rigid_match(np.zeros((4, 3)), np.zeros((5, 3)))


# ------------------------------------------------------------- psi_theta

def _psi_inputs(name):
    imm = get_immersion(name)
    pts = imm.grid(5, margin=0.05)
    geom = forms.compute_geometry(imm, pts)
    bun = gaussmaps.bundle_projectors(geom)
    return geom, bun


@pytest.mark.parametrize("name", ["veronese", "sphere",
                                  "product-spheres",
                                  "standard-embedding",
                                  "holomorphic-curve", "plane"])
@pytest.mark.parametrize("theta", family.THETA_SWEEP)
def test_psi_intertwines_rotated_forms(name, theta):
    geom, bun = _psi_inputs(name)
    psi = family.build_psi(geom, bun, theta)
    assert psi.eq8_residual < 1e-8
    assert psi.unitarity < 1e-10


@pytest.mark.parametrize("name,dim", [
    ("veronese", 2), ("holomorphic-curve", 2), ("sphere", 0),
    ("product-spheres", 0), ("standard-embedding", 0),
])
def test_psi_halfturn_minus_one_eigenspace(name, dim):
    geom, bun = _psi_inputs(name)
    psi = family.build_psi(geom, bun, np.pi / 2)
    assert psi.minus_one_dim == dim


@pytest.mark.parametrize("name", ["veronese", "standard-embedding"])
def test_psi_fullturn_is_identity_on_normal_bundle(name):
    geom, bun = _psi_inputs(name)
    psi = family.build_psi(geom, bun, np.pi)
    assert psi.identity_on_N < 1e-12


def test_psi_standard_embedding_trivial_at_halfturn():
    # N' has rank 0, so the half-turn automorphism is the identity on N
    geom, bun = _psi_inputs("standard-embedding")
    psi = family.build_psi(geom, bun, np.pi / 2)
    assert psi.identity_on_N < 1e-8
