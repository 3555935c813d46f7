"""Induced metric, Levi-Civita connection, Kaehler residuals, curvature.

The intrinsic curvature is DEFINED through the Gauss equation of the
isometric immersion (all fixtures are immersions into flat space), which
avoids fourth derivatives of f; a finite-difference-of-metric oracle is
kept in the tests as a slow cross-check.
"""

import numpy as np

from . import kernels
from .chartcalc import ChartedImmersion, Jet3, holomorphic_basis


def induced_metric(jet: Jet3) -> np.ndarray:
    """g_ij = <d1_i, d1_j>, shape (G, 2m, 2m)."""
    return np.einsum("gix,gjx->gij", jet.d1, jet.d1)


def metric_data(jet: Jet3):
    """(g, ginv, dg, Gamma) with dg[g,i,j,l] = d_i g_{jl} and
    Gamma[g,k,i,j] = Gamma^k_{ij}, all from analytic jets."""
    g = induced_metric(jet)
    # positive definiteness via Cholesky
    np.linalg.cholesky(g)
    ginv = np.linalg.inv(g)
    dg = (np.einsum("gijx,glx->gijl", jet.d2, jet.d1)
          + np.einsum("gjx,gilx->gijl", jet.d1, jet.d2))
    Gamma = kernels.christoffel(dg, ginv)
    return g, ginv, dg, Gamma


def kaehler_residual(imm: ChartedImmersion, jet: Jet3):
    """(orthogonality, parallelity) residuals of the chart structure J.

    orth = sup |J^T g J - g|; parallel = sup |nabla J| which for the
    constant chart J reduces to the commutator with the connection
    matrices (Gamma_k)^l_a = Gamma^l_{ka}.
    """
    g, _, _, Gamma = metric_data(jet)
    J = imm.J
    orth = float(np.max(np.abs(
        np.einsum("ki,gkl,lj->gij", J, g, J) - g)))
    # Gamma[g,l,k,a]: connection matrix in k is Gam_k[l,a] = Gamma[g,l,k,a]
    GJ = np.einsum("glka,aj->glkj", Gamma, J)
    JG = np.einsum("la,gakj->glkj", J, Gamma)
    par = float(np.max(np.abs(GJ - JG)))
    return orth, par


def curvature_from_gauss(alpha: np.ndarray) -> np.ndarray:
    """R[g,i,j,k,l] = <R(d_i,d_j)d_k, d_l> via the Gauss equation."""
    return kernels.gauss_curvature(alpha)


def curvature_symmetry_residual(R: np.ndarray) -> float:
    """Max violation of the four classical index symmetries."""
    r1 = np.max(np.abs(R + R.transpose(0, 2, 1, 3, 4)))
    r2 = np.max(np.abs(R + R.transpose(0, 1, 2, 4, 3)))
    r3 = np.max(np.abs(R - R.transpose(0, 3, 4, 1, 2)))
    return float(max(r1, r2, r3))


def kaehler_curvature_identity_residual(R: np.ndarray, m: int) -> float:
    """sup |<R(x,y)u,v>| over u,v in the (1,0) coordinate basis."""
    B = holomorphic_basis(m)
    res = np.einsum("ak,bl,gijkl->gijab", B, B, R)
    return float(np.max(np.abs(res)))


def shape_operator(alpha, g, ginv, d1, xi, tol=1e-9):
    """A_xi = g^{-1} <alpha, xi> for a normal vector field xi (G, n)."""
    tangency = np.max(np.abs(np.einsum("gix,gx->gi", d1, xi)))
    if tangency > tol * max(1.0, float(np.max(np.abs(xi)))):
        raise ValueError(f"xi is not normal (tangential part {tangency:g})")
    M = np.einsum("gijx,gx->gij", alpha, xi)
    return np.einsum("gik,gkj->gij", ginv, M)


def normal_frame(jet: Jet3) -> np.ndarray:
    """Orthonormal real normal frame (G, n-2m, n) from the SVD of d1.

    The gauge is arbitrary per point; only gauge-invariant (fully
    frame-contracted) quantities may be built from it.
    """
    d = jet.chart_dim
    _, _, vh = np.linalg.svd(jet.d1, full_matrices=True)
    return vh[:, d:, :]


def normal_curvature(alpha, g, ginv, frame):
    """RN[g,i,j,a,b] = <R^N(d_i,d_j) xi_a, xi_b> via shape-operator
    commutators (the Ricci equation, which defines R^N here)."""
    M = np.einsum("gijx,gax->gaij", alpha, frame)
    A = np.einsum("gik,gakj->gaij", ginv, M)
    comm = (np.einsum("gaik,gbkj->gabij", A, A)
            - np.einsum("gbik,gakj->gabij", A, A))
    return np.einsum("gjk,gabki->gijab", g, comm)


def rn_tprime_residual(RN: np.ndarray, m: int) -> float:
    """sup |<R^N(x,y) xi, eta>| for x,y in the (1,0) basis (Lemma-style
    flatness of the normal curvature on T' x T')."""
    B = holomorphic_basis(m)
    res = np.einsum("ai,bj,gijcd->gabcd", B, B, RN)
    return float(np.max(np.abs(res)))


def curvature_operator(R: np.ndarray, ginv: np.ndarray) -> np.ndarray:
    """Rop[g,i,j,k,l]: R(d_i,d_j) d_k = sum_l Rop[...] d_l."""
    return np.einsum("gijka,gal->gijkl", R, ginv)


def sublemma_residual(geom) -> float:
    """Intertwining of tangent and normal curvatures through the
    pluri-mean form beta(x', y'') = alpha(x', conj(y')):

        R^N(x,y) beta(e) = beta(R(x,y) e)   for e in T' (x) T''.

    Expects a geometry bundle with jet, g, ginv, alpha, R, RN, frame.
    """
    m = geom.imm.complex_dim
    B = holomorphic_basis(m)
    Bc = B.conj()
    alpha_c = geom.alpha.astype(complex)
    # beta components: beta[a, b] = alpha(d'_a, d''_b), (G, m, m, n)
    beta = np.einsum("ai,bj,gijx->gabx", B, Bc, alpha_c)

    Rop = curvature_operator(geom.R, geom.ginv)
    # tangent curvature acting on the (1,0)/(0,1) coordinate basis:
    # R(d_i,d_j) d'_a = sum over chart basis, then re-contract into alpha
    Rprime = np.einsum("ak,gijkl->gijal", B, Rop.astype(complex))
    Rsecond = np.einsum("bk,gijkl->gijbl", Bc, Rop.astype(complex))
    rhs = (np.einsum("gijal,bq,glqx->gijabx", Rprime, Bc, alpha_c)
           + np.einsum("gijbl,ap,gplx->gijabx", Rsecond, B, alpha_c))

    # normal curvature as an operator through the real orthonormal frame
    frame = geom.frame.astype(complex)
    beta_coeff = np.einsum("gabx,gcx->gabc", beta, frame)
    lhs = np.einsum("gabc,gijcd,gdx->gijabx", beta_coeff, geom.RN.astype(complex),
                    frame)
    return float(np.max(np.abs(lhs - rhs)))
