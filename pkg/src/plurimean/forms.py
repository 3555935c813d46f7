"""Second fundamental form, (p,q)-decomposition, covariant derivatives,
and the scalar residuals classifying an immersion (ppmc, pluriminimal,
mean-curvature sphere reduction).
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kaehler
from .chartcalc import ChartedImmersion, Jet3, eval_jet, holomorphic_basis


@dataclass
class GeometryData:
    """Everything computable pointwise from the order-3 jets on a grid."""

    imm: ChartedImmersion
    pts: np.ndarray
    jet: Jet3
    g: np.ndarray        # (G, d, d)
    ginv: np.ndarray
    Gamma: np.ndarray    # (G, d, d, d), Gamma[g,k,i,j] = Gamma^k_{ij}
    alpha: np.ndarray    # (G, d, d, n)
    Dalpha: np.ndarray   # (G, d, d, d, n), [k,i,j] = (D_k alpha)(i,j)
    alpha20: np.ndarray  # (G, m, m, n) complex: alpha(d'_a, d'_b)
    alpha11: np.ndarray  # (G, m, m, n) complex: alpha(d'_a, d''_b)
    frame: np.ndarray    # (G, n-d, n) real orthonormal normal frame
    R: np.ndarray = field(init=False)
    RN: np.ndarray = field(init=False)

    def __post_init__(self):
        self.R = kaehler.curvature_from_gauss(self.alpha)
        self.RN = kaehler.normal_curvature(self.alpha, self.g, self.ginv,
                                           self.frame)

    @property
    def alpha02(self) -> np.ndarray:
        return np.conj(self.alpha20)

    def tangent_projector(self) -> np.ndarray:
        return np.einsum("gix,gij,gjy->gxy", self.jet.d1, self.ginv,
                         self.jet.d1)

    def normal_project(self, vec: np.ndarray) -> np.ndarray:
        """Project ambient vectors (G, ..., n) onto the normal space."""
        P = self.tangent_projector()
        if np.iscomplexobj(vec):
            P = P.astype(complex)
        return vec - np.einsum("gxy,g...y->g...x", P, vec)


def compute_geometry(imm: ChartedImmersion, pts: np.ndarray) -> GeometryData:
    jet = eval_jet(imm, pts, mode="analytic")
    g, ginv, _, Gamma = kaehler.metric_data(jet)
    d = jet.chart_dim

    # alpha_ij = d2_ij - Gamma^a_ij d1_a (the tangential part of d2 is
    # exactly the Christoffel contraction for an isometric immersion)
    alpha = jet.d2 - np.einsum("gaij,gax->gijx", Gamma, jet.d1)

    # normal projector applied without a frame
    P_T = np.einsum("gix,gij,gjy->gxy", jet.d1, ginv, jet.d1)

    def p_normal(vec):
        return vec - np.einsum("gxy,g...y->g...x", P_T, vec)

    # (D_k alpha)(i,j): ambient derivative of alpha, normally projected,
    # minus the two Christoffel corrections.  No derivative of Gamma is
    # needed: the d(Gamma)*d1 term is tangential and dies in the
    # projection.
    amb = jet.d3 - np.einsum("gaij,gkax->gkijx", Gamma, jet.d2)
    Dalpha = (p_normal(amb)
              - np.einsum("glki,gljx->gkijx", Gamma, alpha)
              - np.einsum("glkj,gilx->gkijx", Gamma, alpha))

    m = imm.complex_dim
    B = holomorphic_basis(m)
    ac = alpha.astype(complex)
    alpha20 = np.einsum("ai,bj,gijx->gabx", B, B, ac)
    alpha11 = np.einsum("ai,bj,gijx->gabx", B, B.conj(), ac)

    frame = kaehler.normal_frame(jet)
    return GeometryData(imm=imm, pts=pts, jet=jet, g=g, ginv=ginv,
                        Gamma=Gamma, alpha=alpha, Dalpha=Dalpha,
                        alpha20=alpha20, alpha11=alpha11, frame=frame)


# ------------------------------------------------------------- residuals

def normal_valued_residual(geom: GeometryData) -> float:
    """sup |<alpha(d_i,d_j), d1_k>| (alpha must be normal-valued)."""
    return float(np.max(np.abs(
        np.einsum("gijx,gkx->gijk", geom.alpha, geom.jet.d1))))


def alpha11_on_real(alpha: np.ndarray, J: np.ndarray) -> np.ndarray:
    """alpha^{(1,1)}(d_i, d_j) on the real basis:
    (alpha(x,y) + alpha(Jx,Jy)) / 2."""
    rotated = np.einsum("ai,bj,gabx->gijx", J, J, alpha)
    return 0.5 * (alpha + rotated)


def eq2_consistency_residual(geom: GeometryData) -> float:
    """Real-basis pluri-mean values vs the complex (1,1)-components."""
    m = geom.imm.complex_dim
    B = holomorphic_basis(m)
    a11_real = alpha11_on_real(geom.alpha, geom.imm.J).astype(complex)
    recon = np.einsum("ai,bj,gijx->gabx", B, B.conj(), a11_real)
    return float(np.max(np.abs(recon - geom.alpha11)))


def ppmc_residual(geom: GeometryData) -> float:
    """sup |D(alpha^{(1,1)})|: covariant derivative of the pluri-mean
    part, computed from D(alpha) by J-averaging (tensorial in (i,j))."""
    J = geom.imm.J
    rotated = np.einsum("ai,bj,gkabx->gkijx", J, J, geom.Dalpha)
    return float(np.max(np.abs(0.5 * (geom.Dalpha + rotated))))


def pluriminimal_residual(geom: GeometryData) -> float:
    """sup |alpha^{(1,1)}| over the complex basis."""
    return float(np.max(np.abs(geom.alpha11)))


def codazzi_residual(geom: GeometryData) -> float:
    """sup |(D_i alpha)(j,k) - (D_j alpha)(i,k)| (flat ambient space)."""
    return float(np.max(np.abs(
        geom.Dalpha - geom.Dalpha.transpose(0, 2, 1, 3, 4))))


@dataclass(frozen=True)
class MeanCurvatureData:
    eta: np.ndarray            # (G, n)
    A_eta: np.ndarray          # (G, d, d)
    kappa: float
    off_identity: float        # sup |A_eta - kappa I|
    center: Optional[np.ndarray]       # (n,) when spherical
    center_spread: float       # grid constancy of f + eta/kappa
    radius: Optional[float]
    radius_spread: float
    spherical: bool


def mean_curvature_and_sphere_reduction(geom: GeometryData,
                                        tol: float = 1e-6
                                        ) -> MeanCurvatureData:
    """eta = (1/2m) trace_g alpha; if the shape operator A_eta is a
    multiple kappa of the identity, the point m = f + eta/kappa is a
    common sphere center and |f - m| the radius."""
    d = geom.jet.chart_dim
    eta = np.einsum("gij,gijx->gx", geom.ginv, geom.alpha) / d
    M = np.einsum("gijx,gx->gij", geom.alpha, eta)
    A_eta = np.einsum("gik,gkj->gij", geom.ginv, M)
    kappa = float(np.mean(np.trace(A_eta, axis1=1, axis2=2)) / d)
    off = float(np.max(np.abs(A_eta - kappa * np.eye(d))))
    spherical = off < tol and abs(kappa) > tol
    if spherical:
        centers = geom.jet.value + eta / kappa
        center = centers.mean(axis=0)
        center_spread = float(np.max(np.abs(centers - center)))
        radii = np.linalg.norm(geom.jet.value - center, axis=1)
        radius = float(radii.mean())
        radius_spread = float(np.max(np.abs(radii - radius)))
    else:
        center, center_spread = None, np.inf
        radius, radius_spread = None, np.inf
    return MeanCurvatureData(eta=eta, A_eta=A_eta, kappa=kappa,
                             off_identity=off, center=center,
                             center_spread=center_spread, radius=radius,
                             radius_spread=radius_spread,
                             spherical=spherical)


# --------------------------------------------- complex-bilinear evaluation

def alpha_complex(geom: GeometryData, x: np.ndarray, y: np.ndarray
                  ) -> np.ndarray:
    """Complex-bilinear extension alpha(x, y) for chart vectors (d,)."""
    return np.einsum("i,j,gijx->gx", np.asarray(x, complex),
                     np.asarray(y, complex), geom.alpha.astype(complex))


def alpha_part(geom: GeometryData, x, y, part: str) -> np.ndarray:
    """(p,q)-part of alpha on (possibly complex) chart vectors.

    part in {"20", "11", "02"}; the (1,1)-part is
    alpha(pi'x, pi''y) + alpha(pi''x, pi'y).
    """
    J = geom.imm.J.astype(complex)
    x = np.asarray(x, complex)
    y = np.asarray(y, complex)
    xp, xq = 0.5 * (x - 1j * (J @ x)), 0.5 * (x + 1j * (J @ x))
    yp, yq = 0.5 * (y - 1j * (J @ y)), 0.5 * (y + 1j * (J @ y))
    if part == "20":
        return alpha_complex(geom, xp, yp)
    if part == "02":
        return alpha_complex(geom, xq, yq)
    if part == "11":
        return (alpha_complex(geom, xp, yq)
                + alpha_complex(geom, xq, yp))
    raise ValueError(f"unknown part {part!r}")


def cross_term_identity_residual(geom: GeometryData, x1, x2) -> float:
    """| |alpha^{(1,1)}(x1,x2)| - |alpha^{(2,0)}(x1,x2)| | pointwise sup
    for tangent vectors from different product factors."""
    n11 = np.linalg.norm(alpha_part(geom, x1, x2, "11"), axis=-1)
    n20 = np.linalg.norm(alpha_part(geom, x1, x2, "20"), axis=-1)
    return float(np.max(np.abs(n11 - n20)))


def conjugate_cross_residual(geom: GeometryData, y1, y2) -> float:
    """| |alpha(y1, conj(y2))| - |alpha(y1, y2)| | for complexified
    cross-factor tangent pairs."""
    na = np.linalg.norm(alpha_complex(geom, y1, np.conj(y2)), axis=-1)
    nb = np.linalg.norm(alpha_complex(geom, y1, y2), axis=-1)
    return float(np.max(np.abs(na - nb)))
