"""Canonical elements of unitary and orthogonal Lie algebras, their
ad-eigenspace gradings, the C1/C2 conditions, Cartan splits,
superhorizontal spaces, and the splitting algorithm for a pair of
orthogonal complex structures.

The complexified algebras are represented concretely: gl(n, C) for the
unitary case and complex skew-symmetric matrices for the orthogonal
case, with Hilbert-Schmidt orthonormal bases per grading level.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

UNITARY = "unitary"
ORTHOGONAL = "orthogonal"

_EIG_TOL = 1e-8     # eigenvalue clustering
_RANK_TOL = 1e-9    # singular-value rank threshold


# ------------------------------------------------------ canonical elements

@dataclass(frozen=True)
class CanonicalElement:
    tag: str
    n: int
    xi: np.ndarray                 # (n, n) complex; -i xi is Hermitian
    levels: Tuple[float, ...]      # eigenvalues of -i xi, ascending
    frames: Tuple[np.ndarray, ...]  # orthonormal row stacks per level
    lambda0: float = 0.0

    def frame_of(self, level: float) -> np.ndarray:
        for lv, fr in zip(self.levels, self.frames):
            if abs(lv - level) < _EIG_TOL:
                return fr
        raise KeyError(f"no eigenvalue level {level}")

    @property
    def algebra_dim(self) -> int:
        return self.n * self.n if self.tag == UNITARY \
            else self.n * (self.n - 1) // 2


def _check_orthonormal(frames, n, tol=1e-10):
    stack = np.concatenate([f for f in frames if f.shape[0]], axis=0)
    gram = stack @ stack.conj().T
    if stack.shape[0] > n or \
            np.max(np.abs(gram - np.eye(stack.shape[0]))) > tol:
        raise ValueError("frames are not jointly orthonormal")
    return stack


def canonical_unitary(dims, lambda0: float = 0.0,
                      frames=None) -> CanonicalElement:
    """xi = i (lambda0 I + sum_j j E_j) for an orthogonal decomposition
    C^n = E_1 + ... + E_k with the given dimensions."""
    dims = [int(d) for d in dims]
    if any(d <= 0 for d in dims):
        raise ValueError("subspace dimensions must be positive")
    n = sum(dims)
    if frames is None:
        eye = np.eye(n, dtype=complex)
        frames, pos = [], 0
        for d_ in dims:
            frames.append(eye[pos:pos + d_])
            pos += d_
    frames = [np.asarray(f, dtype=complex) for f in frames]
    if [f.shape[0] for f in frames] != dims:
        raise ValueError("frame sizes do not match dims")
    _check_orthonormal(frames, n)
    xi = np.zeros((n, n), dtype=complex)
    for j, fr in enumerate(frames, start=1):
        xi += 1j * (lambda0 + j) * (fr.T @ fr.conj())
    # complete the projector sum: lambda0 * (I - sum P_j) would break
    # the decomposition; dims must sum to n, checked above
    levels = tuple(float(lambda0 + j) for j in range(1, len(dims) + 1))
    return CanonicalElement(tag=UNITARY, n=n, xi=xi, levels=levels,
                            frames=tuple(frames), lambda0=float(lambda0))


def canonical_orthogonal(pos_frames: Dict[float, np.ndarray], n: int,
                         real_frame: Optional[np.ndarray] = None
                         ) -> CanonicalElement:
    """xi = i sum_j j E_j with E_{-j} = conj(E_j) and a real E_0.

    pos_frames maps a positive level j (integer or half-integer) to an
    orthonormal row stack of isotropic vectors; xi comes out real skew.
    """
    levels, frames = [], []
    for j in sorted(pos_frames):
        if j <= 0:
            raise ValueError("pos_frames keys must be positive")
        fr = np.asarray(pos_frames[j], dtype=complex)
        levels += [float(j), -float(j)]
        frames += [fr, fr.conj()]
    if real_frame is not None and np.size(real_frame):
        fr0 = np.asarray(real_frame, dtype=complex)
        if np.max(np.abs(fr0.imag)) > 1e-12:
            raise ValueError("E_0 frame must be real")
        levels.append(0.0)
        frames.append(fr0)
    order = np.argsort(levels)
    levels = [levels[i] for i in order]
    frames = [frames[i] for i in order]
    stack = _check_orthonormal(frames, n)
    if stack.shape[0] != n:
        raise ValueError(f"frames span dim {stack.shape[0]} != n = {n}")
    xi = np.zeros((n, n), dtype=complex)
    for lv, fr in zip(levels, frames):
        xi += 1j * lv * (fr.T @ fr.conj())
    if np.max(np.abs(xi.imag)) > 1e-12:
        raise ValueError("xi is not real; check E_{-j} = conj(E_j) and "
                         "the isotropy of the positive frames")
    if np.max(np.abs(xi + xi.T)) > 1e-12:
        raise ValueError("xi is not skew")
    xi = xi.real.astype(complex)
    return CanonicalElement(tag=ORTHOGONAL, n=n, xi=xi,
                            levels=tuple(levels), frames=tuple(frames))


def standard_isotropic_frame(n: int, pairs) -> np.ndarray:
    """Rows (e_{2k-1} - i e_{2k}) / sqrt(2) for the requested pair
    indices (0-based pair index k uses coordinates 2k, 2k+1)."""
    rows = []
    for k in pairs:
        b = np.zeros(n, dtype=complex)
        b[2 * k] = 1 / np.sqrt(2)
        b[2 * k + 1] = -1j / np.sqrt(2)
        rows.append(b)
    return np.array(rows) if rows else np.zeros((0, n), dtype=complex)


# ---------------------------------------------------------------- grading

def _orthonormalize_stack(mats: np.ndarray, rank_tol: float = _RANK_TOL):
    """HS-orthonormal basis of the span of a stack (K, n, n)."""
    K = mats.shape[0]
    if K == 0:
        return mats
    n = mats.shape[1]
    flat = mats.reshape(K, n * n)
    _, s, vh = np.linalg.svd(flat, full_matrices=False)
    r = int(np.sum(s > rank_tol * s[0])) if s.size and s[0] > 0 else 0
    return vh[:r].reshape(r, n, n)


@dataclass
class Grading:
    elem: CanonicalElement
    spaces: Dict[float, np.ndarray]   # gap -> HS-orthonormal (d, n, n)
    c1_pass: bool
    c1_deviation: float               # max distance of a gap to Z
    a3_residual: float

    @property
    def height(self) -> float:
        return max(abs(k) for k in self.spaces)

    def dims(self) -> Dict[float, int]:
        return {k: v.shape[0] for k, v in sorted(self.spaces.items())}

    def space(self, k: float) -> np.ndarray:
        for key, v in self.spaces.items():
            if abs(key - k) < _EIG_TOL:
                return v
        n = self.elem.n
        return np.zeros((0, n, n), dtype=complex)


def grade(elem: CanonicalElement) -> Grading:
    """Eigenspaces of (1/i) ad(xi) on the complexified algebra, built
    from the eigenflag: Hom(E_j, E_k) sits at gap lambda_k - lambda_j
    (skew-symmetrized in the orthogonal case)."""
    n = elem.n
    xi = elem.xi
    buckets: Dict[float, List[np.ndarray]] = {}
    gaps = []
    for lk, fk in zip(elem.levels, elem.frames):
        for lj, fj in zip(elem.levels, elem.frames):
            gap = lk - lj
            for u in fk:
                for w in fj:
                    if elem.tag == UNITARY:
                        L = np.outer(u, w.conj())
                    else:
                        L = np.outer(u, w.conj()) - np.outer(w.conj(), u)
                        if np.max(np.abs(L)) < 1e-14:
                            continue
                    key = None
                    for k in buckets:
                        if abs(k - gap) < _EIG_TOL:
                            key = k
                            break
                    if key is None:
                        key = gap
                        buckets[key] = []
                        gaps.append(gap)
                    buckets[key].append(L)

    a3 = 0.0
    spaces = {}
    for k, mats in buckets.items():
        stack = _orthonormalize_stack(np.array(mats))
        if stack.shape[0] == 0:
            continue
        ad = np.einsum("xy,dyz->dxz", xi, stack) \
            - np.einsum("dxy,yz->dxz", stack, xi)
        a3 = max(a3, float(np.max(np.abs(ad - 1j * k * stack))))
        spaces[k] = stack

    total = sum(v.shape[0] for v in spaces.values())
    if total != elem.algebra_dim:
        raise ValueError(f"grading dims sum to {total}, expected "
                         f"{elem.algebra_dim}")
    c1_dev = max((abs(k - round(k)) for k in spaces), default=0.0)
    c1 = c1_dev <= 1e-9
    if c1:
        spaces = {float(round(k)): v for k, v in spaces.items()}
    return Grading(elem=elem, spaces=spaces, c1_pass=c1,
                   c1_deviation=float(c1_dev), a3_residual=float(a3))


def _project_onto(stack: np.ndarray, M: np.ndarray) -> np.ndarray:
    if stack.shape[0] == 0:
        return np.zeros_like(M)
    coeff = np.einsum("dxy,xy->d", stack.conj(), M)
    return np.einsum("d,dxy->xy", coeff, stack)


def bracket_grading_residual(grading: Grading) -> float:
    """sup over basis pairs of the component of [g_j, g_k] outside
    g_{j+k} (zero space when j+k is not a grading level)."""
    worst = 0.0
    for j, Sj in grading.spaces.items():
        for k, Sk in grading.spaces.items():
            tgt = grading.space(j + k)
            for A in Sj:
                for B in Sk:
                    C = A @ B - B @ A
                    worst = max(worst, float(np.max(np.abs(
                        C - _project_onto(tgt, C)))))
    return worst


@dataclass(frozen=True)
class C2Report:
    closure_dim: int
    center_dim: int
    algebra_dim: int
    passed: bool


def generation_check(grading: Grading) -> C2Report:
    """Bracket closure of g_1 + g_{-1}.

    Commutators are traceless, so in the unitary case the closure can
    reach at most sl(n); C2 passes when closure plus the center of the
    algebra fills the whole complexified algebra.
    """
    elem = grading.elem
    n = elem.n
    parts = [grading.space(1.0), grading.space(-1.0)]
    V = np.concatenate([p for p in parts if p.shape[0]], axis=0) \
        if any(p.shape[0] for p in parts) \
        else np.zeros((0, n, n), dtype=complex)
    V = _orthonormalize_stack(V)
    dim = V.shape[0]
    for _ in range(elem.algebra_dim ** 2):
        if dim == 0:
            break
        brackets = (np.einsum("axy,byz->abxz", V, V)
                    - np.einsum("bxy,ayz->abxz", V, V)
                    ).reshape(-1, n, n)
        V = _orthonormalize_stack(np.concatenate([V, brackets], axis=0))
        if V.shape[0] == dim:
            break
        dim = V.shape[0]
    closure_dim = dim
    center = []
    if elem.tag == UNITARY:
        center = [np.eye(n, dtype=complex) / np.sqrt(n)]
    full = _orthonormalize_stack(
        np.concatenate([V] + [c[None] for c in center], axis=0)
        if center or dim else np.zeros((0, n, n), dtype=complex))
    return C2Report(closure_dim=closure_dim, center_dim=len(center),
                    algebra_dim=elem.algebra_dim,
                    passed=(full.shape[0] == elem.algebra_dim))


def cartan_split(grading: Grading):
    """(k-part, p-part, residuals of the Cartan relations)."""
    n = grading.elem.n
    evens = [v for k, v in grading.spaces.items() if round(k) % 2 == 0]
    odds = [v for k, v in grading.spaces.items() if round(k) % 2 == 1]
    kc = np.concatenate(evens, axis=0) if evens \
        else np.zeros((0, n, n), dtype=complex)
    pc = np.concatenate(odds, axis=0) if odds \
        else np.zeros((0, n, n), dtype=complex)

    def rel(A_stack, B_stack, target):
        worst = 0.0
        for A in A_stack:
            for B in B_stack:
                C = A @ B - B @ A
                worst = max(worst, float(np.max(np.abs(
                    C - _project_onto(target, C)))))
        return worst

    res = {"[k,k] in k": rel(kc, kc, kc),
           "[k,p] in p": rel(kc, pc, pc),
           "[p,p] in k": rel(pc, pc, kc)}
    return kc, pc, res


def superhorizontal_space(grading: Grading):
    """g_1 (superhorizontal (1,0)-space), the full odd/horizontal part,
    and the positive part T'."""
    n = grading.elem.n
    pos = [v for k, v in grading.spaces.items() if k > _EIG_TOL]
    odd = [v for k, v in grading.spaces.items() if round(k) % 2 == 1]
    return {
        "g1": grading.space(1.0),
        "horizontal": np.concatenate(odd, axis=0) if odd
        else np.zeros((0, n, n), dtype=complex),
        "t_prime": np.concatenate(pos, axis=0) if pos
        else np.zeros((0, n, n), dtype=complex),
    }


def corollary_even_space(elem: CanonicalElement):
    """Appendix-corollary checks on E_even.

    Integer spectrum (case a): E_even must be conjugation-invariant.
    Half-integer spectrum on even n (case b): E_even must be a maximal
    isotropic subspace.  Returns a dict with the case tag, dims and the
    relevant residual.
    """
    lv = np.array(elem.levels)
    integer = np.max(np.abs(lv - np.round(lv))) < 1e-9
    half = np.max(np.abs(lv - np.round(lv) )) > 1e-9 and \
        np.max(np.abs(2 * lv - np.round(2 * lv))) < 1e-9
    base = lv.min()
    cls = np.round(lv - base).astype(int) % 2
    rows = [fr for c, fr in zip(cls, elem.frames) if c == 0]
    E = np.concatenate(rows, axis=0)
    P = E.T @ E.conj()
    out = {"dims": E.shape[0], "n": elem.n}
    if integer:
        out["case"] = "a"
        out["conjugation_residual"] = float(np.max(np.abs(P - P.conj())))
    elif half:
        out["case"] = "b"
        out["isotropy_residual"] = float(np.max(np.abs(E @ E.T)))
        out["maximal"] = (2 * E.shape[0] == elem.n)
    else:
        out["case"] = "none"
    return out


def lift_grading_residual(bun, dP) -> float:
    """Superhorizontality of the flag lift in orbit coordinates: the
    pointwise canonical element is xi(p) = i (P_tau' - P_tau''); its
    chart derivative must have no g_{+-2} components, i.e. no
    tau'<->tau'' blocks."""
    from .gaussmaps import outside_residual
    dxi = 1j * (dP["P_taup"] - dP["P_taupp"])
    up = outside_residual(bun.P_taup, dxi, bun.P_taupp)
    down = outside_residual(bun.P_taupp, dxi, bun.P_taup)
    return max(up, down)


# ------------------------------------- two commuting complex structures

@dataclass
class StructureBlock:
    basis: np.ndarray       # (dim_block, d) orthonormal real rows
    kind: str               # "+J" | "-J" | "quaternionic"
    s: float                # |anticommuting part| on the block
    J1: Optional[np.ndarray] = None
    J2: Optional[np.ndarray] = None
    J3: Optional[np.ndarray] = None


@dataclass
class SplitResult:
    blocks: List[StructureBlock]
    reconstruction_error: float
    identity_residuals: Dict[str, float]
    warnings: List[str] = field(default_factory=list)


def _validate_complex_structure(M, tol=1e-10, name="J"):
    d = M.shape[0]
    if np.max(np.abs(M @ M + np.eye(d))) > tol:
        raise ValueError(f"{name}^2 != -I")
    if np.max(np.abs(M.T @ M - np.eye(d))) > tol:
        raise ValueError(f"{name} is not orthogonal")


def split_two_complex_structures(J: np.ndarray, Jt: np.ndarray,
                                 merge_gap: float = 1e-7) -> SplitResult:
    """Decompose R^d into blocks on which a second orthogonal complex
    structure Jt either equals +-J or forms a quaternionic triple with
    J.

    Uses the J-commuting part L = (Jt - J Jt J)/2 and the
    J-anticommuting part A = (Jt + J Jt J)/2, which satisfy
    L^2 + A^2 = -I and LA + AL = 0; the blocks are eigenspaces of the
    symmetric operator A^2 = -s^2 (s = 0: Jt = +-J; s > 0:
    quaternionic with J2 = A/s).
    """
    J = np.asarray(J, float)
    Jt = np.asarray(Jt, float)
    d = J.shape[0]
    _validate_complex_structure(J, name="J")
    _validate_complex_structure(Jt, name="Jt")
    L = 0.5 * (Jt - J @ Jt @ J)
    A = 0.5 * (Jt + J @ Jt @ J)
    ident = {
        "L^2+A^2+I": float(np.max(np.abs(L @ L + A @ A + np.eye(d)))),
        "LA+AL": float(np.max(np.abs(L @ A + A @ L))),
    }

    ev, V = np.linalg.eigh(A @ A)  # eigenvalues in [-1, 0]
    warnings = []
    clusters = []  # list of (mean eigenvalue, column indices)
    for idx in range(d):
        if clusters and ev[idx] - clusters[-1][1][-1][1] < merge_gap:
            clusters[-1][1].append((idx, ev[idx]))
        else:
            clusters.append((ev[idx], [(idx, ev[idx])]))
    if any(abs(c[1][0][1] - c[1][-1][1]) > 10 * merge_gap
           for c in clusters):
        warnings.append("near-degenerate eigenvalue clusters merged")

    blocks = []
    for mean_ev, members in clusters:
        cols = [i for i, _ in members]
        B = V[:, cols]  # (d, k) orthonormal
        s2 = float(np.clip(-np.mean([e for _, e in members]), 0.0, 1.0))
        s = float(np.sqrt(s2))
        Jb = B.T @ J @ B
        Jtb = B.T @ Jt @ B
        if s < 1e-6:
            # commuting block: K = -J Jt is symmetric with eigenvalues
            # +-1 separating Jt = +J from Jt = -J
            K = -Jb @ Jtb
            evk, Vk = np.linalg.eigh(K)
            for sign, kind in ((1.0, "+J"), (-1.0, "-J")):
                sel = np.abs(evk - sign) < 0.5
                if not np.any(sel):
                    continue
                Bs = B @ Vk[:, sel]
                blocks.append(StructureBlock(basis=Bs.T, kind=kind, s=0.0))
        else:
            Ab = B.T @ A @ B
            J2 = Ab / s
            J3 = Jb @ J2
            blocks.append(StructureBlock(basis=B.T, kind="quaternionic",
                                         s=s, J1=Jb, J2=J2, J3=J3))

    recon = np.zeros((d, d))
    for b in blocks:
        P = b.basis.T @ b.basis
        recon += P @ Jt @ P
    err = float(np.max(np.abs(recon - Jt)))
    return SplitResult(blocks=blocks, reconstruction_error=err,
                       identity_residuals=ident, warnings=warnings)
