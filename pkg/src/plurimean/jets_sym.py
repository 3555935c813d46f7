"""Closed-form jet factories.

Fixture charts are written as sympy expressions once, differentiated
symbolically to order 3 at import time, and lambdified into vectorized
numpy evaluators.  Charts that involve a special function known only by
its Taylor coefficients (the spheroid's conformal latitude) declare it
as an AuxSeries; its derivatives are threaded through the chain rule as
extra lambdify arguments and evaluated from the polynomial.
"""

from dataclasses import dataclass

import numpy as np
import sympy as sp
from numpy.polynomial import polynomial as npoly

from .chartcalc import Jet3

_MAX_ORDER = 3


@dataclass(frozen=True)
class AuxSeries:
    """Scalar function of one chart coordinate given by Taylor coefficients."""

    name: str
    arg_index: int  # which chart coordinate it depends on
    coeffs: tuple  # polynomial coefficients, index = power


def _broadcast(val, G):
    arr = np.asarray(val, dtype=float)
    if arr.ndim == 0:
        return np.full(G, float(arr))
    return arr


def build_jet_fn(coords, exprs, aux=()):
    """Compile chart expressions into a vectorized Jet3 evaluator.

    coords: sympy symbols in chart order (x1, y1, ..., xm, ym).
    exprs: ambient component expressions; may reference each AuxSeries
    through sp.Function(a.name)(coords[a.arg_index]).
    """
    coords = list(coords)
    d = len(coords)
    n = len(exprs)
    exprs = [sp.sympify(e) for e in exprs]

    # symbols standing in for aux function values/derivatives at the point
    aux_syms = {}   # (name, order) -> Symbol
    aux_subs = []   # (Derivative/Function expr, Symbol), high order first
    for a in aux:
        u = coords[a.arg_index]
        fu = sp.Function(a.name)(u)
        for order in range(_MAX_ORDER, 0, -1):
            s = sp.Symbol(f"_{a.name}{order}")
            aux_syms[(a.name, order)] = s
            aux_subs.append((sp.Derivative(fu, (u, order)), s))
        s0 = sp.Symbol(f"_{a.name}0")
        aux_syms[(a.name, 0)] = s0
        aux_subs.append((fu, s0))

    def finalize(e):
        e = sp.expand(e.doit())
        for old, new in aux_subs:
            e = e.subs(old, new)
        return e

    # nested derivative tables (upper-triangular in the indices; the
    # evaluator fills the symmetric entries)
    d1_t = [[finalize(sp.diff(e, coords[i])) for e in exprs]
            for i in range(d)]
    d2_t = [[[finalize(sp.diff(e, coords[i], coords[j])) for e in exprs]
             for j in range(i, d)] for i in range(d)]
    d3_t = [[[[finalize(sp.diff(e, coords[i], coords[j], coords[k]))
               for e in exprs]
              for k in range(j, d)] for j in range(i, d)] for i in range(d)]
    val_t = [finalize(e) for e in exprs]

    args = coords + [aux_syms[(a.name, o)]
                     for a in aux for o in range(_MAX_ORDER + 1)]
    f_val = sp.lambdify(args, val_t, "numpy")
    f_d1 = sp.lambdify(args, d1_t, "numpy")
    f_d2 = sp.lambdify(args, d2_t, "numpy")
    f_d3 = sp.lambdify(args, d3_t, "numpy")

    # derivative coefficient arrays for each aux polynomial
    aux_polys = []
    for a in aux:
        c = np.asarray(a.coeffs, dtype=float)
        derivs = [c]
        for _ in range(_MAX_ORDER):
            derivs.append(npoly.polyder(derivs[-1]))
        aux_polys.append((a.arg_index, derivs))

    def jet_fn(pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        G = pts.shape[0]
        argvals = [pts[:, i] for i in range(d)]
        for arg_index, derivs in aux_polys:
            u = pts[:, arg_index]
            for c in derivs:
                argvals.append(npoly.polyval(u, c))

        value = np.stack([_broadcast(v, G)
                          for v in f_val(*argvals)], axis=-1)
        raw1 = f_d1(*argvals)
        d1 = np.stack([np.stack([_broadcast(c, G) for c in row], axis=-1)
                       for row in raw1], axis=1)
        raw2 = f_d2(*argvals)
        d2 = np.empty((G, d, d, n))
        for i in range(d):
            for j in range(i, d):
                block = np.stack([_broadcast(c, G)
                                  for c in raw2[i][j - i]], axis=-1)
                d2[:, i, j] = block
                d2[:, j, i] = block
        raw3 = f_d3(*argvals)
        d3 = np.empty((G, d, d, d, n))
        for i in range(d):
            for j in range(i, d):
                for k in range(j, d):
                    block = np.stack([_broadcast(c, G)
                                      for c in raw3[i][j - i][k - j]],
                                     axis=-1)
                    for perm in ((i, j, k), (i, k, j), (j, i, k),
                                 (j, k, i), (k, i, j), (k, j, i)):
                        d3[:, perm[0], perm[1], perm[2]] = block
        return Jet3(value=value, d1=d1, d2=d2, d3=d3)

    return jet_fn


def build_eval_fn(coords, exprs, aux=()):
    """Value-only evaluator (the finite-difference oracle's target)."""
    coords = list(coords)
    d = len(coords)
    exprs = [sp.sympify(e) for e in exprs]

    aux_subs = []
    aux_list = []
    for a in aux:
        u = coords[a.arg_index]
        fu = sp.Function(a.name)(u)
        s0 = sp.Symbol(f"_{a.name}0")
        aux_subs.append((fu, s0))
        aux_list.append((a.arg_index, np.asarray(a.coeffs, dtype=float), s0))

    val_t = []
    for e in exprs:
        for old, new in aux_subs:
            e = e.subs(old, new)
        val_t.append(e)
    args = coords + [s for (_, _, s) in aux_list]
    f_val = sp.lambdify(args, val_t, "numpy")

    def eval_fn(pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        G = pts.shape[0]
        argvals = [pts[:, i] for i in range(d)]
        for arg_index, c, _ in aux_list:
            argvals.append(npoly.polyval(pts[:, arg_index], c))
        return np.stack([_broadcast(v, G)
                         for v in f_val(*argvals)], axis=-1)

    return eval_fn
