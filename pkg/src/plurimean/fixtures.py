"""Fixture zoo: explicit charted immersions with known verification flags.

Each fixture ships closed-form jets to order 3 (generated symbolically at
first use) and a ledger of expected classification flags; reproducing the
ledger is the master regression property of the whole toolkit.
"""

import functools
from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from .chartcalc import ChartedImmersion
from .jets_sym import AuxSeries, build_eval_fn, build_jet_fn

FLAG_NAMES = ("kaehler", "ppmc", "pluriminimal", "half_isotropic",
              "isotropic", "spherical")

# Taylor coefficients (index = power of u) of the conformal latitude t(u)
# of the spheroid with semi-axes (1, 1, 1.45): the solution of
# t'(u) = sin t / sqrt(1 + (1.45^2 - 1) sin^2 t), t(0) = pi/2.  With this
# reparametrization the chart (u, v) -> (sin t cos v, sin t sin v,
# 1.45 cos t) is conformal (max |E - G| = 5.6e-16 on |u| <= 0.42).
_SPHEROID_T_COEFFS = (
    1.5707963267948966, 0.6896551724137931, 0.0, -2.60021188e-02,
    0.0, -1.12349229e-03, 0.0, 1.58460381e-04,
    0.0, 1.85044564e-05, 0.0, -2.24805921e-06,
    0.0, -4.09152716e-07, 0.0, 4.08678650e-08,
    0.0, 1.03760495e-08, 0.0, -8.18986367e-10,
    0.0, -2.84153674e-10, 0.0, 1.67649975e-11,
    0.0, 8.16119255e-12, 0.0, -3.26054565e-13,
    0.0, -2.41838947e-13, 0.0, 5.20485433e-15,
    0.0, 7.31935359e-15, 0.0, -2.50196980e-17,
    0.0, -2.24723598e-16, 0.0, -3.29431267e-18, 0.0,
)

_SPHEROID_C = 1.45


@dataclass(frozen=True)
class FixtureRecord:
    """A charted immersion plus its expected classification flags."""

    name: str
    immersion: ChartedImmersion
    flags: dict
    grid_per_axis: int = 9
    notes: str = ""


def _stereo_sphere(u, v):
    """Stereographic chart of the unit sphere (south pole at the origin)."""
    w = 1 + u**2 + v**2
    return [2 * u / w, 2 * v / w, (u**2 + v**2 - 1) / w]


def _formula_catalog():
    """name -> (m, exprs, aux, default domain) in chart symbols."""
    u, v = sp.symbols("u v")
    u1, v1, u2, v2 = sp.symbols("u1 v1 u2 v2")
    cat = {}

    cat["plane"] = (1, [u, v, sp.Integer(0)], (), [(-1, 1), (-1, 1)])
    cat["skewed-plane"] = (1, [u + v / 2, v, sp.Integer(0)], (),
                           [(-1, 1), (-1, 1)])
    cat["sphere"] = (1, _stereo_sphere(u, v), (),
                     [(-0.8, 0.8), (-0.8, 0.8)])
    cat["cylinder"] = (1, [sp.cos(v), sp.sin(v), u], (),
                       [(-1, 1), (-1, 1)])
    cat["catenoid"] = (1, [sp.cosh(u) * sp.cos(v), sp.cosh(u) * sp.sin(v), u],
                       (), [(-0.8, 0.8), (-0.8, 0.8)])
    cat["helicoid"] = (1, [sp.sinh(u) * sp.cos(v), sp.sinh(u) * sp.sin(v), v],
                       (), [(-0.8, 0.8), (-0.8, 0.8)])
    cat["holomorphic-curve"] = (1, [u, v, u**2 - v**2, 2 * u * v], (),
                                [(-0.7, 0.7), (-0.7, 0.7)])

    # spheroid with semi-axes (1, 1, 1.45) in a conformal chart; the
    # conformal latitude enters through its frozen Taylor polynomial
    t = sp.Function("t")(u)
    cat["ellipsoid"] = (
        1,
        [sp.sin(t) * sp.cos(v), sp.sin(t) * sp.sin(v),
         _SPHEROID_C * sp.cos(t)],
        (AuxSeries("t", 0, _SPHEROID_T_COEFFS),),
        [(-0.35, 0.35), (-0.7, 0.7)])

    s1 = _stereo_sphere(u1, v1)
    s2 = _stereo_sphere(u2, v2)
    cat["product-spheres"] = (2, s1 + s2, (),
                              [(-0.6, 0.6)] * 4)

    # Veronese: unit-sphere point S maps to the rank-one projector S S^T,
    # written in coordinates making the Frobenius metric Euclidean
    S = _stereo_sphere(u, v)
    r2 = sp.sqrt(2)
    cat["veronese"] = (
        1,
        [S[0]**2, S[1]**2, S[2]**2,
         r2 * S[0] * S[1], r2 * S[0] * S[2], r2 * S[1] * S[2]],
        (), [(-0.7, 0.7), (-0.7, 0.7)])

    # standard embedding p -> J_p of the sphere into the rotation algebra
    # (Frobenius norm sqrt(2) per unit vector)
    cat["standard-embedding"] = (1, [r2 * e for e in S], (),
                                 [(-0.7, 0.7), (-0.7, 0.7)])
    return cat


_FLAGS = {
    "plane": dict(kaehler=True, ppmc=True, pluriminimal=True,
                  half_isotropic=True, isotropic=True, spherical=False),
    "skewed-plane": dict(kaehler=False, ppmc=None, pluriminimal=None,
                         half_isotropic=None, isotropic=None, spherical=None),
    "sphere": dict(kaehler=True, ppmc=True, pluriminimal=False,
                   half_isotropic=True, isotropic=True, spherical=True),
    "ellipsoid": dict(kaehler=True, ppmc=False, pluriminimal=False,
                      half_isotropic=False, isotropic=False, spherical=False),
    "cylinder": dict(kaehler=True, ppmc=True, pluriminimal=False,
                     half_isotropic=False, isotropic=False, spherical=False),
    "catenoid": dict(kaehler=True, ppmc=True, pluriminimal=True,
                     half_isotropic=True, isotropic=False, spherical=False),
    "helicoid": dict(kaehler=True, ppmc=True, pluriminimal=True,
                     half_isotropic=True, isotropic=False, spherical=False),
    "holomorphic-curve": dict(kaehler=True, ppmc=True, pluriminimal=True,
                              half_isotropic=True, isotropic=True,
                              spherical=False),
    "product-spheres": dict(kaehler=True, ppmc=True, pluriminimal=False,
                            half_isotropic=True, isotropic=True,
                            spherical=True),
    "veronese": dict(kaehler=True, ppmc=True, pluriminimal=False,
                     half_isotropic=True, isotropic=True, spherical=True),
    "standard-embedding": dict(kaehler=True, ppmc=True, pluriminimal=False,
                               half_isotropic=True, isotropic=True,
                               spherical=True),
}

_NOTES = {
    "plane": "totally geodesic; every flag trivially passes",
    "skewed-plane": "non-conformal chart of the plane; fails the Kaehler "
                    "orthogonality residual (negative control)",
    "sphere": "alpha = -<.,.> f; J-invariant second fundamental form",
    "ellipsoid": "spheroid (1,1,1.45) in a conformal chart; generic "
                 "non-parallel surface (negative control)",
    "cylinder": "parallel mean curvature but alpha(T',T') lands in the "
                "span of the pluri-mean values",
    "catenoid": "minimal; conjugate partner of the helicoid at theta=pi/2",
    "helicoid": "minimal; conjugate partner of the catenoid",
    "holomorphic-curve": "z -> (z, z^2) in C^2 = R^4; pluriminimal",
    "product-spheres": "product of round spheres in R^6; m = 2",
    "veronese": "S S^T in the affine space {trace = 1} of symmetric "
                "3x3 matrices; extrinsic symmetric",
    "standard-embedding": "sqrt(2) times the unit sphere: the rotation "
                          "algebra picture of p -> J_p",
}

_GRID = {"product-spheres": 5}


@functools.lru_cache(maxsize=None)
def _build_immersion(name, domain_key=None):
    cat = _formula_catalog()
    if name not in cat:
        raise KeyError(f"unknown chart formula {name!r}")
    m, exprs, aux, default_domain = cat[name]
    domain = list(domain_key) if domain_key is not None else default_domain
    if m == 1:
        coords = sp.symbols("u v")
    else:
        coords = sp.symbols(" ".join(f"u{k+1} v{k+1}" for k in range(m)))
    return ChartedImmersion(
        name=name,
        ambient_dim=len(exprs),
        complex_dim=m,
        domain=np.asarray(domain, dtype=float),
        eval_fn=build_eval_fn(coords, exprs, aux),
        jet_fn=build_jet_fn(coords, exprs, aux),
    )


def get_immersion(name: str, domain=None) -> ChartedImmersion:
    key = None
    if domain is not None:
        key = tuple(tuple(float(x) for x in row) for row in domain)
    return _build_immersion(name, key)


def get_fixture(name: str) -> FixtureRecord:
    if name not in _FLAGS:
        raise KeyError(f"unknown fixture {name!r}")
    return FixtureRecord(
        name=name,
        immersion=get_immersion(name),
        flags=dict(_FLAGS[name]),
        grid_per_axis=_GRID.get(name, 9),
        notes=_NOTES[name],
    )


def registry(include_controls: bool = True):
    """All fixtures in deterministic order."""
    names = [n for n in _FLAGS
             if include_controls or _FLAGS[n]["kaehler"]]
    return [get_fixture(n) for n in names]


def fixture_names():
    return list(_FLAGS)


def load_fixture_file(path) -> FixtureRecord:
    """Parse a structured-text fixture definition.

    Recognized keys (one `key: value` pair per line, '#' comments):
    name, formula, n, m, domain (2m pairs of floats), jets, grid.
    The formula must name a chart from the built-in catalog; n and m, if
    given, are validated against it; domain overrides the default box.
    """
    text = open(path).read()
    kv = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise ValueError(f"malformed fixture line: {raw!r}")
        k, val = line.split(":", 1)
        kv[k.strip().lower()] = val.strip()

    formula = kv.get("formula", kv.get("name"))
    if formula is None:
        raise ValueError("fixture file needs a 'formula' or 'name' key")
    domain = None
    if "domain" in kv:
        vals = [float(x) for x in kv["domain"].replace(",", " ").split()]
        if len(vals) % 2:
            raise ValueError("domain needs an even number of floats")
        domain = [vals[i:i + 2] for i in range(0, len(vals), 2)]
    imm = get_immersion(formula, domain)
    if "n" in kv and int(kv["n"]) != imm.ambient_dim:
        raise ValueError(f"ambient dim mismatch: file says {kv['n']}, "
                         f"formula has {imm.ambient_dim}")
    if "m" in kv and int(kv["m"]) != imm.complex_dim:
        raise ValueError(f"complex dim mismatch: file says {kv['m']}, "
                         f"formula has {imm.complex_dim}")
    if kv.get("jets", "analytic") not in ("analytic", "fd"):
        raise ValueError("jets must be 'analytic' or 'fd'")
    if kv.get("jets") == "fd":
        imm = ChartedImmersion(name=imm.name, ambient_dim=imm.ambient_dim,
                               complex_dim=imm.complex_dim, domain=imm.domain,
                               eval_fn=imm.eval_fn, jet_fn=None)
    name = kv.get("name", formula)
    flags = dict(_FLAGS.get(formula, {f: None for f in FLAG_NAMES}))
    return FixtureRecord(name=name, immersion=imm, flags=flags,
                         grid_per_axis=int(kv.get("grid", 9)),
                         notes=f"loaded from {path}")
