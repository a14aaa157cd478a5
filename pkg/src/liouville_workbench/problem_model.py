"""Problem instances and the two primitive integrals psi0 and G.

The initial periodic-boundary value problem

    d^2/(dalpha dt) ln u = f(alpha) u,    alpha in (0,1), t > 0,
    u(alpha, 0) = u0(alpha),              u(0, t) = u(1, t) = g(t),

is determined by the data triple (f, u0, g).  Everything downstream of this
module is built from two primitives:

    psi0(alpha) = integral_0^alpha f(z) u0(z) dz
    G(t)        = integral_0^t    g(s) ds,      G(0) = 0.

Data functions are represented by a small closed-form catalog plus linearly
interpolated tables.  The catalog covers the standard worked examples exactly
(polynomial data, the singular boundary family (1-t)^-(1+beta), exponential
decay) while tables admit arbitrary sampled data.

Quadrature is composite Simpson on uniform grids, replaced by the exact
antiderivative whenever the integrand is polynomial.  Both choices keep the
defining normalizations psi0(0) = 0 and G(0) = 0 exact.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.integrate import cumulative_simpson, simpson

from .errors import NoFiniteTime

# Numerical guards.  The underlying theory gives none of these; values are
# chosen so that double precision never masquerades as a feature.
COMPAT_RTOL = 1e-8        # compatibility defect, relative to max |f u0|
ZERO_SET_RTOL = 1e-6      # zero set of psi0, relative to max |psi0|
FEATURE_ATOL = 1e-9       # argmax membership after parabolic refinement
INVERT_RTOL = 1e-12       # |G(t) - target| <= INVERT_RTOL * (1 + target)

_KINDS = ("constant", "polynomial", "trigonometric", "singular_boundary",
          "table", "exponential")


# ---------------------------------------------------------------------------
# grid functions


@dataclass(frozen=True)
class GridFunction:
    """Sampled function with linear interpolation between strictly increasing nodes.

    Evaluation at a node returns the stored value exactly.
    """

    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if nodes.ndim != 1 or nodes.shape != values.shape:
            raise ValueError("nodes and values must be 1-d arrays of equal length")
        if nodes.size < 2:
            raise ValueError("a grid function needs at least two nodes")
        if not np.all(np.diff(nodes) > 0):
            raise ValueError("nodes must be strictly increasing")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)

    def __call__(self, x):
        return np.interp(x, self.nodes, self.values)

    def to_csv(self, path, header=("node", "value")):
        with open(path, "w") as fh:
            fh.write(",".join(header) + "\n")
            for n, v in zip(self.nodes, self.values):
                fh.write(f"{n:.12e},{v:.12e}\n")


# ---------------------------------------------------------------------------
# function descriptors


@dataclass(frozen=True)
class FunctionDescriptor:
    """One entry of the data catalog: a kind tag plus kind-specific parameters.

    Kinds and parameters:
      constant           {"value": v}
      polynomial         {"coeffs": [c0, c1, ...]}            ascending degree
      trigonometric      {"offset": a0, "terms": [[A, k, phase], ...]}
                         evaluating a0 + sum A*sin(2*pi*k*x + phase)
      singular_boundary  {"beta": b > 0, "t_b": tb > 0}
                         the blow-up family (1 - t/tb)^-(1+b), finite on [0, tb)
      table              {"nodes": [...], "values": [...]}    linear interpolation
      exponential        {"amplitude": A, "rate": r}          A*exp(r*x)
    """

    kind: str
    params: dict

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown descriptor kind {self.kind!r}; expected one of {_KINDS}")
        p = dict(self.params)
        if self.kind == "constant":
            p["value"] = float(p["value"])
        elif self.kind == "polynomial":
            coeffs = [float(c) for c in p["coeffs"]]
            if not coeffs:
                raise ValueError("polynomial needs at least one coefficient")
            p["coeffs"] = tuple(coeffs)
        elif self.kind == "trigonometric":
            terms = tuple(
                (float(t[0]), float(t[1]), float(t[2]) if len(t) > 2 else 0.0)
                for t in p["terms"]
            )
            if not terms:
                raise ValueError("trigonometric needs at least one term")
            p["terms"] = terms
            p["offset"] = float(p.get("offset", 0.0))
        elif self.kind == "singular_boundary":
            p["beta"] = float(p["beta"])
            p["t_b"] = float(p.get("t_b", 1.0))
            if p["beta"] <= 0:
                raise ValueError("singular_boundary exponent beta must be positive")
            if p["t_b"] <= 0:
                raise ValueError("singular_boundary blow-up time t_b must be positive")
        elif self.kind == "table":
            nodes = np.asarray(p["nodes"], dtype=float)
            values = np.asarray(p["values"], dtype=float)
            if nodes.shape != values.shape or nodes.ndim != 1:
                raise ValueError("table nodes/values must be equal-length 1-d sequences")
            if not np.all(np.diff(nodes) > 0):
                raise ValueError("table nodes must be strictly increasing")
            p["nodes"] = tuple(nodes.tolist())
            p["values"] = tuple(values.tolist())
        elif self.kind == "exponential":
            p["amplitude"] = float(p["amplitude"])
            p["rate"] = float(p["rate"])
        object.__setattr__(self, "params", p)

    # evaluation -----------------------------------------------------------

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.kind == "constant":
            out = np.full_like(x, p["value"])
        elif self.kind == "polynomial":
            out = npoly.polyval(x, p["coeffs"])
        elif self.kind == "trigonometric":
            out = np.full_like(x, p["offset"])
            for amp, freq, phase in p["terms"]:
                out = out + amp * np.sin(2.0 * np.pi * freq * x + phase)
        elif self.kind == "singular_boundary":
            beta, tb = p["beta"], p["t_b"]
            if np.any(x >= tb):
                raise ValueError(
                    f"singular_boundary data is finite only on [0, t_b={tb}); "
                    f"got t up to {float(np.max(x))}"
                )
            out = (1.0 - x / tb) ** (-(1.0 + beta))
        elif self.kind == "table":
            nodes = np.asarray(p["nodes"])
            if np.any(x < nodes[0] - 1e-12) or np.any(x > nodes[-1] + 1e-12):
                raise ValueError("evaluation outside the table's declared domain")
            out = np.interp(x, nodes, np.asarray(p["values"]))
        else:  # exponential
            out = p["amplitude"] * np.exp(p["rate"] * x)
        if not np.all(np.isfinite(out)):
            raise ValueError(f"{self.kind} descriptor produced non-finite samples")
        return out if out.ndim else float(out)

    def derivative(self, x):
        """Pointwise derivative (piecewise slope for tables)."""
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.kind == "constant":
            out = np.zeros_like(x)
        elif self.kind == "polynomial":
            out = npoly.polyval(x, npoly.polyder(p["coeffs"]))
        elif self.kind == "trigonometric":
            out = np.zeros_like(x)
            for amp, freq, phase in p["terms"]:
                w = 2.0 * np.pi * freq
                out = out + amp * w * np.cos(w * x + phase)
        elif self.kind == "singular_boundary":
            beta, tb = p["beta"], p["t_b"]
            out = (1.0 + beta) / tb * (1.0 - x / tb) ** (-(2.0 + beta))
        elif self.kind == "table":
            nodes = np.asarray(p["nodes"])
            values = np.asarray(p["values"])
            slopes = np.diff(values) / np.diff(nodes)
            idx = np.clip(np.searchsorted(nodes, x, side="right") - 1, 0, len(slopes) - 1)
            out = slopes[idx]
        else:  # exponential
            out = p["amplitude"] * p["rate"] * np.exp(p["rate"] * x)
        return out if out.ndim else float(out)

    def scaled(self, factor: float) -> "FunctionDescriptor":
        """Return the descriptor multiplied pointwise by a constant."""
        p = dict(self.params)
        if self.kind == "constant":
            p["value"] *= factor
        elif self.kind == "polynomial":
            p["coeffs"] = tuple(c * factor for c in p["coeffs"])
        elif self.kind == "trigonometric":
            p["offset"] *= factor
            p["terms"] = tuple((a * factor, f, ph) for a, f, ph in p["terms"])
        elif self.kind == "singular_boundary":
            raise ValueError("the singular_boundary family is already normalized; cannot rescale")
        elif self.kind == "table":
            p["values"] = tuple(v * factor for v in p["values"])
        else:
            p["amplitude"] *= factor
        return FunctionDescriptor(self.kind, p)

    # polynomial plumbing ----------------------------------------------------

    def is_polynomial(self) -> bool:
        return self.kind in ("constant", "polynomial")

    def poly_coeffs(self):
        if self.kind == "constant":
            return (self.params["value"],)
        if self.kind == "polynomial":
            return self.params["coeffs"]
        raise ValueError(f"{self.kind} descriptor has no polynomial coefficients")

    # serialization ----------------------------------------------------------

    @classmethod
    def from_dict(cls, d: dict) -> "FunctionDescriptor":
        if not isinstance(d, dict) or "kind" not in d:
            raise ValueError("descriptor must be an object with a 'kind' key")
        return cls(d["kind"], d.get("params", {}))

    def to_dict(self) -> dict:
        p = dict(self.params)
        for k, v in p.items():
            if isinstance(v, tuple):
                p[k] = [list(e) if isinstance(e, tuple) else e for e in v]
        return {"kind": self.kind, "params": p}


def constant(value) -> FunctionDescriptor:
    return FunctionDescriptor("constant", {"value": value})


def polynomial(*coeffs) -> FunctionDescriptor:
    return FunctionDescriptor("polynomial", {"coeffs": list(coeffs)})


def singular_boundary(beta, t_b=1.0) -> FunctionDescriptor:
    return FunctionDescriptor("singular_boundary", {"beta": beta, "t_b": t_b})


def exponential(amplitude, rate) -> FunctionDescriptor:
    return FunctionDescriptor("exponential", {"amplitude": amplitude, "rate": rate})


# ---------------------------------------------------------------------------
# problem specification


@dataclass(frozen=True)
class ProblemSpec:
    """The data triple (f, u0, g) plus the alpha-grid resolution.

    The representation formula assumes the normalization u0(0) = 1 and
    g(0) = 1.  Inputs violating it are rescaled on construction with a
    warning; u0 must be positive on [0, 1].
    """

    f: FunctionDescriptor
    u0: FunctionDescriptor
    g: FunctionDescriptor
    n_alpha: int = 513

    def __post_init__(self):
        if self.n_alpha < 32:
            raise ValueError("n_alpha must be at least 32")
        u0, g, f = self.u0, self.g, self.f

        # blow-up time of the singular family is normalized to 1 by rescaling
        # time; the rescaled problem carries t_b * f in place of f
        if g.kind == "singular_boundary" and g.params["t_b"] != 1.0:
            tb = g.params["t_b"]
            warnings.warn(
                f"singular boundary data with t_b={tb} rescaled to t_b=1 "
                "(time unit changes accordingly)",
                stacklevel=2,
            )
            f = f.scaled(tb)
            g = FunctionDescriptor("singular_boundary",
                                   {"beta": g.params["beta"], "t_b": 1.0})

        u00 = float(u0(0.0))
        if abs(u00 - 1.0) > 1e-12:
            if u00 <= 0:
                raise ValueError("u0(0) must be positive")
            warnings.warn(f"u0 rescaled by 1/u0(0) = {1.0 / u00:.6g} to meet u0(0)=1",
                          stacklevel=2)
            u0 = u0.scaled(1.0 / u00)
        g0 = float(g(0.0))
        if abs(g0 - 1.0) > 1e-12:
            if g0 <= 0:
                raise ValueError("g(0) must be positive")
            warnings.warn(f"g rescaled by 1/g(0) = {1.0 / g0:.6g} to meet g(0)=1",
                          stacklevel=2)
            g = g.scaled(1.0 / g0)

        probe = u0(np.linspace(0.0, 1.0, 4097))
        if np.min(probe) <= 0:
            raise ValueError("u0 must be strictly positive on [0, 1]")

        object.__setattr__(self, "f", f)
        object.__setattr__(self, "u0", u0)
        object.__setattr__(self, "g", g)

    def alpha_grid(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n_alpha)

    def to_dict(self) -> dict:
        return {"f": self.f.to_dict(), "u0": self.u0.to_dict(),
                "g": self.g.to_dict(), "n_alpha": self.n_alpha}


def load_problem_spec(path) -> ProblemSpec:
    """Read a problem spec from a JSON file.

    Expected layout: top-level keys "f", "u0", "g" (each {"kind":..., "params":...})
    plus "n_alpha".  An optional "general" block configures the generalized
    integrator and is passed through untouched by this function.
    """
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ValueError(f"cannot read spec file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"spec file {path} is not valid JSON: {exc}") from exc
    try:
        return ProblemSpec(
            f=FunctionDescriptor.from_dict(raw["f"]),
            u0=FunctionDescriptor.from_dict(raw["u0"]),
            g=FunctionDescriptor.from_dict(raw["g"]),
            n_alpha=int(raw.get("n_alpha", 513)),
        )
    except KeyError as exc:
        raise ValueError(f"spec file {path} is missing required key {exc}") from exc


def spec_hash(spec: ProblemSpec) -> str:
    """Stable content hash of a spec, recorded in every CSV header."""
    canon = json.dumps(spec.to_dict(), sort_keys=True)
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# psi0


@dataclass(frozen=True)
class Psi0Profile:
    """Sampled psi0 with the features that control regularity.

    M0 is the greatest value attained (>= 0 because psi0(0) = 0), argmax_set
    holds the locations where it is attained, omega the zero set of psi0, and
    alpha0 the first zero of f in (0, 1).  When the integrand was polynomial,
    `analytic` stores the exact antiderivative coefficients so off-node
    evaluation loses nothing to interpolation.
    """

    psi0: GridFunction
    M0: float = 0.0
    argmax_set: np.ndarray = field(default_factory=lambda: np.array([]))
    omega: np.ndarray = field(default_factory=lambda: np.array([]))
    alpha0: float | None = None
    analytic: tuple | None = None

    def value(self, alpha):
        if self.analytic is not None:
            out = npoly.polyval(np.asarray(alpha, dtype=float), self.analytic)
            return out if np.ndim(out) else float(out)
        return self.psi0(alpha)


def _bisect(fun, a, b, fa, fb, tol=1e-15, max_iter=200):
    # plain bisection; assumes fun(a), fun(b) straddle zero
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    for _ in range(max_iter):
        mid = 0.5 * (a + b)
        fm = fun(mid)
        if fm == 0.0 or (b - a) <= tol * max(1.0, abs(mid)):
            return mid
        if (fa < 0) != (fm < 0):
            b, fb = mid, fm
        else:
            a, fa = mid, fm
    return 0.5 * (a + b)


def _first_zero(desc: FunctionDescriptor, grid: np.ndarray) -> float | None:
    """First zero of a sampled function in the open interior, by bisection."""
    vals = np.asarray(desc(grid))
    scale = np.max(np.abs(vals))
    if scale == 0:
        return None
    for i in range(len(grid) - 1):
        a, b = grid[i], grid[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if 0 < b and a < 1:
            if fa == 0.0 and 0 < a < 1:
                return float(a)
            if fa * fb < 0:
                return float(_bisect(lambda x: float(desc(x)), a, b, fa, fb))
    if vals[-1] == 0.0:
        return None  # a zero exactly at alpha=1 is not "in (0,1)"
    return None


def _parabolic_vertex(x0, h, ym, y0, yp):
    """Vertex of the parabola through three equispaced samples.

    Returns (location, value); falls back to the middle sample when the
    three points are (numerically) collinear.
    """
    denom = ym - 2.0 * y0 + yp
    if abs(denom) < 1e-300 or denom >= 0:
        return x0, y0
    delta = 0.5 * (ym - yp) / denom
    delta = float(np.clip(delta, -1.0, 1.0))
    value = y0 - 0.125 * (ym - yp) ** 2 / denom
    return x0 + delta * h, max(value, y0)


def extract_features(profile: Psi0Profile, spec: ProblemSpec) -> dict:
    """Features of psi0: M0, argmax set, zero set, first zero of f.

    M0 comes from the grid maximum refined by one parabolic-fit step, so flat
    tops and mid-cell peaks are both handled; the argmax set collects one
    refined location per cluster of grid points within FEATURE_ATOL of M0.
    """
    grid = profile.psi0.nodes
    vals = profile.psi0.values
    h = grid[1] - grid[0]

    i_max = int(np.argmax(vals))
    M0 = float(vals[i_max])
    if 0 < i_max < len(grid) - 1:
        _, M0 = _parabolic_vertex(grid[i_max], h, vals[i_max - 1], vals[i_max], vals[i_max + 1])
    M0 = max(M0, 0.0)

    # cluster grid points at the sampled maximum (the refined M0 can sit up to
    # (h/2)^2 above every node), then refine one location per cluster
    close = np.flatnonzero(vals >= vals[i_max] - FEATURE_ATOL)
    locations = []
    if close.size:
        breaks = np.flatnonzero(np.diff(close) > 1)
        for cluster in np.split(close, breaks + 1):
            j = cluster[int(np.argmax(vals[cluster]))]
            if 0 < j < len(grid) - 1:
                loc, _ = _parabolic_vertex(grid[j], h, vals[j - 1], vals[j], vals[j + 1])
            else:
                loc = grid[j]
            locations.append(loc)
    argmax_set = np.array(sorted(locations))

    scale = float(np.max(np.abs(vals)))
    zero_tol = ZERO_SET_RTOL * scale if scale > 0 else np.inf
    omega = grid[np.abs(vals) <= zero_tol] if np.isfinite(zero_tol) else grid.copy()

    alpha0 = _first_zero(spec.f, grid)
    return {"M0": M0, "argmax_set": argmax_set, "omega": omega, "alpha0": alpha0}


def build_psi0(spec: ProblemSpec, method: str = "auto") -> Psi0Profile:
    """Cumulative integral psi0(alpha) = int_0^alpha f u0 dz with features.

    method "auto" uses the exact antiderivative when f*u0 is polynomial and
    composite Simpson otherwise; "quadrature" forces Simpson (useful for
    convergence studies).
    """
    if method not in ("auto", "quadrature"):
        raise ValueError("method must be 'auto' or 'quadrature'")
    grid = spec.alpha_grid()
    analytic = None
    if method == "auto" and spec.f.is_polynomial() and spec.u0.is_polynomial():
        prod = npoly.polymul(spec.f.poly_coeffs(), spec.u0.poly_coeffs())
        anti = npoly.polyint(prod)  # constant term 0, so psi0(0) = 0 exactly
        vals = npoly.polyval(grid, anti)
        vals[0] = 0.0
        analytic = tuple(anti.tolist())
    else:
        w = spec.f(grid) * spec.u0(grid)
        if not np.all(np.isfinite(w)):
            raise ValueError("f*u0 has non-finite samples on [0, 1]")
        vals = cumulative_simpson(w, dx=grid[1] - grid[0], initial=0.0)
    bare = Psi0Profile(psi0=GridFunction(grid, vals), analytic=analytic)
    feats = extract_features(bare, spec)
    return dataclasses.replace(bare, **feats)


# ---------------------------------------------------------------------------
# G


@dataclass(frozen=True)
class BoundaryIntegral:
    """Sampled G(t) = int_0^t g, its limit, and a monotone inverse.

    analytic_form, when set, names an exact antiderivative used for both
    evaluation and inversion:
      ("polynomial", coeffs)            ascending antiderivative coefficients
      ("singular_boundary", beta, t_b)  G = (t_b/beta)((1 - t/t_b)^-beta - 1)
      ("exponential", A, r)             G = A (e^{rt} - 1)/r
    `estimated` flags a G_infinity obtained by tail extrapolation rather than
    a closed form.
    """

    G: GridFunction
    G_infinity: float
    analytic_form: tuple | None = None
    g_desc: FunctionDescriptor | None = None
    estimated: bool = False

    def value(self, t):
        t = np.asarray(t, dtype=float)
        if self.analytic_form is not None:
            tag = self.analytic_form[0]
            if tag == "polynomial":
                out = npoly.polyval(t, self.analytic_form[1])
            elif tag == "singular_boundary":
                _, beta, tb = self.analytic_form
                out = (tb / beta) * ((1.0 - t / tb) ** (-beta) - 1.0)
            else:
                _, amp, rate = self.analytic_form
                out = amp * np.expm1(rate * t) / rate
            return out if out.ndim else float(out)
        return self.G(t)

    @property
    def t_max(self) -> float:
        return float(self.G.nodes[-1])


def _g_infinity(desc: FunctionDescriptor, G_vals, t_grid):
    """Closed-form limit of G when the catalog permits, else a flagged estimate."""
    if desc.kind in ("constant", "polynomial", "singular_boundary"):
        return np.inf, False  # positive polynomial or blow-up family: divergent
    if desc.kind == "exponential":
        amp, rate = desc.params["amplitude"], desc.params["rate"]
        if rate < 0:
            return -amp / rate, False
        return np.inf, False
    # table / trigonometric: extrapolate the tail and flag the estimate
    g_end = float(desc(t_grid[-1]))
    g_mid = float(desc(t_grid[len(t_grid) // 2]))
    if g_end >= 0.5 * g_mid:
        # no decay visible; treat as divergent
        return np.inf, True
    # geometric tail model g ~ g_end * exp(-k (t - t_end))
    k = math.log(g_mid / g_end) / (t_grid[-1] - t_grid[len(t_grid) // 2])
    return float(G_vals[-1] + g_end / k), True


def build_G(spec, t_max: float, n_t: int = 1025, method: str = "auto") -> BoundaryIntegral:
    """Strictly increasing sampled G on [0, t_max] with G(0) = 0 exact.

    Accepts a ProblemSpec or a bare FunctionDescriptor for g.  For the
    singular boundary family t_max must stay below the blow-up time t_b.
    """
    desc = spec.g if isinstance(spec, ProblemSpec) else spec
    if method not in ("auto", "quadrature"):
        raise ValueError("method must be 'auto' or 'quadrature'")
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    if desc.kind == "singular_boundary" and t_max >= desc.params["t_b"]:
        raise ValueError(
            f"t_max={t_max} reaches the boundary blow-up time t_b={desc.params['t_b']}"
        )
    t_grid = np.linspace(0.0, t_max, n_t)
    analytic = None
    if method == "auto" and desc.is_polynomial():
        anti = npoly.polyint(desc.poly_coeffs())
        vals = npoly.polyval(t_grid, anti)
        vals[0] = 0.0
        analytic = ("polynomial", tuple(anti.tolist()))
    elif method == "auto" and desc.kind == "singular_boundary":
        beta, tb = desc.params["beta"], desc.params["t_b"]
        vals = (tb / beta) * ((1.0 - t_grid / tb) ** (-beta) - 1.0)
        vals[0] = 0.0
        analytic = ("singular_boundary", beta, tb)
    elif method == "auto" and desc.kind == "exponential":
        amp, rate = desc.params["amplitude"], desc.params["rate"]
        if rate == 0.0:
            anti = (0.0, amp)
            vals = npoly.polyval(t_grid, anti)
            analytic = ("polynomial", anti)
        else:
            vals = amp * np.expm1(rate * t_grid) / rate
            analytic = ("exponential", amp, rate)
    else:
        g_samples = np.asarray(desc(t_grid))
        if np.min(g_samples) <= 0:
            raise ValueError("g must be strictly positive on [0, t_max]")
        vals = cumulative_simpson(g_samples, dx=t_grid[1] - t_grid[0], initial=0.0)
    if not np.all(np.diff(vals) > 0):
        raise ValueError("G is not strictly increasing; g must be positive")
    G_inf, estimated = _g_infinity(desc, vals, t_grid)
    return BoundaryIntegral(G=GridFunction(t_grid, vals), G_infinity=G_inf,
                            analytic_form=analytic, g_desc=desc, estimated=estimated)


def invert_G(B: BoundaryIntegral, target: float) -> float:
    """Solve G(t) = target for the monotone accumulated boundary integral.

    Closed-form inversion when an analytic form is available, bisection on the
    sampled interpolant otherwise.  A target at or past G_infinity raises
    NoFiniteTime, the numerical signal for global existence.
    """
    target = float(target)
    if target < 0:
        raise ValueError("inversion target must be nonnegative")
    if target == 0.0:
        return 0.0
    if target >= B.G_infinity:
        raise NoFiniteTime(target, B.G_infinity)

    tol = INVERT_RTOL * (1.0 + target)
    if B.analytic_form is not None:
        tag = B.analytic_form[0]
        if tag == "singular_boundary":
            _, beta, tb = B.analytic_form
            return float(tb * (1.0 - (1.0 + beta * target / tb) ** (-1.0 / beta)))
        if tag == "exponential":
            _, amp, rate = B.analytic_form
            return float(math.log1p(rate * target / amp) / rate)
        # polynomial: roots of the antiderivative shifted by the target
        coeffs = np.array(B.analytic_form[1])
        coeffs[0] -= target
        roots = np.roots(coeffs[::-1])
        real = roots[np.abs(roots.imag) < 1e-9].real
        candidates = sorted(r for r in real if r >= -1e-12)
        for r in candidates:
            if abs(float(B.value(r)) - target) <= max(tol, 1e-9 * (1 + target)):
                return float(max(r, 0.0))
        # numerically awkward root constellation: fall through to bisection

    # bisection; expand the bracket beyond the sampled domain only when an
    # analytic form makes evaluation there meaningful
    value = B.value
    hi = B.t_max
    if B.analytic_form is None:
        if target > float(value(hi)):
            raise ValueError(
                f"target {target} exceeds sampled G({hi}) = {float(value(hi)):.6g}; "
                "rebuild with a larger t_max"
            )
    else:
        while float(value(hi)) < target:
            hi *= 2.0
    lo, f_lo, f_hi = 0.0, -target, float(value(hi)) - target
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = float(value(mid)) - target
        if abs(fm) <= tol:
            return mid
        if (f_lo < 0) != (fm < 0):
            hi, f_hi = mid, fm
        else:
            lo, f_lo = mid, fm
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# compatibility


@dataclass(frozen=True)
class CompatibilityReport:
    ok: bool
    defect: float
    sign_change: bool


def check_compatibility(spec: ProblemSpec) -> CompatibilityReport:
    """Defect |int_0^1 f u0| and whether f changes sign.

    Periodic boundary values are consistent only when the defect vanishes;
    failure is reported, not raised.
    """
    grid = np.linspace(0.0, 1.0, max(spec.n_alpha | 1, 513))
    w = spec.f(grid) * spec.u0(grid)
    if spec.f.is_polynomial() and spec.u0.is_polynomial():
        anti = npoly.polyint(npoly.polymul(spec.f.poly_coeffs(), spec.u0.poly_coeffs()))
        defect = abs(float(npoly.polyval(1.0, anti)))
    else:
        defect = abs(float(simpson(w, x=grid)))
    scale = float(np.max(np.abs(w)))
    ok = defect <= COMPAT_RTOL * scale if scale > 0 else True
    f_vals = np.asarray(spec.f(grid))
    f_scale = np.max(np.abs(f_vals))
    sign_change = bool(f_scale > 0
                       and np.min(f_vals) < -1e-14 * f_scale
                       and np.max(f_vals) > 1e-14 * f_scale)
    return CompatibilityReport(ok=ok, defect=defect, sign_change=sign_change)
