"""Evaluation of the representation formula and the singular set.

With psi0 and G in hand the solution of the periodic problem is

    u(alpha, t) = u0(alpha) g(t) / D(alpha, t)^2,
    D(alpha, t) = 1 - (1/2) psi0(alpha) G(t).

Everything here is algebra on those two primitives: pointwise evaluation,
field assembly with masking of the region at or beyond the zero set of D,
the singular curve t~(alpha) solving psi0(alpha) G(t) = 2, and the transport
of jump discontinuities in the data along characteristics.

The formula stops representing the solution once D reaches zero, so field
masking is one-sided: a sample is masked when D <= SINGULAR_ATOL, which
covers both the near-zero band and everything past the curve.  Pointwise
evaluate_u instead guards |D| so both sides of the curve stay inspectable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import EmptyCurve, NearSingular, NoFiniteTime
from .problem_model import (
    BoundaryIntegral,
    ProblemSpec,
    Psi0Profile,
    invert_G,
)

SINGULAR_ATOL = 1e-8   # D at or below this counts as singular (or past the curve)
CURVE_RTOL = 1e-6      # curve sampled only where psi0 > CURVE_RTOL * M0


@dataclass(frozen=True)
class SolutionField:
    """u sampled on a tensor grid, with the invalid region masked.

    values[i, j] = u(alpha_nodes[j], t_nodes[i]); singular_mask marks samples
    where the denominator has dropped to (or through) zero.  Unmasked samples
    are finite and strictly positive.
    """

    alpha_nodes: np.ndarray
    t_nodes: np.ndarray
    values: np.ndarray
    singular_mask: np.ndarray
    denominator_min: float

    def row(self, t: float) -> np.ndarray:
        """Samples u(., t) at an existing t node."""
        idx = int(np.argmin(np.abs(self.t_nodes - t)))
        if abs(self.t_nodes[idx] - t) > 1e-12 * (1.0 + abs(t)):
            raise ValueError(f"t={t} is not a node of this field")
        return self.values[idx]

    def row_mask(self, t: float) -> np.ndarray:
        idx = int(np.argmin(np.abs(self.t_nodes - t)))
        return self.singular_mask[idx]

    def to_csv(self, path, comment: str | None = None):
        with open(path, "w") as fh:
            if comment:
                fh.write(f"# {comment}\n")
            fh.write("alpha,t,u,masked\n")
            for i, t in enumerate(self.t_nodes):
                for j, a in enumerate(self.alpha_nodes):
                    fh.write(f"{a:.12e},{t:.12e},{self.values[i, j]:.12e},"
                             f"{int(self.singular_mask[i, j])}\n")


@dataclass(frozen=True)
class SingularCurve:
    """Samples of the curve t~(alpha) on which the denominator vanishes.

    Restricted to {psi0 > CURVE_RTOL * M0}; slope_sign holds the sign of the
    finite-difference slope at each sample, and slope_mismatches counts the
    samples where that sign disagrees with the predicted sign(-f(alpha)).
    """

    alpha_samples: np.ndarray
    t_samples: np.ndarray
    slope_sign: np.ndarray
    slope_mismatches: int = 0

    def to_csv(self, path, comment: str | None = None):
        with open(path, "w") as fh:
            if comment:
                fh.write(f"# {comment}\n")
            fh.write("alpha,t_tilde,slope_sign\n")
            for a, t, s in zip(self.alpha_samples, self.t_samples, self.slope_sign):
                fh.write(f"{a:.12e},{t:.12e},{int(s)}\n")


# ---------------------------------------------------------------------------
# pointwise evaluation


def denominator(profile: Psi0Profile, B: BoundaryIntegral, alpha, t):
    """D(alpha, t) = 1 - (1/2) psi0(alpha) G(t)."""
    out = 1.0 - 0.5 * np.asarray(profile.value(alpha)) * np.asarray(B.value(t))
    return out if np.ndim(out) else float(out)


def evaluate_u(profile: Psi0Profile, B: BoundaryIntegral, spec: ProblemSpec, alpha, t):
    """u(alpha, t) by the representation formula; guards |D| > SINGULAR_ATOL.

    Accepts scalars or broadcastable arrays.  The first guard violation is
    raised as NearSingular with the offending point attached.
    """
    alpha_arr = np.asarray(alpha, dtype=float)
    t_arr = np.asarray(t, dtype=float)
    D = np.asarray(denominator(profile, B, alpha_arr, t_arr))
    bad = np.abs(D) <= SINGULAR_ATOL
    if np.any(bad):
        idx = tuple(np.argwhere(bad)[0])
        a_bad = float(np.broadcast_to(alpha_arr, D.shape)[idx])
        t_bad = float(np.broadcast_to(t_arr, D.shape)[idx])
        raise NearSingular(a_bad, t_bad, float(D[idx]))
    out = spec.u0(alpha_arr) * spec.g(t_arr) / D**2
    return out if np.ndim(out) else float(out)


def evaluate_field(profile: Psi0Profile, B: BoundaryIntegral, spec: ProblemSpec,
                   alpha_grid, t_grid) -> SolutionField:
    """Assemble u on alpha_grid x t_grid, masking D <= SINGULAR_ATOL.

    Masked entries hold NaN.  The one-sided rule keeps only the region where
    the representation formula is the classical solution (before the curve).
    """
    alpha_grid = np.asarray(alpha_grid, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)
    psi = np.atleast_1d(profile.value(alpha_grid))
    Gv = np.atleast_1d(B.value(t_grid))
    D = 1.0 - 0.5 * psi[None, :] * Gv[:, None]
    mask = D <= SINGULAR_ATOL
    u0v = np.atleast_1d(np.asarray(spec.u0(alpha_grid), dtype=float))
    gv = np.atleast_1d(np.asarray(spec.g(t_grid), dtype=float))
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = u0v[None, :] * gv[:, None] / D**2
    vals = np.where(mask, np.nan, vals)
    return SolutionField(
        alpha_nodes=alpha_grid,
        t_nodes=t_grid,
        values=vals,
        singular_mask=mask,
        denominator_min=float(np.min(np.abs(D))),
    )


# ---------------------------------------------------------------------------
# singular curve


def singular_curve(profile: Psi0Profile, B: BoundaryIntegral) -> SingularCurve:
    """Sample t~(alpha) = G^{-1}(2 / psi0(alpha)) over {psi0 > CURVE_RTOL * M0}.

    Samples whose target lies beyond the reach of G (past G_infinity, or past
    the sampled horizon when no closed form is available) are dropped: those
    alpha never meet the singular set in the covered time range.  Raises
    EmptyCurve when psi0 is nonpositive everywhere.
    """
    if profile.M0 <= 0:
        raise EmptyCurve("psi0 <= 0 everywhere; the singular set is empty")
    grid = profile.psi0.nodes
    psi = profile.psi0.values
    keep = psi > CURVE_RTOL * profile.M0
    if not np.any(keep):
        raise EmptyCurve("no grid point clears the curve threshold")

    kept_idx, times = [], []
    for i in np.flatnonzero(keep):
        try:
            times.append(invert_G(B, 2.0 / psi[i]))
        except (NoFiniteTime, ValueError):
            continue
        kept_idx.append(i)
    if len(kept_idx) < 2:
        raise EmptyCurve("fewer than two curve samples reachable within the time horizon")
    kept_idx = np.array(kept_idx)
    alpha_s = grid[kept_idx]
    t_s = np.array(times)

    slope = np.gradient(t_s, alpha_s)
    fd_sign = np.sign(slope).astype(int)
    # predicted slope t~'(alpha) = -2 f u0 / (g(t~) psi0^2) has the sign of -f,
    # and sign(f) = sign(psi0') since psi0' = f u0 with u0 > 0
    if profile.analytic is not None:
        dpsi = npoly.polyval(alpha_s, npoly.polyder(profile.analytic))
    else:
        dpsi = np.gradient(psi, grid)[kept_idx]
    theory = -np.sign(dpsi).astype(int)
    resolved = np.abs(slope) > 1e-6 * (1.0 + np.abs(t_s))
    mism = int(np.sum((fd_sign != theory) & resolved & (theory != 0)))
    return SingularCurve(alpha_samples=alpha_s, t_samples=t_s,
                         slope_sign=fd_sign, slope_mismatches=mism)


# ---------------------------------------------------------------------------
# jump transport


def jump_transport(profile: Psi0Profile, B: BoundaryIntegral, spec: ProblemSpec,
                   jump_location: float, jump_size: float, axis: str,
                   alpha: float | None = None, t: float | None = None) -> float:
    """Transported size of a data discontinuity at a query point.

    axis "alpha": u0 jumps by jump_size at alpha=jump_location; the solution
    jump across that vertical characteristic at time t is jump_size*g(t)/D^2.
    axis "t": g jumps at t=jump_location; the jump across that horizontal
    characteristic at position alpha is jump_size*u0(alpha)/D^2.

    The query must lie in the unmasked (pre-curve) region, else NearSingular.
    """
    if axis == "alpha":
        if t is None:
            raise ValueError("axis 'alpha' transports in time; pass t=")
        q_alpha, q_t = float(jump_location), float(t)
        base = float(spec.g(q_t))
    elif axis == "t":
        if alpha is None:
            raise ValueError("axis 't' transports in space; pass alpha=")
        q_alpha, q_t = float(alpha), float(jump_location)
        base = float(spec.u0(q_alpha))
    else:
        raise ValueError("axis must be 'alpha' or 't'")
    D = float(denominator(profile, B, q_alpha, q_t))
    if D <= SINGULAR_ATOL:
        raise NearSingular(q_alpha, q_t, D)
    return jump_size * base / D**2
