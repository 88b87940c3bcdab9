"""Modular, metric and Luxemburg quasi-norm of the generated function space.

For a concave generator phi and a finite measure space, the modular of f is
the integral of phi(|f|); the metric between f and g is the modular of
f - g; and the quasi-norm of f is the smallest lambda scaling f into the
modular unit ball. The quasi-norm is positively homogeneous but satisfies
the triangle inequality only up to the doubling constant, which is exactly
what the inequality checks in this module quantify. Every check reports a
signed slack (bound minus attained value) rather than a bare boolean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .calculus import NStarFunction, resolve_complementary
from .errors import DomainError, NonconvergenceError, SpaceMismatchError
from .measure import MeasurableFn, MeasureSpace, integrate

__all__ = [
    "ModularValue",
    "QuasiNormResult",
    "CheckReport",
    "ConvergenceReport",
    "modular",
    "metric",
    "luxemburg_norm",
    "quasi_triangle_check",
    "young_type_check",
    "reversed_jensen_check",
    "l1_embedding_bound_check",
    "modular_to_norm_bound_check",
    "product_identity_check",
    "intersection_check",
    "convergence_equivalence",
]

LUX_RESIDUAL_TOL = 1e-10
LUX_MAX_ITER = 200
SLACK_TOL = 1e-9


@dataclass(frozen=True)
class ModularValue:
    """Integral of phi(|f|); finite is False when evaluation overflowed."""

    value: float
    finite: bool


@dataclass(frozen=True)
class QuasiNormResult:
    value: float
    lambda_residual: float
    iterations: int


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one inequality check.

    slack_min/slack_max summarize the signed slack over all evaluated
    instances (positive slack means the bound holds with room). passed is
    None when the check was skipped because its precondition failed.
    notes carry diagnostic findings that do not affect pass/fail.
    """

    name: str
    slack_min: float
    slack_max: float
    passed: bool | None
    notes: tuple[str, ...] = ()
    data: dict = field(default_factory=dict)

    @property
    def skipped(self) -> bool:
        return self.passed is None

    def to_record(self) -> dict:
        rec = {
            "name": self.name,
            "slack_min": self.slack_min,
            "slack_max": self.slack_max,
            "pass": bool(self.passed) if self.passed is not None else None,
        }
        if self.notes:
            rec["notes"] = list(self.notes)
        return rec


def modular(phi: NStarFunction, space: MeasureSpace, f: MeasurableFn) -> ModularValue:
    """rho(f) = integral of phi(|f|) d mu. Overflow yields an infinite flag, not a fault."""
    value = integrate(space, lambda v: np.asarray(phi(np.abs(v)), dtype=float), f)
    return ModularValue(value=value, finite=bool(np.isfinite(value)))


def metric(phi: NStarFunction, space: MeasureSpace, f: MeasurableFn, g: MeasurableFn) -> float:
    """d(f, g): the modular of f - g. Symmetric since the generator is even."""
    return modular(phi, space, f - g).value


def luxemburg_norm(
    phi: NStarFunction,
    space: MeasureSpace,
    f: MeasurableFn,
    *,
    residual_tol: float = LUX_RESIDUAL_TOL,
    max_iter: int = LUX_MAX_ITER,
) -> QuasiNormResult:
    """Smallest lambda with modular(f / lambda) <= 1.

    lambda -> rho(f/lambda) is continuous and strictly decreasing through 1
    on finite spaces, so a doubling/halving bracket always exists; bisection
    on the geometric midpoint stops when the modular residual is inside
    residual_tol (or the bracket collapses to rounding width).
    """
    if not f.space.same_as(space):
        raise SpaceMismatchError("function does not live on the given space")
    absv = np.abs(f.values)
    if not absv.any():
        return QuasiNormResult(0.0, 0.0, 0)
    masses = space.masses

    def rho(lam: float) -> float:
        with np.errstate(over="ignore", invalid="ignore"):
            vals = np.asarray(phi(absv / lam), dtype=float)
            out = float(np.dot(vals, masses))
        return out if np.isfinite(out) else math.inf

    iterations = 0
    lo = hi = max(float(absv.max()), 1e-300)
    step = 2.0
    while rho(hi) > 1.0:
        if hi >= 1e300 or iterations > max_iter:
            raise NonconvergenceError("no upper bracket for the quasi-norm within budget")
        hi = min(hi * step, 1e300)
        step = min(step * step, 1e12)
        iterations += 1
    step = 2.0
    while rho(lo) < 1.0:
        if lo <= 1e-300 or iterations > max_iter:
            # the modular never reaches 1 from above: f is a modular null
            raise NonconvergenceError("no lower bracket for the quasi-norm within budget")
        lo = max(lo / step, 1e-300)
        step = min(step * step, 1e12)
        iterations += 1
    lam = hi
    resid = abs(rho(lam) - 1.0)
    while iterations < max_iter:
        mid = math.sqrt(lo * hi)
        value = rho(mid)
        iterations += 1
        lam = mid
        resid = abs(value - 1.0)
        if resid <= residual_tol or (hi - lo) <= 1e-15 * hi:
            break
        if value > 1.0:
            lo = mid
        else:
            hi = mid
    else:
        raise NonconvergenceError(
            f"quasi-norm bisection did not meet residual {residual_tol:g} in {max_iter} steps"
        )
    return QuasiNormResult(value=float(lam), lambda_residual=float(resid), iterations=iterations)


def _bound_constant(phi: NStarFunction, k: float | None) -> float:
    if k is not None:
        return float(k)
    if phi.delta2 is not None:
        return phi.delta2.bound_constant
    raise DomainError("a doubling constant is required; attach a certificate or pass k")


def quasi_triangle_check(
    phi: NStarFunction,
    space: MeasureSpace,
    f: MeasurableFn,
    g: MeasurableFn,
    *,
    k: float | None = None,
    tol: float = SLACK_TOL,
) -> CheckReport:
    """Ratio ||f+g|| / (||f|| + ||g||) against the doubling constant k.

    A ratio above 1 witnesses failure of the plain triangle inequality;
    that is reported as a note, never as a failure. Both summands zero
    yields ratio 0 by convention.
    """
    kval = _bound_constant(phi, k)
    nf = luxemburg_norm(phi, space, f).value
    ng = luxemburg_norm(phi, space, g).value
    if nf + ng == 0.0:
        ratio = 0.0
    else:
        ratio = luxemburg_norm(phi, space, f + g).value / (nf + ng)
    slack = kval - ratio
    notes = []
    if ratio > 1.0 + tol:
        notes.append(f"triangle inequality fails: ratio {ratio:.9g} > 1")
    return CheckReport(
        name="quasi_triangle",
        slack_min=float(slack),
        slack_max=float(slack),
        passed=bool(slack >= -tol),
        notes=tuple(notes),
        data={"ratio": ratio, "k": kval, "norm_f": nf, "norm_g": ng},
    )


def young_type_check(
    phi: NStarFunction,
    space: MeasureSpace,
    f: MeasurableFn,
    g: MeasurableFn,
    *,
    phi_hat: NStarFunction | None = None,
    tol: float = SLACK_TOL,
) -> CheckReport:
    """integral of phi(|f|) * phi_hat(|g|) against integral |f| + integral |g|."""
    phi_hat = resolve_complementary(phi, phi_hat)
    if not f.space.same_as(space) or not g.space.same_as(space):
        raise SpaceMismatchError("functions must live on the given space")
    left_vals = np.asarray(phi(np.abs(f.values)), dtype=float) * np.asarray(
        phi_hat(np.abs(g.values)), dtype=float
    )
    left = float(np.dot(left_vals, space.masses))
    right = integrate(space, np.abs, f) + integrate(space, np.abs, g)
    slack = right - left
    scale = max(abs(left), abs(right), 1.0)
    return CheckReport(
        name="young_type",
        slack_min=float(slack),
        slack_max=float(slack),
        passed=bool(slack >= -tol * scale),
        data={"left": left, "right": right},
    )


def reversed_jensen_check(
    phi: NStarFunction,
    space: MeasureSpace,
    f: MeasurableFn,
    *,
    tol: float = SLACK_TOL,
) -> CheckReport:
    """phi of the mean of |f| dominates the mean of phi(|f|) on finite measure."""
    mu = space.total_mass
    if not (np.isfinite(mu) and mu > 0):
        raise DomainError("reversed Jensen needs finite positive total mass")
    mean_abs = integrate(space, np.abs, f) / mu
    lhs = float(phi(mean_abs))
    rhs = modular(phi, space, f).value / mu
    slack = lhs - rhs
    scale = max(abs(lhs), abs(rhs), 1.0)
    return CheckReport(
        name="reversed_jensen",
        slack_min=float(slack),
        slack_max=float(slack),
        passed=bool(slack >= -tol * scale),
        data={"phi_of_mean": lhs, "mean_modular": rhs},
    )


def l1_embedding_bound_check(
    phi: NStarFunction,
    space: MeasureSpace,
    f: MeasurableFn,
    *,
    tol: float = SLACK_TOL,
) -> CheckReport:
    """Quasi-norm against ||f||_1 / (mu(X) * phi^{-1}(1/mu(X))) on finite measure."""
    mu = space.total_mass
    l1 = integrate(space, np.abs, f)
    bound = l1 / (mu * float(phi.inverse(1.0 / mu)))
    norm = luxemburg_norm(phi, space, f).value
    slack = bound - norm
    scale = max(abs(bound), abs(norm), 1.0)
    return CheckReport(
        name="l1_embedding",
        slack_min=float(slack),
        slack_max=float(slack),
        passed=bool(slack >= -tol * scale),
        data={"norm": norm, "bound": bound, "l1": l1},
    )


def modular_to_norm_bound_check(
    phi: NStarFunction,
    space: MeasureSpace,
    f: MeasurableFn,
    c: float,
    *,
    k: float | None = None,
    tol: float = SLACK_TOL,
) -> CheckReport:
    """Modular below c forces quasi-norm below k^(floor(ln c / ln 2) + 1).

    When the precondition modular(f) < c fails the check is skipped
    (passed is None), not failed.
    """
    kval = _bound_constant(phi, k)
    rho = modular(phi, space, f)
    if not rho.finite or not rho.value < c:
        return CheckReport(
            name="modular_to_norm",
            slack_min=float("nan"),
            slack_max=float("nan"),
            passed=None,
            notes=(f"precondition modular < c failed: modular={rho.value:.6g}, c={c:.6g}",),
        )
    n0 = math.floor(math.log(c) / math.log(2.0)) + 1
    bound = kval**n0
    norm = luxemburg_norm(phi, space, f).value
    slack = bound - norm
    scale = max(abs(bound), 1.0)
    return CheckReport(
        name="modular_to_norm",
        slack_min=float(slack),
        slack_max=float(slack),
        passed=bool(slack >= -tol * scale),
        data={"n0": n0, "bound": bound, "norm": norm, "modular": rho.value, "c": c},
    )


def product_identity_check(
    phi: NStarFunction,
    alpha_grid,
    *,
    phi_hat: NStarFunction | None = None,
    tol: float = 1e-6,
) -> CheckReport:
    """alpha <= phi(alpha) * phi_hat(alpha) <= 2 alpha on a positive grid.

    The additive variant alpha < phi(alpha) + phi_hat(alpha) <= 2 alpha is
    evaluated as a diagnostic only: points where either additive bound
    fails are listed in the notes and never fail the check, because the
    product form is the inequality the closed families actually satisfy.
    """
    phi_hat = resolve_complementary(phi, phi_hat)
    alphas = np.asarray(alpha_grid, dtype=float)
    if np.any(alphas <= 0):
        raise DomainError("the sandwich is stated for strictly positive arguments")
    pv = np.asarray(phi(alphas), dtype=float)
    hv = np.asarray(phi_hat(alphas), dtype=float)
    product = pv * hv
    lower = (product - alphas) / alphas
    upper = (2.0 * alphas - product) / alphas
    slack_min = float(min(lower.min(), upper.min()))
    slack_max = float(max(lower.max(), upper.max()))
    total = pv + hv
    notes = []
    bad_low = alphas[total <= alphas * (1 + 1e-12)]
    bad_high = alphas[total > 2.0 * alphas * (1 + 1e-12)]
    if bad_low.size:
        notes.append(
            f"additive lower bound fails at {bad_low.size} grid points, e.g. alpha={bad_low[0]:.6g} "
            f"(sum {float(total[alphas == bad_low[0]][0]):.6g} <= alpha)"
        )
    if bad_high.size:
        notes.append(
            f"additive upper bound fails at {bad_high.size} grid points, e.g. alpha={bad_high[0]:.6g}"
        )
    return CheckReport(
        name="product_identity",
        slack_min=slack_min,
        slack_max=slack_max,
        passed=bool(slack_min >= -tol),
        notes=tuple(notes),
        data={"alphas": alphas, "product": product, "sum": total},
    )


def intersection_check(
    phi: NStarFunction,
    space: MeasureSpace,
    f: MeasurableFn,
    *,
    phi_hat: NStarFunction | None = None,
    tol: float = SLACK_TOL,
) -> CheckReport:
    """Membership sandwich: integral |f| <= integral phi(|f|) phi_hat(|f|) <= 2 integral |f|.

    Integrates the pointwise product sandwich; reports the three membership
    integrals alongside.
    """
    phi_hat = resolve_complementary(phi, phi_hat)
    absv = np.abs(f.values)
    l1 = float(np.dot(absv, space.masses))
    mod_phi = modular(phi, space, f).value
    mod_hat = float(np.dot(np.asarray(phi_hat(absv), dtype=float), space.masses))
    prod = float(
        np.dot(
            np.asarray(phi(absv), dtype=float) * np.asarray(phi_hat(absv), dtype=float),
            space.masses,
        )
    )
    scale = max(l1, 1.0)
    lower = (prod - l1) / scale
    upper = (2.0 * l1 - prod) / scale
    slack_min = float(min(lower, upper))
    return CheckReport(
        name="intersection",
        slack_min=slack_min,
        slack_max=float(max(lower, upper)),
        passed=bool(slack_min >= -tol),
        data={"l1": l1, "modular_phi": mod_phi, "modular_hat": mod_hat, "product_integral": prod},
    )


@dataclass(frozen=True)
class ConvergenceReport:
    """Paired trajectories of metric distance and quasi-norm distance.

    verdict is True when the two notions of convergence agree: both
    trajectories end below the threshold, or neither does.
    """

    metric_distances: np.ndarray
    norm_distances: np.ndarray
    threshold: float
    verdict: bool


def convergence_equivalence(
    phi: NStarFunction,
    space: MeasureSpace,
    sequence: list[MeasurableFn],
    f: MeasurableFn,
    *,
    threshold: float = 1e-3,
) -> ConvergenceReport:
    """Track d(f_n, f) and ||f_n - f|| along a sequence and compare verdicts."""
    ds = []
    qs = []
    for fn in sequence:
        diff = fn - f
        ds.append(metric(phi, space, fn, f))
        qs.append(luxemburg_norm(phi, space, diff).value)
    ds_arr = np.asarray(ds)
    qs_arr = np.asarray(qs)
    d_ok = bool(ds_arr[-1] < threshold) if ds_arr.size else False
    q_ok = bool(qs_arr[-1] < threshold) if qs_arr.size else False
    return ConvergenceReport(
        metric_distances=ds_arr,
        norm_distances=qs_arr,
        threshold=threshold,
        verdict=d_ok == q_ok,
    )
