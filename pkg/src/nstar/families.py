"""Registered closed-form generator families.

Four families ship with closed evaluation, inversion and slope density:

* power           phi(x) = |x|^p, 0 < p < 1
* power_scaled    phi(x) = |x|^p / p^p
* alpha_exp       phi(x) = (alpha |x|)^(1/alpha), alpha > 1
* log_sqrt        phi(x) = sqrt(log(1 + |x|))

plus "tabulated_density" which interpolates user-supplied (t, p(t)) samples
log-log linearly and integrates them numerically. The three power-shaped
families carry closed complementary generators; log_sqrt and tabulated
densities fall back to the numeric conjugation pipeline.
"""

from __future__ import annotations

import numpy as np

from .calculus import DensityFunction, NFunction, NStarFunction
from .errors import DocumentError, DomainError
from .numerics import DEFAULT_QUAD, LogLogLinear, QuadConfig

__all__ = [
    "power_family",
    "scaled_power_family",
    "alpha_exp_family",
    "log_sqrt_family",
    "tabulated_density_family",
    "from_density",
    "power_nfunction",
    "build_family",
    "FAMILY_NAMES",
]


def power_nfunction(coeff: float, exponent: float, quad: QuadConfig = DEFAULT_QUAD) -> NFunction:
    """Convex power M(t) = coeff * t^exponent with exponent > 1.

    Registered conjugate: the dual power with exponent r/(r-1) and the
    matching coefficient, so conjugation of these closes in the family.
    """
    if exponent <= 1:
        raise DomainError("a convex Young power needs exponent > 1")
    a, r = float(coeff), float(exponent)

    def conj() -> NFunction:
        r_bar = r / (r - 1.0)
        a_bar = (a * r) ** (-1.0 / (r - 1.0)) * (r - 1.0) / r
        return power_nfunction(a_bar, r_bar, quad)

    return NFunction(
        density=lambda s: a * r * np.asarray(s, dtype=float) ** (r - 1.0),
        eval_fn=lambda t: a * np.asarray(t, dtype=float) ** r,
        description=f"{a:g}*t^{r:g}",
        registered_conjugate=conj,
        quad=quad,
    )


def _scaled_power(coeff: float, p: float, label: str, quad: QuadConfig) -> NStarFunction:
    """Concave power phi(x) = coeff * |x|^p for 0 < p < 1, with closed complement."""
    c, q = float(coeff), float(p)

    def eval_fn(a):
        return c * np.asarray(a, dtype=float) ** q

    def inverse_fn(y):
        return (np.asarray(y, dtype=float) / c) ** (1.0 / q)

    def density_fn(t):
        t_arr = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            return c * q * t_arr ** (q - 1.0)

    def complement() -> NStarFunction:
        c_hat = 1.0 / ((1.0 - q) ** (1.0 - q) * q**q * c)
        return _scaled_power(c_hat, 1.0 - q, f"complementary({label})", quad)

    return NStarFunction(
        density=DensityFunction(density_fn, singular_at_zero=True, description=f"slope of {label}"),
        eval_fn=eval_fn,
        inverse_fn=inverse_fn,
        description=label,
        quad=quad,
        registered_complementary=complement,
    )


def power_family(p: float, quad: QuadConfig = DEFAULT_QUAD) -> NStarFunction:
    """phi(x) = |x|^p for 0 < p < 1."""
    if not 0 < p < 1:
        raise DomainError("power exponent must lie in (0, 1)")
    return _scaled_power(1.0, p, f"power(p={p:g})", quad)


def scaled_power_family(p: float, quad: QuadConfig = DEFAULT_QUAD) -> NStarFunction:
    """phi(x) = |x|^p / p^p for 0 < p < 1; the complement is the same shape in 1-p."""
    if not 0 < p < 1:
        raise DomainError("power exponent must lie in (0, 1)")
    return _scaled_power(p ** (-p), p, f"power_scaled(p={p:g})", quad)


def alpha_exp_family(alpha: float, quad: QuadConfig = DEFAULT_QUAD) -> NStarFunction:
    """phi(x) = (alpha |x|)^(1/alpha) = exp(log(alpha |x|) / alpha) for alpha > 1."""
    if not alpha > 1:
        raise DomainError("alpha must exceed 1")
    a = float(alpha)
    return _scaled_power(a ** (1.0 / a), 1.0 / a, f"alpha_exp(alpha={a:g})", quad)


def log_sqrt_family(quad: QuadConfig = DEFAULT_QUAD) -> NStarFunction:
    """phi(x) = sqrt(log(1 + |x|)); inverse expm1(y^2); no closed complement."""

    def eval_fn(a):
        return np.sqrt(np.log1p(np.asarray(a, dtype=float)))

    def inverse_fn(y):
        return np.expm1(np.asarray(y, dtype=float) ** 2)

    def density_fn(t):
        t_arr = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = 1.0 / (2.0 * (t_arr + 1.0) * np.sqrt(np.log1p(t_arr)))
        return np.where(t_arr > 0, out, np.inf)

    return NStarFunction(
        density=DensityFunction(density_fn, singular_at_zero=True, description="slope of log_sqrt"),
        eval_fn=eval_fn,
        inverse_fn=inverse_fn,
        description="log_sqrt",
        quad=quad,
    )


def tabulated_density_family(
    ts, ps, quad: QuadConfig = DEFAULT_QUAD, description: str = "tabulated_density"
) -> NStarFunction:
    """Generator integrated from sampled (t, p(t)) pairs.

    Samples are interpolated linearly in log-log coordinates and continued
    beyond the table with the edge slopes, which preserves power-law decay
    and the singularity at the origin.
    """
    ts = np.asarray(ts, dtype=float)
    ps = np.asarray(ps, dtype=float)
    if ts.size != ps.size or ts.size < 2:
        raise DomainError("need matching (t, p) samples, at least two")
    if np.any(np.diff(ts) <= 0):
        raise DomainError("density samples must have strictly increasing t")
    if np.any(ps <= 0):
        raise DomainError("density samples must be strictly positive")
    if np.any(np.diff(ps) > 0):
        raise DomainError("density samples must be non-increasing")
    interp = LogLogLinear(ts, ps)
    return NStarFunction(
        density=DensityFunction(interp, singular_at_zero=True, description=f"{description} samples"),
        eval_fn=None,
        inverse_fn=None,
        description=description,
        quad=quad,
    )


def from_density(
    density: DensityFunction, quad: QuadConfig = DEFAULT_QUAD, description: str = ""
) -> NStarFunction:
    """Generator defined only through its slope density."""
    return NStarFunction(
        density=density,
        eval_fn=None,
        inverse_fn=None,
        description=description or (density.description or "from_density"),
        quad=quad,
    )


FAMILY_NAMES = ("power", "power_scaled", "alpha_exp", "log_sqrt", "tabulated_density")


def build_family(name: str, params: dict, quad: QuadConfig = DEFAULT_QUAD) -> NStarFunction:
    """Construct a registered family from document fields."""
    try:
        if name == "power":
            return power_family(float(params["p"]), quad)
        if name == "power_scaled":
            return scaled_power_family(float(params["p"]), quad)
        if name == "alpha_exp":
            return alpha_exp_family(float(params["alpha"]), quad)
        if name == "log_sqrt":
            return log_sqrt_family(quad)
        if name == "tabulated_density":
            return tabulated_density_family(params["t"], params["p"], quad)
    except KeyError as exc:
        raise DocumentError(f"family {name!r} is missing parameter {exc.args[0]!r}") from exc
    except DomainError as exc:
        raise DocumentError(f"family {name!r}: {exc}") from exc
    raise DocumentError(f"unknown family {name!r}; expected one of {', '.join(FAMILY_NAMES)}")
