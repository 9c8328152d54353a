"""Rate selectors calibrated to statistical reliability targets.

Two constraint semantics are supported for a target outage level eps:

    AR  (averaged reliability)        E[outage probability] <= eps
    PCR (probably correct reliability) P[outage probability > eps] <= xi

Each selector maps a TrainingSample of size n to a rate in bits per
channel use, through a backed-off quantile level eps_n (parametric and
power-law families) or an order-statistic index l (non-parametric
family). Calibration depends only on (eps, xi, n, beta), never on the
sample itself, so it can be computed once and reused across trials.

Families:

    rayleigh               scale MLE + Rayleigh quantile at eps_n
    nonparametric          l-th smallest sample value
    powerlaw-asym          log-domain tail fit, asymptotic calibration
    powerlaw-nonasym       log-domain tail fit, finite-sample bound
    plugin-rayleigh        Rayleigh quantile at eps (no back-off)
    plugin-nonparametric   empirical quantile at eps (no back-off)
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.optimize as _opt
import scipy.special as _sp

from . import specfun
from .errors import InsufficientTailDataError, NoSolutionError
from .learn import (
    TailFit,
    TrainingSample,
    _ceil_with_float_guard,
    _floor_with_float_guard,
    fit_power_tail,
    tail_quantile,
)

__all__ = [
    "AR",
    "PCR",
    "FAMILIES",
    "ReliabilityTarget",
    "SelectorSpec",
    "epsn_rayleigh_ar",
    "epsn_rayleigh_pcr",
    "epsn_powerlaw",
    "nonparam_l_ar",
    "nonparam_l_pcr",
    "plug_in_nonparam_index",
    "rate_rayleigh",
    "rate_nonparam",
    "rate_powerlaw",
    "make_rate_fn",
    "select_rate",
]

AR = "ar"
PCR = "pcr"

FAMILY_RAYLEIGH = "rayleigh"
FAMILY_NONPARAMETRIC = "nonparametric"
FAMILY_POWERLAW_ASYM = "powerlaw-asym"
FAMILY_POWERLAW_NONASYM = "powerlaw-nonasym"
FAMILY_PLUGIN_RAYLEIGH = "plugin-rayleigh"
FAMILY_PLUGIN_NONPARAMETRIC = "plugin-nonparametric"

FAMILIES = (
    FAMILY_RAYLEIGH,
    FAMILY_NONPARAMETRIC,
    FAMILY_POWERLAW_ASYM,
    FAMILY_POWERLAW_NONASYM,
    FAMILY_PLUGIN_RAYLEIGH,
    FAMILY_PLUGIN_NONPARAMETRIC,
)

_POWERLAW_FAMILIES = (FAMILY_POWERLAW_ASYM, FAMILY_POWERLAW_NONASYM)

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class ReliabilityTarget:
    """Outage target eps under AR or PCR(xi) semantics."""

    epsilon: float
    kind: str = AR
    xi: float | None = None

    def __post_init__(self):
        if not (0.0 < self.epsilon < 1.0):
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")
        if self.kind not in (AR, PCR):
            raise ValueError(f"kind must be '{AR}' or '{PCR}', got {self.kind!r}")
        if self.kind == PCR:
            if self.xi is None:
                raise ValueError("PCR target requires a confidence level xi")
            if not (0.0 < self.xi < 1.0):
                raise ValueError(f"xi must be in (0, 1), got {self.xi}")
        elif self.xi is not None:
            raise ValueError("xi is only meaningful for a PCR target")


@dataclass(frozen=True)
class SelectorSpec:
    """A selector family plus its tail fraction where applicable."""

    family: str
    beta: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(
                f"unknown selector family {self.family!r}; expected one of {FAMILIES}")
        if self.family in _POWERLAW_FAMILIES:
            if self.beta is None:
                raise ValueError(f"{self.family} requires a tail fraction beta")
            if not (0.0 < self.beta < 1.0):
                raise ValueError(f"beta must be in (0, 1), got {self.beta}")
        elif self.beta is not None:
            raise ValueError(f"beta is only meaningful for power-law selectors")


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not (0.0 < eps < 1.0):
        raise ValueError(f"eps must be in (0, 1), got {eps}")
    return eps


def _check_xi(xi: float) -> float:
    xi = float(xi)
    if not (0.0 < xi < 1.0):
        raise ValueError(f"xi must be in (0, 1), got {xi}")
    return xi


def _check_n(n: int) -> int:
    if n != int(n) or int(n) < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    return int(n)


def epsn_rayleigh_ar(eps: float, n: int) -> float:
    """Backed-off quantile level making the Rayleigh-MLE rate meet AR.

    eps_n = 1 - exp(-n((1-eps)^(-1/n) - 1)); independent of the scale
    lam, and the resulting mean outage equals eps exactly.
    """
    eps = _check_eps(eps)
    n = _check_n(n)
    growth = math.expm1(-math.log1p(-eps) / n)  # (1-eps)^(-1/n) - 1
    return -math.expm1(-n * growth)


def epsn_rayleigh_pcr(eps: float, xi: float, n: int,
                      acc: specfun.AccuracySpec | None = None) -> float:
    """Backed-off quantile level making the Rayleigh-MLE rate meet PCR.

    The meta-probability of the Rayleigh-MLE rate is the Erlang-n tail
    1 - P(n, n log(1-eps)/log(1-eps_n)), strictly increasing in eps_n,
    so the unique root of (meta = xi) is obtained by sending the
    threshold through the bracketed incomplete-gamma quantile:
    T = P^-1(n, 1-xi), eps_n = 1 - (1-eps)^(n/T). Like the AR level,
    the result does not depend on lam.
    """
    eps = _check_eps(eps)
    xi = _check_xi(xi)
    n = _check_n(n)
    t_star = specfun.inv_reg_lower_gamma(float(n), 1.0 - xi, acc)
    if t_star <= 0.0:
        raise NoSolutionError(f"degenerate Erlang quantile for n={n}, xi={xi}")
    return -math.expm1(n * math.log1p(-eps) / t_star)


def nonparam_l_ar(eps: float, n: int) -> int:
    """Largest order-statistic index meeting AR: floor(eps*(n+1)).

    The l-th smallest of n samples has mean outage l/(n+1) regardless
    of the continuous channel law. Returns 0 when no index is feasible
    (the zero-rate regime n < 1/eps - 1).
    """
    eps = _check_eps(eps)
    n = _check_n(n)
    return min(_floor_with_float_guard(eps * (n + 1)), n)


def nonparam_l_pcr(eps: float, xi: float, n: int) -> int:
    """Largest order-statistic index meeting PCR(xi).

    The outage of the l-th smallest sample is Beta(l, n+1-l)
    distributed, so feasibility reads 1 - I_eps(l, n+1-l) <= xi; the
    left side increases with l and the largest feasible l is found by
    integer bisection. Returns 0 when even l = 1 is infeasible.
    """
    eps = _check_eps(eps)
    xi = _check_xi(xi)
    n = _check_n(n)

    def feasible(l: int) -> bool:
        return 1.0 - specfun.reg_inc_beta(float(l), float(n + 1 - l), eps) <= xi

    lo, hi = 0, n
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if feasible(mid):
            lo = mid
        else:
            hi = mid - 1
    return lo


def plug_in_nonparam_index(eps: float, n: int) -> int:
    """Uncalibrated empirical-quantile index floor(n*eps + 1), capped at n."""
    eps = _check_eps(eps)
    n = _check_n(n)
    return min(_floor_with_float_guard(n * eps + 1.0), n)


def _vbar(eps: float, beta: float) -> float:
    # normalized asymptotic variance of the fitted tail quantile
    log_ratio = math.log(eps / beta)
    return (1.0 - beta + log_ratio * log_ratio) / beta


def _nonasym_bound_min(log_ratio: float, l: int, n: int, eps: float,
                       tau_grid: np.ndarray, inc_beta_grid: np.ndarray) -> float:
    """min over tau in [eps, 1] of the finite-sample meta-probability bound.

    Splitting {Z_(l) + (log(n eps_n / l)/l) S > F_Z^-1(eps)} at
    Z_(l) = log tau-quantile gives, for each tau,

        P[Z_(l) > t] + P[S < l log(eps/tau) / log(n eps_n / l)]
        = 1 - I_tau(l, n+1-l) + P(l-1, l log(eps/tau) / log_ratio)

    (the S-term inequality flips because log(n eps_n / l) < 0). Both
    summands move oppositely in tau, so the minimum is interior; it is
    located on a dense log-spaced grid and refined by bounded Brent.
    """
    log_eps = math.log(eps)
    log_tau = np.log(tau_grid)
    with np.errstate(over="ignore"):
        args = l * (log_eps - log_tau) / log_ratio
    erlang_cdf = _sp.gammainc(l - 1.0, args)
    vals = 1.0 - inc_beta_grid + erlang_cdf
    j = int(np.argmin(vals))

    def objective(lt: float) -> float:
        tau = math.exp(lt)
        a = l * (log_eps - lt) / log_ratio
        return (1.0 - specfun.reg_inc_beta(float(l), float(n + 1 - l), tau)
                + specfun.reg_lower_gamma(l - 1.0, a))

    lo = float(log_tau[max(j - 1, 0)])
    hi = float(log_tau[min(j + 1, log_tau.size - 1)])
    if hi - lo < 1e-12:
        return float(vals[j])
    res = _opt.minimize_scalar(objective, bounds=(lo, hi), method="bounded",
                               options={"xatol": 1e-10})
    return min(float(vals[j]), float(res.fun))


def epsn_powerlaw(target: ReliabilityTarget, n: int, beta: float,
                  mode: str = "asymptotic") -> float:
    """Quantile level for the power-law tail selector.

    Asymptotic mode: under AR the fitted quantile is asymptotically
    unbiased, so eps_n = eps; under PCR the fitted log-quantile is
    asymptotically normal with variance kappa^2 Vbar / n,
    Vbar = (1 - beta + log^2(eps/beta)) / beta, giving
    eps_n = eps * exp(-sqrt(Vbar/n) * Qinv(xi)).

    Non-asymptotic mode (PCR only, needs ceil(beta*n) >= 3): eps_n is
    the level at which the finite-sample union bound on the
    meta-probability equals xi. The bound is monotone increasing in
    eps_n on (0, l/n), so the root is bracketed on log(n eps_n / l).
    """
    if not isinstance(target, ReliabilityTarget):
        raise TypeError("target must be a ReliabilityTarget")
    n = _check_n(n)
    if not (0.0 < beta < 1.0):
        raise ValueError(f"beta must be in (0, 1), got {beta}")
    if mode not in ("asymptotic", "non-asymptotic"):
        raise ValueError(f"mode must be 'asymptotic' or 'non-asymptotic', got {mode!r}")
    eps = target.epsilon

    if mode == "asymptotic":
        if target.kind == AR:
            return eps
        vbar = _vbar(eps, beta)
        shift = math.sqrt(vbar / n) * specfun.std_normal_quantile(target.xi)
        return eps * math.exp(-shift)

    if target.kind != PCR:
        raise ValueError("the non-asymptotic calibration is defined for PCR targets only")
    l = _ceil_with_float_guard(beta * n)
    if l < 2:
        raise InsufficientTailDataError(
            f"non-asymptotic calibration needs ceil(beta*n) >= 2, got l={l}")
    if l == 2:
        warnings.warn(
            "ceil(beta*n) = 2: the finite-sample bound needs l >= 3; "
            "falling back to the asymptotic PCR level", RuntimeWarning,
            stacklevel=2)
        return epsn_powerlaw(target, n, beta, mode="asymptotic")
    xi = target.xi

    grid_size = 512
    tau_grid = np.exp(np.linspace(math.log(eps), 0.0, grid_size))
    tau_grid[-1] = 1.0
    inc_beta_grid = _sp.betainc(float(l), float(n + 1 - l), tau_grid)

    def bound(log_ratio: float) -> float:
        return _nonasym_bound_min(log_ratio, l, n, eps, tau_grid, inc_beta_grid)

    hi = -1e-10
    b_hi = bound(hi)
    if b_hi <= xi:
        warnings.warn(
            f"the finite-sample bound stays below xi={xi} for every "
            f"eps_n < l/n (supremum {b_hi:.3e}); returning the upper end "
            "of the admissible range", RuntimeWarning, stacklevel=2)
        return (l / n) * math.exp(hi)
    lo = -1.0
    for _ in range(60):
        if bound(lo) < xi:
            break
        lo *= 2.0
    else:
        raise NoSolutionError(
            f"finite-sample bound exceeds xi={xi} over the whole range; "
            f"smallest achievable bound {bound(lo):.6e}")
    root = _opt.brentq(lambda u: bound(u) - xi, lo, hi, xtol=1e-12, rtol=8.9e-16)
    return (l / n) * math.exp(float(root))


def rate_rayleigh(sample: TrainingSample, eps_n: float) -> float:
    """Rayleigh-MLE rate log2(1 - log(1-eps_n) * mean(sample))."""
    eps_n = _check_eps(eps_n)
    return math.log1p(-math.log1p(-eps_n) * sample.mean()) / _LN2


def rate_nonparam(sample: TrainingSample, l: int) -> float:
    """Order-statistic rate log2(1 + x_(l)) for 1 <= l <= n."""
    if not (1 <= l <= sample.n):
        raise IndexError(f"order-statistic index {l} outside [1, {sample.n}]")
    return math.log1p(sample.order_stat(l)) / _LN2


def rate_powerlaw(fit: TailFit, eps_n: float) -> float:
    """Tail-extrapolated rate log2(1 + exp(fitted log-quantile))."""
    return math.log1p(math.exp(tail_quantile(fit, eps_n))) / _LN2


def make_rate_fn(selector: SelectorSpec, target: ReliabilityTarget, n: int):
    """Pre-calibrate a selector for sample size n.

    Returns a function TrainingSample -> rate. All constraint solving
    happens here, once; the returned function only touches the sample.
    """
    if not isinstance(selector, SelectorSpec):
        raise TypeError("selector must be a SelectorSpec")
    if not isinstance(target, ReliabilityTarget):
        raise TypeError("target must be a ReliabilityTarget")
    n = _check_n(n)
    fam = selector.family

    if fam == FAMILY_RAYLEIGH:
        if target.kind == AR:
            eps_n = epsn_rayleigh_ar(target.epsilon, n)
        else:
            eps_n = epsn_rayleigh_pcr(target.epsilon, target.xi, n)
        return lambda s: rate_rayleigh(s, eps_n)

    if fam == FAMILY_NONPARAMETRIC:
        if target.kind == AR:
            l = nonparam_l_ar(target.epsilon, n)
        else:
            l = nonparam_l_pcr(target.epsilon, target.xi, n)
        if l == 0:
            return lambda s: 0.0
        return lambda s: rate_nonparam(s, l)

    if fam in _POWERLAW_FAMILIES:
        mode = "asymptotic" if fam == FAMILY_POWERLAW_ASYM else "non-asymptotic"
        eps_n = epsn_powerlaw(target, n, selector.beta, mode=mode)
        beta = selector.beta
        return lambda s: rate_powerlaw(fit_power_tail(s, beta), eps_n)

    if fam == FAMILY_PLUGIN_RAYLEIGH:
        eps = target.epsilon
        return lambda s: rate_rayleigh(s, eps)

    if fam == FAMILY_PLUGIN_NONPARAMETRIC:
        l = plug_in_nonparam_index(target.epsilon, n)
        return lambda s: rate_nonparam(s, l)

    raise AssertionError(f"unhandled family {fam!r}")


def select_rate(selector: SelectorSpec, target: ReliabilityTarget,
                sample: TrainingSample) -> float:
    """Select a rate for one training sample."""
    return make_rate_fn(selector, target, sample.n)(sample)
