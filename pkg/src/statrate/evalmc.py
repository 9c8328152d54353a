"""Monte Carlo evaluation of rate selectors over training-sample draws.

Each trial draws one training sample from the true channel, runs the
selector, and records the selected rate together with its conditional
outage probability q = F(2^R - 1). Conditioning on the sample makes q
an exact CDF evaluation, so no test-channel transmissions are
simulated; the only Monte Carlo noise left is the training randomness.

Reported quantities per configuration:

    mean outage        E[q]           (normal CI)
    meta-probability   P[q > eps]     (Wilson CI)
    throughput ratio   E[R (1-q)] / (R_eps (1-eps))   (normal CI)

Trials use counter-based Philox streams keyed by (seed, axis index,
trial), so every trial is reproducible in isolation and sweep results
are bitwise identical for any worker count.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import specfun
from .channels import ChannelModel, Nakagami, Rician
from .learn import TrainingSample
from .rateselect import PCR, ReliabilityTarget, SelectorSpec, make_rate_fn

__all__ = [
    "SWEEP_AXES",
    "Estimate",
    "EvalConfig",
    "EvalReport",
    "evaluate",
    "sweep",
]

logger = logging.getLogger(__name__)

SWEEP_AXES = ("n", "k", "m", "epsilon", "xi", "beta")

_LN2 = math.log(2.0)
_Z95 = abs(specfun.std_normal_quantile(0.025))


@dataclass(frozen=True)
class Estimate:
    """Point estimate with a two-sided 95% confidence interval."""

    value: float
    ci_lo: float
    ci_hi: float


@dataclass(frozen=True)
class EvalConfig:
    """One evaluation point: channel, selector, target and MC budget."""

    true_model: ChannelModel
    selector: SelectorSpec
    target: ReliabilityTarget
    n: int
    trials: int
    seed: int

    def __post_init__(self):
        if not isinstance(self.true_model, ChannelModel):
            raise TypeError("true_model must be a ChannelModel")
        if not isinstance(self.selector, SelectorSpec):
            raise TypeError("selector must be a SelectorSpec")
        if not isinstance(self.target, ReliabilityTarget):
            raise TypeError("target must be a ReliabilityTarget")
        if self.n != int(self.n) or int(self.n) < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if self.trials != int(self.trials) or not (1 <= int(self.trials) < 2**32):
            raise ValueError(f"trials must be in [1, 2^32), got {self.trials}")
        if self.seed != int(self.seed) or not (0 <= int(self.seed) < 2**63):
            raise ValueError(f"seed must be in [0, 2^63), got {self.seed}")


@dataclass(frozen=True)
class EvalReport:
    """Aggregated Monte Carlo results for one EvalConfig."""

    mean_outage: Estimate
    meta_prob: Estimate
    throughput_ratio: Estimate
    rate_mean: float
    rate_stddev: float
    zero_rate_fraction: float
    trials: int
    seed: int


def _substream(seed: int, axis_index: int, trial: int) -> np.random.Generator:
    # one independent Philox stream per (seed, axis point, trial)
    key = np.array([seed, (axis_index << 32) | trial], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _normal_ci(values: np.ndarray, lo_clip: float, hi_clip: float) -> Estimate:
    t = values.size
    mean = float(values.mean())
    sd = float(values.std(ddof=1)) if t > 1 else 0.0
    half = _Z95 * sd / math.sqrt(t)
    return Estimate(mean, max(mean - half, lo_clip), min(mean + half, hi_clip))


def _wilson_ci(successes: int, t: int) -> Estimate:
    p = successes / t
    z2 = _Z95 * _Z95
    denom = 1.0 + z2 / t
    center = (p + z2 / (2.0 * t)) / denom
    half = (_Z95 / denom) * math.sqrt(p * (1.0 - p) / t + z2 / (4.0 * t * t))
    return Estimate(p, max(center - half, 0.0), min(center + half, 1.0))


def evaluate(config: EvalConfig, axis_index: int = 0, rate_fn=None) -> EvalReport:
    """Run the Monte Carlo loop for one configuration.

    axis_index offsets the trial streams so distinct sweep points never
    share randomness; rate_fn overrides the selector's rate function
    (sample -> rate), which is otherwise pre-calibrated once via
    make_rate_fn.
    """
    if not isinstance(config, EvalConfig):
        raise TypeError("config must be an EvalConfig")
    if not (0 <= int(axis_index) < 2**32):
        raise ValueError(f"axis_index must be in [0, 2^32), got {axis_index}")
    if rate_fn is None:
        rate_fn = make_rate_fn(config.selector, config.target, config.n)

    model = config.true_model
    eps = config.target.epsilon
    trials = int(config.trials)
    rates = np.empty(trials)
    outages = np.empty(trials)
    for t in range(trials):
        rng = _substream(config.seed, int(axis_index), t)
        sample = TrainingSample(model.sample(rng, config.n))
        r = rate_fn(sample)
        rates[t] = r
        # conditional outage is an exact CDF value, not a simulated rate
        outages[t] = model.cdf(math.expm1(r * _LN2)) if r > 0.0 else 0.0

    r_eps = model.epsilon_outage_capacity(eps)
    denom = r_eps * (1.0 - eps)
    if denom > 0.0:
        throughput = _normal_ci(rates * (1.0 - outages) / denom, 0.0, math.inf)
    else:
        throughput = Estimate(math.nan, math.nan, math.nan)

    return EvalReport(
        mean_outage=_normal_ci(outages, 0.0, 1.0),
        meta_prob=_wilson_ci(int(np.count_nonzero(outages > eps)), trials),
        throughput_ratio=throughput,
        rate_mean=float(rates.mean()),
        rate_stddev=float(rates.std(ddof=1)) if trials > 1 else 0.0,
        zero_rate_fraction=float(np.count_nonzero(rates == 0.0)) / trials,
        trials=trials,
        seed=config.seed,
    )


def _apply_axis(base: EvalConfig, axis: str, value) -> EvalConfig:
    if axis == "n":
        iv = int(value)
        if iv != value:
            raise ValueError(f"axis 'n' requires integer values, got {value}")
        return replace(base, n=iv)
    if axis == "epsilon":
        return replace(base, target=replace(base.target, epsilon=float(value)))
    if axis == "xi":
        if base.target.kind != PCR:
            raise ValueError("axis 'xi' requires a PCR target")
        return replace(base, target=replace(base.target, xi=float(value)))
    if axis == "beta":
        return replace(base, selector=replace(base.selector, beta=float(value)))
    if axis == "k":
        return replace(base, true_model=Rician(lam=base.true_model.lam, k=float(value)))
    if axis == "m":
        return replace(base, true_model=Nakagami(lam=base.true_model.lam, m=float(value)))
    raise ValueError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")


def _sweep_point(task) -> EvalReport:
    base, axis, value, idx = task
    return evaluate(_apply_axis(base, axis, value), axis_index=idx)


def sweep(base: EvalConfig, axis: str, values,
          workers: int = 1) -> list[tuple[float, EvalReport]]:
    """Evaluate base along one axis; (value, report) pairs in axis order.

    Axis streams are keyed by position, so results do not depend on
    workers; with workers > 1 the points run in separate processes.
    """
    if axis not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one axis value")
    if workers != int(workers) or int(workers) < 1:
        raise ValueError(f"workers must be a positive integer, got {workers}")
    tasks = [(base, axis, v, i) for i, v in enumerate(values)]

    results: list[tuple[float, EvalReport]] = []
    if int(workers) == 1:
        for task in tasks:
            results.append((task[2], _sweep_point(task)))
            logger.info("sweep %s=%s done (%d/%d)", axis, task[2],
                        len(results), len(tasks))
        return results
    with ProcessPoolExecutor(max_workers=int(workers)) as pool:
        for i, report in enumerate(pool.map(_sweep_point, tasks)):
            results.append((values[i], report))
            logger.info("sweep %s=%s done (%d/%d)", axis, values[i],
                        i + 1, len(tasks))
    return results
