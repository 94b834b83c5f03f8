"""Synthetic data-generating processes, trajectory metrics, and the
Monte-Carlo replication runner.

Reproducibility
---------------
Streams are driven by numpy's PCG64 generator.  Each replicate r of a run
seeded with ``base_seed`` uses its own ``PCG64(base_seed + r)``, and every
random quantity is derived from uniform draws pushed through inverse CDFs
(``ndtri`` for normals, ``-log1p(-u) / rate`` for exponentials) in the fixed
order documented on each generator.  Replicates are aggregated in replicate
order regardless of the execution schedule, so reports are bit-identical
across runs and thread counts.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .calibration import (
    LikelihoodRatioSpec,
    ar1_conditional_pvalue,
    ar1_marginal_pvalue,
    lr_evalue,
    normal_ppf,
)
from .procedures import OnlineProcedure, Trajectory

DGP_NAMES = ("gaussian_mixture", "ar_exponential", "ar1_gaussian")

#: Environment variable holding the default worker count for replicate().
THREADS_ENV_VAR = "SCOREFDR_THREADS"


@dataclass(frozen=True)
class DgpConfig:
    """Configuration of one synthetic stream.

    Only the fields relevant to the chosen ``dgp`` are used: ``rho`` and
    ``mu_set`` drive the autoregressive exponential model, ``phi0`` / ``phi1``
    the autoregressive Gaussian model.
    """

    dgp: str
    horizon: int = 1000
    pi1: float = 0.3
    rho: float = 0.5
    mu_set: tuple[float, ...] = (3.0, 20.0)
    phi0: float = 0.5
    phi1: float = 3.0
    seed: int = 0

    def __post_init__(self):
        if self.dgp not in DGP_NAMES:
            raise ValueError(f"dgp must be one of {DGP_NAMES}, got {self.dgp!r}")
        if self.horizon < 1 or self.horizon != int(self.horizon):
            raise ValueError(f"horizon must be a positive integer, got {self.horizon!r}")
        if not (0.0 <= self.pi1 <= 1.0):
            raise ValueError(f"pi1 must lie in [0, 1], got {self.pi1!r}")
        if self.seed < 0 or self.seed != int(self.seed):
            raise ValueError(f"seed must be a non-negative integer, got {self.seed!r}")
        if self.dgp == "ar_exponential":
            if self.rho < 0.0:
                raise ValueError("rho must be non-negative (the rate 1 + rho*x must stay positive)")
            if not self.mu_set or any(m <= 1.0 for m in self.mu_set):
                raise ValueError("mu_set entries must exceed 1")
        if self.dgp == "ar1_gaussian" and not (abs(self.phi0) < 1.0):
            raise ValueError("ar1_gaussian needs |phi0| < 1 for a stationary null")


@dataclass(frozen=True)
class GeneratedStream:
    """One simulated stream with ground truth and attached evidence.

    ``evalue`` is always present; the conditional and marginal p-value
    streams exist only for the autoregressive Gaussian model.
    """

    x: np.ndarray
    truth: np.ndarray
    evalue: np.ndarray
    p_conditional: np.ndarray | None = None
    p_marginal: np.ndarray | None = None
    x0: float = 0.0

    def evidence(self, which: str) -> np.ndarray:
        """Evidence array by name: ``e``, ``p_conditional``, or ``p_marginal``."""
        chosen = {
            "e": self.evalue,
            "p_conditional": self.p_conditional,
            "p_marginal": self.p_marginal,
        }.get(which)
        if chosen is None:
            raise ValueError(f"this stream carries no {which!r} evidence")
        return chosen


@dataclass(frozen=True)
class MetricsReport:
    """FDR and average-power curves aggregated across replicates."""

    checkpoints: np.ndarray
    fdr: np.ndarray
    fdr_se: np.ndarray
    power: np.ndarray
    power_se: np.ndarray
    n_reps: int
    dgp: DgpConfig | None
    procedure_id: str
    procedure_params: dict = field(default_factory=dict)
    evidence: str = "e"


def _uniforms(rng: np.random.Generator, size: int) -> np.ndarray:
    # rng.random() can return exactly 0.0; nudge those onto (0, 1) so the
    # inverse normal CDF stays finite.
    u = rng.random(size)
    return np.maximum(u, 5e-324)


def _std_normals(rng: np.random.Generator, size: int) -> np.ndarray:
    return normal_ppf(_uniforms(rng, size))


def generate(config: DgpConfig) -> GeneratedStream:
    """Simulate one stream; deterministic given ``config.seed``.

    Draw order (all from PCG64(seed), inverse-CDF transformed):

    * gaussian_mixture: truth uniforms, signal-mean normals, observation
      normals.  Observation is signal mean plus unit noise; the e-value is
      the marginal likelihood ratio of N(3, 6) against N(0, 1).
    * ar_exponential: truth uniforms, signal-size uniforms, observation
      uniforms.  Rate ``eta_t = 1 + rho * x_{t-1}`` (x_0 = 0); nulls draw
      Exp(eta_t), alternatives Exp(eta_t / mu_t) with mu_t uniform over
      ``mu_set``.  The attached e-value always uses the scale-3 working
      alternative, deliberately ignoring the drawn signal size.
    * ar1_gaussian: initial-point uniform, truth uniforms, innovation
      normals.  ``x_t = phi_t x_{t-1} + eps_t`` from the stationary null
      start N(0, 1/(1-phi0^2)); carries the conditional-likelihood e-value
      plus conditional and marginal p-values.
    """
    rng = np.random.Generator(np.random.PCG64(config.seed))
    T = int(config.horizon)

    if config.dgp == "gaussian_mixture":
        theta = _uniforms(rng, T) < config.pi1
        mu = np.where(theta, 3.0 + math.sqrt(5.0) * _std_normals(rng, T), 0.0)
        x = mu + _std_normals(rng, T)
        spec = LikelihoodRatioSpec("gaussian_pair", null_mean=0.0, null_var=1.0,
                                   alt_mean=3.0, alt_var=6.0)
        return GeneratedStream(x=x, truth=theta, evalue=lr_evalue(spec, x), x0=math.nan)

    if config.dgp == "ar_exponential":
        theta = _uniforms(rng, T) < config.pi1
        mu_choices = np.asarray(config.mu_set, dtype=float)
        mu_idx = np.minimum((rng.random(T) * len(mu_choices)).astype(int), len(mu_choices) - 1)
        mu = mu_choices[mu_idx]
        u_x = _uniforms(rng, T)
        x = np.empty(T)
        eta = np.empty(T)
        x_prev = 0.0
        for t in range(T):
            rate = 1.0 + config.rho * x_prev
            if rate <= 0.0:
                raise ValueError(f"non-positive rate {rate} at step {t + 1}")
            eta[t] = rate
            if theta[t]:
                rate = rate / mu[t]
            x_prev = -math.log1p(-u_x[t]) / rate
            x[t] = x_prev
        spec = LikelihoodRatioSpec("exponential_scale", scale=3.0)
        return GeneratedStream(x=x, truth=theta, evalue=lr_evalue(spec, x, context=eta))

    # ar1_gaussian
    init_sd = math.sqrt(1.0 / (1.0 - config.phi0**2))
    x0 = init_sd * float(normal_ppf(_uniforms(rng, 1)[0]))
    theta = _uniforms(rng, T) < config.pi1
    eps = _std_normals(rng, T)
    phi = np.where(theta, config.phi1, config.phi0)
    x = np.empty(T)
    x_prev = x0
    for t in range(T):
        x_prev = phi[t] * x_prev + eps[t]
        x[t] = x_prev
    lagged = np.concatenate(([x0], x[:-1]))
    spec = LikelihoodRatioSpec("ar1_gaussian", phi0=config.phi0, phi1=config.phi1)
    return GeneratedStream(
        x=x,
        truth=theta,
        evalue=lr_evalue(spec, x, context=lagged),
        p_conditional=ar1_conditional_pvalue(x, lagged, config.phi0),
        p_marginal=ar1_marginal_pvalue(x, null_var=1.0 / (1.0 - config.phi0**2)),
        x0=x0,
    )


def evaluate(trajectory: Trajectory) -> tuple[np.ndarray, np.ndarray]:
    """Per-step FDP and average-power curves of a labelled trajectory.

    ``fdp(t)`` divides false rejections by ``max(R_t, 1)``.  ``power(t)``
    divides true rejections by the number of non-nulls seen so far, and is
    zero by convention while no non-null has appeared.
    """
    if trajectory.truth is None:
        raise ValueError("trajectory carries no ground-truth labels")
    decision = trajectory.decision
    truth = trajectory.truth
    rejections = np.cumsum(decision)
    false_rej = np.cumsum(decision & ~truth)
    true_rej = np.cumsum(decision & truth)
    alternatives = np.cumsum(truth)
    fdp = false_rej / np.maximum(rejections, 1)
    power = true_rej / np.maximum(alternatives, 1)
    return fdp, power


def default_checkpoints(horizon: int, max_points: int = 1000) -> np.ndarray:
    """Every step up to 1000 steps; a uniform stride beyond that."""
    if horizon <= max_points:
        return np.arange(1, horizon + 1)
    stride = math.ceil(horizon / max_points)
    points = np.arange(stride, horizon + 1, stride)
    if points[-1] != horizon:
        points = np.append(points, horizon)
    return points


def _one_replicate(dgp: DgpConfig, procedure: OnlineProcedure, evidence: str,
                   idx: np.ndarray):
    stream = generate(dgp)
    proc = procedure.clone()
    proc.fit(stream.evidence(evidence), stream.truth)
    fdp, power = evaluate(proc.trajectory())
    return fdp[idx], power[idx]


def resolve_evidence(procedure: OnlineProcedure, evidence: str = "auto") -> str:
    if evidence != "auto":
        return evidence
    return "e" if procedure.evidence_kind == "e" else "p_conditional"


def replicate(
    dgp: DgpConfig,
    procedure: OnlineProcedure,
    n_reps: int,
    base_seed: int = 0,
    checkpoints=None,
    evidence: str = "auto",
    n_threads: int | None = None,
) -> MetricsReport:
    """Monte-Carlo study: run ``n_reps`` independent streams and aggregate.

    Replicate r uses seed ``base_seed + r``.  Means and standard errors
    (sample sd over sqrt(n)) of FDP and average power are reported at the
    requested checkpoints.  ``n_threads`` defaults to the SCOREFDR_THREADS
    environment variable (or 1); the result does not depend on it.
    """
    if n_reps < 1:
        raise ValueError("n_reps must be at least 1")
    evidence = resolve_evidence(procedure, evidence)
    if checkpoints is None:
        checkpoints = default_checkpoints(dgp.horizon)
    checkpoints = np.asarray(checkpoints, dtype=int)
    if checkpoints.size == 0 or checkpoints.min() < 1 or checkpoints.max() > dgp.horizon:
        raise ValueError("checkpoints must be indices in [1, horizon]")
    if np.any(np.diff(checkpoints) <= 0):
        raise ValueError("checkpoints must be strictly increasing")
    idx = checkpoints - 1

    if n_threads is None:
        n_threads = int(os.environ.get(THREADS_ENV_VAR, "1") or "1")

    configs = [replace(dgp, seed=base_seed + r) for r in range(n_reps)]
    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            results = list(
                pool.map(lambda cfg: _one_replicate(cfg, procedure, evidence, idx), configs)
            )
    else:
        results = [_one_replicate(cfg, procedure, evidence, idx) for cfg in configs]

    # Fixed-order aggregation keeps the report bit-identical across schedules.
    k = len(idx)
    fdp_sum = np.zeros(k)
    fdp_sq = np.zeros(k)
    pow_sum = np.zeros(k)
    pow_sq = np.zeros(k)
    for fdp, power in results:
        fdp_sum += fdp
        fdp_sq += fdp * fdp
        pow_sum += power
        pow_sq += power * power

    n = float(n_reps)
    fdr = fdp_sum / n
    power_mean = pow_sum / n
    if n_reps > 1:
        fdr_var = np.maximum(fdp_sq - n * fdr * fdr, 0.0) / (n - 1.0)
        pow_var = np.maximum(pow_sq - n * power_mean * power_mean, 0.0) / (n - 1.0)
        fdr_se = np.sqrt(fdr_var / n)
        power_se = np.sqrt(pow_var / n)
    else:
        fdr_se = np.zeros(k)
        power_se = np.zeros(k)

    return MetricsReport(
        checkpoints=checkpoints,
        fdr=fdr,
        fdr_se=fdr_se,
        power=power_mean,
        power_se=power_se,
        n_reps=n_reps,
        dgp=dgp,
        procedure_id=procedure.procedure_id,
        procedure_params={k: repr(v) for k, v in procedure.get_params().items()},
        evidence=evidence,
    )
