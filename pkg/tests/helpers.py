"""Shared stream generators and procedure builders for the test suite."""

import numpy as np

import scorefdr as sf

GAMMA = sf.Schedule.geometric(0.5)
OMEGA = sf.Schedule.constant(0.05)
LAMBDA = sf.Schedule.constant(0.5)

E_PROCEDURE_IDS = tuple(pid for pid in sf.PROCEDURE_IDS if not pid.startswith("p-"))
P_PROCEDURE_IDS = tuple(pid for pid in sf.PROCEDURE_IDS if pid.startswith("p-"))


def build(pid, alpha=0.05, omega=OMEGA, lam=LAMBDA, gamma=GAMMA):
    return sf.make_procedure(pid, alpha=alpha, gamma=gamma, omega=omega, lam=lam)


def random_e_stream(rng, n, spike_prob=0.10):
    """Mostly null-like e-values with occasional strong spikes.

    Spikes max out near exp(14) ~ 1.2e6, large enough to trigger rejections
    and overshoots at typical budgets yet small enough that absolute
    comparisons between engines stay meaningful.
    """
    e = np.exp(rng.standard_normal(n) - 0.5)
    spikes = rng.random(n) < spike_prob
    e[spikes] = np.exp(4.0 + 2.0 * np.abs(rng.standard_normal(int(spikes.sum()))))
    return e


def random_p_stream(rng, n, alt_prob=0.3):
    """Uniform nulls mixed with heavily right-skewed alternative p-values."""
    p = rng.random(n)
    alt = rng.random(n) < alt_prob
    p[alt] = p[alt] ** 12
    return np.maximum(p, 1e-300)


def evidence_for(pid, rng, n):
    return random_p_stream(rng, n) if pid.startswith("p-") else random_e_stream(rng, n)
