"""Sequential testing procedures with a shared estimator-style interface.

Every procedure is a single-stream state machine: given evidence for
hypothesis t it picks a budget ``alpha_t`` from its history, decides, charges
a cost against the error budget, and (for the refunding variants) earns back
the overshoot.  The families differ in three orthogonal choices:

* how the budget is allocated (LOND's fixed sequence, LORD's wealth
  recycling, SAFFRON's candidate screening),
* whether the charged cost is refund-adjusted (``score-*``) or raw (``e-*``),
* whether past charges are fixed at decision time (local denominator
  ``R_{j-1} + 1``) or retroactively rescaled by the current discovery count
  (global denominator ``R_t v 1``, the ``score-plus-*`` and ``p-lord`` /
  ``p-saffron`` variants).

The classes follow the familiar estimator protocol: construct with
parameters, ``fit(X)`` on a full evidence array (or ``partial_fit`` to
stream), then read per-step results from trailing-underscore attributes.
``get_params`` / ``set_params`` make them compose with standard tooling.
"""

from __future__ import annotations

import inspect
import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._validation import check_evidence_array, check_open_unit, check_truth_array
from .core import Observation, StepRecord
from .schedules import (
    DEFAULT_GAMMA,
    DEFAULT_LAMBDA,
    DEFAULT_OMEGA,
    Schedule,
    compile_schedule,
)

#: Tolerance below which a wealth value is treated as an implementation bug
#: rather than rounding noise; the update rules guarantee non-negativity.
WEALTH_UNDERFLOW_TOL = -1e-12


class StepResult(NamedTuple):
    """Outcome of one step: the audit record plus the running FDP estimate."""

    record: StepRecord
    fdp_hat: float


@dataclass
class Trajectory:
    """Per-step outputs of one full run, as aligned arrays.

    ``rejections`` is the cumulative count R_t.  ``wealth`` holds the budget
    remaining after each step for wealth-tracking procedures and NaN for the
    LOND family.  ``truth`` is present only when ground-truth labels were
    supplied.
    """

    alpha: np.ndarray
    decision: np.ndarray
    overshoot: np.ndarray
    cost: np.ndarray
    rejections: np.ndarray
    fdp_hat: np.ndarray
    wealth: np.ndarray
    truth: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.alpha)

    @property
    def n_rejections(self) -> int:
        return int(self.rejections[-1]) if len(self.alpha) else 0


def saffron_cost(alpha_t: float, lambda_t: float, e_t: float, variant: str = "score") -> float:
    """Candidate-screening cost for one step of a SAFFRON-type rule.

    The ``baseline`` variant charges ``alpha_t / (1 - lambda_t)`` exactly when
    the evidence misses the candidate threshold (``e_t < 1 / lambda_t``) and
    nothing otherwise.  The ``score`` variant replaces the indicator with the
    continuous penalty ``alpha_t * (1 - lambda_t * e_t) / (1 - lambda_t)`` and
    additionally refunds the rejection overshoot, clamped at zero.  The score
    cost never exceeds the baseline cost.
    """
    lambda_t = check_open_unit(lambda_t, "lambda_t")
    if e_t < 0.0:
        raise ValueError("e_t must be non-negative")
    if variant == "baseline":
        if e_t < 1.0 / lambda_t:
            return alpha_t / (1.0 - lambda_t)
        return 0.0
    if variant == "score":
        over = max(alpha_t * e_t - 1.0, 0.0)
        inner = alpha_t * (1.0 - lambda_t * e_t) / (1.0 - lambda_t) - over
        return inner if inner > 0.0 else 0.0
    raise ValueError(f"variant must be 'baseline' or 'score', got {variant!r}")


class OnlineProcedure:
    """Base class: bookkeeping, the estimator protocol, and the step loop.

    Subclasses provide ``next_alpha`` (the budget recurrence) and ``_consume``
    (decision, cost, and accumulator updates for one observation).
    """

    #: "e" for e-value procedures, "p" for p-value procedures.
    evidence_kind = "e"
    #: Stable identifier used by the registry and the command line.
    procedure_id = ""

    def __init__(self, alpha: float = 0.05):
        self.alpha = alpha
        self.reset()

    # -- parameter protocol -------------------------------------------------

    @classmethod
    def _param_names(cls):
        return [p for p in inspect.signature(cls.__init__).parameters if p != "self"]

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in self._param_names()}

    def set_params(self, **params):
        valid = self._param_names()
        for name, value in params.items():
            if name not in valid:
                raise ValueError(f"invalid parameter {name!r} for {type(self).__name__}")
            setattr(self, name, value)
        self.reset()
        return self

    def clone(self):
        """A fresh, unfitted copy with identical parameters."""
        return type(self)(**self.get_params())

    def __repr__(self):
        args = ", ".join(f"{k}={v!r}" for k, v in self.get_params().items())
        return f"{type(self).__name__}({args})"

    # -- state lifecycle -----------------------------------------------------

    def reset(self):
        """Discard all stream state; parameters are revalidated."""
        check_open_unit(self.alpha, "alpha")
        self.t_ = 0
        self.n_rejections_ = 0
        self._alphas: list[float] = []
        self._decisions: list[bool] = []
        self._overshoots: list[float] = []
        self._costs: list[float] = []
        self._rej_before: list[int] = []
        self._fdp: list[float] = []
        self._wealths: list[float] = []
        self._truths: list = []
        self._warned_large_alpha = False
        self._init_state()
        return self

    def _init_state(self):
        """Subclass hook: reset procedure-specific accumulators."""

    # -- the budget recurrence (subclass responsibility) ---------------------

    def next_alpha(self) -> float:
        """Budget that will be spent on the upcoming observation."""
        raise NotImplementedError

    def _consume(self, alpha_t: float, evidence: float):
        """Decide on one observation and update accumulators.

        Returns ``(decision, overshoot, cost, fdp_hat, wealth)`` where
        ``fdp_hat`` is the procedure's own estimate after this step and
        ``wealth`` is the remaining budget (NaN when not tracked).
        """
        raise NotImplementedError

    # -- stepping -------------------------------------------------------------

    def _advance(self, evidence: float):
        alpha_t = self.next_alpha()
        rb = self.n_rejections_
        decision, over, cost, fdp, wealth = self._consume(alpha_t, evidence)
        self.t_ += 1
        self._alphas.append(alpha_t)
        self._decisions.append(decision)
        self._overshoots.append(over)
        self._costs.append(cost)
        self._rej_before.append(rb)
        self._fdp.append(fdp)
        self._wealths.append(wealth)
        if alpha_t >= 1.0 and not self._warned_large_alpha:
            self._warned_large_alpha = True
            warnings.warn(
                f"{self.procedure_id}: per-step budget alpha_t={alpha_t:.3g} reached 1; "
                "the decision rule remains well defined but the budget is no longer "
                "a probability",
                RuntimeWarning,
                stacklevel=3,
            )
        return alpha_t, decision, over, cost, fdp, rb

    def step(self, observation) -> StepResult:
        """Consume a single observation (an :class:`Observation` or a bare value)."""
        truth = None
        if isinstance(observation, Observation):
            if observation.kind != self.evidence_kind:
                raise ValueError(
                    f"{self.procedure_id} consumes {self.evidence_kind!r}-kind evidence, "
                    f"got {observation.kind!r}"
                )
            if observation.index != self.t_ + 1:
                raise ValueError(
                    f"out-of-order observation: expected index {self.t_ + 1}, "
                    f"got {observation.index}"
                )
            value = observation.evidence
            truth = observation.truth
        else:
            value = float(observation)
            if not math.isfinite(value) or value < 0.0:
                raise ValueError(f"evidence must be a finite non-negative real, got {value!r}")
            if self.evidence_kind == "p" and value > 1.0:
                raise ValueError(f"p-value evidence must lie in [0, 1], got {value}")
        alpha_t, decision, over, cost, fdp, rb = self._advance(value)
        self._truths.append(truth)
        return StepResult(StepRecord(alpha_t, decision, over, cost, rb), fdp)

    def partial_fit(self, X, y=None):
        """Consume more of the evidence stream without resetting state."""
        X = check_evidence_array(X, self.evidence_kind)
        if y is not None:
            y = check_truth_array(y, len(X))
            self._truths.extend(bool(v) for v in y)
        else:
            self._truths.extend([None] * len(X))
        advance = self._advance
        for value in X.tolist():
            advance(value)
        return self

    def fit(self, X, y=None):
        """Run the procedure on a full evidence stream.

        Parameters
        ----------
        X : array-like of shape (n_steps,)
            Evidence values, e-values or p-values according to the
            procedure's ``evidence_kind``.
        y : array-like of shape (n_steps,), optional
            Ground-truth non-null indicators, kept for metric evaluation.
        """
        self.reset()
        return self.partial_fit(X, y)

    def predict(self, X) -> np.ndarray:
        """Decisions for a fresh run over ``X`` (does not touch fitted state)."""
        return self.clone().fit(X).decision_

    # -- fitted views ----------------------------------------------------------

    @property
    def alpha_(self) -> np.ndarray:
        return np.asarray(self._alphas, dtype=float)

    @property
    def decision_(self) -> np.ndarray:
        return np.asarray(self._decisions, dtype=bool)

    @property
    def overshoot_(self) -> np.ndarray:
        return np.asarray(self._overshoots, dtype=float)

    @property
    def cost_(self) -> np.ndarray:
        return np.asarray(self._costs, dtype=float)

    @property
    def rejections_before_(self) -> np.ndarray:
        return np.asarray(self._rej_before, dtype=int)

    @property
    def rejections_(self) -> np.ndarray:
        return np.cumsum(self._decisions).astype(int)

    @property
    def fdp_hat_(self) -> np.ndarray:
        return np.asarray(self._fdp, dtype=float)

    @property
    def wealth_(self) -> np.ndarray:
        return np.asarray(self._wealths, dtype=float)

    def trajectory(self) -> Trajectory:
        truth = None
        if self._truths and all(v is not None for v in self._truths):
            truth = np.asarray(self._truths, dtype=bool)
        return Trajectory(
            alpha=self.alpha_,
            decision=self.decision_,
            overshoot=self.overshoot_,
            cost=self.cost_,
            rejections=self.rejections_,
            fdp_hat=self.fdp_hat_,
            wealth=self.wealth_,
            truth=truth,
        )

    # -- internals --------------------------------------------------------------

    def _decide_e(self, alpha_t: float, e: float) -> bool:
        return alpha_t > 0.0 and e >= 1.0 / alpha_t

    def _decide_p(self, alpha_t: float, p: float) -> bool:
        return alpha_t > 0.0 and p <= alpha_t

    def _checked_wealth(self, wealth: float) -> float:
        if wealth < WEALTH_UNDERFLOW_TOL:
            raise RuntimeError(
                f"{self.procedure_id}: wealth underflow ({wealth!r}); the update rule "
                "guarantees non-negativity, so this indicates a bug"
            )
        return wealth if wealth > 0.0 else 0.0


# ---------------------------------------------------------------------------
# LOND family: budget from a fixed discovery-spreading sequence.
# ---------------------------------------------------------------------------


class ELond(OnlineProcedure):
    """Baseline e-value LOND: ``alpha_t = gamma_t * (R_{t-1} + 1) * alpha``.

    Charges the full budget ``alpha_t`` as cost at every step; its FDP
    estimate uses local denominators and equals ``alpha * sum(gamma_j)``.
    """

    evidence_kind = "e"
    procedure_id = "e-lond"

    def __init__(self, alpha: float = 0.05, gamma: Schedule = DEFAULT_GAMMA):
        self.alpha = alpha
        self.gamma = gamma
        self.reset()

    def _init_state(self):
        self._gamma_at = compile_schedule(self.gamma, role="gamma")
        self._fdp_sum = 0.0

    def next_alpha(self) -> float:
        return self._gamma_at(self.t_ + 1, self.n_rejections_) * (self.n_rejections_ + 1.0) * self.alpha

    def _consume(self, alpha_t, e):
        decision = self._decide_e(alpha_t, e)
        over = alpha_t * e - 1.0
        over = over if over > 0.0 else 0.0
        self._fdp_sum += alpha_t / (self.n_rejections_ + 1.0)
        if decision:
            self.n_rejections_ += 1
        return decision, over, alpha_t, self._fdp_sum, math.nan


class ScoreLond(ELond):
    """Refunding LOND: overshoots are banked and re-spent.

    The budget recurrence multiplies ``gamma_t * (R_{t-1} + 1)`` by the
    accrued pot ``alpha + sum_j min(O_j, alpha_j) / (R_{j-1} + 1)``, and the
    charged cost is the refund-adjusted ``(alpha_t - O_t)_+``.  Thresholds
    dominate e-LOND on every stream.
    """

    procedure_id = "score-lond"

    def _init_state(self):
        super()._init_state()
        self._pot = self.alpha

    def next_alpha(self) -> float:
        return self._gamma_at(self.t_ + 1, self.n_rejections_) * (self.n_rejections_ + 1.0) * self._pot

    def _consume(self, alpha_t, e):
        decision = self._decide_e(alpha_t, e)
        over = alpha_t * e - 1.0
        over = over if over > 0.0 else 0.0
        cost = alpha_t - over
        cost = cost if cost > 0.0 else 0.0
        denom = self.n_rejections_ + 1.0
        self._fdp_sum += cost / denom
        self._pot += (over if over < alpha_t else alpha_t) / denom
        if decision:
            self.n_rejections_ += 1
        return decision, over, cost, self._fdp_sum, math.nan


class PLond(OnlineProcedure):
    """p-value LOND: same fixed-sequence budget, rejection when ``p <= alpha_t``."""

    evidence_kind = "p"
    procedure_id = "p-lond"

    def __init__(self, alpha: float = 0.05, gamma: Schedule = DEFAULT_GAMMA):
        self.alpha = alpha
        self.gamma = gamma
        self.reset()

    def _init_state(self):
        self._gamma_at = compile_schedule(self.gamma, role="gamma")
        self._fdp_sum = 0.0

    def next_alpha(self) -> float:
        return self._gamma_at(self.t_ + 1, self.n_rejections_) * (self.n_rejections_ + 1.0) * self.alpha

    def _consume(self, alpha_t, p):
        decision = self._decide_p(alpha_t, p)
        self._fdp_sum += alpha_t / (self.n_rejections_ + 1.0)
        if decision:
            self.n_rejections_ += 1
        return decision, 0.0, alpha_t, self._fdp_sum, math.nan


# ---------------------------------------------------------------------------
# LORD family: wealth recycling with local denominators.
# ---------------------------------------------------------------------------


class ELord(OnlineProcedure):
    """Baseline e-value LORD.

    Maintains the wealth ``W_t = alpha - sum_j C_j / (R_{j-1} + 1)`` with
    ``C_j = alpha_j`` and allocates ``alpha_t = omega_t * (R_{t-1} + 1) * W_t``.
    """

    evidence_kind = "e"
    procedure_id = "e-lord"

    def __init__(self, alpha: float = 0.05, omega: Schedule = DEFAULT_OMEGA):
        self.alpha = alpha
        self.omega = omega
        self.reset()

    def _init_state(self):
        self._omega_at = compile_schedule(self.omega, role="omega")
        self._spent = 0.0

    def next_alpha(self) -> float:
        wealth = self._checked_wealth(self.alpha - self._spent)
        return self._omega_at(self.t_ + 1, self.n_rejections_) * (self.n_rejections_ + 1.0) * wealth

    def _consume(self, alpha_t, e):
        decision = self._decide_e(alpha_t, e)
        over = alpha_t * e - 1.0
        over = over if over > 0.0 else 0.0
        self._spent += alpha_t / (self.n_rejections_ + 1.0)
        if decision:
            self.n_rejections_ += 1
        return decision, over, alpha_t, self._spent, self.alpha - self._spent


class ScoreLord(ELord):
    """Refunding LORD: charges ``(alpha_t - O_t)_+`` instead of ``alpha_t``."""

    procedure_id = "score-lord"

    def _consume(self, alpha_t, e):
        decision = self._decide_e(alpha_t, e)
        over = alpha_t * e - 1.0
        over = over if over > 0.0 else 0.0
        cost = alpha_t - over
        cost = cost if cost > 0.0 else 0.0
        self._spent += cost / (self.n_rejections_ + 1.0)
        if decision:
            self.n_rejections_ += 1
        return decision, over, cost, self._spent, self.alpha - self._spent


# ---------------------------------------------------------------------------
# SAFFRON family: candidate screening on top of wealth recycling.
# ---------------------------------------------------------------------------


class ESaffron(OnlineProcedure):
    """Baseline e-value SAFFRON.

    Evidence past the candidate threshold (``e >= 1 / lambda_t``) is free;
    anything weaker is charged ``alpha_t / (1 - lambda_t)``.
    """

    evidence_kind = "e"
    procedure_id = "e-saffron"

    def __init__(
        self,
        alpha: float = 0.05,
        omega: Schedule = DEFAULT_OMEGA,
        lam: Schedule = DEFAULT_LAMBDA,
    ):
        self.alpha = alpha
        self.omega = omega
        self.lam = lam
        self.reset()

    def _init_state(self):
        self._omega_at = compile_schedule(self.omega, role="omega")
        self._lam_at = compile_schedule(self.lam, role="lambda")
        self._spent = 0.0
        self._lam_t = math.nan

    def next_alpha(self) -> float:
        t_next = self.t_ + 1
        rej = self.n_rejections_
        self._lam_t = self._lam_at(t_next, rej)
        wealth = self._checked_wealth(self.alpha - self._spent)
        return self._omega_at(t_next, rej) * (1.0 - self._lam_t) * (rej + 1.0) * wealth

    def _consume(self, alpha_t, e):
        decision = self._decide_e(alpha_t, e)
        over = alpha_t * e - 1.0
        over = over if over > 0.0 else 0.0
        lam = self._lam_t
        cost = alpha_t / (1.0 - lam) if e < 1.0 / lam else 0.0
        self._spent += cost / (self.n_rejections_ + 1.0)
        if decision:
            self.n_rejections_ += 1
        return decision, over, cost, self._spent, self.alpha - self._spent


class ScoreSaffron(ESaffron):
    """Refunding SAFFRON: continuous candidate penalty plus overshoot refund."""

    procedure_id = "score-saffron"

    def _consume(self, alpha_t, e):
        decision = self._decide_e(alpha_t, e)
        over = alpha_t * e - 1.0
        over = over if over > 0.0 else 0.0
        lam = self._lam_t
        cost = alpha_t * (1.0 - lam * e) / (1.0 - lam) - over
        cost = cost if cost > 0.0 else 0.0
        self._spent += cost / (self.n_rejections_ + 1.0)
        if decision:
            self.n_rejections_ += 1
        return decision, over, cost, self._spent, self.alpha - self._spent


# ---------------------------------------------------------------------------
# Global-denominator variants: retroactive wealth updates.
# ---------------------------------------------------------------------------


class ScorePlusLord(OnlineProcedure):
    """Refunding LORD with retroactive wealth updates.

    Past charges are rescaled by the current discovery count: the wealth is
    ``W_t = alpha - sum_{j<t} (alpha_j - O_j)_+ / (R_{t-1} v 1)``, so each new
    rejection releases budget locked by earlier conservative charges.  Valid
    under positive dependence between current evidence and future discovery
    counts (in particular under independent e-values, since the rule is
    non-decreasing in the rejection history).
    """

    evidence_kind = "e"
    procedure_id = "score-plus-lord"

    def __init__(self, alpha: float = 0.05, omega: Schedule = DEFAULT_OMEGA):
        self.alpha = alpha
        self.omega = omega
        self.reset()

    def _init_state(self):
        self._omega_at = compile_schedule(self.omega, role="omega")
        self._cost_total = 0.0

    def next_alpha(self) -> float:
        rmax = float(max(self.n_rejections_, 1))
        wealth = self._checked_wealth(self.alpha - self._cost_total / rmax)
        return self._omega_at(self.t_ + 1, self.n_rejections_) * rmax * wealth

    def _consume(self, alpha_t, e):
        decision = self._decide_e(alpha_t, e)
        over = alpha_t * e - 1.0
        over = over if over > 0.0 else 0.0
        cost = alpha_t - over
        cost = cost if cost > 0.0 else 0.0
        self._cost_total += cost
        if decision:
            self.n_rejections_ += 1
        fdp = self._cost_total / max(self.n_rejections_, 1)
        return decision, over, cost, fdp, self.alpha - fdp


class ScorePlusSaffron(OnlineProcedure):
    """Refunding SAFFRON with retroactive wealth updates (global denominator)."""

    evidence_kind = "e"
    procedure_id = "score-plus-saffron"

    def __init__(
        self,
        alpha: float = 0.05,
        omega: Schedule = DEFAULT_OMEGA,
        lam: Schedule = DEFAULT_LAMBDA,
    ):
        self.alpha = alpha
        self.omega = omega
        self.lam = lam
        self.reset()

    def _init_state(self):
        self._omega_at = compile_schedule(self.omega, role="omega")
        self._lam_at = compile_schedule(self.lam, role="lambda")
        self._cost_total = 0.0
        self._lam_t = math.nan

    def next_alpha(self) -> float:
        t_next = self.t_ + 1
        rej = self.n_rejections_
        self._lam_t = self._lam_at(t_next, rej)
        rmax = float(max(rej, 1))
        wealth = self._checked_wealth(self.alpha - self._cost_total / rmax)
        return self._omega_at(t_next, rej) * (1.0 - self._lam_t) * rmax * wealth

    def _consume(self, alpha_t, e):
        decision = self._decide_e(alpha_t, e)
        over = alpha_t * e - 1.0
        over = over if over > 0.0 else 0.0
        lam = self._lam_t
        cost = alpha_t * (1.0 - lam * e) / (1.0 - lam) - over
        cost = cost if cost > 0.0 else 0.0
        self._cost_total += cost
        if decision:
            self.n_rejections_ += 1
        fdp = self._cost_total / max(self.n_rejections_, 1)
        return decision, over, cost, fdp, self.alpha - fdp


class PLord(OnlineProcedure):
    """p-value LORD with the global denominator.

    Charges ``alpha_t`` per step; the rule is coordinate-wise non-decreasing
    in the rejection history, which is what permits the retroactive
    denominator for conditionally super-uniform p-values.
    """

    evidence_kind = "p"
    procedure_id = "p-lord"

    def __init__(self, alpha: float = 0.05, omega: Schedule = DEFAULT_OMEGA):
        self.alpha = alpha
        self.omega = omega
        self.reset()

    def _init_state(self):
        self._omega_at = compile_schedule(self.omega, role="omega")
        self._cost_total = 0.0

    def next_alpha(self) -> float:
        rmax = float(max(self.n_rejections_, 1))
        wealth = self._checked_wealth(self.alpha - self._cost_total / rmax)
        return self._omega_at(self.t_ + 1, self.n_rejections_) * rmax * wealth

    def _consume(self, alpha_t, p):
        decision = self._decide_p(alpha_t, p)
        self._cost_total += alpha_t
        if decision:
            self.n_rejections_ += 1
        fdp = self._cost_total / max(self.n_rejections_, 1)
        return decision, 0.0, alpha_t, fdp, self.alpha - fdp


class PSaffron(OnlineProcedure):
    """p-value SAFFRON with the global denominator.

    Charges ``alpha_t / (1 - lambda_t)`` only when the p-value misses the
    candidate threshold (``p > lambda_t``).
    """

    evidence_kind = "p"
    procedure_id = "p-saffron"

    def __init__(
        self,
        alpha: float = 0.05,
        omega: Schedule = DEFAULT_OMEGA,
        lam: Schedule = DEFAULT_LAMBDA,
    ):
        self.alpha = alpha
        self.omega = omega
        self.lam = lam
        self.reset()

    def _init_state(self):
        self._omega_at = compile_schedule(self.omega, role="omega")
        self._lam_at = compile_schedule(self.lam, role="lambda")
        self._cost_total = 0.0
        self._lam_t = math.nan

    def next_alpha(self) -> float:
        t_next = self.t_ + 1
        rej = self.n_rejections_
        self._lam_t = self._lam_at(t_next, rej)
        rmax = float(max(rej, 1))
        wealth = self._checked_wealth(self.alpha - self._cost_total / rmax)
        return self._omega_at(t_next, rej) * (1.0 - self._lam_t) * rmax * wealth

    def _consume(self, alpha_t, p):
        decision = self._decide_p(alpha_t, p)
        cost = alpha_t / (1.0 - self._lam_t) if p > self._lam_t else 0.0
        self._cost_total += cost
        if decision:
            self.n_rejections_ += 1
        fdp = self._cost_total / max(self.n_rejections_, 1)
        return decision, 0.0, cost, fdp, self.alpha - fdp


# ---------------------------------------------------------------------------
# Registry and stream driver.
# ---------------------------------------------------------------------------

PROCEDURES: dict[str, type[OnlineProcedure]] = {
    cls.procedure_id: cls
    for cls in (
        ELond,
        ScoreLond,
        ELord,
        ScoreLord,
        ScorePlusLord,
        ESaffron,
        ScoreSaffron,
        ScorePlusSaffron,
        PLond,
        PLord,
        PSaffron,
    )
}

PROCEDURE_IDS = tuple(PROCEDURES)


def make_procedure(
    procedure_id: str,
    alpha: float = 0.05,
    gamma: Schedule | None = None,
    omega: Schedule | None = None,
    lam: Schedule | None = None,
) -> OnlineProcedure:
    """Instantiate a procedure by id, supplying only the schedules it uses."""
    try:
        cls = PROCEDURES[procedure_id]
    except KeyError:
        raise ValueError(
            f"unknown procedure {procedure_id!r}; choose from {', '.join(PROCEDURE_IDS)}"
        ) from None
    kwargs = {"alpha": alpha}
    accepted = cls._param_names()
    for name, value in (("gamma", gamma), ("omega", omega), ("lam", lam)):
        if name in accepted and value is not None:
            kwargs[name] = value
    return cls(**kwargs)


def run_stream(procedure: OnlineProcedure, observations) -> Trajectory:
    """Run a fresh copy of ``procedure`` over a sequence of observations.

    Observations must be indexed 1..T consecutively and carry the evidence
    kind the procedure consumes.  Ground-truth labels, when present on all
    observations, are carried into the trajectory.
    """
    proc = procedure.clone()
    evidence = []
    truths = []
    for pos, obs in enumerate(observations, start=1):
        if not isinstance(obs, Observation):
            raise TypeError(f"expected Observation, got {type(obs).__name__}")
        if obs.index != pos:
            raise ValueError(f"observations must be indexed consecutively from 1; "
                             f"expected {pos}, got {obs.index}")
        if obs.kind != proc.evidence_kind:
            raise ValueError(
                f"{proc.procedure_id} consumes {proc.evidence_kind!r}-kind evidence, "
                f"got {obs.kind!r} at index {obs.index}"
            )
        evidence.append(obs.evidence)
        truths.append(obs.truth)
    known = [v for v in truths if v is not None]
    if known and len(known) != len(truths):
        raise ValueError("truth labels must be present on all observations or none")
    y = np.asarray(truths, dtype=bool) if known else None
    proc.fit(np.asarray(evidence, dtype=float), y)
    return proc.trajectory()
