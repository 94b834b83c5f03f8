"""Predictable parameter sequences (gamma, omega, lambda) used by the procedures.

Three kinds are supported:

``constant``
    The same value at every step.
``geometric``
    ``gamma_t = (1 - q) * q**(t-1)``, which sums to one over all t and is
    the natural discovery-spreading sequence for LOND-type rules.
``rai``
    Rejection-adjusted investment: the weight drifts up by ``phi``-powers
    during quiet stretches and down by ``psi``-powers after rejections,
    ``omega_{t+1} = omega1 + omega1 * (sum_{j<=t-R} phi**j - sum_{j<=R} psi**j)``
    where R is the rejection count after step t.
"""

from __future__ import annotations

from dataclasses import dataclass

from ._validation import check_open_unit, check_positive_int

#: RAI weights are clamped to this open sub-interval of (0, 1); the raw
#: recurrence can leave (0, 1) for extreme phi/psi, but procedures require
#: a weight strictly inside the unit interval.
RAI_WEIGHT_MIN = 1e-6

SCHEDULE_KINDS = ("constant", "geometric", "rai")


@dataclass(frozen=True)
class Schedule:
    """A named parameter sequence: ``kind`` plus its kind-specific params."""

    kind: str
    params: tuple[float, ...]

    def __post_init__(self):
        if self.kind == "constant":
            (c,) = self.params
            check_open_unit(c, "constant value")
        elif self.kind == "geometric":
            (q,) = self.params
            check_open_unit(q, "geometric ratio")
        elif self.kind == "rai":
            omega1, phi, psi = self.params
            check_open_unit(omega1, "rai omega1")
            check_open_unit(phi, "rai phi")
            check_open_unit(psi, "rai psi")
        else:
            raise ValueError(f"kind must be one of {SCHEDULE_KINDS}, got {self.kind!r}")

    @classmethod
    def constant(cls, value: float) -> "Schedule":
        return cls("constant", (float(value),))

    @classmethod
    def geometric(cls, ratio: float) -> "Schedule":
        return cls("geometric", (float(ratio),))

    @classmethod
    def rai(cls, omega1: float, phi: float, psi: float) -> "Schedule":
        return cls("rai", (float(omega1), float(phi), float(psi)))

    @classmethod
    def parse(cls, text: str) -> "Schedule":
        """Parse ``"kind,param,..."``, e.g. ``"geometric,0.5"`` or ``"rai,0.05,0.5,0.5"``."""
        parts = [p.strip() for p in str(text).split(",")]
        kind = parts[0]
        try:
            params = tuple(float(p) for p in parts[1:])
        except ValueError as exc:
            raise ValueError(f"bad schedule parameter in {text!r}") from exc
        n_expected = {"constant": 1, "geometric": 1, "rai": 3}.get(kind)
        if n_expected is None:
            raise ValueError(f"unknown schedule kind {kind!r}")
        if len(params) != n_expected:
            raise ValueError(
                f"schedule kind {kind!r} takes {n_expected} parameter(s), got {len(params)}"
            )
        return cls(kind, params)

    def spec(self) -> str:
        """Inverse of :meth:`parse`."""
        return ",".join([self.kind] + [repr(p) for p in self.params])


def _geometric_sum(r: float, k: int) -> float:
    # sum_{j=1..k} r**j in closed form; exact enough for r in (0,1).
    if k <= 0:
        return 0.0
    return r * (1.0 - r**k) / (1.0 - r)


def gamma_at(schedule: Schedule, t: int) -> float:
    """The t-th element of a discovery-spreading sequence.

    Only ``constant`` and ``geometric`` kinds qualify: LOND-type rules need
    a sequence fixed in advance (geometric additionally sums to one).
    """
    t = check_positive_int(t, "t")
    if schedule.kind == "constant":
        return schedule.params[0]
    if schedule.kind == "geometric":
        q = schedule.params[0]
        return (1.0 - q) * q ** (t - 1)
    raise ValueError(
        "rai schedules adapt to the rejection history and cannot serve as a "
        "summable gamma sequence"
    )


def rai_omega(omega1: float, phi: float, psi: float, t: int, rejections: int) -> float:
    """Rejection-adjusted investment weight for step ``t + 1``.

    ``t`` is the number of steps already taken and ``rejections`` the number
    of rejections among them.  The result is clamped to
    ``[RAI_WEIGHT_MIN, 1 - RAI_WEIGHT_MIN]`` so it remains a valid weight.
    """
    omega1 = check_open_unit(omega1, "omega1")
    phi = check_open_unit(phi, "phi")
    psi = check_open_unit(psi, "psi")
    t = check_positive_int(t, "t")
    if rejections < 0 or rejections > t:
        raise ValueError(f"rejections must lie in [0, t], got {rejections} with t={t}")
    raw = omega1 + omega1 * (
        _geometric_sum(phi, t - rejections) - _geometric_sum(psi, rejections)
    )
    return min(max(raw, RAI_WEIGHT_MIN), 1.0 - RAI_WEIGHT_MIN)


def weight_at(schedule: Schedule, t: int, rejections: int) -> float:
    """Weight for step ``t`` given ``rejections`` made strictly before it."""
    t = check_positive_int(t, "t")
    if schedule.kind == "constant":
        return schedule.params[0]
    if schedule.kind == "geometric":
        return gamma_at(schedule, t)
    omega1, phi, psi = schedule.params
    if t == 1:
        return omega1
    return rai_omega(omega1, phi, psi, t - 1, rejections)


def compile_schedule(schedule: Schedule, role: str = "omega"):
    """Turn a schedule into a fast ``(t, rejections) -> value`` callable.

    Parameters are validated once here instead of on every step; the
    returned closures compute exactly what :func:`gamma_at` /
    :func:`weight_at` compute.  ``role="gamma"`` rejects rai schedules,
    which cannot serve as a summable spreading sequence.
    """
    if not isinstance(schedule, Schedule):
        raise TypeError(f"expected a Schedule for {role}, got {type(schedule).__name__}")
    if schedule.kind == "constant":
        c = schedule.params[0]
        return lambda t, rejections: c
    if schedule.kind == "geometric":
        q = schedule.params[0]
        scale = 1.0 - q
        return lambda t, rejections: scale * q ** (t - 1)
    if role == "gamma":
        raise ValueError(
            "rai schedules adapt to the rejection history and cannot serve as a "
            "summable gamma sequence"
        )
    omega1, phi, psi = schedule.params
    lo, hi = RAI_WEIGHT_MIN, 1.0 - RAI_WEIGHT_MIN

    def rai_weight(t, rejections):
        if t == 1:
            return omega1
        steps = t - 1
        up = _geometric_sum(phi, steps - rejections)
        down = _geometric_sum(psi, rejections)
        raw = omega1 + omega1 * (up - down)
        return lo if raw < lo else (hi if raw > hi else raw)

    return rai_weight


#: Defaults mirroring the benchmark settings used throughout the test suite.
DEFAULT_GAMMA = Schedule.geometric(0.5)
DEFAULT_OMEGA = Schedule.constant(0.05)
DEFAULT_LAMBDA = Schedule.constant(0.5)
DEFAULT_RAI = Schedule.rai(0.05, 0.5, 0.5)
