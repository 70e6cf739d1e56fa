"""Hawkes process simulation by thinning.

The sampler draws candidate points from a piecewise-constant dominating
rate built from per-event kernel suprema (``sup_after``), which also covers
the non-monotone sinusoidal kernel.  Events whose kernel contribution has
decayed below 1e-12 are dropped from the active set, so intensity
evaluation stays proportional to the active-history size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import Kernel, effective_support, evaluate, stationarity_norm, sup_after


class NonStationaryError(ValueError):
    """Simulation requested for a model whose kernel norm is >= 1."""


class BlowUpError(RuntimeError):
    """Expected or realized event count exceeds the configured cap."""


@dataclass(frozen=True)
class HawkesModel:
    """Background rate plus self-triggering kernel."""

    mu: float
    kernel: Kernel

    def __post_init__(self):
        if not (np.isfinite(self.mu) and self.mu > 0):
            raise ValueError(f"mu must be strictly positive, got {self.mu!r}")


@dataclass(frozen=True)
class EventSequence:
    """Strictly increasing event timestamps on ``[0, horizon_T]``."""

    timestamps: np.ndarray
    horizon_T: float

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=float)
        object.__setattr__(self, "timestamps", ts)
        if ts.ndim != 1:
            raise ValueError("timestamps must be one-dimensional")
        if not (np.isfinite(self.horizon_T) and self.horizon_T > 0):
            raise ValueError(f"horizon_T must be positive, got {self.horizon_T!r}")
        if ts.size:
            if np.any(np.diff(ts) <= 0):
                raise ValueError("timestamps must be strictly increasing (simple process)")
            if ts[0] < 0 or ts[-1] > self.horizon_T:
                raise ValueError("timestamps must lie within [0, horizon_T]")

    def __len__(self) -> int:
        return int(self.timestamps.size)


def intensity_at(model: HawkesModel, history: EventSequence, t: float) -> float:
    """Conditional intensity ``mu + sum phi(t - t_i)`` over events strictly
    before ``t`` (left-continuity: an event at exactly ``t`` is excluded)."""
    ts = history.timestamps
    past = ts[ts < t]
    if past.size == 0:
        return float(model.mu)
    return float(model.mu + np.sum(evaluate(model.kernel, t - past)))


def simulate(
    model: HawkesModel,
    horizon_T: float,
    seed: int,
    max_events: int = 10**7,
) -> EventSequence:
    """Simulate an event sequence on ``[0, horizon_T]`` by thinning.

    Deterministic given ``seed``.  Rejects non-stationary models, and aborts
    when the expected (or realized) event count exceeds ``max_events``.
    """
    if horizon_T <= 0:
        raise ValueError("horizon_T must be positive")
    verdict = stationarity_norm(model.kernel)
    if not verdict.stationary:
        raise NonStationaryError(
            f"kernel norm {verdict.norm_value:.6g} >= 1; steady-state simulation refused"
        )
    expected = model.mu * horizon_T / (1.0 - verdict.norm_value)
    if expected > max_events:
        raise BlowUpError(
            f"expected event count {expected:.3g} exceeds cap {max_events:.3g}"
        )

    rng = np.random.default_rng(seed)
    kernel = model.kernel
    cutoff = effective_support(kernel)
    events: list[float] = []
    active = np.empty(0, dtype=float)

    t = 0.0
    while True:
        # Dominating rate: sup of each active event's future contribution.
        bound = model.mu
        if active.size:
            bound += float(np.sum(sup_after(kernel, t - active)))
        t += rng.exponential(1.0 / bound)
        if t >= horizon_T:
            break
        lam = model.mu
        if active.size:
            lam += float(np.sum(evaluate(kernel, t - active)))
        if rng.uniform() * bound <= lam:
            events.append(t)
            if len(events) > max_events:
                raise BlowUpError(f"realized event count exceeds cap {max_events:.3g}")
            active = np.append(active, t)
            active = active[t - active <= cutoff]

    return EventSequence(np.asarray(events, dtype=float), float(horizon_T))
