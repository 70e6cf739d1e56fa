import math

import numpy as np
import pytest

from hawkesdecomp.kernels import Exp, Sns, Sqr, Sum
from hawkesdecomp.simulate import (
    BlowUpError,
    EventSequence,
    HawkesModel,
    NonStationaryError,
    intensity_at,
    simulate,
)


class TestEventSequence:
    def test_rejects_unordered(self):
        with pytest.raises(ValueError):
            EventSequence(np.array([1.0, 0.5]), 2.0)

    def test_rejects_ties(self):
        with pytest.raises(ValueError):
            EventSequence(np.array([0.5, 0.5]), 2.0)

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            EventSequence(np.array([0.5, 3.0]), 2.0)
        with pytest.raises(ValueError):
            EventSequence(np.array([-0.5, 1.0]), 2.0)

    def test_empty_allowed(self):
        seq = EventSequence(np.array([]), 1.0)
        assert len(seq) == 0


class TestIntensity:
    def test_no_history(self):
        model = HawkesModel(mu=0.7, kernel=Exp(1, 1))
        empty = EventSequence(np.array([]), 10.0)
        assert intensity_at(model, empty, 5.0) == pytest.approx(0.7)

    def test_hand_value(self):
        model = HawkesModel(mu=1.0, kernel=Exp(1.0, 1.0))
        history = EventSequence(np.array([1.0]), 10.0)
        assert intensity_at(model, history, 2.0) == pytest.approx(1.0 + math.exp(-1.0))

    def test_left_continuity(self):
        # the event at exactly t contributes nothing
        model = HawkesModel(mu=1.0, kernel=Exp(2.0, 1.0))
        history = EventSequence(np.array([1.0]), 10.0)
        assert intensity_at(model, history, 1.0) == pytest.approx(1.0)
        assert intensity_at(model, history, 1.0 + 1e-9) == pytest.approx(3.0, rel=1e-6)


class TestSimulate:
    def test_deterministic_given_seed(self):
        model = HawkesModel(mu=1.0, kernel=Exp(0.5, 1.0))
        a = simulate(model, 50.0, seed=42)
        b = simulate(model, 50.0, seed=42)
        assert np.array_equal(a.timestamps, b.timestamps)
        c = simulate(model, 50.0, seed=43)
        assert not np.array_equal(a.timestamps, c.timestamps)

    def test_rejects_nonstationary(self):
        with pytest.raises(NonStationaryError):
            simulate(HawkesModel(mu=1.0, kernel=Exp(2.0, 1.0)), 10.0, seed=0)
        # boundary norm exactly 1 is refused as well
        with pytest.raises(NonStationaryError):
            simulate(HawkesModel(mu=1.0, kernel=Sqr(1.0, 1.0)), 10.0, seed=0)

    def test_blowup_guard(self):
        with pytest.raises(BlowUpError):
            simulate(HawkesModel(mu=100.0, kernel=Exp(0.5, 1.0)), 100.0, seed=0, max_events=1000)

    def test_mean_rate_matches_stationary_formula(self):
        # Lambda = mu / (1 - ||phi||); mu=0.5, norm=0.5 -> rate 1
        model = HawkesModel(mu=0.5, kernel=Exp(0.5, 1.0))
        events = simulate(model, 5000.0, seed=7)
        rate = len(events) / events.horizon_T
        assert rate == pytest.approx(1.0, abs=0.08)

    def test_mean_rate_sns(self):
        # norm = 2A/omega = 0.4 -> Lambda = 1/0.6
        model = HawkesModel(mu=1.0, kernel=Sns(0.4, 2.0))
        events = simulate(model, 3000.0, seed=11)
        rate = len(events) / events.horizon_T
        assert rate == pytest.approx(1.0 / 0.6, rel=0.06)

    def test_output_within_horizon(self):
        model = HawkesModel(mu=1.0, kernel=Sum(Exp(0.2, 1.0), Sqr(0.1, 2.0)))
        events = simulate(model, 200.0, seed=3)
        ts = events.timestamps
        assert ts[0] >= 0 and ts[-1] < 200.0
        assert np.all(np.diff(ts) > 0)

    def test_thinning_bound_dominates_intensity(self):
        # the dominating rate used for rejection must upper-bound the true
        # intensity throughout the candidate interval, also for the
        # non-monotone sinusoid
        from hawkesdecomp.kernels import evaluate, sup_after

        model = HawkesModel(mu=0.8, kernel=Sum(Sns(0.3, 1.5), Exp(0.4, 2.0)))
        events = simulate(model, 100.0, seed=5)
        history = events.timestamps
        rng = np.random.default_rng(0)
        for t in rng.uniform(1.0, 99.0, size=20):
            past = history[history < t]
            bound = model.mu + float(np.sum(sup_after(model.kernel, t - past)))
            for u in np.linspace(t, t + 2.0, 50):
                lam = model.mu + float(np.sum(evaluate(model.kernel, u - past)))
                assert bound >= lam - 1e-9
