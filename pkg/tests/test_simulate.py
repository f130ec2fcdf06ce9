"""Simulated-test generation: determinism, threshold rule, caps, sweeps."""

import math

import numpy as np
import pytest

from quantal.phase1 import Procedure
from quantal.session import run_batch
from quantal.simulate import (SimConfig, sim_truth, simulate_test, sweep,
                              sweep_to_text, _strength_draw)


BASE = dict(mlo=0, mhi=22, sg=3, n2=6, n3=15, p=.9, lam=1.0, reso=.01)


class TestTruth:
    def test_langlie_example(self):
        cfg = SimConfig(10, 20, 0, dm=-1, ds=.2, procedure=Procedure.LANGLIE,
                        bl=(4, 1, 0))
        t = sim_truth(cfg)
        assert t.tmu == pytest.approx(14.0)
        assert t.tsig == pytest.approx(1.866667, abs=1e-6)

    def test_log_bruceton_closed_form(self):
        e = math.e
        cfg = SimConfig(e, e ** 3, 0.5, procedure=Procedure.BRUCETON,
                        log_scale=True, bl=(4, 1, 0))
        t = sim_truth(cfg)
        assert t.tm == pytest.approx(2.0)  # log of the geometric mean

    def test_zero_deviations(self):
        cfg = SimConfig(**BASE)
        t = sim_truth(cfg)
        assert (t.tmu, t.tsig) == (t.tm, t.ts)
        assert t.tm == pytest.approx(11.0)
        assert t.ts == pytest.approx(3.0)


class TestSimulateTest:
    def test_deterministic(self):
        cfg = SimConfig(**BASE, iseed=42983)
        a = simulate_test(cfg)
        b = simulate_test(cfg)
        assert a.export_text() == b.export_text()

    def test_prefix_property(self):
        # shorter runs are prefixes of longer ones at the same seed
        short = simulate_test(SimConfig(0, 22, 3, n2=2, n3=0, reso=.01, iseed=7))
        long_ = simulate_test(SimConfig(0, 22, 3, n2=6, n3=4, p=.8, lam=1.0,
                                        reso=.01, iseed=7))
        xs_s = [r.x for r in short.trials.live_rows()]
        xs_l = [r.x for r in long_.trials.live_rows()]
        assert xs_l[:len(xs_s)] == xs_s

    def test_threshold_rule_holds(self):
        cfg = SimConfig(**BASE, iseed=11)
        s = simulate_test(cfg)
        strengths = s.meta["strengths"]
        for r, strength in zip(s.trials.live_rows(), strengths):
            assert (r.x >= strength) == (r.y == 1)

    def test_scale_equivariance(self):
        a = simulate_test(SimConfig(0, 22, 3, n2=6, n3=15, p=.9, lam=1.0,
                                    reso=.0001, iseed=5, dm=1, ds=1))
        b = simulate_test(SimConfig(0, 22, 3, n2=6, n3=15, p=.9, lam=1.0,
                                    reso=.001, iseed=5, dm=1, ds=1, M=10))
        ya = [r.y for r in a.trials.live_rows()]
        yb = [r.y for r in b.trials.live_rows()]
        assert ya == yb
        for ra, rb in zip(a.trials.live_rows(), b.trials.live_rows()):
            assert rb.x == pytest.approx(10 * ra.x, rel=1e-12)

    def test_batch_replay_closure(self):
        cfg = SimConfig(**BASE, iseed=42983)
        s = simulate_test(cfg)
        replay = run_batch(s.config, [r.y for r in s.trials.live_rows()],
                           n2=6, n3=15, p=.9, lam=1.0)
        assert [r.x for r in replay.trials.live_rows()] == \
               [r.x for r in s.trials.live_rows()]

    def test_total_size_caps(self):
        cfg = SimConfig(0, 22, 3, n2=-12, n3=-20, p=.9, lam=1.0, reso=.01,
                        iseed=3)
        s = simulate_test(cfg)
        assert len(s.trials.live_rows()) <= 20

    def test_llgo_false_stops_early(self):
        cfg = SimConfig(**BASE, iseed=9, llgo=False)
        s = simulate_test(cfg)
        assert not s.finished
        assert all(not r.id.startswith("I3") for r in s.trials.live_rows())

    def test_title_metadata(self):
        cfg = SimConfig(**BASE, iseed=42983, dm=0, ds=0)
        s = simulate_test(cfg)
        assert s.meta["tmu"] == pytest.approx(11.0)
        assert s.meta["tsig"] == pytest.approx(3.0)
        assert s.meta["iseed"] == 42983


class TestSweep:
    def test_single_trial_reduces_to_simulate(self):
        cfg = SimConfig(**BASE)
        r = sweep(cfg, 1, seed0=83, per_trial_draws=30)
        s = simulate_test(SimConfig(**BASE, iseed=83))
        assert r.rows[0].mu == pytest.approx(s.musig.mu)
        assert r.rows[0].n == len(s.trials.live_rows())

    def test_seed_allocation_disjoint(self):
        cfg = SimConfig(**BASE)
        r = sweep(cfg, 5, seed0=83, per_trial_draws=30)
        seeds = [row.seed for row in r.rows]
        assert seeds == [83, 113, 143, 173, 203]
        assert len(set(seeds)) == 5
        # distinct seeds produce distinct strength streams
        draws = {s: tuple(_strength_draw(s, t) for t in range(1, 31)) for s in seeds}
        vals = list(draws.values())
        assert len(set(vals)) == len(vals)

    def test_collision_rejected(self):
        with pytest.raises(ValueError):
            sweep(SimConfig(**BASE), 3, seed0=1, per_trial_draws=0)

    def test_monte_carlo_centering(self):
        # with no deviations the median fitted mean should sit near truth
        cfg = SimConfig(5, 15, 1.0, n2=4, n3=0, reso=.01)
        r = sweep(cfg, 120, seed0=1000, per_trial_draws=50)
        fits = [row.mu for row in r.finite_rows()]
        assert len(fits) > 60
        med = float(np.median(fits))
        se = np.std(fits, ddof=1) / math.sqrt(len(fits))
        assert abs(med - 10.0) < 4 * se + 0.2

    def test_text_output(self):
        cfg = SimConfig(**BASE)
        r = sweep(cfg, 2, seed0=83, per_trial_draws=40)
        text = sweep_to_text(r)
        lines = text.splitlines()
        assert lines[0] == "trial, seed, n, mu, sig, lp"
        assert len(lines) == 3
