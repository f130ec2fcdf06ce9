"""Step-machine tests: rule tables, golden traces, replay properties."""

import math

import pytest
from hypothesis import given, settings, strategies as st

from quantal.phase1 import (Phase1Config, Procedure, make_machine,
                            phase1_next, udtr_rule)

import goldens as G


def replay(cfg, pairs):
    m = make_machine(cfg)
    recs = []
    for x, y in pairs:
        assert not m.done
        r = m.recommend()
        recs.append(r)
        m.record(x, y)
    return recs, m


class TestUdtrRule:
    def test_median_rule(self):
        r = udtr_rule(1)
        assert r.down == frozenset({"1"})
        assert r.up == frozenset({"0"})
        assert r.p == 0.5

    def test_rule_three(self):
        r = udtr_rule(3)
        assert r.down == frozenset({"11"})
        assert r.up == frozenset({"0", "10"})
        assert r.p == pytest.approx(0.707107, abs=1e-6)

    def test_rule_five_complemented(self):
        r = udtr_rule(5, complement=True)
        assert r.down == frozenset({"1", "01", "001"})
        assert r.up == frozenset({"000"})
        assert r.p == pytest.approx(0.206299, abs=1e-6)

    def test_even_rules_match_table(self):
        assert udtr_rule(2).p == pytest.approx(0.596968, abs=1e-6)
        assert udtr_rule(4).p == pytest.approx(0.733614, abs=1e-6)
        assert udtr_rule(6).p == pytest.approx(0.804119, abs=1e-6)
        assert udtr_rule(2).down == frozenset({"11", "101"})
        assert udtr_rule(4).up == frozenset({"0", "10", "1100"})

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            udtr_rule(9)

    def test_zero_means_no_test(self):
        assert udtr_rule(0) is None


class TestThreePodTraces:
    def test_wt_phase1(self):
        cfg = Phase1Config(Procedure.THREEPOD, 0, 22, 3)
        pairs = list(zip(G.X_TP[:9], G.Y_TP[:9]))
        recs, m = replay(cfg, pairs)
        for rec, ex, ident in zip(recs, G.EX_TP[:9], G.ID_TP[:9]):
            assert rec.x == pytest.approx(ex, abs=1e-9)
            assert rec.stage == ident
        assert m.done

    def test_simulated_trace(self):
        cfg = Phase1Config(Procedure.THREEPOD, 0, 22, 3)
        pairs = [(5.5, 0), (16.5, 1), (11.0, 1), (8.25, 0), (7.35, 0),
                 (11.9, 1), (7.65, 0), (11.6, 0), (12.3, 1), (10.3, 0)]
        gold = [(5.5, "I1(iii)"), (16.5, "I1(iii)"), (11.0, "I2(ib)"),
                (8.25, "I2(ib)"), (7.35, "I2(id)"), (11.9, "I2(id)"),
                (7.65, "rI2(id)"), (11.6, "rI2(id)"), (12.3, "I3"), (10.3, "I3")]
        recs, m = replay(cfg, pairs)
        for rec, (x, ident) in zip(recs, gold):
            assert rec.x == pytest.approx(x, abs=1e-9)
            assert rec.stage == ident
        assert m.done

    def test_console_trace_with_deviations(self):
        cfg = Phase1Config(Procedure.THREEPOD, 1.2, 1.6, .05)
        pairs = [(1.3, 0), (1.5, 1), (1.4, 0), (1.45, 1), (1.38, 0), (1.46, 1),
                 (1.42, 1), (1.39, 0), (1.43, 1), (1.39, 0), (1.43, 1),
                 (1.4, 0), (1.42, 1), (1.41, 1), (1.4, 1), (1.4, 1), (1.4, 0)]
        gold = [1.3, 1.5, 1.4, 1.45, 1.385, 1.465, 1.425, 1.39, 1.43,
                1.39333, 1.42667, 1.39556, 1.42444, 1.41, 1.39704, 1.40494,
                1.39506]
        recs, m = replay(cfg, pairs)
        for rec, x in zip(recs, gold):
            assert round(rec.x, 5) == pytest.approx(x, abs=1e-9)
        assert m.done  # ends at point overlap under term1

    def test_term1_false_keeps_going_at_point_overlap(self):
        pairs = [(1.3, 0), (1.5, 1), (1.4, 0), (1.45, 1), (1.38, 0), (1.46, 1),
                 (1.42, 1), (1.39, 0), (1.43, 1), (1.39, 0), (1.43, 1),
                 (1.4, 0), (1.42, 1), (1.41, 1), (1.4, 1)]
        cfg_t = Phase1Config(Procedure.THREEPOD, 1.2, 1.6, .05, term1=True)
        cfg_f = Phase1Config(Procedure.THREEPOD, 1.2, 1.6, .05, term1=False)
        _, mt = replay(cfg_t, pairs)
        _, mf = replay(cfg_f, pairs)
        # at this point m1 == M0 == 1.4 exactly
        assert mt.recommend().stage == "I3"
        assert mf.recommend().stage.endswith("I2(id)")

    def test_crossed_opening_pair(self):
        # response at the low opening stress, none at the high one
        cfg = Phase1Config(Procedure.THREEPOD, 0, 22, 3)
        m = make_machine(cfg)
        for x, y in [(5.5, 1), (16.5, 0)]:
            m.recommend()
            m.record(x, y)
        r3 = m.recommend()
        assert r3.x == pytest.approx(11.0)
        assert r3.stage == "I1(iii)"
        m.record(11.0, 1)
        r4 = m.recommend()
        assert r4.x == pytest.approx(8.25)  # interior probe toward the gap
        m.record(8.25, 0)
        # overlap already exists, so the machine goes straight to stage 3
        assert m.recommend().stage == "I3"

    def test_all_zero_extension(self):
        cfg = Phase1Config(Procedure.THREEPOD, 0, 22, 3)
        m = make_machine(cfg)
        for x in (5.5, 16.5):
            m.recommend()
            m.record(x, 0)
        r = m.recommend()
        assert r.stage == "I1(ii)"
        assert r.x == pytest.approx(16.5 + 11.0 / 4)

    def test_degenerate_config_rejected(self):
        with pytest.raises(ValueError):
            make_machine(Phase1Config(Procedure.THREEPOD, 5, 5, 1))
        with pytest.raises(ValueError):
            make_machine(Phase1Config(Procedure.THREEPOD, 0, 22, 0))


class TestNeyerTrace:
    def test_table_trace(self):
        cfg = Phase1Config(Procedure.NEYER, .6, 1.4, .1)
        m = make_machine(cfg)
        for i, y in enumerate(G.Y_NY[:11]):
            r = m.recommend()
            assert r.x == pytest.approx(G.EX_NY[i], abs=2e-6)
            assert r.stage == G.ID_NY[i]
            m.record(round(r.x, 2), y)
        assert m.done

    def test_descending_ladder(self):
        cfg = Phase1Config(Procedure.NEYER, .6, 1.4, .1)
        m = make_machine(cfg)
        m.recommend(); m.record(1.0, 1)
        assert m.recommend().x == pytest.approx(0.8)
        m.record(0.8, 1)
        assert m.recommend().x == pytest.approx(0.6)
        m.record(0.6, 1)
        assert m.recommend().x == pytest.approx(0.2)


class TestUpDownTraces:
    def test_langlie_fresh_start(self):
        cfg = Phase1Config(Procedure.LANGLIE, 0, 5, 0, bl=(7, 0, 5))
        m = make_machine(cfg)
        ok = True
        for i, y in enumerate(G.Y_LG):
            r = m.recommend()
            rx = round(r.x, 5)
            assert rx == pytest.approx(G.RX_LG3[i], abs=1e-4)
            m.record(rx, y)
        assert m.done
        assert m.reversals() == 7

    def test_langlie_with_override(self):
        cfg = Phase1Config(Procedure.LANGLIE, 0, 5, 0, bl=(7, 0, 5))
        m = make_machine(cfg)
        for i, y in enumerate(G.Y_LG):
            r = m.recommend()
            actual = 2.5 if i == 0 else round(r.x, 5)
            if i > 0:
                assert actual == pytest.approx(G.RX_LG2[i], abs=5e-5)
            m.record(actual, y)
        assert m.done

    def test_bruceton_step_rule(self):
        cfg = Phase1Config(Procedure.BRUCETON, 10, 10, 0.25, bl=(4, 1, 0))
        m = make_machine(cfg)
        r = m.recommend()
        assert r.x == pytest.approx(10.0)
        m.record(10.0, 1)
        assert m.recommend().x == pytest.approx(9.75)
        m.record(9.75, 0)
        assert m.recommend().x == pytest.approx(10.0)
        m.record(10.0, 0)
        assert m.recommend().x == pytest.approx(10.25)

    def test_udtr_level_grouping(self):
        # rule (7,0,5): the level repeats until a trigger string completes
        cfg = Phase1Config(Procedure.LANGLIE, 0, 5, 0, bl=(7, 0, 5))
        m = make_machine(cfg)
        m.recommend(); m.record(1.03150, 0)
        assert m.recommend().x == pytest.approx(1.03150, abs=1e-4)  # "0" holds
        m.record(1.03150, 0)
        assert m.recommend().x == pytest.approx(1.03150, abs=1e-4)  # "00" holds
        m.record(1.03150, 1)  # "001" completes a down move
        assert m.recommend().x < 1.0

    def test_reversal_exit_requires_overlap_too(self):
        # nRev satisfied but no interval overlap: machine keeps going
        cfg = Phase1Config(Procedure.BRUCETON, 10, 10, 1.0, bl=(1, 1, 0))
        m = make_machine(cfg)
        m.recommend(); m.record(10.0, 1)   # move down
        m.recommend(); m.record(9.0, 0)    # move up: 1 reversal, no overlap
        assert not m.done
        m.recommend(); m.record(10.0, 0)
        assert not m.done
        m.recommend(); m.record(11.0, 1)   # still no overlap (1 above 0s)
        assert not m.done
        m.recommend(); m.record(10.0, 1)   # response at 10 < nonresponse 10? no
        # drive to overlap: response below the largest nonresponse
        m.recommend(); m.record(9.0, 1)
        assert m.done

    def test_dual_test_transition(self):
        cfg = Phase1Config(Procedure.BRUCETON, 10, 10, 0.5, bl=(1, 1, 3))
        m = make_machine(cfg)
        assert m.recommend().stage == "I1"
        m.record(10.0, 1)
        m.recommend(); m.record(9.5, 0)  # reversal: test 1 done
        r = m.recommend()
        assert r.stage == "I2"
        # second test homes toward the lower response level 1-p
        assert m.rule.p == pytest.approx(1 - 0.707107, abs=1e-6)

    def test_bl_required(self):
        with pytest.raises(ValueError):
            make_machine(Phase1Config(Procedure.LANGLIE, 0, 5, 0))


class TestPureView:
    def test_phase1_next_matches_machine(self):
        cfg = Phase1Config(Procedure.THREEPOD, 0, 22, 3)
        hist = list(zip(G.X_TP[:5], G.Y_TP[:5]))
        rec = phase1_next(cfg, hist)
        assert rec.x == pytest.approx(G.EX_TP[5], abs=1e-9)

    def test_phase1_next_complete(self):
        cfg = Phase1Config(Procedure.THREEPOD, 0, 22, 3)
        hist = list(zip(G.X_TP[:9], G.Y_TP[:9]))
        assert phase1_next(cfg, hist) is None

    def test_replay_determinism(self):
        cfg = Phase1Config(Procedure.NEYER, .6, 1.4, .1)
        pairs = [(1.0, 0), (1.2, 1), (1.1, 0)]
        a = phase1_next(cfg, pairs)
        b = phase1_next(cfg, pairs)
        assert (a.x, a.stage) == (b.x, b.stage)


@st.composite
def procedure_runs(draw):
    proc = draw(st.sampled_from(list(Procedure)))
    n = draw(st.integers(3, 16))
    ys = draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    return proc, ys


class TestEquivariance:
    @given(procedure_runs(), st.sampled_from([3.0, 10.0]))
    @settings(max_examples=60, deadline=None)
    def test_scaling(self, run, M):
        proc, ys = run
        base = dict(mlo=2.0, mhi=14.0, sg=1.5)
        bl = (2, 1, 0) if proc in (Procedure.BRUCETON, Procedure.LANGLIE) else None
        c1 = Phase1Config(proc, base["mlo"], base["mhi"], base["sg"], bl=bl)
        c2 = Phase1Config(proc, M * base["mlo"], M * base["mhi"], M * base["sg"], bl=bl)
        m1m, m2m = make_machine(c1), make_machine(c2)
        for y in ys:
            if m1m.done:
                assert m2m.done
                break
            r1 = m1m.recommend()
            r2 = m2m.recommend()
            # D-optimal probes locate a flat maximum: exact to float noise
            assert r2.x == pytest.approx(M * r1.x, rel=1e-6, abs=1e-6)
            assert r2.stage == r1.stage
            m1m.record(r1.x, y)
            m2m.record(M * r1.x, y)

    @given(procedure_runs(), st.sampled_from([-3.0, 7.0]))
    @settings(max_examples=40, deadline=None)
    def test_translation(self, run, c):
        proc, ys = run
        if proc is Procedure.LANGLIE and c < 0:
            c = abs(c)  # keep the lower bound sign conventions comparable
        bl = (2, 1, 0) if proc in (Procedure.BRUCETON, Procedure.LANGLIE) else None
        c1 = Phase1Config(proc, 2.0, 14.0, 1.5, bl=bl)
        c2 = Phase1Config(proc, 2.0 + c, 14.0 + c, 1.5, bl=bl)
        m1m, m2m = make_machine(c1), make_machine(c2)
        for y in ys:
            if m1m.done:
                assert m2m.done
                break
            r1 = m1m.recommend()
            r2 = m2m.recommend()
            assert r2.x == pytest.approx(r1.x + c, rel=1e-6, abs=1e-6)
            m1m.record(r1.x, y)
            m2m.record(r1.x + c, y)
