"""Plot-series structure and the SVG renderer."""

import pytest

from quantal import plotdata
from quantal.confidence import ConfidenceUnavailable
from quantal.phase1 import Phase1Config, Procedure
from quantal.plotdata import J_CODES, PlotKind, render_svg, series
from quantal.session import SessionConfig, run_batch

import goldens as G


def tp_session():
    cfg = SessionConfig(Phase1Config(Procedure.THREEPOD, 0, 22, 3), reso=1e-4)
    return run_batch(cfg, G.Y_TP, X=G.X_TP, n2=6, n3=15, p=.9, lam=1.0,
                     title="demo", units="in")


def ny_session():
    cfg = SessionConfig(Phase1Config(Procedure.NEYER, .6, 1.4, .1), reso=.01)
    return run_batch(cfg, G.Y_NY, n2=9, n3=0)


class TestJCodes:
    def test_all_fifteen(self):
        assert set(J_CODES) == set(range(1, 16))

    def test_method_families(self):
        assert J_CODES[15] == ("q", ("FM", "LR", "GLM"))
        assert J_CODES[3] == ("pq", ("FM",))
        assert J_CODES[4][1] == ("LR",)


class TestSeries:
    def test_history_layers(self):
        ps = series(tp_session(), 1)
        assert ps.kind is PlotKind.HISTORY
        n1 = len(ps.layers["responses"]["data"])
        n0 = len(ps.layers["nonresponses"]["data"])
        assert n1 + n0 == 30
        assert "next_stress" in ps.layers
        assert "lp_hat" in ps.layers

    def test_trajectory_table(self):
        s = tp_session()
        ps = series(s, 2)
        rows = ps.layers["table"]["data"]
        assert rows[0][0] == 7  # overlap appears at run 7 in this test
        assert rows[-1][0] == 30
        mu, sig = rows[-1][1], rows[-1][2]
        assert mu == pytest.approx(G.MUSIG_TP[0], abs=1e-4)
        assert sig == pytest.approx(G.MUSIG_TP[1], abs=1e-4)

    def test_response_curve_layers(self):
        ps = series(tp_session(), 3, conf=.95, J=15)
        assert "pav" in ps.layers and "cdf" in ps.layers
        for meth in ("FM", "LR", "GLM"):
            assert f"{meth}_q_lo" in ps.layers
            assert f"{meth}_q_hi" in ps.layers
        # every data point appears: responses above 1, nonresponses below 0
        assert all(y > 1 for _, y in ps.layers["resp_ticks"]["data"])
        assert all(y < 0 for _, y in ps.layers["nonresp_ticks"]["data"])
        n = len(ps.layers["resp_ticks"]["data"]) + len(ps.layers["nonresp_ticks"]["data"])
        assert n == 30

    def test_response_curve_requires_options(self):
        with pytest.raises(ValueError):
            series(tp_session(), 3)

    def test_simple_visual_zmr(self):
        ps = series(tp_session(), 4)
        m1, M0 = ps.layers["zmr"]["data"]
        assert m1 == pytest.approx(9.7)       # smallest responding stress
        assert M0 == pytest.approx(11.1558)   # largest non-responding stress

    def test_simple_visual_accepts_degenerate(self):
        cfg = SessionConfig(Phase1Config(Procedure.THREEPOD, 0, 22, 3), reso=.01)
        s = run_batch(cfg, [0, 1], X=[5.5, 16.5])  # incomplete, separated
        ps = series(s, 4)
        assert "zmr" not in ps.layers or len(ps.layers["zmr"]["data"]) == 2

    def test_joint_lr_multi_conf(self):
        ps = series(ny_session(), 5, conf_list=[.5, .8])
        polys = [k for k in ps.layers if k.startswith("joint_")]
        assert len(polys) == 2
        assert "asymptote" in ps.layers
        for k in polys:
            assert ps.layers[k]["bounded"]

    def test_joint_plus_individual(self):
        ps = series(ny_session(), 6, conf_list=[.8], p=.5)
        assert any(k.startswith("sq_") for k in ps.layers)

    def test_lr_bounds_needs_exactly_one_target(self):
        with pytest.raises(ValueError):
            series(ny_session(), 7, conf=.8)
        with pytest.raises(ValueError):
            series(ny_session(), 7, conf=.8, p=.5, q=5.0)
        ps = series(ny_session(), 7, conf=.8, p=.5)
        assert "limits" in ps.layers

    def test_linearized(self):
        ps = series(tp_session(), 8, conf=.9)
        assert "fit_line" in ps.layers
        assert "FM_lo" in ps.layers and "GLM_hi" in ps.layers

    def test_lr_pq_symmetry_on_curves(self):
        # the bound curve against p and the one against q coincide
        s = ny_session()
        ps = series(s, 3, conf=.8, J=4)
        lo = ps.layers["LR_q_lo"]["data"]
        hi = ps.layers["LR_q_hi"]["data"]
        # for each (q_l, p) on the lower curve, p equals the upper p bound
        # at that stress: check a few interior points via lims
        from quantal.confidence import lr_joint_contour, lr_individual_limits
        ct = lr_joint_contour(s.trials, .8)
        for q_l, p in lo[8:40:8]:
            r = lr_individual_limits(ct, Q=[q_l])[0]
            assert r.p_u == pytest.approx(p, abs=1e-5)


class TestSvg:
    def test_renders_and_deterministic(self):
        ps = series(tp_session(), 1)
        a = render_svg(ps)
        b = render_svg(ps)
        assert a == b
        assert a.startswith(b"<svg")
        assert b"</svg>" in a

    def test_empty_series_valid(self):
        ps = plotdata.PlotSeries(PlotKind.HISTORY, {})
        svg = render_svg(ps)
        assert svg.startswith(b"<svg")

    def test_history_marker_count(self):
        s = ny_session()
        svg = render_svg(series(s, 1)).decode()
        # 20 trial markers: crosses for responses, circles for the rest
        n_resp = sum(1 for r in s.trials.live_rows() if r.y == 1)
        assert svg.count("<circle") == 20 - n_resp
        crosses = svg.count("l6,6 m0,-6 l-6,6")
        assert crosses == n_resp
