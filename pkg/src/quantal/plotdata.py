"""Data series behind the eight standard plots, plus a small deterministic
SVG renderer.  Series are plain layer dictionaries so the operator console
can chart them without re-deriving any statistics.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .confidence import (AL49, ConfidenceUnavailable, conf_from_joint,
                         fm_limits, glm_limits, joint_confidence,
                         lr_individual_limits, lr_joint_contour, lr_limits)
from .numerics import OverlapStatus, classify_overlap, fit_mle, pav
from .session import fmt


class PlotKind(enum.IntEnum):
    HISTORY = 1
    MLE_TRAJECTORY = 2
    RESPONSE_CURVE_CI = 3
    SIMPLE_VISUAL = 4
    JOINT_LR = 5
    JOINT_PLUS_INDIVIDUAL_LR = 6
    LR_BOUNDS = 7
    LINEARIZED_TRIMETHOD = 8


# Which confidence targets ("p", "q" or both) and methods each J code selects.
J_CODES = {
    1: ("p", ("FM",)), 2: ("q", ("FM",)), 3: ("pq", ("FM",)),
    4: ("q", ("LR",)),
    5: ("p", ("GLM",)), 6: ("q", ("GLM",)), 7: ("pq", ("GLM",)),
    8: ("p", ("FM", "LR")), 9: ("q", ("FM", "LR")),
    10: ("p", ("FM", "GLM")), 11: ("q", ("FM", "GLM")),
    12: ("p", ("LR", "GLM")), 13: ("q", ("LR", "GLM")),
    14: ("p", ("FM", "LR", "GLM")), 15: ("q", ("FM", "LR", "GLM")),
}

_LIMS = {"FM": fm_limits, "GLM": glm_limits, "LR": lr_limits}


@dataclass
class PlotSeries:
    kind: PlotKind
    layers: dict
    x_label: str = "stimulus"
    y_label: str = ""
    titles: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "kind": int(self.kind), "kind_name": self.kind.name,
            "x_label": self.x_label, "y_label": self.y_label,
            "titles": self.titles, "layers": self.layers,
        }


def series(session, kind, conf=None, J=None, p=None, q=None, conf_list=None,
           jconf=None) -> PlotSeries:
    """Compute the data series for one plot kind of a session."""
    kind = PlotKind(kind)
    if jconf is not None:
        if conf is not None:
            raise ValueError("give conf or jconf, not both")
        conf = conf_from_joint(jconf)
    builder = {
        PlotKind.HISTORY: _history,
        PlotKind.MLE_TRAJECTORY: _trajectory,
        PlotKind.RESPONSE_CURVE_CI: _response_curve,
        PlotKind.SIMPLE_VISUAL: _simple_visual,
        PlotKind.JOINT_LR: _joint_lr,
        PlotKind.JOINT_PLUS_INDIVIDUAL_LR: _joint_plus_individual,
        PlotKind.LR_BOUNDS: _lr_bounds,
        PlotKind.LINEARIZED_TRIMETHOD: _linearized,
    }[kind]
    return builder(session, conf=conf, J=J, p=p, q=q, conf_list=conf_list)


def _titles(session):
    t = {"title": session.title or "", "units": session.units or ""}
    if session.meta.get("sim"):
        m = session.meta
        t["truth"] = (f"(mu_t, sigma_t) = ({fmt(m['tm'])}, {fmt(m['ts'])})"
                      f" + ({fmt(m['dm'])}, {fmt(m['ds'])}), i_s = {m['iseed']}")
    en = session.en
    t["about"] = "{" + ",".join(fmt(v) for v in (session.config.phase1.mlo,
                                                 session.config.phase1.mhi,
                                                 session.config.phase1.sg)) \
        + "|" + ",".join(str(v) for v in en) + "}"
    return t


def _history(session, **_):
    rows = session.trials.live_rows()
    resp = [(i + 1, r.x) for i, r in enumerate(rows) if r.y == 1]
    nonresp = [(i + 1, r.x) for i, r in enumerate(rows) if r.y == 0]
    layers = {
        "responses": {"type": "points", "marker": "x", "data": resp},
        "nonresponses": {"type": "points", "marker": "o", "data": nonresp},
    }
    nxt = _next_stress(session)
    if nxt is not None:
        layers["next_stress"] = {"type": "bar_right", "data": [(len(rows) + 1, nxt)]}
    fit = session.musig
    if fit.ok and getattr(session, "p", None):
        layers["lp_hat"] = {"type": "bar_edge", "data": [(len(rows), fit.quantile(session.p))]}
    if session.meta.get("sim") and session.finished and session.meta.get("p"):
        tmu, tsig = session.meta["tmu"], session.meta["tsig"]
        pp = session.meta["p"]
        layers["lp_true"] = {"type": "bar_edge", "color": "grey",
                            "data": [(len(rows), tmu + K.norm_ppf(pp) * tsig)]}
    return PlotSeries(PlotKind.HISTORY, layers, x_label="run", y_label="stimulus",
                      titles=_titles(session))


def _next_stress(session):
    terminal = [r for r in session.trials if r.count == 0]
    if terminal:
        return terminal[-1].rx
    rec = session.recommended() if not session.finished else None
    return rec[0] if rec else None


def _trajectory(session, **_):
    rows = session.trials.live_rows()
    pts = []
    p = getattr(session, "p", None)
    for n in range(1, len(rows) + 1):
        fit = fit_mle(session.trials.prefix(n))
        if fit.ok:
            lp = fit.quantile(p) if p else None
            pts.append((n, fit.mu, fit.sig, lp))
    layers = {
        "mu": {"type": "steps", "data": [(n, mu) for n, mu, _, _ in pts]},
        "sigma": {"type": "steps", "data": [(n, sg) for n, _, sg, _ in pts]},
    }
    if p:
        layers["lp"] = {"type": "steps", "data": [(n, lp) for n, _, _, lp in pts if lp is not None]}
    layers["table"] = {"type": "table",
                       "columns": ["run", "mu", "sig", "lp"],
                       "data": [(n, mu, sg, lp) for n, mu, sg, lp in pts]}
    return PlotSeries(PlotKind.MLE_TRAJECTORY, layers, x_label="run",
                      titles=_titles(session))


def _response_curve(session, conf=None, J=None, **_):
    if conf is None or J is None:
        raise ValueError("response-curve series needs conf and J")
    target, methods = J_CODES[int(J)]
    trials = session.trials
    fit = fit_mle(trials)
    if not fit.ok:
        raise ConfidenceUnavailable("response curve needs finite estimates")
    pv = pav(trials)
    xs, ys = trials.xy()
    lo = min(xs.min(), fit.mu - 3.5 * fit.sig)
    hi = max(xs.max(), fit.mu + 3.5 * fit.sig)
    grid = np.linspace(lo, hi, 201)
    layers = {
        "pav": {"type": "steps", "data": _pav_steps(pv)},
        "cdf": {"type": "curve",
                "data": [(float(x), K.norm_cdf((x - fit.mu) / fit.sig)) for x in grid]},
        "resp_ticks": {"type": "points", "marker": "x",
                       "data": [(float(x), 1.04) for x in xs[ys == 1]]},
        "nonresp_ticks": {"type": "points", "marker": "o",
                          "data": [(float(x), -0.04) for x in xs[ys == 0]]},
    }
    pgrid = [pp for pp in AL49 if 0.001 <= pp <= 0.999]
    for meth in methods:
        rows = _LIMS[meth](trials, conf, P=pgrid)
        if target in ("q", "pq"):
            layers[f"{meth}_q_lo"] = {"type": "curve",
                                      "data": [(r.q_l, r.p) for r in rows]}
            layers[f"{meth}_q_hi"] = {"type": "curve",
                                      "data": [(r.q_u, r.p) for r in rows]}
        if target in ("p", "pq"):
            layers[f"{meth}_p_lo"] = {"type": "curve",
                                      "data": [(r.q, r.p_l) for r in rows]}
            layers[f"{meth}_p_hi"] = {"type": "curve",
                                      "data": [(r.q, r.p_u) for r in rows]}
    return PlotSeries(PlotKind.RESPONSE_CURVE_CI, layers,
                      y_label="probability of response", titles=_titles(session))


def _pav_steps(pv):
    data = []
    for i, (bx, lv) in enumerate(zip(pv.breakpoints, pv.levels)):
        data.append((float(bx), float(lv)))
    return data


def _simple_visual(session, **_):
    xs, ys = session.trials.xy()
    summ = classify_overlap(session.trials)
    layers = {
        "responses": {"type": "points", "marker": "x",
                      "data": [(float(x), 1.0) for x in xs[ys == 1]]},
        "nonresponses": {"type": "points", "marker": "o",
                         "data": [(float(x), 0.0) for x in xs[ys == 0]]},
    }
    if summ.m1 is not None and summ.M0 is not None:
        layers["zmr"] = {"type": "vlines", "data": [summ.m1, summ.M0]}
    return PlotSeries(PlotKind.SIMPLE_VISUAL, layers, titles=_titles(session))


def _joint_lr(session, conf_list=None, **_):
    confs = conf_list or [0.9]
    layers = {}
    asym = None
    for c in confs:
        ct = lr_joint_contour(session.trials, c)
        layers[f"joint_{fmt(c)}"] = {
            "type": "polygon", "conf": c, "jconf": ct.jconf, "bounded": ct.bounded,
            "cmax": ct.cmax, "data": [(float(m), float(s)) for m, s in ct.boundary()],
        }
        asym = ct.asymptote
        if ct.mle.ok:
            layers["mle"] = {"type": "points", "marker": "+",
                             "data": [(ct.mle.mu, ct.mle.sig)]}
    if asym:
        layers["asymptote"] = {"type": "abline", "slope": asym[0], "intercept": asym[1],
                               "style": "dashed"}
    return PlotSeries(PlotKind.JOINT_LR, layers, x_label="mean", y_label="sigma",
                      titles=_titles(session))


def _joint_plus_individual(session, conf_list=None, p=None, q=None, **_):
    base = _joint_lr(session, conf_list=conf_list)
    confs = conf_list or [0.9]
    if p is None and q is None:
        raise ValueError("need p or q for individual bounds")
    for c in confs:
        ct = lr_joint_contour(session.trials, c)
        if not ct.bounded:
            continue
        bound = ct.boundary()
        if p:
            zp = K.norm_ppf(p)
            base.layers[f"sq_{fmt(c)}"] = {
                "type": "curve", "data": [(m + zp * s, s) for m, s in bound]}
        if q:
            base.layers[f"sp_{fmt(c)}"] = {
                "type": "curve", "data": [(K.norm_cdf((q - m) / s), s) for m, s in bound]}
    fit = fit_mle(session.trials)
    if p and fit.ok and base.layers.get("asymptote"):
        m0 = base.layers["asymptote"]["slope"]
        zp = K.norm_ppf(p)
        if zp + 1.0 / m0 != 0:
            m1s = 1.0 / (zp + 1.0 / m0)
            base.layers["sq_asymptote"] = {
                "type": "abline", "slope": m1s,
                "intercept": fit.sig - m1s * (fit.mu + zp * fit.sig), "style": "dashed"}
    base.kind = PlotKind.JOINT_PLUS_INDIVIDUAL_LR
    return base


def _lr_bounds(session, conf=None, p=None, q=None, conf_list=None, **_):
    if conf is None:
        raise ValueError("needs conf (or a joint conf mapped through the chi-square link)")
    if (p is None) == (q is None):
        raise ValueError("exactly one of p and q must be given")
    ct = lr_joint_contour(session.trials, conf)
    layers = {
        "joint": {"type": "polygon", "conf": conf, "jconf": ct.jconf,
                  "bounded": ct.bounded, "cmax": ct.cmax,
                  "data": [(float(m), float(s)) for m, s in ct.boundary()]},
    }
    if ct.bounded:
        rows = lr_individual_limits(ct, P=[p] if p else (), Q=[q] if q else ())
        r = rows[0]
        layers["limits"] = {"type": "table",
                            "columns": ["q_l", "q", "q_u", "p_l", "p", "p_u"],
                            "data": [list(r.astuple())]}
    return PlotSeries(PlotKind.LR_BOUNDS, layers, x_label="mean", y_label="sigma",
                      titles=_titles(session))


def _linearized(session, conf=None, **_):
    if conf is None:
        raise ValueError("needs conf")
    trials = session.trials
    fit = fit_mle(trials)
    if not fit.ok:
        raise ConfidenceUnavailable("needs finite estimates")
    pv = pav(trials)
    layers = {
        "fit_line": {"type": "abline", "slope": 1.0 / fit.sig,
                     "intercept": -fit.mu / fit.sig},
        "pav_z": {"type": "points", "marker": "o",
                  "data": [(float(bx), K.norm_ppf(min(max(lv, 1e-6), 1 - 1e-6)))
                           for bx, lv in zip(pv.breakpoints, pv.levels)]},
    }
    pgrid = [pp for pp in AL49 if 0.005 <= pp <= 0.995]
    for meth in ("FM", "LR", "GLM"):
        try:
            rows = _LIMS[meth](trials, conf, P=pgrid)
        except ConfidenceUnavailable:
            continue
        layers[f"{meth}_lo"] = {"type": "curve",
                                "data": [(r.q_l, K.norm_ppf(r.p)) for r in rows]}
        layers[f"{meth}_hi"] = {"type": "curve",
                                "data": [(r.q_u, K.norm_ppf(r.p)) for r in rows]}
    return PlotSeries(PlotKind.LINEARIZED_TRIMETHOD, layers,
                      y_label="z(probability)", titles=_titles(session))


# --- SVG rendering -----------------------------------------------------------

_W, _H, _PAD = 720, 480, 56
_COLORS = {"FM": "#c0392b", "LR": "#2471a3", "GLM": "#1e8449"}


def _color_for(name):
    for key, c in _COLORS.items():
        if name.startswith(key):
            return c
    return "#222222"


def render_svg(ps: PlotSeries) -> bytes:
    """Standalone SVG for a series; identical series give identical bytes."""
    pts = []
    for layer in ps.layers.values():
        if layer["type"] in ("points", "curve", "steps", "polygon"):
            pts.extend(layer["data"])
        elif layer["type"] in ("bar_right", "bar_edge"):
            pts.extend(layer["data"])
        elif layer["type"] == "vlines":
            pts.extend((v, 0.5) for v in layer["data"])
    pts = [(x, y) for x, y in pts
           if x is not None and y is not None
           and math.isfinite(x) and math.isfinite(y)]
    if pts:
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        x0, x1 = min(xs), max(xs)
        y0, y1 = min(ys), max(ys)
    else:
        x0, x1, y0, y1 = 0.0, 1.0, 0.0, 1.0
    if x1 - x0 < 1e-12:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 - y0 < 1e-12:
        y0, y1 = y0 - 0.5, y1 + 0.5
    mx = 0.05 * (x1 - x0)
    my = 0.05 * (y1 - y0)
    x0, x1, y0, y1 = x0 - mx, x1 + mx, y0 - my, y1 + my

    def sx(v):
        return _PAD + (v - x0) / (x1 - x0) * (_W - 2 * _PAD)

    def sy(v):
        return _H - _PAD - (v - y0) / (y1 - y0) * (_H - 2 * _PAD)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
           f'viewBox="0 0 {_W} {_H}">',
           f'<rect width="{_W}" height="{_H}" fill="white"/>']
    # axes
    out.append(f'<line x1="{_PAD}" y1="{_H-_PAD}" x2="{_W-_PAD}" y2="{_H-_PAD}" '
               'stroke="black" stroke-width="1"/>')
    out.append(f'<line x1="{_PAD}" y1="{_PAD}" x2="{_PAD}" y2="{_H-_PAD}" '
               'stroke="black" stroke-width="1"/>')
    for i in range(5):
        xv = x0 + (x1 - x0) * i / 4
        yv = y0 + (y1 - y0) * i / 4
        out.append(f'<text x="{sx(xv):.1f}" y="{_H-_PAD+16}" font-size="10" '
                   f'text-anchor="middle">{fmt(xv, 4)}</text>')
        out.append(f'<text x="{_PAD-6}" y="{sy(yv):.1f}" font-size="10" '
                   f'text-anchor="end">{fmt(yv, 4)}</text>')
    title = ps.titles.get("title") or ps.kind.name.replace("_", " ").lower()
    out.append(f'<text x="{_W/2}" y="22" font-size="13" text-anchor="middle">{_esc(title)}</text>')
    sub = ps.titles.get("truth") or ps.titles.get("about") or ""
    if sub:
        out.append(f'<text x="{_W/2}" y="38" font-size="10" text-anchor="middle">{_esc(sub)}</text>')
    out.append(f'<text x="{_W/2}" y="{_H-12}" font-size="11" text-anchor="middle">{_esc(ps.x_label)}</text>')

    for name in sorted(ps.layers):
        layer = ps.layers[name]
        color = layer.get("color") or _color_for(name)
        dash = ' stroke-dasharray="6 4"' if layer.get("style") == "dashed" else ""
        t = layer["type"]
        if t == "points":
            for x, y in layer["data"]:
                if layer.get("marker") == "x":
                    out.append(f'<path d="M{sx(x)-3:.1f},{sy(y)-3:.1f} l6,6 m0,-6 l-6,6" '
                               f'stroke="{color}" stroke-width="1.2"/>')
                elif layer.get("marker") == "+":
                    out.append(f'<path d="M{sx(x)-4:.1f},{sy(y):.1f} l8,0 m-4,-4 l0,8" '
                               f'stroke="{color}" stroke-width="1.2"/>')
                else:
                    out.append(f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="3" '
                               f'fill="none" stroke="{color}"/>')
        elif t in ("curve", "steps", "polygon"):
            if not layer["data"]:
                continue
            coords = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in layer["data"])
            tag = "polygon" if t == "polygon" else "polyline"
            out.append(f'<{tag} points="{coords}" fill="none" stroke="{color}" '
                       f'stroke-width="1.2"{dash}/>')
        elif t == "vlines":
            for v in layer["data"]:
                out.append(f'<line x1="{sx(v):.1f}" y1="{_PAD}" x2="{sx(v):.1f}" '
                           f'y2="{_H-_PAD}" stroke="{color}" stroke-dasharray="4 3"/>')
        elif t == "abline":
            yl = layer["slope"] * x0 + layer["intercept"]
            yr = layer["slope"] * x1 + layer["intercept"]
            out.append(f'<line x1="{sx(x0):.1f}" y1="{sy(yl):.1f}" x2="{sx(x1):.1f}" '
                       f'y2="{sy(yr):.1f}" stroke="{color}"{dash}/>')
        elif t in ("bar_right", "bar_edge"):
            for x, y in layer["data"]:
                out.append(f'<line x1="{sx(x)-6:.1f}" y1="{sy(y):.1f}" x2="{sx(x)+6:.1f}" '
                           f'y2="{sy(y):.1f}" stroke="{color}" stroke-width="3"/>')
    out.append("</svg>")
    return "\n".join(out).encode()


def _esc(s):
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
