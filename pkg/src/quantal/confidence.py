"""Confidence limits on response probabilities and quantiles.

Three methods: the information-matrix delta method (FM), fitted-model
standard errors with t quantiles (GLM), and profile likelihood-ratio
regions (LR), plus the joint-region tracer the LR limits are carved from.
All confidence inputs are two-sided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import t as student_t

from . import _kernels as K
from .numerics import (MleResult, OverlapStatus, TrialSet, classify_overlap,
                       fit_mle, info_matrix, null_loglik)

# probability grids spanning the range of practical interest
AL15 = (.000001, .00001, .0001, .001, .01, .1, .25, .5, .75, .9, .99, .999,
        .9999, .99999, .999999)
AL49 = tuple([.000001, .00001, .0001, .001, .01]
             + [round(.025 * i, 3) for i in range(1, 40)]
             + [.99, .999, .9999, .99999, .999999])


class ConfidenceUnavailable(Exception):
    pass


@dataclass(frozen=True)
class ConfidenceRow:
    q_l: float
    q: float
    q_u: float
    p_l: float
    p: float
    p_u: float

    def astuple(self):
        return (self.q_l, self.q, self.q_u, self.p_l, self.p, self.p_u)


def _require_fit(trials) -> MleResult:
    fit = fit_mle(trials)
    if not fit.ok:
        raise ConfidenceUnavailable(f"no finite estimates: {fit.status.value}")
    return fit


def fm_limits(trials: TrialSet, conf: float, P=(), Q=()) -> list[ConfidenceRow]:
    """Delta-method limits from the inverse information matrix."""
    fit = _require_fit(trials)
    mu, sig = fit.mu, fit.sig
    v = info_matrix(trials, mu, sig).vcov
    if v is None:
        raise ConfidenceUnavailable("singular information matrix")
    zc = K.norm_ppf((1.0 + conf) / 2.0)
    rows = []
    for zp, q, p in _query_points(mu, sig, P, Q):
        se = math.sqrt(v[0, 0] + 2.0 * v[0, 1] * zp + v[1, 1] * zp * zp)
        dp = K.norm_pdf(zp) * zc * se / sig
        rows.append(ConfidenceRow(
            q - zc * se, q, q + zc * se,
            min(max(p - dp, 0.0), 1.0), p, min(max(p + dp, 0.0), 1.0),
        ))
    return rows


def glm_limits(trials: TrialSet, conf: float, P=(), Q=()) -> list[ConfidenceRow]:
    """Fitted-coefficient limits with t quantiles on n-2 degrees of freedom."""
    fit = _require_fit(trials)
    mu, sig = fit.mu, fit.sig
    a, b = -mu / sig, 1.0 / sig
    x, _ = trials.xy()
    n = len(x)
    if n <= 2:
        raise ConfidenceUnavailable("need more than 2 trials for t limits")
    w = np.array([K.g2(a + b * xi) for xi in x])
    xtwx = np.array([
        [w.sum(), (w * x).sum()],
        [(w * x).sum(), (w * x * x).sum()],
    ])
    V = np.linalg.inv(xtwx)
    tc = float(student_t.ppf((1.0 + conf) / 2.0, n - 2))
    rows = []
    for zp, q, p in _query_points(mu, sig, P, Q):
        se1 = math.sqrt((V[0, 0] + 2.0 * q * V[0, 1] + q * q * V[1, 1])) / b
        se2 = math.sqrt(V[0, 0] + 2.0 * q * V[0, 1] + q * q * V[1, 1])
        rows.append(ConfidenceRow(
            q - tc * se1, q, q + tc * se1,
            K.norm_cdf(zp - tc * se2), p, K.norm_cdf(zp + tc * se2),
        ))
    return rows


def _query_points(mu, sig, P, Q):
    pts = []
    for p in P:
        if not 0.0 < p < 1.0:
            raise ValueError("probabilities must lie in (0,1)")
        zp = K.norm_ppf(p)
        pts.append((zp, mu + zp * sig, p))
    for q in Q:
        zp = (q - mu) / sig
        pts.append((zp, float(q), K.norm_cdf(zp)))
    if not pts:
        raise ValueError("need at least one probability or quantile")
    return pts


# --- likelihood-ratio machinery ---------------------------------------------


@dataclass
class LrContour:
    conf: float
    jconf: float
    cmax: float
    level: float          # log-likelihood value on the boundary
    bounded: bool
    mle: MleResult
    s_grid: np.ndarray    # sigma values of the traced slices
    m_left: np.ndarray    # lower-mean boundary branch
    m_right: np.ndarray   # upper-mean boundary branch
    asymptote: tuple[float, float] | None  # (slope, intercept) of the stretch axis

    def boundary(self):
        """Closed polygon of (m, s) points, counterclockwise-ish."""
        down = list(zip(self.m_left, self.s_grid))
        up = list(zip(self.m_right[::-1], self.s_grid[::-1]))
        return np.array(down + up)


def joint_confidence(conf: float) -> float:
    """Map an individual two-sided confidence to the joint-region level."""
    z = K.norm_ppf((1.0 + conf) / 2.0)
    return 1.0 - math.exp(-0.5 * z * z)


def conf_from_joint(jconf: float) -> float:
    q2 = -2.0 * math.log1p(-jconf)
    return 2.0 * K.norm_cdf(math.sqrt(q2)) - 1.0


def lr_joint_contour(trials: TrialSet, conf: float, slices: int = 320) -> LrContour:
    """Trace the joint likelihood-ratio region boundary for (mean, sigma).

    With separated data the likelihood maximum is recalibrated to the
    constant-model maximum, which keeps worst-case contours available.
    """
    x, y = trials.xy()
    ybar = y.mean()
    if ybar <= 0.0 or ybar >= 1.0:
        raise ConfidenceUnavailable("all responses equal: no contour exists")
    fit = fit_mle(trials)
    m_full = fit.maxll
    m_null = fit.maxlc
    if m_full == 0.0:
        m_full = m_null  # no-overlap recalibration
    jconf = joint_confidence(conf)
    level = math.log1p(-jconf) + m_full
    dm = max(m_full - m_null, 0.0)
    cmax = 2.0 * K.norm_cdf(math.sqrt(2.0 * dm)) - 1.0

    asym = None
    if 0.0 < ybar < 1.0 and fit.mu is not None and fit.sig:
        zc = K.norm_ppf(ybar)
        if zc != 0.0:
            m0 = -1.0 / zc
            asym = (m0, fit.sig - m0)

    span = float(x.max() - x.min()) or 1.0
    s_ref = fit.sig if (fit.sig and fit.sig > 0) else span / 4.0
    s_ref = max(s_ref, 1e-6 * span)

    def profile(s):
        lo = float(x.min()) - 60.0 * (span + s)
        hi = float(x.max()) + 60.0 * (span + s)
        return K.profile_mu_max(x, y, s, lo, hi)

    # bracket the sigma extent of the region
    s_hi = s_ref
    hi_closed = False
    for _ in range(200):
        if profile(s_hi)[1] < level:
            hi_closed = True
            break
        s_hi *= 2.0
    s_lo = s_ref
    lo_closed = False
    for _ in range(200):
        s_lo *= 0.5
        if profile(s_lo)[1] < level:
            lo_closed = True
            break
        if s_lo < 1e-12 * span:
            break
    bounded = hi_closed and lo_closed and conf < cmax

    s_top = _bisect_sigma(profile, level, s_hi / 2.0, s_hi) if hi_closed else s_hi
    s_bot = _bisect_sigma(profile, level, s_lo * 2.0, s_lo) if lo_closed else s_lo

    grid = np.exp(np.linspace(math.log(s_bot), math.log(s_top), slices))
    grid[0], grid[-1] = s_bot, s_top
    m_left = np.empty_like(grid)
    m_right = np.empty_like(grid)
    for i, s in enumerate(grid):
        mstar, lmax = profile(s)
        if lmax < level:
            m_left[i] = m_right[i] = mstar
            continue
        lo = mstar
        step = max(span, s)
        while K.loglik(x, y, lo - step, s) > level:
            step *= 2.0
        m_left[i] = K.mu_root(x, y, s, level, lo - step, mstar)
        step = max(span, s)
        while K.loglik(x, y, mstar + step, s) > level:
            step *= 2.0
        m_right[i] = K.mu_root(x, y, s, level, mstar + step, mstar)
    return LrContour(conf=conf, jconf=jconf, cmax=cmax, level=level,
                     bounded=bounded, mle=fit, s_grid=grid,
                     m_left=m_left, m_right=m_right, asymptote=asym)


def _bisect_sigma(profile, level, s_in, s_out):
    # profile(s_in) >= level > profile(s_out)
    for _ in range(100):
        mid = math.sqrt(s_in * s_out)
        if profile(mid)[1] >= level:
            s_in = mid
        else:
            s_out = mid
        if abs(s_out - s_in) <= 1e-12 * max(s_in, s_out):
            break
    return s_in


def lr_individual_limits(contour: LrContour, P=(), Q=()) -> list[ConfidenceRow]:
    """Extremes of quantile and probability over the joint boundary."""
    if not contour.bounded:
        raise ConfidenceUnavailable(
            f"joint region is unbounded at conf >= cmax = {contour.cmax:.6f}")
    fit = contour.mle
    if fit.mu is None or not fit.sig:
        raise ConfidenceUnavailable("no point estimates to anchor limits")
    rows = []
    for zp, q, p in _query_points(fit.mu, fit.sig, P, Q):
        q_l = _extremize(contour, lambda m, s: m + zp * s, minimum=True)
        q_u = _extremize(contour, lambda m, s: m + zp * s, minimum=False)
        t_l = _extremize(contour, lambda m, s: (q - m) / s, minimum=True)
        t_u = _extremize(contour, lambda m, s: (q - m) / s, minimum=False)
        rows.append(ConfidenceRow(q_l, q, q_u,
                                  K.norm_cdf(t_l), p, K.norm_cdf(t_u)))
    return rows


def _extremize(contour, f, minimum):
    sign = 1.0 if minimum else -1.0
    best = math.inf
    best_at = 0
    pts = contour.boundary()
    vals = sign * np.array([f(m, s) for m, s in pts])
    best_at = int(np.argmin(vals))
    best = vals[best_at]
    # local golden refinement along the boundary parameterization
    n = len(pts)
    lo, hi = max(best_at - 1, 0), min(best_at + 1, n - 1)

    def val(t):
        i = int(t)
        frac = t - i
        if i >= n - 1:
            m, s = pts[-1]
        else:
            m = pts[i][0] * (1 - frac) + pts[i + 1][0] * frac
            s = pts[i][1] * (1 - frac) + pts[i + 1][1] * frac
        return sign * f(m, s)

    a, b = float(lo), float(hi)
    gr = 0.5 * (math.sqrt(5.0) - 1.0)
    c, d = b - gr * (b - a), a + gr * (b - a)
    fc, fd = val(c), val(d)
    for _ in range(80):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - gr * (b - a)
            fc = val(c)
        else:
            a, c, fc = c, d, fd
            d = a + gr * (b - a)
            fd = val(d)
    best = min(best, fc, fd)
    return sign * best


def lr_limits(trials: TrialSet, conf: float, P=(), Q=()) -> list[ConfidenceRow]:
    contour = lr_joint_contour(trials, conf)
    return lr_individual_limits(contour, P, Q)


_METHODS = {"FM": fm_limits, "LR": lr_limits, "GLM": glm_limits}


def lims(method: str, trials: TrialSet, conf: float, P=(), Q=()) -> list[ConfidenceRow]:
    """Dispatch to one of the three limit methods; rows ordered P then Q."""
    try:
        impl = _METHODS[method.upper()]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; expected FM, LR or GLM")
    if not P and not Q:
        raise ValueError("need at least one probability or quantile")
    if not 0.0 < conf < 1.0:
        raise ValueError("conf must lie in (0,1)")
    return impl(trials, conf, tuple(P), tuple(Q))
