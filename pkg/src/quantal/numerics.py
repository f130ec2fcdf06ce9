"""Distributional primitives, probit maximum likelihood and related numerics.

Everything operates on a :class:`TrialSet`, the ordered record of a
sensitivity test: one stimulus level and one binary response per row.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels as K


class OverlapStatus(enum.Enum):
    INTERVAL_OVERLAP = "interval_overlap"
    POINT_OVERLAP = "point_overlap"
    NO_OVERLAP = "no_overlap"
    INFINITE_SIGMA = "infinite_sigma"


@dataclass(frozen=True)
class TrialRecord:
    """One row of a test: actual stimulus, response, and bookkeeping columns.

    ``x`` is the stimulus on the analysis scale (log scale when the log
    option is active), ``rx`` the recommended stimulus as shown to the
    operator, ``ex`` the exact recommendation rounded to 1e-6, ``tx`` the
    stimulus on the operator's scale.  ``count`` is 0 only on the terminal
    "next recommended" row appended after a completed refinement phase.
    """

    x: float
    y: int
    count: int = 1
    rx: float = 0.0
    ex: float = 0.0
    tx: float = 0.0
    id: str = ""


class TrialSet:
    """Ordered sequence of trial records with cached numeric views."""

    def __init__(self, rows=()):
        self.rows: list[TrialRecord] = list(rows)

    def append(self, row: TrialRecord):
        self.rows.append(row)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __getitem__(self, i):
        return self.rows[i]

    def live_rows(self):
        return [r for r in self.rows if r.count == 1]

    def xy(self):
        """Stimulus and response arrays over counted rows."""
        live = self.live_rows()
        x = np.array([r.x for r in live], dtype=float)
        y = np.array([r.y for r in live], dtype=np.int64)
        return x, y

    def prefix(self, n: int) -> "TrialSet":
        return TrialSet(self.rows[:n])

    @staticmethod
    def from_xy(x, y) -> "TrialSet":
        return TrialSet(
            TrialRecord(x=float(xi), y=int(yi), rx=float(xi), ex=round(float(xi), 6), tx=float(xi))
            for xi, yi in zip(x, y)
        )


@dataclass(frozen=True)
class OverlapSummary:
    status: OverlapStatus
    m1: float | None  # smallest stimulus with a response
    M0: float | None  # largest stimulus with a non-response
    delta: float | None  # mean(x | y=1) - mean(x | y=0)

    @property
    def zmr(self):
        """The zone of mixed results [m1, M0], when interval overlap holds."""
        if self.status is OverlapStatus.INTERVAL_OVERLAP or (
            self.m1 is not None and self.M0 is not None and self.m1 < self.M0
        ):
            return (self.m1, self.M0)
        return None


@dataclass(frozen=True)
class MleResult:
    mu: float | None
    sig: float | None
    maxll: float
    maxlc: float
    status: OverlapStatus

    @property
    def ok(self) -> bool:
        """True when a finite positive-sigma estimate exists."""
        return (
            self.status is OverlapStatus.INTERVAL_OVERLAP
            and self.mu is not None
            and self.sig is not None
            and self.sig > 0
        )

    def quantile(self, p: float) -> float:
        return self.mu + K.norm_ppf(p) * self.sig


@dataclass(frozen=True)
class InfoMatrix:
    b11: float
    b12: float
    b22: float
    mu: float
    sig: float

    @property
    def det(self) -> float:
        return self.b11 * self.b22 - self.b12 * self.b12

    @property
    def vcov(self):
        """Approximate covariance of (mu_hat, sig_hat): sig^2 * b^-1.

        None when the information matrix is singular.
        """
        d = self.det
        if d <= 0 or not math.isfinite(d):
            return None
        s2 = self.sig * self.sig
        return np.array(
            [
                [self.b22 * s2 / d, -self.b12 * s2 / d],
                [-self.b12 * s2 / d, self.b11 * s2 / d],
            ]
        )


@dataclass(frozen=True)
class PavFit:
    breakpoints: np.ndarray  # ascending unique stimuli
    levels: np.ndarray  # nondecreasing fitted response probabilities
    weights: np.ndarray  # trials per stimulus


def classify_overlap(trials: TrialSet) -> OverlapSummary:
    """Overlap classification of a trial set (drives fit vs. suspend decisions)."""
    x, y = trials.xy()
    if len(x) == 0:
        raise ValueError("empty trial set")
    ones = x[y == 1]
    zeros = x[y == 0]
    if len(ones) == 0 or len(zeros) == 0:
        m1 = float(ones.min()) if len(ones) else None
        M0 = float(zeros.max()) if len(zeros) else None
        return OverlapSummary(OverlapStatus.NO_OVERLAP, m1, M0, None)
    m1 = float(ones.min())
    M0 = float(zeros.max())
    delta = float(ones.mean() - zeros.mean())
    if delta <= 0:
        status = OverlapStatus.INFINITE_SIGMA
    elif m1 < M0:
        status = OverlapStatus.INTERVAL_OVERLAP
    elif m1 == M0:
        status = OverlapStatus.POINT_OVERLAP
    else:
        status = OverlapStatus.NO_OVERLAP
    return OverlapSummary(status, m1, M0, delta)


def log_likelihood(trials: TrialSet, mu: float, sig: float) -> float:
    if not (math.isfinite(mu) and math.isfinite(sig)):
        raise ValueError("mu and sig must be finite")
    if sig <= 0:
        raise ValueError("sig must be positive")
    x, y = trials.xy()
    if len(x) == 0:
        raise ValueError("empty trial set")
    return K.loglik(x, y, mu, sig)


def null_loglik(y) -> float:
    """Max log likelihood of the constant-response model, attained at p = mean(y)."""
    y = np.asarray(y)
    n = len(y)
    ybar = y.mean()
    if ybar <= 0 or ybar >= 1:
        return 0.0
    return n * (ybar * math.log(ybar) + (1 - ybar) * math.log(1 - ybar))


def fit_mle(trials: TrialSet) -> MleResult:
    """Probit maximum likelihood fit with separation/degeneracy detection.

    The workhorse is iteratively reweighted least squares on the
    coefficients (a, b) of eta = a + b*x (deviance tolerance 1e-8, the
    convention every published table in this domain was computed under),
    with a damped Newton fallback if IRLS fails to converge.
    """
    x, y = trials.xy()
    summ = classify_overlap(trials)
    maxlc = null_loglik(y)

    if summ.status is OverlapStatus.NO_OVERLAP:
        # all-one-class or fully separated data: supremum 0, not attained
        return MleResult(None, None, 0.0, maxlc, OverlapStatus.NO_OVERLAP)
    if summ.status is OverlapStatus.INFINITE_SIGMA:
        # slope estimate non-positive: best fit is the constant model
        return MleResult(None, None, maxlc, maxlc, OverlapStatus.INFINITE_SIGMA)
    if summ.status is OverlapStatus.POINT_OVERLAP:
        tie = summ.m1
        at_tie = y[x == tie]
        return MleResult(float(tie), 0.0, null_loglik(at_tie), maxlc, OverlapStatus.POINT_OVERLAP)

    ab = probit_irls(x, y)
    if ab is not None and ab[1] > 0:
        a, b = ab
        mu, sig = -a / b, 1.0 / b
        ll = K.loglik(x, y, mu, sig)
    else:
        mu, sig, ll = _newton_probit(x, y)
    return MleResult(float(mu), float(sig), float(ll), maxlc, OverlapStatus.INTERVAL_OVERLAP)


_ETA_CLAMP = 8.125890664701906  # -qnorm(double eps): linkinv saturation point
_DBL_EPS = 2.220446049250313e-16


def probit_irls(x, y, epsilon=1e-8, maxit=25):
    """Fisher-scoring IRLS for the probit GLM, coefficient parameterization.

    Starts from mustart = (y + 1/2)/2 and stops when the relative deviance
    change drops below ``epsilon``.  Returns (a, b) or None when the loop
    fails to converge (near-separated data).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    X = np.column_stack([np.ones_like(x), x])
    mustart = (y + 0.5) / 2.0
    eta = np.array([K.norm_ppf(m) for m in mustart])
    mu = _probit_linkinv(eta)
    dev = _binom_deviance(y, mu)
    coef = None
    for _ in range(maxit):
        mu_eta = np.maximum(np.exp(-0.5 * eta * eta) / math.sqrt(2 * math.pi), _DBL_EPS)
        varmu = mu * (1.0 - mu)
        z = eta + (y - mu) / mu_eta
        w = np.sqrt(mu_eta * mu_eta / varmu)
        coef, *_ = np.linalg.lstsq(X * w[:, None], z * w, rcond=None)
        eta = X @ coef
        mu = _probit_linkinv(eta)
        devold, dev = dev, _binom_deviance(y, mu)
        if not math.isfinite(dev):
            return None
        if abs(dev - devold) / (abs(dev) + 0.1) < epsilon:
            return float(coef[0]), float(coef[1])
    return None


def _probit_linkinv(eta):
    clamped = np.clip(eta, -_ETA_CLAMP, _ETA_CLAMP)
    return np.array([K.norm_cdf(e) for e in clamped])


def _binom_deviance(y, mu):
    with np.errstate(divide="ignore"):
        term = np.where(y == 1, -np.log(mu), -np.log1p(-mu))
    return float(2.0 * term.sum())


def _newton_probit(x, y, tol=1e-12, max_iter=200):
    # moment start: probit regression of y on x
    xbar = x.mean()
    sx = x.std() or 1.0
    b = 1.0 / sx
    a = -xbar / sx
    ll = K.loglik(x, y, -a / b, 1.0 / b) if b > 0 else -np.inf

    for _ in range(max_iter):
        s1, s2, i11, i12, i22 = K.score_fisher_ab(x, y, a, b)
        det = i11 * i22 - i12 * i12
        if det <= 0 or not math.isfinite(det):
            break
        da = (i22 * s1 - i12 * s2) / det
        db = (-i12 * s1 + i11 * s2) / det
        step = 1.0
        improved = False
        for _ in range(60):
            a1 = a + step * da
            b1 = b + step * db
            if b1 > 0:
                ll1 = K.loglik(x, y, -a1 / b1, 1.0 / b1)
                if ll1 >= ll - 1e-15:
                    a, b, ll_new = a1, b1, ll1
                    improved = True
                    break
            step *= 0.5
        if not improved:
            break
        if abs(ll_new - ll) < tol and step == 1.0:
            ll = ll_new
            break
        ll = ll_new

    mu = -a / b
    sig = 1.0 / b
    return float(mu), float(sig), float(ll)


def info_matrix(trials: TrialSet, mu: float, sig: float) -> InfoMatrix:
    """Standardized 2x2 information matrix at (mu, sig).

    Entries are sums of G(k)^2 * (1, k, k^2) with k = (x - mu)/sig; the
    covariance scaling lives on :attr:`InfoMatrix.vcov`.
    """
    if sig <= 0:
        raise ValueError("sig must be positive")
    x, _ = trials.xy()
    b11, b12, b22 = K.info_entries(x, mu, sig)
    return InfoMatrix(b11, b12, b22, mu, sig)


def kstar(b: InfoMatrix) -> float:
    """Maximizer of G^2(k) (b11 k^2 - 2 b12 k + b22): the next D-optimal offset.

    Deterministic tie break: when the information is symmetric to rounding
    (b12 ~ 0) the two mirror peaks tie, and the positive one is returned.
    """
    if b.b11 <= 0 and b.b22 <= 0:
        raise ValueError("information matrix has no mass")
    grid = np.linspace(-8.0, 8.0, 3201)
    vals = [K.kstar_objective(k, b.b11, b.b12, b.b22) for k in grid]
    i = int(np.argmax(vals))
    if abs(b.b12) <= 1e-9 * max(b.b11, b.b22):
        i = max(i, len(grid) - 1 - i)
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    return _golden_max(lambda k: K.kstar_objective(k, b.b11, b.b12, b.b22), lo, hi)


def _golden_max(f, a, b, tol=1e-12):
    gr = 0.5 * (math.sqrt(5.0) - 1.0)
    c = b - gr * (b - a)
    d = a + gr * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - gr * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + gr * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def pav(trials: TrialSet) -> PavFit:
    """Isotonic (nondecreasing) ML fit of response probability vs. stimulus.

    Trials are grouped by identical stimulus first; adjacent violating
    blocks are pooled to their weighted mean.
    """
    x, y = trials.xy()
    if len(x) == 0:
        raise ValueError("empty trial set")
    order = np.argsort(x, kind="stable")
    xs, ys = x[order], y[order].astype(float)
    bx, start = np.unique(xs, return_index=True)
    means = np.array([ys[xs == v].mean() for v in bx])
    wts = np.array([(xs == v).sum() for v in bx], dtype=float)
    fitted = K.pav_pool(means, wts)
    return PavFit(breakpoints=bx, levels=fitted, weights=wts)
