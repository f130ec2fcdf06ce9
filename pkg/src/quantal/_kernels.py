"""Hot numeric kernels shared by the fitting and contour-tracing code.

Every kernel here is written as plain scalar/loop numpy so it can be
compiled with numba's ``@njit`` when available.  Set ``QUANTAL_NUMBA=0``
to force the pure-Python/numpy fallback (the benchmark in
``benchmarks/bench_kernels.py`` compares the two paths).
"""

import math
import os

import numpy as np

USE_NUMBA = os.environ.get("QUANTAL_NUMBA", "1") != "0"

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:
        USE_NUMBA = False

if not USE_NUMBA:
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


_SQRT2 = math.sqrt(2.0)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


@njit(cache=True)
def norm_pdf(x):
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


@njit(cache=True)
def norm_cdf(x):
    return 0.5 * math.erfc(-x / _SQRT2)


@njit(cache=True)
def norm_logcdf(x):
    # erfc underflows near x = -38; switch to the asymptotic tail before that
    if x > -36.0:
        return math.log(0.5 * math.erfc(-x / _SQRT2))
    r = 1.0 / (x * x)
    series = -r + 3.0 * r * r - 15.0 * r * r * r + 105.0 * r * r * r * r
    return -0.5 * x * x - math.log(-x) - _LOG_SQRT_2PI + math.log1p(series)


@njit(cache=True)
def norm_ppf(p):
    """Inverse standard normal CDF.

    Absolute error below 1e-13 wherever the answer is well conditioned in
    the double input; the extreme tails are limited by the spacing of
    doubles around 0 and 1.
    """
    if p <= 0.0:
        return -math.inf
    if p >= 1.0:
        return math.inf
    if p > 0.5:
        return -norm_ppf(1.0 - p)
    # Acklam's rational approximation ...
    a = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
         1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
    b = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
         6.680131188771972e+01, -1.328068155288572e+01)
    c = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
         -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
    d = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
         3.754408661907416e+00)
    plow = 0.02425
    if p < plow:
        q = math.sqrt(-2.0 * math.log(p))
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / \
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    elif p <= 1.0 - plow:
        q = p - 0.5
        r = q * q
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q / \
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)
    else:
        q = math.sqrt(-2.0 * math.log1p(-p))
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / \
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    # ... polished with two Halley steps against erfc
    for _ in range(2):
        e = 0.5 * math.erfc(-x / _SQRT2) - p
        u = e * math.sqrt(2.0 * math.pi) * math.exp(0.5 * x * x)
        x = x - u / (1.0 + 0.5 * x * u)
    return x


@njit(cache=True)
def g2(k):
    """Squared probit weight phi(k)^2 / (Phi(k) * (1 - Phi(k))), stable in the tails."""
    lp = norm_logcdf(k)
    lq = norm_logcdf(-k)
    return math.exp(-k * k - 2.0 * _LOG_SQRT_2PI - lp - lq)


@njit(cache=True)
def loglik(x, y, mu, sig):
    """Probit log likelihood of responses y at stimuli x under N(mu, sig)."""
    total = 0.0
    for i in range(x.shape[0]):
        k = (x[i] - mu) / sig
        if y[i] == 1:
            total += norm_logcdf(k)
        else:
            total += norm_logcdf(-k)
    return total


@njit(cache=True)
def info_entries(x, mu, sig):
    """Entries (b11, b12, b22) of the standardized information matrix."""
    b11 = 0.0
    b12 = 0.0
    b22 = 0.0
    for i in range(x.shape[0]):
        k = (x[i] - mu) / sig
        w = g2(k)
        b11 += w
        b12 += w * k
        b22 += w * k * k
    return b11, b12, b22


@njit(cache=True)
def score_fisher_ab(x, y, a, b):
    """Score and expected information for probit coefficients (a, b), eta = a + b*x.

    Returns (s1, s2, i11, i12, i22).
    """
    s1 = 0.0
    s2 = 0.0
    i11 = 0.0
    i12 = 0.0
    i22 = 0.0
    for i in range(x.shape[0]):
        eta = a + b * x[i]
        w = g2(eta)
        # dl/deta = phi * (y - Phi) / (Phi (1-Phi)); write via logs for stability
        p = norm_cdf(eta)
        if p <= 0.0:
            p = 1e-300
        if p >= 1.0:
            p = 1.0 - 1e-16
        u = norm_pdf(eta) * (y[i] - p) / (p * (1.0 - p))
        s1 += u
        s2 += u * x[i]
        i11 += w
        i12 += w * x[i]
        i22 += w * x[i] * x[i]
    return s1, s2, i11, i12, i22


@njit(cache=True)
def kstar_objective(k, b11, b12, b22):
    return g2(k) * (b11 * k * k - 2.0 * b12 * k + b22)


@njit(cache=True)
def pav_pool(levels, weights):
    """Weighted pool-adjacent-violators, in place on copies; returns fitted values."""
    n = levels.shape[0]
    vals = levels.copy()
    wts = weights.copy()
    # index ranges for the blocks
    size = np.ones(n, dtype=np.int64)
    m = 0  # top of block stack
    for i in range(1, n):
        m += 1
        vals[m] = levels[i]
        wts[m] = weights[i]
        size[m] = 1
        while m > 0 and vals[m - 1] > vals[m]:
            tot = wts[m - 1] + wts[m]
            vals[m - 1] = (wts[m - 1] * vals[m - 1] + wts[m] * vals[m]) / tot
            wts[m - 1] = tot
            size[m - 1] += size[m]
            m -= 1
    out = np.empty(n)
    pos = 0
    for j in range(m + 1):
        for _ in range(size[j]):
            out[pos] = vals[j]
            pos += 1
    return out


@njit(cache=True)
def profile_mu_max(x, y, sig, lo, hi):
    """Maximize the probit log likelihood over mu at fixed sig (golden section)."""
    gr = 0.5 * (math.sqrt(5.0) - 1.0)
    a = lo
    b = hi
    c = b - gr * (b - a)
    d = a + gr * (b - a)
    fc = loglik(x, y, c, sig)
    fd = loglik(x, y, d, sig)
    while b - a > 1e-11 * (1.0 + abs(a) + abs(b)):
        if fc > fd:
            b = d
            d = c
            fd = fc
            c = b - gr * (b - a)
            fc = loglik(x, y, c, sig)
        else:
            a = c
            c = d
            fc = fd
            d = a + gr * (b - a)
            fd = loglik(x, y, d, sig)
    m = 0.5 * (a + b)
    return m, loglik(x, y, m, sig)


@njit(cache=True)
def mu_root(x, y, sig, target, lo, hi):
    """Bisect loglik(mu) = target between lo and hi (either order)."""
    flo = loglik(x, y, lo, sig) - target
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = loglik(x, y, mid, sig) - target
        if fm == 0.0 or abs(hi - lo) < 1e-13 * (1.0 + abs(mid)):
            return mid
        if (flo > 0.0) == (fm > 0.0):
            lo = mid
            flo = fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
