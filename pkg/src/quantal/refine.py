"""Refinement-phase stress selection: D-optimal steps and the skewed
Robbins-Monro recursion that homes in on the target quantile L_p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import _kernels as K
from .numerics import MleResult, TrialSet, fit_mle, info_matrix, kstar


class RefineUnavailable(Exception):
    """Raised when the current data cannot support a refinement step."""


@dataclass(frozen=True)
class RefineConfig:
    n2: int = 0
    n3: int = 0
    p: float = 0.0
    lam: float = 0.0


def doptimal_next(trials: TrialSet, fit: MleResult | None = None) -> float:
    """Next stress maximizing the information determinant.

    Truncates the fitted mean into the tested range and the fitted sigma
    to the tested spread before locating the optimal standardized offset.
    """
    if fit is None:
        fit = fit_mle(trials)
    if not fit.ok:
        raise RefineUnavailable(f"no finite (mu, sig): {fit.status.value}")
    x, _ = trials.xy()
    xl, xu = float(x.min()), float(x.max())
    mut = max(xl, min(fit.mu, xu))
    sigt = min(fit.sig, xu - xl)
    b = info_matrix(trials, mut, sigt)
    return mut + kstar(b) * sigt


def doptimal_pseudo(trials: TrialSet, mut: float, sigt: float) -> float:
    """D-optimal step around supplied working estimates (no MLE required)."""
    b = info_matrix(trials, mut, sigt)
    return mut + kstar(b) * sigt


def f3point8(lam: float) -> float:
    """Skew constant c1(lam): the offset c with E[(Z+c)^+] = lam * E[(Z+c)^-].

    c1(1) = 0; lam < 1 pulls the start below the plain target (bigger
    downward steps), lam > 1 above it.
    """
    if lam <= 0:
        raise ValueError("lam must be positive")
    if lam == 1.0:
        return 0.0

    def g(c):
        pos = K.norm_pdf(c) + c * K.norm_cdf(c)
        neg = K.norm_pdf(c) - c * K.norm_cdf(-c)
        return pos - lam * neg

    lo, hi = -1.0, 1.0
    while g(lo) > 0:
        lo *= 2.0
    while g(hi) < 0:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-14:
            break
    return 0.5 * (lo + hi)


# rounded truncation factors for tau^2; the log mode measures against the
# lognormal quantile instead
_TAU_LO_FACTOR = round((3.0 / K.norm_ppf(0.975)) ** 2, 4)
_TAU_HI_FACTOR = round((5.0 / K.norm_ppf(0.975)) ** 2, 4)
_TAU_LO_FACTOR_LN = round((3.0 / math.exp(K.norm_ppf(0.975))) ** 2, 4)
_TAU_HI_FACTOR_LN = round((5.0 / math.exp(K.norm_ppf(0.975))) ** 2, 4)


@dataclass
class RmjRow:
    j: float
    k: float
    v: float
    u: float
    a: float
    tau2: float
    nu: float
    b: float
    x: float
    y: int | None


@dataclass
class RmjState:
    """Running state of the skewed Robbins-Monro recursion.

    ``rows`` mirrors the per-step bookkeeping table: row 1 carries only the
    starting stress, later rows the derived step quantities.
    """

    c1: float
    be: float
    mut: float
    sigt: float
    p: float
    lam: float
    tau2: float
    nu: float
    rows: list[RmjRow] = field(default_factory=list)

    @property
    def x(self) -> float:
        return self.rows[-1].x


def rmj_init(trials: TrialSet, cfg: RefineConfig, log_scale: bool = False,
             fit: MleResult | None = None) -> RmjState:
    """Start the refinement recursion from the fitted phase I+II data."""
    if not (0.0 < cfg.p < 1.0):
        raise RefineUnavailable("p must lie in (0, 1)")
    if cfg.lam < 0:
        raise RefineUnavailable("lam must be nonnegative")
    if fit is None:
        fit = fit_mle(trials)
    if not fit.ok:
        raise RefineUnavailable(f"no finite (mu, sig): {fit.status.value}")
    mu, sig = fit.mu, fit.sig

    vcov = info_matrix(trials, mu, sig).vcov
    if vcov is None:
        raise RefineUnavailable("singular information matrix")
    zp = K.norm_ppf(cfg.p)
    tau2 = vcov[0, 0] + zp * zp * vcov[1, 1]
    f_lo = _TAU_LO_FACTOR_LN if log_scale else _TAU_LO_FACTOR
    f_hi = _TAU_HI_FACTOR_LN if log_scale else _TAU_HI_FACTOR
    tau2 = min(max(tau2, f_lo * sig * sig), f_hi * sig * sig)

    x, _ = trials.xy()
    xl, xu = float(x.min()), float(x.max())
    mut = max(xl, min(mu, xu))
    sigt = min(sig, xu - xl)
    if log_scale:
        # literal log-mode step-scale line; flagged as needing tweaking upstream
        be = _plnorm(_qlnorm(cfg.p)) / (K.norm_cdf(zp) * sigt)
    else:
        be = 1.0 / (2.0 * sigt)

    c1 = f3point8(cfg.lam) if cfg.lam > 0 else 0.0
    nu = math.sqrt(tau2) * c1
    x1 = mut + zp * sigt + nu
    state = RmjState(c1=c1, be=be, mut=mut, sigt=sigt, p=cfg.p, lam=cfg.lam,
                     tau2=tau2, nu=nu)
    state.rows.append(RmjRow(0.0, 0.0, 0.0, 0.0, 0.0, tau2, nu, 0.0, x1, None))
    return state


def rmj_step(state: RmjState, last_y: int, actual_x: float | None = None) -> float:
    """Record the response at the current stress and compute the next one.

    ``actual_x`` is the stress that was really tested (the rounded
    recommendation, or an operator override); the update walks from there.
    """
    state.rows[-1].y = int(last_y)
    if actual_x is None:
        actual_x = state.x
    zp = K.norm_ppf(state.p)
    be, tau2, nu, c1 = state.be, state.tau2, state.nu, state.c1

    j = zp + be * nu
    k = math.sqrt(1.0 + be * be * tau2)
    v = K.norm_cdf(j / k)
    v = min(max(v, 1e-15), 1.0 - 1e-15)
    u = be * tau2 * K.norm_pdf(j / k) / k + nu * v
    a = (u - nu * v) / (v * (1.0 - v))
    ntau2 = a * a * v * (1.0 - v) - 2.0 * a * (u - nu * v) + tau2
    nnu = math.sqrt(max(ntau2, 0.0)) * c1
    b = v - (nu - nnu) / a

    x_next = actual_x - a * (last_y - b)
    state.tau2 = ntau2
    state.nu = nnu
    state.rows.append(RmjRow(j, k, v, u, a, ntau2, nnu, b, x_next, None))
    return x_next


def _qlnorm(p):
    return math.exp(K.norm_ppf(p))


def _plnorm(q):
    if q <= 0:
        return 0.0
    return K.norm_cdf(math.log(q))
