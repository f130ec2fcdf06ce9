"""Random test generation: latent-strength sampling, seeded determinism,
capped sizes, and a sweep driver for procedure-comparison studies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .numerics import fit_mle
from .phase1 import Phase1Config, Procedure
from .session import (PromptKind, SessionConfig, SuspendedError, TestSession,
                      apply_log_transform)


@dataclass(frozen=True)
class SimConfig:
    mlo: float
    mhi: float
    sg: float
    n2: int = 0
    n3: int = 0
    p: float = 0.0
    lam: float = 0.0
    dm: float = 0.0
    ds: float = 0.0
    reso: float = 0.0
    log_scale: bool = False
    iseed: int = -1
    llgo: bool = True
    M: float = 1.0
    procedure: Procedure = Procedure.THREEPOD
    bl: tuple[int, int, int] = (4, 1, 0)

    def scaled(self) -> "SimConfig":
        """Apply the stimulus scale factor to everything measured in stimulus units."""
        if self.M == 1.0:
            return self
        return replace(self, mlo=self.mlo * self.M, mhi=self.mhi * self.M,
                       sg=self.sg * self.M, dm=self.dm * self.M, ds=self.ds * self.M,
                       M=1.0)

    def session_config(self) -> SessionConfig:
        s = self.scaled()
        bl = s.bl if s.procedure in (Procedure.BRUCETON, Procedure.LANGLIE) else None
        p1 = Phase1Config(s.procedure, s.mlo, s.mhi, s.sg, bl=bl)
        return SessionConfig(phase1=p1, reso=s.reso, log_scale=s.log_scale)


@dataclass(frozen=True)
class SimTruth:
    tm: float
    ts: float
    tmu: float
    tsig: float


def sim_truth(cfg: SimConfig) -> SimTruth:
    """Target mean/spread of the latent strength distribution.

    On the log scale the targets live on the log scale too; the quarter-point
    procedures inherit their transformed triple, the up-down ones use the
    logged bounds directly.
    """
    s = cfg.scaled()
    t = s.procedure
    if not s.log_scale:
        tm = 0.5 * (s.mlo + s.mhi)
        ts = (s.mhi - s.mlo) / 6.0 if t is Procedure.LANGLIE else s.sg
    elif t in (Procedure.THREEPOD, Procedure.NEYER):
        u = apply_log_transform(s.mlo, s.mhi, s.sg, t)
        tm = 0.5 * (u[0] + u[1])
        ts = u[2]
    else:
        if s.mlo <= 0 or s.mhi <= 0:
            raise ValueError("log option needs positive bounds")
        tm = math.log(math.sqrt(s.mlo * s.mhi))
        if t is Procedure.BRUCETON:
            ts = math.log(1.0 + s.sg / math.log(s.mlo))
        else:
            ts = math.log(s.mhi / s.mlo) / 6.0
    return SimTruth(tm=tm, ts=ts, tmu=tm + s.dm, tsig=ts + s.ds)


def _strength_draw(iseed: int, trial: int) -> float:
    """Standard-normal deviate for one trial: a pure function of (seed, index),
    so prefixes of longer runs reproduce shorter runs."""
    gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence((iseed, trial))))
    return float(gen.standard_normal())


def simulate_test(cfg: SimConfig, title="", units="X") -> TestSession:
    """Generate one full test: stresses from the phase machines, responses by
    the stress >= strength threshold rule against seeded latent strengths."""
    iseed = cfg.iseed
    if iseed < 0:
        iseed = int(np.random.SeedSequence().generate_state(1)[0])
    truth = sim_truth(cfg)
    scfg = cfg.scaled()
    session = TestSession(cfg.session_config())
    session.meta.update({
        "sim": True, "tm": truth.tm, "ts": truth.ts, "tmu": truth.tmu,
        "tsig": truth.tsig, "dm": scfg.dm, "ds": scfg.ds, "iseed": iseed,
        "p": scfg.p, "lam": scfg.lam, "strengths": [],
    })
    session.submit("title", title)
    session.submit("units", units)
    trial = 0
    try:
        while not session.finished:
            kind = session.prompt
            if kind is PromptKind.BL:
                session.submit("bl", *scfg.bl)
            elif kind is PromptKind.TRIAL:
                if not cfg.llgo and _llgo_stop(session, scfg):
                    break
                trial += 1
                x_analysis, rx, _stage = session.recommended()
                x_eff = math.log(rx) if scfg.log_scale else rx
                strength = truth.tmu + truth.tsig * _strength_draw(iseed, trial)
                y = 1 if x_eff >= strength else 0
                session.meta["strengths"].append(strength)
                session.submit("sr", rx, y)
            elif kind is PromptKind.N2:
                n2 = scfg.n2 if scfg.n2 >= 0 else max(-scfg.n2 - trial, 0)
                session.submit("n2", n2)
            elif kind is PromptKind.N3:
                n3 = scfg.n3 if scfg.n3 >= 0 else max(-scfg.n3 - trial, 0)
                session.submit("n3", n3)
            elif kind is PromptKind.PLAM:
                session.submit("plam", scfg.p, scfg.lam)
            else:
                break
    except SuspendedError as e:
        session.suspended = e.reason
    return session


def _llgo_stop(session, scfg):
    if scfg.procedure is Procedure.THREEPOD:
        if session.phase != 1:
            return True
        rec = session.recommended()
        return rec is not None and rec[2] == "I3"
    return session.phase != 1


@dataclass(frozen=True)
class SweepRow:
    trial: int
    seed: int
    n: int
    mu: float | None
    sig: float | None
    lp: float | None


@dataclass(frozen=True)
class SweepResult:
    rows: list[SweepRow]
    p: float

    def finite_rows(self):
        return [r for r in self.rows if r.mu is not None]

    def summary(self):
        mus = [r.mu for r in self.finite_rows()]
        lps = [r.lp for r in self.finite_rows() if r.lp is not None]
        out = {"trials": len(self.rows), "fitted": len(mus)}
        if mus:
            out["mu_median"] = float(np.median(mus))
            out["mu_mean"] = float(np.mean(mus))
            out["mu_sd"] = float(np.std(mus, ddof=1)) if len(mus) > 1 else 0.0
        if lps:
            out["lp_median"] = float(np.median(lps))
        return out


def sweep(cfg: SimConfig, n_trials: int, seed0: int, per_trial_draws: int | None = None) -> SweepResult:
    """Repeated simulated tests with non-overlapping seed allocation.

    Seeds follow seed0 + nt*(t-1); duplicate seeds are rejected up front.
    """
    if n_trials < 1:
        raise ValueError("need at least one trial")
    nt = per_trial_draws
    if nt is None:
        nt = abs(cfg.n3) if cfg.n3 < 0 else max(abs(cfg.n2), 1) + max(cfg.n3, 0) + 50
    seeds = [seed0 + nt * (t - 1) for t in range(1, n_trials + 1)]
    if len(set(seeds)) != len(seeds):
        raise ValueError("seed allocation collides; increase the per-trial spacing")
    rows = []
    for t, seed in enumerate(seeds, start=1):
        s = simulate_test(replace(cfg, iseed=seed))
        fit = s.musig
        lp = None
        if fit.ok and cfg.p and 0 < cfg.p < 1:
            lp = fit.quantile(cfg.p)
        rows.append(SweepRow(trial=t, seed=seed, n=len(s.trials.live_rows()),
                             mu=fit.mu, sig=fit.sig, lp=lp))
    return SweepResult(rows=rows, p=cfg.p)


def sweep_to_text(result: SweepResult) -> str:
    lines = ["trial, seed, n, mu, sig, lp"]
    for r in result.rows:
        vals = [str(r.trial), str(r.seed), str(r.n)]
        for v in (r.mu, r.sig, r.lp):
            vals.append("NA" if v is None else repr(round(v, 8)))
        lines.append(", ".join(vals))
    return "\n".join(lines) + "\n"
