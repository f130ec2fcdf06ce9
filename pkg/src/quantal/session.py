"""Event-sourced test sessions: live console steps, batch replay, undo,
suspension, persistence, and the run-table text export.

A session is its event log.  Every console read (title, units, rule
triple, stress/response pair, phase sizes, target parameters) is one
event; replaying the log through a fresh engine reconstructs the exact
session state, which is what the undo and resume features lean on.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, asdict
from decimal import Decimal, ROUND_HALF_EVEN

from . import _kernels as K
from .numerics import MleResult, OverlapStatus, TrialRecord, TrialSet, classify_overlap, fit_mle
from .phase1 import Phase1Config, Procedure, make_machine, udtr_rule
from .refine import RefineConfig, RefineUnavailable, doptimal_next, f3point8, rmj_init, rmj_step

INFINITE_SIGMA_NOTICE = (
    "Entry into Phase II requires that a positive and finite sigma exists. "
    "Thus, M0 > m1 (for overlap) & delta = Avg(X[Y==1]) - Avg(X[Y==0]) > 0. "
    "The second condition ensures that the regression slope coefficient is positive. "
    "Since your completed Phase I did not meet both conditions, it has been "
    "suspended for your further review. Up-down procedures are programmed to "
    "continue on until both conditions are met."
)

LOG_PHASE3_NOTICE = "** Starting values (tau2[1] & be) for Phase III, ln=T may need tweaking **"


def fmt(v, places=5) -> str:
    """Decimal-string rounding with trailing zeros trimmed (export style)."""
    d = Decimal(repr(float(v))).quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN)
    s = str(d)
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _round_half_away(q: float) -> float:
    """Nearest integer, ties away from zero; a quotient within float noise
    of a half-grid point counts as a tie, so the outcome is invariant to
    rescaling the stimulus units."""
    f = math.floor(q)
    r = q - f
    if abs(r - 0.5) <= 1e-9 * max(abs(q), 1.0):
        return f + 1.0 if q >= 0 else float(f)
    return f + 1.0 if r > 0.5 else float(f)


def round_to_reso(x: float, reso: float) -> float:
    """Recommended-stress rounding: nearest multiple of reso, or 5 decimals."""
    if not math.isfinite(x):
        raise ValueError("cannot round a non-finite stress")
    if reso > 0:
        return _round_half_away(x / reso) * reso
    return _round_half_away(x * 1e5) / 1e5


def apply_log_transform(mlo: float, mhi: float, sg: float,
                        procedure: Procedure = Procedure.THREEPOD):
    """Map a starting triple onto the log scale.

    For the quarter-point procedures the transformed bounds are chosen so
    the first two recommendations, pushed back through exp, equal the
    untransformed ones; the transformed step guess keeps the canonical
    bounds-to-step ratio.  The up-down procedures log their levels
    directly.
    """
    if procedure in (Procedure.THREEPOD, Procedure.NEYER):
        x1 = mlo + (mhi - mlo) / 4.0
        x2 = mhi - (mhi - mlo) / 4.0
        if x1 <= 0:
            raise ValueError("log option needs positive opening stresses")
        lx1, lx2 = math.log(x1), math.log(x2)
        mlo_t = (3.0 * lx1 - lx2) / 2.0
        mhi_t = (3.0 * lx2 - lx1) / 2.0
        return mlo_t, mhi_t, (mhi_t - mlo_t) / 7.0
    if mlo <= 0 or mhi <= 0:
        raise ValueError("log option needs positive bounds")
    if procedure is Procedure.BRUCETON:
        if math.log(mlo) <= 0:
            raise ValueError("log option needs a lower level above 1 for this test")
        return math.log(mlo), math.log(mhi), math.log(1.0 + sg / math.log(mlo))
    return math.log(mlo), math.log(mhi), 0.0


@dataclass(frozen=True)
class SessionConfig:
    phase1: Phase1Config
    reso: float = 0.0
    log_scale: bool = False
    term1: bool = True  # mirrored into phase1 for convenience

    def to_dict(self):
        p1 = self.phase1
        return {
            "procedure": int(p1.procedure),
            "mlo": p1.mlo, "mhi": p1.mhi, "sg": p1.sg,
            "term1": p1.term1, "bl": list(p1.bl) if p1.bl else None,
            "reso": self.reso, "ln": self.log_scale,
        }

    @staticmethod
    def from_dict(d):
        p1 = Phase1Config(
            procedure=Procedure(d["procedure"]), mlo=d["mlo"], mhi=d["mhi"],
            sg=d["sg"], term1=d.get("term1", True),
            bl=tuple(d["bl"]) if d.get("bl") else None,
        )
        return SessionConfig(phase1=p1, reso=d.get("reso", 0.0),
                             log_scale=d.get("ln", False), term1=p1.term1)


class PromptKind(str, enum.Enum):
    TITLE = "title"
    UNITS = "units"
    BL = "bl"
    TRIAL = "trial"
    N2 = "n2"
    N3 = "n3"
    PLAM = "plam"
    DONE = "done"


EVENT_KINDS = {"title", "units", "bl", "sr", "n2", "n3", "plam"}


@dataclass(frozen=True)
class Event:
    kind: str
    value: tuple

    def to_json(self):
        return json.dumps({"k": self.kind, "v": list(self.value)})

    @staticmethod
    def from_json(line):
        d = json.loads(line)
        return Event(d["k"], tuple(d["v"]))


class SuspendedError(RuntimeError):
    """An input hit one of the suspension triggers; session state unchanged."""

    def __init__(self, reason, notice=None):
        super().__init__(reason)
        self.reason = reason
        self.notice = notice


class TestSession:
    """A running (or finished) sensitivity test, reconstructed from events."""

    FORMAT_VERSION = 1

    def __init__(self, config: SessionConfig):
        config.phase1.validate()
        if config.log_scale:
            # raises early when the triple cannot be mapped
            apply_log_transform(config.phase1.mlo, config.phase1.mhi,
                                config.phase1.sg, config.phase1.procedure)
        self.config = config
        self.events: list[Event] = []
        self.title = None
        self.units = None
        self.meta: dict = {}
        self.suspended: str | None = None
        self.notices: list[str] = []
        self._reset_engine()

    # --- engine -----------------------------------------------------------

    def _reset_engine(self):
        cfg = self.config
        p1 = cfg.phase1
        if cfg.log_scale:
            mlo, mhi, sg = apply_log_transform(p1.mlo, p1.mhi, p1.sg, p1.procedure)
        else:
            mlo, mhi, sg = p1.mlo, p1.mhi, p1.sg
        self._p1_analysis = Phase1Config(p1.procedure, mlo, mhi, sg, p1.term1, p1.bl)
        self.trials = TrialSet()
        self.machine = None if p1.bl is None and p1.procedure in (
            Procedure.BRUCETON, Procedure.LANGLIE) else make_machine(self._p1_analysis)
        self.phase = 1
        self.n2 = None
        self.n3 = None
        self.p = None
        self.lam = None
        self.n2_done = 0
        self.n3_done = 0
        self.rmj = None
        self.phase1_counts: list[int] = []
        self.phase1_fit: MleResult | None = None
        self.final_fit: MleResult | None = None
        self.finished = False

    # --- prompt protocol ---------------------------------------------------

    @property
    def prompt(self) -> PromptKind:
        if self.finished:
            return PromptKind.DONE
        if self.title is None:
            return PromptKind.TITLE
        if self.units is None:
            return PromptKind.UNITS
        if self.machine is None:
            return PromptKind.BL
        if self.phase == 1 or (self.phase == 2 and self.n2_done < (self.n2 or 0)) \
                or (self.phase == 3 and self.rmj is not None):
            return PromptKind.TRIAL
        if self.phase == 2 and self.n2 is None:
            return PromptKind.N2
        if self.phase == 3 and self.n3 is None:
            return PromptKind.N3
        if self.phase == 3 and (self.p is None or self.lam is None):
            return PromptKind.PLAM
        return PromptKind.TRIAL

    def recommended(self):
        """(analysis-scale x, user-scale rx, stage label) for the pending trial."""
        if self.prompt is not PromptKind.TRIAL:
            return None
        if self.phase == 1:
            rec = self.machine.recommend()
            return rec.x, self._user_round(rec.x), rec.stage
        if self.phase == 2:
            stage = self._phase2_label(first=self.n2_done == 0)
            x = self._phase2_rec
            return x, self._user_round(x), stage
        stage = "III1" if self.n3_done == 0 else "III2"
        x = self.rmj.x
        return x, self._user_round(x), stage

    def _user_round(self, x_analysis):
        if self.config.log_scale:
            return round_to_reso(math.exp(x_analysis), self.config.reso)
        return round_to_reso(x_analysis, self.config.reso)

    def _phase2_label(self, first):
        if self.config.phase1.procedure is Procedure.NEYER:
            return "I11" if first else "I12"
        return "II1" if first else "II2"

    # --- event application --------------------------------------------------

    def apply(self, event: Event, record=True):
        self.suspended = None
        handler = getattr(self, f"_on_{event.kind}")
        handler(event.value)
        if record:
            self.events.append(event)

    def _on_title(self, value):
        if self.prompt is not PromptKind.TITLE:
            raise ValueError("not awaiting a title")
        self.title = value[0]

    def _on_units(self, value):
        if self.prompt is not PromptKind.UNITS:
            raise ValueError("not awaiting units")
        self.units = value[0]

    def _on_bl(self, value):
        if self.prompt is not PromptKind.BL:
            raise ValueError("not awaiting a BL triple")
        nrev, i1, i2 = (int(v) for v in value)
        p1 = self._p1_analysis
        cfg = Phase1Config(p1.procedure, p1.mlo, p1.mhi, p1.sg, p1.term1, (nrev, i1, i2))
        cfg.validate()
        self._p1_analysis = cfg
        self.machine = make_machine(cfg)
        rule = udtr_rule(i2, complement=True) if (i1 == 0 and i2) else (udtr_rule(i1) if i1 else None)
        if rule is not None and rule.p != 0.5:
            d = "{" + ", ".join(sorted(rule.down, key=lambda s: (len(s), s))) + "}"
            u = "{" + ", ".join(sorted(rule.up, key=lambda s: (len(s), s))) + "}"
            self._notice(f"D = {d}, U = {u}, Lev = {fmt(rule.p, 6)}")

    def _on_sr(self, value):
        if self.prompt is not PromptKind.TRIAL:
            raise ValueError("not awaiting a stress/response pair")
        x_user, y = float(value[0]), value[1]
        if y not in (0, 1):
            raise SuspendedError("invalid response")
        x_analysis = math.log(x_user) if self.config.log_scale else x_user
        rec_x, rec_rx, stage = self.recommended()
        rec = TrialRecord(
            x=x_analysis, y=int(y), count=1, rx=rec_rx,
            ex=round(rec_x, 6), tx=x_user, id=stage,
        )
        self.trials.append(rec)
        if self.phase == 1:
            self.machine.record(x_analysis, int(y))
            if self.machine.done:
                self._complete_phase1()
        elif self.phase == 2:
            self.n2_done += 1
            if self.n2_done < self.n2:
                self._advance_phase2()
            else:
                self._notice(f"Phase II complete, {self._musig_text()}")
                self.phase = 3
        else:
            self.n3_done += 1
            rmj_step(self.rmj, int(y), x_analysis)
            if self.n3_done >= self.n3:
                self._complete_phase3()

    def _on_n2(self, value):
        if self.prompt is not PromptKind.N2:
            raise ValueError("not awaiting n2")
        n2 = int(value[0])
        if n2 < 0:
            raise SuspendedError("negative sample size")
        if n2 > 0 and self.config.phase1.procedure in (Procedure.THREEPOD,
                                                       Procedure.NEYER):
            summ = classify_overlap(self.trials)
            good = (summ.status is OverlapStatus.INTERVAL_OVERLAP
                    and summ.delta is not None and summ.delta > 0)
            if not good:
                # a positive and finite sigma is required to go on
                self._notice(INFINITE_SIGMA_NOTICE)
                raise SuspendedError("degenerate phase I", INFINITE_SIGMA_NOTICE)
        self.n2 = n2
        if n2 == 0:
            self._notice(f"Phase II skipped, {self._musig_text()}")
            self.phase = 3
        else:
            self._advance_phase2()

    def _on_n3(self, value):
        if self.prompt is not PromptKind.N3:
            raise ValueError("not awaiting n3")
        n3 = int(value[0])
        if n3 < 0:
            raise SuspendedError("negative sample size")
        self.n3 = n3
        if n3 == 0:
            self._finish()

    def _on_plam(self, value):
        if self.prompt is not PromptKind.PLAM:
            raise ValueError("not awaiting p and lam")
        p, lam = float(value[0]), float(value[1])
        if not 0.0 < p < 1.0 or lam < 0:
            raise SuspendedError("p outside (0,1) or negative lam")
        self.p, self.lam = p, lam
        if self.config.log_scale:
            self._notice(LOG_PHASE3_NOTICE)
        try:
            self.rmj = rmj_init(self.trials, RefineConfig(p=p, lam=lam),
                                log_scale=self.config.log_scale)
        except RefineUnavailable as e:
            self.p = self.lam = None
            raise SuspendedError(str(e))

    # --- phase transitions ---------------------------------------------------

    def _complete_phase1(self):
        self.phase1_counts = self._split_phase1_counts()
        self.phase1_fit = fit_mle(self.trials)
        self._notice(f"Phase I complete, {self._musig_text()}")
        self.phase = 2

    def _split_phase1_counts(self):
        rows = [r for r in self.trials if r.count == 1]
        if self.config.phase1.procedure is Procedure.THREEPOD:
            n3 = sum(1 for r in rows if r.id == "I3")
            return [len(rows) - n3, n3]
        if self.config.phase1.procedure in (Procedure.BRUCETON, Procedure.LANGLIE):
            n2 = sum(1 for r in rows if r.id == "I2")
            return [len(rows) - n2, n2]
        return [len(rows), 0]

    def _advance_phase2(self):
        try:
            self._phase2_rec = doptimal_next(self.trials)
        except RefineUnavailable as e:
            self.finished = True
            self.suspended = str(e)
            self._notice(INFINITE_SIGMA_NOTICE)

    def _complete_phase3(self):
        x_next = self.rmj.x
        self.trials.append(TrialRecord(
            x=0.0, y=0, count=0, rx=round(x_next, 5), ex=0.0, tx=0.0, id="III3"))
        self.rmj_final_x = x_next
        self.rmj_state = self.rmj
        self.rmj = None
        self._finish()

    def _finish(self):
        self.final_fit = fit_mle(self.trials)
        self._notice(f"Phase III complete, {self._musig_text()}")
        self.finished = True

    def _musig_text(self):
        fit = fit_mle(self.trials)
        if fit.mu is None:
            pair = "(NA, Inf)" if fit.status is OverlapStatus.INFINITE_SIGMA else "(NA, NA)"
        else:
            pair = f"({fmt(fit.mu)}, {fmt(fit.sig)})"
        return f"(Mu, Sig) = {pair}"

    def _notice(self, text):
        self.notices.append(text)

    # --- convenience entry points --------------------------------------------

    def submit(self, kind: str, *value):
        self.apply(Event(kind, tuple(value)))

    def run_console_step(self, x: float, y: int):
        """One live stress/response entry; suspension leaves state unchanged."""
        try:
            self.submit("sr", x, y)
        except SuspendedError as e:
            self.suspended = e.reason
            raise
        return self.prompt

    @property
    def musig(self):
        fit = self.final_fit or self.phase1_fit or fit_mle(self.trials)
        return fit

    @property
    def en(self):
        out = list(self.phase1_counts) or [len(self.trials.live_rows()), 0]
        return out + [self.n2_done, self.n3_done]

    # --- undo / persistence ---------------------------------------------------

    def fixw(self, k: int) -> "TestSession":
        """Drop the last k console reads and rebuild the session."""
        if k < 0 or k > len(self.events):
            raise ValueError(f"cannot drop {k} of {len(self.events)} entries")
        return TestSession.replay(self.config, self.events[: len(self.events) - k],
                                  meta=dict(self.meta))

    @staticmethod
    def replay(config: SessionConfig, events, meta=None) -> "TestSession":
        s = TestSession(config)
        if meta:
            s.meta = dict(meta)
        for ev in events:
            s.apply(ev)
        return s

    def save(self, path):
        with open(path, "w") as f:
            header = {"version": self.FORMAT_VERSION, "config": self.config.to_dict(),
                      "meta": self.meta}
            f.write(json.dumps(header) + "\n")
            for ev in self.events:
                f.write(ev.to_json() + "\n")

    @staticmethod
    def load(path) -> "TestSession":
        with open(path) as f:
            lines = [ln for ln in f.read().splitlines() if ln.strip()]
        header = json.loads(lines[0])
        if header.get("version") != TestSession.FORMAT_VERSION:
            raise ValueError("unsupported session file version")
        cfg = SessionConfig.from_dict(header["config"])
        events = [Event.from_json(ln) for ln in lines[1:]]
        return TestSession.replay(cfg, events, meta=header.get("meta"))

    # --- export ----------------------------------------------------------------

    def export_text(self) -> str:
        """The run table in the comma-space text format."""
        lines = ["i, X, Y, COUNT, RX, EX, TX, ID"]
        live_i = 0
        for r in self.trials:
            if r.count == 1:
                live_i += 1
                idx = str(live_i)
            else:
                idx = f"{live_i}1"
            lines.append(", ".join([
                idx, fmt(r.x), str(r.y), str(r.count), fmt(r.rx), fmt(r.ex),
                fmt(r.tx), r.id,
            ]))
        return "\n".join(lines) + "\n"


def run_batch(config: SessionConfig, Y, X=None, n2=None, n3=None, p=None, lam=None,
              title="", units="X") -> TestSession:
    """Deterministic replay: responses from Y, stresses from the X prefix
    then from the procedure's rounded recommendations.
    """
    s = TestSession(config)
    s.submit("title", title)
    s.submit("units", units)
    X = list(X or [])
    Y = list(Y)
    i = 0
    try:
        while not s.finished:
            kind = s.prompt
            if kind is PromptKind.BL:
                if config.phase1.bl is None:
                    raise ValueError("batch run needs BL in the config")
                s.submit("bl", *config.phase1.bl)
            elif kind is PromptKind.TRIAL:
                if i >= len(Y):
                    break
                _, rx, _ = s.recommended()
                x_user = X[i] if i < len(X) else rx
                s.submit("sr", float(x_user), int(Y[i]))
                i += 1
            elif kind is PromptKind.N2:
                if n2 is None:
                    break
                s.submit("n2", int(n2))
            elif kind is PromptKind.N3:
                if n3 is None:
                    break
                s.submit("n3", int(n3))
            elif kind is PromptKind.PLAM:
                if p is None or lam is None:
                    break
                s.submit("plam", float(p), float(lam))
            else:
                break
    except SuspendedError as e:
        s.suspended = e.reason
        s._notice("Test Suspended")
    s.meta["surplus_y"] = len(Y) - i
    return s
