"""The four first-phase stress-selection procedures as resumable step machines.

Each machine consumes (actual stimulus, response) pairs and produces the
next recommended stimulus on the analysis scale, tagged with the stage
label that ends up in the trial record.  Machines are deterministic
functions of the recorded history, so replaying a session reconstructs
them exactly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .numerics import OverlapStatus, TrialSet, classify_overlap
from .refine import doptimal_pseudo


class Procedure(enum.IntEnum):
    THREEPOD = 1
    NEYER = 2
    BRUCETON = 3
    LANGLIE = 4


@dataclass(frozen=True)
class Phase1Config:
    procedure: Procedure
    mlo: float
    mhi: float
    sg: float
    term1: bool = True
    bl: tuple[int, int, int] | None = None  # (nrev, i1, i2) for Bruceton/Langlie

    def validate(self):
        p = self.procedure
        if p in (Procedure.THREEPOD, Procedure.NEYER, Procedure.LANGLIE) and not self.mlo < self.mhi:
            raise ValueError("mlo must be below mhi for this procedure")
        if p in (Procedure.THREEPOD, Procedure.NEYER, Procedure.BRUCETON) and not self.sg > 0:
            raise ValueError("sg must be positive for this procedure")
        if p in (Procedure.BRUCETON, Procedure.LANGLIE):
            if self.bl is None:
                raise ValueError("BL = (nRev, i1, i2) is required for Bruceton/Langlie")
            nrev, i1, i2 = self.bl
            if nrev < 0:
                raise ValueError("nRev must be nonnegative")
            if i1 == 0 and i2 == 0:
                raise ValueError("i1 and i2 cannot both be 0")
            udtr_rule(i1) if i1 else None
            udtr_rule(i2, complement=True) if i2 else None


@dataclass(frozen=True)
class UdtrRule:
    """Up-down transformed-response rule: trigger strings and target level."""

    i: int
    down: frozenset[str]
    up: frozenset[str]
    p: float

    @property
    def group_len(self) -> int:
        return max(len(s) for s in self.down | self.up)


def _solve_even_p(m: int) -> float:
    # target level for the compound rules: p^m (2 - p) = 1/2
    lo, hi = 0.5, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid ** m * (2.0 - mid) < 0.5:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def udtr_rule(i: int, complement: bool = False) -> UdtrRule | None:
    """Trigger sets and response level for transformed-response rule ``i``.

    Odd i = 2m-1 moves down after m straight responses (level 2^(-1/m));
    even i uses the compound triggers.  ``complement`` swaps the roles of
    response and non-response, targeting 1-p.  i = 0 means no test in
    this slot.
    """
    if i == 0:
        return None
    if not 1 <= i <= 7:
        raise ValueError(f"unsupported transformed-response rule i={i}")
    if i % 2 == 1:
        m = (i + 1) // 2
        down = {"1" * m}
        up = {"1" * j + "0" for j in range(m)}
        p = 2.0 ** (-1.0 / m)
    else:
        m = i // 2 + 1
        down = {"1" * m, "1" * (m - 1) + "01"}
        up = {"1" * j + "0" for j in range(m - 1)} | {"1" * (m - 1) + "00"}
        p = _solve_even_p(m)
    if complement:
        flip = lambda s: s.translate(str.maketrans("01", "10"))
        down, up = {flip(s) for s in up}, {flip(s) for s in down}
        p = 1.0 - p
    return UdtrRule(i=i, down=frozenset(down), up=frozenset(up), p=p)


@dataclass(frozen=True)
class Recommendation:
    x: float
    stage: str


class Phase1Machine:
    """Base: records actual (x, y) pairs and serves recommendations."""

    def __init__(self, cfg: Phase1Config):
        cfg.validate()
        self.cfg = cfg
        self.xs: list[float] = []
        self.ys: list[int] = []
        self.done = False

    def record(self, x: float, y: int):
        self.xs.append(float(x))
        self.ys.append(int(y))
        self._after_record()

    def _after_record(self):
        pass

    def recommend(self) -> Recommendation:
        raise NotImplementedError

    def _bounds(self):
        ones = [x for x, y in zip(self.xs, self.ys) if y == 1]
        zeros = [x for x, y in zip(self.xs, self.ys) if y == 0]
        m1 = min(ones) if ones else None
        M0 = max(zeros) if zeros else None
        return m1, M0

    def n_runs(self) -> int:
        return len(self.xs)


class ThreePod(Phase1Machine):
    """Three-stage binary search: bracket, squeeze to overlap, enhance.

    Stage 1 opens with quarter-points of the initial range; stage 2
    alternates probes just outside the zone of separation with geometric
    step reductions; stage 3 adds two symmetric runs about the zone of
    mixed results.
    """

    def __init__(self, cfg):
        super().__init__(cfg)
        self.stage = "I1"
        self.w = cfg.sg  # working step scale, shrunk by 2/3 per exhausted pair
        self.side = None  # straddle side currently being probed
        self.cycle_pos = 0
        self.reduce_pending = False
        self.crossed_left = 0
        self.i3_left = 2
        self.i3_w = None
        self._intent = None
        self._marker = None

    def recommend(self) -> Recommendation:
        if self._intent is not None:
            return self._intent
        if self.done:
            raise RuntimeError("phase I already complete")
        self._marker = None
        rec = self._decide()
        self._intent = rec
        return rec

    def _after_record(self):
        intent, self._intent = self._intent, None
        if intent is None:
            raise RuntimeError("record without a pending recommendation")
        if self._marker == "straddle-first":
            self.cycle_pos = 1
        elif self._marker == "straddle-second":
            self.cycle_pos = 0
            self.reduce_pending = True
        self._marker = None
        if self.stage == "I1" and self.crossed_left:
            self.crossed_left -= 1
            if self.crossed_left == 0:
                self.stage = "I2"
        if self.stage == "I3" and intent.stage == "I3":
            self.i3_left -= 1
            if self.i3_left == 0:
                self.done = True

    def _decide(self) -> Recommendation:
        cfg = self.cfg
        d = cfg.mhi - cfg.mlo
        n = self.n_runs()
        if self.stage == "I1":
            if n == 0:
                return Recommendation(cfg.mlo + d / 4.0, "I1(iii)")
            if n == 1:
                return Recommendation(cfg.mhi - d / 4.0, "I1(iii)")
            if self.crossed_left == 2:
                return self._tag(0.5 * (min(self.xs) + max(self.xs)), "I1(iii)")
            if self.crossed_left == 1:
                m1, M0 = self._bounds()
                if self.ys[-1] == 1:
                    return self._tag(0.5 * (m1 + self.xs[-1]), "I1(iii)")
                return self._tag(0.5 * (self.xs[-1] + M0), "I1(iii)")
            if all(y == 1 for y in self.ys):
                lo, hi = min(self.xs), max(self.xs)
                return self._tag(lo - (hi - lo) / 4.0, "I1(i)")
            if all(y == 0 for y in self.ys):
                lo, hi = min(self.xs), max(self.xs)
                return self._tag(hi + (hi - lo) / 4.0, "I1(ii)")
            m1, M0 = self._bounds()
            if n == 2 and m1 < M0:
                # responses crossed: probe the interior twice before moving on
                self.crossed_left = 2
                return self._decide()
            self.stage = "I2"
        if self.stage == "I2":
            m1, M0 = self._bounds()
            if m1 < M0 or (cfg.term1 and m1 == M0):
                self.stage = "I3"
                self.i3_w = self.w
            else:
                if self.reduce_pending:
                    self.w *= 2.0 / 3.0
                    self.reduce_pending = False
                gap = m1 - M0
                r = "r" if self.w < cfg.sg else ""
                if self.cycle_pos == 1:
                    other = "low" if self.side == "high" else "high"
                    return self._straddle(other, self.side, r, "straddle-second", m1, M0)
                if gap >= 1.5 * self.w:
                    return self._tag(0.5 * (m1 + M0), "I2(ib)")
                # probe the thinner flank of the separation zone first
                n_below = sum(1 for x in self.xs if x < M0)
                n_above = sum(1 for x in self.xs if x > m1)
                self.side = "low" if n_below <= n_above else "high"
                return self._straddle(self.side, self.side, r, "straddle-first", m1, M0)
        # stage I3: two runs symmetric about the mixed zone
        m1, M0 = self._bounds()
        mid = 0.5 * (m1 + M0)
        off = 0.5 * (self.i3_w if self.i3_w is not None else self.w)
        x = mid + off if self.i3_left == 2 else mid - off
        return self._tag(x, "I3")

    def _straddle(self, side, first_side, r, marker, m1, M0):
        self._marker = marker
        x = m1 + 0.3 * self.w if side == "high" else M0 - 0.3 * self.w
        case = "c" if first_side == "high" else "d"
        return Recommendation(x, f"{r}I2(i{case})")

    def _tag(self, x, lbl):
        return Recommendation(x, lbl)


class Neyer(Phase1Machine):
    """Binary search plus pre-overlap D-optimal probing.

    Block B0 opens at the midrange; B1 walks a doubling ladder while the
    responses stay one-sided; B3 bisects the separation zone down to the
    guess scale; B4 selects D-optimal stimuli around working estimates
    until the data overlap.
    """

    def __init__(self, cfg):
        super().__init__(cfg)
        self.ladder_k = 0
        self._intent = None

    def recommend(self) -> Recommendation:
        if self._intent is None:
            self._intent = self._decide()
        return self._intent

    def _after_record(self):
        intent, self._intent = self._intent, None
        if intent is None:
            raise RuntimeError("record without a pending recommendation")
        if intent.stage == "B1":
            self.ladder_k += 1
        m1, M0 = self._bounds()
        if m1 is not None and M0 is not None and m1 < M0:
            self.done = True

    def _decide(self) -> Recommendation:
        cfg = self.cfg
        d = cfg.mhi - cfg.mlo
        if self.n_runs() == 0:
            return Recommendation(0.5 * (cfg.mlo + cfg.mhi), "B0")
        if all(y == self.ys[0] for y in self.ys):
            k = self.ladder_k
            if self.ys[0] == 0:
                xs = [cfg.mlo + 0.75 * d, cfg.mhi]
                x = xs[k] if k < 2 else cfg.mhi + (2 ** (k - 1) - 1) * d / 2.0
            else:
                xs = [cfg.mlo + 0.25 * d, cfg.mlo]
                x = xs[k] if k < 2 else cfg.mlo - (2 ** (k - 1) - 1) * d / 2.0
            return Recommendation(x, "B1")
        m1, M0 = self._bounds()
        gap = m1 - M0
        if gap >= 1.5 * cfg.sg:
            return Recommendation(0.5 * (m1 + M0), "B3")
        trials = TrialSet.from_xy(self.xs, self.ys)
        return Recommendation(doptimal_pseudo(trials, 0.5 * (m1 + M0), cfg.sg), "B4")


class _UpDownBase(Phase1Machine):
    """Shared trigger-group and reversal bookkeeping for the up-down tests."""

    def __init__(self, cfg):
        super().__init__(cfg)
        nrev, i1, i2 = cfg.bl
        self.nrev = nrev
        self.plans = []
        if i1:
            self.plans.append(udtr_rule(i1))
        if i2:
            self.plans.append(udtr_rule(i2, complement=True))
        self.test_idx = 0
        self.level = None
        self.pending = ""
        self.moves: list[str] = []
        self.groups: list[tuple[float, str]] = []  # (level at trigger, direction)
        self._intent = None

    @property
    def rule(self) -> UdtrRule:
        return self.plans[self.test_idx]

    def reversals(self) -> int:
        return sum(1 for a, b in zip(self.moves, self.moves[1:]) if a != b)

    def start_level(self) -> float:
        p = self.rule.p
        return (1.0 - p) * self.cfg.mlo + p * self.cfg.mhi

    def recommend(self) -> Recommendation:
        if self._intent is None:
            if self.level is None:
                self.level = self.start_level()
            self._intent = Recommendation(self.level, f"I{self.test_idx + 1}")
        return self._intent

    def _after_record(self):
        self._intent = None
        self.pending += str(self.ys[-1])
        if self.pending in self.rule.down:
            self._move("D")
        elif self.pending in self.rule.up:
            self._move("U")
        self._check_exit()

    def _move(self, direction):
        self.groups.append((self.xs[-1], direction))
        self.moves.append(direction)
        self.pending = ""
        self.level = self._next_level(direction)

    def _next_level(self, direction):
        raise NotImplementedError

    def _check_exit(self):
        if self.test_idx + 1 < len(self.plans):
            if self.moves and self.reversals() >= self.nrev:
                self.test_idx += 1
                self.level = None
                self.pending = ""
                self.moves = []
                self.groups = []
            return
        if self.reversals() < self.nrev:
            return
        summ = classify_overlap(TrialSet.from_xy(self.xs, self.ys))
        if summ.status is OverlapStatus.INTERVAL_OVERLAP:
            self.done = True


class Bruceton(_UpDownBase):
    """Constant-step up-down test: one guess-scale step per trigger."""

    def _next_level(self, direction):
        step = self.cfg.sg
        return self.level - step if direction == "D" else self.level + step


class Langlie(_UpDownBase):
    """Memory up-down test: average back to the earliest balancing level.

    On each move, walk back through the completed trigger groups until the
    down and up moves balance; the next level is the midpoint of the
    current level and that group's level, or of the current level and the
    corresponding design bound when no window balances.
    """

    def _next_level(self, direction):
        groups = self.groups
        k = len(groups) - 1
        nd = 1 if direction == "D" else 0
        nu = 1 - nd
        cur = groups[k][0]
        for j in range(k - 1, -1, -1):
            if groups[j][1] == "D":
                nd += 1
            else:
                nu += 1
            if nd == nu:
                return 0.5 * (cur + groups[j][0])
        bound = self.cfg.mlo if direction == "D" else self.cfg.mhi
        return 0.5 * (cur + bound)


def make_machine(cfg: Phase1Config) -> Phase1Machine:
    cls = {
        Procedure.THREEPOD: ThreePod,
        Procedure.NEYER: Neyer,
        Procedure.BRUCETON: Bruceton,
        Procedure.LANGLIE: Langlie,
    }[cfg.procedure]
    return cls(cfg)


def phase1_next(cfg: Phase1Config, history) -> Recommendation | None:
    """Pure view of the step machines: replay history, return the next
    recommendation, or None when phase I is complete.

    ``history`` is any iterable of (x, y) pairs on the analysis scale.
    """
    m = make_machine(cfg)
    for x, y in history:
        if m.done:
            raise ValueError("history extends past phase-I completion")
        m.recommend()
        m.record(x, y)
    if m.done:
        return None
    return m.recommend()
