"""Symbolic fair-simulation checking.

The refutation search runs on an arena.  Its two ingredients:

* dead ends — state-pairs where the model can force the play to die
  (an elapse or a transition the specification side cannot survive);
  these refute only when the flipped strong side is empty, since a dead
  play trivially fails every strong obligation and an infinite play
  trivially meets an empty specification assumption;
* cyclic refutation — state-pairs from which the model can force the
  play through all flipped strong-side predicates forever, within the
  flipped weak-side predicates, with time diverging; these refute only
  when the specification carries an assumption to play against.

Both classes are closed under multi-step forcing and compared against
the initial condition: the model simulation holds iff every valid
initial model state has a valid initial specification partner outside
the refuting set.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .arena import Arena, MStep, Resp, UnsupportedFairness, Y_CLOCK, Z_CLOCK
from .model import (ClockCmp, EventPred, FairPred, Not, Pred, StatePred, TRUE,
                    FALSE, Top, Bottom)
from .symsets import SymbolicSet


def neg(p: Pred) -> Pred:
    if isinstance(p, Not):
        return p.arg
    if isinstance(p, Top):
        return FALSE
    if isinstance(p, Bottom):
        return TRUE
    return Not(p)


def flip(fp: FairPred) -> FairPred:
    """Move a spec-side fairness predicate to the opposing obligation set."""
    if isinstance(fp, StatePred):
        return StatePred(neg(fp.pred))
    return EventPred(fp.pre, fp.event, fp.direction, neg(fp.post))


@dataclass
class Verdict:
    simulates: bool
    bad_init: SymbolicSet
    refuting: SymbolicSet
    stats: dict = field(default_factory=dict)

    @property
    def result(self) -> str:
        return "SIMULATES" if self.simulates else "NOT-SIMULATES"


class Checker:
    def __init__(self, ar: Arena, use_extrapolation: bool = True):
        self.ar = ar
        self.extrap = use_extrapolation
        self.stats: dict = {"tuples": ar.tuple_count, "fixpoints": {}}
        self.z_eq = ar.c(ClockCmp(Z_CLOCK, "==", ar.cmfs))
        self.y_gt1 = ar.c(ClockCmp(Y_CLOCK, ">", 1))
        self.y_eq0 = ar.c(ClockCmp(Y_CLOCK, "==", 0))
        self._spec_death = ar.valid_ms.meet(ar.valid_ss.complement()) \
            .meet(ar.c(ClockCmp(Z_CLOCK, "<=", ar.cmfs)))

    # -- plumbing -----------------------------------------------------------
    def _ex(self, s: SymbolicSet) -> SymbolicSet:
        return s.extrapolate() if self.extrap else s

    def _note(self, name: str, iters: int) -> None:
        self.stats["fixpoints"].setdefault(name, []).append(iters)

    def t_op(self, path: SymbolicSet, goal: SymbolicSet) -> SymbolicSet:
        return path.elapse_pre(goal)

    def _start_of_cycle(self, s: SymbolicSet) -> SymbolicSet:
        """Restrict to cycle-clock 0, then forget it."""
        return s.meet(self.y_eq0).free_clocks([Y_CLOCK])

    # -- specification stuttering -------------------------------------------
    def spec_until(self, path: SymbolicSet, bad: SymbolicSet) -> SymbolicSet:
        """Pairs from which the specification side can reach ``bad`` using
        time and its own autonomous steps, staying on ``path`` while time
        passes."""
        q = bad
        it = 0
        while True:
            it += 1
            moved = q
            for g in self.ar.spec_steps:
                moved = moved.join(self.ar.spec_pre(g, q))
            nq = self._ex(q.join(self.t_op(path, moved)))
            if nq.same_as(q):
                break
            q = nq
        self._note("spec_until", it)
        return q

    # -- one forced step ----------------------------------------------------
    def bad_responses(self, st: MStep, weak_events: list[EventPred],
                      target: SymbolicSet) -> SymbolicSet:
        out = SymbolicSet.empty(self.ar.scope)
        escape = target.complement()
        for r in st.responses:
            out = out.join(self.ar.pair_pre(st, r, escape))
            for wp in weak_events:
                if wp.matches(st.events):
                    out = out.join(self.ar.c(wp.pre).meet(
                        self.ar.pair_pre(st, r, self.ar.c(neg(wp.post)))))
        return out

    def one_step_force(self, st: MStep, weak_events: list[EventPred],
                       path: SymbolicSet, target: SymbolicSet,
                       fair_m: SymbolicSet,
                       at_fire: SymbolicSet | None = None,
                       death_escapes: bool = False) -> SymbolicSet:
        """Pairs from which the model can elapse and take ``st`` so that
        every specification behavior lands in ``target`` without violating
        the threaded weak event obligations.

        With ``death_escapes`` the specification also defeats the forcing
        by dying before the step or by having no surviving response at the
        firing point — needed when forcing an infinite continuation, where
        a dead play is no continuation at all."""
        goal = self.ar.exists_spec(target).meet(fair_m)
        fire = self.ar.model_pre(st, goal)
        if at_fire is not None:
            fire = fire.meet(at_fire)
        fire = fire.meet(self.z_eq)
        m1 = self.t_op(self.ar.exists_spec(path), fire)
        if m1.is_empty():
            return m1
        bad = self.bad_responses(st, weak_events, target).meet(self.z_eq)
        if death_escapes:
            survive = SymbolicSet.empty(self.ar.scope)
            for r in st.responses:
                survive = survive.join(
                    self.ar.pair_pre(st, r, self.ar.valid_pair))
            bad = bad.join(self.ar.valid_pair.meet(self.z_eq)
                           .meet(survive.complement()))
            bad = bad.join(self._spec_death)
        if not bad.is_empty():
            m1 = m1.meet(self.spec_until(path, bad).complement())
        return m1.free_clocks([Z_CLOCK])

    def one_step_kill(self, st: MStep, fair_m: SymbolicSet) -> SymbolicSet:
        """Pairs from which the model can elapse and take ``st`` while the
        specification side has no surviving behavior at the firing point."""
        fire = self.ar.model_pre(st, fair_m).meet(self.z_eq)
        m1 = self.t_op(self.ar.exists_spec(self.ar.valid_pair), fire)
        if m1.is_empty():
            return m1
        survive = SymbolicSet.empty(self.ar.scope)
        for r in st.responses:
            survive = survive.join(
                self.ar.pair_pre(st, r, self.ar.valid_pair))
        survive = survive.meet(self.z_eq)
        if not survive.is_empty():
            m1 = m1.meet(
                self.spec_until(self.ar.valid_pair, survive).complement())
        return m1.free_clocks([Z_CLOCK])

    # -- multi-step forcing -------------------------------------------------
    def multi_step_force(self, weak_events: list[EventPred],
                         path: SymbolicSet, target: SymbolicSet,
                         fair_m: SymbolicSet, name: str,
                         death_escapes: bool = False) -> SymbolicSet:
        acc = target
        it = 0
        while True:
            it += 1
            nxt = acc
            for st in self.ar.msteps:
                nxt = nxt.join(
                    self.one_step_force(st, weak_events, path, acc, fair_m,
                                        death_escapes=death_escapes))
            nxt = self._ex(nxt)
            if nxt.same_as(acc):
                break
            acc = nxt
        self._note(name, it)
        return acc

    # -- model-side fairness -------------------------------------------------
    def allowed_model_pre(self, st: MStep, weak_events: list[EventPred],
                          target: SymbolicSet) -> SymbolicSet:
        matching = [wp for wp in weak_events if wp.matches(st.events)]
        if not matching:
            return self.ar.model_pre(st, target)
        out = SymbolicSet.empty(self.ar.scope)
        for mask in range(1 << len(matching)):
            cond = SymbolicSet.full(self.ar.scope)
            land = target
            for i, wp in enumerate(matching):
                if mask >> i & 1:
                    cond = cond.meet(self.ar.c(wp.pre))
                    land = land.meet(self.ar.c(wp.post))
                else:
                    cond = cond.meet(self.ar.c(neg(wp.pre)))
            if not cond.is_empty():
                out = out.join(self.ar.model_pre(st, land).meet(cond))
        return out

    def model_reach(self, path: SymbolicSet, weak_events: list[EventPred],
                    target: SymbolicSet, name: str) -> SymbolicSet:
        acc = target.meet(path)
        it = 0
        while True:
            it += 1
            moved = acc
            for st in self.ar.msteps:
                moved = moved.join(
                    self.allowed_model_pre(st, weak_events, acc))
            nxt = self._ex(acc.join(self.t_op(path, moved)))
            if nxt.same_as(acc):
                break
            acc = nxt
        self._note(name, it)
        return acc

    def model_fair_states(self) -> SymbolicSet:
        """Model-side states from which a fair, time-divergent run exists
        (specification coordinates unconstrained)."""
        f = self.ar.model_fairness
        strong = list(f.strong)
        weak_states = [fp.pred for fp in f.weak if isinstance(fp, StatePred)]
        weak_events = [fp for fp in f.weak if isinstance(fp, EventPred)]
        spms = self.ar.valid_ms
        for p in weak_states:
            spms = spms.meet(self.ar.c(p))
        w = spms
        it = 0
        while True:
            it += 1
            nw = w
            for fp in (strong or [None]):
                if fp is None or isinstance(fp, StatePred):
                    tgt = w.meet(self.y_gt1)
                    if fp is not None:
                        tgt = tgt.meet(self.ar.c(fp.pred))
                else:
                    tgt = SymbolicSet.empty(self.ar.scope)
                    land = w.meet(self.ar.c(fp.post))
                    for st in self.ar.msteps:
                        if fp.matches(st.events):
                            tgt = tgt.join(
                                self.ar.model_pre(st, land)
                                .meet(self.ar.c(fp.pre)).meet(self.y_gt1))
                r = self.model_reach(spms, weak_events, tgt, "fair_round")
                nw = nw.meet(self._start_of_cycle(r))
            nw = self._ex(nw)
            if nw.same_as(w):
                break
            w = nw
        self._note("fair_core", it)
        fair = self.model_reach(self.ar.valid_ms, [], w, "fair_prefix")
        return fair

    # -- cyclic refutation ---------------------------------------------------
    def csr_states(self, strong: list[FairPred],
                   spms: SymbolicSet, weak_events: list[EventPred],
                   fair_m: SymbolicSet) -> SymbolicSet:
        w = self.ar.valid_pair.meet(spms)
        it = 0
        while True:
            it += 1
            nw = w
            for fp in (strong or [None]):
                if fp is None or isinstance(fp, StatePred):
                    tgt = w.meet(self.y_gt1).meet(spms)
                    if fp is not None:
                        tgt = tgt.meet(self.ar.c(fp.pred))
                else:
                    tgt = SymbolicSet.empty(self.ar.scope)
                    land = w.meet(self.ar.c(fp.post))
                    at = self.ar.c(fp.pre).meet(self.y_gt1)
                    for st in self.ar.msteps:
                        if fp.matches(st.events):
                            tgt = tgt.join(self.one_step_force(
                                st, weak_events, spms, land, fair_m,
                                at_fire=at, death_escapes=True))
                r = self.multi_step_force(weak_events, spms, tgt, fair_m,
                                          "csr_round", death_escapes=True)
                nw = nw.meet(self._start_of_cycle(r))
            nw = self._ex(nw.meet(spms))
            if nw.same_as(w):
                break
            w = nw
        self._note("csr_core", it)
        return w

    # -- top level -----------------------------------------------------------
    def check(self) -> Verdict:
        ar = self.ar
        fs = ar.spec_fairness
        if len(fs.strong) + len(fs.weak) > 1:
            raise UnsupportedFairness(
                "the specification side supports at most one fairness "
                "assumption")
        strong: list[FairPred] = list(ar.model_fairness.strong) + \
            [flip(p) for p in fs.weak]
        weak: list[FairPred] = list(ar.model_fairness.weak) + \
            [flip(p) for p in fs.strong]
        spms = ar.valid_pair
        for fp in weak:
            if isinstance(fp, StatePred):
                spms = spms.meet(ar.c(fp.pred))
        weak_events = [fp for fp in weak if isinstance(fp, EventPred)]

        fair_m = self.model_fair_states()
        refuting = SymbolicSet.empty(ar.scope)
        if not strong:
            base = SymbolicSet.empty(ar.scope)
            for st in ar.msteps:
                base = base.join(self.one_step_kill(st, fair_m))
            if not base.is_empty():
                refuting = refuting.join(self.multi_step_force(
                    [], ar.valid_pair, base, fair_m, "dead_end_closure"))
        if len(fs.strong) + len(fs.weak) == 1:
            csr = self.csr_states(strong, spms, weak_events, fair_m)
            if not csr.is_empty():
                refuting = refuting.join(self.multi_step_force(
                    [], ar.valid_pair, csr, fair_m, "csr_closure",
                    death_escapes=True))

        good_spec = ar.c(ar.init_spec).meet(ar.valid_ss) \
            .meet(refuting.complement())
        bad_init = ar.c(ar.init_model).meet(ar.valid_ms).meet(fair_m) \
            .meet(ar.exists_spec(good_spec).complement())
        self.stats["refuting_parts"] = len(refuting.parts)
        return Verdict(bad_init.is_empty(), bad_init, refuting, self.stats)


def check_simulation(model, spec, cmfs=None,
                     use_extrapolation: bool = True) -> Verdict:
    from .arena import build_classic_arena
    ar = build_classic_arena(model, spec, cmfs)
    return Checker(ar, use_extrapolation).check()


def check_simulation_env(envs, model, spec, cmfs=None,
                         use_extrapolation: bool = True) -> Verdict:
    from .arena import build_env_arena
    ar = build_env_arena(envs, model, spec, cmfs)
    return Checker(ar, use_extrapolation).check()
