"""Game arenas for the simulation check.

An arena packages the joint scope, the compiled validity sets, the
model-side steps (each with its list of compatible specification-side
responses) and the specification's autonomous steps.  Classic arenas pair
a model automaton against a specification automaton; environment arenas
pair them against one shared environment copy, synchronizing tuples on
the same environment transition.  The checking engine only sees steps,
so both modes run through identical fixpoints.
"""
from __future__ import annotations

from dataclasses import dataclass

from .model import (Event, FairAutomaton, Fairness, EventPred, StatePred,
                    Pred, Prop, TimedAutomaton, Transition, TRUE, pand, por,
                    compatible_transitions, pred_constants,
                    lift_fairness_to_product, build_product)
from .symsets import Scope, SymbolicSet, compile_pred

Z_CLOCK = "_z"
Y_CLOCK = "_y"

Comp = tuple[int, str, str]  # group index, source location, target location


@dataclass
class Resp:
    comps: tuple[Comp, ...]
    resets: tuple[str, ...]
    fire: SymbolicSet      # source locations + invariants + guard
    inv_post: SymbolicSet  # target invariants


@dataclass
class MStep:
    key: str
    events: frozenset[Event]
    comps: tuple[Comp, ...]
    resets: tuple[str, ...]
    fire: SymbolicSet
    inv_post: SymbolicSet
    responses: tuple[Resp, ...]
    is_null: bool = False


class UnsupportedFairness(Exception):
    """The specification side carries more than one fairness assumption."""


class Arena:
    def __init__(self, scope: Scope, spec_gidxs: list[int],
                 spec_clocks: list[str], cmfs: int):
        self.scope = scope
        self.spec_gidxs = spec_gidxs
        self.spec_clocks = spec_clocks
        self.cmfs = cmfs
        self.cache: dict = {}
        self.msteps: list[MStep] = []
        self.spec_steps: list[Resp] = []
        self.valid_ms: SymbolicSet = None  # set in builders
        self.valid_ss: SymbolicSet = None
        self.valid_pair: SymbolicSet = None
        self.init_model: Pred = TRUE
        self.init_spec: Pred = TRUE
        self.model_fairness: Fairness = Fairness()
        self.spec_fairness: Fairness = Fairness()
        self.tuple_count = 0

    def c(self, pred: Pred) -> SymbolicSet:
        return compile_pred(self.scope, pred, self.cache)

    def exists_spec(self, s: SymbolicSet) -> SymbolicSet:
        return s.quantify(self.spec_gidxs, self.spec_clocks)

    # -- step application ----------------------------------------------------
    def discrete_pre(self, comps: tuple[Comp, ...], resets: tuple[str, ...],
                     fire: SymbolicSet, inv_post: SymbolicSet,
                     target: SymbolicSet) -> SymbolicSet:
        s = target.meet(inv_post)
        for g, _, dst in comps:
            s = s.restrict_loc(g, dst)
        if resets:
            s = s.unreset_clocks(list(resets))
        for g, src, dst in comps:
            s = s.relabel(g, dst, src)
        return s.meet(fire)

    def model_pre(self, st: MStep, target: SymbolicSet) -> SymbolicSet:
        return self.discrete_pre(st.comps, st.resets, st.fire,
                                 st.inv_post, target)

    def pair_pre(self, st: MStep, r: Resp, target: SymbolicSet) -> SymbolicSet:
        return self.discrete_pre(
            st.comps + r.comps, st.resets + r.resets,
            st.fire.meet(r.fire), st.inv_post.meet(r.inv_post), target)

    def spec_pre(self, r: Resp, target: SymbolicSet) -> SymbolicSet:
        """Specification-only autonomous step, model side staying valid."""
        return self.discrete_pre(r.comps, r.resets, r.fire, r.inv_post,
                                 target).meet(self.valid_ms)

    def resp_enabled(self, r: Resp) -> SymbolicSet:
        """States where the response can fire with a valid landing."""
        return self.discrete_pre(r.comps, r.resets, r.fire, r.inv_post,
                                 SymbolicSet.full(self.scope))


def _instance_constant(autos: list[TimedAutomaton],
                       fairs: list[Fairness]) -> int:
    best = 0
    for a in autos:
        best = max(best, a.max_constant())
    for f in fairs:
        for fp in (*f.strong, *f.weak):
            preds = [fp.pred] if isinstance(fp, StatePred) else [fp.pre, fp.post]
            for p in preds:
                for v in pred_constants(p).values():
                    best = max(best, v)
    return best


def _mk_scope(autos: list[TimedAutomaton], fairs: list[Fairness],
              cmfs: int) -> Scope:
    groups = tuple(a.locations for a in autos)
    clocks = tuple(c for a in autos for c in a.clocks) + (Z_CLOCK, Y_CLOCK)
    ceil = max(_instance_constant(autos, fairs), cmfs, 1)
    return Scope(groups, clocks, {c: ceil for c in clocks})


def _resp_from(ar: Arena, gidx: int, t: Transition,
               a: TimedAutomaton) -> Resp:
    fire = ar.c(pand(Prop(t.source), a.invariant(t.source), t.guard))
    return Resp(comps=((gidx, t.source, t.target),),
                resets=tuple(sorted(t.resets)),
                fire=fire, inv_post=ar.c(a.invariant(t.target)))


def _null_resp(ar: Arena, gidx: int, a: TimedAutomaton) -> Resp:
    valid = por(*(pand(Prop(q), a.invariant(q)) for q in a.locations))
    return Resp(comps=(), resets=(), fire=ar.c(valid),
                inv_post=ar.c(TRUE))


def build_classic_arena(m: FairAutomaton, s: FairAutomaton,
                        cmfs: int | None = None) -> Arena:
    if (set(m.ta.locations) & set(s.ta.locations)) or \
            (set(m.ta.clocks) & set(s.ta.clocks)):
        s = FairAutomaton(_rename_automaton(s.ta, "'"),
                          _rename_fairness(s.fairness, s.ta, "'"))
    mt, st = m.ta, s.ta
    base = _instance_constant([mt, st], [m.fairness, s.fairness])
    if cmfs is None:
        cmfs = max(1, base)
    scope = _mk_scope([mt, st], [m.fairness, s.fairness], cmfs)
    ar = Arena(scope, spec_gidxs=[1], spec_clocks=list(st.clocks), cmfs=cmfs)
    ar.model_fairness = m.fairness
    ar.spec_fairness = s.fairness
    ar.valid_ms = ar.c(mt.valid_pred())
    ar.valid_ss = ar.c(st.valid_pred())
    ar.valid_pair = ar.valid_ms.meet(ar.valid_ss)
    ar.init_model = mt.initial
    ar.init_spec = st.initial

    stay = _null_resp(ar, 1, st)
    spec_auto = [_resp_from(ar, 1, f, st) for f in st.transitions
                 if not f.events]
    ar.spec_steps = spec_auto

    for i, e in enumerate(mt.transitions):
        if e.events:
            resps = tuple(_resp_from(ar, 1, f, st)
                          for f in compatible_transitions(e, st) if f)
        else:
            resps = (stay,)
        ar.msteps.append(MStep(
            key=f"m{i}", events=e.events,
            comps=((0, e.source, e.target),),
            resets=tuple(sorted(e.resets)),
            fire=ar.c(pand(Prop(e.source), mt.invariant(e.source), e.guard)),
            inv_post=ar.c(mt.invariant(e.target)),
            responses=resps))
    null_fire = ar.valid_ms
    null = MStep(key="null", events=frozenset(), comps=(), resets=(),
                 fire=null_fire, inv_post=ar.c(TRUE),
                 responses=tuple(spec_auto) + (stay,), is_null=True)
    ar.msteps.append(null)
    ar.tuple_count = sum(max(1, len(st_.responses)) for st_ in ar.msteps)
    return ar


def fold_environment(envs: list[FairAutomaton]) -> FairAutomaton:
    """Compose environment processes, keeping outward channels open."""
    cur = envs[0]
    for nxt in envs[1:]:
        prod = build_product(cur.ta, nxt.ta, keep_open=True)
        f1 = lift_fairness_to_product(cur.fairness, cur.ta, nxt.ta, True)
        f2 = lift_fairness_to_product(nxt.fairness, cur.ta, nxt.ta, False)
        cur = FairAutomaton(prod, Fairness(f1.strong + f2.strong,
                                           f1.weak + f2.weak))
    return cur


def build_env_arena(envs: list[FairAutomaton], m: FairAutomaton,
                    s: FairAutomaton, cmfs: int | None = None) -> Arena:
    env = fold_environment(envs)
    used_locs = set(env.ta.locations) | set(m.ta.locations)
    used_clks = set(env.ta.clocks) | set(m.ta.clocks)
    if (set(s.ta.locations) & used_locs) or (set(s.ta.clocks) & used_clks):
        s = FairAutomaton(_rename_automaton(s.ta, "'"),
                          _rename_fairness(s.fairness, s.ta, "'"))
    et, mt, st = env.ta, m.ta, s.ta
    fair_m = Fairness(env.fairness.strong + m.fairness.strong,
                      env.fairness.weak + m.fairness.weak)
    autos, fairs = [et, mt, st], [fair_m, s.fairness]
    base = _instance_constant(autos, fairs)
    if cmfs is None:
        cmfs = max(1, base)
    scope = _mk_scope(autos, fairs, cmfs)
    ar = Arena(scope, spec_gidxs=[2], spec_clocks=list(st.clocks), cmfs=cmfs)
    ar.model_fairness = fair_m
    ar.spec_fairness = s.fairness
    env_valid = et.valid_pred()
    ar.valid_ms = ar.c(pand(env_valid, mt.valid_pred()))
    ar.valid_ss = ar.c(pand(env_valid, st.valid_pred()))
    ar.valid_pair = ar.valid_ms.meet(ar.valid_ss)
    ar.init_model = pand(et.initial, mt.initial)
    ar.init_spec = st.initial

    stay = _null_resp(ar, 2, st)
    spec_auto = [_resp_from(ar, 2, g, st) for g in st.transitions
                 if not g.events]
    ar.spec_steps = spec_auto

    def co_events(evs: frozenset[Event]) -> frozenset[Event]:
        return frozenset(e.co() for e in evs)

    k = 0
    for e in et.transitions:
        if e.events:
            # environment channel: fires jointly with a model transition and,
            # on the specification side, the same e with a compatible g
            for f in mt.transitions:
                if f.events != co_events(e.events):
                    continue
                events = frozenset(
                    {Event(x.name, x.direction, "env") for x in e.events} |
                    {Event(x.name, x.direction, "main") for x in f.events})
                resps = tuple(_resp_from(ar, 2, g, st)
                              for g in st.transitions if g.events == f.events)
                ar.msteps.append(MStep(
                    key=f"t{k}", events=events,
                    comps=((0, e.source, e.target), (1, f.source, f.target)),
                    resets=tuple(sorted(e.resets | f.resets)),
                    fire=ar.c(pand(Prop(e.source), et.invariant(e.source),
                                   e.guard, Prop(f.source),
                                   mt.invariant(f.source), f.guard)),
                    inv_post=ar.c(pand(et.invariant(e.target),
                                       mt.invariant(f.target))),
                    responses=resps))
                k += 1
        else:
            ar.msteps.append(MStep(
                key=f"t{k}", events=frozenset(),
                comps=((0, e.source, e.target),),
                resets=tuple(sorted(e.resets)),
                fire=ar.c(pand(Prop(e.source), et.invariant(e.source),
                               e.guard, mt.valid_pred())),
                inv_post=ar.c(et.invariant(e.target)),
                responses=(stay,)))
            k += 1
    for f in mt.transitions:
        if f.events:
            continue  # evented model moves must synchronize with the env
        ar.msteps.append(MStep(
            key=f"t{k}", events=frozenset(),
            comps=((1, f.source, f.target),),
            resets=tuple(sorted(f.resets)),
            fire=ar.c(pand(Prop(f.source), mt.invariant(f.source), f.guard,
                           env_valid)),
            inv_post=ar.c(mt.invariant(f.target)),
            responses=(stay,)))
        k += 1
    null = MStep(key="null", events=frozenset(), comps=(), resets=(),
                 fire=ar.valid_ms, inv_post=ar.c(TRUE),
                 responses=tuple(spec_auto) + (stay,), is_null=True)
    ar.msteps.append(null)
    ar.tuple_count = sum(max(1, len(st_.responses)) for st_ in ar.msteps)
    return ar


def _rename_pred(p: Pred, lmap: dict[str, str], cmap: dict[str, str]) -> Pred:
    from .model import And, ClockCmp, Not, Or
    if isinstance(p, Prop):
        return Prop(lmap.get(p.name, p.name))
    if isinstance(p, ClockCmp):
        return ClockCmp(cmap.get(p.clock, p.clock), p.op, p.const)
    if isinstance(p, Not):
        return Not(_rename_pred(p.arg, lmap, cmap))
    if isinstance(p, And):
        return pand(*(_rename_pred(x, lmap, cmap) for x in p.args))
    if isinstance(p, Or):
        return por(*(_rename_pred(x, lmap, cmap) for x in p.args))
    return p


def _retarget_refs(a: TimedAutomaton, lmap: dict[str, str],
                   cmap: dict[str, str]) -> TimedAutomaton:
    """Rewrite references to OTHER automata's locations/clocks inside a's
    predicates; a's own names are untouched."""
    return TimedAutomaton(
        name=a.name, locations=a.locations, clocks=a.clocks,
        invariants={q: _rename_pred(i, lmap, cmap)
                    for q, i in a.invariants.items()},
        initial=_rename_pred(a.initial, lmap, cmap),
        transitions=tuple(
            Transition(t.source, t.target, t.events,
                       _rename_pred(t.guard, lmap, cmap), t.resets)
            for t in a.transitions))


def _retarget_fairness(f: Fairness, lmap: dict[str, str],
                       cmap: dict[str, str]) -> Fairness:
    def one(fp):
        if isinstance(fp, StatePred):
            return StatePred(_rename_pred(fp.pred, lmap, cmap))
        return EventPred(_rename_pred(fp.pre, lmap, cmap), fp.event,
                         fp.direction, _rename_pred(fp.post, lmap, cmap))
    return Fairness(tuple(one(x) for x in f.strong),
                    tuple(one(x) for x in f.weak))


def _rename_automaton(a: TimedAutomaton, suffix: str) -> TimedAutomaton:
    lmap = {q: q + suffix for q in a.locations}
    cmap = {c: c + suffix for c in a.clocks}
    return TimedAutomaton(
        name=a.name + suffix,
        locations=tuple(lmap[q] for q in a.locations),
        clocks=tuple(cmap[c] for c in a.clocks),
        invariants={lmap[q]: _rename_pred(i, lmap, cmap)
                    for q, i in a.invariants.items()},
        initial=_rename_pred(a.initial, lmap, cmap),
        transitions=tuple(Transition(lmap[t.source], lmap[t.target], t.events,
                                     _rename_pred(t.guard, lmap, cmap),
                                     frozenset(cmap[c] for c in t.resets))
                          for t in a.transitions))


def _rename_fairness(f: Fairness, a: TimedAutomaton,
                     suffix: str) -> Fairness:
    lmap = {q: q + suffix for q in a.locations}
    cmap = {c: c + suffix for c in a.clocks}

    def one(fp):
        if isinstance(fp, StatePred):
            return StatePred(_rename_pred(fp.pred, lmap, cmap))
        return EventPred(_rename_pred(fp.pre, lmap, cmap), fp.event,
                         fp.direction, _rename_pred(fp.post, lmap, cmap))

    return Fairness(tuple(one(x) for x in f.strong),
                    tuple(one(x) for x in f.weak))


def env_to_product(envs: list[FairAutomaton], m: FairAutomaton,
                   s: FairAutomaton) -> tuple[FairAutomaton, FairAutomaton]:
    """Reduce a shared-environment instance to a classic pair by giving the
    specification its own renamed environment copy."""
    env = fold_environment(envs)
    if (set(s.ta.locations) & set(m.ta.locations)) or \
            (set(s.ta.clocks) & set(m.ta.clocks)):
        s = FairAutomaton(_rename_automaton(s.ta, "'"),
                          _rename_fairness(s.fairness, s.ta, "'"))
    env_s = FairAutomaton(_rename_automaton(env.ta, "~s"),
                          _rename_fairness(env.fairness, env.ta, "~s"))
    # spec-side references to the shared environment now point at the copy
    lmap = {q: q + "~s" for q in env.ta.locations}
    cmap = {c: c + "~s" for c in env.ta.clocks}
    s = FairAutomaton(_retarget_refs(s.ta, lmap, cmap),
                      _retarget_fairness(s.fairness, lmap, cmap))
    pm = build_product(env.ta, m.ta, tag_a="env", tag_b="main")
    ps = build_product(env_s.ta, s.ta, tag_a="env", tag_b="main")
    fm = Fairness(
        lift_fairness_to_product(env.fairness, env.ta, m.ta, True).strong +
        lift_fairness_to_product(m.fairness, env.ta, m.ta, False).strong,
        lift_fairness_to_product(env.fairness, env.ta, m.ta, True).weak +
        lift_fairness_to_product(m.fairness, env.ta, m.ta, False).weak)
    fs = Fairness(
        lift_fairness_to_product(env_s.fairness, env_s.ta, s.ta, True).strong +
        lift_fairness_to_product(s.fairness, env_s.ta, s.ta, False).strong,
        lift_fairness_to_product(env_s.fairness, env_s.ta, s.ta, True).weak +
        lift_fairness_to_product(s.fairness, env_s.ta, s.ta, False).weak)
    return FairAutomaton(pm, fm), FairAutomaton(ps, fs)
