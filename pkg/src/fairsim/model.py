"""Timed automata with location propositions, synchronizing events and
generalized fairness assumptions.

Locations double as the atomic state propositions (one holds at a time).
Transitions carry at most one directed event ``!a`` / ``?a``; composed
automata carry tagged event pairs.  State predicates are boolean
combinations of location propositions and clock comparisons against
integer constants.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Union


# ---------------------------------------------------------------- predicates

class Pred:
    def __and__(self, other: "Pred") -> "Pred":
        return pand(self, other)

    def __or__(self, other: "Pred") -> "Pred":
        return por(self, other)

    def __invert__(self) -> "Pred":
        return Not(self)


@dataclass(frozen=True)
class Top(Pred):
    def __repr__(self):
        return "true"


@dataclass(frozen=True)
class Bottom(Pred):
    def __repr__(self):
        return "false"


TRUE = Top()
FALSE = Bottom()


@dataclass(frozen=True)
class Prop(Pred):
    """A location proposition."""
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class ClockCmp(Pred):
    clock: str
    op: str  # < <= == >= >
    const: int

    def __repr__(self):
        return f"{self.clock}{self.op}{self.const}"


@dataclass(frozen=True)
class Not(Pred):
    arg: Pred

    def __repr__(self):
        return f"!({self.arg})"


@dataclass(frozen=True)
class And(Pred):
    args: tuple[Pred, ...]

    def __repr__(self):
        return "(" + " & ".join(map(repr, self.args)) + ")"


@dataclass(frozen=True)
class Or(Pred):
    args: tuple[Pred, ...]

    def __repr__(self):
        return "(" + " | ".join(map(repr, self.args)) + ")"


def pand(*args: Pred) -> Pred:
    flat: list[Pred] = []
    for a in args:
        if isinstance(a, Top):
            continue
        if isinstance(a, Bottom):
            return FALSE
        if isinstance(a, And):
            flat.extend(a.args)
        else:
            flat.append(a)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def por(*args: Pred) -> Pred:
    flat: list[Pred] = []
    for a in args:
        if isinstance(a, Bottom):
            continue
        if isinstance(a, Top):
            return TRUE
        if isinstance(a, Or):
            flat.extend(a.args)
        else:
            flat.append(a)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def pred_clocks(p: Pred) -> set[str]:
    if isinstance(p, ClockCmp):
        return {p.clock}
    if isinstance(p, Not):
        return pred_clocks(p.arg)
    if isinstance(p, (And, Or)):
        out: set[str] = set()
        for a in p.args:
            out |= pred_clocks(a)
        return out
    return set()


def pred_props(p: Pred) -> set[str]:
    if isinstance(p, Prop):
        return {p.name}
    if isinstance(p, Not):
        return pred_props(p.arg)
    if isinstance(p, (And, Or)):
        out: set[str] = set()
        for a in p.args:
            out |= pred_props(a)
        return out
    return set()


def pred_constants(p: Pred) -> dict[str, int]:
    """Largest constant each clock is compared against."""
    out: dict[str, int] = {}
    if isinstance(p, ClockCmp):
        out[p.clock] = abs(p.const)
    elif isinstance(p, Not):
        out = pred_constants(p.arg)
    elif isinstance(p, (And, Or)):
        for a in p.args:
            for c, v in pred_constants(a).items():
                out[c] = max(out.get(c, 0), v)
    return out


def eval_pred(p: Pred, locs: set[str], clocks: Mapping[str, float]) -> bool:
    """Evaluate over concrete locations-held and clock values."""
    if isinstance(p, Top):
        return True
    if isinstance(p, Bottom):
        return False
    if isinstance(p, Prop):
        return p.name in locs
    if isinstance(p, ClockCmp):
        v, c = clocks[p.clock], p.const
        return {"<": v < c, "<=": v <= c, "==": v == c,
                ">=": v >= c, ">": v > c}[p.op]
    if isinstance(p, Not):
        return not eval_pred(p.arg, locs, clocks)
    if isinstance(p, And):
        return all(eval_pred(a, locs, clocks) for a in p.args)
    if isinstance(p, Or):
        return any(eval_pred(a, locs, clocks) for a in p.args)
    raise TypeError(p)


# -------------------------------------------------------------------- events

@dataclass(frozen=True, order=True)
class Event:
    """A directed, optionally role-tagged synchronization label."""
    name: str
    direction: str  # "!" or "?"
    tag: str = ""

    def co(self) -> "Event":
        return Event(self.name, "?" if self.direction == "!" else "!", self.tag)

    def __repr__(self):
        t = f"@{self.tag}" if self.tag else ""
        return f"{self.direction}{self.name}{t}"


# --------------------------------------------------------------------- model

@dataclass(frozen=True)
class Transition:
    source: str
    target: str
    events: frozenset[Event]  # empty = autonomous
    guard: Pred = TRUE
    resets: frozenset[str] = frozenset()

    def __repr__(self):
        ev = ",".join(map(repr, sorted(self.events))) or "-"
        rs = "{" + ",".join(sorted(self.resets)) + "}" if self.resets else ""
        return f"{self.source}--{ev}[{self.guard}]{rs}-->{self.target}"


@dataclass(frozen=True)
class TimedAutomaton:
    name: str
    locations: tuple[str, ...]
    clocks: tuple[str, ...]
    invariants: Mapping[str, Pred]  # per location
    initial: Pred
    transitions: tuple[Transition, ...]

    @property
    def alphabet(self) -> frozenset[str]:
        return frozenset(ev.name for t in self.transitions for ev in t.events)

    def invariant(self, loc: str) -> Pred:
        return self.invariants.get(loc, TRUE)

    def valid_pred(self) -> Pred:
        """Disjunction over locations of loc & its invariant."""
        return por(*(pand(Prop(q), self.invariant(q)) for q in self.locations))

    def max_constant(self) -> int:
        best = 0
        preds: list[Pred] = [self.initial, *self.invariants.values()]
        preds += [t.guard for t in self.transitions]
        for p in preds:
            for v in pred_constants(p).values():
                best = max(best, v)
        return best


def validate(ta: TimedAutomaton) -> list[str]:
    """Structural well-formedness diagnostics (empty list = OK)."""
    errs = []
    if len(set(ta.locations)) != len(ta.locations):
        errs.append(f"{ta.name}: duplicate locations")
    if len(set(ta.clocks)) != len(ta.clocks):
        errs.append(f"{ta.name}: duplicate clocks")
    locset, clkset = set(ta.locations), set(ta.clocks)
    for loc, inv in ta.invariants.items():
        if loc not in locset:
            errs.append(f"{ta.name}: invariant on unknown location {loc}")
        if pred_props(inv):
            errs.append(f"{ta.name}: invariant of {loc} mentions locations")
        if not pred_clocks(inv) <= clkset:
            errs.append(f"{ta.name}: invariant of {loc} uses foreign clocks")
    for t in ta.transitions:
        if t.source not in locset or t.target not in locset:
            errs.append(f"{ta.name}: transition {t} off the location set")
        if not pred_clocks(t.guard) <= clkset:
            errs.append(f"{ta.name}: guard of {t} uses foreign clocks")
        if not set(t.resets) <= clkset:
            errs.append(f"{ta.name}: resets of {t} use foreign clocks")
    if not pred_props(ta.initial) <= locset:
        errs.append(f"{ta.name}: initial condition mentions foreign locations")
    return errs


# ------------------------------------------------------------------ fairness

@dataclass(frozen=True)
class StatePred:
    pred: Pred


@dataclass(frozen=True)
class EventPred:
    pre: Pred
    event: str            # channel name
    direction: str = ""   # "", "!" or "?": "" matches either
    post: Pred = TRUE

    def matches(self, events: Iterable[Event]) -> bool:
        return any(e.name == self.event and
                   (not self.direction or e.direction == self.direction)
                   for e in events)


FairPred = Union[StatePred, EventPred]


@dataclass(frozen=True)
class Fairness:
    strong: tuple[FairPred, ...] = ()
    weak: tuple[FairPred, ...] = ()

    def __bool__(self):
        return bool(self.strong or self.weak)


@dataclass(frozen=True)
class FairAutomaton:
    ta: TimedAutomaton
    fairness: Fairness = Fairness()


# ------------------------------------------------------------------ products

def compatible_transitions(e: Transition | None,
                           b: TimedAutomaton) -> list[Transition | None]:
    """Responses of b to a step e of the other side; None is the null step."""
    if e is None:
        return [f for f in b.transitions if not f.events] + [None]
    if not e.events:
        return [None]
    return [f for f in b.transitions if f.events == e.events]


def _joint_loc(a: str, b: str) -> str:
    return f"{a}*{b}"


def build_product(a: TimedAutomaton, b: TimedAutomaton,
                  tag_a: str = "", tag_b: str = "",
                  keep_open: bool = False) -> TimedAutomaton:
    """Synchronized product over matching co-directed events.

    Matching events are relabeled with the given role tags so that two
    products over the same left factor expose equal event sets.  Unmatched
    evented transitions are dropped, unless ``keep_open`` is set, in which
    case they survive untagged for a later composition to close.
    """
    assert not (set(a.clocks) & set(b.clocks)), "factor clocks must be disjoint"
    assert not (set(a.locations) & set(b.locations)), \
        "factor locations must be disjoint"
    locs = tuple(_joint_loc(p, q) for p in a.locations for q in b.locations)
    invs = {_joint_loc(p, q): pand(a.invariant(p), b.invariant(q))
            for p in a.locations for q in b.locations}
    trans: list[Transition] = []

    def guard_lift(p: Pred) -> Pred:
        """Rewrite props of either factor over joint locations; props of
        other automata in the network pass through untouched."""
        if isinstance(p, Prop):
            if p.name in a.locations:
                return por(*(Prop(_joint_loc(p.name, q))
                             for q in b.locations))
            if p.name in b.locations:
                return por(*(Prop(_joint_loc(q, p.name))
                             for q in a.locations))
            return p
        if isinstance(p, Not):
            return Not(guard_lift(p.arg))
        if isinstance(p, And):
            return pand(*(guard_lift(x) for x in p.args))
        if isinstance(p, Or):
            return por(*(guard_lift(x) for x in p.args))
        return p

    def lift(t: Transition, other: TimedAutomaton,
             events: frozenset[Event], left: bool) -> None:
        for q in other.locations:
            src = _joint_loc(t.source, q) if left else _joint_loc(q, t.source)
            dst = _joint_loc(t.target, q) if left else _joint_loc(q, t.target)
            trans.append(Transition(src, dst, events, guard_lift(t.guard),
                                    t.resets))

    b_names = {ev.name for t in b.transitions for ev in t.events}
    a_names = {ev.name for t in a.transitions for ev in t.events}
    for t in a.transitions:
        if not t.events:
            lift(t, b, frozenset(), True)
        elif keep_open and not {ev.name for ev in t.events} & b_names:
            lift(t, b, t.events, True)
    for t in b.transitions:
        if not t.events:
            lift(t, a, frozenset(), False)
        elif keep_open and not {ev.name for ev in t.events} & a_names:
            lift(t, a, t.events, False)
    for ta_ in a.transitions:
        if not ta_.events:
            continue
        for tb in b.transitions:
            if not tb.events:
                continue
            pairs = {(ev.name, ev.direction) for ev in ta_.events}
            if {(ev.name, ev.direction) for ev in tb.events} != \
                    {(n, "?" if d == "!" else "!") for n, d in pairs}:
                continue
            events = frozenset(
                {Event(ev.name, ev.direction, tag_a) for ev in ta_.events} |
                {Event(ev.name, ev.direction, tag_b) for ev in tb.events})
            trans.append(Transition(
                _joint_loc(ta_.source, tb.source),
                _joint_loc(ta_.target, tb.target),
                events, guard_lift(pand(ta_.guard, tb.guard)),
                ta_.resets | tb.resets))

    init = pand(lift_pred_to_product(a.initial, a, b, True),
                lift_pred_to_product(b.initial, a, b, False))
    return TimedAutomaton(
        name=f"{a.name}*{b.name}", locations=locs,
        clocks=a.clocks + b.clocks, invariants=invs,
        initial=init, transitions=tuple(trans))


def lift_pred_to_product(p: Pred, a: TimedAutomaton, b: TimedAutomaton,
                         left: bool) -> Pred:
    """Rewrite a factor-level predicate over product locations."""
    if isinstance(p, Prop):
        if left:
            return por(*(Prop(_joint_loc(p.name, q)) for q in b.locations))
        return por(*(Prop(_joint_loc(q, p.name)) for q in a.locations))
    if isinstance(p, Not):
        return Not(lift_pred_to_product(p.arg, a, b, left))
    if isinstance(p, And):
        return pand(*(lift_pred_to_product(x, a, b, left) for x in p.args))
    if isinstance(p, Or):
        return por(*(lift_pred_to_product(x, a, b, left) for x in p.args))
    return p


def lift_fairness_to_product(f: Fairness, a: TimedAutomaton,
                             b: TimedAutomaton, left: bool) -> Fairness:
    def lift_one(fp: FairPred) -> FairPred:
        if isinstance(fp, StatePred):
            return StatePred(lift_pred_to_product(fp.pred, a, b, left))
        return EventPred(lift_pred_to_product(fp.pre, a, b, left),
                         fp.event, fp.direction,
                         lift_pred_to_product(fp.post, a, b, left))
    return Fairness(tuple(lift_one(x) for x in f.strong),
                    tuple(lift_one(x) for x in f.weak))
