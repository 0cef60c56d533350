"""Region-graph reference checker for desk-scale cross-validation.

Clock regions are encoded per clock as (integer part, fractional rank):
rank 0 means fraction zero, positive ranks order the distinct nonzero
fractions, rank -1 marks clocks beyond the ceiling.  On top of the
region graph this module offers

* ``fair_run_exists`` — is there an infinite, time-divergent run
  satisfying a set of strong/weak state- and event-fairness assumptions
  (SCC search; time divergence is witnessed by an auxiliary tick clock
  that must be resettable inside the cycle);
* ``plain_simulates`` — game-theoretic timed simulation with
  specification stuttering and run-extendability of the model side.

Everything here is enumerative and intended for small instances only.
"""
from __future__ import annotations

import itertools
from functools import lru_cache

from .model import (ClockCmp, EventPred, FairAutomaton, Fairness, Pred,
                    StatePred, TimedAutomaton, Transition, And, Or, Not,
                    Prop, Top, Bottom)

Region = tuple[tuple[int, int], ...]  # per clock: (int part, rank)

TICK = "_tick"


def zero_region(n: int) -> Region:
    return tuple((0, 0) for _ in range(n))


def _normalize(parts: list[tuple[int, int]]) -> Region:
    ranks = sorted({r for _, r in parts if r > 0})
    remap = {r: i + 1 for i, r in enumerate(ranks)}
    return tuple((v, remap.get(r, r) if r > 0 else r) for v, r in parts)


def all_regions(n: int, ceil: int) -> list[Region]:
    """Every clock region over n clocks with the given ceiling."""
    out = set()
    per_clock = [(v, 0) for v in range(ceil + 1)] + \
                [(v, 1) for v in range(ceil + 1)] + [(ceil + 1, -1)]
    for combo in itertools.product(per_clock, repeat=n):
        actives = [i for i, (v, r) in enumerate(combo) if r > 0]
        if not actives:
            out.add(_normalize(list(combo)))
            continue
        for ranks in itertools.product(range(1, len(actives) + 1),
                                       repeat=len(actives)):
            parts = list(combo)
            for i, r in zip(actives, ranks):
                parts[i] = (parts[i][0], r)
            out.add(_normalize(parts))
    return sorted(out)


def successor(reg: Region, ceil: int) -> Region:
    """Immediate time successor."""
    parts = list(reg)
    zero = [i for i, (v, r) in enumerate(parts) if r == 0]
    if zero:
        # zero-fraction clocks acquire the smallest positive fraction
        for i, (v, r) in enumerate(parts):
            if r > 0:
                parts[i] = (v, r + 1)
        for i in zero:
            v = parts[i][0]
            parts[i] = (v + 1, -1) if v >= ceil else (v, 1)
        return _normalize(parts)
    pos = [r for _, r in parts if r > 0]
    if not pos:
        return reg  # every clock beyond the ceiling
    top = max(pos)
    for i, (v, r) in enumerate(parts):
        if r == top:
            parts[i] = (v + 1, 0) if v + 1 <= ceil else (v + 1, -1)
    return _normalize(parts)


def reset(reg: Region, idxs: list[int]) -> Region:
    parts = list(reg)
    for i in idxs:
        parts[i] = (0, 0)
    return _normalize(parts)


def project(reg: Region, idxs: list[int]) -> Region:
    return _normalize([reg[i] for i in idxs])


def clock_sat(reg: Region, i: int, op: str, c: int) -> bool:
    v, r = reg[i]
    if r == -1:
        return op in (">", ">=")
    if op == "<":
        return v < c
    if op == "<=":
        return v < c or (v == c and r == 0)
    if op == ">":
        return v > c or (v == c and r != 0)
    if op == ">=":
        return v >= c
    if op == "==":
        return v == c and r == 0
    raise ValueError(op)


def region_sat(pred: Pred, locs: set[str], reg: Region,
               cidx: dict[str, int]) -> bool:
    if isinstance(pred, Top):
        return True
    if isinstance(pred, Bottom):
        return False
    if isinstance(pred, Prop):
        return pred.name in locs
    if isinstance(pred, ClockCmp):
        return clock_sat(reg, cidx[pred.clock], pred.op, pred.const)
    if isinstance(pred, Not):
        return not region_sat(pred.arg, locs, reg, cidx)
    if isinstance(pred, And):
        return all(region_sat(a, locs, reg, cidx) for a in pred.args)
    if isinstance(pred, Or):
        return any(region_sat(a, locs, reg, cidx) for a in pred.args)
    raise TypeError(pred)


# --------------------------------------------------------- single automaton

class RegionGraph:
    """Region graph of one automaton extended with the tick clock (used to
    witness time divergence: its reset self-loop fires at most once per
    time unit)."""

    def __init__(self, ta: TimedAutomaton, ceil: int,
                 seed_all: bool = False):
        self.ta = ta
        self.seed_all = seed_all
        self.ceil = max(ceil, 1)
        self.clocks = list(ta.clocks) + [TICK]
        self.cidx = {c: i for i, c in enumerate(self.clocks)}
        self.nodes: list[tuple[str, Region]] = []
        self.index: dict[tuple[str, Region], int] = {}
        self.edges: list[list[tuple[int, Transition | None]]] = []
        # edge transition None = delay step; tick self-loops carry a
        # synthetic transition with resets == (TICK,)
        self._tick_loop = Transition("", "", frozenset(),
                                     ClockCmp(TICK, ">=", 1),
                                     frozenset({TICK}))
        self._build()

    def _valid(self, loc: str, reg: Region) -> bool:
        return region_sat(self.ta.invariant(loc), {loc}, reg, self.cidx)

    def _node(self, loc: str, reg: Region) -> int:
        key = (loc, reg)
        if key not in self.index:
            self.index[key] = len(self.nodes)
            self.nodes.append(key)
            self.edges.append([])
        return self.index[key]

    def _build(self) -> None:
        frontier = []
        if self.seed_all:
            seeds: list[Region] = all_regions(len(self.clocks), self.ceil)
        else:
            seeds = [zero_region(len(self.clocks))]
        for loc in self.ta.locations:
            for reg in seeds:
                if self._valid(loc, reg):
                    frontier.append(self._node(loc, reg))
        seen = set(frontier)
        while frontier:
            i = frontier.pop()
            loc, reg = self.nodes[i]
            succs: list[tuple[str, Region, Transition | None]] = []
            nreg = successor(reg, self.ceil)
            if nreg != reg and self._valid(loc, nreg):
                succs.append((loc, nreg, None))
            elif nreg == reg:
                succs.append((loc, reg, None))  # unbounded region: time flows
            for t in list(self.ta.transitions) + [self._tick_loop]:
                src = loc if t.source == "" else t.source
                if src != loc:
                    continue
                if not region_sat(t.guard, {loc}, reg, self.cidx):
                    continue
                dst = loc if t.target == "" else t.target
                rreg = reset(reg, [self.cidx[c] for c in t.resets])
                if not self._valid(dst, rreg):
                    continue
                succs.append((dst, rreg, t))
            for dst, rreg, t in succs:
                j = self._node(dst, rreg)
                self.edges[i].append((j, t))
                if j not in seen:
                    seen.add(j)
                    frontier.append(j)

    def initial_nodes(self) -> list[int]:
        out = []
        reg = zero_region(len(self.clocks))
        for loc in self.ta.locations:
            if not self._valid(loc, reg):
                continue
            if region_sat(self.ta.initial, {loc}, reg, self.cidx):
                out.append(self.index[(loc, reg)])
        return out

    # -- fairness -----------------------------------------------------------
    def _sat_node(self, i: int, p: Pred) -> bool:
        loc, reg = self.nodes[i]
        return region_sat(p, {loc}, reg, self.cidx)

    def _edge_matches(self, t: Transition | None, fp: EventPred) -> bool:
        return t is not None and fp.matches(t.events)

    def fair_sccs(self, fairness: Fairness) -> set[int]:
        """Nodes lying on a fair, time-divergent cycle."""
        weak_states = [fp.pred for fp in fairness.weak
                       if isinstance(fp, StatePred)]
        weak_events = [fp for fp in fairness.weak
                       if isinstance(fp, EventPred)]

        def node_ok(i: int) -> bool:
            return all(self._sat_node(i, p) for p in weak_states)

        def edge_ok(i: int, j: int, t: Transition | None) -> bool:
            for fp in weak_events:
                if self._edge_matches(t, fp) and self._sat_node(i, fp.pre) \
                        and not self._sat_node(j, fp.post):
                    return False
            return True

        allowed = [i for i in range(len(self.nodes)) if node_ok(i)]
        allowed_set = set(allowed)
        comp = _tarjan(allowed, lambda i: [j for j, t in self.edges[i]
                                          if j in allowed_set
                                          and edge_ok(i, j, t)])
        good: set[int] = set()
        for scc in comp:
            members = set(scc)
            has_tick = False
            strong_left = list(fairness.strong)
            for i in scc:
                for j, t in self.edges[i]:
                    if j not in members or not edge_ok(i, j, t):
                        continue
                    if t is not None and TICK in t.resets:
                        has_tick = True
                    strong_left = [
                        fp for fp in strong_left
                        if not (isinstance(fp, EventPred)
                                and self._edge_matches(t, fp)
                                and self._sat_node(i, fp.pre)
                                and self._sat_node(j, fp.post))]
                strong_left = [fp for fp in strong_left
                               if not (isinstance(fp, StatePred)
                                       and self._sat_node(i, fp.pred))]
            if has_tick and not strong_left:
                good |= members
        return good

    def fair_backward(self, fairness: Fairness) -> set[int]:
        """Nodes from which a fair, time-divergent run exists."""
        good = self.fair_sccs(fairness)
        rev: list[list[int]] = [[] for _ in self.nodes]
        for i, outs in enumerate(self.edges):
            for j, _ in outs:
                rev[j].append(i)
        seen = set(good)
        stack = list(good)
        while stack:
            i = stack.pop()
            for j in rev[i]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return seen


def _tarjan(nodes, succs):
    """Iterative Tarjan; returns SCCs with at least one internal edge
    (including self-loops)."""
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on: set[int] = set()
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = itertools.count()
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succs(root)))]
        index[root] = low[root] = next(counter)
        stack.append(root)
        on.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = next(counter)
                    stack.append(w)
                    on.add(w)
                    work.append((w, iter(succs(w))))
                    advanced = True
                    break
                if w in on:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                pv = work[-1][0]
                low[pv] = min(low[pv], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                members = set(comp)
                if len(comp) > 1 or any(w in members for w in succs(v)):
                    comps.append(comp)
    return comps


def fair_run_exists(fa: FairAutomaton, ceil: int | None = None) -> bool:
    """Does some initial state admit a fair, time-divergent run?"""
    if ceil is None:
        ceil = max(1, fa.ta.max_constant())
    g = RegionGraph(fa.ta, ceil)
    back = g.fair_backward(fa.fairness)
    return any(i in back for i in g.initial_nodes())


def fair_states(fa: FairAutomaton,
                ceil: int | None = None) -> set[tuple[str, Region]]:
    """All (location, region-with-tick-0) admitting a fair divergent run."""
    if ceil is None:
        ceil = max(1, fa.ta.max_constant())
    g = RegionGraph(fa.ta, ceil)
    back = g.fair_backward(fa.fairness)
    return {g.nodes[i] for i in back}


# ----------------------------------------------------------- simulation game

class SimulationGame:
    """Plain (fairness-free) timed simulation on the joint region graph.

    The specification may interleave autonomous steps at any instant and
    must survive every delay and transition the model can take along an
    actual (infinite, divergent) model run.
    """

    def __init__(self, m: TimedAutomaton, s: TimedAutomaton):
        self.m, self.s = m, s
        self.clocks = list(m.clocks) + list(s.clocks)
        self.cidx = {c: i for i, c in enumerate(self.clocks)}
        self.midx = [self.cidx[c] for c in m.clocks]
        self.ceil = max(1, m.max_constant(), s.max_constant())
        mg = RegionGraph(m, self.ceil, seed_all=True)
        back = mg.fair_backward(Fairness())
        self._m_ok = {mg.nodes[i] for i in back}
        self._regions = all_regions(len(self.clocks), self.ceil)
        self._by_proj: dict[Region, list[Region]] = {}
        for reg in self._regions:
            self._by_proj.setdefault(project(reg, self.midx), []).append(reg)
        self._dists: dict[tuple[str, Region], dict[Region, int]] = {}
        self._moves: dict[tuple[str, Region], list[Transition | None]] = {}

    # model-side run extendability
    def model_runs(self, qm: str, reg: Region) -> bool:
        sub = project(reg, self.midx)
        key = (qm, _normalize(list(sub) + [(0, 0)]))
        return key in self._m_ok

    def _sat(self, p: Pred, locs: set[str], reg: Region) -> bool:
        return region_sat(p, locs, reg, self.cidx)

    def _stutter(self, qm: str, qs: str, reg: Region) -> list[tuple[str, Region]]:
        """Spec positions reachable by instantaneous autonomous spec steps."""
        out = [(qs, reg)]
        seen = {(qs, reg)}
        k = 0
        while k < len(out):
            cs, creg = out[k]
            k += 1
            if not self._sat(self.s.invariant(cs), {cs}, creg):
                continue  # a dead spec position cannot move
            for t in self.s.transitions:
                if t.events or t.source != cs:
                    continue
                if not self._sat(t.guard, {cs}, creg):
                    continue
                nreg = reset(creg, [self.cidx[c] for c in t.resets])
                if not self._sat(self.s.invariant(t.target),
                                 {t.target}, nreg):
                    continue
                if (t.target, nreg) not in seen:
                    seen.add((t.target, nreg))
                    out.append((t.target, nreg))
        return out

    def simulates(self) -> bool:
        safe = self._safe_set()
        zero = zero_region(len(self.clocks))
        for qm in self.m.locations:
            if not self._sat(self.m.initial, {qm}, zero):
                continue
            if not self._sat(self.m.invariant(qm), {qm}, zero):
                continue
            if not self.model_runs(qm, zero):
                continue  # no actual run from here, nothing to match
            ok = False
            for qs in self.s.locations:
                if not self._sat(self.s.initial, {qs}, zero):
                    continue
                if not self._sat(self.s.invariant(qs), {qs}, zero):
                    continue
                if (qm, qs, zero) in safe:
                    ok = True
                    break
            if not ok:
                return False
        return True

    def _model_chain(self, qm: str, reg: Region) -> list[Region]:
        """Model-projection regions reachable by pure delay with the model
        invariant holding throughout."""
        proj = project(reg, self.midx)
        chain = [proj]
        pc = {c: i for i, c in enumerate(self.m.clocks)}
        while True:
            nxt = successor(proj, self.ceil)
            if nxt == proj:
                break
            if not region_sat(self.m.invariant(qm), {qm}, nxt, pc):
                break
            proj = nxt
            chain.append(proj)
        return chain

    def _runs_proj(self, qm: str, proj: Region) -> bool:
        return (qm, _normalize(list(proj) + [(0, 0)])) in self._m_ok

    def _valid_s(self, qs: str, reg: Region) -> bool:
        return self._sat(self.s.invariant(qs), {qs}, reg)

    def _safe_set(self) -> set[tuple[str, str, Region]]:
        safe = {(qm, qs, reg)
                for qm in self.m.locations for qs in self.s.locations
                for reg in self._regions if self._valid_s(qs, reg)}
        while True:
            cache: dict = {}
            drop = set()
            for p in safe:
                if not self._position_ok(p, safe, cache):
                    drop.add(p)
            if not drop:
                break
            safe -= drop
        return safe

    def _position_ok(self, p, safe, cache) -> bool:
        """A model move commits to a transition (or to doing nothing) fired
        after delaying into a chosen region of the model's own delay chain;
        the specification weaves finitely many stutter steps into the delay
        and answers at the firing instant."""
        qm, qs, reg = p
        if not self._sat(self.m.invariant(qm), {qm}, reg):
            return True  # no model run passes through: nothing to match
        chain = self._model_chain(qm, reg)
        for k, stop in enumerate(chain):
            for t in self._stop_moves(qm, stop):
                layers = self._survivors(qm, t, stop, k, safe, cache)
                if (qs, reg) not in layers[k]:
                    return False
        return True

    def _stop_moves(self, qm: str, stop: Region) -> list[Transition | None]:
        key = (qm, stop)
        if key in self._moves:
            return self._moves[key]
        pc = {c: i for i, c in enumerate(self.m.clocks)}
        moves: list[Transition | None] = []
        if self._runs_proj(qm, stop):
            moves.append(None)
        for t in self.m.transitions:
            if t.source != qm:
                continue
            if not region_sat(t.guard, {qm}, stop, pc):
                continue
            land = reset(stop, [pc[c] for c in t.resets if c in pc])
            if not region_sat(self.m.invariant(t.target), {t.target},
                              land, pc):
                continue
            if self._runs_proj(t.target, land):
                moves.append(t)
        self._moves[key] = moves
        return moves

    def _model_dist(self, qm: str, stop: Region) -> dict[Region, int]:
        """Delay distance (in model-region steps, invariant held throughout)
        from each model region to the stop region."""
        key = (qm, stop)
        if key in self._dists:
            return self._dists[key]
        pc = {c: i for i, c in enumerate(self.m.clocks)}
        dist: dict[Region, int] = {}
        for start in self._by_proj:
            if start in dist:
                continue
            path = [start]
            cur = start
            while cur != stop:
                nxt = successor(cur, self.ceil)
                if nxt == cur or nxt in path:
                    path = None
                    break
                if not region_sat(self.m.invariant(qm), {qm}, nxt, pc):
                    path = None
                    break
                path.append(nxt)
                cur = nxt
            if path is None:
                continue
            for d, r in enumerate(reversed(path)):
                dist[r] = d
        self._dists[key] = dist
        return dist

    def _survivors(self, qm, t, stop, k, safe, cache) -> list[set]:
        """Layer d holds the spec states (location, joint region), at model
        delay distance d from the stop region, from which the spec survives
        the committed move; layer 0 is a greatest fixpoint (the model must
        fire eventually inside the stop region), outer layers are least
        fixpoints (the committed delay forbids stalling forever)."""
        key = (qm, t, stop)
        layers = cache.get(key)
        if layers is None:
            layers = [self._stop_layer(qm, t, stop, safe)]
            cache[key] = layers
        dist = self._model_dist(qm, stop)
        while len(layers) <= k:
            d = len(layers)
            cand = [(qs, reg) for qs in self.s.locations
                    for proj, regs in self._by_proj.items()
                    if dist.get(proj) == d
                    for reg in regs if self._valid_s(qs, reg)]
            cur: set = set()
            changed = True
            while changed:
                changed = False
                for s in cand:
                    if s in cur:
                        continue
                    for cs, creg in self._stutter(qm, s[0], s[1]):
                        if not self._valid_s(cs, creg):
                            continue
                        nreg = successor(creg, self.ceil)
                        nd = dist.get(project(nreg, self.midx))
                        tgt = layers[d - 1] if nd == d - 1 else \
                            cur if nd == d else None
                        if tgt is not None and (cs, nreg) in tgt:
                            cur.add(s)
                            changed = True
                            break
            layers.append(cur)
        return layers

    def _stop_layer(self, qm, t, stop, safe) -> set:
        """The spec picks a stutter position P ready to answer the fire; if
        time can still advance inside the stop region from P, the model may
        wait, so the joint successor of P must survive too."""
        cur = {(qs, reg) for qs in self.s.locations
               for reg in self._by_proj.get(stop, [])
               if self._valid_s(qs, reg)}
        while True:
            drop = set()
            for s in cur:
                ok = False
                for cs, creg in self._stutter(qm, s[0], s[1]):
                    if not self._valid_s(cs, creg):
                        continue
                    if not self._answer(t, qm, cs, creg, safe):
                        continue
                    nreg = successor(creg, self.ceil)
                    if project(nreg, self.midx) != stop \
                            or (cs, nreg) in cur:
                        ok = True
                        break
                if not ok:
                    drop.add(s)
            if not drop:
                break
            cur -= drop
        return cur

    def _answer(self, t: Transition | None, qm: str, qs: str, reg: Region,
                safe) -> bool:
        if t is None:
            return any((qm, cs, creg) in safe
                       for cs, creg in self._stutter(qm, qs, reg))
        return self._answerable(t, qm, qs, reg, safe)

    def _answerable(self, t: Transition, qm: str, qs: str, reg: Region,
                    safe) -> bool:
        for cs, creg in self._stutter(qm, qs, reg):
            if not t.events:
                land = reset(creg, [self.cidx[c] for c in t.resets])
                if (t.target, cs, land) in safe:
                    return True
                continue
            if not self._sat(self.s.invariant(cs), {cs}, creg):
                continue
            for u in self.s.transitions:
                if u.events != t.events or u.source != cs:
                    continue
                if not self._sat(u.guard, {cs}, creg):
                    continue
                land = reset(creg, [self.cidx[c]
                                    for c in t.resets | u.resets])
                if not self._sat(self.s.invariant(u.target),
                                 {u.target}, land):
                    continue
                if (t.target, u.target, land) in safe:
                    return True
        return False


def plain_simulates(m: TimedAutomaton, s: TimedAutomaton) -> bool:
    if set(m.locations) & set(s.locations) or set(m.clocks) & set(s.clocks):
        from .arena import _rename_automaton
        s = _rename_automaton(s, "'")
    return SimulationGame(m, s).simulates()
