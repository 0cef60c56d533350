"""Symbolic state sets over a joint discrete/clock scope.

A scope fixes one location group per participating automaton plus the
joint clock list (instance clocks followed by the auxiliary deadline and
cycle-measure clocks).  A symbolic set maps each *part* — a choice of one
location per group — to an inclusion-pruned list of zones; absent parts
are empty.  All boolean structure (complement included) stays within this
representation, so fixpoints can compare sets semantically.
"""
from __future__ import annotations

import itertools
from typing import Iterable, Mapping

from . import dbm
from .model import (And, Bottom, ClockCmp, Not, Or, Pred, Prop, Top)

Part = tuple[str, ...]


class Scope:
    def __init__(self, groups: tuple[tuple[str, ...], ...],
                 clocks: tuple[str, ...], ceilings: Mapping[str, int]):
        self.groups = groups
        self.clocks = clocks
        self.ceilings = tuple(ceilings.get(c, 0) for c in clocks)
        self.nclocks = len(clocks)
        self._cidx = {c: i + 1 for i, c in enumerate(clocks)}
        self._gidx: dict[str, tuple[int, str]] = {}
        for gi, grp in enumerate(groups):
            for loc in grp:
                assert loc not in self._gidx, f"duplicate location {loc}"
                self._gidx[loc] = (gi, loc)
        self.all_parts: tuple[Part, ...] = tuple(itertools.product(*groups))
        self._universe = dbm.universe(self.nclocks)

    def cidx(self, clock: str) -> int:
        return self._cidx[clock]

    def group_of(self, loc: str) -> int:
        return self._gidx[loc][0]

    def universe_zone(self) -> dbm.Zone:
        return self._universe


# ----------------------------------------------------------- zone list algebra

def prune(zs: Iterable[dbm.Zone]) -> tuple[dbm.Zone, ...]:
    out: list[dbm.Zone] = []
    for z in zs:
        if any(dbm.subsumes(o, z) for o in out):
            continue
        out = [o for o in out if not dbm.subsumes(z, o)]
        out.append(z)
    return tuple(out)


def meet_lists(a: Iterable[dbm.Zone], b: Iterable[dbm.Zone]) -> tuple[dbm.Zone, ...]:
    out = []
    for x in a:
        for y in b:
            z = dbm.intersect(x, y)
            if z is not None:
                out.append(z)
    return prune(out)


def subtract_lists(a: Iterable[dbm.Zone],
                   b: Iterable[dbm.Zone]) -> tuple[dbm.Zone, ...]:
    rest = list(a)
    for y in b:
        nxt: list[dbm.Zone] = []
        for x in rest:
            nxt.extend(dbm.subtract(x, y))
        rest = nxt
        if not rest:
            break
    return prune(rest)


def covers(a: Iterable[dbm.Zone], b: Iterable[dbm.Zone]) -> bool:
    al = list(a)
    return all(not subtract_lists([z], al) for z in b)


# ----------------------------------------------------------------- symbolic set

class SymbolicSet:
    __slots__ = ("scope", "parts")

    def __init__(self, scope: Scope, parts: dict[Part, tuple[dbm.Zone, ...]]):
        self.scope = scope
        self.parts = {p: zs for p, zs in parts.items() if zs}

    # -- constructors -------------------------------------------------------
    @staticmethod
    def empty(scope: Scope) -> "SymbolicSet":
        return SymbolicSet(scope, {})

    @staticmethod
    def full(scope: Scope) -> "SymbolicSet":
        u = (scope.universe_zone(),)
        return SymbolicSet(scope, {p: u for p in scope.all_parts})

    # -- queries -------------------------------------------------------------
    def is_empty(self) -> bool:
        return not self.parts

    def includes(self, other: "SymbolicSet") -> bool:
        for p, zs in other.parts.items():
            if not covers(self.parts.get(p, ()), zs):
                return False
        return True

    def same_as(self, other: "SymbolicSet") -> bool:
        return self.includes(other) and other.includes(self)

    # -- algebra --------------------------------------------------------------
    def meet(self, other: "SymbolicSet") -> "SymbolicSet":
        out = {}
        small, big = (self, other) if len(self.parts) <= len(other.parts) \
            else (other, self)
        for p, zs in small.parts.items():
            o = big.parts.get(p)
            if o:
                m = meet_lists(zs, o)
                if m:
                    out[p] = m
        return SymbolicSet(self.scope, out)

    def join(self, other: "SymbolicSet") -> "SymbolicSet":
        out = dict(self.parts)
        for p, zs in other.parts.items():
            cur = out.get(p)
            out[p] = prune((*cur, *zs)) if cur else zs
        return SymbolicSet(self.scope, out)

    def complement(self) -> "SymbolicSet":
        u = self.scope.universe_zone()
        out = {}
        for p in self.scope.all_parts:
            zs = self.parts.get(p)
            if not zs:
                out[p] = (u,)
            else:
                rest = subtract_lists([u], zs)
                if rest:
                    out[p] = rest
        return SymbolicSet(self.scope, out)

    def minus(self, other: "SymbolicSet") -> "SymbolicSet":
        out = {}
        for p, zs in self.parts.items():
            o = other.parts.get(p)
            r = subtract_lists(zs, o) if o else zs
            if r:
                out[p] = r
        return SymbolicSet(self.scope, out)

    # -- clock/location transforms --------------------------------------------
    def map_zones(self, fn) -> "SymbolicSet":
        out = {}
        for p, zs in self.parts.items():
            nz = []
            for z in zs:
                r = fn(z)
                if r is not None:
                    nz.append(r)
            if nz:
                out[p] = prune(nz)
        return SymbolicSet(self.scope, out)

    def constrain(self, cons: list[tuple[int, int, int]]) -> "SymbolicSet":
        return self.map_zones(lambda z: dbm.constrain(z, cons))

    def free_clocks(self, clocks: list[str]) -> "SymbolicSet":
        idx = [self.scope.cidx(c) for c in clocks]
        if not idx:
            return self
        return self.map_zones(lambda z: dbm.free(z, idx))

    def zero_clocks(self, clocks: list[str]) -> "SymbolicSet":
        idx = [self.scope.cidx(c) for c in clocks]
        if not idx:
            return self
        return self.map_zones(lambda z: dbm.assign_zero(z, idx))

    def unreset_clocks(self, clocks: list[str]) -> "SymbolicSet":
        """Relational pre of a reset: keep only points with the clocks at 0,
        then forget their values."""
        idx = [self.scope.cidx(c) for c in clocks]
        if not idx:
            return self
        cons = [(i, 0, dbm.LE_ZERO) for i in idx]
        return self.map_zones(
            lambda z: None if (w := dbm.constrain(z, cons)) is None
            else dbm.free(w, idx))

    def relabel(self, gidx: int, from_loc: str, to_loc: str) -> "SymbolicSet":
        """Move the zones of parts at from_loc in group gidx to to_loc."""
        out: dict[Part, tuple[dbm.Zone, ...]] = {}
        for p, zs in self.parts.items():
            if p[gidx] != from_loc:
                continue
            q = p[:gidx] + (to_loc,) + p[gidx + 1:]
            cur = out.get(q)
            out[q] = prune((*cur, *zs)) if cur else zs
        return SymbolicSet(self.scope, out)

    def restrict_loc(self, gidx: int, loc: str) -> "SymbolicSet":
        return SymbolicSet(self.scope, {p: zs for p, zs in self.parts.items()
                                        if p[gidx] == loc})

    def quantify(self, gidxs: list[int], clocks: list[str],
                 reset: bool = False) -> "SymbolicSet":
        """Existentially quantify whole groups and clocks, keeping scope:
        quantified group coordinates are re-expanded over every location,
        quantified clocks become unconstrained (or pinned to 0 first when
        ``reset`` is set, then re-pinned to 0 in the result)."""
        cset = set(gidxs)
        idx = [self.scope.cidx(c) for c in clocks]
        merged: dict[Part, list[dbm.Zone]] = {}
        for p, zs in self.parts.items():
            key = tuple("" if i in cset else loc for i, loc in enumerate(p))
            acc = merged.setdefault(key, [])
            for z in zs:
                if idx:
                    z = dbm.assign_zero(z, idx) if reset else dbm.free(z, idx)
                acc.append(z)
        out: dict[Part, tuple[dbm.Zone, ...]] = {}
        for key, zs in merged.items():
            zs = prune(zs)
            choices = [(g if key[i] == "" else (key[i],))
                       for i, g in enumerate(self.scope.groups)]
            for p in itertools.product(*choices):
                cur = out.get(p)
                out[p] = prune((*cur, *zs)) if cur else zs
        return SymbolicSet(self.scope, out)

    def extrapolate(self) -> "SymbolicSet":
        ceil = list(self.scope.ceilings)
        return self.map_zones(lambda z: dbm.extrapolate(z, ceil))

    # -- time ------------------------------------------------------------------
    def elapse_pre(self, goal: "SymbolicSet") -> "SymbolicSet":
        """States that reach ``goal`` by letting time pass while staying in
        ``self`` throughout (closure-bridged across adjacent path zones)."""
        out: dict[Part, tuple[dbm.Zone, ...]] = {}
        for p, pzs in self.parts.items():
            gzs = goal.parts.get(p)
            if not gzs:
                continue
            closures = [dbm.nonstrict_closure(z) for z in pzs]
            frontier: list[dbm.Zone] = list(gzs)
            pieces: list[dbm.Zone] = []
            while frontier:
                nxt: list[dbm.Zone] = []
                for r in frontier:
                    for pz, cp in zip(pzs, closures):
                        t = dbm.intersect(r, cp)
                        if t is None:
                            continue
                        t = dbm.intersect(dbm.down(t), pz)
                        if t is None:
                            continue
                        if any(dbm.subsumes(o, t) for o in pieces):
                            continue
                        pieces = [o for o in pieces if not dbm.subsumes(t, o)]
                        pieces.append(t)
                        nxt.append(t)
                frontier = nxt
            if pieces:
                out[p] = prune(pieces)
        return SymbolicSet(self.scope, out)

    # -- debugging ----------------------------------------------------------
    def dump(self) -> str:
        lines = []
        for p in sorted(self.parts):
            zs = self.parts[p]
            body = " | ".join(z.constraint_str(list(self.scope.clocks))
                              for z in zs)
            lines.append(f"{' '.join(p)} :: {body}")
        return "\n".join(lines)

    def __repr__(self):
        n = sum(len(zs) for zs in self.parts.values())
        return f"SymbolicSet({len(self.parts)} parts, {n} zones)"


# ------------------------------------------------------------- predicate compile

def compile_pred(scope: Scope, pred: Pred,
                 cache: dict | None = None) -> SymbolicSet:
    if cache is not None and pred in cache:
        return cache[pred]
    res = _compile(scope, pred, cache)
    if cache is not None:
        cache[pred] = res
    return res


def _compile(scope: Scope, pred: Pred, cache) -> SymbolicSet:
    if isinstance(pred, Top):
        return SymbolicSet.full(scope)
    if isinstance(pred, Bottom):
        return SymbolicSet.empty(scope)
    if isinstance(pred, Prop):
        gi = scope.group_of(pred.name)
        u = (scope.universe_zone(),)
        return SymbolicSet(scope, {p: u for p in scope.all_parts
                                   if p[gi] == pred.name})
    if isinstance(pred, ClockCmp):
        i = scope.cidx(pred.clock)
        c = pred.const
        cons = {"<": [(i, 0, dbm.bound(c, True))],
                "<=": [(i, 0, dbm.bound(c, False))],
                ">": [(0, i, dbm.bound(-c, True))],
                ">=": [(0, i, dbm.bound(-c, False))],
                "==": [(i, 0, dbm.bound(c, False)),
                       (0, i, dbm.bound(-c, False))]}[pred.op]
        z = dbm.constrain(scope.universe_zone(), cons)
        if z is None:
            return SymbolicSet.empty(scope)
        return SymbolicSet(scope, {p: (z,) for p in scope.all_parts})
    if isinstance(pred, Not):
        return compile_pred(scope, pred.arg, cache).complement()
    if isinstance(pred, And):
        res = SymbolicSet.full(scope)
        for a in pred.args:
            res = res.meet(compile_pred(scope, a, cache))
            if res.is_empty():
                break
        return res
    if isinstance(pred, Or):
        res = SymbolicSet.empty(scope)
        for a in pred.args:
            res = res.join(compile_pred(scope, a, cache))
        return res
    raise TypeError(pred)
