"""Difference-bound matrices over a fixed clock set.

A zone over clocks x_1..x_n is a conjunction of constraints
``x_i - x_j < c`` / ``x_i - x_j <= c`` with ``x_0 = 0`` as reference.
Bounds are encoded as integers ``2*c | flag`` (flag 1 for <=, 0 for <)
so that tighter-than is plain integer comparison and bound addition is
cheap.  Matrices are stored as flat tuples, row-major, and are
canonicalized with shortest-path closure; emptiness shows up as a
negative diagonal entry.
"""
from __future__ import annotations

INF = 1 << 60


def bound(c: int, strict: bool) -> int:
    return c * 2 + (0 if strict else 1)

LE_ZERO = bound(0, False)
LT_ZERO = bound(0, True)


def bound_add(a: int, b: int) -> int:
    if a >= INF or b >= INF:
        return INF
    return ((a >> 1) + (b >> 1)) * 2 + ((a & 1) & (b & 1))


def bound_neg(a: int) -> int:
    """Negation of a constraint: not(d < c) is -d <= -c, not(d <= c) is -d < -c."""
    c, nonstrict = a >> 1, a & 1
    return (-c) * 2 + (0 if nonstrict else 1)


def bound_str(a: int) -> str:
    if a >= INF:
        return "inf"
    return ("<=" if a & 1 else "<") + str(a >> 1)


class Zone:
    """Canonical, non-empty DBM over ``dim`` clocks plus the reference."""

    __slots__ = ("n", "m", "_hash")

    def __init__(self, n: int, m: tuple[int, ...]):
        self.n = n
        self.m = m
        self._hash = hash(m)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return isinstance(other, Zone) and self.m == other.m

    def __repr__(self):
        return f"Zone({self.constraint_str()})"

    def at(self, i: int, j: int) -> int:
        return self.m[i * (self.n + 1) + j]

    def constraint_str(self, names: list[str] | None = None) -> str:
        d = self.n + 1
        nm = ["0"] + (names if names else [f"x{i}" for i in range(1, d)])
        parts = []
        for i in range(d):
            for j in range(d):
                if i == j:
                    continue
                b = self.at(i, j)
                if b < INF and not (i == 0 and b == LE_ZERO):
                    parts.append(f"{nm[i]}-{nm[j]}{bound_str(b)}")
        return " & ".join(parts) if parts else "true"


def _close(m: list[int], d: int) -> bool:
    """Floyd-Warshall closure in place; returns False if empty."""
    for k in range(d):
        kd = k * d
        for i in range(d):
            ik = m[i * d + k]
            if ik >= INF:
                continue
            idx = i * d
            for j in range(d):
                kj = m[kd + j]
                if kj >= INF:
                    continue
                s = ((ik >> 1) + (kj >> 1)) * 2 + ((ik & 1) & (kj & 1))
                if s < m[idx + j]:
                    m[idx + j] = s
    for i in range(d):
        if m[i * d + i] < LE_ZERO:
            return False
        m[i * d + i] = LE_ZERO
    return True


def make_zone(n: int, rows: list[int]) -> Zone | None:
    """Canonicalize a raw bound list; None if inconsistent."""
    d = n + 1
    m = list(rows)
    # clocks are non-negative: -x_i <= 0
    for i in range(1, d):
        if m[i] > LE_ZERO:
            m[i] = LE_ZERO
    if not _close(m, d):
        return None
    return Zone(n, tuple(m))


def universe(n: int) -> Zone:
    d = n + 1
    m = [INF] * (d * d)
    for i in range(d):
        m[i * d + i] = LE_ZERO
        m[i] = LE_ZERO  # row 0: -x_i <= 0
    m[0] = LE_ZERO
    return Zone(n, tuple(m))


def intersect(a: Zone, b: Zone) -> Zone | None:
    m = [x if x < y else y for x, y in zip(a.m, b.m)]
    d = a.n + 1
    if not _close(m, d):
        return None
    return Zone(a.n, tuple(m))


def constrain(z: Zone, cons: list[tuple[int, int, int]]) -> Zone | None:
    """Intersect with constraints (i, j, bnd) meaning x_i - x_j `bnd`."""
    d = z.n + 1
    m = list(z.m)
    for i, j, b in cons:
        if b < m[i * d + j]:
            m[i * d + j] = b
    if not _close(m, d):
        return None
    return Zone(z.n, tuple(m))


def subsumes(a: Zone, b: Zone) -> bool:
    """a contains b (both canonical)."""
    return all(x >= y for x, y in zip(a.m, b.m))


def free(z: Zone, clocks: list[int]) -> Zone:
    """Existentially remove the named clocks (result unconstrained on them)."""
    d = z.n + 1
    m = list(z.m)
    for c in clocks:
        for i in range(d):
            m[i * d + c] = INF
            m[c * d + i] = INF
        m[c * d + c] = LE_ZERO
        m[c] = LE_ZERO  # keep x_c >= 0
    _close(m, d)
    return Zone(z.n, tuple(m))


def assign_zero(z: Zone, clocks: list[int]) -> Zone:
    """Set the named clocks to zero (after freeing them)."""
    zf = free(z, clocks)
    d = z.n + 1
    m = list(zf.m)
    for c in clocks:
        for i in range(d):
            # x_c - x_i = 0 - x_i ; x_i - x_c = x_i - 0
            m[c * d + i] = m[i]
            m[i * d + c] = m[i * d]
        m[c * d] = LE_ZERO
        m[c] = LE_ZERO
    _close(m, d)
    return Zone(z.n, tuple(m))


def down(z: Zone) -> Zone:
    """Time predecessors: states that reach z by letting time pass."""
    d = z.n + 1
    m = list(z.m)
    for i in range(1, d):
        m[i] = LE_ZERO  # relax lower bounds to x_i >= 0
    _close(m, d)
    return Zone(z.n, tuple(m))


def nonstrict_closure(z: Zone) -> Zone:
    """Relax every strict bound to its non-strict counterpart."""
    m = [b if b >= INF or (b & 1) else b + 1 for b in z.m]
    _close(m, z.n + 1)
    return Zone(z.n, tuple(m))


def extrapolate(z: Zone, ceilings: list[int]) -> Zone:
    """Classic per-clock max-constant widening (ceilings[i] for clock i+1)."""
    d = z.n + 1
    k = [0] + list(ceilings)
    m = list(z.m)
    changed = False
    for i in range(d):
        for j in range(d):
            if i == j:
                continue
            b = m[i * d + j]
            if b >= INF:
                continue
            c = b >> 1
            if c > k[i]:
                m[i * d + j] = INF
                changed = True
            elif c < -k[j]:
                m[i * d + j] = bound(-k[j], True)
                changed = True
    if not changed:
        return z
    # widening of a non-empty canonical zone cannot make it empty
    for i in range(1, d):
        if m[i] > LE_ZERO:
            m[i] = LE_ZERO
    _close(m, d)
    return Zone(z.n, tuple(m))


def subtract(a: Zone, b: Zone) -> list[Zone]:
    """a minus b as a list of disjoint-ish zones."""
    if intersect(a, b) is None:
        return [a]
    out = []
    rest = a
    d = a.n + 1
    for i in range(d):
        for j in range(d):
            if i == j:
                continue
            bb = b.at(i, j)
            if bb >= INF:
                continue
            if bb >= rest.at(i, j):
                continue  # constraint already implied, nothing outside it here
            piece = constrain(rest, [(j, i, bound_neg(bb))])
            if piece is not None:
                out.append(piece)
            nxt = constrain(rest, [(i, j, bb)])
            if nxt is None:
                return out
            rest = nxt
    return out


def sample(z: Zone) -> list[float]:
    """A concrete point of the zone (clock values), for membership tests.

    Works in a doubled clock scale so strict bounds leave integer slack;
    the returned values are multiples of 0.5.
    """
    d = z.n + 1
    # double every constant; strict bounds tighten to <= 2c-1
    m = [INF if b >= INF else bound((b >> 1) * 2 - (0 if b & 1 else 1), False)
         for b in z.m]
    _close(m, d)
    vals = [0] * d
    for i in range(1, d):
        lo = -(m[i] >> 1)  # m[0][i] is bound on -x_i
        vals[i] = lo
        m[i * d] = min(m[i * d], bound(lo, False))
        m[i] = min(m[i], bound(-lo, False))
        ok = _close(m, d)
        assert ok, "sampling a non-empty canonical zone cannot fail"
    return [v / 2.0 for v in vals[1:]]


def contains_point(z: Zone, vals: list[float]) -> bool:
    pt = [0.0] + list(vals)
    d = z.n + 1
    for i in range(d):
        for j in range(d):
            b = z.at(i, j)
            if b >= INF:
                continue
            diff = pt[i] - pt[j]
            c, nonstrict = b >> 1, b & 1
            if nonstrict:
                if diff > c + 1e-9:
                    return False
            else:
                if diff >= c - 1e-9:
                    return False
    return True
