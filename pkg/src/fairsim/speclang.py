"""Text format for simulation-checking tasks.

A task file lists process automata, two index lists selecting the model
and the specification processes (every other index is environment), and
fairness ``assume`` blocks::

    process A1 {
      clock x1;
      init idle1 && x1 == 0;
      location idle1 { }
      location wait1 { inv x1 < 20; }
      trans idle1 -> wait1 { when x1 > 5; sync !request; reset x1; }
    }
    ...
    1;2;
    1 assume { strong wait1; }
    assume { |k:2..#PS-2, strong true event {execute@(k)} true; }

``#PS`` is the number of processes.  ``name@(expr)`` concatenates the
evaluated integer to the name (``execute@(2)`` is the event ``execute2``),
so families of assumptions can be written with quantifiers
(``|k:lo..hi, item; ...``).  Event items are ``strong|weak [pre] event
{name} [post]``; omitted pre/post default to true.  ``//`` starts a line
comment.  All errors raise :class:`Diagnostic` with line/column.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .model import (And, Bottom, ClockCmp, Event, EventPred, FairPred,
                    Fairness, Not, Or, Pred, Prop, StatePred, TimedAutomaton,
                    Top, Transition, TRUE, pand, por, validate)


class Diagnostic(Exception):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.msg, self.line, self.col = msg, line, col


# -------------------------------------------------------------------- lexer

_SYMBOLS = ["&&", "||", "->", "..", "<=", ">=", "==", "<", ">", "{", "}",
            "(", ")", ";", ",", "@", "|", ":", "!", "?", "+", "-", "*"]
_KEYWORDS = {"process", "clock", "init", "location", "inv", "trans", "when",
             "sync", "reset", "assume", "strong", "weak", "event", "true",
             "false"}


@dataclass(frozen=True)
class Token:
    kind: str   # "ident", "num", "ps", "sym", "kw", "eof"
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if c in " \t\r":
            i, col = i + 1, col + 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text.startswith("#PS", i):
            toks.append(Token("ps", "#PS", line, col))
            i, col = i + 3, col + 3
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("num", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] in "_'"):
                j += 1
            word = text[i:j]
            toks.append(Token("kw" if word in _KEYWORDS else "ident",
                              word, line, col))
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                toks.append(Token("sym", sym, line, col))
                i, col = i + len(sym), col + len(sym)
                break
        else:
            raise Diagnostic(f"unexpected character {c!r}", line, col)
    toks.append(Token("eof", "", line, col))
    return toks


# ------------------------------------------------- template ASTs (pre-#PS)

@dataclass(frozen=True)
class Expr:
    """Integer expression over literals, #PS and quantifier variables."""
    op: str                     # "num", "ps", "var", "+", "-", "*", "neg"
    val: int = 0
    name: str = ""
    args: tuple["Expr", ...] = ()

    def eval(self, env: dict[str, int]) -> int:
        if self.op == "num":
            return self.val
        if self.op == "ps":
            return env["#PS"]
        if self.op == "var":
            if self.name not in env:
                raise Diagnostic(f"unbound variable {self.name}", 0, 0)
            return env[self.name]
        if self.op == "neg":
            return -self.args[0].eval(env)
        a, b = (x.eval(env) for x in self.args)
        return a + b if self.op == "+" else a - b if self.op == "-" else a * b

    def show(self) -> str:
        if self.op == "num":
            return str(self.val)
        if self.op == "ps":
            return "#PS"
        if self.op == "var":
            return self.name
        if self.op == "neg":
            return f"-{self.args[0].show()}"
        return f"{self.args[0].show()}{self.op}{self.args[1].show()}"


@dataclass(frozen=True)
class Name:
    """An identifier with an optional @(expr) index suffix."""
    base: str
    index: Expr | None = None

    def resolve(self, env: dict[str, int]) -> str:
        if self.index is None:
            return self.base
        return f"{self.base}{self.index.eval(env)}"

    def show(self) -> str:
        if self.index is None:
            return self.base
        return f"{self.base}@({self.index.show()})"


@dataclass(frozen=True)
class TPred:
    """Predicate template; resolves to a concrete Pred once #PS and the
    quantifier variables are known."""
    op: str                      # "true","false","prop","cmp","not","and","or"
    name: Name | None = None
    cmp: str = ""
    const: Expr | None = None
    args: tuple["TPred", ...] = ()

    def resolve(self, env: dict[str, int]) -> Pred:
        if self.op == "true":
            return TRUE
        if self.op == "false":
            return Bottom()
        if self.op == "prop":
            return Prop(self.name.resolve(env))
        if self.op == "cmp":
            return ClockCmp(self.name.resolve(env), self.cmp,
                            self.const.eval(env))
        if self.op == "not":
            return ~self.args[0].resolve(env)
        sub = [a.resolve(env) for a in self.args]
        return pand(*sub) if self.op == "and" else por(*sub)

    def show(self) -> str:
        if self.op in ("true", "false"):
            return self.op
        if self.op == "prop":
            return self.name.show()
        if self.op == "cmp":
            return f"{self.name.show()} {self.cmp} {self.const.show()}"
        if self.op == "not":
            return f"!({self.args[0].show()})"
        joint = " && " if self.op == "and" else " || "
        return "(" + joint.join(a.show() for a in self.args) + ")"


TTRUE = TPred("true")


@dataclass(frozen=True)
class AssumeItem:
    """One strong/weak state- or event-fairness assumption template."""
    kind: str                    # "strong" | "weak"
    pre: TPred
    event: Name | None = None    # None = state assumption (pre is the pred)
    post: TPred = TTRUE

    def resolve(self, env: dict[str, int]) -> FairPred:
        if self.event is None:
            return StatePred(self.pre.resolve(env))
        return EventPred(self.pre.resolve(env), self.event.resolve(env),
                         "", self.post.resolve(env))

    def show(self) -> str:
        if self.event is None:
            return f"{self.kind} {self.pre.show()};"
        return (f"{self.kind} {self.pre.show()} event "
                f"{{{self.event.show()}}} {self.post.show()};")


@dataclass(frozen=True)
class QuantifiedAssume:
    """``|k:lo..hi, items`` — items instantiated for every k in [lo, hi]."""
    var: str
    lo: Expr
    hi: Expr
    body: tuple[AssumeItem, ...]
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)

    def show(self) -> str:
        inner = " ".join(i.show() for i in self.body)
        return f"|{self.var}:{self.lo.show()}..{self.hi.show()}, {inner}"


@dataclass(frozen=True)
class AssumeBlock:
    index: Expr | None           # None = global (environment-wide)
    items: tuple[AssumeItem | QuantifiedAssume, ...]

    def show(self) -> str:
        head = f"{self.index.show()} " if self.index is not None else ""
        inner = " ".join(i.show() for i in self.items)
        return f"{head}assume {{ {inner} }}"


@dataclass(frozen=True)
class RequirementFile:
    """The requirement part of a task file, before #PS expansion."""
    process_count: int
    model_indices: tuple[Expr, ...]
    spec_indices: tuple[Expr, ...]
    assumes: tuple[AssumeBlock, ...]

    def show(self) -> str:
        lists = (",".join(e.show() for e in self.model_indices) + ";" +
                 ",".join(e.show() for e in self.spec_indices) + ";")
        return "\n".join([lists] + [b.show() for b in self.assumes])


@dataclass(frozen=True)
class TaskFile:
    processes: tuple[TimedAutomaton, ...]
    requirement: RequirementFile


# ------------------------------------------------------------------ parser

class _Parser:
    def __init__(self, toks: list[Token]):
        self.toks = toks
        self.pos = 0

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def fail(self, msg: str, tok: Token | None = None):
        tok = tok or self.peek()
        raise Diagnostic(msg, tok.line, tok.col)

    def expect(self, kind: str, text: str | None = None) -> Token:
        t = self.peek()
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            self.fail(f"expected {want!r}, found {t.text or t.kind!r}")
        return self.next()

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.peek()
        return t.kind == kind and (text is None or t.text == text)

    def eat(self, kind: str, text: str | None = None) -> bool:
        if self.at(kind, text):
            self.next()
            return True
        return False

    # -- expressions --------------------------------------------------------
    def expr(self) -> Expr:
        e = self.term()
        while self.at("sym", "+") or self.at("sym", "-"):
            op = self.next().text
            e = Expr(op, args=(e, self.term()))
        return e

    def term(self) -> Expr:
        e = self.factor()
        while self.at("sym", "*"):
            self.next()
            e = Expr("*", args=(e, self.factor()))
        return e

    def factor(self) -> Expr:
        t = self.peek()
        if t.kind == "num":
            self.next()
            return Expr("num", val=int(t.text))
        if t.kind == "ps":
            self.next()
            return Expr("ps")
        if t.kind == "ident":
            self.next()
            return Expr("var", name=t.text)
        if self.eat("sym", "-"):
            return Expr("neg", args=(self.factor(),))
        if self.eat("sym", "("):
            e = self.expr()
            self.expect("sym", ")")
            return e
        self.fail("expected an integer expression")

    def name(self) -> Name:
        base = self.expect("ident").text
        if self.eat("sym", "@"):
            self.expect("sym", "(")
            idx = self.expr()
            self.expect("sym", ")")
            return Name(base, idx)
        return Name(base)

    # -- predicates ---------------------------------------------------------
    def pred(self) -> TPred:
        args = [self.pred_and()]
        while self.eat("sym", "||"):
            args.append(self.pred_and())
        return args[0] if len(args) == 1 else TPred("or", args=tuple(args))

    def pred_and(self) -> TPred:
        args = [self.pred_unary()]
        while self.eat("sym", "&&"):
            args.append(self.pred_unary())
        return args[0] if len(args) == 1 else TPred("and", args=tuple(args))

    def pred_unary(self) -> TPred:
        if self.eat("sym", "!"):
            return TPred("not", args=(self.pred_unary(),))
        if self.eat("kw", "true"):
            return TPred("true")
        if self.eat("kw", "false"):
            return TPred("false")
        if self.eat("sym", "("):
            p = self.pred()
            self.expect("sym", ")")
            return p
        if self.at("ident"):
            nm = self.name()
            for op in ("<=", ">=", "==", "<", ">"):
                if self.eat("sym", op):
                    return TPred("cmp", name=nm, cmp=op, const=self.expr())
            return TPred("prop", name=nm)
        self.fail("expected a predicate")

    # -- processes ----------------------------------------------------------
    def process(self) -> TimedAutomaton:
        self.expect("kw", "process")
        pname = self.expect("ident").text
        self.expect("sym", "{")
        clocks: list[str] = []
        locs: list[str] = []
        invs: dict[str, TPred] = {}
        init: TPred | None = None
        trans: list[tuple] = []
        while not self.eat("sym", "}"):
            if self.eat("kw", "clock"):
                clocks.append(self.expect("ident").text)
                while self.eat("sym", ","):
                    clocks.append(self.expect("ident").text)
                self.expect("sym", ";")
            elif self.eat("kw", "init"):
                init = self.pred()
                self.expect("sym", ";")
            elif self.eat("kw", "location"):
                loc = self.expect("ident").text
                locs.append(loc)
                self.expect("sym", "{")
                if self.eat("kw", "inv"):
                    invs[loc] = self.pred()
                    self.expect("sym", ";")
                self.expect("sym", "}")
            elif self.eat("kw", "trans"):
                src = self.expect("ident").text
                self.expect("sym", "->")
                dst = self.expect("ident").text
                self.expect("sym", "{")
                guard: TPred = TTRUE
                ev: Event | None = None
                resets: list[Name] = []
                while not self.eat("sym", "}"):
                    if self.eat("kw", "when"):
                        guard = self.pred()
                    elif self.eat("kw", "sync"):
                        if self.eat("sym", "!"):
                            d = "!"
                        else:
                            self.expect("sym", "?")
                            d = "?"
                        ev = (self.name(), d)
                    elif self.eat("kw", "reset"):
                        resets.append(self.name())
                        while self.eat("sym", ","):
                            resets.append(self.name())
                    else:
                        self.fail("expected when/sync/reset")
                    self.expect("sym", ";")
                trans.append((src, dst, ev, guard, resets))
            else:
                self.fail("expected clock/init/location/trans")
        if init is None:
            self.fail(f"process {pname} has no init")
        env: dict[str, int] = {"#PS": 0}  # process bodies use no #PS/vars
        transitions = tuple(
            Transition(src, dst,
                       frozenset() if ev is None else
                       frozenset({Event(ev[0].resolve(env), ev[1])}),
                       g.resolve(env),
                       frozenset(r.resolve(env) for r in resets))
            for src, dst, ev, g, resets in trans)
        return TimedAutomaton(
            name=pname, locations=tuple(locs), clocks=tuple(clocks),
            invariants={q: p.resolve(env) for q, p in invs.items()},
            initial=init.resolve(env), transitions=transitions)

    # -- assume blocks ------------------------------------------------------
    def assume_item(self) -> AssumeItem:
        t = self.peek()
        if not (self.at("kw", "strong") or self.at("kw", "weak")):
            self.fail("expected strong/weak")
        kind = self.next().text
        if self.at("kw", "event"):
            pre: TPred = TTRUE
        elif self.at("sym", ";"):
            self.fail("missing predicate in assumption")
        else:
            pre = self.pred()
        if self.eat("kw", "event"):
            self.expect("sym", "{")
            ev = self.name()
            self.expect("sym", "}")
            post = TTRUE if self.at("sym", ";") else self.pred()
            self.expect("sym", ";")
            return AssumeItem(kind, pre, ev, post)
        self.expect("sym", ";")
        return AssumeItem(kind, pre)

    def assume_block(self, index: Expr | None) -> AssumeBlock:
        self.expect("kw", "assume")
        self.expect("sym", "{")
        items: list[AssumeItem | QuantifiedAssume] = []
        while not self.eat("sym", "}"):
            if self.at("sym", "|"):
                t = self.next()
                var = self.expect("ident").text
                self.expect("sym", ":")
                lo = self.expr()
                self.expect("sym", "..")
                hi = self.expr()
                self.expect("sym", ",")
                body: list[AssumeItem] = []
                while not self.at("sym", "}"):
                    body.append(self.assume_item())
                if not body:
                    self.fail("empty quantified assumption", t)
                items.append(QuantifiedAssume(var, lo, hi, tuple(body),
                                              t.line, t.col))
            else:
                items.append(self.assume_item())
        self.eat("sym", ";")
        return AssumeBlock(index, tuple(items))

    # -- whole file ---------------------------------------------------------
    def file(self) -> TaskFile:
        processes: list[TimedAutomaton] = []
        while self.at("kw", "process"):
            processes.append(self.process())
        if not processes:
            self.fail("expected at least one process")
        model = [self.expr()]
        while self.eat("sym", ","):
            model.append(self.expr())
        self.expect("sym", ";")
        spec = [self.expr()]
        while self.eat("sym", ","):
            spec.append(self.expr())
        self.expect("sym", ";")
        assumes: list[AssumeBlock] = []
        while not self.at("eof"):
            if self.at("kw", "assume"):
                assumes.append(self.assume_block(None))
            else:
                idx = self.expr()
                assumes.append(self.assume_block(idx))
        req = RequirementFile(len(processes), tuple(model), tuple(spec),
                              tuple(assumes))
        return TaskFile(tuple(processes), req)


def parse(text: str) -> TaskFile:
    """Parse a task file; raises Diagnostic on any error, never partial."""
    task = _Parser(_tokenize(text)).file()
    _check(task)
    return task


def _indices(req: RequirementFile, which: str) -> list[int]:
    env = {"#PS": req.process_count}
    exprs = req.model_indices if which == "model" else req.spec_indices
    return [e.eval(env) for e in exprs]


def _check(task: TaskFile) -> None:
    req = task.requirement
    ps = req.process_count
    names = set()
    alphabet: set[str] = set()
    props: set[str] = set()
    clocks: set[str] = set()
    for ta in task.processes:
        if ta.name in names:
            raise Diagnostic(f"duplicate process {ta.name}", 0, 0)
        names.add(ta.name)
        errs = validate(ta)
        if errs:
            raise Diagnostic("; ".join(errs), 0, 0)
        alphabet |= ta.alphabet
        props |= set(ta.locations)
        clocks |= set(ta.clocks)
    mi, si = _indices(req, "model"), _indices(req, "spec")
    for i in mi + si:
        if not 1 <= i <= ps:
            raise Diagnostic(f"process index {i} out of range 1..{ps}", 0, 0)
    if set(mi) & set(si):
        raise Diagnostic("model and spec index lists overlap", 0, 0)
    if not set(props).isdisjoint(clocks):
        raise Diagnostic("a name is used as both location and clock", 0, 0)
    # resolve every assumption once to surface unknown names early
    for idx, fp in expanded_assumes(task):
        _check_fairpred(fp, alphabet, props, clocks)


def _check_fairpred(fp: FairPred, alphabet, props, clocks) -> None:
    def chk(p: Pred):
        from .model import pred_props, pred_clocks
        for q in pred_props(p):
            if q not in props:
                raise Diagnostic(f"unknown location {q} in assumption", 0, 0)
        for c in pred_clocks(p):
            if c not in clocks:
                raise Diagnostic(f"unknown clock {c} in assumption", 0, 0)
    if isinstance(fp, StatePred):
        chk(fp.pred)
    else:
        if fp.event not in alphabet:
            raise Diagnostic(f"unknown event {fp.event} in assumption", 0, 0)
        chk(fp.pre)
        chk(fp.post)


# --------------------------------------------------------------- expansion

def expand(req: RequirementFile,
           ps: int | None = None) -> dict[int | None, Fairness]:
    """Concrete fairness per process index (None = environment-wide);
    substitutes #PS and unrolls quantifiers."""
    ps = req.process_count if ps is None else ps
    env = {"#PS": ps}
    out: dict[int | None, tuple[list[FairPred], list[FairPred]]] = {}
    for block in req.assumes:
        idx = None if block.index is None else block.index.eval(env)
        strong, weak = out.setdefault(idx, ([], []))
        for item in block.items:
            if isinstance(item, QuantifiedAssume):
                lo, hi = item.lo.eval(env), item.hi.eval(env)
                if lo > hi:
                    raise Diagnostic(f"empty quantifier range {lo}..{hi}",
                                     item.line, item.col)
                for k in range(lo, hi + 1):
                    sub = dict(env)
                    sub[item.var] = k
                    for it in item.body:
                        (strong if it.kind == "strong" else weak) \
                            .append(it.resolve(sub))
            else:
                (strong if item.kind == "strong" else weak) \
                    .append(item.resolve(env))
    return {idx: Fairness(tuple(s), tuple(w))
            for idx, (s, w) in out.items()}


def expanded_assumes(task: TaskFile) -> Iterator[tuple[int | None, FairPred]]:
    for idx, f in expand(task.requirement).items():
        for fp in f.strong + f.weak:
            yield idx, fp


# -------------------------------------------------------------- pretty/json

def pretty(task: TaskFile) -> str:
    """Canonical text; parsing it again yields a structurally equal task."""
    out: list[str] = []
    for ta in task.processes:
        out.append(f"process {ta.name} {{")
        if ta.clocks:
            out.append("  clock " + ", ".join(ta.clocks) + ";")
        out.append(f"  init {_show_pred(ta.initial)};")
        for q in ta.locations:
            inv = ta.invariants.get(q)
            if inv is None:
                out.append(f"  location {q} {{ }}")
            else:
                out.append(f"  location {q} {{ inv {_show_pred(inv)}; }}")
        for t in ta.transitions:
            parts = []
            if not isinstance(t.guard, Top):
                parts.append(f"when {_show_pred(t.guard)};")
            for e in sorted(t.events):
                parts.append(f"sync {e.direction}{e.name};")
            if t.resets:
                parts.append("reset " + ", ".join(sorted(t.resets)) + ";")
            body = " ".join(parts)
            out.append(f"  trans {t.source} -> {t.target} {{ {body} }}")
        out.append("}")
    out.append(task.requirement.show())
    return "\n".join(out) + "\n"


def _show_pred(p: Pred) -> str:
    if isinstance(p, Top):
        return "true"
    if isinstance(p, Bottom):
        return "false"
    if isinstance(p, Prop):
        return p.name
    if isinstance(p, ClockCmp):
        return f"{p.clock} {p.op} {p.const}"
    if isinstance(p, Not):
        return f"!({_show_pred(p.arg)})"
    if isinstance(p, And):
        return "(" + " && ".join(_show_pred(a) for a in p.args) + ")"
    if isinstance(p, Or):
        return "(" + " || ".join(_show_pred(a) for a in p.args) + ")"
    raise TypeError(p)


def to_json(task: TaskFile) -> dict:
    """Machine-readable dump of the parsed network and requirement."""
    def jpred(p: Pred):
        return _show_pred(p)

    def jfair(f: Fairness):
        def jfp(fp: FairPred):
            if isinstance(fp, StatePred):
                return {"state": jpred(fp.pred)}
            return {"pre": jpred(fp.pre), "event": fp.event,
                    "direction": fp.direction, "post": jpred(fp.post)}
        return {"strong": [jfp(x) for x in f.strong],
                "weak": [jfp(x) for x in f.weak]}

    req = task.requirement
    fairness = expand(req)
    return {
        "processes": [{
            "name": ta.name,
            "locations": list(ta.locations),
            "clocks": list(ta.clocks),
            "invariants": {q: jpred(p) for q, p in ta.invariants.items()},
            "initial": jpred(ta.initial),
            "transitions": [{
                "source": t.source, "target": t.target,
                "events": [{"name": e.name, "direction": e.direction}
                           for e in sorted(t.events)],
                "guard": jpred(t.guard),
                "resets": sorted(t.resets),
            } for t in ta.transitions],
        } for ta in task.processes],
        "model": _indices(req, "model"),
        "spec": _indices(req, "spec"),
        "fairness": {str(k if k is not None else "env"): jfair(v)
                     for k, v in sorted(fairness.items(),
                                        key=lambda kv: str(kv[0]))},
    }


# ------------------------------------------------------------ task assembly

@dataclass(frozen=True)
class CheckTask:
    """Everything the engine needs: environment processes (their fairness
    rides on the model side), the model, and the specification."""
    envs: tuple["FairTA", ...]
    model: "FairTA"
    spec: "FairTA"


from .model import FairAutomaton as FairTA  # noqa: E402


def build_task(task: TaskFile) -> CheckTask:
    from .arena import fold_environment
    req = task.requirement
    fairness = expand(req)
    mi, si = _indices(req, "model"), _indices(req, "spec")
    ei = [i for i in range(1, req.process_count + 1)
          if i not in mi and i not in si]

    def fold(idxs: list[int]) -> TimedAutomaton:
        tas = [task.processes[i - 1] for i in idxs]
        return tas[0] if len(tas) == 1 else fold_environment(tas)

    def gather(idxs: list[int], extra: Fairness | None = None) -> Fairness:
        strong: list[FairPred] = []
        weak: list[FairPred] = []
        for i in idxs:
            f = fairness.get(i)
            if f:
                strong += f.strong
                weak += f.weak
        if extra:
            strong += extra.strong
            weak += extra.weak
        return Fairness(tuple(strong), tuple(weak))

    model = FairTA(fold(mi), gather(mi))
    spec = FairTA(fold(si), gather(si))
    envs = tuple(FairTA(task.processes[i - 1],
                        gather([i], fairness.get(None) if n == 0 else None))
                 for n, i in enumerate(ei))
    return CheckTask(envs, model, spec)
