"""Benchmark family generators emitting task-file text.

Families:

* ``fischer`` — m competing processes plus a lock-variable process
  (timing constants 10 and 19);
* ``csma`` — a bus plus m senders (constants 26, 52, 808);
* ``prodcons`` — a buffer, a producer and m consumers (5, 10, 15, 20);
* ``network`` — a dispatcher plus worker processes whose progress depends
  on services from their peers (linear / tree / irregular topologies).

Every family places the model at index ``#PS-1`` and the specification
(a copy of the model process) at ``#PS``; everything else is environment.
The ``mutated`` variant mis-edits a single guard of the specification
copy.  Network requirements come in a ``strong`` and a ``weak`` flavour;
the specification copy shares the model's channel, so its event
assumption is written on the model-indexed channel.
"""
from __future__ import annotations

PRIMES = (2, 3, 5, 7, 11, 13, 17, 19)


def serve_pairs(topology: str, m: int) -> set[tuple[int, int]]:
    """Service arcs between process indices for the network families."""
    if topology == "linear":
        return {(i, i + 1) for i in range(2, m + 1)}
    if topology == "tree":
        return {(j // 2, j) for j in range(2, m + 1) if j // 2 >= 2}
    if topology == "irregular":
        return {(i, j)
                for i in range(2, m + 2) for j in range(2, m + 2)
                if (i * PRIMES[i % 8] + PRIMES[j % 8]) % 7 == 0}
    raise ValueError(f"unknown topology {topology!r}")


def _proc(name: str, clocks: list[str], init: str,
          locations: list[tuple[str, str | None]],
          trans: list[tuple[str, str, str | None, str | None,
                            list[str]]]) -> str:
    out = [f"process {name} {{"]
    if clocks:
        out.append("  clock " + ", ".join(clocks) + ";")
    out.append(f"  init {init};")
    for q, inv in locations:
        out.append(f"  location {q} {{ }}" if inv is None
                   else f"  location {q} {{ inv {inv}; }}")
    for src, dst, sync, when, resets in trans:
        body = []
        if when:
            body.append(f"when {when};")
        if sync:
            body.append(f"sync {sync};")
        if resets:
            body.append("reset " + ", ".join(resets) + ";")
        out.append(f"  trans {src} -> {dst} {{ {' '.join(body)} }}")
    out.append("}")
    return "\n".join(out)


# ----------------------------------------------------------------- fischer

def _fischer_competitor(k: int, owner: int, mutated: bool) -> str:
    """Competitor with identity ``owner`` on the shared lock variable
    (the spec copy keeps the model's identity)."""
    cs_guard = f"x{k} <= 19" if mutated else f"x{k} > 19"
    return _proc(
        f"P{k}", [f"x{k}"], f"idle{k} && x{k} == 0",
        [(f"idle{k}", None), (f"try{k}", f"x{k} <= 10"),
         (f"wait{k}", None), (f"cs{k}", None)],
        [(f"idle{k}", f"try{k}", "?vacant", None, [f"x{k}"]),
         (f"try{k}", f"wait{k}", f"!set{owner}", f"x{k} <= 10", [f"x{k}"]),
         (f"wait{k}", f"cs{k}", f"?grant{owner}", cs_guard, []),
         (f"cs{k}", f"idle{k}", f"!clear{owner}", None, [f"x{k}"])])


def gen_fischer(m: int, variant: str = "correct") -> str:
    """m competitors (the last is the model; its copy is the spec) plus a
    lock-variable process at index 1."""
    assert m >= 2 and variant in ("correct", "mutated")
    owners = list(range(2, m + 2))      # competitor indices
    trans = [("free", f"own{k}", f"?set{k}", None, []) for k in owners]
    trans += [(f"own{j}", f"own{k}", f"?set{k}", None, [])
              for j in owners for k in owners if j != k]
    trans += [(f"own{k}", "free", f"?clear{k}", None, []) for k in owners]
    trans += [(f"own{k}", f"own{k}", f"!grant{k}", None, []) for k in owners]
    trans += [("free", "free", "!vacant", None, [])]
    lock = _proc("Lock", [], "free",
                 [("free", None)] + [(f"own{k}", None) for k in owners],
                 trans)
    model_idx = m + 1
    procs = [lock]
    procs += [_fischer_competitor(k, k, False) for k in range(2, model_idx)]
    procs += [_fischer_competitor(model_idx, model_idx, False)]
    procs += [_fischer_competitor(model_idx + 1, model_idx,
                                  variant == "mutated")]
    return "\n".join(procs) + "\n#PS-1;#PS;\n"


# ------------------------------------------------------------------- csma

def _csma_sender(k: int, owner: int, mutated: bool) -> str:
    """Sender with identity ``owner`` on the bus (the spec copy keeps the
    model's identity).  The mutated copy cannot finish a transmission."""
    end_guard = f"x{k} <= 404" if mutated else f"x{k} >= 808"
    return _proc(
        f"Snd{k}", [f"x{k}"], f"waitc{k} && x{k} == 0",
        [(f"waitc{k}", None), (f"send{k}", f"x{k} <= 808"),
         (f"off{k}", f"x{k} <= 52")],
        [(f"waitc{k}", f"send{k}", f"!begin{owner}", "idleb", [f"x{k}"]),
         (f"send{k}", f"waitc{k}", f"!end{owner}", end_guard, [f"x{k}"]),
         (f"send{k}", f"off{k}", f"?jam{owner}", None, [f"x{k}"]),
         (f"off{k}", f"send{k}", f"!begin{owner}",
          f"x{k} >= 26 && idleb", [f"x{k}"]),
         (f"off{k}", f"waitc{k}", None, f"x{k} >= 52", [f"x{k}"])])


def gen_csma(m: int, variant: str = "correct") -> str:
    """A bus at index 1 and m senders; the last sender is the model."""
    assert m >= 1 and variant in ("correct", "mutated")
    senders = list(range(2, m + 2))
    trans = [("idleb", "activeb", f"?begin{k}", None, ["yb"])
             for k in senders]
    trans += [("activeb", "collb", f"?begin{k}", None, ["yb"])
              for k in senders]
    trans += [("activeb", "idleb", f"?end{k}", None, []) for k in senders]
    trans += [("collb", "collb", f"!jam{k}", "yb < 26", []) for k in senders]
    trans += [("collb", "idleb", None, "yb >= 26", ["yb"])]
    bus = _proc("Bus", ["yb"], "idleb && yb == 0",
                [("idleb", None), ("activeb", None), ("collb", "yb <= 26")],
                trans)
    model_idx = m + 1
    procs = [bus]
    procs += [_csma_sender(k, k, False) for k in range(2, model_idx + 1)]
    procs.append(_csma_sender(model_idx + 1, model_idx,
                              variant == "mutated"))
    return "\n".join(procs) + "\n#PS-1;#PS;\n"


# --------------------------------------------------------------- prodcons

def _consumer(k: int, mutated: bool) -> str:
    """Consumer polling the shared buffer; the mutated copy's take guard
    is dead under the location invariant, so it can never consume."""
    take = f"x{k} > 20" if mutated else f"x{k} >= 15"
    return _proc(
        f"Con{k}", [f"x{k}"], f"rest{k} && x{k} == 0",
        [(f"rest{k}", f"x{k} <= 20")],
        [(f"rest{k}", f"rest{k}", "!get", f"{take} && fullb", [f"x{k}"]),
         (f"rest{k}", f"rest{k}", None, f"x{k} >= 15 && emptyb",
          [f"x{k}"])])


def gen_prodcons(m: int, variant: str = "correct") -> str:
    """Buffer (1), producer (2) and m consumers; the last consumer is the
    model."""
    assert m >= 1 and variant in ("correct", "mutated")
    buf = _proc("Buf", [], "emptyb",
                [("emptyb", None), ("fullb", None)],
                [("emptyb", "fullb", "?put", None, []),
                 ("fullb", "emptyb", "?get", None, [])])
    prod = _proc("Prod", ["xp"], "run && xp == 0",
                 [("run", "xp <= 10")],
                 [("run", "run", "!put", "xp >= 5 && emptyb", ["xp"]),
                  ("run", "run", None, "xp >= 5 && fullb", ["xp"])])
    model_idx = m + 2
    procs = [buf, prod]
    procs += [_consumer(k, False) for k in range(3, model_idx + 1)]
    procs.append(_consumer(model_idx + 1, variant == "mutated"))
    return "\n".join(procs) + "\n#PS-1;#PS;\n"


# ---------------------------------------------------------------- network

def _worker(k: int, preds: list[int], mode: str, channel: int) -> str:
    """Network worker: activates on the dispatcher's signal, executes while
    served, re-enters idle when its serving peers allow it."""
    def props(name: str, op: str) -> str:
        terms = [f"{name}{h}" for h in sorted(preds)]
        return "(" + f" {op} ".join(terms) + ")" if terms else ""

    trans = [(f"idle{k}", f"active{k}", f"?execute{channel}", None,
              [f"x{k}"])]
    act = props("active", "&&" if mode == "all" else "||")
    if act:
        trans.append((f"active{k}", f"active{k}", f"?execute{channel}",
                      f"x{k} > 1 && {act}", [f"x{k}"]))
    idl = props("idle", "&&" if mode == "all" else "||")
    back = f"x{k} > 1 && {idl}" if idl else f"x{k} > 1"
    trans.append((f"active{k}", f"idle{k}", f"?execute{channel}", back,
                  [f"x{k}"]))
    return _proc(f"A{k}", [f"x{k}"], f"idle{k} && x{k} == 0",
                 [(f"idle{k}", None), (f"active{k}", None)], trans)


def gen_network(topology: str, m: int, mode: str = "all",
                variant: str = "strong") -> str:
    """Dispatcher (1), environment workers 2..m-1, model worker m,
    spec copy m+1.  ``mode`` picks service-by-all/one-incoming guards;
    ``variant`` picks the strong or weak requirement."""
    assert mode in ("all", "one") and variant in ("strong", "weak")
    model_idx = max(m, 2)
    serve = serve_pairs(topology, m)
    workers = list(range(2, model_idx + 1))
    disp = _proc("Disp", [], "disp", [("disp", None)],
                 [("disp", "disp", f"!execute{k}", None, [])
                  for k in workers])
    procs = [disp]
    for k in workers:
        preds = [h for h, j in serve if j == k]
        procs.append(_worker(k, preds, mode, k))
    spec_preds = [h for h, j in serve if j == model_idx + 1]
    procs.append(_worker(model_idx + 1, spec_preds, mode, model_idx))
    req = ["#PS-1;#PS;",
           "#PS-1 assume { strong event {execute@(#PS-1)}; }"]
    if variant == "strong":
        req.append("#PS assume { strong true event {execute@(#PS-1)} true; }")
    else:
        req.append("#PS assume { weak idle@(#PS); }")
    if model_idx >= 3:   # environment workers exist at 2..#PS-2
        req.append("assume { |k:2..#PS-2, "
                   "strong true event {execute@(k)}; }")
    return "\n".join(procs) + "\n" + "\n".join(req) + "\n"


def generate(family: str, m: int, **kw) -> str:
    if family == "fischer":
        return gen_fischer(m, kw.get("variant", "correct"))
    if family == "csma":
        return gen_csma(m, kw.get("variant", "correct"))
    if family == "prodcons":
        return gen_prodcons(m, kw.get("variant", "correct"))
    if family in ("linear", "tree", "irregular"):
        return gen_network(family, m, kw.get("mode", "all"),
                           kw.get("variant", "strong"))
    raise ValueError(f"unknown family {family!r}")
