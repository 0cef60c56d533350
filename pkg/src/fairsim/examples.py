"""Small worked examples: a request/serve protocol pair and two
environments for it (a non-responsive one and a responsive one)."""
from __future__ import annotations

from .model import (ClockCmp, Event, FairAutomaton, Fairness, Prop,
                    TimedAutomaton, Transition, TRUE, pand)


def protocol_model() -> TimedAutomaton:
    """Three-location client: may stop serving after a long wait."""
    return TimedAutomaton(
        name="M",
        locations=("idle1", "wait1", "stop1"),
        clocks=("x1",),
        invariants={"wait1": ClockCmp("x1", "<", 20)},
        initial=pand(Prop("idle1"), ClockCmp("x1", "==", 0)),
        transitions=(
            Transition("idle1", "wait1", frozenset({Event("request", "!")}),
                       ClockCmp("x1", ">", 5), frozenset({"x1"})),
            Transition("wait1", "idle1", frozenset({Event("serve", "?")}),
                       TRUE, frozenset({"x1"})),
            Transition("wait1", "stop1", frozenset({Event("end", "!")}),
                       ClockCmp("x1", ">", 10), frozenset()),
        ))


def protocol_spec() -> TimedAutomaton:
    """Two-location client that always waits for service within 15."""
    return TimedAutomaton(
        name="S",
        locations=("idle2", "wait2"),
        clocks=("x2",),
        invariants={"wait2": ClockCmp("x2", "<", 15)},
        initial=pand(Prop("idle2"), ClockCmp("x2", "==", 0)),
        transitions=(
            Transition("idle2", "wait2", frozenset({Event("request", "!")}),
                       ClockCmp("x2", ">", 5), frozenset({"x2"})),
            Transition("wait2", "idle2", frozenset({Event("serve", "?")}),
                       TRUE, frozenset({"x2"})),
        ))


def server_env(responsive: bool) -> TimedAutomaton:
    """Server environment: accepts a request, then serves (or is ended).
    The responsive variant promises service within 10."""
    invs = {"comp": ClockCmp("x3", "<", 10)} if responsive else {}
    return TimedAutomaton(
        name="E",
        locations=("standby", "comp", "sleep"),
        clocks=("x3",),
        invariants=invs,
        initial=pand(Prop("standby"), ClockCmp("x3", "==", 0)),
        transitions=(
            Transition("standby", "comp", frozenset({Event("request", "?")}),
                       TRUE, frozenset({"x3"})),
            Transition("comp", "standby", frozenset({Event("serve", "!")}),
                       TRUE, frozenset()),
            Transition("comp", "sleep", frozenset({Event("end", "?")}),
                       TRUE, frozenset()),
        ))


def fair(ta: TimedAutomaton, strong=(), weak=()) -> FairAutomaton:
    return FairAutomaton(ta, Fairness(tuple(strong), tuple(weak)))
