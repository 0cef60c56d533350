"""Symbolic fair-simulation checking for communicating timed automata."""

from .model import (TimedAutomaton, Transition, Event, Fairness, FairAutomaton,
                    StatePred, EventPred, Prop, ClockCmp, TRUE, FALSE,
                    pand, por, validate)
from .engine import check_simulation, check_simulation_env, Verdict
from .arena import UnsupportedFairness, env_to_product

__all__ = [
    "TimedAutomaton", "Transition", "Event", "Fairness", "FairAutomaton",
    "StatePred", "EventPred", "Prop", "ClockCmp", "TRUE", "FALSE",
    "pand", "por", "validate",
    "check_simulation", "check_simulation_env", "Verdict",
    "UnsupportedFairness", "env_to_product",
]

__version__ = "0.1.0"
