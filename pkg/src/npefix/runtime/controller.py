"""Strategy selection, bookkeeping and the repair log.

The controller is consulted whenever an instrumented program is about to
perform a harmful null dereference (one whose exception no open try frame
will catch). It decides what the interpreter should do:

* ``replace``      -- evaluate to a substitute value (optionally rebinding
                      the source variable for global injection)
* ``skip_line``    -- abandon the guarded statement
* ``force_return`` -- abandon the rest of the enclosing method
* ``none``         -- no strategy applies; the original exception proceeds

In fixed mode one strategy is active for the whole run, parameterized by
the first candidate in deterministic order. In exploration mode untried
(strategy, parameter) candidates are drawn uniformly with a seeded RNG;
a strategy that leads to a successful task is deployed permanently for its
crash point and reapplied with zero draws afterwards.

Every event is appended to a structured log: crash, try, success, deploy,
exhausted. Timestamps are logical sequence numbers so identical runs yield
byte-identical logs.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from ..minij.typecheck import TypeTable
from .pool import DEFAULT_DEPTH_BUDGET, MANUFACTURE_FAILED, constructible_types
from .strategies import (
    GLOBAL_INJECTION, MANUFACTURE, REPLACEMENT, REUSE, Strategy,
)
from .values import Value

if TYPE_CHECKING:
    from .interpreter import Activation, Interpreter

# Outcome reasons recorded when a strategy cannot be applied.
NO_VALUE = "NoV"
NO_INSTANCE = "NoI"
RETURN_INCOMPATIBLE = "RI"
UNSKIPPABLE = "US"
NO_CANDIDATES = "exhausted"


@dataclass
class RepairEvent:
    event: str  # "crash" | "try" | "success" | "deploy" | "exhausted"
    crash_point: str | None = None
    strategy: str | None = None
    parameter: str | None = None
    rng_draw: int | None = None
    timestamp: int = 0
    reason: str | None = None

    def to_record(self) -> dict:
        record = {
            "event": self.event,
            "crash_point": self.crash_point,
            "strategy": self.strategy,
            "parameter": self.parameter,
            "rng_draw": self.rng_draw,
            "timestamp": self.timestamp,
        }
        if self.reason is not None:
            record["reason"] = self.reason
        return record

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)


@dataclass
class CrashPointState:
    key: str
    tried: set[tuple[str, str | None]] = field(default_factory=set)
    deployed: Strategy | None = None


@dataclass
class Decision:
    kind: str  # "none" | "replace" | "skip_line" | "force_return"
    strategy: Strategy | None = None
    reason: str | None = None

    @property
    def is_global(self) -> bool:
        return self.strategy is not None and self.strategy.id in GLOBAL_INJECTION


_PROCEED = Decision("none")


class RepairController:
    def __init__(self, mode: str = "idle", strategy: Strategy | None = None,
                 seed: int = 0, depth: int = DEFAULT_DEPTH_BUDGET,
                 deployments: dict[str, Strategy] | None = None,
                 site_types: dict[str, str] | None = None):
        if mode not in ("idle", "fixed", "explore", "deployed"):
            raise ValueError(f"unknown repair mode {mode!r}")
        if mode == "fixed" and strategy is None:
            raise ValueError("fixed mode needs a strategy")
        self.mode = mode
        self.fixed = strategy
        self.depth = depth
        self.rng = random.Random(seed)
        self.draw_count = 0
        self.states: dict[str, CrashPointState] = {}
        self.events: list[RepairEvent] = []
        self.site_types = site_types or {}
        self._clock = 0
        self._suppress = 0
        self._run_cache: dict[str, Decision] = {}
        if deployments:
            for key, strat in deployments.items():
                self.states[key] = CrashPointState(key, deployed=strat)

    # -- logging --

    def _log(self, event: str, **kw) -> RepairEvent:
        ev = RepairEvent(event=event, timestamp=self._clock, **kw)
        self._clock += 1
        self.events.append(ev)
        return ev

    def log_lines(self) -> list[str]:
        return [ev.to_json() for ev in self.events]

    # -- run lifecycle --

    def begin_run(self):
        """Reset per-run state (provisional picks); keeps tried/deployed."""
        self._run_cache = {}

    def task_succeeded(self):
        self._log("success")
        if self.mode != "explore":
            return
        for key, decision in self._run_cache.items():
            if decision.kind == "none" or decision.strategy is None:
                continue
            state = self.states.setdefault(key, CrashPointState(key))
            if state.deployed is None:
                state.deployed = decision.strategy
                self._log("deploy", crash_point=key,
                          strategy=decision.strategy.id,
                          parameter=decision.strategy.parameter)

    def deployments(self) -> dict[str, Strategy]:
        return {key: st.deployed for key, st in self.states.items()
                if st.deployed is not None}

    # -- manufacture suppression (no reentrant repair while constructing) --

    def push_suppress(self):
        self._suppress += 1

    def pop_suppress(self):
        self._suppress -= 1

    @property
    def active(self) -> bool:
        return self.mode != "idle" and self._suppress == 0

    def consults_at_skipline(self) -> bool:
        """Whether the pre-execution skip test should ask for a decision.
        Fixed replacement strategies act at the dereference itself."""
        if not self.active:
            return False
        if self.mode == "fixed":
            assert self.fixed is not None
            return self.fixed.id not in REPLACEMENT
        return True

    # -- decision making --

    def decide(self, key: str, required_type: str | None,
               interp: "Interpreter", activation: "Activation") -> Decision:
        if not self.active:
            return _PROCEED
        if key in self._run_cache:
            return self._run_cache[key]
        if required_type is None:
            required_type = self.site_types.get(key)
        if self.mode == "deployed" and (
                key not in self.states or self.states[key].deployed is None):
            return _PROCEED
        self._clock_crash(key)

        state = self.states.setdefault(key, CrashPointState(key))
        if state.deployed is not None:
            decision = self._decision_for(state.deployed, key, required_type,
                                          interp, activation)
            # Reapplication of a deployed strategy: no draw, no try event.
            self.events[-1].strategy = state.deployed.id
            self.events[-1].parameter = state.deployed.parameter
            self._run_cache[key] = decision
            return decision

        if self.mode == "fixed":
            decision = self._fixed_decision(key, required_type, interp, activation)
        else:
            decision = self._explore_decision(key, required_type, interp, activation)
        self._run_cache[key] = decision
        return decision

    def _clock_crash(self, key: str):
        self._log("crash", crash_point=key)

    def _fixed_decision(self, key, required_type, interp, activation) -> Decision:
        assert self.fixed is not None
        sid = self.fixed.id
        param, reason = self._pick_parameter(sid, self.fixed.parameter,
                                             required_type, interp, activation)
        if reason is not None:
            self._log("exhausted", crash_point=key, strategy=sid, reason=reason)
            return Decision("none", reason=reason)
        strategy = Strategy(sid, param)
        self._log("try", crash_point=key, strategy=sid, parameter=param)
        return self._decision_for(strategy, key, required_type, interp, activation)

    def _explore_decision(self, key, required_type, interp, activation) -> Decision:
        state = self.states[key]
        candidates = [c for c in self._candidates(required_type, interp, activation)
                      if c not in state.tried]
        if not candidates:
            self._log("exhausted", crash_point=key, reason=NO_CANDIDATES)
            return Decision("none", reason=NO_CANDIDATES)
        index = self.rng.randrange(len(candidates))
        self.draw_count += 1
        sid, param = candidates[index]
        state.tried.add((sid, param))
        self._log("try", crash_point=key, strategy=sid, parameter=param,
                  rng_draw=index)
        return self._decision_for(Strategy(sid, param), key, required_type,
                                  interp, activation)

    # -- candidate enumeration --

    def _candidates(self, required_type, interp, activation) -> list[tuple[str, str | None]]:
        """Applicable (strategy id, parameter) pairs at a crash point, in
        deterministic order."""
        out: list[tuple[str, str | None]] = []
        pool = activation.pool
        table: TypeTable = interp.table
        if required_type is not None and pool is not None:
            names = [e.name for e, _ in pool.candidates(required_type)]
            out += [("S1a", n) for n in names]
            out += [("S1b", n) for n in names]
        if required_type is not None:
            types = constructible_types(table, required_type, self.depth)
            out += [("S2a", t) for t in types]
            out += [("S2b", t) for t in types]
        if interp.skip_guard_active(activation):
            out.append(("S3", None))
        ret = activation.return_type
        if ret == "void" or table.is_nullable(ret):
            out.append(("S4a", None))
        if ret != "void":
            if pool is not None:
                out += [("S4b", e.name) for e, _ in pool.candidates(ret)]
            out += [("S4c", t) for t in constructible_types(table, ret, self.depth)]
        if ret == "void":
            out.append(("S4d", None))
        return out

    def _pick_parameter(self, sid: str, given: str | None, required_type,
                        interp, activation) -> tuple[str | None, str | None]:
        """Resolve the parameter for a fixed-mode strategy: the first
        candidate in deterministic order, or a failure reason."""
        pool = activation.pool
        table: TypeTable = interp.table
        ret = activation.return_type
        if sid in REUSE:
            if required_type is None or pool is None:
                return None, NO_VALUE
            names = [e.name for e, _ in pool.candidates(required_type)]
            if given is not None:
                return (given, None) if given in names else (None, NO_VALUE)
            return (names[0], None) if names else (None, NO_VALUE)
        if sid in MANUFACTURE:
            if required_type is None:
                return None, NO_INSTANCE
            types = constructible_types(table, required_type, self.depth)
            if given is not None:
                return (given, None) if given in types else (None, NO_INSTANCE)
            return (types[0], None) if types else (None, NO_INSTANCE)
        if sid == "S3":
            if interp.skip_guard_active(activation):
                return None, None
            return None, UNSKIPPABLE
        if sid == "S4a":
            if ret == "void" or table.is_nullable(ret):
                return None, None
            return None, RETURN_INCOMPATIBLE
        if sid == "S4b":
            if ret == "void":
                return None, RETURN_INCOMPATIBLE
            if pool is None:
                return None, NO_VALUE
            names = [e.name for e, _ in pool.candidates(ret)]
            if given is not None:
                return (given, None) if given in names else (None, NO_VALUE)
            return (names[0], None) if names else (None, NO_VALUE)
        if sid == "S4c":
            if ret == "void":
                return None, RETURN_INCOMPATIBLE
            types = constructible_types(table, ret, self.depth)
            if given is not None:
                return (given, None) if given in types else (None, NO_INSTANCE)
            return (types[0], None) if types else (None, NO_INSTANCE)
        # S4d
        if ret == "void":
            return None, None
        return None, RETURN_INCOMPATIBLE

    def _decision_for(self, strategy: Strategy, key, required_type,
                      interp, activation) -> Decision:
        if strategy.id in REPLACEMENT:
            return Decision("replace", strategy=strategy)
        if strategy.id == "S3":
            if interp.skip_guard_active(activation):
                return Decision("skip_line", strategy=strategy)
            self._log("exhausted", crash_point=key, strategy=strategy.id,
                      reason=UNSKIPPABLE)
            return Decision("none", reason=UNSKIPPABLE)
        # Method skipping: re-validate against the current activation
        # (deployed strategies may resurface at an incompatible frame).
        param, reason = self._pick_parameter(strategy.id, strategy.parameter,
                                             required_type, interp, activation)
        if reason is not None:
            self._log("exhausted", crash_point=key, strategy=strategy.id,
                      reason=reason)
            return Decision("none", reason=reason)
        return Decision("force_return", strategy=Strategy(strategy.id, param))

    # -- replacement materialization --

    def materialize(self, decision: Decision, interp: "Interpreter",
                    activation: "Activation", key: str) -> tuple[bool, Value]:
        """Produce the substitute value for a replace decision. Returns
        (ok, value); on failure the original exception proceeds."""
        strategy = decision.strategy
        assert strategy is not None
        if strategy.id in REUSE:
            pool = activation.pool
            if pool is None:
                self._log("exhausted", crash_point=key, strategy=strategy.id,
                          reason=NO_VALUE)
                return False, None
            found, value = pool.lookup(strategy.parameter or "")
            if not found or value is None:
                self._log("exhausted", crash_point=key, strategy=strategy.id,
                          reason=NO_VALUE)
                return False, None
            return True, value
        # Manufacture: run constructors with repair suppressed so the
        # replacement search cannot recursively trigger repair.
        self.push_suppress()
        try:
            value = interp.manufacture(strategy.parameter or "", self.depth)
        finally:
            self.pop_suppress()
        if value is MANUFACTURE_FAILED:
            self._log("exhausted", crash_point=key, strategy=strategy.id,
                      reason=NO_INSTANCE)
            return False, None
        return True, value
