"""Local observation functions and the comparison structure on their values.

Each constraint N in {U, C, I, T, S} determines what can be seen of a single
state: nothing, termination, the initial offer, the trace set, or the state's
simulation class.  Two states satisfy the constraint exactly when their local
observations are equal, which is what makes the constrained-simulation layers
of the spectrum work.

The S case compares class representatives with the plain-simulation decision
procedure.  To avoid a module cycle, that comparator is injected by the
``preorders`` module at import time via ``register_simulation_order``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

from .lts import initials, traces
from .terms import CanonicalTerm

__all__ = [
    "CONSTRAINTS",
    "LocalObs",
    "local_obs",
    "local_eq",
    "local_geq",
    "local_key",
    "constraint_holds",
    "register_simulation_order",
]

# Fineness order U < C < I < T < S; used for reporting only.
CONSTRAINTS = ("U", "C", "I", "T", "S")

_sim_leq: Callable[[CanonicalTerm, CanonicalTerm], bool] | None = None


def register_simulation_order(fn: Callable[[CanonicalTerm, CanonicalTerm], bool]) -> None:
    """Install the plain-simulation order used to compare S-class representatives."""
    global _sim_leq
    _sim_leq = fn


def _sim(p: CanonicalTerm, q: CanonicalTerm) -> bool:
    if _sim_leq is None:  # pragma: no cover - preorders registers on import
        raise RuntimeError("simulation comparator not registered; import procsem.preorders")
    return _sim_leq(p, q)


@dataclass(frozen=True, slots=True)
class LocalObs:
    """Value of a local observation function at one state."""

    constraint: str
    value: object

    def __repr__(self) -> str:
        return f"LocalObs({self.constraint}, {self.value!r})"


@lru_cache(maxsize=None)
def local_obs(constraint: str, p: CanonicalTerm) -> LocalObs:
    if constraint == "U":
        return LocalObs("U", None)
    if constraint == "C":
        return LocalObs("C", p.is_nil)
    if constraint == "I":
        return LocalObs("I", initials(p))
    if constraint == "T":
        return LocalObs("T", traces(p))
    if constraint == "S":
        # The term itself stands in for its simulation class; comparisons go
        # through the simulation decision procedure, never through equality
        # of representatives.
        return LocalObs("S", p)
    raise ValueError(f"unknown constraint {constraint!r}")


def _check_same(l1: LocalObs, l2: LocalObs) -> str:
    if l1.constraint != l2.constraint:
        raise ValueError(f"mixed-constraint comparison: {l1.constraint} vs {l2.constraint}")
    return l1.constraint


def local_eq(constraint: str, l1: LocalObs, l2: LocalObs) -> bool:
    """The equivalence N on observation values."""
    n = _check_same(l1, l2)
    if n != constraint:
        raise ValueError(f"observations carry constraint {n}, expected {constraint}")
    if n == "S":
        return l1.value is l2.value or (
            _sim(l1.value, l2.value) and _sim(l2.value, l1.value)
        )
    return l1.value == l2.value


def local_geq(constraint: str, l1: LocalObs, l2: LocalObs) -> bool:
    """l1 dominates l2: equality for U/C, superset for I/T, inverse simulation for S."""
    n = _check_same(l1, l2)
    if n != constraint:
        raise ValueError(f"observations carry constraint {n}, expected {constraint}")
    if n in ("U", "C"):
        return l1.value == l2.value
    if n in ("I", "T"):
        return l1.value >= l2.value
    # [[p]] >= [[q]] in the S domain means q is simulated by p.
    return _sim(l2.value, l1.value)


def local_key(obs: LocalObs):
    """A total sort key on observation values, used for reproducible witnesses."""
    n = obs.constraint
    if n == "U":
        return ()
    if n == "C":
        return (obs.value,)
    if n == "I":
        return tuple(sorted(obs.value))
    if n == "T":
        return tuple(sorted(obs.value))
    return obs.value.key


def constraint_holds(constraint: str, p: CanonicalTerm, q: CanonicalTerm) -> bool:
    return local_eq(constraint, local_obs(constraint, p), local_obs(constraint, q))
