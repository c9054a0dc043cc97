"""Axiom schemas, soundness sweeps, head normal forms and proof replay.

The catalog is generated from three schema families: the choice axioms (the
bisimilarity base), one simulation axiom per constraint (conditional on the
constraint relation), and one nondeterminism-reduction schema whose side
condition selects the linear semantics.  Side conditions are semantic
predicates evaluated on closed instances, never symbolic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Callable, Sequence

from .lts import initials, traces
from .observations import TruncationError
from .spectrum import SemanticsId, UnsupportedSemanticsError, parse_semantics
from .terms import (
    CanonicalTerm,
    Choice,
    Nil,
    Prefix,
    Term,
    Var,
    canonicalize,
    prefix,
    render_term,
    substitute,
    sum_terms,
)

__all__ = [
    "Axiom",
    "CONDITIONS",
    "condition_holds",
    "axiom_catalog",
    "SoundnessReport",
    "check_soundness",
    "hnf",
    "tehnf",
    "HnfLawReport",
    "verify_hnf_laws",
    "Derivation",
    "derive_leq",
]

X, Y, Z = Var("X"), Var("Y"), Var("Z")


def _plus(*parts: Term) -> Term:
    out = parts[0]
    for p in parts[1:]:
        out = Choice(out, p)
    return out


def _is_nil(t: CanonicalTerm) -> bool:
    return t.is_nil


# Side conditions M(x, y, w) on closed instances; the third variable is
# spelled Z because the term grammar reserves X-Z identifiers for variables.
CONDITIONS: dict[str, Callable[[CanonicalTerm, CanonicalTerm, CanonicalTerm], bool]] = {
    "M_F": lambda x, y, w: True,
    "M_R": lambda x, y, w: initials(x) >= initials(y),
    "M_FT": lambda x, y, w: initials(w) <= initials(y),
    "M_RT": lambda x, y, w: initials(x) == initials(y) and initials(w) <= initials(y),
    "M_R∧FT": lambda x, y, w: initials(x) >= initials(y) and initials(w) <= initials(y),
    "M_R∨FT": lambda x, y, w: initials(x) >= initials(y) or initials(w) <= initials(y),
    "M_T-F": lambda x, y, w: True,
    "M_T-R": lambda x, y, w: traces(x) >= traces(y),
    "M_T-FT": lambda x, y, w: traces(w) <= traces(y),
    "M_T-RT": lambda x, y, w: traces(x) == traces(y) and traces(w) <= traces(y),
    "M_T-R∧FT": lambda x, y, w: traces(x) >= traces(y) and traces(w) <= traces(y),
    "M_T-R∨FT": lambda x, y, w: traces(x) >= traces(y) or traces(w) <= traces(y),
    "M_CR": lambda x, y, w: (not _is_nil(x)) or _is_nil(y),
    "M_CFT": lambda x, y, w: (not _is_nil(y)) or _is_nil(w),
    "M_CRT": lambda x, y, w: (_is_nil(x) == _is_nil(y)) and ((not _is_nil(y)) or _is_nil(w)),
}

# Constraint relations N(x, y) for the simulation axioms.
_N_RELATION: dict[str, Callable[[CanonicalTerm, CanonicalTerm], bool]] = {
    "U": lambda x, y: True,
    "C": lambda x, y: _is_nil(x) == _is_nil(y),
    "I": lambda x, y: initials(x) == initials(y),
    "T": lambda x, y: traces(x) == traces(y),
}


def condition_holds(condition: str | None, x: CanonicalTerm, y: CanonicalTerm, w: CanonicalTerm) -> bool:
    if condition is None:
        return True
    return CONDITIONS[condition](x, y, w)


@dataclass(frozen=True)
class Axiom:
    """An (in)equation schema over open terms with a semantic side condition.

    ``action_vars`` are placeholder actions instantiated over the alphabet;
    ``condition`` names an entry of CONDITIONS (on X, Y, Z) and
    ``n_condition`` a constraint relation on X, Y.
    """

    name: str
    lhs: Term
    rhs: Term
    kind: str  # "inequation" | "equation"
    condition: str | None = None
    n_condition: str | None = None
    action_vars: tuple[str, ...] = ()

    def variables(self) -> tuple[str, ...]:
        from .terms import free_variables

        return tuple(sorted(free_variables(self.lhs) | free_variables(self.rhs)))

    def instance_ok(self, subst: dict[str, CanonicalTerm]) -> bool:
        x = subst.get("X", canonicalize(Nil()))
        y = subst.get("Y", canonicalize(Nil()))
        w = subst.get("Z", canonicalize(Nil()))
        if self.condition is not None and not condition_holds(self.condition, x, y, w):
            return False
        if self.n_condition is not None and not _N_RELATION[self.n_condition](x, y):
            return False
        return True

    def instantiate(
        self, subst: dict[str, CanonicalTerm], actions: dict[str, str]
    ) -> tuple[CanonicalTerm, CanonicalTerm]:
        raw = {name: _raw(term) for name, term in subst.items()}
        lhs = substitute(_rename_actions(self.lhs, actions), raw)
        rhs = substitute(_rename_actions(self.rhs, actions), raw)
        return canonicalize(lhs), canonicalize(rhs)

    def __str__(self) -> str:
        rel = "=" if self.kind == "equation" else "<="
        parts = []
        if self.n_condition is not None:
            parts.append(f"N_{self.n_condition}(X,Y)")
        if self.condition is not None:
            parts.append(f"{self.condition}(X,Y,Z)")
        cond = " and ".join(parts)
        head = f"{cond} => " if cond else ""
        return f"({self.name}) {head}{render_term(self.lhs)} {rel} {render_term(self.rhs)}"


def _raw(t: CanonicalTerm) -> Term:
    if t.is_nil:
        return Nil()
    parts = [Prefix(a, _raw(b)) for a, b in t.summands]
    return _plus(*parts)


def _rename_actions(t: Term, actions: dict[str, str]) -> Term:
    if isinstance(t, Prefix):
        return Prefix(actions.get(t.action, t.action), _rename_actions(t.body, actions))
    if isinstance(t, Choice):
        return Choice(_rename_actions(t.left, actions), _rename_actions(t.right, actions))
    return t


# ---------------------------------------------------------------------------
# The catalog

B_AXIOMS = (
    Axiom("B1", Choice(Choice(X, Y), Z), Choice(X, Choice(Y, Z)), "equation"),
    Axiom("B2", Choice(X, Y), Choice(Y, X), "equation"),
    Axiom("B3", Choice(X, X), X, "equation"),
    Axiom("B4", Choice(X, Nil()), X, "equation"),
)

_NS_NAME = {"U": "S", "C": "CS", "I": "RS", "T": "TS"}


def ns_axiom(constraint: str, equational: bool) -> Axiom:
    name = _NS_NAME[constraint]
    if not equational:
        return Axiom(name, X, Choice(X, Y), "inequation", n_condition=constraint)
    return Axiom(
        name + "≡",
        Prefix("a", Choice(X, Y)),
        Choice(Prefix("a", Choice(X, Y)), Prefix("a", Y)),
        "equation",
        n_condition=constraint,
        action_vars=("a",),
    )


def nd_axiom(condition: str, equational: bool) -> Axiom:
    label = condition.removeprefix("M_")
    lhs_core = Prefix("a", Choice(X, Y))
    rhs_core = Choice(Prefix("a", X), Prefix("a", Choice(Y, Z)))
    if not equational:
        return Axiom(
            f"ND^{label}", lhs_core, rhs_core, "inequation", condition=condition, action_vars=("a",)
        )
    return Axiom(
        f"ND^{label}≡",
        Choice(rhs_core, lhs_core),
        rhs_core,
        "equation",
        condition=condition,
        action_vars=("a",),
    )


PW_AXIOM = Axiom(
    "PW",
    Prefix("a", _plus(Prefix("b", X), Prefix("b", Y), Z)),
    Choice(Prefix("a", Choice(Prefix("b", X), Z)), Prefix("a", Choice(Prefix("b", Y), Z))),
    "equation",
    action_vars=("a", "b"),
)

T_AXIOM = Axiom(
    "T",
    Choice(Prefix("a", X), Prefix("a", Y)),
    Prefix("a", Choice(X, Y)),
    "equation",
    action_vars=("a",),
)

_LINEAR_CONDITION = {
    "l": "RT",
    "l⊇": "FT",
    "lf": "R",
    "lf⊇": "F",
    "join": "R∧FT",
    "meet": "R∨FT",
}


def axiom_catalog(sem: SemanticsId | str, form: str = "order") -> tuple[Axiom, ...]:
    """The axiom set for one point of the spectrum, order or equivalence form."""
    if isinstance(sem, str):
        sem = parse_semantics(sem)
    if form not in ("order", "equivalence"):
        raise ValueError("form must be 'order' or 'equivalence'")
    eq = form == "equivalence"
    flavor, n = sem.flavor, sem.constraint

    if flavor == "bisim":
        return B_AXIOMS
    if flavor in ("bf", "bf⊇"):
        raise UnsupportedSemanticsError(
            f"{sem} is conjectured not to be finitely axiomatizable; no axiom pathway"
        )
    if flavor in ("l⊆", "lf⊆"):
        raise UnsupportedSemanticsError(f"no axiomatization is known for {sem}")
    if n == "S":
        raise UnsupportedSemanticsError(
            "the 2-nested layer has no axiom pathway here (conditions over simulation classes)"
        )
    if flavor == "b":
        return B_AXIOMS + (ns_axiom(n, eq),)
    if flavor == "db":
        if n != "I":
            raise UnsupportedSemanticsError(
                f"no axiomatization is known for deterministic branching at constraint {n}"
            )
        if eq:
            return B_AXIOMS + (PW_AXIOM,)
        return B_AXIOMS + (ns_axiom("I", False), PW_AXIOM)
    if flavor in ("ER", "ERT", "ECR", "ECRT"):
        base = "U" if flavor in ("ER", "ERT") else "C"
        cond = "M_R" if flavor in ("ER", "ECR") else "M_RT"
        return B_AXIOMS + (ns_axiom(base, eq), nd_axiom(cond, eq))
    # linear flavors
    if n == "I":
        cond = "M_" + _LINEAR_CONDITION[flavor]
        return B_AXIOMS + (ns_axiom("I", eq), nd_axiom(cond, eq))
    if n in ("U", "C"):
        # every linear flavor collapses to (completed) traces
        return B_AXIOMS + (ns_axiom(n, eq), nd_axiom("M_F", eq))
    if n == "T":
        # the inequational reduction schema is unsound for the R/F conditions
        # at this layer; the equational form works for all four
        return B_AXIOMS + (ns_axiom("T", eq), nd_axiom("M_T-" + _LINEAR_CONDITION[flavor], True))
    raise UnsupportedSemanticsError(f"no axiom catalog for {sem}")


# ---------------------------------------------------------------------------
# Soundness sweeps


@dataclass
class SoundnessReport:
    axiom: str
    semantics: str
    checked: int = 0
    skipped: int = 0
    violations: list = field(default_factory=list)

    @property
    def sound(self) -> bool:
        return not self.violations

    def to_json(self):
        return {
            "axiom": self.axiom,
            "semantics": self.semantics,
            "checked": self.checked,
            "skipped_by_condition": self.skipped,
            "violations": [
                {
                    "substitution": {k: render_term(v) for k, v in subst.items()},
                    "actions": actions,
                    "lhs": render_term(lhs),
                    "rhs": render_term(rhs),
                }
                for subst, actions, lhs, rhs in self.violations
            ],
        }


def check_soundness(
    axiom: Axiom,
    sem: SemanticsId | str,
    pool: Sequence[CanonicalTerm],
    alphabet: Sequence[str],
    max_instances: int | None = None,
    rng: random.Random | None = None,
) -> SoundnessReport:
    """Instantiate the axiom over the pool and check every instance with the
    decision engine.  Violations are collected, not raised."""
    from . import preorders

    if isinstance(sem, str):
        sem = parse_semantics(sem)
    variables = axiom.variables()
    actions = sorted(set(alphabet))
    pool = list(pool)
    total = len(pool) ** len(variables) * len(actions) ** len(axiom.action_vars)
    if max_instances is not None and total > max_instances:
        rng = rng or random.Random(0)
        instances = (
            (
                tuple(rng.choice(pool) for _ in variables),
                tuple(rng.choice(actions) for _ in axiom.action_vars),
            )
            for _ in range(max_instances)
        )
    else:
        instances = (
            (combo, binding)
            for combo in product(pool, repeat=len(variables))
            for binding in product(actions, repeat=len(axiom.action_vars))
        )
    report = SoundnessReport(axiom=axiom.name, semantics=str(sem))
    for combo, binding in instances:
        subst = dict(zip(variables, combo))
        if not axiom.instance_ok(subst):
            report.skipped += 1
            continue
        action_map = dict(zip(axiom.action_vars, binding))
        lhs, rhs = axiom.instantiate(subst, action_map)
        report.checked += 1
        ok = preorders.decide(sem, lhs, rhs).holds
        if ok and axiom.kind == "equation":
            ok = preorders.decide(sem, rhs, lhs).holds
        if not ok:
            report.violations.append((subst, action_map, lhs, rhs))
    return report


# ---------------------------------------------------------------------------
# Head normal forms


def _restrict(t: CanonicalTerm, offer: frozenset[str], inside: bool) -> CanonicalTerm:
    kept = tuple(s for s in t.summands if (s[0] in offer) == inside)
    return CanonicalTerm(kept)


_HNF_SEMANTICS = {"F": "lf⊇", "R": "lf", "FT": "l⊇", "RT": "l"}


@lru_cache(maxsize=None)
def hnf(z: str, p: CanonicalTerm) -> CanonicalTerm:
    """Saturate p with every merged summand the reduction condition licenses."""
    if z not in _HNF_SEMANTICS:
        raise ValueError(f"head normal forms exist for F, R, FT, RT; got {z!r}")
    cond = CONDITIONS["M_" + z]
    groups: dict[str, list[CanonicalTerm]] = {}
    for a, body in p.summands:
        groups.setdefault(a, []).append(body)
    extra = []
    for a, bodies in groups.items():
        union_offer = frozenset().union(*[initials(b) for b in bodies])
        for i, base in enumerate(bodies):
            for subset in _subsets(union_offer):
                if not initials(base) <= subset:
                    continue
                merged = [base]
                for j, other in enumerate(bodies):
                    if j == i:
                        continue
                    inside = _restrict(other, subset, True)
                    outside = _restrict(other, subset, False)
                    if cond(base, inside, outside):
                        merged.append(inside)
                extra.append(prefix(a, sum_terms(*merged)))
    return sum_terms(p, *extra)


def _subsets(items: frozenset[str]):
    items = sorted(items)
    for mask in range(1 << len(items)):
        yield frozenset(a for i, a in enumerate(items) if mask >> i & 1)


def tehnf(observer: str, z: str, p: CanonicalTerm, cap: int = 20000) -> CanonicalTerm:
    """Totally expanded head normal form: merges arbitrary decompositions of
    sibling summands, with the condition read through the given observer
    (I or T).  Combinatorial; guarded by a summand cap."""
    if observer not in ("I", "T"):
        raise ValueError("tehnf supports the I and T observers")
    key = "M_" + ("" if observer == "I" else "T-") + z
    cond = CONDITIONS[key]
    groups: dict[str, list[CanonicalTerm]] = {}
    for a, body in p.summands:
        groups.setdefault(a, []).append(body)
    extra = []
    for a, bodies in groups.items():
        for base in bodies:
            merged_options: list[list[CanonicalTerm]] = [[]]
            for other in bodies:
                choices = [None]
                for kept in _summand_splits(other):
                    inside, outside = kept
                    if cond(base, inside, outside):
                        choices.append(inside)
                merged_options = [
                    opt + ([c] if c is not None else []) for opt in merged_options for c in choices
                ]
                if len(merged_options) > cap:
                    raise TruncationError(
                        f"tehnf expansion exceeds {cap} candidate summands", cap
                    )
            for opt in merged_options:
                extra.append(prefix(a, sum_terms(base, *opt)))
    return sum_terms(p, *extra)


def _summand_splits(t: CanonicalTerm):
    summands = t.summands
    for mask in range(1 << len(summands)):
        inside = tuple(s for i, s in enumerate(summands) if mask >> i & 1)
        outside = tuple(s for i, s in enumerate(summands) if not mask >> i & 1)
        yield CanonicalTerm(inside), CanonicalTerm(outside)


@dataclass
class HnfLawReport:
    z: str
    equivalence_failures: list = field(default_factory=list)
    matching_failures: list = field(default_factory=list)
    terms_checked: int = 0
    pairs_checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.equivalence_failures and not self.matching_failures


def verify_hnf_laws(z: str, pool: Sequence[CanonicalTerm], pairs=None) -> HnfLawReport:
    """Check that hnf is a Z-equivalent saturation and that related pairs
    match summand-wise through the head normal form of the larger side."""
    from . import preorders

    sem = SemanticsId("I", _HNF_SEMANTICS[z])
    report = HnfLawReport(z=z)
    for p in pool:
        h = hnf(z, p)
        if not (preorders.decide(sem, h, p).holds and preorders.decide(sem, p, h).holds):
            report.equivalence_failures.append(p)
        report.terms_checked += 1
    if pairs is None:
        pairs = [(p, q) for p in pool for q in pool]
    memo: dict[tuple, bool] = {}

    def below(x, y) -> bool:
        key = (x, y)
        hit = memo.get(key)
        if hit is None:
            hit = memo[key] = preorders.linear_holds(sem.constraint, sem.flavor, x, y)
        return hit

    hnf_index: dict[CanonicalTerm, dict[str, list[CanonicalTerm]]] = {}
    for p, q in pairs:
        if not below(p, q):
            continue
        report.pairs_checked += 1
        index = hnf_index.get(q)
        if index is None:
            index = hnf_index[q] = {}
            for a, body in hnf(z, q).summands:
                index.setdefault(a, []).append(body)
        for a, derivative in p.summands:
            if not any(below(derivative, candidate) for candidate in index.get(a, ())):
                report.matching_failures.append((p, q, a, derivative))
    return report


# ---------------------------------------------------------------------------
# Derivation reconstruction (the completeness recipe, replayed and checked)


@dataclass
class Derivation:
    z: str
    goal: tuple[CanonicalTerm, CanonicalTerm]
    steps: list = field(default_factory=list)

    def record(self, rule: str, detail: dict) -> None:
        self.steps.append({"rule": rule, **detail})


def derive_leq(z: str, p: CanonicalTerm, q: CanonicalTerm) -> Derivation:
    """Reconstruct a proof of p <= q from {choice axioms, simulation axiom,
    reduction axiom} by recursing through the head normal form of q.

    Follows the structural-induction completeness recipe; every simulation
    step's side condition (equal offers) is checked during replay.  Raises
    if the relation does not hold.
    """
    from . import preorders

    sem = SemanticsId("I", _HNF_SEMANTICS[z])
    if not preorders.decide(sem, p, q).holds:
        raise ValueError(f"{render_term(p)} is not below {render_term(q)} in {sem}")
    derivation = Derivation(z=z, goal=(p, q))
    _derive(z, sem, p, q, derivation)
    return derivation


def _derive(z, sem, p, q, derivation) -> None:
    from . import preorders

    if p.is_nil:
        if not q.is_nil:
            raise AssertionError("nil is only below nil in the ready-simulation layers")
        derivation.record("refl", {"term": p})
        return
    h = hnf(z, q)
    derivation.record("hnf-saturate", {"from": q, "to": h, "z": z})
    by_action: dict[str, list[CanonicalTerm]] = {}
    for a, body in h.summands:
        by_action.setdefault(a, []).append(body)
    chosen = []
    for a, derivative in p.summands:
        match = None
        for candidate in by_action.get(a, ()):
            if preorders.decide(sem, derivative, candidate).holds:
                match = candidate
                break
        if match is None:
            raise AssertionError("summand matching failed; completeness recipe broken")
        _derive(z, sem, derivative, match, derivation)
        derivation.record("prefix", {"action": a, "from": derivative, "to": match})
        chosen.append((a, match))
    target = sum_terms(*[prefix(a, body) for a, body in chosen])
    if initials(p) != initials(h):
        raise AssertionError("simulation axiom side condition violated")
    derivation.record(
        "sum+RS",
        {"from": p, "via": target, "to": h, "side_condition": "I(p)=I(hnf(q))"},
    )
    derivation.record("hnf-below", {"from": h, "to": q})
