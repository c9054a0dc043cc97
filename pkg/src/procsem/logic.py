"""Modal formulas, satisfaction, sublogic grammars and distinguishing formulas.

Formulas are Hennessy-Milner style with finite conjunction: top, conjunction,
negation and action diamonds.  Each point of the spectrum owns a grammar; a
preorder holds between two terms exactly when every grammar formula satisfied
by the left one is satisfied by the right one.  When a decision procedure
refutes a preorder, the refutation witness is converted into a formula of the
corresponding grammar, giving an independently checkable certificate.

Grammar anatomy: each constraint N has a small base logic (what a single
state shows), and the flavors assemble chains or trees whose per-state
conjuncts come from the base logic's symmetric closure (exact pins), negative
closure (upper bounds) or positive closure (lower bounds).
"""

from __future__ import annotations

import random
from functools import lru_cache
from itertools import product

from .lts import initials, step, traces
from .observations import BranchingObs, LinearObs
from .preorders import nsim_holds, sim_leq
from .spectrum import SemanticsId, UnsupportedSemanticsError, parse_semantics
from .terms import ACTION_RE, CanonicalTerm

__all__ = [
    "Formula",
    "TOP",
    "Conj",
    "Neg",
    "Diamond",
    "conj",
    "parse_formula",
    "render_formula",
    "formula_actions",
    "sat",
    "zero_formula",
    "not_zero",
    "chain",
    "base_constraint_logic",
    "BaseLogic",
    "in_sublogic",
    "formula_from_observation",
    "distinguish",
    "sample_formulas",
    "FORMULA_FLAVORS",
]


class Formula:
    """Interned formula tree; equality is identity."""

    __slots__ = ("_key", "_hash")
    _interned: dict[tuple, "Formula"] = {}

    @classmethod
    def _intern(cls, key, builder):
        hit = Formula._interned.get(key)
        if hit is not None:
            return hit
        obj = builder()
        obj._key = key
        obj._hash = hash(key)
        Formula._interned[key] = obj
        return obj

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other

    def __repr__(self):
        return render_formula(self)


class _Top(Formula):
    __slots__ = ()


def _make_top():
    return Formula._intern(("T",), lambda: object.__new__(_Top))


TOP: Formula = _make_top()


class Conj(Formula):
    __slots__ = ("members",)

    def __new__(cls, members):
        items = []
        stack = list(reversed(list(members)))
        while stack:
            m = stack.pop()
            if m is TOP:
                continue
            if isinstance(m, Conj):
                stack.extend(reversed(m.members))
            else:
                items.append(m)
        items = sorted(set(items), key=lambda f: f._key)
        if not items:
            return TOP
        if len(items) == 1:
            return items[0]
        key = ("&",) + tuple(f._key for f in items)

        def build():
            obj = object.__new__(Conj)
            obj.members = tuple(items)
            return obj

        return Formula._intern(key, build)


class Neg(Formula):
    __slots__ = ("body",)

    def __new__(cls, body):
        key = ("~", body._key)

        def build():
            obj = object.__new__(Neg)
            obj.body = body
            return obj

        return Formula._intern(key, build)


class Diamond(Formula):
    __slots__ = ("action", "body")

    def __new__(cls, action, body):
        key = ("<>", action, body._key)

        def build():
            obj = object.__new__(Diamond)
            obj.action = action
            obj.body = body
            return obj

        return Formula._intern(key, build)


def conj(*members) -> Formula:
    return Conj(members)


def chain(trace, tail: Formula = TOP) -> Formula:
    """Diamond chain <a1><a2>...tail."""
    out = tail
    for a in reversed(tuple(trace)):
        out = Diamond(a, out)
    return out


def zero_formula(alphabet) -> Formula:
    """Satisfied exactly by terminated states: no action is offered."""
    return Conj([Neg(Diamond(a, TOP)) for a in sorted(alphabet)])


def not_zero(alphabet) -> Formula:
    return Neg(zero_formula(alphabet))


def formula_actions(f: Formula) -> frozenset[str]:
    if isinstance(f, Diamond):
        return formula_actions(f.body) | {f.action}
    if isinstance(f, Neg):
        return formula_actions(f.body)
    if isinstance(f, Conj):
        out = frozenset()
        for m in f.members:
            out |= formula_actions(m)
        return out
    return frozenset()


# ---------------------------------------------------------------------------
# Parsing and printing.  Concrete syntax: T | ~F | <a>F | F & F | (F)


class FormulaParseError(ValueError):
    def __init__(self, message, offset):
        self.offset = offset
        super().__init__(f"{message} at offset {offset}")


def parse_formula(text: str) -> Formula:
    pos = [0]

    def skip():
        while pos[0] < len(text) and text[pos[0]].isspace():
            pos[0] += 1

    def parse_conj() -> Formula:
        items = [parse_unary()]
        while True:
            skip()
            if pos[0] < len(text) and text[pos[0]] == "&":
                pos[0] += 1
                items.append(parse_unary())
            else:
                return Conj(items)

    def parse_unary() -> Formula:
        skip()
        if pos[0] >= len(text):
            raise FormulaParseError("unexpected end of formula", pos[0])
        ch = text[pos[0]]
        if ch == "T":
            pos[0] += 1
            return TOP
        if ch == "~":
            pos[0] += 1
            return Neg(parse_unary())
        if ch == "<":
            pos[0] += 1
            m = ACTION_RE.match(text, pos[0])
            if not m:
                raise FormulaParseError("expected action name", pos[0])
            pos[0] = m.end()
            skip()
            if pos[0] >= len(text) or text[pos[0]] != ">":
                raise FormulaParseError("expected '>'", pos[0])
            pos[0] += 1
            return Diamond(m.group(), parse_unary())
        if ch == "(":
            pos[0] += 1
            inner = parse_conj()
            skip()
            if pos[0] >= len(text) or text[pos[0]] != ")":
                raise FormulaParseError("unbalanced parenthesis", pos[0])
            pos[0] += 1
            return inner
        raise FormulaParseError(f"unexpected {ch!r}", pos[0])

    out = parse_conj()
    skip()
    if pos[0] < len(text):
        raise FormulaParseError(f"unexpected {text[pos[0]]!r}", pos[0])
    return out


def render_formula(f: Formula) -> str:
    if f is TOP:
        return "T"
    if isinstance(f, Neg):
        body = render_formula(f.body)
        if isinstance(f.body, Conj):
            return f"~({body})"
        return f"~{body}"
    if isinstance(f, Diamond):
        body = render_formula(f.body)
        if isinstance(f.body, Conj):
            return f"<{f.action}>({body})"
        return f"<{f.action}>{body}"
    if isinstance(f, Conj):
        return " & ".join(render_formula(m) for m in f.members)
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Satisfaction


@lru_cache(maxsize=None)
def sat(p: CanonicalTerm, f: Formula) -> bool:
    if f is TOP:
        return True
    if isinstance(f, Conj):
        return all(sat(p, m) for m in f.members)
    if isinstance(f, Neg):
        return not sat(p, f.body)
    if isinstance(f, Diamond):
        return any(a == f.action and sat(q, f.body) for a, q in step(p))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Base constraint logics and their closures


class BaseLogic:
    """The formulas a single state can be probed with under constraint N."""

    def __init__(self, constraint: str, alphabet: frozenset[str]):
        self.constraint = constraint
        self.alphabet = frozenset(alphabet)

    def contains(self, f: Formula) -> bool:
        n = self.constraint
        if f is TOP:
            return True
        if n == "U":
            return False
        if f is not_zero(self.alphabet):
            return True
        if n == "C":
            return False
        if n == "I":
            return isinstance(f, Diamond) and f.body is TOP and f.action in self.alphabet
        if n == "T":
            return self._is_chain(f)
        if n == "S":
            return self._is_positive(f)
        raise ValueError(f"unknown constraint {n!r}")

    def _is_chain(self, f: Formula) -> bool:
        while isinstance(f, Diamond):
            f = f.body
        return f is TOP

    def _is_positive(self, f: Formula) -> bool:
        if f is TOP:
            return True
        if isinstance(f, Conj):
            return all(self._is_positive(m) for m in f.members)
        if isinstance(f, Diamond):
            return self._is_positive(f.body)
        return False

    def enumerate(self, max_depth: int):
        """All base formulas of modal depth <= max_depth (finite for each N)."""
        n = self.constraint
        out = [TOP]
        if n == "U":
            return out
        out.append(not_zero(self.alphabet))
        if n == "C":
            return out
        if n == "I":
            out.extend(Diamond(a, TOP) for a in sorted(self.alphabet))
            return out
        if n == "T":
            for length in range(1, max_depth + 1):
                for tr in product(sorted(self.alphabet), repeat=length):
                    out.append(chain(tr))
            return out
        # S: positive formulas, grown by depth with a crude size cap.
        layer = [TOP]
        seen = {TOP}
        for _ in range(max_depth):
            new = []
            for a in sorted(self.alphabet):
                for f in layer:
                    new.append(Diamond(a, f))
            pool = layer + new
            for x, y in product(pool, repeat=2):
                c = conj(x, y)
                if c not in seen:
                    new.append(c)
            layer = []
            for f in new:
                if f not in seen:
                    seen.add(f)
                    layer.append(f)
            out.extend(layer)
            if len(out) > 400:
                break
        return out


@lru_cache(maxsize=None)
def base_constraint_logic(constraint: str, alphabet: frozenset) -> BaseLogic:
    return BaseLogic(constraint, alphabet)


def _leaf_mode(logic: BaseLogic, f: Formula, mode: str) -> bool:
    """Is f a legitimate closure leaf?  mode: sym (s or ~s), neg (~s), pos (s)."""
    if mode in ("sym", "pos") and logic.contains(f):
        return True
    if mode in ("sym", "neg") and isinstance(f, Neg) and logic.contains(f.body):
        return True
    return False


def _flatten(f: Formula):
    if f is TOP:
        return []
    if isinstance(f, Conj):
        out = []
        for m in f.members:
            out.extend(_flatten(m))
        return out
    return [f]


def _in_closure(logic: BaseLogic, f: Formula, mode: str) -> bool:
    return all(_leaf_mode(logic, m, mode) for m in _flatten(f))


# ---------------------------------------------------------------------------
# Sublogic membership

FORMULA_FLAVORS = ("bisim", "b", "db", "l", "l⊇", "lf", "lf⊇", "l⊆", "lf⊆", "join", "meet")

_MODE = {"l": "sym", "l⊇": "neg", "l⊆": "pos", "lf": "sym", "lf⊇": "neg", "lf⊆": "pos"}


def in_sublogic(f: Formula, sem: SemanticsId | str, alphabet=None) -> bool:
    """Structural membership of f in the grammar characterizing sem."""
    if isinstance(sem, str):
        sem = parse_semantics(sem)
    if alphabet is None:
        alphabet = formula_actions(f)
    logic = base_constraint_logic(sem.constraint if sem.flavor != "bisim" else "U", frozenset(alphabet))
    flavor = sem.flavor
    if flavor == "bisim":
        return True
    if flavor in ("bf", "bf⊇", "ER", "ERT", "ECR", "ECRT"):
        raise UnsupportedSemanticsError(f"{sem} has no logical characterization")
    if flavor == "b":
        return _in_branching(logic, f)
    if flavor == "db":
        return _in_det_branching(logic, f)
    if flavor == "join":
        return _in_linear(logic, f, "neg", everywhere=True) or _in_linear(
            logic, f, "sym", everywhere=False
        )
    if flavor == "meet":
        return _in_meet(logic, f)
    mode = _MODE[flavor]
    everywhere = flavor in ("l", "l⊇", "l⊆")
    return _in_linear(logic, f, mode, everywhere)


def _in_branching(logic: BaseLogic, f: Formula) -> bool:
    if _leaf_mode(logic, f, "sym"):
        return True
    if isinstance(f, Diamond):
        return _in_branching(logic, f.body)
    if isinstance(f, Conj):
        return all(_in_branching(logic, m) for m in f.members)
    return f is TOP


def _split_parts(logic: BaseLogic, f: Formula, mode: str):
    """Partition a flattened conjunction into closure leaves and continuations.

    Base formulas may syntactically be diamonds (an offer probe, a trace
    probe); those count as leaves, everything else must be a diamond
    continuation.  Returns None when some member is neither.
    """
    leaves, continuations = [], []
    for m in _flatten(f):
        if _leaf_mode(logic, m, mode):
            leaves.append(m)
        elif isinstance(m, Diamond):
            continuations.append(m)
        else:
            return None
    return leaves, continuations


def _in_det_branching(logic: BaseLogic, f: Formula) -> bool:
    split = _split_parts(logic, f, "sym")
    if split is None:
        return False
    _, continuations = split
    actions = [d.action for d in continuations]
    if len(actions) != len(set(actions)):
        return False
    return all(_in_det_branching(logic, d.body) for d in continuations)


def _in_linear(logic: BaseLogic, f: Formula, mode: str, everywhere: bool) -> bool:
    split = _split_parts(logic, f, mode)
    if split is None:
        return False
    leaves, continuations = split
    if len(continuations) > 1:
        return False
    if not continuations:
        return True
    if leaves and not everywhere:
        return False
    return _in_linear(logic, continuations[0].body, mode, everywhere)


def _in_meet(logic: BaseLogic, f: Formula) -> bool:
    """Meet grammar: diamond chains ending in one offered action plus a
    refused set (a revival); pure failure finals are the degenerate case."""
    parts = _flatten(f)
    positives = negatives = others = 0
    for m in parts:
        if logic.contains(m):
            positives += 1
        elif isinstance(m, Neg) and logic.contains(m.body):
            negatives += 1
        else:
            others += 1
    if others == 0 and positives <= 1:
        return True
    if len(parts) == 1 and isinstance(parts[0], Diamond):
        return _in_meet(logic, parts[0].body)
    return False


# ---------------------------------------------------------------------------
# Pinning local observations with formulas
#
# mode "eq"  : satisfied exactly by states whose observation equals the label
# mode "neg" : upper bound - states whose observation lies below the label
# mode "pos" : lower bound - states whose observation lies above the label
# For constraint C the orders collapse to equality and the negative closure
# cannot express "not terminated", nor the positive one "terminated"; the
# unrealizable cases raise and their callers take the trace-difference route.


class UnrealizablePinError(ValueError):
    pass


def characteristic_sim_formula(p: CanonicalTerm) -> Formula:
    """Positive formula satisfied by exactly the states that simulate p."""
    return conj(*[Diamond(a, characteristic_sim_formula(q)) for a, q in step(p)])


def _pin(constraint: str, label, alphabet, mode: str, context=()) -> Formula:
    value = label.value
    if constraint == "U":
        return TOP
    if constraint == "C":
        if value:  # terminated
            if mode == "pos":
                raise UnrealizablePinError("positive closure of the termination logic cannot pin 0")
            return Neg(not_zero(alphabet))
        if mode == "eq" or mode == "pos":
            return not_zero(alphabet)
        raise UnrealizablePinError("negative closure of the termination logic cannot pin ~0")
    if constraint == "I":
        offered = [Diamond(a, TOP) for a in sorted(value)]
        refused = [Neg(Diamond(a, TOP)) for a in sorted(set(alphabet) - value)]
        if mode == "eq":
            return conj(*(offered + refused))
        if mode == "neg":
            return conj(*refused)
        return conj(*offered)
    if constraint == "T":
        positives = [chain(tr) for tr in sorted(value) if tr]
        negatives = [
            Neg(chain(tr))
            for tr in _trace_complement(value, alphabet)
        ]
        if mode == "eq":
            return conj(*(positives + negatives))
        if mode == "neg":
            return conj(*negatives)
        return conj(*positives)
    if constraint == "S":
        positive = characteristic_sim_formula(value)
        if mode == "pos":
            return positive
        negatives = [
            Neg(characteristic_sim_formula(w))
            for w in sorted(context, key=lambda t: t.key)
            if not sim_leq(w, value)
        ]
        if mode == "neg":
            return conj(*negatives)
        return conj(positive, *negatives)
    raise ValueError(f"unknown constraint {constraint!r}")


def _trace_complement(trace_set, alphabet):
    """Traces outside the set, up to one step beyond its longest member.

    Enough to pin the prefix-closed set from above: the shortest missing
    trace of any larger prefix-closed set extends a member by one action.
    """
    horizon = max((len(t) for t in trace_set), default=0) + 1
    out = []
    for length in range(1, horizon + 1):
        for tr in product(sorted(alphabet), repeat=length):
            if tr not in trace_set:
                out.append(tr)
    return out


# ---------------------------------------------------------------------------
# Observation -> formula correspondence

_OBS_MODE = {
    "l": ("eq", "eq"),
    "l⊇": ("neg", "neg"),
    "lf": (None, "eq"),
    "lf⊇": (None, "neg"),
    "l⊆": ("pos", "pos"),
    "lf⊆": (None, "pos"),
    "join": ("neg", "eq"),
    "meet": (None, "neg"),
}


def formula_from_observation(obs, sem: SemanticsId | str, alphabet=None, context=()) -> Formula:
    """The grammar formula whose satisfaction set realizes the observation.

    For the branching, deterministic-branching and ready-trace-style flavors
    the formula holds in p exactly when the observation belongs to p's
    observation set; for the widened/forgetful flavors membership is in the
    corresponding closure of that set.  For constraint S a ``context`` of
    candidate states must be supplied; exactness is relative to it.
    """
    if isinstance(sem, str):
        sem = parse_semantics(sem)
    if sem.flavor in ("bf", "bf⊇", "ER", "ERT", "ECR", "ECRT", "bisim"):
        raise UnsupportedSemanticsError(f"{sem} has no observation-to-formula pathway")
    if alphabet is None:
        alphabet = _obs_alphabet(obs)
    alphabet = frozenset(alphabet)
    if sem.flavor in ("b", "db"):
        return _branching_formula(sem.constraint, obs, alphabet, context)
    mid_mode, final_mode = _OBS_MODE[sem.flavor]
    labels = obs.labels()
    steps = obs.steps
    out = _pin(sem.constraint, labels[-1], alphabet, final_mode, context)
    for i in range(len(steps) - 1, -1, -1):
        action = steps[i][0]
        out = Diamond(action, out)
        if mid_mode is not None:
            out = conj(_pin(sem.constraint, labels[i], alphabet, mid_mode, context), out)
    return out


def _obs_alphabet(obs):
    out = set()
    if isinstance(obs, LinearObs):
        for a, _ in obs.steps:
            out.add(a)
        for l in obs.labels():
            out.update(_label_actions(l))
    else:
        stack = [obs]
        while stack:
            node = stack.pop()
            out.update(_label_actions(node.label))
            for a, c in node.children:
                out.add(a)
                stack.append(c)
    return frozenset(out)


def _label_actions(label):
    if label.constraint == "I":
        return set(label.value)
    if label.constraint == "T":
        return {a for tr in label.value for a in tr}
    return set()


def _branching_formula(constraint, obs: BranchingObs, alphabet, context) -> Formula:
    parts = [_pin(constraint, obs.label, alphabet, "eq", context)]
    for a, child in obs.sorted_children():
        parts.append(Diamond(a, _branching_formula(constraint, child, alphabet, context)))
    return conj(*parts)


# ---------------------------------------------------------------------------
# Distinguishing formulas


def distinguish(sem: SemanticsId | str, p: CanonicalTerm, q: CanonicalTerm, alphabet=None):
    """None when p lies below q in sem; otherwise a grammar formula that p
    satisfies and q does not."""
    from . import preorders

    if isinstance(sem, str):
        sem = parse_semantics(sem)
    if sem.flavor in ("bf", "bf⊇", "ER", "ERT", "ECR", "ECRT"):
        raise UnsupportedSemanticsError(f"{sem} has no formula pathway")
    if sem.constraint == "C" and sem.flavor in ("l⊆", "lf⊆"):
        raise UnsupportedSemanticsError(
            "the positive closure of the termination logic cannot pin 0; "
            "no distinguishing formulas for partial offers at constraint C"
        )
    if alphabet is None:
        alphabet = _term_actions(p) | _term_actions(q)
    alphabet = frozenset(alphabet)

    if not preorders.decide(sem, p, q).holds:
        f = _build_separator(sem, p, q, alphabet)
        f = _minimize(f, sem, p, q, alphabet)
        assert sat(p, f) and not sat(q, f) and in_sublogic(f, sem, alphabet)
        return f
    return None


def _term_actions(p: CanonicalTerm) -> frozenset:
    out = set()
    for a, q in step(p):
        out.add(a)
        out |= _term_actions(q)
    return frozenset(out)


def _build_separator(sem, p, q, alphabet) -> Formula:
    from . import preorders

    flavor = sem.flavor
    if flavor == "bisim":
        return _distinguish_bisim(p, q)
    if flavor == "b":
        return _distinguish_nsim(sem.constraint, p, q, alphabet, _joint_context(p, q))
    if flavor == "db":
        verdict = preorders.decide_db(sem.constraint, p, q)
        obs = verdict.witness["unmatched"]
        return _branching_formula(sem.constraint, obs, alphabet, _joint_context(p, q))
    if sem.constraint == "C":
        return _distinguish_completed(p, q, alphabet)
    if flavor == "join":
        for part in ("l⊇", "lf"):
            if not preorders.decide_linear(sem.constraint, part, p, q).holds:
                return _build_separator(SemanticsId(sem.constraint, part), p, q, alphabet)
        raise AssertionError("join refuted but both components hold")
    verdict = (
        preorders.decide_linear(sem.constraint, flavor, p, q)
    )
    witness = verdict.witness
    obs = witness["unmatched"]
    context = _joint_context(p, q)
    if flavor == "meet" and witness.get("revival_action") is not None:
        return _revival_formula(sem.constraint, obs, witness["revival_action"], alphabet)
    return formula_from_observation(obs, sem, alphabet, context)


def _joint_context(p, q):
    from .lts import reachable

    return tuple(dict.fromkeys(reachable(p) + reachable(q)))


def _revival_formula(constraint, obs: LinearObs, element, alphabet) -> Formula:
    final = obs.final
    if constraint == "I":
        head = conj(
            Diamond(element, TOP),
            *[Neg(Diamond(a, TOP)) for a in sorted(set(alphabet) - final.value)],
        )
    elif constraint == "T":
        head = conj(
            chain(element),
            *[Neg(chain(tr)) for tr in _trace_complement(final.value, alphabet)],
        )
    else:
        raise UnsupportedSemanticsError(f"no revival formulas at constraint {constraint}")
    return chain(obs.trace(), head)


def _distinguish_bisim(p, q) -> Formula:
    for a, p2 in step(p):
        responses = [q2 for b, q2 in step(q) if b == a]
        if all(p2 is not q2 for q2 in responses):
            return Diamond(a, conj(*[_distinguish_bisim(p2, q2) for q2 in responses]))
    for a, q2 in step(q):
        responses = [p2 for b, p2 in step(p) if b == a]
        if all(q2 is not p2 for p2 in responses):
            return Neg(Diamond(a, conj(*[_distinguish_bisim(q2, p2) for p2 in responses])))
    raise AssertionError("bisimilar terms cannot be distinguished")


def _distinguish_plain_sim(p, q) -> Formula:
    """Positive formula with sat(p) and not sat(q); requires p not below q."""
    for a, p2 in step(p):
        responses = [q2 for b, q2 in step(q) if b == a]
        if all(not sim_leq(p2, q2) for q2 in responses):
            return Diamond(a, conj(*[_distinguish_plain_sim(p2, q2) for q2 in responses]))
    raise AssertionError("simulated term cannot be distinguished")


def _constraint_separator(constraint, p, q, alphabet) -> Formula:
    from .constraints import constraint_holds

    assert not constraint_holds(constraint, p, q)
    if constraint == "C":
        return Neg(not_zero(alphabet)) if p.is_nil else not_zero(alphabet)
    if constraint == "I":
        mine, theirs = initials(p), initials(q)
        extra = sorted(mine - theirs)
        if extra:
            return Diamond(extra[0], TOP)
        return Neg(Diamond(sorted(theirs - mine)[0], TOP))
    if constraint == "T":
        mine, theirs = traces(p), traces(q)
        extra = sorted(mine - theirs)
        if extra:
            return chain(extra[0])
        return Neg(chain(sorted(theirs - mine)[0]))
    if constraint == "S":
        if not sim_leq(p, q):
            return _distinguish_plain_sim(p, q)
        return Neg(_distinguish_plain_sim(q, p))
    raise AssertionError("the universal constraint never fails")


def _distinguish_nsim(constraint, p, q, alphabet, context) -> Formula:
    from .constraints import constraint_holds

    if not constraint_holds(constraint, p, q):
        return _constraint_separator(constraint, p, q, alphabet)
    for a, p2 in step(p):
        responses = [q2 for b, q2 in step(q) if b == a]
        if all(not nsim_holds(constraint, p2, q2) for q2 in responses):
            return Diamond(
                a,
                conj(*[_distinguish_nsim(constraint, p2, q2, alphabet, context) for q2 in responses]),
            )
    raise AssertionError("simulation holds; nothing to distinguish")


def _distinguish_completed(p, q, alphabet) -> Formula:
    """All linear flavors at constraint C coincide with completed traces."""
    from .lts import completed_traces

    trace_diff = sorted(traces(p) - traces(q), key=lambda t: (len(t), t))
    if trace_diff:
        return chain(trace_diff[0])
    ct_diff = sorted(completed_traces(p) - completed_traces(q), key=lambda t: (len(t), t))
    if ct_diff:
        return chain(ct_diff[0], Neg(not_zero(alphabet)))
    raise AssertionError("completed-trace inclusion holds; nothing to distinguish")


def _conj_variants(f: Formula):
    """All formulas obtained by dropping exactly one conjunct somewhere."""
    if isinstance(f, Conj):
        members = f.members
        for i in range(len(members)):
            yield Conj(members[:i] + members[i + 1 :])
        for i, m in enumerate(members):
            for variant in _conj_variants(m):
                yield Conj(members[:i] + (variant,) + members[i + 1 :])
    elif isinstance(f, Neg):
        for variant in _conj_variants(f.body):
            yield Neg(variant)
    elif isinstance(f, Diamond):
        for variant in _conj_variants(f.body):
            yield Diamond(f.action, variant)


def _minimize(f: Formula, sem, p, q, alphabet) -> Formula:
    def good(g: Formula) -> bool:
        try:
            ok = in_sublogic(g, sem, alphabet)
        except UnsupportedSemanticsError:
            return False
        return ok and sat(p, g) and not sat(q, g)

    changed = True
    while changed:
        changed = False
        for variant in _conj_variants(f):
            if good(variant):
                f = variant
                changed = True
                break
    return f


# ---------------------------------------------------------------------------
# Random grammar sampling (property-test fuel)


def sample_formulas(sem: SemanticsId | str, alphabet, rng: random.Random, max_depth: int, count: int):
    if isinstance(sem, str):
        sem = parse_semantics(sem)
    alphabet = frozenset(alphabet)
    out = []
    for _ in range(count):
        out.append(_random_formula(sem, alphabet, rng, max_depth))
    return out


def _random_base(constraint, alphabet, rng, depth) -> Formula:
    actions = sorted(alphabet)
    if constraint == "U":
        return TOP
    if constraint == "C":
        return rng.choice([TOP, not_zero(alphabet)])
    if constraint == "I":
        return rng.choice([TOP, not_zero(alphabet)] + [Diamond(a, TOP) for a in actions])
    if constraint == "T":
        if rng.random() < 0.2:
            return rng.choice([TOP, not_zero(alphabet)])
        length = rng.randint(1, max(1, depth))
        return chain(rng.choices(actions, k=length))
    if constraint == "S":
        if depth <= 0 or rng.random() < 0.3:
            return TOP
        if rng.random() < 0.6:
            return Diamond(rng.choice(actions), _random_base("S", alphabet, rng, depth - 1))
        return conj(
            _random_base("S", alphabet, rng, depth - 1),
            _random_base("S", alphabet, rng, depth - 1),
        )
    raise ValueError(constraint)


def _random_leaf(constraint, alphabet, rng, depth, mode) -> Formula:
    base = _random_base(constraint, alphabet, rng, depth)
    if mode == "neg":
        return Neg(base)
    if mode == "sym":
        return Neg(base) if rng.random() < 0.5 else base
    return base


def _random_pin(constraint, alphabet, rng, depth, mode) -> Formula:
    leaves = [_random_leaf(constraint, alphabet, rng, depth, mode) for _ in range(rng.randint(0, 2))]
    return conj(*leaves)


def _random_formula(sem: SemanticsId, alphabet, rng, depth) -> Formula:
    flavor = sem.flavor
    n = sem.constraint if flavor != "bisim" else "U"
    actions = sorted(alphabet)
    if flavor == "bisim":
        return _random_hml(alphabet, rng, depth)
    if flavor == "b":
        return _random_branching(n, alphabet, rng, depth)
    if flavor == "db":
        return _random_det_branching(n, alphabet, rng, depth)
    if flavor == "join":
        inner = SemanticsId(n, "l⊇" if rng.random() < 0.5 else "lf")
        return _random_formula(inner, alphabet, rng, depth)
    if flavor == "meet":
        length = rng.randint(0, depth)
        positives = []
        if rng.random() < 0.7:
            positives.append(_random_base(n, alphabet, rng, depth))
        negatives = [
            Neg(_random_base(n, alphabet, rng, depth)) for _ in range(rng.randint(0, 2))
        ]
        return chain(rng.choices(actions, k=length), conj(*(positives + negatives)))
    mode = _MODE[flavor]
    everywhere = flavor in ("l", "l⊇", "l⊆")
    length = rng.randint(0, depth)
    out = _random_pin(n, alphabet, rng, depth, mode)
    for _ in range(length):
        out = Diamond(rng.choice(actions), out)
        if everywhere and rng.random() < 0.6:
            out = conj(_random_pin(n, alphabet, rng, depth, mode), out)
    return out


def _random_hml(alphabet, rng, depth) -> Formula:
    if depth <= 0 or rng.random() < 0.25:
        return TOP
    roll = rng.random()
    if roll < 0.4:
        return Diamond(rng.choice(sorted(alphabet)), _random_hml(alphabet, rng, depth - 1))
    if roll < 0.65:
        return Neg(_random_hml(alphabet, rng, depth - 1))
    return conj(
        _random_hml(alphabet, rng, depth - 1), _random_hml(alphabet, rng, depth - 1)
    )


def _random_branching(n, alphabet, rng, depth) -> Formula:
    leaves = [_random_leaf(n, alphabet, rng, depth, "sym") for _ in range(rng.randint(0, 2))]
    if depth > 0:
        for _ in range(rng.randint(0, 2)):
            leaves.append(
                Diamond(rng.choice(sorted(alphabet)), _random_branching(n, alphabet, rng, depth - 1))
            )
    return conj(*leaves)


def _random_det_branching(n, alphabet, rng, depth) -> Formula:
    leaves = [_random_leaf(n, alphabet, rng, depth, "sym") for _ in range(rng.randint(0, 2))]
    if depth > 0:
        chosen = rng.sample(sorted(alphabet), rng.randint(0, len(alphabet)))
        for a in chosen:
            leaves.append(Diamond(a, _random_det_branching(n, alphabet, rng, depth - 1)))
    return conj(*leaves)
