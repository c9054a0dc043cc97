"""Identifiers for the points of the extended spectrum.

A semantics is a (constraint, flavor) pair.  Flavors:

* ``bisim``      - bisimilarity (constraint-independent)
* ``b``          - constrained simulation (the branching backbone)
* ``db``         - deterministic-branching (possible-worlds style)
* ``bf``/``bf⊇`` - final-ready / final-failure branching (constraint I only)
* ``l``/``l⊇``/``lf``/``lf⊇`` - the linear diamond (ready-trace, failure-trace,
  readiness, failures when the constraint is I)
* ``l⊆``/``lf⊆`` - partial offer traces / partial offers
* ``join``/``meet`` - lattice completion of the diamond (revivals = meet at I)
* ``ER``/``ERT``/``ECR``/``ECRT`` - the extended-ready family

Classic one-word names (F, RT, PW, RV, ...) are accepted everywhere; so is
the generic ``N:flavor`` syntax with ASCII fallbacks for the set symbols.
"""

from __future__ import annotations

from dataclasses import dataclass

__all__ = [
    "SemanticsId",
    "parse_semantics",
    "supported_ids",
    "classic_name",
    "CLASSIC_NAMES",
    "SPECTRUM_ARROWS",
    "UnsupportedSemanticsError",
]

LINEAR_FLAVORS = ("l", "l⊇", "lf", "lf⊇", "l⊆", "lf⊆", "join", "meet")
ALL_FLAVORS = ("bisim", "b", "db", "bf", "bf⊇") + LINEAR_FLAVORS + ("ER", "ERT", "ECR", "ECRT")

_ASCII_FLAVOR = {
    "l>=": "l⊇",
    "lf>=": "lf⊇",
    "l<=": "l⊆",
    "lf<=": "lf⊆",
    "bf>=": "bf⊇",
}


class UnsupportedSemanticsError(ValueError):
    def __init__(self, message: str):
        super().__init__(message + f"; supported ids: {', '.join(sorted(CLASSIC_NAMES))} or N:flavor")


@dataclass(frozen=True, slots=True)
class SemanticsId:
    constraint: str
    flavor: str

    def __post_init__(self):
        if self.flavor not in ALL_FLAVORS:
            raise UnsupportedSemanticsError(f"unknown flavor {self.flavor!r}")
        if self.flavor == "bisim":
            if self.constraint != "B":
                raise UnsupportedSemanticsError("bisimilarity takes no constraint")
            return
        if self.constraint not in ("U", "C", "I", "T", "S"):
            raise UnsupportedSemanticsError(f"unknown constraint {self.constraint!r}")
        if self.flavor in ("bf", "bf⊇") and self.constraint != "I":
            raise UnsupportedSemanticsError("final-ready/final-failure branching exist only at constraint I")
        if self.flavor in ("ER", "ERT") and self.constraint != "U":
            raise UnsupportedSemanticsError("extended ready semantics live at constraint U")
        if self.flavor in ("ECR", "ECRT") and self.constraint != "C":
            raise UnsupportedSemanticsError("extended complete ready semantics live at constraint C")
        if self.flavor == "meet" and self.constraint == "S":
            raise UnsupportedSemanticsError(
                "no meet at constraint S: the union of simulation classes is not a class"
            )

    def __str__(self) -> str:
        name = classic_name(self)
        return name if name else f"{self.constraint}:{self.flavor}"


BISIM = SemanticsId("B", "bisim")

# Classic names from the literature for points of the spectrum.
CLASSIC_NAMES: dict[str, SemanticsId] = {
    "B": BISIM,
    "S": SemanticsId("U", "b"),
    "CS": SemanticsId("C", "b"),
    "RS": SemanticsId("I", "b"),
    "TS": SemanticsId("T", "b"),
    "2S": SemanticsId("S", "b"),
    "T": SemanticsId("U", "l"),
    "CT": SemanticsId("C", "l"),
    "RT": SemanticsId("I", "l"),
    "FT": SemanticsId("I", "l⊇"),
    "R": SemanticsId("I", "lf"),
    "F": SemanticsId("I", "lf⊇"),
    "PW": SemanticsId("I", "db"),
    "UPW": SemanticsId("U", "db"),
    "PF": SemanticsId("T", "lf"),
    "IF": SemanticsId("T", "lf⊇"),
    "PFT": SemanticsId("T", "l"),
    "IFT": SemanticsId("T", "l⊇"),
    "SF": SemanticsId("S", "lf⊇"),
    "RV": SemanticsId("I", "meet"),
    "JOIN": SemanticsId("I", "join"),
    "ER": SemanticsId("U", "ER"),
    "ERT": SemanticsId("U", "ERT"),
    "ECR": SemanticsId("C", "ECR"),
    "ECRT": SemanticsId("C", "ECRT"),
}

_BY_ID = {v: k for k, v in reversed(list(CLASSIC_NAMES.items()))}


def classic_name(sem: SemanticsId) -> str | None:
    return _BY_ID.get(sem)


def parse_semantics(text: str) -> SemanticsId:
    token = text.strip()
    if token in CLASSIC_NAMES:
        return CLASSIC_NAMES[token]
    if ":" in token:
        constraint, flavor = token.split(":", 1)
        flavor = _ASCII_FLAVOR.get(flavor, flavor)
        return SemanticsId(constraint.strip(), flavor.strip())
    raise UnsupportedSemanticsError(f"unknown semantics {text!r}")


def supported_ids() -> tuple[SemanticsId, ...]:
    """Every decidable point of the spectrum, deterministic order."""
    out = [BISIM]
    for n in ("S", "T", "I", "C", "U"):
        out.append(SemanticsId(n, "b"))
        out.append(SemanticsId(n, "db"))
        if n == "I":
            out.append(SemanticsId("I", "bf"))
            out.append(SemanticsId("I", "bf⊇"))
        for flavor in LINEAR_FLAVORS:
            if flavor == "meet" and n == "S":
                continue
            out.append(SemanticsId(n, flavor))
    out += [
        SemanticsId("U", "ER"),
        SemanticsId("U", "ERT"),
        SemanticsId("C", "ECR"),
        SemanticsId("C", "ECRT"),
    ]
    return tuple(out)


def _arrows() -> tuple[tuple[SemanticsId, SemanticsId], ...]:
    """Finer -> coarser edges of the extended spectrum plus the real diamond.

    Layer order by constraint fineness: S, T, I, C, U.  Within a layer:
    b -> db -> l -> {l⊇, lf} -> lf⊇, refined at I by the join/meet diamond
    RT -> join -> {FT, R} -> meet -> F.
    """
    edges: list[tuple[SemanticsId, SemanticsId]] = []

    def sid(n, f):
        return SemanticsId(n, f)

    layers = ("S", "T", "I", "C", "U")
    for n in layers:
        edges.append((BISIM, sid(n, "b")) if n == "S" else (sid(layers[layers.index(n) - 1], "b"), sid(n, "b")))
    for n in layers:
        edges.append((sid(n, "b"), sid(n, "db")))
        edges.append((sid(n, "db"), sid(n, "l")))
        edges.append((sid(n, "l"), sid(n, "l⊇")))
        edges.append((sid(n, "l"), sid(n, "lf")))
        edges.append((sid(n, "l⊇"), sid(n, "lf⊇")))
        edges.append((sid(n, "lf"), sid(n, "lf⊇")))
        if n != "S":
            edges.append((sid(n, "l"), sid(n, "join")))
            edges.append((sid(n, "join"), sid(n, "l⊇")))
            edges.append((sid(n, "join"), sid(n, "lf")))
            edges.append((sid(n, "l⊇"), sid(n, "meet")))
            edges.append((sid(n, "lf"), sid(n, "meet")))
            edges.append((sid(n, "meet"), sid(n, "lf⊇")))
    # Vertical arrows between consecutive layers, flavor by flavor.
    for upper, lower in zip(layers, layers[1:]):
        for flavor in ("db", "l", "l⊇", "lf", "lf⊇"):
            edges.append((sid(upper, flavor), sid(lower, flavor)))
    return tuple(dict.fromkeys(edges))


SPECTRUM_ARROWS = _arrows()
