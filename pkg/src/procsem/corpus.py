"""Regression corpus: frozen relation claims re-verified by the engine.

Rows are JSON lines {name, p, q, semantics, expect, note}.  expect is one of
leq / geq / eq / incomparable (both directions are decided) or holds / fails
(only p-against-q is decided; used where the reverse direction would blow the
observation-enumeration cap).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from .preorders import decide
from .spectrum import parse_semantics
from .terms import canonicalize, parse_term

__all__ = ["CorpusReport", "run_corpus", "default_corpus_path"]

_EXPECT = {"leq", "geq", "eq", "incomparable", "holds", "fails"}


@dataclass
class CorpusReport:
    rows: int = 0
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_json(self):
        return {"rows": self.rows, "mismatches": self.mismatches}


def default_corpus_lines() -> list[str]:
    data = resources.files("procsem").joinpath("data/corpus.jsonl").read_text()
    return [line for line in data.splitlines() if line.strip()]


def default_corpus_path() -> str:
    return str(resources.files("procsem").joinpath("data/corpus.jsonl"))


def run_corpus(lines=None) -> CorpusReport:
    if lines is None:
        lines = default_corpus_lines()
    report = CorpusReport()
    for line in lines:
        row = json.loads(line)
        if row["expect"] not in _EXPECT:
            raise ValueError(f"row {row.get('name')!r}: bad expect {row['expect']!r}")
        sem = parse_semantics(row["semantics"])
        p = canonicalize(parse_term(row["p"]))
        q = canonicalize(parse_term(row["q"]))
        if row["expect"] in ("holds", "fails"):
            got = "holds" if decide(sem, p, q).holds else "fails"
        else:
            below = decide(sem, p, q).holds
            above = decide(sem, q, p).holds
            got = {
                (True, True): "eq",
                (True, False): "leq",
                (False, True): "geq",
                (False, False): "incomparable",
            }[(below, above)]
        report.rows += 1
        if got != row["expect"]:
            report.mismatches.append(
                {"name": row["name"], "expected": row["expect"], "got": got}
            )
    return report
