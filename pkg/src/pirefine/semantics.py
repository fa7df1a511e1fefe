"""Witness structures and a direct recursive evaluator.

The evaluator walks term trees and never touches the compiled kernels, so
replaying a witness through it is an independent check of the kernels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .syntax import RejectedInput, Sentence, Term, Var


@dataclass(frozen=True)
class Valuation:
    values: tuple  # ((atom, bool), ...) in signature pool order

    @classmethod
    def of(cls, mapping: Mapping[str, bool], order: Iterable[str] | None = None) -> "Valuation":
        keys = list(order) if order is not None else sorted(mapping)
        return cls(tuple((k, bool(mapping[k])) for k in keys if k in mapping))

    def as_dict(self) -> dict:
        return dict(self.values)

    def __getitem__(self, atom: str) -> bool:
        return self.as_dict()[atom]

    def __str__(self) -> str:
        return ", ".join(f"{a}={int(b)}" for a, b in self.values)

    def to_json(self) -> dict:
        return {"valuation": {a: int(b) for a, b in self.values}}


@dataclass(frozen=True)
class KripkeModel:
    """Finite Kripke model; worlds are ``0..n-1``."""

    n_worlds: int
    relation: frozenset  # {(i, j)}: world i sees world j
    true_atoms: tuple  # per world, frozenset of atoms true there
    universal: bool = False

    def __post_init__(self):
        if self.n_worlds < 1:
            raise RejectedInput("a Kripke model needs at least one world")
        if len(self.true_atoms) != self.n_worlds:
            raise RejectedInput("valuation must cover every world")
        if self.universal and self.relation != frozenset(
            (i, j) for i in range(self.n_worlds) for j in range(self.n_worlds)
        ):
            raise RejectedInput("a universal model must relate every pair of worlds")

    @classmethod
    def make_universal(cls, true_atoms) -> "KripkeModel":
        n = len(true_atoms)
        rel = frozenset((i, j) for i in range(n) for j in range(n))
        return cls(n, rel, tuple(frozenset(a) for a in true_atoms), True)

    def successors(self, w: int) -> list:
        return [j for (i, j) in sorted(self.relation) if i == w]

    def __str__(self) -> str:
        rel = "universal" if self.universal else ", ".join(f"w{i}Rw{j}" for i, j in sorted(self.relation)) or "no edges"
        val = "; ".join(f"w{w}: {{{', '.join(sorted(a))}}}" for w, a in enumerate(self.true_atoms))
        return f"{self.n_worlds} world(s), {rel}, {val}"

    def to_json(self) -> dict:
        return {
            "worlds": self.n_worlds,
            "universal": self.universal,
            "relation": [list(p) for p in sorted(self.relation)],
            "true_atoms": {f"w{w}": sorted(a) for w, a in enumerate(self.true_atoms)},
        }


def eval_prop(t: Term, val: Mapping[str, bool]) -> bool:
    if isinstance(t, Var):
        return bool(val[t.name])
    op, args = t.op, t.args
    if op == "top":
        return True
    if op == "bot":
        return False
    if op == "~":
        return not eval_prop(args[0], val)
    if op == "/\\":
        return eval_prop(args[0], val) and eval_prop(args[1], val)
    if op == "\\/":
        return eval_prop(args[0], val) or eval_prop(args[1], val)
    if op == "->":
        return (not eval_prop(args[0], val)) or eval_prop(args[1], val)
    raise RejectedInput(f"no propositional semantics for {op!r}")


def prop_holds(s: Sentence, val: Mapping[str, bool]) -> bool:
    """Formulas hold when true; equations when both sides agree."""
    if s.dimension == 1:
        return eval_prop(s.components[0], val)
    if s.dimension == 2:
        return eval_prop(s.components[0], val) == eval_prop(s.components[1], val)
    raise RejectedInput(f"no semantics for {s.dimension}-dimensional sentences")


def eval_world(t: Term, model: KripkeModel, w: int) -> bool:
    if isinstance(t, Var):
        return t.name in model.true_atoms[w]
    op, args = t.op, t.args
    if op == "box":
        return all(eval_world(args[0], model, v) for v in model.successors(w))
    if op == "dia":
        return any(eval_world(args[0], model, v) for v in model.successors(w))
    if op == "top":
        return True
    if op == "bot":
        return False
    if op == "~":
        return not eval_world(args[0], model, w)
    if op == "/\\":
        return eval_world(args[0], model, w) and eval_world(args[1], model, w)
    if op == "\\/":
        return eval_world(args[0], model, w) or eval_world(args[1], model, w)
    if op == "->":
        return (not eval_world(args[0], model, w)) or eval_world(args[1], model, w)
    raise RejectedInput(f"no modal semantics for {op!r}")


def globally_true(s: Sentence, model: KripkeModel) -> bool:
    if s.dimension != 1:
        raise RejectedInput("modal sentences are 1-dimensional")
    return all(eval_world(s.components[0], model, w) for w in range(model.n_worlds))
