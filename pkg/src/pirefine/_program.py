"""Compile sentences into flat opcode programs for the evaluation kernels.

A program is a list of ``(op, a, b)`` triples flattened into one int list.
Nodes are hash-consed, so shared subterms are evaluated once, and every
node's children precede it.  A sentence becomes a pair of node indices that
must evaluate equal: formulas pair with the ``top`` node, equations pair
their two sides.
"""

from __future__ import annotations

from .syntax import RejectedInput, Sentence, Term, Var

OP_VAR, OP_TOP, OP_BOT, OP_NOT, OP_AND, OP_OR, OP_IMP, OP_BOX, OP_DIA = range(9)

_OPS = {
    "top": (OP_TOP, 0),
    "bot": (OP_BOT, 0),
    "~": (OP_NOT, 1),
    "/\\": (OP_AND, 2),
    "\\/": (OP_OR, 2),
    "->": (OP_IMP, 2),
    "box": (OP_BOX, 1),
    "dia": (OP_DIA, 1),
}


class Program:
    def __init__(self, atoms):
        self.atoms = tuple(atoms)
        self.atom_index = {a: i for i, a in enumerate(self.atoms)}
        self.code: list = []
        self._nodes: dict = {}
        self.modal: list = []  # node indices of box/dia nodes, in creation order
        self.top = self._emit(("top",), OP_TOP, 0, 0)

    def __len__(self) -> int:
        return len(self.code) // 3

    def _emit(self, key, op, a, b) -> int:
        idx = self._nodes.get(key)
        if idx is None:
            idx = len(self.code) // 3
            self.code.extend((op, a, b))
            self._nodes[key] = idx
            if op in (OP_BOX, OP_DIA):
                self.modal.append(idx)
        return idx

    def node(self, t: Term) -> int:
        if isinstance(t, Var):
            try:
                a = self.atom_index[t.name]
            except KeyError:
                raise RejectedInput(f"variable {t.name!r} not declared to the program") from None
            return self._emit(("var", a), OP_VAR, a, 0)
        try:
            op, arity = _OPS[t.op]
        except KeyError:
            raise RejectedInput(f"no semantics for connective {t.op!r}") from None
        if arity != len(t.args):
            raise RejectedInput(f"connective {t.op!r} used with {len(t.args)} arguments")
        kids = [self.node(x) for x in t.args]
        a = kids[0] if kids else 0
        b = kids[1] if len(kids) > 1 else 0
        return self._emit((op, a, b), op, a, b)

    def pair(self, s: Sentence) -> tuple:
        if s.dimension == 1:
            return (self.node(s.components[0]), self.top)
        if s.dimension == 2:
            return (self.node(s.components[0]), self.node(s.components[1]))
        raise RejectedInput(f"no semantics for {s.dimension}-dimensional sentences")

    def body(self, modal_node: int) -> int:
        return self.code[3 * modal_node + 1]

    def is_modal_op(self, modal_node: int) -> int:
        return self.code[3 * modal_node]

    def abstracted(self) -> list:
        """Code with every box/dia node replaced by a fresh variable.

        Modal node ``modal[i]`` reads variable ``len(atoms) + i``.
        """
        code = list(self.code)
        base = len(self.atoms)
        for i, idx in enumerate(self.modal):
            code[3 * idx : 3 * idx + 3] = [OP_VAR, base + i, 0]
        return code


def flat_pairs(pairs) -> list:
    out: list = []
    for a, b in pairs:
        out.extend((a, b))
    return out
