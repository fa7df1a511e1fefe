"""Brute-force reference oracles, written independently of the package's evaluators and kernels."""

from itertools import product

from pirefine.syntax import App, Var


def ev(t, val):
    """Boolean value of a propositional term; also reused as the world-local part of Kripke evaluation."""
    if isinstance(t, Var):
        return val[t.name]
    a = [ev(x, val) for x in t.args]
    return {
        "top": lambda: True,
        "bot": lambda: False,
        "~": lambda: not a[0],
        "/\\": lambda: a[0] and a[1],
        "\\/": lambda: a[0] or a[1],
        "->": lambda: (not a[0]) or a[1],
    }[t.op]()


def sat(s, val):
    """A formula must be true; a k-tuple must have equal components."""
    vs = [ev(c, val) for c in s.components]
    if len(vs) == 1:
        return vs[0]
    return all(v == vs[0] for v in vs)


def atoms_of(sentences):
    out = set()

    def walk(t):
        if isinstance(t, Var):
            out.add(t.name)
        else:
            for x in t.args:
                walk(x)

    for s in sentences:
        for c in s.components:
            walk(c)
    return sorted(out)


def valuations(atoms):
    for bits in product((False, True), repeat=len(atoms)):
        yield dict(zip(atoms, bits))


def prop_entails(premises, conclusion):
    """True iff every valuation satisfying the premises satisfies the conclusion."""
    atoms = atoms_of(list(premises) + [conclusion])
    return all(sat(conclusion, v) for v in valuations(atoms) if all(sat(p, v) for p in premises))


def prop_countermodels(premises, conclusion):
    atoms = atoms_of(list(premises) + [conclusion])
    return [v for v in valuations(atoms) if all(sat(p, v) for p in premises) and not sat(conclusion, v)]


# ---------------------------------------------------------------- Kripke


def kev(t, n, rel, val, w):
    if isinstance(t, Var):
        return t.name in val[w]
    if t.op == "box":
        return all(kev(t.args[0], n, rel, val, u) for u in range(n) if (w, u) in rel)
    if t.op == "dia":
        return any(kev(t.args[0], n, rel, val, u) for u in range(n) if (w, u) in rel)
    a = [kev(x, n, rel, val, w) for x in t.args]
    return ev(App(t.op, tuple(Var(f"_{i}") for i in range(len(a)))), {f"_{i}": b for i, b in enumerate(a)})


def globally(s, n, rel, val):
    return all(kev(s.components[0], n, rel, val, w) for w in range(n))


def k_countermodel(premises, conclusion, max_worlds):
    """First Kripke countermodel (any frame) with at most max_worlds worlds, or None."""
    atoms = atoms_of(list(premises) + [conclusion])
    for n in range(1, max_worlds + 1):
        pairs = [(i, j) for i in range(n) for j in range(n)]
        for rbits in product((0, 1), repeat=len(pairs)):
            rel = {p for p, b in zip(pairs, rbits) if b}
            for vbits in product((0, 1), repeat=n * len(atoms)):
                val = [{a for k, a in enumerate(atoms) if vbits[w * len(atoms) + k]} for w in range(n)]
                if all(globally(p, n, rel, val) for p in premises) and not globally(conclusion, n, rel, val):
                    return n, rel, val
    return None


def s5_entails(premises, conclusion):
    """Decides S5 global consequence: a universal model is determined up to bisimulation by its set of valuations."""
    atoms = atoms_of(list(premises) + [conclusion])
    vals = [frozenset(a for a, b in v.items() if b) for v in valuations(atoms)]
    for mask in range(1, 1 << len(vals)):
        worlds = [vals[i] for i in range(len(vals)) if (mask >> i) & 1]
        n = len(worlds)
        rel = {(i, j) for i in range(n) for j in range(n)}
        if all(globally(p, n, rel, worlds) for p in premises) and not globally(conclusion, n, rel, worlds):
            return False
    return True
