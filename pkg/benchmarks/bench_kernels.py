"""Compare the compiled and pure-Python kernels on the same seeded workloads.

    python benchmarks/bench_kernels.py [--repeat 3] [--seed 0]
"""

import argparse
import random
import timeit

from pirefine import _pykernels
from pirefine._program import Program, flat_pairs
from pirefine.corpus import random_sentence
from pirefine.logics import cpc_signature, k_signature, s5g_signature
from pirefine.syntax import App, Sentence

try:
    from pirefine import _kernels
except ImportError:
    _kernels = None


def _compile(atoms, premises, conclusion):
    prog = Program(atoms)
    return prog, flat_pairs(prog.pair(s) for s in premises), prog.pair(conclusion)


def _entailed(rng, sig, atoms, d):
    """A premise and a conclusion it entails, so the kernels must exhaust their search space."""
    phi = random_sentence(rng, sig, atoms, d)
    psi = random_sentence(rng, sig, atoms, d)
    return [phi], Sentence((App("\\/", (phi.components[0], psi.components[0])),))


def workloads(seed):
    rng = random.Random(seed)
    out = []
    sig = cpc_signature(tuple(f"x{i}" for i in range(16)), "cpc16")
    for n in (6, 10, 14):
        atoms = list(sig.variables[:n])
        queries = []
        for _ in range(20):
            prem, concl = _entailed(rng, sig, atoms, 5)
            queries.append(_compile(atoms, prem, concl))
        out.append((f"truth table, {n} atoms", "first_countervaluation", [(p.code, n, pr, c) for p, pr, c in queries]))
    for name, sig, fn, worlds in (("K", k_signature(), "first_countermodel_k", 2), ("S5", s5g_signature(), "first_countermodel_s5", 4)):
        atoms = ["p", "q"]
        queries = []
        for _ in range(20):
            prem, concl = _entailed(rng, sig, atoms, 3)
            p, pr, c = _compile(atoms, prem, concl)
            queries.append((p.code, len(atoms), worlds, pr, c, 1 << 18))
        out.append((f"{name} enumeration, up to {worlds} worlds", fn, queries))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    backends = [("python", _pykernels)] + ([("cython", _kernels)] if _kernels else [])
    if not _kernels:
        print("compiled kernels not built; timing the pure-Python backend only")
    print(f"{'workload':34} " + " ".join(f"{b:>10}" for b, _ in backends) + ("    speedup" if _kernels else ""))
    for label, fn, queries in workloads(args.seed):
        times, answers = [], []
        for _, mod in backends:
            f = getattr(mod, fn)
            answers.append([f(*q) for q in queries])
            times.append(min(timeit.repeat(lambda: [f(*q) for q in queries], number=1, repeat=args.repeat)))
        assert all(a == answers[0] for a in answers), f"backends disagree on {label}"
        row = f"{label:34} " + " ".join(f"{t * 1000:8.1f}ms" for t in times)
        if len(times) == 2:
            row += f"   {times[0] / times[1]:7.1f}x"
        print(row)


if __name__ == "__main__":
    main()
