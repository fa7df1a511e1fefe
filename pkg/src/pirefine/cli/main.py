"""Command-line front end: ``pirefine [flags] COMMAND ARGS``.

Exit codes: 0 every check passed, 1 a counterexample was found,
2 inconclusive (Unknowns, no failure), 3 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone

from .. import corpus as corpora
from ..corpus import CheckCorpus
from ..kernel import DEFAULT_BUDGET, Entailed, NotEntailed, check_closure_axioms, show, witness_json
from ..refinement import RefinementQuery, is_refinement_by_interpretation, is_syntactic_refinement
from ..report import FAIL, INCONCLUSIVE, PASS, UNKNOWN, CheckReport
from ..specs import (
    Derive,
    Translate,
    Union,
    check_structural_lemma,
    conservativity_probes,
    holds,
    induced_translation,
    is_conservative,
    local_refines,
    normalize,
)
from ..syntax import ParseError, RejectedInput, parse_sentence, sorted_sentences
from ..translation import Translation, check_naturality, is_interpretation, is_semi_interpretation
from .workspace import Workspace, WorkspaceError, load_workspace, standard_workspace_path

EXIT_PASS, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 3
EXIT_OF = {PASS: EXIT_PASS, FAIL: EXIT_FAIL, INCONCLUSIVE: EXIT_INCONCLUSIVE}
DEFAULT_SIZE = 100
CLOSURE_SIZE = 200


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--workspace", metavar="PATH", help="workspace file (default: the shipped standard workspace)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=int, default=None, help=f"corpus size (default {DEFAULT_SIZE}; {CLOSURE_SIZE} for check-closure)")
    p.add_argument("--depth", type=int, default=corpora.DEFAULT_DEPTH)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--vars", type=int, default=corpora.DEFAULT_VARS, help="atoms used by generated sentences")
    p.add_argument("--corpus", metavar="NAME", help="use a corpus declared in the workspace")
    p.add_argument("--report", metavar="PATH", help="also write the JSON report here")
    p.add_argument("--json", action="store_true", help="print the JSON report instead of text")
    p.add_argument("--no-timestamp", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="pirefine", description="Check refinement and interpretation properties of pi-institutions.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def cmd(name, help, *args):
        p = sub.add_parser(name, help=help, parents=[common])
        for a in args:
            p.add_argument(a)
        return p

    cmd("check-closure", "closure axioms of an institution's oracle", "institution")
    cmd("check-naturality", "naturality squares of a translation", "translation")
    cmd("check-interpretation", "a translation preserves and reflects consequence", "translation")
    cmd("check-semi", "a translation preserves consequence", "translation")
    p = cmd("check-refinement", "refinement by interpretation", "source", "target")
    p.add_argument("--via", required=True, metavar="TRANSLATION")
    p.add_argument("--interpretant", metavar="INSTITUTION")
    cmd("check-syntactic", "syntactic refinement", "source", "target")
    p = cmd("check-local", "specification refinement along a multifunction", "spec", "target_spec")
    p.add_argument("--via", required=True, metavar="TRANSLATION|MORPHISM")
    p.add_argument("--witness", metavar="SPEC", help="also check that the map interprets SPEC in this one")
    cmd("check-conservative", "conservativity of a signature morphism", "morphism", "institution")
    cmd("check-structural", "rho-hat commutes with the constructors of a specification", "translation", "spec")
    cmd("eval", "does a sentence hold in a specification", "spec", "sentence")
    cmd("normalize", "flat presentation of a specification", "spec")
    return parser


# ---------------------------------------------------------------- corpora


def _size(args, default=DEFAULT_SIZE) -> int:
    size = default if args.size is None else args.size
    if size < 1:
        raise UsageError("--size must be >= 1")
    return size


def _entailment_corpus(ws: Workspace, args, I, sig=None):
    sig = sig or I.signature()
    if args.corpus:
        return _named_corpus(ws, args, I, sig)
    return corpora.gen_entailment_corpus(I, sig, _size(args), args.seed, args.depth, args.budget, args.vars)


def _named_corpus(ws: Workspace, args, I, sig):
    kind, inst_name, data = ws.lookup("corpus", args.corpus)
    if ws.institutions[inst_name].signature() != sig:
        raise UsageError(f"corpus {args.corpus} is over {inst_name}, not over signature {sig.id}")
    if kind == "items":
        return data
    size = data["size"] if data["size"] is not None else _size(args)
    seed = data["seed"] if data["seed"] is not None else args.seed
    d = data["depth"] if data["depth"] is not None else args.depth
    return corpora.gen_entailment_corpus(I, sig, size, seed, d, args.budget, args.vars)


def _sentences(ws: Workspace, args, sig, extra=()) -> list:
    """Sentence corpus over sig: extra sentences first, then generated ones."""
    if args.corpus:
        c = _named_corpus(ws, args, ws.institutions[ws.lookup("corpus", args.corpus)[1]], sig)
        generated = c.sentences()
    else:
        generated = corpora.gen_sentences(sig, args.depth, _size(args), args.seed, args.vars)
    out, seen = [], set()
    for s in list(extra) + list(generated):
        if s not in seen:
            seen.add(s)
            out.append(s)
    return out


def _axioms(sp) -> list:
    try:
        return sorted_sentences(normalize(sp).axioms)
    except RejectedInput:
        return []


# ---------------------------------------------------------------- commands


def _translation(ws, name) -> Translation:
    return ws.lookup("translation", name)


def cmd_check_closure(ws, args):
    I = ws.lookup("institution", args.institution)
    if args.corpus:
        corpus = _named_corpus(ws, args, I, I.signature())
    else:
        corpus = corpora.closure_corpus(I, _size(args, CLOSURE_SIZE), args.seed, args.depth, args.budget, args.vars)
    return check_closure_axioms(I, corpus, args.budget)


def cmd_check_naturality(ws, args):
    T = _translation(ws, args.translation)
    squares = corpora.gen_morphism_squares(T.source, _size(args), args.seed, min(args.depth, 3), args.vars)
    return check_naturality(T, squares)


def cmd_check_interpretation(ws, args):
    T = _translation(ws, args.translation)
    return is_interpretation(T, _entailment_corpus(ws, args, T.source), args.budget)


def cmd_check_semi(ws, args):
    T = _translation(ws, args.translation)
    return is_semi_interpretation(T, _entailment_corpus(ws, args, T.source), args.budget)


def cmd_check_refinement(ws, args):
    I, I2 = ws.lookup("institution", args.source), ws.lookup("institution", args.target)
    T = _translation(ws, args.via)
    if T.source is not I:
        raise UsageError(f"translation {T.name} starts at {T.source.name}, not {I.name}")
    if T.target is not I2 and T.target.signatures != I2.signatures:
        raise UsageError(f"translation {T.name} ends at {T.target.name}, not over the signatures of {I2.name}")
    if not args.interpretant:
        raise UsageError(
            "check-refinement needs --interpretant: refinement by interpretation asks for an interpretant "
            "institution over the target's signatures, and none is searched for"
        )
    I0 = ws.lookup("institution", args.interpretant)
    q = RefinementQuery(I, I2, T, I0, _entailment_corpus(ws, args, I), args.budget)
    return is_refinement_by_interpretation(q)


def cmd_check_syntactic(ws, args):
    I, I2 = ws.lookup("institution", args.source), ws.lookup("institution", args.target)
    return is_syntactic_refinement(I, I2, _entailment_corpus(ws, args, I), args.budget)


def cmd_check_local(ws, args):
    sp, sp2 = ws.lookup("spec", args.spec), ws.lookup("spec", args.target_spec)
    kind = ws.kind_of(args.via)
    if kind == "translation":
        T = ws.translations[args.via]
        if sp.signature.id not in T.alpha:
            raise UsageError(f"translation {T.name} has no component at signature {sp.signature.id}")
        i = T.alpha[sp.signature.id]
    elif kind == "morphism":
        i = induced_translation(ws.morphisms[args.via][1])
    else:
        ws.lookup("translation", args.via)
        raise UsageError(f"--via {args.via}: expected a translation or a morphism")
    witness = ws.lookup("spec", args.witness) if args.witness else None
    sentences = _sentences(ws, args, sp.signature, _axioms(sp))
    return local_refines(i, sp, sp2, sentences, args.budget, witness=witness)


def cmd_check_conservative(ws, args):
    sigma = ws.lookup("morphism", args.morphism)
    I = ws.lookup("institution", args.institution)
    if ws.morphisms[args.morphism][0] != args.institution and not I.is_morphism(sigma):
        raise UsageError(f"{args.morphism} is not a morphism of {args.institution}")
    corpus = _entailment_corpus(ws, args, I, sigma.source)
    probes = conservativity_probes(sigma)
    corpus = CheckCorpus(corpus.seed, list(corpus.items) + probes, corpus.squares, corpus.depth, len(corpus.items) + len(probes))
    return is_conservative(sigma, I, corpus, args.budget)


def _subterms(sp) -> list:
    out = []
    if isinstance(sp, Union):
        out += _subterms(sp.left) + _subterms(sp.right)
    elif isinstance(sp, (Translate, Derive)):
        out += _subterms(sp.spec)
    out.append(sp)
    return out


def cmd_check_structural(ws, args):
    T = _translation(ws, args.translation)
    sp = ws.lookup("spec", args.spec)
    if sp.institution is not T.source:
        raise UsageError(f"specification {args.spec} is not over {T.source.name}")
    instances = _subterms(sp)
    sentences = []
    for s in instances:
        if isinstance(s, Derive):
            sentences += _sentences(ws, args, s.signature, _axioms(s.spec))
    naturality = check_naturality(T, corpora.gen_morphism_squares(T.source, _size(args), args.seed, min(args.depth, 3), args.vars))
    return check_structural_lemma(T, instances, sentences, args.budget, naturality)


def cmd_eval(ws, args):
    sp = ws.lookup("spec", args.spec)
    try:
        phi = parse_sentence(args.sentence, sp.signature)
    except ParseError as e:
        raise UsageError(f"sentence {args.sentence!r}, column {e.offset + 1}: {e.message}") from None
    v = holds(sp, phi, args.budget)
    report = CheckReport(f"{phi} holds in {args.spec}")
    subj = {"spec": args.spec, "sentence": str(phi), "verdict": v.label}
    if isinstance(v, Entailed):
        report.add("eval", PASS, subj)
    elif isinstance(v, NotEntailed):
        report.add("eval", FAIL, subj, witness_json(v.witness))
    else:
        report.add("eval", UNKNOWN, subj, note=v.reason)
    return report


def cmd_normalize(ws, args):
    sp = ws.lookup("spec", args.spec)
    flat = normalize(sp)
    report = CheckReport(f"flat presentation of {args.spec}")
    report.meta = {"signature": flat.signature.id, "axioms": show(flat.axioms)}
    return report


COMMANDS = {
    "check-closure": cmd_check_closure,
    "check-naturality": cmd_check_naturality,
    "check-interpretation": cmd_check_interpretation,
    "check-semi": cmd_check_semi,
    "check-refinement": cmd_check_refinement,
    "check-syntactic": cmd_check_syntactic,
    "check-local": cmd_check_local,
    "check-conservative": cmd_check_conservative,
    "check-structural": cmd_check_structural,
    "eval": cmd_eval,
    "normalize": cmd_normalize,
}

_FLAGS = ("workspace", "seed", "size", "depth", "budget", "vars", "corpus", "report", "json", "no_timestamp")


def document(args, report: CheckReport, code: int) -> dict:
    doc = {
        "command": args.command,
        "args": {k: v for k, v in sorted(vars(args).items()) if k not in _FLAGS and k != "command"},
        "seed": args.seed,
        "size": args.size,
        "depth": args.depth,
        "budget": args.budget,
        "workspace": args.workspace or "standard",
    }
    if not args.no_timestamp:
        doc["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    doc["exit_code"] = code
    doc["report"] = report.to_dict()
    return doc


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"error: {e}", file=err)
        return EXIT_USAGE
    except SystemExit as e:  # --help
        return EXIT_PASS if not e.code else EXIT_USAGE
    try:
        if args.workspace:
            ws = load_workspace(args.workspace)
        else:
            ws = load_workspace(standard_workspace_path(), "standard.pi")
        report = COMMANDS[args.command](ws, args)
    except WorkspaceError as e:
        for d in e.diagnostics:
            print(d, file=err)
        return EXIT_USAGE
    except (UsageError, RejectedInput) as e:
        print(f"error: {e}", file=err)
        return EXIT_USAGE
    except OSError as e:
        print(f"error: {e}", file=err)
        return EXIT_USAGE
    code = EXIT_OF[report.status]
    doc = document(args, report, code)
    text = json.dumps(doc, indent=2, sort_keys=False, default=str)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    if args.json:
        print(text, file=out)
    else:
        print(report.render(), file=out)
        print(f"exit {code}", file=out)
    return code


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
