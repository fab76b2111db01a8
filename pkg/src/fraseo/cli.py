"""Command-line entry point.

Subcommands: ``generate`` (keywords to ranked sentences), ``repl``
(interactive loop), ``build-lexicon`` (two-source merge with oracle
verification), ``train-lm`` (count-based model training), ``evaluate``
(exact-match corpus scoring) and ``agreement`` (annotator reliability).

Exit statuses are stable: 0 success, 1 configuration or parse failure,
2 generation impossible (the input is echoed back). The markers ``no``
and ``?`` are ordinary argv tokens; quote ``?`` in shells that glob it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from . import builder, evaluation, lm
from .errors import FraseoError
from .lexicon import save_lexicon
from .pipeline import generate, load_resources

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NO_GENERATION = 2

FORMAT_PLAIN = "plain"
FORMAT_JSON = "json"


def _canonical_json(payload):
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, indent=2)


def _write_text_atomic(path, text):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    handle = tempfile.NamedTemporaryFile(
        "w", encoding="utf-8", dir=directory, delete=False, suffix=".tmp"
    )
    try:
        with handle:
            handle.write(text)
        os.replace(handle.name, path)
    except BaseException:
        try:
            os.unlink(handle.name)
        except OSError:
            pass
        raise


def _render_tree(node, fills, counter=None):
    """Parenthesized tree with the pre-inflection fill surfaces at leaves."""
    if counter is None:
        counter = [0]
    if node.is_leaf:
        fill = fills[counter[0]]
        counter[0] += 1
        return "(%s %s)" % (node.symbol.name, fill.surface)
    children = " ".join(_render_tree(child, fills, counter) for child in node.children)
    return "(%s %s)" % (node.symbol.name, children)


def _candidate_payload(candidate):
    plan = candidate.plan
    return {
        "text": candidate.text,
        "tree": _render_tree(plan.tree, plan.slot_assignment),
        "insertions": [
            {"position": position, "category": category.value, "rationale": rationale}
            for position, category, rationale in plan.inserted
        ],
        "trace": list(candidate.trace),
    }


def _load_config_resources(args):
    return load_resources(
        lexicon_path=args.lexicon, grammar_path=args.grammar, lm_path=args.lm
    )


def cmd_generate(args):
    resources = _load_config_resources(args)
    result = generate(args.words, resources, max_candidates=args.max_candidates)
    if result.echo:
        if args.format == FORMAT_JSON:
            payload = {
                "input": list(result.input_words),
                "mode": None,
                "candidates": [],
                "echo": result.echo_text,
            }
            print(_canonical_json(payload))
        else:
            print(result.echo_text)
        return EXIT_NO_GENERATION
    if args.format == FORMAT_JSON:
        payload = {
            "input": list(result.input_words),
            "mode": result.mode.value,
            "candidates": [_candidate_payload(c) for c in result.candidates],
        }
        print(_canonical_json(payload))
    else:
        for candidate in result.candidates:
            print(candidate.text)
    return EXIT_OK


def cmd_repl(args):
    resources = _load_config_resources(args)
    stream = sys.stdin
    while True:
        print("> ", end="", flush=True)
        line = stream.readline()
        if not line:
            print()
            return EXIT_OK
        words = line.split()
        if not words:
            continue
        if words == ["exit"]:
            return EXIT_OK
        try:
            result = generate(words, resources, max_candidates=args.max_candidates)
        except FraseoError as exc:
            print("error: %s" % exc)
            continue
        if result.echo:
            print(result.echo_text)
            continue
        for candidate in result.candidates:
            print(candidate.text)
    return EXIT_OK


def cmd_build_lexicon(args):
    oracle = builder.AllowlistOracle.load(args.oracle)
    lexicon, report = builder.build_lexicon(args.primary, args.expansion, oracle)
    save_lexicon(lexicon, args.out)
    if args.report:
        _write_text_atomic(args.report, _canonical_json(report.to_flat_dict()) + "\n")
    print("wrote %d entries to %s" % (len(lexicon.entries), args.out))
    return EXIT_OK


def cmd_train_lm(args):
    model = lm.train_file(args.corpus)
    model.save(args.out)
    print(
        "trained model covering %d verbs; skipped %d malformed lines"
        % (len(model.verbs()), model.skipped_lines)
    )
    return EXIT_OK


def cmd_evaluate(args):
    resources = _load_config_resources(args)
    items = evaluation.load_corpus(args.corpus)

    def generator(words):
        return generate(words, resources, max_candidates=args.max_candidates)

    report = evaluation.exact_match_rate(items, generator)
    print(_canonical_json(report.to_dict()))
    return EXIT_OK


def cmd_agreement(args):
    records = evaluation.load_annotations(args.annotations)
    matrix = evaluation.ReliabilityMatrix.from_annotations(records)
    coincidence = evaluation.coincidence_matrix(matrix)
    payload = {
        "alpha": evaluation.krippendorff_alpha(coincidence),
        "accuracy": evaluation.accuracy(coincidence),
        "degenerate": coincidence.is_degenerate,
        "pairwise_alpha": {
            "%s,%s" % pair: value
            for pair, value in evaluation.pairwise_agreement(matrix, "alpha").items()
        },
        "pairwise_accuracy": {
            "%s,%s" % pair: value
            for pair, value in evaluation.pairwise_agreement(matrix, "accuracy").items()
        },
    }
    print(_canonical_json(payload))
    return EXIT_OK


def _add_resource_flags(parser, max_candidates_default):
    parser.add_argument("--lexicon", help="path to a lexicon XML file")
    parser.add_argument("--grammar", help="path to a grammar file")
    parser.add_argument("--lm", help="path to a trained language model file")
    parser.add_argument(
        "--format",
        choices=(FORMAT_PLAIN, FORMAT_JSON),
        default=FORMAT_PLAIN,
        help="output format (default plain)",
    )
    parser.add_argument(
        "--max-candidates",
        type=int,
        default=max_candidates_default,
        help="candidate cap, 0 for unlimited (default %d)" % max_candidates_default,
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fraseo",
        description="Keyword-to-sentence generation for Spanish.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_generate = sub.add_parser("generate", help="realize sentences from keywords")
    _add_resource_flags(p_generate, max_candidates_default=3)
    p_generate.add_argument("words", nargs="+", help="keywords, plus optional 'no' and '?'")
    p_generate.set_defaults(func=cmd_generate)

    p_repl = sub.add_parser("repl", help="interactive keyword loop")
    _add_resource_flags(p_repl, max_candidates_default=3)
    p_repl.set_defaults(func=cmd_repl)

    p_build = sub.add_parser("build-lexicon", help="merge two lexical sources")
    p_build.add_argument("--primary", required=True, help="primary source XML")
    p_build.add_argument("--expansion", required=True, help="expansion source XML")
    p_build.add_argument("--oracle", required=True, help="allowlist TSV for verification")
    p_build.add_argument("--out", required=True, help="merged lexicon XML output")
    p_build.add_argument("--report", help="flat JSON merge report output")
    p_build.set_defaults(func=cmd_build_lexicon)

    p_train = sub.add_parser("train-lm", help="train the verb model from tagged text")
    p_train.add_argument("--corpus", required=True, help="tagged corpus, one sentence per line")
    p_train.add_argument("--out", required=True, help="model file output")
    p_train.set_defaults(func=cmd_train_lm)

    p_eval = sub.add_parser("evaluate", help="exact-match rate over a TSV corpus")
    _add_resource_flags(p_eval, max_candidates_default=0)
    p_eval.add_argument("--corpus", required=True, help="TSV of target<TAB>keywords")
    p_eval.set_defaults(func=cmd_evaluate)

    p_agree = sub.add_parser("agreement", help="annotator reliability measures")
    p_agree.add_argument("--annotations", required=True, help="annotation XML file")
    p_agree.set_defaults(func=cmd_agreement)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FraseoError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
