import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

from config import APP_NAME, APP_VERSION, FIXTURE_DIR, REPORT_SCHEMA_VERSION
from core.automata import validate
from core.errors import OrdinaliaError, ResourceLimitError
from core.examples import AUTOMATA, FIXTURES, fixture, omega2_nu
from core.formats import FixtureStore, automaton_to_dict, dumps, load_automaton, write_json
from core.growth import (
    RelationFamily,
    bound_u,
    equiv,
    growth_bound_probe,
    in_u,
    k_const,
    normalize_steps,
    rado_nu,
    u_iter_set,
)
from core.logic import decide, find_witness, load_presentation, parse_formula, presentation_to_dict
from core.ordinals import format_ordinal, parse
from core.semantics import member, saturation_check
from core.words import format_word, parse_word
from utils.log import level_for, setup_logging
from utils.resources import measured

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

PROBES = {"omega2": omega2_nu, "rado": rado_nu}


def _ordinal_set(values: list[str] | None) -> list:
    items = []
    for value in values or []:
        items.extend(parse(x) for x in value.split(",") if x.strip())
    return sorted(set(items))


def _literals(ordinals) -> list[str]:
    return [format_ordinal(x) for x in sorted(ordinals)]


class OrdinaliaCLI:
    def __init__(self) -> None:
        self.parser = self._build_parser()

    def _build_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(prog=APP_NAME, description="Automata on finite ordinal words below ω^ω")
        parser.add_argument("--version", action="version", version=f"{APP_NAME} {APP_VERSION}")

        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("-v", "--verbose", action="count", default=0)
        common.add_argument("--json-out", type=Path)
        common.add_argument("--timing", action="store_true")

        sub = parser.add_subparsers(dest="command", required=True)

        p = sub.add_parser("member", parents=[common], help="run an automaton on a word")
        p.add_argument("-a", "--automaton", type=Path, required=True)
        p.add_argument("-w", "--word", required=True)

        for name, text in (("decide", "decide a first-order sentence"), ("witness", "find witnesses for ∃x̄ φ")):
            p = sub.add_parser(name, parents=[common], help=text)
            p.add_argument("-p", "--presentation", type=Path, required=True)
            p.add_argument("-f", "--formula", required=True)

        p = sub.add_parser("umset", parents=[common], help="enumerate U^i_m(X, δ)")
        p.add_argument("-X", action="append", default=[])
        p.add_argument("-m", type=int, required=True)
        p.add_argument("-d", "--delta", required=True)
        p.add_argument("-i", type=int, default=1)

        p = sub.add_parser("normalize", parents=[common], help="move a word's letters into U_K(supp E)")
        p.add_argument("-a", "--automaton", type=Path, action="append", required=True)
        p.add_argument("-w", "--word", required=True)
        p.add_argument("-e", "--parameter", action="append", default=[])
        p.add_argument("-m", type=int, help="use m in place of K (no equivalence guarantee)")

        p = sub.add_parser("growth", parents=[common], help="tabulate ν against polynomial and linear bounds")
        p.add_argument("--structure", choices=sorted(PROBES), default="omega2")
        p.add_argument("-n", type=int, nargs="+", default=[0, 1])
        p.add_argument("-c", type=float, default=2.0)
        p.add_argument("-k", type=int, nargs="*", default=[])

        p = sub.add_parser("saturate", parents=[common], help="check Reach(σ^(ω^m)) = Reach(σ^(ω^m·c))")
        p.add_argument("-a", "--automaton", type=Path, required=True)
        p.add_argument("--symbol", required=True)
        p.add_argument("-m", type=int)
        p.add_argument("--multipliers", default="2,3,5,w")

        p = sub.add_parser("examples", parents=[common], help="write fixture files")
        p.add_argument("name", choices=["all", *sorted(FIXTURES), *sorted(AUTOMATA)])
        p.add_argument("--out", type=Path, default=FIXTURE_DIR)
        return parser

    def run(self, argv: list[str]) -> int:
        try:
            args = self.parser.parse_args(argv)
        except SystemExit as e:
            return EXIT_USAGE if e.code else EXIT_OK
        setup_logging(level_for(args.verbose))

        timing: dict = {}
        try:
            with measured(timing):
                code, results = getattr(self, f"cmd_{args.command}")(args)
        except ResourceLimitError as e:
            logger.error("%s", e)
            print(f"{APP_NAME}: {e}", file=sys.stderr)
            return EXIT_RESOURCE
        except (OrdinaliaError, OSError) as e:
            logger.error("%s", e)
            print(f"{APP_NAME}: {e}", file=sys.stderr)
            return EXIT_USAGE

        report = {
            "schema": REPORT_SCHEMA_VERSION,
            "command": list(argv),
            "inputs": self._digest(args),
            "results": results,
        }
        if args.timing:
            report["timing"] = timing
        if args.json_out:
            write_json(args.json_out, report)
        else:
            print(dumps(report))
        return code

    def _digest(self, args: argparse.Namespace) -> str:
        h = hashlib.sha256()
        options = {k: v for k, v in vars(args).items() if k not in ("json_out", "timing", "verbose")}
        h.update(json.dumps(options, sort_keys=True, default=str).encode("utf-8"))
        for value in options.values():
            for path in value if isinstance(value, list) else [value]:
                if isinstance(path, Path) and path.is_file():
                    h.update(path.read_bytes())
        return h.hexdigest()

    def cmd_member(self, args):
        a = load_automaton(args.automaton)
        w = parse_word(args.word, a.alphabet)
        accepted = member(a, w)
        return (EXIT_OK if accepted else EXIT_FALSE), {"word": format_word(w), "accepted": accepted}

    def cmd_decide(self, args):
        presentation = load_presentation(args.presentation)
        sentence = parse_formula(args.formula, presentation.signature)
        accepted = decide(sentence, presentation)
        return (EXIT_OK if accepted else EXIT_FALSE), {"formula": args.formula, "accepted": accepted}

    def cmd_witness(self, args):
        presentation = load_presentation(args.presentation)
        sentence = parse_formula(args.formula, presentation.signature)
        found = find_witness(sentence, presentation)
        witness = None if found is None else [format_word(w) for w in found]
        return (EXIT_FALSE if found is None else EXIT_OK), {"formula": args.formula, "witness": witness}

    def cmd_umset(self, args):
        xs = _ordinal_set(args.X)
        delta = parse(args.delta)
        members = u_iter_set(xs, delta, args.m, args.i)
        bound = bound_u(xs, delta, args.m, args.i)
        return EXIT_OK, {
            "set": _literals(members),
            "size": len(members),
            "bound": {"stated": bound.stated, "corrected": bound.corrected, "holds": bound.holds},
        }

    def cmd_normalize(self, args):
        automata = [load_automaton(path) for path in args.automaton]
        phi = RelationFamily(tuple(automata))
        base = automata[0].alphabet.base_alphabet
        v = parse_word(args.word, base)
        parameters = [parse_word(text, base) for text in args.parameter]
        k = args.m if args.m is not None else k_const(phi)

        steps, w = [], v
        for step in normalize_steps(v, parameters, phi, k):
            steps.append({"case": step.case, "beta": format_ordinal(step.beta)})
            w = step.word
        support = set().union(*(e.support() for e in parameters))
        results = {
            "k": str(k),
            "word": format_word(w),
            "steps": steps,
            "within_u": all(in_u(x, support, w.length, k) for x in w.positions),
            "equivalent": equiv(v, w, parameters, phi),
        }
        return (EXIT_OK if results["equivalent"] else EXIT_FALSE), results

    def cmd_growth(self, args):
        rows = growth_bound_probe(PROBES[args.structure], args.c, args.n, args.k)
        table = [
            {
                "n": row.n,
                "m": row.m,
                "nu": row.nu,
                "power_bound": row.power_bound,
                "within_power": row.within_power,
                "linear_violations": row.linear_violations,
            }
            for row in rows
        ]
        return EXIT_OK, {"structure": args.structure, "c": args.c, "rows": table}

    def cmd_saturate(self, args):
        a = load_automaton(args.automaton)
        symbol = a.alphabet.parse_symbol(args.symbol)
        multipliers = _ordinal_set([args.multipliers])
        report = saturation_check(a, symbol, args.m, multipliers)
        results = {
            "symbol": args.symbol,
            "m": report.m,
            "multipliers": _literals(report.multipliers),
            "violations": _literals(report.violations),
            "ok": report.ok,
        }
        return (EXIT_OK if report.ok else EXIT_FALSE), results

    def cmd_examples(self, args):
        store = FixtureStore(args.out)
        names = [*sorted(FIXTURES), *sorted(AUTOMATA)] if args.name == "all" else [args.name]
        written = []
        for name in names:
            if name in FIXTURES:
                doc = presentation_to_dict(fixture(name).presentation)
            else:
                a = AUTOMATA[name]()
                for diagnostic in validate(a):
                    logger.warning("%s: %s", name, diagnostic)
                doc = automaton_to_dict(a)
            written.append(str(store.save(name, doc)))
        return EXIT_OK, {"written": written}


def run(argv: list[str]) -> int:
    return OrdinaliaCLI().run(argv)


if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
