import json
import logging
import os
from pathlib import Path
from typing import Any

from config import BLANK, REPORT_SCHEMA_VERSION, TUPLE_SEPARATOR
from core.automata import OrdinalAutomaton, relabel
from core.errors import FileFormatError, OrdinaliaError
from core.words import Alphabet
from utils.schema import is_supported

logger = logging.getLogger(__name__)


def read_json(path: str | Path) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise FileFormatError(f"{path}: {e}") from e


def write_json(path: str | Path, doc: Any) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, ensure_ascii=False, indent=2)
        f.write("\n")


def dumps(doc: Any) -> str:
    return json.dumps(doc, ensure_ascii=False, indent=2)


def check_schema(doc: dict) -> None:
    schema = doc.get("schema")
    if not is_supported(schema):
        raise FileFormatError(f"unsupported schema version {schema!r} (this build reads {REPORT_SCHEMA_VERSION})")


def automaton_to_dict(a: OrdinalAutomaton) -> dict:
    if not all(isinstance(q, (str, int)) for q in a.states):
        a = relabel(a)
    alphabet = a.alphabet
    base = alphabet.base_alphabet

    def order(states):
        return sorted(states, key=repr)

    return {
        "schema": REPORT_SCHEMA_VERSION,
        "arity": alphabet.arity,
        "states": order(a.states),
        "alphabet": list(base.symbols),
        "blank": base.blank,
        "initial": order(a.initial),
        "final": order(a.final),
        "succ": sorted(([q, alphabet.format_symbol(s), p] for q, s, p in a.succ), key=repr),
        "limit": sorted(([order(left), p] for left, p in a.limit_rules()), key=repr),
    }


def _hashable(q):
    if isinstance(q, list):
        return tuple(_hashable(x) for x in q)
    return q


def automaton_from_dict(doc: dict) -> OrdinalAutomaton:
    if not isinstance(doc, dict):
        raise FileFormatError("an automaton document must be a JSON object")
    check_schema(doc)
    try:
        blank = doc.get("blank", BLANK)
        base = Alphabet.of(doc["alphabet"], blank)
        symbols = [s for _, s, _ in doc["succ"]]
        arity = doc.get("arity")
        if arity is None:
            arity = max((len(str(s).split(TUPLE_SEPARATOR)) for s in symbols), default=1)
        alphabet = base.product(int(arity))

        return OrdinalAutomaton.build(
            (_hashable(q) for q in doc["states"]),
            alphabet,
            (_hashable(q) for q in doc.get("initial", [])),
            (_hashable(q) for q in doc.get("final", [])),
            ((_hashable(q), alphabet.parse_symbol(str(s)), _hashable(p)) for q, s, p in doc["succ"]),
            (({_hashable(x) for x in left}, _hashable(p)) for left, p in doc.get("limit", [])),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise FileFormatError(f"malformed automaton document: {e!r}") from e
    except OrdinaliaError as e:
        raise FileFormatError(f"malformed automaton document: {e}") from e


def load_automaton(path: str | Path) -> OrdinalAutomaton:
    return automaton_from_dict(read_json(path))


def dump_automaton(a: OrdinalAutomaton, path: str | Path) -> None:
    write_json(path, automaton_to_dict(a))


class FixtureStore:
    def __init__(self, directory: str | Path) -> None:
        self.directory = Path(directory)

    def path_for(self, name: str) -> Path:
        return self.directory / f"{name}.json"

    def exists(self, name: str) -> bool:
        return os.path.isfile(self.path_for(name))

    def save(self, name: str, doc: dict) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.path_for(name)
        write_json(path, doc)
        logger.info("wrote %s", path)
        return path

    def load(self, name: str) -> dict:
        if not self.exists(name):
            raise FileFormatError(f"no fixture named {name!r} in {self.directory}")
        return read_json(self.path_for(name))
