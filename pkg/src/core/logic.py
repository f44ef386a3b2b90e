import logging
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Mapping, Sequence

from config import REPORT_SCHEMA_VERSION
from core.automata import OrdinalAutomaton, embed, equality_automaton, validate
from core.errors import (
    AlphabetMismatchError,
    ConcretizationError,
    FileFormatError,
    FormulaArityError,
    FormulaSyntaxError,
)
from core.formats import automaton_from_dict, automaton_to_dict, check_schema, read_json, write_json
from core.gapcode import (
    CapPolicy,
    GapNFA,
    abstract,
    accepts,
    cap_policy,
    complement,
    cylindrify_nfa,
    decode,
    empty_nfa,
    emptiness_witness,
    exists_project,
    intersect,
    to_gap_nfa,
    union_nfa,
)
from core.ordinals import Ordinal, format_ordinal, parse
from core.semantics import member
from core.words import AlphaWord, blank_word, convolve, split

logger = logging.getLogger(__name__)

_TOKEN = re.compile(r"\(|\)|[^\s()]+")
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_']*$")
_KEYWORDS = {"forall", "exists", "and", "or", "not", "->", "="}


@dataclass(frozen=True)
class Atom:
    relation: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class Equal:
    left: str
    right: str


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


Formula = Atom | Equal | Not | And | Or | Implies | Exists | Forall

_BINARY = {"and": And, "or": Or, "->": Implies}
_QUANTIFIERS = {"exists": Exists, "forall": Forall}


def _tokenize(text: str) -> list[str]:
    tokens = _TOKEN.findall(text)
    if "".join(tokens) != "".join(text.split()):
        raise FormulaSyntaxError(f"unexpected characters in {text!r}")
    return tokens


def _read(tokens: list[str], i: int):
    if i >= len(tokens):
        raise FormulaSyntaxError("unexpected end of formula")
    if tokens[i] == ")":
        raise FormulaSyntaxError(f"unexpected ')' at token {i}")
    if tokens[i] != "(":
        return tokens[i], i + 1
    items = []
    i += 1
    while i < len(tokens) and tokens[i] != ")":
        item, i = _read(tokens, i)
        items.append(item)
    if i >= len(tokens):
        raise FormulaSyntaxError("missing ')'")
    return items, i + 1


def _variable(token) -> str:
    if not isinstance(token, str) or token in _KEYWORDS or not _NAME.match(token):
        raise FormulaSyntaxError(f"expected a variable, got {token!r}")
    return token


def _build(tree) -> Formula:
    if not isinstance(tree, list) or not tree:
        raise FormulaSyntaxError(f"expected a parenthesised formula, got {tree!r}")
    head, rest = tree[0], tree[1:]
    if not isinstance(head, str):
        raise FormulaSyntaxError(f"formula head must be a name, got {head!r}")

    if head in _QUANTIFIERS:
        if len(rest) != 2:
            raise FormulaSyntaxError(f"({head} x φ) takes a variable and a body")
        return _QUANTIFIERS[head](_variable(rest[0]), _build(rest[1]))
    if head == "not":
        if len(rest) != 1:
            raise FormulaSyntaxError("(not φ) takes one argument")
        return Not(_build(rest[0]))
    if head in _BINARY:
        if len(rest) < 2 or (head == "->" and len(rest) != 2):
            raise FormulaSyntaxError(f"({head} …) needs two arguments")
        parts = [_build(x) for x in rest]
        result = parts[-1]
        for part in reversed(parts[:-1]):
            result = _BINARY[head](part, result)
        return result
    if head == "=":
        if len(rest) != 2:
            raise FormulaSyntaxError("(= x y) takes two variables")
        return Equal(_variable(rest[0]), _variable(rest[1]))
    if not _NAME.match(head):
        raise FormulaSyntaxError(f"bad relation name {head!r}")
    return Atom(head, tuple(_variable(x) for x in rest))


def _check(formula: Formula, signature: Mapping[str, int] | None, bound: frozenset = frozenset()) -> None:
    match formula:
        case Atom(relation, args):
            if signature is not None:
                if relation not in signature:
                    raise FormulaArityError(f"unknown relation {relation!r}")
                if signature[relation] != len(args):
                    raise FormulaArityError(f"{relation} takes {signature[relation]} arguments, got {len(args)}")
        case Equal():
            pass
        case Not(body):
            _check(body, signature, bound)
        case And(left, right) | Or(left, right) | Implies(left, right):
            _check(left, signature, bound)
            _check(right, signature, bound)
        case Exists(var, body) | Forall(var, body):
            if var in bound:
                raise FormulaSyntaxError(f"variable {var!r} is bound twice on one path")
            _check(body, signature, bound | {var})


def parse_formula(text: str, signature: Mapping[str, int] | None = None) -> Formula:
    tokens = _tokenize(text)
    tree, end = _read(tokens, 0)
    if end != len(tokens):
        raise FormulaSyntaxError(f"trailing input after formula: {' '.join(tokens[end:])!r}")
    formula = _build(tree)
    _check(formula, signature)
    return formula


def format_formula(formula: Formula) -> str:
    match formula:
        case Atom(relation, args):
            return f"({' '.join((relation, *args))})"
        case Equal(left, right):
            return f"(= {left} {right})"
        case Not(body):
            return f"(not {format_formula(body)})"
        case And(left, right):
            return f"(and {format_formula(left)} {format_formula(right)})"
        case Or(left, right):
            return f"(or {format_formula(left)} {format_formula(right)})"
        case Implies(left, right):
            return f"(-> {format_formula(left)} {format_formula(right)})"
        case Exists(var, body):
            return f"(exists {var} {format_formula(body)})"
        case Forall(var, body):
            return f"(forall {var} {format_formula(body)})"
    raise FormulaSyntaxError(f"not a formula: {formula!r}")


def free_variables(formula: Formula) -> frozenset[str]:
    match formula:
        case Atom(_, args):
            return frozenset(args)
        case Equal(left, right):
            return frozenset((left, right))
        case Not(body):
            return free_variables(body)
        case And(left, right) | Or(left, right) | Implies(left, right):
            return free_variables(left) | free_variables(right)
        case Exists(var, body) | Forall(var, body):
            return free_variables(body) - {var}
    raise FormulaSyntaxError(f"not a formula: {formula!r}")


def existential_block(formula: Formula) -> tuple[list[str], Formula]:
    variables = []
    while isinstance(formula, Exists):
        variables.append(formula.var)
        formula = formula.body
    return variables, formula


@dataclass(frozen=True)
class Relation:
    name: str
    arity: int
    automaton: OrdinalAutomaton


@dataclass(frozen=True, eq=False)
class Presentation:
    alpha: Ordinal
    domain: OrdinalAutomaton
    relations: dict[str, Relation] = field(default_factory=dict)
    equality: OrdinalAutomaton | None = None
    name: str = ""

    def __post_init__(self) -> None:
        base = self.domain.alphabet.base_alphabet
        if self.domain.arity != 1:
            raise FormulaArityError("the domain automaton must be one-dimensional")
        for rel in self.relations.values():
            if rel.arity < 1 or rel.automaton.arity != rel.arity:
                raise FormulaArityError(f"relation {rel.name} declares arity {rel.arity}, automaton has {rel.automaton.arity}")
        if self.equality is not None and self.equality.arity != 2:
            raise FormulaArityError("the equality automaton must be binary")
        for a in self.automata():
            if a.alphabet.base_alphabet != base:
                raise AlphabetMismatchError("all automata of a presentation share one alphabet")
            errors = [d for d in validate(a) if d.severity == "error"]
            if errors:
                raise FileFormatError(f"invalid automaton in presentation: {errors[0]}")

    @property
    def base_alphabet(self):
        return self.domain.alphabet.base_alphabet

    @property
    def signature(self) -> dict[str, int]:
        return {name: rel.arity for name, rel in self.relations.items()}

    @property
    def injective(self) -> bool:
        return self.equality is None

    def automata(self) -> list[OrdinalAutomaton]:
        extra = [] if self.equality is None else [self.equality]
        return [self.domain, *(rel.automaton for rel in self.relations.values()), *extra]

    @cached_property
    def policy(self) -> CapPolicy:
        return cap_policy(self.automata(), self.alpha)

    @cached_property
    def compiler(self) -> "FormulaCompiler":
        return FormulaCompiler(self)


@dataclass(frozen=True)
class Compiled:
    variables: tuple[str, ...]
    nfa: GapNFA


class FormulaCompiler:
    def __init__(self, presentation: Presentation) -> None:
        self.presentation = presentation
        self.policy = presentation.policy
        self.base = presentation.base_alphabet
        self._domain = to_gap_nfa(presentation.domain, self.policy)
        # one compiler per presentation, used from a single thread
        self._memo: dict[Formula, Compiled] = {}

    def domain_on(self, variables: Sequence[str], var: str) -> GapNFA:
        return cylindrify_nfa(self._domain, len(variables), [variables.index(var)])

    def _restrict(self, nfa: GapNFA, variables: Sequence[str], names) -> GapNFA:
        for var in names:
            nfa = intersect(nfa, self.domain_on(variables, var))
        return nfa

    def extend(self, compiled: Compiled, variables: Sequence[str]) -> GapNFA:
        variables = list(variables)
        if list(compiled.variables) == variables:
            return compiled.nfa
        coords = [variables.index(v) for v in compiled.variables]
        nfa = cylindrify_nfa(compiled.nfa, len(variables), coords)
        return self._restrict(nfa, variables, [v for v in variables if v not in compiled.variables])

    def _atom(self, automaton: OrdinalAutomaton, args: Sequence[str]) -> Compiled:
        variables = tuple(sorted(set(args)))
        embedded = embed(automaton, len(variables), [variables.index(x) for x in args])
        nfa = to_gap_nfa(embedded, self.policy)
        return Compiled(variables, self._restrict(nfa, variables, variables))

    def compile(self, formula: Formula) -> Compiled:
        if formula not in self._memo:
            self._memo[formula] = self._compile(formula)
        return self._memo[formula]

    def _compile(self, formula: Formula) -> Compiled:
        match formula:
            case Atom(relation, args):
                return self._atom(self.presentation.relations[relation].automaton, args)
            case Equal(left, right):
                eq = self.presentation.equality or equality_automaton(self.base, 2)
                return self._atom(eq, (left, right))
            case Not(body):
                inner = self.compile(body)
                nfa = self._restrict(complement(inner.nfa), inner.variables, inner.variables)
                return Compiled(inner.variables, nfa)
            case And(left, right) | Or(left, right):
                a, b = self.compile(left), self.compile(right)
                variables = tuple(sorted(set(a.variables) | set(b.variables)))
                combine = intersect if isinstance(formula, And) else union_nfa
                return Compiled(variables, combine(self.extend(a, variables), self.extend(b, variables)))
            case Implies(left, right):
                return self.compile(Or(Not(left), right))
            case Exists(var, body):
                inner = self.compile(body)
                if var not in inner.variables:
                    if self._domain.is_empty():
                        return Compiled(inner.variables, empty_nfa(self.policy, inner.nfa.alphabet))
                    return inner
                nfa = exists_project(inner.nfa, inner.variables.index(var))
                logger.debug("exists %s: %r", var, nfa)
                return Compiled(tuple(v for v in inner.variables if v != var), nfa)
            case Forall(var, body):
                return self.compile(Not(Exists(var, Not(body))))
        raise FormulaSyntaxError(f"not a formula: {formula!r}")


def _checked(formula: Formula, presentation: Presentation) -> Formula:
    _check(formula, presentation.signature)
    return formula


def compile(formula: Formula, presentation: Presentation) -> Compiled:
    return presentation.compiler.compile(_checked(formula, presentation))


def decide(sentence: Formula, presentation: Presentation) -> bool:
    free = free_variables(sentence)
    if free:
        raise FormulaSyntaxError(f"not a sentence, free variables: {sorted(free)}")
    result = not compile(sentence, presentation).nfa.is_empty()
    logger.info("decide %s -> %s", format_formula(sentence), result)
    return result


def _tuple_word(presentation: Presentation, variables: Sequence[str], assignment: Mapping[str, AlphaWord]) -> AlphaWord:
    if not variables:
        return blank_word(presentation.alpha, presentation.base_alphabet.product(0))
    return convolve([assignment[v] for v in variables])


def holds(formula: Formula, assignment: Mapping[str, AlphaWord], presentation: Presentation) -> bool:
    match formula:
        case Atom(relation, args):
            rel = presentation.relations[relation]
            return member(rel.automaton, convolve([assignment[x] for x in args]))
        case Equal(left, right):
            if presentation.equality is None:
                return assignment[left] == assignment[right]
            return member(presentation.equality, convolve([assignment[left], assignment[right]]))
        case Not(body):
            return not holds(body, assignment, presentation)
        case And(left, right):
            return holds(left, assignment, presentation) and holds(right, assignment, presentation)
        case Or(left, right):
            return holds(left, assignment, presentation) or holds(right, assignment, presentation)
        case Implies(left, right):
            return not holds(left, assignment, presentation) or holds(right, assignment, presentation)
        case Exists() | Forall():
            compiled = compile(formula, presentation)
            word = _tuple_word(presentation, compiled.variables, assignment)
            return accepts(compiled.nfa, abstract(compiled.nfa.policy, word))
    raise FormulaSyntaxError(f"not a formula: {formula!r}")


def find_witness(sentence: Formula, presentation: Presentation) -> tuple[AlphaWord, ...] | None:
    variables, matrix = existential_block(sentence)
    if not variables:
        raise FormulaSyntaxError("find_witness needs a sentence starting with exists")
    free = free_variables(matrix) - set(variables)
    if free:
        raise FormulaSyntaxError(f"not a sentence, free variables: {sorted(free)}")

    compiler = presentation.compiler
    inner = compile(matrix, presentation)
    ordered = sorted(set(variables))
    nfa = compiler.extend(inner, ordered)
    gw = emptiness_witness(nfa)
    if gw is None:
        logger.info("no witness for %s", format_formula(sentence))
        return None

    words = split(decode(gw, nfa.alphabet))
    assignment = dict(zip(ordered, words))
    if not holds(matrix, assignment, presentation):
        raise ConcretizationError(f"witness for {format_formula(sentence)} fails direct verification")
    logger.info("witness for %s found", format_formula(sentence))
    return tuple(assignment[v] for v in variables)


def presentation_to_dict(presentation: Presentation) -> dict:
    return {
        "schema": REPORT_SCHEMA_VERSION,
        "name": presentation.name,
        "alpha": format_ordinal(presentation.alpha),
        "domain": automaton_to_dict(presentation.domain),
        "relations": {
            name: {"arity": rel.arity, "automaton": automaton_to_dict(rel.automaton)}
            for name, rel in sorted(presentation.relations.items())
        },
        "equality": "letterwise" if presentation.equality is None else automaton_to_dict(presentation.equality),
    }


def presentation_from_dict(doc: dict) -> Presentation:
    if not isinstance(doc, dict):
        raise FileFormatError("a presentation document must be a JSON object")
    check_schema(doc)
    try:
        relations = {
            name: Relation(name, int(entry["arity"]), automaton_from_dict(entry["automaton"]))
            for name, entry in doc.get("relations", {}).items()
        }
        equality = doc.get("equality", "letterwise")
        return Presentation(
            parse(doc["alpha"]),
            automaton_from_dict(doc["domain"]),
            relations,
            None if equality in (None, "letterwise") else automaton_from_dict(equality),
            doc.get("name", ""),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise FileFormatError(f"malformed presentation document: {e!r}") from e


def load_presentation(path: str | Path) -> Presentation:
    return presentation_from_dict(read_json(path))


def dump_presentation(presentation: Presentation, path: str | Path) -> None:
    write_json(path, presentation_to_dict(presentation))
