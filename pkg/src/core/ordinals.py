"""Ordinals below ω^ω in Cantor normal form.

An ordinal ω^d·c_d + … + ω·c_1 + c_0 is stored as the coefficient vector
(c_0, c_1, …, c_d) with c_d ≠ 0; zero is the empty vector. Canonical form is
enforced at construction, so structural equality is ordinal equality.
"""

import re
from dataclasses import dataclass
from enum import Enum
from functools import total_ordering

from config import MAX_COEFFICIENT, MAX_EXPONENT
from core.errors import OrdinalOverflowError, OrdinalRangeError, OrdinalSyntaxError

_POWER_TERM = re.compile(r"^[wω]\^(\d+)(?:\*(\d+))?$")
_OMEGA_TERM = re.compile(r"^[wω](?:\*(\d+))?$")
_FINITE_TERM = re.compile(r"^(\d+)$")


class Comparison(Enum):
    LT = -1
    EQ = 0
    GT = 1


def _checked(value: int) -> int:
    if value > MAX_COEFFICIENT:
        raise OrdinalOverflowError(f"coefficient {value} exceeds {MAX_COEFFICIENT}")
    return value


@total_ordering
@dataclass(frozen=True)
class Ordinal:
    coeffs: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        coeffs = list(self.coeffs)
        for c in coeffs:
            if not isinstance(c, int) or isinstance(c, bool) or c < 0:
                raise OrdinalRangeError(f"coefficients must be natural numbers, got {c!r}")
            _checked(c)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if len(coeffs) - 1 > MAX_EXPONENT:
            raise OrdinalOverflowError(f"exponent {len(coeffs) - 1} exceeds {MAX_EXPONENT}")
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def of(cls, n: int) -> "Ordinal":
        return cls((n,))

    @classmethod
    def omega(cls, k: int = 1, m: int = 1) -> "Ordinal":
        if k > MAX_EXPONENT:
            raise OrdinalOverflowError(f"exponent {k} exceeds {MAX_EXPONENT}")
        return cls((0,) * k + (m,))

    @property
    def degree(self) -> int:
        # -1 for zero
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def coefficient(self, j: int) -> int:
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_limit(self) -> bool:
        return bool(self.coeffs) and self.coeffs[0] == 0

    def is_finite(self) -> bool:
        return len(self.coeffs) <= 1

    def _key(self) -> tuple[int, tuple[int, ...]]:
        return len(self.coeffs), self.coeffs[::-1]

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self._key() < other._key()

    def __add__(self, other: "Ordinal") -> "Ordinal":
        if not isinstance(other, Ordinal):
            return NotImplemented
        if other.is_zero():
            return self
        e = other.degree
        head = list(self.coeffs[e + 1 :])
        middle = _checked(self.coefficient(e) + other.coeffs[e])
        return Ordinal(other.coeffs[:e] + (middle,) + tuple(head))

    def successor(self) -> "Ordinal":
        return self + ONE

    def omega_times(self, k: int) -> "Ordinal":
        """ω^k · self (left multiplication shifts the coefficient vector)."""
        if self.is_zero():
            return self
        return Ordinal((0,) * k + self.coeffs)

    def trunc_tilde(self, n: int) -> tuple["Ordinal", tuple[int, ...]]:
        head = Ordinal((0,) * (n + 1) + self.coeffs[n + 1 :]) if len(self.coeffs) > n + 1 else ZERO
        tail = tuple(self.coefficient(i) for i in range(n, -1, -1))
        return head, tail

    def __str__(self) -> str:
        return format_ordinal(self)

    def __repr__(self) -> str:
        return f"Ordinal({format_ordinal(self)!r})"


ZERO = Ordinal()
ONE = Ordinal((1,))
OMEGA = Ordinal((0, 1))


def parse(text: str) -> Ordinal:
    compact = "".join(text.split())
    if not compact:
        raise OrdinalSyntaxError("empty ordinal literal")
    if compact == "0":
        return ZERO

    coeffs: dict[int, int] = {}
    previous: int | None = None
    for term in compact.split("+"):
        if match := _POWER_TERM.match(term):
            exponent, multiplier = int(match.group(1)), int(match.group(2) or 1)
        elif match := _OMEGA_TERM.match(term):
            exponent, multiplier = 1, int(match.group(1) or 1)
        elif match := _FINITE_TERM.match(term):
            exponent, multiplier = 0, int(match.group(1))
        else:
            raise OrdinalSyntaxError(f"bad term {term!r} in {text!r}")

        if multiplier == 0:
            raise OrdinalSyntaxError(f"zero coefficient in term {term!r}")
        if exponent > MAX_EXPONENT:
            raise OrdinalOverflowError(f"exponent {exponent} exceeds {MAX_EXPONENT}")
        if previous is not None and exponent >= previous:
            raise OrdinalSyntaxError(f"exponents must strictly decrease in {text!r}")
        previous = exponent
        coeffs[exponent] = _checked(multiplier)

    return Ordinal(tuple(coeffs.get(j, 0) for j in range(max(coeffs) + 1)))


def format_ordinal(a: Ordinal) -> str:
    if a.is_zero():
        return "0"

    terms = []
    for j in range(a.degree, -1, -1):
        c = a.coeffs[j]
        if c == 0:
            continue
        if j == 0:
            terms.append(str(c))
            continue
        base = "w" if j == 1 else f"w^{j}"
        terms.append(base if c == 1 else f"{base}*{c}")
    return "+".join(terms)


def add(a: Ordinal, b: Ordinal) -> Ordinal:
    return a + b


def compare(a: Ordinal, b: Ordinal) -> Comparison:
    if a == b:
        return Comparison.EQ
    return Comparison.LT if a < b else Comparison.GT


def interval_type(g: Ordinal, d: Ordinal) -> Ordinal:
    """The order type ε of [g, d), i.e. the unique ε with g + ε = d."""
    if d < g:
        raise OrdinalRangeError(f"interval [{g}, {d}) is reversed")
    if g == d:
        return ZERO

    j = max(i for i in range(d.degree + 1) if d.coefficient(i) != g.coefficient(i))
    return Ordinal(d.coeffs[:j] + (d.coeffs[j] - g.coefficient(j),))


def trunc_tilde(a: Ordinal, n: int) -> tuple[Ordinal, tuple[int, ...]]:
    return a.trunc_tilde(n)


def is_limit(a: Ordinal) -> bool:
    return a.is_limit()


def ordinal_sum(parts) -> Ordinal:
    total = ZERO
    for part in parts:
        total = total + part
    return total
