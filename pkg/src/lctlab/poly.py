"""Sparse polynomials over Q and monomial orders."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import DomainError, ParseError
from .ideal import Exponent, format_monomial, parse_monomial, read_header

ORDER_KINDS = ("grevlex", "lex", "grlex")


@dataclass(frozen=True)
class MonomialOrder:
    kind: str = "grevlex"
    priority: tuple[int, ...] | None = None  # variable indices from largest to smallest

    def __post_init__(self):
        if self.kind not in ORDER_KINDS:
            raise DomainError(f"unknown monomial order {self.kind!r}; expected one of {ORDER_KINDS}")

    def perm(self, n: int) -> tuple[int, ...]:
        p = tuple(range(n)) if self.priority is None else tuple(self.priority)
        if sorted(p) != list(range(n)):
            raise DomainError(f"variable priority {p} is not a permutation of 0..{n - 1}")
        return p

    def key(self, e: Sequence[int]) -> tuple:
        """Sort key; a larger key means a larger monomial."""
        p = self.perm(len(e))
        if self.kind == "lex":
            return tuple(e[i] for i in p)
        deg = sum(e)
        if self.kind == "grlex":
            return (deg,) + tuple(e[i] for i in p)
        return (deg,) + tuple(-e[i] for i in reversed(p))


class Polynomial:
    """Immutable sparse polynomial: a mapping exponent -> nonzero rational coefficient."""

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms: Mapping[Exponent, Fraction] | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Exponent, Fraction] = {}
        for e, c in items:
            e = tuple(int(v) for v in e)
            if len(e) != dim:
                raise DomainError(f"term exponent {e} does not match dimension {dim}")
            c = Fraction(c)
            s = clean.get(e, Fraction(0)) + c
            if s:
                clean[e] = s
            else:
                clean.pop(e, None)
        self.dim = dim
        self.terms = clean

    @classmethod
    def monomial(cls, e: Sequence[int], c=1) -> "Polynomial":
        return cls(len(e), {tuple(e): Fraction(c)})

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self, order: MonomialOrder) -> list[tuple[Exponent, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: order.key(t[0]), reverse=True)

    def leading(self, order: MonomialOrder) -> tuple[Exponent, Fraction]:
        if not self.terms:
            raise DomainError("the zero polynomial has no leading term")
        return max(self.terms.items(), key=lambda t: order.key(t[0]))

    def __add__(self, other: "Polynomial") -> "Polynomial":
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, Fraction(0)) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Polynomial(self.dim, out)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.dim, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        out: dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return Polynomial(self.dim, out)

    def scale_shift(self, c: Fraction, shift: Sequence[int]) -> "Polynomial":
        """c * x^shift * self."""
        return Polynomial(
            self.dim, {tuple(a + b for a, b in zip(e, shift)): c * v for e, v in self.terms.items()}
        )

    def monic(self, order: MonomialOrder) -> "Polynomial":
        _, lc = self.leading(order)
        return Polynomial(self.dim, {e: c / lc for e, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self.dim == other.dim and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.dim, frozenset(self.terms.items())))

    def to_str(self, order: MonomialOrder | None = None) -> str:
        if not self.terms:
            return "0"
        order = order or MonomialOrder()
        out = []
        for i, (e, c) in enumerate(self.sorted_terms(order)):
            sign = "-" if c < 0 else "+"
            a = abs(c)
            mono = format_monomial(e)
            if mono == "1":
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            out.append(("-" if sign == "-" else "") + body if i == 0 else f" {sign} {body}")
        return "".join(out)

    def __repr__(self) -> str:
        return f"Polynomial({self.to_str()})"


_TERM_SPLIT = re.compile(r"(?<=[^\s*^/])\s*([+-])\s*")


def parse_polynomial(text: str, dim: int) -> Polynomial:
    """Parse `3/4*x1^2*x2 + x2^3 - 1/2*x1`."""
    s = text.strip()
    if not s:
        raise ParseError("empty polynomial")
    sign = 1
    if s[0] in "+-":
        sign = -1 if s[0] == "-" else 1
        s = s[1:].strip()
    pieces = _TERM_SPLIT.split(s)
    signs = [sign] + [(-1 if op == "-" else 1) for op in pieces[1::2]]
    terms = []
    for sg, raw in zip(signs, pieces[0::2]):
        raw = raw.strip()
        if not raw:
            raise ParseError(f"malformed polynomial {text!r}")
        factors = raw.split("*")
        coef = Fraction(1)
        if re.fullmatch(r"\d+(/\d+)?", factors[0].strip()):
            try:
                coef = Fraction(factors[0].strip())
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"bad coefficient in {raw!r}") from None
            factors = factors[1:]
        exp = parse_monomial("*".join(factors), dim) if factors else (0,) * dim
        terms.append((exp, sg * coef))
    return Polynomial(dim, terms)


def parse_polynomials(text: str) -> tuple[int, list[Polynomial]]:
    lines = re.split(r"\n|\s/\s", text)
    dim, body = read_header(lines)
    if not body:
        raise ParseError("no polynomials given")
    polys = [parse_polynomial(ln, dim) for ln in body]
    polys = [p for p in polys if not p.is_zero()]
    if not polys:
        raise ParseError("all polynomials are zero")
    return dim, polys


def read_polynomials(path) -> tuple[int, list[Polynomial]]:
    with open(path, encoding="utf-8") as fh:
        return parse_polynomials(fh.read())


def format_polynomials(polys: Sequence[Polynomial], order: MonomialOrder | None = None) -> str:
    lines = [f"vars {polys[0].dim}"] + [p.to_str(order) for p in polys]
    return "\n".join(lines) + "\n"
