"""Text grammar and JSON forms for series, exponents and grid sets.

Series grammar (used in files and on the command line):

    series   := term (('+'|'-') term)* ('+' 'O(' exponent ')')?
              | 'O(' exponent ')'
              | '0'
    term     := rational ('*' 't' index '^' power)*
    power    := rational | '(' rational ')'
    rational := ('+'|'-')? digits ('/' digits)?
    exponent := '(' rational (',' rational)* ')'

Examples: ``3/2*t1^(1/2)*t2^-3 - 1*t2^2 + O((1,0))``.  Canonical printing
lists terms in increasing lex order with reduced rationals; parsing the
canonical form returns the original value.

All numbers in JSON payloads are exact rational strings; no floats appear
anywhere.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ParseError, RankMismatchError
from .exponents import Exponent
from .series import GeneralizedSeries
from .supports import Coset, GridSet


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self, expected: str) -> None:
        self.skip_ws()
        if not self.text.startswith(expected, self.pos):
            raise ParseError(f"expected {expected!r}", self.pos)
        self.pos += len(expected)

    def try_take(self, expected: str) -> bool:
        self.skip_ws()
        if self.text.startswith(expected, self.pos):
            self.pos += len(expected)
            return True
        return False

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)

    def digits(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise ParseError("expected digits", start)
        return self.text[start:self.pos]

    def rational(self) -> Fraction:
        self.skip_ws()
        sign = 1
        if self.try_take("-"):
            sign = -1
        elif self.try_take("+"):
            pass
        self.skip_ws()
        num = self.digits()
        if self.pos < len(self.text) and self.text[self.pos] == "/":
            self.pos += 1
            den = self.digits()
            return Fraction(sign * int(num), int(den))
        return Fraction(sign * int(num))

    def power(self) -> Fraction:
        if self.try_take("("):
            value = self.rational()
            self.take(")")
            return value
        return self.rational()


def parse_exponent(text: str, rank: int) -> Exponent:
    scanner = _Scanner(text)
    expo = _exponent(scanner, rank)
    if not scanner.at_end():
        raise ParseError("trailing input after exponent", scanner.pos)
    return expo


def _exponent(scanner: _Scanner, rank: int) -> Exponent:
    scanner.take("(")
    coords = [scanner.rational()]
    while scanner.try_take(","):
        coords.append(scanner.rational())
    scanner.take(")")
    if len(coords) != rank:
        raise ParseError(
            f"exponent has {len(coords)} coordinates, expected {rank}",
            scanner.pos)
    return Exponent(coords)


def parse_series(text: str, rank: int) -> GeneralizedSeries:
    """Parse the grammar above; duplicate exponents are an error."""
    scanner = _Scanner(text)
    terms: list[tuple[Exponent, Fraction]] = []
    truncation: Exponent | None = None
    if scanner.try_take("O("):
        scanner.pos -= 2
        truncation = _big_o(scanner, rank)
    else:
        sign = Fraction(-1) if scanner.try_take("-") else Fraction(1)
        terms.append(_term(scanner, rank, sign))
        while True:
            if scanner.try_take("+"):
                if scanner.peek() == "O":
                    truncation = _big_o(scanner, rank)
                    break
                terms.append(_term(scanner, rank, Fraction(1)))
            elif scanner.try_take("-"):
                terms.append(_term(scanner, rank, Fraction(-1)))
            else:
                break
    if not scanner.at_end():
        raise ParseError("trailing input after series", scanner.pos)
    seen: set[Exponent] = set()
    for expo, _ in terms:
        if expo in seen:
            raise ParseError(f"duplicate exponent {expo}")
        seen.add(expo)
    return GeneralizedSeries.from_terms(rank, terms, truncation)


def _big_o(scanner: _Scanner, rank: int) -> Exponent:
    scanner.take("O(")
    scanner.skip_ws()
    if scanner.peek() == "(":
        expo = _exponent(scanner, rank)
    else:
        # rank-1 convenience: O(3) means O((3))
        expo = Exponent((scanner.rational(),))
        if rank != 1:
            raise ParseError("bare O(q) only valid at rank 1", scanner.pos)
    scanner.take(")")
    return expo


def _term(scanner: _Scanner, rank: int,
          sign: Fraction) -> tuple[Exponent, Fraction]:
    coeff = sign * scanner.rational()
    coords = [Fraction(0)] * rank
    while scanner.try_take("*"):
        scanner.take("t")
        index = int(scanner.digits())
        if not 1 <= index <= rank:
            raise RankMismatchError(
                f"variable t{index} outside rank {rank}")
        scanner.take("^")
        coords[index - 1] += scanner.power()
    return Exponent(coords), coeff


def format_rational(q: Fraction) -> str:
    return str(q)


def _format_power(q: Fraction) -> str:
    text = str(q)
    return f"({text})" if "/" in text else text


def format_series(series: GeneralizedSeries) -> str:
    chunks: list[str] = []
    for i, (expo, coeff) in enumerate(series.terms):
        if i == 0:
            head = format_rational(coeff)
        else:
            head = (" + " if coeff > 0 else " - ") + format_rational(abs(coeff))
        factors = "".join(
            f"*t{k}^{_format_power(expo[k])}"
            for k in range(1, series.rank + 1) if expo[k] != 0)
        chunks.append(head + factors)
    if series.truncation is not None:
        tail = f"O({series.truncation})"
        return "".join(chunks) + (" + " + tail if chunks else tail)
    return "".join(chunks) if chunks else "0"


# ---------------------------------------------------------------------------
# Exponents and grid sets as JSON-friendly structures


def exponent_to_json(expo: Exponent) -> list[str]:
    return [str(c) for c in expo.coords]


def exponent_from_json(data: list, rank: int | None = None) -> Exponent:
    expo = Exponent(Fraction(str(c)) for c in data)
    if rank is not None and expo.rank != rank:
        raise RankMismatchError(
            f"exponent rank {expo.rank}, expected {rank}")
    return expo


def gridset_to_json(grid: GridSet) -> dict:
    cosets = sorted(grid.cosets, key=lambda c: (c.offset, sorted(c.generators)))
    return {
        "cosets": [
            {
                "offset": exponent_to_json(c.offset),
                "generators": [exponent_to_json(g)
                               for g in sorted(c.generators)],
            }
            for c in cosets
        ],
        "exact": grid.exact,
    }


def gridset_from_json(data: dict, rank: int) -> GridSet:
    cosets = frozenset(
        Coset(exponent_from_json(c["offset"], rank),
              frozenset(exponent_from_json(g, rank)
                        for g in c["generators"]))
        for c in data["cosets"])
    return GridSet(rank, cosets, bool(data.get("exact", False)))


def format_gridset(grid: GridSet) -> str:
    if grid.is_empty():
        body = "{ }"
    else:
        parts = []
        for c in sorted(grid.cosets,
                        key=lambda c: (c.offset, sorted(c.generators))):
            gens = ", ".join(str(g) for g in sorted(c.generators))
            parts.append(f"({c.offset}; {gens})")
        body = "{ " + " , ".join(parts) + " }"
    return body + (" exact" if grid.exact else " approx")


def parse_gridset(text: str, rank: int) -> GridSet:
    scanner = _Scanner(text)
    scanner.take("{")
    cosets: set[Coset] = set()
    if not scanner.try_take("}"):
        while True:
            scanner.take("(")
            offset = _exponent(scanner, rank)
            scanner.take(";")
            gens: set[Exponent] = set()
            if scanner.peek() != ")":
                gens.add(_exponent(scanner, rank))
                while scanner.try_take(","):
                    gens.add(_exponent(scanner, rank))
            scanner.take(")")
            cosets.add(Coset(offset, frozenset(gens)))
            if not scanner.try_take(","):
                break
        scanner.take("}")
    exact = True
    if scanner.try_take("exact"):
        exact = True
    elif scanner.try_take("approx"):
        exact = False
    if not scanner.at_end():
        raise ParseError("trailing input after grid set", scanner.pos)
    return GridSet(rank, frozenset(cosets), exact)
