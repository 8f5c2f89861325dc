"""Exact root location for univariate polynomials over the rationals.

Polynomials are dense coefficient lists, lowest degree first, with Fraction
entries.  Rational roots come from the rational root theorem with exact
deflation; the existence of further positive real (hence irrational) roots
is certified by a Sturm chain evaluated at exact rational endpoints.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

Poly = list[Fraction]


def poly_trim(p: Poly) -> Poly:
    while p and p[-1] == 0:
        p = p[:-1]
    return p


def poly_eval(p: Poly, x: Fraction) -> Fraction:
    out = Fraction(0)
    for c in reversed(p):
        out = out * x + c
    return out


def poly_derivative(p: Poly) -> Poly:
    return [i * c for i, c in enumerate(p)][1:]


def poly_neg_rem(a: Poly, b: Poly) -> Poly:
    """-(a mod b), the Sturm-chain successor."""
    a = a[:]
    while len(a) >= len(b) and poly_trim(a):
        if a[-1] == 0:
            a.pop()
            continue
        factor = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[i + shift] -= factor * c
        a.pop()
    return [-c for c in poly_trim(a)]


def poly_gcd(a: Poly, b: Poly) -> Poly:
    a, b = poly_trim(a[:]), poly_trim(b[:])
    while b:
        r = poly_neg_rem(a, b)
        a, b = b, r
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def poly_deflate(p: Poly, root: Fraction) -> Poly:
    """Exact synthetic division by (x - root); remainder must be zero."""
    quotient: Poly = []
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * root + c
        quotient.append(acc)
    remainder = quotient.pop()
    if remainder != 0:
        raise ValueError(f"{root} is not a root")
    return list(reversed(quotient))


def rational_roots(p: Poly) -> dict[Fraction, int]:
    """All rational roots with multiplicities (exact)."""
    p = poly_trim(p[:])
    if not p:
        raise ValueError("zero polynomial has every root")
    roots: dict[Fraction, int] = {}
    # factor out x^m
    mult0 = 0
    while p and p[0] == 0:
        p = p[1:]
        mult0 += 1
    if mult0:
        roots[Fraction(0)] = mult0
    if len(p) <= 1:
        return roots
    # clear denominators to integer coefficients
    den = 1
    for c in p:
        den = den * c.denominator // gcd(den, c.denominator)
    ip = [int(c * den) for c in p]
    content = 0
    for c in ip:
        content = gcd(content, abs(c))
    ip = [c // content for c in ip]
    for num in _divisors(abs(ip[0])):
        for dnm in _divisors(abs(ip[-1])):
            for sign in (1, -1):
                cand = Fraction(sign * num, dnm)
                while len(p) > 1 and poly_eval(p, cand) == 0:
                    roots[cand] = roots.get(cand, 0) + 1
                    p = poly_deflate(p, cand)
    return roots


def _divisors(n: int) -> list[int]:
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def _sturm_chain(p: Poly) -> list[Poly]:
    chain = [poly_trim(p[:]), poly_trim(poly_derivative(p))]
    while chain[-1]:
        nxt = poly_neg_rem(chain[-2], chain[-1])
        chain.append(nxt)
    chain.pop()
    return chain


def _sign_changes(chain: list[Poly], x: Fraction) -> int:
    signs = []
    for q in chain:
        v = poly_eval(q, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_positive_real_roots(p: Poly) -> int:
    """Number of distinct real roots in (0, infinity), exactly."""
    p = poly_trim(p[:])
    while p and p[0] == 0:
        p = p[1:]
    if len(p) <= 1:
        return 0
    square_free = p
    g = poly_gcd(p, poly_derivative(p))
    if len(g) > 1:
        square_free = _poly_quotient(p, g)
    chain = _sturm_chain(square_free)
    bound = Fraction(1) + max(abs(c) for c in square_free) / abs(square_free[-1])
    return _sign_changes(chain, Fraction(0)) - _sign_changes(chain, bound)


def _poly_quotient(a: Poly, b: Poly) -> Poly:
    """Exact quotient for b | a."""
    a = a[:]
    out: Poly = [Fraction(0)] * (len(a) - len(b) + 1)
    while len(a) >= len(b):
        if a[-1] == 0:
            a.pop()
            continue
        factor = a[-1] / b[-1]
        shift = len(a) - len(b)
        out[shift] = factor
        for i, c in enumerate(b):
            a[i + shift] -= factor * c
        a.pop()
    return poly_trim(out)


def has_positive_irrational_root(p: Poly) -> bool:
    """True when p has a positive real root that is not rational."""
    p = poly_trim(p[:])
    if len(p) <= 1:
        return False
    for root, mult in rational_roots(p).items():
        for _ in range(mult):
            p = poly_deflate(p, root)
    return count_positive_real_roots(p) > 0
