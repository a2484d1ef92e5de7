"""Exact real-root counting for univariate rational polynomials.

Coefficient lists are ascending-degree ``Fraction`` sequences.  Used by
the ellipticity check, where a wrong yes/no from floating point would
poison the hypothesis report; Sturm chains over exact rationals give a
certificate instead.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence, Tuple

Poly = List[Fraction]


def trim(p: Sequence[Fraction]) -> Poly:
    out = list(p)
    while out and out[-1] == 0:
        out.pop()
    return out


def degree(p: Poly) -> int:
    return len(p) - 1


def evaluate(p: Poly, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def derivative(p: Poly) -> Poly:
    return trim([c * k for k, c in enumerate(p)][1:])


def poly_rem(a: Poly, b: Poly) -> Poly:
    """Remainder of a by b (b nonzero)."""
    a = list(a)
    db, lb = degree(b), b[-1]
    while len(a) - 1 >= db and trim(a):
        da = len(a) - 1
        factor = a[-1] / lb
        shift = da - db
        for i, c in enumerate(b):
            a[i + shift] -= factor * c
        a = trim(a)
        if not a:
            break
    return trim(a)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    a, b = trim(a), trim(b)
    while b:
        a, b = b, poly_rem(a, b)
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def sturm_chain(p: Poly) -> List[Poly]:
    chain = [trim(p), derivative(p)]
    while chain[-1]:
        rem = poly_rem(chain[-2], chain[-1])
        if not rem:
            break
        chain.append([-c for c in rem])
    return [q for q in chain if q]


def _variations(chain: List[Poly], x: Fraction) -> int:
    signs = []
    for q in chain:
        v = evaluate(q, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    count = 0
    for a, b in zip(signs, signs[1:]):
        if a != b:
            count += 1
    return count


def count_roots_in(p: Poly, a: Fraction, b: Fraction) -> int:
    """Number of distinct real roots in the half-open interval (a, b]."""
    p = trim(p)
    if degree(p) < 1:
        return 0
    chain = sturm_chain(p)
    return _variations(chain, a) - _variations(chain, b)


def cauchy_bound(p: Poly) -> Fraction:
    p = trim(p)
    lead = abs(p[-1])
    m = max((abs(c) for c in p[:-1]), default=Fraction(0))
    return Fraction(1) + m / lead


def real_roots_outside(p: Poly, radius: Fraction) -> int:
    """Distinct real roots x with |x| >= radius (radius > 0)."""
    p = trim(p)
    if degree(p) < 1:
        return 0
    bound = cauchy_bound(p) + 1
    n = count_roots_in(p, radius, bound) + count_roots_in(p, -bound, -radius)
    # (a, b] misses a root exactly at +radius; [-radius, ...) counts one
    # at -radius which must be kept, so only +radius needs the fixup.
    if evaluate(p, radius) == 0:
        n += 1
    if evaluate(p, -radius) == 0:
        # counted by (-bound, -radius]; nothing to do
        pass
    return n


def isolate_root_outside(p: Poly, radius: Fraction,
                         tol: float = 1e-9) -> float:
    """A witness real root with |x| >= radius, located to ``tol``."""
    p = trim(p)
    if evaluate(p, radius) == 0:
        return float(radius)
    if evaluate(p, -radius) == 0:
        return float(-radius)
    bound = cauchy_bound(p) + 1
    for lo, hi in ((radius, bound), (-bound, -radius)):
        if count_roots_in(p, lo, hi) > 0:
            while float(hi - lo) > tol:
                mid = (lo + hi) / 2
                if count_roots_in(p, lo, mid) > 0:
                    hi = mid
                else:
                    lo = mid
            return float((lo + hi) / 2)
    raise ValueError("no root outside the given radius")


def common_real_part(re: Poly, im: Poly) -> Tuple[Poly, bool]:
    """Polynomial whose real roots are the common real roots of re, im.

    Returns (poly, degenerate) where degenerate=True means both parts
    are identically zero.
    """
    re, im = trim(re), trim(im)
    if not re and not im:
        return [], True
    if not re:
        return im, False
    if not im:
        return re, False
    return poly_gcd(re, im), False
