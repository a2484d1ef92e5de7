"""Exact sparse symbol polynomials.

A symbol is a finite sum of monomials

    c * eps^(e/qden) * zeta1^z1 * ... * zetaK^zK * xin^d

with c a complex number whose real and imaginary parts are exact
rationals.  ``eps`` is the perturbation parameter (its exponent may be
negative and fractional), ``zeta1..zetaK`` are the tangential
frequencies and ``xin`` the normal frequency (or its rescaled version,
conventionally printed ``eta``).

Representation:

    terms: Dict[(e, zdeg, xdeg), CRat]
      e     integer numerator of the eps exponent (true exponent e/qden)
      zdeg  tuple of K nonnegative ints, degrees in zeta1..zetaK
      xdeg  nonnegative int, degree in xin

Zero coefficients are never stored, ``qden`` is kept minimal positive,
so structural equality of ``(nvars, qden, terms)`` is exact polynomial
equality.  All arithmetic is exact; floats enter only through
:meth:`SymbolPoly.eval_eps`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple

import numpy as np

from .errors import EmptyPolynomial, NegativeValuation, StructuralError

Key = Tuple[int, Tuple[int, ...], int]


@dataclass(frozen=True)
class CRat:
    """Complex number with exact rational real and imaginary parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @staticmethod
    def of(value) -> "CRat":
        """Coerce an int, Fraction, CRat or (re, im) pair."""
        if isinstance(value, CRat):
            return value
        if isinstance(value, tuple):
            return CRat(Fraction(value[0]), Fraction(value[1]))
        return CRat(Fraction(value))

    def __add__(self, other: "CRat") -> "CRat":
        return CRat(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "CRat") -> "CRat":
        return CRat(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "CRat":
        return CRat(-self.re, -self.im)

    def __mul__(self, other: "CRat") -> "CRat":
        return CRat(self.re * other.re - self.im * other.im,
                    self.re * other.im + self.im * other.re)

    def __truediv__(self, other: "CRat") -> "CRat":
        d = other.re * other.re + other.im * other.im
        if d == 0:
            raise ZeroDivisionError("division by zero CRat")
        return CRat((self.re * other.re + self.im * other.im) / d,
                    (self.im * other.re - self.re * other.im) / d)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def conj(self) -> "CRat":
        return CRat(self.re, -self.im)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        mag = abs(self.im)
        imtxt = "i" if mag == 1 else f"{mag}*i"
        return f"({self.re} {sign} {imtxt})"


CR_ZERO = CRat()
CR_ONE = CRat(Fraction(1))
CR_I = CRat(Fraction(0), Fraction(1))


def _gcd_all(qden: int, keys: Iterable[Key]) -> int:
    g = qden
    for e, _, _ in keys:
        g = math.gcd(g, abs(e))
        if g == 1:
            return 1
    return g


class SymbolPoly:
    """Sparse exact polynomial in (eps^(1/qden), zeta, xin).

    Instances are immutable in practice: no method mutates ``terms``
    after construction, so they can be shared freely across threads.
    """

    __slots__ = ("nvars", "qden", "terms")

    def __init__(self, nvars: int, qden: int = 1,
                 terms: Mapping[Key, CRat] | None = None):
        if qden <= 0:
            raise StructuralError("qden must be a positive integer")
        clean: Dict[Key, CRat] = {}
        for (e, zdeg, xdeg), c in (terms or {}).items():
            c = CRat.of(c)
            if c.is_zero():
                continue
            zdeg = tuple(zdeg)
            if len(zdeg) != nvars:
                raise StructuralError(
                    f"zdeg {zdeg} does not match nvars={nvars}")
            if xdeg < 0 or any(z < 0 for z in zdeg):
                raise StructuralError("variable degrees must be nonnegative")
            clean[(e, zdeg, xdeg)] = c
        g = _gcd_all(qden, clean.keys()) if clean else qden
        if g > 1:
            clean = {(e // g, z, d): c for (e, z, d), c in clean.items()}
            qden //= g
        self.nvars = nvars
        self.qden = qden
        self.terms = clean

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------

    @staticmethod
    def zero(nvars: int) -> "SymbolPoly":
        return SymbolPoly(nvars)

    @staticmethod
    def const(nvars: int, value) -> "SymbolPoly":
        c = CRat.of(value)
        return SymbolPoly(nvars, 1, {(0, (0,) * nvars, 0): c})

    @staticmethod
    def eps_power(nvars: int, exponent: Fraction | int) -> "SymbolPoly":
        q = Fraction(exponent)
        return SymbolPoly(nvars, q.denominator,
                          {(q.numerator, (0,) * nvars, 0): CR_ONE})

    @staticmethod
    def var_zeta(nvars: int, index: int) -> "SymbolPoly":
        if not 0 <= index < nvars:
            raise StructuralError(f"zeta index {index} out of range")
        z = [0] * nvars
        z[index] = 1
        return SymbolPoly(nvars, 1, {(0, tuple(z), 0): CR_ONE})

    @staticmethod
    def var_xin(nvars: int) -> "SymbolPoly":
        return SymbolPoly(nvars, 1, {(0, (0,) * nvars, 1): CR_ONE})

    # ------------------------------------------------------------------
    # ring structure
    # ------------------------------------------------------------------

    def _aligned(self, other: "SymbolPoly"):
        if self.nvars != other.nvars:
            raise StructuralError(
                f"nvars mismatch: {self.nvars} vs {other.nvars}")
        q = math.lcm(self.qden, other.qden)
        sa, sb = q // self.qden, q // other.qden
        ta = {(e * sa, z, d): c for (e, z, d), c in self.terms.items()}
        tb = {(e * sb, z, d): c for (e, z, d), c in other.terms.items()}
        return q, ta, tb

    def __add__(self, other: "SymbolPoly") -> "SymbolPoly":
        q, ta, tb = self._aligned(other)
        for k, c in tb.items():
            ta[k] = ta.get(k, CR_ZERO) + c
        return SymbolPoly(self.nvars, q, ta)

    def __sub__(self, other: "SymbolPoly") -> "SymbolPoly":
        return self + (-other)

    def __neg__(self) -> "SymbolPoly":
        return SymbolPoly(self.nvars, self.qden,
                          {k: -c for k, c in self.terms.items()})

    def __mul__(self, other: "SymbolPoly") -> "SymbolPoly":
        q, ta, tb = self._aligned(other)
        out: Dict[Key, CRat] = {}
        for (e1, z1, d1), c1 in ta.items():
            for (e2, z2, d2), c2 in tb.items():
                k = (e1 + e2, tuple(a + b for a, b in zip(z1, z2)), d1 + d2)
                prod = c1 * c2
                acc = out.get(k)
                out[k] = prod if acc is None else acc + prod
        return SymbolPoly(self.nvars, q, out)

    def __pow__(self, n: int) -> "SymbolPoly":
        if n < 0:
            raise StructuralError("negative powers of a polynomial")
        result = SymbolPoly.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, value) -> "SymbolPoly":
        c0 = CRat.of(value)
        return SymbolPoly(self.nvars, self.qden,
                          {k: c * c0 for k, c in self.terms.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymbolPoly):
            return NotImplemented
        return (self.nvars == other.nvars and self.qden == other.qden
                and self.terms == other.terms)

    __hash__ = None  # mutable dict inside; compare by value only

    def is_zero(self) -> bool:
        return not self.terms

    # ------------------------------------------------------------------
    # structure queries
    # ------------------------------------------------------------------

    def sorted_keys(self) -> list[Key]:
        """Deterministic (e, xdeg, zdeg)-lexicographic term order."""
        return sorted(self.terms, key=lambda k: (k[0], k[2], k[1]))

    def xin_degree(self) -> int:
        return max((d for _, _, d in self.terms), default=0)

    def zeta_total_degree(self) -> int:
        return max((sum(z) for _, z, _ in self.terms), default=0)

    def depends_on_zeta(self) -> bool:
        return any(any(z) for _, z, _ in self.terms)

    def depends_on_eps(self) -> bool:
        return any(e != 0 for e, _, _ in self.terms)

    def min_valuation(self) -> Fraction:
        """Smallest eps-exponent appearing in the polynomial."""
        if not self.terms:
            raise EmptyPolynomial("zero polynomial has no valuation")
        return Fraction(min(e for e, _, _ in self.terms), self.qden)

    def leading_eps_exponent(self) -> Fraction:
        """Eps-valuation of the leading xin coefficient (the symbol's M).

        Requires all top-degree terms to share one eps exponent,
        otherwise the operator has no well defined leading scaling.
        """
        m = self.xin_degree()
        exps = {e for e, _, d in self.terms if d == m}
        if len(exps) != 1:
            raise StructuralError(
                "leading xin coefficient mixes several eps powers")
        return Fraction(exps.pop(), self.qden)

    def leading_eps_valuation(self) -> Fraction:
        """Smallest eps-exponent among the top xin-degree terms."""
        m = self.xin_degree()
        return Fraction(min(e for e, _, d in self.terms if d == m),
                        self.qden)

    # ------------------------------------------------------------------
    # the rescaling / limit calculus
    # ------------------------------------------------------------------

    def rescale(self, gamma: Fraction | int, beta: Fraction | int) -> "SymbolPoly":
        """Substitute xin -> eta / eps^gamma and multiply by eps^(-beta).

        Exact: each term (e/qden, z, d) moves to eps-exponent
        e/qden - gamma*d - beta at unchanged (z, d).
        """
        gamma = Fraction(gamma)
        beta = Fraction(beta)
        q = math.lcm(self.qden, gamma.denominator, beta.denominator)
        s = q // self.qden
        out: Dict[Key, CRat] = {}
        for (e, z, d), c in self.terms.items():
            e_new = e * s - int(gamma * q) * d - int(beta * q)
            k = (e_new, z, d)
            acc = out.get(k)
            out[k] = c if acc is None else acc + c
        return SymbolPoly(self.nvars, q, out)

    def limit_eps_zero(self) -> "SymbolPoly":
        """Drop O(eps) terms; error if negative eps powers remain."""
        neg = [e for e, _, _ in self.terms if e < 0]
        if neg:
            raise NegativeValuation(
                f"minimum eps exponent {Fraction(min(neg), self.qden)} < 0")
        kept = {k: c for k, c in self.terms.items() if k[0] == 0}
        return SymbolPoly(self.nvars, 1,
                          {(0, z, d): c for (_, z, d), c in kept.items()})

    def drop_xin_prefactor(self, k: int) -> "SymbolPoly":
        """Divide by xin^k; every term must have xdeg >= k."""
        if any(d < k for _, _, d in self.terms):
            raise StructuralError(f"polynomial not divisible by xin^{k}")
        return SymbolPoly(self.nvars, self.qden,
                          {(e, z, d - k): c
                           for (e, z, d), c in self.terms.items()})

    def xin_low_degree(self) -> int:
        if not self.terms:
            raise EmptyPolynomial("zero polynomial")
        return min(d for _, _, d in self.terms)

    def freeze_zeta(self, zeta: Sequence) -> "SymbolPoly":
        """Evaluate zeta at exact rational (or CRat) values.

        Returns an nvars=0 polynomial in (eps, xin); all arithmetic stays
        exact, so downstream valuations are exact too.
        """
        vals = [CRat.of(v) for v in zeta]
        if len(vals) != self.nvars:
            raise StructuralError("zeta vector length != nvars")
        out: Dict[Key, CRat] = {}
        for (e, z, d), c in self.terms.items():
            for zi, vi in zip(z, vals):
                if zi:
                    for _ in range(zi):
                        c = c * vi
            k = (e, (), d)
            acc = out.get(k)
            out[k] = c if acc is None else acc + c
        return SymbolPoly(0, self.qden, out)

    def zeta_at_zero(self) -> "SymbolPoly":
        """Keep only terms with no zeta dependence (the eta=...,zeta=0 slice
        is :meth:`xin_at_zero`; this one sets zeta=0)."""
        kept = {k: c for k, c in self.terms.items() if not any(k[1])}
        return SymbolPoly(self.nvars, self.qden, kept)

    def xin_at_zero(self) -> "SymbolPoly":
        """Set xin = 0 (keep xdeg == 0 terms)."""
        kept = {k: c for k, c in self.terms.items() if k[2] == 0}
        return SymbolPoly(self.nvars, self.qden, kept)

    def subst(self, zeta_images: Sequence["SymbolPoly"],
              xin_image: "SymbolPoly") -> "SymbolPoly":
        """Polynomial substitution zeta_i -> zeta_images[i], xin -> xin_image.

        Images must be eps-free (pure frequency changes, as produced by an
        affine change of coordinates); eps passes through untouched.
        """
        if len(zeta_images) != self.nvars:
            raise StructuralError("need one image per zeta variable")
        imgs = list(zeta_images) + [xin_image]
        nv = imgs[0].nvars if imgs else self.nvars
        for p in imgs:
            if p.nvars != nv:
                raise StructuralError("images disagree on nvars")
            if p.depends_on_eps():
                raise StructuralError("substitution images must be eps-free")
        acc = SymbolPoly.zero(nv)
        pow_cache: Dict[Tuple[int, int], SymbolPoly] = {}

        def power(i: int, n: int) -> SymbolPoly:
            key = (i, n)
            if key not in pow_cache:
                pow_cache[key] = imgs[i] ** n
            return pow_cache[key]

        for (e, z, d), c in self.terms.items():
            mono = SymbolPoly.const(nv, c)
            for i, zi in enumerate(z):
                if zi:
                    mono = mono * power(i, zi)
            if d:
                mono = mono * power(self.nvars, d)
            mono = mono * SymbolPoly.eps_power(nv, Fraction(e, self.qden))
            acc = acc + mono
        return acc

    # ------------------------------------------------------------------
    # numeric evaluation
    # ------------------------------------------------------------------

    def eval_eps(self, eps: float, zeta: Sequence[complex] = ()) -> np.ndarray:
        """Numeric coefficients (ascending xin degree) at fixed eps, zeta.

        eps must be positive; fractional powers are evaluated as floats.
        """
        if eps <= 0:
            raise StructuralError("eps must be positive")
        zeta = tuple(zeta)
        if len(zeta) != self.nvars:
            raise StructuralError("zeta vector length != nvars")
        coeffs = np.zeros(self.xin_degree() + 1, dtype=complex)
        for (e, z, d), c in self.terms.items():
            value = complex(c) * eps ** (e / self.qden)
            for zi, zv in zip(z, zeta):
                if zi:
                    value *= zv ** zi
            coeffs[d] += value
        return coeffs

    # ------------------------------------------------------------------
    # printing
    # ------------------------------------------------------------------

    def to_string(self, xin_name: str = "xin") -> str:
        if not self.terms:
            return "0"
        pieces = []
        for e, z, d in self.sorted_keys():
            c = self.terms[(e, z, d)]
            factors = []
            if e != 0:
                q = Fraction(e, self.qden)
                factors.append(f"eps^{q}" if q.denominator == 1
                               else f"eps^({q})")
            for i, zi in enumerate(z):
                if zi == 1:
                    factors.append(f"zeta{i + 1}")
                elif zi > 1:
                    factors.append(f"zeta{i + 1}^{zi}")
            if d == 1:
                factors.append(xin_name)
            elif d > 1:
                factors.append(f"{xin_name}^{d}")
            coeff_txt = str(c)
            if factors and coeff_txt == "1":
                text = "*".join(factors)
            elif factors and coeff_txt == "-1":
                text = "-" + "*".join(factors)
            else:
                text = "*".join([coeff_txt] + factors)
            pieces.append(text)
        out = pieces[0]
        for p in pieces[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"SymbolPoly({self.to_string()})"
