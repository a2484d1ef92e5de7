"""Exponent engine: Newton polygon, singular profiles, ellipticity.

Everything here is exact.  The polygon of a univariate (in xin) view of
a symbol is the lower convex hull of the points (d, v(d)) where v(d) is
the smallest eps-exponent among the degree-d terms.  Segments of
positive slope gamma carry the roots blowing up like eps^(-gamma); the
horizontal segment length is the number of such roots.  Zero- and
negative-slope segments hold the bounded roots.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import (EmptyPolynomial, NonUniform, StructuralError,
                     ZeroPolynomial)
from .realroots import (common_real_part, isolate_root_outside,
                        real_roots_outside, trim)
from .sympoly import CRat, SymbolPoly

Segment = Tuple[Fraction, int]          # (slope, horizontal length)
Pattern = Tuple[int, Tuple[Tuple[Fraction, int], ...]]   # (m, ((gamma, mult)..))


def polygon_points(frozen: SymbolPoly) -> Dict[int, Fraction]:
    """Map xin-degree -> minimal eps-valuation, for an nvars=0 symbol."""
    if frozen.nvars != 0:
        raise StructuralError("freeze zeta before building the polygon")
    if frozen.is_zero():
        raise EmptyPolynomial("cannot build the polygon of 0")
    vals: Dict[int, Fraction] = {}
    for (e, _z, d), _c in frozen.terms.items():
        q = Fraction(e, frozen.qden)
        if d not in vals or q < vals[d]:
            vals[d] = q
    return vals


def lower_hull(points: Dict[int, Fraction]) -> List[Tuple[int, Fraction]]:
    """Vertices of the lower convex hull, left to right."""
    pts = sorted(points.items())
    hull: List[Tuple[int, Fraction]] = []
    for d, v in pts:
        while len(hull) >= 2:
            (d1, v1), (d2, v2) = hull[-2], hull[-1]
            # keep only strictly convex turns; cross <= 0 drops the middle
            if (v2 - v1) * (d - d1) >= (v - v1) * (d2 - d1):
                hull.pop()
            else:
                break
        hull.append((d, v))
    return hull


def newton_polygon(frozen: SymbolPoly) -> List[Segment]:
    """All hull segments as (slope, length), left to right.

    Roots of the eps-family scale like eps^(-slope) per segment, so the
    positive slopes are exactly the singular exponents with the segment
    length as multiplicity.
    """
    hull = lower_hull(polygon_points(frozen))
    segs: List[Segment] = []
    for (d1, v1), (d2, v2) in zip(hull, hull[1:]):
        segs.append((Fraction(v2 - v1, d2 - d1), d2 - d1))
    return segs


def singular_classes(segments: Sequence[Segment]) -> List[Segment]:
    return [(g, m) for g, m in segments if g > 0]


def pattern_of(frozen: SymbolPoly) -> Pattern:
    segs = newton_polygon(frozen)
    return (frozen.xin_degree(), tuple(singular_classes(segs)))


# ----------------------------------------------------------------------
# sampling
# ----------------------------------------------------------------------

_DIRS_2D = [(1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 2), (-1, 2),
            (3, -1)]


def default_zeta_samples(nvars: int, r0: Fraction = Fraction(1)
                         ) -> List[Tuple[Fraction, ...]]:
    """Exact rational samples spread over dyadic magnitudes above r0."""
    if nvars == 0:
        return [()]
    if nvars == 1:
        return [(s * r0,) for m in (2, 4, 8, 16)
                for s in (Fraction(m), Fraction(-m))]
    dirs = _DIRS_2D if nvars == 2 else [
        tuple((i + j) % 3 - 1 or 1 for j in range(nvars))
        for i in range(8)]
    return [tuple(Fraction(c * m) * r0 for c in d)
            for d in dirs for m in (4, 16)]


def _nudge(sample: Tuple[Fraction, ...], k: int) -> Tuple[Fraction, ...]:
    # zero coordinates stay zero: directional degeneracies must survive
    # resampling (they are genuine pattern changes, not bad luck).
    f = Fraction(17, 16) ** k
    return tuple(c * f for c in sample)


def _freeze_clean(a: SymbolPoly, sample: Tuple[Fraction, ...],
                  max_tries: int = 4):
    """Freeze zeta, resampling away measure-zero exact cancellations.

    A cancellation is visible as a (eps-exponent, xin-degree) pair that
    the symbol supports but the frozen value lost.
    """
    sample_used = sample
    for k in range(max_tries):
        frozen = a.freeze_zeta(sample_used)
        if _support_eq(a, frozen):
            return frozen, sample_used
        sample_used = _nudge(sample, k + 1)
    return a.freeze_zeta(sample_used), sample_used


def _support_eq(a: SymbolPoly, frozen: SymbolPoly) -> bool:
    sa = {(Fraction(e, a.qden), d) for e, _z, d in a.terms}
    sf = {(Fraction(e, frozen.qden), d) for e, _z, d in frozen.terms}
    return sa == sf


# ----------------------------------------------------------------------
# the profile
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class SingularClass:
    gamma: Fraction
    multiplicity: int
    beta: Fraction                  # exact normalizing valuation
    beta_formula: Fraction          # closed-form value, reported alongside
    limit: SymbolPoly               # layer symbol, xin-prefactor removed
    limit_with_prefactor: SymbolPoly


@dataclass(frozen=True)
class SingularProfile:
    """Singular structure of a symbol at one boundary point."""

    m: int                          # xin-degree of the symbol
    big_m: Fraction                 # eps-valuation of the leading coeff
    classes: Tuple[SingularClass, ...]   # gamma ascending
    regular_count: int              # m - sum of multiplicities
    limit0: SymbolPoly              # normalized eps->0 limit of the symbol
    radius: float                   # estimated uniformity radius R
    samples: Tuple[Tuple[Fraction, ...], ...]

    @property
    def r(self) -> int:
        return len(self.classes)

    def pattern(self) -> Pattern:
        return (self.m, tuple((c.gamma, c.multiplicity)
                              for c in self.classes))

    def gammas(self) -> List[Fraction]:
        return [c.gamma for c in self.classes]


def profile_at(a: SymbolPoly,
               zeta_samples: Optional[Sequence[Tuple[Fraction, ...]]] = None,
               r0: Fraction = Fraction(1)) -> SingularProfile:
    """Detect (r; gamma_j, m_j; beta_j; limit factors) by sampled polygons.

    All sampled polygons must agree on the pattern, otherwise the
    uniformity hypothesis fails and NonUniform is raised.  The betas are
    recomputed as exact valuations of the rescaled symbol so that the
    eps->0 limit exists and is nonzero by construction.
    """
    if a.is_zero():
        raise EmptyPolynomial("zero symbol has no profile")
    if zeta_samples is None:
        zeta_samples = default_zeta_samples(a.nvars, r0)
    zeta_samples = [tuple(Fraction(c) for c in s) for s in zeta_samples]
    if a.nvars > 0 and len(zeta_samples) < 8:
        raise StructuralError("need at least 8 zeta samples")

    patterns = []
    used = []
    for s in zeta_samples:
        frozen, s_used = _freeze_clean(a, s)
        patterns.append(pattern_of(frozen))
        used.append(s_used)
    if any(p != patterns[0] for p in patterns[1:]):
        raise NonUniform("singular pattern varies across zeta samples",
                         patterns)
    m, classes = patterns[0]

    big_m = a.leading_eps_valuation()
    s_total = sum(mult for _g, mult in classes)
    gammas = [g for g, _ in classes]

    built: List[SingularClass] = []
    for j, (gamma, mult) in enumerate(classes):
        rescaled = a.rescale(gamma, 0)
        beta = rescaled.min_valuation()
        limit_full = rescaled.rescale(0, beta).limit_eps_zero()
        low = m - sum(mu for _g, mu in classes[j:])
        if limit_full.xin_low_degree() != low:
            raise StructuralError(
                f"limit of class gamma={gamma} has unexpected low degree "
                f"{limit_full.xin_low_degree()} != {low}")
        limit = limit_full.drop_xin_prefactor(low)
        if limit.xin_degree() != mult:
            raise StructuralError(
                f"limit of class gamma={gamma} has degree "
                f"{limit.xin_degree()} != multiplicity {mult}")
        beta_formula = (big_m - m * gamma
                        + sum(gamma - gk for gk in gammas[j + 1:]))
        built.append(SingularClass(gamma, mult, beta, beta_formula,
                                   limit, limit_full))

    beta0 = a.min_valuation()
    limit0 = a.rescale(0, beta0).limit_eps_zero()

    radius = _estimate_radius(a, patterns[0], r0)
    return SingularProfile(
        m=m, big_m=big_m, classes=tuple(built),
        regular_count=m - s_total, limit0=limit0, radius=radius,
        samples=tuple(used))


def _estimate_radius(a: SymbolPoly, pattern: Pattern,
                     r0: Fraction) -> float:
    """Smallest dyadic radius past which the sampled pattern holds."""
    if a.nvars == 0:
        return 0.0
    dirs: List[Tuple[Fraction, ...]]
    if a.nvars == 1:
        dirs = [(Fraction(1),), (Fraction(-1),)]
    else:
        dirs = [tuple(Fraction(c) for c in d) for d in _DIRS_2D[:4]]
    radii = [r0 * (2 ** k) for k in range(0, 6)]
    ok_from = len(radii) - 1
    for idx in range(len(radii) - 1, -1, -1):
        all_ok = True
        for d in dirs:
            sample = tuple(c * radii[idx] for c in d)
            frozen, _ = _freeze_clean(a, sample)
            try:
                if pattern_of(frozen) != pattern:
                    all_ok = False
                    break
            except EmptyPolynomial:
                all_ok = False
                break
        if all_ok:
            ok_from = idx
        else:
            break
    return float(radii[ok_from])


# ----------------------------------------------------------------------
# ellipticity (H2-style check of the eta = 0 slice)
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class EllipticityResult:
    passed: bool
    witness: Optional[Tuple[float, ...]] = None
    detail: str = ""


def _zeta_poly_coeffs(p: SymbolPoly) -> Dict[Tuple[int, ...], CRat]:
    out: Dict[Tuple[int, ...], CRat] = {}
    for (e, z, d), c in p.terms.items():
        if e != 0 or d != 0:
            raise StructuralError("expected an eps-free, xin-free slice")
        out[z] = c
    return out


def ellipticity_check(limit_j: SymbolPoly,
                      r0: Fraction = Fraction(1),
                      sphere_grid: int = 720) -> EllipticityResult:
    """Decide whether the eta=0 slice of a layer limit is elliptic.

    Checks (a) the top-degree homogeneous part has no real zero on the
    unit sphere, and (b) the full slice has no real zero in the working
    region |zeta| >= r0.  For one tangential variable both checks are
    exact (Sturm); in higher dimensions the sphere is sampled densely
    and near-zeros are refined.
    """
    slice0 = limit_j.xin_at_zero()
    if slice0.is_zero():
        raise ZeroPolynomial("layer symbol vanishes identically at eta=0")
    if slice0.depends_on_eps():
        raise StructuralError("ellipticity expects the eps->0 limit")
    coeffs = _zeta_poly_coeffs(slice0)
    nvars = limit_j.nvars

    if nvars == 0 or all(not any(z) for z in coeffs):
        return EllipticityResult(True, detail="nonzero constant")

    if nvars == 1:
        re = {}
        im = {}
        deg = max(z[0] for z in coeffs)
        re_l = [Fraction(0)] * (deg + 1)
        im_l = [Fraction(0)] * (deg + 1)
        for z, c in coeffs.items():
            re_l[z[0]] = c.re
            im_l[z[0]] = c.im
        # top homogeneous part is the single degree-`deg` monomial: its
        # only zero is zeta=0, never on the sphere.
        g, degenerate = common_real_part(re_l, im_l)
        if degenerate:
            raise ZeroPolynomial("zero slice")
        g = trim(g)
        if len(g) <= 1:
            return EllipticityResult(True, detail="no common real zeros")
        n = real_roots_outside(g, Fraction(r0))
        if n == 0:
            return EllipticityResult(True, detail="no real zeros with "
                                     f"|zeta| >= {r0}")
        w = isolate_root_outside(g, Fraction(r0))
        return EllipticityResult(False, (w,),
                                 f"{n} real zero(s) with |zeta| >= {r0}")

    # nvars >= 2: dense sphere sampling of the top part + refinement
    deg = max(sum(z) for z in coeffs)
    top = {z: complex(c) for z, c in coeffs.items() if sum(z) == deg}

    def top_val(direction) -> complex:
        acc = 0j
        for z, c in top.items():
            t = c
            for zi, xi in zip(z, direction):
                t *= xi ** zi
            acc += t
        return acc

    worst = (float("inf"), None)
    for point in _sphere_grid(nvars, sphere_grid):
        v = abs(top_val(point))
        if v < worst[0]:
            worst = (v, point)
    mag, point = worst
    if mag > 1e-9:
        return EllipticityResult(True, detail="top part bounded below on "
                                 "the sampled sphere")
    point = _refine_sphere_zero(top_val, point)
    return EllipticityResult(False, tuple(point),
                             "top homogeneous part vanishes near the "
                             "returned direction")


def _sphere_grid(nvars: int, n: int):
    if nvars == 2:
        for k in range(n):
            t = 2 * math.pi * k / n
            yield (math.cos(t), math.sin(t))
        return
    # low-discrepancy-ish axis sweeps for nvars > 2
    for combo in itertools.product((-1.0, -0.5, 0.0, 0.5, 1.0),
                                   repeat=nvars):
        norm = math.sqrt(sum(c * c for c in combo))
        if norm > 0:
            yield tuple(c / norm for c in combo)


def _refine_sphere_zero(f, point, iters: int = 60):
    if len(point) != 2:
        return point
    t = math.atan2(point[1], point[0])
    h = math.pi / 720
    for _ in range(iters):
        cand = [t - h, t, t + h]
        vals = [abs(f((math.cos(c), math.sin(c)))) for c in cand]
        t = cand[vals.index(min(vals))]
        h *= 0.6
    return (math.cos(t), math.sin(t))
