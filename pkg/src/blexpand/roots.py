"""Floating-point root machinery cross-checking the exact engine.

Three independent facilities:

* :func:`poly_roots` - companion-matrix eigenvalues with one Newton
  polish pass and a residual guarantee;
* :func:`upper_half_count` - number of roots in the open upper half
  plane, computed from the root list *and* from an adaptive
  argument-principle contour integral, which must agree exactly;
* :func:`cluster_roots` - assigns the numeric roots of an eps-family to
  the exact profile's singular classes.  Roots are classified at the
  smallest eps (where the scales separate cleanly) and then carried to
  larger eps by continuation along the root branches, which is how the
  classes are defined in the first place.  The eps below which the raw
  magnitude heuristic already agrees with the branch classification is
  reported as eps0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (ClusterViolation, DegreeZero, RealAxisRoot,
                     StructuralError)
from .newton import SingularProfile
from .sympoly import SymbolPoly


def _trim_leading(coeffs: np.ndarray) -> np.ndarray:
    c = np.asarray(coeffs, dtype=complex)
    n = len(c)
    while n > 0 and c[n - 1] == 0:
        n -= 1
    return c[:n]


def _poly_val(coeffs: np.ndarray, z: complex) -> complex:
    acc = 0j
    for c in coeffs[::-1]:
        acc = acc * z + c
    return acc


def poly_roots(coeffs: Sequence[complex], residual_tol: float = 1e-9
               ) -> np.ndarray:
    """All roots (with multiplicity) of an ascending coefficient list.

    Companion-matrix eigenvalues, then one Newton step per root; the
    polished roots must satisfy |p(z)| <= residual_tol * scale with
    scale = max|coeff| * max(1, |z|)^deg.
    """
    c = _trim_leading(coeffs)
    if len(c) < 2:
        raise DegreeZero("need degree >= 1 with a nonzero leading "
                         "coefficient")
    roots = np.roots(c[::-1])
    dp = np.polyder(c[::-1])
    for i, z in enumerate(roots):
        for _ in range(3):
            d = np.polyval(dp, z)
            if abs(d) == 0:
                break
            step = np.polyval(c[::-1], z) / d
            if not np.isfinite(step):
                break
            z_new = z - step
            if abs(np.polyval(c[::-1], z_new)) <= abs(
                    np.polyval(c[::-1], z)):
                z = z_new
            else:
                break
        roots[i] = z
    scale = float(np.abs(c).max())
    deg = len(c) - 1
    for z in roots:
        bound = residual_tol * scale * max(1.0, abs(z)) ** deg
        if abs(_poly_val(c, z)) > bound:
            raise StructuralError(
                f"root residual {abs(_poly_val(c, z)):.3e} exceeds "
                f"{bound:.3e} at z={z}")
    return roots


def _adaptive_simpson(f: Callable[[float], complex], a: float, b: float,
                      tol: float, depth: int = 52) -> complex:
    fa, fm, fb = f(a), f((a + b) / 2), f(b)
    whole = (b - a) / 6 * (fa + 4 * fm + fb)
    return _simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth)


def _simpson_rec(f, a, b, fa, fm, fb, whole, tol, depth) -> complex:
    m = (a + b) / 2
    lm, rm = (a + m) / 2, (m + b) / 2
    flm, frm = f(lm), f(rm)
    left = (m - a) / 6 * (fa + 4 * flm + fm)
    right = (b - m) / 6 * (fm + 4 * frm + fb)
    err = left + right - whole
    if depth <= 0 or abs(err) < 15 * tol:
        return left + right + err / 15
    half = tol / 2
    return (_simpson_rec(f, a, m, fa, flm, fm, left, half, depth - 1)
            + _simpson_rec(f, m, b, fm, frm, fb, right, half, depth - 1))


def _argument_principle_upper(coeffs: np.ndarray, radius: float,
                              tol: float) -> complex:
    """(1/2 pi i) contour integral of p'/p over the upper half-disc."""
    desc = coeffs[::-1]
    ddesc = np.polyder(desc)

    def g(z: complex) -> complex:
        return np.polyval(ddesc, z) / np.polyval(desc, z)

    seg = _adaptive_simpson(lambda t: g(t), -radius, radius, tol)
    arc = _adaptive_simpson(
        lambda th: g(radius * np.exp(1j * th)) * 1j * radius
        * np.exp(1j * th), 0.0, math.pi, tol)
    return (seg + arc) / (2j * math.pi)


def upper_half_count(coeffs: Sequence[complex],
                     axis_tol: float = 1e-8) -> Tuple[int, float]:
    """Roots with Im > 0, counted two independent ways.

    Returns (m_plus, margin) with margin the smallest |Im root|.
    Raises RealAxisRoot when a root sits within axis_tol * scale of the
    real axis (scale = max(1, largest root magnitude)); the count would
    be meaningless there.
    """
    c = _trim_leading(coeffs)
    roots = poly_roots(c)
    scale = max(1.0, float(np.abs(roots).max()))
    margin = float(np.abs(roots.imag).min())
    if margin < axis_tol * scale:
        raise RealAxisRoot(f"root within {axis_tol * scale:.2e} of the "
                           "real axis (margin {margin:.2e})")
    count_eigen = int(np.sum(roots.imag > 0))

    cauchy = 1.0 + float(np.abs(c[:-1]).max() / abs(c[-1])) if len(c) > 1 \
        else 1.0
    radius = 2.0 * cauchy
    integral = _argument_principle_upper(c, radius, tol=0.004)
    count_contour = int(round(integral.real))
    if abs(integral - count_contour) > 0.25:
        integral = _argument_principle_upper(c, radius, tol=0.0004)
        count_contour = int(round(integral.real))
        if abs(integral - count_contour) > 0.25:
            raise StructuralError(
                f"argument-principle integral {integral} is not close to "
                "an integer")
    if count_contour != count_eigen:
        raise StructuralError(
            f"half-plane counts disagree: eigenvalues {count_eigen}, "
            f"contour {count_contour}")
    return count_eigen, margin


# ----------------------------------------------------------------------
# clustering along the eps grid
# ----------------------------------------------------------------------


@dataclass
class RootCluster:
    """Numeric roots of one eps-instance, organized by singular class."""

    eps: float
    clusters: List[Tuple[Fraction, List[complex]]]
    regular_roots: List[complex]
    fitted_delta: float
    asymptotic: bool = True     # magnitude heuristic agrees with branches

    def cardinalities(self) -> Tuple[Tuple[Fraction, int], ...]:
        return tuple((g, len(rs)) for g, rs in self.clusters)


@dataclass
class ClusterReport:
    grid: List[RootCluster]
    eps0: Optional[float]       # onset of the raw asymptotic regime
    fitted_delta: float         # worst annulus slack over the whole grid


def _rel_dist(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def _match(old: np.ndarray, new: np.ndarray) -> Optional[List[int]]:
    """Greedy injective matching new->old; None when ambiguous."""
    n = len(old)
    pairs = sorted((_rel_dist(old[i], new[j]), i, j)
                   for i in range(n) for j in range(n))
    used_old = [False] * n
    used_new = [False] * n
    assign = [-1] * n
    for d, i, j in pairs:
        if used_old[i] or used_new[j]:
            continue
        if d > 0.3:
            return None
        used_old[i] = True
        used_new[j] = True
        assign[j] = i
    if any(a < 0 for a in assign):
        return None
    return assign


def _gamma_estimate(root: complex, eps: float) -> float:
    return math.log(max(abs(root), 1e-300)) / math.log(1.0 / eps)


def _nearest_class(root: complex, eps: float,
                   gammas: Sequence[Fraction]) -> int:
    """Index into gammas, or -1 for the regular class."""
    est = _gamma_estimate(root, eps)
    options = [(abs(est - 0.0), -1)]
    options += [(abs(est - float(g)), k) for k, g in enumerate(gammas)]
    return min(options)[1]


def cluster_roots(a: SymbolPoly, profile: SingularProfile,
                  zeta: Sequence[complex], eps_grid: Sequence[float],
                  substeps_per_decade: int = 16) -> ClusterReport:
    """Assign numeric roots to the profile's classes across an eps grid.

    The smallest grid eps anchors the classification by the magnitude
    heuristic (gamma-estimate = log|root| / log(1/eps), nearest class
    wins); the anchor cardinalities must match the profile exactly or
    ClusterViolation is raised.  Larger eps values inherit the class of
    their root branch by continuation, with adaptive refinement of the
    continuation steps; a persistent matching ambiguity is reported as
    ClusterViolation too.
    """
    eps_sorted = sorted(set(float(e) for e in eps_grid))
    if not eps_sorted:
        raise StructuralError("empty eps grid")
    gammas = profile.gammas()
    mults = [c.multiplicity for c in profile.classes]

    def roots_at(eps: float) -> np.ndarray:
        return poly_roots(a.eval_eps(eps, zeta))

    anchor_eps = eps_sorted[0]
    anchor_roots = roots_at(anchor_eps)
    if len(anchor_roots) != profile.m:
        raise ClusterViolation(
            f"degree dropped to {len(anchor_roots)} at eps={anchor_eps}",
            eps=anchor_eps)
    labels = [_nearest_class(z, anchor_eps, gammas) for z in anchor_roots]
    for k, g in enumerate(gammas):
        got = sum(1 for lb in labels if lb == k)
        if got != mults[k]:
            bad = next((z for z, lb in zip(anchor_roots, labels)
                        if lb == k), None)
            raise ClusterViolation(
                f"class gamma={g} holds {got} roots at eps={anchor_eps}, "
                f"expected {mults[k]}", eps=anchor_eps, root=bad)
    if sum(1 for lb in labels if lb == -1) != profile.regular_count:
        raise ClusterViolation(
            f"regular class holds {sum(1 for lb in labels if lb == -1)} "
            f"roots at eps={anchor_eps}, expected {profile.regular_count}",
            eps=anchor_eps)

    report: List[RootCluster] = []
    report.append(_make_cluster(anchor_eps, anchor_roots, labels, gammas,
                                asymptotic=True))

    current_eps = anchor_eps
    current_roots = anchor_roots
    for eps in eps_sorted[1:]:
        decades = math.log10(eps / current_eps)
        steps = max(1, int(math.ceil(abs(decades) * substeps_per_decade)))
        ok = False
        while not ok:
            trail_eps = np.logspace(math.log10(current_eps),
                                    math.log10(eps), steps + 1)[1:]
            rts = current_roots
            ok = True
            for te in trail_eps:
                nxt = roots_at(float(te))
                if len(nxt) != len(rts):
                    raise ClusterViolation(
                        f"degree changed along the grid at eps={te}",
                        eps=float(te))
                assign = _match(rts, nxt)
                if assign is None:
                    ok = False
                    break
                reordered = np.empty_like(nxt)
                for j, i in enumerate(assign):
                    reordered[i] = nxt[j]
                rts = reordered
            if ok:
                current_roots = rts
                current_eps = eps
            else:
                steps *= 2
                if steps > 512 * max(1, int(abs(decades)) + 1):
                    raise ClusterViolation(
                        "root branches could not be disambiguated "
                        f"between eps={current_eps} and eps={eps}",
                        eps=eps)
        heur = [_nearest_class(z, eps, gammas) for z in current_roots]
        report.append(_make_cluster(eps, current_roots, labels, gammas,
                                    asymptotic=(heur == labels)))

    report.sort(key=lambda rc: rc.eps)
    eps0 = None
    for rc in sorted(report, key=lambda rc: rc.eps, reverse=True):
        if all(r.asymptotic for r in report if r.eps <= rc.eps):
            eps0 = rc.eps
            break
    fitted = min(rc.fitted_delta for rc in report)
    return ClusterReport(grid=report, eps0=eps0, fitted_delta=fitted)


def _make_cluster(eps: float, roots: np.ndarray, labels: List[int],
                  gammas: Sequence[Fraction], asymptotic: bool
                  ) -> RootCluster:
    clusters: List[Tuple[Fraction, List[complex]]] = []
    delta = 1.0
    for k, g in enumerate(gammas):
        rs = [complex(z) for z, lb in zip(roots, labels) if lb == k]
        rs.sort(key=lambda z: (abs(z), z.real, z.imag))
        for z in rs:
            t = abs(z) * eps ** float(g)
            delta = min(delta, t, 1.0 / t if t > 0 else 0.0)
        clusters.append((g, rs))
    regular = [complex(z) for z, lb in zip(roots, labels) if lb == -1]
    regular.sort(key=lambda z: (abs(z), z.real, z.imag))
    for z in regular:
        if abs(z) > 0:
            delta = min(delta, 1.0 / abs(z))
    return RootCluster(eps=eps, clusters=clusters, regular_roots=regular,
                       fitted_delta=delta, asymptotic=asymptotic)
