"""Exact Zariski decomposition of divisor classes and one-parameter rays.

``zariski_decompose_at`` splits a single pseudoeffective class D = P + N by
iteratively enlarging the negative support.  ``decompose_ray`` decomposes the
whole ray A - uE at once: every negative-definite subset of basis curves is
solved symbolically (the negative-part coefficients are linear in u), each
subset's validity interval is cut out by exact linear inequalities, and the
intervals are stitched from u = 0 up to the pseudoeffective threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from .arith import PiecewisePoly, Poly, RationalLike, rat
from .surface import ClassVector, CurveConfig, solve_linear_system


class NotPseudoeffectiveError(ValueError):
    """No valid decomposition: the class is not in the effective span."""


class InconsistentConfigError(ValueError):
    """No negative-definite subset is valid where one is required."""


class RayNeverEffectiveError(ValueError):
    """The ray's volume never reaches zero at a rational parameter."""


def zariski_decompose_at(
    config: CurveConfig, d: ClassVector
) -> tuple[ClassVector, ClassVector]:
    """Split d = P + N with P nef on the basis, N >= 0 on a ND support.

    Starts from empty support, solves (d - N).C = 0 over the current support
    and adds any basis curve with P.C < 0 until reaching the fixpoint.
    """
    k = config.size
    support: list[int] = []
    coeffs: list[Fraction] = []
    for _ in range(2 ** k + 1):
        if support:
            m = [[config.gram[i][j] for j in support] for i in support]
            rhs = [config.pairing(d, config.basis_vector(config.basis[i])) for i in support]
            try:
                coeffs = solve_linear_system(m, rhs)
            except ValueError:
                raise InconsistentConfigError(
                    f"degenerate support {_names(config, support)}"
                ) from None
        else:
            coeffs = []
        n_vec = _support_vector(config, support, coeffs)
        p_vec = d - n_vec
        violating = [
            j
            for j in range(k)
            if j not in support and config.pairing(p_vec, _unit(k, j)) < 0
        ]
        if not violating:
            break
        support.append(violating[0])
        support.sort()
    else:
        raise InconsistentConfigError("support iteration did not converge")

    if any(c < 0 for c in coeffs):
        raise NotPseudoeffectiveError(
            f"negative coefficient on support {_names(config, support)}"
        )
    if not config.is_negative_definite(support):
        raise NotPseudoeffectiveError(
            f"support {_names(config, support)} is not negative definite"
        )
    if config.pairing(p_vec, p_vec) < 0:
        # nef classes on a surface lattice have non-negative square
        raise NotPseudoeffectiveError("positive part has negative self-intersection")
    return p_vec, n_vec


@dataclass(frozen=True)
class RayInterval:
    """One stretch [left, right] of the ray with a fixed negative support.

    ``negative_coeffs`` holds the support curves' coefficients as polynomials
    in u (degree <= 1); ``positive_part`` is P(u) coordinate-wise, one linear
    polynomial per basis curve.
    """

    left: Fraction
    right: Fraction
    support: tuple[int, ...]
    negative_coeffs: tuple[Poly, ...]
    positive_part: tuple[Poly, ...]

    def negative_part_at(self, u: RationalLike, size: int) -> ClassVector:
        coeffs = [Fraction(0)] * size
        for idx, poly in zip(self.support, self.negative_coeffs):
            coeffs[idx] = poly(u)
        return ClassVector(coeffs)

    def positive_part_at(self, u: RationalLike) -> ClassVector:
        return ClassVector(p(u) for p in self.positive_part)


@dataclass(frozen=True)
class RayDecomposition:
    """Piecewise-in-u Zariski decomposition of ample - u*ray on a config."""

    config: CurveConfig
    ample: ClassVector
    ray: ClassVector
    intervals: tuple[RayInterval, ...]
    nef_threshold: Fraction
    tau: Fraction
    volume: PiecewisePoly

    @property
    def breakpoints(self) -> tuple[Fraction, ...]:
        return tuple([iv.left for iv in self.intervals] + [self.tau])

    def class_at(self, u: RationalLike) -> ClassVector:
        u = rat(u)
        return self.ample - u * self.ray

    def interval_at(self, u: RationalLike) -> RayInterval:
        u = rat(u)
        if u < 0 or u > self.tau:
            raise ValueError(f"u = {u} outside [0, {self.tau}]")
        for iv in self.intervals:
            if iv.left <= u < iv.right:
                return iv
        return self.intervals[-1]

    def positive_part_at(self, u: RationalLike) -> ClassVector:
        return self.interval_at(u).positive_part_at(u)

    def negative_part_at(self, u: RationalLike) -> ClassVector:
        return self.interval_at(u).negative_part_at(u, self.config.size)

    def to_json_dict(self) -> dict:
        return {
            "ample": [str(c) for c in self.ample],
            "ray": [str(c) for c in self.ray],
            "nef_threshold": str(self.nef_threshold),
            "tau": str(self.tau),
            "breakpoints": [str(b) for b in self.breakpoints],
            "intervals": [
                {
                    "left": str(iv.left),
                    "right": str(iv.right),
                    "support": [self.config.basis[i] for i in iv.support],
                    "negative_coeffs": {
                        self.config.basis[i]: [str(c) for c in poly.coeffs]
                        for i, poly in zip(iv.support, iv.negative_coeffs)
                    },
                    "positive_part": {
                        name: [str(c) for c in poly.coeffs]
                        for name, poly in zip(self.config.basis, iv.positive_part)
                    },
                }
                for iv in self.intervals
            ],
            "volume": [
                {"left": str(l), "right": str(r), "coeffs": [str(c) for c in p.coeffs]}
                for l, r, p in self.volume.pieces
            ],
        }


def decompose_ray(config: CurveConfig, ample: ClassVector, ray: ClassVector) -> RayDecomposition:
    """Decompose ample - u*ray for u in [0, tau], exactly.

    ``ample`` must be nef on the basis and big (positive self-intersection);
    ``ray`` is the class being subtracted (usually a single basis curve).
    """
    k = config.size
    if config.pairing(ample, ample) <= 0:
        raise ValueError("ample class must have positive self-intersection")
    for j in range(k):
        if config.pairing(ample, _unit(k, j)) < 0:
            raise ValueError(
                f"ample class is not nef: negative against {config.basis[j]}"
            )
    if ray.is_zero():
        raise ValueError("ray class must be nonzero")

    candidates = _subset_solutions(config, ample, ray)
    if not any(_contains(s.interval, Fraction(0)) for s in candidates):
        raise InconsistentConfigError("no valid decomposition at u = 0")

    cuts = sorted(
        {Fraction(0)}
        | {s.interval[0] for s in candidates if s.interval}
        | {s.interval[1] for s in candidates if s.interval and s.interval[1] is not None}
    )
    cuts = [c for c in cuts if c >= 0]

    intervals: list[RayInterval] = []
    vol_pieces: list[tuple[Fraction, Fraction, Poly]] = []
    tau: Optional[Fraction] = None
    pos = 0
    while tau is None:
        left = cuts[pos]
        right = cuts[pos + 1] if pos + 1 < len(cuts) else None
        probe = (left + right) / 2 if right is not None else left + 1
        live = [s for s in candidates if _contains(s.interval, probe)]
        if not live:
            tau = left
            break
        best = min(live, key=lambda s: (len(s.subset), s.subset))
        for other in live:
            # decomposition uniqueness: every valid support yields the same P
            if any(p(probe) != q(probe) for p, q in zip(other.positive_part, best.positive_part)):
                raise InconsistentConfigError(
                    f"supports {_names(config, best.subset)} and "
                    f"{_names(config, other.subset)} disagree at u = {probe}"
                )
        vol = _volume_quadratic(config, best.positive_part, ample, ray)
        root = _smallest_rational_root_at_least(vol, left)
        if right is None:
            # unbounded validity: the volume quadratic must pin tau itself
            if root is None:
                raise RayNeverEffectiveError(
                    "volume does not reach zero at a rational parameter"
                )
            right = root
            tau = root
        elif root is not None and root <= right:
            right = root
            tau = root
        elif _quadratic_negative_on(vol, left, right):
            raise RayNeverEffectiveError(
                "volume crosses zero at an irrational parameter"
            )
        if left < right:
            intervals.append(
                RayInterval(left, right, best.subset, best.coeffs, best.positive_part)
            )
            vol_pieces.append((left, right, vol))
        pos += 1
        if pos >= len(cuts) and tau is None:
            raise InconsistentConfigError("ray stitching ran past all breakpoints")

    if not intervals:
        raise InconsistentConfigError("empty decomposition range")
    volume = PiecewisePoly(vol_pieces)
    if volume(tau) != 0:
        raise InconsistentConfigError(
            f"volume at tau = {tau} is {volume(tau)}, expected 0"
        )
    nef_threshold = Fraction(0)
    if intervals[0].support == ():
        nef_threshold = intervals[0].right
    rd = RayDecomposition(
        config=config,
        ample=ample,
        ray=ray,
        intervals=tuple(intervals),
        nef_threshold=nef_threshold,
        tau=tau,
        volume=volume,
    )
    _check_continuity(rd)
    return rd


def volume_profile(rd: RayDecomposition) -> PiecewisePoly:
    """Piecewise-quadratic vol(ample - u*ray) on [0, tau]."""
    return rd.volume


# -- internals ----------------------------------------------------------------


@dataclass(frozen=True)
class _SubsetSolution:
    subset: tuple[int, ...]
    coeffs: tuple[Poly, ...]          # negative-part coefficients, linear in u
    positive_part: tuple[Poly, ...]   # P(u) coordinates, linear in u
    interval: Optional[tuple[Fraction, Optional[Fraction]]]  # validity (lo, hi)


def _subset_solutions(config: CurveConfig, ample: ClassVector, ray: ClassVector):
    k = config.size
    u = Poly.variable()
    d_polys = [Poly.constant(a) - u * Poly.constant(e) for a, e in zip(ample, ray)]
    d_dot = [_pair_poly(config, d_polys, j) for j in range(k)]
    solutions = []
    for size in range(k + 1):
        for subset in combinations(range(k), size):
            if not config.is_negative_definite(subset):
                continue
            if subset:
                m = [[config.gram[i][j] for j in subset] for i in subset]
                coeffs = solve_linear_system(m, [d_dot[j] for j in subset])
                coeffs = [_as_linear(c) for c in coeffs]
            else:
                coeffs = []
            p_polys = list(d_polys)
            for idx, c in zip(subset, coeffs):
                p_polys[idx] = p_polys[idx] - c
            constraints = list(coeffs)
            for j in range(k):
                constraints.append(_pair_poly(config, p_polys, j))
            interval = _linear_feasible_interval(constraints)
            solutions.append(
                _SubsetSolution(subset, tuple(coeffs), tuple(p_polys), interval)
            )
    return solutions


def _pair_poly(config: CurveConfig, polys: Sequence[Poly], j: int) -> Poly:
    total = Poly()
    for i, p in enumerate(polys):
        g = config.gram[i][j]
        if g != 0 and not p.is_zero():
            total = total + Poly.constant(g) * p
    return total


def _as_linear(p: Poly) -> Poly:
    if p.degree > 1:
        raise InconsistentConfigError("negative-part coefficient not linear in u")
    return p


def _linear_feasible_interval(constraints):
    """Intersection of {u >= 0} with {c(u) >= 0} for linear polynomials c."""
    lo, hi = Fraction(0), None
    for c in constraints:
        a0, a1 = c.coefficient(0), c.coefficient(1)
        if a1 == 0:
            if a0 < 0:
                return None
        elif a1 > 0:
            lo = max(lo, -a0 / a1)
        else:
            bound = -a0 / a1
            hi = bound if hi is None else min(hi, bound)
    if hi is not None and lo > hi:
        return None
    return (lo, hi)


def _contains(interval, x: Fraction) -> bool:
    if interval is None:
        return False
    lo, hi = interval
    return lo <= x and (hi is None or x <= hi)


def _volume_quadratic(config, p_polys, ample, ray) -> Poly:
    # P.P == P.D thanks to P.N = 0; computing both is a cheap self-check.
    u = Poly.variable()
    d_polys = [Poly.constant(a) - u * Poly.constant(e) for a, e in zip(ample, ray)]
    pp = _gram_product(config, p_polys, p_polys)
    pd = _gram_product(config, p_polys, d_polys)
    if pp != pd:
        raise InconsistentConfigError("orthogonality failure: P.P != P.D")
    return pp


def _quadratic_negative_on(q: Poly, lo: Fraction, hi: Fraction) -> bool:
    """True iff the (degree <= 2) polynomial dips below zero on [lo, hi]."""
    if q(lo) < 0 or q(hi) < 0:
        return True
    if q.degree == 2 and q.coefficient(2) > 0:
        vertex = -q.coefficient(1) / (2 * q.coefficient(2))
        if lo < vertex < hi and q(vertex) < 0:
            return True
    return False


def _gram_product(config, left: Sequence[Poly], right: Sequence[Poly]) -> Poly:
    total = Poly()
    for i, p in enumerate(left):
        if p.is_zero():
            continue
        for j, q in enumerate(right):
            g = config.gram[i][j]
            if g != 0 and not q.is_zero():
                total = total + Poly.constant(g) * p * q
    return total


def _smallest_rational_root_at_least(q: Poly, lo: Fraction) -> Optional[Fraction]:
    """Smallest rational root of q that is > lo; None if there is none.

    Quadratics are only resolved when the discriminant is a perfect square
    (in the catalog the terminal quadratic is always a multiple of
    (tau - u)^2); otherwise the root is irrational and not representable.
    """
    if q.degree <= 0:
        return None
    if q.degree == 1:
        root = -q.coefficient(0) / q.coefficient(1)
        return root if root > lo else None
    a, b, c = q.coefficient(2), q.coefficient(1), q.coefficient(0)
    disc = b * b - 4 * a * c
    if disc < 0:
        return None
    sq = _rational_sqrt(disc)
    if sq is None:
        return None
    roots = sorted({(-b - sq) / (2 * a), (-b + sq) / (2 * a)})
    for r in roots:
        if r > lo:
            return r
    return None


def _rational_sqrt(x: Fraction) -> Optional[Fraction]:
    if x < 0:
        return None
    num, den = x.numerator, x.denominator
    rn, rd = _isqrt_exact(num), _isqrt_exact(den)
    if rn is None or rd is None:
        return None
    return Fraction(rn, rd)


def _isqrt_exact(n: int) -> Optional[int]:
    import math

    r = math.isqrt(n)
    return r if r * r == n else None


def _check_continuity(rd: RayDecomposition) -> None:
    pieces = rd.volume.pieces
    for (l1, r1, p1), (l2, r2, p2) in zip(pieces, pieces[1:]):
        if p1(r1) != p2(l2):
            raise InconsistentConfigError(f"volume discontinuous at u = {r1}")
    a2 = rd.config.pairing(rd.ample, rd.ample)
    if rd.volume(Fraction(0)) != a2:
        raise InconsistentConfigError("volume at 0 does not equal ample self-intersection")


def _support_vector(config: CurveConfig, support: Sequence[int], coeffs) -> ClassVector:
    out = [Fraction(0)] * config.size
    for idx, c in zip(support, coeffs):
        out[idx] = c
    return ClassVector(out)


def _unit(size: int, j: int) -> ClassVector:
    return ClassVector(Fraction(int(i == j)) for i in range(size))


def _names(config: CurveConfig, subset: Sequence[int]) -> str:
    return "{" + ", ".join(config.basis[i] for i in subset) + "}"
