"""Weighted blow-up transform on curve configurations.

Extracting the exceptional curve of a weighted blow-up with weights (a, b)
over a 1/n-quotient point changes the intersection numbers by an explicit
rational correction; the pullback map embeds the downstairs lattice
isometrically into the upstairs one, orthogonal to the new exceptional curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .arith import RationalLike, rat
from .surface import ClassVector, CurveConfig, QuotientSingularity


class BlowupSpecError(ValueError):
    """Malformed blow-up data: bad weights, missing orders, unknown center."""


def exceptional_self_intersection(n: int, a: int, b: int) -> Fraction:
    """Self-intersection of the exceptional curve: -n/(a*b)."""
    _validate_weights(n, a, b)
    return Fraction(-n, a * b)


def log_discrepancy_of_e(n: int, a: int, b: int) -> Fraction:
    """Log discrepancy of the exceptional curve: (a+b)/n."""
    _validate_weights(n, a, b)
    return Fraction(a + b, n)


@dataclass(frozen=True)
class BlowupSpec:
    """Center, blow-up weights, and each basis curve's local vanishing order.

    ``curve_orders`` maps a curve name to its weighted vanishing order w at
    the center; the strict transform is pullback(C) - (w/n) E.  Curves not
    listed are taken to miss the center (order 0).
    """

    center: QuotientSingularity
    weights: tuple[int, int]
    curve_orders: tuple[tuple[str, Fraction], ...]
    exceptional: str = "E"

    @classmethod
    def make(
        cls,
        center: QuotientSingularity,
        weights: tuple[int, int],
        curve_orders: Mapping[str, RationalLike],
        exceptional: str = "E",
    ) -> "BlowupSpec":
        orders = tuple(sorted((k, rat(v)) for k, v in curve_orders.items()))
        return cls(center, tuple(weights), orders, exceptional)

    def __post_init__(self):
        a, b = self.weights
        _validate_weights(self.center.order, a, b)
        for name, w in self.curve_orders:
            if w < 0:
                raise BlowupSpecError(f"negative vanishing order for {name}")

    def order_of(self, curve: str) -> Fraction:
        for name, w in self.curve_orders:
            if name == curve:
                return w
        return Fraction(0)


@dataclass(frozen=True)
class BlowupResult:
    """Upstairs configuration plus the pullback bookkeeping."""

    downstairs: CurveConfig
    upstairs: CurveConfig
    spec: BlowupSpec
    log_discrepancy_e: Fraction

    @property
    def exceptional_index(self) -> int:
        return self.upstairs.size - 1

    def pullback(self, v: ClassVector) -> ClassVector:
        """pullback(v) = sum v_i (strict transform of C_i + (w_i/n) E)."""
        if len(v) != self.downstairs.size:
            raise ValueError("vector does not live on the downstairs basis")
        n = self.spec.center.order
        e_coeff = sum(
            (c * self.spec.order_of(name) for c, name in zip(v, self.downstairs.basis)),
            Fraction(0),
        ) / n
        return ClassVector(list(v) + [e_coeff])

    def strict_transform(self, v: ClassVector, multiplicity: RationalLike) -> ClassVector:
        """pullback(v) - multiplicity * E, for classes vanishing at the center."""
        pb = self.pullback(v)
        m = rat(multiplicity)
        return ClassVector(list(pb)[:-1] + [pb[-1] - m])


def transform_config(config: CurveConfig, spec: BlowupSpec) -> BlowupResult:
    """Blow up the center and append the exceptional curve to the basis.

    The center must be one of the configuration's recorded singular points,
    or a smooth point (order 1) which may sit anywhere.
    """
    n = spec.center.order
    a, b = spec.weights
    if spec.exceptional in config.basis:
        raise BlowupSpecError(f"name {spec.exceptional!r} already in basis")
    for name, _ in spec.curve_orders:
        if name not in config.basis:
            raise BlowupSpecError(f"curve order given for unknown curve {name!r}")
    if n > 1:
        recorded = next(
            (rec for rec in config.singular_points if rec.point == spec.center), None
        )
        if recorded is None:
            raise BlowupSpecError(
                f"center {spec.center} is not a recorded singular point"
            )
        for name, _ in recorded.multiplicities:
            if spec.order_of(name) == 0:
                raise BlowupSpecError(
                    f"missing vanishing order for curve {name!r} through the center"
                )

    ab = Fraction(a * b)
    orders = [spec.order_of(name) for name in config.basis]
    k = config.size
    gram = [
        [config.gram[i][j] - orders[i] * orders[j] / (n * ab) for j in range(k)]
        for i in range(k)
    ]
    e_row = [w / ab for w in orders]
    for i in range(k):
        gram[i].append(e_row[i])
    gram.append(e_row + [Fraction(-n, a * b)])

    anticanonical = list(config.anticanonical) + [
        sum(
            (c * w for c, w in zip(config.anticanonical, orders)),
            Fraction(0),
        ) / n
    ]
    points = tuple(
        rec for rec in config.singular_points if rec.point != spec.center
    )
    upstairs = CurveConfig.make(
        basis=tuple(config.basis) + (spec.exceptional,),
        gram=gram,
        anticanonical=anticanonical,
        singular_points=points,
    )
    return BlowupResult(
        downstairs=config,
        upstairs=upstairs,
        spec=spec,
        log_discrepancy_e=log_discrepancy_of_e(n, a, b),
    )


def _validate_weights(n: int, a: int, b: int) -> None:
    if n < 1 or a < 1 or b < 1:
        raise BlowupSpecError("blow-up data must be positive integers")
    if math.gcd(a, n) != 1 or math.gcd(b, n) != 1:
        raise BlowupSpecError(f"weights ({a},{b}) must be coprime to {n}")
