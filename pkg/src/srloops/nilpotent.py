"""Nilpotent approximations of a sub-Riemannian system in an adapted chart.

The approximation of each generator is the weight-1 graded truncation of
its pushforward through the chart.  The checks here certify the
structural facts the downstream limit theory rests on:

  - homogeneity: every monomial term has weight exactly 1, equivalently
    the inverse-dilation pushforward rescales the field by eps^{-1/2};
  - cascade: component k contains no variable of weight >= w_k and is
    affine-linear in the variables of weight w_k - 1 (so the limiting
    SDE has global-in-time solutions);
  - bracket flag: the brackets of the approximations at 0 reproduce the
    flag dimensions, in the leading coordinates, exactly;
  - strong Hormander everywhere: numeric rank-d of the bracket values at
    arbitrary sample points.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import ratlinalg
from .chart import AdaptedChart
from .grading import (
    GradedStructure,
    build_bracket_table,
    dilation_pushforward,
    numeric_rank,
)
from .polyalg import (
    DEFAULT_MAX_DEGREE,
    PolyVectorField,
    graded_truncate,
    ito_drift_correction,
    monomial_weight,
    pushforward,
)

__all__ = [
    "NilpotentSystem",
    "nilpotentize",
    "check_homogeneity",
    "check_cascade",
    "check_convergence_to_nilpotent",
    "check_bracket_flag",
    "check_strong_hormander_everywhere",
]


@dataclass
class NilpotentSystem:
    """Weight-1 approximations, their Ito drift, and provenance."""

    fields: tuple[PolyVectorField, ...]
    drift_tilde: PolyVectorField
    structure: GradedStructure
    chart: AdaptedChart | None = None

    @property
    def dim(self) -> int:
        return self.fields[0].dim


def nilpotentize(
    generators: Sequence[PolyVectorField],
    chart: AdaptedChart,
    max_degree: int = DEFAULT_MAX_DEGREE,
) -> NilpotentSystem:
    """Pushforward through the certified chart, then truncate at weight 1.

    The Ito drift of the limiting system is the drift correction of the
    truncated fields (with zero base drift).
    """
    weights = chart.structure.weights
    fields = tuple(
        graded_truncate(pushforward(chart.theta, g, max_degree), 1, weights)
        for g in generators
    )
    drift = ito_drift_correction(PolyVectorField.zero(chart.dim), fields)
    return NilpotentSystem(fields, drift, chart.structure, chart)


def _random_rational_points(dim: int, count: int, seed: int) -> list[list[Fraction]]:
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(count):
        pts.append(
            [Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, 8))) for _ in range(dim)]
        )
    return pts


def check_homogeneity(
    sys: NilpotentSystem,
    eps_values: Sequence[Fraction] = (Fraction(1, 4), Fraction(1, 9)),
    n_points: int = 20,
    seed: int = 7,
) -> list[bool]:
    """Per field: every monomial has weight 1, and for rational-square eps
    the inverse-dilation pushforward equals eps^{-1/2} times the field at
    random rational points (exact equality)."""
    weights = sys.structure.weights
    results = []
    points = _random_rational_points(sys.dim, n_points, seed)
    for X in sys.fields:
        ok = all(
            weights[k] - monomial_weight(exps, weights) == 1
            for k, comp in enumerate(X.components)
            for exps in comp.terms
        )
        if ok:
            for eps in eps_values:
                s = _rational_sqrt(eps)
                lhs = dilation_pushforward(X, s, weights, inverse=True)
                rhs = X.scale(Fraction(1) / s)
                if lhs != rhs:
                    ok = False
                    break
                for p in points:
                    if lhs.evaluate(p) != rhs.evaluate(p):
                        ok = False
                        break
        results.append(ok)
    return results


def _rational_sqrt(eps: Fraction) -> Fraction:
    num = Fraction(eps).numerator
    den = Fraction(eps).denominator
    rn = int(round(num**0.5))
    rd = int(round(den**0.5))
    if rn * rn != num or rd * rd != den:
        raise ValueError(f"eps = {eps} must be the square of a rational")
    return Fraction(rn, rd)


def check_cascade(sys: NilpotentSystem) -> list[bool]:
    """Per field: component k has no variable of weight >= w_k and is
    affine-linear in the variables of weight w_k - 1."""
    weights = sys.structure.weights
    results = []
    for X in sys.fields:
        ok = True
        for k, comp in enumerate(X.components):
            wk = weights[k]
            for exps in comp.terms:
                if any(e > 0 and weights[j] >= wk for j, e in enumerate(exps)):
                    ok = False
                if sum(e for j, e in enumerate(exps) if weights[j] == wk - 1) > 1:
                    ok = False
        results.append(ok)
    return results


@dataclass
class ConvergenceReport:
    """Measured residual exponents of sqrt(eps) (delta_eps^{-1})_* (theta_* X_i)
    minus the approximation: every residual monomial must scale at least
    like eps^{1/2}."""

    exponents: list[dict[tuple[int, tuple[int, ...]], int]]  # per field
    max_residual_coeff: list[dict[Fraction, float]]
    ok: bool


def check_convergence_to_nilpotent(
    generators: Sequence[PolyVectorField],
    chart: AdaptedChart,
    eps_grid: Sequence[Fraction] = (Fraction(1, 4), Fraction(1, 16)),
    max_degree: int = DEFAULT_MAX_DEGREE,
) -> ConvergenceReport:
    """Symbolic check of the rescaled-field convergence.

    For each rational-square eps, compute sqrt(eps) (delta_eps^{-1})_*
    (theta_* X_i) exactly, subtract the weight-1 truncation, and measure
    each residual monomial's scaling exponent p (coefficient proportional
    to eps^{p/2}) from the ratio across the two smallest grid values.
    """
    if len(eps_grid) < 2:
        raise ValueError("need at least two eps values")
    weights = chart.structure.weights
    sys = nilpotentize(generators, chart, max_degree)
    exps_out: list[dict[tuple[int, tuple[int, ...]], int]] = []
    coeffs_out: list[dict[Fraction, float]] = []
    ok = True
    e1, e2 = sorted(eps_grid)[:2]
    s1, s2 = _rational_sqrt(e1), _rational_sqrt(e2)
    for X, Xt in zip(generators, sys.fields):
        pushed = pushforward(chart.theta, X, max_degree)
        resid = {}
        coeffs = {}
        for eps, s in ((e1, s1), (e2, s2)):
            R = dilation_pushforward(pushed, s, weights, inverse=True).scale(s) - Xt
            coeffs[eps] = max(
                (abs(float(c)) for comp in R.components for c in comp.terms.values()),
                default=0.0,
            )
            for k, comp in enumerate(R.components):
                for mono, c in comp.terms.items():
                    resid.setdefault((k, mono), {})[eps] = c
        measured: dict[tuple[int, tuple[int, ...]], int] = {}
        for key, vals in resid.items():
            c1, c2 = vals.get(e1, Fraction(0)), vals.get(e2, Fraction(0))
            if c1 == 0 and c2 == 0:
                continue
            k, mono = key
            # exact exponent: coefficient carries s^{1 - field weight}
            p = 1 - (weights[k] - monomial_weight(mono, weights))
            measured[key] = p
            if p < 1:
                ok = False
            # cross-check the claimed power against the two computed values
            if c1 * s2**p != c2 * s1**p:
                ok = False
        exps_out.append(measured)
        coeffs_out.append(coeffs)
    return ConvergenceReport(exps_out, coeffs_out, ok)


def check_bracket_flag(sys: NilpotentSystem, max_depth: int | None = None) -> list[bool]:
    """Exact per-n check that the approximation brackets at 0 reproduce the
    flag in the leading coordinates."""
    gs = sys.structure
    origin = [Fraction(0)] * sys.dim
    if max_depth is None:
        max_depth = gs.step
    table, _ = build_bracket_table(
        sys.fields, origin, max_depth=max_depth, stop_at_full_rank=False
    )
    results = []
    for n in range(1, gs.step + 1):
        dn = gs.dims[n - 1]
        vals = [e.field.evaluate(origin) for e in table.up_to_depth(n)]
        in_leading = all(all(v[k] == 0 for k in range(dn, sys.dim)) for v in vals)
        results.append(in_leading and ratlinalg.rank(vals) == dn)
    return results


@dataclass
class HormanderSampleReport:
    ok: bool
    ranks: list[int]
    failing_points: list[tuple[float, ...]]


def check_strong_hormander_everywhere(
    sys: NilpotentSystem,
    sample_points: Sequence[Sequence[float]],
    tol: float = 1e-9,
) -> HormanderSampleReport:
    """Numeric rank-d check of the bracket table at each sample point.

    The approximations satisfy the condition everywhere by construction;
    a failure here indicates an upstream bug, not a property of the point.
    """
    origin = [Fraction(0)] * sys.dim
    table, _ = build_bracket_table(
        sys.fields, origin, max_depth=sys.structure.step, stop_at_full_rank=False
    )
    ranks = []
    failing = []
    for p in sample_points:
        pf = [float(v) for v in p]
        A = np.array([e.field.evaluate_float(pf) for e in table.entries], dtype=float)
        r = numeric_rank(A, tol)
        ranks.append(r)
        if r != sys.dim:
            failing.append(tuple(pf))
    return HormanderSampleReport(not failing, ranks, failing)
