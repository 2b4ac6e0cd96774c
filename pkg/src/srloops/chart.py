"""Adapted charts: validation and exact polynomial construction.

A chart theta (polynomial, with polynomial inverse) is adapted to the
bracket filtration at the base point x when

  (i)  the Jacobian of theta at x maps the filtration space C_n(x) onto
       span{e_1..e_{d_n}} for each n <= N, and
  (ii) (D theta^k)(x) = 0 for every word D = Y_1...Y_n over the
       generators and every coordinate k > d_n.

Both conditions are decided exactly over Q and recorded in a certificate.

The constructor proceeds in two stages: a linear stage that picks a
flag-compatible basis of bracket values (greedy over the bracket table in
depth order) and inverts it, and a correction stage that, coordinate by
coordinate in weight order, adds a polynomial in the strictly
lower-weight coordinates whose coefficients solve the exact linear system
annihilating all generator words of length <= w_k - 1.  Corrections have
degree >= 2, so they do not disturb condition (i); each coordinate's
constraints involve only its own component, so earlier certificates are
never disturbed.  Monomials of degree > w_k - 1 are in the kernel of
every constraint (a word of length j kills any monomial of degree > j at
the origin), so the effective correction degree is
min(max_correction_degree, w_k - 1).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import ratlinalg
from .grading import BracketTable, GradedStructure, build_graded_structure
from .polyalg import (
    DEFAULT_MAX_DEGREE,
    MissingInverseError,
    Polynomial,
    PolyMap,
    PolyVectorField,
    apply_operator,
    pushforward,
)

__all__ = [
    "AdaptedChart",
    "ChartCertificate",
    "NotAdaptedError",
    "ChartConstructionError",
    "validate_adapted",
    "construct_adapted",
]


class NotAdaptedError(Exception):
    """First violation found while validating a chart.

    kind is "origin" (theta(x) != 0), "alignment" (condition (i) at level
    n) or "word" (condition (ii), with the word and its nonzero value).
    """

    def __init__(self, kind: str, n: int | None = None, k: int | None = None,
                 word: tuple[int, ...] | None = None, value: Fraction | None = None):
        self.kind = kind
        self.n = n
        self.k = k
        self.word = word
        self.value = value
        if kind == "word":
            wtxt = "X" + " X".join(str(i) for i in word)
            msg = f"condition (ii) fails at n={n}, k={k}, D={wtxt}: value {value}"
        elif kind == "alignment":
            msg = f"condition (i) fails at n={n}"
        else:
            msg = "theta does not map the base point to 0"
        super().__init__(msg)


class ChartConstructionError(Exception):
    """The correction system for a coordinate is unsolvable at the given
    degree cap; the caller may raise max_correction_degree."""

    def __init__(self, k: int, word_length: int, degree_cap: int):
        super().__init__(
            f"no polynomial correction of degree <= {degree_cap} solves the "
            f"word constraints for coordinate {k + 1} (first obstruction at "
            f"word length {word_length})"
        )
        self.k = k
        self.word_length = word_length
        self.degree_cap = degree_cap


@dataclass
class ChartCertificate:
    """Verified adaptedness conditions.

    alignment: per n, the exact images of the depth <= n bracket values
    under the chart Jacobian at x (all with vanishing entries past d_n).
    zero_words: every verified (n, k, word) triple; all values are zero.
    """

    alignment: list[tuple[int, list[tuple[Fraction, ...]]]]
    zero_words: list[tuple[int, int, tuple[int, ...]]]

    def to_csv(self) -> str:
        lines = ["n,k,word,value"]
        for n, k, word in self.zero_words:
            lines.append(f"{n},{k}," + "".join(f"X{i}" for i in word) + ",0")
        return "\n".join(lines)


@dataclass
class AdaptedChart:
    theta: PolyMap
    structure: GradedStructure
    certificate: ChartCertificate

    @property
    def dim(self) -> int:
        return self.theta.dim


def _jacobian_images(
    theta: PolyMap, table: BracketTable, structure: GradedStructure
) -> list[tuple[int, tuple[Fraction, ...]]]:
    """(depth, J_theta(x) . bracket_value) for every table entry."""
    x = structure.base_point
    J = theta.jacobian_at(x)
    dim = structure.dim
    out = []
    for entry in table.entries:
        v = entry.field.evaluate(x)
        img = tuple(
            sum(J[a][b] * v[b] for b in range(dim)) for a in range(dim)
        )
        out.append((entry.depth, img))
    return out


def validate_adapted(
    theta: PolyMap,
    generators: Sequence[PolyVectorField],
    structure: GradedStructure,
    table: BracketTable | None = None,
    max_degree: int = DEFAULT_MAX_DEGREE,
) -> AdaptedChart:
    """Decide adaptedness exactly; returns the certificate or raises
    NotAdaptedError at the first violation."""
    if not theta.has_inverse():
        raise MissingInverseError("an adapted chart needs a polynomial inverse")
    x = structure.base_point
    if any(v != 0 for v in theta.evaluate(x)):
        raise NotAdaptedError("origin")
    if table is None:
        _, table = build_graded_structure(generators, x)

    dim = structure.dim
    dims = structure.dims

    # condition (i): images of depth <= n bracket values must span exactly
    # the first d_n coordinates.
    images = _jacobian_images(theta, table, structure)
    alignment: list[tuple[int, list[tuple[Fraction, ...]]]] = []
    for n in range(1, structure.step + 1):
        dn = dims[n - 1]
        vecs = [img for depth, img in images if depth <= n]
        if any(any(v[k] != 0 for k in range(dn, dim)) for v in vecs):
            raise NotAdaptedError("alignment", n=n)
        if ratlinalg.rank([v[:dn] for v in vecs]) != dn:
            raise NotAdaptedError("alignment", n=n)
        alignment.append((n, vecs))

    # condition (ii): all generator words of length n kill theta^k at x
    # for k > d_n.
    m = len(generators)
    zero_words: list[tuple[int, int, tuple[int, ...]]] = []
    for n in range(1, structure.step + 1):
        dn = dims[n - 1]
        if dn == dim:
            break
        for word in itertools.product(range(1, m + 1), repeat=n):
            ops = [generators[i - 1] for i in word]
            for k in range(dn, dim):
                value = apply_operator(ops, theta.components[k]).evaluate(x)
                if value != 0:
                    raise NotAdaptedError("word", n=n, k=k + 1, word=word, value=value)
                zero_words.append((n, k + 1, word))

    return AdaptedChart(theta, structure, ChartCertificate(alignment, zero_words))


def _correction_monomials(
    dim: int, small_vars: list[int], degree_cap: int
) -> list[tuple[int, ...]]:
    """Exponent tuples supported on small_vars with 2 <= degree <= cap."""
    out: list[tuple[int, ...]] = []
    if degree_cap < 2 or not small_vars:
        return out

    def rec(pos: int, remaining: int, current: list[int]):
        if pos == len(small_vars):
            total = sum(current)
            if 2 <= total:
                exps = [0] * dim
                for var, e in zip(small_vars, current):
                    exps[var] = e
                out.append(tuple(exps))
            return
        for e in range(remaining + 1):
            rec(pos + 1, remaining - e, current + [e])

    rec(0, degree_cap, [])
    return sorted(out)


def construct_adapted(
    generators: Sequence[PolyVectorField],
    structure: GradedStructure,
    table: BracketTable | None = None,
    max_correction_degree: int | None = None,
    max_degree: int = DEFAULT_MAX_DEGREE,
) -> AdaptedChart:
    """Build and certify an adapted chart (see module docstring).

    Deterministic: the greedy basis choice breaks ties by (depth, table
    index) and free variables in the correction solve are set to zero.
    """
    x = structure.base_point
    dim = structure.dim
    if table is None:
        _, table = build_graded_structure(generators, x)
    if max_correction_degree is None:
        max_correction_degree = structure.step

    # linear stage: greedy flag-compatible basis of bracket values
    basis = ratlinalg.SpanBasis(dim)
    picked: list[tuple[Fraction, ...]] = []
    for entry in table.entries:
        v = entry.field.evaluate(x)
        if basis.add(v):
            picked.append(v)
        if len(picked) == dim:
            break
    B = [[picked[j][i] for j in range(dim)] for i in range(dim)]  # columns
    L = ratlinalg.invert(B)
    theta_lin = PolyMap.from_linear(L, offset=x)

    # correction stage, solved in the linear-stage coordinates
    pushed = [pushforward(theta_lin, g, max_degree) for g in generators]
    weights = structure.weights
    m = len(pushed)
    origin = [Fraction(0)] * dim

    psi_comps: list[Polynomial] = []
    for k in range(dim):
        zk = Polynomial.variable(dim, k)
        wk = weights[k]
        if wk < 2:
            psi_comps.append(zk)
            continue
        small_vars = [j for j in range(dim) if weights[j] < wk]
        cap = min(max_correction_degree, wk - 1)
        monos = _correction_monomials(dim, small_vars, cap)
        words = [
            word
            for length in range(1, wk)
            for word in itertools.product(range(m), repeat=length)
        ]
        rows: list[list[Fraction]] = []
        rhs: list[Fraction] = []
        word_lengths: list[int] = []
        for word in words:
            ops = [pushed[i] for i in word]
            rhs.append(-apply_operator(ops, zk).evaluate(origin))
            rows.append(
                [
                    apply_operator(ops, Polynomial.monomial(dim, a)).evaluate(origin)
                    for a in monos
                ]
            )
            word_lengths.append(len(word))
        solution = ratlinalg.solve(rows, rhs)
        if solution is None:
            # locate the shortest word length at which the system already
            # turns inconsistent, for the error report
            bad_len = wk - 1
            for length in range(1, wk):
                idx = [i for i, l in enumerate(word_lengths) if l <= length]
                if ratlinalg.solve([rows[i] for i in idx], [rhs[i] for i in idx]) is None:
                    bad_len = length
                    break
            raise ChartConstructionError(k, bad_len, cap)
        correction = Polynomial(dim, dict(zip(monos, solution)))
        psi_comps.append(zk + correction)

    # exact inverse of psi by back-substitution in weight order
    order = sorted(range(dim), key=lambda k: (weights[k], k))
    inv_comps: list[Polynomial | None] = [None] * dim
    for k in order:
        h = psi_comps[k] - Polynomial.variable(dim, k)
        if h.is_zero:
            inv_comps[k] = Polynomial.variable(dim, k)
            continue
        subs = [
            inv_comps[j] if inv_comps[j] is not None else Polynomial.variable(dim, j)
            for j in range(dim)
        ]
        inv_comps[k] = Polynomial.variable(dim, k) - h.compose(subs, max_degree)
    psi = PolyMap(psi_comps, inv_comps, check=True, max_degree=max_degree)

    theta = psi.compose(theta_lin, max_degree)
    return validate_adapted(theta, generators, structure, table, max_degree)
