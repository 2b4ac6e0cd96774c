"""Shared fixtures: the worked 2-d model, Heisenberg, elliptic, and small
numeric oracles used across the suite."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from srloops.polyalg import Polynomial, PolyMap, PolyVectorField, parse_polynomial


def vf(dim: int, *components: str) -> PolyVectorField:
    return PolyVectorField([parse_polynomial(c, dim) for c in components])


@pytest.fixture(scope="session")
def grushin_like_fields():
    """X1 = d/dx1 + x1 d/dx2, X2 = x1 d/dx1 on R^2 (base point 0)."""
    return [vf(2, "1", "x1"), vf(2, "x1", "0")]


@pytest.fixture(scope="session")
def grushin_like_chart_map():
    """theta = (x1, x2 - x1^2/2), the global adapted chart at 0."""
    comps = [parse_polynomial("x1", 2), parse_polynomial("x2 - 1/2*x1^2", 2)]
    inv = [parse_polynomial("y1", 2), parse_polynomial("y2 + 1/2*y1^2", 2)]
    return PolyMap(comps, inv)


@pytest.fixture(scope="session")
def heisenberg_fields():
    """X1 = d1 - (x2/2) d3, X2 = d2 + (x1/2) d3 on R^3."""
    return [vf(3, "1", "0", "-1/2*x2"), vf(3, "0", "1", "1/2*x1")]


@pytest.fixture(scope="session")
def elliptic2d_fields():
    return [vf(2, "1", "0"), vf(2, "0", "1")]


def bracket_fd_oracle(X, Y, point, h=1e-6):
    """Finite-difference commutator value: directional derivative of Y
    along X minus the derivative of X along Y, at a point."""
    point = np.asarray(point, dtype=float)
    d = len(point)

    def ev(F, p):
        return np.array(F.evaluate_float(list(p)), dtype=float)

    jx = np.zeros((d, d))
    jy = np.zeros((d, d))
    for b in range(d):
        e = np.zeros(d)
        e[b] = h
        jx[:, b] = (ev(X, point + e) - ev(X, point - e)) / (2 * h)
        jy[:, b] = (ev(Y, point + e) - ev(Y, point - e)) / (2 * h)
    return jy @ ev(X, point) - jx @ ev(Y, point)


def random_polynomial(rng, dim, max_degree=4, max_terms=4) -> Polynomial:
    terms = {}
    for _ in range(int(rng.integers(1, max_terms + 1))):
        exps = tuple(int(e) for e in rng.integers(0, max_degree + 1, size=dim))
        while sum(exps) > max_degree:
            exps = tuple(int(e) for e in rng.integers(0, max_degree + 1, size=dim))
        coeff = Fraction(int(rng.integers(-6, 7)), int(rng.integers(1, 5)))
        if coeff:
            terms[exps] = terms.get(exps, Fraction(0)) + coeff
    return Polynomial(dim, terms)


def random_field(rng, dim, max_degree=4, max_terms=3) -> PolyVectorField:
    return PolyVectorField(
        [random_polynomial(rng, dim, max_degree, max_terms) for _ in range(dim)]
    )


def random_triangular_map(rng, dim, shear_degree=2) -> PolyMap:
    """A lower-triangular polynomial shear with exact polynomial inverse:
    phi_k = x_k + q_k(x_1..x_{k-1}), solved back-to-front."""
    comps = []
    for k in range(dim):
        comp = Polynomial.variable(dim, k)
        if k > 0:
            extra = random_polynomial(rng, dim, max_degree=shear_degree, max_terms=2)
            # keep only monomials in strictly earlier variables, drop constants
            kept = {
                e: c
                for e, c in extra.terms.items()
                if sum(e) >= 1 and all(e[j] == 0 for j in range(k, dim))
            }
            comp = comp + Polynomial(dim, kept)
        comps.append(comp)
    inv = [None] * dim
    for k in range(dim):
        h = comps[k] - Polynomial.variable(dim, k)
        subs = [inv[j] if inv[j] is not None else Polynomial.variable(dim, j) for j in range(dim)]
        inv[k] = Polynomial.variable(dim, k) - (h.compose(subs, 64) if not h.is_zero else h)
    return PolyMap(comps, inv, check=True, max_degree=64)
