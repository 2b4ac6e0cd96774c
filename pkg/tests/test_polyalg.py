"""Exact-algebra tests: brackets, pushforwards, operators, weights,
parser round-trips and the algebraic property suite."""

from fractions import Fraction

import numpy as np
import pytest

from srloops.polyalg import (
    DegreeOverflowError,
    DimensionMismatchError,
    MissingInverseError,
    ParseError,
    Polynomial,
    PolyMap,
    PolyVectorField,
    apply_operator,
    graded_truncate,
    graded_weight,
    ito_drift_correction,
    lie_bracket,
    parse_polynomial,
    pushforward,
)

from conftest import bracket_fd_oracle, random_field, random_triangular_map, vf


class TestPolynomialBasics:
    def test_zero_terms_dropped(self):
        p = Polynomial(2, {(1, 0): Fraction(1), (0, 1): Fraction(0)})
        assert (0, 1) not in p.terms
        assert p == Polynomial.variable(2, 0)

    def test_arith_identities(self):
        x = Polynomial.variable(2, 0)
        y = Polynomial.variable(2, 1)
        p = (x + y) * (x - y)
        assert p == x * x - y * y
        assert (p - p).is_zero
        assert (x + y) ** 2 == x * x + 2 * x * y + y * y

    def test_diff(self):
        p = parse_polynomial("x1^2*x2 - 1/2*x3", 3)
        assert p.diff(0) == parse_polynomial("2*x1*x2", 3)
        assert p.diff(1) == parse_polynomial("x1^2", 3)
        assert p.diff(2) == parse_polynomial("-1/2", 3)

    def test_evaluate_exact(self):
        p = parse_polynomial("x1^2*x2 - 1/2*x2", 2)
        assert p.evaluate([Fraction(1, 2), Fraction(3)]) == Fraction(3, 4) - Fraction(3, 2)

    def test_compose(self):
        p = parse_polynomial("x1^2 + x2", 2)
        q = p.compose([parse_polynomial("x1 + 1", 2), parse_polynomial("x1*x2", 2)])
        assert q == parse_polynomial("x1^2 + 2*x1 + 1 + x1*x2", 2)

    def test_compose_degree_overflow(self):
        p = Polynomial.monomial(1, (8,))
        big = parse_polynomial("x1^3", 1)
        with pytest.raises(DegreeOverflowError):
            p.compose([big], max_degree=16)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            Polynomial.variable(2, 0) + Polynomial.variable(3, 0)


class TestParserPrinter:
    @pytest.mark.parametrize(
        "text",
        [
            "x1^2*x2 - 1/2*x3",
            "0",
            "-x1",
            "3/2",
            "x1 + x2 + 1",
            "2*x1^3 - x2^2 + 5/7*x1*x2*x3 - 4",
        ],
    )
    def test_round_trip(self, text):
        p = parse_polynomial(text, 3)
        assert parse_polynomial(p.to_string(), 3) == p

    def test_round_trip_random(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            dim = int(rng.integers(1, 5))
            p = random_field(rng, dim).components[0]
            assert parse_polynomial(p.to_string(), dim) == p
            assert parse_polynomial(p.to_string("y"), dim) == p

    def test_parse_errors_carry_position(self):
        with pytest.raises(ParseError) as err:
            parse_polynomial("x1 + @", 2)
        assert err.value.column == 6
        with pytest.raises(ParseError):
            parse_polynomial("x5", 2)
        with pytest.raises(ParseError):
            parse_polynomial("x1/x2", 2)
        with pytest.raises(ParseError):
            parse_polynomial("x1^x2", 2)

    def test_paren_and_unary(self):
        assert parse_polynomial("-(x1 - 2)*x2", 2) == parse_polynomial("2*x2 - x1*x2", 2)


class TestLieBracket:
    def test_worked_example_brackets(self, grushin_like_fields):
        X1, X2 = grushin_like_fields
        b = lie_bracket(X1, X2)
        assert b == vf(2, "1", "-x1")
        assert lie_bracket(X1, b) == vf(2, "0", "-2")

    def test_self_bracket_zero(self, grushin_like_fields):
        for X in grushin_like_fields:
            assert lie_bracket(X, X).is_zero

    def test_heisenberg_bracket_and_fd_oracle(self, heisenberg_fields):
        X1, X2 = heisenberg_fields
        b = lie_bracket(X1, X2)
        assert b == vf(3, "0", "0", "1")
        rng = np.random.default_rng(11)
        for _ in range(10):
            p = rng.uniform(-2, 2, size=3)
            fd = bracket_fd_oracle(X1, X2, p)
            assert np.allclose(fd, np.array(b.evaluate_float(list(p))), atol=1e-6)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            lie_bracket(vf(2, "1", "0"), vf(3, "1", "0", "0"))


class TestPushforward:
    def test_worked_example_pushforwards(self, grushin_like_fields, grushin_like_chart_map):
        X1, X2 = grushin_like_fields
        theta = grushin_like_chart_map
        assert pushforward(theta, X1) == vf(2, "1", "0")
        assert pushforward(theta, X2) == vf(2, "y1", "-y1^2")

    def test_identity(self, grushin_like_fields):
        ident = PolyMap.identity(2)
        for X in grushin_like_fields:
            assert pushforward(ident, X) == X

    def test_missing_inverse_rejected(self):
        theta = PolyMap([parse_polynomial("x1^3", 1)])
        with pytest.raises(MissingInverseError):
            pushforward(theta, vf(1, "1"))


class TestOperatorsAndDrift:
    def test_word_value_from_worked_example(self, grushin_like_fields):
        X1, _ = grushin_like_fields
        g = Polynomial.variable(2, 1)
        val = apply_operator([X1, X1], g)
        assert val.evaluate([0, 0]) == 1

    def test_empty_word(self):
        g = parse_polynomial("x1*x2", 2)
        assert apply_operator([], g) == g

    def test_single_partial(self):
        g = parse_polynomial("x1*x2", 2)
        assert apply_operator([vf(2, "1", "0")], g) == parse_polynomial("x2", 2)

    def test_drift_correction_constant_fields(self):
        fields = [vf(2, "1", "0"), vf(2, "0", "1")]
        out = ito_drift_correction(PolyVectorField.zero(2), fields)
        assert out.is_zero

    def test_drift_correction_heisenberg(self, heisenberg_fields):
        out = ito_drift_correction(PolyVectorField.zero(3), heisenberg_fields)
        assert out.is_zero

    def test_drift_correction_worked_example(self, grushin_like_fields):
        out = ito_drift_correction(PolyVectorField.zero(2), grushin_like_fields)
        assert out == vf(2, "1/2*x1", "1/2")
        # cross-check against a finite-difference directional derivative
        rng = np.random.default_rng(5)
        for _ in range(5):
            p = rng.uniform(-1, 1, size=2)
            h = 1e-6
            acc = np.zeros(2)
            for X in grushin_like_fields:
                v = np.array(X.evaluate_float(list(p)))
                acc += 0.5 * (
                    np.array(X.evaluate_float(list(p + h * v)))
                    - np.array(X.evaluate_float(list(p - h * v)))
                ) / (2 * h)
            assert np.allclose(acc, np.array(out.evaluate_float(list(p))), atol=1e-5)


class TestGradedWeights:
    def test_worked_example_truncation(self):
        pushed = vf(2, "y1", "-y1^2")
        weights = (1, 3)
        # y1 d1 has weight 0, -(y1)^2 d2 has weight 1
        assert graded_weight(pushed, weights) == 0
        assert graded_truncate(pushed, 1, weights) == vf(2, "0", "-y1^2")

    def test_constant_field(self):
        f = vf(2, "1", "0")
        assert graded_weight(f, (1, 3)) == 1
        assert graded_truncate(f, 1, (1, 3)) == f

    def test_heisenberg_truncation_identity(self, heisenberg_fields):
        weights = (1, 1, 2)
        for X in heisenberg_fields:
            assert graded_weight(X, weights) == 1
            assert graded_truncate(X, 1, weights) == X

    def test_zero_field_weight_sentinel(self):
        import math

        assert graded_weight(PolyVectorField.zero(2), (1, 2)) == -math.inf

    def test_truncation_splits_by_weight(self):
        rng = np.random.default_rng(17)
        weights = (1, 2, 3)
        for _ in range(20):
            X = random_field(rng, 3)
            n = int(rng.integers(-3, 4))
            kept = graded_truncate(X, n, weights)
            rest = X - kept
            assert graded_weight(kept, weights) >= n or kept.is_zero
            for k, comp in enumerate(rest.components):
                for exps in comp.terms:
                    w = weights[k] - sum(e * w_ for e, w_ in zip(exps, weights))
                    assert w <= n - 1


class TestAlgebraicProperties:
    """Randomized exact identities (the symbolic property suite)."""

    def test_antisymmetry_and_jacobi(self):
        rng = np.random.default_rng(23)
        for _ in range(200):
            dim = int(rng.integers(2, 5))
            X, Y, Z = (random_field(rng, dim) for _ in range(3))
            assert (lie_bracket(X, Y) + lie_bracket(Y, X)).is_zero
            jacobi = (
                lie_bracket(X, lie_bracket(Y, Z))
                + lie_bracket(Y, lie_bracket(Z, X))
                + lie_bracket(Z, lie_bracket(X, Y))
            )
            assert jacobi.is_zero

    def test_bilinearity(self):
        rng = np.random.default_rng(29)
        for _ in range(30):
            dim = int(rng.integers(2, 4))
            X, Y, Z = (random_field(rng, dim, max_degree=3) for _ in range(3))
            a = Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 4)))
            lhs = lie_bracket(X.scale(a) + Y, Z)
            rhs = lie_bracket(X, Z).scale(a) + lie_bracket(Y, Z)
            assert lhs == rhs

    def test_pushforward_naturality(self):
        rng = np.random.default_rng(31)
        for _ in range(40):
            dim = int(rng.integers(2, 4))
            phi = random_triangular_map(rng, dim)
            X = random_field(rng, dim, max_degree=3, max_terms=2)
            Y = random_field(rng, dim, max_degree=3, max_terms=2)
            lhs = pushforward(phi, lie_bracket(X, Y), max_degree=256)
            rhs = lie_bracket(
                pushforward(phi, X, max_degree=256), pushforward(phi, Y, max_degree=256)
            )
            assert lhs == rhs


def test_exact_vs_float_evaluation_consistency():
    rng = np.random.default_rng(41)
    for _ in range(50):
        dim = int(rng.integers(1, 4))
        p = random_field(rng, dim).components[0]
        pt = [Fraction(int(rng.integers(-10, 11)), int(rng.integers(1, 4))) for _ in range(dim)]
        exact = float(p.evaluate(pt))
        approx = p.evaluate_float([float(v) for v in pt])
        scale = max(1.0, abs(exact))
        assert abs(exact - approx) <= 1e-12 * scale
