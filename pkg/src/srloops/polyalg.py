"""Exact algebra for multivariate polynomials and polynomial vector fields.

A polynomial in d variables is stored sparsely as a map from exponent
multi-indices (length-d tuples of non-negative ints) to rational
coefficients (Fraction).  Zero coefficients are never stored, so equality
and hashing are canonical term-by-term.  All symbolic operations here are
exact; floating point enters only through the compiled evaluators used by
the simulation engine.

Vector fields are d-tuples of polynomials, component k multiplying
d/dy^k.  The module provides the operations the rest of the pipeline is
built from:

  lie_bracket(X, Y)           [X,Y] = (JY) X - (JX) Y
  pushforward(phi, X)         (Jphi X) o phi^{-1}, exact composition
  ito_drift_correction        X0 + 1/2 sum_i (JX_i) X_i
  apply_operator(D, g)        Y_1(Y_2(...(Y_n g)...)) for a word D
  graded_weight / graded_truncate   weight bookkeeping for a monomial
      field y^a d/dy^k, weight = w_k - <a, w>

Text syntax (used by model files, charts and reports): variables x1..xd
or y1..yd, integer or rational literals like 3/2, operators + - * / ^,
e.g. "x1^2*x2 - 1/2*x3".  Division is only allowed by constants.  Parser
and printer round-trip exactly.
"""

from __future__ import annotations

import itertools
import math
import re
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

__all__ = [
    "DEFAULT_MAX_DEGREE",
    "DimensionMismatchError",
    "DegreeOverflowError",
    "MissingInverseError",
    "ParseError",
    "Polynomial",
    "PolyVectorField",
    "PolyMap",
    "parse_polynomial",
    "lie_bracket",
    "pushforward",
    "ito_drift_correction",
    "apply_operator",
    "monomial_weight",
    "graded_weight",
    "graded_truncate",
]

# Charts and pushforwards reject results whose predicted total degree
# exceeds this bound (silent truncation is never acceptable here).
DEFAULT_MAX_DEGREE = 16

Rational = Fraction | int
Exponents = tuple[int, ...]


class DimensionMismatchError(ValueError):
    """Operands live in different numbers of variables."""


class DegreeOverflowError(ArithmeticError):
    """A composition would exceed the configured maximum total degree."""

    def __init__(self, degree: int, limit: int):
        super().__init__(
            f"composition degree bound {degree} exceeds the configured "
            f"maximum {limit}; raise max_degree if this is intended"
        )
        self.degree = degree
        self.limit = limit


class MissingInverseError(ValueError):
    """A pushforward was requested along a map without a stored inverse."""


class ParseError(ValueError):
    """Polynomial text that does not conform to the expression syntax."""

    def __init__(self, message: str, text: str, pos: int):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {col}: {text!r}")
        self.pos = pos
        self.line = line
        self.column = col


def _as_fraction(value: Rational) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def _check_same_dim(a, b) -> None:
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dimension mismatch: {a.dim} vs {b.dim}")


class Polynomial:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("dim", "_terms", "_hash")

    def __init__(self, dim: int, terms: Mapping[Exponents, Rational] | Iterable = ()):
        if dim < 1:
            raise ValueError("dim must be a positive integer")
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Exponents, Fraction] = {}
        for exps, coeff in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != dim:
                raise DimensionMismatchError(
                    f"exponent vector {exps} has length {len(exps)}, expected {dim}"
                )
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            coeff = _as_fraction(coeff)
            if coeff != 0:
                acc = clean.get(exps)
                coeff = coeff if acc is None else acc + coeff
                if coeff == 0:
                    clean.pop(exps, None)
                else:
                    clean[exps] = coeff
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "_terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("Polynomial is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "Polynomial":
        return cls(dim)

    @classmethod
    def const(cls, dim: int, value: Rational) -> "Polynomial":
        return cls(dim, {(0,) * dim: _as_fraction(value)})

    @classmethod
    def variable(cls, dim: int, index: int) -> "Polynomial":
        """The coordinate polynomial y_{index+1} (index is 0-based)."""
        if not 0 <= index < dim:
            raise ValueError(f"variable index {index} out of range for dim {dim}")
        exps = [0] * dim
        exps[index] = 1
        return cls(dim, {tuple(exps): Fraction(1)})

    @classmethod
    def monomial(cls, dim: int, exps: Sequence[int], coeff: Rational = 1) -> "Polynomial":
        return cls(dim, {tuple(exps): _as_fraction(coeff)})

    # -- basic queries -------------------------------------------------

    @property
    def terms(self) -> dict[Exponents, Fraction]:
        """The term map.  Treat as read-only."""
        return self._terms

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self._terms)

    def constant_value(self) -> Fraction:
        return self._terms.get((0,) * self.dim, Fraction(0))

    def total_degree(self) -> int:
        """Max total degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.dim == other.dim and self._terms == other._terms

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.dim, tuple(sorted(self._terms.items()))))
            object.__setattr__(self, "_hash", h)
        return h

    def __bool__(self) -> bool:
        return bool(self._terms)

    # -- arithmetic ----------------------------------------------------

    def _coerce(self, other) -> "Polynomial | None":
        if isinstance(other, Polynomial):
            _check_same_dim(self, other)
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial.const(self.dim, other)
        return None

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for exps, coeff in other._terms.items():
            acc = out.get(exps, Fraction(0)) + coeff
            if acc == 0:
                out.pop(exps, None)
            else:
                out[exps] = acc
        return Polynomial(self.dim, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.dim, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Polynomial":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            c = _as_fraction(other)
            if c == 0:
                return Polynomial.zero(self.dim)
            return Polynomial(self.dim, {e: c * v for e, v in self._terms.items()})
        if not isinstance(other, Polynomial):
            return NotImplemented
        _check_same_dim(self, other)
        out: dict[Exponents, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                acc = out.get(exps, Fraction(0)) + c1 * c2
                if acc == 0:
                    out.pop(exps, None)
                else:
                    out[exps] = acc
        return Polynomial(self.dim, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = Polynomial.const(self.dim, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- calculus ------------------------------------------------------

    def diff(self, index: int) -> "Polynomial":
        """Exact partial derivative with respect to variable `index` (0-based)."""
        out: dict[Exponents, Fraction] = {}
        for exps, coeff in self._terms.items():
            e = exps[index]
            if e == 0:
                continue
            new = list(exps)
            new[index] = e - 1
            out[tuple(new)] = coeff * e
        return Polynomial(self.dim, out)

    def compose(
        self,
        maps: Sequence["Polynomial"],
        max_degree: int = DEFAULT_MAX_DEGREE,
    ) -> "Polynomial":
        """Substitute variable j by maps[j], exactly.

        The predicted total degree of each substituted monomial is checked
        against max_degree before any work happens; exceeding it raises
        DegreeOverflowError rather than truncating.
        """
        if len(maps) != self.dim:
            raise DimensionMismatchError(
                f"need {self.dim} substitution polynomials, got {len(maps)}"
            )
        if not maps:
            raise ValueError("empty substitution")
        tgt = maps[0].dim
        for p in maps:
            if p.dim != tgt:
                raise DimensionMismatchError("substitution polynomials disagree in dim")
        degs = [max(p.total_degree(), 0) for p in maps]
        out = Polynomial.zero(tgt)
        pow_cache: list[dict[int, Polynomial]] = [
            {0: Polynomial.const(tgt, 1)} for _ in range(self.dim)
        ]
        for exps, coeff in sorted(self._terms.items()):
            bound = sum(e * degs[j] for j, e in enumerate(exps))
            if bound > max_degree:
                raise DegreeOverflowError(bound, max_degree)
            prod = Polynomial.const(tgt, coeff)
            for j, e in enumerate(exps):
                if e == 0:
                    continue
                cache = pow_cache[j]
                if e not in cache:
                    best = max(k for k in cache if k <= e)
                    acc = cache[best]
                    for k in range(best + 1, e + 1):
                        acc = acc * maps[j]
                        cache[k] = acc
                prod = prod * cache[e]
            out = out + prod
        return out

    # -- evaluation ----------------------------------------------------

    def evaluate(self, point: Sequence[Rational]) -> Fraction:
        """Exact evaluation at a rational point."""
        if len(point) != self.dim:
            raise DimensionMismatchError(
                f"point has length {len(point)}, expected {self.dim}"
            )
        pt = [_as_fraction(v) for v in point]
        total = Fraction(0)
        for exps, coeff in self._terms.items():
            term = coeff
            for x, e in zip(pt, exps):
                if e:
                    term *= x**e
            total += term
        return total

    def evaluate_float(self, point: Sequence[float]) -> float:
        total = 0.0
        for exps, coeff in self._terms.items():
            term = float(coeff)
            for x, e in zip(point, exps):
                if e:
                    term *= float(x) ** e
            total += term
        return total

    # -- printing ------------------------------------------------------

    @staticmethod
    def _term_sort_key(exps: Exponents):
        # graded lexicographic, highest first
        return (-sum(exps), tuple(-e for e in exps))

    def to_string(self, prefix: str = "x") -> str:
        if not self._terms:
            return "0"
        pieces: list[str] = []
        for exps, coeff in sorted(self._terms.items(), key=lambda kv: self._term_sort_key(kv[0])):
            factors = []
            for j, e in enumerate(exps):
                if e == 1:
                    factors.append(f"{prefix}{j + 1}")
                elif e > 1:
                    factors.append(f"{prefix}{j + 1}^{e}")
            mag = abs(coeff)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            if not pieces:
                pieces.append(body if coeff > 0 else f"-{body}")
            else:
                pieces.append(f"+ {body}" if coeff > 0 else f"- {body}")
        return " ".join(pieces)

    def __str__(self) -> str:
        return self.to_string()

    def __repr__(self) -> str:
        return f"Polynomial({self.dim}, '{self.to_string()}')"


# ---------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>\d+)|(?P<name>[A-Za-z]+\d+)|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos == len(text):
                break
            raise ParseError("unexpected character", text, pos)
        if m.lastgroup == "number":
            out.append(("number", int(m.group("number")), m.start("number")))
        elif m.lastgroup == "name":
            out.append(("name", m.group("name"), m.start("name")))
        else:
            out.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


class _Parser:
    def __init__(self, text: str, dim: int, prefixes: tuple[str, ...]):
        self.text = text
        self.dim = dim
        self.prefixes = prefixes
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.peek()
        if kind != "op" or val != op:
            raise ParseError(f"expected '{op}'", self.text, pos)
        self.advance()

    def parse(self) -> Polynomial:
        p = self.expr()
        kind, _, pos = self.peek()
        if kind != "end":
            raise ParseError("trailing input", self.text, pos)
        return p

    def expr(self) -> Polynomial:
        kind, val, _ = self.peek()
        sign = 1
        if kind == "op" and val in "+-":
            self.advance()
            sign = -1 if val == "-" else 1
        acc = self.term() * sign
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                rhs = self.term()
                acc = acc + rhs if val == "+" else acc - rhs
            else:
                return acc

    def term(self) -> Polynomial:
        acc = self.factor()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val == "*":
                self.advance()
                acc = acc * self.factor()
            elif kind == "op" and val == "/":
                self.advance()
                rhs = self.factor()
                if not rhs.is_constant() or rhs.constant_value() == 0:
                    raise ParseError("division only by nonzero constants", self.text, pos)
                acc = acc * (Fraction(1) / rhs.constant_value())
            else:
                return acc

    def factor(self) -> Polynomial:
        base = self.atom()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.advance()
            kind, val, pos = self.peek()
            if kind != "number":
                raise ParseError("exponent must be a non-negative integer", self.text, pos)
            self.advance()
            base = base**val
        return base

    def atom(self) -> Polynomial:
        kind, val, pos = self.advance()
        if kind == "number":
            return Polynomial.const(self.dim, val)
        if kind == "name":
            m = re.fullmatch(r"([A-Za-z]+)(\d+)", val)
            prefix, idx = m.group(1), int(m.group(2))
            if prefix not in self.prefixes:
                raise ParseError(
                    f"unknown variable prefix '{prefix}' (expected one of {self.prefixes})",
                    self.text,
                    pos,
                )
            if not 1 <= idx <= self.dim:
                raise ParseError(
                    f"variable index {idx} out of range 1..{self.dim}", self.text, pos
                )
            return Polynomial.variable(self.dim, idx - 1)
        if kind == "op" and val == "(":
            p = self.expr()
            self.expect_op(")")
            return p
        if kind == "op" and val == "-":
            return -self.factor()
        raise ParseError("expected a number, variable or '('", self.text, pos)


def parse_polynomial(
    text: str, dim: int, prefixes: tuple[str, ...] = ("x", "y", "z")
) -> Polynomial:
    """Parse the expression syntax, variables <prefix>1..<prefix>d (1-based)."""
    return _Parser(text, dim, prefixes).parse()


# ---------------------------------------------------------------------
# vector fields
# ---------------------------------------------------------------------


class PolyVectorField:
    """A polynomial vector field: component k multiplies d/dy^k."""

    __slots__ = ("dim", "components", "_hash")

    def __init__(self, components: Sequence[Polynomial]):
        comps = tuple(components)
        if not comps:
            raise ValueError("a vector field needs at least one component")
        dim = comps[0].dim
        if len(comps) != dim:
            raise DimensionMismatchError(
                f"{len(comps)} components for dimension {dim}"
            )
        for c in comps:
            if c.dim != dim:
                raise DimensionMismatchError("component dimensions disagree")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("PolyVectorField is immutable")

    @classmethod
    def zero(cls, dim: int) -> "PolyVectorField":
        return cls([Polynomial.zero(dim)] * dim)

    @classmethod
    def basis(cls, dim: int, index: int) -> "PolyVectorField":
        """The constant coordinate field d/dy^{index+1}."""
        comps = [Polynomial.zero(dim)] * dim
        comps[index] = Polynomial.const(dim, 1)
        return cls(comps)

    @classmethod
    def from_strings(cls, texts: Sequence[str], dim: int) -> "PolyVectorField":
        return cls([parse_polynomial(t, dim) for t in texts])

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.components)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyVectorField):
            return NotImplemented
        return self.components == other.components

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash(self.components)
            object.__setattr__(self, "_hash", h)
        return h

    def __add__(self, other: "PolyVectorField") -> "PolyVectorField":
        _check_same_dim(self, other)
        return PolyVectorField([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "PolyVectorField") -> "PolyVectorField":
        _check_same_dim(self, other)
        return PolyVectorField([a - b for a, b in zip(self.components, other.components)])

    def __neg__(self) -> "PolyVectorField":
        return PolyVectorField([-c for c in self.components])

    def scale(self, value: Rational) -> "PolyVectorField":
        return PolyVectorField([c * value for c in self.components])

    def apply_to(self, g: Polynomial) -> Polynomial:
        """Directional derivative Xg = sum_k X^k dg/dy^k, exact."""
        if g.dim != self.dim:
            raise DimensionMismatchError(f"dimension mismatch: {self.dim} vs {g.dim}")
        out = Polynomial.zero(self.dim)
        for k, comp in enumerate(self.components):
            if comp.is_zero:
                continue
            out = out + comp * g.diff(k)
        return out

    def jacobian(self) -> tuple[tuple[Polynomial, ...], ...]:
        """J[a][b] = d X^a / d y^b, all entries exact polynomials."""
        return tuple(
            tuple(comp.diff(b) for b in range(self.dim)) for comp in self.components
        )

    def evaluate(self, point: Sequence[Rational]) -> tuple[Fraction, ...]:
        return tuple(c.evaluate(point) for c in self.components)

    def evaluate_float(self, point: Sequence[float]) -> tuple[float, ...]:
        return tuple(c.evaluate_float(point) for c in self.components)

    def max_total_degree(self) -> int:
        return max(c.total_degree() for c in self.components)

    def to_strings(self, prefix: str = "x") -> tuple[str, ...]:
        return tuple(c.to_string(prefix) for c in self.components)

    def __repr__(self) -> str:
        return f"PolyVectorField([{', '.join(self.to_strings())}])"


def _matvec(J: Sequence[Sequence[Polynomial]], X: PolyVectorField) -> PolyVectorField:
    dim = X.dim
    comps = []
    for a in range(dim):
        acc = Polynomial.zero(dim)
        for b in range(dim):
            entry = J[a][b]
            xb = X.components[b]
            if entry.is_zero or xb.is_zero:
                continue
            acc = acc + entry * xb
        comps.append(acc)
    return PolyVectorField(comps)


def lie_bracket(X: PolyVectorField, Y: PolyVectorField) -> PolyVectorField:
    """Exact commutator [X, Y] = (JY) X - (JX) Y."""
    _check_same_dim(X, Y)
    return _matvec(Y.jacobian(), X) - _matvec(X.jacobian(), Y)


def apply_operator(ops: Sequence[PolyVectorField], g: Polynomial) -> Polynomial:
    """Apply the word D = Y_1 ... Y_n to g, i.e. Y_1(Y_2(...(Y_n g)...))."""
    for Y in reversed(list(ops)):
        g = Y.apply_to(g)
    return g


def ito_drift_correction(
    X0: PolyVectorField, diffusion: Sequence[PolyVectorField]
) -> PolyVectorField:
    """Ito-form drift X0 + 1/2 sum_i (JX_i) X_i, exact."""
    out = X0
    for X in diffusion:
        _check_same_dim(X0, X)
        out = out + _matvec(X.jacobian(), X).scale(Fraction(1, 2))
    return out


# ---------------------------------------------------------------------
# polynomial maps
# ---------------------------------------------------------------------


class PolyMap:
    """A polynomial map R^d -> R^d, optionally with an exact polynomial inverse.

    When an inverse is supplied it is verified on construction: composing
    the components with the inverse, in both orders, must simplify exactly
    to the identity coordinate polynomials.
    """

    __slots__ = ("dim", "components", "inverse")

    def __init__(
        self,
        components: Sequence[Polynomial],
        inverse: Sequence[Polynomial] | None = None,
        check: bool = True,
        max_degree: int = DEFAULT_MAX_DEGREE,
    ):
        comps = tuple(components)
        dim = comps[0].dim
        if len(comps) != dim or any(c.dim != dim for c in comps):
            raise DimensionMismatchError("map components must be square in dimension")
        inv = tuple(inverse) if inverse is not None else None
        if inv is not None and (len(inv) != dim or any(c.dim != dim for c in inv)):
            raise DimensionMismatchError("inverse components must be square in dimension")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "inverse", inv)
        if inv is not None and check:
            self._verify_inverse(max_degree)

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("PolyMap is immutable")

    def _verify_inverse(self, max_degree: int) -> None:
        ident = [Polynomial.variable(self.dim, k) for k in range(self.dim)]
        for k in range(self.dim):
            if self.components[k].compose(self.inverse, max_degree) != ident[k]:
                raise ValueError(f"inverse check failed: (f o f^-1)_{k + 1} != id")
            if self.inverse[k].compose(self.components, max_degree) != ident[k]:
                raise ValueError(f"inverse check failed: (f^-1 o f)_{k + 1} != id")

    @classmethod
    def identity(cls, dim: int) -> "PolyMap":
        ident = [Polynomial.variable(dim, k) for k in range(dim)]
        return cls(ident, ident, check=False)

    @classmethod
    def from_linear(
        cls,
        matrix: Sequence[Sequence[Rational]],
        offset: Sequence[Rational] | None = None,
    ) -> "PolyMap":
        """The affine map y -> A (y - offset); inverse y -> A^{-1} y + offset."""
        from . import ratlinalg

        A = [[_as_fraction(v) for v in row] for row in matrix]
        dim = len(A)
        off = [_as_fraction(v) for v in (offset or [0] * dim)]
        Ainv = ratlinalg.invert(A)
        comps = []
        invs = []
        for k in range(dim):
            acc = Polynomial.zero(dim)
            accinv = Polynomial.const(dim, off[k])
            for j in range(dim):
                if A[k][j] != 0:
                    acc = acc + Polynomial.variable(dim, j) * A[k][j]
                    acc = acc - Polynomial.const(dim, A[k][j] * off[j])
                if Ainv[k][j] != 0:
                    accinv = accinv + Polynomial.variable(dim, j) * Ainv[k][j]
            comps.append(acc)
            invs.append(accinv)
        return cls(comps, invs, check=False)

    def has_inverse(self) -> bool:
        return self.inverse is not None

    def evaluate(self, point: Sequence[Rational]) -> tuple[Fraction, ...]:
        return tuple(c.evaluate(point) for c in self.components)

    def evaluate_float(self, point: Sequence[float]) -> tuple[float, ...]:
        return tuple(c.evaluate_float(point) for c in self.components)

    def evaluate_inverse(self, point: Sequence[Rational]) -> tuple[Fraction, ...]:
        if self.inverse is None:
            raise MissingInverseError("map has no stored inverse")
        return tuple(c.evaluate(point) for c in self.inverse)

    def jacobian(self) -> tuple[tuple[Polynomial, ...], ...]:
        return tuple(
            tuple(comp.diff(b) for b in range(self.dim)) for comp in self.components
        )

    def jacobian_at(self, point: Sequence[Rational]) -> list[list[Fraction]]:
        J = self.jacobian()
        return [[entry.evaluate(point) for entry in row] for row in J]

    def compose(self, other: "PolyMap", max_degree: int = DEFAULT_MAX_DEGREE) -> "PolyMap":
        """self o other, with inverse (other^-1 o self^-1) when both exist."""
        if self.dim != other.dim:
            raise DimensionMismatchError("composition dimension mismatch")
        comps = [c.compose(other.components, max_degree) for c in self.components]
        inv = None
        if self.inverse is not None and other.inverse is not None:
            inv = [c.compose(self.inverse, max_degree) for c in other.inverse]
        return PolyMap(comps, inv, check=False)

    def to_strings(self, prefix: str = "x") -> tuple[str, ...]:
        return tuple(c.to_string(prefix) for c in self.components)

    def __repr__(self) -> str:
        return f"PolyMap([{', '.join(self.to_strings())}])"


def pushforward(
    phi: PolyMap, X: PolyVectorField, max_degree: int = DEFAULT_MAX_DEGREE
) -> PolyVectorField:
    """The pushforward phi_* X = (Jphi X) o phi^{-1}, exact.

    Requires phi to carry a polynomial inverse.
    """
    if phi.inverse is None:
        raise MissingInverseError("pushforward needs a map with a polynomial inverse")
    if phi.dim != X.dim:
        raise DimensionMismatchError(f"dimension mismatch: {phi.dim} vs {X.dim}")
    JX = _matvec(phi.jacobian(), X)
    inv = list(phi.inverse)
    return PolyVectorField([c.compose(inv, max_degree) for c in JX.components])


# ---------------------------------------------------------------------
# graded weights
# ---------------------------------------------------------------------


def monomial_weight(exps: Exponents, weights: Sequence[int]) -> int:
    """Weight of the monomial y^exps under the coordinate weights."""
    return sum(e * w for e, w in zip(exps, weights))


def graded_weight(X: PolyVectorField, weights: Sequence[int]) -> int | float:
    """Weight of a polynomial vector field: the minimum over its monomial
    terms y^a d/dy^k of w_k - <a, w>.  The zero field reports -inf."""
    if len(weights) != X.dim:
        raise DimensionMismatchError(
            f"{len(weights)} weights for dimension {X.dim}"
        )
    best: int | None = None
    for k, comp in enumerate(X.components):
        for exps in comp.terms:
            w = weights[k] - monomial_weight(exps, weights)
            if best is None or w < best:
                best = w
    return -math.inf if best is None else best


def graded_truncate(
    X: PolyVectorField, n: int, weights: Sequence[int]
) -> PolyVectorField:
    """Keep exactly the monomial terms of weight >= n."""
    if len(weights) != X.dim:
        raise DimensionMismatchError(
            f"{len(weights)} weights for dimension {X.dim}"
        )
    comps = []
    for k, comp in enumerate(X.components):
        kept = {
            exps: coeff
            for exps, coeff in comp.terms.items()
            if weights[k] - monomial_weight(exps, weights) >= n
        }
        comps.append(Polynomial(X.dim, kept))
    return PolyVectorField(comps)
