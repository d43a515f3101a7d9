"""Construction of the differential systems.

The base system attached to a model consists of one binomial (toric)
operator per lattice relation, one first-order symmetry operator per
gl(d+1) generator, and the grading operator "Euler + 1".  Its solutions
include the period integrals of the hypersurface family.

For the order-p derivative data the scalar system doubles the variables:
solutions are functions of (a, b), polynomial of degree p in b, built as

    phi(a, b) = sum over p-tuples K of  b_K * (d/da)^K phi(a).

For p = 1 and p = 2 an equivalent vector-valued form is provided as well,
with one component per derivative multi-index; the two presentations are
exchanged by `scalarize` and `vectorize`.

Symmetry convention.  A gl generator E_kl acts on sections through the
anticanonical bundle, i.e. as the coefficient-space dual of the derivation
action twisted by the volume character.  Concretely the first-order
operator is

    Z(E_kl) = sum_i (m_i)_k a_i D_{a_j(i)}  -  delta_kl * sum_i a_i D_{a_i}

where m_i runs over basis exponents with (m_i)_k >= 1 and j(i) labels the
monomial m_i - e_k + e_l.  With this convention (and only with it) the
operators annihilate the torus-cycle period series with no extra scalar.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial

from .exact import Rat
from .model import LatticeRelation, ModelSpec
from .series import LaurentSeries
from .weyl import (WeylOperator, coord_a, coord_b, d_a, d_b, euler_a,
                   euler_b, fourier)

_ZERO = Fraction(0)


class UnsupportedOrderError(ValueError):
    """Requested derivative order has no vector presentation."""


# ---------------------------------------------------------------------------
# Operator building blocks
# ---------------------------------------------------------------------------


def toric_operator(n: int, relation: LatticeRelation) -> WeylOperator:
    """Binomial operator D^(positive part) - D^(negative part)."""
    if len(relation.vector) != n:
        raise ValueError("relation length does not match n")
    zero = (0,) * n
    return (WeylOperator(n, {(zero, zero, relation.positive, zero): 1})
            - WeylOperator(n, {(zero, zero, relation.negative, zero): 1}))


def symmetry_matrix(spec: ModelSpec, k: int, l: int) -> tuple[tuple[Rat, ...], ...]:
    """Matrix of the symmetry action on the coefficient space.

    Entry (i, j) multiplies a_i D_{a_j} in the first-order operator; see the
    module docstring for the convention.
    """
    rows = [[_ZERO] * spec.n for _ in range(spec.n)]
    for i, exp in enumerate(spec.basis):
        weight = exp[k]
        if weight:
            shifted = list(exp)
            shifted[k] -= 1
            shifted[l] += 1
            j = spec.index_of(tuple(shifted))
            rows[i][j] += weight
    if k == l:
        for i in range(spec.n):
            rows[i][i] -= 1
    return tuple(tuple(row) for row in rows)


def _first_order_from_matrix(n: int, matrix, coord, deriv) -> WeylOperator:
    out = WeylOperator.zero(n)
    for i in range(n):
        for j in range(n):
            value = matrix[i][j]
            if value:
                out = out + value * (coord(n, i) * deriv(n, j))
    return out


def symmetry_operator(spec: ModelSpec, k: int, l: int,
                      couple_b: bool = False) -> WeylOperator:
    """First-order symmetry operator for E_kl, optionally mirrored on b."""
    matrix = symmetry_matrix(spec, k, l)
    op = _first_order_from_matrix(spec.n, matrix, coord_a, d_a)
    if couple_b:
        op = op + _first_order_from_matrix(spec.n, matrix, coord_b, d_b)
    return op


# ---------------------------------------------------------------------------
# Scalar systems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiffSystem:
    """Ordered, labelled operator list with its grading metadata."""

    kind: str           # "base" or "scalar"
    n: int
    p: int
    beta_e: Rat
    operators: tuple[WeylOperator, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.operators) != len(self.labels):
            raise ValueError("labels and operators differ in length")

    def labelled(self) -> list[tuple[str, WeylOperator]]:
        return list(zip(self.labels, self.operators))


def _dedup(pairs: list[tuple[str, WeylOperator]]):
    seen = set()
    labels, operators = [], []
    for label, op in pairs:
        key = (op.families, tuple(sorted(op.terms.items())))
        if key in seen:
            continue
        seen.add(key)
        labels.append(label)
        operators.append(op)
    return tuple(labels), tuple(operators)


def _generator_indices(d: int):
    return [(k, l) for k in range(d + 1) for l in range(d + 1)]


def build_tautological_system(spec: ModelSpec,
                              relations: list[LatticeRelation]) -> DiffSystem:
    """Base system: toric operators, symmetry operators, Euler + 1."""
    if not relations:
        raise ValueError("at least one lattice relation is required")
    n = spec.n
    pairs: list[tuple[str, WeylOperator]] = []
    for rel in relations:
        pairs.append((f"toric{list(rel.vector)}", toric_operator(n, rel)))
    for k, l in _generator_indices(spec.d):
        pairs.append((f"symmetry[{k},{l}]", symmetry_operator(spec, k, l)))
    pairs.append(("euler_a+1", euler_a(n) + 1))
    labels, operators = _dedup(pairs)
    return DiffSystem(kind="base", n=n, p=0, beta_e=Fraction(1),
                      operators=operators, labels=labels)


def build_scalar_system(spec: ModelSpec, relations: list[LatticeRelation],
                        p: int) -> DiffSystem:
    """Scalar system governing the order-p derivative generating function.

    Families emitted, in order: toric; b-coupled symmetry; the two grading
    operators (a-degree -(1+p), b-degree p); all (p+1)-fold b-derivative
    annihilators; the transpositions exchanging the single a-derivative
    slot with each b-derivative slot.
    """
    if p < 0:
        raise ValueError("p must be non-negative")
    if p == 0:
        return build_tautological_system(spec, relations)
    if not relations:
        raise ValueError("at least one lattice relation is required")
    n = spec.n
    pairs: list[tuple[str, WeylOperator]] = []
    for rel in relations:
        pairs.append((f"toric{list(rel.vector)}", toric_operator(n, rel)))
    for k, l in _generator_indices(spec.d):
        pairs.append((f"symmetry[{k},{l}]",
                      symmetry_operator(spec, k, l, couple_b=True)))
    pairs.append((f"euler_a+{1 + p}", euler_a(n) + (1 + p)))
    pairs.append((f"euler_b-{p}", euler_b(n) - p))
    for combo in combinations_with_replacement(range(n), p + 1):
        op = WeylOperator.const(n, 1)
        for i in combo:
            op = op * d_b(n, i)
        pairs.append((f"bder{list(combo)}", op))
    for u in range(n):
        for v in range(u + 1, n):
            for rest in combinations_with_replacement(range(n), p - 1):
                tail = WeylOperator.const(n, 1)
                for i in rest:
                    tail = tail * d_b(n, i)
                left = d_a(n, u) * d_b(n, v) * tail
                right = d_a(n, v) * d_b(n, u) * tail
                pairs.append(
                    (f"mixed[{u},{v}]{list(rest)}", left - right))
    labels, operators = _dedup(pairs)
    return DiffSystem(kind="scalar", n=n, p=p, beta_e=Fraction(1 + p),
                      operators=operators, labels=labels)


# ---------------------------------------------------------------------------
# Vector systems (p = 1, 2)
# ---------------------------------------------------------------------------


ComponentKey = int | tuple[int, int]


@dataclass(frozen=True)
class VectorEquation:
    """One row: sum over (component, operator) parts must vanish."""

    label: str
    parts: tuple[tuple[ComponentKey, WeylOperator], ...]


@dataclass(frozen=True)
class VectorSystem:
    n: int
    p: int
    keys: tuple[ComponentKey, ...]
    equations: tuple[VectorEquation, ...]


def build_vector_system(spec: ModelSpec, relations: list[LatticeRelation],
                        p: int) -> VectorSystem:
    """Vector presentation of the derivative system, one component per
    derivative multi-index.  Only p = 1 and p = 2 are written out; higher
    orders are served by the scalar systems.
    """
    if p not in (1, 2):
        raise UnsupportedOrderError(
            f"no vector presentation for p={p}; use build_scalar_system")
    if not relations:
        raise ValueError("at least one lattice relation is required")
    n = spec.n
    equations: list[VectorEquation] = []
    matrices = {
        (k, l): symmetry_matrix(spec, k, l)
        for k, l in _generator_indices(spec.d)}

    if p == 1:
        keys: tuple[ComponentKey, ...] = tuple(range(n))
        for rel in relations:
            toric = toric_operator(n, rel)
            for k in keys:
                equations.append(VectorEquation(
                    f"toric{list(rel.vector)}@{k}", ((k, toric),)))
        for (gk, gl), matrix in matrices.items():
            sym = symmetry_operator(spec, gk, gl)
            for k in keys:
                parts = [(k, sym)]
                for j in range(n):
                    if matrix[k][j]:
                        parts.append((j, WeylOperator.const(n, matrix[k][j])))
                equations.append(VectorEquation(
                    f"symmetry[{gk},{gl}]@{k}", tuple(parts)))
        grading = euler_a(n) + 2
        for k in keys:
            equations.append(VectorEquation(f"euler@{k}", ((k, grading),)))
        for i in range(n):
            for j in range(i + 1, n):
                equations.append(VectorEquation(
                    f"cross[{i},{j}]",
                    ((j, d_a(n, i)), (i, -1 * d_a(n, j)))))
        return VectorSystem(n=n, p=1, keys=keys, equations=tuple(equations))

    keys = tuple((l, k) for l in range(n) for k in range(n))
    for rel in relations:
        toric = toric_operator(n, rel)
        for key in keys:
            equations.append(VectorEquation(
                f"toric{list(rel.vector)}@{key}", ((key, toric),)))
    for (gk, gl), matrix in matrices.items():
        sym = symmetry_operator(spec, gk, gl)
        for (l, k) in keys:
            parts: list[tuple[ComponentKey, WeylOperator]] = [((l, k), sym)]
            for j in range(n):
                if matrix[l][j]:
                    parts.append(((j, k), WeylOperator.const(n, matrix[l][j])))
                if matrix[k][j]:
                    parts.append(((l, j), WeylOperator.const(n, matrix[k][j])))
            equations.append(VectorEquation(
                f"symmetry[{gk},{gl}]@{(l, k)}", tuple(parts)))
    grading = euler_a(n) + 3
    for key in keys:
        equations.append(VectorEquation(f"euler@{key}", ((key, grading),)))
    one = WeylOperator.const(n, 1)
    for l in range(n):
        for k in range(l + 1, n):
            equations.append(VectorEquation(
                f"transpose[{l},{k}]", (((l, k), one), ((k, l), -1 * one))))
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(n):
                equations.append(VectorEquation(
                    f"cross[{i},{j};{k}]",
                    (((j, k), d_a(n, i)), ((k, i), -1 * d_a(n, j)))))
    return VectorSystem(n=n, p=2, keys=keys, equations=tuple(equations))


@dataclass
class VectorSolution:
    """Component series sharing one truncation order."""

    n: int
    p: int
    components: dict[ComponentKey, LaurentSeries]

    def __post_init__(self):
        truncs = {s.truncation for s in self.components.values()}
        if len(truncs) > 1:
            raise ValueError(f"components disagree on truncation: {truncs}")

    @property
    def truncation(self) -> int | None:
        for series in self.components.values():
            return series.truncation
        return None


def vector_residual(equation: VectorEquation,
                    solution: VectorSolution) -> LaurentSeries:
    total: LaurentSeries | None = None
    for key, op in equation.parts:
        piece = op.apply(solution.components[key])
        total = piece if total is None else total + piece
    assert total is not None
    return total


def verify_vector_system(system: VectorSystem,
                         solution: VectorSolution) -> dict[str, LaurentSeries]:
    """Residual of every equation; empty residual series means annihilated."""
    return {eq.label: vector_residual(eq, solution)
            for eq in system.equations}


# ---------------------------------------------------------------------------
# Equivalence of the two presentations
# ---------------------------------------------------------------------------


def scalarize(solution: VectorSolution) -> LaurentSeries:
    """Contract the component tuple with b-monomials.

    p = 1 sends (phi_k) to sum b_k phi_k; p = 2 sends (phi_lk) to
    sum b_l b_k phi_lk.
    """
    n = solution.n
    total: LaurentSeries | None = None
    for key, series in solution.components.items():
        if solution.p == 1:
            exponent = [0] * n
            exponent[key] += 1
        else:
            l, k = key
            exponent = [0] * n
            exponent[l] += 1
            exponent[k] += 1
        piece = series.mul_b_monomial(exponent)
        total = piece if total is None else total + piece
    if total is None:
        raise ValueError("empty vector solution")
    return total


def vectorize(series: LaurentSeries, p: int) -> VectorSolution:
    """Split a scalar solution into derivative components.

    Requires the input to be homogeneous of degree p in b; the p-fold
    b-derivative picks up a factorial which is normalized away so that
    vectorize(scalarize(v)) == v on symmetric inputs.
    """
    if p not in (1, 2):
        raise UnsupportedOrderError(f"no vector presentation for p={p}")
    degree = series.b_degree()
    if degree is None:
        degree = p  # the zero series is vacuously homogeneous
    if degree != p:
        raise ValueError(
            f"series is b-homogeneous of degree {degree}, expected {p}")
    n = series.n
    scale = Fraction(1, factorial(p))
    components: dict[ComponentKey, LaurentSeries] = {}
    if p == 1:
        for k in range(n):
            exponent = [0] * n
            exponent[k] = 1
            components[k] = series.b_coefficient(exponent)
        return VectorSolution(n=n, p=1, components=components)
    for l in range(n):
        for k in range(n):
            derived = series
            for idx in (l, k):
                derived = _b_derivative(derived, idx)
            components[(l, k)] = derived.scale(scale)
    return VectorSolution(n=n, p=2, components=components)


def _b_derivative(series: LaurentSeries, index: int) -> LaurentSeries:
    out: dict = {}
    for (a_exp, b_exp), coeff in series.terms.items():
        e = b_exp[index]
        if e == 0:
            continue
        new_b = b_exp[:index] + (e - 1,) + b_exp[index + 1:]
        key = (a_exp, new_b)
        value = out.get(key, _ZERO) + coeff * e
        if value:
            out[key] = value
        elif key in out:
            del out[key]
    return LaurentSeries(series.n, series.i0, out, series.truncation)


# ---------------------------------------------------------------------------
# Fourier golden forms
# ---------------------------------------------------------------------------


def dual_generator_families(spec: ModelSpec,
                            relations: list[LatticeRelation]) -> list[tuple[str, WeylOperator, bool]]:
    """Hand-assembled dual forms of the p = 1 scalar system.

    Returns (label, operator over the dual families, exact) triples; `exact`
    marks generators whose Fourier image must match literally, the others
    match up to the unit -1 (an ideal has no preferred generator sign).
    """
    n = spec.n
    dual = ("zeta", "xi")
    zero = (0,) * n
    out: list[tuple[str, WeylOperator, bool]] = []
    for rel in relations:
        op = (WeylOperator(n, {(rel.positive, zero, zero, zero): 1}, dual)
              - WeylOperator(n, {(rel.negative, zero, zero, zero): 1}, dual))
        out.append((f"toric{list(rel.vector)}", op, rel.degree % 2 == 0))
    for k, l in _generator_indices(spec.d):
        matrix = symmetry_matrix(spec, k, l)
        op = WeylOperator.zero(n, dual)
        trace = _ZERO
        for i in range(n):
            trace += matrix[i][i]
            for j in range(n):
                value = matrix[j][i]
                if value:
                    key = (_unit_at(n, i), zero, _unit_at(n, j), zero)
                    op = op + WeylOperator(n, {key: value}, dual)
                    key = (zero, _unit_at(n, i), zero, _unit_at(n, j))
                    op = op + WeylOperator(n, {key: value}, dual)
        op = op + WeylOperator.const(n, 2 * trace, dual)
        out.append((f"symmetry[{k},{l}]", op, False))
    euler_zeta = WeylOperator.zero(n, dual)
    euler_xi = WeylOperator.zero(n, dual)
    for i in range(n):
        euler_zeta = euler_zeta + WeylOperator(
            n, {(_unit_at(n, i), zero, _unit_at(n, i), zero): -1}, dual)
        euler_xi = euler_xi + WeylOperator(
            n, {(zero, _unit_at(n, i), zero, _unit_at(n, i)): -1}, dual)
    out.append(("euler_a+2", euler_zeta + (-n + 2), True))
    out.append(("euler_b-1", euler_xi + (-n - 1), True))
    for i in range(n):
        for j in range(i + 1, n):
            key_ij = (_unit_at(n, i), _unit_at(n, j), zero, zero)
            key_ji = (_unit_at(n, j), _unit_at(n, i), zero, zero)
            op = (WeylOperator(n, {key_ij: 1}, dual)
                  - WeylOperator(n, {key_ji: 1}, dual))
            out.append((f"mixed[{i},{j}][]", op, True))
    for combo in combinations_with_replacement(range(n), 2):
        exponent = [0] * n
        for idx in combo:
            exponent[idx] += 1
        op = WeylOperator(n, {(zero, tuple(exponent), zero, zero): 1}, dual)
        out.append((f"bder{list(combo)}", op, True))
    return out


def fourier_matches_dual(spec: ModelSpec,
                         relations: list[LatticeRelation]) -> tuple[bool, list[str]]:
    """Compare the transform of the p = 1 system with the golden dual forms.

    Returns the overall verdict plus one line per generator family.
    """
    system = build_scalar_system(spec, relations, 1)
    by_label = dict(system.labelled())
    lines: list[str] = []
    all_ok = True
    for label, expected, exact in dual_generator_families(spec, relations):
        source = by_label.get(label)
        if source is None:
            lines.append(f"{label}: missing source operator")
            all_ok = False
            continue
        image = fourier(source)
        if exact:
            ok = image == expected
        else:
            ok = (image == expected
                  or image == (-1 * expected))
        lines.append(f"{label}: {'match' if ok else 'MISMATCH'}")
        all_ok = all_ok and ok
    return all_ok, lines


def _unit_at(n: int, index: int) -> tuple[int, ...]:
    return tuple(1 if i == index else 0 for i in range(n))
