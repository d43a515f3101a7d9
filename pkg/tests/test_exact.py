"""Exact arithmetic layer: polynomials and the fraction-free solver."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tautsys.exact import (FamilyError, Inconsistent, LinearSystem, PoleError,
                           Solution, SparsePoly, replay_witness, solve_exact)


def x_poly(terms):
    return SparsePoly("x", 2, terms)


def test_monomial_product():
    p = x_poly({(2, 0): 1})
    q = x_poly({(0, 2): 1})
    assert p * q == x_poly({(2, 2): 1})


def test_additive_identity():
    p = x_poly({(2, 0): 3, (1, 1): Fraction(-1, 2)})
    assert p + SparsePoly.zero("x", 2) == p


def test_square_expansion():
    # (x0^2 + x1^2)^2 = x0^4 + 2 x0^2 x1^2 + x1^4, expanded by hand
    p = x_poly({(2, 0): 1, (0, 2): 1})
    assert p * p == x_poly({(4, 0): 1, (2, 2): 2, (0, 4): 1})
    assert p ** 2 == p * p


def test_family_mismatch_rejected():
    p = SparsePoly("x", 2, {(1, 0): 1})
    q = SparsePoly("b", 2, {(1, 0): 1})
    with pytest.raises(FamilyError):
        p + q
    with pytest.raises(FamilyError):
        p * q


def test_negative_exponent_only_in_a_family():
    SparsePoly("a", 2, {(-1, 0): 1})
    with pytest.raises(FamilyError):
        SparsePoly("x", 2, {(-1, 0): 1})
    with pytest.raises(FamilyError):
        SparsePoly("b", 2, {(-1, 0): 1})


def test_partial_derivative_basics():
    p = x_poly({(2, 0): 1})
    assert p.partial_derivative(0) == x_poly({(1, 0): 2})
    assert x_poly({(0, 1): 1}).partial_derivative(0).is_zero()


def test_partial_derivative_laurent_power_rule():
    inv = SparsePoly("a", 1, {(-1,): 1})
    assert inv.partial_derivative(0) == SparsePoly("a", 1, {(-2,): -1})


def test_evaluate_basics():
    p = x_poly({(2, 0): 1, (0, 2): 1})
    assert p.evaluate((1, 1)) == 2


def test_evaluate_fermat_discriminant_value():
    # a0^2 - 4 a1 a2 at the Fermat point (0, 1, 1)
    g = (SparsePoly.monomial("a", 3, (2, 0, 0))
         - 4 * SparsePoly.monomial("a", 3, (0, 1, 1)))
    assert g.evaluate((0, 1, 1)) == -4


def test_evaluate_pole():
    inv = SparsePoly("a", 2, {(-1, 0): 1})
    with pytest.raises(PoleError):
        inv.evaluate((0, 1))
    assert inv.evaluate((2, 0)) == Fraction(1, 2)


small_rats = st.fractions(min_value=-4, max_value=4, max_denominator=6)


@st.composite
def polys(draw, family="a", arity=3):
    n_terms = draw(st.integers(0, 4))
    terms = {}
    low = -2 if family == "a" else 0
    for _ in range(n_terms):
        exp = tuple(draw(st.integers(low, 3)) for _ in range(arity))
        terms[exp] = draw(small_rats)
    return SparsePoly(family, arity, terms)


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert (p + q) * r == p * r + q * r


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), st.integers(0, 2))
def test_leibniz_rule(p, q, i):
    lhs = (p * q).partial_derivative(i)
    rhs = p.partial_derivative(i) * q + p * q.partial_derivative(i)
    assert lhs == rhs


# ---------------------------------------------------------------------------
# solve_exact
# ---------------------------------------------------------------------------


def test_solve_one_by_one():
    system = LinearSystem.build(["q"], [((2,), 1)])
    outcome = solve_exact(system)
    assert isinstance(outcome, Solution)
    assert outcome.values == (Fraction(1, 2),)
    assert outcome.nullspace == ()


def test_solve_empty_system():
    outcome = solve_exact(LinearSystem.build([], []))
    assert isinstance(outcome, Solution)
    assert outcome.values == ()


def test_solve_inconsistent_quadric_direction_system():
    # Certificate equations for the direction x0^2 at the Fermat section on
    # the projective line, with q restricted to its only contributing
    # graded piece: 2*alpha = 1, beta + gamma = 0, delta = 0, alpha + delta = 0.
    rows = [
        ((2, 0, 0, 0), 1),
        ((0, 1, 1, 0), 0),
        ((0, 0, 0, 1), 0),
        ((1, 0, 0, 1), 0),
    ]
    system = LinearSystem.build(["alpha", "beta", "gamma", "delta"], rows)
    outcome = solve_exact(system)
    assert isinstance(outcome, Inconsistent)
    coeffs, rhs = replay_witness(system, outcome)
    assert not any(coeffs)
    assert rhs != 0
    assert rhs == outcome.reduced_rhs


def test_solve_inconsistent_three_row_variant():
    # 2*alpha = 1, alpha + delta = 0, delta = 0 cannot hold together
    system = LinearSystem.build(
        ["alpha", "delta"],
        [((2, 0), 1), ((1, 1), 0), ((0, 1), 0)])
    outcome = solve_exact(system)
    assert isinstance(outcome, Inconsistent)
    coeffs, rhs = replay_witness(system, outcome)
    assert not any(coeffs) and rhs != 0


def test_solve_inconsistent_matches_independent_elimination():
    import sympy

    rows = [
        ((2, 0, 0, 0), 1),
        ((0, 1, 1, 0), 0),
        ((0, 0, 0, 1), 0),
        ((1, 0, 0, 1), 0),
    ]
    matrix = sympy.Matrix([list(r) for r, _ in rows])
    rhs = sympy.Matrix([b for _, b in rows])
    symbols = sympy.symbols("s0:4")
    assert sympy.linsolve((matrix, rhs), symbols) == sympy.EmptySet


def test_solve_underdetermined_returns_nullspace():
    # x + y = 1 has a line of solutions
    system = LinearSystem.build(["x", "y"], [((1, 1), 1)])
    outcome = solve_exact(system)
    assert isinstance(outcome, Solution)
    x, y = outcome.values
    assert x + y == 1
    assert len(outcome.nullspace) == 1
    vx, vy = outcome.nullspace[0]
    assert vx + vy == 0 and (vx, vy) != (0, 0)


@st.composite
def linear_systems(draw):
    ncols = draw(st.integers(1, 4))
    nrows = draw(st.integers(1, 5))
    rows = []
    for _ in range(nrows):
        coeffs = tuple(draw(small_rats) for _ in range(ncols))
        rows.append((coeffs, draw(small_rats)))
    return LinearSystem.build([f"c{i}" for i in range(ncols)], rows)


@settings(max_examples=80, deadline=None)
@given(linear_systems())
def test_solve_soundness(system):
    outcome = solve_exact(system)
    if isinstance(outcome, Solution):
        for coeffs, rhs in system.rows:
            assert sum((c * v for c, v in zip(coeffs, outcome.values)),
                       start=Fraction(0)) == rhs
        for vec in outcome.nullspace:
            for coeffs, _ in system.rows:
                assert sum((c * v for c, v in zip(coeffs, vec)),
                           start=Fraction(0)) == 0
    else:
        coeffs, rhs = replay_witness(system, outcome)
        assert not any(coeffs)
        assert rhs != 0
