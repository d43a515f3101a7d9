"""Acceptance suite.

Each test realizes one exit criterion at its stated tolerance (always exact
equality) and its stated runtime budget, and prints one pass/fail line.
Run with `pytest tests/test_acceptance.py -v -s` to see the lines.
"""

import random
import time
from fractions import Fraction
from math import comb

from tautsys.exact import SparsePoly
from tautsys.membership import (Member, MembershipCertificate, NonMember,
                                SectionPoint, derivative_query,
                                filtration_generators, membership_test,
                                verify_certificate)
from tautsys.model import (build_projective_model, fermat_point,
                           lattice_relations, multiplication_surjectivity)
from tautsys.periods import (closed_form_series_p1,
                             derivative_generating_series,
                             derivative_vector_solution,
                             fermat_derivative_check_p1, period_series,
                             verify_annihilation)
from tautsys.systems import (build_scalar_system, build_tautological_system,
                             build_vector_system, fourier_matches_dual,
                             scalarize, symmetry_matrix, vectorize,
                             verify_vector_system)
from tautsys.weyl import WeylOperator, compose, d_a, euler_a


class criterion:
    """Context manager asserting the runtime budget and printing a verdict."""

    def __init__(self, number: int, title: str, budget_seconds: float):
        self.number = number
        self.title = title
        self.budget = budget_seconds

    def __enter__(self):
        self.started = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.started
        status = "PASS" if exc_type is None else "FAIL"
        print(f"criterion {self.number} ({self.title}): {status} "
              f"[{elapsed:.2f}s / budget {self.budget:.0f}s]")
        if exc_type is None:
            assert elapsed < self.budget, (
                f"criterion {self.number} exceeded its runtime budget: "
                f"{elapsed:.2f}s >= {self.budget}s")
        return False


def test_criterion_1_line_series_equals_closed_form():
    # Coefficients (2k)!/(k!k!) for k = 0..20; expansion order 40 holds
    # exactly the first 21 layers of the expansion.
    with criterion(1, "line period series vs closed form", 1.0):
        spec = build_projective_model(1, ordering="interior-first")
        series = period_series(spec, 40)
        closed = closed_form_series_p1(20)
        assert series == closed
        zero_b = (0, 0, 0)
        for k in range(21):
            expected = Fraction(comb(2 * k, k))
            assert series.terms[((-1 - 2 * k, k, k), zero_b)] == expected


def test_criterion_2_tautological_annihilation():
    with criterion(2, "tautological annihilation d=1 and d=2", 30.0):
        spec1 = build_projective_model(1, ordering="interior-first")
        rels1 = lattice_relations(spec1, 2)
        report1 = verify_annihilation(
            build_tautological_system(spec1, rels1),
            period_series(spec1, 20))
        assert report1.all_zero
        assert report1.verified_order >= 18

        spec2 = build_projective_model(2, ordering="interior-first")
        rels2 = lattice_relations(spec2, 3)
        report2 = verify_annihilation(
            build_tautological_system(spec2, rels2),
            period_series(spec2, 11))
        assert report2.all_zero
        assert report2.verified_order >= 8


def test_criterion_3_line_differential_relation():
    with criterion(3, "line Fermat membership and derivative zero", 1.0):
        spec = build_projective_model(1, ordering="interior-first")
        point = SectionPoint.of(fermat_point(spec))
        query = derivative_query(spec, (1, 0, 0))
        result = membership_test(spec, point, query)
        assert isinstance(result, Member)
        assert verify_certificate(spec, point, query, result.certificate)
        report = fermat_derivative_check_p1()
        assert report.probes[0].variable == 0
        assert report.probes[0].prefactor_value == 0
        assert report.probes[0].vanishes


def test_criterion_4_plane_differential_relation():
    with criterion(4, "plane Fermat membership", 5.0):
        spec = build_projective_model(2, ordering="interior-first")
        point = SectionPoint.of(fermat_point(spec))
        query = derivative_query(spec, (2,) + (0,) * 9)
        result = membership_test(spec, point, query)
        assert isinstance(result, Member)
        worked = MembershipCertificate(q=(
            SparsePoly("x", 3, {(0, 2, 2): Fraction(1, 3)}),
            SparsePoly.zero("x", 3),
            SparsePoly.zero("x", 3)))
        assert verify_certificate(spec, point, query, worked)


def test_criterion_5_non_membership_control():
    with criterion(5, "non-membership control", 1.0):
        spec = build_projective_model(1, ordering="interior-first")
        point = SectionPoint.of(fermat_point(spec))
        result = membership_test(spec, point,
                                 derivative_query(spec, (0, 1, 0)))
        assert isinstance(result, NonMember)
        report = fermat_derivative_check_p1()
        assert report.probes[1].variable == 1
        assert report.probes[1].prefactor_value != 0
        assert not report.probes[1].vanishes


def test_criterion_6_equivalence_suite():
    with criterion(6, "scalar/vector equivalence, 50 roundtrips", 30.0):
        spec = build_projective_model(1, ordering="interior-first")
        rels = lattice_relations(spec, 2)
        n = spec.n
        vector_system = build_vector_system(spec, rels, 1)
        scalar_system = build_scalar_system(spec, rels, 1)
        rng = random.Random(20260809)
        for _ in range(50):
            order = rng.randint(4, 8)
            scale = Fraction(rng.randint(1, 12), rng.randint(1, 12))
            if rng.random() < 0.5:
                scale = -scale
            base = period_series(spec, order).scale(scale)
            solution = derivative_vector_solution(base, 1)
            before = verify_vector_system(vector_system, solution)
            assert all(r.is_zero() for r in before.values())
            phi = scalarize(solution)
            scalar_report = verify_annihilation(scalar_system, phi)
            assert scalar_report.all_zero
            back = vectorize(phi, 1)
            for key, series in solution.components.items():
                assert back.components[key] == series
            after = verify_vector_system(vector_system, back)
            assert all(r.is_zero() for r in after.values())
            assert {k: v.terms for k, v in before.items()} == {
                k: v.terms for k, v in after.items()}

        # the vector rows are exactly the normal-ordered commutators of the
        # base operators with each first derivative
        base_system = build_tautological_system(spec, rels)
        for label, op in base_system.labelled():
            for k in range(n):
                left = compose(d_a(n, k), op)
                if label.startswith("toric"):
                    assert left == compose(op, d_a(n, k))
                elif label.startswith("symmetry"):
                    x = symmetry_matrix(spec, int(label[9]), int(label[11]))
                    correction = WeylOperator.zero(n)
                    for j in range(n):
                        if x[k][j]:
                            correction = correction + x[k][j] * d_a(n, j)
                    assert left == compose(op, d_a(n, k)) + correction
                else:
                    assert left == compose(euler_a(n) + 2, d_a(n, k))


def test_criterion_7_fourier_golden():
    with criterion(7, "fourier golden forms", 1.0):
        for d in (1, 2):
            spec = build_projective_model(d, ordering="interior-first")
            rels = lattice_relations(spec, 3)
            ok, lines = fourier_matches_dual(spec, rels)
            assert ok, [line for line in lines if "MISMATCH" in line]


def test_criterion_8_general_order_builder():
    with criterion(8, "general-p builder and annihilation", 60.0):
        spec = build_projective_model(1, ordering="interior-first")
        rels = lattice_relations(spec, 2)
        n = spec.n

        from handcoded import (canonical_multiset,
                               hand_coded_first_derivative_system,
                               hand_coded_second_derivative_system)

        assert canonical_multiset(
            build_scalar_system(spec, rels, 1).operators
        ) == canonical_multiset(hand_coded_first_derivative_system(spec, rels))
        assert canonical_multiset(
            build_scalar_system(spec, rels, 2).operators
        ) == canonical_multiset(hand_coded_second_derivative_system(spec, rels))

        for p in (1, 2, 3):
            base = period_series(spec, 12 + p)
            phi = derivative_generating_series(base, p, 12)
            report = verify_annihilation(build_scalar_system(spec, rels, p),
                                         phi)
            assert report.all_zero
            assert report.verified_order >= 10


def test_criterion_9_span_checks():
    with criterion(9, "multiplication and filtration spans", 60.0):
        for d in (1, 2, 3):
            spec = build_projective_model(d)
            for k in range(5):
                for l in range(5 - k):
                    report = multiplication_surjectivity(spec, k, l)
                    assert report.surjective, (d, k, l, report)
        for d in (1, 2):
            spec = build_projective_model(d)
            for p in (1, 2, 3, 4):
                report = filtration_generators(spec, p)
                assert report.surjective, (d, p, report)
