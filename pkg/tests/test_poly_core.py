import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cml.errors import NonConvergence
from cml.oracles import delta2, delta3, discriminant_from_roots
from cml.poly_core import (
    DEFAULT_TOL,
    Configuration,
    MonicPolynomial,
    TolerancePolicy,
    derivative,
    discriminant,
    evaluate,
    from_roots,
    is_square_free,
    resultant,
    roots,
    same_points,
    sylvester_matrix,
)

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)
unit = st.builds(lambda r, t: np.sqrt(r) * np.exp(2j * np.pi * t), st.floats(0, 1), st.floats(0, 1))


def poly(*coeffs):
    return MonicPolynomial(tuple(complex(c) for c in coeffs))


Z2M1 = poly(0, -1)
Z3P4Z = poly(0, 4, 0)


class TestTypes:
    def test_tolerance_validation(self):
        with pytest.raises(ValueError):
            TolerancePolicy(root_tol=1e-8, distinct_tol=1e-9)
        with pytest.raises(ValueError):
            TolerancePolicy(root_tol=-1.0)

    def test_tolerance_json_round_trip(self):
        t = TolerancePolicy(root_tol=1e-11, distinct_tol=1e-8, max_iterations=50)
        assert TolerancePolicy.from_json(json.loads(json.dumps(t.to_json()))) == t

    def test_polynomial_rejects_nan(self):
        with pytest.raises(ValueError):
            MonicPolynomial((complex("nan"),))

    def test_polynomial_json_round_trip(self):
        f = poly(1 + 2j, -3, 0.5j)
        assert MonicPolynomial.from_json(json.loads(json.dumps(f.to_json()))) == f

    def test_configuration_unordered_equality(self):
        a = Configuration((1, 2j, -3))
        b = Configuration((-3, 1, 2j))
        assert a == b and hash(a) == hash(b)
        assert Configuration((1, 2j), ordered=True) != Configuration((2j, 1), ordered=True)

    def test_configuration_separation_exact(self):
        c = Configuration((0, 3, 3 + 0.5j, 10))
        assert c.separation == pytest.approx(0.5)
        assert Configuration((7,)).separation == float("inf")

    def test_configuration_json_round_trip(self):
        c = Configuration((1 + 1j, -2, 0.25j), ordered=True)
        assert Configuration.from_json(json.loads(json.dumps(c.to_json()))) == c


class TestEvaluateAndDerivative:
    def test_evaluate_examples(self):
        assert evaluate(Z2M1, 0) == -1
        assert evaluate(Z2M1, 1) == 0
        assert abs(evaluate(Z3P4Z, 2j)) == 0

    def test_derivative_examples(self):
        np.testing.assert_array_equal(derivative(Z2M1), [2, 0])
        np.testing.assert_array_equal(derivative(Z3P4Z), [3, 0, 4])
        np.testing.assert_array_equal(derivative(poly(-5)), [1])


class TestRootsAndViete:
    def test_roots_examples(self):
        assert same_points(roots(Z2M1).points, [1, -1], 1e-12)
        assert same_points(roots(Z3P4Z).points, [0, 2j, -2j], 1e-12)

    def test_repeated_root_representable(self):
        r = roots(poly(0, 0))
        assert len(r) == 2 and r.separation == 0

    def test_viete_examples(self):
        assert from_roots([1, -1]).coeffs == (0, -1)
        np.testing.assert_allclose(from_roots([0, 2j, -2j]).coeffs, [0, 4, 0], atol=1e-15)
        assert from_roots([3 + 1j]).coeffs == (-(3 + 1j),)

    def test_nonconvergence_is_reported(self):
        with pytest.raises(NonConvergence):
            roots(poly(*np.exp(1j * np.arange(20))), TolerancePolicy(root_tol=1e-15, max_iterations=2))

    @settings(max_examples=200, deadline=None)
    @given(st.lists(cplx, min_size=1, max_size=12))
    def test_round_trip(self, pts):
        c = Configuration(tuple(pts))
        if c.separation <= 1e-3 * c.scale:
            return
        assert same_points(roots(from_roots(c)).points, c.points, 1e-9)

    @settings(max_examples=200, deadline=None)
    @given(st.lists(cplx, min_size=1, max_size=12), st.randoms(use_true_random=False))
    def test_from_roots_permutation_bit_identical(self, pts, rnd):
        shuffled = list(pts)
        rnd.shuffle(shuffled)
        assert from_roots(pts).coeffs == from_roots(shuffled).coeffs


def _assert_closed_form(got, want, term_size, rtol):
    # a determinant is accurate to eps times the coefficient scale, so next to
    # the relative error there is an absolute floor; it only matters on or near
    # the discriminant locus, where the cancelling terms dwarf the value
    assert abs(got - want) <= rtol * abs(want) + 1e-14 * max(term_size, 1.0)


class TestResultantDiscriminant:
    def test_sylvester_shape(self):
        assert sylvester_matrix(Z2M1, [1, 0]).shape == (3, 3)

    def test_resultant_examples(self):
        a, b = 2 + 1j, -0.5
        assert resultant([1, -a], [1, -b]) == pytest.approx(a - b)
        assert resultant(Z2M1, [1, 0]) == pytest.approx(-1)
        assert abs(resultant(Z2M1, Z2M1)) < 1e-14

    def test_discriminant_examples(self):
        assert discriminant(np.array([1, 0, -1])) == pytest.approx(4)
        assert discriminant(poly(0, -1, 0)) == pytest.approx(4)
        assert discriminant(poly(0, 0)) == 0
        assert discriminant(poly(0, 0, 0, -1)) == pytest.approx(-256)

    @settings(max_examples=300, deadline=None)
    @given(st.lists(unit, min_size=2, max_size=8))
    def test_discriminant_matches_root_product(self, coeffs):
        f = MonicPolynomial(tuple(complex(c) for c in coeffs))
        oracle = discriminant_from_roots(roots(f).points)
        d = discriminant(f)
        assert abs(d - oracle) <= 1e-8 * max(abs(oracle), 1e-12)

    @settings(max_examples=300, deadline=None)
    @given(unit, unit)
    def test_delta2_closed_form(self, b, c):
        want = delta2(b, c)
        _assert_closed_form(discriminant(np.array([1, b, c])), want, abs(b * b) + abs(4 * c), 1e-12)

    @settings(max_examples=300, deadline=None)
    @given(unit, unit, unit)
    def test_delta3_closed_form(self, b, c, d):
        want = delta3(b, c, d)
        terms = [b * b * c * c, 4 * c**3, 4 * b**3 * d, 27 * d * d, 18 * b * c * d]
        _assert_closed_form(discriminant(np.array([1, b, c, d])), want, sum(map(abs, terms)), 1e-10)


class TestSquareFree:
    def test_examples(self):
        check = is_square_free(Z2M1)
        assert check and check.margin == pytest.approx(4)
        assert not is_square_free(poly(0, 0))
        assert is_square_free(poly(0, -1, 0)).margin == pytest.approx(4)

    def test_near_collision_is_rejected(self):
        eps = 1e-12
        assert not is_square_free(from_roots([0, eps, 1]), DEFAULT_TOL)
        assert is_square_free(from_roots([0, 1e-3, 1]), DEFAULT_TOL)
