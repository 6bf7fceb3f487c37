import math
from fractions import Fraction

import numpy as np
import pytest

from qecdyn.concat import diagonal_polynomials
from qecdyn.codes import builtin
from qecdyn.expseries import ExpSeries
from qecdyn.statespace import Realization, apply_polynomial, from_series

TAUS = np.linspace(0.0, 2.0, 17)


def random_stable(rng, n: int) -> Realization:
    """Random Hurwitz system with eigenvalues pushed into the left half-plane."""
    A = rng.standard_normal((n, n))
    A -= (np.max(np.linalg.eigvals(A).real) + 0.5) * np.eye(n)
    return Realization(A, rng.standard_normal(n), rng.standard_normal(n))


class TestRealizationBasics:
    def test_shape_validation(self):
        with pytest.raises(ValueError):
            Realization(np.eye(2), np.ones(3), np.ones(2))

    def test_from_series_matches_series(self):
        s = ExpSeries.from_terms([(1, Fraction(3, 2)), (3, Fraction(-1, 2))])
        r = from_series(s)
        assert r.order == 2
        assert r.is_diagonal() and r.is_stable()
        for t in TAUS:
            assert r.evaluate(t) == pytest.approx(s.evaluate_float(t), abs=1e-13)

    def test_negative_tau_rejected(self):
        r = from_series(ExpSeries.exponential())
        with pytest.raises(ValueError):
            r.evaluate(-0.1)

    def test_json_round_trip(self, rng):
        r = random_stable(rng, 4)
        back = Realization.from_json(r.to_json())
        np.testing.assert_allclose(back.A, r.A)
        np.testing.assert_allclose(back.B, r.B)
        np.testing.assert_allclose(back.C, r.C)


class TestAlgebraHomomorphism:
    """The sum/product/scale constructions realize the pointwise operations."""

    def test_sum(self, rng):
        f, g = random_stable(rng, 3), random_stable(rng, 4)
        h = f + g
        assert h.order == 7
        np.testing.assert_allclose(
            h.evaluate_grid(TAUS),
            f.evaluate_grid(TAUS) + g.evaluate_grid(TAUS),
            atol=1e-9,
        )

    def test_product(self, rng):
        f, g = random_stable(rng, 3), random_stable(rng, 4)
        h = f * g
        assert h.order == 12
        np.testing.assert_allclose(
            h.evaluate_grid(TAUS),
            f.evaluate_grid(TAUS) * g.evaluate_grid(TAUS),
            atol=1e-9,
        )

    def test_scale(self, rng):
        f = random_stable(rng, 3)
        np.testing.assert_allclose(
            f.scale(-2.5).evaluate_grid(TAUS), -2.5 * f.evaluate_grid(TAUS), atol=1e-10
        )

    def test_product_of_exponentials_adds_rates(self):
        e2 = from_series(ExpSeries.exponential(2))
        e3 = from_series(ExpSeries.exponential(3))
        p = e2 * e3
        for t in TAUS:
            assert p.evaluate(t) == pytest.approx(math.exp(-5 * t), abs=1e-13)


class TestPolynomialApplication:
    def test_matches_exact_series(self):
        from qecdyn.concat import apply_to_series

        pmap = diagonal_polynomials(builtin("bitflip"))
        base_r = tuple(from_series(ExpSeries.exponential()) for _ in range(3))
        base_s = (ExpSeries.exponential(),) * 3
        out_r = apply_polynomial(pmap, *base_r)
        out_s = apply_to_series(pmap, base_s)
        taus = np.linspace(0.0, 1.5, 11)
        for r, s in zip(out_r, out_s):
            np.testing.assert_allclose(
                r.evaluate_grid(taus), [s.evaluate(t) for t in taus], atol=1e-12
            )

    def test_constant_term_rejected(self):
        from qecdyn.concat import DiagonalPolynomialMap, Polynomial

        pmap = DiagonalPolynomialMap(
            Polynomial.constant(1),
            Polynomial.variable("y"),
            Polynomial.variable("z"),
        )
        base = tuple(from_series(ExpSeries.exponential()) for _ in range(3))
        with pytest.raises(ValueError):
            apply_polynomial(pmap, *base)


class TestFrequencyResponse:
    def test_single_pole(self):
        r = from_series(ExpSeries.exponential(2))  # 1/(i w + 2)
        omegas = np.array([0.0, 1.0, 5.0])
        expect = 1.0 / (1j * omegas + 2.0)
        np.testing.assert_allclose(r.frequency_response(omegas), expect, atol=1e-13)

    def test_invariant_under_similarity(self, rng):
        r = random_stable(rng, 4)
        T = rng.standard_normal((4, 4)) + 0.1 * np.eye(4)
        rt = Realization(np.linalg.solve(T, r.A @ T), np.linalg.solve(T, r.B), r.C @ T)
        omegas = np.linspace(0.0, 10.0, 9)
        np.testing.assert_allclose(
            rt.frequency_response(omegas), r.frequency_response(omegas), atol=1e-8
        )
