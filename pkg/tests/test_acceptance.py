"""End-to-end acceptance checks.

Each test pins one headline quantitative result at its published tolerance;
property tests cover structural guarantees (complete positivity, algebra
homomorphisms, Gramian residuals, truncation error bounds).
"""

import math

import numpy as np
import pytest

from qecdyn import baltrunc as bt
from qecdyn.channels import is_completely_positive
from qecdyn.codes import BUILTIN_NAMES, builtin, decoding_ops, encoding_ops
from qecdyn.concat import apply_to_series, compose, diagonal_polynomials, diagonal_polynomials_stabilizer
from qecdyn.expseries import ExpSeries
from qecdyn.statespace import Realization, from_series
from qecdyn.thresholds import fixed_points, storage_thresholds, threshold_map

from conftest import rng  # noqa: F401
from test_channels import random_cp_diagonal
from test_statespace import random_stable

F = __import__("fractions").Fraction


def exact_series(levels: int):
    pmap = threshold_map("shor")
    out = [(ExpSeries.exponential(),) * 3]
    for _ in range(levels):
        out.append(apply_to_series(pmap, out[-1]))
    return out


class TestThresholdTable:
    """Storage thresholds and p_th for the four protecting codes, +-5e-4."""

    @pytest.mark.parametrize("name,t_stars,p_th", [
        ("shor", {"x": 0.1050, "z": 0.3151}, 0.0748),
        ("shor_prime", {"x": 0.1618, "z": 0.2150}, 0.1121),
        ("steane", {"x": 0.1383}, 0.0969),
        ("five_bit", {"x": 0.2027}, 0.1376),
    ])
    def test_threshold_row(self, name, t_stars, p_th):
        rep = storage_thresholds(threshold_map(name))
        for comp, expected in t_stars.items():
            assert rep.t_star[comp] == pytest.approx(expected, abs=5e-4)
        assert rep.p_th == pytest.approx(p_th, abs=5e-4)


class TestFixedPoints:
    def test_z_star(self):
        star = fixed_points(threshold_map("shor").pz, "z").unstable_interior
        assert star == pytest.approx(0.730, abs=1e-3)

    def test_x_star(self):
        star = fixed_points(threshold_map("shor").px, "x").unstable_interior
        assert star == pytest.approx(0.900, abs=1e-3)


class TestExactSeriesTable:
    EXPECTED_COUNTS = [(1, 1, 1), (2, 3, 4), (13, 33, 37), (118, 339, 352), (1081, 3201, 3241)]

    def test_term_counts_and_normalization(self):
        levels = exact_series(4)
        for lvl, triple in enumerate(levels):
            assert tuple(s.term_count() for s in triple) == self.EXPECTED_COUNTS[lvl]
            for s in triple:
                assert s.sum_b() == 1

    def test_level3_z_large_coefficient_census(self):
        z3 = exact_series(3)[3][2]
        assert z3.coefficient_census(1e60) == 65


class TestHankelSingularValues:
    def test_top_five_of_exact_level2_z(self):
        z2 = exact_series(2)[2][2]
        r = from_series(z2)
        assert r.order == 37
        hsv = bt.balance(r).hsv
        expected = (2.5e-1, 3.7e-2, 5.3e-3, 6.0e-4, 5.4e-5)
        for got, want in zip(hsv[:5], expected):
            assert got == pytest.approx(want, rel=0.05)


@pytest.fixture(scope="module")
def report():
    stages = [threshold_map("bitflip"), threshold_map("phaseflip")]
    return bt.iterative_reduce(
        stages, levels=4, h_min=4e-5, oracle=threshold_map("shor"),
        tau_grid=np.linspace(0.0, 1.5, 300),
    )


class TestIterativeReduction:
    EXPECTED_ORDERS = [(2, 2, 3), (4, 4, 5), (5, 5, 6), (7, 7, 9)]

    def test_orders_within_one(self, report):
        for rec, expected in zip(report.levels, self.EXPECTED_ORDERS):
            got = tuple(rec.orders[c] for c in "xyz")
            for g, e in zip(got, expected):
                assert abs(g - e) <= 1

    def test_pointwise_error_on_grid(self, report):
        """Max |deviation| <= 1e-2 on a 300-point grid over [0, 1.5], every
        component, every level through 4."""
        for rec in report.levels:
            for c in "xyz":
                assert rec.max_deviation[c] <= 1e-2


class TestOperatorCrossChecks:
    def test_three_qubit_encoders_exact(self):
        enc = encoding_ops(builtin("bitflip"))
        e = F(1, 8)
        assert dict(enc["I"].items()) == {"III": e, "IZZ": e, "ZIZ": e, "ZZI": e}
        assert dict(enc["X"].items()) == {"XXX": e, "XYY": -e, "YXY": -e, "YYX": -e}
        assert dict(enc["Y"].items()) == {"XXY": e, "XYX": e, "YXX": e, "YYY": -e}
        assert dict(enc["Z"].items()) == {"IIZ": e, "IZI": e, "ZII": e, "ZZZ": e}

    def test_three_qubit_decoders_exact(self):
        dec = decoding_ops(builtin("bitflip"))
        h = F(1, 2)
        assert dict(dec["I"].items()) == {"III": F(1)}
        assert dict(dec["X"].items()) == {"XXX": F(1)}
        assert dict(dec["Y"].items()) == {"XXY": h, "XYX": h, "YXX": h, "YYY": h}
        assert dict(dec["Z"].items()) == {"IIZ": h, "IZI": h, "ZII": h, "ZZZ": -h}

    def test_three_qubit_map_closed_form(self):
        pmap = diagonal_polynomials(builtin("bitflip"))
        assert pmap.px.coeffs == {(3, 0, 0): F(1)}
        assert pmap.py.coeffs == {(2, 1, 0): F(3, 2), (0, 3, 0): F(-1, 2)}
        assert pmap.pz.coeffs == {(0, 0, 1): F(3, 2), (0, 0, 3): F(-1, 2)}

    def test_nine_qubit_map_is_stage_composition(self):
        direct = diagonal_polynomials(builtin("shor"))
        composed = compose(
            diagonal_polynomials(builtin("phaseflip")),
            diagonal_polynomials(builtin("bitflip")),
        )
        for a, b in zip(direct.components(), composed.components()):
            assert a.coeffs == b.coeffs

    def test_contraction_route_equals_stabilizer_route(self, rng):
        for name in BUILTIN_NAMES:
            via_tables = diagonal_polynomials(builtin(name))
            via_group = diagonal_polynomials_stabilizer(builtin(name))
            for _ in range(100 // len(BUILTIN_NAMES) + 1):
                v = random_cp_diagonal(rng).as_tuple()
                a = via_tables.apply_tuple(v)
                b = via_group.apply_tuple(v)
                assert np.max(np.abs(np.subtract(a, b))) <= 1e-12


class TestPropertySuites:
    def test_cp_preservation_all_builtins(self, rng):
        """Every builtin map sends CP diagonal channels to CP channels;
        1000 random samples spread over the builtins."""
        maps = [threshold_map(name) for name in BUILTIN_NAMES]
        per_map = 1000 // len(maps) + 1
        for pmap in maps:
            for _ in range(per_map):
                out = pmap.apply(random_cp_diagonal(rng))
                ok, eig = is_completely_positive(out.as_channel(), tol=1e-10)
                assert ok, (pmap.name, eig)

    def test_realization_algebra_homomorphism(self, rng):
        taus = np.linspace(0.0, 2.0, 21)
        for _ in range(10):
            f, g = random_stable(rng, 3), random_stable(rng, 4)
            fs, gs = f.evaluate_grid(taus), g.evaluate_grid(taus)
            assert np.max(np.abs((f + g).evaluate_grid(taus) - (fs + gs))) <= 1e-9
            assert np.max(np.abs((f * g).evaluate_grid(taus) - fs * gs)) <= 1e-9
            assert np.max(np.abs(f.scale(2.0).evaluate_grid(taus) - 2 * fs)) <= 1e-9

    def test_lyapunov_residuals(self, rng):
        z2 = exact_series(2)[2][2]
        systems = [from_series(z2)] + [random_stable(rng, n) for n in (4, 8)]
        for r in systems:
            rc, ro = bt.gramians(r).residuals(r)
            assert rc <= 1e-8 and ro <= 1e-8

    def test_truncation_error_frequency_bound(self, rng):
        omegas = np.linspace(0.0, 40.0, 301)
        for n, k in ((5, 2), (7, 3)):
            r = random_stable(rng, n)
            res = bt.balance(r)
            reduced, bound = bt.truncate(res, order=k)
            dev = np.abs(r.frequency_response(omegas) - reduced.frequency_response(omegas))
            assert np.max(dev) <= bound + 1e-9

    def test_hsv_similarity_invariance(self, rng):
        r = random_stable(rng, 6)
        hsv = bt.balance(r).hsv
        T = rng.standard_normal((6, 6)) + 0.3 * np.eye(6)
        rt = Realization(np.linalg.solve(T, r.A @ T), np.linalg.solve(T, r.B), r.C @ T)
        hsv_t = bt.balance(rt).hsv
        mask = hsv > hsv[0] * 1e-10
        np.testing.assert_allclose(hsv_t[mask], hsv[mask], rtol=1e-8)
