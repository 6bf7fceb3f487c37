import itertools
from fractions import Fraction

import numpy as np
import pytest

from qecdyn.codes import (
    BUILTIN_NAMES,
    StabilizerCode,
    builtin,
    codespace_projector,
    decoding_ops,
    encoding_ops,
    recovery_table,
)
from qecdyn.pauli import PauliOperator

from conftest import dense_operator, dense_sum


class TestBuiltins:
    def test_all_builtins_construct(self):
        assert len(BUILTIN_NAMES) == 7
        for name in BUILTIN_NAMES:
            code = builtin(name)
            assert code.name == name
            assert len(code.generators) == code.n - 1

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            builtin("nope")

    def test_logicals_anticommute(self):
        for name in BUILTIN_NAMES:
            code = builtin(name)
            assert not code.logical_x.commutes_with(code.logical_z)

    def test_group_order(self):
        code = builtin("shor")
        assert code.group_order == 256
        assert len(code.group_elements()) == 256

    def test_text_round_trip(self):
        for name in BUILTIN_NAMES:
            code = builtin(name)
            back = StabilizerCode.from_text(code.to_text(), name=name)
            assert back.generators == code.generators
            assert back.logical_x == code.logical_x
            assert back.logical_z == code.logical_z


class TestValidation:
    def test_noncommuting_generators_rejected(self):
        with pytest.raises(ValueError):
            StabilizerCode(
                2,
                (PauliOperator.from_string("XI"),),
                PauliOperator.from_string("ZI"),
                PauliOperator.from_string("XI"),
            )

    def test_dependent_generators_rejected(self):
        with pytest.raises(ValueError):
            StabilizerCode(
                4,
                tuple(PauliOperator.from_string(s + "I") for s in ("ZZI", "IZZ", "ZIZ")),
                PauliOperator.from_string("XXXX"),
                PauliOperator.from_string("ZZZZ"),
            )

    def test_commuting_logicals_rejected(self):
        with pytest.raises(ValueError):
            StabilizerCode(
                3,
                tuple(PauliOperator.from_string(s) for s in ("ZZI", "IZZ")),
                PauliOperator.from_string("ZZZ"),
                PauliOperator.from_string("ZII"),
            )


class TestProjectorAndOperators:
    @pytest.mark.parametrize("name", ["trivial", "bitflip", "phaseflip", "five_bit"])
    def test_projector_is_rank2_projector(self, name):
        code = builtin(name)
        P = dense_sum(codespace_projector(code))
        np.testing.assert_allclose(P @ P, P, atol=1e-12)
        np.testing.assert_allclose(np.trace(P).real, 2.0, atol=1e-12)
        for g in code.generators:
            np.testing.assert_allclose(dense_operator(g) @ P, P, atol=1e-12)

    @pytest.mark.parametrize("name", ["trivial", "bitflip", "phaseflip"])
    def test_encoding_ops_are_projected_logicals(self, name):
        code = builtin(name)
        P = dense_sum(codespace_projector(code))
        enc = encoding_ops(code)
        for s in "IXYZ":
            bar = dense_operator(code.logical(s))
            np.testing.assert_allclose(dense_sum(enc[s]), 0.5 * P @ bar, atol=1e-12)

    @pytest.mark.parametrize("name", ["bitflip", "phaseflip", "five_bit"])
    def test_pairing_identity(self, name):
        """tr(D_sigma E_sigma') = delta_{sigma sigma'} singles out components."""
        code = builtin(name)
        enc, dec = encoding_ops(code), decoding_ops(code)
        for s in "IXYZ":
            for t in "IXYZ":
                val = np.trace(dense_sum(dec[s]) @ dense_sum(enc[t])).real
                assert val == pytest.approx(1.0 if s == t else 0.0, abs=1e-12)


class TestRecovery:
    @pytest.mark.parametrize("name", ["bitflip", "phaseflip", "steane", "five_bit"])
    def test_recovery_is_minimal_weight(self, name):
        """Without a code-supplied table, each entry has least weight in its
        syndrome class."""
        code = builtin(name)
        table = recovery_table(code)
        assert len(table) == 2 ** (code.n - 1)
        best: dict[tuple[int, ...], int] = {}
        for letters in itertools.product("IXYZ", repeat=code.n):
            p = PauliOperator.from_string("".join(letters))
            s = code.syndrome(p)
            best[s] = min(best.get(s, p.n + 1), p.weight())
        for syndrome, op in table.items():
            assert code.syndrome(op) == syndrome
            assert op.weight() == best[syndrome]

    def test_shor_two_stage_recovery_consistent(self):
        code = builtin("shor")
        table = recovery_table(code)
        assert len(table) == 256
        for syndrome, op in table.items():
            assert code.syndrome(op) == syndrome

    def test_shor_prime_shares_shor_recovery(self):
        shor, prime = builtin("shor"), builtin("shor_prime")
        ts, tp = recovery_table(shor), recovery_table(prime)
        assert all(ts[s] == tp[s] for s, _ in ts.items())
