"""Shared dense-matrix oracles: independent 2^n x 2^n realizations of Pauli
strings and operator sums, used to cross-check the symplectic fast paths."""

from __future__ import annotations

import numpy as np
import pytest

from qecdyn.pauli import OperatorSum, PauliOperator

SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense_string(letters: str) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for ch in letters:
        out = np.kron(out, SINGLE[ch])
    return out


def dense_operator(p: PauliOperator) -> np.ndarray:
    return (1j ** p.phase) * dense_string(p.letters())


def dense_sum(s: OperatorSum) -> np.ndarray:
    out = np.zeros((2**s.n, 2**s.n), dtype=complex)
    for key, c in s.items():
        out += float(c) * dense_string(key)
    return out


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260823)
