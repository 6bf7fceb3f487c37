"""Stabilizer codes, encoding/decoding operators and minimal-weight recovery.

All codes here encode a single logical qubit in n physical qubits, so a valid
code has n - 1 independent, mutually commuting generators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Iterator

from .pauli import LETTERS, OperatorSum, PauliOperator

__all__ = [
    "StabilizerCode",
    "RecoveryTable",
    "builtin",
    "BUILTIN_NAMES",
    "codespace_projector",
    "encoding_ops",
    "recovery_table",
    "decoding_ops",
]

SIGMAS = ("I", "X", "Y", "Z")


@dataclass(frozen=True)
class StabilizerCode:
    """A one-logical-qubit stabilizer code.

    The stabilizer group is the span of ``generators``; the logical Y is
    derived as i * logical_x * logical_z.
    """

    n: int
    generators: tuple[PauliOperator, ...]
    logical_x: PauliOperator
    logical_z: PauliOperator
    name: str = ""
    # Recovery table fixed by the code's correction scheme; when None the
    # minimal-weight table is derived on demand.
    fixed_recovery: "RecoveryTable | None" = None

    def __post_init__(self) -> None:
        for g in self.generators + (self.logical_x, self.logical_z):
            if g.n != self.n:
                raise ValueError("operator size does not match code size")
        for a, b in combinations(self.generators, 2):
            if not a.commutes_with(b):
                raise ValueError(f"generators {a} and {b} anticommute")
        for g in self.generators:
            if not g.commutes_with(self.logical_x) or not g.commutes_with(self.logical_z):
                raise ValueError(f"generator {g} does not commute with the logical operators")
        if self.logical_x.commutes_with(self.logical_z):
            raise ValueError("logical X and Z must anticommute")
        if len(self.generators) != self.n - 1:
            raise ValueError("a one-logical-qubit code needs n - 1 generators")
        if _gf2_rank([g.x + g.z for g in self.generators]) != len(self.generators):
            raise ValueError("generators are not independent")

    @property
    def num_generators(self) -> int:
        return len(self.generators)

    @property
    def group_order(self) -> int:
        return 1 << self.num_generators

    def logical(self, sigma: str) -> PauliOperator:
        """Logical operator for sigma in {I, X, Y, Z}."""
        if sigma == "I":
            return PauliOperator.identity(self.n)
        if sigma == "X":
            return self.logical_x
        if sigma == "Z":
            return self.logical_z
        if sigma == "Y":
            p = self.logical_x.multiply(self.logical_z)
            return PauliOperator(p.n, p.x, p.z, (p.phase + 1) % 4)  # i * X * Z
        raise ValueError(f"unknown sigma {sigma!r}")

    def group_elements(self) -> list[PauliOperator]:
        """All 2^(n-1) stabilizer group elements, products over generator subsets.

        Ordered by the generator-subset bitmask (bit i = generator i included).
        """
        elements = [PauliOperator.identity(self.n)]
        for g in self.generators:
            elements.extend(e.multiply(g) for e in list(elements))
        return elements

    def syndrome(self, p: PauliOperator) -> tuple[int, ...]:
        """Bit per generator, in generator order: 1 where p anticommutes."""
        return tuple(0 if g.commutes_with(p) else 1 for g in self.generators)

    def to_text(self) -> str:
        """Serialize as generator lines followed by logical_X and logical_Z lines."""
        lines = [g.letters() for g in self.generators]
        lines.append(self.logical_x.letters())
        lines.append(self.logical_z.letters())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, name: str = "") -> "StabilizerCode":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        if len(lines) < 2:
            raise ValueError("code file needs at least logical_X and logical_Z lines")
        ops = [PauliOperator.from_string(ln) for ln in lines]
        return cls(ops[0].n, tuple(ops[:-2]), ops[-2], ops[-1], name=name)


@dataclass(frozen=True)
class RecoveryTable:
    """Total map from syndrome to a minimal-weight recovery operator."""

    entries: dict[tuple[int, ...], PauliOperator] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, syndrome: tuple[int, ...]) -> PauliOperator:
        return self.entries[syndrome]

    def items(self) -> Iterator[tuple[tuple[int, ...], PauliOperator]]:
        return iter(sorted(self.entries.items()))


def _gf2_rank(rows: list[tuple[int, ...]]) -> int:
    mat = [list(r) for r in rows]
    rank = 0
    ncols = len(mat[0]) if mat else 0
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(mat)) if mat[r][col]), None)
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        for r in range(len(mat)):
            if r != rank and mat[r][col]:
                mat[r] = [a ^ b for a, b in zip(mat[r], mat[rank])]
        rank += 1
    return rank


def _code(name: str, gens: list[str], lx: str, lz: str) -> StabilizerCode:
    P = PauliOperator.from_string
    return StabilizerCode(P(lx).n, tuple(P(g) for g in gens), P(lx), P(lz), name=name)


def _builtin_codes() -> dict[str, StabilizerCode]:
    codes = {
        "trivial": _code("trivial", [], "X", "Z"),
        "bitflip": _code("bitflip", ["ZZI", "IZZ"], "XXX", "ZZZ"),
        "phaseflip": _code("phaseflip", ["XXI", "IXX"], "XXX", "ZZZ"),
        "steane": _code(
            "steane",
            ["XXXXIII", "XXIIXXI", "XIXIXIX", "ZZZZIII", "ZZIIZZI", "ZIZIZIZ"],
            "XXXXXXX",
            "ZZZZZZZ",
        ),
        "five_bit": _code(
            "five_bit",
            ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"],
            "XXXXX",
            "ZZZZZ",
        ),
    }
    shor_gens = [
        "ZZIIIIIII", "IZZIIIIII",
        "IIIZZIIII", "IIIIZZIII",
        "IIIIIIZZI", "IIIIIIIZZ",
        "XXXXXXIII", "IIIXXXXXX",
    ]
    # Shor = phaseflip(bitflip): each outer logical X becomes an inner XXX,
    # each outer logical Z an inner ZZZ.
    codes["shor"] = _code("shor", shor_gens, "X" * 9, "Z" * 9)
    # Shor' uses the same stabilizer but encodes the computational basis into
    # the (|000> +/- |111>)^x3 states, which swaps the roles of the logicals.
    codes["shor_prime"] = _code("shor_prime", shor_gens, "Z" * 9, "X" * 9)
    recovery = _shor_block_recovery(codes["shor"])
    for key in ("shor", "shor_prime"):
        c = codes[key]
        codes[key] = StabilizerCode(c.n, c.generators, c.logical_x, c.logical_z,
                                    name=c.name, fixed_recovery=recovery)
    return codes


def _shor_block_recovery(code: StabilizerCode) -> RecoveryTable:
    """Recovery of the two-stage block correction scheme on the 9-qubit code.

    Each 3-qubit block is first corrected as a bitflip code from its two ZZ
    syndromes, then the block-level phase error is corrected from the two
    6-qubit X syndromes.  Some entries sit in a different logical coset than
    the minimal-weight representative would, which is what distinguishes this
    scheme's effective channel.
    """
    inner = {(0, 0): None, (1, 0): 0, (1, 1): 1, (0, 1): 2}
    outer = {(0, 0): None, (1, 0): 0, (1, 1): 3, (0, 1): 6}
    entries: dict[tuple[int, ...], PauliOperator] = {}
    for bits in product((0, 1), repeat=8):
        op = PauliOperator.identity(code.n)
        for block in range(3):
            pos = inner[bits[2 * block: 2 * block + 2]]
            if pos is not None:
                chars = ["I"] * code.n
                chars[3 * block + pos] = "X"
                op = op.multiply(PauliOperator.from_string("".join(chars)))
        pos = outer[bits[6:8]]
        if pos is not None:
            chars = ["I"] * code.n
            chars[pos] = "Z"
            op = op.multiply(PauliOperator.from_string("".join(chars)))
        syndrome = code.syndrome(op)
        assert syndrome == bits
        entries[syndrome] = PauliOperator(op.n, op.x, op.z, 0)
    return RecoveryTable(entries)


_BUILTINS = _builtin_codes()
BUILTIN_NAMES = ("trivial", "bitflip", "phaseflip", "shor", "shor_prime", "steane", "five_bit")


def builtin(name: str) -> StabilizerCode:
    """Return a named builtin code.

    Known names: trivial, bitflip, phaseflip, shor, shor_prime, steane, five_bit.
    """
    try:
        return _BUILTINS[name]
    except KeyError:
        raise ValueError(f"unknown code {name!r}; known codes: {', '.join(BUILTIN_NAMES)}") from None


def codespace_projector(code: StabilizerCode) -> OperatorSum:
    """P_C = (1/|S|) sum of all stabilizer group elements."""
    inv = Fraction(1, code.group_order)
    return OperatorSum.accumulate(code.n, ((g, inv) for g in code.group_elements()))


def encoding_ops(code: StabilizerCode) -> dict[str, OperatorSum]:
    """The four encoding operators E_sigma = (1/2) P_C sigma_bar."""
    pc = codespace_projector(code)
    return {s: pc.mul_operator(code.logical(s)).scale(Fraction(1, 2)) for s in SIGMAS}


def _weight_ordered_paulis(n: int) -> Iterator[PauliOperator]:
    # Weight ascending, then Y-count ascending (a Y carries both an X and a Z
    # component, so recoveries treating X and Z errors independently come
    # first), then lexicographic with I < X < Y < Z, qubit 0 most significant.
    for w in range(n + 1):
        strings = []
        for positions in combinations(range(n), w):
            for letters in product("XYZ", repeat=w):
                chars = ["I"] * n
                for pos, c in zip(positions, letters):
                    chars[pos] = c
                strings.append("".join(chars))
        strings.sort(key=lambda s: (s.count("Y"), s))
        for s in strings:
            yield PauliOperator.from_string(s)


def recovery_table(code: StabilizerCode) -> RecoveryTable:
    """Minimal-weight recovery operator for every syndrome.

    Ties are broken by taking the first match in enumeration order: weight
    ascending, then Y-count ascending, then lexicographic (I < X < Y < Z).

    A code whose correction scheme pins down the table (``fixed_recovery``)
    returns that table instead.
    """
    if code.fixed_recovery is not None:
        return code.fixed_recovery
    needed = 1 << code.num_generators
    entries: dict[tuple[int, ...], PauliOperator] = {}
    for p in _weight_ordered_paulis(code.n):
        syn = code.syndrome(p)
        if syn not in entries:
            entries[syn] = p
            if len(entries) == needed:
                break
    if len(entries) != needed:
        raise ValueError("incomplete recovery table; generators may be dependent")
    return RecoveryTable(entries)


def decoding_coefficients(code: StabilizerCode, table: RecoveryTable) -> dict[str, list[int]]:
    """The integer coefficients f_{i,sigma} = sum_j eta(S_i, R_j) eta(R_j, sigma_bar).

    Lists are indexed like ``code.group_elements()``.
    """
    elements = code.group_elements()
    recov = [table[syn] for syn in sorted(table.entries)]
    out: dict[str, list[int]] = {}
    for s in SIGMAS:
        bar = code.logical(s)
        out[s] = [
            sum(g.eta(r) * r.eta(bar) for r in recov)
            for g in elements
        ]
    return out


def decoding_ops(code: StabilizerCode, table: RecoveryTable | None = None) -> dict[str, OperatorSum]:
    """The four decoding operators D_sigma = (1/|S|) sum_i f_{i,sigma} S_i sigma_bar."""
    if table is None:
        table = recovery_table(code)
    elements = code.group_elements()
    f = decoding_coefficients(code, table)
    inv = Fraction(1, code.group_order)
    out: dict[str, OperatorSum] = {}
    for s in SIGMAS:
        bar = code.logical(s)
        out[s] = OperatorSum.accumulate(
            code.n,
            ((g.multiply(bar), inv * fi) for g, fi in zip(elements, f[s])),
        )
    return out
