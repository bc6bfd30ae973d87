"""Clifford gate catalog.

Every conjugation table here is computed from a dense unitary at import time:
for each Hermitian Pauli input ``P`` we evaluate ``U P U^dag`` numerically and
read off the Pauli it equals, sign included.  Nothing is hand-derived.

Pauli codes (per qubit) are ``x | (z << 1)``: I=0, X=1, Z=2, Y=3.  A two-qubit
code is ``code_a | (code_b << 2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)

#: single-qubit Pauli matrices indexed by code
PAULI_MATRICES = (_I2, _X, _Z, _Y)
PAULI_CHARS = "IXZY"
AXIS_CODES = {"X": 1, "Z": 2, "Y": 3}


def pauli_matrix(codes) -> np.ndarray:
    """Dense matrix of a Pauli string given per-qubit codes (qubit 0 first).

    Qubit 0 is the most significant tensor factor.
    """
    out = np.ones((1, 1), dtype=complex)
    for c in codes:
        out = np.kron(out, PAULI_MATRICES[c])
    return out


def _pauli_stack(n: int) -> np.ndarray:
    """All ``4**n`` Pauli matrices on ``n`` qubits, indexed by code."""
    size = 4**n
    return np.stack([pauli_matrix([(c >> (2 * k)) & 3 for k in range(n)]) for c in range(size)])


_PAULI_STACKS = {1: _pauli_stack(1), 2: _pauli_stack(2)}


def _conjugation_table(u: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Codes and sign bits of ``u P u^dag`` for every Pauli ``P``."""
    ps = _PAULI_STACKS[n]
    conj = u @ ps @ u.conj().T
    overlap = np.einsum("jab,kab->kj", ps.conj(), conj) / 2**n
    code = np.argmax(np.abs(overlap), axis=1)
    val = overlap[np.arange(code.size), code]
    rest = np.abs(overlap).sum(axis=1) - np.abs(val)
    if np.any(np.abs(np.abs(val) - 1) > 1e-9) or np.any(rest > 1e-9):
        raise ValueError("matrix is not a Pauli operator; gate is not Clifford")
    if np.any(np.abs(val.imag) > 1e-9):
        raise ValueError("conjugated Pauli is not Hermitian; gate is not Clifford")
    return code.astype(np.uint8), (val.real < 0).astype(np.uint8)


def _anf(truth: np.ndarray) -> np.ndarray:
    """Algebraic normal form (Moebius transform) of a boolean truth table."""
    coeffs = truth.astype(np.uint8).copy()
    n = coeffs.size.bit_length() - 1
    for i in range(n):
        step = 1 << i
        for m in range(coeffs.size):
            if m & step:
                coeffs[m] ^= coeffs[m ^ step]
    return coeffs


@dataclass(frozen=True, eq=False)
class CliffordSpec:
    """A named one- or two-qubit Clifford gate with its conjugation table.

    Attributes:
        name: catalog name.
        unitary: dense unitary; qubit 0 (first target) is the most significant factor.
        out_code: ``out_code[c]`` is the Pauli code that input code ``c`` maps to.
        out_sign: sign bit acquired by input code ``c``.
    """

    name: str
    unitary: np.ndarray = field(repr=False)
    out_code: np.ndarray = field(repr=False)
    out_sign: np.ndarray = field(repr=False)

    @property
    def n_qubits(self) -> int:
        return 1 if self.out_code.size == 4 else 2

    @classmethod
    def from_unitary(cls, name: str, u: np.ndarray) -> "CliffordSpec":
        u = np.asarray(u, dtype=complex)
        n = int(round(np.log2(u.shape[0])))
        if n not in (1, 2) or u.shape != (2**n, 2**n):
            raise ValueError("only one- and two-qubit gates are supported")
        if not np.allclose(u.conj().T @ u, np.eye(2**n), atol=1e-10):
            raise ValueError(f"{name} is not unitary")
        out_code, out_sign = _conjugation_table(u, n)
        return cls(name, u, out_code, out_sign)

    def inverse(self) -> "CliffordSpec":
        return CliffordSpec.from_unitary(self.name + "^-1", self.unitary.conj().T)

    def then(self, other: "CliffordSpec", name: str | None = None) -> "CliffordSpec":
        """Gate that applies ``self`` first and ``other`` second."""
        return CliffordSpec.from_unitary(name or f"{self.name}*{other.name}",
                                         other.unitary @ self.unitary)

    def conjugate(self, code: int) -> tuple[int, int]:
        return int(self.out_code[code]), int(self.out_sign[code])

    # word-parallel forms used by the layer kernels

    def site_form(self) -> np.ndarray:
        """``[xx, xz, zx, zz, c1, c2, c3]`` for a single-qubit gate.

        new_x = xx*x ^ xz*z, new_z = zx*x ^ zz*z, sign ^= c1*x ^ c2*z ^ c3*x*z.
        """
        if self.n_qubits != 1:
            raise ValueError("site_form needs a single-qubit gate")
        img_x, img_z = int(self.out_code[1]), int(self.out_code[2])
        c1, c2, cy = int(self.out_sign[1]), int(self.out_sign[2]), int(self.out_sign[3])
        return np.array([img_x & 1, img_z & 1, img_x >> 1, img_z >> 1,
                         c1, c2, cy ^ c1 ^ c2], dtype=np.uint8)

    def pair_form(self) -> tuple[np.ndarray, np.ndarray]:
        """Linear map and sign polynomial for a two-qubit gate.

        Variables are ``v0=xa, v1=za, v2=xb, v3=zb``.  ``lin[k]`` is a 4-bit mask of
        the variables XORed into output ``k``; ``anf[m]`` is the coefficient of the
        monomial ``prod(v_i for i in bits(m))`` in the sign function.
        """
        if self.n_qubits != 2:
            raise ValueError("pair_form needs a two-qubit gate")
        lin = np.zeros(4, dtype=np.uint8)
        for k in range(4):
            img = int(self.out_code[1 << k])
            for out in range(4):
                if (img >> out) & 1:
                    lin[out] |= 1 << k
        return lin, _anf(self.out_sign)


def _generate_single_qubit() -> list[CliffordSpec]:
    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    s = np.diag([1, 1j])
    # breadth-first closure over {H, S}, keyed by the conjugation table
    found: dict[tuple, np.ndarray] = {}
    frontier = [np.eye(2, dtype=complex)]
    order = []
    while frontier:
        nxt = []
        for u in frontier:
            spec = CliffordSpec.from_unitary("tmp", u)
            key = (tuple(spec.out_code), tuple(spec.out_sign))
            if key in found:
                continue
            found[key] = u
            order.append(key)
            nxt.extend([h @ u, s @ u])
        frontier = nxt
    assert len(order) == 24
    return [CliffordSpec.from_unitary(f"C{i}", found[key]) for i, key in enumerate(order)]


SINGLE_QUBIT_CLIFFORDS: tuple[CliffordSpec, ...] = tuple(_generate_single_qubit())

_SQ2 = 1 / np.sqrt(2)
GATES: dict[str, CliffordSpec] = {
    "I": CliffordSpec.from_unitary("I", _I2),
    "X": CliffordSpec.from_unitary("X", _X),
    "Y": CliffordSpec.from_unitary("Y", _Y),
    "Z": CliffordSpec.from_unitary("Z", _Z),
    "H": CliffordSpec.from_unitary("H", np.array([[1, 1], [1, -1]]) * _SQ2),
    "S": CliffordSpec.from_unitary("S", np.diag([1, 1j])),
    "SDG": CliffordSpec.from_unitary("SDG", np.diag([1, -1j])),
    "SWAP": CliffordSpec.from_unitary(
        "SWAP", np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])),
    "ISWAP": CliffordSpec.from_unitary(
        "ISWAP", np.array([[1, 0, 0, 0], [0, 0, 1j, 0], [0, 1j, 0, 0], [0, 0, 0, 1]])),
    "CNOT": CliffordSpec.from_unitary(
        "CNOT", np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])),
    "CZ": CliffordSpec.from_unitary("CZ", np.diag([1, 1, 1, -1])),
}
for _i, _g in enumerate(SINGLE_QUBIT_CLIFFORDS):
    GATES[_g.name] = _g

#: per-Clifford site forms, shape (24, 7)
SITE_FORMS = np.stack([g.site_form() for g in SINGLE_QUBIT_CLIFFORDS])

#: index of the identity within SINGLE_QUBIT_CLIFFORDS
IDENTITY_INDEX = next(i for i, g in enumerate(SINGLE_QUBIT_CLIFFORDS)
                      if np.array_equal(g.out_code, [0, 1, 2, 3]) and not g.out_sign.any())


def _composition_table() -> np.ndarray:
    keys = {(tuple(g.out_code), tuple(g.out_sign)): i for i, g in enumerate(SINGLE_QUBIT_CLIFFORDS)}
    table = np.empty((24, 24), dtype=np.int64)
    for i, a in enumerate(SINGLE_QUBIT_CLIFFORDS):
        for j, b in enumerate(SINGLE_QUBIT_CLIFFORDS):
            c = a.then(b)
            table[i, j] = keys[(tuple(c.out_code), tuple(c.out_sign))]
    return table


#: COMPOSE[i, j] is the index of "C_i, then C_j"
COMPOSE = _composition_table()

#: index of the phase gate S within SINGLE_QUBIT_CLIFFORDS
S_INDEX = next(i for i, g in enumerate(SINGLE_QUBIT_CLIFFORDS)
               if (tuple(g.out_code), tuple(g.out_sign))
               == (tuple(GATES["S"].out_code), tuple(GATES["S"].out_sign)))


def get_gate(gate) -> CliffordSpec:
    if isinstance(gate, CliffordSpec):
        return gate
    name = str(gate)
    spec = GATES.get(name) or GATES.get(name.upper())
    if spec is None:
        raise ValueError(f"unknown gate {gate!r}")
    return spec
