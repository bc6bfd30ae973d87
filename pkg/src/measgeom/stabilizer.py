"""Stabilizer states: Clifford gates, Pauli measurements and entanglement entropy.

States are stored as a full Aaronson-Gottesman tableau (stabilizers plus
destabilizers), bit-packed into 64-bit words.  Entropies are in bits.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from .cliffords import AXIS_CODES, PAULI_CHARS, CliffordSpec, get_gate


class PreconditionError(RuntimeError):
    """Raised when an operation is called on a state in the wrong gauge."""


def n_words(width: int) -> int:
    return (width + 63) // 64


def pack_bits(bits: np.ndarray, nw: int | None = None) -> np.ndarray:
    """Pack a boolean array along its last axis into little-endian uint64 words."""
    bits = np.asarray(bits, dtype=bool)
    n = bits.shape[-1]
    nw = n_words(n) if nw is None else nw
    padded = np.zeros(bits.shape[:-1] + (nw * 64,), dtype=bool)
    padded[..., :n] = bits
    packed = np.packbits(padded, axis=-1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64)


def unpack_bits(words: np.ndarray, n: int) -> np.ndarray:
    words = np.ascontiguousarray(words, dtype="<u8")
    bits = np.unpackbits(words.view(np.uint8), axis=-1, bitorder="little")
    return bits[..., :n].astype(bool)


def qubit_mask(qubits: Iterable[int], nw: int) -> np.ndarray:
    mask = np.zeros(nw, dtype=np.uint64)
    for q in qubits:
        mask[q >> 6] |= np.uint64(1) << np.uint64(q & 63)
    return mask


@dataclass
class PauliOperator:
    """A Pauli string ``i**phase * prod_q P_q`` with Hermitian single-site factors.

    ``phase`` is the exponent of ``i`` (0..3); Hermitian operators have phase 0 or 2.
    """

    x_bits: np.ndarray
    z_bits: np.ndarray
    phase: int = 0

    def __post_init__(self):
        self.x_bits = np.asarray(self.x_bits, dtype=bool)
        self.z_bits = np.asarray(self.z_bits, dtype=bool)
        if self.x_bits.shape != self.z_bits.shape or self.x_bits.ndim != 1:
            raise ValueError("x_bits and z_bits must be 1-d and of equal length")
        self.phase %= 4

    @classmethod
    def from_label(cls, label: str) -> "PauliOperator":
        """Parse labels like ``"+XZI"``, ``"-YY"`` or ``"iZ"``."""
        phase = 0
        body = label.strip()
        for prefix, ph in (("+i", 1), ("-i", 3), ("i", 1), ("+", 0), ("-", 2)):
            if body.startswith(prefix):
                phase, body = ph, body[len(prefix):]
                break
        codes = ["IXZY".index(c) for c in body.upper().replace("_", "I")]
        x = [c & 1 for c in codes]
        z = [c >> 1 for c in codes]
        return cls(np.array(x, bool), np.array(z, bool), phase)

    @classmethod
    def single(cls, width: int, site: int, axis: str) -> "PauliOperator":
        x = np.zeros(width, bool)
        z = np.zeros(width, bool)
        code = AXIS_CODES[axis.upper()]
        x[site] = code & 1
        z[site] = code >> 1
        return cls(x, z)

    @property
    def width(self) -> int:
        return self.x_bits.size

    @property
    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    @property
    def sign(self) -> int:
        if not self.is_hermitian:
            raise ValueError("non-Hermitian Pauli has no real sign")
        return 1 if self.phase == 0 else -1

    def label(self) -> str:
        prefix = {0: "+", 1: "+i", 2: "-", 3: "-i"}[self.phase]
        codes = self.x_bits.astype(int) | (self.z_bits.astype(int) << 1)
        return prefix + "".join(PAULI_CHARS[c] for c in codes)

    def __repr__(self) -> str:
        return f"PauliOperator({self.label()!r})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, PauliOperator) and self.phase == other.phase
                and np.array_equal(self.x_bits, other.x_bits)
                and np.array_equal(self.z_bits, other.z_bits))

    def commutes_with(self, other: "PauliOperator") -> bool:
        sp = np.sum(self.x_bits & other.z_bits) + np.sum(self.z_bits & other.x_bits)
        return sp % 2 == 0

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        x1, z1, x2, z2 = self.x_bits, self.z_bits, other.x_bits, other.z_bits
        x3, z3 = x1 ^ x2, z1 ^ z2
        e = (np.sum(x1 & z1) + np.sum(x2 & z2) + 2 * np.sum(z1 & x2) - np.sum(x3 & z3))
        return PauliOperator(x3, z3, self.phase + other.phase + int(e))

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.x_bits | self.z_bits)

    def to_matrix(self) -> np.ndarray:
        """Dense matrix (qubit 0 most significant); for small widths only."""
        from .cliffords import pauli_matrix
        codes = self.x_bits.astype(int) | (self.z_bits.astype(int) << 1)
        return (1j ** self.phase) * pauli_matrix(codes)


@dataclass(frozen=True)
class RegionSpec:
    """A periodic interval of the system chain, optionally joined with ancillas.

    ``start`` is reduced modulo the system size; ``length`` may not exceed it.
    """

    start: int
    length: int
    ancillas: tuple[int, ...] = ()

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("region length must be non-negative")
        object.__setattr__(self, "ancillas", tuple(sorted(set(self.ancillas))))

    def qubits(self, n_system: int) -> np.ndarray:
        if self.length > n_system:
            raise ValueError(f"region length {self.length} exceeds system size {n_system}")
        sys = (self.start + np.arange(self.length)) % n_system
        return np.concatenate([sys, np.asarray(self.ancillas, dtype=np.int64)]).astype(np.int64)

    def wraps(self, n_system: int) -> bool:
        s = self.start % n_system
        return s + self.length > n_system


def _as_qubits(region, state: "StabilizerState") -> np.ndarray:
    if isinstance(region, RegionSpec):
        q = region.qubits(state.n_system)
    else:
        q = np.unique(np.asarray(list(region), dtype=np.int64))
    if q.size and (q.min() < 0 or q.max() >= state.width):
        raise ValueError("region contains qubits outside the register")
    if np.unique(q).size != q.size:
        raise ValueError("region lists a qubit twice")
    return q


class StabilizerState:
    """Pure stabilizer state on ``width`` qubits, the first ``n_system`` of which
    form the periodic system chain; the rest are ancillas.

    Attributes:
        gauge: ``"raw"`` or ``"clipped"``; any mutation resets it to ``"raw"``.
    """

    def __init__(self, width: int, n_system: int | None = None):
        if width < 1:
            raise ValueError(f"width must be >= 1, got {width}")
        self.width = int(width)
        self.n_system = self.width if n_system is None else int(n_system)
        if not 1 <= self.n_system <= self.width:
            raise ValueError("n_system must lie in [1, width]")
        nw = n_words(self.width)
        idx = np.arange(self.width)
        self._x = np.zeros((2 * self.width, nw), dtype=np.uint64)
        self._z = np.zeros((2 * self.width, nw), dtype=np.uint64)
        self._r = np.zeros(2 * self.width, dtype=np.uint8)
        bits = np.uint64(1) << (idx & 63).astype(np.uint64)
        self._x[idx, idx >> 6] = bits
        self._z[self.width + idx, idx >> 6] = bits
        self.gauge = "raw"
        self._left = None
        self._right = None

    # -- construction ------------------------------------------------------

    @classmethod
    def from_generators(cls, generators: Sequence[PauliOperator | str],
                        n_system: int | None = None) -> "StabilizerState":
        """Build a state from ``width`` independent commuting Hermitian generators.

        Destabilizers are completed by symplectic linear algebra.
        """
        gens = [PauliOperator.from_label(g) if isinstance(g, str) else g for g in generators]
        width = gens[0].width
        if len(gens) != width or any(g.width != width for g in gens):
            raise ValueError("need exactly `width` generators of matching width")
        if any(not g.is_hermitian for g in gens):
            raise ValueError("generators must be Hermitian")
        sx = np.array([g.x_bits for g in gens])
        sz = np.array([g.z_bits for g in gens])
        signs = np.array([g.phase // 2 for g in gens], dtype=np.uint8)
        return cls._from_matrix(sx, sz, signs, n_system)

    @classmethod
    def _from_matrix(cls, sx: np.ndarray, sz: np.ndarray, signs: np.ndarray,
                     n_system: int | None = None) -> "StabilizerState":
        width = sx.shape[1]
        s = np.concatenate([sx, sz], axis=1).astype(np.uint8)
        d = _complete_destabilizers(s)
        st = cls(width, n_system)
        nw = n_words(width)
        st._x[:width] = pack_bits(d[:, :width].astype(bool), nw)
        st._z[:width] = pack_bits(d[:, width:].astype(bool), nw)
        st._x[width:] = pack_bits(sx.astype(bool), nw)
        st._z[width:] = pack_bits(sz.astype(bool), nw)
        st._r[:] = 0
        st._r[width:] = signs
        if K.commutation_defects(st._x, st._z, width):
            raise ValueError("generators do not form a valid stabilizer group")
        return st

    def copy(self) -> "StabilizerState":
        new = object.__new__(StabilizerState)
        new.width = self.width
        new.n_system = self.n_system
        new._x = self._x.copy()
        new._z = self._z.copy()
        new._r = self._r.copy()
        new.gauge = self.gauge
        new._left = None if self._left is None else self._left.copy()
        new._right = None if self._right is None else self._right.copy()
        return new

    def _touch(self):
        self.gauge = "raw"
        self._left = self._right = None

    # -- views ---------------------------------------------------------------

    def _row(self, i: int) -> PauliOperator:
        xb = unpack_bits(self._x[i], self.width)
        zb = unpack_bits(self._z[i], self.width)
        return PauliOperator(xb, zb, 2 * int(self._r[i]))

    @property
    def generators(self) -> list[PauliOperator]:
        return [self._row(self.width + k) for k in range(self.width)]

    @property
    def destabilizers(self) -> list[PauliOperator]:
        """Destabilizers; their signs are bookkeeping only."""
        return [self._row(k) for k in range(self.width)]

    def stabilizer_bits(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Unpacked ``(x, z, sign)`` of the stabilizer rows."""
        w = self.width
        return (unpack_bits(self._x[w:], w), unpack_bits(self._z[w:], w), self._r[w:].copy())

    def check_invariants(self) -> None:
        """Raise if the tableau is not a valid symplectic pairing."""
        if K.commutation_defects(self._x, self._z, self.width):
            raise AssertionError("tableau commutation structure violated")

    def canonical_form(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Reduced row echelon form of the stabilizer group with signs.

        Two states are equal iff their canonical forms are equal.
        """
        cx, cz, cr = K.canonical_form(self._x, self._z, self._r, self.width)
        return cx, cz, cr

    def fingerprint(self) -> str:
        cx, cz, cr = self.canonical_form()
        h = hashlib.sha256()
        h.update(np.int64(self.width).tobytes())
        for a in (cx, cz, cr):
            h.update(np.ascontiguousarray(a).astype("<u8" if a.dtype == np.uint64 else "u1").tobytes())
        return h.hexdigest()

    def same_state(self, other: "StabilizerState") -> bool:
        if self.width != other.width:
            return False
        a, b = self.canonical_form(), other.canonical_form()
        return all(np.array_equal(u, v) for u, v in zip(a, b))

    def __repr__(self) -> str:
        return f"StabilizerState(width={self.width}, n_system={self.n_system}, gauge={self.gauge!r})"

    # -- structural edits ------------------------------------------------------

    def permute(self, perm: Sequence[int]) -> None:
        """Relabel qubits: the qubit at old position ``perm[k]`` moves to position ``k``."""
        perm = np.asarray(perm, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(self.width)):
            raise ValueError("perm must be a permutation of range(width)")
        nw = self._x.shape[1]
        self._x = pack_bits(unpack_bits(self._x, self.width)[:, perm], nw)
        self._z = pack_bits(unpack_bits(self._z, self.width)[:, perm], nw)
        self._touch()

    def discard(self, qubits: Iterable[int], n_system: int | None = None) -> "StabilizerState":
        """Return the state with unentangled qubits removed.

        Each discarded qubit must be in a pure product state with the rest
        (single-site entropy 0), so removal is exact.
        """
        drop = sorted(set(int(q) for q in qubits))
        for q in drop:
            if entropy_rank(self, [q]) != 0:
                raise ValueError(f"qubit {q} is entangled; cannot discard it exactly")
        sx, sz, sr = self.stabilizer_bits()
        sx = sx.astype(np.uint8)
        sz = sz.astype(np.uint8)
        rows = list(range(self.width))
        keep_cols = [q for q in range(self.width) if q not in set(drop)]
        for q in drop:
            piv = next(i for i in rows if sx[i, q] or sz[i, q])
            for i in rows:
                if i != piv and (sx[i, q] or sz[i, q]):
                    same = (sx[i, q] == sx[piv, q]) and (sz[i, q] == sz[piv, q])
                    if not same:
                        raise AssertionError("inconsistent single-site content")
                    p = PauliOperator(sx[piv], sz[piv], 2 * int(sr[piv]))
                    h = PauliOperator(sx[i], sz[i], 2 * int(sr[i]))
                    prod = p * h
                    sx[i], sz[i], sr[i] = prod.x_bits, prod.z_bits, prod.phase // 2
            rows.remove(piv)
        nsx = sx[np.ix_(rows, keep_cols)]
        nsz = sz[np.ix_(rows, keep_cols)]
        n_sys = n_system if n_system is not None else min(self.n_system, len(keep_cols))
        return StabilizerState._from_matrix(nsx, nsz, sr[rows], n_sys)


def _gf2_right_inverse_rows(a: np.ndarray) -> np.ndarray:
    """Return ``B`` (n x 2n) with ``A @ B.T = I`` over GF(2) for full-rank ``A`` (n x 2n)."""
    n, m = a.shape
    mat = np.concatenate([a.copy() % 2, np.eye(n, dtype=np.uint8)], axis=1)
    pivcols = []
    row = 0
    for col in range(m):
        pr = next((i for i in range(row, n) if mat[i, col]), None)
        if pr is None:
            continue
        mat[[row, pr]] = mat[[pr, row]]
        for i in range(n):
            if i != row and mat[i, col]:
                mat[i] ^= mat[row]
        pivcols.append(col)
        row += 1
        if row == n:
            break
    if row != n:
        raise ValueError("generators are not independent")
    # mat = [R | E] with E A = R (reduced); R has identity on pivcols
    e = mat[:, m:]
    b = np.zeros((n, m), dtype=np.uint8)
    # y_k = sum_j E[j, k] e_{pivcol_j} solves A y_k = e_k
    for j, col in enumerate(pivcols):
        b[:, col] = e[j, :]
    return b


def _complete_destabilizers(s: np.ndarray) -> np.ndarray:
    """Destabilizers for the symplectic row set ``s`` (n x 2n, columns x|z)."""
    n = s.shape[0]
    omega_s = np.concatenate([s[:, n:], s[:, :n]], axis=1)  # s @ Omega
    d0 = _gf2_right_inverse_rows(omega_s)
    a = (d0 @ np.concatenate([d0[:, n:], d0[:, :n]], axis=1).T) % 2
    c = np.tril(a, -1).astype(np.uint8)
    return (d0 + c @ s) % 2


# -- operations ------------------------------------------------------------------


def new_product_state(width: int, basis: str = "Z", n_system: int | None = None) -> StabilizerState:
    """All-|0> state: generators ``+Z_q``, destabilizers ``X_q``."""
    if basis.upper() not in ("Z", "Z-UP"):
        raise ValueError("only the Z-up product basis is supported")
    if width < 1:
        raise ValueError(f"width must be >= 1, got {width}")
    return StabilizerState(width, n_system)


def apply_clifford(state: StabilizerState, gate: CliffordSpec | str, targets: Sequence[int] | int) -> None:
    g = get_gate(gate)
    t = [int(targets)] if np.isscalar(targets) else [int(v) for v in targets]
    if len(t) != g.n_qubits:
        raise ValueError(f"{g.name} acts on {g.n_qubits} qubit(s), got targets {t}")
    if any(q < 0 or q >= state.width for q in t):
        raise ValueError(f"targets {t} out of range for width {state.width}")
    if len(set(t)) != len(t):
        raise ValueError(f"duplicate targets {t}")
    if g.n_qubits == 1:
        K.apply_1q(state._x, state._z, state._r, t[0], g.out_code, g.out_sign)
    else:
        K.apply_2q(state._x, state._z, state._r, t[0], t[1], g.out_code, g.out_sign)
    state._touch()


def measure_pauli(state: StabilizerState, site: int, axis: str, rng: np.random.Generator) -> tuple[int, bool]:
    """Projectively measure ``axis`` in {X, Y, Z} on ``site``.

    Returns ``(outcome, deterministic)`` with outcome in {+1, -1}.  A fair coin is
    drawn from ``rng`` on every call so the stream position does not depend on
    the state.
    """
    if not 0 <= site < state.width:
        raise ValueError(f"site {site} out of range")
    code = AXIS_CODES[axis.upper()]
    coin = int(rng.integers(2))
    bit, det = K.measure(state._x, state._z, state._r, state.width, int(site), code, coin)
    if not det:
        state._touch()
    return (1 - 2 * int(bit)), bool(det)


def entropy_rank(state: StabilizerState, region) -> int:
    """Entanglement entropy (bits) of ``region`` from the restricted GF(2) rank."""
    q = _as_qubits(region, state)
    if q.size == 0:
        return 0
    mask = qubit_mask(q, state._x.shape[1])
    rank = K.restricted_rank(state._x, state._z, state.width, mask)
    return int(rank - q.size)


def clip_gauge(state: StabilizerState) -> None:
    """Put the stabilizer generators in the clipped gauge along qubit order 0..W-1."""
    w = state.width
    left = np.empty(w, dtype=np.int64)
    right = np.empty(w, dtype=np.int64)
    K.clip_gauge(state._x, state._z, state._r, w, left, right)
    state.gauge = "clipped"
    state._left, state._right = left, right


def endpoints(state: StabilizerState) -> tuple[np.ndarray, np.ndarray]:
    if state.gauge != "clipped":
        raise PreconditionError("state is not in the clipped gauge")
    return state._left.copy(), state._right.copy()


def _clipped_linear(state: StabilizerState, a: int, b: int) -> int:
    """Entropy of linear interval [a, b) from endpoints."""
    if b <= a:
        return 0
    inside_l = (state._left >= a) & (state._left < b)
    inside_r = (state._right >= a) & (state._right < b)
    return int(np.count_nonzero(inside_l ^ inside_r)) // 2


def entropy_clipped(state: StabilizerState, interval: RegionSpec) -> int:
    """Entropy (bits) of a contiguous system interval from clipped-gauge endpoints.

    Wrapped intervals are answered through the complement, which must then be a
    contiguous block of the linear order (true when there are no ancillas).
    """
    if state.gauge != "clipped":
        raise PreconditionError("entropy_clipped needs the clipped gauge; call clip_gauge first")
    if interval.ancillas:
        raise ValueError("entropy_clipped takes a plain interval without ancillas")
    n = state.n_system
    if interval.length > n:
        raise ValueError("interval longer than the system")
    a = interval.start % n
    if a + interval.length <= n:
        return _clipped_linear(state, a, a + interval.length)
    if state.width != n:
        raise PreconditionError("wrapped interval needs a register without ancillas")
    b = a + interval.length - n
    return _clipped_linear(state, b, a)


class IntervalEntropyTable:
    """All contiguous-interval entropies of a clipped state in O(1) per query.

    ``table(a, b)`` is the entropy of the linear interval ``[a, b)``.  Uses
    ``S = |A| - #(generators contained in A)``.
    """

    def __init__(self, state: StabilizerState):
        if state.gauge != "clipped":
            raise PreconditionError("state is not in the clipped gauge")
        w = state.width
        counts = np.zeros((w + 1, w + 1), dtype=np.int64)
        np.add.at(counts, (state._left, state._right), 1)
        # contained[a, b] = #{l >= a, r < b}
        suf = np.cumsum(counts[::-1], axis=0)[::-1]
        self._contained = np.zeros((w + 1, w + 1), dtype=np.int64)
        self._contained[:, 1:] = np.cumsum(suf[:, :-1], axis=1)
        self.width = w
        self.n_system = state.n_system

    def __call__(self, a: int, b: int) -> int:
        if b <= a:
            return 0
        return int((b - a) - self._contained[a, b])

    def periodic(self, start: int, length: int) -> int:
        """Entropy of a periodic system interval (requires no ancillas if it wraps)."""
        n = self.n_system
        a = start % n
        if a + length <= n:
            return self(a, a + length)
        if self.width != n:
            raise PreconditionError("wrapped interval needs a register without ancillas")
        return self(a + length - n, a)

    def profile(self) -> np.ndarray:
        """Mean entropy over all start positions for each length 0..n (no ancillas)."""
        n = self.n_system
        if self.width != n:
            raise PreconditionError("profile needs a register without ancillas")
        a = np.arange(n)[None, :]
        length = np.arange(n + 1)[:, None]
        b = a + length
        lin = b <= n
        # wrapped intervals are read off their complement
        lo = np.where(lin, a, b - n)
        hi = np.where(lin, b, a)
        size = np.where(lin, length, n - length)
        s = size - self._contained[lo, hi]
        return s.mean(axis=1)


def _rotation(width: int, n_system: int, offset: int) -> np.ndarray:
    sys = (np.arange(n_system) + offset) % n_system
    return np.concatenate([sys, np.arange(n_system, width)])


def interval_pair_entropies(state: StabilizerState, size: int, separation: int):
    """``S(A)``, ``S(B)`` and ``S(A u B)`` for every translation of two intervals.

    Entry ``x`` refers to ``A = [x, x + size)`` and ``B = [x + size + separation,
    x + 2 size + separation)`` on the periodic system chain.  ``S(A u B)`` is
    read from the clipped generators inside the span minus the rank of their
    restriction to the gap.
    """
    n = state.n_system
    span = 2 * size + separation
    if size < 1 or separation < 0 or span > n:
        raise ValueError("intervals do not fit on the chain")
    sa = np.empty(n, dtype=np.int64)
    sb = np.empty(n, dtype=np.int64)
    sab = np.empty(n, dtype=np.int64)
    h = n - span + 1
    start = 0
    while start < n:
        m = min(h, n - start)
        st = state.copy()
        st.permute(_rotation(st.width, n, start))
        clip_gauge(st)
        table = IntervalEntropyTable(st)
        rel = np.arange(m)
        c = table._contained
        sa[start:start + m] = size - c[rel, rel + size]
        sb[start:start + m] = size - c[rel + size + separation, rel + span]
        k, rc, _ = K.span_projection_ranks(st._x, st._z, st.width, st._left, st._right,
                                           rel, rel + span - 1, rel + size,
                                           rel + size + separation - 1, -1)
        sab[start:start + m] = 2 * size - (k - rc)
        start += m
    return sa, sb, sab


def tripartite_contiguous(state: StabilizerState, start: int, size: int) -> int:
    """``I3`` of consecutive intervals ``A, B, C`` of ``size`` sites from ``start``.

    Clips the state in place (the physical state is unchanged).  The triple
    must not wrap around the end of the linear order.
    """
    a, b, c, e = start, start + size, start + 2 * size, start + 3 * size
    if a < 0 or e > state.width:
        raise ValueError("intervals must lie inside the linear order")
    if state.gauge != "clipped":
        clip_gauge(state)
    t = IntervalEntropyTable(state)
    k, rc, _ = K.span_projection_ranks(state._x, state._z, state.width, state._left,
                                       state._right, np.array([a]), np.array([e - 1]),
                                       np.array([b]), np.array([c - 1]), -1)
    s_ac = 2 * size - int(k[0] - rc[0])
    return t(a, b) + t(b, c) + t(c, e) - t(a, c) - t(b, e) - s_ac + t(a, e)


def _check_disjoint(*regions: np.ndarray) -> None:
    seen = np.concatenate(regions) if regions else np.array([], dtype=np.int64)
    if np.unique(seen).size != seen.size:
        raise ValueError("regions overlap")


def mutual_information(state: StabilizerState, a, b) -> int:
    qa, qb = _as_qubits(a, state), _as_qubits(b, state)
    _check_disjoint(qa, qb)
    return (entropy_rank(state, qa) + entropy_rank(state, qb)
            - entropy_rank(state, np.concatenate([qa, qb])))


def tripartite_information(state: StabilizerState, a, b, c) -> int:
    qa, qb, qc = (_as_qubits(r, state) for r in (a, b, c))
    _check_disjoint(qa, qb, qc)
    s = lambda *rs: entropy_rank(state, np.concatenate(rs))  # noqa: E731
    return (s(qa) + s(qb) + s(qc) - s(qa, qb) - s(qb, qc) - s(qa, qc) + s(qa, qb, qc))
