"""Monitored brickwork circuits of dressed SWAP/iSWAP gates.

Each layer applies two-qubit gates on the even bonds ``(2i, 2i+1)`` or the odd
bonds ``(2i+1, 2i+2 mod L)``, every gate dressed by random single-qubit
Cliffords on its four legs, then measures each site with the scheduled
probability in a uniformly random Pauli basis.

Random draws per layer, in order: ``L/2`` uniforms for the core gates,
``4 x L/2`` Clifford indices, then ``L`` uniforms, ``L`` axes and ``L`` coins
for the measurements.  All draws are made whatever the rates, so a trajectory
is a pure function of its seed.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from . import _kernels as K
from .cliffords import COMPOSE, GATES, S_INDEX, SINGLE_QUBIT_CLIFFORDS, SITE_FORMS, CliffordSpec
from .geometry import MeasurementSchedule
from .stabilizer import StabilizerState, n_words, new_product_state, pack_bits

AXES = "XYZ"
_AXIS_TO_CODE = np.array([1, 3, 2], dtype=np.int64)
_IDENTITY_FORM = np.array([1, 0, 0, 1, 0, 0, 0], dtype=np.uint8)


def derive_seed(master: int, experiment: str, index: int) -> int:
    """64-bit trajectory seed from ``(master seed, experiment id, trajectory index)``."""
    h = hashlib.blake2b(digest_size=8)
    h.update(f"{int(master)}|{experiment}|{int(index)}".encode())
    return int.from_bytes(h.digest(), "little")


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator keyed by ``seed``."""
    return np.random.Generator(np.random.Philox(key=int(seed) % (1 << 64)))


@dataclass
class CircuitConfig:
    """One monitored circuit.

    Attributes:
        L: even number of system sites.
        schedule: measurement rates; ``schedule.L`` must equal ``L``.
        initial_state: ``"product"`` or ``"volume"`` (measurement-free brickwork
            of depth ``volume_depth``, default ``2L``).
        gate_mix: probability that a core gate is SWAP rather than iSWAP.
        seed: trajectory seed.
        references: insert one reference ancilla per measured layer.
    """

    L: int
    schedule: MeasurementSchedule
    initial_state: Literal["product", "volume"] = "product"
    volume_depth: int | None = None
    gate_mix: float = 0.1
    seed: int = 0
    references: bool = False

    def __post_init__(self):
        if self.L < 2 or self.L % 2:
            raise ValueError(f"L must be even and >= 2 for brickwork pairing, got {self.L}")
        if not 0 <= self.gate_mix <= 1:
            raise ValueError("gate_mix must lie in [0, 1]")
        if self.schedule.L != self.L:
            raise ValueError(f"schedule is for L={self.schedule.L}, config has L={self.L}")
        if self.initial_state not in ("product", "volume"):
            raise ValueError(f"unknown initial state {self.initial_state!r}")
        if self.volume_depth is None:
            self.volume_depth = 2 * self.L

    @property
    def T(self) -> int:
        return self.schedule.T

    @property
    def width(self) -> int:
        return self.L + (self.T if self.references else 0)


@dataclass
class LayerEvents:
    """Measurements made in one layer (arrays of equal length)."""

    layer: int
    sites: np.ndarray
    axes: np.ndarray
    outcomes: np.ndarray

    def __len__(self):
        return int(self.sites.size)


@dataclass
class TrajectoryRecord:
    """Outcome of one circuit realisation."""

    seed: int
    state: StabilizerState
    measured_sites: list[np.ndarray] = field(default_factory=list)
    events: list[LayerEvents] = field(default_factory=list)
    registry: object | None = None

    @property
    def measurement_count(self) -> int:
        return int(sum(s.size for s in self.measured_sites))

    def event_lines(self):
        """Yield one JSON record per measurement: layer, site, axis, outcome."""
        for ev in self.events:
            for s, a, o in zip(ev.sites, ev.axes, ev.outcomes):
                yield json.dumps({"layer": ev.layer, "site": int(s), "axis": AXES[a],
                                  "outcome": int(o)})

    def write_events(self, path) -> None:
        with open(path, "w") as fh:
            for line in self.event_lines():
                fh.write(line + "\n")


# -- gates ------------------------------------------------------------------------


def dressed_gate(core: str, pre: tuple[int, int], post: tuple[int, int]) -> CliffordSpec:
    """``(C_post_a x C_post_b) . core . (C_pre_a x C_pre_b)`` as one two-qubit Clifford."""
    c = SINGLE_QUBIT_CLIFFORDS
    u = (np.kron(c[post[0]].unitary, c[post[1]].unitary) @ GATES[core].unitary
         @ np.kron(c[pre[0]].unitary, c[pre[1]].unitary))
    return CliffordSpec.from_unitary(f"{core}[{pre[0]},{pre[1]}|{post[0]},{post[1]}]", u)


def sample_gate(rng: np.random.Generator, gate_mix: float = 0.1) -> CliffordSpec:
    """One dressed dual-unitary gate: SWAP w.p. ``gate_mix``, else iSWAP.

    Uses the same draw pattern as a single bond of a brickwork layer.
    """
    swap = rng.random() < gate_mix
    idx = rng.integers(0, 24, size=4)
    return dressed_gate("SWAP" if swap else "ISWAP", (idx[0], idx[1]), (idx[2], idx[3]))


def draw_layer_gates(rng: np.random.Generator, L: int, gate_mix: float):
    """Core flags (``True`` = SWAP) and ``(4, L/2)`` Clifford indices for one layer.

    Rows of the index array are the pre-gates on legs a and b, then the
    post-gates on legs a and b.
    """
    flags = rng.random(L // 2) < gate_mix
    idx = rng.integers(0, 24, size=(4, L // 2))
    return flags, idx


def bond_pairs(L: int, odd: bool) -> np.ndarray:
    """``(L/2, 2)`` array of the bonds acted on by an even or odd layer."""
    a = np.arange(0, L, 2) + (1 if odd else 0)
    return np.stack([a % L, (a + 1) % L], axis=1)


def _site_masks(indices: np.ndarray, width: int, nw: int) -> np.ndarray:
    forms = np.tile(_IDENTITY_FORM, (width, 1))
    forms[: indices.size] = SITE_FORMS[indices]
    return pack_bits(forms.T.astype(bool), nw)


def apply_gate_layer(state: StabilizerState, L: int, odd: bool, flags: np.ndarray,
                     idx: np.ndarray) -> None:
    """Apply one dressed brickwork layer to the first ``L`` qubits of ``state``."""
    w = state.width
    nw = n_words(w)
    pre = np.empty(L, dtype=np.int64)
    post = np.empty(L, dtype=np.int64)
    # masks live in the frame where bond k sits at positions (2k, 2k+1);
    # iSWAP bonds run as S x S, then CZ, then SWAP
    with_s = np.where(flags, idx[:2], COMPOSE[idx[:2], S_INDEX])
    pre[0::2], pre[1::2] = with_s[0], with_s[1]
    post[0::2], post[1::2] = idx[2], idx[3]
    cz_bits = np.zeros(w, dtype=bool)
    swap_bits = np.zeros(w, dtype=bool)
    cz_bits[0:L:2] = ~flags
    swap_bits[0:L:2] = True
    K.apply_brick_layer(state._x, state._z, state._r, L, bool(odd),
                        _site_masks(pre, w, nw), pack_bits(cz_bits, nw),
                        pack_bits(swap_bits, nw), _site_masks(post, w, nw))
    state._touch()


def measure_layer(state: StabilizerState, rates: np.ndarray, rng: np.random.Generator,
                  layer: int = 0) -> LayerEvents:
    """Measure each site ``x`` with probability ``rates[x]`` in a random Pauli basis."""
    L = rates.size
    hit = rng.random(L) < rates
    axes = rng.integers(0, 3, size=L)
    coins = rng.integers(0, 2, size=L)
    sites = np.flatnonzero(hit)
    n = sites.size
    bits = np.zeros(n, dtype=np.uint8)
    det = np.zeros(n, dtype=np.bool_)
    if n:
        K.measure_many(state._x, state._z, state._r, state.width, sites.astype(np.int64),
                       _AXIS_TO_CODE[axes[sites]], coins[sites].astype(np.int64), bits, det)
        state._touch()
    return LayerEvents(layer, sites, axes[sites].astype(np.int8), (1 - 2 * bits.astype(np.int8)))


def prepare_initial(config: CircuitConfig, rng: np.random.Generator | None = None) -> StabilizerState:
    """All-|0> register (width includes reference ancillas), optionally scrambled."""
    rng = make_rng(config.seed) if rng is None else rng
    state = new_product_state(config.width, n_system=config.L)
    if config.initial_state == "volume":
        for k in range(config.volume_depth):
            flags, idx = draw_layer_gates(rng, config.L, config.gate_mix)
            apply_gate_layer(state, config.L, k % 2 == 1, flags, idx)
    return state


def run_layer(state: StabilizerState, layer: int, config: CircuitConfig,
              rng: np.random.Generator) -> LayerEvents:
    """Gates on the bonds of ``layer``'s parity, then scheduled measurements."""
    if state.width < config.L:
        raise ValueError("state is narrower than the system")
    flags, idx = draw_layer_gates(rng, config.L, config.gate_mix)
    apply_gate_layer(state, config.L, layer % 2 == 1, flags, idx)
    return measure_layer(state, config.schedule.layer_rates(layer), rng, layer)


def run_trajectory(config: CircuitConfig,
                   observer: Callable[[int, StabilizerState, LayerEvents], None] | None = None,
                   keep_events: bool = True) -> TrajectoryRecord:
    """Prepare the initial state and run all scheduled layers.

    Args:
        config: circuit description, including its seed.
        observer: called as ``observer(layer, state, events)`` after each layer.
        keep_events: store the full measurement log (disable for long runs).

    Returns:
        The record with the final state on the ``t = 0`` surface.
    """
    if config.schedule.L != config.L:
        raise ValueError("schedule and config disagree on L")
    rng = make_rng(config.seed)
    state = prepare_initial(config, rng)
    rec = TrajectoryRecord(seed=config.seed, state=state)
    registry = None
    if config.references:
        from .references import ReferenceRegistry, insert_reference
        registry = ReferenceRegistry(L=config.L, width_extension=config.T)
        rec.registry = registry
    for k in range(config.T):
        ev = run_layer(state, k, config, rng)
        rec.measured_sites.append(ev.sites)
        if keep_events:
            rec.events.append(ev)
        if registry is not None:
            insert_reference(state, registry, k, ev.sites, rng)
        if observer is not None:
            observer(k, state, ev)
    return rec
