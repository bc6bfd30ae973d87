"""Reference ancillas for imaging entanglement wedges.

After each layer's measurements one measured site is re-entangled with a
fresh ancilla ``R_t`` in a Bell pair.  To query a single ``R_t`` the other
ancillas are measured out, which leaves the same state as a run that only
ever inserted ``R_t``.  Interval queries that include ``R_t`` become
contiguous once ``R_t`` is moved into the chain at a suitable position.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage
from skimage import measure

from . import _kernels as K
from .circuit import AXES, CircuitConfig, derive_seed, make_rng, run_trajectory
from .geometry import layer_times
from .stabilizer import StabilizerState, apply_clifford, clip_gauge, measure_pauli


@dataclass(frozen=True)
class ReferenceEntry:
    layer: int
    site: int
    ancilla: int


@dataclass
class ReferenceRegistry:
    """Inserted references of one trajectory.

    Ancilla ``L + k`` is reserved for layer ``k``; layers without measurements
    leave their ancilla unused in ``|0>``.
    """

    L: int
    width_extension: int
    entries: list[ReferenceEntry] = field(default_factory=list)

    def ancilla_for(self, layer: int) -> int:
        if not 0 <= layer < self.width_extension:
            raise ValueError(f"layer {layer} has no reserved ancilla")
        return self.L + layer

    def layers(self) -> list[int]:
        return [e.layer for e in self.entries]

    def entry(self, layer: int) -> ReferenceEntry:
        for e in self.entries:
            if e.layer == layer:
                return e
        raise ValueError(f"no reference registered for layer {layer}")


def insert_reference(state: StabilizerState, registry: ReferenceRegistry, layer: int,
                     measured_sites, rng: np.random.Generator) -> ReferenceEntry | None:
    """Replace one measured site of ``layer`` by half of a Bell pair with ``R_layer``.

    The site is chosen uniformly among ``measured_sites``; nothing happens
    (and no randomness is drawn) when the list is empty.
    """
    sites = np.asarray(measured_sites, dtype=np.int64)
    if sites.size == 0:
        return None
    site = int(sites[rng.integers(sites.size)])
    anc = registry.ancilla_for(layer)
    if anc >= state.width:
        raise ValueError("state has no room for this reference ancilla")
    if any(e.ancilla == anc for e in registry.entries):
        raise ValueError(f"layer {layer} already has a reference")
    # reset the site to |0>, then (|00> + |11>)/sqrt(2) on (R, site)
    outcome, _ = measure_pauli(state, site, "Z", rng)
    if outcome == -1:
        apply_clifford(state, "X", site)
    apply_clifford(state, "H", anc)
    apply_clifford(state, "CNOT", [anc, site])
    entry = ReferenceEntry(layer, site, anc)
    registry.entries.append(entry)
    return entry


def select_reference(state: StabilizerState, registry: ReferenceRegistry, keep: int,
                     rng: np.random.Generator) -> ReferenceEntry:
    """Measure every ancilla except ``R_keep`` in a uniformly random Pauli basis."""
    kept = registry.entry(keep)
    for e in registry.entries:
        if e.layer != keep:
            measure_pauli(state, e.ancilla, AXES[rng.integers(3)], rng)
    return kept


def move_qubit(width: int, src: int, dst: int) -> np.ndarray:
    """Permutation (for :meth:`StabilizerState.permute`) moving ``src`` to ``dst``.

    Qubits between the two positions shift by one to close the gap.
    """
    if not (0 <= src < width and 0 <= dst < width):
        raise ValueError("positions out of range")
    order = list(range(width))
    order.pop(src)
    order.insert(dst, src)
    return np.asarray(order)


def relocate_ancilla(state: StabilizerState, ancilla: int, position: int) -> None:
    """Move qubit ``ancilla`` to linear position ``position``, shifting the rest right.

    The inverse is ``relocate_ancilla(state, position, ancilla)``.
    """
    if not 0 <= position < state.width:
        raise ValueError(f"insertion position {position} out of range")
    state.permute(move_qubit(state.width, ancilla, position))


# -- wedge maps ---------------------------------------------------------------------


def _frame_permutation(L: int, width: int, ancilla: int, offset: int, r_rel: int) -> np.ndarray:
    """Linear order: system rotated to start at ``offset``, R at relative ``r_rel``."""
    sys = [(offset + k) % L for k in range(L)]
    sys.insert(r_rel, ancilla)
    rest = [q for q in range(L, width) if q != ancilla]
    return np.asarray(sys + rest)


def reference_mutual_information(state: StabilizerState, ancilla: int, L: int, size: int,
                                 separation: int) -> np.ndarray:
    """``I(R : A u B)`` for every translation of two equal intervals.

    Entry ``x`` is for ``A = [x, x + size)`` and ``B = [x + size + separation,
    x + 2 size + separation)`` on the periodic chain.  Every other ancilla must
    already be disentangled (measured).  Per window this uses
    ``I = S_R - 1 + rank(G|C u R) - rank(G|C)`` where ``G`` are the clipped
    generators inside the span ``A C B R`` and ``C`` is the gap.
    """
    span = 2 * size + separation
    if size < 1 or separation < 0 or span > L:
        raise ValueError("intervals do not fit on the chain")
    out = np.empty(L, dtype=np.int64)
    # every frame serves ``h`` consecutive window starts with R inside the span
    h = max(1, min(span - 1, L - span + 1))
    start = 0
    while start < L:
        n = min(h, L - start)
        i = (start + span - 1) % L          # R sits just before system qubit i
        offset = start
        r_rel = (i - offset) % L
        st = state.copy()
        st.permute(_frame_permutation(L, st.width, ancilla, offset, r_rel))
        clip_gauge(st)
        left, right = st._left, st._right
        s_r = 1 - int(np.count_nonzero((left == r_rel) & (right == r_rel)))
        rel = np.arange(n)  # window start relative to the frame origin
        lin = lambda p: p + (p >= r_rel)  # noqa: E731
        lo = lin(rel)
        hi = lin(rel + span - 1)
        c_lo = lin(rel + size)
        c_hi = lin(rel + size + separation - 1) if separation else c_lo - 1
        _, rc, rcr = K.span_projection_ranks(st._x, st._z, st.width, left, right,
                                          lo.astype(np.int64), hi.astype(np.int64),
                                          c_lo.astype(np.int64), c_hi.astype(np.int64),
                                          int(r_rel))
        out[start:start + n] = s_r - 1 + (rcr - rc)
        start += n
    return out


@dataclass
class WedgeMap:
    """Accumulated ``I(R : A u B)`` on the ``(x, t)`` grid, one slice per separation.

    ``x`` is the reference site relative to a layout with ``A`` starting at
    ``origin(separation)``; ``t`` is the layer index.
    """

    L: int
    T: int
    size: int
    separations: tuple[int, ...]
    sums: np.ndarray = None
    sumsq: np.ndarray = None
    counts: np.ndarray = None
    value_counts: np.ndarray = None

    def __post_init__(self):
        shape = (len(self.separations), self.T, self.L)
        if self.sums is None:
            self.sums = np.zeros(shape, dtype=np.int64)
            self.sumsq = np.zeros(shape, dtype=np.int64)
            self.counts = np.zeros((len(self.separations), self.T), dtype=np.int64)
        if self.value_counts is None:
            # occurrences of I = 0, 1, 2 and of anything else
            self.value_counts = np.zeros(4, dtype=np.int64)

    def origin(self, separation: int) -> int:
        return (self.L - (2 * self.size + separation)) // 2

    def add(self, k_sep: int, layer: int, row: np.ndarray) -> None:
        self.sums[k_sep, layer] += row
        self.sumsq[k_sep, layer] += row * row
        self.counts[k_sep, layer] += 1
        hist = np.bincount(np.clip(row, 0, 3), minlength=4)
        hist[3] += np.count_nonzero(row < 0)
        hist[0] -= np.count_nonzero(row < 0)
        self.value_counts += hist[:4]

    def merge(self, other: "WedgeMap") -> "WedgeMap":
        if (self.L, self.T, self.size, self.separations) != (other.L, other.T, other.size,
                                                             other.separations):
            raise ValueError("cannot merge maps of different layouts")
        return WedgeMap(self.L, self.T, self.size, self.separations, self.sums + other.sums,
                        self.sumsq + other.sumsq, self.counts + other.counts,
                        self.value_counts + other.value_counts)

    def mean(self, k_sep: int) -> np.ndarray:
        n = self.counts[k_sep][:, None].astype(float)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(n > 0, self.sums[k_sep] / n, np.nan)

    def stderr(self, k_sep: int) -> np.ndarray:
        n = self.counts[k_sep][:, None].astype(float)
        with np.errstate(invalid="ignore", divide="ignore"):
            m = self.sums[k_sep] / n
            var = (self.sumsq[k_sep] - n * m * m) / (n - 1)
            return np.where(n > 1, np.sqrt(np.maximum(var, 0.0) / n), np.nan)

    def display_grid(self, k_sep: int) -> np.ndarray:
        """Mean map with empty layers filled by linear interpolation in ``t``."""
        m = self.mean(k_sep)
        good = self.counts[k_sep] > 0
        if not good.any():
            return np.zeros_like(m)
        t = np.arange(self.T)
        return np.stack([np.interp(t, t[good], m[good, x]) for x in range(self.L)], axis=1)

    def contours(self, k_sep: int, level: float = 0.75) -> list[np.ndarray]:
        """Iso-lines of the display grid as ``(x, t_layer)`` polylines."""
        lines = measure.find_contours(self.display_grid(k_sep), level)
        return [np.stack([c[:, 1], c[:, 0]], axis=1) for c in lines]

    def region_count(self, k_sep: int, level: float = 0.75, min_pixels: int = 2) -> int:
        """Number of connected regions where the display grid is at least ``level``."""
        lab, n = ndimage.label(self.display_grid(k_sep) >= level)
        sizes = np.bincount(lab.ravel())[1:]
        return int(np.count_nonzero(sizes >= min_pixels))

    def to_csv(self, path, k_sep: int) -> None:
        """Columns ``x, t, mean_I, stderr, n``; ``t`` is the layer midpoint time."""
        mean, err = self.mean(k_sep), self.stderr(k_sep)
        times = layer_times(self.T)
        with open(path, "w") as fh:
            fh.write("x,t,mean_I,stderr,n\n")
            for k in range(self.T):
                n = int(self.counts[k_sep, k])
                for x in range(self.L):
                    fh.write(f"{x},{times[k]:.12g},{_fmt(mean[k, x])},{_fmt(err[k, x])},{n}\n")

    def contours_json(self, path, level: float = 0.75) -> None:
        times = layer_times(self.T)
        payload = {}
        for k, d in enumerate(self.separations):
            lines = []
            for c in self.contours(k, level):
                t = np.interp(c[:, 1], np.arange(self.T), times)
                lines.append([[round(float(a), 9), round(float(b), 9)] for a, b in zip(c[:, 0], t)])
            payload[str(d)] = lines
        with open(path, "w") as fh:
            json.dump({"level": level, "coordinates": ["x", "t"], "contours": payload}, fh)


def _fmt(v: float) -> str:
    return "nan" if not np.isfinite(v) else f"{v:.12g}"


def wedge_realization(config: CircuitConfig, size: int, separations) -> WedgeMap:
    """Map contribution of one trajectory (the config's seed)."""
    if not config.references:
        raise ValueError("wedge maps need a config with references enabled")
    rec = run_trajectory(config, keep_events=False)
    wm = WedgeMap(config.L, config.T, size, tuple(int(d) for d in separations))
    reg = rec.registry
    L = config.L
    for e in reg.entries:
        st = rec.state.copy()
        select_reference(st, reg, e.layer, make_rng(derive_seed(config.seed, "select", e.layer)))
        for k, d in enumerate(wm.separations):
            vals = reference_mutual_information(st, e.ancilla, L, size, d)
            # window start w puts the reference at offset (site - w) from A's start
            x = (e.site - np.arange(L) + wm.origin(d)) % L
            row = np.empty(L, dtype=np.int64)
            row[x] = vals
            wm.add(k, e.layer, row)
    return wm


def wedge_map(config: CircuitConfig, size: int, separations, samples: int,
              master_seed: int = 0, experiment: str = "wedge") -> WedgeMap:
    """Average ``I(R_t : A u B)`` over ``samples`` seeded trajectories.

    Each trajectory feeds every layer with a reference and every translation of
    the interval pair, for all separations at once.
    """
    from dataclasses import replace
    total = None
    for j in range(samples):
        cfg = replace(config, seed=derive_seed(master_seed, experiment, j))
        part = wedge_realization(cfg, size, separations)
        total = part if total is None else total.merge(part)
    return total
