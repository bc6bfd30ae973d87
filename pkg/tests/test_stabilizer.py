import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_clifford_state
from oracles import DenseSim, entropy_by_int_rank, pauli_dense
from measgeom.cliffords import GATES, SINGLE_QUBIT_CLIFFORDS, pauli_matrix
from measgeom.stabilizer import (
    PauliOperator,
    PreconditionError,
    RegionSpec,
    StabilizerState,
    apply_clifford,
    clip_gauge,
    endpoints,
    entropy_clipped,
    entropy_rank,
    measure_pauli,
    mutual_information,
    new_product_state,
    tripartite_information,
)


def bell_state(width=2):
    s = new_product_state(width)
    apply_clifford(s, "H", 0)
    apply_clifford(s, "CNOT", [0, 1])
    return s


def ghz_state(n):
    s = new_product_state(n)
    apply_clifford(s, "H", 0)
    for q in range(n - 1):
        apply_clifford(s, "CNOT", [q, q + 1])
    return s


# -- product state ----------------------------------------------------------------


def test_product_state_single_qubit():
    s = new_product_state(1)
    assert [g.label() for g in s.generators] == ["+Z"]
    assert [d.label() for d in s.destabilizers] == ["+X"]


def test_product_state_zero_width_rejected():
    with pytest.raises(ValueError):
        new_product_state(0)


def test_product_state_entropies_zero():
    s = new_product_state(4)
    for a in range(4):
        for length in range(5):
            assert entropy_rank(s, RegionSpec(a, length)) == 0


def test_product_state_z_measurements_deterministic(rng):
    s = new_product_state(4)
    for q in range(4):
        assert measure_pauli(s, q, "Z", rng) == (1, True)


# -- Clifford conjugation -------------------------------------------------------------


def test_hadamard_maps_z_to_x():
    s = new_product_state(1)
    apply_clifford(s, "H", 0)
    assert s.generators[0].label() == "+X"


@pytest.mark.parametrize("name", ["SWAP", "ISWAP", "CNOT", "CZ"])
def test_two_qubit_tables_match_dense_conjugation(name):
    g = GATES[name]
    u = g.unitary
    for code in range(16):
        a, b = code & 3, code >> 2
        p = np.kron(pauli_matrix([a]), pauli_matrix([b]))
        out, sign = g.conjugate(code)
        q = np.kron(pauli_matrix([out & 3]), pauli_matrix([out >> 2]))
        assert np.allclose(u @ p @ u.conj().T, (-1) ** sign * q)


@pytest.mark.parametrize("idx", range(24))
def test_single_qubit_tables_match_dense_conjugation(idx):
    g = SINGLE_QUBIT_CLIFFORDS[idx]
    for code in range(4):
        out, sign = g.conjugate(code)
        lhs = g.unitary @ pauli_matrix([code]) @ g.unitary.conj().T
        assert np.allclose(lhs, (-1) ** sign * pauli_matrix([out]))


def test_single_qubit_cliffords_are_distinct():
    keys = {(tuple(g.out_code), tuple(g.out_sign)) for g in SINGLE_QUBIT_CLIFFORDS}
    assert len(keys) == 24


def _check_against_dense(state, sim):
    for g in state.generators:
        assert sim.stabilized_by(pauli_dense(g.label())), g.label()


@pytest.mark.parametrize("seed", range(6))
def test_tableau_gates_track_dense_statevector(seed):
    """Every gate kind on every target pair matches a dense statevector run, signs included."""
    rng = np.random.default_rng(seed)
    n = 5
    record = []
    s = random_clifford_state(n, rng, n_gates=120, record=record)
    sim = DenseSim(n)
    for g, t in record:
        sim.apply(g.unitary, t)
    _check_against_dense(s, sim)
    s.check_invariants()


@pytest.mark.parametrize("seed", range(4))
def test_measurements_track_dense_statevector(seed):
    rng = np.random.default_rng(100 + seed)
    n = 5
    record = []
    s = random_clifford_state(n, rng, n_gates=60, record=record)
    sim = DenseSim(n)
    for g, t in record:
        sim.apply(g.unitary, t)
    for _ in range(15):
        q = int(rng.integers(n))
        axis = "XYZ"[rng.integers(3)]
        outcome, det = measure_pauli(s, q, axis, rng)
        op = PauliOperator.single(n, q, axis).to_matrix()
        p = sim.project(op, outcome)
        assert p == pytest.approx(1.0 if det else 0.5, abs=1e-9)
        _check_against_dense(s, sim)
        g, t = record[rng.integers(len(record))]
        apply_clifford(s, g, t)
        sim.apply(g.unitary, t)
    s.check_invariants()


def test_swap_relabels_bell_pair():
    s = bell_state(3)
    before = {(a, b): entropy_rank(s, [a, b][: 1 + (a != b)]) for a in range(3) for b in range(3)}
    apply_clifford(s, "SWAP", [1, 2])
    for (a, b), v in before.items():
        relabel = {0: 0, 1: 2, 2: 1}
        assert entropy_rank(s, sorted({relabel[a], relabel[b]})) == v


def test_gate_then_inverse_restores_canonical_form(rng):
    s = random_clifford_state(8, rng)
    ref = s.copy()
    gates = []
    for _ in range(40):
        if rng.random() < 0.5:
            g = GATES[["SWAP", "ISWAP"][rng.integers(2)]]
            t = [int(v) for v in rng.choice(8, 2, replace=False)]
        else:
            g = SINGLE_QUBIT_CLIFFORDS[rng.integers(24)]
            t = [int(rng.integers(8))]
        apply_clifford(s, g, t)
        gates.append((g, t))
    for g, t in reversed(gates):
        apply_clifford(s, g.inverse(), t)
    assert s.same_state(ref)


def test_invalid_targets():
    s = new_product_state(3)
    with pytest.raises(ValueError):
        apply_clifford(s, "SWAP", [0, 0])
    with pytest.raises(ValueError):
        apply_clifford(s, "H", 3)
    with pytest.raises(ValueError):
        apply_clifford(s, "SWAP", [0, 5])


# -- measurement --------------------------------------------------------------------


def test_x_on_zero_is_fair_coin():
    rng = np.random.default_rng(7)
    n_draws = 10_000
    plus = 0
    for _ in range(n_draws):
        s = new_product_state(1)
        outcome, det = measure_pauli(s, 0, "X", rng)
        assert not det
        plus += outcome == 1
    sigma = np.sqrt(n_draws * 0.25)
    assert abs(plus - n_draws / 2) < 5 * sigma


def test_repeated_measurement_is_idempotent(rng):
    for _ in range(50):
        s = random_clifford_state(4, rng, n_gates=30)
        q = int(rng.integers(4))
        axis = "XYZ"[rng.integers(3)]
        first, _ = measure_pauli(s, q, axis, rng)
        second, det = measure_pauli(s, q, axis, rng)
        assert det and second == first


def test_post_measurement_state_stabilizes_outcome(rng):
    s = random_clifford_state(6, rng)
    outcome, _ = measure_pauli(s, 2, "Y", rng)
    target = PauliOperator.single(6, 2, "Y")
    target.phase = 0 if outcome == 1 else 2
    assert target in s.generators or _in_group(s, target)


def _in_group(state, p):
    # brute force over the group for small widths
    gens = state.generators
    n = len(gens)
    for mask in range(1, 2**n):
        acc = PauliOperator(np.zeros(n, bool), np.zeros(n, bool))
        for k in range(n):
            if mask >> k & 1:
                acc = acc * gens[k]
        if acc == p:
            return True
    return False


# -- entropy --------------------------------------------------------------------------


def test_bell_half_has_one_bit():
    assert entropy_rank(bell_state(), [0]) == 1


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_ghz_single_site_one_bit(n):
    s = ghz_state(n)
    for q in range(n):
        assert entropy_rank(s, [q]) == 1


@pytest.mark.parametrize("seed", range(5))
def test_entropy_rank_matches_int_rank_oracle(seed):
    rng = np.random.default_rng(seed)
    s = random_clifford_state(12, rng)
    x, z, _ = s.stabilizer_bits()
    for cut in range(1, 13):
        region = list(range(cut))
        assert entropy_rank(s, region) == entropy_by_int_rank(x, z, region)
    for _ in range(20):
        region = sorted(rng.choice(12, size=rng.integers(1, 12), replace=False).tolist())
        assert entropy_rank(s, region) == entropy_by_int_rank(x, z, region)


def test_entropy_rank_matches_dense_entropy(rng):
    record = []
    s = random_clifford_state(6, rng, n_gates=80, record=record)
    sim = DenseSim(6)
    for g, t in record:
        sim.apply(g.unitary, t)
    for size in range(1, 6):
        for _ in range(4):
            region = sorted(rng.choice(6, size=size, replace=False).tolist())
            assert entropy_rank(s, region) == pytest.approx(sim.entropy(region), abs=1e-8)


def test_region_spec_wraps_periodically():
    r = RegionSpec(6, 4)
    assert r.qubits(8).tolist() == [6, 7, 0, 1]
    assert r.wraps(8)
    with pytest.raises(ValueError):
        RegionSpec(0, 9).qubits(8)


# -- clipped gauge ------------------------------------------------------------------------


def _endpoint_balance(state):
    left, right = endpoints(state)
    counts = np.bincount(left, minlength=state.width) + np.bincount(right, minlength=state.width)
    return counts


def test_clipped_product_state():
    s = new_product_state(5)
    clip_gauge(s)
    left, right = endpoints(s)
    assert np.array_equal(left, right)
    assert np.all(_endpoint_balance(s) == 2)


def test_clipped_bell_pair_with_spectator():
    s = bell_state(3)
    clip_gauge(s)
    labels = sorted(g.label() for g in s.generators)
    assert labels == ["+IIZ", "+XXI", "+ZZI"]
    assert np.all(_endpoint_balance(s) == 2)
    assert entropy_clipped(s, RegionSpec(0, 1)) == 1


def test_clipped_gauge_endpoint_condition_random_states():
    rng = np.random.default_rng(2024)
    for _ in range(1000):
        s = random_clifford_state(16, rng, n_gates=160)
        before = s.canonical_form()
        clip_gauge(s)
        assert np.all(_endpoint_balance(s) == 2)
        after = s.canonical_form()
        assert all(np.array_equal(a, b) for a, b in zip(before, after))


def test_clip_gauge_keeps_tableau_valid(rng):
    s = random_clifford_state(20, rng)
    clip_gauge(s)
    s.check_invariants()
    # measurements still work on the clipped tableau
    measure_pauli(s, 3, "X", rng)
    s.check_invariants()


def test_entropy_clipped_equals_rank_all_intervals(rng):
    for _ in range(30):
        s = random_clifford_state(12, rng, n_gates=150)
        clip_gauge(s)
        for a in range(12):
            for length in range(13):
                r = RegionSpec(a, length)
                assert entropy_clipped(s, r) == entropy_rank(s, r)


def test_entropy_clipped_requires_gauge(rng):
    s = random_clifford_state(4, rng)
    with pytest.raises(PreconditionError):
        entropy_clipped(s, RegionSpec(0, 2))
    clip_gauge(s)
    apply_clifford(s, "H", 0)
    with pytest.raises(PreconditionError):
        entropy_clipped(s, RegionSpec(0, 2))


def test_product_state_clipped_any_interval_zero():
    s = new_product_state(6)
    clip_gauge(s)
    assert all(entropy_clipped(s, RegionSpec(a, l)) == 0 for a in range(6) for l in range(7))


# -- mutual / tripartite information ----------------------------------------------------------


def test_bell_mutual_information():
    assert mutual_information(bell_state(), [0], [1]) == 2


def test_product_mutual_information_zero():
    s = new_product_state(6)
    assert mutual_information(s, RegionSpec(0, 2), RegionSpec(3, 2)) == 0


def test_mutual_information_compositional(rng):
    for _ in range(50):
        s = random_clifford_state(16, rng, n_gates=200)
        perm = rng.permutation(16)
        na, nb = rng.integers(1, 8, size=2)
        a, b = perm[:na].tolist(), perm[na:na + nb].tolist()
        expect = entropy_rank(s, a) + entropy_rank(s, b) - entropy_rank(s, a + b)
        assert mutual_information(s, a, b) == expect


def test_overlapping_regions_rejected():
    s = new_product_state(4)
    with pytest.raises(ValueError):
        mutual_information(s, [0, 1], [1, 2])
    with pytest.raises(ValueError):
        tripartite_information(s, [0], [1], [1])


def test_tripartite_product_zero():
    s = new_product_state(6)
    assert tripartite_information(s, [0, 1], [2, 3], [4]) == 0


def test_tripartite_ghz_four():
    s = ghz_state(4)
    # brute force from all seven regions
    S = lambda *r: entropy_rank(s, sorted(sum(r, [])))  # noqa: E731
    a, b, c = [0], [1], [2]
    brute = S(a) + S(b) + S(c) - S(a, b) - S(b, c) - S(a, c) + S(a, b, c)
    assert brute == 1
    assert tripartite_information(s, a, b, c) == 1


# -- properties ----------------------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 14))
def test_entropy_bounds_and_complement(seed, n):
    rng = np.random.default_rng(seed)
    s = random_clifford_state(n, rng, n_gates=3 * n * n)
    for _ in range(5):
        k = int(rng.integers(0, n + 1))
        region = rng.choice(n, size=k, replace=False).tolist()
        comp = [q for q in range(n) if q not in region]
        sa = entropy_rank(s, region)
        assert 0 <= sa <= min(k, n - k)
        assert sa == entropy_rank(s, comp)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(3, 14))
def test_subadditivity_and_araki_lieb(seed, n):
    rng = np.random.default_rng(seed)
    s = random_clifford_state(n, rng, n_gates=3 * n * n)
    perm = rng.permutation(n).tolist()
    na = int(rng.integers(1, n - 1))
    nb = int(rng.integers(1, n - na + 1))
    a, b = perm[:na], perm[na:na + nb]
    sa, sb, sab = entropy_rank(s, a), entropy_rank(s, b), entropy_rank(s, a + b)
    assert sab <= sa + sb
    assert sab >= abs(sa - sb)


def test_from_generators_builds_valid_tableau():
    s = StabilizerState.from_generators(["+XXXX", "+ZZII", "+IZZI", "-IIZZ"])
    s.check_invariants()
    assert [g.label() for g in s.generators][-1] == "-IIZZ"
    with pytest.raises(ValueError):
        StabilizerState.from_generators(["+XI", "+ZI"])


def test_discard_unentangled_qubit(rng):
    s = new_product_state(5)
    for _ in range(60):
        a, b = rng.choice(4, 2, replace=False)
        apply_clifford(s, "ISWAP", [int(a), int(b)])
        apply_clifford(s, SINGLE_QUBIT_CLIFFORDS[rng.integers(24)], [int(rng.integers(4))])
    apply_clifford(s, "H", 4)
    reduced = s.discard([4])
    reduced.check_invariants()
    for region in ([0], [0, 1], [1, 3], [0, 2, 3]):
        assert entropy_rank(reduced, region) == entropy_rank(s, region)
    with pytest.raises(ValueError):
        bell_state(3).discard([0])
