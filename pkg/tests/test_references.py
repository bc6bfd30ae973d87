import json

import numpy as np
import pytest

from measgeom.circuit import (CircuitConfig, derive_seed, make_rng, prepare_initial, run_layer,
                              run_trajectory)
from measgeom.geometry import MetricSpec, build_schedule
from measgeom.references import (ReferenceRegistry, WedgeMap, insert_reference, move_qubit,
                                 reference_mutual_information, relocate_ancilla,
                                 select_reference, wedge_map, wedge_realization)
from measgeom.stabilizer import (RegionSpec, entropy_rank, mutual_information,
                                 new_product_state)


def volume_state(L, extra, seed=0):
    sch = build_schedule(MetricSpec.uniform(0.0), L, depth=extra)
    cfg = CircuitConfig(L, sch, initial_state="volume", seed=seed, references=True)
    return prepare_initial(cfg)


def brute_reference_mi(state, anc, L, size, sep):
    out = []
    for x in range(L):
        ab = [(x + k) % L for k in range(size)] + [(x + size + sep + k) % L for k in range(size)]
        out.append(mutual_information(state, [anc], ab))
    return np.array(out)


def test_registry_reserves_one_ancilla_per_layer():
    reg = ReferenceRegistry(L=8, width_extension=3)
    assert [reg.ancilla_for(k) for k in range(3)] == [8, 9, 10]
    with pytest.raises(ValueError):
        reg.ancilla_for(3)
    with pytest.raises(ValueError):
        reg.entry(0)


def test_insert_creates_bell_pair():
    L = 8
    st = volume_state(L, 2)
    reg = ReferenceRegistry(L, 2)
    e = insert_reference(st, reg, 1, [2, 5], make_rng(1))
    assert e.ancilla == 9 and e.site in (2, 5)
    assert entropy_rank(st, [9]) == 1
    assert mutual_information(st, [9], list(range(L))) == 2
    assert mutual_information(st, [9], [e.site]) == 2
    assert reg.layers() == [1]


def test_insert_with_no_measurements_is_noop():
    st = volume_state(8, 1)
    before = st.copy()
    reg = ReferenceRegistry(8, 1)
    rng = make_rng(3)
    assert insert_reference(st, reg, 0, [], rng) is None
    assert reg.entries == [] and st.same_state(before)
    assert rng.random() == make_rng(3).random()


def test_insert_twice_same_layer_rejected():
    st = volume_state(8, 1)
    reg = ReferenceRegistry(8, 1)
    insert_reference(st, reg, 0, [1], make_rng(0))
    with pytest.raises(ValueError):
        insert_reference(st, reg, 0, [2], make_rng(0))


def test_insert_site_uniform():
    rng = make_rng(17)
    sites = [1, 3, 4, 6]
    counts = dict.fromkeys(sites, 0)
    base = new_product_state(9, n_system=8)
    n = 10_000
    for _ in range(n):
        reg = ReferenceRegistry(8, 1)
        counts[insert_reference(base.copy(), reg, 0, sites, rng).site] += 1
    sigma = np.sqrt(n * 0.25 * 0.75)
    assert all(abs(c - n / 4) < 5 * sigma for c in counts.values())


def test_select_single_entry_is_noop():
    st = volume_state(8, 2)
    reg = ReferenceRegistry(8, 2)
    insert_reference(st, reg, 0, [3], make_rng(2))
    before = st.copy()
    select_reference(st, reg, 0, make_rng(5))
    assert st.same_state(before)
    with pytest.raises(ValueError):
        select_reference(st, reg, 1, make_rng(5))


def test_select_disentangles_other_ancillas():
    L = 16
    cfg = CircuitConfig(L, build_schedule(MetricSpec.uniform(0.3), L, depth=6),
                        initial_state="volume", seed=4, references=True)
    rec = run_trajectory(cfg)
    reg = rec.registry
    keep = reg.entries[len(reg.entries) // 2]
    select_reference(rec.state, reg, keep.layer, make_rng(9))
    for e in reg.entries:
        if e.layer != keep.layer:
            assert entropy_rank(rec.state, [e.ancilla]) == 0


def _single_reference_run(config, keep_layer):
    rng = make_rng(config.seed)
    st = prepare_initial(config, rng)
    reg = ReferenceRegistry(config.L, config.T)
    for k in range(config.T):
        ev = run_layer(st, k, config, rng)
        if k == keep_layer:
            if insert_reference(st, reg, k, ev.sites, rng) is None:
                return None
    return st, reg.entry(keep_layer).ancilla


def test_selection_matches_single_ancilla_control():
    L, T, n = 16, 8, 500
    sch = build_schedule(MetricSpec.uniform(0.2), L, depth=T)
    region = list(range(8))
    for t in (2, 5, 7):
        multi, single = [], []
        for j in range(n):
            cfg = CircuitConfig(L, sch, initial_state="volume", references=True,
                                seed=derive_seed(1, f"multi{t}", j))
            rec = run_trajectory(cfg, keep_events=False)
            if t in rec.registry.layers():
                st = rec.state
                select_reference(st, rec.registry, t, make_rng(j))
                multi.append(mutual_information(st, [rec.registry.entry(t).ancilla], region))
            cfg = CircuitConfig(L, sch, initial_state="volume", references=True,
                                seed=derive_seed(1, f"single{t}", j))
            res = _single_reference_run(cfg, t)
            if res is not None:
                single.append(mutual_information(res[0], [res[1]], region))
        diff = np.mean(multi) - np.mean(single)
        err = np.sqrt(np.var(multi, ddof=1) / len(multi) + np.var(single, ddof=1) / len(single))
        assert abs(diff) < 2 * err


def test_move_qubit_round_trip():
    p = move_qubit(6, 5, 1)
    assert p.tolist() == [0, 5, 1, 2, 3, 4]
    st = volume_state(8, 2, seed=3)
    ref = st.copy()
    relocate_ancilla(st, 9, 3)
    relocate_ancilla(st, 3, 9)
    assert st.same_state(ref)
    with pytest.raises(ValueError):
        relocate_ancilla(st, 9, 10)


def test_relocation_interval_entropies():
    L = 8
    st = volume_state(L, 1, seed=5)
    reg = ReferenceRegistry(L, 1)
    insert_reference(st, reg, 0, [2], make_rng(0))
    anc, i = L, 4
    moved = st.copy()
    relocate_ancilla(moved, anc, i)
    # old qubit q sits at q (q < i) or q + 1 (q >= i)
    pos = lambda q: q if q < i else q + 1  # noqa: E731
    for a in range(L + 1):
        for b in range(a + 1, L + 2):
            lin = list(range(a, b))
            if i in lin:
                orig = [q for q in range(L) if pos(q) in lin] + [anc]
            else:
                orig = [q for q in range(L) if pos(q) in lin]
            assert entropy_rank(moved, lin) == entropy_rank(st, orig)


@pytest.mark.parametrize("L,size,sep", [(12, 3, 2), (12, 4, 0), (16, 5, 3), (16, 2, 9)])
def test_reference_mi_matches_rank(L, size, sep):
    sch = build_schedule(MetricSpec.uniform(0.2), L, depth=6)
    cfg = CircuitConfig(L, sch, initial_state="volume", seed=L + size, references=True)
    rec = run_trajectory(cfg)
    for e in rec.registry.entries:
        st = rec.state.copy()
        select_reference(st, rec.registry, e.layer, make_rng(e.layer))
        fast = reference_mutual_information(st, e.ancilla, L, size, sep)
        assert np.array_equal(fast, brute_reference_mi(st, e.ancilla, L, size, sep))


def test_reference_mi_rejects_bad_layout():
    st = volume_state(8, 1)
    with pytest.raises(ValueError):
        reference_mutual_information(st, 8, 8, 4, 1)


def test_realization_values_and_monotonicity():
    L, size, seps = 16, 4, (1, 4)
    sch = build_schedule(MetricSpec.btz(0.5, 0.5), L)
    cfg = CircuitConfig(L, sch, initial_state="volume", seed=21, references=True)
    wm = wedge_realization(cfg, size, seps)
    assert wm.value_counts[3] == 0
    assert set(np.unique(wm.sums)) <= {0, 1, 2}
    rec = run_trajectory(cfg)
    for e in rec.registry.entries:
        st = rec.state.copy()
        select_reference(st, rec.registry, e.layer, make_rng(derive_seed(cfg.seed, "select",
                                                                          e.layer)))
        ab = reference_mutual_information(st, e.ancilla, L, size, 2)
        a_only = np.array([mutual_information(st, [e.ancilla], RegionSpec(x, size).qubits(L))
                           for x in range(L)])
        assert np.all(ab >= a_only)


def test_final_layer_reference_inside_interval():
    L, size = 16, 4
    sch = build_schedule(MetricSpec.uniform(0.5), L, depth=3)
    cfg = CircuitConfig(L, sch, initial_state="volume", seed=2, references=True)
    rec = run_trajectory(cfg)
    last = rec.registry.entry(2)
    st = rec.state.copy()
    select_reference(st, rec.registry, 2, make_rng(0))
    vals = reference_mutual_information(st, last.ancilla, L, size, 3)
    for x in range(L):
        if (last.site - x) % L < size:
            assert vals[x] == 2


def test_wedge_map_needs_references():
    sch = build_schedule(MetricSpec.btz(0.5, 0.5), 16)
    with pytest.raises(ValueError, match="references"):
        wedge_realization(CircuitConfig(16, sch), 4, (2,))


def small_map(samples=3, master_seed=0):
    sch = build_schedule(MetricSpec.btz(0.5, 0.5), 16)
    cfg = CircuitConfig(16, sch, initial_state="volume", references=True)
    return wedge_map(cfg, 4, (1, 4), samples, master_seed=master_seed)


def test_wedge_merge_is_order_independent():
    parts = []
    sch = build_schedule(MetricSpec.btz(0.5, 0.5), 16)
    for j in range(3):
        cfg = CircuitConfig(16, sch, initial_state="volume", references=True,
                            seed=derive_seed(0, "wedge", j))
        parts.append(wedge_realization(cfg, 4, (1, 4)))
    a = parts[0].merge(parts[1]).merge(parts[2])
    b = parts[2].merge(parts[0].merge(parts[1]))
    full = small_map()
    for m in (a, b):
        assert np.array_equal(m.sums, full.sums) and np.array_equal(m.counts, full.counts)
        assert np.array_equal(m.value_counts, full.value_counts)


def test_wedge_map_statistics_and_outputs(tmp_path):
    wm = small_map(4)
    k = 1
    mean, err = wm.mean(k), wm.stderr(k)
    n = wm.counts[k]
    assert np.all(n <= 4)
    good = n > 1
    assert np.all((mean[good] >= 0) & (mean[good] <= 2))
    assert np.all(err[good] >= 0)
    wm.to_csv(tmp_path / "w.csv", k)
    lines = (tmp_path / "w.csv").read_text().splitlines()
    assert lines[0] == "x,t,mean_I,stderr,n"
    assert len(lines) == 1 + wm.T * wm.L
    wm.contours_json(tmp_path / "c.json")
    payload = json.loads((tmp_path / "c.json").read_text())
    assert payload["level"] == 0.75 and set(payload["contours"]) == {"1", "4"}


def test_display_grid_interpolates_gaps():
    wm = WedgeMap(4, 3, 1, (0,))
    wm.add(0, 0, np.array([0, 0, 2, 2]))
    wm.add(0, 2, np.array([2, 2, 0, 0]))
    g = wm.display_grid(0)
    assert np.allclose(g[1], [1, 1, 1, 1])
    assert np.isnan(wm.mean(0)[1]).all()


def test_region_count_topology():
    wm = WedgeMap(12, 4, 1, (0, 1))
    one = np.array([0, 0, 2, 2, 2, 2, 2, 2, 2, 0, 0, 0])
    two = np.array([0, 0, 2, 2, 0, 0, 0, 2, 2, 0, 0, 0])
    for t in range(4):
        wm.add(0, t, one)
        wm.add(1, t, two)
    assert wm.region_count(0) == 1
    assert wm.region_count(1) == 2
    # regions touching the grid edge give two open polylines each
    assert len(wm.contours(0)) == 2 and len(wm.contours(1)) == 4
