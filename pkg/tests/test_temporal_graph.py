import itertools
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bopim.errors import EmptyInput, InvalidT, MalformedLine
from bopim.temporal_graph import (
    ContactList,
    TemporalGraph,
    aggregate,
    aggregate_degrees,
    load_graph,
    parse_contacts,
    synthetic_proximity_graph,
    window_index,
)


def test_parse_two_contacts():
    c = parse_contacts("0 1 5\n1 2 7")
    assert len(c) == 2
    assert set(c.node_ids.tolist()) == {0, 1, 2}
    assert c.t.tolist() == [5, 7]


def test_parse_empty_raises():
    with pytest.raises(EmptyInput):
        parse_contacts("")


def test_parse_only_comments_raises():
    with pytest.raises(EmptyInput):
        parse_contacts("# header\n\n")


def test_self_loop_dropped_and_reported():
    c = parse_contacts("3 3 1\n0 1 2")
    assert len(c) == 1
    assert c.report.self_loops == 1
    assert (c.u[0], c.v[0]) == (0, 1)


def test_comments_and_blanks_counted():
    c = parse_contacts("# a comment\n\n0 1 2\n   \n")
    assert c.report.comments == 1
    assert c.report.blank == 2
    assert c.report.contacts == 1


@pytest.mark.parametrize(
    "text,lineno",
    [("0 1 2\n0 x 3", 2), ("0 1 t", 1), ("0 1", 1), ("0 -1 4", 1)],
)
def test_malformed_line_reports_line_number(text, lineno):
    with pytest.raises(MalformedLine) as info:
        parse_contacts(text)
    assert info.value.lineno == lineno


def test_column_order_remap():
    c = parse_contacts("5 0 1\n7 1 2", columns="t u v")
    assert c.u.tolist() == [0, 1]
    assert c.v.tolist() == [1, 2]
    assert c.t.tolist() == [5, 7]


def test_float_timestamps():
    c = parse_contacts("0 1 0.5\n1 2 2.25")
    assert c.t.dtype == np.float64
    G = aggregate(c, 2)
    assert [len(s) for s in G.snapshots] == [1, 1]


def test_equal_width_split_ten_steps():
    text = "\n".join(f"{i % 4} {(i % 4) + 1} {i}" for i in range(10))
    G = aggregate(parse_contacts(text), 2)
    # windows [0, 5) and [5, 9]
    idx = window_index(np.arange(10), 2)
    assert idx.tolist() == [0] * 5 + [1] * 5
    assert G.total_contacts == 8  # pairs repeat inside each window
    assert {tuple(e) for e in G.snapshots[0]} == {(0, 1), (1, 2), (2, 3), (3, 4)}


def test_last_window_closed_at_tmax():
    assert window_index(np.array([0, 3, 6, 9]), 3).tolist() == [0, 1, 2, 2]


def test_single_contact_single_snapshot():
    G = aggregate(parse_contacts("2 4 100"), 1)
    assert G.T == 1
    assert G.n == 5
    assert G.snapshots[0].tolist() == [[2, 4]]


def test_invalid_T():
    c = parse_contacts("0 1 1")
    with pytest.raises(InvalidT):
        aggregate(c, 0)


def test_degenerate_range_warns_and_fills_first_snapshot():
    c = parse_contacts("0 1 4\n1 2 4")
    with pytest.warns(RuntimeWarning):
        G = aggregate(c, 3)
    assert [len(s) for s in G.snapshots] == [2, 0, 0]


def test_no_warning_for_single_snapshot_degenerate_range():
    c = parse_contacts("0 1 4")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        aggregate(c, 1)


def test_n_hint_extends_node_count():
    c = parse_contacts("0 1 4", n_hint=7)
    assert aggregate(c, 1).n == 7


def test_snapshot_dedup_and_symmetrize():
    G = TemporalGraph.from_snapshots(3, [[(1, 0), (0, 1), (2, 1)]])
    assert G.snapshots[0].tolist() == [[0, 1], [1, 2]]


def test_snapshots_are_read_only():
    G = TemporalGraph.from_snapshots(3, [[(0, 1)]])
    with pytest.raises(ValueError):
        G.snapshots[0][0, 0] = 2


def test_star_degrees():
    G = TemporalGraph.from_snapshots(6, [[(0, j) for j in range(1, 6)]])
    assert aggregate_degrees(G).tolist() == [5, 1, 1, 1, 1, 1]


def test_union_dedupes_repeated_edge():
    G = TemporalGraph.from_snapshots(2, [[(0, 1)], [(0, 1)]])
    assert aggregate_degrees(G).tolist() == [1, 1]
    assert G.m == 1


def test_degrees_match_materialized_union():
    rng = np.random.default_rng(3)
    for _ in range(20):
        snaps = [
            [(int(a), int(b)) for a, b in rng.integers(0, 10, size=(rng.integers(0, 15), 2)) if a != b]
            for _ in range(3)
        ]
        G = TemporalGraph.from_snapshots(10, snaps)
        union = {frozenset(e) for s in snaps for e in s}
        expected = [sum(1 for e in union if j in e) for j in range(10)]
        assert aggregate_degrees(G).tolist() == expected
        assert G.m == len(union)


def test_load_graph_relabels_sparse_ids(tmp_path):
    p = tmp_path / "c.txt"
    p.write_text("10 30 0\n30 20 1\n")
    G, labels = load_graph(p, 2)
    assert labels.tolist() == [10, 20, 30]
    assert G.n == 3
    assert {tuple(e) for s in G.snapshots for e in s} == {(0, 2), (1, 2)}


def test_load_graph_dense_ids_keep_labels(tmp_path):
    p = tmp_path / "c.txt"
    p.write_text("0 1 0\n1 2 1\n")
    G, labels = load_graph(p, 1)
    assert labels.tolist() == [0, 1, 2]


def test_synthetic_fixture_shape():
    G = synthetic_proximity_graph(64, 10, seed=0)
    assert (G.n, G.T) == (64, 10)
    assert G.m >= max(len(s) for s in G.snapshots)
    d = aggregate_degrees(G)
    assert d.sum() == 2 * G.m
    assert d.max() > 2 * np.median(d)  # heterogeneous degrees


contacts_st = st.lists(
    st.tuples(st.integers(0, 8), st.integers(0, 8), st.integers(0, 40)).filter(lambda c: c[0] != c[1]),
    min_size=1,
    max_size=40,
)


def _contact_list(rows):
    u, v, t = (np.array(col, dtype=np.int64) for col in zip(*rows))
    return ContactList(u, v, t)


@settings(max_examples=60, deadline=None)
@given(contacts_st, st.integers(1, 6), st.randoms(use_true_random=False))
def test_aggregate_is_order_invariant(rows, T, rnd):
    shuffled = list(rows)
    rnd.shuffle(shuffled)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        assert aggregate(_contact_list(rows), T) == aggregate(_contact_list(shuffled), T)


@settings(max_examples=60, deadline=None)
@given(contacts_st, st.integers(1, 6), st.integers(1, 6))
def test_union_edges_do_not_depend_on_T(rows, T1, T2):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        G1 = aggregate(_contact_list(rows), T1)
        G2 = aggregate(_contact_list(rows), T2)
    assert np.array_equal(G1.union_edges(), G2.union_edges())
    assert aggregate_degrees(G1).sum() == 2 * G1.m


@settings(max_examples=60, deadline=None)
@given(contacts_st, st.integers(1, 6))
def test_every_contact_lands_in_one_window(rows, T):
    c = _contact_list(rows)
    idx = window_index(c.t, T)
    assert idx.min() >= 0 and idx.max() < T
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        G = aggregate(c, T)
    for (u, v), w in zip(zip(c.u, c.v), idx):
        assert (min(u, v), max(u, v)) in {tuple(e) for e in G.snapshots[w]}
    for s in G.snapshots:
        assert np.all(s[:, 0] < s[:, 1])
        assert len({tuple(e) for e in s}) == len(s)


def test_contact_pairs_exhaustive_small():
    # every pair of a 4-clique in one window
    rows = [(a, b, 0) for a, b in itertools.combinations(range(4), 2)]
    G = aggregate(_contact_list(rows), 1)
    assert G.m == 6
    assert aggregate_degrees(G).tolist() == [3, 3, 3, 3]
