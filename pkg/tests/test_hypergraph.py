"""Container validation, text round-trips, and the structured generators."""

import numpy as np
import pytest

from hypercon import (
    Hypergraph,
    HypergraphFormatError,
    complete,
    complete_minus,
    degrees,
    generate,
    hypercycle,
    is_connected,
    loose_path,
    parse_hypergraph,
    s_path,
    squid,
    sunflower,
    write_hypergraph,
)


# ---------------------------------------------------------------- container


def test_constructor_rejects_low_uniformity():
    with pytest.raises(ValueError, match="k must be >= 3"):
        Hypergraph(4, 2, np.array([[0, 1]]))


def test_constructor_rejects_empty_vertex_set():
    with pytest.raises(ValueError, match="at least one vertex"):
        Hypergraph(0, 3, np.empty((0, 3), dtype=np.int64))


def test_constructor_rejects_bad_shape():
    with pytest.raises(ValueError, match="shape"):
        Hypergraph(5, 3, np.array([[0, 1, 2, 3]]))


def test_constructor_rejects_out_of_range_vertex():
    with pytest.raises(ValueError, match="out of range"):
        Hypergraph(3, 3, np.array([[0, 1, 3]]))


def test_constructor_rejects_unsorted_row():
    with pytest.raises(ValueError, match="strictly increasing"):
        Hypergraph(4, 3, np.array([[0, 2, 1]]))


def test_constructor_rejects_unsorted_rows():
    rows = np.array([[1, 2, 3], [0, 1, 2]])
    with pytest.raises(ValueError, match="lexicographic"):
        Hypergraph(4, 3, rows)


def test_constructor_rejects_duplicate_edge():
    rows = np.array([[0, 1, 2], [0, 1, 2]])
    with pytest.raises(ValueError, match="duplicate"):
        Hypergraph(4, 3, rows)


def test_from_edges_canonicalizes_order():
    H = Hypergraph.from_edges(5, 3, [(4, 2, 3), (2, 1, 0)])
    assert H.m == 2
    np.testing.assert_array_equal(H.edges, [[0, 1, 2], [2, 3, 4]])


def test_from_edges_rejects_repeated_vertex():
    with pytest.raises(ValueError, match="repeats"):
        Hypergraph.from_edges(5, 3, [(0, 1, 1)])


def test_equality_and_hash():
    A = Hypergraph.from_edges(4, 3, [(0, 1, 2)])
    B = Hypergraph.from_edges(4, 3, [(2, 1, 0)])
    C = Hypergraph.from_edges(4, 3, [(1, 2, 3)])
    assert A == B
    assert hash(A) == hash(B)
    assert A != C


def test_edges_are_read_only():
    H = Hypergraph.from_edges(4, 3, [(0, 1, 2)])
    with pytest.raises(ValueError):
        H.edges[0, 0] = 3


def test_degree_profile():
    H = complete_minus(10, 3)
    prof = degrees(H)
    # dropping the edge {1..k} lowers exactly those k degrees by one
    assert prof.min_degree == 35
    assert prof.max_degree == 36
    assert sorted(prof.degrees[:3]) == [35, 35, 35]
    assert all(d == 36 for d in prof.degrees[3:])
    assert prof.incidence[0] == tuple(
        i for i, e in enumerate(H.edges) if 0 in e
    )


def test_degree_profile_is_cached():
    H = complete(5, 3)
    assert degrees(H) is degrees(H)


# ------------------------------------------------------------- connectivity


def test_connected_single_edge():
    assert is_connected(Hypergraph.from_edges(3, 3, [(0, 1, 2)]))


def test_disconnected_two_islands():
    H = Hypergraph.from_edges(6, 3, [(0, 1, 2), (3, 4, 5)])
    assert not is_connected(H)


def test_isolated_vertex_disconnects():
    H = Hypergraph.from_edges(4, 3, [(0, 1, 2)])
    assert not is_connected(H)


def test_no_edges_single_vertex_counts_as_connected():
    H = Hypergraph.from_edges(1, 3, [])
    assert is_connected(H)


# ----------------------------------------------------------------- text IO


def test_round_trip_preserves_instance(tmp_path, rng):
    from conftest import random_connected

    H = random_connected(rng, 9, 4)
    path = tmp_path / "inst.txt"
    path.write_text(write_hypergraph(H))
    assert parse_hypergraph(path.read_text()) == H


def test_write_uses_one_based_indices():
    H = Hypergraph.from_edges(4, 3, [(0, 1, 3)])
    text = write_hypergraph(H)
    lines = text.splitlines()
    assert lines[0].split() == ["3", "4", "1"]
    assert lines[1].split() == ["1", "2", "4"]
    assert text.endswith("\n")


def test_parse_skips_comments_and_blank_lines():
    text = "# instance\n\n3 4 2\n1 2 3\n\n# tail\n2 3 4\n"
    H = parse_hypergraph(text)
    assert (H.n, H.k, H.m) == (4, 3, 2)


def test_parse_allows_edges_split_across_lines():
    H = parse_hypergraph("3 5 2\n1 2\n3 2 4\n5\n")
    np.testing.assert_array_equal(H.edges, [[0, 1, 2], [1, 3, 4]])


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("", "header"),
        ("3 4\n", "header"),
        ("x 4 1\n1 2 3\n", "header"),
        ("2 4 1\n1 2\n", "k must be >= 3"),
        ("3 0 1\n1 2 3\n", "sizes"),
        ("3 4 -1\n", "sizes"),
        ("3 4 2\n1 2 3\n", "expected 6 vertex tokens"),
        ("3 4 1\n1 2 3 4\n", "expected 3 vertex tokens"),
        ("3 4 1\n1 2 x\n", "integer"),
        ("3 4 1\n0 1 2\n", "range"),
        ("3 4 1\n1 2 5\n", "range"),
        ("3 4 1\n1 2 2\n", "repeat"),
        ("3 4 2\n1 2 3\n3 2 1\n", "duplicate"),
    ],
)
def test_parse_rejects_malformed_text(text, fragment):
    with pytest.raises(HypergraphFormatError, match=fragment):
        parse_hypergraph(text)


# --------------------------------------------------------------- generators


def test_sunflower_shape():
    H = sunflower(3, 2)
    assert (H.n, H.k, H.m) == (5, 3, 2)
    # all petals share vertex 0
    assert all(0 in e for e in H.edges)
    assert is_connected(H)


def test_hypercycle_shape():
    H = hypercycle(3, 3)
    assert (H.n, H.k, H.m) == (6, 3, 3)
    # every vertex lies on the cycle, so degrees are 1 or 2
    assert set(degrees(H).degrees.tolist()) <= {1, 2}
    assert is_connected(H)


def test_hypercycle_needs_three_edges():
    with pytest.raises(ValueError):
        hypercycle(3, 2)


def test_squid_shape():
    H = squid(3)
    assert (H.n, H.k, H.m) == (7, 3, 3)
    assert is_connected(H)


def test_s_path_shape():
    H = s_path(4, 2, 2)
    assert (H.n, H.k, H.m) == (6, 4, 2)
    # consecutive edges overlap in exactly s vertices
    assert len(set(H.edges[0]) & set(H.edges[1])) == 2
    assert is_connected(H)


def test_s_path_overlap_must_be_proper():
    with pytest.raises(ValueError):
        s_path(4, 4, 2)
    with pytest.raises(ValueError):
        s_path(4, 0, 2)
    with pytest.raises(ValueError):
        s_path(4, 2, 0)


def test_loose_path_is_unit_overlap_path():
    H = loose_path(3, 2)
    assert (H.n, H.k, H.m) == (5, 3, 2)
    assert H == s_path(3, 1, 2)


def test_complete_shape():
    H = complete(5, 3)
    assert (H.n, H.k, H.m) == (5, 3, 10)
    prof = degrees(H)
    assert prof.min_degree == prof.max_degree == 6


def test_complete_needs_n_at_least_k():
    with pytest.raises(ValueError):
        complete(3, 4)


def test_complete_minus_drops_first_edge():
    H = complete_minus(10, 3)
    assert (H.n, H.k, H.m) == (10, 3, 119)
    assert [0, 1, 2] not in H.edges.tolist()
    prof = degrees(complete_minus(9, 3))
    assert (prof.min_degree, prof.max_degree) == (27, 28)


def test_generate_dispatch():
    assert generate("sunflower", k=3, d=2) == sunflower(3, 2)
    assert generate("s_path", k=4, s=2, l=2) == s_path(4, 2, 2)
    assert generate("complete_minus", n=6, k=3) == complete_minus(6, 3)


def test_generate_rejects_unknown_kind():
    with pytest.raises(ValueError, match="unknown"):
        generate("torus", k=3)


def test_generate_rejects_missing_parameter():
    with pytest.raises(ValueError):
        generate("sunflower", k=3)
