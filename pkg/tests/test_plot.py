from cubeshape.cli import class_arcs
from cubeshape.enumeration import enumerate_oriented, to_unoriented
from cubeshape.plot import distance_to_pieces, parse_svg_paths, render_svg, split_pieces
from cubeshape.quad_geodesics import BinaryQuadraticForm as BQF, gl2_classes


def _arcs():
    return class_arcs([c.representative for c in gl2_classes(60)], 2000)


def test_empty_records_gives_arcs_only():
    text = render_svg([], _arcs())
    arcs, markers = parse_svg_paths(text)
    assert sorted(arcs) == ["D60#1", "D60#2"] and markers == []
    assert text.startswith("<?xml") and text.rstrip().endswith("</svg>")


def test_markers_on_arcs_and_determinism():
    recs = []
    for Q in (BQF(1, 8, 1), BQF(6, 18, 11), BQF(2, 10, 5), BQF(3, 12, 7)):
        recs += to_unoriented(enumerate_oriented(Q, 3 * 10**5, "maximal_only", threads=1), True, Q).records
    text = render_svg(recs, _arcs())
    assert text == render_svg(recs, _arcs())
    arcs, markers = parse_svg_paths(text)
    assert len(markers) == len(recs) > 0
    for cid, x, y in markers:
        assert distance_to_pieces((x, y), arcs[cid]) < 1.0


def test_split_pieces():
    pieces = split_pieces([0j, 0.01j, 0.02j, 1 + 0j, 1 + 0.01j, 3 + 0j])
    assert [len(p) for p in pieces] == [3, 2]
