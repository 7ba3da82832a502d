import pytest
from hypothesis import given, settings, strategies as st

from cells import MU, a, two_cells
from polyres.cellalg import Comp, Id, Inv, Whisk, sequentialize0, src1, tgt1
from polyres.core import Gen1, MultiplicationTable, Path, Polygraph, TerminationSpec, as_polygraph, epi, reduced_standard
from polyres.errors import DegreeOutOfRange, MissingCells
from polyres.homology import (
    NatElem,
    bracket,
    delta,
    derivation,
    homotopy,
    normal_words,
    syzygy_generators,
    unit,
    verify_complex,
)
from polyres.resolution import build_resolution, sigma

AS = as_polygraph()
X = a(0)


@pytest.fixture(scope="module")
def R():
    return build_resolution(AS, 5)


def terms(x):
    return x.as_dict()


def test_derivation_of_aaa():
    d = derivation(AS, a(3))
    assert terms(d) == {(X, "a", a(1)): 1, (a(1), "a", a(1)): 1, (a(1), "a", X): 1}
    assert derivation(AS, X).is_zero()


def test_bracket_of_source_of_alpha(R):
    e = Comp(1, Whisk(X, MU, a(1)), MU)
    assert terms(bracket(R, e)) == {(X, "mu", a(1)): 1, (X, "mu", X): 1}
    assert bracket(R, Id(a(2))).is_zero()


def test_delta_as(R):
    alpha, aleph, omega5 = R.cells[3][0].name, R.cells[4][0].name, R.cells[5][0].name
    assert terms(delta(R, unit(R, 3, alpha))) == {(X, "mu", a(1)): 1, (a(1), "mu", X): -1}
    assert terms(delta(R, unit(R, 4, aleph))) == {(a(1), alpha, X): 1, (X, alpha, X): -1, (X, alpha, a(1)): 1}
    assert terms(delta(R, unit(R, 5, omega5))) == {(X, aleph, a(1)): 1, (a(1), aleph, X): -1}


def test_delta_low_degrees(R):
    d1 = delta(R, unit(R, 1, "a"))
    assert terms(d1) == {(a(1), "x", X): 1, (X, "x", a(1)): -1}
    assert delta(R, d1) == 0
    assert delta(R, unit(R, 0, "x")) == 1
    d2 = delta(R, unit(R, 2, "mu"))
    assert terms(d2) == {(X, "a", a(1)): 1, (a(1), "a", X): 1, (X, "a", X): -1}


def test_homotopy_examples(R):
    pair = NatElem.make(0, a(1), {(X, "x", a(1)): 1})
    assert terms(homotopy(R, pair)) == {(X, "a", X): -1}
    assert terms(homotopy(R, unit(R, 1, "a", X, a(1)))) == {(X, "mu", X): 1}
    assert homotopy(R, unit(R, 1, "a")).is_zero()
    assert terms(homotopy(R, 3, a(1))) == {(a(1), "x", X): 3}


def test_syzygies(R):
    (z,) = syzygy_generators(R, 2)
    assert str(z) == "[mu]a - a[mu]"
    free = Polygraph(("x",), (Gen1("a", "x", "x"),), (), TerminationSpec("length"))
    assert syzygy_generators(build_resolution(free, 4), 3) == []


def test_errors(R):
    with pytest.raises(DegreeOutOfRange):
        syzygy_generators(R, 1)
    with pytest.raises(MissingCells):
        syzygy_generators(R, 5)
    with pytest.raises(MissingCells):
        homotopy(build_resolution(AS, 3), unit(R, 3, R.cells[3][0].name))


def test_json_schema(R):
    (z,) = syzygy_generators(R, 2)
    assert z.to_json() == {
        "degree": 2,
        "component": "a",
        "terms": [
            {"coeff": 1, "left": [], "gen": "mu", "right": ["a"]},
            {"coeff": -1, "left": ["a"], "gen": "mu", "right": []},
        ],
    }


def test_arithmetic(R):
    x = unit(R, 2, "mu", X, a(1))
    assert (x - x).is_zero()
    assert (x + x) == x.scale(2)
    assert str(-x) == "-[mu]a"
    assert str(x.scale(3) - unit(R, 2, "mu", a(1), X)) == "3[mu]a - a[mu]"


def test_normal_words():
    ws = normal_words(AS, 3)
    assert ws == [X, a(1)]


Z2 = reduced_standard(MultiplicationTable.monoid(["1", "a"], "1", {("a", "a"): "1"}))
LZ = reduced_standard(MultiplicationTable.monoid(
    ["1", "a", "b"], "1", {("a", "a"): "a", ("a", "b"): "b", ("b", "a"): "a", ("b", "b"): "b"}))


@pytest.mark.parametrize("name,p,N", [
    ("as", AS, 5),
    ("epi4", epi(4), 4),
    ("epi5", epi(5), 4),
    ("z2", Z2, 4),
    ("lz", LZ, 4),
])
def test_verify_complex(name, p, N):
    report = verify_complex(build_resolution(p, N), N, 2)
    assert report.passed, [c for c in report.checks if not c.passed]
    assert all(c.checked > 0 for c in report.checks if c.name.startswith("homotopy"))


def test_verify_complex_jobs():
    report = verify_complex(build_resolution(epi(4), 4), 4, 2, jobs=4)
    assert report.passed


@settings(max_examples=80, deadline=None)
@given(two_cells())
def test_bracket_invariant_under_sequentialize0(e):
    R3 = build_resolution(AS, 3)
    assert bracket(R3, e) == bracket(R3, sequentialize0(e))


@settings(max_examples=60, deadline=None)
@given(two_cells(n=2), st.data())
def test_bracket_invariant_under_reassociation(x, data):
    R3 = build_resolution(AS, 3)
    y = data.draw(two_cells(n=len(tgt1(x).letters)))
    z = data.draw(two_cells(n=len(tgt1(y).letters)))
    assert bracket(R3, Comp(1, Comp(1, x, y), z)) == bracket(R3, Comp(1, x, Comp(1, y, z)))
    assert bracket(R3, Inv(x)) == -bracket(R3, x)


def _closed(R3, x, y):
    """x and y re-aimed at the normal form, then glued into a loop."""
    xs = Comp(1, x, sigma(R3, tgt1(x))) if len(tgt1(x).letters) > 1 else x
    ys = Comp(1, y, sigma(R3, tgt1(y))) if len(tgt1(y).letters) > 1 else y
    return Comp(1, xs, Inv(ys))


@settings(max_examples=60, deadline=None)
@given(two_cells(n=3), two_cells(n=3), two_cells(n=3), two_cells(n=3), two_cells(n=3))
def test_closed_cells_commute_after_abelianisation(x, y, u, v, k):
    R3 = build_resolution(AS, 3)
    f, g = _closed(R3, x, y), _closed(R3, u, v)
    assert src1(f) == tgt1(f) == a(3)
    assert bracket(R3, Comp(1, f, g)) == bracket(R3, Comp(1, g, f))
    conj = Comp(1, Comp(1, Inv(k), f), k)
    assert src1(conj) == tgt1(conj)
    assert bracket(R3, conj) == bracket(R3, f)


def test_closed_cell_with_nonzero_bracket():
    R3 = build_resolution(AS, 3)
    x = Comp(1, Whisk(X, MU, a(1)), MU)
    y = Comp(1, Whisk(a(1), MU, X), MU)
    assert str(bracket(R3, _closed(R3, x, y))) == "[mu]a - a[mu]"
