"""Hypothesis strategies for well-typed 2-cells over As."""

from hypothesis import strategies as st

from polyres.cellalg import Comp, Gen, Inv, Whisk, src1, tgt1
from polyres.core import Path, as_polygraph

AS = as_polygraph()
MU = Gen(AS.rule("mu"))


def a(n):
    return Path("x", ("a",) * n, "x") if n else Path("x")


@st.composite
def step_cells(draw, n):
    """A whiskered mu on a^n (n >= 2)."""
    k = draw(st.integers(0, n - 2))
    return Whisk(a(k), MU, a(n - 2 - k)) if (k or n - 2 - k) else MU


@st.composite
def chains(draw, n, max_steps=3):
    """A ⋆1-composite of forward and backward steps starting at a^n."""
    cur = n
    cell = None
    for _ in range(draw(st.integers(1, max_steps))):
        backward = cur < 2 or draw(st.booleans())
        if backward:
            c = Inv(draw(step_cells(cur + 1)))
            cur += 1
        else:
            c = draw(step_cells(cur))
            cur -= 1
        cell = c if cell is None else Comp(1, cell, c)
    return cell


@st.composite
def two_cells(draw, n=None, depth=2):
    n = draw(st.integers(1, 4)) if n is None else n
    choice = draw(st.integers(0, 3)) if depth > 0 else 0
    if choice == 0:
        return draw(chains(n))
    if choice == 1 and n >= 2:
        k = draw(st.integers(1, n - 1))
        return Comp(0, draw(two_cells(k, depth - 1)), draw(two_cells(n - k, depth - 1)))
    if choice == 2:
        x = draw(two_cells(n, depth - 1))
        y = draw(two_cells(len(tgt1(x).letters), depth - 1))
        return Comp(1, x, y)
    if choice == 3:
        x = draw(two_cells(n, depth - 1))
        return Comp(1, x, Inv(x))
    return draw(chains(n))


def width(x):
    return len(src1(x).letters)
