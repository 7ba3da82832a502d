"""
Expression trees for cells of the free (n,1)-category on a polygraph and
its higher generators.

Cells of dimension 0 are object names, cells of dimension 1 are `Path`
values, and cells of dimension >= 2 are `CellExpr` nodes.  Typing checks
compare 1-dimensional boundaries (words) only; equality of higher cells is
never decided.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .core import Path, Rule
from .errors import BoundaryMismatch, DimMismatch, InvBelowDim2, TypingError

__all__ = [
    "HigherGen",
    "CellExpr",
    "Gen",
    "Id",
    "Comp",
    "Inv",
    "Whisk",
    "Sphere",
    "dim_of",
    "src1",
    "tgt1",
    "src0",
    "tgt0",
    "gen",
    "ident",
    "lift",
    "comp",
    "inv",
    "whisk",
    "boundary",
    "sequentialize0",
    "render",
    "parallel",
    "build",
]


@dataclass(frozen=True)
class HigherGen:
    name: str
    dim: int
    src: object
    tgt: object

    def __post_init__(self):
        if self.dim < 2:
            raise DimMismatch("higher generators have dimension at least 2")
        if dim_of(self.src) != self.dim - 1 or dim_of(self.tgt) != self.dim - 1:
            raise DimMismatch(f"boundaries of {self.name} must have dimension {self.dim - 1}")
        if not parallel(self.src, self.tgt):
            raise BoundaryMismatch(f"boundaries of {self.name} are not parallel")


class CellExpr:
    """Base class; subclasses cache `dim`, `s1` and `t1`."""

    __slots__ = ()


def dim_of(x) -> int:
    if isinstance(x, str):
        return 0
    if isinstance(x, Path):
        return 1
    return x.dim


def src1(x) -> Path:
    return x if isinstance(x, Path) else x.s1


def tgt1(x) -> Path:
    return x if isinstance(x, Path) else x.t1


def src0(x) -> str:
    return x if isinstance(x, str) else src1(x).start


def tgt0(x) -> str:
    return x if isinstance(x, str) else tgt1(x).end


@dataclass(frozen=True, eq=True)
class Gen(CellExpr):
    g: Union[Rule, HigherGen]
    dim: int = field(init=False, compare=False)
    s1: Path = field(init=False, compare=False, repr=False)
    t1: Path = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if isinstance(self.g, Rule):
            d, s, t = 2, self.g.lhs, self.g.rhs
        elif isinstance(self.g, HigherGen):
            d, s, t = self.g.dim, src1(self.g.src), tgt1(self.g.src)
            if d == 2:
                s, t = src1(self.g.src), src1(self.g.tgt)
        else:
            raise TypeError("Gen wraps a Rule or a HigherGen")
        object.__setattr__(self, "dim", d)
        object.__setattr__(self, "s1", s)
        object.__setattr__(self, "t1", t)

    @property
    def name(self):
        return self.g.name


@dataclass(frozen=True, eq=True)
class Id(CellExpr):
    inner: object
    dim: int = None
    s1: Path = field(init=False, compare=False, repr=False)
    t1: Path = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        d_in = dim_of(self.inner)
        if d_in < 1:
            raise DimMismatch("identities are taken on cells of dimension >= 1")
        if self.dim is None:
            object.__setattr__(self, "dim", d_in + 1)
        if self.dim <= d_in:
            raise DimMismatch("identity must raise the dimension")
        object.__setattr__(self, "s1", src1(self.inner))
        object.__setattr__(self, "t1", tgt1(self.inner))


@dataclass(frozen=True, eq=True)
class Comp(CellExpr):
    i: int
    a: object
    b: object
    dim: int = field(init=False, compare=False)
    s1: Path = field(init=False, compare=False, repr=False)
    t1: Path = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        da, db = dim_of(self.a), dim_of(self.b)
        if da != db or da < 2:
            raise DimMismatch(f"cannot compose cells of dimensions {da} and {db}")
        if not 0 <= self.i < da:
            raise DimMismatch(f"composition index {self.i} out of range for dimension {da}")
        a, b = self.a, self.b
        if self.i == 0:
            if tgt0(a) != src0(b):
                raise BoundaryMismatch(f"0-target {tgt0(a)} != 0-source {src0(b)}")
            s, t = src1(a).concat(src1(b)), tgt1(a).concat(tgt1(b))
        elif self.i == 1:
            if tgt1(a) != src1(b):
                raise BoundaryMismatch(f"1-target {tgt1(a)} != 1-source {src1(b)}")
            s, t = src1(a), tgt1(b)
        else:
            if src1(a) != src1(b) or tgt1(a) != tgt1(b):
                raise BoundaryMismatch(f"operands of a {self.i}-composition have different 1-boundaries")
            s, t = src1(a), tgt1(a)
        object.__setattr__(self, "dim", da)
        object.__setattr__(self, "s1", s)
        object.__setattr__(self, "t1", t)


@dataclass(frozen=True, eq=True)
class Inv(CellExpr):
    a: object
    dim: int = field(init=False, compare=False)
    s1: Path = field(init=False, compare=False, repr=False)
    t1: Path = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        d = dim_of(self.a)
        if d < 2:
            raise InvBelowDim2("only cells of dimension >= 2 are invertible")
        s, t = src1(self.a), tgt1(self.a)
        if d == 2:
            s, t = t, s
        object.__setattr__(self, "dim", d)
        object.__setattr__(self, "s1", s)
        object.__setattr__(self, "t1", t)


@dataclass(frozen=True, eq=True)
class Whisk(CellExpr):
    left: Path
    a: object
    right: Path
    dim: int = field(init=False, compare=False)
    s1: Path = field(init=False, compare=False, repr=False)
    t1: Path = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        d = dim_of(self.a)
        if d < 2:
            raise DimMismatch("whiskering applies to cells of dimension >= 2")
        try:
            s = self.left.concat(src1(self.a)).concat(self.right)
            t = self.left.concat(tgt1(self.a)).concat(self.right)
        except TypingError as exc:
            raise BoundaryMismatch(str(exc)) from None
        object.__setattr__(self, "dim", d)
        object.__setattr__(self, "s1", s)
        object.__setattr__(self, "t1", t)


@dataclass(frozen=True)
class Sphere:
    dim: int
    source: object
    target: object

    def __post_init__(self):
        if dim_of(self.source) != self.dim or dim_of(self.target) != self.dim:
            raise DimMismatch("sphere boundaries have the wrong dimension")
        if not parallel(self.source, self.target):
            raise BoundaryMismatch("sphere boundaries are not parallel")


def parallel(x, y) -> bool:
    """Structural parallelism: equal dimension and equal 1-boundaries (or
    equal endpoints for words)."""
    if dim_of(x) != dim_of(y):
        return False
    if dim_of(x) == 0:
        return True
    if dim_of(x) == 1:
        return (x.start, x.end) == (y.start, y.end)
    return src1(x) == src1(y) and tgt1(x) == tgt1(y)


# ---------------------------------------------------------------- smart builders

def gen(g) -> CellExpr:
    return Gen(g)


def ident(x, dim: int = None):
    return Id(x, dim)


def lift(x, dim: int):
    """x itself, or its iterated identity in dimension `dim`."""
    d = dim_of(x)
    if d == dim:
        return x
    if isinstance(x, Id):
        return Id(x.inner, dim)
    return Id(x, dim)


def is_identity(x) -> bool:
    return isinstance(x, Id)


def comp(i: int, a, b):
    """Composite dropping identity operands that are units for the i-composition."""
    if (isinstance(a, Id) and isinstance(b, Id) and a.dim == b.dim
            and dim_of(a.inner) == dim_of(b.inner) > i):
        return Id(Comp(i, a.inner, b.inner) if dim_of(a.inner) > 1 else _concat_ids(i, a, b), a.dim)
    if isinstance(b, Id) and dim_of(b.inner) <= i and dim_of(a) == b.dim:
        Comp(i, a, b)  # type check
        return a
    if isinstance(a, Id) and dim_of(a.inner) <= i and dim_of(b) == a.dim:
        Comp(i, a, b)
        return b
    return Comp(i, a, b)


def _concat_ids(i, a, b):
    Comp(i, a, b)  # type check
    return a.inner.concat(b.inner)


def inv(a):
    if isinstance(a, Id):
        return a
    if isinstance(a, Inv):
        return a.a
    return Inv(a)


def whisk(u: Path, a, v: Path):
    """u·a·v, concatenating when a is a word and merging nested whiskers."""
    if dim_of(a) == 1:
        return u.concat(a).concat(v)
    if not u.letters and not v.letters:
        if u.end != src0(a) or tgt0(a) != v.start:
            raise BoundaryMismatch("whisker endpoints do not match")
        return a
    if isinstance(a, Whisk):
        return Whisk(u.concat(a.left), a.a, a.right.concat(v))
    if isinstance(a, Id):
        return Id(whisk(u, a.inner, v), a.dim)
    return Whisk(u, a, v)


def build(node):
    """Construct from a nested tuple description:
    ("gen", g) | ("id", x[, dim]) | ("comp", i, a, b) | ("inv", a) | ("whisk", u, a, v).
    Leaves that are already cells are returned unchanged."""
    if not isinstance(node, tuple):
        return node
    tag, *args = node
    if tag == "gen":
        return Gen(args[0])
    if tag == "id":
        return Id(build(args[0]), *args[1:])
    if tag == "comp":
        return Comp(args[0], build(args[1]), build(args[2]))
    if tag == "inv":
        return Inv(build(args[0]))
    if tag == "whisk":
        return Whisk(args[0], build(args[1]), args[2])
    raise ValueError(f"unknown node tag {tag!r}")


# ---------------------------------------------------------------- boundaries

def boundary(e, i: int, side: str = "source"):
    if side not in ("source", "target"):
        raise ValueError("side is source or target")
    d = dim_of(e)
    if not 0 <= i < d:
        raise DimMismatch(f"no {i}-boundary for a cell of dimension {d}")
    if i == 0:
        return src0(e) if side == "source" else tgt0(e)
    if i == 1:
        return src1(e) if side == "source" else tgt1(e)
    if isinstance(e, Gen):
        g = e.g
        if i == d - 1:
            return g.src if side == "source" else g.tgt
        return boundary(g.src, i, side)
    if isinstance(e, Id):
        di = dim_of(e.inner)
        if i >= di:
            return lift(e.inner, i)
        return boundary(e.inner, i, side)
    if isinstance(e, Comp):
        if i < e.i:
            return boundary(e.a if side == "source" else e.b, i, side)
        if i == e.i:
            return boundary(e.a, i, "source") if side == "source" else boundary(e.b, i, "target")
        return Comp(e.i, boundary(e.a, i, side), boundary(e.b, i, side))
    if isinstance(e, Inv):
        if i == d - 1:
            return boundary(e.a, i, "target" if side == "source" else "source")
        return boundary(e.a, i, side)
    if isinstance(e, Whisk):
        return whisk(e.left, boundary(e.a, i, side), e.right)
    raise TypeError(f"not a cell expression: {e!r}")


# ---------------------------------------------------------------- exchange

def sequentialize0(e):
    """Replace every a ⋆0 b by (a·s1(b)) ⋆1 (t1(a)·b), left operand first."""
    if not isinstance(e, CellExpr):
        return e
    if isinstance(e, Gen):
        return e
    if isinstance(e, Id):
        inner = sequentialize0(e.inner)
        return e if inner is e.inner else Id(inner, e.dim)
    if isinstance(e, Inv):
        a = sequentialize0(e.a)
        return e if a is e.a else Inv(a)
    if isinstance(e, Whisk):
        a = sequentialize0(e.a)
        return e if a is e.a else Whisk(e.left, a, e.right)
    a, b = sequentialize0(e.a), sequentialize0(e.b)
    if e.i != 0:
        return e if (a is e.a and b is e.b) else Comp(e.i, a, b)
    left = whisk(Path(src0(a)), a, src1(b))
    right = whisk(tgt1(a), b, Path(tgt0(b)))
    return Comp(1, left, right)


# ---------------------------------------------------------------- rendering

def _render_word(w: Path) -> str:
    return "·".join(w.letters) if w.letters else f"1_{w.start}"


def render(e) -> str:
    if isinstance(e, str):
        return e
    if isinstance(e, Path):
        return _render_word(e)
    if isinstance(e, Gen):
        return e.g.name
    if isinstance(e, Id):
        return f"1({render(e.inner)})"
    if isinstance(e, Comp):
        return f"({render(e.a)} ⋆{e.i} {render(e.b)})"
    if isinstance(e, Inv):
        inner = render(e.a)
        if isinstance(e.a, Whisk):
            inner = f"({inner})"
        return f"{inner}^-"
    if isinstance(e, Whisk):
        inner = render(e.a)
        if isinstance(e.a, (Whisk, Inv)):
            inner = f"({inner})"
        parts = list(e.left.letters) + [inner] + list(e.right.letters)
        return "·".join(parts)
    raise TypeError(f"not a cell expression: {e!r}")
