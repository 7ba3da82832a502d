"""
The rightmost normalisation strategy in every dimension and the generating
cells of the resolution attached to critical n-fold branchings.

For a k-cell x (k >= 2) with target y, the star transform is

    x* = (((x ⋆1 σ*_{t1 x}) ⋆2 σ*_{t2 x}) ...) ⋆_{k-1} σ*_{y}

and σ*_x is a (k+1)-cell from x* to σ*_{s x}.  On words, σ* is the
rightmost rewriting sequence to the normal form.  The value of σ* on any
expression is reduced, through composites, inverses and the right
decomposition of whiskers, to its values on generators whiskered on the
right by a normal form.  Those are either identities (when the rightmost
step of the source is the generator's own last step) or the composite

    (g ŵ)-prefix ⋆ σ*(σ*(t(g) ŵ1) ŵ2)^-  ⋆  ω_{b1} ŵ2  ⋆  σ*(σ*(s(g) ŵ1) ŵ2)

where ŵ = ŵ1 ŵ2 is split at the end of the rightmost redex and b1 is the
critical branching extending the one of g.  The generating cell of a
critical branching b with parent c and extension word v̂ goes from
(ω_c v̂)* to σ*(s(ω_c) v̂); for order 2, ω_c is the first rule.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

from .branchings import CriticalBranching, critical_nfold
from .cellalg import (
    Comp,
    Gen,
    HigherGen,
    Id,
    Inv,
    Whisk,
    boundary,
    comp,
    dim_of,
    inv,
    lift,
    render,
    sequentialize0,
    src0,
    tgt0,
    whisk,
)
from .core import Path, Polygraph, Rule
from .errors import (
    DimBudgetExceeded,
    MissingLowerCells,
    NotConvergent,
    NotReduced,
)
from .rewriting import _engine, is_convergent, is_reduced, rightmost_trace

__all__ = [
    "ResolutionCell",
    "Resolution",
    "sigma",
    "star",
    "omega",
    "build_resolution",
    "cell_name",
    "resolution_report",
]


def cell_name(b: CriticalBranching) -> str:
    inner = ";".join(f"{r}@{pos}" for r, pos in b.key)
    return f"ω({inner})"


@dataclass(frozen=True)
class ResolutionCell:
    gen: HigherGen
    branching: CriticalBranching
    source: object
    target: object

    @property
    def name(self) -> str:
        return self.gen.name

    @property
    def dim(self) -> int:
        return self.gen.dim

    @property
    def expr(self) -> Gen:
        return Gen(self.gen)


class Resolution:
    """Generating cells of dimension 3..max_dim over a reduced convergent base."""

    def __init__(self, base: Polygraph, max_dim: int):
        self.base = base
        self.max_dim = max_dim
        self.cells = {d: [] for d in range(3, max_dim + 1)}
        self._by_key = {}
        self._by_name = {}
        self._strategy = _Strategy(self)

    def _add(self, cell: ResolutionCell):
        self.cells[cell.dim].append(cell)
        self._by_key[cell.branching.key] = cell
        self._by_name[cell.name] = cell

    def cell_for(self, key):
        return self._by_key.get(key)

    def cell_named(self, name):
        return self._by_name.get(name)

    def counts(self) -> dict:
        return {d: len(cs) for d, cs in sorted(self.cells.items())}

    def generators(self, dim: int) -> list:
        """Names of the generating cells of a dimension (0 = objects)."""
        p = self.base
        if dim == 0:
            return list(p.objects)
        if dim == 1:
            return [g.name for g in p.gens]
        if dim == 2:
            return [r.name for r in p.rules]
        return [c.name for c in self.cells.get(dim, [])]


class _Strategy:
    def __init__(self, R: Resolution):
        self.R = R
        self.p = R.base
        self.eng = _engine(R.base)
        self.word_memo = {}
        self.core_memo = {}
        self.star_memo = {}
        self.sstar_memo = {}

    # -- words

    def path(self, start, letters, end):
        letters = tuple(letters)
        return Path(start, letters, end) if letters else Path(start, (), start)

    def nf(self, w: Path) -> Path:
        return self.path(w.start, self.eng.normal(w.letters), w.end)

    def is_normal(self, w: Path) -> bool:
        return self.eng.rightmost(w.letters) is None

    def sigma_word(self, w: Path):
        """Rightmost rewriting sequence as a left-bracketed ⋆1 chain."""
        key = (w.start, w.letters)
        hit = self.word_memo.get(key)
        if hit is not None:
            return hit
        p = self.p
        result = None
        letters = w.letters
        for pos, name in rightmost_trace(p, w):
            rule = p.rule(name)
            n = len(rule.lhs.letters)
            left = self.path(w.start, letters[:pos], rule.lhs.start)
            right = self.path(rule.lhs.end, letters[pos + n:], w.end)
            step = whisk(left, Gen(rule), right)
            result = step if result is None else Comp(1, result, step)
            letters = letters[:pos] + rule.rhs.letters + letters[pos + n:]
        if result is None:
            result = Id(w)
        self.word_memo[key] = result
        return result

    # -- star transform

    def prefix(self, x):
        """x ⋆1 σ*_{t1 x} ⋆2 ... ⋆_{k-2} σ*_{t_{k-2} x}."""
        d = dim_of(x)
        y = x
        for j in range(1, d - 1):
            y = comp(j, y, lift(self.sstar(boundary(x, j, "target")), d))
        return y

    def star(self, x):
        d = dim_of(x)
        if d == 1:
            return x
        hit = self.star_memo.get(id(x))
        if hit is not None and hit[0] is x:
            return hit[1]
        result = comp(d - 1, self.prefix(x), lift(self.sstar(boundary(x, d - 1, "target")), d))
        self.star_memo[id(x)] = (x, result)
        return result

    # -- σ*

    def sstar(self, x):
        d = dim_of(x)
        if d == 1:
            return self.sigma_word(x)
        hit = self.sstar_memo.get(id(x))
        if hit is not None and hit[0] is x:
            return hit[1]
        result = self._sstar(x, d)
        self.sstar_memo[id(x)] = (x, result)
        return result

    def _sstar(self, x, d):
        if isinstance(x, Gen):
            return self.whisk_gen(Path(src0(x)), x, Path(tgt0(x)))
        if isinstance(x, Id):
            return lift(self.sstar(x.inner), d + 1)
        if isinstance(x, Comp):
            a, b, i = x.a, x.b, x.i
            if i == 0:
                return self.sstar(sequentialize0(x))
            if i == d - 1:
                return comp(d, comp(d - 1, lift(self.prefix(a), d + 1), self.sstar(b)), self.sstar(a))
            head = lift(self.prefix(boundary(a, i + 1, "source")), d + 1)
            return comp(i + 1, comp(i, head, self.sstar(b)), self.sstar(a))
        if isinstance(x, Inv):
            return comp(d - 1, lift(self.prefix(x), d + 1), inv(self.sstar(x.a)))
        if isinstance(x, Whisk):
            u, y, v = x.left, x.a, x.right
            if isinstance(y, Gen):
                return self.whisk_gen(u, y, v)
            if isinstance(y, Comp):
                if y.i == 0:
                    return self.sstar(whisk(u, sequentialize0(y), v))
                return self.sstar(Comp(y.i, whisk(u, y.a, v), whisk(u, y.b, v)))
            if isinstance(y, Inv):
                return self.sstar(Inv(whisk(u, y.a, v)))
            if isinstance(y, Id):
                return self.sstar(Id(whisk(u, y.inner, v), y.dim))
            if isinstance(y, Whisk):
                return self.sstar(whisk(u, y, v))
        raise TypeError(f"not a cell expression: {x!r}")

    def whisk_gen(self, u: Path, g: Gen, v: Path):
        """σ* of u·g·v by the right decomposition."""
        k = g.dim
        U = g.s1
        end = Path(v.end)
        if self.is_normal(v):
            vh = v
            head = None
        else:
            vh = self.nf(v)
            head = lift(whisk(u.concat(U), self.sigma_word(v), end), k + 1)
        core = self.core(g, vh)
        body = whisk(u, core, end)
        mid = u.concat(tgt_word(core))
        tail = lift(self.sigma_word(mid), k + 1)
        result = comp(1, body, tail)
        if head is not None:
            result = comp(1, head, result)
        return result

    def gen_key(self, g: Gen):
        if isinstance(g.g, Rule):
            return ((g.g.name, 0),)
        cell = self.R.cell_named(g.g.name)
        if cell is None:
            raise MissingLowerCells(f"{g.g.name} is not a cell of this resolution")
        return cell.branching.key

    def core(self, g: Gen, vh: Path):
        """σ* of g·vh for a generator g and a normal form vh."""
        memo_key = (g.g.name, vh.start, vh.letters)
        hit = self.core_memo.get(memo_key)
        if hit is not None:
            return hit
        p = self.p
        k = g.dim
        U = g.s1
        key = self.gen_key(g)
        last = key[-1]
        word = U.letters + vh.letters
        pos, rname = self.eng.rightmost(word)
        gv = whisk(Path(U.start), g, vh)
        if (rname, pos) == last:
            result = Id(self.star(gv), k + 1)
        else:
            n = len(U.letters)
            rend = pos + len(p.rule(rname).lhs.letters)
            if not (last[1] < pos < n < rend):
                raise NotConvergent(f"unexpected redex {rname}@{pos} on {'.'.join(word)}")
            cut = rend - n
            mid_obj = p.object_at(vh, cut)
            w1 = self.path(vh.start, vh.letters[:cut], mid_obj)
            w2 = self.path(mid_obj, vh.letters[cut:], vh.end)
            cell = self.R.cell_for(key + ((rname, pos),))
            if cell is None:
                if k + 1 > self.R.max_dim:
                    raise DimBudgetExceeded(f"needs generating cells of dimension {k + 1}")
                raise MissingLowerCells(f"no cell for branching {key + ((rname, pos),)}")
            src = boundary(g, k - 1, "source")
            tgt = boundary(g, k - 1, "target")
            x_t = whisk(Path(U.start), self.sstar(whisk(Path(U.start), tgt, w1)), w2)
            x_s = whisk(Path(U.start), self.sstar(whisk(Path(U.start), src, w1)), w2)
            first = comp(k - 1, lift(self.prefix(gv), k + 1), inv(self.sstar(x_t)))
            fill = whisk(Path(U.start), cell.expr, w2)
            after = tgt_word(fill)
            middle = comp(1, fill, lift(self.sigma_word(after), k + 1))
            result = comp(k, comp(k, first, middle), self.sstar(x_s))
        self.core_memo[memo_key] = result
        return result

    # -- generating cells

    def omega(self, b: CriticalBranching) -> ResolutionCell:
        p = self.p
        if b.order == 2:
            g = Gen(p.rule(b.steps[0].rule))
        else:
            parent = self.R.cell_for(b.parent.key)
            if parent is None:
                raise MissingLowerCells(f"no cell for the parent of {b}")
            g = parent.expr
        k = g.dim
        U = g.s1
        vh = p.subpath(b.source, len(U.letters), len(b.source.letters))
        start = Path(U.start)
        source = self.star(whisk(start, g, vh))
        target = self.sstar(whisk(start, boundary(g, k - 1, "source"), vh))
        gen = HigherGen(cell_name(b), k + 1, source, target)
        return ResolutionCell(gen, b, source, target)


def tgt_word(x) -> Path:
    return x if isinstance(x, Path) else x.t1


def _deep(fn, *args):
    limit = sys.getrecursionlimit()
    if limit < 20000:
        sys.setrecursionlimit(20000)
    try:
        return fn(*args)
    finally:
        sys.setrecursionlimit(limit)


def sigma(R: Resolution, e):
    """Strategy value on a cell: the rightmost rewriting sequence for a word,
    the star-form cell σ*_e in higher dimensions."""
    if dim_of(e) + 1 > R.max_dim + 1:
        raise DimBudgetExceeded(f"σ of a {dim_of(e)}-cell needs dimension {dim_of(e) + 1}")
    return _deep(R._strategy.sstar, e)


def star(R: Resolution, e):
    return _deep(R._strategy.star, e)


def omega(R: Resolution, b: CriticalBranching) -> ResolutionCell:
    if b.order + 1 > R.max_dim:
        raise DimBudgetExceeded(f"cells of dimension {b.order + 1} exceed {R.max_dim}")
    return _deep(R._strategy.omega, b)


def build_resolution(p: Polygraph, N: int) -> Resolution:
    if N < 2:
        raise ValueError("maximal dimension must be at least 2")
    if not is_reduced(p):
        raise NotReduced("the resolution is built on a reduced presentation; run reduce first")
    if not is_convergent(p):
        raise NotConvergent("the resolution needs a convergent presentation")
    R = Resolution(p, N)
    for d in range(3, N + 1):
        built = [omega(R, b) for b in critical_nfold(p, d - 1)]
        for cell in built:
            R._add(cell)
    return R


def resolution_report(R: Resolution) -> dict:
    return {
        "max_dim": R.max_dim,
        "counts": {str(d): n for d, n in R.counts().items()},
        "cells": [
            {
                "name": c.name,
                "dim": c.dim,
                "branching": {"rules": list(c.branching.rules), "positions": list(c.branching.positions)},
                "source": render(c.source),
                "target": render(c.target),
            }
            for d in sorted(R.cells)
            for c in R.cells[d]
        ],
    }
