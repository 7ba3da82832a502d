"""
Free natural systems on the presented category, abelianisation of cells,
the Reidemeister-Fox-Squier boundary maps, the contracting homotopy and the
generators of homological syzygies.

An element of degree k is an integer combination of triples u[g]v where g
is a generating k-cell (an object in degree 0) and u, v are normal forms.
Every triple of an element lies over the same 1-cell of the category, its
component.

The contracting homotopy is right-handed, matching the rightmost strategy
used to build the resolution:

    σ_{-1}(1) = (w, 1)        σ_0(u, v) = -u[v]        σ_k(u[g]v) = u[σ*(g v)]
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .cellalg import Comp, Gen, Id, Inv, Whisk, dim_of, src1, tgt1
from .core import Path, Polygraph
from .errors import (
    DegreeOutOfRange,
    DimBudgetExceeded,
    MissingCells,
    MissingLowerCells,
    NotConvergent,
    TypingError,
)
from .resolution import Resolution, _deep
from .rewriting import _engine, is_convergent

__all__ = [
    "NatElem",
    "bracket",
    "derivation",
    "delta",
    "augmentation",
    "homotopy",
    "unit",
    "syzygy_generators",
    "verify_complex",
    "CheckResult",
    "VerifyReport",
    "normal_words",
]


def _sort_key(item):
    (left, g, right), _ = item
    return (left.letters, g, right.letters)


@dataclass(frozen=True)
class NatElem:
    degree: int
    component: Path
    terms: tuple = ()  # (((left, gen, right), coeff), ...), sorted, non-zero

    @classmethod
    def make(cls, degree: int, component: Path, coeffs: dict) -> "NatElem":
        items = tuple(sorted(((k, c) for k, c in coeffs.items() if c), key=_sort_key))
        return cls(degree, component, items)

    def as_dict(self) -> dict:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other):
        if self.degree != other.degree or self.component != other.component:
            raise TypingError("elements of different degree or component")

    def __add__(self, other):
        self._check(other)
        acc = self.as_dict()
        for k, c in other.terms:
            acc[k] = acc.get(k, 0) + c
        return NatElem.make(self.degree, self.component, acc)

    def __neg__(self):
        return NatElem(self.degree, self.component, tuple((k, -c) for k, c in self.terms))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, n: int) -> "NatElem":
        return NatElem.make(self.degree, self.component, {k: n * c for k, c in self.terms})

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "component": _word_text(self.component),
            "terms": [
                {"coeff": c, "left": list(l.letters), "gen": g, "right": list(r.letters)}
                for (l, g, r), c in self.terms
            ],
        }

    def __str__(self):
        if not self.terms:
            return "0"
        out = []
        for n, ((l, g, r), c) in enumerate(self.terms):
            if self.degree == 0:
                body = f"({_word_text(l)},{_word_text(r)})"
            else:
                body = "·".join(l.letters) + f"[{g}]" + "·".join(r.letters)
            mag = abs(c)
            text = body if mag == 1 else f"{mag}{body}"
            if n == 0:
                out.append(text if c > 0 else f"-{text}")
            else:
                out.append(f" + {text}" if c > 0 else f" - {text}")
        return "".join(out)


def _word_text(w: Path) -> str:
    return ".".join(w.letters) if w.letters else f"1@{w.start}"


# ---------------------------------------------------------------- helpers

class _Ctx:
    """Normal forms and context actions over a convergent base."""

    def __init__(self, p: Polygraph):
        self.p = p
        self.eng = _engine(p)

    def nf(self, w: Path) -> Path:
        letters = self.eng.normal(w.letters)
        return Path(w.start, letters, w.end) if letters else Path(w.start)

    def act(self, u: Path, acc: dict, v: Path, out: dict, scale: int = 1):
        """out += scale * (u, v)·acc."""
        ul, vl = bool(u.letters), bool(v.letters)
        for (l, g, r), c in acc.items():
            if ul:
                l = self.nf(u.concat(l))
            if vl:
                r = self.nf(r.concat(v))
            key = (l, g, r)
            out[key] = out.get(key, 0) + scale * c

    def word(self, letters, start=None) -> Path:
        if not letters:
            return Path(start)
        return self.p.path(letters)


def _ctx(p: Polygraph) -> _Ctx:
    c = p._cache.get("natctx")
    if c is None:
        if not is_convergent(p):
            raise NotConvergent("natural systems need a convergent presentation")
        c = _Ctx(p)
        p._cache["natctx"] = c
    return c


def _base(R) -> Polygraph:
    return R.base if isinstance(R, Resolution) else R


def _derivation_dict(cx: _Ctx, w: Path) -> dict:
    p = cx.p
    out = {}
    letters = w.letters
    for i, a in enumerate(letters):
        left = cx.nf(p.subpath(w, 0, i))
        right = cx.nf(p.subpath(w, i + 1, len(letters)))
        key = (left, a, right)
        out[key] = out.get(key, 0) + 1
    return out


def derivation(p: Polygraph, w: Path) -> NatElem:
    """[w] = sum of the letters of w in their (normalised) contexts."""
    cx = _ctx(p)
    return NatElem.make(1, cx.nf(w), _derivation_dict(cx, w))


def _bracket_dict(cx: _Ctx, e, memo: dict) -> dict:
    hit = memo.get(id(e))
    if hit is not None and hit[0] is e:
        return hit[1]
    if isinstance(e, Path):
        out = _derivation_dict(cx, e)
    elif isinstance(e, Gen):
        s = src1(e)
        out = {(Path(s.start), e.g.name, Path(s.end)): 1}
    elif isinstance(e, Id):
        out = {}
    elif isinstance(e, Inv):
        out = {k: -c for k, c in _bracket_dict(cx, e.a, memo).items()}
    elif isinstance(e, Whisk):
        out = {}
        cx.act(e.left, _bracket_dict(cx, e.a, memo), e.right, out)
    elif isinstance(e, Comp):
        a = _bracket_dict(cx, e.a, memo)
        b = _bracket_dict(cx, e.b, memo)
        out = {}
        if e.i == 0:
            cx.act(Path(tgt1(e.a).start), a, cx.nf(src1(e.b)), out)
            cx.act(cx.nf(tgt1(e.a)), b, Path(src1(e.b).end), out)
        else:
            for src in (a, b):
                for k, c in src.items():
                    out[k] = out.get(k, 0) + c
        out = {k: c for k, c in out.items() if c}
    else:
        raise TypeError(f"not a cell: {e!r}")
    memo[id(e)] = (e, out)
    return out


def bracket(R, e) -> NatElem:
    """Abelianisation of a cell of dimension k >= 1 (the derivation for words)."""
    cx = _ctx(_base(R))
    d = dim_of(e)
    if d < 1:
        raise DegreeOutOfRange("bracket applies to cells of dimension >= 1")
    return NatElem.make(d, cx.nf(src1(e)), _bracket_dict(cx, e, {}))


# ---------------------------------------------------------------- boundaries

def _memo(R, name):
    store = R._cache if isinstance(R, Polygraph) else R.__dict__.setdefault("_homology_cache", {})
    return store.setdefault(name, {})


def _gen_boundary(R, degree: int, g: str) -> dict:
    """δ of the unit triple 1[g]1, as a coefficient dict."""
    memo = _memo(R, "delta")
    hit = memo.get((degree, g))
    if hit is not None:
        return hit
    p = _base(R)
    cx = _ctx(p)
    if degree == 1:
        x = p.gen(g)
        out = {
            (Path(x.src, (g,), x.tgt), x.tgt, Path(x.tgt)): 1,
            (Path(x.src), x.src, Path(x.src, (g,), x.tgt)): -1,
        }
        # contexts are normal forms; a single letter may reduce
        fixed = {}
        for (l, o, r), c in out.items():
            key = (cx.nf(l), o, cx.nf(r))
            fixed[key] = fixed.get(key, 0) + c
        out = {k: c for k, c in fixed.items() if c}
    elif degree == 2:
        rule = p.rule(g)
        out = dict(_derivation_dict(cx, rule.lhs))
        for k, c in _derivation_dict(cx, rule.rhs).items():
            out[k] = out.get(k, 0) - c
        out = {k: c for k, c in out.items() if c}
    else:
        cell = R.cell_named(g) if isinstance(R, Resolution) else None
        if cell is None or cell.dim != degree:
            raise MissingCells(f"no generating {degree}-cell named {g}")
        memo_b = {}
        out = dict(_bracket_dict(cx, cell.source, memo_b))
        for k, c in _bracket_dict(cx, cell.target, memo_b).items():
            out[k] = out.get(k, 0) - c
        out = {k: c for k, c in out.items() if c}
    memo[(degree, g)] = out
    return out


def augmentation(x: NatElem) -> int:
    if x.degree != 0:
        raise DegreeOutOfRange("the augmentation is defined in degree 0")
    return sum(c for _, c in x.terms)


def delta(R, x: NatElem):
    """Boundary map; returns an integer (the augmentation) in degree 0."""
    k = x.degree
    if k == 0:
        return augmentation(x)
    if k < 0:
        raise DegreeOutOfRange("negative degree")
    if isinstance(R, Resolution) and k > R.max_dim:
        raise DegreeOutOfRange(f"degree {k} exceeds the resolution dimension {R.max_dim}")
    if not isinstance(R, Resolution) and k > 2:
        raise DegreeOutOfRange("degrees above 2 need a resolution")
    cx = _ctx(_base(R))
    out = {}
    for (l, g, r), c in x.terms:
        cx.act(l, _gen_boundary(R, k, g), r, out, c)
    return NatElem.make(k - 1, x.component, out)


# ---------------------------------------------------------------- homotopy

def _gen_homotopy(R: Resolution, degree: int, g: str, v: Path) -> dict:
    """[σ*(g v)] for a generator g of the given degree and a normal form v."""
    memo = _memo(R, "homotopy")
    key = (degree, g, v.start, v.letters)
    hit = memo.get(key)
    if hit is not None:
        return hit
    p = R.base
    cx = _ctx(p)
    strat = R._strategy
    try:
        if degree == 1:
            x = p.gen(g)
            cell = strat.sigma_word(Path(x.src, (g,), x.tgt).concat(v))
        else:
            if degree == 2:
                gen = Gen(p.rule(g))
            else:
                c = R.cell_named(g)
                if c is None:
                    raise MissingCells(f"no generating cell named {g}")
                gen = c.expr
            cell = _deep(strat.whisk_gen, Path(gen.s1.start), gen, v)
    except (DimBudgetExceeded, MissingLowerCells) as exc:
        raise MissingCells(str(exc)) from None
    out = _bracket_dict(cx, cell, {})
    memo[key] = out
    return out


def homotopy(R: Resolution, x, component: Path = None) -> NatElem:
    """Contracting homotopy; an integer input is read in degree -1 at `component`."""
    p = R.base
    cx = _ctx(p)
    if isinstance(x, int):
        if component is None:
            raise DegreeOutOfRange("degree -1 input needs a component")
        w = cx.nf(component)
        return NatElem.make(0, w, {(w, w.end, Path(w.end)): x})
    k = x.degree
    if k < 0:
        raise DegreeOutOfRange("negative degree")
    if k + 1 > R.max_dim:
        raise MissingCells(f"σ_{k} needs generating cells of dimension {k + 1}")
    out = {}
    for (u, g, v), c in x.terms:
        if k == 0:
            cx.act(u, _derivation_dict(cx, v), Path(v.end), out, -c)
        else:
            cx.act(u, _gen_homotopy(R, k, g, v), Path(v.end), out, c)
    return NatElem.make(k + 1, x.component, out)


# ---------------------------------------------------------------- generators

def _gen_image(R, degree: int, g: str) -> Path:
    """The 1-cell of a generator (an identity for objects)."""
    p = _base(R)
    if degree == 0:
        return Path(g)
    if degree == 1:
        x = p.gen(g)
        return Path(x.src, (g,), x.tgt)
    if degree == 2:
        return p.rule(g).lhs
    cell = R.cell_named(g)
    if cell is None:
        raise MissingCells(f"no generating cell named {g}")
    return src1(cell.source)


def unit(R, degree: int, g: str, left: Path = None, right: Path = None) -> NatElem:
    """The basis element left[g]right (contexts are normalised)."""
    p = _base(R)
    cx = _ctx(p)
    img = _gen_image(R, degree, g)
    left = Path(img.start) if left is None else cx.nf(left)
    right = Path(img.end) if right is None else cx.nf(right)
    comp_word = cx.nf(left.concat(img).concat(right))
    return NatElem.make(degree, comp_word, {(left, g, right): 1})


def syzygy_generators(R: Resolution, n: int) -> list:
    if n < 2:
        raise DegreeOutOfRange("syzygies start in degree 2")
    if n + 1 > R.max_dim:
        raise MissingCells(f"degree {n} syzygies need cells of dimension {n + 1}")
    out = []
    for cell in R.cells[n + 1]:
        z = delta(R, unit(R, n + 1, cell.name))
        assert delta(R, z).is_zero(), f"{cell.name}: boundary is not a cycle"
        out.append(z)
    return out


# ---------------------------------------------------------------- verification

def normal_words(p: Polygraph, max_len: int) -> list:
    """All normal forms of length <= max_len, identities included."""
    eng = _engine(p)
    by_src = {}
    for g in p.gens:
        by_src.setdefault(g.src, []).append(g)
    out = [Path(o) for o in p.objects]
    frontier = []
    for g in p.gens:
        w = Path(g.src, (g.name,), g.tgt)
        if eng.rightmost(w.letters) is None:
            frontier.append(w)
    length = 1
    while frontier and length <= max_len:
        out.extend(frontier)
        nxt = []
        for w in frontier:
            for g in by_src.get(w.end, ()):
                letters = w.letters + (g.name,)
                if eng.rightmost(letters) is None:
                    nxt.append(Path(w.start, letters, g.tgt))
        frontier = nxt
        length += 1
    return out


@dataclass
class CheckResult:
    name: str
    passed: bool
    checked: int = 0
    witnesses: list = field(default_factory=list)


@dataclass
class VerifyReport:
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "checked": c.checked, "witnesses": c.witnesses}
                for c in self.checks
            ],
        }


def _homotopy_identity(R: Resolution, k: int, x: NatElem):
    """δ_{k+1}σ_k(x) + σ_{k-1}δ_k(x) - x."""
    left = delta(R, homotopy(R, x))
    if k == 0:
        right = homotopy(R, delta(R, x), x.component)
    else:
        right = homotopy(R, delta(R, x))
    return left + right - x


def verify_complex(R: Resolution, max_degree: int = None, context_length: int = 2,
                   jobs: int = 1, max_witnesses: int = 5) -> VerifyReport:
    N = R.max_dim if max_degree is None else max_degree
    if N > R.max_dim:
        raise MissingCells(f"verification to degree {N} needs a resolution of that dimension")
    p = R.base
    checks = []

    # ε δ_1 = 0 on every generating 1-cell
    res = CheckResult("augmentation", True)
    for g in R.generators(1):
        res.checked += 1
        value = delta(R, delta(R, unit(R, 1, g)))
        if value != 0:
            res.passed = False
            res.witnesses.append(f"ε δ1[{g}] = {value}")
    checks.append(res)

    # δ_{k} δ_{k+1} = 0 on every generator
    for d in range(2, N + 1):
        res = CheckResult(f"delta-squared-{d}", True)
        for g in R.generators(d):
            res.checked += 1
            value = delta(R, delta(R, unit(R, d, g)))
            if not value.is_zero():
                res.passed = False
                if len(res.witnesses) < max_witnesses:
                    res.witnesses.append(f"δ{d - 1}δ{d}[{g}] = {value}")
        checks.append(res)

    # δσ + σδ = id on basis triples with short contexts
    words = normal_words(p, context_length)
    ending, starting = {}, {}
    for w in words:
        ending.setdefault(w.end, []).append(w)
        starting.setdefault(w.start, []).append(w)
    for k in range(0, N):
        res = CheckResult(f"homotopy-{k}", True)
        tasks = []
        for g in R.generators(k):
            img = _gen_image(R, k, g)
            for u, v in itertools.product(ending.get(img.start, ()), starting.get(img.end, ())):
                tasks.append((g, u, v))

        def run(task):
            g, u, v = task
            x = unit(R, k, g, u, v)
            return task, _homotopy_identity(R, k, x)

        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(run, tasks))
        else:
            results = [run(t) for t in tasks]
        for (g, u, v), err in results:
            res.checked += 1
            if not err.is_zero():
                res.passed = False
                if len(res.witnesses) < max_witnesses:
                    res.witnesses.append(f"{_word_text(u)}[{g}]{_word_text(v)}: defect {err}")
        checks.append(res)
    return VerifyReport(checks)
