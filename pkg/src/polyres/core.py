"""
Presentation data: objects, typed generators, rules, the JSON file format,
and the built-in presentations (As, the truncated Epi family, and reduced
standard presentations of finite multiplication tables).

Words are stored as `Path` values carrying their endpoints, so that the
empty word at an object is a typed identity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import (
    InvalidTruncation,
    NonAssociativeTable,
    PresentationSyntaxError,
    TypingError,
)

__all__ = [
    "Gen1",
    "Path",
    "Rule",
    "TerminationSpec",
    "Polygraph",
    "Diagnostic",
    "MultiplicationTable",
    "parse_polygraph",
    "load_polygraph",
    "serialize_polygraph",
    "validate",
    "parse_word",
    "format_word",
    "builtin",
    "as_polygraph",
    "epi",
    "reduced_standard",
]

TERMINATION_METHODS = ("length", "weights", "inversion", "assume")


@dataclass(frozen=True)
class Gen1:
    name: str
    src: str
    tgt: str


@dataclass(frozen=True)
class Path:
    """A word of generators from `start` to `end`; empty letters is the identity."""

    start: str
    letters: tuple = ()
    end: str = None

    def __post_init__(self):
        if not isinstance(self.letters, tuple):
            object.__setattr__(self, "letters", tuple(self.letters))
        if self.end is None:
            if self.letters:
                raise TypingError("a non-empty path needs an explicit end object")
            object.__setattr__(self, "end", self.start)

    def __len__(self):
        return len(self.letters)

    def is_identity(self):
        return not self.letters

    def concat(self, other: "Path") -> "Path":
        if self.end != other.start:
            raise TypingError(f"cannot compose {self} with {other}: {self.end} != {other.start}")
        if not other.letters:
            return self
        if not self.letters:
            return other
        return Path(self.start, self.letters + other.letters, other.end)

    def __str__(self):
        return format_word(self)


@dataclass(frozen=True)
class Rule:
    name: str
    lhs: Path
    rhs: Path


@dataclass(frozen=True)
class TerminationSpec:
    method: str
    weights: tuple = None  # sorted (generator, weight) pairs
    index: tuple = None  # sorted (generator, index) pairs

    def weight_map(self):
        return dict(self.weights or ())

    def index_map(self):
        return dict(self.index or ())


@dataclass(frozen=True)
class Polygraph:
    objects: tuple
    gens: tuple
    rules: tuple
    termination: TerminationSpec = None
    _cache: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    # lookups are built lazily and memoized on the instance
    def _maps(self):
        maps = self._cache.get("maps")
        if maps is None:
            maps = (
                {g.name: g for g in self.gens},
                {r.name: r for r in self.rules},
            )
            self._cache["maps"] = maps
        return maps

    def gen(self, name: str) -> Gen1:
        try:
            return self._maps()[0][name]
        except KeyError:
            raise TypingError(f"unknown generator {name!r}") from None

    def rule(self, name: str) -> Rule:
        try:
            return self._maps()[1][name]
        except KeyError:
            raise TypingError(f"unknown rule {name!r}") from None

    def has_gen(self, name: str) -> bool:
        return name in self._maps()[0]

    def has_rule(self, name: str) -> bool:
        return name in self._maps()[1]

    def path(self, letters: Sequence[str], start: str = None) -> Path:
        """Typed word; `start` is required only for the empty word."""
        letters = tuple(letters)
        if not letters:
            if start is None or start not in self.objects:
                raise TypingError(f"identity path needs a known object, got {start!r}")
            return Path(start, (), start)
        first = self.gen(letters[0])
        if start is not None and start != first.src:
            raise TypingError(f"path {'.'.join(letters)} does not start at {start}")
        here = first.src
        for name in letters:
            g = self.gen(name)
            if g.src != here:
                raise TypingError(f"path {'.'.join(letters)} is not composable at {name}")
            here = g.tgt
        return Path(first.src, letters, here)

    def object_at(self, w: Path, i: int) -> str:
        """Object between letters i-1 and i of w."""
        if i == 0:
            return w.start
        return self.gen(w.letters[i - 1]).tgt

    def subpath(self, w: Path, i: int, j: int) -> Path:
        if i == 0 and j == len(w.letters):
            return w
        return Path(self.object_at(w, i), w.letters[i:j], self.object_at(w, j))


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    location: str
    message: str

    def __str__(self):
        return f"{self.kind} at {self.location}: {self.message}"


def format_word(w: Path) -> str:
    if not w.letters:
        return f"1@{w.start}"
    return ".".join(w.letters)


def parse_word(p: Polygraph, text: str) -> Path:
    """`a.b.c` or `1@obj` for the identity at obj."""
    text = text.strip()
    if text.startswith("1@"):
        return p.path((), text[2:])
    if not text:
        raise TypingError("empty word; write 1@object for an identity")
    return p.path(text.split("."))


# ---------------------------------------------------------------- file format

def _best_effort_path(gmap, start, letters):
    end = start
    if letters and letters[-1] in gmap:
        end = gmap[letters[-1]].tgt
    return Path(start, tuple(letters), end)


def _expect(cond, msg):
    if not cond:
        raise PresentationSyntaxError(msg)


def _str_list(value, what):
    _expect(isinstance(value, list) and all(isinstance(x, str) for x in value),
            f"{what} must be an array of strings")
    return value


def load_polygraph(data: Mapping) -> Polygraph:
    """Build a Polygraph from decoded JSON without typing checks."""
    _expect(isinstance(data, dict), "top level must be an object")
    allowed = {"objects", "generators", "rules", "termination"}
    extra = set(data) - allowed
    _expect(not extra, f"unknown top-level fields: {sorted(extra)}")
    for key in ("objects", "generators", "rules"):
        _expect(key in data, f"missing field {key!r}")
    objects = tuple(_str_list(data["objects"], "objects"))

    _expect(isinstance(data["generators"], list), "generators must be an array")
    gens = []
    for i, g in enumerate(data["generators"]):
        _expect(isinstance(g, dict) and set(g) == {"name", "src", "tgt"},
                f"generator #{i} must have exactly name, src, tgt")
        _expect(all(isinstance(g[k], str) for k in g), f"generator #{i} fields must be strings")
        gens.append(Gen1(g["name"], g["src"], g["tgt"]))
    gmap = {g.name: g for g in gens}

    _expect(isinstance(data["rules"], list), "rules must be an array")
    rules = []
    for i, r in enumerate(data["rules"]):
        _expect(isinstance(r, dict) and set(r) == {"name", "lhs", "lhs_start", "rhs", "rhs_start"},
                f"rule #{i} must have exactly name, lhs, lhs_start, rhs, rhs_start")
        _expect(isinstance(r["name"], str), f"rule #{i} name must be a string")
        _expect(isinstance(r["lhs_start"], str) and isinstance(r["rhs_start"], str),
                f"rule #{i} starts must be strings")
        lhs = _str_list(r["lhs"], f"rule {r['name']} lhs")
        rhs = _str_list(r["rhs"], f"rule {r['name']} rhs")
        rules.append(Rule(r["name"], _best_effort_path(gmap, r["lhs_start"], lhs),
                          _best_effort_path(gmap, r["rhs_start"], rhs)))

    termination = None
    if "termination" in data:
        t = data["termination"]
        _expect(isinstance(t, dict) and "method" in t, "termination must be an object with a method")
        _expect(set(t) <= {"method", "weights", "index"}, "unknown termination fields")
        _expect(t["method"] in TERMINATION_METHODS, f"unknown termination method {t['method']!r}")
        weights = index = None
        if "weights" in t:
            _expect(isinstance(t["weights"], dict)
                    and all(isinstance(v, int) and not isinstance(v, bool) for v in t["weights"].values()),
                    "weights must map generators to integers")
            weights = tuple(t["weights"].items())
        if "index" in t:
            _expect(isinstance(t["index"], dict)
                    and all(isinstance(v, int) and not isinstance(v, bool) for v in t["index"].values()),
                    "index must map generators to integers")
            index = tuple(t["index"].items())
        termination = TerminationSpec(t["method"], weights, index)
    return Polygraph(objects, tuple(gens), tuple(rules), termination)


def parse_polygraph(text: str) -> Polygraph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PresentationSyntaxError(f"invalid JSON: {exc}") from None
    p = load_polygraph(data)
    problems = validate(p)
    if problems:
        raise TypingError("; ".join(str(d) for d in problems))
    return p


def polygraph_to_data(p: Polygraph) -> dict:
    data = {
        "objects": list(p.objects),
        "generators": [{"name": g.name, "src": g.src, "tgt": g.tgt} for g in p.gens],
        "rules": [
            {
                "name": r.name,
                "lhs": list(r.lhs.letters),
                "lhs_start": r.lhs.start,
                "rhs": list(r.rhs.letters),
                "rhs_start": r.rhs.start,
            }
            for r in p.rules
        ],
    }
    if p.termination is not None:
        t = {"method": p.termination.method}
        if p.termination.weights is not None:
            t["weights"] = dict(p.termination.weights)
        if p.termination.index is not None:
            t["index"] = dict(p.termination.index)
        data["termination"] = t
    return data


def serialize_polygraph(p: Polygraph) -> str:
    return json.dumps(polygraph_to_data(p), indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------- validation

def _check_path(gmap, objects, w: Path, where, out):
    if w.start not in objects:
        out.append(Diagnostic("unknown object", where, f"start object {w.start!r}"))
        return None
    here = w.start
    for name in w.letters:
        g = gmap.get(name)
        if g is None:
            out.append(Diagnostic("unknown generator", where, f"{name!r}"))
            return None
        if g.src != here:
            out.append(Diagnostic("non-composable path", where,
                                  f"{name} starts at {g.src}, expected {here}"))
            return None
        here = g.tgt
    return here


def validate(p: Polygraph) -> list:
    out = []
    seen = set()
    for o in p.objects:
        if o in seen:
            out.append(Diagnostic("name collision", f"object {o}", "duplicate object name"))
        seen.add(o)
    objects = set(p.objects)
    gmap = {}
    for g in p.gens:
        if g.name in gmap:
            out.append(Diagnostic("name collision", f"generator {g.name}", "duplicate generator name"))
        gmap.setdefault(g.name, g)
        for end in (g.src, g.tgt):
            if end not in objects:
                out.append(Diagnostic("unknown object", f"generator {g.name}", f"{end!r}"))
    rnames = set()
    for r in p.rules:
        loc = f"rule {r.name}"
        if r.name in rnames:
            out.append(Diagnostic("name collision", loc, "duplicate rule name"))
        rnames.add(r.name)
        if not r.lhs.letters:
            out.append(Diagnostic("identity source", loc, "lhs must be a non-empty word"))
        lend = _check_path(gmap, objects, r.lhs, loc + " lhs", out)
        rend = _check_path(gmap, objects, r.rhs, loc + " rhs", out)
        if lend is not None and rend is not None:
            if r.lhs.start != r.rhs.start or lend != rend:
                out.append(Diagnostic("parallel-endpoint violation", loc,
                                      f"lhs {r.lhs.start}->{lend} but rhs {r.rhs.start}->{rend}"))
    t = p.termination
    if t is not None:
        if t.method not in TERMINATION_METHODS:
            out.append(Diagnostic("invalid termination", "termination", f"method {t.method!r}"))
        for label, pairs in (("weights", t.weights), ("index", t.index)):
            for name, value in pairs or ():
                if name not in gmap:
                    out.append(Diagnostic("unknown generator", f"termination {label}", f"{name!r}"))
                if label == "weights" and value <= 0:
                    out.append(Diagnostic("invalid termination", "termination weights",
                                          f"weight of {name} must be positive"))
    return out


# ---------------------------------------------------------------- builtins

def _rule(p_gens, name, lhs, rhs, start):
    gmap = {g.name: g for g in p_gens}
    end = gmap[lhs[-1]].tgt
    rend = gmap[rhs[-1]].tgt if rhs else start
    return Rule(name, Path(start, tuple(lhs), end), Path(start, tuple(rhs), rend))


def as_polygraph() -> Polygraph:
    gens = (Gen1("a", "x", "x"),)
    rules = (_rule(gens, "mu", ["a", "a"], ["a"], "x"),)
    return Polygraph(("x",), gens, rules, TerminationSpec("length"))


def epi_gen(i: int, n: int) -> str:
    return f"s_{i}^({n})"


def epi_rule(i: int, j: int, n: int) -> str:
    return f"s_{i},{j}^({n})"


def epi(m: int) -> Polygraph:
    """Objects 0..m, s_i^(n): n+1 -> n, rules s_i s_j => s_{j+1} s_i for i <= j."""
    if m < 2:
        raise InvalidTruncation(f"epi({m}) holds no rule; need m >= 2")
    objects = tuple(str(k) for k in range(m + 1))
    gens = tuple(Gen1(epi_gen(i, n), str(n + 1), str(n)) for n in range(m) for i in range(n + 1))
    rules = []
    for n in range(m - 1):
        for i in range(n + 1):
            for j in range(i, n + 1):
                lhs = [epi_gen(i, n + 1), epi_gen(j, n)]
                rhs = [epi_gen(j + 1, n + 1), epi_gen(i, n)]
                rules.append(_rule(gens, epi_rule(i, j, n), lhs, rhs, str(n + 2)))
    index = tuple((epi_gen(i, n), i) for n in range(m) for i in range(n + 1))
    return Polygraph(objects, gens, tuple(rules), TerminationSpec("inversion", index=index))


@dataclass(frozen=True)
class MultiplicationTable:
    """A finite category: cells with endpoints, an identity per object, and
    the product of every composable pair (diagrammatic order: u then v)."""

    objects: tuple
    cells: tuple  # (name, src, tgt)
    identities: tuple  # (object, cell name)
    products: tuple  # (u, v, uv)

    @classmethod
    def monoid(cls, elements: Iterable[str], unit: str, products: Mapping) -> "MultiplicationTable":
        elements = tuple(elements)
        full = {(unit, e): e for e in elements}
        full.update({(e, unit): e for e in elements})
        full.update(products)  # products with the unit may be omitted
        prods = tuple((u, v, w) for (u, v), w in full.items())
        return cls(("x",), tuple((e, "x", "x") for e in elements), (("x", unit),), prods)

    @classmethod
    def from_data(cls, data: Mapping) -> "MultiplicationTable":
        try:
            if "elements" in data:
                prods = {(u, v): w for u, v, w in data["products"]}
                return cls.monoid(data["elements"], data["unit"], prods)
            return cls(
                tuple(data["objects"]),
                tuple((c["name"], c["src"], c["tgt"]) for c in data["cells"]),
                tuple(data["identities"].items()),
                tuple(tuple(t) for t in data["products"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise PresentationSyntaxError(f"malformed multiplication table: {exc}") from None


def reduced_standard(table: MultiplicationTable) -> Polygraph:
    cells = {name: (s, t) for name, s, t in table.cells}
    if len(cells) != len(table.cells):
        raise NonAssociativeTable("duplicate cell names in table")
    ident = dict(table.identities)
    if set(ident) != set(table.objects):
        raise NonAssociativeTable("every object needs exactly one identity cell")
    for obj, e in ident.items():
        if cells.get(e) != (obj, obj):
            raise NonAssociativeTable(f"identity {e} is not a loop on {obj}")
    prod = {}
    for u, v, w in table.products:
        if (u, v) in prod and prod[(u, v)] != w:
            raise NonAssociativeTable(f"product {u}{v} defined twice")
        prod[(u, v)] = w
    composable = [(u, v) for u in cells for v in cells if cells[u][1] == cells[v][0]]
    for u, v in composable:
        w = prod.get((u, v))
        if w is None or w not in cells:
            raise NonAssociativeTable(f"product {u}{v} missing or unknown")
        if cells[w] != (cells[u][0], cells[v][1]):
            raise NonAssociativeTable(f"product {u}{v} = {w} has wrong endpoints")
    if set(prod) != set(composable):
        raise NonAssociativeTable("products given for non-composable pairs")
    for obj, e in ident.items():
        for u in cells:
            if cells[u][0] == obj and prod[(e, u)] != u:
                raise NonAssociativeTable(f"{e} is not a left unit for {u}")
            if cells[u][1] == obj and prod[(u, e)] != u:
                raise NonAssociativeTable(f"{e} is not a right unit for {u}")
    for u, v in composable:
        for w in cells:
            if cells[v][1] == cells[w][0] and prod[(prod[(u, v)], w)] != prod[(u, prod[(v, w)])]:
                raise NonAssociativeTable(f"({u}{v}){w} != {u}({v}{w})")

    units = set(ident.values())
    order = [name for name, _, _ in table.cells if name not in units]
    gens = tuple(Gen1(c, *cells[c]) for c in order)
    rules = []
    for u in order:
        for v in order:
            if cells[u][1] != cells[v][0]:
                continue
            w = prod[(u, v)]
            rhs = [] if w in units else [w]
            rules.append(_rule(gens, f"mu({u},{v})", [u, v], rhs, cells[u][0]))
    return Polygraph(tuple(table.objects), gens, tuple(rules), TerminationSpec("length"))


def builtin(kind: str, arg=None) -> Polygraph:
    """`as`, `epi` with a level bound, or `reduced_standard` with a table."""
    if kind == "as":
        return as_polygraph()
    if kind == "epi":
        return epi(int(arg))
    if kind in ("reduced_standard", "monoid"):
        if not isinstance(arg, MultiplicationTable):
            arg = MultiplicationTable.from_data(arg)
        return reduced_standard(arg)
    raise ValueError(f"unknown builtin {kind!r}")
