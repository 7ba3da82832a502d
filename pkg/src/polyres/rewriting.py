"""
Rewriting steps and strategies, termination certificates, confluence
checking and the reduction of presentations.

Steps on a word are ordered by (length of the left context, rule name).
The rightmost strategy always rewrites the maximal step for that order,
the leftmost one the minimal step.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

from .core import Path, Polygraph, Rule, TerminationSpec, format_word
from .errors import (
    MismatchedEndpoints,
    NotConvergent,
    NotTerminating,
    StepBudgetExceeded,
    TypingError,
)

__all__ = [
    "RewriteStep",
    "RewriteTrace",
    "TerminationCertificate",
    "ConfluenceEntry",
    "ConfluenceReport",
    "rewrite_steps",
    "normal_form",
    "nf",
    "rightmost_trace",
    "is_normal",
    "word_problem",
    "check_termination",
    "check_confluence",
    "is_convergent",
    "is_reduced",
    "reduce",
    "step_budget",
]

DEFAULT_STEP_BUDGET = 10 ** 6
DEFAULT_LOOP_BOUND = 6


def step_budget() -> int:
    value = os.environ.get("POLYRES_STEP_BUDGET")
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            pass
    return DEFAULT_STEP_BUDGET


@dataclass(frozen=True)
class RewriteStep:
    left: Path
    rule: str
    right: Path

    @property
    def position(self) -> int:
        return len(self.left.letters)

    def source(self, p: Polygraph) -> Path:
        return self.left.concat(p.rule(self.rule).lhs).concat(self.right)

    def target(self, p: Polygraph) -> Path:
        return self.left.concat(p.rule(self.rule).rhs).concat(self.right)

    def end(self, p: Polygraph) -> int:
        return self.position + len(p.rule(self.rule).lhs.letters)

    def key(self):
        return (self.position, self.rule)

    def __str__(self):
        parts = list(self.left.letters) + [self.rule] + list(self.right.letters)
        return "·".join(parts)


@dataclass(frozen=True)
class RewriteTrace:
    source: Path
    steps: tuple = ()

    def target(self, p: Polygraph) -> Path:
        return self.steps[-1].target(p) if self.steps else self.source


@dataclass(frozen=True)
class TerminationCertificate:
    method: str
    verdict: str  # proved | assumed | refuted | unknown
    detail: str = ""
    witness: tuple = ()  # loop of words when refuted


@dataclass(frozen=True)
class ConfluenceEntry:
    branching: object  # branchings.CriticalBranching
    targets: tuple  # the two one-step reducts
    normal_forms: tuple
    traces: tuple
    joinable: bool


@dataclass(frozen=True)
class ConfluenceReport:
    entries: tuple
    verdict: str  # confluent | not-confluent
    termination: TerminationCertificate

    @property
    def confluent(self) -> bool:
        return self.verdict == "confluent"


# ---------------------------------------------------------------- engine

class _Engine:
    """Per-polygraph matching tables and normal-form memo."""

    def __init__(self, p: Polygraph):
        self.p = p
        by_lhs = {}
        for r in p.rules:
            by_lhs.setdefault(r.lhs.letters, []).append(r.name)
        self.by_lhs = {k: tuple(sorted(v)) for k, v in by_lhs.items()}
        self.lengths = tuple(sorted({len(k) for k in by_lhs}))
        self.lhs_len = {r.name: len(r.lhs.letters) for r in p.rules}
        self.rhs = {r.name: r.rhs.letters for r in p.rules}
        self.nf_memo = {}
        self.trace_memo = {}

    def matches(self, letters):
        """All (position, rule) with a redex, sorted ascending."""
        out = []
        n = len(letters)
        for i in range(n):
            for L in self.lengths:
                if i + L > n:
                    break
                names = self.by_lhs.get(letters[i:i + L])
                if names:
                    out.extend((i, name) for name in names)
        out.sort()
        return out

    def rightmost(self, letters):
        n = len(letters)
        for i in range(n - 1, -1, -1):
            best = None
            for L in self.lengths:
                if i + L > n:
                    break
                names = self.by_lhs.get(letters[i:i + L])
                if names and (best is None or names[-1] > best):
                    best = names[-1]
            if best is not None:
                return (i, best)
        return None

    def leftmost(self, letters):
        n = len(letters)
        for i in range(n):
            best = None
            for L in self.lengths:
                if i + L > n:
                    break
                names = self.by_lhs.get(letters[i:i + L])
                if names and (best is None or names[0] < best):
                    best = names[0]
            if best is not None:
                return (i, best)
        return None

    def apply(self, letters, pos, name):
        return letters[:pos] + self.rhs[name] + letters[pos + self.lhs_len[name]:]

    def run(self, letters, side, budget):
        pick = self.rightmost if side == "rightmost" else self.leftmost
        steps = []
        current = letters
        while True:
            m = pick(current)
            if m is None:
                return current, steps
            if len(steps) >= budget:
                raise StepBudgetExceeded(f"no normal form within {budget} steps")
            steps.append((current, m))
            current = self.apply(current, *m)

    def rightmost_steps(self, letters):
        """Memoized rightmost trace as a tuple of (position, rule)."""
        hit = self.trace_memo.get(letters)
        if hit is not None:
            return hit
        _, steps = self.run(letters, "rightmost", step_budget())
        result = tuple(m for _, m in steps)
        self.trace_memo[letters] = result
        return result

    def normal(self, letters):
        hit = self.nf_memo.get(letters)
        if hit is None:
            current = letters
            for pos, name in self.rightmost_steps(letters):
                current = self.apply(current, pos, name)
            hit = current
            self.nf_memo[letters] = hit
        return hit


def _engine(p: Polygraph) -> _Engine:
    eng = p._cache.get("engine")
    if eng is None:
        eng = _Engine(p)
        p._cache["engine"] = eng
    return eng


def _check_word(p: Polygraph, w: Path):
    p.path(w.letters, w.start)
    if w.letters and p.gen(w.letters[-1]).tgt != w.end:
        raise TypingError(f"path {format_word(w)} has a wrong end object")


def _step(p: Polygraph, w: Path, pos: int, name: str) -> RewriteStep:
    L = len(p.rule(name).lhs.letters)
    return RewriteStep(p.subpath(w, 0, pos), name, p.subpath(w, pos + L, len(w.letters)))


def rewrite_steps(p: Polygraph, w: Path) -> list:
    _check_word(p, w)
    return [_step(p, w, pos, name) for pos, name in _engine(p).matches(w.letters)]


def _normalize_side(side: str) -> str:
    if side in ("right", "rightmost"):
        return "rightmost"
    if side in ("left", "leftmost"):
        return "leftmost"
    raise ValueError(f"side must be leftmost or rightmost, got {side!r}")


def normal_form(p: Polygraph, w: Path, side: str = "rightmost", budget: Optional[int] = None):
    """Normal form of w with the full strategy trace."""
    _check_word(p, w)
    side = _normalize_side(side)
    eng = _engine(p)
    budget = step_budget() if budget is None else budget
    final, raw = eng.run(w.letters, side, budget)
    steps = []
    for letters, (pos, name) in raw:
        cur = Path(w.start, letters, w.end) if letters else Path(w.start, (), w.start)
        steps.append(_step(p, cur, pos, name))
    return _as_path(p, w, final), RewriteTrace(w, tuple(steps))


def _as_path(p: Polygraph, w: Path, letters) -> Path:
    if not letters:
        return Path(w.start, (), w.start)
    return Path(w.start, letters, w.end)


def nf(p: Polygraph, w: Path) -> Path:
    """Rightmost normal form, memoized."""
    return _as_path(p, w, _engine(p).normal(w.letters))


def rightmost_trace(p: Polygraph, w: Path) -> tuple:
    """The rightmost strategy as a tuple of (position, rule) pairs."""
    return _engine(p).rightmost_steps(w.letters)


def is_normal(p: Polygraph, w: Path) -> bool:
    return _engine(p).rightmost(w.letters) is None


def word_problem(p: Polygraph, u: Path, v: Path) -> bool:
    if not is_convergent(p):
        raise NotConvergent("word problem needs a convergent presentation")
    _check_word(p, u)
    _check_word(p, v)
    if (u.start, u.end) != (v.start, v.end):
        raise MismatchedEndpoints(f"{format_word(u)} and {format_word(v)} are not parallel")
    return nf(p, u) == nf(p, v)


# ---------------------------------------------------------------- termination

def _length_check(p):
    bad = [r.name for r in p.rules if len(r.lhs.letters) <= len(r.rhs.letters)]
    if bad:
        return False, f"rules not length-decreasing: {', '.join(bad)}"
    return True, "every rule strictly decreases word length"


def _weights_check(p, weights):
    if weights is None:
        return False, "no weights supplied"
    missing = [g.name for g in p.gens if weights.get(g.name, 0) <= 0]
    if missing:
        return False, f"generators without a positive weight: {', '.join(missing)}"

    def size(w):
        return sum(weights[a] for a in w.letters)

    bad = [r.name for r in p.rules if size(r.lhs) <= size(r.rhs)]
    if bad:
        return False, f"rules not weight-decreasing: {', '.join(bad)}"
    return True, "every rule strictly decreases total weight"


def _inversion_check(p, index):
    # Exchange rules x_i x_j -> x_{j+1} x_i with i <= j raise the index sum
    # by exactly one while keeping the length.  For a fixed length the index
    # sum is bounded, so every rewriting sequence is finite.
    if index is None:
        return False, "no index map supplied"
    missing = [g.name for g in p.gens if g.name not in index]
    if missing:
        return False, f"generators without an index: {', '.join(missing)}"
    for r in p.rules:
        if len(r.lhs.letters) != 2 or len(r.rhs.letters) != 2:
            return False, f"rule {r.name} is not an exchange rule"
        (x, y), (x2, y2) = r.lhs.letters, r.rhs.letters
        i, j = index[x], index[y]
        if not (i <= j and index[x2] == j + 1 and index[y2] == i):
            return False, f"rule {r.name} is not of the form x_i x_j -> x_(j+1) x_i with i <= j"
    return True, "exchange rules strictly increase the bounded index sum"


def _words_up_to(p: Polygraph, bound: int):
    yield from ((), )
    frontier = [(g.name,) for g in p.gens]
    by_src = {}
    for g in p.gens:
        by_src.setdefault(g.src, []).append(g.name)
    tgt = {g.name: g.tgt for g in p.gens}
    length = 1
    while frontier and length <= bound:
        yield from frontier
        nxt = []
        for w in frontier:
            for name in by_src.get(tgt[w[-1]], ()):
                nxt.append(w + (name,))
        frontier = nxt
        length += 1


def _find_loop(p: Polygraph, bound: int, max_states: int = 200_000):
    eng = _engine(p)
    state = {}
    for seed in _words_up_to(p, bound):
        if seed in state:
            continue
        # iterative DFS; grey = on the current path
        stack = [(seed, iter(eng.matches(seed)))]
        state[seed] = 1
        path = [seed]
        while stack:
            word, it = stack[-1]
            advanced = False
            for pos, name in it:
                nxt = eng.apply(word, pos, name)
                if len(nxt) > bound:
                    continue
                mark = state.get(nxt)
                if mark == 1:
                    k = path.index(nxt)
                    return tuple(path[k:]) + (nxt,)
                if mark is None:
                    if len(state) >= max_states:
                        return None
                    state[nxt] = 1
                    path.append(nxt)
                    stack.append((nxt, iter(eng.matches(nxt))))
                    advanced = True
                    break
            if not advanced:
                state[word] = 2
                stack.pop()
                path.pop()
    return None


def check_termination(p: Polygraph, method: Optional[str] = None,
                      loop_bound: int = DEFAULT_LOOP_BOUND) -> TerminationCertificate:
    key = ("termination", method, loop_bound)
    hit = p._cache.get(key)
    if hit is not None:
        return hit
    spec = p.termination
    if method is None:
        method = spec.method if spec is not None else "length"
    proved, detail = False, ""
    if method == "length":
        proved, detail = _length_check(p)
    elif method == "weights":
        proved, detail = _weights_check(p, spec.weight_map() if spec and spec.weights else None)
    elif method == "inversion":
        proved, detail = _inversion_check(p, spec.index_map() if spec and spec.index else None)
    elif method == "assume":
        detail = "termination assumed by the presentation"
    else:
        raise ValueError(f"unknown termination method {method!r}")
    if proved:
        cert = TerminationCertificate(method, "proved", detail)
    else:
        loop = _find_loop(p, loop_bound)
        if loop is not None:
            gmap = {g.name: g for g in p.gens}
            words = tuple(
                Path(gmap[w[0]].src, w, gmap[w[-1]].tgt) if w else Path(p.objects[0])
                for w in loop
            )
            cert = TerminationCertificate(method, "refuted", "rewriting cycle found", words)
        elif method == "assume":
            cert = TerminationCertificate(method, "assumed", detail)
        else:
            cert = TerminationCertificate(method, "unknown", detail)
    p._cache[key] = cert
    return cert


# ---------------------------------------------------------------- confluence

def check_confluence(p: Polygraph) -> ConfluenceReport:
    hit = p._cache.get("confluence")
    if hit is not None:
        return hit
    from .branchings import critical_branchings

    cert = check_termination(p)
    if cert.verdict == "refuted":
        raise NotTerminating("rewriting cycle: " + " -> ".join(format_word(w) for w in cert.witness))
    entries = []
    for b in critical_branchings(p):
        f, g = b.steps[0], b.steps[-1]
        targets = (f.target(p), g.target(p))
        results = [normal_form(p, t, "rightmost") for t in targets]
        nfs = tuple(r[0] for r in results)
        entries.append(ConfluenceEntry(b, targets, nfs, tuple(r[1] for r in results), nfs[0] == nfs[1]))
    verdict = "confluent" if all(e.joinable for e in entries) else "not-confluent"
    report = ConfluenceReport(tuple(entries), verdict, cert)
    p._cache["confluence"] = report
    return report


def is_convergent(p: Polygraph) -> bool:
    cert = check_termination(p)
    if cert.verdict not in ("proved", "assumed"):
        return False
    return check_confluence(p).confluent


# ---------------------------------------------------------------- reduction

def is_reduced(p: Polygraph) -> bool:
    eng = _engine(p)
    for r in p.rules:
        if eng.matches(r.rhs.letters):
            return False
        for pos, name in eng.matches(r.lhs.letters):
            if name != r.name:
                return False
    return True


def reduce(p: Polygraph) -> Polygraph:
    """Tietze-equivalent reduced presentation of a convergent one."""
    if not is_convergent(p):
        raise NotConvergent("reduce needs a convergent presentation")
    # targets become normal forms
    phase1 = [Rule(r.name, r.lhs, nf(p, r.lhs)) for r in p.rules]
    # one rule per source, the first by name
    by_source = {}
    for r in sorted(phase1, key=lambda r: r.name):
        by_source.setdefault((r.lhs.start, r.lhs.letters), r)
    kept_names = {r.name for r in by_source.values()}
    phase2 = [r for r in phase1 if r.name in kept_names]
    # drop rules whose source is reducible by another remaining rule
    lhs_set = {r.lhs.letters: r.name for r in phase2}
    phase3 = []
    for r in phase2:
        w = r.lhs.letters
        reducible = False
        for i in range(len(w)):
            for j in range(i + 1, len(w) + 1):
                other = lhs_set.get(w[i:j])
                if other is not None and other != r.name:
                    reducible = True
                    break
            if reducible:
                break
        if not reducible:
            phase3.append(r)
    out = Polygraph(p.objects, p.gens, tuple(phase3), p.termination)
    if check_termination(out).verdict != "proved":
        # every new rule is a non-empty rewriting sequence of the old system
        out = Polygraph(p.objects, p.gens, tuple(phase3), TerminationSpec("assume"))
    return out
