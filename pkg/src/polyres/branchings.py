"""
Local branchings and critical n-fold branchings.

A critical branching of order n >= 3 is stored recursively: a critical
branching of order n-1 on a word u (the parent), extended on the right by a
word v so that a new rule with source p.v overlaps the parent's rightmost
redex, p being a proper suffix of u.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .core import Path, Polygraph
from .errors import NotConvergent, NotReduced
from .rewriting import RewriteStep, _engine, is_convergent, is_reduced

__all__ = [
    "BranchingClass",
    "LocalBranching",
    "CriticalBranching",
    "classify",
    "critical_branchings",
    "critical_nfold",
]


class BranchingClass(str, Enum):
    ASPHERICAL = "aspherical"
    PEIFFER = "peiffer"
    OVERLAPPING = "overlapping"


@dataclass(frozen=True)
class LocalBranching:
    source: Path
    steps: tuple


@dataclass(frozen=True)
class CriticalBranching:
    order: int
    source: Path
    steps: tuple
    parent: Optional["CriticalBranching"] = None
    extension: Optional[tuple] = None  # (rule name, overlap length)

    @property
    def key(self) -> tuple:
        return tuple((s.rule, s.position) for s in self.steps)

    @property
    def rules(self) -> tuple:
        return tuple(s.rule for s in self.steps)

    @property
    def positions(self) -> tuple:
        return tuple(s.position for s in self.steps)

    def __str__(self):
        inner = ", ".join(str(s) for s in self.steps)
        return f"({inner}) on {'.'.join(self.source.letters)}"


def _redex(p: Polygraph, s: RewriteStep):
    return s.position, s.end(p)


def classify(p: Polygraph, b: LocalBranching) -> BranchingClass:
    f, g = b.steps
    if f == g:
        return BranchingClass.ASPHERICAL
    (i, j), (k, l) = _redex(p, f), _redex(p, g)
    if j <= k or l <= i:
        return BranchingClass.PEIFFER
    return BranchingClass.OVERLAPPING


def _steps_on(p: Polygraph, w: Path, pairs):
    out = []
    for pos, name in sorted(pairs):
        L = len(p.rule(name).lhs.letters)
        out.append(RewriteStep(p.subpath(w, 0, pos), name, p.subpath(w, pos + L, len(w.letters))))
    return tuple(out)


def critical_branchings(p: Polygraph) -> list:
    """Order-2 critical branchings: suffix/prefix overlaps, plus inclusion
    overlaps when the presentation is not reduced."""
    hit = p._cache.get("critical2")
    if hit is not None:
        return list(hit)
    reduced = is_reduced(p)
    found = {}
    for phi in p.rules:
        u = phi.lhs.letters
        for psi in p.rules:
            x = psi.lhs.letters
            for k in range(1, min(len(u), len(x))):
                if u[-k:] != x[:k]:
                    continue
                letters = u + x[k:]
                w = Path(phi.lhs.start, letters, psi.lhs.end)
                steps = _steps_on(p, w, [(0, phi.name), (len(u) - k, psi.name)])
                b = CriticalBranching(2, w, steps, None, (psi.name, k))
                found.setdefault(b.key, b)
    if not reduced:
        for phi in p.rules:
            u = phi.lhs.letters
            for psi in p.rules:
                x = psi.lhs.letters
                if phi.name == psi.name or len(x) > len(u):
                    continue
                if len(x) == len(u) and psi.name < phi.name:
                    continue  # equal sources: one branching per unordered pair
                for q in range(len(u) - len(x) + 1):
                    if u[q:q + len(x)] == x:
                        steps = _steps_on(p, phi.lhs, [(0, phi.name), (q, psi.name)])
                        b = CriticalBranching(2, phi.lhs, steps, None, None)
                        found.setdefault(b.key, b)
    out = tuple(sorted(found.values(), key=lambda b: (b.rules, b.positions)))
    p._cache["critical2"] = out
    return list(out)


def critical_nfold(p: Polygraph, n: int) -> list:
    if n < 2:
        raise ValueError("branching order must be at least 2")
    if n == 2:
        return critical_branchings(p)
    hit = p._cache.get(("criticaln", n))
    if hit is not None:
        return list(hit)
    if not is_reduced(p):
        raise NotReduced("critical n-fold branchings for n >= 3 need a reduced presentation")
    if not is_convergent(p):
        raise NotConvergent("critical n-fold branchings need a convergent presentation")
    out = []
    for c in critical_nfold(p, n - 1):
        out.extend(_extensions(p, c))
    out.sort(key=lambda b: (b.rules, b.positions))
    p._cache[("criticaln", n)] = tuple(out)
    return out


def _extensions(p: Polygraph, c: CriticalBranching) -> list:
    u = c.source.letters
    last = c.steps[-1]
    out = []
    for chi in p.rules:
        x = chi.lhs.letters
        for k in range(1, min(len(u), len(x))):
            start = len(u) - k
            # the new redex must start inside the parent's rightmost redex
            if start <= last.position or u[start:] != x[:k]:
                continue
            w = Path(c.source.start, u + x[k:], chi.lhs.end)
            pairs = [(s.position, s.rule) for s in c.steps] + [(start, chi.name)]
            b = CriticalBranching(c.order + 1, w, _steps_on(p, w, pairs), c, (chi.name, k))
            assert _engine(p).rightmost(w.letters) == (start, chi.name)
            out.append(b)
    return out
