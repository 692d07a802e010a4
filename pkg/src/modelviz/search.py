"""Chronological backtracking search over a grounding.

Enumerates every satisfying assignment in a fixed canonical order: decision
variables are tried in creation order; relation tuples try absent before
present, function cells walk their value order.  The enumeration order is
therefore deterministic and any nbmodels prefix of the unlimited run is
stable.
"""

from __future__ import annotations

from typing import Iterator, Optional

from .errors import SearchBudgetExceeded
from .ground import Grounding


class _Watcher:
    __slots__ = ("clauses", "watch_index")

    def __init__(self):
        self.clauses: list[int] = []


class Enumerator:
    def __init__(self, grounding: Grounding, node_budget: int = 10_000_000):
        self.g = grounding
        self.budget = node_budget
        self.nodes = 0
        n = grounding.nvars
        self.assign = [0] * (n + 1)  # 0 unknown, 1 true, -1 false
        self.reason_trail: list[int] = []  # literals in assignment order
        self.clauses = [list(c) for c in grounding.clauses]
        self.watches: dict[int, list[int]] = {}
        self.units: list[int] = []
        self.conflict = False
        for idx, clause in enumerate(self.clauses):
            if not clause:
                self.conflict = True
                return
            if len(clause) == 1:
                self.units.append(clause[0])
                continue
            self._watch(clause[0], idx)
            self._watch(clause[1], idx)
        # order: all grounding decision vars first, Tseitin auxiliaries after
        seen = set(grounding.decision_vars)
        self.order = list(grounding.decision_vars) + [
            v for v in range(1, n + 1) if v not in seen]
        self.prefer_true = grounding.prefer_true

    def _watch(self, lit: int, clause_idx: int):
        self.watches.setdefault(lit, []).append(clause_idx)

    def _value(self, lit: int) -> int:
        v = self.assign[abs(lit)]
        return v if lit > 0 else -v

    def _enqueue(self, lit: int) -> bool:
        v = self._value(lit)
        if v == 1:
            return True
        if v == -1:
            return False
        self.assign[abs(lit)] = 1 if lit > 0 else -1
        self.reason_trail.append(lit)
        return True

    def _propagate(self, start: int) -> bool:
        """Propagate from trail position `start`; False on conflict."""
        qhead = start
        while qhead < len(self.reason_trail):
            lit = self.reason_trail[qhead]
            qhead += 1
            falsified = -lit
            watchlist = self.watches.get(falsified)
            if not watchlist:
                continue
            kept = []
            i = 0
            ok = True
            while i < len(watchlist):
                ci = watchlist[i]
                i += 1
                clause = self.clauses[ci]
                # make sure the falsified literal sits at position 1
                if clause[0] == falsified:
                    clause[0], clause[1] = clause[1], clause[0]
                if self._value(clause[0]) == 1:
                    kept.append(ci)
                    continue
                moved = False
                for k in range(2, len(clause)):
                    if self._value(clause[k]) != -1:
                        clause[1], clause[k] = clause[k], clause[1]
                        self._watch(clause[1], ci)
                        moved = True
                        break
                if moved:
                    continue
                kept.append(ci)
                if not self._enqueue(clause[0]):
                    kept.extend(watchlist[i:])
                    self.watches[falsified] = kept
                    return False
            self.watches[falsified] = kept
        return True

    def enumerate(self) -> Iterator[dict[int, bool]]:
        if self.conflict:
            return
        for u in self.units:
            if not self._enqueue(u):
                return
        if not self._propagate(0):
            return
        # decision stack entries: (trail_len_before, var, first_value, flipped)
        stack: list[list] = []
        while True:
            var = self._next_unassigned()
            if var is None:
                yield {v: self.assign[v] == 1 for v in range(1, self.g.nvars + 1)}
                if not self._backtrack(stack):
                    return
                continue
            first = var in self.prefer_true
            self.nodes += 1
            if self.nodes > self.budget:
                raise SearchBudgetExceeded(
                    f"search exceeded {self.budget} branch nodes")
            if not self._decide(stack, var, first):
                if not self._backtrack(stack):
                    return

    def _next_unassigned(self) -> Optional[int]:
        for v in self.order:
            if self.assign[v] == 0:
                return v
        return None

    def _decide(self, stack, var: int, value: bool) -> bool:
        mark = len(self.reason_trail)
        stack.append([mark, var, value, False])
        lit = var if value else -var
        self._enqueue(lit)
        return self._propagate(mark)

    def _backtrack(self, stack) -> bool:
        """Undo to the most recent decision with an untried sibling; False
        when the tree is exhausted."""
        while stack:
            mark, var, first, flipped = stack[-1]
            for lit in self.reason_trail[mark:]:
                self.assign[abs(lit)] = 0
            del self.reason_trail[mark:]
            stack.pop()
            if flipped:
                continue
            stack.append([mark, var, not first, True])
            lit = var if not first else -var
            self._enqueue(lit)
            if self._propagate(mark):
                return True
        return False
