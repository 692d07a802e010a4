"""Seeded random programs for property tests and the solver oracle.

The generator emits source text, which keeps it honest: everything it
produces must survive the parser and the type checker.
"""

from __future__ import annotations

import random


class ProgramGen:
    def __init__(self, rng: random.Random, max_space: int = 512):
        self.rng = rng
        self.max_space = max_space

    # --- vocabulary and structure ------------------------------------------

    def generate(self) -> str:
        rng = self.rng
        self.sorts = {}
        for i in range(rng.randint(1, 2)):
            name = f"S{i}"
            lo = rng.randint(-2, 1)
            hi = lo + rng.randint(1, 3)
            self.sorts[name] = (lo, hi)
        sort_names = list(self.sorts)
        self.preds = {}
        self.funcs = {}
        self.enumerated = set()
        space = 1
        for i in range(self.rng.randint(1, 3)):
            kind = rng.choice(["pred1", "pred2", "const", "fun1", "fun1p"])
            name = f"p{i}" if kind.startswith("pred") else f"f{i}"
            if kind == "pred1":
                args = (rng.choice(sort_names),)
                self.preds[name] = args
            elif kind == "pred2":
                args = (rng.choice(sort_names), rng.choice(sort_names))
                self.preds[name] = args
            elif kind == "const":
                self.funcs[name] = ((), rng.choice(sort_names), False)
            elif kind == "fun1":
                self.funcs[name] = ((rng.choice(sort_names),), rng.choice(sort_names), False)
            else:
                self.funcs[name] = ((rng.choice(sort_names),), rng.choice(sort_names), True)
            enumerate_it = rng.random() < 0.3
            sym_space = self._space(name)
            if not enumerate_it and space * sym_space > self.max_space:
                enumerate_it = True
            if enumerate_it:
                self.enumerated.add(name)
            else:
                space *= sym_space
        lines = ["vocabulary V {"]
        for name, (lo, hi) in self.sorts.items():
            lines.append(f"  type {name} isa int")
        for name, args in self.preds.items():
            lines.append(f"  {name}({', '.join(args)})")
        for name, (args, out, partial) in self.funcs.items():
            prefix = "partial " if partial else ""
            arglist = f"({', '.join(args)})" if args else ""
            lines.append(f"  {prefix}{name}{arglist} : {out}")
        lines.append("}")
        lines.append(self._theory_text())
        lines.append(self._structure_text())
        return "\n".join(lines) + "\n"

    def _domain(self, sort: str) -> list[int]:
        lo, hi = self.sorts[sort]
        return list(range(lo, hi + 1))

    def _space(self, name: str) -> int:
        if name in self.preds:
            points = 1
            for s in self.preds[name]:
                points *= len(self._domain(s))
            return 2 ** points
        args, out, partial = self.funcs[name]
        points = 1
        for s in args:
            points *= len(self._domain(s))
        return (len(self._domain(out)) + (1 if partial else 0)) ** points

    def _structure_text(self) -> str:
        rng = self.rng
        lines = ["structure S : V {"]
        for name, (lo, hi) in self.sorts.items():
            lines.append(f"  {name} = {{{lo}..{hi}}}")
        for name in sorted(self.enumerated):
            if name in self.preds:
                points = self._points(self.preds[name])
                chosen = [p for p in points if rng.random() < 0.5]
                rows = "; ".join(", ".join(str(v) for v in p) for p in chosen)
                if self.preds[name] == ():
                    lines.append(f"  {name} = {'true' if chosen else 'false'}")
                else:
                    lines.append(f"  {name} = {{{rows}}}")
            else:
                args, out, partial = self.funcs[name]
                points = self._points(args)
                rows = []
                for p in points:
                    if partial and rng.random() < 0.3:
                        continue
                    value = rng.choice(self._domain(out))
                    rows.append(", ".join(str(v) for v in p + (value,)))
                if not args:
                    lines.append(f"  {name} = {rows[0] if rows else '{}'}")
                else:
                    lines.append(f"  {name} = {{{'; '.join(rows)}}}")
        lines.append("}")
        return "\n".join(lines)

    def _points(self, args) -> list[tuple]:
        points = [()]
        for s in args:
            points = [p + (v,) for p in points for v in self._domain(s)]
        return points

    # --- formulas ------------------------------------------------------------

    def _theory_text(self) -> str:
        rng = self.rng
        self.defined = None
        make_definition = rng.random() < 0.35 and self._definable()
        lines = ["theory T : V {"]
        for _ in range(rng.randint(1, 2)):
            lines.append(f"  {self._sentence()}.")
        if make_definition:
            lines.append(self._definition_text())
        lines.append("}")
        return "\n".join(lines)

    def _definable(self):
        # a unary predicate not enumerated in S can be defined instead
        for name, args in self.preds.items():
            if name not in self.enumerated and len(args) == 1:
                self.defined = name
                return True
        return False

    def _definition_text(self) -> str:
        name = self.defined
        sort = self.preds[name][0]
        body = self._formula(depth=1, scope={"x": sort}, avoid={name})
        return f"  {{\n    {name}(x) <- {body}.\n  }}"

    def _sentence(self) -> str:
        # keep sentences off the defined symbol so the definition alone is
        # in charge of it; defined-vs-constraint interplay is tested elsewhere
        avoid = {self.defined} if self.defined else set()
        sort = self.rng.choice(list(self.sorts))
        var = "x"
        inner = self._formula(depth=self.rng.randint(1, 2),
                              scope={var: sort}, avoid=avoid)
        marker = self.rng.choice(["!", "?"])
        return f"{marker} {var} [{sort}] : {inner}"

    def _formula(self, depth: int, scope: dict, avoid: set) -> str:
        rng = self.rng
        if depth <= 0:
            return self._literal(scope, avoid)
        roll = rng.random()
        if roll < 0.2:
            return f"~({self._formula(depth - 1, scope, avoid)})"
        if roll < 0.35 and len(scope) < 3:
            var = f"y{len(scope)}"
            sort = rng.choice(list(self.sorts))
            marker = rng.choice(["!", "?"])
            inner = self._formula(depth - 1, {**scope, var: sort}, avoid)
            return f"({marker} {var} [{sort}] : {inner})"
        op = rng.choice(["&", "|", "=>", "<=>"])
        lhs = self._formula(depth - 1, scope, avoid)
        rhs = self._formula(depth - 1, scope, avoid)
        return f"({lhs}) {op} ({rhs})"

    def _literal(self, scope: dict, avoid: set) -> str:
        rng = self.rng
        usable = [p for p in self.preds if p not in avoid]
        if usable and rng.random() < 0.6:
            name = rng.choice(usable)
            args = [self._term(s, scope) for s in self.preds[name]]
            return f"{name}({', '.join(args)})" if args else name
        sort = rng.choice(list(self.sorts))
        op = rng.choice(["=", "~=", "<", ">", "=<", ">="])
        return f"{self._term(sort, scope)} {op} {self._term(sort, scope)}"

    def _term(self, sort: str, scope: dict) -> str:
        rng = self.rng
        candidates = [v for v, s in scope.items() if s == sort]
        funcs = [(n, a) for n, (a, out, _p) in self.funcs.items() if out == sort]
        roll = rng.random()
        if candidates and roll < 0.45:
            base = rng.choice(candidates)
        elif funcs and roll < 0.7:
            name, args = rng.choice(funcs)
            filled = [self._term(s, scope) for s in args]
            base = f"{name}({', '.join(filled)})" if filled else name
        else:
            base = str(rng.choice(self._domain(sort)))
        if rng.random() < 0.25:
            delta = rng.randint(-1, 2)
            return f"({base} + {delta})" if delta >= 0 else f"({base} - {-delta})"
        return base


def random_program_text(seed: int, max_space: int = 512) -> str:
    return ProgramGen(random.Random(seed), max_space).generate()
