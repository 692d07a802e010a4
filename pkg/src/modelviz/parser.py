"""Recursive-descent parser for the input language.

``parseProgram`` resolves extern vocabularies against earlier blocks and the
predeclared ``idpd3`` namespace, performs type derivation and checking, and
returof a fully resolved Program.  Script blocks (``procedure ... { ... }``)
are consumed as opaque text and dropped.
"""

from __future__ import annotations

from typing import Optional

from .core import (
    CONSTRUCTED,
    INT,
    STRING,
    FunctionDecl,
    FunctionMap,
    PredicateDecl,
    Relation,
    Sort,
    SortValues,
    Structure,
    Vocabulary,
)
from .errors import DuplicateName, ParseError, UnknownSymbol
from .lexer import AGGREGATE_NAMES, Lexer, Token
from .predefined import PREDEFINED_VOCABULARIES
from .syntax import (
    Arith,
    Atom,
    BinOp,
    Cmp,
    Definition,
    FuncApp,
    IntConst,
    Not,
    Pos,
    Program,
    Quant,
    QuantVar,
    Rule,
    StrConst,
    Theory,
    Truth,
)
from . import typecheck
from .ltc import derive_single_state_vocabulary

_CMP_TOKENS = {"EQ": "=", "NEQ": "!=", "LT": "<", "GT": ">", "LE": "<=", "GE": ">="}
_ARITH_TOKENS = {"PLUS", "MINUS", "STAR"}


class _TokenStream:
    def __init__(self, text: str):
        self._lexer = Lexer(text)
        self._buffer: list[Token] = []

    def peek(self, ahead: int = 0) -> Token:
        while len(self._buffer) <= ahead:
            self._buffer.append(self._lexer.next_token())
        return self._buffer[ahead]

    def next(self) -> Token:
        tok = self.peek()
        self._buffer.pop(0)
        return tok

    def expect(self, kind: str, what: str = "") -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {what or kind}, found {tok.text!r}",
                             tok.line, tok.column)
        return self.next()

    def expect_keyword(self, word: str) -> Token:
        tok = self.peek()
        if tok.kind != "KEYWORD" or tok.text != word:
            raise ParseError(f"expected '{word}', found {tok.text!r}",
                             tok.line, tok.column)
        return self.next()

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "KEYWORD" and tok.text == word

    def skip_script_block(self):
        if self._buffer:
            # the raw scan must restart at the '{' character, so nothing may
            # be buffered past the point where the parser decided to skip
            tok = self._buffer[0]
            if tok.kind != "LBRACE":
                raise ParseError("expected '{' to open a script block",
                                 tok.line, tok.column)
            self._buffer.clear()
            self._lexer.pos = tok.offset
            self._lexer.line = tok.line
            self._lexer.col = tok.column
        self._lexer.consume_raw_block()


def _pos(tok: Token) -> Pos:
    return Pos(tok.line, tok.column)


class Parser:
    def __init__(self, text: str):
        self.ts = _TokenStream(text)
        self.program = Program()
        # auto-generated single-state vocabularies, resolvable but not printed
        self.generated: dict[str, Vocabulary] = {}

    # --- program level ----------------------------------------------------

    def parse_program(self) -> Program:
        while True:
            tok = self.ts.peek()
            if tok.kind == "EOF":
                break
            if tok.kind != "KEYWORD":
                raise ParseError(f"expected a block keyword, found {tok.text!r}",
                                 tok.line, tok.column)
            if tok.text in ("vocabulary", "LTCvocabulary"):
                self._parse_vocabulary()
            elif tok.text == "theory":
                self._parse_theory()
            elif tok.text == "structure":
                self._parse_structure()
            elif tok.text == "procedure":
                self._skip_procedure()
            else:
                raise ParseError(f"unexpected keyword {tok.text!r}", tok.line, tok.column)
        self.program.generated = dict(self.generated)
        return self.program

    def _lookup_vocabulary(self, name: str, tok: Token) -> Vocabulary:
        voc = (self.program.vocabularies.get(name)
               or self.generated.get(name)
               or PREDEFINED_VOCABULARIES.get(name))
        if voc is None:
            raise UnknownSymbol(f"unknown vocabulary {name}", tok.line, tok.column)
        return voc

    def _parse_name_ref(self) -> tuple[str, Token]:
        tok = self.ts.expect("IDENT", "a name")
        name = tok.text
        if self.ts.peek().kind == "DOUBLECOLON":
            self.ts.next()
            tail = self.ts.expect("IDENT", "a name after '::'")
            name = f"{name}::{tail.text}"
        return name, tok

    def _skip_procedure(self):
        self.ts.expect_keyword("procedure")
        self.ts.expect("IDENT", "a procedure name")
        self.ts.expect("LPAREN")
        while self.ts.peek().kind not in ("RPAREN", "EOF"):
            self.ts.next()
        self.ts.expect("RPAREN")
        self.ts.skip_script_block()

    # --- vocabulary blocks --------------------------------------------------

    def _parse_vocabulary(self):
        kw = self.ts.next()
        ltc = kw.text == "LTCvocabulary"
        name_tok = self.ts.expect("IDENT", "a vocabulary name")
        name = name_tok.text
        self._check_fresh_name(name, name_tok)
        if self.ts.peek().kind == "COLON":  # tolerated, some sources write it
            self.ts.next()
        self.ts.expect("LBRACE")
        sorts: list[Sort] = []
        preds: list[PredicateDecl] = []
        funcs: list[FunctionDecl] = []
        externs: list[Vocabulary] = []
        while self.ts.peek().kind != "RBRACE":
            tok = self.ts.peek()
            if tok.kind == "EOF":
                raise ParseError("unterminated vocabulary block", tok.line, tok.column)
            if self.ts.at_keyword("type"):
                sorts.append(self._parse_sort_decl())
            elif self.ts.at_keyword("extern"):
                self.ts.next()
                self.ts.expect_keyword("vocabulary")
                ref, ref_tok = self._parse_name_ref()
                externs.append(self._lookup_vocabulary(ref, ref_tok))
            elif self.ts.at_keyword("partial") or tok.kind == "IDENT":
                decl = self._parse_symbol_decl()
                if isinstance(decl, PredicateDecl):
                    preds.append(decl)
                else:
                    funcs.append(decl)
            else:
                raise ParseError(f"unexpected {tok.text!r} in vocabulary",
                                 tok.line, tok.column)
        self.ts.expect("RBRACE")
        for decl in list(preds) + list(funcs):
            if decl.name in typecheck.BUILTIN_FUNCTIONS:
                raise DuplicateName(f"{decl.name} is a built-in function name")
        voc = Vocabulary(name, sorts, preds, funcs, externs, ltc=ltc)
        self.program.add_vocabulary(voc)
        if ltc:
            projected = derive_single_state_vocabulary(voc)
            if projected is not None:
                gen_name = f"{name}_ss"
                if gen_name not in self.program.vocabularies:
                    self.generated[gen_name] = projected.vocabulary

    def _parse_sort_decl(self) -> Sort:
        self.ts.expect_keyword("type")
        name_tok = self.ts.expect("IDENT", "a sort name")
        if self.ts.at_keyword("isa"):
            self.ts.next()
            base_tok = self.ts.expect("IDENT", "'int' or 'string'")
            if base_tok.text == "int":
                return Sort(name_tok.text, INT)
            if base_tok.text == "string":
                return Sort(name_tok.text, STRING)
            raise ParseError(f"unknown base type {base_tok.text!r}",
                             base_tok.line, base_tok.column)
        if self.ts.at_keyword("constructed"):
            self.ts.next()
            self.ts.expect_keyword("from")
            self.ts.expect("LBRACE")
            constructors = []
            while True:
                c = self.ts.expect("IDENT", "a constructor name")
                constructors.append(c.text)
                if self.ts.peek().kind == "COMMA":
                    self.ts.next()
                    continue
                break
            self.ts.expect("RBRACE")
            return Sort(name_tok.text, CONSTRUCTED, tuple(constructors))
        # a bare sort gets its integer domain from structures
        return Sort(name_tok.text, INT)

    def _parse_symbol_decl(self):
        partial = False
        if self.ts.at_keyword("partial"):
            self.ts.next()
            partial = True
        name_tok = self.ts.expect("IDENT", "a symbol name")
        args: list[str] = []
        if self.ts.peek().kind == "LPAREN":
            self.ts.next()
            if self.ts.peek().kind != "RPAREN":
                while True:
                    s = self.ts.expect("IDENT", "a sort name")
                    args.append(s.text)
                    if self.ts.peek().kind == "COMMA":
                        self.ts.next()
                        continue
                    break
            self.ts.expect("RPAREN")
        if self.ts.peek().kind == "COLON":
            self.ts.next()
            out = self.ts.expect("IDENT", "an output sort")
            return FunctionDecl(name_tok.text, tuple(args), out.text, partial)
        if partial:
            raise ParseError("'partial' applies to functions only",
                             name_tok.line, name_tok.column)
        return PredicateDecl(name_tok.text, tuple(args))

    # --- theory blocks ---------------------------------------------------------

    def _parse_theory(self):
        self.ts.expect_keyword("theory")
        name_tok = self.ts.expect("IDENT", "a theory name")
        self._check_fresh_name(name_tok.text, name_tok, kind="theory")
        self.ts.expect("COLON")
        voc_name, voc_tok = self._parse_name_ref()
        voc = self._lookup_vocabulary(voc_name, voc_tok)
        self.ts.expect("LBRACE")
        sentences = []
        definitions = []
        while self.ts.peek().kind != "RBRACE":
            tok = self.ts.peek()
            if tok.kind == "EOF":
                raise ParseError("unterminated theory block", tok.line, tok.column)
            if tok.kind == "LBRACE":
                definitions.append(self._parse_definition(voc))
            else:
                raw = self._parse_formula()
                self.ts.expect("DOT", "'.' after sentence")
                sentences.append(typecheck.check_sentence(raw, voc))
        self.ts.expect("RBRACE")
        self.program.add_theory(Theory(name_tok.text, voc, tuple(sentences),
                                       tuple(definitions)))

    def _parse_definition(self, voc: Vocabulary) -> Definition:
        self.ts.expect("LBRACE")
        rules = []
        while self.ts.peek().kind != "RBRACE":
            tok = self.ts.peek()
            if tok.kind == "EOF":
                raise ParseError("unterminated definition", tok.line, tok.column)
            rules.append(self._parse_rule(voc))
        self.ts.expect("RBRACE")
        return Definition(tuple(rules))

    def _parse_rule(self, voc: Vocabulary) -> Rule:
        head_tok = self.ts.expect("IDENT", "a rule head")
        head_args: tuple = ()
        if self.ts.peek().kind == "LPAREN":
            self.ts.next()
            args = []
            if self.ts.peek().kind != "RPAREN":
                while True:
                    args.append(self._parse_term())
                    if self.ts.peek().kind == "COMMA":
                        self.ts.next()
                        continue
                    break
            self.ts.expect("RPAREN")
            head_args = tuple(args)
        head_value = None
        if self.ts.peek().kind == "EQ":
            self.ts.next()
            head_value = self._parse_term()
        body = Truth(True, _pos(head_tok))
        if self.ts.peek().kind == "RULEARROW":
            self.ts.next()
            body = self._parse_formula()
        self.ts.expect("DOT", "'.' after rule")
        raw = Rule(head_tok.text, head_args, head_value, body, pos=_pos(head_tok))
        return typecheck.check_rule(raw, voc)

    # --- structure blocks ---------------------------------------------------------

    def _parse_structure(self):
        self.ts.expect_keyword("structure")
        name_tok = self.ts.expect("IDENT", "a structure name")
        self._check_fresh_name(name_tok.text, name_tok, kind="structure")
        self.ts.expect("COLON")
        voc_name, voc_tok = self._parse_name_ref()
        voc = self._lookup_vocabulary(voc_name, voc_tok)
        self.ts.expect("LBRACE")
        interps = {}
        sorts = voc.all_sorts()
        preds = voc.all_predicates()
        funcs = voc.all_functions()
        while self.ts.peek().kind != "RBRACE":
            sym_tok = self.ts.expect("IDENT", "a symbol name")
            sym = sym_tok.text
            if sym in interps:
                raise DuplicateName(f"{name_tok.text}: {sym} assigned twice")
            self.ts.expect("EQ", "'=' in an assignment")
            if self.ts.at_keyword("procedure"):
                tok = self.ts.peek()
                raise ParseError(
                    "procedure-valued interpretations are not supported; use the "
                    "built-in functions concat and str in a definition instead",
                    tok.line, tok.column)
            if sym in sorts:
                interps[sym] = self._parse_sort_enum(sym_tok)
            elif sym in preds:
                interps[sym] = self._parse_relation_enum(preds[sym], sym_tok)
            elif sym in funcs:
                interps[sym] = self._parse_function_enum(funcs[sym], sym_tok)
            else:
                raise UnknownSymbol(f"{sym} not declared in {voc.name}",
                                    sym_tok.line, sym_tok.column)
        self.ts.expect("RBRACE")
        self.program.add_structure(Structure(name_tok.text, voc, interps))

    def _parse_sort_enum(self, sym_tok: Token) -> SortValues:
        self.ts.expect("LBRACE", "'{' opening a sort enumeration")
        if self.ts.peek().kind == "RBRACE":
            raise ParseError("a sort cannot be empty", sym_tok.line, sym_tok.column)
        first = self._parse_element()
        if self.ts.peek().kind == "DOTDOT":
            self.ts.next()
            last = self._parse_element()
            self.ts.expect("RBRACE")
            if not isinstance(first, int) or not isinstance(last, int):
                raise ParseError("ranges take integer bounds", sym_tok.line, sym_tok.column)
            if first > last:
                raise ParseError("empty range", sym_tok.line, sym_tok.column)
            return SortValues(tuple(range(first, last + 1)))
        values = [first]
        while self.ts.peek().kind in ("SEMI", "COMMA"):
            self.ts.next()
            values.append(self._parse_element())
        self.ts.expect("RBRACE")
        return SortValues(tuple(values))

    def _parse_relation_enum(self, decl: PredicateDecl, sym_tok: Token) -> Relation:
        if self.ts.at_keyword("true") or self.ts.at_keyword("false"):
            tok = self.ts.next()
            if decl.arity != 0:
                raise ParseError(f"{decl.name} takes arguments; enumerate its tuples",
                                 tok.line, tok.column)
            return Relation(frozenset([()]) if tok.text == "true" else frozenset())
        groups = self._parse_tuple_groups()
        tuples = set()
        for group in groups:
            if len(group) != decl.arity:
                raise ParseError(
                    f"{decl.name} expects {decl.arity} columns, got {len(group)}",
                    sym_tok.line, sym_tok.column)
            tuples.add(tuple(group))
        return Relation(frozenset(tuples))

    def _parse_function_enum(self, decl: FunctionDecl, sym_tok: Token):
        if self.ts.peek().kind != "LBRACE":  # scalar constant, e.g. A = 4
            value = self._parse_element()
            if decl.arity != 0:
                raise ParseError(f"{decl.name} takes arguments; enumerate its graph",
                                 sym_tok.line, sym_tok.column)
            return FunctionMap((((), value),))
        groups = self._parse_tuple_groups()
        mapping = []
        for group in groups:
            if len(group) != decl.arity + 1:
                raise ParseError(
                    f"{decl.name} expects {decl.arity + 1} columns "
                    f"(arguments then value), got {len(group)}",
                    sym_tok.line, sym_tok.column)
            mapping.append((tuple(group[:-1]), group[-1]))
        return FunctionMap(tuple(mapping))

    def _parse_tuple_groups(self) -> list[list]:
        self.ts.expect("LBRACE", "'{' opening an enumeration")
        groups: list[list] = []
        while self.ts.peek().kind != "RBRACE":
            if self.ts.peek().kind == "LPAREN":
                self.ts.next()
                group = [self._parse_element()]
                while self.ts.peek().kind == "COMMA":
                    self.ts.next()
                    group.append(self._parse_element())
                self.ts.expect("RPAREN")
            else:
                group = [self._parse_element()]
                while self.ts.peek().kind == "COMMA":
                    self.ts.next()
                    group.append(self._parse_element())
            groups.append(group)
            if self.ts.peek().kind == "SEMI":
                self.ts.next()
                continue
            break
        self.ts.expect("RBRACE")
        return groups

    def _parse_element(self):
        tok = self.ts.peek()
        if tok.kind == "INT":
            self.ts.next()
            return int(tok.text)
        if tok.kind == "MINUS":
            self.ts.next()
            num = self.ts.expect("INT", "an integer after '-'")
            return -int(num.text)
        if tok.kind == "STRING":
            self.ts.next()
            return tok.text
        if tok.kind == "IDENT":
            self.ts.next()
            if self.ts.peek().kind == "LPAREN":  # constructor written as rect()
                self.ts.next()
                self.ts.expect("RPAREN")
            return tok.text
        raise ParseError(f"expected a domain value, found {tok.text!r}",
                         tok.line, tok.column)

    def _check_fresh_name(self, name: str, tok: Token, kind: str = "vocabulary"):
        table = {"vocabulary": self.program.vocabularies,
                 "theory": self.program.theories,
                 "structure": self.program.structures}[kind]
        if name in table or (kind == "vocabulary"
                             and (name in self.generated or name in PREDEFINED_VOCABULARIES)):
            raise DuplicateName(f"{kind} {name} declared twice")
        if "::" in name:
            raise ParseError("'::' is reserved for the predeclared namespace",
                             tok.line, tok.column)

    # --- formulas -----------------------------------------------------------

    def _parse_formula(self):
        return self._parse_equiv()

    def _parse_equiv(self):
        lhs = self._parse_implication()
        while self.ts.peek().kind == "EQUIV":
            tok = self.ts.next()
            rhs = self._parse_implication()
            lhs = BinOp("equiv", lhs, rhs, _pos(tok))
        return lhs

    def _parse_implication(self):
        lhs = self._parse_disjunction()
        tok = self.ts.peek()
        if tok.kind == "IMPLIES":
            self.ts.next()
            rhs = self._parse_implication()  # right associative
            return BinOp("implies", lhs, rhs, _pos(tok))
        if tok.kind == "IMPLIEDBY":
            while self.ts.peek().kind == "IMPLIEDBY":
                t = self.ts.next()
                rhs = self._parse_disjunction()
                lhs = BinOp("impliedby", lhs, rhs, _pos(t))
            if self.ts.peek().kind == "IMPLIES":
                t = self.ts.peek()
                raise ParseError("mixing '=>' and '<=' needs parentheses", t.line, t.column)
            return lhs
        return lhs

    def _parse_disjunction(self):
        lhs = self._parse_conjunction()
        while self.ts.peek().kind == "OR":
            tok = self.ts.next()
            rhs = self._parse_conjunction()
            lhs = BinOp("or", lhs, rhs, _pos(tok))
        return lhs

    def _parse_conjunction(self):
        lhs = self._parse_unary_formula()
        while self.ts.peek().kind == "AND":
            tok = self.ts.next()
            rhs = self._parse_unary_formula()
            lhs = BinOp("and", lhs, rhs, _pos(tok))
        return lhs

    def _parse_unary_formula(self):
        tok = self.ts.peek()
        if tok.kind == "NOT":
            self.ts.next()
            return Not(self._parse_unary_formula(), _pos(tok))
        if tok.kind in ("FORALL", "EXISTS"):
            return self._parse_quantifier()
        if tok.kind == "KEYWORD" and tok.text in ("true", "false"):
            self.ts.next()
            return Truth(tok.text == "true", _pos(tok))
        if tok.kind == "LPAREN" and not self._paren_wraps_term():
            self.ts.next()
            inner = self._parse_formula()
            self.ts.expect("RPAREN")
            return inner
        return self._parse_atom_or_comparison()

    def _parse_quantifier(self):
        tok = self.ts.next()
        kind = "forall" if tok.kind == "FORALL" else "exists"
        variables = []
        while True:
            v = self.ts.expect("IDENT", "a variable name")
            sort = None
            if self.ts.peek().kind == "LBRACKET":
                self.ts.next()
                s = self.ts.expect("IDENT", "a sort name")
                sort = s.text
                self.ts.expect("RBRACKET")
            variables.append(QuantVar(v.text, sort))
            if self.ts.peek().kind == "COMMA":
                self.ts.next()
                continue
            if self.ts.peek().kind == "IDENT":
                continue
            break
        self.ts.expect("COLON", "':' after quantified variables")
        # the body extends as far right as possible
        body = self._parse_formula()
        return Quant(kind, tuple(variables), body, _pos(tok))

    def _paren_wraps_term(self) -> bool:
        """Lookahead: does the parenthesis at the cursor wrap a term (so an
        arithmetic or comparison operator follows the matching close)?"""
        depth = 0
        i = 0
        while True:
            tok = self.ts.peek(i)
            if tok.kind == "EOF":
                return False
            if tok.kind == "LPAREN":
                depth += 1
            elif tok.kind == "RPAREN":
                depth -= 1
                if depth == 0:
                    after = self.ts.peek(i + 1)
                    return after.kind in _CMP_TOKENS or after.kind in _ARITH_TOKENS
            i += 1

    def _parse_atom_or_comparison(self):
        tok = self.ts.peek()
        lhs = self._parse_term()
        nxt = self.ts.peek()
        if nxt.kind in _CMP_TOKENS:
            op_tok = self.ts.next()
            rhs = self._parse_term()
            after = self.ts.peek()
            if after.kind in _CMP_TOKENS:
                raise ParseError("comparisons do not chain; use a conjunction",
                                 after.line, after.column)
            return Cmp(_CMP_TOKENS[op_tok.kind], lhs, rhs, _pos(op_tok))
        if isinstance(lhs, FuncApp):
            return Atom(lhs.name, lhs.args, lhs.pos)
        raise ParseError("expected a formula", tok.line, tok.column)

    # --- terms --------------------------------------------------------------

    def _parse_term(self):
        return self._parse_additive()

    def _parse_additive(self):
        lhs = self._parse_multiplicative()
        while self.ts.peek().kind in ("PLUS", "MINUS"):
            tok = self.ts.next()
            rhs = self._parse_multiplicative()
            lhs = Arith("+" if tok.kind == "PLUS" else "-", lhs, rhs, _pos(tok))
        return lhs

    def _parse_multiplicative(self):
        lhs = self._parse_primary_term()
        while self.ts.peek().kind == "STAR":
            tok = self.ts.next()
            rhs = self._parse_primary_term()
            lhs = Arith("*", lhs, rhs, _pos(tok))
        return lhs

    def _parse_primary_term(self):
        tok = self.ts.peek()
        if tok.kind == "INT":
            self.ts.next()
            return IntConst(int(tok.text), _pos(tok))
        if tok.kind == "MINUS":
            self.ts.next()
            if self.ts.peek().kind == "INT":
                num = self.ts.next()
                return IntConst(-int(num.text), _pos(tok))
            sub = self._parse_primary_term()
            return Arith("-", IntConst(0, _pos(tok)), sub, _pos(tok))
        if tok.kind == "STRING":
            self.ts.next()
            return StrConst(tok.text, _pos(tok))
        if tok.kind == "LPAREN":
            self.ts.next()
            inner = self._parse_term()
            self.ts.expect("RPAREN")
            return inner
        if tok.kind == "IDENT":
            self.ts.next()
            if tok.text in AGGREGATE_NAMES and self.ts.peek().kind == "LBRACE":
                raise ParseError("aggregates are not supported",
                                 tok.line, tok.column)
            args = []
            if self.ts.peek().kind == "LPAREN":
                self.ts.next()
                if self.ts.peek().kind != "RPAREN":
                    while True:
                        args.append(self._parse_term())
                        if self.ts.peek().kind == "COMMA":
                            self.ts.next()
                            continue
                        break
                self.ts.expect("RPAREN")
            return FuncApp(tok.text, tuple(args), _pos(tok))
        raise ParseError(f"expected a term, found {tok.text!r}", tok.line, tok.column)


def parse_program(text: str) -> Program:
    """Parse, resolve and type-check one input text."""
    return Parser(text).parse_program()
