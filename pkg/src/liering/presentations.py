"""Presentation notation for 2-generator nilpotent Lie rings.

Grammar (whitespace insignificant):

    presentation := '<' gens '|' relator (',' relator)* [',' 'class' INT] '>'
    gens         := IDENT (',' IDENT)*
    relator      := term (('+'|'-') term)*
    term         := [coeff '*'?] (pmul | word)
    pmul         := 'p' IDENT
    word         := (IDENT ['^' INT])+        -- left-normed
    coeff        := INT | 'w' | 'x' | 'y' | 'z'

Words are left-normed: "ba^3b" is (((b*a)*a)*a)*b.  A relator asserts that
its signed sum is zero.  The symbol w is always bound to a primitive root
mod p; x, y, z are free parameters supplied at instantiation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import gfplin
from .freenilp import free_ring
from .rings import LieRing, ideal_closure, is_consistent, quotient

PARAM_SYMBOLS = ("w", "x", "y", "z")
_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z]+)|([<>|,+\-^*]))")


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} (at position {pos})")
        self.pos = pos


@dataclass(frozen=True)
class Coeff:
    """A relator coefficient: mult * (symbol or 1)."""

    mult: int
    sym: str | None = None

    def value(self, binding: dict[str, int]) -> int:
        if self.sym is None:
            return self.mult
        if self.sym not in binding:
            raise ValueError(f"unbound parameter {self.sym!r}")
        return self.mult * binding[self.sym]


# terms: ("word", (gen_index, ...)) left-normed, or ("pmul", gen_index)
Term = tuple
Relator = list[tuple[Coeff, Term]]


@dataclass(frozen=True)
class Presentation:
    gens: tuple[str, ...]
    relators: tuple[tuple[tuple[Coeff, Term], ...], ...]
    class_bound: int

    @property
    def parameters(self) -> tuple[str, ...]:
        seen = []
        for rel in self.relators:
            for coeff, _ in rel:
                if coeff.sym and coeff.sym != "w" and coeff.sym not in seen:
                    seen.append(coeff.sym)
        return tuple(seen)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == m.start():
            if text[pos:].strip():
                raise ParseError(f"unexpected character {text[pos]!r}", pos)
            break
        num, letters, sym = m.groups()
        if num is not None:
            tokens.append(("num", int(num), m.start(1)))
        elif letters is not None:
            tokens.append(("letters", letters, m.start(2)))
        else:
            tokens.append(("sym", sym, m.start(3)))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind, value=None):
        tok = self.toks[self.i]
        if tok[0] != kind or (value is not None and tok[1] != value):
            raise ParseError(f"expected {value or kind}, got {tok[1]!r}", tok[2])
        self.i += 1
        return tok

    def parse(self) -> Presentation:
        self.take("sym", "<")
        gens = [self.take("letters")[1]]
        while self.peek()[:2] == ("sym", ","):
            self.take("sym", ",")
            gens.append(self.take("letters")[1])
        for g in gens:
            if len(g) != 1 or g in PARAM_SYMBOLS or g == "p":
                raise ParseError(f"invalid generator name {g!r}", 0)
        self.gens = gens
        self.take("sym", "|")
        relators = []
        class_bound = None
        while True:
            if self.peek()[:2] == ("letters", "class"):
                self.take("letters")
                class_bound = self.take("num")[1]
                break
            relators.append(self.parse_relator())
            if self.peek()[:2] == ("sym", ","):
                self.take("sym", ",")
                continue
            break
        self.take("sym", ">")
        self.take("end")
        if class_bound is None:
            raise ParseError("missing class bound", self.toks[-1][2])
        return Presentation(tuple(gens), tuple(tuple(r) for r in relators), class_bound)

    def parse_relator(self) -> Relator:
        terms = [self.parse_term(1)]
        while self.peek()[:2] in (("sym", "+"), ("sym", "-")):
            sign = 1 if self.take("sym")[1] == "+" else -1
            terms.append(self.parse_term(sign))
        return terms

    def parse_term(self, sign: int) -> tuple[Coeff, Term]:
        kind, val, pos = self.peek()
        coeff = Coeff(sign)
        had_num = False
        if kind == "num":
            self.take("num")
            coeff = Coeff(sign * val)
            had_num = True
            if self.peek()[:2] == ("sym", "*"):
                self.take("sym", "*")
            kind, val, pos = self.peek()
        if kind != "letters":
            raise ParseError("expected a word or p-multiple", pos)
        if val[0] in PARAM_SYMBOLS and val[0] not in self.gens:
            if had_num:
                raise ParseError("coefficient must be a single literal or symbol", pos)
            coeff = Coeff(coeff.mult, val[0])
            if len(val) > 1:
                self.toks[self.i] = ("letters", val[1:], pos + 1)
            else:
                self.take("letters")
                if self.peek()[:2] == ("sym", "*"):
                    self.take("sym", "*")
            kind, val, pos = self.peek()
            if kind != "letters":
                raise ParseError("expected a word or p-multiple after coefficient", pos)
        # p-multiple: run "p" + one generator letter, not followed by ^
        if val[0] == "p":
            if len(val) != 2 or val[1] not in self.gens:
                raise ParseError(f"malformed p-multiple {val!r}", pos)
            self.take("letters")
            return coeff, ("pmul", self.gens.index(val[1]))
        return coeff, ("word", tuple(self.parse_word()))

    def parse_word(self) -> list[int]:
        out = []
        while self.peek()[0] == "letters":
            run, pos = self.peek()[1], self.peek()[2]
            self.take("letters")
            for ch in run:
                if ch not in self.gens:
                    raise ParseError(f"unknown generator {ch!r}", pos)
                out.append(self.gens.index(ch))
            if self.peek()[:2] == ("sym", "^"):
                self.take("sym", "^")
                k = self.take("num")[1]
                if k < 1:
                    raise ParseError("exponent must be >= 1", pos)
                out.extend([out[-1]] * (k - 1))
        if not out:
            raise ParseError("empty word", self.peek()[2])
        return out


def parse(text: str) -> Presentation:
    """Parse presentation text; raises ParseError with a position on bad input."""
    return _Parser(text).parse()


def print_presentation(pres: Presentation) -> str:
    """Canonical normal form; parse(print_presentation(parse(s))) == parse(s)."""

    def fmt_word(idxs):
        out = []
        k = 0
        while k < len(idxs):
            run = 1
            while k + run < len(idxs) and idxs[k + run] == idxs[k]:
                run += 1
            out.append(pres.gens[idxs[k]] + (f"^{run}" if run > 1 else ""))
            k += run
        return "".join(out)

    rels = []
    for rel in pres.relators:
        parts = []
        for coeff, term in rel:
            body = f"p{pres.gens[term[1]]}" if term[0] == "pmul" else fmt_word(term[1])
            mag = abs(coeff.mult)
            prefix = (str(mag) if mag != 1 else "") + (coeff.sym or "")
            text = prefix + body
            parts.append(("-" if coeff.mult < 0 else "+") + text)
        s = "".join(parts)
        rels.append(s[1:] if s.startswith("+") else s)
    return f"<{','.join(pres.gens)}|{','.join(rels)},class {pres.class_bound}>"


def eval_term(ring: LieRing, gen_elems, term: Term):
    if term[0] == "pmul":
        return ring.pmul(gen_elems[term[1]])
    idxs = term[1]
    v = gen_elems[idxs[0]]
    for g in idxs[1:]:
        v = ring.mul(v, gen_elems[g])
    return v


def eval_relator(ring: LieRing, gen_elems, relator, binding: dict[str, int]):
    acc = ring.zero()
    for coeff, term in relator:
        acc = ring.add(acc, ring.smul(coeff.value(binding), eval_term(ring, gen_elems, term)))
    return acc


def instantiate(
    pres: Presentation,
    p: int,
    binding: dict[str, int] | None = None,
    w: int | None = None,
) -> LieRing:
    """Largest nilpotent Lie ring of p-class <= class_bound satisfying the relators.

    Imposes the relator ideal on the free bounded-class ring and echelonizes.
    The w symbol is bound to primitive_root(p) unless overridden.
    """
    if not gfplin.is_prime(p) or p < 5:
        raise ValueError("p must be a prime >= 5")
    full_binding = dict(binding or {})
    full_binding["w"] = w if w is not None else gfplin.primitive_root(p)
    for rel in pres.relators:
        for coeff, _ in rel:
            if coeff.sym and coeff.sym not in full_binding:
                raise ValueError(f"parameter {coeff.sym!r} not bound")

    F, gen_idx = free_ring(p, pres.class_bound, len(pres.gens))
    gen_elems = [F.basis(i) for i in gen_idx]
    seeds = [eval_relator(F, gen_elems, rel, full_binding) for rel in pres.relators]
    ideal = ideal_closure(F, seeds, gens=list(gen_idx))
    ring, _ = quotient(F, ideal, check=False)
    if ring.n == 0:
        raise ValueError("relators are inconsistent: the presented ring is zero")
    if not is_consistent(ring):
        raise AssertionError("instantiated ring failed the consistency gate")
    return ring
