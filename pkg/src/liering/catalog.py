"""Built-in presentation database of the maximal-class rings at orders p^7, p^8.

The order-p^7 catalog holds the p+8 characteristic-p rings of maximal class
(library names 7.623 ... 7.657, with 7.650 a p-member family).  The order-p^8
catalog holds one line per descendant presentation shape; a line with free
parameters expands to one entry per canonical parameter tuple produced by
the equivalence solver.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .presentations import Presentation, parse, instantiate
from .rings import LieRing

# -- order p^7 parents --------------------------------------------------------

P7_RELATORS: dict[str, str] = {
    "7.623": "bab,ba^3b",
    "7.627": "bab,ba^3b-ba^5",
    "7.633": "bab-ba^5,ba^3b",
    "7.641": "bab-ba^4,ba^3b",
    "7.646": "bab-ba^4,ba^3b-ba^5",
    "7.648": "bab-ba^4-ba^5,ba^3b",
    "7.650": "bab-ba^3,ba^3b-x*ba^5",
    "7.656": "bab-ba^3-ba^5,ba^3b-ba^5",
    "7.657": "bab-ba^3-w*ba^5,ba^3b-ba^5",
}

P7_ORDER = tuple(P7_RELATORS)


def p7_presentation(name: str) -> Presentation:
    if name not in P7_RELATORS:
        raise KeyError(f"unknown library name {name!r}")
    return parse(f"<a,b|{P7_RELATORS[name]},pa,pb,class 6>")


# -- order p^8 descendant lines -------------------------------------------------
#
# Each line: (subsection, line number, relator text, parameter names,
# constraints, equivalence action, comment).  Constraints are per parameter:
# "any", "ne0" (nonzero), or "ne1" (!= 1).  The equivalence action is either
# None (distinct tuples give non-isomorphic rings), ("pow", {param: k, ...})
# for the GF(p)* action v -> v * a^k, or ("sign", {param: -1, ...}) for the
# {+-1} action; parameters missing from the action map are fixed by it.


@dataclass(frozen=True)
class Line:
    subsection: str
    line: int
    relators: str
    params: tuple[str, ...] = ()
    constraints: dict = field(default_factory=dict)
    equiv: tuple | None = None
    comment: str = ""


def _L(sub, no, rel, params=(), cons=None, equiv=None, comment=""):
    return Line(sub, no, rel, tuple(params), dict(cons or {}), equiv, comment)


P8_LINES: list[Line] = [
    # descendants of 7.623
    _L("7.623", 1, "bab,ba^3b,pa,pb,ba^5b"),
    _L("7.623", 2, "bab,ba^3b,pa-ba^6,pb,ba^5b"),
    _L("7.623", 3, "bab,ba^3b,pa,pb-x*ba^6,ba^5b",
       ["x"], {"x": "ne0"}, ("pow", {"x": 6}), "x ~ xa^6"),
    _L("7.623", 4, "bab,ba^3b-ba^6,pa,pb,ba^5b"),
    _L("7.623", 5, "bab,ba^3b-ba^6,pa-x*ba^6,pb,ba^5b",
       ["x"], {"x": "ne0"}, ("pow", {"x": 8}), "x ~ xa^8"),
    _L("7.623", 6, "bab,ba^3b-ba^6,pa,pb-x*ba^6,ba^5b",
       ["x"], {"x": "ne0"}, ("pow", {"x": 6}), "x ~ xa^6"),
    _L("7.623", 7, "bab-ba^6,ba^3b,pa,pb,ba^5b"),
    _L("7.623", 8, "bab-ba^6,ba^3b,pa-x*ba^6,pb,ba^5b",
       ["x"], {"x": "ne0"}, ("pow", {"x": 10}), "x ~ xa^10"),
    _L("7.623", 9, "bab-ba^6,ba^3b,pa,pb-x*ba^6,ba^5b",
       ["x"], {"x": "ne0"}, ("pow", {"x": 6}), "x ~ xa^6"),
    _L("7.623", 10, "bab,ba^3b,pa,pb,ba^6"),
    _L("7.623", 11, "bab,ba^3b,pa-ba^5b,pb,ba^6"),
    _L("7.623", 12, "bab,ba^3b,pa-w*ba^5b,pb,ba^6"),
    _L("7.623", 13, "bab,ba^3b,pa,pb-ba^5b,ba^6"),
    _L("7.623", 14, "bab,ba^3b,pa-x*ba^5b,pb-ba^5b,ba^6",
       ["x"], {"x": "ne0"}, ("pow", {"x": 6}), "x ~ xa^6"),
    # descendants of 7.627
    _L("7.627", 1, "bab,ba^3b-ba^5,pa,pb"),
    _L("7.627", 2, "bab,ba^3b-ba^5,pa-x*ba^6,pb",
       ["x"], {"x": "ne0"}, ("pow", {"x": 7}), "x ~ xa^7"),
    _L("7.627", 3, "bab,ba^3b-ba^5,pa,pb-x*ba^6",
       ["x"], {"x": "ne0"}, ("pow", {"x": 6}), "x ~ xa^6"),
    _L("7.627", 4, "bab,ba^3b-ba^5,pa-x*ba^6,pb-y*ba^6",
       ["x", "y"], {"x": "ne0", "y": "ne0"}, ("pow", {"x": 7, "y": 6}),
       "[x,y] ~ [xa^7,ya^6]"),
    # descendants of 7.633
    _L("7.633", 1, "bab-ba^5,ba^3b,pa,pb,ba^5b"),
    _L("7.633", 2, "bab-ba^5,ba^3b,pa,pb-x*ba^6,ba^5b",
       ["x"], {"x": "ne0"}, ("pow", {"x": 6}), "x ~ xa^6"),
    _L("7.633", 3, "bab-ba^5,ba^3b,pa-x*ba^6,pb,ba^5b",
       ["x"], {"x": "ne0"}, ("pow", {"x": 9}), "x ~ xa^9"),
    _L("7.633", 4, "bab-ba^5-ba^6,ba^3b,pa,pb,ba^5b"),
    _L("7.633", 5, "bab-ba^5-ba^6,ba^3b,pa-x*ba^6,pb,ba^5b", ["x"], {"x": "ne0"}),
    _L("7.633", 6, "bab-ba^5-ba^6,ba^3b,pa,pb-x*ba^6,ba^5b", ["x"], {"x": "ne0"}),
    _L("7.633", 7, "bab-ba^5,ba^3b-ba^6,pa,pb,ba^5b"),
    _L("7.633", 8, "bab-ba^5,ba^3b-ba^6,pa-x*ba^6,pb,ba^5b", ["x"], {"x": "ne0"}),
    _L("7.633", 9, "bab-ba^5,ba^3b-ba^6,pa,pb-x*ba^6,ba^5b", ["x"], {"x": "ne0"}),
    _L("7.633", 10, "bab-ba^5,ba^3b,pa,pb,ba^6"),
    _L("7.633", 11, "bab-ba^5,ba^3b,pa-x*ba^5b,pb,ba^6",
       ["x"], {"x": "ne0"}, ("pow", {"x": 12}), "x ~ xa^12"),
    _L("7.633", 12, "bab-ba^5,ba^3b,pa,pb-x*ba^5b,ba^6",
       ["x"], {"x": "ne0"}, ("pow", {"x": 9}), "x ~ xa^9"),
    _L("7.633", 13, "bab-ba^5,ba^3b,pa-x*ba^5b,pb-y*ba^5b,ba^6",
       ["x", "y"], {"x": "ne0", "y": "ne0"}, ("pow", {"x": 12, "y": 9}),
       "[x,y] ~ [xa^12,ya^9]"),
    # descendants of 7.641
    _L("7.641", 1, "bab-ba^4,ba^3b-x*ba^6,pa,pb,ba^5b", ["x"], {"x": "any"}),
    _L("7.641", 2, "bab-ba^4,ba^3b-x*ba^6,pa-y*ba^6,pb,ba^5b",
       ["x", "y"], {"x": "any", "y": "ne0"}, ("pow", {"x": 0, "y": 8}),
       "[x,y] ~ [x,ya^8]"),
    _L("7.641", 3, "bab-ba^4,ba^3b-x*ba^6,pa,pb-y*ba^6,ba^5b",
       ["x", "y"], {"x": "any", "y": "ne0"}, ("pow", {"x": 0, "y": 6}),
       "[x,y] ~ [x,ya^6]"),
    _L("7.641", 4, "bab-ba^4,ba^3b-ba^6,pa-x*ba^6,pb-y*ba^6,ba^5b",
       ["x", "y"], {"x": "ne0", "y": "ne0"}, ("pow", {"x": 8, "y": 6}),
       "[x,y] ~ [xa^8,ya^6]"),
    _L("7.641", 5, "bab-ba^4,ba^3b,pa,pb,ba^6"),
    _L("7.641", 6, "bab-ba^4,ba^3b,pa-x*ba^5b,pb,ba^6",
       ["x"], {"x": "ne0"}, ("pow", {"x": 10}), "x ~ xa^10"),
    _L("7.641", 7, "bab-ba^4,ba^3b,pa,pb-x*ba^5b,ba^6",
       ["x"], {"x": "ne0"}, ("pow", {"x": 8}), "x ~ xa^8"),
    _L("7.641", 8, "bab-ba^4,ba^3b,pa-x*ba^5b,pb-y*ba^5b,ba^6",
       ["x", "y"], {"x": "ne0", "y": "ne0"}, ("pow", {"x": 10, "y": 8}),
       "[x,y] ~ [xa^10,ya^8]"),
    # descendants of 7.646
    _L("7.646", 1, "bab-ba^4,ba^3b-ba^5,pa-x*ba^6,pb-y*ba^6",
       ["x", "y"], {"x": "any", "y": "any"}),
    # descendants of 7.648
    _L("7.648", 1, "bab-ba^4-ba^5,ba^3b-x*ba^6,pa,pb,ba^5b", ["x"], {"x": "ne1"}),
    _L("7.648", 2, "bab-ba^4-ba^5,ba^3b-x*ba^6,pa-y*ba^6,pb,ba^5b",
       ["x", "y"], {"x": "ne1", "y": "ne0"}),
    _L("7.648", 3, "bab-ba^4-ba^5,ba^3b-x*ba^6,pa,pb-y*ba^6,ba^5b",
       ["x", "y"], {"x": "ne1", "y": "ne0"}),
    _L("7.648", 4, "bab-ba^4-ba^5,ba^3b-ba^6,pa-x*ba^6,pb-y*ba^6,ba^5b",
       ["x", "y"], {"x": "any", "y": "any"}),
    _L("7.648", 5, "bab-ba^4-ba^5,ba^3b,pa-x*ba^5b,pb-y*ba^5b,ba^6",
       ["x", "y"], {"x": "any", "y": "any"}),
    # descendants of the 7.650 family
    _L("7.650", 1, "bab-ba^3,ba^3b-ba^5,ba^5b,pa,pb"),
    _L("7.650", 2, "bab-ba^3,ba^3b-ba^5,ba^5b,pa-x*ba^6,pb",
       ["x"], {"x": "ne0"}, ("pow", {"x": 7}), "x ~ xa^7"),
    _L("7.650", 3, "bab-ba^3,ba^3b-ba^5,ba^5b,pa,pb-x*ba^6",
       ["x"], {"x": "ne0"}, ("pow", {"x": 6}), "x ~ xa^6"),
    _L("7.650", 4, "bab-ba^3,ba^3b-ba^5,ba^5b,pa-x*ba^6,pb-y*ba^6",
       ["x", "y"], {"x": "ne0", "y": "ne0"}, ("pow", {"x": 7, "y": 6}),
       "[x,y] ~ [xa^7,ya^6]"),
    _L("7.650", 5, "bab-ba^3,ba^3b-ba^5-ba^6,ba^5b,pa-x*ba^6,pb-y*ba^6",
       ["x", "y"], {"x": "any", "y": "any"}),
    _L("7.650", 6, "bab-ba^3-x*ba^6,ba^3b-ba^5,ba^5b,pa-y*ba^6,pb-z*ba^6",
       ["x", "y", "z"], {"x": "ne0", "y": "any", "z": "any"},
       ("pow", {"x": 3, "y": 7, "z": 6}), "[x,y,z] ~ [xa^3,ya^7,za^6]"),
    _L("7.650", 7, "bab-ba^3,ba^3b-x*ba^5,pa,pb,ba^5b", ["x"], {"x": "ne1"}),
    _L("7.650", 8, "bab-ba^3,ba^3b-x*ba^5,pa-y*ba^6,pb,ba^5b",
       ["x", "y"], {"x": "ne1", "y": "ne0"}, ("pow", {"x": 0, "y": 7}),
       "[x,y] ~ [x,ya^7]"),
    _L("7.650", 9, "bab-ba^3,ba^3b-x*ba^5,pa,pb-y*ba^6,ba^5b",
       ["x", "y"], {"x": "ne1", "y": "ne0"}, ("pow", {"x": 0, "y": 6}),
       "[x,y] ~ [x,ya^6]"),
    _L("7.650", 10, "bab-ba^3,ba^3b-x*ba^5,pa-y*ba^6,pb-z*ba^6,ba^5b",
       ["x", "y", "z"], {"x": "ne1", "y": "ne0", "z": "ne0"},
       ("pow", {"x": 0, "y": 7, "z": 6}), "[x,y,z] ~ [x,ya^7,za^6]"),
    _L("7.650", 11, "bab-ba^3,ba^3b-x*ba^5-ba^6,pa-y*ba^6,pb-z*ba^6,ba^5b",
       ["x", "y", "z"], {"x": "ne1", "y": "any", "z": "any"}),
    _L("7.650", 12, "bab-ba^3,ba^3b-3ba^5,pa,pb,ba^6"),
    _L("7.650", 13, "bab-ba^3,ba^3b-3ba^5,pa-x*ba^5b,pb,ba^6",
       ["x"], {"x": "ne0"}, ("pow", {"x": 8}), "x ~ xa^8"),
    _L("7.650", 14, "bab-ba^3,ba^3b-3ba^5,pa,pb-x*ba^5b,ba^6",
       ["x"], {"x": "ne0"}, ("pow", {"x": 7}), "x ~ xa^7"),
    _L("7.650", 15, "bab-ba^3,ba^3b-3ba^5,pa-x*ba^5b,pb-y*ba^5b,ba^6",
       ["x", "y"], {"x": "ne0", "y": "ne0"}, ("pow", {"x": 8, "y": 7}),
       "[x,y] ~ [xa^8,ya^7]"),
    _L("7.650", 16, "bab-ba^3,ba^3b-3ba^5-ba^5b,pa-x*ba^5b,pb-y*ba^5b,ba^6",
       ["x", "y"], {"x": "any", "y": "any"}, ("sign", {"y": -1}), "[x,y] ~ [x,-y]"),
    _L("7.650", 17, "bab-ba^3,ba^3b-3ba^5-w*ba^5b,pa-x*ba^5b,pb-y*ba^5b,ba^6",
       ["x", "y"], {"x": "any", "y": "any"}, ("sign", {"y": -1}), "[x,y] ~ [x,-y]"),
    _L("7.650", 18, "bab-ba^3,ba^3b-3ba^5-x*ba^6,pa-y*ba^6,pb-z*ba^6,ba^5b-ba^6",
       ["x", "y", "z"], {"x": "any", "y": "any", "z": "any"}),
    # descendants of 7.656
    _L("7.656", 1, "bab-ba^3-ba^5,ba^3b-ba^5,ba^5b,pa-x*ba^6,pb-y*ba^6",
       ["x", "y"], {"x": "any", "y": "any"}, ("sign", {"x": -1}), "[x,y] ~ [-x,y]"),
    _L("7.656", 2, "bab-ba^3-ba^5-x*ba^6,ba^3b-ba^5,ba^5b,pa-y*ba^6,pb-z*ba^6",
       ["x", "y", "z"], {"x": "ne0", "y": "any", "z": "any"},
       ("sign", {"x": -1}), "[x,y,z] ~ [-x,y,z]"),
    _L("7.656", 3, "bab-ba^3-ba^5,ba^3b-ba^5-x*ba^6,ba^5b,pa-y*ba^6,pb-z*ba^6",
       ["x", "y", "z"], {"x": "ne0", "y": "any", "z": "any"},
       ("sign", {"x": -1}), "[x,y,z] ~ [-x,y,z]"),
    # descendants of 7.657
    _L("7.657", 1, "bab-ba^3-w*ba^5,ba^3b-ba^5,ba^5b,pa-x*ba^6,pb-y*ba^6",
       ["x", "y"], {"x": "any", "y": "any"}, ("sign", {"x": -1}), "[x,y] ~ [-x,y]"),
    _L("7.657", 2, "bab-ba^3-w*ba^5-x*ba^6,ba^3b-ba^5,ba^5b,pa-y*ba^6,pb-z*ba^6",
       ["x", "y", "z"], {"x": "ne0", "y": "any", "z": "any"},
       ("sign", {"x": -1}), "[x,y,z] ~ [-x,y,z]"),
    _L("7.657", 3, "bab-ba^3-w*ba^5,ba^3b-ba^5-x*ba^6,ba^5b,pa-y*ba^6,pb-z*ba^6",
       ["x", "y", "z"], {"x": "ne0", "y": "any", "z": "any"},
       ("sign", {"x": -1}), "[x,y,z] ~ [-x,y,z]"),
]

SUBSECTIONS = tuple(P7_RELATORS)


@dataclass
class CatalogEntry:
    """One ring of the database: a presentation with a fixed parameter tuple."""

    library_name: str
    subsection: str
    line: int
    presentation: Presentation
    params: dict[str, int]
    constraints: dict[str, str]
    equivalence_comment: str
    p: int
    w: int
    _ring: LieRing | None = None

    @property
    def ring(self) -> LieRing:
        if self._ring is None:
            self._ring = instantiate(self.presentation, self.p, self.params, w=self.w)
        return self._ring

    def to_json_dict(self, with_ring: bool = True) -> dict:
        from .rings import ring_to_json
        import json as _json

        doc = {
            "library_name": self.library_name,
            "subsection": self.subsection,
            "line": self.line,
            "params": self.params,
            "constraints": self.constraints,
            "equivalence_comment": self.equivalence_comment,
        }
        if with_ring:
            doc["ring"] = _json.loads(ring_to_json(self.ring))
        return doc


def catalog_p7(p: int, w: int | None = None) -> list[CatalogEntry]:
    """The p+8 maximal-class characteristic-p rings of order p^7."""
    from . import gfplin

    if not gfplin.is_prime(p) or p < 5:
        raise ValueError("p must be a prime >= 5")
    wv = w if w is not None else gfplin.primitive_root(p)
    entries = []
    for name in P7_ORDER:
        pres = p7_presentation(name)
        if name == "7.650":
            for x in range(p):
                entries.append(
                    CatalogEntry(f"{name}-x{x}", name, 0, pres, {"x": x},
                                 {"x": "any"}, "", p, wv)
                )
        else:
            entries.append(CatalogEntry(name, name, 0, pres, {}, {}, "", p, wv))
    return entries


def p8_line_presentation(line: Line) -> Presentation:
    return parse(f"<a,b|{line.relators},class 7>")


def catalog_p8(p: int, w: int | None = None) -> list[CatalogEntry]:
    """Every order-p^8 maximal-class ring, one entry per canonical parameter tuple.

    Rings are instantiated lazily; the entry count equals the order-p^8
    maximal-class count polynomial evaluated at p.
    """
    from . import gfplin
    from .classification import solve_equivalence, EquivRelation

    if not gfplin.is_prime(p) or p < 5:
        raise ValueError("p must be a prime >= 5")
    wv = w if w is not None else gfplin.primitive_root(p)
    entries = []
    for line in P8_LINES:
        pres = p8_line_presentation(line)
        rel = EquivRelation(line.params, line.constraints, line.equiv)
        for tup in solve_equivalence(rel, p, w=wv):
            params = dict(zip(line.params, tup))
            name = f"{line.subsection}-d{line.line:02d}"
            entries.append(
                CatalogEntry(name, line.subsection, line.line, pres, params,
                             dict(line.constraints), line.comment, p, wv)
            )
    return entries
