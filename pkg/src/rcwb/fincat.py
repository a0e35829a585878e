"""Finite categories as explicit composition tables.

Objects and morphisms are dense non-negative integers.  Composition is a
total table on composable pairs; limits and colimits are found by exhaustive
search and verified against every (co)cone, so a returned answer is a
certificate, not a guess.  All canonical choices break ties by smallest id.

Everything here is immutable after construction and safe for concurrent
read-only use.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .reports import LawReport, Violation


class FinCategory:
    """A finite category given by explicit tables.

    comp maps (g, f) -> g∘f and is defined exactly when tgt(f) == src(g).
    """

    def __init__(self, n_objects, mor_src, mor_tgt, identity, comp,
                 obj_names=None, mor_names=None):
        self.n_objects = n_objects
        self.objects = tuple(range(n_objects))
        self.mor_src = tuple(mor_src)
        self.mor_tgt = tuple(mor_tgt)
        self.identity = tuple(identity)
        self.comp = dict(comp)
        self.n_morphisms = len(self.mor_src)
        self.obj_names = tuple(obj_names) if obj_names else tuple(
            str(a) for a in self.objects)
        self.mor_names = tuple(mor_names) if mor_names else tuple(
            str(f) for f in range(self.n_morphisms))

        hom = {}
        for f in range(self.n_morphisms):
            hom.setdefault((self.mor_src[f], self.mor_tgt[f]), []).append(f)
        self._hom = {k: tuple(v) for k, v in hom.items()}
        self._into = {b: tuple(f for f in range(self.n_morphisms)
                               if self.mor_tgt[f] == b)
                      for b in self.objects}
        self._pullback_cache = {}
        self._isos = None

    # -- basic accessors ---------------------------------------------------

    def src(self, f):
        return self.mor_src[f]

    def tgt(self, f):
        return self.mor_tgt[f]

    def hom(self, a, b):
        return self._hom.get((a, b), ())

    def into(self, b):
        """All morphisms with target b."""
        return self._into[b]

    def morphisms(self):
        return range(self.n_morphisms)

    def compose(self, g, f):
        """g ∘ f.  KeyError on a non-composable pair."""
        return self.comp[(g, f)]

    def composable(self, g, f):
        return self.mor_tgt[f] == self.mor_src[g]

    def is_identity(self, f):
        return self.identity[self.mor_src[f]] == f and \
            self.mor_src[f] == self.mor_tgt[f]

    def mor_name(self, f):
        return self.mor_names[f]

    # -- isomorphisms ------------------------------------------------------

    def isos(self):
        """All isomorphisms, with their inverses: dict f -> f_inv."""
        if self._isos is None:
            out = {}
            for f in self.morphisms():
                a, b = self.mor_src[f], self.mor_tgt[f]
                for g in self.hom(b, a):
                    if self.comp[(g, f)] == self.identity[a] and \
                            self.comp[(f, g)] == self.identity[b]:
                        out[f] = g
                        break
            self._isos = out
        return self._isos

    def is_iso(self, f):
        return f in self.isos()


def validate_category(c: FinCategory) -> LawReport:
    """Check identity and associativity laws plus comp-table totality.

    Violations are report entries; an empty report means c is a category.
    """
    report = LawReport("category")
    n = c.n_morphisms
    for a in c.objects:
        i = c.identity[a]
        if not (0 <= i < n and c.mor_src[i] == a and c.mor_tgt[i] == a):
            report.add("ID-SHAPE", (a,), "identity is not an endomorphism")
    for f in c.morphisms():
        il = c.identity[c.mor_tgt[f]]
        ir = c.identity[c.mor_src[f]]
        if c.comp.get((il, f)) != f:
            report.add("ID-LEFT", (il, f), "comp(id, f) != f")
        if c.comp.get((f, ir)) != f:
            report.add("ID-RIGHT", (f, ir), "comp(f, id) != f")
    for (g, f), gf in c.comp.items():
        if c.mor_tgt[f] != c.mor_src[g]:
            report.add("COMP-DOMAIN", (g, f), "entry on non-composable pair")
            continue
        if not (c.mor_src[gf] == c.mor_src[f] and c.mor_tgt[gf] == c.mor_tgt[g]):
            report.add("COMP-SHAPE", (g, f, gf), "composite has wrong endpoints")
    for g in c.morphisms():
        for f in c.into(c.mor_src[g]):
            if (g, f) not in c.comp:
                report.add("COMP-MISSING", (g, f), "composable pair without entry")
    # associativity: h ∘ (g ∘ f) == (h ∘ g) ∘ f
    for g in c.morphisms():
        b = c.mor_tgt[g]
        for f in c.into(c.mor_src[g]):
            gf = c.comp.get((g, f))
            if gf is None:
                continue
            for h in c.morphisms():
                if c.mor_src[h] != b:
                    continue
                lhs = c.comp.get((h, gf))
                hg = c.comp.get((h, g))
                rhs = None if hg is None else c.comp.get((hg, f))
                if lhs != rhs or lhs is None:
                    report.add("ASSOC", (h, g, f), "h(gf) != (hg)f")
    return report


def is_mono(c: FinCategory, m) -> bool:
    """True iff m is left-cancellable, decided by exhaustive pair scan."""
    if not 0 <= m < c.n_morphisms:
        raise ValueError(f"unknown morphism id {m}")
    a = c.mor_src[m]
    for u in c.into(a):
        for v in c.into(a):
            if u >= v or c.mor_src[u] != c.mor_src[v]:
                continue
            if c.comp[(m, u)] == c.comp[(m, v)]:
                return False
    return True


# -- diagrams, cones, cocones ----------------------------------------------

@dataclass(frozen=True)
class Diagram:
    """A functor from a finite shape category into a target category."""
    shape: FinCategory
    obj_map: tuple
    mor_map: tuple

    def check(self, c: FinCategory) -> bool:
        s = self.shape
        for u in s.morphisms():
            du = self.mor_map[u]
            if c.mor_src[du] != self.obj_map[s.mor_src[u]]:
                return False
            if c.mor_tgt[du] != self.obj_map[s.mor_tgt[u]]:
                return False
        for a in s.objects:
            if self.mor_map[s.identity[a]] != c.identity[self.obj_map[a]]:
                return False
        for (g, f), gf in s.comp.items():
            if c.comp[(self.mor_map[g], self.mor_map[f])] != self.mor_map[gf]:
                return False
        return True


@dataclass(frozen=True)
class Cocone:
    apex: int
    legs: tuple  # indexed by shape object


@dataclass(frozen=True)
class PullbackCone:
    """Terminal cone over a cospan (f, g): f∘p == g∘q."""
    apex: int
    p: int  # apex -> src(f)
    q: int  # apex -> src(g)


def pullback(c: FinCategory, f, g):
    """Canonical pullback of the cospan (f, g), or None.

    Terminality is certified against every commuting square; the winner is
    the first terminal cone in (apex, p, q) order.
    """
    if c.mor_tgt[f] != c.mor_tgt[g]:
        raise ValueError("pullback needs a cospan: tgt(f) != tgt(g)")
    key = (f, g)
    if key in c._pullback_cache:
        return c._pullback_cache[key]
    x, y = c.mor_src[f], c.mor_src[g]
    cones = {}
    for pb in c.objects:
        cs = []
        for p in c.hom(pb, x):
            fp = c.comp[(f, p)]
            for q in c.hom(pb, y):
                if fp == c.comp[(g, q)]:
                    cs.append((p, q))
        cones[pb] = cs
    result = None
    for apex in c.objects:
        for (p, q) in cones[apex]:
            if _is_terminal_cone(c, cones, apex, p, q):
                result = PullbackCone(apex, p, q)
                break
        if result is not None:
            break
    c._pullback_cache[key] = result
    return result


def _is_terminal_cone(c, cones, apex, p, q):
    for other in c.objects:
        if not cones[other]:
            continue
        counts = {}
        for h in c.hom(other, apex):
            k = (c.comp[(p, h)], c.comp[(q, h)])
            counts[k] = counts.get(k, 0) + 1
        for cone in cones[other]:
            if counts.get(cone, 0) != 1:
                return False
    return True


def cocones_at(c: FinCategory, d: Diagram, apex):
    """All cocones under d with the given apex, by backtracking."""
    s = d.shape
    n = s.n_objects
    arrows = [u for u in s.morphisms() if not s.is_identity(u)]
    out = []
    legs = [None] * n

    def extend(k):
        if k == n:
            out.append(tuple(legs))
            return
        for leg in c.hom(d.obj_map[k], apex):
            legs[k] = leg
            ok = True
            for u in arrows:
                i, j = s.mor_src[u], s.mor_tgt[u]
                if legs[i] is None or legs[j] is None:
                    continue
                if (i == k or j == k) and \
                        c.comp[(legs[j], d.mor_map[u])] != legs[i]:
                    ok = False
                    break
            if ok:
                extend(k + 1)
        legs[k] = None

    extend(0)
    return out


def colimit(c: FinCategory, d: Diagram):
    """Canonical initial cocone under d, or None.

    Initiality is certified: the candidate admits exactly one mediating
    morphism to every cocone (checked via a bijection count per apex).
    """
    if not d.check(c):
        raise ValueError("invalid diagram")
    all_cocones = {apex: cocones_at(c, d, apex) for apex in c.objects}
    n = d.shape.n_objects
    for apex in c.objects:
        for legs in sorted(all_cocones[apex]):
            if _is_initial_cocone(c, all_cocones, apex, legs, n):
                return Cocone(apex, legs)
    return None


def _is_initial_cocone(c, all_cocones, apex, legs, n):
    for other in c.objects:
        homs = c.hom(apex, other)
        targets = all_cocones[other]
        if len(homs) != len(targets):
            return False
        counts = {}
        for h in homs:
            k = tuple(c.comp[(h, leg)] for leg in legs)
            counts[k] = counts.get(k, 0) + 1
        for t in targets:
            if counts.get(t, 0) != 1:
                return False
    return True


def mediating(c: FinCategory, d: Diagram, coc: Cocone, other: Cocone):
    """The unique morphism h with h∘leg_i == other.legs[i]; None if absent."""
    found = None
    for h in c.hom(coc.apex, other.apex):
        if all(c.comp[(h, coc.legs[i])] == other.legs[i]
               for i in range(len(coc.legs))):
            if found is not None:
                return None
            found = h
    return found


def empty_diagram() -> Diagram:
    shape = FinCategory(0, (), (), (), {})
    return Diagram(shape, (), ())


def initial_object(c: FinCategory):
    """The initial object as the colimit of the empty diagram, or None."""
    coc = colimit(c, empty_diagram())
    return None if coc is None else coc.apex


# -- functors ----------------------------------------------------------------

@dataclass(frozen=True)
class Functor:
    source: FinCategory
    target: FinCategory
    obj_map: tuple
    mor_map: tuple

    def check(self) -> bool:
        s, t = self.source, self.target
        for f in s.morphisms():
            ff = self.mor_map[f]
            if t.mor_src[ff] != self.obj_map[s.mor_src[f]]:
                return False
            if t.mor_tgt[ff] != self.obj_map[s.mor_tgt[f]]:
                return False
        for a in s.objects:
            if self.mor_map[s.identity[a]] != t.identity[self.obj_map[a]]:
                return False
        for (g, f), gf in s.comp.items():
            if t.comp[(self.mor_map[g], self.mor_map[f])] != self.mor_map[gf]:
                return False
        return True

    def is_full_and_faithful(self) -> bool:
        s, t = self.source, self.target
        for a in s.objects:
            for b in s.objects:
                images = [self.mor_map[f] for f in s.hom(a, b)]
                codomain = t.hom(self.obj_map[a], self.obj_map[b])
                if len(set(images)) != len(images):
                    return False
                if set(images) != set(codomain):
                    return False
        return True


def identity_functor(c: FinCategory) -> Functor:
    return Functor(c, c, tuple(c.objects), tuple(c.morphisms()))


def compose_functors(g: Functor, f: Functor) -> Functor:
    if f.target is not g.source:
        raise ValueError("functors not composable")
    return Functor(f.source, g.target,
                   tuple(g.obj_map[a] for a in f.obj_map),
                   tuple(g.mor_map[m] for m in f.mor_map))


# -- subcategories -----------------------------------------------------------

@dataclass(frozen=True)
class Subcategory:
    """A subcategory with reindexed dense ids, plus translation tables."""
    cat: FinCategory
    obj_old: tuple     # new object id -> old object id
    mor_old: tuple     # new morphism id -> old morphism id
    obj_new: dict      # old -> new
    mor_new: dict      # old -> new


def subcategory(c: FinCategory, objs, mors) -> Subcategory:
    """Restrict c to the given objects and morphisms (must be closed)."""
    objs = sorted(objs)
    mors = sorted(mors)
    obj_new = {a: i for i, a in enumerate(objs)}
    mor_new = {f: i for i, f in enumerate(mors)}
    for f in mors:
        if c.mor_src[f] not in obj_new or c.mor_tgt[f] not in obj_new:
            raise ValueError(f"morphism {f} has endpoints outside the subcategory")
    for a in objs:
        if c.identity[a] not in mor_new:
            raise ValueError(f"identity of object {a} missing")
    comp = {}
    for g in mors:
        for f in mors:
            if c.mor_tgt[f] == c.mor_src[g]:
                gf = c.comp[(g, f)]
                if gf not in mor_new:
                    raise ValueError(
                        f"composite of {g} and {f} escapes the subcategory")
                comp[(mor_new[g], mor_new[f])] = mor_new[gf]
    cat = FinCategory(
        len(objs),
        tuple(obj_new[c.mor_src[f]] for f in mors),
        tuple(obj_new[c.mor_tgt[f]] for f in mors),
        tuple(mor_new[c.identity[a]] for a in objs),
        comp,
        obj_names=tuple(c.obj_names[a] for a in objs),
        mor_names=tuple(c.mor_names[f] for f in mors),
    )
    return Subcategory(cat, tuple(objs), tuple(mors), obj_new, mor_new)
