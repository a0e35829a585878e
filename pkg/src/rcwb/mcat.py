"""M-categories, Sub_M posets, the Par construction, matching diagrams,
the geometric criterion, MTotal and the Karoubi splitting.

Subobjects and spans are normalised to canonical representatives (smallest
ids after explicit iso search), so equality is plain component equality.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .fincat import (Cocone, Diagram, FinCategory, Functor, PullbackCone,
                     Subcategory, colimit, is_mono, mediating, pullback,
                     subcategory)
from .reports import InternalInvariantError, LawReport
from .restriction import (RestrictionCategory, is_restriction_idempotent,
                          is_total, restriction_idempotents,
                          total_subcategory)


@dataclass(frozen=True)
class MCategory:
    base: FinCategory
    monics: frozenset


def check_m_system(mc: MCategory) -> LawReport:
    """The three stable-system conditions, checked exhaustively."""
    c = mc.base
    report = LawReport("m-system")
    for m in mc.monics:
        if not is_mono(c, m):
            report.add("M-MONO", (m,), "member of M is not monic")
    for f, _ in c.isos().items():
        if f not in mc.monics:
            report.add("M-ISO", (f,), "isomorphism missing from M")
    for m in sorted(mc.monics):
        for n in sorted(mc.monics):
            if c.mor_tgt[n] == c.mor_src[m]:
                if c.comp[(m, n)] not in mc.monics:
                    report.add("M-COMP", (m, n), "M not closed under composition")
    for m in sorted(mc.monics):
        b = c.mor_tgt[m]
        for f in c.into(b):
            cone = pullback(c, f, m)
            if cone is None:
                report.add("M-PB", (m, f), "pullback of m along f missing")
            elif cone.p not in mc.monics:
                report.add("M-PB", (m, f, cone.p),
                           "pullback leg opposite m not in M")
    return report


# -- M-subobjects ------------------------------------------------------------

def subobject_rep(mc: MCategory, m) -> int:
    """Canonical representative of the iso-class of the monic m."""
    c = mc.base
    dom = c.mor_src[m]
    best = m
    for phi, _ in c.isos().items():
        if c.mor_tgt[phi] == dom:
            cand = c.comp[(m, phi)]
            if cand < best:
                best = cand
    return best


def pullback_subobject(mc: MCategory, f, m) -> int:
    """f*(m): the canonical subobject of src(f) obtained by pulling the
    monic m back along f."""
    cone = pullback(mc.base, f, m)
    if cone is None:
        raise InternalInvariantError(
            f"pullback of monic {m} along {f} does not exist")
    return subobject_rep(mc, cone.p)


@dataclass(frozen=True)
class SubMPoset:
    """The poset of canonical M-subobjects of one object."""
    mc: MCategory
    obj: int
    elements: tuple

    def top(self):
        return self.mc.base.identity[self.obj]

    def leq(self, m, n) -> bool:
        c = self.mc.base
        return any(c.comp[(n, f)] == m
                   for f in c.hom(c.mor_src[m], c.mor_src[n]))

    def meet(self, m, n) -> int:
        c = self.mc.base
        cone = pullback(c, m, n)
        if cone is None:
            raise InternalInvariantError("missing meet pullback in Sub_M")
        return subobject_rep(self.mc, c.comp[(m, cone.p)])

    def join(self, family):
        """Join via the matching-diagram colimit; None when it fails."""
        mcol = matching_colimit(self.mc, tuple(family), self.obj)
        if mcol is None or mcol.mu not in self.mc.monics:
            return None
        return subobject_rep(self.mc, mcol.mu)


def sub_m(mc: MCategory, obj) -> SubMPoset:
    c = mc.base
    reps = sorted({subobject_rep(mc, m)
                   for m in mc.monics if c.mor_tgt[m] == obj})
    return SubMPoset(mc, obj, tuple(reps))


# -- matching diagrams -------------------------------------------------------

@dataclass(frozen=True)
class MatchingDiagram:
    diagram: Diagram
    family: tuple          # the monics m_i, shape objects 0..k-1
    pair_objects: dict     # (i, j) -> shape object id, for i != j


def matching_diagram(mc: MCategory, family, obj=None) -> MatchingDiagram:
    """The diagram of pairwise pullbacks of a family of M-subobjects."""
    c = mc.base
    family = tuple(family)
    if obj is None:
        if not family:
            raise ValueError("empty family needs an explicit target object")
        obj = c.mor_tgt[family[0]]
    for m in family:
        if m not in mc.monics or c.mor_tgt[m] != obj:
            raise ValueError(f"{m} is not an M-subobject of {obj}")
    k = len(family)
    shape_objs = [c.mor_src[m] for m in family]
    pair_objects = {}
    arrows_src, arrows_tgt, arrow_images = [], [], []
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            cone = pullback(c, family[i], family[j])
            if cone is None:
                raise InternalInvariantError(
                    "missing pairwise pullback in matching diagram")
            idx = len(shape_objs)
            pair_objects[(i, j)] = idx
            shape_objs.append(cone.apex)
            arrows_src.extend([idx, idx])
            arrows_tgt.extend([i, j])
            arrow_images.extend([cone.p, cone.q])
    n = len(shape_objs)
    # identities first, then the projection arrows
    mor_src = list(range(n)) + arrows_src
    mor_tgt = list(range(n)) + arrows_tgt
    identity = list(range(n))
    comp = {}
    for f in range(len(mor_src)):
        comp[(identity[mor_tgt[f]], f)] = f
        comp[(f, identity[mor_src[f]])] = f
    shape = FinCategory(n, mor_src, mor_tgt, identity, comp)
    obj_map = tuple(shape_objs)
    mor_map = tuple(c.identity[shape_objs[a]] for a in range(n)) + \
        tuple(arrow_images)
    return MatchingDiagram(Diagram(shape, obj_map, mor_map),
                           family, pair_objects)


@dataclass(frozen=True)
class MatchingColimit:
    md: MatchingDiagram
    cocone: Cocone      # the colimit: legs a_i into the union
    mu: int             # induced map from the union into the target object


def matching_colimit(mc: MCategory, family, obj=None):
    """Colimit of the matching diagram plus the induced map, or None."""
    c = mc.base
    family = tuple(family)
    if obj is None:
        obj = c.mor_tgt[family[0]]
    md = matching_diagram(mc, family, obj)
    coc = colimit(c, md.diagram)
    if coc is None:
        return None
    k = len(family)
    target_legs = list(family)
    for (i, j), idx in sorted(md.pair_objects.items(), key=lambda kv: kv[1]):
        arrow_to_i = md.diagram.mor_map[
            _pair_arrow(md, idx, i)]
        target_legs.append(c.comp[(family[i], arrow_to_i)])
    mu = mediating(c, md.diagram, coc, Cocone(obj, tuple(target_legs)))
    if mu is None:
        raise InternalInvariantError("no unique induced map from matching colimit")
    return MatchingColimit(md, coc, mu)


def _pair_arrow(md: MatchingDiagram, pair_idx, target):
    s = md.diagram.shape
    for u in s.morphisms():
        if not s.is_identity(u) and s.mor_src[u] == pair_idx \
                and s.mor_tgt[u] == target:
            return u
    raise InternalInvariantError("matching diagram arrow missing")


def is_geometric(mc: MCategory, max_family=None) -> LawReport:
    """Theorem-style criterion: matching colimits exist, their induced maps
    lie in M, and they are stable under pullback.  Lists the first failing
    family per object."""
    c = mc.base
    report = LawReport("geometric")
    for obj in c.objects:
        poset = sub_m(mc, obj)
        failed = False
        for r in range(len(poset.elements) + 1):
            if failed or (max_family is not None and r > max_family):
                break
            for family in itertools.combinations(poset.elements, r):
                mcol = matching_colimit(mc, family, obj)
                if mcol is None:
                    report.add("GEO-COLIM", (obj,) + family,
                               "matching colimit does not exist")
                    failed = True
                    break
                if mcol.mu not in mc.monics:
                    report.add("GEO-MU", (obj,) + family + (mcol.mu,),
                               "induced map not in M")
                    failed = True
                    break
                if not _stable_family(mc, obj, family, mcol.mu):
                    report.add("GEO-STAB", (obj,) + family,
                               "matching colimit not stable under pullback")
                    failed = True
                    break
    return report


def _stable_family(mc, obj, family, mu):
    c = mc.base
    for f in c.into(obj):
        pulled = tuple(sorted({pullback_subobject(mc, f, m) for m in family}))
        mcol = matching_colimit(mc, pulled, c.mor_src[f])
        if mcol is None or mcol.mu not in mc.monics:
            return False
        if subobject_rep(mc, mcol.mu) != pullback_subobject(mc, f, mu):
            return False
    return True


def heyting_check(mc: MCategory, obj, max_family=None) -> LawReport:
    """Distributivity m ∧ ⋁ n_i == ⋁ (m ∧ n_i) over all finite families."""
    report = LawReport("heyting")
    poset = sub_m(mc, obj)
    for m in poset.elements:
        for r in range(len(poset.elements) + 1):
            if max_family is not None and r > max_family:
                break
            for family in itertools.combinations(poset.elements, r):
                lhs_join = poset.join(family)
                if lhs_join is None:
                    report.add("HEYT-JOIN", (obj,) + family, "join missing")
                    continue
                lhs = poset.meet(m, lhs_join)
                meets = tuple(sorted({poset.meet(m, n) for n in family}))
                rhs = poset.join(meets)
                if lhs != rhs:
                    report.add("HEYT-DIST", (obj, m) + family,
                               "m ∧ ⋁n_i != ⋁(m ∧ n_i)")
    return report


def pullback_preserves_joins(mc: MCategory, f, max_family=None) -> LawReport:
    """f*(⋁ m_i) == ⋁ f*(m_i) over all families in Sub_M(tgt f)."""
    c = mc.base
    report = LawReport("pullback-joins")
    obj = c.mor_tgt[f]
    poset = sub_m(mc, obj)
    dom_poset = sub_m(mc, c.mor_src[f])
    for r in range(len(poset.elements) + 1):
        if max_family is not None and r > max_family:
            break
        for family in itertools.combinations(poset.elements, r):
            j = poset.join(family)
            if j is None:
                report.add("PBJ-JOIN", (obj,) + family, "join missing")
                continue
            lhs = pullback_subobject(mc, f, j)
            pulled = tuple(sorted({pullback_subobject(mc, f, m)
                                   for m in family}))
            rhs = dom_poset.join(pulled)
            if lhs != rhs:
                report.add("PBJ", (f,) + family, "f*(⋁m_i) != ⋁f*(m_i)")
    return report


# -- the Par construction ----------------------------------------------------

@dataclass(frozen=True)
class ParCategory:
    """Par(C, M) with canonical span representatives.

    Objects are shared with the base M-category; morphism i is the span
    spans[i] == (m, f) with m in M.
    """
    rc: RestrictionCategory
    mc: MCategory
    spans: tuple
    span_id: dict  # canonical (m, f) -> morphism id

    def canonical_span(self, m, f):
        c = self.mc.base
        dom = c.mor_src[m]
        best = (c.mor_src[m], m, f)
        for phi, _ in c.isos().items():
            if c.mor_tgt[phi] == dom:
                cand = (c.mor_src[phi], c.comp[(m, phi)], c.comp[(f, phi)])
                if cand < best:
                    best = cand
        return best[1], best[2]

    def id_of_span(self, m, f):
        return self.span_id[self.canonical_span(m, f)]

    def compose_spans(self, second, first):
        """(n, g) ∘ (m, f) by pullback, canonicalised."""
        c = self.mc.base
        m, f = first
        n, g = second
        cone = pullback(c, f, n)
        if cone is None:
            raise InternalInvariantError("missing pullback in Par composition")
        return self.canonical_span(c.comp[(m, cone.p)], c.comp[(g, cone.q)])


def par(mc: MCategory, verify=True) -> ParCategory:
    """The partial map category: spans (m, f) with m in M, composition by
    pullback, restriction (m, f) -> (m, m)."""
    c = mc.base
    seen = {}
    # collect canonical spans grouped deterministically
    raw = []
    for m in sorted(mc.monics):
        a = c.mor_tgt[m]
        dom = c.mor_src[m]
        for f in c.morphisms():
            if c.mor_src[f] == dom:
                raw.append((m, f))
    canon = set()
    helper = ParCategory.__new__(ParCategory)
    object.__setattr__(helper, "mc", mc)
    for m, f in raw:
        canon.add(helper.canonical_span(m, f))
    spans = sorted(canon, key=lambda s: (c.mor_tgt[s[0]], c.mor_tgt[s[1]],
                                         s[0], s[1]))
    span_id = {s: i for i, s in enumerate(spans)}
    mor_src = tuple(c.mor_tgt[m] for (m, f) in spans)
    mor_tgt = tuple(c.mor_tgt[f] for (m, f) in spans)
    identity = []
    for a in c.objects:
        ida = c.identity[a]
        key = helper.canonical_span(ida, ida)
        identity.append(span_id[key])
    pc_partial = ParCategory.__new__(ParCategory)
    object.__setattr__(pc_partial, "mc", mc)
    object.__setattr__(pc_partial, "spans", tuple(spans))
    object.__setattr__(pc_partial, "span_id", span_id)
    comp = {}
    for j, second in enumerate(spans):
        for i, first in enumerate(spans):
            if mor_tgt[i] != mor_src[j]:
                continue
            comp[(j, i)] = span_id[pc_partial.compose_spans(second, first)]
    cat = FinCategory(c.n_objects, mor_src, mor_tgt, identity, comp,
                      obj_names=c.obj_names,
                      mor_names=tuple(
                          f"({c.mor_names[m]},{c.mor_names[f]})"
                          for (m, f) in spans))
    bar = tuple(span_id[helper.canonical_span(m, m)] for (m, f) in spans)
    rc = RestrictionCategory(cat, bar)
    pc = ParCategory(rc, mc, tuple(spans), span_id)
    if verify:
        from .restriction import check_restriction_axioms
        rep = check_restriction_axioms(rc)
        if not rep.ok:
            raise InternalInvariantError(
                f"Par output fails restriction axioms:\n{rep}")
        _verify_split(rc)
    return pc


def _verify_split(rc: RestrictionCategory):
    for e in rc.base.morphisms():
        if rc.bar[e] != e:
            continue
        if not _splits(rc.base, e):
            raise InternalInvariantError(
                f"restriction idempotent {e} does not split")


def _splits(c: FinCategory, e):
    a = c.mor_src[e]
    for obj in c.objects:
        for s in c.hom(obj, a):
            for r in c.hom(a, obj):
                if c.comp[(s, r)] == e and c.comp[(r, s)] == c.identity[obj]:
                    return True
    return False


def par_leq_oracle(pc: ParCategory, i, j) -> bool:
    """(m, f) <= (n, g) iff a mediating arrow phi with n∘phi == m and
    g∘phi == f exists (it is then unique; uniqueness is re-checked)."""
    c = pc.mc.base
    rcb = pc.rc.base
    if rcb.mor_src[i] != rcb.mor_src[j] or rcb.mor_tgt[i] != rcb.mor_tgt[j]:
        raise ValueError("spans are not parallel")
    m, f = pc.spans[i]
    n, g = pc.spans[j]
    found = 0
    for phi in c.hom(c.mor_src[m], c.mor_src[n]):
        if c.comp[(n, phi)] == m and c.comp[(g, phi)] == f:
            found += 1
    if found > 1:
        raise InternalInvariantError(
            f"mediating arrow between spans {i} and {j} is not unique")
    return found == 1


def par_join_construction(pc: ParCategory, members, src=None, tgt=None):
    """The (mu, gamma) join recipe for a compatible family of spans:
    matching colimit of the monic legs, gamma induced by the f_i legs.
    Returns a Par morphism id, or None when the construction fails.
    src/tgt are required for the empty family."""
    c = pc.mc.base
    members = sorted(members)
    if members:
        src = pc.rc.base.mor_src[members[0]]
        tgt = pc.rc.base.mor_tgt[members[0]]
    elif src is None or tgt is None:
        raise ValueError("empty family needs explicit hom endpoints")
    family = tuple(pc.spans[i][0] for i in members)
    obj = src
    mcol = matching_colimit(pc.mc, family, obj)
    if mcol is None or mcol.mu not in pc.mc.monics:
        return None
    # gamma: induced by the cocone of the f_i legs
    k = len(family)
    legs = [pc.spans[i][1] for i in members]
    target_legs = list(legs)
    for (i, j), idx in sorted(mcol.md.pair_objects.items(),
                              key=lambda kv: kv[1]):
        arrow_to_i = mcol.md.diagram.mor_map[_pair_arrow(mcol.md, idx, i)]
        target_legs.append(c.comp[(legs[i], arrow_to_i)])
    gamma = mediating(c, mcol.md.diagram, mcol.cocone,
                      Cocone(tgt, tuple(target_legs)))
    if gamma is None:
        return None
    return pc.id_of_span(mcol.mu, gamma)


# -- MTotal and the Karoubi splitting ----------------------------------------

def restriction_monic_candidates(x: RestrictionCategory):
    """Total maps m admitting r with r∘m == id and m∘r == bar(r)."""
    c = x.base
    out = set()
    for m in c.morphisms():
        if not is_total(x, m):
            continue
        a, b = c.mor_src[m], c.mor_tgt[m]
        for r in c.hom(b, a):
            if c.comp[(r, m)] == c.identity[a] and \
                    c.comp[(m, r)] == x.bar[r]:
                out.add(m)
                break
    return frozenset(out)


@dataclass(frozen=True)
class MTotalResult:
    mcat: MCategory
    sub: Subcategory    # total subcategory with old<->new translation


def mtotal(x: RestrictionCategory) -> MTotalResult:
    """(Total(x), restriction monics); requires all restriction idempotents
    of x to split."""
    c = x.base
    for e in c.morphisms():
        if x.bar[e] == e and not _splits(c, e):
            raise ValueError(f"restriction idempotent {e} does not split")
    sub = total_subcategory(x)
    monics_old = restriction_monic_candidates(x)
    monics = frozenset(sub.mor_new[m] for m in monics_old
                       if m in sub.mor_new)
    return MTotalResult(MCategory(sub.cat, monics), sub)


@dataclass(frozen=True)
class KaroubiResult:
    rc: RestrictionCategory
    objects: tuple      # new object id -> (base object, idempotent)
    morphisms: tuple    # new morphism id -> (src idx, tgt idx, base morphism)
    embedding: Functor  # x -> karoubi_r(x)


def karoubi_r(x: RestrictionCategory, verify=True) -> KaroubiResult:
    """Split restriction category on objects (A, e): morphisms f with
    f∘e == f and e'∘f == f, bar inherited."""
    c = x.base
    objects = []
    for a in c.objects:
        for e in restriction_idempotents(x, a):
            objects.append((a, e))
    objects.sort()
    obj_idx = {o: i for i, o in enumerate(objects)}
    morphisms = []
    for i, (a, e) in enumerate(objects):
        for j, (b, e2) in enumerate(objects):
            for f in c.hom(a, b):
                if c.comp[(f, e)] == f and c.comp[(e2, f)] == f:
                    morphisms.append((i, j, f))
    morphisms.sort()
    mor_idx = {m: k for k, m in enumerate(morphisms)}
    comp = {}
    for k2, (i2, j2, g) in enumerate(morphisms):
        for k1, (i1, j1, f) in enumerate(morphisms):
            if j1 == i2:
                comp[(k2, k1)] = mor_idx[(i1, j2, c.comp[(g, f)])]
    identity = tuple(mor_idx[(i, i, e)] for i, (a, e) in enumerate(objects))
    cat = FinCategory(
        len(objects),
        tuple(m[0] for m in morphisms),
        tuple(m[1] for m in morphisms),
        identity, comp,
        obj_names=tuple(f"({c.obj_names[a]},{c.mor_names[e]})"
                        for (a, e) in objects),
        mor_names=tuple(f"{c.mor_names[f]}@{i}->{j}"
                        for (i, j, f) in morphisms))
    bar = tuple(mor_idx[(i, i, c.comp[(x.bar[f], _idem(objects, i))])]
                for (i, j, f) in morphisms)
    rc = RestrictionCategory(cat, bar)
    emb = Functor(c, cat,
                  tuple(obj_idx[(a, c.identity[a])] for a in c.objects),
                  tuple(mor_idx[(obj_idx[(c.mor_src[f], c.identity[c.mor_src[f]])],
                                 obj_idx[(c.mor_tgt[f], c.identity[c.mor_tgt[f]])],
                                 f)]
                        for f in c.morphisms()))
    result = KaroubiResult(rc, tuple(objects), tuple(morphisms), emb)
    if verify:
        _verify_split(rc)
        if not emb.check() or not emb.is_full_and_faithful():
            raise InternalInvariantError("Karoubi embedding not full/faithful")
    return result


def _idem(objects, i):
    return objects[i][1]


@dataclass(frozen=True)
class SplitUnitResult:
    functor: Functor        # x.base -> par(mtotal(x)).rc.base, invertible
    mt: MTotalResult
    pc: ParCategory


def split_unit_functor(x: RestrictionCategory, verify=True) -> SplitUnitResult:
    """The comparison x -> Par(Total(x), restriction monics) for a split
    restriction category: f maps to the span (m, f∘m) where (m, r) is the
    canonical splitting of bar(f)."""
    c = x.base
    mt = mtotal(x)
    pc = par(mt.mcat, verify=verify)
    sub = mt.sub
    if sub.obj_old != c.objects:
        raise InternalInvariantError("total subcategory must keep all objects")

    def splitting(e):
        for obj in c.objects:
            for m in c.hom(obj, c.mor_src[e]):
                for r in c.hom(c.mor_src[e], obj):
                    if c.comp[(m, r)] == e and \
                            c.comp[(r, m)] == c.identity[obj]:
                        return m, r
        raise InternalInvariantError(f"idempotent {e} does not split")

    mor_map = []
    for f in c.morphisms():
        m, r = splitting(x.bar[f])
        fm = c.comp[(f, m)]
        if m not in sub.mor_new or fm not in sub.mor_new:
            raise InternalInvariantError(
                "splitting legs are not total; cannot land in the span category")
        mm = sub.mor_new[m]
        if mm not in mt.mcat.monics:
            raise InternalInvariantError("splitting monic not a restriction monic")
        mor_map.append(pc.id_of_span(mm, sub.mor_new[fm]))
    fun = Functor(c, pc.rc.base, tuple(c.objects), tuple(mor_map))
    if verify:
        if not fun.check() or not fun.is_full_and_faithful() or \
                len(set(mor_map)) != pc.rc.base.n_morphisms or \
                c.n_objects != pc.rc.base.n_objects:
            raise InternalInvariantError(
                "comparison with the span category is not an isomorphism")
        for f in c.morphisms():
            if mor_map[x.bar[f]] != pc.rc.bar[mor_map[f]]:
                raise InternalInvariantError("comparison does not preserve bar")
    return SplitUnitResult(fun, mt, pc)
