"""Sites of monic covers, presheaves, sheaves and sheafification.

A presheaf stores element counts per object and an explicit contravariant
action table.  The topology on an M-category is generated by the families of
monics whose subobject join is the whole object, then saturated to a fixpoint
over all sieves.  Sheafification is the plus construction applied twice,
with classes kept as canonical representatives so equality is plain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .fincat import FinCategory, Functor
from .mcat import MCategory, pullback_subobject, sub_m, subobject_rep
from .reports import InternalInvariantError, LawReport


# -- presheaves and natural transformations ----------------------------------

@dataclass(frozen=True)
class Presheaf:
    """sizes[A] = |P(A)|; action[(f, x)] = P(f)(x) for f: A -> B and
    x in P(B), landing in P(A)."""
    cat: FinCategory
    sizes: tuple
    action: dict
    elem_names: tuple = None

    def act(self, f, x):
        return self.action[(f, x)]

    def elements(self, a):
        return range(self.sizes[a])

    def name(self, a, x):
        if self.elem_names is None:
            return str(x)
        return self.elem_names[a][x]


def check_presheaf(p: Presheaf) -> bool:
    c = p.cat
    for f in c.morphisms():
        a, b = c.mor_src[f], c.mor_tgt[f]
        for x in p.elements(b):
            y = p.action.get((f, x))
            if y is None or not 0 <= y < p.sizes[a]:
                return False
    for a in c.objects:
        for x in p.elements(a):
            if p.act(c.identity[a], x) != x:
                return False
    for (f, g), fg in c.comp.items():
        # f: B -> C, g: A -> B, so P(f∘g) = P(g)∘P(f)
        for x in p.elements(c.mor_tgt[f]):
            if p.act(fg, x) != p.act(g, p.act(f, x)):
                return False
    return True


@dataclass(frozen=True)
class NatTrans:
    source: Presheaf
    target: Presheaf
    components: tuple   # per object: tuple mapping source elems to target elems

    def at(self, a, x):
        return self.components[a][x]

    def check(self) -> bool:
        p, q = self.source, self.target
        c = p.cat
        for f in c.morphisms():
            a, b = c.mor_src[f], c.mor_tgt[f]
            for x in p.elements(b):
                if q.act(f, self.components[b][x]) != \
                        self.components[a][p.act(f, x)]:
                    return False
        return True

    def is_monic_componentwise(self) -> bool:
        return all(len(set(comp)) == len(comp) for comp in self.components)

    def is_iso(self) -> bool:
        return self.is_monic_componentwise() and all(
            len(self.components[a]) == self.target.sizes[a]
            for a in self.source.cat.objects)


def compose_nat(beta: NatTrans, alpha: NatTrans) -> NatTrans:
    if alpha.target is not beta.source and alpha.target != beta.source:
        raise ValueError("natural transformations not composable")
    return NatTrans(alpha.source, beta.target,
                    tuple(tuple(beta.components[a][x] for x in comp)
                          for a, comp in enumerate(alpha.components)))


def identity_nat(p: Presheaf) -> NatTrans:
    return NatTrans(p, p, tuple(tuple(p.elements(a)) for a in p.cat.objects))


def _nat_backtrack(p: Presheaf, q: Presheaf, injective, elem_constraint,
                   first_only):
    """Element-wise backtracking over natural transformations p -> q.

    Assignments are propagated per element so naturality prunes early; with
    injective=True only componentwise bijections are produced (sizes must
    already agree)."""
    c = p.cat
    comps = [[None] * p.sizes[a] for a in c.objects]
    used = [set() for _ in c.objects]
    slots = [(a, x) for a in sorted(c.objects, key=lambda a: p.sizes[a])
             for x in p.elements(a)]
    out = []

    def consistent(t, x, y):
        # naturality squares touching the fresh assignment (t, x) -> y
        for f in c.into(t):
            s = c.mor_src[f]
            xi = p.act(f, x)
            img = comps[s][xi]
            if img is not None and img != q.act(f, y):
                return False
        for f in c.morphisms():
            if c.mor_src[f] != t:
                continue
            b = c.mor_tgt[f]
            for z in p.elements(b):
                if p.act(f, z) == x and comps[b][z] is not None \
                        and q.act(f, comps[b][z]) != y:
                    return False
        return True

    def place(k):
        if k == len(slots):
            out.append(NatTrans(p, q, tuple(tuple(col) for col in comps)))
            return first_only
        a, x = slots[k]
        for y in q.elements(a):
            if injective and y in used[a]:
                continue
            if elem_constraint is not None and not elem_constraint(a, x, y):
                continue
            if not consistent(a, x, y):
                continue
            comps[a][x] = y
            used[a].add(y)
            if place(k + 1):
                return True
            comps[a][x] = None
            used[a].discard(y)
        return False

    place(0)
    return out


def find_presheaf_iso(p: Presheaf, q: Presheaf, elem_constraint=None):
    """A natural isomorphism p -> q found by backtracking, or None."""
    if p.sizes != q.sizes:
        return None
    found = _nat_backtrack(p, q, True, elem_constraint, True)
    return found[0] if found else None


def constant_presheaf(c: FinCategory, k) -> Presheaf:
    """k elements at every object, every action the identity."""
    action = {(f, x): x for f in c.morphisms() for x in range(k)}
    return Presheaf(c, (k,) * c.n_objects, action)


# -- representables -----------------------------------------------------------

def yoneda(c: FinCategory, a) -> Presheaf:
    """The representable presheaf hom(-, a)."""
    sizes = tuple(len(c.hom(b, a)) for b in c.objects)
    index = {b: {f: i for i, f in enumerate(c.hom(b, a))} for b in c.objects}
    action = {}
    for f in c.morphisms():
        s, t = c.mor_src[f], c.mor_tgt[f]
        for i, h in enumerate(c.hom(t, a)):
            action[(f, i)] = index[s][c.comp[(h, f)]]
    names = tuple(tuple(c.mor_names[f] for f in c.hom(b, a))
                  for b in c.objects)
    return Presheaf(c, sizes, action, names)


def yoneda_elem(c: FinCategory, a, f):
    """Index of the morphism f inside yoneda(c, a) at src(f)."""
    return c.hom(c.mor_src[f], a).index(f)


def yoneda_map(c: FinCategory, f, ya=None, yb=None) -> NatTrans:
    """y(f): hom(-, src f) -> hom(-, tgt f)."""
    a, b = c.mor_src[f], c.mor_tgt[f]
    ya = ya if ya is not None else yoneda(c, a)
    yb = yb if yb is not None else yoneda(c, b)
    comps = []
    for o in c.objects:
        hom_a = c.hom(o, a)
        hom_b = c.hom(o, b)
        idx = {h: i for i, h in enumerate(hom_b)}
        comps.append(tuple(idx[c.comp[(f, h)]] for h in hom_a))
    return NatTrans(ya, yb, tuple(comps))


# -- sieves and topologies -----------------------------------------------------

def is_sieve(c: FinCategory, a, s) -> bool:
    for f in s:
        if c.mor_tgt[f] != a:
            return False
        for g in c.into(c.mor_src[f]):
            if c.comp[(f, g)] not in s:
                return False
    return True


def sieves_on(c: FinCategory, a):
    """All sieves on a, by closing each subset of generators."""
    into = c.into(a)
    out = set()
    for r in range(len(into) + 1):
        for gens in itertools.combinations(into, r):
            out.add(generate_sieve(c, a, gens))
    return sorted(out, key=lambda s: (len(s), tuple(sorted(s))))


def generate_sieve(c: FinCategory, a, gens) -> frozenset:
    return frozenset(c.comp[(f, g)]
                     for f in gens for g in c.into(c.mor_src[f])) \
        | frozenset(gens)


def maximal_sieve(c: FinCategory, a) -> frozenset:
    return frozenset(c.into(a))


def sieve_pullback(c: FinCategory, s, f) -> frozenset:
    """f*(s) = {g into src(f) | f∘g in s}."""
    return frozenset(g for g in c.into(c.mor_src[f]) if c.comp[(f, g)] in s)


@dataclass(frozen=True)
class Topology:
    cat: FinCategory
    covers: tuple   # per object: frozenset of covering sieves


def basis_covers(mc: MCategory):
    """Per object, the families of canonical monics whose Sub_M join is the
    identity (the whole object)."""
    c = mc.base
    out = []
    for a in c.objects:
        poset = sub_m(mc, a)
        fams = []
        for r in range(len(poset.elements) + 1):
            for fam in itertools.combinations(poset.elements, r):
                if poset.join(fam) == poset.top():
                    fams.append(fam)
        out.append(tuple(fams))
    return tuple(out)


def generate_topology(mc: MCategory) -> Topology:
    """Sieves generated by the covering families, saturated to a fixpoint
    under the maximality, stability and transitivity axioms."""
    c = mc.base
    covers = [set() for _ in c.objects]
    for a, fams in enumerate(basis_covers(mc)):
        for fam in fams:
            covers[a].add(generate_sieve(c, a, fam))
    all_sieves = {a: sieves_on(c, a) for a in c.objects}
    changed = True
    while changed:
        changed = False
        for a in c.objects:
            if maximal_sieve(c, a) not in covers[a]:
                covers[a].add(maximal_sieve(c, a))
                changed = True
            for s in list(covers[a]):
                for f in c.into(a):
                    b = c.mor_src[f]
                    fs = sieve_pullback(c, s, f)
                    if fs not in covers[b]:
                        covers[b].add(fs)
                        changed = True
            for t in all_sieves[a]:
                if t in covers[a]:
                    continue
                for r in covers[a]:
                    if all(sieve_pullback(c, t, f) in covers[c.mor_src[f]]
                           for f in r):
                        covers[a].add(t)
                        changed = True
                        break
    return Topology(c, tuple(frozenset(s) for s in covers))


def saturation_is_fixpoint(top: Topology) -> bool:
    """One more saturation pass adds no covering sieve."""
    c = top.cat
    for a in c.objects:
        if maximal_sieve(c, a) not in top.covers[a]:
            return False
        for s in top.covers[a]:
            for f in c.into(a):
                if sieve_pullback(c, s, f) not in top.covers[c.mor_src[f]]:
                    return False
        for t in sieves_on(c, a):
            if t in top.covers[a]:
                continue
            for r in top.covers[a]:
                if all(sieve_pullback(c, t, f) in top.covers[c.mor_src[f]]
                       for f in r):
                    return False
    return True


# -- matching families, sheaves ------------------------------------------------

def matching_families(p: Presheaf, a, sieve):
    """All matching families for the sieve: assignments x_f with
    x_{f∘g} = P(g)(x_f)."""
    c = p.cat
    fs = sorted(sieve)
    pos = {f: i for i, f in enumerate(fs)}
    out = []
    assign = [None] * len(fs)

    def place(k):
        if k == len(fs):
            out.append(tuple(assign))
            return
        f = fs[k]
        for x in p.elements(c.mor_src[f]):
            ok = True
            # x_{f∘g} must equal P(g)(x) for every already-placed composite
            for g in c.into(c.mor_src[f]):
                h = pos[c.comp[(f, g)]]
                if h < k and assign[h] != p.act(g, x):
                    ok = False
                    break
                if h == k and p.act(g, x) != x:
                    ok = False
                    break
            # and x must match P(g)(x_{f_i}) whenever f == f_i∘g
            for i in range(k):
                if not ok:
                    break
                fi = fs[i]
                for g in c.into(c.mor_src[fi]):
                    if c.comp[(fi, g)] == f and p.act(g, assign[i]) != x:
                        ok = False
                        break
            if ok:
                assign[k] = x
                place(k + 1)
                assign[k] = None

    place(0)
    return fs, out


def amalgamations(p: Presheaf, a, fs, fam):
    return [x for x in p.elements(a)
            if all(p.act(f, x) == fam[i] for i, f in enumerate(fs))]


def restrict_matching(p: Presheaf, fs, fam):
    """Dict f -> x_f for convenience."""
    return dict(zip(fs, fam))


def is_separated(p: Presheaf, top: Topology) -> LawReport:
    report = LawReport("separated")
    c = p.cat
    for a in c.objects:
        for sieve in sorted(top.covers[a], key=sorted):
            fs, fams = matching_families(p, a, sieve)
            for fam in fams:
                if len(amalgamations(p, a, fs, fam)) > 1:
                    report.add("SEP", (a,) + tuple(fs),
                               "matching family with several amalgamations")
    return report


def is_sheaf(p: Presheaf, top: Topology) -> LawReport:
    report = LawReport("sheaf")
    c = p.cat
    for a in c.objects:
        for sieve in sorted(top.covers[a], key=sorted):
            fs, fams = matching_families(p, a, sieve)
            for fam in fams:
                n = len(amalgamations(p, a, fs, fam))
                if n != 1:
                    report.add("SHEAF", (a,) + tuple(fs),
                               f"matching family with {n} amalgamations")
    return report


# -- the plus construction ------------------------------------------------------

@dataclass(frozen=True)
class PlusData:
    """One application of the plus construction.

    classes[a] is the tuple of canonical representatives (fs, fam); fs is the
    sorted tuple of the sieve's morphisms, fam the matching family over it.
    """
    source: Presheaf
    presheaf: Presheaf
    top: Topology
    classes: tuple
    unit: NatTrans

    def class_of(self, a, fs, fam):
        c = self.source.cat
        p = self.source
        for i, (fs2, fam2) in enumerate(self.classes[a]):
            if _agree_on_refinement(p, self.top, a, fs, fam, fs2, fam2):
                return i
        raise InternalInvariantError("matching family matches no plus class")


def _agree_on_refinement(p, top, a, fs1, fam1, fs2, fam2):
    d1 = dict(zip(fs1, fam1))
    d2 = dict(zip(fs2, fam2))
    both = frozenset(d1) & frozenset(d2)
    for r in top.covers[a]:
        if r <= both and all(d1[f] == d2[f] for f in r):
            return True
    return False


def plus(p: Presheaf, top: Topology) -> PlusData:
    c = p.cat
    classes = []
    for a in c.objects:
        pairs = []
        for sieve in sorted(top.covers[a], key=lambda s: (len(s), sorted(s))):
            fs, fams = matching_families(p, a, sieve)
            for fam in fams:
                pairs.append((tuple(fs), fam))
        reps = []
        for pair in pairs:
            if not any(_agree_on_refinement(p, top, a, pair[0], pair[1],
                                            r[0], r[1]) for r in reps):
                reps.append(pair)
        classes.append(tuple(reps))
    sizes = tuple(len(cl) for cl in classes)
    # build the action before wrapping, via direct refinement lookup
    action = {}
    lookup_cache = {}

    def cls(a, fs, fam):
        key = (a, fs, fam)
        if key not in lookup_cache:
            idx = None
            for i, (fs2, fam2) in enumerate(classes[a]):
                if _agree_on_refinement(p, top, a, fs, fam, fs2, fam2):
                    idx = i
                    break
            if idx is None:
                raise InternalInvariantError("plus class lookup failed")
            lookup_cache[key] = idx
        return lookup_cache[key]

    for f in c.morphisms():
        a, b = c.mor_src[f], c.mor_tgt[f]
        for x, (fs, fam) in enumerate(classes[b]):
            d = dict(zip(fs, fam))
            pulled = sorted(sieve_pullback(c, frozenset(fs), f))
            pfam = tuple(d[c.comp[(f, g)]] for g in pulled)
            action[(f, x)] = cls(a, tuple(pulled), pfam)
    plus_p = Presheaf(c, sizes, action)
    # unit: x |-> class of (maximal sieve, restrictions of x)
    comps = []
    for a in c.objects:
        ms = tuple(sorted(maximal_sieve(c, a)))
        col = []
        for x in p.elements(a):
            fam = tuple(p.act(f, x) for f in ms)
            col.append(cls(a, ms, fam))
        comps.append(tuple(col))
    unit = NatTrans(p, plus_p, tuple(comps))
    data = PlusData(p, plus_p, top, tuple(classes), unit)
    if not check_presheaf(plus_p) or not unit.check():
        raise InternalInvariantError("plus construction produced bad data")
    return data


def plus_map(alpha: NatTrans, src_plus: PlusData, tgt_plus: PlusData) -> NatTrans:
    """The plus construction on a natural transformation."""
    p, q = alpha.source, alpha.target
    c = p.cat
    top = src_plus.top
    comps = []
    for a in c.objects:
        col = []
        for (fs, fam) in src_plus.classes[a]:
            qfam = tuple(alpha.components[c.mor_src[f]][fam[i]]
                         for i, f in enumerate(fs))
            col.append(tgt_plus.class_of(a, fs, qfam))
        comps.append(tuple(col))
    nat = NatTrans(src_plus.presheaf, tgt_plus.presheaf, tuple(comps))
    if not nat.check():
        raise InternalInvariantError("plus of a natural map is not natural")
    return nat


@dataclass(frozen=True)
class SheafifyResult:
    presheaf: Presheaf
    unit: NatTrans          # P -> P++
    plus1: PlusData
    plus2: PlusData


def sheafify(p: Presheaf, top: Topology) -> SheafifyResult:
    d1 = plus(p, top)
    d2 = plus(d1.presheaf, top)
    unit = compose_nat(d2.unit, d1.unit)
    return SheafifyResult(d2.presheaf, unit, d1, d2)


def sheafify_map(alpha: NatTrans, src: SheafifyResult,
                 tgt: SheafifyResult) -> NatTrans:
    return plus_map(plus_map(alpha, src.plus1, tgt.plus1),
                    src.plus2, tgt.plus2)


def sieve_subpresheaf(c: FinCategory, a, sieve):
    """The subpresheaf of yoneda(c, a) picked out by a sieve, with its
    inclusion."""
    ya = yoneda(c, a)
    sizes = []
    index = []
    for b in c.objects:
        members = [f for f in c.hom(b, a) if f in sieve]
        sizes.append(len(members))
        index.append({f: i for i, f in enumerate(members)})
    action = {}
    for f in c.morphisms():
        s, t = c.mor_src[f], c.mor_tgt[f]
        for h, i in index[t].items():
            action[(f, i)] = index[s][c.comp[(h, f)]]
    sub = Presheaf(c, tuple(sizes), action,
                   tuple(tuple(c.mor_names[f] for f in sorted(ix, key=ix.get))
                         for ix in index))
    comps = []
    for b in c.objects:
        hom = c.hom(b, a)
        pos = {f: i for i, f in enumerate(hom)}
        comps.append(tuple(pos[f] for f in sorted(index[b], key=index[b].get)))
    return sub, NatTrans(sub, ya, tuple(comps)), ya


# -- subcanonicity ----------------------------------------------------------------

def subcanonical_report(top: Topology) -> LawReport:
    report = LawReport("subcanonical")
    for a in top.cat.objects:
        rep = is_sheaf(yoneda(top.cat, a), top)
        if not rep.ok:
            report.add("SUBCAN", (a,), "representable is not a sheaf")
    return report


# -- M_PSh and the subobject classifier ----------------------------------------

def image_sieve(mc: MCategory, alpha: NatTrans, a, x):
    """{g into a | P(g)(x) lies in the image of alpha at src(g)}."""
    c = mc.base
    p = alpha.target
    images = [set(comp) for comp in alpha.components]
    return frozenset(g for g in c.into(a)
                     if p.act(g, x) in images[c.mor_src[g]])


def principal_generator(mc: MCategory, a, sieve):
    """The canonical m in M generating the sieve, or None."""
    c = mc.base
    for m in sub_m(mc, a).elements:
        if generate_sieve(c, a, (m,)) == sieve:
            return m
    return None


def m_psh_member(mc: MCategory, alpha: NatTrans) -> bool:
    """alpha is a componentwise-monic map whose pullback along every element
    of the target is represented by a monic in M."""
    if not alpha.is_monic_componentwise():
        return False
    c = mc.base
    p = alpha.target
    for a in c.objects:
        for x in p.elements(a):
            if principal_generator(mc, a, image_sieve(mc, alpha, a, x)) is None:
                return False
    return True


def m_sh_member(mc: MCategory, top: Topology, alpha: NatTrans) -> bool:
    return m_psh_member(mc, alpha) and \
        is_sheaf(alpha.source, top).ok and is_sheaf(alpha.target, top).ok


def sigma_classifier(mc: MCategory) -> Presheaf:
    """Sigma(A) = canonical M-subobjects of A; action by pullback."""
    c = mc.base
    posets = [sub_m(mc, a) for a in c.objects]
    sizes = tuple(len(p.elements) for p in posets)
    index = [{m: i for i, m in enumerate(p.elements)} for p in posets]
    action = {}
    for f in c.morphisms():
        s, t = c.mor_src[f], c.mor_tgt[f]
        for m, i in index[t].items():
            action[(f, i)] = index[s][pullback_subobject(mc, f, m)]
    names = tuple(tuple(c.mor_names[m] for m in p.elements) for p in posets)
    return Presheaf(c, sizes, action, names)


def characteristic_map(mc: MCategory, sigma: Presheaf,
                       alpha: NatTrans) -> NatTrans:
    """chi: P -> Sigma sending x to the M-subobject classifying alpha at x."""
    c = mc.base
    p = alpha.target
    index = [{m: i for i, m in enumerate(sub_m(mc, a).elements)}
             for a in c.objects]
    comps = []
    for a in c.objects:
        col = []
        for x in p.elements(a):
            m = principal_generator(mc, a, image_sieve(mc, alpha, a, x))
            if m is None:
                raise ValueError("alpha is not an M_PSh subobject")
            col.append(index[a][m])
        comps.append(tuple(col))
    chi = NatTrans(p, sigma, tuple(comps))
    if not chi.check():
        raise InternalInvariantError("characteristic map is not natural")
    return chi


def classification_report(mc: MCategory, sigma: Presheaf,
                          alpha: NatTrans) -> LawReport:
    """chi is the unique map P -> Sigma whose top-preimage is exactly the
    image of alpha."""
    report = LawReport("classification")
    c = mc.base
    p = alpha.target
    chi = characteristic_map(mc, sigma, alpha)
    tops = tuple(sub_m(mc, a).elements.index(c.identity[a])
                 for a in c.objects)
    images = [set(comp) for comp in alpha.components]

    def classifies(nat):
        for a in c.objects:
            for x in p.elements(a):
                if (nat.components[a][x] == tops[a]) != (x in images[a]):
                    return False
        return True

    if not classifies(chi):
        report.add("CLASS-PB", (), "chi's top-preimage differs from alpha")
    count = 0
    for nat in all_nat_trans(p, sigma):
        if classifies(nat):
            count += 1
            if nat.components != chi.components:
                report.add("CLASS-UNIQUE", (), "a second classifying map exists")
    if count == 0:
        report.add("CLASS-NONE", (), "no classifying map at all")
    return report


def all_nat_trans(p: Presheaf, q: Presheaf):
    """Every natural transformation p -> q, by element-wise backtracking."""
    return _nat_backtrack(p, q, False, None, False)
