"""Explicit isomorphism search between finite (restriction) categories.

Identity of objects is never assumed: isomorphisms are found by backtracking
over object bijections and hom-wise morphism bijections, pruned by degree
invariants and composition consistency.
"""

from __future__ import annotations

import itertools

from .fincat import FinCategory, Functor
from .restriction import RestrictionCategory


def _obj_invariant(c: FinCategory, a):
    out = sorted(len(c.hom(a, b)) for b in c.objects)
    inn = sorted(len(c.hom(b, a)) for b in c.objects)
    return (out, inn)


def _extend_morphisms(c, d, bar_c, bar_d, obj_map):
    """Backtrack over a morphism bijection consistent with obj_map."""
    n = c.n_morphisms
    mor_map = [None] * n
    used = set()

    def candidates(f):
        a, b = c.mor_src[f], c.mor_tgt[f]
        return d.hom(obj_map[a], obj_map[b])

    order = sorted(c.morphisms(), key=lambda f: len(candidates(f)))

    def consistent(f, ff):
        if c.is_identity(f) and not d.is_identity(ff):
            return False
        if bar_c is not None:
            bf = bar_c[f]
            if mor_map[bf] is not None and mor_map[bf] != bar_d[ff]:
                return False
        for g in c.morphisms():
            gg = mor_map[g]
            if gg is None:
                continue
            if c.composable(g, f):
                gf = c.comp[(g, f)]
                img = mor_map[gf]
                if img is not None and d.comp[(gg, ff)] != img:
                    return False
            if c.composable(f, g):
                fg = c.comp[(f, g)]
                img = mor_map[fg]
                if img is not None and d.comp[(ff, gg)] != img:
                    return False
        return True

    def place(k):
        if k == n:
            return True
        f = order[k]
        for ff in candidates(f):
            if ff in used or not consistent(f, ff):
                continue
            mor_map[f] = ff
            used.add(ff)
            if place(k + 1):
                return True
            mor_map[f] = None
            used.discard(ff)
        return False

    if place(0):
        return tuple(mor_map)
    return None


def _iso_search(c, d, bar_c=None, bar_d=None):
    if c.n_objects != d.n_objects or c.n_morphisms != d.n_morphisms:
        return None
    inv_c = [_obj_invariant(c, a) for a in c.objects]
    inv_d = [_obj_invariant(d, a) for a in d.objects]
    if sorted(inv_c) != sorted(inv_d):
        return None
    for perm in itertools.permutations(d.objects):
        if any(inv_c[a] != inv_d[perm[a]] for a in c.objects):
            continue
        if any(len(c.hom(a, b)) != len(d.hom(perm[a], perm[b]))
               for a in c.objects for b in c.objects):
            continue
        mor_map = _extend_morphisms(c, d, bar_c, bar_d, perm)
        if mor_map is not None:
            fun = Functor(c, d, perm, mor_map)
            if fun.check():
                return fun
    return None


def find_category_iso(c: FinCategory, d: FinCategory):
    """An invertible functor c -> d, or None."""
    return _iso_search(c, d)


def find_restriction_iso(x: RestrictionCategory, y: RestrictionCategory):
    """An invertible bar-preserving functor x -> y, or None."""
    return _iso_search(x.base, y.base, x.bar, y.bar)


def inverse_functor(fun: Functor) -> Functor:
    obj_inv = [None] * fun.target.n_objects
    for a, aa in enumerate(fun.obj_map):
        obj_inv[aa] = a
    mor_inv = [None] * fun.target.n_morphisms
    for f, ff in enumerate(fun.mor_map):
        mor_inv[ff] = f
    if None in obj_inv or None in mor_inv:
        raise ValueError("functor is not bijective")
    return Functor(fun.target, fun.source, tuple(obj_inv), tuple(mor_inv))
