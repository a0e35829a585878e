import pytest

from rcwb.mcat import sub_m
from rcwb.site import (all_nat_trans, basis_covers, characteristic_map,
                       check_presheaf, classification_report,
                       constant_presheaf, find_presheaf_iso, generate_sieve,
                       generate_topology, is_separated, is_sheaf,
                       matching_families, maximal_sieve, plus,
                       saturation_is_fixpoint, sheafify, sheafify_map,
                       sieve_pullback, sieve_subpresheaf, sieves_on,
                       sigma_classifier, subcanonical_report, yoneda,
                       yoneda_map, m_psh_member, m_sh_member)


def test_yoneda_is_a_presheaf(mc_inj):
    for a in mc_inj.base.objects:
        assert check_presheaf(yoneda(mc_inj.base, a))


def test_yoneda_map_is_natural(mc_inj):
    c = mc_inj.base
    for f in c.morphisms():
        assert yoneda_map(c, f).check()


def test_sieves_are_closed(mc_inj):
    c = mc_inj.base
    for a in c.objects:
        for s in sieves_on(c, a):
            for f in s:
                for g in c.into(c.mor_src[f]):
                    assert c.comp[(f, g)] in s


def test_empty_family_covers_initial_object(mc_inj):
    covers = basis_covers(mc_inj)
    assert () in covers[0]  # the empty set is covered by nothing


def test_topology_is_saturated(top_inj):
    assert saturation_is_fixpoint(top_inj)


def test_topology_has_singleton_cover_of_two_set(mc_inj, top_inj):
    c = mc_inj.base
    singles = tuple(m for m in sub_m(mc_inj, 2).elements
                    if c.mor_src[m] == 1)
    assert generate_sieve(c, 2, singles) in top_inj.covers[2]


def test_subcanonical(top_inj):
    assert subcanonical_report(top_inj).ok


def test_sheafify_inverts_covering_sieves(mc_inj, top_inj):
    c = mc_inj.base
    for a in c.objects:
        ya = None
        for sieve in top_inj.covers[a]:
            sub, inc, ya = sieve_subpresheaf(c, a, sieve)
            nat = sheafify_map(inc, sheafify(sub, top_inj),
                               sheafify(ya, top_inj))
            assert nat.is_iso()


def test_sheafify_unit_is_iso_on_sheaves(mc_inj, top_inj):
    for a in mc_inj.base.objects:
        res = sheafify(yoneda(mc_inj.base, a), top_inj)
        assert res.unit.is_iso()


def test_sheafified_constant_presheaf_is_a_sheaf(mc_inj, top_inj):
    p = constant_presheaf(mc_inj.base, 2)
    res = sheafify(p, top_inj)
    assert is_sheaf(res.presheaf, top_inj).ok


def test_constant_presheaf_fails_at_empty_cover(mc_inj, top_inj):
    p = constant_presheaf(mc_inj.base, 2)
    rep = is_sheaf(p, top_inj)
    assert not rep.ok
    # the failure is the empty sieve on the initial object: ids == (0,)
    assert any(v.ids == (0,) for v in rep.violations)


def test_matching_families_of_maximal_sieve_are_elements(mc_inj, top_inj):
    p = yoneda(mc_inj.base, 2)
    for a in mc_inj.base.objects:
        fs, fams = matching_families(p, a, maximal_sieve(mc_inj.base, a))
        assert len(fams) == p.sizes[a]


def test_sigma_is_separated_sheaf(mc_inj, top_inj):
    sigma = sigma_classifier(mc_inj)
    assert check_presheaf(sigma)
    assert is_separated(sigma, top_inj).ok
    assert is_sheaf(sigma, top_inj).ok


def test_classification_unique_for_all_canonical_monics(mc_inj, top_inj):
    sigma = sigma_classifier(mc_inj)
    for a in mc_inj.base.objects:
        for m in sub_m(mc_inj, a).elements:
            ym = yoneda_map(mc_inj.base, m)
            assert m_psh_member(mc_inj, ym)
            assert m_sh_member(mc_inj, top_inj, ym)
            assert classification_report(mc_inj, sigma, ym).ok


def test_non_monic_rejected_from_m_psh(mc_inj):
    c = mc_inj.base
    collapse = next(f for f in c.morphisms()
                    if c.mor_src[f] == 2 and c.mor_tgt[f] == 1)
    assert not m_psh_member(mc_inj, yoneda_map(c, collapse))


def test_find_presheaf_iso_finds_identity(mc_inj):
    p = yoneda(mc_inj.base, 2)
    nat = find_presheaf_iso(p, p)
    assert nat is not None and nat.check() and nat.is_iso()


def test_find_presheaf_iso_rejects_different_sizes(mc_inj):
    p = yoneda(mc_inj.base, 1)
    q = yoneda(mc_inj.base, 2)
    assert find_presheaf_iso(p, q) is None


def test_all_nat_trans_to_terminal(mc_inj):
    p = yoneda(mc_inj.base, 2)
    one = constant_presheaf(mc_inj.base, 1)
    assert len(all_nat_trans(p, one)) == 1


def test_sieve_pullback_of_maximal_is_maximal(mc_inj):
    c = mc_inj.base
    for f in c.morphisms():
        s = maximal_sieve(c, c.mor_tgt[f])
        assert sieve_pullback(c, s, f) == maximal_sieve(c, c.mor_src[f])


def test_plus_on_separated_presheaf_gives_sheaf(mc_inj, top_inj):
    # for a separated presheaf one plus application already suffices
    p = yoneda(mc_inj.base, 2)
    d = plus(p, top_inj)
    assert is_sheaf(d.presheaf, top_inj).ok
