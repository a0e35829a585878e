import json

import pytest

from rcwb.bundles import (BundleError, build_fixture, bundle_dict,
                          dump_bundle, load_bundle, resolve_bundle)
from rcwb.cli import main
from rcwb.fixtures import build_finset_p


def _finset_p2_text():
    rc = build_finset_p(2)
    return dump_bundle(bundle_dict(rc.base, restriction=rc.bar))


def test_bundle_roundtrip_is_faithful():
    rc = build_finset_p(2)
    bundle = load_bundle(_finset_p2_text())
    c = bundle.cat
    assert c.n_objects == rc.base.n_objects
    assert c.n_morphisms == rc.base.n_morphisms
    assert c.comp == rc.base.comp
    assert bundle.restriction.bar == rc.bar


def test_bundle_dump_is_deterministic():
    assert _finset_p2_text() == _finset_p2_text()


def test_loader_flags_dangling_src():
    data = json.loads(_finset_p2_text())
    data["morphisms"][3]["src"] = "ghost"
    with pytest.raises(BundleError, match=r"morphisms\[3\].src"):
        load_bundle(data)


def test_loader_flags_missing_identity():
    data = json.loads(_finset_p2_text())
    victim = next(iter(data["identities"]))
    del data["identities"][victim]
    with pytest.raises(BundleError, match="identities"):
        load_bundle(data)


def test_loader_flags_non_endo_identity():
    data = json.loads(_finset_p2_text())
    non_endo = next(m["id"] for m in data["morphisms"]
                    if m["src"] != m["tgt"])
    data["identities"][next(iter(data["identities"]))] = non_endo
    with pytest.raises(BundleError, match="not an endomorphism"):
        load_bundle(data)


def test_loader_rejects_garbage():
    with pytest.raises(BundleError, match="not valid JSON"):
        load_bundle("{nope")


def test_fixture_registry_names():
    for name in ("finset_p_2", "finset_inj_2", "finset_iso_2", "nojoin"):
        bundle = build_fixture(name)
        assert bundle.cat.n_morphisms > 0
    with pytest.raises(KeyError):
        build_fixture("unknown_fixture")


def test_presheaf_section_roundtrip(tmp_path):
    from rcwb.fixtures import build_finset_mcat
    from rcwb.site import yoneda
    mc = build_finset_mcat(1, "inj")
    psh = yoneda(mc.base, 1)
    text = dump_bundle(bundle_dict(mc.base, monics=mc.monics,
                                   presheaves={"y1": (psh, None)}))
    bundle = load_bundle(text)
    got, bars = bundle.presheaves["y1"]
    assert got.sizes == psh.sizes
    assert got.action == psh.action
    assert bundle.mcat.monics == mc.monics


# -- CLI ------------------------------------------------------------------------

def test_cli_check_laws_pass(capsys):
    assert main(["check-laws", "finset_p_2", "--max-family", "3"]) == 0
    out = capsys.readouterr().out
    assert "PASS\tcheck-laws\tfinset_p_2" in out


def test_cli_check_laws_fail_on_nojoin(capsys):
    assert main(["check-laws", "nojoin"]) == 1
    out = capsys.readouterr().out
    assert "JOIN-MISSING" in out


def test_cli_geometric_rejects_iso(capsys):
    assert main(["geometric", "finset_iso_2"]) == 1
    assert "GEO-MU" in capsys.readouterr().out


def test_cli_unreadable_bundle(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{broken")
    assert main(["check-laws", str(bad)]) == 2


def test_cli_topology_summary(tmp_path, capsys):
    out = tmp_path / "summary.json"
    assert main(["topology", "finset_inj_2", "--out", str(out)]) == 0
    summary = json.loads(out.read_text())
    assert summary["ok"] is True
    assert "topology" in summary
    # covers of the empty set include the empty sieve
    assert [] in summary["topology"]["set0"]


def test_cli_build_par_emits_bundle(tmp_path):
    out = tmp_path / "par.json"
    assert main(["build-par", "finset_inj_2", "--out", str(out)]) == 0
    summary = json.loads(out.read_text())
    loaded = load_bundle(summary["artifact"])
    assert loaded.cat.n_morphisms == 23
    assert loaded.restriction is not None


def test_cli_transfer_and_roundtrip(tmp_path):
    assert main(["transfer", "finset_inj_2", "yset2", "--direction",
                 "to-jrp", "--max-family", "2"]) == 0
    assert main(["transfer", "finset_inj_2", "yset2", "--direction",
                 "to-sheaf", "--max-family", "2"]) == 0
    assert main(["roundtrip", "finset_inj_2", "yset1",
                 "--max-family", "2"]) == 0


def test_cli_unit(capsys):
    assert main(["unit", "finset_p_2", "--max-family", "2"]) == 0


def test_cli_needs_matching_sections(capsys):
    # geometric needs monics; finset_p_2 only carries a restriction
    assert main(["geometric", "finset_p_2"]) == 2
