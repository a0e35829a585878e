"""Category bundle I/O.

A bundle is a JSON document describing a finite category, with optional
sections for a restriction structure, a class of monics, and named
presheaves.  All ids are strings in the file and are interned to dense
integers in file order on load.  Load errors carry the JSON path of the
offending entry.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .fincat import FinCategory
from .mcat import MCategory
from .restriction import RestrictionCategory
from .site import Presheaf


class BundleError(ValueError):
    """Unreadable or inconsistent bundle; message includes the JSON path."""


@dataclass
class Bundle:
    cat: FinCategory
    restriction: RestrictionCategory = None
    mcat: MCategory = None
    presheaves: dict = field(default_factory=dict)  # name -> (Presheaf, bars)


def _fail(path, msg):
    raise BundleError(f"{path}: {msg}")


def _expect(data, key, kind, path):
    if key not in data:
        _fail(path, f"missing required field {key!r}")
    if not isinstance(data[key], kind):
        _fail(f"{path}.{key}", f"expected {kind.__name__}")
    return data[key]


def load_bundle(text_or_dict) -> Bundle:
    if isinstance(text_or_dict, dict):
        data = text_or_dict
    else:
        try:
            data = json.loads(text_or_dict)
        except json.JSONDecodeError as exc:
            raise BundleError(f"$: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        _fail("$", "top level must be an object")
    objects = _expect(data, "objects", list, "$")
    obj_id = {}
    for i, name in enumerate(objects):
        if not isinstance(name, str):
            _fail(f"$.objects[{i}]", "object names must be strings")
        if name in obj_id:
            _fail(f"$.objects[{i}]", f"duplicate object {name!r}")
        obj_id[name] = i
    morphisms = _expect(data, "morphisms", list, "$")
    mor_id, mor_src, mor_tgt, mor_names = {}, [], [], []
    for i, entry in enumerate(morphisms):
        path = f"$.morphisms[{i}]"
        if not isinstance(entry, dict):
            _fail(path, "each morphism must be an object")
        mid = _expect(entry, "id", str, path)
        if mid in mor_id:
            _fail(f"{path}.id", f"duplicate morphism {mid!r}")
        for k in ("src", "tgt"):
            v = _expect(entry, k, str, path)
            if v not in obj_id:
                _fail(f"{path}.{k}", f"unknown object {v!r}")
        mor_id[mid] = i
        mor_src.append(obj_id[entry["src"]])
        mor_tgt.append(obj_id[entry["tgt"]])
        mor_names.append(mid)
    identities = _expect(data, "identities", dict, "$")
    identity = [None] * len(objects)
    for name, mid in identities.items():
        path = f"$.identities.{name}"
        if name not in obj_id:
            _fail(path, f"unknown object {name!r}")
        if mid not in mor_id:
            _fail(path, f"unknown morphism {mid!r}")
        f = mor_id[mid]
        a = obj_id[name]
        if mor_src[f] != a or mor_tgt[f] != a:
            _fail(path, f"identity {mid!r} is not an endomorphism of {name!r}")
        identity[a] = f
    for name, a in obj_id.items():
        if identity[a] is None:
            _fail("$.identities", f"object {name!r} has no identity")
    comp = {}
    for i, triple in enumerate(_expect(data, "comp", list, "$")):
        path = f"$.comp[{i}]"
        if not (isinstance(triple, list) and len(triple) == 3):
            _fail(path, "each entry must be [g, f, gf]")
        for mid in triple:
            if mid not in mor_id:
                _fail(path, f"unknown morphism {mid!r}")
        g, f, gf = (mor_id[m] for m in triple)
        if (g, f) in comp:
            _fail(path, "duplicate composition entry")
        comp[(g, f)] = gf
    cat = FinCategory(len(objects), mor_src, mor_tgt, identity, comp,
                      obj_names=objects, mor_names=mor_names)
    bundle = Bundle(cat)
    if "restriction" in data:
        bar = [None] * cat.n_morphisms
        table = _expect(data, "restriction", dict, "$")
        for mid, bid in table.items():
            path = f"$.restriction.{mid}"
            if mid not in mor_id:
                _fail(path, f"unknown morphism {mid!r}")
            if bid not in mor_id:
                _fail(path, f"unknown morphism {bid!r}")
            bar[mor_id[mid]] = mor_id[bid]
        for mid, f in mor_id.items():
            if bar[f] is None:
                _fail("$.restriction", f"morphism {mid!r} has no entry")
        bundle.restriction = RestrictionCategory(cat, tuple(bar))
    if "monics" in data:
        monics = set()
        for i, mid in enumerate(_expect(data, "monics", list, "$")):
            if mid not in mor_id:
                _fail(f"$.monics[{i}]", f"unknown morphism {mid!r}")
            monics.add(mor_id[mid])
        bundle.mcat = MCategory(cat, frozenset(monics))
    for name, pdata in data.get("presheaves", {}).items():
        bundle.presheaves[name] = _load_presheaf(
            cat, obj_id, mor_id, name, pdata)
    return bundle


def _load_presheaf(cat, obj_id, mor_id, name, pdata):
    path = f"$.presheaves.{name}"
    sections = _expect(pdata, "sections", dict, path)
    elems = [None] * cat.n_objects
    for oname, lst in sections.items():
        if oname not in obj_id:
            _fail(f"{path}.sections.{oname}", f"unknown object {oname!r}")
        elems[obj_id[oname]] = list(lst)
    for oname, a in obj_id.items():
        if elems[a] is None:
            _fail(f"{path}.sections", f"object {oname!r} has no section list")
    pos = [{e: i for i, e in enumerate(es)} for es in elems]
    action = {}
    table = _expect(pdata, "action", dict, path)
    for mid, mapping in table.items():
        mpath = f"{path}.action.{mid}"
        if mid not in mor_id:
            _fail(mpath, f"unknown morphism {mid!r}")
        f = mor_id[mid]
        a, b = cat.mor_src[f], cat.mor_tgt[f]
        for e, img in mapping.items():
            if e not in pos[b]:
                _fail(mpath, f"unknown element {e!r} at the target object")
            if img not in pos[a]:
                _fail(mpath, f"unknown image {img!r} at the source object")
            action[(f, pos[b][e])] = pos[a][img]
    for f in cat.morphisms():
        for x in range(len(elems[cat.mor_tgt[f]])):
            if (f, x) not in action:
                _fail(f"{path}.action",
                      f"morphism {cat.mor_names[f]!r} has no entry for "
                      f"element {elems[cat.mor_tgt[f]][x]!r}")
    psh = Presheaf(cat, tuple(len(es) for es in elems), action,
                   tuple(tuple(es) for es in elems))
    bars = None
    if "element_bar" in pdata:
        bars = [None] * cat.n_objects
        for oname, mapping in pdata["element_bar"].items():
            bpath = f"{path}.element_bar.{oname}"
            if oname not in obj_id:
                _fail(bpath, f"unknown object {oname!r}")
            a = obj_id[oname]
            col = [None] * len(elems[a])
            for e, mid in mapping.items():
                if e not in pos[a]:
                    _fail(bpath, f"unknown element {e!r}")
                if mid not in mor_id:
                    _fail(bpath, f"unknown morphism {mid!r}")
                col[pos[a][e]] = mor_id[mid]
            if None in col:
                _fail(bpath, "element without a restriction entry")
            bars[a] = tuple(col)
        for a in cat.objects:
            if bars[a] is None:
                if elems[a]:
                    _fail(f"{path}.element_bar",
                          f"object {cat.obj_names[a]!r} has no table")
                bars[a] = ()
        bars = tuple(bars)
    return psh, bars


# -- saving ---------------------------------------------------------------------

def bundle_dict(cat: FinCategory, restriction=None, monics=None,
                presheaves=None) -> dict:
    data = {
        "objects": list(cat.obj_names),
        "morphisms": [{"id": cat.mor_names[f],
                       "src": cat.obj_names[cat.mor_src[f]],
                       "tgt": cat.obj_names[cat.mor_tgt[f]]}
                      for f in cat.morphisms()],
        "identities": {cat.obj_names[a]: cat.mor_names[cat.identity[a]]
                       for a in cat.objects},
        "comp": sorted([cat.mor_names[g], cat.mor_names[f],
                        cat.mor_names[gf]]
                       for (g, f), gf in cat.comp.items()),
    }
    if restriction is not None:
        data["restriction"] = {cat.mor_names[f]: cat.mor_names[restriction[f]]
                               for f in cat.morphisms()}
    if monics is not None:
        data["monics"] = sorted(cat.mor_names[m] for m in monics)
    if presheaves:
        data["presheaves"] = {
            name: _presheaf_dict(cat, psh, bars)
            for name, (psh, bars) in sorted(presheaves.items())}
    return data


def _presheaf_dict(cat, psh: Presheaf, bars):
    out = {
        "sections": {cat.obj_names[a]: [psh.name(a, x) for x in
                                        psh.elements(a)]
                     for a in cat.objects},
        "action": {cat.mor_names[f]: {
            psh.name(cat.mor_tgt[f], x): psh.name(cat.mor_src[f],
                                                  psh.act(f, x))
            for x in psh.elements(cat.mor_tgt[f])}
            for f in cat.morphisms()},
    }
    if bars is not None:
        out["element_bar"] = {
            cat.obj_names[a]: {psh.name(a, x): cat.mor_names[bars[a][x]]
                               for x in psh.elements(a)}
            for a in cat.objects}
    return out


def dump_bundle(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


# -- the fixture registry ---------------------------------------------------------

def build_fixture(name: str) -> Bundle:
    """Named fixtures accepted anywhere a bundle path is: finset_p_<n>,
    finset_inj_<n>, finset_iso_<n>, nojoin."""
    from . import fixtures
    if name == "nojoin":
        rc = fixtures.build_nojoin_fixture()
        return Bundle(rc.base, restriction=rc)
    for prefix, maker in (("finset_p_", "p"), ("finset_inj_", "inj"),
                          ("finset_iso_", "iso")):
        if name.startswith(prefix) and name[len(prefix):].isdigit():
            n = int(name[len(prefix):])
            if maker == "p":
                rc = fixtures.build_finset_p(n)
                return Bundle(rc.base, restriction=rc)
            mc = fixtures.build_finset_mcat(n, maker)
            return Bundle(mc.base, mcat=mc)
    raise KeyError(name)


FIXTURE_NAMES = ("finset_p_2", "finset_inj_2", "finset_iso_2", "nojoin")


def resolve_bundle(name_or_path: str) -> Bundle:
    """A registered fixture name, or a path to a bundle file."""
    try:
        return build_fixture(name_or_path)
    except KeyError:
        pass
    try:
        with open(name_or_path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise BundleError(f"$: cannot read {name_or_path!r} ({exc})") from exc
    return load_bundle(text)
