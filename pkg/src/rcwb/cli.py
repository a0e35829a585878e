"""Command line entry point.

Every subcommand takes a bundle (a registered fixture name or a JSON file),
prints sorted law-report lines, writes a machine-readable JSON summary when
--out is given, and exits 0 on success, 1 on a law failure, 2 on an
unreadable bundle, 3 on an internal invariant breach.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bundles import (Bundle, BundleError, bundle_dict, dump_bundle,
                      resolve_bundle)
from .fincat import validate_category
from .joins import check_join_axioms
from .mcat import check_m_system, is_geometric, karoubi_r, par
from .reports import InternalInvariantError, LawReport
from .restriction import check_restriction_axioms
from .rpsh import RestrictionPresheaf, check_jrp_axioms, check_rp_axioms
from .site import (check_presheaf, generate_topology, is_separated, is_sheaf,
                   saturation_is_fixpoint, sheafify, subcanonical_report,
                   yoneda)


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-family", type=int, default=None,
                        help="bound on the size of families in join suites")
    common.add_argument("--seed", type=int, default=0,
                        help="seed recorded in the summary (sampled suites)")
    common.add_argument("--out", default=None,
                        help="path for the machine-readable JSON summary")
    top = argparse.ArgumentParser(
        prog="rcwb",
        description="Law checking and constructions for finite restriction "
                    "categories, span categories and sheaf transfers.")
    sub = top.add_subparsers(dest="command", required=True)
    for name, extra in (
            ("check-laws", ()),
            ("build-par", ()),
            ("karoubi", ()),
            ("geometric", ()),
            ("topology", ()),
            ("sheaf-check", ("presheaf",)),
            ("sheafify", ("presheaf",)),
            ("transfer", ("presheaf",)),
            ("roundtrip", ("presheaf",)),
            ("unit", ())):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("bundle")
        for arg in extra:
            p.add_argument(arg)
        if name == "transfer":
            p.add_argument("--direction", choices=("to-jrp", "to-sheaf"),
                           required=True)
    return top


def _need(bundle: Bundle, what):
    if what == "restriction" and bundle.restriction is None:
        raise BundleError("$: this command needs a restriction section")
    if what == "mcat" and bundle.mcat is None:
        raise BundleError("$: this command needs a monics section")


def _resolve_presheaf(bundle: Bundle, cat, name):
    """A named presheaf from the bundle, or y<object> / <object> for the
    representable; returns (Presheaf, element bars or None)."""
    if cat is bundle.cat and name in bundle.presheaves:
        return bundle.presheaves[name]
    candidates = [name]
    if name.startswith("y"):
        candidates.append(name[1:])
    for cand in candidates:
        if cand in cat.obj_names:
            return yoneda(cat, cat.obj_names.index(cand)), None
    raise BundleError(f"$.presheaves: no presheaf or object named {name!r}")


def _run(args) -> list:
    """Returns the list of LawReports; artifacts are attached as summaries."""
    bundle = resolve_bundle(args.bundle)
    reports = []
    extra = {}
    cmd = args.command

    if cmd == "check-laws":
        reports.append(validate_category(bundle.cat))
        if bundle.restriction is not None:
            reports.append(check_restriction_axioms(bundle.restriction))
            if reports[-1].ok:
                reports.append(check_join_axioms(bundle.restriction,
                                                 args.max_family))
        if bundle.mcat is not None:
            reports.append(check_m_system(bundle.mcat))
        for name, (psh, bars) in sorted(bundle.presheaves.items()):
            rep = LawReport(f"presheaf:{name}")
            if not check_presheaf(psh):
                rep.add("PSH", (), "not a presheaf")
            reports.append(rep)
            if bars is not None and bundle.restriction is not None:
                rp = RestrictionPresheaf(bundle.restriction, psh, bars)
                reports.append(check_rp_axioms(rp))
                if reports[-1].ok:
                    reports.append(check_jrp_axioms(rp, args.max_family))

    elif cmd == "build-par":
        _need(bundle, "mcat")
        pc = par(bundle.mcat)
        reports.append(check_restriction_axioms(pc.rc))
        extra["artifact"] = bundle_dict(pc.rc.base, restriction=pc.rc.bar)

    elif cmd == "karoubi":
        _need(bundle, "restriction")
        kr = karoubi_r(bundle.restriction)
        reports.append(check_restriction_axioms(kr.rc))
        extra["artifact"] = bundle_dict(kr.rc.base, restriction=kr.rc.bar)

    elif cmd == "geometric":
        _need(bundle, "mcat")
        reports.append(check_m_system(bundle.mcat))
        reports.append(is_geometric(bundle.mcat, args.max_family))

    elif cmd == "topology":
        _need(bundle, "mcat")
        top = generate_topology(bundle.mcat)
        rep = LawReport("topology")
        if not saturation_is_fixpoint(top):
            rep.add("TOP-FIX", (), "saturation is not a fixpoint")
        reports.append(rep)
        reports.append(subcanonical_report(top))
        c = bundle.cat
        extra["topology"] = {
            c.obj_names[a]: [sorted(c.mor_names[f] for f in s)
                             for s in sorted(top.covers[a], key=sorted)]
            for a in c.objects}

    elif cmd in ("sheaf-check", "sheafify"):
        _need(bundle, "mcat")
        top = generate_topology(bundle.mcat)
        psh, _ = _resolve_presheaf(bundle, bundle.cat, args.presheaf)
        reports.append(is_separated(psh, top))
        sheaf_rep = is_sheaf(psh, top)
        if cmd == "sheaf-check":
            reports.append(sheaf_rep)
        else:
            res = sheafify(psh, top)
            rep = LawReport("sheafify")
            if not is_sheaf(res.presheaf, top).ok:
                rep.add("SHFY", (), "result is not a sheaf")
            if sheaf_rep.ok and not res.unit.is_iso():
                rep.add("SHFY-UNIT", (), "unit not an iso on a sheaf")
            reports.append(rep)
            extra["artifact"] = bundle_dict(
                bundle.cat, presheaves={"sheafified": (res.presheaf, None)})

    elif cmd == "transfer":
        _need(bundle, "mcat")
        from .bridge import (amalgamation_formula_report, sheaf_to_jrp,
                             transfer_report)
        from .rpsh import yoneda_jr
        pc = par(bundle.mcat)
        top = generate_topology(bundle.mcat)
        if args.direction == "to-jrp":
            psh, _ = _resolve_presheaf(bundle, bundle.cat, args.presheaf)
            reports.append(transfer_report(pc, top, psh, args.max_family))
            tr = sheaf_to_jrp(pc, psh)
            extra["artifact"] = bundle_dict(
                pc.rc.base, restriction=pc.rc.bar,
                presheaves={"transferred": (tr.rp.presheaf, tr.rp.bar_elem)})
        else:
            name = args.presheaf
            cand = name[1:] if name.startswith("y") else name
            if cand not in pc.rc.base.obj_names:
                raise BundleError(
                    f"$: to-sheaf expects a representable y<object>; "
                    f"no object named {cand!r}")
            rp = yoneda_jr(pc.rc, pc.rc.base.obj_names.index(cand))
            reports.append(amalgamation_formula_report(pc, top, rp,
                                                       args.max_family))
            from .bridge import jrp_to_sheaf
            dot = jrp_to_sheaf(pc, rp)
            extra["artifact"] = bundle_dict(
                bundle.cat, presheaves={"transferred": (dot.presheaf, None)})

    elif cmd == "roundtrip":
        _need(bundle, "mcat")
        from .bridge import roundtrip_report
        pc = par(bundle.mcat)
        top = generate_topology(bundle.mcat)
        reports.append(roundtrip_report(pc, top, args.max_family))

    elif cmd == "unit":
        _need(bundle, "restriction")
        from .bridge import cocompletion_unit
        res = cocompletion_unit(bundle.restriction, args.max_family)
        reports.append(res.report)

    return reports, extra


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        reports, extra = _run(args)
    except BundleError as exc:
        print(f"bundle error: {exc}", file=sys.stderr)
        return 2
    except InternalInvariantError as exc:
        print(f"internal invariant breach: {exc}", file=sys.stderr)
        return 3
    lines = []
    for rep in reports:
        lines.extend(f"{rep.name}\t{line}" for line in rep.lines())
    for line in sorted(lines):
        print(line)
    ok = all(rep.ok for rep in reports)
    print(f"{'PASS' if ok else 'FAIL'}\t{args.command}\t{args.bundle}")
    summary = {
        "command": args.command,
        "bundle": args.bundle,
        "seed": args.seed,
        "max_family": args.max_family,
        "ok": ok,
        "reports": [rep.summary() for rep in reports],
    }
    summary.update(extra)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(dump_bundle(summary))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
