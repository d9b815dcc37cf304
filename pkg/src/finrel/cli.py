"""Command-line batch driver: ``finrel <command> [options]``.

Exit status is 0 when every check meets its expectation, 1 on any mismatch
and 2 on usage or parse errors.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import catalog, exreg, suite, torsion
from .errors import FinRelError, ParseError, UnknownName
from .finstruct import CategoryId
from .relcalc import congruence

CATEGORIES = [c.value for c in CategoryId]


def _categories(text):
    names = [t.strip() for t in text.split(",") if t.strip()]
    bad = [n for n in names if n not in CATEGORIES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown category {bad[0]!r}; choose from {', '.join(CATEGORIES)}")
    return names


def _caps(text):
    caps = dict(suite.DEFAULT_CAPS)
    for item in filter(None, (t.strip() for t in text.split(","))):
        key, sep, value = item.partition("=")
        if not sep or key not in caps:
            raise argparse.ArgumentTypeError(f"bad cap {item!r}; known caps: {', '.join(caps)}")
        if value.lower() == "none":
            caps[key] = None
            continue
        try:
            caps[key] = int(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f"cap {key} needs an integer or 'none'") from None
    return caps


def _positive(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--category", type=_categories, help="comma-separated category filter")
    common.add_argument("--max-order", type=_positive, help="override the order bound of every sweep")
    common.add_argument("--caps", type=_caps, default=None,
                        help="e.g. homs=4096,relations=100000 ('none' lifts a cap)")
    common.add_argument("--jobs", type=_positive, default=1, help="worker processes")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    common.add_argument("--corpus", help="read objects from a saved corpus instead of generating them")

    parser = argparse.ArgumentParser(prog="finrel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("lemma2", parents=[common], help="relation lemma over all homs")
    p.add_argument("--identities", action="store_true", help="only identity morphisms")
    sub.add_parser("maltsev", parents=[common], help="Mal'tsev sweep per category")
    sub.add_parser("protomodular", parents=[common], help="protomodularity sweep per category")
    sub.add_parser("verify-all", parents=[common], help="every acceptance-level check")

    p = sub.add_parser("exreg", parents=[common], help="an object of the exact completion")
    p.add_argument("--object", required=True, help="builtin name or canonical key")
    p.add_argument("--eq", default="null",
                   help="JSON list, one list of generating pairs per sort; closed to a congruence")
    p = sub.add_parser("torsion", parents=[common], help="torsion decomposition of one object")
    p.add_argument("--instance", required=True, help="PPrimaryAb(p), NilRedCRng or AbNormXMod")
    p.add_argument("--object", required=True, help="builtin name or canonical key")
    p = sub.add_parser("generate", parents=[common], help="write a corpus of catalog objects")
    p.add_argument("--out", required=True, help="output path")
    return parser


def config_from(args) -> suite.RunConfig:
    return suite.RunConfig(
        categories=args.category, max_order=args.max_order,
        caps=args.caps or dict(suite.DEFAULT_CAPS), jobs=args.jobs, format=args.format,
        seed=args.seed, corpus=args.corpus,
        identities_only=getattr(args, "identities", False),
    )


def _emit(report, elapsed, fmt, out):
    if fmt == "json":
        out.write(suite.to_json(report))
    else:
        out.write(suite.to_text(report, elapsed))
    return 0 if report["summary"]["ok"] else 1


def lookup(config: suite.RunConfig, category, name):
    """A builtin by name, else a corpus or generated object by canonical key or name."""
    category = CategoryId(category)
    try:
        return catalog.builtin(category, name)
    except UnknownName:
        pass
    entries = catalog.load(config.corpus) if config.corpus else catalog.generate_all(
        category, (4, 4) if category in (CategoryId.Norm, CategoryId.XMod) else 8)
    return catalog.find(entries, name, None if config.corpus else category)


def cmd_exreg(config, args):
    category = (args.category or ["Norm"])[0]
    base = lookup(config, category, args.object)
    try:
        given = json.loads(args.eq)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, "--eq") from None
    given = given or [[] for _ in base.sorts]
    if not isinstance(given, list) or len(given) != len(base.sorts):
        raise ParseError(f"need one list of pairs per sort ({len(base.sorts)})", "--eq")
    try:
        pairs = [[(int(x), int(y)) for x, y in sort] for sort in given]
    except (TypeError, ValueError):
        raise ParseError("pairs must be two-element integer lists", "--eq") from None
    for sort, n in zip(pairs, base.sorts):
        if any(not (0 <= v < n) for p in sort for v in p):
            raise ParseError("pair element out of range", "--eq")
    a = exreg.ExObject(base, congruence(base, pairs))
    lq, _ = exreg.reflect(a)
    entry = {"check": "exreg", "category": base.category.value, "object": a.to_data(),
             "reflection": {"key": lq.canonical_key, "sorts": list(lq.sorts)}, "pass": True}
    if base.category is CategoryId.Norm:
        x = exreg.norm_to_xmod(a)
        entry["xmod"] = {"key": x.canonical_key, "sorts": list(x.sorts),
                         "boundary": list(x.tables["bd"])}
    return entry


def cmd_torsion(config, args):
    inst = torsion.instance(args.instance)
    c = lookup(config, inst.ambient, args.object)
    tc = inst.radical(c)
    lc, unit = torsion.reflect(inst, c)
    return {"check": "torsion", "instance": inst.name, "object": c.canonical_key,
            "tc": {"subsets": [sorted(s) for s in tc.subsets], "order": tc.obj.order},
            "lc": {"key": lc.canonical_key, "sorts": list(lc.sorts)},
            "unit_is_identity": unit.is_iso() and c == lc,
            "torsion_free": inst.is_torsion_free(c),
            "ses": torsion.verify_ses(inst, c), "pass": torsion.verify_ses(inst, c)}


def _single(config, command, entry):
    return {"schema": suite.SCHEMA, "command": command, "config": config.to_data(),
            "entries": [entry], "summary": {"entries": 1, "passed": int(entry["pass"]),
                                            "ok": entry["pass"]}}


def _describe(entry) -> str:
    if entry["check"] == "exreg":
        lines = [f"ExObject over {entry['category']}: base {entry['object']['base']}",
                 f"  eq {json.dumps(entry['object']['eq'])}",
                 f"reflection {entry['reflection']['key']} sorts {entry['reflection']['sorts']}"]
        if "xmod" in entry:
            x = entry["xmod"]
            lines.append(f"crossed module {x['key']} sorts {x['sorts']} boundary {x['boundary']}")
        return "\n".join(lines) + "\n"
    return (f"{entry['instance']} on {entry['object']}\n"
            f"TC {entry['tc']['subsets']} (order {entry['tc']['order']})\n"
            f"LC {entry['lc']['key']} sorts {entry['lc']['sorts']}\n"
            f"unit is identity: {entry['unit_is_identity']}\n"
            f"SES {'ok' if entry['ses'] else 'FAILED'}\n")


def cmd_generate(config, args):
    cats = config.categories or CATEGORIES
    entries = []
    for c in cats:
        default = 8 if c != "FinAb" else 16
        bound = config.bound(c, (4, 4) if c in ("Norm", "XMod") else default)
        entries.extend(catalog.generate_all(c, bound))
    catalog.save(entries, args.out)
    return len(entries)


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    config = config_from(args)
    try:
        if args.command in ("lemma2", "maltsev", "protomodular"):
            tasks = suite.sweep_tasks(args.command, config)
            report, elapsed = suite.run(tasks, config, args.command)
            return _emit(report, elapsed, config.format, out)
        if args.command == "verify-all":
            report, elapsed = suite.run(suite.verify_all_tasks(config), config, "verify-all")
            return _emit(report, elapsed, config.format, out)
        if args.command == "generate":
            n = cmd_generate(config, args)
            out.write(f"wrote {n} entries to {args.out}\n")
            return 0
        entry = cmd_exreg(config, args) if args.command == "exreg" else cmd_torsion(config, args)
        report = _single(config, args.command, entry)
        if config.format == "json":
            out.write(suite.to_json(report))
        else:
            out.write(_describe(entry))
        return 0 if entry["pass"] else 1
    except UnknownName as exc:
        print(f"finrel: error: unknown object {exc}", file=sys.stderr)
        return 2
    except (ParseError, ValueError) as exc:
        print(f"finrel: error: {exc}", file=sys.stderr)
        return 2
    except FinRelError as exc:
        print(f"finrel: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
