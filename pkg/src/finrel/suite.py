"""Independent checks, their default bounds, and deterministic report assembly.

A check is a top-level function taking ``(config, params)`` and returning a
JSON-ready dict with a boolean ``"pass"``.  Checks run in worker processes;
the reducer puts results back in task order, so the report does not depend
on the degree of parallelism.
"""
from __future__ import annotations

import json
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from . import catalog, exreg, propcheck, relcalc, torsion
from .errors import CapExceeded
from .finstruct import CategoryId, Morphism, hom_enumerate, relabel

SCHEMA = 1

# Verdicts each category is expected to produce; a refutation in FinSet is a pass.
EXPECTED = {
    "maltsev": {
        "FinSet": "RefutedWithWitness", "FinPtSet": "RefutedWithWitness",
        "FinAb": "ConfirmedOnSample", "FinGrp": "ConfirmedOnSample",
        "FinCRng": "ConfirmedOnSample", "Norm": "ConfirmedOnSample",
        "XMod": "ConfirmedOnSample",
    },
}
EXPECTED["protomodular"] = dict(EXPECTED["maltsev"])

DEFAULT_BOUNDS = {
    "lemma2": {"FinSet": 8, "FinAb": 8, "FinGrp": 8, "FinCRng": 8},
    "maltsev": {"FinSet": 3, "FinPtSet": 3, "FinAb": 8, "FinGrp": 8, "FinCRng": 8,
                "Norm": (4, 4), "XMod": (4, 4)},
    "protomodular": {"FinSet": 2, "FinPtSet": 3, "FinAb": 8, "FinGrp": 6, "FinCRng": 8,
                     "Norm": (4, 4), "XMod": (4, 4)},
}

DEFAULT_CAPS = {"homs": None, "relations": 1 << 18, "naturality_homs": 256, "samples": 64}


@dataclass
class RunConfig:
    categories: list | None = None  # None: every category
    max_order: int | None = None
    caps: dict = field(default_factory=lambda: dict(DEFAULT_CAPS))
    jobs: int = 1
    format: str = "text"
    seed: int = 0
    corpus: str | None = None
    identities_only: bool = False

    def wants(self, category) -> bool:
        return self.categories is None or CategoryId(category).value in self.categories

    def bound(self, category, default):
        """The order bound for ``category``: ``max_order`` when given, else ``default``."""
        if self.max_order is None:
            return default
        if CategoryId(category) in (CategoryId.Norm, CategoryId.XMod):
            return (self.max_order, self.max_order)
        return self.max_order

    def to_data(self) -> dict:
        d = asdict(self)
        d.pop("jobs")
        d.pop("format")
        return d


# -- object sources ---------------------------------------------------------------------

_CORPUS = {}


def _within(obj, bound):
    bound = bound if isinstance(bound, (tuple, list)) else (bound,) * len(obj.sorts)
    return all(s <= b for s, b in zip(obj.sorts, bound))


def objects(config: RunConfig, category, bound) -> list:
    """Objects of ``category`` within ``bound``: from the corpus file if one is set, else generated."""
    category = CategoryId(category)
    if config.corpus is not None:
        if config.corpus not in _CORPUS:
            _CORPUS[config.corpus] = catalog.load(config.corpus)
        return [e.object for e in _CORPUS[config.corpus]
                if e.object.category is category and _within(e.object, bound)]
    return [e.object for e in catalog.generate_all(category, bound)]


def _bound_data(bound):
    return list(bound) if isinstance(bound, (tuple, list)) else [bound]


# -- checks -------------------------------------------------------------------------------

def check_lemma2(config: RunConfig, params) -> dict:
    """``check_relation_lemma`` over every hom between the objects within bounds."""
    category = CategoryId(params["category"])
    bound = params["bound"]
    objs = objects(config, category, bound)
    out = {"check": "lemma2", "category": category.value, "bound": _bound_data(bound)}
    total = passed = 0
    failure = None
    truncated = False
    if not category.signature.ops and not config.identities_only and config.caps.get("homs") is None:
        sizes = [o.sorts[0] for o in objs]
        for n in sizes:
            for m in sizes:
                maps, kp, re = relcalc.lemma_counts_for_set_maps(n, m, pointed=category.pointed)
                total += maps
                passed += maps - max(kp, re)
                if (kp or re) and failure is None:
                    failure = {"dom": str(n), "cod": str(m), "kernel_pair_failures": kp,
                               "regular_epi_failures": re}
    else:
        for a in objs:
            for b in objs:
                if config.identities_only:
                    if a is not b:
                        continue
                    homs = [Morphism.identity(a)]
                else:
                    homs = hom_enumerate(a, b, cap=config.caps.get("homs"))
                    truncated |= homs.truncated
                for f in homs:
                    total += 1
                    flags = relcalc.check_relation_lemma(f)
                    if all(flags.values()):
                        passed += 1
                    elif failure is None:
                        failure = {"dom": a.canonical_key, "cod": b.canonical_key,
                                   "maps": [list(m) for m in f.maps], **flags}
    out.update({"objects": len(objs), "morphisms": total, "passed": passed,
                "truncated": truncated, "pass": passed == total})
    if failure is not None:
        out["failure"] = failure
    return out


def _sweep(kind, config, params):
    category = CategoryId(params["category"])
    bound = params["bound"]
    objs = objects(config, category, bound)
    fn = propcheck.maltsev_witness if kind == "maltsev" else propcheck.protomodularity_witness
    try:
        verdict = fn(category, objs, cap=config.caps.get("relations")).to_data()
    except CapExceeded as exc:
        verdict = {"verdict": propcheck.Verdict.UNKNOWN.value, "cap_exceeded": str(exc)}
    verdict.pop("swept", None)
    expected = EXPECTED[kind][category.value]
    out = {"check": kind, "category": category.value, "bound": _bound_data(bound),
           "objects": len(objs), "expected": expected, **verdict}
    ok = verdict["verdict"] == expected
    if kind == "protomodular" and "details" in verdict:
        ok = ok and verdict["details"]["bc_agree"]
    out["pass"] = ok
    return out


def check_maltsev(config, params):
    return _sweep("maltsev", config, params)


def check_protomodular(config, params):
    return _sweep("protomodular", config, params)


def check_completion_laws(config, params) -> dict:
    category = CategoryId(params["category"])
    bases = objects(config, category, params["bound"])
    audit = exreg.category_law_audit(exreg.completion_objects(bases))
    return {"check": "completion_laws", "category": category.value,
            "bound": _bound_data(params["bound"]), **audit,
            "pass": audit["identity"] and audit["associativity"]}


def norm_witness() -> exreg.ExObject:
    """``({0,2} <| Z/4)`` with the diagonal on ``N`` and congruence mod ``{0,2}`` on ``G``."""
    base = catalog.builtin(CategoryId.Norm, "{0,2}<|Z/4")
    eq = relcalc.congruence(base, [[], [(0, 2)]])
    return exreg.ExObject(base, eq)


def check_norm_xmod(config, params) -> dict:
    """The comparison ``Norm_ex/reg -> XMod`` on the named witness and onto small crossed modules."""
    a = norm_witness()
    image = exreg.norm_to_xmod(a)
    target = catalog.builtin(CategoryId.XMod, "Z/2-0->Z/2")
    witness_ok = image.canonical_key == target.canonical_key
    lq, _ = exreg.reflect(a)
    bound = params["bound"]
    xmods = objects(config, CategoryId.XMod, bound)
    missed = [x.canonical_key for x in xmods
              if exreg.norm_to_xmod(exreg.semidirect_witness(x)).canonical_key != x.canonical_key]
    norms = objects(config, CategoryId.Norm, (2, 4))
    audit = exreg.verify_exreg_characterization(exreg.completion_objects(norms[:4]), norms[:4])
    audit_ok = all(audit[k] for k in ("full_faithfulness", "subobject_closure", "covering"))
    return {"check": "norm_xmod", "witness": a.to_data(), "image": image.canonical_key,
            "image_boundary": list(image.tables["bd"]), "witness_ok": witness_ok,
            "reflection_sorts": list(lq.sorts), "xmods": len(xmods), "bound": _bound_data(bound),
            "not_reached": missed, "characterization": audit,
            "pass": witness_ok and not missed and audit_ok}


def check_completion_sweeps(config, params) -> dict:
    category = CategoryId(params["category"])
    bases = objects(config, category, params["bound"])
    objs = exreg.completion_objects(bases)
    m = exreg.completion_maltsev(objs).to_data()
    p = exreg.completion_protomodularity(objs).to_data()
    for v in (m, p):
        v.pop("swept", None)
    expected = EXPECTED["maltsev"][category.value]
    ok = m["verdict"] == expected and p["verdict"] == expected and p["details"]["bc_agree"]
    ok = ok and p["details"]["pulled_back_failures"] == 0
    return {"check": "completion_sweeps", "category": category.value,
            "bound": _bound_data(params["bound"]), "objects": len(objs), "expected": expected,
            "maltsev": m, "protomodular": p, "pass": ok}


TORSION_BOUNDS = {"PPrimaryAb(2)": 16, "NilRedCRng": 8, "AbNormXMod": (4, 4)}


def _torsion_objects(config, name):
    inst = torsion.instance(name)
    return inst, objects(config, inst.ambient, TORSION_BOUNDS[name])


def check_torsion_suite(config, params) -> dict:
    inst, objs = _torsion_objects(config, params["instance"])
    res = torsion.torsion_suite(inst, objs, hom_cap=config.caps.get("naturality_homs"))
    keys = ("ses", "orthogonality", "radical_idempotent", "reflector_idempotent", "naturality")
    out = {"check": "torsion_suite", "instance": inst.name, **res}
    out["examples"] = examples = {}
    if inst.name == "PPrimaryAb(2)":
        c = catalog.builtin(CategoryId.FinAb, "Z/12")
        lc, _ = torsion.reflect(inst, c)
        examples["Z/12"] = {"tc_order": inst.radical(c).obj.order,
                            "lc_is_Z/3": lc.canonical_key ==
                                catalog.builtin(CategoryId.FinAb, "Z/3").canonical_key}
        ex_ok = examples["Z/12"]["tc_order"] == 4 and examples["Z/12"]["lc_is_Z/3"]
    elif inst.name == "NilRedCRng":
        c = catalog.builtin(CategoryId.FinCRng, "Z/4")
        lc, _ = torsion.reflect(inst, c)
        examples["Z/4"] = {"tc": sorted(inst.radical(c).subsets[0]),
                           "lc_is_Z/2": lc.canonical_key ==
                               catalog.builtin(CategoryId.FinCRng, "Z/2").canonical_key}
        ex_ok = examples["Z/4"]["tc"] == [0, 2] and examples["Z/4"]["lc_is_Z/2"]
    else:
        ex_ok = True
    out["pass"] = all(res[k] for k in keys) and ex_ok
    return out


def check_semi_left_exact(config, params) -> dict:
    inst, objs = _torsion_objects(config, params["instance"])
    sle = torsion.semi_left_exact_sweep(inst, objs)
    her = torsion.is_hereditary(inst, objs).to_data()
    her.pop("swept", None)
    ok = sle["ok"] and her["verdict"] == "ConfirmedOnSample" and her["details"]["agree"]
    return {"check": "semi_left_exact", "instance": inst.name, "semi_left_exact": sle,
            "hereditary": her, "pass": ok}


def check_stability(config, params) -> dict:
    inst = torsion.p_primary_ab(2)
    objs = objects(config, CategoryId.FinAb, params["bound"])
    stab = torsion.stability_sweep(inst, objs)
    rqk = torsion.rqk_sweep(objects(config, CategoryId.FinAb, params["rqk_bound"]))
    return {"check": "stability", "instance": inst.name, "bound": _bound_data(params["bound"]),
            **stab, "rqk": rqk, "rqk_bound": _bound_data(params["rqk_bound"]),
            "pass": all(v["ok"] for v in stab.values()) and rqk["ok"]}


def check_descent(config, params) -> dict:
    inst = torsion.p_primary_ab(2)
    res = torsion.descent_sweep(inst, objects(config, CategoryId.FinAb, params["bound"]))
    return {"check": "descent", "instance": inst.name, "bound": _bound_data(params["bound"]),
            **res, "pass": res["ok"]}


def check_canonical_invariance(config, params) -> dict:
    """Random relabellings (seeded) leave canonical keys unchanged."""
    rng = random.Random(config.seed)
    category = CategoryId(params["category"])
    objs = objects(config, category, params["bound"])
    trials = failures = 0
    for obj in objs:
        for _ in range(max(1, config.caps.get("samples", 64) // max(1, len(objs)))):
            perms = []
            for n in obj.sorts:
                rest = list(range(1, n))
                rng.shuffle(rest)
                perms.append([0] + rest if n else [])
            trials += 1
            failures += relabel(obj, perms).canonical_key != obj.canonical_key
    return {"check": "canonical_invariance", "category": category.value,
            "bound": _bound_data(params["bound"]), "trials": trials, "failures": failures,
            "pass": failures == 0}


CHECKS = {
    "lemma2": check_lemma2,
    "maltsev": check_maltsev,
    "protomodular": check_protomodular,
    "completion_laws": check_completion_laws,
    "norm_xmod": check_norm_xmod,
    "completion_sweeps": check_completion_sweeps,
    "torsion_suite": check_torsion_suite,
    "semi_left_exact": check_semi_left_exact,
    "stability": check_stability,
    "descent": check_descent,
    "canonical_invariance": check_canonical_invariance,
}


# -- task lists --------------------------------------------------------------------------

def sweep_tasks(kind, config: RunConfig) -> list:
    """One task per category of the ``kind`` table selected by the config."""
    return [(kind, {"category": c, "bound": config.bound(c, b)}, None)
            for c, b in DEFAULT_BOUNDS[kind].items() if config.wants(c)]


def verify_all_tasks(config: RunConfig) -> list:
    """Every acceptance-level check as ``(check, params, criterion)``."""
    tasks = [(k, p, 1) for k, p, _ in sweep_tasks("lemma2", config)]
    tasks += [(k, p, 2) for k, p, _ in sweep_tasks("maltsev", config)]
    tasks += [(k, p, 3) for k, p, _ in sweep_tasks("protomodular", config)]
    for c, b in (("FinSet", 2), ("FinAb", 4), ("FinGrp", 4)):
        if config.wants(c):
            tasks.append(("completion_laws", {"category": c, "bound": b}, 4))
    if config.wants("Norm") or config.wants("XMod"):
        tasks.append(("norm_xmod", {"bound": (2, 4)}, 5))
    for c, b in (("FinSet", 2), ("FinAb", 4), ("FinGrp", 4)):
        if config.wants(c):
            tasks.append(("completion_sweeps", {"category": c, "bound": b}, 6))
    for name in TORSION_BOUNDS:
        if config.wants(torsion.instance(name).ambient):
            tasks.append(("torsion_suite", {"instance": name}, 7))
    for name in TORSION_BOUNDS:
        if config.wants(torsion.instance(name).ambient):
            tasks.append(("semi_left_exact", {"instance": name}, 8))
    if config.wants("FinAb"):
        tasks.append(("stability", {"bound": 16, "rqk_bound": 8}, 9))
        tasks.append(("descent", {"bound": 12}, None))
    for c, b in (("FinGrp", 8), ("FinCRng", 4), ("XMod", (2, 4))):
        if config.wants(c):
            tasks.append(("canonical_invariance", {"category": c, "bound": b}, None))
    return tasks


def _run_one(args):
    config, check, params, criterion = args
    start = time.perf_counter()
    result = CHECKS[check](config, params)
    if criterion is not None:
        result["criterion"] = criterion
    return result, time.perf_counter() - start


def run(tasks, config: RunConfig, command: str):
    """Run ``tasks`` on ``config.jobs`` workers; returns ``(report, elapsed)``.

    ``elapsed`` lists wall-clock seconds per entry and stays out of the
    report so that reports are reproducible.
    """
    args = [(config, check, params, criterion) for check, params, criterion in tasks]
    if config.jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_run_one, args))
        # results come back in submission order regardless of completion order
    else:
        results = [_run_one(a) for a in args]
    entries = [r for r, _ in results]
    report = {
        "schema": SCHEMA,
        "command": command,
        "config": config.to_data(),
        "entries": entries,
        "summary": {"entries": len(entries), "passed": sum(e["pass"] for e in entries),
                    "ok": all(e["pass"] for e in entries)},
    }
    return report, [t for _, t in results]


def to_json(report) -> str:
    return json.dumps(_plain(report), sort_keys=True, indent=2) + "\n"


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(_plain(v) for v in x)
    if hasattr(x, "value") and isinstance(getattr(x, "value"), str):
        return x.value
    return x


def _label(e) -> str:
    who = e.get("category") or e.get("instance") or ""
    bound = e.get("bound")
    tail = f" <= {'x'.join(map(str, bound))}" if bound else ""
    return f"{e['check']} {who}{tail}".strip()


def _summary_line(e) -> str:
    if "verdict" in e:
        s = f"{e['verdict']} (expected {e['expected']})"
        if "witness" in e:
            s += f" witness {e['witness']['relation']['pairs']} on {e['witness']['object']}"
        return s
    if e["check"] == "lemma2":
        return f"{e['passed']}/{e['morphisms']} morphisms" + (" (truncated)" if e["truncated"] else "")
    if e["check"] == "norm_xmod":
        return f"image {e['image']} boundary {e['image_boundary']}; {e['xmods']} crossed modules reached"
    return ""


def to_text(report, elapsed=None) -> str:
    lines = []
    for i, e in enumerate(report["entries"]):
        crit = f"[{e['criterion']}] " if "criterion" in e else ""
        t = f" ({elapsed[i]:.1f}s)" if elapsed else ""
        lines.append(f"{'PASS' if e['pass'] else 'FAIL'} {crit}{_label(e)}: {_summary_line(e)}{t}".rstrip())
        if "failure" in e:
            lines.append(f"     failing morphism: {json.dumps(e['failure'], sort_keys=True)}")
    s = report["summary"]
    lines.append(f"{s['passed']}/{s['entries']} checks passed")
    return "\n".join(lines) + "\n"
