"""Command line entry point: batch commands, a content-addressed result store, table emitters.

Usage examples::

    bellcorr vertices 2,2,5
    bellcorr facets 2,4,2
    bellcorr facets 3,2,3 --extended
    bellcorr classes 2,2,5
    bellcorr prbox "s1*s2" --setting 2,2,2
    bellcorr nontrivial "s1*s2+1" --setting 2,2,3
    bellcorr qbound CGLMP --setting 2,2,3 --restarts 50
    bellcorr boost --n 2 --x-len 2 --d 3
    bellcorr reproduce-table 1

Exit codes: 0 success, 2 validation error, 3 budget or extended guard,
4 internal assertion.
"""
from __future__ import annotations

import argparse
import ast
import contextlib
import csv
import fcntl
import hashlib
import io
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

from .errors import BellcorrError, BudgetExceeded, ExtendedRequired
from .geometry.exact import fmt_rational
from .modfunc import FunctionOverSettings, Setting

EXIT_OK, EXIT_VALIDATION, EXIT_GUARD, EXIT_INTERNAL = 0, 2, 3, 4

# Settings whose facet enumeration is expensive enough to need an explicit opt-in.
EXTENDED_SETTINGS = {Setting.of(3, 2, 3)}

TABLE1 = [(2, 2, 2), (2, 2, 3), (2, 2, 5), (3, 2, 2), (3, 2, 3), (2, 3, 2)]
TABLE2 = TABLE1
TABLE3 = [("CHSH", (2, 2, 2)), ("CGLMP", (2, 2, 3)), ("I1", (2, 2, 5)), ("I2", (2, 2, 5)),
          ("I3", (2, 2, 5)), ("CGLMP", (2, 2, 5)), ("C_c=3", (2, 3, 2))]
TABLE4 = [f"B{i}" for i in range(1, 12)] + ["C1_c=4", "C2_c=4", "C3_c=4"]


class ValidationError(BellcorrError, ValueError):
    pass


# ---- function expressions -----------------------------------------------------

_ALLOWED_BINOPS = {ast.Add: lambda a, b: a + b, ast.Sub: lambda a, b: a - b,
                   ast.Mult: lambda a, b: a * b, ast.Mod: lambda a, b: a % b,
                   ast.Pow: lambda a, b: a ** b}


def _compile_expr(text: str, names: Sequence[str]) -> Callable[[Sequence[int]], int]:
    """Integer polynomial expression in the given variable names, evaluated safely."""
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ValidationError(f"cannot parse expression {text!r}") from exc
    lookup = {nm: i for i, nm in enumerate(names)}

    def ev(node, env):
        if isinstance(node, ast.Expression):
            return ev(node.body, env)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return node.value
        if isinstance(node, ast.Name):
            if node.id not in lookup:
                raise ValidationError(f"unknown variable {node.id!r}; expected one of {list(names)}")
            return env[lookup[node.id]]
        if isinstance(node, ast.BinOp) and type(node.op) in _ALLOWED_BINOPS:
            right = ev(node.right, env)
            if isinstance(node.op, ast.Pow) and not 0 <= right <= 64:
                raise ValidationError("exponents must lie in 0..64")
            return _ALLOWED_BINOPS[type(node.op)](ev(node.left, env), right)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand, env)
            return -v if isinstance(node.op, ast.USub) else v
        raise ValidationError(f"unsupported syntax in {text!r}")

    # validate once with zeros so errors surface before evaluation loops
    ev(tree, [0] * len(names))
    return lambda env: ev(tree, env)


def parse_function(spec: str, setting: Setting | None) -> FunctionOverSettings:
    """``@path`` (function text file), a comma-separated table, or an expression in s1..sn."""
    if spec.startswith("@"):
        return FunctionOverSettings.from_text(Path(spec[1:]).read_text())
    if setting is None:
        raise ValidationError("--setting is required unless the function is read from a file")
    if all(part.strip().lstrip("-").isdigit() for part in spec.split(",")) and "," in spec:
        vals = [int(x) for x in spec.split(",")]
        if len(vals) != setting.num_strings:
            raise ValidationError(f"table needs {setting.num_strings} entries, got {len(vals)}")
        return FunctionOverSettings(setting, tuple(vals))
    fn = _compile_expr(spec, [f"s{j + 1}" for j in range(setting.n)])
    return FunctionOverSettings(setting, tuple(fn(s) for s in setting.strings))


def parse_setting(text: str) -> Setting:
    try:
        return Setting.parse(text)
    except (ValueError, TypeError) as exc:
        raise ValidationError(f"invalid setting {text!r}: {exc}") from exc


# ---- result store ---------------------------------------------------------------

@dataclass
class RunConfig:
    command: str
    params: dict
    seed: int = 0
    budget: int = 10 ** 8
    extended: bool = False
    out: str = "bellcorr-results"
    format: str = "text"
    jobs: int = 1

    def semantic(self) -> dict:
        """Fields that determine the result; output location, format and jobs do not."""
        out = {"command": self.command, "params": self.params}
        if self.command in ("qbound", "reproduce-table"):
            out["seed"] = self.seed
        if self.command == "boost":
            out["budget"] = self.budget
        return out

    def key(self) -> str:
        blob = json.dumps(self.semantic(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:20]


def _sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class ResultCatalog:
    """Content-addressed store: ``<root>/<command>/<config hash>/`` with a checksummed manifest."""

    def __init__(self, root):
        self.root = Path(root)

    def entry_dir(self, cfg: RunConfig) -> Path:
        return self.root / cfg.command / cfg.key()

    @contextlib.contextmanager
    def locked(self):
        self.root.mkdir(parents=True, exist_ok=True)
        with open(self.root / ".lock", "a+") as fh:
            fcntl.flock(fh, fcntl.LOCK_EX)
            try:
                yield
            finally:
                fcntl.flock(fh, fcntl.LOCK_UN)

    def lookup(self, cfg: RunConfig) -> dict | None:
        d = self.entry_dir(cfg)
        manifest = d / "manifest.json"
        if not manifest.exists():
            return None
        meta = json.loads(manifest.read_text())
        for name, digest in meta["checksums"].items():
            p = d / name
            if not p.exists() or _sha256_file(p) != digest:
                return None
        return meta

    def store(self, cfg: RunConfig, files: dict[str, str], summary: dict) -> dict:
        d = self.entry_dir(cfg)
        d.mkdir(parents=True, exist_ok=True)
        checksums = {}
        for name, content in files.items():
            p = d / name
            tmp = p.with_suffix(p.suffix + ".tmp")
            tmp.write_text(content)
            os.replace(tmp, p)
            checksums[name] = _sha256_file(p)
        meta = {"config": cfg.semantic(), "summary": summary, "checksums": checksums}
        (d / "manifest.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
        return meta

    def adopt(self, cfg: RunConfig, produced: list[str], summary: dict) -> dict:
        """Register files already written into the entry directory."""
        d = self.entry_dir(cfg)
        meta = {"config": cfg.semantic(), "summary": summary,
                "checksums": {name: _sha256_file(d / name) for name in produced}}
        (d / "manifest.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
        return meta

    def path(self, cfg: RunConfig, name: str) -> Path:
        return self.entry_dir(cfg) / name


# ---- command implementations ------------------------------------------------------
# Each returns (summary dict, {file name: content}) or writes large files itself.

def _run_vertices(cfg: RunConfig, cat: ResultCatalog):
    from .correlator import LhvPolytope
    from .geometry import dump_vrep
    st = parse_setting(cfg.params["setting"])
    lhv = LhvPolytope(st)
    return {"setting": str(st), "vertices": len(lhv)}, {"vertices.txt": dump_vrep(lhv.vrep)}


def _guard_extended(st: Setting, cfg: RunConfig):
    if st in EXTENDED_SETTINGS and not cfg.extended:
        raise ExtendedRequired(f"facet enumeration at {st} is an extended run; pass --extended")


def _facets_for(st: Setting, cfg: RunConfig, cat: ResultCatalog):
    """Facet list for a setting, computed once and cached under the 'facets' command."""
    from .correlator import LhvPolytope
    from .geometry import read_facet_stream, write_facet_stream
    fcfg = RunConfig("facets", {"setting": st.header()}, seed=cfg.seed, budget=cfg.budget,
                     extended=cfg.extended, out=cfg.out)
    meta = cat.lookup(fcfg)
    if meta is not None:
        return read_facet_stream(cat.path(fcfg, "facets.txt"))[1], meta, True
    _guard_extended(st, cfg)
    h = LhvPolytope(st).hrep()
    cat.entry_dir(fcfg).mkdir(parents=True, exist_ok=True)
    digest = write_facet_stream(cat.path(fcfg, "facets.txt"), st.reduced_dim, h.inequalities)
    trivial = st.d * st.num_strings
    summary = {"setting": str(st), "facets": len(h), "nontrivial": len(h) - trivial, "sha256": digest}
    meta = cat.adopt(fcfg, ["facets.txt"], summary)
    return list(h.inequalities), meta, False


def _run_facets(cfg: RunConfig, cat: ResultCatalog):
    st = parse_setting(cfg.params["setting"])
    _, meta, _ = _facets_for(st, cfg, cat)
    return meta["summary"], None


def _run_classes(cfg: RunConfig, cat: ResultCatalog):
    from .geometry import is_facet_defining, read_facet_stream
    from .correlator import LhvPolytope
    from .inequality import bell_from_facet
    from .symmetry import class_counts, orbit_partition
    st = parse_setting(cfg.params["setting"])
    if cfg.params.get("facet_file"):
        _, facets = read_facet_stream(cfg.params["facet_file"])
    else:
        facets, _, _ = _facets_for(st, cfg, cat)
    items = [bell_from_facet(st, b, g) for b, g in facets]
    classes = orbit_partition(items)
    total, nontrivial = class_counts(classes)
    vrep = LhvPolytope(st).vrep
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["class_id", "size", "inequality_ref", "gamma_L", "gamma_P", "facet"])
    reps = []
    for i, c in enumerate(classes):
        rep = c.representative
        reps.append(rep.to_record())
        w.writerow([i, c.size, f"representatives.txt:{i + 1}", fmt_rational(rep.gamma_L),
                    fmt_rational(rep.gamma_P), is_facet_defining(rep.canonical(), vrep)])
    summary = {"setting": str(st), "facets": len(items), "classes": total, "nontrivial_classes": nontrivial,
               "sizes": [c.size for c in classes]}
    return summary, {"classes.csv": buf.getvalue(), "representatives.txt": "\n".join(reps) + "\n"}


def _run_nontrivial(cfg: RunConfig, cat: ResultCatalog):
    from .inequality import InputWeights, nontrivial_from_function
    st = parse_setting(cfg.params["setting"]) if cfg.params.get("setting") else None
    f = parse_function(cfg.params["function"], st)
    st = f.setting
    if cfg.params.get("weights"):
        ws = [Fraction(x) for x in cfg.params["weights"].split(",")]
        if len(ws) != st.num_strings:
            raise ValidationError(f"need {st.num_strings} weights")
        w = InputWeights(st, tuple(ws))
    else:
        w = InputWeights.uniform(st)
    ineq = nontrivial_from_function(f, w)
    summary = {"setting": str(st), "function": list(f.table), "gamma_L": fmt_rational(ineq.gamma_L),
               "gamma_P": fmt_rational(ineq.gamma_P), "nontrivial": ineq.gamma_L < ineq.gamma_P}
    return summary, {"inequality.txt": ineq.to_record() + "\n"}


def _run_prbox(cfg: RunConfig, cat: ResultCatalog):
    from .modfunc import is_bipartite_linear
    from .nonsignaling import gen_pr_box, unique_ns_for_vertex
    st = parse_setting(cfg.params["setting"]) if cfg.params.get("setting") else None
    f = parse_function(cfg.params["function"], st)
    box = gen_pr_box(f)
    res = unique_ns_for_vertex(f, method=cfg.params.get("method", "rank"))
    split = is_bipartite_linear(f) if f.setting.n >= 2 else None
    files = {"distribution.txt": box.to_text()}
    if not res.unique:
        a, b = res.witness
        files["witness_a.txt"] = a.to_text()
        files["witness_b.txt"] = b.to_text()
    summary = {"setting": str(f.setting), "function": list(f.table), "unique": res.unique,
               "bipartite_linear": split is not None, "prime_outcomes": res.prime_outcomes,
               "method": res.method}
    return summary, files


def _run_qbound(cfg: RunConfig, cat: ResultCatalog):
    from .inequality import BellInequality, named_family
    from .quantum import lower_bound_violation
    ref = cfg.params["inequality"]
    if ref.startswith("@"):
        ineq = BellInequality.from_record(Path(ref[1:]).read_text().strip().splitlines()[0])
    else:
        st = parse_setting(cfg.params["setting"]) if cfg.params.get("setting") else None
        ineq = named_family(ref, st)
    rep = lower_bound_violation(ineq, restarts=cfg.params["restarts"], seed=cfg.seed)
    text = rep.to_json()
    summary = {"inequality": rep.inequality, "setting": rep.setting, "value": f"{rep.value:.10f}",
               "gamma_L": fmt_rational(ineq.gamma_L), "violation": rep.violation,
               "maximally_entangled": rep.maximally_entangled}
    return summary, {"report.json": text + "\n"}


def _run_boost(cfg: RunConfig, cat: ResultCatalog):
    from .preproc import achievable_boosted_functions, find_boost_witness
    p = cfg.params
    wm = p.get("wiring_modulus")
    if isinstance(wm, str):
        wm = [int(x) for x in wm.split(",")]
        wm = wm[0] if len(wm) == 1 else wm
    try:
        bset = achievable_boosted_functions(p["n"], p["x_len"], p["d"], wm, p.get("input_modulus"),
                                            budget=cfg.budget)
    except BudgetExceeded as exc:
        part = exc.partial
        summary = {"complete": False, "partial_parties": part.n if part else 0,
                   "partial_achievable": len(part) if part else 0}
        raise BudgetExceeded(f"{exc} (partial: {summary})", partial=part) from exc
    rep = bset.report()
    if p.get("target"):
        names = [f"x{i + 1}" for i in range(p["x_len"])]
        fn = _compile_expr(p["target"], names)
        table = [fn(x) % p["d"] for x in bset.points]
        wit = find_boost_witness(table, p["x_len"], p["d"], p["n"], wm, p.get("input_modulus"),
                                 budget=cfg.budget)
        rep["target"] = {"expression": p["target"], "table": table, "achievable": wit is not None}
        if wit is not None:
            rep["target"]["witness"] = {"parties": wit.n, "coefficients": [list(a) for a in wit.wiring.coefficients],
                                        "moduli": list(wit.wiring.moduli),
                                        "site_maps": [list(g) for g in wit.site_maps], "constant": wit.constant}
    tables = "\n".join(",".join(str(int(v)) for v in row) for row in bset.all_tables()) + "\n"
    return rep, {"boosted.txt": tables, "report.json": json.dumps(rep, indent=2, sort_keys=True) + "\n"}


def _run_table(cfg: RunConfig, cat: ResultCatalog):
    which = cfg.params["table"]
    rows = []
    if which == 1:
        from .correlator import LhvPolytope
        for t in TABLE1:
            st = Setting.of(*t)
            row = {"n": t[0], "c": t[1], "d": t[2], "vertices": len(LhvPolytope(st))}
            if st in EXTENDED_SETTINGS and not cfg.extended:
                row["facets"] = "extended"
            else:
                facets, _, _ = _facets_for(st, cfg, cat)
                row["facets"] = len(facets)
            rows.append(row)
    elif which == 2:
        for t in TABLE2:
            st = Setting.of(*t)
            row = {"n": t[0], "c": t[1], "d": t[2]}
            if st in EXTENDED_SETTINGS and not cfg.extended:
                row["classes"] = "extended"
            else:
                sub = RunConfig("classes", {"setting": st.header()}, seed=cfg.seed, budget=cfg.budget,
                                extended=cfg.extended, out=cfg.out)
                row["classes"] = _cached(sub, cat, _run_classes)["nontrivial_classes"]
            rows.append(row)
    elif which == 3:
        from .inequality import named_family
        for name, t in TABLE3:
            sub = RunConfig("qbound", {"inequality": name, "setting": Setting.of(*t).header(),
                                       "restarts": cfg.params.get("restarts", 50)},
                            seed=cfg.seed, budget=cfg.budget, out=cfg.out)
            s = _cached(sub, cat, _run_qbound)
            rows.append({"n": t[0], "c": t[1], "d": t[2], "inequality": name, "lhv_bound": s["gamma_L"],
                         "quantum_lower_bound": s["value"], "maximally_entangled": s["maximally_entangled"]})
    elif which == 4:
        from .correlator import LhvPolytope
        from .geometry import is_facet_defining
        from .inequality import named_family
        from .symmetry import orbit
        vrep = LhvPolytope(Setting.of(2, 4, 2)).vrep
        seen = []
        for name in TABLE4:
            ineq = named_family(name)
            orb = orbit(ineq)
            distinct = all(not (orb & o) for o in seen)
            seen.append(orb)
            rows.append({"inequality": name, "lhv_bound": fmt_rational(ineq.gamma_L),
                         "algebraic_max": fmt_rational(ineq.gamma_P),
                         "facet": is_facet_defining(ineq.canonical(), vrep),
                         "orbit_size": len(orb), "new_class": distinct})
    else:
        raise ValidationError(f"no table {which}")
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return {"table": which, "rows": rows}, {f"table{which}.csv": buf.getvalue()}


COMMANDS = {
    "vertices": _run_vertices, "facets": _run_facets, "classes": _run_classes,
    "nontrivial": _run_nontrivial, "prbox": _run_prbox, "qbound": _run_qbound,
    "boost": _run_boost, "reproduce-table": _run_table,
}


def _cached(cfg: RunConfig, cat: ResultCatalog, fn) -> dict:
    with cat.locked():
        meta = cat.lookup(cfg)
    if meta is not None:
        return meta["summary"]
    summary, files = fn(cfg, cat)
    if files is not None:
        with cat.locked():
            cat.store(cfg, files, summary)
    return summary


# ---- argument parsing -------------------------------------------------------------

def _global_flags(p: argparse.ArgumentParser, suppress: bool):
    dflt = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--out", default=dflt("bellcorr-results"), help="result store directory")
    p.add_argument("--format", choices=["json", "csv", "text"], default=dflt("text"))
    p.add_argument("--seed", type=int, default=dflt(0))
    p.add_argument("--jobs", type=int, default=dflt(1), help="worker count (computations run in-process)")
    p.add_argument("--extended", action="store_true", default=dflt(False),
                   help="allow extended runs such as (3,2,3) facet enumeration")
    p.add_argument("--budget", type=int, default=dflt(10 ** 8), help="evaluation budget for brute-force searches")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bellcorr", description="Exact workbench for Bell correlator polytopes.")
    _global_flags(ap, suppress=False)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        _global_flags(p, suppress=True)
        return p

    p = add("vertices", "LHV polytope vertices")
    p.add_argument("setting", help="n,c,d or n,c1,...,cn,d")
    p = add("facets", "facet Bell inequalities by double description")
    p.add_argument("setting")
    p = add("classes", "symmetry classes of the facets")
    p.add_argument("setting")
    p.add_argument("--facet-file", help="use an existing facet stream instead of enumerating")
    p = add("nontrivial", "non-trivial inequality from a non-linear function")
    p.add_argument("function", help="expression in s1..sn, comma table, or @file")
    p.add_argument("--setting")
    p.add_argument("--weights", help="comma-separated input weights p(s)")
    p = add("prbox", "generalized PR box and its no-signaling uniqueness")
    p.add_argument("function")
    p.add_argument("--setting")
    p.add_argument("--method", choices=["rank", "lp"], default="rank")
    p = add("qbound", "quantum lower bound by see-saw optimization")
    p.add_argument("inequality", help="catalog name or @inequality-record-file")
    p.add_argument("--setting")
    p.add_argument("--restarts", type=int, default=50)
    p = add("boost", "functions achievable with linear input pre-processing")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--x-len", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--wiring-modulus", help="one modulus or a comma list, one per party")
    p.add_argument("--input-modulus", type=int)
    p.add_argument("--target", help="expression in x1..xL to test for achievability")
    p = add("reproduce-table", "regenerate a results table")
    p.add_argument("table", type=int, choices=[1, 2, 3, 4])
    p.add_argument("--restarts", type=int, default=50)
    return ap


def _params(ns: argparse.Namespace) -> dict:
    c = ns.command
    if c in ("vertices", "facets"):
        return {"setting": parse_setting(ns.setting).header()}
    if c == "classes":
        out = {"setting": parse_setting(ns.setting).header()}
        if ns.facet_file:
            out["facet_file"] = str(Path(ns.facet_file).resolve())
        return out
    if c in ("nontrivial", "prbox"):
        st = parse_setting(ns.setting) if ns.setting else None
        f = parse_function(ns.function, st)
        out = {"function": ",".join(map(str, f.table)), "setting": f.setting.header()}
        if c == "nontrivial" and ns.weights:
            out["weights"] = ",".join(fmt_rational(Fraction(x)) for x in ns.weights.split(","))
        if c == "prbox":
            out["method"] = ns.method
        return out
    if c == "qbound":
        out = {"inequality": ns.inequality, "restarts": ns.restarts}
        if ns.setting:
            out["setting"] = parse_setting(ns.setting).header()
        return out
    if c == "boost":
        out = {"n": ns.n, "x_len": ns.x_len, "d": ns.d}
        if min(ns.n, ns.x_len) < 1 or ns.d < 2:
            raise ValidationError("need n >= 1, x_len >= 1, d >= 2")
        if ns.wiring_modulus:
            out["wiring_modulus"] = ns.wiring_modulus
        if ns.input_modulus:
            out["input_modulus"] = ns.input_modulus
        if ns.target:
            out["target"] = ns.target
        return out
    if c == "reproduce-table":
        out = {"table": ns.table}
        if ns.table == 3:
            out["restarts"] = ns.restarts
        if ns.table in (1, 2):
            out["extended"] = ns.extended
        return out
    raise ValidationError(f"unknown command {c}")


def _emit(summary: dict, fmt: str, stream) -> None:
    if fmt == "json":
        stream.write(json.dumps(summary, indent=2, sort_keys=True, default=str) + "\n")
        return
    rows = summary.get("rows")
    if fmt == "csv":
        w = csv.writer(stream, lineterminator="\n")
        if rows:
            w.writerow(list(rows[0]))
            for r in rows:
                w.writerow(list(r.values()))
        else:
            w.writerow(list(summary))
            w.writerow([json.dumps(v) if isinstance(v, (list, dict)) else v for v in summary.values()])
        return
    if rows:
        keys = list(rows[0])
        stream.write("  ".join(keys) + "\n")
        for r in rows:
            stream.write("  ".join(str(r[k]) for k in keys) + "\n")
        return
    for k, v in summary.items():
        stream.write(f"{k}: {json.dumps(v) if isinstance(v, (list, dict)) else v}\n")


def main(argv: Sequence[str] | None = None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_VALIDATION
    try:
        cfg = RunConfig(ns.command, _params(ns), seed=ns.seed, budget=ns.budget, extended=ns.extended,
                        out=ns.out, format=ns.format, jobs=ns.jobs)
        if cfg.jobs < 1 or cfg.budget < 1:
            raise ValidationError("--jobs and --budget must be positive")
        cat = ResultCatalog(cfg.out)
        summary = _cached(cfg, cat, COMMANDS[cfg.command])
        summary = dict(summary)
        summary["result_dir"] = str(cat.entry_dir(cfg))
        _emit(summary, cfg.format, stdout)
        return EXIT_OK
    except (BudgetExceeded, ExtendedRequired) as exc:
        print(f"bellcorr: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ValidationError, ValueError, KeyError, FileNotFoundError, BellcorrError) as exc:
        print(f"bellcorr: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except AssertionError as exc:
        print(f"bellcorr: internal assertion failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
