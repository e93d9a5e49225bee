"""Command-line interface: ``sphereminima {config,verify,certify,tables}``.

Exit codes: 0 success, 1 a check failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field, fields
from importlib import resources
from typing import Optional, Sequence

import numpy as np

from . import configurations as cfgs
from .certify import CertificationError, certify_min_stiff, certify_min_strongly_sharp, uniqueness_check
from .designanalysis import (Report, classify_sharpness, design_strength, sampled_emptiness_check,
                             verify_dual_pair)
from .potentials import parse_kernel
from .search import compare_to_witness, minimize

__all__ = ["main", "parse_args", "build_parser", "RunSpec", "load_expectations", "THREADS_ENV"]

THREADS_ENV = "SPHEREMINIMA_THREADS"
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ----------------------------------------------------------------- run specs


@dataclass
class RunSpec:
    """Everything needed to replay a run; serializes to ``key = value`` lines."""

    command: str
    action: Optional[str] = None  # config: list|show|export; tables: table1|table2|table4
    name: Optional[str] = None
    params: dict = field(default_factory=dict)
    kernel: Optional[str] = None
    kernels: list[str] = field(default_factory=list)
    strength: Optional[int] = None
    dual: Optional[str] = None
    m: Optional[int] = None
    empty: Optional[int] = None
    samples: int = 100_000
    tol: float = 1e-9
    strict: bool = False
    confirm_search: bool = False
    convexity_policy: str = "warn"  # certify: warn | ignore | fail when the convexity probe disagrees
    starts: Optional[int] = None
    format: str = "json"
    seed: int = 0
    threads: Optional[int] = None
    output: Optional[str] = None

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None or v == [] or v == {}:
                continue
            if f.name == "params":
                v = ",".join(f"{k}={x}" for k, x in v.items())
            elif f.name == "kernels":
                v = ";".join(v)
            elif isinstance(v, bool):
                v = "true" if v else "false"
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> RunSpec:
        kinds = {f.name: f.type for f in fields(cls)}
        kw = {}
        for n, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, eq, val = (s.strip() for s in line.partition("="))
            key = key.replace("-", "_")
            if not eq or key not in kinds:
                raise UsageError(f"config file line {n}: unrecognized entry {raw.strip()!r}")
            try:
                kw[key] = _parse_field(key, kinds[key], val)
            except ValueError:
                raise UsageError(f"config file line {n}: bad value for {key}: {val!r}") from None
        if "command" not in kw:
            raise UsageError("config file must set 'command'")
        return cls(**kw)

    def to_argv(self) -> list[str]:
        argv = ["--seed", str(self.seed)]
        if self.threads is not None:
            argv += ["--threads", str(self.threads)]
        if self.output:
            argv += ["--output", self.output]
        cmd = self.command
        argv.append(cmd)
        if self.action and cmd in ("config", "tables"):
            argv.append(self.action)
        if self.name and cmd != "tables":
            argv.append(self.name)
        if cmd in ("config", "verify", "certify"):
            for k, v in self.params.items():
                argv += [f"--{k}", str(v)]
        allowed = {"verify": ("strength", "dual", "m", "empty"), "certify": ("kernel", "starts"),
                   "tables": ("starts",)}.get(cmd, ())
        for k in allowed:
            v = getattr(self, k)
            if v is not None:
                argv += [f"--{k}", str(v)]
        if cmd == "tables" and self.kernels:
            argv += ["--kernels", *self.kernels]
        if cmd == "verify":
            argv += ["--tol", repr(self.tol), "--samples", str(self.samples)]
        if cmd == "config":
            argv += ["--format", self.format]
        if cmd == "certify" and self.strict:
            argv.append("--strict")
        if cmd == "certify" and self.confirm_search:
            argv.append("--confirm-search")
        if cmd == "certify":
            argv += ["--convexity-policy", self.convexity_policy]
        return argv


def _parse_field(key: str, kind: str, val: str):
    if key == "params":
        out = {}
        for item in filter(None, (s.strip() for s in val.split(","))):
            k, _, v = item.partition("=")
            out[k.strip()] = int(v)
        return out
    if key == "kernels":
        return [s.strip() for s in val.split(";") if s.strip()]
    if "bool" in kind:
        if val.lower() not in ("true", "false", "1", "0", "yes", "no"):
            raise UsageError(f"{key} must be true or false")
        return val.lower() in ("true", "1", "yes")
    if "int" in kind:
        return int(val)
    if "float" in kind:
        return float(val)
    return val


# -------------------------------------------------------------------- parser


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--N", type=int, help="number of points (regular polygons)")
    p.add_argument("--d", type=int, help="dimension parameter (simplex families, cube, cross-polytope)")


def build_parser() -> argparse.ArgumentParser:
    # global options are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed (default 0)")
    common.add_argument("--output", default=argparse.SUPPRESS, help="write the JSON report to this path")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help=f"worker threads for search (default ${THREADS_ENV} or 1)")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS,
                        help="suppress the stdout summary")
    ap = argparse.ArgumentParser(prog="sphereminima", description=__doc__.splitlines()[0], parents=[common])
    ap.add_argument("--config-file", help="key = value run file; its command replaces the command line's")
    sub = ap.add_subparsers(dest="command")
    add = lambda name, **kw: sub.add_parser(name, parents=[common], **kw)

    pc = add("config", help="list, show or export catalog configurations")
    pc.add_argument("action", choices=["list", "show", "export"])
    pc.add_argument("name", nargs="?")
    _add_params(pc)
    pc.add_argument("--format", choices=["json", "csv"], default="json")

    pv = add("verify", help="design strength and dual-pair checks")
    pv.add_argument("name")
    _add_params(pv)
    pv.add_argument("--strength", type=int, help="expected design strength")
    pv.add_argument("--dual", help="catalog name of the claimed dual (same parameters)")
    pv.add_argument("--m", type=int, help="stiffness order for --dual")
    pv.add_argument("--empty", type=int, metavar="M",
                    help="sampled evidence that no point sees at most M dot products")
    pv.add_argument("--samples", type=int, default=100_000)
    pv.add_argument("--tol", type=float, default=1e-9)

    pz = add("certify", help="certificate for the minimum of a potential")
    pz.add_argument("name")
    _add_params(pz)
    pz.add_argument("--kernel", required=True, help="riesz:s=..[,C=..] | log | gauss:a=.. | poly:c0,c1,..")
    pz.add_argument("--strict", action="store_true", help="assert the convexity hypothesis holds strictly")
    pz.add_argument("--confirm-search", action="store_true", help="compare against multi-start search")
    pz.add_argument("--convexity-policy", choices=["warn", "ignore", "fail"], default="warn",
                    help="what to do when the grid probe finds the assumed derivative not convex")
    pz.add_argument("--starts", type=int)

    pt = add("tables", help="regenerate a table and diff it against stored expectations")
    pt.add_argument("action", choices=["table1", "table2", "table4"])
    pt.add_argument("--kernels", nargs="+", default=None, help="kernel specs for table4")
    pt.add_argument("--starts", type=int)
    return ap


def _spec_from_args(a: argparse.Namespace) -> RunSpec:
    params = {k: v for k, v in (("N", getattr(a, "N", None)), ("d", getattr(a, "d", None))) if v is not None}
    return RunSpec(
        command=a.command, action=getattr(a, "action", None), name=getattr(a, "name", None), params=params,
        kernel=getattr(a, "kernel", None), kernels=getattr(a, "kernels", None) or [],
        strength=getattr(a, "strength", None), dual=getattr(a, "dual", None), m=getattr(a, "m", None),
        empty=getattr(a, "empty", None), samples=getattr(a, "samples", 100_000), tol=getattr(a, "tol", 1e-9),
        strict=getattr(a, "strict", False), confirm_search=getattr(a, "confirm_search", False),
        convexity_policy=getattr(a, "convexity_policy", "warn"),
        starts=getattr(a, "starts", None), format=getattr(a, "format", "json"),
        seed=a.seed if a.seed is not None else 0, threads=a.threads, output=a.output)


# ------------------------------------------------------------------ helpers


def load_expectations(name: str) -> dict:
    return json.loads(resources.files("sphereminima").joinpath("data", name).read_text())


def _threads(spec: RunSpec) -> int:
    if spec.threads is not None:
        n = spec.threads
    else:
        env = os.environ.get(THREADS_ENV, "1")
        try:
            n = int(env)
        except ValueError:
            raise UsageError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    if n < 1:
        raise UsageError("thread count must be >= 1")
    return n


def _build(name: str, params: dict) -> cfgs.Configuration:
    try:
        return cfgs.build(name, **params)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _kernel(text: str):
    try:
        return parse_kernel(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# ------------------------------------------------------------------ commands


def cmd_config(spec: RunSpec, out) -> tuple[int, dict]:
    if spec.action == "list":
        rows = cfgs.catalog_list()
        for r in rows:
            tag = "" if r["buildable"] else "  [metadata only]"
            out(f"{r['name']:<18} {r['sphere']:<8} N={r['N']:<14} {r['description']}{tag}")
        out(f"{sum(r['buildable'] for r in rows)} buildable, {sum(not r['buildable'] for r in rows)} metadata-only")
        return EXIT_OK, {"entries": rows}
    if not spec.name:
        raise UsageError(f"config {spec.action} needs a configuration name")
    c = _build(spec.name, spec.params)
    if spec.action == "show":
        doc = json.loads(cfgs.export(c, "json"))
        doc.pop("points")
        dual = c.meta.dual
        out(f"{c.label}: N={c.N} on S^{c.sphere_dim} in R^{c.ambient_dim}")
        out(f"  strength {c.meta.strength}, stiffness {c.meta.stiffness or '-'}, "
            f"sharpness {c.meta.sharpness or '-'}, dual {dual.name if dual else '-'}")
        return EXIT_OK, doc
    data = cfgs.export(c, spec.format)
    if spec.output:
        with open(spec.output, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data.decode())
    return EXIT_OK, {}


def cmd_verify(spec: RunSpec, out) -> tuple[int, dict]:
    c = _build(spec.name, spec.params)
    rep = Report(c.label, seed=spec.seed)
    k_max = max(12, (spec.strength or 0) + 1, 2 * (spec.m or 0))
    sr = design_strength(c, k_max, spec.tol)
    if spec.strength is not None:
        rep.add("design strength", sr.strength == spec.strength,
                f"verified strength {sr.strength}, expected {spec.strength}", float(sr.strength - spec.strength))
    else:
        rep.add("design strength", True, f"verified strength {sr.strength}")
    if spec.dual:
        if spec.m is None:
            raise UsageError("--dual needs --m")
        rep.extend(verify_dual_pair(c, _build(spec.dual, spec.params), spec.m, spec.tol))
    if spec.empty is not None:
        rep.extend(sampled_emptiness_check(c, spec.empty, spec.samples, spec.seed))
    for ch in rep.checks:
        out(f"[{'PASS' if ch.passed else 'FAIL'}] {ch.name}: {ch.detail}")
    return (EXIT_OK if rep.passed else EXIT_FAIL), rep.to_dict()


def cmd_certify(spec: RunSpec, out) -> tuple[int, dict]:
    if spec.convexity_policy not in ("warn", "ignore", "fail"):
        raise UsageError(f"convexity_policy must be warn, ignore or fail, got {spec.convexity_policy!r}")
    c = _build(spec.name, spec.params)
    f = _kernel(spec.kernel)
    threads = _threads(spec)
    try:
        if c.meta.dual is not None:
            cert = certify_min_stiff(c, f)
        elif classify_sharpness(c).strongly_sharp:
            cert = certify_min_strongly_sharp(c, f)
        else:
            out(f"{c.label} is neither stiff (with a catalog dual) nor strongly sharp; no certificate applies")
            return EXIT_FAIL, {"config": c.label, "kernel": f.spec, "status": "not_applicable"}
        if spec.strict and cert.certified:
            cert = uniqueness_check(cert, c, f, True, starts=spec.starts, seed=spec.seed, threads=threads)
        elif spec.strict:
            out("uniqueness not examined: certificate is not certified")
    except CertificationError as exc:
        out(f"certification failed: {exc}")
        return EXIT_FAIL, {"config": c.label, "kernel": f.spec, "status": "error", "detail": str(exc)}
    doc = cert.to_dict()
    ok = cert.certified
    adv = cert.convexity_advisory
    if adv and not adv["g_derivative_convex_on_grid"] and spec.convexity_policy != "ignore":
        # the probe is advisory: the residual check is what the verdict rests on
        print(f"sphereminima: warning: {cert.hypothesis} fails on a sampling grid"
              + ("" if adv["reliable"] else " (probe unreliable at this order)"), file=sys.stderr)
        if spec.convexity_policy == "fail":
            ok = False
            doc["convexity_policy"] = "fail"
    out(f"{c.label} / {f.spec}: {cert.status}; minimum {cert.certified_value:.15g} "
        f"at {len(cert.witness_points)} witness points (min residual {cert.evidence.min_residual:.2e})")
    if spec.confirm_search:
        res = minimize(c, f, starts=spec.starts, seed=spec.seed, threads=threads, m=cert.m)
        cmp = compare_to_witness(res, cert.witness_points)
        gap = res.global_value - cert.certified_value
        search_ok = cmp.passed and abs(gap) <= 1e-7 and res.global_value >= cert.certified_value - 1e-9
        doc["search"] = {"global_value": res.global_value, "value_gap": gap, "starts": res.starts,
                         "seed": res.seed, "clusters": len(res.global_minima), **cmp.to_dict()}
        out(f"search: {res.starts} starts, best {res.global_value:.15g} (gap {gap:.1e}), "
            f"{len(res.global_minima)} minimizer clusters, Hausdorff to witnesses {cmp.hausdorff:.1e}"
            f" -> {'match' if search_ok else 'MISMATCH'}")
        ok = ok and search_ok
    doc["seed"] = spec.seed
    return (EXIT_OK if ok else EXIT_FAIL), doc


def _table1(spec: RunSpec, out) -> tuple[bool, list]:
    rows, ok = [], True
    for r in load_expectations("table1.json")["rows"]:
        entry = cfgs.catalog()[r["name"]]
        if not entry.buildable:
            out(f"  skip  {r['name']:<22} metadata only (no construction)")
            rows.append({**r, "status": "skipped"})
            continue
        c = cfgs.build(r["name"], **r["params"])
        strength = design_strength(c, r["strength"] + 1).strength
        cls = classify_sharpness(c)
        got = {"N": c.N, "sphere_dim": c.sphere_dim, "strength": strength, "sharpness": cls.label}
        if r["stiffness"]:
            m = r["stiffness"]
            stiff_ok = verify_dual_pair(c, cfgs.build(r["dual"], **r["params"]), m).passed
            got["stiffness"] = m if stiff_ok else None
        else:
            # strongly sharp sets are never stiff; otherwise absence is not checked
            got["stiffness"] = None
        diff = {k: (r[k], v) for k, v in got.items() if r[k] != v}
        ok &= not diff
        out(f"  {'ok  ' if not diff else 'DIFF'}  {c.label:<22} N={c.N:<4} strength {strength}  "
            f"{cls.label or '-':<18} stiff {got['stiffness'] or '-'}" + (f"  diff {diff}" if diff else ""))
        rows.append({**r, "computed": got, "status": "ok" if not diff else "diff"})
    return ok, rows


def _table2(spec: RunSpec, out) -> tuple[bool, list]:
    rows, ok = [], True
    for p in load_expectations("table2.json")["pairs"]:
        a, b = cfgs.build(p["primal"], **p["params"]), cfgs.build(p["dual"], **p["params"])
        fwd, bwd = verify_dual_pair(a, b, p["m"]), verify_dual_pair(b, a, p["m"])
        ok &= fwd.passed and bwd.passed
        out(f"  {'ok  ' if fwd.passed and bwd.passed else 'FAIL'}  {a.label} <-> {b.label} (m={p['m']})")
        rows.append({**p, "forward": fwd.to_dict(), "backward": bwd.to_dict(),
                     "status": "ok" if fwd.passed and bwd.passed else "fail"})
    return ok, rows


def _table4(spec: RunSpec, out) -> tuple[bool, list]:
    kernels = spec.kernels or ["riesz:s=1"]
    fs = [_kernel(k) for k in kernels]
    expected = load_expectations("expected_values.json")["values"]
    threads = _threads(spec)
    rows, ok = [], True
    for r in load_expectations("table4.json")["rows"]:
        if not cfgs.catalog()[r["name"]].buildable:
            out(f"  skip  {r['row']:<20} metadata only (no construction)")
            rows.append({**r, "status": "skipped"})
            continue
        c = cfgs.build(r["name"], **r["params"])
        target = -c.points if r["minima"] == "antipodes" else cfgs.build(r["minima"], **r["params"]).points
        for f in fs:
            if c.meta.dual is not None:
                cert = certify_min_stiff(c, f)
            else:
                cert = certify_min_strongly_sharp(c, f)
            L = cert.spec.L
            shape = "convex" if L % 2 == 0 else "concave"
            res = minimize(c, f, starts=spec.starts, seed=spec.seed, threads=threads, m=cert.m)
            cmp = compare_to_witness(res, target)
            key = f"{c.label}|{f.spec}"
            stored = expected.get(key)
            value_ok = stored is None or abs(cert.certified_value - float(stored["value"])) <= 1e-10
            row_ok = (cert.certified and cmp.passed and (L, shape) == (r["order"], r["shape"]) and value_ok
                      and abs(res.global_value - cert.certified_value) <= 1e-7)
            ok &= row_ok
            out(f"  {'ok  ' if row_ok else 'FAIL'}  {r['row']:<20} {f.spec:<12} f^({L}) {shape:<8} "
                f"min {cert.certified_value:.12g}  {len(res.global_minima)}/{len(target)} minimizers matched"
                + ("" if stored else "  (no stored value)"))
            rows.append({"row": r["row"], "config": c.label, "kernel": f.spec, "assumption": f"f^({L}) {shape}",
                         "certified_value": cert.certified_value,
                         "stored_value": None if stored is None else stored["value"],
                         "search_value": res.global_value, "match": cmp.to_dict(), "status": cert.status,
                         "pass": bool(row_ok)})
    return ok, rows


def cmd_tables(spec: RunSpec, out) -> tuple[int, dict]:
    fn = {"table1": _table1, "table2": _table2, "table4": _table4}[spec.action]
    out(f"{spec.action}:")
    ok, rows = fn(spec, out)
    out(f"{spec.action}: {'all rows match' if ok else 'MISMATCH'}")
    return (EXIT_OK if ok else EXIT_FAIL), {"table": spec.action, "rows": rows, "pass": ok, "seed": spec.seed}


COMMANDS = {"config": cmd_config, "verify": cmd_verify, "certify": cmd_certify, "tables": cmd_tables}


def run(spec: RunSpec, quiet: bool = False) -> int:
    out = (lambda *_: None) if quiet else print
    code, doc = COMMANDS[spec.command](spec, out)
    if spec.output and doc and not (spec.command == "config" and spec.action == "export"):
        with open(spec.output, "w") as fh:
            json.dump(doc, fh, indent=1, default=_json_default)
            fh.write("\n")
    return code


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)


def parse_args(parser: argparse.ArgumentParser, argv: Sequence[str] | None) -> argparse.Namespace:
    """Parse, then fill in the shared flags that may appear before or after the subcommand."""
    args = parser.parse_args(argv)
    for k, default in (("seed", None), ("output", None), ("threads", None), ("quiet", False)):
        if not hasattr(args, k):
            setattr(args, k, default)
    return args


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parse_args(parser, argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.config_file:
            try:
                with open(args.config_file) as fh:
                    spec = RunSpec.from_text(fh.read())
            except OSError as exc:
                raise UsageError(f"cannot read config file: {exc}") from None
            for k in ("seed", "threads", "output"):
                if getattr(args, k) is not None:
                    setattr(spec, k, getattr(args, k))
            if spec.command not in COMMANDS:
                raise UsageError(f"unknown command {spec.command!r} in config file")
        elif args.command is None:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        else:
            spec = _spec_from_args(args)
        return run(spec, args.quiet)
    except UsageError as exc:
        print(f"sphereminima: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
