"""Command line interface.

    vorwave <command> CONFIG [--csv PATH] [--json PATH]
    vorwave oracle-check --family linear --b 1

The JSON report goes to stdout unless ``--json`` (or ``[output] json``) is
given. Exit codes: 0 ok, 2 configuration error, 3 numeric failure,
4 classification mismatch.
"""

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from . import dispersion as D
from . import linear_wave as LW
from . import oracles as O
from . import stream as S
from .config import RunConfig, load_config
from .errors import ConfigurationError, VorwaveError
from .scaling import dimensional_wavelength, head_scale, length_scale, nondimensional_descriptor
from .vorticity import make_spec

SCHEMA_VERSION = "vorwave-report/1"

COLUMNS = {
    "streams": ("s", "branch", "h", "kappa", "r", "layers"),
    "dispersion": ("tau", "sigma", "interval"),
    "roots": ("tau0", "lambda0", "residual", "interval", "condRh", "branch", "s", "r", "layers"),
    "curve": ("s", "tau", "tau_dot_sign"),
    "kernel": ("z", "W"),
    "field": ("X", "Y", "psi"),
}


def fmt(x):
    """Shortest round-trip text for CSV cells."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(x)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return obj


def render_csv(kind, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS[kind])
    for row in rows:
        w.writerow([fmt(row[c]) for c in COLUMNS[kind]])
    return buf.getvalue()


def render_json(report):
    return json.dumps(_jsonable(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


# --------------------------------------------------------------------------
# helpers


class Context:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.tol = cfg.tolerances()
        self.flags = []
        desc = cfg.vorticity_descriptor()
        self.dimensional = None
        if cfg.has("dimensional"):
            Q = cfg.get("dimensional", "Q")
            g = cfg.get("dimensional", "g")
            desc = nondimensional_descriptor(Q, g, desc)
            self.dimensional = {"Q": Q, "g": g, "length_scale": length_scale(Q, g),
                                "head_scale": head_scale(Q, g), "omega": desc}
        self.spec = make_spec(desc)

    def branch(self, default="0+"):
        return S.parse_branch(self.cfg.get("stream", "branch", default))

    def head(self):
        r = self.cfg.get("stream", "r")
        if self.dimensional is not None and self.cfg.has("dimensional", "R"):
            if r is not None:
                raise ConfigurationError("give either [stream] r or [dimensional] R")
            r = self.cfg.get("dimensional", "R") / self.dimensional["head_scale"]
        return r

    def streams(self):
        """Stream solutions selected by [stream] (s, depth or r) on one branch."""
        br = self.branch()
        st = self.cfg.sections.get("stream", {})
        seeds = self.cfg.get("scan", "seeds", 400)
        r = self.head()
        if "s" in st:
            svals = [st["s"]]
        elif "depth" in st:
            svals = S.solve_s_for_depth(self.spec, br, st["depth"], n_seed=seeds, tol=self.tol)
        elif r is not None:
            svals = S.solve_bernoulli_for_s(self.spec, r, br, n_seed=seeds, tol=self.tol)
        else:
            raise ConfigurationError("[stream] needs one of s, depth or r")
        if not svals:
            self.flags.append(f"no-stream-on-branch-{br}")
        out = []
        for s in svals:
            sol = S.build_stream_solution(self.spec, s, br, tol=self.tol)
            self.flags.extend(f for f in sol.flags if f not in self.flags)
            out.append(sol)
        return out


def _stream_summary(sol):
    return {"s": sol.s, "branch": str(sol.branch), "h": sol.h, "kappa": sol.kappa,
            "r": sol.r, "layers": sol.layers, "near_bottom": sol.near_bottom,
            "near_surface": sol.near_surface}


def cmd_critical(ctx):
    cv = S.critical_values(ctx.spec, n_seed=ctx.cfg.get("scan", "seeds", 2000), tol=ctx.tol)
    if not cv.r0_finite:
        ctx.flags.append("r0-infinite-by-extrapolation")
    res = {"s0": cv.s0, "tau_max": cv.tau_max, "s_c": cv.s_c, "r_c": cv.r_c, "r0": cv.r0,
           "r0_finite": cv.r0_finite}
    return res, None


def cmd_scan_streams(ctx):
    r = ctx.head()
    if r is None:
        raise ConfigurationError("scan-streams needs [stream] r (or [dimensional] R)")
    j_max = ctx.cfg.get("scan", "j_max", 2)
    seeds = ctx.cfg.get("scan", "seeds", 400)
    rows = []
    for j in range(j_max + 1):
        for sign in (1, -1):
            br = S.Branch(j, sign)
            for s in S.solve_bernoulli_for_s(ctx.spec, r, br, n_seed=seeds, tol=ctx.tol):
                cat = S.depth_sequences(ctx.spec, s, j, ctx.tol)
                if cat.coincident and j % 2 == 1:
                    if "coincident-odd-even-depths" not in ctx.flags:
                        ctx.flags.append("coincident-odd-even-depths")
                    continue
                sol = S.build_stream_solution(ctx.spec, s, br, tol=ctx.tol)
                rows.append({"s": sol.s, "branch": str(br), "h": sol.h, "kappa": sol.kappa,
                             "r": sol.r, "layers": sol.layers})
    return {"r": r, "count": len(rows), "streams": rows}, ("streams", rows)


def _tau_grid(ctx, sol):
    sc = ctx.cfg.sections.get("scan", {})
    lo = sc.get("tau_min", 0.0)
    hi = sc.get("tau_max", 50.0 / sol.h)
    return np.linspace(lo, hi, sc.get("n_tau", 201))


def cmd_dispersion(ctx):
    rows, streams = [], []
    for sol in ctx.streams():
        poles = D.dirichlet_eigenvalues(sol, ctx.tol)
        samples = D.sample_sigma(sol, _tau_grid(ctx, sol), poles, ctx.tol)
        rows.extend({"tau": t, "sigma": v, "interval": i} for t, v, i in samples)
        streams.append({**_stream_summary(sol), "poles": poles})
    return {"streams": streams}, ("dispersion", rows)


def _roots_for(ctx, sol):
    prof = D.find_roots(sol, ctx.tol)
    ctx.flags.extend(f for f in prof.flags if f not in ctx.flags)
    res = LW.harmonic_resonances(prof)
    if res:
        ctx.flags.append("harmonic-resonance")
    return prof


def cmd_roots(ctx):
    rows, streams = [], []
    for sol in ctx.streams():
        prof = _roots_for(ctx, sol)
        info = {**_stream_summary(sol), "poles": prof.poles, "condRh": prof.condRh,
                "sigma0": prof.sigma0, "predicted": prof.predicted, "found": len(prof.roots)}
        for rt in prof.roots:
            row = {"tau0": rt.tau0, "lambda0": rt.lambda0, "residual": rt.residual,
                   "interval": rt.interval, "condRh": prof.condRh, "branch": str(sol.branch),
                   "s": sol.s, "r": sol.r, "layers": sol.layers}
            if ctx.dimensional is not None:
                row["lambda_dimensional"] = dimensional_wavelength(
                    ctx.dimensional["Q"], ctx.dimensional["g"], rt.lambda0)
            rows.append(row)
        streams.append(info)
    return {"streams": streams, "roots": rows}, ("roots", rows)


def _pick_root(ctx, section):
    sols = ctx.streams()
    if not sols:
        raise ConfigurationError("no stream solution matches [stream]")
    sol = sols[0]
    prof = _roots_for(ctx, sol)
    k = ctx.cfg.get(section, "root", 0)
    if not prof.roots:
        raise ConfigurationError("the selected stream has no dispersion roots")
    if not 0 <= k < len(prof.roots):
        raise ConfigurationError(f"[{section}] root must be in 0..{len(prof.roots) - 1}")
    return sol, prof.roots[k]


def cmd_kernel(ctx):
    sol, rt = _pick_root(ctx, "kernel")
    ker = LW.solve_kernel(sol, rt.tau0, n_samples=ctx.cfg.get("kernel", "n", 257), tol=ctx.tol)
    rows = [{"z": z, "W": w} for z, w in zip(ker.z, ker.W)]
    res = {**_stream_summary(sol), "tau0": rt.tau0, "lambda0": rt.lambda0,
           "Wz_h": ker.Wz_h, "sigma0": ker.sigma0, "boundary_residual": ker.residual}
    return res, ("kernel", rows)


def cmd_field(ctx):
    sol, rt = _pick_root(ctx, "field")
    fc = ctx.cfg.sections.get("field", {})
    t = fc.get("t", 1e-3 * sol.h)
    fld = LW.first_order_field(sol, rt.tau0, t, nx=fc.get("nx", 65), nz=fc.get("nz", 33),
                               periods=fc.get("periods", 1.0), tol=ctx.tol)
    rows = [{"X": fld.X[i], "Y": fld.Y[i, j], "psi": fld.Psi[i, j]}
            for i in range(fld.X.size) for j in range(fld.zeta.size)]
    res = {**_stream_summary(sol), "tau0": rt.tau0, "t": t,
           "bernoulli_defect": fld.bernoulli_defect, "symmetry_defect": fld.symmetry_defect,
           "critical_layers": LW.vertical_sign_changes(fld)}
    return res, ("field", rows)


def cmd_branch_tau(ctx):
    sc = ctx.cfg.sections.get("scan", {})
    if "s_min" not in sc or "s_max" not in sc:
        raise ConfigurationError("branch-tau needs [scan] s_min and s_max")
    s_vals = np.linspace(sc["s_min"], sc["s_max"], sc.get("n", 21))
    curve = LW.trace_tau_curve(ctx.spec, ctx.branch("0-"), s_vals, tol=ctx.tol)
    rows = [{"s": s, "tau": t, "tau_dot_sign": d}
            for s, t, d in zip(curve.s, curve.tau, curve.tau_dot_sign)]
    stat = [{"s": p.s, "tau": p.tau, "sigma_dot": p.sigma_dot} for p in curve.stationary]
    if stat:
        ctx.flags.append("transversality-violated")
    return {"branch": str(curve.branch), "stationary_points": stat}, ("curve", rows)


def _oracle_cases(family, b):
    if family == "irrotational":
        return [("irrotational", h) for h in (0.5, 0.9, 1.1, 1.2, 1.5, 3.0)]
    if family == "constant":
        s0 = math.sqrt(2 * b)
        sc = O.constant_s_c(b)
        return [("0+", 0.5 * (s0 + sc)), ("0+", sc + 0.5), ("1+", s0 + 0.3), ("1+", s0 + 2.0)]
    sc = O.linear_s_c(b)
    sb = math.sqrt(b)
    return [("0+", 0.5 * (sb + sc)), ("1+", sb + 0.4), ("0-", 0.5 * (sb + sc)),
            ("0-", sc + 1.0), ("1-", sb + 0.3)]


def run_oracle_check(family, b, tol=None):
    """Compare the pipeline with the closed forms; returns (report, passed)."""
    dev = {"depth": 0.0, "R": 0.0, "eigenvalues": 0.0, "roots": 0.0}
    counts_ok = True
    cases = []
    if family == "irrotational":
        spec = make_spec({"kind": "zero"})
        for _, h in _oracle_cases(family, 0.0):
            sol = S.build_stream_solution(spec, 1.0 / h, S.Branch(0, 1), tol=tol)
            prof = D.find_roots(sol, tol)
            ora = O.irrotational_oracle(h)
            want = [] if ora["rootless"] else [ora["tau0"]]
            got = [r.tau0 for r in prof.roots]
            ok = len(got) == len(want)
            counts_ok &= ok
            if ok:
                for a, w in zip(got, want):
                    dev["roots"] = max(dev["roots"], abs(a - w))
            dev["depth"] = max(dev["depth"], abs(sol.h - h))
            cases.append({"h": h, "roots": got, "expected": want})
    else:
        kind = "constant" if family == "constant" else "linear"
        spec = make_spec({"kind": kind, "b": b})
        for label, s in _oracle_cases(family, b):
            br = S.parse_branch(label)
            sol = S.build_stream_solution(spec, s, br, tol=tol)
            prof = D.find_roots(sol, tol)
            if kind == "constant":
                ora = O.constant_vorticity_oracle(b, s)
                h_want = ora["h0"] if br.j == 0 else ora["h1"]
                R_want = ora["R0"] if br.j == 0 else ora["R1"]
                eig_want = []
                roots_want = ora["roots"](h_want)
            else:
                ora = O.linear_vorticity_oracle(b, s, br.j, br.sign)
                h_want, R_want = ora["h"], ora["R"]
                eig_want = ora["eigenvalues_tau2"]
                roots_want = ora["roots"]
            eig_got = sorted((prof.poles ** 2).tolist(), reverse=True)
            got = [r.tau0 for r in prof.roots]
            ok = len(got) == len(roots_want) and len(eig_got) == len(eig_want)
            counts_ok &= ok
            dev["depth"] = max(dev["depth"], abs(sol.h - h_want))
            dev["R"] = max(dev["R"], abs(sol.r - R_want))
            if ok:
                for a, w in zip(sorted(eig_got), sorted(eig_want)):
                    dev["eigenvalues"] = max(dev["eigenvalues"], abs(a - w))
                for a, w in zip(got, roots_want):
                    dev["roots"] = max(dev["roots"], abs(a - w))
            cases.append({"branch": label, "s": s, "roots": got, "expected": roots_want})
    limits = {"depth": 1e-8, "R": 1e-8, "eigenvalues": 1e-8, "roots": 1e-7}
    passed = counts_ok and all(dev[k] <= limits[k] for k in dev)
    return {"family": family, "b": b, "max_deviation": dev, "limits": limits,
            "counts_match": counts_ok, "cases": cases, "status": "PASS" if passed else "FAIL"}, passed


COMMANDS = {
    "scan-streams": cmd_scan_streams,
    "critical": cmd_critical,
    "dispersion": cmd_dispersion,
    "roots": cmd_roots,
    "kernel": cmd_kernel,
    "field": cmd_field,
    "branch-tau": cmd_branch_tau,
}


def build_parser():
    p = argparse.ArgumentParser(prog="vorwave", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"vorwave {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("config")
        sp.add_argument("--csv", default=None, help="write the CSV table here")
        sp.add_argument("--json", default=None, help="write the JSON report here instead of stdout")
    oc = sub.add_parser("oracle-check")
    oc.add_argument("config", nargs="?", default=None)
    oc.add_argument("--family", choices=("irrotational", "constant", "linear"), required=True)
    oc.add_argument("--b", type=float, default=1.0)
    oc.add_argument("--json", default=None)
    return p


def _write(path, text):
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigurationError(f"cannot write {path!r}: {exc.strerror}") from None


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "oracle-check":
            if args.family != "irrotational" and not args.b > 0:
                raise ConfigurationError("--b must be positive")
            tol = load_config(args.config).tolerances() if args.config else None
            result, passed = run_oracle_check(args.family, args.b, tol)
            report = {"schema": SCHEMA_VERSION, "version": __version__, "command": args.command,
                      "config": {"family": args.family, "b": args.b}, "flags": [],
                      "results": result}
            text = render_json(report)
            if args.json:
                _write(args.json, text)
            else:
                sys.stdout.write(text)
            return 0 if passed else 4
        cfg = load_config(args.config)
        ctx = Context(cfg)
        result, table = COMMANDS[args.command](ctx)
        if ctx.dimensional is not None:
            result["dimensional"] = ctx.dimensional
        report = {"schema": SCHEMA_VERSION, "version": __version__, "command": args.command,
                  "config": cfg.echo(), "flags": sorted(set(ctx.flags)), "results": result}
        csv_path = args.csv or cfg.get("output", "csv")
        json_path = args.json or cfg.get("output", "json")
        if table is not None and csv_path:
            _write(csv_path, render_csv(*table))
        text = render_json(report)
        if json_path:
            _write(json_path, text)
        else:
            sys.stdout.write(text)
        return 0
    except VorwaveError as exc:
        sys.stderr.write(f"vorwave: error: {exc}\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
