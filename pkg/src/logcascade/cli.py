"""Unified command-line entry point and result serialization.

Subcommands: alpha, birkhoff, lemma, probe, sim, run.  All tabular output is
CSV (mandatory headers, '.' decimal point, repr-exact floats); structured
reports are JSON with sorted keys.  Artifacts are written atomically and a
`run` invocation emits a manifest with content hashes so reruns can be
compared byte for byte.  Every random quantity derives from the single
--seed through named labels, so identical configs reproduce identical files.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import tempfile
import time
from fractions import Fraction

from . import __version__, birkhoff, cascade, essval, lemma_lab
from .contfrac import (
    PartialQuotientSeq,
    check_conditions,
    convergents,
    gauss_digit_stats,
    gauss_prediction,
    levy_estimate,
)
from .fixedpoint import DEFAULT_BITS
from .observable import SingularObservable, make_paper_phi, make_symmetric_phi


class ConfigError(ValueError):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(message)


# ---------------------------------------------------------------------------
# atomic artifact writing


def _atomic_write(path: str, data: str) -> dict:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-artifact-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    blob = data.encode()
    return {"path": path, "sha256": hashlib.sha256(blob).hexdigest(),
            "bytes": len(blob)}


def _fmt_cell(v) -> str:
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ValueError("non-finite value refused in CSV output")
        return repr(v)
    return str(v)


def write_csv(path: str, header: list[str], rows) -> dict:
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValueError("CSV row width does not match the header")
        lines.append(",".join(_fmt_cell(v) for v in row))
    body = "\n".join(lines) + "\n"
    if path == "-":
        sys.stdout.write(body)
        return {"path": "-", "sha256": hashlib.sha256(body.encode()).hexdigest(),
                "bytes": len(body)}
    return _atomic_write(path, body)


def write_json(path: str, payload) -> dict:
    body = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if path == "-":
        sys.stdout.write(body)
        return {"path": "-", "sha256": hashlib.sha256(body.encode()).hexdigest(),
                "bytes": len(body)}
    return _atomic_write(path, body)


# ---------------------------------------------------------------------------
# input parsing


def parse_quotients(spec: str) -> tuple:
    """'1,100:repeat' -> periodic pattern; '1,2,3' -> explicit list."""
    spec = spec.strip()
    if spec.endswith(":repeat"):
        body = spec[: -len(":repeat")]
        return ("periodic", [int(t) for t in body.split(",") if t])
    return ("explicit", [int(t) for t in spec.split(",") if t])


def make_table(quotients: str = "1,100:repeat", depth: int = 8,
               precision_bits: int = DEFAULT_BITS, field: str = "alpha"):
    kind, quots = parse_quotients(quotients)
    if any(a < 1 for a in quots):
        bad = next(i for i, a in enumerate(quots) if a < 1)
        raise ConfigError(f"{field}.quotients[{bad}]",
                          "partial quotients must be positive integers")
    if depth < 1:
        raise ConfigError(f"{field}.depth", "depth must be >= 1")
    if precision_bits < 192:
        raise ConfigError("precision_bits", "W must be at least 192")
    if kind == "periodic":
        seq = PartialQuotientSeq.from_pattern(quots, depth)
    else:
        seq = PartialQuotientSeq.from_list(quots[:depth])
    return convergents(seq, precision_bits)


def load_alpha(path_or_none, precision_bits: int, depth: int = 8):
    if path_or_none is None:
        return make_table(depth=depth, precision_bits=precision_bits)
    with open(path_or_none, encoding="utf-8") as fh:
        d = json.load(fh)
    return make_table(d.get("quotients", "1,100:repeat"),
                      int(d.get("depth", depth)), precision_bits)


def load_phi(path_or_name) -> SingularObservable:
    if path_or_name in (None, "paper"):
        return make_paper_phi()
    if path_or_name == "symmetric":
        return make_symmetric_phi()
    if isinstance(path_or_name, dict):
        return SingularObservable.from_descriptor(path_or_name)
    with open(path_or_name, encoding="utf-8") as fh:
        return SingularObservable.from_descriptor(json.load(fh))


def _parse_interval(spec: str) -> tuple[float, float]:
    lo, _, hi = spec.partition(":")
    a, b = float(lo), float(hi)
    if not 0.0 <= a < b <= 1.0:
        raise ConfigError("window", "expected lo:hi inside [0, 1]")
    return a, b


def _levels(spec) -> list[int]:
    if isinstance(spec, list):
        return [int(v) for v in spec]
    return [int(t) for t in str(spec).split(",") if t]


# ---------------------------------------------------------------------------
# stage implementations (shared by subcommands and `run`)


def stage_alpha(args: dict, out: list):
    table = make_table(args.get("quotients", "1,100:repeat"),
                       int(args.get("depth", 8)),
                       int(args.get("precision_bits", DEFAULT_BITS)))
    sub = args.get("subsequence")
    profile = check_conditions(table, _levels(sub) if sub else None)
    payload = {
        "quotients": list(table.quotients.quotients),
        "convergents": [{"i": i, "p": str(table.p[i]), "q": str(table.q[i])}
                        for i in range(table.depth + 1)],
        "h_set": list(profile.h_set),
        "series": list(profile.series_partial_sums),
        "levy": [{"n": n, "value": v} for n, v in profile.levy_sequence],
        "bounded_type": profile.bounded_type,
        "liouville_score": profile.liouville_score,
        "max_quotient": profile.max_quotient,
        "product_bounds_ok": profile.product_bounds_ok,
        "density_liminf": profile.density_liminf,
        "subsequence_series": list(profile.subsequence_partial_sums),
        "invariants": table.verify_invariants(),
    }
    if args.get("json"):
        out.append(write_json(args["json"], payload))
    return payload


def stage_gauss(args: dict, out: list):
    stats = gauss_digit_stats(int(args.get("ensemble", 2000)),
                              int(args.get("digits", 50)),
                              int(args.get("seed", 7)))
    rows = [(k, f, p) for k, f, p in stats.rows()]
    if args.get("csv"):
        out.append(write_csv(args["csv"], ["k", "frequency", "prediction"], rows))
    return {"rows": rows, "total_digits": stats.total_digits}


def stage_levy(args: dict, out: list):
    est = levy_estimate(int(args.get("ensemble", 500)), int(args.get("depth", 60)),
                        int(args.get("seed", 7)))
    payload = {"mean": est.mean, "spread": est.spread, "depth": est.depth,
               "ensemble": est.ensemble,
               "target": math.pi ** 2 / (12 * math.log(2))}
    if args.get("csv"):
        out.append(write_csv(args["csv"], ["sample", "log_q_over_n"],
                             list(enumerate(est.values))))
    if args.get("json"):
        out.append(write_json(args["json"], payload))
    return payload


def stage_birkhoff_sum(args: dict, out: list, table=None):
    table = table or load_alpha(args.get("alpha_file"),
                                int(args.get("precision_bits", DEFAULT_BITS)))
    phi = load_phi(args.get("phi_file", args.get("phi")))
    x = birkhoff.OrbitPoint.from_value(Fraction(str(args.get("x", "0.3"))), table.w)
    n = int(args["level"])
    r = birkhoff.rigid_sum(phi, table, x, n)
    d = birkhoff.derivative_sum(phi, table, x, n)
    payload = {"level": n, "q": str(table.q[n]), "x": x.value,
               "value": r.value, "error_bound": r.error_bound,
               "excluded": r.excluded, "terms": r.terms,
               "derivative": d.value}
    if args.get("json"):
        out.append(write_json(args["json"], payload))
    return payload


def stage_profile(args: dict, out: list, table=None):
    table = table or load_alpha(args.get("alpha_file"),
                                int(args.get("precision_bits", DEFAULT_BITS)))
    phi = load_phi(args.get("phi_file", args.get("phi")))
    n = int(args["level"])
    l = int(args.get("cell", 0))
    grid = int(args.get("grid", 512))
    left, right = lemma_lab.inner_cell_bounds(table, n, l)
    xs = [left + (right - left) * j // (grid - 1) for j in range(grid)]
    values, _, exc = birkhoff.rigid_values(table, n, xs, phi)
    derivs, _, _ = birkhoff.rigid_values(table, n, xs, phi, derivative=True)
    scale = 1.0 / (1 << table.w)
    rows = [(xs[j] * scale, float(values[j]), float(derivs[j]), int(exc[j]))
            for j in range(grid)]
    if args.get("csv"):
        out.append(write_csv(args["csv"], ["x", "value", "derivative", "excluded"],
                             rows))
    return {"level": n, "cell": l, "rows": len(rows)}


def stage_verify(args: dict, out: list, table=None):
    table = table or make_table(precision_bits=int(args.get("precision_bits",
                                                            DEFAULT_BITS)))
    phi = load_phi(args.get("phi"))
    n = int(args["level"])
    cells = args.get("cells")
    if cells is None:
        cells = [int(args.get("cell", 0))]
    reports = [lemma_lab.verify_cell(phi, table, n, int(l), float(args.get("a", 0.0)),
                                     int(args.get("grid", 128))) for l in cells]
    payload = [{
        "level": r.level, "cell": r.cell, "monotone": r.monotone,
        "derivative_min": r.derivative_min, "derivative_max": r.derivative_max,
        "band": [r.band_low, r.band_high],
        "derivative_in_band": r.derivative_in_band,
        "value_at_quarter": r.value_at_quarter,
        "value_at_three_quarters": r.value_at_three_quarters,
        "thresholds_pass": list(r.thresholds_pass),
    } for r in reports]
    if args.get("json"):
        out.append(write_json(args["json"], payload))
    return payload


def stage_levelset(args: dict, out: list, table=None):
    table = table or make_table(precision_bits=int(args.get("precision_bits",
                                                            DEFAULT_BITS)))
    phi = load_phi(args.get("phi"))
    n = int(args["level"])
    fam = lemma_lab.locate_level_set(
        phi, table, n, float(args.get("a", 0.0)), float(args.get("eps", 0.5)),
        str(args.get("mode", "translate")), args.get("cells"))
    mids = fam.midpoints()
    mvals, _, _ = birkhoff.rigid_values(table, n, list(mids.values()), phi)
    scale = 1.0 / (1 << table.w)
    rows = [(l, lo * scale, hi * scale, (hi - lo) * scale, float(mvals[j]))
            for j, (l, (lo, hi)) in enumerate(sorted(fam.cells.items()))]
    if args.get("csv"):
        out.append(write_csv(args["csv"],
                             ["l", "left", "right", "length", "midpoint_value"],
                             rows))
    return fam


def _family_payload(fam) -> dict:
    return {
        "level": fam.level, "q": str(fam.q), "a": fam.a, "eps": fam.eps,
        "mode": fam.mode, "guard_bits": str(fam.guard_bits),
        "monotonicity_failures": fam.monotonicity_failures,
        "empty_cells": fam.empty_cells,
        "cells": {str(l): [str(lo), str(hi)] for l, (lo, hi)
                  in sorted(fam.cells.items())},
    }


def stage_probe_build(args: dict, out: list, table=None):
    table = table or make_table(precision_bits=int(args.get("precision_bits",
                                                            DEFAULT_BITS)))
    phi = load_phi(args.get("phi"))
    levels = _levels(args.get("levels", "3,5"))
    a = float(args.get("a", 0.0))
    eps = float(args.get("eps", 0.9))
    window = args.get("window")
    families = {}
    for n in levels:
        mode = args.get("mode") or ("exact" if table.q[n] <= 4000 else "translate")
        cells = None
        if window:
            lo, hi = _parse_interval(window) if isinstance(window, str) else window
            q = table.q[n]
            cells = list(range(int(lo * q), min(q, int(hi * q) + 1)))
        families[n] = lemma_lab.locate_level_set(phi, table, n, a, eps, mode, cells)
    payload = {
        "w": table.w, "a": a, "eps": eps, "levels": levels,
        "alpha_quotients": list(table.quotients.quotients),
        "window": window,
        "families": {str(n): _family_payload(f) for n, f in families.items()},
    }
    if args.get("json"):
        out.append(write_json(args["json"], payload))
    return table, families, payload


def _families_from_sets(path: str, table):
    with open(path, encoding="utf-8") as fh:
        d = json.load(fh)
    w = int(d["w"])
    levels = [int(n) for n in d["levels"]]
    sets = []
    for n in levels:
        fam = d["families"][str(n)]
        pairs = [(int(lo), int(hi)) for lo, hi in fam["cells"].values()]
        sets.append(essval.IntervalSet.from_pairs(pairs, w, level=n))
    return levels, sets


def stage_holes(args: dict, out: list, table=None):
    table = table or make_table(precision_bits=int(args.get("precision_bits",
                                                            DEFAULT_BITS)))
    levels, sets = _families_from_sets(args["in"], table)
    ledgers = essval.hole_accounting(sets, table, levels)
    scale = 1.0 / (1 << table.w)
    rows = []
    for led in ledgers:
        for h in led.holes:
            rows.append((led.stage, h.left * scale, h.right * scale,
                         h.length_bits * scale, "good" if h.good else "bad"))
    if args.get("csv"):
        out.append(write_csv(args["csv"],
                             ["stage", "hole_left", "hole_right", "length", "class"],
                             rows))
    return ledgers


def stage_coverage(args: dict, out: list, table=None):
    table = table or make_table(precision_bits=int(args.get("precision_bits",
                                                            DEFAULT_BITS)))
    if args.get("in"):
        levels, sets = _families_from_sets(args["in"], table)
    else:
        table, families, _ = stage_probe_build(dict(args, json=None), out, table)
        levels = sorted(families)
        sets = [essval.build_An(families[n]) for n in levels]
    rep = essval.coverage(sets, levels, int(args.get("resolution", 64)))
    rows = [(k + 1, levels[k], rep.level_measures[k], rep.union_measures[k],
             rep.conditional_terms[k]) for k in range(len(levels))]
    if args.get("csv"):
        out.append(write_csv(
            args["csv"],
            ["prefix", "level", "level_measure", "union_measure", "conditional"],
            rows))
    if args.get("json"):
        out.append(write_json(args["json"], {
            "levels": list(rep.levels),
            "union_measures": list(rep.union_measures),
            "conditional_sum": rep.conditional_sum,
            "plain_sum": rep.plain_sum,
            "independence_prediction": rep.independence_prediction,
        }))
    return rep


def stage_witness(args: dict, out: list, table=None):
    table = table or make_table(precision_bits=int(args.get("precision_bits",
                                                            DEFAULT_BITS)))
    phi = load_phi(args.get("phi"))
    lo, hi = _parse_interval(str(args.get("C", "0.1:0.35")))
    c_set = essval.IntervalSet.from_floats([(lo, hi)], table.w)
    rec = essval.witness_search(c_set, float(args.get("a", 0.0)),
                                float(args.get("eps", 0.5)),
                                _levels(args.get("levels", "3,5")), table, phi)
    payload = {
        "C": [lo, hi], "a": rec.a, "eps": rec.eps, "found": rec.found,
        "level": rec.level, "cell": rec.cell,
        "x": rec.x_bits / (1 << table.w) if rec.found else None,
        "birkhoff_value": rec.birkhoff_value,
        "displacement": rec.displacement,
        "displacement_dir": rec.displacement_dir,
        "certified": rec.certified,
        "near_misses": [list(t) for t in rec.near_misses],
    }
    if args.get("json"):
        out.append(write_json(args["json"], payload))
    return rec


def stage_orbit(args: dict, out: list, table=None):
    table = table or make_table(precision_bits=int(args.get("precision_bits",
                                                            DEFAULT_BITS)))
    phi = load_phi(args.get("phi"))
    trace = cascade.iterate(phi, table, Fraction(str(args.get("x0", "0.3"))),
                            float(args.get("y0", 0.0)), int(args.get("steps", 10000)),
                            int(args.get("decimate", 1000)),
                            seed=int(args.get("seed", 0)))
    rows = [(t, x, y, e) for t, x, y, e in trace.samples]
    if args.get("csv"):
        out.append(write_csv(args["csv"], ["step", "x", "y", "err"], rows))
    return trace


def stage_escape(args: dict, out: list, table=None):
    table = table or make_table(precision_bits=int(args.get("precision_bits",
                                                            DEFAULT_BITS)))
    phi = load_phi(args.get("phi"))
    m_grid = [float(t) for t in str(args.get("M", "0.5,1,2,5,20")).split(",") if t]
    rep = cascade.escape_of_mass(phi, table, _levels(args.get("levels", "3,5,7")),
                                 m_grid, int(args.get("samples", 200000)),
                                 int(args.get("seed", 11)))
    rows = [(r.level, r.m_threshold, r.estimate, r.half_width, r.samples)
            for r in rep.rows]
    if args.get("csv"):
        out.append(write_csv(args["csv"],
                             ["level", "M", "estimate", "half_width", "samples"],
                             rows))
    return rep


_STAGES = {
    "alpha": stage_alpha,
    "gauss": stage_gauss,
    "levy": stage_levy,
    "sum": stage_birkhoff_sum,
    "profile": stage_profile,
    "verify": stage_verify,
    "levelset": stage_levelset,
    "build": stage_probe_build,
    "holes": stage_holes,
    "coverage": stage_coverage,
    "witness": stage_witness,
    "orbit": stage_orbit,
    "escape": stage_escape,
}


def run_config(path: str) -> int:
    t0 = time.time()
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": f"config unreadable: {exc}", "field": ""}),
              file=sys.stderr)
        return 2
    stages = cfg.get("stages")
    if not isinstance(stages, list) or not stages:
        print(json.dumps({"error": "stages must be a nonempty list",
                          "field": "stages"}), file=sys.stderr)
        return 2
    out_dir = cfg.get("output_dir", ".")
    seed = int(cfg.get("seed", 0))
    pbits = int(cfg.get("precision_bits", DEFAULT_BITS))
    artifacts: list[dict] = []
    try:
        table = make_table(cfg.get("alpha", {}).get("quotients", "1,100:repeat"),
                           int(cfg.get("alpha", {}).get("depth", 8)), pbits)
        for i, st in enumerate(stages):
            kind = st.get("kind")
            if kind not in _STAGES:
                raise ConfigError(f"stages[{i}].kind", f"unknown stage kind {kind!r}")
            st = dict(st)
            st.setdefault("seed", seed)
            st.setdefault("precision_bits", pbits)
            st.setdefault("phi", cfg.get("observable", "paper"))
            for key in ("json", "csv"):
                if key in st:
                    st[key] = os.path.join(out_dir, st[key])
            if "in" in st:
                st["in"] = os.path.join(out_dir, st["in"])
            fn = _STAGES[kind]
            if kind in ("alpha", "gauss", "levy"):
                fn(st, artifacts)
            else:
                fn(st, artifacts, table)
    except ConfigError as exc:
        print(json.dumps({"error": str(exc), "field": exc.field}), file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError) as exc:
        print(json.dumps({"error": f"{type(exc).__name__}: {exc}", "field": None}),
              file=sys.stderr)
        return 1
    manifest = {
        "config": cfg,
        "artifacts": artifacts,
        "versions": {"logcascade": __version__,
                     "python": sys.version.split()[0]},
        "wall_time_s": time.time() - t0,
    }
    write_json(os.path.join(out_dir, "manifest.json"), manifest)
    return 0


# ---------------------------------------------------------------------------
# argparse wiring


def _add_common(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--precision-bits", type=int, default=DEFAULT_BITS)
    p.add_argument("--threads", type=int, default=1,
                   help="reserved; execution is deterministic single-process")
    p.add_argument("--json", nargs="?", const="-", help="path, or bare for stdout")
    p.add_argument("--csv", nargs="?", const="-", help="path, or bare for stdout")
    p.add_argument("--window")
    p.add_argument("--phi", default="paper")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lab", description="cylindrical-cascade numerics laboratory")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("alpha")
    ss = p.add_subparsers(dest="action", required=True)
    pa = ss.add_parser("analyze")
    pa.add_argument("--quotients", default="1,100:repeat")
    pa.add_argument("--depth", type=int, default=8)
    pa.add_argument("--subsequence")
    _add_common(pa)
    pg = ss.add_parser("gauss")
    pg.add_argument("--ensemble", type=int, default=2000)
    pg.add_argument("--digits", type=int, default=50)
    _add_common(pg)
    pl = ss.add_parser("levy")
    pl.add_argument("--ensemble", type=int, default=500)
    pl.add_argument("--depth", type=int, default=60)
    _add_common(pl)

    p = sub.add_parser("birkhoff")
    ss = p.add_subparsers(dest="action", required=True)
    pb = ss.add_parser("sum")
    pb.add_argument("--alpha-file")
    pb.add_argument("--phi-file")
    pb.add_argument("--level", type=int, required=True)
    pb.add_argument("--x", default="0.3")
    _add_common(pb)
    pp = ss.add_parser("profile")
    pp.add_argument("--alpha-file")
    pp.add_argument("--phi-file")
    pp.add_argument("--level", type=int, required=True)
    pp.add_argument("--cell", type=int, default=0)
    pp.add_argument("--grid", type=int, default=512)
    _add_common(pp)

    p = sub.add_parser("lemma")
    ss = p.add_subparsers(dest="action", required=True)
    pv = ss.add_parser("verify")
    pv.add_argument("--level", type=int, required=True)
    pv.add_argument("--a", type=float, default=0.0)
    pv.add_argument("--grid", type=int, default=128)
    pv.add_argument("--cell", type=int, default=0)
    _add_common(pv)
    pj = ss.add_parser("levelset")
    pj.add_argument("--level", type=int, required=True)
    pj.add_argument("--a", type=float, default=0.0)
    pj.add_argument("--eps", type=float, default=0.5)
    pj.add_argument("--mode", choices=["exact", "translate"], default="translate")
    _add_common(pj)

    p = sub.add_parser("probe")
    ss = p.add_subparsers(dest="action", required=True)
    pb = ss.add_parser("build")
    pb.add_argument("--levels", default="3,5")
    pb.add_argument("--a", type=float, default=0.0)
    pb.add_argument("--eps", type=float, default=0.9)
    pb.add_argument("--mode", choices=["exact", "translate"])
    _add_common(pb)
    ph = ss.add_parser("holes")
    ph.add_argument("--in", dest="infile", required=True)
    _add_common(ph)
    pc = ss.add_parser("coverage")
    pc.add_argument("--levels", default="3,5,7")
    pc.add_argument("--a", type=float, default=0.0)
    pc.add_argument("--eps", type=float, default=0.9)
    pc.add_argument("--in", dest="infile")
    pc.add_argument("--resolution", type=int, default=64)
    _add_common(pc)
    pw = ss.add_parser("witness")
    pw.add_argument("--C", default="0.1:0.35")
    pw.add_argument("--a", type=float, default=0.0)
    pw.add_argument("--eps", type=float, default=0.5)
    pw.add_argument("--levels", default="3,5")
    _add_common(pw)

    p = sub.add_parser("sim")
    ss = p.add_subparsers(dest="action", required=True)
    po = ss.add_parser("orbit")
    po.add_argument("--steps", type=int, default=1000000)
    po.add_argument("--x0", default="0.3")
    po.add_argument("--y0", type=float, default=0.0)
    po.add_argument("--decimate", type=int, default=1000)
    _add_common(po)
    pe = ss.add_parser("escape")
    pe.add_argument("--levels", default="3,5,7")
    pe.add_argument("--M", default="0.5,1,2,5,20")
    pe.add_argument("--samples", type=int, default=200000)
    _add_common(pe)

    pr = sub.add_parser("run")
    pr.add_argument("--config", required=True)
    return ap


_DISPATCH = {
    ("alpha", "analyze"): ("alpha", stage_alpha),
    ("alpha", "gauss"): ("gauss", stage_gauss),
    ("alpha", "levy"): ("levy", stage_levy),
    ("birkhoff", "sum"): ("sum", stage_birkhoff_sum),
    ("birkhoff", "profile"): ("profile", stage_profile),
    ("lemma", "verify"): ("verify", stage_verify),
    ("lemma", "levelset"): ("levelset", stage_levelset),
    ("probe", "build"): ("build", stage_probe_build),
    ("probe", "holes"): ("holes", stage_holes),
    ("probe", "coverage"): ("coverage", stage_coverage),
    ("probe", "witness"): ("witness", stage_witness),
    ("sim", "orbit"): ("orbit", stage_orbit),
    ("sim", "escape"): ("escape", stage_escape),
}


def main(argv=None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    if ns.command == "run":
        return run_config(ns.config)
    args = {k.replace("infile", "in"): v for k, v in vars(ns).items()
            if v is not None and k not in ("command", "action")}
    _, fn = _DISPATCH[(ns.command, ns.action)]
    out: list[dict] = []
    try:
        fn(args, out)
    except ConfigError as exc:
        print(json.dumps({"error": str(exc), "field": exc.field}), file=sys.stderr)
        return 2
    except ValueError as exc:
        print(json.dumps({"error": f"{type(exc).__name__}: {exc}", "field": None}),
              file=sys.stderr)
        return 1
    for art in out:
        if art["path"] != "-":
            print(json.dumps(art))
    return 0


if __name__ == "__main__":
    sys.exit(main())
