"""Command-line front end: ``hqmap <subcommand> ...``.

Exit status: 0 when every check passes, 1 when a property check fails (the
report lists which), 2 on input or configuration errors.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import CertificateUnavailableError, HQMapError, InputError, RangeError

RES_MIN, RES_MAX = 64, 16384


@dataclass
class RunConfig:
    subcommand: str
    options: dict = field(default_factory=dict)
    N: int = 1024
    M: int = 1024
    seed: int = 0
    out: str = None
    format: str = "json"

    def validate(self):
        for name in ("N", "M"):
            v = getattr(self, name)
            if v < RES_MIN or v > RES_MAX or v & (v - 1):
                raise InputError(f"{name} must be a power of two in [{RES_MIN}, {RES_MAX}]")
        if self.format not in ("json", "csv"):
            raise InputError("format must be json or csv")
        for key, val in self.options.items():
            if key.startswith("tol") and val is not None and not val > 0:
                raise InputError(f"{key} must be positive")


# -- spec loading -----------------------------------------------------------------

def load_spec(text):
    """A spec from a JSON file path, an inline JSON object or a preset name."""
    from .presets import expand_preset

    if text is None:
        raise InputError("missing spec")
    if os.path.isfile(text):
        with open(text, encoding="utf-8") as fh:
            try:
                spec = json.load(fh)
            except json.JSONDecodeError as exc:
                raise InputError(f"malformed JSON in {text}: {exc}") from exc
    elif text.lstrip().startswith("{"):
        try:
            spec = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"malformed JSON spec: {exc}") from exc
    else:
        spec = expand_preset(text)
    if not isinstance(spec, dict) or "type" not in spec:
        raise InputError("spec must be a JSON object with a 'type'")
    return spec


def _boundary(spec, cfg):
    from .harmonic import boundary_from_spec

    return boundary_from_spec(spec, N=cfg.N, M=cfg.M)


def _clean(obj):
    """Plain JSON types; non-finite floats become null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


# -- subcommands -------------------------------------------------------------------

def _radii(opt):
    from .qc import default_radii

    if opt is None:
        return None
    if "," in opt:
        return np.array([float(v) for v in opt.split(",")])
    return default_radii(int(opt))


def cmd_analyze(cfg):
    from .qc import (convex_qc_criterion, dilatation_field, empirical_lipschitz, heinz_lower_check,
                     jacobian_lower_check, normalization_check)
    from .harmonic import analyze

    o = cfg.options
    b = _boundary(load_spec(o["map"]), cfg)
    hm = analyze(b)
    radii, angles = _radii(o.get("grid_radii")), int(o.get("grid_angles") or 256)
    dil = dilatation_field(hm, radii=radii, angles=angles)
    lip = empirical_lipschitz(hm, K=dil.K)
    rep = {"k_sup": dil.k_sup, "K": dil.K, "J_min": dil.J_min, "qc": dil.is_qc,
           "sense_preserving": dil.sense_preserving, "lipschitz_sup": lip.sup_ratio,
           "lipschitz": lip.to_dict(), "tail_energy": hm.tail_energy,
           "normalization": normalization_check(hm, anchor=o.get("anchor")).to_dict()}
    checks = {"distortion": dil.distortion_ok or not dil.is_qc,
              "lipschitz_route": (not math.isfinite(lip.K)) or lip.sup_ratio <= lip.tangential_bound + 1e-8}
    if o.get("K") is not None:
        checks["K_assert"] = dil.validate_K(o["K"])
    if b.target.is_convex():
        heinz = heinz_lower_check(hm)
        jl = jacobian_lower_check(hm)
        crit = convex_qc_criterion(b, radii=radii, angles=angles)
        rep["heinz"] = heinz.to_dict()
        rep["jacobian_lower"] = jl.to_dict()
        rep["criterion"] = crit.to_dict()
        checks.update(heinz=heinz.passed, jacobian_lower=jl.passed, criterion_consistent=crit.consistent)
    rows = [{"r": r, "phi": p, "k": dil.k[i, j], "J": dil.J[i, j]}
            for i, r in enumerate(dil.radii) for j, p in enumerate(dil.angles)]
    return rep, checks, rows


def cmd_certify(cfg):
    from .bounds import lipschitz_certificate
    from .curves import arc_length_reparametrize
    from .harmonic import analyze
    from .qc import dilatation_field, empirical_lipschitz

    o = cfg.options
    hm = None
    if o.get("map"):
        b = _boundary(load_spec(o["map"]), cfg)
        curve = b.target
        hm = analyze(b)
    elif o.get("curve"):
        curve = arc_length_reparametrize(load_spec(o["curve"]), cfg.M)
    else:
        raise InputError("certify needs --map or --curve")
    K = o.get("K")
    if K is None:
        if hm is None:
            raise InputError("--K is required with --curve")
        K = dilatation_field(hm).K
        if not math.isfinite(K):
            raise CertificateUnavailableError("map is not quasiconformal on the grid (K = inf)")
    cert = lipschitz_certificate(float(K), curve, formula=o.get("formula") or "corrected")
    rep = cert.to_dict()
    checks = {"finite": math.isfinite(cert.L_bound_log10)}
    if hm is not None:
        lip = empirical_lipschitz(hm, K=K)
        rep["empirical_lipschitz"] = lip.sup_ratio
        rep["max_boundary_speed"] = float(np.abs(hm.boundary.derivative).max())
        checks["sound"] = cert.covers(rep["max_boundary_speed"]) and cert.covers(lip.sup_ratio)
    rows = [{"key": k, "value": v} for k, v in sorted(rep.items()) if not isinstance(v, dict)]
    return rep, checks, rows


def cmd_hilbert(cfg):
    from .hilbert import conjugate_identity_check, hilbert_pv, hilbert_spectral, privalov_report
    from .harmonic import analyze
    from .modulus import modulus_of_continuity

    o = cfg.options
    b = _boundary(load_spec(o["map"]), cfg)
    hp, err = hilbert_pv(b.values, return_error=True)
    hs = hilbert_spectral(b.values)
    rep = {"N": b.N, "pv_vs_spectral": float(np.abs(hp - hs).max()), "pv_error_estimate": float(err.max()),
           "resolved": analyze(b).resolved}
    checks = {}
    if rep["resolved"]:
        rep["conjugate_identity"] = conjugate_identity_check(b.values)
        checks["conjugate_identity"] = rep["conjugate_identity"] <= (o.get("tol") or 1e-8)
    step = 2 * np.pi / b.N
    omega = modulus_of_continuity(b.derivative, step, periodic=True)
    pr = privalov_report(b.derivative, omega)
    rep["privalov"] = {"A": pr.A, "B": pr.B, "C": pr.C, "pass": pr.passed}
    checks["privalov"] = pr.passed
    rows = [{"t": t, "pv_re": a.real, "pv_im": a.imag, "spectral_re": c.real, "spectral_im": c.imag}
            for t, a, c in zip(b.angles, hp, hs)]
    return rep, checks, rows


def cmd_jacobian(cfg):
    from .boundary_kernels import boundary_jacobian, jacobian_upper_bound

    o = cfg.options
    b = _boundary(load_spec(o["map"]), cfg)
    tau = None
    if o.get("tau"):
        tau = np.array([float(v) for v in o["tau"].split(",")])
    jr = boundary_jacobian(b, tau)
    ub = jacobian_upper_bound(b, phi=tau, jacobian=jr.J)
    J = np.atleast_1d(jr.J)
    rep = {"J_min": float(J.min()), "J_max": float(J.max()), "remainder_max": jr.max_remainder,
           "bound_min": float(ub.bound.min()), "ratio_max": float(np.max(ub.ratio)), "count": int(J.size)}
    checks = {"below_upper_bound": ub.holds, "positive": bool(np.all(J > 0))}
    rows = [{"tau": t, "J": j, "remainder": r, "bound": u}
            for t, j, r, u in zip(np.atleast_1d(jr.tau), J, np.atleast_1d(jr.remainder), ub.bound)]
    return rep, checks, rows


def cmd_eremenko(cfg):
    from .bounds import eremenko_majorant

    o = cfg.options
    m = eremenko_majorant(o["A"], o["B"], o["q"], o["Q"])
    ratio, tail = m.ratio()
    defect = m.convexity_defect()
    levels = int(o.get("levels") or 40)
    m.extend(levels)
    rep = {"ratio": ratio, "ratio_error": tail, "M": m.M, "convexity_defect": defect,
           "levels": m.levels, "B": m.B, "q": m.q, "Q": m.Q, "tau": m.tau,
           "log_x": [float(v) for v in m.log_breakpoints[: levels + 1]]}
    checks = {"ratio_le_4": ratio <= 4 + tail, "convex": defect <= 0}
    rows = [{"k": k, "log_x": v} for k, v in enumerate(rep["log_x"])]
    return rep, checks, rows


def cmd_presets(cfg):
    from .presets import expand_preset, presets

    name = cfg.options.get("name")
    if name:
        spec = expand_preset(name)
        return {"name": name, "spec": spec}, {}, [{"name": name, "spec": json.dumps(spec, sort_keys=True)}]
    items = presets()
    return {"presets": items}, {}, [{"name": p["name"], "description": p["description"]} for p in items]


COMMANDS = {"analyze": cmd_analyze, "certify": cmd_certify, "hilbert": cmd_hilbert,
            "jacobian": cmd_jacobian, "eremenko": cmd_eremenko, "presets": cmd_presets}


# -- driver --------------------------------------------------------------------------

def _render(cfg, report, rows):
    if cfg.format == "json":
        return json.dumps(_clean(report), sort_keys=True, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    rows = _clean(rows)
    if rows:
        writer = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
        writer.writeheader()
        for r in rows:
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()


def run(cfg):
    """Execute a config; returns (exit status, rendered report text, error message)."""
    np.random.seed(cfg.seed)
    try:
        cfg.validate()
        report, checks, rows = COMMANDS[cfg.subcommand](cfg)
        status = 0 if all(checks.values()) else 1
        report = {"command": cfg.subcommand, "config": {"N": cfg.N, "M": cfg.M, "seed": cfg.seed,
                                                        **{k: v for k, v in cfg.options.items()}},
                  "checks": checks, "failed": sorted(k for k, v in checks.items() if not v),
                  "result": report, "version": __version__}
    except (CertificateUnavailableError, RangeError) as exc:
        status, rows = 1, []
        report = {"command": cfg.subcommand, "error": str(exc), "failed": [type(exc).__name__]}
    except (HQMapError, ValueError, KeyError, OSError) as exc:
        return 2, None, f"error: {exc}"
    return status, _render(cfg, report, rows), None


def build_parser():
    p = argparse.ArgumentParser(prog="hqmap", description="Harmonic quasiconformal map diagnostics.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--N", type=int, default=1024, help="boundary samples (power of two)")
    common.add_argument("--M", type=int, default=1024, help="curve samples (power of two)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    sub = p.add_subparsers(dest="subcommand", required=True)

    a = sub.add_parser("analyze", parents=[common], help="dilatation, normalization, Lipschitz, convex checks")
    a.add_argument("--map", required=True, help="map spec: preset name, JSON file or inline JSON")
    a.add_argument("--grid-radii", help="ring count j (radii 1-2^-j) or comma-separated radii")
    a.add_argument("--grid-angles", type=int)
    a.add_argument("--K", type=float, help="assert the map is K-quasiconformal")
    a.add_argument("--anchor", type=complex, help="normalization anchor point on the target")

    c = sub.add_parser("certify", parents=[common], help="Lipschitz certificate")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--map")
    g.add_argument("--curve")
    c.add_argument("--K", type=float)
    c.add_argument("--formula", choices=("corrected", "literal"), default="corrected")

    h = sub.add_parser("hilbert", parents=[common], help="Hilbert transform of boundary samples")
    h.add_argument("--map", required=True)
    h.add_argument("--tol", type=float, default=1e-8)

    j = sub.add_parser("jacobian", parents=[common], help="boundary Jacobian and its upper bound")
    j.add_argument("--map", required=True)
    j.add_argument("--tau", help="comma-separated angles (default: every grid angle)")

    e = sub.add_parser("eremenko", parents=[common], help="convex majorant for a weight A")
    e.add_argument("--A", required=True, help="const:c | power:c,p | mix:c1,p1;c2,p2")
    e.add_argument("--B", type=float, required=True)
    e.add_argument("--q", type=float, required=True)
    e.add_argument("--Q", type=float, required=True)
    e.add_argument("--levels", type=int, default=40)

    s = sub.add_parser("presets", parents=[common], help="list presets or expand one")
    s.add_argument("name", nargs="?")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    opts = {k: v for k, v in vars(ns).items()
            if k not in ("subcommand", "N", "M", "seed", "out", "format")}
    cfg = RunConfig(ns.subcommand, opts, ns.N, ns.M, ns.seed, ns.out, ns.format)
    status, text, err = run(cfg)
    if err is not None:
        print(err, file=sys.stderr)
        return status
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status

