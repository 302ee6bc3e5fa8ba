"""Command-line front end.

    beamdecay <certify|table1|simulate|sweep|check> --config PATH [--out DIR]
              [--set key=value ...] [--seed N] [--workers N]

Exit codes: 0 success, 2 bad config, 3 certificate ineligible, 4 golden
mismatch, 5 resource cap, 6 property failure, 7 numerical failure.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import checks, reporting
from .errors import BeamDecayError, CertificateIneligible, DomainError, NumericalError
from .model import NO_DAMPING_OR_SPRING, from_config, validate
from .stability import (LAMBDA_FRACTION, REFERENCE_LAMBDA, REFERENCE_ROWS, REFERENCE_VALUES,
                        beta_bounds_general, bounds_for, certify, decay_envelope, lambda_range, table1,
                        table_deviations, tabulated_certificate)

EXIT_OK, EXIT_CONFIG, EXIT_INELIGIBLE, EXIT_GOLDEN, EXIT_CAP, EXIT_PROPERTY, EXIT_NUMERICAL = 0, 2, 3, 4, 5, 6, 7

SECTION_DEFAULTS = {
    "certify": {"lambda": None, "horizon": 100.0, "n_samples": 201},
    "table1": {"gamma_list": None, "lambda_policy": "reference", "precision": "tabulated"},
    "simulate": {"n_elements": 64, "dt": None, "t_final": 20.0, "beta": 0.25, "gamma_newmark": 0.5,
                 "snapshot_stride": 1, "lambda": None},
    "sweep": {"gamma": [], "ka_left": [0.0], "ka_right": [0.0], "kr_left": [0.0], "kr_right": [0.0],
              "lambda_policy": "auto", "precision": "exact", "simulate": False,
              "max_points": 10_000, "max_points_simulated": 100,
              "n_elements": 32, "dt": 1e-3, "t_final": 10.0, "snapshot_stride": 10},
    "check": {"suite": "all", "n_profiles": 1000, "beta0_scale": 1.0, "beta1_scale": 1.0},
}


class ConfigError(Exception):
    pass


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def load_config(path, overrides, command):
    """Read the JSON config and apply ``key=value`` overrides.

    Dotted keys address nested blocks; a bare key known to the command's
    block lands there, anything else at top level.
    """
    cfg = {}
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    section = dict(SECTION_DEFAULTS[command])
    section.update(cfg.get(command, {}))
    cfg = {**cfg, command: section}
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, raw = item.split("=", 1)
        value = _parse_value(raw)
        if "." in key:
            *parents, leaf = key.split(".")
            node = cfg
            for p in parents:
                node = node.setdefault(p, {})
            node[leaf] = value
        elif key in section:
            section[key] = value
        else:
            cfg[key] = value
    return cfg


def _beam_from(cfg, certifying=False):
    try:
        spec, bc, ic = from_config(cfg)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    report = validate(spec, bc, ic)
    if certifying and spec.gamma == 0 and set(report.violations) <= {NO_DAMPING_OR_SPRING}:
        # an undamped beam is a legal question for `certify`; the answer is "ineligible"
        raise CertificateIneligible("gamma must be positive for an exponential-decay certificate")
    if not report.ok:
        raise ConfigError(f"ValidationReport: {report}")
    return spec, bc, ic, report


def _out_dir(args):
    return os.environ.get("BEAMDECAY_OUT") or args.out or "beamdecay_out"


def _general_beta1(spec, bc):
    b = spec.bounds()
    return beta_bounds_general(b["m1"], b["mu1"], b["r0"], spec.length, bc.ka_left, bc.ka_right).beta1


def cmd_certify(cfg, args, out):
    spec, bc, _, report = _beam_from(cfg, certifying=True)
    sec = cfg["certify"]
    if not report.certificate_eligible:
        raise CertificateIneligible("gamma must be positive for an exponential-decay certificate")
    cert = certify(spec, bc, sec["lambda"])
    gen = _general_beta1(spec, bc)
    row = (spec.gamma, bc.ka_left, bc.ka_right, cert.bounds.beta0, cert.bounds.beta1, cert.lam, cert.M,
           cert.sigma, gen, gen - cert.bounds.beta1, cert.lambda_max, cert.bounds.variant)
    header = reporting.TABLE_CSV_COLUMNS + ("lambda_max", "variant")
    p1 = reporting.write_csv(reporting.unique_path(out, "certificate.csv"), header, [row])
    t = np.linspace(0.0, float(sec["horizon"]), int(sec["n_samples"]))
    env = decay_envelope(cert, 1.0, t)
    p2 = reporting.write_csv(reporting.unique_path(out, "envelope.csv"), ("t", "envelope", "exp_decay"),
                             zip(t, env, np.exp(-cert.sigma * t)))
    print(f"beta0={cert.bounds.beta0:.2f} beta1={cert.bounds.beta1:.2f} ({cert.bounds.variant})")
    print(f"beta1 general formula={gen:.2f} difference={gen - cert.bounds.beta1:.2f}")
    print(f"lambda_max={cert.lambda_max:.4g} lambda={cert.lam:.4g}")
    print(f"M={cert.M:.2f} sigma={cert.sigma:.2f}")
    print(f"E(t) <= {cert.M:.6g} * exp(-{cert.sigma:.6g} t) * E(0)")
    print(f"wrote {p1} and {p2}")
    return EXIT_OK


def cmd_table1(cfg, args, out):
    sec = cfg["table1"]
    rows = REFERENCE_ROWS
    ref = REFERENCE_VALUES
    if sec["gamma_list"] is not None:
        keep = [i for i, r in enumerate(REFERENCE_ROWS) if r[0] in set(map(float, sec["gamma_list"]))]
        rows = [REFERENCE_ROWS[i] for i in keep]
        ref = [REFERENCE_VALUES[i] for i in keep]
    try:
        table = table1(rows, precision=sec["precision"], lambda_policy=sec["lambda_policy"])
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    p1 = reporting.write_csv(reporting.unique_path(out, "table1.csv"), reporting.TABLE_CSV_COLUMNS,
                             reporting.table_rows(table))
    text = reporting.table_text(table)
    p2 = reporting.unique_path(out, "table1.txt")
    p2.write_text(text + "\n", encoding="utf-8")
    print(text)
    print(f"wrote {p1} and {p2}")
    if sec["lambda_policy"] != "reference":
        print("lambda policy is not the reference column: golden check skipped")
        return EXIT_OK
    bad = table_deviations(table, ref)
    if bad:
        for i, name, got, want in bad:
            r = rows[i]
            print(f"MISMATCH gamma={r[0]:g} ka=<{r[1]:g},{r[2]:g}> {name}: got {got:.4f}, expected {want:.2f}")
        return EXIT_GOLDEN
    print(f"golden check: all {len(table) * 4} cells within 0.005")
    return EXIT_OK


def cmd_simulate(cfg, args, out):
    from .pipeline import simulate

    spec, bc, ic, report = _beam_from(cfg)
    sec = cfg["simulate"]
    res = simulate(spec, bc, ic, int(sec["n_elements"]), sec["dt"], float(sec["t_final"]),
                   int(sec["snapshot_stride"]), sec["lambda"], float(sec["beta"]), float(sec["gamma_newmark"]))
    p1 = reporting.write_csv(reporting.unique_path(out, "trajectory.csv"), reporting.TRAJECTORY_COLUMNS,
                             res.trajectory_rows())
    p2 = reporting.write_csv(reporting.unique_path(out, "ledger.csv"), reporting.LEDGER_COLUMNS,
                             res.ledger_rows())
    led = res.ledger
    print(f"steps={res.trajectory.config.n_steps} dt={res.trajectory.config.dt:.6g} snapshots={led.times.size}")
    if not led.E0 > 0:
        print("WARNING ZERO_ENERGY: initial energy is zero; no decay rate measured")
        print(f"wrote {p1} and {p2}")
        return EXIT_OK
    print(f"E(0)={led.E0:.6g} max identity residual={res.max_residual:.3e} "
          f"({res.max_residual / led.E0:.3e} of E(0))")
    damped = spec.gamma > 0 or bc.ka_left > 0 or bc.ka_right > 0
    if damped:
        rise = res.max_energy_increase()
        print(f"dissipativity: max energy rise per snapshot={rise / led.E0:.3e} of E(0)")
    else:
        drift = float(np.max(np.abs(led.E - led.E0)) / led.E0)
        print(f"dissipativity: constant energy, drift={drift:.3e}")
    if res.certificate is not None:
        holds = res.certificate_holds()
        cert = res.certificate
        print(f"certificate M={cert.M:.6g} sigma={cert.sigma:.6g} lambda={cert.lam:.6g}: "
              f"{'holds' if holds else 'VIOLATED'}")
        sw = res.sandwich()
        print(f"sandwich bounds: {'hold' if sw.holds else 'VIOLATED'}")
    else:
        print("certificate: not available (gamma = 0)")
    if damped:
        try:
            print(f"sigma_measured={res.sigma_measured():.6g}")
        except BeamDecayError as exc:
            print(f"sigma_measured unavailable: {exc}")
    print(f"wrote {p1} and {p2}")
    return EXIT_OK


def _sweep_point(args):
    cfg, gamma, kal, kar, krl, krr = args
    from .pipeline import simulate

    point = {**cfg, "gamma": gamma, "ka_left": kal, "ka_right": kar, "kr_left": krl, "kr_right": krr}
    point.pop("mu", None)
    spec, bc, ic = from_config(point)
    sec = cfg["sweep"]
    lam = _sweep_lambda(sec, spec, bc)
    row = {"gamma": gamma, "ka_minus": kal, "ka_plus": kar, "kr_minus": krl, "kr_plus": krr}
    report = validate(spec, bc, ic)
    if not report.certificate_eligible:
        row["status"] = ",".join(report.violations) or "CERTIFICATE_INELIGIBLE"
        return row
    if sec["precision"] == "tabulated":
        if not spec.is_constant:
            raise ConfigError("tabulated precision needs constant coefficients")
        cert = tabulated_certificate(spec.mass.values[0], gamma, spec.rigidity.values[0], spec.length,
                                     kal, kar, lam)
    else:
        cert = certify(spec, bc, lam)
    row.update(beta0=cert.bounds.beta0, beta1=cert.bounds.beta1, **{"lambda": cert.lam}, M=cert.M,
               sigma=cert.sigma, lambda_max=cert.lambda_max, status="ok")
    if sec["simulate"]:
        res = simulate(spec, bc, ic, int(sec["n_elements"]), float(sec["dt"]), float(sec["t_final"]),
                       int(sec["snapshot_stride"]), cert.lam)
        row["sigma_measured"] = res.sigma_measured()
        row["certificate_holds"] = res.certificate_holds()
    return row


def _sweep_lambda(sec, spec, bc):
    policy = sec["lambda_policy"]
    if policy == "auto":
        return None if sec["precision"] != "tabulated" else _auto_lambda(spec, bc)
    if policy == "reference":
        if spec.gamma not in REFERENCE_LAMBDA:
            raise ConfigError(f"no reference lambda for gamma={spec.gamma}")
        return REFERENCE_LAMBDA[spec.gamma]
    return float(policy)


def _auto_lambda(spec, bc):
    b = bounds_for(spec, bc)
    bb = spec.bounds()
    return LAMBDA_FRACTION * lambda_range(b.beta0, spec.gamma, bb["m0"], bb["m1"])[1]


SWEEP_COLUMNS = ("gamma", "ka_minus", "ka_plus", "beta0", "beta1", "lambda", "M", "sigma", "lambda_max",
                 "kr_minus", "kr_plus", "status")


def cmd_sweep(cfg, args, out):
    sec = cfg["sweep"]
    axes = [list(map(float, sec[k])) for k in ("gamma", "ka_left", "ka_right", "kr_left", "kr_right")]
    n_points = int(np.prod([len(a) for a in axes]))
    cap = int(sec["max_points_simulated"] if sec["simulate"] else sec["max_points"])
    if n_points > cap:
        print(f"grid has {n_points} points, cap is {cap}")
        return EXIT_CAP
    if "length" not in cfg:
        raise ConfigError("sweep needs a beam (length, m/r or section)")
    columns = SWEEP_COLUMNS + (("sigma_measured", "certificate_holds") if sec["simulate"] else ())
    jobs = [(cfg, *p) for p in itertools.product(*axes)]
    workers = max(1, int(args.workers or 1))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(j) for j in jobs]
    path = reporting.write_csv(reporting.unique_path(out, "sweep.csv"), columns,
                               [[r.get(c) for c in columns] for r in rows])
    for r in rows:
        if r.get("status") == "ok":
            extra = f" sigma_measured={r['sigma_measured']:.4g}" if "sigma_measured" in r else ""
            print(f"gamma={r['gamma']:g} ka=<{r['ka_minus']:g},{r['ka_plus']:g}> "
                  f"M={r['M']:.2f} sigma={r['sigma']:.2f}{extra}")
        else:
            print(f"gamma={r['gamma']:g} ka=<{r['ka_minus']:g},{r['ka_plus']:g}> skipped: {r['status']}")
    print(f"wrote {path} ({len(rows)} points)")
    return EXIT_OK


def cmd_check(cfg, args, out):
    sec = cfg["check"]
    names = checks.SUITES if sec["suite"] == "all" else tuple(str(sec["suite"]).split(","))
    unknown = set(names) - set(checks.SUITES)
    if unknown:
        raise ConfigError(f"unknown suite(s): {', '.join(sorted(unknown))}")
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 42))
    results = checks.run_suites(names, seed=seed, n_profiles=int(sec["n_profiles"]),
                                beta0_scale=float(sec["beta0_scale"]), beta1_scale=float(sec["beta1_scale"]))
    code = EXIT_OK
    for res in results:
        print(f"{res.name}: {res.passed}/{res.total} passed")
        if not res.ok:
            code = EXIT_PROPERTY
            ce = res.counterexample
            path = reporting.write_csv(reporting.unique_path(out, f"counterexample_{res.name}.csv"),
                                       tuple(ce), zip(*ce.values()))
            print(f"  worst violation {res.worst_violation:.6g}; counterexample written to {path}")
    return code


COMMANDS = {"certify": cmd_certify, "table1": cmd_table1, "simulate": cmd_simulate, "sweep": cmd_sweep,
            "check": cmd_check}


def build_parser():
    p = argparse.ArgumentParser(prog="beamdecay", description=__doc__.split("\n\n")[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", help="JSON configuration file")
    p.add_argument("--out", help="output directory (BEAMDECAY_OUT overrides)")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config entry; repeatable")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.config is None and args.command in ("certify", "simulate", "sweep"):
        print(f"{args.command} requires --config", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config, args.overrides, args.command)
        return COMMANDS[args.command](cfg, args, _out_dir(args))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CertificateIneligible as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INELIGIBLE
    except NumericalError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_NUMERICAL
    except BeamDecayError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
