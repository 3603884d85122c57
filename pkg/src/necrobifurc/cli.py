"""Command-line front end.

Subcommands: ``steady``, ``modes``, ``bifurcate``, ``limits``, ``verify``.
A YAML config file supplies defaults (nested sections per subcommand);
command-line flags win over the file.  Output is deterministic: identical
config and seed give byte-identical CSVs.

Exit codes: 0 success, 1 verification failure, 2 config error, 3 I/O
error.
"""

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import yaml

from . import __version__
from .bifurcation import (
    FIG4_BETA,
    FIG4_CHI_VALUES,
    FIG4_GINV,
    FIG4_R,
    FIG4_R0,
    FIG4_SIGMA_UL,
    SWEEP_COLS,
    limit_bifurcation_point,
    sweep_rows,
)
from .csvio import write_csv
from .errors import ConfigError, NecrobifurcError
from .modes import mode_limits, mode_profile_rows
from .params import DimensionalParams, ModelParams, nondimensionalize
from .steady import (
    build_steady_state,
    limit_apoptosis,
    limit_pressure,
    profile_rows,
    steady_limits,
)
from .verify import DEFAULT_SUITES, SUITES, VerifyConfig, run_suites

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_CONFIG = 2
EXIT_IO = 3

_PARAM_KEYS = ("beta", "sigma_ul", "r0", "r_outer", "chi", "g_inv",
               "prolif")


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config file {path}: {exc}")
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    return data


def _section(cfg, name):
    sec = cfg.get(name, {})
    if sec is None:
        sec = {}
    if not isinstance(sec, dict):
        raise ConfigError(f"config section {name!r} must be a mapping")
    return sec


def _pick(args, section, key, default):
    val = getattr(args, key, None)
    if val is not None:
        return val
    if key in section:
        return section[key]
    return default


def _dimensional_defaults(cfg):
    """Defaults derived from a ``dimensional_params`` config section, when
    present; the quasi-steadiness of the reduction is checked here."""
    sec = _section(cfg, "dimensional_params")
    if not sec:
        return None
    try:
        dim = DimensionalParams(**{k: float(v) for k, v in sec.items()})
    except TypeError as exc:
        raise ConfigError(f"bad dimensional_params section: {exc}")
    except NecrobifurcError as exc:
        raise ConfigError(f"invalid dimensional parameters: {exc}")
    params, diag = nondimensionalize(dim)
    if diag.quasi_steady_warning:
        print(f"warning: taxis/consumption rate ratio {diag.eps:.3g} "
              "is not small; the quasi-steady nutrient reduction is "
              "questionable", file=sys.stderr)
    return {"beta": params.beta, "sigma_ul": params.sigma_ul,
            "r0": params.R0, "r_outer": params.R, "chi": params.chi,
            "g_inv": params.g_inv, "prolif": params.prolif}


def _build_params(args, cfg):
    sec = _section(cfg, "params")
    vals = {}
    defaults = {"beta": 1.0, "sigma_ul": 0.5, "r0": 0.5, "r_outer": 2.0,
                "chi": 1.0, "g_inv": 1.0, "prolif": 1.0}
    derived = _dimensional_defaults(cfg)
    if derived is not None:
        defaults = derived
    for key in _PARAM_KEYS:
        vals[key] = float(_pick(args, sec, key, defaults[key]))
    try:
        return ModelParams(beta=vals["beta"], sigma_ul=vals["sigma_ul"],
                           R0=vals["r0"], R=vals["r_outer"],
                           chi=vals["chi"], g_inv=vals["g_inv"],
                           prolif=vals["prolif"])
    except NecrobifurcError as exc:
        raise ConfigError(f"invalid parameters: {exc}")


def _parse_float_list(text):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    try:
        return [float(tok) for tok in str(text).split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad numeric list {text!r}: {exc}")


def _parse_int_list(text):
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    try:
        return [int(tok) for tok in str(text).split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad integer list {text!r}: {exc}")


def _check_l_range(ls):
    if any(l < 0 or l > 64 for l in ls):
        raise ConfigError("mode indices must lie in [0, 64]")
    if not ls:
        raise ConfigError("empty mode list")
    return ls


def _add_param_flags(sub, skip_beta=False):
    if not skip_beta:
        sub.add_argument("--beta", type=float)
    sub.add_argument("--sigma-ul", dest="sigma_ul", type=float)
    sub.add_argument("--r0", type=float)
    sub.add_argument("--r-outer", dest="r_outer", type=float)
    sub.add_argument("--chi", type=float)
    sub.add_argument("--g-inv", dest="g_inv", type=float)
    sub.add_argument("--prolif", type=float)


def cmd_steady(args, cfg):
    sec = _section(cfg, "steady")
    p = _build_params(args, cfg)
    n = int(_pick(args, sec, "grid_n", 512))
    if n < 2:
        raise ConfigError("grid_n must be >= 2")
    include_limit = bool(args.limit or sec.get("limit", False))
    out = _pick(args, sec, "out", "steady_profile.csv")
    summary_out = _pick(args, sec, "summary_out", None)
    s = build_steady_state(p)
    cols, rows = profile_rows(s, n, include_limit=include_limit)
    _write(out, cols, rows)
    summary_cols = ["A1", "A2", "C1", "C2", "apoptosis", "denominator"]
    summary_row = [(s.a1, s.a2, s.c1, s.c2, s.apopt, s.denom)]
    if summary_out:
        _write(summary_out, summary_cols, summary_row)
    print(f"steady: wrote {out} ({n} rows); "
          f"A1={s.a1:.12g} A2={s.a2:.12g} C1={s.c1:.12g} "
          f"C2={s.c2:.12g} apoptosis={s.apopt:.12g}")
    return EXIT_OK


def cmd_modes(args, cfg):
    sec = _section(cfg, "modes")
    p = _build_params(args, cfg)
    ls = _check_l_range(_parse_int_list(_pick(args, sec, "l", [0, 2, 5])))
    n = int(_pick(args, sec, "grid_n", 256))
    if n < 2:
        raise ConfigError("grid_n must be >= 2")
    out = _pick(args, sec, "out", "modes.csv")
    s = build_steady_state(p)
    cols, rows = mode_profile_rows(s, ls, n)
    _write(out, cols, rows)
    print(f"modes: wrote {out} ({len(rows)} rows for l={ls})")
    return EXIT_OK


def _sweep_one(task):
    p_dict, ls, chi = task
    p = ModelParams(**p_dict)
    return chi, sweep_rows(p, ls, [chi])[1]


def cmd_bifurcate(args, cfg):
    sec = _section(cfg, "bifurcate")
    if args.fig4 or sec.get("fig4", False):
        p = ModelParams(beta=FIG4_BETA, sigma_ul=FIG4_SIGMA_UL, R0=FIG4_R0,
                        R=FIG4_R, chi=1.0, g_inv=FIG4_GINV, prolif=1.0)
        chis = list(FIG4_CHI_VALUES)
        l_lo, l_hi = 0, 16
    else:
        p = _build_params(args, cfg)
        chis = _parse_float_list(_pick(args, sec, "chi_values", [p.chi]))
        l_lo = int(_pick(args, sec, "l_min", 0))
        l_hi = int(_pick(args, sec, "l_max", 16))
    if not chis:
        raise ConfigError("empty chi list")
    if not (0 <= l_lo <= l_hi <= 64):
        raise ConfigError("need 0 <= l_min <= l_max <= 64")
    out = _pick(args, sec, "out", "bifurcation.csv")
    jobs = _resolve_jobs(args, cfg)
    ls = list(range(l_lo, l_hi + 1))
    if jobs > 1 and len(chis) > 1:
        from dataclasses import asdict

        tasks = [(asdict(p), ls, chi) for chi in sorted(chis)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = dict(pool.map(_sweep_one, tasks))
        rows = []
        for chi in sorted(chunks):
            rows.extend(chunks[chi])
        cols = list(SWEEP_COLS)
    else:
        cols, rows = sweep_rows(p, ls, chis)
    degenerate = sum(1 for row in rows if isinstance(row[2], float)
                     and math.isnan(row[2]))
    _write(out, cols, rows)
    msg = f"bifurcate: wrote {out} ({len(rows)} rows)"
    if degenerate:
        msg += f"; {degenerate} degenerate-denominator rows flagged as nan"
    print(msg)
    return EXIT_OK


def cmd_limits(args, cfg):
    sec = _section(cfg, "limits")
    p = _build_params(args, cfg)
    n = int(_pick(args, sec, "grid_n", 256))
    if n < 2:
        raise ConfigError("grid_n must be >= 2")
    ls = _check_l_range(_parse_int_list(_pick(args, sec, "l",
                                              list(range(2, 9)))))
    if any(l < 2 for l in ls):
        raise ConfigError("limit modes need l >= 2")
    profile_out = _pick(args, sec, "profile_out", "limit_profile.csv")
    points_out = _pick(args, sec, "points_out", "limit_points.csv")
    rs = np.linspace(p.R / n, p.R, n)
    prof_rows = []
    for r in rs:
        lim = steady_limits(p, float(r))
        pv, pd = limit_pressure(p, float(r))
        prof_rows.append((float(r), lim.sigma, lim.sigma_prime, pv, pd))
    _write(profile_out,
           ["r", "sigma_limit", "sigma_prime_limit", "p_limit",
            "p_prime_limit"], prof_rows)
    pt_rows = []
    for l in sorted(set(ls)):
        q, qp = mode_limits(l, p.R, p.R)
        pt_rows.append((l, limit_bifurcation_point(l, p.R, p.g_inv), q, qp))
    _write(points_out,
           ["l", "P_l_limit", "Q_limit_at_R", "Q_prime_limit_at_R"],
           pt_rows)
    print(f"limits: wrote {profile_out} ({len(prof_rows)} rows), "
          f"{points_out} ({len(pt_rows)} rows); "
          f"apoptosis_limit={limit_apoptosis(p.R):.12g}")
    return EXIT_OK


def cmd_verify(args, cfg):
    sec = _section(cfg, "verify")
    p = _build_params(args, cfg)
    names = _pick(args, sec, "suites", None)
    if names is None:
        names = list(DEFAULT_SUITES)
    elif isinstance(names, str):
        names = [tok.strip() for tok in names.split(",") if tok.strip()]
    for name in names:
        if name not in SUITES:
            raise ConfigError(
                f"unknown suite {name!r}; available: {sorted(SUITES)}")
    beta_values = tuple(_parse_float_list(
        _pick(args, sec, "beta_values", [0.1, 1.0, 10.0])))
    vcfg = VerifyConfig(
        params=p,
        seed=int(_pick(args, sec, "seed", 1234)),
        grid_n=int(_pick(args, sec, "grid_n", 4096)),
        draws=int(_pick(args, sec, "draws", 20)),
        property_draws=int(_pick(args, sec, "property_draws", 200)),
        beta_values=beta_values,
        l_fix=int(_pick(args, sec, "l", 2)),
        l_max=int(_pick(args, sec, "l_max", 16)),
        expansion_eps=tuple(_parse_float_list(
            _pick(args, sec, "expansion_eps", [0.02, 0.01]))),
        expansion_grid=tuple(_parse_int_list(
            _pick(args, sec, "expansion_grid", [512, 256]))),
        self_test_negative=bool(args.self_test_negative
                                or sec.get("self_test_negative", False)),
    )
    results = run_suites(names, vcfg)
    for res in results:
        print(res.summary())
        for f in res.failures[:10]:
            print(f"    {f}")
    report = _pick(args, sec, "report", None)
    if report:
        payload = [{
            "suite": r.name, "passed": r.passed, "n_checks": r.n_checks,
            "failures": r.failures, "seconds": round(r.seconds, 3),
        } for r in results]
        _write_text(report, json.dumps(payload, indent=2) + "\n")
    oracle_csv = _pick(args, sec, "oracle_csv", None)
    if oracle_csv:
        entries = []
        for r in results:
            entries.extend(r.oracle_entries)
        _write(oracle_csv,
               ["quantity", "grid_n", "max_rel_err", "conv_order"],
               [(q, n, e, o if o is not None else math.nan)
                for (q, n, e, o) in entries])
    ok = all(r.passed for r in results)
    print("verify: ALL PASS" if ok else "verify: FAILURES PRESENT")
    return EXIT_OK if ok else EXIT_VERIFY_FAIL


def _resolve_jobs(args, cfg):
    if getattr(args, "jobs", None) is not None:
        return max(1, int(args.jobs))
    env = os.environ.get("NECROBIFURC_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"bad NECROBIFURC_JOBS value {env!r}")
    val = cfg.get("jobs", 1)
    return max(1, int(val))


def _write(path, cols, rows):
    try:
        write_csv(path, cols, rows)
    except OSError as exc:
        raise _IOFailure(f"cannot write {path}: {exc}")


def _write_text(path, text):
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise _IOFailure(f"cannot write {path}: {exc}")


class _IOFailure(Exception):
    pass


def build_parser():
    parser = argparse.ArgumentParser(
        prog="necrobifurc",
        description="Steady states, perturbation modes and bifurcation "
                    "points of the necrotic-core tumor model")
    parser.add_argument("--version", action="version",
                        version=f"necrobifurc {__version__}")
    parser.add_argument("--config", help="YAML config file; flags override")
    parser.add_argument("--jobs", type=int,
                        help="sweep parallelism (default: NECROBIFURC_JOBS "
                             "or 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("steady", help="radial steady-state profiles")
    _add_param_flags(sp)
    sp.add_argument("--grid-n", dest="grid_n", type=int)
    sp.add_argument("--limit", action="store_true", default=None,
                    help="also emit the strong-supply, vanishing-core "
                         "limit columns")
    sp.add_argument("--out")
    sp.add_argument("--summary-out", dest="summary_out")
    sp.set_defaults(fn=cmd_steady)

    sp = sub.add_parser("modes", help="perturbation-mode profiles")
    _add_param_flags(sp)
    sp.add_argument("--l", help="comma-separated mode indices")
    sp.add_argument("--grid-n", dest="grid_n", type=int)
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_modes)

    sp = sub.add_parser("bifurcate",
                        help="bifurcation points over (l, chi) grids")
    _add_param_flags(sp)
    sp.add_argument("--l-min", dest="l_min", type=int)
    sp.add_argument("--l-max", dest="l_max", type=int)
    sp.add_argument("--chi-values", dest="chi_values",
                    help="comma-separated taxis values")
    sp.add_argument("--fig4", action="store_true", default=None,
                    help="preset: beta=1e4, R0=1, chi in {1,10,50,100} "
                         "with the recorded (R, g_inv)")
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_bifurcate)

    sp = sub.add_parser("limits",
                        help="strong-supply, vanishing-core limit curves")
    _add_param_flags(sp)
    sp.add_argument("--l", help="comma-separated mode indices (l >= 2)")
    sp.add_argument("--grid-n", dest="grid_n", type=int)
    sp.add_argument("--profile-out", dest="profile_out")
    sp.add_argument("--points-out", dest="points_out")
    sp.set_defaults(fn=cmd_limits)

    sp = sub.add_parser("verify", help="run the verification suites")
    _add_param_flags(sp, skip_beta=True)
    sp.add_argument("--beta", dest="beta_values",
                    help="comma-separated beta values for the lemma suites")
    sp.add_argument("--suite", dest="suites",
                    help="comma-separated suite names "
                         f"(default: {','.join(DEFAULT_SUITES)})")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--grid-n", dest="grid_n", type=int)
    sp.add_argument("--draws", type=int)
    sp.add_argument("--property-draws", dest="property_draws", type=int)
    sp.add_argument("--l", type=int, help="fixed mode for lemma 4.2 and "
                                          "the 2-D check")
    sp.add_argument("--l-max", dest="l_max", type=int)
    sp.add_argument("--expansion-eps", dest="expansion_eps")
    sp.add_argument("--expansion-grid", dest="expansion_grid")
    sp.add_argument("--report", help="write a JSON report here")
    sp.add_argument("--oracle-csv", dest="oracle_csv",
                    help="write oracle agreement rows here")
    sp.add_argument("--self-test-negative", dest="self_test_negative",
                    action="store_true", default=None,
                    help="flip one tolerance to prove the harness can fail")
    sp.set_defaults(fn=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args.config)
        return args.fn(args, cfg)
    except (ConfigError, NecrobifurcError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
