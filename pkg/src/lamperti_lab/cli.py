"""Experiment runner.

Subcommands: simulate, acf, ergodic, langevin, rates.  Every command writes
its data files plus manifest.json (full resolved config, library version,
seed, backend, wall time) and config.txt (the same config in the flat
`key = value` grammar, accepted back through --config; explicit flags win
over config values).  Exit codes: 0 success, 2 usage/validation,
3 numerical failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from . import __version__, backend
from .errors import (DomainError, FactorizationError, GridError,
                     QuadratureError, UnsupportedRegimeError)
from .io import (ensemble_manifest, fmt_float, write_ensemble_csv,
                 write_flat_config, write_json, write_table_csv)
from .kernels import HurstParams, lamperti_acf, mixing_rate_bi, mixing_rate_sub
from .lamperti import LampertiMap, forward
from .langevin import (LangevinSpec, QuadratureConfig, langevin_cov,
                       tabulate_lt_acf)
from .ergodics import build_ergodic_report, empirical_acf, fit_decay_rate
from .sampler import (Family, ModelSpec, PathEnsemble, covariance_matrix,
                      factorize, geometric_grid, resolve_threads,
                      sample_ensemble)

# ---------------------------------------------------------------------------
# per-command option tables: name -> (type, default, help); None = required
# ---------------------------------------------------------------------------

_COMMON = {
    "seed": (int, 42, "master seed for counter-based substreams"),
    "threads": (int, 0, "worker threads (0: use LAMPERTI_LAB_THREADS or 1)"),
    "out": (str, "lamperti-lab-out", "output directory"),
}

_OPTIONS = {
    "simulate": {
        "family": (str, "sub", "driver family: sub | bi"),
        "H": (float, None, "Hurst index in (0,1)"),
        "K": (float, 1.0, "bi-fractional K in (0,1]"),
        "alpha": (float, 1.5, "time-change exponent"),
        "n": (int, 2048, "grid points"),
        "M": (int, 500, "trajectories to sample (trajectory.csv holds path 0)"),
        "u_start": (float, 0.0, "latent start time"),
        "u_end": (float, 10.0, "latent end time"),
        "write_ensemble": (bool, False, "also write the full ensemble CSV"),
    },
    "acf": {
        "family": (str, "sub", "driver family: sub | bi"),
        "H": (float, None, "Hurst index in (0,1)"),
        "K": (float, 1.0, "bi-fractional K in (0,1]"),
        "alpha": (float, 1.5, "time-change exponent"),
        "n": (int, 2048, "grid points"),
        "M": (int, 500, "trajectories"),
        "u_end": (float, 10.0, "latent end time (start is 0)"),
        "max_lag": (float, 2.0, "largest latent lag to estimate"),
    },
    "ergodic": {
        "family": (str, "sub", "family: sub | bi"),
        "H": (float, None, "Hurst index in (0,1)"),
        "K": (float, 1.0, "bi-fractional K in (0,1]"),
        "alpha": (float, 3.0, "time-change exponent"),
        "T": (float, 100.0, "trajectory length in latent time"),
        "du": (float, 0.01, "latent step"),
        "M": (int, 500, "ensemble size for the averaged ECF"),
        "k_max": (float, 4.0, "ECF wavenumber range [-k_max, k_max]"),
        "k_points": (int, 41, "ECF grid size"),
    },
    "langevin": {
        "family": (str, "sub", "driver family: sub | bi"),
        "H": (float, None, "Hurst index; sub needs H > 1/2"),
        "K": (float, 1.0, "bi-fractional K; bi needs H*K > 1/2"),
        "alpha": (float, 1.5, "time-change exponent"),
        "c_norm": (float, 1.0, "normalisation constant"),
        "t_max": (float, 8.0, "largest lag to tabulate"),
        "lag_points": (int, 33, "tabulation grid size"),
        "rel_tol": (float, 1e-6, "quadrature relative tolerance"),
        "fit_lo": (float, 2.0, "decay-fit window start"),
        "fit_hi": (float, 8.0, "decay-fit window end"),
        "check_oracle": (bool, False, "verify the alpha=1 collapse oracle"),
    },
    "rates": {
        "H": (float, 0.0, "optional extra row: Hurst index (0 disables)"),
        "K": (float, 1.0, "optional extra row: K"),
        "alpha": (float, 1.0, "optional extra row: alpha"),
    },
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="lamperti-lab",
        description="Simulation and ergodic diagnostics for scaled Lamperti "
                    "transforms of sub- and bi-fractional Brownian motion. "
                    "Desk-scale defaults (n=2048, M=500, seed=42) keep exact "
                    "dense sampling tractable.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd, opts in _OPTIONS.items():
        p = sub.add_parser(cmd, help=f"run the {cmd} experiment")
        p.add_argument("--config", type=str, default=None,
                       help="flat key = value config file; flags win")
        for name, (typ, default, help_) in {**opts, **_COMMON}.items():
            flag = "--" + name.replace("_", "-")
            if typ is bool:
                p.add_argument(flag, dest=name, action="store_true",
                               default=None, help=help_)
            else:
                p.add_argument(flag, dest=name, type=typ, default=None,
                               help=help_ + ("" if default is None
                                             else f" (default {default})"))
    return parser


def _parse_flat_config(path):
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected 'key = value'")
            key, val = (part.strip() for part in line.split("=", 1))
            values[key] = val
    return values


def _coerce(name, typ, raw):
    if typ is bool:
        low = str(raw).strip().lower()
        if low in ("1", "true", "yes"):
            return True
        if low in ("0", "false", "no"):
            return False
        raise DomainError(f"config key {name}: expected a boolean, got {raw!r}")
    try:
        return typ(raw)
    except ValueError as exc:
        raise DomainError(f"config key {name}: {exc}") from None


def _resolve_config(args):
    """Merge defaults < config file < explicit flags; reject unknown keys."""
    table = {**_OPTIONS[args.command], **_COMMON}
    config = {name: spec[1] for name, spec in table.items()}
    if args.config:
        for key, raw in _parse_flat_config(args.config).items():
            if key not in table:
                raise DomainError(f"unknown config key {key!r}")
            config[key] = _coerce(key, table[key][0], raw)
    for name in table:
        val = getattr(args, name)
        if val is not None:
            config[name] = val
    missing = [k for k, v in config.items()
               if v is None and table[k][1] is None]
    if missing:
        raise DomainError("missing required option(s): "
                          + ", ".join("--" + m.replace("_", "-") for m in missing))
    return config


def _params(config):
    return HurstParams(H=config["H"], K=config["K"], alpha=config["alpha"])


def _family_enum(name):
    if name == "sub":
        return Family.SUB_FBM
    if name == "bi":
        return Family.BI_FBM
    raise DomainError(f"family must be 'sub' or 'bi', got {name!r}")


def _driver_lamperti_ensemble(config, threads):
    """Geometric-grid driver ensemble plus its Lamperti-transformed paths."""
    p = _params(config)
    model = ModelSpec(_family_enum(config["family"]), p)
    grid = geometric_grid(p.alpha, config.get("u_start", 0.0),
                          config["u_end"], config["n"])
    cov = covariance_matrix(model, grid, threads=threads)
    factor = factorize(cov)
    ens = sample_ensemble(factor, config["M"], config["seed"],
                          grid=grid, model=model, threads=threads)
    lam = forward(LampertiMap(p.alpha, p.h_eff), grid, ens.paths)
    return grid, ens, lam


def _manifest(command, config, outputs, results, t_start):
    return {
        "command": command,
        "config": config,
        "version": __version__,
        "backend": backend.BACKEND,
        "seed": config["seed"],
        "threads": resolve_threads(config["threads"] or None),
        "outputs": sorted(outputs),
        "results": results,
        "wall_time_ms": round(1000.0 * (time.monotonic() - t_start), 3),
    }


def _finish(command, config, outdir, outputs, results, t_start):
    write_flat_config(os.path.join(outdir, "config.txt"), config)
    manifest = _manifest(command, config, outputs + ["config.txt"],
                         results, t_start)
    write_json(os.path.join(outdir, "manifest.json"), manifest)
    print(f"{command}: wrote {', '.join(sorted(outputs))} and manifest.json "
          f"to {outdir}")
    return 0


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _cmd_simulate(config, outdir, threads, t_start):
    grid, ens, lam = _driver_lamperti_ensemble(config, threads)
    raw0, lam0 = ens.paths[0], lam[0]
    write_table_csv(os.path.join(outdir, "trajectory.csv"),
                    ["u", "raw", "lamperti"], [grid.latent, raw0, lam0])
    outputs = ["trajectory.csv"]
    if config["write_ensemble"]:
        write_ensemble_csv(os.path.join(outdir, "ensemble.csv"), ens)
        write_json(os.path.join(outdir, "ensemble_manifest.json"),
                   ensemble_manifest(ens))
        outputs += ["ensemble.csv", "ensemble_manifest.json"]
    du = float(grid.latent[1] - grid.latent[0])
    T = float(grid.latent[-1] - grid.latent[0])
    w = np.full(lam0.size, du)
    w[0] = w[-1] = du / 2
    results = {
        "jitter_applied": ens.jitter,
        "lamperti_time_avg_var": float(np.dot(w, lam0 ** 2) / T),
    }
    return _finish("simulate", config, outdir, outputs, results, t_start)


def _cmd_acf(config, outdir, threads, t_start):
    grid, ens, lam = _driver_lamperti_ensemble(config, threads)
    p = _params(config)
    stat = PathEnsemble(grid=grid, paths=lam, master_seed=ens.master_seed,
                        model=ens.model, jitter=ens.jitter)
    lags, est, se = empirical_acf(stat, config["max_lag"])
    family = "sub_lamperti" if config["family"] == "sub" else "bi_lamperti"
    closed = lamperti_acf(family, p).values(lags)
    write_table_csv(os.path.join(outdir, "acf.csv"),
                    ["lag", "closed_form", "empirical", "se"],
                    [lags, closed, est, se])
    dev = np.abs(est - closed) / se
    results = {
        "jitter_applied": ens.jitter,
        "max_studentized_deviation": float(dev.max()),
    }
    return _finish("acf", config, outdir, ["acf.csv"], results, t_start)


def _cmd_ergodic(config, outdir, threads, t_start):
    p = _params(config)
    k_grid = np.linspace(-config["k_max"], config["k_max"], config["k_points"])
    report = build_ergodic_report(
        config["family"], p, T=config["T"], du=config["du"], M=config["M"],
        master_seed=config["seed"], k_grid=k_grid, threads=threads)
    write_json(os.path.join(outdir, "report.json"), report.to_dict())
    ecf_dev = max(abs(complex(row["empirical"][0], row["empirical"][1])
                      - row["theoretical"]) for row in report.ecf)
    results = {
        "ecf_max_deviation": ecf_dev,
        "second_moment_estimate":
            report.time_avg_moments["2"]["estimate"],
        "second_moment_target": report.time_avg_moments["2"]["target"],
    }
    return _finish("ergodic", config, outdir, ["report.json"], results, t_start)


def _cmd_langevin(config, outdir, threads, t_start):
    p = _params(config)
    spec = LangevinSpec(params=p, family=config["family"],
                        c_norm=config["c_norm"])
    q = QuadratureConfig(rel_tol=config["rel_tol"])
    lags = np.linspace(0.0, config["t_max"], config["lag_points"])
    lags, vals, errs = tabulate_lt_acf(spec, lags, q)
    write_table_csv(os.path.join(outdir, "langevin_acf.csv"),
                    ["t", "R"], [lags, vals])
    lam_hat, intercept, resid = fit_decay_rate(
        (lags, vals), window=(config["fit_lo"], config["fit_hi"]))
    results = {
        "fitted_rate": lam_hat,
        "fit_intercept": intercept,
        "fit_residual": resid,
        "max_quadrature_error": float(np.max(errs)),
    }
    if config["check_oracle"]:
        results["oracle_max_rel_dev"] = alpha1_oracle_check(
            config["family"], p.H, p.K, rel_tol=config["rel_tol"])
        print(f"alpha=1 oracle max relative deviation: "
              f"{fmt_float(results['oracle_max_rel_dev'])}")
    return _finish("langevin", config, outdir, ["langevin_acf.csv"],
                   results, t_start)


def alpha1_oracle_check(family, H, K, rel_tol=1e-6, grid=None):
    """Max relative deviation of the alpha=1, c=1 quadrature from the
    driver's closed-form covariance on a (u, v) grid."""
    from .kernels import bi_fbm_cov, sub_fbm_cov

    pts = grid if grid is not None else (0.5, 1.0, 1.5, 2.0, 2.5)
    spec = LangevinSpec(params=HurstParams(H=H, K=K, alpha=1.0), family=family)
    q = QuadratureConfig(rel_tol=rel_tol)
    worst = 0.0
    for u in pts:
        for v in pts:
            got = langevin_cov(spec, u, v, q)
            ref = sub_fbm_cov(u, v, H) if family == "sub" \
                else bi_fbm_cov(u, v, H, K)
            worst = max(worst, abs(got - ref) / abs(ref))
    return worst


def _cmd_rates(config, outdir, threads, t_start):
    rows = []
    for H in (0.3, 0.6, 0.8):
        for alpha in (1.0, 1.5, 3.0):
            p = HurstParams(H=H, alpha=alpha)
            lam = mixing_rate_sub(p)
            lam_hat, _, resid = fit_decay_rate(lamperti_acf("sub_lamperti", p))
            rows.append({"family": "sub", "H": H, "K": 1.0, "alpha": alpha,
                         "rate_formula": lam, "rate_fitted": lam_hat,
                         "rel_err": abs(lam_hat / lam - 1.0),
                         "fit_residual": resid})
    for (H, K, alpha) in ((0.7, 0.6, 1.5), (0.5, 1.0, 1.0), (0.55, 0.6, 1.0),
                          (0.7, 1.0, 1.5), (0.6, 0.9, 3.0)):
        p = HurstParams(H=H, K=K, alpha=alpha)
        lam = mixing_rate_bi(p)
        lam_hat, _, resid = fit_decay_rate(lamperti_acf("bi_lamperti", p))
        rows.append({"family": "bi", "H": H, "K": K, "alpha": alpha,
                     "rate_formula": lam, "rate_fitted": lam_hat,
                     "rel_err": abs(lam_hat / lam - 1.0),
                     "fit_residual": resid})
    if config["H"]:
        p = HurstParams(H=config["H"], K=config["K"], alpha=config["alpha"])
        fam = "bi" if config["K"] != 1.0 else "sub"
        lam = mixing_rate_bi(p) if fam == "bi" else mixing_rate_sub(p)
        lam_hat, _, resid = fit_decay_rate(
            lamperti_acf(fam + "_lamperti", p))
        rows.append({"family": fam, "H": p.H, "K": p.K, "alpha": p.alpha,
                     "rate_formula": lam, "rate_fitted": lam_hat,
                     "rel_err": abs(lam_hat / lam - 1.0),
                     "fit_residual": resid})
    write_json(os.path.join(outdir, "rates.json"), {"rows": rows})
    worst = max(r["rel_err"] for r in rows)
    return _finish("rates", config, outdir, ["rates.json"],
                   {"max_rel_err": worst}, t_start)


_RUNNERS = {
    "simulate": _cmd_simulate,
    "acf": _cmd_acf,
    "ergodic": _cmd_ergodic,
    "langevin": _cmd_langevin,
    "rates": _cmd_rates,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    t_start = time.monotonic()
    try:
        config = _resolve_config(args)
        outdir = config["out"]
        os.makedirs(outdir, exist_ok=True)
        threads = config["threads"] or None
        return _RUNNERS[args.command](config, outdir, threads, t_start)
    except (DomainError, GridError, UnsupportedRegimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FactorizationError, QuadratureError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"I/O failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
