"""Command-line harness: seeded parallel experiments with CSV/JSON reporting.

Every experiment writes ``results.csv`` (LF line endings, '.' decimals, one
'#' comment line carrying the config hash) plus ``manifest.json`` recording
the full configuration, seed, package version and wall time.  The hash covers
only reproducibility-relevant fields (experiment, parameters, seed), so
outputs are byte-identical across worker-thread counts.

Exit codes: 0 success, 2 configuration/validation error, 3 all replicas
censored.  Errors are also emitted as one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .allen_cahn import galerkin_critical_points_1d, galerkin_potential_1d
from .determinants import carleman_det_2d, fredholm_closed_form, fredholm_det_1d
from .errors import AllCensored, InsufficientData, MetastabError
from .fields import constant_field
from .kramers import ek_allen_cahn_1d, ek_allen_cahn_2d, ek_finite
from .potential_theory import (
    Grid1D,
    capacity_dirichlet,
    committor_weighted_integral,
    magic_identity_residual,
    solve_committor,
    solve_poisson,
)
from .potentials import find_critical_point, quadratic_well, quartic_double_well
from .randomwalk import ensemble_rescaled
from .rate_functional import load_path_csv, rate_functional_sde
from .sde import (
    HittingTimeBatch,
    SdeRun,
    detailed_balance_residual,
    hitting_times_raw,
    ou_fokker_planck_residual,
    ou_mean_var,
    sample_endpoints,
)
from .spde import SpdeRun, spde_hitting_times_raw

EXPERIMENTS = (
    "sde-hitting",
    "spde-hitting",
    "ou-check",
    "potential-theory",
    "determinant",
    "kramers-predict",
    "rate-functional",
    "randomwalk",
    "arrhenius-sweep",
)


@dataclass
class ExperimentConfig:
    """Validated experiment request: name plus a flat parameter map."""

    experiment: str
    parameters: dict
    seed: int = 0
    threads: int = 1
    out: str = "."

    def hash(self) -> str:
        """Hash of the reproducibility-relevant fields only."""
        payload = json.dumps(
            {"experiment": self.experiment, "parameters": self.parameters,
             "seed": self.seed},
            sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass(frozen=True)
class ArrheniusFit:
    """Least-squares fit of log mean transition time against 1/eps."""

    slope: float
    intercept: float
    r_squared: float
    points: tuple  # rows (eps, mean_tau)


def arrhenius_fit(batches) -> ArrheniusFit:
    """Fit (1/eps, log mean tau); the slope estimates the barrier height."""
    pts = [(float(eps), b.mean if isinstance(b, HittingTimeBatch) else float(b))
           for eps, b in batches]
    eps_vals = sorted({e for e, _ in pts})
    if len(eps_vals) < 3:
        raise InsufficientData("need at least 3 distinct eps values")
    x = np.array([1.0 / e for e, _ in pts])
    y = np.log([t for _, t in pts])
    A = np.vstack([x, np.ones_like(x)]).T
    coef, res, _, _ = np.linalg.lstsq(A, y, rcond=None)
    slope, intercept = float(coef[0]), float(coef[1])
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum((A @ coef - y) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return ArrheniusFit(slope=slope, intercept=intercept, r_squared=r2,
                        points=tuple(pts))


# ---------------------------------------------------------------------------
# Parallel replica scheduling
# ---------------------------------------------------------------------------


def _parallel_raw(worker, n: int, threads: int) -> np.ndarray:
    """Run worker(offset, count) chunks over a pool; merge by replica index.

    Each replica draws from its own (seed, index) stream, so the result is
    independent of the partition and of the thread count.
    """
    if threads <= 1:
        return worker(0, n)
    n_chunks = min(n, threads * 4)
    bounds = np.linspace(0, n, n_chunks + 1).astype(int)
    jobs = [(int(a), int(b - a)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    out = np.empty(n)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [(off, pool.submit(worker, off, cnt)) for off, cnt in jobs]
        for off, fut in futures:
            part = fut.result()
            out[off:off + part.size] = part
    return out


# ---------------------------------------------------------------------------
# Output writing
# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_results(cfg: ExperimentConfig, header: list, rows: list,
                  summary: dict | None = None, wall_time: float = 0.0) -> Path:
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "results.csv"
    lines = [f"# manifest_hash={cfg.hash()}", ",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    csv_path.write_text("\n".join(lines) + "\n", newline="\n")

    manifest = {
        "experiment": cfg.experiment,
        "parameters": cfg.parameters,
        "seed": cfg.seed,
        "threads": cfg.threads,
        "version": __version__,
        "config_hash": cfg.hash(),
        "wall_time_s": wall_time,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    if summary is not None:
        (out_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return csv_path


# ---------------------------------------------------------------------------
# Experiment runners (each returns header, rows, summary)
# ---------------------------------------------------------------------------

_POTENTIALS = {
    "quartic": quartic_double_well,
    "quadratic": quadratic_well,
}


def _require(params: dict, *keys):
    missing = [k for k in keys if k not in params]
    if missing:
        raise ValueError(f"missing required parameter(s): {', '.join(missing)}")


def _positive(params: dict, *keys):
    for k in keys:
        if k in params and not params[k] > 0:
            raise ValueError(f"parameter {k} must be positive")


def _check_L(params: dict):
    if "L" in params and not 0 < params["L"] < 2 * np.pi:
        raise ValueError("L must lie in (0, 2*pi)")


def _run_sde_hitting(cfg: ExperimentConfig):
    p = cfg.parameters
    _require(p, "epsilon", "dt", "x0", "target", "delta", "n")
    _positive(p, "epsilon", "dt", "delta")
    pot = _POTENTIALS[p.get("potential", "quartic")]()
    run = SdeRun(potential=pot, epsilon=p["epsilon"], dt=p["dt"],
                 x0=np.atleast_1d(p["x0"]), seed=cfg.seed,
                 t_max=p.get("t_max"))
    target = np.atleast_1d(p["target"])

    def worker(offset, count):
        return hitting_times_raw(run, target, p["delta"], count, replica_offset=offset)

    raw = _parallel_raw(worker, int(p["n"]), cfg.threads)
    batch = HittingTimeBatch.from_raw(raw, cfg.seed)
    header = ["replica", "tau", "censored"]
    rows = [(i, 0.0 if np.isnan(t) else t, bool(np.isnan(t)))
            for i, t in enumerate(raw)]
    summary = {"mean": batch.mean, "stderr": batch.stderr,
               "n_attempted": batch.n_attempted, "n_censored": batch.n_censored}
    return header, rows, summary


def _run_spde_hitting(cfg: ExperimentConfig):
    p = cfg.parameters
    _require(p, "d", "L", "N", "epsilon", "dt", "delta", "n", "t_max")
    _positive(p, "L", "epsilon", "dt", "delta", "t_max")
    _check_L(p)
    f0 = constant_field(int(p["d"]), p["L"], int(p["N"]), p.get("start", -1.0))
    run = SpdeRun(field0=f0, epsilon=p["epsilon"], dt=p["dt"],
                  t_max=p["t_max"], seed=cfg.seed,
                  renormalize=p.get("renormalize"))
    norm = p.get("norm", "linf")
    s = p.get("s", -0.5)

    def worker(offset, count):
        return spde_hitting_times_raw(run, p.get("target", 1.0), p["delta"],
                                      norm=norm, s=s, n=count,
                                      replica_offset=offset)

    raw = _parallel_raw(worker, int(p["n"]), cfg.threads)
    batch = HittingTimeBatch.from_raw(raw, cfg.seed)
    if p.get("snapshots"):
        from .spde import record_snapshots

        horizon = min(p["t_max"], float(np.nanmax(raw)) if np.isfinite(raw).any()
                      else p["t_max"])
        times = np.linspace(0.0, horizon, int(p["snapshots"]))
        record_snapshots(run, times, str(Path(cfg.out) / "snapshots"),
                         replica_index=int(p["n"]))
    header = ["replica", "tau", "censored"]
    rows = [(i, 0.0 if np.isnan(t) else t, bool(np.isnan(t)))
            for i, t in enumerate(raw)]
    summary = {"mean": batch.mean, "stderr": batch.stderr,
               "n_attempted": batch.n_attempted, "n_censored": batch.n_censored}
    return header, rows, summary


def _run_ou_check(cfg: ExperimentConfig):
    p = cfg.parameters
    _require(p, "epsilon", "t", "dt", "n")
    _positive(p, "epsilon", "t", "dt")
    eps, t = p["epsilon"], p["t"]
    run = SdeRun(potential=quadratic_well(), epsilon=eps, dt=p["dt"],
                 x0=[p.get("x0", 1.0)], seed=cfg.seed)
    xs = sample_endpoints(run, t, int(p["n"]))[:, 0]
    mean_th, var_th = ou_mean_var(p.get("x0", 1.0), t, eps)
    mean_emp, var_emp = float(xs.mean()), float(xs.var(ddof=1))
    se_mean = float(xs.std(ddof=1) / np.sqrt(xs.size))
    se_var = var_emp * np.sqrt(2.0 / (xs.size - 1))

    grid = np.linspace(-2, 2, 41)
    db = detailed_balance_residual(0.7, eps, grid)
    y = np.linspace(-1.5, 1.5, 31)
    r1 = ou_fokker_planck_residual(p.get("x0", 1.0), eps, max(t, 0.5), y, 1e-2)
    r2 = ou_fokker_planck_residual(p.get("x0", 1.0), eps, max(t, 0.5), y, 5e-3)

    header = ["check", "value", "expected", "band"]
    rows = [
        ("endpoint_mean", mean_emp, mean_th, 3 * se_mean),
        ("endpoint_var", var_emp, var_th, 3 * se_var),
        ("detailed_balance_residual", db, 0.0, 1e-12),
        ("fokker_planck_richardson", r1 / r2, 4.0, 0.5),
    ]
    ok = all(abs(v - e) <= b for _, v, e, b in rows)
    return header, rows, {"all_passed": ok}


def _run_potential_theory(cfg: ExperimentConfig):
    p = cfg.parameters
    _require(p, "epsilon")
    _positive(p, "epsilon")
    eps = p["epsilon"]
    pot = _POTENTIALS[p.get("potential", "quartic")]()
    grid = Grid1D(p.get("a", -2.5), p.get("b", 2.5), int(p.get("m", 1999)))
    A = tuple(p.get("A", (-1.2, -0.8)))
    B = tuple(p.get("B", (0.8, 1.2)))
    w = solve_poisson(grid, pot, eps, B)
    comm = solve_committor(grid, pot, eps, A, B)
    cap = capacity_dirichlet(grid, pot, eps, comm)
    i_star = int(np.argmin([pot.value(np.array([x])) for x in grid.nodes]))
    residual = magic_identity_residual(grid, pot, eps, A, B)
    integ = committor_weighted_integral(grid, pot, eps, comm)
    header = ["quantity", "value"]
    rows = [
        ("mean_hitting_time_at_minimum", w[i_star]),
        ("capacity", cap),
        ("magic_identity_residual", residual),
        ("committor_weighted_integral", integ),
    ]
    return header, rows, {k: v for k, v in rows}


def _run_determinant(cfg: ExperimentConfig):
    p = cfg.parameters
    _require(p, "d", "L", "N")
    _check_L(p)
    d, L, N = int(p["d"]), p["L"], int(p["N"])
    header = ["quantity", "value"]
    if d == 1:
        res = fredholm_det_1d(L, N)
        closed = fredholm_closed_form(L)
        rows = [("truncated_value", res.value),
                ("closed_form", closed),
                ("relative_error", abs(res.value - closed) / abs(closed)),
                ("tail_estimate", res.tail_estimate)]
    elif d == 2:
        res = carleman_det_2d(L, N)
        rows = [("truncated_value", res.value),
                ("log_abs", res.log_abs),
                ("tail_estimate", res.tail_estimate)]
    else:
        raise ValueError("d must be 1 or 2")
    return header, rows, {k: v for k, v in rows}


def _run_kramers_predict(cfg: ExperimentConfig):
    p = cfg.parameters
    system = p.get("system", "quartic")
    eps_list = p.get("epsilon", [])
    if np.isscalar(eps_list):
        eps_list = [eps_list]
    if system == "quartic":
        pot = quartic_double_well()
        mn = find_critical_point(pot, [-0.9])
        sd = find_critical_point(pot, [0.1])
        pred = ek_finite(mn, sd, pot)
    elif system == "ac1d":
        _require(p, "L")
        _check_L(p)
        pred = ek_allen_cahn_1d(p["L"], p.get("N"))
    elif system == "ac2d":
        _require(p, "L", "N")
        _check_L(p)
        pred = ek_allen_cahn_2d(p["L"], int(p["N"]))
    elif system == "ac1d-galerkin":
        _require(p, "L", "N")
        _check_L(p)
        gp = galerkin_potential_1d(p["L"], int(p["N"]))
        mn, sd = galerkin_critical_points_1d(p["L"], int(p["N"]))
        pred = ek_finite(mn, sd, gp)
    else:
        raise ValueError(f"unknown system {system!r}")
    header = ["quantity", "value"]
    rows = [("barrier", pred.barrier),
            ("prefactor", pred.prefactor),
            ("lambda_minus", pred.lambda_minus),
            ("determinant_factor", pred.determinant_factor)]
    rows += [(f"predicted_mean_time_eps={eps}", pred.predict(eps))
             for eps in eps_list]
    return header, rows, {k: v for k, v in rows}


def _run_rate_functional(cfg: ExperimentConfig):
    p = cfg.parameters
    if "field_jsonl" in p:
        from .rate_functional import load_field_path_jsonl, rate_functional_ac_1d

        path = load_field_path_jsonl(p["field_jsonl"])
        value = rate_functional_ac_1d(path, p.get("L", path.L))
        rev = rate_functional_ac_1d(path.reversed(), p.get("L", path.L))
    else:
        _require(p, "path_csv")
        path = load_path_csv(p["path_csv"])
        pot = _POTENTIALS[p.get("potential", "quartic")]()
        value = rate_functional_sde(path, pot)
        rev = rate_functional_sde(path.reversed(), pot)
    header = ["quantity", "value"]
    rows = [("cost", value), ("cost_reversed", rev),
            ("n_nodes", path.times.size)]
    return header, rows, {k: v for k, v in rows}


def _run_randomwalk(cfg: ExperimentConfig):
    p = cfg.parameters
    _require(p, "n_walks", "n_steps")
    n_walks, n_steps = int(p["n_walks"]), int(p["n_steps"])
    s, t = p.get("s", 0.25), p.get("t", 1.0)
    with_s = ensemble_rescaled(n_walks, n_steps, [s, t], cfg.seed)
    incr = with_s[:, 1] - with_s[:, 0]
    var_emp = float(incr.var(ddof=1))
    se = var_emp * np.sqrt(2.0 / (n_walks - 1))
    from scipy import stats
    w1 = ensemble_rescaled(n_walks, n_steps, [1.0], cfg.seed)[:, 0]
    ks = stats.kstest(w1, "norm")
    header = ["check", "value", "expected", "band"]
    rows = [
        ("increment_variance", var_emp, t - s, 3 * se),
        ("ks_statistic_w1", float(ks.statistic), 0.0,
         float(1.358 / np.sqrt(n_walks))),  # 5% critical value
    ]
    return header, rows, {"ks_pvalue": float(ks.pvalue)}


def _run_arrhenius_sweep(cfg: ExperimentConfig):
    p = cfg.parameters
    _require(p, "epsilon_list", "n")
    eps_list = list(p["epsilon_list"])
    system = p.get("system", "sde")
    batches = []
    for i, eps in enumerate(eps_list):
        # distinct seed block per eps so replicas stay independent
        seed_eps = cfg.seed + 1000 * i
        if system == "sde":
            pot = _POTENTIALS[p.get("potential", "quartic")]()
            run = SdeRun(potential=pot, epsilon=eps, dt=p.get("dt", 1e-3),
                         x0=np.atleast_1d(p.get("x0", -1.0)), seed=seed_eps,
                         t_max=p.get("t_max"))
            target = np.atleast_1d(p.get("target", 1.0))

            def worker(offset, count, _run=run, _t=target):
                return hitting_times_raw(_run, _t, p.get("delta", 0.2), count,
                                         replica_offset=offset)
        elif system == "ac1d":
            _require(p, "L", "N")
            _check_L(p)
            f0 = constant_field(1, p["L"], int(p["N"]), p.get("start", -1.0))
            run = SpdeRun(field0=f0, epsilon=eps, dt=p.get("dt", 2e-3),
                          t_max=p.get("t_max", 4000.0), seed=seed_eps)

            def worker(offset, count, _run=run):
                return spde_hitting_times_raw(_run, p.get("target", 1.0),
                                              p.get("delta", 0.3),
                                              norm=p.get("norm", "linf"),
                                              s=p.get("s", -0.5), n=count,
                                              replica_offset=offset)
        else:
            raise ValueError(f"unknown system {system!r}")
        raw = _parallel_raw(worker, int(p["n"]), cfg.threads)
        batches.append((eps, HittingTimeBatch.from_raw(raw, seed_eps)))
    fit = arrhenius_fit(batches)
    header = ["epsilon", "mean_tau", "stderr", "n_censored"]
    rows = [(eps, b.mean, b.stderr, b.n_censored) for eps, b in batches]
    rows.append(("fit_slope", fit.slope, fit.intercept, fit.r_squared))
    summary = {"slope": fit.slope, "intercept": fit.intercept,
               "r_squared": fit.r_squared}
    return header, rows, summary


_RUNNERS = {
    "sde-hitting": _run_sde_hitting,
    "spde-hitting": _run_spde_hitting,
    "ou-check": _run_ou_check,
    "potential-theory": _run_potential_theory,
    "determinant": _run_determinant,
    "kramers-predict": _run_kramers_predict,
    "rate-functional": _run_rate_functional,
    "randomwalk": _run_randomwalk,
    "arrhenius-sweep": _run_arrhenius_sweep,
}

# flag name -> (json type, parser)
_FLAG_TYPES = {
    "epsilon": float, "dt": float, "t": float, "t_max": float, "x0": float,
    "target": float, "delta": float, "n": int, "d": int, "L": float, "N": int,
    "m": int, "a": float, "b": float, "s": float, "start": float,
    "n_walks": int, "n_steps": int, "potential": str, "system": str,
    "norm": str, "path_csv": str, "field_jsonl": str, "snapshots": int,
}


def parse_config(argv) -> ExperimentConfig:
    parser = argparse.ArgumentParser(
        prog="metastab",
        description="Metastable-dynamics experiments with seeded, "
                    "reproducible Monte Carlo and PDE/determinant oracles.")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=str, default=None,
                        help="JSON file with a parameters map")
        sp.add_argument("--out", type=str, default=".")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--threads", type=int, default=None)
        for flag, typ in _FLAG_TYPES.items():
            sp.add_argument(f"--{flag}", type=typ, default=None)
        sp.add_argument("--epsilon-list", type=str, default=None,
                        help="comma-separated eps values")
        sp.add_argument("--renormalize", type=str, choices=["on", "off"],
                        default=None)

    ns = parser.parse_args(argv)
    params: dict = {}
    seed, threads = 0, 1
    if ns.config:
        with open(ns.config) as f:
            file_cfg = json.load(f)
        params.update(file_cfg.get("parameters", {}))
        seed = file_cfg.get("seed", seed)
        threads = file_cfg.get("threads", threads)
        if file_cfg.get("experiment", ns.experiment) != ns.experiment:
            raise ValueError("config file experiment differs from subcommand")
    for flag in _FLAG_TYPES:
        val = getattr(ns, flag.replace("-", "_"), None)
        if val is not None:
            params[flag] = val
    if ns.epsilon_list is not None:
        params["epsilon_list"] = [float(x) for x in ns.epsilon_list.split(",")]
    if ns.renormalize is not None:
        params["renormalize"] = ns.renormalize == "on"
    if ns.seed is not None:
        seed = ns.seed
    if ns.threads is not None:
        threads = ns.threads
    if threads < 1:
        raise ValueError("threads must be >= 1")
    return ExperimentConfig(experiment=ns.experiment, parameters=params,
                            seed=int(seed), threads=int(threads), out=ns.out)


def run(cfg: ExperimentConfig) -> int:
    """Execute one experiment; returns the process exit code."""
    t0 = time.perf_counter()
    try:
        header, rows, summary = _RUNNERS[cfg.experiment](cfg)
    except AllCensored as exc:
        json.dump({"error": "AllCensored", "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 3
    except (ValueError, KeyError, MetastabError) as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    write_results(cfg, header, rows, summary, wall_time=time.perf_counter() - t0)
    return 0


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except ValueError as exc:
        json.dump({"error": "ConfigError", "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except SystemExit as exc:  # argparse validation
        return 2 if exc.code not in (0, None) else 0
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
