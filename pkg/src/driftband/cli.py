"""Command-line surface: simulate | fit | prep | predict.

Every command accepts ``--config <json>`` with the same keys as its
flags; explicit flags win. Artifacts embed the tool version, the resolved
configuration, and the master seed, and contain no timestamps, so a rerun
with identical inputs is byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np
import pandas as pd

from . import __version__
from .artifacts import fit_payload, load_fit_artifact, save_fit_artifact
from .bounds import intercept_bounds, moving_block_bounds, predict_intervals
from .core import partition_windows, plan_from_groups, validate_dataset
from .estimator import fit_closed_form, fit_given_beta, fit_weighted_groups
from .inference import (
    coef_inference,
    ols_inference,
    render_coef_table,
    weighted_group_inference,
)
from .pm25 import HeatingCalendar, aggregate_daily, engineer_features, load_hourly
from .simulation import DgpSpec, emit_table, run_monte_carlo

__all__ = ["main"]


def _resolve(args: argparse.Namespace, keys: list[str]) -> dict:
    """Merge config-file values under explicit flags; flags win."""
    resolved = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            file_cfg = json.load(fh)
        unknown = set(file_cfg) - set(keys)
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        resolved.update(file_cfg)
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            resolved[k] = v
    return resolved


def _write_text(path, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _header(fmt: str, config: dict) -> str:
    blob = json.dumps(config, sort_keys=True)
    if fmt == "csv":
        return f"# driftband {__version__}\n# config {blob}\n"
    return f"<!-- driftband {__version__} config {blob} -->\n\n"


def _load_design(path, response: str):
    frame = pd.read_csv(path, comment="#")
    if response not in frame.columns:
        raise ValueError(f"{path}: no response column {response!r}")
    numeric = frame.select_dtypes(include=[np.number])
    if response not in numeric.columns:
        raise ValueError(f"{path}: response column {response!r} is not numeric")
    features = [c for c in numeric.columns if c != response]
    if not features:
        raise ValueError(f"{path}: no numeric feature columns")
    data = validate_dataset(
        numeric[features].to_numpy(dtype=float),
        numeric[response].to_numpy(dtype=float),
        names=features,
    )
    return data


def cmd_simulate(args: argparse.Namespace) -> int:
    keys = ["variant", "k", "m", "n0", "w", "reps", "seed", "beta", "format"]
    cfg = _resolve(args, keys)
    cfg.setdefault("m", 100)
    cfg.setdefault("seed", 0)
    cfg.setdefault("format", "markdown")
    for req in ("variant", "k", "n0", "w", "reps"):
        if req not in cfg:
            raise ValueError(f"missing required setting {req!r}")
    beta = cfg.get("beta")
    if isinstance(beta, str):
        beta = tuple(float(v) for v in beta.split(","))
        cfg["beta"] = list(beta)
    elif beta is not None:
        beta = tuple(float(v) for v in beta)
    spec = DgpSpec(variant=cfg["variant"], k=int(cfg["k"]), m=int(cfg["m"]), beta=beta)
    summary = run_monte_carlo(
        spec, reps=int(cfg["reps"]), n0=int(cfg["n0"]), w=int(cfg["w"]), seed=int(cfg["seed"])
    )
    fmt = cfg["format"]
    _write_text(args.out, _header(fmt, cfg) + emit_table([summary], fmt))
    return 0


def cmd_fit(args: argparse.Namespace) -> int:
    keys = ["input", "response", "n0", "w", "groups", "weighted", "format"]
    cfg = _resolve(args, keys)
    cfg.setdefault("format", "markdown")
    cfg.setdefault("weighted", False)
    for req in ("input", "response"):
        if req not in cfg:
            raise ValueError(f"missing required setting {req!r}")
    data = _load_design(cfg["input"], cfg["response"])

    groups = cfg.get("groups")
    if groups is not None:
        sizes = [int(v) for v in str(groups).split(",")]
        plan = plan_from_groups(sizes)
        plan.check_covers(data.n)
        if cfg["weighted"]:
            fit = fit_weighted_groups(data, plan)
            table = weighted_group_inference(fit, data)
        else:
            beta, diag = fit_closed_form(data, plan)
            fit = fit_given_beta(data, plan, beta)
            table = coef_inference(fit, diag, data)
        bounds = intercept_bounds(fit.window_intercepts)
        block_length = None
    else:
        if "n0" not in cfg or "w" not in cfg:
            raise ValueError("missing required setting 'n0'/'w' (or pass --groups)")
        plan = partition_windows(data.n, int(cfg["n0"]))
        beta, diag = fit_closed_form(data, plan)
        fit = fit_given_beta(data, plan, beta)
        table = coef_inference(fit, diag, data)
        bounds = moving_block_bounds(data, fit.beta_hat, int(cfg["w"]), plan=plan)
        block_length = int(cfg["w"])

    ols_table = ols_inference(data)
    fmt = cfg["format"]
    text = render_coef_table(
        {"OLS": ols_table, "EMMB": table},
        fmt,
        bounds={"EMMB": (bounds.mu_lower_hat, bounds.mu_upper_hat)},
    )
    _write_text(args.out, _header(fmt, cfg) + text)

    if args.save_fit:
        centering = None
        meta_path = str(cfg["input"]) + ".meta.json"
        try:
            with open(meta_path, encoding="utf-8") as fh:
                centering = json.load(fh).get("centering_means")
        except FileNotFoundError:
            pass
        payload = fit_payload(
            version=__version__,
            response=cfg["response"],
            feature_names=data.names,
            beta=fit.beta_hat,
            plan=plan,
            mu_lower=bounds.mu_lower_hat,
            mu_upper=bounds.mu_upper_hat,
            block_length=block_length,
            config=cfg,
            centering=centering,
            stats={"r2": table.r2, "adj_r2": table.adj_r2, "sigma2": table.sigma2},
        )
        save_fit_artifact(args.save_fit, payload)
    return 0


def cmd_prep(args: argparse.Namespace) -> int:
    keys = ["input", "calendar"]
    cfg = _resolve(args, keys)
    if "input" not in cfg:
        raise ValueError("missing required setting 'input'")
    if args.out is None:
        raise ValueError("prep requires --out for the design matrix")
    calendar = (
        HeatingCalendar.from_csv(cfg["calendar"]) if cfg.get("calendar") else HeatingCalendar.default()
    )
    hourly = load_hourly(cfg["input"])
    daily = aggregate_daily(hourly, calendar)
    design = engineer_features(daily)
    ds = design.dataset

    lines = ["date," + ",".join(ds.names) + ",pm2.5_mean"]
    for i in range(ds.n):
        cells = [design.dates[i]]
        cells += [repr(float(v)) for v in ds.x[i]]
        cells.append(repr(float(ds.y[i])))
        lines.append(",".join(cells))
    _write_text(args.out, _header("csv", cfg) + "\n".join(lines) + "\n")

    meta = {
        "version": __version__,
        "config": cfg,
        "centering_means": design.centering_means,
        "heating_intervals": calendar.to_payload(),
        "summer_months": list(design.summer_months),
        "winter_months": list(design.winter_months),
        "daily_rows": int(len(daily)),
        "complete_case_rows": int(ds.n),
        "dropped_rows": design.dropped_rows,
    }
    with open(str(args.out) + ".meta.json", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(meta, sort_keys=True, indent=2) + "\n")

    print(
        f"{len(daily)} daily rows, {ds.n} complete cases, {design.dropped_rows} dropped"
    )
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    keys = ["fit", "input"]
    cfg = _resolve(args, keys)
    for req in ("fit", "input"):
        if req not in cfg:
            raise ValueError(f"missing required setting {req!r}")
    payload = load_fit_artifact(cfg["fit"])
    names = payload["feature_names"]
    beta = np.array(payload["beta"], dtype=float)
    frame = pd.read_csv(cfg["input"], comment="#")
    missing = [c for c in names if c not in frame.columns]
    if missing:
        raise ValueError(
            f"{cfg['input']}: expected the {len(names)} fitted covariate columns; missing {missing}"
        )
    x = frame[names].to_numpy(dtype=float)
    out = predict_intervals(
        x,
        beta,
        intercept_bounds(
            [payload["bounds"]["mu_lower"], payload["bounds"]["mu_upper"]],
            w=payload["bounds"].get("block_length"),
        ),
    )
    lines = ["lower,upper,point_center"]
    lines += [",".join(repr(float(v)) for v in row) for row in out]
    _write_text(args.out, _header("csv", cfg) + "\n".join(lines) + "\n")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="driftband",
        description="Drifting-baseline regression: estimation, bounds, simulation, preprocessing.",
    )
    parser.add_argument("--version", action="version", version=f"driftband {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file with the same keys as the flags")
        p.add_argument("--out", help="output path (stdout when omitted)")

    p = sub.add_parser("simulate", help="run a Monte Carlo comparison and emit its table")
    common(p)
    p.add_argument("--variant", choices=["sim1", "sim2", "sim3"])
    p.add_argument("--k", type=int, help="number of segments")
    p.add_argument("--m", type=int, help="segment size (default 100)")
    p.add_argument("--n0", type=int, help="fit window size")
    p.add_argument("--w", type=int, help="moving-block length")
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--beta", help="comma-separated true slopes (scenario default otherwise)")
    p.add_argument("--format", choices=["csv", "markdown"])
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="fit a design-matrix CSV and report coefficients")
    common(p)
    p.add_argument("--input", help="design-matrix CSV")
    p.add_argument("--response", help="response column name")
    p.add_argument("--n0", type=int, help="fit window size")
    p.add_argument("--w", type=int, help="moving-block length (must exceed n0)")
    p.add_argument("--groups", help="comma-separated known group sizes (replaces --n0/--w)")
    p.add_argument("--weighted", action="store_const", const=True, default=None,
                   help="inverse-variance weighting (needs --groups)")
    p.add_argument("--format", choices=["csv", "markdown"])
    p.add_argument("--save-fit", help="also write a fit artifact JSON here")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("prep", help="build the daily design matrix from the raw hourly CSV")
    common(p)
    p.add_argument("--input", help="raw hourly CSV (UCI Beijing PM2.5 layout)")
    p.add_argument("--calendar", help="heating calendar CSV (start,end per winter)")
    p.set_defaults(func=cmd_prep)

    p = sub.add_parser("predict", help="interval predictions for new covariate rows")
    common(p)
    p.add_argument("--fit", help="fit artifact JSON from `fit --save-fit`")
    p.add_argument("--input", help="CSV with the fitted covariate columns")
    p.set_defaults(func=cmd_predict)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - map everything to exit status
        print(f"driftband {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
