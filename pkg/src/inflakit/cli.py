"""Command-line front end: bootstrap, price, simulate, calibrate, converge.

Every run takes a JSON config, writes CSV tables plus a JSON summary into
the output directory, and embeds the config hash and seed so reports are
reproducible bit for bit.  Exit codes: 0 success, 2 parse/input, 3
calibration, 4 numerical domain, 5 capacity, 1 anything else.
"""

import argparse
import csv
import hashlib
import json
import os
import sys

import numpy as np

from . import io as data_io
from . import jarrow_yildirim as jy
from . import pricers, rational
from .curves import (
    KIND_NOMINAL,
    KIND_REAL,
    CurvePair,
    bootstrap_piecewise_forwards,
)
from .errors import InflakitError, ParseError
from .lattice import HoLeeTreeSpec, ho_lee_calibrate
from .mc import PathGrid, gbm_spec, strong_convergence_order
from .shortrate import (
    MertonStructuralInputs,
    merton_calibrate,
    merton_default_metrics,
)

COMMANDS = ("bootstrap", "price", "simulate", "calibrate", "converge")


def _config_hash(config):
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def _require(config, key, kind=None, stage="config"):
    if key not in config:
        raise ParseError(f"{stage}: missing required key {key!r}")
    value = config[key]
    if kind is not None and not isinstance(value, kind):
        raise ParseError(
            f"{stage}: key {key!r} must be {kind}, got {type(value).__name__}"
        )
    return value


def _write_summary(out_dir, name, payload):
    path = os.path.join(out_dir, name)
    with open(path, "w") as handle:
        json.dump(payload, handle, sort_keys=True, indent=2)
        handle.write("\n")
    return path


def _write_csv(out_dir, name, header, rows):
    path = os.path.join(out_dir, name)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
    return path


def _fmt(value):
    return repr(float(value))


def _load_pair(config, stage):
    nominal = data_io.load_curve_csv(
        _require(config, "nominal_curve_csv", str, stage), KIND_NOMINAL
    )
    real = data_io.load_curve_csv(
        _require(config, "real_curve_csv", str, stage), KIND_REAL
    )
    spot = float(_require(config, "spot_index", (int, float), stage))
    return CurvePair(nominal, real, spot)


def run_bootstrap(config, out_dir, seed):
    quotes = data_io.load_quotes_csv(_require(config, "quotes_csv", str, "bootstrap"))
    nominal, real = data_io.split_quotes(quotes)
    summary = {"config_hash": _config_hash(config), "seed": seed, "curves": {}}
    for kind, subset in ((KIND_NOMINAL, nominal), (KIND_REAL, real)):
        if not subset:
            continue
        nodes = config.get("node_times", {}).get(kind)
        result = bootstrap_piecewise_forwards(subset, nodes)
        data_io.write_curve_csv(
            os.path.join(out_dir, f"curve_{kind}.csv"), result.curve
        )
        summary["curves"][kind] = {
            "n_quotes": len(subset),
            "residual_norm": result.residual_norm,
            "n_evaluations": result.n_evaluations,
        }
    if not summary["curves"]:
        raise ParseError("bootstrap: quote file holds no usable quotes")
    _write_summary(out_dir, "bootstrap_summary.json", summary)
    return summary


def _factor_vols_from_config(config, horizon):
    spec = config.get("factor_vols")
    if spec is None:
        raise ParseError("price: option trades need a 'factor_vols' section")
    p = jy.JyParams(
        a_n=float(_require(spec, "a_n", (int, float), "factor_vols")),
        a_r=float(_require(spec, "a_r", (int, float), "factor_vols")),
        sigma_n=float(_require(spec, "sigma_n", (int, float), "factor_vols")),
        sigma_r=float(_require(spec, "sigma_r", (int, float), "factor_vols")),
        sigma_i=float(_require(spec, "sigma_i", (int, float), "factor_vols")),
        rho_nr=float(_require(spec, "rho_nr", (int, float), "factor_vols")),
        rho_ni=float(_require(spec, "rho_ni", (int, float), "factor_vols")),
        rho_ri=float(_require(spec, "rho_ri", (int, float), "factor_vols")),
    )
    return pricers.FactorVols.from_jy(
        p, horizon, int(spec.get("grid_points", 256))
    )


def _call_put(record, where):
    value = record.get("call_put", 1)
    if value in (1, -1):
        return int(value)
    if value == "call":
        return 1
    if value == "put":
        return -1
    raise ParseError(f"{where}: call_put must be 'call', 'put', +1 or -1")


def _price_trade(record, pair, config, bundle):
    where = f"trade {record['trade_id']}"
    kind = record["type"]
    notional = float(record.get("notional", 1.0))
    if kind == "zciis":
        legs = pricers.zciis_price(
            pair,
            float(_require(record, "maturity", (int, float), where)),
            float(_require(record, "strike", (int, float), where)),
            notional,
        )
        return legs.pv_float - legs.pv_fixed, None
    if kind == "yyiis":
        schedule = record.get("schedule")
        if schedule is None:
            years = int(_require(record, "n_years", int, where))
            schedule = [float(k) for k in range(1, years + 1)]
        legs = pricers.yyiis_price(
            pair, schedule, float(_require(record, "strike", (int, float), where)),
            notional,
        )
        return legs.pv_float - legs.pv_fixed, None
    if kind == "tips":
        if bundle is None:
            raise ParseError(f"{where}: tips trades need cpi_csv and valuation_date")
        spec = pricers.TipsSpec(
            coupon=float(_require(record, "coupon", (int, float), where)),
            payment_times=np.asarray(
                _require(record, "payment_times", list, where), dtype=float
            ),
            base_index=float(_require(record, "base_index", (int, float), where)),
        )
        _, nominal_price = pricers.tips_dirty_price(
            spec, pair, bundle.cpi, bundle.valuation_date
        )
        return notional * nominal_price, None
    if kind == "index_option":
        spec = pricers.IndexOptionSpec(
            strike=float(_require(record, "strike", (int, float), where)),
            expiry=float(_require(record, "expiry", (int, float), where)),
            call_put=_call_put(record, where),
        )
        vols = _factor_vols_from_config(config, spec.expiry)
        return notional * pricers.index_option_price(spec, pair, vols), None
    spec = pricers.InflationOptionSpec(
        strike=float(_require(record, "strike", (int, float), where)),
        t1=float(_require(record, "t1", (int, float), where)),
        t2=float(_require(record, "t2", (int, float), where)),
        call_put=_call_put(record, where),
    )
    vols = _factor_vols_from_config(config, spec.t2)
    return notional * pricers.inflation_option_price(spec, pair, vols), None


def run_price(config, out_dir, seed):
    pair = _load_pair(config, "price")
    trades = data_io.load_trades(_require(config, "trades", str, "price"))
    bundle = None
    if "cpi_csv" in config:
        cpi = data_io.load_cpi_csv(config["cpi_csv"], config.get("base_index"))
        bundle = data_io.MarketDataBundle(
            cpi,
            [],
            [],
            data_io.parse_iso_date(_require(config, "valuation_date", str, "price")),
        )
    rows = []
    for record in trades:
        pv, stderr = _price_trade(record, pair, config, bundle)
        rows.append(
            [record["trade_id"], _fmt(pv), "" if stderr is None else _fmt(stderr)]
        )
    _write_csv(out_dir, "prices.csv", ["trade_id", "pv", "stderr"], rows)
    summary = {
        "config_hash": _config_hash(config),
        "seed": seed,
        "n_trades": len(rows),
    }
    _write_summary(out_dir, "price_summary.json", summary)
    return summary


def run_simulate(config, out_dir, seed):
    pair = _load_pair(config, "simulate")
    params = data_io.load_jy_params(_require(config, "jy_params", str, "simulate"))
    params = jy.theta_fit(params, pair.nominal)
    params = jy.theta_fit(params, pair.real)
    horizon = float(_require(config, "horizon", (int, float), "simulate"))
    n_steps = int(_require(config, "n_steps", int, "simulate"))
    n_paths = int(_require(config, "n_paths", int, "simulate"))
    scheme = config.get("scheme", "exact")
    grid = PathGrid(0.0, horizon, n_steps)
    paths = jy.simulate(params, jy.initial_state(pair), grid, seed, n_paths, scheme)

    maturities = config.get("maturities")
    if maturities is None:
        maturities = [t for t in pair.nominal.node_times if t <= horizon + 1e-12]
    widths = np.diff(paths.times)
    increments = (paths.r_n[:, :-1] + paths.r_n[:, 1:]) * 0.5 * widths
    cum_discount = np.exp(-np.cumsum(increments, axis=1))
    rows = []
    for maturity in maturities:
        idx = int(round(maturity / grid.dt))
        if abs(idx * grid.dt - maturity) > 1e-9 or idx < 1:
            raise ParseError(
                f"simulate: maturity {maturity} is not on the simulation grid"
            )
        disc = cum_discount[:, idx - 1]
        zcb = disc.mean()
        zcb_se = disc.std(ddof=1) / np.sqrt(n_paths)
        tips_sample = disc * paths.index[:, idx] / pair.spot_index
        tips = tips_sample.mean()
        tips_se = tips_sample.std(ddof=1) / np.sqrt(n_paths)
        rows.append(
            [
                _fmt(maturity),
                _fmt(zcb),
                _fmt(zcb_se),
                _fmt(pair.nominal.discount_factor(0.0, maturity)),
                _fmt(tips),
                _fmt(tips_se),
                _fmt(pair.real.discount_factor(0.0, maturity)),
            ]
        )
    _write_csv(
        out_dir,
        "simulated_curves.csv",
        ["maturity", "zcb_mc", "zcb_se", "zcb_curve", "tips_mc", "tips_se",
         "tips_curve"],
        rows,
    )
    summary = {
        "config_hash": _config_hash(config),
        "seed": seed,
        "scheme": scheme,
        "n_paths": n_paths,
        "n_steps": n_steps,
        "horizon": horizon,
    }
    _write_summary(out_dir, "simulate_summary.json", summary)
    return summary


def run_calibrate(config, out_dir, seed):
    target = _require(config, "target", str, "calibrate")
    summary = {"config_hash": _config_hash(config), "seed": seed, "target": target}
    if target == "merton":
        result = merton_calibrate(
            float(_require(config, "equity", (int, float), "calibrate")),
            float(_require(config, "sigma_equity", (int, float), "calibrate")),
            float(_require(config, "liability", (int, float), "calibrate")),
            float(_require(config, "rate", (int, float), "calibrate")),
            float(_require(config, "horizon", (int, float), "calibrate")),
        )
        inputs = MertonStructuralInputs(
            result.asset_value,
            float(config["liability"]),
            float(config["rate"]),
            result.sigma_assets,
            float(config["horizon"]),
            drift_assets=float(config["rate"]),
        )
        dd, pd = merton_default_metrics(inputs)
        summary["merton"] = {
            "asset_value": result.asset_value,
            "sigma_assets": result.sigma_assets,
            "residual": result.residual,
            "distance_to_default": dd,
            "default_probability": pd,
        }
    elif target == "jy-theta":
        params = data_io.load_jy_params(
            _require(config, "jy_params", str, "calibrate")
        )
        kind = config.get("curve_kind", KIND_NOMINAL)
        curve = data_io.load_curve_csv(
            _require(config, "curve_csv", str, "calibrate"), kind
        )
        params = jy.theta_fit(params, curve)
        theta = params.theta_n if kind == KIND_NOMINAL else params.theta_r
        _write_csv(
            out_dir,
            f"theta_{kind}.csv",
            ["node_time", "theta"],
            [[_fmt(t), _fmt(v)] for t, v in zip(theta.times, theta.values)],
        )
        state = jy.JyState(0.0, curve.forward_at(0.0), curve.forward_at(0.0), 1.0)
        errors = [
            abs(
                jy.zcb_reconstitution(params, curve, state, t)
                - curve.discount_factor(0.0, t)
            )
            for t in curve.node_times
        ]
        summary["jy_theta"] = {"kind": kind, "max_reprice_error": max(errors)}
    elif target == "rpks":
        nominal = data_io.load_curve_csv(
            _require(config, "nominal_curve_csv", str, "calibrate"), KIND_NOMINAL
        )
        real = data_io.load_curve_csv(
            _require(config, "real_curve_csv", str, "calibrate"), KIND_REAL
        )
        params = rational.fit_shape_functions(
            nominal,
            real,
            float(_require(config, "b_r", (int, float), "calibrate")),
            float(_require(config, "sigma_r", (int, float), "calibrate")),
            float(_require(config, "sigma_s", (int, float), "calibrate")),
            float(_require(config, "rho_rs", (int, float), "calibrate")),
        )
        grid = np.union1d(nominal.node_times, real.node_times)
        rows = [
            [_fmt(t), _fmt(params.shape_r(t)), _fmt(params.shape_s(t))]
            for t in grid
        ]
        _write_csv(out_dir, "rpks_fit.csv", ["time", "shape_r", "shape_s"], rows)
        state = rational.MartingaleState(0.0, 1.0, 1.0)
        errors = [
            abs(
                rational.nominal_bond(params, state, t)
                - nominal.discount_factor(0.0, t)
            )
            for t in grid
        ]
        summary["rpks"] = {"max_nominal_reprice_error": max(errors)}
    elif target == "ho-lee":
        curve = data_io.load_curve_csv(
            _require(config, "curve_csv", str, "calibrate"), KIND_NOMINAL
        )
        spec = HoLeeTreeSpec(
            sigma=float(_require(config, "sigma", (int, float), "calibrate")),
            dt=float(_require(config, "dt", (int, float), "calibrate")),
            target_curve=curve,
            horizon_steps=int(_require(config, "horizon_steps", int, "calibrate")),
        )
        tree = ho_lee_calibrate(spec)
        _write_csv(
            out_dir,
            "ho_lee_tree.csv",
            ["step", "node", "rate_or_price", "arrow_debreu"],
            [[k, j, _fmt(r), _fmt(q)] for k, j, r, q in tree.dump_rows()],
        )
        errors = [
            abs(tree.discount_factor(k) - curve.discount_factor(0.0, k * spec.dt))
            for k in range(1, spec.horizon_steps + 1)
        ]
        summary["ho_lee"] = {"max_reprice_error": max(errors)}
    else:
        raise ParseError(
            f"calibrate: unknown target {target!r}; expected merton, jy-theta, "
            "rpks or ho-lee"
        )
    _write_summary(out_dir, "calibrate_summary.json", summary)
    return summary


def run_converge(config, out_dir, seed):
    mu = float(config.get("mu", 0.05))
    sigma = float(config.get("sigma", 0.2))
    x0 = float(config.get("x0", 1.0))
    horizon = float(config.get("horizon", 1.0))
    levels = config.get("levels", [8, 16, 32, 64, 128])
    n_paths = int(config.get("n_paths", 10_000))
    spec = gbm_spec(mu, sigma)
    rows = []
    slopes = {}
    for scheme in ("euler", "milstein"):
        result = strong_convergence_order(
            spec, scheme, levels, x0=x0, horizon=horizon, n_paths=n_paths, seed=seed
        )
        slopes[scheme] = result.slope
        for dt, err in zip(result.dts, result.errors):
            rows.append([scheme, _fmt(dt), _fmt(err)])
    _write_csv(out_dir, "convergence.csv", ["scheme", "dt", "mean_abs_error"], rows)
    summary = {
        "config_hash": _config_hash(config),
        "seed": seed,
        "slopes": slopes,
        "n_paths": n_paths,
    }
    _write_summary(out_dir, "converge_summary.json", summary)
    return summary


_RUNNERS = {
    "bootstrap": run_bootstrap,
    "price": run_price,
    "simulate": run_simulate,
    "calibrate": run_calibrate,
    "converge": run_converge,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="inflakit",
        description="Inflation-linked pricing pipelines (config-driven).",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name, help=f"run the {name} pipeline")
        cmd.add_argument("--config", required=True, help="JSON config file")
        cmd.add_argument("--out", default=".", help="output directory")
        cmd.add_argument("--seed", type=int, default=None,
                         help="override the config seed")
    return parser


def run_pipeline(command, config, out_dir=".", seed=None):
    """Execute one pipeline; returns the summary that was written."""
    if command not in _RUNNERS:
        raise ParseError(f"unknown command {command!r}")
    if seed is None:
        seed = int(config.get("seed", 0))
    os.makedirs(out_dir, exist_ok=True)
    return _RUNNERS[command](config, out_dir, seed)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        with open(args.config) as handle:
            config = json.load(handle)
    except OSError as exc:
        print(f"error [{args.command}]: cannot read config: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(
            f"error [{args.command}]: config line {exc.lineno}: {exc.msg}",
            file=sys.stderr,
        )
        return 2
    if not isinstance(config, dict):
        print(f"error [{args.command}]: config must be a JSON object", file=sys.stderr)
        return 2
    try:
        summary = run_pipeline(args.command, config, args.out, args.seed)
    except InflakitError as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return exc.exit_code
    print(json.dumps(summary, sort_keys=True, indent=2))
    return 0


if __name__ == "__main__":
    sys.exit(main())
