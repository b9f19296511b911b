"""Batch command-line interface.

Subcommands: validate, pig-sample, fit-dirichlet, fit-gamma-shape, predict.
Flag precedence: command line > config file (--config, flat key=value) >
built-in defaults. No environment variables are consulted. Exit codes:
0 success / all checks pass, 1 validation failure, 2 usage or config error,
3 I/O or parse error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .chain import ChainConfig, PosteriorSamples
from .dirichlet import (AlphaPrior, posterior_predictive, run_chain,
                        run_chain_homogeneous)
from .gammashape import (GammaShapePrior, run_shape_chain, shape_posterior_grid,
                         shape_posterior_quadrature)
from .io import (ParseError, parse_counts_csv, parse_reals_csv,
                 read_samples_csv, write_long_csv, write_samples_csv,
                 write_summary_json)
from .pig import (PigParams, PigSamplerConfig, mc_transform,
                  pig_laplace_closed, pig_laplace_product, pig_sample)
from .rng import GigParams, child_rng, gig_sample, make_rng, truncated_normal_sample
from .special import log_bessel_k
from .summarize import summarize_samples

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_IO = 3

# tilt/argument grid for the transform checks in `validate`
VALIDATE_TILTS = (0.0, 1.0, float(np.sqrt(2.0)), 3.0)
VALIDATE_TS = (0.5, 1.0, 2.0)
TRANSFORM_BIAS_ALLOWANCE = 1e-3


class ConfigError(ValueError):
    """Bad flag combination or config-file value."""


def _read_config_file(path):
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                text = line.strip()
                if not text or text.startswith("#"):
                    continue
                if "=" not in text:
                    raise ConfigError(f"{path}:{line_no}: expected key=value")
                key, _, value = text.partition("=")
                out[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise ParseError(f"cannot read config file: {exc}") from None
    return out


def _coerce(raw, like):
    if isinstance(like, bool):
        lowered = raw.lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"expected a boolean, got {raw!r}")
    if isinstance(like, int):
        return int(raw)
    if isinstance(like, float):
        return float(raw)
    return raw


def _resolve(args, defaults):
    """Apply precedence: explicit flag > config file > default."""
    file_cfg = _read_config_file(args.config) if getattr(args, "config", None) else {}
    resolved = {}
    for key, default in defaults.items():
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            resolved[key] = flag_value
        elif key in file_cfg:
            try:
                resolved[key] = _coerce(file_cfg[key], default)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"config key {key}: {exc}") from None
        else:
            resolved[key] = default
    unknown = set(file_cfg) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return resolved


def _ensure_outdir(path):
    os.makedirs(path, exist_ok=True)
    return path


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

def _check_rows_transform(n_draws, trunc, rng):
    rows = []
    config = PigSamplerConfig(trunc_terms=trunc)
    for c in VALIDATE_TILTS:
        params = PigParams.integer(c=c)
        draws = pig_sample(params, config, rng, size=n_draws)
        for t in VALIDATE_TS:
            mc, se = mc_transform(draws, t)
            truth = pig_laplace_closed(params, t)
            tol = 3.0 * se + TRANSFORM_BIAS_ALLOWANCE
            rows.append((f"mc-transform c={c:.4f} t={t:.2f}", mc, truth, tol))
    return rows


def _check_rows_product(trunc_product=10**6):
    rows = []
    for c in VALIDATE_TILTS:
        params = PigParams.integer(c=c)
        for t in VALIDATE_TS:
            log_prod = np.log(pig_laplace_product(params, t, trunc_product))
            log_closed = np.log(pig_laplace_closed(params, t))
            rows.append((f"log-product c={c:.4f} t={t:.2f}",
                         log_prod, log_closed, 1e-4))
    return rows


def _check_rows_gig(n_draws, rng):
    rows = []
    for order, chi, tilt in ((-1.5, 1.0, 1.0), (-1.5, 0.5, 2.0),
                             (-0.5, 2.0, 1.0), (2.0, 1.0, 1.5)):
        draws = gig_sample(GigParams(order, chi, tilt), rng, size=n_draws)
        truth = (chi / tilt) * np.exp(
            log_bessel_k(order + 1.0, chi * tilt) - log_bessel_k(order, chi * tilt))
        se = draws.std(ddof=1) / np.sqrt(n_draws)
        rows.append((f"gig-mean nu={order:.1f} chi={chi:.1f} tilt={tilt:.1f}",
                     float(draws.mean()), float(truth), 4.0 * se))
    return rows


def _check_rows_truncnorm(n_draws, rng):
    tau = np.sqrt(np.pi / 2.0) / 6.0
    draws = truncated_normal_sample(0.0, tau * tau, 0.0, rng, size=n_draws)
    se = draws.std(ddof=1) / np.sqrt(n_draws)
    return [("truncnorm-prior-mean K=6", float(draws.mean()), 1.0 / 6.0, 4.0 * se)]


def cmd_validate(args):
    cfg = _resolve(args, {"draws": 50_000, "seed": 0, "trunc": 1000})
    if cfg["draws"] < 100:
        raise ConfigError("--draws must be at least 100")
    rng = make_rng(cfg["seed"])
    rows = []
    rows += _check_rows_transform(cfg["draws"], cfg["trunc"], rng)
    rows += _check_rows_product()
    rows += _check_rows_gig(cfg["draws"], rng)
    rows += _check_rows_truncnorm(cfg["draws"], rng)

    width = max(len(r[0]) for r in rows)
    print(f"{'check':<{width}}  {'statistic':>12}  {'truth':>12}  "
          f"{'tolerance':>12}  status")
    failures = 0
    for name, stat, truth, tol in rows:
        ok = abs(stat - truth) <= tol
        failures += not ok
        print(f"{name:<{width}}  {stat:12.6f}  {truth:12.6f}  {tol:12.6f}  "
              f"{'PASS' if ok else 'FAIL'}")
    print(f"{len(rows) - failures}/{len(rows)} checks passed "
          f"(draws={cfg['draws']}, trunc={cfg['trunc']}, seed={cfg['seed']})")
    return EXIT_OK if failures == 0 else EXIT_VALIDATION


# ---------------------------------------------------------------------------
# pig-sample
# ---------------------------------------------------------------------------

def cmd_pig_sample(args):
    cfg = _resolve(args, {"n": 10_000, "c": 0.0, "rule": "integer",
                          "shift": 1.0, "trunc": 1000, "seed": 0, "out": "."})
    if cfg["rule"] == "integer":
        params = PigParams.integer(c=cfg["c"])
    elif cfg["rule"] == "shifted":
        params = PigParams.shifted(cfg["shift"], c=cfg["c"])
    else:
        raise ConfigError("--rule must be integer or shifted")
    if cfg["n"] < 1:
        raise ConfigError("--n must be >= 1")
    rng = make_rng(cfg["seed"])
    draws = pig_sample(params, PigSamplerConfig(trunc_terms=cfg["trunc"]),
                       rng, size=cfg["n"])
    out = os.path.join(_ensure_outdir(cfg["out"]), "pig_samples.csv")
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("value\n")
        for v in draws:
            fh.write(f"{v:.17g}\n")
    print(f"wrote {cfg['n']} draws to {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# fit-dirichlet / fit-gamma-shape
# ---------------------------------------------------------------------------

def _pooled_samples(runs):
    first = runs[0]
    if len(runs) == 1:
        return first
    draws = np.vstack([r.draws for r in runs])
    iters = np.concatenate([r.iters for r in runs])
    meta = dict(first.meta)
    meta["chains"] = len(runs)
    meta["chain_sizes"] = [int(r.size) for r in runs]
    first.draws, first.iters, first.meta = draws, iters, meta
    return first


def cmd_fit_dirichlet(args):
    cfg = _resolve(args, {
        "data": "", "id_cols": 1, "iters": 4000, "burnin": 1000, "thin": 2,
        "seed": 1, "tau": 0.0, "mean_alpha": 0.0, "trunc": 200,
        "homogeneous": False, "chains": 1, "out": ".",
    })
    if not cfg["data"]:
        raise ConfigError("--data is required")
    if cfg["tau"] and cfg["mean_alpha"]:
        raise ConfigError("--tau and --mean-alpha are mutually exclusive")
    counts = parse_counts_csv(cfg["data"], id_cols=cfg["id_cols"])
    if cfg["tau"]:
        prior = AlphaPrior(tau=cfg["tau"])
    elif cfg["mean_alpha"]:
        prior = AlphaPrior.from_mean(cfg["mean_alpha"])
    else:
        prior = AlphaPrior.for_categories(counts.n_categories)
    chain_config = ChainConfig(
        iterations=cfg["iters"], burn_in=cfg["burnin"], thin=cfg["thin"],
        seed=cfg["seed"], pig_config=PigSamplerConfig(trunc_terms=cfg["trunc"]),
        homogeneous=cfg["homogeneous"])
    runner = run_chain_homogeneous if cfg["homogeneous"] else run_chain
    if cfg["chains"] < 1:
        raise ConfigError("--chains must be >= 1")
    if cfg["chains"] == 1:
        runs = [runner(counts, prior, chain_config)]
    else:
        runs = [runner(counts, prior, chain_config,
                       rng=child_rng(cfg["seed"], chain))
                for chain in range(cfg["chains"])]
    samples = _pooled_samples(runs)
    samples.meta["prior_tau"] = list(prior.tau_vector(counts.n_categories))
    samples.meta.pop("wall_time_s", None)  # keep outputs byte-identical

    outdir = _ensure_outdir(cfg["out"])
    write_samples_csv(os.path.join(outdir, "samples.csv"), samples)
    write_summary_json(os.path.join(outdir, "summary.json"),
                       summarize_samples(samples), samples.meta)
    write_long_csv(os.path.join(outdir, "plot_data.csv"), ("parameter", "value"),
                   ((samples.names[j], samples.draws[i, j])
                    for i in range(samples.size) for j in range(len(samples.names))))
    print(f"wrote samples.csv, summary.json, plot_data.csv to {outdir}")
    return EXIT_OK


def cmd_fit_gamma_shape(args):
    cfg = _resolve(args, {
        "data": "", "beta": 0.0, "prior_a": 1.0, "prior_b": 1, "prior_c": 0.0,
        "iters": 6000, "burnin": 1000, "thin": 10, "seed": 1, "trunc": 200,
        "out": ".",
    })
    if not cfg["data"]:
        raise ConfigError("--data is required")
    if cfg["beta"] <= 0:
        raise ConfigError("--beta (known rate) must be positive")
    y = parse_reals_csv(cfg["data"])
    prior = GammaShapePrior(a=cfg["prior_a"], b=cfg["prior_b"],
                            c=cfg["prior_c"], beta=cfg["beta"])
    chain_config = ChainConfig(
        iterations=cfg["iters"], burn_in=cfg["burnin"], thin=cfg["thin"],
        seed=cfg["seed"], pig_config=PigSamplerConfig(trunc_terms=cfg["trunc"]))
    samples = run_shape_chain(y, prior, chain_config)
    samples.meta.pop("wall_time_s", None)

    grid = shape_posterior_grid(y, prior)
    density = shape_posterior_quadrature(y, prior, grid)
    mean = float(np.trapezoid(grid * density, grid))
    sd = float(np.sqrt(np.trapezoid((grid - mean) ** 2 * density, grid)))
    samples.meta["oracle"] = {"quadrature_mean": mean, "quadrature_sd": sd}

    outdir = _ensure_outdir(cfg["out"])
    write_samples_csv(os.path.join(outdir, "samples.csv"), samples)
    write_summary_json(os.path.join(outdir, "summary.json"),
                       summarize_samples(samples), samples.meta)
    write_long_csv(os.path.join(outdir, "plot_data.csv"), ("parameter", "value"),
                   (("alpha", v) for v in samples.draws[:, 0]))
    print(f"wrote samples.csv, summary.json, plot_data.csv to {outdir}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# predict
# ---------------------------------------------------------------------------

def cmd_predict(args):
    cfg = _resolve(args, {"samples": "", "draws_per_sample": 1, "seed": 1,
                          "out": "."})
    if not cfg["samples"]:
        raise ConfigError("--samples is required")
    if cfg["draws_per_sample"] < 1:
        raise ConfigError("--draws-per-sample must be >= 1")
    _, draws, names = read_samples_csv(cfg["samples"])
    if draws.shape[1] < 2:
        raise ConfigError("predictive draws need K >= 2 concentration columns")
    if np.any(draws <= 0):
        raise ParseError(f"{cfg['samples']}: concentration samples must be "
                         "positive")
    samples = PosteriorSamples(draws, names, np.arange(1, draws.shape[0] + 1),
                               meta={})
    rng = make_rng(cfg["seed"])
    sims = posterior_predictive(samples, cfg["draws_per_sample"], rng)
    outdir = _ensure_outdir(cfg["out"])
    out = os.path.join(outdir, "predictive.csv")
    write_long_csv(out, ("category", "value"),
                   ((names[j], sims[i, j])
                    for i in range(sims.shape[0]) for j in range(len(names))))
    print(f"wrote {sims.shape[0]} simplex draws to {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser plumbing
# ---------------------------------------------------------------------------

def _add_common(sub):
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--trunc", type=int, default=None,
                     help="series truncation for the P-IG sampler")
    sub.add_argument("--out", type=str, default=None, help="output directory")
    sub.add_argument("--config", type=str, default=None,
                     help="flat key=value config file (flags take precedence)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="polyaig",
        description="Polya-inverse Gamma random variates and Gibbs samplers "
                    "for Dirichlet concentration and gamma shape inference.")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("validate", help="run the built-in oracle checks")
    p.add_argument("--draws", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_validate)

    p = subs.add_parser("pig-sample", help="draw from P-IG(d, c)")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--c", type=float, default=None, help="tilt parameter")
    p.add_argument("--rule", type=str, default=None,
                   choices=("integer", "shifted"))
    p.add_argument("--shift", type=float, default=None,
                   help="ladder start for the shifted rule")
    _add_common(p)
    p.set_defaults(func=cmd_pig_sample)

    p = subs.add_parser("fit-dirichlet",
                        help="posterior of Dirichlet concentrations from counts")
    p.add_argument("--data", type=str, default=None)
    p.add_argument("--id-cols", dest="id_cols", type=int, default=None)
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--burnin", type=int, default=None)
    p.add_argument("--thin", type=int, default=None)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--mean-alpha", dest="mean_alpha", type=float, default=None,
                   help="prior mean for each alpha_k (maps to tau)")
    p.add_argument("--homogeneous", action="store_const", const=True,
                   default=None, help="single shared alpha")
    p.add_argument("--chains", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_fit_dirichlet)

    p = subs.add_parser("fit-gamma-shape",
                        help="posterior of the gamma shape from observations")
    p.add_argument("--data", type=str, default=None)
    p.add_argument("--beta", type=float, default=None, help="known rate")
    p.add_argument("--prior-a", dest="prior_a", type=float, default=None)
    p.add_argument("--prior-b", dest="prior_b", type=int, default=None)
    p.add_argument("--prior-c", dest="prior_c", type=float, default=None)
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--burnin", type=int, default=None)
    p.add_argument("--thin", type=int, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_fit_gamma_shape)

    p = subs.add_parser("predict",
                        help="posterior-predictive simplex draws from samples")
    p.add_argument("--samples", type=str, default=None)
    p.add_argument("--draws-per-sample", dest="draws_per_sample", type=int,
                   default=None)
    _add_common(p)
    p.set_defaults(func=cmd_predict)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
