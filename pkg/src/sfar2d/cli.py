"""
Command-line driver.

    sfar2d synth CONFIG [--out DIR]
    sfar2d reconstruct CONFIG [--out DIR] [--ratio R] [--seed S] [--variant V] [--p-fix P]
    sfar2d validate [CONFIG] --out DIR [--seed S] [--p-fix P] [--trials T]
    sfar2d sweep CONFIG [--out DIR] [--ratios R1,R2,...]

Exit codes: 0 success, 1 quality failure (non-converged run, missed
components, band violation), 2 usage, config or IO error. Outputs go to an
existing directory; timestamps only ever reach ``run.log``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import export
from .montecarlo import (
    RandomModelSpec,
    TrialConfig,
    coverage_experiment,
    recovery_experiment,
    recovery_sweep,
    variance_experiment,
)
from .recon import ReconParams, reconstruct_field, sfar2d_iterative, sfar2d_single
from .sampling import SampleSupport, extract, samples_for_ratio, uniform_support
from .signal_model import (
    GridDims,
    NoiseParams,
    SignalModel,
    add_external_noise,
    mixed_model,
    synthesize,
)
from .spectral import full_dft

log = logging.getLogger("sfar2d")


class ConfigError(Exception):
    pass


EXAMPLE1_GROUPS = [{"k": 12, "amp_min": 2.0, "amp_max": 3.0}]

DEFAULT_SUITE = {
    "experiments": [
        {
            "name": "variance_16x16_m64",
            "kind": "variance",
            "nx": 16,
            "ny": 16,
            "model": {"nx": 16, "ny": 16, "components": [{"amp": 1.0, "kx": 3, "ky": 5}]},
            "ratio": 0.25,
            "trials": 2000,
            "seed": 0,
            "bands": {"variance_ratio": [0.93, 1.07]},
        },
        {
            "name": "coverage_32x32_p099",
            "kind": "coverage",
            "nx": 32,
            "ny": 32,
            "random_model": {"groups": [{"k": 3, "amp_min": 1.0, "amp_max": 1.0}]},
            "ratio": 0.25,
            "p_fix": 0.99,
            "trials": 2000,
            "seed": 0,
            "bands": {"coverage": [0.96, 1.0]},
        },
        {
            "name": "coverage_32x32_p050",
            "kind": "coverage",
            "nx": 32,
            "ny": 32,
            "random_model": {"groups": [{"k": 3, "amp_min": 1.0, "amp_max": 1.0}]},
            "ratio": 0.25,
            "p_fix": 0.5,
            "trials": 2000,
            "seed": 0,
            "bands": {"coverage": [0.40, 0.60]},
        },
        {
            "name": "example1_recovery",
            "kind": "recovery",
            "nx": 128,
            "ny": 128,
            "random_model": {"groups": EXAMPLE1_GROUPS},
            "ratio": 0.09,
            "trials": 20,
            "seed": 0,
            "bands": {"full_detection_rate": [0.9, 1.0]},
        },
    ]
}


# ---------------------------------------------------------------- config


def _load_json(path: Path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as e:
        raise ConfigError(f"file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON in {path}: {e}") from e


def _resolve(base: Path, ref: str) -> Path:
    p = Path(ref)
    return p if p.is_absolute() else base / p


def _groups(spec: dict) -> list[tuple[int, float, float]]:
    if "groups" in spec:
        return [(int(g["k"]), float(g["amp_min"]), float(g["amp_max"])) for g in spec["groups"]]
    return [(int(spec["k"]), float(spec["amp_min"]), float(spec["amp_max"]))]


def load_model(section: dict, base: Path) -> SignalModel:
    """Inline model, ``{"file": path}`` or ``{"random": {...}}``."""
    try:
        if "file" in section:
            return SignalModel.from_dict(_load_json(_resolve(base, section["file"])))
        if "random" in section:
            r = section["random"]
            return mixed_model(GridDims(r["nx"], r["ny"]), _groups(r), int(r.get("seed", 0)))
        return SignalModel.from_dict(section)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"invalid model: {e}") from e


def load_support(section: dict, dims: GridDims, base: Path, ratio=None, seed=None) -> SampleSupport:
    try:
        if "file" in section and ratio is None:
            sup = SampleSupport.from_dict(_load_json(_resolve(base, section["file"])))
            if sup.dims != dims:
                raise ConfigError("support grid differs from model grid")
            return sup
        r = float(ratio if ratio is not None else section["ratio"])
        s = int(seed if seed is not None else section.get("seed", 0))
        return uniform_support(dims, samples_for_ratio(dims, r), s)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"invalid sampling section: {e}") from e


def _output_dir(args, cfg: dict) -> Path:
    out = args.out or cfg.get("output_dir")
    if out is None:
        raise ConfigError("no output directory given (--out or output_dir)")
    out = Path(out)
    if not out.is_dir():
        raise ConfigError(f"output directory does not exist: {out}")
    return out


def _exports(cfg: dict) -> dict:
    flags = {"csv": True, "pgm": True, "json": True}
    flags.update(cfg.get("export", {}))
    return flags


def _setup_log(out: Path) -> None:
    handler = logging.FileHandler(out / "run.log", mode="w")
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(logging.INFO)
    log.propagate = False


# ---------------------------------------------------------------- commands


def _write_image(out: Path, stem: str, values: np.ndarray, flags: dict) -> None:
    # a PGM never goes out without the CSV holding its numbers
    if flags["pgm"]:
        export.write_pgm(out / f"{stem}.pgm", values)
    if flags["csv"] or flags["pgm"]:
        export.write_magnitude_csv(out / f"{stem}.csv", values)


def cmd_synth(args) -> int:
    cfg = _load_json(args.config)
    base = Path(args.config).parent
    if "model" not in cfg:
        raise ConfigError("config has no model section")
    model = load_model(cfg["model"], base)
    out = _output_dir(args, cfg)
    _setup_log(out)
    flags = _exports(cfg)
    fld = synthesize(model)
    noise = cfg.get("noise", {})
    if noise.get("sigma_eps_sample", 0):
        fld = add_external_noise(fld, NoiseParams(float(noise["sigma_eps_sample"]), int(noise.get("seed", 0))))
    if flags["json"]:
        export.write_json(out / "model.json", model.to_dict())
    _write_image(out, "field", fld.values, flags)
    _write_image(out, "spectrum", full_dft(fld).values, flags)
    log.info("synthesized %d components on %dx%d", model.k, model.dims.nx, model.dims.ny)
    return 0


def _metrics(model: SignalModel, result, clean) -> dict:
    truth = {(c.kx, c.ky) for c in model.components}
    found = result.support.as_set()
    tp = len(found & truth)
    rec = reconstruct_field(result).values
    nmse = float(np.sum(np.abs(rec - clean.values) ** 2) / np.sum(np.abs(clean.values) ** 2))
    return {
        "k_true": len(truth),
        "k_detected": len(found),
        "precision": tp / len(found) if found else 0.0,
        "recall": tp / len(truth),
        "nmse": nmse,
        "iterations": len(result.iterations),
        "converged": int(result.converged),
    }


def _bins_table(model: SignalModel, result) -> list[dict]:
    truth = {(c.kx, c.ky): c.amplitude for c in model.components}
    got = result.coefficients.as_dict()
    rows = []
    for b in sorted(set(truth) | set(got)):
        c = got.get(b, 0j)
        rows.append(
            {
                "kx": b[0],
                "ky": b[1],
                "true": int(b in truth),
                "detected": int(b in got),
                "true_amplitude": truth.get(b, 0.0),
                "coef_re": c.real,
                "coef_im": c.imag,
                "amplitude_estimate": abs(c) / model.dims.n,
            }
        )
    return rows


def cmd_reconstruct(args) -> int:
    cfg = _load_json(args.config)
    base = Path(args.config).parent
    if "model" not in cfg:
        raise ConfigError("config has no model section")
    model = load_model(cfg["model"], base)
    support = load_support(cfg.get("sampling", {}), model.dims, base, args.ratio, args.seed)
    recon = dict(cfg.get("recon", {}))
    noise = cfg.get("noise", {})
    variant = args.variant or recon.pop("variant", "single")
    recon.pop("variant", None)
    if args.p_fix is not None:
        recon["p_fix"] = args.p_fix
    sigma = float(noise.get("sigma_eps_sample", 0.0))
    try:
        params = ReconParams(sigma_eps_sample=sigma, **recon)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid recon section: {e}") from e
    if variant not in ("single", "iterative"):
        raise ConfigError(f"unknown variant {variant!r}")
    out = _output_dir(args, cfg)
    _setup_log(out)
    flags = _exports(cfg)

    clean = synthesize(model)
    noisy = add_external_noise(clean, NoiseParams(sigma, int(noise.get("seed", 0))))
    meas = extract(noisy, support)
    run = sfar2d_iterative if variant == "iterative" else sfar2d_single
    result = run(meas, params)
    metrics = _metrics(model, result, clean)
    metrics["variant"] = variant
    metrics["m"] = support.m
    metrics["n"] = model.dims.n

    if flags["json"]:
        export.write_json(out / "result.json", result.to_dict())
        export.write_json(out / "support.json", support.to_dict())
        export.write_json(out / "metrics.json", metrics)
    export.write_rows_csv(out / "metrics.csv", [metrics])
    export.write_rows_csv(out / "bins.csv", _bins_table(model, result))
    _write_image(out, "recovered_spectrum", result.spectrum.values, flags)
    log.info("variant=%s m=%d detected=%d recall=%.3f", variant, support.m, metrics["k_detected"], metrics["recall"])
    ok = result.converged and metrics["recall"] == 1.0
    if not ok:
        print(
            f"reconstruction incomplete: converged={result.converged}, recall={metrics['recall']:.3f}",
            file=sys.stderr,
        )
    return 0 if ok else 1


def trial_config(exp: dict, seed=None, p_fix=None, trials=None) -> TrialConfig:
    try:
        dims = GridDims(exp["nx"], exp["ny"])
        if "model" in exp:
            spec = SignalModel.from_dict(exp["model"])
        else:
            spec = RandomModelSpec(tuple(_groups(exp["random_model"])))
        return TrialConfig(
            dims=dims,
            model_spec=spec,
            sampling_ratio=float(exp["ratio"]),
            sigma_eps_sample=float(exp.get("sigma_eps_sample", 0.0)),
            trials=int(trials if trials is not None else exp.get("trials", 100)),
            master_seed=int(seed if seed is not None else exp.get("seed", 0)),
            p_fix=float(p_fix if p_fix is not None else exp.get("p_fix", 0.99)),
            variant=exp.get("variant", "single"),
            max_iterations=int(exp.get("max_iterations", 10)),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"invalid experiment {exp.get('name', '?')}: {e}") from e


RUNNERS = {"variance": variance_experiment, "coverage": coverage_experiment, "recovery": recovery_experiment}


def check_bands(summary: dict, bands: dict) -> list[str]:
    failures = []
    for key, (lo, hi) in bands.items():
        val = summary.get(key)
        if val is None or not (lo <= val <= hi):
            failures.append(f"{key}={val} outside [{lo}, {hi}]")
    return failures


def cmd_validate(args) -> int:
    cfg = _load_json(args.config) if args.config else DEFAULT_SUITE
    out = _output_dir(args, cfg)
    _setup_log(out)
    summaries = []
    failures = []
    for exp in cfg.get("experiments", []):
        name = exp.get("name", exp.get("kind"))
        kind = exp.get("kind")
        if kind not in RUNNERS:
            raise ConfigError(f"unknown experiment kind {kind!r}")
        tc = trial_config(exp, args.seed, args.p_fix, args.trials)
        report = RUNNERS[kind](tc)
        summary = report.summary()
        if kind == "variance":
            summary["variance_ratio"] = report.variance_ratio
        summary = {k: (None if isinstance(v, float) and np.isnan(v) else v) for k, v in summary.items()}
        bad = check_bands(summary, exp.get("bands", {}))
        summary.update(name=name, bands=exp.get("bands", {}), passed=not bad)
        summaries.append(summary)
        failures += [f"{name}: {f}" for f in bad]
        export.write_rows_csv(out / f"{name}.csv", report.records)
        log.info("%s done, %s", name, "pass" if not bad else "FAIL")
    export.write_json(out / "summary.json", {"experiments": summaries, "passed": not failures})
    for f in failures:
        print(f"band violation: {f}", file=sys.stderr)
    return 1 if failures else 0


def cmd_sweep(args) -> int:
    cfg = _load_json(args.config)
    out = _output_dir(args, cfg)
    _setup_log(out)
    ratios = [float(r) for r in args.ratios.split(",")] if args.ratios else cfg.get("ratios")
    if not ratios:
        raise ConfigError("no ratios given")
    tc = trial_config(cfg, args.seed, args.p_fix, args.trials)
    reports = recovery_sweep(tc, ratios)
    rows = [{k: v for k, v in r.summary().items() if k not in ("empirical_variance", "predicted_variance", "coverage")} for r in reports]
    export.write_rows_csv(out / "sweep.csv", rows)
    export.write_json(out / "sweep.json", {"ratios": ratios, "reports": rows})
    log.info("sweep over %d ratios", len(ratios))
    return 0


# ---------------------------------------------------------------- entry


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sfar2d", description="Sparse 2D spectrum recovery from random samples")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="synthesize a field and its spectrum")
    s.add_argument("config")
    s.add_argument("--out")
    s.set_defaults(func=cmd_synth)

    r = sub.add_parser("reconstruct", help="sample a model and reconstruct it")
    r.add_argument("config")
    r.add_argument("--out")
    r.add_argument("--ratio", type=float)
    r.add_argument("--seed", type=int)
    r.add_argument("--variant", choices=["single", "iterative"])
    r.add_argument("--p-fix", type=float)
    r.set_defaults(func=cmd_reconstruct)

    v = sub.add_parser("validate", help="run Monte Carlo checks against tolerance bands")
    v.add_argument("config", nargs="?")
    v.add_argument("--out")
    v.add_argument("--seed", type=int)
    v.add_argument("--p-fix", type=float)
    v.add_argument("--trials", type=int)
    v.set_defaults(func=cmd_validate)

    w = sub.add_parser("sweep", help="recovery statistics across sampling ratios")
    w.add_argument("config")
    w.add_argument("--out")
    w.add_argument("--ratios")
    w.add_argument("--seed", type=int)
    w.add_argument("--p-fix", type=float)
    w.add_argument("--trials", type=int)
    w.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
