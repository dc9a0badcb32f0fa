"""Command-line front end.

``twophotons <command> --config <path|fixture> [--set key=value ...] --out <path>
[--workers N] [--grid min:max:count[,min:max:count]]``

Configuration errors exit with status 1 and numerical failures with 2.
Outputs are written atomically next to a JSON sidecar.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .config import COMMANDS, ConfigError, RunConfig, parse_config
from .models import (
    CavityParams,
    RFParams,
    SensorConfig,
    UnstableModelError,
    attach_sensors,
    homodyne,
    resonance_fluorescence,
    squeezed_cavity,
)
from .spectra import rf_moments, cavity_moments, spectrum_numeric
from .steadystate import SteadyStateError

log = logging.getLogger("twophotons")

MAP_HEADER = ("varpi1", "varpi2", "g2", "I0", "I1", "I2", "R", "B", "S")
MAP_CHANNELS = {
    "g2map": ("g2",),
    "decompose": ("g2", "I0", "I1", "I2"),
    "quantifiers": ("g2", "R", "B", "S"),
}


class NumericalFailure(RuntimeError):
    pass


def fmt(x) -> str:
    """12 significant digits; missing values are empty."""
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return ""
    return f"{x:.12g}"


def atomic_write(path: Path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def build_model(cfg: RunConfig, *, sensors: bool = True, levels: int | None = None):
    """Physical model from the configuration, homodyned and sensor-augmented as requested."""
    g = cfg.get
    if cfg.model == "rf":
        p = RFParams(g("delta_sigma"), g("omega_sigma"), g("gamma_sigma"))
        m = resonance_fluorescence(p)
        decay = p.gamma_sigma
        coherent = rf_moments(p)[0]
    else:
        p = CavityParams.from_ratio(g("delta_a"), g("lambda"), g("gamma_a"),
                                    omega_a=cfg.params.get("omega_a"),
                                    theta_drive=cfg.params.get("theta_drive"), n_max=g("n_max"))
        m = squeezed_cavity(p)
        decay = p.gamma_a
        coherent = cavity_moments(p)[0]
    F = g("homodyne_f")
    if F:
        m = homodyne(m, -F * coherent)
    if not sensors:
        return m
    G = g("big_gamma")
    eps = cfg.params.get("epsilon", 1e-3 * max(decay, G))
    lv = levels or cfg.params.get("sensor_levels", 2)
    return attach_sensors(m, SensorConfig(0.0, 0.0, G, eps, lv))


def _metadata(cfg: RunConfig, extra: dict) -> dict:
    return {
        "command": cfg.command,
        "version": __version__,
        "source": cfg.source,
        "overrides": cfg.sets,
        "model": cfg.model,
        "parameters": cfg.params,
        "grid": [list(a) for a in cfg.grid.axes] if cfg.grid else None,
        "workers": cfg.workers,
        **extra,
    }


def run_spectrum(cfg: RunConfig):
    from .twophoton import frequency_scale

    m = build_model(cfg)
    axis = cfg.grid.axes[0] if cfg.grid else (-2.5, 2.5, 201)
    grid = np.linspace(*axis[:2], axis[2])
    scale = frequency_scale(m)
    samples = spectrum_numeric(m, grid, scale=scale, method=cfg.get("spectrum_method"))
    rows = [(fmt(s.varpi), fmt(s.omega), fmt(s.value)) for s in samples]
    return _csv(("varpi", "omega", "S"), rows), {"scale": scale, "points": len(rows)}


def run_map(cfg: RunConfig):
    from .twophoton import LandscapeError, g2_landscape

    channels = MAP_CHANNELS[cfg.command]
    m = build_model(cfg)
    grid = cfg.grid.pair() if cfg.grid else None
    try:
        land = g2_landscape(m, grid, channels=channels, workers=cfg.workers)
    except LandscapeError as exc:
        for i, j, msg in exc.failures:
            print(f"point ({i}, {j}) failed: {msg}", file=sys.stderr)
        raise NumericalFailure(str(exc)) from exc
    rows = []
    for i, x in enumerate(land.varpi1):
        for j, y in enumerate(land.varpi2):
            vals = {c: land.channels[c][i, j] for c in channels}
            rows.append([fmt(x), fmt(y)] + [fmt(vals.get(c)) for c in MAP_HEADER[2:]])
    meta = dict(land.metadata)
    meta.pop("params", None)
    meta["missing_points"] = land.missing
    return _csv(MAP_HEADER, rows), meta


def run_g2tau(cfg: RunConfig):
    from .twophoton import frequency_scale, g2_tau, g2_unfiltered_tau

    taus = np.linspace(0.0, cfg.get("tau_max"), cfg.get("tau_count"))
    if cfg.get("filtered"):
        m = build_model(cfg)
        scale = frequency_scale(m)
        from .models import with_sensors

        m = with_sensors(m, omega_1=cfg.get("varpi1") * scale, omega_2=cfg.get("varpi2") * scale)
        values = g2_tau(m, taus)
        meta = {"filtered": True, "scale": scale}
    else:
        values = g2_unfiltered_tau(build_model(cfg, sensors=False), taus)
        meta = {"filtered": False}
    rows = [(fmt(t), fmt(v)) for t, v in zip(taus, values)]
    return _csv(("tau", "g2"), rows), meta


def run_gaussian_check(cfg: RunConfig):
    from .gaussian import convergence_table, random_params

    rng = np.random.default_rng(cfg.get("seed"))
    e0 = cfg.get("eps_max")
    eps = [e0, e0 / 2, e0 / 4]
    rows, ratios = [], []
    for k in range(cfg.get("draws")):
        p = random_params(rng, e0)
        table = convergence_table(p, eps, cfg.get("gaussian_n_max"))
        for r in table:
            rows.append((k, fmt(r.epsilon), fmt(r.discrepancy), fmt(r.ratio)))
        ratios.append(table[1].ratio)
    ratios = np.array(ratios)
    inside = int(((ratios >= 3.5) & (ratios <= 4.5)).sum())
    meta = {"ratio_min": float(ratios.min()), "ratio_max": float(ratios.max()),
            "draws_in_band": inside, "draws": len(ratios)}
    return _csv(("draw", "epsilon", "discrepancy", "ratio"), rows), meta


RUNNERS = {
    "spectrum": run_spectrum,
    "g2map": run_map,
    "decompose": run_map,
    "quantifiers": run_map,
    "g2tau": run_g2tau,
    "gaussian-check": run_gaussian_check,
}


def run(cfg: RunConfig) -> int:
    text, extra = RUNNERS[cfg.command](cfg)
    out = cfg.out
    atomic_write(out, text)
    atomic_write(out.with_name(out.name + ".json"),
                 json.dumps(_metadata(cfg, extra), indent=2, sort_keys=True, default=str) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="twophotons", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="config file or fixture name (fig2a, fig2b, fig2f, fig3a, fig3b)")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", dest="sets")
    ap.add_argument("--out", required=True)
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--grid", default=None, help="min:max:count[,min:max:count] in normalized units")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    workers = args.workers if args.workers is not None else (os.cpu_count() or 1)
    try:
        cfg = parse_config(args.command, args.config, args.sets, grid=args.grid,
                           out=args.out, workers=workers)
        return run(cfg)
    except (ConfigError, UnstableModelError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (NumericalFailure, SteadyStateError, ArithmeticError, RuntimeError,
            np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
