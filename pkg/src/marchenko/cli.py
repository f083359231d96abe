"""Command-line driver: forward tables, inversion, round trips, kernel dumps.

Exit codes: 0 success, 1 round-trip threshold missed (report still
written), 2 usage or input error, 3 numerical failure.

Settings resolve as flags > ``--config`` file (flat ``key = value``) >
built-in defaults.  Every output file starts with the resolved settings.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .forward import MEV_FM2, PotentialModel, parse_potential, s_matrix_curve, truncated
from .inversion import invert
from .kernel import InversionGrid, combine_fm_to_F, compute_fm_table, default_rule
from .numerics import SingularSystemError
from .scattering import SpectralFunction, TailModel, load_table, save_table

log = logging.getLogger("marchenko")

EXIT_OK, EXIT_THRESHOLD, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
COMMANDS = ("forward", "invert", "roundtrip", "kernel-dump")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str = "roundtrip"
    l: int | None = None
    h: float = 0.04
    N: int = 100
    q_max: float = 8.0
    dq: float = 0.05
    ode_step: float = 0.002
    panel_width: float | None = None
    order: int = 8
    seed_index: int | None = None
    pot: str | None = None
    input: str | None = None
    output: str | None = None
    reference: str | None = None
    report: str | None = None
    threads: int = 1
    truncate: bool = True
    r_min: float | None = None
    r_max: float = 3.0
    rms_tol: float | None = None
    max_tol: float | None = None

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if not self.h > 0:
            raise UsageError("h must be positive")
        if self.N < 4:
            raise UsageError("N must be at least 4")
        if self.l is not None and self.l < 0:
            raise UsageError("l must be non-negative")
        if self.command in ("forward", "roundtrip") and self.l is None:
            self.l = 0
        if not self.q_max > 0 or not self.dq > 0:
            raise UsageError("q_max and dq must be positive")
        if not self.ode_step > 0:
            raise UsageError("ode_step must be positive")
        if self.order < 1 or self.threads < 1:
            raise UsageError("order and threads must be positive")
        return self

    @property
    def grid(self) -> InversionGrid:
        return InversionGrid(self.h, self.N)

    @property
    def window(self) -> tuple:
        lo = self.r_min if self.r_min is not None else (0.2 if not self.l else 0.3)
        return (lo, self.r_max)

    def header(self) -> list[str]:
        # settings that shape the numbers; thread count and output paths do not
        items = {k: v for k, v in dataclasses.asdict(self).items() if k not in _NOT_ECHOED}
        return ["config " + " ".join(f"{k}={v}" for k, v in items.items())]


_NOT_ECHOED = ("threads", "output", "report")


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}
# config-file spellings that mirror the command-line flags
_ALIASES = {"qmax": "q_max"}


def _coerce(name: str, text: str):
    kind = str(_FIELDS[name].type)
    if text.lower() in ("none", ""):
        return None
    if kind.startswith("bool"):
        if text.lower() in ("1", "true", "yes", "on"):
            return True
        if text.lower() in ("0", "false", "no", "off"):
            return False
        raise UsageError(f"{name}: expected a boolean, got {text!r}")
    try:
        if kind.startswith("int"):
            return int(text)
        if kind.startswith("float"):
            return float(text)
    except ValueError as exc:
        raise UsageError(f"{name}: {exc}") from exc
    return text


def read_config_file(path) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        key = _ALIASES.get(key, key)
        if not sep or key not in _FIELDS or key == "command":
            raise UsageError(f"{path}:{lineno}: bad config line {raw!r}")
        out[key] = _coerce(key, value.strip())
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="marchenko", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        # defaults are None so that unset flags fall through to the config file
        sp.add_argument("--config", help="flat key=value settings file")
        sp.add_argument("--l", type=int, dest="l")
        sp.add_argument("--h", type=float, dest="h")
        sp.add_argument("--N", type=int, dest="N")
        sp.add_argument("--threads", type=int, default=None,
                        help="worker threads (default $MARCHENKO_THREADS or 1)")
        sp.add_argument("--ode-step", type=float, dest="ode_step")
        sp.add_argument("--panel-width", type=float, dest="panel_width")
        sp.add_argument("--order", type=int, help="Gauss-Legendre nodes per panel")
        sp.add_argument("--seed-index", type=int, dest="seed_index")
        sp.add_argument("--r-min", type=float, dest="r_min", help="comparison window start")
        sp.add_argument("--r-max", type=float, dest="r_max", help="comparison window end")
        sp.add_argument("-v", "--verbose", action="store_true")

    f = sub.add_parser("forward", help="phase-shift table of a model potential")
    common(f)
    f.add_argument("--pot")
    f.add_argument("--qmax", type=float, dest="q_max")
    f.add_argument("--dq", type=float)
    f.add_argument("-o", "--output")

    i = sub.add_parser("invert", help="reconstruct V(r) from a phase-shift table")
    common(i)
    i.add_argument("input", nargs="?")
    i.add_argument("-o", "--output")
    i.add_argument("--reference", help="potential spec to compare against")

    r = sub.add_parser("roundtrip", help="forward, invert and compare")
    common(r)
    r.add_argument("--pot")
    r.add_argument("--qmax", type=float, dest="q_max")
    r.add_argument("--dq", type=float)
    r.add_argument("-o", "--output", help="reconstructed potential CSV")
    r.add_argument("--report", help="JSON report path")
    r.add_argument("--no-truncate", dest="truncate", action="store_const", const=False,
                   help="keep the potential beyond R = N h in the forward data")
    r.add_argument("--rms-tol", type=float, dest="rms_tol")
    r.add_argument("--max-tol", type=float, dest="max_tol")

    k = sub.add_parser("kernel-dump", help="write the f-table and kernel matrix")
    common(k)
    k.add_argument("input", nargs="?")
    k.add_argument("-o", "--output", help="output prefix")
    return p


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    env_threads = os.environ.get("MARCHENKO_THREADS")
    if env_threads:
        values["threads"] = _coerce("threads", env_threads)
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    for name in _FIELDS:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    values["command"] = args.command
    return RunConfig(**values).validate()


def _rule(cfg: RunConfig, Y):
    return default_rule(cfg.grid, Y.anchors, cfg.order, cfg.panel_width)


def _potential(cfg: RunConfig) -> PotentialModel:
    if not cfg.pot:
        raise UsageError("--pot is required")
    return parse_potential(cfg.pot)


def _q_grid(cfg: RunConfig) -> np.ndarray:
    n = int(round(cfg.q_max / cfg.dq))
    return cfg.dq * np.arange(1, n + 1)


def compare(curve, V_ref: PotentialModel, window, R: float) -> dict:
    """RMS/max deviation on ``window``; ``rms_rel`` is relative to max|V_ref| on [0, R]."""
    r = curve.r
    m = (r >= window[0]) & (r <= window[1])
    err = curve.V[m] - V_ref(r[m])
    scale = float(np.max(np.abs(V_ref(np.linspace(0.0, R, 4001), side=1))))
    rms = float(np.sqrt(np.mean(err**2))) if err.size else float("nan")
    mx = float(np.max(np.abs(err))) if err.size else float("nan")
    return {"rms_abs": rms, "rms_rel": rms / scale if scale > 0 else None,
            "max_abs": mx, "max_rel": mx / scale if scale > 0 else None,
            "scale": scale, "r_window": list(window), "points": int(m.sum())}


def cmd_forward(cfg: RunConfig) -> int:
    V = _potential(cfg)
    data = s_matrix_curve(V, cfg.l, _q_grid(cfg), cfg.ode_step)
    alpha = TailModel.matched(data).alpha
    print(f"l={cfg.l} points={len(data.q)} bound_states={len(data.bound_states)} "
          f"delta(q_max)={data.delta[-1]:.6g} alpha={alpha:.6g}")
    for b in data.bound_states:
        print(f"  bound kappa={b.kappa:.10g} M={b.M:.10g} E={b.energy * MEV_FM2:.6g} MeV")
    if cfg.output:
        save_table(data, cfg.output, cfg.header() + [f"potential {V}"])
    return EXIT_OK


def _load_input(cfg: RunConfig):
    if not cfg.input:
        raise UsageError("an input table is required")
    try:
        data = load_table(cfg.input, l=cfg.l)
    except OSError as exc:
        raise UsageError(f"cannot read {cfg.input}: {exc}") from exc
    cfg.l = data.l
    return data


def cmd_invert(cfg: RunConfig) -> int:
    data = _load_input(cfg)
    Y = SpectralFunction(data)
    curve = invert(data, grid=cfg.grid, rule=_rule(cfg, Y), workers=cfg.threads,
                   seed_index=cfg.seed_index)
    curve = dataclasses.replace(curve, header=tuple(cfg.header()))
    if cfg.output:
        curve.save(cfg.output)
    else:
        sys.stdout.write("\n".join(f"{r:.4f},{v:.8g}" for r, v in zip(curve.r, curve.V)) + "\n")
    if cfg.reference:
        stats = compare(curve, parse_potential(cfg.reference), cfg.window, cfg.grid.R)
        print(f"rms_abs={stats['rms_abs']:.6g} max_abs={stats['max_abs']:.6g} "
              f"over r in [{cfg.window[0]}, {cfg.window[1]}] fm")
    return EXIT_OK


def _thresholds(cfg: RunConfig, n_bound: int):
    plain = cfg.l == 0 and n_bound == 0
    rms_tol = cfg.rms_tol if cfg.rms_tol is not None else (0.05 if plain else 0.10)
    max_tol = cfg.max_tol if cfg.max_tol is not None else (0.10 if plain else None)
    return rms_tol, max_tol


def cmd_roundtrip(cfg: RunConfig) -> int:
    V = _potential(cfg)
    V_data = truncated(V, cfg.grid.R) if cfg.truncate else V
    data = s_matrix_curve(V_data, cfg.l, _q_grid(cfg), cfg.ode_step)
    Y = SpectralFunction(data)
    curve = invert(data, grid=cfg.grid, rule=_rule(cfg, Y), workers=cfg.threads,
                   seed_index=cfg.seed_index)
    curve = dataclasses.replace(curve, header=tuple(cfg.header()))
    stats = compare(curve, V, cfg.window, cfg.grid.R)
    rms_tol, max_tol = _thresholds(cfg, len(data.bound_states))
    if stats["rms_rel"] is None:
        ok = stats["rms_abs"] < 1e-6
    else:
        ok = stats["rms_rel"] <= rms_tol and (max_tol is None or stats["max_rel"] <= max_tol)
    report = dict(stats, passed=bool(ok), rms_tol=rms_tol, max_tol=max_tol,
                  bound_states=[[b.kappa, b.M] for b in data.bound_states],
                  params=dataclasses.asdict(cfg))
    text = json.dumps(report, indent=2)
    if cfg.report:
        Path(cfg.report).write_text(text + "\n")
    if cfg.output:
        curve.save(cfg.output)
    print(text)
    return EXIT_OK if ok else EXIT_THRESHOLD


def cmd_kernel_dump(cfg: RunConfig) -> int:
    data = _load_input(cfg)
    Y = SpectralFunction(data)
    grid = cfg.grid
    fm = compute_fm_table(Y, grid, data.l, _rule(cfg, Y), workers=cfg.threads,
                          seed_index=cfg.seed_index)
    F = combine_fm_to_F(fm, grid, data.l)
    prefix = cfg.output or "kernel"
    head = "".join(f"# {h}\n" for h in cfg.header())
    cols = ",".join(f"re_m{m},im_m{m}" for m in range(fm.f.shape[0]))
    rows = [f"{k}," + ",".join(f"{float(c.real)!r},{float(c.imag)!r}" for c in fm.f[:, k])
            for k in range(fm.f.shape[1])]
    Path(f"{prefix}_fm.csv").write_text(head + f"k,{cols}\n" + "\n".join(rows) + "\n")
    rows = [",".join(repr(v) for v in row) for row in F.tolist()]
    Path(f"{prefix}_F.csv").write_text(head + "\n".join(rows) + "\n")
    print(f"wrote {prefix}_fm.csv and {prefix}_F.csv (imag residue {fm.imag_residue:.2e})")
    return EXIT_OK


_DISPATCH = {"forward": cmd_forward, "invert": cmd_invert, "roundtrip": cmd_roundtrip,
             "kernel-dump": cmd_kernel_dump}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        return _DISPATCH[cfg.command](cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SingularSystemError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
