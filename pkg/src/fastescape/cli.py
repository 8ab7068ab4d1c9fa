"""Command-line front end: analyze, classify, certify, render, loops.

Every subcommand reads a line-oriented config file (``key = value``,
comment lines start with ``#``, later keys override earlier ones) and
writes its data to a file or standard output.  A metadata block (tool
version, config echo, wall time) goes alongside each output: into a
``<file>.meta.json`` sidecar for file outputs, onto the error stream
for standard-output runs.  Reruns with the same config produce
identical data; only the timing field varies.

Exit codes: 0 for a completed run (a certificate with status failed is
still a completed run), 2 for invalid input, 1 for internal errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

from fastescape import __version__
from fastescape.certify import certify_disc_sequence, certify_regular_growth
from fastescape.escape import DEFAULT_L_RANGE, max_level
from fastescape.functions import (
    EntireFunction,
    make_builtin,
    make_random_signs,
    make_series,
)
from fastescape.growth import build_growth_report, build_ladder, find_min_R
from fastescape.raster import Bbox, classify_grid, extract_hole, extract_loop, write_image


class ConfigError(ValueError):
    """Invalid configuration or point input; maps to exit code 2."""


@dataclass
class RunConfig:
    """Resolved run parameters with module defaults filled in."""

    function: str | None = None
    params: dict[str, float] = field(default_factory=dict)
    series_file: Path | None = None
    seed: int | None = None
    R: float | None = None
    depth: int = 10
    L_min: int = DEFAULT_L_RANGE[0]
    L_max: int = DEFAULT_L_RANGE[1]
    bbox: Bbox | None = None
    resolution: tuple[int, int] = (512, 512)
    samples: int = 64
    method: str = "disc"
    m: float = 2.0
    delta: float = 0.01
    level: int = 0
    supersample: bool = False
    workers: int | None = None
    out: Path | None = None

    def echo(self) -> dict:
        """JSON-ready view of the resolved values, for the metadata block."""
        box = None
        if self.bbox is not None:
            box = [
                self.bbox.center.real,
                self.bbox.center.imag,
                self.bbox.half_width,
                self.bbox.half_height,
            ]
        return {
            "function": self.function,
            "params": dict(sorted(self.params.items())),
            "series_file": None if self.series_file is None else str(self.series_file),
            "seed": self.seed,
            "R": self.R,
            "depth": self.depth,
            "L_range": [self.L_min, self.L_max],
            "bbox": box,
            "resolution": list(self.resolution),
            "samples": self.samples,
            "method": self.method,
            "m": self.m,
            "delta": self.delta,
            "level": self.level,
            "supersample": self.supersample,
            "workers": self.workers,
            "out": None if self.out is None else str(self.out),
        }


def _parse_int(value: str, key: str, line: int, minimum: int | None = None) -> int:
    try:
        n = int(value)
    except ValueError:
        raise ConfigError(f"line {line}: {key} expects an integer, got {value!r}") from None
    if minimum is not None and n < minimum:
        raise ConfigError(f"line {line}: {key} must be >= {minimum}, got {n}")
    return n


def _parse_float(value: str, key: str, line: int, positive: bool = False) -> float:
    try:
        x = float(value)
    except ValueError:
        raise ConfigError(f"line {line}: {key} expects a number, got {value!r}") from None
    if positive and not x > 0.0:
        raise ConfigError(f"line {line}: {key} must be positive, got {x}")
    return x


def _parse_bool(value: str, key: str, line: int) -> bool:
    low = value.lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"line {line}: {key} expects true or false, got {value!r}")


def parse_config(text: str) -> RunConfig:
    """Parse ``key = value`` lines into a RunConfig.

    Later assignments override earlier ones.  Every rejected line is
    reported with its number.  A config without a function name or a
    series file is rejected.
    """
    cfg = RunConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected `key = value`, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not value:
            raise ConfigError(f"line {lineno}: {key} has no value")
        if key == "function":
            cfg = replace(cfg, function=value)
        elif key.startswith("param."):
            name = key[len("param."):]
            if not name:
                raise ConfigError(f"line {lineno}: param. needs a parameter name")
            cfg.params[name] = _parse_float(value, key, lineno)
        elif key == "series_file":
            cfg = replace(cfg, series_file=Path(value))
        elif key == "seed":
            cfg = replace(cfg, seed=_parse_int(value, key, lineno))
        elif key == "R":
            cfg = replace(cfg, R=_parse_float(value, key, lineno, positive=True))
        elif key == "depth":
            cfg = replace(cfg, depth=_parse_int(value, key, lineno, minimum=1))
        elif key == "L_min":
            cfg = replace(cfg, L_min=_parse_int(value, key, lineno))
        elif key == "L_max":
            cfg = replace(cfg, L_max=_parse_int(value, key, lineno))
        elif key == "bbox":
            parts = value.split()
            if len(parts) != 4:
                raise ConfigError(
                    f"line {lineno}: bbox expects `center_re center_im "
                    f"half_width half_height`, got {value!r}"
                )
            cre, cim, hw, hh = (_parse_float(p, "bbox", lineno) for p in parts)
            try:
                cfg = replace(cfg, bbox=Bbox(complex(cre, cim), hw, hh))
            except ValueError as exc:
                raise ConfigError(f"line {lineno}: {exc}") from None
        elif key == "resolution":
            parts = value.split()
            if len(parts) == 1:
                parts = parts * 2
            if len(parts) != 2:
                raise ConfigError(
                    f"line {lineno}: resolution expects one or two integers, got {value!r}"
                )
            w = _parse_int(parts[0], "resolution", lineno, minimum=1)
            h = _parse_int(parts[1], "resolution", lineno, minimum=1)
            cfg = replace(cfg, resolution=(w, h))
        elif key == "samples":
            cfg = replace(cfg, samples=_parse_int(value, key, lineno, minimum=16))
        elif key == "method":
            if value not in ("disc", "regular"):
                raise ConfigError(f"line {lineno}: method must be disc or regular, got {value!r}")
            cfg = replace(cfg, method=value)
        elif key == "m":
            cfg = replace(cfg, m=_parse_float(value, key, lineno, positive=True))
        elif key == "delta":
            cfg = replace(cfg, delta=_parse_float(value, key, lineno, positive=True))
        elif key == "level":
            cfg = replace(cfg, level=_parse_int(value, key, lineno))
        elif key == "supersample":
            cfg = replace(cfg, supersample=_parse_bool(value, key, lineno))
        elif key == "workers":
            cfg = replace(cfg, workers=_parse_int(value, key, lineno, minimum=1))
        elif key == "out":
            cfg = replace(cfg, out=Path(value))
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    if cfg.L_min > cfg.L_max:
        raise ConfigError(f"empty level range [{cfg.L_min}, {cfg.L_max}]")
    if cfg.function is None and cfg.series_file is None:
        raise ConfigError(
            "config defines no function (`function = <name>` or `series_file = <path>`)"
        )
    return cfg


def _load_series_file(path: Path) -> EntireFunction:
    """Sparse coefficients, one `n value` pair per line."""
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read series file {path}: {exc}") from None
    coeffs: dict[int, float] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ConfigError(f"{path} line {lineno}: expected `n value`, got {line!r}")
        try:
            n = int(parts[0])
            a = float(parts[1])
        except ValueError:
            raise ConfigError(f"{path} line {lineno}: expected `n value`, got {line!r}") from None
        if n < 0:
            raise ConfigError(f"{path} line {lineno}: exponent must be >= 0, got {n}")
        coeffs[n] = a
    if not coeffs:
        raise ConfigError(f"{path}: series file lists no coefficients")
    positive = all(a >= 0.0 for a in coeffs.values())
    return make_series(
        lambda n: coeffs.get(n, 0.0),
        positive_coefficients=positive,
        name=path.stem,
    )


def build_function(cfg: RunConfig) -> EntireFunction:
    if cfg.series_file is not None:
        f = _load_series_file(cfg.series_file)
    else:
        try:
            f = make_builtin(cfg.function, **cfg.params)
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from None
    if cfg.seed is not None:
        f = make_random_signs(f, cfg.seed)
    return f


def _resolve_R(cfg: RunConfig, f: EntireFunction) -> float:
    if cfg.R is not None:
        return cfg.R
    return find_min_R(f, samples=cfg.samples)


def _metadata(command: str, cfg: RunConfig, seconds: float) -> dict:
    return {
        "tool": {"name": "fastescape", "version": __version__},
        "command": command,
        "config": cfg.echo(),
        "timing": {"seconds": round(seconds, 6)},
    }


def _emit_json(doc: dict, out: Path | None) -> None:
    payload = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if out is None:
        sys.stdout.write(payload)
    else:
        out.write_text(payload)


def _emit_meta(meta: dict, out: Path | None) -> None:
    payload = json.dumps(meta, sort_keys=True, indent=2) + "\n"
    if out is None:
        sys.stderr.write(payload)
    else:
        Path(str(out) + ".meta.json").write_text(payload)


def _grid_from_config(cfg: RunConfig, f: EntireFunction, R: float):
    if cfg.bbox is None:
        raise ConfigError("this command needs a bbox (`bbox = cre cim hw hh`)")
    ladder = build_ladder(f, R, cfg.depth + max(cfg.L_max, 0), cfg.samples)
    return classify_grid(
        f,
        ladder,
        cfg.bbox,
        cfg.resolution,
        cfg.depth,
        (cfg.L_min, cfg.L_max),
        supersample=cfg.supersample,
        workers=cfg.workers,
    )


def _cmd_analyze(cfg: RunConfig, out: Path | None) -> int:
    f = build_function(cfg)
    start = time.perf_counter()
    report = build_growth_report(f, samples=cfg.samples)
    meta = _metadata("analyze", cfg, time.perf_counter() - start)
    _emit_json({"meta": meta, "growth_report": report.to_json_dict()}, out)
    return 0


def _read_points(source: Path | None) -> list[complex]:
    if source is None:
        text = sys.stdin.read()
        label = "<stdin>"
    else:
        try:
            text = source.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read points file {source}: {exc}") from None
        label = str(source)
    points = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ConfigError(f"{label} line {lineno}: expected `re im`, got {line!r}")
        try:
            points.append(complex(float(parts[0]), float(parts[1])))
        except ValueError:
            raise ConfigError(f"{label} line {lineno}: expected `re im`, got {line!r}") from None
    if not points:
        raise ConfigError(f"{label}: no points to classify")
    return points


def _cmd_classify(cfg: RunConfig, out: Path | None, points_path: Path | None) -> int:
    f = build_function(cfg)
    points = _read_points(points_path)
    start = time.perf_counter()
    R = _resolve_R(cfg, f)
    ladder = build_ladder(f, R, cfg.depth + max(cfg.L_max, 0), cfg.samples)
    lines = []
    for z in points:
        v = max_level(f, ladder, z, cfg.depth, cfg.L_min, cfg.L_max)
        level = "none" if v.level is None else str(v.level)
        flag = "true" if v.indeterminate else "false"
        lines.append(f"{z.real!r} {z.imag!r} {level} {cfg.depth} {flag}")
    body = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(body)
    else:
        out.write_text(body)
    _emit_meta(_metadata("classify", cfg, time.perf_counter() - start), out)
    return 0


def _cmd_certify(cfg: RunConfig, out: Path | None) -> int:
    f = build_function(cfg)
    start = time.perf_counter()
    R = _resolve_R(cfg, f)
    if cfg.method == "disc":
        cert = certify_disc_sequence(f, R, cfg.depth, cfg.samples, cfg.delta)
    else:
        cert = certify_regular_growth(f, R, cfg.m, cfg.depth, cfg.samples, cfg.delta)
    meta = _metadata("certify", cfg, time.perf_counter() - start)
    _emit_json({"meta": meta, "certificate": cert.to_json_dict()}, out)
    return 0


def _cmd_render(cfg: RunConfig, out: Path | None) -> int:
    f = build_function(cfg)
    start = time.perf_counter()
    R = _resolve_R(cfg, f)
    grid = _grid_from_config(cfg, f, R)
    target = out or Path("levels.ppm")
    write_image(grid, target)
    _emit_meta(_metadata("render", cfg, time.perf_counter() - start), target)
    return 0


def _cmd_loops(cfg: RunConfig, out: Path | None) -> int:
    f = build_function(cfg)
    start = time.perf_counter()
    R = _resolve_R(cfg, f)
    grid = _grid_from_config(cfg, f, R)
    hole = extract_hole(grid, cfg.level)
    payload: dict = {"level": cfg.level, "bounded_in_window": hole.bounded_in_window}
    if hole.bounded_in_window:
        loop = extract_loop(hole)
        payload["vertex_count"] = len(loop.vertices)
        payload["perimeter"] = loop.perimeter()
        payload["vertices"] = [[v.real, v.imag] for v in loop.vertices]
    meta = _metadata("loops", cfg, time.perf_counter() - start)
    _emit_json({"meta": meta, "loop": payload}, out)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fastescape",
        description="Growth scales, escape levels, and web certificates "
        "for transcendental entire functions.",
    )
    parser.add_argument("--version", action="version", version=f"fastescape {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, required=True, help="run configuration file")
        p.add_argument("--out", type=Path, default=None, help="output path (default: config `out` or stdout)")
        p.add_argument("--depth", type=int, default=None, help="override iteration depth N")
        p.add_argument("--R", type=float, default=None, help="override the threshold radius")
        p.add_argument("--seed", type=int, default=None, help="override the random-sign seed")
        return p

    add("analyze", "growth profile of the configured function, as JSON")
    p = add("classify", "escape levels for a list of points")
    p.add_argument("--points", type=Path, default=None, help="points file `re im` (default: stdin)")
    add("certify", "spider's-web certificate, as JSON")
    p = add("render", "level-set image over the configured window")
    p.add_argument("--resolution", type=int, nargs=2, default=None, metavar=("W", "H"))
    p = add("loops", "boundary loop of a fundamental hole, as JSON")
    p.add_argument("--level", type=int, default=None, help="override the hole cut level")
    return parser


def run_command(argv: list[str]) -> int:
    args = _build_parser().parse_args(argv)
    try:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        cfg = parse_config(text)
        if args.depth is not None:
            if args.depth < 1:
                raise ConfigError(f"depth must be >= 1, got {args.depth}")
            cfg = replace(cfg, depth=args.depth)
        if args.R is not None:
            if not args.R > 0:
                raise ConfigError(f"R must be positive, got {args.R}")
            cfg = replace(cfg, R=args.R)
        if args.seed is not None:
            cfg = replace(cfg, seed=args.seed)
        if getattr(args, "resolution", None) is not None:
            w, h = args.resolution
            if w < 1 or h < 1:
                raise ConfigError(f"resolution must be positive, got {w} x {h}")
            cfg = replace(cfg, resolution=(w, h))
        if getattr(args, "level", None) is not None:
            cfg = replace(cfg, level=args.level)
        out = args.out or cfg.out

        if args.command == "analyze":
            return _cmd_analyze(cfg, out)
        if args.command == "classify":
            return _cmd_classify(cfg, out, args.points)
        if args.command == "certify":
            return _cmd_certify(cfg, out)
        if args.command == "render":
            return _cmd_render(cfg, out)
        return _cmd_loops(cfg, out)
    except ValueError as exc:
        print(f"fastescape: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"fastescape: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"fastescape: internal error: {exc!r}", file=sys.stderr)
        return 1


def main() -> int:
    return run_command(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
