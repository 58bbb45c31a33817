"""Run configuration: defaults, the flat key-value config file, overrides.

Config files are plain text, one ``key = value`` per line, ``#`` comments
allowed. Lists are comma-separated; the (r0, r1) pairs of the bound surface
are written ``r0:r1`` (e.g. ``r_pairs = 0:1, 0:2, 3:5``). No environment
variables are consulted. The seed is mandatory, either in the file or on
the command line: commands never fall back to wall-clock seeding.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path


class ConfigError(ValueError):
    """Bad run configuration (unknown key, malformed value, empty grid)."""


@dataclass
class RunConfig:
    seed: int | None = None
    trials: int = 20000
    workers: int = 1
    # bound-surface grids
    alpha_grid: tuple = (0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0)
    r_pairs: tuple = ((0, 1), (0, 2), (3, 5))
    r2_grid: tuple = (8, 16, 24, 32)
    grid_rows: int = 32
    grid_cols: int = 32
    convention: str = "definition"
    # codec / experiment knobs
    thresholds: tuple = (400.0, 600.0, 800.0, 1000.0)
    ratios: tuple = (0.1, 0.2, 0.3, 0.4, 0.5)
    split: float = 4.0
    crop: int = 64
    frames: int = 10
    video_width: int = 176
    video_height: int = 144
    # layer-fit model
    fit_r0: int = 0
    fit_r1: int = 3
    fit_r2: int = 32
    fit_alpha: float = 0.15
    fit_threshold: float = 1000.0
    # solver
    solver_max_iterations: int = 20000
    solver_abs_tol: float = 1e-8
    solver_rel_tol: float = 1e-8
    solver_feas_tol: float = 1e-8
    solver_budget: int = 50_000_000

    def validate(self) -> "RunConfig":
        if self.seed is None:
            raise ConfigError("seed is mandatory (set it in the config file or with --seed)")
        if self.seed < 0:
            raise ConfigError("seed must be nonnegative")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        for name in ("alpha_grid", "r_pairs", "r2_grid", "thresholds", "ratios"):
            if not getattr(self, name):
                raise ConfigError(f"{name} must not be empty")
        if any(not 0.0 < r <= 1.0 for r in self.ratios):
            raise ConfigError("ratios must lie in (0, 1]")
        if any(t < 0 for t in self.thresholds):
            raise ConfigError("thresholds must be nonnegative")
        if any(a <= 0 for a in self.alpha_grid):
            raise ConfigError("alpha values must be positive")
        if self.convention not in ("definition", "appendix"):
            raise ConfigError("convention must be 'definition' or 'appendix'")
        if self.frames < 2 or self.frames % 2 != 0:
            raise ConfigError("frames must be a positive even number")
        if self.crop < 0:
            raise ConfigError("crop must be 0 (disabled) or positive")
        return self

    def as_lines(self) -> list[str]:
        """Canonical 'key = value' lines (the manifest's config echo)."""
        out = []
        for f in sorted(fields(self), key=lambda f: f.name):
            out.append(f"{f.name} = {_format_value(getattr(self, f.name))}")
        return out


def _format_value(value) -> str:
    if isinstance(value, tuple):
        if value and isinstance(value[0], tuple):
            return ", ".join(f"{a}:{b}" for a, b in value)
        return ", ".join(_format_value(v) for v in value)
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _parse_int_list(text: str) -> tuple:
    return tuple(int(tok) for tok in text.replace(",", " ").split())


def _parse_float_list(text: str) -> tuple:
    return tuple(float(tok) for tok in text.replace(",", " ").split())


def _parse_pairs(text: str) -> tuple:
    pairs = []
    for tok in text.replace(",", " ").split():
        a, _, b = tok.partition(":")
        if not b:
            raise ConfigError(f"r_pairs entries look like 'r0:r1', got {tok!r}")
        pairs.append((int(a), int(b)))
    return tuple(pairs)


_PARSERS = {
    "seed": int,
    "trials": int,
    "workers": int,
    "alpha_grid": _parse_float_list,
    "r_pairs": _parse_pairs,
    "r2_grid": _parse_int_list,
    "grid_rows": int,
    "grid_cols": int,
    "convention": str,
    "thresholds": _parse_float_list,
    "ratios": _parse_float_list,
    "split": float,
    "crop": int,
    "frames": int,
    "video_width": int,
    "video_height": int,
    "fit_r0": int,
    "fit_r1": int,
    "fit_r2": int,
    "fit_alpha": float,
    "fit_threshold": float,
    "solver_max_iterations": int,
    "solver_abs_tol": float,
    "solver_rel_tol": float,
    "solver_feas_tol": float,
    "solver_budget": int,
}


def load_config(path=None, **overrides) -> RunConfig:
    """Build a RunConfig from an optional file plus explicit overrides.

    Overrides (e.g. command-line --seed/--workers) win over file values;
    None overrides are ignored.
    """
    cfg = RunConfig()
    if path is not None:
        text = Path(path).read_text()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, eq, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not eq or not key or not value:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            if key not in _PARSERS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                setattr(cfg, key, _PARSERS[key](value))
            except ConfigError:
                raise
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in _PARSERS:
            raise ConfigError(f"unknown config override {key!r}")
        setattr(cfg, key, value)
    return cfg.validate()
