"""Run configuration: a YAML file whose entries command-line flags may override."""

from __future__ import annotations

import os
from dataclasses import dataclass, replace
from pathlib import Path

import yaml

from .errors import DataError
from .network import SplitPolicy, UniversePolicy


def parse_years(spec: str | int | list) -> tuple[int, ...]:
    """``"2008-2013"``, ``"2008,2010"``, ``2008`` or a list of those."""
    if isinstance(spec, int):
        return (spec,)
    if isinstance(spec, (list, tuple)):
        return tuple(sorted({y for part in spec for y in parse_years(part)}))
    years: set[int] = set()
    for part in str(spec).split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = (int(p) for p in part.split("-", 1))
            if hi < lo:
                raise ValueError(f"empty year range {part!r}")
            years.update(range(lo, hi + 1))
        else:
            years.add(int(part))
    if not years:
        raise ValueError(f"no years in {spec!r}")
    return tuple(sorted(years))


@dataclass(frozen=True)
class RunConfig:
    data_dir: Path
    schema_dir: Path
    years: tuple[int, ...] = ()
    universe_policy: UniversePolicy = UniversePolicy.SPECIAL_NEEDS
    stem_split_policy: SplitPolicy = SplitPolicy.BINARY
    geo_table: Path | None = None
    population_table: Path | None = None
    output_dir: Path = Path("out")
    rounding: int = 4
    assortativity_pairing: str = "out-in"

    def with_overrides(self, **kw) -> "RunConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        for key in ("data_dir", "schema_dir", "geo_table", "population_table", "output_dir"):
            if key in kw:
                kw[key] = Path(kw[key])
        if "years" in kw:
            kw["years"] = parse_years(kw["years"])
        if "universe_policy" in kw:
            kw["universe_policy"] = UniversePolicy(kw["universe_policy"])
        if "stem_split_policy" in kw:
            kw["stem_split_policy"] = SplitPolicy(kw["stem_split_policy"])
        return replace(self, **kw)

    def check_paths(self) -> None:
        for name in ("data_dir", "schema_dir"):
            p = getattr(self, name)
            if not p.is_dir():
                raise DataError(f"{name} {p} is not a directory")
        for name in ("geo_table", "population_table"):
            p = getattr(self, name)
            if p is not None and not p.is_file():
                raise DataError(f"{name} {p} does not exist")


_KEYS = {
    "data_dir",
    "schema_dir",
    "years",
    "universe_policy",
    "stem_split_policy",
    "geo_table",
    "population_table",
    "output_dir",
    "rounding",
    "assortativity_pairing",
}


def load_config(path: str | os.PathLike) -> RunConfig:
    """Read a run config; relative paths resolve against the config file's directory."""
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except (OSError, yaml.YAMLError) as exc:
        raise DataError(f"cannot read config {path}: {exc}") from exc
    unknown = set(data) - _KEYS
    if unknown:
        raise DataError(f"{path}: unknown config keys {', '.join(sorted(unknown))}")
    base = path.parent
    for key in ("data_dir", "schema_dir", "geo_table", "population_table", "output_dir"):
        if data.get(key) is not None:
            data[key] = base / data[key]
    if "data_dir" not in data or "schema_dir" not in data:
        raise DataError(f"{path}: data_dir and schema_dir are required")
    cfg = RunConfig(Path(data.pop("data_dir")), Path(data.pop("schema_dir")))
    try:
        return cfg.with_overrides(**data)
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from exc
