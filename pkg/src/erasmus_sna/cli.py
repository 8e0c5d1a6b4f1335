"""Command-line driver.

Exit status: 0 success, 1 usage error, 2 data error. Errors are written to
stderr as one tab-separated line: ``error<TAB>usage|data<TAB>Kind<TAB>message``.
"""

from __future__ import annotations

import io
import logging
import sys
from pathlib import Path

import click

from . import __version__
from .config import RunConfig, load_config, parse_years
from .errors import DataError, ErasmusSNAError
from .export import (
    dumps_geojson,
    metrics_table,
    network_dot,
    network_geojson,
    write_metrics_csv,
    write_ranking_csv,
    write_share_counts_csv,
    write_share_csv,
    write_slopegraph_csv,
    write_timeseries_csv,
)
from .inclusiveness import inclusiveness_slopegraph
from .ingest import Gender, StemClass, write_records, write_rejects
from .metrics import metrics_report, top_k
from .network import CohortSlice, subnetwork
from .pipeline import Study
from .reference import compare_to_reference
from .shares import country_shares, sn_share_timeseries

log = logging.getLogger("erasmus_sna")

_GENDER = {"all": None, "F": Gender.F, "M": Gender.M}
_STEM = {"all": None, "stem": StemClass.STEM, "nonstem": StemClass.NON_STEM}


def _error_line(kind: str, exc: BaseException) -> None:
    msg = str(exc.format_message() if isinstance(exc, click.ClickException) else exc).replace("\n", " ")
    click.echo(f"error\t{kind}\t{type(exc).__name__}\t{msg}", err=True)


class _Cli(click.Group):
    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            rv = super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
        except click.UsageError as exc:
            _error_line("usage", exc)
            sys.exit(1)
        except click.Abort as exc:
            _error_line("usage", exc)
            sys.exit(1)
        except (DataError, ErasmusSNAError) as exc:
            _error_line("data", exc)
            sys.exit(2)
        except click.ClickException as exc:
            _error_line("usage", exc)
            sys.exit(1)
        sys.exit(rv if isinstance(rv, int) else 0)


def _years_type(value):
    try:
        return parse_years(value)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from None


@click.group(cls=_Cli)
@click.version_option(__version__)
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="YAML run configuration.")
@click.option("--data-dir", type=click.Path(file_okay=False))
@click.option("--schema-dir", type=click.Path(file_okay=False))
@click.option("--years", help="Analysis years, e.g. 2008-2013.")
@click.option("--universe", "universe_policy", type=click.Choice(["sn", "all"]))
@click.option("--split", "stem_split_policy", type=click.Choice(["binary", "field"]))
@click.option("--geo-table", type=click.Path(dir_okay=False))
@click.option("--population-table", type=click.Path(dir_okay=False))
@click.option("--places", "rounding", type=click.IntRange(0, 12))
@click.option("-v", "--verbose", count=True)
@click.pass_context
def cli(ctx, config_path, verbose, years, **flags):
    """Erasmus special-needs mobility networks."""
    logging.basicConfig(level=logging.WARNING - 10 * min(verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    if years is not None:
        _years_type(years)

    def make_config() -> RunConfig:
        if config_path:
            cfg = load_config(config_path)
        else:
            if not flags["data_dir"] or not flags["schema_dir"]:
                raise click.UsageError("give --config or both --data-dir and --schema-dir")
            cfg = RunConfig(Path(flags["data_dir"]), Path(flags["schema_dir"]))
        cfg = cfg.with_overrides(years=years, **flags)
        cfg.check_paths()
        return cfg

    ctx.obj = make_config


def _study(ctx) -> Study:
    return Study(ctx.obj())


def _check_year(study: Study, year: int) -> None:
    if study.config.years and year not in study.config.years:
        raise click.UsageError(f"year {year} is outside the configured range {study.config.years[0]}-{study.config.years[-1]}")


def _slice(gender: str, stem: str) -> CohortSlice:
    return CohortSlice(_GENDER[gender], _STEM[stem])


def _out_dir(study: Study, out: str | None) -> Path:
    d = Path(out) if out else study.config.output_dir
    d.mkdir(parents=True, exist_ok=True)
    return d


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="")


def _csv_text(writer, *args, **kw) -> str:
    buf = io.StringIO()
    writer(*args, buf, **kw)
    return buf.getvalue()


_slice_opt = click.option("--slice", "gender", type=click.Choice(list(_GENDER)), default=None, help="Gender slice.")
_stem_opt = click.option("--stem", type=click.Choice(list(_STEM)), default="all", show_default=True)


@cli.command()
@click.option("--out", type=click.Path(file_okay=False), help="Output directory.")
@click.pass_context
def ingest(ctx, out):
    """Parse all configured years; write normalized records and rejects."""
    study = _study(ctx)
    d = _out_dir(study, out)
    _write(d / "records.csv", _csv_text(write_records, study.records))
    _write(d / "rejects.csv", _csv_text(write_rejects, study.rejects))
    click.echo(f"{len(study.records)} records, {len(study.rejects)} rejects -> {d}")


@cli.command()
@click.option("--year", type=int, required=True)
@_slice_opt
@_stem_opt
@click.option("--compare-reference", is_flag=True, help="Also report deviations from the published 2008/2013 counts.")
@click.option("--out", type=click.Path(file_okay=False), help="Output directory.")
@click.pass_context
def metrics(ctx, year, gender, stem, compare_reference, out):
    """Summary statistics for one year (columns all, M, F)."""
    study = _study(ctx)
    _check_year(study, year)
    net = study.sn_network(year)
    genders = [gender] if gender else ["all", "M", "F"]
    reports = [
        metrics_report(subnetwork(net, _slice(g, stem)), study.config.assortativity_pairing) for g in genders
    ]
    d = _out_dir(study, out)
    places = study.config.rounding
    table = metrics_table(reports, places)
    _write(d / f"metrics_{year}.csv", _csv_text(write_metrics_csv, reports, places=places))
    _write(d / f"metrics_{year}.txt", table)
    click.echo(table, nl=False)
    if compare_reference:
        rows = compare_to_reference(reports)
        lines = ["year,slice,metric,computed,reference,deviation"]
        for c in rows:
            lines.append(f"{c.year},{c.slice},{c.metric},{c.computed},{c.reference},{c.deviation}")
            if c.deviation:
                log.warning("%d %s %s: computed %d, published %d", c.year, c.slice, c.metric, c.computed, c.reference)
        _write(d / f"reference_{year}.csv", "\n".join(lines) + "\n")


@cli.command()
@click.option("--year", type=int, required=True)
@click.option("--direction", type=click.Choice(["in", "out"]), required=True)
@click.option("--k", type=click.IntRange(min=1), default=5, show_default=True)
@_slice_opt
@_stem_opt
@click.option("--out", type=click.Path(dir_okay=False), help="CSV file; stdout when omitted.")
@click.pass_context
def top(ctx, year, direction, k, gender, stem, out):
    """Top-k institutions by in- or out-degree."""
    study = _study(ctx)
    _check_year(study, year)
    net = subnetwork(study.sn_network(year), _slice(gender or "all", stem))
    text = _csv_text(write_ranking_csv, top_k(net, direction, k))
    if out:
        _write(Path(out), text)
    else:
        click.echo(text, nl=False)


@cli.command()
@click.option("--early", required=True, help="Early window, e.g. 2008-2010.")
@click.option("--late", required=True, help="Late window, e.g. 2011-2013.")
@click.option("--out", type=click.Path(dir_okay=False), help="CSV file; stdout when omitted.")
@click.pass_context
def inclusiveness(ctx, early, late, out):
    """Slopegraph table of the inclusiveness index for persistent receivers."""
    early_y, late_y = _years_type(early), _years_type(late)
    study = _study(ctx)
    for y in sorted(set(early_y) | set(late_y)):
        _check_year(study, y)
    sn = {y: study.sn_network(y) for y in sorted(set(early_y) | set(late_y))}
    full = {y: study.full_network(y) for y in sn}
    rows = inclusiveness_slopegraph(sn, full, early_y, late_y)
    text = _csv_text(write_slopegraph_csv, rows, places=study.config.rounding)
    if out:
        _write(Path(out), text)
    else:
        click.echo(text, nl=False)


@cli.command()
@click.option("--year", type=int, help="Year for the per-country table (needs a population table).")
@click.option("--out", type=click.Path(file_okay=False), help="Output directory.")
@click.pass_context
def shares(ctx, year, out):
    """Special-needs participation shares: yearly series and per-country table."""
    study = _study(ctx)
    d = _out_dir(study, out)
    places = study.config.rounding
    _write(d / "shares_timeseries.csv", _csv_text(write_timeseries_csv, sn_share_timeseries(study.study, study.years), places=places))
    if year is not None:
        _check_year(study, year)
        report = country_shares([r for r in study.study if r.year == year], study.population, year)
        _write(d / f"shares_{year}.csv", _csv_text(write_share_csv, report, places=places))
        _write(d / f"share_counts_{year}.csv", _csv_text(write_share_counts_csv, report, places=places))
        for w in report.warnings:
            click.echo(f"warning\t{w}", err=True)
    click.echo(f"shares written to {d}")


@cli.command("export-geo")
@click.option("--year", type=int, required=True)
@_slice_opt
@_stem_opt
@click.option("--out", type=click.Path(dir_okay=False), help="GeoJSON file.")
@click.pass_context
def export_geo(ctx, year, gender, stem, out):
    """GeoJSON of institutions (with roles) and flows."""
    study = _study(ctx)
    _check_year(study, year)
    net = subnetwork(study.sn_network(year), _slice(gender or "all", stem))
    doc, missing = network_geojson(net)
    path = Path(out) if out else study.config.output_dir / f"network_{year}.geojson"
    _write(path, dumps_geojson(doc))
    sidecar = path.with_name(path.name + ".missing.txt")
    if missing:
        _write(sidecar, "".join(f"{m}\n" for m in missing))
        click.echo(f"warning\t{len(missing)} institutions without coordinates, see {sidecar}", err=True)
    elif sidecar.exists():
        sidecar.unlink()
    click.echo(str(path))


@cli.command("export-dot")
@click.option("--year", type=int, required=True)
@_slice_opt
@_stem_opt
@click.option("--out", type=click.Path(dir_okay=False), help="DOT file; stdout when omitted.")
@click.pass_context
def export_dot(ctx, year, gender, stem, out):
    """Graphviz rendering of one year's network."""
    study = _study(ctx)
    _check_year(study, year)
    net = subnetwork(study.sn_network(year), _slice(gender or "all", stem))
    text = network_dot(net)
    if out:
        _write(Path(out), text)
    else:
        click.echo(text, nl=False)


def main():
    cli()


if __name__ == "__main__":
    main()
