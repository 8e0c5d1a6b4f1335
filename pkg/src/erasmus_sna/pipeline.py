"""Lazily parsed dataset and the networks derived from it for one run."""

from __future__ import annotations

import logging
from functools import cached_property

from .config import RunConfig
from .errors import DataError, MissingYearError
from .ingest import MobilityRecord, MobilityType, RejectReport, filter_cohort, load_schema_dir, parse_directory
from .network import Network, NodeAttrs, UniversePolicy, build_network, build_universe, load_geo_table
from .shares import PopulationTable, load_population_table

log = logging.getLogger(__name__)


class Study:
    def __init__(self, config: RunConfig):
        self.config = config
        self._sn: dict[int, Network] = {}
        self._full: dict[int, Network] = {}

    @cached_property
    def schemas(self):
        schemas = load_schema_dir(self.config.schema_dir)
        years = self.config.years or tuple(sorted(schemas))
        if not years:
            raise DataError(f"no schema files in {self.config.schema_dir}")
        missing = [y for y in years if y not in schemas]
        if missing:
            raise MissingYearError(f"no schema for year(s) {', '.join(map(str, missing))}")
        return {y: schemas[y] for y in years}

    @property
    def years(self) -> tuple[int, ...]:
        return tuple(sorted(self.schemas))

    @cached_property
    def _parsed(self) -> tuple[list[MobilityRecord], list[RejectReport]]:
        records, rejects = parse_directory(self.config.data_dir, self.schemas)
        log.info("parsed %d records, %d rejects", len(records), len(rejects))
        return records, rejects

    @property
    def records(self) -> list[MobilityRecord]:
        return self._parsed[0]

    @property
    def rejects(self) -> list[RejectReport]:
        return self._parsed[1]

    @cached_property
    def study(self) -> list[MobilityRecord]:
        return filter_cohort(self.records, MobilityType.STUDY)

    @cached_property
    def special_needs(self) -> list[MobilityRecord]:
        return filter_cohort(self.study, MobilityType.STUDY, special_needs_only=True)

    @cached_property
    def universe(self) -> frozenset[str]:
        if self.config.universe_policy is UniversePolicy.SPECIAL_NEEDS:
            return build_universe(self.special_needs, UniversePolicy.SPECIAL_NEEDS)
        return build_universe(self.study, UniversePolicy.ALL)

    @cached_property
    def full_universe(self) -> frozenset[str]:
        return build_universe(self.study, UniversePolicy.ALL)

    @cached_property
    def geo(self) -> dict[str, NodeAttrs]:
        return load_geo_table(self.config.geo_table) if self.config.geo_table else {}

    @cached_property
    def population(self) -> PopulationTable:
        if self.config.population_table is None:
            raise DataError("no population table configured")
        return load_population_table(self.config.population_table)

    def _check_year(self, year: int) -> None:
        if year not in self.schemas:
            raise MissingYearError(f"no data for {year}")

    def sn_network(self, year: int) -> Network:
        """Special-needs study flows of ``year`` over the configured universe."""
        self._check_year(year)
        if year not in self._sn:
            recs = [r for r in self.special_needs if r.year == year]
            self._sn[year] = build_network(recs, self.universe, year, self.geo, self.config.stem_split_policy)
        return self._sn[year]

    def full_network(self, year: int) -> Network:
        """All study flows of ``year``, special-needs students included."""
        self._check_year(year)
        if year not in self._full:
            recs = [r for r in self.study if r.year == year]
            self._full[year] = build_network(recs, self.full_universe, year, self.geo, self.config.stem_split_policy)
        return self._full[year]
