"""Student-mobility networks of higher-education institutions.

Ingest yearly Erasmus mobility exports, build directed weighted networks of
institutions, compute network statistics and an inclusiveness index for
students with special needs, and export tables and GeoJSON.
"""

__version__ = "0.1.0"

from .errors import DataError, ErasmusSNAError, MetricDomainError
from .inclusiveness import bound, compute_index, period_average, persistent_receivers, slopegraph_table
from .ingest import (
    Gender,
    InstitutionCode,
    MobilityRecord,
    MobilityType,
    SchemaMap,
    StemClass,
    classify_stem,
    filter_cohort,
    parse_records,
)
from .metrics import (
    Direction,
    assortativity,
    closeness_centralization,
    degree_centralization,
    density,
    hits,
    metrics_report,
    reciprocity,
    strength,
    top_k,
)
from .network import CohortSlice, Network, NodeRole, build_network, build_universe, node_roles, subnetwork
from .shares import country_shares, sn_share_timeseries

__all__ = [
    "assortativity",
    "bound",
    "build_network",
    "build_universe",
    "classify_stem",
    "closeness_centralization",
    "CohortSlice",
    "compute_index",
    "country_shares",
    "DataError",
    "degree_centralization",
    "density",
    "Direction",
    "ErasmusSNAError",
    "filter_cohort",
    "Gender",
    "hits",
    "InstitutionCode",
    "MetricDomainError",
    "metrics_report",
    "MobilityRecord",
    "MobilityType",
    "Network",
    "node_roles",
    "NodeRole",
    "parse_records",
    "period_average",
    "persistent_receivers",
    "reciprocity",
    "SchemaMap",
    "slopegraph_table",
    "sn_share_timeseries",
    "StemClass",
    "strength",
    "subnetwork",
    "top_k",
]
