"""Parse per-year mobility exports into normalized records.

Each source vintage names its columns differently and encodes the
special-needs grant either as a yes/no token or as an amount, so every data
file is read through a :class:`SchemaMap` loaded from a small YAML file.
"""

from __future__ import annotations

import csv
import io
import logging
import os
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import IO, Any, Iterable, Mapping, Sequence

import yaml

from .errors import DataError, SchemaError, UnclassifiedFieldError

log = logging.getLogger(__name__)

CANONICAL_FIELDS = (
    "home_institution",
    "host_institution",
    "home_country",
    "host_country",
    "gender",
    "field_of_study",
    "mobility_type",
    "special_needs",
)

# A boolean "yes" carries no amount; downstream code only ever tests grant > 0.
YES_SENTINEL = 1.0

_COUNTRY_RE = re.compile(r"^[A-Z]{2}$")
_WS_RE = re.compile(r"\s+")


class Gender(str, Enum):
    F = "F"
    M = "M"
    UNKNOWN = "Unknown"


class MobilityType(str, Enum):
    STUDY = "Study"
    PLACEMENT = "Placement"
    OTHER = "Other"


class StemClass(str, Enum):
    STEM = "STEM"
    NON_STEM = "NonSTEM"


# ISCED-F 2013 broad fields, keyed by two-digit code.
ISCED_BROAD_FIELDS = {
    "00": "Generic programmes and qualifications",
    "01": "Education",
    "02": "Arts and humanities",
    "03": "Social sciences, journalism and information",
    "04": "Business, administration and law",
    "05": "Natural sciences, mathematics and statistics",
    "06": "Information and Communication Technologies (ICTs)",
    "07": "Engineering, manufacturing and construction",
    "08": "Agriculture, forestry, fisheries and veterinary",
    "09": "Health and welfare",
    "10": "Services",
}
STEM_FIELDS = frozenset(ISCED_BROAD_FIELDS[c] for c in ("05", "06", "07"))


def _label_key(label: str) -> str:
    key = label.strip().lower().replace("&", " and ")
    return _WS_RE.sub(" ", key).strip(" .;")


_FIELD_ALIASES: dict[str, str] = {}
for _code, _label in ISCED_BROAD_FIELDS.items():
    _FIELD_ALIASES[_code] = _label
    _FIELD_ALIASES[_label_key(_label)] = _label
_FIELD_ALIASES.update(
    {
        "icts": ISCED_BROAD_FIELDS["06"],
        "ict": ISCED_BROAD_FIELDS["06"],
        "information and communication technologies": ISCED_BROAD_FIELDS["06"],
        "generic programmes": ISCED_BROAD_FIELDS["00"],
    }
)


def canonical_field(label: str) -> str:
    """Return the canonical ISCED-F broad-field label for ``label``.

    Matching is case-insensitive and tolerant of whitespace and ``&``;
    two-digit broad-field codes are accepted too.
    """
    try:
        return _FIELD_ALIASES[_label_key(label)]
    except KeyError:
        raise UnclassifiedFieldError(f"not an ISCED-F broad field: {label!r}") from None


def classify_stem(field_of_study: str) -> StemClass:
    """Map a broad field label to STEM / non-STEM.

    Unknown labels raise :class:`UnclassifiedFieldError` rather than
    falling through to non-STEM.
    """
    label = canonical_field(field_of_study)
    return StemClass.STEM if label in STEM_FIELDS else StemClass.NON_STEM


def normalize_code(raw: str) -> str:
    return _WS_RE.sub(" ", raw.strip().upper())


@dataclass(frozen=True, order=True)
class InstitutionCode:
    """Erasmus institution code; identity is the normalized form only."""

    normalized: str
    raw: str = field(default="", compare=False, repr=False)

    def __post_init__(self):
        if not self.normalized or normalize_code(self.normalized) != self.normalized:
            raise ValueError(f"invalid normalized institution code {self.normalized!r}")

    @classmethod
    def parse(cls, raw: str) -> "InstitutionCode":
        return cls(normalize_code(raw), raw)

    def __str__(self) -> str:
        return self.normalized


@dataclass(frozen=True)
class MobilityRecord:
    year: int
    home_institution: InstitutionCode
    host_institution: InstitutionCode
    home_country: str
    host_country: str
    gender: Gender
    field_of_study: str
    mobility_type: MobilityType
    special_needs_grant: float = 0.0

    def __post_init__(self):
        if self.home_institution == self.host_institution:
            raise ValueError(f"self-loop record at {self.home_institution}")
        if not self.special_needs_grant >= 0:
            raise ValueError(f"negative special-needs grant {self.special_needs_grant}")
        for c in (self.home_country, self.host_country):
            if not _COUNTRY_RE.match(c):
                raise ValueError(f"bad country code {c!r}")

    @property
    def special_needs(self) -> bool:
        return self.special_needs_grant > 0

    @property
    def stem(self) -> StemClass:
        return classify_stem(self.field_of_study)

    def key(self) -> tuple:
        """Identity of the record with the grant reduced to its yes/no meaning.

        Two vintages that encode the same participant as ``yes`` and as an
        amount produce equal keys.
        """
        return (
            self.year,
            self.home_institution.normalized,
            self.host_institution.normalized,
            self.home_country,
            self.host_country,
            self.gender,
            self.field_of_study,
            self.mobility_type,
            self.special_needs,
        )


@dataclass(frozen=True)
class RejectReport:
    file: str
    row: int
    field: str
    cause: str


# --- schema maps -----------------------------------------------------------

_DEFAULT_GENDER_TOKENS = {
    "F": ["f", "female", "w", "woman", "women"],
    "M": ["m", "male", "man", "men"],
}
_DEFAULT_MOBILITY_TOKENS = {
    "Study": ["study", "studies", "sms", "s", "student mobility for studies"],
    "Placement": [
        "placement",
        "traineeship",
        "smp",
        "p",
        "t",
        "student mobility for traineeships",
    ],
}
_DEFAULT_YES = ["yes", "y", "true", "t", "1"]
_DEFAULT_NO = ["no", "n", "false", "f", "0", ""]


@dataclass(frozen=True)
class SchemaMap:
    """Column bindings and value decoders for one yearly data file."""

    year: int
    column_bindings: Mapping[str, str]
    value_decoders: Mapping[str, Mapping[str, Any]] = field(default_factory=dict)
    delimiter: str = ","
    source: str | None = None

    def __post_init__(self):
        missing = [f for f in CANONICAL_FIELDS if f not in self.column_bindings]
        if missing:
            raise SchemaError(f"schema {self.year}: unbound fields {', '.join(missing)}")
        extra = set(self.column_bindings) - set(CANONICAL_FIELDS)
        if extra:
            raise SchemaError(f"schema {self.year}: unknown fields {', '.join(sorted(extra))}")
        kind = self.value_decoders.get("special_needs", {}).get("kind", "auto")
        if kind not in ("auto", "boolean", "amount"):
            raise SchemaError(f"schema {self.year}: unknown special_needs kind {kind!r}")

    @property
    def filename(self) -> str:
        return self.source or f"{self.year}.csv"

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], year: int | None = None) -> "SchemaMap":
        try:
            return cls(
                year=int(year if year is not None else data["year"]),
                column_bindings=dict(data["columns"]),
                value_decoders=dict(data.get("decoders") or {}),
                delimiter=data.get("delimiter", ","),
                source=data.get("file"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed schema map: {exc}") from exc


def load_schema_file(path: str | os.PathLike, year_range: Sequence[int] | None = None) -> list[SchemaMap]:
    """Load a YAML schema file; ``years: [...]`` expands to one map per year.

    When several years share a schema the ``file`` entry may contain
    ``{year}``.
    """
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise SchemaError(f"{path}: expected a mapping")
    years = data.get("years") or [data.get("year")]
    maps = []
    for y in years:
        if y is None:
            raise SchemaError(f"{path}: no year given")
        d = dict(data)
        if d.get("file"):
            d["file"] = str(d["file"]).format(year=y)
        m = SchemaMap.from_dict(d, year=y)
        if year_range is not None and m.year not in year_range:
            raise SchemaError(f"{path}: year {m.year} outside analysis range")
        maps.append(m)
    return maps


def load_schema_dir(schema_dir: str | os.PathLike, year_range: Sequence[int] | None = None) -> dict[int, SchemaMap]:
    maps: dict[int, SchemaMap] = {}
    for p in sorted(Path(schema_dir).glob("*.y*ml")):
        for m in load_schema_file(p, year_range=None):
            if year_range is not None and m.year not in year_range:
                continue
            if m.year in maps:
                raise SchemaError(f"{p}: second schema for year {m.year}")
            maps[m.year] = m
    return maps


# --- decoding ----------------------------------------------------------------


class _Reject(Exception):
    def __init__(self, field: str, cause: str):
        self.field = field
        self.cause = cause


def _token_table(spec: Mapping[str, Iterable[str]] | None, default: Mapping[str, list[str]]) -> dict[str, str]:
    table = {}
    for value, tokens in (spec or default).items():
        for tok in tokens:
            table[str(tok).strip().lower()] = value
    return table


class _Decoder:
    def __init__(self, schema: SchemaMap):
        dec = schema.value_decoders
        self.gender = _token_table(dec.get("gender"), _DEFAULT_GENDER_TOKENS)
        self.mobility = _token_table(dec.get("mobility_type"), _DEFAULT_MOBILITY_TOKENS)
        sn = dict(dec.get("special_needs") or {})
        self.sn_kind = sn.get("kind", "auto")
        self.yes = {str(t).strip().lower() for t in sn.get("yes", _DEFAULT_YES)}
        self.no = {str(t).strip().lower() for t in sn.get("no", _DEFAULT_NO)}
        self.decimal = sn.get("decimal", ".")
        self.field_aliases = {
            _label_key(k): v for k, v in (dec.get("field_of_study", {}).get("aliases") or {}).items()
        }
        self.missing_grant = 0

    def institution(self, name: str, raw: str) -> InstitutionCode:
        code = normalize_code(raw)
        if not code:
            raise _Reject(name, "empty institution code")
        return InstitutionCode(code, raw)

    def country(self, name: str, raw: str) -> str:
        code = raw.strip().upper()
        if not _COUNTRY_RE.match(code):
            raise _Reject(name, f"malformed country code {raw!r}")
        return code

    def field_of_study(self, raw: str) -> str:
        if not raw.strip():
            raise _Reject("field_of_study", "missing field of study")
        raw = self.field_aliases.get(_label_key(raw), raw)
        try:
            return canonical_field(raw)
        except UnclassifiedFieldError:
            raise _Reject("field_of_study", f"unclassified field of study {raw!r}") from None

    def grant(self, raw: str) -> float:
        tok = raw.strip().lower()
        if not tok:
            self.missing_grant += 1
            return 0.0
        if self.sn_kind != "amount":
            if tok in self.yes:
                return YES_SENTINEL
            if tok in self.no:
                return 0.0
            if self.sn_kind == "boolean":
                raise _Reject("special_needs", f"unrecognized yes/no token {raw!r}")
        num = tok.replace(self.decimal, ".") if self.decimal != "." else tok
        try:
            value = float(num)
        except ValueError:
            raise _Reject("special_needs", f"non-numeric grant {raw!r}") from None
        if not value >= 0 or value == float("inf"):
            raise _Reject("special_needs", f"invalid grant amount {raw!r}")
        return value

    def record(self, get, year: int) -> MobilityRecord:
        home = self.institution("home_institution", get("home_institution"))
        host = self.institution("host_institution", get("host_institution"))
        home_c = self.country("home_country", get("home_country"))
        host_c = self.country("host_country", get("host_country"))
        if home == host:
            raise _Reject("host_institution", "home and host institution are identical")
        gender = Gender(self.gender.get(get("gender").strip().lower(), Gender.UNKNOWN.value))
        fos = self.field_of_study(get("field_of_study"))
        mob = MobilityType(self.mobility.get(get("mobility_type").strip().lower(), MobilityType.OTHER.value))
        grant = self.grant(get("special_needs"))
        return MobilityRecord(year, home, host, home_c, host_c, gender, fos, mob, grant)


def _open_text(source: IO[bytes] | str | os.PathLike) -> tuple[IO[str], str]:
    if isinstance(source, (str, os.PathLike)):
        try:
            raw = Path(source).read_bytes()
        except OSError as exc:
            raise DataError(f"cannot read {source}: {exc}") from exc
        name = os.fspath(source)
    else:
        try:
            raw = source.read()
        except (OSError, ValueError) as exc:
            raise DataError(f"cannot read stream: {exc}") from exc
        name = getattr(source, "name", "<stream>")
        if not isinstance(name, str):
            name = "<stream>"
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise DataError(f"{name}: not valid UTF-8 ({exc})") from exc
    return io.StringIO(text, newline=""), name


def parse_records(
    source: IO[bytes] | str | os.PathLike,
    schema: SchemaMap,
    *,
    file_year: int | None = None,
    name: str | None = None,
) -> tuple[list[MobilityRecord], list[RejectReport]]:
    """Parse one delimited file into records plus per-row rejects.

    Row numbers in reject reports are physical line numbers (the header is
    line 1). A missing bound column or an unreadable stream is fatal.
    """
    if file_year is not None and file_year != schema.year:
        raise SchemaError(f"schema year {schema.year} does not match file year {file_year}")
    text, src_name = _open_text(source)
    name = name or os.path.basename(src_name)
    reader = csv.DictReader(text, delimiter=schema.delimiter)
    header = reader.fieldnames or []
    stripped = {h.strip(): h for h in header}
    cols = {}
    for canon, label in schema.column_bindings.items():
        if label not in stripped:
            raise SchemaError(f"{name}: missing column {label!r} (bound to {canon})")
        cols[canon] = stripped[label]

    decoder = _Decoder(schema)
    records, rejects = [], []
    for row in reader:
        line = reader.line_num
        if None in row or any(row.get(c) is None for c in cols.values()):
            rejects.append(RejectReport(name, line, "*", "wrong number of columns"))
            continue
        try:
            records.append(decoder.record(lambda f: row[cols[f]], schema.year))
        except _Reject as r:
            rejects.append(RejectReport(name, line, r.field, r.cause))
    if decoder.missing_grant:
        log.warning("%s: %d rows with empty special-needs field read as grant 0", name, decoder.missing_grant)
    return records, rejects


def parse_directory(
    data_dir: str | os.PathLike, schemas: Mapping[int, SchemaMap]
) -> tuple[list[MobilityRecord], list[RejectReport]]:
    """Parse every configured year's file found under ``data_dir``."""
    records: list[MobilityRecord] = []
    rejects: list[RejectReport] = []
    for year in sorted(schemas):
        schema = schemas[year]
        path = Path(data_dir) / schema.filename
        if not path.exists():
            raise DataError(f"no data file for {year}: {path}")
        recs, rej = parse_records(path, schema)
        records.extend(recs)
        rejects.extend(rej)
    return records, rejects


def filter_cohort(
    records: Iterable[MobilityRecord],
    mobility_type: MobilityType | None = MobilityType.STUDY,
    special_needs_only: bool = False,
    gender: Gender | None = None,
    year: int | None = None,
) -> list[MobilityRecord]:
    return [
        r
        for r in records
        if (mobility_type is None or r.mobility_type == mobility_type)
        and (not special_needs_only or r.special_needs_grant > 0)
        and (gender is None or r.gender == gender)
        and (year is None or r.year == year)
    ]


# --- normalized record files and reject reports ------------------------------

RECORD_COLUMNS = ("year",) + CANONICAL_FIELDS[:-1] + ("special_needs_grant",)
REJECT_COLUMNS = ("file", "row", "field", "cause")


def write_records(records: Iterable[MobilityRecord], stream: IO[str]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(RECORD_COLUMNS)
    for r in records:
        w.writerow(
            [
                r.year,
                r.home_institution.normalized,
                r.host_institution.normalized,
                r.home_country,
                r.host_country,
                r.gender.value,
                r.field_of_study,
                r.mobility_type.value,
                repr(float(r.special_needs_grant)),
            ]
        )


def read_records(stream: IO[str]) -> list[MobilityRecord]:
    """Read a file produced by :func:`write_records`; any bad row is fatal."""
    reader = csv.DictReader(stream)
    if tuple(reader.fieldnames or ()) != RECORD_COLUMNS:
        raise SchemaError(f"not a normalized record file: header {reader.fieldnames}")
    schema = SchemaMap(
        0,
        {f: f for f in CANONICAL_FIELDS[:-1]} | {"special_needs": "special_needs_grant"},
        {
            "special_needs": {"kind": "amount"},
            "gender": {"F": ["F"], "M": ["M"]},
            "mobility_type": {"Study": ["Study"], "Placement": ["Placement"]},
        },
    )
    decoder = _Decoder(schema)
    out = []
    for row in reader:
        row = dict(row)
        row["special_needs"] = row["special_needs_grant"]
        try:
            out.append(decoder.record(row.__getitem__, int(row["year"])))
        except (_Reject, ValueError) as exc:
            raise DataError(f"line {reader.line_num}: {getattr(exc, 'cause', exc)}") from None
    return out


def write_rejects(rejects: Iterable[RejectReport], stream: IO[str]) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(REJECT_COLUMNS)
    for r in rejects:
        w.writerow([r.file, r.row, r.field, r.cause])
