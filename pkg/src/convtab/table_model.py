"""Typed in-memory tables.

A table is loaded once from CSV/TSV, every cell gets a semantic type from a
deterministic rule cascade, and each column type is decided by majority vote
over its cells. Everything here is immutable after load.
"""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from enum import Enum

from .errors import EmptyInputError, InvalidHeaderError

# Payload of a normalized cell: number, year, (year, month, day), flag, or text.
NormalizedValue = "Decimal | int | tuple | bool | str"


class CellType(Enum):
    """Semantic cell/column types. Enumeration order is the vote tie-break order."""

    COUNTRY = "COUNTRY"
    LOCATION = "LOCATION"
    PERSON = "PERSON"
    DATE = "DATE"
    YEAR = "YEAR"
    TIME = "TIME"
    TEXT = "TEXT"
    NUMBER = "NUMBER"
    BOOLEAN = "BOOLEAN"
    SEQUENCE = "SEQUENCE"
    UNIT = "UNIT"


CELL_TYPE_ORDER = list(CellType)

_BOOLEAN_WORDS = {"true", "false", "yes", "no"}

_YEAR_RE = re.compile(r"^\d{4}$")

_MONTHS = {
    "january": 1, "february": 2, "march": 3, "april": 4, "may": 5, "june": 6,
    "july": 7, "august": 8, "september": 9, "october": 10, "november": 11,
    "december": 12,
    "jan": 1, "feb": 2, "mar": 3, "apr": 4, "jun": 6, "jul": 7, "aug": 8,
    "sep": 9, "sept": 9, "oct": 10, "nov": 11, "dec": 12,
}

_DATE_ISO_RE = re.compile(r"^(\d{4})-(\d{1,2})-(\d{1,2})$")
_DATE_DMY_RE = re.compile(r"^(\d{1,2})\s+([a-z]+)\s+(\d{4})$")
_DATE_MDY_RE = re.compile(r"^([a-z]+)\s+(\d{1,2}),?\s+(\d{4})$")

_TIME_RE = re.compile(r"^\d{1,2}:\d{2}(:\d{2})?\s*([ap]\.?m\.?)?$")

_NUMBER_RE = re.compile(r"^[+-]?(\d{1,3}(,\d{3})+|\d+)(\.\d+)?%?$")

_UNIT_TOKENS = {
    "kg", "g", "mg", "t", "lb", "lbs", "oz", "km", "m", "cm", "mm", "mi",
    "ft", "in", "yd", "kph", "mph", "s", "sec", "min", "hr", "hrs", "l",
    "ml", "gal", "%", "pts", "pct",
}
_UNIT_RE = re.compile(
    r"^[+-]?(\d{1,3}(,\d{3})+|\d+)(\.\d+)?\s*([a-z%]+\.?)$"
)
_CURRENCY_RE = re.compile(r"^[$€£¥]\s*(\d{1,3}(,\d{3})+|\d+)(\.\d+)?$")

_ORDINAL_RE = re.compile(r"^\d+(st|nd|rd|th)$")
_ORDINAL_WORDS = {
    "first", "second", "third", "fourth", "fifth", "sixth", "seventh",
    "eighth", "ninth", "tenth", "eleventh", "twelfth",
}
_ROMAN_RE = re.compile(
    r"^(?=[mdclxvi])m{0,4}(cm|cd|d?c{0,3})(xc|xl|l?x{0,3})(ix|iv|v?i{0,3})$"
)

# Casefolded country gazetteer (UN member states and a few common short forms).
COUNTRIES = frozenset(c.casefold() for c in [
    "Afghanistan", "Albania", "Algeria", "Andorra", "Angola", "Argentina",
    "Armenia", "Australia", "Austria", "Azerbaijan", "Bahamas", "Bahrain",
    "Bangladesh", "Barbados", "Belarus", "Belgium", "Belize", "Benin",
    "Bhutan", "Bolivia", "Bosnia and Herzegovina", "Botswana", "Brazil",
    "Brunei", "Bulgaria", "Burkina Faso", "Burundi", "Cambodia", "Cameroon",
    "Canada", "Cape Verde", "Central African Republic", "Chad", "Chile",
    "China", "Colombia", "Comoros", "Congo", "Costa Rica", "Croatia", "Cuba",
    "Cyprus", "Czech Republic", "Czechia", "Denmark", "Djibouti", "Dominica",
    "Dominican Republic", "East Timor", "Ecuador", "Egypt", "El Salvador",
    "Equatorial Guinea", "Eritrea", "Estonia", "Eswatini", "Ethiopia",
    "Fiji", "Finland", "France", "Gabon", "Gambia", "Georgia", "Germany",
    "Ghana", "Greece", "Grenada", "Guatemala", "Guinea", "Guinea-Bissau",
    "Guyana", "Haiti", "Honduras", "Hungary", "Iceland", "India",
    "Indonesia", "Iran", "Iraq", "Ireland", "Israel", "Italy",
    "Ivory Coast", "Jamaica", "Japan", "Jordan", "Kazakhstan", "Kenya",
    "Kiribati", "Kosovo", "Kuwait", "Kyrgyzstan", "Laos", "Latvia",
    "Lebanon", "Lesotho", "Liberia", "Libya", "Liechtenstein", "Lithuania",
    "Luxembourg", "Madagascar", "Malawi", "Malaysia", "Maldives", "Mali",
    "Malta", "Marshall Islands", "Mauritania", "Mauritius", "Mexico",
    "Micronesia", "Moldova", "Monaco", "Mongolia", "Montenegro", "Morocco",
    "Mozambique", "Myanmar", "Namibia", "Nauru", "Nepal", "Netherlands",
    "New Zealand", "Nicaragua", "Niger", "Nigeria", "North Korea",
    "North Macedonia", "Norway", "Oman", "Pakistan", "Palau", "Panama",
    "Papua New Guinea", "Paraguay", "Peru", "Philippines", "Poland",
    "Portugal", "Qatar", "Romania", "Russia", "Rwanda", "Saint Lucia",
    "Samoa", "San Marino", "Saudi Arabia", "Senegal", "Serbia",
    "Seychelles", "Sierra Leone", "Singapore", "Slovakia", "Slovenia",
    "Solomon Islands", "Somalia", "South Africa", "South Korea",
    "South Sudan", "Spain", "Sri Lanka", "Sudan", "Suriname", "Sweden",
    "Switzerland", "Syria", "Taiwan", "Tajikistan", "Tanzania", "Thailand",
    "Togo", "Tonga", "Trinidad and Tobago", "Tunisia", "Turkey",
    "Turkmenistan", "Tuvalu", "Uganda", "Ukraine", "United Arab Emirates",
    "United Kingdom", "UK", "United States", "USA", "Uruguay", "Uzbekistan",
    "Vanuatu", "Venezuela", "Vietnam", "Yemen", "Zambia", "Zimbabwe",
    "Great Britain", "Soviet Union", "West Germany", "East Germany",
    "Yugoslavia", "Czechoslovakia", "Scotland", "Wales", "England",
])


def normalize_text(raw: str) -> str:
    """Casefold and collapse internal whitespace."""
    return " ".join(raw.split()).casefold()


def infer_cell_type(raw: str) -> CellType:
    """Classify a raw cell text via the fixed rule cascade. Pure and total."""
    text = " ".join(raw.split())
    folded = text.casefold()
    if not folded:
        return CellType.TEXT
    if folded in _BOOLEAN_WORDS:
        return CellType.BOOLEAN
    if _YEAR_RE.match(folded) and 1000 <= int(folded) <= 2999:
        return CellType.YEAR
    if _parse_date(folded) is not None:
        return CellType.DATE
    if _TIME_RE.match(folded):
        return CellType.TIME
    if _NUMBER_RE.match(folded.replace(" ", "")):
        return CellType.NUMBER
    m = _UNIT_RE.match(folded)
    if m and m.group(4).rstrip(".") in _UNIT_TOKENS:
        return CellType.UNIT
    if _CURRENCY_RE.match(folded):
        return CellType.UNIT
    if folded in COUNTRIES:
        return CellType.COUNTRY
    if (_ORDINAL_RE.match(folded) or folded in _ORDINAL_WORDS
            or _ROMAN_RE.match(folded)):
        return CellType.SEQUENCE
    return CellType.TEXT


def _parse_date(folded: str):
    m = _DATE_ISO_RE.match(folded)
    if m:
        y, mo, d = int(m.group(1)), int(m.group(2)), int(m.group(3))
        if 1 <= mo <= 12 and 1 <= d <= 31:
            return (y, mo, d)
        return None
    m = _DATE_DMY_RE.match(folded)
    if m and m.group(2) in _MONTHS:
        d = int(m.group(1))
        if 1 <= d <= 31:
            return (int(m.group(3)), _MONTHS[m.group(2)], d)
        return None
    m = _DATE_MDY_RE.match(folded)
    if m and m.group(1) in _MONTHS:
        d = int(m.group(2))
        if 1 <= d <= 31:
            return (int(m.group(3)), _MONTHS[m.group(1)], d)
    return None


def _parse_decimal(folded: str):
    stripped = folded.replace(",", "").replace(" ", "").rstrip("%")
    try:
        return Decimal(stripped)
    except InvalidOperation:
        return None


def normalize_value(raw: str, cell_type: CellType):
    """Typed payload for comparisons; falls back to normalized text."""
    folded = normalize_text(raw)
    if cell_type is CellType.NUMBER:
        value = _parse_decimal(folded)
        return value if value is not None else folded
    if cell_type is CellType.YEAR:
        if _YEAR_RE.match(folded):
            return int(folded)
        return folded
    if cell_type is CellType.UNIT:
        m = _UNIT_RE.match(folded) or _CURRENCY_RE.match(folded)
        if m:
            value = _parse_decimal(m.group(1) + (m.group(3) or ""))
            if value is not None:
                return value
        # Bare numbers compare against a unit column by magnitude.
        value = _parse_decimal(folded)
        return value if value is not None else folded
    if cell_type is CellType.DATE:
        date = _parse_date(folded)
        return date if date is not None else folded
    if cell_type is CellType.BOOLEAN:
        if folded in _BOOLEAN_WORDS:
            return folded in ("true", "yes")
        return folded
    return folded


def infer_header_type(cell_types: list) -> CellType:
    """Majority vote over non-TEXT member types; ties break on enum order."""
    votes = [t for t in cell_types if t is not CellType.TEXT]
    if not votes:
        return CellType.TEXT
    counts = {}
    for t in votes:
        counts[t] = counts.get(t, 0) + 1
    best = max(counts.values())
    for t in CELL_TYPE_ORDER:
        if counts.get(t) == best:
            return t
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class Cell:
    raw: str
    normalized: object
    type: CellType
    row: int
    col: int


@dataclass(frozen=True)
class Column:
    header: str
    header_tokens: tuple
    type: CellType
    cells: tuple


@dataclass(frozen=True)
class Table:
    id: str
    columns: tuple
    n_rows: int
    n_cols: int
    _by_name: dict = field(default_factory=dict, repr=False, compare=False)

    def column(self, name: str) -> Column:
        return self._by_name.get(normalize_text(name))

    def column_index(self, name: str):
        key = normalize_text(name)
        for i, col in enumerate(self.columns):
            if normalize_text(col.header) == key:
                return i
        return None


_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list:
    """Casefolded alphanumeric tokens."""
    return _TOKEN_RE.findall(text.casefold())


def _dedupe_headers(headers: list) -> list:
    seen = {}
    out = []
    for h in headers:
        key = normalize_text(h)
        seen[key] = seen.get(key, 0) + 1
        if seen[key] > 1:
            h = f"{h}#{seen[key]}"
        out.append(h)
    return out


def load_table(source, fmt: str = "csv", table_id: str = "table") -> Table:
    """Build a typed Table from CSV/TSV bytes, text, or a file object.

    The first record is the header row. Short rows are padded with empty
    text, long rows truncated, so the grid is always rectangular.
    """
    if isinstance(source, bytes):
        stream = io.StringIO(source.decode("utf-8"))
    elif isinstance(source, str):
        stream = io.StringIO(source)
    else:
        data = source.read()
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        stream = io.StringIO(data)
    delimiter = "\t" if fmt == "tsv" else ","
    reader = csv.reader(stream, delimiter=delimiter)
    records = [row for row in reader]
    if not records:
        raise EmptyInputError("no header row")
    headers = [h.strip() for h in records[0]]
    if not headers or all(h == "" for h in headers):
        raise InvalidHeaderError("header row has no columns")
    headers = _dedupe_headers(headers)
    arity = len(headers)
    rows = []
    for rec in records[1:]:
        rec = list(rec[:arity]) + [""] * max(0, arity - len(rec))
        rows.append([c.strip() for c in rec])

    columns = []
    for c, header in enumerate(headers):
        cells = []
        for r, rec in enumerate(rows):
            raw = rec[c]
            ctype = infer_cell_type(raw)
            cells.append(Cell(raw=raw, normalized=normalize_value(raw, ctype),
                              type=ctype, row=r, col=c))
        n_empty = sum(1 for cell in cells if not cell.raw.strip())
        if cells and n_empty * 2 >= len(cells):
            col_type = CellType.TEXT  # sparse columns vote unreliably
        else:
            col_type = infer_header_type([cell.type for cell in cells])
        columns.append(Column(header=header,
                              header_tokens=tuple(tokenize(header)),
                              type=col_type, cells=tuple(cells)))
    by_name = {normalize_text(col.header): col for col in columns}
    return Table(id=table_id, columns=tuple(columns), n_rows=len(rows),
                 n_cols=arity, _by_name=by_name)


def load_table_file(path, table_id=None) -> Table:
    """Load from a filesystem path; format chosen by extension (.tsv vs .csv)."""
    path = str(path)
    fmt = "tsv" if path.endswith(".tsv") else "csv"
    with open(path, "rb") as fh:
        return load_table(fh, fmt=fmt, table_id=table_id or path)
