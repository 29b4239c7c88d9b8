"""CSV ingestion and emission for tunneling records and sieve tests.

Record files carry one row per training/evaluation sample with the fixed
header below; empty cells mean an absent optional field. Sieve files
carry one row per (sample, sieve); a ``sieve_mm`` of 0 is the pan row.
Floats are written with ``repr`` so parse(emit(records)) reproduces every
field bit-exactly.
"""

from __future__ import annotations

import csv
import io
from typing import Sequence

from .domain import MachineSetting, RockMassState, SieveAnalysis, TunnelingRecord
from .errors import CsvFormatError, InvalidInputError

RECORDS_HEADER = ("chainage_m", "src", "ucs_mpa", "rqd_pct", "cai", "q_pct",
                  "ci", "m_mm", "mgt", "th_kn", "tor_knm", "pr_mm_min", "ef_m3_mm")

SIEVE_HEADER = ("sample_id", "sieve_mm", "retained_g")


def _as_text(data: bytes | str) -> str:
    if isinstance(data, bytes):
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CsvFormatError(f"not valid UTF-8: {exc}") from None
    return data


def _cell_float(value: str, row: int, column: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise CsvFormatError(
            f"row {row}, column {column!r}: not a number: {value!r}") from None


def _cell_int(value: str, row: int, column: str) -> int:
    number = _cell_float(value, row, column)
    if number != int(number):
        raise CsvFormatError(f"row {row}, column {column!r}: not an integer: {value!r}")
    return int(number)


def _optional_float(value: str, row: int, column: str):
    return None if value.strip() == "" else _cell_float(value, row, column)


def parse_records_csv(data: bytes | str) -> list[TunnelingRecord]:
    """Parse tunneling records; errors name the offending row and column."""
    reader = csv.reader(io.StringIO(_as_text(data)))
    try:
        header = next(reader)
    except StopIteration:
        raise CsvFormatError("empty file: missing header row") from None
    if tuple(h.strip() for h in header) != RECORDS_HEADER:
        raise CsvFormatError(
            f"bad header: expected {','.join(RECORDS_HEADER)!r}, got {','.join(header)!r}")
    records = []
    for row_no, row in enumerate(reader, start=2):
        if not row or all(cell.strip() == "" for cell in row):
            continue
        if len(row) != len(RECORDS_HEADER):
            raise CsvFormatError(
                f"row {row_no}: expected {len(RECORDS_HEADER)} cells, got {len(row)}")
        cells = dict(zip(RECORDS_HEADER, row))
        try:
            rock = RockMassState(
                src=_cell_int(cells["src"], row_no, "src"),
                ucs=_cell_float(cells["ucs_mpa"], row_no, "ucs_mpa"),
                rqd=_cell_float(cells["rqd_pct"], row_no, "rqd_pct"),
                cai=_cell_float(cells["cai"], row_no, "cai"),
                q=_cell_float(cells["q_pct"], row_no, "q_pct"),
                ci=_cell_float(cells["ci"], row_no, "ci"),
                m=_cell_float(cells["m_mm"], row_no, "m_mm"),
                mgt=_cell_int(cells["mgt"], row_no, "mgt"),
            )
            machine = MachineSetting(
                th=_cell_float(cells["th_kn"], row_no, "th_kn"),
                tor=_cell_float(cells["tor_knm"], row_no, "tor_knm"),
            )
            record = TunnelingRecord(
                rock=rock, machine=machine,
                pr=_optional_float(cells["pr_mm_min"], row_no, "pr_mm_min"),
                ef=_optional_float(cells["ef_m3_mm"], row_no, "ef_m3_mm"),
                chainage=_optional_float(cells["chainage_m"], row_no, "chainage_m"),
            )
        except InvalidInputError as exc:
            raise CsvFormatError(f"row {row_no}, column {exc.field!r}: {exc}") from None
        records.append(record)
    return records


def emit_records_csv(records: Sequence[TunnelingRecord]) -> str:
    """Inverse of :func:`parse_records_csv`; field-exact round trip."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(RECORDS_HEADER)
    for rec in records:
        writer.writerow([
            "" if rec.chainage is None else repr(rec.chainage),
            rec.rock.src, repr(rec.rock.ucs), repr(rec.rock.rqd), repr(rec.rock.cai),
            repr(rec.rock.q), repr(rec.rock.ci), repr(rec.rock.m), rec.rock.mgt,
            repr(rec.machine.th), repr(rec.machine.tor),
            "" if rec.pr is None else repr(rec.pr),
            "" if rec.ef is None else repr(rec.ef),
        ])
    return out.getvalue()


def parse_sieve_csv(data: bytes | str) -> list[SieveAnalysis]:
    """Parse sieve tests grouped by sample id; bins sorted coarsest first."""
    reader = csv.reader(io.StringIO(_as_text(data)))
    try:
        header = next(reader)
    except StopIteration:
        raise CsvFormatError("empty file: missing header row") from None
    if tuple(h.strip() for h in header) != SIEVE_HEADER:
        raise CsvFormatError(
            f"bad header: expected {','.join(SIEVE_HEADER)!r}, got {','.join(header)!r}")
    samples: dict[str, dict] = {}
    for row_no, row in enumerate(reader, start=2):
        if not row or all(cell.strip() == "" for cell in row):
            continue
        if len(row) != 3:
            raise CsvFormatError(f"row {row_no}: expected 3 cells, got {len(row)}")
        sample_id = row[0].strip()
        if not sample_id:
            raise CsvFormatError(f"row {row_no}, column 'sample_id': must be non-empty")
        sieve = _cell_float(row[1], row_no, "sieve_mm")
        mass = _cell_float(row[2], row_no, "retained_g")
        entry = samples.setdefault(sample_id, {"bins": {}, "pan": None})
        if sieve == 0.0:
            if entry["pan"] is not None:
                raise CsvFormatError(
                    f"row {row_no}: duplicate pan row for sample {sample_id!r}")
            entry["pan"] = mass
        else:
            if sieve in entry["bins"]:
                raise CsvFormatError(
                    f"row {row_no}: duplicate sieve {sieve} mm for sample {sample_id!r}")
            entry["bins"][sieve] = mass
    analyses = []
    for sample_id, entry in samples.items():
        bins = tuple(sorted(entry["bins"].items(), key=lambda kv: -kv[0]))
        try:
            analyses.append(SieveAnalysis(sample_id=sample_id, bins=bins,
                                          pan_mass=entry["pan"] or 0.0))
        except InvalidInputError as exc:
            raise CsvFormatError(f"sample {sample_id!r}: {exc}") from None
    return analyses
