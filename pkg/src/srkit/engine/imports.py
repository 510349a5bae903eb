"""Corpus parsing for paper import.

Both parsers are total over text input: structural problems with the whole
payload raise ``EngineError(E_FORMAT)``, problems with a single row land in
the reject list as ``(line, reason)`` and never abort the rest.
"""

from __future__ import annotations

import csv
import io
import re

from .errors import E_FORMAT, EngineError

CSV_HEADER = ["bibkey", "title", "authors", "venue", "year", "abstract", "link"]

_YEAR_RANGE = (1900, 2100)


def _check_year(raw) -> int:
    year = int(str(raw).strip())
    if not _YEAR_RANGE[0] <= year <= _YEAR_RANGE[1]:
        raise ValueError(year)
    return year


def normalized_title_year(title: str, year: int) -> str:
    """Fallback dedup key for papers imported under different bibkeys."""
    t = re.sub(r"[^a-z0-9]+", " ", title.lower()).strip()
    return f"{t}|{year}"


def parse_csv(payload: str) -> tuple[list[dict], list[tuple[int, str]]]:
    try:
        reader = csv.reader(io.StringIO(payload))
        try:
            header = next(reader)
        except StopIteration:
            raise EngineError(E_FORMAT, "empty payload")
        if header != CSV_HEADER:
            raise EngineError(
                E_FORMAT,
                f"header must be exactly {','.join(CSV_HEADER)!r}",
            )
        raw_rows = [(reader.line_num, row) for row in reader]
    except csv.Error as exc:
        raise EngineError(E_FORMAT, f"malformed CSV: {exc}")

    rows: list[dict] = []
    rejects: list[tuple[int, str]] = []
    for line, row in raw_rows:
        if not any(cell.strip() for cell in row):
            continue
        if len(row) != len(CSV_HEADER):
            rejects.append((line, "wrong column count"))
            continue
        rec = dict(zip(CSV_HEADER, (cell.strip() for cell in row)))
        if not rec["title"]:
            rejects.append((line, "title required"))
            continue
        if not rec["bibkey"]:
            rejects.append((line, "bibkey required"))
            continue
        try:
            rec["year"] = _check_year(rec["year"])
        except ValueError:
            rejects.append((line, "year invalid"))
            continue
        rec["authors"] = [a.strip() for a in rec["authors"].split(";") if a.strip()]
        rec["abstract"] = rec["abstract"] or None
        rec["link"] = rec["link"] or None
        rows.append({"line": line, **rec})
    return rows, rejects


_ENTRY_TYPES = {"article", "inproceedings", "book"}
_ENTRY_RE = re.compile(r"@\s*([A-Za-z]+)\s*\{")


def _read_value(text: str, i: int) -> tuple[str, int]:
    """Read a field value starting at i: {...} (balanced), \"...\", or bare."""
    while i < len(text) and text[i] in " \t\r\n":
        i += 1
    if i < len(text) and text[i] == "{":
        depth = 0
        start = i
        while i < len(text):
            if text[i] == "{":
                depth += 1
            elif text[i] == "}":
                depth -= 1
                if depth == 0:
                    return text[start + 1 : i], i + 1
            i += 1
        raise ValueError("unbalanced braces")
    if i < len(text) and text[i] == '"':
        j = text.find('"', i + 1)
        if j < 0:
            raise ValueError("unterminated string")
        return text[i + 1 : j], j + 1
    j = i
    while j < len(text) and text[j] not in ",}\n":
        j += 1
    return text[i:j], j


def _clean(value: str) -> str:
    value = re.sub(r"[{}]", "", value)
    return re.sub(r"\s+", " ", value).strip()


def parse_bibtex(payload: str) -> tuple[list[dict], list[tuple[int, str]]]:
    rows: list[dict] = []
    rejects: list[tuple[int, str]] = []
    entries = list(_ENTRY_RE.finditer(payload))
    if not entries:
        if payload.strip():
            raise EngineError(E_FORMAT, "no bibliography entries found")
        raise EngineError(E_FORMAT, "empty payload")

    for m in entries:
        line = payload.count("\n", 0, m.start()) + 1
        etype = m.group(1).lower()
        if etype == "comment":
            continue
        if etype not in _ENTRY_TYPES:
            rejects.append((line, f"unsupported entry type @{etype}"))
            continue
        i = m.end()
        j = payload.find(",", i)
        brace = payload.find("}", i)
        if j < 0 or (0 <= brace < j):
            rejects.append((line, "entry key required"))
            continue
        key = payload[i:j].strip()
        if not key:
            rejects.append((line, "entry key required"))
            continue
        fields: dict[str, str] = {}
        i = j + 1
        try:
            while True:
                while i < len(payload) and payload[i] in " \t\r\n,":
                    i += 1
                if i >= len(payload):
                    raise ValueError("unterminated entry")
                if payload[i] == "}":
                    break
                eq = payload.find("=", i)
                if eq < 0:
                    raise ValueError("field without '='")
                name = payload[i:eq].strip().lower()
                if not re.fullmatch(r"[a-z][a-z0-9_-]*", name):
                    raise ValueError(f"bad field name {name!r}")
                value, i = _read_value(payload, eq + 1)
                fields[name] = _clean(value)
        except ValueError as exc:
            rejects.append((line, str(exc)))
            continue

        title = fields.get("title", "")
        if not title:
            rejects.append((line, "title required"))
            continue
        try:
            year = _check_year(fields.get("year", ""))
        except ValueError:
            rejects.append((line, "year invalid"))
            continue
        venue = fields.get("journal") or fields.get("booktitle") or fields.get("publisher") or ""
        link = fields.get("url")
        if not link and fields.get("doi"):
            doi = fields["doi"]
            link = doi if doi.startswith("http") else f"https://doi.org/{doi}"
        authors = [a.strip() for a in re.split(r"\s+and\s+", fields.get("author", "")) if a.strip()]
        rows.append(
            {
                "line": line,
                "bibkey": key,
                "title": title,
                "authors": authors,
                "venue": venue,
                "year": year,
                "abstract": fields.get("abstract") or None,
                "link": link,
            }
        )
    return rows, rejects
