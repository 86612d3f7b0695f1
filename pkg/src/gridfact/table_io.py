"""Table ingestion and rendering.

Markdown: pipe-delimited GFM-style tables with ``\\|`` escapes.  HTML: the
first <table> element, with rowspan/colspan expanded by duplication.  Both
parsers repair recoverable damage (ragged rows, empty headers) instead of
rejecting, recording every repair in ParseDiagnostics; LLM-produced tables
must still be scorable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from html.parser import HTMLParser
from typing import NamedTuple, Optional

from .errors import MalformedMarkup, MissingSeparatorRow, NoTableFound
from .model import SourceFormat, Table, table_new


@dataclass
class ParseDiagnostics:
    """Repairs and oddities found while parsing; positions are 1-based lines."""

    warnings: list = field(default_factory=list)
    recovered: bool = False

    def add(self, pos: int, message: str) -> None:
        self.warnings.append((pos, message))
        self.recovered = True


class ParseResult(NamedTuple):
    table: Table
    diagnostics: ParseDiagnostics


_SEP_CELL_RE = re.compile(r"^:?-+:?$")


def _split_cells(s: str) -> list:
    """Split on unescaped pipes; resolves \\| and \\\\ escapes."""
    segs = []
    buf = []
    i = 0
    n = len(s)
    while i < n:
        ch = s[i]
        if ch == "\\" and i + 1 < n and s[i + 1] in "\\|":
            buf.append(s[i + 1])
            i += 2
            continue
        if ch == "|":
            segs.append("".join(buf))
            buf = []
            i += 1
            continue
        buf.append(ch)
        i += 1
    segs.append("".join(buf))
    return segs


def _row_cells(line: str) -> list:
    s = line.strip()
    segs = _split_cells(s)
    if s.startswith("|"):
        segs = segs[1:]
    if len(segs) > 1 and segs[-1] == "":
        segs = segs[:-1]
    return [c.strip() for c in segs]


def _has_unescaped_pipe(line: str) -> bool:
    i = 0
    n = len(line)
    while i < n:
        if line[i] == "\\":
            i += 2
            continue
        if line[i] == "|":
            return True
        i += 1
    return False


def _is_separator(line: str) -> bool:
    cells = _row_cells(line)
    return bool(cells) and all(_SEP_CELL_RE.match(c) for c in cells)


def _repair_headers(cells: list, pos: int, diag: ParseDiagnostics) -> list:
    headers = []
    for i, h in enumerate(cells):
        if not h.strip():
            headers.append(f"col_{i}")
            diag.add(pos, f"empty header in column {i} replaced with placeholder")
        else:
            headers.append(h)
    return headers


def _fit_width(cells: list, width: int, pos: int, diag: ParseDiagnostics) -> list:
    if len(cells) < width:
        diag.add(pos, f"row padded from {len(cells)} to {width} cells")
        return cells + [""] * (width - len(cells))
    if len(cells) > width:
        diag.add(pos, f"row truncated from {len(cells)} to {width} cells")
        return cells[:width]
    return cells


def parse_markdown(text: str) -> ParseResult:
    """Parse the first pipe table found in text.

    Raises NoTableFound when no line contains a pipe, MissingSeparatorRow
    when no pipe line is followed by a separator row.
    """
    lines = text.splitlines()
    header_idx: Optional[int] = None
    saw_pipe = False
    for i, line in enumerate(lines):
        if not _has_unescaped_pipe(line):
            continue
        saw_pipe = True
        if _is_separator(line):
            continue
        if i + 1 < len(lines) and _is_separator(lines[i + 1]):
            header_idx = i
            break
    if header_idx is None:
        if saw_pipe:
            raise MissingSeparatorRow("pipe rows present but no header/separator pair")
        raise NoTableFound("no pipe-delimited rows in input")

    diag = ParseDiagnostics()
    headers = _repair_headers(_row_cells(lines[header_idx]), header_idx + 1, diag)
    width = len(headers)
    rows = []
    for j in range(header_idx + 2, len(lines)):
        line = lines[j]
        if not _has_unescaped_pipe(line):
            break
        rows.append(_fit_width(_row_cells(line), width, j + 1, diag))
    table = table_new(headers, rows, SourceFormat.MARKDOWN)
    return ParseResult(table, diag)


def _escape_cell(text: str) -> str:
    text = text.replace("\\", "\\\\").replace("|", "\\|")
    # raw newlines cannot live inside a pipe table row
    return re.sub(r"\s*\n\s*", " ", text)


def render_markdown(t: Table) -> str:
    """Canonical pipe-table rendering; parse_markdown inverts it."""
    lines = ["| " + " | ".join(_escape_cell(h) for h in t.headers) + " |"]
    lines.append("| " + " | ".join("---" for _ in t.headers) + " |")
    for row in t.rows:
        lines.append("| " + " | ".join(_escape_cell(c) for c in row) + " |")
    return "\n".join(lines) + "\n"


class _Cell:
    __slots__ = ("text", "colspan", "rowspan", "is_header")

    def __init__(self, colspan: int, rowspan: int, is_header: bool):
        self.text = []
        self.colspan = colspan
        self.rowspan = rowspan
        self.is_header = is_header


def _span(attrs: dict, name: str) -> int:
    try:
        v = int(attrs.get(name, 1))
    except (TypeError, ValueError):
        return 1
    return max(1, v)


class _FirstTableParser(HTMLParser):
    """Collects rows of the first top-level <table>; nested tables flatten."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.table_depth = 0
        self.saw_table = False
        self.done = False
        self.rows: list = []
        self.row: Optional[list] = None
        self.cell: Optional[_Cell] = None
        self.diag = ParseDiagnostics()

    def _line(self) -> int:
        return self.getpos()[0]

    def _close_cell(self) -> None:
        if self.cell is not None and self.row is not None:
            self.row.append(self.cell)
        self.cell = None

    def _close_row(self) -> None:
        self._close_cell()
        if self.row is not None:
            self.rows.append(self.row)
        self.row = None

    def handle_starttag(self, tag, attrs):
        if self.done:
            return
        if tag == "table":
            self.table_depth += 1
            if self.table_depth == 1:
                self.saw_table = True
            else:
                self.diag.add(self._line(), "nested table flattened into cell text")
            return
        if self.table_depth != 1:
            return
        if tag == "tr":
            if self.row is not None:
                self.diag.add(self._line(), "row implicitly closed by new <tr>")
            self._close_row()
            self.row = []
        elif tag in ("td", "th"):
            if self.row is None:
                self.diag.add(self._line(), "cell outside <tr>; row opened implicitly")
                self.row = []
            if self.cell is not None:
                self.diag.add(self._line(), "cell implicitly closed by new cell")
                self._close_cell()
            a = dict(attrs)
            self.cell = _Cell(_span(a, "colspan"), _span(a, "rowspan"), tag == "th")

    def handle_endtag(self, tag):
        if self.done:
            return
        if tag == "table":
            if self.table_depth == 1:
                self._close_row()
                self.done = True
            self.table_depth = max(0, self.table_depth - 1)
            return
        if self.table_depth != 1:
            return
        if tag == "tr":
            self._close_row()
        elif tag in ("td", "th"):
            self._close_cell()

    def handle_data(self, data):
        if self.done:
            return
        if self.cell is not None and self.table_depth >= 1:
            self.cell.text.append(data)


def _cell_text(cell: _Cell) -> str:
    return " ".join("".join(cell.text).split())


def parse_html(text: str) -> ParseResult:
    """Parse the first <table> element; spans expand by duplication."""
    parser = _FirstTableParser()
    parser.feed(text)
    parser.close()
    if not parser.saw_table:
        raise NoTableFound("no <table> element in input")
    if not parser.done:
        parser._close_row()
    rows = parser.rows
    if not rows:
        raise MalformedMarkup("table has no rows")

    diag = parser.diag
    grid: list = []
    header_flags: list = []
    pending: dict = {}
    for cells in rows:
        row_out: dict = {}
        next_pending: dict = {}
        for c, (val, rem) in pending.items():
            row_out[c] = val
            if rem > 1:
                next_pending[c] = (val, rem - 1)
        col = 0
        any_header = False
        for cell in cells:
            while col in row_out:
                col += 1
            value = _cell_text(cell)
            any_header = any_header or cell.is_header
            if cell.colspan > 1 or cell.rowspan > 1:
                diag.add(1, f"cell spanning {cell.rowspan}x{cell.colspan} expanded by duplication")
            for k in range(cell.colspan):
                row_out[col + k] = value
                if cell.rowspan > 1:
                    next_pending[col + k] = (value, cell.rowspan - 1)
            col += cell.colspan
        pending = next_pending
        width = max(row_out) + 1 if row_out else 0
        grid.append([row_out.get(i, "") for i in range(width)])
        header_flags.append(any_header)

    if not any(grid):
        raise MalformedMarkup("table rows contain no cells")
    if not header_flags[0]:
        diag.add(1, "no <th> cells; first row used as header")
    headers = _repair_headers(grid[0], 1, diag)
    if not headers:
        raise MalformedMarkup("header row has no cells")
    width = len(headers)
    body = [_fit_width(r, width, i + 2, diag) for i, r in enumerate(grid[1:])]
    table = table_new(headers, body, SourceFormat.HTML)
    return ParseResult(table, diag)
