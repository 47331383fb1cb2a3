"""graph6 reading and writing (McKay's format, simple undirected graphs).

Header: n < 63 is one byte n+63; n < 258048 is 126 then three 6-bit bytes;
otherwise 126 126 then six 6-bit bytes. The body packs the upper triangle
column by column (x(0,1), x(0,2), x(1,2), x(0,3), ...) six bits per byte,
most significant first, each byte offset by 63.
"""

from __future__ import annotations

from typing import Iterable, Iterator

from .errors import InputError
from .graph import Graph

MAX_ORDER = 68719476735


def _as_bytes(text: bytes | str) -> bytes:
    if isinstance(text, str):
        try:
            return text.encode("ascii")
        except UnicodeEncodeError as exc:
            raise InputError("graph6 text must be ASCII", exc.start) from None
    return bytes(text)


def _parse_n(data: bytes) -> tuple[int, int]:
    if not data:
        raise InputError("empty graph6 string", 0)
    for i, b in enumerate(data[:8]):
        if not 63 <= b <= 126:
            raise InputError(f"invalid graph6 header byte {b!r}", i)
    if data[0] != 126:
        return data[0] - 63, 1
    if len(data) >= 2 and data[1] == 126:
        if len(data) < 8:
            raise InputError("truncated 8-byte graph6 header", len(data))
        n = 0
        for b in data[2:8]:
            n = (n << 6) | (b - 63)
        if n < 258048:
            raise InputError(f"non-canonical 8-byte header for n={n}", 0)
        return n, 8
    if len(data) < 4:
        raise InputError("truncated 4-byte graph6 header", len(data))
    n = 0
    for b in data[1:4]:
        n = (n << 6) | (b - 63)
    if n < 63:
        raise InputError(f"non-canonical 4-byte header for n={n}", 0)
    return n, 4


def parse_graph6(text: bytes | str, max_order: int = 4096) -> Graph:
    data = _as_bytes(text).rstrip(b"\r\n")
    if data.startswith(b">>graph6<<"):
        data = data[10:]
        base = 10
    else:
        base = 0
    if data.startswith(b":") or data.startswith(b"&"):
        raise InputError("sparse6/digraph6 input is not graph6", base)
    n, off = _parse_n(data)
    if n > max_order:
        raise InputError(f"order {n} exceeds limit {max_order}", base)
    nbits = n * (n - 1) // 2
    nbytes = (nbits + 5) // 6
    body = data[off:]
    if len(body) < nbytes:
        raise InputError(f"truncated edge data: need {nbytes} bytes, got {len(body)}",
                         base + off + len(body))
    if len(body) > nbytes:
        raise InputError("trailing bytes after edge data", base + off + nbytes)
    edges = []
    k = 0
    for j, b in enumerate(body):
        if not 63 <= b <= 126:
            raise InputError(f"invalid graph6 data byte {b!r}", base + off + j)
        x = b - 63
        for s in range(5, -1, -1):
            if k < nbits and (x >> s) & 1:
                edges.append(k)
            elif k >= nbits and (x >> s) & 1:
                raise InputError("nonzero padding bits", base + off + j)
            k += 1
    # map bit index to (i, j), column-major over the upper triangle
    out = []
    col = 1
    start = 0
    for idx in edges:
        while idx >= start + col:
            start += col
            col += 1
        out.append((idx - start, col))
    return Graph(n, out)


def write_graph6(g: Graph) -> str:
    n = g.n
    if n < 63:
        head = [n + 63]
    elif n < 258048:
        head = [126] + [((n >> s) & 63) + 63 for s in (12, 6, 0)]
    elif n <= MAX_ORDER:
        head = [126, 126] + [((n >> s) & 63) + 63 for s in (30, 24, 18, 12, 6, 0)]
    else:
        raise InputError(f"order {n} too large for graph6")
    nbits = n * (n - 1) // 2
    bits = bytearray((nbits + 5) // 6 * 6)
    for u, v in g.edges:
        bits[v * (v - 1) // 2 + u] = 1
    body = []
    for i in range(0, len(bits), 6):
        x = 0
        for b in bits[i:i + 6]:
            x = (x << 1) | b
        body.append(x + 63)
    return bytes(head + body).decode("ascii")


def read_graph6_lines(lines: Iterable[bytes | str]) -> Iterator[tuple[int, Graph]]:
    """Parse a newline-delimited stream, yielding (line number, graph); blank lines skipped."""
    for lineno, line in enumerate(lines, 1):
        raw = _as_bytes(line).strip()
        if not raw:
            continue
        try:
            yield lineno, parse_graph6(raw)
        except InputError as exc:
            raise InputError(f"line {lineno}: {exc}") from None
