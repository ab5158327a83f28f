"""Graph file formats: graph6, sparse6 and a native multipole format.

graph6 encodes simple graphs only; sparse6 also carries loops and
parallel edges.  The native line-oriented multipole format additionally
records free ends and connectors.
"""

from __future__ import annotations

from typing import Optional

from .multipole import Multipole, MultipoleError, build_multipole


class FormatError(ValueError):
    """Malformed input; carries a human-readable position diagnostic."""


# ---------------------------------------------------------------------------
# bit plumbing shared by graph6/sparse6


def _encode_n(n: int) -> bytes:
    if n < 0:
        raise FormatError("vertex count must be non-negative")
    if n <= 62:
        return bytes([n + 63])
    if n <= 258047:
        return bytes(
            [126, ((n >> 12) & 63) + 63, ((n >> 6) & 63) + 63, (n & 63) + 63]
        )
    if n <= 68719476735:
        return bytes([126, 126] + [((n >> (6 * i)) & 63) + 63 for i in (5, 4, 3, 2, 1, 0)])
    raise FormatError("vertex count too large")


def _decode_n(data: bytes, pos: int) -> tuple[int, int]:
    if pos >= len(data):
        raise FormatError(f"byte {pos}: missing vertex count")
    c = data[pos]
    if c < 63 or c > 126:
        raise FormatError(f"byte {pos}: invalid character {c!r}")
    if c != 126:
        return c - 63, pos + 1
    if pos + 1 < len(data) and data[pos + 1] == 126:
        chunk = data[pos + 2 : pos + 8]
        if len(chunk) != 6:
            raise FormatError(f"byte {pos}: truncated vertex count")
        n = 0
        for b in chunk:
            n = (n << 6) | (b - 63)
        return n, pos + 8
    chunk = data[pos + 1 : pos + 4]
    if len(chunk) != 3:
        raise FormatError(f"byte {pos}: truncated vertex count")
    n = 0
    for b in chunk:
        n = (n << 6) | (b - 63)
    return n, pos + 4


def _bits_to_bytes(bits: list[int]) -> bytes:
    out = []
    for i in range(0, len(bits), 6):
        group = bits[i : i + 6]
        val = 0
        for b in group:
            val = (val << 1) | b
        out.append(val + 63)
    return bytes(out)


def _bytes_to_bits(data: bytes, start: int) -> list[int]:
    bits = []
    for pos in range(start, len(data)):
        c = data[pos]
        if c < 63 or c > 126:
            raise FormatError(f"byte {pos}: invalid character {c!r}")
        v = c - 63
        bits.extend(((v >> k) & 1) for k in (5, 4, 3, 2, 1, 0))
    return bits


def _strip_header(s: str, kind: str) -> str:
    s = s.strip()
    header = f">>{kind}<<"
    if s.startswith(header):
        s = s[len(header):]
    return s


# ---------------------------------------------------------------------------
# graph6


def write_graph6(m: Multipole) -> str:
    """Encode a simple graph; rejects free ends, loops and parallels."""
    if not m.is_graph():
        raise FormatError("graph6 cannot encode free ends")
    if not m.is_simple():
        raise FormatError("graph6 cannot encode loops or parallel edges")
    n = m.n
    adj = set()
    for a, b in m.edges:
        adj.add((min(a, b), max(a, b)))
    bits = []
    for j in range(1, n):
        for i in range(j):
            bits.append(1 if (i, j) in adj else 0)
    while len(bits) % 6:
        bits.append(0)
    return (_encode_n(n) + _bits_to_bytes(bits)).decode("ascii")


def read_graph6(s: str) -> Multipole:
    s = _strip_header(s, "graph6")
    data = s.encode("ascii")
    n, pos = _decode_n(data, 0)
    bits = _bytes_to_bits(data, pos)
    need = n * (n - 1) // 2
    if len(bits) < need:
        raise FormatError(
            f"byte {pos}: expected {need} adjacency bits, found {len(bits)}"
        )
    edges = []
    idx = 0
    for j in range(1, n):
        for i in range(j):
            if bits[idx]:
                edges.append((i, j))
            idx += 1
    if any(bits[need:]):
        raise FormatError("nonzero padding bits in graph6 data")
    return build_multipole(n, edges)


# ---------------------------------------------------------------------------
# sparse6


def write_sparse6(m: Multipole) -> str:
    """Encode a graph (loops and parallel edges allowed)."""
    if not m.is_graph():
        raise FormatError("sparse6 cannot encode free ends")
    n = m.n
    k = max(1, (n - 1).bit_length()) if n > 1 else 1
    edges = sorted((max(a, b), min(a, b)) for a, b in m.edges)
    bits: list[int] = []

    def put(x: int, width: int):
        for i in range(width - 1, -1, -1):
            bits.append((x >> i) & 1)

    v = 0
    for w, u in edges:
        if w == v:
            bits.append(0)
            put(u, k)
        elif w == v + 1:
            v += 1
            bits.append(1)
            put(u, k)
        else:
            v = w
            bits.append(1)
            put(w, k)
            bits.append(0)
            put(u, k)
    if k < 6 and n == (1 << k) and (-len(bits)) % 6 >= k and v < n - 1:
        bits.append(0)
    bits.extend([1] * ((-len(bits)) % 6))
    return ":" + (_encode_n(n) + _bits_to_bytes(bits)).decode("ascii")


def read_sparse6(s: str) -> Multipole:
    s = _strip_header(s, "sparse6")
    if not s.startswith(":"):
        raise FormatError("sparse6 data must start with ':'")
    data = s[1:].encode("ascii")
    n, pos = _decode_n(data, 0)
    bits = _bytes_to_bits(data, pos)
    k = max(1, (n - 1).bit_length()) if n > 1 else 1
    edges = []
    v = 0
    i = 0
    while i + k < len(bits):
        b = bits[i]
        x = 0
        for j in range(i + 1, i + 1 + k):
            x = (x << 1) | bits[j]
        i += 1 + k
        if b:
            v += 1
        if x >= n or v >= n:
            break
        if x > v:
            v = x
        else:
            edges.append((x, v))
    return build_multipole(n, edges)


def read_graph_text(s: str) -> Multipole:
    """Auto-detect graph6 / sparse6 / native multipole content."""
    t = s.strip()
    if t.startswith("MULTIPOLE"):
        return parse_multipole(s)
    if t.startswith(">>sparse6<<") or t.startswith(":"):
        return read_sparse6(t)
    return read_graph6(t)


def read_graph_file(path: str) -> Multipole:
    with open(path, "r", encoding="ascii") as fh:
        content = fh.read()
    try:
        return read_graph_text(content)
    except (FormatError, MultipoleError, UnicodeDecodeError) as exc:
        raise FormatError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# native multipole format
#
# MULTIPOLE
# VERTICES <n>
# EDGES
# <u> <v> | <u> - | - -        (each '-' introduces free end f0, f1, ... )
# CONNECTORS
# f0 f2 f5
# END


def serialize_multipole(m: Multipole) -> str:
    lines = ["MULTIPOLE", f"VERTICES {m.n}", "EDGES"]
    free_name: dict[tuple[int, int], str] = {}
    for i, (a, b) in enumerate(m.edges):
        parts = []
        for slot, end in ((0, a), (1, b)):
            if end is None:
                name = f"f{len(free_name)}"
                free_name[(i, slot)] = name
                parts.append("-")
            else:
                parts.append(str(end))
        lines.append(" ".join(parts))
    lines.append("CONNECTORS")
    for c in m.connectors:
        lines.append(" ".join(free_name[ref] for ref in c))
    lines.append("END")
    return "\n".join(lines) + "\n"


def parse_multipole(text: str) -> Multipole:
    lines = text.splitlines()
    idx = 0

    def fail(msg: str):
        raise FormatError(f"line {idx + 1}: {msg}")

    def next_line() -> Optional[str]:
        nonlocal idx
        while idx < len(lines):
            stripped = lines[idx].strip()
            if stripped and not stripped.startswith("#"):
                return stripped
            idx += 1
        return None

    line = next_line()
    if line != "MULTIPOLE":
        fail("expected MULTIPOLE header")
    idx += 1
    line = next_line()
    if line is None or not line.startswith("VERTICES"):
        fail("expected VERTICES <n>")
    try:
        n = int(line.split()[1])
    except (IndexError, ValueError):
        fail("expected VERTICES <n>")
    idx += 1
    line = next_line()
    if line != "EDGES":
        fail("expected EDGES section")
    idx += 1
    edges: list[tuple] = []
    free_count = 0
    while True:
        line = next_line()
        if line is None:
            fail("missing CONNECTORS section")
        if line in ("CONNECTORS", "END"):
            break
        parts = line.split()
        if len(parts) != 2:
            fail(f"expected two edge ends, got {line!r}")
        ends = []
        for p in parts:
            if p == "-":
                ends.append(f"f{free_count}")
                free_count += 1
            else:
                try:
                    v = int(p)
                except ValueError:
                    fail(f"bad edge end {p!r}")
                if not (0 <= v < n):
                    fail(f"vertex {v} out of range")
                ends.append(v)
        edges.append((ends[0], ends[1]))
        idx += 1
    connectors = []
    if line == "CONNECTORS":
        idx += 1
        while True:
            line = next_line()
            if line is None:
                fail("missing END")
            if line == "END":
                break
            names = line.split()
            for nm in names:
                if not nm.startswith("f"):
                    fail(f"bad free-end name {nm!r}")
            connectors.append(names)
            idx += 1
    try:
        return build_multipole(n, edges, connectors)
    except MultipoleError as exc:
        raise FormatError(str(exc)) from exc


# ---------------------------------------------------------------------------
# colouring and matching-array files


def serialize_colouring(colours: dict[int, int], graph_checksum: str) -> str:
    lines = [f"COLOURING {graph_checksum}"]
    for e in sorted(colours):
        lines.append(f"{e} {colours[e]}")
    lines.append("END")
    return "\n".join(lines) + "\n"


def parse_colouring(text: str) -> tuple[dict[int, int], str]:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("COLOURING"):
        raise FormatError("line 1: expected COLOURING <checksum>")
    parts = lines[0].split()
    if len(parts) != 2:
        raise FormatError("line 1: expected COLOURING <checksum>")
    checksum = parts[1]
    colours = {}
    for i, ln in enumerate(lines[1:], start=2):
        if ln == "END":
            break
        try:
            e, c = ln.split()
            colours[int(e)] = int(c)
        except ValueError:
            raise FormatError(f"line {i}: expected '<edge> <colour>'")
    return colours, checksum


def serialize_array(matchings: tuple, graph_checksum: str) -> str:
    lines = [f"ARRAY {graph_checksum}"]
    for pm in matchings:
        lines.append(" ".join(str(e) for e in pm))
    lines.append("END")
    return "\n".join(lines) + "\n"


def parse_array(text: str) -> tuple[tuple[tuple[int, ...], ...], str]:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("ARRAY"):
        raise FormatError("line 1: expected ARRAY <checksum>")
    checksum = lines[0].split()[1]
    pms = []
    for i, ln in enumerate(lines[1:], start=2):
        if ln == "END":
            break
        try:
            pms.append(tuple(int(x) for x in ln.split()))
        except ValueError:
            raise FormatError(f"line {i}: expected edge indices")
    if len(pms) != 3:
        raise FormatError(f"expected 3 matchings, found {len(pms)}")
    return tuple(pms), checksum
