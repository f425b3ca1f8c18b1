"""Text interchange formats: alist matrices, base/mask grids, degree files.

All formats are UTF-8, whitespace-delimited.  Alist follows the MacKay
convention with 1-based positions; zero padding in position lists is
accepted on read and never emitted.  Base-matrix files hold a "J L p"
header followed by a J x L integer grid where -1 marks a masked block.
Degree-distribution files hold one "V degree fraction" or
"C degree fraction" line per support point.
"""

from __future__ import annotations

import contextlib
import io
import os

import numpy as np

from .construct import BaseMatrix, MaskMatrix, ParityCheckMatrix


class FormatError(ValueError):
    """Malformed interchange file."""


@contextlib.contextmanager
def _open_for(obj, mode):
    if isinstance(obj, (str, os.PathLike)):
        with open(obj, mode, encoding="utf-8") as f:
            yield f
    elif isinstance(obj, io.TextIOBase) or hasattr(obj, "read") or hasattr(obj, "write"):
        yield obj
    else:
        raise TypeError(f"expected path or text stream, got {type(obj)!r}")


def _int_fields(line: str, what: str) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError as exc:
        raise FormatError(f"non-integer token in {what}: {line!r}") from exc


def write_alist(pcm: ParityCheckMatrix, dest) -> None:
    """Write ``pcm`` in alist format (no zero padding)."""
    with _open_for(dest, "w") as f:
        col_w = pcm.column_weights()
        row_w = pcm.row_weights()
        f.write(f"{pcm.n} {pcm.r}\n")
        f.write(f"{int(col_w.max(initial=0))} {int(row_w.max(initial=0))}\n")
        f.write(" ".join(str(int(w)) for w in col_w) + "\n")
        f.write(" ".join(str(int(w)) for w in row_w) + "\n")
        for j in range(pcm.n):
            f.write(" ".join(str(int(i) + 1) for i in pcm.col_adj[j]) + "\n")
        for i in range(pcm.r):
            f.write(" ".join(str(int(j) + 1) for j in pcm.row_adj[i]) + "\n")


def read_alist(src) -> ParityCheckMatrix:
    """Parse an alist file into a ParityCheckMatrix.

    Raises FormatError on malformed headers, out-of-range positions, or
    degree/position mismatches (including disagreement between the column
    and row views).
    """
    with _open_for(src, "r") as f:
        lines = [ln for ln in f.read().splitlines() if ln.strip()]
    if len(lines) < 4:
        raise FormatError("alist too short: need header, max degrees and degree lists")
    header = _int_fields(lines[0], "alist header")
    if len(header) != 2:
        raise FormatError(f"alist header must be 'n r', got {lines[0]!r}")
    n, r = header
    if n <= 0 or r <= 0:
        raise FormatError(f"alist dimensions must be positive, got {n} {r}")
    _ = _int_fields(lines[1], "max degrees")  # informational; recomputed below
    col_deg = _int_fields(lines[2], "column degrees")
    row_deg = _int_fields(lines[3], "row degrees")
    if len(col_deg) != n:
        raise FormatError(f"expected {n} column degrees, got {len(col_deg)}")
    if len(row_deg) != r:
        raise FormatError(f"expected {r} row degrees, got {len(row_deg)}")
    body = lines[4:]
    if len(body) != n + r:
        raise FormatError(f"expected {n + r} position lines, got {len(body)}")

    def positions(line, count, limit, what):
        vals = [v for v in _int_fields(line, what) if v != 0]  # drop pad zeros
        if len(vals) != count:
            raise FormatError(f"{what}: expected {count} positions, got {len(vals)}")
        for v in vals:
            if v < 1 or v > limit:
                raise FormatError(f"{what}: position {v} out of range 1..{limit}")
        return [v - 1 for v in vals]

    from_cols = set()
    for j in range(n):
        for i in positions(body[j], col_deg[j], r, f"column {j}"):
            from_cols.add((i, j))
    from_rows = set()
    for i in range(r):
        for j in positions(body[n + i], row_deg[i], n, f"row {i}"):
            from_rows.add((i, j))
    if from_cols != from_rows:
        raise FormatError("column and row position lists disagree")
    rows = np.array([i for i, _ in sorted(from_rows)], dtype=np.int64)
    cols = np.array([j for _, j in sorted(from_rows)], dtype=np.int64)
    return ParityCheckMatrix.from_coo(rows, cols, n=n, r=r)


def write_base(base: BaseMatrix, mask: MaskMatrix, p: int, dest) -> None:
    """Write a (base, mask, p) triple as a single "-1 = masked" grid."""
    if base.shape != mask.shape:
        raise ValueError("base/mask shape mismatch")
    jj, ll = base.shape
    with _open_for(dest, "w") as f:
        f.write(f"{jj} {ll} {p}\n")
        for j in range(jj):
            row = [
                str(int(base.shifts[j, l])) if mask.bits[j, l] else "-1"
                for l in range(ll)
            ]
            f.write(" ".join(row) + "\n")


def read_base(src) -> tuple[BaseMatrix, MaskMatrix, int]:
    """Parse a base-matrix file back into (base, mask, p)."""
    with _open_for(src, "r") as f:
        lines = [ln for ln in f.read().splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty base-matrix file")
    header = _int_fields(lines[0], "base header")
    if len(header) != 3:
        raise FormatError(f"base header must be 'J L p', got {lines[0]!r}")
    jj, ll, p = header
    if jj <= 0 or ll <= 0 or p <= 0:
        raise FormatError("J, L and p must be positive")
    if len(lines) != 1 + jj:
        raise FormatError(f"expected {jj} grid rows, got {len(lines) - 1}")
    shifts = np.zeros((jj, ll), dtype=np.int64)
    bits = np.zeros((jj, ll), dtype=np.int8)
    for j in range(jj):
        vals = _int_fields(lines[1 + j], f"grid row {j}")
        if len(vals) != ll:
            raise FormatError(f"grid row {j}: expected {ll} entries, got {len(vals)}")
        for l, v in enumerate(vals):
            if v == -1:
                continue
            if v < -1:
                raise FormatError(f"grid entry {v} at ({j}, {l}) below -1")
            if v >= p:
                raise FormatError(f"grid entry {v} at ({j}, {l}) not below p={p}")
            shifts[j, l] = v
            bits[j, l] = 1
    return BaseMatrix(shifts), MaskMatrix(bits), p


def write_distribution(dist, dest) -> None:
    """Write a DegreeDistribution as "V deg frac" / "C deg frac" lines."""
    with _open_for(dest, "w") as f:
        for d in sorted(dist.lam):
            f.write(f"V {d} {dist.lam[d]!r}\n")
        for d in sorted(dist.rho):
            f.write(f"C {d} {dist.rho[d]!r}\n")


def read_distribution(src):
    """Parse a degree-distribution file; validation happens on construction."""
    from .density import DegreeDistribution

    lam: dict[int, float] = {}
    rho: dict[int, float] = {}
    with _open_for(src, "r") as f:
        for ln_no, raw in enumerate(f.read().splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tok = line.split()
            if len(tok) != 3 or tok[0] not in ("V", "C"):
                raise FormatError(f"line {ln_no}: expected 'V|C degree fraction', got {raw!r}")
            try:
                deg = int(tok[1])
                frac = float(tok[2])
            except ValueError as exc:
                raise FormatError(f"line {ln_no}: bad degree or fraction in {raw!r}") from exc
            side = lam if tok[0] == "V" else rho
            if deg in side:
                raise FormatError(f"line {ln_no}: duplicate degree {deg}")
            side[deg] = frac
    try:
        return DegreeDistribution(lam, rho)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
