"""Quasi-cyclic parity-check matrix construction.

A QC-LDPC code is described by a J x L grid of circulant shifts (the base
matrix), a binary J x L mask selecting which blocks are present, and a
lifting size p.  Block (j, l) of the lifted matrix is the p x p identity
cyclically right-shifted by ``shifts[j, l]`` positions when ``mask[j, l]``
is 1, and the zero block otherwise.  All block indices are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

MASK_KINDS = ("M1", "M2", "M3", "M_RA")

# Mask with the repeat-accumulate staircase on the right half; gives an
# irregular rate-1/2 code with column weights [5,5,5,5,4,2,2,2,2,1].
_RA_MASK_5x10 = np.array(
    [
        [1, 1, 1, 1, 1, 1, 0, 0, 0, 0],
        [1, 1, 1, 1, 1, 1, 1, 0, 0, 0],
        [1, 1, 1, 1, 1, 0, 1, 1, 0, 0],
        [1, 1, 1, 1, 1, 0, 0, 1, 1, 0],
        [1, 1, 1, 1, 0, 0, 0, 0, 1, 1],
    ],
    dtype=np.int8,
)


def _as_readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MaskMatrix:
    """Binary J x L grid selecting which circulant blocks are present.

    An all-zero column (a variable block of degree 0) is representable but
    rejected by lift(), which is where it would produce an invalid code.
    """

    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.int8)
        if bits.ndim != 2 or bits.size == 0:
            raise ValueError("mask must be a non-empty 2-D grid")
        if not np.isin(bits, (0, 1)).all():
            raise ValueError("mask entries must be 0 or 1")
        object.__setattr__(self, "bits", _as_readonly(bits))

    @property
    def shape(self) -> tuple[int, int]:
        return self.bits.shape


@dataclass(frozen=True)
class BaseMatrix:
    """J x L grid of circulant right-shift values."""

    shifts: np.ndarray

    def __post_init__(self):
        shifts = np.asarray(self.shifts, dtype=np.int64)
        if shifts.ndim != 2 or shifts.size == 0:
            raise ValueError("base matrix must be a non-empty 2-D grid")
        if (shifts < 0).any():
            raise ValueError("shifts must be non-negative")
        object.__setattr__(self, "shifts", _as_readonly(shifts))

    @property
    def shape(self) -> tuple[int, int]:
        return self.shifts.shape


@dataclass(frozen=True)
class ParityCheckMatrix:
    """Sparse binary parity-check matrix with both adjacency views.

    ``row_adj[i]`` holds the sorted column positions of the ones in check
    row i; ``col_adj[j]`` the sorted row positions of the ones in column j.
    ``provenance`` optionally records the (base, mask, p) that produced a
    lifted matrix.
    """

    n: int
    r: int
    row_adj: tuple
    col_adj: tuple
    provenance: tuple | None = field(default=None, compare=False)

    @classmethod
    def from_coo(cls, rows, cols, n: int, r: int, provenance=None) -> "ParityCheckMatrix":
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        if rows.shape != cols.shape:
            raise ValueError("rows/cols length mismatch")
        if n <= 0 or r <= 0:
            raise ValueError("matrix dimensions must be positive")
        if rows.size and (rows.min() < 0 or rows.max() >= r):
            raise ValueError("row index out of range")
        if cols.size and (cols.min() < 0 or cols.max() >= n):
            raise ValueError("column index out of range")
        m = sp.coo_matrix((np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(r, n))
        m.sum_duplicates()
        m.data[:] = 1
        csr = m.tocsr()
        csc = m.tocsc()
        row_adj = tuple(
            _as_readonly(csr.indices[csr.indptr[i] : csr.indptr[i + 1]].astype(np.int64))
            for i in range(r)
        )
        col_adj = tuple(
            _as_readonly(csc.indices[csc.indptr[j] : csc.indptr[j + 1]].astype(np.int64))
            for j in range(n)
        )
        if any(len(c) == 0 for c in col_adj):
            raise ValueError("parity-check matrix has an empty column")
        return cls(n=n, r=r, row_adj=row_adj, col_adj=col_adj, provenance=provenance)

    @classmethod
    def from_dense(cls, h, provenance=None) -> "ParityCheckMatrix":
        h = np.asarray(h)
        rows, cols = np.nonzero(h)
        return cls.from_coo(rows, cols, n=h.shape[1], r=h.shape[0], provenance=provenance)

    @property
    def nnz(self) -> int:
        return sum(len(a) for a in self.row_adj)

    def nonzeros(self) -> set:
        return {(i, int(j)) for i in range(self.r) for j in self.row_adj[i]}

    def to_sparse(self) -> sp.csr_matrix:
        indptr = np.concatenate([[0], np.cumsum([len(a) for a in self.row_adj])])
        indices = (
            np.concatenate(self.row_adj) if self.nnz else np.empty(0, dtype=np.int64)
        )
        data = np.ones(len(indices), dtype=np.int8)
        return sp.csr_matrix((data, indices, indptr), shape=(self.r, self.n))

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()

    def column_weights(self) -> np.ndarray:
        return np.array([len(a) for a in self.col_adj])

    def row_weights(self) -> np.ndarray:
        return np.array([len(a) for a in self.row_adj])

    def design_rate(self) -> float:
        """Rate bookkeeping only: 1 - J/L for lifted codes, else 1 - r/n."""
        if self.provenance is not None:
            base, _, p = self.provenance
            j_blocks, l_blocks = base.shape
            return 1.0 - j_blocks / l_blocks
        return 1.0 - self.r / self.n


def lift(base: BaseMatrix, mask: MaskMatrix, p: int) -> ParityCheckMatrix:
    """Lift a (base, mask) pair into the binary parity-check matrix.

    Parameters
    ----------
    base, mask : BaseMatrix, MaskMatrix
        Shift grid and block selector; shapes must agree.
    p : int
        Circulant size.  Every unmasked shift must lie in [0, p).

    Returns
    -------
    ParityCheckMatrix of shape (p*J) x (p*L), with block (j, l) equal to
    the identity right-shifted by ``base.shifts[j, l]`` where the mask is
    one and the zero block elsewhere.
    """
    if p <= 0:
        raise ValueError("lifting size p must be positive")
    if base.shape != mask.shape:
        raise ValueError(f"base shape {base.shape} != mask shape {mask.shape}")
    if (mask.bits.sum(axis=0) == 0).any():
        raise ValueError("mask has an all-zero column (variable block of degree 0)")
    jj, ll = base.shape
    active = base.shifts[mask.bits == 1]
    if active.size and active.max() >= p:
        raise ValueError(f"shift {int(active.max())} out of range for p={p}")
    rows, cols = [], []
    offs = np.arange(p, dtype=np.int64)
    for j in range(jj):
        for l in range(ll):
            if mask.bits[j, l]:
                rows.append(j * p + offs)
                cols.append(l * p + (offs + base.shifts[j, l]) % p)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    return ParityCheckMatrix.from_coo(
        rows, cols, n=p * ll, r=p * jj, provenance=(base, mask, p)
    )


def builtin_mask(kind: str, j_blocks: int | None = None, l_blocks: int | None = None) -> MaskMatrix:
    """Return one of the built-in mask families.

    M1 is all-ones (fully regular), M2 zeroes the first block row, M3 has a
    single zero at (0, 0), and M_RA is the fixed 5 x 10 repeat-accumulate
    mask (the only supported shape for that family).
    """
    if kind == "M_RA":
        if (j_blocks, l_blocks) not in ((None, None), (5, 10)):
            raise ValueError("M_RA is only defined for (J, L) = (5, 10)")
        return MaskMatrix(_RA_MASK_5x10.copy())
    if j_blocks is None or l_blocks is None:
        raise ValueError(f"mask {kind!r} requires explicit J and L")
    if kind == "M1":
        return MaskMatrix(np.ones((j_blocks, l_blocks), dtype=np.int8))
    if kind == "M2":
        bits = np.ones((j_blocks, l_blocks), dtype=np.int8)
        bits[0, :] = 0
        return MaskMatrix(bits)
    if kind == "M3":
        bits = np.ones((j_blocks, l_blocks), dtype=np.int8)
        bits[0, 0] = 0
        return MaskMatrix(bits)
    raise ValueError(f"unknown mask kind {kind!r}; expected one of {MASK_KINDS}")


OBJECTIVES = ("max-girth", "max-girth-then-min-ace-violations")


@dataclass
class LabelSearchResult:
    base: BaseMatrix
    girth: int | None  # None: no cycle of length <= the search's l_max
    score: tuple
    evaluations: int
    restarts: int


def _label_score(shifts, mask, p, objective, l_max, ace_floor):
    # Lazy import: tanner depends on this module for the matrix types.
    from . import tanner

    base = BaseMatrix(shifts)
    g = tanner.qc_girth(base, mask, p, l_max=l_max)
    g_score = l_max + 2 if g is None else g
    if objective == "max-girth":
        return (g_score,), g
    if g is None:
        return (g_score, 0), g
    graph = tanner.TannerGraph.from_pcm(lift(base, mask, p))
    cycles = tanner.enumerate_cycles(graph, l_max=g, per_vn_cap=2000)
    bad = sum(1 for c in cycles.all_cycles if tanner.ace(c, graph) < ace_floor)
    return (g_score, -bad), g


def label_search(
    mask: MaskMatrix,
    p: int,
    objective: str = "max-girth",
    budget: int = 1000,
    seed: int = 0,
    l_max: int = 12,
    ace_floor: int = 2,
) -> LabelSearchResult:
    """Search shift labelings of ``mask`` by guess-and-test with hill climbing.

    Random restart labelings are refined by single-shift mutations that are
    accepted whenever the objective does not worsen; a fresh restart is
    drawn after 4*J*L consecutive rejections.  Each scored labeling counts
    against ``budget``.  Deterministic for a fixed ``seed``.

    ``objective`` is ``"max-girth"`` (girth capped at ``l_max``, "no cycle
    up to l_max" ranks best) or ``"max-girth-then-min-ace-violations"``,
    which breaks girth ties by the number of girth-length cycles with ACE
    below ``ace_floor``.
    """
    if budget <= 0:
        raise ValueError("budget must be at least 1")
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}")
    jj, ll = mask.shape
    rng = np.random.default_rng(seed)
    stagnation_limit = 4 * jj * ll
    free = np.argwhere(mask.bits == 1)

    def random_shifts():
        s = rng.integers(0, p, size=(jj, ll), dtype=np.int64)
        s[mask.bits == 0] = 0
        return s

    evaluations = 0
    restarts = 0
    best_shifts = None
    best_score = None
    best_girth = None

    while evaluations < budget:
        current = random_shifts()
        cur_score, cur_g = _label_score(current, mask, p, objective, l_max, ace_floor)
        evaluations += 1
        if best_score is None or cur_score > best_score:
            best_score, best_shifts, best_girth = cur_score, current.copy(), cur_g
        rejected = 0
        while evaluations < budget and rejected < stagnation_limit:
            cand = current.copy()
            j, l = free[rng.integers(len(free))]
            cand[j, l] = rng.integers(0, p)
            score, g = _label_score(cand, mask, p, objective, l_max, ace_floor)
            evaluations += 1
            if score >= cur_score:
                current, cur_score, cur_g = cand, score, g
                if score > best_score:
                    best_score, best_shifts, best_girth = score, cand.copy(), g
                rejected = 0
            else:
                rejected += 1
        restarts += 1

    return LabelSearchResult(
        base=BaseMatrix(best_shifts),
        girth=best_girth,
        score=best_score,
        evaluations=evaluations,
        restarts=restarts,
    )
