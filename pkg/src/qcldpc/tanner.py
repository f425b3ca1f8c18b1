"""Structural audits of Tanner graphs.

Variable nodes are the columns of H, check nodes the rows.  Graph-level
routines use a unified node numbering with variables 0..n-1 and checks
n..n+r-1, so the smallest node on any cycle is always a variable node.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .construct import BaseMatrix, MaskMatrix, ParityCheckMatrix


class ConvergenceError(RuntimeError):
    """An iterative numerical routine failed to reach its tolerance."""


class TannerGraph:
    """Bipartite adjacency of a parity-check matrix, both directions."""

    def __init__(self, vn_adj, cn_adj):
        self.n = len(vn_adj)
        self.r = len(cn_adj)
        self.vn_adj = [np.asarray(a, dtype=np.int64) for a in vn_adj]
        self.cn_adj = [np.asarray(a, dtype=np.int64) for a in cn_adj]
        self.vn_deg = np.array([len(a) for a in self.vn_adj])
        self.cn_deg = np.array([len(a) for a in self.cn_adj])
        # unified adjacency over n + r nodes, as plain lists for fast BFS/DFS
        self.adj = [[self.n + int(c) for c in a] for a in self.vn_adj]
        self.adj += [[int(v) for v in a] for a in self.cn_adj]

    @classmethod
    def from_pcm(cls, pcm: ParityCheckMatrix) -> "TannerGraph":
        return cls(pcm.col_adj, pcm.row_adj)

    @classmethod
    def from_dense(cls, h) -> "TannerGraph":
        return cls.from_pcm(ParityCheckMatrix.from_dense(h))

    @property
    def num_nodes(self) -> int:
        return self.n + self.r

    def num_edges(self) -> int:
        return int(self.vn_deg.sum())

    def components(self) -> list[list[int]]:
        """Connected components as lists of unified node ids."""
        seen = [False] * self.num_nodes
        comps = []
        for start in range(self.num_nodes):
            if seen[start]:
                continue
            comp = [start]
            seen[start] = True
            q = deque([start])
            while q:
                u = q.popleft()
                for w in self.adj[u]:
                    if not seen[w]:
                        seen[w] = True
                        comp.append(w)
                        q.append(w)
            comps.append(comp)
        return comps


def girth(graph: TannerGraph) -> float:
    """Length of the shortest cycle, or math.inf for a forest.

    Truncated BFS from every node; the minimum over all roots of the
    shortest closed walk seen through the root equals the girth.
    """
    adj = graph.adj
    nv = graph.num_nodes
    best = math.inf
    for root in range(nv):
        if best == 4:
            break
        dist = np.full(nv, -1, dtype=np.int64)
        parent = np.full(nv, -1, dtype=np.int64)
        dist[root] = 0
        q = deque([root])
        while q:
            u = q.popleft()
            du = int(dist[u])
            if 2 * du + 2 >= best:
                continue
            pu = parent[u]
            for w in adj[u]:
                dw = dist[w]
                if dw < 0:
                    dist[w] = du + 1
                    parent[w] = u
                    q.append(w)
                elif w != pu:
                    c = du + int(dw) + 1
                    if c < best:
                        best = c
    return best


def qc_girth(base: BaseMatrix, mask: MaskMatrix, p: int, l_max: int = 12) -> int | None:
    """Girth of the lifted code computed in the block domain.

    A cycle of length 2t exists iff a closed chain of t blocks, changing
    block column and block row alternately, has alternating shift sum
    congruent to 0 mod p.  Returns the smallest such even length <= l_max,
    or None when every cycle (if any) is longer than l_max.
    """
    if base.shape != mask.shape:
        raise ValueError("base/mask shape mismatch")
    if p <= 0:
        raise ValueError("p must be positive")
    jj, ll = base.shape
    bits = mask.bits.astype(bool)
    shifts = (base.shifts % p).astype(np.int64)
    starts = np.argwhere(bits)
    ns = len(starts)
    if ns == 0 or jj < 2 or ll < 2 or l_max < 4:
        return None

    # reach[s, j, l, q]: a chain from start block s currently sits on block
    # (j, l) (row j just used, now at column l) with partial sum q mod p.
    reach = np.zeros((ns, jj, ll, p), dtype=bool)
    for s, (j0, l0) in enumerate(starts):
        for l1 in range(ll):
            if l1 != l0 and bits[j0, l1]:
                q = int((shifts[j0, l1] - shifts[j0, l0]) % p)
                reach[s, j0, l1, q] = True

    for t in range(2, l_max // 2 + 1):
        cnt = reach.sum(axis=1)  # ns x ll x p
        new = np.zeros_like(reach)
        for jp in range(jj):
            not_jp = (cnt - reach[:, jp].astype(np.int64)) > 0
            for l in range(ll):
                if not bits[jp, l]:
                    continue
                src = not_jp[:, l, :]
                if not src.any():
                    continue
                for lp in range(ll):
                    if lp != l and bits[jp, lp]:
                        d = int((shifts[jp, lp] - shifts[jp, l]) % p)
                        new[:, jp, lp] |= np.roll(src, d, axis=1)
        reach = new
        closing = reach[:, :, :, 0]
        for s, (j0, l0) in enumerate(starts):
            col = closing[s, :, l0]
            if col.any() and (int(col.sum()) - int(col[j0])) > 0:
                return 2 * t
    return None


@dataclass
class DiameterReport:
    diameter: int
    girth: float
    independent_iterations: float
    diameter_below_half_girth: bool
    connected: bool
    num_components: int


def diameter(graph: TannerGraph) -> DiameterReport:
    """All-pairs eccentricity maximum, plus girth-derived convergence flags.

    For a disconnected graph the diameter is the maximum over per-component
    diameters.  ``independent_iterations`` is floor((g - 1) / 4) and the
    flag records whether diameter < floor((g - 1) / 2).
    """
    adj = graph.adj
    nv = graph.num_nodes
    diam = 0
    comps = graph.components()
    for root in range(nv):
        dist = np.full(nv, -1, dtype=np.int64)
        dist[root] = 0
        q = deque([root])
        far = 0
        while q:
            u = q.popleft()
            du = int(dist[u])
            far = du
            for w in adj[u]:
                if dist[w] < 0:
                    dist[w] = du + 1
                    q.append(w)
        diam = max(diam, far)
    g = girth(graph)
    if math.isinf(g):
        indep = math.inf
        flag = True
    else:
        indep = (g - 1) // 4
        flag = diam < (g - 1) // 2
    return DiameterReport(
        diameter=diam,
        girth=g,
        independent_iterations=indep,
        diameter_below_half_girth=flag,
        connected=len(comps) == 1,
        num_components=len(comps),
    )


@dataclass(frozen=True)
class Cycle:
    """Simple cycle v0-c0-v1-c1-...-v(k-1)-c(k-1)-v0 of length 2k edges."""

    vns: tuple
    cns: tuple

    @property
    def length(self) -> int:
        return 2 * len(self.vns)

    @property
    def vn_set(self) -> frozenset:
        return frozenset(self.vns)


@dataclass
class CycleIndex:
    l_max: int
    per_vn_cap: int
    all_cycles: list
    by_vn: dict  # (vn, length) -> list of Cycle
    truncated: set  # (vn, length) keys that hit per_vn_cap
    overflow: bool  # global enumeration cap hit

    def cycles_through(self, vn: int, length: int) -> list:
        return self.by_vn.get((vn, length), [])

    def is_truncated(self, vn: int, length: int) -> bool:
        return self.overflow or (vn, length) in self.truncated


def enumerate_cycles(
    graph: TannerGraph,
    l_max: int,
    per_vn_cap: int = 10_000,
    max_total: int = 1_000_000,
) -> CycleIndex:
    """Enumerate simple cycles of even length <= l_max, indexed per VN.

    Each cycle is found exactly once: the DFS is rooted at the cycle's
    smallest variable node and traverses only larger node ids, with the
    direction fixed by requiring the first check id to be smaller than the
    last.  Cycles are then attributed to every variable node they contain;
    buckets that exceed ``per_vn_cap`` are flagged truncated.
    """
    if l_max < 4 or l_max % 2:
        raise ValueError("l_max must be an even integer >= 4")
    adj = graph.adj
    n = graph.n
    nv = graph.num_nodes
    found: list[Cycle] = []
    overflow = False
    on_path = np.zeros(nv, dtype=bool)

    def record(path):
        vns = tuple(path[0::2])
        cns = tuple(u - n for u in path[1::2])
        found.append(Cycle(vns=vns, cns=cns))

    for root in range(n):
        if overflow:
            break
        path = [root]
        on_path[root] = True

        def dfs(u):
            nonlocal overflow
            if overflow:
                return
            depth = len(path)  # nodes on path; edges used = depth - 1
            closing_ok = depth >= 4 and depth % 2 == 0
            can_extend = depth < l_max
            for w in adj[u]:
                if w == root:
                    if closing_ok and path[1] < u:
                        record(path)
                        if len(found) >= max_total:
                            overflow = True
                            return
                elif can_extend and w > root and not on_path[w]:
                    on_path[w] = True
                    path.append(w)
                    dfs(w)
                    path.pop()
                    on_path[w] = False

        dfs(root)
        on_path[root] = False

    by_vn: dict = {}
    truncated: set = set()
    for cyc in found:
        length = cyc.length
        for v in cyc.vns:
            key = (v, length)
            bucket = by_vn.setdefault(key, [])
            if len(bucket) < per_vn_cap:
                bucket.append(cyc)
            else:
                truncated.add(key)
    return CycleIndex(
        l_max=l_max,
        per_vn_cap=per_vn_cap,
        all_cycles=found,
        by_vn=by_vn,
        truncated=truncated,
        overflow=overflow,
    )


def ace(cycle: Cycle, graph: TannerGraph) -> int:
    """Approximate cycle EMD: sum of (d(v) - 2) over the cycle's VNs."""
    return int(sum(graph.vn_deg[v] - 2 for v in cycle.vns))


@dataclass
class EmdResult:
    value: int
    c_cyc: frozenset
    c_cut: frozenset
    c_ext: frozenset
    e_cyc: tuple
    e_cut: tuple
    e_ext: tuple


def emd(cycle: Cycle, graph: TannerGraph) -> EmdResult:
    """Extrinsic message degree of a cycle, with the full edge classification.

    Check neighbours of the cycle's VN set split into on-cycle checks,
    off-cycle checks connected at least twice (cut), and singly connected
    checks (extrinsic).  Every edge incident to the VN set is classified by
    its check's class; the EMD is the number of extrinsic edges.
    """
    vset = set(cycle.vns)
    on_cycle = set(cycle.cns)
    touch: dict[int, list] = {}
    for v in vset:
        for c in graph.vn_adj[v]:
            touch.setdefault(int(c), []).append((v, int(c)))
    c_cyc, c_cut, c_ext = set(), set(), set()
    for c, edges in touch.items():
        if c in on_cycle:
            c_cyc.add(c)
        elif len(edges) >= 2:
            c_cut.add(c)
        else:
            c_ext.add(c)
    e_cyc = tuple(e for c in sorted(c_cyc) for e in touch[c])
    e_cut = tuple(e for c in sorted(c_cut) for e in touch[c])
    e_ext = tuple(e for c in sorted(c_ext) for e in touch[c])
    return EmdResult(
        value=len(e_ext),
        c_cyc=frozenset(c_cyc),
        c_cut=frozenset(c_cut),
        c_ext=frozenset(c_ext),
        e_cyc=e_cyc,
        e_cut=e_cut,
        e_ext=e_ext,
    )


@dataclass
class AceSpectrum:
    girth: float
    l_max: int
    min_ace: dict  # length -> smallest ACE among cycles of that length (None if no cycle)
    histogram: dict  # length -> {vn: min ACE over length-l cycles through vn}
    truncated: set
    overflow: bool

    def lengths(self):
        return sorted(self.min_ace)


def ace_spectrum(graph: TannerGraph, l_max: int | None = None, per_vn_cap: int = 10_000) -> AceSpectrum:
    """Per-length minimum-ACE table plus per-VN minimum-ACE histograms.

    Covers even cycle lengths from the girth to ``l_max`` (default girth+6).
    Minima are over enumerated cycles; truncation flags are carried through
    from the enumeration.
    """
    g = girth(graph)
    if math.isinf(g):
        return AceSpectrum(girth=g, l_max=0, min_ace={}, histogram={}, truncated=set(), overflow=False)
    if l_max is None:
        l_max = int(g) + 6
    idx = enumerate_cycles(graph, l_max=l_max, per_vn_cap=per_vn_cap)
    ace_of = {id(c): ace(c, graph) for c in idx.all_cycles}
    histogram: dict = {length: {} for length in range(int(g), l_max + 1, 2)}
    for (v, length), bucket in idx.by_vn.items():
        histogram[length][v] = min(ace_of[id(c)] for c in bucket)
    min_ace = {
        length: (min(hist.values()) if hist else None)
        for length, hist in histogram.items()
    }
    return AceSpectrum(
        girth=g,
        l_max=l_max,
        min_ace=min_ace,
        histogram=histogram,
        truncated=idx.truncated,
        overflow=idx.overflow,
    )


@dataclass
class TrappingSetRecord:
    vns: tuple
    a: int
    b: int
    cycles: tuple
    harm: float  # b / a

    @property
    def is_codeword(self) -> bool:
        return self.b == 0


def _odd_degree_checks(vns, graph: TannerGraph) -> int:
    counts: dict[int, int] = {}
    for v in vns:
        for c in graph.vn_adj[v]:
            counts[int(c)] = counts.get(int(c), 0) + 1
    return sum(1 for k in counts.values() if k % 2)


def ts_candidates(
    graph: TannerGraph,
    a_max: int = 12,
    b_max: int = 8,
    l_max: int | None = None,
    per_vn_cap: int = 10_000,
    max_sets: int = 20_000,
) -> list[TrappingSetRecord]:
    """Trapping-set candidates from a bounded union closure over cycles.

    Seeds are the VN sets of enumerated cycles; unions of overlapping sets
    are added while the VN count stays within ``a_max`` (and the total
    number of explored sets within ``max_sets``).  Each record's (a, b) is
    recomputed exactly from the induced subgraph; records with b > b_max
    are dropped from the output.  Sorted by ascending b/a, then a.
    """
    g = girth(graph)
    if math.isinf(g):
        return []
    if a_max < g / 2:
        raise ValueError(f"a_max={a_max} below girth/2={g / 2}: no cycle seed fits")
    if l_max is None:
        l_max = int(g) + 6
    idx = enumerate_cycles(graph, l_max=l_max, per_vn_cap=per_vn_cap)
    seeds: dict[frozenset, list] = {}
    for cyc in idx.all_cycles:
        seeds.setdefault(cyc.vn_set, []).append(cyc)
    visited: dict[frozenset, tuple] = {}
    queue: deque = deque()
    for vs, cycs in seeds.items():
        if len(vs) <= a_max:
            visited[vs] = tuple(cycs)
            queue.append(vs)
    seed_items = list(seeds.items())
    while queue and len(visited) < max_sets:
        s = queue.popleft()
        for vs, cycs in seed_items:
            if s & vs and s != vs:
                u = s | vs
                if len(u) <= a_max and u not in visited:
                    gen = tuple(dict.fromkeys(visited[s] + tuple(cycs)))
                    visited[u] = gen
                    queue.append(u)
                    if len(visited) >= max_sets:
                        break
    records = []
    for vs, gen in visited.items():
        b = _odd_degree_checks(vs, graph)
        if b <= b_max:
            records.append(
                TrappingSetRecord(
                    vns=tuple(sorted(vs)), a=len(vs), b=b, cycles=gen, harm=b / len(vs)
                )
            )
    records.sort(key=lambda t: (t.harm, t.a, t.vns))
    return records


@dataclass
class SpectralBoundResult:
    mu1: float
    mu2: float
    j: int | None
    k: int | None
    bound: float | None
    applicable: bool
    connected: bool
    regular: bool
    iterations: int


def _lanczos_top2(matvec, dim, rng, tol=1e-9, max_iter=100_000, max_basis=400):
    """Two largest eigenvalues of a symmetric operator by Lanczos iteration.

    Full reorthogonalization; on Krylov breakdown the basis is extended
    with a fresh random direction (beta = 0 keeps the tridiagonal form
    block-diagonal).  Raises ConvergenceError if the Ritz residuals do not
    reach ``tol`` within the basis/iteration budget.
    """
    max_basis = min(dim, max_basis)
    basis = np.zeros((max_basis, dim))
    alphas: list[float] = []
    betas: list[float] = []
    q = rng.standard_normal(dim)
    q /= np.linalg.norm(q)
    q_prev = np.zeros(dim)
    beta = 0.0
    k = 0
    iters = 0
    while k < max_basis and iters < max_iter:
        basis[k] = q
        w = matvec(q)
        alpha = float(q @ w)
        w = w - alpha * q - beta * q_prev
        for _ in range(2):  # full reorthogonalization, twice for stability
            w -= basis[: k + 1].T @ (basis[: k + 1] @ w)
        alphas.append(alpha)
        k += 1
        iters += 1
        beta = float(np.linalg.norm(w))
        if k >= 2:
            evals, evecs = scipy.linalg.eigh_tridiagonal(alphas, betas)
            order = np.argsort(evals)[::-1]
            top = evals[order[:2]]
            res = np.abs(beta * evecs[-1, order[:2]])
            scale = max(1.0, abs(float(top[0])))
            if k == dim or (res <= tol * scale).all():
                return float(top[0]), float(top[1]), iters
        if beta < 1e-13:
            if k >= dim:
                break
            fresh = rng.standard_normal(dim)
            fresh -= basis[:k].T @ (basis[:k] @ fresh)
            nrm = np.linalg.norm(fresh)
            if nrm < 1e-13:
                break
            q = fresh / nrm
            q_prev = np.zeros(dim)
            beta = 0.0
            betas.append(0.0)
        else:
            q_prev = basis[k - 1]
            q = w / beta
            betas.append(beta)
    raise ConvergenceError(
        f"Lanczos did not reach tolerance {tol} within {k} basis vectors"
    )


def spectral_bound(
    pcm: ParityCheckMatrix, tol: float = 1e-9, max_iter: int = 100_000, seed: int = 0
) -> SpectralBoundResult:
    """Eigenvalue lower bound on the minimum pseudocodeword weight.

    Computes the two leading eigenvalues mu1 > mu2 of the symmetric
    adjacency matrix A = [[0, H], [H^T, 0]] (so mu1 = sqrt(j*k) for a
    connected (j, k)-regular code) and evaluates

        n * (2j - mu2^2) / (mu1^2 - mu2^2).

    The squared values are the spectrum of H^T H; using A's eigenvalues
    directly would make the bound exceed n for every regular code (the
    numerator 2j is larger than mu1 = sqrt(j*k) whenever j <= k), so the
    squared form is the one that actually lower-bounds the distance.  The
    bound is marked applicable only for connected (j, k)-regular matrices.
    """
    h = pcm.to_sparse().astype(np.float64)
    ht = h.T.tocsr()
    r, n = h.shape
    dim = n + r

    def matvec(x):
        out = np.empty(dim)
        out[:r] = h @ x[r:]
        out[r:] = ht @ x[:r]
        return out

    rng = np.random.default_rng(seed)
    mu1, mu2, iters = _lanczos_top2(matvec, dim, rng, tol=tol, max_iter=max_iter)
    col_w = pcm.column_weights()
    row_w = pcm.row_weights()
    regular = bool((col_w == col_w[0]).all() and (row_w == row_w[0]).all())
    graph = TannerGraph.from_pcm(pcm)
    connected = len(graph.components()) == 1
    applicable = regular and connected
    j = int(col_w[0]) if regular else None
    k = int(row_w[0]) if regular else None
    bound = None
    if applicable and mu1 * mu1 - mu2 * mu2 > tol:
        bound = n * (2 * j - mu2 * mu2) / (mu1 * mu1 - mu2 * mu2)
    return SpectralBoundResult(
        mu1=mu1,
        mu2=mu2,
        j=j,
        k=k,
        bound=bound,
        applicable=applicable and bound is not None,
        connected=connected,
        regular=regular,
        iterations=iters,
    )


def min_distance_bruteforce(pcm: ParityCheckMatrix, n_limit: int = 28) -> float:
    """Minimum Hamming weight over nonzero codewords by enumeration.

    Enumerates the GF(2) nullspace of H; returns math.inf for the trivial
    code {0}.  Rejects n > ``n_limit`` and nullspace dimension > 26 (the
    enumeration is exponential in it).
    """
    n = pcm.n
    if n > n_limit:
        raise ValueError(f"n={n} too large for brute force (limit {n_limit})")
    a = pcm.to_dense().astype(np.uint8) % 2
    pivots = []
    pr = 0
    for col in range(n):
        hit = np.nonzero(a[pr:, col])[0]
        if hit.size == 0:
            continue
        if hit[0] != 0:
            a[[pr, pr + hit[0]]] = a[[pr + hit[0], pr]]
        others = np.nonzero(a[:, col])[0]
        for i in others:
            if i != pr:
                a[i] ^= a[pr]
        pivots.append(col)
        pr += 1
        if pr == a.shape[0]:
            break
    free = [c for c in range(n) if c not in pivots]
    k = len(free)
    if k == 0:
        return math.inf
    if k > 26:
        raise ValueError(f"nullspace dimension {k} too large for enumeration")
    basis_masks = []
    for f in free:
        x = np.zeros(n, dtype=np.uint8)
        x[f] = 1
        for i, c in enumerate(pivots):
            x[c] = a[i, f]
        mask = 0
        for bit in np.nonzero(x)[0]:
            mask |= 1 << int(bit)
        basis_masks.append(np.uint32(mask))
    words = np.zeros(1, dtype=np.uint32)
    for b in basis_masks:
        words = np.concatenate([words, words ^ b])
    weights = np.bitwise_count(words[1:])
    return int(weights.min())


@dataclass
class AuditReport:
    n: int
    r: int
    girth: float
    diameter: DiameterReport
    spectrum: AceSpectrum
    trapping_sets: list
    spectral: SpectralBoundResult | None
    spectral_error: str | None = None

    def to_dict(self) -> dict:
        spec_tbl = {
            str(length): {
                "min_ace": self.spectrum.min_ace[length],
                "vns_on_cycles": len(self.spectrum.histogram[length]),
                "truncated": any(
                    key[1] == length for key in self.spectrum.truncated
                ) or self.spectrum.overflow,
            }
            for length in self.spectrum.lengths()
        }
        ts_tbl = [
            {"a": t.a, "b": t.b, "harm": t.harm, "vns": list(t.vns), "codeword": t.is_codeword}
            for t in self.trapping_sets
        ]
        doc = {
            "n": self.n,
            "r": self.r,
            "girth": None if math.isinf(self.girth) else int(self.girth),
            "diameter": self.diameter.diameter,
            "independent_iterations": (
                None
                if math.isinf(self.diameter.independent_iterations)
                else int(self.diameter.independent_iterations)
            ),
            "diameter_below_half_girth": self.diameter.diameter_below_half_girth,
            "connected": self.diameter.connected,
            "num_components": self.diameter.num_components,
            "ace_spectrum": spec_tbl,
            "trapping_sets": ts_tbl,
        }
        if self.spectral is not None:
            doc["spectral"] = {
                "mu1": self.spectral.mu1,
                "mu2": self.spectral.mu2,
                "j": self.spectral.j,
                "k": self.spectral.k,
                "bound": self.spectral.bound,
                "applicable": self.spectral.applicable,
            }
        else:
            doc["spectral"] = {"error": self.spectral_error}
        return doc

    def to_text(self) -> str:
        d = self.to_dict()
        lines = [
            f"parity-check matrix: {self.r} x {self.n}",
            f"girth: {d['girth'] if d['girth'] is not None else 'none (forest)'}",
            f"diameter: {d['diameter']}  (connected: {d['connected']}, components: {d['num_components']})",
            f"independent iterations: {d['independent_iterations']}",
            f"diameter < floor((g-1)/2): {d['diameter_below_half_girth']}",
            "ace spectrum (length: min ACE / #VNs on cycles):",
        ]
        for length in self.spectrum.lengths():
            row = d["ace_spectrum"][str(length)]
            trunc = "  [truncated]" if row["truncated"] else ""
            lines.append(f"  {length}: {row['min_ace']} / {row['vns_on_cycles']}{trunc}")
        lines.append(f"trapping-set candidates ({len(self.trapping_sets)}):")
        for t in self.trapping_sets[:20]:
            tag = "  codeword!" if t.is_codeword else ""
            lines.append(f"  TS({t.a},{t.b})  b/a={t.harm:.3f}{tag}")
        if len(self.trapping_sets) > 20:
            lines.append(f"  ... {len(self.trapping_sets) - 20} more")
        spec = d["spectral"]
        if "error" in spec:
            lines.append(f"spectral bound: failed ({spec['error']})")
        elif spec["applicable"]:
            lines.append(
                f"spectral bound: mu1={spec['mu1']:.6f} mu2={spec['mu2']:.6f} "
                f"min pseudoweight >= {spec['bound']:.4f}"
            )
        else:
            lines.append(
                f"spectral bound: not applicable (mu1={spec['mu1']:.6f}, "
                f"mu2={spec['mu2']:.6f}; requires a connected regular code)"
            )
        return "\n".join(lines)


def audit(
    pcm: ParityCheckMatrix,
    l_max: int | None = None,
    a_max: int = 12,
    b_max: int = 8,
    per_vn_cap: int = 10_000,
) -> AuditReport:
    """Full structural audit of a parity-check matrix."""
    graph = TannerGraph.from_pcm(pcm)
    diam = diameter(graph)
    spectrum = ace_spectrum(graph, l_max=l_max, per_vn_cap=per_vn_cap)
    if math.isinf(diam.girth):
        ts: list[TrappingSetRecord] = []
    else:
        ts = ts_candidates(
            graph,
            a_max=max(a_max, int(math.ceil(diam.girth / 2))),
            b_max=b_max,
            l_max=l_max,
            per_vn_cap=per_vn_cap,
        )
    spectral = None
    spectral_error = None
    try:
        spectral = spectral_bound(pcm)
    except ConvergenceError as exc:
        spectral_error = str(exc)
    return AuditReport(
        n=pcm.n,
        r=pcm.r,
        girth=diam.girth,
        diameter=diam,
        spectrum=spectrum,
        trapping_sets=ts,
        spectral=spectral,
        spectral_error=spectral_error,
    )
