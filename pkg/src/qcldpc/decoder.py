"""Flooding-schedule belief-propagation decoders (sum-product and min-sum).

Messages live on a padded (checks x max-check-degree) layout so that the
per-check extrinsic combines are plain row-wise numpy operations.  Check
updates run in the "phi domain" (phi(x) = -ln tanh(x/2), an involution)
with per-row prefix/suffix sums, which keeps extrinsic values accurate for
any mix of message magnitudes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .construct import ParityCheckMatrix

ALGORITHMS = ("spa", "msa")


@dataclass
class DecoderConfig:
    algorithm: str = "spa"
    max_iterations: int = 200
    alpha: float = 1.0  # min-sum normalization
    punctured: tuple = ()
    llr_clip: float = 30.0
    early_stop: bool = True

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must be in (0, 1]")
        if self.llr_clip <= 0:
            raise ValueError("llr_clip must be positive")
        self.punctured = tuple(int(i) for i in self.punctured)


@dataclass
class DecodeResult:
    bits: np.ndarray
    iterations: int
    syndrome_ok: bool
    posterior: np.ndarray


def channel_llr(received, sigma: float, punctured=()) -> np.ndarray:
    """LLRs 2*y/sigma^2 for BPSK 0 -> +1; punctured positions forced to 0."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    y = np.asarray(received, dtype=np.float64)
    llr = 2.0 * y / (sigma * sigma)
    for i in punctured:
        llr[i] = 0.0
    return llr


def _phi(x):
    # -ln tanh(x/2) via log1p, precise over the whole double range
    with np.errstate(divide="ignore", over="ignore"):
        e = np.exp(-x)
        return np.log1p(e) - np.log1p(-e)


class BpDecoder:
    """Precomputed message layout for repeated decoding against one H."""

    def __init__(self, pcm: ParityCheckMatrix):
        self.pcm = pcm
        self.n = pcm.n
        self.r = pcm.r
        row_deg = pcm.row_weights()
        col_deg = pcm.column_weights()
        self.dc = int(row_deg.max())
        self.dv = int(col_deg.max())
        # check layout: slot (i, t) = t-th variable of check i
        self.chk_var = np.zeros((self.r, self.dc), dtype=np.int64)
        self.chk_mask = np.zeros((self.r, self.dc), dtype=bool)
        slot_of = {}
        for i in range(self.r):
            for t, v in enumerate(pcm.row_adj[i]):
                self.chk_var[i, t] = v
                self.chk_mask[i, t] = True
                slot_of[(i, int(v))] = i * self.dc + t
        # variable layout indexes into the flattened check layout; padding
        # points at one extra neutral slot
        self.pad_slot = self.r * self.dc
        self.var_slot = np.full((self.n, self.dv), self.pad_slot, dtype=np.int64)
        self.var_mask = np.zeros((self.n, self.dv), dtype=bool)
        for v in range(self.n):
            for t, i in enumerate(pcm.col_adj[v]):
                self.var_slot[v, t] = slot_of[(int(i), v)]
                self.var_mask[v, t] = True

    def _check_update_spa(self, m_vc, clip):
        mag = np.abs(m_vc)
        np.maximum(mag, 1e-30, out=mag)
        mag[~self.chk_mask] = np.inf  # phi(inf) = 0: padding is neutral
        ph = _phi(mag)
        pre = np.zeros_like(ph)
        pre[:, 1:] = np.cumsum(ph[:, :-1], axis=1)
        suf = np.zeros_like(ph)
        suf[:, :-1] = np.cumsum(ph[:, :0:-1], axis=1)[:, ::-1]
        s = pre + suf
        neg = ((m_vc < 0) & self.chk_mask).astype(np.int64)
        npre = np.zeros_like(neg)
        npre[:, 1:] = np.cumsum(neg[:, :-1], axis=1)
        nsuf = np.zeros_like(neg)
        nsuf[:, :-1] = np.cumsum(neg[:, :0:-1], axis=1)[:, ::-1]
        sign = 1.0 - 2.0 * ((npre + nsuf) % 2)
        return sign * np.minimum(_phi(s), clip)

    def _check_update_msa(self, m_vc, clip, alpha):
        mag = np.abs(m_vc)
        mag[~self.chk_mask] = np.inf
        arg = np.argmin(mag, axis=1)
        rows = np.arange(self.r)
        min1 = mag[rows, arg]
        tmp = mag.copy()
        tmp[rows, arg] = np.inf
        min2 = tmp.min(axis=1)
        ext = np.where(
            np.arange(self.dc)[None, :] == arg[:, None], min2[:, None], min1[:, None]
        )
        neg = ((m_vc < 0) & self.chk_mask).astype(np.int64)
        npre = np.zeros_like(neg)
        npre[:, 1:] = np.cumsum(neg[:, :-1], axis=1)
        nsuf = np.zeros_like(neg)
        nsuf[:, :-1] = np.cumsum(neg[:, :0:-1], axis=1)[:, ::-1]
        sign = 1.0 - 2.0 * ((npre + nsuf) % 2)
        return sign * np.minimum(alpha * ext, clip)

    def decode(self, llr, config: DecoderConfig) -> DecodeResult:
        llr = np.asarray(llr, dtype=np.float64)
        if llr.shape != (self.n,):
            raise ValueError(f"llr length {llr.shape} does not match n={self.n}")
        clip = config.llr_clip
        m_vc = np.where(self.chk_mask, np.clip(llr[self.chk_var], -clip, clip), 0.0)
        flat_cv = np.zeros(self.pad_slot + 1)
        iterations = 0
        syndrome_ok = False
        posterior = llr.copy()
        for it in range(config.max_iterations):
            if config.algorithm == "spa":
                m_cv = self._check_update_spa(m_vc, clip)
            else:
                m_cv = self._check_update_msa(m_vc, clip, config.alpha)
            m_cv = np.where(self.chk_mask, m_cv, 0.0)
            flat_cv[: self.pad_slot] = m_cv.ravel()
            incoming = flat_cv[self.var_slot]  # n x dv, padded slots read 0
            posterior = llr + incoming.sum(axis=1)
            iterations = it + 1
            bits = (posterior < 0).astype(np.int8)
            syndrome_ok = not (
                np.bitwise_and(bits[self.chk_var].sum(axis=1, where=self.chk_mask), 1)
            ).any()
            if syndrome_ok and config.early_stop:
                break
            if it + 1 < config.max_iterations:
                m_vc_var = np.clip(posterior[:, None] - incoming, -clip, clip)
                flat_vc = np.zeros(self.pad_slot + 1)
                flat_vc[self.var_slot.ravel()] = m_vc_var.ravel()
                m_vc = flat_vc[: self.pad_slot].reshape(self.r, self.dc)
        bits = (posterior < 0).astype(np.int8)
        return DecodeResult(
            bits=bits, iterations=iterations, syndrome_ok=syndrome_ok, posterior=posterior
        )


def spa_decode(pcm: ParityCheckMatrix, llr, config: DecoderConfig | None = None) -> DecodeResult:
    """Sum-product decode; stops early once the hard decision is a codeword."""
    config = config or DecoderConfig(algorithm="spa")
    if config.algorithm != "spa":
        raise ValueError("spa_decode requires algorithm='spa'")
    return BpDecoder(pcm).decode(llr, config)


def msa_decode(pcm: ParityCheckMatrix, llr, config: DecoderConfig | None = None) -> DecodeResult:
    """Normalized min-sum decode with the same contract as spa_decode."""
    config = config or DecoderConfig(algorithm="msa")
    if config.algorithm != "msa":
        raise ValueError("msa_decode requires algorithm='msa'")
    return BpDecoder(pcm).decode(llr, config)
