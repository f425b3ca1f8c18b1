"""Monte-Carlo FER/BER measurement of BP decoding on the AWGN channel.

All-zero codeword transmission (valid by decoder symmetry, which the test
suite checks) with per-frame counter-based randomness: frame k at SNR
point s draws from Philox(key=(seed, s), counter=(0, 0, k, 0)), so results
do not depend on evaluation order or thread count.  Frames are processed
in fixed-size chunks and the stop rule is applied at chunk boundaries,
which keeps the evaluated frame count deterministic.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .construct import ParityCheckMatrix
from .decoder import BpDecoder, DecoderConfig, channel_llr

_CHUNK = 64
_Z95 = 1.959963984540054


def wilson_interval(errors: int, trials: int, z: float = _Z95) -> tuple:
    """95% Wilson score interval for a binomial proportion."""
    if trials == 0:
        return (math.nan, math.nan)
    phat = errors / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = (
        z
        * math.sqrt(phat * (1.0 - phat) / trials + z * z / (4 * trials * trials))
        / denom
    )
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass
class SnrPointResult:
    snr_db: float
    sigma: float
    frames: int
    frame_errors: int
    bit_errors: int
    undetected: int
    total_iterations: int

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else math.nan

    @property
    def ber(self) -> float:
        return math.nan if self.frames == 0 else self.bit_errors / (self.frames * self._n)

    @property
    def mean_iters(self) -> float:
        return self.total_iterations / self.frames if self.frames else math.nan

    def fer_interval(self) -> tuple:
        return wilson_interval(self.frame_errors, self.frames)

    _n = 1  # code length, set by the harness for BER



@dataclass
class SimResult:
    n: int
    rate: float
    points: list

    CSV_COLUMNS = (
        "snr_db,sigma,frames,frame_errors,bit_errors,undetected,"
        "fer,ber,fer_lo,fer_hi,mean_iters"
    )

    def to_csv(self, dest) -> None:
        from .formats import _open_for

        with _open_for(dest, "w") as f:
            f.write(self.CSV_COLUMNS + "\n")
            for p in self.points:
                lo, hi = p.fer_interval()
                f.write(
                    f"{p.snr_db!r},{p.sigma!r},{p.frames},{p.frame_errors},"
                    f"{p.bit_errors},{p.undetected},{p.fer!r},{p.ber!r},"
                    f"{lo!r},{hi!r},{p.mean_iters!r}\n"
                )


def ebn0_to_sigma(snr_db: float, rate: float) -> float:
    if rate <= 0:
        raise ValueError(f"rate {rate} must be positive for the Eb/N0 conversion")
    return 1.0 / math.sqrt(2.0 * rate * 10.0 ** (snr_db / 10.0))


def gf2_rank(pcm: ParityCheckMatrix) -> int:
    a = pcm.to_dense().astype(np.uint8)
    rank = 0
    for col in range(a.shape[1]):
        hit = np.nonzero(a[rank:, col])[0]
        if hit.size == 0:
            continue
        if hit[0] != 0:
            a[[rank, rank + hit[0]]] = a[[rank + hit[0], rank]]
        for i in np.nonzero(a[:, col])[0]:
            if i != rank:
                a[i] ^= a[rank]
        rank += 1
        if rank == a.shape[0]:
            break
    return rank


def run_monte_carlo(
    pcm: ParityCheckMatrix,
    snr_db_points,
    config: DecoderConfig | None = None,
    *,
    min_frame_errors: int = 100,
    max_frames: int = 100_000,
    seed: int = 0,
    threads: int = 1,
    rate: float | None = None,
    rank_rate: bool = False,
) -> SimResult:
    """Simulate BP decoding over AWGN at each Eb/N0 point.

    Each point stops after ``min_frame_errors`` frame errors or
    ``max_frames`` frames, whichever comes first (checked at fixed chunk
    boundaries).  ``rate`` overrides the Eb/N0 conversion rate; otherwise
    the design rate is used, or the GF(2)-rank rate with ``rank_rate``.
    """
    snr_db_points = list(snr_db_points)
    if not snr_db_points:
        raise ValueError("SNR list is empty")
    config = config or DecoderConfig()
    if rate is None:
        rate = (
            (pcm.n - gf2_rank(pcm)) / pcm.n if rank_rate else pcm.design_rate()
        )
    decoder = BpDecoder(pcm)
    n = pcm.n
    punctured = config.punctured

    def one_frame(snr_idx: int, frame_idx: int, sigma: float):
        bitgen = np.random.Philox(
            key=np.array([seed, snr_idx], dtype=np.uint64),
            counter=np.array([0, 0, frame_idx, 0], dtype=np.uint64),
        )
        rng = np.random.Generator(bitgen)
        y = 1.0 + sigma * rng.standard_normal(n)
        llr = channel_llr(y, sigma, punctured)
        res = decoder.decode(llr, config)
        nerr = int(res.bits.sum())
        return nerr, res.iterations, res.syndrome_ok

    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    points = []
    for s_idx, snr_db in enumerate(snr_db_points):
        sigma = ebn0_to_sigma(float(snr_db), rate)
        frames = frame_errors = bit_errors = undetected = total_iters = 0
        while frames < max_frames and frame_errors < min_frame_errors:
            count = min(_CHUNK, max_frames - frames)
            idxs = range(frames, frames + count)
            if pool is not None:
                results = list(pool.map(lambda k: one_frame(s_idx, k, sigma), idxs))
            else:
                results = [one_frame(s_idx, k, sigma) for k in idxs]
            for nerr, iters, synd_ok in results:
                frames += 1
                total_iters += iters
                if nerr:
                    frame_errors += 1
                    bit_errors += nerr
                    if synd_ok:
                        undetected += 1
        pt = SnrPointResult(
            snr_db=float(snr_db),
            sigma=sigma,
            frames=frames,
            frame_errors=frame_errors,
            bit_errors=bit_errors,
            undetected=undetected,
            total_iterations=total_iters,
        )
        pt._n = n
        points.append(pt)
    if pool is not None:
        pool.shutdown()
    return SimResult(n=n, rate=rate, points=points)
