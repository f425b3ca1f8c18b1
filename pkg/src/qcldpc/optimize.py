"""Differential evolution over degree distributions.

The search follows the classic population scheme: generation zero is
random; every member s is then replaced by

    x_s = x_best + F * (x_s1 - x_s2 + x_s3 - x_s4)

with four distinct random partners, separately for the variable and check
sides.  Mutants are repaired by clipping negatives, renormalizing, and
projecting the check side onto the rate target.  Fitness is the residual
error probability after a fixed small number of density-evolution steps at
the current noise level; whenever the best member converges, the noise
level is raised a step and the population keeps evolving.  The best
distribution is finally certified with a full bisection threshold run.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .density import DeConfig, DegreeDistribution, ThresholdResult, run_de, threshold


def _move_to_harmonic(w: np.ndarray, inv_d: np.ndarray, target: float) -> np.ndarray:
    """Shift mass between support extremes until w @ inv_d == target.

    Assumes sum(w) == 1 and target within [inv_d.min(), inv_d.max()].  Mass
    moves from the extreme degrees inward, so the adjustment is minimal in
    the number of touched support points.
    """
    w = w.copy()
    order_small = np.argsort(inv_d)  # ascending 1/d: high degrees first
    for _ in range(len(w) + 1):
        s = float(w @ inv_d)
        if abs(s - target) < 1e-14:
            break
        if s < target:
            rcv = order_small[-1]  # smallest degree
            donors = [i for i in order_small if w[i] > 0 and inv_d[i] < inv_d[rcv]]
        else:
            rcv = order_small[0]  # largest degree
            donors = [i for i in reversed(order_small) if w[i] > 0 and inv_d[i] > inv_d[rcv]]
        if not donors:
            break
        dnr = donors[0]
        t_full = (target - s) / (inv_d[rcv] - inv_d[dnr])
        t = min(t_full, w[dnr])
        w[dnr] -= t
        w[rcv] += t
    return w


class _Repair:
    """Clip / renormalize / rate-project raw (lambda, rho) vectors."""

    def __init__(self, lam_degrees, rho_degrees, rate: float):
        self.lam_degrees = np.array(sorted(int(d) for d in lam_degrees))
        self.rho_degrees = np.array(sorted(int(d) for d in rho_degrees))
        if (self.lam_degrees < 2).any() or (self.rho_degrees < 2).any():
            raise ValueError("support degrees must be >= 2")
        if len(self.lam_degrees) < 2 or len(self.rho_degrees) < 2:
            raise ValueError("supports need at least two degrees each")
        if not 0.0 < rate < 1.0:
            raise ValueError("rate target must be in (0, 1)")
        self.rate = rate
        self.inv_l = 1.0 / self.lam_degrees
        self.inv_r = 1.0 / self.rho_degrees
        # feasibility: some l_avg reachable on both sides
        lo = max(self.lam_degrees[0], (1 - rate) * self.rho_degrees[0])
        hi = min(self.lam_degrees[-1], (1 - rate) * self.rho_degrees[-1])
        if lo >= hi:
            raise ValueError(
                f"rate {rate} infeasible for supports "
                f"{self.lam_degrees.tolist()} / {self.rho_degrees.tolist()}"
            )
        self.l_avg_lo, self.l_avg_hi = lo, hi

    def __call__(self, lam_raw: np.ndarray, rho_raw: np.ndarray) -> DegreeDistribution:
        lam = np.clip(lam_raw, 0.0, None)
        rho = np.clip(rho_raw, 0.0, None)
        if lam.sum() <= 0:
            lam = np.ones_like(lam)
        if rho.sum() <= 0:
            rho = np.ones_like(rho)
        lam = lam / lam.sum()
        rho = rho / rho.sum()
        # keep l_avg inside the band where the rate target is reachable
        margin = 1e-9 * (self.l_avg_hi - self.l_avg_lo)
        l_avg = 1.0 / float(lam @ self.inv_l)
        l_avg = min(max(l_avg, self.l_avg_lo + margin), self.l_avg_hi - margin)
        lam = _move_to_harmonic(lam, self.inv_l, 1.0 / l_avg)
        r_avg = l_avg / (1.0 - self.rate)
        rho = _move_to_harmonic(rho, self.inv_r, 1.0 / r_avg)
        return DegreeDistribution(
            dict(zip(self.lam_degrees.tolist(), lam.tolist())),
            dict(zip(self.rho_degrees.tolist(), rho.tolist())),
        )

    def to_vectors(self, dist: DegreeDistribution) -> tuple:
        lam = np.array([dist.lam.get(int(d), 0.0) for d in self.lam_degrees])
        rho = np.array([dist.rho.get(int(d), 0.0) for d in self.rho_degrees])
        return lam, rho


def _mutate_population(pop: list, best: tuple, scale_f: float, rng) -> list:
    """Full-replacement mutation around the best member."""
    out = []
    for s in range(len(pop)):
        others = [i for i in range(len(pop)) if i != s]
        s1, s2, s3, s4 = rng.choice(others, size=4, replace=False)
        lam = best[0] + scale_f * (pop[s1][0] - pop[s2][0] + pop[s3][0] - pop[s4][0])
        rho = best[1] + scale_f * (pop[s1][1] - pop[s2][1] + pop[s3][1] - pop[s4][1])
        out.append((lam, rho))
    return out


@dataclass
class DiffEvolutionResult:
    distribution: DegreeDistribution
    threshold: ThresholdResult
    sigma_reached: float
    generations: int
    history: list  # (sigma, generation, best_pe) tuples

    def to_dict(self) -> dict:
        return {
            "lambda": {str(d): f for d, f in sorted(self.distribution.lam.items())},
            "rho": {str(d): f for d, f in sorted(self.distribution.rho.items())},
            "design_rate": self.distribution.design_rate,
            "sigma_star": self.threshold.sigma_star,
            "sigma_reached": self.sigma_reached,
            "generations": self.generations,
            "history": [list(h) for h in self.history],
        }


def diff_evolution(
    lam_support,
    rho_support,
    *,
    rate: float = 0.5,
    np_size: int = 10,
    scale_f: float = 0.5,
    seed: int = 0,
    config: DeConfig | None = None,
    sigma0: float = 0.85,
    sigma_step: float = 0.005,
    generations_per_sigma: int = 20,
    fitness_iters: int = 100,
    eps_fit: float = 1e-3,
    max_sigma_levels: int = 200,
) -> DiffEvolutionResult:
    """Optimize (lambda, rho) on fixed supports for a rate target.

    Fitness at noise level sigma is the residual error probability after
    ``fitness_iters`` density-evolution steps; a best member below
    ``eps_fit`` advances the noise level by ``sigma_step``.  The ladder
    stops when ``generations_per_sigma`` generations fail to converge at a
    level, and the best distribution found is certified with a full
    threshold run under ``config``.  Deterministic for a fixed seed.
    """
    if np_size < 6:
        raise ValueError("population size must be >= 6")
    if not 0.0 < scale_f <= 1.0:
        raise ValueError("scale factor F must be in (0, 1]")
    config = config or DeConfig()
    repair = _Repair(lam_support, rho_support, rate)
    fit_cfg = dataclasses.replace(config, max_iter=fitness_iters)
    rng = np.random.default_rng(seed)

    def fitness(vectors, sigma):
        dist = repair(*vectors)
        return run_de(dist, sigma, fit_cfg).final_pe

    pop = [
        (rng.random(len(repair.lam_degrees)), rng.random(len(repair.rho_degrees)))
        for _ in range(np_size)
    ]
    sigma = sigma0
    history = []
    generations = 0
    best_vectors = None
    sigma_reached = None

    for _level in range(max_sigma_levels):
        scores = [fitness(v, sigma) for v in pop]
        best_idx = int(np.argmin(scores))
        gens_here = 0
        while scores[best_idx] >= eps_fit and gens_here < generations_per_sigma:
            pop = _mutate_population(pop, pop[best_idx], scale_f, rng)
            scores = [fitness(v, sigma) for v in pop]
            best_idx = int(np.argmin(scores))
            gens_here += 1
            generations += 1
            history.append((sigma, generations, scores[best_idx]))
        if scores[best_idx] < eps_fit:
            best_vectors = (pop[best_idx][0].copy(), pop[best_idx][1].copy())
            sigma_reached = sigma
            sigma += sigma_step
        else:
            break

    if best_vectors is None:  # never converged, certify the least-bad member
        scores = [fitness(v, sigma) for v in pop]
        best_vectors = pop[int(np.argmin(scores))]
        sigma_reached = sigma
    best = repair(*best_vectors)
    cert = threshold(best, config)
    return DiffEvolutionResult(
        distribution=best,
        threshold=cert,
        sigma_reached=sigma_reached,
        generations=generations,
        history=history,
    )
