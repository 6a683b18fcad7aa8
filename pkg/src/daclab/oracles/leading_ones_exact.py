"""Exact runtime oracles for flip-count control on LeadingOnes.

Three independent routes to the expected runtime of a fitness-level
policy (level -> flip count) under (1+1) elitist local search from a
uniform initial bitstring:

* ``chain_cost``       - the fitness-level Markov chain, exact rationals;
* ``full_state_cost``  - the full 2^n bitstring chain, also exact: the
  states of one level form a hypercube whose internal transitions are a
  Cayley-graph convolution, so each level block diagonalizes under the
  Walsh-Hadamard transform with Krawtchouk eigenvalues and the whole
  system solves level by level without Gaussian elimination;
* ``simulate_runtime`` - a vectorized Monte-Carlo of the actual search.

A policy that picks k > n - level has zero improvement probability at
that level, making the expected runtime infinite; all routes report inf.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from ..seeding import derive_seed

__all__ = ["chain_cost", "full_state_cost", "simulate_runtime", "random_level_policy"]


def _policy_array(n: int, policy) -> list[int]:
    ks = [int(policy(level)) for level in range(n)]
    if any(k < 1 or k > n for k in ks):
        raise ValueError("flip counts must lie in [1, n]")
    return ks


def chain_cost(n: int, policy):
    """Expected runtime via the fitness-level chain, as an exact Fraction
    (or inf when a reachable level has no improving flip)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    ks = _policy_array(n, policy)
    e = [Fraction(0)] * (n + 1)
    for level in range(n - 1, -1, -1):
        k = ks[level]
        if k > n - level:
            return math.inf
        p_improve = Fraction(math.comb(n - 1 - level, k - 1), math.comb(n, k))
        m = n - level - 1
        # gain beyond level+1 is the leading-ones count of m fresh uniform bits
        acc = Fraction(1) / p_improve
        for g in range(m):
            acc += Fraction(1, 2 ** (g + 1)) * e[level + 1 + g]
        acc += Fraction(1, 2 ** m) * e[n]
        e[level] = acc
    total = sum(Fraction(1, 2 ** (level + 1)) * e[level] for level in range(n))
    total += Fraction(1, 2 ** n) * e[n]
    return total


def _krawtchouk(k: int, j: int, m: int) -> int:
    """Sum of (-1)^{|w & v|} over k-subsets w of an m-set, |v| = j."""
    return sum(
        (-1) ** i * math.comb(j, i) * math.comb(m - j, k - i)
        for i in range(max(0, k - (m - j)), min(j, k) + 1)
    )


def _wht(vec: list[Fraction]) -> list[Fraction]:
    """In-place fast Walsh-Hadamard transform (unnormalized)."""
    h = 1
    n = len(vec)
    while h < n:
        for i in range(0, n, h * 2):
            for j in range(i, i + h):
                x, y = vec[j], vec[j + h]
                vec[j] = x + y
                vec[j + h] = x - y
        h *= 2
    return vec


def full_state_cost(n: int, policy):
    """Expected runtime via the full bitstring chain, exactly.

    Solved backward over fitness levels; within level ``level`` the
    unknowns are indexed by the free suffix (bit j of the index is
    position level+1+j of the string).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    ks = _policy_array(n, policy)
    levels: list[list[Fraction]] = [None] * (n + 1)  # type: ignore[list-item]
    levels[n] = [Fraction(0)]

    def successor_value(level: int, suffix: int, m: int) -> Fraction:
        # post-flip suffix after an improving move: first zero bit splits it
        lowest_zero = (~suffix) & (suffix + 1)
        gain = lowest_zero.bit_length() - 1
        if gain >= m:
            return levels[n][0]
        new_level = level + 1 + gain
        return levels[new_level][suffix >> (gain + 1)]

    for level in range(n - 1, -1, -1):
        k = ks[level]
        if k > n - level:
            return math.inf
        m = n - level - 1
        size = 1 << m
        total_masks = math.comb(n, k)
        stay_share = Fraction(math.comb(n - level, k), total_masks)  # 1 - P(prefix touched)

        improving = [
            sum(1 << b for b in combo) for combo in itertools.combinations(range(m), k - 1)
        ]
        g = []
        for suffix in range(size):
            acc = Fraction(total_masks)  # times 1/total_masks below
            for w in improving:
                acc += successor_value(level, suffix ^ w, m)
            g.append(acc / total_masks)

        g_hat = _wht(g)
        e_hat = []
        for v in range(size):
            lam = _krawtchouk(k, bin(v).count("1"), m) if k <= m else 0
            denom = stay_share - Fraction(lam, total_masks)
            if denom == 0:
                return math.inf
            e_hat.append(g_hat[v] / denom)
        e = _wht(e_hat)
        levels[level] = [x / size for x in e]

    total = sum(sum(block) for block in levels[:n]) + levels[n][0]
    return total / (1 << n)


def simulate_runtime(n: int, policy, runs: int, seed: int, max_sweeps: int = 1_000_000) -> float:
    """Monte-Carlo mean runtime of the actual bitstring search, vectorized
    across runs."""
    ks = np.array(_policy_array(n, policy) + [1], dtype=np.int64)
    rng = np.random.default_rng(derive_seed(seed, [0]))
    bits = rng.integers(0, 1 << n, size=runs, dtype=np.int64)
    steps = np.zeros(runs, dtype=np.int64)
    active = np.arange(runs)

    def leading(b):
        lowest_zero = (~b) & (b + 1)
        return np.log2(lowest_zero).astype(np.int64)

    for _ in range(max_sweeps):
        lo = leading(bits[active])
        running = lo < n
        active = active[running]
        if active.size == 0:
            break
        lo = lo[running]
        k_now = ks[lo]
        flips = np.zeros(active.size, dtype=np.int64)
        for k in np.unique(k_now):
            rows = np.flatnonzero(k_now == k)
            u = rng.random((rows.size, n))
            chosen = np.argpartition(u, k - 1, axis=1)[:, :k]
            flips[rows] = np.bitwise_or.reduce(
                np.left_shift(np.int64(1), chosen), axis=1
            )
        parents = bits[active]
        offspring = parents ^ flips
        accept = leading(offspring) >= lo
        bits[active] = np.where(accept, offspring, parents)
        steps[active] += 1
    else:
        raise RuntimeError("simulation did not finish; policy may make no progress")
    return float(steps.mean())


def random_level_policy(n: int, rng: np.random.Generator):
    """A random level policy that always has improving mass (k <= n - level)."""
    table = [int(rng.integers(1, n - level + 1)) for level in range(n)]
    return lambda level: table[level]
