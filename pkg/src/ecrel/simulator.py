"""Seeded Monte Carlo estimates of the data loss probability.

Two models are simulated.

``general_runs``
    System inter-failure times ``Y_i`` and repair times ``Z_i`` are iid. Failure
    ``i`` extends the current run when it arrives before the repair of failure
    ``i-1`` finishes (``Y_i < Z_{i-1}``). Each failure gets a uniform disk label
    and a run is fatal once its labels cover more than ``n - k`` disks. Only
    failures strictly before ``t`` count.

``constant_conditioned`` / ``constant_poisson``
    Each disk fails ``m[d]`` times (or a Poisson number of times) at uniform
    instants on ``[0, t]``; every repair lasts ``t_rep``. Under the ``cluster``
    definition a loss is a tight cluster whose gaps are all below ``t_rep``,
    which is the same as a maximal chain of short gaps holding at least
    ``n - k + 1`` distinct disks. Under the ``chain`` definition a loss needs
    ``n - k + 1`` instants on distinct disks whose own successive gaps are all
    below ``t_rep``.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Sequence
from dataclasses import dataclass, replace

import numba as nb
import numpy as np

from ecrel.code import CodeParams
from ecrel.distributions import (
    KIND_CONSTANT,
    Constant,
    Distribution,
    Exponential,
    Weibull,
    rate_convention_convert,
)
from ecrel.estimate import SimEstimate
from ecrel.rng import MAX_EXP_DRAW, seed_key, trial_key, uniform

__all__ = [
    "MODES",
    "LOSS_DEFS",
    "SimConfig",
    "SimEstimate",
    "simulate",
    "simulate_constant",
    "simulate_general",
    "sweep",
]

# numba probes for a TBB runtime on first parallel launch and warns when the
# installed one is too old; it then falls back to another layer on its own.
warnings.filterwarnings("ignore", message=r"The TBB threading layer requires", module=r"numba\.")

MODES = ("general_runs", "constant_conditioned", "constant_poisson")
LOSS_DEFS = ("cluster", "chain")
CHUNK = 1 << 22
MAX_POISSON_MEAN = 500.0


@dataclass(frozen=True)
class SimConfig:
    code: CodeParams
    t: float
    trials: int
    seed: int
    mode: str = "general_runs"
    fail: Distribution | None = None
    rep: Distribution | None = None
    t_rep: float | None = None
    m: tuple[int, ...] | None = None
    lam: float | None = None
    loss_def: str = "cluster"

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.loss_def not in LOSS_DEFS:
            raise ValueError(f"loss_def must be one of {LOSS_DEFS}, got {self.loss_def!r}")
        if not (isinstance(self.trials, int) and self.trials >= 1):
            raise ValueError("trials must be an integer >= 1")
        if not self.t > 0:
            raise ValueError("t must be positive")
        if self.mode == "general_runs":
            if self.fail is None or self.rep is None:
                raise ValueError("general_runs needs fail and rep distributions")
            if self.loss_def != "cluster":
                raise ValueError("loss_def only applies to the constant-repair modes")
            if isinstance(self.fail, Constant) and self.fail.value == 0:
                raise ValueError("failure law must have a positive mean")
            return
        if self.t_rep is None or self.t_rep < 0:
            raise ValueError("constant-repair modes need t_rep >= 0")
        if self.mode == "constant_conditioned":
            if self.m is None or len(self.m) != self.code.n or any(x < 0 for x in self.m):
                raise ValueError(f"constant_conditioned needs m with {self.code.n} nonnegative counts")
            object.__setattr__(self, "m", tuple(int(x) for x in self.m))
        else:
            if self.lam is None or not self.lam > 0:
                raise ValueError("constant_poisson needs a per-disk rate lam > 0")
            if self.lam * self.t > MAX_POISSON_MEAN:
                raise ValueError(f"lam * t must be at most {MAX_POISSON_MEAN}")
        if self.loss_def == "chain" and self.code.n > 62:
            raise ValueError("chain definition supports at most 62 disks")


@nb.njit(inline="always", cache=True)
def _draw(kind, shape, scale, u):
    if kind == KIND_CONSTANT:
        return scale
    e = -math.log1p(-u)
    if shape == 1.0:
        return scale * e
    if shape == 2.0:
        return scale * math.sqrt(e)
    if shape == 0.5:
        return scale * e * e
    return scale * e ** (1.0 / shape)


@nb.njit(inline="always", cache=True)
def _popcount(x):
    c = 0
    while x:
        x &= x - 1
        c += 1
    return c


@nb.njit(cache=True)
def _general_trial(key, n, k, t, fk, fs, fc, rk, rs, rc, zcap):
    # Uniform 3i drives Y_i, 3i+1 drives Z_i and 3i+2 the label of failure i.
    # Z and labels are read only when they can change the outcome.
    x = 0.0
    i = 0
    mask = np.int64(0)
    while True:
        y = _draw(fk, fs, fc, uniform(key, 3 * i))
        x += y
        if x >= t:
            return 0
        if i > 0 and y < zcap and y < _draw(rk, rs, rc, uniform(key, 3 * i - 2)):
            if mask == 0:
                mask = np.int64(1) << np.int64(uniform(key, 3 * i - 1) * n)
            mask |= np.int64(1) << np.int64(uniform(key, 3 * i + 2) * n)
            if _popcount(mask) > n - k:
                return 1
        else:
            mask = 0
        i += 1


@nb.njit(parallel=True, cache=True)
def _general_kernel(skey, first, count, n, k, t, fk, fs, fc, rk, rs, rc, zcap):
    out = np.zeros(count, np.uint8)
    for j in nb.prange(count):
        out[j] = _general_trial(trial_key(skey, first + j), n, k, t, fk, fs, fc, rk, rs, rc, zcap)
    return out


@nb.njit(inline="always", cache=True)
def _cluster_loss(xs, labs, t_rep, need):
    mask = np.int64(1) << labs[0]
    for i in range(1, xs.shape[0]):
        if xs[i] - xs[i - 1] < t_rep:
            mask |= np.int64(1) << labs[i]
        else:
            mask = np.int64(1) << labs[i]
        if _popcount(mask) >= need:
            return True
    return False


@nb.njit(cache=True)
def _chain_loss(xs, labs, t_rep, need):
    s = xs.shape[0]
    idx = np.empty(need, np.int64)
    nxt = np.empty(need, np.int64)
    masks = np.empty(need, np.int64)
    for a in range(s):
        idx[0] = a
        masks[0] = np.int64(1) << labs[a]
        nxt[0] = a + 1
        depth = 1
        while depth > 0:
            if depth == need:
                return True
            p = idx[depth - 1]
            c = nxt[depth - 1]
            found = False
            while c < s and xs[c] - xs[p] < t_rep:
                bit = np.int64(1) << labs[c]
                if masks[depth - 1] & bit == 0:
                    found = True
                    break
                c += 1
            if found:
                nxt[depth - 1] = c + 1
                idx[depth] = c
                masks[depth] = masks[depth - 1] | (np.int64(1) << labs[c])
                nxt[depth] = c + 1
                depth += 1
            else:
                depth -= 1
    return False


@nb.njit(parallel=True, cache=True)
def _constant_kernel(skey, first, count, n, k, t, t_rep, m, lam, poisson, chain):
    out = np.zeros(count, np.uint8)
    need = n - k + 1
    mean = lam * t
    for j in nb.prange(count):
        key = trial_key(skey, first + j)
        counts = np.empty(n, np.int64)
        s = 0
        positive = 0
        for d in range(n):
            if poisson:
                # Inversion of the Poisson cdf; counter d is reserved for disk d.
                u = uniform(key, d)
                p = math.exp(-mean)
                cdf = p
                c = 0
                while u > cdf and p > 0.0:
                    c += 1
                    p *= mean / c
                    cdf += p
                counts[d] = c
            else:
                counts[d] = m[d]
            s += counts[d]
            if counts[d] > 0:
                positive += 1
        if positive < need:
            continue
        xs = np.empty(s, np.float64)
        labs = np.empty(s, np.int64)
        pos = 0
        for d in range(n):
            for _ in range(counts[d]):
                xs[pos] = uniform(key, n + pos) * t
                labs[pos] = d
                pos += 1
        order = np.argsort(xs, kind="mergesort")
        xs = xs[order]
        labs = labs[order]
        if _cluster_loss(xs, labs, t_rep, need):
            if not chain or _chain_loss(xs, labs, t_rep, need):
                out[j] = 1
    return out


def _run_chunks(kernel, seed: int, trials: int, *args) -> int:
    skey = seed_key(seed)
    losses = 0
    for first in range(0, trials, CHUNK):
        count = min(CHUNK, trials - first)
        losses += int(kernel(skey, np.int64(first), np.int64(count), *args).sum())
    return losses


def _z_cap(rep: Distribution) -> float:
    kind, shape, scale = rep.kernel_params()
    if kind == KIND_CONSTANT:
        return scale
    return scale * MAX_EXP_DRAW ** (1.0 / shape) * (1.0 + 1e-12)


def simulate_general(cfg: SimConfig) -> SimEstimate:
    """Run-based simulation for general failure and repair laws."""
    if cfg.mode != "general_runs":
        raise ValueError("simulate_general needs mode='general_runs'")
    fk, fs, fc = cfg.fail.kernel_params()
    rk, rs, rc = cfg.rep.kernel_params()
    losses = _run_chunks(
        _general_kernel,
        cfg.seed,
        cfg.trials,
        np.int64(cfg.code.n),
        np.int64(cfg.code.k),
        float(cfg.t),
        np.int64(fk),
        float(fs),
        float(fc),
        np.int64(rk),
        float(rs),
        float(rc),
        float(_z_cap(cfg.rep)),
    )
    return SimEstimate.from_counts(losses, cfg.trials, cfg.seed)


def simulate_constant(cfg: SimConfig) -> SimEstimate:
    """Constant-repair simulation with fixed per-disk counts or Poisson counts."""
    if cfg.mode == "general_runs":
        raise ValueError("simulate_constant needs a constant-repair mode")
    poisson = cfg.mode == "constant_poisson"
    m = np.zeros(cfg.code.n, np.int64) if poisson else np.asarray(cfg.m, np.int64)
    losses = _run_chunks(
        _constant_kernel,
        cfg.seed,
        cfg.trials,
        np.int64(cfg.code.n),
        np.int64(cfg.code.k),
        float(cfg.t),
        float(cfg.t_rep),
        m,
        float(cfg.lam or 0.0),
        poisson,
        cfg.loss_def == "chain",
    )
    return SimEstimate.from_counts(losses, cfg.trials, cfg.seed)


def simulate(cfg: SimConfig) -> SimEstimate:
    if cfg.mode == "general_runs":
        return simulate_general(cfg)
    return simulate_constant(cfg)


SWEEP_PARAMS = ("t", "t_rep", "lam", "fail_mean", "rep_mean")


def _with_param(cfg: SimConfig, param: str, value: float, seed: int) -> SimConfig:
    if param in ("t", "t_rep"):
        return replace(cfg, **{param: value, "seed": seed})
    if param == "lam":
        if cfg.mode == "general_runs":
            # Per-disk rate; the run simulator needs the system inter-failure law.
            fail = Exponential(rate_convention_convert(cfg.code.n, value))
            return replace(cfg, fail=fail, seed=seed)
        return replace(cfg, lam=value, seed=seed)
    if param in ("fail_mean", "rep_mean"):
        which = "fail" if param == "fail_mean" else "rep"
        return replace(cfg, **{which: _rescale(getattr(cfg, which), value), "seed": seed})
    raise ValueError(f"unknown sweep parameter {param!r}; choose from {', '.join(SWEEP_PARAMS)}")


def _rescale(d: Distribution | None, mean: float) -> Distribution:
    if d is None:
        raise ValueError("no distribution to rescale")
    if isinstance(d, Exponential):
        return Exponential(1.0 / mean)
    if isinstance(d, Weibull):
        return Weibull.from_mean(d.shape, mean)
    return Constant(mean)


def sweep(cfg: SimConfig, param: str, grid: Sequence[float]) -> list[tuple[float, SimEstimate]]:
    """One estimate per grid value; point ``i`` uses seed ``cfg.seed + i``."""
    if len(grid) == 0:
        raise ValueError("grid must be nonempty")
    if param not in SWEEP_PARAMS:
        raise ValueError(f"unknown sweep parameter {param!r}; choose from {', '.join(SWEEP_PARAMS)}")
    return [(float(v), simulate(_with_param(cfg, param, float(v), cfg.seed + i))) for i, v in enumerate(grid)]
