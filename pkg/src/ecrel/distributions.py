"""Failure and repair duration laws, ``G = P(Y < Z)`` and the limiting loss formula.

``Y`` is the time between consecutive failures of the whole system and
``Z`` a repair duration. When ``G`` is small the loss probability over a
window ``t`` is approximately

    (n-1)!/(k-1)! * t / E(Y) * (G/n)**(n-k).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import integrate

from ecrel.code import CodeParams
from ecrel.errors import QuadratureError

__all__ = [
    "Constant",
    "Distribution",
    "Exponential",
    "GResult",
    "KIND_CONSTANT",
    "KIND_WEIBULL",
    "Weibull",
    "compute_G",
    "limiting_loss",
    "limiting_loss_from_g",
    "parse_distribution",
    "rate_convention_convert",
    "worst_case_constant_repair",
]

# Kernel codes shared with the simulator; exponential runs as Weibull(1).
KIND_WEIBULL = 0
KIND_CONSTANT = 1

DEFAULT_TOL = 1e-10


def _positive(name: str, value: float) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class Exponential:
    rate: float

    def __post_init__(self) -> None:
        _positive("rate", self.rate)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, -np.expm1(-self.rate * np.maximum(x, 0.0)), 0.0)[()]

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, np.exp(-self.rate * np.maximum(x, 0.0)), 1.0)[()]

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, self.rate * np.exp(-self.rate * np.maximum(x, 0.0)), 0.0)[()]

    def ppf(self, u):
        return -np.log1p(-np.asarray(u, dtype=float))[()] / self.rate

    def mean(self) -> float:
        return 1.0 / self.rate

    def sample(self, rng: np.random.Generator, size=None):
        return self.ppf(rng.random(size))

    def kernel_params(self) -> tuple[int, float, float]:
        return KIND_WEIBULL, 1.0, 1.0 / self.rate

    def __str__(self) -> str:
        return f"exp:rate={self.rate:g}"


@dataclass(frozen=True)
class Weibull:
    shape: float
    scale: float

    def __post_init__(self) -> None:
        _positive("shape", self.shape)
        _positive("scale", self.scale)

    @classmethod
    def from_mean(cls, shape: float, mean: float) -> Weibull:
        _positive("shape", shape)
        _positive("mean", mean)
        return cls(shape, mean / math.gamma(1.0 + 1.0 / shape))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        z = np.maximum(x, 0.0) / self.scale
        return np.where(x > 0, -np.expm1(-(z**self.shape)), 0.0)[()]

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        z = np.maximum(x, 0.0) / self.scale
        return np.where(x > 0, np.exp(-(z**self.shape)), 1.0)[()]

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        k, a = self.shape, self.scale
        with np.errstate(divide="ignore"):
            z = np.maximum(x, 0.0) / a
            body = (k / a) * z ** (k - 1.0) * np.exp(-(z**k))
        return np.where(x > 0, body, 0.0)[()]

    def ppf(self, u):
        return (self.scale * (-np.log1p(-np.asarray(u, dtype=float))) ** (1.0 / self.shape))[()]

    def mean(self) -> float:
        return self.scale * math.gamma(1.0 + 1.0 / self.shape)

    def sample(self, rng: np.random.Generator, size=None):
        return self.ppf(rng.random(size))

    def kernel_params(self) -> tuple[int, float, float]:
        return KIND_WEIBULL, self.shape, self.scale

    def __str__(self) -> str:
        return f"weibull:shape={self.shape:g},scale={self.scale:g}"


@dataclass(frozen=True)
class Constant:
    value: float

    def __post_init__(self) -> None:
        if not (isinstance(self.value, (int, float)) and math.isfinite(self.value) and self.value >= 0):
            raise ValueError(f"value must be a nonnegative finite number, got {self.value!r}")

    def cdf(self, x):
        return np.where(np.asarray(x, dtype=float) >= self.value, 1.0, 0.0)[()]

    def sf(self, x):
        return 1.0 - self.cdf(x)

    def pdf(self, x):
        raise ValueError("a constant law has no density")

    def ppf(self, u):
        return np.full_like(np.asarray(u, dtype=float), self.value)[()]

    def mean(self) -> float:
        return float(self.value)

    def sample(self, rng: np.random.Generator, size=None):
        return self.ppf(rng.random(size))

    def kernel_params(self) -> tuple[int, float, float]:
        return KIND_CONSTANT, 1.0, float(self.value)

    def __str__(self) -> str:
        return f"const:value={self.value:g}"


Distribution = Union[Exponential, Weibull, Constant]


def _as_weibull(d: Distribution) -> Weibull | None:
    if isinstance(d, Weibull):
        return d
    if isinstance(d, Exponential):
        return Weibull(1.0, 1.0 / d.rate)
    return None


_SPEC_RE = re.compile(r"^\s*(\w+)\s*:\s*(.*)$")


def parse_distribution(text: str) -> Distribution:
    """Parse ``exp:rate=R``, ``weibull:shape=K,mean=M`` (or ``scale=``) or ``const:value=C``."""
    match = _SPEC_RE.match(text)
    if not match:
        raise ValueError(f"bad distribution spec {text!r}; expected kind:key=value,...")
    kind = match.group(1).lower()
    params: dict[str, float] = {}
    for item in filter(None, (p.strip() for p in match.group(2).split(","))):
        key, sep, val = item.partition("=")
        if not sep:
            raise ValueError(f"bad parameter {item!r} in {text!r}")
        key = key.strip().lower()
        if key in params:
            raise ValueError(f"duplicate parameter {key!r} in {text!r}")
        try:
            params[key] = float(val)
        except ValueError:
            raise ValueError(f"parameter {key!r} is not a number in {text!r}") from None

    def take(*required: str, optional: tuple[str, ...] = ()) -> None:
        unknown = set(params) - set(required) - set(optional)
        missing = [r for r in required if r not in params]
        if unknown or missing:
            raise ValueError(
                f"{kind} needs {', '.join(required) or 'nothing'}"
                + (f" (one of {', '.join(optional)})" if optional else "")
                + f"; got {', '.join(sorted(params)) or 'none'}"
            )

    if kind in ("exp", "exponential"):
        take("rate")
        return Exponential(params["rate"])
    if kind == "weibull":
        take("shape", optional=("mean", "scale"))
        if ("mean" in params) == ("scale" in params):
            raise ValueError("weibull needs exactly one of mean= or scale=")
        if "mean" in params:
            return Weibull.from_mean(params["shape"], params["mean"])
        return Weibull(params["shape"], params["scale"])
    if kind in ("const", "constant"):
        take("value")
        return Constant(params["value"])
    raise ValueError(f"unknown distribution kind {kind!r}; use exp, weibull or const")


@dataclass(frozen=True)
class GResult:
    g: float
    method: str
    abs_error: float


def compute_G(
    fail: Distribution, rep: Distribution, tol: float = DEFAULT_TOL, *, method: str = "auto"
) -> GResult:
    """``P(Y < Z)`` for independent ``Y ~ fail`` and ``Z ~ rep``.

    Closed forms cover exponential pairs, a constant on either side and
    identical continuous laws. Otherwise ``F_Y(z) f_Z(z)`` is integrated
    adaptively over ``[0, q]`` where ``P(Z > q) = tol / 10``. Pass
    ``method="quadrature"`` to skip the closed forms for continuous laws.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if method not in ("auto", "quadrature"):
        raise ValueError("method must be 'auto' or 'quadrature'")
    if method == "quadrature" and not (isinstance(fail, Constant) or isinstance(rep, Constant)):
        return _quadrature_G(_as_weibull(fail), _as_weibull(rep), tol)
    if isinstance(rep, Constant):
        if isinstance(fail, Constant):
            return GResult(1.0 if fail.value < rep.value else 0.0, "analytic", 0.0)
        return GResult(float(fail.cdf(rep.value)), "analytic", 0.0)
    if isinstance(fail, Constant):
        return GResult(float(rep.sf(fail.value)), "analytic", 0.0)
    if isinstance(fail, Exponential) and isinstance(rep, Exponential):
        return GResult(fail.rate / (fail.rate + rep.rate), "analytic", 0.0)
    wf, wr = _as_weibull(fail), _as_weibull(rep)
    if wf == wr:
        return GResult(0.5, "analytic", 0.0)
    return _quadrature_G(wf, wr, tol)


def _quadrature_G(wf: Weibull, wr: Weibull, tol: float) -> GResult:
    q = float(wr.ppf(1.0 - tol / 10.0))
    scale = wr.scale
    # Integrate in units of the repair scale so the integrand has O(1) support.
    kf, af = wf.shape, wf.scale / scale
    kr = wr.shape

    def integrand(u: float) -> float:
        if u <= 0.0:
            return 0.0
        fy = -math.expm1(-((u / af) ** kf))
        return fy * kr * u ** (kr - 1.0) * math.exp(-(u**kr))

    upper = q / scale
    # Both laws can put their mass on very different scales; break the range
    # geometrically around each so no feature falls between quadrature nodes.
    marks = {upper}
    for base in (1.0, af):
        marks.update(base * 10.0**e for e in range(-8, 4))
    edges = [0.0] + sorted(x for x in marks if 0.0 < x <= upper)
    share = tol / (10.0 * len(edges))
    g = err = 0.0
    for lo, hi in zip(edges, edges[1:]):
        part, part_err = integrate.quad(integrand, lo, hi, epsabs=share, epsrel=1e-12, limit=200)
        g += part
        err += part_err
    err_total = err + tol / 10.0
    if not err_total <= tol:
        raise QuadratureError(f"quadrature error estimate {err_total:.3e} exceeds tol {tol:.3e}")
    return GResult(min(max(g, 0.0), 1.0), "quadrature", err_total)


def limiting_loss_from_g(code: CodeParams, g: float, mean_y: float, t: float) -> float:
    """Limiting loss given ``G`` and the mean system inter-failure time."""
    if not 0 <= g <= 1:
        raise ValueError("g must lie in [0, 1]")
    if mean_y <= 0 or t <= 0:
        raise ValueError("need mean_y > 0 and t > 0")
    n, k = code.n, code.k
    return math.factorial(n - 1) / math.factorial(k - 1) * t / mean_y * (g / n) ** (n - k)


def limiting_loss(
    code: CodeParams, fail: Distribution, rep: Distribution, t: float, *, tol: float = DEFAULT_TOL
) -> float:
    """Small-``G`` loss probability over ``[0, t]``; ``fail`` is the system inter-failure law."""
    return limiting_loss_from_g(code, compute_G(fail, rep, tol).g, fail.mean(), t)


def worst_case_constant_repair(
    code: CodeParams, fail: Distribution, rep_mean: float, t: float
) -> float:
    """Limiting loss with ``G`` replaced by ``F_Y(rep_mean)``.

    When ``F_Y`` is concave (exponential, Weibull with shape <= 1) Jensen's
    inequality gives ``G = E[F_Y(Z)] <= F_Y(E[Z])``, so a constant repair of
    the same mean is the worst case. The concavity is not checked.
    """
    if rep_mean < 0:
        raise ValueError("rep_mean must be nonnegative")
    return limiting_loss_from_g(code, float(fail.cdf(rep_mean)), fail.mean(), t)


def rate_convention_convert(n: int, per_disk: float | Exponential) -> float | Exponential:
    """Per-disk exponential rate to the system rate ``n * lambda``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if isinstance(per_disk, Exponential):
        return Exponential(n * per_disk.rate)
    if isinstance(per_disk, (Weibull, Constant)):
        raise TypeError("only exponential failure laws superpose to a renewal process")
    _positive("per-disk rate", per_disk)
    return n * float(per_disk)
