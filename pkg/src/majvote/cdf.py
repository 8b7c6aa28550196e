"""Cumulative distribution functions on [0, 1].

These serve two roles: as a profile generator (``p_{n,k} = F(k/n)``) and
as the distribution of member accuracies in Monte-Carlo checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import InvalidInputError, MajvoteError

BETAINC_TOL = 1e-12
BETAINC_MAXITER = 500
_TINY = 1e-300


def _betacf(a: float, b: float, x: float) -> float:
    # Modified Lentz evaluation of the continued fraction for I_x(a, b).
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, BETAINC_MAXITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < BETAINC_TOL:
            return h
    raise MajvoteError(
        f"incomplete beta continued fraction did not converge in {BETAINC_MAXITER} "
        f"iterations (a={a}, b={b}, x={x})"
    )


def betainc_regularized(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function ``I_x(a, b)``.

    Uses the continued fraction directly when ``x < (a+1)/(a+b+2)`` and the
    symmetry ``I_x(a, b) = 1 - I_{1-x}(b, a)`` otherwise, so the fraction is
    always evaluated where it converges quickly.
    """
    if a <= 0 or b <= 0:
        raise InvalidInputError(f"Beta parameters must be positive, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise InvalidInputError(f"x={x} outside [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    log_front = (
        a * math.log(x) + b * math.log1p(-x)
        - (math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        value = front * _betacf(a, b, x) / a
    else:
        value = 1.0 - front * _betacf(b, a, 1.0 - x) / b
    return min(1.0, max(0.0, value))


@dataclass(frozen=True)
class StepMajority:
    """F(y) = 0 for y <= 1/2 and 1 above; as an accuracy law, a point mass at 1/2."""

    def __call__(self, y: float) -> float:
        return 1.0 if y > 0.5 else 0.0

    @property
    def mean(self) -> float:
        return 0.5

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return np.full(size, 0.5)

    @property
    def label(self) -> str:
        return "step"


@dataclass(frozen=True)
class Arcsine:
    """Beta(1/2, 1/2) with F(y) = (2/pi) asin(sqrt(y))."""

    def __call__(self, y: float) -> float:
        return min(1.0, 2.0 / math.pi * math.asin(math.sqrt(y)))

    @property
    def mean(self) -> float:
        return 0.5

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.beta(0.5, 0.5, size)

    @property
    def label(self) -> str:
        return "arcsine"


@dataclass(frozen=True)
class Beta:
    a: float
    b: float

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (a > 0 and b > 0 and math.isfinite(a) and math.isfinite(b)):
            raise InvalidInputError(f"Beta parameters must be finite and positive, got a={self.a}, b={self.b}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __call__(self, y: float) -> float:
        return betainc_regularized(self.a, self.b, y)

    @property
    def mean(self) -> float:
        return self.a / (self.a + self.b)

    @property
    def variance(self) -> float:
        s = self.a + self.b
        return self.a * self.b / (s * s * (s + 1.0))

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        return rng.beta(self.a, self.b, size)

    @property
    def label(self) -> str:
        return f"beta:{self.a!r}:{self.b!r}"


def generalized_arcsine(alpha: float) -> Beta:
    """Beta(1 - alpha, alpha), 0 < alpha < 1."""
    if not 0.0 < alpha < 1.0:
        raise InvalidInputError(f"generalized arcsine needs 0 < alpha < 1, got {alpha}")
    return Beta(1.0 - alpha, alpha)


@dataclass(frozen=True)
class EmpiricalStep:
    """Right-continuous step CDF through the given ``(y, F(y))`` points.

    F is 0 left of the first point; the last F value must be 1.
    """

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(y), float(f)) for y, f in self.points)
        if not pts:
            raise InvalidInputError("empirical CDF needs at least one point")
        for y, f in pts:
            if not (0.0 <= y <= 1.0 and 0.0 <= f <= 1.0):
                raise InvalidInputError(f"empirical CDF point ({y}, {f}) outside [0, 1]^2")
        for (y0, f0), (y1, f1) in zip(pts, pts[1:]):
            if y1 < y0 or f1 < f0:
                raise InvalidInputError("empirical CDF points must be sorted with nondecreasing F")
        if abs(pts[-1][1] - 1.0) > 1e-12:
            raise InvalidInputError(f"empirical CDF must reach 1, last value is {pts[-1][1]}")
        object.__setattr__(self, "points", pts)

    @classmethod
    def point_mass(cls, mu: float) -> "EmpiricalStep":
        return cls(((mu, 1.0),))

    def __call__(self, y: float) -> float:
        value = 0.0
        for yj, fj in self.points:
            if yj > y:
                break
            value = fj
        return value

    @property
    def _jumps(self) -> tuple[np.ndarray, np.ndarray]:
        ys = np.array([y for y, _ in self.points])
        fs = np.array([f for _, f in self.points])
        return ys, np.diff(fs, prepend=0.0)

    @property
    def mean(self) -> float:
        ys, w = self._jumps
        return float(np.dot(ys, w))

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        ys = np.array([y for y, _ in self.points])
        fs = np.array([f for _, f in self.points])
        fs[-1] = 1.0
        u = rng.random(size)
        return ys[np.searchsorted(fs, u, side="right")]

    @property
    def label(self) -> str:
        if len(self.points) == 1:
            return f"point:{self.points[0][0]!r}"
        return "empirical:" + ",".join(f"{y!r}={f!r}" for y, f in self.points)


CdfSpec = Union[StepMajority, Arcsine, Beta, EmpiricalStep]


def cdf_eval(cdf: CdfSpec, y: float) -> float:
    y = float(y)
    if not 0.0 <= y <= 1.0:
        raise InvalidInputError(f"CDF argument y={y} outside [0, 1]")
    return cdf(y)


def parse_cdf(text: str) -> CdfSpec:
    """Parse ``step``, ``arcsine``, ``beta:<a>:<b>``, ``point:<mu>``,
    ``genarcsine:<alpha>`` or ``empirical:<y>=<F>,...``."""
    parts = text.strip().split(":")
    head = parts[0].lower()
    try:
        if head == "step" and len(parts) == 1:
            return StepMajority()
        if head == "arcsine" and len(parts) == 1:
            return Arcsine()
        if head == "beta" and len(parts) == 3:
            return Beta(float(parts[1]), float(parts[2]))
        if head == "genarcsine" and len(parts) == 2:
            return generalized_arcsine(float(parts[1]))
        if head == "point" and len(parts) == 2:
            return EmpiricalStep.point_mass(float(parts[1]))
        if head == "empirical" and len(parts) == 2:
            pts = [tuple(map(float, item.split("="))) for item in parts[1].split(",")]
            return EmpiricalStep(tuple(pts))
    except ValueError as exc:
        if isinstance(exc, InvalidInputError):
            raise
        raise InvalidInputError(f"bad numeric value in CDF spec {text!r}") from None
    raise InvalidInputError(
        f"unknown CDF spec {text!r}; valid forms: step, arcsine, beta:<a>:<b>, "
        "genarcsine:<alpha>, point:<mu>, empirical:<y>=<F>,..."
    )


def as_points(values: Sequence[float]) -> EmpiricalStep:
    """Empirical CDF of a sample (equal weight per value)."""
    xs = np.sort(np.asarray(values, dtype=float))
    if xs.size == 0:
        raise InvalidInputError("empty sample")
    uniq, counts = np.unique(xs, return_counts=True)
    fs = np.cumsum(counts) / xs.size
    return EmpiricalStep(tuple(zip(uniq.tolist(), fs.tolist())))
