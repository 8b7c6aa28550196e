"""Multiclass tie-break coefficients ``p_{n,k}(d)`` and profile builders.

``p_{n,k}(d)`` is the probability that plurality voting with ``d`` classes
picks the true class when ``k`` of ``n`` voters are correct. The closed
form is

    p_{n,k}(d) = d^{-(n-k)} * sum_{x} b_{n-k,d}(x) / alpha_k(x)

over integer vectors ``x`` of length ``d`` with entries in ``[0, k]`` and
sum ``n - k``, where ``b`` is the multinomial coefficient and
``alpha_k(x) = #{i : x_i = k} + 1``. It is evaluated exactly with
``fractions.Fraction``.

The sum spreads the ``n - k`` residual votes uniformly over ``d`` classes
none of which is the true class, so it coincides with the
``RESIDUAL_OVER_WRONG_CLASSES`` simulation run with ``d + 1`` classes, and
with neither simulation model at ``d`` itself.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import numpy as np

from .cdf import CdfSpec
from .errors import InvalidInputError, SizeLimitError
from .montecarlo import MCEstimate, check_seed, chunks, run_split
from .voting import VotingProfile

PNK_MAX_N = 30
PNK_MAX_D = 8
DEFAULT_MAX_COMPOSITIONS = 10**7


class ProfileMonotonicityWarning(UserWarning):
    pass


class GenerativeModel(enum.Enum):
    """Where the ``n - k`` incorrect votes go in simulation."""

    RESIDUAL_OVER_ALL_CLASSES = "all"
    RESIDUAL_OVER_WRONG_CLASSES = "wrong"

    @classmethod
    def parse(cls, value) -> "GenerativeModel":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidInputError(f"unknown generative model {value!r}; use 'wrong' or 'all'") from None


@dataclass(frozen=True)
class PnkRequest:
    n: int
    k: int
    d: int

    def __post_init__(self):
        for name in ("n", "k", "d"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v:
                raise InvalidInputError(f"{name} must be an integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.n < 1:
            raise InvalidInputError(f"n must be >= 1, got {self.n}")
        if self.d < 2:
            raise InvalidInputError(f"d must be >= 2, got {self.d}")
        if not 0 <= self.k <= self.n:
            raise InvalidInputError(f"k must lie in [0, {self.n}], got {self.k}")


@dataclass(frozen=True)
class PnkValue:
    exact: Fraction
    value: float


def enumerate_compositions(total: int, parts: int, cap_per_part: int) -> Iterator[tuple[int, ...]]:
    """Yield every length-``parts`` vector with entries in ``[0, cap]`` summing to ``total``.

    Order is lexicographic, largest first coordinate first.
    """
    if total < 0 or parts < 1 or cap_per_part < 0:
        return
    if total > parts * cap_per_part:
        return
    vec = [0] * parts
    last = parts - 1

    def fill(i: int, remaining: int):
        if i == last:
            vec[i] = remaining
            yield tuple(vec)
            return
        hi = min(cap_per_part, remaining)
        lo = max(0, remaining - (last - i) * cap_per_part)
        for v in range(hi, lo - 1, -1):
            vec[i] = v
            yield from fill(i + 1, remaining - v)

    yield from fill(0, total)


def count_compositions(total: int, parts: int, cap_per_part: int) -> int:
    """Size of :func:`enumerate_compositions` by inclusion-exclusion."""
    if total < 0 or parts < 1 or cap_per_part < 0:
        return 0
    step = cap_per_part + 1
    count = 0
    for j in range(parts + 1):
        rest = total - j * step
        if rest < 0:
            break
        count += (-1) ** j * math.comb(parts, j) * math.comb(rest + parts - 1, parts - 1)
    return count


def _check_limits(req: PnkRequest):
    if req.n > PNK_MAX_N:
        raise SizeLimitError(f"closed form limited to n <= {PNK_MAX_N}, got {req.n}")
    if req.d > PNK_MAX_D:
        raise SizeLimitError(f"closed form limited to d <= {PNK_MAX_D}, got {req.d}")


def pnk_closed_form(n: int, k: int, d: int, max_compositions: int = DEFAULT_MAX_COMPOSITIONS) -> PnkValue:
    req = PnkRequest(n, k, d)
    _check_limits(req)
    r = req.n - req.k
    size = count_compositions(r, req.d, req.k)
    if size > max_compositions:
        raise SizeLimitError(
            f"p_{{{req.n},{req.k}}}({req.d}) needs {size} compositions, cap is {max_compositions}"
        )
    fact = [math.factorial(i) for i in range(r + 1)]
    # Integer sums of multinomial coefficients, keyed by the tie count alpha.
    by_alpha = [0] * (req.d + 2)
    for x in enumerate_compositions(r, req.d, req.k):
        denom = 1
        ties = 0
        for xi in x:
            denom *= fact[xi]
            if xi == req.k:
                ties += 1
        by_alpha[ties + 1] += fact[r] // denom
    total = sum((Fraction(s, a) for a, s in enumerate(by_alpha) if s), Fraction(0))
    exact = total / req.d**r
    return PnkValue(exact, float(exact))


def _simulate_cell(n: int, k: int, d: int, model: GenerativeModel):
    r = n - k
    classes = np.arange(d)

    def work(rng: np.random.Generator, share: int) -> int:
        wins = 0
        for size in chunks(share):
            if model is GenerativeModel.RESIDUAL_OVER_WRONG_CLASSES:
                labels = rng.integers(1, d, size=(size, r), dtype=np.int8)
            else:
                labels = rng.integers(0, d, size=(size, r), dtype=np.int8)
            counts = (labels[:, :, None] == classes).sum(axis=1)
            counts[:, 0] += k
            wins += int(plurality_wins(counts, rng).sum())
        return wins

    return work


def plurality_wins(counts: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Column 0 is the true class; ties at the top are broken uniformly."""
    top = counts.max(axis=1)
    at_top = (counts == top[:, None]).sum(axis=1)
    u = rng.random(len(counts))
    return (counts[:, 0] == top) & (u * at_top < 1.0)


def pnk_monte_carlo(
    n: int,
    k: int,
    d: int,
    model,
    trials: int,
    seed: int,
    workers: int = 1,
) -> MCEstimate:
    """Estimate ``p_{n,k}(d)`` by simulating the residual ``n - k`` votes."""
    req = PnkRequest(n, k, d)
    model = GenerativeModel.parse(model)
    if int(trials) != trials or trials < 1:
        raise InvalidInputError(f"trials must be a positive integer, got {trials!r}")
    seed = check_seed(seed)
    wins = run_split(_simulate_cell(req.n, req.k, req.d, model), seed, int(trials), workers)
    return MCEstimate.from_counts(sum(wins), int(trials))


def profile_from_cdf(n: int, cdf: CdfSpec) -> VotingProfile:
    """Profile with ``p_{n,k} = F(k/n)``."""
    if int(n) != n or n < 1:
        raise InvalidInputError(f"n must be a positive integer, got {n}")
    n = int(n)
    return VotingProfile(tuple(cdf(k / n) for k in range(n + 1)))


@lru_cache(maxsize=256)
def _pnk_row(n: int, d: int) -> tuple[float, ...]:
    return tuple(pnk_closed_form(n, k, d).value for k in range(n + 1))


def profile_from_pnk(n: int, d: int) -> VotingProfile:
    coef = _pnk_row(int(n), int(d))
    if not VotingProfile.is_monotone(coef):
        warnings.warn(
            f"p_{{{n},k}}({d}) is not nondecreasing in k: {coef}",
            ProfileMonotonicityWarning,
            stacklevel=2,
        )
        return VotingProfile(coef, check_monotone=False)
    return VotingProfile(coef)
