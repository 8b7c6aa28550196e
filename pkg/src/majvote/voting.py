"""Exact ensemble accuracy under classical and generalized majority voting.

Members are independent; member ``i`` is correct with probability ``p_i``.
A voting profile gives ``p_{n,k}``, the probability that the ensemble
decides correctly when exactly ``k`` of its ``n`` members are correct, so

    q = sum_k p_{n,k} * P(exactly k members correct).

The count distribution is Poisson-binomial and is built by adding one
member at a time (O(n^2)) instead of summing over all 2^n subsets.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInputError, SizeLimitError

BRUTEFORCE_MAX_N = 20


@dataclass(frozen=True)
class Classifier:
    id: str
    accuracy: float
    time: float

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise InvalidInputError(f"classifier id must be a nonempty string, got {self.id!r}")
        acc = float(self.accuracy)
        t = float(self.time)
        if not 0.0 <= acc <= 1.0:
            raise InvalidInputError(f"classifier {self.id!r}: accuracy {acc} outside [0, 1]")
        if not (t >= 0.0 and math.isfinite(t)):
            raise InvalidInputError(f"classifier {self.id!r}: time {t} must be finite and >= 0")
        object.__setattr__(self, "accuracy", acc)
        object.__setattr__(self, "time", t)


@dataclass(frozen=True)
class ClassifierPool:
    members: tuple[Classifier, ...]

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise InvalidInputError("a classifier pool needs at least one member")
        seen = set()
        for c in members:
            if c.id in seen:
                raise InvalidInputError(f"duplicate classifier id {c.id!r}")
            seen.add(c.id)
        object.__setattr__(self, "members", members)

    @classmethod
    def from_arrays(cls, accuracies, times, ids=None) -> "ClassifierPool":
        if ids is None:
            ids = [f"c{i}" for i in range(len(accuracies))]
        if not len(ids) == len(accuracies) == len(times):
            raise InvalidInputError("ids, accuracies and times must have equal length")
        return cls(tuple(Classifier(i, a, t) for i, a, t in zip(ids, accuracies, times)))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @cached_property
    def index(self) -> dict[str, int]:
        return {c.id: i for i, c in enumerate(self.members)}

    @property
    def ids(self) -> list[str]:
        return [c.id for c in self.members]

    @property
    def accuracies(self) -> np.ndarray:
        return np.array([c.accuracy for c in self.members])

    @property
    def times(self) -> np.ndarray:
        return np.array([c.time for c in self.members])

    def get(self, item_id: str) -> Classifier:
        try:
            return self.members[self.index[item_id]]
        except KeyError:
            raise InvalidInputError(f"unknown classifier id {item_id!r}") from None


@dataclass(frozen=True)
class VotingProfile:
    """Conditional correct-decision probabilities ``p_{n,0}, ..., p_{n,n}``.

    Coefficients must lie in [0, 1] and be nondecreasing in ``k``; pass
    ``check_monotone=False`` to admit a non-monotone sequence (used when
    a computed profile is reported with a warning instead of rejected).
    """

    coefficients: tuple[float, ...]
    check_monotone: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        coef = tuple(float(c) for c in self.coefficients)
        if len(coef) < 2:
            raise InvalidInputError("a voting profile needs n + 1 >= 2 coefficients")
        for k, c in enumerate(coef):
            if not 0.0 <= c <= 1.0:
                raise InvalidInputError(f"profile coefficient p_{{n,{k}}} = {c} outside [0, 1]")
        if self.check_monotone and not self.is_monotone(coef):
            raise InvalidInputError("profile coefficients must be nondecreasing in k")
        object.__setattr__(self, "coefficients", coef)

    @staticmethod
    def is_monotone(coef: Sequence[float]) -> bool:
        return all(a <= b for a, b in zip(coef, coef[1:]))

    @property
    def n(self) -> int:
        return len(self.coefficients) - 1

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coefficients, dtype=float)


@dataclass(frozen=True)
class CountDistribution:
    """``mass[k]`` is the probability that exactly ``k`` members are correct."""

    mass: np.ndarray

    @property
    def n(self) -> int:
        return len(self.mass) - 1

    def tail(self, k: int) -> float:
        return float(self.mass[k:].sum())


def _as_accuracies(pool_accuracies: Iterable[float]) -> np.ndarray:
    ps = np.asarray(list(pool_accuracies), dtype=float)
    if ps.ndim != 1 or ps.size == 0:
        raise InvalidInputError("accuracy sequence must be a nonempty 1-d sequence")
    bad = ~((ps >= 0.0) & (ps <= 1.0))
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise InvalidInputError(f"accuracy at position {i} is {ps[i]}, outside [0, 1]")
    return ps


def extend_mass(mass: np.ndarray, p: float) -> np.ndarray:
    """Count distribution after adding one member with accuracy ``p``."""
    out = np.empty(len(mass) + 1)
    out[:-1] = mass * (1.0 - p)
    out[-1] = 0.0
    out[1:] += mass * p
    return out


def _mass(ps: np.ndarray) -> np.ndarray:
    mass = np.ones(1)
    for p in ps:
        mass = extend_mass(mass, p)
    return mass


def success_count_distribution(pool_accuracies: Iterable[float]) -> CountDistribution:
    return CountDistribution(_mass(_as_accuracies(pool_accuracies)))


def majority_threshold(n: int, half_wins: bool = False) -> int:
    """Smallest winning count of correct votes among ``n``.

    Strict majority (``floor(n/2) + 1``) by default. ``half_wins=True``
    gives ``ceil(n/2)``, where an even split counts as a correct decision.
    The two differ only for even ``n``.
    """
    return (n + 1) // 2 if half_wins else n // 2 + 1


def q_binary(pool_accuracies: Iterable[float], half_wins: bool = False) -> float:
    """Accuracy of classical majority voting over independent members."""
    mass = _mass(_as_accuracies(pool_accuracies))
    return float(mass[majority_threshold(len(mass) - 1, half_wins):].sum())


def q_multi(pool_accuracies: Iterable[float], profile: VotingProfile) -> float:
    ps = _as_accuracies(pool_accuracies)
    if profile.n != len(ps):
        raise InvalidInputError(f"profile is for n={profile.n} members but {len(ps)} accuracies were given")
    return float(np.dot(profile.as_array(), _mass(ps)))


def q_bruteforce_oracle(pool_accuracies: Iterable[float], profile: VotingProfile) -> float:
    """``q_multi`` by explicit enumeration of all 2^n correct/incorrect patterns.

    Only meant as a test oracle.
    """
    ps = [float(p) for p in _as_accuracies(pool_accuracies)]
    n = len(ps)
    if n > BRUTEFORCE_MAX_N:
        raise SizeLimitError(f"brute-force oracle limited to n <= {BRUTEFORCE_MAX_N}, got {n}")
    if profile.n != n:
        raise InvalidInputError(f"profile is for n={profile.n} members but {n} accuracies were given")
    total = 0.0
    for pattern in itertools.product((False, True), repeat=n):
        k = sum(pattern)
        term = math.prod(p if hit else 1.0 - p for p, hit in zip(ps, pattern))
        total += profile.coefficients[k] * term
    return total


def classical_profile(n: int, half_wins: bool = False) -> VotingProfile:
    """0/1 step profile of classical majority voting.

    ``p_{n,k} = 1`` for ``k > floor(n/2)`` and 0 otherwise, so that
    ``q_multi(ps, classical_profile(n)) == q_binary(ps)``. Pass
    ``half_wins=True`` to make an even split a win (matching
    ``q_binary(..., half_wins=True)``).
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidInputError(f"n must be a positive integer, got {n}")
    n = int(n)
    cut = majority_threshold(n, half_wins)
    return VotingProfile(tuple(1.0 if k >= cut else 0.0 for k in range(n + 1)))
