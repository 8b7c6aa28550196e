"""Profile sources used to score an ensemble of a given size."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .cdf import CdfSpec, parse_cdf
from .errors import InvalidInputError
from .pnk import PNK_MAX_D, PNK_MAX_N, profile_from_cdf, profile_from_pnk
from .voting import VotingProfile, classical_profile


@dataclass(frozen=True)
class Classical:
    half_wins: bool = False
    max_size = None

    def profile(self, n: int) -> VotingProfile:
        return classical_profile(n, self.half_wins)

    @property
    def label(self) -> str:
        return "classical:halfwins" if self.half_wins else "classical"


@dataclass(frozen=True)
class CdfScheme:
    cdf: CdfSpec
    max_size = None

    def profile(self, n: int) -> VotingProfile:
        return profile_from_cdf(n, self.cdf)

    @property
    def label(self) -> str:
        return f"cdf:{self.cdf.label}"


@dataclass(frozen=True)
class PnkScheme:
    d: int
    max_size = PNK_MAX_N

    def __post_init__(self):
        if isinstance(self.d, bool) or int(self.d) != self.d or not 2 <= self.d <= PNK_MAX_D:
            raise InvalidInputError(f"pnk scheme needs an integer 2 <= d <= {PNK_MAX_D}, got {self.d!r}")
        object.__setattr__(self, "d", int(self.d))

    def profile(self, n: int) -> VotingProfile:
        return profile_from_pnk(n, self.d)

    @property
    def label(self) -> str:
        return f"pnk:{self.d}"


Scheme = Union[Classical, CdfScheme, PnkScheme]

_FORMS = '"classical" | "classical:halfwins" | "cdf:arcsine" | "cdf:beta:<a>:<b>" | "cdf:step" | "pnk:<d>"'


def parse_scheme(text: str) -> Scheme:
    """Parse the one-line scheme grammar.

    >>> parse_scheme("pnk:3")
    PnkScheme(d=3)
    """
    t = text.strip()
    low = t.lower()
    if low == "classical":
        return Classical()
    if low == "classical:halfwins":
        return Classical(half_wins=True)
    if low.startswith("cdf:"):
        return CdfScheme(parse_cdf(t[4:]))
    if low.startswith("pnk:"):
        try:
            d = int(t[4:])
        except ValueError:
            raise InvalidInputError(f"bad class count in scheme {text!r}; valid forms: {_FORMS}") from None
        return PnkScheme(d)
    raise InvalidInputError(f"unknown scheme {text!r}; valid forms: {_FORMS}")
