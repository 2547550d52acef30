"""Shared parameter types and validation.

Angles are stored as the cone-angle parameter beta (the cone angle itself
is 2*pi*beta). All arithmetic is binary64.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass


class DomainError(ValueError):
    """Input outside the admissible parameter domain."""


class NumericalError(ArithmeticError):
    """A numerical routine failed where the mathematics guarantees success."""


class Family(enum.Enum):
    """Normalization of the Kähler–Einstein edge profile.

    ETA: tau ranges over [1, T], the angle beta1 along the zero section is free.
    XI:  tau ranges over [t, 1], the angle beta2 along the infinity section is free.
    """

    ETA = "eta"
    XI = "xi"

    @classmethod
    def parse(cls, value: "str | Family") -> "Family":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"unknown family {value!r}; expected 'eta' or 'xi'") from None


@dataclass(frozen=True)
class ManifoldParams:
    """The pair (n, k) of the Calabi–Hirzebruch manifold F_{n,k}."""

    n: int
    k: int

    def __post_init__(self):
        if isinstance(self.n, bool) or isinstance(self.k, bool):
            raise DomainError("n and k must be integers")
        if int(self.n) != self.n or int(self.k) != self.k:
            raise DomainError(f"n and k must be integers, got n={self.n}, k={self.k}")
        if self.n < 2:
            raise DomainError(f"n must be >= 2, got {self.n}")
        if self.k < 1:
            raise DomainError(f"k must be >= 1, got {self.k}")

    def angle_bound(self, family: Family) -> float:
        """Upper end of the open interval of the family's free angle."""
        return self.n / self.k if family is Family.ETA else 1.0 / self.k


@dataclass(frozen=True)
class AnglePair:
    beta1: float
    beta2: float
    params: ManifoldParams

    def __post_init__(self):
        check_angle(self.params, Family.ETA, self.beta1)
        check_angle(self.params, Family.XI, self.beta2)


@dataclass(frozen=True)
class AngleHalf:
    """The free angle of a family, validated."""

    family: Family
    beta: float


def check_angle(params: ManifoldParams, family: Family, beta: float) -> float:
    beta = float(beta)
    upper = params.angle_bound(family)
    name = "beta1" if family is Family.ETA else "beta2"
    if not (0.0 < beta < upper):
        raise DomainError(f"{name} must lie in (0, {upper:g}) for n={params.n}, k={params.k}; got {beta!r}")
    return beta


def validate_params(n: int, k: int, family: "Family | str", beta: float) -> tuple[ManifoldParams, AngleHalf]:
    """Validate (n, k) and the family's free angle.

    Eta takes beta1 in (0, n/k); Xi takes beta2 in (0, 1/k). Endpoints are
    rejected.
    """
    params = ManifoldParams(n, k)
    family = Family.parse(family)
    return params, AngleHalf(family, check_angle(params, family, beta))
