"""Eguchi-Hanson metric in potential, complex and real-frame forms.

With r^4 = xi^4 - eps^4 the metric reads

    g = r^2/S (dr^2 + r^2 sigma3^2) + S (sigma1^2 + sigma2^2),   S = sqrt(r^4 + eps^4),

and in complex coordinates with r^2 = |z1|^2 + |z2|^2 its Kähler matrix has
determinant exactly 1, which certifies Ricci-flatness.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import DomainError
from .geometry import MetricSample

__all__ = [
    "EhParams",
    "EhRealFrame",
    "EhMatch",
    "eh_potential",
    "eh_metric",
    "eh_real_frame",
    "eh_xi_frame",
    "eh_match_limit_n2k2",
]


@dataclass(frozen=True)
class EhParams:
    epsilon: float

    def __post_init__(self):
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise DomainError(f"epsilon must be positive, got {self.epsilon!r}")


@dataclass(frozen=True)
class EhRealFrame:
    r: float
    coeff_dr2: float
    coeff_sigma1: float
    coeff_sigma2: float
    coeff_sigma3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.coeff_dr2, self.coeff_sigma1, self.coeff_sigma2, self.coeff_sigma3])


def eh_potential(eps: float, r: float) -> float:
    """Kähler potential S + eps^2 log r^2 - eps^2 log(eps^2 + S).

    The eps^2 weights make i dd-bar of this function equal the Kähler form
    for every eps; at eps = 1 they are invisible.
    """
    e2 = EhParams(eps).epsilon ** 2
    if not r > 0:
        raise DomainError("eh_potential needs r > 0")
    S = math.hypot(r * r, e2)
    return S + e2 * (2.0 * math.log(r) - math.log(e2 + S))


def eh_metric(eps: float, z1: complex, z2: complex) -> MetricSample:
    """Hermitian matrix g_ab = (r^2/S) delta_ab + (eps^4/S)(delta_ab r^2 - conj(z_a) z_b)/r^4."""
    e4 = EhParams(eps).epsilon ** 4
    z = np.array([complex(z1), complex(z2)])
    rho = float(np.vdot(z, z).real)
    if rho == 0.0:
        raise DomainError("eh_metric is not defined at the origin")
    S = math.hypot(rho, math.sqrt(e4))
    # delta_ab r^2 - conj(z_a) z_b, with the diagonal taken as |z_other|^2 to avoid cancellation
    m = -np.outer(z.conj(), z)
    m[0, 0], m[1, 1] = abs(z[1]) ** 2, abs(z[0]) ** 2
    g = (rho / S) * np.eye(2) + (e4 / S) * m / rho**2
    return MetricSample(z, complex(z2), g)


def eh_real_frame(eps: float, r: float) -> EhRealFrame:
    """Coefficients of dr^2, sigma1^2, sigma2^2, sigma3^2."""
    e2 = EhParams(eps).epsilon ** 2
    r = float(r)
    if r < 0:
        raise DomainError("r must be nonnegative")
    S = math.hypot(r * r, e2)
    return EhRealFrame(r, r * r / S, S, S, r**4 / S)


def eh_xi_frame(eps: float, r: float) -> EhRealFrame:
    """Same coefficients obtained from the xi-form, xi^4 = r^4 + eps^4, by the chain rule in r."""
    eps = EhParams(eps).epsilon
    r = float(r)
    if not r > 0:
        raise DomainError("xi-form comparison needs r > 0")
    xi = (r**4 + eps**4) ** 0.25
    f = 1.0 - (eps / xi) ** 4
    dxi_dr = r**3 / xi**3
    return EhRealFrame(r, dxi_dr**2 / f, xi * xi, xi * xi, xi * xi * f)


class EhMatch(NamedTuple):
    tau_infinity: float
    scale: float
    eps_equiv: float
    limit_frame: EhRealFrame
    max_coeff_dev: float


def eh_match_limit_n2k2(C: float, r: float) -> EhMatch:
    """Compare the n = k = 2 limit metric with scale * g_EH at eps = C^(1/4).

    The limit frame is built from tau = C^(-1/2)(C + r^4)^(1/2),
    phi = (tau^2 - 1)/(2 tau) and the dictionary
    g = 2 tau (sigma1^2 + sigma2^2) + (4 phi / r^2)(dr^2 + r^2 sigma3^2).
    """
    C = float(C)
    if not (math.isfinite(C) and C > 0):
        raise DomainError(f"C must be positive, got {C!r}")
    r = float(r)
    if r < 0:
        raise DomainError("r must be nonnegative")
    scale = 2.0 / math.sqrt(C)
    eps = C**0.25
    tau_m1 = math.expm1(0.5 * math.log1p(r**4 / C))
    tau = 1.0 + tau_m1
    phi = tau_m1 * (tau + 1.0) / (2.0 * tau)
    dr2 = 4.0 * phi / (r * r) if r > 0 else 0.0
    limit = EhRealFrame(r, dr2, 2.0 * tau, 2.0 * tau, 4.0 * phi)
    ref = scale * eh_real_frame(eps, r).as_array()
    dev = float(np.max(np.abs(limit.as_array() - ref) / np.maximum(1.0, np.abs(ref))))
    return EhMatch(tau, scale, eps, limit, dev)
