"""Momentum profiles phi(tau) of the two Kähler–Einstein edge families.

Both families share one closed form

    phi(tau) = (1/k)(tau^n - 1)/tau^(n-1) + c (tau^(n+1) - 1)/tau^(n-1)

with c = (beta1 - n/k)/(n+1) for Eta and c = -(n/k + beta2)/(n+1) for Xi.
Writing phi = (tau - 1) Q(tau) / ((n+1) tau^(n-1)) gives

    Q(tau) = -a tau^n + b (tau^(n-1) + ... + 1),

Eta: a = n/k - beta1, b = 1/k + beta1;  Xi: a = n/k + beta2, b = 1/k - beta2.

Q(tau)/tau^n is strictly decreasing on tau > 0, so Q has exactly one positive
root: T > 1 for Eta, t in (0, 1) for Xi.

Internally Q is expanded about a centre c in {0, 1}: about 1 when the solved
root is close to 1 (small angles, where T - 1 and 1 - t must keep full
relative precision), about 0 otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial import polynomial as npoly

from .core import DomainError, Family, ManifoldParams, NumericalError, check_angle

__all__ = [
    "EtaProfile",
    "XiProfile",
    "BoundaryReport",
    "phi_eta",
    "phi_xi",
    "dphi_eta",
    "dphi_xi",
    "solve_T",
    "solve_t",
    "solve",
    "kee_residual",
    "boundary_check",
    "closed_form_n2k1",
    "closed_form_n2k1_xi",
    "closed_form_n2k2_beta2",
]


def _sign(family: Family) -> int:
    return 1 if family is Family.ETA else -1


def _q_coeffs(n: int, k: int, family: Family, beta: float, center: int) -> np.ndarray:
    """Ascending coefficients of Q in v = tau - center."""
    s = _sign(family)
    if center == 0:
        a = n / k - s * beta
        b = 1.0 / k + s * beta
        return np.array([b] * n + [-a], dtype=float)
    # binomial expansion about tau = 1, cancellations done by hand
    return np.array(
        [(math.comb(n, j + 1) - n * math.comb(n, j)) / k + s * beta * math.comb(n + 1, j + 1) for j in range(n + 1)],
        dtype=float,
    )


def _phi(n: int, k: int, family: Family, beta: float, tau):
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(tau_arr <= 0):
        raise DomainError("tau must be positive")
    near = np.abs(tau_arr - 1.0) < 0.5
    q1 = npoly.polyval(tau_arr - 1.0, _q_coeffs(n, k, family, beta, 1))
    q0 = npoly.polyval(tau_arr, _q_coeffs(n, k, family, beta, 0))
    q = np.where(near, q1, q0)
    out = (tau_arr - 1.0) * q / ((n + 1) * tau_arr ** (n - 1))
    return float(out) if np.ndim(out) == 0 else out


def _dphi(n: int, k: int, family: Family, beta: float, tau):
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(tau_arr <= 0):
        raise DomainError("tau must be positive")
    s = _sign(family)
    c = (s * beta - n / k) / (n + 1)
    b = 1.0 / k + s * beta
    # (1/k + c) = b/(n+1) collapses the two tau^-n terms
    out = 1.0 / k + 2.0 * c * tau_arr + (n - 1) * b / (n + 1) * tau_arr ** (-n)
    return float(out) if np.ndim(out) == 0 else out


def phi_eta(params: ManifoldParams, beta1: float, tau):
    """Eta-family profile (1/k)(τⁿ−1)/τⁿ⁻¹ + (β₁ − n/k)(τⁿ⁺¹−1)/((n+1)τⁿ⁻¹)."""
    return _phi(params.n, params.k, Family.ETA, beta1, tau)


def phi_xi(params: ManifoldParams, beta2: float, tau):
    """Xi-family profile (1/k)(τⁿ−1)/τⁿ⁻¹ − (n/k + β₂)(τⁿ⁺¹−1)/((n+1)τⁿ⁻¹)."""
    return _phi(params.n, params.k, Family.XI, beta2, tau)


def dphi_eta(params: ManifoldParams, beta1: float, tau):
    return _dphi(params.n, params.k, Family.ETA, beta1, tau)


def dphi_xi(params: ManifoldParams, beta2: float, tau):
    return _dphi(params.n, params.k, Family.XI, beta2, tau)


def _deflate(coeffs: np.ndarray, root: float) -> np.ndarray:
    """Divide out (v - root); backward recursion when the root is large."""
    m = len(coeffs) - 1
    out = np.empty(m)
    if abs(root) <= 1.0:
        out[m - 1] = coeffs[m]
        for j in range(m - 1, 0, -1):
            out[j - 1] = coeffs[j] + root * out[j]
    else:
        out[0] = -coeffs[0] / root
        for j in range(1, m):
            out[j] = (out[j - 1] - coeffs[j]) / root
    return out


def _g(n, k, family, beta, tau):
    # Q(tau)/tau^n, strictly decreasing for tau > 0
    s = _sign(family)
    a = n / k - s * beta
    b = 1.0 / k + s * beta
    return -a + b * sum(tau ** (j - n) for j in range(n))


def _bisect(f, lo, hi, geometric=False, rtol=1e-15, maxiter=400):
    flo = f(lo)
    for _ in range(maxiter):
        mid = math.sqrt(lo * hi) if geometric else 0.5 * (lo + hi)
        if not (lo < mid < hi) or (hi - lo) <= rtol * hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _solve_root(params: ManifoldParams, family: Family, beta: float) -> tuple[float, float, int]:
    """Return (root, root - 1, centre) for the family's positive root of Q."""
    n, k = params.n, params.k
    f = lambda x: _g(n, k, family, beta, x)  # noqa: E731
    if family is Family.ETA:
        hi = 2.0
        while f(hi) > 0:
            hi *= 2.0
            if hi > 1e300:
                raise NumericalError(f"no sign change bracketing T for beta1={beta}")
        root = _bisect(f, 1.0, hi)
    else:
        lo = 0.5
        while f(lo) < 0:
            lo *= 0.5
            if lo < 1e-300:
                raise NumericalError(f"no sign change bracketing t for beta2={beta}")
        root = _bisect(f, lo, 1.0, geometric=True)
    if not np.isfinite(root):
        raise NumericalError("root bisection produced a non-finite value")

    center = 1 if abs(root - 1.0) < 0.5 else 0
    coeffs = _q_coeffs(n, k, family, beta, center)
    dcoeffs = npoly.polyder(coeffs)
    v = root - center
    for _ in range(2):
        dv = npoly.polyval(v, coeffs) / npoly.polyval(v, dcoeffs)
        if np.isfinite(dv):
            v -= dv
    root = v + center
    gap = v if center == 1 else root - 1.0
    if family is Family.ETA and not root > 1.0 or family is Family.XI and not 0.0 < root < 1.0:
        raise NumericalError(f"root {root!r} outside the admissible range for {family.value}")
    return root, gap, center


@dataclass(frozen=True)
class BoundaryReport:
    phi_left: float
    phi_right: float
    dphi_left: float
    dphi_right: float

    def max(self) -> float:
        return max(self.phi_left, self.phi_right, self.dphi_left, self.dphi_right)

    def as_tuple(self):
        return (self.phi_left, self.phi_right, self.dphi_left, self.dphi_right)


@dataclass(frozen=True)
class _Profile:
    params: ManifoldParams
    beta1: float
    beta2: float
    root: float
    gap: float  # root - 1, kept separately for precision
    ricci: float
    center: int = field(repr=False)

    family = Family.ETA

    @property
    def free_beta(self) -> float:
        return self.beta1 if self.family is Family.ETA else self.beta2

    @property
    def left(self) -> float:
        return 1.0 if self.family is Family.ETA else self.root

    @property
    def right(self) -> float:
        return self.root if self.family is Family.ETA else 1.0

    @property
    def length(self) -> float:
        """Width right - left of the tau-interval."""
        return abs(self.gap)

    @cached_property
    def _r_coeffs(self) -> np.ndarray:
        n, k = self.params.n, self.params.k
        q = _q_coeffs(n, k, self.family, self.free_beta, self.center)
        return _deflate(q, self.root - self.center)

    @cached_property
    def extra_roots(self) -> np.ndarray:
        """The n - 1 roots of Q other than the solved one (companion eigenvalues)."""
        if self.params.n == 1:
            return np.array([], dtype=complex)
        roots = np.roots(self._r_coeffs[::-1]).astype(complex) + self.center
        return np.sort_complex(roots)

    def all_roots(self) -> np.ndarray:
        return np.concatenate([[complex(self.root)], self.extra_roots])

    def real_roots_beyond(self, tol: float = 1e-9) -> list[float]:
        """Real extra roots beyond the solved root (diagnostic; expected empty)."""
        out = []
        for r in self.extra_roots:
            if abs(r.imag) <= tol * max(1.0, abs(r)):
                if (self.family is Family.ETA and r.real > self.root) or (
                    self.family is Family.XI and 0 < r.real < self.root
                ):
                    out.append(float(r.real))
        return out

    def phi(self, tau):
        return _phi(self.params.n, self.params.k, self.family, self.free_beta, tau)

    def dphi(self, tau):
        return _dphi(self.params.n, self.params.k, self.family, self.free_beta, tau)

    def psi(self, tau):
        """phi / ((tau - left)(right - tau)); smooth and positive on [left, right]."""
        tau = np.asarray(tau, dtype=float)
        n = self.params.n
        out = -npoly.polyval(tau - self.center, self._r_coeffs) / ((n + 1) * tau ** (n - 1))
        return float(out) if out.ndim == 0 else out

    def phi_from_gaps(self, tau, lo_gap, hi_gap):
        """phi evaluated from precomputed distances to both endpoints."""
        return np.asarray(lo_gap) * np.asarray(hi_gap) * self.psi(tau)

    def boundary_slopes(self) -> tuple[float, float]:
        """(dphi/dtau at left, -dphi/dtau at right) = (beta1, beta2)."""
        return self.beta1, self.beta2


@dataclass(frozen=True)
class EtaProfile(_Profile):
    """Profile on [1, T] parametrized by beta1; Ricci constant n/k - beta1."""

    family = Family.ETA

    @property
    def T(self) -> float:
        return self.root

    @property
    def lam(self) -> float:
        return self.ricci


@dataclass(frozen=True)
class XiProfile(_Profile):
    """Profile on [t, 1] parametrized by beta2; Ricci constant n/k + beta2."""

    family = Family.XI

    @property
    def t(self) -> float:
        return self.root

    @property
    def mu(self) -> float:
        return self.ricci


def solve_T(params: ManifoldParams, beta1: float) -> EtaProfile:
    """Solve the Eta family: T is the root of Q beyond 1, beta2 from
    (1/k - beta2) T^n = beta1 + 1/k."""
    beta1 = check_angle(params, Family.ETA, beta1)
    n, k = params.n, params.k
    T, gap, center = _solve_root(params, Family.ETA, beta1)
    tn_m1 = math.expm1(n * math.log1p(gap))
    beta2 = (tn_m1 / k - beta1) / (tn_m1 + 1.0)
    return EtaProfile(params, beta1, beta2, T, gap, n / k - beta1, center)


def solve_t(params: ManifoldParams, beta2: float) -> XiProfile:
    """Solve the Xi family: t is the root of Q in (0, 1), beta1 from
    (1/k + beta1) t^n = 1/k - beta2."""
    beta2 = check_angle(params, Family.XI, beta2)
    n, k = params.n, params.k
    t, gap, center = _solve_root(params, Family.XI, beta2)
    if center == 1:
        one_minus_tn = -math.expm1(n * math.log1p(gap))
        beta1 = (one_minus_tn / k - beta2) / (1.0 - one_minus_tn)
    else:
        beta1 = (1.0 / k - beta2) / t**n - 1.0 / k
    return XiProfile(params, beta1, beta2, t, gap, n / k + beta2, center)


def solve(params: ManifoldParams, family: "Family | str", beta: float):
    family = Family.parse(family)
    return solve_T(params, beta) if family is Family.ETA else solve_t(params, beta)


def kee_residual(params: ManifoldParams, ricci: float, tau, phi, dphi):
    """First-order Einstein ODE residual n - k(n-1)phi/tau - k phi' - ricci k tau."""
    n, k = params.n, params.k
    tau = np.asarray(tau, dtype=float)
    if np.any(tau <= 0):
        raise DomainError("tau must be positive")
    out = n - k * (n - 1) * np.asarray(phi) / tau - k * np.asarray(dphi) - ricci * k * tau
    return float(out) if np.ndim(out) == 0 else out


def boundary_check(profile: _Profile) -> BoundaryReport:
    """Deviations of phi and phi' from the edge boundary conditions at both ends."""
    left, right = profile.left, profile.right
    return BoundaryReport(
        abs(profile.phi(left)),
        abs(profile.phi(right)),
        abs(profile.dphi(left) - profile.beta1),
        abs(profile.dphi(right) + profile.beta2),
    )


def _n2k1_root(beta1: float) -> float:
    return math.sqrt(1.0 + 2.0 * beta1 / 3.0 - beta1 * beta1 / 3.0)


def closed_form_n2k1(beta1: float) -> tuple[float, float, float]:
    """(T, alpha1, beta2) for n=2, k=1 in closed form."""
    beta1 = float(beta1)
    if not 0.0 < beta1 < 2.0:
        raise DomainError(f"beta1 must lie in (0, 2), got {beta1!r}")
    sq = _n2k1_root(beta1)
    T = 1.0 + 3.0 * (sq + beta1 - 1.0) / (4.0 - 2.0 * beta1)
    alpha1 = 1.0 + 3.0 * (-sq + beta1 - 1.0) / (4.0 - 2.0 * beta1)
    beta2 = (beta1 - 3.0 + 3.0 * sq) / 2.0
    return T, alpha1, beta2


def closed_form_n2k1_xi(beta2: float) -> tuple[float, float]:
    """(t, beta1) for n=2, k=1 in closed form as functions of beta2."""
    beta2 = float(beta2)
    if not 0.0 < beta2 < 1.0:
        raise DomainError(f"beta2 must lie in (0, 1), got {beta2!r}")
    sq = math.sqrt((1.0 - beta2) * (3.0 * beta2 + 9.0))
    t = (1.0 - beta2 + sq) / (2.0 * (2.0 + beta2))
    beta1 = 1.5 + 0.5 * beta2 - 0.5 * sq
    return t, beta1


def closed_form_n2k2_beta2(beta1: float) -> float:
    """beta2 as a function of beta1 for n=k=2."""
    beta1 = float(beta1)
    if not 0.0 < beta1 < 1.0:
        raise DomainError(f"beta1 must lie in (0, 1), got {beta1!r}")
    return (2.0 * beta1 - 3.0 + math.sqrt(9.0 + 12.0 * beta1 - 12.0 * beta1 * beta1)) / 4.0
