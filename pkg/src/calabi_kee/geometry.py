"""Curves s <-> tau, fiber length, chart metrics and Einstein residuals.

The profile ODE ds/dtau = 1/phi is singular at both ends of the tau-interval
[l, r]. We integrate it in the logistic coordinate u defined by

    tau - l = L * expit(2u),    r - tau = L * expit(-2u),    L = r - l,

in which ds/du = 2 / (L * psi(tau)) with psi = phi / ((tau - l)(r - tau)).
psi is a positive polynomial ratio on [l, r], so ds/du is smooth in u and
tends to 2/beta1 and 2/beta2 at the two ends. The log-tails of s(tau) become
linear tails of s(u).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.special import expit

from .core import DomainError, Family, ManifoldParams, NumericalError, check_angle

__all__ = [
    "ProfileCurve",
    "MetricSample",
    "RescaledY",
    "integrate_curve",
    "default_anchor",
    "tau_of_s",
    "fiber_length",
    "fiber_volume",
    "evaluate_metric",
    "einstein_residual",
    "rescaled_x",
    "rescaled_u",
    "phi_pred_x",
    "rescaled_y",
    "rescaled_fiber_length",
]

_GL_PANEL = np.polynomial.legendre.leggauss(8)
# distance of the outermost node from an endpoint, relative to min(L, 1)
_EDGE = 1e-12
_DU = 0.05


def _gl_integral(f, a, b):
    x, w = _GL_PANEL
    half = 0.5 * (b - a)
    return half * np.sum(w * f(0.5 * (a + b) + half * x))


def default_anchor(profile) -> float:
    """2^(1/n) for Eta and 1/2 for Xi, or the interval midpoint if outside."""
    n = profile.params.n
    a = 2.0 ** (1.0 / n) if profile.family is Family.ETA else 0.5
    if profile.left < a < profile.right:
        return a
    return 0.5 * (profile.left + profile.right)


@dataclass(frozen=True, eq=False)
class ProfileCurve:
    """A solved profile together with its monotone curve tau(s).

    The sampled arrays cover [s_min, s_max]; the curve itself is defined for
    every real s through ``tau_phi``.
    """

    family: Family
    s_grid: np.ndarray
    tau_values: np.ndarray
    phi_values: np.ndarray
    anchor_tau: float
    tail_coeffs: tuple[float, float]
    profile: object = field(repr=False)
    _u: np.ndarray = field(repr=False)
    _s: np.ndarray = field(repr=False)
    _dsdu: np.ndarray = field(repr=False)
    _inv: CubicHermiteSpline = field(repr=False)

    @property
    def params(self) -> ManifoldParams:
        return self.profile.params

    def _gaps(self, u):
        L = self.profile.length
        return L * expit(2.0 * u), L * expit(-2.0 * u)

    def _tau(self, u, lo, hi):
        p = self.profile
        return np.where(lo <= hi, p.left + lo, p.right - hi)

    def _dsdu_at(self, u):
        lo, hi = self._gaps(u)
        return 2.0 / (self.profile.length * self.profile.psi(self._tau(u, lo, hi)))

    def u_of_s(self, s: float) -> float:
        s = float(s)
        u, sn = self._u, self._s
        if s <= sn[0]:
            return u[0] + (s - sn[0]) * 0.5 / self.tail_coeffs[0]
        if s >= sn[-1]:
            return u[-1] + (s - sn[-1]) * 0.5 / self.tail_coeffs[1]
        x = float(self._inv(s))
        j = int(np.clip(np.searchsorted(sn, s) - 1, 0, len(sn) - 2))
        # Newton polish against the exact panel integral from node j
        for _ in range(2):
            resid = sn[j] + _gl_integral(self._dsdu_at, u[j], x) - s
            x -= resid / float(self._dsdu_at(np.array(x)))
        return x

    def tau_phi(self, s: float) -> tuple[float, float]:
        u = self.u_of_s(s)
        lo, hi = self._gaps(u)
        tau = float(self._tau(u, lo, hi))
        phi = float(self.profile.phi_from_gaps(tau, lo, hi))
        return tau, phi


def integrate_curve(profile, anchor_tau: float | None = None, s_min: float = -5.0, s_max: float = 5.0,
                    samples: int = 201) -> ProfileCurve:
    """Solve ds/dtau = 1/phi with s(anchor_tau) = 0 and sample it on [s_min, s_max]."""
    if samples < 16:
        raise DomainError("samples must be >= 16")
    if not s_min < s_max:
        raise DomainError("need s_min < s_max")
    if anchor_tau is None:
        anchor_tau = default_anchor(profile)
    anchor_tau = float(anchor_tau)
    left, right, L = profile.left, profile.right, profile.length
    if not left < anchor_tau < right:
        raise DomainError(f"anchor_tau={anchor_tau!r} outside ({left!r}, {right!r})")

    p = (anchor_tau - left) / L
    u_a = 0.5 * math.log(p / (1.0 - p))
    # outermost u with distance to the endpoint about _EDGE * min(L, 1)
    u_edge = 0.5 * math.log(_EDGE * min(L, 1.0) / L)
    j_lo = int(math.ceil((u_a - u_edge) / _DU))
    j_hi = int(math.ceil((-u_edge - u_a) / _DU))
    u = u_a + _DU * np.arange(-j_lo, j_hi + 1)

    def dsdu(uu):
        lo, hi = L * expit(2.0 * uu), L * expit(-2.0 * uu)
        tau = np.where(lo <= hi, left + lo, right - hi)
        return 2.0 / (L * profile.psi(tau))

    x, w = _GL_PANEL
    mids = 0.5 * (u[:-1] + u[1:])
    nodes = mids[:, None] + 0.5 * _DU * x[None, :]
    panels = 0.5 * _DU * (dsdu(nodes) @ w)
    s = np.concatenate([[0.0], np.cumsum(panels)])
    s -= s[j_lo]
    f = dsdu(u)
    if not (np.all(np.isfinite(s)) and np.all(np.diff(s) > 0)):
        raise NumericalError("curve integration lost monotonicity")
    inv = CubicHermiteSpline(s, u, 1.0 / f)

    curve = ProfileCurve(
        family=profile.family,
        s_grid=np.empty(0),
        tau_values=np.empty(0),
        phi_values=np.empty(0),
        anchor_tau=anchor_tau,
        tail_coeffs=(1.0 / profile.beta1, 1.0 / profile.beta2),
        profile=profile,
        _u=u,
        _s=s,
        _dsdu=f,
        _inv=inv,
    )
    grid = np.linspace(s_min, s_max, samples)
    vals = np.array([curve.tau_phi(si) for si in grid])
    object.__setattr__(curve, "s_grid", grid)
    object.__setattr__(curve, "tau_values", vals[:, 0].copy())
    object.__setattr__(curve, "phi_values", vals[:, 1].copy())
    return curve


def tau_of_s(curve, s: float) -> tuple[float, float]:
    """(tau(s), phi(tau(s))) on a curve; beyond the integrated range the linear u-tails apply."""
    return curve.tau_phi(s)


def fiber_length(profile, rtol: float = 1e-8, max_points: int = 1 << 15) -> float:
    """Radial fiber length: integral of dtau / sqrt(2 phi) over the tau-interval."""
    left, right = profile.left, profile.right
    half = 0.5 * profile.length
    root = math.sqrt(half)

    def integrand_left(v):
        tau = left + v * v
        return 2.0 / np.sqrt(2.0 * (right - tau) * profile.psi(tau))

    def integrand_right(v):
        tau = right - v * v
        return 2.0 / np.sqrt(2.0 * (tau - left) * profile.psi(tau))

    def quad(npts):
        x, w = np.polynomial.legendre.leggauss(npts)
        v = 0.5 * root * (x + 1.0)
        return 0.5 * root * (w @ integrand_left(v) + w @ integrand_right(v))

    npts = 64
    prev = quad(npts)
    while npts < max_points:
        npts *= 2
        cur = quad(npts)
        if abs(cur - prev) <= rtol * abs(cur):
            return float(cur)
        prev = cur
    raise NumericalError(f"fiber length quadrature did not reach rtol={rtol}")


def fiber_volume(profile) -> float:
    return 2.0 * math.pi * profile.length


@dataclass(frozen=True)
class MetricSample:
    z: np.ndarray
    w: complex
    matrix: np.ndarray

    def is_hermitian(self, tol: float = 1e-14) -> bool:
        m = self.matrix
        return bool(np.max(np.abs(m - m.conj().T)) <= tol * max(1.0, np.max(np.abs(m))))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def _chart_s(k: int, family: Family, z: np.ndarray, w: complex) -> float:
    sign = 1.0 if family is Family.ETA else -1.0
    return sign * math.log(abs(w) ** 2) + k * math.log1p(float(np.vdot(z, z).real))


def evaluate_metric(params: ManifoldParams, curve, z, w) -> MetricSample:
    """g_ab = phi s_a conj(s_b) + tau s_ab in coordinates (z_1..z_{n-1}, w).

    For the Xi family the last coordinate is u = 1/w. ``curve`` may be any
    object with ``family`` and ``tau_phi(s)``.
    """
    n, k = params.n, params.k
    z = np.asarray(z, dtype=complex).reshape(-1)
    if z.shape[0] != n - 1:
        raise DomainError(f"z must have length n-1={n - 1}")
    w = complex(w)
    if w == 0:
        raise DomainError("the fiber coordinate must be nonzero")
    tau, phi = curve.tau_phi(_chart_s(k, curve.family, z, w))
    if not phi > 0:
        raise DomainError("point lies on a divisor of the curve (phi = 0)")
    rho = 1.0 + float(np.vdot(z, z).real)
    ds = np.empty(n, dtype=complex)
    ds[: n - 1] = k * z.conj() / rho
    ds[n - 1] = (1.0 if curve.family is Family.ETA else -1.0) / w
    hess = np.zeros((n, n), dtype=complex)
    hess[: n - 1, : n - 1] = k * (np.eye(n - 1) * rho - np.outer(z.conj(), z)) / rho**2
    g = phi * np.outer(ds, ds.conj()) + tau * hess
    g = 0.5 * (g + g.conj().T)
    return MetricSample(z, w, g)


def _complex_hessian(F, x0: np.ndarray, h: float) -> np.ndarray:
    """d^2 F / dz_a dzbar_b of a real function of complex variables, central differences."""
    m = x0.shape[0]
    real = np.concatenate([x0.real, x0.imag])
    d = 2 * m
    f0 = F(real)
    H = np.empty((d, d))
    e = np.eye(d) * h
    for i in range(d):
        H[i, i] = (F(real + e[i]) - 2.0 * f0 + F(real - e[i])) / h**2
        for j in range(i + 1, d):
            H[i, j] = H[j, i] = (
                F(real + e[i] + e[j]) - F(real + e[i] - e[j]) - F(real - e[i] + e[j]) + F(real - e[i] - e[j])
            ) / (4.0 * h * h)
    xx, yy, xy, yx = H[:m, :m], H[m:, m:], H[:m, m:], H[m:, :m]
    return 0.25 * (xx + yy + 1j * (xy - yx))


def einstein_residual(params: ManifoldParams, curve, ricci: float, z, w, h: float = 1e-3) -> float:
    """max |Ric - ricci * g| at (z, w), Ric = -i dd-bar log det g by finite differences."""
    if not 1e-4 <= h <= 1e-2:
        raise DomainError("h must lie in [1e-4, 1e-2]")
    n = params.n
    z = np.asarray(z, dtype=complex).reshape(-1)
    g = evaluate_metric(params, curve, z, w).matrix
    x0 = np.concatenate([z, [complex(w)]])

    def logdet(real):
        c = real[:n] + 1j * real[n:]
        m = evaluate_metric(params, curve, c[: n - 1], c[n - 1]).matrix
        sign, val = np.linalg.slogdet(m)
        if sign.real <= 0:
            raise NumericalError("metric lost positivity inside the stencil")
        return val

    ric = -_complex_hessian(logdet, x0, h)
    return float(np.max(np.abs(ric - ricci * g)))


def rescaled_x(params: ManifoldParams, beta1: float, tau):
    """Small-angle coordinate x = (tau - 1 - k beta1/n) / (k beta1^2 / n)."""
    n, k = params.n, params.k
    return (np.asarray(tau, dtype=float) - 1.0 - k * beta1 / n) / (k * beta1 * beta1 / n)


def rescaled_u(params: ManifoldParams, beta2: float, tau):
    """Xi analogue u = (tau - 1 + k beta2/n) / (k beta2^2 / n)."""
    n, k = params.n, params.k
    return (np.asarray(tau, dtype=float) - 1.0 + k * beta2 / n) / (k * beta2 * beta2 / n)


def phi_pred_x(params: ManifoldParams, beta1: float, x):
    """Leading small-angle prediction (k/2n) beta^2 + (k/n) beta^3 x."""
    n, k = params.n, params.k
    return k / (2 * n) * beta1**2 + k / n * beta1**3 * np.asarray(x, dtype=float)


class RescaledY(NamedTuple):
    y: float
    s_limit: float
    phi_limit: float


def rescaled_y(params: ManifoldParams, beta2: float, tau: float) -> RescaledY:
    n, k = params.n, params.k
    beta2 = check_angle(params, Family.XI, beta2)
    y = ((n + 1) / k) ** (1.0 / n) * float(tau) / (1.0 / k - beta2) ** (1.0 / n)
    if not y > 1.0:
        raise DomainError(f"s_limit needs y > 1, got y={y!r}")
    yn1 = math.expm1(n * math.log(y))
    return RescaledY(y, k / n * math.log(yn1), yn1 / (k * y ** (n - 1)))


def rescaled_fiber_length(profile, X: float, rtol: float = 1e-10) -> float:
    """Length of the fiber between x = 0 and x = X in the metric (1/beta^2) * fiber metric.

    Uses the Eta small-angle coordinate for Eta profiles and its mirror for Xi.
    The limit as beta -> 0 is sqrt(k/n) |X|.
    """
    n, k = profile.params.n, profile.params.k
    beta = profile.free_beta
    scale = k * beta * beta / n
    sign = 1.0 if profile.family is Family.ETA else -1.0
    centre = 1.0 + sign * k * beta / n
    a, b = sorted((centre, centre + scale * X))
    if not (profile.left < a and b < profile.right):
        raise DomainError("x-window leaves the tau-interval")

    def quad(npts):
        xg, wg = np.polynomial.legendre.leggauss(npts)
        tau = 0.5 * (a + b) + 0.5 * (b - a) * xg
        return 0.5 * (b - a) * (wg @ (1.0 / np.sqrt(2.0 * profile.phi(tau)))) / beta

    npts, prev = 32, quad(32)
    while npts < 4096:
        npts *= 2
        cur = quad(npts)
        if abs(cur - prev) <= rtol * abs(cur):
            return float(cur)
        prev = cur
    raise NumericalError("rescaled length quadrature did not converge")
