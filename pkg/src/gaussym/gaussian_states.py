"""Gaussian states as (displacement, covariance) pairs.

Squeezing convention: the one-mode squeezer is the symplectic matrix
e^{rZ} = diag(e^r, e^-r), so the squeezed vacuum has sigma = diag(e^{2r}, e^{-2r}).
Vacuum covariance is the identity (hbar = 2 units).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import get_config
from .phase_space_core import (
    DomainError, check_spd, direct_sum, mode_indices, omega, rel_residual,
    symplectic_eigenvalues, symplectic_inverse, williamson,
)


@dataclass(frozen=True, eq=False)
class GaussianState:
    d: np.ndarray
    sigma: np.ndarray

    def __post_init__(self) -> None:
        d = np.asarray(self.d, dtype=float).ravel()
        s = np.asarray(self.sigma, dtype=float)
        if s.shape != (d.size, d.size) or d.size % 2:
            raise ValueError("displacement and covariance dimensions disagree")
        if rel_residual(s, s.T) > get_config().tau_sympl:
            raise ValueError("covariance is not symmetric")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "sigma", (s + s.T) / 2)

    @property
    def n(self) -> int:
        return self.d.size // 2

    def physicality(self) -> float:
        """Smallest eigenvalue of sigma + i Omega."""
        H = self.sigma + 1j * omega(self.n)
        return float(np.linalg.eigvalsh(H)[0])

    def is_physical(self, tol: float | None = None) -> bool:
        tol = get_config().tau_phys if tol is None else tol
        return self.physicality() >= -tol

    def to_json(self) -> dict:
        return {"n": self.n, "d": self.d.tolist(), "sigma": self.sigma.ravel().tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "GaussianState":
        n = int(obj["n"])
        d = np.asarray(obj.get("d", np.zeros(2 * n)), dtype=float)
        s = np.asarray(obj["sigma"], dtype=float).reshape(2 * n, 2 * n)
        return cls(d, s)


def vacuum(n: int = 1) -> GaussianState:
    return GaussianState(np.zeros(2 * n), np.eye(2 * n))


def coherent(gamma: complex) -> GaussianState:
    g = complex(gamma)
    return GaussianState(np.sqrt(2.0) * np.array([g.real, g.imag]), np.eye(2))


def thermal(nbar: float) -> GaussianState:
    if nbar < 0:
        raise ValueError("mean photon number must be non-negative")
    return GaussianState(np.zeros(2), (2 * nbar + 1) * np.eye(2))


def squeezed(r: float) -> GaussianState:
    return GaussianState(np.zeros(2), np.diag([np.exp(2 * r), np.exp(-2 * r)]))


def epr(r: float) -> GaussianState:
    from .gaussian_channels import v_2sq
    V = v_2sq(r)
    return GaussianState(np.zeros(4), V @ V.T)


def phase_avg_free(nus: Sequence[float]) -> GaussianState:
    """Product of thermal states with the given symplectic eigenvalues."""
    nus = [float(v) for v in nus]
    if any(v < 1 for v in nus):
        raise ValueError("symplectic eigenvalues must be at least 1")
    return GaussianState(np.zeros(2 * len(nus)), np.kron(np.diag(nus), np.eye(2)))


def standard_state(kind: str, *params, modes: int = 1) -> GaussianState:
    """Named constructors; a one-mode kind with ``modes`` > 1 gives a product state."""
    builders = {
        "vacuum": lambda: vacuum(modes),
        "coherent": lambda: coherent(params[0]),
        "thermal": lambda: thermal(params[0]),
        "squeezed": lambda: squeezed(params[0]),
        "epr": lambda: epr(params[0]),
        "phase_avg_free": lambda: phase_avg_free(params[0]),
    }
    if kind not in builders:
        raise ValueError(f"unknown state kind {kind!r}")
    st = builders[kind]()
    if kind in ("coherent", "thermal", "squeezed") and modes > 1:
        out = st
        for _ in range(modes - 1):
            out = tensor(out, st)
        return out
    return st


def tensor(a: GaussianState, b: GaussianState) -> GaussianState:
    return GaussianState(np.concatenate([a.d, b.d]), direct_sum(a.sigma, b.sigma))


def partial_trace(state: GaussianState, keep: Sequence[int]) -> GaussianState:
    keep = list(keep)
    if not keep:
        raise ValueError("keep set is empty")
    if any(m < 0 or m >= state.n for m in keep):
        raise ValueError("mode index out of range")
    idx = mode_indices(keep)
    return GaussianState(state.d[idx], state.sigma[np.ix_(idx, idx)])


def transform(state: GaussianState, V: np.ndarray, xi=None) -> GaussianState:
    xi = np.zeros(state.d.size) if xi is None else np.asarray(xi, dtype=float)
    return GaussianState(V @ state.d + xi, V @ state.sigma @ V.T)


def sigma_alpha(sigma: np.ndarray, alpha: float, tol: float | None = None) -> np.ndarray:
    """Covariance of rho^alpha / tr rho^alpha via the symplectic spectral calculus."""
    tol = get_config().tau_phys if tol is None else tol
    sigma = check_spd(sigma, "covariance")
    if not 0 < alpha:
        raise ValueError("alpha must be positive")
    S, nu = williamson(sigma)
    if np.all(np.abs(nu - 1) <= tol) or alpha == 1:
        return sigma.copy()
    if np.any(nu < 1 - tol):
        raise DomainError(f"symplectic eigenvalue {nu.min():.6g} below 1")
    if alpha < 1 and np.any(np.abs(nu - 1) <= tol):
        bad = nu[np.abs(nu - 1) <= tol][0]
        raise DomainError(f"unit symplectic eigenvalue {bad!r} of a mixed state: arccoth singular")
    f = 1.0 / np.tanh(alpha * np.arctanh(1.0 / nu))
    Si = symplectic_inverse(S)
    out = Si @ np.kron(np.diag(f), np.eye(2)) @ Si.T
    return (out + out.T) / 2


def sigma_inf(sigma: np.ndarray) -> np.ndarray:
    """Large-alpha limit of the power states: the pure state sharing sigma's normal modes."""
    S, _ = williamson(sigma)
    Si = symplectic_inverse(S)
    return Si @ Si.T


def power_state(state: GaussianState, alpha: float) -> GaussianState:
    if not 0 < alpha <= 1:
        raise ValueError("alpha must lie in (0, 1]")
    return GaussianState(state.d, sigma_alpha(state.sigma, alpha))


def symplectic_spectrum(state: GaussianState) -> np.ndarray:
    return symplectic_eigenvalues(state.sigma)


def purity(state: GaussianState) -> float:
    return float(1.0 / np.prod(symplectic_spectrum(state)))


def _h(nu: float) -> float:
    if nu <= 1 + 1e-12:
        return 0.0
    a, b = (nu + 1) / 2, (nu - 1) / 2
    return a * math.log(a) - b * math.log(b)


def von_neumann_entropy(state: GaussianState, base: str | None = None) -> float:
    base = get_config().log_base if base is None else base
    s = sum(_h(v) for v in symplectic_spectrum(state))
    return s / math.log(2) if base == "2" else s


def is_pure(state: GaussianState, tol: float | None = None) -> bool:
    tol = get_config().tau_phys if tol is None else tol
    nu = symplectic_spectrum(state)
    return bool(np.all(np.abs(nu - 1) <= max(tol, 1e-7)))

