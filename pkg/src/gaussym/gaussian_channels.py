"""Gaussian channels (X, Y, xi), Gaussian unitaries and standard constructors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import linalg as sla

from .config import get_config
from .gaussian_states import GaussianState
from .phase_space_core import (
    OMEGA1, Z1, direct_sum, is_symplectic, omega, realify, rel_residual,
    symplectic_inverse, zeta,
)


@dataclass(frozen=True, eq=False)
class GaussianChannel:
    X: np.ndarray
    Y: np.ndarray
    xi: np.ndarray

    def __post_init__(self) -> None:
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        Y = np.atleast_2d(np.asarray(self.Y, dtype=float))
        xi = np.asarray(self.xi, dtype=float).ravel()
        if X.shape[0] % 2 or X.shape[1] % 2 or Y.shape != (X.shape[0], X.shape[0]) or xi.size != X.shape[0]:
            raise ValueError("inconsistent channel dimensions")
        if rel_residual(Y, Y.T) > get_config().tau_sympl:
            raise ValueError("Y is not symmetric")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", (Y + Y.T) / 2)
        object.__setattr__(self, "xi", xi)

    @property
    def n_in(self) -> int:
        return self.X.shape[1] // 2

    @property
    def n_out(self) -> int:
        return self.X.shape[0] // 2

    def to_json(self) -> dict:
        return {"n_in": self.n_in, "n_out": self.n_out, "X": self.X.tolist(),
                "Y": self.Y.tolist(), "xi": self.xi.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "GaussianChannel":
        X = np.asarray(obj["X"], dtype=float)
        n_out = int(obj.get("n_out", X.shape[0] // 2))
        n_in = int(obj.get("n_in", X.shape[1] // 2 if X.ndim == 2 else n_out))
        X = X.reshape(2 * n_out, 2 * n_in)
        Y = np.asarray(obj.get("Y", np.zeros((2 * n_out, 2 * n_out))), dtype=float).reshape(2 * n_out, 2 * n_out)
        xi = np.asarray(obj.get("xi", np.zeros(2 * n_out)), dtype=float)
        return cls(X, Y, xi)


@dataclass(frozen=True, eq=False)
class GaussianUnitary:
    V: np.ndarray
    xi: np.ndarray | None = None

    def __post_init__(self) -> None:
        V = np.asarray(self.V, dtype=float)
        xi = np.zeros(V.shape[0]) if self.xi is None else np.asarray(self.xi, dtype=float).ravel()
        if not is_symplectic(V, max(get_config().tau_sympl, 1e-9)):
            raise ValueError("V is not symplectic")
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "xi", xi)

    @property
    def n(self) -> int:
        return self.V.shape[0] // 2

    @property
    def channel(self) -> GaussianChannel:
        return GaussianChannel(self.V, np.zeros_like(self.V), self.xi)

    def inverse(self) -> "GaussianUnitary":
        Vi = symplectic_inverse(self.V)
        return GaussianUnitary(Vi, -Vi @ self.xi)

    def to_json(self) -> dict:
        return {"n": self.n, "V": self.V.tolist(), "xi": self.xi.tolist()}


class CPCheck(NamedTuple):
    ok: bool
    min_eig: float

    def __bool__(self) -> bool:
        return bool(self.ok)


def cp_matrix(ch: GaussianChannel) -> np.ndarray:
    return ch.Y + 1j * (omega(ch.n_out) - ch.X @ omega(ch.n_in) @ ch.X.T)


def validate_cp(ch: GaussianChannel, tol: float | None = None) -> CPCheck:
    tol = get_config().tau_phys if tol is None else tol
    H = cp_matrix(ch)
    m = float(np.linalg.eigvalsh((H + H.conj().T) / 2)[0])
    return CPCheck(m >= -tol, m)


def apply(ch: GaussianChannel, state: GaussianState) -> GaussianState:
    if state.n != ch.n_in:
        raise ValueError(f"channel expects {ch.n_in} modes, state has {state.n}")
    return GaussianState(ch.X @ state.d + ch.xi, ch.X @ state.sigma @ ch.X.T + ch.Y)


def compose(second: GaussianChannel, first: GaussianChannel) -> GaussianChannel:
    if second.n_in != first.n_out:
        raise ValueError("inner dimensions do not match")
    X2 = second.X
    return GaussianChannel(X2 @ first.X, X2 @ first.Y @ X2.T + second.Y, X2 @ first.xi + second.xi)


def tensor(a: GaussianChannel, b: GaussianChannel) -> GaussianChannel:
    return GaussianChannel(direct_sum(a.X, b.X), direct_sum(a.Y, b.Y), np.concatenate([a.xi, b.xi]))


def identity_channel(n: int) -> GaussianChannel:
    return GaussianChannel(np.eye(2 * n), np.zeros((2 * n, 2 * n)), np.zeros(2 * n))


def as_channel(obj) -> GaussianChannel:
    return obj.channel if isinstance(obj, GaussianUnitary) else obj


# ---------------------------------------------------------------- gates


def v_ps(phi: float) -> np.ndarray:
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


def v_1sq(r: float) -> np.ndarray:
    return np.diag([np.exp(r), np.exp(-r)])


def v_bs(phi: float) -> np.ndarray:
    c, s = np.cos(phi), np.sin(phi)
    eye = np.eye(2)
    return np.block([[c * eye, s * eye], [-s * eye, c * eye]])


def v_2sq(r: float) -> np.ndarray:
    c, s = np.cosh(r), np.sinh(r)
    return np.block([[c * np.eye(2), s * Z1], [s * Z1, c * np.eye(2)]])


def standard_unitary(kind: str, param=0.0) -> GaussianUnitary:
    if kind == "phase_shift":
        return GaussianUnitary(v_ps(param))
    if kind == "beam_splitter":
        return GaussianUnitary(v_bs(param))
    if kind == "two_mode_squeezer":
        return GaussianUnitary(v_2sq(param))
    if kind == "one_mode_squeezer":
        return GaussianUnitary(v_1sq(param))
    if kind == "displacement":
        xi = np.asarray(param, dtype=float).ravel()
        return GaussianUnitary(np.eye(xi.size), xi)
    raise ValueError(f"unknown unitary kind {kind!r}")


# ---------------------------------------------------------------- standard channels


def attenuator(alpha: float, nbar: float = 0.0) -> GaussianChannel:
    """x = cos(alpha), y = (2 nbar + 1) sin^2(alpha)."""
    return GaussianChannel(np.cos(alpha) * np.eye(2), (2 * nbar + 1) * np.sin(alpha) ** 2 * np.eye(2), np.zeros(2))


def amplifier(alpha: float, nbar: float = 0.0) -> GaussianChannel:
    """x = cosh(alpha), y = (2 nbar + 1) sinh^2(alpha)."""
    return GaussianChannel(np.cosh(alpha) * np.eye(2), (2 * nbar + 1) * np.sinh(alpha) ** 2 * np.eye(2), np.zeros(2))


def phase_covariant(alpha: float, alpha_loss: float) -> GaussianChannel:
    """Pure loss cos(alpha_loss) followed by a quantum-limited amplifier cosh(alpha)."""
    return compose(amplifier(alpha), attenuator(alpha_loss))


def su2_x(xp: float, xm: float, theta: float, phi: float) -> np.ndarray:
    Om2 = omega(2)
    Xm = np.kron(OMEGA1, Z1)
    return sla.expm(phi * Om2) @ (xp * np.eye(4) + xm * sla.expm(theta * Om2) @ Xm)


def su2_cp_bound(xp: float, xm: float) -> float:
    return float(np.sqrt(((xp - 1) ** 2 + xm ** 2) * ((xp + 1) ** 2 + xm ** 2)))


def su2_covariant_channel(xp: float, xm: float, theta: float, phi: float, y: float) -> GaussianChannel:
    """Two-mode channel commuting with the Schwinger SU(2) action."""
    return GaussianChannel(su2_x(xp, xm, theta, phi), y * np.eye(4), np.zeros(4))


# ---------------------------------------------------------------- entangler


def _herm_funcs(M: np.ndarray):
    lam, U = np.linalg.eigh((M + M.conj().T) / 2)
    s = np.sqrt(np.clip(lam, 0, None))
    sinc = np.where(s > 1e-12, np.sinh(s) / np.where(s > 1e-12, s, 1.0), 1.0)
    return (U * np.cosh(s)) @ U.conj().T, (U * sinc) @ U.conj().T


def bogoliubov_to_real(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Real matrix of a -> A a + B a^dagger."""
    return realify(A) + realify(B) @ zeta(A.shape[0])


def entangler(r: np.ndarray, conjugator: np.ndarray | None = None) -> GaussianUnitary:
    """Symmetry-respecting multimode squeezer between systems A (first m modes) and B.

    a -> cosh(sqrt(r r^dag)) a + sinh(sqrt(r r^dag))/sqrt(r r^dag) r b^dag
    b -> conj(cosh(sqrt(r^dag r))) b + conj(sinh(sqrt(r^dag r))/sqrt(r^dag r) r^dag) a^dag
    """
    r = np.atleast_2d(np.asarray(r, dtype=complex))
    m = r.shape[0]
    rd = r.conj().T
    ca, sa = _herm_funcs(r @ rd)
    cb, sb = _herm_funcs(rd @ r)
    zero = np.zeros((m, m))
    A = np.block([[ca, zero], [zero, cb.conj()]])
    B = np.block([[zero, sa @ r], [(sb @ rd).conj(), zero]])
    V = bogoliubov_to_real(A, B)
    if conjugator is not None:
        R = np.asarray(conjugator, dtype=float)
        V = R @ V @ symplectic_inverse(R)
    return GaussianUnitary(V)



def random_covariant_channel(rep_in, rep_out, seed=0, noise_scale: float = 0.3, **kw) -> GaussianChannel:
    """Seeded covariant CP channel; see :func:`gaussym.sampling.random_covariant_channel`."""
    from .sampling import random_covariant_channel as _impl
    return _impl(rep_in, rep_out, seed, noise_scale, **kw)
