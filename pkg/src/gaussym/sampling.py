"""Seeded random instances that respect a symmetry representation."""

from __future__ import annotations

import numpy as np
from scipy import linalg as sla

from .gaussian_channels import GaussianChannel, GaussianUnitary
from .gaussian_states import GaussianState
from .phase_space_core import inv_sqrtm, omega
from .representations import (
    SymmetryRep, commutant_basis, constraint_ops, invariant_hamiltonian_basis,
    invariant_symmetric_basis, with_conjugator,
)


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _combo(basis, rng, scale=1.0):
    if not basis:
        return None
    c = rng.normal(size=len(basis)) * scale
    return sum(ci * B for ci, B in zip(c, basis))


def invariant_vectors(rep: SymmetryRep) -> np.ndarray:
    """Orthonormal basis (columns) of vectors fixed by the representation."""
    rows = []
    for kind, L in constraint_ops(rep):
        rows.append(L if kind == "lie" else L - np.eye(rep.dim))
    return sla.null_space(np.vstack(rows), rcond=1e-10)


def random_invariant_hamiltonian(rep: SymmetryRep, seed=0, scale: float = 0.5) -> np.ndarray:
    rng = _rng(seed)
    basis = invariant_hamiltonian_basis(rep)
    H = _combo(basis, rng, scale / np.sqrt(max(len(basis), 1)))
    return np.zeros((rep.dim, rep.dim)) if H is None else H


def random_invariant_unitary(rep: SymmetryRep, seed=0, scale: float = 0.5,
                             displacement: bool = True) -> GaussianUnitary:
    """exp(Omega H) for an invariant H, plus an invariant displacement."""
    rng = _rng(seed)
    H = random_invariant_hamiltonian(rep, rng, scale)
    V = sla.expm(omega(rep.n) @ H)
    xi = np.zeros(rep.dim)
    if displacement:
        F = invariant_vectors(rep)
        if F.shape[1]:
            xi = F @ rng.normal(size=F.shape[1])
    return GaussianUnitary(V, xi)


def random_invariant_state(rep: SymmetryRep, seed=0, mixed: bool = True, squeeze: float = 0.5,
                           noise: float = 0.7, displacement: bool = True) -> GaussianState:
    """sigma = V R (I + G G^T) R^T V^T with V invariant and G commuting with the passive part."""
    rng = _rng(seed)
    R = rep.R
    core = np.eye(rep.dim)
    if mixed:
        G = _combo(commutant_basis(with_conjugator(rep, None), with_conjugator(rep, None)), rng,
                   noise / np.sqrt(rep.dim))
        if G is not None:
            core = core + G @ G.T
    U = random_invariant_unitary(rep, rng, squeeze, displacement)
    sigma = U.V @ R @ core @ R.T @ U.V.T
    return GaussianState(U.xi if displacement else np.zeros(rep.dim), sigma)


def random_symplectic(n: int, seed=0, scale: float = 0.5) -> np.ndarray:
    rng = _rng(seed)
    H = rng.normal(size=(2 * n, 2 * n)) * scale / np.sqrt(2 * n)
    return sla.expm(omega(n) @ (H + H.T) / 2)


def random_state(n: int, seed=0, mixed: bool = True, scale: float = 0.5) -> GaussianState:
    rng = _rng(seed)
    V = random_symplectic(n, rng, scale)
    core = np.kron(np.diag(1 + (rng.exponential(size=n) if mixed else np.zeros(n))), np.eye(2))
    return GaussianState(rng.normal(size=2 * n), V @ core @ V.T)


def min_cp_inflation(X: np.ndarray, Y0: np.ndarray, P: np.ndarray, n_in: int, n_out: int) -> float:
    """Smallest t >= 0 with Y0 + t P + i(Omega - X Omega X^T) positive semidefinite."""
    M = Y0 + 1j * (omega(n_out) - X @ omega(n_in) @ X.T)
    Pis = inv_sqrtm(P)
    K = Pis @ M @ Pis
    lam = np.linalg.eigvalsh((K + K.conj().T) / 2)[0]
    return max(0.0, -float(lam))


def random_covariant_channel(rep_in: SymmetryRep, rep_out: SymmetryRep, seed=0,
                             noise_scale: float = 0.3, displacement: bool = True,
                             margin: float = 1.5) -> GaussianChannel:
    """X from the commutant, Y from the invariant cone, inflated by ``margin`` until CP."""
    rng = _rng(seed)
    Xb = commutant_basis(rep_in, rep_out)
    X = _combo(Xb, rng)
    if X is None:
        X = np.zeros((rep_out.dim, rep_in.dim))
    else:
        X = X * rng.uniform(0.3, 1.5) / max(np.linalg.norm(X, 2), 1e-12)
    P = rep_out.R @ rep_out.R.T
    Gb = commutant_basis(rep_out, rep_out)
    G = _combo(Gb, rng, noise_scale / np.sqrt(max(len(Gb), 1)))
    Y0 = G @ P @ G.T if G is not None else np.zeros_like(P)
    t = min_cp_inflation(X, Y0, P, rep_in.n, rep_out.n)
    Y = Y0 + margin * t * P
    xi = np.zeros(rep_out.dim)
    if displacement:
        F = invariant_vectors(rep_out)
        if F.shape[1]:
            xi = F @ rng.normal(size=F.shape[1])
    return GaussianChannel(X, Y, xi)


def random_invariant_symmetric(rep: SymmetryRep, seed=0) -> np.ndarray:
    rng = _rng(seed)
    out = _combo(invariant_symmetric_basis(rep), rng)
    return np.zeros((rep.dim, rep.dim)) if out is None else out

