"""Dense truncated number-basis oracle for cross-checking phase-space results.

Quadratures are x = (a + a^dagger)/sqrt2 and p = -i(a - a^dagger)/sqrt2, so the
vacuum has unit covariance. A Gaussian unitary with symplectic matrix V = exp(Omega H)
is exp(-i r^T H r / 2); it is built in a padded working space and then truncated.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import linalg as sla
from scipy import sparse
from scipy.sparse.linalg import expm_multiply

from .config import get_config
from .gaussian_states import GaussianState
from .phase_space_core import (
    bloch_messiah, complexify, convert_basis, omega, realify, symplectic_inverse, williamson,
)


class CutoffError(ValueError):
    """The truncated space loses more probability than allowed."""


@dataclass(frozen=True, eq=False)
class FockOperator:
    n_modes: int
    cutoff: int
    entries: np.ndarray
    unitarity_defect: float = 0.0


@dataclass(frozen=True, eq=False)
class FockState:
    n_modes: int
    cutoff: int
    rho: np.ndarray
    tail_mass: float = 0.0

    @property
    def trace(self) -> float:
        return float(np.trace(self.rho).real)


# ---------------------------------------------------------------- operators


@lru_cache(maxsize=64)
def _ladder_sparse(mode: int, n_modes: int, N: int) -> sparse.csr_matrix:
    a1 = sparse.diags(np.sqrt(np.arange(1, N)), 1, shape=(N, N), format="csr")
    out = sparse.identity(1, format="csr")
    for m in range(n_modes):
        out = sparse.kron(out, a1 if m == mode else sparse.identity(N, format="csr"), format="csr")
    return out


def ladder(mode: int, n_modes: int = 1, cutoff: int = 30) -> FockOperator:
    """Annihilation operator of ``mode``."""
    if not 0 <= mode < n_modes:
        raise ValueError("mode index out of range")
    return FockOperator(n_modes, cutoff, _ladder_sparse(mode, n_modes, cutoff).toarray())


def number(mode: int, n_modes: int = 1, cutoff: int = 30) -> FockOperator:
    a = _ladder_sparse(mode, n_modes, cutoff)
    return FockOperator(n_modes, cutoff, (a.T @ a).toarray())


def _quadratures(n_modes: int, N: int) -> list[sparse.csr_matrix]:
    ops = []
    for m in range(n_modes):
        a = _ladder_sparse(m, n_modes, N)
        ad = a.T.conj()
        ops += [(a + ad) / math.sqrt(2), (a - ad) / (1j * math.sqrt(2))]
    return ops


def _quadratic_hamiltonian(H: np.ndarray, n_modes: int, N: int) -> sparse.csr_matrix:
    r = _quadratures(n_modes, N)
    dim = N ** n_modes
    out = sparse.csr_matrix((dim, dim), dtype=complex)
    for i, j in itertools.product(range(2 * n_modes), repeat=2):
        if H[i, j] != 0:
            out = out + 0.5 * H[i, j] * (r[i] @ r[j])
    return out


def _linear_hamiltonian(c: np.ndarray, n_modes: int, N: int) -> sparse.csr_matrix:
    r = _quadratures(n_modes, N)
    dim = N ** n_modes
    out = sparse.csr_matrix((dim, dim), dtype=complex)
    for i in range(2 * n_modes):
        if c[i] != 0:
            out = out + c[i] * r[i]
    return out


def _factor_generators(V: np.ndarray, xi: np.ndarray | None) -> list[np.ndarray | tuple]:
    """Generators G_k (Hermitian quadratic/linear forms) with U = prod exp(-i G_k), applied right to left."""
    n = V.shape[0] // 2
    Om = omega(n)
    Op, D, O = bloch_messiah(V)
    gens: list = []
    for P in (O.T,):
        gens.append(("quad", -Om @ realify(sla.logm(complexify(P)))))
    r = np.log(np.diag(D)[0::2])
    gens.append(("quad", -Om @ np.kron(np.diag(r), np.diag([1.0, -1.0]))))
    gens.append(("quad", -Om @ realify(sla.logm(complexify(Op)))))
    if xi is not None and np.any(xi != 0):
        # displacement D(xi) = exp(-i xi^T Omega r)
        gens.append(("lin", xi @ Om))
    return gens


def _generator_matrix(kind_gen, n_modes: int, N: int) -> sparse.csr_matrix:
    kind, G = kind_gen
    G = np.real_if_close(G)
    if kind == "quad":
        G = (G + G.T) / 2
        return _quadratic_hamiltonian(np.asarray(G, dtype=float), n_modes, N)
    return _linear_hamiltonian(np.asarray(G, dtype=float), n_modes, N)


def _pad(N: int) -> int:
    return N + max(20, N // 2)


def _restrict_index(n_modes: int, N_work: int, N: int) -> np.ndarray:
    grids = np.array(list(itertools.product(range(N), repeat=n_modes)))
    idx = np.zeros(len(grids), dtype=int)
    for m in range(n_modes):
        idx = idx * N_work + grids[:, m]
    return idx


def gaussian_unitary_op(V: np.ndarray, xi: np.ndarray | None = None, cutoff: int = 30) -> FockOperator:
    """Truncated matrix of the Gaussian unitary with Heisenberg action r -> V r + xi."""
    V = np.asarray(V, dtype=float)
    n = V.shape[0] // 2
    Nw = _pad(cutoff)
    U = np.eye(Nw ** n, dtype=complex)
    for g in _factor_generators(V, xi):
        U = sla.expm(-1j * _generator_matrix(g, n, Nw).toarray()) @ U
    idx = _restrict_index(n, Nw, cutoff)
    Ut = U[np.ix_(idx, idx)]
    low = np.array([sum(k) < cutoff for k in itertools.product(range(cutoff), repeat=n)])
    G = Ut.conj().T @ Ut - np.eye(len(idx))
    defect = float(np.linalg.norm(G[np.ix_(low, low)], 2))
    return FockOperator(n, cutoff, Ut, defect)


def _apply_gaussian(vecs: np.ndarray, V: np.ndarray, xi, n: int, Nw: int) -> np.ndarray:
    out = vecs
    for g in _factor_generators(V, xi):
        out = expm_multiply(-1j * _generator_matrix(g, n, Nw).tocsc(), out)
    return out


# ---------------------------------------------------------------- states


def _thermal_weights(nu: float, N: int) -> np.ndarray:
    nbar = (nu - 1) / 2
    if nbar <= 1e-15:
        w = np.zeros(N)
        w[0] = 1.0
        return w
    k = np.arange(N)
    return (nbar ** k) / (nbar + 1) ** (k + 1)


def suggested_cutoff(state: GaussianState, tail: float | None = None) -> int:
    """Cutoff estimate from the mean excitation number per mode.

    Fluctuations decay at worst like a squeezed vacuum, whose level weights shrink by
    sqrt(n / (n + 1)) per level, so that geometric bound is combined with a Poisson-like one.
    """
    tail = get_config().fock_tail if tail is None else tail
    best, geo = 0.0, 0.0
    for m in range(state.n):
        s = state.sigma[2 * m:2 * m + 2, 2 * m:2 * m + 2]
        d = state.d[2 * m:2 * m + 2]
        nm = (np.trace(s) - 2) / 4 + d @ d / 4
        best = max(best, nm)
        fluct = (np.trace(s) - 2) / 4
        if fluct > 1e-12:
            geo = max(geo, 2 * math.log(tail / 10) / math.log(fluct / (fluct + 1)))
    return int(math.ceil(max(best + 12 * math.sqrt(best + 1) + 15, geo)))


def gaussian_to_fock(state: GaussianState, cutoff: int | None = None, tail: float | None = None) -> FockState:
    """Density matrix of a Gaussian state truncated to ``cutoff`` levels per mode."""
    cfg = get_config()
    cutoff = cfg.fock_cutoff if cutoff is None else cutoff
    tail = cfg.fock_tail if tail is None else tail
    n = state.n
    Nw = _pad(cutoff)
    S, nu = williamson(state.sigma)
    Si = symplectic_inverse(S)
    weights = [_thermal_weights(v, Nw) for v in nu]
    cols, probs = [], []
    for ks in itertools.product(*[np.nonzero(w > 1e-18)[0] for w in weights]):
        p = float(np.prod([weights[m][k] for m, k in enumerate(ks)]))
        if p < 1e-16:
            continue
        idx = 0
        for k in ks:
            idx = idx * Nw + int(k)
        e = np.zeros(Nw ** n, dtype=complex)
        e[idx] = 1.0
        cols.append(e)
        probs.append(p)
    vecs = np.array(cols).T
    vecs = _apply_gaussian(vecs, Si, state.d, n, Nw)
    idx = _restrict_index(n, Nw, cutoff)
    vt = vecs[idx] * np.sqrt(np.array(probs))
    rho = vt @ vt.conj().T
    lost = 1.0 - float(np.trace(rho).real)
    if lost > tail:
        raise CutoffError(f"tail mass {lost:.3e} exceeds {tail:.1e}; try cutoff {max(suggested_cutoff(state), int(cutoff * 1.5))}")
    return FockState(n, cutoff, rho, max(lost, 0.0))


def _pure(vec: np.ndarray, n: int, N: int) -> FockState:
    vec = np.asarray(vec, dtype=complex)
    return FockState(n, N, np.outer(vec, vec.conj()), max(0.0, 1 - float(np.vdot(vec, vec).real)))


def fock_coherent(alpha: complex, cutoff: int = 30) -> FockState:
    k = np.arange(cutoff)
    logamp = -abs(alpha) ** 2 / 2 - 0.5 * np.array([math.lgamma(x + 1) for x in k])
    vec = np.exp(logamp) * (complex(alpha) ** k)
    return _pure(vec, 1, cutoff)


def fock_thermal(nbar: float, cutoff: int = 60) -> FockState:
    w = _thermal_weights(2 * nbar + 1, cutoff)
    return FockState(1, cutoff, np.diag(w).astype(complex), max(0.0, 1 - float(w.sum())))


def fock_vacuum(n_modes: int = 1, cutoff: int = 30) -> FockState:
    v = np.zeros(cutoff ** n_modes)
    v[0] = 1.0
    return _pure(v, n_modes, cutoff)


def fock_tensor(a: FockState, b: FockState) -> FockState:
    if a.cutoff != b.cutoff:
        raise ValueError("cutoffs differ")
    return FockState(a.n_modes + b.n_modes, a.cutoff, np.kron(a.rho, b.rho), a.tail_mass + b.tail_mass)


def partial_trace_fock(fs: FockState, keep: list[int]) -> FockState:
    N, n = fs.cutoff, fs.n_modes
    t = fs.rho.reshape([N] * (2 * n))
    drop = [m for m in range(n) if m not in keep]
    for k, m in enumerate(sorted(drop, reverse=True)):
        cur = n - k
        t = np.trace(t, axis1=m, axis2=m + cur)
    dim = N ** len(keep)
    return FockState(len(keep), N, t.reshape(dim, dim), fs.tail_mass)


def apply_unitary(U: FockOperator, fs: FockState) -> FockState:
    M = U.entries
    return FockState(fs.n_modes, fs.cutoff, M @ fs.rho @ M.conj().T, fs.tail_mass)


# ---------------------------------------------------------------- measurements


def extract_moments(fs: FockState) -> tuple[np.ndarray, np.ndarray]:
    """Displacement and symmetrised covariance from normally ordered ladder moments."""
    n, N = fs.n_modes, fs.cutoff
    rho = fs.rho / fs.trace
    a = [_ladder_sparse(m, n, N) for m in range(n)]

    def ev(op) -> complex:
        return complex((op.multiply(rho.T)).sum()) if sparse.issparse(op) else complex(np.sum(op * rho.T))

    am = np.array([ev(x) for x in a])
    M = np.array([[ev(a[j] @ a[k]) for k in range(n)] for j in range(n)])
    Nm = np.array([[ev(a[j].T.conj() @ a[k]) for k in range(n)] for j in range(n)])
    C = np.block([[2 * M, 2 * Nm.T + np.eye(n)], [2 * Nm + np.eye(n), 2 * M.conj()]])
    dc = np.concatenate([am, am.conj()])
    d = convert_basis(dc, "(1,0)", "real-interleaved", source="complex").entries
    second = convert_basis(C, "(2,0)", "real-interleaved", source="complex").entries
    sigma = second - 2 * np.outer(d, d)
    return np.real(d), np.real((sigma + sigma.T) / 2)


def u1_dephase(fs: FockState, charges) -> FockState:
    """Uniform twirl over the U(1) action: keep blocks of equal total charge."""
    n, N = fs.n_modes, fs.cutoff
    q = np.asarray(charges, dtype=float)
    grid = np.array(list(itertools.product(range(N), repeat=n)))
    tot = grid @ q
    mask = np.abs(tot[:, None] - tot[None, :]) < 1e-9
    return FockState(n, N, np.where(mask, fs.rho, 0), fs.tail_mass)


def entropy(fs: FockState) -> float:
    p = np.linalg.eigvalsh((fs.rho + fs.rho.conj().T) / 2)
    p = p[p > 1e-300]
    return float(-np.sum(p * np.log(p)))


def overlap(a: FockState, b: FockState) -> float:
    return float(np.real(np.trace(a.rho @ b.rho)))


def reflect_vacuum_unitary(n_modes: int = 1, cutoff: int = 30) -> FockOperator:
    """U = I - 2|0><0|: a non-Gaussian unitary commuting with every phase rotation."""
    dim = cutoff ** n_modes
    U = np.eye(dim, dtype=complex)
    U[0, 0] = -1.0
    return FockOperator(n_modes, cutoff, U)


def reflection_prediction(alpha: complex) -> tuple[np.ndarray, np.ndarray, float]:
    """Moments after the vacuum reflection acting on a coherent state."""
    c = 1 - 2 * math.exp(-abs(alpha) ** 2)
    d1 = math.sqrt(2) * np.array([complex(alpha).real, complex(alpha).imag])
    d2 = c * d1
    s2 = (1 + (1 - c) * d1 @ d1) * np.eye(2) + 2 * c * (1 - c) * np.outer(d1, d1)
    return d2, s2, c


def fock_apply_gaussian(fs: FockState, V: np.ndarray, xi: np.ndarray | None = None) -> FockState:
    """Push a truncated state through a Gaussian unitary using padded-space vector exponentials."""
    n, N = fs.n_modes, fs.cutoff
    Nw = _pad(N)
    w, U = np.linalg.eigh((fs.rho + fs.rho.conj().T) / 2)
    keep = w > 1e-14
    idx = _restrict_index(n, Nw, N)
    vecs = np.zeros((Nw ** n, int(keep.sum())), dtype=complex)
    vecs[idx] = U[:, keep] * np.sqrt(w[keep])
    out = _apply_gaussian(vecs, np.asarray(V, dtype=float), xi, n, Nw)[idx]
    rho = out @ out.conj().T
    return FockState(n, N, rho, fs.tail_mass + max(0.0, fs.trace - float(np.trace(rho).real)))
