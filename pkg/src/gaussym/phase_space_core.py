"""Basis conventions, the symplectic form, spectral matrix functions and the
classical symplectic decompositions.

Storage convention: real phase-space vectors are interleaved (x1, p1, x2, p2, ...).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import linalg as sla

from .config import get_config

BASIS_TAGS = ("real-interleaved", "real-xp-ordered", "complex")
TENSOR_TYPES = ("(1,1)", "(2,0)", "(0,2)", "(1,0)")


class DomainError(ValueError):
    """An eigenvalue falls outside the domain of a requested matrix function."""


class InfeasibleError(ValueError):
    """A decomposition or construction has no solution for the given input."""


class UncertaintyWarning(UserWarning):
    """A covariance matrix violates the uncertainty relation."""


OMEGA1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
Z1 = np.diag([1.0, -1.0])


def omega(n: int) -> np.ndarray:
    """Symplectic form on ``n`` modes in the interleaved basis."""
    if int(n) != n or n < 1:
        raise ValueError("mode count must be a positive integer")
    return np.kron(np.eye(int(n)), OMEGA1)


def zeta(n: int) -> np.ndarray:
    """Momentum reflection Z on every mode (time reversal in phase space)."""
    return np.kron(np.eye(int(n)), Z1)


def n_modes(M: np.ndarray) -> int:
    dim = np.shape(M)[0]
    if dim % 2:
        raise ValueError(f"phase-space dimension must be even, got {dim}")
    return dim // 2


def rel_residual(A: np.ndarray, B: np.ndarray) -> float:
    """Frobenius distance between A and B relative to the size of B (floor 1)."""
    return float(np.linalg.norm(A - B) / max(np.linalg.norm(B), 1.0))


def direct_sum(*blocks: np.ndarray) -> np.ndarray:
    return sla.block_diag(*blocks)


def embed(M: np.ndarray, modes: list[int], n: int) -> np.ndarray:
    """Place a symplectic block acting on ``modes`` inside the identity on ``n`` modes."""
    idx = np.concatenate([[2 * m, 2 * m + 1] for m in modes]).astype(int)
    out = np.eye(2 * n)
    out[np.ix_(idx, idx)] = M
    return out


def mode_indices(modes) -> np.ndarray:
    return np.array([i for m in modes for i in (2 * m, 2 * m + 1)], dtype=int)


def realify(U: np.ndarray) -> np.ndarray:
    """Real interleaved form of a complex n x n matrix acting on annihilation operators."""
    U = np.asarray(U, dtype=complex)
    n, m = U.shape
    out = np.zeros((2 * n, 2 * m))
    out[0::2, 0::2] = U.real
    out[0::2, 1::2] = -U.imag
    out[1::2, 0::2] = U.imag
    out[1::2, 1::2] = U.real
    return out


def complexify(V: np.ndarray) -> np.ndarray:
    """Inverse of :func:`realify` for matrices commuting with the symplectic form."""
    return V[0::2, 0::2] + 1j * V[1::2, 0::2]


# ---------------------------------------------------------------- basis changes


def _xp_perm(n: int) -> np.ndarray:
    """Orthogonal P with P @ v_interleaved = v_xp."""
    order = np.concatenate([np.arange(0, 2 * n, 2), np.arange(1, 2 * n, 2)])
    return np.eye(2 * n)[order]


def _wmat(n: int) -> np.ndarray:
    """Map from xp-ordered quadratures to (a, a^dagger)."""
    eye = np.eye(n)
    return np.block([[eye, 1j * eye], [eye, -1j * eye]]) / np.sqrt(2.0)


@dataclass(frozen=True)
class PhaseSpaceMatrix:
    entries: np.ndarray
    basis_tag: str = "real-interleaved"

    def __post_init__(self) -> None:
        if self.basis_tag not in BASIS_TAGS:
            raise ValueError(f"unknown basis tag {self.basis_tag!r}")

    def to_json(self) -> dict:
        a = np.atleast_2d(np.asarray(self.entries))
        if self.basis_tag == "complex":
            flat = np.stack([a.real.ravel(), a.imag.ravel()], axis=1).ravel()
        else:
            flat = a.real.ravel()
        return {"rows": a.shape[0], "cols": a.shape[1], "basis_tag": self.basis_tag,
                "data": [float(x) for x in flat]}

    @classmethod
    def from_json(cls, obj: dict) -> "PhaseSpaceMatrix":
        rows, cols, tag = int(obj["rows"]), int(obj["cols"]), obj.get("basis_tag", "real-interleaved")
        data = np.asarray(obj["data"], dtype=float)
        if tag == "complex":
            data = data[0::2] + 1j * data[1::2]
        if data.size != rows * cols:
            raise ValueError("data length does not match rows*cols")
        return cls(data.reshape(rows, cols), tag)


def _to_complex_from_xp(A: np.ndarray, ttype: str) -> np.ndarray:
    W = _wmat(n_modes(A))
    Winv = np.linalg.inv(W)
    if ttype == "(1,1)":
        return W @ A @ Winv
    if ttype == "(2,0)":
        return W @ A @ W.T
    if ttype == "(0,2)":
        return Winv.T @ A @ Winv
    return W @ A


def _from_complex_to_xp(A: np.ndarray, ttype: str) -> np.ndarray:
    W = _wmat(n_modes(A))
    Winv = np.linalg.inv(W)
    if ttype == "(1,1)":
        out = Winv @ A @ W
    elif ttype == "(2,0)":
        out = Winv @ A @ Winv.T
    elif ttype == "(0,2)":
        out = W.T @ A @ W
    else:
        out = Winv @ A
    return out.real


def convert_basis(M, tensor_type: str, target: str, source: str | None = None) -> PhaseSpaceMatrix:
    """Convert a phase-space tensor between the interleaved, xp-ordered and complex bases.

    ``(2,0)`` tensors transform like covariance matrices, ``(0,2)`` like quadratic
    forms (Hamiltonians), ``(1,1)`` like linear maps and ``(1,0)`` like vectors.
    """
    if isinstance(M, PhaseSpaceMatrix):
        A, src = np.asarray(M.entries), M.basis_tag
    else:
        A, src = np.asarray(M), source or "real-interleaved"
    if source is not None:
        src = source
    if tensor_type not in TENSOR_TYPES:
        raise ValueError(f"unknown tensor type {tensor_type!r}")
    if src not in BASIS_TAGS or target not in BASIS_TAGS:
        raise ValueError(f"unknown basis tag {src!r} or {target!r}")
    if A.shape[0] % 2 or (tensor_type != "(1,0)" and A.shape[1] % 2):
        raise ValueError("dimension not even")
    if src == target:
        return PhaseSpaceMatrix(A.copy(), target)
    vec = tensor_type == "(1,0)"
    n = A.shape[0] // 2
    P = _xp_perm(n)
    # bring to xp-ordered
    if src == "real-interleaved":
        xp = P @ A if vec else P @ A @ P.T
    elif src == "complex":
        xp = _from_complex_to_xp(A, tensor_type)
    else:
        xp = A
    if target == "real-xp-ordered":
        out = xp
    elif target == "complex":
        out = _to_complex_from_xp(xp, tensor_type)
    else:
        out = P.T @ xp if vec else P.T @ xp @ P
    return PhaseSpaceMatrix(out, target)


# ---------------------------------------------------------------- predicates


def symplectic_residual(V: np.ndarray) -> float:
    V = np.asarray(V, dtype=float)
    Om = omega(n_modes(V))
    return rel_residual(V @ Om @ V.T, Om)


def is_symplectic(V, tol: float | None = None) -> bool:
    V = np.asarray(V, dtype=float)
    if V.ndim != 2 or V.shape[0] != V.shape[1] or V.shape[0] % 2:
        return False
    tol = get_config().tau_sympl if tol is None else tol
    return symplectic_residual(V) <= tol and abs(np.linalg.det(V) - 1.0) <= max(tol, 1e-12) * 10


def is_orthogonal_symplectic(V, tol: float | None = None) -> bool:
    V = np.asarray(V, dtype=float)
    if not is_symplectic(V, tol):
        return False
    tol = get_config().tau_sympl if tol is None else tol
    return rel_residual(V @ V.T, np.eye(V.shape[0])) <= tol


def symplectic_inverse(V: np.ndarray) -> np.ndarray:
    Om = omega(n_modes(V))
    return -Om @ V.T @ Om


# ---------------------------------------------------------------- spectral calculus


def _sym(M: np.ndarray) -> np.ndarray:
    return (M + M.T) / 2


def matrix_function_spd(M, f: Callable[[np.ndarray], np.ndarray],
                        domain: Callable[[np.ndarray], np.ndarray] | None = None) -> np.ndarray:
    """Apply a scalar function to a symmetric matrix through its eigendecomposition.

    ``domain`` returns a boolean mask of admissible eigenvalues; by default every
    eigenvalue must be strictly positive.
    """
    M = np.asarray(M, dtype=float)
    if rel_residual(M, M.T) > 1e-9:
        raise ValueError("matrix is not symmetric")
    lam, O = np.linalg.eigh(_sym(M))
    ok = domain(lam) if domain is not None else lam > 0
    if not np.all(ok):
        bad = lam[~np.asarray(ok)][0]
        raise DomainError(f"eigenvalue {bad!r} outside the function domain")
    with np.errstate(all="raise"):
        vals = f(lam)
    return _sym((O * vals) @ O.T)


def sqrtm_psd(M: np.ndarray) -> np.ndarray:
    return matrix_function_spd(M, lambda x: np.sqrt(np.clip(x, 0, None)), domain=lambda x: x > -1e-9 * max(1.0, np.abs(x).max()))


def inv_sqrtm(M: np.ndarray) -> np.ndarray:
    return matrix_function_spd(M, lambda x: 1.0 / np.sqrt(x))


def check_spd(M: np.ndarray, name: str = "matrix") -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square")
    if rel_residual(M, M.T) > 1e-9:
        raise ValueError(f"{name} is not symmetric")
    lam = np.linalg.eigvalsh(_sym(M))
    if lam[0] <= 0:
        raise ValueError(f"{name} is not positive definite (min eigenvalue {lam[0]:.3e})")
    return _sym(M)


def symplectic_eigenvalues(sigma) -> np.ndarray:
    """Symplectic spectrum of a positive-definite matrix, descending."""
    s = check_spd(sigma, "covariance")
    n = n_modes(s)
    h = sqrtm_psd(s)
    K = h @ (1j * omega(n)) @ h
    ev = np.linalg.eigvalsh((K + K.conj().T) / 2)
    nu = np.sort(ev[n:])[::-1]
    if nu[-1] < 1 - get_config().tau_phys:
        warnings.warn(f"uncertainty relation violated: min symplectic eigenvalue {nu[-1]:.6g}",
                      UncertaintyWarning, stacklevel=2)
    return nu


# ---------------------------------------------------------------- antisymmetric canonical form


def _cluster(values: np.ndarray, tol: float) -> list[np.ndarray]:
    """Group indices of sorted-adjacent values closer than tol (relative to max(1,|v|))."""
    order = np.argsort(values)
    groups: list[list[int]] = []
    for i in order:
        if groups and abs(values[i] - values[groups[-1][-1]]) <= tol * max(1.0, abs(values[i])):
            groups[-1].append(int(i))
        else:
            groups.append([int(i)])
    return [np.array(g) for g in groups]


def _orthonormal_complement(B: np.ndarray, dim: int) -> np.ndarray:
    if B.shape[1] == 0:
        return np.eye(dim)
    return sla.null_space(B.T)


def _uncharged_pairs(A: np.ndarray, tol: float) -> tuple[list[tuple[np.ndarray, np.ndarray]], list[float]]:
    """Real canonical pairs of an antisymmetric A (columns in the current basis)."""
    dim = A.shape[0]
    lam, vecs = np.linalg.eigh(1j * A)
    scale = max(np.abs(lam).max(initial=0.0), 1e-300)
    pairs, coeffs = [], []
    pos = np.where(lam > tol * scale)[0]
    for k in pos[::-1]:
        v = vecs[:, k]
        x, y = v.real, v.imag
        pairs.append((np.sqrt(2.0) * y, np.sqrt(2.0) * x))
        coeffs.append(float(lam[k]))
    used = np.array([c for p in pairs for c in p]).T if pairs else np.zeros((dim, 0))
    kernel = _orthonormal_complement(used, dim)
    for j in range(0, kernel.shape[1] - 1, 2):
        pairs.append((kernel[:, j], kernel[:, j + 1]))
        coeffs.append(0.0)
    return pairs, coeffs


def _complex_frame(J: np.ndarray) -> np.ndarray:
    """Orthonormal e_1..e_k such that (e_a, J e_a) is an orthonormal basis."""
    dim = J.shape[0]
    basis: list[np.ndarray] = []
    for c in np.eye(dim):
        v = c.copy()
        for e in basis:
            v -= (e @ v) * e + ((J @ e) @ v) * (J @ e)
        nv = np.linalg.norm(v)
        if nv > 0.5:
            basis.append(v / nv)
            if 2 * len(basis) == dim:
                break
    for _ in range(2):  # second pass for numerical orthogonality
        for i, e in enumerate(basis):
            v = e.copy()
            for f in basis[:i]:
                v -= (f @ v) * f + ((J @ f) @ v) * (J @ f)
            basis[i] = v / np.linalg.norm(v)
    return np.array(basis).T


def antisym_kernel(A: np.ndarray, Q: np.ndarray | None = None, tol: float = 1e-10):
    """Orthogonal O with O A O^T = (+) a_j Omega1 and, if Q is given, O (Omega Q) O^T = (+) q_j Omega1.

    Q must be a passive charge matrix (commuting with Omega) and Omega Q must commute
    with A. Within each charged sector the sign rule assigns pairs with positive
    A-coefficient to slots of the sign dictated by Q. Returns (O, a, q).
    Slots follow the mode order of Q when Q is block diagonal, otherwise they are
    grouped by sector.
    """
    A = np.asarray(A, dtype=float)
    dim = A.shape[0]
    n = n_modes(A)
    Om = omega(n)
    if Q is None:
        Q = np.zeros((dim, dim))
    Q = np.asarray(Q, dtype=float)
    B = Om @ Q
    lamQ2, VQ = np.linalg.eigh(_sym(Q @ Q))
    absq = np.sqrt(np.clip(lamQ2, 0, None))
    groups = _cluster(absq, 1e-9)

    slot_q = _slot_charges(Q)
    slots_left = list(range(n))
    O = np.zeros((dim, dim))
    a = np.zeros(n)
    qs = np.zeros(n)
    for g in groups:
        Ps = VQ[:, g]
        qabs = float(absq[g].mean())
        As = Ps.T @ A @ Ps
        if qabs <= 1e-9 * max(1.0, absq.max(initial=0)):
            pairs, coeffs = _uncharged_pairs(As, tol)
            targets = [j for j in slots_left if abs(slot_q[j]) <= 1e-9 * max(1.0, absq.max(initial=0))]
            signs = [0.0] * len(pairs)
        else:
            J = Ps.T @ B @ Ps / qabs
            E = _complex_frame(J)
            JE = J @ E
            T = J @ As
            t = E.T @ T @ E + 1j * (JE.T @ T @ E)
            t = (t + t.conj().T) / 2
            lam, w = np.linalg.eigh(t)
            plus = [j for j in slots_left if abs(slot_q[j] - qabs) <= 1e-9 * max(1.0, qabs)]
            minus = [j for j in slots_left if abs(slot_q[j] + qabs) <= 1e-9 * max(1.0, qabs)]
            pairs, coeffs, signs = [], [], []
            for idx in range(len(lam)):
                u = E @ w[:, idx].real + JE @ w[:, idx].imag
                if idx < len(plus):
                    pairs.append((u, -J @ u))
                    coeffs.append(-float(lam[idx]))
                    signs.append(qabs)
                else:
                    pairs.append((u, J @ u))
                    coeffs.append(float(lam[idx]))
                    signs.append(-qabs)
            targets = plus + minus
            # reorder so plus slots receive the first pairs
        if len(targets) != len(pairs):
            raise InfeasibleError("charge sectors are inconsistent with the slot structure")
        for j, (u, w_), c, s in zip(targets, pairs, coeffs, signs):
            O[2 * j] = Ps @ u
            O[2 * j + 1] = Ps @ w_
            a[j] = c
            qs[j] = s
        slots_left = [j for j in slots_left if j not in targets]
    return O, a, qs


def _slot_charges(Q: np.ndarray) -> np.ndarray:
    """Per-slot charges: the mode charges if Q is block diagonal, else sorted sector charges."""
    n = n_modes(Q)
    blocks = np.array([Q[2 * j:2 * j + 2, 2 * j:2 * j + 2] for j in range(n)])
    recon = direct_sum(*blocks)
    if rel_residual(recon, Q) <= 1e-12 and all(
            rel_residual(b, b[0, 0] * np.eye(2)) <= 1e-12 for b in blocks):
        return blocks[:, 0, 0].copy()
    # general passive Q: charges are the eigenvalues of Q, each with even multiplicity
    ev = np.sort(np.linalg.eigvalsh(_sym(Q)))
    return ev[0::2]


# ---------------------------------------------------------------- decompositions


def williamson(M) -> tuple[np.ndarray, np.ndarray]:
    """Symplectic S and descending nu with S M S^T = (+) nu_j I2."""
    M = check_spd(M, "M")
    n = n_modes(M)
    Mis = inv_sqrtm(M)
    A = Mis @ omega(n) @ Mis
    O, a, _ = antisym_kernel(_antisym(A))
    nu = 1.0 / a
    order = np.argsort(-nu, kind="stable")
    idx = mode_indices(order)
    O = O[idx]
    nu = nu[order]
    S = np.kron(np.diag(np.sqrt(nu)), np.eye(2)) @ O @ Mis
    return S, nu


def _antisym(A: np.ndarray) -> np.ndarray:
    return (A - A.T) / 2


def bloch_messiah(V) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Factors (O', D, O) with V = O' D O^T, O and O' orthogonal symplectic, D = (+) diag(e^r, e^-r)."""
    V = np.asarray(V, dtype=float)
    if not is_symplectic(V, max(get_config().tau_sympl, 1e-9)):
        raise ValueError("input is not symplectic")
    n = n_modes(V)
    Om = omega(n)
    U, P = sla.polar(V)
    lam, vecs = np.linalg.eigh(_sym(P))
    big = np.where(lam > 1 + 1e-9)[0][::-1]
    cols, ds = [], []
    for k in big:
        v = vecs[:, k]
        cols += [v, -Om @ v]
        ds += [lam[k], 1.0 / lam[k]]
    one = np.where(np.abs(lam - 1) <= 1e-9)[0]
    frame: list[np.ndarray] = []
    for k in one:
        v = vecs[:, k].copy()
        for f in frame:
            v -= (f @ v) * f
        nv = np.linalg.norm(v)
        if nv > 0.5:
            v /= nv
            w = -Om @ v
            for f in frame:
                w -= (f @ w) * f
            w /= np.linalg.norm(w)
            frame += [v, w]
            cols += [v, w]
            ds += [1.0, 1.0]
    if len(cols) != 2 * n:
        raise InfeasibleError("spectrum of the positive polar factor is not symplectic")
    O = np.array(cols).T
    D = np.diag(ds)
    return U @ O, D, O
