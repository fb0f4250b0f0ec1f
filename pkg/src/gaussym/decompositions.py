"""Charge-aware decompositions: extended Williamson, conserved quantities,
interconversion of invariant states and completion of partial intertwiners."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import linalg as sla

from .config import get_config
from .gaussian_channels import GaussianUnitary
from .gaussian_states import GaussianState, is_pure
from .phase_space_core import (
    InfeasibleError, _cluster, _complex_frame, antisym_kernel, check_spd, inv_sqrtm,
    matrix_function_spd, mode_indices, n_modes, omega, rel_residual, symplectic_inverse,
    symplectic_residual, williamson,
)
from .representations import (
    SymmetryRep, constraint_ops, intertwiner_residual, is_invariant_state,
    is_invariant_unitary, probe_matrices, with_conjugator,
)


def _comm_residual(A: np.ndarray, B: np.ndarray) -> float:
    return float(np.linalg.norm(A @ B - B @ A) / max(np.linalg.norm(A) * np.linalg.norm(B), 1e-300))


def _check_passive_charge(Q: np.ndarray, tol: float) -> float:
    r = _comm_residual(Q, omega(n_modes(Q))) if np.linalg.norm(Q) > 0 else 0.0
    if r > tol:
        raise InfeasibleError(f"charge matrix does not commute with the symplectic form (residual {r:.3e})")
    return r


def antisym_canonical(A: np.ndarray, commuting_charges: np.ndarray | None = None):
    """Orthogonal O and pair coefficients a with O A O^T = (+) a_j Omega1.

    With a passive charge matrix Q, O also brings Omega Q to (+) q_j Omega1 and the
    sign rule makes every a_j positive whenever the charge sectors allow it.
    Returns (O, a, q).
    """
    A = np.asarray(A, dtype=float)
    tol = get_config().tau_sympl
    if rel_residual(A, -A.T) > tol:
        raise ValueError("matrix is not antisymmetric")
    if commuting_charges is not None:
        Q = np.asarray(commuting_charges, dtype=float)
        _check_passive_charge(Q, tol)
        B = omega(n_modes(Q)) @ Q
        r = _comm_residual(A, B) if np.linalg.norm(B) > 0 else 0.0
        if r > tol:
            raise InfeasibleError(f"antisymmetric matrix does not commute with the charge (residual {r:.3e})")
    else:
        Q = None
    return antisym_kernel((A - A.T) / 2, Q)


@dataclass(frozen=True, eq=False)
class ExtendedWilliamsonResult:
    S: np.ndarray
    nu: np.ndarray
    q: np.ndarray
    residual_M: float
    residual_Q: float

    def to_json(self) -> dict:
        return {"S": self.S.tolist(), "nu": self.nu.tolist(), "q": self.q.tolist(),
                "residuals": {"M": self.residual_M, "Q": self.residual_Q,
                              "symplectic": symplectic_residual(self.S)}}


def extended_williamson(M: np.ndarray, Q: np.ndarray) -> ExtendedWilliamsonResult:
    """Symplectic S with S M S^T = (+) nu_j I2 and S Q S^T = (+) q_j I2."""
    M = check_spd(M, "M")
    Q = np.asarray(Q, dtype=float)
    tol = get_config().tau_sympl
    n = n_modes(M)
    Om = omega(n)
    _check_passive_charge(Q, tol)
    B = Om @ Q
    r = _comm_residual(Om @ M, B) if np.linalg.norm(B) > 0 else 0.0
    if r > tol:
        raise InfeasibleError(f"[Omega M, Omega Q] does not vanish (residual {r:.3e})")
    Mis = inv_sqrtm(M)
    A = Mis @ Om @ Mis
    O, a, q = antisym_kernel((A - A.T) / 2, Q)
    if np.any(a <= 0):
        raise InfeasibleError("sign rule failed: a canonical coefficient is not positive")
    nu = 1.0 / a
    S = np.kron(np.diag(np.sqrt(nu)), np.eye(2)) @ O @ Mis
    D = np.kron(np.diag(nu), np.eye(2))
    Qd = np.kron(np.diag(q), np.eye(2))
    res_m = float(np.linalg.norm(S @ M @ S.T - D) / np.linalg.norm(M))
    res_q = float(np.linalg.norm(S @ Q @ S.T - Qd) / max(np.linalg.norm(Q), 1.0))
    return ExtendedWilliamsonResult(S, nu, q, res_m, res_q)


# ---------------------------------------------------------------- conservation laws


class SectorData(NamedTuple):
    q_abs: float
    values: np.ndarray
    traces: list


def charge_sectors(Q: np.ndarray) -> list[tuple[float, np.ndarray]]:
    """(|q|, orthonormal basis) for each eigenspace of Q^2, ascending |q|."""
    lam, V = np.linalg.eigh((Q @ Q + (Q @ Q).T) / 2)
    absq = np.sqrt(np.clip(lam, 0, None))
    out = []
    for g in _cluster(absq, 1e-9):
        out.append((float(absq[g].mean()), V[:, g]))
    out.sort(key=lambda t: t[0])
    return out


def conserved_tuple(sigma: np.ndarray, Q: np.ndarray, k_max: int = 2) -> list[SectorData]:
    """Per-|q| data preserved by every charge-commuting symplectic congruence.

    Charged sectors: eigenvalues of sigma (Pi_q - Pi_-q) and the traces of its powers.
    Uncharged sector: symplectic eigenvalues of sigma restricted to it.
    """
    sigma = np.asarray(sigma, dtype=float)
    Q = np.asarray(Q, dtype=float)
    _check_passive_charge(Q, get_config().tau_sympl)
    Om = omega(n_modes(Q))
    qmax = max(np.abs(np.linalg.eigvalsh((Q + Q.T) / 2)).max(), 1.0)
    out = []
    for qa, P in charge_sectors(Q):
        s = P.T @ sigma @ P
        if qa <= 1e-9 * qmax:
            w = P.T @ Om @ P
            ev = np.linalg.eigvals(1j * w @ s)
            vals = np.sort(np.abs(ev.real))[::-1][0::2]
            out.append(SectorData(0.0, vals, []))
            continue
        K = s @ (P.T @ Q @ P) / qa
        vals = np.sort(np.linalg.eigvals(K).real)
        traces = [float(np.trace(np.linalg.matrix_power(K, k))) for k in range(1, k_max + 1)]
        out.append(SectorData(qa, vals, traces))
    return out


def _tuples_match(t1: list[SectorData], t2: list[SectorData], tol: float) -> tuple[bool, float]:
    if len(t1) != len(t2):
        return False, float("inf")
    worst = 0.0
    for a, b in zip(t1, t2):
        if abs(a.q_abs - b.q_abs) > 1e-9 * max(1.0, a.q_abs) or a.values.size != b.values.size:
            return False, float("inf")
        if a.values.size:
            worst = max(worst, float(np.max(np.abs(np.sort(a.values) - np.sort(b.values)))))
    return worst <= tol, worst


@dataclass(frozen=True, eq=False)
class InterconversionCertificate:
    feasible: bool
    sector_data: dict
    S: np.ndarray | None = None
    residuals: dict = field(default_factory=dict)
    mismatch: float = 0.0

    def to_json(self) -> dict:
        return {"feasible": self.feasible, "sector_data": self.sector_data,
                "S": None if self.S is None else self.S.tolist(),
                "residuals": self.residuals, "mismatch": self.mismatch}


def _sector_json(t: list[SectorData]) -> list[dict]:
    return [{"q_abs": s.q_abs, "values": s.values.tolist(), "traces": s.traces} for s in t]


def interconvert(sigma1: np.ndarray, sigma2: np.ndarray, Q: np.ndarray,
                 tol: float = 1e-7) -> InterconversionCertificate:
    """Decide whether a charge-preserving symplectic S maps sigma1 to sigma2, and build it."""
    sigma1, sigma2 = check_spd(sigma1, "sigma1"), check_spd(sigma2, "sigma2")
    Q = np.asarray(Q, dtype=float)
    ctol = get_config().tau_sympl
    _check_passive_charge(Q, ctol)
    B = omega(n_modes(Q)) @ Q
    if np.linalg.norm(B) > 0:
        for name, s in (("sigma1", sigma1), ("sigma2", sigma2)):
            r = _comm_residual(s, B)
            if r > ctol:
                raise InfeasibleError(f"{name} does not commute with Omega Q (residual {r:.3e})")
    t1, t2 = conserved_tuple(sigma1, Q), conserved_tuple(sigma2, Q)
    ok, worst = _tuples_match(t1, t2, tol)
    data = {"first": _sector_json(t1), "second": _sector_json(t2)}
    if not ok:
        return InterconversionCertificate(False, data, None, {}, worst)
    e1, e2 = extended_williamson(sigma1, Q), extended_williamson(sigma2, Q)
    n = n_modes(Q)
    perm = np.empty(n, dtype=int)
    for qv in np.unique(np.round(e1.q, 9)):
        s1 = np.where(np.abs(e1.q - qv) <= 1e-8 * max(1, abs(qv)))[0]
        s2 = np.where(np.abs(e2.q - qv) <= 1e-8 * max(1, abs(qv)))[0]
        if s1.size != s2.size:
            return InterconversionCertificate(False, data, None, {}, float("inf"))
        o1 = s1[np.argsort(e1.nu[s1], kind="stable")]
        o2 = s2[np.argsort(e2.nu[s2], kind="stable")]
        perm[o2] = o1
    P = np.eye(2 * n)[mode_indices(perm)]
    S = symplectic_inverse(e2.S) @ P @ e1.S
    res = {"sigma": rel_residual(S @ sigma1 @ S.T, sigma2), "Q": rel_residual(S @ Q @ S.T, Q),
           "symplectic": symplectic_residual(S)}
    if max(res.values()) > 1e-8:
        raise InfeasibleError(f"conserved data match but construction failed: {res}")
    return InterconversionCertificate(True, data, S, res, worst)


# ---------------------------------------------------------------- pure states


def pure_interconversion_unitary(state1: GaussianState, state2: GaussianState,
                                 rep: SymmetryRep) -> GaussianUnitary:
    """Invariant Gaussian unitary mapping one pure invariant state onto another."""
    for name, st in (("first", state1), ("second", state2)):
        if not is_pure(st):
            raise InfeasibleError(f"{name} state is not pure")
        chk = is_invariant_state(rep, st.d, st.sigma)
        if not chk:
            raise InfeasibleError(f"{name} state is not invariant (residual {chk.residual:.3e})")
    R = rep.R
    Ri = symplectic_inverse(R)
    s1 = Ri @ state1.sigma @ Ri.T
    s2 = Ri @ state2.sigma @ Ri.T
    V = R @ matrix_function_spd(s2, np.sqrt) @ matrix_function_spd(s1, lambda x: 1 / np.sqrt(x)) @ Ri
    xi = state2.d - V @ state1.d
    return GaussianUnitary(V, xi)


# ---------------------------------------------------------------- intertwiner completion


def _orth(F: np.ndarray) -> np.ndarray:
    return sla.orth(F, rcond=1e-10)


def _symplectic_frame(C: np.ndarray, Om: np.ndarray) -> np.ndarray:
    """Basis E of span(C) with E^T Omega E = Omega_m, E = C |w|^-1/2 U."""
    if C.shape[1] == 0:
        return C
    w = C.T @ Om @ C
    w = (w - w.T) / 2
    absw = matrix_function_spd(-w @ w, np.sqrt)
    J = w @ np.linalg.inv(absw)
    e = _complex_frame(J)
    U = np.empty((C.shape[1], C.shape[1]))
    U[:, 0::2] = e
    U[:, 1::2] = -J @ e
    return C @ matrix_function_spd(absw, lambda x: 1 / np.sqrt(x)) @ U


def complete_intertwiner(V_partial: np.ndarray, domain: np.ndarray, rep: SymmetryRep,
                         seed: int = 0) -> np.ndarray:
    """Extend a form-preserving intertwiner defined on an invariant symplectic subspace.

    ``domain`` holds a basis of the subspace as columns; the partial map sends it to
    ``V_partial @ domain``. Returns a symplectic W commuting with the representation.
    """
    V_partial = np.asarray(V_partial, dtype=float)
    domain = np.atleast_2d(np.asarray(domain, dtype=float))
    tol = get_config().tau_inv
    n = rep.n
    Om = omega(n)
    R = rep.R
    Ri = symplectic_inverse(R)
    passive = with_conjugator(rep, None)
    Fin = Ri @ domain
    Fout = Ri @ V_partial @ domain
    if Fin.shape[1] == 0:
        raise InfeasibleError("empty domain")
    Pin = _orth(Fin)
    Cc = np.linalg.lstsq(Pin, Fin, rcond=None)[0]
    G = Fout @ np.linalg.pinv(Cc)
    if Pin.shape[1] != Fin.shape[1]:
        raise InfeasibleError("domain basis is rank deficient")
    win = Pin.T @ Om @ Pin
    if np.linalg.matrix_rank(win, tol=1e-10) != win.shape[0]:
        raise InfeasibleError("domain is not a symplectic subspace")
    form_res = rel_residual(G.T @ Om @ G, win)
    inv_res, int_res = 0.0, 0.0
    for S in probe_matrices(passive):
        inv_res = max(inv_res, float(np.linalg.norm(S @ Pin - Pin @ (Pin.T @ S @ Pin))))
        int_res = max(int_res, float(np.linalg.norm(S @ G - G @ (Pin.T @ S @ Pin)) / max(np.linalg.norm(G), 1)))
    worst = max(form_res, inv_res, int_res)
    if worst > tol:
        raise InfeasibleError(f"partial map violates the completion hypotheses "
                              f"(form {form_res:.3e}, invariance {inv_res:.3e}, intertwining {int_res:.3e})")
    if Pin.shape[1] == 2 * n:
        W = R @ G @ Pin.T @ Ri
        return W
    Cin = sla.null_space(Pin.T @ Om)
    Cout = sla.null_space(G.T @ Om)
    Ein = _symplectic_frame(Cin, Om)
    Eout = _symplectic_frame(Cout, Om)
    X = _intertwiner_between(Ein, Eout, passive, seed)
    if X is None:
        raise InfeasibleError("no symplectic intertwiner between the complementary subspaces")
    left = np.hstack([G, Eout @ X])
    right = np.hstack([Pin, Ein])
    W0 = left @ np.linalg.inv(right)
    W = R @ W0 @ Ri
    res = max(symplectic_residual(W), intertwiner_residual(rep, rep, W))
    if res > tol:
        raise InfeasibleError(f"completion failed certification (residual {res:.3e})")
    return W


def _intertwiner_between(Ein: np.ndarray, Eout: np.ndarray, passive: SymmetryRep, seed: int):
    """Orthogonal symplectic X with X r_in(g) = r_out(g) X, or None."""
    m = Ein.shape[1]
    Om_m = omega(m // 2)
    Ein_inv = np.linalg.pinv(Ein)
    Eout_inv = np.linalg.pinv(Eout)
    pairs = []
    for kind, L in constraint_ops(passive):
        pairs.append((Ein_inv @ L @ Ein, Eout_inv @ L @ Eout))
    pairs.append((Om_m, Om_m))
    rows = [np.kron(b, np.eye(m)) - np.kron(np.eye(m), a.T) for a, b in pairs]
    N = sla.null_space(np.vstack(rows), rcond=1e-9)
    if N.shape[1] == 0:
        return None
    rng = np.random.default_rng(seed)
    Xq = (N @ rng.normal(size=N.shape[1])).reshape(m, m)
    if np.linalg.cond(Xq) > 1e10:
        return None
    U, _ = sla.polar(Xq)
    return U
