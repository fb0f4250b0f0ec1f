"""Covariant Gaussian Stinespring dilations built from invariant purifications.

Mode order of every dilation is (A, B, Bbar): input, output, and the extra ancilla
mode carrying the conjugate representation. The ancilla state lives on (B, Bbar).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg as sla

from .config import get_config
from .decompositions import _symplectic_frame, complete_intertwiner
from .gaussian_channels import (
    GaussianChannel, GaussianUnitary, amplifier, apply, attenuator, entangler,
    phase_covariant, v_2sq, v_bs,
)
from .gaussian_states import GaussianState, is_pure, partial_trace, tensor, transform
from .phase_space_core import (
    DomainError, InfeasibleError, direct_sum, embed, matrix_function_spd, mode_indices,
    omega, rel_residual, symplectic_inverse, williamson, zeta,
)
from .representations import (
    SymmetryRep, conjugate_rep, direct_sum_rep, intertwiner_residual, is_invariant_state, u1,
    with_conjugator,
)


@dataclass(frozen=True, eq=False)
class CircuitStage:
    name: str
    matrix: np.ndarray
    antisymplectic: bool = False

    def to_json(self) -> dict:
        return {"name": self.name, "matrix": self.matrix.tolist(), "antisymplectic": self.antisymplectic}


@dataclass(frozen=True, eq=False)
class DilationResult:
    V: GaussianUnitary
    ancilla_state: GaussianState
    reps: tuple
    residual: float
    channel: GaussianChannel
    n_in: int
    n_out: int
    invariance_residual: float = 0.0
    stages: list = field(default_factory=list)

    @property
    def n_ancilla(self) -> int:
        return self.ancilla_state.n

    def reconstructed_channel(self) -> GaussianChannel:
        return channel_from_dilation(self.V, self.ancilla_state, self.n_in, self.n_out)

    def to_json(self) -> dict:
        return {"V": self.V.to_json(), "ancilla_state": self.ancilla_state.to_json(),
                "reps": [r.to_json() for r in self.reps], "residual": self.residual,
                "invariance_residual": self.invariance_residual,
                "channel": self.channel.to_json(), "n_in": self.n_in, "n_out": self.n_out,
                "n_ancilla": self.n_ancilla, "stages": [s.to_json() for s in self.stages]}


# ---------------------------------------------------------------- purification


def _sqrt_factors(sigma: np.ndarray):
    """V, D with sigma = V D V^T and the square roots of -s O s O - I and -O s O s - I."""
    S, nu = williamson(sigma)
    if nu[-1] < 1 - 1e-9:
        raise DomainError(f"symplectic eigenvalue {nu[-1]:.6g} < 1: not a valid covariance")
    V = symplectic_inverse(S)
    root = np.kron(np.diag(np.sqrt(np.clip(nu ** 2 - 1, 0, None))), np.eye(2))
    left = V @ root @ S          # sqrt(-sigma Omega sigma Omega - I)
    right = S.T @ root @ V.T     # sqrt(-Omega sigma Omega sigma - I)
    return V, nu, left, right


def _require_invariant(state: GaussianState, rep: SymmetryRep) -> None:
    chk = is_invariant_state(rep, state.d, state.sigma)
    if not chk:
        raise InfeasibleError(f"state is not invariant (residual {chk.residual:.3e})")


def invariant_purification(state: GaussianState, rep: SymmetryRep) -> GaussianState:
    """Pure state on (A, Abar) invariant under rep (+) conjugate(rep)."""
    _require_invariant(state, rep)
    n = state.n
    sigma = state.sigma
    Om, Z = omega(n), zeta(n)
    _, _, left, right = _sqrt_factors(sigma)
    top = np.hstack([sigma, -left @ Om @ Z])
    bottom = np.hstack([Z @ Om @ right, Z @ sigma @ Z])
    full = np.vstack([top, bottom])
    return GaussianState(np.concatenate([state.d, np.zeros(2 * n)]), (full + full.T) / 2)


def purification_circuit(state: GaussianState, rep: SymmetryRep | None = None) -> list[CircuitStage]:
    """Entangler, then V (+) V Omega Z, then the reflection Z on the purifying modes.

    The last two stages are each antisymplectic on the purifying modes; their product is symplectic.
    """
    if rep is not None:
        _require_invariant(state, rep)
    n = state.n
    V, nu, _, _ = _sqrt_factors(state.sigma)
    r = 0.5 * np.arccosh(np.clip(nu, 1, None))
    ent = entangler(np.diag(r)).V
    Om, Z = omega(n), zeta(n)
    return [CircuitStage("entangler", ent),
            CircuitStage("normal_modes", direct_sum(V, V @ Om @ Z), True),
            CircuitStage("reflect", direct_sum(np.eye(2 * n), Z), True)]


def compose_stages(stages: list[CircuitStage]) -> np.ndarray:
    M = np.eye(stages[0].matrix.shape[0])
    for st in stages:
        M = st.matrix @ M
    return M


# ---------------------------------------------------------------- purification equivalence


def _reorder(state: GaussianState, order: list[int]) -> GaussianState:
    idx = mode_indices(order)
    return GaussianState(state.d[idx], state.sigma[np.ix_(idx, idx)])


def purification_equivalence_unitary(purif1: GaussianState, purif2: GaussianState, rep_B: SymmetryRep,
                                     B_modes: list[int], seed: int = 0) -> GaussianUnitary:
    """Invariant Gaussian unitary U on the modes ``B_modes`` with (I (x) U) purif1 = purif2."""
    tol = 1e-7
    n = purif1.n
    B = list(B_modes)
    A = [m for m in range(n) if m not in B]
    if rep_B.n != len(B):
        raise ValueError("representation size does not match the mode set")
    for name, p in (("first", purif1), ("second", purif2)):
        if not is_pure(p, 1e-7):
            raise InfeasibleError(f"{name} purification is not pure")
    iA, iB = mode_indices(A), mode_indices(B)
    redA = max(rel_residual(purif1.sigma[np.ix_(iA, iA)], purif2.sigma[np.ix_(iA, iA)]),
               rel_residual(purif1.d[iA], purif2.d[iA])) if A else 0.0
    if redA > tol:
        raise InfeasibleError(f"reduced states outside the mode set differ (residual {redA:.3e})")
    nB = len(B)
    Om = omega(nB)
    R = rep_B.R
    Ri = symplectic_inverse(R)
    s1_BA = purif1.sigma[np.ix_(iB, iA)]
    s2_BA = purif2.sigma[np.ix_(iB, iA)]
    # correlated subspace: intertwiner read off the cross-covariances, then completed
    W = np.eye(2 * nB)
    if A and np.linalg.norm(s1_BA) > 1e-12:
        dom = sla.orth(s1_BA, rcond=1e-9)
        Wc = s2_BA @ np.linalg.pinv(s1_BA, rcond=1e-9)
        if dom.shape[1] == 2 * nB:
            W = Wc
        else:
            W = complete_intertwiner(Wc, dom, rep_B, seed=seed)
    # uncorrelated complement: pure-state interconversion in a frame where the rep is orthogonal
    s1_BB = W @ purif1.sigma[np.ix_(iB, iB)] @ W.T
    s2_BB = purif2.sigma[np.ix_(iB, iB)]
    t1 = Ri @ s1_BB @ Ri.T
    t2 = Ri @ s2_BB @ Ri.T
    K = sla.orth(Ri @ s2_BA, rcond=1e-9) if A and np.linalg.norm(s2_BA) > 1e-12 else np.zeros((2 * nB, 0))
    C = sla.null_space(K.T @ Om) if K.shape[1] else np.eye(2 * nB)
    N = np.eye(2 * nB)
    if C.shape[1]:
        EK = _symplectic_frame(K, Om) if K.shape[1] else K
        EC = _symplectic_frame(sla.orth(C), Om)
        T = np.hstack([EK, EC])
        Ti = np.linalg.inv(T)
        k = EK.shape[1]
        c1 = (Ti @ t1 @ Ti.T)[k:, k:]
        c2 = (Ti @ t2 @ Ti.T)[k:, k:]
        Nc = matrix_function_spd(c2, np.sqrt) @ matrix_function_spd(c1, lambda x: 1 / np.sqrt(x))
        N = R @ T @ direct_sum(np.eye(k), Nc) @ Ti @ Ri
    Vb = N @ W
    xi = purif2.d[iB] - Vb @ purif1.d[iB]
    U = GaussianUnitary(Vb, xi)
    full = embed(Vb, B, n)
    xfull = np.zeros(2 * n)
    xfull[iB] = xi
    out = transform(purif1, full, xfull)
    res = max(rel_residual(out.sigma, purif2.sigma), rel_residual(out.d, purif2.d))
    inv = intertwiner_residual(rep_B, rep_B, Vb)
    if res > tol or inv > 1e-7:
        raise InfeasibleError(f"equivalence unitary failed certification (state {res:.3e}, invariance {inv:.3e})")
    return U


# ---------------------------------------------------------------- dilations


def channel_from_dilation(V: GaussianUnitary, ancilla: GaussianState, n_in: int, n_out: int) -> GaussianChannel:
    """(X, Y, xi) of rho -> tr_{A Bbar}[V (rho (x) ancilla) V^dagger] read off the blocks of V."""
    iA = mode_indices(range(n_in))
    iB = mode_indices(range(n_in, n_in + n_out))
    ianc = mode_indices(range(n_in, V.n))
    M = V.V
    X = M[np.ix_(iB, iA)]
    Ma = M[np.ix_(iB, ianc)]
    Y = Ma @ ancilla.sigma @ Ma.T
    xi = V.xi[iB] + Ma @ ancilla.d
    return GaussianChannel(X, Y, xi)


def certify_dilation(V: GaussianUnitary, ancilla: GaussianState, channel: GaussianChannel,
                     n_probes: int = 20, seed: int = 0) -> float:
    """Worst relative moment mismatch between dilated and direct action on random inputs."""
    from .sampling import random_state
    n_in, n_out = channel.n_in, channel.n_out
    rng = np.random.default_rng(seed)
    rec = channel_from_dilation(V, ancilla, n_in, n_out)
    worst = max(rel_residual(rec.X, channel.X), rel_residual(rec.Y, channel.Y), rel_residual(rec.xi, channel.xi))
    for _ in range(n_probes):
        rho = random_state(n_in, rng)
        big = transform(tensor(rho, ancilla), V.V, V.xi)
        out = partial_trace(big, list(range(n_in, n_in + n_out)))
        ref = apply(channel, rho)
        worst = max(worst, rel_residual(out.sigma, ref.sigma), rel_residual(out.d, ref.d))
    return float(worst)


def _dilation_reps(rep_in: SymmetryRep, rep_out: SymmetryRep):
    return rep_in, rep_out, conjugate_rep(rep_out)


def _pure_invariant(rep: SymmetryRep) -> GaussianState:
    R = rep.R
    return GaussianState(np.zeros(rep.dim), R @ R.T)


def covariant_stinespring(channel: GaussianChannel, rep_in: SymmetryRep, rep_out: SymmetryRep,
                          seed: int | None = None, n_probes: int = 20) -> DilationResult:
    """Purify-then-decouple construction of an invariant dilation unitary."""
    from .representations import covariance_residual
    cfg = get_config()
    seed = cfg.seed if seed is None else seed
    cov = covariance_residual(rep_in, rep_out, channel)
    if cov > cfg.tau_inv * 100:
        raise InfeasibleError(f"channel is not covariant (residual {cov:.3e})")
    n_in, n_out = channel.n_in, channel.n_out
    RA = rep_in.R
    # invariant full-rank seed: thermal nbar = 1 in the passive frame
    seedA = GaussianState(np.zeros(2 * n_in), 3 * RA @ RA.T)
    psi = invariant_purification(seedA, rep_in)                       # modes (A, Abar)
    iA = mode_indices(range(n_in))
    iAb = mode_indices(range(n_in, 2 * n_in))
    sig = psi.sigma
    X, Y = channel.X, channel.Y
    # tau on (B, Abar)
    tau_s = np.block([[X @ sig[np.ix_(iA, iA)] @ X.T + Y, X @ sig[np.ix_(iA, iAb)]],
                      [sig[np.ix_(iAb, iA)] @ X.T, sig[np.ix_(iAb, iAb)]]])
    tau = GaussianState(np.concatenate([channel.xi, np.zeros(2 * n_in)]), (tau_s + tau_s.T) / 2)
    rep_tau = direct_sum_rep(rep_out, conjugate_rep(rep_in))
    purif2 = invariant_purification(tau, rep_tau)                     # (B, Abar, Bbar, A)
    nB = n_out
    order2 = ([2 * nB + n_in + k for k in range(n_in)] + list(range(nB))
              + [nB + n_in + k for k in range(nB)] + [nB + k for k in range(n_in)])
    purif2 = _reorder(purif2, order2)                                 # (A, B, Bbar, Abar)
    rA, rB, rBb = _dilation_reps(rep_in, rep_out)
    anc = tensor(_pure_invariant(rB), _pure_invariant(rBb))
    purif1 = _reorder(tensor(psi, anc), list(range(n_in)) + [2 * n_in + k for k in range(2 * nB)]
                      + [n_in + k for k in range(n_in)])              # (A, B, Bbar, Abar)
    rep_big = direct_sum_rep(rA, rB, rBb)
    U = purification_equivalence_unitary(purif1, purif2, rep_big, list(range(n_in + 2 * nB)), seed=seed)
    residual = certify_dilation(U, anc, channel, n_probes, seed)
    inv = intertwiner_residual(rep_big, rep_big, U.V)
    return DilationResult(U, anc, (rA, rB, rBb), residual, channel, n_in, n_out, inv,
                          [CircuitStage("dilation", U.V)])


def _on(M: np.ndarray, modes: list[int], n: int = 3) -> np.ndarray:
    return embed(M, modes, n)


def one_mode_dilation(kind: str, alpha: float, nbar: float = 0.0, alpha_loss: float | None = None,
                      rep: SymmetryRep | None = None, n_probes: int = 20, seed: int = 0) -> DilationResult:
    """Closed-form dilations of the one-mode attenuator, amplifier and phase-covariant channel.

    Modes (A, B, Bbar), ancilla vacuum on (B, Bbar). Beam splitters act on the ordered pair
    (B, A) so the transmitted amplitude carries a positive sign.
    """
    rep = u1([1]) if rep is None else rep
    if nbar < 0:
        raise ValueError("nbar must be non-negative")
    A, B, Bb = 0, 1, 2
    r = 0.5 * np.arccosh(2 * nbar + 1)
    if kind == "attenuator":
        stages = [("two_mode_squeezer_BBbar", _on(v_2sq(r), [B, Bb])),
                  ("beam_splitter_BA", _on(v_bs(-alpha + np.pi / 2), [B, A]))]
        target = attenuator(alpha, nbar)
    elif kind == "amplifier":
        stages = [("two_mode_squeezer_BBbar", _on(v_2sq(r), [B, Bb])),
                  ("beam_splitter_BA", _on(v_bs(np.pi / 2), [B, A])),
                  ("amplifying_squeezer_BBbar", _on(v_2sq(alpha), [B, Bb]))]
        target = amplifier(alpha, nbar)
    elif kind == "phase_covariant":
        if alpha_loss is None:
            raise ValueError("phase_covariant needs alpha_loss")
        # the intermediate loss output is identified with B, so no relabelling swap is needed
        stages = [("loss_beam_splitter_BA", _on(v_bs(-alpha_loss + np.pi / 2), [B, A])),
                  ("amplifying_squeezer_BBbar", _on(v_2sq(alpha), [B, Bb]))]
        target = phase_covariant(alpha, alpha_loss)
    else:
        raise ValueError(f"unknown one-mode channel {kind!r}")
    M = np.eye(6)
    for _, S in stages:
        M = S @ M
    U = GaussianUnitary(M)
    anc = GaussianState(np.zeros(4), np.eye(4))
    rA, rB, rBb = _dilation_reps(with_conjugator(rep, None), with_conjugator(rep, None))
    rep_big = direct_sum_rep(rA, rB, rBb)
    residual = certify_dilation(U, anc, target, n_probes, seed)
    inv = intertwiner_residual(rep_big, rep_big, M)
    return DilationResult(U, anc, (rA, rB, rBb), residual, target, 1, 1, inv,
                          [CircuitStage(name, S) for name, S in stages])


def fock_crosscheck(result: DilationResult, state: GaussianState, cutoff: int = 30) -> float:
    """Max moment mismatch between the Fock-space dilated evolution and the phase-space output.

    Ancilla modes left untouched by V (and in vacuum) are dropped before going to Fock space.
    """
    from . import fock_oracle as fo
    M = result.V.V
    n = result.V.n
    active = []
    for m in range(n):
        im = mode_indices([m])
        others = [k for k in range(n) if k != m]
        io = mode_indices(others)
        coupled = (np.linalg.norm(M[np.ix_(im, io)]) + np.linalg.norm(M[np.ix_(io, im)]) > 1e-12
                   or np.linalg.norm(M[np.ix_(im, im)] - np.eye(2)) > 1e-12)
        if m < result.n_in or m < result.n_in + result.n_out or coupled:
            active.append(m)
    if len(active) > 2:
        raise ValueError("Fock cross-check supports at most two active modes")
    ia = mode_indices(active)
    Va = M[np.ix_(ia, ia)]
    anc_idx = [m - result.n_in for m in active if m >= result.n_in]
    anc = partial_trace(result.ancilla_state, anc_idx)
    joint = tensor(state, anc)
    fs = fo.gaussian_to_fock(joint, cutoff)
    out = fo.fock_apply_gaussian(fs, Va, result.V.xi[ia])
    keep = [active.index(m) for m in range(result.n_in, result.n_in + result.n_out)]
    d, s = fo.extract_moments(fo.partial_trace_fock(out, keep))
    ref = apply(result.channel, state)
    return float(max(np.abs(d - ref.d).max(), np.abs(s - ref.sigma).max()))
