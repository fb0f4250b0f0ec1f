"""Symplectic symmetry representations and invariance / covariance predicates."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np
from scipy import linalg as sla

from .config import get_config
from .phase_space_core import (
    InfeasibleError, check_spd, convert_basis, is_orthogonal_symplectic, omega,
    realify, rel_residual, sqrtm_psd, symplectic_inverse, williamson, zeta,
)

GOLDEN = (1 + 5 ** 0.5) / 2
PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


class UnsupportedFeatureError(NotImplementedError):
    """The requested operation is not implemented for this representation kind."""


class CheckResult(NamedTuple):
    ok: bool
    residual: float

    def __bool__(self) -> bool:
        return bool(self.ok)


@dataclass(frozen=True, eq=False)
class SymmetryRep:
    """Symplectic representation S(g) = R S0(g) R^-1 on ``n`` modes.

    kind ``U1``: ``charges`` per mode. kind ``SU2``: ``pairs`` of modes carrying the
    Schwinger doublet, ``flags`` marking conjugated pairs; unpaired modes are inert.
    kind ``finite``: explicit symplectic ``generators``.
    """

    kind: str
    n: int
    charges: tuple = ()
    pairs: tuple = ()
    flags: tuple = ()
    generators: tuple = ()
    conjugator: np.ndarray | None = field(default=None)

    def __post_init__(self) -> None:
        if self.kind not in ("U1", "SU2", "finite"):
            raise ValueError(f"unknown representation kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("representation needs at least one mode")
        if self.kind == "U1" and len(self.charges) != self.n:
            raise ValueError("one charge per mode required")
        if self.kind == "SU2":
            used = [m for p in self.pairs for m in p]
            if len(set(used)) != len(used) or any(m < 0 or m >= self.n for m in used):
                raise ValueError("SU2 pairs must be disjoint modes within range")
            if len(self.flags) != len(self.pairs):
                object.__setattr__(self, "flags", tuple(False for _ in self.pairs))
        if self.kind == "finite":
            if not self.generators:
                raise ValueError("finite representation needs generators")
            for g in self.generators:
                if np.shape(g) != (2 * self.n, 2 * self.n):
                    raise ValueError("generator dimension mismatch")
        if self.conjugator is not None and np.shape(self.conjugator) != (2 * self.n, 2 * self.n):
            raise ValueError("conjugator dimension mismatch")

    @property
    def dim(self) -> int:
        return 2 * self.n

    @property
    def R(self) -> np.ndarray:
        return np.eye(self.dim) if self.conjugator is None else np.asarray(self.conjugator)

    @property
    def is_passive(self) -> bool:
        return self.conjugator is None or is_orthogonal_symplectic(self.conjugator)

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "n": self.n}
        if self.kind == "U1":
            out["charges"] = [float(q) for q in self.charges]
        elif self.kind == "SU2":
            out["pairs"] = [list(p) for p in self.pairs]
            out["flags"] = [bool(f) for f in self.flags]
        else:
            out["generators"] = [np.asarray(g).tolist() for g in self.generators]
        if self.conjugator is not None:
            out["conjugator"] = np.asarray(self.conjugator).tolist()
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "SymmetryRep":
        kind = obj["kind"]
        conj = obj.get("conjugator")
        conj = None if conj is None else np.asarray(conj, dtype=float)
        if kind == "U1":
            charges = tuple(float(q) for q in obj["charges"])
            return cls("U1", len(charges), charges=charges, conjugator=conj)
        if kind == "SU2":
            pairs = tuple(tuple(int(m) for m in p) for p in obj["pairs"])
            n = int(obj.get("n", 2 * len(pairs)))
            return cls("SU2", n, pairs=pairs, flags=tuple(obj.get("flags", ())), conjugator=conj)
        gens = tuple(np.asarray(g, dtype=float) for g in obj["generators"])
        return cls("finite", gens[0].shape[0] // 2, generators=gens, conjugator=conj)


def u1(charges: Sequence[float], conjugator: np.ndarray | None = None) -> SymmetryRep:
    charges = tuple(float(q) for q in charges)
    return SymmetryRep("U1", len(charges), charges=charges, conjugator=conjugator)


def su2_schwinger(pairs: Sequence[Sequence[int]], n: int | None = None,
                  conjugator: np.ndarray | None = None) -> SymmetryRep:
    pairs = tuple(tuple(int(m) for m in p) for p in pairs)
    n = n if n is not None else 2 * len(pairs)
    return SymmetryRep("SU2", n, pairs=pairs, conjugator=conjugator)


def finite_rep(generators: Sequence[np.ndarray], conjugator: np.ndarray | None = None) -> SymmetryRep:
    gens = tuple(np.asarray(g, dtype=float) for g in generators)
    return SymmetryRep("finite", gens[0].shape[0] // 2, generators=gens, conjugator=conjugator)


def with_conjugator(rep: SymmetryRep, R: np.ndarray | None) -> SymmetryRep:
    return replace(rep, conjugator=None if R is None else np.asarray(R, dtype=float))


# ---------------------------------------------------------------- group elements


def su2_matrix(euler: Sequence[float]) -> np.ndarray:
    """U = Rz(a1) Ry(a2) Rz(a3) in SU(2)."""
    a1, a2, a3 = euler

    def rz(a):
        return np.diag([np.exp(-0.5j * a), np.exp(0.5j * a)])

    c, s = np.cos(a2 / 2), np.sin(a2 / 2)
    return rz(a1) @ np.array([[c, -s], [s, c]], dtype=complex) @ rz(a3)


def su2_euler(U: np.ndarray) -> tuple[float, float, float]:
    """Euler angles reproducing U exactly (not just up to sign)."""
    b = 2 * np.arctan2(abs(U[1, 0]), abs(U[0, 0]))
    ssum = -2 * np.angle(U[0, 0]) if abs(U[0, 0]) > 1e-12 else 0.0
    sdif = 2 * np.angle(U[1, 0]) if abs(U[1, 0]) > 1e-12 else 0.0
    a1, a3 = (ssum + sdif) / 2, (ssum - sdif) / 2
    if np.linalg.norm(su2_matrix((a1, b, a3)) - U) > 1e-8:
        a1 += 2 * np.pi
    return float(a1), float(b), float(a3)


def _s0(rep: SymmetryRep, g) -> np.ndarray:
    if rep.kind == "U1":
        th = float(g)
        q = np.asarray(rep.charges)
        return realify(np.diag(np.exp(1j * q * th)))
    if rep.kind == "SU2":
        U = su2_matrix(g)
        out = np.eye(rep.dim)
        for (i, j), flag in zip(rep.pairs, rep.flags):
            idx = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1]
            out[np.ix_(idx, idx)] = realify(U.conj() if flag else U)
        return out
    out = np.eye(rep.dim)
    for k in g:
        out = out @ np.asarray(rep.generators[k])
    return out


def element_matrix(rep: SymmetryRep, g) -> np.ndarray:
    """Symplectic matrix S(g) = R S0(g) R^-1."""
    S0 = _s0(rep, g)
    if rep.conjugator is None:
        return S0
    R = rep.R
    return R @ S0 @ symplectic_inverse(R)


def identity_element(rep: SymmetryRep):
    return {"U1": 0.0, "SU2": (0.0, 0.0, 0.0), "finite": ()}[rep.kind]


def compose(rep: SymmetryRep, g2, g1):
    """Group element g2 g1."""
    if rep.kind == "U1":
        return float((g2 + g1) % (2 * np.pi))
    if rep.kind == "SU2":
        return su2_euler(su2_matrix(g2) @ su2_matrix(g1))
    return tuple(g2) + tuple(g1)


def inverse(rep: SymmetryRep, g):
    if rep.kind == "U1":
        return float((-g) % (2 * np.pi))
    if rep.kind == "SU2":
        a1, a2, a3 = g
        return (-a3, -a2, -a1)
    raise UnsupportedFeatureError("inverse words need generator inverses")


def finite_words(n_generators: int, max_len: int) -> list[tuple]:
    words: list[tuple] = []
    for length in range(1, max_len + 1):
        words += list(itertools.product(range(n_generators), repeat=length))
    return words


def sample_elements(rep: SymmetryRep, count: int | None = None, seed: int | None = None) -> list:
    """Deterministic probe elements.

    U1: the fixed probes pi/2, pi and 2 pi / golden ratio come first, then uniform
    draws. SU2: uniform Euler triples. finite: all words up to the configured length
    (truncated to ``count`` if given).
    """
    cfg = get_config()
    seed = cfg.seed if seed is None else seed
    if rep.kind == "finite":
        words = finite_words(len(rep.generators), cfg.word_length)
        return words if count is None else words[:count]
    count = cfg.n_probes if count is None else count
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = np.random.default_rng(seed)
    if rep.kind == "U1":
        fixed = [np.pi / 2, np.pi, (GOLDEN * 2 * np.pi) % (2 * np.pi)]
        extra = list(rng.uniform(0, 2 * np.pi, size=max(0, count - 3)))
        return [float(x) for x in (fixed + extra)[:count]]
    return [(float(rng.uniform(0, 2 * np.pi)), float(np.arccos(rng.uniform(-1, 1))),
             float(rng.uniform(0, 4 * np.pi))) for _ in range(count)]


# ---------------------------------------------------------------- derived reps


def conjugate_rep(rep: SymmetryRep) -> SymmetryRep:
    """Representation (I x Z) S(g) (I x Z)."""
    Z = zeta(rep.n)
    R = None if rep.conjugator is None else Z @ rep.R @ Z
    if rep.kind == "U1":
        return replace(rep, charges=tuple(-q for q in rep.charges), conjugator=R)
    if rep.kind == "SU2":
        return replace(rep, flags=tuple(not f for f in rep.flags), conjugator=R)
    return replace(rep, generators=tuple(Z @ g @ Z for g in rep.generators), conjugator=R)


def direct_sum_rep(*reps: SymmetryRep) -> SymmetryRep:
    kinds = {r.kind for r in reps}
    if len(kinds) != 1:
        raise UnsupportedFeatureError("direct sums need representations of the same group")
    kind = kinds.pop()
    n = sum(r.n for r in reps)
    conj = None
    if any(r.conjugator is not None for r in reps):
        conj = sla.block_diag(*[r.R for r in reps])
    if kind == "U1":
        return SymmetryRep("U1", n, charges=tuple(q for r in reps for q in r.charges), conjugator=conj)
    if kind == "SU2":
        pairs, flags, off = [], [], 0
        for r in reps:
            pairs += [(i + off, j + off) for i, j in r.pairs]
            flags += list(r.flags)
            off += r.n
        return SymmetryRep("SU2", n, pairs=tuple(pairs), flags=tuple(flags), conjugator=conj)
    k = len(reps[0].generators)
    if any(len(r.generators) != k for r in reps):
        raise ValueError("finite reps must share the generator count")
    gens = tuple(sla.block_diag(*[r.generators[i] for r in reps]) for i in range(k))
    return SymmetryRep("finite", n, generators=gens, conjugator=conj)


def restrict_rep(rep: SymmetryRep, modes: Sequence[int]) -> SymmetryRep:
    """Sub-representation on a set of modes closed under the action (passive reps only)."""
    modes = list(modes)
    if rep.conjugator is not None:
        raise UnsupportedFeatureError("restriction of conjugated representations")
    if rep.kind == "U1":
        return u1([rep.charges[m] for m in modes])
    if rep.kind == "SU2":
        pos = {m: k for k, m in enumerate(modes)}
        pairs, flags = [], []
        for (i, j), f in zip(rep.pairs, rep.flags):
            if i in pos and j in pos:
                pairs.append((pos[i], pos[j]))
                flags.append(f)
            elif i in pos or j in pos:
                raise ValueError("mode set splits an SU2 pair")
        return SymmetryRep("SU2", len(modes), pairs=tuple(pairs), flags=tuple(flags))
    idx = np.array([i for m in modes for i in (2 * m, 2 * m + 1)])
    return finite_rep([g[np.ix_(idx, idx)] for g in rep.generators])


def charge_matrix(rep: SymmetryRep) -> np.ndarray:
    """Quadratic charge Q with S(theta) = exp(-theta Omega Q) (U1 only)."""
    if rep.kind != "U1":
        raise UnsupportedFeatureError("charge matrices exist for U1 representations only")
    Q0 = np.kron(np.diag(rep.charges), np.eye(2))
    if rep.conjugator is None:
        return Q0
    Ri = symplectic_inverse(rep.R)
    return Ri.T @ Q0 @ Ri


def constraint_ops(rep: SymmetryRep) -> list[tuple[str, np.ndarray]]:
    """Linearised invariance data: Lie algebra generators ('lie') or group generators ('group')."""
    R = rep.R
    Ri = symplectic_inverse(R)
    if rep.kind == "U1":
        L0 = -omega(rep.n) @ np.kron(np.diag(rep.charges), np.eye(2))
        return [("lie", R @ L0 @ Ri)]
    if rep.kind == "SU2":
        ops = []
        for sa in PAULI:
            L0 = np.zeros((rep.dim, rep.dim))
            gen = -0.5j * sa
            for (i, j), flag in zip(rep.pairs, rep.flags):
                idx = [2 * i, 2 * i + 1, 2 * j, 2 * j + 1]
                L0[np.ix_(idx, idx)] = realify(gen.conj() if flag else gen)
            ops.append(("lie", R @ L0 @ Ri))
        return ops
    return [("group", R @ np.asarray(g) @ Ri) for g in rep.generators]


def probe_matrices(rep: SymmetryRep, count: int | None = None, seed: int | None = None) -> list[np.ndarray]:
    return [element_matrix(rep, g) for g in sample_elements(rep, count, seed)]


# ---------------------------------------------------------------- predicates


def _tol(tol):
    return get_config().tau_inv if tol is None else tol


def _nrm(*arrays) -> float:
    return max([1.0] + [float(np.linalg.norm(a)) for a in arrays])


def state_residual(rep: SymmetryRep, d, sigma) -> float:
    d = np.zeros(rep.dim) if d is None else np.asarray(d, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    res = 0.0
    for S in probe_matrices(rep):
        res = max(res, np.linalg.norm(S @ d - d) / _nrm(d), rel_residual(S @ sigma @ S.T, sigma))
    for kind, L in constraint_ops(rep):
        if kind == "lie":
            res = max(res, np.linalg.norm(L @ d) / (_nrm(L) * _nrm(d)),
                      np.linalg.norm(L @ sigma + sigma @ L.T) / (_nrm(L) * _nrm(sigma)))
    return float(res)


def is_invariant_state(rep: SymmetryRep, d, sigma, tol: float | None = None) -> CheckResult:
    """S(g) d = d and S(g) sigma S(g)^T = sigma on probes and at generator level."""
    r = state_residual(rep, d, sigma)
    return CheckResult(r <= _tol(tol), r)


def intertwiner_residual(rep_in: SymmetryRep, rep_out: SymmetryRep, X: np.ndarray) -> float:
    X = np.asarray(X, dtype=float)
    res = 0.0
    els_in = sample_elements(rep_in)
    for g in els_in:
        res = max(res, rel_residual(X @ element_matrix(rep_in, g), element_matrix(rep_out, g) @ X))
    for (k1, L1), (k2, L2) in zip(constraint_ops(rep_in), constraint_ops(rep_out)):
        if k1 == "lie":
            res = max(res, np.linalg.norm(L2 @ X - X @ L1) / (_nrm(L1, L2) * _nrm(X)))
    return float(res)


def is_invariant_unitary(rep: SymmetryRep, xi, V, tol: float | None = None) -> CheckResult:
    """S(g) xi = xi and S(g) V S(g)^-1 = V."""
    xi = np.zeros(rep.dim) if xi is None else np.asarray(xi, dtype=float)
    r = max(intertwiner_residual(rep, rep, V), state_residual(rep, xi, np.zeros((rep.dim, rep.dim))))
    return CheckResult(r <= _tol(tol), r)


def is_invariant_hamiltonian(rep: SymmetryRep, xi, H, tol: float | None = None) -> CheckResult:
    """S(g) xi = xi and S(g) Omega H Omega S(g)^T = Omega H Omega."""
    Om = omega(rep.n)
    K = Om @ np.asarray(H, dtype=float) @ Om
    xi = np.zeros(rep.dim) if xi is None else np.asarray(xi, dtype=float)
    r = state_residual(rep, xi, K)
    return CheckResult(r <= _tol(tol), r)


def covariance_residual(rep_in: SymmetryRep, rep_out: SymmetryRep, channel) -> float:
    r1 = intertwiner_residual(rep_in, rep_out, channel.X)
    r2 = state_residual(rep_out, channel.xi, channel.Y)
    return max(r1, r2)


def is_covariant_channel(rep_in: SymmetryRep, rep_out: SymmetryRep, channel,
                         tol: float | None = None) -> CheckResult:
    """S_B(g) xi = xi, X S_A(g) = S_B(g) X and S_B(g) Y S_B(g)^T = Y."""
    if channel.X.shape != (rep_out.dim, rep_in.dim):
        raise ValueError("channel dimensions do not match the representations")
    r = covariance_residual(rep_in, rep_out, channel)
    return CheckResult(r <= _tol(tol), r)


# ---------------------------------------------------------------- linear solution spaces


def _sym_basis(m: int) -> list[np.ndarray]:
    out = []
    for i in range(m):
        for j in range(i, m):
            E = np.zeros((m, m))
            E[i, j] = E[j, i] = 1.0
            out.append(E / (np.sqrt(2.0) if i != j else 1.0))
    return out


def _null_combos(basis: list[np.ndarray], residual_maps) -> list[np.ndarray]:
    cols = [np.concatenate([f(E).ravel() for f in residual_maps]) for E in basis]
    A = np.array(cols).T
    if A.size == 0 or not residual_maps:
        return basis
    N = sla.null_space(A, rcond=1e-10)
    out = [sum(c * E for c, E in zip(v, basis)) for v in N.T]
    return out


def commutant_basis(rep_in: SymmetryRep, rep_out: SymmetryRep) -> list[np.ndarray]:
    """Orthonormal basis of real X (2n_out x 2n_in) with X S_in(g) = S_out(g) X."""
    ops_in, ops_out = constraint_ops(rep_in), constraint_ops(rep_out)
    if len(ops_in) != len(ops_out) or rep_in.kind != rep_out.kind:
        raise ValueError("representations of different groups")
    m_out, m_in = rep_out.dim, rep_in.dim
    basis = []
    for i in range(m_out):
        for j in range(m_in):
            E = np.zeros((m_out, m_in))
            E[i, j] = 1.0
            basis.append(E)
    maps = [(lambda X, a=a, b=b: b @ X - X @ a) for (_, a), (_, b) in zip(ops_in, ops_out)]
    return _null_combos(basis, maps)


def invariant_symmetric_basis(rep: SymmetryRep) -> list[np.ndarray]:
    """Basis of symmetric Y with S(g) Y S(g)^T = Y."""
    maps = []
    for kind, L in constraint_ops(rep):
        if kind == "lie":
            maps.append(lambda Y, L=L: L @ Y + Y @ L.T)
        else:
            maps.append(lambda Y, L=L: L @ Y @ L.T - Y)
    return _null_combos(_sym_basis(rep.dim), maps)


def invariant_hamiltonian_basis(rep: SymmetryRep) -> list[np.ndarray]:
    """Basis of symmetric H whose unitary exp(Omega H) commutes with the representation."""
    Om = omega(rep.n)
    maps = []
    for kind, L in constraint_ops(rep):
        if kind == "lie":
            maps.append(lambda H, L=L: L @ Om @ H - Om @ H @ L)
        else:
            Li = np.linalg.inv(L)
            maps.append(lambda H, L=L, Li=Li: L @ Om @ H @ Li - Om @ H)
    return _null_combos(_sym_basis(rep.dim), maps)


# ---------------------------------------------------------------- passive form


def orthogonalize(rep: SymmetryRep, sigma: np.ndarray) -> tuple[np.ndarray, SymmetryRep]:
    """R = sqrt(sigma_inf) and the passive representation R^-1 S(g) R.

    sigma_inf is the pure-state limit of the power states of an invariant sigma.
    """
    sigma = check_spd(sigma, "sigma")
    chk = is_invariant_state(rep, None, sigma)
    if not chk:
        raise InfeasibleError(f"supplied covariance is not invariant (residual {chk.residual:.3e})")
    S, _ = williamson(sigma)
    Si = symplectic_inverse(S)
    R = sqrtm_psd(Si @ Si.T)
    new_conj = symplectic_inverse(R) @ rep.R
    return R, with_conjugator(rep, new_conj)


# ---------------------------------------------------------------- irrep projection


def _complex_linear(R: np.ndarray) -> np.ndarray:
    return convert_basis(R, "(1,1)", "complex").entries


def irrep_project(rep: SymmetryRep, mu, M: np.ndarray) -> np.ndarray:
    """T^(mu)(M): multiplicity trace of the mu-isotypic block of K M K^dagger.

    U1: mu is an integer charge; annihilation components of a mode with charge q carry
    label q, creation components carry -q. SU2: mu must denote the defining doublet.
    M is given in the complex basis (a_1..a_n, a_1^dagger..a_n^dagger).
    """
    M = np.asarray(M, dtype=complex)
    n = rep.n
    if M.shape != (2 * n, 2 * n):
        raise ValueError("matrix dimension does not match the representation")
    if rep.conjugator is not None:
        Rc_inv = _complex_linear(symplectic_inverse(rep.R))
        M = Rc_inv @ M @ Rc_inv.conj().T
    if rep.kind == "U1":
        labels = np.concatenate([np.asarray(rep.charges), -np.asarray(rep.charges)])
        mask = np.abs(labels - float(mu)) < 1e-9
        return np.array([[np.sum(np.diag(M)[mask])]])
    if rep.kind == "SU2":
        if mu not in ("1/2", "defining", 0.5, 1, "j=1/2"):
            raise UnsupportedFeatureError("only the defining irrep of SU2 is supported")
        Om2 = np.array([[0, 1], [-1, 0]], dtype=complex)
        out = np.zeros((2, 2), dtype=complex)
        for (i, j), flag in zip(rep.pairs, rep.flags):
            a_idx, c_idx = [i, j], [n + i, n + j]
            # doublet copy from annihilators and from creators; K = I (+) Omega maps U* to U
            for idx, needs_k in ((a_idx, flag), (c_idx, not flag)):
                K = Om2 if needs_k else np.eye(2)
                blk = M[np.ix_(idx, idx)]
                out += K @ blk @ K.conj().T
        return out
    raise UnsupportedFeatureError("irrep projection is implemented for U1 and SU2 only")
