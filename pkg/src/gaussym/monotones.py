"""Asymmetry monotones of Gaussian states.

The Petz-Renyi monotone is reported two ways: ``value`` = (f1 + f2)/(1 - alpha)
(the divergence itself) and ``components['combined']`` = f1 + f2, the quantity whose
closed forms and second derivative F_Q are quoted for coherent and squeezed states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special
from scipy import stats

from .config import get_config
from .gaussian_states import GaussianState, sigma_alpha
from .phase_space_core import convert_basis, omega
from .representations import SymmetryRep, constraint_ops, element_matrix, irrep_project

EULER_GAMMA = float(np.euler_gamma)


@dataclass(frozen=True)
class MonotoneReport:
    name: str
    value: float
    components: dict | None = None
    parameters: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "value": self.value, "components": self.components,
                "parameters": self.parameters}


def _logdet(M: np.ndarray) -> float:
    sign, ld = np.linalg.slogdet(M)
    if sign <= 0:
        raise np.linalg.LinAlgError("matrix is not positive definite")
    return float(ld)


def _power_pair(state: GaussianState, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    sa = sigma_alpha(state.sigma, alpha)
    return sa, (sa if alpha == 0.5 else sigma_alpha(state.sigma, 1 - alpha))


def petz_renyi_terms(state: GaussianState, S: np.ndarray, alpha: float,
                     powers: tuple[np.ndarray, np.ndarray] | None = None) -> tuple[float, float]:
    """(f1, f2) for the group element with symplectic matrix S."""
    sa, sb = _power_pair(state, alpha) if powers is None else powers
    dg = state.d - S @ state.d
    K = sa + S @ sb @ S.T
    f1 = float(dg @ np.linalg.solve(K, dg))
    f2 = -0.5 * (_logdet((sa + sb) / 2) - _logdet(K / 2))
    return f1, f2


def petz_renyi_asymmetry(state: GaussianState, rep: SymmetryRep, g, alpha: float = 0.5) -> MonotoneReport:
    """Petz-Renyi divergence between the state and its image under S(g)."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    f1, f2 = petz_renyi_terms(state, element_matrix(rep, g), alpha)
    return MonotoneReport("petz_renyi", (f1 + f2) / (1 - alpha),
                          {"type1": f1, "type2": f2, "combined": f1 + f2},
                          {"alpha": alpha, "g": g if not isinstance(g, np.ndarray) else g.tolist()})


def petz_renyi_batch(state: GaussianState, rep: SymmetryRep, elements, alphas=(0.5,)) -> list[MonotoneReport]:
    """petz_renyi_asymmetry over a grid of elements and orders, sharing the power states."""
    out = []
    mats = [element_matrix(rep, g) for g in elements]
    for alpha in alphas:
        if not 0 < alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        powers = _power_pair(state, alpha)
        for g, S in zip(elements, mats):
            f1, f2 = petz_renyi_terms(state, S, alpha, powers)
            out.append(MonotoneReport("petz_renyi", (f1 + f2) / (1 - alpha),
                                      {"type1": f1, "type2": f2, "combined": f1 + f2},
                                      {"alpha": alpha, "g": g if not isinstance(g, np.ndarray) else g.tolist()}))
    return out


def petz_renyi_flow(state: GaussianState, Q: np.ndarray, t: float, alpha: float = 0.5) -> MonotoneReport:
    """Same monotone for S(t) = exp(-Omega Q t) of a quadratic charge Q."""
    from scipy.linalg import expm
    S = expm(-omega(state.n) @ Q * t)
    f1, f2 = petz_renyi_terms(state, S, alpha)
    return MonotoneReport("petz_renyi", (f1 + f2) / (1 - alpha),
                          {"type1": f1, "type2": f2, "combined": f1 + f2}, {"alpha": alpha, "t": t})


def fisher_like_FQ(state: GaussianState, Q: np.ndarray) -> MonotoneReport:
    """Second derivative at t = 0 of f1 + f2 at alpha = 1/2, split by type."""
    Om = omega(state.n)
    Q = np.asarray(Q, dtype=float)
    sh = sigma_alpha(state.sigma, 0.5)
    shi = np.linalg.inv(sh)
    d = state.d
    B = Om @ Q
    F1 = float(-d @ Q @ Om @ shi @ Om @ Q @ d)
    F2 = float(0.25 * np.trace(B @ Om @ shi @ (B @ sh @ Om - sh @ Om @ B)))
    return MonotoneReport("F_Q", F1 + F2, {"type1": F1, "type2": F2}, {"Q": Q.tolist()})


def finite_difference_check_FQ(state: GaussianState, Q: np.ndarray, h: float = 1e-3) -> float:
    """|central second difference of f1 + f2 at alpha = 1/2 - F_Q|."""
    if not 0 < h <= 0.1:
        raise ValueError("h must lie in (0, 0.1]")
    fp = petz_renyi_flow(state, Q, h).components["combined"]
    fm = petz_renyi_flow(state, Q, -h).components["combined"]
    f0 = petz_renyi_flow(state, Q, 0.0).components["combined"]
    return abs((fp + fm - 2 * f0) / h ** 2 - fisher_like_FQ(state, Q).value)


def generator_charges(rep: SymmetryRep) -> list[np.ndarray]:
    """Quadratic charges Q_a with Lie generators L_a = -Omega Q_a."""
    Om = omega(rep.n)
    out = []
    for kind, L in constraint_ops(rep):
        if kind != "lie":
            raise ValueError("finite groups have no quadratic charges")
        Q = Om @ L
        out.append((Q + Q.T) / 2)
    return out


def type1_projection(state: GaussianState, rep: SymmetryRep, mu) -> np.ndarray:
    dc = convert_basis(state.d, "(1,0)", "complex").entries
    return irrep_project(rep, mu, np.outer(dc, dc.conj()))


def type1_rank(state: GaussianState, rep: SymmetryRep, mu, rel_tol: float = 1e-8) -> int:
    """Numerical rank of the irrep projection of d d^dagger."""
    T = type1_projection(state, rep, mu)
    s = np.linalg.svd(T, compute_uv=False)
    if s.size == 0 or s[0] <= 1e-300:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


# ---------------------------------------------------------------- relative entropy of asymmetry


def _entropy_from_logp(logp: np.ndarray) -> float:
    p = np.exp(logp)
    return float(-np.sum(p * logp))


def coherent_weights(nbar: float, tail: float = 1e-12, cap: int = 100_000) -> np.ndarray:
    """Log Poisson weights of the dephased coherent state."""
    kmax = int(nbar + 40 * math.sqrt(nbar) + 60)
    if kmax > cap or stats.poisson.sf(kmax, nbar) > tail:
        raise ArithmeticError("Poisson series did not converge within the term cap")
    k = np.arange(kmax + 1)
    return stats.poisson.logpmf(k, nbar)


def squeezed_weights(r: float, tail: float = 1e-12, cap: int = 100_000) -> np.ndarray:
    """Log weights sech r (tanh r / 2)^{2k} C(2k, k) of levels 2k of the dephased squeezed vacuum."""
    r = abs(r)
    if r == 0:
        return np.array([0.0])
    t = math.tanh(r)
    logs = []
    total = 0.0
    k0 = 0
    block = 1024
    while True:
        k = np.arange(k0, k0 + block)
        lp = (-math.log(math.cosh(r)) + 2 * k * math.log(t / 2)
              + special.gammaln(2 * k + 1) - 2 * special.gammaln(k + 1))
        logs.append(lp)
        total += float(np.exp(lp).sum())
        k0 += block
        if 1 - total < tail and np.exp(lp[-1]) < 1e-14 * total:
            break
        if k0 >= cap:
            raise ArithmeticError("central-binomial series did not converge within the term cap")
    return np.concatenate(logs)


def relent_asym_u1(kind: str, param: float, mode: str = "series") -> float:
    """Relative entropy of asymmetry for one-mode U(1) (natural log).

    kind: ``coherent`` (param = |alpha|), ``squeezed`` (param = r) or ``epr`` (param = r).
    mode: ``series`` (exact Fock-dephasing entropy), ``asymptotic`` (large-<n> expansions
    as quoted for these families) or, for squeezed states, ``asymptotic_corrected``.
    """
    if kind == "coherent":
        nbar = abs(complex(param)) ** 2
        if mode == "series":
            return 0.0 if nbar == 0 else _entropy_from_logp(coherent_weights(nbar))
        if mode == "asymptotic":
            return 0.5 * math.log(nbar) + math.log(math.sqrt(2 * math.pi * math.e))
    elif kind == "squeezed":
        r = float(param)
        nbar = math.sinh(r) ** 2
        if mode == "series":
            return _entropy_from_logp(squeezed_weights(r))
        if mode == "asymptotic":
            return math.log(nbar) + math.log(2 ** -3 * math.sqrt(math.pi) * math.exp(2 - EULER_GAMMA / 2))
        if mode == "asymptotic_corrected":
            return math.log(nbar + 1) + math.log(math.sqrt(math.pi) * math.exp(0.5 - EULER_GAMMA / 2) / 2)
    elif kind == "epr":
        r = float(param)
        c2, s2 = math.cosh(r) ** 2, math.sinh(r) ** 2
        if mode == "series":
            return c2 * math.log(c2) - (s2 * math.log(s2) if s2 > 0 else 0.0)
        if mode == "asymptotic":
            return math.log(2 * s2) - math.log(4)
    else:
        raise ValueError(f"unknown state kind {kind!r}")
    raise ValueError(f"unknown mode {mode!r} for {kind}")


def n_mean_to_param(kind: str, n_mean: float) -> float:
    if kind == "coherent":
        return math.sqrt(n_mean)
    if kind == "squeezed":
        return math.asinh(math.sqrt(n_mean))
    if kind == "epr":
        return math.asinh(math.sqrt(n_mean / 2))
    raise ValueError(f"unknown state kind {kind!r}")


def figure3_rows(n_max: float = 50.0, n_min: float = 0.1, points: int = 100, base: str | None = None):
    """Rows (n_mean, Gamma_coherent, Gamma_squeezed, asymptote_coherent, asymptote_squeezed)."""
    base = get_config().log_base if base is None else base
    scale = 1 / math.log(2) if base == "2" else 1.0
    rows = []
    for n in np.linspace(n_min, n_max, points):
        a, r = n_mean_to_param("coherent", n), n_mean_to_param("squeezed", n)
        rows.append((float(n),
                     scale * relent_asym_u1("coherent", a),
                     scale * relent_asym_u1("squeezed", r),
                     scale * relent_asym_u1("coherent", a, "asymptotic"),
                     scale * relent_asym_u1("squeezed", r, "asymptotic")))
    return rows


# ---------------------------------------------------------------- conservation


def conservation_report(before: GaussianState, after: GaussianState, Q: np.ndarray) -> dict:
    """First- and second-moment charges and the combination conserved by every invariant unitary."""
    if before.n != after.n:
        raise ValueError("mode counts differ")
    Q = np.asarray(Q, dtype=float)

    def q(st):
        lin = float(st.d @ Q @ st.d)
        quad = float(np.trace(st.sigma @ Q))
        return {"dQd": lin, "trSigmaQ": quad, "combined": quad + 2 * lin}

    b, a = q(before), q(after)
    return {"before": b, "after": a, "difference": {k: a[k] - b[k] for k in b}}
