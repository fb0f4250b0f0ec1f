"""Command-line front end. Numerics live in the library; this module parses and formats.

Exit codes: 0 success, 1 numerical or certification failure, 2 usage or schema error,
3 infeasible request (a certificate is still printed).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import config as cfgmod
from .phase_space_core import DomainError, InfeasibleError

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2, 3


class UsageError(ValueError):
    pass


class NumericalFailure(RuntimeError):
    def __init__(self, message: str, payload: dict | None = None):
        super().__init__(message)
        self.payload = payload or {}


# ---------------------------------------------------------------- parsing helpers


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read JSON from {path}: {exc}") from exc


def _matrix(path: str) -> np.ndarray:
    obj = _load_json(path)
    if isinstance(obj, dict):
        obj = obj.get("entries", obj.get("matrix"))
    try:
        M = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"{path} does not hold a numeric matrix") from exc
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
        raise UsageError(f"{path} must hold a square matrix of even size")
    return M


def parse_state(text: str | None):
    """``kind[:param]`` (coherent:1+0.5j, squeezed:0.3, thermal:1, epr:0.4, vacuum[:n]) or a JSON path."""
    from .gaussian_states import GaussianState, standard_state
    if not text:
        raise UsageError("empty state descriptor")
    if text.endswith(".json") or os.path.isfile(text):
        try:
            return GaussianState.from_json(_load_json(text))
        except (KeyError, ValueError) as exc:
            raise UsageError(f"invalid state file: {exc}") from exc
    kind, _, arg = text.partition(":")
    try:
        if kind == "vacuum":
            return standard_state("vacuum", modes=int(arg) if arg else 1)
        if kind == "coherent":
            return standard_state("coherent", complex(arg.replace(" ", "")))
        if kind in ("squeezed", "thermal", "epr"):
            return standard_state(kind, float(arg))
    except ValueError as exc:
        raise UsageError(f"invalid state descriptor {text!r}: {exc}") from exc
    raise UsageError(f"unknown state descriptor {text!r}")


def parse_rep(text: str | None):
    """``u1:q1,q2,...``, ``su2:i-j,k-l`` or a JSON path."""
    from .representations import SymmetryRep, su2_schwinger, u1
    if not text:
        raise UsageError("empty representation descriptor")
    if text.endswith(".json") or os.path.isfile(text):
        try:
            return SymmetryRep.from_json(_load_json(text))
        except (KeyError, ValueError, IndexError) as exc:
            raise UsageError(f"invalid representation file: {exc}") from exc
    kind, _, arg = text.partition(":")
    try:
        if kind.lower() == "u1":
            return u1([float(q) for q in arg.split(",")])
        if kind.lower() == "su2":
            pairs = [tuple(int(m) for m in p.split("-")) for p in arg.split(",")]
            return su2_schwinger(pairs)
    except ValueError as exc:
        raise UsageError(f"invalid representation descriptor {text!r}: {exc}") from exc
    raise UsageError(f"unknown representation descriptor {text!r}")


def parse_element(rep, text: str | None):
    if rep.kind == "U1":
        return math.pi / 2 if text is None else float(text)
    if rep.kind == "SU2":
        if text is None:
            return (0.3, 0.7, 1.1)
        vals = [float(v) for v in text.split(",")]
        if len(vals) != 3:
            raise UsageError("SU2 elements take three Euler angles")
        return tuple(vals)
    if text is None:
        return (0,)
    return tuple(int(v) for v in text.split(","))


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def emit(command: str, result, out=None) -> None:
    out = out or sys.stdout
    doc = {"command": command, "config": cfgmod.get_config().as_dict(), "result": result}
    out.write(json.dumps(doc, sort_keys=True, indent=2, default=_jsonable) + "\n")


# ---------------------------------------------------------------- commands


def _fig3_point(args):
    from .monotones import figure3_rows
    n, base = args
    return figure3_rows(n, n, 1, base)[0]


def cmd_monotone(args) -> int:
    from . import monotones as mono
    from .representations import charge_matrix
    cfg = cfgmod.get_config()
    if args.figure3:
        grid = [float(x) for x in np.linspace(args.nmin, args.nmax, args.points)]
        tasks = [(n, cfg.log_base) for n in grid]
        if args.jobs > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as ex:
                rows = list(ex.map(_fig3_point, tasks))
        else:
            rows = [_fig3_point(t) for t in tasks]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n_mean", "gamma_coherent", "gamma_squeezed", "asym_coherent", "asym_squeezed"])
        for r in rows:
            w.writerow([repr(float(v)) for v in r])
        sys.stdout.write(buf.getvalue())
        return EXIT_OK
    state = parse_state(args.state)
    rep = parse_rep(args.rep)
    if rep.n != state.n:
        raise UsageError(f"representation acts on {rep.n} modes, state has {state.n}")
    reports = []
    if args.fq:
        Qs = [charge_matrix(rep)] if rep.kind == "U1" else mono.generator_charges(rep)
        for k, Q in enumerate(Qs):
            rpt = mono.fisher_like_FQ(state, Q)
            fd = mono.finite_difference_check_FQ(state, Q)
            reports.append({**rpt.to_json(), "generator": k, "finite_difference_residual": fd})
    else:
        g = parse_element(rep, args.g)
        rpt = mono.petz_renyi_asymmetry(state, rep, g, args.alpha)
        reports.append(rpt.to_json())
    if args.relent:
        if rep.kind != "U1" or rep.n != 1:
            raise UsageError("relative entropy of asymmetry is available for one-mode U1")
        kind, _, arg = args.state.partition(":")
        scale = 1 / math.log(2) if cfg.log_base == "2" else 1.0
        param = complex(arg) if kind == "coherent" else float(arg)
        reports.append({"name": "relative_entropy_of_asymmetry",
                        "value": scale * mono.relent_asym_u1(kind, param), "log_base": cfg.log_base})
    emit("monotone", {"reports": reports})
    return EXIT_OK


def cmd_decompose(args) -> int:
    from . import decompositions as dec
    from .phase_space_core import bloch_messiah, rel_residual, williamson
    if args.extended_williamson:
        M, Q = (_matrix(p) for p in args.extended_williamson)
        res = dec.extended_williamson(M, Q)
        emit("decompose", {"extended_williamson": res.to_json()})
        return EXIT_OK
    if args.williamson:
        M = _matrix(args.williamson)
        S, nu = williamson(M)
        D = np.kron(np.diag(nu), np.eye(2))
        emit("decompose", {"williamson": {"S": S, "nu": nu, "residual": rel_residual(S @ M @ S.T, D)}})
        return EXIT_OK
    if args.bloch_messiah:
        V = _matrix(args.bloch_messiah)
        Op, D, O = bloch_messiah(V)
        emit("decompose", {"bloch_messiah": {"O_left": Op, "D": D, "O_right": O,
                                             "residual": rel_residual(Op @ D @ O.T, V)}})
        return EXIT_OK
    if args.interconvert:
        s1, s2, Q = (_matrix(p) for p in args.interconvert)
        cert = dec.interconvert(s1, s2, Q)
        emit("decompose", {"interconvert": cert.to_json()})
        return EXIT_OK if cert.feasible else EXIT_INFEASIBLE
    raise UsageError("decompose needs one of --extended-williamson, --williamson, --bloch-messiah, --interconvert")


def cmd_check(args) -> int:
    from .gaussian_channels import GaussianChannel, GaussianUnitary, validate_cp
    from .gaussian_states import GaussianState
    from .monotones import conservation_report
    from .representations import is_covariant_channel, is_invariant_state, is_invariant_unitary
    out: dict = {}
    ok = True
    if args.channel:
        try:
            ch = GaussianChannel.from_json(_load_json(args.channel))
        except (KeyError, ValueError) as exc:
            raise UsageError(f"invalid channel file: {exc}") from exc
        rin, rout = parse_rep(args.rep_in or args.rep), parse_rep(args.rep_out or args.rep)
        cov = is_covariant_channel(rin, rout, ch)
        cp = validate_cp(ch)
        out["channel"] = {"covariant": bool(cov), "covariance_residual": cov.residual,
                          "cp": bool(cp), "cp_min_eig": cp.min_eig}
        ok &= bool(cov) and bool(cp)
    if args.state:
        st = parse_state(args.state)
        rep = parse_rep(args.rep)
        inv = is_invariant_state(rep, st.d, st.sigma)
        out["state"] = {"invariant": bool(inv), "residual": inv.residual,
                        "physical": st.is_physical(), "physicality": st.physicality}
        ok &= bool(inv) and st.is_physical()
    if args.unitary:
        obj = _load_json(args.unitary)
        try:
            U = GaussianUnitary(np.asarray(obj["V"], dtype=float), obj.get("xi"))
        except (KeyError, ValueError) as exc:
            raise UsageError(f"invalid unitary file: {exc}") from exc
        inv = is_invariant_unitary(parse_rep(args.rep), U.xi, U.V)
        out["unitary"] = {"invariant": bool(inv), "residual": inv.residual}
        ok &= bool(inv)
    if args.conservation:
        before, after = (GaussianState.from_json(_load_json(p)) for p in args.conservation[:2])
        Q = _matrix(args.conservation[2])
        rep = conservation_report(before, after, Q)
        drift = abs(rep["difference"]["combined"])
        out["conservation"] = {**rep, "conserved": drift <= cfgmod.get_config().tau_inv * max(1, abs(rep["before"]["combined"]))}
        ok &= out["conservation"]["conserved"]
    if not out:
        raise UsageError("check needs --channel, --state, --unitary or --conservation")
    out["ok"] = bool(ok)
    emit("check", out)
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_dilate(args) -> int:
    from . import dilation as dil
    from .gaussian_channels import GaussianChannel
    cfg = cfgmod.get_config()
    if args.one_mode:
        if args.alpha is None:
            raise UsageError("--alpha is required with --one-mode")
        res = dil.one_mode_dilation(args.one_mode, args.alpha, args.nbar, args.alpha_loss, seed=cfg.seed)
    elif args.channel:
        try:
            ch = GaussianChannel.from_json(_load_json(args.channel))
        except (KeyError, ValueError) as exc:
            raise UsageError(f"invalid channel file: {exc}") from exc
        res = dil.covariant_stinespring(ch, parse_rep(args.rep_in), parse_rep(args.rep_out), seed=cfg.seed)
    else:
        raise UsageError("dilate needs --one-mode or --channel")
    doc = res.to_json()
    doc["certified"] = bool(res.residual <= 1e-7 and res.invariance_residual <= cfg.tau_inv)
    emit("dilate", doc)
    return EXIT_OK if doc["certified"] else EXIT_NUMERIC


def cmd_oracle(args) -> int:
    from . import fock_oracle as fo
    from . import dilation as dil
    from .gaussian_states import coherent
    from .monotones import relent_asym_u1
    out: dict = {}
    ok = True
    cutoff = args.cutoff or cfgmod.get_config().fock_cutoff
    if args.state:
        st = parse_state(args.state)
        fs = fo.gaussian_to_fock(st, cutoff)
        d, s = fo.extract_moments(fs)
        err = float(max(np.abs(d - st.d).max(), np.abs(s - st.sigma).max()))
        out["round_trip"] = {"moment_error": err, "tail_mass": fs.tail_mass, "cutoff": cutoff}
        ok &= err <= 1e-6
    if args.reflect is not None:
        fs = fo.apply_unitary(fo.reflect_vacuum_unitary(1, cutoff), fo.fock_coherent(args.reflect, cutoff))
        d, s = fo.extract_moments(fs)
        d2, s2, c = fo.reflection_prediction(args.reflect)
        err = float(max(np.abs(d - d2).max(), np.abs(s - s2).max()))
        d1 = coherent(args.reflect).d
        out["reflect_vacuum"] = {"c": c, "d": d, "sigma": s, "moment_error": err,
                                 "dQd_before": float(d1 @ d1), "dQd_after": float(d @ d),
                                 "trSigmaQ_before": 2.0, "trSigmaQ_after": float(np.trace(s)),
                                 "combined_after": float(np.trace(s) + 2 * d @ d),
                                 "combined_expected": 2 * (1 + 2 * abs(args.reflect) ** 2)}
        ok &= err <= 1e-6
    if args.dephase:
        kind, _, arg = args.dephase.partition(":")
        if kind not in ("coherent", "squeezed"):
            raise UsageError("--dephase takes coherent:<alpha> or squeezed:<r>")
        st = parse_state(args.dephase)
        fs = fo.u1_dephase(fo.gaussian_to_fock(st, cutoff), [1])
        series = relent_asym_u1(kind, complex(arg) if kind == "coherent" else float(arg))
        oracle = fo.entropy(fs)
        out["dephase"] = {"oracle_entropy": oracle, "series": series, "difference": abs(oracle - series)}
        ok &= abs(oracle - series) <= 1e-6
    if args.dilation is not None:
        res = dil.one_mode_dilation("attenuator", args.dilation, 0.0)
        err = dil.fock_crosscheck(res, coherent(0.8 + 0.4j), cutoff)
        out["dilation"] = {"alpha": args.dilation, "moment_error": err}
        ok &= err <= 1e-4
    if not out:
        raise UsageError("oracle-crosscheck needs --state, --reflect, --dephase or --dilation")
    out["ok"] = bool(ok)
    emit("oracle-crosscheck", out)
    return EXIT_OK if ok else EXIT_NUMERIC


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gaussym", description="Symmetry-constrained Gaussian bosonic toolkit")
    p.add_argument("--config", help=f"JSON config file (default: ${cfgmod.ENV_VAR})")
    p.add_argument("--seed", type=int)
    p.add_argument("--log-base", choices=["e", "2"])
    p.add_argument("--format", dest="output_format", choices=["json", "csv"])
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("monotone", help="asymmetry monotones and the Gamma-vs-<n> grid")
    m.add_argument("--state")
    m.add_argument("--rep", default="u1:1")
    m.add_argument("--fq", action="store_true", help="second-derivative monotone F_Q")
    m.add_argument("--alpha", type=float, default=0.5)
    m.add_argument("--g", help="group element: angle (U1), three Euler angles (SU2), word (finite)")
    m.add_argument("--relent", action="store_true", help="also report the relative entropy of asymmetry")
    m.add_argument("--figure3", action="store_true",
                   help="CSV grid of the relative entropy of asymmetry against mean excitation number")
    m.add_argument("--nmax", type=float, default=50.0)
    m.add_argument("--nmin", type=float, default=0.1)
    m.add_argument("--points", type=int, default=100)
    m.add_argument("--jobs", type=int, default=1)
    m.set_defaults(func=cmd_monotone)

    d = sub.add_parser("decompose", help="Williamson, extended Williamson, Bloch-Messiah, interconversion")
    d.add_argument("--extended-williamson", nargs=2, metavar=("M.json", "Q.json"))
    d.add_argument("--williamson", metavar="M.json")
    d.add_argument("--bloch-messiah", metavar="V.json")
    d.add_argument("--interconvert", nargs=3, metavar=("S1.json", "S2.json", "Q.json"))
    d.set_defaults(func=cmd_decompose)

    c = sub.add_parser("check", help="invariance, covariance, CP and conservation predicates")
    c.add_argument("--channel")
    c.add_argument("--state")
    c.add_argument("--unitary")
    c.add_argument("--conservation", nargs=3, metavar=("before.json", "after.json", "Q.json"))
    c.add_argument("--rep", default="u1:1")
    c.add_argument("--rep-in")
    c.add_argument("--rep-out")
    c.set_defaults(func=cmd_check)

    g = sub.add_parser("dilate", help="covariant Stinespring dilations")
    g.add_argument("--one-mode", choices=["attenuator", "amplifier", "phase_covariant"])
    g.add_argument("--alpha", type=float)
    g.add_argument("--nbar", type=float, default=0.0)
    g.add_argument("--alpha-loss", type=float)
    g.add_argument("--channel")
    g.add_argument("--rep-in", default="u1:1")
    g.add_argument("--rep-out", default="u1:1")
    g.set_defaults(func=cmd_dilate)

    o = sub.add_parser("oracle-crosscheck", help="number-basis cross-checks")
    o.add_argument("--state", help="round-trip a Gaussian state through the Fock oracle")
    o.add_argument("--reflect", type=float, help="vacuum-reflection unitary on coherent alpha")
    o.add_argument("--dephase", help="coherent:<alpha> or squeezed:<r>")
    o.add_argument("--dilation", type=float, help="pure-loss dilation angle")
    o.add_argument("--cutoff", type=int)
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfgmod.set_config(cfgmod.load_config(args.config, seed=args.seed, log_base=args.log_base,
                                             output_format=args.output_format))
        return args.func(args)
    except InfeasibleError as exc:
        emit(args.command, {"error": "infeasible", "message": str(exc)})
        return EXIT_INFEASIBLE
    except (DomainError, ArithmeticError, np.linalg.LinAlgError, NumericalFailure) as exc:
        emit(args.command, {"error": "numerical", "message": str(exc),
                            **getattr(exc, "payload", {})})
        return EXIT_NUMERIC
    except (UsageError, ValueError, KeyError, TypeError) as exc:
        if type(exc).__name__ == "CutoffError":
            emit(args.command, {"error": "numerical", "message": str(exc)})
            return EXIT_NUMERIC
        print(f"gaussym {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
