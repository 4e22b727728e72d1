"""Command-line front end: JSON reports on stdout, diagnostics on stderr.

Exit codes: 0 ok, 1 usage, 2 invalid input, 3 a reported check failed.
Norms print as fixed-point strings with 12 decimals; every other float is
rounded to 12 significant digits.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import conjugacy, dilation, dynamics, fock, simplex, spectrum
from .core import FiniteMultiSystem, InputError, Polynomial, structure_summary
from .rng import SplitMix64

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_TOL = 0, 1, 2, 3
PASS_TOL = 1e-10


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fnum(x: float) -> float:
    return float(f"{float(x):.12g}")


def fnorm(x: float) -> str:
    return f"{float(x):.12f}"


def cnum(z: complex) -> list:
    return [fnum(z.real), fnum(z.imag)]


# ---- file formats ----------------------------------------------------------

def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from None


def system_from_json(obj) -> FiniteMultiSystem:
    if not isinstance(obj, dict) or "maps" not in obj:
        raise InputError("system file needs a 'maps' array")
    maps = obj["maps"]
    if not isinstance(maps, list) or not maps or not all(isinstance(r, list) for r in maps):
        raise InputError("'maps' must be a non-empty array of arrays")
    for i, row in enumerate(maps):
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in row):
            raise InputError(f"map {i + 1} has non-integer entries")
    points = obj.get("points", [])
    if not isinstance(points, list) or not all(isinstance(p, str) for p in points):
        raise InputError("'points' must be an array of strings")
    if points and len(points) != len(maps[0]):
        raise InputError(f"{len(points)} points but maps have length {len(maps[0])}")
    name = obj.get("name", "")
    if not isinstance(name, str):
        raise InputError("'name' must be a string")
    return FiniteMultiSystem(tuple(tuple(r) for r in maps), tuple(points), name)


def system_to_json(sys: FiniteMultiSystem) -> dict:
    out = {"points": list(sys.labels), "maps": [list(r) for r in sys.maps]}
    if sys.name:
        out = {"name": sys.name, **out}
    return out


def load_system(path) -> FiniteMultiSystem:
    return system_from_json(_read_json(path))


def polynomial_from_json(obj, sys: FiniteMultiSystem) -> Polynomial:
    if not isinstance(obj, dict) or not isinstance(obj.get("terms"), list):
        raise InputError("polynomial file needs a 'terms' array")
    terms = {}
    for k, t in enumerate(obj["terms"]):
        if not isinstance(t, dict) or "word" not in t or "coeff" not in t:
            raise InputError(f"term {k} needs 'word' and 'coeff'")
        w = sys.check_word(t["word"])
        c = t["coeff"]
        if not isinstance(c, list) or len(c) != sys.m:
            raise InputError(f"term {k}: coeff must list {sys.m} [re, im] pairs")
        try:
            f = np.array([complex(float(re), float(im)) for re, im in c])
        except (TypeError, ValueError):
            raise InputError(f"term {k}: coeff entries must be [re, im] pairs") from None
        terms[w] = terms[w] + f if w in terms else f
    return Polynomial(sys.m, terms)


def polynomial_to_json(a: Polynomial) -> dict:
    return {"terms": [{"word": list(w), "coeff": [cnum(v) for v in a.terms[w]]} for w in sorted(a.terms)]}


def split_edge(text: str) -> tuple:
    """Split ``"alpha,beta"`` at the comma outside parentheses."""
    depth = 0
    for k, ch in enumerate(text):
        depth += ch == "("
        depth -= ch == ")"
        if ch == "," and depth == 0:
            return text[:k], text[k + 1:]
    raise InputError(f"edge must look like 'alpha,beta', got {text!r}")


# ---- commands --------------------------------------------------------------

def cmd_analyze(args):
    sys_ = load_system(args.system)
    verdict = dynamics.is_semisimple(sys_)
    report = {
        "name": sys_.name,
        "m": sys_.m,
        "n": sys_.n,
        "structure": structure_summary(sys_).as_dict(sys_),
        "semisimple": verdict.semisimple,
        "certificate": verdict.certificate.as_dict(sys_) if verdict.certificate else None,
    }
    if verdict.certificate is not None:
        N = dynamics.nilpotent_element(sys_, verdict.certificate)
        alt = dynamics.nonvanishing_certificate(sys_)
        report["nilpotent"] = {
            "vanishes": N.vanishes,
            "nonvanishing_certificate": alt.as_dict(sys_) if alt else None,
        }
    else:
        p = verdict.proof
        report["proof"] = {
            "surjective": p["surjective"],
            "components": [[sys_.labels[x] for x in c] for c in p["scc_partition"]],
            "condensation_edges": p["condensation_edges"],
        }
    report["fibers"] = {
        sys_.labels[x]: spectrum.character_fiber(sys_, x, args.model) for x in range(sys_.m)
    }
    return report, EXIT_OK


def cmd_conjugacy(args):
    A, B = load_system(args.a), load_system(args.b)
    mode = "strict" if args.strict else "piecewise"
    out = {"mode": mode}
    if A.m != B.m:
        return {**out, "verdict": "no", "reason": "cardinality"}, EXIT_OK
    if A.n != B.n:
        return {**out, "verdict": "no", "reason": "map count"}, EXIT_OK
    w = conjugacy.are_conjugate(A, B) if args.strict else conjugacy.are_piecewise_conjugate(A, B)
    if w is None:
        reason = "no conjugating bijection" if args.strict else "forgetful multigraphs differ"
        return {**out, "verdict": "no", "reason": reason}, EXIT_OK
    return {**out, "verdict": "yes", "witness": w.as_dict(A, B)}, EXIT_OK


def cmd_fock(args):
    if args.depth < 0:
        raise UsageError(f"--depth must be >= 0, got {args.depth}")
    sys_ = load_system(args.system)
    a = polynomial_from_json(_read_json(args.poly), sys_)
    out = {"depth": args.depth, "degree": a.degree}
    code = EXIT_OK
    if args.fourier:
        out["fourier"] = polynomial_to_json(a)["terms"]
    elif args.cesaro is not None:
        if args.cesaro < 1:
            raise UsageError("--cesaro needs k >= 1")
        rep = fock.cesaro_report(sys_, a, args.cesaro, args.depth)
        out["cesaro"] = {
            "k": args.cesaro,
            "error": fnorm(rep.error),
            "bound": fnorm(rep.bound),
            "holds": rep.holds,
            "mean": polynomial_to_json(fock.cesaro(a, args.cesaro))["terms"],
        }
        code = EXIT_OK if rep.holds else EXIT_TOL
    else:
        depths = list(range(args.depth + 1))
        norms = fock.norm_sequence(sys_, a, depths)
        out["norm"] = fnorm(norms[-1])
        out["norms_by_depth"] = [fnorm(v) for v in norms]
        if args.plot:
            from .plotting import plot_norm_vs_depth

            out["plot"] = plot_norm_vs_depth(args.plot, depths, norms)
    return out, code


def _dilation_report(pair, rep, fs):
    res = {
        "compression": fnum(dilation.compression_residual(pair, rep)),
        "covariance": fnum(dilation.covariance_residual(rep, fs)),
    }
    if pair.mode == "row":
        res["row_isometry"] = fnum(dilation.row_isometry_residual(rep))
    else:
        res["isometry"] = fnum(dilation.isometry_residual(rep))
    return res


def cmd_dilate(args):
    if args.depth < 1:
        raise UsageError(f"--depth must be >= 1, got {args.depth}")
    if args.maximize is not None and args.maximize < 0:
        raise UsageError("--maximize needs a nonnegative round count")
    sys_ = load_system(args.system)
    try:
        dims = [int(v) for v in args.dims.split(",")] if args.dims else [1] * sys_.m
    except ValueError:
        raise InputError(f"--dims must be comma-separated integers, got {args.dims!r}") from None
    pair = dilation.random_covariant_pair(sys_, dims, args.seed, args.mode)
    rep = (dilation.fbp_row_dilation if args.mode == "row" else dilation.separate_isometric_dilation)(pair, args.depth)
    rng = SplitMix64(args.seed ^ 0x5EED)
    fs = [np.asarray([rng.gauss() for _ in range(sys_.m)]) for _ in range(3)]
    res = _dilation_report(pair, rep, fs)
    ok = max(res.values()) < PASS_TOL
    out = {
        "mode": args.mode,
        "seed": args.seed,
        "dims": dims,
        "depth": args.depth,
        "dim_H": pair.dim,
        "dim_K": rep.dim,
        "defect_rank": rep.defect_rank,
        "residuals": res,
        "pass": ok,
    }
    if args.maximize:
        step = dilation.maximal_dilation_step if args.mode == "row" else dilation.full_dilation_round
        check = dilation.maximality_check if args.mode == "row" else dilation.fullness_check
        seq = [check(rep)["residual"]]
        for _ in range(args.maximize):
            r = step(rep)
            rep = r.rep
            seq.append(r.residual_after)
            if not r.changed:
                break
        nonincreasing = all(b <= a + 1e-12 for a, b in zip(seq, seq[1:]))
        out["rounds"] = {
            "kind": "maximality" if args.mode == "row" else "fullness",
            "residuals": [fnum(v) for v in seq],
            "nonincreasing": nonincreasing,
            "dim_K": rep.dim,
        }
        ok = ok and nonincreasing
        if args.plot:
            from .plotting import plot_residuals

            out["plot"] = plot_residuals(args.plot, seq, out["rounds"]["kind"] + " residual")
    out["pass"] = ok
    return out, EXIT_OK if ok else EXIT_TOL


def cmd_simplex(args):
    if args.n < 1 or args.samples < 2:
        raise UsageError("--n must be >= 1 and --samples >= 2")
    left, right = split_edge(args.edge)
    alpha = conjugacy.parse_cycles(left, args.n)
    beta = conjugacy.parse_cycles(right, args.n)
    pp = simplex.parse_partition(args.partition, args.n) if args.partition else None
    ts = np.linspace(0.0, 1.0, args.samples)
    samples, dets = [], []
    worst = 0.0
    for t in ts:
        u = simplex.skeleton_path(alpha, beta, float(t))
        d = complex(np.linalg.det(u))
        dets.append(d)
        unit = float(np.abs(u.conj().T @ u - np.eye(args.n)).max())
        worst = max(worst, unit)
        row = {"t": fnum(t), "det": cnum(d), "unitarity": fnum(unit)}
        if pp is not None:
            row["block_condition"] = simplex.check_block_condition(u, pp)
        samples.append(row)
    lo, hi = sorted((alpha, beta), key=simplex.canonical_key)
    out = {
        "n": args.n,
        "edge": [conjugacy.perm_to_cycles(alpha), conjugacy.perm_to_cycles(beta)],
        "oriented": [conjugacy.perm_to_cycles(lo), conjugacy.perm_to_cycles(hi)],
        "parity": [simplex.parity(alpha), simplex.parity(beta)],
        "endpoints_exact": bool(
            np.array_equal(simplex.skeleton_path(alpha, beta, 0.0), simplex.perm_matrix(alpha))
            and np.array_equal(simplex.skeleton_path(alpha, beta, 1.0), simplex.perm_matrix(beta))
        ),
        "samples": samples,
    }
    if pp is not None:
        out["partition"] = {"A": [sorted(a) for a in pp.A], "B": [sorted(b) for b in pp.B]}
        members = simplex.permutations_respecting(pp)
        out["edge_in_partition_set"] = alpha in members and beta in members
    if args.plot:
        from .plotting import plot_determinant_phase

        out["plot"] = plot_determinant_phase(args.plot, ts, dets)
    ok = worst < 1e-12 and out["endpoints_exact"]
    return out, EXIT_OK if ok else EXIT_TOL


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mvdyn", description="Finite multivariable dynamical systems and their operator algebras.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="structure, semisimplicity certificate and character fibers")
    a.add_argument("system")
    a.add_argument("--model", choices=spectrum.MODELS, default="tensor")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("conjugacy", help="decide piecewise or strict conjugacy")
    c.add_argument("a")
    c.add_argument("b")
    g = c.add_mutually_exclusive_group()
    g.add_argument("--piecewise", action="store_true", default=True)
    g.add_argument("--strict", action="store_true")
    c.set_defaults(func=cmd_conjugacy)

    f = sub.add_parser("fock", help="truncated Fock norms, Fourier and Cesaro data")
    f.add_argument("system")
    f.add_argument("--depth", type=int, required=True)
    f.add_argument("--poly", required=True)
    g = f.add_mutually_exclusive_group()
    g.add_argument("--fourier", action="store_true")
    g.add_argument("--cesaro", type=int, metavar="K")
    g.add_argument("--norm", action="store_true")
    f.add_argument("--plot", metavar="PATH", help="norm against depth (with --norm)")
    f.set_defaults(func=cmd_fock)

    d = sub.add_parser("dilate", help="dilate a seeded random covariant pair and report residuals")
    d.add_argument("system")
    d.add_argument("--dims", default=None, help="fiber dimensions, e.g. 1,2")
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--mode", choices=("row", "sep"), default="row")
    d.add_argument("--depth", type=int, default=3)
    d.add_argument("--maximize", type=int, metavar="ROUNDS")
    d.add_argument("--plot", metavar="PATH", help="residual per round (with --maximize)")
    d.set_defaults(func=cmd_dilate)

    s = sub.add_parser("simplex", help="unitary path along an edge of the permutation simplex")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--edge", required=True, help='two permutations in cycle notation, e.g. "e,(2 3)"')
    s.add_argument("--samples", type=int, default=11)
    s.add_argument("--partition", help='block pair, e.g. "1>1" or "1,2>2,3;3>1"')
    s.add_argument("--plot", metavar="PATH", help="determinant phase along the edge")
    s.set_defaults(func=cmd_simplex)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        out, code = args.func(args)
    except UsageError as e:
        print(f"mvdyn: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as e:
        print(f"mvdyn: invalid input: {e}", file=sys.stderr)
        return EXIT_INPUT
    json.dump(out, sys.stdout, indent=2)
    sys.stdout.write("\n")
    if code == EXIT_TOL:
        print("mvdyn: a reported check exceeded its tolerance", file=sys.stderr)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
