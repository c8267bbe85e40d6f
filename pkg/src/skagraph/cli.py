"""Command-line runner: ``skagraph <subcommand> [flags]``.

Every report embeds the parsed configuration, the seed and the package
version, and is a pure function of them (no timestamps), so identical
invocations produce byte-identical files.

Exit codes: 0 ok, 1 usage, 2 invariant violation, 3 resource budget.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .errors import InvariantViolation, SkagraphError, UsageError
from .graphs import (
    GraphSpec,
    complete_bipartite,
    euclidean,
    hamming,
    hamming_theta,
    point_line,
    tensor_with_complete,
)
from .rng import stream

SCHEMA = "skagraph.report/1"

# unit of each numeric result field, matched on the field name
_UNITS = {
    "lambda1": "eigenvalue",
    "lambda2": "eigenvalue",
    "closed_form_lambda2": "eigenvalue",
    "spectral_ratio": "ratio",
    "abs_error": "eigenvalue",
    "tol": "eigenvalue",
    "residual": "eigenvalue",
    "iterations": "count",
    "N": "vertices",
    "degree": "edges/vertex",
    "pairs": "count",
    "violations": "count",
    "max_ratio_to_bound": "ratio",
    "max_density_ratio": "ratio",
    "large_pairs": "count",
    "c_x": "bits",
    "c_y": "bits",
    "c_xy": "bits",
    "c_x_given_y": "bits",
    "c_y_given_x": "bits",
    "mutual": "bits",
    "trials": "count",
    "success_rate": "probability",
    "ambiguous_rate": "probability",
    "failure_bound": "probability",
    "mean_payload_bits": "bits",
    "mean_seed_bits": "bits",
    "mean_key_bits": "bits",
    "key_len": "bits",
    "message_bits": "bits",
    "seed_bits": "bits",
    "log2_degree": "bits",
    "max_distance": "probability",
    "secrecy_bound": "probability",
    "condition_rate": "probability",
    "secrecy_violations": "count",
    "in_shell_rate": "probability",
    "target_bits": "bits",
    "key_rel_error": "ratio",
    "comm_rel_error": "ratio",
    "m": "bits",
    "shell_size": "count",
    "delta": "fraction",
    "n": "bits",
    "w": "bits",
    "slack_s": "bits",
    "band": "bits",
    "size": "elements",
    "unique": "count",
    "ambiguous": "count",
    "no-candidate": "count",
    "mismatch": "count",
    "k": "count",
    "draws": "count",
    "failures": "count",
    "rate": "probability",
    "bound": "probability",
    "sigma": "probability",
    "max_deviation": "probability",
    "max_column_deviation": "probability",
    "max_gap": "probability",
    "tries": "count",
    "random_bits_per_party": "bits",
    "success_original": "probability",
    "success_derandomized": "probability",
    "random_bits_after": "bits",
    "edges": "count",
    "eps2": "probability",
    "s_bits": "bits",
    "density": "probability",
    "prefix_distance": "bits",
    "expected": "bits",
    "deviation": "bits",
    "pass_rate": "probability",
    "entropy_estimate": "bits",
}


def _units(result) -> dict:
    found = {}

    def walk(obj):
        if isinstance(obj, dict):
            for k, v in obj.items():
                if isinstance(v, (int, float)) and not isinstance(v, bool):
                    found[k] = _UNITS.get(k, "dimensionless")
                else:
                    walk(v)
        elif isinstance(obj, list):
            for v in obj:
                walk(v)

    walk(result)
    return dict(sorted(found.items()))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --- graph flags --------------------------------------------------------------


def _add_graph_flags(p: argparse.ArgumentParser, default_family: str = "point-line"):
    p.add_argument("--family", default=default_family, choices=["point-line", "euclidean", "hamming", "complete"])
    p.add_argument("--q", type=int, help="field order (point-line, euclidean)")
    p.add_argument("--r", type=int, default=1, help="squared radius (euclidean)")
    p.add_argument("--n", type=int, help="string length (hamming)")
    p.add_argument("--w", type=int, help="distance (hamming; default round(theta n))")
    p.add_argument("--theta", type=float, help="relative distance (hamming)")
    p.add_argument("--m-bits", type=int, help="log2 M for complete, or tensor with K_{M,M}")


def _graph_from(args) -> GraphSpec:
    fam = args.family
    if fam in ("point-line", "euclidean"):
        if args.q is None:
            raise UsageError(f"--q is required for --family {fam}")
        g = point_line(args.q) if fam == "point-line" else euclidean(args.q, args.r)
    elif fam == "hamming":
        if args.n is None:
            raise UsageError("--n is required for --family hamming")
        g = hamming(args.n, args.w) if args.w is not None else hamming_theta(args.n, args.theta)
    else:
        if args.m_bits is None:
            raise UsageError("--m-bits is required for --family complete")
        return complete_bipartite(args.m_bits)
    if args.m_bits:
        g = tensor_with_complete(g, args.m_bits)
    return g


def _graph_summary(g: GraphSpec) -> dict:
    return {"graph": g.to_dict(), "describe": g.describe(), "N": g.N, "degree": g.degree}


# --- subcommands --------------------------------------------------------------


def cmd_spectrum(args):
    from .spectral import character_sum_spectrum, closed_form_lambda2, numeric_spectrum

    g = _graph_from(args)
    closed = closed_form_lambda2(g)
    if args.method == "closed":
        if closed is None:
            raise UsageError(f"no closed form for {g.describe()}")
        result = {"lambda1": float(g.degree), "lambda2": closed, "method": "ClosedForm"}
    elif args.method == "character-sum":
        sv = character_sum_spectrum(g)
        result = {"lambda1": float(sv[0]), "lambda2": float(sv[1]), "method": "CharacterSum"}
    else:
        rep = numeric_spectrum(g, tol=args.tol, method=args.method, full=args.full, seed=args.seed)
        result = rep.as_dict()
    result.update(_graph_summary(g))
    result["closed_form_lambda2"] = closed
    if closed is not None:
        err = abs(result["lambda2"] - closed)
        result["abs_error"] = err
        if err > 1e-6:
            raise InvariantViolation(f"lambda2 {result['lambda2']} disagrees with closed form {closed}")
    return result, None


_MIXING_COLUMNS = ["family", "|A|", "|B|", "E(A,B)", "expected", "bound", "ratio"]


def _adversarial_pair(g: GraphSpec, kind: str, rng: np.random.Generator):
    from .mixing import line_pencil, neighbor_ball, prefix_cylinder

    if kind == "balls":
        return neighbor_ball(g, int(rng.integers(g.N)), int(rng.integers(0, 2)))
    if kind == "cylinders":
        length = int(rng.integers(0, g.n_bits + 1))
        return prefix_cylinder(g, int(rng.integers(1 << length)), length)
    return line_pencil(g, int(rng.integers(g.N)), int(rng.integers(1, g.q + 1)), rng)


def cmd_mixing(args):
    from .mixing import mixing_check, uniform_pair
    from .spectral import closed_form_lambda2, numeric_spectrum

    g = _graph_from(args)
    lam2 = closed_form_lambda2(g)
    if lam2 is None:
        lam2 = numeric_spectrum(g, seed=args.seed).lambda2
    if args.pairs < 1:
        raise UsageError("--pairs must be >= 1")
    size_a = args.size_a or (1 << args.size_a_bits if args.size_a_bits is not None else None)
    size_b = args.size_b or (1 << args.size_b_bits if args.size_b_bits is not None else None)
    rows, violations = [], 0
    max_ratio = max_density = 0.0
    large = 0
    for i in range(args.pairs):
        rng = stream(args.seed, "mixing", i)
        if args.adversarial and (args.kind != "mixed" or i % 2):
            pair = _adversarial_pair(g, args.adversarial, rng)
        else:
            sa = size_a or int(rng.integers(1, g.N + 1))
            sb = size_b or int(rng.integers(1, g.N + 1))
            pair = uniform_pair(g, sa, sb, rng)
        audit = mixing_check(g, pair, lam2, strict=False)
        violations += not audit.holds
        ratio = audit.deviation / audit.bound if audit.bound else (0.0 if audit.deviation == 0 else math.inf)
        max_ratio = max(max_ratio, ratio)
        max_density = max(max_density, audit.density_ratio) if audit.large_pair else max_density
        large += audit.large_pair
        rows.append([g.family, audit.size_a, audit.size_b, audit.e_count, audit.expected, audit.bound, ratio])
    result = {
        **_graph_summary(g),
        "lambda2": lam2,
        "pairs": args.pairs,
        "violations": violations,
        "max_ratio_to_bound": max_ratio,
        "large_pairs": large,
        "max_density_ratio": max_density,
    }
    if violations:
        # the report is still written; the exit code carries the failure
        result["_violation"] = f"{violations} mixing-lemma violations"
    return result, (_MIXING_COLUMNS, rows)


def cmd_profile(args):
    from .info import (
        hamming_profile_proxy,
        prefix_distance_check,
        profile_proxy,
        sample_fixed_distance_pair,
        solve_entropy,
    )

    if args.family == "hamming" and args.n is not None and args.n > 62 and not args.m_bits:
        # too wide to index vertices, but the profile only needs the counts
        n = args.n
        w = args.w if args.w is not None else int(round((args.theta or solve_entropy(0.5)) * n))
        result = {"graph": {"family": "hamming", "n": n, "w": w}, **hamming_profile_proxy(n, w).as_dict()}
    else:
        g = _graph_from(args)
        n, w = g.n_bits, g.w
        result = {**_graph_summary(g), **profile_proxy(g).as_dict()}
    if args.check_prefix is not None:
        if args.family != "hamming" or args.m_bits:
            raise UsageError("--check-prefix needs --family hamming")
        rng = stream(args.seed, "profile", "prefix")
        x, y = sample_fixed_distance_pair(n, w, rng)
        rep = prefix_distance_check(x, y, args.check_prefix, eps=args.eps, trials=args.trials, rng=rng)
        result["prefix_check"] = dataclasses.asdict(rep)
        if rep.pass_rate is not None and rep.pass_rate < 1 - args.eps:
            result["_violation"] = f"prefix pass rate {rep.pass_rate} below {1 - args.eps}"
    return result, None


def cmd_ska_run(args):
    from .ska import HammingPrefixConfig, ProtocolConfig, batch_stats, hamming_batch

    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    trial_rows: list = []
    if args.family == "hamming":
        if args.n is None:
            raise UsageError("--n is required for --family hamming")
        if args.m_bits:
            raise UsageError("the prefix protocol runs on the plain hamming family")
        if args.delta is None:
            raise UsageError("--delta is required for --family hamming")
        if args.w is None:
            from .info import solve_entropy

            theta = args.theta if args.theta is not None else solve_entropy(0.5)
            w = int(round(theta * args.n))
        else:
            w = args.w
        band = args.band if args.band == "hoeffding" else float(args.band)
        cfg = HammingPrefixConfig(args.n, w, args.delta, slack_s=args.slack if args.slack is not None else 1, band=band)
        result = hamming_batch(cfg, args.trials, seed=args.seed, rows=trial_rows)
    else:
        if args.delta is not None:
            raise UsageError("--delta applies to --family hamming only")
        g = _graph_from(args)
        cfg = ProtocolConfig(g, slack_s=args.slack if args.slack is not None else 2, key_len=args.key_len)
        result = batch_stats(cfg, args.trials, seed=args.seed, audit=args.audit, rows=trial_rows)
        result["config"] = cfg.as_dict()
        if args.audit and result["secrecy_violations"]:
            result["_violation"] = f"{result['secrecy_violations']} audits above the secrecy bound"
    result["transcript_layout"] = "[seed1][seed2][v]"
    table = None
    if trial_rows:
        cols = list(trial_rows[0].keys())
        table = (cols, [[r.get(c) for c in cols] for r in trial_rows])
    return result, table


def _structured_set(size: int, density: float, structure: str, rng: np.random.Generator) -> np.ndarray:
    if structure == "random":
        return rng.random((size, size)) < density
    S = np.zeros((size, size), dtype=bool)
    S[: int(round(density * size))] = True
    return S


def cmd_newman_verify(args):
    from .newman import sampling_failure_rate

    rng = stream(args.seed, "newman-verify")
    S = _structured_set(args.size, args.density, args.structure, rng)
    rep = sampling_failure_rate(S, args.delta, args.k, args.draws, rng)
    result = rep.as_dict()
    result.update(size=args.size, density=float(S.mean()), structure=args.structure)
    if not rep.within_bound:
        result["_violation"] = "failure rate above the sampling bound"
    return result, None


def cmd_newman_transform(args):
    from .newman import derandomize_protocol, parity_toy_protocol, ska_validity_transfer

    if args.protocol == "parity-toy":
        dp = derandomize_protocol(parity_toy_protocol(), args.k, stream(args.seed, "newman-transform"), delta=args.delta)
        result = dp.as_dict()
        result["gap_history"] = dp.gap_history
    else:
        result = ska_validity_transfer(
            q=args.q or 16, s_bits=args.s_bits, k=args.k, eps2=args.delta, seed=args.seed
        )
        if not result["holds"]:
            result["_violation"] = "derandomized success fell below the allowed margin"
    return result, None


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="64-bit seed (default 0)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output path (default stdout)")
    common.add_argument("--format", choices=["json", "csv"], default=argparse.SUPPRESS)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="worker count (results do not depend on it)")

    p = _Parser(prog="skagraph", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"skagraph {__version__}")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--threads", type=int, default=1)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("spectrum", parents=[common], help="lambda1/lambda2 of a graph")
    _add_graph_flags(sp)
    sp.add_argument("--method", default="auto", choices=["auto", "dense", "power", "closed", "character-sum"])
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.add_argument("--full", action="store_true")
    sp.set_defaults(func=cmd_spectrum)

    mp = sub.add_parser("mixing", parents=[common], help="mixing-lemma audit over random subset pairs")
    _add_graph_flags(mp)
    mp.add_argument("--pairs", type=int, default=1000)
    mp.add_argument("--size-a", type=int)
    mp.add_argument("--size-b", type=int)
    mp.add_argument("--size-a-bits", type=int)
    mp.add_argument("--size-b-bits", type=int)
    mp.add_argument("--adversarial", choices=["balls", "cylinders", "pencils"])
    mp.add_argument(
        "--kind", default="only", choices=["only", "mixed"], help="with --adversarial: all pairs, or alternate with uniform"
    )
    mp.set_defaults(func=cmd_mixing)

    pp = sub.add_parser("profile", parents=[common], help="log-cardinality complexity profile")
    _add_graph_flags(pp)
    pp.add_argument("--check-prefix", type=int, metavar="M", help="prefix-concentration audit (hamming)")
    pp.add_argument("--eps", type=float, default=0.01)
    pp.add_argument("--trials", type=int, default=10_000)
    pp.set_defaults(func=cmd_profile)

    ska = sub.add_parser("ska", help="key agreement simulation").add_subparsers(
        dest="ska_command", required=True, parser_class=_Parser
    )
    sr = ska.add_parser("run", parents=[common])
    _add_graph_flags(sr)
    sr.add_argument("--delta", type=float, default=None, help="prefix fraction (hamming)")
    sr.add_argument("--slack", type=int, default=None, help="slack bits (default 2, or 1 for hamming)")
    sr.add_argument("--key-len", type=int, default=None)
    sr.add_argument("--band", default="0.5", help="shell half-width in bits, or 'hoeffding'")
    sr.add_argument("--trials", type=int, default=1000)
    sr.add_argument("--audit", action="store_true")
    sr.set_defaults(func=cmd_ska_run)

    nw = sub.add_parser("newman", help="grid sampling and protocol derandomization").add_subparsers(
        dest="newman_command", required=True, parser_class=_Parser
    )
    nv = nw.add_parser("verify", parents=[common])
    nv.add_argument("--delta", type=float, default=0.1)
    nv.add_argument("--k", type=int, default=200)
    nv.add_argument("--draws", type=int, default=1000)
    nv.add_argument("--size", type=int, default=256)
    nv.add_argument("--density", type=float, default=0.3)
    nv.add_argument("--structure", default="rows", choices=["rows", "random"])
    nv.set_defaults(func=cmd_newman_verify)

    nt = nw.add_parser("transform", parents=[common])
    nt.add_argument("--protocol", default="parity-toy", choices=["parity-toy", "ska"])
    nt.add_argument("--k", type=int, default=256)
    nt.add_argument("--delta", type=float, default=0.05)
    nt.add_argument("--q", type=int, default=None)
    nt.add_argument("--s-bits", type=int, default=10)
    nt.set_defaults(func=cmd_newman_transform)
    return p


def _config_of(args) -> dict:
    skip = {"func", "out", "format", "threads"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def render(args, result: dict, table) -> str:
    config = _config_of(args)
    if args.format == "json":
        doc = {
            "schema": SCHEMA,
            "version": __version__,
            "seed": args.seed,
            "config": config,
            "units": _units(result),
            "result": result,
        }
        return json.dumps(doc, indent=2, sort_keys=True, allow_nan=True) + "\n"
    buf = io.StringIO()
    buf.write(f"# schema={SCHEMA} version={__version__} seed={args.seed}\n")
    buf.write(f"# config={json.dumps(config, sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    if table is None:
        w.writerow(["field", "value", "unit"])
        units = _units(result)
        for k, v in sorted(result.items()):
            if isinstance(v, (dict, list)):
                v = json.dumps(v, sort_keys=True)
            w.writerow([k, v, units.get(k, "")])
    else:
        cols, rows = table
        w.writerow(cols)
        w.writerows(rows)
    return buf.getvalue()


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        result, table = args.func(args)
        violation = result.pop("_violation", None)
        text = render(args, result, table)
        if args.out == "-":
            sys.stdout.write(text)
        else:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        if violation:
            print(f"skagraph: invariant violation: {violation}", file=sys.stderr)
            return InvariantViolation.exit_code
        return 0
    except SkagraphError as exc:
        print(f"skagraph: {exc}", file=sys.stderr)
        return exc.exit_code
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
