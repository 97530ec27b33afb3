"""Command line front end.

Four subcommands over one pipeline:

* ``profile`` measures hyperbolicity and checks geodesic thinness,
* ``verify``  runs the combinatorial identities (covering, partition,
  inner-product table, binomial suite),
* ``norms``   produces norm certificates and numerical sandwiches,
* ``all``     chains the three.

Every run prints a single JSON report to stdout and exits with

* 0 when everything passed,
* 2 when an exact identity or certified bound failed,
* 3 when a numerical solver came back inconclusive (and nothing failed),
* 4 on input errors (bad flags, unreadable files, malformed values).

Reports are deterministic for a fixed configuration, including the seed,
except for the top-level ``timings`` block.  ``--out DIR`` additionally
writes the report plus CSV tables (certificate vs |z|, bound vs n, the
witness schedule and its pointwise values) into DIR.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from . import __version__
from .corridor import (
    CorridorParams,
    covering_check,
    empirical_R1,
    empirical_params,
    paper_params,
    relation_Z,
    verify_partition,
)
from .factorization import (
    c0_exponent,
    constants_summary,
    eta_inner_table,
    power_kernel,
    sphere_certificate,
    sphere_kernel,
    theta_certificate,
    weak_amenability_witness,
    write_certificate,
)
from .graphs import Graph, GraphError, hyperbolicity_profile, thinness_check
from .normlab import DIM_CAP, SandwichError, psd_min_eig, sandwich_report
from .providers import ProviderSpec, build_graph, load_edge_list
from .subsets import binomial_suite

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_IDENTITY = 2
EXIT_INCONCLUSIVE = 3
EXIT_INPUT = 4

# largest snapshot for exhaustive delta measurement; above it we sample
EXACT_PROFILE_CAP = 120

DEFAULT_Z = (0.3 + 0j, 0.6 + 0j, 0.9 + 0j)
DEFAULT_N = (0, 1, 2, 3, 4)


class CliInputError(Exception):
    """Anything wrong with the invocation itself (flags, files, values)."""


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; 2 is taken, so reroute through the
    # input-error path instead.
    def error(self, message):
        raise CliInputError(message)


# ---------------------------------------------------------------------------
# argument parsing


def _parse_complex_list(text: str) -> tuple[complex, ...]:
    values = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            z = complex(tok)
        except ValueError:
            raise CliInputError(f"cannot parse {tok!r} as a complex number")
        values.append(z)
    if not values:
        raise CliInputError("empty --z list")
    return tuple(values)


def _parse_int_list(text: str) -> tuple[int, ...]:
    values = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            n = int(tok)
        except ValueError:
            raise CliInputError(f"cannot parse {tok!r} as an integer")
        if n < 0:
            raise CliInputError("--n values must be non-negative")
        values.append(n)
    if not values:
        raise CliInputError("empty --n list")
    return tuple(values)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="hypschur",
        description="corridor factorizations and norm certificates on "
                    "finite hyperbolic snapshots")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="command")

    def add_common(p):
        src = p.add_mutually_exclusive_group()
        src.add_argument("--input", metavar="FILE",
                         help="edge-list file (two ids per line, '#' comments, "
                              "optional 'base'/'ray' lines)")
        src.add_argument("--free-group", nargs=2, type=int,
                         metavar=("RANK", "RADIUS"),
                         help="Cayley ball of the free group of this rank")
        src.add_argument("--tree", nargs=2, type=int, metavar=("B", "D"),
                         help="rooted B-regular tree of depth D")
        src.add_argument("--line", type=int, metavar="N",
                         help="path with N edges")
        src.add_argument("--cycle", type=int, metavar="N",
                         help="cycle with N vertices")
        p.add_argument("--mode", choices=("paper", "empirical"),
                       default="empirical",
                       help="constant regime driving the checks "
                            "(default: empirical)")
        p.add_argument("--rho", type=float, default=None,
                       help="override the corridor width")
        p.add_argument("--z", type=_parse_complex_list, default=DEFAULT_Z,
                       metavar="LIST",
                       help="comma-separated multiplier parameters, |z| < 1 "
                            "(default: 0.3,0.6,0.9)")
        p.add_argument("--n", type=_parse_int_list, default=DEFAULT_N,
                       metavar="LIST",
                       help="comma-separated levels (default: 0,1,2,3,4)")
        p.add_argument("--schedule", type=int, default=4, metavar="N",
                       help="run the witness schedule for 1..N (default: 4)")
        p.add_argument("--tol", type=float, default=1e-9,
                       help="kernel evaluation tolerance (default: 1e-9)")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for all sampled subroutines (default: 0)")
        p.add_argument("--out", metavar="DIR", default=None,
                       help="directory for the JSON report and CSV tables")

    for name, blurb in (
            ("profile", "hyperbolicity constants and thinness check"),
            ("verify", "covering / partition / inner-product identities"),
            ("norms", "certificates, sandwiches and positivity checks"),
            ("all", "profile + verify + norms")):
        add_common(sub.add_parser(name, help=blurb, description=blurb))
    return parser


def _graph_from_args(args) -> Graph:
    if args.input is not None:
        try:
            return load_edge_list(args.input)
        except (OSError, GraphError, ValueError) as exc:
            raise CliInputError(f"cannot load {args.input}: {exc}")
    if args.free_group is not None:
        rank, radius = args.free_group
        spec = ProviderSpec("free_group", {"rank": rank, "radius": radius})
    elif args.tree is not None:
        b, d = args.tree
        spec = ProviderSpec("regular_tree", {"branching": b, "depth": d})
    elif args.line is not None:
        spec = ProviderSpec("line", {"length": args.line})
    elif args.cycle is not None:
        spec = ProviderSpec("cycle", {"length": args.cycle})
    else:
        raise CliInputError(
            "one of --input/--free-group/--tree/--line/--cycle is required")
    try:
        return build_graph(spec)
    except (GraphError, ValueError) as exc:
        raise CliInputError(str(exc))


def _validate(args) -> None:
    if args.tol <= 0:
        raise CliInputError("--tol must be positive")
    if args.schedule < 0:
        raise CliInputError("--schedule must be non-negative")
    if args.rho is not None and args.rho <= 0:
        raise CliInputError("--rho must be positive")
    for z in args.z:
        if abs(z) >= 1.0:
            raise CliInputError(f"|z| must be < 1, got {z}")


# ---------------------------------------------------------------------------
# serialization helpers


def _num(x):
    """JSON-safe scalar: non-finite floats become strings."""
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


def _frac(x) -> dict:
    return {"exact": str(x), "float": float(x)}


def _zrec(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def _cert_record(cert) -> dict:
    rec = {
        "kind": cert.kind,
        "bound": _num(cert.bound),
        "bound_log2": cert.bound_log2,
        "analytic_bound": _num(cert.analytic_bound),
        "analytic_bound_log2": cert.analytic_bound_log2,
    }
    if cert.z is not None:
        rec["z"] = _zrec(cert.z)
    if cert.n is not None:
        rec["n"] = cert.n
    if cert.k_max is not None:
        rec["K_max"] = cert.k_max
    return rec


def _params_record(params: CorridorParams) -> dict:
    return {
        "mode": params.mode,
        "rho": str(params.rho),
        "r0": params.r0,
        "r1": params.r1,
        "delta": None if params.delta is None else float(params.delta),
    }


# ---------------------------------------------------------------------------
# tasks


def _run_profile(graph: Graph, args, results: dict, failures: list) -> "HyperbolicityProfile":
    mode = "exact" if graph.vertex_count <= EXACT_PROFILE_CAP else "sampled"
    prof = hyperbolicity_profile(graph, mode=mode, seed=args.seed)
    thin = thinness_check(graph, prof.delta_impl, seed=args.seed)
    results["hyperbolicity"] = {
        "delta_thin": _frac(prof.delta_thin),
        "delta_four_point": _frac(prof.delta_four_point),
        "delta_impl": _frac(prof.delta_impl),
        "sampled": prof.sampled,
        "triangles_checked": prof.triangles_checked,
        "quadruples_checked": prof.quadruples_checked,
        "exhaustive_geodesics": prof.exhaustive_geodesics,
    }
    results["thinness"] = {
        "delta": _frac(thin.delta),
        "checked": thin.checked,
        "passed": thin.passed,
        "worst_slack": _frac(thin.worst_slack),
        "worst_witness": list(thin.worst_witness) if thin.worst_witness else None,
        "violations": [list(v) for v in thin.violations[:8]],
    }
    if not thin.passed:
        failures.append("thinness")
    return prof


def _run_verify(graph: Graph, params: CorridorParams, args,
                results: dict, failures: list) -> None:
    n_ver = max(5, *args.n) if args.n else 5
    scan = empirical_R1(graph, params, n_ver)
    results["corridor_scan"] = {
        "n_max": scan.n_max,
        "rho": str(scan.rho),
        "r1_empirical": scan.r1,
        "r1_active": params.r1,
        "witness": list(scan.witness) if scan.witness else None,
        "paper_bound_ok": scan.paper_bound_ok,
    }
    if scan.r1 > params.r1:
        # Z complements do not reach far enough; the partition will break.
        failures.append("corridor_scan")

    cov = covering_check(graph, params, n_ver)
    results["covering"] = {
        "n_max": cov.n_max,
        "core_size": cov.core_size,
        "checked_pairs": cov.checked_pairs,
        "passed": cov.passed,
        "violations": [list(v) for v in cov.violations[:8]],
    }
    if not cov.passed:
        failures.append("covering")

    part = verify_partition(graph, params, n_ver)
    results["partition"] = {
        "n_max": part.n_max,
        "core_size": part.core_size,
        "checked_pairs": part.checked_pairs,
        "passed": part.passed,
        "violations": [list(v) for v in part.violations[:8]],
    }
    if not part.passed:
        failures.append("partition")

    grids = entries = mismatches = 0
    for n in range(n_ver + 1):
        for k in range(n + 1):
            table = eta_inner_table(graph, k, n - k, params)
            chi = relation_Z(graph, k, n - k, params).pairs
            grids += 1
            entries += table.size
            mismatches += int((table != chi).sum())
    results["inner_product_table"] = {
        "grids": grids,
        "entries": entries,
        "mismatches": mismatches,
        "passed": mismatches == 0,
    }
    if mismatches:
        failures.append("inner_product_table")

    suite = binomial_suite(8)
    results["binomial_suite"] = {
        "universe": suite.universe,
        "pairs_checked": suite.pairs_checked,
        "norm_checks": suite.norm_checks,
        "passed": suite.passed,
        "failures": [list(f) for f in suite.failures[:8]],
    }
    if not suite.passed:
        failures.append("binomial_suite")


def _run_norms(graph: Graph, params: CorridorParams, args, out_dir,
               results: dict, failures: list, inconclusive: list) -> None:
    c0e = c0_exponent(graph, params)
    ceiling_lg = 1.0 + c0e          # log2(2 C0)
    slack = 1e-7

    theta_certs = {}
    theta_rows = []
    for z in args.z:
        cert = theta_certificate(graph, z, params, tol=args.tol)
        theta_certs[z] = cert
        ok = cert.bound_log2 <= cert.analytic_bound_log2 + slack
        theta_rows.append({
            "z": _zrec(z),
            "abs_z": abs(z),
            "certificate": _cert_record(cert),
            "within_analytic": ok,
        })
        if not ok:
            failures.append(f"theta z={z}")
    results["theta_certificates"] = theta_rows

    sphere_certs = {}
    sphere_rows = []
    for n in args.n:
        cert = sphere_certificate(graph, n, params)
        sphere_certs[n] = cert
        per_level_lg = cert.bound_log2 - math.log2(n + 1)
        ok = per_level_lg <= ceiling_lg + slack
        sphere_rows.append({
            "n": n,
            "certificate": _cert_record(cert),
            "per_level_log2": per_level_lg,
            "ceiling_log2": ceiling_lg,
            "within_ceiling": ok,
        })
        if not ok:
            failures.append(f"sphere n={n}")
    results["sphere_certificates"] = sphere_rows

    witness_rows = []
    witnesses = []
    witness_ceiling_lg = math.log2(3.0) + c0e   # log2(2 C0 + 1) <= log2(3 C0)
    for n in range(1, args.schedule + 1):
        wit = weak_amenability_witness(graph, n, params)
        witnesses.append(wit)
        ok = wit.certificate.bound_log2 <= witness_ceiling_lg + slack
        witness_rows.append({
            "n": wit.n,
            "r": wit.r,
            "cutoff": wit.cutoff,
            "certificate": _cert_record(wit.certificate),
            "group_provider": wit.group_provider,
            "warning": wit.warning,
            "min_value": min(wit.values),
            "max_value": max(wit.values),
            "within_ceiling": ok,
        })
        if not ok:
            failures.append(f"witness n={n}")
    results["witness_schedule"] = witness_rows

    sandwich_rows = []

    def _sandwich(label: str, kernel, cert) -> None:
        try:
            rep = sandwich_report(kernel, certificate=cert, tol=1e-6,
                                  seed=args.seed)
        except SandwichError as exc:
            sandwich_rows.append({"section": label, "passed": False,
                                  "error": str(exc)})
            failures.append(f"sandwich {label}")
            return
        row = {
            "section": label,
            "dim": rep.dim,
            "lower": rep.lower.value,
            "lower_strategy": rep.lower.strategy,
            "cb": None if rep.cb is None else rep.cb.value,
            "cb_inconclusive": bool(rep.cb is not None and rep.cb.inconclusive),
            "cb_iterations": None if rep.cb is None else rep.cb.iterations,
            "certificate_bound_log2": None if cert is None else cert.bound_log2,
            "gap_lower_cb": _num(rep.gap_lower_cb),
            "gap_cb_certificate": _num(rep.gap_cb_certificate),
            "passed": True,
        }
        sandwich_rows.append(row)
        if rep.cb is not None and rep.cb.inconclusive:
            inconclusive.append(f"sandwich {label}")

    for z in args.z:
        if z.imag == 0 and 0 < z.real < 1:
            _sandwich(f"theta r={z.real}", power_kernel(graph, z),
                      theta_certs[z])
    for n in args.n:
        kernel = sphere_kernel(graph, n)
        if kernel.values.any():
            _sandwich(f"sphere n={n}", kernel, sphere_certs[n])
    results["sandwiches"] = sandwich_rows

    is_tree = graph.edge_count() == graph.vertex_count - 1
    psd_rows = []
    for z in args.z:
        if not (z.imag == 0 and 0 < z.real < 1):
            continue
        eig = psd_min_eig(power_kernel(graph, z))
        ok = (not is_tree) or eig >= -1e-9
        psd_rows.append({"r": z.real, "min_eig": eig, "tree": is_tree,
                         "passed": ok})
        if not ok:
            failures.append(f"psd r={z.real}")
    results["radial_positivity"] = psd_rows

    if out_dir is not None:
        _write_norm_csvs(graph, out_dir, theta_rows, sphere_rows,
                         witness_rows, witnesses)
        for z, cert in theta_certs.items():
            tag = f"{z.real:+.3f}{z.imag:+.3f}j".replace("+", "p").replace("-", "m")
            write_certificate(cert, out_dir / f"theta_{tag}.json")


def _write_norm_csvs(graph: Graph, out_dir: Path, theta_rows, sphere_rows,
                     witness_rows, witnesses) -> None:
    with open(out_dir / "theta_vs_z.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["z_re", "z_im", "abs_z", "bound_log2",
                    "analytic_bound_log2", "K_max"])
        for row in theta_rows:
            c = row["certificate"]
            w.writerow([row["z"]["re"], row["z"]["im"], row["abs_z"],
                        c["bound_log2"], c["analytic_bound_log2"],
                        c.get("K_max", "")])
    with open(out_dir / "sphere_vs_n.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "bound_log2", "per_level_log2", "ceiling_log2"])
        for row in sphere_rows:
            w.writerow([row["n"], row["certificate"]["bound_log2"],
                        row["per_level_log2"], row["ceiling_log2"]])
    with open(out_dir / "witness_schedule.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "r", "cutoff", "tail_log2", "bound_log2"])
        for row in witness_rows:
            w.writerow([row["n"], row["r"], row["cutoff"],
                        row["certificate"].get("K_max", ""),
                        row["certificate"]["bound_log2"]])
    if witnesses:
        dist = graph.distances(graph.base_point)
        with open(out_dir / "phi_values.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["vertex", "label", "distance"]
                       + [f"phi_{wit.n}" for wit in witnesses])
            for v in graph.vertices():
                w.writerow([v, graph.label(v), int(dist[v])]
                           + [wit.values[v] for wit in witnesses])


# ---------------------------------------------------------------------------
# driver


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise CliInputError("a subcommand is required "
                                "(profile, verify, norms, all)")
        _validate(args)
        graph = _graph_from_args(args)
    except CliInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    timings: dict[str, float] = {}
    results: dict = {}
    failures: list[str] = []
    inconclusive: list[str] = []
    out_dir = None
    if args.out is not None:
        out_dir = Path(args.out)
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            print(f"error: cannot create {out_dir}: {exc}", file=sys.stderr)
            return EXIT_INPUT

    t0 = time.perf_counter()
    mode = "exact" if graph.vertex_count <= EXACT_PROFILE_CAP else "sampled"
    profile = hyperbolicity_profile(graph, mode=mode, seed=args.seed)
    timings["hyperbolicity_profile"] = time.perf_counter() - t0

    n_ver = max(5, *args.n) if args.n else 5
    try:
        t0 = time.perf_counter()
        rho = None if args.rho is None else Fraction(str(args.rho))
        emp_params = empirical_params(graph, n_ver,
                                      rho=None if rho is None else float(rho))
        pap_params = paper_params(profile.delta_impl)
        timings["constants"] = time.perf_counter() - t0
    except GraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    if args.mode == "paper":
        active = pap_params if rho is None else replace(pap_params, rho=rho)
    else:
        active = emp_params

    t0 = time.perf_counter()
    constants = {
        "empirical": constants_summary(graph, emp_params),
        "paper": constants_summary(graph, pap_params),
    }
    timings["constants_summary"] = time.perf_counter() - t0

    steps = {"profile": ("profile",), "verify": ("verify",),
             "norms": ("norms",), "all": ("profile", "verify", "norms")}
    try:
        for step in steps[args.command]:
            t0 = time.perf_counter()
            if step == "profile":
                _run_profile(graph, args, results, failures)
            elif step == "verify":
                _run_verify(graph, active, args, results, failures)
            else:
                _run_norms(graph, active, args, out_dir, results, failures,
                           inconclusive)
            timings[step] = time.perf_counter() - t0
    except (GraphError, ArithmeticError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    report = {
        "schema_version": SCHEMA_VERSION,
        "command": args.command,
        "config": {
            "provider": graph.provider,
            "mode": args.mode,
            "rho_override": args.rho,
            "z": [_zrec(z) for z in args.z],
            "n": list(args.n),
            "schedule": args.schedule,
            "tol": args.tol,
            "seed": args.seed,
            "out": args.out,
        },
        "graph": {
            "vertices": graph.vertex_count,
            "edges": graph.edge_count(),
            "base_point": graph.base_point,
            "core_radius": graph.core_radius,
            "delta_thin": _frac(profile.delta_thin),
            "delta_four_point": _frac(profile.delta_four_point),
            "delta_impl": _frac(profile.delta_impl),
            "delta_sampled": profile.sampled,
        },
        "params": {
            "active": _params_record(active),
            "empirical": _params_record(emp_params),
            "paper": _params_record(pap_params),
        },
        "constants": constants,
        "results": results,
        "verdicts": {
            "passed": not failures and not inconclusive,
            "failures": failures,
            "inconclusive": inconclusive,
        },
        "timings": timings,
    }
    text = json.dumps(report, indent=2)
    print(text)
    if out_dir is not None:
        (out_dir / "report.json").write_text(text + "\n")

    if failures:
        return EXIT_IDENTITY
    if inconclusive:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
