"""Command-line entry point: allocate, transpile, bench, verify.

Exit codes: 0 success, 1 verification failure or infeasible allocation,
2 usage or configuration errors.  All randomness derives from --seed.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench as bench_mod
from . import freqalloc as fa
from .hardware import TABLE3_MODULES, fabric_suite, load_calibration, load_topology
from .ir import circuit_depth
from .qasm import parse_qasm, serialize_qasm
from .router import ALGORITHMS, RouterConfig, lf_cost, transpile
from .verifier import clifford_equivalent, statevector_equivalent, unitary_equivalent
from .weyl import BasisGate
from .workloads import write_suite

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def parse_frequency(value) -> float:
    """Hz as a number, or strings like '4.2 GHz' / '200MHz'."""
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip().lower().replace(" ", "")
    for suffix, scale in (("ghz", 1e9), ("mhz", 1e6), ("khz", 1e3), ("hz", 1.0)):
        if text.endswith(suffix):
            return float(text[: -len(suffix)]) * scale
    return float(text)


def _load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise UsageError(f"missing file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc}") from exc


def _resolve_topology(name_or_path: str):
    if name_or_path in TABLE3_MODULES:
        return load_topology(name_or_path)
    path = Path(name_or_path)
    if not path.exists():
        raise UsageError(f"unknown topology {name_or_path!r} (not a Table-3 name or file)")
    data = _load_json(path)
    if "edges" in data and "module" not in data:
        return load_calibration(data)
    return load_topology(data)


# --- allocate -------------------------------------------------------------


def cmd_allocate(args) -> int:
    config = _load_json(args.config) if args.config else {}
    sizes = config.get("module_sizes", [2, 3, 4, 5])
    k = int(config.get("k", 0))
    delta_q = parse_frequency(config.get("delta_q", fa.DEFAULT_DELTA_Q))
    restarts = int(config.get("restarts", fa.NM_RESTARTS))
    seed = args.seed if args.seed is not None else int(config.get("seed", 0))
    bounds_cfg = config.get("bounds", {})
    bounds = fa.FrequencyBounds(
        qubit=tuple(parse_frequency(v) for v in bounds_cfg.get("qubit", fa.DEFAULT_QUBIT_BAND)),
        snail=tuple(parse_frequency(v) for v in bounds_cfg.get("snail", fa.DEFAULT_SNAIL_BAND)),
    )
    const_cfg = config.get("constants", {})
    constants = fa.PhysicalConstants(**const_cfg) if const_cfg else fa.PhysicalConstants()
    if config.get("fit_params"):
        params = fa.CostModelParams(**config["fit_params"])
    else:
        params = fa.calibrate_cost_model(constants)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    sep_lines = [
        "module_size,geometric_mean_fidelity,min_interaction_separation_hz,"
        "min_qubit_separation_hz,feasible"
    ]
    any_infeasible = False
    for n in sizes:
        module = fa.FreqModule(int(n))
        assign, report = fa.optimize_frequencies(
            module, bounds, params, k=k, delta_q=delta_q, seed=seed, restarts=restarts
        )
        payload = {
            "format_version": 1,
            "module_size": int(n),
            "omega_q_hz": list(assign.omega_q),
            "omega_s_hz": assign.omega_s,
            "report": report.to_dict(),
            "k": k,
            "delta_q_hz": delta_q,
            "seed": seed,
        }
        (out / f"report_n{n}.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        spec = fa.fidelity_table(report, name=f"allocated_n{n}", drop_worst=k)
        spec_payload = {
            "format_version": 1,
            "module": {
                "name": spec.name,
                "qubits": spec.qubits_per_module,
                "edges": [list(e) for e in spec.edges_per_module],
                "fidelities": list(spec.edge_fidelities),
            },
            "num_modules": 1,
        }
        (out / f"modulespec_n{n}.json").write_text(
            json.dumps(spec_payload, indent=2, sort_keys=True) + "\n"
        )
        sep = report.min_interaction_separation
        sep_lines.append(
            f"{n},{report.geometric_mean_fidelity!r},"
            f"{(-1.0 if sep == float('inf') else sep)!r},"
            f"{report.min_qubit_separation!r},{int(report.feasible)}"
        )
        any_infeasible = any_infeasible or not report.feasible
        print(
            f"n={n}: geometric-mean fidelity {report.geometric_mean_fidelity:.4f}, "
            f"min qubit separation {report.min_qubit_separation / 1e6:.1f} MHz, "
            f"{'feasible' if report.feasible else 'INFEASIBLE'}"
        )
    (out / "separations.csv").write_text("\n".join(sep_lines) + "\n")
    return EXIT_FAILED if any_infeasible else EXIT_OK


# --- transpile ------------------------------------------------------------


def _router_config(args) -> RouterConfig:
    return RouterConfig(
        algorithm=args.algorithm,
        num_seeds=args.seeds,
        beta=args.beta,
        extended_size=args.extended_size,
        aggression=args.aggression,
        post_selection=args.post_selection,
        basis=BasisGate.from_name(args.basis),
    )


def cmd_transpile(args) -> int:
    path = Path(args.circuit)
    if not path.exists():
        raise UsageError(f"missing file: {path}")
    dag = parse_qasm(path.read_text())
    cmap = _resolve_topology(args.topology)
    config = _router_config(args)
    result = transpile(dag, cmap, config, seed=args.seed)
    bench_mod.verify_result(dag, result, seed=args.seed)
    routed_text = serialize_qasm(result.circuit)
    if args.out:
        Path(args.out).write_text(routed_text)
    else:
        sys.stdout.write(routed_text)
    if args.metrics:
        payload = {
            "algorithm": config.algorithm,
            "metrics": result.metrics.to_dict(),
            "initial_layout": list(result.initial_layout),
            "final_layout": list(result.final_layout),
            "output_permutation": list(result.output_permutation),
            "verified": True,
        }
        Path(args.metrics).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


# --- bench ----------------------------------------------------------------


def cmd_bench(args) -> int:
    workdir = Path(args.workloads)
    if not workdir.exists() or not any(workdir.glob("*.qasm")):
        workdir.mkdir(parents=True, exist_ok=True)
        write_suite(workdir)
        print(f"generated builtin workload suite in {workdir}")
    workloads = bench_mod.load_workloads(workdir)
    if args.topologies == "all":
        topologies = fabric_suite()
    else:
        topologies = {name: _resolve_topology(name) for name in args.topologies.split(",")}
    algorithms = tuple(args.algorithms.split(","))
    for algo in algorithms:
        if algo not in ALGORITHMS:
            raise UsageError(f"unknown algorithm {algo!r}")
    post_modes = ("native", "fidelity") if args.post_selection == "both" else (args.post_selection,)
    try:
        rows, records = bench_mod.run_bench(
            workloads,
            topologies,
            algorithms=algorithms,
            post_modes=post_modes,
            num_seeds=args.seeds,
            seed=args.seed,
            basis=BasisGate.from_name(args.basis),
            beta=args.beta,
        )
    except bench_mod.BenchError as exc:
        print(f"bench aborted: {exc}", file=sys.stderr)
        return EXIT_FAILED
    summary = bench_mod.summarize(rows)
    paths = bench_mod.write_outputs(rows, records, summary, args.out)
    for s in summary:
        print(
            f"{s['algorithm']:8s} {s['post_selection']:8s} "
            f"mean dLF {s['mean_pct_delta_lf_vs_sabre']:+.2f}%  "
            f"mean dDepth {s['mean_pct_delta_depth_vs_sabre']:+.2f}%  ({s['runs']} runs)"
        )
    print(f"wrote {paths['results_csv']}, {paths['summary_csv']}, {paths['results_json']}")
    return EXIT_OK


# --- verify ---------------------------------------------------------------


def cmd_verify(args) -> int:
    ref_path, routed_path = Path(args.reference), Path(args.routed)
    for p in (ref_path, routed_path):
        if not p.exists():
            raise UsageError(f"missing file: {p}")
    ref = parse_qasm(ref_path.read_text())
    routed = parse_qasm(routed_path.read_text())
    perm = (
        [int(x) for x in args.perm.split(",")]
        if args.perm
        else list(range(routed.num_qubits))
    )
    input_map = [int(x) for x in args.input_map.split(",")] if args.input_map else None
    n = max(ref.num_qubits, routed.num_qubits)
    verdict = {"reference": str(ref_path), "routed": str(routed_path)}
    try:
        if args.method == "unitary" or (args.method == "auto" and n <= 8):
            verdict["method"] = "unitary"
            ok = unitary_equivalent(ref, routed, perm, tol=args.tol, input_map=input_map)
        elif args.method == "clifford":
            verdict["method"] = "clifford"
            ok = clifford_equivalent(ref, routed, perm, input_map=input_map)
        else:
            verdict["method"] = "statevector"
            ok = statevector_equivalent(
                ref, routed, perm, tol=args.tol, seed=args.seed, input_map=input_map
            )
    except Exception as exc:
        verdict["error"] = str(exc)
        print(json.dumps(verdict, indent=2, sort_keys=True))
        return EXIT_FAILED
    verdict["equivalent"] = bool(ok)
    print(json.dumps(verdict, indent=2, sort_keys=True))
    return EXIT_OK if ok else EXIT_FAILED


# --- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="finesse",
        description="Frequency allocation and fidelity-aware routing for coupler fabrics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_alloc = sub.add_parser("allocate", help="optimize module frequency assignments")
    p_alloc.add_argument("--config", help="JSON config (bounds, delta_q, k, constants)")
    p_alloc.add_argument("--out", default="out/allocate", help="output directory")
    p_alloc.add_argument("--seed", type=int, default=None)
    p_alloc.set_defaults(func=cmd_allocate)

    p_trans = sub.add_parser("transpile", help="route one circuit onto a fabric")
    p_trans.add_argument("circuit", help="OpenQASM 2 file")
    p_trans.add_argument("--topology", default="4q4e", help="Table-3 name or fixture JSON")
    p_trans.add_argument("--algorithm", default="finesse", choices=ALGORITHMS)
    p_trans.add_argument("--seeds", type=int, default=24, help="routing trials")
    p_trans.add_argument("--seed", type=int, default=0)
    p_trans.add_argument("--beta", type=float, default=1.0)
    p_trans.add_argument("--extended-size", type=int, default=20)
    p_trans.add_argument("--aggression", type=int, default=2)
    p_trans.add_argument("--post-selection", default="native", choices=("native", "fidelity"))
    p_trans.add_argument("--basis", default="siswap")
    p_trans.add_argument("--out", help="routed QASM path (default stdout)")
    p_trans.add_argument("--metrics", help="metrics JSON path")
    p_trans.set_defaults(func=cmd_transpile)

    p_bench = sub.add_parser("bench", help="full benchmark cross product")
    p_bench.add_argument("--workloads", default="out/workloads",
                         help="directory of .qasm files (builtin suite generated if empty)")
    p_bench.add_argument("--out", default="out/bench")
    p_bench.add_argument("--topologies", default="all", help="comma list of names/files, or 'all'")
    p_bench.add_argument("--algorithms", default=",".join(ALGORITHMS))
    p_bench.add_argument("--post-selection", default="both", choices=("both", "native", "fidelity"))
    p_bench.add_argument("--seeds", type=int, default=24)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--beta", type=float, default=1.0)
    p_bench.add_argument("--basis", default="siswap")
    p_bench.set_defaults(func=cmd_bench)

    p_verify = sub.add_parser("verify", help="check two circuits for equivalence")
    p_verify.add_argument("reference")
    p_verify.add_argument("routed")
    p_verify.add_argument("--perm", help="output wire -> reference wire, comma list")
    p_verify.add_argument("--input-map", help="reference wire -> input wire, comma list")
    p_verify.add_argument("--method", default="auto",
                          choices=("auto", "unitary", "statevector", "clifford"))
    p_verify.add_argument("--tol", type=float, default=1e-8)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits with code 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
