"""Command line pipeline: ingest -> estimate -> spectrum -> graph -> report.

Every run has a digest computed from the tool version, the effective
config, and the input file digests; all artifacts carry it in a
`# run <digest>` stamp so any output can be traced to its manifest.
Thread count is excluded from the digest: it cannot change results.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace
from pathlib import Path

from . import io
from ._version import __version__
from .errors import InputError, LeadLagError, NumericalError
from .estimator import (
    EstimatorConfig,
    coefficients_for_series,
    complex_covariance_matrix,
    covariance_to_correlation,
)
from .graphs import (
    THETA_SYM_DEFAULT,
    degree_report,
    magnitude_phase_scatter,
    max_spanning_tree,
    orient_edges,
    pmfg,
)
from .ingest import (
    ColumnSchema,
    SectorTable,
    filter_active,
    load_sector_table,
    parse_quotes,
)
from .series import build_tick_series, parse_sessions, rescale_to_circle, splice_sessions
from .spectral import classify_components, eig_hermitian, residual_correlation
from .synth import generate, scenario_from_dict


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; that code is reserved for
    numerical failure here, so usage problems become input errors."""

    def error(self, message):
        raise InputError(message)


def build_parser() -> _Parser:
    p = _Parser(prog="leadlag",
                description="Lead-lag correlation analysis of asynchronous "
                            "tick data via complex Fourier correlation matrices.")
    p.add_argument("--version", action="version", version=f"leadlag {__version__}")
    p.add_argument("--config", metavar="FILE",
                   help="JSON file with default values for any option")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads for per-asset stages (default 1)")
    p.add_argument("--seed", type=int, default=None,
                   help="override the scenario seed for simulate/pipeline")
    p.add_argument("--backend", choices=("auto", "compiled", "numpy"),
                   default="auto", help="coefficient kernel backend")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")

    sp = sub.add_parser("simulate", help="generate synthetic quote data")
    sp.add_argument("--scenario", required=True, metavar="FILE",
                    help="scenario JSON (direct fields or a preset form)")
    sp.add_argument("--out-dir", required=True, metavar="DIR")

    sp = sub.add_parser("ingest", help="parse quotes into a series file")
    sp.add_argument("--quotes", required=True, metavar="FILE")
    sp.add_argument("--sessions", default=None, metavar="SPEC",
                    help='windows like "09:00-11:30,12:30-15:00" or "0-9000"'
                         " (default: one window covering the data)")
    sp.add_argument("--strict", action="store_true",
                    help="fail on events outside all sessions")
    sp.add_argument("--min-events", type=int, default=2, dest="min_events",
                    help="drop assets with fewer retained events (default 2)")
    sp.add_argument("--out", required=True, metavar="FILE")
    sp.add_argument("--report", default=None, metavar="FILE",
                    help="where to write the parse report JSON")

    sp = sub.add_parser("estimate", help="estimate the complex correlation matrix")
    sp.add_argument("--series", required=True, metavar="FILE")
    sp.add_argument("--tau", type=float, default=60.0,
                    help="cutoff scale in seconds (default 60)")
    sp.add_argument("--out", required=True, metavar="FILE")
    sp.add_argument("--dump-coeffs", default=None, metavar="DIR", dest="dump_coeffs",
                    help="also dump per-asset (k, a_k, b_k) tables")

    sp = sub.add_parser("spectrum", help="eigenanalysis of a matrix file")
    sp.add_argument("--matrix", required=True, metavar="FILE")
    sp.add_argument("--sectors", default=None, metavar="FILE")
    sp.add_argument("--drop-market", action="store_true", dest="drop_market",
                    help="exclude the market component from coefficient output")
    sp.add_argument("--top", type=int, default=None, metavar="M",
                    help="limit eigenvector output to the first M components")
    sp.add_argument("--out-dir", required=True, metavar="DIR")

    sp = sub.add_parser("graph", help="build a filtered graph from a matrix file")
    sp.add_argument("--matrix", required=True, metavar="FILE")
    sp.add_argument("--kind", choices=("mst", "pmfg"), default="mst")
    sp.add_argument("--no-drop-market", action="store_false", dest="drop_market",
                    default=True, help="filter the raw matrix instead of the "
                    "market-mode-removed one")
    sp.add_argument("--theta-sym", type=float, default=THETA_SYM_DEFAULT,
                    dest="theta_sym", metavar="RAD",
                    help="|theta| below this marks an edge bidirectional")
    sp.add_argument("--sectors", default=None, metavar="FILE")
    sp.add_argument("--out-dir", required=True, metavar="DIR")

    sp = sub.add_parser("report", help="degree and magnitude-phase reports")
    sp.add_argument("--matrix", required=True, metavar="FILE")
    sp.add_argument("--kind", choices=("mst", "pmfg"), default="mst")
    sp.add_argument("--no-drop-market", action="store_false", dest="drop_market",
                    default=True)
    sp.add_argument("--theta-sym", type=float, default=THETA_SYM_DEFAULT,
                    dest="theta_sym", metavar="RAD")
    sp.add_argument("--sectors", default=None, metavar="FILE")
    sp.add_argument("--out-dir", required=True, metavar="DIR")

    sp = sub.add_parser("pipeline", help="run all stages into one directory")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario", default=None, metavar="FILE")
    src.add_argument("--quotes", default=None, metavar="FILE")
    sp.add_argument("--sessions", default=None, metavar="SPEC")
    sp.add_argument("--sectors", default=None, metavar="FILE",
                    help="sector file for real data (synthetic scenarios "
                         "emit their own)")
    sp.add_argument("--strict", action="store_true")
    sp.add_argument("--min-events", type=int, default=2, dest="min_events")
    sp.add_argument("--tau", type=float, default=60.0)
    sp.add_argument("--theta-sym", type=float, default=THETA_SYM_DEFAULT,
                    dest="theta_sym", metavar="RAD")
    sp.add_argument("--kinds", default="mst,pmfg",
                    help="comma list of graph kinds (default mst,pmfg)")
    sp.add_argument("--no-drop-market", action="store_false", dest="drop_market",
                    default=True)
    sp.add_argument("--dump-coeffs", action="store_true", dest="dump_coeffs",
                    help="also write per-asset coefficient tables")
    sp.add_argument("--resume", action="store_true",
                    help="keep existing artifacts, regenerate missing ones")
    sp.add_argument("--out-dir", required=True, metavar="DIR")
    return p


def _extract_config_path(argv) -> str | None:
    for i, arg in enumerate(argv):
        if arg == "--config":
            if i + 1 >= len(argv):
                raise InputError("--config needs a file argument")
            return argv[i + 1]
        if arg.startswith("--config="):
            return arg.split("=", 1)[1]
    return None


def _apply_config(parser: _Parser, argv) -> dict:
    path = _extract_config_path(argv)
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            config = json.load(fh)
    except FileNotFoundError:
        raise InputError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(config, dict):
        raise InputError(f"config file {path} must hold a JSON object")
    known = set()
    parsers = [parser]
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            parsers.extend(action.choices.values())
    for sp in parsers:
        for action in sp._actions:
            if action.dest not in ("help", "command", "config"):
                known.add(action.dest)
    unknown = set(config) - known - {"schema"}
    if unknown:
        raise InputError(f"unknown config keys: {sorted(unknown)}")
    defaults = {k: v for k, v in config.items() if k != "schema"}
    for sp in parsers:
        sp.set_defaults(**{k: v for k, v in defaults.items()
                           if any(a.dest == k for a in sp._actions)})
    return config


def _schema_from_config(config: dict) -> ColumnSchema:
    if "schema" in config:
        return ColumnSchema.from_dict(config["schema"])
    return ColumnSchema()


def _backend_arg(args) -> str | None:
    return None if args.backend == "auto" else args.backend


def _load_sectors(path, warnings) -> SectorTable | None:
    if path is None:
        return None
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return load_sector_table(fh)
    except FileNotFoundError:
        warnings.append(f"sector file {path} not found; proceeding without sectors")
        return None


# --- stage helpers (shared by subcommands and the pipeline) ---------------


def _ingest_series(quotes_path, sessions_text, strict, min_events, schema):
    """Quotes file -> list of rescaled series + stats for reporting."""
    with open(quotes_path, "r", encoding="utf-8") as fh:
        events, report = parse_quotes(fh, schema)
    if not events:
        raise InputError(f"{quotes_path}: no valid quote rows")
    if sessions_text:
        sessions = parse_sessions(sessions_text)
    else:
        last = max(ev.time for rows in events.values() for ev in rows)
        sessions = [(0.0, float(last + 1))]
    series = []
    skipped = {}
    for ticker in sorted(events):
        try:
            built = build_tick_series(events[ticker], ticker)
            spliced, stats = splice_sessions(built, sessions, strict=strict)
            series.append(rescale_to_circle(spliced))
        except InputError as exc:
            if strict:
                raise
            skipped[ticker] = str(exc)
    series, inactive = filter_active(series, min_events)
    if not series:
        raise InputError("no assets left after filtering")
    stats = {
        "sessions": [[a, b] for a, b in sessions],
        "t_span": series[0].t_span,
        "assets": len(series),
        "events_retained": {s.asset_id: s.n_events for s in series},
        "assets_skipped": skipped,
        "assets_below_min_events": inactive,
        "parse": report.to_dict(),
    }
    return series, stats


def _estimate_matrix(series, tau, threads, backend):
    base = EstimatorConfig(tau=tau)
    coeffs = coefficients_for_series(series, base, threads=threads,
                                     backend=backend)
    cfg = base.bound(coeffs[0].t_span)
    sigma = complex_covariance_matrix(coeffs, cfg)
    rho = covariance_to_correlation(sigma, [c.asset_id for c in coeffs],
                                    tau=tau, t_span=cfg.t_span,
                                    n_harmonics=coeffs[0].n_harmonics)
    return rho, coeffs


def _graph_matrix(rho, drop_market):
    """The matrix the graph stage filters: mode-removed and re-normalized
    by default."""
    if not drop_market or rho.n < 2:
        return rho
    decomp = eig_hermitian(rho)
    return residual_correlation(rho, decomp)


def _build_graph(rho, kind, theta_sym):
    if kind == "mst":
        graph = max_spanning_tree(rho)
    elif kind == "pmfg":
        graph = pmfg(rho)
    else:
        raise InputError(f"unknown graph kind {kind!r}")
    return orient_edges(graph, rho, theta_sym=theta_sym)


# --- subcommands -----------------------------------------------------------


def cmd_simulate(args, config):
    scenario = _load_scenario(args.scenario, args.seed)
    run_id = io.run_digest(__version__, "simulate",
                           {"scenario": scenario.to_dict()}, {})
    result = generate(scenario)
    out = Path(args.out_dir)
    io.write_quote_file(out / "quotes.csv", result.quotes, run_id)
    io.write_truth_file(out / "truth.json", result.truth, run_id)
    _write_text_json(out / "scenario.json", scenario.to_dict())
    wrote_sectors = _emit_scenario_sectors(out, scenario, run_id)
    n_events = sum(len(v) for v in result.quotes.values())
    print(f"simulate: {len(result.series)} assets, {n_events} quote events"
          f" -> {out}")
    if wrote_sectors:
        print(f"simulate: sector table -> {out / 'sectors.csv'}")
    print(f"run {run_id}")
    return 0


def _load_scenario(path, seed_override):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise InputError(f"scenario file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"scenario file {path} is not valid JSON: {exc}") from None
    scenario = scenario_from_dict(data)
    if seed_override is not None:
        scenario = replace(scenario, seed=seed_override)
    return scenario


def _emit_scenario_sectors(out_dir, scenario, run_id) -> bool:
    rows = [(a.ticker, a.subsector or a.sector, a.sector)
            for a in scenario.assets if a.sector is not None]
    if not rows:
        return False
    io.write_sector_file(Path(out_dir) / "sectors.csv", rows, run_id)
    return True


def _write_text_json(path, data):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_ingest(args, config):
    schema = _schema_from_config(config)
    run_id = io.run_digest(__version__, "ingest", {
        "sessions": args.sessions, "strict": args.strict,
        "min_events": args.min_events,
        "schema": schema.__dict__,
    }, {"quotes": io.file_digest(args.quotes)})
    series, stats = _ingest_series(args.quotes, args.sessions, args.strict,
                                   args.min_events, schema)
    io.write_series_file(args.out, series, run_id)
    report_path = args.report or str(Path(args.out).with_suffix(".report.json"))
    _write_text_json(report_path, {"run": run_id, **stats})
    total = sum(s.n_events for s in series)
    print(f"ingest: {len(series)} assets, {total} retained events,"
          f" T={stats['t_span']:g}s -> {args.out}")
    print(f"run {run_id}")
    return 0


def cmd_estimate(args, config):
    run_id = io.run_digest(__version__, "estimate", {"tau": args.tau},
                           {"series": io.file_digest(args.series)})
    series = io.read_series_file(args.series)
    rho, coeffs = _estimate_matrix(series, args.tau, args.threads,
                                   _backend_arg(args))
    io.write_matrix_file(args.out, rho, run_id)
    if args.dump_coeffs:
        io.write_coeff_dump(args.dump_coeffs, coeffs, run_id)
    print(f"estimate: n={rho.n} K={rho.n_harmonics} tau={args.tau:g}"
          f" T={rho.t_span:g} -> {args.out}")
    print(f"run {run_id}")
    return 0


def cmd_spectrum(args, config):
    warnings = []
    sectors = _load_sectors(args.sectors, warnings)
    run_id = io.run_digest(__version__, "spectrum", {
        "drop_market": args.drop_market, "top": args.top,
    }, _digests(matrix=args.matrix, sectors=args.sectors if sectors else None))
    rho = io.read_matrix_file(args.matrix)
    decomp = eig_hermitian(rho)
    tags, summaries = classify_components(decomp, sectors=sectors)
    out = Path(args.out_dir)
    io.write_eigenvalues_csv(out / "eigenvalues.csv", decomp, run_id)
    components = list(range(1, decomp.n + 1))
    if args.drop_market:
        components = components[1:]
    if args.top is not None:
        if args.top < 1:
            raise InputError(f"--top must be >= 1, got {args.top}")
        components = components[: args.top]
    io.write_eigenvectors_csv(out / "eigenvectors.csv", decomp, sectors,
                              run_id, components=components)
    io.write_components_csv(out / "components.csv", tags, run_id)
    if sectors is not None:
        io.write_sector_summary_csv(out / "sector_summary.csv", summaries, run_id)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    top3 = ", ".join(f"{w:.4f}" for w in decomp.eigenvalues[:3])
    print(f"spectrum: n={decomp.n}, leading eigenvalues {top3} -> {out}")
    print(f"run {run_id}")
    return 0


def _digests(**paths) -> dict:
    return {name: io.file_digest(p) for name, p in paths.items() if p}


def cmd_graph(args, config):
    warnings = []
    sectors = _load_sectors(args.sectors, warnings)
    run_id = io.run_digest(__version__, "graph", {
        "kind": args.kind, "drop_market": args.drop_market,
        "theta_sym": args.theta_sym,
    }, _digests(matrix=args.matrix, sectors=args.sectors if sectors else None))
    rho = io.read_matrix_file(args.matrix)
    rho_g = _graph_matrix(rho, args.drop_market)
    graph = _build_graph(rho_g, args.kind, args.theta_sym)
    out = Path(args.out_dir)
    io.write_graphml(out / f"{args.kind}.graphml", graph, sectors, run_id)
    io.write_dot(out / f"{args.kind}.dot", graph, sectors, run_id)
    io.write_edges_csv(out / f"{args.kind}_edges.csv", graph, run_id)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"graph: {args.kind} with {len(graph.edges)} edges"
          f" ({'mode-removed' if args.drop_market else 'raw'} matrix) -> {out}")
    print(f"run {run_id}")
    return 0


def cmd_report(args, config):
    warnings = []
    sectors = _load_sectors(args.sectors, warnings)
    run_id = io.run_digest(__version__, "report", {
        "kind": args.kind, "drop_market": args.drop_market,
        "theta_sym": args.theta_sym,
    }, _digests(matrix=args.matrix, sectors=args.sectors if sectors else None))
    rho = io.read_matrix_file(args.matrix)
    rho_g = _graph_matrix(rho, args.drop_market)
    graph = _build_graph(rho_g, args.kind, args.theta_sym)
    out = Path(args.out_dir)
    io.write_degrees_csv(out / "degrees.csv", degree_report(graph, sectors), run_id)
    io.write_scatter_csv(out / "scatter.csv",
                         magnitude_phase_scatter(rho, sectors), run_id)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(f"report: degrees over {args.kind}, scatter over {rho.n * (rho.n - 1) // 2}"
          f" pairs -> {out}")
    print(f"run {run_id}")
    return 0


# --- pipeline --------------------------------------------------------------


def cmd_pipeline(args, config):
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    kinds = [k.strip() for k in args.kinds.split(",") if k.strip()]
    for k in kinds:
        if k not in ("mst", "pmfg"):
            raise InputError(f"unknown graph kind {k!r}")
    schema = _schema_from_config(config)

    scenario = None
    inputs = {}
    snapshot = {
        "sessions": args.sessions, "strict": args.strict,
        "min_events": args.min_events, "tau": args.tau,
        "theta_sym": args.theta_sym, "kinds": kinds,
        "drop_market": args.drop_market, "dump_coeffs": args.dump_coeffs,
        "schema": schema.__dict__,
    }
    if args.scenario:
        scenario = _load_scenario(args.scenario, args.seed)
        snapshot["scenario"] = scenario.to_dict()
    else:
        inputs["quotes"] = io.file_digest(args.quotes)
        if args.sectors:
            inputs["sectors"] = io.file_digest(args.sectors)
    run_id = io.run_digest(__version__, "pipeline", snapshot, inputs)

    quotes_path = str(out / "quotes.csv") if scenario else args.quotes
    sectors_path = args.sectors
    if scenario and any(a.sector is not None for a in scenario.assets):
        sectors_path = str(out / "sectors.csv")

    stages = []
    if scenario is not None:
        def stage_simulate():
            result = generate(scenario)
            io.write_quote_file(out / "quotes.csv", result.quotes, run_id)
            io.write_truth_file(out / "truth.json", result.truth, run_id)
            _write_text_json(out / "scenario.json", scenario.to_dict())
            _emit_scenario_sectors(out, scenario, run_id)
            return {"assets": len(result.series),
                    "events": sum(len(v) for v in result.quotes.values())}
        artifacts = [out / "quotes.csv", out / "truth.json", out / "scenario.json"]
        if sectors_path:
            artifacts.append(Path(sectors_path))
        stages.append(("simulate", artifacts, stage_simulate))

    def stage_ingest():
        series, stats = _ingest_series(quotes_path, args.sessions, args.strict,
                                       args.min_events, schema)
        io.write_series_file(out / "series.txt", series, run_id)
        _write_text_json(out / "ingest_report.json", {"run": run_id, **stats})
        return {"assets": stats["assets"],
                "events": sum(stats["events_retained"].values())}
    stages.append(("ingest", [out / "series.txt", out / "ingest_report.json"],
                   stage_ingest))

    def stage_estimate():
        series = io.read_series_file(out / "series.txt")
        rho, coeffs = _estimate_matrix(series, args.tau, args.threads,
                                       _backend_arg(args))
        io.write_matrix_file(out / "matrix.txt", rho, run_id)
        if args.dump_coeffs:
            io.write_coeff_dump(out / "coeffs", coeffs, run_id)
        return {"n": rho.n, "K": rho.n_harmonics}
    stages.append(("estimate", [out / "matrix.txt"], stage_estimate))

    warnings = []

    def stage_spectrum():
        sectors = _load_sectors(sectors_path, warnings)
        rho = io.read_matrix_file(out / "matrix.txt")
        decomp = eig_hermitian(rho)
        tags, summaries = classify_components(decomp, sectors=sectors)
        io.write_eigenvalues_csv(out / "eigenvalues.csv", decomp, run_id)
        io.write_eigenvectors_csv(out / "eigenvectors.csv", decomp, sectors, run_id)
        io.write_components_csv(out / "components.csv", tags, run_id)
        if sectors is not None:
            io.write_sector_summary_csv(out / "sector_summary.csv", summaries,
                                        run_id)
        return {"lambda1": float(decomp.eigenvalues[0])}
    spectrum_files = [out / "eigenvalues.csv", out / "eigenvectors.csv",
                      out / "components.csv"]
    if sectors_path:
        spectrum_files.append(out / "sector_summary.csv")
    stages.append(("spectrum", spectrum_files, stage_spectrum))

    for kind in kinds:
        def stage_graph(kind=kind):
            sectors = _load_sectors(sectors_path, warnings)
            rho = io.read_matrix_file(out / "matrix.txt")
            rho_g = _graph_matrix(rho, args.drop_market)
            graph = _build_graph(rho_g, kind, args.theta_sym)
            io.write_graphml(out / f"{kind}.graphml", graph, sectors, run_id)
            io.write_dot(out / f"{kind}.dot", graph, sectors, run_id)
            io.write_edges_csv(out / f"{kind}_edges.csv", graph, run_id)
            return {"edges": len(graph.edges)}
        stages.append((f"graph-{kind}",
                       [out / f"{kind}.graphml", out / f"{kind}.dot",
                        out / f"{kind}_edges.csv"], stage_graph))

    def stage_report():
        sectors = _load_sectors(sectors_path, warnings)
        rho = io.read_matrix_file(out / "matrix.txt")
        rho_g = _graph_matrix(rho, args.drop_market)
        graph = _build_graph(rho_g, kinds[0], args.theta_sym)
        io.write_degrees_csv(out / "degrees.csv", degree_report(graph, sectors),
                             run_id)
        io.write_scatter_csv(out / "scatter.csv",
                             magnitude_phase_scatter(rho, sectors), run_id)
        return {"pairs": rho.n * (rho.n - 1) // 2}
    stages.append(("report", [out / "degrees.csv", out / "scatter.csv"],
                   stage_report))

    # no timestamps inside: a rerun with the same inputs must reproduce
    # the manifest byte for byte
    manifest = {
        "run": run_id,
        "tool": "leadlag",
        "version": __version__,
        "config": snapshot,
        "inputs": inputs,
        "stages": [],
    }
    status = 0
    for name, artifacts, fn in stages:
        entry = {"name": name, "artifacts": {}, "counters": {}}
        if args.resume and all(Path(a).exists() for a in artifacts):
            entry["status"] = "kept"
            print(f"pipeline: {name} kept (resume)")
        else:
            started = time.perf_counter()
            try:
                entry["counters"] = fn() or {}
            except LeadLagError as exc:
                entry["status"] = "failed"
                entry["error"] = str(exc)
                manifest["stages"].append(entry)
                io.write_manifest(out / "manifest.json", manifest)
                print(f"pipeline: {name} failed: {exc}", file=sys.stderr)
                raise
            entry["status"] = "done"
            elapsed = time.perf_counter() - started
            print(f"pipeline: {name} done in {elapsed:.2f}s"
                  + (f" ({entry['counters']})" if entry["counters"] else ""))
        for a in artifacts:
            if Path(a).exists():
                entry["artifacts"][Path(a).name] = io.file_digest(a)
            else:
                entry.setdefault("missing", []).append(Path(a).name)
                status = 1
        manifest["stages"].append(entry)
    for w in dict.fromkeys(warnings):
        print(f"warning: {w}", file=sys.stderr)
    io.write_manifest(out / "manifest.json", manifest)
    print(f"pipeline: manifest -> {out / 'manifest.json'}")
    print(f"run {run_id}")
    return status


_COMMANDS = {
    "simulate": cmd_simulate,
    "ingest": cmd_ingest,
    "estimate": cmd_estimate,
    "spectrum": cmd_spectrum,
    "graph": cmd_graph,
    "report": cmd_report,
    "pipeline": cmd_pipeline,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        parser = build_parser()
        config = _apply_config(parser, argv)
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help()
            return 1
        if args.threads < 1:
            raise InputError(f"--threads must be >= 1, got {args.threads}")
        return _COMMANDS[args.command](args, config)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        # unreadable input or unwritable output, same contract as bad input
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
