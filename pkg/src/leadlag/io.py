"""On-disk formats: series, matrix, coefficient dumps, CSVs, graph files.

Every artifact starts with a `# run <digest>` stamp tying it to the
manifest of the run that produced it.  All numeric output uses 17
significant digits, which round-trips doubles exactly, so a re-run
reproduces every artifact byte for byte.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .errors import InputError
from .estimator import ComplexCorrelationMatrix
from .graphs import BIN_COLORS, FilteredGraph
from .series import TickSeries

FMT = "%.17g"


def fnum(x) -> str:
    return FMT % float(x)


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def run_digest(tool_version: str, command: str, config: dict,
               input_digests: dict) -> str:
    """Deterministic run identity from what the run depends on.

    Thread counts and other performance knobs must not be in ``config``;
    they cannot change results, so they cannot change the identity.
    """
    payload = json.dumps({
        "tool": "leadlag",
        "version": tool_version,
        "command": command,
        "config": config,
        "inputs": dict(sorted(input_digests.items())),
    }, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _write_text(path, text: str):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _read_lines(path):
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read().splitlines()


# --- series file ---------------------------------------------------------

def write_series_file(path, series_list, run_id: str):
    """Rescaled tick series set, one block per asset."""
    if not series_list:
        raise InputError("no series to write")
    spans = {s.t_span for s in series_list}
    if len(spans) != 1 or None in spans:
        raise InputError("series must share one t_span")
    first = series_list[0]
    lines = ["# leadlag series v1", f"# run {run_id}"]
    lines.append(f"T {fnum(first.t_span)}")
    # colon separator: %g exponents may contain '-'
    sessions = ",".join(f"{fnum(a)}:{fnum(b)}" for a, b in first.session_map)
    lines.append(f"SESSIONS {sessions if sessions else '-'}")
    for s in series_list:
        if not s.rescaled:
            raise InputError(f"{s.asset_id}: only rescaled series are written")
        lines.append(f"ASSET {s.asset_id} {s.n_events}")
        for t, p in zip(s.t, s.p):
            lines.append(f"{fnum(t)} {fnum(p)}")
    _write_text(path, "\n".join(lines) + "\n")


def read_series_file(path) -> list[TickSeries]:
    lines = _read_lines(path)
    if not lines or lines[0] != "# leadlag series v1":
        raise InputError(f"{path}: not a series file")
    t_span = None
    session_map = ()
    out = []
    i = 0
    while i < len(lines):
        line = lines[i]
        i += 1
        if not line or line.startswith("#"):
            continue
        if line.startswith("T "):
            t_span = float(line[2:])
        elif line.startswith("SESSIONS "):
            body = line[len("SESSIONS "):]
            if body != "-":
                session_map = tuple(
                    (float(w.split(":")[0]), float(w.split(":")[1]))
                    for w in body.split(","))
        elif line.startswith("ASSET "):
            _, ticker, count = line.split()
            count = int(count)
            t = np.empty(count)
            p = np.empty(count)
            for j in range(count):
                ts, ps = lines[i + j].split()
                t[j] = float(ts)
                p[j] = float(ps)
            i += count
            out.append(TickSeries(ticker, t, p, t_span=t_span,
                                  session_map=session_map, rescaled=True))
        else:
            raise InputError(f"{path}: unexpected line {line!r}")
    if not out:
        raise InputError(f"{path}: no assets in series file")
    return out


# --- matrix file ---------------------------------------------------------

def write_matrix_file(path, rho: ComplexCorrelationMatrix, run_id: str):
    """Complex correlation matrix: header then row-major (re, im) pairs."""
    lines = [
        "# leadlag matrix v1",
        f"# run {run_id}",
        "kind complex-correlation",
        f"n {rho.n}",
        f"tau {fnum(rho.tau)}",
        f"T {fnum(rho.t_span)}",
        f"K {rho.n_harmonics}",
        "assets " + " ".join(rho.assets),
    ]
    for row in rho.values:
        lines.append(" ".join(f"{fnum(z.real)} {fnum(z.imag)}" for z in row))
    _write_text(path, "\n".join(lines) + "\n")


def read_matrix_file(path) -> ComplexCorrelationMatrix:
    lines = _read_lines(path)
    if not lines or lines[0] != "# leadlag matrix v1":
        raise InputError(f"{path}: not a matrix file")
    header = {}
    assets = None
    rows = []
    for line in lines[1:]:
        if not line or line.startswith("#"):
            continue
        if assets is None:
            key, _, rest = line.partition(" ")
            if key == "assets":
                assets = rest.split()
            else:
                header[key] = rest
            continue
        vals = [float(x) for x in line.split()]
        if len(vals) != 2 * len(assets):
            raise InputError(f"{path}: row has {len(vals)} values, "
                             f"expected {2 * len(assets)}")
        rows.append([complex(vals[2 * j], vals[2 * j + 1])
                     for j in range(len(assets))])
    for needed in ("n", "tau", "T", "K"):
        if needed not in header:
            raise InputError(f"{path}: missing header field {needed!r}")
    if assets is None or len(rows) != int(header["n"]) or len(assets) != int(header["n"]):
        raise InputError(f"{path}: matrix shape disagrees with header")
    return ComplexCorrelationMatrix(
        tuple(assets), np.array(rows, dtype=np.complex128),
        tau=float(header["tau"]), t_span=float(header["T"]),
        n_harmonics=int(header["K"]))


# --- coefficient dump ----------------------------------------------------

def write_coeff_dump(directory, coeffs_list, run_id: str) -> list[str]:
    """One CSV per asset with (k, a_k, b_k) rows; returns written paths."""
    paths = []
    for fc in coeffs_list:
        path = Path(directory) / f"coeffs_{fc.asset_id}.csv"
        lines = [f"# run {run_id}", "k,a,b"]
        for k in range(fc.n_harmonics):
            lines.append(f"{k + 1},{fnum(fc.a[k])},{fnum(fc.b[k])}")
        _write_text(path, "\n".join(lines) + "\n")
        paths.append(str(path))
    return paths


# --- CSV artifacts -------------------------------------------------------

def _csv_cell(value) -> str:
    text = str(value)
    if any(ch in text for ch in ",\"\n"):
        return '"' + text.replace('"', '""') + '"'
    return text


def write_csv(path, header, rows, run_id: str):
    lines = [f"# run {run_id}", ",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(c) for c in row))
    _write_text(path, "\n".join(lines) + "\n")


def write_eigenvalues_csv(path, decomp, run_id: str):
    write_csv(path, ["component", "eigenvalue"],
              [(i + 1, fnum(w)) for i, w in enumerate(decomp.eigenvalues)],
              run_id)


def write_eigenvectors_csv(path, decomp, sectors, run_id: str,
                           components=None):
    """Coefficient table behind the eigenvector scatter plots."""
    rows = []
    which = range(decomp.n) if components is None else [c - 1 for c in components]
    for i in which:
        v = decomp.vectors[:, i]
        for j, ticker in enumerate(decomp.assets):
            z = v[j]
            sector = sectors.sector(ticker) if sectors else ""
            subsector = sectors.subsector(ticker) if sectors else ""
            rows.append((i + 1, ticker, fnum(z.real), fnum(z.imag),
                         fnum(abs(z)), fnum(float(np.angle(z))),
                         sector, subsector))
    write_csv(path, ["component", "ticker", "re", "im", "magnitude", "phase",
                     "sector", "subsector"], rows, run_id)


def write_components_csv(path, tags, run_id: str):
    rows = [(t.component, t.tag, fnum(t.phase_spread), fnum(t.eigenvalue),
             t.top_sector or "", fnum(t.concentration)) for t in tags]
    write_csv(path, ["component", "tag", "phase_spread", "eigenvalue",
                     "top_sector", "concentration"], rows, run_id)


def write_sector_summary_csv(path, summaries, run_id: str):
    rows = [(s.component, s.sector, s.members, fnum(s.mean_magnitude),
             fnum(s.mean_phase)) for s in summaries]
    write_csv(path, ["component", "sector", "members", "mean_magnitude",
                     "mean_phase"], rows, run_id)


def write_edges_csv(path, graph: FilteredGraph, run_id: str):
    rows = [(e.a, e.b, fnum(e.s), fnum(e.theta), e.bin,
             int(e.bidirectional)) for e in graph.edges]
    write_csv(path, ["from", "to", "s", "theta", "bin", "bidirectional"],
              rows, run_id)


def write_degrees_csv(path, degree_rows, run_id: str):
    rows = [(d.node, d.in_degree, d.out_degree, d.total, d.sector)
            for d in degree_rows]
    write_csv(path, ["node", "in_degree", "out_degree", "total", "sector"],
              rows, run_id)


def write_scatter_csv(path, scatter_rows, run_id: str):
    rows = [(r.a, r.b, fnum(r.s), fnum(r.theta),
             "" if r.same_sector is None else int(r.same_sector))
            for r in scatter_rows]
    write_csv(path, ["a", "b", "s", "theta", "same_sector"], rows, run_id)


# --- graph files ---------------------------------------------------------

def write_graphml(path, graph: FilteredGraph, sectors, run_id: str):
    """Hand-rolled GraphML so output stays byte-deterministic."""
    def node_sector(n):
        if sectors is None:
            return "", ""
        return sectors.sector(n), sectors.subsector(n)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f"<!-- run {run_id} -->",
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns">',
        '  <key id="sector" for="node" attr.name="sector" attr.type="string"/>',
        '  <key id="subsector" for="node" attr.name="subsector" attr.type="string"/>',
        '  <key id="s" for="edge" attr.name="s" attr.type="double"/>',
        '  <key id="theta" for="edge" attr.name="theta" attr.type="double"/>',
        '  <key id="bin" for="edge" attr.name="bin" attr.type="string"/>',
        '  <key id="bidirectional" for="edge" attr.name="bidirectional"'
        ' attr.type="boolean"/>',
        f'  <graph id={quoteattr(graph.kind)} edgedefault='
        f'{quoteattr("directed" if graph.oriented else "undirected")}>',
    ]
    for n in graph.nodes:
        sector, subsector = node_sector(n)
        lines.append(f"    <node id={quoteattr(n)}>")
        lines.append(f'      <data key="sector">{escape(sector)}</data>')
        lines.append(f'      <data key="subsector">{escape(subsector)}</data>')
        lines.append("    </node>")
    for e in graph.edges:
        lines.append(f"    <edge source={quoteattr(e.a)} target={quoteattr(e.b)}>")
        lines.append(f'      <data key="s">{fnum(e.s)}</data>')
        lines.append(f'      <data key="theta">{fnum(e.theta)}</data>')
        lines.append(f'      <data key="bin">{escape(e.bin)}</data>')
        lines.append(f'      <data key="bidirectional">'
                     f"{'true' if e.bidirectional else 'false'}</data>")
        lines.append("    </edge>")
    lines.append("  </graph>")
    lines.append("</graphml>")
    _write_text(path, "\n".join(lines) + "\n")


def _dot_quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def write_dot(path, graph: FilteredGraph, sectors, run_id: str):
    """DOT rendering; edges are colored by their phase bin."""
    lines = [f"// run {run_id}", f"digraph {_dot_quote(graph.kind)} {{"]
    for n in graph.nodes:
        attrs = ""
        if sectors is not None:
            attrs = f" [sector={_dot_quote(sectors.sector(n))}]"
        lines.append(f"  {_dot_quote(n)}{attrs};")
    for e in graph.edges:
        color = BIN_COLORS[e.bin]
        attrs = [f"color={color}", f"s={fnum(e.s)}", f"theta={fnum(e.theta)}"]
        if e.bidirectional:
            attrs.append("dir=both")
        elif not graph.oriented:
            attrs.append("dir=none")
        lines.append(f"  {_dot_quote(e.a)} -> {_dot_quote(e.b)}"
                     f" [{', '.join(attrs)}];")
    lines.append("}")
    _write_text(path, "\n".join(lines) + "\n")


# --- quote + truth files -------------------------------------------------

def write_quote_file(path, events_by_ticker: dict, run_id: str):
    from .ingest import write_quote_rows
    lines = [f"# run {run_id}"]
    lines.extend(write_quote_rows(events_by_ticker))
    _write_text(path, "\n".join(lines) + "\n")


def write_sector_file(path, table_rows, run_id: str):
    """Rows of (ticker, subsector, sector)."""
    lines = [f"# run {run_id}"]
    for ticker, subsector, sector in table_rows:
        lines.append(f"{ticker},{subsector},{sector}")
    _write_text(path, "\n".join(lines) + "\n")


def write_truth_file(path, truth, run_id: str):
    data = {
        "run": run_id,
        "seed": truth.scenario.seed,
        "t_span": truth.scenario.t_span,
        "assets": [
            {
                "ticker": a.ticker, "beta": a.beta, "lag": a.lag,
                "eta": a.eta, "intensity": a.intensity, "sector": a.sector,
                "gamma": a.gamma, "sector_lag": a.sector_lag,
            }
            for a in truth.scenario.assets
        ],
    }
    _write_text(path, json.dumps(data, indent=2, sort_keys=True) + "\n")


# --- manifest ------------------------------------------------------------

def write_manifest(path, manifest: dict):
    _write_text(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def read_manifest(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
