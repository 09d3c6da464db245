import json
import math

import networkx as nx
import numpy as np
import pytest

from conftest import random_correlation, random_series

from leadlag import io
from leadlag.errors import LeadLagError, NumericalError
from leadlag.estimator import EstimatorConfig, fourier_coeffs
from leadlag.graphs import max_spanning_tree, orient_edges, pmfg
from leadlag.ingest import SectorTable, parse_quotes
from leadlag.series import TWO_PI, QuoteEvent, TickSeries
from leadlag.spectral import classify_components, eig_hermitian
from leadlag.synth import generate, one_factor_scenario

RUN = "deadbeef00000000"


class TestNumberFormat:
    def test_round_trips_doubles_exactly(self, rng):
        values = np.concatenate([
            rng.normal(size=200),
            rng.normal(size=50) * 1e-300,
            rng.normal(size=50) * 1e300,
            [0.0, 1.0, -1.0, math.pi, 2.0 / 3.0],
        ])
        for x in values:
            assert float(io.fnum(x)) == x


class TestRunDigest:
    def test_shape_and_determinism(self):
        d1 = io.run_digest("0.1.0", "estimate", {"tau": 60.0}, {"a": "xx"})
        d2 = io.run_digest("0.1.0", "estimate", {"tau": 60.0}, {"a": "xx"})
        assert d1 == d2
        assert len(d1) == 16
        int(d1, 16)

    def test_sensitive_to_config(self):
        base = io.run_digest("0.1.0", "estimate", {"tau": 60.0}, {})
        assert io.run_digest("0.1.0", "estimate", {"tau": 61.0}, {}) != base
        assert io.run_digest("0.1.1", "estimate", {"tau": 60.0}, {}) != base

    def test_input_order_irrelevant(self):
        a = io.run_digest("0.1.0", "x", {}, {"p": "1", "q": "2"})
        b = io.run_digest("0.1.0", "x", {}, {"q": "2", "p": "1"})
        assert a == b


class TestSeriesFile:
    def test_round_trip_exact(self, rng, tmp_path):
        series = [random_series(rng, f"A{i}", n_events=50) for i in range(3)]
        series = [TickSeries(s.asset_id, s.t, s.p, t_span=TWO_PI,
                             session_map=((0.0, 1e-05), (2e-05, 4.0)),
                             rescaled=True) for s in series]
        path = tmp_path / "series.txt"
        io.write_series_file(path, series, RUN)
        again = io.read_series_file(path)
        assert len(again) == 3
        for s1, s2 in zip(series, again):
            assert s2.asset_id == s1.asset_id
            np.testing.assert_array_equal(s2.t, s1.t)
            np.testing.assert_array_equal(s2.p, s1.p)
            assert s2.t_span == s1.t_span
            # session boundaries survive even with exponent notation
            assert s2.session_map == s1.session_map
            assert s2.rescaled

    def test_run_stamp_on_first_lines(self, rng, tmp_path):
        path = tmp_path / "series.txt"
        io.write_series_file(path, [random_series(rng)], RUN)
        lines = path.read_text().splitlines()
        assert lines[0] == "# leadlag series v1"
        assert lines[1] == f"# run {RUN}"

    def test_byte_deterministic(self, rng, tmp_path):
        series = [random_series(rng, "A")]
        p1, p2 = tmp_path / "a.txt", tmp_path / "b.txt"
        io.write_series_file(p1, series, RUN)
        io.write_series_file(p2, series, RUN)
        assert p1.read_bytes() == p2.read_bytes()

    def test_rejects_unrescaled(self, tmp_path):
        raw = TickSeries("A", np.array([0.0, 5.0]), np.array([1.0, 2.0]),
                         t_span=10.0)
        with pytest.raises(LeadLagError, match="rescaled"):
            io.write_series_file(tmp_path / "x.txt", [raw], RUN)

    def test_rejects_wrong_magic(self, tmp_path):
        path = tmp_path / "bogus.txt"
        path.write_text("hello\n")
        with pytest.raises(LeadLagError, match="not a series file"):
            io.read_series_file(path)


class TestMatrixFile:
    def test_round_trip_exact(self, rng, tmp_path):
        rho = random_correlation(rng, 6)
        path = tmp_path / "matrix.txt"
        io.write_matrix_file(path, rho, RUN)
        again = io.read_matrix_file(path)
        np.testing.assert_array_equal(again.values, rho.values)
        assert again.assets == rho.assets
        assert again.tau == rho.tau
        assert again.t_span == rho.t_span
        assert again.n_harmonics == rho.n_harmonics

    def test_validation_reruns_on_read(self, rng, tmp_path):
        rho = random_correlation(rng, 3)
        path = tmp_path / "matrix.txt"
        io.write_matrix_file(path, rho, RUN)
        # corrupt entry (1,0) only: breaks exact Hermitian symmetry
        lines = path.read_text().splitlines()
        row = lines[9].split()
        row[0] = io.fnum(float(row[0]) + 0.25)
        lines[9] = " ".join(row)
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(NumericalError, match="Hermitian"):
            io.read_matrix_file(path)

    def test_shape_mismatch_rejected(self, rng, tmp_path):
        rho = random_correlation(rng, 3)
        path = tmp_path / "matrix.txt"
        io.write_matrix_file(path, rho, RUN)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:-1]) + "\n")
        with pytest.raises(LeadLagError, match="shape disagrees"):
            io.read_matrix_file(path)

    def test_header_fields_required(self, tmp_path):
        path = tmp_path / "matrix.txt"
        path.write_text("# leadlag matrix v1\nassets A\n1 0\n")
        with pytest.raises(LeadLagError, match="missing header"):
            io.read_matrix_file(path)


class TestCoeffDump:
    def test_per_asset_files(self, rng, tmp_path):
        series = random_series(rng, "TEST", n_events=80)
        fc = fourier_coeffs(series, EstimatorConfig(tau=60.0, n_harmonics=16))
        paths = io.write_coeff_dump(tmp_path / "coeffs", [fc], RUN)
        assert paths == [str(tmp_path / "coeffs" / "coeffs_TEST.csv")]
        lines = (tmp_path / "coeffs" / "coeffs_TEST.csv").read_text().splitlines()
        assert lines[0] == f"# run {RUN}"
        assert lines[1] == "k,a,b"
        assert len(lines) == 2 + 16
        k, a, b = lines[2].split(",")
        assert k == "1"
        assert float(a) == fc.a[0]
        assert float(b) == fc.b[0]


class TestCsv:
    def test_cells_quoted_when_needed(self, tmp_path):
        path = tmp_path / "x.csv"
        io.write_csv(path, ["a", "b"], [("plain", 'has,comma"quote')], RUN)
        lines = path.read_text().splitlines()
        assert lines[2] == 'plain,"has,comma""quote"'

    def test_eigen_csvs(self, rng, tmp_path):
        rho = random_correlation(rng, 4)
        dec = eig_hermitian(rho)
        io.write_eigenvalues_csv(tmp_path / "w.csv", dec, RUN)
        lines = (tmp_path / "w.csv").read_text().splitlines()
        assert lines[1] == "component,eigenvalue"
        assert len(lines) == 2 + 4
        assert float(lines[2].split(",")[1]) == dec.eigenvalues[0]

        table = SectorTable({a: ("sub", "SEC") for a in dec.assets})
        io.write_eigenvectors_csv(tmp_path / "v.csv", dec, table, RUN)
        lines = (tmp_path / "v.csv").read_text().splitlines()
        assert len(lines) == 2 + 16
        cells = lines[2].split(",")
        assert cells[0] == "1" and cells[1] == dec.assets[0]
        assert float(cells[4]) == abs(dec.vectors[0, 0])
        assert cells[6] == "SEC"

        io.write_eigenvectors_csv(tmp_path / "v2.csv", dec, None, RUN,
                                  components=[2, 3])
        lines = (tmp_path / "v2.csv").read_text().splitlines()
        assert len(lines) == 2 + 8
        assert {row.split(",")[0] for row in lines[2:]} == {"2", "3"}

    def test_components_csv(self, rng, tmp_path):
        dec = eig_hermitian(random_correlation(rng, 3))
        tags, _ = classify_components(dec)
        io.write_components_csv(tmp_path / "c.csv", tags, RUN)
        lines = (tmp_path / "c.csv").read_text().splitlines()
        assert lines[1].startswith("component,tag,phase_spread")
        assert len(lines) == 2 + 3


class TestGraphFiles:
    def test_graphml_parses_with_attributes(self, rng, tmp_path):
        rho = random_correlation(rng, 6)
        graph = orient_edges(pmfg(rho), rho)
        table = SectorTable({a: ("sub", "SEC") for a in rho.assets})
        path = tmp_path / "g.graphml"
        io.write_graphml(path, graph, table, RUN)
        g = nx.read_graphml(path)
        assert g.is_directed()
        assert g.number_of_nodes() == 6
        assert g.number_of_edges() == len(graph.edges)
        edge = graph.edges[0]
        data = g.get_edge_data(edge.a, edge.b)
        assert data["s"] == pytest.approx(edge.s)
        assert data["theta"] == pytest.approx(edge.theta)
        assert data["bin"] == edge.bin
        assert g.nodes[edge.a]["sector"] == "SEC"

    def test_graphml_undirected_without_orientation(self, rng, tmp_path):
        rho = random_correlation(rng, 4)
        path = tmp_path / "g.graphml"
        io.write_graphml(path, max_spanning_tree(rho), None, RUN)
        assert not nx.read_graphml(path).is_directed()

    def test_dot_output(self, rng, tmp_path):
        rho = random_correlation(rng, 5)
        graph = orient_edges(max_spanning_tree(rho), rho, theta_sym=3.2)
        path = tmp_path / "g.dot"
        io.write_dot(path, graph, None, RUN)
        text = path.read_text()
        assert text.startswith(f"// run {RUN}\n")
        # theta_sym above pi makes everything bidirectional
        assert text.count("dir=both") == len(graph.edges)
        assert "color=" in text

    def test_dot_unoriented_has_no_arrows(self, rng, tmp_path):
        rho = random_correlation(rng, 4)
        path = tmp_path / "g.dot"
        io.write_dot(path, max_spanning_tree(rho), None, RUN)
        assert path.read_text().count("dir=none") == 3


class TestQuoteAndTruthFiles:
    def test_quote_file_round_trip(self, tmp_path):
        events = {"AAAA": [QuoteEvent(0, 0, 100.0, 102.0),
                           QuoteEvent(0, 1, 100.5, 102.5)],
                  "BBBB": [QuoteEvent(3, 0, 50.0, 50.5)]}
        path = tmp_path / "quotes.csv"
        io.write_quote_file(path, events, RUN)
        with open(path) as fh:
            again, report = parse_quotes(fh)
        assert again == events
        assert report.accepted == 3

    def test_truth_file_contents(self, tmp_path):
        res = generate(one_factor_scenario(n_assets=2, lags=(0.0, 30.0),
                                           duration=600.0, seed=13))
        path = tmp_path / "truth.json"
        io.write_truth_file(path, res.truth, RUN)
        data = json.loads(path.read_text())
        assert data["run"] == RUN
        assert data["seed"] == 13
        assert data["assets"][1]["lag"] == 30.0

    def test_sector_file(self, tmp_path):
        path = tmp_path / "sectors.csv"
        io.write_sector_file(path, [("A", "sub", "SEC")], RUN)
        assert path.read_text() == f"# run {RUN}\nA,sub,SEC\n"


class TestManifest:
    def test_round_trip(self, tmp_path):
        manifest = {"run": RUN, "stages": [{"name": "estimate"}]}
        path = tmp_path / "manifest.json"
        io.write_manifest(path, manifest)
        assert io.read_manifest(path) == manifest

    def test_deterministic_bytes(self, tmp_path):
        m = {"b": 1, "a": [1, 2]}
        p1, p2 = tmp_path / "1.json", tmp_path / "2.json"
        io.write_manifest(p1, m)
        io.write_manifest(p2, {"a": [1, 2], "b": 1})
        assert p1.read_bytes() == p2.read_bytes()
