"""Command-line behavior: round trips, exit codes, determinism, atomic writes."""

import xml.etree.ElementTree as ET

import numpy as np
import pytest

import retroflux as rf
from retroflux.cli import main


def write_doc(path, a, b, c, extra=""):
    path.write_text('{"a": %r, "b": %r, "c": %r%s}\n' % (a, b, c, extra))


class TestClassify:
    def test_linear_prints_regime(self, tmp_path, capsys):
        doc = tmp_path / "m.doc"
        write_doc(doc, 1.0, 1.0, 1.0)
        assert main(["classify", "--model", str(doc)]) == 0
        out = capsys.readouterr().out
        assert out.startswith("Linear")
        assert "s=0" in out

    def test_oscillatory(self, tmp_path, capsys):
        doc = tmp_path / "m.doc"
        write_doc(doc, 0.0, 2.0, 1.0)
        assert main(["classify", "--model", str(doc)]) == 0
        assert "Oscillatory" in capsys.readouterr().out

    def test_missing_file_is_domain_error(self, tmp_path, capsys):
        assert main(["classify", "--model", str(tmp_path / "nope.doc")]) == 1
        assert "FileNotFoundError" in capsys.readouterr().err


class TestFitErrors:
    def test_too_few_points_maps_to_exit_1(self, tmp_path, capsys):
        data = tmp_path / "tiny.csv"
        data.write_bytes(b"t,value\n0,1\n1,2\n2,3\n")
        out = tmp_path / "fit.doc"
        assert main(["fit", "--data", str(data), "--out", str(out)]) == 1
        assert "TooFewPoints" in capsys.readouterr().err
        assert not out.exists()  # no partial writes

    def test_parse_error_maps_to_exit_1(self, tmp_path, capsys):
        data = tmp_path / "bad.csv"
        data.write_bytes(b"t,value\n0,abc\n")
        out = tmp_path / "fit.doc"
        assert main(["fit", "--data", str(data), "--out", str(out)]) == 1
        err = capsys.readouterr().err
        assert "NonNumericFieldError" in err and "line 2" in err
        assert not out.exists()

    def test_usage_error_exit_2(self, tmp_path):
        with pytest.raises(SystemExit) as info:
            main(["fit", "--data", "x.csv"])  # --out missing
        assert info.value.code == 2
        with pytest.raises(SystemExit) as info:
            main(["fit", "--data", "x.csv", "--out", "y", "--bogus"])
        assert info.value.code == 2
        with pytest.raises(SystemExit) as info:
            main(["unknown-command"])
        assert info.value.code == 2


class TestRoundTrip:
    def test_simulate_fit_classify(self, tmp_path, capsys):
        doc = tmp_path / "m.doc"
        write_doc(doc, 0.8, 0.3, 1.0)
        traj_csv = tmp_path / "traj.csv"
        assert (
            main(
                [
                    "simulate", "--model", str(doc),
                    "--T", "5", "--h", "0.001",
                    "--out", str(traj_csv),
                ]
            )
            == 0
        )
        fit_doc = tmp_path / "fit.doc"
        assert main(["fit", "--data", str(traj_csv), "--out", str(fit_doc)]) == 0
        fitted = rf.decode_model_document(fit_doc.read_text()).params
        assert fitted.a == pytest.approx(0.8, rel=1e-3)
        assert fitted.b == pytest.approx(0.3, rel=1e-3)
        assert fitted.c == pytest.approx(1.0, rel=1e-3)
        capsys.readouterr()
        assert main(["classify", "--model", str(fit_doc)]) == 0
        assert "Exponential" in capsys.readouterr().out

    def test_outputs_byte_deterministic(self, tmp_path):
        doc = tmp_path / "m.doc"
        write_doc(doc, 0.8, 0.3, 1.0)
        outputs = []
        for tag in ("one", "two"):
            traj_csv = tmp_path / f"traj-{tag}.csv"
            fit_doc = tmp_path / f"fit-{tag}.doc"
            main(["simulate", "--model", str(doc), "--T", "2", "--h", "0.01",
                  "--out", str(traj_csv)])
            main(["fit", "--data", str(traj_csv), "--out", str(fit_doc)])
            outputs.append((traj_csv.read_bytes(), fit_doc.read_bytes()))
        assert outputs[0] == outputs[1]

    def test_simulate_with_forcing(self, tmp_path):
        doc = tmp_path / "forced.doc"
        write_doc(
            doc, 0.0, 0.0, 0.0,
            extra=', "forcing": {"kappa": 1.0, "alpha": 0.0}',
        )
        out = tmp_path / "traj.csv"
        assert main(["simulate", "--model", str(doc), "--T", "1", "--h", "0.001",
                     "--out", str(out)]) == 0
        series = rf.load_timeseries_csv(out.read_bytes())
        k = int(np.argmin(np.abs(series.times - 1.0)))
        assert series.values[k] == pytest.approx(1 - np.exp(-1), abs=1e-6)


class TestForecast:
    def test_three_column_output(self, tmp_path):
        doc = tmp_path / "m.doc"
        write_doc(doc, 0.0, 0.0, 5.0)
        out = tmp_path / "fc.csv"
        assert main(["forecast", "--model", str(doc), "--from", "5",
                     "--horizon", "2", "--step", "1", "--out", str(out)]) == 0
        assert out.read_bytes() == b"t,value,rate\n6,5,0\n7,5,0\n"

    def test_matches_closed_form(self, tmp_path):
        doc = tmp_path / "m.doc"
        write_doc(doc, 5.0, 3.0, 2.0)
        out = tmp_path / "fc.csv"
        main(["forecast", "--model", str(doc), "--from", "0",
              "--horizon", "1", "--step", "0.5", "--out", str(out)])
        rows = out.read_text().strip().splitlines()
        assert rows[0] == "t,value,rate"
        t, v, r = (float(x) for x in rows[1].split(","))
        assert (t, v) == (0.5, pytest.approx(3 * np.exp(2) - np.exp(-2)))
        assert r == pytest.approx(12 * np.exp(2) + 4 * np.exp(-2))


class TestCorrelate:
    def test_prints_line(self, tmp_path, capsys):
        x = tmp_path / "x.csv"
        y = tmp_path / "y.csv"
        x.write_bytes(b"t,value\n0,1\n1,2\n2,3\n")
        y.write_bytes(b"t,value\n0,3\n1,5\n2,7\n")
        assert main(["correlate", "--x", str(x), "--y", str(y)]) == 0
        out = capsys.readouterr().out
        assert "slope=2" in out and "intercept=1" in out and "pearson=1" in out

    def test_zero_variance_exit_1(self, tmp_path, capsys):
        x = tmp_path / "x.csv"
        y = tmp_path / "y.csv"
        x.write_bytes(b"t,value\n0,4\n1,4\n2,4\n")
        y.write_bytes(b"t,value\n0,3\n1,5\n2,7\n")
        assert main(["correlate", "--x", str(x), "--y", str(y)]) == 1
        assert "ZeroVariance" in capsys.readouterr().err


class TestPlot:
    def test_line_plot(self, tmp_path):
        data = tmp_path / "d.csv"
        data.write_bytes(b"t,value\n0,1\n1,2\n2,4\n")
        out = tmp_path / "fig.svg"
        assert main(["plot", "--data", str(data), "--out", str(out)]) == 0
        root = ET.fromstring(out.read_text())
        assert root.tag.endswith("svg")

    def test_model_overlay(self, tmp_path):
        data = tmp_path / "d.csv"
        data.write_bytes(b"t,value\n0,1\n1,2\n2,4\n3,8\n")
        doc = tmp_path / "m.doc"
        write_doc(doc, 0.8, 0.3, 1.0)
        out = tmp_path / "fig.svg"
        assert main(["plot", "--data", str(data), "--model", str(doc),
                     "--out", str(out)]) == 0
        svg = out.read_text()
        ns = "{http://www.w3.org/2000/svg}"
        root = ET.fromstring(svg)
        assert len(root.findall(f"{ns}polyline")) == 1  # model curve
        scatter = [g for g in root.findall(f"{ns}g") if g.get("class") == "series"]
        assert len(scatter) == 1  # observed points


class TestFitMetadata:
    def test_report_and_metadata(self, tmp_path, capsys):
        doc = tmp_path / "m.doc"
        write_doc(doc, 0.8, 0.3, 1.0)
        traj = tmp_path / "t.csv"
        main(["simulate", "--model", str(doc), "--T", "3", "--h", "0.01",
              "--out", str(traj)])
        fit_doc = tmp_path / "fit.doc"
        capsys.readouterr()
        assert main(["fit", "--data", str(traj), "--out", str(fit_doc)]) == 0
        out = capsys.readouterr().out
        for key in ("a=", "b=", "c=", "rss=", "iterations=", "converged=true",
                    "regime=Exponential"):
            assert key in out
        decoded = rf.decode_model_document(fit_doc.read_text())
        assert decoded.metadata["regime"] == "Exponential"
        assert "created-at" not in decoded.metadata

    def test_timestamp_only_behind_flag(self, tmp_path):
        doc = tmp_path / "m.doc"
        write_doc(doc, 0.8, 0.3, 1.0)
        traj = tmp_path / "t.csv"
        main(["simulate", "--model", str(doc), "--T", "3", "--h", "0.01",
              "--out", str(traj)])
        fit_doc = tmp_path / "fit.doc"
        assert main(["fit", "--data", str(traj), "--out", str(fit_doc),
                     "--timestamp"]) == 0
        decoded = rf.decode_model_document(fit_doc.read_text())
        assert "created-at" in decoded.metadata

    def test_seed_document_used(self, tmp_path):
        doc = tmp_path / "m.doc"
        write_doc(doc, 0.8, 0.3, 1.0)
        traj = tmp_path / "t.csv"
        main(["simulate", "--model", str(doc), "--T", "3", "--h", "0.01",
              "--out", str(traj)])
        seed_doc = tmp_path / "seed.doc"
        write_doc(seed_doc, 0.7, 0.2, 0.9)
        fit_doc = tmp_path / "fit.doc"
        assert main(["fit", "--data", str(traj), "--out", str(fit_doc),
                     "--seed", str(seed_doc)]) == 0
        decoded = rf.decode_model_document(fit_doc.read_text())
        assert decoded.metadata["seed"] == "a=0.7 b=0.2 c=0.9"
