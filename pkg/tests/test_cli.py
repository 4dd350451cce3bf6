import csv
import io
import json
import math

import pytest

from overlaytc.cli import main
from overlaytc.config import build_config, parse_config_text


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def csv_rows(text):
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    return list(csv.DictReader(io.StringIO(body)))


SWEEP = ["--set", "sweep.variable=lambda_a", "--set", "sweep.values=1e-5, 2e-5, 4e-5, 8e-5, 1.6e-4"]


class TestOutageCommand:
    def test_sweep_rows_monotone(self, capsys):
        code, out, _ = run(capsys, "outage", "--trials", "20000", "--seed", "3", *SWEEP)
        assert code == 0
        rows = csv_rows(out)
        assert len(rows) == 5
        p = [float(r["p_hat"]) for r in rows]
        assert p == sorted(p)
        for r in rows:
            assert float(r["lemma1_lower"]) <= float(r["lemma1_upper"])
            assert r["exact_rayleigh"] != ""

    def test_header_lists_resolved_config(self, capsys):
        _, out, _ = run(capsys, "outage", "--trials", "2000", "--set", "params.lambda_a=1e-4")
        head = [line for line in out.splitlines() if line.startswith("#")]
        assert head[0].startswith("# overlaytc ")
        assert "# config params.lambda_a = 0.0001" in head
        assert "# config trials = 2000" in head
        assert any(line.startswith("# units:") for line in head)

    def test_csv_and_json_agree(self, capsys):
        args = ["outage", "--trials", "5000", "--seed", "9", *SWEEP]
        _, text, _ = run(capsys, *args)
        _, doc, _ = run(capsys, *args, "--format", "json")
        doc = json.loads(doc)
        rows = csv_rows(text)
        assert doc["columns"] == list(rows[0].keys())
        for r_csv, r_json in zip(rows, doc["rows"]):
            for col in ("p_hat", "ci_half_width", "asymptotic", "lemma1_upper"):
                assert float(r_csv[col]) == r_json[col]
            assert int(r_csv["outages"]) == r_json["outages"]

    def test_threads_byte_identical(self, capsys):
        args = ["outage", "--trials", "20000", "--seed", "5", *SWEEP]
        _, one, _ = run(capsys, *args, "--threads", "1")
        _, eight, _ = run(capsys, *args, "--threads", "8")
        assert one == eight

    def test_diversity_column_blank_exact(self, capsys):
        _, out, _ = run(capsys, "outage", "--trials", "2000", "--set", "params.lambda_a=1e-4",
                        "--set", "params.diversity_adhoc=3")
        assert csv_rows(out)[0]["exact_rayleigh"] == ""


class TestOtherCommands:
    def test_capacity_region(self, capsys):
        code, out, _ = run(capsys, "capacity-region", "--set", "params.num_subchannels=1000",
                           "--set", "params.num_cellular_subchannels=500")
        assert code == 0
        assert "# summary C1 = 0.04679825012041" in out
        rows = csv_rows(out)
        curves = [r["curve"] for r in rows]
        assert curves.count("blind_line") == 2 and curves.count("exclusion_rectangle") == 3

    def test_diversity_sweep(self, capsys):
        code, out, _ = run(capsys, "diversity-sweep", "--format", "json",
                           "--set", "params.num_subchannels=1000")
        assert code == 0
        rows = json.loads(out)["rows"]
        assert [r["L1"] for r in rows] == list(range(1, 17))
        assert all(r["L2"] == r["L1"] + 2 for r in rows)
        assert all(a["C1"] < b["C1"] for a, b in zip(rows, rows[1:]))

    def test_validate_passes(self, capsys):
        code, out, _ = run(capsys, "validate", "--trials", "50000", "--seed", "11",
                           "--set", "params.num_subchannels=10", "--set", "params.num_cellular_subchannels=5",
                           "--set", "sweep.variable=outage_target", "--set", "sweep.values=0.05",
                           "--tolerance", "0.15")
        assert code == 0, out
        assert csv_rows(out)[0]["passed"] == "true"

    def test_validate_failure_exit_code(self, capsys, tmp_path):
        dest = tmp_path / "v.csv"
        code, _, err = run(capsys, "validate", "--trials", "5000", "--tolerance", "1e-9", "--out", str(dest),
                           "--set", "sweep.variable=outage_target", "--set", "sweep.values=0.05")
        assert code == 2 and "validation failed" in err
        assert "false" in dest.read_text()


class TestErrors:
    def test_invalid_parameter(self, capsys):
        code, _, err = run(capsys, "outage", "--set", "params.pathloss_exponent=2")
        assert code == 1 and "pathloss_exponent" in err

    def test_unknown_key(self, capsys):
        code, _, err = run(capsys, "outage", "--set", "params.bogus=1")
        assert code == 1 and "bogus" in err

    def test_too_few_trials(self, capsys):
        code, _, _ = run(capsys, "outage", "--trials", "10")
        assert code == 1

    def test_unwritable_output(self, capsys, tmp_path):
        code, _, err = run(capsys, "capacity-region", "--out", str(tmp_path / "missing" / "x.csv"))
        assert code == 3 and "cannot write" in err

    def test_missing_config(self, capsys, tmp_path):
        code, _, _ = run(capsys, "outage", "--config", str(tmp_path / "nope.cfg"))
        assert code == 3

    def test_infeasible(self, capsys):
        code, _, err = run(capsys, "validate", "--trials", "5000",
                           "--set", "params.lambda_u=0.05", "--set", "params.num_subchannels=2",
                           "--set", "sweep.variable=outage_target", "--set", "sweep.values=0.01")
        assert code == 1 and "infeasible" in err


class TestConfig:
    def test_file_round_trip(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# baseline\n"
            "params.lambda_a = 4.68e-5   # per m^2\n"
            "receiver.kind = ad_hoc\n"
            "trials = 2000\n"
            "seed = 4\n"
            "output.format = json\n"
        )
        code, out, _ = run(capsys, "outage", "--config", str(cfg))
        doc = json.loads(out)
        assert code == 0 and doc["config"]["master_seed"] == 4
        assert doc["rows"][0]["lambda_a"] == 4.68e-5

    def test_flags_override_file(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("trials = 2000\nseed = 4\n")
        _, out, _ = run(capsys, "outage", "--config", str(cfg), "--seed", "8", "--format", "json")
        assert json.loads(out)["config"]["master_seed"] == 8

    def test_range_values(self):
        cfg = build_config(parse_config_text("sweep.variable = diversity_adhoc\nsweep.values = 2..5\n"))
        assert cfg.sweep_values == (2, 3, 4, 5)

    def test_overlay_and_receiver(self):
        cfg = build_config({"params.overlay": "Exclusion", "receiver.kind": "base_station",
                            "receiver.in_cellular_set": "auto"})
        assert cfg.params.overlay.value == "exclusion" and cfg.receiver.label == "base_station"

    @pytest.mark.parametrize("text", ["novalue\n", "sweep.values = 1,2\n", "output.format = xml\n", "= 3\n"])
    def test_malformed(self, text):
        with pytest.raises(ValueError):
            build_config(parse_config_text(text))

    def test_non_finite_output(self, capsys):
        # all sub-channels cellular: exclusion capacity in lambda_a is zero and coefficient inf
        _, out, _ = run(capsys, "capacity-region", "--format", "json")
        doc = json.loads(out)
        assert all(math.isfinite(r["lambda_u"]) for r in doc["rows"])
