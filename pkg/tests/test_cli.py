import csv
import io
import json
import os
import subprocess
import sys


from semirandom.cli import main
from semirandom.montecarlo import parse_csv
from semirandom.process import trace_from_csv

K5 = '{"family":"clique","k":5,"s":3}'
PATH = '{"family":"tight_path","m":4,"s":3,"ell":1}'


def call(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def sweep_config(tmp_path, **over):
    d = {"version": 1, "target": {"family": "tight_path", "m": 4, "s": 3, "ell": 1}, "r": 2,
         "strategy": "path_builder", "n_grid": [200, 400], "t_rule": {"values": [3, 4, 6]}, "trials": 20,
         "seed": 5}
    d.update(over)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(d))
    return str(path)


class TestAnalyze:
    def test_k5_tight(self, capsys):
        code, out, _ = call(["analyze", "--target", K5, "--r", "2"], capsys)
        d = json.loads(out)
        assert code == 0 and d["tight"] and d["best_upper"] == {"num": 8, "den": 5, "approx": 1.6}

    def test_target_from_file(self, tmp_path, capsys):
        f = tmp_path / "t.json"
        f.write_text(K5)
        code, out, _ = call(["analyze", "--target", "@" + str(f), "--r", "2"], capsys)
        assert code == 0 and json.loads(out)["v"] == 5

    def test_csv_matches_json(self, capsys):
        _, js, _ = call(["analyze", "--target", '{"family":"clique","k":6,"s":3}', "--r", "2"], capsys)
        _, cs, _ = call(["analyze", "--target", '{"family":"clique","k":6,"s":3}', "--r", "2", "--format", "csv"],
                        capsys)
        d = json.loads(js)
        rows = list(csv.DictReader(io.StringIO(cs)))
        from_json = {("lower", b["source"]): b["exponent"] for b in d["lower_bounds"]}
        from_json.update({("upper", b["source"]): b["exponent"] for b in d["upper_bounds"]})
        for row in rows:
            if row["kind"] in ("lower", "upper"):
                want = from_json[(row["kind"], row["source"])]
            else:
                want = d[row["kind"]]
            assert (int(row["num"]), int(row["den"]), float(row["approx"])) == (want["num"], want["den"],
                                                                                 want["approx"])
        assert len([r for r in rows if r["kind"] in ("lower", "upper")]) == len(from_json)

    def test_bad_target(self, capsys):
        code, _, err = call(["analyze", "--target", '{"family":"clique","k":5}', "--r", "2"], capsys)
        assert code == 1 and "target" in err
        code, _, err = call(["analyze", "--target", "{not json", "--r", "2"], capsys)
        assert code == 1 and "target" in err

    def test_r_out_of_range(self, capsys):
        assert call(["analyze", "--target", K5, "--r", "3"], capsys)[0] == 1


class TestSimulate:
    def test_seed_required(self, capsys):
        code, _, err = call(["simulate", "--target", PATH, "--r", "2", "--strategy", "path_builder",
                             "--n", "100", "--budget", "5"], capsys)
        assert code == 1 and "seed" in err

    def test_csv_and_json_carry_same_trace(self, capsys):
        base = ["simulate", "--target", PATH, "--r", "2", "--strategy", "path_builder", "--n", "100",
                "--budget", "30", "--seed", "4"]
        _, cs, _ = call(base + ["--format", "csv"], capsys)
        _, js, _ = call(base, capsys)
        trace = trace_from_csv(cs)
        d = json.loads(js)
        assert [[s, list(U), list(V), dup] for s, U, V, dup in trace] == d["trace"]
        assert d["steps"] == len(trace)

    def test_unknown_strategy(self, capsys):
        code, _, err = call(["simulate", "--target", PATH, "--r", "2", "--strategy", "psychic", "--n", "100",
                             "--budget", "5", "--seed", "1"], capsys)
        assert code == 1 and "psychic" in err


class TestSweep:
    def test_missing_config(self, tmp_path, capsys):
        code, _, err = call(["sweep", "--config", str(tmp_path / "missing.json")], capsys)
        assert code == 1 and "config" in err

    def test_unknown_field(self, tmp_path, capsys):
        code, _, err = call(["sweep", "--config", sweep_config(tmp_path, colour="red")], capsys)
        assert code == 1 and "colour" in err

    def test_missing_seed(self, tmp_path, capsys):
        cfg = sweep_config(tmp_path)
        d = json.loads(open(cfg).read())
        del d["seed"]
        open(cfg, "w").write(json.dumps(d))
        code, _, err = call(["sweep", "--config", cfg], capsys)
        assert code == 1 and "seed" in err
        assert call(["sweep", "--config", cfg, "--seed", "3", "--out", os.devnull], capsys)[0] == 0

    def test_atomic_byte_identical_and_round_trip(self, tmp_path, capsys):
        cfg = sweep_config(tmp_path)
        a, b, j = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "a.json"
        for path, fmt in ((a, "csv"), (b, "csv"), (j, "json")):
            assert call(["sweep", "--config", cfg, "--out", str(path), "--format", fmt], capsys)[0] == 0
        assert a.read_bytes() == b.read_bytes()
        assert not [p for p in os.listdir(tmp_path) if p.startswith(".tmp-")]
        points = parse_csv(a.read_text())
        rows = json.loads(j.read_text())["points"]
        assert [(p.n, p.t, p.trials, p.successes, p.p_hat, p.ci_lo, p.ci_hi) for p in points] == \
            [(r["n"], r["t"], r["trials"], r["successes"], r["p_hat"], r["ci_lo"], r["ci_hi"]) for r in rows]


class TestVerifyAndOracle:
    def test_verify_appendix(self, capsys):
        code, out, _ = call(["verify", "--suite", "appendix"], capsys)
        d = json.loads(out)
        assert code == 0 and d["all_pass"] and len(d["claims"]) == 11

    def test_verify_subset_csv(self, capsys):
        code, out, _ = call(["verify", "--suite", "appendix", "--claims", "clique_edge_balanced,ell_k_gap_bound",
                              "--format", "csv"], capsys)
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and [r["claim"] for r in rows] == ["clique_edge_balanced", "ell_k_gap_bound"]
        assert all(r["status"] == "pass" for r in rows)

    def test_verify_bad_ranges(self, capsys):
        code, _, err = call(["verify", "--suite", "appendix", "--claims", "clique_edge_balanced",
                             "--ranges", '{"clique_edge_balanced": {"colour": 3}}'], capsys)
        assert code == 1 and "ranges" in err

    def test_oracle_hit(self, capsys):
        code, out, _ = call(["oracle", "hit", "--n", "5", "--t", "2", "--required", "[[[1,2],1]]"], capsys)
        d = json.loads(out)
        assert code == 0 and (d["num"], d["den"]) == ("19", "100")

    def test_oracle_hit_csv_matches_json(self, capsys):
        argv = ["oracle", "hit", "--n", "12", "--t", "30", "--required", "[[[1,2],2],[[1,3],1]]"]
        _, js, _ = call(argv, capsys)
        _, cs, _ = call(argv + ["--format", "csv"], capsys)
        d = json.loads(js)
        rows = dict(csv.reader(io.StringIO(cs)))
        assert rows["num"] == d["num"] and float(rows["probability"]) == d["probability"]

    def test_resource_error_exit_2(self, capsys):
        req = json.dumps([[[1, k], 2] for k in range(2, 17)])
        code, _, err = call(["oracle", "hit", "--n", "40", "--t", "10", "--required", req], capsys)
        assert code == 2 and "resource" in err

    def test_oracle_phi(self, capsys):
        code, out, _ = call(["oracle", "phi", "--n", "1000", "--p", "1/2",
                             "--target", '{"family":"clique","k":4,"s":3}'], capsys)
        assert code == 0 and json.loads(out)["e"] == 1

    def test_oracle_missing_argument(self, capsys):
        code, _, err = call(["oracle", "phi", "--n", "10"], capsys)
        assert code == 1 and "target" in err

    def test_no_subcommand(self, capsys):
        assert call([], capsys)[0] == 1


def test_console_script_repeatable(tmp_path):
    cfg = sweep_config(tmp_path)
    outs = []
    for name in ("x.csv", "y.csv"):
        target = tmp_path / name
        proc = subprocess.run([sys.executable, "-m", "semirandom.cli", "sweep", "--config", cfg, "--format", "csv",
                               "--out", str(target)], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]
