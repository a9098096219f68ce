"""End-to-end checks for the twosided command-line tool.

Usage: cli_test.py PATH_TO_TWOSIDED
"""
import json
import os
import subprocess
import sys
import tempfile
import unittest

CLI = None


def run(*args):
    return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True)


class CliTest(unittest.TestCase):
    def setUp(self):
        self.dir = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.dir.cleanup()

    def write(self, name, text):
        path = os.path.join(self.dir.name, name)
        with open(path, "w") as f:
            f.write(text)
        return path

    def constant_case(self):
        y = self.write("y.csv", "\n".join(",".join(["1.5"] * 5) for _ in range(5)) + "\n")
        b = self.write("b.csv", "1,1,0,0,0\n")
        s = self.write("s.csv", "1,0,0,1,0\n")
        return y, b, s

    def test_constant_outcomes_give_unit_p_value(self):
        y, b, s = self.constant_case()
        r = run("test", y, b, s, "--L", 200, "--seed", 3)
        self.assertEqual(r.returncode, 0, r.stderr)
        out = json.loads(r.stdout)
        self.assertEqual(out["p_value"], 1.0)
        self.assertFalse(out["reject"])
        self.assertIn("manifest", out)

    def test_no_control_sellers_exits_3(self):
        y, b, _ = self.constant_case()
        s = self.write("s1.csv", "1,1,1,1,1\n")
        r = run("test", y, b, s)
        self.assertEqual(r.returncode, 3)
        self.assertIn("no control sellers", r.stderr)

    def test_same_seed_is_byte_identical(self):
        rows = ["%d,%d,%d,%d,%d,%d" % tuple((i * 7 + j * 3) % 5 for j in range(6)) for i in range(6)]
        y = self.write("y.csv", "\n".join(rows) + "\n")
        b = self.write("b.csv", "1\n1\n1\n0\n0\n0\n")
        s = self.write("s.csv", "0,1,0,1,0,1\n")
        for proc in ("buyer_spillover", "total_effect"):
            outs = [run("test", y, b, s, "--procedure", proc, "--L", 300, "--seed", 11, "--threads", t)
                    for t in (1, 3)]
            for o in outs:
                self.assertEqual(o.returncode, 0, o.stderr)
            self.assertEqual(outs[0].stdout, outs[1].stdout)

    def test_malformed_csv_reports_location(self):
        y = self.write("bad.csv", "1,2,3\n4,x,6\n7,8,9\n")
        b = self.write("b.csv", "1,0,0\n")
        s = self.write("s.csv", "1,0,0\n")
        r = run("test", y, b, s)
        self.assertEqual(r.returncode, 2)
        self.assertIn("row 2", r.stderr)
        self.assertIn("column 2", r.stderr)

    def test_dimension_mismatch_exits_2(self):
        y, _, s = self.constant_case()
        b = self.write("b4.csv", "1,1,0,0\n")
        self.assertEqual(run("test", y, b, s).returncode, 2)

    def test_unknown_option_exits_2(self):
        y, b, s = self.constant_case()
        self.assertEqual(run("test", y, b, s, "--procedure", "sideways").returncode, 2)
        self.assertEqual(run("test", y, b, s, "--bogus").returncode, 2)

    def test_simulate_zero_reps_exits_2(self):
        self.assertEqual(run("simulate", "--regime", "sharp_null", "--n", 10, "--reps", 0).returncode, 2)

    def test_simulate_table_preset(self):
        csv_path = os.path.join(self.dir.name, "t1.csv")
        json_path = os.path.join(self.dir.name, "t1.json")
        r = run("simulate", "--table", 1, "--n", 10, "--reps", 20, "--L", 50, "--seed", 1,
                "--csv", csv_path, "--json", json_path)
        self.assertEqual(r.returncode, 0, r.stderr)
        with open(csv_path) as f:
            lines = f.read().splitlines()
        self.assertEqual(lines[0], "regime,procedure,method,n,k,reps,completed,failures,rejections,rate,mc_se")
        # Two regimes, two procedures, three methods.
        self.assertEqual(len(lines) - 1, 12)
        with open(json_path) as f:
            report = json.load(f)
        self.assertNotIn("runtime_seconds", report)
        self.assertNotIn("timestamp", report["manifest"])
        self.assertEqual(len(report["rows"]), 12)
        again = run("simulate", "--table", 1, "--n", 10, "--reps", 20, "--L", 50, "--seed", 1, "--threads", 2)
        self.assertEqual(again.returncode, 0, again.stderr)
        self.assertEqual(again.stdout.splitlines(), lines)

    def test_power_empty_k_list_exits_2(self):
        self.assertEqual(run("power", "--n", 100, "--k-list", "").returncode, 2)

    def test_recommend_k(self):
        r = run("power", "--n", 100, "--recommend-k", "--beta", 0.95)
        self.assertEqual(r.returncode, 0, r.stderr)
        self.assertEqual(r.stdout.strip(), "2")

    def test_figure3_has_interior_maximum(self):
        r = run("power", "--figure3")
        self.assertEqual(r.returncode, 0, r.stderr)
        lines = r.stdout.strip().splitlines()
        self.assertEqual(lines[0], "k,log_support,sample_size,bound")
        bounds = [float(line.split(",")[3]) for line in lines[1:]]
        best = max(range(len(bounds)), key=bounds.__getitem__)
        self.assertGreater(best, 0)
        self.assertLess(best, len(bounds) - 1)

    def test_manifest_file(self):
        y, b, s = self.constant_case()
        m = os.path.join(self.dir.name, "manifest.json")
        r = run("test", y, b, s, "--L", 10, "--manifest", m)
        self.assertEqual(r.returncode, 0, r.stderr)
        with open(m) as f:
            manifest = json.load(f)
        self.assertIn("timestamp", manifest)
        self.assertEqual(len(manifest["inputs"]), 3)


if __name__ == "__main__":
    CLI = os.path.abspath(sys.argv.pop(1))
    unittest.main(verbosity=2)
