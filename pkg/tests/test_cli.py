import json
import subprocess
import sys
from pathlib import Path

import numpy as np

import concyc
from concyc import serialize


def run_cli(*args: str) -> subprocess.CompletedProcess:
    cmd = [sys.executable, "-m", "concyc", *args]
    return subprocess.run(cmd, capture_output=True, text=True)


class TestCritical:
    def test_123_catalogue(self):
        cp = run_cli("critical", "--radii", "1,2,3", "--grid", "24")
        assert cp.returncode == 0, cp.stderr
        data = json.loads(cp.stdout)
        assert len(data["points"]) == 6
        assert data["euler_sum"] == 0
        assert data["warnings"] == []

    def test_equal_radii_warns(self):
        cp = run_cli("critical", "--radii", "1,1,1", "--grid", "24")
        assert cp.returncode == 0, cp.stderr
        data = json.loads(cp.stdout)
        assert any("non-generic" in w for w in data["warnings"])

    def test_symmetric_four_circle_shapes(self):
        cp = run_cli("critical", "--radii", "3,2.53,3,4.6", "--grid", "16")
        assert cp.returncode == 0, cp.stderr
        data = json.loads(cp.stdout)
        shapes = {p["shape"] for p in data["points"]}
        assert "convex" in shapes
        assert "partially-aligned" in shapes
        assert "self-intersecting" not in shapes

    def test_repeated_radius_flags(self):
        a = run_cli("critical", "--radius", "1", "--radius", "2", "--radius", "3",
                    "--grid", "24")
        b = run_cli("critical", "--radii", "1,2,3", "--grid", "24")
        assert a.returncode == 0, a.stderr
        assert a.stdout == b.stdout

    def test_invalid_radius_exits_2(self):
        cp = run_cli("critical", "--radii", "0,2,3")
        assert cp.returncode == 2
        assert "error" in cp.stderr

    def test_missing_radii_exits_2(self):
        cp = run_cli("critical")
        assert cp.returncode == 2

    def test_two_few_radii_exits_2(self):
        cp = run_cli("critical", "--radii", "1,2")
        assert cp.returncode == 2

    def test_deterministic_output(self):
        a = run_cli("critical", "--radii", "1,2,3", "--grid", "24")
        b = run_cli("critical", "--radii", "1,2,3", "--grid", "24")
        assert a.stdout == b.stdout

    def test_json_reingestion_reproduces_perimeter(self):
        cp = run_cli("critical", "--radii", "1.37,2.21,3.03", "--grid", "24")
        data = json.loads(cp.stdout)
        radii = np.array(data["radii"])
        for p in data["points"]:
            again = float(concyc.perimeter(radii, np.array(p["angles"])))
            assert again == p["perimeter"]  # bit-for-bit at repr precision


class TestParadesCommand:
    def test_report(self):
        cp = run_cli("parades", "--radii", "1,2,3,4.6")
        assert cp.returncode == 0, cp.stderr
        data = json.loads(cp.stdout)
        assert len(data["parades"]) == 8
        shortest = data["parades"][0]
        assert shortest["signs"] == [1, 1, 1]
        assert shortest["index"] == 0
        assert shortest["epsilons"] == [2, 0, 0, -2]


class TestClosedFormCommand:
    def test_n3(self):
        cp = run_cli("closed-form", "--radii", "1,2,3")
        data = json.loads(cp.stdout)
        assert abs(12 * data["triangle_inradius"] ** 3
                   + 49 * data["triangle_inradius"] ** 2 - 36) < 1e-10
        assert len(data["critical_values"]) == 6

    def test_n4(self):
        cp = run_cli("closed-form", "--radii", "3,2.53,3,4.6")
        data = json.loads(cp.stdout)
        assert data["quad_exists"]
        assert data["partially_aligned"]["2"]["count"] == 2
        assert data["partially_aligned"]["4"]["count"] == 0


class TestSweepCommand:
    def test_csv_and_events(self, tmp_path: Path):
        csv_path = tmp_path / "sweep.csv"
        json_path = tmp_path / "events.json"
        cp = run_cli(
            "sweep", "--radii", "3,2.53,3,4.6", "--vary", "2",
            "--from", "1.8", "--to", "1.05", "--steps", "40",
            "--grid", "16",
            "--csv", str(csv_path), "--json", str(json_path),
        )
        assert cp.returncode == 0, cp.stderr
        events = json.loads(json_path.read_text())["events"]
        kinds = {e["kind"] for e in events}
        assert "tangency" in kinds
        assert "pitchfork" in kinds
        tangency = [e for e in events if e["kind"] == "tangency"][0]
        pitchfork = [e for e in events if e["kind"] == "pitchfork"][0]
        assert abs(tangency["param"] - 1.7) < 0.05
        assert abs(pitchfork["param"] - 1.13) < 0.02

        text = csv_path.read_text()
        header = text.splitlines()[0].split(",")
        assert header[:7] == ["param", "branch_id", "perimeter", "index",
                              "shape", "det_hessian", "tangential_radius"]
        assert header[7:] == ["angle_1", "angle_2", "angle_3"]

        branches = serialize.sweep_from_csv(text)
        radii = np.array([3.0, 2.53, 3.0, 4.6])
        total = 0
        for samples in branches.values():
            for s in samples:
                total += 1
                r = radii.copy()
                r[1] = s.param
                assert float(concyc.perimeter(r, s.angles)) == s.perimeter
        assert total == sum(1 for line in text.splitlines()[1:] if line)

    def test_sweep_deterministic(self):
        args = ("sweep", "--radii", "1,2,3", "--vary", "2",
                "--from", "2.2", "--to", "2.0", "--steps", "4", "--grid", "12")
        a = run_cli(*args)
        b = run_cli(*args)
        assert a.stdout == b.stdout

    def test_stdout_csv_only(self):
        cp = run_cli("sweep", "--radii", "1,2,3", "--vary", "2",
                     "--from", "2.2", "--to", "2.0", "--steps", "5",
                     "--grid", "12")
        assert cp.returncode == 0, cp.stderr
        assert cp.stdout.startswith("param,branch_id,")
        assert "note:" in cp.stderr


class TestVerifyCommand:
    def test_123_passes(self):
        cp = run_cli("verify", "--radii", "1,2,3")
        assert cp.returncode == 0, cp.stdout + cp.stderr
        assert "FAIL" not in cp.stdout

    def test_4cc_passes_including_self_intersection_check(self):
        cp = run_cli("verify", "--radii", "1,2,3,4.6", "--grid", "16")
        assert cp.returncode == 0, cp.stdout + cp.stderr
        assert "no-self-intersecting-critical-points" in cp.stdout

    def test_pentagram(self):
        cp = run_cli("verify", "--pentagram")
        assert cp.returncode == 0
        assert "pentagram-local-maximum" in cp.stdout

    def test_missing_input_exits_2(self):
        cp = run_cli("verify")
        assert cp.returncode == 2


class TestCheckConfig:
    def test_stationary_parade(self):
        cp = run_cli("check-config", "--radii", "1,2,3", "--angles", "0,0")
        data = json.loads(cp.stdout)
        assert data["stationary"]
        assert data["shape"] == "parade"
        assert all(ev["kind"] == "refraction" for ev in data["vertex_events"])

    def test_non_stationary(self):
        cp = run_cli("check-config", "--radii", "1,2,3", "--angles", "0.7,2.1")
        data = json.loads(cp.stdout)
        assert not data["stationary"]
        assert data["gradient_norm"] > 1e-3
        assert any(ev["kind"] == "non-stationary" for ev in data["vertex_events"])

    def test_wrong_angle_count_exits_2(self):
        cp = run_cli("check-config", "--radii", "1,2,3", "--angles", "0.7")
        assert cp.returncode == 2


class TestSerializeRoundTrips:
    def test_catalogue_roundtrip(self):
        cat = concyc.find_all([1.0, 2.0, 3.0])
        d = serialize.catalogue_to_dict(cat)
        assert json.loads(json.dumps(d)) == d
        back = serialize.catalogue_from_dict(d)
        assert len(back.points) == len(cat.points)
        for p, q in zip(cat.points, back.points):
            assert np.array_equal(p.config, q.config)
            assert p.perimeter == q.perimeter
            assert p.shape == q.shape

    def test_run_record_roundtrip(self):
        rec = serialize.run_record({"radii": [1, 2, 3]}, {"n_points": 6})
        assert json.loads(json.dumps(rec)) == rec
        assert rec["tool_version"] == concyc.__version__
