import json
import math

import numpy as np
import pytest

from spinphase import (
    DensityMatrix,
    HilbertParams,
    MomentumVector,
    SchemaError,
    StateVector,
    averaged_wigner,
    build_spin_operators,
    density_from_state,
    wigner_from_position,
)
from spinphase import io
from spinphase.cli import main


def write(path, doc):
    path.write_text(json.dumps(doc))
    return str(path)


class TestSchemas:
    def test_state_roundtrip_exact(self, rng):
        psi = StateVector.random(HilbertParams(4, hbar=2.0, phi0=0.3), rng)
        back = io.state_from_json(json.loads(io.dumps(io.state_to_json(psi))))
        assert isinstance(back, StateVector)
        assert back.params == psi.params
        assert np.array_equal(back.coeffs, psi.coeffs)

    def test_momentum_rep(self):
        chi = MomentumVector.basis(HilbertParams(3), 1)
        doc = io.state_to_json(chi)
        assert doc["rep"] == "momentum"
        assert isinstance(io.state_from_json(doc), MomentumVector)

    def test_state_layout(self):
        doc = io.state_to_json(StateVector(HilbertParams(2), [1j, 0]))
        assert doc == {"N": 2, "hbar": 1.0, "phi0": 0.0, "rep": "position",
                       "coeffs": [[0.0, 1.0], [0.0, 0.0]]}

    def test_density_roundtrip(self, rng):
        rho = DensityMatrix.random(HilbertParams(3), rng)
        back = io.density_from_json(json.loads(io.dumps(io.density_to_json(rho))))
        assert np.array_equal(back.entries, rho.entries)

    def test_operators_roundtrip(self):
        ops = build_spin_operators(HilbertParams.from_spin(1.5, hbar=2.0))
        back = io.operators_from_json(io.operators_to_json(ops))
        for a in ("jx", "jy", "jz"):
            assert np.array_equal(getattr(back, a), getattr(ops, a))

    def test_multipoles_roundtrip(self, rng):
        c = averaged_wigner(StateVector.random(HilbertParams(3, hbar=2.0, phi0=0.5), rng))
        doc = io.multipoles_to_json(c)
        assert doc["j"] == 1.0 and doc["s"] == 3.0 and doc["lmax"] == 2
        assert {(e["l"], e["m"]) for e in doc["coeffs"]} == {(l, m) for l in range(3) for m in range(-l, l + 1)}
        back = io.multipoles_from_json(json.loads(io.dumps(doc)))
        assert back.params == c.params
        assert np.array_equal(back.coeffs, c.coeffs)

    def test_multipoles_sparse_entries_default_zero(self):
        doc = {"j": 0.5, "s": 1.0, "lmax": 1, "coeffs": [{"l": 0, "m": 0, "re": 0.1, "im": 0.0}]}
        c = io.multipoles_from_json(doc)
        assert c.params.phi0 == 0.0 and c.params.hbar == 1.0
        assert np.array_equal(c.coeffs, [0.1, 0, 0, 0])

    def test_lattice_csv_roundtrip(self, rng):
        p = HilbertParams(3, hbar=2.0)
        w = wigner_from_position(StateVector.random(p, rng))
        text = io.lattice_to_csv(w)
        assert text.splitlines()[0] == "x,y,phi,xi,weight"
        assert len(text.splitlines()) == 1 + 36
        assert np.array_equal(io.lattice_from_csv(text, p).weights, w.weights)

    def test_lattice_json(self):
        w = wigner_from_position(StateVector.basis(HilbertParams(2), 0))
        doc = io.lattice_to_json(w)
        assert len(doc["points"]) == 16
        assert set(doc["points"][0]) == {"x", "y", "phi", "xi", "weight"}

    @pytest.mark.parametrize("doc", [
        {"hbar": 1.0, "rep": "position", "coeffs": [[1, 0]]},
        {"N": "2", "rep": "position", "coeffs": [[1, 0], [0, 0]]},
        {"N": True, "rep": "position", "coeffs": [[1, 0]]},
        {"N": 2, "rep": "spin", "coeffs": [[1, 0], [0, 0]]},
        {"N": 2, "rep": "position", "coeffs": [[1, 0]]},
        {"N": 2, "rep": "position", "coeffs": [1, 0]},
        {"N": 2, "rep": "position", "coeffs": [["a", 0], [0, 0]]},
        {"N": 0, "rep": "position", "coeffs": []},
        {"N": 2, "hbar": -1.0, "rep": "position", "coeffs": [[1, 0], [0, 0]]},
    ])
    def test_bad_state_documents(self, doc):
        with pytest.raises(SchemaError):
            io.state_from_json(doc)

    def test_bad_multipoles(self):
        base = {"j": 0.5, "s": 1.0, "lmax": 1, "coeffs": []}
        for patch in ({"j": 0.3}, {"lmax": -1}, {"coeffs": [{"l": 2, "m": 0, "re": 0, "im": 0}]},
                      {"coeffs": [{"l": 1, "m": 2, "re": 0, "im": 0}]}, {"coeffs": [{"l": 0, "m": 0}]}):
            with pytest.raises(SchemaError):
                io.multipoles_from_json({**base, **patch})

    def test_bad_lattice_csv(self):
        p = HilbertParams(2)
        with pytest.raises(SchemaError):
            io.lattice_from_csv("a,b\n1,2\n", p)
        with pytest.raises(SchemaError):
            io.lattice_from_csv("x,y,phi,xi,weight\n0,0,0,0,1\n", p)

    def test_read_json_invalid(self, tmp_path):
        f = tmp_path / "bad.json"
        f.write_text("{not json")
        with pytest.raises(SchemaError):
            io.read_json(f)


class TestCli:
    def test_state_and_wigner(self, tmp_path, capsys):
        out = tmp_path / "s.json"
        assert main(["state", "--j", "1", "--kind", "m", "--m", "1", "-o", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["N"] == 3 and doc["coeffs"][0] == [1.0, 0.0]
        assert main(["wigner", "-i", str(out)]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "x,y,phi,xi,weight" and len(lines) == 37
        total = sum(float(l.split(",")[-1]) for l in lines[1:])
        assert total == pytest.approx(1.0, abs=1e-14)

    def test_wigner_momentum_and_density(self, tmp_path, capsys):
        for kind, extra in (("random", ["--rep", "momentum"]), ("random-mixed", [])):
            f = tmp_path / f"{kind}.json"
            assert main(["state", "--N", "3", "--kind", kind, "--seed", "4", "-o", str(f), *extra]) == 0
            assert main(["wigner", "-i", str(f), "--format", "json"]) == 0
            doc = json.loads(capsys.readouterr().out)
            assert sum(p["weight"] for p in doc["points"]) == pytest.approx(1.0, abs=1e-13)

    def test_operators_spin_half(self, capsys):
        assert main(["operators", "--j", "0.5"]) == 0
        doc = json.loads(capsys.readouterr().out)
        ops = io.operators_from_json(doc)
        assert np.allclose(ops.jx, [[0, 0.5], [0.5, 0]])
        assert np.allclose(ops.jy, [[0, -0.5j], [0.5j, 0]])
        assert np.allclose(ops.jz, [[0.5, 0], [0, -0.5]])

    def test_avg_wigner_maximally_mixed(self, tmp_path, capsys):
        f = tmp_path / "mm.json"
        assert main(["state", "--j", "1.5", "--hbar", "2", "--kind", "maximally-mixed", "-o", str(f)]) == 0
        assert main(["avg-wigner", "-i", str(f)]) == 0
        c = io.multipoles_from_json(json.loads(capsys.readouterr().out))
        s = 4.0
        assert c.get(0, 0) == pytest.approx(1 / (s * math.sqrt(4 * math.pi)), abs=1e-12)
        assert np.abs(c.coeffs[1:]).max() < 1e-12

    def test_roundtrip_through_files(self, tmp_path):
        s, m, r = tmp_path / "s.json", tmp_path / "m.json", tmp_path / "r.json"
        assert main(["state", "--j", "1", "--kind", "random", "--seed", "7", "--phi0", "0.6", "-o", str(s)]) == 0
        assert main(["avg-wigner", "-i", str(s), "-o", str(m)]) == 0
        assert main(["reconstruct", "-i", str(m), "-o", str(r)]) == 0
        psi = io.state_from_json(json.loads(s.read_text()))
        rho = io.density_from_json(json.loads(r.read_text()))
        assert rho.params == psi.params
        assert np.linalg.norm(rho.entries - density_from_state(psi).entries, 2) < 1e-9

    def test_coherent_state(self, tmp_path, capsys):
        assert main(["state", "--j", "1", "--kind", "coherent", "--theta", "0"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert abs(complex(*doc["coeffs"][0])) == pytest.approx(1.0)

    def test_reconstruct_rejects_high_multipole(self, tmp_path, capsys):
        doc = {"j": 0.5, "s": 1.0, "lmax": 2, "coeffs": [
            {"l": 0, "m": 0, "re": 1 / math.sqrt(4 * math.pi), "im": 0.0},
            {"l": 2, "m": 0, "re": 0.1, "im": 0.0}]}
        assert main(["reconstruct", "-i", write(tmp_path / "c.json", doc)]) == 3
        assert "reconstruction failed" in capsys.readouterr().err

    def test_reconstruct_non_positive_warns(self, tmp_path, capsys):
        p = HilbertParams(2)
        c = averaged_wigner(DensityMatrix.maximally_mixed(p))
        doc = io.multipoles_to_json(c)
        # a dipole too long for any state: |<sigma>| > 1
        doc["coeffs"][2]["re"] = 0.5
        assert main(["reconstruct", "-i", write(tmp_path / "c.json", doc)]) == 0
        captured = capsys.readouterr()
        assert "not positive" in captured.err
        rho = io.density_from_json(json.loads(captured.out), validate=False)
        assert np.linalg.eigvalsh(rho.entries).min() < 0

    def test_verify_passes(self, capsys):
        assert main(["verify", "--j", "0.5", "--trials", "2"]) == 0
        out = capsys.readouterr().out
        assert "all checks passed" in out and "covariance" in out

    def test_verify_fails_with_impossible_tolerance(self, capsys):
        assert main(["verify", "--j", "1", "--trials", "1", "--tol", "casimir=-1"]) == 2
        assert "FAILED: casimir" in capsys.readouterr().out

    @pytest.mark.parametrize("argv", [
        ["verify", "--j", "1", "--tol", "nonsense=1"],
        ["verify", "--j", "1", "--tol", "casimir"],
        ["state", "--j", "0.3"],
        ["state", "--j", "1", "--kind", "m"],
        ["state", "--j", "1", "--kind", "m", "--m", "4"],
        ["state", "--N", "2", "--j", "0.5"],
        ["state"],
        ["bogus"],
        ["wigner", "-i", "/nonexistent/file.json"],
    ])
    def test_usage_errors_exit_1(self, argv, capsys):
        try:
            rc = main(argv)
        except SystemExit as exc:
            rc = exc.code
        assert rc == 1

    def test_schema_violation_exit_1(self, tmp_path, capsys):
        f = write(tmp_path / "bad.json", {"N": 2, "rep": "position", "coeffs": [[1, 0]]})
        assert main(["avg-wigner", "-i", f]) == 1
        assert main(["wigner", "-i", write(tmp_path / "un.json",
                                           {"N": 2, "rep": "position", "coeffs": [[1, 0], [1, 0]]})]) == 1
        assert "error" in capsys.readouterr().err
