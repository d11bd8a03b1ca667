import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from scent import fileio
from scent.cli import EXIT_INPUT, EXIT_NUMERIC, EXIT_OK, main
from scent.distill import DistillationFamily
from scent.locc import DiscriminationBasis

from conftest import random_sc

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out else None), err


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(fileio.dumps(doc) if not isinstance(doc, str) else doc)
    return str(p)


def value(report, key):
    return report["results"][key]["value"]


class TestRealize:
    def test_bell(self, capsys):
        code, rep, _ = run(capsys, "realize", str(SAMPLES / "phi_plus_sc.json"))
        assert code == EXIT_OK
        assert value(rep, "count") == 1
        assert value(rep, "residual") <= 1e-15

    def test_qubit_mixed(self, capsys):
        code, rep, _ = run(capsys, "realize", str(SAMPLES / "qubit_mixed.json"))
        assert code == EXIT_OK
        assert value(rep, "residual") <= 1e-10
        assert rep["diagnostics"]["converged"] is True

    def test_failure_exit_two(self, capsys, tmp_path):
        from scent import qmath

        rho = qmath.random_density_matrix(4, np.random.default_rng(15))
        f = write(tmp_path, "d4.json", fileio.matrix_doc(rho))
        code, rep, _ = run(capsys, "realize", f, "--seed", "15", "--restarts", "2", "--quiet")
        assert code == EXIT_NUMERIC
        assert value(rep, "residual") > 1e-3
        assert rep["diagnostics"]["converged"] is False
        assert rep["diagnostics"]["witness_certifies_unrealizable"] is True

    def test_summary_and_quiet(self, capsys):
        _, _, err = run(capsys, "realize", str(SAMPLES / "phi_plus_sc.json"))
        assert err.startswith("realize:")
        _, _, err = run(capsys, "realize", str(SAMPLES / "phi_plus_sc.json"), "--quiet")
        assert err == ""


class TestRee:
    def test_bell(self, capsys):
        code, rep, _ = run(capsys, "ree", str(SAMPLES / "phi_plus_sc.json"))
        assert code == EXIT_OK
        assert value(rep, "ree_closed_form") == pytest.approx(1.0, abs=1e-12)
        assert rep["results"]["ree_closed_form"]["units"] == "bits"

    def test_diagonal(self, capsys):
        _, rep, _ = run(capsys, "ree", str(SAMPLES / "diagonal_sc.json"))
        assert value(rep, "ree_closed_form") == pytest.approx(0.0, abs=1e-12)

    def test_oracle_gap(self, capsys, tmp_path):
        sc = random_sc(2, np.random.default_rng(3))
        f = write(tmp_path, "sc.json", fileio.state_doc(sc))
        code, rep, _ = run(capsys, "ree", f, "--oracle", "--restarts", "8")
        assert code == EXIT_OK
        assert -1e-6 <= value(rep, "oracle_gap") <= 5e-3

    def test_full_matrix_sc_detected(self, capsys, tmp_path):
        from scent.states import embed

        sc = random_sc(2, np.random.default_rng(0))
        f = write(tmp_path, "full.json", fileio.matrix_doc(np.asarray(embed(sc)), dims=[2, 2]))
        _, rep, _ = run(capsys, "ree", f)
        from scent.ree import ree_sc

        assert value(rep, "ree_closed_form") == pytest.approx(ree_sc(sc), abs=1e-12)

    def test_non_sc_without_oracle(self, capsys, tmp_path):
        f = write(tmp_path, "mixed.json", fileio.matrix_doc(np.eye(4) / 4, dims=[2, 2]))
        code, rep, err = run(capsys, "ree", f)
        assert code == EXIT_INPUT and rep is None
        assert "--oracle" in err

    def test_non_sc_with_oracle(self, capsys, tmp_path):
        f = write(tmp_path, "mixed.json", fileio.matrix_doc(np.eye(4) / 4, dims=[2, 2]))
        code, rep, _ = run(capsys, "ree", f, "--oracle", "--restarts", "2")
        assert code == EXIT_OK
        assert "ree_closed_form" not in rep["results"]
        assert value(rep, "ree_oracle") <= 1e-6


class TestAdditivity:
    def test_two_bells(self, capsys):
        f = str(SAMPLES / "phi_plus_sc.json")
        code, rep, _ = run(capsys, "additivity", f, f)
        assert code == EXIT_OK
        assert value(rep, "lhs") == pytest.approx(2.0, abs=1e-12)
        assert value(rep, "rhs") == pytest.approx(2.0, abs=1e-12)

    def test_random_pair(self, capsys, tmp_path):
        g = np.random.default_rng(8)
        f1 = write(tmp_path, "a.json", fileio.state_doc(random_sc(2, g)))
        f2 = write(tmp_path, "b.json", fileio.state_doc(random_sc(3, g)))
        code, rep, _ = run(capsys, "additivity", f1, f2)
        assert code == EXIT_OK and value(rep, "residual") <= 1e-10

    def test_dimension_mismatched_file(self, capsys, tmp_path):
        bad = write(tmp_path, "bad.json", fileio.matrix_doc(np.eye(6) / 6, dims=[2, 3]))
        code, _, err = run(capsys, "additivity", str(SAMPLES / "phi_plus_sc.json"), bad)
        assert code == EXIT_INPUT
        assert "bad.json" in err

    def test_local_dim_mismatch(self, capsys, tmp_path):
        bad = write(tmp_path, "bad.json", fileio.matrix_doc(np.eye(3) / 3, local_dim=2))
        code, _, err = run(capsys, "additivity", bad, bad)
        assert code == EXIT_INPUT and "local_dim" in err


class TestDiscriminate:
    def test_random_d3(self, capsys):
        code, rep, _ = run(capsys, "discriminate", "--dim", "3", "--seed", "4")
        assert code == EXIT_OK
        assert value(rep, "success_probability") == pytest.approx(1.0, abs=1e-12)
        assert rep["diagnostics"]["branch_count"] == 9

    def test_identity_basis_file(self, capsys, tmp_path):
        f = write(tmp_path, "u.json", fileio.matrix_doc(np.eye(2)))
        code, rep, _ = run(capsys, "discriminate", "--basis", f)
        assert code == EXIT_OK and value(rep, "success_probability") == pytest.approx(1.0, abs=1e-12)

    def test_non_unitary_basis_file(self, capsys, tmp_path):
        f = write(tmp_path, "u.json", fileio.matrix_doc(np.ones((2, 2))))
        code, _, _ = run(capsys, "discriminate", "--basis", f)
        assert code == EXIT_INPUT

    def test_sampled_reproducible(self, capsys):
        args = ("discriminate", "--dim", "3", "--mode", "sampled", "--trials", "40", "--seed", "7")
        main(list(args))
        a = capsys.readouterr().out
        main(list(args))
        b = capsys.readouterr().out
        assert a == b
        assert json.loads(a)["diagnostics"]["successes"] == 40

    def test_transcripts(self, capsys, tmp_path):
        from scent.locc import parse_transcripts

        out = tmp_path / "t.tsv"
        _, rep, _ = run(capsys, "discriminate", "--dim", "2", "--transcripts", str(out))
        assert rep["diagnostics"]["transcripts_path"] == str(out)
        ts = parse_transcripts(out.read_text())
        assert len(ts) == 4 and all(t.success for t in ts)

    def test_requires_basis(self, capsys):
        assert run(capsys, "discriminate")[0] == EXIT_INPUT


class TestDistill:
    def test_bell_pair_file(self, capsys):
        code, rep, _ = run(capsys, "distill", str(SAMPLES / "bell_pair_family.json"))
        assert code == EXIT_OK
        assert abs(value(rep, "distillable_entanglement") - 1.0) <= 1e-12

    def test_bell_pair_flag(self, capsys):
        code, rep, _ = run(capsys, "distill", "--bell-pair", "2", "3")
        assert code == EXIT_OK and abs(value(rep, "distillable_entanglement") - 1.0) <= 1e-12

    def test_bell_pair_bad_pair(self, capsys):
        assert run(capsys, "distill", "--bell-pair", "0", "2")[0] == EXIT_INPUT

    def test_product_payload(self, capsys, tmp_path):
        f = DistillationFamily(DiscriminationBasis(np.eye(2)), np.array([1.0, 0.0]), np.zeros((2, 2)))
        path = write(tmp_path, "prod.json", fileio.family_doc(f))
        code, rep, _ = run(capsys, "distill", path)
        assert code == EXIT_OK and value(rep, "distillable_entanglement") == pytest.approx(0.0, abs=1e-12)

    def test_three_states(self, capsys):
        _, rep, _ = run(capsys, "distill", str(SAMPLES / "three_state_family.json"))
        assert value(rep, "distillable_entanglement") == pytest.approx(1.5, abs=1e-12)
        assert len(rep["diagnostics"]["branches"]) == 9

    def test_bounds_gap_exit_two(self, capsys, monkeypatch):
        from scent import distill

        monkeypatch.setattr(distill, "ree_upper_bound", lambda f: 2.0)
        code, rep, _ = run(capsys, "distill", "--bell-pair", "0", "1")
        assert code == EXIT_NUMERIC
        assert value(rep, "upper_bound") == 2.0

    def test_requires_family(self, capsys):
        assert run(capsys, "distill")[0] == EXIT_INPUT


class TestContract:
    @pytest.mark.parametrize(
        "argv",
        [
            ("realize", str(SAMPLES / "qubit_mixed.json"), "--seed", "3"),
            ("ree", str(SAMPLES / "phi_plus_sc.json")),
            ("discriminate", "--dim", "4", "--seed", "11"),
            ("distill", str(SAMPLES / "three_state_family.json")),
        ],
    )
    def test_byte_identical(self, capsys, argv):
        main(list(argv))
        a = capsys.readouterr().out
        main(list(argv))
        assert a == capsys.readouterr().out

    def test_seed_echoed_and_env(self, capsys, monkeypatch):
        monkeypatch.setenv("SCENT_SEED", "42")
        _, rep, _ = run(capsys, "discriminate", "--dim", "2")
        assert rep["seed"] == 42
        _, rep, _ = run(capsys, "discriminate", "--dim", "2", "--seed", "5")
        assert rep["seed"] == 5

    def test_bad_env_seed(self, capsys, monkeypatch):
        monkeypatch.setenv("SCENT_SEED", "minus one")
        assert run(capsys, "discriminate", "--dim", "2")[0] == EXIT_INPUT

    @pytest.mark.parametrize("seed", ["-1", str(2**64), "x"])
    def test_bad_seed_flag(self, capsys, seed):
        with pytest.raises(SystemExit) as exc:
            main(["discriminate", "--dim", "2", "--seed", seed])
        assert exc.value.code == EXIT_INPUT

    def test_units_everywhere(self, capsys):
        _, rep, _ = run(capsys, "distill", "--bell-pair", "0", "1")
        for q in rep["results"].values():
            assert q["units"] in {"bits", "probability", "norm"}

    def test_echoed_inputs_reparse(self, capsys):
        _, rep, _ = run(capsys, "realize", str(SAMPLES / "qubit_mixed.json"))
        src = fileio.parse_state(fileio.load_json(SAMPLES / "qubit_mixed.json"))
        echo = fileio.parse_state(rep["inputs"]["state"])
        assert np.array_equal(np.asarray(echo.matrix), np.asarray(src.matrix))
        _, rep, _ = run(capsys, "distill", str(SAMPLES / "three_state_family.json"))
        fam = fileio.parse_family(rep["inputs"]["family"])
        assert np.array_equal(fam.basis.u, fileio.parse_family(fileio.load_json(SAMPLES / "three_state_family.json")).basis.u)


MALFORMED = {
    "not_json.json": "{ re: ",
    "array_root.json": "[1, 2]",
    "missing_im.json": '{"dim_rows": 2, "dim_cols": 2, "re": [[1, 0], [0, 0]]}',
    "short_row.json": '{"dim_rows": 2, "dim_cols": 2, "re": [[1], [0, 0]], "im": [[0, 0], [0, 0]]}',
    "string_entry.json": '{"dim_rows": 1, "dim_cols": 1, "re": [["a"]], "im": [[0]]}',
    "zero_rows.json": '{"dim_rows": 0, "dim_cols": 1, "re": [], "im": []}',
    "non_hermitian.json": '{"dim_rows": 2, "dim_cols": 2, "re": [[0.5, 1], [0, 0.5]], "im": [[0, 0], [0, 0]]}',
    "bad_trace.json": '{"dim_rows": 2, "dim_cols": 2, "re": [[1, 0], [0, 1]], "im": [[0, 0], [0, 0]]}',
    "bad_dims.json": '{"dim_rows": 4, "dim_cols": 4, "re": [[0.25,0,0,0],[0,0.25,0,0],[0,0,0.25,0],[0,0,0,0.25]], "im": [[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]], "dims": [3, 2]}',
}


@pytest.mark.parametrize("name", sorted(MALFORMED))
@pytest.mark.parametrize("command", ["realize", "ree"])
def test_malformed_corpus(capsys, tmp_path, name, command):
    f = write(tmp_path, name, MALFORMED[name])
    code, rep, err = run(capsys, command, f)
    assert code == EXIT_INPUT and rep is None
    assert "input error" in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "realize", str(tmp_path / "nope.json"))
    assert code == EXIT_INPUT and "nope.json" in err


def test_malformed_family(capsys, tmp_path):
    doc = fileio.load_json(SAMPLES / "bell_pair_family.json")
    doc["lambda"] = [0.5, "x"]
    code, _, err = run(capsys, "distill", write(tmp_path, "f.json", json.dumps(doc)))
    assert code == EXIT_INPUT and "lambda" in err


json_values = st.recursive(
    st.none() | st.booleans() | st.integers(-3, 5) | st.floats(allow_nan=False, allow_infinity=False) | st.text(max_size=3),
    lambda c: st.lists(c, max_size=4) | st.dictionaries(st.sampled_from(["dim_rows", "dim_cols", "re", "im", "dims", "local_dim"]), c, max_size=6),
    max_leaves=20,
)


@given(json_values)
@settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
def test_exit_code_contract_fuzz(tmp_path, capsys, doc):
    f = write(tmp_path, "fuzz.json", json.dumps(doc))
    code = main(["ree", f, "--quiet"])
    capsys.readouterr()
    assert code in (EXIT_OK, EXIT_INPUT)
