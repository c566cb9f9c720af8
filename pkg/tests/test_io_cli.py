"""JSON round trips, bundled data integrity, and CLI behavior."""

import json
import math

import numpy as np
import pytest
from click.testing import CliRunner

from nlocc_lab import (
    Protocol,
    ProtocolStep,
    ValidationError,
    computational_basis,
    load_protocol,
    load_state,
    qubit_pair_layout,
    save_operator,
    save_protocol,
)
from nlocc_lab.cli import main
from nlocc_lab.data import BUNDLED_PROTOCOLS, BUNDLED_STATES, protocol_path, state_path
from nlocc_lab.random_ops import bell_state, random_density_matrix


def test_state_roundtrip_bit_exact(tmp_path):
    rng = np.random.default_rng(501)
    rho = random_density_matrix(rng, qubit_pair_layout(1))
    p = tmp_path / "state.json"
    save_operator(rho.op, str(p))
    back = load_state(str(p))
    assert np.array_equal(back.mat, rho.mat)
    assert back.layout == rho.layout


def test_protocol_roundtrip(tmp_path):
    lay = qubit_pair_layout(1)
    proto = Protocol(
        [
            ProtocolStep.dephase_local("a0", computational_basis(2)),
            ProtocolStep.send_dephased("a0", "B"),
            ProtocolStep.add_max_mixed(2, "A", label="anc"),
            ProtocolStep.discard("anc"),
        ],
        lay,
    )
    p = tmp_path / "proto.json"
    save_protocol(proto, str(p))
    back = load_protocol(str(p))
    assert back.initial_layout == proto.initial_layout
    assert [s.kind for s in back.steps] == [s.kind for s in proto.steps]
    rho = bell_state()
    assert np.allclose(back.apply(rho).mat, proto.apply(rho).mat)


def test_bundled_states_load_and_validate():
    for name in BUNDLED_STATES:
        rho = load_state(state_path(name))
        assert abs(np.trace(rho.mat) - 1.0) < 1e-12


def test_bundled_protocols_load_and_validate():
    for name in BUNDLED_PROTOCOLS:
        proto = load_protocol(protocol_path(name))
        for ch in proto.channels():
            assert ch.is_trace_preserving()


def test_load_errors_carry_context(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ValidationError) as e:
        load_state(str(p))
    assert "bad.json" in str(e.value)
    p2 = tmp_path / "bad2.json"
    p2.write_text(json.dumps({"dims": [2], "parties": ["A"], "matrix": [[1, 0]]}))
    with pytest.raises(ValidationError):
        load_state(str(p2))


def test_cli_compress_csv():
    runner = CliRunner()
    res = runner.invoke(
        main,
        ["compress", "--state", state_path("qubit_09"), "--n", "10", "--epsilon", "0.01"],
    )
    assert res.exit_code == 0
    lines = res.output.strip().splitlines()
    header = lines[0].split(",")
    row = dict(zip(header, lines[1].split(",")))
    assert int(row["dim"]) == 229
    assert float(row["rate"]) == pytest.approx(math.log2(229) / 10)


def test_cli_mismatch_json():
    runner = CliRunner()
    res = runner.invoke(
        main,
        ["mismatch", "--p", "0.9,0.1", "--q", "0.5,0.5", "--n", "12", "--epsilon", "0.05"],
    )
    assert res.exit_code == 0
    obj = json.loads(res.output)
    assert obj["rate"] == 1.0


def test_cli_ree_deterministic_bytes():
    runner = CliRunner()
    args = ["ree", "--state", state_path("bell"), "--seed", "3", "--max-iters", "50"]
    out1 = runner.invoke(main, args)
    out2 = runner.invoke(main, args)
    assert out1.exit_code == 0
    assert out1.output == out2.output
    obj = json.loads(out1.output)
    assert obj["value_bits"] == pytest.approx(1.0, abs=1e-2)
    assert obj["seed"] == 3


def test_cli_bound_zero_zero():
    runner = CliRunner()
    res = runner.invoke(main, ["bound", "--state", state_path("zero_zero"), "--seed", "0"])
    assert res.exit_code == 0
    obj = json.loads(res.output)
    assert obj["bound_bits"] == pytest.approx(2.0, abs=1e-6)


def test_cli_dual_check():
    runner = CliRunner()
    res = runner.invoke(
        main,
        ["dual-check", "--protocol", protocol_path("dephase_send"), "--trials", "50"],
    )
    assert res.exit_code == 0
    obj = json.loads(res.output)
    assert obj["pass"] is True
    assert obj["max_deviation"] <= 1e-9


def test_cli_protocol_audit():
    runner = CliRunner()
    res = runner.invoke(
        main,
        [
            "protocol",
            "--protocol", protocol_path("dephase_send"),
            "--state", state_path("zero_zero"),
            "--n", "1",
            "--m", "1",
        ],
    )
    assert res.exit_code == 0
    obj = json.loads(res.output)
    assert obj["f_primal"] == pytest.approx(1.0, abs=1e-12)
    assert abs(obj["f_primal"] - obj["f_dual"]) <= 1e-9


def test_cli_validation_failure_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dims": [2, 2], "parties": ["A", "B"],
                               "matrix": [[1, 0]] * 16}))
    runner = CliRunner()
    res = runner.invoke(
        main, ["compress", "--state", str(bad), "--n", "4", "--epsilon", "0.1"]
    )
    assert res.exit_code == 2

    res = runner.invoke(
        main,
        ["compress", "--state", state_path("qubit_09"), "--n", "4", "--epsilon", "1.5"],
    )
    assert res.exit_code == 2


def test_cli_numerical_failure_exits_3(tmp_path):
    # an audit whose dual image has no overlap with the input triggers exit 3
    runner = CliRunner()
    res = runner.invoke(
        main,
        [
            "protocol",
            "--protocol", protocol_path("identity"),
            "--state", state_path("bell"),
            "--n", "1",
            "--m", "1",
        ],
    )
    # bell has overlap 0.25 with |00><00|, so use a state with zero overlap
    one_one = {"dims": [2, 2], "parties": ["A", "B"], "labels": ["a0", "b0"],
               "matrix": [[0, 0]] * 15 + [[1, 0]]}
    p = tmp_path / "one_one.json"
    # row-major 4x4: entry (3,3) = 1 -> |11><11|
    mat = [[0, 0]] * 16
    mat[15] = [1, 0]
    one_one["matrix"] = mat
    p.write_text(json.dumps(one_one))
    res = runner.invoke(
        main,
        ["protocol", "--protocol", protocol_path("identity"),
         "--state", str(p), "--n", "1", "--m", "1"],
    )
    assert res.exit_code == 3


def test_cli_out_file(tmp_path):
    dest = tmp_path / "res.json"
    runner = CliRunner()
    res = runner.invoke(
        main,
        ["mismatch", "--p", "0.9,0.1", "--q", "0.6,0.4", "--n", "10",
         "--epsilon", "0.05", "--out", str(dest)],
    )
    assert res.exit_code == 0
    obj = json.loads(dest.read_text())
    assert "rate" in obj and "p_mass" in obj
