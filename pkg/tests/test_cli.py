"""Command-line interface: exit codes, file formats, and library agreement."""

from __future__ import annotations

import json
import math

import numpy as np
import pytest

from ldpcontract import contraction, minimax, simulation
from ldpcontract.cli import SEED_ENV, dispatch
from ldpcontract.mechanisms import HadamardConfig, randomized_response
from ldpcontract.probability import KL, ProbVector
from ldpcontract.serialize import (
    channel_from_csv,
    channel_from_json,
    channel_to_json,
    distribution_to_json,
    emit_json,
)

LN3 = math.log(3.0)


@pytest.fixture
def run(capsys):
    def _run(*argv: str) -> tuple[int, str]:
        code = dispatch(list(argv))
        return code, capsys.readouterr().out

    return _run


# ------------------------------------------------------------- exit status


def test_unknown_command_exits_2(run):
    code, out = run("frobnicate")
    assert code == 2


def test_validation_error_exits_2_with_json(run):
    code, out = run("bounds", "--eps", "-1")
    assert code == 2
    assert "error" in json.loads(out)


def test_missing_required_flag_exits_2(run):
    code, _ = run("mechanism", "build", "--kind", "rr")  # no --k
    assert code == 2


# -------------------------------------------------------------- mechanisms


def test_mechanism_build_rr_matches_library(run, tmp_path):
    code, out = run("mechanism", "build", "--kind", "rr", "--k", "3", "--eps", "1.5")
    assert code == 0
    assert out.strip() == channel_to_json(randomized_response(3, 1.5)).strip()


def test_mechanism_build_to_file_and_audit(run, tmp_path):
    path = tmp_path / "chan.json"
    code, _ = run("mechanism", "build", "--kind", "rr", "--k", "4", "--eps", "1.0",
                  "--out", str(path))
    assert code == 0
    k = channel_from_json(path.read_text())
    np.testing.assert_array_equal(k.rows, randomized_response(4, 1.0).rows)
    code, out = run("mechanism", "audit", "--channel", str(path))
    assert code == 0
    assert json.loads(out)["eps"] == pytest.approx(1.0, abs=1e-12)


def test_mechanism_build_csv_round_trip(run, tmp_path):
    path = tmp_path / "chan.csv"
    code, _ = run("mechanism", "build", "--kind", "hadamard", "--d", "4",
                  "--eps", str(LN3), "--out", str(path), "--format", "csv")
    assert code == 0
    k = channel_from_csv(path.read_text())
    cfg = HadamardConfig.for_alphabet(4, LN3)
    assert k.n_out == cfg.n_out


def test_mechanism_binary_from_files(run, tmp_path):
    p_path, q_path = tmp_path / "p.json", tmp_path / "q.json"
    p_path.write_text(distribution_to_json(ProbVector(np.array([0.9, 0.1]))))
    q_path.write_text(distribution_to_json(ProbVector(np.array([0.1, 0.9]))))
    code, out = run("mechanism", "build", "--kind", "binary", "--eps", str(LN3),
                    "--p", str(p_path), "--q", str(q_path))
    assert code == 0
    rows = json.loads(out)
    assert rows[0][0] == pytest.approx(0.75, abs=1e-15)


# -------------------------------------------------------------- contraction


def test_contract_matches_library_bit_exact(run, tmp_path):
    path = tmp_path / "chan.json"
    path.write_text(channel_to_json(randomized_response(3, 1.0)))
    code, out = run("contract", "--channel", str(path), "--kind", "kl", "--grid", "101")
    assert code == 0
    est = contraction.eta_bruteforce(randomized_response(3, 1.0), KL, grid_n=101)
    payload = json.loads(out)
    assert payload["value"] == est.value  # bit-exact via 17-digit round trip
    assert payload["method"] == "grid"

    code, out = run("contract", "--channel", str(path), "--kind", "tv")
    assert json.loads(out)["value"] == contraction.eta_tv_exact(
        randomized_response(3, 1.0)).value


def test_contract_at_dist(run, tmp_path):
    chan = tmp_path / "chan.json"
    dist = tmp_path / "p.json"
    chan.write_text(channel_to_json(randomized_response(2, 1.0)))
    dist.write_text(distribution_to_json(ProbVector.uniform(2)))
    code, out = run("contract", "--channel", str(chan), "--kind", "chi2",
                    "--at-dist", str(dist))
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(contraction.upsilon(1.0), abs=1e-12)
    code, _ = run("contract", "--channel", str(chan), "--kind", "kl",
                  "--at-dist", str(dist))
    assert code == 2


# ------------------------------------------------------------------- bounds


def test_bounds_constants(run):
    code, out = run("bounds", "--eps", str(LN3), "--tv", "0.5")
    assert code == 0
    entries = {e["name"]: e["value"] for e in json.loads(out)["bounds"]}
    assert entries["upsilon"] == pytest.approx(0.25, abs=1e-15)
    assert entries["psi"] == pytest.approx(4.0 / 3.0, abs=1e-15)
    assert entries["chi2_vs_tv"] == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert "prior_kl_quadratic" in entries and "prior_tv_quadratic" in entries


def test_bound_subcommands_match_library(run):
    code, out = run("bound", "le-cam", "--n", "16", "--eps", "1.0",
                    "--alpha", "1.0", "--kl", "0.02", "--tv", "0.05")
    assert code == 0
    assert json.loads(out)["value"] == minimax.le_cam_lb(16, 1.0, 1.0, 0.02, 0.05)

    code, out = run("bound", "bht", "--eps", "1.0", "--tv", "0.8", "--h2", "0.8")
    lower, upper = minimax.bht_sample_complexity(1.0, 0.8, 0.8)
    payload = json.loads(out)
    assert (payload["lower"], payload["upper"]) == (lower, upper)

    code, out = run("bound", "hadamard-ub", "--n", "400", "--eps", str(LN3),
                    "--d", "4", "--h", "2")
    assert json.loads(out)["value"] == minimax.hadamard_ub(400, LN3, 4, 2.0)


# ------------------------------------------------------------------- fisher


def test_fisher_multinomial_entropy(run):
    code, out = run("fisher", "--family", "multinomial", "--theta", "0.2,0.3",
                    "--functional", "entropy", "--n", "100", "--eps", "1.0")
    assert code == 0
    payload = json.loads(out)
    assert set(payload) >= {"fisher", "fisher_inverse", "fisher_numeric",
                            "entropy_gradient", "cramer_rao_private_lb",
                            "private_fisher_bound"}


def test_fisher_gaussian(run):
    code, out = run("fisher", "--family", "gaussian", "--theta", "0.0", "--sigma", "2.0")
    assert code == 0
    assert json.loads(out)["fisher"][0][0] == pytest.approx(0.25, abs=1e-8)


# ----------------------------------------------------------------- simulate


def test_simulate_bht_matches_library(run, tmp_path):
    p_path, q_path = tmp_path / "p.json", tmp_path / "q.json"
    p_path.write_text(distribution_to_json(ProbVector(np.array([0.9, 0.1]))))
    q_path.write_text(distribution_to_json(ProbVector(np.array([0.1, 0.9]))))
    code, out = run("simulate", "bht", "--p", str(p_path), "--q", str(q_path),
                    "--eps", str(LN3), "--n", "10", "--trials", "4000", "--seed", "7")
    assert code == 0
    r1, r2 = simulation.simulate_bht(
        ProbVector(np.array([0.9, 0.1])), ProbVector(np.array([0.1, 0.9])),
        LN3, 10, 4000, 7)
    ref = emit_json({"type_i": r1.to_payload(), "type_ii": r2.to_payload()})
    assert out.strip() == ref.strip()


def test_simulate_seed_env_var(run, monkeypatch, tmp_path):
    monkeypatch.setenv(SEED_ENV, "123")
    code, out_env = run("simulate", "binom", "--n", "20", "--prob", "0.4",
                        "--h", "2", "--trials", "500")
    assert code == 0
    code, out_explicit = run("simulate", "binom", "--n", "20", "--prob", "0.4",
                             "--h", "2", "--trials", "500", "--seed", "123")
    assert out_env == out_explicit
    monkeypatch.setenv(SEED_ENV, "not-a-number")
    code, _ = run("simulate", "binom", "--n", "20", "--prob", "0.4",
                  "--h", "2", "--trials", "500")
    assert code == 2


def test_simulate_report_round_trips(run, tmp_path):
    code, out = run("simulate", "binom", "--n", "30", "--prob", "0.5", "--h", "3",
                    "--trials", "1000", "--seed", "5")
    assert code == 0
    assert emit_json(json.loads(out)).strip() == out.strip()


# ------------------------------------------------------------------- table1


def test_table1_structure(run):
    code, out = run("table1", "--n", "1000", "--d", "4", "--eps", "1.0")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "problem,upper_bound,previous_lower_bound,lower_bound"
    names = [ln.split(",")[0] for ln in lines[1:]]
    assert names == ["entropy_estimation", "distribution_estimation",
                     "density_estimation", "gaussian_location",
                     "bht_sample_complexity"]
    # entropy/gaussian have no matching upper bound at desk scale
    table = {ln.split(",")[0]: ln.split(",")[1:] for ln in lines[1:]}
    assert table["entropy_estimation"][0] == "N.A."
    assert table["gaussian_location"][0] == "N.A."
    # high-privacy prior columns disappear for eps > 1
    code, out = run("table1", "--n", "1000", "--d", "4", "--eps", "2.0")
    table = {ln.split(",")[0]: ln.split(",")[1:] for ln in out.strip().splitlines()[1:]}
    assert table["density_estimation"][1] == "N.A."
    assert table["bht_sample_complexity"][1] == "N.A."
