"""End-to-end command-line checks, run in-process through ``main``."""

import json
import shutil
import subprocess
from dataclasses import replace

import pytest

from xfcm import (
    Concept,
    build_scenario2,
    compile_network,
    network_to_json,
    read_survey,
    read_trajectory_csv,
    read_truth_doc,
    read_weights_doc,
)
from xfcm.cli import main


def run(*argv):
    return main(list(argv))


def final_row(path):
    names, values = read_trajectory_csv(str(path))
    return dict(zip(names, values[-1]))


TINY_GRID = {
    "goal_w_minus": [0.5], "goal_w_plus": [0.25], "trigger2_w": [0.25, 0.5, 0.75],
    "trigger3_w_base": [0.5], "trigger1_w_base": [0.75],
    "emotion_bias_w": [0.25], "goal_bias_w": [0.0],
}


@pytest.fixture()
def survey_path(tmp_path):
    path = tmp_path / "survey.csv"
    assert run("synth", "--count", "2", "--out", str(path)) == 0
    return path


# ---------------------------------------------------------------------------
# simulate


def test_rain_knowledge_drives_the_goal(tmp_path, capsys):
    out = tmp_path / "run.csv"
    assert run(
        "simulate", "--scenario", "1", "--functional",
        "--rpk", "1", "--goal0", "0", "--out", str(out),
    ) == 0
    assert final_row(out)["goal"] > 0
    info = capsys.readouterr().out
    assert "converged" in info and "goal" in info


def test_goal_reacts_asymmetrically_to_rain(tmp_path):
    for value, name in (("1", "sunny.csv"), ("-1", "rainy.csv")):
        assert run(
            "simulate", "--scenario", "1", f"--rpk={value}",
            "--out", str(tmp_path / name),
        ) == 0
    sunny = final_row(tmp_path / "sunny.csv")["goal"]
    rainy = final_row(tmp_path / "rainy.csv")["goal"]
    assert sunny > 0 > rainy
    assert abs(rainy) > abs(sunny)  # bad news weighs more than good news


def test_constant_weights_respond_symmetrically(tmp_path):
    for value, name in (("1", "pos.csv"), ("-1", "neg.csv")):
        assert run(
            "simulate", "--scenario", "1", "--constant", f"--rpk={value}",
            "--out", str(tmp_path / name),
        ) == 0
    pos = final_row(tmp_path / "pos.csv")["goal"]
    neg = final_row(tmp_path / "neg.csv")["goal"]
    assert neg == -pos  # mirrored inputs give exactly mirrored trajectories


def test_vocabulary_terms_equal_their_numeric_values(tmp_path):
    a, b = tmp_path / "term.csv", tmp_path / "numeric.csv"
    assert run("simulate", "--rpk", "Heavy rain", "--out", str(a)) == 0
    assert run("simulate", "--rpk=-1", "--out", str(b)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_network_file_matches_the_builtin(tmp_path):
    net_file = tmp_path / "net.json"
    net_file.write_text(network_to_json(build_scenario2()))
    a, b = tmp_path / "file.csv", tmp_path / "builtin.csv"
    assert run("simulate", "--network", str(net_file), "--rpk", "0.5", "--out", str(a)) == 0
    assert run("simulate", "--scenario", "2", "--rpk", "0.5", "--out", str(b)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_trajectory_streams_to_stdout_without_out(capsys):
    assert run("simulate", "--rpk", "1") == 0
    captured = capsys.readouterr()
    assert captured.out.startswith("step,")
    assert "converged" in captured.err  # progress notes stay off the data stream


def test_weight_overrides_change_the_run(tmp_path):
    a, b = tmp_path / "stock.csv", tmp_path / "tuned.csv"
    assert run("simulate", "--scenario", "2", "--rpk", "1", "--out", str(a)) == 0
    assert run(
        "simulate", "--scenario", "2", "--rpk", "1",
        "--set", "trigger2_w=0.9", "--out", str(b),
    ) == 0
    assert a.read_bytes() != b.read_bytes()


# ---------------------------------------------------------------------------
# exit codes and file hygiene


def test_usage_errors_exit_two(tmp_path):
    lonely = tmp_path / "lonely.json"
    lonely.write_text("{}")
    for argv in (
        ["simulate", "--max-steps", "0"],
        ["synth", "--count", "0"],
        ["identify", "--survey", "s.csv", "--batch", "4"],
        ["synth", "--count", "1", "--seed", "-3"],
        ["--config", str(lonely)],  # no subcommand to fill
    ):
        with pytest.raises(SystemExit) as excinfo:
            run(*argv)
        assert excinfo.value.code == 2


def test_runtime_errors_exit_one(tmp_path, capsys):
    out = tmp_path / "never.csv"
    assert run("simulate", "--network", str(tmp_path / "missing.json"),
               "--out", str(out)) == 1
    assert "error:" in capsys.readouterr().err
    assert not out.exists()  # failures must not leave partial output

    net_file = tmp_path / "net.json"
    net_file.write_text(network_to_json(build_scenario2()))
    assert run("simulate", "--network", str(net_file), "--set", "trigger2_w=0.9") == 1
    assert run("simulate", "--init", "momentum=0.5") == 1
    assert run("simulate", "--out", str(tmp_path / "no" / "dir" / "x.csv")) == 1


# ---------------------------------------------------------------------------
# config files


def test_config_supplies_defaults_and_flags_win(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"scenario": "2", "rpk": 1.0, "max-steps": 40}))
    a, b = tmp_path / "merged.csv", tmp_path / "explicit.csv"
    assert run("simulate", "--config", str(cfg), "--rpk", "0.5", "--out", str(a)) == 0
    assert run("simulate", "--scenario", "2", "--rpk", "0.5", "--max-steps", "40",
               "--out", str(b)) == 0
    assert a.read_bytes() == b.read_bytes()


def test_unknown_config_keys_are_usage_errors(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"turbo": True}))
    with pytest.raises(SystemExit) as excinfo:
        run("simulate", "--config", str(cfg))
    assert excinfo.value.code == 2


def test_broken_config_files_exit_one(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{not json")
    assert run("simulate", "--config", str(cfg)) == 1
    assert run("simulate", "--config", str(tmp_path / "absent.json")) == 1
    assert capsys.readouterr().err.count("error:") == 2


# ---------------------------------------------------------------------------
# synth


def test_synth_writes_survey_and_truth(tmp_path, survey_path):
    text = survey_path.read_text()
    assert len(text.splitlines()) == 1 + 2 * 26
    assert text.startswith("participant_id,scenario_id,belief_term")
    records = read_survey(str(survey_path))
    assert len({r.participant_id for r in records}) == 2
    model, truths = read_truth_doc(str(survey_path) + ".truth.json")
    assert model == "M1" and sorted(truths) == ["p01", "p02"]


def test_synth_reruns_are_byte_identical(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        assert run("synth", "--count", "3", "--seed", "7", "--out", str(path)) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    other = tmp_path / "c.csv"
    assert run("synth", "--count", "3", "--seed", "8", "--out", str(other)) == 0
    assert other.read_bytes() != paths[0].read_bytes()


def test_synth_raw_emits_numeric_responses(tmp_path):
    out = tmp_path / "raw.csv"
    assert run("synth", "--count", "1", "--raw", "--noise-sd", "0.05",
               "--seed", "1", "--out", str(out)) == 0
    assert out.read_text().startswith("participant_id,scenario_id,belief,goal,emotion")


# ---------------------------------------------------------------------------
# identify and evaluate


def test_identify_then_evaluate(tmp_path, survey_path, capsys):
    grid_file = tmp_path / "grid.json"
    grid_file.write_text(json.dumps(TINY_GRID))
    weights_file = tmp_path / "weights.json"
    assert run(
        "identify", "--survey", str(survey_path), "--grid", str(grid_file),
        "--mode", "exhaustive", "--batch", "1", "--out", str(weights_file),
    ) == 0
    doc = read_weights_doc(str(weights_file))
    assert sorted(doc.batches) == [1] and sorted(doc.batches[1]) == ["p01", "p02"]
    assert doc.batch_sets[1] == ((3, 4, 5, 6), (1, 2))
    assert "batch 1: M1, 2 participants (exhaustive search)" in capsys.readouterr().out

    eval_file, long_file = tmp_path / "eval.csv", tmp_path / "long.csv"
    assert run(
        "evaluate", "--weights", str(weights_file), "--survey", str(survey_path),
        "--batch", "1", "--out", str(eval_file), "--per-scenario", str(long_file),
    ) == 0
    lines = eval_file.read_text().splitlines()
    assert lines[0] == "model,concept,batch_1,batch_2,batch_3,overall"
    assert len(lines) == 4
    for line in lines[1:]:
        overall = float(line.split(",")[-1])
        assert 0.0 <= overall <= 4.0
    # 6 validation scenarios plus the overall row, for each of 3 concepts
    assert len(long_file.read_text().splitlines()) == 1 + 3 * 7


def test_population_model_stores_one_vector(tmp_path, survey_path):
    grid_file = tmp_path / "grid.json"
    grid_file.write_text(json.dumps(TINY_GRID))
    weights_file = tmp_path / "m4.json"
    assert run(
        "identify", "--survey", str(survey_path), "--model", "M4",
        "--grid", str(grid_file), "--batch", "3", "--out", str(weights_file),
    ) == 0
    doc = read_weights_doc(str(weights_file))
    assert sorted(doc.batches[3]) == ["population"]


def test_evaluate_requires_the_fitted_batch(tmp_path, survey_path, capsys):
    grid_file = tmp_path / "grid.json"
    grid_file.write_text(json.dumps(TINY_GRID))
    weights_file = tmp_path / "weights.json"
    assert run(
        "identify", "--survey", str(survey_path), "--grid", str(grid_file),
        "--batch", "1", "--out", str(weights_file),
    ) == 0
    out = tmp_path / "eval.csv"
    assert run(
        "evaluate", "--weights", str(weights_file), "--survey", str(survey_path),
        "--batch", "2", "--out", str(out),
    ) == 1
    assert "no batch 2" in capsys.readouterr().err
    assert not out.exists()


# ---------------------------------------------------------------------------
# infer-emotion


def test_consistent_observation_needs_no_emotion(tmp_path, capsys):
    obs = tmp_path / "obs.csv"
    obs.write_text("step,action\n1,do\n")
    out = tmp_path / "inference.csv"
    assert run(
        "infer-emotion", "--scenario", "2", "--rpk", "1",
        "--observations", str(obs), "--out", str(out),
    ) == 0
    assert out.read_text().splitlines()[1] == "do,do,false,,"
    assert "matches the prediction" in capsys.readouterr().out


def test_contradiction_recovers_the_hidden_emotion(tmp_path, capsys):
    # generate the episode with a goal that accumulates, a zero-input world
    # and a hidden initial emotion of 0.6, then hand the observer the files
    net = build_scenario2()
    net = replace(net, alpha={**dict(net.alpha), int(Concept.GOAL): 1.0})
    compiled = compile_network(net)
    rec = compiled.record(
        compiled.initial_state({int(Concept.EMOTION): 0.6}), 30
    )
    b, g = compiled.index[int(Concept.BELIEF)], compiled.index[int(Concept.GOAL)]
    history = tmp_path / "history.csv"
    history.write_text(
        "step,belief,goal\n"
        + "".join(f"{t},{float(rec[t, b])!r},{float(rec[t, g])!r}\n" for t in range(31))
    )
    obs = tmp_path / "obs.csv"
    obs.write_text("step,action\n1,do\n")
    net_file = tmp_path / "net.json"
    net_file.write_text(network_to_json(net))
    out = tmp_path / "inference.csv"
    assert run(
        "infer-emotion", "--network", str(net_file), "--observations", str(obs),
        "--history", str(history), "--out", str(out),
    ) == 0
    assert out.read_text().splitlines()[1] == "abstain,do,true,0.6,both"
    assert "inferred initial emotion 0.6" in capsys.readouterr().out


# ---------------------------------------------------------------------------
# packaging


def test_console_script_is_installed():
    exe = shutil.which("xfcm")
    assert exe, "xfcm entry point missing from PATH"
    proc = subprocess.run([exe, "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for command in ("simulate", "identify", "evaluate", "infer-emotion", "synth"):
        assert command in proc.stdout
