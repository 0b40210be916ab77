import math

import numpy as np
import pytest
import yaml

from quadbackstep import hover_scenario, save_scenario
from quadbackstep.cli import main
from quadbackstep.trace import SimTrace


def test_scenario_init(tmp_path):
    out = tmp_path / "s.yaml"
    assert main(["scenario-init", "--out", str(out), "--quiet"]) == 0
    doc = yaml.safe_load(out.read_text())
    assert doc["integration"]["h"] == 1e-3
    assert doc["disturbance"]["t0"] == 25.0


def test_run_writes_outputs(tmp_path):
    code = main(["run", "--horizon", "2", "--csv", "--svg", "--out", str(tmp_path), "--quiet"])
    assert code == 0
    tr = SimTrace.from_csv(tmp_path / "trace.csv")
    assert len(tr) == 2001 and tr.controller == "backstepping"
    assert (tmp_path / "metrics.csv").exists()
    for name in ("positions", "attitude", "inputs", "lyapunov"):
        assert (tmp_path / f"{name}.svg").exists()


def test_gain_override(tmp_path):
    main(["run", "--horizon", "0.5", "--c1", "3.5", "--csv", "--out", str(tmp_path), "--quiet"])
    tr = SimTrace.from_csv(tmp_path / "trace.csv")
    assert tr.meta["scenario"]["controller"]["backstepping"]["c1"] == 3.5


def test_bad_config(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("integration: {h: 0.05, horizon: 1}\n")
    assert main(["run", "--scenario", str(bad), "--quiet"]) == 2
    assert main(["run", "--scenario", str(tmp_path / "missing.yaml"), "--quiet"]) == 2
    assert main(["run", "--c3", "-1", "--quiet"]) == 2


def test_singular_start_exit_code(tmp_path):
    x0 = np.zeros(12)
    x0[0], x0[6] = math.radians(89.999), 1.0
    path = tmp_path / "sing.yaml"
    save_scenario(hover_scenario(x0, horizon=1.0), path)
    with np.errstate(all="raise"):
        code = main(["run", "--scenario", str(path), "--csv", "--out", str(tmp_path), "--quiet"])
    assert code == 3
    tr = SimTrace.from_csv(tmp_path / "trace.csv")
    assert tr.status == "thrust_singularity"


def test_verify_exit_codes(tmp_path):
    x0 = np.zeros(12)
    x0[0], x0[6] = 0.3, 1.0
    path = tmp_path / "hover.yaml"
    save_scenario(hover_scenario(x0, horizon=3.0), path)
    assert main(["verify-lyapunov", "--scenario", str(path), "--quiet"]) == 0
    # the trace was produced with other gains, so the analytical derivative disagrees
    main(["run", "--scenario", str(path), "--csv", "--out", str(tmp_path), "--quiet"])
    assert main(["verify-lyapunov", "--trace", str(tmp_path / "trace.csv"),
                 "--c1", "9", "--quiet"]) == 4


def test_verify_pid_trace_is_config_error(tmp_path):
    main(["run", "--controller", "pid", "--horizon", "0.5", "--csv", "--out", str(tmp_path),
          "--quiet"])
    assert main(["verify-lyapunov", "--trace", str(tmp_path / "trace.csv"), "--quiet"]) == 2


def test_plot_and_compare(tmp_path, capsys):
    assert main(["compare", "--horizon", "2", "--csv", "--out", str(tmp_path)]) == 0
    text = capsys.readouterr().out
    assert "backstepping" in text and "pid" in text
    out = tmp_path / "plots"
    assert main(["plot", "--trace", str(tmp_path / "trace_backstepping.csv"),
                 "--trace", str(tmp_path / "trace_pid.csv"), "--out", str(out), "--quiet"]) == 0
    assert len(list(out.glob("*.svg"))) == 4
