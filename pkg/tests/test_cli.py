import json
import subprocess
import sys

import pytest

from meshca import ScenarioConfig
from meshca.cli import main


def small_config(tmp_path, **overrides):
    cfg = ScenarioConfig(name="clitest", node_count=8, area_w=500.0,
                         area_h=500.0).to_dict()
    cfg.update(overrides)
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(cfg))
    return path


class TestGen:
    def test_writes_topology(self, tmp_path, capsys):
        cfg = small_config(tmp_path)
        code = main(["gen", "--config", str(cfg), "--seed", "1",
                     "--out", str(tmp_path)])
        assert code == 0
        out = capsys.readouterr().out
        assert "topology-clitest-seed1.json" in out
        assert (tmp_path / "topology-clitest-seed1.json").exists()

    def test_bad_config_exits_2(self, tmp_path):
        cfg = small_config(tmp_path, node_count=1)
        assert main(["gen", "--config", str(cfg), "--out", str(tmp_path)]) == 2

    def test_missing_config_file_exits_3(self, tmp_path):
        assert main(["gen", "--config", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path)]) == 3

    def test_dump_ranks(self, tmp_path):
        cfg = small_config(tmp_path)
        code = main(["gen", "--config", str(cfg), "--seed", "1",
                     "--out", str(tmp_path), "--dump-ranks"])
        assert code == 0
        ranks = (tmp_path / "ranks-clitest-seed1.csv").read_text()
        assert ranks.splitlines()[0] == (
            "link_id,node_a,node_b,rank,schedule_position"
        )


class TestAssignEvalOracle:
    @pytest.fixture
    def topology_path(self, tmp_path):
        cfg = small_config(tmp_path)
        main(["gen", "--config", str(cfg), "--seed", "1",
              "--out", str(tmp_path)])
        return tmp_path / "topology-clitest-seed1.json"

    def test_assign_then_eval_round_trip(self, tmp_path, topology_path,
                                         capsys):
        ga = tmp_path / "ga.json"
        ga.write_text(json.dumps({"population_size": 6, "max_iterations": 3}))
        code = main(["assign", "--algo", "mclr", "--topology",
                     str(topology_path), "--ga", str(ga), "--seed", "2",
                     "--out", str(tmp_path)])
        assert code == 0
        assign_line = [
            line for line in capsys.readouterr().out.splitlines()
            if line.startswith("clitest,")
        ][0]

        code = main(["eval", "--topology", str(topology_path),
                     "--assignment", str(tmp_path / "assignment-mclr-seed2.csv")])
        assert code == 0
        eval_line = [
            line for line in capsys.readouterr().out.splitlines()
            if line.startswith("clitest,")
        ][0]
        # identical metrics modulo the timing column
        assert (assign_line.rsplit(",", 1)[0]
                == eval_line.rsplit(",", 1)[0])

    def test_assign_writes_history(self, tmp_path, topology_path):
        main(["assign", "--algo", "fa_scga", "--topology",
              str(topology_path), "--seed", "2", "--out", str(tmp_path),
              "--ga", str(self._ga(tmp_path))])
        history = (tmp_path / "history-fa_scga-seed2.csv").read_text()
        assert history.splitlines()[0] == "generation,best,mean,sigma"

    def _ga(self, tmp_path):
        path = tmp_path / "ga.json"
        path.write_text(json.dumps({"population_size": 6,
                                    "max_iterations": 3}))
        return path

    def test_eval_missing_file_exits_3(self, tmp_path, topology_path):
        assert main(["eval", "--topology", str(topology_path),
                     "--assignment", str(tmp_path / "none.csv")]) == 3

    def test_oracle_small_instance(self, tmp_path, capsys):
        cfg = small_config(tmp_path, node_count=4, comm_range=400.0,
                           interference_distance=600.0)
        main(["gen", "--config", str(cfg), "--seed", "3",
              "--out", str(tmp_path)])
        topo = tmp_path / "topology-clitest-seed3.json"
        code = main(["oracle", "--topology", str(topo), "--out",
                     str(tmp_path)])
        assert code == 0
        assert "optimum fairness fitness" in capsys.readouterr().out

    def test_oracle_guard_exits_4(self, tmp_path):
        cfg = small_config(tmp_path, node_count=30)
        main(["gen", "--config", str(cfg), "--seed", "3",
              "--out", str(tmp_path)])
        topo = tmp_path / "topology-clitest-seed3.json"
        assert main(["oracle", "--topology", str(topo)]) == 4


class TestSweepCommand:
    def test_sweep_with_config(self, tmp_path):
        doc = {
            "scenarios": [
                ScenarioConfig(name="s0", node_count=8, area_w=500.0,
                               area_h=500.0,
                               topologies_per_scenario=1).to_dict()
            ],
            "algorithms": ["mclr", "fa_scga"],
            "ga": {"population_size": 6, "max_iterations": 3},
        }
        cfg = tmp_path / "sweep.json"
        cfg.write_text(json.dumps(doc))
        code = main(["sweep", "--config", str(cfg), "--out", str(tmp_path)])
        assert code == 0
        lines = (tmp_path / "results.csv").read_text().strip().splitlines()
        assert len(lines) == 3  # header + 2 rows


class TestSubprocessEntry:
    def test_module_invocation(self, tmp_path):
        cfg = small_config(tmp_path)
        proc = subprocess.run(
            [sys.executable, "-m", "meshca.cli", "gen", "--config", str(cfg),
             "--seed", "1", "--out", str(tmp_path)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert "topology-clitest-seed1.json" in proc.stdout
