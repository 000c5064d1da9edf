"""Harness, persistence, reproducibility, and CLI tests."""

import csv
import json
import os
from pathlib import Path

import numpy as np
import pytest

from ptf_lab import cli, harness
from ptf_lab.harness import (
    CSV_COLUMNS,
    EntropyFloorViolation,
    ExperimentConfig,
    compare_entropy,
    print_bounds,
    run,
    verify_lower_bounds,
)


def small_config(**kw):
    base = dict(
        learner=harness.ITERATIVE,
        d_values=(2,),
        n_values=(128,),
        trials=5,
        master_seed=42,
    )
    base.update(kw)
    return ExperimentConfig(**base)


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


class TestRun:
    def test_row_count_and_correctness(self):
        result = run(small_config(d_values=(1, 2), n_values=(64, 128)))
        assert len(result.rows) == 4 * 5
        assert result.all_correct

    def test_csv_schema(self, tmp_path):
        out = tmp_path / "r.csv"
        run(small_config(out=str(out)))
        rows = read_csv(out)
        assert list(rows[0].keys()) == CSV_COLUMNS
        assert (out.with_suffix(".json")).exists()

    def test_reproducible_apart_from_wall_time(self, tmp_path):
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        run(small_config(learner=harness.BATCH, alphas=(0.5,), out=str(out1)))
        run(small_config(learner=harness.BATCH, alphas=(0.5,), out=str(out2)))
        strip = lambda rows: [{k: v for k, v in r.items() if k != "wall_ms"} for r in rows]
        assert strip(read_csv(out1)) == strip(read_csv(out2))

    def test_sample_search_records_z_and_case(self):
        result = run(
            small_config(
                learner=harness.SAMPLE_SEARCH,
                model="dirichlet",
                dirichlet_alpha=2.0,
                trials=8,
            )
        )
        for row in result.rows:
            assert row["case"] in ("a", "b")
            assert row["z"] >= 1
        stats = result.cell_stats[0]
        assert stats["model"] == "dirichlet"
        assert stats["case_counts"]["a"] + stats["case_counts"]["b"] == 8

    def test_parallel_matches_serial(self, tmp_path):
        cfg = small_config(trials=6)
        serial = run(cfg)
        os.environ["PTF_LAB_THREADS"] = "2"
        try:
            parallel = run(cfg)
        finally:
            del os.environ["PTF_LAB_THREADS"]
        for a, b in zip(serial.rows, parallel.rows):
            assert a["queries_total"] == b["queries_total"]
            assert a["seed_stream"] == b["seed_stream"]

    def test_higher_orders_flattened_to_json(self):
        result = run(small_config(d_values=(6,), n_values=(64,), trials=2))
        row = result.rows[0]
        extra = json.loads(row["queries_higher_json"])
        assert set(extra) <= {"4", "5"}
        per_order_sum = (
            row["queries_order0"]
            + row["queries_order1"]
            + row["queries_order2"]
            + row["queries_order3"]
            + sum(extra.values())
        )
        assert per_order_sum == row["queries_total"]

    def test_validation(self):
        with pytest.raises(ValueError):
            small_config(trials=0)
        with pytest.raises(ValueError):
            small_config(learner=harness.BATCH)  # no alphas
        with pytest.raises(ValueError):
            small_config(learner="magic")


class TestRunExamples:
    def test_iterative_sweep_respects_bound(self):
        from ptf_lab.iterative import query_bound

        result = run(
            small_config(d_values=(3,), n_values=(2**12,), trials=100, master_seed=9)
        )
        assert len(result.rows) == 100
        assert all(r["correct"] for r in result.rows)
        assert all(r["queries_total"] <= query_bound(3, 2**12) == 98 for r in result.rows)

    def test_sample_search_mean_z_monotone_and_sublinear(self):
        result = run(
            small_config(
                learner=harness.SAMPLE_SEARCH,
                d_values=(1,),
                n_values=(2**10, 2**13, 2**16),
                trials=300,
                master_seed=10,
            )
        )
        means = [s["mean_z"] for s in result.cell_stats]
        assert means[0] < means[1] < means[2]
        assert means[2] <= 3 * means[0]  # far below the 64x linear growth


class TestVerifyLowerBounds:
    def test_small_grid(self):
        report = verify_lower_bounds(
            interval_n=6,
            missing_d=(3,),
            missing_n=(2, 3),
            linear_d=(2,),
            multivariate_n=(2,),
        )
        assert all(entry["ok"] for entry in report)
        assert all(entry.get("inferable", 0) == 0 for entry in report)


class TestCompareEntropy:
    def _write_agg(self, path, mean, stderr, n=100, d=1, model="uniform", alpha=""):
        agg = {
            "config": {"learner": harness.SAMPLE_SEARCH},
            "cells": [
                {
                    "d": d,
                    "n": n,
                    "alpha": alpha,
                    "model": model,
                    "mean_queries": mean,
                    "stderr_queries": stderr,
                }
            ],
        }
        Path(path).write_text(json.dumps(agg))

    def test_real_run_clears_floor(self, tmp_path):
        out = tmp_path / "ss.csv"
        run(
            small_config(
                learner=harness.SAMPLE_SEARCH,
                d_values=(1,),
                n_values=(256,),
                trials=40,
                out=str(out),
            )
        )
        report = compare_entropy([out.with_suffix(".json")])
        assert report and all(r["ok"] for r in report)

    def test_violation_raises_and_lists_cell(self, tmp_path):
        path = tmp_path / "bad.json"
        self._write_agg(path, mean=1.0, stderr=0.1)  # floor is ~6.66 bits
        with pytest.raises(EntropyFloorViolation) as err:
            compare_entropy([path])
        assert "n=100" in str(err.value)
        report = compare_entropy([path], strict=False)
        assert not report[0]["ok"]

    def test_dirichlet_small_cell_checks_exact_entropy(self, tmp_path):
        path = tmp_path / "dir.json"
        self._write_agg(path, mean=30.0, stderr=0.5, n=20, d=2, model="dirichlet", alpha=1.0)
        report = compare_entropy([path])
        assert "dirichlet_exact" in report[0]["bounds"]

    def test_dirichlet_large_cell_uses_flagged_surrogate(self, tmp_path):
        path = tmp_path / "dir_big.json"
        self._write_agg(
            path, mean=500.0, stderr=1.0, n=2**16, d=4, model="dirichlet", alpha=1.0
        )
        report = compare_entropy([path])
        assert "dirichlet_surrogate" in report[0]["bounds"]


class TestPrintBounds:
    def test_table(self):
        table = print_bounds([3], [4096])
        assert table.splitlines()[0] == "d,n,query_bound"
        assert "3,4096,98" in table


class TestCli:
    def test_run_exit_zero(self, tmp_path, capsys):
        out = tmp_path / "cli.csv"
        code = cli.main(
            [
                "run",
                "--learner", "iterative",
                "--d", "2",
                "--n", "128",
                "--trials", "3",
                "--seed", "5",
                "--out", str(out),
            ]
        )
        assert code == 0
        assert out.exists()
        assert json.loads(capsys.readouterr().out.splitlines()[0])["all_correct"]

    def test_print_bounds(self, capsys):
        assert cli.main(["print-bounds", "--d", "2", "--n", "1024"]) == 0
        assert "2,1024,36" in capsys.readouterr().out

    def test_verify_lower_bounds(self, capsys):
        code = cli.main(
            [
                "verify-lower-bounds",
                "--interval-n", "4",
                "--missing-d", "3",
                "--missing-n", "2",
                "--linear-d", "2",
                "--multivariate-n", "2",
            ]
        )
        assert code == 0

    def test_compare_entropy_failure_exit(self, tmp_path, capsys):
        bad = {
            "config": {"learner": "sample_search"},
            "cells": [
                {
                    "d": 1,
                    "n": 100,
                    "alpha": "",
                    "model": "uniform",
                    "mean_queries": 0.5,
                    "stderr_queries": 0.01,
                }
            ],
        }
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(bad))
        assert cli.main(["compare-entropy", str(path)]) == 1
