import csv
import io

import numpy as np
import pytest

from sbmimo.bench import (
    BerRecord,
    SNR_DEFINITION,
    SweepConfig,
    run_sweep,
    snr_range,
    summary_table,
    write_csv,
)
from sbmimo.detectors import DetectionFailureError
from sbmimo.sb import SBParams

CSV_HEADER = (
    "nt,nr,modulation,snr_db,detector,instances,total_bits,bit_errors,"
    "ber,steps,dt,restarts,r,seed"
)


def small_config(**kw):
    base = dict(
        nt=2, nr=2, modulation="qpsk", snr_db=(5.0, 10.0), instances=25,
        detectors=("mmse", "sb"), sb=SBParams(n_steps=30, dt=0.5, seed=0),
        r=0.5, seed=7, workers=1,
    )
    base.update(kw)
    return SweepConfig(**base)


class TestSnrRange:
    def test_inclusive_grid(self):
        assert snr_range(0.0, 25.0, 2.5) == (
            0.0, 2.5, 5.0, 7.5, 10.0, 12.5, 15.0, 17.5, 20.0, 22.5, 25.0
        )

    def test_single_point(self):
        assert snr_range(10.0, 10.0, 1.0) == (10.0,)

    def test_uneven_step_stops_below(self):
        assert snr_range(0.0, 10.0, 4.0) == (0.0, 4.0, 8.0)

    def test_bad_ranges_rejected(self):
        with pytest.raises(ValueError):
            snr_range(0.0, 10.0, 0.0)
        with pytest.raises(ValueError):
            snr_range(10.0, 0.0, 1.0)


class TestConfigValidation:
    def test_defaults(self):
        cfg = SweepConfig()
        assert (cfg.nt, cfg.nr, cfg.modulation) == (16, 16, "qpsk")
        assert cfg.snr_db == snr_range(0.0, 25.0, 2.5)
        assert cfg.instances == 10_000
        assert cfg.detectors == ("mmse", "sb-reg")
        assert (cfg.sb.n_steps, cfg.sb.dt, cfg.sb.n_restarts) == (100, 0.5, 1)
        assert cfg.r == 0.5 and cfg.seed == 0 and cfg.workers == 1

    @pytest.mark.parametrize(
        "kw",
        [
            dict(instances=0),
            dict(detectors=()),
            dict(detectors=("mmse", "mmse")),
            dict(detectors=("zf",)),
            dict(modulation="qam64"),
            dict(nt=0),
            dict(r=-1.0),
            dict(workers=0),
            dict(snr_db=()),
            dict(modulation="qam16", nt=8, detectors=("ml-oracle",)),
        ],
    )
    def test_invalid_configs_rejected(self, kw):
        with pytest.raises(ValueError):
            small_config(**kw)

    def test_oracle_guard_boundary(self):
        # 6 users QAM16 = 24 spins: allowed; 7 = 28: refused.
        small_config(modulation="qam16", nt=6, detectors=("ml-oracle",),
                     instances=1)
        with pytest.raises(ValueError, match="spin"):
            small_config(modulation="qam16", nt=7, detectors=("ml-oracle",),
                         instances=1)


class TestRunSweep:
    def test_noise_free_mmse_is_error_free(self):
        cfg = SweepConfig(
            nt=2, nr=2, modulation="qpsk", snr_db=(60.0,), instances=100,
            detectors=("mmse",), sb=SBParams(), seed=1,
        )
        (rec,) = run_sweep(cfg)
        assert rec.bit_errors == 0 and rec.ber == 0.0
        assert rec.instances == 100
        assert rec.total_bits == 100 * 2 * 2

    def test_record_shape_and_invariants(self):
        cfg = small_config()
        records = run_sweep(cfg)
        assert len(records) == len(cfg.snr_db) * len(cfg.detectors)
        for rec in records:
            assert rec.ber == rec.bit_errors / rec.total_bits
            assert rec.total_bits == rec.instances * cfg.nt * 2
            assert rec.instances == cfg.instances and rec.failures == 0
            assert rec.snr_def == SNR_DEFINITION
            assert (rec.steps, rec.dt, rec.restarts) == (30, 0.5, 1)

    def test_deterministic_reruns(self):
        a = run_sweep(small_config())
        b = run_sweep(small_config())
        assert a == b

    def test_worker_count_does_not_change_records(self):
        a = run_sweep(small_config(workers=1))
        b = run_sweep(small_config(workers=2))
        assert a == b

    def test_failed_detections_skip_instance_for_that_detector(
        self, monkeypatch
    ):
        def broken(inst, c):
            raise DetectionFailureError("injected")

        monkeypatch.setattr("sbmimo.bench.mmse_detect", broken)
        records = run_sweep(small_config(snr_db=(5.0,), instances=10))
        by_det = {rec.detector: rec for rec in records}
        assert by_det["mmse"].failures == 10
        assert by_det["mmse"].instances == 0
        assert by_det["mmse"].total_bits == 0 and by_det["mmse"].ber == 0.0
        assert by_det["sb"].failures == 0 and by_det["sb"].instances == 10

    def test_trace_dump(self, tmp_path):
        path = tmp_path / "trace.csv"
        cfg = small_config(
            snr_db=(8.0,), instances=3, detectors=("mmse", "sb"),
            sb=SBParams(n_steps=20, dt=0.5, n_restarts=2, seed=0),
            trace=str(path),
        )
        run_sweep(cfg)
        rows = list(csv.reader(path.open()))
        n = 2 * cfg.nt  # spin count for QPSK
        assert rows[0] == (
            ["restart", "step", "a", "energy"]
            + [f"x{i}" for i in range(n)]
            + [f"y{i}" for i in range(n)]
        )
        assert len(rows) == 1 + 20 * 2
        assert float(rows[1][2]) == 0.0 and float(rows[20][2]) == 1.0


class TestWriteCsv:
    def test_empty_records_header_only(self, tmp_path):
        path = tmp_path / "out.csv"
        write_csv([], str(path))
        assert path.read_text() == CSV_HEADER + "\n"

    def test_single_record_round_trip(self, tmp_path):
        rec = BerRecord(
            nt=4, nr=4, modulation="qpsk", snr_db=7.5, detector="mmse",
            instances=100, total_bits=800, bit_errors=12, ber=12 / 800,
            steps=100, dt=0.5, restarts=1, r=0.5, seed=3,
        )
        path = tmp_path / "one.csv"
        write_csv([rec], str(path))
        lines = path.read_text().splitlines()
        assert len(lines) == 2
        row = next(csv.DictReader(io.StringIO(path.read_text())))
        assert row["ber"] == "1.500000e-02"
        assert float(row["ber"]) == rec.ber
        assert row["snr_db"] == "7.5" and row["detector"] == "mmse"
        assert int(row["total_bits"]) == 800

    def test_rows_sorted_by_detector_then_snr(self, tmp_path):
        cfg = small_config(detectors=("sb", "mmse"), snr_db=(10.0, 5.0),
                           instances=5)
        path = tmp_path / "sorted.csv"
        write_csv(run_sweep(cfg), str(path))
        rows = list(csv.DictReader(path.open()))
        keys = [(r["detector"], float(r["snr_db"])) for r in rows]
        assert keys == [("mmse", 5.0), ("mmse", 10.0),
                        ("sb", 5.0), ("sb", 10.0)]

    def test_full_sweep_row_count(self, tmp_path):
        cfg = small_config(instances=4)
        path = tmp_path / "full.csv"
        write_csv(run_sweep(cfg), str(path))
        rows = path.read_text().splitlines()
        assert len(rows) == 1 + len(cfg.snr_db) * len(cfg.detectors)

    def test_unwritable_path_reports_path(self, tmp_path):
        target = tmp_path / "missing-dir" / "out.csv"
        with pytest.raises(OSError) as err:
            write_csv([], str(target))
        assert "missing-dir" in str(err.value)

    def test_byte_identical_across_reruns_and_workers(self, tmp_path):
        paths = []
        for k, workers in enumerate([1, 1, 2]):
            path = tmp_path / f"run{k}.csv"
            write_csv(run_sweep(small_config(instances=12, workers=workers)),
                      str(path))
            paths.append(path.read_bytes())
        assert paths[0] == paths[1] == paths[2]


class TestSummary:
    def test_table_layout(self):
        records = run_sweep(small_config(instances=5))
        table = summary_table(records)
        lines = table.splitlines()
        assert len(lines) == 1 + 2  # header + one row per SNR
        assert "snr_db" in lines[0]
        assert "mmse" in lines[0] and "sb" in lines[0]
        assert "5" in lines[1] and "10" in lines[2]
