import io
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smartban_saca.errors import MissingCounterpartError
from smartban_saca.harness import (
    CSV_HEADER,
    Engine,
    SweepRecord,
    compare,
    main,
    read_csv,
    records_to_csv,
    sweep,
    write_csv,
)
from smartban_saca.protocol_params import UserPriority


def test_trivial_analytic_sweep():
    recs = sweep([3], range(1, 2), [Engine.ANALYTIC])
    assert len(recs) == 1
    r = recs[0]
    assert (r.tau, r.p, r.throughput, r.delay_slots) == (1.0, 0.0, 1.0, 1.0)
    assert r.seed is None and r.slots is None


def test_record_validation():
    with pytest.raises(ValueError):
        SweepRecord(0, 1, "analytic", 1, None, 0.1, 0, 0.1, 8)
    with pytest.raises(ValueError):
        SweepRecord(0, 1, "simulation", 1, None, 0.1, 0, 0.1, 8)


def test_sweep_order_and_counts():
    recs = sweep([1, 0], range(7, 9), slots=2000, seeds=[5, 2])
    keys = [(int(r.up), r.n, r.engine.value, r.seed) for r in recs]
    assert keys == [
        (0, 7, "analytic", None), (0, 7, "simulation", 2), (0, 7, "simulation", 5),
        (0, 8, "analytic", None), (0, 8, "simulation", 2), (0, 8, "simulation", 5),
        (1, 7, "analytic", None), (1, 7, "simulation", 2), (1, 7, "simulation", 5),
        (1, 8, "analytic", None), (1, 8, "simulation", 2), (1, 8, "simulation", 5),
    ]


def test_sweep_parallel_matches_serial():
    args = ([2, 3], range(1, 4), (Engine.ANALYTIC, Engine.SIMULATION), 3000, [1, 2])
    assert records_to_csv(sweep(*args, jobs=3)) == records_to_csv(sweep(*args))


def test_sweep_rejects_bad_grid():
    with pytest.raises(ValueError):
        sweep([0], range(0, 3))
    with pytest.raises(ValueError):
        sweep([0], range(15, 18))
    with pytest.raises(ValueError):
        sweep([0], range(1, 2), slots=0)


def test_multi_seed_point():
    recs = sweep([0], [8], slots=100_000, seeds=[1, 2, 3])
    assert [r.engine for r in recs] == [Engine.ANALYTIC] + [Engine.SIMULATION] * 3
    sims = recs[1:]
    mean_s = sum(r.throughput for r in sims) / 3
    assert abs(mean_s - recs[0].throughput) <= 0.02


def test_csv_header_and_empty_fields():
    text = records_to_csv(sweep([3], [1], slots=10))
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[1] == "3,1,analytic,,,1,0,1,1"
    assert lines[2] == "3,1,simulation,1,10,1,0,1,1"


finite = st.floats(allow_nan=False, allow_infinity=False)


@st.composite
def records(draw):
    sim = draw(st.booleans())
    return SweepRecord(
        up=draw(st.integers(0, 3)),
        n=draw(st.integers(1, 16)),
        engine=Engine.SIMULATION if sim else Engine.ANALYTIC,
        seed=draw(st.integers(0, 2**63)) if sim else None,
        slots=draw(st.integers(1, 10**7)) if sim else None,
        tau=draw(finite),
        p=draw(finite),
        throughput=draw(finite),
        delay_slots=draw(finite),
    )


@settings(max_examples=100, deadline=None)
@given(recs=st.lists(records(), max_size=10))
def test_csv_round_trip_lossless(recs):
    buf = io.StringIO()
    write_csv(recs, buf)
    buf.seek(0)
    assert read_csv(buf) == recs


def test_csv_round_trip_nan_delay():
    rec = SweepRecord(3, 16, "simulation", 1, 5, 0.5, 1.0, 0.0, math.nan)
    back = read_csv(io.StringIO(records_to_csv([rec])))[0]
    assert math.isnan(back.delay_slots)


def test_read_csv_rejects_bad_header():
    with pytest.raises(ValueError):
        read_csv(io.StringIO("a,b\n1,2\n"))


def _twin(rec, seed=1, slots=100_000):
    return SweepRecord(rec.up, rec.n, Engine.SIMULATION, seed, slots, rec.tau, rec.p, rec.throughput, rec.delay_slots)


def test_compare_identical_records():
    analytic = sweep(list(UserPriority), range(1, 5), [Engine.ANALYTIC])
    report = compare(analytic + [_twin(r) for r in analytic])
    assert report.passed
    assert report.max_deviation() == {"tau": 0, "p": 0, "throughput": 0, "delay_rel": 0}


def test_compare_missing_counterpart():
    analytic = sweep([0], range(1, 3), [Engine.ANALYTIC])
    with pytest.raises(MissingCounterpartError):
        compare(analytic)
    with pytest.raises(MissingCounterpartError):
        compare([_twin(analytic[0])])


def test_compare_flags_and_averages():
    a = SweepRecord(1, 4, "analytic", None, None, 0.2, 0.5, 0.4, 10.0)
    s1 = SweepRecord(1, 4, "simulation", 1, 1000, 0.23, 0.5, 0.4, 10.0)
    s2 = SweepRecord(1, 4, "simulation", 2, 1000, 0.19, 0.5, 0.4, 12.4)
    report = compare([a, s1, s2], abs_tol=0.02, delay_rel_tol=0.1)
    pt = report.points[0]
    assert pt.tau_dev == pytest.approx(0.01)
    assert pt.delay_rel_dev == pytest.approx(0.12)
    assert pt.abs_ok and not pt.delay_ok and not report.passed


def test_compare_delay_exemption_on_few_samples():
    a = SweepRecord(3, 16, "analytic", None, None, 0.5, 0.99998, 0.00024, 65564.0)
    s = SweepRecord(3, 16, "simulation", 1, 100_000, 0.5, 0.99998, 0.00026, 30000.0)
    report = compare([a, s])
    pt = report.points[0]
    assert pt.min_delay_samples == 26
    assert pt.delay_exempt and pt.passed
    assert report.exemptions == [pt]


def test_cli_analytic_stdout(capsys):
    assert main(["--up", "3", "--nodes", "1..2", "--mode", "analytic"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == ",".join(CSV_HEADER)
    assert out[1] == "3,1,analytic,,,1,0,1,1"
    assert len(out) == 3


def test_cli_compare_pass_writes_file(tmp_path, capsys):
    path = tmp_path / "grid.csv"
    code = main(["--up", "0", "--nodes", "8", "--slots", "100000", "--seeds", "1,2", "--out", str(path), "--compare"])
    assert code == 0
    recs = read_csv(path.open())
    assert len(recs) == 3
    assert "overall PASS" in capsys.readouterr().err


def test_cli_compare_failure_exit_code(capsys):
    code = main(["--up", "2", "--nodes", "4", "--slots", "200", "--compare", "--abs-tol", "1e-9"])
    assert code == 1
    assert "FAIL" in capsys.readouterr().err


def test_cli_argument_errors(capsys):
    for argv in (["--nodes", "0..3"], ["--nodes", "x"], ["--up", "5"], ["--compare", "--mode", "sim"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2


def test_cli_io_error(capsys):
    assert main(["--mode", "analytic", "--out", "/nonexistent/dir/x.csv"]) == 2
