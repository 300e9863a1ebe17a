import pytest

from rfimlab.exceptions import RecordIOError
from rfimlab.models import ExperimentKind, ExperimentRecord
from rfimlab.utils.records import RecordWriter, read_records


def make_record(index: int) -> ExperimentRecord:
    return ExperimentRecord(
        kind=ExperimentKind.MN,
        N=4,
        epsilon=1.0,
        master_seed=7,
        sample_index=index,
        scalars={"size": float(index)},
        flags={"origin_zero": index % 2 == 0},
        wall_time=0.25,
    )


def test_records_round_trip_without_timing(tmp_path):
    path = tmp_path / "records.jsonl"
    with RecordWriter(path, flush_every=2, timing=False) as writer:
        writer.write_all(make_record(i) for i in range(5))
    assert writer.written == 5
    assert "wall_time" not in path.read_text(encoding="utf-8")
    records = read_records(path)
    assert [r.sample_index for r in records] == [0, 1, 2, 3, 4]
    assert records[2].flags["origin_zero"] and records[2].wall_time is None


def test_timing_is_kept_when_enabled(tmp_path):
    path = tmp_path / "records.jsonl"
    with RecordWriter(path, timing=True) as writer:
        writer.write(make_record(0))
    assert read_records(path)[0].wall_time == 0.25


def test_truncated_last_line_is_skipped(tmp_path):
    path = tmp_path / "records.jsonl"
    with RecordWriter(path, timing=False) as writer:
        writer.write_all(make_record(i) for i in range(3))
    text = path.read_text(encoding="utf-8")
    path.write_text(text + text.splitlines()[0][:20], encoding="utf-8")
    assert len(read_records(path)) == 3


def test_corrupt_middle_line_raises(tmp_path):
    path = tmp_path / "records.jsonl"
    path.write_text("{not json}\n" + make_record(0).model_dump_json() + "\n", encoding="utf-8")
    with pytest.raises(RecordIOError):
        read_records(path)


def test_missing_file_raises(tmp_path):
    with pytest.raises(RecordIOError):
        read_records(tmp_path / "absent.jsonl")
