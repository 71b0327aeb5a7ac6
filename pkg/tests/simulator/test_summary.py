import pytest

from fedscore.data import ReshuffleEvent
from fedscore.simulator import ClientRecord, ExperimentReport, IterationRecord, summarize
from fedscore.simulator.summary import AVERAGE_ROW


def _record(iteration: int, client: str, local: float, global_: float) -> ClientRecord:
    return ClientRecord(
        iteration=iteration, client=client, labels=("a", "b"), shard_size=10, label_counts={"a": 5, "b": 5},
        alpha=0.5, arch="relu(4)", arch_changed=False, parameter_count=30, epochs_run=2, final_loss=0.5,
        fresh_accuracy=local, local_update_accuracy=local, global_update_accuracy=global_,
        betas={"a": 1.0, "b": 0.5}, score_payload_bytes=96, weight_payload_bytes=120,
        train_seconds=0.2, seconds_per_epoch=0.1, inference_seconds=0.01,
    )


def _report() -> ExperimentReport:
    return ExperimentReport(
        name="unit", master_seed=3, labels=("a", "b"), clients=("u1", "u2", "u3"),
        aggregate="normalized", beta_acc="per_label",
        iterations=(
            IterationRecord(1, 0.7, (_record(1, "u1", 0.6, 0.8), _record(1, "u2", 0.5, 0.5)),
                            skipped=("u3",)),
            IterationRecord(2, 0.8, (_record(2, "u1", 0.7, 0.9),),
                            skipped=("u2", "u3"), reshuffles=(ReshuffleEvent("u1", "a", 2, 1),)),
        ),
    )


def test_summary_means_per_user():
    rows = summarize(_report())
    assert [row.user for row in rows] == ["u1", "u2", AVERAGE_ROW]
    u1 = rows[0]
    assert u1.local_mean == pytest.approx(0.65)
    assert u1.global_mean == pytest.approx(0.85)
    assert u1.increase == pytest.approx(0.20)
    assert u1.records == 2


def test_average_row_covers_every_record():
    average = summarize(_report())[-1]
    assert average.records == 3
    assert average.local_mean == pytest.approx(0.6)
    assert average.global_mean == pytest.approx(2.2 / 3)


def test_report_dict_round_trip_keeps_records():
    report = _report()
    restored = ExperimentReport.from_dict(report.to_dict(include_timing=True))
    assert restored == report
    assert restored.iterations[1].reshuffles[0].label == "a"


def test_canonical_json_has_no_timing():
    text = _report().to_json()
    assert text.endswith("}\n")
    assert "train_seconds" not in text
    assert '"payload_ratio": 0.8' in text


def test_empty_report_summarises_to_nothing():
    empty = ExperimentReport("e", 0, ("a",), ("u1",), "normalized", "per_label", ())
    assert summarize(empty) == []
