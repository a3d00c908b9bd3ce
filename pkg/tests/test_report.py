"""Figure rendering from finished-run artifacts."""

import numpy as np
import pytest

from dlpr.errors import ParseError
from dlpr.report import (
    load_metrics,
    render_confusion,
    render_run_dir,
    render_subjects,
    render_sweep,
)
from dlpr.trainer import Metrics, SubjectRow

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def make_metrics(classes=3):
    cm = np.eye(classes, dtype=int) * 10
    return Metrics(
        accuracy=1.0,
        confusion=cm,
        class_ids=list(range(classes)),
        training_time_sec=1.5,
        train_curve=[0.5, 0.8, 1.0],
        test_curve=[0.4, 0.7, 0.9],
        batch_size=16,
        epochs=3,
        seed=0,
    )


def test_metrics_json_round_trip(tmp_path):
    metrics = make_metrics()
    metrics.write(tmp_path)
    loaded = load_metrics(tmp_path / "metrics.json")
    assert loaded.accuracy == metrics.accuracy
    assert loaded.class_ids == metrics.class_ids
    assert np.array_equal(loaded.confusion, metrics.confusion)
    assert loaded.train_curve == metrics.train_curve
    assert loaded.canonical_bytes() == metrics.canonical_bytes()


def test_malformed_metrics_json_rejected(tmp_path):
    path = tmp_path / "metrics.json"
    path.write_text("{not json")
    with pytest.raises(ParseError):
        load_metrics(path)


def test_missing_metrics_field_rejected(tmp_path):
    path = tmp_path / "metrics.json"
    path.write_text('{"accuracy": 0.5}')
    with pytest.raises(ParseError):
        load_metrics(path)


def test_sweep_chart_written(tmp_path):
    out = tmp_path / "sweep.png"
    render_sweep([(50, 0.91, 458.0), (100, 0.93, 300.0), (150, 0.90, 250.0)], out)
    assert out.read_bytes().startswith(PNG_MAGIC)


def test_subject_chart_with_and_without_scores(tmp_path):
    scored = [SubjectRow("s1", 12.5, 0.9), SubjectRow("s2", 40.0, 0.7)]
    plain = [SubjectRow("s1", None, 0.9), SubjectRow("s2", None, 0.7)]
    a, b = tmp_path / "scored.png", tmp_path / "plain.png"
    render_subjects(scored, a)
    render_subjects(plain, b)
    assert a.read_bytes().startswith(PNG_MAGIC)
    assert b.read_bytes().startswith(PNG_MAGIC)


def test_wide_confusion_matrix_renders(tmp_path):
    # Above 12 classes the per-cell count annotations are dropped; the
    # heatmap itself must still render.
    metrics = make_metrics(classes=15)
    out = tmp_path / "confusion.png"
    render_confusion(metrics, out)
    assert out.read_bytes().startswith(PNG_MAGIC)


def test_run_dir_renders_sweep_and_subjects(tmp_path):
    (tmp_path / "sweep.csv").write_text(
        "batch_size,accuracy,training_time_sec\n50,0.9,100.0\n100,0.92,80.0\n"
    )
    (tmp_path / "subjects.csv").write_text(
        "subject_id,dash_score,accuracy\ns1,10.0,0.9\ns2,,0.8\n"
    )
    created = render_run_dir(tmp_path)
    names = sorted(p.name for p in created)
    assert names == ["subjects.png", "sweep.png"]
    for p in created:
        assert p.read_bytes().startswith(PNG_MAGIC)


def test_run_dir_separate_output_directory(tmp_path):
    run_dir = tmp_path / "run"
    out_dir = tmp_path / "figs"
    run_dir.mkdir()
    make_metrics().write(run_dir)
    created = render_run_dir(run_dir, out_dir)
    assert {p.parent for p in created} == {out_dir}
    assert (out_dir / "summary.csv").exists()
    assert (out_dir / "confusion.png").read_bytes().startswith(PNG_MAGIC)


def test_run_dir_without_artifacts_rejected(tmp_path):
    with pytest.raises(ParseError):
        render_run_dir(tmp_path)
