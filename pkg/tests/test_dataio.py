"""Tests for windowing, splitting, CSV round-trips, and synthetic data."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dlpr import dataio
from dlpr.errors import (
    ConfigError,
    EmptyOutput,
    ParseError,
    StratifyError,
)


def _recording(n_samples, n_channels=3, seed=0, labels=None, reps=None):
    rng = np.random.default_rng(seed)
    return dataio.Recording(
        channels=rng.normal(size=(n_channels, n_samples)),
        sampling_rate=2000.0,
        labels=np.zeros(n_samples, dtype=np.int64) if labels is None else labels,
        subject=dataio.SubjectMeta(id="s1", amputee=True, dash_score=15.18),
        repetition=np.ones(n_samples, dtype=np.int64) if reps is None else reps,
    )


class TestSegment:
    def test_four_windows(self):
        rec = _recording(100)
        wins, labels, starts = dataio.segment(rec, 40, 20)
        assert wins.shape == (4, 3, 40)
        np.testing.assert_array_equal(starts, [0, 20, 40, 60])

    def test_exact_fit(self):
        rec = _recording(64)
        wins, _, _ = dataio.segment(rec, 64, 10)
        assert wins.shape[0] == 1

    def test_db1_style_count(self):
        rec = _recording(1000)
        wins, _, _ = dataio.segment(rec, 100, 10)
        assert wins.shape[0] == 91

    def test_window_longer_than_recording(self):
        with pytest.raises(EmptyOutput):
            dataio.segment(_recording(50), 51, 10)

    def test_window_content_aligned(self):
        rec = _recording(100)
        wins, _, starts = dataio.segment(rec, 40, 20)
        for w, s in zip(wins, starts):
            np.testing.assert_array_equal(w, rec.channels[:, s : s + 40])

    @given(
        st.integers(min_value=1, max_value=400),
        st.integers(min_value=1, max_value=100),
        st.integers(min_value=1, max_value=50),
    )
    @settings(max_examples=100)
    def test_count_formula(self, n, window, shift):
        rec = _recording(max(n, 1))
        if window > n:
            with pytest.raises(EmptyOutput):
                dataio.segment(rec, window, shift)
            return
        wins, labels, starts = dataio.segment(rec, window, shift)
        expected = (n - window) // shift + 1
        assert wins.shape[0] == expected == labels.size == starts.size
        assert starts[-1] + window <= n


class TestSplit:
    def _dataset(self, labels, reps=None):
        n = len(labels)
        return dataio.WindowedDataset(
            inputs=np.random.default_rng(0).normal(size=(n, 4)),
            labels=np.asarray(labels, dtype=np.int64),
            subject_ids=np.asarray(["s"] * n),
            provenance=np.arange(n),
            repetitions=None if reps is None else np.asarray(reps, dtype=np.int64),
        )

    def test_60_40(self):
        ds = self._dataset([0] * 50 + [1] * 50)
        train, test = dataio.split(ds, dataio.SplitSpec(seed=1))
        assert len(train) == 60 and len(test) == 40

    def test_deterministic(self):
        ds = self._dataset(np.arange(100) % 5)
        a = dataio.split(ds, dataio.SplitSpec(seed=7))
        b = dataio.split(ds, dataio.SplitSpec(seed=7))
        np.testing.assert_array_equal(a[0].provenance, b[0].provenance)
        np.testing.assert_array_equal(a[1].provenance, b[1].provenance)

    def test_stratified_proportions(self):
        ds = self._dataset(np.repeat(np.arange(10), 10))
        train, test = dataio.split(ds, dataio.SplitSpec(seed=3))
        for cls in range(10):
            assert np.sum(train.labels == cls) == 6
            assert np.sum(test.labels == cls) == 4

    def test_partition(self):
        ds = self._dataset(np.arange(97) % 3)
        train, test = dataio.split(ds, dataio.SplitSpec(seed=5))
        merged = np.sort(np.concatenate([train.provenance, test.provenance]))
        np.testing.assert_array_equal(merged, np.arange(97))

    def test_stratify_error_on_singleton_class(self):
        ds = self._dataset([0] * 10 + [1])
        with pytest.raises(StratifyError):
            dataio.split(ds, dataio.SplitSpec(seed=0))

    def test_unstratified(self):
        ds = self._dataset([0] * 10 + [1])
        train, test = dataio.split(ds, dataio.SplitSpec(seed=0, stratified=False))
        assert len(train) == 7 and len(test) == 4

    def test_by_repetition_disjoint(self):
        reps = np.repeat(np.arange(1, 11), 10)
        ds = self._dataset(np.arange(100) % 4, reps=reps)
        train, test = dataio.split(
            ds, dataio.SplitSpec(seed=2, by_repetition=True)
        )
        assert set(train.repetitions) & set(test.repetitions) == set()
        assert len(train) + len(test) == 100
        assert len(train) >= 50

    def test_by_repetition_needs_ids(self):
        ds = self._dataset([0, 1] * 10)
        with pytest.raises(ConfigError):
            dataio.split(ds, dataio.SplitSpec(by_repetition=True))


class TestCsvRoundTrip:
    def test_bit_exact(self, tmp_path):
        rec = _recording(257, n_channels=4, seed=9)
        p = tmp_path / "rec.csv"
        dataio.save_csv(rec, p)
        back = dataio.load_csv(p)
        np.testing.assert_array_equal(back.channels, rec.channels)
        np.testing.assert_array_equal(back.labels, rec.labels)
        np.testing.assert_array_equal(back.repetition, rec.repetition)
        assert back.sampling_rate == rec.sampling_rate
        assert back.subject == rec.subject

    def test_empty_file(self, tmp_path):
        p = tmp_path / "rec.csv"
        p.write_text("")
        (tmp_path / "rec.meta.txt").write_text(
            "sampling_rate=100\nsubject_id=x\namputee=false\n"
        )
        with pytest.raises(ParseError):
            dataio.load_csv(p)

    def test_nan_row_named(self, tmp_path):
        p = tmp_path / "rec.csv"
        p.write_text("ch1,ch2,label,repetition\n1.0,2.0,0,1\nNaN,2.0,0,1\n")
        (tmp_path / "rec.meta.txt").write_text(
            "sampling_rate=100\nsubject_id=x\namputee=false\n"
        )
        with pytest.raises(ParseError, match="row 3"):
            dataio.load_csv(p)

    def test_ragged_row(self, tmp_path):
        p = tmp_path / "rec.csv"
        p.write_text("ch1,ch2,label,repetition\n1.0,2.0,0\n")
        (tmp_path / "rec.meta.txt").write_text(
            "sampling_rate=100\nsubject_id=x\namputee=false\n"
        )
        with pytest.raises(ParseError, match="row 2"):
            dataio.load_csv(p)

    def test_bad_header(self, tmp_path):
        p = tmp_path / "rec.csv"
        p.write_text("a,b,label,repetition\n1.0,2.0,0,1\n")
        (tmp_path / "rec.meta.txt").write_text(
            "sampling_rate=100\nsubject_id=x\namputee=false\n"
        )
        with pytest.raises(ParseError):
            dataio.load_csv(p)

    def test_missing_meta(self, tmp_path):
        p = tmp_path / "rec.csv"
        p.write_text("ch1,label,repetition\n1.0,0,1\n")
        with pytest.raises(ParseError, match="metadata"):
            dataio.load_csv(p)

    def test_load_dir_sorted(self, tmp_path):
        for name in ("b.csv", "a.csv"):
            dataio.save_csv(_recording(40, seed=hash(name) % 100), tmp_path / name)
        recs = dataio.load_dir(tmp_path)
        assert len(recs) == 2

    def test_load_dir_parallel_matches(self, tmp_path):
        for i in range(4):
            dataio.save_csv(_recording(40, seed=i), tmp_path / f"r{i}.csv")
        seq = dataio.load_dir(tmp_path, workers=1)
        par = dataio.load_dir(tmp_path, workers=4)
        for a, b in zip(seq, par):
            np.testing.assert_array_equal(a.channels, b.channels)


class TestSynth:
    def test_deterministic_bytes(self, tmp_path):
        a_dir, b_dir = tmp_path / "a", tmp_path / "b"
        for d in (a_dir, b_dir):
            recs = dataio.synth_dataset(5, 4, seed=7, windows_per_class=10)
            dataio.save_recording_set(recs, d)
        for fa, fb in zip(sorted(a_dir.iterdir()), sorted(b_dir.iterdir())):
            assert fa.read_bytes() == fb.read_bytes()

    def test_rejects_single_class(self):
        with pytest.raises(ConfigError):
            dataio.synth_dataset(1, 4, seed=0)

    def test_window_count(self):
        recs = dataio.synth_dataset(2, 3, seed=1, windows_per_class=17)
        wins, _, _ = dataio.segment(recs[0], 300, 50)
        assert wins.shape[0] == 17

    def test_envelope_separates_classes(self):
        recs = dataio.synth_dataset(2, 2, seed=3, windows_per_class=8)
        # Class 0 boosts channel 1's amplitude pattern differently from class 1.
        rms = [np.sqrt(np.mean(r.channels**2, axis=1)) for r in recs]
        assert not np.allclose(rms[0], rms[1], rtol=0.5)

    def test_preproc_dataset_shapes(self):
        recs = dataio.synth_dataset(3, 4, seed=2, windows_per_class=12)
        ds = dataio.build_preproc_dataset(recs, 300, 50)
        assert ds.inputs.shape == (36, 8)
        assert set(ds.labels) == {0, 1, 2}
        assert ds.repetitions is not None
