"""Generate the MAT fixtures and their truth file.

Run from this directory: python3 generate.py

scipy's writer is the independent oracle: the TypeScript parser under test
never touches these files' production. Deterministic per seed; safe to
re-run.
"""

import json
from pathlib import Path

import numpy as np
from scipy.io import savemat

HERE = Path(__file__).parent


def block_labels(n, pattern, block):
    """Repeating rest/active label pattern, n samples total."""
    out = np.zeros(n, dtype=np.float64)
    reps = np.zeros(n, dtype=np.float64)
    rep_count = {}
    for i in range(n):
        k = (i // block) % len(pattern)
        out[i] = pattern[k]
        if pattern[k] != 0:
            key = pattern[k]
            if i % block == 0:
                rep_count[key] = rep_count.get(key, 0) + 1
            reps[i] = rep_count.get(key, 1)
    return out, reps


def emg_matrix(rng, rows, cols):
    """Values across many magnitudes so decimal printing gets exercised."""
    scale = 10.0 ** rng.uniform(-6, 4, size=(rows, cols))
    m = rng.standard_normal((rows, cols)) * scale
    m[0, 0] = 2.0          # integral value: prints without a decimal point
    m[1, 0] = -0.1         # classic non-representable decimal
    m[2, 0] = 1.0 / 3.0    # needs all 17 significant digits
    return m


def spots(rng, m, count=8):
    picks = []
    for _ in range(count):
        r = int(rng.integers(0, m.shape[0]))
        c = int(rng.integers(0, m.shape[1]))
        picks.append({"row": r, "col": c, "value": float(m[r, c])})
    return picks


def main():
    rng = np.random.default_rng(42)
    truth = {}

    # --- db1: two files, one subject, mixed compression -------------------
    (HERE / "db1").mkdir(exist_ok=True)
    emg1 = emg_matrix(rng, 48, 10)
    stim1, rep1 = block_labels(48, [0, 1, 0, 2], 6)
    restim1 = np.roll(stim1, 1)  # refined onsets differ from the raw ones
    restim1[0] = 0.0
    rerep1 = np.roll(rep1, 1)
    rerep1[0] = 0.0
    savemat(
        HERE / "db1" / "S1_A1_E1.mat",
        {
            "emg": emg1,
            "stimulus": stim1,
            "restimulus": restim1,
            "repetition": rep1,
            "rerepetition": rerep1,
            "subject": np.array([[1.0]]),
            "exercise": np.array([[1.0]]),
            "frequency": np.array([[100.0]]),
            "note": "fixture",
            "extras": np.array([np.array([1.0]), np.array([2.0, 3.0])], dtype=object),
        },
        do_compression=False,
        oned_as="column",
    )
    truth["db1/S1_A1_E1.mat"] = {
        "emg": {"rows": 48, "cols": 10},
        "spots": spots(rng, emg1),
        "stimulus": stim1.astype(int).tolist(),
        "restimulus": restim1.astype(int).tolist(),
        "repetition": rep1.astype(int).tolist(),
        "rerepetition": rerep1.astype(int).tolist(),
    }

    emg2 = emg_matrix(rng, 30, 10)
    stim2, rep2 = block_labels(30, [0, 3], 5)
    savemat(
        HERE / "db1" / "S1_A2_E2.mat",
        {
            "emg": emg2,
            "stimulus": stim2,
            "repetition": rep2,
            "subject": np.array([[1.0]]),
            "frequency": np.array([[100.0]]),
        },
        do_compression=True,
        oned_as="column",
    )
    truth["db1/S1_A2_E2.mat"] = {
        "emg": {"rows": 30, "cols": 10},
        "spots": spots(rng, emg2),
        "stimulus": stim2.astype(int).tolist(),
        "repetition": rep2.astype(int).tolist(),
    }

    # --- compressed twin of the first db1 file ----------------------------
    (HERE / "twin").mkdir(exist_ok=True)
    savemat(
        HERE / "twin" / "S1_A1_E1.mat",
        {
            "emg": emg1,
            "stimulus": stim1,
            "restimulus": restim1,
            "repetition": rep1,
            "rerepetition": rerep1,
            "subject": np.array([[1.0]]),
            "exercise": np.array([[1.0]]),
            "frequency": np.array([[100.0]]),
        },
        do_compression=True,
        oned_as="column",
    )

    # --- db3: amputee subject with bundled questionnaire data -------------
    (HERE / "db3").mkdir(exist_ok=True)
    emg3 = emg_matrix(rng, 40, 12)
    stim3, rep3 = block_labels(40, [0, 1, 0, 2, 0, 3], 4)
    savemat(
        HERE / "db3" / "S2_E1.mat",
        {
            "emg": emg3,
            "stimulus": stim3,
            "repetition": rep3,
            "subject": np.array([[2.0]]),
        },
        do_compression=True,
        oned_as="column",
    )
    truth["db3/S2_E1.mat"] = {
        "emg": {"rows": 40, "cols": 12},
        "spots": spots(rng, emg3),
        "stimulus": stim3.astype(int).tolist(),
        "repetition": rep3.astype(int).tolist(),
    }

    # --- integer storage types, no rate anywhere --------------------------
    (HERE / "int16").mkdir(exist_ok=True)
    emg4 = rng.integers(-3000, 3000, size=(36, 4)).astype(np.int16)
    stim4, _ = block_labels(36, [0, 1, 2], 6)
    savemat(
        HERE / "int16" / "S3_E1.mat",
        {
            "emg": emg4,
            "stimulus": stim4.astype(np.int32),
            "subject": np.array([[3.0]]),
        },
        do_compression=False,
        oned_as="column",
    )
    truth["int16/S3_E1.mat"] = {
        "emg": {"rows": 36, "cols": 4},
        "spots": spots(rng, emg4.astype(np.float64)),
        "stimulus": stim4.astype(int).tolist(),
    }

    # --- broken layout: no emg variable -----------------------------------
    (HERE / "bad").mkdir(exist_ok=True)
    savemat(
        HERE / "bad" / "S9_E9.mat",
        {"glove": rng.standard_normal((20, 22))},
        do_compression=False,
        oned_as="column",
    )

    (HERE / "truth.json").write_text(json.dumps(truth, indent=2) + "\n")
    print("fixtures written to", HERE)


if __name__ == "__main__":
    main()
