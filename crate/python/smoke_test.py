"""Smoke test for the Python extension.

Uses an installed `dcdfm` module if there is one, otherwise the library built by
`cargo build --release -p dcdfm-python` (override with DCDFM_LIB).
"""

import importlib
import os
import shutil
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def load():
    try:
        return importlib.import_module("dcdfm")
    except ImportError:
        pass
    lib = os.environ.get("DCDFM_LIB", os.path.join(ROOT, "target", "release", "libdcdfm.so"))
    if not os.path.exists(lib):
        sys.exit(f"extension not found at {lib}; build it with cargo build --release -p dcdfm-python")
    tmp = tempfile.mkdtemp()
    shutil.copy(lib, os.path.join(tmp, "dcdfm.so"))
    sys.path.insert(0, tmp)
    return importlib.import_module("dcdfm")


def main():
    dcdfm = load()

    p = [[1.0, 0.2, 0.1], [0.2, 0.9, 0.3], [0.1, 0.3, 0.8]]
    labels = [1 + i % 3 for i in range(45)]
    theta = [0.3 + 0.6 * ((i * 7) % 10) / 10 for i in range(45)]
    model = dcdfm.Model(labels, p, theta)
    assert (model.n, model.k) == (45, 3)

    omega = model.omega()
    det = dcdfm.ndfa(omega, 3, seed=1)
    assert dcdfm.error_rate(det.labels, labels) == 0.0
    assert dcdfm.f_hat(det.labels, labels) == 0.0
    assert len(det.eigenvalues) == 3

    a = model.sample("bernoulli", seed=3)
    assert a == model.sample("bernoulli", seed=3)
    assert all(a[i][j] == a[j][i] for i in range(45) for j in range(45))
    base = dcdfm.dfa(a, 3)
    assert base.method == "DFA" and len(base.labels) == 45

    report = model.bound_report(a, model.gamma("bernoulli"))
    assert report["spectral_gap"] >= report["lemma3_rhs"]

    assert dcdfm.error_rate([1, 1, 1, 2], [1, 1, 2, 2]) == 0.5
    assert dcdfm.f_hat([1, 2, 2, 2], [1, 1, 2, 2]) == 0.5

    try:
        dcdfm.Model([1, 1], [[1.0, 0.5], [0.4, 1.0]], [1.0, 1.0])
    except ValueError as e:
        assert "symmetric" in str(e) or "community" in str(e), e
    else:
        raise AssertionError("invalid model accepted")

    adj, truth, ids = dcdfm.read_gml(os.path.join(ROOT, "crates", "core", "tests", "data", "karate.gml"))
    assert len(adj) == 34 and len(truth) == 34 and ids[0] == 1

    try:
        dcdfm.read_gml("/nonexistent.gml")
    except OSError:
        pass
    else:
        raise AssertionError("missing file accepted")

    print("python smoke test passed")


if __name__ == "__main__":
    main()
