"""Smoke test for the pysymsplit extension module.

Build and install the module first:

    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/pysymsplit-*.whl

then run `python python/smoke_test.py`.
"""

import math
import os
import sys
import tempfile

import numpy as np

import pysymsplit as ss


def check(label, ok):
    print(f"{'ok  ' if ok else 'FAIL'} {label}")
    return ok


def main():
    results = []

    system = ss.example1()
    a = np.array(system.matrix.to_list())
    p = np.array(system.rhs)
    results.append(check("example matrix is 4x6", system.shape == (4, 6)))
    results.append(check("example is centrosymmetric", system.symmetry_report()["holds"]))

    halves = system.split()
    results.append(check("halves are 2x3", halves.a1.shape == (2, 3) and halves.a2.shape == (2, 3)))
    rebuilt = np.array(halves.reconstruct_matrix().to_list())
    results.append(check("halves reassemble the matrix", np.array_equal(rebuilt, a)))

    reference = np.linalg.pinv(a) @ p
    for mode in ("direct", "split"):
        report = system.solve(mode=mode, method="dense")
        err = np.max(np.abs(np.array(report.f) - reference))
        results.append(check(f"{mode} dense solve matches numpy pinv ({err:.1e})", err < 1e-9))
    split = system.solve(mode="split")
    results.append(check("split report has two branches", len(split.branches) == 2))

    f1, f2 = ss.decompose_solution(split.f)
    lhs = sum(v * v for v in split.f)
    rhs = 0.5 * (sum(v * v for v in f1) + sum(v * v for v in f2))
    results.append(check("norm identity", math.isclose(lhs, rhs, rel_tol=1e-12)))
    back = ss.recombine_solution(f1, f2)
    results.append(check("recombine inverts decompose", np.allclose(back, split.f, rtol=0, atol=1e-15)))

    rng = np.random.default_rng(3)
    top = rng.normal(size=(3, 6))
    square = ss.symmetrize(np.vstack([top, np.zeros((3, 6))]).tolist())
    det_a, det_a1, det_a2 = ss.det_identity(square)
    results.append(check("det(A) = det(A1) det(A2)", math.isclose(det_a, det_a1 * det_a2, rel_tol=1e-10)))
    det_np = np.linalg.det(np.array(square.to_list()))
    results.append(check("det agrees with numpy", math.isclose(det_a, det_np, rel_tol=1e-10)))

    try:
        ss.CentroSymmetricSystem([[1.0, 2.0], [3.0, 4.0]], [1.0, 1.0])
        results.append(check("asymmetric matrix rejected", False))
    except ss.AsymmetricError as e:
        results.append(check(f"asymmetric matrix rejected ({e})", True))

    tomo, phantom_system, truth = ss.simulate(n=32)
    rows, cols = phantom_system.shape
    results.append(check(f"32x32 scan builds ({rows}x{cols})", cols == 1024 and rows % 2 == 0))
    report = phantom_system.solve(mode="split", method="dense")
    rel = ss.relative_error(report.f, truth)
    results.append(check(f"32x32 split reconstruction error {rel:.1e}", rel <= 1e-4))
    image = np.array(tomo.to_image(report.f))
    results.append(check("image is 32x32", image.shape == (32, 32)))
    truth_image = np.array(tomo.to_image(truth))
    results.append(check("image matches the phantom", np.max(np.abs(image - truth_image)) < 1e-10))

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "a.mtx")
        ss.write_matrix_market(tomo.matrix, path)
        loaded = ss.read_matrix_market(path)
        results.append(check("Matrix Market round trip", loaded.triplets() == tomo.matrix.triplets()))
        vpath = os.path.join(tmp, "f.csv")
        ss.write_vector(report.f, vpath)
        results.append(check("vector round trip", ss.read_vector(vpath) == report.f))

    passed = sum(results)
    print(f"smoke test: {passed} of {len(results)} checks passed")
    return 0 if passed == len(results) else 1


if __name__ == "__main__":
    sys.exit(main())
