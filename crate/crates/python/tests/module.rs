use pyo3::ffi::c_str;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use pysymsplit::pysymsplit;

fn run(code: &std::ffi::CStr) {
    pyo3::append_to_inittab!(pysymsplit);
    Python::initialize();
    Python::attach(|py| {
        let globals = PyDict::new(py);
        if let Err(e) = py.run(code, Some(&globals), None) {
            e.print(py);
            panic!("python code failed");
        }
    });
}

#[test]
fn embedded_module_round_trip() {
    run(c_str!(
        r#"
import pysymsplit as ss

system = ss.example1()
assert system.shape == (4, 6)
direct = system.solve(mode="direct")
split = system.solve(mode="split")
assert max(abs(a - b) for a, b in zip(direct.f, split.f)) < 1e-9
assert len(split.branches) == 2 and len(direct.branches) == 1

f1, f2 = ss.decompose_solution(split.f)
assert max(abs(a - b) for a, b in zip(ss.recombine_solution(f1, f2), split.f)) < 1e-15

halves = system.split()
assert halves.reconstruct_matrix().to_list() == system.matrix.to_list()
assert halves.p1 == [a - b for a, b in zip(system.rhs[:2], system.rhs[::-1][:2])]

report = ss.verify_symmetry([[1.0, 2.0], [2.0, 1.0]])
assert report["holds"] and report["max_violation"] == 0.0

try:
    ss.CentroSymmetricSystem([[1.0, 2.0], [3.0, 4.0]], [0.0, 0.0])
    raise AssertionError("asymmetric system accepted")
except ss.AsymmetricError:
    pass

try:
    system.solve(method="lsqr")
    raise AssertionError("unknown method accepted")
except ss.SymsplitError as e:
    assert "lsqr" in str(e)

try:
    ss.build_system()
    raise AssertionError("missing size accepted")
except ss.SymsplitError:
    pass

m = ss.Matrix.from_triplets(2, 2, [(0, 1, 3.0)])
assert m.is_sparse and m.nnz == 1 and m.get(0, 1) == 3.0
assert m.matvec([1.0, 2.0]) == [6.0, 0.0]
"#
    ));
}
