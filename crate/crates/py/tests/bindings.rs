use pyo3::prelude::*;
use pyo3::types::IntoPyDict;
use pyo3::wrap_pymodule;

fn with_module<R>(f: impl FnOnce(Python<'_>, &Bound<'_, PyModule>) -> PyResult<R>) -> R {
    Python::initialize();
    Python::attach(|py| {
        let m = wrap_pymodule!(logsing_py::logsing_py)(py).into_bound(py);
        let m = m.cast_into::<PyModule>().expect("a module");
        py.import("sys").and_then(|s| s.getattr("modules")).and_then(|mods| mods.set_item("logsing_py", &m)).unwrap();
        f(py, &m).unwrap_or_else(|e| panic!("{e}"))
    })
}

#[test]
fn prototype_from_python() {
    with_module(|py, _| {
        py.run(
            c"import logsing_py as ls
eq = ls.Equation('D[t,2](u) = D[t,1](u)^2')
assert eq.analyze().l == 0
sol = ls.solve(eq, order=10)
assert sol.a == '-1' and sol.verify()
",
            None,
            None,
        )
    });
}

#[test]
fn errors_map_to_exception_classes() {
    with_module(|py, _| {
        py.run(
            c"import logsing_py as ls
try:
    ls.solve(ls.example('m4-l1'))
    raise SystemExit('expected AssumptionError')
except ls.AssumptionError as e:
    assert isinstance(e, ls.LogsingError)
try:
    ls.Equation('D[t,2](u) = D[t,1](u')
    raise SystemExit('expected ParseError')
except ls.ParseError:
    pass
",
            None,
            None,
        )
    });
}

#[test]
fn prescribed_series_coefficients() {
    let c5: String = with_module(|py, m| {
        let eq = m.getattr("example")?.call1(("kdv-laurent",))?;
        let data = [("2", "x1"), ("4", "0")].into_py_dict(py)?;
        let kwargs = [("data", data.into_any())].into_py_dict(py)?;
        kwargs.set_item("order", 4)?;
        let sol = m.getattr("solve_prescribed")?.call((eq, "-2", "2"), Some(&kwargs))?;
        sol.getattr("u")?.call_method1("coeff", ("5", 0))?.extract()
    });
    assert_eq!(c5, "-1/24");
}
