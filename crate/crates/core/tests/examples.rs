macro_rules! example {
    ($module:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }
    };
}

example!(pauli_algebra, "pauli_algebra.rs");
example!(peg_reduction, "peg_reduction.rs");
example!(uhlmann, "uhlmann.rs");
example!(lowering, "lowering.rs");
example!(two_qudit_compile, "two_qudit_compile.rs");
example!(decoupling, "decoupling.rs");
example!(routing, "routing.rs");

#[test]
fn examples_run() {
    pauli_algebra::run_example().unwrap();
    peg_reduction::run_example().unwrap();
    uhlmann::run_example().unwrap();
    lowering::run_example().unwrap();
    two_qudit_compile::run_example().unwrap();
    decoupling::run_example().unwrap();
    routing::run_example().unwrap();
}
