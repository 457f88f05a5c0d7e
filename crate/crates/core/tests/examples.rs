//! Every example runs to completion.

macro_rules! example {
    ($name:ident, $file:literal) => {
        #[path = $file]
        mod $name;

        #[test]
        fn $name() {
            $name::run().expect(concat!($file, " should run"));
        }
    };
}

example!(taylor_green, "../examples/taylor_green.rs");
example!(constitutive_sweep, "../examples/constitutive_sweep.rs");
example!(energy_budget, "../examples/energy_budget.rs");
example!(uniqueness, "../examples/uniqueness.rs");
example!(restart, "../examples/restart.rs");
example!(oracle_check, "../examples/oracle_check.rs");
example!(imex_forced, "../examples/imex_forced.rs");
example!(config_run, "../examples/config_run.rs");
