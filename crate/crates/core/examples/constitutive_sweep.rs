//! Stress law S(D) = (μ₀ + μ₁|D|)^{r−2} D: derived constants, sampled inequality
//! margins and the analytic Jacobian against central differences.

use gsgf::constitutive::{jacobian_fd_sweep, margin_sweep};
use gsgf::tensor::Tensor2;
use gsgf::ConstitutiveLaw;

pub fn run() -> gsgf::Result<()> {
    let d = Tensor2::from_rows(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0]]);
    for (mu0, mu1, r) in [(1.0, 1.0, 3.0), (2.0, 0.5, 4.0), (0.5, 2.0, 5.5)] {
        let law = ConstitutiveLaw::new(mu0, mu1, r)?;
        let c = law.derived_constants();
        println!("mu0 = {mu0}, mu1 = {mu1}, r = {r}");
        println!(
            "  S(D) for simple shear |D| = sqrt 2: S_12 = {:.6}",
            law.stress(&d)?.get(0, 1)
        );
        println!(
            "  c0 = {:.4e}  c1 = {:.4e}  c2 = {:.4e}  c3 = {:.4e}  c4 = {:.4e}  c3' = {:.4e}",
            c.c0, c.c1, c.c2, c.c3, c.c4, c.c3_monotone
        );
        let rep = margin_sweep(&law, 3, 10_000, 10.0, 1);
        println!(
            "  min margins: jac lo {:+.1e}  jac hi {:+.1e}  coerc {:+.1e}  growth {:+.1e}  mono {:+.1e}",
            rep.jacobian_lower, rep.jacobian_upper, rep.coercivity, rep.growth, rep.monotonicity
        );
        println!(
            "  min monotone ratio {:.4e} (>= c3'), jacobian fd error {:.1e}",
            rep.min_monotonicity_ratio,
            jacobian_fd_sweep(&law, 3, 200, 10.0, 1e-6, 2)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> gsgf::Result<()> {
    run()
}
