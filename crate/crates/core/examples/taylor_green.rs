//! Taylor-Green vortex under the linear law (μ₁ = 0): the computed amplitude decays
//! like e^{−σt} with σ = μ₀/(1 + 2α₁).

use gsgf::init::{taylor_green, InitialCondition};
use gsgf::oracle::taylor_green_rate;
use gsgf::stepper::{SimParams, Simulation};
use gsgf::{make_grid, ConstitutiveLaw};

pub fn run() -> gsgf::Result<()> {
    let grid = make_grid(2, 32)?;
    let alpha1 = 0.25;
    let law = ConstitutiveLaw::new(1.0, 0.0, 3.0)?;
    let mut params = SimParams::new(law, alpha1, 1.0, InitialCondition::TaylorGreen { amplitude: 1.0 });
    params.dt = Some(0.01);

    let u0 = taylor_green(&grid, 1.0);
    let sigma = taylor_green_rate(1.0, alpha1);
    let mut sim = Simulation::new(&grid, &params)?;
    println!("{:>6} {:>16} {:>16} {:>10}", "t", "amplitude", "exact", "rel err");
    while !sim.finished() {
        sim.step()?;
        if sim.step_index() % 20 == 0 {
            let t = sim.state().t;
            let a = sim.state().u_hat.inner(&u0) / u0.inner(&u0);
            let exact = (-sigma * t).exp();
            println!("{t:>6.2} {a:>16.12} {exact:>16.12} {:>10.2e}", (a / exact - 1.0).abs());
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> gsgf::Result<()> {
    run()
}
