//! Forced flow toward a steady state with the IMEX scheme, compared with RK4 at the
//! same step.

use gsgf::init::{Forcing, InitialCondition};
use gsgf::stepper::{run as integrate, Scheme, SimParams};
use gsgf::{make_grid, ConstitutiveLaw};

pub fn run() -> gsgf::Result<()> {
    let grid = make_grid(2, 16)?;
    let law = ConstitutiveLaw::new(1.0, 0.5, 3.0)?;
    let mut finals = Vec::new();
    for scheme in [Scheme::Imex, Scheme::Rk4] {
        let mut p = SimParams::new(law, 0.1, 2.0, InitialCondition::Shear);
        p.scheme = scheme;
        p.dt = Some(0.01);
        p.forcing = Forcing::SteadyMode {
            k: vec![1, 1],
            amplitude: 1.0,
        };
        let out = integrate(&grid, &p).map_err(|a| a.error)?;
        let last = out.records.last().expect("records");
        println!(
            "{scheme:?}: E(T) = {:.8e}, dissipation {:.6e}, power {:.6e}",
            last.energy, last.dissipation, last.forcing_power
        );
        finals.push(out.state.u_hat);
    }
    let diff = finals[0].sub(&finals[1]).norm_l2() / finals[1].norm_l2();
    println!("relative difference IMEX vs RK4 at T: {diff:.2e}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> gsgf::Result<()> {
    run()
}
