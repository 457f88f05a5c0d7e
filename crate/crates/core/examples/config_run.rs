//! The library behind `gsgf run`: parse a configuration, integrate, write records.

use gsgf::cli_io::{parse_config, read_records, write_records};
use gsgf::stepper::run as integrate;

const CONFIG: &str = "
# 3D shear-thickening decay
dim = 3
n = 8
r = 3.5
mu0 = 1
mu1 = 2
alpha1 = 0.05
t_end = 0.2
ic = random_band 1 3 0.5 4
";

pub fn run() -> gsgf::Result<()> {
    let cfg = parse_config(CONFIG)?;
    let out = integrate(&cfg.grid()?, &cfg.params()?).map_err(|a| a.error)?;
    println!("dt = auto resolved to {:.4e}, {} records", out.dt, out.records.len());

    let path = std::env::temp_dir().join(format!("gsgf-records-{}.csv", std::process::id()));
    write_records(&out.records, &path)?;
    let back = read_records(&path)?;
    println!("records round trip exact: {}", back == out.records);
    let last = back.last().expect("records");
    println!("E: {:.6e} -> {:.6e}", back[0].energy, last.energy);
    std::fs::remove_file(&path)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> gsgf::Result<()> {
    run()
}
