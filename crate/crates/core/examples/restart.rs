//! Snapshot at t = 0.5, resume from the file, and compare the records with an
//! uninterrupted run byte for byte.

use gsgf::cli_io::{format_records, Snapshot};
use gsgf::init::InitialCondition;
use gsgf::stepper::{run as integrate, SimParams};
use gsgf::{make_grid, ConstitutiveLaw};

pub fn run() -> gsgf::Result<()> {
    let grid = make_grid(2, 16)?;
    let law = ConstitutiveLaw::new(1.0, 1.0, 4.0)?;
    let params = |t_end: f64, ic: InitialCondition| {
        let mut p = SimParams::new(law, 0.1, t_end, ic);
        p.dt = Some(0.01);
        p.snapshot_every = 50;
        p
    };
    let ic = InitialCondition::RandomBand {
        kmin: 1.0,
        kmax: 5.0,
        amplitude: 1.0,
        seed: Some(31),
    };
    let dir = std::env::temp_dir().join(format!("gsgf-restart-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;

    let straight = integrate(&grid, &params(1.0, ic.clone())).map_err(|a| a.error)?;
    let first = integrate(&grid, &params(0.5, ic)).map_err(|a| a.error)?;
    let (step, snap) = first.snapshots.last().expect("one snapshot");
    let path = dir.join(format!("snapshot_{step:08}.bin"));
    snap.write(&path)?;
    println!(
        "wrote {} (t = {}, {} bytes)",
        path.display(),
        snap.t,
        snap.to_bytes().len()
    );
    assert_eq!(&Snapshot::read(&path)?, snap);

    let second = integrate(&grid, &params(1.0, InitialCondition::File(path))).map_err(|a| a.error)?;
    let mut pieced = first.records.clone();
    pieced.extend(second.records.iter().copied());
    let identical = format_records(&straight.records) == format_records(&pieced);
    println!(
        "straight: {} records, restarted: {} + {} records, identical: {identical}",
        straight.records.len(),
        first.records.len(),
        second.records.len()
    );
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> gsgf::Result<()> {
    run()
}
