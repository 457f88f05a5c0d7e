//! The FFT pipeline against brute-force references: direct DFTs, dense differentiation
//! matrices and explicit convolution sums.

use gsgf::make_grid;
use gsgf::oracle::oracle_suite;

pub fn run() -> gsgf::Result<()> {
    for (dim, n, fields) in [(2, 8, 10), (2, 16, 2), (3, 8, 2)] {
        let grid = make_grid(dim, n)?;
        let rep = oracle_suite(&grid, fields, 7)?;
        println!(
            "{n}^{dim}, {fields} fields: convect {:.1e}  stretch {:.1e}  gradient {:.1e}  divergence {:.1e}  leray {:.1e}",
            rep.convect, rep.stretch, rep.gradient, rep.divergence, rep.leray
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> gsgf::Result<()> {
    run()
}
