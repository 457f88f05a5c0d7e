//! Initial-condition and forcing descriptors.

use std::path::PathBuf;
use std::sync::Arc;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::field::SpectralVectorField;
use crate::field_ops::{leray_project, remove_mean};
use crate::grid::Grid;

/// Taylor-Green vortex of amplitude `a`.
///
/// 2D: `(sin x₁ cos x₂, −cos x₁ sin x₂)`; 3D: `(sin x₁ cos x₂ cos x₃, −cos x₁ sin x₂ cos x₃, 0)`.
pub fn taylor_green(grid: &Arc<Grid>, a: f64) -> SpectralVectorField {
    let three = grid.dim() == 3;
    let mut u = SpectralVectorField::from_fn(grid, |x| {
        let cz = if three { x[2].cos() } else { 1.0 };
        [a * x[0].sin() * x[1].cos() * cz, -a * x[0].cos() * x[1].sin() * cz, 0.0]
    });
    clean(&mut u);
    u
}

/// Plane shear `(sin x₂, 0[, 0])`.
pub fn shear(grid: &Arc<Grid>) -> SpectralVectorField {
    let mut u = SpectralVectorField::from_fn(grid, |x| [x[1].sin(), 0.0, 0.0]);
    clean(&mut u);
    u
}

fn clean(u: &mut SpectralVectorField) {
    let g = u.grid().clone();
    for i in 0..u.dim() {
        g.drop_nyquist(u.component_mut(i));
    }
}

/// Random divergence-free, zero-mean field supported on `kmin <= |k| <= kmax`,
/// scaled to root-mean-square velocity `amplitude`.
pub fn random_band(grid: &Arc<Grid>, kmin: f64, kmax: f64, amplitude: f64, seed: u64) -> SpectralVectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = grid.dim();
    let mut raw = SpectralVectorField::zeros(grid);
    for idx in 0..grid.len() {
        let kk = grid.stokes_eigenvalue(idx).sqrt();
        let draw: Vec<Complex64> = (0..d)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im)
            })
            .collect();
        if grid.is_resolved(idx) && kk >= kmin && kk <= kmax {
            raw.set_mode(idx, &draw);
        }
    }
    let mut sym = raw.clone();
    for idx in 0..grid.len() {
        let neg = grid.negated_index(idx);
        let a = raw.mode(idx);
        let b = raw.mode(neg);
        let m: Vec<Complex64> = (0..d).map(|i| (a[i] + b[i].conj()) * 0.5).collect();
        sym.set_mode(idx, &m);
    }
    let u = remove_mean(&leray_project(&sym));
    let rms = u.norm_l2() / grid.volume().sqrt();
    if rms == 0.0 {
        u
    } else {
        u.scaled(amplitude / rms)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialCondition {
    TaylorGreen {
        amplitude: f64,
    },
    Shear,
    RandomBand {
        kmin: f64,
        kmax: f64,
        amplitude: f64,
        /// Falls back to the run seed when absent.
        seed: Option<u64>,
    },
    /// Restart from a snapshot file.
    File(PathBuf),
}

impl InitialCondition {
    /// Builds the (unprojected) field and its start time.
    pub fn build(&self, grid: &Arc<Grid>, run_seed: u64) -> Result<(SpectralVectorField, f64)> {
        match self {
            InitialCondition::TaylorGreen { amplitude } => Ok((taylor_green(grid, *amplitude), 0.0)),
            InitialCondition::Shear => Ok((shear(grid), 0.0)),
            InitialCondition::RandomBand {
                kmin,
                kmax,
                amplitude,
                seed,
            } => Ok((
                random_band(grid, *kmin, *kmax, *amplitude, seed.unwrap_or(run_seed)),
                0.0,
            )),
            InitialCondition::File(path) => {
                let snap = crate::cli_io::Snapshot::read(path)?;
                let t = snap.t;
                Ok((snap.to_field(grid)?, t))
            }
        }
    }
}

/// Steady body force descriptors. Every forcing is Leray-projected and mean-free.
#[derive(Clone, Debug, PartialEq)]
pub enum Forcing {
    None,
    /// `amplitude · P(ê sin(k·x))` with `ê = e₁`, or `e₂` when `k ∥ e₁`.
    SteadyMode {
        k: Vec<i64>,
        amplitude: f64,
    },
    /// Forcing that makes the initial condition a steady state.
    Manufactured,
}

impl Forcing {
    pub fn steady_mode_field(grid: &Arc<Grid>, k: &[i64], amplitude: f64) -> Result<SpectralVectorField> {
        if k.len() != grid.dim() {
            return Err(Error::param(format!(
                "forcing wavevector has {} entries, grid dimension is {}",
                k.len(),
                grid.dim()
            )));
        }
        if grid.index_of(k).is_none() || k.iter().all(|&ki| ki == 0) {
            return Err(Error::param(format!(
                "forcing wavevector {k:?} is not a resolved nonzero mode"
            )));
        }
        let parallel_to_e1 = k.iter().skip(1).all(|&ki| ki == 0);
        let axis = if parallel_to_e1 { 1 } else { 0 };
        let kf: Vec<f64> = k.iter().map(|&ki| ki as f64).collect();
        let f = SpectralVectorField::from_fn(grid, |x| {
            let phase: f64 = kf.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
            let mut out = [0.0; 3];
            out[axis] = amplitude * phase.sin();
            out
        });
        let mut f = remove_mean(&leray_project(&f));
        clean(&mut f);
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn random_band_is_admissible() {
        let g = make_grid(2, 16).unwrap();
        let u = random_band(&g, 1.0, 4.0, 0.5, 1);
        assert!(u.divergence_ratio() < 1e-15);
        assert!(u.symmetry_defect() < 1e-15);
        assert!((u.norm_l2() / g.volume().sqrt() - 0.5).abs() < 1e-14);
        for idx in 0..g.len() {
            let kk = g.stokes_eigenvalue(idx).sqrt();
            if kk > 4.0 || kk < 1.0 {
                assert!(u.mode(idx).iter().all(|z| z.norm() == 0.0));
            }
        }
        assert_eq!(random_band(&g, 1.0, 4.0, 0.5, 1), u);
        assert_ne!(random_band(&g, 1.0, 4.0, 0.5, 2), u);
    }

    #[test]
    fn steady_mode_forcing() {
        let g = make_grid(2, 8).unwrap();
        let f = Forcing::steady_mode_field(&g, &[0, 2], 1.5).unwrap();
        let phys = f.to_physical().unwrap();
        for idx in 0..g.len() {
            assert!((phys[0][idx] - 1.5 * (2.0 * g.point(idx)[1]).sin()).abs() < 1e-14);
        }
        let f = Forcing::steady_mode_field(&g, &[1, 0], 1.0).unwrap();
        assert!(f.norm_l2() > 1.0);
        assert!(Forcing::steady_mode_field(&g, &[0, 0], 1.0).is_err());
        assert!(Forcing::steady_mode_field(&g, &[1, 0, 0], 1.0).is_err());
    }
}
