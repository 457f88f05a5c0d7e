//! Spectral and physical field containers.
//!
//! Every field holds a shared [`Grid`]. Spectral components are stored on the full
//! base lattice in the grid's mode order; physical components are collocation
//! values in row-major order (`x_1` slowest).

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::Grid;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn same_grid(a: &Grid, b: &Grid) -> bool {
    a.dim() == b.dim() && a.n() == b.n()
}

/// Parseval inner product of two real fields given by their modes.
pub(crate) fn modal_inner(grid: &Grid, a: &[Complex64], b: &[Complex64]) -> f64 {
    let s: f64 = a.iter().zip(b).map(|(x, y)| x.re * y.re + x.im * y.im).sum();
    grid.volume() * s
}

/// Scalar field in spectral form.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Arc<Grid>,
    modes: Vec<Complex64>,
}

impl PartialEq for SpectralField {
    fn eq(&self, other: &Self) -> bool {
        same_grid(&self.grid, &other.grid) && self.modes == other.modes
    }
}

impl SpectralField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        SpectralField {
            grid: grid.clone(),
            modes: vec![ZERO; grid.len()],
        }
    }

    pub fn from_modes(grid: &Arc<Grid>, modes: Vec<Complex64>) -> Result<Self> {
        if modes.len() != grid.len() {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                actual: modes.len(),
            });
        }
        Ok(SpectralField {
            grid: grid.clone(),
            modes,
        })
    }

    pub fn from_physical(grid: &Arc<Grid>, values: &[f64]) -> Result<Self> {
        Ok(SpectralField {
            grid: grid.clone(),
            modes: grid.forward_transform(values)?,
        })
    }

    pub fn to_physical(&self) -> Result<Vec<f64>> {
        self.grid.inverse_transform(&self.modes)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn modes(&self) -> &[Complex64] {
        &self.modes
    }

    pub fn modes_mut(&mut self) -> &mut [Complex64] {
        &mut self.modes
    }

    pub fn inner(&self, other: &Self) -> f64 {
        modal_inner(&self.grid, &self.modes, &other.modes)
    }

    pub fn norm_l2(&self) -> f64 {
        self.inner(self).sqrt()
    }
}

/// Vector field `u = (u_1, ..., u_d)` in spectral form (houses `û`, `v̂`, `f̂`).
#[derive(Clone, Debug)]
pub struct SpectralVectorField {
    grid: Arc<Grid>,
    comps: Vec<Vec<Complex64>>,
}

impl PartialEq for SpectralVectorField {
    fn eq(&self, other: &Self) -> bool {
        same_grid(&self.grid, &other.grid) && self.comps == other.comps
    }
}

impl SpectralVectorField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        SpectralVectorField {
            grid: grid.clone(),
            comps: vec![vec![ZERO; grid.len()]; grid.dim()],
        }
    }

    pub fn from_components(grid: &Arc<Grid>, comps: Vec<Vec<Complex64>>) -> Result<Self> {
        if comps.len() != grid.dim() {
            return Err(Error::ShapeMismatch {
                expected: grid.dim(),
                actual: comps.len(),
            });
        }
        for c in &comps {
            if c.len() != grid.len() {
                return Err(Error::ShapeMismatch {
                    expected: grid.len(),
                    actual: c.len(),
                });
            }
        }
        Ok(SpectralVectorField {
            grid: grid.clone(),
            comps,
        })
    }

    /// Forward-transforms `d` physical components.
    pub fn from_physical(grid: &Arc<Grid>, comps: &[Vec<f64>]) -> Result<Self> {
        if comps.len() != grid.dim() {
            return Err(Error::ShapeMismatch {
                expected: grid.dim(),
                actual: comps.len(),
            });
        }
        let comps = comps
            .iter()
            .map(|c| grid.forward_transform(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(SpectralVectorField {
            grid: grid.clone(),
            comps,
        })
    }

    /// Samples `f(x)` at the collocation points and transforms it.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let d = grid.dim();
        let mut phys = vec![vec![0.0; grid.len()]; d];
        for idx in 0..grid.len() {
            let value = f(grid.point(idx));
            for i in 0..d {
                phys[i][idx] = value[i];
            }
        }
        Self::from_physical(grid, &phys).expect("shape matches grid")
    }

    pub fn to_physical(&self) -> Result<Vec<Vec<f64>>> {
        self.comps.iter().map(|c| self.grid.inverse_transform(c)).collect()
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn component(&self, i: usize) -> &[Complex64] {
        &self.comps[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.comps[i]
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<Vec<Complex64>> {
        self.comps
    }

    /// Mode vector `(û_1(k), ..., û_d(k))`.
    pub fn mode(&self, idx: usize) -> [Complex64; 3] {
        let mut out = [ZERO; 3];
        for (i, c) in self.comps.iter().enumerate() {
            out[i] = c[idx];
        }
        out
    }

    pub fn set_mode(&mut self, idx: usize, value: &[Complex64]) {
        for (c, v) in self.comps.iter_mut().zip(value) {
            c[idx] = *v;
        }
    }

    pub fn map_modes(&self, mut f: impl FnMut(usize, Complex64) -> Complex64) -> Self {
        let comps = self
            .comps
            .iter()
            .map(|c| c.iter().enumerate().map(|(idx, &z)| f(idx, z)).collect())
            .collect();
        SpectralVectorField {
            grid: self.grid.clone(),
            comps,
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        self.map_modes(|_, z| z * a)
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &Self) {
        for (c, o) in self.comps.iter_mut().zip(&other.comps) {
            for (x, y) in c.iter_mut().zip(o) {
                *x += y * a;
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// L² inner product `∫ u·w dx` by Parseval.
    pub fn inner(&self, other: &Self) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| modal_inner(&self.grid, a, b))
            .sum()
    }

    pub fn norm_l2(&self) -> f64 {
        self.inner(self).sqrt()
    }

    /// Euclidean norm of the raw coefficient array.
    pub fn coefficient_norm(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `max_k |k·û(k)|`.
    pub fn max_divergence(&self) -> f64 {
        let g = &self.grid;
        (0..g.len())
            .map(|idx| {
                let mut s = ZERO;
                for (i, c) in self.comps.iter().enumerate() {
                    s += c[idx] * g.derivative_wavenumber(idx, i);
                }
                s.norm()
            })
            .fold(0.0, f64::max)
    }

    /// `max_k |k·û(k)| / ‖û‖`; zero for the zero field.
    pub fn divergence_ratio(&self) -> f64 {
        let norm = self.coefficient_norm();
        if norm == 0.0 {
            0.0
        } else {
            self.max_divergence() / norm
        }
    }

    pub fn max_mode_magnitude(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm())
            .fold(0.0, |a: f64, b| if b.is_nan() { f64::NAN } else { a.max(b) })
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Conjugate-symmetry defect over all components.
    pub fn symmetry_defect(&self) -> f64 {
        self.comps
            .iter()
            .map(|c| self.grid.symmetry_defect(c))
            .fold(0.0, f64::max)
    }
}

/// Tensor field `T_ij` in spectral form; entry `(i, j)` is component `i * d + j`.
#[derive(Clone, Debug)]
pub struct SpectralTensorField {
    grid: Arc<Grid>,
    comps: Vec<Vec<Complex64>>,
}

impl PartialEq for SpectralTensorField {
    fn eq(&self, other: &Self) -> bool {
        same_grid(&self.grid, &other.grid) && self.comps == other.comps
    }
}

impl SpectralTensorField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        let d = grid.dim();
        SpectralTensorField {
            grid: grid.clone(),
            comps: vec![vec![ZERO; grid.len()]; d * d],
        }
    }

    pub fn from_components(grid: &Arc<Grid>, comps: Vec<Vec<Complex64>>) -> Result<Self> {
        let d = grid.dim();
        if comps.len() != d * d {
            return Err(Error::ShapeMismatch {
                expected: d * d,
                actual: comps.len(),
            });
        }
        if let Some(bad) = comps.iter().find(|c| c.len() != grid.len()) {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                actual: bad.len(),
            });
        }
        Ok(SpectralTensorField {
            grid: grid.clone(),
            comps,
        })
    }

    pub fn from_physical(grid: &Arc<Grid>, comps: &[Vec<f64>]) -> Result<Self> {
        let comps = comps
            .iter()
            .map(|c| grid.forward_transform(c))
            .collect::<Result<Vec<_>>>()?;
        Self::from_components(grid, comps)
    }

    pub fn to_physical(&self) -> Result<PhysicalTensorField> {
        let comps = self
            .comps
            .iter()
            .map(|c| self.grid.inverse_transform(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(PhysicalTensorField {
            grid: self.grid.clone(),
            comps,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn entry(&self, i: usize, j: usize) -> &[Complex64] {
        &self.comps[i * self.dim() + j]
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut [Complex64] {
        let d = self.dim();
        &mut self.comps[i * d + j]
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.comps
    }

    /// `Σ_ij ∫ T_ij S_ij dx` by Parseval.
    pub fn inner(&self, other: &Self) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| modal_inner(&self.grid, a, b))
            .sum()
    }

    pub fn norm_l2(&self) -> f64 {
        self.inner(self).sqrt()
    }
}

/// Tensor field sampled on the base collocation grid (houses `∇u`, `Du`, `S(Du)`).
#[derive(Clone, Debug)]
pub struct PhysicalTensorField {
    grid: Arc<Grid>,
    comps: Vec<Vec<f64>>,
}

impl PhysicalTensorField {
    pub fn from_components(grid: &Arc<Grid>, comps: Vec<Vec<f64>>) -> Result<Self> {
        let d = grid.dim();
        if comps.len() != d * d {
            return Err(Error::ShapeMismatch {
                expected: d * d,
                actual: comps.len(),
            });
        }
        if let Some(bad) = comps.iter().find(|c| c.len() != grid.len()) {
            return Err(Error::ShapeMismatch {
                expected: grid.len(),
                actual: bad.len(),
            });
        }
        Ok(PhysicalTensorField {
            grid: grid.clone(),
            comps,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn entry(&self, i: usize, j: usize) -> &[f64] {
        &self.comps[i * self.dim() + j]
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.comps
    }

    /// Tensor value at collocation point `idx`.
    pub fn at(&self, idx: usize) -> crate::tensor::Tensor2 {
        let d = self.dim();
        crate::tensor::Tensor2::from_fn(d, |i, j| self.comps[i * d + j][idx])
    }

    /// Largest `|T_ij - T_ji|` over all points.
    pub fn max_asymmetry(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..i {
                for (a, b) in self.entry(i, j).iter().zip(self.entry(j, i)) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
        worst
    }

    pub fn to_spectral(&self) -> Result<SpectralTensorField> {
        SpectralTensorField::from_physical(&self.grid, &self.comps)
    }
}
