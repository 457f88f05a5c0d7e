//! Uniform periodic grid on `(0, 2π)^d` with its Fourier lattice.
//!
//! Spectral data is stored on the full complex lattice in FFT order: along each
//! axis, index `j` carries wavenumber `j` for `j <= n/2` and `j - n` otherwise, so
//! the lattice per axis is `{-n/2+1, ..., n/2}`. A mode `f̂_k` is the coefficient of
//! `e^{i k·x}`: `f(x) = Σ_k f̂_k e^{i k·x}`, and the forward transform divides by the
//! number of collocation points.
//!
//! Besides the base grid, every [`Grid`] carries a 3/2-padded companion grid used
//! to evaluate quadratic products without aliasing. Fields on the base lattice are
//! kept free of Nyquist modes (`|k_i| = n/2`); the padded round trip drops them.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Relative tolerance on conjugate-symmetry defects accepted by [`Grid::inverse_transform`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// One multidimensional FFT layout: `m` points per axis, `dim` axes.
struct Plan {
    m: usize,
    dim: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Plan {
    fn new(planner: &mut FftPlanner<f64>, m: usize, dim: usize) -> Self {
        Plan {
            m,
            dim,
            fwd: planner.plan_fft_forward(m),
            inv: planner.plan_fft_inverse(m),
        }
    }

    fn len(&self) -> usize {
        self.m.pow(self.dim as u32)
    }

    /// Unnormalized transform along every axis, in place.
    fn process(&self, data: &mut [Complex64], inverse: bool) {
        let fft = if inverse { &self.inv } else { &self.fwd };
        let m = self.m;
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        let mut line = vec![Complex64::new(0.0, 0.0); m];
        for axis in 0..self.dim {
            let stride = m.pow((self.dim - 1 - axis) as u32);
            if stride == 1 {
                fft.process_with_scratch(data, &mut scratch);
                continue;
            }
            let block = stride * m;
            for outer in (0..data.len()).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (j, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + j * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (j, value) in line.iter().enumerate() {
                        data[base + j * stride] = *value;
                    }
                }
            }
        }
    }
}

pub struct Grid {
    dim: usize,
    n: usize,
    wavenumbers: Vec<[i64; 3]>,
    stokes_eigenvalues: Vec<f64>,
    dealias_mask: Vec<bool>,
    negated: Vec<usize>,
    /// Padded-grid index of each resolved base mode; `None` for Nyquist modes.
    pad_index: Vec<Option<usize>>,
    base: Plan,
    padded: Plan,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.dim)
            .field("n", &self.n)
            .field("padded_n", &self.padded.m)
            .finish()
    }
}

/// Builds a shared grid; see [`Grid::new`].
pub fn make_grid(dim: usize, n: usize) -> Result<Arc<Grid>> {
    Grid::new(dim, n).map(Arc::new)
}

fn axis_wavenumber(j: usize, m: usize) -> i64 {
    if j <= m / 2 {
        j as i64
    } else {
        j as i64 - m as i64
    }
}

fn unravel(mut idx: usize, m: usize, dim: usize) -> [usize; 3] {
    let mut out = [0; 3];
    for axis in (0..dim).rev() {
        out[axis] = idx % m;
        idx /= m;
    }
    out
}

impl Grid {
    pub fn new(dim: usize, n: usize) -> Result<Grid> {
        if !(dim == 2 || dim == 3) {
            return Err(Error::InvalidGrid(format!("dimension must be 2 or 3, got {dim}")));
        }
        if n % 2 != 0 || n < 8 {
            return Err(Error::InvalidGrid(format!(
                "modes per axis must be even and at least 8, got {n}"
            )));
        }
        let mut planner = FftPlanner::new();
        let base = Plan::new(&mut planner, n, dim);
        let m = (3 * n).div_ceil(2);
        let padded = Plan::new(&mut planner, m, dim);

        let len = base.len();
        let nyq = (n / 2) as i64;
        let cutoff = n as f64 / 3.0;
        let mut wavenumbers = Vec::with_capacity(len);
        let mut stokes_eigenvalues = Vec::with_capacity(len);
        let mut dealias_mask = Vec::with_capacity(len);
        let mut negated = Vec::with_capacity(len);
        let mut pad_index = Vec::with_capacity(len);
        for idx in 0..len {
            let j = unravel(idx, n, dim);
            let mut k = [0i64; 3];
            let mut neg = 0usize;
            let mut pad = Some(0usize);
            for axis in 0..dim {
                k[axis] = axis_wavenumber(j[axis], n);
                neg = neg * n + (n - j[axis]) % n;
                pad = match pad {
                    Some(p) if k[axis].abs() < nyq => {
                        let pj = if k[axis] >= 0 {
                            k[axis] as usize
                        } else {
                            (m as i64 + k[axis]) as usize
                        };
                        Some(p * m + pj)
                    }
                    _ => None,
                };
            }
            wavenumbers.push(k);
            stokes_eigenvalues.push(k.iter().map(|&ki| (ki * ki) as f64).sum());
            dealias_mask.push(k[..dim].iter().all(|&ki| (ki.abs() as f64) < cutoff));
            negated.push(neg);
            pad_index.push(pad);
        }

        Ok(Grid {
            dim,
            n,
            wavenumbers,
            stokes_eigenvalues,
            dealias_mask,
            negated,
            pad_index,
            base,
            padded,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of modes (and collocation points) on the base grid.
    pub fn len(&self) -> usize {
        self.wavenumbers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wavenumbers.is_empty()
    }

    pub fn padded_n(&self) -> usize {
        self.padded.m
    }

    pub fn padded_len(&self) -> usize {
        self.padded.len()
    }

    /// Wavenumber of mode `idx`; entries past `dim` are zero.
    pub fn wavenumber(&self, idx: usize) -> [i64; 3] {
        self.wavenumbers[idx]
    }

    pub fn wavenumbers(&self) -> &[[i64; 3]] {
        &self.wavenumbers
    }

    /// `|k|²`, the eigenvalue of the Stokes operator (−Δ) on mode `idx`.
    pub fn stokes_eigenvalue(&self, idx: usize) -> f64 {
        self.stokes_eigenvalues[idx]
    }

    pub fn stokes_eigenvalues(&self) -> &[f64] {
        &self.stokes_eigenvalues
    }

    /// Multiplier of `∂_axis` on mode `idx`: `k_axis`, or 0 on the Nyquist plane of that axis.
    pub fn derivative_wavenumber(&self, idx: usize, axis: usize) -> f64 {
        let k = self.wavenumbers[idx][axis];
        if k == (self.n / 2) as i64 {
            0.0
        } else {
            k as f64
        }
    }

    /// 2/3-rule mask: true iff `|k_i| < n/3` on every axis.
    pub fn dealias_mask(&self, idx: usize) -> bool {
        self.dealias_mask[idx]
    }

    /// Index of the mode carrying `-k`.
    pub fn negated_index(&self, idx: usize) -> usize {
        self.negated[idx]
    }

    /// True when no component of `k` sits on the Nyquist plane.
    pub fn is_resolved(&self, idx: usize) -> bool {
        self.pad_index[idx].is_some()
    }

    /// Flat index of wavenumber `k` (length `dim`), if it lies on the lattice.
    pub fn index_of(&self, k: &[i64]) -> Option<usize> {
        if k.len() != self.dim {
            return None;
        }
        let n = self.n as i64;
        let mut idx = 0usize;
        for &ki in k {
            if ki <= -n / 2 || ki > n / 2 {
                return None;
            }
            idx = idx * self.n + ki.rem_euclid(n) as usize;
        }
        Some(idx)
    }

    /// Largest `|k|²` over resolved modes.
    pub fn max_resolved_eigenvalue(&self) -> f64 {
        let kmax = (self.n / 2 - 1) as f64;
        self.dim as f64 * kmax * kmax
    }

    /// Collocation point `x_j = 2πj/n` for flat index `idx`.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let j = unravel(idx, self.n, self.dim);
        let h = 2.0 * PI / self.n as f64;
        [j[0] as f64 * h, j[1] as f64 * h, j[2] as f64 * h]
    }

    /// Measure of the box, `(2π)^d`.
    pub fn volume(&self) -> f64 {
        (2.0 * PI).powi(self.dim as i32)
    }

    /// Rectangle-rule integral of base-grid samples.
    pub fn quadrature(&self, values: &[f64]) -> f64 {
        self.volume() * values.iter().sum::<f64>() / values.len() as f64
    }

    /// Rectangle-rule integral of padded-grid samples.
    pub fn padded_quadrature(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.padded_len());
        self.quadrature(values)
    }

    pub fn forward_transform(&self, values: &[f64]) -> Result<Vec<Complex64>> {
        self.check_len(values.len())?;
        let mut data: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.base.process(&mut data, false);
        let scale = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|c| *c *= scale);
        Ok(data)
    }

    pub fn inverse_transform(&self, modes: &[Complex64]) -> Result<Vec<f64>> {
        self.check_len(modes.len())?;
        // relative to max(1, largest mode) so round-off-only fields are accepted
        let scale = modes.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let defect = self.symmetry_defect(modes);
        if defect * scale > SYMMETRY_TOLERANCE * scale.max(1.0) {
            return Err(Error::NotConjugateSymmetric { defect });
        }
        let mut data = modes.to_vec();
        self.base.process(&mut data, true);
        Ok(data.into_iter().map(|c| c.re).collect())
    }

    /// `max_k |f̂_k - conj(f̂_{-k})|`, relative to the largest mode magnitude.
    pub fn symmetry_defect(&self, modes: &[Complex64]) -> f64 {
        let scale = modes.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let defect = modes
            .iter()
            .enumerate()
            .map(|(idx, c)| (c - modes[self.negated[idx]].conj()).norm())
            .fold(0.0, f64::max);
        defect / scale
    }

    pub fn apply_dealias(&self, modes: &[Complex64]) -> Vec<Complex64> {
        let mut out = modes.to_vec();
        self.dealias_in_place(&mut out);
        out
    }

    pub fn dealias_in_place(&self, modes: &mut [Complex64]) {
        for (c, &keep) in modes.iter_mut().zip(&self.dealias_mask) {
            if !keep {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Zeroes every mode with a Nyquist component.
    pub fn drop_nyquist(&self, modes: &mut [Complex64]) {
        for (idx, c) in modes.iter_mut().enumerate() {
            if self.pad_index[idx].is_none() {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Evaluates base-lattice modes on the padded collocation grid.
    /// Nyquist modes are ignored.
    pub fn to_padded_physical(&self, modes: &[Complex64], out: &mut Vec<f64>, scratch: &mut Vec<Complex64>) {
        debug_assert_eq!(modes.len(), self.len());
        scratch.clear();
        scratch.resize(self.padded_len(), Complex64::new(0.0, 0.0));
        for (c, pad) in modes.iter().zip(&self.pad_index) {
            if let Some(p) = pad {
                scratch[*p] = *c;
            }
        }
        self.padded.process(scratch, true);
        out.clear();
        out.extend(scratch.iter().map(|c| c.re));
    }

    /// Transforms padded-grid samples and truncates to the resolved base lattice.
    pub fn from_padded_physical(&self, values: &[f64], scratch: &mut Vec<Complex64>) -> Vec<Complex64> {
        debug_assert_eq!(values.len(), self.padded_len());
        scratch.clear();
        scratch.extend(values.iter().map(|&x| Complex64::new(x, 0.0)));
        self.padded.process(scratch, false);
        let scale = 1.0 / scratch.len() as f64;
        self.pad_index
            .iter()
            .map(|pad| match pad {
                Some(p) => scratch[*p] * scale,
                None => Complex64::new(0.0, 0.0),
            })
            .collect()
    }

    fn check_len(&self, actual: usize) -> Result<()> {
        if actual != self.len() {
            return Err(Error::ShapeMismatch {
                expected: self.len(),
                actual,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: &Grid, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    fn rel_err(a: &[f64], b: &[f64]) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
        let den: f64 = b.iter().map(|y| y * y).sum();
        (num / den.max(f64::MIN_POSITIVE)).sqrt()
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Grid::new(2, 7).is_err());
        assert!(Grid::new(2, 6).is_err());
        assert!(Grid::new(1, 8).is_err());
        assert!(Grid::new(4, 8).is_err());
    }

    #[test]
    fn lattice_2d_n8() {
        let g = Grid::new(2, 8).unwrap();
        assert_eq!(g.len(), 64);
        let mut k1: Vec<i64> = g.wavenumbers().iter().map(|k| k[0]).collect();
        k1.sort();
        k1.dedup();
        assert_eq!(k1, vec![-3, -2, -1, 0, 1, 2, 3, 4]);
        let idx = g.index_of(&[1, 1]).unwrap();
        assert_eq!(g.stokes_eigenvalue(idx), 2.0);
        assert_eq!(g.stokes_eigenvalue(0), 0.0);
        assert!(g.stokes_eigenvalues()[1..].iter().all(|&l| l > 0.0));
    }

    #[test]
    fn dealias_cutoff_3d() {
        let g = Grid::new(3, 16).unwrap();
        assert!(g.dealias_mask(g.index_of(&[5, 0, 0]).unwrap()));
        assert!(!g.dealias_mask(g.index_of(&[6, 0, 0]).unwrap()));
        assert!(!g.dealias_mask(g.index_of(&[0, -6, 0]).unwrap()));
    }

    #[test]
    fn lattice_closed_under_negation_off_nyquist() {
        let g = Grid::new(2, 8).unwrap();
        for idx in 0..g.len() {
            let k = g.wavenumber(idx);
            let neg = g.negated_index(idx);
            if g.is_resolved(idx) {
                assert_eq!(g.wavenumber(neg), [-k[0], -k[1], 0]);
            }
        }
    }

    #[test]
    fn zero_field_transforms_to_zero() {
        let g = Grid::new(2, 8).unwrap();
        let modes = g.forward_transform(&vec![0.0; 64]).unwrap();
        assert!(modes.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn pure_sine_modes() {
        let g = Grid::new(2, 8).unwrap();
        let f: Vec<f64> = (0..g.len()).map(|i| g.point(i)[1].sin()).collect();
        let modes = g.forward_transform(&f).unwrap();
        let plus = g.index_of(&[0, 1]).unwrap();
        let minus = g.index_of(&[0, -1]).unwrap();
        assert!((modes[plus] - Complex64::new(0.0, -0.5)).norm() < 1e-15);
        assert!((modes[minus] - Complex64::new(0.0, 0.5)).norm() < 1e-15);
        for (idx, c) in modes.iter().enumerate() {
            if idx != plus && idx != minus {
                assert!(c.norm() < 1e-15);
            }
        }
        let back = g.inverse_transform(&modes).unwrap();
        assert!(rel_err(&back, &f) < 1e-14);
    }

    #[test]
    fn roundtrip_random() {
        for (dim, n) in [(2, 8), (2, 12), (3, 8)] {
            let g = Grid::new(dim, n).unwrap();
            let f = random_field(&g, 7);
            let back = g.inverse_transform(&g.forward_transform(&f).unwrap()).unwrap();
            assert!(rel_err(&back, &f) < 1e-13);
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let g = Grid::new(2, 8).unwrap();
        assert!(matches!(
            g.forward_transform(&[0.0; 10]),
            Err(Error::ShapeMismatch {
                expected: 64,
                actual: 10
            })
        ));
    }

    #[test]
    fn inverse_rejects_asymmetric_modes() {
        let g = Grid::new(2, 8).unwrap();
        let mut modes = vec![Complex64::new(0.0, 0.0); g.len()];
        modes[g.index_of(&[1, 0]).unwrap()] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            g.inverse_transform(&modes),
            Err(Error::NotConjugateSymmetric { .. })
        ));
    }

    #[test]
    fn dealias_behaviour() {
        let g = Grid::new(2, 8).unwrap();
        // n = 8 keeps |k_i| <= 2
        for k in [[3, 0], [4, 0], [0, -3]] {
            let mut modes = vec![Complex64::new(0.0, 0.0); g.len()];
            modes[g.index_of(&k).unwrap()] = Complex64::new(1.0, 0.0);
            assert!(g.apply_dealias(&modes).iter().all(|c| c.norm() == 0.0));
        }
        let mut modes = vec![Complex64::new(0.0, 0.0); g.len()];
        for (k, c) in [([2, 0], 0.5), ([-2, 0], 0.5), ([1, -2], 0.3), ([-1, 2], 0.3)] {
            modes[g.index_of(&k).unwrap()] = Complex64::new(c, 0.0);
        }
        assert_eq!(g.apply_dealias(&modes), modes);

        let modes = g.forward_transform(&random_field(&g, 3)).unwrap();
        let once = g.apply_dealias(&modes);
        assert_eq!(g.apply_dealias(&once), once);
    }

    #[test]
    fn parseval_random() {
        for seed in 0..100 {
            let g = Grid::new(2, 8).unwrap();
            let f = random_field(&g, seed);
            let modes = g.forward_transform(&f).unwrap();
            let spectral: f64 = modes.iter().map(|c| c.norm_sqr()).sum::<f64>() * g.volume();
            let sq: Vec<f64> = f.iter().map(|x| x * x).collect();
            let direct = g.quadrature(&sq);
            assert!((spectral - direct).abs() <= 1e-12 * direct);
        }
    }

    #[test]
    fn transform_is_linear() {
        let g = Grid::new(3, 8).unwrap();
        let f = random_field(&g, 1);
        let h = random_field(&g, 2);
        let (a, b) = (0.7, -2.3);
        let comb: Vec<f64> = f.iter().zip(&h).map(|(x, y)| a * x + b * y).collect();
        let lhs = g.forward_transform(&comb).unwrap();
        let ff = g.forward_transform(&f).unwrap();
        let fh = g.forward_transform(&h).unwrap();
        let scale: f64 = lhs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let err: f64 = lhs
            .iter()
            .zip(ff.iter().zip(&fh))
            .map(|(l, (x, y))| (l - (x * a + y * b)).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err <= 1e-13 * scale);
    }

    #[test]
    fn derivative_multiplier_matches_analytic_derivative() {
        let g = Grid::new(2, 12).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        // band-limited f = Σ a cos(k·x + φ)
        let terms: Vec<([f64; 2], f64, f64)> = (0..6)
            .map(|_| {
                let k = [rng.gen_range(-4..=4) as f64, rng.gen_range(-4..=4) as f64];
                (k, rng.gen_range(-1.0..1.0), rng.gen_range(0.0..6.0))
            })
            .collect();
        let eval = |x: [f64; 3], axis: Option<usize>| -> f64 {
            terms
                .iter()
                .map(|(k, a, p)| {
                    let arg = k[0] * x[0] + k[1] * x[1] + p;
                    match axis {
                        None => a * arg.cos(),
                        Some(j) => -a * k[j] * arg.sin(),
                    }
                })
                .sum()
        };
        let f: Vec<f64> = (0..g.len()).map(|i| eval(g.point(i), None)).collect();
        let modes = g.forward_transform(&f).unwrap();
        for axis in 0..2 {
            let df: Vec<f64> = (0..g.len()).map(|i| eval(g.point(i), Some(axis))).collect();
            let dmodes = g.forward_transform(&df).unwrap();
            for idx in 0..g.len() {
                let k = g.wavenumber(idx)[axis] as f64;
                let expect = Complex64::new(0.0, k) * modes[idx];
                assert!((dmodes[idx] - expect).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn padded_roundtrip_preserves_resolved_modes() {
        let g = Grid::new(2, 8).unwrap();
        let mut modes = g.forward_transform(&random_field(&g, 5)).unwrap();
        g.drop_nyquist(&mut modes);
        let mut phys = Vec::new();
        let mut scratch = Vec::new();
        g.to_padded_physical(&modes, &mut phys, &mut scratch);
        assert_eq!(phys.len(), 144);
        let back = g.from_padded_physical(&phys, &mut scratch);
        for (a, b) in back.iter().zip(&modes) {
            assert!((a - b).norm() < 1e-15);
        }
    }
}
