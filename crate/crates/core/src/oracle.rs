//! Brute-force reference implementations for tiny grids, and the exact Taylor-Green decay.
//!
//! Nothing here calls the FFT pipeline: transforms are naive DFTs, derivatives use the
//! dense periodic differentiation matrix and products are direct mode-pair sums.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::SpectralVectorField;
use crate::grid::Grid;

/// Largest grid accepted by the oracles.
pub const MAX_ORACLE_N: usize = 16;

/// Collocation samples on an `n^dim` grid, row-major with the last axis fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseField {
    pub dim: usize,
    pub n: usize,
    pub values: Vec<f64>,
}

impl DenseField {
    pub fn new(dim: usize, n: usize, values: Vec<f64>) -> Result<Self> {
        check_size(dim, n)?;
        if values.len() != n.pow(dim as u32) {
            return Err(Error::ShapeMismatch {
                expected: n.pow(dim as u32),
                actual: values.len(),
            });
        }
        Ok(DenseField { dim, n, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_size(dim: usize, n: usize) -> Result<()> {
    if !(dim == 2 || dim == 3) || n == 0 || n % 2 != 0 {
        return Err(Error::InvalidGrid(format!(
            "oracle needs dim 2 or 3 and even n, got {dim}, {n}"
        )));
    }
    if n > MAX_ORACLE_N {
        return Err(Error::InvalidGrid(format!(
            "oracle grid too large: n = {n} > {MAX_ORACLE_N}"
        )));
    }
    Ok(())
}

/// Multi-index of flat position `idx` (last axis fastest).
fn multi_index(idx: usize, dim: usize, n: usize) -> [usize; 3] {
    let mut out = [0; 3];
    let mut rest = idx;
    for axis in (0..dim).rev() {
        out[axis] = rest % n;
        rest /= n;
    }
    out
}

fn flat_index(m: &[usize; 3], dim: usize, n: usize) -> usize {
    (0..dim).fold(0, |acc, a| acc * n + m[a])
}

/// Signed wavenumber carried by position `j` along one axis.
fn signed(j: usize, n: usize) -> i64 {
    if j <= n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

fn wavevector(idx: usize, dim: usize, n: usize) -> [i64; 3] {
    let m = multi_index(idx, dim, n);
    let mut k = [0; 3];
    for a in 0..dim {
        k[a] = signed(m[a], n);
    }
    k
}

fn is_resolved(k: &[i64; 3], dim: usize, n: usize) -> bool {
    k[..dim].iter().all(|&x| x.abs() < (n / 2) as i64)
}

/// `e^{2πij/n}` for `j = 0..n`; every phase `k·x` on the grid is one of these.
fn twiddles(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64))
        .collect()
}

/// `(k·m) mod n`, the phase index of mode `k` at grid point `m`.
fn phase_index(k: &[i64; 3], m: &[usize; 3], dim: usize, n: usize) -> usize {
    let p: i64 = (0..dim).map(|a| k[a] * m[a] as i64).sum();
    p.rem_euclid(n as i64) as usize
}

/// `f̂_k = N⁻¹ Σ_x f(x) e^{−ik·x}` by direct summation.
pub fn oracle_dft(f: &DenseField) -> Vec<Complex64> {
    let (dim, n) = (f.dim, f.n);
    let total = f.len();
    let tw = twiddles(n);
    let points: Vec<[usize; 3]> = (0..total).map(|x| multi_index(x, dim, n)).collect();
    (0..total)
        .map(|kidx| {
            let k = wavevector(kidx, dim, n);
            let mut s = Complex64::new(0.0, 0.0);
            for (m, &val) in points.iter().zip(&f.values) {
                s += tw[phase_index(&k, m, dim, n)].conj() * val;
            }
            s / total as f64
        })
        .collect()
}

/// `f(x) = Re Σ_k f̂_k e^{ik·x}` by direct summation.
pub fn oracle_inverse_dft(modes: &[Complex64], dim: usize, n: usize) -> Result<DenseField> {
    check_size(dim, n)?;
    let total = n.pow(dim as u32);
    let tw = twiddles(n);
    let ks: Vec<[i64; 3]> = (0..total).map(|k| wavevector(k, dim, n)).collect();
    let values = (0..total)
        .map(|xidx| {
            let m = multi_index(xidx, dim, n);
            let mut s = 0.0;
            for (k, c) in ks.iter().zip(modes) {
                s += (c * tw[phase_index(k, &m, dim, n)]).re;
            }
            s
        })
        .collect();
    DenseField::new(dim, n, values)
}

/// Rectangle rule `(2π/n)^d Σ f`.
pub fn oracle_quadrature(f: &DenseField) -> f64 {
    let cell = (2.0 * PI / f.n as f64).powi(f.dim as i32);
    cell * f.values.iter().sum::<f64>()
}

/// Dense periodic differentiation matrix `D_jl = ½(−1)^{j−l} cot((j−l)h/2)`, `D_jj = 0`.
pub fn differentiation_matrix(n: usize) -> Vec<Vec<f64>> {
    let h = 2.0 * PI / n as f64;
    (0..n)
        .map(|j| {
            (0..n)
                .map(|l| {
                    if j == l {
                        0.0
                    } else {
                        let diff = j as i64 - l as i64;
                        let sign = if diff.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
                        0.5 * sign / (diff as f64 * h / 2.0).tan()
                    }
                })
                .collect()
        })
        .collect()
}

/// `∂_axis f` by applying the dense matrix along one axis.
pub fn oracle_derivative(f: &DenseField, axis: usize) -> DenseField {
    let (dim, n) = (f.dim, f.n);
    let d = differentiation_matrix(n);
    let values = (0..f.len())
        .map(|idx| {
            let m = multi_index(idx, dim, n);
            let mut s = 0.0;
            for (l, dl) in d[m[axis]].iter().enumerate() {
                let mut ml = m;
                ml[axis] = l;
                s += dl * f.values[flat_index(&ml, dim, n)];
            }
            s
        })
        .collect();
    DenseField { dim, n, values }
}

/// Product of two mode arrays as a direct double sum over all resolved pairs, truncated
/// to the resolved modes `|k_i| < n/2`.
pub fn oracle_convolution(a: &[Complex64], b: &[Complex64], dim: usize, n: usize) -> Result<Vec<Complex64>> {
    check_size(dim, n)?;
    let total = n.pow(dim as u32);
    if a.len() != total || b.len() != total {
        return Err(Error::ShapeMismatch {
            expected: total,
            actual: a.len().min(b.len()),
        });
    }
    let mut out = vec![Complex64::new(0.0, 0.0); total];
    let half = (n / 2) as i64;
    for (i, &ca) in a.iter().enumerate() {
        let ka = wavevector(i, dim, n);
        if !is_resolved(&ka, dim, n) || ca == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (j, &cb) in b.iter().enumerate() {
            let kb = wavevector(j, dim, n);
            if !is_resolved(&kb, dim, n) {
                continue;
            }
            let mut m = [0usize; 3];
            let mut inside = true;
            for axis in 0..dim {
                let k = ka[axis] + kb[axis];
                if k.abs() >= half {
                    inside = false;
                    break;
                }
                m[axis] = k.rem_euclid(n as i64) as usize;
            }
            if inside {
                out[flat_index(&m, dim, n)] += ca * cb;
            }
        }
    }
    Ok(out)
}

/// Dense copy of a vector field's physical components (via the oracle inverse DFT).
pub fn dense_components(u: &SpectralVectorField) -> Result<Vec<DenseField>> {
    let g = u.grid();
    (0..u.dim())
        .map(|i| oracle_inverse_dft(u.component(i), g.dim(), g.n()))
        .collect()
}

/// `∂_j u_i` on the collocation grid, entry `(i, j)` at `i·d + j`.
pub fn oracle_gradient(u: &[DenseField]) -> Vec<DenseField> {
    let d = u.len();
    let mut out = Vec::with_capacity(d * d);
    for ui in u {
        for j in 0..d {
            out.push(oracle_derivative(ui, j));
        }
    }
    out
}

pub fn oracle_divergence(u: &[DenseField]) -> DenseField {
    let mut out = oracle_derivative(&u[0], 0);
    for (j, uj) in u.iter().enumerate().skip(1) {
        let dj = oracle_derivative(uj, j);
        out.values.iter_mut().zip(&dj.values).for_each(|(a, b)| *a += b);
    }
    out
}

/// `(u·∇)v` as truncated convolutions of `û_j` with the transform of `∂_j v_i`.
pub fn oracle_convect(u: &[DenseField], v: &[DenseField]) -> Result<Vec<Vec<Complex64>>> {
    let d = u.len();
    let (dim, n) = (u[0].dim, u[0].n);
    let uhat: Vec<_> = u.iter().map(oracle_dft).collect();
    let gv = oracle_gradient(v);
    (0..d)
        .map(|i| {
            let mut acc = vec![Complex64::new(0.0, 0.0); u[0].len()];
            for j in 0..d {
                let c = oracle_convolution(&uhat[j], &oracle_dft(&gv[i * d + j]), dim, n)?;
                acc.iter_mut().zip(&c).for_each(|(a, b)| *a += b);
            }
            Ok(acc)
        })
        .collect()
}

/// `Σ_j v_j ∂_i u_j` as truncated convolutions.
pub fn oracle_stretch(u: &[DenseField], v: &[DenseField]) -> Result<Vec<Vec<Complex64>>> {
    let d = u.len();
    let (dim, n) = (u[0].dim, u[0].n);
    let vhat: Vec<_> = v.iter().map(oracle_dft).collect();
    let gu = oracle_gradient(u);
    (0..d)
        .map(|i| {
            let mut acc = vec![Complex64::new(0.0, 0.0); u[0].len()];
            for j in 0..d {
                let c = oracle_convolution(&vhat[j], &oracle_dft(&gu[j * d + i]), dim, n)?;
                acc.iter_mut().zip(&c).for_each(|(a, b)| *a += b);
            }
            Ok(acc)
        })
        .collect()
}

/// Leray projection mode by mode from the oracle DFT; Nyquist components of `k` count as 0,
/// matching the dense differentiation matrix.
pub fn oracle_leray(w: &[DenseField]) -> Vec<Vec<Complex64>> {
    let d = w.len();
    let (dim, n) = (w[0].dim, w[0].n);
    let what: Vec<_> = w.iter().map(oracle_dft).collect();
    let mut out = what.clone();
    for idx in 0..w[0].len() {
        let mut k = [0.0; 3];
        for (a, x) in wavevector(idx, dim, n).iter().take(dim).enumerate() {
            k[a] = if *x == (n / 2) as i64 { 0.0 } else { *x as f64 };
        }
        let k2: f64 = k.iter().map(|x| x * x).sum();
        if k2 == 0.0 {
            continue;
        }
        let kw: Complex64 = (0..d).map(|j| what[j][idx] * k[j]).sum();
        for j in 0..d {
            out[j][idx] = what[j][idx] - kw * (k[j] / k2);
        }
    }
    out
}

/// Decay rate `μ_eff / (1 + 2α₁)` of the Taylor-Green vortex under the linear law.
pub fn taylor_green_rate(mu_eff: f64, alpha1: f64) -> f64 {
    mu_eff / (1.0 + 2.0 * alpha1)
}

/// `A e^{−σt}(sin x₁ cos x₂, −cos x₁ sin x₂)` on a 2D grid.
pub fn taylor_green_exact(
    grid: &Arc<Grid>,
    t: f64,
    mu_eff: f64,
    alpha1: f64,
    amplitude: f64,
) -> Result<SpectralVectorField> {
    if grid.dim() != 2 {
        return Err(Error::param("the exact Taylor-Green solution is two-dimensional"));
    }
    let a = amplitude * (-taylor_green_rate(mu_eff, alpha1) * t).exp();
    let n = grid.n();
    let h = 2.0 * PI / n as f64;
    let mut u1 = Vec::with_capacity(n * n);
    let mut u2 = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (i as f64 * h, j as f64 * h);
            u1.push(a * x.sin() * y.cos());
            u2.push(-a * x.cos() * y.sin());
        }
    }
    let modes = vec![
        oracle_dft(&DenseField { dim: 2, n, values: u1 }),
        oracle_dft(&DenseField { dim: 2, n, values: u2 }),
    ];
    SpectralVectorField::from_components(grid, modes)
}

/// Worst relative disagreement of each pipeline operation with its oracle.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct OracleReport {
    pub fields: usize,
    pub convect: f64,
    pub stretch: f64,
    pub gradient: f64,
    pub divergence: f64,
    pub leray: f64,
}

impl OracleReport {
    pub fn worst(&self) -> f64 {
        [self.convect, self.stretch, self.gradient, self.divergence, self.leray]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

fn rel_modes(got: &[Vec<Complex64>], want: &[Vec<Complex64>]) -> f64 {
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for (g, w) in got.iter().zip(want) {
        for (a, b) in g.iter().zip(w) {
            diff = diff.max((a - b).norm());
            scale = scale.max(b.norm());
        }
    }
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

fn rel_values(got: &[Vec<f64>], want: &[&DenseField]) -> f64 {
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for (g, w) in got.iter().zip(want) {
        for (a, b) in g.iter().zip(&w.values) {
            diff = diff.max((a - b).abs());
            scale = scale.max(b.abs());
        }
    }
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Random smooth field: random modes on the resolved lattice, made real by symmetrization.
/// It is generally not divergence-free.
pub fn random_resolved_field(grid: &Arc<Grid>, seed: u64) -> SpectralVectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (dim, n) = (grid.dim(), grid.n());
    let values: Vec<Vec<f64>> = (0..dim)
        .map(|_| (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let comps = values
        .into_iter()
        .map(|v| {
            let mut modes = oracle_dft(&DenseField { dim, n, values: v });
            for (idx, m) in modes.iter_mut().enumerate() {
                if !is_resolved(&wavevector(idx, dim, n), dim, n) {
                    *m = Complex64::new(0.0, 0.0);
                }
            }
            modes
        })
        .collect();
    SpectralVectorField::from_components(grid, comps).expect("dim components")
}

/// Compares the spectral pipeline with the oracles on `fields` random fields.
pub fn oracle_suite(grid: &Arc<Grid>, fields: usize, seed: u64) -> Result<OracleReport> {
    use crate::field_ops::{divergence, gradient, leray_project};
    use crate::init::random_band;
    use crate::nonlinear::{convect, stretch};

    check_size(grid.dim(), grid.n())?;
    let d = grid.dim();
    let kmax = grid.n() as f64 / 2.0;
    let mut report = OracleReport {
        fields,
        ..Default::default()
    };
    for s in 0..fields as u64 {
        let base = seed.wrapping_mul(1000).wrapping_add(3 * s);
        let u = random_band(grid, 1.0, kmax, 1.0, base);
        let v = random_resolved_field(grid, base + 1);
        let w = random_resolved_field(grid, base + 2);
        let du = dense_components(&u)?;
        let dv = dense_components(&v)?;
        let dw = dense_components(&w)?;

        let c = convect(&u, &v)?;
        report.convect = report
            .convect
            .max(rel_modes(c.components(), &oracle_convect(&du, &dv)?));
        let st = stretch(&w, &v);
        report.stretch = report
            .stretch
            .max(rel_modes(st.components(), &oracle_stretch(&dw, &dv)?));

        let grad = gradient(&w).to_physical()?;
        let og = oracle_gradient(&dw);
        let want: Vec<&DenseField> = og.iter().collect();
        report.gradient = report.gradient.max(rel_values(grad.components(), &want));

        let div = divergence(&w).to_physical()?;
        let od = oracle_divergence(&dw);
        report.divergence = report.divergence.max(rel_values(&[div], &[&od]));

        let p = leray_project(&w);
        report.leray = report.leray.max(rel_modes(p.components(), &oracle_leray(&dw)));
        debug_assert_eq!(p.dim(), d);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    fn dense(dim: usize, n: usize, f: impl Fn([f64; 3]) -> f64) -> DenseField {
        let h = 2.0 * PI / n as f64;
        let values = (0..n.pow(dim as u32))
            .map(|idx| {
                let m = multi_index(idx, dim, n);
                f([m[0] as f64 * h, m[1] as f64 * h, m[2] as f64 * h])
            })
            .collect();
        DenseField::new(dim, n, values).unwrap()
    }

    #[test]
    fn quadrature_examples() {
        let c = dense(3, 8, |_| 2.5);
        assert!((oracle_quadrature(&c) - 2.5 * (2.0 * PI).powi(3)).abs() < 1e-11);
        let s = dense(2, 8, |x| x[0].sin().powi(2));
        assert!((oracle_quadrature(&s) - 2.0 * PI * PI).abs() < 1e-12);
        // Parseval
        let f = dense(2, 8, |x| (x[0] + 2.0 * x[1]).cos() + 0.5 * x[1].sin());
        let sq = DenseField::new(2, 8, f.values.iter().map(|v| v * v).collect()).unwrap();
        let modes = oracle_dft(&f);
        let parseval = 4.0 * PI * PI * modes.iter().map(|c| c.norm_sqr()).sum::<f64>();
        assert!((oracle_quadrature(&sq) - parseval).abs() < 1e-11);
    }

    #[test]
    fn derivative_examples() {
        let f = dense(2, 12, |x| x[1].sin());
        let df = oracle_derivative(&f, 1);
        let want = dense(2, 12, |x| x[1].cos());
        assert!(df.values.iter().zip(&want.values).all(|(a, b)| (a - b).abs() < 1e-13));
        let c = dense(2, 8, |_| 3.0);
        assert!(oracle_derivative(&c, 0).values.iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn dft_roundtrip() {
        let f = dense(3, 8, |x| (x[0] - x[2]).sin() * x[1].cos());
        let back = oracle_inverse_dft(&oracle_dft(&f), 3, 8).unwrap();
        assert!(f.values.iter().zip(&back.values).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn convolution_examples() {
        let (dim, n) = (2, 8);
        let total = n * n;
        let at = |k: [i64; 2]| flat_index(&[k[0].rem_euclid(8) as usize, k[1].rem_euclid(8) as usize, 0], dim, n);
        let mut a = vec![Complex64::new(0.0, 0.0); total];
        let mut b = a.clone();
        a[at([1, 2])] = Complex64::new(2.0, 0.0);
        b[at([-2, 1])] = Complex64::new(0.0, 3.0);
        let c = oracle_convolution(&a, &b, dim, n).unwrap();
        for (idx, z) in c.iter().enumerate() {
            let want = if idx == at([-1, 3]) {
                Complex64::new(0.0, 6.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            assert_eq!(*z, want);
        }
        let zero = vec![Complex64::new(0.0, 0.0); total];
        assert!(oracle_convolution(&zero, &b, dim, n)
            .unwrap()
            .iter()
            .all(|z| z.norm() == 0.0));
        assert!(oracle_convolution(&a, &b, 2, 32).is_err());
    }

    #[test]
    fn taylor_green_exact_examples() {
        assert!((taylor_green_rate(1.0, 0.25) - 2.0 / 3.0).abs() < 1e-15);
        assert!(((-taylor_green_rate(1.0, 0.25)).exp() - 0.513417).abs() < 1e-6);
        let g = make_grid(2, 8).unwrap();
        let u0 = taylor_green_exact(&g, 0.0, 1.0, 0.25, 1.5).unwrap();
        let k = g.index_of(&[1, 1]).unwrap();
        // sin x cos y has coefficient −i/4 on (1, 1)
        assert!((u0.component(0)[k] - Complex64::new(0.0, -1.5 / 4.0)).norm() < 1e-14);
        assert!(taylor_green_exact(&make_grid(3, 8).unwrap(), 0.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn pipeline_agrees_with_oracles() {
        for (dim, n) in [(2, 8), (2, 12), (3, 8)] {
            let g = make_grid(dim, n).unwrap();
            let rep = oracle_suite(&g, 3, 11).unwrap();
            assert!(rep.worst() < 1e-11, "{dim}D n={n}: {rep:?}");
        }
        assert!(oracle_suite(&make_grid(2, 32).unwrap(), 1, 0).is_err());
    }
}
