//! Vector and tensor calculus on spectral fields.
//!
//! Derivatives are Fourier multipliers `i k_j`, with the multiplier zeroed on the
//! Nyquist plane of the differentiated axis. `L²` quantities use Parseval; `L^r`
//! quantities use the rectangle rule on the base grid.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{PhysicalTensorField, SpectralField, SpectralTensorField, SpectralVectorField};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn ik(k: f64) -> Complex64 {
    Complex64::new(0.0, k)
}

/// Velocity gradient `(∇u)_ij = ∂_j u_i`.
pub fn gradient(u: &SpectralVectorField) -> SpectralTensorField {
    let g = u.grid();
    let d = g.dim();
    let mut comps = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            comps.push(
                u.component(i)
                    .iter()
                    .enumerate()
                    .map(|(idx, &z)| ik(g.derivative_wavenumber(idx, j)) * z)
                    .collect(),
            );
        }
    }
    SpectralTensorField::from_components(g, comps).expect("d*d components")
}

/// Spectral symmetric gradient `(∇u + ∇uᵀ)/2`.
pub fn strain_spectral(u: &SpectralVectorField) -> SpectralTensorField {
    let grad = gradient(u);
    let g = u.grid();
    let d = g.dim();
    let mut comps = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            comps.push(
                grad.entry(i, j)
                    .iter()
                    .zip(grad.entry(j, i))
                    .map(|(a, b)| (a + b) * 0.5)
                    .collect(),
            );
        }
    }
    SpectralTensorField::from_components(g, comps).expect("d*d components")
}

/// Strain rate `Du` sampled on the base grid; symmetric pointwise.
pub fn strain(u: &SpectralVectorField) -> Result<PhysicalTensorField> {
    strain_spectral(u).to_physical()
}

/// Row divergence `(div T)_i = Σ_j ∂_j T_ij`.
pub fn divergence_tensor(t: &SpectralTensorField) -> SpectralVectorField {
    let g = t.grid();
    let d = g.dim();
    let mut comps = vec![vec![ZERO; g.len()]; d];
    for (i, out) in comps.iter_mut().enumerate() {
        for j in 0..d {
            for (idx, (o, z)) in out.iter_mut().zip(t.entry(i, j)).enumerate() {
                *o += ik(g.derivative_wavenumber(idx, j)) * z;
            }
        }
    }
    SpectralVectorField::from_components(g, comps).expect("d components")
}

/// Scalar divergence `Σ_i ∂_i u_i`.
pub fn divergence(u: &SpectralVectorField) -> SpectralField {
    let g = u.grid();
    let mut out = vec![ZERO; g.len()];
    for i in 0..g.dim() {
        for (idx, (o, z)) in out.iter_mut().zip(u.component(i)).enumerate() {
            *o += ik(g.derivative_wavenumber(idx, i)) * z;
        }
    }
    SpectralField::from_modes(g, out).expect("grid-sized")
}

/// Gradient of a scalar field.
pub fn scalar_gradient(f: &SpectralField) -> SpectralVectorField {
    let g = f.grid();
    let comps = (0..g.dim())
        .map(|j| {
            f.modes()
                .iter()
                .enumerate()
                .map(|(idx, &z)| ik(g.derivative_wavenumber(idx, j)) * z)
                .collect()
        })
        .collect();
    SpectralVectorField::from_components(g, comps).expect("d components")
}

pub fn laplacian(u: &SpectralVectorField) -> SpectralVectorField {
    let g = u.grid().clone();
    u.map_modes(|idx, z| -z * g.stokes_eigenvalue(idx))
}

/// Leray projection `ŵ ↦ (I − kkᵀ/|k|²) ŵ` per mode; the `k = 0` mode is left alone.
pub fn leray_project(w: &SpectralVectorField) -> SpectralVectorField {
    let g = w.grid();
    let d = g.dim();
    let mut out = w.clone();
    for idx in 0..g.len() {
        let mut k = [0.0; 3];
        for (j, kj) in k.iter_mut().enumerate().take(d) {
            *kj = g.derivative_wavenumber(idx, j);
        }
        let k2: f64 = k.iter().map(|x| x * x).sum();
        if k2 == 0.0 {
            continue;
        }
        let mode = w.mode(idx);
        let mut kw = ZERO;
        for j in 0..d {
            kw += mode[j] * k[j];
        }
        let coef = kw / k2;
        let mut projected = [ZERO; 3];
        for j in 0..d {
            projected[j] = mode[j] - coef * k[j];
        }
        out.set_mode(idx, &projected[..d]);
    }
    out
}

/// Solves `(I − α₁Δ) u = v` mode by mode: `û = v̂ / (1 + α₁|k|²)`.
pub fn helmholtz_solve(v: &SpectralVectorField, alpha1: f64) -> Result<SpectralVectorField> {
    check_alpha(alpha1)?;
    let g = v.grid().clone();
    Ok(v.map_modes(|idx, z| z / (1.0 + alpha1 * g.stokes_eigenvalue(idx))))
}

/// Forms `v = u − α₁Δu`.
pub fn helmholtz_apply(u: &SpectralVectorField, alpha1: f64) -> Result<SpectralVectorField> {
    check_alpha(alpha1)?;
    let g = u.grid().clone();
    Ok(u.map_modes(|idx, z| z * (1.0 + alpha1 * g.stokes_eigenvalue(idx))))
}

fn check_alpha(alpha1: f64) -> Result<()> {
    if !(alpha1 >= 0.0 && alpha1.is_finite()) {
        return Err(Error::param(format!("alpha1 must be finite and >= 0, got {alpha1}")));
    }
    Ok(())
}

pub fn remove_mean(w: &SpectralVectorField) -> SpectralVectorField {
    let mut out = w.clone();
    for i in 0..out.dim() {
        out.component_mut(i)[0] = ZERO;
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SobolevNorms {
    /// `‖u‖_{L²}`
    pub l2: f64,
    /// `‖∇u‖_{L²}`
    pub grad_l2: f64,
    /// `‖∇²u‖_{L²}`
    pub hess_l2: f64,
    /// `‖∇u‖_{L^r}`
    pub grad_lr: f64,
}

/// `Σ_k |k|^{2p} |û(k)|²`, scaled by the box volume.
fn weighted_energy(u: &SpectralVectorField, power: i32) -> f64 {
    let g = u.grid();
    let d = g.dim();
    let mut total = 0.0;
    for c in u.components() {
        for (idx, z) in c.iter().enumerate() {
            let k2: f64 = (0..d).map(|j| g.derivative_wavenumber(idx, j).powi(2)).sum();
            total += k2.powi(power) * z.norm_sqr();
        }
    }
    g.volume() * total
}

pub fn grad_l2_sq(u: &SpectralVectorField) -> f64 {
    weighted_energy(u, 1)
}

pub fn hess_l2_sq(u: &SpectralVectorField) -> f64 {
    weighted_energy(u, 2)
}

/// `‖∇u‖_{L^r}` from the 2/3-dealiased field on the base grid.
pub fn grad_lr(u: &SpectralVectorField, r: f64) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(Error::param(format!("L^r exponent must be >= 1, got {r}")));
    }
    let g = u.grid();
    let dealiased = u.map_modes(|idx, z| if g.dealias_mask(idx) { z } else { ZERO });
    let grad = gradient(&dealiased).to_physical()?;
    let mut pointwise = vec![0.0; g.len()];
    for comp in grad.components() {
        for (p, x) in pointwise.iter_mut().zip(comp) {
            *p += x * x;
        }
    }
    pointwise.iter_mut().for_each(|p| *p = p.sqrt().powf(r));
    Ok(g.quadrature(&pointwise).powf(1.0 / r))
}

pub fn sobolev_norms(u: &SpectralVectorField, r: f64) -> Result<SobolevNorms> {
    if !(r >= 2.0) {
        return Err(Error::param(format!("r must be >= 2, got {r}")));
    }
    Ok(SobolevNorms {
        l2: u.norm_l2(),
        grad_l2: grad_l2_sq(u).sqrt(),
        hess_l2: hess_l2_sq(u).sqrt(),
        grad_lr: grad_lr(u, r)?,
    })
}

/// `‖Du‖_{L^q} / ‖∇u‖_{L^q}` on the base grid; the sampled Korn ratio.
pub fn korn_ratio(u: &SpectralVectorField, q: f64) -> Result<f64> {
    let g = u.grid();
    let grad = gradient(u).to_physical()?;
    let d = g.dim();
    let mut grad_q = vec![0.0; g.len()];
    let mut strain_q = vec![0.0; g.len()];
    for idx in 0..g.len() {
        let mut gs = 0.0;
        let mut ds = 0.0;
        for i in 0..d {
            for j in 0..d {
                let gij = grad.entry(i, j)[idx];
                let dij = 0.5 * (gij + grad.entry(j, i)[idx]);
                gs += gij * gij;
                ds += dij * dij;
            }
        }
        grad_q[idx] = gs.sqrt().powf(q);
        strain_q[idx] = ds.sqrt().powf(q);
    }
    let num = g.quadrature(&strain_q).powf(1.0 / q);
    let den = g.quadrature(&grad_q).powf(1.0 / q);
    Ok(if den == 0.0 { 0.0 } else { num / den })
}
