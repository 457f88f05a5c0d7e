//! Convective and stretching nonlinearities and the projected momentum right-hand side.
//!
//! Quadratic products are formed on the 3/2-padded grid and truncated back to the
//! resolved lattice, which makes them equal to the exact Galerkin convolution.
//! The stress is evaluated pointwise on the same padded grid.

use std::sync::Arc;

use num_complex::Complex64;

use crate::constitutive::ConstitutiveLaw;
use crate::error::{Error, Result};
use crate::field::SpectralVectorField;
use crate::field_ops::{helmholtz_apply, leray_project};
use crate::grid::Grid;
use crate::tensor::Tensor2;

/// Divergence accepted by [`convect`], relative to the coefficient norm of `u`.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Reusable padded-grid scratch space for one evaluation stream.
pub struct NonlinearWorkspace {
    grid: Arc<Grid>,
    scratch: Vec<Complex64>,
}

/// Physical samples on the padded grid.
pub type Padded = Vec<f64>;

impl NonlinearWorkspace {
    pub fn new(grid: &Arc<Grid>) -> Self {
        NonlinearWorkspace {
            grid: grid.clone(),
            scratch: Vec::with_capacity(grid.padded_len()),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn to_padded(&mut self, modes: &[Complex64]) -> Padded {
        let mut out = Vec::with_capacity(self.grid.padded_len());
        self.grid.to_padded_physical(modes, &mut out, &mut self.scratch);
        out
    }

    pub fn from_padded(&mut self, values: &[f64]) -> Vec<Complex64> {
        self.grid.from_padded_physical(values, &mut self.scratch)
    }

    fn derivative(&self, modes: &[Complex64], axis: usize) -> Vec<Complex64> {
        let g = &self.grid;
        modes
            .iter()
            .enumerate()
            .map(|(idx, &z)| Complex64::new(0.0, g.derivative_wavenumber(idx, axis)) * z)
            .collect()
    }

    /// Components of `u` on the padded grid.
    pub fn padded_field(&mut self, u: &SpectralVectorField) -> Vec<Padded> {
        (0..u.dim()).map(|i| self.to_padded(u.component(i))).collect()
    }

    /// `∂_j u_i` on the padded grid, entry `(i, j)` at `i·d + j`.
    pub fn padded_gradient(&mut self, u: &SpectralVectorField) -> Vec<Padded> {
        let d = u.dim();
        let mut out = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let dij = self.derivative(u.component(i), j);
                out.push(self.to_padded(&dij));
            }
        }
        out
    }

    /// Truncated spectral product of two resolved scalar fields.
    pub fn product(&mut self, a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        let pa = self.to_padded(a);
        let pb = self.to_padded(b);
        let prod: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();
        self.from_padded(&prod)
    }

    fn assemble(&mut self, comps: Vec<Padded>) -> SpectralVectorField {
        let spectral = comps.iter().map(|c| self.from_padded(c)).collect();
        SpectralVectorField::from_components(&self.grid, spectral).expect("d components")
    }

    /// `Σ_j a_j · grad[(i, j)]` per component `i`.
    fn contract_second(&self, a: &[Padded], grad: &[Padded]) -> Vec<Padded> {
        let d = a.len();
        (0..d)
            .map(|i| {
                let mut acc = vec![0.0; self.grid.padded_len()];
                for j in 0..d {
                    for ((s, x), y) in acc.iter_mut().zip(&a[j]).zip(&grad[i * d + j]) {
                        *s += x * y;
                    }
                }
                acc
            })
            .collect()
    }

    /// `Σ_j a_j · grad[(j, i)]` per component `i`.
    fn contract_first(&self, a: &[Padded], grad: &[Padded]) -> Vec<Padded> {
        let d = a.len();
        (0..d)
            .map(|i| {
                let mut acc = vec![0.0; self.grid.padded_len()];
                for j in 0..d {
                    for ((s, x), y) in acc.iter_mut().zip(&a[j]).zip(&grad[j * d + i]) {
                        *s += x * y;
                    }
                }
                acc
            })
            .collect()
    }

    /// `(u·∇)v`; requires divergence-free `u`.
    pub fn convect(&mut self, u: &SpectralVectorField, v: &SpectralVectorField) -> Result<SpectralVectorField> {
        check_solenoidal(u)?;
        Ok(self.convect_unchecked(u, v))
    }

    pub fn convect_unchecked(&mut self, u: &SpectralVectorField, v: &SpectralVectorField) -> SpectralVectorField {
        let pu = self.padded_field(u);
        let gv = self.padded_gradient(v);
        let comps = self.contract_second(&pu, &gv);
        self.assemble(comps)
    }

    /// `Σ_j v_j ∇u_j`.
    pub fn stretch(&mut self, u: &SpectralVectorField, v: &SpectralVectorField) -> SpectralVectorField {
        let pv = self.padded_field(v);
        let gu = self.padded_gradient(u);
        let comps = self.contract_first(&pv, &gu);
        self.assemble(comps)
    }

    /// `(u·∇)v + Σ_j v_j ∇u_j` sharing the padded transforms.
    pub fn nonlinear_terms(&mut self, u: &SpectralVectorField, v: &SpectralVectorField) -> Result<SpectralVectorField> {
        check_solenoidal(u)?;
        let pu = self.padded_field(u);
        let pv = self.padded_field(v);
        let gu = self.padded_gradient(u);
        let gv = self.padded_gradient(v);
        let mut comps = self.contract_second(&pu, &gv);
        for (c, s) in comps.iter_mut().zip(self.contract_first(&pv, &gu)) {
            c.iter_mut().zip(&s).for_each(|(a, b)| *a += b);
        }
        Ok(self.assemble(comps))
    }

    /// `S(Du)` sampled on the padded grid from a padded gradient, entry `(i, j)` at `i·d + j`.
    pub fn padded_stress(&self, law: &ConstitutiveLaw, grad: &[Padded], d: usize) -> Vec<Padded> {
        let len = self.grid.padded_len();
        let mut out = vec![vec![0.0; len]; d * d];
        for p in 0..len {
            let strain = padded_strain_at(grad, d, p);
            let s = law.stress_unchecked(&strain);
            for i in 0..d {
                for j in 0..d {
                    out[i * d + j][p] = s.get(i, j);
                }
            }
        }
        out
    }

    /// `div S(Du)` with `S` evaluated on the padded grid.
    pub fn stress_divergence(&mut self, u: &SpectralVectorField, law: &ConstitutiveLaw) -> SpectralVectorField {
        let gu = self.padded_gradient(u);
        self.stress_divergence_from(&gu, law, u.dim())
    }

    fn stress_divergence_from(&mut self, grad: &[Padded], law: &ConstitutiveLaw, d: usize) -> SpectralVectorField {
        let stress = self.padded_stress(law, grad, d);
        let mut spectral: Vec<Vec<Complex64>> = vec![Vec::new(); d * d];
        for i in 0..d {
            for j in i..d {
                let s = self.from_padded(&stress[i * d + j]);
                if i != j {
                    spectral[j * d + i] = s.clone();
                }
                spectral[i * d + j] = s;
            }
        }
        let comps = (0..d)
            .map(|i| {
                let mut acc = vec![ZERO; self.grid.len()];
                for j in 0..d {
                    for (a, b) in acc.iter_mut().zip(self.derivative(&spectral[i * d + j], j)) {
                        *a += b;
                    }
                }
                acc
            })
            .collect();
        SpectralVectorField::from_components(&self.grid, comps).expect("d components")
    }

    /// `P(f − (u·∇)v − Σ_j v_j∇u_j + div S(Du))` with `v = u − α₁Δu`.
    ///
    /// `law = None` drops the stress term entirely.
    pub fn momentum_rhs(
        &mut self,
        u: &SpectralVectorField,
        f: Option<&SpectralVectorField>,
        law: Option<&ConstitutiveLaw>,
        alpha1: f64,
    ) -> Result<SpectralVectorField> {
        check_solenoidal(u)?;
        let d = u.dim();
        let v = helmholtz_apply(u, alpha1)?;
        let pu = self.padded_field(u);
        let pv = self.padded_field(&v);
        let gu = self.padded_gradient(u);
        let gv = self.padded_gradient(&v);
        let mut comps = self.contract_second(&pu, &gv);
        for (c, s) in comps.iter_mut().zip(self.contract_first(&pv, &gu)) {
            c.iter_mut().zip(&s).for_each(|(a, b)| *a += b);
        }
        let nonlinear = self.assemble(comps);
        let mut total = match f {
            Some(f) => f.sub(&nonlinear),
            None => nonlinear.scaled(-1.0),
        };
        if let Some(law) = law {
            total.axpy(1.0, &self.stress_divergence_from(&gu, law, d));
        }
        let mut out = leray_project(&total);
        for i in 0..d {
            out.component_mut(i)[0] = ZERO;
        }
        Ok(out)
    }

    /// Relative mismatch between the direct nonlinear terms and the expanded form
    ///
    /// `(u·∇)u − α₁Σ∂_jk(u_j∂_k u) + α₁Σ∂_j(∂_k u_j ∂_k u) − α₁Σ∂_k(∂_k u_j ∇u_j) + ∇(½|u|² + ½α₁|∇u|²)`,
    /// compared after Leray projection.
    pub fn expansion_consistency(&mut self, u: &SpectralVectorField, alpha1: f64) -> Result<f64> {
        let g = self.grid.clone();
        let d = u.dim();
        let v = helmholtz_apply(u, alpha1)?;
        let direct = self.nonlinear_terms(u, &v)?;

        let du: Vec<Vec<Vec<Complex64>>> = (0..d)
            .map(|j| (0..d).map(|k| self.derivative(u.component(j), k)).collect())
            .collect();
        let mut expanded = self.convect_unchecked(u, u);
        let mut chains = vec![vec![ZERO; g.len()]; d];
        for j in 0..d {
            for k in 0..d {
                for i in 0..d {
                    // −∂_jk(u_j ∂_k u_i)
                    let a = self.product(u.component(j), &du[i][k]);
                    let a = self.derivative(&self.derivative(&a, k), j);
                    // +∂_j(∂_k u_j ∂_k u_i)
                    let b = self.product(&du[j][k], &du[i][k]);
                    let b = self.derivative(&b, j);
                    // −∂_k(∂_k u_j ∂_i u_j)
                    let c = self.product(&du[j][k], &du[j][i]);
                    let c = self.derivative(&c, k);
                    for (idx, acc) in chains[i].iter_mut().enumerate() {
                        *acc += -a[idx] + b[idx] - c[idx];
                    }
                }
            }
        }
        let mut potential = vec![ZERO; g.len()];
        for j in 0..d {
            let uu = self.product(u.component(j), u.component(j));
            potential.iter_mut().zip(&uu).for_each(|(p, x)| *p += x * 0.5);
            for k in 0..d {
                let gg = self.product(&du[j][k], &du[j][k]);
                potential
                    .iter_mut()
                    .zip(&gg)
                    .for_each(|(p, x)| *p += x * (0.5 * alpha1));
            }
        }
        for (i, chain) in chains.iter().enumerate() {
            let grad_i = self.derivative(&potential, i);
            for (idx, e) in expanded.component_mut(i).iter_mut().enumerate() {
                *e += chain[idx] * alpha1 + grad_i[idx];
            }
        }
        let lhs = leray_project(&direct);
        let rhs = leray_project(&expanded);
        let scale = direct.coefficient_norm() + expanded.coefficient_norm();
        Ok(if scale == 0.0 {
            0.0
        } else {
            lhs.sub(&rhs).coefficient_norm() / scale
        })
    }
}

/// Symmetric part of the padded gradient at padded point `p`.
pub fn padded_strain_at(grad: &[Padded], d: usize, p: usize) -> Tensor2 {
    Tensor2::from_fn(d, |i, j| 0.5 * (grad[i * d + j][p] + grad[j * d + i][p]))
}

fn check_solenoidal(u: &SpectralVectorField) -> Result<()> {
    let residual = u.max_divergence();
    let norm = u.coefficient_norm();
    if residual > DIVERGENCE_TOLERANCE * norm {
        return Err(Error::NotDivergenceFree { residual, norm });
    }
    Ok(())
}

/// `(u·∇)v`; `u` must be divergence-free.
pub fn convect(u: &SpectralVectorField, v: &SpectralVectorField) -> Result<SpectralVectorField> {
    NonlinearWorkspace::new(u.grid()).convect(u, v)
}

/// `Σ_j v_j ∇u_j`.
pub fn stretch(u: &SpectralVectorField, v: &SpectralVectorField) -> SpectralVectorField {
    NonlinearWorkspace::new(u.grid()).stretch(u, v)
}

pub fn momentum_rhs(
    u: &SpectralVectorField,
    f: &SpectralVectorField,
    law: &ConstitutiveLaw,
    alpha1: f64,
) -> Result<SpectralVectorField> {
    NonlinearWorkspace::new(u.grid()).momentum_rhs(u, Some(f), Some(law), alpha1)
}

pub fn expansion_consistency(u: &SpectralVectorField, alpha1: f64) -> Result<f64> {
    NonlinearWorkspace::new(u.grid()).expansion_consistency(u, alpha1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_ops::{divergence_tensor, strain_spectral};
    use crate::grid::make_grid;
    use crate::init::{random_band, shear, taylor_green};
    use proptest::prelude::*;

    fn rel(a: &SpectralVectorField, b: &SpectralVectorField) -> f64 {
        a.sub(b).coefficient_norm() / b.coefficient_norm().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn trivial_inputs() {
        let g = make_grid(2, 8).unwrap();
        let z = SpectralVectorField::zeros(&g);
        let u = random_band(&g, 1.0, 3.0, 1.0, 1);
        assert_eq!(convect(&z, &u).unwrap().coefficient_norm(), 0.0);
        assert_eq!(convect(&u, &z).unwrap().coefficient_norm(), 0.0);
        assert_eq!(stretch(&u, &z).coefficient_norm(), 0.0);
        let law = ConstitutiveLaw::new(1.0, 1.0, 3.0).unwrap();
        assert_eq!(momentum_rhs(&z, &z, &law, 0.3).unwrap().coefficient_norm(), 0.0);
        assert_eq!(expansion_consistency(&z, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn shear_examples() {
        let g = make_grid(2, 16).unwrap();
        let u = shear(&g);
        let v = u.scaled(2.0);
        assert!(convect(&u, &v).unwrap().coefficient_norm() < 1e-15);
        let s = stretch(&u, &v).to_physical().unwrap();
        for idx in 0..g.len() {
            let x = g.point(idx);
            assert!(s[0][idx].abs() < 1e-14);
            assert!((s[1][idx] - (2.0 * x[1]).sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_compressible_velocity() {
        let g = make_grid(2, 8).unwrap();
        let u = SpectralVectorField::from_fn(&g, |x| [x[0].sin(), 0.0, 0.0]);
        assert!(matches!(convect(&u, &u), Err(Error::NotDivergenceFree { .. })));
    }

    #[test]
    fn taylor_green_terms_are_gradients() {
        for dim in [2, 3] {
            let g = make_grid(dim, 16).unwrap();
            let u = taylor_green(&g, 1.3);
            let v = u.scaled(1.5);
            let p = leray_project(&stretch(&u, &v));
            assert!(p.coefficient_norm() < 1e-14);
            if dim == 2 {
                let c = leray_project(&convect(&u, &v).unwrap());
                assert!(c.coefficient_norm() < 1e-14);
            }
        }
    }

    #[test]
    fn taylor_green_linear_rhs() {
        let g = make_grid(2, 16).unwrap();
        let u = taylor_green(&g, 0.7);
        let law = ConstitutiveLaw::new(1.5, 0.0, 3.0).unwrap();
        let rhs = momentum_rhs(&u, &SpectralVectorField::zeros(&g), &law, 0.25).unwrap();
        assert!(rel(&rhs, &u.scaled(-1.5)) < 1e-13);
    }

    #[test]
    fn manufactured_steady_state() {
        let g = make_grid(2, 16).unwrap();
        let u = random_band(&g, 1.0, 4.0, 0.8, 3);
        let law = ConstitutiveLaw::new(1.0, 2.0, 4.0).unwrap();
        let mut ws = NonlinearWorkspace::new(&g);
        let v = helmholtz_apply(&u, 0.2).unwrap();
        let f = leray_project(&ws.nonlinear_terms(&u, &v).unwrap().sub(&ws.stress_divergence(&u, &law)));
        let rhs = momentum_rhs(&u, &f, &law, 0.2).unwrap();
        assert!(rhs.coefficient_norm() < 1e-11 * f.coefficient_norm());
    }

    #[test]
    fn linear_stress_divergence_is_laplacian() {
        let g = make_grid(3, 8).unwrap();
        let u = random_band(&g, 1.0, 3.0, 1.0, 8);
        let law = ConstitutiveLaw::new(2.0, 0.0, 3.0).unwrap();
        let got = NonlinearWorkspace::new(&g).stress_divergence(&u, &law);
        let expect = divergence_tensor(&strain_spectral(&u)).scaled(2.0);
        assert!(rel(&got, &expect) < 1e-13);
    }

    #[test]
    fn energy_neutrality() {
        for (dim, n) in [(2, 16), (3, 8)] {
            let g = make_grid(dim, n).unwrap();
            for seed in 0..5 {
                let u = random_band(&g, 1.0, n as f64 / 2.0, 1.0, seed);
                let v = helmholtz_apply(&u, 0.1 * seed as f64).unwrap();
                let mut ws = NonlinearWorkspace::new(&g);
                let c = ws.convect(&u, &v).unwrap();
                let s = ws.stretch(&u, &v);
                let scale = c.norm_l2() * u.norm_l2() + s.norm_l2() * u.norm_l2();
                assert!((c.inner(&u) + s.inner(&u)).abs() < 1e-12 * scale);
            }
        }
    }

    #[test]
    fn expansion_matches_direct_form() {
        let g = make_grid(3, 8).unwrap();
        let u = random_band(&g, 1.0, 4.0, 1.0, 2);
        assert!(expansion_consistency(&u, 0.6).unwrap() < 1e-11);
        let g = make_grid(2, 8).unwrap();
        let single = SpectralVectorField::from_fn(&g, |x| [(x[0] + x[1]).sin(), -(x[0] + x[1]).sin(), 0.0]);
        assert!(expansion_consistency(&single, 1.0).unwrap() < 1e-12);
    }

    #[test]
    fn stress_aliasing_shrinks_with_resolution() {
        // the same band-limited field on three grids; the finest serves as reference.
        // |D| has kinks where D vanishes, so the decay is algebraic, not spectral
        let law = ConstitutiveLaw::new(1.0, 1.0, 3.5).unwrap();
        let field = |g: &Arc<Grid>| taylor_green(g, 1.0).add(&shear(g).scaled(0.5));
        let reference_grid = make_grid(2, 64).unwrap();
        let reference = NonlinearWorkspace::new(&reference_grid).stress_divergence(&field(&reference_grid), &law);
        let error = |n: usize| {
            let g = make_grid(2, n).unwrap();
            let s = NonlinearWorkspace::new(&g).stress_divergence(&field(&g), &law);
            let mut worst = 0.0f64;
            for idx in (0..g.len()).filter(|&i| g.is_resolved(i)) {
                let k = g.wavenumber(idx);
                let fi = reference_grid.index_of(&k[..2]).unwrap();
                for i in 0..2 {
                    worst = worst.max((reference.component(i)[fi] - s.component(i)[idx]).norm());
                }
            }
            worst / reference.max_mode_magnitude()
        };
        let (e16, e32) = (error(16), error(32));
        assert!(
            e16 < 1e-2 && e32 < 0.5 * e16,
            "aliasing error n=16: {e16:e}, n=32: {e32:e}"
        );
    }

    #[test]
    fn triple_term_vanishes_in_2d() {
        let g = make_grid(2, 16).unwrap();
        let u = random_band(&g, 1.0, 7.0, 1.0, 5);
        let mut ws = NonlinearWorkspace::new(&g);
        let grad = ws.padded_gradient(&u);
        let len = g.padded_len();
        let mut triple = vec![0.0; len];
        let mut mag = vec![0.0; len];
        for p in 0..len {
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        let t = grad[j * 2 + k][p] * grad[i * 2 + j][p] * grad[i * 2 + k][p];
                        triple[p] += t;
                        mag[p] += t.abs();
                    }
                }
            }
        }
        assert!(g.padded_quadrature(&triple).abs() < 1e-12 * g.padded_quadrature(&mag));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn convect_is_bilinear(seed in 0u64..1000, a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let g = make_grid(2, 8).unwrap();
            let u = random_band(&g, 1.0, 3.0, 1.0, seed);
            let v = random_band(&g, 1.0, 3.0, 1.0, seed + 1);
            let lhs = convect(&u.scaled(a), &v.scaled(b)).unwrap();
            let rhs = convect(&u, &v).unwrap().scaled(a * b);
            prop_assert!(lhs.sub(&rhs).coefficient_norm() <= 1e-13 * (1.0 + rhs.coefficient_norm()));
        }
    }
}
