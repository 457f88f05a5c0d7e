//! Energy functionals, the energy-equality residual, second-order quantities, the
//! divergence-free integral identities and the twin-run continuous-dependence experiment.
//!
//! Cubic and stress integrals are evaluated with the rectangle rule on the 3/2-padded
//! grid, which integrates products of up to three resolved fields exactly.

use std::sync::Arc;

use num_complex::Complex64;

use crate::constitutive::{real_pow, ConstitutiveLaw};
use crate::error::{Error, Result};
use crate::field::{SpectralField, SpectralVectorField};
use crate::field_ops::{grad_l2_sq, grad_lr, helmholtz_apply, hess_l2_sq, strain_spectral};
use crate::grid::Grid;
use crate::init::random_band;
use crate::nonlinear::{padded_strain_at, NonlinearWorkspace, Padded};
use crate::stepper::{SimParams, Simulation};

/// One row of the per-step time series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyRecord {
    pub t: f64,
    /// `½(‖u‖² + α₁‖∇u‖²)`
    pub energy: f64,
    /// `∫ S(Du):Du`
    pub dissipation: f64,
    /// `⟨f, u⟩`
    pub forcing_power: f64,
    /// `‖u‖_{L²}`
    pub l2: f64,
    /// `‖∇u‖_{L²}`
    pub h1: f64,
    /// `‖∇²u‖_{L²}`
    pub h2: f64,
    /// `‖∇u‖_{L^r}`
    pub w1r: f64,
    /// `∫(1+|Du|)^{r−2}|∇Du|²`
    pub ir: f64,
    /// `(E_n − E_{n−1})/dt + ½(Φ_n + Φ_{n−1}) − ½(P_n + P_{n−1})`; 0 on the first record.
    pub energy_residual: f64,
    pub id_res_1: f64,
    pub id_res_2: f64,
    pub id_res_3: f64,
}

pub const RECORD_COLUMNS: [&str; 13] = [
    "t",
    "E",
    "dissipation",
    "forcing_power",
    "l2",
    "h1",
    "h2",
    "w1r",
    "Ir",
    "energy_residual",
    "id_res_1",
    "id_res_2",
    "id_res_3",
];

impl EnergyRecord {
    pub fn values(&self) -> [f64; 13] {
        [
            self.t,
            self.energy,
            self.dissipation,
            self.forcing_power,
            self.l2,
            self.h1,
            self.h2,
            self.w1r,
            self.ir,
            self.energy_residual,
            self.id_res_1,
            self.id_res_2,
            self.id_res_3,
        ]
    }

    pub fn from_values(v: [f64; 13]) -> Self {
        EnergyRecord {
            t: v[0],
            energy: v[1],
            dissipation: v[2],
            forcing_power: v[3],
            l2: v[4],
            h1: v[5],
            h2: v[6],
            w1r: v[7],
            ir: v[8],
            energy_residual: v[9],
            id_res_1: v[10],
            id_res_2: v[11],
            id_res_3: v[12],
        }
    }
}

/// `½(‖u‖² + α₁‖∇u‖²)`
pub fn energy(u: &SpectralVectorField, alpha1: f64) -> f64 {
    0.5 * (u.inner(u) + alpha1 * grad_l2_sq(u))
}

/// `(E₁ − E₀)/dt + ½(Φ₀ + Φ₁) − ½(P₀ + P₁)`
pub fn energy_residual(prev: &EnergyRecord, next: &EnergyRecord, dt: f64) -> f64 {
    (next.energy - prev.energy) / dt + 0.5 * (prev.dissipation + next.dissipation)
        - 0.5 * (prev.forcing_power + next.forcing_power)
}

/// Pointwise integrals that need the padded strain field.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StrainIntegrals {
    /// `∫ S(Du):Du`
    pub dissipation: f64,
    /// `∫ (1+|Du|)^{r−2}|Du|²`
    pub coercive: f64,
    /// `∫ |Du|^r`
    pub strain_lr: f64,
    /// `∫ (1+|Du|)^{r−2}|∇Du|²`
    pub ir: f64,
    /// `∫ Σ ∂_k u_j ∂_j u_i ∂_k u_i`
    pub triple: f64,
    /// `∫ Σ |∂_k u_j ∂_j u_i ∂_k u_i|`
    pub triple_scale: f64,
    /// `‖∇u‖³_{L³}`
    pub grad_l3_cubed: f64,
}

pub fn strain_integrals(
    ws: &mut NonlinearWorkspace,
    u: &SpectralVectorField,
    law: &ConstitutiveLaw,
) -> StrainIntegrals {
    let g = ws.grid().clone();
    let d = u.dim();
    let grad = ws.padded_gradient(u);
    let strain = strain_spectral(u);
    // ∂_k D_ij for i ≤ j, with off-diagonal entries counted twice
    let mut dstrain: Vec<(f64, Padded)> = Vec::new();
    for i in 0..d {
        for j in i..d {
            for k in 0..d {
                let m: Vec<Complex64> = strain
                    .entry(i, j)
                    .iter()
                    .enumerate()
                    .map(|(idx, &z)| Complex64::new(0.0, g.derivative_wavenumber(idx, k)) * z)
                    .collect();
                dstrain.push((if i == j { 1.0 } else { 2.0 }, ws.to_padded(&m)));
            }
        }
    }
    let len = g.padded_len();
    let mut phi = vec![0.0; len];
    let mut coercive = vec![0.0; len];
    let mut strain_lr = vec![0.0; len];
    let mut ir = vec![0.0; len];
    let mut triple = vec![0.0; len];
    let mut triple_abs = vec![0.0; len];
    let mut l3 = vec![0.0; len];
    for p in 0..len {
        let dp = padded_strain_at(&grad, d, p);
        let n = dp.norm();
        phi[p] = law.stress_unchecked(&dp).ddot(&dp);
        let weight = real_pow(1.0 + n, law.r - 2.0);
        coercive[p] = weight * n * n;
        strain_lr[p] = real_pow(n, law.r);
        ir[p] = weight * dstrain.iter().map(|(w, c)| w * c[p] * c[p]).sum::<f64>();
        let mut g2 = 0.0;
        for i in 0..d {
            for j in 0..d {
                g2 += grad[i * d + j][p] * grad[i * d + j][p];
                for k in 0..d {
                    let t = grad[j * d + k][p] * grad[i * d + j][p] * grad[i * d + k][p];
                    triple[p] += t;
                    triple_abs[p] += t.abs();
                }
            }
        }
        l3[p] = g2 * g2.sqrt();
    }
    StrainIntegrals {
        dissipation: g.padded_quadrature(&phi),
        coercive: g.padded_quadrature(&coercive),
        strain_lr: g.padded_quadrature(&strain_lr),
        ir: g.padded_quadrature(&ir),
        triple: g.padded_quadrature(&triple),
        triple_scale: g.padded_quadrature(&triple_abs),
        grad_l3_cubed: g.padded_quadrature(&l3),
    }
}

/// `∫ S(Du):Du`, on the padded grid.
pub fn dissipation(u: &SpectralVectorField, law: &ConstitutiveLaw) -> f64 {
    let mut ws = NonlinearWorkspace::new(u.grid());
    let grad = ws.padded_gradient(u);
    let d = u.dim();
    let values: Vec<f64> = (0..u.grid().padded_len())
        .map(|p| {
            let dp = padded_strain_at(&grad, d, p);
            law.stress_unchecked(&dp).ddot(&dp)
        })
        .collect();
    u.grid().padded_quadrature(&values)
}

/// Quantities entering the second energy inequality.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecondOrder {
    /// `‖∇²u‖²`
    pub hess_sq: f64,
    pub ir: f64,
    /// `∫ Σ ∂_k u_j ∂_j u_i ∂_k u_i`
    pub triple: f64,
    /// `triple` divided by the integral of its absolute integrand.
    pub triple_relative: f64,
    /// `‖∇u‖³_{L³} / (‖∇u‖_{L^r} ‖∇²u‖²)`, recorded only.
    pub cubic_ratio: f64,
}

pub fn second_order_monitor(u: &SpectralVectorField, law: &ConstitutiveLaw) -> Result<SecondOrder> {
    let mut ws = NonlinearWorkspace::new(u.grid());
    let s = strain_integrals(&mut ws, u, law);
    let hess_sq = hess_l2_sq(u);
    let lr = grad_lr(u, law.r)?;
    Ok(SecondOrder {
        hess_sq,
        ir: s.ir,
        triple: s.triple,
        triple_relative: ratio(s.triple, s.triple_scale),
        cubic_ratio: ratio(s.grad_l3_cubed, lr * hess_sq),
    })
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn derivative(g: &Grid, modes: &[Complex64], axis: usize) -> Vec<Complex64> {
    modes
        .iter()
        .enumerate()
        .map(|(idx, &z)| Complex64::new(0.0, g.derivative_wavenumber(idx, axis)) * z)
        .collect()
}

/// Relative residuals of `∫∇f·u = 0`, `∫(u·∇)v·v = 0` and `∫(u·∇)u·v + ∫(u⊗u):∇v = 0`.
///
/// Each integral is divided by the integral of the absolute value of its integrand,
/// so the residuals lie in `[0, 1]`.
pub fn identity_checks(
    ws: &mut NonlinearWorkspace,
    u: &SpectralVectorField,
    v: &SpectralVectorField,
    f: &SpectralField,
) -> [f64; 3] {
    let g = ws.grid().clone();
    let d = u.dim();
    let len = g.padded_len();
    let pu = ws.padded_field(u);
    let pv = ws.padded_field(v);
    let gu = ws.padded_gradient(u);
    let gv = ws.padded_gradient(v);
    let gf: Vec<Padded> = (0..d).map(|i| ws.to_padded(&derivative(&g, f.modes(), i))).collect();

    let mut acc: [(Vec<f64>, Vec<f64>); 3] = std::array::from_fn(|_| (vec![0.0; len], vec![0.0; len]));
    for p in 0..len {
        for i in 0..d {
            let t = gf[i][p] * pu[i][p];
            acc[0].0[p] += t;
            acc[0].1[p] += t.abs();
            for j in 0..d {
                let t = pu[j][p] * gv[i * d + j][p] * pv[i][p];
                acc[1].0[p] += t;
                acc[1].1[p] += t.abs();
                let a = pu[j][p] * gu[i * d + j][p] * pv[i][p];
                let b = pu[i][p] * pu[j][p] * gv[i * d + j][p];
                acc[2].0[p] += a + b;
                acc[2].1[p] += a.abs() + b.abs();
            }
        }
    }
    acc.map(|(val, abs)| ratio(g.padded_quadrature(&val).abs(), g.padded_quadrature(&abs)))
}

/// Builds [`EnergyRecord`]s, carrying the previous record for the residual.
pub struct RecordBuilder {
    ws: NonlinearWorkspace,
    law: ConstitutiveLaw,
    alpha1: f64,
    dt: f64,
    prev: Option<EnergyRecord>,
}

impl RecordBuilder {
    pub fn new(grid: &Arc<Grid>, law: ConstitutiveLaw, alpha1: f64, dt: f64) -> Self {
        RecordBuilder {
            ws: NonlinearWorkspace::new(grid),
            law,
            alpha1,
            dt,
            prev: None,
        }
    }

    pub fn record(
        &mut self,
        t: f64,
        u: &SpectralVectorField,
        forcing: Option<&SpectralVectorField>,
    ) -> Result<EnergyRecord> {
        let s = strain_integrals(&mut self.ws, u, &self.law);
        let v = helmholtz_apply(u, self.alpha1)?;
        let mut half_sq = Vec::with_capacity(u.grid().len());
        for i in 0..u.dim() {
            let p = self.ws.product(u.component(i), u.component(i));
            if half_sq.is_empty() {
                half_sq = vec![Complex64::new(0.0, 0.0); p.len()];
            }
            half_sq.iter_mut().zip(&p).for_each(|(a, b)| *a += b * 0.5);
        }
        let f = SpectralField::from_modes(u.grid(), half_sq)?;
        let ids = identity_checks(&mut self.ws, u, &v, &f);
        let mut rec = EnergyRecord {
            t,
            energy: energy(u, self.alpha1),
            dissipation: s.dissipation,
            forcing_power: forcing.map_or(0.0, |f| f.inner(u)),
            l2: u.norm_l2(),
            h1: grad_l2_sq(u).sqrt(),
            h2: hess_l2_sq(u).sqrt(),
            w1r: grad_lr(u, self.law.r)?,
            ir: s.ir,
            energy_residual: 0.0,
            id_res_1: ids[0],
            id_res_2: ids[1],
            id_res_3: ids[2],
        };
        if let Some(prev) = &self.prev {
            rec.energy_residual = energy_residual(prev, &rec, self.dt);
        }
        self.prev = Some(rec);
        Ok(rec)
    }
}

/// Direction of the initial perturbation in [`uniqueness_experiment`].
#[derive(Clone, Debug)]
pub enum Perturbation {
    /// Random divergence-free field of unit `L²` norm.
    Random { seed: u64 },
    /// Given field, normalized to unit `L²` norm.
    Field(SpectralVectorField),
}

impl Perturbation {
    pub fn direction(&self, grid: &Arc<Grid>) -> Result<SpectralVectorField> {
        let e = match self {
            Perturbation::Random { seed } => random_band(grid, 1.0, grid.n() as f64 / 3.0, 1.0, *seed),
            Perturbation::Field(e) => e.clone(),
        };
        let norm = e.norm_l2();
        if norm == 0.0 {
            return Err(Error::param("perturbation direction is zero"));
        }
        Ok(e.scaled(1.0 / norm))
    }
}

/// Twin-run growth history of `w = u − ū`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrowthRecord {
    pub delta: f64,
    pub t: Vec<f64>,
    /// `W = ‖w‖² + α₁‖∇w‖²`
    pub w: Vec<f64>,
    /// `F = 1 + ‖∇u‖² + ‖∇ū‖² + ‖∇²ū‖² + ‖∇w‖² + ‖∇²w‖²`
    pub factor: Vec<f64>,
    /// Trapezoidal `∫₀ᵗ F`.
    pub factor_integral: Vec<f64>,
    /// Whether the two trajectories agreed bit for bit at every step.
    pub bitwise_identical: bool,
}

impl GrowthRecord {
    /// Smallest `c` with `W(t) ≤ W(0) exp(c ∫₀ᵗ F)` over the run; `None` when `W(0) = 0`.
    pub fn gronwall_constant(&self) -> Option<f64> {
        let w0 = *self.w.first()?;
        if w0 <= 0.0 {
            return None;
        }
        self.w
            .iter()
            .zip(&self.factor_integral)
            .skip(1)
            .map(|(w, int)| (w / w0).ln() / int)
            .reduce(f64::max)
    }

    /// `max_t W(t) / (W(0) exp(c ∫F)) − 1`; nonpositive when the envelope holds.
    pub fn envelope_excess(&self, c: f64) -> f64 {
        let w0 = self.w[0];
        if w0 == 0.0 {
            return if self.w.iter().all(|&w| w == 0.0) {
                -1.0
            } else {
                f64::INFINITY
            };
        }
        self.w
            .iter()
            .zip(&self.factor_integral)
            .map(|(w, int)| w / (w0 * (c * int).exp()) - 1.0)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `√W(T)`
    pub fn final_amplitude(&self) -> f64 {
        self.w.last().copied().unwrap_or(0.0).sqrt()
    }
}

/// Runs the base simulation from `params` and a twin started at `u₀ + δe`, recording
/// the growth of their difference.
pub fn uniqueness_experiment(
    grid: &Arc<Grid>,
    params: &SimParams,
    delta: f64,
    perturbation: &Perturbation,
) -> Result<GrowthRecord> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::param(format!("perturbation scale must be >= 0, got {delta}")));
    }
    let mut base = Simulation::new(grid, params)?;
    let mut twin = if delta == 0.0 {
        base.clone()
    } else {
        let e = perturbation.direction(grid)?;
        base.perturbed(&e.scaled(delta))
    };
    let alpha1 = params.alpha1;
    let mut out = GrowthRecord {
        delta,
        t: Vec::new(),
        w: Vec::new(),
        factor: Vec::new(),
        factor_integral: Vec::new(),
        bitwise_identical: true,
    };
    let push = |out: &mut GrowthRecord, t: f64, u: &SpectralVectorField, ubar: &SpectralVectorField| {
        let w = u.sub(ubar);
        let gw = grad_l2_sq(&w);
        out.t.push(t);
        out.w.push(w.inner(&w) + alpha1 * gw);
        let f = 1.0 + grad_l2_sq(u) + grad_l2_sq(ubar) + hess_l2_sq(ubar) + gw + hess_l2_sq(&w);
        let int = match (out.factor.last(), out.factor_integral.last(), out.t.len()) {
            (Some(&fp), Some(&ip), n) if n >= 2 => ip + 0.5 * (fp + f) * (out.t[n - 1] - out.t[n - 2]),
            _ => 0.0,
        };
        out.factor.push(f);
        out.factor_integral.push(int);
        out.bitwise_identical &= u == ubar;
    };
    push(&mut out, base.state().t, &base.state().u_hat, &twin.state().u_hat);
    while !base.finished() {
        base.step()?;
        twin.step()?;
        push(&mut out, base.state().t, &base.state().u_hat, &twin.state().u_hat);
    }
    Ok(out)
}
