//! Time integration of the Galerkin system for the mode coefficients of `u`.

use std::sync::Arc;

use crate::cli_io::Snapshot;
use crate::constitutive::ConstitutiveLaw;
use crate::diagnostics::{EnergyRecord, RecordBuilder};
use crate::error::{Error, Result};
use crate::field::SpectralVectorField;
use crate::field_ops::{helmholtz_apply, helmholtz_solve, leray_project, remove_mean};
use crate::grid::Grid;
use crate::init::{Forcing, InitialCondition};
use crate::nonlinear::NonlinearWorkspace;

/// Mode magnitude treated as blow-up.
pub const BLOWUP_THRESHOLD: f64 = 1e12;

/// Safety factor applied by [`cfl_dt`].
pub const CFL_SAFETY: f64 = 0.4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    Rk4,
    Imex,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub u_hat: SpectralVectorField,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimParams {
    pub alpha1: f64,
    pub law: ConstitutiveLaw,
    /// `None` picks [`cfl_dt`] of the initial state.
    pub dt: Option<f64>,
    pub t_end: f64,
    pub scheme: Scheme,
    pub forcing: Forcing,
    pub ic: InitialCondition,
    pub seed: u64,
    /// Snapshot every this many global steps; 0 disables snapshots.
    pub snapshot_every: u64,
    /// Test hook: drop the stress term from the momentum balance.
    pub stress_enabled: bool,
}

impl SimParams {
    pub fn new(law: ConstitutiveLaw, alpha1: f64, t_end: f64, ic: InitialCondition) -> Self {
        SimParams {
            alpha1,
            law,
            dt: None,
            t_end,
            scheme: Scheme::Rk4,
            forcing: Forcing::None,
            ic,
            seed: 0,
            snapshot_every: 0,
            stress_enabled: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha1 >= 0.0 && self.alpha1.is_finite()) {
            return Err(Error::param(format!("alpha1 must be >= 0, got {}", self.alpha1)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::param(format!("t_end must be positive, got {}", self.t_end)));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::param(format!("dt must be positive, got {dt}")));
            }
            if self.t_end < dt {
                return Err(Error::param(format!(
                    "t_end = {} is shorter than dt = {dt}",
                    self.t_end
                )));
            }
        }
        Ok(())
    }
}

/// Truncates to the resolved lattice, removes the mean and projects onto divergence-free fields.
pub fn project_initial(u0: &SpectralVectorField) -> SpectralVectorField {
    let g = u0.grid().clone();
    let mut u = remove_mean(&leray_project(u0));
    for i in 0..u.dim() {
        g.drop_nyquist(u.component_mut(i));
    }
    u
}

/// `0.4 · min(Δx/‖u‖_∞, 2(1 + α₁λ)/(ν_max λ))` with `λ` the largest resolved `|k|²`
/// and `ν_max` the largest sampled `(μ₀ + μ₁|Du|)^{r−2}`.
pub fn cfl_dt(u: &SpectralVectorField, law: &ConstitutiveLaw, alpha1: f64) -> Result<f64> {
    let g = u.grid();
    let dx = 2.0 * std::f64::consts::PI / g.n() as f64;
    let phys = u.to_physical()?;
    let mut umax = 0.0f64;
    for idx in 0..g.len() {
        let s: f64 = phys.iter().map(|c| c[idx] * c[idx]).sum();
        umax = umax.max(s.sqrt());
    }
    let strain = crate::field_ops::strain(u)?;
    let mut nu_max = 0.0f64;
    for idx in 0..g.len() {
        nu_max = nu_max.max(law.viscosity(strain.at(idx).norm()));
    }
    let lambda = g.max_resolved_eigenvalue();
    let diffusive = 2.0 * (1.0 + alpha1 * lambda) / (nu_max * lambda);
    let advective = if umax > 0.0 { dx / umax } else { f64::INFINITY };
    Ok(CFL_SAFETY * diffusive.min(advective))
}

/// Integrator bound to a grid, parameters and a forcing field.
pub struct Simulation {
    grid: Arc<Grid>,
    params: SimParams,
    forcing: Option<SpectralVectorField>,
    ws: NonlinearWorkspace,
    state: SimState,
    dt: f64,
    step: u64,
    final_step: u64,
    warnings: Vec<String>,
}

impl Clone for Simulation {
    fn clone(&self) -> Self {
        Simulation {
            grid: self.grid.clone(),
            params: self.params.clone(),
            forcing: self.forcing.clone(),
            ws: NonlinearWorkspace::new(&self.grid),
            state: self.state.clone(),
            dt: self.dt,
            step: self.step,
            final_step: self.final_step,
            warnings: self.warnings.clone(),
        }
    }
}

impl Simulation {
    /// Builds the initial state from `params.ic`.
    ///
    /// Snapshot restarts keep the stored state as is; other initial conditions are
    /// projected with [`project_initial`].
    pub fn new(grid: &Arc<Grid>, params: &SimParams) -> Result<Self> {
        params.validate()?;
        let (raw, t0) = params.ic.build(grid, params.seed)?;
        let u0 = match params.ic {
            InitialCondition::File(_) => canonical(&raw),
            _ => project_initial(&raw),
        };
        let mut ws = NonlinearWorkspace::new(grid);
        let forcing = match &params.forcing {
            Forcing::None => None,
            Forcing::SteadyMode { k, amplitude } => Some(Forcing::steady_mode_field(grid, k, *amplitude)?),
            Forcing::Manufactured => {
                let v = helmholtz_apply(&u0, params.alpha1)?;
                let mut w = ws.nonlinear_terms(&u0, &v)?;
                if params.stress_enabled {
                    w.axpy(-1.0, &ws.stress_divergence(&u0, &params.law));
                }
                Some(remove_mean(&leray_project(&w)))
            }
        };
        let dt = match params.dt {
            Some(dt) => dt,
            None => cfl_dt(&u0, &params.law, params.alpha1)?,
        };
        let mut warnings = Vec::new();
        if !params.law.in_theorem_regime() {
            warnings.push(format!(
                "r = {} is outside the theorem regime r >= 3; results are exploratory",
                params.law.r
            ));
        }
        let start = (t0 / dt).round() as u64;
        let exact = params.t_end / dt;
        let mut final_step = exact.round();
        if (exact - final_step).abs() > 1e-9 * exact.max(1.0) {
            final_step = exact.ceil();
            warnings.push(format!(
                "t_end = {} is not a multiple of dt = {dt}; running to {}",
                params.t_end,
                final_step * dt
            ));
        }
        let final_step = final_step as u64;
        if final_step < start {
            return Err(Error::param(format!(
                "initial time {t0} is past t_end = {}",
                params.t_end
            )));
        }
        let state = SimState {
            t: start as f64 * dt,
            u_hat: u0,
        };
        Ok(Simulation {
            grid: grid.clone(),
            params: params.clone(),
            forcing,
            ws,
            state,
            dt,
            step: start,
            final_step,
            warnings,
        })
    }

    /// Copy of this simulation with `du` added to the current velocity.
    pub fn perturbed(&self, du: &SpectralVectorField) -> Self {
        let mut out = self.clone();
        out.state.u_hat = project_initial(&self.state.u_hat.add(du));
        out
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }

    pub fn forcing(&self) -> Option<&SpectralVectorField> {
        self.forcing.as_ref()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Global step index; `t = step · dt`.
    pub fn step_index(&self) -> u64 {
        self.step
    }

    pub fn final_step(&self) -> u64 {
        self.final_step
    }

    pub fn finished(&self) -> bool {
        self.step >= self.final_step
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    fn law(&self) -> Option<&ConstitutiveLaw> {
        self.params.stress_enabled.then_some(&self.params.law)
    }

    /// `du/dt = (I − α₁Δ)⁻¹ P(f − (u·∇)v − Σ v_j∇u_j + div S(Du))`
    pub fn time_derivative(&mut self, u: &SpectralVectorField) -> Result<SpectralVectorField> {
        let law = self.law().copied();
        let rhs = self
            .ws
            .momentum_rhs(u, self.forcing.as_ref(), law.as_ref(), self.params.alpha1)?;
        helmholtz_solve(&rhs, self.params.alpha1)
    }

    fn rk4(&mut self, u: &SpectralVectorField) -> Result<SpectralVectorField> {
        let dt = self.dt;
        let k1 = self.time_derivative(u)?;
        let mut s = u.clone();
        s.axpy(0.5 * dt, &k1);
        let k2 = self.time_derivative(&s)?;
        let mut s = u.clone();
        s.axpy(0.5 * dt, &k2);
        let k3 = self.time_derivative(&s)?;
        let mut s = u.clone();
        s.axpy(dt, &k3);
        let k4 = self.time_derivative(&s)?;
        let mut next = u.clone();
        next.axpy(dt / 6.0, &k1);
        next.axpy(dt / 3.0, &k2);
        next.axpy(dt / 3.0, &k3);
        next.axpy(dt / 6.0, &k4);
        Ok(next)
    }

    /// IMEX Euler: the linear part `(μ₀^{r−2}/2)Δu` of `div S(Du)` is implicit, the rest explicit.
    fn imex(&mut self, u: &SpectralVectorField) -> Result<SpectralVectorField> {
        let dt = self.dt;
        let alpha1 = self.params.alpha1;
        let nu = if self.params.stress_enabled {
            0.5 * self.params.law.linear_coefficient()
        } else {
            0.0
        };
        let law = self.law().copied();
        let rhs = self.ws.momentum_rhs(u, self.forcing.as_ref(), law.as_ref(), alpha1)?;
        let g = self.grid.clone();
        let mut next = u.clone();
        for i in 0..u.dim() {
            let (cu, ce) = (u.component(i), rhs.component(i));
            for (idx, z) in next.component_mut(i).iter_mut().enumerate() {
                let lambda = g.stokes_eigenvalue(idx);
                let h = 1.0 + alpha1 * lambda;
                let expl = ce[idx] + cu[idx] * (nu * lambda);
                *z = (cu[idx] + expl * (dt / h)) / (1.0 + dt * nu * lambda / h);
            }
        }
        Ok(next)
    }

    /// Advances one step, re-projects and checks for blow-up.
    pub fn step(&mut self) -> Result<()> {
        let u = self.state.u_hat.clone();
        let next = match self.params.scheme {
            Scheme::Rk4 => self.rk4(&u)?,
            Scheme::Imex => self.imex(&u)?,
        };
        let next = project_initial(&next);
        self.step += 1;
        let t = self.step as f64 * self.dt;
        if !next.is_finite() {
            return Err(Error::BlowUp {
                t,
                reason: "non-finite mode coefficient".into(),
            });
        }
        let peak = next.max_mode_magnitude();
        if peak > BLOWUP_THRESHOLD {
            return Err(Error::BlowUp {
                t,
                reason: format!("mode magnitude {peak:.3e} exceeds {BLOWUP_THRESHOLD:e}"),
            });
        }
        self.state = SimState { t, u_hat: next };
        Ok(())
    }

    /// Encodes the state as a snapshot and replaces it by the decoded snapshot, so that
    /// the run continues exactly as a restart from the returned snapshot would.
    pub fn canonicalize(&mut self) -> Result<Snapshot> {
        let snap = self.snapshot()?;
        self.state.u_hat = canonical(&SpectralVectorField::from_physical(&self.grid, &snap.components)?);
        Ok(snap)
    }

    pub fn snapshot(&self) -> Result<Snapshot> {
        let law = &self.params.law;
        Snapshot::from_field(
            &self.state.u_hat,
            self.state.t,
            self.params.alpha1,
            law.mu0,
            law.mu1,
            law.r,
        )
    }
}

/// Snapshot decoding: mean and Nyquist modes dropped, no projection.
fn canonical(raw: &SpectralVectorField) -> SpectralVectorField {
    let g = raw.grid().clone();
    let mut u = remove_mean(raw);
    for i in 0..u.dim() {
        g.drop_nyquist(u.component_mut(i));
    }
    u
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub state: SimState,
    pub records: Vec<EnergyRecord>,
    /// `(global step, snapshot)` pairs.
    pub snapshots: Vec<(u64, Snapshot)>,
    pub dt: f64,
    pub warnings: Vec<String>,
}

/// A run stopped early; `partial` holds everything produced before the failure.
#[derive(Debug)]
pub struct Aborted {
    pub error: Error,
    pub partial: Option<RunOutput>,
}

impl From<Error> for Aborted {
    fn from(error: Error) -> Self {
        Aborted { error, partial: None }
    }
}

/// Integrates to `t_end`, recording every step.
///
/// A fresh run records its initial state; a restart from a snapshot does not, since
/// the run that wrote the snapshot already recorded it. At every snapshot step the
/// state is replaced by its decoded snapshot so that restarts continue bit for bit.
pub fn run(grid: &Arc<Grid>, params: &SimParams) -> std::result::Result<RunOutput, Aborted> {
    let mut sim = Simulation::new(grid, params)?;
    let mut builder = RecordBuilder::new(grid, params.law, params.alpha1, sim.dt());
    let mut out = RunOutput {
        state: sim.state().clone(),
        records: Vec::new(),
        snapshots: Vec::new(),
        dt: sim.dt(),
        warnings: sim.warnings().to_vec(),
    };
    let resumed = matches!(params.ic, InitialCondition::File(_));
    let first = builder.record(sim.state().t, &sim.state().u_hat, sim.forcing());
    match first {
        Ok(rec) if !resumed => out.records.push(rec),
        Ok(_) => {}
        Err(error) => {
            return Err(Aborted {
                error,
                partial: Some(out),
            })
        }
    }
    while !sim.finished() {
        let result = (|| -> Result<()> {
            sim.step()?;
            let k = sim.step_index();
            let snap = params.snapshot_every > 0 && k % params.snapshot_every == 0;
            if snap {
                out.snapshots.push((k, sim.canonicalize()?));
            }
            let rec = builder.record(sim.state().t, &sim.state().u_hat, sim.forcing())?;
            out.records.push(rec);
            Ok(())
        })();
        if let Err(error) = result {
            out.state = sim.state().clone();
            return Err(Aborted {
                error,
                partial: Some(out),
            });
        }
    }
    out.state = sim.state().clone();
    Ok(out)
}
