//! Shear-thickening extra stress `S(D) = (μ₀ + μ₁|D|)^{r−2} D` and checks of its
//! structural inequalities.
//!
//! Each `*_margin` function returns the slack of one inequality together with the
//! magnitude of the terms compared, so callers can accept round-off relative to
//! the size of the quantities involved.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tensor::{Tensor2, Tensor4};

/// Asymmetry accepted by [`ConstitutiveLaw::stress`], relative to `max(1, |D|)`.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Below this norm the `D⊗D/|D|` term of the Jacobian is replaced by its limit 0.
pub const JACOBIAN_ZERO_NORM: f64 = 1e-300;

/// `base^e` through `exp(e·ln base)`, with `0^0 = 1`.
pub fn real_pow(base: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        (e * base.ln()).exp()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstitutiveLaw {
    pub mu0: f64,
    pub mu1: f64,
    pub r: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedConstants {
    /// Lower bound of the Jacobian quadratic form.
    pub c0: f64,
    /// Upper bound of the Jacobian quadratic form.
    pub c1: f64,
    /// Bound on the Jacobian as an operator on `d × d` tensors.
    pub c2: f64,
    /// Coercivity constant.
    pub c3: f64,
    /// Growth constant.
    pub c4: f64,
    /// Calibrated strict-monotonicity constant, `½ min(μ₀,μ₁)^{r−2} 2^{2−r}`.
    pub c3_monotone: f64,
}

/// Slack of an inequality `lhs ≥ rhs`, with the magnitude of the compared terms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Margin {
    pub value: f64,
    pub scale: f64,
}

impl Margin {
    fn new(lhs: f64, rhs: f64, scale: f64) -> Self {
        Margin {
            value: lhs - rhs,
            scale,
        }
    }

    /// `value ≥ −rel_tol · scale`
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.value >= -rel_tol * self.scale
    }

    /// Margin divided by its scale (0 when both vanish).
    pub fn normalized(&self) -> f64 {
        if self.scale == 0.0 {
            if self.value == 0.0 {
                0.0
            } else {
                self.value.signum() * f64::INFINITY
            }
        } else {
            self.value / self.scale
        }
    }
}

impl ConstitutiveLaw {
    /// `mu1 = 0` is accepted: it degenerates to the linear law `μ₀^{r−2} D`.
    pub fn new(mu0: f64, mu1: f64, r: f64) -> Result<Self> {
        if !(mu0 > 0.0 && mu0.is_finite()) {
            return Err(Error::param(format!("mu0 must be positive, got {mu0}")));
        }
        if !(mu1 >= 0.0 && mu1.is_finite()) {
            return Err(Error::param(format!("mu1 must be nonnegative, got {mu1}")));
        }
        if !(r >= 2.0 && r.is_finite()) {
            return Err(Error::param(format!("r must be >= 2, got {r}")));
        }
        Ok(ConstitutiveLaw { mu0, mu1, r })
    }

    /// Whether `r` lies in the regime `r ≥ 3` covered by the existence and uniqueness theory.
    pub fn in_theorem_regime(&self) -> bool {
        self.r >= 3.0
    }

    /// Generalized viscosity `(μ₀ + μ₁ s)^{r−2}` at shear rate `s`.
    pub fn viscosity(&self, s: f64) -> f64 {
        real_pow(self.mu0 + self.mu1 * s, self.r - 2.0)
    }

    /// Coefficient of the linear part `μ₀^{r−2} D`.
    pub fn linear_coefficient(&self) -> f64 {
        real_pow(self.mu0, self.r - 2.0)
    }

    pub fn stress(&self, d: &Tensor2) -> Result<Tensor2> {
        let norm = d.norm();
        let asym = d.max_asymmetry();
        if asym > SYMMETRY_TOLERANCE * norm.max(1.0) {
            return Err(Error::AsymmetricTensor(asym));
        }
        Ok(self.stress_unchecked(d))
    }

    pub fn stress_unchecked(&self, d: &Tensor2) -> Tensor2 {
        d.scale(self.viscosity(d.norm()))
    }

    /// `∂S_ij/∂D_kl`, treating the entries of `D` as independent.
    pub fn stress_jacobian(&self, d: &Tensor2) -> Tensor4 {
        let norm = d.norm();
        let base = self.mu0 + self.mu1 * norm;
        let phi = real_pow(base, self.r - 2.0);
        let aniso = if norm < JACOBIAN_ZERO_NORM || self.r == 2.0 {
            0.0
        } else {
            (self.r - 2.0) * self.mu1 * real_pow(base, self.r - 3.0) / norm
        };
        Tensor4::from_fn(d.dim(), |i, j, k, l| {
            let delta = if i == k && j == l { phi } else { 0.0 };
            delta + aniso * d.get(i, j) * d.get(k, l)
        })
    }

    pub fn derived_constants(&self) -> DerivedConstants {
        let p = self.r - 2.0;
        let lo = real_pow(self.mu0.min(self.mu1), p);
        let hi = real_pow(self.mu0.max(self.mu1), p);
        let c1 = (self.r - 1.0) * hi;
        DerivedConstants {
            c0: lo,
            c1,
            c2: c1,
            c3: lo,
            c4: hi,
            c3_monotone: 0.5 * lo * real_pow(2.0, -p),
        }
    }

    /// `S(D):D − c₃(1+|D|)^{r−2}|D|²`
    pub fn coercivity_margin(&self, d: &Tensor2) -> Margin {
        let c = self.derived_constants();
        let n = d.norm();
        let lhs = self.stress_unchecked(d).ddot(d);
        let rhs = c.c3 * real_pow(1.0 + n, self.r - 2.0) * n * n;
        Margin::new(lhs, rhs, lhs.abs() + rhs.abs())
    }

    /// `c₄|D|(1+|D|)^{r−2} − |S(D)|`
    pub fn growth_margin(&self, d: &Tensor2) -> Margin {
        let c = self.derived_constants();
        let n = d.norm();
        let bound = c.c4 * n * real_pow(1.0 + n, self.r - 2.0);
        let s = self.stress_unchecked(d).norm();
        Margin::new(bound, s, bound + s)
    }

    /// `[S(B) − S(D)]:[B − D] − c₃'|B − D|²(1 + |B| + |D|)^{r−2}` with `c₃'` the calibrated constant.
    pub fn monotonicity_margin(&self, b: &Tensor2, d: &Tensor2) -> Margin {
        let c = self.derived_constants();
        let (lhs, weight, scale) = self.monotonicity_terms(b, d);
        let rhs = c.c3_monotone * weight;
        Margin::new(lhs, rhs, scale + rhs.abs())
    }

    /// `([S(B)−S(D)]:[B−D], |B−D|²(1+|B|+|D|)^{r−2}, cancellation scale)`.
    fn monotonicity_terms(&self, b: &Tensor2, d: &Tensor2) -> (f64, f64, f64) {
        let sb = self.stress_unchecked(b);
        let sd = self.stress_unchecked(d);
        let diff = *b - *d;
        let lhs = (sb - sd).ddot(&diff);
        let dn = diff.norm();
        let weight = dn * dn * real_pow(1.0 + b.norm() + d.norm(), self.r - 2.0);
        (lhs, weight, (sb.norm() + sd.norm()) * dn)
    }

    /// Ratio `[S(B)−S(D)]:[B−D] / (|B−D|²(1+|B|+|D|)^{r−2})`; `None` when `B = D`.
    pub fn monotonicity_ratio(&self, b: &Tensor2, d: &Tensor2) -> Option<f64> {
        let (lhs, weight, _) = self.monotonicity_terms(b, d);
        (weight > 0.0).then(|| lhs / weight)
    }

    /// Slack of `c₀(1+|D|)^{r−2}|B|² ≤ Q(D,B) ≤ c₁(1+|D|)^{r−2}|B|²`
    /// where `Q = Σ ∂S_ij/∂D_kl B_ij B_kl`; returns `(lower, upper)`.
    pub fn jacobian_form_bounds(&self, d: &Tensor2, b: &Tensor2) -> (Margin, Margin) {
        let c = self.derived_constants();
        let q = self.stress_jacobian(d).quadratic_form(b);
        let w = real_pow(1.0 + d.norm(), self.r - 2.0) * b.ddot(b);
        let lower = c.c0 * w;
        let upper = c.c1 * w;
        (
            Margin::new(q, lower, q.abs() + lower),
            Margin::new(upper, q, q.abs() + upper),
        )
    }

    /// Relative error between the Jacobian-vector product and the central difference
    /// `(S(D+hB) − S(D−hB)) / 2h`.
    pub fn jacobian_fd_error(&self, d: &Tensor2, b: &Tensor2, h: f64) -> f64 {
        let jb = self.stress_jacobian(d).apply(b);
        let plus = self.stress_unchecked(&(*d + b.scale(h)));
        let minus = self.stress_unchecked(&(*d - b.scale(h)));
        let fd = (plus - minus).scale(0.5 / h);
        let num = (jb - fd).norm();
        let den = jb.norm();
        if den == 0.0 {
            num
        } else {
            num / den
        }
    }
}

/// Uniform random symmetric tensor with entries in `[-bound, bound]`.
pub fn random_symmetric(rng: &mut impl Rng, dim: usize, bound: f64) -> Tensor2 {
    let mut t = Tensor2::zeros(dim);
    for i in 0..dim {
        for j in i..dim {
            let x = rng.gen_range(-bound..=bound);
            t.set(i, j, x);
            t.set(j, i, x);
        }
    }
    t
}

/// Smallest normalized margin of each inequality over a random sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepReport {
    pub samples: usize,
    pub jacobian_lower: f64,
    pub jacobian_upper: f64,
    pub coercivity: f64,
    pub growth: f64,
    pub monotonicity: f64,
    /// Smallest sampled monotonicity ratio; compare with `c3_monotone`.
    pub min_monotonicity_ratio: f64,
}

impl SweepReport {
    /// All margins above `−rel_tol` (normalized by the compared magnitudes).
    pub fn all_hold(&self, rel_tol: f64) -> bool {
        [
            self.jacobian_lower,
            self.jacobian_upper,
            self.coercivity,
            self.growth,
            self.monotonicity,
        ]
        .iter()
        .all(|&m| m >= -rel_tol)
    }
}

/// Evaluates all five margins on `samples` random symmetric `dim × dim` tensors
/// (and pairs) with entries in `[-bound, bound]`.
pub fn margin_sweep(law: &ConstitutiveLaw, dim: usize, samples: usize, bound: f64, seed: u64) -> SweepReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SweepReport {
        samples,
        jacobian_lower: f64::INFINITY,
        jacobian_upper: f64::INFINITY,
        coercivity: f64::INFINITY,
        growth: f64::INFINITY,
        monotonicity: f64::INFINITY,
        min_monotonicity_ratio: f64::INFINITY,
    };
    for _ in 0..samples {
        let d = random_symmetric(&mut rng, dim, bound);
        let b = random_symmetric(&mut rng, dim, bound);
        let (lo, hi) = law.jacobian_form_bounds(&d, &b);
        report.jacobian_lower = report.jacobian_lower.min(lo.normalized());
        report.jacobian_upper = report.jacobian_upper.min(hi.normalized());
        report.coercivity = report.coercivity.min(law.coercivity_margin(&d).normalized());
        report.growth = report.growth.min(law.growth_margin(&d).normalized());
        report.monotonicity = report.monotonicity.min(law.monotonicity_margin(&b, &d).normalized());
        if let Some(ratio) = law.monotonicity_ratio(&b, &d) {
            report.min_monotonicity_ratio = report.min_monotonicity_ratio.min(ratio);
        }
    }
    report
}

/// Largest relative Jacobian/finite-difference mismatch over a random sample.
pub fn jacobian_fd_sweep(law: &ConstitutiveLaw, dim: usize, samples: usize, bound: f64, h: f64, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let d = random_symmetric(&mut rng, dim, bound);
            let b = random_symmetric(&mut rng, dim, 1.0);
            law.jacobian_fd_error(&d, &b, h)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn law(mu0: f64, mu1: f64, r: f64) -> ConstitutiveLaw {
        ConstitutiveLaw::new(mu0, mu1, r).unwrap()
    }

    #[test]
    fn validation() {
        assert!(ConstitutiveLaw::new(0.0, 1.0, 3.0).is_err());
        assert!(ConstitutiveLaw::new(1.0, -1.0, 3.0).is_err());
        assert!(ConstitutiveLaw::new(1.0, 1.0, 1.9).is_err());
        assert!(!law(1.0, 1.0, 2.5).in_theorem_regime());
        assert!(law(1.0, 1.0, 3.0).in_theorem_regime());
    }

    #[test]
    fn stress_examples() {
        let l = law(1.0, 1.0, 3.0);
        assert_eq!(l.stress(&Tensor2::zeros(2)).unwrap(), Tensor2::zeros(2));
        let d = Tensor2::diag(&[1.0, -1.0]);
        let s = l.stress(&d).unwrap();
        let expect = d.scale(1.0 + 2f64.sqrt());
        assert!(s.max_abs_diff(&expect) < 1e-15);

        let l2 = law(3.0, 7.0, 2.0);
        let d = Tensor2::from_rows(&[&[0.3, -1.2], &[-1.2, 4.0]]);
        assert_eq!(l2.stress(&d).unwrap(), d);

        let bad = Tensor2::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(l.stress(&bad), Err(Error::AsymmetricTensor(_))));
    }

    #[test]
    fn jacobian_at_zero() {
        for r in [2.5, 3.0, 4.0] {
            let l = law(1.7, 0.4, r);
            let j = l.stress_jacobian(&Tensor2::zeros(3));
            let expect = 1.7f64.powf(r - 2.0);
            for i in 0..3 {
                for k in 0..3 {
                    for a in 0..3 {
                        for b in 0..3 {
                            let e = if i == a && k == b { expect } else { 0.0 };
                            assert!((j.get(i, k, a, b) - e).abs() < 1e-14);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn jacobian_directional_derivative_along_d() {
        // d/dt (S(tD):D) at t = 1 equals Q(D, D)
        let l = law(0.8, 1.3, 4.5);
        let d = Tensor2::from_rows(&[&[0.4, 1.1], &[1.1, -0.7]]);
        let q = l.stress_jacobian(&d).quadratic_form(&d);
        let f = |t: f64| l.stress_unchecked(&d.scale(t)).ddot(&d);
        let h = 1e-5;
        let fd = (f(1.0 + h) - f(1.0 - h)) / (2.0 * h);
        assert!((q - fd).abs() < 1e-8 * q.abs());
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        for r in [3.0, 4.0, 5.5] {
            let err = jacobian_fd_sweep(&law(2.0, 0.5, r), 3, 200, 10.0, 1e-6, 5);
            assert!(err < 1e-6, "r = {r}: {err}");
        }
    }

    #[test]
    fn derived_constant_examples() {
        let c = law(1.0, 1.0, 4.0).derived_constants();
        assert_eq!((c.c0, c.c3, c.c4, c.c1), (1.0, 1.0, 1.0, 3.0));
        let c = law(2.0, 0.5, 2.0).derived_constants();
        assert_eq!((c.c0, c.c1, c.c2, c.c3, c.c4), (1.0, 1.0, 1.0, 1.0, 1.0));
        let c = law(2.0, 0.5, 3.0).derived_constants();
        assert_eq!((c.c0, c.c4), (0.5, 2.0));
        assert!(c.c0 <= c.c1);
    }

    #[test]
    fn margins_at_zero_and_tight_cases() {
        let l = law(1.0, 1.0, 4.0);
        let z = Tensor2::zeros(2);
        assert_eq!(l.coercivity_margin(&z).value, 0.0);
        assert_eq!(l.growth_margin(&z).value, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let d = random_symmetric(&mut rng, 3, 10.0);
            // μ₀ = μ₁ = 1 makes coercivity and growth tight
            assert!(l.coercivity_margin(&d).normalized().abs() < 1e-14);
            assert!(l.growth_margin(&d).normalized().abs() < 1e-14);
        }
        let l = law(2.0, 0.5, 4.0);
        for _ in 0..100 {
            let d = random_symmetric(&mut rng, 3, 10.0);
            assert!(l.coercivity_margin(&d).value > 0.0);
            assert!(l.growth_margin(&d).value > 0.0);
        }
    }

    #[test]
    fn monotonicity_examples() {
        let l = law(2.0, 0.5, 4.0);
        let d = Tensor2::from_rows(&[&[1.0, 0.5], &[0.5, -2.0]]);
        assert_eq!(l.monotonicity_margin(&d, &d).value, 0.0);
        let m = l.monotonicity_margin(&d.scale(-1.0), &d);
        let lhs = 4.0 * l.stress_unchecked(&d).ddot(&d);
        assert!(m.value > 0.0);
        let (got, _, _) = l.monotonicity_terms(&d.scale(-1.0), &d);
        assert!((got - lhs).abs() < 1e-12 * lhs);
    }

    #[test]
    fn jacobian_form_at_zero() {
        let l = law(1.5, 2.0, 3.5);
        let b = Tensor2::from_rows(&[&[1.0, 2.0], &[2.0, -0.5]]);
        let q = l.stress_jacobian(&Tensor2::zeros(2)).quadratic_form(&b);
        assert!((q - 1.5f64.powf(1.5) * b.ddot(&b)).abs() < 1e-13);
        // B ∥ D saturates the anisotropic term
        let d = Tensor2::from_rows(&[&[0.3, 1.0], &[1.0, 2.0]]);
        let j = l.stress_jacobian(&d);
        let along = j.quadratic_form(&d) / d.ddot(&d);
        let perp = Tensor2::from_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let perp = perp - d.scale(perp.ddot(&d) / d.ddot(&d));
        let across = j.quadratic_form(&perp) / perp.ddot(&perp);
        assert!(along > across);
        let (lo, hi) = l.jacobian_form_bounds(&d, &b);
        assert!(lo.value > 0.0 && hi.value > 0.0);
    }

    #[test]
    fn jacobian_operator_norm_bounded_by_c2() {
        let l = law(0.5, 2.0, 5.5);
        let c = l.derived_constants();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..500 {
            let d = random_symmetric(&mut rng, 3, 10.0);
            let b = random_symmetric(&mut rng, 3, 1.0);
            let jb = l.stress_jacobian(&d).apply(&b).norm() / b.norm();
            let bound = c.c2 * (1.0 + d.norm()).powf(l.r - 2.0);
            assert!(jb <= bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn small_sweep_holds() {
        for (mu0, mu1) in [(1.0, 1.0), (2.0, 0.5), (0.5, 2.0)] {
            for r in [3.0, 4.0, 5.5] {
                let l = law(mu0, mu1, r);
                let rep = margin_sweep(&l, 3, 2000, 10.0, 17);
                assert!(rep.all_hold(1e-12), "{rep:?}");
                assert!(rep.min_monotonicity_ratio >= l.derived_constants().c3_monotone);
            }
        }
    }

    fn rotation(a: f64, b: f64, c: f64) -> Tensor2 {
        let rz = Tensor2::from_rows(&[&[a.cos(), -a.sin(), 0.0], &[a.sin(), a.cos(), 0.0], &[0.0, 0.0, 1.0]]);
        let ry = Tensor2::from_rows(&[&[b.cos(), 0.0, b.sin()], &[0.0, 1.0, 0.0], &[-b.sin(), 0.0, b.cos()]]);
        let rx = Tensor2::from_rows(&[&[1.0, 0.0, 0.0], &[0.0, c.cos(), -c.sin()], &[0.0, c.sin(), c.cos()]]);
        rz.matmul(&ry).matmul(&rx)
    }

    fn sym3() -> impl Strategy<Value = Tensor2> {
        prop::array::uniform6(-10.0f64..10.0)
            .prop_map(|e| Tensor2::from_rows(&[&[e[0], e[1], e[2]], &[e[1], e[3], e[4]], &[e[2], e[4], e[5]]]))
    }

    proptest! {
        #[test]
        fn frame_indifference(d in sym3(), a in 0.0f64..6.3, b in 0.0f64..6.3, c in 0.0f64..6.3,
                              r in 2.0f64..6.0) {
            let l = law(1.2, 0.7, r);
            let q = rotation(a, b, c);
            let rotated = q.matmul(&d).matmul(&q.transpose());
            let lhs = l.stress_unchecked(&rotated);
            let rhs = q.matmul(&l.stress_unchecked(&d)).matmul(&q.transpose());
            let scale = l.stress_unchecked(&d).norm().max(1.0);
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12 * scale);
        }

        #[test]
        fn stress_is_odd(d in sym3(), r in 2.0f64..6.0) {
            let l = law(0.9, 1.4, r);
            let s = l.stress_unchecked(&d);
            prop_assert!(l.stress_unchecked(&d.scale(-1.0)).max_abs_diff(&s.scale(-1.0)) == 0.0);
        }

        #[test]
        fn identity_at_r_two(d in sym3(), mu0 in 0.1f64..5.0, mu1 in 0.0f64..5.0) {
            prop_assert_eq!(law(mu0, mu1, 2.0).stress_unchecked(&d), d);
        }

        #[test]
        fn jacobian_major_symmetry(d in sym3(), r in 2.0f64..6.0) {
            let j = law(1.0, 2.0, r).stress_jacobian(&d);
            let scale = (1.0 + d.norm()).powf(r - 2.0) * 10.0;
            prop_assert!(j.max_major_asymmetry() <= 1e-14 * scale);
        }
    }
}
