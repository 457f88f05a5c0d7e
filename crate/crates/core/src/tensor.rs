//! Small dense `d × d` and `d × d × d × d` tensors (`d ≤ 3`) for pointwise constitutive work.

use std::ops::{Add, Mul, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tensor2 {
    dim: usize,
    m: [[f64; 3]; 3],
}

impl Tensor2 {
    pub fn zeros(dim: usize) -> Self {
        assert!((1..=3).contains(&dim), "tensor dimension must be 1..=3");
        Tensor2 { dim, m: [[0.0; 3]; 3] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diag(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i, j| if i == j { values[i] } else { 0.0 })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                t.m[i][j] = f(i, j);
            }
        }
        t
    }

    /// Builds from row-major entries; `rows.len()` must be a square of 1, 2 or 3.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let d = rows.len();
        Self::from_fn(d, |i, j| rows[i][j])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        debug_assert!(i < self.dim && j < self.dim);
        self.m[i][j] = value;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.m[j][i])
    }

    pub fn sym(&self) -> Self {
        Self::from_fn(self.dim, |i, j| 0.5 * (self.m[i][j] + self.m[j][i]))
    }

    /// Double contraction `A : B = Σ A_ij B_ij`.
    pub fn ddot(&self, other: &Self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += self.m[i][j] * other.m[i][j];
            }
        }
        s
    }

    /// Frobenius norm `sqrt(tr(AᵀA))`.
    pub fn norm(&self) -> f64 {
        self.ddot(self).sqrt()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..i {
                worst = worst.max((self.m[i][j] - self.m[j][i]).abs());
            }
        }
        worst
    }

    pub fn matmul(&self, other: &Self) -> Self {
        Self::from_fn(self.dim, |i, j| {
            (0..self.dim).map(|k| self.m[i][k] * other.m[k][j]).sum()
        })
    }

    pub fn scale(&self, a: f64) -> Self {
        Self::from_fn(self.dim, |i, j| a * self.m[i][j])
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.m[i][j] - other.m[i][j]).abs());
            }
        }
        worst
    }
}

impl Add for Tensor2 {
    type Output = Tensor2;
    fn add(self, rhs: Tensor2) -> Tensor2 {
        Tensor2::from_fn(self.dim, |i, j| self.m[i][j] + rhs.m[i][j])
    }
}

impl Sub for Tensor2 {
    type Output = Tensor2;
    fn sub(self, rhs: Tensor2) -> Tensor2 {
        Tensor2::from_fn(self.dim, |i, j| self.m[i][j] - rhs.m[i][j])
    }
}

impl Mul<Tensor2> for f64 {
    type Output = Tensor2;
    fn mul(self, rhs: Tensor2) -> Tensor2 {
        rhs.scale(self)
    }
}

/// Fourth-order tensor `J_ijkl`, e.g. `∂S_ij/∂D_kl`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tensor4 {
    dim: usize,
    a: [[[[f64; 3]; 3]; 3]; 3],
}

impl Tensor4 {
    pub fn zeros(dim: usize) -> Self {
        Tensor4 {
            dim,
            a: [[[[0.0; 3]; 3]; 3]; 3],
        }
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        t.a[i][j][k][l] = f(i, j, k, l);
                    }
                }
            }
        }
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.a[i][j][k][l]
    }

    /// `(J B)_ij = Σ_kl J_ijkl B_kl`.
    pub fn apply(&self, b: &Tensor2) -> Tensor2 {
        Tensor2::from_fn(self.dim, |i, j| {
            let mut s = 0.0;
            for k in 0..self.dim {
                for l in 0..self.dim {
                    s += self.a[i][j][k][l] * b.get(k, l);
                }
            }
            s
        })
    }

    /// Quadratic form `Σ J_ijkl B_ij B_kl`.
    pub fn quadratic_form(&self, b: &Tensor2) -> f64 {
        self.apply(b).ddot(b)
    }

    /// Largest `|J_ijkl - J_klij|`.
    pub fn max_major_asymmetry(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        worst = worst.max((self.a[i][j][k][l] - self.a[k][l][i][j]).abs());
                    }
                }
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frobenius_and_contraction() {
        let a = Tensor2::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(a.ddot(&Tensor2::identity(2)), 5.0);
        assert_eq!(a.norm(), 30f64.sqrt());
        assert_eq!(a.max_asymmetry(), 1.0);
        assert_eq!(a.sym().max_asymmetry(), 0.0);
        assert_eq!(a.transpose().get(0, 1), 3.0);
    }
}
