//! Binary restart files.
//!
//! Layout (little-endian): magic `GSGF`, version `u32 = 1`, `dim: u32`, `n: u32`,
//! `t, alpha1, mu0, mu1, r: f64`, then the `dim` physical velocity components,
//! each `n^dim` values in row-major order.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::SpectralVectorField;
use crate::grid::Grid;

pub const MAGIC: &[u8; 4] = b"GSGF";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 * 3 + 8 * 5;

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub dim: usize,
    pub n: usize,
    pub t: f64,
    pub alpha1: f64,
    pub mu0: f64,
    pub mu1: f64,
    pub r: f64,
    /// Physical velocity components, row-major.
    pub components: Vec<Vec<f64>>,
}

impl Snapshot {
    pub fn from_field(u: &SpectralVectorField, t: f64, alpha1: f64, mu0: f64, mu1: f64, r: f64) -> Result<Self> {
        let g = u.grid();
        Ok(Snapshot {
            dim: g.dim(),
            n: g.n(),
            t,
            alpha1,
            mu0,
            mu1,
            r,
            components: u.to_physical()?,
        })
    }

    /// Spectral field on `grid`; fails when the grid shape differs from the file.
    pub fn to_field(&self, grid: &Arc<Grid>) -> Result<SpectralVectorField> {
        if grid.dim() != self.dim || grid.n() != self.n {
            return Err(Error::InvalidGrid(format!(
                "snapshot is {}D with n = {}, grid is {}D with n = {}",
                self.dim,
                self.n,
                grid.dim(),
                grid.n()
            )));
        }
        SpectralVectorField::from_physical(grid, &self.components)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let count: usize = self.components.iter().map(Vec::len).sum();
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * count);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.dim as u32).to_le_bytes());
        out.extend_from_slice(&(self.n as u32).to_le_bytes());
        for x in [self.t, self.alpha1, self.mu0, self.mu1, self.r] {
            out.extend_from_slice(&x.to_le_bytes());
        }
        for c in &self.components {
            for x in c {
                out.extend_from_slice(&x.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Self> {
        let fail = |message: String| Error::Snapshot {
            path: path.to_path_buf(),
            message,
        };
        if bytes.len() < HEADER_LEN {
            return Err(fail(format!("truncated header ({} bytes)", bytes.len())));
        }
        if &bytes[..4] != MAGIC {
            return Err(fail("bad magic".into()));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
        let version = u32_at(4);
        if version != VERSION {
            return Err(fail(format!("unsupported version {version}")));
        }
        let dim = u32_at(8) as usize;
        let n = u32_at(12) as usize;
        if !(dim == 2 || dim == 3) || n == 0 {
            return Err(fail(format!("invalid shape dim = {dim}, n = {n}")));
        }
        let len = n.pow(dim as u32);
        let expected = HEADER_LEN + 8 * dim * len;
        if bytes.len() != expected {
            return Err(fail(format!("expected {expected} bytes, found {}", bytes.len())));
        }
        let mut components = Vec::with_capacity(dim);
        for c in 0..dim {
            let base = HEADER_LEN + 8 * c * len;
            components.push((0..len).map(|i| f64_at(base + 8 * i)).collect());
        }
        Ok(Snapshot {
            dim,
            n,
            t: f64_at(16),
            alpha1: f64_at(24),
            mu0: f64_at(32),
            mu1: f64_at(40),
            r: f64_at(48),
            components,
        })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path)?;
        Self::from_bytes(&bytes, path)
    }
}
