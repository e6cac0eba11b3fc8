use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type SMatrix = Matrix3<Complex64>;

/// A 3x3 scattering matrix sampled on an angular-frequency grid.
///
/// Column `j` holds the response to an excitation at port `j`; phasors use `e^{+jwt}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SParameterSet {
    omega: Vec<f64>,
    s: Vec<SMatrix>,
}

impl SParameterSet {
    pub fn new(omega: Vec<f64>, s: Vec<SMatrix>) -> Result<Self> {
        check_grid(&omega)?;
        if omega.len() != s.len() {
            return Err(Error::InvalidParam {
                name: "s",
                reason: format!("{} matrices for {} frequencies", s.len(), omega.len()),
            });
        }
        if let Some(i) = s.iter().position(|m| m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())) {
            return Err(Error::InvalidParam { name: "s", reason: format!("non-finite entry at index {i}") });
        }
        Ok(Self { omega, s })
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn matrices(&self) -> &[SMatrix] {
        &self.s
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn at(&self, i: usize) -> &SMatrix {
        &self.s[i]
    }

    /// `S_ij` at grid index `k`, with 1-based port numbers.
    pub fn get(&self, k: usize, i: usize, j: usize) -> Complex64 {
        self.s[k][(i - 1, j - 1)]
    }

    pub fn il_db(&self, k: usize) -> f64 {
        db_loss(self.s[k][(1, 0)])
    }

    pub fn rl_db(&self, k: usize) -> f64 {
        db_loss(self.s[k][(0, 0)])
    }

    pub fn ix_db(&self, k: usize) -> f64 {
        db_loss(self.s[k][(2, 0)])
    }

    pub fn transpose(&self) -> Self {
        Self { omega: self.omega.clone(), s: self.s.iter().map(|m| m.transpose()).collect() }
    }

    /// Largest `|S - S^T|` entry over the grid.
    pub fn asymmetry(&self) -> f64 {
        self.s.iter().map(|m| (m - m.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max)).fold(0.0, f64::max)
    }

    /// Largest entrywise difference to another set on the same grid.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.len(), other.len(), "grids differ");
        self.s
            .iter()
            .zip(&other.s)
            .map(|(a, b)| (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }

    /// Largest deviation of any column norm from one.
    pub fn unitarity_error(&self) -> f64 {
        self.s
            .iter()
            .map(|m| (0..3).map(|j| (m.column(j).norm() - 1.0).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }
}

/// Fills a threefold-symmetric matrix from its first column `(S11, S21, S31)`
/// by the rotation `S_{i+1,j+1} = S_ij`.
pub fn circulant(col: [Complex64; 3]) -> SMatrix {
    SMatrix::from_fn(|r, c| col[(r + 3 - c) % 3])
}

/// `-20 log10 |s|`.
pub fn db_loss(s: Complex64) -> f64 {
    -20.0 * s.norm().log10()
}

pub(crate) fn check_grid(omega: &[f64]) -> Result<()> {
    if omega.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if let Some(i) = omega.iter().position(|w| !w.is_finite()) {
        return Err(Error::InvalidParam { name: "omega", reason: format!("non-finite at index {i}") });
    }
    if let Some(i) = omega.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::UnorderedGrid(i + 1));
    }
    Ok(())
}

/// `n` evenly spaced points from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn circulant_matches_rotation_rule() {
        let m = circulant([c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(m[((i + 1) % 3, (j + 1) % 3)], m[(i, j)]);
            }
        }
        assert_eq!(m[(1, 0)], c(2.0, 0.0));
        assert_eq!(m[(0, 1)], c(3.0, 0.0));
        assert_eq!(m[(2, 1)], c(2.0, 0.0));
    }

    #[test]
    fn grid_validation() {
        let m = SMatrix::identity();
        assert_eq!(SParameterSet::new(vec![], vec![]), Err(Error::EmptyGrid));
        assert_eq!(SParameterSet::new(vec![1.0, 1.0], vec![m, m]), Err(Error::UnorderedGrid(1)));
        assert!(SParameterSet::new(vec![1.0], vec![m, m]).is_err());
        let mut bad = m;
        bad[(0, 0)] = c(f64::NAN, 0.0);
        assert!(SParameterSet::new(vec![1.0], vec![bad]).is_err());
    }

    #[test]
    fn db_views() {
        let m = circulant([c(0.1, 0.0), c(0.0, 1.0), c(0.01, 0.0)]);
        let s = SParameterSet::new(vec![1.0], vec![m]).unwrap();
        assert!((s.rl_db(0) - 20.0).abs() < 1e-12);
        assert!(s.il_db(0).abs() < 1e-12);
        assert!((s.ix_db(0) - 40.0).abs() < 1e-12);
        assert_eq!(s.get(0, 2, 1), c(0.0, 1.0));
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(1.0, 2.0, 5);
        assert_eq!(v, vec![1.0, 1.25, 1.5, 1.75, 2.0]);
        assert_eq!(linspace(3.0, 4.0, 1), vec![3.0]);
    }
}
