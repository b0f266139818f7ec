use std::fmt;

use nalgebra::{DMatrix, SMatrix, Schur};
use serde::{Deserialize, Serialize};

/// Real parts within this band of zero (1/day) are reported as marginal.
pub const MARGINAL_BAND: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
}

impl Eigenvalue {
    pub fn real(re: f64) -> Self {
        Eigenvalue { re, im: 0.0 }
    }

    pub fn norm(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

impl fmt::Display for Eigenvalue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im == 0.0 {
            write!(f, "{}", self.re)
        } else {
            write!(f, "{}{:+}i", self.re, self.im)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    LocallyAsymptoticallyStable,
    Unstable,
    Marginal,
}

pub fn classify(eigenvalues: &[Eigenvalue]) -> Verdict {
    if eigenvalues.iter().any(|l| l.re > MARGINAL_BAND) {
        Verdict::Unstable
    } else if eigenvalues.iter().all(|l| l.re < -MARGINAL_BAND) {
        Verdict::LocallyAsymptoticallyStable
    } else {
        Verdict::Marginal
    }
}

/// Eigenvalues of a real square matrix via the real Schur form, sorted by
/// decreasing real part then decreasing imaginary part.
pub fn eigenvalues<const N: usize>(m: &SMatrix<f64, N, N>) -> Vec<Eigenvalue> {
    let schur = Schur::new(DMatrix::from_column_slice(N, N, m.as_slice()));
    let mut out: Vec<Eigenvalue> = schur
        .complex_eigenvalues()
        .iter()
        .map(|c| Eigenvalue { re: c.re, im: c.im })
        .collect();
    out.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    out
}

pub fn spectral_radius<const N: usize>(m: &SMatrix<f64, N, N>) -> f64 {
    eigenvalues(m)
        .iter()
        .map(Eigenvalue::norm)
        .fold(0.0, f64::max)
}
