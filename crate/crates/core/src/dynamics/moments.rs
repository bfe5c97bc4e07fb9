use nalgebra::DMatrix;
use num_complex::Complex64;

use super::expm::CMatrix;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Operator second moments `C_ij = <v_i v_j>` of a zero-mean Gaussian state,
/// with `v = (a1, a1†, a2, a2†, ...)`. Index `2k` is `a_k`, `2k + 1` is `a_k†`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrix {
    entries: CMatrix,
}

impl MomentMatrix {
    pub fn from_entries(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() || entries.nrows() % 2 != 0 || entries.nrows() == 0 {
            return Err(Error::Argument(format!(
                "moment matrix must be 2m x 2m, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(MomentMatrix { entries })
    }

    /// Builds the moments from normal-ordered correlations
    /// `normal[(i, j)] = <a_i† a_j>` and anomalous ones `anomalous[(i, j)] = <a_i a_j>`.
    /// `normal` must be Hermitian and `anomalous` symmetric.
    pub fn from_correlations(normal: &CMatrix, anomalous: &CMatrix) -> Self {
        let m = normal.nrows();
        assert_eq!(normal.shape(), (m, m));
        assert_eq!(anomalous.shape(), (m, m));
        let mut c = CMatrix::zeros(2 * m, 2 * m);
        for i in 0..m {
            for j in 0..m {
                let delta = if i == j { ONE } else { ZERO };
                c[(2 * i, 2 * j)] = anomalous[(i, j)];
                c[(2 * i, 2 * j + 1)] = delta + normal[(j, i)];
                c[(2 * i + 1, 2 * j)] = normal[(i, j)];
                c[(2 * i + 1, 2 * j + 1)] = anomalous[(i, j)].conj();
            }
        }
        MomentMatrix { entries: c }
    }

    pub fn ground(n_modes: usize) -> Self {
        let z = CMatrix::zeros(n_modes, n_modes);
        Self::from_correlations(&z, &z)
    }

    /// Two-mode squeezed vacuum on modes `i`, `j` (`<a_i a_j> = sinh(2r)/2`,
    /// `<a_i† a_i> = sinh²r`), vacuum elsewhere.
    pub fn two_mode_squeezed(n_modes: usize, i: usize, j: usize, r: f64) -> Self {
        assert!(i != j && i < n_modes && j < n_modes);
        let mut normal = CMatrix::zeros(n_modes, n_modes);
        let mut anomalous = CMatrix::zeros(n_modes, n_modes);
        let occ = r.sinh().powi(2);
        normal[(i, i)] = occ.into();
        normal[(j, j)] = occ.into();
        anomalous[(i, j)] = (0.5 * (2.0 * r).sinh()).into();
        anomalous[(j, i)] = anomalous[(i, j)];
        Self::from_correlations(&normal, &anomalous)
    }

    pub fn n_modes(&self) -> usize {
        self.entries.nrows() / 2
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    /// `<a_k† a_k>`, complex as computed; see [`MomentMatrix::real_occupation`].
    pub fn occupation(&self, k: usize) -> Complex64 {
        self.entries[(2 * k + 1, 2 * k)]
    }

    /// `<a_k† a_k>` with its imaginary part checked against `1e-8` times the
    /// largest moment (floored at 1). Strong squeezing inside a segment
    /// leaves rounding well above `1e-10` even when the final moments are
    /// small.
    pub fn real_occupation(&self, k: usize) -> Result<f64> {
        let z = self.occupation(k);
        let scale = self.entries.iter().map(|e| e.norm()).fold(1.0, f64::max);
        if z.im.abs() > 1e-8 * scale {
            return Err(Error::NotReal { real: z.re, imag: z.im });
        }
        Ok(z.re)
    }

    /// `<a_i a_j†>`
    pub fn cross_correlation(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(2 * i, 2 * j + 1)]
    }

    /// The commutator matrix `Ω_ij = [v_i, v_j]` for `n_modes` modes.
    pub fn commutators(n_modes: usize) -> CMatrix {
        let mut omega = CMatrix::zeros(2 * n_modes, 2 * n_modes);
        for k in 0..n_modes {
            omega[(2 * k, 2 * k + 1)] = ONE;
            omega[(2 * k + 1, 2 * k)] = -ONE;
        }
        omega
    }

    /// `max |(C - Cᵀ) - Ω|`
    pub fn commutator_defect(&self) -> f64 {
        let d = &self.entries - self.entries.transpose() - Self::commutators(self.n_modes());
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |conj(C_ij) - C_{P(j) P(i)}|` where `P` swaps `a_k` and `a_k†`.
    pub fn conjugation_defect(&self) -> f64 {
        let n = self.entries.nrows();
        let p = |i: usize| i ^ 1;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let d = self.entries[(i, j)].conj() - self.entries[(p(j), p(i))];
                worst = worst.max(d.norm());
            }
        }
        worst
    }

    /// Real symmetrized covariance `σ_ij = <{r_i, r_j}>/2` of the quadratures
    /// `r = (x1, p1, x2, p2, ...)` with `x = (a + a†)/√2`, `p = -i(a - a†)/√2`.
    /// The vacuum has `σ = I/2`.
    pub fn quadrature_covariance(&self) -> DMatrix<f64> {
        let n = self.entries.nrows();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut t = CMatrix::zeros(n, n);
        for k in 0..n / 2 {
            t[(2 * k, 2 * k)] = Complex64::new(h, 0.0);
            t[(2 * k, 2 * k + 1)] = Complex64::new(h, 0.0);
            t[(2 * k + 1, 2 * k)] = Complex64::new(0.0, -h);
            t[(2 * k + 1, 2 * k + 1)] = Complex64::new(0.0, h);
        }
        let r = &t * &self.entries * t.transpose();
        DMatrix::from_fn(n, n, |i, j| 0.5 * (r[(i, j)].re + r[(j, i)].re))
    }

    pub(crate) fn transformed(&self, u: &CMatrix) -> Self {
        MomentMatrix { entries: u * &self.entries * u.transpose() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_satisfies_invariants() {
        let g = MomentMatrix::ground(3);
        assert_eq!(g.commutator_defect(), 0.0);
        assert_eq!(g.conjugation_defect(), 0.0);
        let sigma = g.quadrature_covariance();
        assert!((sigma - DMatrix::identity(6, 6) * 0.5).abs().max() < 1e-15);
    }

    #[test]
    fn squeezed_state_satisfies_invariants() {
        let s = MomentMatrix::two_mode_squeezed(3, 0, 1, 2.0);
        assert!(s.commutator_defect() < 1e-14);
        assert!(s.conjugation_defect() < 1e-14);
        assert!((s.real_occupation(0).unwrap() - 2f64.sinh().powi(2)).abs() < 1e-12);
        assert_eq!(s.real_occupation(2).unwrap(), 0.0);
    }

    #[test]
    fn complex_occupation_is_reported() {
        let mut c = MomentMatrix::ground(1).into_entries();
        c[(1, 0)] = Complex64::new(1.0, 1e-6);
        let m = MomentMatrix::from_entries(c).unwrap();
        assert!(matches!(m.real_occupation(0), Err(Error::NotReal { .. })));
    }

    #[test]
    fn shape_checked() {
        assert!(MomentMatrix::from_entries(CMatrix::zeros(3, 3)).is_err());
        assert!(MomentMatrix::from_entries(CMatrix::zeros(2, 4)).is_err());
    }
}
