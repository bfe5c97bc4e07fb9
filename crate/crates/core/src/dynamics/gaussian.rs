use nalgebra::{DMatrix, SymmetricEigen};

use super::expm::CMatrix;
use super::moments::MomentMatrix;
use super::network::NetworkSpec;
use crate::error::{Error, Result};

/// Product of thermal states with the given mean occupations, one per mode.
pub fn thermal_state(network: &NetworkSpec, occupations: &[f64]) -> Result<MomentMatrix> {
    if occupations.len() != network.n_modes() {
        return Err(Error::Argument(format!(
            "{} occupations for a {}-mode network",
            occupations.len(),
            network.n_modes()
        )));
    }
    if let Some(n) = occupations.iter().find(|n| !(n.is_finite() && **n >= 0.0)) {
        return Err(Error::Argument(format!("occupation {n} must be finite and non-negative")));
    }
    let m = occupations.len();
    let normal = CMatrix::from_fn(m, m, |i, j| {
        if i == j { occupations[i].into() } else { 0.0.into() }
    });
    Ok(MomentMatrix::from_correlations(&normal, &CMatrix::zeros(m, m)))
}

/// Symplectic eigenvalues of the state, ascending. Each is at least `1/2`
/// for a physical state (`1/2` for a pure mode, `n̄ + 1/2` for a thermal one).
///
/// Computed as the square roots of the (doubly degenerate) eigenvalues of
/// `σ^{1/2} Jᵀ σ J σ^{1/2}`, which is similar to `-(Jσ)²`.
pub fn symplectic_eigenvalues(c: &MomentMatrix) -> Result<Vec<f64>> {
    let sigma = c.quadrature_covariance();
    let n = sigma.nrows();
    let eig = SymmetricEigen::new(sigma.clone());
    let min_eig = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(min_eig > 0.0) {
        return Err(Error::Physicality(format!(
            "covariance not positive definite (smallest eigenvalue {min_eig:e})"
        )));
    }
    let sqrt_sigma = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt))
        * eig.eigenvectors.transpose();
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 0..n / 2 {
        j[(2 * k, 2 * k + 1)] = 1.0;
        j[(2 * k + 1, 2 * k)] = -1.0;
    }
    let k = &sqrt_sigma * j.transpose() * &sigma * &j * &sqrt_sigma;
    let k = (&k + k.transpose()) * 0.5;
    let mut squares: Vec<f64> = SymmetricEigen::new(k).eigenvalues.iter().cloned().collect();
    squares.sort_by(f64::total_cmp);
    let nus: Vec<f64> = squares
        .chunks(2)
        .map(|pair| (0.5 * (pair[0] + pair[1])).max(0.0).sqrt())
        .collect();
    if nus[0] < 0.5 - 1e-6 {
        return Err(Error::Physicality(format!(
            "symplectic eigenvalue {} below the vacuum bound 1/2",
            nus[0]
        )));
    }
    Ok(nus)
}

/// Von Neumann entropy in bits of a thermal mode with symplectic eigenvalue `nu`.
pub fn entropy_bits(nu: f64) -> f64 {
    let plus = nu + 0.5;
    let minus = nu - 0.5;
    let xlogx = |x: f64| if x <= 0.0 { 0.0 } else { x * x.log2() };
    xlogx(plus) - xlogx(minus)
}

/// Entropy in bits carried by each symplectic mode of the state, in the
/// order of [`symplectic_eigenvalues`].
pub fn mode_entropy(c: &MomentMatrix) -> Result<Vec<f64>> {
    Ok(symplectic_eigenvalues(c)?.into_iter().map(entropy_bits).collect())
}
