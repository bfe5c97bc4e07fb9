//! Matrix exponential by scaling and squaring around diagonal Padé
//! approximants of degree 3, 5, 7, 9 and 13, choosing the lowest degree whose
//! backward-error bound covers the 1-norm of the argument.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.539398330063230e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn norm1(x: &CMatrix) -> f64 {
    x.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn scaled(x: &CMatrix, s: f64) -> CMatrix {
    x.map(|z| z * s)
}

/// `(V - U)^{-1} (V + U)`
fn pade_quotient(u: CMatrix, v: CMatrix) -> Result<CMatrix> {
    let p = &v + &u;
    let q = v - u;
    q.lu()
        .solve(&p)
        .ok_or_else(|| Error::Argument("singular Padé denominator".into()))
}

/// Padé approximant of degree 3..9 from the even powers `I, X², X⁴, ...`.
fn pade_low(x: &CMatrix, b: &[f64], powers: &[CMatrix]) -> Result<CMatrix> {
    let n = x.nrows();
    let mut odd = CMatrix::zeros(n, n);
    let mut even = CMatrix::zeros(n, n);
    for (k, p) in powers.iter().enumerate() {
        even += scaled(p, b[2 * k]);
        odd += scaled(p, b[2 * k + 1]);
    }
    pade_quotient(x * odd, even)
}

fn pade_13(x: &CMatrix) -> Result<CMatrix> {
    let n = x.nrows();
    let id = CMatrix::identity(n, n);
    let x2 = x * x;
    let x4 = &x2 * &x2;
    let x6 = &x4 * &x2;
    let b = &B13;
    let inner_u = scaled(&x6, b[13]) + scaled(&x4, b[11]) + scaled(&x2, b[9]);
    let u = x * (&x6 * inner_u
        + scaled(&x6, b[7])
        + scaled(&x4, b[5])
        + scaled(&x2, b[3])
        + scaled(&id, b[1]));
    let inner_v = scaled(&x6, b[12]) + scaled(&x4, b[10]) + scaled(&x2, b[8]);
    let v = &x6 * inner_v
        + scaled(&x6, b[6])
        + scaled(&x4, b[4])
        + scaled(&x2, b[2])
        + scaled(&id, b[0]);
    pade_quotient(u, v)
}

/// `e^X` for a square complex matrix.
pub fn matrix_exponential(x: &CMatrix) -> Result<CMatrix> {
    assert!(x.is_square(), "matrix exponential of a non-square matrix");
    if x.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFiniteInput);
    }
    let n = x.nrows();
    let id = CMatrix::identity(n, n);
    let nrm = norm1(x);
    if nrm <= THETA_9 {
        let x2 = x * x;
        let mut powers = vec![id, x2.clone()];
        if nrm <= THETA_3 {
            return pade_low(x, &B3, &powers);
        }
        powers.push(&x2 * &x2);
        if nrm <= THETA_5 {
            return pade_low(x, &B5, &powers);
        }
        powers.push(&powers[2] * &x2);
        if nrm <= THETA_7 {
            return pade_low(x, &B7, &powers);
        }
        powers.push(&powers[3] * &x2);
        return pade_low(x, &B9, &powers);
    }
    let squarings = (nrm / THETA_13).log2().ceil().max(0.0) as i32;
    let mut e = pade_13(&scaled(x, 0.5f64.powi(squarings)))?;
    for _ in 0..squarings {
        e = &e * &e;
    }
    Ok(e)
}

/// `e^X` together with the Fréchet derivative `L(X, E) = d/dh e^{X + hE}|_{h=0}`,
/// read off the upper-right block of `exp([[X, E], [0, X]])`.
pub fn exponential_with_derivative(x: &CMatrix, direction: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let n = x.nrows();
    let mut block = CMatrix::zeros(2 * n, 2 * n);
    block.view_mut((0, 0), (n, n)).copy_from(x);
    block.view_mut((n, n), (n, n)).copy_from(x);
    block.view_mut((0, n), (n, n)).copy_from(direction);
    let e = matrix_exponential(&block)?;
    Ok((
        e.view((0, 0), (n, n)).into_owned(),
        e.view((0, n), (n, n)).into_owned(),
    ))
}
