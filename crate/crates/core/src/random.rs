//! Seeded random matrices and states for experiments and tests.

use crate::linalg::{ComplexMatrix, ComplexVector, C64};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Vector with i.i.d. standard complex Gaussian entries.
pub fn gaussian_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexVector {
    ComplexVector::new((0..dim).map(|_| gaussian(rng)).collect()).expect("finite gaussian entries")
}

/// Uniformly random unit vector.
pub fn state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexVector {
    loop {
        if let Ok(v) = gaussian_vector(dim, rng).normalized() {
            return v;
        }
    }
}

/// Haar-distributed unitary: QR of a Gaussian matrix with the diagonal phases of R removed.
pub fn unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = gaussian_matrix(n, n, rng).into_inner();
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let phases = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                C64::new(1.0, 0.0)
            }
        } else {
            C64::new(0.0, 0.0)
        }
    });
    ComplexMatrix::from_inner(q * phases).expect("finite unitary")
}

/// Random full-rank density matrix `G G^dagger / Tr`.
pub fn density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = gaussian_matrix(n, n, rng);
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    rho.scale(C64::new(1.0 / tr, 0.0))
}

/// Random probability vector drawn from the flat Dirichlet distribution.
pub fn probabilities<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}
