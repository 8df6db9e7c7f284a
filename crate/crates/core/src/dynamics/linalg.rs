//! Dense complex linear algebra for the Liouvillian: diagonalization of a
//! general (non-normal) matrix and the matrix exponential.

use nalgebra::Schur;
use num_complex::Complex64;

use crate::state::{CMatrix, CVector};

/// Eigenvector matrices with a condition number above this are treated as defective.
pub const MAX_EIGENVECTOR_CONDITION: f64 = 1e10;

pub(crate) struct Eigensystem {
    pub values: Vec<Complex64>,
    pub vectors: CMatrix,
    pub inverse: CMatrix,
    /// `‖V‖₁ ‖V⁻¹‖₁`.
    pub condition: f64,
}

impl Eigensystem {
    /// `V diag(exp(λ t)) V⁻¹ x`.
    pub fn propagate(&self, coeffs: &CVector, t: f64) -> CVector {
        let scaled = CVector::from_iterator(
            coeffs.len(),
            coeffs
                .iter()
                .zip(&self.values)
                .map(|(c, l)| c * (l * t).exp()),
        );
        &self.vectors * scaled
    }
}

pub(crate) fn norm_1(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Right eigenvectors of an upper-triangular matrix by back substitution.
/// Near-zero pivots are replaced by `smin`, as in LAPACK `trevc`.
fn triangular_eigenvectors(t: &CMatrix) -> CMatrix {
    let n = t.nrows();
    let smin = (f64::EPSILON * norm_1(t)).max(f64::MIN_POSITIVE);
    let mut y = CMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        y[(k, k)] = Complex64::new(1.0, 0.0);
        for j in (0..k).rev() {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in j + 1..=k {
                acc += t[(j, l)] * y[(l, k)];
            }
            let mut pivot = t[(j, j)] - lambda;
            if pivot.norm() < smin {
                pivot = Complex64::new(smin, 0.0);
            }
            y[(j, k)] = -acc / pivot;
        }
    }
    y
}

/// Eigendecomposition via the complex Schur form. `None` when the Schur
/// iteration does not converge or the eigenvector matrix is singular.
pub(crate) fn eigensystem(a: &CMatrix) -> Option<Eigensystem> {
    let n = a.nrows();
    let schur = Schur::try_new(a.clone(), f64::EPSILON, 1000 * n.max(1))?;
    let (q, t) = schur.unpack();
    let values = (0..n).map(|i| t[(i, i)]).collect();
    let mut vectors = q * triangular_eigenvectors(&t);
    for mut col in vectors.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col.unscale_mut(norm);
        }
    }
    let inverse = vectors.clone().try_inverse()?;
    let condition = norm_1(&vectors) * norm_1(&inverse);
    Some(Eigensystem {
        values,
        vectors,
        inverse,
        condition,
    })
}

/// `exp(A)` by scaling and squaring with a truncated Taylor series.
pub(crate) fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let norm = norm_1(a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / Complex64::new(2f64.powi(squarings), 0.0);
    // ‖scaled‖ ≤ 1/2: 30 terms reach far below double precision.
    let mut result = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled / Complex64::new(k as f64, 0.0);
        result += &term;
        if norm_1(&term) < 1e-18 * norm_1(&result) {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    #[test]
    fn eigensystem_reconstructs_random_matrix() {
        for (n, seed) in [(3, 1), (10, 2), (40, 3)] {
            let a = random_matrix(n, seed);
            let es = eigensystem(&a).unwrap();
            let d = CMatrix::from_diagonal(&CVector::from_vec(es.values.clone()));
            let rebuilt = &es.vectors * d * &es.inverse;
            assert!((rebuilt - &a).camax() < 1e-10 * es.condition, "n = {n}");
        }
    }

    #[test]
    fn expm_matches_eigen_route() {
        let a = random_matrix(8, 7) * Complex64::new(3.0, 0.0);
        let es = eigensystem(&a).unwrap();
        let d = CMatrix::from_diagonal(&CVector::from_iterator(8, es.values.iter().map(|l| l.exp())));
        let via_eigen = &es.vectors * d * &es.inverse;
        let via_taylor = expm(&a);
        assert!((via_eigen - &via_taylor).camax() < 1e-9 * via_taylor.camax());
    }

    #[test]
    fn expm_of_nilpotent_jordan_block() {
        // [[0, 1], [0, 0]] is defective; exp gives [[1, 1], [0, 1]].
        let mut a = CMatrix::zeros(2, 2);
        a[(0, 1)] = Complex64::new(1.0, 0.0);
        let e = expm(&a);
        assert!((e[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((e[(0, 1)].re - 1.0).abs() < 1e-15);
        assert!(e[(1, 0)].norm() < 1e-15);
    }

    #[test]
    fn jordan_block_is_flagged_ill_conditioned() {
        let mut a = CMatrix::zeros(3, 3);
        a[(0, 1)] = Complex64::new(1.0, 0.0);
        a[(1, 2)] = Complex64::new(1.0, 0.0);
        let flagged = eigensystem(&a).is_none_or(|es| es.condition > MAX_EIGENVECTOR_CONDITION);
        assert!(flagged);
    }
}
