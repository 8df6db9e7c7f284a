//! Entanglement quantifiers for pair-basis states.
//!
//! In a fixed-N sector every basis state `|n, N-n⟩` pairs one state of well A
//! with exactly one state of well B. For such states the negativity reduces to
//! the sum of the moduli of the off-diagonal elements, and three lower bounds
//! on the entanglement of formation (`F`, `G` and `s`) are available in closed
//! form. All entropies are in ebits (base-2 logarithms).

use num_complex::Complex64;

use crate::basis::{BasisKind, FockBasis};
use crate::error::{Error, Result};
use crate::state::{hermitian_eigenvalues, CMatrix, DensityMatrix, StateVector};

/// Largest inter-sector coherence tolerated by [`negativity_blocks`].
pub const INTER_SECTOR_TOL: f64 = 1e-8;
/// Slack on the `|x|² ≤ 1/4` bound of F and G.
pub const ROW_WEIGHT_TOL: f64 = 1e-12;
/// Slack on the admissible negativity range of `s`.
const NEGATIVITY_RANGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct NegativityReport {
    pub value: f64,
    /// `(particle number, block negativity)` for block-diagonal full-basis states.
    pub per_block: Option<Vec<(usize, f64)>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EofBoundReport {
    pub f: f64,
    pub g: f64,
    pub s: f64,
    pub bound: f64,
}

/// How the symbol `N` of the negativity-based bound `s` is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SBoundReading {
    /// `N` is the particle number, local dimension `d = N + 1`.
    #[default]
    ParticleNumber,
    /// `N` is the local dimension itself (`N + 1` for a sector of `N` particles).
    Dimension,
}

fn sum_abs_upper(m: &CMatrix, range: std::ops::Range<usize>) -> f64 {
    let mut acc = 0.0;
    for j in range.clone() {
        for i in range.start..j {
            acc += m[(i, j)].norm();
        }
    }
    acc
}

/// `Σ_{i<j} |ρ_ij|`. Full-basis states are handed to [`negativity_blocks`].
pub fn negativity_pair(rho: &DensityMatrix) -> Result<NegativityReport> {
    match rho.basis().kind() {
        BasisKind::Sector(_) => Ok(NegativityReport {
            value: sum_abs_upper(rho.data(), 0..rho.dim()),
            per_block: None,
        }),
        BasisKind::Full(_) => negativity_blocks(rho),
    }
}

/// Negativity of a direct sum of sector blocks, each block weighted as it
/// sits in `rho` (no renormalization).
pub fn negativity_blocks(rho: &DensityMatrix) -> Result<NegativityReport> {
    let slices = rho.basis().sector_slices()?;
    let m = rho.data();
    let block_of: Vec<usize> = slices
        .iter()
        .enumerate()
        .flat_map(|(b, sl)| sl.range.clone().map(move |_| b))
        .collect();
    let mut worst = 0.0_f64;
    for j in 0..rho.dim() {
        for i in 0..rho.dim() {
            if block_of[i] != block_of[j] {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    if worst > INTER_SECTOR_TOL {
        return Err(Error::InterSectorCoherence { magnitude: worst });
    }
    let per_block: Vec<(usize, f64)> = slices
        .iter()
        .map(|sl| (sl.total, sum_abs_upper(m, sl.range.clone())))
        .collect();
    Ok(NegativityReport {
        value: per_block.iter().map(|(_, v)| v).sum(),
        per_block: Some(per_block),
    })
}

/// Trace-norm negativity `(‖ρ^{T_A}‖₁ - 1) / 2` of a sector state embedded in
/// the full `(N+1) ⊗ (N+1)` two-mode space. Independent of the pair-basis
/// shortcut and therefore usable as its oracle.
pub fn negativity_pt_oracle(rho: &DensityMatrix) -> Result<f64> {
    let BasisKind::Sector(n) = rho.basis().kind() else {
        return Err(Error::UnsupportedBasis {
            operation: "negativity_pt_oracle",
            kind: rho.basis().kind(),
        });
    };
    let local = n + 1;
    let basis: &FockBasis = rho.basis();
    let flat = |a: usize, b: usize| a * local + b;
    let mut embedded = CMatrix::zeros(local * local, local * local);
    for (i, si) in basis.states().iter().enumerate() {
        for (j, sj) in basis.states().iter().enumerate() {
            embedded[(flat(si.n_a, si.n_b), flat(sj.n_a, sj.n_b))] = rho.data()[(i, j)];
        }
    }
    // ⟨a b|ρ^{T_A}|a' b'⟩ = ⟨a' b|ρ|a b'⟩
    let pt = CMatrix::from_fn(local * local, local * local, |r, c| {
        let (a, b) = (r / local, r % local);
        let (a2, b2) = (c / local, c % local);
        embedded[(flat(a2, b), flat(a, b2))]
    });
    let trace_norm: f64 = hermitian_eigenvalues(&pt).iter().map(|l| l.abs()).sum();
    Ok((trace_norm - 1.0) / 2.0)
}

/// `ln C(n, k)` from a running sum of logarithms.
fn ln_binomials(n: usize) -> Vec<f64> {
    let mut ln_fact = vec![0.0_f64; n + 1];
    for i in 1..=n {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }
    (0..=n)
        .map(|k| ln_fact[n] - ln_fact[k] - ln_fact[n - k])
        .collect()
}

/// Amplitudes `√C(N,k) / 2^{N/2}` of the condensate on `|N-k, k⟩`, in sector order.
pub fn bec_amplitudes(n: usize) -> Vec<f64> {
    let half_ln2 = 0.5 * n as f64 * std::f64::consts::LN_2;
    ln_binomials(n)
        .into_iter()
        .map(|lc| (0.5 * lc - half_ln2).exp())
        .collect()
}

/// `2^{-N} Σ_{k'<k} √(C(N,k) C(N,k'))`, evaluated in log space.
pub fn bec_negativity_closed_form(n: usize) -> f64 {
    let a = bec_amplitudes(n);
    let mut total = 0.0;
    for k in 1..=n {
        let inner: f64 = a[..k].iter().sum();
        total += a[k] * inner;
    }
    total
}

/// `Γᵢ² = Σ_{j≠i} |ρ_ij|²` for each row.
pub fn row_weights(m: &CMatrix) -> Vec<f64> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .filter(|&j| j != i)
                .map(|j| m[(i, j)].norm_sqr())
                .sum()
        })
        .collect()
}

/// Reorders rows and columns so that `Γ₁ ≥ Γ₂ ≥ … ≥ Γ_d`. Ties keep their
/// original order. Returns the permutation (new position → old index) and
/// the permuted matrix.
pub fn gamma_row_sort(rho: &DensityMatrix) -> (Vec<usize>, DensityMatrix) {
    let weights = row_weights(rho.data());
    let mut perm: Vec<usize> = (0..weights.len()).collect();
    perm.sort_by(|&i, &j| weights[j].total_cmp(&weights[i]));
    let sorted = rho.permuted(&perm);
    (perm, sorted)
}

fn entropy_term(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        -p * p.log2()
    }
}

/// Binary entropy `-p log₂ p - (1-p) log₂ (1-p)`.
pub fn binary_entropy(p: f64) -> f64 {
    entropy_term(p) + entropy_term(1.0 - p)
}

fn check_row_weight(w: f64, row: usize) -> Result<f64> {
    if w > 0.25 + ROW_WEIGHT_TOL {
        return Err(Error::InvalidDensityMatrix(format!(
            "off-diagonal weight {w} of row {row} exceeds 1/4"
        )));
    }
    Ok(w.min(0.25))
}

fn off_diagonal_row(m: &CMatrix, i: usize) -> impl Iterator<Item = Complex64> + '_ {
    (0..m.ncols()).filter(move |&j| j != i).map(move |j| m[(i, j)])
}

/// Lower bound `F` built from the first row of the Γ-sorted matrix.
pub fn eof_bound_f(rho: &DensityMatrix) -> Result<f64> {
    let (_, sorted) = gamma_row_sort(rho);
    let m = sorted.data();
    if m.nrows() < 2 {
        return Ok(0.0);
    }
    let x: Vec<f64> = off_diagonal_row(m, 0).map(|z| z.norm_sqr()).collect();
    let x2 = check_row_weight(x.iter().sum(), 0)?;
    let a1 = (1.0 + (1.0 - 4.0 * x2).max(0.0).sqrt()) / 2.0;
    Ok(entropy_term(a1) + x.iter().map(|&xi| entropy_term(xi / a1)).sum::<f64>())
}

/// Lower bound `G` using every row of the Γ-sorted matrix: the larger root
/// for the first row, the smaller root for the rest.
pub fn eof_bound_g(rho: &DensityMatrix) -> Result<f64> {
    let (_, sorted) = gamma_row_sort(rho);
    let m = sorted.data();
    if m.nrows() < 2 {
        return Ok(0.0);
    }
    let mut g = 0.0;
    for i in 0..m.nrows() {
        let y2 = check_row_weight(off_diagonal_row(m, i).map(|z| z.norm_sqr()).sum(), i)?;
        let root = (1.0 - 4.0 * y2).max(0.0).sqrt();
        let alpha2 = if i == 0 { 0.5 * (1.0 + root) } else { 0.5 * (1.0 - root) };
        g += entropy_term(alpha2);
    }
    Ok(g)
}

/// Negativity-based bound `s(𝒩)` for a sector of `n` particles, particle-number reading.
pub fn eof_bound_s(negativity: f64, n: usize) -> Result<f64> {
    eof_bound_s_with(negativity, n, SBoundReading::ParticleNumber)
}

pub fn eof_bound_s_with(negativity: f64, n: usize, reading: SBoundReading) -> Result<f64> {
    let max = n as f64 / 2.0;
    if !negativity.is_finite() || negativity < -NEGATIVITY_RANGE_TOL || negativity > max + NEGATIVITY_RANGE_TOL {
        return Err(Error::NegativityOutOfRange {
            value: negativity,
            max,
        });
    }
    if n == 0 {
        return Ok(0.0);
    }
    let neg = negativity.clamp(0.0, max);
    // `d` is the local dimension entering γ; `m` stands in for N in the branches.
    let d = (n + 1) as f64;
    let m = match reading {
        SBoundReading::ParticleNumber => n as f64,
        SBoundReading::Dimension => d,
    };
    let gamma = ((2.0 * neg + 1.0).sqrt() + ((d - 1.0) * (d - 2.0 * neg - 1.0)).max(0.0).sqrt())
        .powi(2)
        / (d * d);
    let gamma = gamma.clamp(0.0, 1.0);
    let boundary = 1.5 - 2.0 / (m + 1.0);
    let s = if neg <= boundary || m <= 1.0 {
        // For m = 1 the second branch degenerates to 0/0 · log 1; both branches agree on the endpoint.
        binary_entropy(gamma) + (1.0 - gamma) * m.log2()
    } else {
        (2.0 * neg - m) / (m - 1.0) * m.log2() + (m + 1.0).log2()
    };
    Ok(s.max(0.0))
}

/// `max(F, G, s)` for a sector state.
pub fn eof_bound(rho: &DensityMatrix) -> Result<EofBoundReport> {
    eof_bound_with(rho, SBoundReading::ParticleNumber)
}

pub fn eof_bound_with(rho: &DensityMatrix, reading: SBoundReading) -> Result<EofBoundReport> {
    let BasisKind::Sector(n) = rho.basis().kind() else {
        return Err(Error::UnsupportedBasis {
            operation: "eof_bound",
            kind: rho.basis().kind(),
        });
    };
    let f = eof_bound_f(rho)?;
    let g = eof_bound_g(rho)?;
    let neg = negativity_pair(rho)?.value;
    let s = eof_bound_s_with(neg, n, reading)?;
    Ok(EofBoundReport {
        f,
        g,
        s,
        bound: f.max(g).max(s),
    })
}

/// Entanglement entropy of a pure pair-basis state: the Schmidt
/// coefficients are the moduli of its amplitudes.
pub fn pure_state_eof(psi: &StateVector) -> Result<f64> {
    if !psi.basis().is_sector() {
        return Err(Error::UnsupportedBasis {
            operation: "pure_state_eof",
            kind: psi.basis().kind(),
        });
    }
    psi.ensure_normalized()?;
    Ok(psi.amplitudes().iter().map(|c| entropy_term(c.norm_sqr())).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{full_basis, sector_basis};
    use crate::state::StateVector;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn bec_rho(n: usize) -> DensityMatrix {
        let psi = StateVector::from_real(sector_basis(n), &bec_amplitudes(n)).unwrap();
        DensityMatrix::from_pure(&psi).unwrap()
    }

    #[test]
    fn pair_negativity_examples() {
        for n in [0, 1, 4] {
            let rho = DensityMatrix::maximally_mixed(sector_basis(n));
            assert_eq!(negativity_pair(&rho).unwrap().value, 0.0);
        }
        assert!((negativity_pair(&bec_rho(1)).unwrap().value - 0.5).abs() < 1e-15);
        let expected = (2.0 * 2f64.sqrt() + 1.0) / 4.0;
        assert!((negativity_pair(&bec_rho(2)).unwrap().value - expected).abs() < 1e-15);
    }

    #[test]
    fn pt_oracle_examples() {
        let diag = DensityMatrix::maximally_mixed(sector_basis(3));
        assert!(negativity_pt_oracle(&diag).unwrap().abs() < 1e-14);
        assert!((negativity_pt_oracle(&bec_rho(1)).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn full_basis_pair_negativity_goes_through_blocks() {
        let rho = DensityMatrix::maximally_mixed(full_basis(2));
        let report = negativity_pair(&rho).unwrap();
        assert_eq!(report.value, 0.0);
        assert_eq!(report.per_block.unwrap().len(), 3);
    }

    #[test]
    fn block_negativity_examples() {
        let full = full_basis(3);
        let vac = StateVector::basis_state(full.clone(), full.dim() - 1);
        assert_eq!(negativity_blocks(&DensityMatrix::from_pure(&vac).unwrap()).unwrap().value, 0.0);

        // ½ · (N = 1 condensate) ⊕ ½ · vacuum inside Full(1).
        let f1 = full_basis(1);
        let data = CMatrix::from_row_slice(
            3,
            3,
            &[c(0.25), c(0.25), c(0.0), c(0.25), c(0.25), c(0.0), c(0.0), c(0.0), c(0.5)],
        );
        let rho = DensityMatrix::new(f1, data).unwrap();
        let report = negativity_blocks(&rho).unwrap();
        assert!((report.value - 0.25).abs() < 1e-15);
        assert_eq!(report.per_block, Some(vec![(1, 0.25), (0, 0.0)]));
    }

    #[test]
    fn block_negativity_rejects_inter_sector_coherence() {
        let f1 = full_basis(1);
        let s = 0.5f64.sqrt();
        // (|1,0⟩ + |0,0⟩)/√2 mixes sectors.
        let psi = StateVector::from_real(f1, &[s, 0.0, s]).unwrap();
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        assert!(matches!(negativity_blocks(&rho), Err(Error::InterSectorCoherence { .. })));
        assert!(negativity_blocks(&bec_rho(2)).is_err());
    }

    #[test]
    fn bec_closed_form_examples() {
        assert!((bec_negativity_closed_form(1) - 0.5).abs() < 1e-15);
        assert!((bec_negativity_closed_form(2) - (2.0 * 2f64.sqrt() + 1.0) / 4.0).abs() < 1e-15);
        assert_eq!(bec_negativity_closed_form(0), 0.0);
        // (Σ a_k)² = 1 + 2 𝒩 since Σ a_k² = 1.
        for n in [5, 50, 400] {
            let s: f64 = bec_amplitudes(n).iter().sum();
            let neg = bec_negativity_closed_form(n);
            assert!(((s * s - 1.0) / 2.0 - neg).abs() < 1e-9 * neg, "n = {n}");
        }
    }

    #[test]
    fn gamma_sort_examples() {
        let (perm, _) = gamma_row_sort(&bec_rho(1));
        assert_eq!(perm, vec![0, 1]);

        // Row weights Γ² = (0.01, 0.25, 0.09) via a sparse Hermitian pattern.
        let data = CMatrix::from_row_slice(
            4,
            4,
            &[
                c(0.25), c(0.0), c(0.0), c(0.1),
                c(0.0), c(0.25), c(0.3), c(0.4),
                c(0.0), c(0.3), c(0.25), c(0.0),
                c(0.1), c(0.4), c(0.0), c(0.25),
            ],
        );
        let w = row_weights(&data);
        let rho = DensityMatrix::from_parts_unchecked(sector_basis(3), data).unwrap();
        let (perm, sorted) = gamma_row_sort(&rho);
        let mut expected: Vec<usize> = (0..4).collect();
        expected.sort_by(|&i, &j| w[j].partial_cmp(&w[i]).unwrap());
        assert_eq!(perm, expected);
        let ws = row_weights(sorted.data());
        assert!(ws.windows(2).all(|p| p[0] >= p[1]));
    }

    #[test]
    fn gamma_sort_three_rows() {
        // Row weights Γ = (0.1, 0.5, 0.3); only the permutation matters here.
        let mut data = CMatrix::zeros(3, 3);
        data[(0, 1)] = c(0.1);
        data[(1, 0)] = c(0.5);
        data[(2, 0)] = c(0.3);
        let rho = DensityMatrix::from_parts_unchecked(sector_basis(2), data).unwrap();
        let (perm, sorted) = gamma_row_sort(&rho);
        assert_eq!(perm, vec![1, 2, 0]);
        assert_eq!(sorted.data()[(0, 2)], c(0.5));
    }

    #[test]
    fn f_and_g_examples() {
        let diag = DensityMatrix::maximally_mixed(sector_basis(4));
        assert_eq!(eof_bound_f(&diag).unwrap(), 0.0);
        assert_eq!(eof_bound_g(&diag).unwrap(), 0.0);
        assert!((eof_bound_f(&bec_rho(1)).unwrap() - 1.0).abs() < 1e-12);
        assert!((eof_bound_g(&bec_rho(1)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn f_rejects_overweight_row() {
        let data = CMatrix::from_row_slice(2, 2, &[c(0.5), c(0.6), c(0.6), c(0.5)]);
        let rho = DensityMatrix::from_parts_unchecked(sector_basis(1), data).unwrap();
        assert!(matches!(eof_bound_f(&rho), Err(Error::InvalidDensityMatrix(_))));
        assert!(matches!(eof_bound_g(&rho), Err(Error::InvalidDensityMatrix(_))));
    }

    #[test]
    fn s_examples() {
        for n in 0..12 {
            assert!(eof_bound_s(0.0, n).unwrap().abs() < 1e-12, "s(0) for n = {n}");
        }
        assert!((eof_bound_s(0.5, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((eof_bound_s(1.0, 2).unwrap() - 3f64.log2()).abs() < 1e-12);
        assert!(matches!(eof_bound_s(1.2, 2), Err(Error::NegativityOutOfRange { .. })));
        assert!(eof_bound_s(-0.1, 2).is_err());
    }

    #[test]
    fn s_branches_meet_at_the_boundary() {
        for n in 2..20usize {
            let b = 1.5 - 2.0 / (n as f64 + 1.0);
            if b > n as f64 / 2.0 {
                continue;
            }
            let d = (n + 1) as f64;
            let nf = n as f64;
            let gamma = ((2.0 * b + 1.0).sqrt() + ((d - 1.0) * (d - 2.0 * b - 1.0)).sqrt()).powi(2) / (d * d);
            let first = binary_entropy(gamma) + (1.0 - gamma) * nf.log2();
            let second = (2.0 * b - nf) / (nf - 1.0) * nf.log2() + (nf + 1.0).log2();
            assert!((first - second).abs() < 1e-9, "n = {n}: {first} vs {second}");
        }
    }

    #[test]
    fn s_dimension_reading_differs() {
        let a = eof_bound_s_with(0.6, 3, SBoundReading::ParticleNumber).unwrap();
        let b = eof_bound_s_with(0.6, 3, SBoundReading::Dimension).unwrap();
        assert!((a - b).abs() > 1e-3);
    }

    #[test]
    fn eof_bound_examples() {
        let diag = DensityMatrix::maximally_mixed(sector_basis(3));
        let r = eof_bound(&diag).unwrap();
        assert_eq!((r.f, r.g, r.bound), (0.0, 0.0, 0.0));
        assert!(r.s.abs() < 1e-12);

        let r = eof_bound(&bec_rho(1)).unwrap();
        assert!((r.bound - 1.0).abs() < 1e-12);
        assert!(eof_bound(&DensityMatrix::maximally_mixed(full_basis(2))).is_err());
    }

    #[test]
    fn pure_state_eof_examples() {
        let b2 = sector_basis(2);
        assert_eq!(pure_state_eof(&StateVector::basis_state(b2.clone(), 1)).unwrap(), 0.0);
        let bell = StateVector::from_real(sector_basis(1), &bec_amplitudes(1)).unwrap();
        assert!((pure_state_eof(&bell).unwrap() - 1.0).abs() < 1e-14);
        let bec2 = StateVector::from_real(b2.clone(), &bec_amplitudes(2)).unwrap();
        assert!((pure_state_eof(&bec2).unwrap() - 1.5).abs() < 1e-14);
        let bad = StateVector::from_real(b2, &[1.0, 1.0, 0.0]).unwrap();
        assert!(matches!(pure_state_eof(&bad), Err(Error::Unnormalized(_))));
    }
}
