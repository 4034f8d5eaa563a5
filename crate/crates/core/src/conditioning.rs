//! Singular values and condition numbers of 3x3 matrices.
//!
//! Singular values come from the eigen-decomposition of `M Mᵀ`, obtained with cyclic
//! Jacobi rotations. Jacobi keeps uniform accuracy when eigenvalues coincide,
//! which is exactly the isotropic case this crate is interested in.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Mat3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ConditioningError {
    #[error("matrix has non-finite entries")]
    NonFinite,
}

const MAX_SWEEPS: usize = 64;

/// Relative noise floor of singular values: `σ ≤ SINGULAR_FLOOR·σ₁` is reported as 0.
const SINGULAR_FLOOR: f64 = 64.0 * f64::EPSILON;

/// Eigenvalues of a symmetric 3x3 matrix by cyclic Jacobi rotations (unsorted).
///
/// Iterates until the off-diagonal Frobenius norm drops below `1e-14 * ‖S‖_F`.
pub fn symmetric_eigenvalues_3(s: &Mat3) -> [f64; 3] {
    jacobi_eigen(s).0
}

/// Jacobi eigen-decomposition; column `i` of the returned matrix is the eigenvector of
/// eigenvalue `i`.
fn jacobi_eigen(s: &Mat3) -> ([f64; 3], Mat3) {
    let mut a = [[0.0f64; 3]; 3];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = 0.5 * (s[(i, j)] + s[(j, i)]);
        }
    }
    let mut v = Mat3::identity();
    let total: f64 = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
    let target = 1e-14 * total;

    for _ in 0..MAX_SWEEPS {
        let off = (2.0 * (a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2))).sqrt();
        if off <= target {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            let apq = a[p][q];
            if apq == 0.0 {
                continue;
            }
            // Rotation angle annihilating a[p][q] (Rutishauser's formulation).
            let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let sn = t * c;
            let tau = sn / (1.0 + c);

            a[p][p] -= t * apq;
            a[q][q] += t * apq;
            a[p][q] = 0.0;
            a[q][p] = 0.0;
            let r = 3 - p - q;
            let arp = a[r][p];
            let arq = a[r][q];
            a[r][p] = arp - sn * (arq + tau * arp);
            a[r][q] = arq + sn * (arp - tau * arq);
            a[p][r] = a[r][p];
            a[q][r] = a[r][q];
            for k in 0..3 {
                let vkp = v[(k, p)];
                let vkq = v[(k, q)];
                v[(k, p)] = vkp - sn * (vkq + tau * vkp);
                v[(k, q)] = vkq + sn * (vkp - tau * vkq);
            }
        }
    }
    ([a[0][0], a[1][1], a[2][2]], v)
}

/// Singular values of `m`, descending.
///
/// The eigenvectors `v_i` of `M Mᵀ` come from Jacobi; each singular value is then read
/// off as `‖Mᵀ v_i‖` rather than `sqrt(λ_i)`. An eigenvector error `δ` perturbs that
/// norm only at order `δ²κ²`, so small singular values keep their relative accuracy.
pub fn singular_values_3(m: &Mat3) -> Result<[f64; 3], ConditioningError> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(ConditioningError::NonFinite);
    }
    let (_, v) = jacobi_eigen(&(m * m.transpose()));
    let projected = m.transpose() * v;
    let mut sv = [0, 1, 2].map(|i| projected.column(i).norm());
    sv.sort_by(|a, b| b.total_cmp(a));
    let floor = SINGULAR_FLOOR * sv[0];
    Ok(sv.map(|s| if s <= floor { 0.0 } else { s }))
}

/// Singular values, condition number `kappa = σ₁/σ₃` and conditioning index `1/kappa`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditioningReport {
    /// Descending, non-negative.
    pub singular_values: [f64; 3],
    /// `f64::INFINITY` when the matrix is singular.
    pub kappa: f64,
    /// `1/kappa` in `[0, 1]`; 0 at a singularity, 1 at isotropy.
    pub index: f64,
}

impl ConditioningReport {
    fn from_singular_values(sv: [f64; 3], kappa: f64) -> Self {
        let index = if kappa.is_finite() {
            (1.0 / kappa).clamp(0.0, 1.0)
        } else {
            0.0
        };
        ConditioningReport {
            singular_values: sv,
            kappa,
            index,
        }
    }

    pub fn is_singular(&self) -> bool {
        !self.kappa.is_finite()
    }
}

fn ratio(largest: f64, smallest: f64) -> f64 {
    if smallest > 0.0 {
        largest / smallest
    } else {
        f64::INFINITY
    }
}

pub fn condition_report(m: &Mat3) -> Result<ConditioningReport, ConditioningError> {
    let sv = singular_values_3(m)?;
    Ok(ConditioningReport::from_singular_values(sv, ratio(sv[0], sv[2])))
}

/// How the condition number of the diagonal matrix `B` is reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KappaVariant {
    /// `βmax/βmin`, the ordinary singular-value ratio.
    #[default]
    Ratio,
    /// `sqrt(βmax/βmin)`.
    SqrtRatio,
}

/// Conditioning of a diagonal matrix; off-diagonal entries are ignored.
pub fn diag_condition(b: &Mat3, variant: KappaVariant) -> ConditioningReport {
    let mut sv = [b[(0, 0)].abs(), b[(1, 1)].abs(), b[(2, 2)].abs()];
    sv.sort_by(|a, b| b.total_cmp(a));
    let kappa = match variant {
        KappaVariant::Ratio => ratio(sv[0], sv[2]),
        KappaVariant::SqrtRatio => ratio(sv[0], sv[2]).sqrt(),
    };
    ConditioningReport::from_singular_values(sv, kappa)
}

/// `|det M|` divided by the product of the row norms of `M`; lies in `[0, 1]` by
/// Hadamard's inequality and is 0 when any row vanishes.
pub fn hadamard_ratio(m: &Mat3) -> f64 {
    let norms: f64 = m.row_iter().map(|r| r.norm()).product();
    if norms > 0.0 {
        (m.determinant().abs() / norms).min(1.0)
    } else {
        0.0
    }
}
