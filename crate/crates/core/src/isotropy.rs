//! Isotropy of the normalized Jacobian and the characteristic length.
//!
//! `J̄` is isotropic when `K̄ K̄ᵀ = τ² I`. Entry `(i, j)` of `K̄ K̄ᵀ` is
//! `(l_iᵀ l_j + k_i k_j / L²) / (m_i m_j)`, so isotropy forces equal limb vectors up to
//! rotation, equal `m_i` magnitudes and `L² = −k_i k_j / l_iᵀ l_j` for every pair.

use std::f64::consts::{SQRT_2, TAU};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::conditioning::condition_report;
use crate::geometry::{DesignParams, Mat3, Pose, StructureReport, WorkingMode};
use crate::kinematics::{assemble_matrices, inverse_kinematics, KinematicMatrices, LimbState};
use crate::optim::NelderMead;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IsotropyError {
    #[error("characteristic length must be positive: sin(gamma) = {sin_gamma} for gamma = {gamma}")]
    NonPositive { gamma: f64, sin_gamma: f64 },
    #[error("pairwise characteristic length undefined: radicand {radicand}")]
    InvalidRadicand { radicand: f64 },
    #[error("K̄ is undefined at a serial singularity")]
    SerialSingular,
    #[error("no seed pose is reachable in working mode {0}")]
    NoReachableSeed(WorkingMode),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LengthSource {
    ClosedForm,
    Optimized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharacteristicLength {
    /// `L`, mm.
    pub length: f64,
    /// Limb angle `∠B_i C_i P` at the defining configuration, rad.
    pub gamma: f64,
    pub source: LengthSource,
}

/// `L = sqrt(2) r sin(gamma)`.
pub fn characteristic_length_closed(platform_radius: f64, gamma: f64) -> Result<CharacteristicLength, IsotropyError> {
    let sin_gamma = gamma.sin();
    let length = SQRT_2 * platform_radius * sin_gamma;
    if !(sin_gamma > 0.0 && length > 0.0) {
        return Err(IsotropyError::NonPositive { gamma, sin_gamma });
    }
    Ok(CharacteristicLength {
        length,
        gamma,
        source: LengthSource::ClosedForm,
    })
}

/// `L = sqrt(−k_i k_j / l_iᵀ l_j)` for the zero-based limb pair `(i, j)`.
pub fn characteristic_length_pairwise(limbs: &[LimbState; 3], pair: (usize, usize)) -> Result<f64, IsotropyError> {
    let (a, b) = (&limbs[pair.0], &limbs[pair.1]);
    let dot = a.l_vec.dot(&b.l_vec);
    let radicand = -a.k * b.k / dot;
    if dot == 0.0 || radicand.is_nan() || radicand < 0.0 {
        return Err(IsotropyError::InvalidRadicand { radicand });
    }
    Ok(radicand.sqrt())
}

/// Deviation of `K̄ K̄ᵀ` from a multiple of the identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsotropyResidual {
    /// `(max − min)` of the diagonal of `K̄ K̄ᵀ` over its mean.
    pub diag_spread: f64,
    /// Largest off-diagonal magnitude of `K̄ K̄ᵀ` over the mean diagonal.
    pub off_diag: f64,
    /// Mean diagonal, i.e. `τ²` when isotropic.
    pub tau_sq: f64,
}

impl IsotropyResidual {
    pub fn from_k_bar(k_bar: &Mat3) -> Self {
        let s = k_bar * k_bar.transpose();
        let diag = [s[(0, 0)], s[(1, 1)], s[(2, 2)]];
        let mean = diag.iter().sum::<f64>() / 3.0;
        let max = diag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = diag.iter().copied().fold(f64::INFINITY, f64::min);
        let off = [s[(0, 1)], s[(0, 2)], s[(1, 2)]]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        IsotropyResidual {
            diag_spread: (max - min) / mean,
            off_diag: off / mean,
            tau_sq: mean,
        }
    }

    pub fn is_isotropic(&self, tol: f64) -> bool {
        self.diag_spread < tol && self.off_diag < tol
    }
}

pub fn isotropy_residual(mats: &KinematicMatrices) -> Result<IsotropyResidual, IsotropyError> {
    mats.k_bar
        .as_ref()
        .map(IsotropyResidual::from_k_bar)
        .ok_or(IsotropyError::SerialSingular)
}

/// Relative spreads of the geometric equalities implied by isotropy: equal limb
/// lengths, equal pivot radii, equal pairwise limb dot products and equal pairwise
/// products `m_i m_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EqualityConditions {
    pub limb_lengths: f64,
    pub pivot_radii: f64,
    pub limb_dots: f64,
    pub m_products: f64,
}

impl EqualityConditions {
    pub fn at(pose: &Pose, limbs: &[LimbState; 3]) -> Self {
        let pairs = [(0, 1), (0, 2), (1, 2)];
        EqualityConditions {
            limb_lengths: relative_spread(limbs.map(|s| s.l_vec.norm())),
            pivot_radii: relative_spread(limbs.map(|s| (pose.position() - s.c).norm())),
            limb_dots: relative_spread(pairs.map(|(i, j)| limbs[i].l_vec.dot(&limbs[j].l_vec))),
            m_products: relative_spread(pairs.map(|(i, j)| limbs[i].m * limbs[j].m)),
        }
    }

    pub fn max(&self) -> f64 {
        self.limb_lengths
            .max(self.pivot_radii)
            .max(self.limb_dots)
            .max(self.m_products)
    }
}

fn relative_spread(values: [f64; 3]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        0.0
    } else {
        (max - min) / scale
    }
}

/// Matrix whose condition number the isotropy search minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum IsotropyTarget {
    #[default]
    KBar,
    ABar,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropySearchOptions {
    pub target: IsotropyTarget,
    /// Seed counts along `x`, `y` and `theta`.
    pub seeds: (usize, usize, usize),
    /// Seeds cover `[−w, w]²` in position, mm; `None` uses `R / 2`.
    pub window: Option<f64>,
    pub simplex: NelderMead,
    /// Isotropy is claimed when the achieved index exceeds this.
    pub claim_threshold: f64,
}

impl Default for IsotropySearchOptions {
    fn default() -> Self {
        IsotropySearchOptions {
            target: IsotropyTarget::KBar,
            seeds: (5, 5, 8),
            window: None,
            simplex: NelderMead::default(),
            claim_threshold: 1.0 - 1e-4,
        }
    }
}

/// Outcome of an isotropy search. Finding nothing above the threshold is reported
/// through `isotropic == false`, not as an error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsotropySearch {
    pub pose: Pose,
    pub length: CharacteristicLength,
    /// Conditioning index of the target matrix at `pose`.
    pub index: f64,
    pub isotropic: bool,
    pub limbs: [LimbState; 3],
    pub structure: StructureReport,
    /// Seed that produced the result (`usize::MAX` for a single refinement).
    pub seed_index: usize,
    pub iterations: usize,
}

/// Optimizer coordinates: lengths divided by `l`, angle in radians.
fn decode(z: &[f64; 4], l: f64) -> (Pose, f64) {
    (Pose::new(z[0] * l, z[1] * l, z[2]), z[3] * l)
}

fn target_kappa(params: &DesignParams, mode: WorkingMode, target: IsotropyTarget, pose: &Pose, length: f64) -> f64 {
    if length.is_nan() || length <= 0.0 {
        return f64::INFINITY;
    }
    let Ok(limbs) = inverse_kinematics(params, pose, mode) else {
        return f64::INFINITY;
    };
    let mats = assemble_matrices(params, &limbs, length);
    let m = match target {
        IsotropyTarget::KBar => match mats.k_bar {
            Some(k) => k,
            None => return f64::INFINITY,
        },
        IsotropyTarget::ABar => mats.a_bar,
    };
    condition_report(&m).map(|r| r.kappa).unwrap_or(f64::INFINITY)
}

fn run_simplex(
    params: &DesignParams,
    mode: WorkingMode,
    options: &IsotropySearchOptions,
    seed: &Pose,
    length: f64,
) -> crate::optim::Minimum<4> {
    let l = params.limb_length;
    let objective = |z: &[f64; 4]| {
        let (pose, length) = decode(z, l);
        target_kappa(params, mode, options.target, &pose, length)
    };
    options.simplex.minimize(
        objective,
        [seed.x / l, seed.y / l, seed.theta, length / l],
        [0.05, 0.05, 0.1, 0.05],
    )
}

fn finish(
    params: &DesignParams,
    mode: WorkingMode,
    options: &IsotropySearchOptions,
    z: &[f64; 4],
    seed_index: usize,
    iterations: usize,
) -> Option<IsotropySearch> {
    let (pose, length) = decode(z, params.limb_length);
    let limbs = inverse_kinematics(params, &pose, mode).ok()?;
    let kappa = target_kappa(params, mode, options.target, &pose, length);
    let index = if kappa.is_finite() { 1.0 / kappa } else { 0.0 };
    let gamma = limbs.iter().map(|s| s.gamma).sum::<f64>() / 3.0;
    Some(IsotropySearch {
        pose,
        length: CharacteristicLength {
            length,
            gamma,
            source: LengthSource::Optimized,
        },
        index,
        isotropic: index > options.claim_threshold,
        limbs,
        structure: params.isotropy_structure(),
        seed_index,
        iterations,
    })
}

/// Multi-start simplex search minimizing the condition number of `K̄` (or `Ā`) jointly
/// over pose and characteristic length, seeded from a grid over `(x, y, theta)`.
pub fn find_isotropic(
    params: &DesignParams,
    mode: WorkingMode,
    length_init: f64,
) -> Result<IsotropySearch, IsotropyError> {
    find_isotropic_with(params, mode, length_init, &IsotropySearchOptions::default())
}

pub fn find_isotropic_with(
    params: &DesignParams,
    mode: WorkingMode,
    length_init: f64,
    options: &IsotropySearchOptions,
) -> Result<IsotropySearch, IsotropyError> {
    let (nx, ny, nt) = options.seeds;
    let window = options.window.unwrap_or(0.5 * params.base_radius);
    let coord = |k: usize, n: usize| {
        if n <= 1 {
            0.0
        } else {
            -window + 2.0 * window * k as f64 / (n - 1) as f64
        }
    };
    let seeds: Vec<Pose> = (0..nx)
        .flat_map(|ix| (0..ny).flat_map(move |iy| (0..nt).map(move |it| (ix, iy, it))))
        .map(|(ix, iy, it)| Pose::new(coord(ix, nx), coord(iy, ny), TAU * it as f64 / nt as f64))
        .collect();

    let runs: Vec<Option<(f64, [f64; 4], usize)>> = seeds
        .par_iter()
        .map(|seed| {
            if !target_kappa(params, mode, options.target, seed, length_init).is_finite() {
                return None;
            }
            let m = run_simplex(params, mode, options, seed, length_init);
            Some((m.value, m.x, m.iterations))
        })
        .collect();

    let best_value = runs.iter().flatten().map(|r| r.0).fold(f64::INFINITY, f64::min);
    if !best_value.is_finite() {
        return Err(IsotropyError::NoReachableSeed(mode));
    }
    // Lowest seed index among (numerical) ties.
    let (seed_index, (_, z, iterations)) = runs
        .iter()
        .enumerate()
        .filter_map(|(k, r)| r.map(|r| (k, r)))
        .find(|(_, r)| r.0 - best_value <= 1e-12 * best_value)
        .expect("best value comes from some run");
    finish(params, mode, options, &z, seed_index, iterations).ok_or(IsotropyError::NoReachableSeed(mode))
}

/// Single simplex run from a given pose and length.
pub fn refine_isotropic(
    params: &DesignParams,
    mode: WorkingMode,
    seed: &Pose,
    length: f64,
    options: &IsotropySearchOptions,
) -> Result<IsotropySearch, IsotropyError> {
    if !target_kappa(params, mode, options.target, seed, length).is_finite() {
        return Err(IsotropyError::NoReachableSeed(mode));
    }
    let m = run_simplex(params, mode, options, seed, length);
    finish(params, mode, options, &m.x, usize::MAX, m.iterations).ok_or(IsotropyError::NoReachableSeed(mode))
}
