//! Serial and parallel singularities.
//!
//! A parallel singularity is `det Ā = 0`: the three limb lines `B_i C_i` meet in one
//! point, possibly at infinity. A serial singularity is `det B = 0`: some limb is
//! perpendicular to its rail.

use serde::Serialize;

use crate::conditioning::hadamard_ratio;
use crate::geometry::{cross, DesignParams, Pose, WorkingMode, LIMBS};
use crate::kinematics::{assemble_matrices, inverse_kinematics_tangent_ok, KinematicsError, LimbState};

/// Threshold on the normalized `|det Ā|`.
pub const PARALLEL_EPS: f64 = 1e-8;
/// Threshold on `min |m_i| / l`.
pub const SERIAL_EPS: f64 = 1e-9;

/// Two limb lines closer than this angle are treated as parallel.
pub const PARALLEL_LINES_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "limbs")]
pub enum Classification {
    Regular,
    /// One-based indices of the limbs perpendicular to their rails.
    SerialSingular(Vec<usize>),
    ParallelSingular,
    Both(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularityReport {
    /// `|det Ā|` over the product of the row norms of `Ā`, in `[0, 1]`.
    pub parallel_measure: f64,
    /// `min |m_i| / l`, in `[0, 1]`.
    pub serial_measure: f64,
    pub classification: Classification,
}

/// Classifies `pose` on the branch `mode`. A limb sitting exactly on a serial
/// singularity is accepted whatever its requested sign.
pub fn classify(
    params: &DesignParams,
    pose: &Pose,
    mode: WorkingMode,
    length: f64,
) -> Result<SingularityReport, KinematicsError> {
    let limbs = inverse_kinematics_tangent_ok(params, pose, mode)?;
    Ok(classify_limbs(params, &limbs, length))
}

pub fn classify_limbs(params: &DesignParams, limbs: &[LimbState; 3], length: f64) -> SingularityReport {
    let mats = assemble_matrices(params, limbs, length);
    let l = params.limb_length;
    let parallel_measure = hadamard_ratio(&mats.a_bar);
    let serial_measure = limbs
        .iter()
        .map(|s| (s.m.abs() / l).min(1.0))
        .fold(f64::INFINITY, f64::min);
    let serial: Vec<usize> = (0..LIMBS)
        .filter(|&i| limbs[i].m.abs() / l < SERIAL_EPS)
        .map(|i| i + 1)
        .collect();
    let parallel = parallel_measure < PARALLEL_EPS;
    let classification = match (serial.is_empty(), parallel) {
        (true, false) => Classification::Regular,
        (false, false) => Classification::SerialSingular(serial),
        (true, true) => Classification::ParallelSingular,
        (false, true) => Classification::Both(serial),
    };
    SingularityReport {
        parallel_measure,
        serial_measure,
        classification,
    }
}

/// Geometric concurrency of the limb lines `B_i C_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LineConcurrency {
    /// Largest distance between the three pairwise intersection points, mm.
    Residual(f64),
    /// Limbs (one-based) whose lines are parallel within [`PARALLEL_LINES_EPS`], and the
    /// distance between those two lines. The lines concur only if it vanishes, in which
    /// case the third line crosses the common one.
    ParallelPair { limbs: (usize, usize), offset: f64 },
    /// All three lines parallel: concurrent at infinity.
    AllParallel,
}

impl LineConcurrency {
    /// Distance from concurrency in mm; 0 for lines meeting at infinity.
    pub fn residual(&self) -> f64 {
        match *self {
            LineConcurrency::Residual(r) => r,
            LineConcurrency::ParallelPair { offset, .. } => offset,
            LineConcurrency::AllParallel => 0.0,
        }
    }
}

pub fn line_concurrency_residual(limbs: &[LimbState; 3]) -> LineConcurrency {
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let parallel = pairs.map(|(i, j)| {
        let (u, v) = (limbs[i].l_vec, limbs[j].l_vec);
        cross(u, v).abs() <= PARALLEL_LINES_EPS * u.norm() * v.norm()
    });
    match parallel.iter().filter(|p| **p).count() {
        0 => {}
        1 => {
            let (i, j) = pairs[parallel.iter().position(|p| *p).unwrap_or(0)];
            let u = limbs[i].l_vec;
            let offset = cross(u, limbs[j].b - limbs[i].b).abs() / u.norm();
            return LineConcurrency::ParallelPair {
                limbs: (i + 1, j + 1),
                offset,
            };
        }
        _ => return LineConcurrency::AllParallel,
    }
    let points = pairs.map(|(i, j)| {
        let (u, v) = (limbs[i].l_vec, limbs[j].l_vec);
        let offset = limbs[j].b - limbs[i].b;
        limbs[i].b + u * (cross(offset, v) / cross(u, v))
    });
    let spread = (points[0] - points[1])
        .norm()
        .max((points[0] - points[2]).norm())
        .max((points[1] - points[2]).norm());
    LineConcurrency::Residual(spread)
}

/// Signed `det Ā` over the row-norm product, or `None` when IK fails on `mode`.
fn signed_parallel_measure(params: &DesignParams, pose: &Pose, mode: WorkingMode, length: f64) -> Option<f64> {
    let limbs = crate::kinematics::inverse_kinematics(params, pose, mode).ok()?;
    let a_bar = assemble_matrices(params, &limbs, length).a_bar;
    let norms: f64 = a_bar.row_iter().map(|r| r.norm()).product();
    Some(a_bar.determinant() / norms)
}

fn lerp(from: &Pose, to: &Pose, s: f64) -> Pose {
    Pose::new(
        from.x + s * (to.x - from.x),
        from.y + s * (to.y - from.y),
        from.theta + s * (to.theta - from.theta),
    )
}

/// Bisects `det Ā` along the straight segment `from -> to` until the bracket is shorter
/// than `tol_mm` (or cannot shrink further). Returns `None` unless both ends are
/// reachable on `mode` with opposite signs and every probe stays reachable.
pub fn locate_parallel_singularity(
    params: &DesignParams,
    mode: WorkingMode,
    length: f64,
    from: &Pose,
    to: &Pose,
    tol_mm: f64,
) -> Option<Pose> {
    let f = |s: f64| signed_parallel_measure(params, &lerp(from, to, s), mode, length);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo == 0.0 {
        return Some(*from);
    }
    if f_hi == 0.0 {
        return Some(*to);
    }
    if f_lo.signum() == f_hi.signum() {
        return None;
    }
    let span = (to.position() - from.position()).norm().max(f64::MIN_POSITIVE);
    while (hi - lo) * span > tol_mm {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid)?;
        if f_mid == 0.0 {
            return Some(lerp(from, to, mid));
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (a, b) = (f(lo)?, f(hi)?);
    Some(lerp(from, to, if a.abs() <= b.abs() { lo } else { hi }))
}

/// Samples the segment `from -> to` at `samples + 1` points and bisects every sign
/// change of `det Ā` between consecutive reachable samples.
pub fn scan_parallel_singularities(
    params: &DesignParams,
    mode: WorkingMode,
    length: f64,
    from: &Pose,
    to: &Pose,
    samples: usize,
    tol_mm: f64,
) -> Vec<Pose> {
    let poses: Vec<Pose> = (0..=samples)
        .map(|k| lerp(from, to, k as f64 / samples as f64))
        .collect();
    let signs: Vec<Option<f64>> = poses
        .iter()
        .map(|p| signed_parallel_measure(params, p, mode, length))
        .collect();
    poses
        .windows(2)
        .zip(signs.windows(2))
        .filter_map(|(p, s)| match (s[0], s[1]) {
            (Some(a), Some(b)) if a.signum() != b.signum() => {
                locate_parallel_singularity(params, mode, length, &p[0], &p[1], tol_mm)
            }
            _ => None,
        })
        .collect()
}
