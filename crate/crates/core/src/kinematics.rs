//! Inverse and direct kinematics, and the velocity matrices `A`, `B`, `Ā`, `K̄`, `J`.
//!
//! Each limb closes the loop `‖c_i − A_i − ρ_i α_i‖ = l`, a quadratic in `ρ_i` whose two
//! roots give diagonal entries `m_i = (c_i − b_i)ᵀ α_i` of opposite sign. The working
//! mode picks one root per limb by that sign.

use nalgebra::Vector3;
use serde::Serialize;
use thiserror::Error;

use crate::conditioning::{condition_report, hadamard_ratio};
use crate::geometry::{
    check_limb, cross, rotate90, DesignParams, GeometryError, Mat3, Pose, Sign, Vec2, WorkingMode, LIMBS,
};
use crate::singularity::{PARALLEL_EPS, SERIAL_EPS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KinematicsError {
    #[error("pose unreachable: limb {limb} cannot close its loop")]
    Unreachable { limb: usize },
    #[error(
        "working mode unavailable: limb {limb} has no branch with sign {sign:?} (serial singularity or wrong branch)"
    )]
    ModeUnavailable { limb: usize, sign: Sign },
    #[error("direct kinematics did not converge: residual {residual:e} mm after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("direct kinematics Newton system is singular (condition number {condition:e})")]
    SingularSystem { condition: f64 },
    #[error("Ā is singular at this configuration (parallel singularity)")]
    ParallelSingular,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Per-limb quantities of a solved configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimbState {
    /// Actuated displacement along the rail, mm.
    pub rho: f64,
    /// Slider point `B_i`.
    pub b: Vec2,
    /// Platform pivot `C_i`.
    pub c: Vec2,
    /// `l_i = c_i − b_i`.
    pub l_vec: Vec2,
    /// `k_i = l_iᵀ E (p − c_i)`, mm².
    pub k: f64,
    /// `m_i = l_iᵀ α_i`, mm.
    pub m: f64,
    /// Unsigned angle `∠B_i C_i P` in `[0, pi]`.
    pub gamma: f64,
}

impl LimbState {
    /// Limb quantities at `pose` with the slider placed at `rho`. Loop closure is not
    /// enforced.
    pub fn from_rho(params: &DesignParams, pose: &Pose, i: usize, rho: f64) -> Result<Self, GeometryError> {
        check_limb(i)?;
        let alpha = params.rail(i);
        let b = params.anchor(i) + rho * alpha;
        let c = params.attach(pose, i);
        Ok(Self::build(pose, b, c, rho, (c - b).dot(&alpha)))
    }

    fn build(pose: &Pose, b: Vec2, c: Vec2, rho: f64, m: f64) -> Self {
        let l_vec = c - b;
        let to_p = pose.position() - c;
        let k = l_vec.dot(&rotate90(to_p));
        let back = b - c;
        let gamma = cross(back, to_p).abs().atan2(back.dot(&to_p));
        LimbState {
            rho,
            b,
            c,
            l_vec,
            k,
            m,
            gamma,
        }
    }
}

/// Solutions of one limb's closure quadratic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum LimbRoots {
    Outside,
    /// Double root: the limb sits on a serial singularity, `m = 0`.
    Tangent(LimbState),
    Two {
        plus: LimbState,
        minus: LimbState,
    },
}

pub(crate) fn limb_roots(params: &DesignParams, pose: &Pose, i: usize) -> LimbRoots {
    let l = params.limb_length;
    let alpha = params.rail(i);
    let anchor = params.anchor(i);
    let c = params.attach(pose, i);
    let d = c - anchor;
    let along = d.dot(&alpha);
    let perp = cross(alpha, d).abs();
    let disc = (l - perp) * (l + perp);
    // Rounding in `perp` limits how well `disc` is known near tangency.
    let tol = 8.0 * f64::EPSILON * (l * l + d.norm_squared());
    if disc < -tol {
        return LimbRoots::Outside;
    }
    if disc <= tol {
        let b = anchor + along * alpha;
        return LimbRoots::Tangent(LimbState::build(pose, b, c, along, 0.0));
    }
    let s = disc.sqrt();
    let state = |sign: f64| {
        let rho = along - sign * s;
        LimbState::build(pose, anchor + rho * alpha, c, rho, sign * s)
    };
    LimbRoots::Two {
        plus: state(1.0),
        minus: state(-1.0),
    }
}

/// Solves each limb on the branch selected by `mode`.
pub fn inverse_kinematics(
    params: &DesignParams,
    pose: &Pose,
    mode: WorkingMode,
) -> Result<[LimbState; 3], KinematicsError> {
    let serial_floor = SERIAL_EPS * params.limb_length;
    let mut limbs = [None; LIMBS];
    for (i, slot) in limbs.iter_mut().enumerate() {
        let sign = mode.signs[i];
        let unavailable = KinematicsError::ModeUnavailable { limb: i + 1, sign };
        let state = match limb_roots(params, pose, i) {
            LimbRoots::Outside => return Err(KinematicsError::Unreachable { limb: i + 1 }),
            LimbRoots::Tangent(_) => return Err(unavailable),
            LimbRoots::Two { plus, minus } => match sign {
                Sign::Plus => plus,
                Sign::Minus => minus,
            },
        };
        if state.m.abs() < serial_floor || Sign::of(state.m) != Some(sign) {
            return Err(unavailable);
        }
        *slot = Some(state);
    }
    Ok(limbs.map(|s| s.expect("every limb solved")))
}

/// Like [`inverse_kinematics`], but limbs sitting exactly on a serial singularity are
/// returned in their tangent (`m = 0`) configuration instead of failing.
pub(crate) fn inverse_kinematics_tangent_ok(
    params: &DesignParams,
    pose: &Pose,
    mode: WorkingMode,
) -> Result<[LimbState; 3], KinematicsError> {
    let mut limbs = [None; LIMBS];
    for (i, slot) in limbs.iter_mut().enumerate() {
        *slot = Some(match limb_roots(params, pose, i) {
            LimbRoots::Outside => return Err(KinematicsError::Unreachable { limb: i + 1 }),
            LimbRoots::Tangent(state) => state,
            LimbRoots::Two { plus, minus } => match mode.signs[i] {
                Sign::Plus => plus,
                Sign::Minus => minus,
            },
        });
    }
    Ok(limbs.map(|s| s.expect("every limb solved")))
}

/// `‖c_i(pose) − A_i − ρ_i α_i‖ − l` for each limb.
pub fn loop_closure_residuals(params: &DesignParams, rho: &[f64; 3], pose: &Pose) -> [f64; 3] {
    std::array::from_fn(|i| {
        let b = params.anchor(i) + rho[i] * params.rail(i);
        (params.attach(pose, i) - b).norm() - params.limb_length
    })
}

const DK_MAX_ITERATIONS: usize = 50;
const DK_TOLERANCE: f64 = 1e-10;
const DK_POLISH: f64 = 1e-13;
const DK_STEP: f64 = 1e-7;
const DK_MAX_CONDITION: f64 = 1e12;

/// Newton iteration on the three loop-closure residuals, starting at `seed`.
///
/// The Newton matrix is built by central differences. Succeeds once every residual is
/// below `1e-10 l`; keeps polishing while residuals still shrink.
pub fn direct_kinematics(params: &DesignParams, rho: &[f64; 3], seed: &Pose) -> Result<Pose, KinematicsError> {
    let l = params.limb_length;
    let h_len = DK_STEP * l;
    let h_ang = DK_STEP;
    let mut pose = *seed;
    let mut previous = f64::INFINITY;
    let max_abs = |r: [f64; 3]| r.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    for iteration in 0..DK_MAX_ITERATIONS {
        let r = loop_closure_residuals(params, rho, &pose);
        let norm = max_abs(r);
        if !norm.is_finite() {
            return Err(KinematicsError::NoConvergence {
                residual: norm,
                iterations: iteration,
            });
        }
        if norm <= DK_POLISH * l || (norm <= DK_TOLERANCE * l && norm >= 0.5 * previous) {
            return Ok(pose);
        }
        previous = norm;

        // Columns: d/dx, d/dy, d/d(l * theta) so the system is homogeneous in length.
        let column = |dx: f64, dy: f64, dt: f64, h: f64| {
            let fwd = loop_closure_residuals(params, rho, &Pose::new(pose.x + dx, pose.y + dy, pose.theta + dt));
            let bwd = loop_closure_residuals(params, rho, &Pose::new(pose.x - dx, pose.y - dy, pose.theta - dt));
            Vector3::from_fn(|i, _| (fwd[i] - bwd[i]) / (2.0 * h))
        };
        let jac = Mat3::from_columns(&[
            column(h_len, 0.0, 0.0, h_len),
            column(0.0, h_len, 0.0, h_len),
            column(0.0, 0.0, h_ang, h_ang) / l,
        ]);
        let condition = condition_report(&jac).map(|c| c.kappa).unwrap_or(f64::INFINITY);
        if condition > DK_MAX_CONDITION {
            return Err(KinematicsError::SingularSystem { condition });
        }
        let step = jac
            .lu()
            .solve(&-Vector3::from(r))
            .ok_or(KinematicsError::SingularSystem { condition })?;
        pose.x += step[0];
        pose.y += step[1];
        pose.theta += step[2] / l;
    }

    let residual = max_abs(loop_closure_residuals(params, rho, &pose));
    if residual <= DK_TOLERANCE * l {
        Ok(pose)
    } else {
        Err(KinematicsError::NoConvergence {
            residual,
            iterations: DK_MAX_ITERATIONS,
        })
    }
}

/// Kinematic matrices of a configuration for a given characteristic length `L`.
///
/// `K̄` is `None` at serial singularities and `J` is `None` at parallel singularities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KinematicMatrices {
    /// Rows `[l_iᵀ, −k_i]`.
    pub a: Mat3,
    /// `diag(m_i)`.
    pub b: Mat3,
    /// `A` with its third column divided by `L`.
    pub a_bar: Mat3,
    /// `B⁻¹ Ā`.
    pub k_bar: Option<Mat3>,
    /// `Ā⁻¹ B`.
    pub j: Option<Mat3>,
    /// Characteristic length used, mm.
    pub length: f64,
}

pub fn assemble_matrices(params: &DesignParams, limbs: &[LimbState; 3], length: f64) -> KinematicMatrices {
    debug_assert!(length > 0.0, "characteristic length must be positive");
    let a = Mat3::from_fn(|i, j| match j {
        0 => limbs[i].l_vec.x,
        1 => limbs[i].l_vec.y,
        _ => -limbs[i].k,
    });
    let mut a_bar = a;
    a_bar.column_mut(2).unscale_mut(length);
    let b = Mat3::from_diagonal(&Vector3::from_fn(|i, _| limbs[i].m));

    let serial_floor = SERIAL_EPS * params.limb_length;
    let k_bar = limbs
        .iter()
        .all(|s| s.m.abs() >= serial_floor && s.m != 0.0)
        .then(|| Mat3::from_fn(|i, j| a_bar[(i, j)] / limbs[i].m));
    let j = (hadamard_ratio(&a_bar) >= PARALLEL_EPS)
        .then(|| a_bar.lu().solve(&b))
        .flatten();

    KinematicMatrices {
        a,
        b,
        a_bar,
        k_bar,
        j,
        length,
    }
}

impl KinematicMatrices {
    pub fn is_parallel_singular(&self) -> bool {
        self.j.is_none()
    }

    pub fn is_serial_singular(&self) -> bool {
        self.k_bar.is_none()
    }

    /// Row-major JSON rendering; singular entries are `null`.
    pub fn to_json(&self) -> serde_json::Value {
        let rows = |m: &Mat3| -> Vec<[f64; 3]> { (0..3).map(|i| [m[(i, 0)], m[(i, 1)], m[(i, 2)]]).collect() };
        serde_json::json!({
            "L_mm": self.length,
            "A": rows(&self.a),
            "B": rows(&self.b),
            "A_bar": rows(&self.a_bar),
            "K_bar": self.k_bar.as_ref().map(rows),
            "J": self.j.as_ref().map(rows),
        })
    }
}

/// Actuated joint rates `ρ̇`, mm/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointRates(pub [f64; 3]);

/// Platform twist in normalized coordinates `(ṗ, L θ̇)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Twist {
    pub linear: Vec2,
    /// `L θ̇`, mm/s.
    pub scaled_angular: f64,
    pub length: f64,
}

impl Twist {
    pub fn normalized(&self) -> Vector3<f64> {
        Vector3::new(self.linear.x, self.linear.y, self.scaled_angular)
    }

    /// `(ṗ, θ̇)` with `θ̇` in rad/s.
    pub fn raw(&self) -> (Vec2, f64) {
        (self.linear, self.scaled_angular / self.length)
    }
}

/// `t = J ρ̇`.
pub fn twist_from_rates(mats: &KinematicMatrices, rates: &JointRates) -> Result<Twist, KinematicsError> {
    let j = mats.j.as_ref().ok_or(KinematicsError::ParallelSingular)?;
    let t = j * Vector3::from(rates.0);
    Ok(Twist {
        linear: Vec2::new(t[0], t[1]),
        scaled_angular: t[2],
        length: mats.length,
    })
}
