//! Workspace sweeps: per-position optimum conditioning over orientation, the
//! reachability mask, isoconditioning loci and the averaged global index.

mod contour;
mod export;

pub use contour::{contour_level, extract_isoloci, IsoLoci, Polyline};
pub use export::{format_sig, round_sig};

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conditioning::{condition_report, diag_condition, KappaVariant};
use crate::geometry::{DesignParams, Pose, WorkingMode};
use crate::kinematics::{assemble_matrices, inverse_kinematics};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("invalid sweep specification: {0}")]
    InvalidSpec(String),
    #[error("contour level {0} is outside (0, 1)")]
    LevelOutOfRange(f64),
    #[error("no grid node is reachable: the workspace is empty")]
    EmptyWorkspace,
}

/// Matrix whose conditioning index is mapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatrixKind {
    #[serde(rename = "A_bar")]
    ABar,
    #[serde(rename = "B")]
    B,
    #[serde(rename = "K_bar")]
    KBar,
}

impl MatrixKind {
    pub const ALL: [MatrixKind; 3] = [MatrixKind::ABar, MatrixKind::B, MatrixKind::KBar];

    pub fn label(self) -> &'static str {
        match self {
            MatrixKind::ABar => "A_bar",
            MatrixKind::B => "B",
            MatrixKind::KBar => "K_bar",
        }
    }
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for MatrixKind {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "a" | "a_bar" | "abar" => Ok(MatrixKind::ABar),
            "b" => Ok(MatrixKind::B),
            "k" | "k_bar" | "kbar" => Ok(MatrixKind::KBar),
            _ => Err(SweepError::InvalidSpec(format!(
                "unknown matrix {s:?} (expected A, B or K)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    /// Orientation samples `2 pi k / n_theta`.
    pub n_theta: usize,
    pub matrix_kind: MatrixKind,
    pub mode: WorkingMode,
    /// Characteristic length for `Ā` and `K̄`, mm.
    pub length: f64,
    pub kappa_b_variant: KappaVariant,
    /// Golden-section refinement around the best sampled orientation.
    pub refine_theta: bool,
}

impl SweepSpec {
    /// `[−300, 300]²` window, 101 x 101 nodes, 120 orientations.
    pub fn new(matrix_kind: MatrixKind, mode: WorkingMode, length: f64) -> Self {
        SweepSpec {
            x_range: (-300.0, 300.0),
            y_range: (-300.0, 300.0),
            nx: 101,
            ny: 101,
            n_theta: 120,
            matrix_kind,
            mode,
            length,
            kappa_b_variant: KappaVariant::Ratio,
            refine_theta: false,
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let bad = |msg: &str| Err(SweepError::InvalidSpec(msg.to_string()));
        if self.nx < 2 || self.ny < 2 {
            return bad("nx and ny must be at least 2");
        }
        if self.n_theta < 4 {
            return bad("n_theta must be at least 4");
        }
        for (lo, hi) in [self.x_range, self.y_range] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return bad("ranges must be finite with min < max");
            }
        }
        if !(self.length.is_finite() && self.length > 0.0) {
            return bad("characteristic length must be positive");
        }
        Ok(())
    }

    pub fn x_at(&self, ix: usize) -> f64 {
        let (lo, hi) = self.x_range;
        lo + (hi - lo) * ix as f64 / (self.nx - 1) as f64
    }

    pub fn y_at(&self, iy: usize) -> f64 {
        let (lo, hi) = self.y_range;
        lo + (hi - lo) * iy as f64 / (self.ny - 1) as f64
    }

    pub fn theta_at(&self, k: usize) -> f64 {
        TAU * k as f64 / self.n_theta as f64
    }
}

/// Best index over orientation at one position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeOptimum {
    pub index: f64,
    pub theta: f64,
}

/// Result of a sweep; nodes are stored row-major with `y` outer.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    pub spec: SweepSpec,
    nodes: Vec<Option<NodeOptimum>>,
}

impl SweepGrid {
    /// Grid from precomputed node values (row-major, `y` outer).
    pub fn from_nodes(spec: SweepSpec, nodes: Vec<Option<NodeOptimum>>) -> Result<Self, SweepError> {
        if nodes.len() != spec.nx * spec.ny {
            return Err(SweepError::InvalidSpec(format!(
                "expected {} nodes, got {}",
                spec.nx * spec.ny,
                nodes.len()
            )));
        }
        Ok(SweepGrid { spec, nodes })
    }

    pub fn node(&self, ix: usize, iy: usize) -> Option<NodeOptimum> {
        self.nodes[iy * self.spec.nx + ix]
    }

    pub fn nodes(&self) -> &[Option<NodeOptimum>] {
        &self.nodes
    }

    pub fn value(&self, ix: usize, iy: usize) -> Option<f64> {
        self.node(ix, iy).map(|n| n.index)
    }

    pub fn values(&self) -> Vec<Option<f64>> {
        self.nodes.iter().map(|n| n.map(|n| n.index)).collect()
    }

    pub fn reachable_mask(&self) -> Vec<bool> {
        self.nodes.iter().map(Option::is_some).collect()
    }

    pub fn reachable_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_some()).count()
    }
}

/// Conditioning index of the spec's matrix at one pose, or `None` when the pose is not
/// reachable in the spec's mode.
pub fn pose_index(params: &DesignParams, spec: &SweepSpec, pose: &Pose) -> Option<f64> {
    let limbs = inverse_kinematics(params, pose, spec.mode).ok()?;
    let mats = assemble_matrices(params, &limbs, spec.length);
    let index = match spec.matrix_kind {
        MatrixKind::B => diag_condition(&mats.b, spec.kappa_b_variant).index,
        MatrixKind::ABar => condition_report(&mats.a_bar).ok()?.index,
        MatrixKind::KBar => match mats.k_bar {
            Some(k) => condition_report(&k).ok()?.index,
            None => 0.0,
        },
    };
    Some(index)
}

const GOLDEN_STEPS: usize = 60;

fn refine_orientation(params: &DesignParams, spec: &SweepSpec, x: f64, y: f64, start: NodeOptimum) -> NodeOptimum {
    let f = |theta: f64| pose_index(params, spec, &Pose::new(x, y, theta)).unwrap_or(f64::NEG_INFINITY);
    let h = TAU / spec.n_theta as f64;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (start.theta - h, start.theta + h);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_STEPS {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let (theta, index) = if fc > fd { (c, fc) } else { (d, fd) };
    if index > start.index {
        NodeOptimum { index, theta }
    } else {
        start
    }
}

/// Maximum index over the sampled orientations at position `(x, y)`; `None` when no
/// orientation is reachable.
pub fn node_optimum(params: &DesignParams, spec: &SweepSpec, x: f64, y: f64) -> Option<NodeOptimum> {
    let mut best: Option<NodeOptimum> = None;
    for k in 0..spec.n_theta {
        let theta = spec.theta_at(k);
        if let Some(index) = pose_index(params, spec, &Pose::new(x, y, theta)) {
            if best.is_none_or(|b| index > b.index) {
                best = Some(NodeOptimum { index, theta });
            }
        }
    }
    match best {
        Some(b) if spec.refine_theta => Some(refine_orientation(params, spec, x, y, b)),
        other => other,
    }
}

pub fn sweep(params: &DesignParams, spec: &SweepSpec) -> Result<SweepGrid, SweepError> {
    spec.validate()?;
    let nodes = (0..spec.nx * spec.ny)
        .into_par_iter()
        .map(|n| node_optimum(params, spec, spec.x_at(n % spec.nx), spec.y_at(n / spec.nx)))
        .collect();
    Ok(SweepGrid { spec: *spec, nodes })
}

/// Mean index over reachable nodes.
pub fn global_index(grid: &SweepGrid) -> Result<f64, SweepError> {
    let (sum, count) = grid
        .nodes
        .iter()
        .flatten()
        .fold((0.0, 0usize), |(s, c), n| (s + n.index, c + 1));
    if count == 0 {
        Err(SweepError::EmptyWorkspace)
    } else {
        Ok(sum / count as f64)
    }
}

/// Global indices for two working modes (rows) and the three matrices (columns, in
/// [`MatrixKind::ALL`] order).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeComparison {
    pub modes: [WorkingMode; 2],
    pub kinds: [MatrixKind; 3],
    pub values: [[f64; 3]; 2],
}

/// Compares the two canonical working-mode classes, `(+,+,+)` and `(−,+,+)`.
pub fn compare_modes(params: &DesignParams, template: &SweepSpec) -> Result<ModeComparison, SweepError> {
    compare_modes_for(params, template, [WorkingMode::ALL_PLUS, WorkingMode::MIXED])
}

pub fn compare_modes_for(
    params: &DesignParams,
    template: &SweepSpec,
    modes: [WorkingMode; 2],
) -> Result<ModeComparison, SweepError> {
    let mut values = [[0.0; 3]; 2];
    for (row, mode) in modes.iter().enumerate() {
        for (col, kind) in MatrixKind::ALL.iter().enumerate() {
            let spec = SweepSpec {
                mode: *mode,
                matrix_kind: *kind,
                ..*template
            };
            values[row][col] = global_index(&sweep(params, &spec)?)?;
        }
    }
    Ok(ModeComparison {
        modes,
        kinds: MatrixKind::ALL,
        values,
    })
}
