//! Fixed geometry of the 3-PRR manipulator, end-effector poses, working modes and the
//! planar-vector helpers everything else is built on.
//!
//! World frame: `O` at the origin, `x` to the right, `y` up, angles counterclockwise
//! from `+x`. Lengths are millimetres and angles radians throughout.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix3, Vector2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vec2 = Vector2<f64>;
pub type Mat2 = Matrix2<f64>;
pub type Mat3 = Matrix3<f64>;

/// Number of limbs.
pub const LIMBS: usize = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("limb index {0} out of range (limbs are numbered 1..=3)")]
    LimbOutOfRange(usize),
    #[error("design parameter {name} must be a positive finite length, got {value}")]
    NonPositiveLength { name: &'static str, value: f64 },
    #[error("design parameter {name} has a non-finite angle")]
    NonFiniteAngle { name: &'static str },
    #[error("invalid design parameter document: {0}")]
    Json(String),
    #[error("invalid working mode {0:?}: expected three signs such as \"+-+\"")]
    BadMode(String),
}

/// The quarter-turn matrix `E = [[0, -1], [1, 0]]`.
pub fn quarter_turn() -> Mat2 {
    Mat2::new(0.0, -1.0, 1.0, 0.0)
}

/// `E * v`: counterclockwise quarter turn.
#[inline]
pub fn rotate90(v: Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

/// Unit vector at angle `phi`.
#[inline]
pub fn unit(phi: f64) -> Vec2 {
    let (s, c) = phi.sin_cos();
    Vec2::new(c, s)
}

/// 2-D cross product `a.x * b.y - a.y * b.x`.
#[inline]
pub fn cross(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Rotates `v` by `phi` about the origin.
#[inline]
pub fn rotate(v: Vec2, phi: f64) -> Vec2 {
    let (s, c) = phi.sin_cos();
    Vec2::new(c * v.x - s * v.y, s * v.x + c * v.y)
}

pub(crate) fn check_limb(i: usize) -> Result<(), GeometryError> {
    if i < LIMBS {
        Ok(())
    } else {
        Err(GeometryError::LimbOutOfRange(i + 1))
    }
}

/// Default directions of `OA_i` and of `PC_i` at `theta = 0`.
pub const DEFAULT_TRIANGLE_ANGLES: [f64; 3] = [FRAC_PI_2, FRAC_PI_2 + 2.0 * PI / 3.0, FRAC_PI_2 + 4.0 * PI / 3.0];

/// Rails tangent to the base circle at each anchor, i.e. along the sides of the
/// equilateral triangle circumscribing it.
pub fn default_rail_angles(base_angles: &[f64; 3]) -> [f64; 3] {
    base_angles.map(|a| a + FRAC_PI_2)
}

/// Manipulator design: equal base, platform and limb dimensions for every limb.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsDocument", into = "ParamsDocument")]
pub struct DesignParams {
    /// Base circumradius `R` (length of `A_i O`).
    pub base_radius: f64,
    /// Limb length `l` (length of `B_i C_i`).
    pub limb_length: f64,
    /// Platform circumradius `r` (length of `C_i P`).
    pub platform_radius: f64,
    pub base_angles: [f64; 3],
    pub platform_angles: [f64; 3],
    /// Directions of the prismatic axes through each `A_i`.
    pub rail_angles: [f64; 3],
}

/// On-disk layout of [`DesignParams`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsDocument {
    #[serde(rename = "R_mm")]
    base_radius: f64,
    #[serde(rename = "l_mm")]
    limb_length: f64,
    #[serde(rename = "r_mm")]
    platform_radius: f64,
    #[serde(rename = "base_angles_rad", default, skip_serializing_if = "Option::is_none")]
    base_angles: Option<[f64; 3]>,
    #[serde(rename = "platform_angles_rad", default, skip_serializing_if = "Option::is_none")]
    platform_angles: Option<[f64; 3]>,
    #[serde(rename = "rail_angles_rad", default, skip_serializing_if = "Option::is_none")]
    rail_angles: Option<[f64; 3]>,
}

impl TryFrom<ParamsDocument> for DesignParams {
    type Error = GeometryError;

    fn try_from(doc: ParamsDocument) -> Result<Self, Self::Error> {
        let base_angles = doc.base_angles.unwrap_or(DEFAULT_TRIANGLE_ANGLES);
        let params = DesignParams {
            base_radius: doc.base_radius,
            limb_length: doc.limb_length,
            platform_radius: doc.platform_radius,
            base_angles,
            platform_angles: doc.platform_angles.unwrap_or(DEFAULT_TRIANGLE_ANGLES),
            rail_angles: doc.rail_angles.unwrap_or_else(|| default_rail_angles(&base_angles)),
        };
        params.validate()?;
        Ok(params)
    }
}

impl From<DesignParams> for ParamsDocument {
    fn from(p: DesignParams) -> Self {
        ParamsDocument {
            base_radius: p.base_radius,
            limb_length: p.limb_length,
            platform_radius: p.platform_radius,
            base_angles: Some(p.base_angles),
            platform_angles: Some(p.platform_angles),
            rail_angles: Some(p.rail_angles),
        }
    }
}

impl Default for DesignParams {
    fn default() -> Self {
        default_params()
    }
}

/// `R = 200 mm`, `l = 200 mm`, `r = 100 mm` with equilateral base and platform.
pub fn default_params() -> DesignParams {
    DesignParams {
        base_radius: 200.0,
        limb_length: 200.0,
        platform_radius: 100.0,
        base_angles: DEFAULT_TRIANGLE_ANGLES,
        platform_angles: DEFAULT_TRIANGLE_ANGLES,
        rail_angles: default_rail_angles(&DEFAULT_TRIANGLE_ANGLES),
    }
}

impl DesignParams {
    /// Equilateral design with default angle sets.
    pub fn new(base_radius: f64, limb_length: f64, platform_radius: f64) -> Result<Self, GeometryError> {
        let params = DesignParams {
            base_radius,
            limb_length,
            platform_radius,
            ..default_params()
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        for (name, value) in [
            ("R_mm", self.base_radius),
            ("l_mm", self.limb_length),
            ("r_mm", self.platform_radius),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(GeometryError::NonPositiveLength { name, value });
            }
        }
        for (name, angles) in [
            ("base_angles_rad", &self.base_angles),
            ("platform_angles_rad", &self.platform_angles),
            ("rail_angles_rad", &self.rail_angles),
        ] {
            if angles.iter().any(|a| !a.is_finite()) {
                return Err(GeometryError::NonFiniteAngle { name });
            }
        }
        Ok(())
    }

    /// Parses the JSON document; malformed text is [`GeometryError::Json`], while a
    /// well-formed document with invalid values reports the offending parameter.
    pub fn from_json(text: &str) -> Result<Self, GeometryError> {
        let doc: ParamsDocument = serde_json::from_str(text).map_err(|e| GeometryError::Json(e.to_string()))?;
        DesignParams::try_from(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("design parameters always serialize")
    }

    /// Anchor `A_i` (zero-based `i`).
    pub fn base_anchor(&self, i: usize) -> Result<Vec2, GeometryError> {
        check_limb(i)?;
        Ok(self.anchor(i))
    }

    /// Unit rail direction `alpha_i` (zero-based `i`).
    pub fn rail_direction(&self, i: usize) -> Result<Vec2, GeometryError> {
        check_limb(i)?;
        Ok(self.rail(i))
    }

    /// Platform pivot `c_i = p + r u(platform_angle_i + theta)` (zero-based `i`).
    pub fn platform_attach(&self, pose: &Pose, i: usize) -> Result<Vec2, GeometryError> {
        check_limb(i)?;
        Ok(self.attach(pose, i))
    }

    #[inline]
    pub(crate) fn anchor(&self, i: usize) -> Vec2 {
        self.base_radius * unit(self.base_angles[i])
    }

    #[inline]
    pub(crate) fn rail(&self, i: usize) -> Vec2 {
        unit(self.rail_angles[i])
    }

    #[inline]
    pub(crate) fn attach(&self, pose: &Pose, i: usize) -> Vec2 {
        pose.position() + self.platform_radius * unit(self.platform_angles[i] + pose.theta)
    }

    /// Checks the structural preconditions of isotropy: equilateral base and platform
    /// triangles and rails making the same angle with their anchor radius.
    pub fn isotropy_structure(&self) -> StructureReport {
        StructureReport {
            equilateral_base: equally_spaced(&self.base_angles),
            equilateral_platform: equally_spaced(&self.platform_angles),
            rails_along_sides: {
                let offsets: Vec<f64> = (0..LIMBS)
                    .map(|i| wrap_angle(self.rail_angles[i] - self.base_angles[i]))
                    .collect();
                offsets.iter().all(|o| angle_distance(*o, offsets[0]) < 1e-9)
            },
            half_base_platform: (self.platform_radius - 0.5 * self.base_radius).abs() <= 1e-9 * self.base_radius,
        }
    }
}

/// Structural checks relevant to the isotropy search. Equal limb lengths and equal
/// radii are implied by [`DesignParams`] itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub equilateral_base: bool,
    pub equilateral_platform: bool,
    pub rails_along_sides: bool,
    /// `r = R/2`, the isotropy condition furthest from serial singularities.
    pub half_base_platform: bool,
}

impl StructureReport {
    /// All constraints needed for an isotropic configuration to exist.
    pub fn admits_isotropy(&self) -> bool {
        self.equilateral_base && self.equilateral_platform && self.rails_along_sides
    }
}

fn equally_spaced(angles: &[f64; 3]) -> bool {
    let step = 2.0 * PI / 3.0;
    let d1 = wrap_angle(angles[1] - angles[0]);
    let d2 = wrap_angle(angles[2] - angles[1]);
    (angle_distance(d1, step) < 1e-9 && angle_distance(d2, step) < 1e-9)
        || (angle_distance(d1, -step) < 1e-9 && angle_distance(d2, -step) < 1e-9)
}

/// Reduces an angle to `[0, 2pi)`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Shortest angular distance between two angles, in `[0, pi]`.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    d.min(TAU - d)
}

/// End-effector pose: operation point `P = (x, y)` and platform orientation `theta`.
///
/// `theta` is stored as given; [`Pose::approx_eq`] compares it modulo `2pi`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose {
    pub const fn new(x: f64, y: f64, theta: f64) -> Self {
        Pose { x, y, theta }
    }

    #[inline]
    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn reduced_theta(&self) -> f64 {
        wrap_angle(self.theta)
    }

    pub fn approx_eq(&self, other: &Pose, tol_mm: f64, tol_rad: f64) -> bool {
        (self.x - other.x).abs() <= tol_mm
            && (self.y - other.y).abs() <= tol_mm
            && angle_distance(self.theta, other.theta) <= tol_rad
    }

    /// Rigidly rotates the pose about `O`.
    pub fn rotated_about_origin(&self, phi: f64) -> Pose {
        let p = rotate(self.position(), phi);
        Pose::new(p.x, p.y, self.theta + phi)
    }
}

impl fmt::Display for Pose {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    #[inline]
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn of(x: f64) -> Option<Sign> {
        if x > 0.0 {
            Some(Sign::Plus)
        } else if x < 0.0 {
            Some(Sign::Minus)
        } else {
            None
        }
    }
}

/// Working mode: the sign pattern of the diagonal entries `m_i` of `B`, i.e. one
/// inverse-kinematics branch per limb.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct WorkingMode {
    pub signs: [Sign; 3],
}

impl WorkingMode {
    pub const fn new(signs: [Sign; 3]) -> Self {
        WorkingMode { signs }
    }

    pub const ALL_PLUS: WorkingMode = WorkingMode::new([Sign::Plus; 3]);
    pub const ALL_MINUS: WorkingMode = WorkingMode::new([Sign::Minus; 3]);
    /// Representative of the mixed-sign class.
    pub const MIXED: WorkingMode = WorkingMode::new([Sign::Minus, Sign::Plus, Sign::Plus]);

    pub fn negated(self) -> WorkingMode {
        WorkingMode::new(self.signs.map(Sign::flipped))
    }

    /// Mode seen after rotating the scene by `2pi/3 * steps` about `O`: limb `i` takes
    /// the sign previously held by limb `i - steps`.
    pub fn cycled(self, steps: usize) -> WorkingMode {
        let mut signs = self.signs;
        for (i, s) in signs.iter_mut().enumerate() {
            *s = self.signs[(i + LIMBS - steps % LIMBS) % LIMBS];
        }
        WorkingMode::new(signs)
    }

    /// Bit pattern with bit `i` set when limb `i` is negative.
    pub fn bits(self) -> u8 {
        self.signs
            .iter()
            .enumerate()
            .fold(0, |acc, (i, s)| acc | (((*s == Sign::Minus) as u8) << i))
    }

    pub fn from_bits(bits: u8) -> WorkingMode {
        let sign = |i: usize| if bits >> i & 1 == 1 { Sign::Minus } else { Sign::Plus };
        WorkingMode::new([sign(0), sign(1), sign(2)])
    }
}

impl fmt::Display for WorkingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.signs {
            f.write_str(match s {
                Sign::Plus => "+",
                Sign::Minus => "-",
            })?;
        }
        Ok(())
    }
}

impl FromStr for WorkingMode {
    type Err = GeometryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let signs: Vec<Sign> = s
            .chars()
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' => Ok(Sign::Minus),
                _ => Err(GeometryError::BadMode(s.to_string())),
            })
            .collect::<Result<_, _>>()?;
        let signs: [Sign; 3] = signs.try_into().map_err(|_| GeometryError::BadMode(s.to_string()))?;
        Ok(WorkingMode::new(signs))
    }
}

impl From<WorkingMode> for String {
    fn from(mode: WorkingMode) -> String {
        mode.to_string()
    }
}

impl TryFrom<String> for WorkingMode {
    type Error = GeometryError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// All eight working modes and their classes under global negation and
/// 120-degree limb rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeCatalog {
    pub modes: [WorkingMode; 8],
    /// Each class lists its members in bit order; the first member is the representative.
    pub classes: Vec<Vec<WorkingMode>>,
}

impl ModeCatalog {
    pub fn representatives(&self) -> Vec<WorkingMode> {
        self.classes.iter().map(|c| c[0]).collect()
    }

    pub fn class_of(&self, mode: WorkingMode) -> usize {
        self.classes
            .iter()
            .position(|c| c.contains(&mode))
            .expect("catalog covers every sign triple")
    }
}

pub fn mode_catalog() -> ModeCatalog {
    let modes: [WorkingMode; 8] = std::array::from_fn(|b| WorkingMode::from_bits(b as u8));
    let mut classes: Vec<Vec<WorkingMode>> = Vec::new();
    for &mode in &modes {
        if classes.iter().any(|c| c.contains(&mode)) {
            continue;
        }
        let mut class: Vec<WorkingMode> = (0..LIMBS)
            .flat_map(|k| [mode.cycled(k), mode.cycled(k).negated()])
            .collect();
        class.sort_by_key(|m| m.bits());
        class.dedup();
        classes.push(class);
    }
    // Representative of the mixed class is (-,+,+).
    for class in &mut classes {
        if let Some(pos) = class.iter().position(|m| *m == WorkingMode::MIXED) {
            class[..=pos].rotate_right(1);
        }
    }
    ModeCatalog { modes, classes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn default_params_match_figure_values() {
        let p = default_params();
        assert_eq!((p.base_radius, p.limb_length, p.platform_radius), (200.0, 200.0, 100.0));
        assert_eq!(p.platform_radius, p.base_radius / 2.0);
        let a1 = p.base_anchor(0).unwrap();
        assert!((a1 - Vec2::new(0.0, 200.0)).norm() < 1e-12);
    }

    #[test]
    fn rotate90_examples() {
        assert_eq!(rotate90(Vec2::new(1.0, 0.0)), Vec2::new(0.0, 1.0));
        assert_eq!(rotate90(Vec2::new(0.0, 1.0)), Vec2::new(-1.0, 0.0));
        assert_eq!(rotate90(rotate90(Vec2::new(3.0, 4.0))), Vec2::new(-3.0, -4.0));
        assert_eq!(quarter_turn() * Vec2::new(2.0, 5.0), rotate90(Vec2::new(2.0, 5.0)));
    }

    #[test]
    fn base_anchor_examples() {
        let p = default_params();
        let a2 = p.base_anchor(1).unwrap();
        assert!((a2.x + 173.205).abs() < 1e-3 && (a2.y + 100.0).abs() < 1e-9);
        let centroid: Vec2 = (0..3).map(|i| p.base_anchor(i).unwrap()).sum::<Vec2>() / 3.0;
        assert!(centroid.norm() < 1e-12);
        assert_eq!(p.base_anchor(3), Err(GeometryError::LimbOutOfRange(4)));
    }

    #[test]
    fn platform_attach_examples() {
        let p = default_params();
        let c = p.platform_attach(&Pose::new(0.0, 0.0, 0.0), 0).unwrap();
        assert!((c - Vec2::new(0.0, 100.0)).norm() < 1e-12);
        let c = p.platform_attach(&Pose::new(0.0, 0.0, PI), 0).unwrap();
        assert!((c - Vec2::new(0.0, -100.0)).norm() < 1e-12);
        let pose = Pose::new(17.0, -3.0, 0.7);
        let centroid: Vec2 = (0..3).map(|i| p.platform_attach(&pose, i).unwrap()).sum::<Vec2>() / 3.0;
        assert!((centroid - Vec2::new(17.0, -3.0)).norm() < 1e-12);
        assert!(p.platform_attach(&pose, 7).is_err());
    }

    #[test]
    fn catalog_partitions_eight_modes_into_two_classes() {
        let cat = mode_catalog();
        assert_eq!(cat.modes.len(), 8);
        let mut seen: Vec<u8> = cat.modes.iter().map(|m| m.bits()).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 8);

        assert_eq!(cat.classes.len(), 2);
        assert_eq!(cat.representatives(), vec![WorkingMode::ALL_PLUS, WorkingMode::MIXED]);
        assert!(cat.classes[0].contains(&WorkingMode::ALL_MINUS));
        let total: usize = cat.classes.iter().map(Vec::len).sum();
        assert_eq!(total, 8);
        for m in cat.modes {
            assert_eq!(cat.classes.iter().filter(|c| c.contains(&m)).count(), 1);
        }
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("+++".parse::<WorkingMode>().unwrap(), WorkingMode::ALL_PLUS);
        assert_eq!("-++".parse::<WorkingMode>().unwrap(), WorkingMode::MIXED);
        assert!("++".parse::<WorkingMode>().is_err());
        assert!("+x+".parse::<WorkingMode>().is_err());
        assert!("++++".parse::<WorkingMode>().is_err());
        assert_eq!(WorkingMode::MIXED.to_string(), "-++");
        assert_eq!(WorkingMode::MIXED.cycled(1).to_string(), "+-+");
    }

    #[test]
    fn params_json_defaults_missing_angles() {
        let p = DesignParams::from_json(r#"{"R_mm": 200, "l_mm": 200, "r_mm": 100}"#).unwrap();
        assert_eq!(p, default_params());

        let back = DesignParams::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);

        let custom =
            DesignParams::from_json(r#"{"R_mm": 150, "l_mm": 180, "r_mm": 60, "base_angles_rad": [0.0, 2.0, 4.0]}"#)
                .unwrap();
        assert_eq!(custom.rail_angles, [FRAC_PI_2, 2.0 + FRAC_PI_2, 4.0 + FRAC_PI_2]);
        assert_eq!(custom.platform_angles, DEFAULT_TRIANGLE_ANGLES);

        assert!(matches!(
            DesignParams::from_json(r#"{"R_mm": -1, "l_mm": 200, "r_mm": 100}"#),
            Err(GeometryError::NonPositiveLength { .. })
        ));
        assert!(DesignParams::from_json(r#"{"R_mm": 1, "l_mm": 200}"#).is_err());
        assert!(DesignParams::from_json(r#"{"R_mm": 1, "l_mm": 2, "r_mm": 1, "x": 0}"#).is_err());
    }

    #[test]
    fn default_structure_admits_isotropy() {
        let s = default_params().isotropy_structure();
        assert!(s.admits_isotropy() && s.half_base_platform);
        let mut skew = default_params();
        skew.rail_angles[1] += 0.1;
        assert!(!skew.isotropy_structure().rails_along_sides);
    }

    fn pairwise_distances(pts: [Vec2; 3]) -> [f64; 3] {
        [
            (pts[0] - pts[1]).norm(),
            (pts[1] - pts[2]).norm(),
            (pts[2] - pts[0]).norm(),
        ]
    }

    proptest! {
        #[test]
        fn quarter_turn_properties(x in -1e3f64..1e3, y in -1e3f64..1e3) {
            let v = Vec2::new(x, y);
            let e = quarter_turn();
            prop_assert!((rotate90(v).norm() - v.norm()).abs() <= 1e-12 * (1.0 + v.norm()));
            prop_assert_eq!(rotate90(rotate90(v)), -v);
            prop_assert_eq!(e.transpose(), -e);
            prop_assert_eq!(e * e, -Mat2::identity());
        }

        #[test]
        fn triangles_stay_equilateral(x in -300f64..300.0, y in -300f64..300.0, th in -10f64..10.0) {
            let p = default_params();
            let pose = Pose::new(x, y, th);
            let anchors = pairwise_distances(std::array::from_fn(|i| p.anchor(i)));
            let pivots = pairwise_distances(std::array::from_fn(|i| p.attach(&pose, i)));
            for d in [anchors, pivots] {
                for k in 1..3 {
                    prop_assert!((d[k] - d[0]).abs() <= 1e-9 * d[0]);
                }
            }
        }

        #[test]
        fn cycling_three_times_is_identity(bits in 0u8..8) {
            let m = WorkingMode::from_bits(bits);
            prop_assert_eq!(m.cycled(3), m);
            prop_assert_eq!(m.negated().negated(), m);
            prop_assert_eq!(WorkingMode::from_bits(m.bits()), m);
        }
    }
}
