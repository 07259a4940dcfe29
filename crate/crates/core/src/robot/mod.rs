//! Serial revolute manipulators: kinematics, reach and collision checks.

pub mod geometry;

use std::path::Path;

use nalgebra::{Matrix6xX, Vector3};
use serde::{Deserialize, Serialize};

pub use geometry::{
    capsule_capsule_distance, capsule_obstacle_distance, primitive_distance, Capsule, Obstacle,
    Primitive,
};

use crate::error::{Error, Result};
use crate::se3::{axis_angle_to_rotation, Pose};

/// Default joint-space step between collision checks along a segment.
pub const DEFAULT_CHECK_RESOLUTION: f64 = 0.05;

static REFERENCE_6R: &str = include_str!("../../data/reference_6r.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointSpec {
    /// Fixed transform from the previous frame to this joint.
    pub offset: Pose,
    /// Revolute axis in the joint's local frame.
    pub axis: [f64; 3],
    pub q_min: f64,
    pub q_max: f64,
    pub v_max: f64,
    pub a_max: f64,
}

impl JointSpec {
    pub fn axis(&self) -> Vector3<f64> {
        Vector3::from(self.axis)
    }

    pub fn clamp(&self, q: f64) -> f64 {
        q.clamp(self.q_min, self.q_max)
    }

    fn validate(&self) -> Result<()> {
        if !self.offset.is_valid() {
            return Err(Error::Invariant("joint offset is not a valid pose".into()));
        }
        if (self.axis().norm() - 1.0).abs() > 1e-9 {
            return Err(Error::Invariant(format!("joint axis {:?} is not a unit vector", self.axis)));
        }
        if !(self.q_min < self.q_max) {
            return Err(Error::Invariant(format!("q_min {} >= q_max {}", self.q_min, self.q_max)));
        }
        if !(self.v_max > 0.0 && self.a_max > 0.0) {
            return Err(Error::Invariant("joint speed and acceleration limits must be positive".into()));
        }
        Ok(())
    }
}

/// Capsule rigidly attached to one of the frames returned by
/// [`RobotModel::link_frames`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkCapsule {
    /// Index into the link frames (`0..=N`, where `N` is the tool frame).
    pub link: usize,
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub radius: f64,
}

impl LinkCapsule {
    fn local(&self) -> Capsule {
        Capsule::new(Vector3::from(self.a), Vector3::from(self.b), self.radius)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotModel {
    #[serde(default)]
    pub name: String,
    pub joints: Vec<JointSpec>,
    pub tool_offset: Pose,
    #[serde(rename = "capsules")]
    pub link_capsules: Vec<LinkCapsule>,
}

/// Joint angles in radians.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration(pub Vec<f64>);

impl Configuration {
    pub fn new(q: Vec<f64>) -> Self {
        Configuration(q)
    }

    pub fn zeros(n: usize) -> Self {
        Configuration(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn distance(&self, other: &Configuration) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    /// Largest per-joint absolute difference.
    pub fn max_abs_diff(&self, other: &Configuration) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn lerp(&self, other: &Configuration, t: f64) -> Configuration {
        Configuration(self.0.iter().zip(&other.0).map(|(a, b)| a + (b - a) * t).collect())
    }
}

impl std::ops::Index<usize> for Configuration {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl RobotModel {
    pub fn from_json(text: &str) -> Result<Self> {
        let robot: RobotModel = serde_json::from_str(text)?;
        robot.validate()?;
        Ok(robot)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// The six-joint arm shipped with the crate.
    pub fn reference_6r() -> Self {
        Self::from_json(REFERENCE_6R).expect("bundled reference robot is valid")
    }

    pub fn validate(&self) -> Result<()> {
        if self.joints.is_empty() {
            return Err(Error::Invariant("robot needs at least one joint".into()));
        }
        for j in &self.joints {
            j.validate()?;
        }
        if !self.tool_offset.is_valid() {
            return Err(Error::Invariant("tool offset is not a valid pose".into()));
        }
        for c in &self.link_capsules {
            if !(c.radius > 0.0) {
                return Err(Error::Invariant("capsule radius must be positive".into()));
            }
            if c.link > self.dof() {
                return Err(Error::Invariant(format!("capsule link {} out of range", c.link)));
            }
        }
        Ok(())
    }

    pub fn dof(&self) -> usize {
        self.joints.len()
    }

    fn check_dim(&self, q: &Configuration) -> Result<()> {
        if q.len() == self.dof() {
            Ok(())
        } else {
            Err(Error::Dimension {
                expected: self.dof(),
                got: q.len(),
            })
        }
    }

    fn joint_local(&self, i: usize, q: f64) -> Pose {
        let j = &self.joints[i];
        j.offset.compose(&Pose::from_rotation(axis_angle_to_rotation(&(j.axis() * q))))
    }

    /// Cumulative frames after each joint, followed by the tool frame, in the
    /// robot base frame.
    pub fn link_frames(&self, q: &Configuration) -> Result<Vec<Pose>> {
        self.check_dim(q)?;
        Ok(self.frames_unchecked(q.as_slice()))
    }

    pub(crate) fn frames_unchecked(&self, q: &[f64]) -> Vec<Pose> {
        let mut frames = Vec::with_capacity(self.dof() + 1);
        let mut current = Pose::identity();
        for (i, &qi) in q.iter().enumerate() {
            current = current.compose(&self.joint_local(i, qi));
            frames.push(current);
        }
        frames.push(current.compose(&self.tool_offset));
        frames
    }

    pub fn forward_kinematics(&self, q: &Configuration) -> Result<Pose> {
        self.check_dim(q)?;
        Ok(self.fk_unchecked(q.as_slice()))
    }

    pub(crate) fn fk_unchecked(&self, q: &[f64]) -> Pose {
        let mut current = Pose::identity();
        for (i, &qi) in q.iter().enumerate() {
            current = current.compose(&self.joint_local(i, qi));
        }
        current.compose(&self.tool_offset)
    }

    /// 6×N geometric Jacobian in the base frame, linear rows first.
    pub fn geometric_jacobian(&self, q: &Configuration) -> Result<Matrix6xX<f64>> {
        self.check_dim(q)?;
        Ok(self.fk_and_jacobian(q.as_slice()).1)
    }

    pub(crate) fn fk_and_jacobian(&self, q: &[f64]) -> (Pose, Matrix6xX<f64>) {
        let n = self.dof();
        let mut axes = Vec::with_capacity(n);
        let mut origins = Vec::with_capacity(n);
        let mut current = Pose::identity();
        for (i, &qi) in q.iter().enumerate() {
            let j = &self.joints[i];
            let pre = current.compose(&j.offset);
            axes.push(pre.rotation.transform_vector(&j.axis()));
            origins.push(pre.translation);
            current = pre.compose(&Pose::from_rotation(axis_angle_to_rotation(&(j.axis() * qi))));
        }
        let ee = current.compose(&self.tool_offset);
        let mut jac = Matrix6xX::zeros(n);
        for i in 0..n {
            let lin = axes[i].cross(&(ee.translation - origins[i]));
            jac.fixed_view_mut::<3, 1>(0, i).copy_from(&lin);
            jac.fixed_view_mut::<3, 1>(3, i).copy_from(&axes[i]);
        }
        (ee, jac)
    }

    /// Sum of joint and tool offset lengths; bounds the distance from the base
    /// origin to any point of the kinematic chain.
    pub fn max_reach(&self) -> f64 {
        self.joints.iter().map(|j| j.offset.translation.norm()).sum::<f64>()
            + self.tool_offset.translation.norm()
    }

    pub fn lower_limits(&self) -> Vec<f64> {
        self.joints.iter().map(|j| j.q_min).collect()
    }

    pub fn upper_limits(&self) -> Vec<f64> {
        self.joints.iter().map(|j| j.q_max).collect()
    }

    pub fn within_limits(&self, q: &Configuration) -> bool {
        q.len() == self.dof()
            && self.joints.iter().zip(q.as_slice()).all(|(j, &v)| v >= j.q_min && v <= j.q_max)
    }

    /// Link capsules of configuration `q` in world coordinates.
    pub fn world_capsules(&self, base: &Pose, q: &[f64]) -> Vec<(usize, Capsule)> {
        let frames = self.frames_unchecked(q);
        self.link_capsules
            .iter()
            .map(|c| (c.link, c.local().transformed(&base.compose(&frames[c.link]))))
            .collect()
    }

    /// Minimum signed clearance over obstacle and non-adjacent self pairs.
    pub fn min_clearance(&self, base: &Pose, q: &Configuration, obstacles: &[Obstacle]) -> Result<f64> {
        self.check_dim(q)?;
        let caps = self.world_capsules(base, q.as_slice());
        let mut best = f64::INFINITY;
        for (_, c) in &caps {
            for o in obstacles {
                best = best.min(capsule_obstacle_distance(c, o));
            }
        }
        for (i, (li, ci)) in caps.iter().enumerate() {
            for (lj, cj) in &caps[i + 1..] {
                if li.abs_diff(*lj) > 1 {
                    best = best.min(capsule_capsule_distance(ci, cj));
                }
            }
        }
        Ok(best)
    }

    /// True iff every capsule clears every obstacle and every non-adjacent
    /// capsule pair clears each other.
    pub fn collision_free(&self, base: &Pose, q: &Configuration, obstacles: &[Obstacle]) -> bool {
        q.len() == self.dof() && self.collision_free_unchecked(base, q.as_slice(), obstacles)
    }

    pub(crate) fn collision_free_unchecked(&self, base: &Pose, q: &[f64], obstacles: &[Obstacle]) -> bool {
        let caps = self.world_capsules(base, q);
        for (_, c) in &caps {
            for o in obstacles {
                if geometry::capsule_obstacle_lower_bound(c, o) > 0.0 {
                    continue;
                }
                if capsule_obstacle_distance(c, o) <= 0.0 {
                    return false;
                }
            }
        }
        for (i, (li, ci)) in caps.iter().enumerate() {
            for (lj, cj) in &caps[i + 1..] {
                if li.abs_diff(*lj) > 1 && capsule_capsule_distance(ci, cj) <= 0.0 {
                    return false;
                }
            }
        }
        true
    }

    /// Checks the straight joint-space segment `from`-`to` at the given
    /// resolution (maximum per-joint step between checked configurations).
    pub fn segment_collision_free(
        &self,
        base: &Pose,
        from: &Configuration,
        to: &Configuration,
        obstacles: &[Obstacle],
        resolution: f64,
    ) -> bool {
        let steps = (from.max_abs_diff(to) / resolution).ceil().max(1.0) as usize;
        (0..=steps).all(|k| {
            let q = from.lerp(to, k as f64 / steps as f64);
            self.collision_free_unchecked(base, q.as_slice(), obstacles)
        })
    }
}

/// Planar arm with unit links along x and all axes along z. Handy for tests and
/// examples.
pub fn planar_arm(links: usize) -> RobotModel {
    let joint = |offset: f64| JointSpec {
        offset: Pose::from_translation(offset, 0.0, 0.0),
        axis: [0.0, 0.0, 1.0],
        q_min: -std::f64::consts::PI,
        q_max: std::f64::consts::PI,
        v_max: 1.0,
        a_max: 1.0,
    };
    RobotModel {
        name: format!("planar-{links}r"),
        joints: (0..links).map(|i| joint(if i == 0 { 0.0 } else { 1.0 })).collect(),
        tool_offset: Pose::from_translation(1.0, 0.0, 0.0),
        link_capsules: (0..links)
            .map(|i| LinkCapsule {
                link: i,
                a: [0.1, 0.0, 0.0],
                b: [0.9, 0.0, 0.0],
                radius: 0.05,
            })
            .collect(),
    }
}
