//! Task data model, base-domain handling and JSON persistence.

pub mod generate;

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::Vector3;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::robot::Obstacle;
use crate::se3::{pose_from_params, wrap_axis_angle, BaseParams, Pose};

pub use generate::{gen_edge, gen_family, gen_hard, gen_simple, EdgeParams, SyntheticParams};

pub const TASK_SCHEMA_VERSION: u32 = 1;

/// Smallest failure cost a task may declare, in seconds.
pub const MIN_FAIL_COST: f64 = 20.0;

pub const DEFAULT_TOL_POS: f64 = 1e-3;
pub const DEFAULT_TOL_ROT: f64 = 1e-2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoalPose {
    pub pose: Pose,
    pub tol_pos: f64,
    pub tol_rot: f64,
}

impl GoalPose {
    pub fn new(pose: Pose) -> Self {
        GoalPose {
            pose,
            tol_pos: DEFAULT_TOL_POS,
            tol_rot: DEFAULT_TOL_ROT,
        }
    }
}

/// Allowed base poses: a position box around a nominal pose, optionally with
/// free orientation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaseDomain {
    pub center: Pose,
    pub half_extents: [f64; 3],
    pub allow_rotation: bool,
}

impl BaseDomain {
    pub fn new(center: Pose, half_extents: [f64; 3], allow_rotation: bool) -> Self {
        BaseDomain {
            center,
            half_extents,
            allow_rotation,
        }
    }

    pub fn arity(&self) -> usize {
        if self.allow_rotation {
            6
        } else {
            3
        }
    }

    pub fn with_arity(&self, arity: usize) -> Result<BaseDomain> {
        match arity {
            3 | 6 => Ok(BaseDomain {
                allow_rotation: arity == 6,
                ..self.clone()
            }),
            n => Err(Error::Arity(n)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.center.is_valid() {
            return Err(Error::Invariant("base domain center is not a valid pose".into()));
        }
        if !self.half_extents.iter().all(|&h| h > 0.0 && h.is_finite()) {
            return Err(Error::Invariant("base domain half extents must be positive".into()));
        }
        Ok(())
    }

    /// World base pose for parameters expressed relative to the nominal pose.
    pub fn base_pose(&self, b: &BaseParams) -> Pose {
        self.center.compose(&pose_from_params(b))
    }

    /// Parameters of the nominal pose itself.
    pub fn nominal_params(&self) -> BaseParams {
        BaseParams::zeros(self.arity()).expect("arity is 3 or 6")
    }

    /// Per-coordinate parameter bounds; rotation coordinates use `[-π, π]`.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        let mut b: Vec<(f64, f64)> = self.half_extents.iter().map(|&h| (-h, h)).collect();
        if self.allow_rotation {
            b.extend([(-PI, PI); 3]);
        }
        b
    }

    /// Maps parameters into `[0,1]^a` using [`BaseDomain::bounds`].
    pub fn to_unit(&self, b: &BaseParams) -> Vec<f64> {
        b.values()
            .iter()
            .zip(self.bounds())
            .map(|(&x, (lo, hi))| (x - lo) / (hi - lo))
            .collect()
    }

    /// Inverse of [`BaseDomain::to_unit`], followed by [`clamp_params`].
    pub fn from_unit(&self, u: &[f64]) -> Result<BaseParams> {
        if u.len() != self.arity() {
            return Err(Error::Dimension {
                expected: self.arity(),
                got: u.len(),
            });
        }
        let values = u.iter().zip(self.bounds()).map(|(&x, (lo, hi))| lo + (hi - lo) * x).collect();
        clamp_params(&BaseParams::new(values)?, self)
    }

    pub fn contains(&self, b: &BaseParams) -> bool {
        match clamp_params(b, self) {
            Ok(c) => c == *b,
            Err(_) => false,
        }
    }

    /// True if the world point lies inside the position box (ignoring
    /// rotation of the nominal pose's frame).
    pub fn contains_point(&self, p: &Vector3<f64>) -> bool {
        let local = self.center.inverse_transform_point(p);
        (0..3).all(|i| local[i].abs() <= self.half_extents[i])
    }

    /// Closest point of the position box to `p`, in world coordinates.
    pub fn closest_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        let local = self.center.inverse_transform_point(p);
        let clamped = Vector3::from_fn(|i, _| local[i].clamp(-self.half_extents[i], self.half_extents[i]));
        self.center.transform_point(&clamped)
    }
}

/// Uniform sample from the domain: positions uniform in the box, rotations
/// uniform on SO(3) (encoded with `‖v‖ ≤ π`).
pub fn sample_base_params<R: Rng + ?Sized>(d: &BaseDomain, rng: &mut R) -> BaseParams {
    let mut values: Vec<f64> = d.half_extents.iter().map(|&h| rng.random_range(-h..=h)).collect();
    if d.allow_rotation {
        let v = uniform_rotation_vector(rng);
        values.extend([v.x, v.y, v.z]);
    }
    BaseParams::new(values).expect("sampled parameters are finite")
}

/// Uniform random rotation (Shoemake's quaternion method) as an axis-angle
/// vector with `‖v‖ ≤ π`.
pub fn uniform_rotation_vector<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();
    let u3: f64 = rng.random();
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let (s2, c2) = (2.0 * PI * u2).sin_cos();
    let (s3, c3) = (2.0 * PI * u3).sin_cos();
    let (mut x, mut y, mut z, mut w) = (a * s2, a * c2, b * s3, b * c3);
    if w < 0.0 {
        (x, y, z, w) = (-x, -y, -z, -w);
    }
    let xyz = Vector3::new(x, y, z);
    let s = xyz.norm();
    if s < 1e-15 {
        return Vector3::zeros();
    }
    let angle = 2.0 * s.atan2(w);
    xyz / s * angle
}

/// Projects parameters into the domain: positions clamped per axis, the
/// rotation part wrapped to `‖v‖ ≤ π`.
pub fn clamp_params(b: &BaseParams, d: &BaseDomain) -> Result<BaseParams> {
    if b.arity() != d.arity() {
        return Err(Error::Dimension {
            expected: d.arity(),
            got: b.arity(),
        });
    }
    let mut out = b.clone();
    let v = out.values_mut();
    for i in 0..3 {
        v[i] = v[i].clamp(-d.half_extents[i], d.half_extents[i]);
    }
    if d.allow_rotation {
        let r = wrap_axis_angle(&Vector3::new(v[3], v[4], v[5]));
        v[3] = r.x;
        v[4] = r.y;
        v[5] = r.z;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: String,
    #[serde(default)]
    pub tags: Vec<String>,
    /// Cost returned for infeasible base poses, in seconds.
    pub fail_cost: f64,
    pub goals: Vec<GoalPose>,
    pub obstacles: Vec<Obstacle>,
    pub base_domain: BaseDomain,
}

#[derive(Serialize, Deserialize)]
struct TaskFile {
    schema_version: u32,
    #[serde(flatten)]
    task: Task,
}

#[derive(Deserialize)]
struct VersionProbe {
    schema_version: u32,
}

impl Task {
    pub fn validate(&self) -> Result<()> {
        if self.goals.is_empty() {
            return Err(Error::Invariant(format!("task {} has no goals", self.id)));
        }
        for g in &self.goals {
            if !g.pose.is_valid() {
                return Err(Error::Invariant("goal pose is not valid".into()));
            }
            if !(g.tol_pos > 0.0 && g.tol_rot > 0.0) {
                return Err(Error::Invariant("goal tolerances must be positive".into()));
            }
        }
        for o in &self.obstacles {
            o.validate()?;
        }
        self.base_domain.validate()?;
        if !(self.fail_cost >= MIN_FAIL_COST && self.fail_cost.is_finite()) {
            return Err(Error::Invariant(format!(
                "fail_cost {} must be at least {MIN_FAIL_COST} s",
                self.fail_cost
            )));
        }
        Ok(())
    }

    /// Same task with the base domain switched to the given arity.
    pub fn with_arity(&self, arity: usize) -> Result<Task> {
        Ok(Task {
            base_domain: self.base_domain.with_arity(arity)?,
            ..self.clone()
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let file = TaskFile {
            schema_version: TASK_SCHEMA_VERSION,
            task: self.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Task> {
        let probe: VersionProbe = serde_json::from_str(text).map_err(|e| parse_error(text, &e))?;
        if probe.schema_version != TASK_SCHEMA_VERSION {
            return Err(Error::SchemaVersion {
                found: probe.schema_version,
                supported: TASK_SCHEMA_VERSION,
            });
        }
        let file: TaskFile = serde_json::from_str(text).map_err(|e| parse_error(text, &e))?;
        file.task.validate()?;
        Ok(file.task)
    }
}

/// Converts a serde_json line/column position into a byte offset.
pub(crate) fn parse_error(text: &str, e: &serde_json::Error) -> Error {
    let offset = if e.line() == 0 {
        0
    } else {
        let line_start: usize = text.split_inclusive('\n').take(e.line() - 1).map(str::len).sum();
        (line_start + e.column().saturating_sub(1)).min(text.len())
    };
    Error::Parse {
        offset,
        message: e.to_string(),
    }
}

pub fn save_task(task: &Task, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    std::fs::write(path, task.to_json()? + "\n").map_err(|e| Error::io(path, e))
}

pub fn load_task(path: impl AsRef<Path>) -> Result<Task> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Task::from_json(&text)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Simple,
    Hard,
    Edge,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Simple => "simple",
            Family::Hard => "hard",
            Family::Edge => "edge",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(Family::Simple),
            "hard" => Ok(Family::Hard),
            "edge" => Ok(Family::Edge),
            other => Err(Error::Data(format!("unknown task family '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskSet {
    pub family: Family,
    pub seed: u64,
    pub tasks: Vec<Task>,
}

impl TaskSet {
    /// `count` tasks with seeds `seed, seed+1, …`.
    pub fn generate(family: Family, count: usize, seed: u64) -> Result<TaskSet> {
        let tasks = (0..count as u64).map(|k| gen_family(family, seed + k)).collect::<Result<_>>()?;
        Ok(TaskSet { family, seed, tasks })
    }

    /// Writes `dir/<family>/<seed>.json` per task.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<Vec<std::path::PathBuf>> {
        let dir = dir.as_ref().join(self.family.name());
        self.tasks
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let path = dir.join(format!("{}.json", self.seed + k as u64));
                save_task(t, &path)?;
                Ok(path)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::se3::Rotation;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_domain(rot: bool) -> BaseDomain {
        BaseDomain::new(Pose::identity(), [1.0, 1.0, 1.0], rot)
    }

    #[test]
    fn samples_stay_in_box() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = unit_domain(true);
        for _ in 0..2000 {
            let b = sample_base_params(&d, &mut rng);
            let p = d.base_pose(&b).translation;
            assert!(p.iter().all(|x| x.abs() <= 1.0));
            assert!(b.rotation_vector().unwrap().norm() <= PI + 1e-12);
        }
        assert_eq!(sample_base_params(&unit_domain(false), &mut rng).arity(), 3);
    }

    #[test]
    fn sample_mean_near_center() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let d = BaseDomain::new(Pose::from_translation(0.5, -1.0, 2.0), [1.0, 1.0, 1.0], false);
        let n = 10_000;
        let mut sum = Vector3::zeros();
        for _ in 0..n {
            sum += d.base_pose(&sample_base_params(&d, &mut rng)).translation;
        }
        let mean = sum / n as f64;
        assert!((mean - d.center.translation).abs().max() < 0.05);
    }

    #[test]
    fn uniform_rotations_have_uniform_angle_density() {
        // For Haar measure the angle has density (1 - cos θ)/π, mean π/2 + 2/π.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 20_000;
        let mean: f64 = (0..n).map(|_| uniform_rotation_vector(&mut rng).norm()).sum::<f64>() / n as f64;
        assert!((mean - (PI / 2.0 + 2.0 / PI)).abs() < 0.02, "{mean}");
    }

    #[test]
    fn clamp_examples() {
        let d = unit_domain(false);
        let b = BaseParams::new(vec![2.0, 0.0, 0.0]).unwrap();
        assert_eq!(clamp_params(&b, &d).unwrap().values(), &[1.0, 0.0, 0.0]);
        let b = BaseParams::new(vec![0.2, -0.3, 0.9]).unwrap();
        assert_eq!(clamp_params(&b, &d).unwrap(), b);
        let d6 = unit_domain(true);
        let b = BaseParams::new(vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.5 * PI]).unwrap();
        let c = clamp_params(&b, &d6).unwrap();
        assert_abs_diff_eq!(c.values()[5], -PI / 2.0, epsilon = 1e-12);
        assert!(clamp_params(&b, &d).is_err());
    }

    #[test]
    fn unit_mapping_round_trip() {
        let d = BaseDomain::new(Pose::identity(), [1.0, 0.5, 0.25], true);
        let u = [0.25, 0.5, 1.0, 0.5, 0.5, 0.75];
        let b = d.from_unit(&u).unwrap();
        assert_eq!(b.values()[..3], [-0.5, 0.0, 0.25]);
        let back = d.to_unit(&b);
        for (x, y) in back.iter().zip(u) {
            assert_abs_diff_eq!(*x, y, epsilon = 1e-12);
        }
    }

    fn sample_task() -> Task {
        Task {
            id: "t".into(),
            tags: vec!["synthetic".into()],
            fail_cost: 20.0,
            goals: vec![GoalPose::new(Pose::new(Rotation::rot_x(0.3), Vector3::new(0.5, 0.1, 0.4)))],
            obstacles: vec![Obstacle::cube(Vector3::new(1.0, 1.0, 0.25), 0.3), Obstacle::sphere(Vector3::new(0.0, 1.0, 0.0), 0.2)],
            base_domain: unit_domain(false),
        }
    }

    #[test]
    fn json_round_trip() {
        let t = sample_task();
        let text = t.to_json().unwrap();
        assert_eq!(Task::from_json(&text).unwrap(), t);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/t.json");
        save_task(&t, &path).unwrap();
        assert_eq!(load_task(&path).unwrap(), t);
    }

    #[test]
    fn truncated_json_reports_offset() {
        let text = sample_task().to_json().unwrap();
        let cut = &text[..text.len() / 2];
        match Task::from_json(cut) {
            Err(Error::Parse { offset, .. }) => assert!(offset > 0 && offset <= cut.len()),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn schema_and_invariant_errors() {
        let text = sample_task().to_json().unwrap().replace("\"schema_version\": 1", "\"schema_version\": 7");
        assert!(matches!(Task::from_json(&text), Err(Error::SchemaVersion { found: 7, .. })));
        let mut t = sample_task();
        t.goals.clear();
        assert!(matches!(Task::from_json(&t.to_json().unwrap()), Err(Error::Invariant(_))));
        let mut t = sample_task();
        t.fail_cost = 5.0;
        assert!(matches!(Task::from_json(&t.to_json().unwrap()), Err(Error::Invariant(_))));
    }

    proptest! {
        #[test]
        fn samples_are_clamp_fixed_points(seed in any::<u64>(), rot in any::<bool>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d = BaseDomain::new(Pose::identity(), [0.7, 1.0, 0.2], rot);
            let b = sample_base_params(&d, &mut rng);
            prop_assert_eq!(clamp_params(&b, &d).unwrap(), b);
        }
    }
}
