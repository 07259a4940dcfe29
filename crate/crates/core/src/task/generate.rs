//! Seeded generators for the simple, hard and edge task families.
//!
//! Geometry constants live in [`SyntheticParams`] and [`EdgeParams`]. They
//! were calibrated against the bundled reference arm so that the nominal
//! base pose solves about half of the simple tasks (see the
//! `calibrate_dummy` example).

use std::f64::consts::PI;

use nalgebra::Vector3;
use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{uniform_rotation_vector, BaseDomain, Family, GoalPose, Task};
use crate::error::{Error, Result};
use crate::robot::{Obstacle, RobotModel};
use crate::se3::{Pose, Rotation};

/// Rejection-sampling attempts before a generator gives up.
pub const MAX_ATTEMPTS: usize = 1000;

/// Geometry of the simple and hard families.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticParams {
    pub n_goals: usize,
    pub n_obstacles: usize,
    pub cube_edge: f64,
    /// Cells per axis (x, y, z) of the obstacle grid.
    pub grid_cells: [usize; 3],
    pub grid_pitch: f64,
    /// Height of the grid's center above the origin.
    pub grid_z_center: f64,
    pub goal_radius: (f64, f64),
    pub goal_height: (f64, f64),
    pub goal_clearance: f64,
    pub fail_cost: f64,
    pub base_half_extents: [f64; 3],
}

impl SyntheticParams {
    pub fn simple() -> Self {
        SyntheticParams {
            n_goals: 3,
            n_obstacles: 3,
            cube_edge: 0.3,
            grid_cells: [5, 5, 2],
            grid_pitch: 0.5,
            grid_z_center: 0.0,
            goal_radius: (0.4, 1.1),
            goal_height: (0.1, 1.0),
            goal_clearance: 0.05,
            fail_cost: 20.0,
            base_half_extents: [1.0, 1.0, 1.0],
        }
    }

    pub fn hard() -> Self {
        SyntheticParams {
            n_goals: 5,
            n_obstacles: 5,
            fail_cost: 50.0,
            ..Self::simple()
        }
    }
}

/// Geometry of the edge family: an elevated base box with goals beneath and
/// beside it, each just in front of an obstacle face.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeParams {
    pub n_goals: usize,
    pub domain_center: [f64; 3],
    pub base_half_extents: [f64; 3],
    /// Horizontal distance of goals from the domain center axis.
    pub goal_radius: (f64, f64),
    /// Depth of goals below the bottom face of the domain.
    pub goal_depth: (f64, f64),
    pub cube_edge: f64,
    /// Gap between a goal and the face of its obstacle.
    pub face_gap: (f64, f64),
    /// Goals must be this much closer to the domain boundary than the reach.
    pub boundary_slack: f64,
    pub min_clearance: f64,
    pub fail_cost: f64,
}

impl Default for EdgeParams {
    fn default() -> Self {
        EdgeParams {
            n_goals: 3,
            domain_center: [0.0, 0.0, 2.2],
            base_half_extents: [0.6, 0.6, 0.6],
            goal_radius: (0.3, 0.9),
            goal_depth: (1.05, 1.45),
            cube_edge: 0.3,
            face_gap: (0.05, 0.15),
            boundary_slack: 0.15,
            min_clearance: 0.05,
            fail_cost: 50.0,
        }
    }
}

fn rng_for(family: Family, seed: u64) -> ChaCha8Rng {
    // Distinct streams per family for the same seed.
    let salt = match family {
        Family::Simple => 0x5157_0001,
        Family::Hard => 0x5157_0002,
        Family::Edge => 0x5157_0003,
    };
    ChaCha8Rng::seed_from_u64(seed ^ (salt << 32))
}

pub fn gen_family(family: Family, seed: u64) -> Result<Task> {
    match family {
        Family::Simple => gen_simple(seed),
        Family::Hard => gen_hard(seed),
        Family::Edge => gen_edge(seed),
    }
}

pub fn gen_simple(seed: u64) -> Result<Task> {
    gen_synthetic(Family::Simple, seed, &SyntheticParams::simple())
}

pub fn gen_hard(seed: u64) -> Result<Task> {
    gen_synthetic(Family::Hard, seed, &SyntheticParams::hard())
}

pub fn gen_edge(seed: u64) -> Result<Task> {
    gen_edge_with(seed, &EdgeParams::default(), &RobotModel::reference_6r())
}

/// Cubes on distinct grid cells and goals in an annulus around the origin.
pub fn gen_synthetic(family: Family, seed: u64, p: &SyntheticParams) -> Result<Task> {
    let mut rng = rng_for(family, seed);
    let [nx, ny, nz] = p.grid_cells;
    let cells = nx * ny * nz;
    if p.n_obstacles > cells {
        return Err(Error::GeneratorExhausted(0));
    }
    let cell_center = |axis_cells: usize, k: usize| (k as f64 - (axis_cells as f64 - 1.0) / 2.0) * p.grid_pitch;
    let obstacles: Vec<Obstacle> = sample_indices(&mut rng, cells, p.n_obstacles)
        .into_iter()
        .map(|c| {
            let (ix, iy, iz) = (c % nx, (c / nx) % ny, c / (nx * ny));
            let center = Vector3::new(
                cell_center(nx, ix),
                cell_center(ny, iy),
                p.grid_z_center + cell_center(nz, iz),
            );
            Obstacle::cube(center, p.cube_edge)
        })
        .collect();

    let mut goals = Vec::with_capacity(p.n_goals);
    let mut attempts = 0;
    while goals.len() < p.n_goals {
        attempts += 1;
        if attempts > MAX_ATTEMPTS {
            return Err(Error::GeneratorExhausted(MAX_ATTEMPTS));
        }
        // Area-uniform in the annulus.
        let (r0, r1) = p.goal_radius;
        let r = (rng.random_range(r0 * r0..=r1 * r1)).sqrt();
        let phi = rng.random_range(0.0..2.0 * PI);
        let z = rng.random_range(p.goal_height.0..=p.goal_height.1);
        let position = Vector3::new(r * phi.cos(), r * phi.sin(), z);
        let rotation = Rotation::from_axis_angle(&uniform_rotation_vector(&mut rng));
        if obstacles.iter().all(|o| o.point_distance(&position) >= p.goal_clearance) {
            goals.push(GoalPose::new(Pose::new(rotation, position)));
        }
    }

    Ok(Task {
        id: format!("{}-{seed}", family.name()),
        tags: vec!["synthetic".into(), family.name().into()],
        fail_cost: p.fail_cost,
        goals,
        obstacles,
        base_domain: BaseDomain::new(Pose::identity(), p.base_half_extents, false),
    })
}

/// Goals sit far below the elevated base box: out of reach from the box
/// center and too deep for an upright arm, yet within reach of some boundary
/// point for an arm mounted tilted or upside down.
pub fn gen_edge_with(seed: u64, p: &EdgeParams, robot: &RobotModel) -> Result<Task> {
    let mut rng = rng_for(Family::Edge, seed);
    let reach = robot.max_reach();
    let center = Vector3::from(p.domain_center);
    let domain = BaseDomain::new(Pose::new(Rotation::identity(), center), p.base_half_extents, false);
    let half_edge = p.cube_edge / 2.0;

    let mut goals: Vec<GoalPose> = Vec::with_capacity(p.n_goals);
    let mut obstacles: Vec<Obstacle> = Vec::with_capacity(p.n_goals);
    let mut attempts = 0;
    while goals.len() < p.n_goals {
        attempts += 1;
        if attempts > MAX_ATTEMPTS {
            return Err(Error::GeneratorExhausted(MAX_ATTEMPTS));
        }
        let rho = rng.random_range(p.goal_radius.0..=p.goal_radius.1);
        let phi = rng.random_range(0.0..2.0 * PI);
        let depth = rng.random_range(p.goal_depth.0..=p.goal_depth.1);
        let position = Vector3::new(
            center.x + rho * phi.cos(),
            center.y + rho * phi.sin(),
            center.z - p.base_half_extents[2] - depth,
        );
        if domain.contains_point(&position)
            || (position - center).norm() <= reach
            || (position - domain.closest_point(&position)).norm() > reach - p.boundary_slack
        {
            continue;
        }

        // Tool z axis points at the obstacle face: straight down onto a block
        // below the goal, or horizontally outward onto a block beside it.
        let outward = Vector3::new(phi.cos(), phi.sin(), 0.0);
        let downward = rng.random_bool(0.5);
        let approach = if downward { -Vector3::z() } else { outward };
        let roll = rng.random_range(-PI..PI);
        let rotation = tool_rotation(&approach) * Rotation::rot_z(roll);
        let gap = rng.random_range(p.face_gap.0..=p.face_gap.1);
        let block_center = position + approach * (gap + half_edge);
        let block_rotation = if downward { Rotation::identity() } else { Rotation::rot_z(phi) };
        let block = Obstacle::Box {
            center: Pose::new(block_rotation, block_center),
            half_extents: [half_edge; 3],
        };

        let clear_of_existing = obstacles.iter().all(|o| o.point_distance(&position) >= p.min_clearance)
            && goals.iter().all(|g| block.point_distance(&g.pose.translation) >= p.min_clearance);
        if !clear_of_existing {
            continue;
        }
        goals.push(GoalPose::new(Pose::new(rotation, position)));
        obstacles.push(block);
    }

    Ok(Task {
        id: format!("edge-{seed}"),
        tags: vec!["synthetic".into(), "edge".into()],
        fail_cost: p.fail_cost,
        goals,
        obstacles,
        base_domain: domain,
    })
}

/// A rotation whose z axis is `approach`.
fn tool_rotation(approach: &Vector3<f64>) -> Rotation {
    let z = approach.normalize();
    let helper = if z.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let x = helper.cross(&z).normalize();
    let y = z.cross(&x);
    Rotation::from_matrix_unchecked(nalgebra::Matrix3::from_columns(&[x, y, z]))
}
