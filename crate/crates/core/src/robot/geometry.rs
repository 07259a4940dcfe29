//! Capsule, box and sphere primitives with signed clearance queries.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::se3::Pose;

/// A segment swept by a ball, in world (or any common) coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Capsule {
    pub a: Vector3<f64>,
    pub b: Vector3<f64>,
    pub radius: f64,
}

impl Capsule {
    pub fn new(a: Vector3<f64>, b: Vector3<f64>, radius: f64) -> Self {
        Capsule { a, b, radius }
    }

    /// A sphere expressed as a degenerate capsule.
    pub fn point(p: Vector3<f64>, radius: f64) -> Self {
        Capsule { a: p, b: p, radius }
    }

    pub fn transformed(&self, pose: &Pose) -> Capsule {
        Capsule {
            a: pose.transform_point(&self.a),
            b: pose.transform_point(&self.b),
            radius: self.radius,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Obstacle {
    Box { center: Pose, half_extents: [f64; 3] },
    Sphere { center: [f64; 3], radius: f64 },
}

impl Obstacle {
    pub fn cube(center: Vector3<f64>, edge: f64) -> Self {
        Obstacle::Box {
            center: Pose::new(Default::default(), center),
            half_extents: [edge / 2.0; 3],
        }
    }

    pub fn sphere(center: Vector3<f64>, radius: f64) -> Self {
        Obstacle::Sphere {
            center: [center.x, center.y, center.z],
            radius,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Obstacle::Box { center, half_extents } => {
                center.is_valid() && half_extents.iter().all(|&h| h > 0.0 && h.is_finite())
            }
            Obstacle::Sphere { center, radius } => {
                center.iter().all(|x| x.is_finite()) && *radius > 0.0 && radius.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Invariant(format!("obstacle has non-positive extent: {self:?}")))
        }
    }

    /// Grows the obstacle by `margin` on every side.
    pub fn inflated(&self, margin: f64) -> Obstacle {
        match self {
            Obstacle::Box { center, half_extents } => Obstacle::Box {
                center: *center,
                half_extents: half_extents.map(|h| h + margin),
            },
            Obstacle::Sphere { center, radius } => Obstacle::Sphere {
                center: *center,
                radius: radius + margin,
            },
        }
    }

    /// Radius of a ball around [`Obstacle::center_point`] containing the
    /// obstacle.
    pub fn bounding_radius(&self) -> f64 {
        match self {
            Obstacle::Box { half_extents, .. } => Vector3::from(*half_extents).norm(),
            Obstacle::Sphere { radius, .. } => *radius,
        }
    }

    pub fn center_point(&self) -> Vector3<f64> {
        match self {
            Obstacle::Box { center, .. } => center.translation,
            Obstacle::Sphere { center, .. } => Vector3::from(*center),
        }
    }

    /// Signed distance from a point to the obstacle surface.
    pub fn point_distance(&self, p: &Vector3<f64>) -> f64 {
        match self {
            Obstacle::Box { center, half_extents } => {
                box_sdf(&center.inverse_transform_point(p), half_extents)
            }
            Obstacle::Sphere { center, radius } => (p - Vector3::from(*center)).norm() - radius,
        }
    }
}

/// Signed distance from a point (box frame) to an origin-centered box.
pub fn box_sdf(p: &Vector3<f64>, half: &[f64; 3]) -> f64 {
    let q = Vector3::new(p.x.abs() - half[0], p.y.abs() - half[1], p.z.abs() - half[2]);
    let outside = Vector3::new(q.x.max(0.0), q.y.max(0.0), q.z.max(0.0)).norm();
    let inside = q.x.max(q.y).max(q.z).min(0.0);
    outside + inside
}

/// Closest point parameter on segment `a`-`b` to `p`, in `[0, 1]`.
pub fn closest_param_on_segment(p: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 <= f64::EPSILON {
        return 0.0;
    }
    ((p - a).dot(&ab) / len2).clamp(0.0, 1.0)
}

pub fn point_segment_distance(p: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>) -> f64 {
    let t = closest_param_on_segment(p, a, b);
    (p - (a + (b - a) * t)).norm()
}

/// Minimum distance between segments `p1`-`q1` and `p2`-`q2`.
pub fn segment_segment_distance(
    p1: &Vector3<f64>,
    q1: &Vector3<f64>,
    p2: &Vector3<f64>,
    q2: &Vector3<f64>,
) -> f64 {
    const EPS: f64 = 1e-12;
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);

    let (s, t);
    if a <= EPS && e <= EPS {
        return r.norm();
    }
    if a <= EPS {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= EPS {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > EPS { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    ((p1 + d1 * s) - (p2 + d2 * t)).norm()
}

/// Signed distance between a segment and a box. The box SDF restricted to
/// the segment is convex, so a golden-section search finds its minimum.
fn segment_box_distance(a: &Vector3<f64>, b: &Vector3<f64>, center: &Pose, half: &[f64; 3]) -> f64 {
    let la = center.inverse_transform_point(a);
    let lb = center.inverse_transform_point(b);
    let f = |t: f64| box_sdf(&(la + (lb - la) * t), half);
    if (lb - la).norm_squared() <= f64::EPSILON {
        return f(0.0);
    }
    const INV_PHI: f64 = 0.618_033_988_749_895;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-10 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    f(0.0).min(f(1.0)).min(f((lo + hi) / 2.0))
}

/// Signed clearance between a capsule and an obstacle; negative values mean
/// penetration.
pub fn capsule_obstacle_distance(c: &Capsule, o: &Obstacle) -> f64 {
    match o {
        Obstacle::Box { center, half_extents } => {
            segment_box_distance(&c.a, &c.b, center, half_extents) - c.radius
        }
        Obstacle::Sphere { center, radius } => {
            point_segment_distance(&Vector3::from(*center), &c.a, &c.b) - c.radius - radius
        }
    }
}

pub fn capsule_capsule_distance(c1: &Capsule, c2: &Capsule) -> f64 {
    segment_segment_distance(&c1.a, &c1.b, &c2.a, &c2.b) - c1.radius - c2.radius
}

/// Second operand of [`primitive_distance`].
#[derive(Clone, Debug)]
pub enum Primitive {
    Obstacle(Obstacle),
    Capsule(Capsule),
}

pub fn primitive_distance(c: &Capsule, other: &Primitive) -> f64 {
    match other {
        Primitive::Obstacle(o) => capsule_obstacle_distance(c, o),
        Primitive::Capsule(c2) => capsule_capsule_distance(c, c2),
    }
}

/// Cheap lower bound on [`capsule_obstacle_distance`] via bounding spheres.
pub(crate) fn capsule_obstacle_lower_bound(c: &Capsule, o: &Obstacle) -> f64 {
    let mid = (c.a + c.b) * 0.5;
    let half_len = (c.b - c.a).norm() * 0.5;
    (mid - o.center_point()).norm() - half_len - c.radius - o.bounding_radius()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::se3::Rotation;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn sphere_vs_point() {
        let s = Obstacle::sphere(Vector3::zeros(), 1.0);
        let c = Capsule::point(Vector3::new(3.0, 0.0, 0.0), 0.0);
        assert_abs_diff_eq!(primitive_distance(&c, &Primitive::Obstacle(s)), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn unit_box_vs_point() {
        let b = Obstacle::cube(Vector3::zeros(), 1.0);
        let c = Capsule::point(Vector3::new(2.0, 0.0, 0.0), 0.0);
        assert_abs_diff_eq!(capsule_obstacle_distance(&c, &b), 1.5, epsilon = 1e-12);
    }

    #[test]
    fn parallel_segments() {
        let c1 = Capsule::new(Vector3::zeros(), Vector3::new(1.0, 0.0, 0.0), 0.25);
        let c2 = Capsule::new(Vector3::new(0.0, 1.0, 0.0), Vector3::new(1.0, 1.0, 0.0), 0.25);
        assert_abs_diff_eq!(primitive_distance(&c1, &Primitive::Capsule(c2)), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn capsule_through_box_is_negative() {
        let b = Obstacle::cube(Vector3::new(0.5, 0.5, 0.5), 0.3);
        let c = Capsule::new(Vector3::new(0.0, 0.5, 0.5), Vector3::new(1.0, 0.5, 0.5), 0.01);
        assert!(capsule_obstacle_distance(&c, &b) < 0.0);
        // Deepest point is the center: 0.15 m inside, minus the radius.
        assert_abs_diff_eq!(capsule_obstacle_distance(&c, &b), -0.16, epsilon = 1e-8);
    }

    #[test]
    fn rotated_box() {
        let b = Obstacle::Box {
            center: Pose::new(Rotation::rot_z(std::f64::consts::FRAC_PI_4), Vector3::zeros()),
            half_extents: [0.5, 0.5, 0.5],
        };
        // Corner of the rotated box lies on the x axis at √2/2.
        let c = Capsule::point(Vector3::new(1.0, 0.0, 0.0), 0.0);
        assert_abs_diff_eq!(capsule_obstacle_distance(&c, &b), 1.0 - 0.5f64.sqrt(), epsilon = 1e-12);
    }

    fn v3() -> impl Strategy<Value = Vector3<f64>> {
        (-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64).prop_map(|(x, y, z)| Vector3::new(x, y, z))
    }

    proptest! {
        // Dense sampling along the segment bounds the exact minimum from above.
        #[test]
        fn segment_box_matches_sampling(a in v3(), b in v3(), h in (0.1..1.0f64, 0.1..1.0f64, 0.1..1.0f64)) {
            let half = [h.0, h.1, h.2];
            let o = Obstacle::Box { center: Pose::identity(), half_extents: half };
            let c = Capsule::new(a, b, 0.0);
            let exact = capsule_obstacle_distance(&c, &o);
            let sampled = (0..=4000).map(|i| box_sdf(&(a + (b - a) * (i as f64 / 4000.0)), &half)).fold(f64::INFINITY, f64::min);
            prop_assert!(exact <= sampled + 1e-9);
            prop_assert!(sampled - exact < 2e-3 * (b - a).norm() + 1e-9);
            prop_assert!(capsule_obstacle_lower_bound(&c, &o) <= exact + 1e-9);
        }

        #[test]
        fn segment_segment_matches_sampling(a in v3(), b in v3(), c in v3(), d in v3()) {
            let exact = segment_segment_distance(&a, &b, &c, &d);
            let n = 300;
            let mut best = f64::INFINITY;
            for i in 0..=n {
                let p = a + (b - a) * (i as f64 / n as f64);
                best = best.min(point_segment_distance(&p, &c, &d));
            }
            prop_assert!(exact <= best + 1e-9);
            prop_assert!(best - exact < 0.02);
        }
    }
}
