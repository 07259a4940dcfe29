//! Rest-to-rest trapezoidal timing of piecewise-linear joint paths.

use serde::{Deserialize, Serialize};

use crate::robot::{Configuration, RobotModel};

use super::planner::JointPath;

/// Duration of a rest-to-rest move over distance `length` with speed limit
/// `v` and acceleration limit `a`: trapezoidal when the cruise speed is
/// reached, triangular otherwise.
pub fn trapezoid_duration(length: f64, v: f64, a: f64) -> f64 {
    if length <= 0.0 {
        0.0
    } else if length >= v * v / a {
        length / v + v / a
    } else {
        2.0 * (length / a).sqrt()
    }
}

/// Timing of one straight joint-space segment in the unit path coordinate
/// `s ∈ [0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimedSegment {
    pub from: Configuration,
    pub to: Configuration,
    /// Peak path speed (1/s) and path acceleration (1/s²).
    pub speed: f64,
    pub accel: f64,
    pub duration: f64,
}

impl TimedSegment {
    fn new(robot: &RobotModel, from: &Configuration, to: &Configuration) -> Self {
        let mut v_s = f64::INFINITY;
        let mut a_s = f64::INFINITY;
        for (j, (a, b)) in robot.joints.iter().zip(from.as_slice().iter().zip(to.as_slice())) {
            let d = (b - a).abs();
            if d > 0.0 {
                v_s = v_s.min(j.v_max / d);
                a_s = a_s.min(j.a_max / d);
            }
        }
        let duration = if v_s.is_finite() { trapezoid_duration(1.0, v_s, a_s) } else { 0.0 };
        // Triangular profiles peak below the speed limit.
        let speed = if v_s.is_finite() { v_s.min((a_s).sqrt()) } else { 0.0 };
        TimedSegment {
            from: from.clone(),
            to: to.clone(),
            speed,
            accel: if a_s.is_finite() { a_s } else { 0.0 },
            duration,
        }
    }

    /// Path coordinate, its rate and acceleration at local time `t`.
    fn profile(&self, t: f64) -> (f64, f64, f64) {
        if self.duration <= 0.0 {
            return (1.0, 0.0, 0.0);
        }
        let t = t.clamp(0.0, self.duration);
        let (v, a) = (self.speed, self.accel);
        let t_ramp = v / a;
        if t < t_ramp {
            (0.5 * a * t * t, a * t, a)
        } else if t <= self.duration - t_ramp {
            (0.5 * a * t_ramp * t_ramp + v * (t - t_ramp), v, 0.0)
        } else {
            let r = self.duration - t;
            (1.0 - 0.5 * a * r * r, a * r, -a)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub segments: Vec<TimedSegment>,
    pub total_time: f64,
}

/// Joint position, velocity and acceleration at one instant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub q: Vec<f64>,
    pub qd: Vec<f64>,
    #[serde(skip)]
    pub qdd: Vec<f64>,
}

impl Trajectory {
    /// A motionless trajectory at `q` (single-goal tasks).
    pub fn stationary(q: &Configuration) -> Self {
        Trajectory {
            segments: vec![TimedSegment {
                from: q.clone(),
                to: q.clone(),
                speed: 0.0,
                accel: 0.0,
                duration: 0.0,
            }],
            total_time: 0.0,
        }
    }

    pub fn sample(&self, t: f64) -> TrajectorySample {
        let mut start = 0.0;
        let last = self.segments.len() - 1;
        for (k, seg) in self.segments.iter().enumerate() {
            if t <= start + seg.duration || k == last {
                let (s, sd, sdd) = seg.profile(t - start);
                let delta: Vec<f64> = seg.to.0.iter().zip(&seg.from.0).map(|(b, a)| b - a).collect();
                return TrajectorySample {
                    t,
                    q: seg.from.0.iter().zip(&delta).map(|(a, d)| a + d * s).collect(),
                    qd: delta.iter().map(|d| d * sd).collect(),
                    qdd: delta.iter().map(|d| d * sdd).collect(),
                };
            }
            start += seg.duration;
        }
        unreachable!("trajectory has at least one segment")
    }

    /// Samples at a fixed rate (Hz), always including the final instant.
    pub fn sampled(&self, rate_hz: f64) -> Vec<TrajectorySample> {
        let dt = 1.0 / rate_hz;
        let n = (self.total_time / dt).floor() as usize;
        let mut out: Vec<TrajectorySample> = (0..=n).map(|k| self.sample(k as f64 * dt)).collect();
        if out.last().is_some_and(|s| s.t < self.total_time) {
            out.push(self.sample(self.total_time));
        }
        out
    }

    /// JSON array of `{t, q, qd}` rows for external viewers.
    pub fn export_json(&self, rate_hz: f64) -> serde_json::Result<String> {
        serde_json::to_string(&self.sampled(rate_hz))
    }
}

/// Times each segment of `path` with an independent rest-to-rest profile.
pub fn time_parameterize(robot: &RobotModel, path: &JointPath) -> Trajectory {
    let segments: Vec<TimedSegment> =
        path.waypoints.windows(2).map(|w| TimedSegment::new(robot, &w[0], &w[1])).collect();
    let segments = if segments.is_empty() {
        vec![TimedSegment::new(robot, &path.waypoints[0], &path.waypoints[0])]
    } else {
        segments
    };
    let total_time = segments.iter().map(|s| s.duration).sum();
    Trajectory { segments, total_time }
}
