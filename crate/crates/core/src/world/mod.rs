//! Shared geometric and kinematic domain types plus primitive spatial
//! queries used by every other module.

mod clearance;
mod grid;
mod io;

pub use clearance::{min_clearance, nearest_wall_distance};
pub use grid::{Cell, OccupancyGrid};
pub use io::{load_grid, save_grid, GridSidecar};

use serde::{Deserialize, Serialize};

/// 2D vector / point in world meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        Vec2::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product; positive when `o` is CCW of `self`.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        if n > 0.0 {
            self / n
        } else {
            Vec2::ZERO
        }
    }

    /// Rotate by +90 degrees.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn rotated(self, theta: f64) -> Vec2 {
        let (s, c) = theta.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl std::ops::Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

/// Normalize an angle into (-pi, pi].
pub fn wrap_angle(theta: f64) -> f64 {
    let mut a = theta % std::f64::consts::TAU;
    if a <= -std::f64::consts::PI {
        a += std::f64::consts::TAU;
    } else if a > std::f64::consts::PI {
        a -= std::f64::consts::TAU;
    }
    a
}

/// Robot pose: position in meters, heading in (-pi, pi].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose2D {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose2D {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Pose2D { x, y, heading: wrap_angle(heading) }
    }

    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

/// Full agent state: the observable 5 components other agents can see and
/// the hidden 4 components only the agent itself knows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    // observable
    pub pos: Vec2,
    pub vel: Vec2,
    pub radius: f64,
    // hidden
    pub local_goal: Vec2,
    pub v_pref: f64,
    pub heading: f64,
}

impl AgentState {
    pub fn new(pos: Vec2, radius: f64, v_pref: f64, heading: f64) -> Self {
        AgentState {
            pos,
            vel: Vec2::ZERO,
            radius,
            local_goal: pos,
            v_pref,
            heading: wrap_angle(heading),
        }
    }

    /// The observable 5-vector [px, py, vx, vy, r].
    pub fn observable(&self) -> [f64; 5] {
        [self.pos.x, self.pos.y, self.vel.x, self.vel.y, self.radius]
    }

    /// The hidden 4-vector [goal_x, goal_y, v_pref, heading].
    pub fn hidden(&self) -> [f64; 4] {
        [self.local_goal.x, self.local_goal.y, self.v_pref, self.heading]
    }
}

/// Control command: speed (m/s, >= 0) and an absolute heading (rad).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Command {
    pub speed: f64,
    pub heading: f64,
}

impl Command {
    pub fn new(speed: f64, heading: f64) -> Self {
        Command { speed: speed.max(0.0), heading: wrap_angle(heading) }
    }

    pub const STOP: Command = Command { speed: 0.0, heading: 0.0 };
}

/// A noiseless 360-degree range scan. Bearing `i` points along
/// `frame_pose.heading + 2*pi*i/n`; ranges are clamped to `(0, r_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaserScan {
    pub ranges: Vec<f64>,
    pub r_max: f64,
    pub frame_pose: Pose2D,
}

impl LaserScan {
    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    /// Absolute bearing of ray `i`.
    pub fn bearing(&self, i: usize) -> f64 {
        wrap_angle(self.frame_pose.heading + std::f64::consts::TAU * i as f64 / self.len() as f64)
    }

    /// World-frame endpoint of ray `i`.
    pub fn endpoint(&self, i: usize) -> Vec2 {
        self.frame_pose.position() + Vec2::from_angle(self.bearing(i)) * self.ranges[i]
    }

    /// Fractional ray index whose bearing points from the scan origin
    /// toward `p`, in `[0, n)`.
    pub fn bearing_index_of(&self, p: Vec2) -> f64 {
        let rel = (p - self.frame_pose.position()).angle() - self.frame_pose.heading;
        let n = self.len() as f64;
        let mut idx = rel / std::f64::consts::TAU * n;
        while idx < 0.0 {
            idx += n;
        }
        while idx >= n {
            idx -= n;
        }
        idx
    }
}
