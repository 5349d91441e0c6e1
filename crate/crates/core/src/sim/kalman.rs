//! Constant-velocity Kalman filter for estimating other agents' velocities
//! from position observations. The x and y axes decouple (diagonal noise,
//! position-only measurement), so this runs one 2-state filter per axis.

use serde::{Deserialize, Serialize};

use crate::world::Vec2;

/// Default white-acceleration process noise, (m/s^2)^2.
pub const DEFAULT_PROCESS_NOISE: f64 = 1e-3;
/// Default position measurement noise, m^2. Scans are noiseless; this floor
/// keeps the filter well conditioned.
pub const DEFAULT_MEASUREMENT_NOISE: f64 = 1e-2;
/// Variance of the zero velocity prior at initialization, (m/s)^2.
pub const INITIAL_VELOCITY_VAR: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Axis {
    pos: f64,
    vel: f64,
    // covariance [[p_pp, p_pv], [p_pv, p_vv]]
    p_pp: f64,
    p_pv: f64,
    p_vv: f64,
}

/// Per-agent filtered velocity with its covariance, carrying the full
/// filter state so updates are a pure prior -> posterior map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityEstimate {
    x: Option<Axis>,
    y: Option<Axis>,
    q: f64,
    r: f64,
}

impl VelocityEstimate {
    /// Diffuse prior: the first observation initializes the state.
    pub fn diffuse(q: f64, r: f64) -> Self {
        VelocityEstimate { x: None, y: None, q, r }
    }

    pub fn with_defaults() -> Self {
        Self::diffuse(DEFAULT_PROCESS_NOISE, DEFAULT_MEASUREMENT_NOISE)
    }

    pub fn velocity(&self) -> Vec2 {
        Vec2::new(
            self.x.map_or(0.0, |a| a.vel),
            self.y.map_or(0.0, |a| a.vel),
        )
    }

    /// Velocity covariance; the axes are independent so it is diagonal.
    pub fn covariance(&self) -> [[f64; 2]; 2] {
        [
            [self.x.map_or(INITIAL_VELOCITY_VAR, |a| a.p_vv), 0.0],
            [0.0, self.y.map_or(INITIAL_VELOCITY_VAR, |a| a.p_vv)],
        ]
    }
}

fn axis_step(prior: Option<Axis>, z: f64, dt: f64, q: f64, r: f64) -> Axis {
    match prior {
        None => Axis { pos: z, vel: 0.0, p_pp: r, p_pv: 0.0, p_vv: INITIAL_VELOCITY_VAR },
        Some(a) => {
            // predict
            let pos = a.pos + a.vel * dt;
            let vel = a.vel;
            let p_pp = a.p_pp + 2.0 * dt * a.p_pv + dt * dt * a.p_vv + q * dt.powi(3) / 3.0;
            let p_pv = a.p_pv + dt * a.p_vv + q * dt * dt / 2.0;
            let p_vv = a.p_vv + q * dt;
            // update with position measurement
            let innovation = z - pos;
            let s = p_pp + r;
            let k_p = p_pp / s;
            let k_v = p_pv / s;
            let pos = pos + k_p * innovation;
            let vel = vel + k_v * innovation;
            let n_pp = (1.0 - k_p) * p_pp;
            let n_pv = (1.0 - k_p) * p_pv;
            let n_vv = p_vv - k_v * p_pv;
            Axis { pos, vel, p_pp: n_pp, p_pv: n_pv, p_vv: n_vv }
        }
    }
}

/// One predict-update cycle: prior estimate plus an observed position gives
/// the posterior estimate. Pure function.
pub fn kalman_estimate(prior: &VelocityEstimate, observed: Vec2, dt: f64) -> VelocityEstimate {
    VelocityEstimate {
        x: Some(axis_step(prior.x, observed.x, dt, prior.q, prior.r)),
        y: Some(axis_step(prior.y, observed.y, dt, prior.q, prior.r)),
        q: prior.q,
        r: prior.r,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_target_converges_to_zero_velocity() {
        let mut est = VelocityEstimate::with_defaults();
        let p = Vec2::new(3.0, -2.0);
        for _ in 0..100 {
            est = kalman_estimate(&est, p, 0.1);
        }
        assert!(est.velocity().norm() < 1e-9);
    }

    #[test]
    fn constant_velocity_recovered_within_20_updates() {
        let mut est = VelocityEstimate::with_defaults();
        let v = Vec2::new(1.0, 0.0);
        for k in 0..=20 {
            est = kalman_estimate(&est, v * (0.1 * k as f64), 0.1);
        }
        assert!((est.velocity() - v).norm() < 1e-3, "err {}", (est.velocity() - v).norm());
    }

    #[test]
    fn velocity_error_non_increasing_after_first_update() {
        for v in [Vec2::new(1.0, 0.0), Vec2::new(-0.7, 1.3), Vec2::new(0.0, 2.0)] {
            let mut est = VelocityEstimate::with_defaults();
            est = kalman_estimate(&est, Vec2::ZERO, 0.1); // initialization
            let mut prev = f64::INFINITY;
            for k in 1..=30 {
                est = kalman_estimate(&est, v * (0.1 * k as f64), 0.1);
                let err = (est.velocity() - v).norm();
                assert!(err <= prev + 1e-15, "error rose at update {k}: {prev} -> {err}");
                prev = err;
            }
        }
    }

    #[test]
    fn single_update_from_diffuse_prior_follows_the_gain() {
        // Hand-computed offline with q=1e-3, r=1e-2, dt=0.1: a prior of
        // (pos 2, vel 0, P=diag(100,100)) observing z=3 gives gains
        // (0.9999009999013265, 0.09900014817344768).
        let prior = VelocityEstimate {
            x: Some(Axis { pos: 2.0, vel: 0.0, p_pp: 100.0, p_pv: 0.0, p_vv: 100.0 }),
            y: Some(Axis { pos: 0.0, vel: 0.0, p_pp: 100.0, p_pv: 0.0, p_vv: 100.0 }),
            q: 1e-3,
            r: 1e-2,
        };
        let post = kalman_estimate(&prior, Vec2::new(3.0, 0.0), 0.1);
        let ax = post.x.unwrap();
        assert!((ax.pos - 2.9999009999013264).abs() < 1e-12, "pos {}", ax.pos);
        assert!((ax.vel - 0.09900014817344768).abs() < 1e-12, "vel {}", ax.vel);
    }

    #[test]
    fn covariance_stays_symmetric_psd() {
        use rand::Rng;
        let mut rng = crate::rng::stream(55, "kalman-psd", 0);
        let mut est = VelocityEstimate::with_defaults();
        let mut p = Vec2::ZERO;
        for _ in 0..500 {
            p = p + Vec2::new(rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
            est = kalman_estimate(&est, p, 0.1);
            for a in [est.x.unwrap(), est.y.unwrap()] {
                // 2x2 PSD: non-negative diagonal and determinant
                assert!(a.p_pp >= -1e-12 && a.p_vv >= -1e-12);
                assert!(a.p_pp * a.p_vv - a.p_pv * a.p_pv >= -1e-9);
            }
            let cov = est.covariance();
            assert_eq!(cov[0][1], cov[1][0]);
        }
    }
}
