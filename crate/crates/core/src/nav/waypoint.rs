//! Waypoint placement inside manipulated gaps and cost-based selection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nav::gaps::Gap;
use crate::nav::global::GlobalPlan;
use crate::world::{wrap_angle, LaserScan, Pose2D, Vec2};

/// Weights for the waypoint cost function
/// `w_goal * |w - plan_goal| + w_obs * max(0, c_safe - clearance)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostWeights {
    pub w_goal: f64,
    pub w_obs: f64,
    pub c_safe: f64,
    /// chord fraction from the plan-goal-side edge for biased waypoints
    pub beta: f64,
    /// meters a biased waypoint is pushed beyond the chord
    pub push: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        CostWeights { w_goal: 1.0, w_obs: 4.0, c_safe: 0.5, beta: 0.25, push: 0.5 }
    }
}

/// A candidate local waypoint derived from one gap.
#[derive(Debug, Clone, PartialEq)]
pub struct GapWaypoint {
    pub position: Vec2,
    pub source: Gap,
    pub cost: f64,
}

/// The furthest pose of the local plan segment: starting at the pose
/// nearest the ego, walk forward along the plan while the euclidean
/// distance from the ego stays within `horizon`; return the last such pose
/// (the final pose when the whole remaining plan fits). The contiguous walk
/// keeps the result on this side of walls the plan doubles back around.
pub fn extract_plan_goal(plan: &GlobalPlan, ego: Pose2D, horizon: f64) -> Result<Pose2D> {
    if plan.poses.is_empty() {
        return Err(Error::EmptyPlan);
    }
    let ep = ego.position();
    let nearest = plan
        .poses
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            a.position().dist(ep).partial_cmp(&b.position().dist(ep)).unwrap()
        })
        .map(|(i, _)| i)
        .unwrap();
    let mut best = plan.poses[nearest];
    for pose in plan.poses[nearest..].iter() {
        if pose.position().dist(ep) > horizon {
            break;
        }
        best = *pose;
    }
    Ok(best)
}

/// Does the ray from `ego` with bearing toward `target` cross the chord
/// segment beyond `target`'s distance? Returns the crossing distance.
fn ray_chord_crossing(ego: Vec2, bearing: f64, gap: &Gap) -> Option<f64> {
    let d = Vec2::from_angle(bearing);
    let a = gap.right_point;
    let chord = gap.chord();
    // solve ego + t*d = a + s*chord, t >= 0, s in [0, 1]
    let denom = d.cross(chord);
    if denom.abs() < 1e-12 {
        return None;
    }
    let rel = a - ego;
    let t = rel.cross(chord) / denom;
    let s = rel.cross(d) / denom;
    if t >= 0.0 && (-1e-9..=1.0 + 1e-9).contains(&s) {
        Some(t)
    } else {
        None
    }
}

/// Conservative scan range along the bearing of `p`: the smaller of the two
/// neighboring discrete rays.
fn range_toward(scan: &LaserScan, p: Vec2) -> f64 {
    let idx = scan.bearing_index_of(p);
    let lo = idx.floor() as usize % scan.len();
    let hi = (lo + 1) % scan.len();
    scan.ranges[lo].min(scan.ranges[hi])
}

/// Place one waypoint per gap. A gap whose angular sector contains the
/// plan-goal bearing with its chord beyond the plan goal adopts the plan
/// goal exactly; every other gap gets a waypoint on its chord at fraction
/// `beta` from the edge nearer the plan goal, pushed `push` meters past
/// the chord away from the ego. All waypoints are clamped into scanned
/// free space.
pub fn place_waypoints(
    gaps: &[Gap],
    plan_goal: Pose2D,
    ego: Pose2D,
    scan: &LaserScan,
    weights: &CostWeights,
) -> Vec<GapWaypoint> {
    let ep = ego.position();
    let gp = plan_goal.position();
    let goal_bearing = (gp - ep).angle();
    let goal_dist = gp.dist(ep);

    gaps.iter()
        .map(|gap| {
            let position = if gap.full_circle {
                gp
            } else {
                let theta_r = (gap.right_point - ep).angle();
                let theta_l = (gap.left_point - ep).angle();
                let span = positive_angle(theta_l - theta_r);
                let into = positive_angle(goal_bearing - theta_r);
                let contains = into <= span;
                let beyond = ray_chord_crossing(ep, goal_bearing, gap)
                    .map_or(false, |t| t >= goal_dist - 1e-9);
                if contains && beyond {
                    gp
                } else {
                    let d_r = wrap_angle(goal_bearing - theta_r).abs();
                    let d_l = wrap_angle(goal_bearing - theta_l).abs();
                    let (near, far) = if d_r <= d_l {
                        (gap.right_point, gap.left_point)
                    } else {
                        (gap.left_point, gap.right_point)
                    };
                    let on_chord = near + (far - near) * weights.beta;
                    let mut normal = gap.chord().normalized().perp();
                    if normal.dot(gap.midpoint() - ep) < 0.0 {
                        normal = normal * -1.0;
                    }
                    on_chord + normal * weights.push
                }
            };
            GapWaypoint { position: clamp_into_scan(scan, position), source: gap.clone(), cost: 0.0 }
        })
        .collect()
}

fn positive_angle(theta: f64) -> f64 {
    let mut a = theta % std::f64::consts::TAU;
    if a < 0.0 {
        a += std::f64::consts::TAU;
    }
    a
}

/// Pull a point back along its bearing until it sits strictly inside the
/// scanned free region.
fn clamp_into_scan(scan: &LaserScan, p: Vec2) -> Vec2 {
    let ep = scan.frame_pose.position();
    let dist = p.dist(ep);
    if dist < 1e-9 {
        return p;
    }
    let limit = range_toward(scan, p);
    let margin = 0.05_f64.min(limit * 0.5);
    if dist > limit - margin {
        ep + (p - ep) * ((limit - margin) / dist)
    } else {
        p
    }
}

/// Minimum distance from `w` to any finite obstacle return of the scan.
/// Max-range readings are free space, not obstacles.
pub fn scan_clearance(scan: &LaserScan, w: Vec2) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..scan.len() {
        if scan.ranges[i] < scan.r_max {
            best = best.min(scan.endpoint(i).dist(w));
        }
    }
    best
}

/// Pick the cheapest waypoint:
/// `cost = w_goal * |w - plan_goal| + w_obs * max(0, c_safe - clearance)^2`,
/// ties broken by the source gap's bearing index.
pub fn select_waypoint(
    candidates: &[GapWaypoint],
    plan_goal: Pose2D,
    scan: &LaserScan,
    weights: &CostWeights,
) -> Result<GapWaypoint> {
    if candidates.is_empty() {
        return Err(Error::NoCandidates);
    }
    let gp = plan_goal.position();
    let mut best: Option<GapWaypoint> = None;
    for cand in candidates {
        let clearance = scan_clearance(scan, cand.position);
        let short = (weights.c_safe - clearance).max(0.0);
        let cost = weights.w_goal * cand.position.dist(gp) + weights.w_obs * short * short;
        let replace = match &best {
            None => true,
            Some(b) => {
                cost < b.cost
                    || (cost == b.cost && cand.source.right_index < b.source.right_index)
            }
        };
        if replace {
            best = Some(GapWaypoint { cost, ..cand.clone() });
        }
    }
    Ok(best.expect("candidates checked non-empty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nav::gaps::{detect_gaps, manipulate_gaps, simplify_gaps, GapKind};

    fn scan_from(ranges: Vec<f64>, r_max: f64) -> LaserScan {
        LaserScan { ranges, r_max, frame_pose: Pose2D::new(0.0, 0.0, 0.0) }
    }

    fn straight_plan(from: Vec2, to: Vec2, step: f64) -> GlobalPlan {
        let n = (from.dist(to) / step).round() as usize;
        let poses = (0..=n)
            .map(|i| {
                let p = from + (to - from) * (i as f64 / n as f64);
                Pose2D::new(p.x, p.y, (to - from).angle())
            })
            .collect();
        GlobalPlan { poses, straight_steps: n as u32, diagonal_steps: 0, resolution: step }
    }

    #[test]
    fn plan_goal_within_horizon_is_final_pose() {
        let plan = straight_plan(Vec2::ZERO, Vec2::new(3.0, 0.0), 0.1);
        let g = extract_plan_goal(&plan, Pose2D::new(0.0, 0.0, 0.0), 5.0).unwrap();
        assert!(g.position().dist(Vec2::new(3.0, 0.0)) < 1e-9);
    }

    #[test]
    fn plan_goal_walks_the_horizon() {
        let plan = straight_plan(Vec2::ZERO, Vec2::new(10.0, 0.0), 0.1);
        let g = extract_plan_goal(&plan, Pose2D::new(0.0, 0.0, 0.0), 5.0).unwrap();
        assert!((g.position().x - 5.0).abs() < 0.1 + 1e-9, "got {}", g.position().x);
    }

    #[test]
    fn ego_on_goal_returns_goal() {
        let plan = straight_plan(Vec2::ZERO, Vec2::new(10.0, 0.0), 0.1);
        let g = extract_plan_goal(&plan, Pose2D::new(10.0, 0.0, 0.0), 5.0).unwrap();
        assert!(g.position().dist(Vec2::new(10.0, 0.0)) < 1e-9);
    }

    #[test]
    fn empty_plan_errors() {
        let plan = GlobalPlan { poses: vec![], straight_steps: 0, diagonal_steps: 0, resolution: 0.1 };
        assert!(matches!(
            extract_plan_goal(&plan, Pose2D::new(0.0, 0.0, 0.0), 5.0),
            Err(Error::EmptyPlan)
        ));
    }

    #[test]
    fn plan_goal_inside_gap_becomes_the_waypoint() {
        // wide swept gap straight ahead, plan goal 2 m out on bearing 0
        let mut ranges = vec![1.2; 360];
        for r in ranges.iter_mut().take(46) {
            *r = 5.0;
        }
        for r in ranges.iter_mut().skip(315) {
            *r = 5.0;
        }
        let scan = scan_from(ranges, 5.0);
        let gaps = manipulate_gaps(&scan, &simplify_gaps(&scan, &detect_gaps(&scan, 0.2), 0.2), 0.2);
        let plan_goal = Pose2D::new(2.0, 0.0, 0.0);
        let wps = place_waypoints(&gaps, plan_goal, scan.frame_pose, &scan, &CostWeights::default());
        assert!(!wps.is_empty());
        let adopted = wps.iter().find(|w| w.position.dist(plan_goal.position()) < 1e-9);
        assert!(adopted.is_some(), "no gap adopted the plan goal: {wps:?}");
    }

    #[test]
    fn full_circle_gap_points_at_plan_goal_bearing() {
        let scan = scan_from(vec![5.0; 360], 5.0);
        let gaps = detect_gaps(&scan, 0.2);
        let plan_goal = Pose2D::new(0.0, 3.0, 0.0); // north
        let wps = place_waypoints(&gaps, plan_goal, scan.frame_pose, &scan, &CostWeights::default());
        assert_eq!(wps.len(), 1);
        let b = wps[0].position.angle();
        assert!((b - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn biased_waypoint_sits_beta_from_the_near_edge() {
        // gap spanning bearings ~40..50, plan goal far to the left (high bearing)
        let mut ranges = vec![1.2; 360];
        for r in ranges.iter_mut().take(51).skip(40) {
            *r = 5.0;
        }
        let scan = scan_from(ranges, 5.0);
        let raw = detect_gaps(&scan, 0.2);
        let gap = raw.iter().find(|g| g.kind == GapKind::Swept).unwrap().clone();
        let plan_goal = Pose2D::new(-1.0, 3.0, 0.0); // bearing ~108 deg, left of the gap
        let w = CostWeights::default();
        let wps = place_waypoints(
            std::slice::from_ref(&gap),
            plan_goal,
            scan.frame_pose,
            &scan,
            &w,
        );
        // near edge by angle is the gap's left edge: waypoint at
        // left + beta*(right-left) + 0.5 beyond, then clamped into the scan.
        let expect = gap.left_point + (gap.right_point - gap.left_point) * w.beta;
        let d = wps[0].position.dist(expect);
        // the push + clamp moves it along its bearing; just confirm it is
        // much nearer the left edge than the right edge
        assert!(wps[0].position.dist(gap.left_point) < wps[0].position.dist(gap.right_point));
        assert!(d < 1.0);
    }

    #[test]
    fn waypoints_stay_in_scanned_free_space() {
        use rand::Rng;
        let mut rng = crate::rng::stream(41, "wp-freespace", 0);
        for _ in 0..50 {
            let ranges: Vec<f64> = (0..180)
                .map(|_| if rng.gen_bool(0.4) { 5.0 } else { rng.gen_range(0.5..5.0) })
                .collect();
            let scan = scan_from(ranges, 5.0);
            let gaps =
                manipulate_gaps(&scan, &simplify_gaps(&scan, &detect_gaps(&scan, 0.2), 0.2), 0.2);
            let plan_goal = Pose2D::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0), 0.0);
            let wps =
                place_waypoints(&gaps, plan_goal, scan.frame_pose, &scan, &CostWeights::default());
            for w in &wps {
                let dist = w.position.dist(scan.frame_pose.position());
                let limit = super::range_toward(&scan, w.position);
                assert!(dist < limit + 1e-9, "waypoint beyond scan: {dist} vs {limit}");
            }
        }
    }

    #[test]
    fn single_candidate_is_selected() {
        let scan = scan_from(vec![5.0; 360], 5.0);
        let gaps = detect_gaps(&scan, 0.2);
        let wps = place_waypoints(
            &gaps,
            Pose2D::new(2.0, 0.0, 0.0),
            scan.frame_pose,
            &scan,
            &CostWeights::default(),
        );
        let sel = select_waypoint(&wps, Pose2D::new(2.0, 0.0, 0.0), &scan, &CostWeights::default())
            .unwrap();
        assert_eq!(sel.position, wps[0].position);
    }

    #[test]
    fn closer_candidate_wins_at_equal_clearance() {
        let scan = scan_from(vec![5.0; 360], 5.0); // no obstacle returns: clearance inf
        let gap = detect_gaps(&scan, 0.2).pop().unwrap();
        let mk = |p: Vec2| GapWaypoint { position: p, source: gap.clone(), cost: 0.0 };
        let goal = Pose2D::new(3.0, 0.0, 0.0);
        let sel = select_waypoint(
            &[mk(Vec2::new(1.0, 0.0)), mk(Vec2::new(2.0, 0.0))],
            goal,
            &scan,
            &CostWeights::default(),
        )
        .unwrap();
        assert_eq!(sel.position, Vec2::new(2.0, 0.0));
        assert!((sel.cost - 1.0).abs() < 1e-12);
    }

    #[test]
    fn clearance_penalty_can_outweigh_goal_distance() {
        // one obstacle return at (1, 0.1): candidate A hugs it (clearance
        // 0.1), candidate B sits clear (clearance > 0.5) but 0.5 m farther
        // from the goal. Penalty 4*(0.5-0.1)^2 = 0.64 > 0.5.
        let mut ranges = vec![5.0; 360];
        let obstacle = Vec2::new(1.0, 0.1);
        // plant a return near that point: bearing ~5.7 deg, range ~1.005
        let idx = 6usize;
        ranges[idx] = obstacle.dist(Vec2::ZERO);
        let mut scan = scan_from(ranges, 5.0);
        // correct the obstacle position to the actual ray endpoint
        let obstacle = scan.endpoint(idx);
        scan.ranges[idx] = obstacle.dist(Vec2::ZERO);
        let gap = detect_gaps(&scan, 0.2).into_iter().next().unwrap();
        let goal = Pose2D::new(3.0, 0.0, 0.0);
        let near_obstacle = obstacle + Vec2::new(0.0, 0.1); // clearance 0.1
        let clear_but_far = Vec2::new(1.5, 2.0); // clearance > 0.5
        let mk = |p: Vec2| GapWaypoint { position: p, source: gap.clone(), cost: 0.0 };
        let dist_a = near_obstacle.dist(goal.position());
        let dist_b = clear_but_far.dist(goal.position());
        let cost_a = dist_a + 4.0 * (0.5f64 - 0.1).powi(2);
        let cost_b = dist_b;
        let sel = select_waypoint(
            &[mk(near_obstacle), mk(clear_but_far)],
            goal,
            &scan,
            &CostWeights::default(),
        )
        .unwrap();
        if cost_b < cost_a {
            assert_eq!(sel.position, clear_but_far);
        } else {
            assert_eq!(sel.position, near_obstacle);
        }
        assert!((sel.cost - cost_a.min(cost_b)).abs() < 1e-9);
    }

    #[test]
    fn empty_candidates_error() {
        let scan = scan_from(vec![5.0; 360], 5.0);
        assert!(matches!(
            select_waypoint(&[], Pose2D::new(0.0, 0.0, 0.0), &scan, &CostWeights::default()),
            Err(Error::NoCandidates)
        ));
    }
}
