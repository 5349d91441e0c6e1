//! Gap detection, merging, and manipulation over a laser scan.
//!
//! Two detection conditions:
//!   (a) a maximal angular run of max-range readings whose end-point chord
//!       exceeds the robot diameter — a "swept" gap, squarely visible;
//!   (b) an instantaneous range jump between adjacent bearings exceeding
//!       the robot diameter — a "radial" gap, seen edge-on.

use serde::{Deserialize, Serialize};

use crate::world::{LaserScan, Vec2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapKind {
    Swept,
    Radial,
}

/// An angular free-space region between two scan endpoints. `right_index`
/// is the clockwise-most bearing of the gap, `left_index` the
/// counter-clockwise-most; the gap spans CCW from right to left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub right_index: usize,
    pub left_index: usize,
    pub right_point: Vec2,
    pub left_point: Vec2,
    pub kind: GapKind,
    /// Set when the entire scan is at max range: one gap spanning the
    /// full circle, with no meaningful chord.
    pub full_circle: bool,
}

impl Gap {
    pub fn chord(&self) -> Vec2 {
        self.left_point - self.right_point
    }

    pub fn chord_len(&self) -> f64 {
        self.chord().norm()
    }

    pub fn midpoint(&self) -> Vec2 {
        (self.left_point + self.right_point) * 0.5
    }

    fn sort_key(&self) -> (usize, u8, usize) {
        (self.right_index, if self.kind == GapKind::Swept { 0 } else { 1 }, self.left_index)
    }
}

fn sort_gaps(mut gaps: Vec<Gap>) -> Vec<Gap> {
    gaps.sort_by_key(Gap::sort_key);
    gaps
}

/// Raw gap detection: conditions (a) and (b) over the scan, wraparound
/// included. Output ordered by bearing.
pub fn detect_gaps(scan: &LaserScan, r_robot: f64) -> Vec<Gap> {
    let n = scan.len();
    let mut gaps = Vec::new();
    if n == 0 {
        return gaps;
    }
    let at_max = |i: usize| scan.ranges[i] == scan.r_max;

    if (0..n).all(at_max) {
        gaps.push(Gap {
            right_index: 0,
            left_index: n - 1,
            right_point: scan.endpoint(0),
            left_point: scan.endpoint(n - 1),
            kind: GapKind::Swept,
            full_circle: true,
        });
    } else {
        // maximal circular runs of max-range readings
        let mut i = 0;
        while i < n {
            if !at_max(i) || at_max((i + n - 1) % n) {
                i += 1;
                continue; // not the start of a maximal run
            }
            let mut k = 0;
            while at_max((i + k + 1) % n) {
                k += 1;
            }
            let right = i;
            let left = (i + k) % n;
            let (rp, lp) = (scan.endpoint(right), scan.endpoint(left));
            if rp.dist(lp) > 2.0 * r_robot {
                gaps.push(Gap {
                    right_index: right,
                    left_index: left,
                    right_point: rp,
                    left_point: lp,
                    kind: GapKind::Swept,
                    full_circle: false,
                });
            }
            i += k + 1;
        }
    }

    for i in 0..n {
        let j = (i + 1) % n;
        if (scan.ranges[j] - scan.ranges[i]).abs() > 2.0 * r_robot {
            gaps.push(Gap {
                right_index: i,
                left_index: j,
                right_point: scan.endpoint(i),
                left_point: scan.endpoint(j),
                kind: GapKind::Radial,
                full_circle: false,
            });
        }
    }
    sort_gaps(gaps)
}

/// True when every reading strictly between bearings `from` and `to`
/// (circularly CCW) stays at or above `floor`.
fn intervening_at_least(scan: &LaserScan, from: usize, to: usize, floor: f64) -> bool {
    let n = scan.len();
    let mut m = (from + 1) % n;
    while m != to {
        if scan.ranges[m] < floor {
            return false;
        }
        m = (m + 1) % n;
    }
    true
}

fn try_merge(scan: &LaserScan, a: &Gap, b: &Gap, r_robot: f64) -> Option<Gap> {
    let right = a.right_index;
    let left = b.left_index;
    let rp = scan.endpoint(right);
    let lp = scan.endpoint(left);
    if rp.dist(lp) <= 2.0 * r_robot {
        return None;
    }
    let floor = scan.ranges[right].min(scan.ranges[left]);
    if !intervening_at_least(scan, right, left, floor) {
        return None;
    }
    Some(Gap {
        right_index: right,
        left_index: left,
        right_point: rp,
        left_point: lp,
        kind: GapKind::Swept,
        full_circle: false,
    })
}

/// Merge adjacent radial gap pairs into swept gaps where the region between
/// their outer edges is traversable: outer chord wider than the robot and
/// no intervening reading dipping below the nearer outer edge.
///
/// The gap list is treated as a ring (greedy pairwise, canonical start), so
/// the result is equivariant under scan rotation.
pub fn simplify_gaps(scan: &LaserScan, raw: &[Gap], r_robot: f64) -> Vec<Gap> {
    let m = raw.len();
    if m < 2 {
        return raw.to_vec();
    }
    // canonical start: first entry whose ring predecessor is not radial
    let start = (0..m)
        .find(|&i| raw[(i + m - 1) % m].kind != GapKind::Radial)
        .unwrap_or(0);
    let mut out = Vec::with_capacity(m);
    let mut consumed = 0usize;
    let mut offset = 0usize;
    while consumed < m {
        let i = (start + offset) % m;
        let cur = &raw[i];
        if consumed + 1 < m && cur.kind == GapKind::Radial {
            let j = (i + 1) % m;
            if raw[j].kind == GapKind::Radial {
                if let Some(merged) = try_merge(scan, cur, &raw[j], r_robot) {
                    out.push(merged);
                    consumed += 2;
                    offset += 2;
                    continue;
                }
            }
        }
        out.push(cur.clone());
        consumed += 1;
        offset += 1;
    }
    sort_gaps(out)
}

/// Inflate gap edges toward the interior by the robot radius and pivot
/// radial gaps to face the ego. Gaps whose inflated chord would vanish are
/// dropped; a full-circle gap passes through unchanged.
pub fn manipulate_gaps(scan: &LaserScan, simp: &[Gap], r_robot: f64) -> Vec<Gap> {
    let ego = scan.frame_pose.position();
    let mut out = Vec::with_capacity(simp.len());
    for gap in simp {
        if gap.full_circle {
            out.push(gap.clone());
            continue;
        }
        let mut g = gap.clone();
        if g.kind == GapKind::Radial {
            // pivot the nearer edge about the farther edge until the chord
            // is perpendicular to the ego->far ray (line-of-sight stand-in)
            let (near, far, near_is_right) = {
                let dr = g.right_point.dist(ego);
                let dl = g.left_point.dist(ego);
                if dr <= dl {
                    (g.right_point, g.left_point, true)
                } else {
                    (g.left_point, g.right_point, false)
                }
            };
            let chord_len = near.dist(far);
            let ray = (far - ego).normalized();
            let side = ray.cross(near - far);
            let dir = if side >= 0.0 { ray.perp() } else { ray.perp() * -1.0 };
            let pivoted = far + dir * chord_len;
            if near_is_right {
                g.right_point = pivoted;
            } else {
                g.left_point = pivoted;
            }
        }
        let chord = g.chord_len();
        if chord - 2.0 * r_robot <= 0.0 {
            continue;
        }
        let u = g.chord().normalized();
        g.right_point = g.right_point + u * r_robot;
        g.left_point = g.left_point - u * r_robot;
        out.push(g);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::Pose2D;

    pub(crate) fn scan_from(ranges: Vec<f64>, r_max: f64) -> LaserScan {
        LaserScan { ranges, r_max, frame_pose: Pose2D::new(0.0, 0.0, 0.0) }
    }

    /// Brute-force transcription of conditions (a) and (b): every interval
    /// and every adjacent pair, maximality enforced by containment.
    pub(crate) fn detect_oracle(scan: &LaserScan, r_robot: f64) -> Vec<Gap> {
        let n = scan.len();
        let mut gaps = Vec::new();
        let at_max = |i: usize| scan.ranges[i] == scan.r_max;
        if (0..n).all(at_max) {
            gaps.push(Gap {
                right_index: 0,
                left_index: n - 1,
                right_point: scan.endpoint(0),
                left_point: scan.endpoint(n - 1),
                kind: GapKind::Swept,
                full_circle: true,
            });
        } else {
            for start in 0..n {
                for k in 0..n - 1 {
                    let all = (0..=k).all(|j| at_max((start + j) % n));
                    if !all {
                        continue;
                    }
                    let maximal =
                        !at_max((start + n - 1) % n) && !at_max((start + k + 1) % n);
                    if !maximal {
                        continue;
                    }
                    let (rp, lp) = (scan.endpoint(start), scan.endpoint((start + k) % n));
                    if rp.dist(lp) > 2.0 * r_robot {
                        gaps.push(Gap {
                            right_index: start,
                            left_index: (start + k) % n,
                            right_point: rp,
                            left_point: lp,
                            kind: GapKind::Swept,
                            full_circle: false,
                        });
                    }
                }
            }
        }
        for i in 0..n {
            let j = (i + 1) % n;
            if (scan.ranges[j] - scan.ranges[i]).abs() > 2.0 * r_robot {
                gaps.push(Gap {
                    right_index: i,
                    left_index: j,
                    right_point: scan.endpoint(i),
                    left_point: scan.endpoint(j),
                    kind: GapKind::Radial,
                    full_circle: false,
                });
            }
        }
        super::sort_gaps(gaps)
    }

    #[test]
    fn all_max_range_is_one_full_circle_gap() {
        let scan = scan_from(vec![5.0; 360], 5.0);
        let gaps = detect_gaps(&scan, 0.2);
        assert_eq!(gaps.len(), 1);
        assert!(gaps[0].full_circle);
        assert_eq!(gaps[0].kind, GapKind::Swept);
    }

    #[test]
    fn thirty_degree_window_is_a_swept_gap() {
        // 30 degrees of max range: chord 2*5*sin(15 deg) ~ 2.588 > 0.4
        let mut ranges = vec![1.0; 360];
        for r in ranges.iter_mut().take(120).skip(90) {
            *r = 5.0;
        }
        let scan = scan_from(ranges, 5.0);
        let gaps = detect_gaps(&scan, 0.2);
        let swept: Vec<&Gap> = gaps.iter().filter(|g| g.kind == GapKind::Swept).collect();
        assert_eq!(swept.len(), 1);
        assert_eq!((swept[0].right_index, swept[0].left_index), (90, 119));
        let chord = 2.0 * 5.0 * (15.0f64).to_radians().sin();
        assert!((swept[0].chord_len() - chord).abs() < 0.1);
    }

    #[test]
    fn range_jump_is_a_radial_gap() {
        let mut ranges = vec![1.0; 360];
        ranges[200] = 4.0; // |4-1| = 3 > 0.4 on both sides
        let scan = scan_from(ranges, 5.0);
        let gaps = detect_gaps(&scan, 0.2);
        assert_eq!(gaps.len(), 2);
        assert!(gaps.iter().all(|g| g.kind == GapKind::Radial));
        assert_eq!((gaps[0].right_index, gaps[0].left_index), (199, 200));
        assert_eq!((gaps[1].right_index, gaps[1].left_index), (200, 201));
    }

    #[test]
    fn detection_matches_oracle_on_random_scans() {
        use rand::Rng;
        let mut rng = crate::rng::stream(31, "gap-oracle", 0);
        for case in 0..200 {
            let n = 72;
            let ranges: Vec<f64> = (0..n)
                .map(|_| {
                    if rng.gen_bool(0.35) {
                        5.0
                    } else {
                        rng.gen_range(0.3..5.0)
                    }
                })
                .collect();
            let scan = scan_from(ranges, 5.0);
            let got = detect_gaps(&scan, 0.2);
            let want = detect_oracle(&scan, 0.2);
            assert_eq!(got, want, "case {case}");
        }
    }

    #[test]
    fn rotational_equivariance() {
        use rand::Rng;
        let mut rng = crate::rng::stream(32, "gap-rot", 0);
        let n = 90;
        let ranges: Vec<f64> = (0..n)
            .map(|_| if rng.gen_bool(0.3) { 5.0 } else { rng.gen_range(0.3..5.0) })
            .collect();
        let scan = scan_from(ranges.clone(), 5.0);
        let base = detect_gaps(&scan, 0.2);
        for k in [1usize, 7, 45, 89] {
            let mut rotated = ranges.clone();
            rotated.rotate_right(k);
            let rscan = scan_from(rotated, 5.0);
            let rot = detect_gaps(&rscan, 0.2);
            assert_eq!(rot.len(), base.len(), "rotation {k}");
            let mut keys: Vec<(usize, u8, f64)> = base
                .iter()
                .map(|g| ((g.right_index + k) % n, (g.kind == GapKind::Radial) as u8, g.chord_len()))
                .collect();
            keys.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut got: Vec<(usize, u8, f64)> = rot
                .iter()
                .map(|g| (g.right_index, (g.kind == GapKind::Radial) as u8, g.chord_len()))
                .collect();
            got.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (a, b) in keys.iter().zip(got.iter()) {
                assert_eq!(a.0, b.0);
                assert_eq!(a.1, b.1);
                assert!((a.2 - b.2).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn emitted_gaps_satisfy_chord_condition() {
        use rand::Rng;
        let mut rng = crate::rng::stream(33, "gap-chord", 0);
        for _ in 0..100 {
            let ranges: Vec<f64> = (0..120)
                .map(|_| if rng.gen_bool(0.4) { 5.0 } else { rng.gen_range(0.3..5.0) })
                .collect();
            let scan = scan_from(ranges, 5.0);
            let raw = detect_gaps(&scan, 0.2);
            let manip = manipulate_gaps(&scan, &simplify_gaps(&scan, &raw, 0.2), 0.2);
            for g in raw.iter().filter(|g| !g.full_circle) {
                assert!(g.chord_len() > 0.4);
            }
            for g in manip.iter().filter(|g| !g.full_circle) {
                assert!(g.chord_len() > 0.0);
            }
        }
    }

    #[test]
    fn no_radials_passes_through_unchanged() {
        let mut ranges = vec![1.0; 360];
        for r in ranges.iter_mut().take(180).skip(90) {
            *r = 5.0;
        }
        // smooth the jumps so no radial gap appears with a huge r_robot? no:
        // |5-1| = 4 > 0.4 creates radials. Use a gentle ramp instead.
        for (k, r) in ranges.iter_mut().enumerate().take(90).skip(51) {
            *r = 1.0 + 3.9 * (k - 51) as f64 / 39.0;
        }
        for (k, r) in ranges.iter_mut().enumerate().take(220).skip(180) {
            *r = 4.9 - 3.9 * (k - 180) as f64 / 40.0;
        }
        let scan = scan_from(ranges, 5.0);
        let raw = detect_gaps(&scan, 0.2);
        assert!(raw.iter().all(|g| g.kind == GapKind::Swept));
        let simp = simplify_gaps(&scan, &raw, 0.2);
        assert_eq!(simp, raw);
    }

    #[test]
    fn doorway_jambs_merge_into_a_swept_gap() {
        // near wall, a deep narrow opening, near wall: two radial gaps whose
        // outer edges are the door jambs
        let mut ranges = vec![2.0; 72];
        ranges[30] = 4.5;
        ranges[31] = 4.5;
        let scan = scan_from(ranges, 5.0);
        let raw = detect_gaps(&scan, 0.2);
        assert_eq!(raw.len(), 2);
        assert!(raw.iter().all(|g| g.kind == GapKind::Radial));
        let simp = simplify_gaps(&scan, &raw, 0.2);
        assert_eq!(simp.len(), 1);
        assert_eq!(simp[0].kind, GapKind::Swept);
        assert_eq!((simp[0].right_index, simp[0].left_index), (29, 32));
    }

    #[test]
    fn close_wall_between_radials_blocks_merging() {
        // two deep openings separated by a long stretch of closer wall
        let mut ranges = vec![2.0; 72];
        ranges[10] = 4.5;
        for r in ranges.iter_mut().take(45).skip(25) {
            *r = 1.0; // dips below the outer edges
        }
        ranges[50] = 4.5;
        let scan = scan_from(ranges, 5.0);
        let raw = detect_gaps(&scan, 0.2);
        let simged: Vec<&Gap> = raw
            .iter()
            .filter(|g| g.right_index >= 10 && g.left_index <= 26)
            .collect();
        assert!(!simged.is_empty());
        let simp = simplify_gaps(&scan, &raw, 0.2);
        // the pair around index 10 merges (9..11 is clean); the pair spanning
        // the low wall (11 -> 50 side) must not merge across ranges of 1.0
        for g in &simp {
            if g.kind == GapKind::Swept {
                let floor = scan.ranges[g.right_index].min(scan.ranges[g.left_index]);
                assert!(intervening_at_least(&scan, g.right_index, g.left_index, floor));
            }
        }
    }

    #[test]
    fn inflation_shrinks_chords_by_robot_diameter() {
        // swept gap with chord 1.0 -> 0.6 after 0.2 inflation
        let ego = Vec2::ZERO;
        let gap = Gap {
            right_index: 0,
            left_index: 10,
            right_point: Vec2::new(3.0, -0.5),
            left_point: Vec2::new(3.0, 0.5),
            kind: GapKind::Swept,
            full_circle: false,
        };
        let scan = scan_from(vec![5.0; 360], 5.0);
        assert_eq!(scan.frame_pose.position(), ego);
        let out = manipulate_gaps(&scan, &[gap], 0.2);
        assert_eq!(out.len(), 1);
        assert!((out[0].chord_len() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn sub_diameter_chord_is_discarded() {
        let gap = Gap {
            right_index: 0,
            left_index: 1,
            right_point: Vec2::new(3.0, -0.195),
            left_point: Vec2::new(3.0, 0.195),
            kind: GapKind::Swept,
            full_circle: false,
        };
        let scan = scan_from(vec![5.0; 360], 5.0);
        assert!(manipulate_gaps(&scan, &[gap], 0.2).is_empty());
    }

    #[test]
    fn radial_pivot_faces_the_ego() {
        // near edge at 1 m on bearing 0, far edge at 4 m on bearing ~1 deg
        let mut ranges = vec![1.0; 360];
        ranges[1] = 4.0;
        ranges[2] = 1.0;
        let scan = scan_from(ranges, 5.0);
        let raw = detect_gaps(&scan, 0.2);
        let radial = raw.iter().find(|g| g.kind == GapKind::Radial).unwrap();
        let out = manipulate_gaps(&scan, std::slice::from_ref(radial), 0.2);
        assert_eq!(out.len(), 1);
        let g = &out[0];
        // after pivot + inflation the chord is perpendicular to the ray
        // toward the far point
        let far = scan.endpoint(1);
        let ray = (far - scan.frame_pose.position()).normalized();
        let chord_dir = g.chord().normalized();
        assert!(ray.dot(chord_dir).abs() < 1e-9, "chord not perpendicular");
    }

    #[test]
    fn full_circle_gap_survives_manipulation() {
        let scan = scan_from(vec![5.0; 360], 5.0);
        let raw = detect_gaps(&scan, 0.2);
        let out = manipulate_gaps(&scan, &simplify_gaps(&scan, &raw, 0.2), 0.2);
        assert_eq!(out.len(), 1);
        assert!(out[0].full_circle);
    }
}
