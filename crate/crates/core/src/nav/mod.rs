//! The hierarchical planning stack: grid global planner, gap detection /
//! simplification / manipulation, waypoint placement, and cost-based
//! waypoint selection.

mod gaps;
mod global;
mod waypoint;

pub use gaps::{detect_gaps, manipulate_gaps, simplify_gaps, Gap, GapKind};
pub use global::{plan_global, GlobalPlan, InflatedGrid};
pub use waypoint::{
    extract_plan_goal, place_waypoints, select_waypoint, CostWeights, GapWaypoint,
};
