// temporary: trace one failing multi-room episode + ASCII map
use evonav_core::mapgen::{generate_map, longest_path, Convexity, MapParams};
use evonav_core::pedsim::PedParams;
use evonav_core::policy::ScriptedPolicy;
use evonav_core::rng;
use evonav_core::sim::{nudge_to_feasible, run_episode, SeedBundle, SimConfig};
use evonav_core::world::Cell;

fn main() {
    let sim = SimConfig { record_trace: true, ..SimConfig::default() };
    let no_peds = PedParams { count: 0, mean_speed: 1.0, hard_policy_fraction: 0.0, seed: 0 };
    let params = MapParams { room_number: 4, room_size: 0.8, corridor_width: 0.5, convexity: Convexity::K(1), seed: rng::substream(42, "t5", 0), ..MapParams::default() };
    let (grid, graph) = generate_map(&params).unwrap();
    let (start, goal) = longest_path(&grid, &graph).unwrap();
    let start = nudge_to_feasible(&grid, start, sim.r_robot + 0.05);
    let goal = nudge_to_feasible(&grid, goal, sim.r_robot + 0.05);
    let r = run_episode(&grid, &no_peds, &ScriptedPolicy::default(), start, goal, &sim, SeedBundle::default()).unwrap();
    println!("success={} dur={} collisions={}", r.success, r.duration, r.collisions);
    let tr = r.trace.unwrap();
    for (i, s) in tr.iter().enumerate() {
        if i % 10 == 0 {
            println!("t={:4.1} pos=({:5.2},{:5.2}) h={:5.2} perf={:6.3} wp={:?}", s.t, s.x, s.y, s.heading, s.perf, s.waypoint.map(|w| ((w[0]*10.0).round()/10.0, (w[1]*10.0).round()/10.0)));
        }
        if i > 120 { break; }
    }
    // ASCII map with trajectory
    let w = grid.width_cells(); let h = grid.height_cells();
    let mut canvas: Vec<Vec<char>> = (0..h).map(|cy| (0..w).map(|cx| if grid.cell(cx, cy) == Cell::Occupied { '#' } else { '.' }).collect()).collect();
    for s in &tr {
        let (cx, cy) = grid.world_to_cell(evonav_core::Vec2::new(s.x, s.y));
        canvas[cy as usize][cx as usize] = 'o';
    }
    let (scx, scy) = grid.world_to_cell(start.position());
    let (gcx, gcy) = grid.world_to_cell(goal.position());
    canvas[scy as usize][scx as usize] = 'S';
    canvas[gcy as usize][gcx as usize] = 'G';
    // downsample 2x for printing
    for cy in (0..h).step_by(2).rev() {
        let row: String = (0..w).step_by(2).map(|cx| {
            let block = [canvas[cy][cx], canvas[cy][(cx+1).min(w-1)], canvas[(cy+1).min(h-1)][cx]];
            if block.contains(&'S') { 'S' } else if block.contains(&'G') { 'G' } else if block.contains(&'o') { 'o' } else { block[0] }
        }).collect();
        println!("{row}");
    }
}
