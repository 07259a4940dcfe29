//! Generates each task family and writes it to disk as one JSON file per
//! task, then reloads a file to show the round trip.
//!
//! ```text
//! cargo run --release --example generate_tasks -- [out_dir] [count]
//! ```

use basepose::task::{load_task, Family, TaskSet};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let out = args.next().map(std::path::PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("basepose-tasks"));
    let count: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(5);

    for family in [Family::Simple, Family::Hard, Family::Edge] {
        let set = TaskSet::generate(family, count, 0)?;
        let paths = set.save(&out)?;
        let goals: usize = set.tasks.iter().map(|t| t.goals.len()).sum();
        let obstacles: usize = set.tasks.iter().map(|t| t.obstacles.len()).sum();
        println!(
            "{family}: {} tasks, {goals} goals, {obstacles} obstacles, failure cost {}",
            set.tasks.len(),
            set.tasks[0].fail_cost
        );
        let back = load_task(&paths[0])?;
        assert_eq!(back, set.tasks[0]);
        println!("  {} reloads identically", paths[0].display());
    }
    Ok(())
}
