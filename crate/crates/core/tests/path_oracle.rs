mod common;

use common::{all_paths, choose};
use ibx::domains::{build_manhattan_grid, build_random_grid, RewardModel};
use ibx::tasks::{extremal_path, path_value, PathTask, Sense, TIE_TOLERANCE};

const SEEDS: [u64; 3] = [11, 23, 47];

fn all_tasks() -> impl Iterator<Item = PathTask> {
    let cells: Vec<(usize, usize)> = (0..25).map(|i| (i % 5, i / 5)).collect();
    cells
        .clone()
        .into_iter()
        .flat_map(move |s| cells.clone().into_iter().map(move |g| (s, g)))
        .filter(|(s, g)| s != g)
        .map(|(s, g)| PathTask::new(5, 5, s, g).unwrap())
}

fn check_against_enumeration(reward: &RewardModel) {
    for task in all_tasks() {
        let paths = all_paths(&task);
        let steps = task.steps();
        let dx = task.start.0.abs_diff(task.goal.0);
        assert_eq!(paths.len(), choose(steps, dx));
        assert!(paths.len() <= 70);
        let values: Vec<f64> = paths.iter().map(|p| path_value(&task, p, reward).unwrap()).collect();
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        for (sense, want) in [(Sense::Best, max), (Sense::Worst, min)] {
            let demo = extremal_path(&task, reward, sense).unwrap();
            assert_eq!(demo.cells.len(), steps + 1);
            assert_eq!(path_value(&task, &demo, reward).unwrap(), want, "{task:?} {sense:?}");
            // The lexicographically smallest of the co-optimal paths.
            let first = paths
                .iter()
                .zip(&values)
                .filter(|(_, v)| (**v - want).abs() <= TIE_TOLERANCE)
                .map(|(p, _)| &p.cells)
                .min()
                .unwrap();
            assert_eq!(&demo.cells, first, "{task:?} {sense:?}");
        }
    }
}

#[test]
fn dp_matches_enumeration_on_random_tables() {
    for seed in SEEDS {
        check_against_enumeration(build_random_grid(seed).reward());
    }
}

#[test]
fn dp_matches_enumeration_on_manhattan() {
    check_against_enumeration(build_manhattan_grid().reward());
}

#[test]
fn corner_tasks_on_manhattan_are_strict() {
    let reward = build_manhattan_grid().reward().clone();
    for (s, g) in [((0, 0), (4, 4)), ((4, 0), (0, 4)), ((4, 4), (0, 0)), ((0, 4), (4, 0))] {
        let task = PathTask::new(5, 5, s, g).unwrap();
        assert_eq!(all_paths(&task).len(), 70);
        let best = path_value(&task, &extremal_path(&task, &reward, Sense::Best).unwrap(), &reward).unwrap();
        let worst = path_value(&task, &extremal_path(&task, &reward, Sense::Worst).unwrap(), &reward).unwrap();
        assert!(worst < best);
    }
}

#[test]
fn uniform_reward_value_is_length_times_reward() {
    let reward = RewardModel::new(vec![0.25; 25]).unwrap();
    for task in all_tasks() {
        let demo = extremal_path(&task, &reward, Sense::Best).unwrap();
        assert_eq!(path_value(&task, &demo, &reward).unwrap(), (task.steps() + 1) as f64 * 0.25);
    }
}
