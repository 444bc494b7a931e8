use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::RewardModel;
use crate::error::{Error, Result};

pub const GRID_SIZE: usize = 5;

/// Column and row of the Manhattan reward's peak.
pub const MANHATTAN_PEAK: (usize, usize) = (1, 3);

/// Reward lost per unit of Manhattan distance from the peak.
pub const MANHATTAN_DECREMENT: f64 = 0.33;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Rectangular grid with one reward per cell. Cell `(x, y)` has id `y * width + x`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridWorld {
    width: usize,
    height: usize,
    reward: RewardModel,
}

impl GridWorld {
    pub fn new(width: usize, height: usize, reward: RewardModel) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::validation("grid dimensions must be positive"));
        }
        if reward.len() != width * height {
            return Err(Error::mismatch(format!(
                "{width}x{height} grid needs {} rewards, got {}",
                width * height,
                reward.len()
            )));
        }
        Ok(Self { width, height, reward })
    }

    /// Builds a grid by evaluating `f(x, y)` on every cell.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let values = (0..width * height).map(|id| f(id % width, id / width)).collect();
        Self::new(width, height, RewardModel::new(values).expect("finite rewards")).expect("sizes match")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn reward(&self) -> &RewardModel {
        &self.reward
    }

    pub fn cell_id(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    pub fn coords(&self, cell: usize) -> (usize, usize) {
        (cell % self.width, cell / self.width)
    }

    pub fn reward_at(&self, x: usize, y: usize) -> f64 {
        self.reward.value(self.cell_id(x, y))
    }
}

/// `max(-1, 1 - 0.33 d)` with `d` the Manhattan distance to cell (1, 3).
pub fn build_manhattan_grid() -> GridWorld {
    let (px, py) = MANHATTAN_PEAK;
    GridWorld::from_fn(GRID_SIZE, GRID_SIZE, |x, y| {
        let d = x.abs_diff(px) + y.abs_diff(py);
        (1.0 - MANHATTAN_DECREMENT * d as f64).max(-1.0)
    })
}

/// Independent uniform rewards on `[-1, 1]`, drawn in cell-id order from a
/// ChaCha8 generator seeded with `seed`.
pub fn build_random_grid(seed: u64) -> GridWorld {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GridWorld::from_fn(GRID_SIZE, GRID_SIZE, |_, _| rng.random_range(-1.0..=1.0))
}

pub fn build_coordinate_grid(axis: Axis) -> GridWorld {
    GridWorld::from_fn(GRID_SIZE, GRID_SIZE, |x, y| match axis {
        Axis::X => x as f64,
        Axis::Y => y as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn manhattan_values() {
        let grid = build_manhattan_grid();
        assert_eq!(grid.reward_at(1, 3), 1.0);
        for (x, y) in [(0, 3), (2, 3), (1, 2), (1, 4)] {
            assert_abs_diff_eq!(grid.reward_at(x, y), 0.67, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(grid.reward_at(4, 0), -0.98, epsilon = 1e-12);

        let mut levels = crate::joint::distinct_sorted(grid.reward().values());
        levels.reverse();
        let expected = [1.0, 0.67, 0.34, 0.01, -0.32, -0.65, -0.98];
        assert_eq!(levels.len(), expected.len());
        for (got, want) in levels.iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn equidistant_cells_share_a_value() {
        let grid = build_manhattan_grid();
        for a in 0..25 {
            for b in 0..25 {
                let (ax, ay) = grid.coords(a);
                let (bx, by) = grid.coords(b);
                let da = ax.abs_diff(1) + ay.abs_diff(3);
                let db = bx.abs_diff(1) + by.abs_diff(3);
                assert_eq!(da == db, grid.reward().value(a) == grid.reward().value(b));
            }
        }
    }

    #[test]
    fn random_grid_contract() {
        let a = build_random_grid(0);
        assert_eq!(a, build_random_grid(0));
        assert_ne!(a, build_random_grid(1));
        assert!(a.reward().values().iter().all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn coordinate_grids() {
        let xs = build_coordinate_grid(Axis::X);
        let ys = build_coordinate_grid(Axis::Y);
        for other in 0..5 {
            assert_eq!(xs.reward_at(3, other), 3.0);
            assert_eq!(ys.reward_at(other, 0), 0.0);
        }
        assert_eq!(xs.reward().n_distinct(), 5);
    }

    #[test]
    fn cell_ids_are_row_major_from_bottom() {
        let grid = build_coordinate_grid(Axis::X);
        assert_eq!(grid.cell_id(1, 3), 16);
        assert_eq!(grid.coords(16), (1, 3));
        assert!(GridWorld::new(2, 2, RewardModel::new(vec![0.0; 3]).unwrap()).is_err());
    }
}
