#![allow(dead_code)]

use ibx::tasks::{Demonstration, PathTask};

/// Every monotone path of `task`, found by exhaustive recursion.
pub fn all_paths(task: &PathTask) -> Vec<Demonstration> {
    fn extend(task: &PathTask, at: (usize, usize), trail: &mut Vec<usize>, out: &mut Vec<Demonstration>) {
        trail.push(task.cell_id(at));
        if at == task.goal {
            out.push(Demonstration { cells: trail.clone() });
        } else {
            let (x, y) = at;
            let (gx, gy) = task.goal;
            if x != gx {
                let nx = if gx > x { x + 1 } else { x - 1 };
                extend(task, (nx, y), trail, out);
            }
            if y != gy {
                let ny = if gy > y { y + 1 } else { y - 1 };
                extend(task, (x, ny), trail, out);
            }
        }
        trail.pop();
    }
    let mut out = Vec::new();
    extend(task, task.start, &mut Vec::new(), &mut out);
    out
}

/// Binomial coefficient.
pub fn choose(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Every set partition of `0..n` as a label vector in restricted-growth form.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn grow(labels: &mut Vec<usize>, n: usize, out: &mut Vec<Vec<usize>>) {
        if labels.len() == n {
            out.push(labels.clone());
            return;
        }
        let next = labels.iter().max().map_or(0, |m| m + 1);
        for l in 0..=next {
            labels.push(l);
            grow(labels, n, out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::new(), n, &mut out);
    out
}

/// Population variance.
pub fn variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n
}
