//! Discrete information measures. All quantities are in bits.

use crate::error::{Error, Result};

/// Tolerance on total probability mass for caller-supplied distributions.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// `p log2 p` with the convention `0 log 0 = 0`.
#[inline]
pub(crate) fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

fn check_masses<'a>(masses: impl IntoIterator<Item = &'a f64>) -> Result<()> {
    let mut total = 0.0;
    for (i, &p) in masses.into_iter().enumerate() {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::validation(format!(
                "probability mass at index {i} is {p}; masses must be finite and non-negative"
            )));
        }
        total += p;
    }
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::validation(format!(
            "probability masses sum to {total}, expected 1"
        )));
    }
    Ok(())
}

/// Shannon entropy `-Σ p log2 p` of a probability vector.
pub fn entropy(pmf: &[f64]) -> Result<f64> {
    check_masses(pmf)?;
    Ok(entropy_unchecked(pmf))
}

pub(crate) fn entropy_unchecked(pmf: &[f64]) -> f64 {
    // -0.0 for degenerate distributions is folded to 0.0.
    (-pmf.iter().copied().map(plogp).sum::<f64>()).max(0.0)
}

/// Mutual information of a two-dimensional joint table given as rows.
///
/// `I = Σ p(a,b) log2 [p(a,b) / (p(a) p(b))]`, accumulated term by term.
pub fn mutual_information(rows: &[Vec<f64>]) -> Result<f64> {
    let width = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || width == 0 {
        return Err(Error::validation("joint table is empty"));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != width) {
        return Err(Error::validation(format!(
            "joint table row {i} has {} columns, expected {width}",
            rows[i].len()
        )));
    }
    check_masses(rows.iter().flatten())?;
    Ok(mutual_information_unchecked(rows))
}

pub(crate) fn mutual_information_unchecked(rows: &[Vec<f64>]) -> f64 {
    let width = rows.first().map_or(0, Vec::len);
    let row_mass: Vec<f64> = rows.iter().map(|r| r.iter().sum()).collect();
    let mut col_mass = vec![0.0; width];
    for row in rows {
        for (c, &p) in col_mass.iter_mut().zip(row) {
            *c += p;
        }
    }
    let mut total = 0.0;
    for (row, &pa) in rows.iter().zip(&row_mass) {
        for (&pab, &pb) in row.iter().zip(&col_mass) {
            if pab > 0.0 {
                total += pab * (pab / (pa * pb)).log2();
            }
        }
    }
    total.max(0.0)
}
