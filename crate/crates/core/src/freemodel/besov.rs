//! Besov-type norms on (0, infinity): the block space B, its dual B*, and the
//! weighted spaces L^{2,s}.

use super::FreeField;
use crate::{Error, Result};

/// Which norm to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BesovKind {
    B,
    BStar,
    L2s(f64),
}

/// Dyadic-exponential block decomposition of (0, infinity): block k covers
/// (exp(e^{k-1}), exp(e^k)] for k >= 1, (1/e, e] for k = 0 and the mirrored
/// intervals below 1 for k <= -1.
fn block_index(y: f64) -> i32 {
    let t = y.ln(); // block 0 is |t| <= 1
    if t.abs() <= 1.0 {
        0
    } else if t > 0.0 {
        t.ln().floor() as i32 + 1
    } else {
        -((-t).ln().floor() as i32 + 1)
    }
}

/// Evaluate the requested norm of a mode bundle from its grid samples.
/// The block sums are truncated to the grid's range; the B* sup runs over the
/// available window ends. Requires the grid to cover at least 3 blocks.
pub fn besov_norm(u: &FreeField, kind: BesovKind) -> Result<f64> {
    let grid = &u.grid;
    let w = grid.measure_weights();
    let prof = u.norm_sq_profile();

    let k_lo = block_index(grid.y[0]);
    let k_hi = block_index(*grid.y.last().unwrap());
    if (k_hi - k_lo + 1) < 3 {
        return Err(Error::InvalidArgument(format!(
            "grid covers blocks {k_lo}..{k_hi}; need at least 3 for a Besov norm"
        )));
    }

    match kind {
        BesovKind::B => {
            let mut blocks: std::collections::BTreeMap<i32, f64> = Default::default();
            for i in 0..grid.len() {
                *blocks.entry(block_index(grid.y[i])).or_default() += w[i] * prof[i];
            }
            Ok(blocks
                .iter()
                .map(|(k, v)| ((k.abs() as f64) / 2.0).exp() * v.sqrt())
                .sum())
        }
        BesovKind::BStar => {
            // sup over R > e of (1/log R) ∫_{1/R}^R, realized on grid radii
            let mut best = 0.0f64;
            for &r in grid.y.iter().filter(|&&y| y > std::f64::consts::E) {
                let mut acc = 0.0;
                for i in 0..grid.len() {
                    if grid.y[i] >= 1.0 / r && grid.y[i] <= r {
                        acc += w[i] * prof[i];
                    }
                }
                best = best.max(acc / r.ln());
            }
            Ok(best.sqrt())
        }
        BesovKind::L2s(s) => {
            let mut acc = 0.0;
            for i in 0..grid.len() {
                let wt = (1.0 + grid.y[i].ln().abs()).powf(2.0 * s);
                acc += w[i] * wt * prof[i];
            }
            Ok(acc.sqrt())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::ops::smooth_bump;
    use super::super::LogGrid;
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn block_boundaries() {
        assert_eq!(block_index(1.0), 0);
        assert_eq!(block_index(std::f64::consts::E), 0);
        assert_eq!(block_index(3.0), 1); // log 3 > 1
        assert_eq!(block_index((std::f64::consts::E.powi(3)).exp()), 4);
        assert_eq!(block_index(0.2), -1);
    }

    #[test]
    fn sqrt_y_profile_has_bstar_norm_sqrt_two() {
        // u = y^{1/2}: (1/log R) ∫_{1/R}^R y dy/y^2 = 2, so the norm -> sqrt(2)
        let grid = LogGrid::new(1e-6, 1e6, 20001).unwrap();
        let mut u = FreeField::new(1.0, grid.clone());
        u.set_mode(
            0,
            grid.y
                .iter()
                .map(|&y| Complex64::new(y.sqrt(), 0.0))
                .collect(),
        )
        .unwrap();
        let v = besov_norm(&u, BesovKind::BStar).unwrap();
        assert!((v - 2.0f64.sqrt()).abs() < 1e-3, "got {v}");
    }

    #[test]
    fn zero_function_has_zero_norms() {
        let grid = LogGrid::new(1e-3, 1e3, 301).unwrap();
        let u = FreeField::new(1.0, grid);
        assert_eq!(besov_norm(&u, BesovKind::B).unwrap(), 0.0);
        assert_eq!(besov_norm(&u, BesovKind::BStar).unwrap(), 0.0);
        assert_eq!(besov_norm(&u, BesovKind::L2s(1.0)).unwrap(), 0.0);
    }

    #[test]
    fn inclusion_chain_on_samples() {
        // || u ||_{L^{2,-s}} <= c || u ||_{B*} for s > 1/2 on bump samples
        let grid = LogGrid::new(1e-5, 1e5, 10001).unwrap();
        let s = 0.8;
        for (c0, w0) in [(1.0, 0.4), (3.0, 1.0), (0.4, 0.1)] {
            let mut u = FreeField::new(1.0, grid.clone());
            u.set_mode(0, smooth_bump(&grid, c0, w0)).unwrap();
            let lminus = besov_norm(&u, BesovKind::L2s(-s)).unwrap();
            let bstar = besov_norm(&u, BesovKind::BStar).unwrap();
            let b = besov_norm(&u, BesovKind::B).unwrap();
            let l2s = besov_norm(&u, BesovKind::L2s(s)).unwrap();
            // L^{2,s} ⊂ B ⊂ ... ⊂ B* ⊂ L^{2,-s}: norms reverse the inclusions
            assert!(lminus <= 3.0 * bstar, "lminus {lminus} vs bstar {bstar}");
            assert!(bstar <= 3.0 * b);
            assert!(b <= 3.0 * l2s);
        }
    }

    #[test]
    fn needs_three_blocks() {
        let grid = LogGrid::new(1.0, 2.0, 64).unwrap();
        let u = FreeField::new(1.0, grid);
        assert!(besov_norm(&u, BesovKind::B).is_err());
    }
}
