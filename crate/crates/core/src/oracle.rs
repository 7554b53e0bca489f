//! Brute-force induction compared with the symbolic construction.

use num_traits::ToPrimitive;

use crate::error::{KeaneError, Result};
use crate::iet::{HalfOpen, InducedMap};
use crate::keane::{KeaneIet, LevelGeometry, ParamSeq};

/// Landing patterns and return times of the first-return map to `I^(k)`,
/// observed by orbit stepping and predicted from the matrices. Columns are
/// indexed by piece name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    pub level: usize,
    pub observed_return_times: [u64; 4],
    pub predicted_return_times: [u64; 4],
    /// Visits to the original intervals `I_i`: compared with `A_1...A_k`.
    pub observed_landing: [[u64; 4]; 4],
    pub predicted_landing: [[u64; 4]; 4],
    /// Visits to the pieces of `I^(k-1)` under the level-`(k-1)` return
    /// map: compared with `A_k`.
    pub observed_relative: [[u64; 4]; 4],
    pub predicted_relative: [[u64; 4]; 4],
}

impl OracleReport {
    pub fn matches(&self) -> bool {
        self.observed_return_times == self.predicted_return_times
            && self.observed_landing == self.predicted_landing
            && self.observed_relative == self.predicted_relative
    }
}

fn small(x: &num_bigint::BigUint) -> Result<u64> {
    x.to_u64().ok_or_else(|| KeaneError::domain("matrix entry exceeds u64"))
}

/// Reorders the columns of an induced map from spatial to named order.
fn named_columns(map: &InducedMap, geom: &LevelGeometry) -> Result<([u64; 4], [[u64; 4]; 4])> {
    if map.pieces.len() != 4 || map.landing_pattern.len() != 4 {
        return Err(KeaneError::domain(format!(
            "first-return map to level {} has {} pieces, expected 4",
            geom.level,
            map.pieces.len()
        )));
    }
    let order = geom.spatial_order();
    let mut times = [0u64; 4];
    let mut landing = [[0u64; 4]; 4];
    for (s, &name) in order.iter().enumerate() {
        times[name - 1] = map.return_times[s];
        for i in 0..4 {
            landing[i][name - 1] = map.landing_pattern[i][s];
        }
    }
    Ok((times, landing))
}

pub fn induction_oracle(seq: &ParamSeq, k: usize, budget: u64) -> Result<OracleReport> {
    if k == 0 || k > seq.depth() {
        return Err(KeaneError::domain(format!("oracle level {k} outside 1..={}", seq.depth())));
    }
    let kiet = KeaneIet::with_uniform_seed(&seq.truncated(k)?)?;
    let geom = kiet.level(k)?;
    let map = kiet.iet.first_return(&geom.interval, budget)?;
    let (observed_return_times, observed_landing) = named_columns(&map, geom)?;

    let product = seq.product(0, k);
    let predicted_landing: [[u64; 4]; 4] = {
        let mut p = [[0u64; 4]; 4];
        for (i, row) in p.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = small(product.entry(i, j))?;
            }
        }
        p
    };
    let sums = product.col_sums();
    let predicted_return_times = [small(&sums[0])?, small(&sums[1])?, small(&sums[2])?, small(&sums[3])?];

    // The level-(k-1) return map, rescaled to [0,1), induced once more on
    // the rescaled copy of I^(k).
    let parent = kiet.level(k - 1)?;
    let outer = kiet.iet.first_return(&parent.interval, budget)?;
    let scale = parent.interval.len();
    let rel = |x: &crate::num::Rational| (x - &parent.interval.left) / &scale;
    let inner_sub = HalfOpen::new(rel(&geom.interval.left), rel(&geom.interval.right))?;
    let inner = outer.induced.first_return(&inner_sub, budget)?;
    let (_, spatial_rows) = named_columns(&inner, geom)?;
    // Rows of `inner` follow the spatial order of the level-(k-1) pieces.
    let mut observed_relative = [[0u64; 4]; 4];
    for (s, &name) in parent.spatial_order().iter().enumerate() {
        observed_relative[name - 1] = spatial_rows[s];
    }
    let a = seq.matrix(k);
    let mut predicted_relative = [[0u64; 4]; 4];
    for (i, row) in predicted_relative.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            *e = small(a.entry(i, j))?;
        }
    }
    Ok(OracleReport {
        level: k,
        observed_return_times,
        predicted_return_times,
        observed_landing,
        predicted_landing,
        observed_relative,
        predicted_relative,
    })
}
