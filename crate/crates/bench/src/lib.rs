//! Shared fixtures for the benchmarks.

use icdlab::oracle::{random_icd_with, seeded_rng};
use icdlab::{icd::classify_region, ICDParams, RegionKind};

pub fn e1() -> ICDParams {
    ICDParams::new([0.7, 0.1, 0.1, 0.1], std::f64::consts::FRAC_PI_6).expect("valid point")
}

/// Deterministic region-1 points.
pub fn region1_points(n: usize, seed: u64) -> Vec<ICDParams> {
    let mut rng = seeded_rng(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let q = random_icd_with(&mut rng);
        if classify_region(&q).kind == RegionKind::Entangled1 {
            out.push(q);
        }
    }
    out
}
