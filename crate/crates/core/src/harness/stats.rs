//! Rank-sum significance test (Mann-Whitney U with midranks, tie correction
//! and continuity correction, normal approximation).

use statrs::distribution::{ContinuousCDF, Normal};

#[derive(Debug, Clone, Copy)]
pub struct RankSumResult {
    /// U statistic of the first sample.
    pub u: f64,
    pub z: f64,
    /// One-sided p-value for "sample a tends smaller than sample b".
    pub p_less: f64,
    pub p_two_sided: f64,
}

/// Mann-Whitney U rank-sum test of two independent samples.
pub fn rank_sum_test(a: &[f64], b: &[f64]) -> RankSumResult {
    assert!(!a.is_empty() && !b.is_empty(), "rank-sum needs non-empty samples");
    let na = a.len() as f64;
    let nb = b.len() as f64;
    let n = na + nb;

    // midranks over the pooled sample
    let mut pooled: Vec<(f64, usize)> = a
        .iter()
        .map(|&v| (v, 0usize))
        .chain(b.iter().map(|&v| (v, 1usize)))
        .collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut ranks = vec![0.0; pooled.len()];
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i;
        while j + 1 < pooled.len() && pooled[j + 1].0 == pooled[i].0 {
            j += 1;
        }
        let rank = (i + 1 + j + 1) as f64 / 2.0;
        for r in ranks.iter_mut().take(j + 1).skip(i) {
            *r = rank;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }

    let ra: f64 = pooled
        .iter()
        .zip(&ranks)
        .filter(|((_, who), _)| *who == 0)
        .map(|(_, &r)| r)
        .sum();
    let u = ra - na * (na + 1.0) / 2.0;

    let mean_u = na * nb / 2.0;
    let var_u = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if var_u <= 0.0 {
        // all values identical: no evidence either way
        return RankSumResult { u, z: 0.0, p_less: 0.5, p_two_sided: 1.0 };
    }
    let sd = var_u.sqrt();
    let normal = Normal::new(0.0, 1.0).unwrap();

    // continuity-corrected z for each tail
    let z_less = (u + 0.5 - mean_u) / sd;
    let p_less = normal.cdf(z_less);
    let z = (u - mean_u) / sd;
    let z_cc = ((u - mean_u).abs() - 0.5).max(0.0) / sd;
    let p_two_sided = (2.0 * (1.0 - normal.cdf(z_cc))).min(1.0);

    RankSumResult { u, z, p_less, p_two_sided }
}
