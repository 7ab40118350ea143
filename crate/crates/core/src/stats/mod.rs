//! Descriptive statistics and one-way between-groups ANOVA.

mod special;

use serde::{Deserialize, Serialize};

pub use special::{f_cdf, f_sf, ln_gamma, regularized_incomplete_beta};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub count: usize,
}

/// Mean, population standard deviation and count, summed in input order.
pub fn describe(values: &[f64]) -> Result<Summary> {
    if values.is_empty() {
        return Err(Error::InsufficientObservations("cannot describe an empty sample".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Ok(Summary { mean, std: var.sqrt(), count: values.len() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaResult {
    /// `+∞` when within-group variation vanishes but between-group does not.
    pub f_statistic: f64,
    pub df_between: usize,
    pub df_within: usize,
    pub p_value: f64,
    pub ss_between: f64,
    pub ss_within: f64,
    pub group_means: Vec<f64>,
    pub group_sizes: Vec<usize>,
    pub grand_mean: f64,
    /// Zero within-group variation; the F ratio is not informative.
    pub degenerate: bool,
}

/// One-way between-groups ANOVA.
///
/// Per-group moments are accumulated with Welford's update, so SSW is the sum
/// of per-group M2 terms and SSB is `Σ n_g (mean_g − grand)²`.
pub fn one_way_anova<G: AsRef<[f64]>>(groups: &[G]) -> Result<AnovaResult> {
    if groups.len() < 2 {
        return Err(Error::InsufficientObservations(format!("ANOVA needs at least 2 groups, got {}", groups.len())));
    }
    let mut means = Vec::with_capacity(groups.len());
    let mut sizes = Vec::with_capacity(groups.len());
    let mut ss_within = 0.0;
    for (i, g) in groups.iter().enumerate() {
        let g = g.as_ref();
        if g.is_empty() {
            return Err(Error::InsufficientObservations(format!("group {i} is empty")));
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("group {i} contains a non-finite value")));
        }
        let (mut mean, mut m2) = (0.0, 0.0);
        for (k, &x) in g.iter().enumerate() {
            let d = x - mean;
            mean += d / (k + 1) as f64;
            m2 += d * (x - mean);
        }
        means.push(mean);
        sizes.push(g.len());
        ss_within += m2;
    }
    let total: usize = sizes.iter().sum();
    let k = groups.len();
    if total <= k {
        return Err(Error::InsufficientObservations(format!(
            "{total} observations in {k} groups leave no within-group degrees of freedom"
        )));
    }
    let grand_mean = means.iter().zip(&sizes).map(|(m, &n)| m * n as f64).sum::<f64>() / total as f64;
    let ss_between: f64 = means.iter().zip(&sizes).map(|(m, &n)| n as f64 * (m - grand_mean).powi(2)).sum();
    let (df_between, df_within) = (k - 1, total - k);

    // Relative thresholds: sums of squares below rounding noise count as zero.
    let scale: f64 = groups.iter().flat_map(|g| g.as_ref().iter()).map(|v| v * v).sum::<f64>().max(f64::MIN_POSITIVE);
    let negligible = |ss: f64| ss <= scale * 1e-24;
    let (f_statistic, p_value, degenerate) = match (negligible(ss_between), negligible(ss_within)) {
        (true, _) => (0.0, 1.0, negligible(ss_within)),
        (false, true) => (f64::INFINITY, 0.0, true),
        (false, false) => {
            let f = (ss_between / df_between as f64) / (ss_within / df_within as f64);
            (f, f_sf(f, df_between as f64, df_within as f64)?, false)
        }
    };
    Ok(AnovaResult {
        f_statistic,
        df_between,
        df_within,
        p_value,
        ss_between,
        ss_within,
        group_means: means,
        group_sizes: sizes,
        grand_mean,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn describe_examples() {
        assert_eq!(describe(&[5.0]).unwrap(), Summary { mean: 5.0, std: 0.0, count: 1 });
        assert_eq!(describe(&[1.0, 3.0]).unwrap(), Summary { mean: 2.0, std: 1.0, count: 2 });
        assert!((describe(&[0.07, 0.07, 0.075, 0.06]).unwrap().mean - 0.06875).abs() < 1e-15);
        assert!(describe(&[]).is_err());
    }

    #[test]
    fn anova_hand_example() {
        let r = one_way_anova(&[vec![1.0, 2.0, 3.0], vec![2.0, 3.0, 4.0], vec![3.0, 4.0, 5.0]]).unwrap();
        assert!((r.f_statistic - 3.0).abs() < 1e-12);
        assert_eq!((r.df_between, r.df_within), (2, 6));
        assert!((r.p_value - 0.125).abs() < 1e-12);
        assert_eq!(r.group_means, vec![2.0, 3.0, 4.0]);
        assert_eq!(r.grand_mean, 3.0);
        assert!(!r.degenerate);
    }

    #[test]
    fn equal_means_give_p_one() {
        let r = one_way_anova(&[vec![1.0, 3.0], vec![2.0, 2.0], vec![0.0, 4.0]]).unwrap();
        assert_eq!(r.f_statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn singleton_groups_error() {
        assert!(matches!(one_way_anova(&[vec![1.0], vec![2.0]]), Err(Error::InsufficientObservations(_))));
        assert!(one_way_anova(&[vec![1.0, 2.0]]).is_err());
        assert!(one_way_anova(&[vec![1.0, 2.0], vec![]]).is_err());
    }

    #[test]
    fn zero_within_variance_is_flagged() {
        let r = one_way_anova(&[vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        assert_eq!(r.p_value, 0.0);
        assert!(r.degenerate && r.f_statistic.is_infinite());
    }
}
