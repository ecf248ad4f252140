//! Numerical rank from singular values.

use nalgebra::DMatrix;

/// Singular values below `relative · σ_max` count as zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankTolerance {
    pub relative: f64,
}

impl Default for RankTolerance {
    fn default() -> Self {
        Self { relative: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub rank: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub threshold: f64,
    /// Decimal orders of magnitude separating the threshold from the nearest
    /// singular value. Small margins mean the rank decision is fragile.
    pub margin: f64,
}

pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn rank_report(m: &DMatrix<f64>, tol: RankTolerance) -> RankReport {
    let sv = singular_values(m);
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return RankReport {
            rank: 0,
            singular_values: sv,
            threshold: 0.0,
            margin: f64::INFINITY,
        };
    }
    let threshold = tol.relative * smax;
    let rank = sv.iter().filter(|&&s| s > threshold).count();
    // floor at machine precision so exact zeros do not give an infinite margin
    let floor = f64::EPSILON * smax;
    let margin = sv
        .iter()
        .map(|&s| (s.max(floor) / threshold).log10().abs())
        .fold(f64::INFINITY, f64::min);
    RankReport {
        rank,
        singular_values: sv,
        threshold,
        margin,
    }
}

pub fn numerical_rank(m: &DMatrix<f64>, tol: RankTolerance) -> usize {
    rank_report(m, tol).rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_full_rank() {
        assert_eq!(numerical_rank(&DMatrix::identity(3, 3), RankTolerance::default()), 3);
    }

    #[test]
    fn outer_product_has_rank_one() {
        let u = nalgebra::DVector::from_vec(vec![1.0, -2.0, 0.5, 3.0]);
        let v = nalgebra::DVector::from_vec(vec![0.3, 1.0, 7.0, -1.0]);
        let m = &u * v.transpose();
        let report = rank_report(&m, RankTolerance::default());
        assert_eq!(report.rank, 1);
        assert!(report.margin > 3.0);
    }

    #[test]
    fn zero_matrix() {
        assert_eq!(numerical_rank(&DMatrix::zeros(2, 2), RankTolerance::default()), 0);
    }

    #[test]
    fn near_threshold_has_small_margin() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2e-9]));
        let report = rank_report(&m, RankTolerance::default());
        assert_eq!(report.rank, 2);
        assert!(report.margin < 0.5);
    }
}
