//! Dimension formulas: the `Z_{d,r}` family bound, the cubic lower bound and
//! its maximizing `d`, the Hilbert scheme dimension transfer, `c_α` and the
//! grid maximization of `B(x, y)`.
//!
//! All arithmetic is exact over the rationals.

use num_rational::Ratio;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};

pub type Q = Ratio<i128>;

/// `r (d(d+1)/2 - r) + n^2 - (d^2 + d r)` without the admissibility check.
pub fn zdr_expression(n: i128, d: i128, r: i128) -> i128 {
    r * (d * (d + 1) / 2 - r) + n * n - (d * d + d * r)
}

/// The `Z_{d,r}` bound; requires `n = 1 + d + r` and `r <= d(d+1)/2`.
pub fn zdr_bound(n: u64, d: u64, r: u64) -> Result<i128> {
    if n != 1 + d + r {
        return Err(Error::Precondition(format!(
            "n = {n} must equal 1 + d + r = {}",
            1 + d + r
        )));
    }
    if r > d * (d + 1) / 2 {
        return Err(Error::Precondition(format!(
            "r = {r} exceeds d(d+1)/2 = {}",
            d * (d + 1) / 2
        )));
    }
    Ok(zdr_expression(n as i128, d as i128, r as i128))
}

fn admissible(n: u64, d: u64) -> bool {
    d < n && n - 1 - d <= d * (d + 1) / 2
}

/// The cubic lower bound and the residue class of `n` mod 3 selecting it.
pub fn lower_bound(n: u64) -> Result<(Q, u8)> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let x = Q::from_integer(n as i128);
    let branch = (n % 3) as u8;
    let common = Q::new(2, 27) * x * x * x + Q::new(1, 9) * x * x;
    let value = match branch {
        0 => common + Q::new(5, 3) * x - Q::one(),
        1 => common + Q::new(14, 9) * x - Q::new(20, 27),
        _ => common + Q::new(5, 3) * x - Q::new(37, 27),
    };
    Ok((value, branch))
}

/// Maximum of the `Z_{d,r}` bound over admissible `d` with `r = n - 1 - d`.
pub fn max_zdr(n: u64) -> Result<i128> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    (0..n)
        .filter(|&d| admissible(n, d))
        .map(|d| zdr_bound(n, d, n - 1 - d))
        .try_fold(i128::MIN, |acc, v| v.map(|v| acc.max(v)))
}

/// Least maximizer over `0 <= d <= n - 1` of the bound viewed as a function
/// of `d` (with `r = n - 1 - d`).
///
/// At `n = 2` this is `d = 0`, which is not admissible (`r = 1 > 0`) but ties
/// with the admissible `d = 1`; for every other `n` the least maximizer is
/// admissible and unique.
pub fn optimal_d(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    let value = |d: u64| zdr_expression(n as i128, d as i128, (n - 1 - d) as i128);
    let best = (0..n).map(value).max().expect("n >= 1");
    Ok((0..n)
        .find(|&d| value(d) == best)
        .expect("maximum is attained"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub n: u64,
    /// `(d, r, bound)` for each admissible `d`.
    pub zdr: Vec<(u64, u64, i128)>,
    pub optimal_d: u64,
    pub lower_bound: Q,
    pub branch: u8,
    /// Whether the cubic equals the exhaustive maximum over `d`.
    pub matches_scan: bool,
}

impl BoundReport {
    pub fn etale_floor(&self) -> i128 {
        (self.n as i128).pow(2)
    }

    /// The larger of the two known lower bounds for `dim B_n`.
    pub fn max_of(&self) -> Q {
        self.lower_bound.max(Q::from_integer(self.etale_floor()))
    }
}

pub fn bound_report(n: u64) -> Result<BoundReport> {
    let zdr = (0..n)
        .filter(|&d| admissible(n, d))
        .map(|d| zdr_bound(n, d, n - 1 - d).map(|v| (d, n - 1 - d, v)))
        .collect::<Result<Vec<_>>>()?;
    let (lb, branch) = lower_bound(n)?;
    let scan = max_zdr(n)?;
    Ok(BoundReport {
        n,
        zdr,
        optimal_d: optimal_d(n)?,
        lower_bound: lb,
        branch,
        matches_scan: lb == Q::from_integer(scan),
    })
}

pub fn bound_reports(n_max: u64) -> Result<Vec<BoundReport>> {
    (1..=n_max).into_par_iter().map(bound_report).collect()
}

pub const BOUNDS_CSV_HEADER: &str = "n,branch,lower_bound,optimal_d,etale_floor,max_of";

pub fn bounds_csv(reports: &[BoundReport]) -> String {
    let mut s = String::from(BOUNDS_CSV_HEADER);
    s.push('\n');
    for r in reports {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n,
            r.branch,
            r.lower_bound,
            r.optimal_d,
            r.etale_floor(),
            r.max_of()
        ));
    }
    s
}

/// `dim B - n^2 + n d`, and whether it is the exact Hilbert scheme dimension
/// (`d >= n - 1`) or only an upper bound.
pub fn hilb_dim(n: u64, d: u64, dim_b: u64) -> (i128, bool) {
    let (n, d, b) = (n as i128, d as i128, dim_b as i128);
    (b - n * n + n * d, d >= n - 1)
}

/// `α² (1 - α) / 2`, the lower branch of `c_α`.
pub fn c_alpha_low(alpha: Q) -> Q {
    alpha * alpha * (Q::one() - alpha) / Q::from_integer(2)
}

/// `2/27` for `α >= 2/3`, `α² (1 - α) / 2` on `[0, 2/3]`.
pub fn c_alpha(alpha: Q) -> Result<Q> {
    if alpha < Q::zero() {
        return Err(Error::Precondition("α must be nonnegative".into()));
    }
    if alpha >= Q::new(2, 3) {
        Ok(Q::new(2, 27))
    } else {
        Ok(c_alpha_low(alpha))
    }
}

pub fn b_xy(x: Q, y: Q) -> Q {
    let z = Q::one() - x - y;
    let two = Q::from_integer(2);
    x * x * z / two + y * y * z / two + y * z * z / two
}

/// Grid maximum of `B(x, y)` over `x <= α`, `x + y <= 1`, `0 <= y <= x`,
/// evaluated exactly. The grid has spacing `step` in both coordinates and
/// also contains the line `x = min(α, 1)`. Among exact ties the point with
/// the largest `x`, then the least `y`, is returned.
pub fn maximize_b(alpha: Q, step: Q) -> Result<(Q, Q, Q)> {
    if step <= Q::zero() || alpha < Q::zero() {
        return Err(Error::Precondition(
            "need α >= 0 and a positive step".into(),
        ));
    }
    let x_max = alpha.min(Q::one());
    let mut xs: Vec<Q> = (0..)
        .map(|k| step * Q::from_integer(k))
        .take_while(|&x| x < x_max)
        .collect();
    xs.push(x_max);
    let best_per_x: Vec<(Q, Q, Q)> = xs
        .par_iter()
        .map(|&x| {
            let y_max = x.min(Q::one() - x);
            let mut best = (x, Q::zero(), b_xy(x, Q::zero()));
            let mut y = step;
            while y <= y_max {
                let v = b_xy(x, y);
                if v > best.2 {
                    best = (x, y, v);
                }
                y += step;
            }
            best
        })
        .collect();
    let mut best = best_per_x[0];
    for c in best_per_x {
        if c.2 >= best.2 {
            best = c;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zdr_values() {
        assert_eq!(zdr_bound(8, 4, 3).unwrap(), 3 * (10 - 3) + 64 - 28);
        assert_eq!(zdr_bound(8, 4, 3).unwrap(), 57);
        assert_eq!(zdr_bound(2, 1, 0).unwrap(), 3);
        assert_eq!(zdr_bound(4, 2, 1).unwrap(), 12);
        assert!(zdr_bound(4, 1, 2).is_err());
        assert!(zdr_bound(5, 1, 2).is_err());
    }

    #[test]
    fn lower_bound_values() {
        assert_eq!(lower_bound(8).unwrap(), (Q::from_integer(57), 2));
        assert_eq!(lower_bound(10).unwrap().0, Q::from_integer(100));
        assert_eq!(lower_bound(11).unwrap().0, Q::from_integer(129));
    }

    #[test]
    fn optimal_d_values() {
        assert_eq!(optimal_d(8).unwrap(), 4);
        assert_eq!(optimal_d(3).unwrap(), 1);
        assert_eq!(optimal_d(100).unwrap(), 66);
    }

    #[test]
    fn hilbert_dimensions() {
        assert_eq!(hilb_dim(3, 2, 9), (6, true));
        assert_eq!(hilb_dim(1, 0, 1), (0, true));
        assert_eq!(hilb_dim(2, 1, 4), (2, true));
        assert!(!hilb_dim(5, 2, 25).1);
    }

    #[test]
    fn c_alpha_values() {
        assert_eq!(c_alpha(Q::new(2, 3)).unwrap(), Q::new(2, 27));
        assert_eq!(c_alpha_low(Q::new(2, 3)), Q::new(2, 27));
        assert_eq!(c_alpha(Q::new(1, 2)).unwrap(), Q::new(1, 16));
        assert!(c_alpha(Q::new(-1, 2)).is_err());
    }

    #[test]
    fn grid_maximum_at_point_six() {
        let (x, y, v) = maximize_b(Q::new(3, 5), Q::new(1, 1000)).unwrap();
        assert_eq!((x, y, v), (Q::new(3, 5), Q::zero(), Q::new(9, 125)));
    }

    #[test]
    fn two_maximizers_at_one_half() {
        let half = Q::new(1, 2);
        let quarter = Q::new(1, 4);
        assert_eq!(b_xy(half, Q::zero()), Q::new(1, 16));
        assert_eq!(b_xy(quarter, quarter), Q::new(1, 16));
        let (x, y, v) = maximize_b(half, Q::new(1, 100)).unwrap();
        assert_eq!((x, y, v), (half, Q::zero(), Q::new(1, 16)));
    }
}
