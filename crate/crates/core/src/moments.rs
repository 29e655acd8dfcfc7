//! Exact closed-form moments.
//!
//! With `c(p) = −p²/3 + p/3 + 1/36`:
//!
//! | | S | B | D |
//! |---|---|---|---|
//! | E inv | n(n−1)/4 | C(n,2)(p+½) + np | C(n,2)(p+½) |
//! | Var inv | n³/36 + n²/24 − 5n/72 | c n³ + (pq/2 + 1/24) n² + (pq/6 − 5/72) n | c n³ + (−pq/2 + 1/24) n² + (pq/6 − 5/72) n |
//! | E des | (n−1)/2 | (n−1)/2 + p | (n−1)/2 + p |
//! | Var des | (n+1)/12 | (n+1)/12 | (n+1)/12 + pq/3 |
//! | Cov | (n−1)/4 | (n−1)/4 + pq | (n−1)/4 + pq |
//! | Var X̂ | (n³−n)/36 | Var X̂_D + n²pq | see [`var_hajek_inv`] |
//! | Cov(X̂, des) | (n−1)/6 | (n−1)/6 + pq | (n−1)/6 + 2pq/3 |
//!
//! Rank-one corrections: `Var des` is 0 on `S_1`, `pq` on `B_1` and
//! `1/4 + pq` on `D_2`. Every entry is checked against the enumeration
//! oracle.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::group::{GroupFamily, GroupSpec, ProductGroupSpec};
use crate::rational::{int, ratio, serde_str, to_f64};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentSet {
    #[serde(with = "serde_str")]
    pub mean_inv: BigRational,
    #[serde(with = "serde_str")]
    pub var_inv: BigRational,
    #[serde(with = "serde_str")]
    pub mean_des: BigRational,
    #[serde(with = "serde_str")]
    pub var_des: BigRational,
    #[serde(with = "serde_str")]
    pub cov_inv_des: BigRational,
    #[serde(with = "serde_str")]
    pub var_hajek_inv: BigRational,
    #[serde(with = "serde_str")]
    pub cov_hajek_des: BigRational,
}

impl MomentSet {
    fn zero() -> Self {
        let z = BigRational::zero();
        MomentSet {
            mean_inv: z.clone(),
            var_inv: z.clone(),
            mean_des: z.clone(),
            var_des: z.clone(),
            cov_inv_des: z.clone(),
            var_hajek_inv: z.clone(),
            cov_hajek_des: z,
        }
    }

    fn add(&mut self, o: &MomentSet) {
        self.mean_inv += &o.mean_inv;
        self.var_inv += &o.var_inv;
        self.mean_des += &o.mean_des;
        self.var_des += &o.var_des;
        self.cov_inv_des += &o.cov_inv_des;
        self.var_hajek_inv += &o.var_hajek_inv;
        self.cov_hajek_des += &o.cov_hajek_des;
    }

    pub fn sd_inv(&self) -> f64 {
        to_f64(&self.var_inv).sqrt()
    }

    pub fn sd_des(&self) -> f64 {
        to_f64(&self.var_des).sqrt()
    }

    /// `Cov / sqrt(Var inv · Var des)`, or 0 when a variance vanishes.
    pub fn correlation(&self) -> f64 {
        let d = self.sd_inv() * self.sd_des();
        if d > 0.0 {
            to_f64(&self.cov_inv_des) / d
        } else {
            0.0
        }
    }
}

fn pq(spec: &GroupSpec) -> BigRational {
    spec.bias() * spec.q()
}

fn n_of(spec: &GroupSpec) -> BigRational {
    int(spec.rank() as i64)
}

pub fn leading_coefficient(p: &BigRational) -> BigRational {
    -(p * p) / int(3) + p / int(3) + ratio(1, 36)
}

pub fn mean_inv(spec: &GroupSpec) -> BigRational {
    let n = n_of(spec);
    let pairs = &n * (&n - int(1)) / int(2);
    let p = spec.bias();
    match spec.family() {
        GroupFamily::S => pairs / int(2),
        GroupFamily::B => pairs * (p + ratio(1, 2)) + &n * p,
        GroupFamily::D => pairs * (p + ratio(1, 2)),
    }
}

pub fn var_inv(spec: &GroupSpec) -> BigRational {
    let n = n_of(spec);
    let c = leading_coefficient(spec.bias());
    let pq = pq(spec);
    let quad = match spec.family() {
        GroupFamily::B => &pq / int(2) + ratio(1, 24),
        _ => -&pq / int(2) + ratio(1, 24),
    };
    let lin = &pq / int(6) - ratio(5, 72);
    c * &n * &n * &n + quad * &n * &n + lin * &n
}

pub fn mean_des(spec: &GroupSpec) -> BigRational {
    let half = (n_of(spec) - int(1)) / int(2);
    match spec.family() {
        GroupFamily::S => half,
        _ => half + spec.bias(),
    }
}

pub fn var_des(spec: &GroupSpec) -> BigRational {
    let n = spec.rank();
    let base = (n_of(spec) + int(1)) / int(12);
    match (spec.family(), n) {
        (GroupFamily::S, 1) => BigRational::zero(),
        (GroupFamily::S, _) => base,
        (GroupFamily::B, 1) => pq(spec),
        (GroupFamily::B, _) => base,
        (GroupFamily::D, 2) => ratio(1, 4) + pq(spec),
        (GroupFamily::D, _) => base + pq(spec) / int(3),
    }
}

pub fn cov_inv_des(spec: &GroupSpec) -> BigRational {
    let base = (n_of(spec) - int(1)) / int(4);
    match spec.family() {
        GroupFamily::S => base,
        _ => base + pq(spec),
    }
}

/// `Var(X̂_inv) = Σ_k Var E(X_inv | Z_k)`.
///
/// For D this is `(a + b)·n(n−1)(2n−1)/6 + c·n(n−1)(n−2)/6 − n(n−1)²(p+½)²`
/// with `a = 4p²/3 + 2p/3 + 1/3`, `b = 2p + 1/3`, `c = 4p²/3 + 8p/3 + 1/3`;
/// the sign term of B adds `n² pq`.
pub fn var_hajek_inv(spec: &GroupSpec) -> BigRational {
    let n = n_of(spec);
    let p = spec.bias();
    if spec.family() == GroupFamily::S {
        return (&n * &n * &n - &n) / int(36);
    }
    let a = ratio(4, 3) * p * p + ratio(2, 3) * p + ratio(1, 3);
    let b = int(2) * p + ratio(1, 3);
    let c = ratio(4, 3) * p * p + ratio(8, 3) * p + ratio(1, 3);
    let n1 = &n - int(1);
    let shift = p + ratio(1, 2);
    let d = (a + b) * &n * &n1 * (int(2) * &n - int(1)) / int(6)
        + c * &n * &n1 * (&n - int(2)) / int(6)
        - &n * &n1 * &n1 * &shift * &shift;
    match spec.family() {
        GroupFamily::B => d + &n * &n * pq(spec),
        _ => d,
    }
}

pub fn cov_hajek_des(spec: &GroupSpec) -> BigRational {
    let base = (n_of(spec) - int(1)) / int(6);
    match spec.family() {
        GroupFamily::S => base,
        GroupFamily::B => base + pq(spec),
        GroupFamily::D => base + ratio(2, 3) * pq(spec),
    }
}

pub fn moment_set(spec: &GroupSpec) -> MomentSet {
    MomentSet {
        mean_inv: mean_inv(spec),
        var_inv: var_inv(spec),
        mean_des: mean_des(spec),
        var_des: var_des(spec),
        cov_inv_des: cov_inv_des(spec),
        var_hajek_inv: var_hajek_inv(spec),
        cov_hajek_des: cov_hajek_des(spec),
    }
}

/// Sums over independent components.
pub fn product_moments(spec: &ProductGroupSpec) -> MomentSet {
    moments_of(spec.components())
}

pub(crate) fn moments_of(components: &[GroupSpec]) -> MomentSet {
    let mut m = MomentSet::zero();
    for c in components {
        m.add(&moment_set(c));
    }
    m
}

/// `1 − Var(X̂_inv)/Var(X_inv)`.
pub fn hajek_ratio_bound(m: &MomentSet) -> BigRational {
    if m.var_inv.is_zero() {
        return BigRational::zero();
    }
    BigRational::one() - &m.var_hajek_inv / &m.var_inv
}

pub fn ratio_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: usize) -> GroupSpec {
        GroupSpec::symmetric(n).unwrap()
    }

    #[test]
    fn worked_values() {
        assert_eq!(mean_inv(&s(4)), int(3));
        assert_eq!(mean_inv(&GroupSpec::signed(3, 1, 2).unwrap()), ratio(9, 2));
        assert_eq!(mean_inv(&GroupSpec::signed(2, 1, 2).unwrap()), int(2));
        assert_eq!(var_inv(&s(3)), ratio(11, 12));
        assert_eq!(var_inv(&GroupSpec::signed(2, 1, 2).unwrap()), ratio(3, 2));
        assert_eq!(var_des(&s(3)), ratio(1, 3));
        assert_eq!(var_des(&GroupSpec::signed(2, 1, 2).unwrap()), ratio(1, 4));
        assert_eq!(cov_inv_des(&s(3)), ratio(1, 2));
        assert_eq!(
            cov_inv_des(&GroupSpec::signed(2, 1, 2).unwrap()),
            ratio(1, 2)
        );
        assert_eq!(var_hajek_inv(&s(3)), ratio(2, 3));
        assert_eq!(
            var_hajek_inv(&GroupSpec::even_signed(3, 0, 1).unwrap()),
            ratio(2, 3)
        );
        assert_eq!(
            var_hajek_inv(&GroupSpec::signed(2, 1, 2).unwrap()),
            ratio(4, 3)
        );
        assert_eq!(cov_hajek_des(&s(3)), ratio(1, 3));
    }

    #[test]
    fn d_at_zero_bias_is_s() {
        for n in 2..30 {
            let d = GroupSpec::even_signed(n, 0, 1).unwrap();
            let (md, ms) = (moment_set(&d), moment_set(&s(n)));
            assert_eq!(md.var_inv, ms.var_inv);
            assert_eq!(md.cov_inv_des, ms.cov_inv_des);
            assert_eq!(md.var_hajek_inv, ms.var_hajek_inv);
            assert_eq!(md.cov_hajek_des, ms.cov_hajek_des);
            let n = n as i64;
            assert_eq!(ms.var_inv, int(n * (n - 1) * (2 * n + 5)) / int(72));
        }
    }

    #[test]
    fn leading_coefficient_values() {
        assert_eq!(leading_coefficient(&int(0)), ratio(1, 36));
        assert_eq!(leading_coefficient(&ratio(1, 2)), ratio(1, 9));
        assert_eq!(leading_coefficient(&int(1)), ratio(1, 36));
    }

    #[test]
    fn projection_never_exceeds_variance() {
        for n in 1..60 {
            for (a, b) in [(0, 1), (1, 4), (1, 2), (3, 4), (1, 1)] {
                for spec in [GroupSpec::signed(n, a, b), GroupSpec::even_signed(n, a, b)]
                    .into_iter()
                    .flatten()
                {
                    let m = moment_set(&spec);
                    assert!(m.var_hajek_inv <= m.var_inv, "{spec}");
                    assert!(m.var_hajek_inv >= int(0), "{spec}");
                }
            }
        }
    }

    #[test]
    fn ratio_in_band_at_200() {
        for (a, b) in [(0, 1), (1, 4), (1, 2)] {
            for spec in [
                GroupSpec::signed(200, a, b).unwrap(),
                GroupSpec::even_signed(200, a, b).unwrap(),
            ] {
                let m = moment_set(&spec);
                let r = &m.var_inv / &m.var_hajek_inv;
                assert!(r >= int(1) && r <= int(1) + ratio(5, 200), "{spec}");
            }
        }
    }

    #[test]
    fn correlation_decays_like_one_over_n() {
        for spec_of in [
            |n| GroupSpec::symmetric(n).unwrap(),
            |n| GroupSpec::signed(n, 1, 4).unwrap(),
            |n| GroupSpec::even_signed(n, 1, 2).unwrap(),
        ] {
            let c: Vec<f64> = [50, 100, 200]
                .iter()
                .map(|&n| moment_set(&spec_of(n)).correlation() * n as f64)
                .collect();
            assert!(c.iter().all(|&x| x > 0.0 && x < 6.0), "{c:?}");
        }
    }

    #[test]
    fn products_sum() {
        let p: ProductGroupSpec = "S:3,S:3".parse().unwrap();
        assert_eq!(product_moments(&p).var_inv, ratio(11, 6));
        let p: ProductGroupSpec = "S:2,B:2:1/2".parse().unwrap();
        assert_eq!(product_moments(&p).mean_inv, ratio(5, 2));
        let one: ProductGroupSpec = "B:4:1/3".parse().unwrap();
        assert_eq!(product_moments(&one), moment_set(&one.components()[0]));
    }

    #[test]
    fn serializes_as_strings() {
        let j = serde_json::to_value(moment_set(&s(3))).unwrap();
        assert_eq!(j["var_inv"], "11/12");
        let back: MomentSet = serde_json::from_value(j).unwrap();
        assert_eq!(back, moment_set(&s(3)));
    }
}
