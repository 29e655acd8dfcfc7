//! Exhaustive enumeration with exact rational weights.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupFamily, GroupSpec, ProductGroupSpec, Target};
use crate::perm::SignedPermutation;
use crate::quad;
use crate::rational::{int, serde_str};
use crate::sampler::gr_cdf;
use crate::stats::{binom2, descents_of, inversion_parts, Fenwick, JointStat};

/// Largest rank enumerated per family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub s: usize,
    pub b: usize,
    pub d: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { s: 8, b: 5, d: 5 }
    }
}

impl Budget {
    fn check(&self, spec: &GroupSpec) -> Result<()> {
        let cap = match spec.family() {
            GroupFamily::S => self.s,
            GroupFamily::B => self.b,
            GroupFamily::D => self.d,
        };
        if spec.rank() > cap {
            return Err(Error::BudgetExceeded(format!(
                "{spec}: rank {} > cap {cap}",
                spec.rank()
            )));
        }
        Ok(())
    }
}

fn factorial(n: usize) -> BigRational {
    (1..=n as i64)
        .map(int)
        .fold(BigRational::one(), |a, b| a * b)
}

/// `w[a] = p^a q^(m−a) / n!` where `m` is the number of free signs.
fn weight_table(spec: &GroupSpec) -> Vec<BigRational> {
    let n = spec.rank();
    let free = match spec.family() {
        GroupFamily::S => 0,
        GroupFamily::B => n,
        GroupFamily::D => n - 1,
    };
    let nf = factorial(n);
    let (p, q) = (spec.bias().clone(), spec.q());
    (0..=free)
        .map(|a| Pow::pow(&p, a as u32) * Pow::pow(&q, (free - a) as u32) / &nf)
        .collect()
}

/// Visits every element once with the number of negative free signs.
fn for_each_element(spec: &GroupSpec, mut f: impl FnMut(&[i32], usize)) {
    let n = spec.rank();
    let family = spec.family();
    let mut buf = vec![0i32; n];
    for perm in (1..=n as i32).permutations(n) {
        match family {
            GroupFamily::S => f(&perm, 0),
            GroupFamily::B => {
                for mask in 0u32..(1 << n) {
                    for (i, &v) in perm.iter().enumerate() {
                        buf[i] = if mask >> i & 1 == 1 { -v } else { v };
                    }
                    f(&buf, mask.count_ones() as usize);
                }
            }
            GroupFamily::D => {
                for mask in 0u32..(1 << (n - 1)) {
                    for (i, &v) in perm.iter().enumerate().skip(1) {
                        buf[i] = if mask >> (i - 1) & 1 == 1 { -v } else { v };
                    }
                    let a = mask.count_ones() as usize;
                    buf[0] = if a % 2 == 1 { -perm[0] } else { perm[0] };
                    f(&buf, a);
                }
            }
        }
    }
}

/// Every element with its exact probability.
pub fn enumerate_elements(
    spec: &GroupSpec,
    budget: &Budget,
) -> Result<Vec<(SignedPermutation, BigRational)>> {
    budget.check(spec)?;
    let w = weight_table(spec);
    let mut out = Vec::new();
    for_each_element(spec, |e, a| {
        out.push((SignedPermutation::from_raw(e.to_vec()), w[a].clone()))
    });
    Ok(out)
}

/// Cartesian product of component enumerations.
pub fn enumerate_product_elements(
    spec: &ProductGroupSpec,
    budget: &Budget,
) -> Result<Vec<(Vec<SignedPermutation>, BigRational)>> {
    let mut acc: Vec<(Vec<SignedPermutation>, BigRational)> =
        vec![(Vec::new(), BigRational::one())];
    for c in spec.components() {
        let elems = enumerate_elements(c, budget)?;
        acc = acc
            .iter()
            .flat_map(|(es, w)| {
                elems.iter().map(move |(e, we)| {
                    let mut v = es.clone();
                    v.push(e.clone());
                    (v, w * we)
                })
            })
            .collect();
    }
    Ok(acc)
}

pub fn element_statistics(e: &[i32], family: GroupFamily) -> JointStat {
    let (plus, minus, circ) = inversion_parts(e, &mut Fenwick::default());
    let inv = match family {
        GroupFamily::S => plus,
        GroupFamily::B => plus + minus + circ,
        GroupFamily::D => plus + minus,
    };
    JointStat {
        inv,
        des: descents_of(e, family),
        inv_plus: plus,
        inv_minus: minus,
        inv_circ: circ,
    }
}

/// Exact joint law of `(inv, des)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointPmf {
    pub target: Target,
    /// `(inv, des, probability)` sorted by `(inv, des)`.
    pub cells: Vec<PmfCell>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PmfCell {
    pub inv: u64,
    pub des: u64,
    #[serde(with = "serde_str")]
    pub prob: BigRational,
}

/// Exact moments of `(inv, des)` computed from a [`JointPmf`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactMoments {
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
}

impl JointPmf {
    fn from_map(target: Target, map: BTreeMap<(u64, u64), BigRational>) -> Self {
        let cells = map
            .into_iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|((inv, des), prob)| PmfCell { inv, des, prob })
            .collect();
        JointPmf { target, cells }
    }

    fn to_map(&self) -> BTreeMap<(u64, u64), BigRational> {
        self.cells
            .iter()
            .map(|c| ((c.inv, c.des), c.prob.clone()))
            .collect()
    }

    pub fn get(&self, inv: u64, des: u64) -> BigRational {
        self.cells
            .iter()
            .find(|c| c.inv == inv && c.des == des)
            .map_or_else(BigRational::zero, |c| c.prob.clone())
    }

    pub fn total(&self) -> BigRational {
        self.cells.iter().map(|c| &c.prob).sum()
    }

    pub fn marginal_inv(&self) -> BTreeMap<u64, BigRational> {
        let mut m = BTreeMap::new();
        for c in &self.cells {
            *m.entry(c.inv).or_insert_with(BigRational::zero) += &c.prob;
        }
        m
    }

    pub fn moments(&self) -> ExactMoments {
        let (mut ei, mut ed, mut eii, mut edd, mut eid) = (
            BigRational::zero(),
            BigRational::zero(),
            BigRational::zero(),
            BigRational::zero(),
            BigRational::zero(),
        );
        for c in &self.cells {
            let (i, d) = (int(c.inv as i64), int(c.des as i64));
            ei += &c.prob * &i;
            ed += &c.prob * &d;
            eii += &c.prob * &i * &i;
            edd += &c.prob * &d * &d;
            eid += &c.prob * &i * &d;
        }
        ExactMoments {
            var_inv: eii - &ei * &ei,
            var_des: edd - &ed * &ed,
            cov_inv_des: eid - &ei * &ed,
            mean_inv: ei,
            mean_des: ed,
        }
    }
}

pub fn exact_joint_pmf(spec: &GroupSpec, budget: &Budget) -> Result<JointPmf> {
    budget.check(spec)?;
    let w = weight_table(spec);
    let mut counts: HashMap<(u64, u64, usize), u64> = HashMap::new();
    let family = spec.family();
    for_each_element(spec, |e, a| {
        let s = element_statistics(e, family);
        *counts.entry((s.inv, s.des, a)).or_insert(0) += 1;
    });
    let mut map: BTreeMap<(u64, u64), BigRational> = BTreeMap::new();
    for ((inv, des, a), c) in counts {
        *map.entry((inv, des)).or_insert_with(BigRational::zero) += &w[a] * int(c as i64);
    }
    Ok(JointPmf::from_map(spec.clone().into(), map))
}

/// Convolution of the component laws.
pub fn exact_product_pmf(spec: &ProductGroupSpec, budget: &Budget) -> Result<JointPmf> {
    let mut acc: BTreeMap<(u64, u64), BigRational> = BTreeMap::from([((0, 0), BigRational::one())]);
    for c in spec.components() {
        let m = exact_joint_pmf(c, budget)?.to_map();
        let mut next = BTreeMap::new();
        for ((i1, d1), p1) in &acc {
            for ((i2, d2), p2) in &m {
                *next
                    .entry((i1 + i2, d1 + d2))
                    .or_insert_with(BigRational::zero) += p1 * p2;
            }
        }
        acc = next;
    }
    Ok(JointPmf::from_map(spec.clone().into(), acc))
}

/// Oracle moments: exact for `(inv, des)`, quadrature for the Hájek terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleMoments {
    #[serde(flatten)]
    pub exact: ExactMoments,
    pub var_hajek_inv: f64,
    pub cov_hajek_des: f64,
    /// The Hájek entries come from quadrature, not exact arithmetic.
    pub hajek_approximate: bool,
}

pub fn exact_moments(spec: &GroupSpec, budget: &Budget) -> Result<OracleMoments> {
    let exact = exact_joint_pmf(spec, budget)?.moments();
    let (var_hajek_inv, cov_hajek_des) = hajek_moments_quadrature(spec);
    Ok(OracleMoments {
        exact,
        var_hajek_inv,
        cov_hajek_des,
        hajek_approximate: true,
    })
}

/// `E h(Z)` for `Z ~ GR(p)`, split at 0 where the density jumps.
fn expect(p: f64, h: impl Fn(f64) -> f64) -> f64 {
    p * quad::adaptive(&h, -1.0, 0.0, 1e-15) + (1.0 - p) * quad::adaptive(&h, 0.0, 1.0, 1e-15)
}

/// `(Var X̂_inv, Cov(X̂_inv, X_des))` from one-dimensional integrals.
///
/// `E(X_inv | Z_k = z)` is rebuilt from the distribution function:
/// `(k−1)(1 − F(z) + F(−z)) + (n−k)(F(z) + F(−z)) + C(n−1,2)(p+½)`,
/// plus `1{z<0} + (n−1)p` on B. Each descent indicator touching `Z_k` is
/// replaced by its conditional probability given `Z_k`.
pub fn hajek_moments_quadrature(spec: &GroupSpec) -> (f64, f64) {
    let (family, n, p) = (spec.family(), spec.rank(), spec.p());
    let nf = n as f64;
    let f = |z: f64| gr_cdf(p, z).expect("p validated by GroupSpec");
    let neg = |z: f64| if z < 0.0 { 1.0 } else { 0.0 };
    let (mut var, mut cov) = (0.0, 0.0);
    for k in 1..=n {
        let kf = k as f64;
        let g = |z: f64| {
            let base = (kf - 1.0) * (1.0 - f(z) + f(-z))
                + (nf - kf) * (f(z) + f(-z))
                + binom2(nf - 1.0) * (p + 0.5);
            match family {
                GroupFamily::B => base + neg(z) + (nf - 1.0) * p,
                _ => base,
            }
        };
        let eg = expect(p, g);
        var += expect(p, |z| g(z) * g(z)) - eg * eg;
        let c = |h: &dyn Fn(f64) -> f64| expect(p, |z| g(z) * h(z)) - eg * expect(p, h);
        if k >= 2 {
            cov += c(&|z| 1.0 - f(z));
        }
        if k < n {
            cov += c(&f);
        }
        match family {
            GroupFamily::B if k == 1 => cov += c(&neg),
            GroupFamily::D if k <= 2 => cov += c(&|z| f(-z)),
            _ => {}
        }
    }
    (var, cov)
}

/// Coefficients `c[d][v]` of `Σ_π P(π) s^des t^inv`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenPoly {
    pub coeffs: Vec<Vec<BigRational>>,
}

pub fn generating_polynomial(pmf: &JointPmf) -> GenPoly {
    let dmax = pmf.cells.iter().map(|c| c.des).max().unwrap_or(0) as usize;
    let vmax = pmf.cells.iter().map(|c| c.inv).max().unwrap_or(0) as usize;
    let mut coeffs = vec![vec![BigRational::zero(); vmax + 1]; dmax + 1];
    for c in &pmf.cells {
        coeffs[c.des as usize][c.inv as usize] = c.prob.clone();
    }
    GenPoly { coeffs }
}

/// True iff the coefficient matrix is the outer product of its marginals,
/// i.e. `inv` and `des` are independent.
pub fn factors_as_product(g: &GenPoly) -> bool {
    let rows: Vec<BigRational> = g.coeffs.iter().map(|r| r.iter().sum()).collect();
    let width = g.coeffs.first().map_or(0, Vec::len);
    let cols: Vec<BigRational> = (0..width)
        .map(|v| g.coeffs.iter().map(|r| &r[v]).sum())
        .collect();
    g.coeffs
        .iter()
        .zip(&rows)
        .all(|(r, rs)| r.iter().zip(&cols).all(|(c, cs)| *c == rs * cs))
}
