//! Inversions, descents, Hájek projections and the 1-dependent decomposition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupFamily, GroupSpec};
use crate::perm::{LatentSample, SignedPermutation};

/// Joint statistic of one element. `inv` follows the family rule:
/// `inv_plus` for S, all three parts for B, `inv_plus + inv_minus` for D.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JointStat {
    pub inv: u64,
    pub des: u64,
    pub inv_plus: u64,
    pub inv_minus: u64,
    pub inv_circ: u64,
}

impl JointStat {
    fn assemble(family: GroupFamily, plus: u64, minus: u64, circ: u64, des: u64) -> Self {
        let inv = match family {
            GroupFamily::S => plus,
            GroupFamily::B => plus + minus + circ,
            GroupFamily::D => plus + minus,
        };
        JointStat {
            inv,
            des,
            inv_plus: plus,
            inv_minus: minus,
            inv_circ: circ,
        }
    }

    pub(crate) fn add(&mut self, o: &JointStat) {
        self.inv += o.inv;
        self.des += o.des;
        self.inv_plus += o.inv_plus;
        self.inv_minus += o.inv_minus;
        self.inv_circ += o.inv_circ;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionTerm {
    /// 1-based.
    pub index: usize,
    pub inv: f64,
    pub des: f64,
}

/// Counts over values in `-n..=n` for prefix queries.
#[derive(Debug, Default, Clone)]
pub(crate) struct Fenwick {
    tree: Vec<u32>,
}

impl Fenwick {
    fn reset(&mut self, size: usize) {
        self.tree.clear();
        self.tree.resize(size + 1, 0);
    }

    fn add(&mut self, mut i: usize) {
        i += 1;
        while i < self.tree.len() {
            self.tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Number of inserted positions `< i`.
    fn below(&self, mut i: usize) -> u64 {
        let mut s = 0u64;
        while i > 0 {
            s += self.tree[i] as u64;
            i &= i - 1;
        }
        s
    }
}

/// `(inv_plus, inv_minus, inv_circ)` in `O(n log n)`.
pub(crate) fn inversion_parts(entries: &[i32], fw: &mut Fenwick) -> (u64, u64, u64) {
    let n = entries.len() as i32;
    // value v sits at slot v + n
    fw.reset(2 * n as usize + 1);
    let (mut plus, mut minus, mut circ) = (0u64, 0u64, 0u64);
    for (j, &v) in entries.iter().enumerate() {
        let slot = (v + n) as usize;
        plus += j as u64 - fw.below(slot + 1);
        minus += fw.below((n - v) as usize);
        if v < 0 {
            circ += 1;
        }
        fw.add(slot);
    }
    (plus, minus, circ)
}

pub(crate) fn descents_of(entries: &[i32], family: GroupFamily) -> u64 {
    let adjacent = entries.windows(2).filter(|w| w[0] > w[1]).count() as u64;
    adjacent
        + match family {
            GroupFamily::S => 0,
            GroupFamily::B => (entries[0] < 0) as u64,
            GroupFamily::D => (-entries[1] > entries[0]) as u64,
        }
}

fn check_element(pi: &SignedPermutation, family: GroupFamily) -> Result<()> {
    pi.check_family(family)?;
    if family == GroupFamily::D && pi.len() < 2 {
        return Err(Error::InvalidElement("descents on D_n need n >= 2".into()));
    }
    if pi.is_empty() {
        return Err(Error::InvalidElement("empty element".into()));
    }
    Ok(())
}

/// Inversion counts of `π`; the returned `des` is zero.
pub fn count_inversions(pi: &SignedPermutation, family: GroupFamily) -> Result<JointStat> {
    pi.check_family(family)?;
    let (p, m, c) = inversion_parts(pi.entries(), &mut Fenwick::default());
    Ok(JointStat::assemble(family, p, m, c, 0))
}

pub fn count_descents(pi: &SignedPermutation, family: GroupFamily) -> Result<u64> {
    check_element(pi, family)?;
    Ok(descents_of(pi.entries(), family))
}

pub fn joint_statistics(pi: &SignedPermutation, family: GroupFamily) -> Result<JointStat> {
    check_element(pi, family)?;
    let (p, m, c) = inversion_parts(pi.entries(), &mut Fenwick::default());
    Ok(JointStat::assemble(
        family,
        p,
        m,
        c,
        descents_of(pi.entries(), family),
    ))
}

fn check_len(z: &LatentSample, spec: &GroupSpec) -> Result<()> {
    if z.len() != spec.rank() {
        return Err(Error::LengthMismatch {
            expected: spec.rank(),
            got: z.len(),
        });
    }
    Ok(())
}

/// Statistics straight from the indicator sums over `z` (quadratic time).
///
/// For D the sums are taken over the sign-corrected vector, so the
/// result is the statistic of the even-signed element the sample induces.
pub fn latent_statistics(z: &LatentSample, spec: &GroupSpec) -> Result<JointStat> {
    check_len(z, spec)?;
    let family = spec.family();
    let corrected;
    let v = if family == GroupFamily::D {
        corrected = z.d_corrected();
        corrected.values()
    } else {
        z.values()
    };
    let neg = |x: f64| x.is_sign_negative();
    let (mut plus, mut minus) = (0u64, 0u64);
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            plus += (v[i] > v[j]) as u64;
            if family != GroupFamily::S {
                minus += (-v[i] > v[j]) as u64;
            }
        }
    }
    let circ = if family == GroupFamily::S {
        0
    } else {
        v.iter().filter(|&&x| neg(x)).count() as u64
    };
    let mut des = v.windows(2).filter(|w| w[0] > w[1]).count() as u64;
    match family {
        GroupFamily::S => {}
        GroupFamily::B => des += neg(v[0]) as u64,
        GroupFamily::D => des += (-v[1] > v[0]) as u64,
    }
    Ok(JointStat::assemble(family, plus, minus, circ, des))
}

pub(crate) fn binom2(n: f64) -> f64 {
    n * (n - 1.0) / 2.0
}

/// `E(X_inv)` in floating point.
pub(crate) fn mean_inv_f64(family: GroupFamily, n: usize, p: f64) -> f64 {
    let n = n as f64;
    match family {
        GroupFamily::S => binom2(n) / 2.0,
        GroupFamily::B => binom2(n) * (p + 0.5) + n * p,
        GroupFamily::D => binom2(n) * (p + 0.5),
    }
}

/// `E(X_inv | Z_k = z)`, with `k` 1-based.
///
/// A pair `(i, j)` with `i < j` contributes `1{Z_i > Z_j} + 1{-Z_i > Z_j}`;
/// conditioning on the later coordinate `z` gives `1 - u` for `z > 0` and
/// `1 + u` for `z < 0` (`u = |z|`), and on the earlier one `(1 - 2p)u + 2p`.
/// Pairs not touching `k` contribute `p + 1/2` each. B adds the sign term.
pub fn conditional_inv(spec: &GroupSpec, k: usize, z: f64) -> f64 {
    cond_inv(spec.family(), spec.rank(), spec.p(), k, z)
}

#[inline]
pub(crate) fn cond_inv(family: GroupFamily, n: usize, p: f64, k: usize, z: f64) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    let u = z.abs();
    let neg = z.is_sign_negative();
    let later = if neg { 1.0 + u } else { 1.0 - u };
    let earlier = (1.0 - 2.0 * p) * u + 2.0 * p;
    let base = (kf - 1.0) * later + (nf - kf) * earlier + binom2(nf - 1.0) * (p + 0.5);
    match family {
        GroupFamily::B => base + neg as u8 as f64 + (nf - 1.0) * p,
        _ => base,
    }
}

/// Hájek projection `Σ_k E(X_inv | Z_k) − (n−1) E(X_inv)`.
pub fn hajek_inv(z: &LatentSample, spec: &GroupSpec) -> Result<f64> {
    check_len(z, spec)?;
    Ok(hajek_inv_raw(z.values(), spec.family(), spec.p()))
}

pub(crate) fn hajek_inv_raw(z: &[f64], family: GroupFamily, p: f64) -> f64 {
    let n = z.len();
    if family == GroupFamily::S {
        // closed form of the same sum
        let nf = n as f64;
        let lin: f64 = z
            .iter()
            .enumerate()
            .map(|(i, &v)| (nf - 2.0 * (i as f64 + 1.0) + 1.0) * v)
            .sum();
        return nf * (nf - 1.0) / 4.0 + lin;
    }
    let sum: f64 = z
        .iter()
        .enumerate()
        .map(|(i, &v)| cond_inv(family, n, p, i + 1, v))
        .sum();
    sum - (n as f64 - 1.0) * mean_inv_f64(family, n, p)
}

/// `Z_1 − Z_n + (n−1)/2`, the Hájek projection of `X_des` on `S_n`.
pub fn hajek_des(z: &LatentSample, spec: &GroupSpec) -> Result<f64> {
    check_len(z, spec)?;
    if spec.family() != GroupFamily::S {
        return Err(Error::InvalidSpec(
            "hajek_des is defined for family S only".into(),
        ));
    }
    if spec.rank() < 2 {
        return Err(Error::InvalidSpec("hajek_des needs n >= 2".into()));
    }
    let v = z.values();
    Ok(v[0] - v[v.len() - 1] + (v.len() as f64 - 1.0) / 2.0)
}

/// 1-dependent decomposition of `(X̂_inv, X_des)`.
///
/// Term `k < n` is `(E(X_inv | Z_k), 1{Z_k > Z_{k+1}})`, and term 1 also
/// carries the boundary descent (`1{Z_1 < 0}` for B, `1{−Z_2 > Z_1}` for
/// D). Term `n` is `(E(X_inv | Z_n) − (n−1)E(X_inv), 0)`. Each term depends
/// on `(Z_k, Z_{k+1})` only.
pub fn m_dependent_decomposition(
    z: &LatentSample,
    spec: &GroupSpec,
) -> Result<Vec<DecompositionTerm>> {
    check_len(z, spec)?;
    let n = spec.rank();
    if n < 2 {
        return Err(Error::InvalidSpec("decomposition needs n >= 2".into()));
    }
    let (family, p) = (spec.family(), spec.p());
    let v = z.values();
    let mut terms: Vec<DecompositionTerm> = (0..n)
        .map(|i| DecompositionTerm {
            index: i + 1,
            inv: cond_inv(family, n, p, i + 1, v[i]),
            des: if i + 1 < n {
                (v[i] > v[i + 1]) as u8 as f64
            } else {
                0.0
            },
        })
        .collect();
    terms[0].des += match family {
        GroupFamily::S => 0.0,
        GroupFamily::B => v[0].is_sign_negative() as u8 as f64,
        GroupFamily::D => (-v[1] > v[0]) as u8 as f64,
    };
    terms[n - 1].inv -= (n as f64 - 1.0) * mean_inv_f64(family, n, p);
    Ok(terms)
}

/// Componentwise sum of the statistics of a product element.
pub fn product_statistics(
    elements: &[SignedPermutation],
    spec: &crate::group::ProductGroupSpec,
) -> Result<JointStat> {
    let comps = spec.components();
    if elements.len() != comps.len() {
        return Err(Error::LengthMismatch {
            expected: comps.len(),
            got: elements.len(),
        });
    }
    let mut total = JointStat::default();
    for (e, c) in elements.iter().zip(comps) {
        if e.len() != c.rank() {
            return Err(Error::LengthMismatch {
                expected: c.rank(),
                got: e.len(),
            });
        }
        total.add(&joint_statistics(e, c.family())?);
    }
    Ok(total)
}
