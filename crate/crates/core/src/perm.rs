//! Signed permutations in one-line notation and latent vectors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupFamily;

/// One-line notation `(π(1), …, π(n))`; `|π|` is a permutation of `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i32>", into = "Vec<i32>")]
pub struct SignedPermutation(Vec<i32>);

impl SignedPermutation {
    pub fn new(entries: Vec<i32>) -> Result<Self> {
        let n = entries.len();
        let mut seen = vec![false; n + 1];
        for &e in &entries {
            let a = e.unsigned_abs() as usize;
            if a == 0 || a > n || seen[a] {
                return Err(Error::InvalidElement(format!(
                    "{entries:?} is not a signed permutation"
                )));
            }
            seen[a] = true;
        }
        Ok(SignedPermutation(entries))
    }

    /// Skips validation; callers guarantee the permutation property.
    pub(crate) fn from_raw(entries: Vec<i32>) -> Self {
        SignedPermutation(entries)
    }

    pub fn identity(n: usize) -> Self {
        SignedPermutation((1..=n as i32).collect())
    }

    pub fn entries(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn neg_count(&self) -> usize {
        self.0.iter().filter(|&&e| e < 0).count()
    }

    /// Checks the family constraint: S has no negative entries, D an even number.
    pub fn check_family(&self, family: GroupFamily) -> Result<()> {
        match family {
            GroupFamily::S if self.neg_count() > 0 => Err(Error::InvalidElement(format!(
                "{:?} has negative entries, not in S_n",
                self.0
            ))),
            GroupFamily::D if self.neg_count() % 2 == 1 => Err(Error::InvalidElement(format!(
                "{:?} has negative sign product, not in D_n",
                self.0
            ))),
            _ => Ok(()),
        }
    }
}

impl TryFrom<Vec<i32>> for SignedPermutation {
    type Error = Error;

    fn try_from(v: Vec<i32>) -> Result<Self> {
        SignedPermutation::new(v)
    }
}

impl From<SignedPermutation> for Vec<i32> {
    fn from(p: SignedPermutation) -> Self {
        p.0
    }
}

pub fn neg_count(pi: &SignedPermutation) -> usize {
    pi.neg_count()
}

/// Latent vector `(Z_1, …, Z_n)` with entries in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LatentSample(Vec<f64>);

impl LatentSample {
    pub fn new(z: Vec<f64>) -> Result<Self> {
        if let Some(bad) = z.iter().find(|v| !(-1.0..=1.0).contains(*v)) {
            return Err(Error::Domain(format!("latent value {bad} outside [-1, 1]")));
        }
        Ok(LatentSample(z))
    }

    pub(crate) fn from_raw(z: Vec<f64>) -> Self {
        LatentSample(z)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Copy with the sign of `z_1` flipped when the number of negative
    /// entries is odd. The inversion and descent counts of `D_n` do not
    /// depend on the sign at position 1, so this maps an iid latent vector
    /// to an even-signed element without changing `(inv, des)`.
    pub fn d_corrected(&self) -> LatentSample {
        let mut z = self.0.clone();
        fix_d_sign(&mut z);
        LatentSample(z)
    }
}

pub(crate) fn fix_d_sign(z: &mut [f64]) {
    let negs = z.iter().filter(|v| v.is_sign_negative()).count();
    if negs % 2 == 1 {
        z[0] = -z[0];
    }
}

impl TryFrom<Vec<f64>> for LatentSample {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        LatentSample::new(v)
    }
}

impl From<LatentSample> for Vec<f64> {
    fn from(z: LatentSample) -> Self {
        z.0
    }
}

/// The element induced by the ranks of a latent vector.
///
/// `π(i) = sign(z_i) · rank(|z_i|)` with rank 1 the smallest; equal
/// magnitudes are broken by index. For `S` the ranks of `z` itself are
/// used. `-0.0` counts as negative, `0.0` as positive.
pub fn rank_permutation(z: &LatentSample, family: GroupFamily) -> Result<SignedPermutation> {
    let v = z.values();
    let mut out = vec![0i32; v.len()];
    rank_into(v, family, &mut Vec::new(), &mut out);
    let pi = SignedPermutation(out);
    if family == GroupFamily::D {
        pi.check_family(family)?;
    }
    Ok(pi)
}

pub(crate) fn rank_into(v: &[f64], family: GroupFamily, order: &mut Vec<usize>, out: &mut [i32]) {
    order.clear();
    order.extend(0..v.len());
    match family {
        GroupFamily::S => order.sort_by(|&a, &b| v[a].total_cmp(&v[b]).then(a.cmp(&b))),
        _ => order.sort_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs()).then(a.cmp(&b))),
    }
    for (r, &i) in order.iter().enumerate() {
        let rank = r as i32 + 1;
        out[i] = if family != GroupFamily::S && v[i].is_sign_negative() {
            -rank
        } else {
            rank
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: &[f64]) -> LatentSample {
        LatentSample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn ranking_examples() {
        let s = rank_permutation(&z(&[0.9, 0.1, 0.5]), GroupFamily::S).unwrap();
        assert_eq!(s.entries(), &[3, 1, 2]);
        let b = rank_permutation(&z(&[-0.2, 0.7]), GroupFamily::B).unwrap();
        assert_eq!(b.entries(), &[-1, 2]);
        let d = rank_permutation(&z(&[-0.2, -0.7]), GroupFamily::D).unwrap();
        assert_eq!(d.entries(), &[-1, -2]);
        assert!(rank_permutation(&z(&[-0.2, 0.7]), GroupFamily::D).is_err());
    }

    #[test]
    fn ties_break_by_index() {
        let p = rank_permutation(&z(&[0.5, 0.5, 0.1]), GroupFamily::S).unwrap();
        assert_eq!(p.entries(), &[2, 3, 1]);
    }

    #[test]
    fn neg_counts() {
        assert_eq!(
            neg_count(&SignedPermutation::new(vec![1, 2, 3]).unwrap()),
            0
        );
        assert_eq!(
            neg_count(&SignedPermutation::new(vec![-1, 2, -3]).unwrap()),
            2
        );
        assert_eq!(neg_count(&SignedPermutation::new(vec![-1, -2]).unwrap()), 2);
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(SignedPermutation::new(vec![1, 1]).is_err());
        assert!(SignedPermutation::new(vec![0, 1]).is_err());
        assert!(SignedPermutation::new(vec![3, 1]).is_err());
        assert!(LatentSample::new(vec![1.5]).is_err());
    }

    #[test]
    fn d_correction_flips_first_sign() {
        let c = z(&[0.3, -0.6, 0.2]).d_corrected();
        assert_eq!(c.values(), &[-0.3, -0.6, 0.2]);
        let c = z(&[0.3, -0.6, -0.2]).d_corrected();
        assert_eq!(c.values(), &[0.3, -0.6, -0.2]);
    }
}
