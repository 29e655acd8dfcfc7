//! Plain-text renderings of oracle output: CSV tables and serializable
//! generating-polynomial matrices.

use std::fmt::Write;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Target;
use crate::oracle::{element_statistics, GenPoly, JointPmf, PmfCell};
use crate::perm::SignedPermutation;
use crate::rational::parse_rational;

pub const PMF_HEADER: &str = "inv,des,numerator,denominator";
pub const ELEMENT_HEADER: &str = "element,inv,des,numerator,denominator";

pub fn pmf_csv(pmf: &JointPmf) -> String {
    let mut s = String::from(PMF_HEADER);
    s.push('\n');
    for c in &pmf.cells {
        writeln!(
            s,
            "{},{},{},{}",
            c.inv,
            c.des,
            c.prob.numer(),
            c.prob.denom()
        )
        .unwrap();
    }
    s
}

/// Inverse of [`pmf_csv`].
pub fn parse_pmf_csv(target: Target, text: &str) -> Result<JointPmf> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(PMF_HEADER) {
        return Err(Error::Domain(format!("expected header `{PMF_HEADER}`")));
    }
    let bad = |l: &str| Error::Domain(format!("malformed pmf row `{l}`"));
    let cells = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.trim().split(',').collect();
            if f.len() != 4 {
                return Err(bad(l));
            }
            let (prob, _) = parse_rational(&format!("{}/{}", f[2], f[3])).map_err(|_| bad(l))?;
            Ok(PmfCell {
                inv: f[0].parse().map_err(|_| bad(l))?,
                des: f[1].parse().map_err(|_| bad(l))?,
                prob,
            })
        })
        .collect::<Result<_>>()?;
    Ok(JointPmf { target, cells })
}

/// Elements are written as space-separated one-line notation.
pub fn elements_csv(target: &Target, elements: &[(SignedPermutation, BigRational)]) -> String {
    let family = target.components()[0].family();
    let mut s = String::from(ELEMENT_HEADER);
    s.push('\n');
    for (e, w) in elements {
        let st = element_statistics(e.entries(), family);
        let one_line = e
            .entries()
            .iter()
            .map(i32::to_string)
            .collect::<Vec<_>>()
            .join(" ");
        writeln!(
            s,
            "{one_line},{},{},{},{}",
            st.inv,
            st.des,
            w.numer(),
            w.denom()
        )
        .unwrap();
    }
    s
}

/// `coeffs[d][v]` is the coefficient of `t^d q^v`, each as a reduced fraction string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenPolyReport {
    pub target: Target,
    pub coeffs: Vec<Vec<String>>,
    pub factors_as_product: bool,
}

impl GenPolyReport {
    pub fn new(target: Target, g: &GenPoly) -> Self {
        GenPolyReport {
            target,
            coeffs: g
                .coeffs
                .iter()
                .map(|row| row.iter().map(|c| c.to_string()).collect())
                .collect(),
            factors_as_product: crate::oracle::factors_as_product(g),
        }
    }

    pub fn to_gen_poly(&self) -> Result<GenPoly> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| parse_rational(c).map(|r| r.0))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Ok(GenPoly { coeffs })
    }
}
