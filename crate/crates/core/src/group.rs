//! Group specifications: family, rank and sign bias.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{in_unit_interval, parse_rational, ratio, to_f64, Notation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupFamily {
    S,
    B,
    D,
}

impl fmt::Display for GroupFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupFamily::S => "S",
            GroupFamily::B => "B",
            GroupFamily::D => "D",
        })
    }
}

impl FromStr for GroupFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "S" | "s" | "A" => Ok(GroupFamily::S),
            "B" | "b" | "C" => Ok(GroupFamily::B),
            "D" | "d" => Ok(GroupFamily::D),
            other => Err(Error::InvalidSpec(format!("unknown family {other:?}"))),
        }
    }
}

/// Family, rank and sign bias `p` of the measure being sampled.
///
/// `S` forces `p = 0`. `D` needs rank at least 2 (the boundary descent
/// `1{-π(2) > π(1)}` is undefined otherwise).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    family: GroupFamily,
    rank: usize,
    bias: BigRational,
}

impl GroupSpec {
    pub fn new(family: GroupFamily, rank: usize, bias: BigRational) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidSpec("rank must be at least 1".into()));
        }
        if !in_unit_interval(&bias) {
            return Err(Error::InvalidSpec(format!("bias {bias} outside [0, 1]")));
        }
        if family == GroupFamily::S && !bias.is_zero() {
            return Err(Error::InvalidSpec("family S requires p = 0".into()));
        }
        if family == GroupFamily::D && rank < 2 {
            return Err(Error::InvalidSpec("family D requires rank >= 2".into()));
        }
        Ok(GroupSpec { family, rank, bias })
    }

    pub fn symmetric(rank: usize) -> Result<Self> {
        Self::new(GroupFamily::S, rank, BigRational::zero())
    }

    pub fn signed(rank: usize, num: i64, den: i64) -> Result<Self> {
        Self::new(GroupFamily::B, rank, ratio(num, den))
    }

    pub fn even_signed(rank: usize, num: i64, den: i64) -> Result<Self> {
        Self::new(GroupFamily::D, rank, ratio(num, den))
    }

    pub fn family(&self) -> GroupFamily {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn bias(&self) -> &BigRational {
        &self.bias
    }

    pub fn p(&self) -> f64 {
        to_f64(&self.bias)
    }

    pub fn q(&self) -> BigRational {
        BigRational::one() - &self.bias
    }

    pub fn max_inv(&self) -> u64 {
        let n = self.rank as u64;
        match self.family {
            GroupFamily::S => n * (n - 1) / 2,
            GroupFamily::B => n * n,
            GroupFamily::D => n * (n - 1),
        }
    }

    pub fn max_des(&self) -> u64 {
        let n = self.rank as u64;
        match self.family {
            GroupFamily::S => n - 1,
            GroupFamily::B | GroupFamily::D => n,
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            GroupFamily::S => write!(f, "S:{}", self.rank),
            fam => write!(f, "{}:{}:{}", fam, self.rank, self.bias),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// `"S:5"`, `"B:5:1/2"`, `"D:7:1/4"`. A missing bias means `p = 0`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        if parts.len() < 2 || parts.len() > 3 {
            return Err(Error::InvalidSpec(format!(
                "expected FAMILY:RANK[:P], got {s:?}"
            )));
        }
        let family: GroupFamily = parts[0].parse()?;
        let rank: usize = parts[1]
            .trim()
            .parse()
            .map_err(|_| Error::InvalidSpec(format!("bad rank {:?}", parts[1])))?;
        let bias = match parts.get(2) {
            None => BigRational::zero(),
            Some(p) => match parse_rational(p)? {
                (r, Notation::Rational) => r,
                (_, Notation::Float) => {
                    return Err(Error::InvalidSpec(format!(
                        "bias {p:?} must be written as a rational"
                    )))
                }
            },
        };
        GroupSpec::new(family, rank, bias)
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// A bounded direct product `W_1 × … × W_l` with independent components.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductGroupSpec {
    components: Vec<GroupSpec>,
}

impl ProductGroupSpec {
    pub fn new(components: Vec<GroupSpec>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidSpec(
                "a product needs at least one component".into(),
            ));
        }
        Ok(ProductGroupSpec { components })
    }

    pub fn components(&self) -> &[GroupSpec] {
        &self.components
    }

    pub fn total_rank(&self) -> usize {
        self.components.iter().map(GroupSpec::rank).sum()
    }

    pub fn is_sorted_decreasing(&self) -> bool {
        self.components
            .windows(2)
            .all(|w| w[0].rank() >= w[1].rank())
    }
}

impl fmt::Display for ProductGroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for ProductGroupSpec {
    type Err = Error;

    /// Comma-separated component specs, e.g. `"S:250,B:250:1/2"`.
    fn from_str(s: &str) -> Result<Self> {
        let comps = s
            .split(',')
            .map(str::parse)
            .collect::<Result<Vec<GroupSpec>>>()?;
        ProductGroupSpec::new(comps)
    }
}

/// What an experiment samples: a single group or a product.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Target {
    Group(GroupSpec),
    Product(ProductGroupSpec),
}

impl Target {
    pub fn components(&self) -> &[GroupSpec] {
        match self {
            Target::Group(g) => std::slice::from_ref(g),
            Target::Product(p) => p.components(),
        }
    }

    pub fn total_rank(&self) -> usize {
        self.components().iter().map(GroupSpec::rank).sum()
    }
}

impl From<GroupSpec> for Target {
    fn from(g: GroupSpec) -> Self {
        Target::Group(g)
    }
}

impl From<ProductGroupSpec> for Target {
    fn from(p: ProductGroupSpec) -> Self {
        Target::Product(p)
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Group(g) => write!(f, "{g}"),
            Target::Product(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.contains(',') {
            Ok(Target::Product(s.parse()?))
        } else {
            Ok(Target::Group(s.parse()?))
        }
    }
}

impl Serialize for Target {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Target {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}
