//! Sampling of GR(p) latent vectors and group elements.
//!
//! `GR(p)` is the law of `U·R` with `U ~ U(0,1)` and an independent sign
//! `R = −1` with probability `p`. On `D_n` the signs at positions `2..n`
//! are p-biased and the sign at position 1 makes the product positive.

use rand::distributions::Open01;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::group::{GroupFamily, GroupSpec, ProductGroupSpec};
use crate::perm::{fix_d_sign, LatentSample, SignedPermutation};
use crate::rng::RngStream;
use crate::stats::{descents_of, inversion_parts, Fenwick};

/// Distribution function of `GR(p)`: `p z + p` on `[−1, 0]`, `q z + p` on `[0, 1]`.
pub fn gr_cdf(p: f64, z: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("p = {p} outside [0, 1]")));
    }
    Ok(if z <= -1.0 {
        0.0
    } else if z < 0.0 {
        p * z + p
    } else if z < 1.0 {
        (1.0 - p) * z + p
    } else {
        1.0
    })
}

#[inline]
fn negative_sign<R: Rng + ?Sized>(p: f64, rng: &mut R) -> bool {
    p > 0.0 && rng.gen::<f64>() < p
}

pub fn sample_gr<R: Rng + ?Sized>(p: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    if negative_sign(p, rng) {
        -u
    } else {
        u
    }
}

/// `n` independent `GR(p)` draws (`p = 0` for S).
pub fn sample_latent<R: Rng + ?Sized>(spec: &GroupSpec, rng: &mut R) -> LatentSample {
    let p = spec.p();
    LatentSample::from_raw((0..spec.rank()).map(|_| sample_gr(p, rng)).collect())
}

fn fill_element<R: Rng + ?Sized>(family: GroupFamily, p: f64, out: &mut [i32], rng: &mut R) {
    let n = out.len() as i32;
    out.iter_mut().zip(1..=n).for_each(|(e, v)| *e = v);
    out.shuffle(rng);
    match family {
        GroupFamily::S => {}
        GroupFamily::B => {
            for e in out.iter_mut() {
                if negative_sign(p, rng) {
                    *e = -*e;
                }
            }
        }
        GroupFamily::D => {
            let mut odd = false;
            for e in out.iter_mut().skip(1) {
                if negative_sign(p, rng) {
                    *e = -*e;
                    odd = !odd;
                }
            }
            if odd {
                out[0] = -out[0];
            }
        }
    }
}

/// Uniform permutation with family-specific signs.
///
/// B: independent p-biased signs, mass `(1/n!) p^neg q^(n−neg)`.
/// D: p-biased signs on positions `2..n`, position 1 fixed by parity,
/// mass `(1/n!) p^a q^(n−1−a)` with `a` the negatives among `2..n`.
pub fn sample_group_element<R: Rng + ?Sized>(spec: &GroupSpec, rng: &mut R) -> SignedPermutation {
    let mut v = vec![0; spec.rank()];
    fill_element(spec.family(), spec.p(), &mut v, rng);
    SignedPermutation::from_raw(v)
}

/// Independent components, component `i` drawn from `stream.substream(i)`.
pub fn sample_product_element(
    spec: &ProductGroupSpec,
    stream: &RngStream,
) -> Vec<SignedPermutation> {
    spec.components()
        .iter()
        .enumerate()
        .map(|(i, c)| sample_group_element(c, &mut stream.substream(i)))
        .collect()
}

/// Latent vector with the D sign correction applied, so that ranking it
/// yields an element of `D_n` with the same law as [`sample_group_element`].
pub fn sample_corrected_latent<R: Rng + ?Sized>(spec: &GroupSpec, rng: &mut R) -> LatentSample {
    let mut z = sample_latent(spec, rng);
    if spec.family() == GroupFamily::D {
        let mut v: Vec<f64> = z.into();
        fix_d_sign(&mut v);
        z = LatentSample::from_raw(v);
    }
    z
}

/// Draws `(inv, des)` pairs without materializing the element API.
///
/// For S the left inversion code `c_j = #{i < j : π(i) > π(j)}` is drawn
/// directly: the `c_j` are independent uniform on `0..j`, `inv = Σ c_j`,
/// and position `j` is a descent iff `c_{j+1} > c_j`. B and D shuffle,
/// sign and count with a Fenwick tree.
#[derive(Debug, Clone)]
pub struct StatSampler {
    family: GroupFamily,
    n: usize,
    p: f64,
    buf: Vec<i32>,
    fw: Fenwick,
}

impl StatSampler {
    pub fn new(spec: &GroupSpec) -> Self {
        StatSampler {
            family: spec.family(),
            n: spec.rank(),
            p: spec.p(),
            buf: vec![0; spec.rank()],
            fw: Fenwick::default(),
        }
    }

    pub fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> (u64, u64) {
        if self.family == GroupFamily::S {
            let (mut inv, mut des, mut prev) = (0u64, 0u64, 0u32);
            for j in 2..=self.n as u32 {
                let c = rng.gen_range(0..j);
                inv += c as u64;
                des += (c > prev) as u64;
                prev = c;
            }
            return (inv, des);
        }
        fill_element(self.family, self.p, &mut self.buf, rng);
        let (plus, minus, circ) = inversion_parts(&self.buf, &mut self.fw);
        let inv = match self.family {
            GroupFamily::B => plus + minus + circ,
            _ => plus + minus,
        };
        (inv, descents_of(&self.buf, self.family))
    }
}

/// [`StatSampler`] over the components of a product, summing statistics.
#[derive(Debug, Clone)]
pub struct ProductStatSampler {
    parts: Vec<StatSampler>,
}

impl ProductStatSampler {
    pub fn new(components: &[GroupSpec]) -> Self {
        ProductStatSampler {
            parts: components.iter().map(StatSampler::new).collect(),
        }
    }

    /// Component `i` uses `stream.substream(i)`; a single component uses
    /// the plain stream, so a one-factor product reproduces the group run.
    pub fn draw_stream(&mut self, stream: &RngStream) -> (u64, u64) {
        if self.parts.len() == 1 {
            return self.parts[0].draw(&mut stream.rng());
        }
        let (mut inv, mut des) = (0, 0);
        for (i, s) in self.parts.iter_mut().enumerate() {
            let (a, b) = s.draw(&mut stream.substream(i));
            inv += a;
            des += b;
        }
        (inv, des)
    }

    /// Sequential draws from one generator (used for blocks of maxima).
    pub fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> (u64, u64) {
        let (mut inv, mut des) = (0, 0);
        for s in self.parts.iter_mut() {
            let (a, b) = s.draw(rng);
            inv += a;
            des += b;
        }
        (inv, des)
    }
}
