//! Monte Carlo drivers for the bivariate CLT, the Gumbel limit of
//! coordinatewise maxima, and the quality of the Hájek projection.
//!
//! Replicate `j` always draws from `RngStream::new(seed, j)` and results are
//! stored by replicate index, so reports do not depend on the number of
//! worker threads.

use num_rational::BigRational;
use rand::distributions::Open01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::empirical::{
    grid_sup, joint_cdf_grid, ks_sup, marginal_cdf_grid, pearson, rect_sup, Lattice,
};
use crate::error::{Error, Result};
use crate::group::{GroupFamily, GroupSpec, Target};
use crate::limits::{
    bvn_cdf, gaussian_max_cdf, gumbel_alpha, gumbel_cdf, std_normal_cdf, violates_schedule,
};
use crate::moments::{hajek_ratio_bound, moment_set, moments_of, MomentSet};
use crate::perm::rank_into;
use crate::rational::{serde_str, to_f64};
use crate::rng::RngStream;
use crate::sampler::{sample_latent, ProductStatSampler};
use crate::stats::{hajek_inv_raw, inversion_parts, Fenwick};

pub const DEFAULT_CLT_GRID: [f64; 7] = [-2.0, -1.0, 0.0, 1.0, 2.0, 3.0, 4.0];
pub const DEFAULT_EVLT_GRID: [f64; 5] = [-1.0, 0.0, 1.0, 2.0, 3.0];

pub const SCHEDULE_VIOLATION: &str = "schedule-violation";
pub const UNSORTED_COMPONENTS: &str = "unsorted-components";

const CHUNK: usize = 512;

#[cfg(not(target_arch = "wasm32"))]
struct Timer(std::time::Instant);
#[cfg(not(target_arch = "wasm32"))]
impl Timer {
    fn start() -> Self {
        Timer(std::time::Instant::now())
    }
    fn ms(&self) -> u64 {
        self.0.elapsed().as_millis() as u64
    }
}

#[cfg(target_arch = "wasm32")]
struct Timer;
#[cfg(target_arch = "wasm32")]
impl Timer {
    fn start() -> Self {
        Timer
    }
    fn ms(&self) -> u64 {
        0
    }
}

/// Fills `len` slots, slot `j` computed by `f(&mut scratch, j)`.
fn fill<T, S, M, F>(len: usize, make: M, f: F) -> Vec<T>
where
    T: Send + Default + Clone,
    M: Fn() -> S + Sync,
    F: Fn(&mut S, usize) -> T + Sync,
{
    let mut out = vec![T::default(); len];
    let body = |(ci, chunk): (usize, &mut [T])| {
        let mut s = make();
        for (i, slot) in chunk.iter_mut().enumerate() {
            *slot = f(&mut s, ci * CHUNK + i);
        }
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        out.par_chunks_mut(CHUNK).enumerate().for_each(body);
    }
    #[cfg(not(feature = "parallel"))]
    out.chunks_mut(CHUNK).enumerate().for_each(body);
    out
}

/// Standardizing constants and the exact moments they come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentsUsed {
    pub source: String,
    pub exact: MomentSet,
    pub mean_inv: f64,
    pub sd_inv: f64,
    pub mean_des: f64,
    pub sd_des: f64,
    /// Closed-form `Corr(X_inv, X_des)`.
    pub rho_n: f64,
}

impl MomentsUsed {
    fn of(target: &Target) -> Result<Self> {
        let m = moments_of(target.components());
        let used = MomentsUsed {
            source: "closed-form".into(),
            mean_inv: to_f64(&m.mean_inv),
            sd_inv: m.sd_inv(),
            mean_des: to_f64(&m.mean_des),
            sd_des: m.sd_des(),
            rho_n: m.correlation(),
            exact: m,
        };
        if used.sd_inv == 0.0 || used.sd_des == 0.0 {
            return Err(Error::InvalidSpec(format!(
                "{target}: degenerate statistic, cannot standardize"
            )));
        }
        Ok(used)
    }
}

fn target_warnings(target: &Target) -> Vec<String> {
    match target {
        Target::Product(p) if !p.is_sorted_decreasing() => vec![UNSORTED_COMPONENTS.into()],
        _ => Vec::new(),
    }
}

/// Draws `replications` independent `(inv, des)` pairs.
pub fn draw_pairs(target: &Target, replications: usize, seed: u64) -> Vec<(u64, u64)> {
    let comps = target.components();
    fill(
        replications,
        || ProductStatSampler::new(comps),
        |s, j| s.draw_stream(&RngStream::new(seed, j as u64)),
    )
}

/// Coordinatewise maxima over blocks of `k` independent draws.
pub fn draw_maxima(target: &Target, k: usize, replications: usize, seed: u64) -> Vec<(u64, u64)> {
    let comps = target.components();
    fill(
        replications,
        || ProductStatSampler::new(comps),
        |s, j| {
            let mut rng = RngStream::new(seed, j as u64).rng();
            let (mut mi, mut md) = (0, 0);
            for _ in 0..k {
                let (i, d) = s.draw(&mut rng);
                mi = mi.max(i);
                md = md.max(d);
            }
            (mi, md)
        },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltConfig {
    pub target: Target,
    pub replications: usize,
    pub seed: u64,
    /// Corner coordinates of the rectangle family, shared by both axes.
    pub grid: Vec<f64>,
}

impl CltConfig {
    pub fn new(target: impl Into<Target>, replications: usize, seed: u64) -> Self {
        CltConfig {
            target: target.into(),
            replications,
            seed,
            grid: DEFAULT_CLT_GRID.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltDistances {
    /// Continuity-corrected marginal KS distances against Φ.
    pub ks_inv: f64,
    pub ks_des: f64,
    /// Rectangle distance against the product normal `Φ ⊗ Φ`.
    pub rect_sup: f64,
    /// Rectangle distance against the bivariate normal with correlation `ρ_n`.
    pub rect_sup_bvn: f64,
    /// The same without continuity correction.
    pub ks_inv_raw: f64,
    pub ks_des_raw: f64,
    pub rect_sup_raw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub config: CltConfig,
    pub moments_used: MomentsUsed,
    pub distances: CltDistances,
    /// Empirical `Corr(X_inv, X_des)`.
    pub correlation: f64,
    pub seed: u64,
    pub elapsed_ms: u64,
    pub warnings: Vec<String>,
}

fn validate(replications: usize, grid: &[f64]) -> Result<()> {
    if replications == 0 {
        return Err(Error::Domain("replications must be at least 1".into()));
    }
    if grid.is_empty() || grid.iter().any(|g| !g.is_finite()) {
        return Err(Error::Domain(
            "grid must be a nonempty list of finite numbers".into(),
        ));
    }
    Ok(())
}

pub fn run_clt(config: &CltConfig) -> Result<CltReport> {
    validate(config.replications, &config.grid)?;
    let timer = Timer::start();
    let mu = MomentsUsed::of(&config.target)?;
    let pairs = draw_pairs(&config.target, config.replications, config.seed);
    let (inv, des): (Vec<u64>, Vec<u64>) = pairs.into_iter().unzip();
    let yi = |v: u64| (v as f64 - mu.mean_inv) / mu.sd_inv;
    let yd = |v: u64| (v as f64 - mu.mean_des) / mu.sd_des;
    let (hi, hd) = (1.0 / mu.sd_inv, 1.0 / mu.sd_des);
    let li = Lattice::from_integers(&inv, yi, hi);
    let ld = Lattice::from_integers(&des, yd, hd);
    let xs: Vec<f64> = inv.iter().map(|&v| yi(v)).collect();
    let ys: Vec<f64> = des.iter().map(|&v| yd(v)).collect();
    let g = &config.grid;
    let product = |x: f64, y: f64| std_normal_cdf(x) * std_normal_cdf(y);
    let rho = mu.rho_n;
    let bvn = |x: f64, y: f64| bvn_cdf(x, y, rho);
    let rects = |h1: f64, h2: f64, reference: &dyn Fn(f64, f64) -> f64| {
        let joint = joint_cdf_grid(&xs, h1, &ys, h2, g, g);
        rect_sup(
            &joint,
            &marginal_cdf_grid(&xs, h1, g),
            &marginal_cdf_grid(&ys, h2, g),
            g,
            g,
            reference,
        )
    };
    let distances = CltDistances {
        ks_inv: ks_sup(&li, &std_normal_cdf, 0.0),
        ks_des: ks_sup(&ld, &std_normal_cdf, 0.0),
        rect_sup: rects(hi, hd, &product),
        rect_sup_bvn: rects(hi, hd, &bvn),
        ks_inv_raw: ks_sup(&li.raw(), &std_normal_cdf, 0.0),
        ks_des_raw: ks_sup(&ld.raw(), &std_normal_cdf, 0.0),
        rect_sup_raw: rects(0.0, 0.0, &product),
    };
    Ok(CltReport {
        correlation: pearson(&xs, &ys),
        warnings: target_warnings(&config.target),
        config: config.clone(),
        moments_used: mu,
        distances,
        seed: config.seed,
        elapsed_ms: timer.ms(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvltConfig {
    pub target: Target,
    /// Draws per maximum.
    pub k: usize,
    pub replications: usize,
    pub seed: u64,
    pub grid: Vec<f64>,
    /// Replace group draws by exact Gumbel draws (sanity path).
    #[serde(default)]
    pub self_test: bool,
}

impl EvltConfig {
    pub fn new(target: impl Into<Target>, k: usize, replications: usize, seed: u64) -> Self {
        EvltConfig {
            target: target.into(),
            k,
            replications,
            seed,
            grid: DEFAULT_EVLT_GRID.to_vec(),
            self_test: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvltDistances {
    /// Grid sup of |Ĝ(x, y) − Λ(x)Λ(y)| for the rescaled maxima.
    pub gumbel_joint_sup: f64,
    /// Marginal sup distances to Λ.
    pub ks_inv: f64,
    pub ks_des: f64,
    pub gumbel_joint_sup_raw: f64,
    /// Grid sup against the finite-k law of maxima of k iid normals.
    pub gaussian_max_joint_sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvltReport {
    pub config: EvltConfig,
    pub moments_used: MomentsUsed,
    pub alpha: f64,
    pub distances: EvltDistances,
    /// Empirical correlation of the two rescaled maxima.
    pub correlation: f64,
    pub seed: u64,
    pub elapsed_ms: u64,
    pub warnings: Vec<String>,
}

fn gumbel_draw<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    -(-u.ln()).ln()
}

/// Maxima are standardized with the exact moments and rescaled to
/// `α_k (M − α_k)`. The lattice spacing becomes `α_k/σ`.
pub fn run_evlt(config: &EvltConfig) -> Result<EvltReport> {
    validate(config.replications, &config.grid)?;
    let k = config.k;
    let alpha = gumbel_alpha(k)?;
    let timer = Timer::start();
    let mu = MomentsUsed::of(&config.target)?;
    let mut warnings = target_warnings(&config.target);
    if violates_schedule(k, config.target.total_rank()) {
        warnings.push(SCHEDULE_VIOLATION.into());
    }
    let (xs, ys, hi, hd): (Vec<f64>, Vec<f64>, f64, f64) = if config.self_test {
        let pairs: Vec<(f64, f64)> = fill(
            config.replications,
            || (),
            |_, j| {
                let mut rng = RngStream::new(config.seed, j as u64).rng();
                (gumbel_draw(&mut rng), gumbel_draw(&mut rng))
            },
        );
        let (a, b) = pairs.into_iter().unzip();
        (a, b, 0.0, 0.0)
    } else {
        let maxima = draw_maxima(&config.target, k, config.replications, config.seed);
        let si = |v: u64| alpha * ((v as f64 - mu.mean_inv) / mu.sd_inv - alpha);
        let sd = |v: u64| alpha * ((v as f64 - mu.mean_des) / mu.sd_des - alpha);
        (
            maxima.iter().map(|m| si(m.0)).collect(),
            maxima.iter().map(|m| sd(m.1)).collect(),
            alpha / mu.sd_inv,
            alpha / mu.sd_des,
        )
    };
    let marginal = |v: &[f64], h: f64| {
        let mut lat = Lattice::from_reals(v);
        lat.h = h;
        ks_sup(&lat, &gumbel_cdf, 0.0)
    };
    let g = &config.grid;
    let lambda2 = |x: f64, y: f64| gumbel_cdf(x) * gumbel_cdf(y);
    let gmax = |x: f64, y: f64| gaussian_max_cdf(k, alpha, x) * gaussian_max_cdf(k, alpha, y);
    let joint = joint_cdf_grid(&xs, hi, &ys, hd, g, g);
    let distances = EvltDistances {
        gumbel_joint_sup: grid_sup(&joint, g, g, &lambda2),
        ks_inv: marginal(&xs, hi),
        ks_des: marginal(&ys, hd),
        gumbel_joint_sup_raw: grid_sup(&joint_cdf_grid(&xs, 0.0, &ys, 0.0, g, g), g, g, &lambda2),
        gaussian_max_joint_sup: grid_sup(&joint, g, g, &gmax),
    };
    Ok(EvltReport {
        correlation: pearson(&xs, &ys),
        config: config.clone(),
        moments_used: mu,
        alpha,
        distances,
        seed: config.seed,
        elapsed_ms: timer.ms(),
        warnings,
    })
}

/// How well `X̂_inv` approximates `X_inv`, from paired latent draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HajekQuality {
    pub spec: GroupSpec,
    pub replications: usize,
    pub seed: u64,
    /// `1 − Var(X̂_inv)/Var(X_inv)`, exact.
    #[serde(with = "serde_str")]
    pub ratio_bound: BigRational,
    /// Mean of `(X − X̂)²/Var(X_inv)`; estimates `ratio_bound`.
    pub empirical_msd: f64,
    pub empirical_msd_se: f64,
    /// Mean of `(X̂ − EX)(X − X̂)`; estimates `Cov(X, X̂) − Var(X̂) = 0`.
    pub projection_gap: f64,
    pub projection_gap_se: f64,
    pub elapsed_ms: u64,
}

#[derive(Default)]
struct LatentScratch {
    order: Vec<usize>,
    ranked: Vec<i32>,
    fw: Fenwick,
}

/// `(X_inv, X̂_inv)` for one latent draw. `X_inv` is counted on the ranked
/// element; for D the count does not depend on the sign at position 1, so
/// no correction is needed.
fn paired_draw(spec: &GroupSpec, s: &mut LatentScratch, stream: RngStream) -> (f64, f64) {
    let z = sample_latent(spec, &mut stream.rng());
    let v = z.values();
    s.ranked.resize(v.len(), 0);
    rank_into(v, spec.family(), &mut s.order, &mut s.ranked);
    let (p, m, c) = inversion_parts(&s.ranked, &mut s.fw);
    let inv = match spec.family() {
        GroupFamily::S => p,
        GroupFamily::B => p + m + c,
        GroupFamily::D => p + m,
    };
    (inv as f64, hajek_inv_raw(v, spec.family(), spec.p()))
}

/// Paired `(X_inv, X̂_inv)` draws, replicate `j` on stream `j`.
pub fn draw_hajek_pairs(spec: &GroupSpec, replications: usize, seed: u64) -> Vec<(f64, f64)> {
    fill(replications, LatentScratch::default, |s, j| {
        paired_draw(spec, s, RngStream::new(seed, j as u64))
    })
}

fn mean_se(v: impl Iterator<Item = f64> + Clone, r: usize) -> (f64, f64) {
    let n = r as f64;
    let m = v.clone().sum::<f64>() / n;
    let var = v.map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, (var / n).sqrt())
}

pub fn hajek_quality(spec: &GroupSpec, replications: usize, seed: u64) -> Result<HajekQuality> {
    if replications < 2 {
        return Err(Error::Domain(
            "hajek_quality needs at least 2 replications".into(),
        ));
    }
    let timer = Timer::start();
    let m = moment_set(spec);
    if m.var_inv == BigRational::from_integer(0.into()) {
        return Err(Error::InvalidSpec(format!("{spec}: Var(X_inv) = 0")));
    }
    let var = to_f64(&m.var_inv);
    let mean = to_f64(&m.mean_inv);
    let pairs = draw_hajek_pairs(spec, replications, seed);
    let (msd, msd_se) = mean_se(
        pairs.iter().map(|(x, h)| (x - h) * (x - h) / var),
        replications,
    );
    let (gap, gap_se) = mean_se(
        pairs.iter().map(|(x, h)| (h - mean) * (x - h)),
        replications,
    );
    Ok(HajekQuality {
        spec: spec.clone(),
        replications,
        seed,
        ratio_bound: hajek_ratio_bound(&m),
        empirical_msd: msd,
        empirical_msd_se: msd_se,
        projection_gap: gap,
        projection_gap_se: gap_se,
        elapsed_ms: timer.ms(),
    })
}
