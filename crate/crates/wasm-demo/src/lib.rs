//! wasm-bindgen bindings for the static demo page in `www/`.
//!
//! Every export takes plain arguments and returns a JSON string. The
//! `*_json` functions hold the logic so they can be tested natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;
use weylstat::experiment::{
    draw_maxima, draw_pairs, run_clt, run_evlt, CltConfig, CltDistances, EvltConfig, EvltDistances,
};
use weylstat::limits::{gumbel_alpha, std_normal_pdf};
use weylstat::moments::product_moments;
use weylstat::oracle::{exact_joint_pmf, exact_product_pmf, Budget};
use weylstat::rational::to_f64;
use weylstat::{MomentSet, ProductGroupSpec, Target};

/// Replications are capped so a click stays interactive.
pub const MAX_REPLICATIONS: usize = 200_000;

fn target(s: &str) -> Result<Target, String> {
    s.parse().map_err(|e: weylstat::Error| e.to_string())
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

fn check_reps(r: usize) -> Result<(), String> {
    if r == 0 || r > MAX_REPLICATIONS {
        return Err(format!("replications must be in 1..={MAX_REPLICATIONS}"));
    }
    Ok(())
}

#[derive(Serialize)]
struct Cell {
    inv: u64,
    des: u64,
    prob: String,
    value: f64,
}

#[derive(Serialize)]
struct PmfView {
    target: String,
    max_inv: u64,
    max_des: u64,
    cells: Vec<Cell>,
    moments: MomentSet,
}

pub fn joint_pmf_json(group: &str) -> Result<String, String> {
    let t = target(group)?;
    let budget = Budget::default();
    let pmf = match &t {
        Target::Group(g) => exact_joint_pmf(g, &budget),
        Target::Product(p) => exact_product_pmf(p, &budget),
    }
    .map_err(|e| e.to_string())?;
    let comps = t.components();
    to_json(&PmfView {
        target: t.to_string(),
        max_inv: comps.iter().map(|c| c.max_inv()).sum(),
        max_des: comps.iter().map(|c| c.max_des()).sum(),
        cells: pmf
            .cells
            .iter()
            .map(|c| Cell {
                inv: c.inv,
                des: c.des,
                prob: c.prob.to_string(),
                value: to_f64(&c.prob),
            })
            .collect(),
        moments: product_moments(
            &ProductGroupSpec::new(comps.to_vec()).map_err(|e| e.to_string())?,
        ),
    })
}

#[derive(Serialize)]
struct Histogram {
    lo: f64,
    hi: f64,
    /// Fraction of samples per bin divided by bin width.
    density: Vec<f64>,
    /// Reference density at bin centers.
    reference: Vec<f64>,
}

impl Histogram {
    fn new(values: &[f64], lo: f64, hi: f64, bins: usize, reference: impl Fn(f64) -> f64) -> Self {
        let w = (hi - lo) / bins as f64;
        let mut counts = vec![0u64; bins];
        for &v in values {
            if v >= lo && v < hi {
                counts[((v - lo) / w) as usize] += 1;
            }
        }
        let n = values.len().max(1) as f64;
        Histogram {
            lo,
            hi,
            density: counts.iter().map(|&c| c as f64 / n / w).collect(),
            reference: (0..bins)
                .map(|i| reference(lo + (i as f64 + 0.5) * w))
                .collect(),
        }
    }
}

#[derive(Serialize)]
struct CltView {
    target: String,
    inv: Histogram,
    des: Histogram,
    distances: CltDistances,
    correlation: f64,
}

pub fn clt_histogram_json(
    group: &str,
    replications: usize,
    seed: u64,
    bins: usize,
) -> Result<String, String> {
    check_reps(replications)?;
    let t = target(group)?;
    let bins = bins.clamp(5, 200);
    let r = run_clt(&CltConfig::new(t.clone(), replications, seed)).map_err(|e| e.to_string())?;
    let mu = &r.moments_used;
    let pairs = draw_pairs(&t, replications, seed);
    let yi: Vec<f64> = pairs
        .iter()
        .map(|p| (p.0 as f64 - mu.mean_inv) / mu.sd_inv)
        .collect();
    let yd: Vec<f64> = pairs
        .iter()
        .map(|p| (p.1 as f64 - mu.mean_des) / mu.sd_des)
        .collect();
    to_json(&CltView {
        target: t.to_string(),
        inv: Histogram::new(&yi, -4.0, 4.0, bins, std_normal_pdf),
        des: Histogram::new(&yd, -4.0, 4.0, bins, std_normal_pdf),
        distances: r.distances,
        correlation: r.correlation,
    })
}

#[derive(Serialize)]
struct EvltView {
    target: String,
    k: usize,
    alpha: f64,
    inv: Histogram,
    des: Histogram,
    distances: EvltDistances,
    correlation: f64,
    warnings: Vec<String>,
}

fn gumbel_pdf(x: f64) -> f64 {
    (-x - (-x).exp()).exp()
}

pub fn gumbel_maxima_json(
    group: &str,
    k: usize,
    replications: usize,
    seed: u64,
    bins: usize,
) -> Result<String, String> {
    check_reps(replications)?;
    let t = target(group)?;
    let bins = bins.clamp(5, 200);
    let alpha = gumbel_alpha(k).map_err(|e| e.to_string())?;
    let r =
        run_evlt(&EvltConfig::new(t.clone(), k, replications, seed)).map_err(|e| e.to_string())?;
    let mu = &r.moments_used;
    let maxima = draw_maxima(&t, k, replications, seed);
    let scale = |v: u64, m: f64, s: f64| alpha * ((v as f64 - m) / s - alpha);
    let mi: Vec<f64> = maxima
        .iter()
        .map(|m| scale(m.0, mu.mean_inv, mu.sd_inv))
        .collect();
    let md: Vec<f64> = maxima
        .iter()
        .map(|m| scale(m.1, mu.mean_des, mu.sd_des))
        .collect();
    to_json(&EvltView {
        target: t.to_string(),
        k,
        alpha,
        inv: Histogram::new(&mi, -3.0, 6.0, bins, gumbel_pdf),
        des: Histogram::new(&md, -3.0, 6.0, bins, gumbel_pdf),
        distances: r.distances,
        correlation: r.correlation,
        warnings: r.warnings,
    })
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

/// Exact joint pmf of (inv, des) for a small group, e.g. `"B:3:1/4"`.
#[wasm_bindgen]
pub fn joint_pmf(group: &str) -> Result<String, JsValue> {
    js(joint_pmf_json(group))
}

/// Histograms of the standardized statistics against the normal density.
#[wasm_bindgen]
pub fn clt_histogram(
    group: &str,
    replications: usize,
    seed: u32,
    bins: usize,
) -> Result<String, JsValue> {
    js(clt_histogram_json(group, replications, seed as u64, bins))
}

/// Histograms of rescaled block maxima against the Gumbel density.
#[wasm_bindgen]
pub fn gumbel_maxima(
    group: &str,
    k: usize,
    replications: usize,
    seed: u32,
    bins: usize,
) -> Result<String, JsValue> {
    js(gumbel_maxima_json(
        group,
        k,
        replications,
        seed as u64,
        bins,
    ))
}
