use serde::Serialize;
use weylstat::experiment::{hajek_quality, run_clt, run_evlt, CltConfig, EvltConfig};
use weylstat::limits::schedule_k;
use weylstat::moments::{hajek_ratio_bound, moment_set, product_moments};
use weylstat::oracle::{
    enumerate_elements, enumerate_product_elements, exact_joint_pmf, exact_moments,
    exact_product_pmf, generating_polynomial, Budget, ExactMoments, JointPmf,
};
use weylstat::report::{elements_csv, pmf_csv, GenPolyReport};
use weylstat::sampler::{sample_group_element, sample_product_element};
use weylstat::stats::{joint_statistics, product_statistics};
use weylstat::{JointStat, MomentSet, RngStream, Target};

use crate::config::{Command, Format, RunConfig, What};
use crate::CliError;

pub struct Output {
    pub body: String,
    pub warnings: Vec<String>,
}

fn json<T: Serialize>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn json_only(c: &RunConfig) -> Result<(), CliError> {
    match c.output_format() {
        Format::Json => Ok(()),
        Format::Csv => Err(CliError::Config(format!(
            "{:?} output is JSON only",
            c.command
        ))),
    }
}

#[derive(Serialize)]
struct SampledElement<E> {
    element: E,
    #[serde(flatten)]
    stats: JointStat,
}

#[derive(Serialize)]
struct SampleOut<E> {
    target: Target,
    seed: u64,
    elements: Vec<SampledElement<E>>,
}

#[derive(Serialize)]
struct MomentsOut<'a> {
    target: Target,
    #[serde(flatten)]
    moments: &'a MomentSet,
    /// 1 − Var(X̂_inv)/Var(X_inv).
    ratio_bound: String,
    correlation: f64,
}

#[derive(Serialize)]
struct WeightedElement<E> {
    element: E,
    inv: u64,
    des: u64,
    weight: String,
}

#[derive(Serialize)]
struct ExactMomentsOut<T> {
    target: Target,
    #[serde(flatten)]
    moments: T,
}

fn moments_out(target: Target, m: &MomentSet) -> Result<String, CliError> {
    json(&MomentsOut {
        target,
        moments: m,
        ratio_bound: hajek_ratio_bound(m).to_string(),
        correlation: m.correlation(),
    })
}

fn pmf_out(c: &RunConfig, pmf: &JointPmf) -> Result<String, CliError> {
    match c.output_format() {
        Format::Csv => Ok(pmf_csv(pmf)),
        Format::Json => json(pmf),
    }
}

fn plain_moments(target: Target, m: ExactMoments) -> Result<String, CliError> {
    json(&ExactMomentsOut { target, moments: m })
}

pub fn dispatch(c: &RunConfig) -> Result<Output, CliError> {
    let budget = Budget::default();
    let mut warnings = Vec::new();
    let body = if c.command.is_product() {
        let spec = c.product_spec()?;
        let target = Target::Product(spec.clone());
        match c.command {
            Command::ProductSample => {
                json_only(c)?;
                let elements = (0..c.count.unwrap_or(10) as u64)
                    .map(|j| {
                        let parts = sample_product_element(&spec, &RngStream::new(c.seed, j));
                        let stats = product_statistics(&parts, &spec)?;
                        Ok(SampledElement {
                            element: parts,
                            stats,
                        })
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                json(&SampleOut {
                    target,
                    seed: c.seed,
                    elements,
                })?
            }
            Command::ProductMoments => {
                json_only(c)?;
                moments_out(target, &product_moments(&spec))?
            }
            Command::ProductEnumerate => match c.what {
                What::Elements => {
                    let rows = enumerate_product_elements(&spec, &budget)?;
                    let rows: Vec<_> = rows
                        .into_iter()
                        .map(|(parts, w)| {
                            let st = product_statistics(&parts, &spec)?;
                            Ok(WeightedElement {
                                element: parts,
                                inv: st.inv,
                                des: st.des,
                                weight: w.to_string(),
                            })
                        })
                        .collect::<Result<_, CliError>>()?;
                    match c.output_format() {
                        Format::Json => json(&rows)?,
                        Format::Csv => {
                            let mut s = String::from("element,inv,des,weight\n");
                            for r in rows {
                                let e: Vec<String> = r
                                    .element
                                    .iter()
                                    .map(|p| {
                                        p.entries()
                                            .iter()
                                            .map(i32::to_string)
                                            .collect::<Vec<_>>()
                                            .join(" ")
                                    })
                                    .collect();
                                s.push_str(&format!(
                                    "{},{},{},{}\n",
                                    e.join(" | "),
                                    r.inv,
                                    r.des,
                                    r.weight
                                ));
                            }
                            s
                        }
                    }
                }
                What::Pmf => pmf_out(c, &exact_product_pmf(&spec, &budget)?)?,
                What::Moments => {
                    json_only(c)?;
                    plain_moments(target, exact_product_pmf(&spec, &budget)?.moments())?
                }
                What::Genpoly => {
                    json_only(c)?;
                    let g = generating_polynomial(&exact_product_pmf(&spec, &budget)?);
                    json(&GenPolyReport::new(target, &g))?
                }
            },
            Command::ProductClt => {
                json_only(c)?;
                clt(c, target, &mut warnings)?
            }
            Command::ProductEvlt => {
                json_only(c)?;
                evlt(c, target, &mut warnings)?
            }
            _ => unreachable!(),
        }
    } else {
        let exact = matches!(c.command, Command::Moments | Command::Enumerate);
        let (spec, w) = c.group_spec(exact)?;
        warnings.extend(w);
        let target = Target::Group(spec.clone());
        match c.command {
            Command::Sample => {
                json_only(c)?;
                let elements = (0..c.count.unwrap_or(10) as u64)
                    .map(|j| {
                        let e = sample_group_element(&spec, &mut RngStream::new(c.seed, j).rng());
                        let stats = joint_statistics(&e, spec.family())?;
                        Ok(SampledElement { element: e, stats })
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                json(&SampleOut {
                    target,
                    seed: c.seed,
                    elements,
                })?
            }
            Command::Moments => {
                json_only(c)?;
                moments_out(target, &moment_set(&spec))?
            }
            Command::Enumerate => match c.what {
                What::Elements => {
                    let rows = enumerate_elements(&spec, &budget)?;
                    match c.output_format() {
                        Format::Csv => elements_csv(&target, &rows),
                        Format::Json => {
                            let rows: Vec<_> = rows
                                .into_iter()
                                .map(|(e, w)| {
                                    let st = joint_statistics(&e, spec.family())?;
                                    Ok(WeightedElement {
                                        element: e,
                                        inv: st.inv,
                                        des: st.des,
                                        weight: w.to_string(),
                                    })
                                })
                                .collect::<Result<_, CliError>>()?;
                            json(&rows)?
                        }
                    }
                }
                What::Pmf => pmf_out(c, &exact_joint_pmf(&spec, &budget)?)?,
                What::Moments => {
                    json_only(c)?;
                    json(&ExactMomentsOut {
                        target,
                        moments: exact_moments(&spec, &budget)?,
                    })?
                }
                What::Genpoly => {
                    json_only(c)?;
                    let g = generating_polynomial(&exact_joint_pmf(&spec, &budget)?);
                    json(&GenPolyReport::new(target, &g))?
                }
            },
            Command::Clt => {
                json_only(c)?;
                clt(c, target, &mut warnings)?
            }
            Command::Evlt => {
                json_only(c)?;
                evlt(c, target, &mut warnings)?
            }
            Command::Hajek => {
                json_only(c)?;
                json(&hajek_quality(&spec, c.replications()?, c.seed)?)?
            }
            _ => unreachable!(),
        }
    };
    Ok(Output { body, warnings })
}

fn clt(c: &RunConfig, target: Target, warnings: &mut Vec<String>) -> Result<String, CliError> {
    let mut cfg = CltConfig::new(target, c.replications()?, c.seed);
    if let Some(g) = &c.grid {
        cfg.grid = g.clone();
    }
    let mut r = run_clt(&cfg)?;
    r.warnings.extend(warnings.iter().cloned());
    warnings.extend(
        r.warnings
            .iter()
            .filter(|w| !warnings.contains(w))
            .cloned()
            .collect::<Vec<_>>(),
    );
    json(&r)
}

fn evlt(c: &RunConfig, target: Target, warnings: &mut Vec<String>) -> Result<String, CliError> {
    let k = match c.k {
        Some(k) => k,
        None => schedule_k(target.total_rank())?,
    };
    let mut cfg = EvltConfig::new(target, k, c.replications()?, c.seed);
    cfg.self_test = c.self_test;
    if let Some(g) = &c.grid {
        cfg.grid = g.clone();
    }
    let mut r = run_evlt(&cfg)?;
    r.warnings.extend(warnings.iter().cloned());
    warnings.extend(
        r.warnings
            .iter()
            .filter(|w| !warnings.contains(w))
            .cloned()
            .collect::<Vec<_>>(),
    );
    json(&r)
}
