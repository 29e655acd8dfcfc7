use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use weylstat::rational::{parse_rational, Notation};
use weylstat::{GroupFamily, GroupSpec, ProductGroupSpec};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Sample,
    Moments,
    Enumerate,
    Clt,
    Evlt,
    Hajek,
    ProductSample,
    ProductMoments,
    ProductEnumerate,
    ProductClt,
    ProductEvlt,
}

impl Command {
    pub fn is_product(self) -> bool {
        matches!(
            self,
            Command::ProductSample
                | Command::ProductMoments
                | Command::ProductEnumerate
                | Command::ProductClt
                | Command::ProductEvlt
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum What {
    #[default]
    Elements,
    Pmf,
    Moments,
    Genpoly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Everything a subcommand needs. Flags and `run --config` files both
/// produce one of these.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    /// `"B:5:1/2"`, or a comma-separated product for `product-*`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Rational string. A decimal is accepted on Monte Carlo paths only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<String>,
    #[serde(default, rename = "R", skip_serializing_if = "Option::is_none")]
    pub replications: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default)]
    pub what: What,
    #[serde(default)]
    pub self_test: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            group: None,
            family: None,
            n: None,
            p: None,
            replications: None,
            k: None,
            seed: 0,
            grid: None,
            count: None,
            what: What::default(),
            self_test: false,
            out: None,
            format: None,
            threads: None,
        }
    }

    /// Resolves the single-group target. `exact` forbids decimal biases.
    pub fn group_spec(&self, exact: bool) -> Result<(GroupSpec, Vec<String>), CliError> {
        if let Some(g) = &self.group {
            if self.family.is_some() || self.n.is_some() || self.p.is_some() {
                return Err(CliError::Config(
                    "give either --group or --family/--n/--p, not both".into(),
                ));
            }
            if g.contains(',') {
                return Err(CliError::Config(format!(
                    "`{g}` is a product; use a product-* subcommand"
                )));
            }
            return Ok((g.parse()?, Vec::new()));
        }
        let family: GroupFamily = self
            .family
            .as_deref()
            .ok_or_else(|| CliError::Config("missing --family (or --group)".into()))?
            .parse()?;
        let n = self
            .n
            .ok_or_else(|| CliError::Config("missing --n".into()))?;
        let mut warnings = Vec::new();
        let bias = match (&self.p, family) {
            (None, GroupFamily::S) => weylstat::rational::int(0),
            (None, _) => {
                return Err(CliError::Config(format!(
                    "--p is required for family {family}"
                )))
            }
            (Some(p), _) => {
                let (r, notation) = parse_rational(p)?;
                if notation == Notation::Float {
                    if exact {
                        return Err(CliError::Config(format!(
                            "p = {p}: exact paths need a rational such as 1/4, not a decimal"
                        )));
                    }
                    warnings.push(format!("float-bias: p = {p} read as the binary value {r}"));
                }
                r
            }
        };
        Ok((GroupSpec::new(family, n, bias)?, warnings))
    }

    pub fn product_spec(&self) -> Result<ProductGroupSpec, CliError> {
        if self.family.is_some() || self.n.is_some() || self.p.is_some() {
            return Err(CliError::Config(
                "product-* subcommands take --group only".into(),
            ));
        }
        let g = self
            .group
            .as_deref()
            .ok_or_else(|| CliError::Config("missing --group".into()))?;
        Ok(g.parse()?)
    }

    pub fn replications(&self) -> Result<usize, CliError> {
        match self.replications {
            Some(0) => Err(CliError::Config("--R must be at least 1".into())),
            Some(r) => Ok(r),
            None => Err(CliError::Config("missing --R".into())),
        }
    }

    /// Explicit `format` wins, then the output extension, then JSON.
    pub fn output_format(&self) -> Format {
        self.format.unwrap_or_else(|| match &self.out {
            Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => Format::Csv,
            _ => Format::Json,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_json() {
        let c: RunConfig =
            serde_json::from_str(r#"{"command":"clt","group":"S:50","R":100,"seed":3}"#).unwrap();
        assert_eq!(c.command, Command::Clt);
        assert_eq!(c.replications, Some(100));
        assert_eq!(c.what, What::Elements);
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_unknown_fields() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"command":"clt","reps":3}"#).is_err());
    }

    #[test]
    fn float_bias_only_on_mc_paths() {
        let mut c = RunConfig::new(Command::Clt);
        c.family = Some("B".into());
        c.n = Some(4);
        c.p = Some("0.25".into());
        assert!(c.group_spec(true).is_err());
        let (spec, w) = c.group_spec(false).unwrap();
        assert_eq!(spec.to_string(), "B:4:1/4");
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn csv_from_extension() {
        let mut c = RunConfig::new(Command::Enumerate);
        c.out = Some("pmf.CSV".into());
        assert_eq!(c.output_format(), Format::Csv);
        c.format = Some(Format::Json);
        assert_eq!(c.output_format(), Format::Json);
    }
}
