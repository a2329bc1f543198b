//! Declarative suite files.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::diffops::{Backend, Intertwining, SineMode};
use crate::error::{Error, Result};
use crate::transforms::PairingKind;

/// Seed used when neither the suite file nor the caller provides one.
pub const DEFAULT_SEED: u64 = 20_240_917;

/// Environment variable that overrides the suite seed.
pub const SEED_ENV: &str = "STIEFEL_SEED";

/// Experiment tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tag {
    SiegelGamma,
    Bernstein,
    MassCosine,
    MassSine,
    IdentitySylvester,
    IdentityCosBasis,
    IdentityCosInvariance,
    IdentityAkm,
    IdentityRadonPp,
    Duality,
    IntermediateEquivalence,
    OrderReductionCosine,
    OrderReductionSine,
    InvertLocalSphere,
    ReconstructLocal,
    Intertwining,
    ReconstructSine,
    InvertNonlocal,
    BridgeSineIntermediate,
}

impl Tag {
    pub const ALL: [Tag; 19] = [
        Tag::SiegelGamma,
        Tag::Bernstein,
        Tag::MassCosine,
        Tag::MassSine,
        Tag::IdentitySylvester,
        Tag::IdentityCosBasis,
        Tag::IdentityCosInvariance,
        Tag::IdentityAkm,
        Tag::IdentityRadonPp,
        Tag::Duality,
        Tag::IntermediateEquivalence,
        Tag::OrderReductionCosine,
        Tag::OrderReductionSine,
        Tag::InvertLocalSphere,
        Tag::ReconstructLocal,
        Tag::Intertwining,
        Tag::ReconstructSine,
        Tag::InvertNonlocal,
        Tag::BridgeSineIntermediate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Tag::SiegelGamma => "siegel-gamma",
            Tag::Bernstein => "bernstein",
            Tag::MassCosine => "mass-cosine",
            Tag::MassSine => "mass-sine",
            Tag::IdentitySylvester => "identity-sylvester",
            Tag::IdentityCosBasis => "identity-cos-basis",
            Tag::IdentityCosInvariance => "identity-cos-invariance",
            Tag::IdentityAkm => "identity-akm",
            Tag::IdentityRadonPp => "identity-radon-pp",
            Tag::Duality => "duality",
            Tag::IntermediateEquivalence => "intermediate-equivalence",
            Tag::OrderReductionCosine => "order-reduction-cosine",
            Tag::OrderReductionSine => "order-reduction-sine",
            Tag::InvertLocalSphere => "invert-local-sphere",
            Tag::ReconstructLocal => "reconstruct-local",
            Tag::Intertwining => "intertwining",
            Tag::ReconstructSine => "reconstruct-sine",
            Tag::InvertNonlocal => "invert-nonlocal",
            Tag::BridgeSineIntermediate => "bridge-sine-intermediate",
        }
    }

    /// Fields that must be present in the spec.
    pub fn required(self) -> &'static [&'static str] {
        match self {
            Tag::SiegelGamma => &[],
            Tag::Bernstein => &["n", "m", "ell"],
            Tag::MassCosine => &["n", "m", "k", "lambda|lambdas", "samples"],
            Tag::MassSine => &["n", "m", "lambda|lambdas", "samples"],
            Tag::IdentitySylvester | Tag::IdentityRadonPp => &["n", "m"],
            Tag::IdentityCosBasis | Tag::IdentityCosInvariance | Tag::IdentityAkm => &["n", "m", "k"],
            Tag::Duality => &["n", "m", "k", "transform", "samples"],
            Tag::IntermediateEquivalence => &["n", "m", "k", "j", "samples", "inner"],
            Tag::OrderReductionCosine => &["n", "m", "k", "lambda", "ell", "samples"],
            Tag::OrderReductionSine => &["n", "m", "lambda", "ell", "samples"],
            Tag::InvertLocalSphere => &["n"],
            Tag::ReconstructLocal => &["n", "m", "k", "j", "samples"],
            Tag::Intertwining => &["n", "m", "order", "samples"],
            Tag::ReconstructSine => &["n", "m", "ell", "samples"],
            Tag::InvertNonlocal => &["n", "m", "k", "samples"],
            Tag::BridgeSineIntermediate => &["n", "m", "k", "j", "samples"],
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Tag::SiegelGamma => "Siegel gamma special value, recursion and pole set",
            Tag::Bernstein => "Bernstein identity for powers of the Cayley-Laplace operator, jets and finite differences",
            Tag::MassCosine => "Monte Carlo mass of the cosine kernel against the closed form",
            Tag::MassSine => "Monte Carlo mass of the sine kernel against the closed form",
            Tag::IdentitySylvester => "sine metric equals squared cosine metric of the complement",
            Tag::IdentityCosBasis => "|Cos| does not depend on the bases of the two frames",
            Tag::IdentityCosInvariance => "|Cos| is invariant under a common rotation",
            Tag::IdentityAkm => "A_{k,m} is the identity at k = m",
            Tag::IdentityRadonPp => "the Radon transform R_{p,p} is the identity",
            Tag::Duality => "<T f, phi> = <f, T* phi> from independent estimates of both sides",
            Tag::IntermediateEquivalence => "intermediate Funk transform on frames vs its Grassmannian composition",
            Tag::OrderReductionCosine => "kernel-differentiated dual cosine transform vs direct estimate",
            Tag::OrderReductionSine => "kernel-differentiated sine transform vs direct estimate",
            Tag::InvertLocalSphere => "exact multiplier chain of the local inversion on S^3",
            Tag::ReconstructLocal => "numerical local inversion through F*^{(j)} F^{(j)}",
            Tag::Intertwining => "intertwining inversion in either factor order",
            Tag::ReconstructSine => "reconstruction f = S^{m-n} f by order reduction",
            Tag::InvertNonlocal => "nonlocal inversion through F*^{(1)} F",
            Tag::BridgeSineIntermediate => "sine transform at j-k vs delta_j F*^{(j)} F",
        }
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Tag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Tag::ALL
            .into_iter()
            .find(|t| t.as_str() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown experiment tag '{s}'")))
    }
}

/// Pass iff `|observed - expected| <= max(sigma_multiplier · σ, relative_cap · |expected|, absolute)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerance {
    pub sigma_multiplier: f64,
    pub relative_cap: f64,
    pub absolute: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { sigma_multiplier: 4.0, relative_cap: 0.05, absolute: 0.0 }
    }
}

impl Tolerance {
    /// Only an absolute bound; for deterministic error metrics.
    pub fn absolute(bound: f64) -> Self {
        Self { sigma_multiplier: 0.0, relative_cap: 0.0, absolute: bound }
    }

    pub fn bound(&self, expected: f64, stderr: f64) -> f64 {
        (self.sigma_multiplier * stderr).max(self.relative_cap * expected.abs()).max(self.absolute)
    }
}

/// One experiment. Which fields are used depends on the tag, see [`Tag::required`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub tag: Tag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// λ sweep; each value becomes one check and one CSV row.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    /// Harmonic degrees for the exact sphere chain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<u32>>,
    /// Catalog key of `f`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    /// Catalog key of `φ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<Tolerance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backend: Option<Backend>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<SineMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Intertwining>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<PairingKind>,
}

impl ExperimentSpec {
    /// A spec with only a name and a tag.
    pub fn new(name: impl Into<String>, tag: Tag) -> Self {
        Self {
            name: name.into(),
            tag,
            n: None,
            m: None,
            k: None,
            j: None,
            ell: None,
            lambda: None,
            lambdas: None,
            degrees: None,
            f: None,
            phi: None,
            samples: None,
            inner: None,
            points: None,
            seed: None,
            tolerance: None,
            backend: None,
            mode: None,
            order: None,
            transform: None,
        }
    }

    fn has(&self, field: &str) -> bool {
        match field {
            "n" => self.n.is_some(),
            "m" => self.m.is_some(),
            "k" => self.k.is_some(),
            "j" => self.j.is_some(),
            "ell" => self.ell.is_some(),
            "lambda" => self.lambda.is_some(),
            "lambdas" => self.lambdas.is_some(),
            "samples" => self.samples.is_some(),
            "inner" => self.inner.is_some(),
            "order" => self.order.is_some(),
            "transform" => self.transform.is_some(),
            _ => false,
        }
    }

    /// Required fields are present and counts are positive.
    pub fn validate(&self) -> Result<()> {
        let fail = |what: String| Err(Error::Config(format!("experiment '{}' ({}): {what}", self.name, self.tag)));
        if self.name.trim().is_empty() {
            return fail("name must not be empty".into());
        }
        for field in self.tag.required() {
            if !field.split('|').any(|f| self.has(f)) {
                return fail(format!("missing field '{field}'"));
            }
        }
        for (field, v) in [("samples", self.samples), ("inner", self.inner), ("points", self.points)] {
            if v == Some(0) {
                return fail(format!("field '{field}' must be positive"));
            }
        }
        if let Some(t) = &self.tolerance {
            if [t.sigma_multiplier, t.relative_cap, t.absolute].iter().any(|x| !x.is_finite() || *x < 0.0) {
                return fail("tolerance entries must be finite and nonnegative".into());
            }
        }
        Ok(())
    }
}

/// A suite file: a seed, an optional default tolerance and a list of experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub tolerance: Tolerance,
    #[serde(default, rename = "experiment")]
    pub experiments: Vec<ExperimentSpec>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl Default for Suite {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, tolerance: Tolerance::default(), experiments: Vec::new() }
    }
}

impl Suite {
    /// Parse and validate TOML. Errors carry the line and field from the parser.
    ///
    /// ```
    /// use stiefel::verify::Suite;
    /// let s = Suite::from_toml_str("seed = 3\n[[experiment]]\nname = \"g\"\ntag = \"siegel-gamma\"\n").unwrap();
    /// assert_eq!(s.experiments.len(), 1);
    /// assert!(Suite::from_toml_str("[[experiment]]\nname = \"g\"\ntag = \"siegel-gamma\"\nbogus = 1\n").is_err());
    /// ```
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let suite: Suite = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        suite.validate()?;
        Ok(suite)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let mut names = HashSet::new();
        for e in &self.experiments {
            e.validate()?;
            if !names.insert(e.name.as_str()) {
                return Err(Error::Config(format!("duplicate experiment name '{}'", e.name)));
            }
        }
        Ok(())
    }
}

/// The suite that mirrors the acceptance list.
pub const DEFAULT_SUITE: &str = include_str!("../../suites/default.toml");

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_parses_and_covers_every_tag() {
        let s = Suite::from_toml_str(DEFAULT_SUITE).unwrap();
        assert_eq!(s.seed, DEFAULT_SEED);
        for tag in Tag::ALL {
            assert!(s.experiments.iter().any(|e| e.tag == tag), "{tag}");
        }
    }

    #[test]
    fn tags_round_trip() {
        for tag in Tag::ALL {
            assert_eq!(tag.as_str().parse::<Tag>().unwrap(), tag);
            assert!(!tag.describe().is_empty());
        }
        assert!("no-such-tag".parse::<Tag>().is_err());
    }

    #[test]
    fn diagnostics_name_the_field() {
        let unknown = Suite::from_toml_str("[[experiment]]\nname = \"a\"\ntag = \"duality\"\nsampels = 3\n").unwrap_err();
        assert!(unknown.to_string().contains("sampels"), "{unknown}");
        let missing = Suite::from_toml_str("[[experiment]]\nname = \"a\"\ntag = \"bernstein\"\nn = 4\nm = 1\n").unwrap_err();
        assert!(missing.to_string().contains("'ell'"), "{missing}");
        let zero = Suite::from_toml_str("[[experiment]]\nname = \"a\"\ntag = \"siegel-gamma\"\nsamples = 0\n").unwrap_err();
        assert!(zero.to_string().contains("'samples'"), "{zero}");
        let dup = "[[experiment]]\nname = \"a\"\ntag = \"siegel-gamma\"\n[[experiment]]\nname = \"a\"\ntag = \"siegel-gamma\"\n";
        assert!(Suite::from_toml_str(dup).unwrap_err().to_string().contains("duplicate"));
        let tol = "[[experiment]]\nname = \"a\"\ntag = \"siegel-gamma\"\ntolerance = { relative_cap = -1.0 }\n";
        assert!(Suite::from_toml_str(tol).is_err());
    }

    #[test]
    fn either_lambda_field_satisfies_the_requirement() {
        let mut e = ExperimentSpec::new("c", Tag::MassCosine);
        (e.n, e.m, e.k, e.samples) = (Some(4), Some(1), Some(1), Some(10));
        assert!(e.validate().is_err());
        e.lambdas = Some(vec![1.0]);
        assert!(e.validate().is_ok());
    }

    #[test]
    fn empty_suite_and_tolerance_defaults() {
        let s = Suite::from_toml_str("").unwrap();
        assert!(s.experiments.is_empty());
        assert_eq!(s.tolerance, Tolerance { sigma_multiplier: 4.0, relative_cap: 0.05, absolute: 0.0 });
        assert_eq!(Tolerance::absolute(0.1).bound(100.0, 5.0), 0.1);
    }
}
