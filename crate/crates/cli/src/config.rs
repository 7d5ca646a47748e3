use std::path::{Path, PathBuf};

use ldg_core::densities::{elastic_to_frank, frank_to_elastic, ElasticConstants, FrankConstants};
use ldg_core::solver::{Ball, DensityKind, SolverConfig};
use ldg_core::MaterialConstants;
use serde::{Deserialize, Serialize};

use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Radial hedgehog s₊(x⊗x/|x|² − I/3) on every node, boundary included.
    #[default]
    Hedgehog,
    /// Large-norm start along −Q₊ with a z-gradient along E0: the direction in
    /// which the original density with L4 > 0 is unbounded below.
    Adversarial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub density_kind: DensityKind,
    pub dims: [usize; 3],
    pub h: f64,
    pub scenario: Scenario,
    /// Interior nodes get a seeded random offset of at most this norm.
    pub perturbation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_list: Option<Vec<f64>>,
    /// Defaults to 2s₊.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff_m: Option<f64>,
    /// Defaults to 2h.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub core_radius: Option<f64>,
    pub allow_noncoercive: bool,
    pub use_ncg: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diag_ball: Option<Ball>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cacc_ball: Option<Ball>,
    /// Start from this snapshot instead of the scenario field.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resume: Option<PathBuf>,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            density_kind: DensityKind::Original,
            dims: [9, 9, 9],
            h: 0.25,
            scenario: Scenario::Hedgehog,
            perturbation: 0.0,
            l: None,
            l_list: None,
            cutoff_m: None,
            core_radius: None,
            allow_noncoercive: false,
            use_ncg: true,
            diag_ball: None,
            cacc_ball: None,
            resume: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingSection {
    pub seed: u64,
    pub identity_samples: usize,
    pub bulk_samples: usize,
    pub hessian_bound_samples: usize,
    pub projection_samples: usize,
    pub brute_force_samples: usize,
    /// Directions on the Fibonacci sphere for the brute-force projection.
    pub brute_force_directions: usize,
    pub coercivity_samples: usize,
}

impl Default for SamplingSection {
    fn default() -> Self {
        Self {
            seed: 42,
            identity_samples: 10_000,
            bulk_samples: 1_000,
            hessian_bound_samples: 10_000,
            projection_samples: 10_000,
            brute_force_samples: 100,
            brute_force_directions: 20_000,
            coercivity_samples: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceSection {
    pub identity: f64,
    pub finite_difference: f64,
    /// |g_B| on S_* relative to s₊³.
    pub manifold_gradient: f64,
    pub witness_target: f64,
    /// δ of the tubular neighbourhood as a fraction of s₊.
    pub delta_fraction: f64,
    /// Check f̃_B ≥ (λ/2)|Q − π(Q)|² instead of the λ/4 bound.
    pub strict_projection_bound: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grad_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
}

impl Default for ToleranceSection {
    fn default() -> Self {
        Self {
            identity: 1e-9,
            finite_difference: 1e-6,
            manifold_gradient: 1e-10,
            witness_target: -1e3,
            delta_fraction: 0.1,
            strict_projection_bound: false,
            grad_tol: None,
            max_iters: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

/// One run, as read from a TOML file. Exactly one of `frank` / `elastic` is
/// given; the other is derived. s₊ is always recomputed from the material.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub material: MaterialSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frank: Option<FrankConstants>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elastic: Option<ElasticConstants>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub sampling: SamplingSection,
    #[serde(default)]
    pub tolerances: ToleranceSection,
    #[serde(default)]
    pub output: OutputSection,
}

fn field_error(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn validate(&self) -> Result<()> {
        self.material()?;
        match (&self.frank, &self.elastic) {
            (Some(_), Some(_)) => {
                return Err(field_error("frank/elastic", "give exactly one of the two sections, not both"))
            }
            (None, None) => return Err(field_error("frank/elastic", "one of the two sections is required")),
            _ => {}
        }
        let s = &self.solver;
        if s.dims.iter().any(|&n| n < 3) {
            return Err(field_error("solver.dims", format!("every axis needs at least 3 nodes, got {:?}", s.dims)));
        }
        if !(s.h > 0.0 && s.h.is_finite()) {
            return Err(field_error("solver.h", format!("must be positive, got {}", s.h)));
        }
        if let Some(l) = s.l {
            if !(l > 0.0 && l.is_finite()) {
                return Err(field_error("solver.l", format!("must be positive, got {l}")));
            }
        }
        if let Some(list) = &s.l_list {
            if list.is_empty() {
                return Err(field_error("solver.l_list", "must contain at least one value"));
            }
            if list.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
                return Err(field_error("solver.l_list", "every value must be positive"));
            }
            if list.windows(2).any(|w| w[1] >= w[0]) {
                return Err(field_error("solver.l_list", "values must be strictly decreasing"));
            }
        }
        if !(s.perturbation >= 0.0) {
            return Err(field_error("solver.perturbation", "must be nonnegative"));
        }
        if !(self.tolerances.delta_fraction > 0.0) {
            return Err(field_error("tolerances.delta_fraction", "must be positive"));
        }
        Ok(())
    }

    pub fn material(&self) -> Result<MaterialConstants> {
        let m = self.material;
        MaterialConstants::new(m.a, m.b, m.c).map_err(|e| field_error("material", e))
    }

    pub fn s_plus(&self) -> Result<f64> {
        Ok(self.material()?.s_plus())
    }

    pub fn elastic_constants(&self) -> Result<ElasticConstants> {
        let s = self.s_plus()?;
        match (&self.frank, &self.elastic) {
            (_, Some(l)) => Ok(*l),
            (Some(k), None) => Ok(frank_to_elastic(k, s)),
            (None, None) => Err(field_error("frank/elastic", "one of the two sections is required")),
        }
    }

    pub fn frank_constants(&self) -> Result<FrankConstants> {
        let s = self.s_plus()?;
        match (&self.frank, &self.elastic) {
            (Some(k), _) => Ok(*k),
            (None, Some(l)) => Ok(elastic_to_frank(l, s)),
            (None, None) => Err(field_error("frank/elastic", "one of the two sections is required")),
        }
    }

    pub fn single_l(&self) -> Result<f64> {
        self.solver.l.ok_or_else(|| field_error("solver.l", "required for minimize"))
    }

    pub fn l_list(&self) -> Result<Vec<f64>> {
        self.solver.l_list.clone().ok_or_else(|| field_error("solver.l_list", "required for sweep"))
    }

    pub fn solver_config(&self, l: f64) -> Result<SolverConfig> {
        let mut c = SolverConfig::new(l, self.elastic_constants()?, self.material()?, self.solver.density_kind);
        let s = &self.solver;
        if let Some(m) = s.cutoff_m {
            c.cutoff_m = m;
        }
        c.core_radius = s.core_radius.unwrap_or(2.0 * s.h);
        c.allow_noncoercive = s.allow_noncoercive;
        c.use_ncg = s.use_ncg;
        if let Some(b) = s.diag_ball {
            c.diag_ball = b;
        }
        if let Some(b) = s.cacc_ball {
            c.cacc_ball = b;
        }
        if let Some(t) = self.tolerances.grad_tol {
            c.grad_tol = t;
        }
        if let Some(n) = self.tolerances.max_iters {
            c.max_iters = n;
        }
        c.validate()?;
        Ok(c)
    }
}
