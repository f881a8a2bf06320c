use std::path::PathBuf;

use degen_ma::geometry::Shape;
use degen_ma::rhs::PowerLaw;
use degen_ma::solver::{default_floors, FixedOptions, SingularOptions, Sweep};
use degen_ma::{ConvexDomain, Error};
use serde::{Deserialize, Serialize};

/// Experiment description read from a TOML file. Lengths carry a `_len`
/// suffix and are measured in the units of the domain coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    pub domain: Shape,
    pub rhs: RhsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub barrier: Option<BarrierConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
}

/// `F = A d^{beta-n-1} |t|^{-alpha}`; a constant right-hand side is
/// `alpha = 0, beta = n + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RhsConfig {
    #[serde(rename = "A")]
    pub a_coef: f64,
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Edge,
    Cusp,
    SphereSub,
    SphereSuper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierConfig {
    pub family: Family,
    /// Base point of the edge or cusp frame; defaults to the boundary
    /// point below the domain center.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_point: Option<Vec<f64>>,
    /// `l` for the edge and cusp recipes; defaults to the domain diameter.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diameter_len: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// Sphere center and radius; default to the domain when it is a ball.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_len: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_target: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    10_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub h_len: f64,
    pub stencil_width: u8,
    pub method: Sweep,
    /// Regularization floors `0.1 * 2^-k` for `k = 0..=floor_levels`.
    pub floor_levels: usize,
    pub damping: f64,
    pub level_tol: f64,
    /// Sweep limit of each fixed right-hand-side solve.
    pub max_sweeps: usize,
    /// Fixed-point step limit per regularization level.
    pub max_picard: usize,
    pub holder_pairs: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let s = SingularOptions::default();
        SolverConfig {
            h_len: 1.0 / 32.0,
            stencil_width: 2,
            method: Sweep::Newton,
            floor_levels: s.floors.len() - 1,
            damping: s.damping,
            level_tol: s.level_tol,
            max_sweeps: s.fixed.max_iters,
            max_picard: s.max_inner,
            holder_pairs: 10_000,
        }
    }
}

impl SolverConfig {
    pub fn options(&self) -> SingularOptions {
        SingularOptions {
            floors: default_floors(self.floor_levels),
            damping: self.damping,
            level_tol: self.level_tol,
            max_inner: self.max_picard,
            fixed: FixedOptions {
                method: self.method,
                max_iters: self.max_sweeps,
                ..FixedOptions::default()
            },
            ..SingularOptions::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    /// Table written by `solve`.
    Solution,
    /// Radial oracle on a ball.
    Radial,
    /// Synthetic `-coef d^gamma`.
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckMode {
    UpperBound,
    TwoSided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub source: Source,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution_file: Option<PathBuf>,
    /// Fit locations; default to vertices and edge midpoints of polygons,
    /// or the lowest boundary point otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_min_len: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_max_len: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_gamma: Option<f64>,
    pub power_coef: f64,
    /// Explicit prediction; replaces the case analysis when given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted_gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckMode>,
    pub band: f64,
    /// `(a, eta)` exponent of the domain, for the cusp-type prediction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    /// Sphere radii asserted by the user instead of certified.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exterior_radius_len: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interior_radius_len: Option<f64>,
    pub certificate_points: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            source: Source::Solution,
            solution_file: None,
            boundary_points: None,
            d_min_len: None,
            d_max_len: None,
            power_gamma: None,
            power_coef: 1.0,
            predicted_gamma: None,
            check: None,
            band: 0.05,
            a: None,
            exterior_radius_len: None,
            interior_radius_len: None,
            certificate_points: 64,
        }
    }
}

/// Parse failures: unreadable input versus invalid content.
#[derive(Debug)]
pub enum ConfigError {
    Io(String),
    Invalid(Error),
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| ConfigError::Invalid(Error::param(format!("config: {e}"))))?;
        cfg.validate().map_err(ConfigError::Invalid)?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Checks the parameter gates that do not depend on the subcommand.
    pub fn validate(&self) -> degen_ma::Result<()> {
        let domain = self.domain()?;
        self.law(&domain)?;
        let s = &self.solver;
        if !(s.h_len > 0.0) {
            return Err(Error::param(format!("solver.h_len must be positive, got {}", s.h_len)));
        }
        if !(s.damping > 0.0 && s.damping <= 1.0) {
            return Err(Error::param("solver.damping must lie in (0, 1]"));
        }
        Ok(())
    }

    pub fn domain(&self) -> degen_ma::Result<ConvexDomain> {
        ConvexDomain::new(self.domain.clone())
    }

    pub fn law(&self, domain: &ConvexDomain) -> degen_ma::Result<PowerLaw> {
        PowerLaw::new(domain.dim(), self.rhs.a_coef, self.rhs.alpha, self.rhs.beta)
    }
}
