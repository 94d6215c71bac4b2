//! Configuration schema: a TOML file describing the system, the data, the
//! evaluation grid, and the tolerance. Complex numbers are written as
//! `[re, im]` pairs; k-polynomials as ascending coefficient lists.

use num_complex::Complex64;
use serde::Deserialize;
use utm_core::{
    BVProblem, BoundarySpec, Grid, HalfLineFunction, PolyExpTerm, PolynomialMatrix,
    PolynomialScalar, TimeSignal,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub schema: u32,
    /// Optional; when present it must agree with the subcommand.
    pub mode: Option<String>,
    pub system: SystemConfig,
    pub initial: Vec<DataConfig>,
    pub boundary: Vec<BoundaryConfig>,
    pub grid: GridConfig,
    pub tol: f64,
    /// Latest boundary-data time the problem is defined up to; defaults to
    /// the top of the time grid.
    pub horizon: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    /// One of "klein-gordon", "fitzhugh-nagumo", "wave-family"; omit to give
    /// the symbol matrix explicitly.
    pub id: Option<String>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub a: Option<f64>,
    /// Explicit symbol: rows of entries, each entry an ascending list of
    /// [re, im] k-coefficients.
    pub matrix: Option<Vec<Vec<Vec<[f64; 2]>>>>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DataConfig {
    Zero,
    ExpDecay { c: f64, gamma: f64 },
    PolyTimesExp { terms: Vec<TermConfig> },
    GaussianTruncated { a: f64, x0: f64, sigma: f64 },
    Tabulated { xs: Vec<f64>, ys: Vec<f64> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub c: f64,
    pub p: u32,
    pub gamma: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    /// "dirichlet", "neumann", or "robin"
    pub kind: String,
    #[serde(default)]
    pub component: usize,
    /// Robin coefficients in a*q(0,t) + b*q_x(0,t) = data(t)
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub data: SignalConfig,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SignalConfig {
    Zero,
    Constant { c: f64 },
    ExpDecay { c: f64, gamma: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_max: f64,
    pub x_count: usize,
    pub t_max: f64,
    pub t_count: usize,
}

impl ProblemConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let cfg: ProblemConfig =
            toml::from_str(text).map_err(|e| format!("config parse error: {e}"))?;
        if cfg.schema != SCHEMA_VERSION {
            return Err(format!(
                "unsupported schema version {} (this build reads {SCHEMA_VERSION})",
                cfg.schema
            ));
        }
        if !(cfg.tol > 0.0) {
            return Err("field tol: must be positive".into());
        }
        if cfg.grid.x_count == 0 || cfg.grid.t_count == 0 {
            return Err("field grid: x_count and t_count must be positive".into());
        }
        if !(cfg.grid.x_max > 0.0) || !(cfg.grid.t_max > 0.0) {
            return Err("field grid: x_max and t_max must be positive".into());
        }
        Ok(cfg)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon.unwrap_or(self.grid.t_max).max(self.grid.t_max)
    }

    pub fn grid(&self) -> Grid {
        Grid::new(
            Grid::open_range(self.grid.x_max, self.grid.x_count),
            Grid::open_range(self.grid.t_max, self.grid.t_count),
        )
        .expect("counts validated at parse time")
    }

    pub fn system(&self) -> Result<PolynomialMatrix, String> {
        match (self.system.id.as_deref(), &self.system.matrix) {
            (Some(id), None) => match id {
                "klein-gordon" => Ok(PolynomialMatrix::klein_gordon(
                    self.system.alpha.ok_or("system klein-gordon needs alpha")?,
                )),
                "fitzhugh-nagumo" => Ok(PolynomialMatrix::fitzhugh_nagumo(
                    self.system.beta.ok_or("system fitzhugh-nagumo needs beta")?,
                )),
                "wave-family" => Ok(PolynomialMatrix::wave_family(
                    self.system.a.ok_or("system wave-family needs a")?,
                )),
                other => Err(format!("field system.id: unknown system '{other}'")),
            },
            (None, Some(rows)) => {
                let entries: Vec<Vec<PolynomialScalar>> = rows
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|coeffs| {
                                PolynomialScalar::new(
                                    coeffs
                                        .iter()
                                        .map(|&[re, im]| Complex64::new(re, im))
                                        .collect(),
                                )
                            })
                            .collect()
                    })
                    .collect();
                PolynomialMatrix::new(entries).map_err(|e| format!("field system.matrix: {e}"))
            }
            _ => Err("field system: give exactly one of id or matrix".into()),
        }
    }

    pub fn initial_data(&self) -> Result<Vec<HalfLineFunction>, String> {
        self.initial
            .iter()
            .map(|d| {
                Ok(match d {
                    DataConfig::Zero => HalfLineFunction::zero(),
                    DataConfig::ExpDecay { c, gamma } => HalfLineFunction::exp_decay(*c, *gamma),
                    DataConfig::PolyTimesExp { terms } => HalfLineFunction::poly_exp(
                        terms
                            .iter()
                            .map(|t| PolyExpTerm {
                                c: t.c,
                                p: t.p,
                                gamma: t.gamma,
                            })
                            .collect(),
                    ),
                    DataConfig::GaussianTruncated { a, x0, sigma } => {
                        if !(*sigma > 0.0) {
                            return Err("field initial: gaussian sigma must be positive".into());
                        }
                        HalfLineFunction::gaussian(*a, *x0, *sigma)
                    }
                    DataConfig::Tabulated { xs, ys } => {
                        HalfLineFunction::tabulated(xs.clone(), ys.clone())
                            .map_err(|e| format!("field initial: {e}"))?
                    }
                })
            })
            .collect()
    }

    fn signal(&self, s: &SignalConfig) -> TimeSignal {
        let horizon = self.horizon();
        match s {
            SignalConfig::Zero => TimeSignal::zero(horizon),
            SignalConfig::Constant { c } => TimeSignal::constant(*c, horizon),
            SignalConfig::ExpDecay { c, gamma } => TimeSignal::exp_decay(*c, *gamma, horizon),
        }
    }

    pub fn boundary_specs(&self) -> Result<Vec<BoundarySpec>, String> {
        self.boundary
            .iter()
            .map(|b| match b.kind.as_str() {
                "dirichlet" => Ok(BoundarySpec::dirichlet(b.component, self.signal(&b.data))),
                "neumann" => Ok(BoundarySpec::neumann(b.component, self.signal(&b.data))),
                "robin" => BoundarySpec::robin(
                    b.a.ok_or("field boundary: robin needs a")?,
                    b.b.ok_or("field boundary: robin needs b")?,
                    b.component,
                    self.signal(&b.data),
                )
                .map_err(|e| format!("field boundary: {e}")),
                other => Err(format!("field boundary.kind: unknown kind '{other}'")),
            })
            .collect()
    }

    pub fn problem(&self, tol_override: Option<f64>) -> Result<BVProblem, String> {
        let system = self.system()?;
        if self.initial.len() != system.size() {
            return Err(format!(
                "field initial: expected {} components, got {}",
                system.size(),
                self.initial.len()
            ));
        }
        BVProblem::new(
            system,
            self.initial_data()?,
            self.boundary_specs()?,
            tol_override.unwrap_or(self.tol),
            self.horizon(),
        )
        .map_err(|e| format!("config error: {e}"))
    }
}
