use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use syz_core::syz::SolverConfig;
use syz_core::tropical::TailoringParams;
use syz_core::ModelShape;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShapeSection {
    pub p: usize,
    pub q: usize,
    /// Base offset `L`; the minimum of the potential sits at `xi = -L`.
    pub l: f64,
    pub eps: f64,
    pub eps_pert: f64,
    pub chi_radius: f64,
    /// Tailoring amount in `[0, 1]`.
    pub s: f64,
}

impl Default for ShapeSection {
    fn default() -> Self {
        let d = ModelShape::new(1, 2);
        ShapeSection {
            p: d.p,
            q: d.q,
            l: d.params.l,
            eps: d.params.eps,
            eps_pert: d.eps_pert,
            chi_radius: d.chi_radius,
            s: d.s,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    /// Required by every command that runs the solver; `--seed` overrides it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Defaults to `20 * 2^q`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_starts: Option<usize>,
    pub grad_tol: f64,
    pub max_iters: usize,
    pub cluster_radius: f64,
    pub zero_threshold: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolverConfig::for_shape(&ModelShape::new(1, 1), 0);
        SolverSection {
            seed: None,
            n_starts: None,
            grad_tol: d.grad_tol,
            max_iters: d.max_iters,
            cluster_radius: d.cluster_radius,
            zero_threshold: d.zero_threshold,
        }
    }
}

/// Square window `[xi_min, xi_max]^q` sampled at `resolution` points per axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub xi_min: f64,
    pub xi_max: f64,
    pub resolution: usize,
    /// Tie tolerance for chamber classification.
    pub tol: f64,
    /// Raster points cross-checked against the argument-search oracle.
    pub oracle_samples: usize,
    pub oracle_grid: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            xi_min: -6.0,
            xi_max: 2.0,
            resolution: 81,
            tol: 1e-9,
            oracle_samples: 200,
            oracle_grid: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BsideSection {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
}

impl Default for BsideSection {
    fn default() -> Self {
        BsideSection { n: 2, m: 2, seed: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Written instead of stdout when set; `--out` overrides it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    pub figure_width: u32,
    pub figure_height: u32,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            path: None,
            figure_width: 640,
            figure_height: 640,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub shape: ShapeSection,
    pub solver: SolverSection,
    pub grid: GridSection,
    pub bside: BsideSection,
    pub output: OutputSection,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        bail!("config field `{name}` must be positive and finite, got {v}");
    }
    Ok(())
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).context("parsing config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable in TOML")
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.shape;
        if s.q == 0 {
            bail!("config field `shape.q` must be at least 1");
        }
        positive("shape.eps", s.eps)?;
        positive("shape.l", s.l)?;
        if s.l < 10.0 * s.eps {
            bail!(
                "config field `shape.l` must be at least 10 * shape.eps = {}, got {}",
                10.0 * s.eps,
                s.l
            );
        }
        if !(s.eps_pert >= 0.0 && s.eps_pert.is_finite()) {
            bail!("config field `shape.eps_pert` must be nonnegative, got {}", s.eps_pert);
        }
        positive("shape.chi_radius", s.chi_radius)?;
        if !(0.0..=1.0).contains(&s.s) {
            bail!("config field `shape.s` must lie in [0, 1], got {}", s.s);
        }
        let v = &self.solver;
        positive("solver.grad_tol", v.grad_tol)?;
        positive("solver.cluster_radius", v.cluster_radius)?;
        positive("solver.zero_threshold", v.zero_threshold)?;
        if v.max_iters == 0 {
            bail!("config field `solver.max_iters` must be at least 1");
        }
        // TOML integers are signed 64-bit.
        if v.seed.is_some_and(|x| x > i64::MAX as u64) || self.bside.seed > i64::MAX as u64 {
            bail!("seeds must be at most {}", i64::MAX);
        }
        if v.n_starts == Some(0) {
            bail!("config field `solver.n_starts` must be at least 1");
        }
        let g = &self.grid;
        if !(g.xi_min.is_finite() && g.xi_max.is_finite() && g.xi_min < g.xi_max) {
            bail!("config fields `grid.xi_min` < `grid.xi_max` required, got {} and {}", g.xi_min, g.xi_max);
        }
        if g.resolution < 2 {
            bail!("config field `grid.resolution` must be at least 2");
        }
        positive("grid.tol", g.tol)?;
        if g.oracle_grid < 8 {
            bail!("config field `grid.oracle_grid` must be at least 8");
        }
        if self.output.figure_width == 0 || self.output.figure_height == 0 {
            bail!("config fields `output.figure_width` and `output.figure_height` must be positive");
        }
        Ok(())
    }

    pub fn model_shape(&self) -> ModelShape {
        let s = &self.shape;
        ModelShape {
            p: s.p,
            q: s.q,
            params: TailoringParams { eps: s.eps, l: s.l },
            eps_pert: s.eps_pert,
            chi_radius: s.chi_radius,
            s: s.s,
        }
    }

    /// Solver settings; fails when no seed was configured.
    pub fn solver_config(&self, threads: Option<usize>) -> Result<SolverConfig> {
        let shape = self.model_shape();
        let Some(seed) = self.solver.seed else {
            bail!("solver runs need a seed: set `solver.seed` in the config or pass --seed");
        };
        let mut c = SolverConfig::for_shape(&shape, seed);
        if let Some(n) = self.solver.n_starts {
            c.n_starts = n;
        }
        c.grad_tol = self.solver.grad_tol;
        c.max_iters = self.solver.max_iters;
        c.cluster_radius = self.solver.cluster_radius;
        c.zero_threshold = self.solver.zero_threshold;
        c.threads = threads;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn rejects_eps_above_l() {
        let err = RunConfig::from_toml("[shape]\neps = 2.0\nl = 1.0\n").unwrap_err();
        assert!(format!("{err:#}").contains("shape.l"));
    }

    #[test]
    fn rejects_unknown_fields() {
        assert!(RunConfig::from_toml("[shape]\nwidth = 3\n").is_err());
    }

    #[test]
    fn seed_is_mandatory_for_solver() {
        let c = RunConfig::default();
        assert!(c.solver_config(None).is_err());
        let c = RunConfig::from_toml("[solver]\nseed = 4\n").unwrap();
        assert_eq!(c.solver_config(Some(2)).unwrap().seed, 4);
    }
}
