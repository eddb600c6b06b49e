//! End-to-end orchestration: roots, assembly, coefficient solve, field
//! reconstruction, and probability normalization.

use crate::error::{Error, Result};
use crate::model::{
    linspace, normalize_probability, reconstruct, t_max, PhysicalParams, SolutionField,
};
use crate::poly::BoubakerBasis;
use crate::solver::{
    assemble, default_quad_nodes, solve_coefficients, AssembledSystem, ChainRuleMode,
    CoefficientSet, ExpansionConfig,
};

/// Everything needed to run one expansion order through the full pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub n0: usize,
    /// Quadrature node count; `None` selects the exact-for-polynomials
    /// default.
    pub quad_nodes: Option<usize>,
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub chain_rule_mode: ChainRuleMode,
    pub grid_nx: usize,
    pub grid_nt: usize,
    /// Rescale so the t = 0 density integrates to one.
    pub normalize: bool,
    /// x-tolerance for the root bisection.
    pub root_x_tol: f64,
}

impl PipelineConfig {
    pub fn new(n0: usize) -> Self {
        PipelineConfig {
            n0,
            quad_nodes: None,
            theta_lo: 0.0,
            theta_hi: 1.0,
            chain_rule_mode: ChainRuleMode::Literal,
            grid_nx: 201,
            grid_nt: 201,
            normalize: true,
            root_x_tol: 1e-12,
        }
    }

    pub fn expansion_config(&self) -> Result<ExpansionConfig> {
        let cfg = ExpansionConfig {
            n0: self.n0,
            quad_nodes: self
                .quad_nodes
                .unwrap_or_else(|| default_quad_nodes(self.n0)),
            theta_lo: self.theta_lo,
            theta_hi: self.theta_hi,
            chain_rule_mode: self.chain_rule_mode,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.expansion_config()?;
        if self.grid_nx < 2 || self.grid_nt < 2 {
            return Err(Error::InvalidConfig(
                "grid must have at least 2 points per axis".into(),
            ));
        }
        if !(self.root_x_tol > 0.0) {
            return Err(Error::InvalidConfig(
                "root tolerance must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Products of one pipeline run.
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub basis: BoubakerBasis,
    pub system: AssembledSystem,
    pub coeffs: CoefficientSet,
    pub field: SolutionField,
    /// Normalization factor applied to the field (1 when `normalize` is off).
    pub norm_scale: f64,
}

/// Runs roots -> assemble -> solve -> reconstruct -> normalize on the
/// default grids [0, R] x [0, t_m].
pub fn run_pipeline(params: &PhysicalParams, cfg: &PipelineConfig) -> Result<PipelineOutput> {
    cfg.validate()?;
    params.validate()?;
    let basis = BoubakerBasis::build(cfg.n0, cfg.root_x_tol)?;
    let expansion = cfg.expansion_config()?;
    let system = assemble(&expansion, params, &basis)?;
    let coeffs = solve_coefficients(&system);
    let xs = linspace(0.0, params.radius(), cfg.grid_nx);
    let ts = linspace(0.0, t_max(params), cfg.grid_nt);
    let mut field = reconstruct(&coeffs, &basis, params, &xs, &ts)?;
    let norm_scale = if cfg.normalize {
        normalize_probability(&mut field)?
    } else {
        1.0
    };
    Ok(PipelineOutput {
        basis,
        system,
        coeffs,
        field,
        norm_scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::density_integral_at_t0;

    #[test]
    fn pipeline_produces_normalized_field() {
        let params = PhysicalParams::default();
        let mut cfg = PipelineConfig::new(3);
        cfg.grid_nx = 101;
        cfg.grid_nt = 11;
        let out = run_pipeline(&params, &cfg).unwrap();
        assert_eq!(out.coeffs.len(), 3);
        assert!((density_integral_at_t0(&out.field) - 1.0).abs() < 1e-10);
        assert!(out.norm_scale > 0.0);
        assert!(out.field.density_data().iter().all(|&d| d >= 0.0));
    }

    #[test]
    fn pipeline_validates_config() {
        let params = PhysicalParams::default();
        let mut cfg = PipelineConfig::new(0);
        assert!(run_pipeline(&params, &cfg).is_err());
        cfg.n0 = 2;
        cfg.grid_nx = 1;
        assert!(run_pipeline(&params, &cfg).is_err());
    }
}
