//! The end-to-end design pipeline: SC distribution, MD distribution,
//! greedy relocation and the final census.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cycles::{md_census, CycleCensus};
use crate::error::{Error, Result};
use crate::flao::{fl_ao, FlaoConfig, FlaoResult};
use crate::grade::{grade_1d, md_grade, GradeConfig, GradeOutcome, Objective};
use crate::matrix::{IntGrid, LiftingMatrix, PartitioningMatrix};
use crate::params::CodeParams;

/// A design request as read from a job file. Matrix paths are resolved
/// relative to the job file's directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignJob {
    pub params: CodeParams,
    pub partitioning_path: PathBuf,
    pub lifting_path: PathBuf,
    pub objective: Objective,
    #[serde(default)]
    pub grade_cfg: GradeConfig,
    pub flao_cfg: Option<FlaoConfig>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from(".")
}

/// Reads a matrix file in either the text or the JSON format.
pub fn read_grid(path: &Path) -> Result<IntGrid> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    IntGrid::parse_any(&text)
}

impl DesignJob {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let mut job: DesignJob = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut job.partitioning_path, &mut job.lifting_path] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(job)
    }

    pub fn load_matrices(&self) -> Result<(PartitioningMatrix, LiftingMatrix)> {
        self.params.validate()?;
        Ok((
            PartitioningMatrix::new(read_grid(&self.partitioning_path)?, &self.params)?,
            LiftingMatrix::new(read_grid(&self.lifting_path)?, &self.params)?,
        ))
    }

    /// The configured optimizer settings, or the defaults for the job.
    pub fn flao_config(&self) -> FlaoConfig {
        self.flao_cfg
            .clone()
            .unwrap_or_else(|| FlaoConfig::for_params(&self.params, self.objective.cycle_length()))
    }

    pub fn run(&self) -> Result<DesignArtifacts> {
        let (k, l) = self.load_matrices()?;
        let grade_cfg = GradeConfig { objective: self.objective, ..self.grade_cfg.clone() };
        run_design(&self.params, &k, &l, &grade_cfg, &self.flao_config())
    }
}

/// Table-style summary of a finished design.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub params: CodeParams,
    pub length: usize,
    pub design_rate: f64,
    pub cycle_length: usize,
    pub md_cycle_count: u64,
    pub initial_md_cycle_count: u64,
    pub md_density: f64,
    pub iterations: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DesignArtifacts {
    pub p_star: Vec<f64>,
    pub grade: GradeOutcome,
    pub flao: FlaoResult,
    pub census: CycleCensus,
    pub report: DesignReport,
}

/// Runs distribution design, greedy relocation and the final census.
pub fn run_design(
    params: &CodeParams,
    k: &PartitioningMatrix,
    lifting: &LiftingMatrix,
    grade_cfg: &GradeConfig,
    flao_cfg: &FlaoConfig,
) -> Result<DesignArtifacts> {
    let p_star = grade_1d(params, grade_cfg)?;
    let grade = md_grade(params, &p_star, grade_cfg)?;
    let flao = fl_ao(k, lifting, params, &grade.distribution, flao_cfg)?;
    let census = md_census(k, lifting, &flao.relocation, params, flao_cfg.cycle_length / 2)?;
    let report = DesignReport {
        params: *params,
        length: params.md_length(),
        design_rate: params.design_rate(),
        cycle_length: flao_cfg.cycle_length,
        md_cycle_count: flao.md_cycle_count,
        initial_md_cycle_count: flao.initial_md_cycle_count,
        md_density: flao.md_density,
        iterations: flao.iterations,
        seed: flao.seed,
    };
    Ok(DesignArtifacts { p_star, grade, flao, census, report })
}
