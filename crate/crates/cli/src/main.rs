use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use mdsc::cycles::{count_lifted_cycles, md_census, scale_census_to_length};
use mdsc::fixtures::{verify_case, FixtureManifest};
use mdsc::flao::{fl_ao, FlaoConfig};
use mdsc::grade::{forecast, grade_1d, md_grade, GradeConfig, Objective, ProbDistMatrix};
use mdsc::job::{read_grid, DesignJob};
use mdsc::{build_md_matrix, build_sc_matrix, CodeParams, IntGrid, LiftingMatrix, PartitioningMatrix, RelocationMatrix, SparseQcMatrix};

/// Design and analysis of multi-dimensional spatially-coupled LDPC codes.
///
/// Every command writes UTF-8 JSON to stdout or to `--out`. The worker
/// count can be capped with the MDSC_THREADS environment variable.
#[derive(Parser)]
#[command(name = "mdsc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the SC and MD probability-distribution matrices and the cycle forecast.
    Grade {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        grade: GradeArgs,
        #[command(flatten)]
        out: OutArg,
    },
    /// Count the cycles of an SC or MD-SC code without expanding it.
    Census {
        #[command(flatten)]
        matrices: MatrixArgs,
        /// Relocation matrix; omit for the plain SC code.
        #[arg(long)]
        relocation: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "cycle8")]
        objective: Objective,
        /// Also predict the total at this coupling length.
        #[arg(long)]
        scale_to: Option<usize>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Run the full pipeline described by a job file.
    Design {
        job: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        rb: Option<usize>,
        #[arg(long)]
        density: Option<f64>,
        /// Directory for the artifacts; overrides the job file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Greedy relocation seeded from a distribution matrix.
    Flao {
        #[command(flatten)]
        matrices: MatrixArgs,
        /// Distribution matrix JSON, as written by `grade`.
        #[arg(long)]
        dist: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "cycle8")]
        objective: Objective,
        /// Step bound; defaults to 10 * gamma * kappa.
        #[arg(long)]
        rb: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Reject steps that push the MD density above this percentage.
        #[arg(long)]
        density: Option<f64>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Expected cycle count of a distribution matrix.
    Forecast {
        #[arg(long)]
        dist: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value = "cycle8")]
        objective: Objective,
        #[command(flatten)]
        out: OutArg,
    },
    /// Check a bundled reference design against its known cycle count.
    Verify {
        /// Case name, or `all`.
        case: String,
    },
    /// Write a bundled matrix or a parity-check matrix in text or JSON form.
    Export {
        case: String,
        #[arg(long, value_enum, default_value = "partitioning")]
        what: ExportItem,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Args, Clone)]
struct ParamArgs {
    #[arg(long)]
    gamma: usize,
    #[arg(long)]
    kappa: usize,
    /// Circulant size.
    #[arg(long, default_value_t = 2)]
    z: usize,
    /// Coupling length.
    #[arg(short = 'L')]
    coupling_len: usize,
    /// Memory.
    #[arg(short = 'm')]
    memory: usize,
    /// Number of copies.
    #[arg(short = 'M', default_value_t = 1)]
    copies: usize,
}

impl ParamArgs {
    fn params(&self) -> Result<CodeParams> {
        Ok(CodeParams::new(self.gamma, self.kappa, self.z, self.coupling_len, self.memory, self.copies)?)
    }
}

#[derive(Args)]
struct GradeArgs {
    #[arg(long, default_value = "cycle8")]
    objective: Objective,
    #[arg(long, default_value_t = 0.02)]
    alpha: f64,
    #[arg(long, default_value_t = 1e-8)]
    eps: f64,
    /// Stop once this percentage of circulants is relocated.
    #[arg(long, default_value_t = 50.0)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct MatrixArgs {
    /// Partitioning matrix, text or JSON.
    #[arg(long)]
    partitioning: PathBuf,
    /// Lifting matrix, text or JSON.
    #[arg(long)]
    lifting: PathBuf,
}

impl MatrixArgs {
    fn load(&self, params: &CodeParams) -> Result<(PartitioningMatrix, LiftingMatrix)> {
        Ok((
            PartitioningMatrix::new(load_grid(&self.partitioning)?, params)?,
            LiftingMatrix::new(load_grid(&self.lifting)?, params)?,
        ))
    }
}

#[derive(Args)]
struct OutArg {
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportItem {
    Partitioning,
    Lifting,
    Relocation,
    Distribution,
    /// Lifted SC parity-check matrix as a block list.
    HSc,
    /// Lifted MD-SC parity-check matrix as a block list.
    HMd,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn load_grid(path: &Path) -> Result<IntGrid> {
    read_grid(path).with_context(|| format!("reading {}", path.display()))
}

fn write_text(out: &OutArg, text: &str) -> Result<()> {
    match &out.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_json<T: Serialize>(out: &OutArg, value: &T) -> Result<()> {
    write_text(out, &(serde_json::to_string_pretty(value)? + "\n"))
}

/// Text form of a block list: a `block_rows block_cols z` header, then one
/// `row col power` line per circulant.
fn blocks_text(h: &SparseQcMatrix) -> String {
    let mut s = format!("{} {} {}\n", h.block_rows(), h.block_cols(), h.z());
    for b in h.blocks() {
        s.push_str(&format!("{} {} {}\n", b.row, b.col, b.power));
    }
    s
}

fn grade_config(g: &GradeArgs) -> GradeConfig {
    GradeConfig {
        objective: g.objective,
        alpha: g.alpha,
        epsilon: g.eps,
        density_cap: g.density,
        seed: g.seed,
        ..GradeConfig::default()
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Grade { params, grade, out } => {
            let params = params.params()?;
            let cfg = grade_config(&grade);
            let p_star = grade_1d(&params, &cfg)?;
            let outcome = md_grade(&params, &p_star, &cfg)?;
            let relocation = outcome.distribution.component_relocation();
            write_json(
                &out,
                &json!({
                    "p_star": p_star,
                    "relocation_percent": outcome.distribution.relocation_percent(),
                    "component_relocation_percent": relocation,
                    "grade": outcome,
                }),
            )?;
        }
        Command::Census { matrices, relocation, params, objective, scale_to, out } => {
            let params = params.params()?;
            let (k, l) = matrices.load(&params)?;
            let g = objective.cycle_length() / 2;
            let census = match relocation {
                Some(path) => {
                    let r = RelocationMatrix::new(load_grid(&path)?, &params)?;
                    md_census(&k, &l, &r, &params, g)?
                }
                None => count_lifted_cycles(&build_sc_matrix(&k, &l, &params)?, g)?,
            };
            let scaled = scale_to
                .map(|to| scale_census_to_length(&census, params.coupling_len, to))
                .transpose()?;
            write_json(&out, &json!({ "params": params, "census": census, "scaled_total": scaled }))?;
        }
        Command::Design { job, seed, rb, density, out } => {
            let mut job = DesignJob::from_json_file(&job)?;
            let mut flao = job.flao_config();
            if let Some(seed) = seed {
                flao.seed = seed;
                job.grade_cfg.seed = seed;
            }
            if let Some(rb) = rb {
                flao.relocation_bound = rb;
            }
            if let Some(d) = density {
                job.grade_cfg.density_cap = d;
            }
            job.flao_cfg = Some(flao);
            if let Some(dir) = out {
                job.output_dir = dir;
            }
            let artifacts = job.run()?;
            let dir = &job.output_dir;
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let save = |name: &str, text: String| -> Result<()> {
                let path = dir.join(name);
                fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
            };
            save("distribution.json", artifacts.grade.distribution.to_json())?;
            save("relocation.txt", artifacts.flao.relocation.grid().to_string())?;
            save("grade.json", serde_json::to_string_pretty(&artifacts.grade)?)?;
            save("flao.json", serde_json::to_string_pretty(&artifacts.flao)?)?;
            save("census.json", serde_json::to_string_pretty(&artifacts.census)?)?;
            save("report.json", serde_json::to_string_pretty(&artifacts.report)?)?;
            println!("{}", serde_json::to_string_pretty(&artifacts.report)?);
        }
        Command::Flao { matrices, dist, params, objective, rb, seed, density, out } => {
            let params = params.params()?;
            let (k, l) = matrices.load(&params)?;
            let p = ProbDistMatrix::from_json(&fs::read_to_string(&dist)?)?;
            let mut cfg = FlaoConfig::for_params(&params, objective.cycle_length());
            cfg.seed = seed;
            cfg.density_cap = density;
            if let Some(rb) = rb {
                cfg.relocation_bound = rb;
            }
            write_json(&out, &fl_ao(&k, &l, &params, &p, &cfg)?)?;
        }
        Command::Forecast { dist, params, objective, out } => {
            let params = params.params()?;
            let p = ProbDistMatrix::from_json(&fs::read_to_string(&dist)?)?;
            write_json(&out, &forecast(&p, &params, objective, false)?)?;
        }
        Command::Verify { case } => {
            let names: Vec<String> = if case == "all" {
                FixtureManifest::bundled().cases.into_iter().map(|c| c.name).collect()
            } else {
                vec![case]
            };
            let reports = names.iter().map(|n| verify_case(n)).collect::<mdsc::Result<Vec<_>>>()?;
            println!("{}", serde_json::to_string_pretty(&reports)?);
            if reports.iter().any(|r| !r.passed) {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Export { case, what, format, out } => {
            let manifest = FixtureManifest::bundled();
            let c = manifest.case(&case)?;
            let grid = |g: &IntGrid| match format {
                Format::Text => g.to_string(),
                Format::Json => g.to_json() + "\n",
            };
            let blocks = |h: &SparseQcMatrix| -> Result<String> {
                Ok(match format {
                    Format::Text => blocks_text(h),
                    Format::Json => serde_json::to_string(h)? + "\n",
                })
            };
            let text = match what {
                ExportItem::Partitioning => grid(c.partitioning()?.grid()),
                ExportItem::Lifting => grid(c.lifting()?.grid()),
                ExportItem::Relocation => grid(c.relocation()?.grid()),
                ExportItem::Distribution => {
                    if format == Format::Text {
                        bail!("distribution matrices are exported as JSON only");
                    }
                    match c.distribution()? {
                        Some(p) => p.to_json() + "\n",
                        None => bail!("case `{}` has no distribution matrix", c.name),
                    }
                }
                ExportItem::HSc => blocks(&build_sc_matrix(&c.partitioning()?, &c.lifting()?, &c.params)?)?,
                ExportItem::HMd => blocks(&build_md_matrix(
                    &c.partitioning()?,
                    &c.lifting()?,
                    &c.relocation()?,
                    &c.params,
                )?)?,
            };
            write_text(&out, &text)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("MDSC_THREADS") {
        let n: usize = v.parse().with_context(|| format!("MDSC_THREADS = `{v}` is not a count"))?;
        if n > 0 {
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match init_threads().and_then(|()| run(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
