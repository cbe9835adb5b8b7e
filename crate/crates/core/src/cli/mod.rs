//! Command line front end: configuration, run orchestration and reports.

pub mod config;
pub mod report;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub use config::{CircleConfig, GroupSpec, ModelConfig, RunConfig, SymbolsConfig};
pub use report::{render_text, run, GroupSummary, ModelSummary, RunReport, Status, REPORT_FORMAT};

use crate::action::BUILTIN_MODELS;
use crate::error::{Error, Result};
use crate::fredholm::{builtin_scenario, CircleFamily, Compression, SCENARIO_NAMES};
use crate::grp::FiniteGroup;
use crate::symbol::SymbolFamily;
use config::{AlphaSelection, BundleConfig, Families, RepSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_INCONSISTENT: i32 = 3;
pub const EXIT_INVALID: i32 = 4;

/// Exit code for an error that stopped a run.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::Integrity(_) | Error::Numerical(_) => EXIT_INCONSISTENT,
        _ => EXIT_INVALID,
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "isotypic",
    version,
    about = "Isotypical ellipticity and Fredholm checks for finite group actions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Print JSON instead of text.
    #[arg(long)]
    pub json: bool,
    /// Write the JSON report to this file.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Builtin model name.
    #[arg(long)]
    pub model: String,
    /// Group for `trivial_action`.
    #[arg(long)]
    pub group: Option<String>,
    /// Size parameter (`free_dense` rotation order, `product` grid).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub fiber_dim: Option<usize>,
}

impl ModelArgs {
    fn config(&self) -> (Option<GroupSpec>, ModelConfig) {
        let model = ModelConfig {
            builtin: Some(self.model.clone()),
            n: self.n,
            n_samples: self.samples,
            fiber_dim: self.fiber_dim,
            ..Default::default()
        };
        (self.group.clone().map(GroupSpec::Builtin), model)
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Character table of a builtin group.
    Irreps {
        /// `Z<n>`, `D<n>`, `S<n>`, `Z2xZ2`, `S3xZ2` or `trivial`.
        group: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Orbit types and minimal isotropy of a builtin model.
    OrbitTypes {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Primitive spectrum and the sets Ξ for every α.
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        alpha: Vec<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// α-ellipticity of symbol families by both methods.
    AlphaCheck {
        #[command(flatten)]
        model: ModelArgs,
        /// Family as a kind (`identity`) or an inline table
        /// (`{ kind = "random", seed = 3 }`). Default: the standard families.
        #[arg(long)]
        family: Vec<String>,
        #[arg(long)]
        alpha: Vec<usize>,
        /// Fiber representation: regular, trivial, sum_of_irreps, permutation.
        #[arg(long, default_value = "regular")]
        rep: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        threshold: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Truncation probe, index and local invertibility on a circle scenario.
    FredholmVerify {
        #[arg(long)]
        scenario: String,
        /// Family as a kind or an inline table (`{ kind = "winding", irrep = 1, k = 1 }`).
        #[arg(long)]
        family: Vec<String>,
        #[arg(long)]
        alpha: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<usize>>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        local_radius: Option<usize>,
        #[arg(long)]
        skip_local: bool,
        /// Compress to the full isotype instead of one multiplicity space.
        #[arg(long)]
        isotype: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Builtin models and circle scenarios with their regimes.
    Scenarios {
        #[arg(long)]
        json: bool,
    },
    /// Execute a TOML run configuration.
    Run {
        config: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn parse_inline<T: DeserializeOwned>(s: &str) -> Result<T> {
    #[derive(Deserialize)]
    struct Wrap<T> {
        v: T,
    }
    let s = s.trim();
    let text = if s.starts_with('{') {
        format!("v = {s}")
    } else {
        format!("v = {{ kind = {s:?} }}")
    };
    toml::from_str::<Wrap<T>>(&text)
        .map(|w| w.v)
        .map_err(|e| Error::validation(format!("family `{s}`: {e}")))
}

fn alphas(list: &[usize]) -> AlphaSelection {
    if list.is_empty() {
        AlphaSelection::default()
    } else {
        AlphaSelection::List(list.to_vec())
    }
}

fn families<T: DeserializeOwned + Clone>(list: &[String]) -> Result<Families<T>> {
    if list.is_empty() {
        Ok(Families::default())
    } else {
        Ok(Families::List(
            list.iter()
                .map(|s| parse_inline(s))
                .collect::<Result<_>>()?,
        ))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub kind: &'static str,
    pub name: String,
    pub group: String,
    pub regime: String,
}

fn model_regime(name: &str) -> &'static str {
    match name {
        "trivial_action" => "trivial action, all stabilizers equal the group",
        "free_dense" => "free action, all stabilizers trivial",
        "reflection_circle" => "reflection with two fixed points",
        "s3_through_z2_circle" => "non-faithful action, isotropy A3",
        "product" => "two components with different minimal isotropy",
        _ => "",
    }
}

/// The builtin models and circle scenarios.
pub fn catalog() -> Result<Vec<CatalogEntry>> {
    let mut out = Vec::new();
    for &name in BUILTIN_MODELS {
        let m = crate::action::builtin_model(name, &Default::default())?;
        out.push(CatalogEntry {
            kind: "model",
            name: name.to_string(),
            group: m.group().name().unwrap_or("G").to_string(),
            regime: model_regime(name).to_string(),
        });
    }
    for &name in SCENARIO_NAMES {
        let s = builtin_scenario(name)?;
        out.push(CatalogEntry {
            kind: "circle",
            name: name.to_string(),
            group: s.group.name().unwrap_or("G").to_string(),
            regime: s.regime.clone(),
        });
    }
    Ok(out)
}

fn emit(stdout: &mut dyn Write, text: &str) -> Result<()> {
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| Error::Io(e.to_string()))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn finish_run(cfg: &RunConfig, out: &OutputArgs, stdout: &mut dyn Write) -> Result<i32> {
    let report = run(cfg)?;
    let json = report.to_json();
    if let Some(path) = out.output.as_ref().or(cfg.output.as_ref()) {
        write_file(path, &json)?;
    }
    emit(stdout, &if out.json { json } else { render_text(&report) })?;
    Ok(report.status.exit_code())
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Irreps { group, out } => {
            let g = FiniteGroup::builtin(&group)?;
            let summary = GroupSummary::new(&g)?;
            let json = format!(
                "{}\n",
                serde_json::to_string_pretty(&summary).expect("serializes")
            );
            if let Some(path) = &out.output {
                write_file(path, &json)?;
            }
            let text = if out.json {
                json
            } else {
                g.character_table()?.render(&g)
            };
            emit(stdout, &text)?;
            Ok(EXIT_OK)
        }
        Command::OrbitTypes { model, out } => {
            let (group, mc) = model.config();
            let m = mc.build(group.as_ref())?;
            let summary = ModelSummary::new(&m)?;
            let json = format!(
                "{}\n",
                serde_json::to_string_pretty(&summary).expect("serializes")
            );
            if let Some(path) = &out.output {
                write_file(path, &json)?;
            }
            let text = if out.json {
                json
            } else {
                let mut s = format!(
                    "{}: {} points, {} samples\n",
                    summary.name, summary.points, summary.samples
                );
                for c in &summary.components {
                    s += &format!(
                        "component {}: minimal isotropy {}\n",
                        c.name, c.minimal_isotropy
                    );
                }
                for ot in &summary.orbit_types {
                    s += &format!(
                        "stabilizer {} (order {}): {}\n",
                        ot.stabilizer,
                        ot.order,
                        ot.points.join(" ")
                    );
                }
                s
            };
            emit(stdout, &text)?;
            Ok(EXIT_OK)
        }
        Command::Spectrum { model, alpha, out } => {
            let (group, mc) = model.config();
            let cfg = RunConfig {
                name: Some(format!("spectrum/{}", model.model)),
                alphas: alphas(&alpha),
                group,
                model: Some(mc),
                spectrum: true,
                ..Default::default()
            };
            finish_run(&cfg, &out, stdout)
        }
        Command::AlphaCheck {
            model,
            family,
            alpha,
            rep,
            seed,
            threshold,
            out,
        } => {
            let (group, mc) = model.config();
            let cfg = RunConfig {
                name: Some(format!("alpha-check/{}", model.model)),
                seed,
                alphas: alphas(&alpha),
                group,
                model: Some(mc),
                bundle: Some(BundleConfig {
                    rep: RepSpec::Named(rep),
                }),
                symbols: Some(SymbolsConfig {
                    families: families::<SymbolFamily>(&family)?,
                    threshold,
                }),
                spectrum: false,
                ..Default::default()
            };
            cfg.validate()?;
            finish_run(&cfg, &out, stdout)
        }
        Command::FredholmVerify {
            scenario,
            family,
            alpha,
            radii,
            eps,
            local_radius,
            skip_local,
            isotype,
            out,
        } => {
            let mut circle = CircleConfig::for_scenario(&scenario);
            circle.families = families::<CircleFamily>(&family)?;
            if let Some(r) = radii {
                circle.radii = r;
            }
            if let Some(e) = eps {
                circle.eps = e;
            }
            if let Some(r) = local_radius {
                circle.local_radius = r;
            }
            circle.skip_local = skip_local;
            if isotype {
                circle.compression = Compression::Isotype;
            }
            let cfg = RunConfig {
                name: Some(format!("fredholm-verify/{scenario}")),
                alphas: alphas(&alpha),
                circle: Some(circle),
                ..Default::default()
            };
            cfg.validate()?;
            finish_run(&cfg, &out, stdout)
        }
        Command::Scenarios { json } => {
            let entries = catalog()?;
            let text = if json {
                format!(
                    "{}\n",
                    serde_json::to_string_pretty(&entries).expect("serializes")
                )
            } else {
                entries
                    .iter()
                    .map(|e| format!("{:<7} {:<22} {:<8} {}\n", e.kind, e.name, e.group, e.regime))
                    .collect()
            };
            emit(stdout, &text)?;
            Ok(EXIT_OK)
        }
        Command::Run { config, out } => {
            let cfg = RunConfig::load(&config)?;
            finish_run(&cfg, &out, stdout)
        }
    }
}

/// Run the command line with explicit arguments, writing to `stdout` and
/// `stderr`. Returns the process exit code.
pub fn main_with<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    match execute(cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            error_exit_code(&e)
        }
    }
}

pub fn main() -> i32 {
    main_with(
        std::env::args_os(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}
