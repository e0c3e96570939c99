use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lumen::MethodId;
use lumen_cli::bench::{compare, enhance_image, run_benchmark, score, ReportFormat, RunManifest};
use lumen_cli::config::RunConfig;
use lumen_cli::io::{load_image, save_image};
use lumen_cli::{CliError, Result};

#[derive(Parser, Debug)]
#[command(
    name = "lumen",
    version,
    about = "Contrast enhancement pipelines and quality metrics"
)]
struct Cli {
    /// Print the effective configuration and exit.
    #[arg(long, global = true)]
    print_config: bool,

    /// Configuration file (`section.key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enhance one image and print its metrics as JSON.
    Enhance {
        #[arg(long, short)]
        method: MethodId,
        input: PathBuf,
        output: PathBuf,
    },
    /// Run methods over a corpus and write AMBE/PSNR/CII tables.
    Benchmark {
        /// Directory of .pgm/.png images.
        #[arg(long)]
        corpus: PathBuf,
        /// Output directory for tables and enhanced images.
        #[arg(long, short)]
        out: PathBuf,
        /// Comma-separated methods (default: HVS,HVSedge,HVSEDBI,MCLAHEFROST).
        #[arg(long, value_delimiter = ',')]
        methods: Vec<MethodId>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, env = "LUMEN_JOBS", default_value_t = 1)]
        jobs: usize,
    },
    /// Compute metrics between an original and an enhanced image.
    Metrics {
        original: PathBuf,
        enhanced: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Format {
    Csv,
    Json,
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Config {
                line: 0,
                reason: format!("{}: {e}", p.display()),
            })?;
            RunConfig::parse(&text)
        }
    }
}

fn image_id(path: &Path) -> String {
    path.file_name()
        .map_or_else(String::new, |n| n.to_string_lossy().into_owned())
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load_config(cli.config.as_deref())?;
    for w in cfg.pipeline.edbi.warnings() {
        eprintln!("warning: {w}");
    }
    if cli.print_config {
        print!("{}", cfg.render());
        return Ok(());
    }
    match cli.command {
        None => {
            eprintln!("no command given; see --help");
            Ok(())
        }
        Some(Command::Enhance {
            method,
            input,
            output,
        }) => {
            let img = load_image(&input)?;
            let (out, degenerate) = enhance_image(&img, method, &cfg)?;
            save_image(&out, &output)?;
            let report = score(
                &image_id(&input),
                method,
                &img,
                &out,
                cfg.cii_stride,
                degenerate,
            )?;
            println!("{}", report.to_json());
            Ok(())
        }
        Some(Command::Benchmark {
            corpus,
            out,
            methods,
            format,
            jobs,
        }) => {
            let methods = if methods.is_empty() {
                vec![
                    MethodId::Hvs,
                    MethodId::HvsEdge,
                    MethodId::HvsEdbi,
                    MethodId::MclaheFrost,
                ]
            } else {
                methods
            };
            let manifest = RunManifest {
                corpus_dir: corpus,
                methods,
                config: cfg,
                output_dir: out,
                format: match format {
                    Format::Csv => ReportFormat::Csv,
                    Format::Json => ReportFormat::Json,
                },
            };
            let result = run_benchmark(&manifest, jobs)?;
            for p in &result.report_paths {
                println!("{}", p.display());
            }
            Ok(())
        }
        Some(Command::Metrics { original, enhanced }) => {
            let a = load_image(&original)?;
            let b = load_image(&enhanced)?;
            if a.dims() != b.dims() {
                return Err(CliError::Pipeline(lumen::Error::DimensionMismatch {
                    left: a.dims(),
                    right: b.dims(),
                }));
            }
            println!("{}", compare(&a, &b, cfg.cii_stride)?.to_json());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
