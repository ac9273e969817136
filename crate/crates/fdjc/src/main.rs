use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fdjc::config::{load_config, Mode, RunConfig};
use fdjc::driver::{self, RunReport};
use fdjc::error::RunError;
use fdjc::presets;

#[derive(Parser)]
#[command(
    name = "fdjc",
    version,
    about = "Jaynes-Cummings dynamics of a falling atom with a deformed cavity field"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one configuration and write CSV, SVG and manifest files.
    Run(RunArgs),
    /// Run every point of the configuration's [sweep] table.
    Sweep(RunArgs),
    /// List the figure presets.
    PresetList,
    /// Check the deformed operator algebra on truncated matrices.
    Verify {
        /// Fock-space truncation.
        #[arg(long, default_value_t = 20)]
        dim: usize,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset to start from; replaces any preset named in the file.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

impl RunArgs {
    fn load(&self) -> Result<(RunConfig, PathBuf), RunError> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => RunConfig::default(),
        };
        if let Some(name) = &self.preset {
            presets::preset(name)?;
            cfg.preset = Some(name.clone());
        }
        if self.mode.is_some() {
            cfg.mode = self.mode;
        }
        let out = self
            .out
            .clone()
            .or_else(|| cfg.out_dir.clone())
            .unwrap_or_else(|| Path::new("fdjc-out").join(cfg.preset.as_deref().unwrap_or("run")));
        Ok((cfg, out))
    }
}

fn report(r: &RunReport) {
    println!("wrote {} files to {}", r.files.len(), r.out_dir.display());
    for out in &r.outputs {
        if let Some(d) = out.max_abs_diff() {
            println!("  {}: max |abs_diff| = {d:.3e}", out.observable);
        }
    }
}

fn execute(command: Command) -> Result<(), RunError> {
    match command {
        Command::Run(args) => {
            let (cfg, out) = args.load()?;
            report(&driver::run(&cfg.resolve()?, &out, args.threads)?);
        }
        Command::Sweep(args) => {
            let (cfg, out) = args.load()?;
            for r in driver::sweep(&cfg, &out, args.threads)? {
                report(&r);
            }
        }
        Command::PresetList => {
            for name in presets::names() {
                let p = presets::preset(&name)?;
                let outputs: Vec<_> = p.outputs.iter().map(|o| o.name()).collect();
                println!("{name}  kg={:e}  outputs={}", p.physics.kg, outputs.join(","));
            }
        }
        Command::Verify { dim } => {
            let rows = driver::verify(dim);
            print!("{}", driver::verify_table(&rows));
            let failed = rows.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                return Err(RunError::Verification {
                    failed,
                    total: rows.len(),
                });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
