use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use heisenberg_dual::suites::all_suites;
use heisenberg_dual_cli::{
    cmd_check, cmd_simulate, load_config, ConfigError, RawConfig, EXIT_FAILURE, EXIT_USAGE,
};

#[derive(Parser)]
#[command(
    name = "hdual",
    version,
    about = "Heisenberg-group representations: identity checks and phase-space simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Run every identity suite (the default)
    Check,
    /// Evolve a quadratic observable and write its coefficient trajectory as CSV
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// classical | quantum
    #[arg(long)]
    mode: Option<String>,
    /// harmonic | free | c1,cq,cp,cqq,cqp,cpp | quadratic expression in q, p
    #[arg(long, allow_hyphen_values = true)]
    hamiltonian: Option<String>,
    /// q | p | energy | c1,cq,cp,cqq,cqp,cpp | quadratic expression in q, p
    #[arg(long, allow_hyphen_values = true)]
    observable: Option<String>,
    /// Reduced Planck constant, nonzero [default: 1/(2π)]
    #[arg(long, allow_hyphen_values = true)]
    hbar: Option<String>,
    /// Final time [default: 2π]
    #[arg(long, allow_hyphen_values = true)]
    t_end: Option<String>,
    /// RK4 step [default: 1e-3]
    #[arg(long, allow_hyphen_values = true)]
    dt: Option<String>,
    /// paper | egorov (quantum mode only) [default: egorov]
    #[arg(long)]
    convention: Option<String>,
    /// Output file [default: standard output]
    #[arg(long)]
    out: Option<PathBuf>,
    /// File of `key=value` lines; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

impl SimulateArgs {
    fn flags(&self) -> Result<RawConfig, ConfigError> {
        let mut raw = RawConfig::new();
        let pairs = [
            ("mode", &self.mode),
            ("hamiltonian", &self.hamiltonian),
            ("observable", &self.observable),
            ("hbar", &self.hbar),
            ("t_end", &self.t_end),
            ("dt", &self.dt),
            ("convention", &self.convention),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                raw.set(key, v)?;
            }
        }
        Ok(raw)
    }
}

fn simulate(args: &SimulateArgs) -> u8 {
    let cfg = match args
        .flags()
        .and_then(|flags| load_config(args.config.as_deref(), &flags))
    {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match cmd_simulate(&cfg, args.out.as_deref(), &mut io::stderr()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command.unwrap_or(Command::Check) {
        Command::Check => {
            cmd_check(&all_suites(), &mut io::stdout().lock()).unwrap_or(EXIT_FAILURE)
        }
        Command::Simulate(args) => simulate(&args),
    };
    ExitCode::from(code)
}
