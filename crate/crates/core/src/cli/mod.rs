//! Command-line front end. Every output embeds the curve, a digest of the
//! effective configuration and the tool version; with identical flags the
//! output bytes are identical for any thread count.
//!
//! Exit codes: 0 success, 1 usage error, 2 numeric failure.

mod commands;
mod config;
mod render;

pub use config::{expand_args, parse_config, ConfigFile};
pub use render::Format;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

use crate::counting::Method;
use crate::error::Error;
use crate::expsums::{DEFAULT_EPSILON, DEFAULT_TOL};
use crate::provenance::config_digest;
use crate::rational::{Delta, Interval};

#[derive(Debug, Parser)]
#[command(
    name = "nearcurve",
    version,
    about = "Counts rational points near planar curves and checks the analytic estimates behind the count",
    args_override_self = true
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Flat key=value file of flags; explicit flags override it
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Worker threads; 0 picks the number of cores
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Write the primary output here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write two-column plot data and a description file into this directory
    #[arg(long = "emit-plot", global = true, value_name = "DIR")]
    pub emit_plot: Option<PathBuf>,
    /// Record wall-clock times and a timestamp (outputs stop being reproducible)
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    /// Curve text: `poly:c0,c1,...`, `exp:c0,...`, `cos` or `fermat:d`,
    /// optionally followed by `; interval:lo,hi`
    #[arg(long)]
    pub curve: String,
    /// Closed interval `lo,hi` of exact rationals; also the curve domain when
    /// the curve text has none
    #[arg(long, allow_hyphen_values = true)]
    pub interval: Option<Interval>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    #[value(name = "Q")]
    Q,
    Delta,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// N(Q, delta) for one query
    #[command(args_override_self = true)]
    Count {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long = "Q")]
        q: u64,
        /// `p/q` for exact arithmetic or a decimal for float paths
        #[arg(long)]
        delta: Delta,
        #[arg(long, default_value_t = Method::Fast)]
        method: Method,
    },
    /// Counts over a (Q, delta) grid
    #[command(args_override_self = true)]
    Scan {
        #[command(flatten)]
        curve: CurveArgs,
        /// Comma-separated Q values
        #[arg(long = "Q", default_value = "500,1000,2000,4000")]
        qs: String,
        /// Comma-separated delta values
        #[arg(long = "delta", default_value = "0.05,0.1,0.2,0.25,0.4")]
        deltas: String,
        #[arg(long, default_value_t = Method::Fast)]
        method: Method,
    },
    /// sum e(k q f(a/q)) over the sequence
    #[command(args_override_self = true)]
    Expsum {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long = "Q")]
        q: u64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        k: i64,
    },
    /// Window discrepancy of the fractional parts against the Erdős-Turán bound
    #[command(args_override_self = true)]
    Discrepancy {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long = "Q")]
        q: u64,
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<f64>,
        /// Fourier truncation
        #[arg(long = "K", default_value_t = 100)]
        k: u64,
        /// Draw this many random windows and truncations instead
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Truncated Poisson summation for a phase g on a range
    #[command(args_override_self = true)]
    Poisson {
        /// Phase in curve grammar, e.g. `poly:0,0,10`
        #[arg(long)]
        g: String,
        /// Summation range `c,d`
        #[arg(long, allow_hyphen_values = true)]
        range: Interval,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// lambda^(1/d) |integral e(lambda f)| over a geometric lambda grid
    #[command(args_override_self = true)]
    Vdc {
        #[command(flatten)]
        curve: CurveArgs,
        /// Derivative order bounded below
        #[arg(long)]
        d: usize,
        /// Grid points per decade over lambda in [10, 10^4]
        #[arg(long = "per-decade", default_value_t = 4)]
        per_decade: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// The six dual-curve sums and their right-hand shapes
    #[command(args_override_self = true)]
    Dualsum {
        #[command(flatten)]
        curve: CurveArgs,
        /// `all` or comma-separated names such as `2.40,2.43`
        #[arg(long, default_value = "all")]
        variant: String,
        /// K0, or K2 for the ranged variants
        #[arg(long = "K")]
        k: u64,
        /// Lower end of the ranged variants; defaults to K/2
        #[arg(long = "K1")]
        k1: Option<u64>,
        #[arg(long = "Q0")]
        q0: f64,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
    },
    /// Log-log slope of N from a scan CSV
    #[command(args_override_self = true)]
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        axis: AxisArg,
        /// Value of the variable held fixed
        #[arg(long)]
        fixed: f64,
    },
    /// Sharpness constructions
    #[command(subcommand)]
    Examples(Example),
    /// Dual function f*(y) = y x - f(x) with f'(x) = y
    #[command(args_override_self = true)]
    Dual {
        #[command(flatten)]
        curve: CurveArgs,
        /// Comma-separated slopes y
        #[arg(long, allow_hyphen_values = true)]
        y: Option<String>,
        /// Grid size for the check (f*)* = f
        #[arg(long)]
        roundtrip: Option<usize>,
    },
}

#[derive(Debug, Subcommand)]
pub enum Example {
    /// Points (aq, q^2) on the parabola against the on-curve count
    #[command(args_override_self = true)]
    Parabola {
        #[arg(long = "Q")]
        q: u64,
    },
    /// Counts near (1 - y^d)^(1/d) against delta^(1/d) Q^(2-1/d) + delta Q^2
    #[command(args_override_self = true)]
    Fermat {
        #[arg(long, default_value_t = 3)]
        d: u32,
        #[arg(long = "Q", default_value = "500,1000,2000,4000,8000")]
        qs: String,
        /// `default` for Q^(-1/(d-1))/2, or a constant
        #[arg(long = "delta-rule", default_value = "default")]
        rule: String,
        #[arg(long, allow_hyphen_values = true)]
        interval: Option<Interval>,
    },
}

/// Flags that never change the primary output bytes.
const UNDIGESTED: [&str; 4] = ["config", "threads", "out", "emit_plot"];

fn collect_config(m: &ArgMatches, map: &mut BTreeMap<String, String>) {
    for id in m.ids() {
        let key = id.as_str();
        if UNDIGESTED.contains(&key) {
            continue;
        }
        if let Ok(Some(raw)) = m.try_get_raw(key) {
            let v: Vec<String> = raw.map(|s| s.to_string_lossy().into_owned()).collect();
            map.insert(key.to_string(), v.join(","));
        }
    }
    if let Some((name, sub)) = m.subcommand() {
        let cmd = map.remove("command").map(|c| format!("{c} {name}")).unwrap_or(name.into());
        map.insert("command".into(), cmd);
        collect_config(sub, map);
    }
}

/// Digest of every effective setting except the ones in [`UNDIGESTED`].
pub fn digest_matches(m: &ArgMatches) -> String {
    let mut map = BTreeMap::new();
    collect_config(m, &mut map);
    config_digest(&map)
}

fn exit_code(e: &Error) -> i32 {
    if e.is_numeric() {
        2
    } else {
        1
    }
}

/// Runs the tool on `argv` (program name first) and returns the exit code.
pub fn run<I: IntoIterator<Item = String>>(argv: I) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, O, E>(argv: I, stdout: &mut O, stderr: &mut E) -> i32
where
    I: IntoIterator<Item = String>,
    O: Write,
    E: Write,
{
    let args = match expand_args(argv.into_iter().collect()) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 1;
        }
    };
    let matches = match Cli::command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    1
                }
            };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return 1;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.threads)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start thread pool: {e}");
            return 1;
        }
    };
    let ctx = commands::Ctx::new(&cli.global, digest_matches(&matches));
    let result = pool.install(|| commands::execute(&ctx, &cli.command));
    let outcome = result.and_then(|out| {
        for w in &out.warnings {
            let _ = writeln!(stderr, "warning: {w}");
        }
        match &cli.global.out {
            Some(path) => std::fs::write(path, &out.bytes)?,
            None => stdout.write_all(&out.bytes)?,
        }
        Ok(())
    });
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
