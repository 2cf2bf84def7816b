use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use thiserror::Error;

use jcxy::analytic::{charpoly_closed, charpoly_open_second};
use jcxy::exactpoly::{
    certify_factorization, charpoly_exact, parse_rational, rational_hamiltonian, real_roots,
    Rational,
};
use jcxy::model::ModelError;
use jcxy::spectral::{SpectralError, DEFAULT_CONV_TOL};
use jcxy::sweep::{self, format_g17, Format, SweepError, SweepSpec};
use jcxy::verify::{self, Scope, DEFAULT_SEED};
use jcxy::{spectrum_of, Chain, Tolerances, Topology};

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) | CliError::Io { .. } => 2,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Invalid(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::Model(m) => m.into(),
            SpectralError::BadTolerance(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Invalid(_) => CliError::Usage(e.to_string()),
            SweepError::Row { source, .. } => source.into(),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

/// Spectra of a cavity mode coupled to one spin of an XY spin chain.
#[derive(Debug, Parser)]
#[command(name = "jcxy", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Energy levels at a single (G, J).
    Spectrum {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        couplings: Couplings,
        #[command(flatten)]
        tols: TolArgs,
        #[arg(long, value_enum, default_value_t = SpectrumFormat::Text)]
        format: SpectrumFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Levels along G = C cos(phi), J = C sin(phi).
    Sweep {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = sweep::DEFAULT_POINTS)]
        points: usize,
        #[arg(long, allow_hyphen_values = true, default_value_t = sweep::DEFAULT_PHI_MIN)]
        phi_min: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = sweep::DEFAULT_PHI_MAX)]
        phi_max: f64,
        #[command(flatten)]
        tols: TolArgs,
        #[arg(long, value_enum, default_value_t = SweepFormat::Csv)]
        format: SweepFormat,
        /// Output file; the gnuplot script is written here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact characteristic polynomial det(E - H) at rational (G, J).
    Charpoly {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        couplings: Couplings,
        /// Compare against a closed-form four-spin factorization.
        #[arg(long, value_enum)]
        claim: Option<Claim>,
        /// Also print the real roots.
        #[arg(long)]
        roots: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in check suite.
    Verify {
        #[arg(long, default_value = "all")]
        scope: Scope,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct ChainArgs {
    #[arg(long, default_value_t = 4)]
    spins: usize,
    #[arg(long, default_value = "open")]
    topology: Topology,
    /// 1-based index of the spin coupled to the cavity.
    #[arg(long, default_value_t = 1)]
    site: usize,
}

impl ChainArgs {
    fn chain(&self) -> Result<Chain, CliError> {
        let chain = Chain::new(self.spins, self.topology, self.site);
        chain.validate()?;
        Ok(chain)
    }
}

#[derive(Debug, Args)]
struct Couplings {
    /// Light-matter coupling, as a decimal or p/q.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_rational)]
    g: Rational,
    /// Exchange coupling, as a decimal or p/q.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_rational)]
    j: Rational,
}

fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Args)]
struct TolArgs {
    #[arg(long, default_value_t = DEFAULT_CONV_TOL)]
    tol_conv: f64,
    /// Absolute clustering tolerance; defaults to 1e-9 max(1, max|H_ij|).
    #[arg(long)]
    tol_cluster: Option<f64>,
}

impl TolArgs {
    fn tolerances(&self) -> Tolerances {
        Tolerances {
            conv: self.tol_conv,
            cluster: self.tol_cluster,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SpectrumFormat {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SweepFormat {
    Csv,
    Json,
    Gnuplot,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Claim {
    /// Open four-spin chain, photon on spin 2 or 3.
    OpenSecond,
    /// Four-spin ring, any site.
    Closed,
}

fn write_output(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_spectrum(
    chain: Chain,
    couplings: &Couplings,
    tols: Tolerances,
    format: SpectrumFormat,
) -> Result<String, CliError> {
    let config = chain.with_couplings(to_f64(&couplings.g), to_f64(&couplings.j));
    config.validate()?;
    let s = spectrum_of(&config, &tols)?;
    let mut out = String::new();
    match format {
        SpectrumFormat::Text => {
            let _ = writeln!(out, "# {chain} G={} J={}", couplings.g, couplings.j);
            let _ = writeln!(out, "# energy multiplicity");
            for l in s.levels.iter().rev() {
                let _ = writeln!(out, "{} {}", format_g17(l.energy), l.multiplicity);
            }
        }
        SpectrumFormat::Csv => {
            out.push_str("level_index,energy,multiplicity\n");
            for (i, l) in s.levels.iter().enumerate() {
                let _ = writeln!(out, "{i},{},{}", format_g17(l.energy), l.multiplicity);
            }
        }
        SpectrumFormat::Json => {
            out = serde_json::to_string_pretty(&s).map_err(|e| CliError::Failed(e.to_string()))?;
            out.push('\n');
        }
    }
    Ok(out)
}

fn run_charpoly(
    chain: Chain,
    couplings: &Couplings,
    claim: Option<Claim>,
    roots: bool,
) -> Result<(String, bool), CliError> {
    let (g, j) = (&couplings.g, &couplings.j);
    let mut out = String::new();
    let mut ok = true;
    match claim {
        None => {
            let h =
                rational_hamiltonian(&chain, g, j).map_err(|e| CliError::Failed(e.to_string()))?;
            let p = charpoly_exact(&h);
            let _ = writeln!(out, "# det(E - H) for {chain} G={g} J={j}");
            let _ = writeln!(out, "{p}");
            if roots {
                match real_roots(&p) {
                    Ok(r) => {
                        let _ = writeln!(out, "# roots");
                        for x in r.iter().rev() {
                            let _ = writeln!(out, "{}", format_g17(*x));
                        }
                    }
                    Err(e) => return Err(CliError::Failed(e.to_string())),
                }
            }
        }
        Some(claim) => {
            if chain.n_spins != 4 {
                return Err(CliError::Usage("--claim needs --spins 4".into()));
            }
            let claimed = match claim {
                Claim::OpenSecond => charpoly_open_second(g.clone(), j.clone()),
                Claim::Closed => charpoly_closed(g.clone(), j.clone()),
            };
            let cert = certify_factorization(&chain, g, j, &claimed)
                .map_err(|e| CliError::Failed(e.to_string()))?;
            let _ = writeln!(out, "# {chain} G={g} J={j}");
            let _ = write!(out, "{cert}");
            ok = cert.equal;
        }
    }
    Ok((out, ok))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Spectrum {
            chain,
            couplings,
            tols,
            format,
            out,
        } => {
            let text = run_spectrum(chain.chain()?, &couplings, tols.tolerances(), format)?;
            write_output(out.as_ref(), &text)
        }
        Command::Sweep {
            chain,
            c,
            points,
            phi_min,
            phi_max,
            tols,
            format,
            out,
        } => {
            let spec = SweepSpec {
                c,
                n_points: points,
                phi_min,
                phi_max,
                chain: chain.chain()?,
            };
            let table = sweep::sweep_phi(&spec, &tols.tolerances())?;
            let format = match format {
                SweepFormat::Csv => Format::Csv,
                SweepFormat::Json => Format::Json,
                SweepFormat::Gnuplot => Format::Gnuplot,
            };
            write_output(out.as_ref(), &sweep::emit(&table, format)?)
        }
        Command::Charpoly {
            chain,
            couplings,
            claim,
            roots,
            out,
        } => {
            let (text, ok) = run_charpoly(chain.chain()?, &couplings, claim, roots)?;
            write_output(out.as_ref(), &text)?;
            if ok {
                Ok(())
            } else {
                Err(CliError::Failed("factorization does not match".into()))
            }
        }
        Command::Verify { scope, seed, out } => {
            let report = verify::verify(scope, seed);
            write_output(out.as_ref(), &report.to_string())?;
            if report.ok() {
                Ok(())
            } else {
                Err(CliError::Failed(format!(
                    "{} check(s) failed",
                    report.failed()
                )))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("jcxy: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
