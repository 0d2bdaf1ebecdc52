use alkdimer::corecore::{CoreCoreModel, DispersionSource, Repulsion};
use alkdimer::data::{load_reference_table, load_vcc_reference, BasisVariant, DataDir, Element, Series};
use alkdimer::pipeline::{self, config::JobConfig, fit::FIT_TARGETS};
use alkdimer::Error;
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_BREACH: u8 = 4;

#[derive(Parser)]
#[command(name = "alkdimer", version, about = "Permanent dipole moments of heteronuclear alkali dimers")]
struct Cli {
    /// Data directory (defaults to $ALKDIMER_DATA, then the bundled data/).
    #[arg(long, global = true)]
    data_dir: Option<PathBuf>,
    /// Worker threads for the R scan.
    #[arg(long, short, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the ECP and polarization cutoffs of one atom, or of every atom.
    AtomFit {
        #[arg(long, required_unless_present = "all")]
        atom: Option<Element>,
        #[arg(long, default_value = "B")]
        series: Series,
        #[arg(long, default_value = "raw")]
        variant: BasisVariant,
        /// Fit every atom and series combination used by the scans.
        #[arg(long)]
        all: bool,
        /// Output directory (defaults to <data-dir>/fitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the X and a state curves over the configured R grid.
    Scan { configs: Vec<PathBuf> },
    /// Vibrational levels and vibrationally averaged dipoles.
    Vib { configs: Vec<PathBuf> },
    /// Core-core dispersion and repulsion at the tabulated distances.
    VccTable {
        #[arg(long, default_value = "A")]
        series: Series,
        /// Dispersion from the ionization energies of the neutral atoms or the ions.
        #[arg(long, default_value = "neutral")]
        ionization: String,
        /// Repulsion amplitude and decay constant `A,b` in atomic units.
        #[arg(long, value_parser = parse_repulsion)]
        repulsion: Option<Repulsion>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare computed dipoles against the reference table.
    Compare {
        configs: Vec<PathBuf>,
        /// Exit with status 4 when |D(v=0)| deviates by more than THRESHOLD
        /// (relative) or the ordering differs.
        #[arg(long, value_name = "THRESHOLD", num_args = 0..=1, default_missing_value = "0.05")]
        strict: Option<f64>,
        /// Reference table (defaults to <data-dir>/reference/dipole_table.csv).
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Directory for comparison.csv and comparison.txt.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Collect every curve and level table into one long CSV.
    PlotData {
        configs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_repulsion(s: &str) -> Result<Repulsion, String> {
    let (a, b) = s.split_once(',').ok_or("expected A,b")?;
    let a: f64 = a.trim().parse().map_err(|e| format!("A: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("b: {e}"))?;
    Ok(Repulsion { a, b })
}

enum Failure {
    Lib(Error),
    Points(String),
    Breach(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Invalid(_) | Error::Io { .. } | Error::Config(_) => EXIT_INPUT,
        _ => EXIT_NUMERICAL,
    }
}

fn load_all(paths: &[PathBuf]) -> Result<Vec<JobConfig>, Error> {
    if paths.is_empty() {
        return Err(Error::Config("no configuration files given".into()));
    }
    paths.iter().map(|p| JobConfig::load(p)).collect()
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let data = cli.data_dir.map(DataDir::new).unwrap_or_else(DataDir::from_env);
    let jobs = cli.jobs.max(1);
    match cli.command {
        Command::AtomFit {
            atom,
            series,
            variant,
            all,
            out,
        } => {
            let out = out.unwrap_or_else(|| data.root().join("fitted"));
            let targets: Vec<(Element, Series)> = if all {
                FIT_TARGETS.to_vec()
            } else {
                vec![(atom.expect("clap requires --atom"), series)]
            };
            let mut failed = Vec::new();
            for (atom, series) in targets {
                let r = pipeline::fit::run_atom_fit(&data, atom, series, variant, &out)?;
                let [s, p, d] = r.lowest_residuals_cm1;
                println!(
                    "{atom} {series}: {} residuals s {s:+.3} p {p:+.3} d {d:+.3} cm-1, rho_s,p,d,f = {:.4?} a0",
                    if r.converged { "converged," } else { "NOT converged," },
                    r.rho
                );
                if !r.converged {
                    failed.push(format!("{atom} {series}"));
                }
            }
            if !failed.is_empty() {
                return Err(Failure::Lib(Error::Fit(format!("not converged: {}", failed.join(", ")))));
            }
        }
        Command::Scan { configs } => {
            let mut failed = 0;
            for cfg in load_all(&configs)? {
                let out = pipeline::scan::run_scan(&cfg, &data, jobs)?;
                for p in out.points.iter().filter_map(|p| p.result.as_ref().err().map(|e| (p.r, e))) {
                    log::error!("{} R = {}: {}", cfg.molecule, p.0, p.1);
                }
                for (state, s) in &out.summaries {
                    match s {
                        Some(s) => println!(
                            "{} {} {}: R_e = {:.3} a0, D_e = {:.1} cm-1, D(R_e) = {}",
                            cfg.molecule,
                            cfg.series,
                            state.tag(),
                            s.r_e,
                            s.d_e_cm1,
                            s.d_re.map(|d| format!("{d:.3} D")).unwrap_or_else(|| "-".into())
                        ),
                        None => println!("{} {} {}: no well", cfg.molecule, cfg.series, state.tag()),
                    }
                }
                println!("{} written to {}", cfg.molecule, cfg.output_dir.display());
                failed += out.failures;
            }
            if failed > 0 {
                return Err(Failure::Points(format!("{failed} grid points failed")));
            }
        }
        Command::Vib { configs } => {
            for cfg in load_all(&configs)? {
                let out = pipeline::run_vib(&cfg, &data)?;
                for (state, t) in &out.tables {
                    let v0 = t.levels.first();
                    println!(
                        "{} {} {}: {} levels, v=0 at {:.2} cm-1 with D = {}",
                        cfg.molecule,
                        cfg.series,
                        state.tag(),
                        t.levels.len(),
                        v0.map_or(f64::NAN, |l| l.energy_cm1),
                        v0.and_then(|l| l.dipole_debye).map(|d| format!("{d:.4} D")).unwrap_or_else(|| "-".into())
                    );
                }
            }
        }
        Command::VccTable {
            series,
            ionization,
            repulsion,
            out,
        } => {
            let source = match ionization.as_str() {
                "neutral" => DispersionSource::NeutralAtomIp,
                "ion" => DispersionSource::IonIp,
                other => return Err(Error::Config(format!("--ionization must be neutral or ion, got {other}")).into()),
            };
            let model = CoreCoreModel {
                dispersion: true,
                dispersion_source: source,
                repulsion,
                ..CoreCoreModel::default()
            };
            let entries: Vec<(String, f64)> = load_vcc_reference(&data.reference_path("vcc_table.csv"))?
                .into_iter()
                .map(|r| (r.molecule, r.re))
                .collect();
            let rows = pipeline::run_vcc_table(&data, &entries, series, &model)?;
            let csv = pipeline::vcc_csv(&rows);
            match out {
                Some(p) => write(&p, &csv)?,
                None => print!("{csv}"),
            }
        }
        Command::Compare {
            configs,
            strict,
            reference,
            out,
        } => {
            let reference = load_reference_table(&reference.unwrap_or_else(|| data.reference_path("dipole_table.csv")))?;
            let rows = load_all(&configs)?
                .iter()
                .map(|c| pipeline::computed_row(c, &data))
                .collect::<Result<Vec<_>, _>>()?;
            let report = pipeline::run_compare(rows, &reference);
            print!("{}", report.to_text());
            if let Some(dir) = out {
                write(&dir.join("comparison.csv"), &report.to_csv())?;
                write(&dir.join("comparison.txt"), &report.to_text())?;
            }
            if let Some(t) = strict {
                let b = report.breaches(t);
                if !b.is_empty() {
                    return Err(Failure::Breach(b));
                }
            }
        }
        Command::PlotData { configs, out } => {
            let csv = pipeline::plot_data(&load_all(&configs)?)?;
            write(&out, &csv)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Points(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
        Err(Failure::Breach(b)) => {
            for line in b {
                eprintln!("breach: {line}");
            }
            ExitCode::from(EXIT_BREACH)
        }
    }
}
