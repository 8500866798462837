//! `qca`: classification, tensor-network construction and area-law audits
//! from the command line.
//!
//! Exit status is 0 on success, 2 when a report flags inconsistent
//! predicates (or a failing self-test) and 1 on every other error. Errors
//! are printed as a single line `error[code]: message`.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qca_core::channels::builtin::{self, PairConvention};
use qca_core::channels::{Channel, ChannelSpec};
use qca_core::classify::{self, ClassificationReport, ClassifyOptions};
use qca_core::entanglement::{self, AuditRegions, Metric, ProductStateSampler};
use qca_core::tensor::{ancilla_labels, physical_labels, DenseOperator, SiteLabel};
use qca_core::{selftest, tn, Error, Lattice, RegionPolicy};

#[derive(Parser)]
#[command(name = "qca", version, about = "Locality classes of quantum channels on qudit lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(clap::Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every locality predicate on a channel.
    Classify {
        /// `builtin:NAME`, an inline JSON spec, or a path to a JSON spec.
        #[arg(long)]
        channel: String,
        /// `1d,M=4,open` (optional `d=`, `r=`) or a JSON lattice object.
        #[arg(long)]
        lattice: String,
        #[arg(long, default_value_t = qca_core::DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value = "blocks")]
        regions: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Build the tensor-network form of a QCA.
    BuildPepu {
        #[arg(long)]
        channel: String,
        #[arg(long)]
        lattice: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// QCA range; defaults to the lattice range.
        #[arg(long)]
        range: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Entropy of channel outputs on product inputs across system sizes.
    AuditArealaw {
        /// Channel spec, instantiated at each size.
        #[arg(long)]
        family: String,
        /// Lattice template; its `M` is replaced by each size.
        #[arg(long, default_value = "1d,M=4,periodic")]
        lattice: String,
        #[arg(long, value_delimiter = ',', default_value = "4,5,6")]
        sizes: Vec<usize>,
        #[arg(long, default_value = "mi")]
        metric: String,
        #[arg(long, default_value = "blocks")]
        regions: String,
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Reproduce one of the worked examples.
    RunExample {
        #[arg(long, value_parser = ["example1", "example2", "example3"])]
        name: String,
        #[arg(long)]
        lattice: String,
        /// `classify` (default for example1), `validity` (example2) or `mi`
        /// (example3).
        #[arg(long)]
        report: Option<String>,
        #[arg(long, default_value_t = qca_core::DEFAULT_TOL)]
        tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the invariant suite.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

enum Failure {
    Usage(String),
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn line(&self) -> String {
        let (code, message) = match self {
            Failure::Usage(m) => ("usage", m.clone()),
            Failure::Lib(e) => (e.code(), e.to_string()),
            Failure::Io(m) => ("io", m.clone()),
        };
        format!("error[{code}]: {}", message.split_whitespace().collect::<Vec<_>>().join(" "))
    }
}

type Outcome = Result<bool, Failure>;

fn parse<T: std::str::FromStr<Err = Error>>(text: &str) -> Result<T, Failure> {
    text.parse().map_err(Failure::Lib)
}

fn channel_spec(text: &str) -> Result<ChannelSpec, Failure> {
    let trimmed = text.trim();
    if trimmed.starts_with("builtin:") || trimmed.starts_with('{') {
        return Ok(ChannelSpec::parse(trimmed)?);
    }
    let contents = fs::read_to_string(trimmed).map_err(|e| Failure::Io(format!("cannot read `{trimmed}`: {e}")))?;
    Ok(ChannelSpec::parse(&contents)?)
}

fn emit(out: &OutputArgs, json: impl Serialize, csv: Option<String>) -> Result<(), Failure> {
    let text = match out.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&json).map_err(|e| Failure::Lib(e.into()))?;
            s.push('\n');
            s
        }
        Format::Csv => csv.ok_or_else(|| Failure::Usage("this report has no CSV form".into()))?,
    };
    match &out.output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write `{}`: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

fn classification_csv(report: &ClassificationReport) -> String {
    let mut s = String::from("region,cpqc,cpqc_heisenberg,lpqc,fqc\n");
    for r in &report.per_region {
        let region: Vec<String> = r.region.iter().map(|n| n.to_string()).collect();
        s.push_str(&format!(
            "{},{:e},{:e},{:e},{:e}\n",
            region.join(" "),
            r.cpqc_residual,
            r.cpqc_heisenberg_residual,
            r.lpqc_residual,
            r.fqc_residual
        ));
    }
    s
}

fn classify_report(channel: &Channel, tol: f64, policy: RegionPolicy, out: &OutputArgs) -> Outcome {
    let report = classify::evaluate(channel, ClassifyOptions { tol, policy })?;
    let csv = classification_csv(&report);
    emit(out, &report, Some(csv))?;
    if !report.is_consistent() {
        eprintln!("error[inconsistent]: {}", report.violations.join("; "));
    }
    Ok(report.is_consistent())
}

#[derive(Serialize)]
struct PairInformation {
    x: Vec<SiteLabel>,
    y: Vec<SiteLabel>,
    mutual_information: f64,
}

#[derive(Serialize)]
struct Example3Report {
    example: &'static str,
    version: &'static str,
    lattice: Lattice,
    convention: PairConvention,
    pairs: Vec<PairInformation>,
    half_region: Vec<usize>,
    half_region_mutual_information: f64,
    straddling_pairs: usize,
}

fn example3_report(lattice: &Lattice) -> Result<(Example3Report, String), Failure> {
    let convention = PairConvention::Disjoint;
    let channel = builtin::example3(lattice, convention)?;
    let pair_list = builtin::half_shift_pairs(lattice);
    let mut pairs = Vec::new();
    let mut csv = String::from("x,y,mutual_information\n");
    for &(a, b) in &pair_list {
        let x = vec![SiteLabel::physical(a), SiteLabel::ancilla(a)];
        let y = vec![SiteLabel::physical(b), SiteLabel::ancilla(b)];
        let mi = entanglement::cjs_mutual_information(&channel, &x, &y)?;
        csv.push_str(&format!("{a} {a}',{b} {b}',{mi}\n"));
        pairs.push(PairInformation { x, y, mutual_information: mi });
    }
    let half: Vec<usize> = (0..lattice.num_sites()).filter(|&n| lattice.coords(n)[0] < lattice.size() / 2).collect();
    let rest: Vec<usize> = (0..lattice.num_sites()).filter(|n| !half.contains(n)).collect();
    let x = [physical_labels(&half), ancilla_labels(&half)].concat();
    let y = [physical_labels(&rest), ancilla_labels(&rest)].concat();
    let half_mi = entanglement::cjs_mutual_information(&channel, &x, &y)?;
    let report = Example3Report {
        example: "example3",
        version: qca_core::VERSION,
        lattice: lattice.clone(),
        convention,
        pairs,
        half_region: half,
        half_region_mutual_information: half_mi,
        straddling_pairs: pair_list.len(),
    };
    Ok((report, csv))
}

#[derive(Serialize)]
struct Example2Report {
    example: &'static str,
    version: &'static str,
    lattice: Lattice,
    min_eigenvalue: f64,
    marginal_deviation: f64,
    single_site_trace: f64,
    lpqc_residual: f64,
    valid: bool,
    notes: Vec<String>,
}

fn example2_report(lattice: &Lattice, tol: f64) -> Result<Example2Report, Failure> {
    let channel = builtin::example2(lattice)?;
    let r = channel.cjs()?;
    let d = lattice.local_dim();
    let min_eigenvalue = r.eigvalsh()?.last().copied().unwrap_or(0.0);
    let physical = physical_labels(&lattice.sites());
    let ancillas = ancilla_labels(&lattice.sites());
    let identity = DenseOperator::identity_on(&ancillas, d)?;
    let marginal_deviation = r.partial_trace(&physical)?.distance(&identity)?;
    let s = r.sub(&DenseOperator::identity_on(r.support(), d)?.scale_real(1.0 / lattice.hilbert_dim() as f64))?;
    let mut single_site_trace = 0.0f64;
    for label in r.support() {
        single_site_trace = single_site_trace.max(s.partial_trace(&[*label])?.frobenius_norm());
    }
    let lpqc_residual = match classify::is_lpqc(&channel, ClassifyOptions::with_tol(tol)) {
        Ok((_, res)) => res,
        Err(Error::EmptyRegionSet { .. }) => 0.0,
        Err(e) => return Err(e.into()),
    };
    let valid = min_eigenvalue >= -qca_core::EPS_NUM && marginal_deviation <= tol && single_site_trace <= 1e-10 && lpqc_residual <= tol;
    Ok(Example2Report {
        example: "example2",
        version: qca_core::VERSION,
        lattice: lattice.clone(),
        min_eigenvalue,
        marginal_deviation,
        single_site_trace,
        lpqc_residual,
        valid,
        notes: channel.notes().to_vec(),
    })
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Classify { channel, lattice, tol, regions, out } => {
            let lattice: Lattice = parse(&lattice)?;
            let policy: RegionPolicy = parse(&regions)?;
            let channel = channel_spec(&channel)?.build(&lattice)?;
            classify_report(&channel, tol, policy, &out)
        }
        Command::BuildPepu { channel, lattice, seed, range, out } => {
            let lattice: Lattice = parse(&lattice)?;
            let channel = channel_spec(&channel)?.build(&lattice)?;
            let pepu = tn::build_pepu_from_qca(&channel, range.unwrap_or(lattice.range()), seed)?;
            let mut csv = String::from("site_a,site_b,bond_dimension\n");
            for e in pepu.tno.edges() {
                csv.push_str(&format!("{},{},{}\n", e.sites[0], e.sites[1], e.dim));
            }
            emit(&out, &pepu, Some(csv))?;
            Ok(true)
        }
        Command::AuditArealaw { family, lattice, sizes, metric, regions, samples, seed, out } => {
            let template: Lattice = parse(&lattice)?;
            let metric: Metric = parse(&metric)?;
            let regions: AuditRegions = parse(&regions)?;
            let spec = channel_spec(&family)?;
            let build = |m: usize| spec.build(&template.with_size(m)?);
            let sampler = ProductStateSampler { samples, seed };
            let name = serde_json::to_string(&spec).map_err(|e| Failure::Lib(e.into()))?;
            let report = entanglement::audit_area_law(&name, &build, &sizes, &sampler, metric, regions)?;
            let csv = report.to_csv();
            emit(&out, &report, Some(csv))?;
            Ok(true)
        }
        Command::RunExample { name, lattice, report, tol, out } => {
            let lattice: Lattice = parse(&lattice)?;
            let kind = report.unwrap_or_else(|| {
                match name.as_str() {
                    "example2" => "validity",
                    "example3" => "mi",
                    _ => "classify",
                }
                .to_string()
            });
            match (name.as_str(), kind.as_str()) {
                (_, "classify") => {
                    let channel = ChannelSpec::parse(&format!("builtin:{name}"))?.build(&lattice)?;
                    classify_report(&channel, tol, RegionPolicy::Blocks, &out)
                }
                ("example2", "validity") => {
                    let report = example2_report(&lattice, tol)?;
                    emit(&out, &report, None)?;
                    Ok(report.valid)
                }
                ("example3", "mi") => {
                    let (report, csv) = example3_report(&lattice)?;
                    emit(&out, &report, Some(csv))?;
                    Ok(true)
                }
                _ => Err(Failure::Usage(format!("report `{kind}` is not available for {name}"))),
            }
        }
        Command::Selftest { seed, out } => {
            let report = selftest::run_selftest(seed);
            for check in &report.checks {
                eprintln!(
                    "{} {} ({:.2}s): {}",
                    if check.passed { "PASS" } else { "FAIL" },
                    check.name,
                    check.seconds,
                    check.detail
                );
            }
            let mut csv = String::from("check,passed,detail\n");
            for check in &report.checks {
                csv.push_str(&format!("{},{},\"{}\"\n", check.name, check.passed, check.detail.replace('"', "'")));
            }
            emit(&out, &report, Some(csv))?;
            Ok(report.passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            let message: Vec<&str> = text.lines().map(str::trim).take_while(|l| !l.starts_with("Usage:")).filter(|l| !l.is_empty()).collect();
            eprintln!("{}", Failure::Usage(message.join(" ").trim_start_matches("error: ").to_string()).line());
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(failure) => {
            eprintln!("{}", failure.line());
            ExitCode::from(1)
        }
    }
}
