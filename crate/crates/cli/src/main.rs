// SPDX-License-Identifier: Apache-2.0

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use clsq::arith::Signature;
use clsq::census::{
    crosscheck_hasse, cubic_density_row, decade_checkpoints, render_report, run_classgroup_sweep, run_cubic_census,
    CensusReport, ReportRow,
};
use clsq::predict::{consistency_identities, format_rational, prediction_table, to_f64, SConfig};
use clsq::Error;

#[derive(Parser)]
#[command(
    name = "clsq",
    version,
    about = "Averages of 3-torsion in S-class groups of quadratic fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a census and compare its averages with the predicted limits.
    Verify(VerifyOpts),
    /// Check |Cl(K)_S[3]| = 1 + 2·#{cubic fields} for every discriminant.
    Crosscheck(CrosscheckOpts),
    /// Print the predicted limits for S.
    Predict(PredictOpts),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Theorem {
    /// average of |Cl(K)_S[3]|
    Cl,
    /// average of the relaxed Selmer group size
    Selmer,
    /// average of |O_S^× / cubes|
    Sunits,
    /// average of 3^{|S₁|}
    Avg3pow,
    /// proportion of fields per split pattern
    Density,
    /// count of cubic fields with no prime of S inert
    Cubic,
    All,
}

impl Theorem {
    /// Report rows checked for this theorem, and their default relative
    /// tolerance.
    fn rows(self, require_split: bool) -> Vec<(&'static str, f64)> {
        let cl = if require_split { "cl3_avg_split" } else { "cl3_avg" };
        let selmer = if require_split {
            "selmer_avg_split"
        } else {
            "selmer_avg"
        };
        match self {
            Theorem::Cl => vec![(cl, 0.2)],
            Theorem::Selmer => vec![(selmer, 0.1)],
            Theorem::Sunits => vec![("sunit_avg", 0.02)],
            Theorem::Avg3pow => vec![("split_weight_avg", 0.01)],
            Theorem::Density => vec![("split_density", 0.01)],
            Theorem::Cubic => vec![("cubic_density", 0.5)],
            Theorem::All => [
                Theorem::Cl,
                Theorem::Selmer,
                Theorem::Sunits,
                Theorem::Avg3pow,
                Theorem::Density,
                Theorem::Cubic,
            ]
            .into_iter()
            .flat_map(|t| t.rows(require_split))
            .collect(),
        }
    }

    fn needs_class_groups(self) -> bool {
        matches!(self, Theorem::Cl | Theorem::Selmer | Theorem::All)
    }

    fn needs_cubics(self) -> bool {
        matches!(self, Theorem::Cubic | Theorem::All)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct Common {
    /// Comma-separated primes forming S; "" for the empty set.
    #[arg(long, default_value = "", value_parser = parse_primes)]
    primes: Primes,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(clap::Args)]
struct VerifyOpts {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value = "all")]
    theorem: Theorem,
    /// real, imaginary, or both when omitted.
    #[arg(long, value_parser = parse_signature)]
    signature: Option<Signature>,
    /// Exclusive bound on |d|.
    #[arg(long, default_value_t = 100_000)]
    max_disc: u64,
    /// Condition on every prime of S splitting.
    #[arg(long)]
    require_split: bool,
    /// Relative tolerance overriding the per-theorem defaults.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Report path (default: stdout).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct CrosscheckOpts {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 100_000)]
    max_disc: u64,
    /// Write the per-discriminant table here.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct PredictOpts {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_parser = parse_signature)]
    signature: Option<Signature>,
    #[arg(long)]
    require_split: bool,
    /// Also verify the exact identities between the limits.
    #[arg(long)]
    check_identities: bool,
}

#[derive(Clone, Debug)]
struct Primes(Vec<u64>);

fn parse_primes(s: &str) -> Result<Primes, String> {
    if s.trim().is_empty() {
        return Ok(Primes(Vec::new()));
    }
    let primes = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<u64>()
                .map_err(|_| format!("malformed prime list {s:?}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    SConfig::new(primes.clone()).map_err(|e| e.to_string())?;
    Ok(Primes(primes))
}

fn parse_signature(s: &str) -> Result<Signature, String> {
    s.parse()
}

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = match &cli.command {
        Command::Verify(o) => o.common.workers,
        Command::Crosscheck(o) => o.common.workers,
        Command::Predict(o) => o.common.workers,
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n.max(1));
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let outcome = pool.install(|| match cli.command {
        Command::Verify(o) => verify(o),
        Command::Crosscheck(o) => crosscheck(o),
        Command::Predict(o) => predict(o),
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn signatures(s: Option<Signature>) -> Vec<Signature> {
    match s {
        Some(s) => vec![s],
        None => vec![Signature::Imaginary, Signature::Real],
    }
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn verify(o: VerifyOpts) -> Result<bool, Error> {
    let mut s = SConfig::new(o.common.primes.0.clone())?;
    if o.require_split {
        s = s.all_split();
    }
    let checked = o.theorem.rows(o.require_split);
    let checkpoints = decade_checkpoints(o.max_disc);
    let mut report = CensusReport::default();
    for sig in signatures(o.signature) {
        let base = SConfig::new(s.primes().to_vec())?;
        let snaps = run_classgroup_sweep(
            o.max_disc,
            &checkpoints,
            std::slice::from_ref(&base),
            sig,
            o.theorem.needs_class_groups(),
        )?;
        for (_, accs) in snaps {
            if !accs[0].is_empty() {
                report.merge(render_report(&accs[0])?);
            }
        }
        if o.theorem.needs_cubics() {
            let count = run_cubic_census(o.max_disc, &base, sig)?;
            report.merge(CensusReport {
                rows: vec![cubic_density_row(o.max_disc, &base, sig, count)],
                ..CensusReport::default()
            });
        }
    }
    report.rows.retain(|r| checked.iter().any(|(t, _)| *t == r.theorem));
    if o.require_split {
        let s1 = s.split().map(<[u64]>::to_vec);
        report.rows.retain(|r| r.theorem != "split_density" || r.split == s1);
    }
    let text = match o.format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    write_output(o.output.as_ref(), &text)?;

    let mut ok = true;
    let finals: Vec<&ReportRow> = report.rows.iter().filter(|r| r.x == o.max_disc).collect();
    if finals.is_empty() {
        eprintln!("no fields below {}", o.max_disc);
        return Ok(false);
    }
    for r in finals {
        let default = checked
            .iter()
            .find(|(t, _)| *t == r.theorem)
            .map_or(0.0, |(_, tol)| *tol);
        let tol = o.tolerance.unwrap_or(default);
        let rel = r.relative_deviation();
        let pass = rel <= tol;
        ok &= pass;
        let s1 = r.split.as_deref().map(|v| format!(" S1={v:?}")).unwrap_or_default();
        eprintln!(
            "{} {} {}{} X={} empirical={:.6} predicted={} rel.dev={:.4} tol={}",
            if pass { "PASS" } else { "FAIL" },
            r.theorem,
            r.signature,
            s1,
            r.x,
            r.empirical,
            r.predicted,
            rel,
            tol
        );
    }
    if !report.flagged.is_empty() {
        eprintln!("excluded from unit and Selmer averages: {:?}", report.flagged);
    }
    Ok(ok)
}

fn crosscheck(o: CrosscheckOpts) -> Result<bool, Error> {
    let s = SConfig::new(o.common.primes.0)?;
    let report = crosscheck_hasse(o.max_disc, &s)?;
    println!(
        "checked {} fundamental discriminants, {} mismatches",
        report.checked,
        report.mismatches.len()
    );
    if let Some(path) = &o.output {
        std::fs::write(path, report.to_csv())?;
    }
    if let Some(m) = report.mismatches.first() {
        eprintln!(
            "mismatch at d = {} with S = {:?}: |Cl_S[3]| = {}, 1 + 2·#cubic = {}",
            m.d, m.primes, m.forms_side, m.cubic_side
        );
    }
    Ok(report.passed())
}

fn predict(o: PredictOpts) -> Result<bool, Error> {
    let mut s = SConfig::new(o.common.primes.0)?;
    if o.require_split {
        s = s.all_split();
    }
    for sig in signatures(o.signature) {
        println!("{sig}, S = {s}");
        for (name, value) in prediction_table(&s, sig).rows {
            println!("  {name}: {} ({:.6})", format_rational(&value), to_f64(&value));
        }
    }
    if o.check_identities {
        let pass = consistency_identities(&s);
        println!("identities: {}", if pass { "PASS" } else { "FAIL" });
        return Ok(pass);
    }
    Ok(true)
}
