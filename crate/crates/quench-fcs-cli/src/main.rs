//! `quenchfcs`: kink-pair counting statistics for transverse-field Ising
//! quenches, from the command line.
//!
//! Exit codes: 0 success, 1 validation error, 2 numerical failure, 3 I/O
//! error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use quench_fcs::counting::total_kink_cumulants;
use quench_fcs::oracle::cross_validate;
use quench_fcs::Error;
use quench_fcs_cli::config::{MethodName, NoiseBasisName, OutputFormat, ScheduleName, SweepConfig};
use quench_fcs_cli::fit::fit_power_law;
use quench_fcs_cli::records::{self, SweepRecord};
use quench_fcs_cli::sweep::{distribution_for, run_sweep, spectrum_for};

#[derive(Parser)]
#[command(
    name = "quenchfcs",
    version,
    about = "Kink-pair statistics of linear quenches across the Ising critical point"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-mode excitation probabilities at one quench time
    Pk(CommonOpts),
    /// Kink-pair number distribution at one quench time
    Dist(CommonOpts),
    /// Cumulants (pair and total-kink) at one quench time
    Cumulants(CommonOpts),
    /// Quench-time sweep with records, fits, and file emission
    Sweep(CommonOpts),
    /// Power-law fit of an existing records CSV
    Fit(FitOpts),
    /// Cross-validate the momentum-space pipeline against the exact chain
    Oracle(CommonOpts),
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Chain size N (even, >= 4)
    #[arg(long)]
    n: Option<usize>,
    /// Single quench time A = J tau_Q / hbar
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    a_min: Option<f64>,
    #[arg(long)]
    a_max: Option<f64>,
    #[arg(long)]
    a_points: Option<usize>,
    /// Methods: closed-form, unitary, dephased (repeat or comma-separate)
    #[arg(long, value_delimiter = ',')]
    method: Vec<String>,
    /// Dephasing rate in units J/hbar
    #[arg(long)]
    gamma: Option<f64>,
    /// Dephasing basis: qubit-z or instantaneous-energy
    #[arg(long)]
    noise_basis: Option<String>,
    /// Schedule: linear or chirp
    #[arg(long)]
    schedule: Option<String>,
    /// Chirp duration normalization (1 = exact time rescaling)
    #[arg(long)]
    chirp_norm: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    g_start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    g_end: Option<f64>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    /// Flat JSON config file; flags override file values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (sweep: output directory)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv, json, or both
    #[arg(long)]
    format: Option<String>,
    /// Fit window in A: --fit-window LO HI
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    fit_window: Option<Vec<f64>>,
    /// Dump one PMF file per record
    #[arg(long)]
    emit_pmf: bool,
}

#[derive(Args)]
struct FitOpts {
    /// Records CSV produced by `quenchfcs sweep`
    #[arg(long)]
    input: PathBuf,
    /// Cumulant order (default: fit q = 1, 2, 3)
    #[arg(long)]
    q: Option<u8>,
    /// Restrict to one method when the CSV mixes several
    #[arg(long)]
    method: Option<String>,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    fit_window: Option<Vec<f64>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    if records::is_io_error(e) {
        return 3;
    }
    match e {
        Error::InvalidInput(_) | Error::OutOfDomain(_) => 1,
        Error::Integrator { .. } | Error::Numerical(_) => 2,
    }
}

/// Write to stdout, exiting quietly when the consumer closed the pipe.
fn write_stdout(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: failed writing to stdout: {e}");
        std::process::exit(3);
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Pk(opts) => cmd_pk(&effective_config(&opts)?, &opts),
        Command::Dist(opts) => cmd_dist(&effective_config(&opts)?, &opts),
        Command::Cumulants(opts) => cmd_cumulants(&effective_config(&opts)?, &opts),
        Command::Sweep(opts) => cmd_sweep(&effective_config(&opts)?, &opts),
        Command::Fit(opts) => cmd_fit(&opts),
        Command::Oracle(opts) => cmd_oracle(&effective_config(&opts)?, &opts),
    }
}

/// Config file (when given) with CLI flags layered on top.
fn effective_config(opts: &CommonOpts) -> Result<SweepConfig, Error> {
    let mut cfg = match &opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::invalid(format!("I/O failure at {}: {e}", path.display())))?;
            SweepConfig::from_json(&text)?
        }
        None => SweepConfig::default(),
    };
    if let Some(n) = opts.n {
        cfg.n = n;
    }
    if let Some(a) = opts.a {
        cfg.a = Some(a);
    }
    if let Some(v) = opts.a_min {
        cfg.a_min = v;
    }
    if let Some(v) = opts.a_max {
        cfg.a_max = v;
    }
    if let Some(v) = opts.a_points {
        cfg.a_points = v;
    }
    if !opts.method.is_empty() {
        cfg.methods = opts
            .method
            .iter()
            .map(|s| MethodName::parse(s))
            .collect::<Result<Vec<_>, _>>()?;
    }
    if let Some(v) = opts.gamma {
        cfg.gamma = v;
    }
    if let Some(s) = &opts.noise_basis {
        cfg.noise_basis = match s.to_ascii_lowercase().as_str() {
            "qubit-z" | "qubit_z" | "z" => NoiseBasisName::QubitZ,
            "instantaneous-energy" | "energy" => NoiseBasisName::InstantaneousEnergy,
            other => {
                return Err(Error::invalid(format!(
                    "unknown noise basis {other:?} (expected qubit-z or instantaneous-energy)"
                )))
            }
        };
    }
    if let Some(s) = &opts.schedule {
        cfg.schedule = ScheduleName::parse(s)?;
    }
    if let Some(v) = opts.chirp_norm {
        cfg.chirp_normalization = v;
    }
    if let Some(v) = opts.g_start {
        cfg.g_start = v;
    }
    if let Some(v) = opts.g_end {
        cfg.g_end = v;
    }
    if let Some(v) = opts.rel_tol {
        cfg.rel_tol = v;
    }
    if let Some(v) = opts.abs_tol {
        cfg.abs_tol = v;
    }
    if let Some(w) = &opts.fit_window {
        cfg.fit_window = Some([w[0], w[1]]);
    }
    if opts.emit_pmf {
        cfg.emit_pmf = true;
    }
    cfg.validate()?;
    for warning in cfg.schedule_for(cfg.a_values()?[0])?.warnings() {
        eprintln!("warning: {warning}");
    }
    Ok(cfg)
}

fn parse_format(cfg: &SweepConfig, opts: &CommonOpts) -> Result<OutputFormat, Error> {
    match opts.format.as_deref() {
        None => Ok(cfg.format.unwrap_or(OutputFormat::Csv)),
        Some("csv") => Ok(OutputFormat::Csv),
        Some("json") => Ok(OutputFormat::Json),
        Some("both") => Ok(OutputFormat::Both),
        Some(other) => {
            Err(Error::invalid(format!("unknown format {other:?} (expected csv, json, or both)")))
        }
    }
}

/// Output destination: flag wins, then config file, then none.
fn effective_out(cfg: &SweepConfig, opts: &CommonOpts) -> Option<PathBuf> {
    opts.out.clone().or_else(|| cfg.out.as_ref().map(PathBuf::from))
}

fn single_a(cfg: &SweepConfig) -> Result<f64, Error> {
    cfg.a.ok_or_else(|| Error::invalid("this subcommand needs a single quench time: --a"))
}

fn cmd_pk(cfg: &SweepConfig, opts: &CommonOpts) -> Result<(), Error> {
    let a = single_a(cfg)?;
    let mut lines = String::from("k,method,p\n");
    for &method in &cfg.methods {
        let spectrum = spectrum_for(cfg, a, method)?;
        let grid = quench_fcs::modes::momentum_grid(&cfg.chain_spec()?);
        for (mode, p) in grid.iter().zip(spectrum.probabilities()) {
            lines.push_str(&format!("{},{},{}\n", mode.k, method, p));
        }
    }
    if let Some(path) = effective_out(cfg, opts) {
        std::fs::write(&path, &lines)
            .map_err(|e| Error::invalid(format!("I/O failure at {}: {e}", path.display())))?;
    }
    write_stdout(&lines);
    Ok(())
}

fn cmd_dist(cfg: &SweepConfig, opts: &CommonOpts) -> Result<(), Error> {
    let a = single_a(cfg)?;
    for &method in &cfg.methods {
        let dist = distribution_for(cfg, a, method)?;
        let mut text = format!("# A = {a}, method = {method}\n");
        text.push_str(&format!(
            "# kappa1 = {}, kappa2 = {}, kappa3 = {}\n",
            dist.kappa1, dist.kappa2, dist.kappa3
        ));
        text.push_str("n,P\n");
        for (n, p) in dist.pmf.iter().enumerate() {
            text.push_str(&format!("{n},{p}\n"));
        }
        if let Some(dir) = effective_out(cfg, opts) {
            std::fs::create_dir_all(&dir)
                .map_err(|e| Error::invalid(format!("I/O failure at {}: {e}", dir.display())))?;
            let path = records::write_pmf(&dist, &dir, a, method)?;
            eprintln!("wrote {}", path.display());
        }
        write_stdout(&text);
    }
    Ok(())
}

fn cmd_cumulants(cfg: &SweepConfig, opts: &CommonOpts) -> Result<(), Error> {
    let a = single_a(cfg)?;
    let mut cfg_single = cfg.clone();
    cfg_single.a = Some(a);
    let outcome = run_sweep(&cfg_single)?;
    report_failures(&outcome.failures);
    let mut table = Vec::new();
    records::print_records(&outcome.records, &mut table)
        .map_err(|e| Error::invalid(format!("format failure: {e}")))?;
    let mut text = String::from_utf8(table).expect("record table is UTF-8");
    for r in &outcome.records {
        let total = total_kink_cumulants((r.kappa1, r.kappa2, r.kappa3));
        text.push_str(&format!(
            "total kinks [{}]: kappa1_T = {}, kappa2_T = {}, kappa3_T = {}\n",
            r.method, total.0, total.1, total.2
        ));
    }
    write_stdout(&text);
    if let Some(path) = effective_out(cfg, opts) {
        records::write_csv(&outcome.records, &path)?;
    }
    if outcome.failures.is_empty() {
        Ok(())
    } else {
        Err(Error::numerical(format!("{} sweep cell(s) failed", outcome.failures.len())))
    }
}

fn cmd_sweep(cfg: &SweepConfig, opts: &CommonOpts) -> Result<(), Error> {
    let format = parse_format(cfg, opts)?;
    let out_dir = effective_out(cfg, opts).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| Error::invalid(format!("I/O failure at {}: {e}", out_dir.display())))?;

    let mut outcome = run_sweep(cfg)?;
    report_failures(&outcome.failures);

    // PMF dumps next to the records
    if cfg.emit_pmf {
        for record in &mut outcome.records {
            if let Some(dist) = &record.pmf {
                let path = records::write_pmf(dist, &out_dir, record.a, record.method)?;
                record.pmf_file =
                    Some(path.file_name().unwrap().to_string_lossy().into_owned());
            }
        }
    }

    // power-law fits per method and order, where the window allows one
    let window = cfg.effective_fit_window()?;
    let mut fits: Vec<records::MethodFit> = Vec::new();
    for &method in &cfg.methods {
        let method_records: Vec<SweepRecord> =
            outcome.records.iter().filter(|r| r.method == method).cloned().collect();
        for q in 1..=3u8 {
            match fit_power_law(&method_records, q, window) {
                Ok(fit) => {
                    write_stdout(&format!(
                        "fit [{method}] kappa_{q} ~ A^({:.6} +/- {:.6}) over A in [{}, {}] ({} pts){}\n",
                        fit.exponent,
                        fit.stderr,
                        window[0],
                        window[1],
                        fit.points,
                        if fit.non_monotone { "  [non-monotone]" } else { "" }
                    ));
                    fits.push(records::MethodFit { method, fit });
                }
                Err(e) => eprintln!("fit [{method}] kappa_{q}: skipped ({e})"),
            }
        }
    }

    if matches!(format, OutputFormat::Csv | OutputFormat::Both) {
        let path = out_dir.join("records.csv");
        records::write_csv(&outcome.records, &path)?;
        eprintln!("wrote {}", path.display());
    }
    if matches!(format, OutputFormat::Json | OutputFormat::Both) {
        let path = out_dir.join("records.json");
        records::write_json(cfg, &outcome.records, &fits, &path)?;
        eprintln!("wrote {}", path.display());
    }
    if !outcome.failures.is_empty() {
        let manifest = out_dir.join("failures.json");
        let text = serde_json::to_string_pretty(&outcome.failures)
            .map_err(|e| Error::invalid(format!("JSON encoding failure: {e}")))?;
        std::fs::write(&manifest, text)
            .map_err(|e| Error::invalid(format!("I/O failure at {}: {e}", manifest.display())))?;
        return Err(Error::numerical(format!(
            "{} sweep cell(s) failed; partial results and manifest written to {}",
            outcome.failures.len(),
            out_dir.display()
        )));
    }
    Ok(())
}

fn cmd_fit(opts: &FitOpts) -> Result<(), Error> {
    let mut recs = records::parse_csv(&opts.input)?;
    if let Some(m) = &opts.method {
        let wanted = MethodName::parse(m)?;
        recs.retain(|r| r.method == wanted);
    } else {
        let mut methods: Vec<MethodName> = recs.iter().map(|r| r.method).collect();
        methods.dedup();
        methods.sort_by_key(|m| format!("{m}"));
        methods.dedup();
        if methods.len() > 1 {
            return Err(Error::invalid(
                "records mix methods; pick one with --method".to_string(),
            ));
        }
    }
    if recs.is_empty() {
        return Err(Error::invalid("no records to fit".to_string()));
    }
    let window = match &opts.fit_window {
        Some(w) => [w[0], w[1]],
        None => {
            let a_min = recs.iter().map(|r| r.a).fold(f64::INFINITY, f64::min);
            let a_max = recs.iter().map(|r| r.a).fold(f64::NEG_INFINITY, f64::max);
            [a_min.max(2.0).min(a_max), a_max.min(50.0).max(a_min.max(2.0).min(a_max))]
        }
    };
    let orders: Vec<u8> = match opts.q {
        Some(q) => vec![q],
        None => vec![1, 2, 3],
    };
    let fits = orders
        .iter()
        .map(|&q| fit_power_law(&recs, q, window))
        .collect::<Result<Vec<_>, _>>()?;
    let text = serde_json::to_string_pretty(&fits)
        .map_err(|e| Error::invalid(format!("JSON encoding failure: {e}")))?;
    if let Some(path) = &opts.out {
        std::fs::write(path, &text)
            .map_err(|e| Error::invalid(format!("I/O failure at {}: {e}", path.display())))?;
    }
    write_stdout(&text);
    write_stdout("\n");
    Ok(())
}

fn cmd_oracle(cfg: &SweepConfig, opts: &CommonOpts) -> Result<(), Error> {
    let a = single_a(cfg)?;
    let spec = cfg.chain_spec()?;
    let schedule = cfg.schedule_for(a)?;
    let report = cross_validate(&spec, &schedule, &cfg.integrator()?)?;
    let mut text = format!("cross-validation at N = {}, A = {a}:\n", cfg.n);
    text.push_str(&format!(
        "  total-variation distance = {:.3e} (budget 1e-4)\n",
        report.tv_distance
    ));
    text.push_str(&format!(
        "  cumulants (momentum path): ({:.8}, {:.8}, {:.8})\n",
        report.kappa_modes.0, report.kappa_modes.1, report.kappa_modes.2
    ));
    text.push_str(&format!(
        "  cumulants (exact chain):   ({:.8}, {:.8}, {:.8})\n",
        report.kappa_oracle.0, report.kappa_oracle.1, report.kappa_oracle.2
    ));
    text.push_str("  k, p (engine), p (oracle):\n");
    for m in &report.modes {
        text.push_str(&format!("    {:.6}, {:.10}, {:.10}\n", m.k, m.p_engine, m.p_oracle));
    }
    text.push_str(&format!("  passed: {}\n", report.passed));
    write_stdout(&text);
    if let Some(path) = effective_out(cfg, opts) {
        #[derive(serde::Serialize)]
        struct OracleJson {
            n: usize,
            a: f64,
            tv_distance: f64,
            passed: bool,
            kappa_modes: (f64, f64, f64),
            kappa_oracle: (f64, f64, f64),
            modes: Vec<(f64, f64, f64)>,
        }
        let doc = OracleJson {
            n: cfg.n,
            a,
            tv_distance: report.tv_distance,
            passed: report.passed,
            kappa_modes: report.kappa_modes,
            kappa_oracle: report.kappa_oracle,
            modes: report.modes.iter().map(|m| (m.k, m.p_engine, m.p_oracle)).collect(),
        };
        let text = serde_json::to_string_pretty(&doc)
            .map_err(|e| Error::invalid(format!("JSON encoding failure: {e}")))?;
        std::fs::write(&path, text)
            .map_err(|e| Error::invalid(format!("I/O failure at {}: {e}", path.display())))?;
    }
    if report.passed {
        Ok(())
    } else {
        Err(Error::numerical(format!(
            "cross-validation failed: TV distance {:.3e} above budget",
            report.tv_distance
        )))
    }
}

fn report_failures(failures: &[quench_fcs_cli::sweep::SweepFailure]) {
    for f in failures {
        eprintln!("failed cell: A = {}, method = {}: {}", f.a, f.method, f.error);
    }
}
