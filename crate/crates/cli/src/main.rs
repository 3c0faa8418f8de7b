//! Batch front-end: every pipeline as a subcommand with reproducible
//! configs. Each output CSV gets a sidecar `<out>.meta.json` echoing the
//! effective configuration, the code version and the truncation estimates.
//! All numbers are deterministic for a fixed config: parallel reductions
//! use fixed chunking, so even the thread count does not change results.
//!
//! Exit codes: 0 success, 2 bad configuration or input, 3 numerical-audit
//! failure (zero counts inconsistent with the mean density).

// `!(hi > lo)` deliberately rejects NaN bounds along with bad ordering
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use dlcorr::arith;
use dlcorr::characters::{character_with_label, CharacterError};
use dlcorr::correlation::{
    self, tail_estimates, Component, CorrelationParams, Normalization,
};
use dlcorr::hardy_littlewood as hl;
use dlcorr::zeros;

const EXIT_BAD_CONFIG: u8 = 2;
const EXIT_AUDIT_FAILURE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "dlcorr",
    version,
    about = "Pair correlation of Dirichlet L-function zeros: constants, sieve checks, \
             correlation curves, zero scans and empirical comparisons.",
    long_about = None,
    after_help = "Conventions: all logarithms are natural and all phases are in radians. \
                  Offsets ε are raw height differences; unfolded variables are x = ε·d̄(E) \
                  with d̄(E) = ln(kE/2π)/2π."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate α(h), the Ramanujan-series form, β(h,k), α(h,k) and S(k).
    Constants(ConstantsArgs),
    /// Verify the prime-pair conjecture along progressions by sieving.
    HlVerify(HlVerifyArgs),
    /// Evaluate correlation-function components over an offset grid.
    R2Eval(R2EvalArgs),
    /// Scan critical-line zeros of one primitive-character L-function.
    Zeros(ZerosArgs),
    /// Compare the pair statistics of a zero list against the formula.
    Compare(CompareArgs),
}

#[derive(Args, Serialize)]
struct ConstantsArgs {
    /// Comma-separated offsets h (may be empty for a header-only table)
    #[arg(long, default_value = "2,4,6", allow_hyphen_values = true)]
    h_list: String,
    /// Comma-separated moduli k
    #[arg(long, default_value = "1,3,4,5")]
    k_list: String,
    /// Euler-product cutoff for the twin-prime constant
    #[arg(long, default_value_t = 10_000_000)]
    prime_cutoff: u64,
    /// Ramanujan-series cutoff Q
    #[arg(long, default_value_t = 100_000)]
    series_cutoff: u64,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct HlVerifyArgs {
    /// Pair offset h
    #[arg(long)]
    offset: u64,
    /// Progression modulus k
    #[arg(long, default_value_t = 1)]
    modulus: u64,
    /// Progression length N (the sieve covers k·N + h)
    #[arg(long)]
    length: u64,
    /// Restrict to one residue class (default: every admissible residue)
    #[arg(long)]
    residue: Option<u64>,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct R2EvalArgs {
    /// Height E on the critical line
    #[arg(long)]
    height: f64,
    /// Modulus k of the (primitive) character
    #[arg(long)]
    modulus: u64,
    /// Raw offset grid: start
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["x_min", "x_max", "x_steps"])]
    eps_min: Option<f64>,
    /// Raw offset grid: end
    #[arg(long, allow_hyphen_values = true)]
    eps_max: Option<f64>,
    /// Raw offset grid: number of points
    #[arg(long)]
    eps_steps: Option<usize>,
    /// Unfolded grid (x = ε·d̄): start; output is then normalized by d̄²
    #[arg(long, allow_hyphen_values = true)]
    x_min: Option<f64>,
    /// Unfolded grid: end
    #[arg(long, allow_hyphen_values = true)]
    x_max: Option<f64>,
    /// Unfolded grid: number of points
    #[arg(long)]
    x_steps: Option<usize>,
    /// Components to emit: comma list of total,diag,off,off_r0
    #[arg(long, default_value = "total")]
    components: String,
    #[arg(long, default_value_t = 100_000)]
    prime_cutoff: u64,
    /// Cap on the inner m-sums of the diagonal products
    #[arg(long, default_value_t = 64)]
    m_cutoff: u32,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct ZerosArgs {
    /// Modulus k
    #[arg(long)]
    modulus: u64,
    /// Character label: comma-separated exponent vector (empty for k <= 2)
    #[arg(long, default_value = "")]
    label: String,
    #[arg(long, default_value_t = 0.0)]
    t_min: f64,
    #[arg(long)]
    t_max: f64,
    /// Scan step (default 0.25/d̄(t_max))
    #[arg(long)]
    step: Option<f64>,
    /// Bisection width for each zero
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Output zero-list path (plain text, '#' headers)
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct CompareArgs {
    /// Zero-list file produced by `dlcorr zeros`
    #[arg(long, conflicts_with = "surrogate")]
    zero_file: Option<PathBuf>,
    /// Generate a synthetic zero set instead: `poisson`
    #[arg(long)]
    surrogate: Option<String>,
    /// Modulus: required with --surrogate, cross-checked against the file otherwise
    #[arg(long)]
    modulus: Option<u64>,
    /// Surrogate window start
    #[arg(long, default_value_t = 50.0)]
    t_min: f64,
    /// Surrogate window end
    #[arg(long, default_value_t = 4000.0)]
    t_max: f64,
    /// Surrogate seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Histogram bin width in unfolded units
    #[arg(long, default_value_t = 0.1)]
    bin_width: f64,
    /// Histogram range in unfolded units
    #[arg(long, default_value_t = 3.0)]
    max_x: f64,
    #[arg(long, default_value_t = 100_000)]
    prime_cutoff: u64,
    #[arg(long, default_value_t = 64)]
    m_cutoff: u32,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Output CSV path (summary JSON lands at <out>.summary.json)
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (threads, result) = match cli.command {
        Command::Constants(a) => (a.threads, with_pool(a.threads, || cmd_constants(&a))),
        Command::HlVerify(a) => (a.threads, with_pool(a.threads, || cmd_hl_verify(&a))),
        Command::R2Eval(a) => (a.threads, with_pool(a.threads, || cmd_r2_eval(&a))),
        Command::Zeros(a) => (a.threads, with_pool(a.threads, || cmd_zeros(&a))),
        Command::Compare(a) => (a.threads, with_pool(a.threads, || cmd_compare(&a))),
    };
    let _ = threads;
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_BAD_CONFIG)
        }
    }
}

fn with_pool<T>(threads: usize, f: impl FnOnce() -> T + Send) -> T
where
    T: Send,
{
    if threads == 0 {
        return f();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    pool.install(f)
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|_| anyhow!("bad {what} entry '{s}'")))
        .collect()
}

fn create_out(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| {
        format!("cannot create output file {}", path.display())
    })?))
}

fn write_sidecar(out: &Path, meta: &serde_json::Value) -> Result<()> {
    let mut path = out.as_os_str().to_owned();
    path.push(".meta.json");
    let mut w = create_out(Path::new(&path))?;
    serde_json::to_writer_pretty(&mut w, meta)?;
    writeln!(w)?;
    Ok(())
}

fn version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

fn cmd_constants(args: &ConstantsArgs) -> Result<ExitCode> {
    let h_list: Vec<i64> = parse_list(&args.h_list, "offset")?;
    let k_list: Vec<u64> = parse_list(&args.k_list, "modulus")?;
    let table = arith::sieve_primes(args.prime_cutoff.max(hl::MIN_TWIN_CUTOFF))?;
    let mt = arith::mult_table(args.series_cutoff as usize);

    let mut errors: Vec<String> = Vec::new();
    let mut w = create_out(&args.out)?;
    writeln!(w, "h,k,alpha,alpha_series,beta,alpha_ap,s_factor")?;
    for &h in &h_list {
        for &k in &k_list {
            let row = (|| -> Result<String, hl::HlError> {
                let dens = hl::hl_density(h, k, args.prime_cutoff, &table)?;
                let series = hl::alpha_series_with(h, &mt);
                let s = hl::s_factor(k, 1 % k.max(1), 1 % k.max(1));
                Ok(format!(
                    "{h},{k},{:e},{:e},{:e},{:e},{:e}",
                    dens.alpha, series, dens.beta, dens.alpha_ap, s
                ))
            })();
            match row {
                Ok(r) => writeln!(w, "{r}")?,
                Err(e) => errors.push(format!("h={h} k={k}: {e}")),
            }
        }
    }
    w.flush()?;
    write_sidecar(
        &args.out,
        &serde_json::json!({
            "command": "constants",
            "version": version(),
            "config": args,
            "errors": errors,
        }),
    )?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_hl_verify(args: &HlVerifyArgs) -> Result<ExitCode> {
    let k = args.modulus.max(1);
    let needed = k
        .checked_mul(args.length)
        .and_then(|v| v.checked_add(k + args.offset))
        .ok_or_else(|| anyhow!("progression endpoint overflows"))?;
    if needed > arith::MAX_SIEVE_LIMIT {
        bail!("progression needs a sieve to {needed}, beyond the supported {}", arith::MAX_SIEVE_LIMIT);
    }
    let table = arith::sieve_primes(needed.max(hl::MIN_TWIN_CUTOFF))?;
    let residues = match args.residue {
        Some(r) => vec![r],
        None => hl::valid_residues(args.offset, k),
    };
    let mut errors: Vec<String> = Vec::new();
    let mut w = create_out(&args.out)?;
    writeln!(w, "{}", hl::PairCountReport::CSV_HEADER)?;
    let mut reports = Vec::new();
    for &r in &residues {
        match hl::empirical_pair_density(args.offset, k, r, args.length, &table) {
            Ok(rep) => {
                writeln!(w, "{}", rep.csv_row())?;
                reports.push(rep);
            }
            Err(e) => {
                // listed, not fatal: emit a placeholder row and record why
                writeln!(
                    w,
                    "{},{},{},{},nan,0,nan,nan",
                    args.offset, k, r, args.length
                )?;
                errors.push(format!("r={r}: {e}"));
            }
        }
    }
    w.flush()?;
    write_sidecar(
        &args.out,
        &serde_json::json!({
            "command": "hl-verify",
            "version": version(),
            "config": args,
            "reports": reports,
            "errors": errors,
        }),
    )?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_r2_eval(args: &R2EvalArgs) -> Result<ExitCode> {
    let unfolded = args.x_min.is_some() || args.x_max.is_some() || args.x_steps.is_some();
    let raw = args.eps_min.is_some() || args.eps_max.is_some() || args.eps_steps.is_some();
    if unfolded == raw {
        bail!("specify exactly one grid: --eps-min/--eps-max/--eps-steps or --x-min/--x-max/--x-steps");
    }
    let grid = |lo: Option<f64>, hi: Option<f64>, n: Option<usize>| -> Result<Vec<f64>> {
        let (lo, hi, n) = (
            lo.ok_or_else(|| anyhow!("grid start missing"))?,
            hi.ok_or_else(|| anyhow!("grid end missing"))?,
            n.ok_or_else(|| anyhow!("grid steps missing"))?,
        );
        if n < 2 || !(hi > lo) {
            bail!("grid needs at least 2 points and end > start");
        }
        Ok((0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect())
    };
    let dbar = correlation::mean_density(args.height, args.modulus)
        .map_err(|e| anyhow!("height/modulus out of range: {e}"))?;
    let (eps_grid, normalization) = if unfolded {
        let xs = grid(args.x_min, args.x_max, args.x_steps)?;
        (
            xs.iter().map(|x| x / dbar).collect::<Vec<_>>(),
            Normalization::Unfolded,
        )
    } else {
        (grid(args.eps_min, args.eps_max, args.eps_steps)?, Normalization::Raw)
    };
    let mut components: Vec<Component> = Vec::new();
    for name in args.components.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        components.push(match name {
            "total" => Component::Total,
            "diag" => Component::Diag,
            "off" => Component::Off,
            "off_r0" => Component::OffR0,
            "gue_reference" => Component::GueReference,
            other => bail!("unknown component '{other}' (total, diag, off, off_r0, gue_reference)"),
        });
    }
    if normalization == Normalization::Unfolded
        && !components.contains(&Component::GueReference)
    {
        components.push(Component::GueReference);
    }
    let table = arith::sieve_primes(args.prime_cutoff)?;
    let params = CorrelationParams {
        e_height: args.height,
        modulus: args.modulus,
        eps_grid,
        prime_cutoff: args.prime_cutoff,
        m_cutoff: args.m_cutoff,
    };
    let mut curves = Vec::new();
    for &c in &components {
        curves.push(
            correlation::evaluate_curve(&params, c, normalization, &table)
                .with_context(|| format!("component {}", c.as_str()))?,
        );
    }
    let mut w = create_out(&args.out)?;
    correlation::write_curves_csv(&mut w, &curves)?;
    w.flush()?;
    write_sidecar(
        &args.out,
        &serde_json::json!({
            "command": "r2-eval",
            "version": version(),
            "config": args,
            "mean_density": dbar,
            "normalization": normalization,
            "tail_estimates": tail_estimates(args.prime_cutoff),
        }),
    )?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_zeros(args: &ZerosArgs) -> Result<ExitCode> {
    let label: Vec<u64> = parse_list(&args.label, "label")?;
    let chi = character_with_label(args.modulus, &label)?;
    if !chi.is_primitive() {
        // name the conductor explicitly, as the scan is only defined for
        // primitive characters
        return Err(CharacterError::NotPrimitive {
            modulus: chi.modulus(),
            label: label.clone(),
            conductor: chi.conductor(),
        }
        .into());
    }
    let dbar_top = zeros::smooth_density(args.modulus, args.t_max.abs().max(1.0));
    let step = args.step.unwrap_or(if dbar_top > 0.0 { 0.25 / dbar_top } else { 0.25 });
    let list = zeros::find_zeros(&chi, args.t_min, args.t_max, step, args.tol)?;
    let mut w = create_out(&args.out)?;
    zeros::write_zero_list(&mut w, &list)?;
    w.flush()?;
    write_sidecar(
        &args.out,
        &serde_json::json!({
            "command": "zeros",
            "version": version(),
            "config": args,
            "effective_step": list.scan_step,
            "zeros_found": list.zeros.len(),
            "audit_flags": list.audit,
        }),
    )?;
    if !list.audit.is_empty() {
        for f in &list.audit {
            eprintln!(
                "audit: [{:.3}, {:.3}] found {} zeros, integrated density predicts {:.2}",
                f.t_lo, f.t_hi, f.found, f.expected
            );
        }
        return Ok(ExitCode::from(EXIT_AUDIT_FAILURE));
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct CompareSummary {
    modulus: u64,
    n_zeros: usize,
    n_inner: usize,
    bin_width: f64,
    max_x: f64,
    source: String,
    mean_abs_deviation: f64,
    max_abs_deviation: f64,
    chi2: f64,
    dof: usize,
    first_bin_density: f64,
    first_bin_predicted: f64,
    /// mean |Δ| ≤ 0.05 and first-bin density within the level-repulsion
    /// envelope max(0.15, 2·predicted)
    gue_consistent: bool,
}

fn cmd_compare(args: &CompareArgs) -> Result<ExitCode> {
    let (heights, k, source): (Vec<f64>, u64, String) = match (&args.zero_file, &args.surrogate) {
        (Some(path), None) => {
            let file = zeros::read_zero_list(BufReader::new(
                File::open(path).with_context(|| format!("cannot open {}", path.display()))?,
            ))?;
            if let Some(k) = args.modulus {
                if k != file.modulus {
                    bail!(
                        "--modulus {k} does not match the zero file (modulus {})",
                        file.modulus
                    );
                }
            }
            (file.zeros, file.modulus, format!("file:{}", path.display()))
        }
        (None, Some(kind)) => {
            if kind != "poisson" {
                bail!("unknown surrogate '{kind}' (supported: poisson)");
            }
            let k = args
                .modulus
                .ok_or_else(|| anyhow!("--modulus is required with --surrogate"))?;
            (
                zeros::poisson_surrogate(k, args.t_min, args.t_max, args.seed),
                k,
                format!("surrogate:poisson(seed {})", args.seed),
            )
        }
        _ => bail!("provide exactly one of --zero-file or --surrogate"),
    };
    let hist = zeros::empirical_r2_from_heights(&heights, k, args.bin_width, args.max_x)?;
    let table = arith::sieve_primes(args.prime_cutoff)?;
    let e_lo = heights.first().copied().unwrap_or(1.0);
    let e_hi = heights.last().copied().unwrap_or(2.0);
    let predicted = zeros::r2_prediction(
        k,
        e_lo,
        e_hi,
        &hist.bins,
        &table,
        args.prime_cutoff,
        args.m_cutoff,
    )?;

    let mut w = create_out(&args.out)?;
    writeln!(w, "x_bin,density,stderr,predicted,z_score")?;
    let mut mad = 0.0f64;
    let mut max_dev = 0.0f64;
    let mut chi2 = 0.0f64;
    for (bin, &pred) in hist.bins.iter().zip(&predicted) {
        let dev = bin.density - pred;
        let z = dev / bin.stderr.max(1e-12);
        mad += dev.abs();
        max_dev = max_dev.max(dev.abs());
        chi2 += z * z;
        writeln!(w, "{:e},{:e},{:e},{:e},{:e}", bin.x_mid, bin.density, bin.stderr, pred, z)?;
    }
    mad /= hist.bins.len() as f64;
    w.flush()?;

    let first_bin = hist.bins.first().map(|b| b.density).unwrap_or(f64::NAN);
    let first_pred = predicted.first().copied().unwrap_or(f64::NAN);
    let summary = CompareSummary {
        modulus: k,
        n_zeros: hist.n_zeros,
        n_inner: hist.n_inner,
        bin_width: hist.bin_width,
        max_x: hist.max_x,
        source,
        mean_abs_deviation: mad,
        max_abs_deviation: max_dev,
        chi2,
        dof: hist.bins.len(),
        first_bin_density: first_bin,
        first_bin_predicted: first_pred,
        gue_consistent: mad <= 0.05 && first_bin <= 0.15f64.max(2.0 * first_pred),
    };
    let mut spath = args.out.as_os_str().to_owned();
    spath.push(".summary.json");
    let mut sw = create_out(Path::new(&spath))?;
    serde_json::to_writer_pretty(&mut sw, &summary)?;
    writeln!(sw)?;
    sw.flush()?;

    write_sidecar(
        &args.out,
        &serde_json::json!({
            "command": "compare",
            "version": version(),
            "config": args,
            "tail_estimates": tail_estimates(args.prime_cutoff),
            "summary": summary,
        }),
    )?;
    println!(
        "compare: {} bins, mean |Δ| = {:.4}, max |Δ| = {:.4}, χ²/dof = {:.2}, first bin {:.4}{}",
        summary.dof,
        summary.mean_abs_deviation,
        summary.max_abs_deviation,
        summary.chi2 / summary.dof.max(1) as f64,
        summary.first_bin_density,
        if summary.gue_consistent { "" } else { "  [deviates from GUE]" }
    );
    Ok(ExitCode::SUCCESS)
}
