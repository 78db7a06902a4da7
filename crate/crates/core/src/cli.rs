//! The `qeci` command line: argument definitions and command implementations.
//!
//! Exit codes: 0 success, 2 unreadable input or bad flags, 3 input violates
//! a contract (the message names it), 4 numeric failure.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::causal::{
    analyze_direction, classical_eci, qeci_infer, CausalVerdict, DirectionalAnalysis, Orientation,
    DEFAULT_TIE_TOL,
};
use crate::channels::{qsc_computational, ChannelKind, ChannelSpec};
use crate::classicalmap::{diag_embed, rotate_to_classical};
use crate::coupling::{greedy_min_entropy_coupling, MarginalSet};
use crate::error::Error;
use crate::io::{
    density_to_json, parse_marginal_rows, read_density, read_joint_table, write_joint_table,
    FormatError,
};
use crate::linalg::{ComplexMatrix, DEFAULT_EIG_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "qeci", version, about = "Causal direction between two quantum subsystems from their joint density matrix")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Infer the causal direction of a joint density file (or a classical joint table).
    Infer {
        /// Density file (JSON) or joint table (CSV); `-` reads stdin.
        #[arg(long)]
        input: PathBuf,
        /// Validation tolerance for the input state.
        #[arg(long, env = "QECI_TOL", default_value_t = 1e-9)]
        tol: f64,
        /// Print one JSON record with full-precision entropies.
        #[arg(long)]
        json: bool,
    },
    /// Sweep the error probability of a channel experiment and write CSV.
    Sweep(SweepArgs),
    /// Greedy minimum-entropy coupling of the probability rows in a JSON file.
    Coupling {
        #[arg(long)]
        marginals: PathBuf,
    },
    /// Convert between density files and classical joint tables.
    MapClassical {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        mode: MapMode,
        #[arg(long, env = "QECI_TOL", default_value_t = 1e-9)]
        tol: f64,
    },
    /// Print a step-by-step trace of a worked example.
    Demo {
        #[arg(value_enum, default_value_t = DemoName::WorkedExample)]
        name: DemoName,
    },
}

#[derive(Debug, Clone, clap::Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub channel: ChannelArg,
    #[arg(long, default_value_t = 0.4)]
    pub q: f64,
    #[arg(long = "p-start")]
    pub p_start: f64,
    #[arg(long = "p-end")]
    pub p_end: f64,
    /// Number of grid points, endpoints included.
    #[arg(long)]
    pub steps: usize,
    #[arg(long, default_value_t = 0.6)]
    pub gamma1: f64,
    #[arg(long, default_value_t = 0.8)]
    pub lambda1: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
    pub gamma2: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
    pub lambda2: f64,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChannelArg {
    Qsc,
    Gqsc,
    Depolarizing,
    Bitflip,
}

impl From<ChannelArg> for ChannelKind {
    fn from(c: ChannelArg) -> Self {
        match c {
            ChannelArg::Qsc => ChannelKind::Qsc,
            ChannelArg::Gqsc => ChannelKind::Gqsc,
            ChannelArg::Depolarizing => ChannelKind::Depolarizing,
            ChannelArg::Bitflip => ChannelKind::Bitflip,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapMode {
    /// Density file in, CSV joint table out.
    Rotate,
    /// Joint table in, diagonal density file out.
    Embed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoName {
    WorkedExample,
}

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Invariant(Error),
    Numeric(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Invariant(_) => EXIT_INVARIANT,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(msg) => write!(f, "{msg}"),
            CliError::Invariant(e) | CliError::Numeric(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_invariant_violation() {
            CliError::Invariant(e)
        } else {
            CliError::Numeric(e)
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Parse(msg) => CliError::Parse(msg),
            FormatError::Invalid(e) => e.into(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Parse(e.to_string())
    }
}

/// Runs a parsed command, writing the report to `out` and diagnostics to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Infer { input, tol, json } => cmd_infer(&input, tol, json, out, err),
        Command::Sweep(args) => cmd_sweep(&args, out, err),
        Command::Coupling { marginals } => cmd_coupling(&marginals, out),
        Command::MapClassical { input, mode, tol } => cmd_map_classical(&input, mode, tol, out),
        Command::Demo { name: DemoName::WorkedExample } => worked_example_report()
            .map_err(CliError::from)
            .and_then(|s| out.write_all(s.as_bytes()).map_err(CliError::from)),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn read_input(path: &Path) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))
    }
}

#[derive(Serialize)]
struct VerdictRecord<'a> {
    input: &'a str,
    direction: &'a str,
    s_forward: f64,
    s_backward: f64,
    delta: f64,
    s_cause_fwd: f64,
    s_exo_fwd: f64,
    s_cause_bwd: f64,
    s_exo_bwd: f64,
    warnings: Vec<String>,
}

pub fn format_verdict(v: &CausalVerdict) -> String {
    format!(
        "{}  S(A->B)={:.4}  S(A<-B)={:.4}\n  S(A)={:.4}  S(E)={:.4}\n  S(B)={:.4}  S(E')={:.4}\n",
        v.direction, v.s_forward, v.s_backward, v.s_cause_fwd, v.s_exo_fwd, v.s_cause_bwd, v.s_exo_bwd
    )
}

fn cmd_infer(
    input: &Path,
    tol: f64,
    json: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let text = read_input(input)?;
    let (kind, verdict) = if text.trim_start().starts_with('{') {
        let rho = read_density(&text, tol)?;
        if rho.dims().len() != 2 {
            return Err(CliError::Parse(format!(
                "expected exactly two subsystem dims, got {:?}",
                rho.dims()
            )));
        }
        ("density", qeci_infer(&rho, DEFAULT_TIE_TOL)?)
    } else {
        ("table", classical_eci(&read_joint_table(&text)?, DEFAULT_TIE_TOL)?)
    };
    for w in &verdict.warnings {
        writeln!(err, "warning: {w}")?;
    }
    if json {
        let record = VerdictRecord {
            input: kind,
            direction: verdict.direction.as_str(),
            s_forward: verdict.s_forward,
            s_backward: verdict.s_backward,
            delta: verdict.delta(),
            s_cause_fwd: verdict.s_cause_fwd,
            s_exo_fwd: verdict.s_exo_fwd,
            s_cause_bwd: verdict.s_cause_bwd,
            s_exo_bwd: verdict.s_exo_bwd,
            warnings: verdict.warnings.iter().map(ToString::to_string).collect(),
        };
        let line = serde_json::to_string(&record).map_err(|e| CliError::Parse(e.to_string()))?;
        writeln!(out, "{line}")?;
    } else {
        out.write_all(format_verdict(&verdict).as_bytes())?;
    }
    Ok(())
}

/// One grid point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub p: f64,
    pub s_forward: f64,
    pub s_backward: f64,
    pub delta: f64,
    pub direction: String,
}

/// Inclusive uniform grid of `steps` points.
pub fn sweep_grid(p_start: f64, p_end: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![p_start],
        _ => (0..steps)
            .map(|k| {
                if k + 1 == steps {
                    p_end
                } else {
                    p_start + (p_end - p_start) * k as f64 / (steps - 1) as f64
                }
            })
            .collect(),
    }
}

/// Evaluates the channel at each grid point in parallel; rows come back in grid order.
pub fn run_sweep(spec: ChannelSpec, grid: &[f64], tie_tol: f64) -> Vec<SweepRow> {
    grid.par_iter()
        .map(|&p| match spec.with_p(p).build().and_then(|rho| qeci_infer(&rho, tie_tol)) {
            Ok(v) => SweepRow {
                p,
                s_forward: v.s_forward,
                s_backward: v.s_backward,
                delta: v.delta(),
                direction: v.direction.as_str().to_string(),
            },
            Err(_) => SweepRow {
                p,
                s_forward: f64::NAN,
                s_backward: f64::NAN,
                delta: f64::NAN,
                direction: "error".to_string(),
            },
        })
        .collect()
}

/// Fixed-point with at most `digits` decimals and trailing zeros removed.
fn format_trimmed(x: f64, digits: usize) -> String {
    let s = format!("{x:.digits$}");
    if s.contains('.') {
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".to_string() } else { s.to_string() }
    } else {
        s
    }
}

pub fn write_sweep_csv(rows: &[SweepRow], out: impl Write) -> std::io::Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(["p", "s_forward", "s_backward", "delta", "direction"])?;
    for r in rows {
        writer.write_record([
            format_trimmed(r.p, 12),
            format!("{:.12}", r.s_forward),
            format!("{:.12}", r.s_backward),
            format!("{:.12}", r.delta),
            r.direction.clone(),
        ])?;
    }
    writer.flush()
}

fn validate_sweep(args: &SweepArgs) -> Result<ChannelSpec, CliError> {
    let bad = |msg: String| Err(CliError::Parse(msg));
    for (name, v) in [("q", args.q), ("p-start", args.p_start), ("p-end", args.p_end)] {
        if !(0.0..=1.0).contains(&v) {
            return bad(format!("--{name} = {v} must lie in [0, 1]"));
        }
    }
    if args.steps == 0 {
        return bad("--steps must be at least 1".into());
    }
    if args.steps == 1 && args.p_start != args.p_end {
        return bad("--steps 1 needs --p-start equal to --p-end".into());
    }
    let mut spec = ChannelSpec::new(args.channel.into(), args.q, args.p_start);
    if spec.kind == ChannelKind::Depolarizing {
        for (name, (g, l)) in [("1", (args.gamma1, args.lambda1)), ("2", (args.gamma2, args.lambda2))] {
            if ((g * g + l * l) - 1.0).abs() > 1e-9 {
                return bad(format!("--gamma{name}^2 + --lambda{name}^2 must equal 1"));
            }
        }
        spec.c1 = (args.gamma1, args.lambda1);
        spec.c2 = (args.gamma2, args.lambda2);
    }
    Ok(spec)
}

fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let spec = validate_sweep(args)?;
    let grid = sweep_grid(args.p_start, args.p_end, args.steps);
    let rows = run_sweep(spec, &grid, DEFAULT_TIE_TOL);
    for r in &rows {
        if r.p == 0.0 || r.p == 1.0 {
            writeln!(
                err,
                "note: p={} is a symmetric endpoint; the direction is undetermined there",
                r.p
            )?;
        }
    }
    match &args.out {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| CliError::Parse(format!("cannot write {}: {e}", path.display())))?;
            write_sweep_csv(&rows, std::io::BufWriter::new(file))?;
        }
        None => write_sweep_csv(&rows, out)?,
    }
    Ok(())
}

fn cmd_coupling(path: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let rows = parse_marginal_rows(&read_input(path)?)?;
    if rows.len() < 2 {
        return Err(Error::InvalidMarginals(format!("need at least 2 rows, got {}", rows.len())).into());
    }
    let result = greedy_min_entropy_coupling(&MarginalSet::new(rows)?);
    for p in &result.placements {
        let coords: Vec<String> = p.coords.iter().map(ToString::to_string).collect();
        writeln!(out, "placement ({}) mass {:.4}", coords.join(", "), p.mass)?;
    }
    writeln!(out, "entropy {:.4} bits", result.entropy_bits)?;
    Ok(())
}

fn cmd_map_classical(path: &Path, mode: MapMode, tol: f64, out: &mut dyn Write) -> Result<(), CliError> {
    let text = read_input(path)?;
    match mode {
        MapMode::Rotate => {
            let table = rotate_to_classical(&read_density(&text, tol)?)?;
            write_joint_table(&table, out)?;
        }
        MapMode::Embed => {
            let rho = diag_embed(&read_joint_table(&text)?)?;
            writeln!(out, "{}", density_to_json(&rho))?;
        }
    }
    Ok(())
}

fn fmt_matrix(m: &ComplexMatrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let cells: Vec<String> = (0..m.cols())
                .map(|j| {
                    let z = m[(i, j)];
                    if z.im.abs() < 5e-5 {
                        format!("{:.4}", z.re)
                    } else {
                        format!("{:.4}{:+.4}i", z.re, z.im)
                    }
                })
                .collect();
            cells.join(" ")
        })
        .collect();
    format!("[{}]", rows.join("; "))
}

fn fmt_vec(v: &[f64]) -> String {
    let cells: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("[{}]", cells.join(" "))
}

fn fmt_ket(v: &[crate::linalg::Complex]) -> String {
    let cells: Vec<String> = v.iter().map(|z| format!("{:.4}", z.re)).collect();
    format!("[{}]", cells.join(" "))
}

/// Writes steps for one direction. Eigenpairs are listed in ascending order,
/// the convention the worked example is reported in.
fn trace_direction(
    s: &mut String,
    a: &DirectionalAnalysis,
    first_step: usize,
    cause: &str,
    effect: &str,
) -> std::fmt::Result {
    let mut step = first_step;
    let branches: Vec<_> = a.branches.iter().rev().collect();
    let weights: Vec<f64> = branches.iter().map(|b| b.weight).collect();
    let vectors: Vec<String> = branches.iter().map(|b| fmt_ket(b.eigenvector.amplitudes())).collect();
    let eigvecs = ComplexMatrix::new(
        a.cause.dim(),
        branches.len(),
        (0..a.cause.dim())
            .flat_map(|i| branches.iter().map(move |b| b.eigenvector.amplitudes()[i]))
            .collect(),
    )
    .map_err(|_| std::fmt::Error)?;
    writeln!(
        s,
        "{step:>2}. eig(rho_{cause}): V = {}, D = diag{}",
        fmt_matrix(&eigvecs),
        fmt_vec(&weights)
    )?;
    step += 1;
    let labels: Vec<String> = weights.iter().enumerate().map(|(i, w)| format!("d{i}={w:.4}")).collect();
    writeln!(s, "{step:>2}. for {}:", labels.join(", "))?;
    step += 1;
    for (i, (b, v)) in branches.iter().zip(&vectors).enumerate() {
        writeln!(
            s,
            "{step:>2}. {}{i} = e{i} e{i}^T with e{i} = {v}: {}",
            cause.to_lowercase(),
            fmt_matrix(&b.eigenvector.projector())
        )?;
    }
    step += 1;
    for (i, b) in branches.iter().enumerate() {
        writeln!(s, "{step:>2}. rho_{i} = {}", fmt_matrix(&b.numerator))?;
    }
    step += 1;
    for (i, b) in branches.iter().enumerate() {
        writeln!(
            s,
            "{step:>2}. rho_{{{effect}||{}_{i}>}} = {}",
            cause.to_lowercase(),
            fmt_matrix(b.conditional.matrix())
        )?;
    }
    step += 1;
    let rows: Vec<Vec<f64>> = branches
        .iter()
        .map(|b| b.conditional.spectrum().iter().rev().copied().collect())
        .collect();
    for (i, r) in rows.iter().enumerate() {
        writeln!(s, "{step:>2}. B_{i} = eig = {}", fmt_vec(r))?;
    }
    step += 1;
    let m: Vec<String> = rows.iter().map(|r| fmt_vec(r)).collect();
    writeln!(s, "{step:>2}. M = [{}]", m.join("; "))?;
    step += 1;
    writeln!(s, "{step:>2}. end for")?;
    Ok(())
}

/// Full trace of the bit-flip channel example with `q = 0.4`, `p = 0.05`.
pub fn worked_example_report() -> Result<String, Error> {
    let rho = qsc_computational(0.4, 0.05)?;
    let fwd = analyze_direction(&rho, Orientation::Forward, DEFAULT_EIG_TOL)?;
    let bwd = analyze_direction(&rho, Orientation::Backward, DEFAULT_EIG_TOL)?;
    let verdict = qeci_infer(&rho, DEFAULT_TIE_TOL)?;
    let rho_ba = rho.swapped()?;

    let mut s = String::new();
    let w = |s: &mut String| -> std::fmt::Result {
        writeln!(s, "Worked example: QSC with q = 0.4, p = 0.05")?;
        writeln!(s, "    rho_AB = {}", fmt_matrix(rho.matrix()))?;
        writeln!(s, " 1. rho_A = Tr_B(rho_AB) = {}", fmt_matrix(fwd.cause.matrix()))?;
        writeln!(s, " 2. rho_B = Tr_A(rho_AB) = {}", fmt_matrix(bwd.cause.matrix()))?;
        writeln!(s, " 3. rho_BA = {}", fmt_matrix(rho_ba.matrix()))?;
        trace_direction(s, &fwd, 4, "A", "B")?;
        writeln!(s, "12. S(rho_E) = {:.4}", fwd.exogenous_entropy())?;
        writeln!(
            s,
            "13. S(A->B) = S(rho_A) + S(rho_E) = {:.4} + {:.4} = {:.4}",
            fwd.cause_entropy(),
            fwd.exogenous_entropy(),
            verdict.s_forward
        )?;
        trace_direction(s, &bwd, 14, "B", "A")?;
        writeln!(s, "22. S(rho_E') = {:.4}", bwd.exogenous_entropy())?;
        writeln!(
            s,
            "23. S(A<-B) = S(rho_B) + S(rho_E') = {:.4} + {:.4} = {:.4}",
            bwd.cause_entropy(),
            bwd.exogenous_entropy(),
            verdict.s_backward
        )?;
        let cmp = match verdict.direction {
            crate::causal::Direction::AtoB => "<",
            crate::causal::Direction::BtoA => ">",
            crate::causal::Direction::Tie => "=",
        };
        writeln!(s, "24. compare: S(A->B) {cmp} S(A<-B)")?;
        writeln!(s, "25. causal model: {}", verdict.direction)
    };
    w(&mut s).expect("writing to a String");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_inclusive() {
        let g = sweep_grid(0.05, 0.95, 19);
        assert_eq!(g.len(), 19);
        assert_eq!(g[0], 0.05);
        assert_eq!(g[18], 0.95);
        assert!((g[9] - 0.5).abs() < 1e-15);
        assert_eq!(sweep_grid(0.5, 0.5, 1), vec![0.5]);
    }

    #[test]
    fn trimmed_formatting() {
        assert_eq!(format_trimmed(0.5, 12), "0.5");
        assert_eq!(format_trimmed(0.49999999999999994, 12), "0.5");
        assert_eq!(format_trimmed(1.0, 12), "1");
        assert_eq!(format_trimmed(0.0, 12), "0");
    }

    #[test]
    fn demo_has_all_steps() {
        let report = worked_example_report().unwrap();
        for step in 1..=25 {
            assert!(
                report.lines().any(|l| l.trim_start().starts_with(&format!("{step}. "))),
                "missing step {step}\n{report}"
            );
        }
    }
}
