use clap::{Args, Parser, Subcommand};
use qcorr::entropy::EntropySpec;
use qcorr::measure::OptimizerOptions;
use qcorr::runs::{self, CheckKind};
use qcorr::state::StateTag;
use serde_json::json;
use std::f64::consts::FRAC_PI_2;
use std::path::PathBuf;
use std::process::ExitCode;

/// Entropic measures of quantum correlations for two-qubit states.
#[derive(Parser)]
#[command(name = "qcorr", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Minimal information loss (and discord for vn) of a state file
    Measure(MeasureArgs),
    /// Sweep the aligned-mixture family; emits figure data
    SweepAligned(SweepArgs),
    /// Envelope of the universal measure at fixed largest eigenvalue
    Envelope(EnvelopeArgs),
    /// Dense-grid cross-check of the library answer for one state
    Oracle(OracleArgs),
    /// Randomized property checks
    Random(RandomArgs),
}

#[derive(Args)]
struct OptimizerFlags {
    /// Coarse direction-grid resolution
    #[arg(long, default_value_t = 64)]
    grid: usize,
    /// Refinement tolerance on angles
    #[arg(long, default_value_t = 1e-10)]
    xtol: f64,
    /// Iteration cap for the local refinement
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    /// Force the grid optimizer even where closed forms exist
    #[arg(long)]
    no_closed: bool,
    /// Escalate optimizer failures and oracle gaps to nonzero exits
    #[arg(long)]
    strict: bool,
}

impl OptimizerFlags {
    fn options(&self) -> OptimizerOptions {
        OptimizerOptions {
            grid_n: self.grid,
            xtol: self.xtol,
            max_iter: self.max_iter,
            allow_closed: !self.no_closed,
            ..OptimizerOptions::default()
        }
    }
}

#[derive(Args)]
struct OutputFlags {
    /// Output path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
    /// json or csv
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct MeasureArgs {
    /// State file (JSON, bloch or rho shape)
    #[arg(long)]
    state: PathBuf,
    /// Comma-separated entropy specs: vn | lin | cub | q=<r>
    #[arg(long, default_value = "vn,lin,cub")]
    entropy: String,
    #[command(flatten)]
    opt: OptimizerFlags,
    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value = "vn,lin,cub")]
    entropy: String,
    /// Range start, in units of pi/2
    #[arg(long, default_value_t = 0.0)]
    theta_min: f64,
    /// Range end, in units of pi/2
    #[arg(long, default_value_t = 1.0)]
    theta_max: f64,
    #[arg(long, default_value_t = 256)]
    steps: usize,
    #[command(flatten)]
    opt: OptimizerFlags,
    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Args)]
struct EnvelopeArgs {
    /// Single entropy spec (lin, cub or vn)
    #[arg(long, default_value = "lin")]
    entropy: String,
    #[arg(long, default_value_t = 0.25)]
    p1_min: f64,
    #[arg(long, default_value_t = 1.0)]
    p1_max: f64,
    #[arg(long, default_value_t = 151)]
    p1_steps: usize,
    /// Simplex safety-net resolution
    #[arg(long, default_value_t = 64)]
    grid: usize,
    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    state: PathBuf,
    /// Single entropy spec
    #[arg(long, default_value = "lin")]
    entropy: String,
    /// Dense grid resolution (>= 8)
    #[arg(long, default_value_t = 256)]
    grid: usize,
    /// Acceptable |gap| in --strict mode
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Force the grid optimizer for the primary answer too
    #[arg(long)]
    no_closed: bool,
    #[arg(long)]
    strict: bool,
    #[command(flatten)]
    output: OutputFlags,
}

#[derive(Args)]
struct RandomArgs {
    #[arg(long, default_value_t = 1000)]
    count: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Comma-separated checks (default: all). Available: purity_bounds,
    /// non_negativity, closed_vs_oracle, rotation_invariance, bell_i3_le_i2,
    /// concurrence_bounds, round_trip
    #[arg(long)]
    checks: Option<String>,
    /// Oracle grid used by closed_vs_oracle
    #[arg(long, default_value_t = 64)]
    grid: usize,
    #[command(flatten)]
    output: OutputFlags,
}

// exit codes shared with the docs: 2 parse/validation, 3 optimizer failure,
// 4 oracle gap, 5 property failure
const EXIT_INVALID: u8 = 2;
const EXIT_OPTIMIZER: u8 = 3;
const EXIT_GAP: u8 = 4;
const EXIT_PROPERTY: u8 = 5;

fn fail(exit: u8, code: &str, message: String, context: serde_json::Value) -> ExitCode {
    let obj = json!({"code": code, "message": message, "context": context});
    eprintln!("{obj}");
    ExitCode::from(exit)
}

/// 12 significant digits, '.' decimal, no locale anywhere.
fn fmt12(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000000e0".to_string();
    }
    format!("{:.11e}", x)
}

fn parse_specs(s: &str) -> Result<Vec<EntropySpec>, String> {
    let mut specs = Vec::new();
    for part in s.split(',') {
        specs.push(EntropySpec::parse(part).map_err(|e| e.to_string())?);
    }
    if specs.is_empty() {
        return Err("no entropy specs given".to_string());
    }
    Ok(specs)
}

fn emit(output: &OutputFlags, text: String) -> Result<(), std::io::Error> {
    use std::io::Write;
    match &output.out {
        Some(path) => std::fs::write(path, text),
        None => match std::io::stdout().write_all(text.as_bytes()) {
            // a closed pipe downstream is not our error
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
            other => other,
        },
    }
}

fn format_of(output: &OutputFlags, default: &str) -> Result<String, String> {
    let f = output
        .format
        .clone()
        .unwrap_or_else(|| default.to_string());
    if f == "json" || f == "csv" {
        Ok(f)
    } else {
        Err(format!("unknown format '{f}' (expected json or csv)"))
    }
}

fn tag_label(tag: StateTag) -> &'static str {
    match tag {
        StateTag::Pure => "pure",
        StateTag::BellDiagonal => "bell_diagonal",
        StateTag::XState => "x_state",
        StateTag::General => "general",
    }
}

fn report_json(label: &str, rep: &qcorr::MeasurementReport) -> serde_json::Value {
    let k = rep.direction.vector();
    json!({
        "entropy": label,
        "value": rep.value,
        "direction": {
            "k": [k.x, k.y, k.z],
            "gamma": rep.direction.gamma(),
            "phi": rep.direction.phi(),
        },
        "cond_spectrum": rep.cond_spectrum,
        "residual": rep.residual,
        "method": rep.method.label(),
        "degenerate": rep.degenerate,
        "singular": rep.singular,
        "converged": rep.converged,
    })
}

fn cmd_measure(args: MeasureArgs) -> ExitCode {
    let specs = match parse_specs(&args.entropy) {
        Ok(s) => s,
        Err(m) => return fail(EXIT_INVALID, "bad_entropy_spec", m, json!({"entropy": args.entropy})),
    };
    let format = match format_of(&args.output, "json") {
        Ok(f) => f,
        Err(m) => return fail(EXIT_INVALID, "bad_format", m, json!({})),
    };
    let state = match qcorr::io::read_state_file(&args.state) {
        Ok(s) => s,
        Err(e) => {
            return fail(
                EXIT_INVALID,
                "invalid_state",
                e.to_string(),
                json!({"path": args.state.display().to_string()}),
            )
        }
    };
    let opts = args.opt.options();
    let class = state.classify(1e-9);
    let conc = qcorr::concurrence(&state);

    let mut reports = Vec::new();
    for &spec in &specs {
        reports.push((spec.label(), qcorr::minimize_info_loss(&state, spec, &opts)));
    }
    let discord = specs
        .contains(&EntropySpec::VonNeumann)
        .then(|| qcorr::discord(&state, &opts));

    if args.opt.strict {
        let stuck = reports
            .iter()
            .map(|(_, r)| r)
            .chain(discord.iter())
            .any(|r| !r.converged);
        if stuck {
            return fail(
                EXIT_OPTIMIZER,
                "optimizer_failure",
                "direction refinement did not converge".to_string(),
                json!({"path": args.state.display().to_string()}),
            );
        }
    }

    let text = if format == "json" {
        let mut obj = json!({
            "state": args.state.display().to_string(),
            "classification": tag_label(class.tag),
            "concurrence": {"value": conc.value, "method": conc.method.label()},
            "reports": reports.iter().map(|(l, r)| report_json(l, r)).collect::<Vec<_>>(),
        });
        if let Some(d) = &discord {
            obj["discord"] = report_json("vn", d);
        }
        serde_json::to_string_pretty(&obj).unwrap() + "\n"
    } else {
        let mut text = String::from(
            "entropy,value,gamma,phi,residual,method,degenerate,singular,converged,classification,concurrence\n",
        );
        let mut push_row = |label: &str, rep: &qcorr::MeasurementReport| {
            text.push_str(&format!(
                "{label},{},{},{},{},{},{},{},{},{},{}\n",
                fmt12(rep.value),
                fmt12(rep.direction.gamma()),
                fmt12(rep.direction.phi()),
                fmt12(rep.residual),
                rep.method.label(),
                rep.degenerate,
                rep.singular,
                rep.converged,
                tag_label(class.tag),
                fmt12(conc.value),
            ));
        };
        for (label, rep) in &reports {
            push_row(label, rep);
        }
        if let Some(d) = &discord {
            push_row("discord", d);
        }
        text
    };
    match emit(&args.output, text) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(EXIT_INVALID, "io_error", e.to_string(), json!({})),
    }
}

fn cmd_sweep(args: SweepArgs) -> ExitCode {
    let specs = match parse_specs(&args.entropy) {
        Ok(s) => s,
        Err(m) => return fail(EXIT_INVALID, "bad_entropy_spec", m, json!({"entropy": args.entropy})),
    };
    if args.steps < 2 {
        return fail(
            EXIT_INVALID,
            "bad_range",
            "steps must be >= 2".to_string(),
            json!({"steps": args.steps}),
        );
    }
    let format = match format_of(&args.output, "csv") {
        Ok(f) => f,
        Err(m) => return fail(EXIT_INVALID, "bad_format", m, json!({})),
    };
    let opts = args.opt.options();
    let rows = runs::sweep_aligned(
        args.theta_min * FRAC_PI_2,
        args.theta_max * FRAC_PI_2,
        args.steps,
        &specs,
        &opts,
    );
    if args.opt.strict && rows.iter().any(|r| r.cells.iter().any(|c| !c.converged)) {
        return fail(
            EXIT_OPTIMIZER,
            "optimizer_failure",
            "direction refinement did not converge at some sweep point".to_string(),
            json!({}),
        );
    }

    let with_discord = rows.first().is_some_and(|r| r.discord_value.is_some());
    let text = if format == "csv" {
        // theta and gamma columns in units of pi/2, matching the usual
        // presentation of this family
        let mut header = String::from("theta");
        for spec in &specs {
            let l = spec.label();
            header.push_str(&format!(",{l}_value,{l}_gamma,{l}_branch"));
        }
        if with_discord {
            header.push_str(",discord_value,discord_gamma");
        }
        let mut text = header + "\n";
        for row in &rows {
            text.push_str(&fmt12(row.theta / FRAC_PI_2));
            for cell in &row.cells {
                text.push_str(&format!(
                    ",{},{},{}",
                    fmt12(cell.value),
                    fmt12(cell.gamma / FRAC_PI_2),
                    cell.branch
                ));
            }
            if with_discord {
                text.push_str(&format!(
                    ",{},{}",
                    fmt12(row.discord_value.unwrap()),
                    fmt12(row.discord_gamma.unwrap() / FRAC_PI_2)
                ));
            }
            text.push('\n');
        }
        text
    } else {
        let arr: Vec<_> = rows
            .iter()
            .map(|row| {
                let mut obj = json!({"theta": row.theta / FRAC_PI_2});
                for (spec, cell) in specs.iter().zip(&row.cells) {
                    obj[spec.label()] = json!({
                        "value": cell.value,
                        "gamma": cell.gamma / FRAC_PI_2,
                        "branch": cell.branch,
                    });
                }
                if let (Some(v), Some(g)) = (row.discord_value, row.discord_gamma) {
                    obj["discord"] = json!({"value": v, "gamma": g / FRAC_PI_2});
                }
                obj
            })
            .collect();
        serde_json::to_string_pretty(&arr).unwrap() + "\n"
    };
    match emit(&args.output, text) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(EXIT_INVALID, "io_error", e.to_string(), json!({})),
    }
}

fn cmd_envelope(args: EnvelopeArgs) -> ExitCode {
    let spec = match EntropySpec::parse(&args.entropy) {
        Ok(s) => s,
        Err(e) => {
            return fail(
                EXIT_INVALID,
                "bad_entropy_spec",
                e.to_string(),
                json!({"entropy": args.entropy}),
            )
        }
    };
    if args.p1_steps < 2 {
        return fail(
            EXIT_INVALID,
            "bad_range",
            "p1-steps must be >= 2".to_string(),
            json!({"p1_steps": args.p1_steps}),
        );
    }
    let format = match format_of(&args.output, "csv") {
        Ok(f) => f,
        Err(m) => return fail(EXIT_INVALID, "bad_format", m, json!({})),
    };
    let rows = match runs::envelope_rows(args.p1_min, args.p1_max, args.p1_steps, spec, args.grid)
    {
        Ok(r) => r,
        Err(e) => {
            return fail(
                EXIT_INVALID,
                "infeasible_p1",
                e.to_string(),
                json!({"p1_min": args.p1_min, "p1_max": args.p1_max}),
            )
        }
    };
    let text = if format == "csv" {
        let mut text = String::from("p1,min,max,csq,eof\n");
        for r in &rows {
            text.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt12(r.p1),
                fmt12(r.min),
                fmt12(r.max),
                fmt12(r.concurrence_squared),
                fmt12(r.eof)
            ));
        }
        text
    } else {
        let arr: Vec<_> = rows
            .iter()
            .map(|r| {
                json!({
                    "p1": r.p1, "min": r.min, "max": r.max,
                    "csq": r.concurrence_squared, "eof": r.eof,
                })
            })
            .collect();
        serde_json::to_string_pretty(&arr).unwrap() + "\n"
    };
    match emit(&args.output, text) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(EXIT_INVALID, "io_error", e.to_string(), json!({})),
    }
}

fn cmd_oracle(args: OracleArgs) -> ExitCode {
    let spec = match EntropySpec::parse(&args.entropy) {
        Ok(s) => s,
        Err(e) => {
            return fail(
                EXIT_INVALID,
                "bad_entropy_spec",
                e.to_string(),
                json!({"entropy": args.entropy}),
            )
        }
    };
    if args.grid < 8 {
        return fail(
            EXIT_INVALID,
            "bad_range",
            "oracle grid must be >= 8".to_string(),
            json!({"grid": args.grid}),
        );
    }
    let state = match qcorr::io::read_state_file(&args.state) {
        Ok(s) => s,
        Err(e) => {
            return fail(
                EXIT_INVALID,
                "invalid_state",
                e.to_string(),
                json!({"path": args.state.display().to_string()}),
            )
        }
    };
    let opts = OptimizerOptions {
        allow_closed: !args.no_closed,
        ..OptimizerOptions::default()
    };
    let primary = qcorr::minimize_info_loss(&state, spec, &opts);
    let oracle = qcorr::grid_oracle(&state, spec, args.grid);
    let gap = oracle.value - primary.value;
    let ok = oracle.direction.vector();
    let obj = json!({
        "state": args.state.display().to_string(),
        "entropy": spec.label(),
        "oracle": {
            "value": oracle.value,
            "direction": {"k": [ok.x, ok.y, ok.z], "gamma": oracle.direction.gamma(), "phi": oracle.direction.phi()},
            "grid": args.grid,
            "evaluations": oracle.evaluations,
        },
        "primary": report_json(&spec.label(), &primary),
        "gap": gap,
        "tol": args.tol,
        "within_tol": gap.abs() <= args.tol,
    });
    let text = serde_json::to_string_pretty(&obj).unwrap() + "\n";
    if let Err(e) = emit(&args.output, text) {
        return fail(EXIT_INVALID, "io_error", e.to_string(), json!({}));
    }
    if args.strict && gap.abs() > args.tol {
        return fail(
            EXIT_GAP,
            "oracle_gap",
            format!("|gap| {} exceeds tolerance {}", gap.abs(), args.tol),
            json!({"gap": gap, "tol": args.tol}),
        );
    }
    ExitCode::SUCCESS
}

fn cmd_random(args: RandomArgs) -> ExitCode {
    if args.count < 1 {
        return fail(
            EXIT_INVALID,
            "bad_range",
            "count must be >= 1".to_string(),
            json!({"count": args.count}),
        );
    }
    let checks: Vec<CheckKind> = match &args.checks {
        None => CheckKind::ALL.to_vec(),
        Some(list) => {
            let mut v = Vec::new();
            for part in list.split(',') {
                match CheckKind::parse(part) {
                    Some(c) => v.push(c),
                    None => {
                        return fail(
                            EXIT_INVALID,
                            "bad_check",
                            format!("unknown check '{part}'"),
                            json!({"checks": list}),
                        )
                    }
                }
            }
            v
        }
    };
    let report = runs::random_run(args.count, args.seed, &checks, args.grid.max(8));
    let obj = json!({
        "count": report.count,
        "seed": report.seed,
        "checks": report.outcomes.iter().map(|o| json!({
            "name": o.check.label(),
            "passed": o.passed,
            "failed": o.failed,
            "worst": o.worst,
        })).collect::<Vec<_>>(),
        "all_passed": report.all_passed,
        "first_failure": report.first_failure,
    });
    let text = serde_json::to_string_pretty(&obj).unwrap() + "\n";
    if let Err(e) = emit(&args.output, text) {
        return fail(EXIT_INVALID, "io_error", e.to_string(), json!({}));
    }
    if !report.all_passed {
        return fail(
            EXIT_PROPERTY,
            "property_failure",
            "one or more property checks failed".to_string(),
            obj["first_failure"].clone(),
        );
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::Measure(args) => cmd_measure(args),
        Cmd::SweepAligned(args) => cmd_sweep(args),
        Cmd::Envelope(args) => cmd_envelope(args),
        Cmd::Oracle(args) => cmd_oracle(args),
        Cmd::Random(args) => cmd_random(args),
    }
}
