//! Command dispatch: load a mechanism file, run either or both solvers,
//! emit matrices and transfer functions, cross-validate.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use gearkin::algebra::matrix::Matrix;
use gearkin::algebra::{parse_rational, Bindings, Rational, Scalar, SymbolTable};
use gearkin::crosscheck::{self, Verdict};
use gearkin::digraph::GraphMatrices;
use gearkin::matroid;
use gearkin::mechanism::{gear_ratio, load_mechanism, JointId, Mechanism};
use gearkin::oracle;
use gearkin::tt;

use crate::report::{
    AnalysisReport, BindingLine, CheckLine, LabeledMatrix, MethodReport, RatioLine, VerdictReport,
    VerifySection,
};

#[derive(Debug, Parser)]
#[command(
    name = "gearkin",
    version,
    about = "Exact angular-velocity analysis of geared mechanisms from a topology-plus-geometry description"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one or both velocity analyses and report transfer matrices.
    Analyze(AnalyzeArgs),
    /// Dump the digraph matrices (incidence, path, spanning tree, cycles).
    EmitMatrices { file: PathBuf },
    /// Load a mechanism file and report whether it is valid.
    Validate { file: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Method {
    Matroid,
    Tt,
    #[default]
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub file: PathBuf,
    /// Which derivation to run.
    #[arg(long, value_enum, default_value_t)]
    pub method: Method,
    /// Print symbolic transfer matrices (the default when no bindings are
    /// given).
    #[arg(long)]
    pub symbolic: bool,
    /// Bind symbols to rationals, e.g. `--bind d1=2,d2=3/2`. With bindings
    /// every symbol must receive a value.
    #[arg(long)]
    pub bind: Vec<String>,
    /// Re-express the matroid output in gear-ratio symbols `i<mesh>`.
    #[arg(long)]
    pub ratios: bool,
    /// Cross-validate the methods against each other and the brute-force
    /// oracle (implies both methods).
    #[arg(long)]
    pub verify: bool,
    #[arg(long, value_enum, default_value_t)]
    pub format: OutputFormat,
    /// Override the file's input set, e.g. `--inputs 8,9,11`.
    #[arg(long)]
    pub inputs: Option<String>,
}

/// Exit codes: 0 success (and agreement), 2 validation error, 3 method
/// disagreement.
pub fn run(cli: Cli) -> i32 {
    let outcome = match cli.command {
        Command::Analyze(args) => analyze(args),
        Command::EmitMatrices { file } => emit_matrices(&file),
        Command::Validate { file } => validate(&file),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    }
}

fn load(file: &Path) -> Result<Mechanism> {
    let text = std::fs::read_to_string(file)
        .with_context(|| format!("reading {}", file.display()))?;
    load_mechanism(&text).with_context(|| format!("loading {}", file.display()))
}

fn emit_matrices(file: &Path) -> Result<i32> {
    let m = load(file)?;
    let gm = GraphMatrices::build(&m)?;
    print!("{}", gm.render_dump());
    Ok(0)
}

fn validate(file: &Path) -> Result<i32> {
    let m = load(file)?;
    let dof = gearkin::mechanism::kutzbach_dof(&m);
    let symbols: Vec<&str> = m.symbols().names().collect();
    let mut line = format!(
        "ok: {} — {} links, {} turning pairs, {} gear meshes, {} dof",
        m.name,
        m.link_count(),
        m.turning_count(),
        m.mesh_count(),
        dof
    );
    if !symbols.is_empty() {
        line.push_str(&format!("; symbols: {}", symbols.join(" ")));
    }
    println!("{line}");
    Ok(0)
}

fn analyze(args: AnalyzeArgs) -> Result<i32> {
    let started = Instant::now();
    let mut m = load(&args.file)?;
    if let Some(list) = &args.inputs {
        let ids = parse_id_list(list)?;
        m = m.with_inputs(ids)?;
    }

    let bind_given = !args.bind.is_empty();
    let mut bindings = Bindings::new(m.symbols());
    if bind_given {
        for chunk in &args.bind {
            for entry in chunk.split(',').filter(|s| !s.is_empty()) {
                let (name, value) = entry
                    .split_once('=')
                    .ok_or_else(|| anyhow!("binding `{entry}` is not of the form name=value"))?;
                let value = parse_rational(value.trim())
                    .with_context(|| format!("binding `{entry}`"))?;
                bindings.set_by_name(name.trim(), value)?;
            }
        }
        if let Some(missing) = bindings.missing() {
            bail!("unbound symbol `{missing}`");
        }
    }
    let numeric_available = bind_given || m.symbols().is_empty();
    let symbolic_requested = args.symbolic || !numeric_available;
    if symbolic_requested && m.has_inexact_angles() {
        bail!(
            "mechanism has joint angles outside {{0, ±90, 180}}°, whose sine/cosine are \
             64-digit rational approximations; symbolic mode is unavailable — bind all \
             symbols and run numerically"
        );
    }

    let run_matroid = args.method != Method::Tt || args.verify;
    let run_tt = args.method != Method::Matroid || args.verify;

    let gm = GraphMatrices::build(&m)?;
    let rank = gm.cycle_rank();
    let mut report = AnalysisReport {
        mechanism: m.name.clone(),
        links: m.link_count(),
        turning_pairs: m.turning_count(),
        gear_meshes: m.mesh_count(),
        dof: m.turning_count() - rank,
        rank,
        inputs: m.input_joints().iter().map(|j| j.0).collect(),
        graph_matrices: match args.format {
            OutputFormat::Json => Some(gm.render_dump()),
            OutputFormat::Text => None,
        },
        matroid: None,
        tt: None,
        verify: None,
        verdict: None,
        timing_ms: None,
    };

    if run_matroid {
        report.matroid = Some(matroid_section(
            &m,
            &gm,
            symbolic_requested,
            args.ratios,
            numeric_available.then_some(&bindings),
        )?);
    }
    let mut tt_solution = None;
    if run_tt {
        let (section, sol) = tt_section(
            &m,
            symbolic_requested,
            numeric_available.then_some(&bindings),
        )?;
        report.tt = Some(section);
        tt_solution = Some(sol);
    }

    // Verdict whenever both methods ran.
    if run_matroid && run_tt {
        let verdict = if !m.has_inexact_angles() {
            crosscheck::compare_symbolic(&m)?
        } else {
            // Symbolic comparison needs exact trig; fall back to the numeric
            // route (bindings are complete here, or loading would have
            // stopped at `symbolic_requested` above).
            crosscheck::compare_numeric(&m, &bindings)?
        };
        report.verdict = Some(verdict_report(&m, verdict, tt_solution.as_ref()));
    }

    if args.verify {
        let (section, ok) = verify_section(&m, bind_given.then_some(&bindings))?;
        if !ok && report.matched() != Some(false) {
            // Surface the failing check as the verdict if the symbolic
            // comparison alone did not already catch it.
            if let Some(line) = section.checks.iter().find(|c| !c.ok) {
                report.verdict = Some(VerdictReport::Mismatched {
                    left_method: "verify".to_string(),
                    right_method: line.name.clone(),
                    output: "-".to_string(),
                    input: "-".to_string(),
                    left_value: line.detail.clone().unwrap_or_default(),
                    right_value: String::new(),
                });
            }
        }
        report.verify = Some(section);
    }

    match args.format {
        OutputFormat::Text => print!("{}", report.to_text()),
        OutputFormat::Json => print!("{}", report.to_json()),
    }
    eprintln!("timing: {:.3} ms", started.elapsed().as_secs_f64() * 1e3);

    Ok(match report.matched() {
        Some(false) => 3,
        _ => 0,
    })
}

fn matroid_section(
    m: &Mechanism,
    gm: &GraphMatrices,
    symbolic: bool,
    ratios: bool,
    bindings: Option<&Bindings>,
) -> Result<MethodReport> {
    let pm = matroid::coefficient_matrix(m, gm);
    let transfer = matroid::solve_transfer(m, &pm)?;
    let row_labels: Vec<String> = transfer.outputs.iter().map(|j| format!("th{j}")).collect();
    let col_labels: Vec<String> = transfer.inputs.iter().map(|j| format!("th{j}")).collect();

    let mut section = MethodReport {
        ratios: Vec::new(),
        symbolic: None,
        numeric: None,
    };
    if symbolic {
        if ratios {
            let rs = matroid::ratio_system(m, gm, &pm)?;
            let rx = matroid::solve_transfer_ratios(m, &rs)?;
            section.ratios = rs
                .mesh_symbols
                .iter()
                .map(|(mesh_id, sym)| {
                    let mesh = m.mesh_by_id(*mesh_id).expect("known mesh");
                    Ok(RatioLine {
                        mesh: mesh_id.0,
                        symbol: rs.table.name(*sym).to_string(),
                        value: gear_ratio(mesh)?.render(m.symbols()),
                        carrier: None,
                        sign: None,
                    })
                })
                .collect::<Result<_>>()?;
            section.symbolic = Some(labeled(&rx.entries, &row_labels, &col_labels, &rs.table));
        } else {
            section.symbolic = Some(labeled(
                &transfer.entries,
                &row_labels,
                &col_labels,
                m.symbols(),
            ));
        }
    }
    if let Some(b) = bindings {
        let numeric = transfer.entries.eval(b)?;
        section.numeric = Some(labeled_numeric(&numeric, &row_labels, &col_labels));
    }
    Ok(section)
}

fn tt_section(
    m: &Mechanism,
    symbolic: bool,
    bindings: Option<&Bindings>,
) -> Result<(MethodReport, tt::TtSolution)> {
    let sol = tt::solve_tt(m)?;
    let row_labels: Vec<String> = sol
        .transfer
        .outputs
        .iter()
        .map(|&j| tt::velocity_label(m, j))
        .collect();
    let col_labels: Vec<String> = sol
        .transfer
        .inputs
        .iter()
        .map(|&j| tt::velocity_label(m, j))
        .collect();

    let mut section = MethodReport {
        ratios: sol
            .assignments
            .iter()
            .zip(&sol.mesh_symbols)
            .map(|(a, (_, sym))| RatioLine {
                mesh: a.mesh.0,
                symbol: sol.table.name(*sym).to_string(),
                value: a.ratio_value.render(m.symbols()),
                carrier: Some(a.carrier.0),
                sign: Some(a.sign.value()),
            })
            .collect(),
        symbolic: None,
        numeric: None,
    };
    if symbolic {
        section.symbolic = Some(labeled(
            &sol.transfer.entries,
            &row_labels,
            &col_labels,
            &sol.table,
        ));
    }
    if let Some(b) = bindings {
        let ratio_bindings = sol.ratio_bindings(b)?;
        let numeric = sol.transfer.entries.eval(&ratio_bindings)?;
        section.numeric = Some(labeled_numeric(&numeric, &row_labels, &col_labels));
    }
    Ok((section, sol))
}

fn verify_section(
    m: &Mechanism,
    user_bindings: Option<&Bindings>,
) -> Result<(VerifySection, bool)> {
    // Numeric checks sample each symbol at a distinct prime unless the user
    // bound values explicitly.
    let bindings = match user_bindings {
        Some(b) => b.clone(),
        None => prime_bindings(m.symbols()),
    };
    let binding_lines: Vec<BindingLine> = bindings
        .entries()
        .map(|(name, value)| BindingLine {
            symbol: name.to_string(),
            value: Scalar::from_rational(value.clone()).render(m.symbols()),
        })
        .collect();

    let mut checks = Vec::new();
    if !m.has_inexact_angles() {
        let verdict = crosscheck::compare_symbolic(m)?;
        checks.push(check_line("matroid vs tt (symbolic)", &verdict));
    }
    let verdict = crosscheck::compare_numeric(m, &bindings)?;
    checks.push(check_line("methods vs oracle (numeric)", &verdict));

    // The oracle also re-derives rank and dof from scratch.
    let oracle_res = oracle::brute_force_transfer(m, &bindings)?;
    checks.push(CheckLine {
        name: "oracle rank and dof".to_string(),
        ok: oracle_res.rank == m.mesh_count() && oracle_res.dof == m.inputs().len(),
        detail: None,
    });

    let ok = checks.iter().all(|c| c.ok);
    Ok((
        VerifySection {
            bindings: binding_lines,
            checks,
        },
        ok,
    ))
}

fn check_line(name: &str, verdict: &Verdict) -> CheckLine {
    match verdict {
        Verdict::Matched => CheckLine {
            name: name.to_string(),
            ok: true,
            detail: None,
        },
        Verdict::Mismatched(mm) => CheckLine {
            name: name.to_string(),
            ok: false,
            detail: Some(format!(
                "({}, {}): {} = {}, {} = {}",
                mm.output, mm.input, mm.left_method, mm.left_value, mm.right_method, mm.right_value
            )),
        },
    }
}

fn verdict_report(
    m: &Mechanism,
    verdict: Verdict,
    tt_solution: Option<&tt::TtSolution>,
) -> VerdictReport {
    match verdict {
        Verdict::Matched => VerdictReport::Matched,
        Verdict::Mismatched(mm) => {
            let tt_label = |j: JointId| {
                if tt_solution.is_some() {
                    tt::velocity_label(m, j)
                } else {
                    format!("th{j}")
                }
            };
            VerdictReport::Mismatched {
                left_method: mm.left_method.to_string(),
                right_method: mm.right_method.to_string(),
                output: format!("th{} / {}", mm.output, tt_label(mm.output)),
                input: format!("th{} / {}", mm.input, tt_label(mm.input)),
                left_value: mm.left_value,
                right_value: mm.right_value,
            }
        }
    }
}

fn labeled(
    entries: &Matrix<Scalar>,
    rows: &[String],
    cols: &[String],
    table: &SymbolTable,
) -> LabeledMatrix {
    LabeledMatrix {
        rows: rows.to_vec(),
        cols: cols.to_vec(),
        entries: (0..entries.rows())
            .map(|r| {
                (0..entries.cols())
                    .map(|c| entries.at(r, c).render(table))
                    .collect()
            })
            .collect(),
    }
}

fn labeled_numeric(entries: &Matrix<Rational>, rows: &[String], cols: &[String]) -> LabeledMatrix {
    let empty = SymbolTable::new();
    LabeledMatrix {
        rows: rows.to_vec(),
        cols: cols.to_vec(),
        entries: (0..entries.rows())
            .map(|r| {
                (0..entries.cols())
                    .map(|c| Scalar::from_rational(entries.at(r, c).clone()).render(&empty))
                    .collect()
            })
            .collect(),
    }
}

fn parse_id_list(list: &str) -> Result<Vec<JointId>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map(JointId)
                .map_err(|_| anyhow!("invalid joint id `{s}` in --inputs"))
        })
        .collect()
}

/// Distinct primes for each symbol, in declaration order.
fn prime_bindings(table: &SymbolTable) -> Bindings {
    let mut bindings = Bindings::new(table);
    let mut candidate = 1u64;
    for (i, _) in table.names().enumerate() {
        candidate = next_prime(candidate);
        bindings.set(
            gearkin::algebra::SymbolId(i as u32),
            Rational::from_integer(candidate.into()),
        );
    }
    bindings
}

fn next_prime(after: u64) -> u64 {
    let mut n = after + 1;
    loop {
        if n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d)) {
            return n;
        }
        n += 1;
    }
}
