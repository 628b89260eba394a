//! `tfp`: command-line front end for the tfp-core library.
//!
//! Exit codes: 0 success, 1 an input violates a hypothesis, 2 a statement
//! was falsified, 3 input/output or usage errors.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use tfp_core::clebsch::{dist3_coloring, ClebschError};
use tfp_core::cogs::{self, detect_obstructions, is_polished, precolorings_of_p, verify_alpha_lemmas, CogError};
use tfp_core::coloring::{count_colorings, enumerate_colorings, Coloring};
use tfp_core::decomposition::{build_decomposition, Richness};
use tfp_core::io::{emit_json_document, emit_planar_code, generate, parse_instances, Family, GenParams, Instance};
use tfp_core::par::map_ordered;
use tfp_core::requests::{best_fraction, RequestError, SatisfactionResult};
use tfp_core::verify::{run_check, CheckId, VerifyOptions};
use tfp_core::Jobs;

#[derive(Parser)]
#[command(name = "tfp", version, about = "3-colorings of triangle-free plane graphs")]
struct Cli {
    /// Instance file, planar_code or JSON (detected from the header). Reads
    /// standard input when absent.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,
    /// Worker threads; 1 runs sequentially.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Json,
    PlanarCode,
}

#[derive(Subcommand)]
enum Command {
    /// Number of proper 3-colorings.
    Count,
    /// Proper 3-colorings in lexicographic order.
    Enumerate {
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Maximal 5-cycle decomposition with rich and poor nodes.
    Decompose,
    /// Best satisfied fraction of a request graph; with --vertex, the
    /// colouring built from the cog at that common neighbor.
    RequestsSolve {
        #[arg(long)]
        vertex: Option<usize>,
    },
    /// Best demand fraction of a cog for each precoloring of P.
    CogSolve {
        /// Colors of P in path order, e.g. 1,2.
        #[arg(long, value_delimiter = ',')]
        psi: Option<Vec<u8>>,
    },
    /// 16-coloring from a Clebsch-graph homomorphism.
    ClebschDist3,
    /// Runs a sweep; exits 2 if any violation is found.
    Verify {
        check: String,
        #[arg(long)]
        max_n: Option<usize>,
        /// Defaults to $TFP_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Writes instances of a family.
    Generate {
        family: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        cols: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        lengths: Option<Vec<usize>>,
        /// Defaults to $TFP_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        max_n: Option<usize>,
        #[arg(long, value_enum, default_value_t = GraphFormat::Json)]
        format: GraphFormat,
        /// File to write instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

fn hypothesis(message: impl ToString) -> Failure {
    Failure { code: 1, message: message.to_string() }
}

fn statement(message: impl ToString) -> Failure {
    Failure { code: 2, message: message.to_string() }
}

fn io_error(message: impl ToString) -> Failure {
    Failure { code: 3, message: message.to_string() }
}

type Row = Vec<(&'static str, Value)>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(text.as_bytes()).is_err() {
                return ExitCode::from(3);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn seed_or_env(seed: Option<u64>) -> Result<u64, Failure> {
    match seed {
        Some(s) => Ok(s),
        None => match std::env::var("TFP_SEED") {
            Ok(v) => v.parse().map_err(|_| io_error(format!("TFP_SEED={v} is not an integer"))),
            Err(_) => Ok(0),
        },
    }
}

fn read_input(path: &Option<PathBuf>) -> Result<Vec<Instance>, Failure> {
    let bytes = match path {
        Some(p) => std::fs::read(p).map_err(|e| io_error(format!("{}: {e}", p.display())))?,
        None => {
            let mut buf = Vec::new();
            std::io::stdin().read_to_end(&mut buf).map_err(io_error)?;
            buf
        }
    };
    parse_instances(&bytes).map_err(io_error)
}

fn run(cli: Cli) -> Result<String, Failure> {
    let jobs = Jobs::from_count(cli.jobs);
    match cli.command {
        Command::Verify { check, max_n, seed } => {
            let id: CheckId = check.parse().map_err(io_error)?;
            let opts = VerifyOptions { max_n, seed: seed_or_env(seed)?, jobs, ..Default::default() };
            let s = run_check(id, &opts);
            let row: Row = vec![
                ("check", json!(id.name())),
                ("max_n", json!(s.max_n)),
                ("instances", json!(s.instances)),
                ("checks", json!(s.checks)),
                ("violation_count", json!(s.violations.len())),
                ("violations", json!(s.violations)),
                ("elapsed_ms", json!(s.elapsed.as_millis() as u64)),
            ];
            let text = render(cli.output, &[row]);
            if !s.violations.is_empty() {
                print!("{text}");
                return Err(statement(format!("{} violation(s) in {}", s.violations.len(), id.name())));
            }
            if s.instances == 0 {
                return Err(io_error(format!("{} examined no instances", id.name())));
            }
            Ok(text)
        }
        Command::Generate { family, n, rows, cols, lengths, seed, max_n, format, out } => {
            let fam: Family = family.parse().map_err(io_error)?;
            let params = GenParams { n, rows, cols, lengths, seed: Some(seed_or_env(seed)?), max_n };
            let instances = generate(fam, &params).map_err(io_error)?;
            let bytes = match format {
                GraphFormat::Json => emit_json_document(&instances).into_bytes(),
                GraphFormat::PlanarCode => {
                    let graphs: Vec<_> = instances.into_iter().map(|i| i.graph).collect();
                    emit_planar_code(&graphs).map_err(io_error)?
                }
            };
            match out {
                Some(p) => {
                    std::fs::write(&p, bytes).map_err(|e| io_error(format!("{}: {e}", p.display())))?;
                    Ok(String::new())
                }
                None => {
                    std::io::stdout().lock().write_all(&bytes).map_err(io_error)?;
                    Ok(String::new())
                }
            }
        }
        command => {
            let instances = read_input(&cli.input)?;
            let results: Vec<Result<Row, Failure>> = map_ordered(&instances, jobs, |inst| solve(&command, inst));
            let mut rows = Vec::with_capacity(results.len());
            for r in results {
                rows.push(r?);
            }
            Ok(render(cli.output, &rows))
        }
    }
}

fn solve(command: &Command, inst: &Instance) -> Result<Row, Failure> {
    let g = &inst.graph;
    let n = g.vertex_count();
    match command {
        Command::Count => {
            let c = count_colorings(g, &Coloring::empty(n)).map_err(hypothesis)?;
            Ok(vec![("colorings", json!(c.to_string().parse::<u64>().map(Value::from).unwrap_or_else(|_| json!(c.to_string()))))])
        }
        Command::Enumerate { limit } => {
            let all: Vec<Vec<u8>> = enumerate_colorings(g, &Coloring::empty(n), *limit)
                .map_err(hypothesis)?
                .map(|c| c.colors().to_vec())
                .collect();
            Ok(vec![("count", json!(all.len())), ("colorings", json!(all))])
        }
        Command::Decompose => {
            if let Some(t) = g.find_triangle() {
                return Err(hypothesis(format!("triangle {t:?}")));
            }
            let d = build_decomposition(g);
            let pieces = d.classify_all(Jobs::Sequential).map_err(statement)?;
            let nodes: Vec<Value> = d
                .nodes
                .iter()
                .zip(&pieces)
                .map(|(node, piece)| {
                    json!({
                        "id": node.id,
                        "parent": node.parent,
                        "depth": node.depth,
                        "cycle": node.cycle.as_ref().map(|c| c.vertices.clone()),
                        "rich": piece.richness == Richness::Rich,
                    })
                })
                .collect();
            let violations = d.violations();
            if !violations.is_empty() {
                return Err(statement(violations.join("; ")));
            }
            Ok(vec![
                ("node_count", json!(d.node_count())),
                ("caught", json!(d.caught_vertices())),
                ("construction", json!(d.construction)),
                ("nodes", Value::Array(nodes)),
            ])
        }
        Command::RequestsSolve { vertex } => {
            let rg = inst.request_graph().map_err(hypothesis)?;
            let r = match vertex {
                Some(v) => cogs::requests_at_vertex_pipeline(&rg, *v).map_err(cog_failure)?,
                None => best_fraction(&rg).map_err(request_failure)?,
            };
            Ok(satisfaction_row(&r))
        }
        Command::CogSolve { psi } => {
            let c = inst.cog().map_err(hypothesis)?.ok_or_else(|| hypothesis("instance has no cog roles"))?;
            let psis = match psi {
                Some(p) => vec![p.clone()],
                None => precolorings_of_p(&c),
            };
            let mut results = Vec::new();
            let mut worst: Option<(tfp_core::Weight, Vec<u8>)> = None;
            let mut applies = [false, false];
            for p in psis {
                let report = verify_alpha_lemmas(&c, &p).map_err(cog_failure)?;
                for (i, check) in report.checks.iter().enumerate() {
                    applies[i] = check.applies();
                }
                let f = report.result.fraction;
                if worst.as_ref().is_none_or(|(w, _)| f < *w) {
                    worst = Some((f, p.clone()));
                }
                results.push(json!({
                    "psi": p,
                    "fraction": f.to_string(),
                    "coloring": report.result.coloring.colors(),
                }));
            }
            let obstructions: Vec<String> = detect_obstructions(&c).iter().map(|m| format!("{:?}", m.kind)).collect();
            Ok(vec![
                ("min_fraction", json!(worst.as_ref().map(|w| w.0.to_string()))),
                ("worst_psi", json!(worst.map(|w| w.1))),
                ("polished", json!(is_polished(&c))),
                ("obstructions", json!(obstructions)),
                ("alpha1_applies", json!(applies[0])),
                ("alpha0_applies", json!(applies[1])),
                ("results", Value::Array(results)),
            ])
        }
        Command::ClebschDist3 => {
            let d = dist3_coloring(g).map_err(|e| match e {
                ClebschError::HypothesisViolation(_) => hypothesis(e),
                ClebschError::StatementViolation => statement(e),
            })?;
            if !d.proper || !d.dist3_ok {
                return Err(statement("16-coloring fails the distance-3 check"));
            }
            Ok(vec![("colors", json!(d.colors)), ("proper", json!(d.proper)), ("dist3_ok", json!(d.dist3_ok))])
        }
        Command::Verify { .. } | Command::Generate { .. } => unreachable!("handled without input"),
    }
}

fn satisfaction_row(r: &SatisfactionResult) -> Row {
    vec![
        ("fraction", json!(r.fraction.to_string())),
        ("satisfied_weight", json!(r.satisfied_weight.to_string())),
        ("total_weight", json!(r.total_weight.to_string())),
        ("coloring", json!(r.coloring.colors())),
    ]
}

fn request_failure(e: RequestError) -> Failure {
    hypothesis(e)
}

fn cog_failure(e: CogError) -> Failure {
    match e {
        CogError::StatementViolation { .. } => statement(e),
        e => hypothesis(e),
    }
}

fn render(output: Output, rows: &[Row]) -> String {
    match output {
        Output::Json => {
            let objs: Vec<Value> = rows.iter().map(|r| Value::Object(r.iter().map(|(k, v)| (k.to_string(), v.clone())).collect::<Map<_, _>>())).collect();
            let v = if objs.len() == 1 { objs.into_iter().next().expect("one row") } else { Value::Array(objs) };
            format!("{}\n", serde_json::to_string_pretty(&v).expect("serializable"))
        }
        Output::Csv => {
            let mut out = String::new();
            if let Some(first) = rows.first() {
                let header: Vec<&str> = std::iter::once("instance").chain(first.iter().map(|(k, _)| *k)).collect();
                out.push_str(&header.join(","));
                out.push('\n');
            }
            for (i, row) in rows.iter().enumerate() {
                let cells: Vec<String> = std::iter::once(i.to_string()).chain(row.iter().map(|(_, v)| csv_cell(v))).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            out
        }
    }
}

fn csv_cell(v: &Value) -> String {
    let raw = match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    };
    if raw.contains([',', '"', '\n']) {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}
