use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use submod_cli::bench::render_table;
use submod_cli::instance::{parse_instances, to_line};
use submod_cli::run::default_algorithm;
use submod_cli::{
    bench, build, exit, generate_corpus, load_corpus, run, verify_record, CliError, CliResult, GenParams, ReportRecord,
    RunOptions, FAMILIES,
};

#[derive(Parser)]
#[command(name = "submod", version, about = "Constrained submodular optimization with brute-force certification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Instance file (one JSON instance per line).
    #[arg(long)]
    instance: PathBuf,
    /// Algorithm id; default picks one from the task and constraint.
    #[arg(long)]
    algorithm: Option<String>,
    /// Seed for randomized steps; default uses the instance seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides τ of a robust task.
    #[arg(long)]
    tau: Option<usize>,
    /// Largest search space enumerated for the exhaustive optimum.
    #[arg(long, default_value_t = 1 << 20)]
    brute_cap: u64,
    /// Enumerate the optimum even above --brute-cap (still subject to hard limits).
    #[arg(long)]
    force_brute: bool,
    /// Write reports here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall time in reports (makes them non-reproducible).
    #[arg(long)]
    timing: bool,
}

impl RunArgs {
    fn options(&self) -> RunOptions {
        RunOptions {
            seed: self.seed,
            tau: self.tau,
            brute_cap: self.brute_cap,
            force_brute: self.force_brute,
            timing: self.timing,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve every instance in a file and print verified reports.
    Solve(RunArgs),
    /// Solve only the covering LP relaxation.
    Lp(RunArgs),
    /// Re-check stored reports against their instances.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        /// Reports written by `solve` or `bench --out`.
        #[arg(long)]
        report: PathBuf,
    },
    /// Generate a deterministic corpus.
    Gen {
        /// One of the corpus families, or `all` (then --out is a directory).
        #[arg(long)]
        family: String,
        /// Ground set size.
        #[arg(long, default_value_t = 6)]
        n: usize,
        /// Number of agents.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Instances per family.
        #[arg(long, default_value_t = 5)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run algorithms over a corpus file or directory; prints a JSON summary.
    Bench {
        #[arg(long)]
        instance: PathBuf,
        /// Comma-separated algorithm ids; default is every compatible one.
        #[arg(long, value_delimiter = ',')]
        algorithm: Option<Vec<String>>,
        #[arg(long, default_value_t = 1 << 20)]
        brute_cap: u64,
        #[arg(long)]
        force_brute: bool,
        /// Write all reports here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        timing: bool,
        /// Also print a human-readable table to stderr.
        #[arg(long)]
        table: bool,
    },
}

fn write_lines(out: Option<&Path>, lines: &[String]) -> CliResult<()> {
    let mut text = lines.join("\n");
    if !text.is_empty() {
        text.push('\n');
    }
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn solve(args: &RunArgs, force_lp: bool) -> CliResult<i32> {
    let text = std::fs::read_to_string(&args.instance)?;
    let opts = args.options();
    let mut lines = Vec::new();
    let mut code = exit::OK;
    for (line, inst) in parse_instances(&text)? {
        let p = build(inst, line)?;
        let algorithm = if force_lp {
            "lp".to_string()
        } else {
            match &args.algorithm {
                Some(a) => a.clone(),
                None => default_algorithm(&p)
                    .ok_or_else(|| CliError::Usage(format!("line {line}: no algorithm fits this instance")))?,
            }
        };
        let record = run(&p, &algorithm, &opts)?;
        if !record.ok {
            eprintln!("bound violation: {}", serde_json::to_string(&record).expect("reports serialize"));
            code = exit::BOUND_VIOLATION;
        }
        lines.push(serde_json::to_string(&record).expect("reports serialize"));
    }
    write_lines(args.out.as_deref(), &lines)?;
    Ok(code)
}

fn verify(instance: &Path, report: &Path) -> CliResult<i32> {
    let problems: Vec<_> = parse_instances(&std::fs::read_to_string(instance)?)?
        .into_iter()
        .map(|(line, inst)| build(inst, line))
        .collect::<CliResult<_>>()?;
    let mut code = exit::OK;
    for (i, text) in std::fs::read_to_string(report)?.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let record: ReportRecord = serde_json::from_str(text)
            .map_err(|e| CliError::Parse { line: i + 1, field: ".".into(), message: e.to_string() })?;
        let Some(p) = problems.iter().find(|p| p.digest == record.digest) else {
            return Err(CliError::Usage(format!("report line {}: no instance with digest {}", i + 1, record.digest)));
        };
        let verdicts = verify_record(p, &record)?;
        let ok = verdicts.iter().all(|v| v.holds);
        if !ok {
            let infeasible = verdicts.iter().any(|v| v.check == "feasible" && !v.holds);
            code = code.max(if infeasible { exit::INFEASIBLE } else { exit::BOUND_VIOLATION });
        }
        let line = serde_json::json!({
            "instance": record.instance, "algorithm": record.algorithm, "ok": ok, "verdicts": verdicts,
        });
        println!("{line}");
    }
    Ok(code)
}

fn gen(family: &str, params: GenParams, out: Option<&Path>) -> CliResult<i32> {
    if family == "all" {
        let dir = out.ok_or_else(|| CliError::Usage("--family all needs --out <directory>".into()))?;
        std::fs::create_dir_all(dir)?;
        for fam in FAMILIES {
            let lines: Vec<String> = generate_corpus(fam, &params)?.iter().map(to_line).collect();
            write_lines(Some(&dir.join(format!("{fam}.jsonl"))), &lines)?;
        }
    } else {
        let lines: Vec<String> = generate_corpus(family, &params)?.iter().map(to_line).collect();
        write_lines(out, &lines)?;
    }
    Ok(exit::OK)
}

fn main_inner(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Solve(args) => solve(&args, false),
        Command::Lp(args) => solve(&args, true),
        Command::Verify { instance, report } => verify(&instance, &report),
        Command::Gen { family, n, k, count, seed, out } => gen(&family, GenParams { n, k, count, seed }, out.as_deref()),
        Command::Bench { instance, algorithm, brute_cap, force_brute, out, timing, table } => {
            let corpus = load_corpus(&instance)?;
            let opts = RunOptions { seed: None, tau: None, brute_cap, force_brute, timing };
            let outcome = bench(&corpus, algorithm.as_deref(), &opts)?;
            if let Some(path) = &out {
                let lines: Vec<String> =
                    outcome.records.iter().map(|r| serde_json::to_string(r).expect("reports serialize")).collect();
                write_lines(Some(path), &lines)?;
            }
            for r in outcome.records.iter().filter(|r| !r.ok) {
                eprintln!("bound violation: {}", serde_json::to_string(r).expect("reports serialize"));
            }
            for f in &outcome.failures {
                eprintln!("run failed: {}", serde_json::to_string(f).expect("failures serialize"));
            }
            if table {
                eprint!("{}", render_table(&outcome.summary));
            }
            println!("{}", serde_json::to_string(&outcome.summary).expect("summaries serialize"));
            Ok(outcome.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
