//! Command-line front end. Exit codes: 0 success, 2 resource not entangling,
//! 3 verification above tolerance, 4 I/O, parse or invalid input.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::clifford::peg_reduce;
use crate::compiler::compile_two_qudit;
use crate::decoupling::{
    chain_plan, compile_routed, generic_recursive_plan, interaction_graph, lattice_partition, partition_plan,
    Partition, Planner,
};
use crate::error::Error;
use crate::io::{parse_hamiltonian, parse_operator};
use crate::linalg::{check_dense_limit, DEFAULT_DENSE_LIMIT};
use crate::majorization::{traceless_decompose, uhlmann_decompose};
use crate::pauli::{support_of, SymbolicHamiltonian};
use crate::sim::{lower, PulseSchedule, TrotterConfig};
use crate::verify::verify_schedule;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_ENTANGLING: i32 = 2;
pub const EXIT_TOLERANCE: i32 = 3;
pub const EXIT_INPUT: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "qudit-sim",
    version,
    about = "Compile and verify qudit Hamiltonian simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compile a target Hamiltonian into a pulse schedule over a resource.
    Compile(CompileArgs),
    /// Execute a schedule and compare it with exp(-i t K).
    Verify(VerifyArgs),
    /// Reduce X^j Z^k to a power of Z by Clifford conjugation.
    Peg(PegArgs),
    /// Decompose A as a positive combination of unitary conjugates of B.
    Uhlmann(UhlmannArgs),
}

#[derive(Args, Debug)]
struct CompileArgs {
    #[arg(long)]
    resource: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    time: f64,
    #[arg(long, default_value_t = 256)]
    slices: usize,
    /// Pair `i,j` carrying the target interaction when N > 2.
    #[arg(long)]
    principal: Option<String>,
    /// `generic`, `chain`, `partition:<file>` or `lattice:<r>x<extents>`.
    #[arg(long, default_value = "generic")]
    strategy: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-2)]
    tol: f64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    schedule: PathBuf,
    #[arg(long)]
    resource: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    time: f64,
    #[arg(long, default_value_t = 1e-2)]
    tol: f64,
    /// Pair `i,j` on which a two-qudit target acts when N > 2.
    #[arg(long)]
    principal: Option<String>,
}

#[derive(Args, Debug)]
struct PegArgs {
    #[arg(long)]
    d: u32,
    #[arg(long)]
    j: u32,
    #[arg(long)]
    k: u32,
}

#[derive(Args, Debug)]
struct UhlmannArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
}

/// Failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotEntangling | Error::Disconnected(_) => EXIT_NOT_ENTANGLING,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn input_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| input_failure(format!("{}: {e}", path.display())))
}

fn read_hamiltonian(path: &Path) -> Result<SymbolicHamiltonian, Failure> {
    parse_hamiltonian(&read(path)?).map_err(|e| input_failure(format!("{}: {e}", path.display())))
}

fn parse_pair(s: &str) -> Result<(usize, usize), Failure> {
    let bad = || input_failure(format!("expected `i,j`, got `{s}`"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

/// Target as a two-qudit Hamiltonian in pair order, plus the pair.
fn target_on_pair(
    k: &SymbolicHamiltonian,
    n: usize,
    principal: Option<&str>,
) -> Result<(SymbolicHamiltonian, (usize, usize)), Failure> {
    let pair = principal.map(parse_pair).transpose()?;
    if k.qudits() == 2 {
        let pair = pair.ok_or_else(|| input_failure("--principal is required for a two-qudit target when N > 2"))?;
        return Ok((k.clone(), pair));
    }
    if k.qudits() != n {
        return Err(input_failure(format!(
            "target has N={}, resource has N={n}",
            k.qudits()
        )));
    }
    let mut support: Vec<usize> = k.terms().flat_map(|(l, _)| support_of(l)).collect();
    support.sort_unstable();
    support.dedup();
    let pair = match pair {
        Some(p) => p,
        None if support.len() == 2 => (support[0], support[1]),
        None => return Err(input_failure("target must act on exactly two qudits; pass --principal")),
    };
    if support.iter().any(|&q| q != pair.0 && q != pair.1) {
        return Err(input_failure("target acts outside the principal pair"));
    }
    Ok((k.restrict(&[pair.0, pair.1]), pair))
}

fn planner_for(strategy: &str, h: &SymbolicHamiltonian) -> Result<Box<Planner<'static>>, Failure> {
    let n = h.qudits();
    let graph = interaction_graph(h)?;
    if let Some(path) = strategy.strip_prefix("partition:") {
        let part = Partition::parse(&read(Path::new(path))?)?;
        return Ok(Box::new(move |p| partition_plan(&graph, &part.without(p), p)));
    }
    if let Some(spec) = strategy.strip_prefix("lattice:") {
        let nums = spec
            .split(['x', ','])
            .map(|t| t.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| input_failure(format!("bad lattice spec `{spec}`")))?;
        let (r, dims) = nums.split_first().ok_or_else(|| input_failure("empty lattice spec"))?;
        if dims.len() != *r || dims.iter().product::<usize>() != n {
            return Err(input_failure(format!(
                "lattice `{spec}` does not describe {n} qudits of rank {r}"
            )));
        }
        let part = lattice_partition(dims, false)?;
        return Ok(Box::new(move |p| partition_plan(&graph, &part.without(p), p)));
    }
    match strategy {
        "generic" => Ok(Box::new(move |p| generic_recursive_plan(n, p))),
        "chain" => Ok(Box::new(move |p| chain_plan(n, p))),
        other => Err(input_failure(format!("unknown strategy `{other}`"))),
    }
}

fn cmd_compile(a: &CompileArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let h = read_hamiltonian(&a.resource)?;
    let k = read_hamiltonian(&a.target)?;
    if h.dim() != k.dim() {
        return Err(input_failure("resource and target have different D"));
    }
    let n = h.qudits();
    let (schedule, report, k_full) = if n == 2 {
        if k.qudits() != 2 {
            return Err(input_failure("two-qudit resource needs a two-qudit target"));
        }
        let c = compile_two_qudit(&h, &k)?;
        let mut s = lower(&c.expr, h.dim(), 2, TrotterConfig::new(a.time, a.slices)?)?;
        s.dropped_identity = c.trace.dropped_identity * a.time;
        (s, c.trace.to_string(), k.clone())
    } else {
        let graph = interaction_graph(&h)?;
        if !graph.is_connected() {
            return Err(Failure {
                code: EXIT_NOT_ENTANGLING,
                message: format!("interaction graph is not connected: edges {:?}", graph.edges),
            });
        }
        let (k2, pair) = target_on_pair(&k, n, a.principal.as_deref())?;
        let planner = planner_for(&a.strategy, &h)?;
        let r = compile_routed(&h, &*planner, pair, &k2, a.time, a.slices)?;
        let mut report = format!("swap_chain {:?}\ninteraction_pair {:?}\n", r.swaps, r.interaction_pair);
        for (i, t) in r.traces.iter().enumerate() {
            report.push_str(&format!("[compilation {i}]\n{t}\n"));
        }
        (r.schedule, report, k2.embed(n, &[pair.0, pair.1]))
    };
    let text = schedule.to_text();
    match &a.out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| input_failure(format!("{}: {e}", path.display())))?;
        }
        None => write!(out, "{text}").map_err(|e| input_failure(e.to_string()))?,
    }
    let mut summary = report;
    let code = if check_dense_limit(h.dense_dim(), DEFAULT_DENSE_LIMIT).is_ok() {
        let rep = verify_schedule(&schedule, &h, &k_full, a.time, Some(a.tol))?;
        summary.push_str(&format!("\n{rep}"));
        if rep.passes() {
            EXIT_OK
        } else {
            EXIT_TOLERANCE
        }
    } else {
        summary.push_str("\nverification skipped: dense limit exceeded\n");
        EXIT_OK
    };
    if a.out.is_some() {
        write!(out, "{summary}").map_err(|e| input_failure(e.to_string()))?;
    } else {
        eprint!("{summary}");
    }
    Ok(code)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let s = PulseSchedule::parse(&read(&a.schedule)?)?;
    let h = read_hamiltonian(&a.resource)?;
    let k = read_hamiltonian(&a.target)?;
    let k = if k.qudits() == h.qudits() {
        k
    } else {
        let (k2, pair) = target_on_pair(&k, h.qudits(), a.principal.as_deref())?;
        k2.embed(h.qudits(), &[pair.0, pair.1])
    };
    let rep = verify_schedule(&s, &h, &k, a.time, Some(a.tol))?;
    write!(out, "{rep}").map_err(|e| input_failure(e.to_string()))?;
    Ok(if rep.passes() { EXIT_OK } else { EXIT_TOLERANCE })
}

fn cmd_peg(a: &PegArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    if a.d < 2 {
        return Err(input_failure("D must be at least 2"));
    }
    let (gate, g) = peg_reduce(a.d, a.j, a.k)?;
    writeln!(out, "gate {gate}\nresult Z^{g}").map_err(|e| input_failure(e.to_string()))?;
    Ok(EXIT_OK)
}

fn cmd_uhlmann(a: &UhlmannArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let am = parse_operator(&read(&a.a)?)?;
    let bm = parse_operator(&read(&a.b)?)?;
    let traceless = am.trace().norm() < 1e-12 && bm.trace().norm() < 1e-12;
    let dec = if traceless {
        traceless_decompose(&am, &bm)?
    } else {
        uhlmann_decompose(&am, &bm)?
    };
    let residual = dec.reconstruct(&bm).max_abs_diff(&am);
    let total: f64 = dec.weights.iter().sum();
    let mut text = format!(
        "terms {}\nscale {:.12}\nweight_sum {:.12}\n",
        dec.len(),
        dec.scale,
        total
    );
    for (i, w) in dec.weights.iter().enumerate() {
        text.push_str(&format!("weight {i} {w:.12}\n"));
    }
    text.push_str(&format!("residual {residual:.3e}\n"));
    write!(out, "{text}").map_err(|e| input_failure(e.to_string()))?;
    Ok(EXIT_OK)
}

/// Run the CLI on `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Compile(a) => cmd_compile(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Peg(a) => cmd_peg(a, out),
        Command::Uhlmann(a) => cmd_uhlmann(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
