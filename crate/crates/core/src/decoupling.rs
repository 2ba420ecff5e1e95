//! Isolating a principal pair inside an N-qudit system and routing distant
//! couplings through SWAP chains.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::compiler::{compile_two_qudit, swap_generator, CompilationTrace};
use crate::error::{Error, Result};
use crate::pauli::{ditwise_group, support_of, PauliLabel, SymbolicHamiltonian};
use crate::sim::expr::conj_by_word;
use crate::sim::{embed_expr, lower, PulseSchedule, SimExpr, TrotterConfig};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InteractionGraph {
    pub n: usize,
    /// Unordered pairs stored as `(min, max)`.
    pub edges: BTreeSet<(usize, usize)>,
}

impl InteractionGraph {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let edges = edges
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .filter(|(a, b)| a != b)
            .collect();
        Self { n, edges }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for w in self.neighbours(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// BFS path from `s` to `t`, visiting neighbours in increasing order.
    pub fn shortest_path(&self, s: usize, t: usize) -> Result<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.n];
        let mut queue = VecDeque::from([s]);
        prev[s] = s;
        while let Some(v) = queue.pop_front() {
            if v == t {
                break;
            }
            for w in self.neighbours(v) {
                if prev[w] == usize::MAX {
                    prev[w] = v;
                    queue.push_back(w);
                }
            }
        }
        if prev[t] == usize::MAX {
            return Err(Error::Disconnected(format!("no path from qudit {s} to qudit {t}")));
        }
        let mut path = vec![t];
        while *path.last().unwrap() != s {
            path.push(prev[*path.last().unwrap()]);
        }
        path.reverse();
        Ok(path)
    }
}

pub fn interaction_graph(h: &SymbolicHamiltonian) -> Result<InteractionGraph> {
    let mut edges = BTreeSet::new();
    for (labels, _) in h.terms() {
        let s = support_of(labels);
        match s.len() {
            0 | 1 => {}
            2 => {
                edges.insert((s[0], s[1]));
            }
            _ => return Err(Error::ManyBody { support: s.len() }),
        }
    }
    Ok(InteractionGraph { n: h.qudits(), edges })
}

/// Edges of an open (or periodic) nearest-neighbour lattice, row-major with
/// the last coordinate fastest.
pub fn lattice_graph(dims: &[usize], periodic: bool) -> InteractionGraph {
    let n: usize = dims.iter().product();
    let mut edges = Vec::new();
    for v in 0..n {
        let coords = lattice_coords(v, dims);
        for (axis, &extent) in dims.iter().enumerate() {
            let mut c = coords.clone();
            if coords[axis] + 1 < extent {
                c[axis] += 1;
            } else if periodic && extent > 2 {
                c[axis] = 0;
            } else {
                continue;
            }
            edges.push((v, lattice_index(&c, dims)));
        }
    }
    InteractionGraph::from_edges(n, edges)
}

fn lattice_coords(mut v: usize, dims: &[usize]) -> Vec<usize> {
    let mut c = vec![0; dims.len()];
    for axis in (0..dims.len()).rev() {
        c[axis] = v % dims[axis];
        v /= dims[axis];
    }
    c
}

fn lattice_index(c: &[usize], dims: &[usize]) -> usize {
    c.iter().zip(dims).fold(0, |acc, (x, e)| acc * e + x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanKind {
    Generic,
    Partition,
    Chain,
}

/// Sequence of ditwise Pauli twirls. Round `r` averages over the `D²`
/// conjugations applying the same label to every qudit of `rounds[r]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecouplingPlan {
    pub n: usize,
    pub principal: (usize, usize),
    pub rounds: Vec<Vec<usize>>,
    pub kind: PlanKind,
}

impl DecouplingPlan {
    pub fn depth(&self) -> usize {
        self.rounds.len()
    }

    /// Number of conjugated copies of the resource after full expansion.
    pub fn flattened_count(&self, d: u32) -> u128 {
        (d as u128 * d as u128).pow(self.rounds.len() as u32)
    }

    /// Nested twirl expression whose effective Hamiltonian is the decoupled one.
    pub fn expr(&self, d: u32) -> Result<SimExpr> {
        let mut e = SimExpr::primitive();
        let w = 1.0 / (d * d) as f64;
        for subset in &self.rounds {
            let terms = ditwise_group(self.n, subset, d)
                .iter()
                .map(|g| (w, conj_by_word(g, e.clone())))
                .collect();
            e = SimExpr::weighted_sum(terms)?;
        }
        Ok(e)
    }

    /// Nested `twirl-begin`/`twirl-end` markers, outermost round first.
    pub fn annotation(&self) -> Vec<String> {
        let fmt_set = |s: &[usize]| s.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",");
        let mut out: Vec<String> = self
            .rounds
            .iter()
            .rev()
            .map(|s| format!("twirl-begin {}", fmt_set(s)))
            .collect();
        out.extend(self.rounds.iter().map(|_| "twirl-end".to_string()));
        out
    }

    fn principal_sites(&self) -> [usize; 2] {
        [self.principal.0, self.principal.1]
    }
}

impl fmt::Display for DecouplingPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "plan {:?} principal ({},{}) rounds {}",
            self.kind,
            self.principal.0,
            self.principal.1,
            self.depth()
        )?;
        for (i, r) in self.rounds.iter().enumerate() {
            writeln!(f, "round {i} {r:?}")?;
        }
        Ok(())
    }
}

fn check_principal(n: usize, p: (usize, usize)) -> Result<()> {
    if p.0 == p.1 || p.0 >= n || p.1 >= n {
        return Err(Error::InvalidArgument(format!(
            "invalid principal pair ({},{}) for N={n}",
            p.0, p.1
        )));
    }
    Ok(())
}

fn remainder(n: usize, p: (usize, usize)) -> Vec<usize> {
    (0..n).filter(|&q| q != p.0 && q != p.1).collect()
}

/// Twirl the whole remainder, then repeatedly halve its blocks and twirl the
/// first half of every block at once.
pub fn generic_recursive_plan(n: usize, p: (usize, usize)) -> Result<DecouplingPlan> {
    check_principal(n, p)?;
    if n < 3 {
        return Err(Error::InvalidArgument("decoupling needs at least three qudits".into()));
    }
    let s = remainder(n, p);
    let mut rounds = vec![s.clone()];
    let mut blocks = vec![s];
    while blocks.iter().any(|b| b.len() > 1) {
        let mut subset = Vec::new();
        let mut next = Vec::new();
        for b in blocks {
            if b.len() == 1 {
                next.push(b);
                continue;
            }
            let (lo, hi) = b.split_at(b.len().div_ceil(2));
            subset.extend_from_slice(lo);
            next.push(lo.to_vec());
            next.push(hi.to_vec());
        }
        rounds.push(subset);
        blocks = next;
    }
    Ok(DecouplingPlan {
        n,
        principal: p,
        rounds,
        kind: PlanKind::Generic,
    })
}

/// Blocks of the non-principal qudits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Checks that blocks are disjoint, cover `S` and contain no internal edge.
    pub fn validate(&self, graph: &InteractionGraph, p: (usize, usize)) -> Result<()> {
        let mut seen = vec![false; graph.n];
        for (i, b) in self.blocks.iter().enumerate() {
            for &q in b {
                if q >= graph.n || q == p.0 || q == p.1 || seen[q] {
                    return Err(Error::InvalidArgument(format!(
                        "qudit {q} misplaced in partition block {i}"
                    )));
                }
                seen[q] = true;
            }
            for (x, &a) in b.iter().enumerate() {
                for &c in &b[x + 1..] {
                    if graph.has_edge(a, c) {
                        return Err(Error::InvalidPartition {
                            block: i,
                            a: a.min(c),
                            b: a.max(c),
                        });
                    }
                }
            }
        }
        if let Some(q) = remainder(graph.n, p).into_iter().find(|&q| !seen[q]) {
            return Err(Error::InvalidArgument(format!(
                "qudit {q} not covered by the partition"
            )));
        }
        Ok(())
    }

    /// Drop the principal qudits and empty blocks.
    pub fn without(&self, p: (usize, usize)) -> Partition {
        Partition {
            blocks: self
                .blocks
                .iter()
                .map(|b| b.iter().copied().filter(|&q| q != p.0 && q != p.1).collect::<Vec<_>>())
                .filter(|b| !b.is_empty())
                .collect(),
        }
    }

    /// Text form: `qudit-partition v1` followed by one `block <q>...` line each.
    pub fn to_text(&self) -> String {
        let mut s = String::from("qudit-partition v1\n");
        for b in &self.blocks {
            let qs: Vec<String> = b.iter().map(|q| q.to_string()).collect();
            s.push_str(&format!("block {}\n", qs.join(" ")));
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let perr = |line, message: &str| Error::Parse {
            line,
            message: message.into(),
        };
        match lines.next() {
            Some((_, "qudit-partition v1")) => {}
            Some((ln, _)) => return Err(perr(ln, "expected `qudit-partition v1`")),
            None => return Err(perr(1, "empty partition file")),
        }
        let mut blocks = Vec::new();
        for (ln, line) in lines {
            let mut toks = line.split_whitespace();
            if toks.next() != Some("block") {
                return Err(perr(ln, "expected `block <qudit>...`"));
            }
            let b = toks
                .map(|t| t.parse::<usize>().map_err(|_| perr(ln, "bad qudit index")))
                .collect::<Result<Vec<_>>>()?;
            if b.is_empty() {
                return Err(perr(ln, "empty block"));
            }
            blocks.push(b);
        }
        Ok(Partition { blocks })
    }
}

/// One twirl round per block.
pub fn partition_plan(graph: &InteractionGraph, partition: &Partition, p: (usize, usize)) -> Result<DecouplingPlan> {
    check_principal(graph.n, p)?;
    partition.validate(graph, p)?;
    Ok(DecouplingPlan {
        n: graph.n,
        principal: p,
        rounds: partition.blocks.clone(),
        kind: PlanKind::Partition,
    })
}

/// Constant-depth plan for a nearest-neighbour chain with adjacent principal
/// pair: cut the principal pair's outer edges, twirl the remainder, then
/// twirl every other remainder site.
pub fn chain_plan(n: usize, p: (usize, usize)) -> Result<DecouplingPlan> {
    check_principal(n, p)?;
    let (a, b) = (p.0.min(p.1), p.0.max(p.1));
    if b != a + 1 {
        return Err(Error::InvalidArgument(format!(
            "chain plan needs adjacent principal qudits, got ({a},{b})"
        )));
    }
    if n < 3 {
        return Err(Error::InvalidArgument("decoupling needs at least three qudits".into()));
    }
    let s = remainder(n, p);
    let cut: Vec<usize> = [a.checked_sub(1), Some(b + 1)]
        .into_iter()
        .flatten()
        .filter(|&q| q < n)
        .collect();
    let alternate: Vec<usize> = s.iter().copied().filter(|q| q % 2 == (b + 1) % 2).collect();
    Ok(DecouplingPlan {
        n,
        principal: p,
        rounds: vec![cut, s, alternate],
        kind: PlanKind::Chain,
    })
}

/// Parity classes of a lattice; `periodic` requires even extents.
pub fn lattice_partition(dims: &[usize], periodic: bool) -> Result<Partition> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidArgument("lattice extents must be positive".into()));
    }
    if periodic {
        if let Some(e) = dims.iter().find(|&&e| e % 2 == 1) {
            return Err(Error::InvalidArgument(format!("periodic lattice with odd extent {e}")));
        }
    }
    let n: usize = dims.iter().product();
    let r = dims.len();
    let mut blocks = vec![Vec::new(); 1 << r];
    for v in 0..n {
        let class = lattice_coords(v, dims)
            .iter()
            .enumerate()
            .fold(0, |acc, (i, c)| acc | ((c % 2) << i));
        blocks[class].push(v);
    }
    blocks.retain(|b| !b.is_empty());
    Ok(Partition { blocks })
}

/// Outcome of applying a plan symbolically.
#[derive(Clone, Debug)]
pub struct Decoupled {
    pub hamiltonian: SymbolicHamiltonian,
    /// The two-qudit Hamiltonian left on the principal pair, in pair order.
    pub principal: SymbolicHamiltonian,
    /// Common factor multiplying the original principal-pair terms.
    pub scale: f64,
    /// Largest surviving coefficient on a word not supported on the pair.
    pub off_principal: f64,
}

pub fn apply_plan(h: &SymbolicHamiltonian, plan: &DecouplingPlan) -> Result<Decoupled> {
    if h.qudits() != plan.n {
        return Err(Error::DimensionMismatch {
            expected: plan.n,
            found: h.qudits(),
        });
    }
    let d = h.dim();
    let mut out = h.clone();
    for subset in &plan.rounds {
        out = out.twirl(&ditwise_group(plan.n, subset, d));
    }
    let sites = plan.principal_sites();
    let on_p = |l: &[PauliLabel]| l.iter().enumerate().all(|(q, x)| x.is_identity() || sites.contains(&q));
    let off_principal = out.filter(|l| !on_p(l)).max_abs();
    Ok(Decoupled {
        principal: out.restrict(&sites),
        hamiltonian: out,
        scale: 1.0,
        off_principal,
    })
}

/// SWAP chain that brings `s` next to `t`: conjugating an interaction on
/// `(path[k−1], t)` by these swaps realizes it on `(s, t)`.
pub fn route_swap(graph: &InteractionGraph, s: usize, t: usize) -> Result<Vec<(usize, usize)>> {
    if !graph.is_connected() {
        return Err(Error::Disconnected("interaction graph is not connected".into()));
    }
    let path = graph.shortest_path(s, t)?;
    Ok(path
        .windows(2)
        .take(path.len().saturating_sub(2))
        .map(|w| (w[0], w[1]))
        .collect())
}

/// Planner for a given principal pair.
pub type Planner<'a> = dyn Fn((usize, usize)) -> Result<DecouplingPlan> + 'a;

/// Expression on the full system realizing `k` (two-qudit, in pair order) on
/// the plan's principal pair.
#[derive(Clone, Debug)]
pub struct PairCompilation {
    pub expr: SimExpr,
    pub plan: DecouplingPlan,
    pub decoupled: Decoupled,
    pub trace: CompilationTrace,
}

pub fn compile_on_pair(
    h: &SymbolicHamiltonian,
    plan: &DecouplingPlan,
    k: &SymbolicHamiltonian,
) -> Result<PairCompilation> {
    let decoupled = apply_plan(h, plan)?;
    let c = compile_two_qudit(&decoupled.principal, k)?;
    let expr = embed_expr(&c.expr, plan.n, &plan.principal_sites(), &plan.expr(h.dim())?);
    Ok(PairCompilation {
        expr,
        plan: plan.clone(),
        decoupled,
        trace: c.trace,
    })
}

/// Schedule realizing `exp(−i t K)` on `(s, t)`, routed through SWAPs when the
/// pair is not coupled directly.
#[derive(Clone, Debug)]
pub struct Routed {
    pub schedule: PulseSchedule,
    pub swaps: Vec<(usize, usize)>,
    /// Pair on which the interaction itself is compiled.
    pub interaction_pair: (usize, usize),
    pub traces: Vec<CompilationTrace>,
}

pub fn compile_routed(
    h: &SymbolicHamiltonian,
    planner: &Planner<'_>,
    (s, t): (usize, usize),
    k: &SymbolicHamiltonian,
    time: f64,
    slices: usize,
) -> Result<Routed> {
    let graph = interaction_graph(h)?;
    let swaps = route_swap(&graph, s, t)?;
    let d = h.dim();
    let n = h.qudits();
    let pair = swaps.last().map_or((s, t), |&(_, b)| (b, t));

    let mut traces = Vec::new();
    let mut swap_schedules = Vec::new();
    if !swaps.is_empty() {
        let gen = swap_generator(d)?;
        for &(a, b) in &swaps {
            let pc = compile_on_pair(h, &planner((a, b))?, &gen)?;
            let mut sched = lower(&pc.expr, d, n, TrotterConfig::new(1.0, slices)?)?;
            sched.dropped_identity = pc.trace.dropped_identity;
            traces.push(pc.trace);
            swap_schedules.push(sched);
        }
    }
    let pc = compile_on_pair(h, &planner(pair)?, k)?;
    let mut core = lower(&pc.expr, d, n, TrotterConfig::new(time, slices)?)?;
    core.dropped_identity = pc.trace.dropped_identity * time;
    core.notes = pc.plan.annotation();
    traces.push(pc.trace);

    let mut out = PulseSchedule::empty(d, n);
    out.t = time;
    out.slices = slices;
    for (i, sw) in swap_schedules.iter().enumerate() {
        out.append(sw, &format!("swap{i}_"))?;
    }
    out.append(&core, "core_")?;
    for (i, sw) in swap_schedules.iter().enumerate().rev() {
        out.append(sw, &format!("unswap{i}_"))?;
    }
    out.notes = core.notes.clone();
    if !swaps.is_empty() {
        let chain: Vec<String> = swaps.iter().map(|(a, b)| format!("({a},{b})")).collect();
        out.notes.insert(0, format!("swap chain {}", chain.join(" ")));
    }
    Ok(Routed {
        schedule: out,
        swaps,
        interaction_pair: pair,
        traces,
    })
}
