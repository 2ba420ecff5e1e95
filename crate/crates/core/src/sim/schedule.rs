//! Pulse schedules and their text format.
//!
//! A schedule is a list of steps executed in order. Repeated sub-sequences
//! are stored once as named blocks and referenced by `call` or `repeat`, which
//! keeps deeply nested compilations small on disk and cheap to execute.
//!
//! ```text
//! qudit-schedule v1
//! D 3 N 2 t 1 slices 4
//! block b0
//! gate 0 F
//! evolve 0.25
//! gate 0 F'
//! end
//! repeat 4 b0
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::gates::{GateLayer, LocalGate};

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Gates(GateLayer),
    Evolve(f64),
    Call(usize),
    Repeat { count: usize, block: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub name: String,
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PulseSchedule {
    pub d: u32,
    pub n: usize,
    /// Total simulated time.
    pub t: f64,
    pub slices: usize,
    /// Blocks may only reference blocks with a smaller index.
    pub blocks: Vec<Block>,
    pub steps: Vec<Step>,
    /// Identity component dropped from the simulated Hamiltonian.
    pub dropped_identity: f64,
    /// Free-form comment lines, kept across a text round trip.
    pub notes: Vec<String>,
}

/// Flat view of a schedule: gate layers and evolutions only.
#[derive(Clone, Debug, PartialEq)]
pub enum FlatStep {
    Gates(GateLayer),
    Evolve(f64),
}

impl PulseSchedule {
    pub fn empty(d: u32, n: usize) -> Self {
        Self {
            d,
            n,
            t: 0.0,
            slices: 1,
            blocks: vec![],
            steps: vec![],
            dropped_identity: 0.0,
            notes: vec![],
        }
    }

    pub fn add_block(&mut self, name: impl Into<String>, steps: Vec<Step>) -> usize {
        self.blocks.push(Block {
            name: name.into(),
            steps,
        });
        self.blocks.len() - 1
    }

    /// Total evolution time under the resource Hamiltonian.
    pub fn total_evolve_time(&self) -> f64 {
        let mut block_time = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let t = steps_time(&b.steps, &block_time);
            block_time.push(t);
        }
        steps_time(&self.steps, &block_time)
    }

    /// Number of steps after full expansion.
    pub fn flat_len(&self) -> f64 {
        let mut lens = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let l = steps_len(&b.steps, &lens);
            lens.push(l);
        }
        steps_len(&self.steps, &lens)
    }

    /// Fully expanded step list with adjacent gate layers merged.
    pub fn flatten(&self) -> Vec<FlatStep> {
        let mut out = Vec::new();
        self.flatten_into(&self.steps, &mut out);
        out
    }

    fn flatten_into(&self, steps: &[Step], out: &mut Vec<FlatStep>) {
        for s in steps {
            match s {
                Step::Gates(l) => push_flat_gates(out, l),
                Step::Evolve(t) => out.push(FlatStep::Evolve(*t)),
                Step::Call(b) => self.flatten_into(&self.blocks[*b].steps, out),
                Step::Repeat { count, block } => {
                    for _ in 0..*count {
                        self.flatten_into(&self.blocks[*block].steps, out);
                    }
                }
            }
        }
    }

    /// Run `other` after `self`. Its blocks are imported with `prefix`
    /// prepended to their names.
    pub fn append(&mut self, other: &PulseSchedule, prefix: &str) -> Result<()> {
        if other.d != self.d || other.n != self.n {
            return Err(Error::MalformedSchedule(
                "appended schedule has a different shape".into(),
            ));
        }
        let offset = self.blocks.len();
        let remap = |steps: &[Step]| -> Vec<Step> {
            steps
                .iter()
                .map(|s| match s {
                    Step::Call(b) => Step::Call(b + offset),
                    Step::Repeat { count, block } => Step::Repeat {
                        count: *count,
                        block: block + offset,
                    },
                    other => other.clone(),
                })
                .collect()
        };
        for b in &other.blocks {
            let steps = remap(&b.steps);
            self.add_block(format!("{prefix}{}", b.name), steps);
        }
        for s in remap(&other.steps) {
            match s {
                Step::Gates(l) => push_gates(&mut self.steps, &l),
                s => self.steps.push(s),
            }
        }
        self.dropped_identity += other.dropped_identity;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let check = |steps: &[Step], limit: usize| -> Result<()> {
            for s in steps {
                match s {
                    Step::Evolve(t) if !(*t >= 0.0 && t.is_finite()) => {
                        return Err(Error::MalformedSchedule(format!("invalid duration {t}")));
                    }
                    Step::Gates(l) if l.qudits() != self.n || l.dim() != self.d => {
                        return Err(Error::MalformedSchedule("gate layer size mismatch".into()));
                    }
                    Step::Call(b) | Step::Repeat { block: b, .. } if *b >= limit => {
                        return Err(Error::MalformedSchedule(format!("reference to undefined block {b}")));
                    }
                    _ => {}
                }
            }
            Ok(())
        };
        for (i, b) in self.blocks.iter().enumerate() {
            check(&b.steps, i)?;
        }
        check(&self.steps, self.blocks.len())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "qudit-schedule v1").unwrap();
        writeln!(s, "D {} N {} t {} slices {}", self.d, self.n, self.t, self.slices).unwrap();
        if self.dropped_identity != 0.0 {
            writeln!(s, "# dropped identity component {}", self.dropped_identity).unwrap();
        }
        for note in &self.notes {
            writeln!(s, "# {note}").unwrap();
        }
        for b in &self.blocks {
            writeln!(s, "block {}", b.name).unwrap();
            self.write_steps(&mut s, &b.steps);
            writeln!(s, "end").unwrap();
        }
        self.write_steps(&mut s, &self.steps);
        s
    }

    fn write_steps(&self, s: &mut String, steps: &[Step]) {
        for step in steps {
            match step {
                Step::Gates(layer) => {
                    for (q, g) in layer.gates().iter().enumerate() {
                        if !g.is_identity() {
                            writeln!(s, "gate {q} {}", g.spec()).unwrap();
                        }
                    }
                }
                Step::Evolve(t) => writeln!(s, "evolve {t}").unwrap(),
                Step::Call(b) => writeln!(s, "call {}", self.blocks[*b].name).unwrap(),
                Step::Repeat { count, block } => writeln!(s, "repeat {count} {}", self.blocks[*block].name).unwrap(),
            }
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut dropped_identity = 0.0;
        let mut notes = Vec::new();
        for line in text.lines() {
            let Some(c) = line.trim().strip_prefix('#') else {
                continue;
            };
            let c = c.trim();
            match c.strip_prefix("dropped identity component ").map(str::parse::<f64>) {
                Some(Ok(v)) => dropped_identity = v,
                _ => notes.push(c.to_string()),
            }
        }
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let perr = |line: usize, message: &str| Error::Parse {
            line,
            message: message.to_string(),
        };

        let (ln, header) = lines.next().ok_or_else(|| perr(1, "empty schedule file"))?;
        if header != "qudit-schedule v1" {
            return Err(perr(ln, "expected `qudit-schedule v1`"));
        }
        let (ln, meta) = lines.next().ok_or_else(|| perr(ln + 1, "missing metadata line"))?;
        let toks: Vec<&str> = meta.split_whitespace().collect();
        if toks.len() != 8 || toks[0] != "D" || toks[2] != "N" || toks[4] != "t" || toks[6] != "slices" {
            return Err(perr(ln, "expected `D <int> N <int> t <float> slices <int>`"));
        }
        let d: u32 = toks[1].parse().map_err(|_| perr(ln, "bad D"))?;
        let n: usize = toks[3].parse().map_err(|_| perr(ln, "bad N"))?;
        let t: f64 = toks[5].parse().map_err(|_| perr(ln, "bad t"))?;
        let slices: usize = toks[7].parse().map_err(|_| perr(ln, "bad slices"))?;
        if d < 2 || n == 0 {
            return Err(perr(ln, "D must be at least 2 and N at least 1"));
        }

        let mut sched = PulseSchedule::empty(d, n);
        sched.t = t;
        sched.slices = slices;
        sched.dropped_identity = dropped_identity;
        sched.notes = notes;
        let mut names: HashMap<String, usize> = HashMap::new();
        let mut current: Option<(String, Vec<Step>)> = None;

        for (ln, line) in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            let target = match current.as_mut() {
                Some((_, steps)) => steps,
                None => &mut sched.steps,
            };
            match toks[0] {
                "gate" => {
                    if toks.len() < 3 {
                        return Err(perr(ln, "expected `gate <qudit> <spec>`"));
                    }
                    let q: usize = toks[1].parse().map_err(|_| perr(ln, "bad qudit index"))?;
                    if q >= n {
                        return Err(perr(ln, "qudit index out of range"));
                    }
                    let spec = toks[2..].join("");
                    let g = LocalGate::parse(&spec, d).map_err(|e| perr(ln, &e.to_string()))?;
                    let layer = GateLayer::single(d, n, q, g).map_err(|e| perr(ln, &e.to_string()))?;
                    push_gates(target, &layer);
                }
                "evolve" => {
                    if toks.len() != 2 {
                        return Err(perr(ln, "expected `evolve <duration>`"));
                    }
                    let dt: f64 = toks[1].parse().map_err(|_| perr(ln, "bad duration"))?;
                    if !(dt >= 0.0 && dt.is_finite()) {
                        return Err(perr(ln, "duration must be non-negative"));
                    }
                    target.push(Step::Evolve(dt));
                }
                "call" | "repeat" => {
                    let (count, name) = match (toks[0], toks.len()) {
                        ("call", 2) => (None, toks[1]),
                        ("repeat", 3) => (
                            Some(toks[1].parse::<usize>().map_err(|_| perr(ln, "bad repeat count"))?),
                            toks[2],
                        ),
                        _ => return Err(perr(ln, "expected `call <name>` or `repeat <count> <name>`")),
                    };
                    let block = *names.get(name).ok_or_else(|| perr(ln, "unknown block"))?;
                    target.push(match count {
                        None => Step::Call(block),
                        Some(count) => Step::Repeat { count, block },
                    });
                }
                "block" => {
                    if current.is_some() {
                        return Err(perr(ln, "nested block definition"));
                    }
                    if toks.len() != 2 || names.contains_key(toks[1]) {
                        return Err(perr(ln, "expected `block <new-name>`"));
                    }
                    current = Some((toks[1].to_string(), Vec::new()));
                }
                "end" => {
                    let (name, steps) = current.take().ok_or_else(|| perr(ln, "`end` outside a block"))?;
                    let id = sched.add_block(name.clone(), steps);
                    names.insert(name, id);
                }
                other => return Err(perr(ln, &format!("unknown directive `{other}`"))),
            }
        }
        if current.is_some() {
            return Err(perr(text.lines().count(), "unterminated block"));
        }
        Ok(sched)
    }
}

fn steps_time(steps: &[Step], block_time: &[f64]) -> f64 {
    steps
        .iter()
        .map(|s| match s {
            Step::Evolve(t) => *t,
            Step::Gates(_) => 0.0,
            Step::Call(b) => block_time[*b],
            Step::Repeat { count, block } => *count as f64 * block_time[*block],
        })
        .sum()
}

fn steps_len(steps: &[Step], lens: &[f64]) -> f64 {
    steps
        .iter()
        .map(|s| match s {
            Step::Evolve(_) | Step::Gates(_) => 1.0,
            Step::Call(b) => lens[*b],
            Step::Repeat { count, block } => *count as f64 * lens[*block],
        })
        .sum()
}

/// Append a gate layer, merging into a directly preceding one.
pub fn push_gates(steps: &mut Vec<Step>, layer: &GateLayer) {
    if layer.is_identity() {
        return;
    }
    if let Some(Step::Gates(prev)) = steps.last_mut() {
        *prev = prev.then(layer);
        if prev.is_identity() {
            steps.pop();
        }
        return;
    }
    steps.push(Step::Gates(layer.clone()));
}

fn push_flat_gates(out: &mut Vec<FlatStep>, layer: &GateLayer) {
    if layer.is_identity() {
        return;
    }
    if let Some(FlatStep::Gates(prev)) = out.last_mut() {
        *prev = prev.then(layer);
        return;
    }
    out.push(FlatStep::Gates(layer.clone()));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::CliffordGate;

    #[test]
    fn text_round_trip() {
        let d = 3;
        let mut s = PulseSchedule::empty(d, 2);
        s.t = 1.0;
        s.slices = 4;
        let f = GateLayer::single(d, 2, 0, LocalGate::Clifford(CliffordGate::fourier(d))).unwrap();
        let b = s.add_block("b0", vec![Step::Gates(f.inverse()), Step::Evolve(0.25), Step::Gates(f)]);
        s.steps.push(Step::Repeat { count: 4, block: b });
        s.dropped_identity = 0.5;
        s.notes.push("twirl-begin 0".into());
        let text = s.to_text();
        let back = PulseSchedule::parse(&text).unwrap();
        assert_eq!(back, s);
        assert!((back.total_evolve_time() - 1.0).abs() < 1e-15);
        assert_eq!(back.flatten().len(), 4 * 2 + 1);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "qudit-schedule v1\nD 2 N 1 t 1 slices 1\nevolve -1\n";
        assert_eq!(
            PulseSchedule::parse(bad).unwrap_err(),
            Error::Parse {
                line: 3,
                message: "duration must be non-negative".into()
            }
        );
        let bad = "qudit-schedule v1\nD 2 N 1 t 1 slices 1\ncall nowhere\n";
        assert!(matches!(PulseSchedule::parse(bad), Err(Error::Parse { line: 3, .. })));
        assert!(PulseSchedule::parse("qudit-schedule v2\n").is_err());
    }

    #[test]
    fn adjacent_gate_lines_merge() {
        let text = "qudit-schedule v1\nD 2 N 2 t 0 slices 1\ngate 0 F\ngate 1 F\ngate 0 F'\n";
        let s = PulseSchedule::parse(text).unwrap();
        assert_eq!(s.steps.len(), 1);
        let Step::Gates(l) = &s.steps[0] else { panic!() };
        assert_eq!(
            l.gates()[0],
            LocalGate::Clifford(CliffordGate::parse("F.F'", 2).unwrap())
        );
    }
}
