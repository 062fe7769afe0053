//! Coding Theorem Method: output-frequency distribution of small Turing
//! machines.
//!
//! The machine class is the busy-beaver formalism with `n` states and two
//! symbols. Each of the `2n` transition entries picks one of `4n + 2` actions:
//! write a symbol, move left or right and go to one of the `n` states
//! (`4n` choices), or write a symbol and halt (2 choices). Machines start in
//! state 1 (index 0 here) on a blank tape of zeros. The halting transition
//! counts as a step, so the (2,2) class tops out at 6 steps.
//!
//! A machine's output is the tape segment between the leftmost and rightmost
//! cells visited by the head. The table counts every halting output together
//! with its complement, which is exactly what running the whole class a second
//! time on a tape of ones would add (relabeling symbols is a bijection on the
//! class). The CTM value of a string is `-log2(count / H)` where `H` is the
//! sum of all counts.

use std::borrow::Cow;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{self, Experiment};

/// Busy-beaver step bound of the (4,2) class; no halting machine with at most
/// four states runs longer.
pub const DEFAULT_CUTOFF: u64 = 107;

/// Largest state count whose index space fits in `u64`.
pub const MAX_STATES: u32 = 6;

/// Environment variable naming the default table directory.
pub const TABLE_DIR_ENV: &str = "AIDYN_TABLE_DIR";

const MAX_ENTRIES: usize = 2 * MAX_STATES as usize;
const CHUNK: u64 = 1 << 14;

static SHIPPED_TEXT: &str = include_str!("../data/ctm-n3-k2.tsv");
static SHIPPED_N4_TEXT: &str = include_str!("../data/ctm-n4-k2.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Halt { write: u8 },
    Step { write: u8, dir: Move, next: u8 },
}

impl Action {
    fn decode(choice: u64, states: u32) -> Action {
        match choice {
            0 | 1 => Action::Halt { write: choice as u8 },
            c => {
                let c = c - 2;
                let next = (c % states as u64) as u8;
                let rest = c / states as u64;
                let dir = if rest.is_multiple_of(2) { Move::Left } else { Move::Right };
                Action::Step {
                    write: (rest / 2) as u8,
                    dir,
                    next,
                }
            }
        }
    }

    fn encode(self, states: u32) -> u64 {
        match self {
            Action::Halt { write } => write as u64,
            Action::Step { write, dir, next } => {
                let d = match dir {
                    Move::Left => 0,
                    Move::Right => 1,
                };
                2 + (write as u64 * 2 + d) * states as u64 + next as u64
            }
        }
    }
}

/// One machine of the `(n, 2)` class. Entry `2*state + read` holds the action
/// taken in `state` (0-based) when reading `read`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TuringMachine {
    states: u32,
    actions: [Action; MAX_ENTRIES],
}

fn check_class(states: u32, symbols: u32) -> Result<()> {
    if symbols != 2 {
        return Err(Error::Parameter(format!(
            "only 2-symbol machines are supported, got k={symbols}"
        )));
    }
    if states == 0 || states > MAX_STATES {
        return Err(Error::Parameter(format!(
            "state count must be in 1..={MAX_STATES}, got n={states}"
        )));
    }
    Ok(())
}

/// Number of machines in the `(n, 2)` class: `(4n + 2)^(2n)`.
pub fn class_size(states: u32) -> Result<u64> {
    check_class(states, 2)?;
    Ok((4 * states as u64 + 2).pow(2 * states))
}

impl TuringMachine {
    pub fn new(states: u32, actions: &[Action]) -> Result<Self> {
        check_class(states, 2)?;
        if actions.len() != 2 * states as usize {
            return Err(Error::Parameter(format!(
                "{states}-state machine needs {} transitions, got {}",
                2 * states,
                actions.len()
            )));
        }
        for a in actions {
            let ok = match *a {
                Action::Halt { write } => write < 2,
                Action::Step { write, next, .. } => write < 2 && (next as u32) < states,
            };
            if !ok {
                return Err(Error::Parameter(format!("invalid action {a:?}")));
            }
        }
        let mut table = [Action::Halt { write: 0 }; MAX_ENTRIES];
        table[..actions.len()].copy_from_slice(actions);
        Ok(TuringMachine {
            states,
            actions: table,
        })
    }

    /// Decodes a machine index. Entry `(state 0, read 0)` is the most
    /// significant base-`(4n+2)` digit.
    pub fn from_index(states: u32, index: u64) -> Result<Self> {
        let size = class_size(states)?;
        if index >= size {
            return Err(Error::Index {
                index: index as usize,
                len: size as usize,
            });
        }
        Ok(Self::decode_unchecked(states, index))
    }

    fn decode_unchecked(states: u32, mut index: u64) -> Self {
        let base = 4 * states as u64 + 2;
        let entries = 2 * states as usize;
        let mut actions = [Action::Halt { write: 0 }; MAX_ENTRIES];
        for slot in actions[..entries].iter_mut().rev() {
            *slot = Action::decode(index % base, states);
            index /= base;
        }
        TuringMachine { states, actions }
    }

    pub fn index(&self) -> u64 {
        let base = 4 * self.states as u64 + 2;
        self.transitions()
            .iter()
            .fold(0, |acc, a| acc * base + a.encode(self.states))
    }

    pub fn states(&self) -> u32 {
        self.states
    }

    pub fn symbols(&self) -> u32 {
        2
    }

    pub fn transitions(&self) -> &[Action] {
        &self.actions[..2 * self.states as usize]
    }

    pub fn action(&self, state: u32, read: u8) -> Action {
        self.actions[(2 * state + read as u32) as usize]
    }

    /// The machine with every move direction reversed. Its output is the
    /// reversal of this machine's output.
    pub fn reflected(&self) -> TuringMachine {
        let mut out = *self;
        for a in out.actions.iter_mut() {
            if let Action::Step { dir, .. } = a {
                *dir = match dir {
                    Move::Left => Move::Right,
                    Move::Right => Move::Left,
                };
            }
        }
        out
    }
}

/// Every machine of the `(n, k)` class in ascending index order.
pub fn enumerate_machines(states: u32, symbols: u32) -> Result<impl Iterator<Item = TuringMachine>> {
    check_class(states, symbols)?;
    let size = class_size(states)?;
    Ok((0..size).map(move |i| TuringMachine::decode_unchecked(states, i)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub halted: bool,
    pub steps_used: u64,
    /// Visited tape segment as `0`/`1` digits; `None` unless halted.
    pub output: Option<String>,
}

/// Reusable blank-tape simulator. The tape is wide enough that the head can
/// never leave it within `cutoff` steps.
struct Simulator {
    tape: Vec<u8>,
    origin: usize,
    cutoff: u64,
}

struct Halt {
    steps: u64,
    lo: usize,
    hi: usize,
}

impl Simulator {
    fn new(cutoff: u64) -> Self {
        let origin = cutoff as usize + 1;
        Simulator {
            tape: vec![0; 2 * origin + 1],
            origin,
            cutoff,
        }
    }

    fn run(&mut self, m: &TuringMachine) -> Option<Halt> {
        let (mut pos, mut lo, mut hi) = (self.origin, self.origin, self.origin);
        let mut state = 0usize;
        let mut result = None;
        for step in 1..=self.cutoff {
            let read = self.tape[pos];
            match m.actions[2 * state + read as usize] {
                Action::Halt { write } => {
                    self.tape[pos] = write;
                    result = Some(Halt { steps: step, lo, hi });
                    break;
                }
                Action::Step { write, dir, next } => {
                    self.tape[pos] = write;
                    match dir {
                        Move::Left => {
                            pos -= 1;
                            lo = lo.min(pos);
                        }
                        Move::Right => {
                            pos += 1;
                            hi = hi.max(pos);
                        }
                    }
                    state = next as usize;
                }
            }
        }
        if result.is_none() {
            self.tape[lo..=hi].fill(0);
        }
        result
    }

    /// Writes the visited segment as ASCII digits and clears the tape.
    fn take_output(&mut self, halt: &Halt, out: &mut Vec<u8>) {
        out.clear();
        out.extend(self.tape[halt.lo..=halt.hi].iter().map(|&s| b'0' + s));
        self.tape[halt.lo..=halt.hi].fill(0);
    }
}

/// Runs `m` on a blank tape for at most `cutoff` steps.
pub fn run_machine(m: &TuringMachine, cutoff: u64) -> RunOutcome {
    let mut sim = Simulator::new(cutoff);
    match sim.run(m) {
        Some(h) => {
            let mut out = Vec::new();
            sim.take_output(&h, &mut out);
            RunOutcome {
                halted: true,
                steps_used: h.steps,
                output: Some(String::from_utf8(out).expect("ASCII digits")),
            }
        }
        None => RunOutcome {
            halted: false,
            steps_used: cutoff,
            output: None,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableMeta {
    pub n: u32,
    pub k: u32,
    pub cutoff: u64,
    /// Machines enumerated (or sampled).
    pub total: u64,
    /// Sum of all counts.
    pub halting: u64,
    pub sampled: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub count: u64,
    pub ctm: f64,
}

/// `-log2(count / halting)`.
pub fn ctm_value(count: u64, halting: u64) -> f64 {
    -(count as f64 / halting as f64).log2()
}

/// Empirical CTM lookup table.
#[derive(Debug, Clone)]
pub struct CtmTable {
    meta: TableMeta,
    entries: HashMap<String, Entry>,
    /// Largest CTM value per string length.
    max_by_len: Vec<Option<f64>>,
}

impl PartialEq for CtmTable {
    fn eq(&self, other: &Self) -> bool {
        self.meta == other.meta && self.entries == other.entries
    }
}

fn by_length_then_lex(a: &str, b: &str) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

impl CtmTable {
    /// Builds a table from raw counts; `meta.halting` is recomputed.
    pub fn from_counts(mut meta: TableMeta, counts: HashMap<String, u64>) -> Result<Self> {
        let halting: u64 = counts.values().sum();
        if halting == 0 {
            return Err(Error::Parameter("no halting outputs to build a table from".into()));
        }
        if let Some(bad) = counts.keys().find(|s| s.is_empty() || !s.bytes().all(|b| b == b'0' || b == b'1')) {
            return Err(Error::Parameter(format!("output {bad:?} is not a non-empty binary string")));
        }
        meta.halting = halting;
        let entries: HashMap<String, Entry> = counts
            .into_iter()
            .filter(|&(_, c)| c > 0)
            .map(|(s, count)| {
                let ctm = ctm_value(count, halting);
                (s, Entry { count, ctm })
            })
            .collect();
        Ok(Self::index(meta, entries))
    }

    fn index(meta: TableMeta, entries: HashMap<String, Entry>) -> Self {
        let longest = entries.keys().map(String::len).max().unwrap_or(0);
        let mut max_by_len: Vec<Option<f64>> = vec![None; longest + 1];
        for (s, e) in &entries {
            let slot = &mut max_by_len[s.len()];
            *slot = Some(slot.map_or(e.ctm, |m: f64| m.max(e.ctm)));
        }
        CtmTable {
            meta,
            entries,
            max_by_len,
        }
    }

    pub fn meta(&self) -> &TableMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, block: &str) -> Option<&Entry> {
        self.entries.get(block)
    }

    pub fn count(&self, block: &str) -> u64 {
        self.entries.get(block).map_or(0, |e| e.count)
    }

    /// Entries ordered by (length, lexicographic).
    pub fn sorted_entries(&self) -> Vec<(&str, &Entry)> {
        let mut v: Vec<(&str, &Entry)> = self.entries.iter().map(|(s, e)| (s.as_str(), e)).collect();
        v.sort_by(|a, b| by_length_then_lex(a.0, b.0));
        v
    }

    /// Number of stored strings of each length (index = length).
    pub fn coverage(&self) -> Vec<usize> {
        let mut cov = vec![0; self.max_by_len.len()];
        for s in self.entries.keys() {
            cov[s.len()] += 1;
        }
        cov
    }

    pub fn max_ctm_at_len(&self, len: usize) -> Option<f64> {
        self.max_by_len.get(len).copied().flatten()
    }

    /// CTM value of `block`. Strings absent from the table score one bit above
    /// the largest stored value of the same length.
    pub fn lookup(&self, block: &str) -> Result<f64> {
        if let Some(e) = self.entries.get(block) {
            return Ok(e.ctm);
        }
        if let Some(i) = block.bytes().position(|b| b != b'0' && b != b'1') {
            return Err(Error::Parameter(format!(
                "block {block:?} has a non-binary symbol at {i}"
            )));
        }
        self.max_ctm_at_len(block.len())
            .map(|m| m + 1.0)
            .ok_or(Error::Coverage(block.len()))
    }

    /// Serializes to the tab-separated table format.
    pub fn to_text(&self) -> String {
        let m = &self.meta;
        let mut out = String::new();
        writeln!(out, "#n={}", m.n).unwrap();
        writeln!(out, "#k={}", m.k).unwrap();
        writeln!(out, "#cutoff={}", m.cutoff).unwrap();
        writeln!(out, "#total={}", m.total).unwrap();
        writeln!(out, "#halting={}", m.halting).unwrap();
        writeln!(out, "#sampled={}", m.sampled).unwrap();
        for (s, e) in self.sorted_entries() {
            writeln!(out, "{s}\t{}\t{:.12}", e.count, e.ctm).unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let corrupt = |msg: String| Error::CorruptTable(msg);
        if text.trim().is_empty() {
            return Err(corrupt("empty file".into()));
        }
        let mut lines = text.lines();
        let mut header = |key: &str| -> Result<&str> {
            let line = lines
                .next()
                .ok_or_else(|| corrupt(format!("truncated header, missing #{key}")))?;
            line.strip_prefix('#')
                .and_then(|l| l.strip_prefix(key))
                .and_then(|l| l.strip_prefix('='))
                .ok_or_else(|| corrupt(format!("expected #{key}=..., found {line:?}")))
        };
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::CorruptTable(format!("bad value {v:?} for #{key}")))
        }
        let n = num("n", header("n")?)?;
        let k = num("k", header("k")?)?;
        let cutoff = num("cutoff", header("cutoff")?)?;
        let total = num("total", header("total")?)?;
        let halting: u64 = num("halting", header("halting")?)?;
        let sampled = num("sampled", header("sampled")?)?;
        let meta = TableMeta {
            n,
            k,
            cutoff,
            total,
            halting,
            sampled,
        };

        let mut entries = HashMap::new();
        let mut sum = 0u64;
        for (lineno, line) in lines.enumerate() {
            let at = lineno + 7;
            let mut fields = line.split('\t');
            let (Some(s), Some(count), Some(ctm), None) =
                (fields.next(), fields.next(), fields.next(), fields.next())
            else {
                return Err(corrupt(format!("line {at}: expected 3 tab-separated fields")));
            };
            if s.is_empty() || !s.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(corrupt(format!("line {at}: {s:?} is not a binary string")));
            }
            let count: u64 = count
                .parse()
                .map_err(|_| corrupt(format!("line {at}: bad count {count:?}")))?;
            if count == 0 {
                return Err(corrupt(format!("line {at}: zero count")));
            }
            if halting == 0 {
                return Err(corrupt("#halting is zero".into()));
            }
            let value = ctm_value(count, halting);
            if format!("{value:.12}") != ctm {
                return Err(corrupt(format!(
                    "line {at}: ctm {ctm} does not match count {count} of {halting}"
                )));
            }
            sum = sum
                .checked_add(count)
                .ok_or_else(|| corrupt("count overflow".into()))?;
            if entries.insert(s.to_owned(), Entry { count, ctm: value }).is_some() {
                return Err(corrupt(format!("line {at}: duplicate entry {s}")));
            }
        }
        if sum != halting {
            return Err(corrupt(format!(
                "#halting={halting} but counts sum to {sum} (truncated?)"
            )));
        }
        Ok(Self::index(meta, entries))
    }

    /// The full (3,2) table built with cutoff 107, bundled with the crate.
    pub fn shipped() -> &'static CtmTable {
        static TABLE: OnceLock<CtmTable> = OnceLock::new();
        TABLE.get_or_init(|| CtmTable::parse(SHIPPED_TEXT).expect("bundled CTM table is valid"))
    }

    /// The full (4,2) table (about 1.1e10 machines), used for 2D tiles.
    pub fn shipped_n4() -> &'static CtmTable {
        static TABLE: OnceLock<CtmTable> = OnceLock::new();
        TABLE.get_or_init(|| CtmTable::parse(SHIPPED_N4_TEXT).expect("bundled CTM table is valid"))
    }
}

pub fn save_table(table: &CtmTable, path: &Path) -> Result<()> {
    std::fs::write(path, table.to_text()).map_err(|e| Error::io(path, e))
}

pub fn load_table(path: &Path) -> Result<CtmTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    CtmTable::parse(&text)
}

/// File name used for a table in a table directory.
pub fn table_file_name(n: u32, k: u32) -> String {
    format!("ctm-n{n}-k{k}.tsv")
}

/// `$AIDYN_TABLE_DIR/<file>` if the variable is set.
pub fn default_table_path(n: u32, k: u32) -> Option<PathBuf> {
    std::env::var_os(TABLE_DIR_ENV).map(|dir| PathBuf::from(dir).join(table_file_name(n, k)))
}

/// Bundled table for the `(n, 2)` class, if one ships with the crate.
pub fn bundled(n: u32) -> Option<&'static CtmTable> {
    match n {
        3 => Some(CtmTable::shipped()),
        4 => Some(CtmTable::shipped_n4()),
        _ => None,
    }
}

/// Finds the `(n, 2)` table: an explicit file first, then
/// `$AIDYN_TABLE_DIR`, then the bundled tables.
pub fn resolve_table(explicit: Option<&Path>, n: u32) -> Result<Cow<'static, CtmTable>> {
    if let Some(path) = explicit {
        return load_table(path).map(Cow::Owned);
    }
    if let Some(path) = default_table_path(n, 2) {
        if path.exists() {
            return load_table(&path).map(Cow::Owned);
        }
    }
    bundled(n).map(Cow::Borrowed).ok_or_else(|| {
        Error::Parameter(format!(
            "no ({n},2) table bundled; build one with ctm-build and pass it explicitly or via {TABLE_DIR_ENV}"
        ))
    })
}

/// Knobs for large classes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildOptions {
    /// Allow a full enumeration of the (4,2) class (about 1.1e10 machines).
    pub long_run: bool,
    /// Run only this many machines, one drawn uniformly from each of as many
    /// equal index strata.
    pub sample: Option<u64>,
    pub sample_seed: u64,
}

/// Raw aggregate of a class run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Census {
    pub counts: HashMap<String, u64>,
    pub machines: u64,
    pub halting_machines: u64,
    pub max_steps: u64,
}

impl Census {
    fn merge(mut self, other: Census) -> Census {
        for (s, c) in other.counts {
            *self.counts.entry(s).or_insert(0) += c;
        }
        self.machines += other.machines;
        self.halting_machines += other.halting_machines;
        self.max_steps = self.max_steps.max(other.max_steps);
        self
    }

    /// Counts `out` and its complement; leaves `out` as it was.
    fn add_with_complement(&mut self, out: &mut [u8]) {
        bump(&mut self.counts, out);
        out.iter_mut().for_each(|b| *b ^= 1);
        bump(&mut self.counts, out);
        out.iter_mut().for_each(|b| *b ^= 1);
    }
}

fn bump(counts: &mut HashMap<String, u64>, out: &[u8]) {
    let s = std::str::from_utf8(out).expect("ASCII digits");
    match counts.get_mut(s) {
        Some(c) => *c += 1,
        None => {
            counts.insert(s.to_owned(), 1);
        }
    }
}

fn sampled_index(size: u64, strata: u64, j: u64, seed: u64) -> u64 {
    let lo = (size as u128 * j as u128 / strata as u128) as u64;
    let hi = (size as u128 * (j + 1) as u128 / strata as u128) as u64;
    let mut r = rng::stream(Experiment::MachineSample, rng::splitmix64(seed) ^ j);
    if hi > lo {
        r.random_range(lo..hi)
    } else {
        lo
    }
}

/// Runs every machine whose index `index_of(i)` for `i` in `0..count`,
/// aggregating outputs plus their complements. Work is split into fixed
/// chunks, so the result does not depend on the thread count.
pub fn census<F>(states: u32, cutoff: u64, count: u64, workers: usize, index_of: F) -> Result<Census>
where
    F: Fn(u64) -> u64 + Sync,
{
    census_with(states, cutoff, count, workers, false, index_of)
}

fn census_with<F>(
    states: u32,
    cutoff: u64,
    count: u64,
    workers: usize,
    with_reflection: bool,
    index_of: F,
) -> Result<Census>
where
    F: Fn(u64) -> u64 + Sync,
{
    if cutoff == 0 {
        return Err(Error::Parameter("cutoff must be at least 1".into()));
    }
    check_class(states, 2)?;
    let chunks = count.div_ceil(CHUNK);
    let job = || {
        (0..chunks)
            .into_par_iter()
            .map(|chunk| {
                let mut sim = Simulator::new(cutoff);
                let mut local = Census::default();
                let mut buf = Vec::new();
                let end = ((chunk + 1) * CHUNK).min(count);
                for i in chunk * CHUNK..end {
                    let m = TuringMachine::decode_unchecked(states, index_of(i));
                    local.machines += 1;
                    if with_reflection {
                        local.machines += 1;
                    }
                    if let Some(h) = sim.run(&m) {
                        local.halting_machines += 1;
                        local.max_steps = local.max_steps.max(h.steps);
                        sim.take_output(&h, &mut buf);
                        local.add_with_complement(&mut buf);
                        if with_reflection {
                            local.halting_machines += 1;
                            buf.reverse();
                            local.add_with_complement(&mut buf);
                        }
                    }
                }
                local
            })
            .reduce(Census::default, Census::merge)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Parameter(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(job))
}

/// Full-class census that exploits the two exact symmetries of the class.
///
/// Machines whose first action halts are counted in closed form. Of the
/// machines whose first action moves, only the right movers are simulated;
/// each stands in for its left-moving reflection, whose output is the
/// reversal. The result equals `census(states, cutoff, class_size, .., |i| i)`.
pub fn census_full(states: u32, cutoff: u64, workers: usize) -> Result<Census> {
    check_class(states, 2)?;
    let base = 4 * states as u64 + 2;
    let block = base.pow(2 * states - 1);
    let right_movers: Vec<u64> = (0..2u8)
        .flat_map(|write| {
            (0..states as u8).map(move |next| {
                Action::Step {
                    write,
                    dir: Move::Right,
                    next,
                }
                .encode(states)
            })
        })
        .collect();
    let simulated = right_movers.len() as u64 * block;
    let mut right = census_with(states, cutoff, simulated, workers, true, |i| {
        right_movers[(i / block) as usize] * block + i % block
    })?;
    // First action halts: `block` machines write 0, `block` write 1; each
    // output is counted with its complement.
    *right.counts.entry("0".to_owned()).or_insert(0) += 2 * block;
    *right.counts.entry("1".to_owned()).or_insert(0) += 2 * block;
    right.machines += 2 * block;
    right.halting_machines += 2 * block;
    right.max_steps = right.max_steps.max(1);
    Ok(right)
}

/// Builds the CTM table of the `(n, k)` class. `workers == 0` uses one thread
/// per core.
pub fn build_table(n: u32, k: u32, cutoff: u64, workers: usize, opts: BuildOptions) -> Result<CtmTable> {
    if cutoff == 0 {
        return Err(Error::Parameter("cutoff must be at least 1".into()));
    }
    check_class(n, k)?;
    let size = class_size(n)?;
    if opts.sample.is_none() && n > 4 {
        return Err(Error::ResourceGuard {
            n,
            machines: size,
            hint: "use sampling for n > 4",
        });
    }
    if opts.sample.is_none() && n == 4 && !opts.long_run {
        return Err(Error::ResourceGuard {
            n,
            machines: size,
            hint: "pass the long-run flag or request sampling",
        });
    }
    let census = match opts.sample {
        Some(0) => return Err(Error::Parameter("sample size must be positive".into())),
        Some(m) => {
            let m = m.min(size);
            census(n, cutoff, m, workers, |j| sampled_index(size, m, j, opts.sample_seed))?
        }
        None => census_full(n, cutoff, workers)?,
    };
    let meta = TableMeta {
        n,
        k,
        cutoff,
        total: census.machines,
        halting: 0,
        sampled: opts.sample.is_some(),
    };
    CtmTable::from_counts(meta, census.counts)
}
