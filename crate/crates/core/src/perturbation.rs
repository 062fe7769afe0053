//! Single-cell perturbation analysis.
//!
//! A perturbation flips one cell; every reported delta is
//! `measure(perturbed) - measure(unperturbed)`, so `delta_bdm` is the
//! BDM-approximated negative information difference of the flip.
//!
//! ECA spacetimes (initial row included) are measured as one row-major
//! string: 1D BDM with block length `b`, LZW bytes of the ASCII rendering, and
//! Shannon entropy of the non-overlapping length-`b` blocks. Game of Life
//! grids use 2D BDM with side `d`.

use rayon::prelude::*;

use crate::baselines::{ascii_cells, compressed_size, shannon_block_entropy, temporal_cell_entropy, EntropyGrid};
use crate::bdm::{bdm_2d, bdm_cells};
use crate::ca::{self, Configuration, EcaRule, Spacetime};
use crate::ctm::CtmTable;
use crate::error::{Error, Result};
use crate::rng::{stream_seed, Experiment};

/// Density of the random initial states of the ECA sweep.
pub const SWEEP_DENSITY: f64 = 0.5;

/// Absolute values of the three measures on one spacetime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measures {
    pub bdm: f64,
    pub lzw_bytes: u64,
    pub entropy: f64,
}

/// Measures an ECA spacetime as a single row-major string.
pub fn measure_eca(st: &Spacetime, table: &CtmTable, b: usize) -> Result<Measures> {
    let cells: Vec<_> = st.cells().collect();
    Ok(Measures {
        bdm: bdm_cells(&cells, table, b)?.value,
        lzw_bytes: compressed_size(st),
        entropy: shannon_block_entropy(&ascii_cells(cells), b)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaReport {
    pub rule: u8,
    pub seed: Option<u64>,
    /// `None` is the empty perturbation.
    pub flip_pos: Option<usize>,
    pub width: usize,
    pub steps: usize,
    pub unperturbed: Measures,
    pub perturbed: Measures,
}

impl DeltaReport {
    fn new(rule: u8, flip_pos: Option<usize>, width: usize, steps: usize, unperturbed: Measures, perturbed: Measures) -> Self {
        DeltaReport {
            rule,
            seed: None,
            flip_pos,
            width,
            steps,
            unperturbed,
            perturbed,
        }
    }

    pub fn delta_bdm(&self) -> f64 {
        self.perturbed.bdm - self.unperturbed.bdm
    }

    pub fn delta_lzw_bytes(&self) -> i64 {
        self.perturbed.lzw_bytes as i64 - self.unperturbed.lzw_bytes as i64
    }

    pub fn delta_entropy(&self) -> f64 {
        self.perturbed.entropy - self.unperturbed.entropy
    }
}

/// Evolves `init` and its flipped copy for `steps` and reports the deltas of
/// all three measures. `flip = None` compares `init` with itself.
pub fn delta_measures(
    rule: &EcaRule,
    init: &Configuration,
    flip: Option<usize>,
    steps: usize,
    table: &CtmTable,
    b: usize,
) -> Result<DeltaReport> {
    let original = ca::evolve_eca(rule, init, steps)?;
    let base = measure_eca(&original, table, b)?;
    let perturbed = match flip {
        None => base,
        Some(pos) => {
            let flipped = ca::flip_cell(init, pos)?;
            measure_eca(&ca::evolve_eca(rule, &flipped, steps)?, table, b)?
        }
    };
    Ok(DeltaReport::new(rule.number(), flip, init.width(), steps, base, perturbed))
}

/// Initial state of seed `seed` in the ECA sweep (shared by all rules).
pub fn sweep_initial_state(seed: u64, width: usize) -> Result<Configuration> {
    ca::random_config(stream_seed(Experiment::EcaSweep, seed), width, SWEEP_DENSITY)
}

/// Per-seed reports and their per-(rule, position) means.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rules: Vec<u8>,
    pub width: usize,
    pub steps: usize,
    pub seeds: u64,
    /// Ordered by rule, then seed, then flip position.
    pub reports: Vec<DeltaReport>,
    /// `[rule][position]`
    pub mean_delta_bdm: Vec<Vec<f64>>,
    pub mean_delta_lzw_bytes: Vec<Vec<f64>>,
    pub mean_delta_entropy: Vec<Vec<f64>>,
}

/// Counts of triples where exactly one of BDM and LZW registered the flip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Sensitivity {
    /// `delta_lzw_bytes == 0` and `delta_bdm != 0`.
    pub bdm_only: usize,
    /// `delta_bdm == 0` and `delta_lzw_bytes != 0`.
    pub lzw_only: usize,
}

impl Sensitivity {
    pub fn of<'a>(reports: impl IntoIterator<Item = &'a DeltaReport>) -> Self {
        let mut s = Sensitivity::default();
        for r in reports {
            match (r.delta_bdm() != 0.0, r.delta_lzw_bytes() != 0) {
                (true, false) => s.bdm_only += 1,
                (false, true) => s.lzw_only += 1,
                _ => {}
            }
        }
        s
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Parameter(format!("cannot start worker pool: {e}")))
}

/// Runs every single-cell flip of `seeds` random initial states under every
/// rule. Work is spread over `(rule, seed)` pairs; `workers == 0` uses all
/// cores. Output order and values do not depend on the worker count.
pub fn perturbation_sweep(
    rules: &[EcaRule],
    width: usize,
    steps: usize,
    seeds: u64,
    table: &CtmTable,
    b: usize,
    workers: usize,
) -> Result<SweepResult> {
    if seeds == 0 {
        return Err(Error::Parameter("need at least one seed".into()));
    }
    if rules.is_empty() {
        return Err(Error::Parameter("need at least one rule".into()));
    }
    let jobs: Vec<(usize, u64)> = (0..rules.len()).flat_map(|r| (0..seeds).map(move |s| (r, s))).collect();
    let run = |&(ri, seed): &(usize, u64)| -> Result<Vec<DeltaReport>> {
        let rule = &rules[ri];
        let init = sweep_initial_state(seed, width)?;
        let original = ca::evolve_eca(rule, &init, steps)?;
        let base = measure_eca(&original, table, b)?;
        (0..width)
            .map(|pos| {
                let flipped = ca::flip_cell(&init, pos)?;
                let m = measure_eca(&ca::evolve_eca(rule, &flipped, steps)?, table, b)?;
                let mut rep = DeltaReport::new(rule.number(), Some(pos), width, steps, base, m);
                rep.seed = Some(seed);
                Ok(rep)
            })
            .collect()
    };
    let chunks: Vec<Vec<DeltaReport>> = pool(workers)?.install(|| jobs.par_iter().map(run).collect::<Result<_>>())?;
    let reports: Vec<DeltaReport> = chunks.into_iter().flatten().collect();

    let mut mean_bdm = vec![vec![0.0; width]; rules.len()];
    let mut mean_lzw = vec![vec![0.0; width]; rules.len()];
    let mut mean_ent = vec![vec![0.0; width]; rules.len()];
    let per_rule = seeds as usize * width;
    for (ri, block) in reports.chunks(per_rule).enumerate() {
        for r in block {
            let p = r.flip_pos.expect("sweep flips always set a position");
            mean_bdm[ri][p] += r.delta_bdm();
            mean_lzw[ri][p] += r.delta_lzw_bytes() as f64;
            mean_ent[ri][p] += r.delta_entropy();
        }
    }
    for m in [&mut mean_bdm, &mut mean_lzw, &mut mean_ent] {
        for v in m.iter_mut().flatten() {
            *v /= seeds as f64;
        }
    }
    Ok(SweepResult {
        rules: rules.iter().map(EcaRule::number).collect(),
        width,
        steps,
        seeds,
        reports,
        mean_delta_bdm: mean_bdm,
        mean_delta_lzw_bytes: mean_lzw,
        mean_delta_entropy: mean_ent,
    })
}

/// Both branches of one flip plus the ΔBDM of their common prefixes.
#[derive(Debug, Clone)]
pub struct PerturbationTrace {
    pub original: Spacetime,
    pub perturbed: Spacetime,
    /// `(t, BDM(perturbed[0..=t]) - BDM(original[0..=t]))`
    pub delta_bdm: Vec<(usize, f64)>,
}

/// Evolves a flip for `steps` and records ΔBDM of the rows `0..=t` every
/// `every` steps (and at the final step).
pub fn delta_trace(
    rule: &EcaRule,
    init: &Configuration,
    flip: usize,
    steps: usize,
    table: &CtmTable,
    b: usize,
    every: usize,
) -> Result<PerturbationTrace> {
    if every == 0 {
        return Err(Error::Parameter("trace stride must be at least 1".into()));
    }
    let original = ca::evolve_eca(rule, init, steps)?;
    let perturbed = ca::evolve_eca(rule, &ca::flip_cell(init, flip)?, steps)?;
    let width = init.width();
    let a: Vec<_> = original.cells().collect();
    let p: Vec<_> = perturbed.cells().collect();
    let mut ts: Vec<usize> = (0..=steps).step_by(every).collect();
    if ts.last() != Some(&steps) {
        ts.push(steps);
    }
    let delta_bdm = ts
        .into_iter()
        .map(|t| {
            let n = (t + 1) * width;
            let d = bdm_cells(&p[..n], table, b)?.value - bdm_cells(&a[..n], table, b)?.value;
            Ok((t, d))
        })
        .collect::<Result<_>>()?;
    Ok(PerturbationTrace {
        original,
        perturbed,
        delta_bdm,
    })
}

/// Parameters of the Game of Life experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GolParams {
    pub width: usize,
    pub height: usize,
    pub density: f64,
    pub pre_steps: usize,
    pub post_steps: usize,
    pub block: usize,
}

impl Default for GolParams {
    fn default() -> Self {
        GolParams {
            width: 64,
            height: 64,
            density: 0.5,
            pre_steps: 1000,
            post_steps: 100,
            block: crate::bdm::DEFAULT_BLOCK_2D,
        }
    }
}

/// Outcome of one Game of Life perturbation.
#[derive(Debug, Clone, PartialEq)]
pub struct GolReport {
    pub seed: u64,
    pub flip_pos: (usize, usize),
    /// 2D BDM of the last grid of each branch.
    pub bdm_final: (f64, f64),
    /// 2D BDM of each branch's post-perturbation frames stacked row-wise.
    pub bdm_volume: (f64, f64),
    /// LZW bytes of each branch's post-perturbation frames.
    pub lzw_bytes: (u64, u64),
    /// Per-cell temporal entropy, perturbed minus unperturbed.
    pub entropy_diff: EntropyGrid,
}

impl GolReport {
    pub fn delta_bdm_final(&self) -> f64 {
        self.bdm_final.1 - self.bdm_final.0
    }

    pub fn delta_bdm_volume(&self) -> f64 {
        self.bdm_volume.1 - self.bdm_volume.0
    }

    pub fn delta_lzw_bytes(&self) -> i64 {
        self.lzw_bytes.1 as i64 - self.lzw_bytes.0 as i64
    }

    pub fn delta_entropy(&self) -> f64 {
        self.entropy_diff.total()
    }
}

/// Initial grid of seed `seed` in the Game of Life experiment.
pub fn gol_initial_grid(seed: u64, p: &GolParams) -> Result<Configuration> {
    ca::random_grid(stream_seed(Experiment::GolPerturbation, seed), p.width, p.height, p.density)
}

/// Evolves a random grid for `pre_steps`, flips its central cell and follows
/// both branches for `post_steps`.
pub fn gol_perturbation(p: &GolParams, seed: u64, table: &CtmTable) -> Result<GolReport> {
    if p.post_steps == 0 {
        return Err(Error::Parameter("post_steps must be at least 1".into()));
    }
    let init = gol_initial_grid(seed, p)?;
    if init.width() < 3 || init.height() < 3 {
        return Err(Error::Size("Game of Life grid must be at least 3x3".into()));
    }
    let start = ca::advance_gol(&init, p.pre_steps);
    let (row, col) = (p.height / 2, p.width / 2);
    let flipped = ca::flip_cell(&start, row * p.width + col)?;
    let original = ca::evolve_gol(&start, p.post_steps)?;
    let perturbed = ca::evolve_gol(&flipped, p.post_steps)?;
    gol_report(seed, (row, col), &original, &perturbed, table, p.block)
}

/// Builds a [`GolReport`] from two already evolved branches.
pub fn gol_report(
    seed: u64,
    flip_pos: (usize, usize),
    original: &Spacetime,
    perturbed: &Spacetime,
    table: &CtmTable,
    d: usize,
) -> Result<GolReport> {
    let bdm_final = (
        bdm_2d(original.last(), table, d)?.value,
        bdm_2d(perturbed.last(), table, d)?.value,
    );
    let bdm_volume = (
        bdm_2d(&original.to_array(), table, d)?.value,
        bdm_2d(&perturbed.to_array(), table, d)?.value,
    );
    let lzw_bytes = (compressed_size(original), compressed_size(perturbed));
    let entropy_diff = temporal_cell_entropy(perturbed)?.difference(&temporal_cell_entropy(original)?)?;
    Ok(GolReport {
        seed,
        flip_pos,
        bdm_final,
        bdm_volume,
        lzw_bytes,
        entropy_diff,
    })
}

/// Runs [`gol_perturbation`] for seeds `0..seeds`, in seed order.
pub fn gol_experiment(p: &GolParams, seeds: u64, table: &CtmTable, workers: usize) -> Result<Vec<GolReport>> {
    pool(workers)?.install(|| {
        (0..seeds)
            .into_par_iter()
            .map(|s| gol_perturbation(p, s, table))
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bdm::bdm_1d;
    use crate::ca::rule_table;

    fn table() -> &'static CtmTable {
        CtmTable::shipped()
    }

    fn row_major_bits(st: &Spacetime) -> String {
        st.cells().map(|c| char::from(b'0' + c as u8)).collect()
    }

    #[test]
    fn null_perturbation_is_zero() {
        let init = ca::random_config(3, 30, 0.5).unwrap();
        let r = delta_measures(&rule_table(30).unwrap(), &init, None, 12, table(), 6).unwrap();
        assert_eq!(r.delta_bdm(), 0.0);
        assert_eq!(r.delta_lzw_bytes(), 0);
        assert_eq!(r.delta_entropy(), 0.0);
    }

    #[test]
    fn zero_rule_differs_only_in_first_row() {
        let init = Configuration::from_bits("0110100111").unwrap();
        let rule = rule_table(0).unwrap();
        let r = delta_measures(&rule, &init, Some(4), 5, table(), 6).unwrap();
        // independent recomputation from the explicit strings
        let tail = "0".repeat(50);
        let a = format!("0110100111{tail}");
        let p = format!("0110000111{tail}");
        let bdm = |s: &str| bdm_1d(s, table(), 6).unwrap().value;
        let lzw = |s: &str| crate::baselines::lzw_compress(s.as_bytes()).compressed_bytes as i64;
        let ent = |s: &str| shannon_block_entropy(s.as_bytes(), 6).unwrap();
        assert_eq!(r.delta_bdm(), bdm(&p) - bdm(&a));
        assert_eq!(r.delta_lzw_bytes(), lzw(&p) - lzw(&a));
        assert_eq!(r.delta_entropy(), ent(&p) - ent(&a));
    }

    #[test]
    fn identity_rule_changes_one_column() {
        let init = ca::random_config(5, 24, 0.5).unwrap();
        let rule = rule_table(204).unwrap();
        let flip = 7;
        let a = ca::evolve_eca(&rule, &init, 10).unwrap();
        let p = ca::evolve_eca(&rule, &ca::flip_cell(&init, flip).unwrap(), 10).unwrap();
        for (fa, fp) in a.frames().iter().zip(p.frames()) {
            let diff: Vec<usize> = (0..24).filter(|&i| fa.cells()[i] != fp.cells()[i]).collect();
            assert_eq!(diff, [flip]);
        }
        let r = delta_measures(&rule, &init, Some(flip), 10, table(), 6).unwrap();
        let expect = bdm_1d(&row_major_bits(&p), table(), 6).unwrap().value
            - bdm_1d(&row_major_bits(&a), table(), 6).unwrap().value;
        assert_eq!(r.delta_bdm(), expect);
    }

    #[test]
    fn flipping_back_negates_deltas() {
        let rule = rule_table(54).unwrap();
        let init = ca::random_config(8, 40, 0.5).unwrap();
        let fwd = delta_measures(&rule, &init, Some(13), 20, table(), 6).unwrap();
        let flipped = ca::flip_cell(&init, 13).unwrap();
        let back = delta_measures(&rule, &flipped, Some(13), 20, table(), 6).unwrap();
        assert_eq!(fwd.delta_bdm(), -back.delta_bdm());
        assert_eq!(fwd.delta_lzw_bytes(), -back.delta_lzw_bytes());
        assert_eq!(fwd.delta_entropy(), -back.delta_entropy());
    }

    #[test]
    fn flip_out_of_range() {
        let init = ca::random_config(8, 10, 0.5).unwrap();
        assert!(matches!(
            delta_measures(&rule_table(30).unwrap(), &init, Some(10), 4, table(), 6),
            Err(Error::Index { .. })
        ));
    }

    #[test]
    fn single_seed_sweep_means_are_the_reports() {
        let rules = [rule_table(30).unwrap(), rule_table(2).unwrap()];
        let s = perturbation_sweep(&rules, 16, 8, 1, table(), 6, 1).unwrap();
        assert_eq!(s.reports.len(), 2 * 16);
        assert_eq!(s.mean_delta_bdm.len(), 2);
        for (i, r) in s.reports.iter().enumerate() {
            let (ri, p) = (i / 16, i % 16);
            assert_eq!(r.flip_pos, Some(p));
            assert_eq!(s.mean_delta_bdm[ri][p], r.delta_bdm());
            assert_eq!(s.mean_delta_lzw_bytes[ri][p], r.delta_lzw_bytes() as f64);
        }
    }

    #[test]
    fn sweep_is_deterministic_across_workers() {
        let rules = [rule_table(22).unwrap(), rule_table(54).unwrap()];
        let a = perturbation_sweep(&rules, 20, 10, 3, table(), 6, 1).unwrap();
        let b = perturbation_sweep(&rules, 20, 10, 3, table(), 6, 3).unwrap();
        assert_eq!(a, b);
        assert!(perturbation_sweep(&rules, 20, 10, 0, table(), 6, 1).is_err());
    }

    #[test]
    fn trace_ends_with_full_delta() {
        let rule = rule_table(54).unwrap();
        let init = ca::random_config(1, 30, 0.5).unwrap();
        let tr = delta_trace(&rule, &init, 10, 25, table(), 6, 10).unwrap();
        let ts: Vec<usize> = tr.delta_bdm.iter().map(|&(t, _)| t).collect();
        assert_eq!(ts, [0, 10, 20, 25]);
        let full = delta_measures(&rule, &init, Some(10), 25, table(), 6).unwrap();
        assert_eq!(tr.delta_bdm.last().unwrap().1, full.delta_bdm());
    }

    fn dead_params() -> GolParams {
        GolParams {
            width: 9,
            height: 9,
            density: 0.0,
            pre_steps: 3,
            post_steps: 4,
            block: 3,
        }
    }

    #[test]
    fn lone_cell_dies_and_branches_reconverge() {
        let t = crate::bdm::tests::synthetic_table(9);
        let r = gol_perturbation(&dead_params(), 0, &t).unwrap();
        assert_eq!(r.flip_pos, (4, 4));
        // final grids are both empty
        assert_eq!(r.delta_bdm_final(), 0.0);
        // the perturbed volume still carries the lone cell in its first frame
        assert_ne!(r.delta_bdm_volume(), 0.0);
        // only the center saw a change: 1 live frame out of 5
        let center = r.entropy_diff.get(4, 4);
        let p: f64 = 1.0 / 5.0;
        assert!((center - (-(p * p.log2()) - (1.0 - p) * (1.0 - p).log2())).abs() < 1e-12);
        let others: f64 = r.entropy_diff.values.iter().map(|v| v.abs()).sum::<f64>() - center.abs();
        assert_eq!(others, 0.0);
    }

    #[test]
    fn gol_report_is_reproducible() {
        let t = crate::bdm::tests::synthetic_table(9);
        let p = GolParams {
            width: 16,
            height: 16,
            density: 0.4,
            pre_steps: 10,
            post_steps: 6,
            block: 3,
        };
        assert_eq!(gol_perturbation(&p, 4, &t).unwrap(), gol_perturbation(&p, 4, &t).unwrap());
        let many = gol_experiment(&p, 3, &t, 2).unwrap();
        assert_eq!(many.iter().map(|r| r.seed).collect::<Vec<_>>(), [0, 1, 2]);
        assert_eq!(many[1], gol_perturbation(&p, 1, &t).unwrap());
    }

    #[test]
    fn gol_rejects_zero_post_steps() {
        let t = crate::bdm::tests::synthetic_table(3);
        let p = GolParams {
            post_steps: 0,
            ..dead_params()
        };
        assert!(gol_perturbation(&p, 0, &t).is_err());
    }
}
