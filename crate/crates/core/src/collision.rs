//! Two elementary automata colliding on one lattice.
//!
//! Cells take values in `{-1, 0, 1}`. Rule A drives neighborhoods over
//! `{0, 1}`, rule B drives neighborhoods over `{0, -1}` (read with `-1` as its
//! live state), and the 12 neighborhoods that contain both `1` and `-1` get
//! randomly sampled outcomes. The all-zero neighborhood belongs to both rules;
//! when they disagree on it, its outcome is sampled as well.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;

use crate::baselines::compressed_size;
use crate::bdm::bdm_cells;
use crate::ca::{self, Alphabet, Cell, Configuration, EcaRule, RuleProvenance, Spacetime};
use crate::ctm::CtmTable;
use crate::error::{Error, Result};
use crate::rng::{self, Experiment};

pub type Neighborhood = [Cell; 3];

fn slot(n: Neighborhood) -> usize {
    ((n[0] + 1) * 9 + (n[1] + 1) * 3 + (n[2] + 1)) as usize
}

/// All 27 ternary neighborhoods in lexicographic order over `-1 < 0 < 1`.
pub fn neighborhoods() -> impl Iterator<Item = Neighborhood> {
    (0..27).map(|i| [(i / 9) as Cell - 1, (i / 3 % 3) as Cell - 1, (i % 3) as Cell - 1])
}

pub fn is_mixed(n: Neighborhood) -> bool {
    n.contains(&1) && n.contains(&-1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionRule {
    rule_a: EcaRule,
    rule_b: EcaRule,
    seed: u64,
    /// Full resolution table, indexed by [`slot`].
    outcomes: [Cell; 27],
    /// Whether the all-zero neighborhood was sampled.
    zero_sampled: bool,
}

/// Samples the mixed-neighborhood outcomes from the interaction stream of
/// `seed`, drawing in lexicographic neighborhood order.
pub fn sample_interaction_rule(rule_a: EcaRule, rule_b: EcaRule, seed: u64) -> InteractionRule {
    let mut rng = rng::stream(Experiment::Interaction, seed);
    let mut outcomes = [0; 27];
    for n in neighborhoods() {
        let value = if is_mixed(n) {
            rng.random_range(-1..=1)
        } else if n.contains(&1) {
            rule_a.apply(n[0], n[1], n[2])
        } else if n.contains(&-1) {
            -rule_b.apply(-n[0], -n[1], -n[2])
        } else {
            0 // all-zero, resolved below
        };
        outcomes[slot(n)] = value;
    }
    let a0 = rule_a.apply(0, 0, 0);
    let b0 = -rule_b.apply(0, 0, 0);
    let zero_sampled = a0 != b0;
    outcomes[slot([0, 0, 0])] = if zero_sampled { rng.random_range(-1..=1) } else { a0 };
    InteractionRule {
        rule_a,
        rule_b,
        seed,
        outcomes,
        zero_sampled,
    }
}

impl InteractionRule {
    pub fn rule_a(&self) -> EcaRule {
        self.rule_a
    }

    pub fn rule_b(&self) -> EcaRule {
        self.rule_b
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn zero_sampled(&self) -> bool {
        self.zero_sampled
    }

    #[inline]
    pub fn apply(&self, n: Neighborhood) -> Cell {
        self.outcomes[slot(n)]
    }

    /// The sampled outcomes of the 12 mixed neighborhoods.
    pub fn mixed_outcomes(&self) -> BTreeMap<Neighborhood, Cell> {
        neighborhoods()
            .filter(|&n| is_mixed(n))
            .map(|n| (n, self.apply(n)))
            .collect()
    }

    /// Every outcome that came from the random stream.
    pub fn sampled_outcomes(&self) -> BTreeMap<Neighborhood, Cell> {
        let mut m = self.mixed_outcomes();
        if self.zero_sampled {
            m.insert([0, 0, 0], self.apply([0, 0, 0]));
        }
        m
    }

    fn step(&self, cfg: &Configuration) -> Configuration {
        let c = cfg.cells();
        let n = c.len();
        let next = (0..n)
            .map(|i| self.apply([c[(i + n - 1) % n], c[i], c[(i + 1) % n]]))
            .collect();
        Configuration::new_1d(next, Alphabet::Ternary).expect("outcomes are ternary")
    }
}

/// Evolves a ternary 1D configuration under `ir` with periodic boundary.
pub fn evolve_interacting(ir: &InteractionRule, init: &Configuration, steps: usize) -> Result<Spacetime> {
    if steps == 0 {
        return Err(Error::Parameter("steps must be at least 1".into()));
    }
    if init.height() != 1 {
        return Err(Error::Size("collisions need a 1D configuration".into()));
    }
    let init = init.clone().with_alphabet(Alphabet::Ternary)?;
    let mut frames = Vec::with_capacity(steps + 1);
    frames.push(init);
    for t in 0..steps {
        let next = ir.step(&frames[t]);
        frames.push(next);
    }
    let rule = RuleProvenance::Interaction {
        rule_a: ir.rule_a.number(),
        rule_b: ir.rule_b.number(),
        seed: ir.seed,
    };
    Spacetime::from_frames(frames, rule)
}

/// Seed layout of a collision run: width `gap + 2 + 2*steps`, the `1` at
/// `steps` and the `-1` at `steps + gap + 1`, leaving `steps` zero cells on
/// either outer side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lattice {
    pub width: usize,
    pub pos_a: usize,
    pub pos_b: usize,
}

impl Lattice {
    pub fn new(gap: usize, steps: usize) -> Self {
        Lattice {
            width: gap + 2 + 2 * steps,
            pos_a: steps,
            pos_b: steps + gap + 1,
        }
    }

    pub fn collision_init(&self) -> Configuration {
        let mut cells = vec![0; self.width];
        cells[self.pos_a] = 1;
        cells[self.pos_b] = -1;
        Configuration::new_1d(cells, Alphabet::Ternary).expect("ternary cells")
    }
}

/// The two automata evolved apart, each from its own single seed, on the
/// collision lattice. B's spacetime is kept in its own binary labeling.
#[derive(Debug, Clone)]
pub struct Isolated {
    pub lattice: Lattice,
    pub a: Spacetime,
    pub b: Spacetime,
}

pub fn isolated_runs(rule_a: &EcaRule, rule_b: &EcaRule, gap: usize, steps: usize) -> Result<Isolated> {
    let lattice = Lattice::new(gap, steps);
    Ok(Isolated {
        lattice,
        a: ca::evolve_eca(rule_a, &Configuration::single(lattice.width, lattice.pos_a)?, steps)?,
        b: ca::evolve_eca(rule_b, &Configuration::single(lattice.width, lattice.pos_b)?, steps)?,
    })
}

/// Absolute measures of one collision next to the isolated runs.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionReport {
    pub rule_a: u8,
    pub rule_b: u8,
    pub interaction_seed: u64,
    pub zero_sampled: bool,
    pub bdm_collision: f64,
    pub bdm_a_iso: f64,
    pub bdm_b_iso: f64,
    pub lzw_collision: u64,
    pub lzw_a_iso: u64,
    pub lzw_b_iso: u64,
}

impl CollisionReport {
    pub fn delta_bdm_a(&self) -> f64 {
        self.bdm_collision - self.bdm_a_iso
    }

    pub fn delta_bdm_b(&self) -> f64 {
        self.bdm_collision - self.bdm_b_iso
    }

    pub fn delta_lzw_a(&self) -> i64 {
        self.lzw_collision as i64 - self.lzw_a_iso as i64
    }

    pub fn delta_lzw_b(&self) -> i64 {
        self.lzw_collision as i64 - self.lzw_b_iso as i64
    }
}

/// BDM of a spacetime read row-major as one string (ternary cells binarized).
pub fn spacetime_bdm(st: &Spacetime, table: &CtmTable, b: usize) -> Result<f64> {
    let cells: Vec<Cell> = st.cells().collect();
    Ok(bdm_cells(&cells, table, b)?.value)
}

/// Collision runs for interaction seeds `0..n_rules`, in seed order.
#[allow(clippy::too_many_arguments)]
pub fn collision_experiment(
    rule_a: &EcaRule,
    rule_b: &EcaRule,
    gap: usize,
    steps: usize,
    n_rules: u64,
    table: &CtmTable,
    b: usize,
    workers: usize,
) -> Result<Vec<CollisionReport>> {
    if n_rules == 0 {
        return Err(Error::Parameter("need at least one interaction rule".into()));
    }
    let iso = isolated_runs(rule_a, rule_b, gap, steps)?;
    let bdm_a_iso = spacetime_bdm(&iso.a, table, b)?;
    let bdm_b_iso = spacetime_bdm(&iso.b, table, b)?;
    let lzw_a_iso = compressed_size(&iso.a);
    let lzw_b_iso = compressed_size(&iso.b);
    let init = iso.lattice.collision_init();
    let run = |seed: u64| -> Result<CollisionReport> {
        let ir = sample_interaction_rule(*rule_a, *rule_b, seed);
        let st = evolve_interacting(&ir, &init, steps)?;
        Ok(CollisionReport {
            rule_a: rule_a.number(),
            rule_b: rule_b.number(),
            interaction_seed: seed,
            zero_sampled: ir.zero_sampled(),
            bdm_collision: spacetime_bdm(&st, table, b)?,
            bdm_a_iso,
            bdm_b_iso,
            lzw_collision: compressed_size(&st),
            lzw_a_iso,
            lzw_b_iso,
        })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Parameter(format!("cannot start worker pool: {e}")))?;
    pool.install(|| (0..n_rules).into_par_iter().map(run).collect())
}

/// Cell-wise union of the isolated runs, B's live cells written as `-1`.
pub fn union_of_isolated(iso: &Isolated) -> Result<Spacetime> {
    let frames = iso
        .a
        .frames()
        .iter()
        .zip(iso.b.frames())
        .map(|(fa, fb)| {
            let cells = fa.cells().iter().zip(fb.cells()).map(|(&x, &y)| x - y).collect();
            Configuration::new_1d(cells, Alphabet::Ternary)
        })
        .collect::<Result<Vec<_>>>()?;
    Spacetime::from_frames(frames, RuleProvenance::Unknown)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ca::rule_table;

    fn r(n: u32) -> EcaRule {
        rule_table(n).unwrap()
    }

    #[test]
    fn exactly_twelve_mixed_neighborhoods() {
        assert_eq!(neighborhoods().count(), 27);
        assert_eq!(neighborhoods().filter(|&n| is_mixed(n)).count(), 12);
        let ir = sample_interaction_rule(r(30), r(22), 5);
        assert_eq!(ir.mixed_outcomes().len(), 12);
    }

    #[test]
    fn pure_neighborhoods_delegate() {
        let ir = sample_interaction_rule(r(30), r(22), 9);
        assert_eq!(ir.apply([0, 1, 1]), r(30).apply(0, 1, 1));
        assert_eq!(ir.apply([0, -1, -1]), -r(22).apply(0, 1, 1));
        for n in neighborhoods().filter(|n| !is_mixed(*n) && *n != [0, 0, 0]) {
            let expect = if n.contains(&1) {
                r(30).apply(n[0], n[1], n[2])
            } else {
                -r(22).apply(-n[0], -n[1], -n[2])
            };
            assert_eq!(ir.apply(n), expect, "{n:?}");
        }
        assert!(!ir.zero_sampled());
        assert_eq!(ir.apply([0, 0, 0]), 0);
    }

    #[test]
    fn zero_conflict_is_sampled() {
        // rule 1 maps 000 -> 1, so A says 1 and B says -1
        let ir = sample_interaction_rule(r(1), r(1), 3);
        assert!(ir.zero_sampled());
        assert_eq!(ir.sampled_outcomes().len(), 13);
        // rule 1 vs rule 2: A says 1, B says 0
        assert!(sample_interaction_rule(r(1), r(2), 3).zero_sampled());
        assert!(!sample_interaction_rule(r(2), r(4), 3).zero_sampled());
    }

    #[test]
    fn sampling_is_deterministic_and_seed_dependent() {
        let a = sample_interaction_rule(r(30), r(22), 17);
        assert_eq!(a, sample_interaction_rule(r(30), r(22), 17));
        let distinct = (0..20)
            .map(|s| sample_interaction_rule(r(30), r(22), s).mixed_outcomes())
            .collect::<std::collections::BTreeSet<_>>();
        assert!(distinct.len() > 1);
    }

    #[test]
    fn binary_input_reduces_to_rule_a() {
        let ir = sample_interaction_rule(r(110), r(30), 2);
        let init = ca::random_config(4, 33, 0.5).unwrap();
        let st = evolve_interacting(&ir, &init, 15).unwrap();
        let plain = ca::evolve_eca(&r(110), &init, 15).unwrap();
        assert_eq!(st.len(), 16);
        for (x, y) in st.frames().iter().zip(plain.frames()) {
            assert_eq!(x.cells(), y.cells());
        }
    }

    #[test]
    fn negative_input_reduces_to_relabeled_rule_b() {
        let ir = sample_interaction_rule(r(110), r(30), 2);
        let init = ca::random_config(6, 33, 0.5).unwrap();
        let neg = Configuration::new_1d(init.cells().iter().map(|c| -c).collect(), Alphabet::Ternary).unwrap();
        let st = evolve_interacting(&ir, &neg, 15).unwrap();
        let plain = ca::evolve_eca(&r(30), &init, 15).unwrap();
        for (x, y) in st.frames().iter().zip(plain.frames()) {
            let relabeled: Vec<Cell> = y.cells().iter().map(|c| -c).collect();
            assert_eq!(x.cells(), &relabeled[..]);
        }
    }

    #[test]
    fn lattice_layout() {
        let l = Lattice::new(40, 100);
        assert_eq!(l.width, 242);
        assert_eq!(l.pos_b - l.pos_a - 1, 40);
        assert_eq!(l.width - 1 - l.pos_b, 100);
        assert_eq!(l.pos_a, 100);
    }

    #[test]
    fn rejects_alphabet_violation() {
        let ir = sample_interaction_rule(r(30), r(22), 0);
        let bad = Configuration::new_1d(vec![0, 1], Alphabet::Binary).unwrap();
        assert!(evolve_interacting(&ir, &bad, 0).is_err());
        assert!(Configuration::new_1d(vec![0, 2], Alphabet::Ternary).is_err());
    }

    #[test]
    fn distant_seeds_do_not_interact() {
        let (gap, steps) = (30, 12);
        let iso = isolated_runs(&r(30), &r(22), gap, steps).unwrap();
        let union = union_of_isolated(&iso).unwrap();
        for seed in 0..5 {
            let ir = sample_interaction_rule(r(30), r(22), seed);
            let st = evolve_interacting(&ir, &iso.lattice.collision_init(), steps).unwrap();
            assert_eq!(st.frames(), union.frames());
        }
    }

    #[test]
    fn experiment_is_deterministic() {
        let t = CtmTable::shipped();
        let a = collision_experiment(&r(30), &r(22), 10, 20, 4, t, 6, 1).unwrap();
        let b = collision_experiment(&r(30), &r(22), 10, 20, 4, t, 6, 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.iter().map(|c| c.interaction_seed).collect::<Vec<_>>(), [0, 1, 2, 3]);
        for c in &a {
            assert_eq!(c.delta_bdm_a(), c.bdm_collision - c.bdm_a_iso);
            assert_eq!(c.delta_lzw_b(), c.lzw_collision as i64 - c.lzw_b_iso as i64);
        }
    }
}
