//! Cellular automaton engines: elementary (radius-1, binary) automata and
//! Conway's Game of Life, both on periodic lattices.

use crate::error::{Error, Result};
use crate::rng::{self, Experiment};

/// Cell state. Binary lattices use `{0, 1}`; colliding automata add `-1`.
pub type Cell = i8;

/// Wolfram-numbered local rule of an elementary cellular automaton.
///
/// Bit `i` of the rule number is the outcome for the neighborhood whose value
/// is `i = 4*left + 2*center + right`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EcaRule {
    number: u8,
    table: [Cell; 8],
}

impl EcaRule {
    pub fn new(number: u32) -> Result<Self> {
        let number = u8::try_from(number).map_err(|_| Error::InvalidRule(number))?;
        let mut table = [0; 8];
        for (i, slot) in table.iter_mut().enumerate() {
            *slot = ((number >> i) & 1) as Cell;
        }
        Ok(EcaRule { number, table })
    }

    pub fn number(&self) -> u8 {
        self.number
    }

    /// Outcomes indexed by neighborhood value `4*left + 2*center + right`.
    pub fn table(&self) -> &[Cell; 8] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, left: Cell, center: Cell, right: Cell) -> Cell {
        self.table[((left << 2) | (center << 1) | right) as usize]
    }

    /// The left-right reflection of this rule.
    pub fn mirror(&self) -> EcaRule {
        let mut number = 0u8;
        for i in 0..8u8 {
            let (l, c, r) = (i >> 2 & 1, i >> 1 & 1, i & 1);
            let reflected = (r << 2) | (c << 1) | l;
            number |= (self.table[reflected as usize] as u8) << i;
        }
        EcaRule::new(number.into()).expect("u8 is always a valid rule")
    }
}

/// Builds the lookup table of ECA rule `number`.
pub fn rule_table(number: u32) -> Result<EcaRule> {
    EcaRule::new(number)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alphabet {
    /// `{0, 1}`
    Binary,
    /// `{-1, 0, 1}`
    Ternary,
}

impl Alphabet {
    pub fn contains(self, value: Cell) -> bool {
        match self {
            Alphabet::Binary => value == 0 || value == 1,
            Alphabet::Ternary => (-1..=1).contains(&value),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Alphabet::Binary => "binary",
            Alphabet::Ternary => "ternary",
        }
    }
}

/// A lattice state: a `height x width` array stored row-major. One-dimensional
/// configurations have `height == 1`.
///
/// The same type doubles as the generic 2D array consumed by the 2D block
/// decomposition, e.g. a spacetime diagram stacked into rows.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    width: usize,
    height: usize,
    alphabet: Alphabet,
    cells: Vec<Cell>,
}

impl Configuration {
    pub fn new_1d(cells: Vec<Cell>, alphabet: Alphabet) -> Result<Self> {
        let width = cells.len();
        Self::new_2d(width, 1, cells, alphabet)
    }

    pub fn new_2d(width: usize, height: usize, cells: Vec<Cell>, alphabet: Alphabet) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Size(format!("lattice must be non-empty, got {width}x{height}")));
        }
        if cells.len() != width * height {
            return Err(Error::Size(format!(
                "{} cells do not fill a {width}x{height} lattice",
                cells.len()
            )));
        }
        if let Some(index) = cells.iter().position(|&v| !alphabet.contains(v)) {
            return Err(Error::Alphabet {
                value: cells[index],
                index,
                alphabet: alphabet.name(),
            });
        }
        Ok(Configuration {
            width,
            height,
            alphabet,
            cells,
        })
    }

    /// Builds a binary 1D configuration from a string of `0`/`1` digits.
    pub fn from_bits(bits: &str) -> Result<Self> {
        let cells = bits
            .bytes()
            .enumerate()
            .map(|(index, b)| match b {
                b'0' => Ok(0),
                b'1' => Ok(1),
                _ => Err(Error::Alphabet {
                    value: b as i8,
                    index,
                    alphabet: "binary",
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new_1d(cells, Alphabet::Binary)
    }

    pub fn zeros(width: usize, height: usize, alphabet: Alphabet) -> Result<Self> {
        Self::new_2d(width, height, vec![0; width * height], alphabet)
    }

    /// A 1D binary configuration with a single live cell at `position`.
    pub fn single(width: usize, position: usize) -> Result<Self> {
        let mut cfg = Self::zeros(width, 1, Alphabet::Binary)?;
        if position >= width {
            return Err(Error::Index { index: position, len: width });
        }
        cfg.cells[position] = 1;
        Ok(cfg)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn into_cells(self) -> Vec<Cell> {
        self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> Cell {
        self.cells[row * self.width + col]
    }

    pub fn row(&self, row: usize) -> &[Cell] {
        &self.cells[row * self.width..(row + 1) * self.width]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Cell]> {
        self.cells.chunks(self.width)
    }

    /// Reinterprets the cells under a wider alphabet.
    pub fn with_alphabet(mut self, alphabet: Alphabet) -> Result<Self> {
        if let Some(index) = self.cells.iter().position(|&v| !alphabet.contains(v)) {
            return Err(Error::Alphabet {
                value: self.cells[index],
                index,
                alphabet: alphabet.name(),
            });
        }
        self.alphabet = alphabet;
        Ok(self)
    }

    pub fn live_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c != 0).count()
    }

    /// Cyclic shift to the right by `by` cells (1D only).
    pub fn rotate_right(&self, by: usize) -> Configuration {
        let mut out = self.clone();
        for row in out.cells.chunks_mut(self.width) {
            row.rotate_right(by % self.width);
        }
        out
    }

    /// Left-right reflection of every row.
    pub fn mirrored(&self) -> Configuration {
        let mut out = self.clone();
        for row in out.cells.chunks_mut(self.width) {
            row.reverse();
        }
        out
    }

    /// Matrix transpose.
    pub fn transposed(&self) -> Configuration {
        let mut cells = Vec::with_capacity(self.cells.len());
        for c in 0..self.width {
            for r in 0..self.height {
                cells.push(self.get(r, c));
            }
        }
        Configuration {
            width: self.height,
            height: self.width,
            alphabet: self.alphabet,
            cells,
        }
    }
}

/// Which dynamics produced a spacetime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleProvenance {
    Eca(u8),
    GameOfLife,
    Interaction { rule_a: u8, rule_b: u8, seed: u64 },
    Unknown,
}

/// Time-ordered sequence of configurations, `frames[0]` being the initial
/// state. Frames are 1D rows for ECA and 2D grids for Game of Life.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spacetime {
    frames: Vec<Configuration>,
    rule: RuleProvenance,
    seed: Option<u64>,
}

impl Spacetime {
    pub fn from_frames(frames: Vec<Configuration>, rule: RuleProvenance) -> Result<Self> {
        let first = frames.first().ok_or(Error::EmptyInput)?;
        let (w, h) = (first.width, first.height);
        if let Some(bad) = frames.iter().position(|f| f.width != w || f.height != h) {
            return Err(Error::Size(format!(
                "frame {bad} is {}x{}, expected {w}x{h}",
                frames[bad].width, frames[bad].height
            )));
        }
        Ok(Spacetime {
            frames,
            rule,
            seed: None,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn frames(&self) -> &[Configuration] {
        &self.frames
    }

    pub fn frame(&self, t: usize) -> &Configuration {
        &self.frames[t]
    }

    pub fn last(&self) -> &Configuration {
        self.frames.last().expect("spacetime is never empty")
    }

    /// Number of frames, i.e. `steps + 1`.
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn steps(&self) -> usize {
        self.frames.len() - 1
    }

    pub fn width(&self) -> usize {
        self.frames[0].width
    }

    pub fn frame_height(&self) -> usize {
        self.frames[0].height
    }

    pub fn rule(&self) -> &RuleProvenance {
        &self.rule
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// All cells, frame after frame, each frame row-major.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.frames.iter().flat_map(|f| f.cells.iter().copied())
    }

    /// Stacks the frames into one 2D array (frame-major). For 1D automata
    /// this is the usual time x space diagram.
    pub fn to_array(&self) -> Configuration {
        let alphabet = if self.frames.iter().any(|f| f.alphabet == Alphabet::Ternary) {
            Alphabet::Ternary
        } else {
            Alphabet::Binary
        };
        Configuration {
            width: self.width(),
            height: self.frames.len() * self.frame_height(),
            alphabet,
            cells: self.cells().collect(),
        }
    }

    /// Keeps frames `0..=t`.
    pub fn prefix(&self, t: usize) -> Spacetime {
        Spacetime {
            frames: self.frames[..=t.min(self.steps())].to_vec(),
            rule: self.rule.clone(),
            seed: self.seed,
        }
    }

    /// Checks that each frame follows from the previous one under `step`.
    pub fn is_consistent<F>(&self, mut step: F) -> bool
    where
        F: FnMut(&Configuration) -> Configuration,
    {
        self.frames.windows(2).all(|pair| step(&pair[0]) == pair[1])
    }
}

/// One synchronous update of a 1D binary lattice with periodic boundary.
pub fn eca_step(rule: &EcaRule, cfg: &Configuration) -> Configuration {
    let cells = &cfg.cells;
    let n = cells.len();
    let mut next = Vec::with_capacity(n);
    for i in 0..n {
        let left = cells[(i + n - 1) % n];
        let right = cells[(i + 1) % n];
        next.push(rule.apply(left, cells[i], right));
    }
    Configuration { cells: next, ..cfg.clone() }
}

/// Evolves `init` for `steps` updates under `rule`; the result holds
/// `steps + 1` rows starting with `init`.
pub fn evolve_eca(rule: &EcaRule, init: &Configuration, steps: usize) -> Result<Spacetime> {
    if steps == 0 {
        return Err(Error::Parameter("steps must be at least 1".into()));
    }
    if init.height != 1 {
        return Err(Error::Size("ECA evolution needs a 1D configuration".into()));
    }
    if let Some(index) = init.cells.iter().position(|&v| !Alphabet::Binary.contains(v)) {
        return Err(Error::Alphabet {
            value: init.cells[index],
            index,
            alphabet: "binary",
        });
    }
    let init = Configuration {
        alphabet: Alphabet::Binary,
        ..init.clone()
    };
    let mut frames = Vec::with_capacity(steps + 1);
    frames.push(init);
    for t in 0..steps {
        let next = eca_step(rule, &frames[t]);
        frames.push(next);
    }
    Spacetime::from_frames(frames, RuleProvenance::Eca(rule.number()))
}

/// One B3/S23 update on a torus.
pub fn gol_step(grid: &Configuration) -> Configuration {
    let (w, h) = (grid.width, grid.height);
    let cells = &grid.cells;
    let mut next = vec![0; cells.len()];
    for r in 0..h {
        let up = (r + h - 1) % h;
        let down = (r + 1) % h;
        for c in 0..w {
            let left = (c + w - 1) % w;
            let right = (c + 1) % w;
            let live = [
                (up, left),
                (up, c),
                (up, right),
                (r, left),
                (r, right),
                (down, left),
                (down, c),
                (down, right),
            ]
            .iter()
            .map(|&(rr, cc)| cells[rr * w + cc] as u8)
            .sum::<u8>();
            let alive = cells[r * w + c] == 1;
            next[r * w + c] = (live == 3 || (alive && live == 2)) as Cell;
        }
    }
    Configuration { cells: next, ..grid.clone() }
}

/// Runs Conway's Game of Life on a periodic grid; returns `steps + 1` grids.
pub fn evolve_gol(init: &Configuration, steps: usize) -> Result<Spacetime> {
    if steps == 0 {
        return Err(Error::Parameter("steps must be at least 1".into()));
    }
    if init.width < 3 || init.height < 3 {
        return Err(Error::Size(format!(
            "Game of Life grid must be at least 3x3, got {}x{}",
            init.width, init.height
        )));
    }
    if let Some(index) = init.cells.iter().position(|&v| !Alphabet::Binary.contains(v)) {
        return Err(Error::Alphabet {
            value: init.cells[index],
            index,
            alphabet: "binary",
        });
    }
    let mut frames = Vec::with_capacity(steps + 1);
    frames.push(init.clone());
    for t in 0..steps {
        let next = gol_step(&frames[t]);
        frames.push(next);
    }
    Spacetime::from_frames(frames, RuleProvenance::GameOfLife)
}

/// Advances a grid `steps` times without keeping the history.
pub fn advance_gol(init: &Configuration, steps: usize) -> Configuration {
    (0..steps).fold(init.clone(), |g, _| gol_step(&g))
}

fn check_density(density: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::Parameter(format!("density {density} is outside [0, 1]")));
    }
    Ok(())
}

/// Random binary 1D configuration; each cell is 1 with probability `density`,
/// drawn from the stream keyed by `seed`.
pub fn random_config(seed: u64, width: usize, density: f64) -> Result<Configuration> {
    random_grid(seed, width, 1, density)
}

/// Random binary `height x width` grid, filled row-major from the stream keyed
/// by `seed`.
pub fn random_grid(seed: u64, width: usize, height: usize, density: f64) -> Result<Configuration> {
    check_density(density)?;
    if width == 0 || height == 0 {
        return Err(Error::Size(format!("lattice must be non-empty, got {width}x{height}")));
    }
    let mut rng = rng::stream(Experiment::Config, seed);
    let cells = (0..width * height)
        .map(|_| rng::bernoulli(&mut rng, density) as Cell)
        .collect();
    Configuration::new_2d(width, height, cells, Alphabet::Binary)
}

/// Complements the binary cell at flat index `index`.
pub fn flip_cell(config: &Configuration, index: usize) -> Result<Configuration> {
    if config.alphabet != Alphabet::Binary {
        return Err(Error::Parameter("flip_cell needs a binary configuration".into()));
    }
    if index >= config.cells.len() {
        return Err(Error::Index {
            index,
            len: config.cells.len(),
        });
    }
    let mut out = config.clone();
    out.cells[index] ^= 1;
    Ok(out)
}
