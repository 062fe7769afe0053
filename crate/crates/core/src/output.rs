//! CSV and PGM files for experiment results.
//!
//! CSV files start with `#`-prefixed `key=value` lines echoing the run
//! configuration, then a header row. Lines end in LF and reals carry six
//! fractional digits. Spacetimes are written as plain PGM with maxval 2, one
//! image row per time step; `-1` cells are written as `2`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::ca::{Alphabet, Cell, Configuration};
use crate::collision::CollisionReport;
use crate::error::{Error, Result};
use crate::perturbation::{GolReport, SweepResult};

pub const SWEEP_SCHEMA: &[&str] = &["rule", "seed", "flip_pos", "delta_bdm", "delta_lzw_bytes", "delta_entropy"];
pub const SWEEP_MEAN_SCHEMA: &[&str] = &[
    "rule",
    "flip_pos",
    "mean_delta_bdm",
    "mean_delta_lzw_bytes",
    "mean_delta_entropy",
];
pub const GOL_SCHEMA: &[&str] = &[
    "seed",
    "flip_row",
    "flip_col",
    "delta_bdm",
    "delta_lzw_bytes",
    "delta_entropy",
    "bdm_unperturbed",
    "bdm_perturbed",
    "delta_bdm_final",
    "lzw_unperturbed",
    "lzw_perturbed",
];
pub const COLLISION_SCHEMA: &[&str] = &[
    "rule_a",
    "rule_b",
    "interaction_seed",
    "bdm_collision",
    "bdm_a_iso",
    "bdm_b_iso",
    "delta_bdm_a",
    "delta_bdm_b",
    "lzw_collision",
    "lzw_a_iso",
    "lzw_b_iso",
    "delta_lzw_a",
    "delta_lzw_b",
];
pub const TRACE_SCHEMA: &[&str] = &["step", "delta_bdm"];

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Real(f64),
    Text(String),
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v as i64)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<u8> for Value {
    fn from(v: u8) -> Self {
        Value::Int(v.into())
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Real(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

pub type Row = Vec<Value>;

/// Six fractional digits, with negative zero printed as zero.
pub fn format_real(v: f64) -> String {
    let s = format!("{v:.6}");
    if s.starts_with('-') && s[1..].bytes().all(|c| c == b'0' || c == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn format_value(v: &Value) -> String {
    match v {
        Value::Int(i) => i.to_string(),
        Value::Real(r) => format_real(*r),
        Value::Text(t) => t.clone(),
    }
}

/// Renders a complete CSV document.
pub fn csv_text(config: &[(String, String)], schema: &[&str], rows: &[Row]) -> Result<String> {
    let mut out = String::new();
    for (k, v) in config {
        if k.contains(['\n', '=']) || v.contains('\n') {
            return Err(Error::Parameter(format!("config entry {k:?} cannot be echoed on one line")));
        }
        let _ = writeln!(out, "# {k}={v}");
    }
    out.push_str(&schema.join(","));
    out.push('\n');
    for (i, row) in rows.iter().enumerate() {
        if row.len() != schema.len() {
            return Err(Error::Parameter(format!(
                "row {i} has {} fields, schema has {}",
                row.len(),
                schema.len()
            )));
        }
        let fields: Vec<String> = row.iter().map(format_value).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn emit_csv(path: &Path, config: &[(String, String)], schema: &[&str], rows: &[Row]) -> Result<()> {
    let text = csv_text(config, schema, rows)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn sweep_rows(sweep: &SweepResult) -> Vec<Row> {
    sweep
        .reports
        .iter()
        .map(|r| {
            vec![
                r.rule.into(),
                r.seed.unwrap_or(0).into(),
                r.flip_pos.unwrap_or(0).into(),
                r.delta_bdm().into(),
                r.delta_lzw_bytes().into(),
                r.delta_entropy().into(),
            ]
        })
        .collect()
}

pub fn sweep_mean_rows(sweep: &SweepResult) -> Vec<Row> {
    let mut rows = Vec::with_capacity(sweep.rules.len() * sweep.width);
    for (ri, &rule) in sweep.rules.iter().enumerate() {
        for pos in 0..sweep.width {
            rows.push(vec![
                rule.into(),
                pos.into(),
                sweep.mean_delta_bdm[ri][pos].into(),
                sweep.mean_delta_lzw_bytes[ri][pos].into(),
                sweep.mean_delta_entropy[ri][pos].into(),
            ]);
        }
    }
    rows
}

/// One heatmap matrix as CSV rows: the rule, then one column per position.
pub fn heatmap_rows(rules: &[u8], matrix: &[Vec<f64>]) -> Vec<Row> {
    rules
        .iter()
        .zip(matrix)
        .map(|(&rule, row)| {
            let mut r: Row = vec![rule.into()];
            r.extend(row.iter().map(|&v| Value::Real(v)));
            r
        })
        .collect()
}

pub fn heatmap_schema(width: usize) -> Vec<String> {
    std::iter::once("rule".to_string())
        .chain((0..width).map(|p| format!("p{p}")))
        .collect()
}

pub fn gol_rows(reports: &[GolReport]) -> Vec<Row> {
    reports
        .iter()
        .map(|r| {
            vec![
                r.seed.into(),
                r.flip_pos.0.into(),
                r.flip_pos.1.into(),
                r.delta_bdm_volume().into(),
                r.delta_lzw_bytes().into(),
                r.delta_entropy().into(),
                r.bdm_volume.0.into(),
                r.bdm_volume.1.into(),
                r.delta_bdm_final().into(),
                r.lzw_bytes.0.into(),
                r.lzw_bytes.1.into(),
            ]
        })
        .collect()
}

pub fn collision_rows(reports: &[CollisionReport]) -> Vec<Row> {
    reports
        .iter()
        .map(|c| {
            vec![
                c.rule_a.into(),
                c.rule_b.into(),
                c.interaction_seed.into(),
                c.bdm_collision.into(),
                c.bdm_a_iso.into(),
                c.bdm_b_iso.into(),
                c.delta_bdm_a().into(),
                c.delta_bdm_b().into(),
                c.lzw_collision.into(),
                c.lzw_a_iso.into(),
                c.lzw_b_iso.into(),
                c.delta_lzw_a().into(),
                c.delta_lzw_b().into(),
            ]
        })
        .collect()
}

pub fn trace_rows(trace: &[(usize, f64)]) -> Vec<Row> {
    trace.iter().map(|&(t, d)| vec![t.into(), d.into()]).collect()
}

fn pixel(c: Cell) -> Result<u8> {
    match c {
        0 => Ok(0),
        1 => Ok(1),
        -1 => Ok(2),
        other => Err(Error::Parameter(format!("cell value {other} has no PGM level"))),
    }
}

/// Plain PGM of `rows`, each a sequence of cells of equal length.
pub fn pgm_text<'a>(rows: impl IntoIterator<Item = &'a [Cell]>) -> Result<String> {
    let rows: Vec<&[Cell]> = rows.into_iter().collect();
    let width = rows.first().map_or(0, |r| r.len());
    if width == 0 {
        return Err(Error::EmptyInput);
    }
    let mut out = format!("P2\n{width} {}\n2\n", rows.len());
    for row in &rows {
        if row.len() != width {
            return Err(Error::Size("PGM rows differ in length".into()));
        }
        let px = row.iter().map(|&c| pixel(c).map(|p| p.to_string())).collect::<Result<Vec<_>>>()?;
        out.push_str(&px.join(" "));
        out.push('\n');
    }
    Ok(out)
}

/// Writes the frames of a spacetime one after another, each frame
/// contributing its rows.
pub fn emit_pgm<'a>(frames: impl IntoIterator<Item = &'a Configuration>, path: &Path) -> Result<()> {
    let frames: Vec<&Configuration> = frames.into_iter().collect();
    let text = pgm_text(frames.iter().flat_map(|f| f.rows()))?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Parses a plain PGM with maxval at most 2 back into cells (`2` becomes `-1`).
pub fn parse_pgm(text: &str) -> Result<Configuration> {
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    let bad = |m: &str| Error::Parameter(format!("malformed PGM: {m}"));
    if tokens.next() != Some("P2") {
        return Err(bad("missing P2 magic"));
    }
    let mut num = |what: &str| -> Result<usize> {
        tokens
            .next()
            .ok_or_else(|| bad(&format!("missing {what}")))?
            .parse()
            .map_err(|_| bad(&format!("bad {what}")))
    };
    let width = num("width")?;
    let height = num("height")?;
    let maxval = num("maxval")?;
    if maxval == 0 || maxval > 2 {
        return Err(bad("maxval must be 1 or 2"));
    }
    let mut cells = Vec::with_capacity(width * height);
    for _ in 0..width * height {
        let v = num("pixel")?;
        cells.push(match v {
            0 => 0,
            1 => 1,
            2 if maxval == 2 => -1,
            _ => return Err(bad("pixel out of range")),
        });
    }
    if tokens.next().is_some() {
        return Err(bad("trailing data"));
    }
    let alphabet = if cells.contains(&-1) { Alphabet::Ternary } else { Alphabet::Binary };
    Configuration::new_2d(width, height, cells, alphabet)
}

/// Parses a text array: one row per non-empty line, one digit per cell
/// (`0`, `1`, or `2` for `-1`); spaces and commas between digits are ignored.
pub fn parse_digits(text: &str) -> Result<Configuration> {
    let mut cells = Vec::new();
    let mut width = None;
    let mut height = 0;
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let row = line
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                '2' => Ok(-1),
                other => Err(Error::Parameter(format!("unexpected character {other:?} in array"))),
            })
            .collect::<Result<Vec<Cell>>>()?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => return Err(Error::Size("array rows differ in length".into())),
            _ => {}
        }
        cells.extend(row);
        height += 1;
    }
    let width = width.ok_or(Error::EmptyInput)?;
    let alphabet = if cells.contains(&-1) { Alphabet::Ternary } else { Alphabet::Binary };
    Configuration::new_2d(width, height, cells, alphabet)
}

/// Reads an array file, PGM if it starts with `P2`, digit text otherwise.
pub fn read_array(path: &Path) -> Result<Configuration> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if text.trim_start().starts_with("P2") {
        parse_pgm(&text)
    } else {
        parse_digits(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg() -> Vec<(String, String)> {
        vec![("cmd".into(), "test".into()), ("seeds".into(), "3".into())]
    }

    #[test]
    fn empty_rows_give_echo_and_header() {
        let text = csv_text(&cfg(), SWEEP_SCHEMA, &[]).unwrap();
        assert_eq!(
            text,
            "# cmd=test\n# seeds=3\nrule,seed,flip_pos,delta_bdm,delta_lzw_bytes,delta_entropy\n"
        );
    }

    #[test]
    fn reals_have_six_digits() {
        assert_eq!(format_real(1.0), "1.000000");
        assert_eq!(format_real(-0.0), "0.000000");
        assert_eq!(format_real(-1e-9), "0.000000");
        assert_eq!(format_real(-2.5), "-2.500000");
        let rows = vec![vec![Value::from(30u8), 2u64.into(), 7usize.into(), 1.5.into(), (-3i64).into(), 0.25.into()]];
        let text = csv_text(&[], SWEEP_SCHEMA, &rows).unwrap();
        assert!(text.ends_with("30,2,7,1.500000,-3,0.250000\n"));
    }

    #[test]
    fn row_width_is_checked() {
        let rows = vec![vec![Value::from(1u8)]];
        assert!(csv_text(&[], SWEEP_SCHEMA, &rows).is_err());
        assert!(csv_text(&[("a\nb".into(), "x".into())], SWEEP_SCHEMA, &[]).is_err());
    }

    #[test]
    fn pgm_format() {
        let zero: Vec<Cell> = vec![0, 0, 0];
        let text = pgm_text([&zero[..], &zero[..]]).unwrap();
        assert_eq!(text, "P2\n3 2\n2\n0 0 0\n0 0 0\n");
        let mixed: Vec<Cell> = vec![1, -1, 0];
        assert_eq!(pgm_text([&mixed[..]]).unwrap(), "P2\n3 1\n2\n1 2 0\n");
        let bad: Vec<Cell> = vec![3];
        assert!(pgm_text([&bad[..]]).is_err());
    }

    #[test]
    fn emit_and_read_back() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("st.pgm");
        let frames = [
            Configuration::new_1d(vec![0, 1, -1], Alphabet::Ternary).unwrap(),
            Configuration::new_1d(vec![1, 1, 0], Alphabet::Ternary).unwrap(),
        ];
        emit_pgm(&frames, &path).unwrap();
        let back = read_array(&path).unwrap();
        assert_eq!((back.width(), back.height()), (3, 2));
        assert_eq!(back.cells(), &[0, 1, -1, 1, 1, 0]);
        assert!(emit_pgm(&frames, &dir.path().join("missing/x.pgm")).is_err());
    }

    #[test]
    fn digit_text() {
        let c = parse_digits("010\n1 1 2\n").unwrap();
        assert_eq!(c.cells(), &[0, 1, 0, 1, 1, -1]);
        assert_eq!(c.alphabet(), Alphabet::Ternary);
        assert!(parse_digits("01\n1\n").is_err());
        assert!(parse_digits("0x").is_err());
        assert!(parse_digits("\n").is_err());
    }

    #[test]
    fn malformed_pgm() {
        assert!(parse_pgm("P5\n1 1\n2\n0\n").is_err());
        assert!(parse_pgm("P2\n2 1\n2\n0\n").is_err());
        assert!(parse_pgm("P2\n1 1\n1\n2\n").is_err());
        assert!(parse_pgm("P2\n1 1\n2\n0 0\n").is_err());
        assert_eq!(parse_pgm("P2\n# c\n1 1\n2\n2\n").unwrap().cells(), &[-1]);
    }

    proptest! {
        #[test]
        fn pgm_round_trip(w in 1usize..12, h in 1usize..8, seed in any::<u64>()) {
            let mut x = seed;
            let cells: Vec<Cell> = (0..w * h)
                .map(|_| {
                    x = crate::rng::splitmix64(x);
                    (x % 3) as Cell - 1
                })
                .collect();
            let rows: Vec<&[Cell]> = cells.chunks(w).collect();
            let back = parse_pgm(&pgm_text(rows).unwrap()).unwrap();
            prop_assert_eq!(back.cells(), &cells[..]);
            prop_assert_eq!((back.width(), back.height()), (w, h));
        }
    }
}
