//! One-variable slope fields `u` and the popularity machinery built on them.
//!
//! A field of resolution `n` assigns to each of the `2^n` columns of width
//! `w = 2^-n` a slope cell at level `n`; coarser membership is containment of
//! that cell in a coarser cell. Popularity of a slope `s` in an interval `I`
//! is the exact fraction of columns of `I` whose cell sits inside `s`, and
//! the allowable slopes of `I` are the cells at level `log2(|I|/w)` whose
//! popularity clears the threshold `delta` (inclusively — the comparison is
//! an exact rational one, never floating point).

use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dyadic::{Dyadic, DyadicInterval, Gridline, SlopeCell};
use crate::error::Error;

/// A step-function slope field: column `i` of width `2^-n` carries the
/// level-`n` slope cell with index `cells[i]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OneVarField {
    n: u32,
    cells: Vec<u64>,
}

impl OneVarField {
    pub fn new(n: u32, cells: Vec<u64>) -> Result<OneVarField, Error> {
        if n == 0 || n > 24 {
            return Err(Error::BadParameter(format!("field resolution n={n} outside 1..=24")));
        }
        if cells.len() != 1usize << n {
            return Err(Error::FieldFormat(format!(
                "expected {} cells for n={}, got {}",
                1usize << n,
                n,
                cells.len()
            )));
        }
        if let Some(bad) = cells.iter().find(|&&c| c >= (1u64 << n)) {
            return Err(Error::FieldFormat(format!("cell index {bad} out of range for n={n}")));
        }
        Ok(OneVarField { n, cells })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Column width `w = 2^-n`.
    pub fn w(&self) -> Dyadic {
        Dyadic::inv_pow2(self.n)
    }

    pub fn num_columns(&self) -> usize {
        self.cells.len()
    }

    pub fn cell_index(&self, column: usize) -> u64 {
        self.cells[column]
    }

    pub fn cell(&self, column: usize) -> SlopeCell {
        SlopeCell::new(self.n, self.cells[column])
    }

    /// Slope value of the field on a column (the cell midpoint).
    pub fn value(&self, column: usize) -> Dyadic {
        self.cell(column).value()
    }

    /// The columns spanned by a standard dyadic interval `I`.
    pub fn columns_of(&self, i: &DyadicInterval) -> Result<std::ops::Range<usize>, Error> {
        assert_eq!(i.grid, Gridline::Standard);
        if i.level > self.n {
            return Err(Error::ResolutionExceeded { field_n: self.n, requested: i.level });
        }
        let span = 1usize << (self.n - i.level);
        let start = i.index as usize * span;
        Ok(start..start + span)
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> Result<(), Error> {
        // Keys in the documented order: n first, then cells.
        let cells: Vec<String> = self.cells.iter().map(|c| c.to_string()).collect();
        writeln!(w, "{{\"n\": {}, \"cells\": [{}]}}", self.n, cells.join(", "))?;
        Ok(())
    }

    pub fn read_json<R: Read>(mut r: R) -> Result<OneVarField, Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: u32,
            cells: Vec<u64>,
        }
        let mut buf = String::new();
        r.read_to_string(&mut buf)?;
        let raw: Raw = serde_json::from_str(&buf)
            .map_err(|e| Error::FieldFormat(format!("line {}, column {}: {}", e.line(), e.column(), e)))?;
        OneVarField::new(raw.n, raw.cells)
    }

    pub fn save(&self, path: &Path) -> Result<(), Error> {
        let f = std::fs::File::create(path)?;
        self.write_json(std::io::BufWriter::new(f))
    }

    pub fn load(path: &Path) -> Result<OneVarField, Error> {
        let f = std::fs::File::open(path)?;
        OneVarField::read_json(std::io::BufReader::new(f))
    }
}

/// Deterministic field generators. The same spec (including seed) always
/// produces the same field.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldGenSpec {
    /// `u` constant equal to the given level-`n` cell.
    Constant { cell: u64 },
    /// Independent uniform cells from a seeded ChaCha stream.
    IidUniform { seed: u64 },
    /// Alternating blocks of two cells; `block` columns per block.
    TwoValue { a: u64, b: u64, #[serde(default = "default_block")] block: usize },
    /// Popularity concentrated along the nested cell chain of `1/3`, with a
    /// deviation depth that halves per dyadic block; stresses the forest's
    /// ancestor-exclusion rule at every scale.
    CantorLacunary,
    /// `u` monotone in the column index: column `i` gets cell `i`.
    Staircase,
    /// Load the field from a field file; `n` must match.
    FromFile { path: String },
}

fn default_block() -> usize {
    1
}

impl FieldGenSpec {
    /// A short deterministic name used in reports and file names.
    pub fn label(&self) -> String {
        match self {
            FieldGenSpec::Constant { cell } => format!("constant{cell}"),
            FieldGenSpec::IidUniform { seed } => format!("iid{seed}"),
            FieldGenSpec::TwoValue { a, b, block } => format!("two{a}-{b}x{block}"),
            FieldGenSpec::CantorLacunary => "cantor".to_string(),
            FieldGenSpec::Staircase => "staircase".to_string(),
            FieldGenSpec::FromFile { .. } => "file".to_string(),
        }
    }
}

/// Generates the deterministic field of resolution `2^-n` described by
/// `spec`. Cell parameters are taken modulo the resolution so one spec can be
/// reused across a sweep over `n`.
pub fn gen_field(spec: &FieldGenSpec, n: u32) -> Result<OneVarField, Error> {
    if n == 0 {
        return Err(Error::BadParameter("field resolution n must be >= 1".into()));
    }
    let cols = 1usize << n;
    let mask = (1u64 << n) - 1;
    let cells = match spec {
        FieldGenSpec::Constant { cell } => vec![cell & mask; cols],
        FieldGenSpec::IidUniform { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..cols).map(|_| rng.gen_range(0..=mask)).collect()
        }
        FieldGenSpec::TwoValue { a, b, block } => {
            if *block == 0 {
                return Err(Error::BadParameter("two-value block length must be >= 1".into()));
            }
            (0..cols).map(|i| if (i / block) % 2 == 0 { a & mask } else { b & mask }).collect()
        }
        FieldGenSpec::CantorLacunary => cantor_lacunary(n),
        FieldGenSpec::Staircase => (0..cols as u64).collect(),
        FieldGenSpec::FromFile { path } => {
            let field = OneVarField::load(Path::new(path))?;
            if field.n() != n {
                return Err(Error::FieldFormat(format!(
                    "file {} has resolution n={}, expected n={}",
                    path,
                    field.n(),
                    n
                )));
            }
            return Ok(field);
        }
    };
    OneVarField::new(n, cells)
}

/// Columns in the dyadic block `[2^{n-j}, 2^{n-j+1})` carry the cell that
/// follows the chain of `1/3` down to depth `j-1` and then flips the depth-`j`
/// bit, so the popularity of the depth-`j` chain cell is exactly `2^-j`.
fn cantor_lacunary(n: u32) -> Vec<u64> {
    let chain = (1u64 << n) / 3; // level-n index of the cell containing 1/3
    let cols = 1usize << n;
    let mut cells = vec![chain; cols]; // column 0 keeps the chain cell itself
    for j in 1..=n {
        let value = chain ^ (1u64 << (n - j));
        let start = 1usize << (n - j);
        let end = 1usize << (n - j + 1);
        for c in &mut cells[start..end] {
            *c = value;
        }
    }
    cells
}

/// `Pop_I(s)`: the exact fraction of the columns of `I` whose field cell is
/// contained in `s`.
pub fn pop(i: &DyadicInterval, s: &SlopeCell, u: &OneVarField) -> Result<Dyadic, Error> {
    let range = u.columns_of(i)?;
    let count = count_matching(u, range, s);
    let p = Dyadic::new(count, 0).mul_pow2(-((u.n() - i.level) as i32));
    debug_assert!(p >= Dyadic::ZERO && p <= Dyadic::ONE);
    Ok(p)
}

fn count_matching(u: &OneVarField, range: std::ops::Range<usize>, s: &SlopeCell) -> i128 {
    if s.level > u.n() {
        return 0;
    }
    let shift = u.n() - s.level;
    range.filter(|&c| (u.cell_index(c) >> shift) == s.index).count() as i128
}

/// `S(I)`: the cells at level `log2(|I|/w)` whose popularity in `I` is at
/// least `delta`. At `|I| = w` this is always `{[0,1]}`.
pub fn allowable_slopes(
    i: &DyadicInterval,
    u: &OneVarField,
    delta: Dyadic,
) -> Result<Vec<SlopeCell>, Error> {
    if delta <= Dyadic::ZERO || delta > Dyadic::ONE {
        return Err(Error::BadParameter(format!("delta {delta} outside (0,1]")));
    }
    let range = u.columns_of(i)?;
    let level = u.n() - i.level; // slope level for intervals of this size
    let mut counts = vec![0i128; 1usize << level];
    let shift = u.n() - level;
    for c in range.clone() {
        counts[(u.cell_index(c) >> shift) as usize] += 1;
    }
    // Pop >= delta  <=>  count * 2^-(n - i.level) >= delta, all exact.
    let scale = -((u.n() - i.level) as i32);
    let out: Vec<SlopeCell> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| Dyadic::new(c, 0).mul_pow2(scale) >= delta)
        .map(|(j, _)| SlopeCell::new(level, j as u64))
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    /// The worked 8-column example used across the crate's tests.
    pub fn sample_field() -> OneVarField {
        OneVarField::new(3, vec![0, 0, 1, 3, 3, 3, 7, 7]).unwrap()
    }

    fn unit() -> DyadicInterval {
        DyadicInterval::unit()
    }

    #[test]
    fn generators_are_deterministic() {
        let a = gen_field(&FieldGenSpec::IidUniform { seed: 7 }, 3).unwrap();
        let b = gen_field(&FieldGenSpec::IidUniform { seed: 7 }, 3).unwrap();
        assert_eq!(a, b);
        let c = gen_field(&FieldGenSpec::IidUniform { seed: 8 }, 3).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn generator_shapes() {
        let f = gen_field(&FieldGenSpec::Constant { cell: 3 }, 3).unwrap();
        assert_eq!(f.cells, vec![3; 8]);
        let f = gen_field(&FieldGenSpec::Staircase, 2).unwrap();
        assert_eq!(f.cells, vec![0, 1, 2, 3]);
        let f = gen_field(&FieldGenSpec::TwoValue { a: 1, b: 6, block: 2 }, 3).unwrap();
        assert_eq!(f.cells, vec![1, 1, 6, 6, 1, 1, 6, 6]);
    }

    #[test]
    fn cantor_popularity_is_lacunary() {
        let n = 6;
        let f = gen_field(&FieldGenSpec::CantorLacunary, n).unwrap();
        let chain = (1u64 << n) / 3;
        // The depth-j chain cell has popularity exactly 2^-j in [0,1].
        for j in 1..=n {
            let s = SlopeCell::new(n, chain).ancestor(j);
            assert_eq!(pop(&unit(), &s, &f).unwrap(), Dyadic::inv_pow2(j));
        }
    }

    #[test]
    fn pop_worked_example() {
        let u = sample_field();
        // s = [0, 1/4): cells 0, 0, 1 lie inside.
        let s = SlopeCell::new(2, 0);
        assert_eq!(pop(&unit(), &s, &u).unwrap(), Dyadic::new(3, -3));
        // s = [3/8, 1/2) at level 3.
        let s = SlopeCell::new(3, 3);
        assert_eq!(pop(&unit(), &s, &u).unwrap(), Dyadic::new(3, -3));
        // Constant field: pop is 1 or 0 according to containment.
        let c = gen_field(&FieldGenSpec::Constant { cell: 5 }, 3).unwrap();
        assert_eq!(pop(&unit(), &SlopeCell::new(1, 1), &c).unwrap(), Dyadic::ONE);
        assert_eq!(pop(&unit(), &SlopeCell::new(1, 0), &c).unwrap(), Dyadic::ZERO);
    }

    #[test]
    fn pop_rejects_too_fine_intervals() {
        let u = sample_field();
        let i = DyadicInterval::standard(4, 0);
        assert!(pop(&i, &SlopeCell::new(0, 0), &u).is_err());
    }

    #[test]
    fn allowable_worked_example() {
        let u = sample_field();
        let got = allowable_slopes(&unit(), &u, Dyadic::new(1, -2)).unwrap();
        let want: Vec<SlopeCell> =
            [0u64, 3, 7].iter().map(|&j| SlopeCell::new(3, j)).collect();
        assert_eq!(got, want);

        // |I| = w: always exactly {[0,1]}.
        let leaf = DyadicInterval::standard(3, 5);
        assert_eq!(allowable_slopes(&leaf, &u, Dyadic::ONE).unwrap(), vec![SlopeCell::new(0, 0)]);

        // Constant field at delta = 1: only the exact cell.
        let c = gen_field(&FieldGenSpec::Constant { cell: 5 }, 3).unwrap();
        assert_eq!(allowable_slopes(&unit(), &c, Dyadic::ONE).unwrap(), vec![SlopeCell::new(3, 5)]);

        assert!(allowable_slopes(&unit(), &u, Dyadic::ZERO).is_err());
    }

    /// Monotonicity, additivity over children, partition, and the 1/delta
    /// cardinality bound, over random fields.
    #[test]
    fn popularity_invariants_randomized() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for trial in 0..40 {
            let n = rng.gen_range(2..=6);
            let u = gen_field(&FieldGenSpec::IidUniform { seed: 1000 + trial }, n).unwrap();
            for level in 0..=n {
                for idx in 0..(1u64 << level) {
                    let i = DyadicInterval::standard(level, idx);
                    // Partition: sum over S_k of pop is exactly 1 for k <= n.
                    for k in 0..=(n - level).min(n) {
                        let mut total = Dyadic::ZERO;
                        for s in crate::dyadic::slope_grid(k) {
                            total += pop(&i, &s, &u).unwrap();
                        }
                        assert_eq!(total, Dyadic::ONE);
                    }
                    // Monotonicity in s: parent cell dominates child cell.
                    let s = SlopeCell::new(n, rng.gen_range(0..(1u64 << n)));
                    for k in (1..=n).rev() {
                        let child = s.ancestor(k);
                        let parent = s.ancestor(k - 1);
                        assert!(pop(&i, &parent, &u).unwrap() >= pop(&i, &child, &u).unwrap());
                    }
                    // Additivity over the two children of I.
                    if level < n {
                        let (l, r) = i.children();
                        let k = 2u32.min(n);
                        let s = SlopeCell::new(k, rng.gen_range(0..(1u64 << k)));
                        let whole = pop(&i, &s, &u).unwrap() * i.len();
                        let parts = pop(&l, &s, &u).unwrap() * l.len()
                            + pop(&r, &s, &u).unwrap() * r.len();
                        assert_eq!(whole, parts);
                    }
                    // |S(I)| <= floor(1/delta).
                    for dlog in 1..=3 {
                        let delta = Dyadic::inv_pow2(dlog);
                        let s = allowable_slopes(&i, &u, delta).unwrap();
                        assert!(s.len() <= 1usize << dlog);
                    }
                }
            }
        }
    }

    #[test]
    fn field_io_round_trip() {
        let u = sample_field();
        let mut buf = Vec::new();
        u.write_json(&mut buf).unwrap();
        let back = OneVarField::read_json(buf.as_slice()).unwrap();
        assert_eq!(u, back);
    }

    #[test]
    fn field_io_rejects_malformed() {
        // Wrong length.
        let err = OneVarField::read_json(r#"{"n": 3, "cells": [0,1,2,3,4,5,6]}"#.as_bytes());
        assert!(matches!(err, Err(Error::FieldFormat(_))));
        // Cell out of range.
        let err = OneVarField::read_json(r#"{"n": 3, "cells": [0,1,2,3,4,5,6,8]}"#.as_bytes());
        assert!(matches!(err, Err(Error::FieldFormat(_))));
        // Parse error carries position info.
        let err = OneVarField::read_json("{\"n\": 3,\n  \"cells\": [0,1,]}".as_bytes());
        match err {
            Err(Error::FieldFormat(msg)) => assert!(msg.contains("line 2"), "{msg}"),
            other => panic!("expected format error, got {other:?}"),
        }
    }
}

#[cfg(test)]
pub use tests::sample_field;
