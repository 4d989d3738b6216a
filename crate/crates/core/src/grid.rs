//! Grid test functions: nonnegative piecewise-constant functions on the unit
//! square, constant on dyadic x-columns with dyadic y-breakpoints.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::dyadic::{Dyadic, Rat};
use crate::error::Error;

/// One column's vertical profile: `vals[i]` on `[breaks[i], breaks[i+1])`,
/// zero outside `[breaks.first(), breaks.last())`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ColumnProfile {
    pub breaks: Vec<Dyadic>,
    pub vals: Vec<Dyadic>,
}

impl ColumnProfile {
    fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    fn eval(&self, y: Dyadic) -> Dyadic {
        if self.is_empty() || y < self.breaks[0] || y >= *self.breaks.last().unwrap() {
            return Dyadic::ZERO;
        }
        let idx = match self.breaks.binary_search(&y) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        self.vals[idx.min(self.vals.len() - 1)]
    }

    fn eval_rat(&self, y: &Rat) -> Dyadic {
        if self.is_empty()
            || *y < self.breaks[0].to_rat()
            || *y >= self.breaks.last().unwrap().to_rat()
        {
            return Dyadic::ZERO;
        }
        let mut idx =
            match self.breaks.binary_search_by(|b| b.to_rat().partial_cmp(y).unwrap()) {
                Ok(i) => i,
                Err(i) => i - 1,
            };
        idx = idx.min(self.vals.len() - 1);
        self.vals[idx]
    }

    fn integral_pow(&self, p: u32) -> Dyadic {
        let mut total = Dyadic::ZERO;
        for i in 0..self.vals.len() {
            total += (self.breaks[i + 1] - self.breaks[i]) * self.vals[i].pow(p);
        }
        total
    }

    fn integral_pow_f64(&self, p: f64) -> f64 {
        let mut total = 0.0;
        for i in 0..self.vals.len() {
            total += (self.breaks[i + 1] - self.breaks[i]).to_f64() * self.vals[i].to_f64().powf(p);
        }
        total
    }
}

/// A nonnegative grid function supported in the unit square: `2^col_level`
/// equal columns, each with its own dyadic step profile in `y`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GridFunction {
    col_level: u32,
    cols: Vec<ColumnProfile>,
}

impl GridFunction {
    pub fn new(col_level: u32, cols: Vec<ColumnProfile>) -> GridFunction {
        assert_eq!(cols.len(), 1usize << col_level);
        for c in &cols {
            assert_eq!(c.breaks.len(), c.vals.len() + (!c.is_empty()) as usize);
            assert!(c.breaks.windows(2).all(|w| w[0] < w[1]));
            if !c.is_empty() {
                assert!(c.breaks[0] >= Dyadic::ZERO && *c.breaks.last().unwrap() <= Dyadic::ONE);
            }
            assert!(c.vals.iter().all(|v| !v.is_negative()));
        }
        GridFunction { col_level, cols }
    }

    pub fn zero() -> GridFunction {
        GridFunction { col_level: 0, cols: vec![ColumnProfile::default()] }
    }

    pub fn constant(value: Dyadic) -> GridFunction {
        assert!(!value.is_negative());
        let profile = ColumnProfile { breaks: vec![Dyadic::ZERO, Dyadic::ONE], vals: vec![value] };
        GridFunction { col_level: 0, cols: vec![profile] }
    }

    /// Indicator of the dyadic square `[ix, ix+1) x [iy, iy+1)` at `level`.
    pub fn indicator_square(level: u32, ix: u64, iy: u64) -> GridFunction {
        assert!(ix < (1u64 << level) && iy < (1u64 << level));
        let lo = Dyadic::new(iy as i128, -(level as i32));
        let hi = Dyadic::new(iy as i128 + 1, -(level as i32));
        let mut cols = vec![ColumnProfile::default(); 1usize << level];
        cols[ix as usize] = ColumnProfile { breaks: vec![lo, hi], vals: vec![Dyadic::ONE] };
        GridFunction { col_level: level, cols }
    }

    /// Indicator of the horizontal strip `[0,1) x [iy/2^level, (iy+1)/2^level)`.
    pub fn h_strip(level: u32, iy: u64) -> GridFunction {
        assert!(iy < (1u64 << level));
        let lo = Dyadic::new(iy as i128, -(level as i32));
        let hi = Dyadic::new(iy as i128 + 1, -(level as i32));
        let profile = ColumnProfile { breaks: vec![lo, hi], vals: vec![Dyadic::ONE] };
        GridFunction { col_level: 0, cols: vec![profile] }
    }

    /// Indicator of the vertical strip `[ix/2^level, (ix+1)/2^level) x [0,1)`.
    pub fn v_strip(level: u32, ix: u64) -> GridFunction {
        assert!(ix < (1u64 << level));
        let mut cols = vec![ColumnProfile::default(); 1usize << level];
        cols[ix as usize] =
            ColumnProfile { breaks: vec![Dyadic::ZERO, Dyadic::ONE], vals: vec![Dyadic::ONE] };
        GridFunction { col_level: level, cols }
    }

    /// Random nonnegative dyadic values (multiples of 1/16 up to 2) on the
    /// cells of a `2^level x 2^level` grid, from a seeded stream.
    pub fn random(seed: u64, level: u32) -> GridFunction {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let cells = 1usize << level;
        let cols = (0..cells)
            .map(|_| {
                let breaks = (0..=cells)
                    .map(|i| Dyadic::new(i as i128, -(level as i32)))
                    .collect();
                let vals = (0..cells).map(|_| Dyadic::new(rng.gen_range(0..=32), -4)).collect();
                ColumnProfile { breaks, vals }
            })
            .collect();
        GridFunction { col_level: level, cols }
    }

    pub fn col_level(&self) -> u32 {
        self.col_level
    }

    /// The profile over the w-column `col` of a finer resolution `n`.
    pub fn profile_for(&self, n: u32, col: usize) -> &ColumnProfile {
        assert!(n >= self.col_level);
        &self.cols[col >> (n - self.col_level)]
    }

    pub fn eval(&self, x: Dyadic, y: Dyadic) -> Dyadic {
        if x < Dyadic::ZERO || x > Dyadic::ONE {
            return Dyadic::ZERO;
        }
        let mut col = x.mul_pow2(self.col_level as i32).floor_int() as usize;
        col = col.min(self.cols.len() - 1); // x = 1 joins the last column
        self.cols[col].eval(y)
    }

    pub fn eval_rat(&self, x: &Rat, y: &Rat) -> Dyadic {
        if *x < Rat::zero() || *x > Dyadic::ONE.to_rat() {
            return Dyadic::ZERO;
        }
        let scaled = x * Dyadic::new(1, self.col_level as i32).to_rat();
        let col = scaled.floor().to_integer();
        if col < 0.into() {
            return Dyadic::ZERO;
        }
        let idx: usize = col.try_into().unwrap_or(usize::MAX);
        self.cols[idx.min(self.cols.len() - 1)].eval_rat(y)
    }

    /// Exact `∫ f^p` for integer `p >= 1`.
    pub fn power_integral(&self, p: u32) -> Dyadic {
        let col_w = Dyadic::inv_pow2(self.col_level);
        let mut total = Dyadic::ZERO;
        for c in &self.cols {
            total += col_w * c.integral_pow(p);
        }
        total
    }

    pub fn integral(&self) -> Dyadic {
        self.power_integral(1)
    }

    /// `∫ f^p` in floating point, for non-integer exponents.
    pub fn power_integral_f64(&self, p: f64) -> f64 {
        let col_w = Dyadic::inv_pow2(self.col_level).to_f64();
        self.cols.iter().map(|c| col_w * c.integral_pow_f64(p)).sum()
    }

    pub fn scale(&self, c: Dyadic) -> GridFunction {
        assert!(!c.is_negative());
        let cols = self
            .cols
            .iter()
            .map(|p| ColumnProfile {
                breaks: p.breaks.clone(),
                vals: p.vals.iter().map(|v| *v * c).collect(),
            })
            .collect();
        GridFunction { col_level: self.col_level, cols }
    }

    pub fn max_value(&self) -> Dyadic {
        self.cols
            .iter()
            .flat_map(|c| c.vals.iter())
            .copied()
            .max()
            .unwrap_or(Dyadic::ZERO)
    }
}

/// Serializable descriptions of the test-function library.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TestFnSpec {
    Constant { value: String },
    Square { level: u32, ix: u64, iy: u64 },
    HStrip { level: u32, iy: u64 },
    VStrip { level: u32, ix: u64 },
    Random { seed: u64, level: u32 },
}

impl TestFnSpec {
    pub fn build(&self) -> Result<GridFunction, Error> {
        Ok(match self {
            TestFnSpec::Constant { value } => {
                let v = Dyadic::parse(value)?;
                if v.is_negative() {
                    return Err(Error::BadParameter("test function must be nonnegative".into()));
                }
                GridFunction::constant(v)
            }
            TestFnSpec::Square { level, ix, iy } => GridFunction::indicator_square(*level, *ix, *iy),
            TestFnSpec::HStrip { level, iy } => GridFunction::h_strip(*level, *iy),
            TestFnSpec::VStrip { level, ix } => GridFunction::v_strip(*level, *ix),
            TestFnSpec::Random { seed, level } => GridFunction::random(*seed, *level),
        })
    }

    pub fn label(&self) -> String {
        match self {
            TestFnSpec::Constant { value } => format!("const{}", value.replace('/', "_")),
            TestFnSpec::Square { level, ix, iy } => format!("sq{level}-{ix}-{iy}"),
            TestFnSpec::HStrip { level, iy } => format!("hstrip{level}-{iy}"),
            TestFnSpec::VStrip { level, ix } => format!("vstrip{level}-{ix}"),
            TestFnSpec::Random { seed, level } => format!("rand{seed}-{level}"),
        }
    }
}
