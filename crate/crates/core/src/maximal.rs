//! Enumeration of the admissible family and exact evaluation of the maximal
//! operator on grid functions.
//!
//! `maximal_fn` computes every member's average once, integrating the grid
//! function along each base column against the sheared window (the same
//! column profile is reused across all slopes and offsets over that base),
//! and then evaluates `M f` anywhere as a maximum over containing members.
//! `brute_force_maximal` is the oracle: per point it rescans the whole
//! family and recomputes each average by clipping the parallelogram against
//! every constant piece of `f` and measuring the polygon, sharing nothing
//! with the fast path.

use num_traits::Zero;

use crate::dyadic::{Dyadic, DyadicInterval, Rat};
use crate::error::Error;
use crate::field::{allowable_slopes, OneVarField};
use crate::geometry::{Band, Parallelogram};
use crate::grid::GridFunction;
use crate::sweep;

/// Shape of the enumerated family: threshold, offset quantization (offsets
/// are the multiples of `w / offset_denom` for which the region meets the
/// unit square), an optional restriction of the base levels, and a hard cap
/// on the family size.
#[derive(Clone, Debug)]
pub struct FamilySpec {
    pub delta: Dyadic,
    pub offset_denom: u32,
    pub levels: Option<Vec<u32>>,
    pub cap: usize,
}

impl FamilySpec {
    pub fn new(delta: Dyadic, offset_denom: u32) -> FamilySpec {
        FamilySpec { delta, offset_denom, levels: None, cap: 2_000_000 }
    }

    pub fn with_levels(mut self, levels: Vec<u32>) -> FamilySpec {
        self.levels = Some(levels);
        self
    }
}

/// Enumerates exactly the admissible parallelograms: every dyadic base in the
/// included levels, every allowable slope, every quantized offset whose
/// region meets `[0,1]^2`.
pub fn enumerate_family(u: &OneVarField, spec: &FamilySpec) -> Result<Vec<Parallelogram>, Error> {
    if spec.offset_denom == 0 || !spec.offset_denom.is_power_of_two() {
        return Err(Error::BadParameter(format!(
            "offset_denom {} must be a positive power of two",
            spec.offset_denom
        )));
    }
    let n = u.n();
    let w = u.w();
    let step_log = spec.offset_denom.trailing_zeros() as i32;
    let step = w.mul_pow2(-step_log);
    let levels: Vec<u32> = match &spec.levels {
        Some(ls) => {
            if let Some(bad) = ls.iter().find(|&&l| l > n) {
                return Err(Error::BadParameter(format!("base level {bad} exceeds n = {n}")));
            }
            ls.clone()
        }
        None => (0..=n).collect(),
    };
    let mut out = Vec::new();
    for &level in &levels {
        for index in 0..(1u64 << level) {
            let base = DyadicInterval::standard(level, index);
            for s in allowable_slopes(&base, u, spec.delta)? {
                // Offsets k*step with y0 <= 1 and y0 + sigma|I| + w > 0.
                let sigma = s.value();
                let reach = sigma * base.len() + w;
                let t = -(reach.mul_pow2(n as i32 + step_log)); // -(reach)/step
                let k_min = t.floor_int() + 1;
                let k_max = 1i128 << (n as i32 + step_log); // y0 = 1
                if out.len() + (k_max - k_min + 1) as usize > spec.cap {
                    return Err(Error::FamilyCapExceeded { cap: spec.cap });
                }
                for k in k_min..=k_max {
                    out.push(Parallelogram::new(base, s, step.mul_int(k), n));
                }
            }
        }
    }
    Ok(out)
}

/// Exact `∫_R f` for a parallelogram region, integrating column by column
/// with subdivision where the window edges cross the profile's breakpoints.
pub fn integral_over(r: &Parallelogram, f: &GridFunction) -> Rat {
    let band = r.band();
    let mut total = Rat::zero();
    let two = Rat::from_integer(2.into());
    for col in r.columns() {
        let profile = f.profile_for(r.n, col);
        if profile.vals.is_empty() {
            continue;
        }
        let xa = Dyadic::new(col as i128, -(r.n as i32));
        let xb = Dyadic::new(col as i128 + 1, -(r.n as i32));
        // Abscissas where lower or upper window edge meets a breakpoint.
        let mut events: Vec<Rat> = vec![xa.to_rat(), xb.to_rat()];
        if !band.slope.is_zero() {
            for b in &profile.breaks {
                for edge in [band.intercept, band.intercept + band.thickness] {
                    let x = (*b - edge).to_rat() / band.slope.to_rat();
                    if x > xa.to_rat() && x < xb.to_rat() {
                        events.push(x);
                    }
                }
            }
            events.sort();
            events.dedup();
        }
        let window_mass = |x: &Rat| {
            let lo = band.lower_at_rat(x);
            let hi = &lo + band.thickness.to_rat();
            let mut m = Rat::zero();
            for i in 0..profile.vals.len() {
                let a = profile.breaks[i].to_rat().max(lo.clone());
                let b = profile.breaks[i + 1].to_rat().min(hi.clone());
                if a < b {
                    m += profile.vals[i].to_rat() * (b - a);
                }
            }
            m
        };
        for pair in events.windows(2) {
            let f0 = window_mass(&pair[0]);
            let f1 = window_mass(&pair[1]);
            total += (&pair[1] - &pair[0]) * (f0 + f1) / &two;
        }
    }
    total
}

/// Exact average `(1/|R|) ∫_R f` (the area is the full parallelogram area
/// even where the region overhangs the unit square).
pub fn average_over(r: &Parallelogram, f: &GridFunction) -> Rat {
    integral_over(r, f) / r.area().to_rat()
}

/// The maximal function of `f` over a family, with every member average
/// precomputed; evaluation anywhere is the exact maximum over containing
/// members (zero where no member contains the point).
pub struct MaximalField {
    rects: Vec<Parallelogram>,
    bands: Vec<Band>,
    avgs: Vec<Rat>,
}

pub fn maximal_fn(f: &GridFunction, family: &[Parallelogram]) -> MaximalField {
    let bands: Vec<Band> = family.iter().map(|r| r.band()).collect();
    let avgs: Vec<Rat> = family.iter().map(|r| average_over(r, f)).collect();
    MaximalField { rects: family.to_vec(), bands, avgs }
}

impl MaximalField {
    pub fn family(&self) -> &[Parallelogram] {
        &self.rects
    }

    pub fn averages(&self) -> &[Rat] {
        &self.avgs
    }

    pub fn eval(&self, x: &Rat, y: &Rat) -> Rat {
        let mut best = Rat::zero();
        for (band, avg) in self.bands.iter().zip(&self.avgs) {
            if *avg > best && band.contains(x, y) {
                best = avg.clone();
            }
        }
        best
    }

    /// Corner and midpoint sample of the member arrangement: on every strip,
    /// the two end abscissas and the midpoint, crossed with all edge
    /// ordinates, the gap midpoints, and sentinels outside the active range.
    /// `M f` is piecewise constant on the arrangement, so exhausting these
    /// points exhausts the cells. The visitor also receives the indices of
    /// the members whose extent spans the point's strip; members outside the
    /// strip cannot contain the point.
    pub fn for_each_sample<F: FnMut(&Rat, &Rat, &[usize])>(&self, mut visit: F) {
        let half = Dyadic::new(1, -1).to_rat();
        sweep::for_each_strip(&self.bands, Dyadic::ZERO, Dyadic::ONE, |x0, x1, active| {
            let mid = (x0 + x1) * &half;
            for x in [x0.clone(), mid, x1.clone()] {
                let mut ys: Vec<Rat> = Vec::with_capacity(2 * active.len() + 3);
                for &i in active {
                    let lo = self.bands[i].lower_at_rat(&x);
                    ys.push(&lo + self.bands[i].thickness.to_rat());
                    ys.push(lo);
                }
                ys.sort();
                ys.dedup();
                let mut pts = ys.clone();
                for wpair in ys.windows(2) {
                    pts.push((&wpair[0] + &wpair[1]) * &half);
                }
                if let (Some(first), Some(last)) = (ys.first(), ys.last()) {
                    pts.push(first - Dyadic::ONE.to_rat());
                    pts.push(last + Dyadic::ONE.to_rat());
                }
                for y in pts {
                    visit(&x, &y, active);
                }
            }
        });
    }

    pub fn sample_points(&self) -> Vec<(Rat, Rat)> {
        let mut out = Vec::new();
        self.for_each_sample(|x, y, _| out.push((x.clone(), y.clone())));
        out
    }

    /// `M f` at a point restricted to the given member indices; exact, and
    /// equal to `eval` whenever `subset` spans the point's strip.
    pub fn eval_among(&self, x: &Rat, y: &Rat, subset: &[usize]) -> Rat {
        let mut best = Rat::zero();
        for &i in subset {
            if self.avgs[i] > best && self.bands[i].contains(x, y) {
                best = self.avgs[i].clone();
            }
        }
        best
    }

    /// Exact measure of `{M f > lambda}` together with the witness members:
    /// the level set is precisely the union of the members whose average
    /// exceeds `lambda`.
    pub fn level_set(&self, lambda: &Rat) -> (Rat, Vec<usize>) {
        let witnesses: Vec<usize> =
            (0..self.rects.len()).filter(|&i| &self.avgs[i] > lambda).collect();
        let rects: Vec<&Parallelogram> = witnesses.iter().map(|&i| &self.rects[i]).collect();
        let measure = sweep::union_measure(&sweep::collapse_stacks(&rects));
        (measure, witnesses)
    }
}

/// The oracle: for each point, loop over the whole family, recompute each
/// containing member's average by exact polygon clipping against the pieces
/// of `f`, and take the maximum. No state is shared with `maximal_fn`.
pub fn brute_force_maximal(
    f: &GridFunction,
    family: &[Parallelogram],
    points: &[(Rat, Rat)],
) -> Vec<Rat> {
    points
        .iter()
        .map(|(x, y)| {
            let mut best = Rat::zero();
            for r in family {
                if r.band().contains(x, y) {
                    let avg = polygon_average(r, f);
                    if avg > best {
                        best = avg;
                    }
                }
            }
            best
        })
        .collect()
}

/// The oracle's integration route: clip the parallelogram against every
/// constant piece of `f` and measure the polygons. Shares nothing with
/// `integral_over`.
pub fn polygon_average(r: &Parallelogram, f: &GridFunction) -> Rat {
    let band = r.band();
    let corners = vec![
        (band.x_lo.to_rat(), band.lower_at_rat(&band.x_lo.to_rat())),
        (band.x_hi.to_rat(), band.lower_at_rat(&band.x_hi.to_rat())),
        (band.x_hi.to_rat(), band.upper_at_rat(&band.x_hi.to_rat())),
        (band.x_lo.to_rat(), band.upper_at_rat(&band.x_lo.to_rat())),
    ];
    let mut total = Rat::zero();
    let col_w = Dyadic::inv_pow2(f.col_level());
    for col in 0..(1usize << f.col_level()) {
        let xa = col_w.mul_int(col as i128).to_rat();
        let xb = col_w.mul_int(col as i128 + 1).to_rat();
        let profile = f.profile_for(f.col_level(), col);
        for i in 0..profile.vals.len() {
            if profile.vals[i].is_zero() {
                continue;
            }
            let clipped = clip_rect(
                corners.clone(),
                &xa,
                &xb,
                &profile.breaks[i].to_rat(),
                &profile.breaks[i + 1].to_rat(),
            );
            total += profile.vals[i].to_rat() * polygon_area(&clipped);
        }
    }
    total / r.area().to_rat()
}

/// Sutherland–Hodgman clip of a convex polygon against an axis rectangle.
fn clip_rect(mut poly: Vec<(Rat, Rat)>, xa: &Rat, xb: &Rat, ya: &Rat, yb: &Rat) -> Vec<(Rat, Rat)> {
    // Each constraint: keep sign * coord <= sign * bound.
    let constraints: [(bool, bool, Rat); 4] = [
        (true, false, xa.clone()),  // x >= xa
        (true, true, xb.clone()),   // x <= xb
        (false, false, ya.clone()), // y >= ya
        (false, true, yb.clone()),  // y <= yb
    ];
    for (is_x, upper, bound) in constraints {
        if poly.is_empty() {
            break;
        }
        let coord = |p: &(Rat, Rat)| if is_x { p.0.clone() } else { p.1.clone() };
        let inside = |p: &(Rat, Rat)| {
            if upper {
                coord(p) <= bound
            } else {
                coord(p) >= bound
            }
        };
        let mut next = Vec::with_capacity(poly.len() + 2);
        for k in 0..poly.len() {
            let cur = &poly[k];
            let prev = &poly[(k + poly.len() - 1) % poly.len()];
            let cur_in = inside(cur);
            if cur_in != inside(prev) {
                // Intersection of segment prev-cur with the boundary line.
                let denom = coord(cur) - coord(prev);
                let t = (&bound - coord(prev)) / denom;
                let ix = &prev.0 + (&cur.0 - &prev.0) * &t;
                let iy = &prev.1 + (&cur.1 - &prev.1) * &t;
                next.push((ix, iy));
            }
            if cur_in {
                next.push(cur.clone());
            }
        }
        poly = next;
    }
    poly
}

fn polygon_area(poly: &[(Rat, Rat)]) -> Rat {
    if poly.len() < 3 {
        return Rat::zero();
    }
    let mut twice = Rat::zero();
    for k in 0..poly.len() {
        let (x0, y0) = &poly[k];
        let (x1, y1) = &poly[(k + 1) % poly.len()];
        twice += x0 * y1 - x1 * y0;
    }
    let half = Rat::new(1.into(), 2.into());
    let a = twice * half;
    if a < Rat::zero() {
        -a
    } else {
        a
    }
}

/// One row of the weak-type measurement.
#[derive(Clone, Debug)]
pub struct WeakTypeRow {
    pub lambda: Dyadic,
    pub measure: Rat,
    pub ratio: f64,
}

/// Weak-type measurement: for each threshold, the exact level-set measure and
/// the ratio `lambda^p |E_lambda| / ||f||_p^p`; the constant is the maximum
/// ratio. Non-integer `p` makes `lambda^p` irrational, so the ratios are
/// reported in floating point while the measures stay exact.
#[derive(Clone, Debug)]
pub struct WeakTypeResult {
    pub p: f64,
    pub f_norm_p_p: f64,
    pub rows: Vec<WeakTypeRow>,
    pub constant: f64,
}

pub fn weak_type_constant(
    field: &MaximalField,
    f: &GridFunction,
    p: f64,
    lambdas: &[Dyadic],
) -> WeakTypeResult {
    assert!(p > 1.0);
    let norm = f.power_integral_f64(p);
    let mut rows = Vec::with_capacity(lambdas.len());
    let mut constant = 0.0f64;
    for &lambda in lambdas {
        let (measure, _) = field.level_set(&lambda.to_rat());
        let ratio = if norm > 0.0 {
            lambda.to_f64().powf(p) * rat_to_f64(&measure) / norm
        } else {
            0.0
        };
        constant = constant.max(ratio);
        rows.push(WeakTypeRow { lambda, measure, ratio });
    }
    WeakTypeResult { p, f_norm_p_p: norm, rows, constant }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
