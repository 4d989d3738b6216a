//! The slope-selection forest and the one-variable auxiliary functions that
//! control the covering argument.
//!
//! For a root interval `I_0`, `T(I_0)` is the set of allowable slopes of
//! `I_0`, and for each deeper dyadic `J` the set `T(J)` keeps only the
//! allowable slopes of `J` that do not contain a slope already placed on the
//! strict-ancestor chain. The weights `mu_J^s = |J| Pop_J(s)` for `s ∈ T(J)`
//! form a Carleson sequence with constant 1 (no column can be counted by two
//! pairs), `h` is its balayage, `g` counts chosen slopes, and the dyadic-BMO
//! oscillation of `h` against `b_I = sum_{K ⊇ I} mu_K/|K|` is at most 1.
//! All of these are computed and checked exactly.

use crate::dyadic::{Dyadic, DyadicInterval, Gridline, Rat, SlopeCell};
use crate::error::Error;
use crate::field::{allowable_slopes, OneVarField};

/// A piecewise-constant function on a dyadic root interval, with strictly
/// increasing dyadic breakpoints. `vals[i]` holds on `[breaks[i], breaks[i+1])`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StepFn {
    breaks: Vec<Dyadic>,
    vals: Vec<Dyadic>,
}

impl StepFn {
    pub fn new(breaks: Vec<Dyadic>, vals: Vec<Dyadic>) -> StepFn {
        assert_eq!(breaks.len(), vals.len() + 1);
        assert!(breaks.windows(2).all(|w| w[0] < w[1]), "breakpoints must increase");
        StepFn { breaks, vals }
    }

    /// Builds from equally spaced leaf values on `[left, left + count*width)`,
    /// merging adjacent equal values.
    pub fn from_leaves(left: Dyadic, width: Dyadic, leaf_vals: &[Dyadic]) -> StepFn {
        assert!(!leaf_vals.is_empty());
        let mut breaks = vec![left];
        let mut vals = Vec::new();
        for (i, v) in leaf_vals.iter().enumerate() {
            let right = left + width.mul_int(i as i128 + 1);
            if vals.last() == Some(v) {
                *breaks.last_mut().unwrap() = right;
            } else {
                vals.push(*v);
                breaks.push(right);
            }
        }
        StepFn { breaks, vals }
    }

    pub fn breaks(&self) -> &[Dyadic] {
        &self.breaks
    }

    pub fn values(&self) -> &[Dyadic] {
        &self.vals
    }

    pub fn domain(&self) -> (Dyadic, Dyadic) {
        (self.breaks[0], *self.breaks.last().unwrap())
    }

    /// Value at a dyadic point; the right end of the domain counts into the
    /// last piece, matching the closed right edge of the root interval.
    pub fn eval(&self, x: Dyadic) -> Dyadic {
        let (lo, hi) = self.domain();
        assert!(x >= lo && x <= hi, "evaluation outside domain");
        let idx = match self.breaks.binary_search(&x) {
            Ok(i) => i.min(self.vals.len() - 1),
            Err(i) => i - 1,
        };
        self.vals[idx]
    }

    /// Value at an exact rational point.
    pub fn eval_rat(&self, x: &Rat) -> Dyadic {
        let (lo, hi) = self.domain();
        assert!(*x >= lo.to_rat() && *x <= hi.to_rat(), "evaluation outside domain");
        // Last piece whose left breakpoint is <= x.
        let mut idx = match self.breaks.binary_search_by(|b| b.to_rat().cmp(x)) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        idx = idx.min(self.vals.len() - 1);
        self.vals[idx]
    }

    pub fn max_value(&self) -> Dyadic {
        *self.vals.iter().max().unwrap()
    }

    pub fn integral(&self) -> Dyadic {
        self.piece_sum(|v| v)
    }

    /// Exact `∫ f^r` for integer `r >= 1`.
    pub fn power_integral(&self, r: u32) -> Dyadic {
        self.piece_sum(|v| v.pow(r))
    }

    fn piece_sum<F: Fn(Dyadic) -> Dyadic>(&self, f: F) -> Dyadic {
        let mut total = Dyadic::ZERO;
        for i in 0..self.vals.len() {
            total += (self.breaks[i + 1] - self.breaks[i]) * f(self.vals[i]);
        }
        total
    }

    /// Exact `∫_[lo,hi) |f - c|`.
    pub fn abs_dev_integral(&self, lo: Dyadic, hi: Dyadic, c: Dyadic) -> Dyadic {
        let mut total = Dyadic::ZERO;
        for i in 0..self.vals.len() {
            let a = self.breaks[i].max(lo);
            let b = self.breaks[i + 1].min(hi);
            if a < b {
                total += (b - a) * (self.vals[i] - c).abs();
            }
        }
        total
    }

    /// Exact measure of `{x in [lo,hi) : |f(x) - c| > lambda}`.
    pub fn deviation_measure(&self, lo: Dyadic, hi: Dyadic, c: Dyadic, lambda: Dyadic) -> Dyadic {
        let mut total = Dyadic::ZERO;
        for i in 0..self.vals.len() {
            let a = self.breaks[i].max(lo);
            let b = self.breaks[i + 1].min(hi);
            if a < b && (self.vals[i] - c).abs() > lambda {
                total += b - a;
            }
        }
        total
    }
}

/// The family `T(J)` for every dyadic `J ⊆ root` down to `|J| = w`, stored
/// level by level.
#[derive(Clone, Debug)]
pub struct SlopeForest {
    root: DyadicInterval,
    delta: Dyadic,
    field_n: u32,
    /// `levels[d][i]` is `T(J)` for the depth-`d` descendant `i` of the root.
    levels: Vec<Vec<Vec<SlopeCell>>>,
}

impl SlopeForest {
    pub fn root(&self) -> DyadicInterval {
        self.root
    }

    pub fn delta(&self) -> Dyadic {
        self.delta
    }

    pub fn depth(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    pub fn interval_at(&self, depth: u32, i: usize) -> DyadicInterval {
        DyadicInterval::standard(self.root.level + depth, (self.root.index << depth) + i as u64)
    }

    /// `T(J)`; panics if `J` is not a descendant of the root within depth.
    pub fn t(&self, j: &DyadicInterval) -> &[SlopeCell] {
        assert_eq!(j.grid, Gridline::Standard);
        assert!(self.root.contains_interval(j), "interval outside the forest root");
        let depth = j.level - self.root.level;
        assert!(depth <= self.depth(), "interval below the resolution floor");
        let i = (j.index - (self.root.index << depth)) as usize;
        &self.levels[depth as usize][i]
    }

    /// Iterates `(interval, T(interval))` in breadth-first order.
    pub fn nodes(&self) -> impl Iterator<Item = (DyadicInterval, &[SlopeCell])> + '_ {
        self.levels.iter().enumerate().flat_map(move |(d, row)| {
            row.iter()
                .enumerate()
                .map(move |(i, t)| (self.interval_at(d as u32, i), t.as_slice()))
        })
    }

    /// Number of leaf columns (width-`w` intervals) under the root.
    pub fn num_leaves(&self) -> usize {
        1usize << self.depth()
    }
}

/// Builds the forest over `u` with threshold `delta`, rooted at `root`;
/// the recursion bottoms out at `|J| = w`.
pub fn build_forest(
    root: &DyadicInterval,
    u: &OneVarField,
    delta: Dyadic,
) -> Result<SlopeForest, Error> {
    assert_eq!(root.grid, Gridline::Standard);
    if root.level > u.n() {
        return Err(Error::ResolutionExceeded { field_n: u.n(), requested: root.level });
    }
    let depth = u.n() - root.level;
    let mut levels: Vec<Vec<Vec<SlopeCell>>> =
        (0..=depth).map(|d| vec![Vec::new(); 1usize << d]).collect();
    // Depth-first walk carrying the chain of already chosen slopes.
    let mut used: Vec<SlopeCell> = Vec::new();
    let mut stack: Vec<(u32, usize, usize)> = vec![(0, 0, 0)]; // (depth, index, used len at entry)
    while let Some((d, i, mark)) = stack.pop() {
        used.truncate(mark);
        let interval = DyadicInterval::standard(root.level + d, (root.index << d) + i as u64);
        let t: Vec<SlopeCell> = allowable_slopes(&interval, u, delta)?
            .into_iter()
            .filter(|s| !used.iter().any(|prev| s.contains(prev)))
            .collect();
        levels[d as usize][i] = t.clone();
        if d < depth {
            used.extend(t);
            // Right child first so the left child is processed first.
            stack.push((d + 1, 2 * i + 1, used.len()));
            stack.push((d + 1, 2 * i, used.len()));
        }
    }
    Ok(SlopeForest { root: *root, delta, field_n: u.n(), levels })
}

/// The Carleson weights of a forest: `mu_J^s = |J| Pop_J(s)` for `s ∈ T(J)`
/// (zero otherwise) and their per-interval sums.
#[derive(Clone, Debug)]
pub struct CarlesonWeights {
    root: DyadicInterval,
    /// `mu[d][i]` = `mu_J` for the depth-`d` node `i`.
    mu: Vec<Vec<Dyadic>>,
    /// Per-node `(s, mu_J^s)` pairs, aligned with the forest's `T(J)`.
    pair_mu: Vec<Vec<Vec<(SlopeCell, Dyadic)>>>,
    /// Subtree sums `sum_{J ⊆ I} mu_J`.
    subtree: Vec<Vec<Dyadic>>,
}

impl CarlesonWeights {
    pub fn mu(&self, j: &DyadicInterval) -> Dyadic {
        let (d, i) = self.locate(j);
        self.mu[d][i]
    }

    pub fn mu_pairs(&self, j: &DyadicInterval) -> &[(SlopeCell, Dyadic)] {
        let (d, i) = self.locate(j);
        &self.pair_mu[d][i]
    }

    /// `sum_{J ⊆ I} mu_J`, exact.
    pub fn subtree_sum(&self, i: &DyadicInterval) -> Dyadic {
        let (d, idx) = self.locate(i);
        self.subtree[d][idx]
    }

    /// Total mass `sum_J mu_J` over the whole forest.
    pub fn total_mass(&self) -> Dyadic {
        self.subtree[0][0]
    }

    fn locate(&self, j: &DyadicInterval) -> (usize, usize) {
        assert!(self.root.contains_interval(j));
        let d = (j.level - self.root.level) as usize;
        (d, (j.index - (self.root.index << d)) as usize)
    }
}

/// Computes the exact weights of a forest built over `u`.
pub fn weights(forest: &SlopeForest, u: &OneVarField) -> CarlesonWeights {
    assert_eq!(forest.field_n, u.n(), "forest was built over a different resolution");
    let depth = forest.depth() as usize;
    let mut mu: Vec<Vec<Dyadic>> = Vec::with_capacity(depth + 1);
    let mut pair_mu: Vec<Vec<Vec<(SlopeCell, Dyadic)>>> = Vec::with_capacity(depth + 1);
    for d in 0..=depth {
        let mut row = Vec::with_capacity(1usize << d);
        let mut prow = Vec::with_capacity(1usize << d);
        for i in 0..(1usize << d) {
            let interval = forest.interval_at(d as u32, i);
            let mut node_total = Dyadic::ZERO;
            let pairs: Vec<(SlopeCell, Dyadic)> = forest.levels[d][i]
                .iter()
                .map(|s| {
                    let m = crate::field::pop(&interval, s, u).unwrap() * interval.len();
                    node_total += m;
                    (*s, m)
                })
                .collect();
            row.push(node_total);
            prow.push(pairs);
        }
        mu.push(row);
        pair_mu.push(prow);
    }
    // Bottom-up subtree sums.
    let mut subtree = mu.clone();
    for d in (0..depth).rev() {
        for i in 0..(1usize << d) {
            let below = subtree[d + 1][2 * i] + subtree[d + 1][2 * i + 1];
            subtree[d][i] += below;
        }
    }
    CarlesonWeights { root: forest.root, mu, pair_mu, subtree }
}

/// Result of the exact Carleson-constant scan.
#[derive(Clone, Debug)]
pub struct CarlesonCheck {
    /// Whether `sum_{J ⊆ I} mu_J <= |I|` held for every dyadic `I ⊆ root`.
    pub ok: bool,
    /// The interval with the largest normalized mass, and that ratio.
    pub worst_interval: DyadicInterval,
    pub worst_ratio: Dyadic,
}

/// Everything derived from one `(root, field, delta)` triple: the forest,
/// its weights, the balayage `h`, the slope-count function `g`, and the
/// per-interval centers `b_I`.
pub struct ForestAnalysis {
    pub forest: SlopeForest,
    pub weights: CarlesonWeights,
    h: StepFn,
    g: StepFn,
    /// `b[d][i] = sum_{K ⊇ I} mu_K / |K|` along the ancestor chain.
    b: Vec<Vec<Dyadic>>,
}

impl ForestAnalysis {
    pub fn new(root: &DyadicInterval, u: &OneVarField, delta: Dyadic) -> Result<ForestAnalysis, Error> {
        let forest = build_forest(root, u, delta)?;
        let weights = weights(&forest, u);
        let depth = forest.depth() as usize;

        // Leaf profiles of h and g: accumulate mu_J/|J| and #T(J) down the tree.
        let leaves = forest.num_leaves();
        let mut h_leaf = vec![Dyadic::ZERO; leaves];
        let mut g_leaf = vec![Dyadic::ZERO; leaves];
        for d in 0..=depth {
            let span = leaves >> d;
            for i in 0..(1usize << d) {
                let node_len_log = (root.level as i32) + d as i32;
                let dens = weights.mu[d][i].mul_pow2(node_len_log); // mu / |J|
                let count = Dyadic::from_int(forest.levels[d][i].len() as i128);
                for leaf in i * span..(i + 1) * span {
                    h_leaf[leaf] += dens;
                    g_leaf[leaf] += count;
                }
            }
        }
        let w = Dyadic::inv_pow2(u.n());
        let left = root.left();
        let h = StepFn::from_leaves(left, w, &h_leaf);
        let g = StepFn::from_leaves(left, w, &g_leaf);

        // b_I along ancestor chains, top-down.
        let mut b: Vec<Vec<Dyadic>> = Vec::with_capacity(depth + 1);
        for d in 0..=depth {
            let mut row = vec![Dyadic::ZERO; 1usize << d];
            for i in 0..(1usize << d) {
                let above = if d == 0 { Dyadic::ZERO } else { b[d - 1][i / 2] };
                let node_len_log = (root.level as i32) + d as i32;
                row[i] = above + weights.mu[d][i].mul_pow2(node_len_log);
            }
            b.push(row);
        }

        Ok(ForestAnalysis { forest, weights, h, g, b })
    }

    /// The balayage `h = sum_I chi_I mu_I/|I|`.
    pub fn h(&self) -> &StepFn {
        &self.h
    }

    /// The slope-count function `g = sum_I chi_I #T(I)`.
    pub fn g(&self) -> &StepFn {
        &self.g
    }

    /// `b_I = sum_{K ⊇ I} mu_K/|K|`.
    pub fn b(&self, i: &DyadicInterval) -> Dyadic {
        let d = (i.level - self.forest.root.level) as usize;
        let idx = (i.index - (self.forest.root.index << d)) as usize;
        self.b[d][idx]
    }

    /// Verifies `sum_{J ⊆ I} mu_J <= |I|` for every dyadic `I ⊆ root`,
    /// returning the maximizing interval and its exact ratio.
    pub fn carleson_check(&self) -> CarlesonCheck {
        let mut worst_interval = self.forest.root;
        let mut worst_ratio = Dyadic::ZERO;
        let mut ok = true;
        for (interval, _) in self.forest.nodes() {
            let mass = self.weights.subtree_sum(&interval);
            let ratio = mass.mul_pow2(interval.level as i32); // mass / |I|
            if ratio > worst_ratio {
                worst_ratio = ratio;
                worst_interval = interval;
            }
            if ratio > Dyadic::ONE {
                ok = false;
            }
        }
        CarlesonCheck { ok, worst_interval, worst_ratio }
    }

    /// Computes `(1/|I|) ∫_I |h - b_I|` for every dyadic `I ⊆ root` and
    /// returns the supremum with a witness. The proof's chain bounds this
    /// by the Carleson constant, so the contract is `sup <= 1`.
    pub fn bmo_oscillation(&self) -> (Dyadic, DyadicInterval) {
        let mut sup = Dyadic::ZERO;
        let mut witness = self.forest.root;
        for (interval, _) in self.forest.nodes() {
            let (lo, hi) = (interval.left(), interval.right());
            let osc = self
                .h
                .abs_dev_integral(lo, hi, self.b(&interval))
                .mul_pow2(interval.level as i32);
            if osc > sup {
                sup = osc;
                witness = interval;
            }
        }
        (sup, witness)
    }

    /// John–Nirenberg statistics of `h`: total mass, the exact `r`-th moment
    /// `∫ h^r`, its `f64` norm, and the oscillation-distribution table
    /// `lambda -> max_I |{x ∈ I : |h - b_I| > lambda}| / |I|`.
    pub fn jn_stats(&self, r: u32) -> JnStats {
        assert!(r >= 1);
        let mass = self.h.integral();
        let moment = self.h.power_integral(r);
        let norm = moment.to_f64().powf(1.0 / r as f64);
        let lambdas = [1, 2, 4, 8].map(Dyadic::from_int);
        let decay = lambdas
            .iter()
            .map(|lambda| {
                let mut worst = Dyadic::ZERO;
                for (interval, _) in self.forest.nodes() {
                    let m = self
                        .h
                        .deviation_measure(interval.left(), interval.right(), self.b(&interval), *lambda)
                        .mul_pow2(interval.level as i32);
                    worst = worst.max(m);
                }
                (*lambda, worst)
            })
            .collect();
        JnStats { mass, moment, norm, decay }
    }
}

/// See [`ForestAnalysis::jn_stats`].
#[derive(Clone, Debug)]
pub struct JnStats {
    pub mass: Dyadic,
    pub moment: Dyadic,
    pub norm: f64,
    /// `(lambda, max_I |{|h - b_I| > lambda}|/|I|)` for `lambda = 1,2,4,8`.
    pub decay: Vec<(Dyadic, Dyadic)>,
}
