//! The greedy covering selection and the counting machinery that bounds its
//! overlap.
//!
//! `select` repeatedly moves a maximal-length member of the family into `r1`
//! and then evicts into `r2` everything contained in the union of the
//! 5-dilates of the current `r1`; the eviction containment is an exact region
//! query. The important structural fact — intersecting `r1` members never
//! have nested slopes — is what makes the pair sets `P` and `Q` work: at any
//! point, the covering members correspond bijectively to distinct
//! `(base, slope)` pairs, each of which injects into a slope chosen by the
//! forest on an ancestor of its base. Every one of those statements is
//! checked pointwise on an exhaustive sample of the arrangement, and any
//! violation is returned as a falsification record rather than a panic.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::dyadic::{Dyadic, DyadicInterval, Rat, SlopeCell};
use crate::field::OneVarField;
use crate::forest::ForestAnalysis;
use crate::geometry::{Band, Parallelogram};
use crate::sweep;

/// A proof-backed assertion that failed on a concrete instance, with enough
/// detail to reproduce it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Falsification {
    pub kind: String,
    pub detail: String,
}

impl Falsification {
    fn new(kind: &str, detail: String) -> Falsification {
        Falsification { kind: kind.to_string(), detail }
    }
}

/// A member of `r2` together with the `r1` prefix members whose dilates
/// covered it at eviction time.
#[derive(Clone, Debug)]
pub struct Evicted {
    pub rect: Parallelogram,
    pub covered_by: Vec<usize>,
}

/// Output of the selection procedure.
#[derive(Clone, Debug)]
pub struct Selection {
    pub r1: Vec<Parallelogram>,
    pub r2: Vec<Evicted>,
}

impl Selection {
    pub fn sum_r1_area(&self) -> Dyadic {
        let mut total = Dyadic::ZERO;
        for r in &self.r1 {
            total += r.area();
        }
        total
    }
}

fn selection_key(r: &Parallelogram) -> (u32, u64, u64, Dyadic) {
    (r.base.level, r.base.index, r.slope.index, r.offset)
}

/// Greedy selection: maximal length first (ties broken by base index, slope
/// index, then offset), with eviction of everything covered by the union of
/// the current dilates.
///
/// Implemented as a single lazy pass in the selection order: coverage by the
/// dilate union is monotone and the scan order equals the pick order, so a
/// candidate that is covered when reached would have been evicted by the
/// eager drain, and a candidate that is not covered is exactly the next
/// maximal-length pick. The resulting partition (and the pick order) is
/// identical to draining fully after every pick.
pub fn select(input: &[Parallelogram]) -> Selection {
    let mut order: Vec<usize> = (0..input.len()).collect();
    order.sort_by(|&a, &b| selection_key(&input[a]).cmp(&selection_key(&input[b])));
    let bands: Vec<Band> = input.iter().map(|r| r.band()).collect();

    let mut r1: Vec<Parallelogram> = Vec::new();
    let mut r1_dilates: Vec<Band> = Vec::new();
    let mut r2: Vec<Evicted> = Vec::new();
    let mut touching: Vec<usize> = Vec::new();

    for &id in &order {
        let band = &bands[id];
        touching.clear();
        touching.extend(
            (0..r1_dilates.len()).filter(|&i| sweep::bands_intersect(band, &r1_dilates[i])),
        );
        let covered = touching.iter().any(|&i| r1_dilates[i].contains_band(band))
            || (touching.len() > 1 && {
                let covers: Vec<Band> =
                    touching.iter().map(|&i| r1_dilates[i].clone()).collect();
                sweep::band_covered(band, &covers)
            });
        if covered {
            r2.push(Evicted { rect: input[id], covered_by: touching.clone() });
        } else {
            r1.push(input[id]);
            r1_dilates.push(input[id].dilate5());
        }
    }
    Selection { r1, r2 }
}

/// Exact `∫ (sum_{R in r1} chi_R)^q`.
pub fn q_integral(r1: &[Parallelogram], q: u32) -> Rat {
    assert!(q >= 1);
    let bands: Vec<Band> = r1.iter().map(|r| r.band()).collect();
    sweep::count_power_integral(&bands, q)
}

/// The overlap count `sum chi_R` at an exact point.
pub fn overlap_at(r1: &[Parallelogram], x: &Rat, y: &Rat) -> usize {
    r1.iter().filter(|r| r.band().contains(x, y)).count()
}

/// `f(x, y)` relative to a root base: the number of `r1` members containing
/// the point whose base is contained in `root_base`.
pub fn local_f(root_base: &DyadicInterval, r1: &[Parallelogram], x: &Rat, y: &Rat) -> usize {
    r1.iter()
        .filter(|r| root_base.contains_interval(&r.base) && r.band().contains(x, y))
        .count()
}

/// An interval-slope pair; `P` and `Q` are sets of these.
pub type Pair = (DyadicInterval, SlopeCell);

/// The pair sets at a point: `P` from the covering `r1` members under the
/// forest's root, `Q` from the forest's chosen slopes along the chain of
/// intervals containing `x`.
pub fn pq_sets(
    x: &Rat,
    y: &Rat,
    r1: &[Parallelogram],
    analysis: &ForestAnalysis,
) -> (Vec<Pair>, Vec<Pair>) {
    let root = analysis.forest.root();
    let mut p: Vec<Pair> = r1
        .iter()
        .filter(|r| root.contains_interval(&r.base) && r.band().contains(x, y))
        .map(|r| (r.base, r.slope))
        .collect();
    p.sort();
    p.dedup();
    let mut q: Vec<Pair> = Vec::new();
    for j in chain_at(analysis, x) {
        for s in analysis.forest.t(&j) {
            q.push((j, *s));
        }
    }
    (p, q)
}

/// The chain of forest intervals containing the abscissa, root first.
fn chain_at(analysis: &ForestAnalysis, x: &Rat) -> Vec<DyadicInterval> {
    let root = analysis.forest.root();
    let depth = analysis.forest.depth();
    // Leaf index via floor(x * 2^n), clamped so the closed right edge of the
    // root joins the last leaf.
    let scaled = x * Dyadic::new(1, (root.level + depth) as i32).to_rat();
    let abs_leaf: i128 = scaled.floor().to_integer().try_into().unwrap_or(i128::MAX);
    let first_leaf = (root.index as i128) << depth;
    let leaf = (abs_leaf - first_leaf).clamp(0, (1i128 << depth) - 1) as u64;
    (0..=depth)
        .map(|d| DyadicInterval::standard(root.level + d, (root.index << d) + (leaf >> (depth - d))))
        .collect()
}

/// Builds the injection from `P` into `Q`: each `(I, s)` maps to the pair
/// `(J, t)` with `I ⊆ J`, `s ⊇ t`, taking the largest such `J` and then the
/// smallest slope index. Returns the map, or falsification records if a
/// target is missing (contradicting the existence subclaim) or two pairs
/// collide (contradicting the disjointness subclaim).
pub fn injection_alpha(
    p_set: &[Pair],
    analysis: &ForestAnalysis,
) -> Result<Vec<(Pair, Pair)>, Vec<Falsification>> {
    let root = analysis.forest.root();
    let mut map: Vec<(Pair, Pair)> = Vec::new();
    let mut falsifications = Vec::new();
    for &(interval, slope) in p_set {
        // Ancestors of `interval` inside the root, largest first.
        let mut target: Option<Pair> = None;
        for level in root.level..=interval.level {
            let j = DyadicInterval::standard(level, interval.index >> (interval.level - level));
            let t = analysis
                .forest
                .t(&j)
                .iter()
                .filter(|t| slope.contains(t))
                .min_by_key(|t| t.index);
            if let Some(t) = t {
                target = Some((j, *t));
                break;
            }
        }
        match target {
            Some(t) => map.push(((interval, slope), t)),
            None => falsifications.push(Falsification::new(
                "injection-missing-target",
                format!("no (J,t) with {interval} ⊆ J, {slope} ⊇ t"),
            )),
        }
    }
    let mut seen: BTreeSet<Pair> = BTreeSet::new();
    for ((i, s), t) in &map {
        if !seen.insert(*t) {
            falsifications.push(Falsification::new(
                "injection-collision",
                format!("target ({}, {}) hit twice; second source ({i}, {s})", t.0, t.1),
            ));
        }
    }
    if falsifications.is_empty() {
        Ok(map)
    } else {
        Err(falsifications)
    }
}

/// Structural checks on a finished selection: exact partition, non-increasing
/// lengths along `r1`, eviction containment inside the recorded dilates, the
/// slope corollary for intersecting `r1` pairs, and the Chebyshev bound
/// `|∪ r2| <= 25 sum |r1|`.
pub fn check_selection(sel: &Selection, input_len: usize) -> Vec<Falsification> {
    let mut out = Vec::new();
    if sel.r1.len() + sel.r2.len() != input_len {
        out.push(Falsification::new(
            "partition",
            format!("{} + {} members != input {}", sel.r1.len(), sel.r2.len(), input_len),
        ));
    }
    for w in sel.r1.windows(2) {
        if w[1].base.len() > w[0].base.len() {
            out.push(Falsification::new(
                "selection-order",
                format!("length increased from {} to {}", w[0].base.len(), w[1].base.len()),
            ));
        }
    }
    let dilates: Vec<Band> = sel.r1.iter().map(|r| r.dilate5()).collect();
    for e in &sel.r2 {
        let band = e.rect.band();
        if e.covered_by.iter().any(|&i| dilates[i].contains_band(&band)) {
            continue;
        }
        let covers: Vec<Band> = e.covered_by.iter().map(|&i| dilates[i].clone()).collect();
        if !sweep::band_covered(&e.rect.band(), &covers) {
            out.push(Falsification::new(
                "eviction-cover",
                format!("evicted member at base {} not inside its recorded dilates", e.rect.base),
            ));
        }
    }
    out.extend(slope_corollary_violations(&sel.r1));
    // Chebyshev: the union of r2 is inside the union of all dilates.
    let r2_rects: Vec<&Parallelogram> = sel.r2.iter().map(|e| &e.rect).collect();
    let union_r2 = sweep::union_measure(&sweep::collapse_stacks(&r2_rects));
    let bound = sel.sum_r1_area().mul_int(25).to_rat();
    if union_r2 > bound {
        out.push(Falsification::new(
            "chebyshev",
            format!("|∪ r2| = {union_r2} exceeds 25 sum |r1| = {bound}"),
        ));
    }
    out
}

/// Intersecting `r1` members with `L(R) <= L(R')` must have
/// `slope(R) ⊉ slope(R')`; every violating pair is reported.
pub fn slope_corollary_violations(r1: &[Parallelogram]) -> Vec<Falsification> {
    let mut out = Vec::new();
    if r1.is_empty() {
        return out;
    }
    let n = r1[0].n;
    let cols = 1usize << n;
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); cols];
    for (i, r) in r1.iter().enumerate() {
        for c in r.columns() {
            buckets[c].push(i);
        }
    }
    let bands: Vec<Band> = r1.iter().map(|r| r.band()).collect();
    for c in 0..cols {
        for a_pos in 0..buckets[c].len() {
            for b_pos in a_pos + 1..buckets[c].len() {
                let (i, j) = (buckets[c][a_pos], buckets[c][b_pos]);
                // Test each pair only at its first shared column.
                let first_shared = r1[i].columns().start.max(r1[j].columns().start);
                if c != first_shared {
                    continue;
                }
                // Orient so `a` is the not-longer member.
                let (a, b) = if r1[i].base.level >= r1[j].base.level { (i, j) } else { (j, i) };
                let nested = r1[a].slope.contains(&r1[b].slope);
                if nested && sweep::bands_intersect(&bands[i], &bands[j]) {
                    out.push(Falsification::new(
                        "slope-corollary",
                        format!(
                            "intersecting members base {} slope {} and base {} slope {} have nested slopes",
                            r1[a].base, r1[a].slope, r1[b].base, r1[b].slope
                        ),
                    ));
                }
            }
        }
    }
    out
}

/// Pointwise verification of the counting claims for one root base: at every
/// corner and midpoint of the arrangement of the members under the root,
/// `local_f` equals `#P`, `g` equals `#Q`, the injection is total and
/// injective (so `#P <= #Q`), intersecting covers never carry nested slopes,
/// and `delta * f <= h`. Returns the summary and any falsifications.
pub fn verify_claims(
    root_base: &DyadicInterval,
    r1: &[Parallelogram],
    u: &OneVarField,
    delta: Dyadic,
) -> (ClaimsSummary, Vec<Falsification>) {
    let analysis = ForestAnalysis::new(root_base, u, delta).expect("root within resolution");
    let members: Vec<&Parallelogram> =
        r1.iter().filter(|r| root_base.contains_interval(&r.base)).collect();
    let bands: Vec<Band> = members.iter().map(|r| r.band()).collect();
    let mut summary = ClaimsSummary::default();
    summary.roots_checked = 1;
    let mut out: Vec<Falsification> = Vec::new();
    let half = Dyadic::new(1, -1).to_rat();

    let mut visit_x = |x: &Rat, active: &[usize]| {
        // Candidate ordinates: every edge value, midpoints of the gaps, and
        // sentinels outside the active range.
        let mut edges: Vec<Rat> = Vec::with_capacity(2 * active.len() + 2);
        for &i in active {
            let lo = bands[i].lower_at_rat(x);
            edges.push(&lo + bands[i].thickness.to_rat());
            edges.push(lo);
        }
        edges.sort();
        edges.dedup();
        let mut ys = edges.clone();
        for w in edges.windows(2) {
            ys.push((&w[0] + &w[1]) * &half);
        }
        if let (Some(first), Some(last)) = (edges.first(), edges.last()) {
            ys.push(first - Dyadic::ONE.to_rat());
            ys.push(last + Dyadic::ONE.to_rat());
        } else {
            ys.push(Rat::zero());
        }
        let h_at = analysis.h().eval_rat(x);
        let g_at = analysis.g().eval_rat(x);
        for y in &ys {
            summary.points_checked += 1;
            let covering: Vec<usize> =
                active.iter().copied().filter(|&i| bands[i].contains(x, y)).collect();
            let f_count = covering.len();
            summary.max_local_f = summary.max_local_f.max(f_count);
            let (p_set, q_set) = pq_sets(x, y, r1, &analysis);
            if p_set.len() != f_count {
                out.push(Falsification::new(
                    "claim-a-duplicate-pair",
                    format!("f = {f_count} but #P = {} at x={x}, y={y}", p_set.len()),
                ));
            }
            if Dyadic::from_int(q_set.len() as i128) != g_at {
                out.push(Falsification::new(
                    "claim-a-g-count",
                    format!("#Q = {} but g = {g_at} at x={x}", q_set.len()),
                ));
            }
            // CASE split: covering pairs with nested slopes are CASE B,
            // which the selection is supposed to make impossible.
            for a in 0..covering.len() {
                for b in a + 1..covering.len() {
                    let (ra, rb) = (members[covering[a]], members[covering[b]]);
                    if ra.slope.contains(&rb.slope) || rb.slope.contains(&ra.slope) {
                        out.push(Falsification::new(
                            "case-b-nested-slopes",
                            format!(
                                "covering members with nested slopes {} and {} at x={x}, y={y}",
                                ra.slope, rb.slope
                            ),
                        ));
                    }
                }
            }
            match injection_alpha(&p_set, &analysis) {
                Ok(map) => {
                    if map.len() != p_set.len() || p_set.len() > q_set.len() {
                        out.push(Falsification::new(
                            "injection-cardinality",
                            format!("#P = {} > #Q = {} at x={x}, y={y}", p_set.len(), q_set.len()),
                        ));
                    }
                }
                Err(fs) => out.extend(fs),
            }
            // delta f <= h, exactly.
            if delta * Dyadic::from_int(f_count as i128) > h_at {
                out.push(Falsification::new(
                    "control-bound",
                    format!("delta * f = {} > h = {h_at} at x={x}, y={y}", f_count),
                ));
            }
        }
    };

    let (lo, hi) = (root_base.left(), root_base.right());
    sweep::for_each_strip(&bands, lo, hi, |x0, x1, active| {
        let mid = (x0 + x1) * &half;
        visit_x(x0, active);
        visit_x(&mid, active);
        if *x1 == hi.to_rat() && root_base.right_closed() {
            visit_x(x1, active);
        }
    });
    (summary, out)
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ClaimsSummary {
    pub roots_checked: usize,
    pub points_checked: usize,
    pub max_local_f: usize,
    /// Whether `∫_R f^{q-1} <= delta^{-(q-1)} w ∫ h^{q-1}` held for every
    /// checked root member.
    pub moment_bound_ok: bool,
}

/// End-to-end covering verification for one family: runs the selection,
/// checks its structural invariants, computes the exact union and overlap
/// integrals, and verifies the pointwise claims on every distinct root base.
pub fn verify_covering(
    family: &[Parallelogram],
    u: &OneVarField,
    delta: Dyadic,
    q: u32,
) -> CoveringReport {
    verify_covering_with(family, u, delta, q, true)
}

/// Like [`verify_covering`], with the pointwise claim verification optional
/// (the structural selection checks and exact integrals always run).
pub fn verify_covering_with(
    family: &[Parallelogram],
    u: &OneVarField,
    delta: Dyadic,
    q: u32,
    check_claims: bool,
) -> CoveringReport {
    assert!((2..=4).contains(&q), "q must be in 2..=4");
    let sel = select(family);
    let mut falsifications = check_selection(&sel, family.len());

    let sum_r1_area = sel.sum_r1_area();
    let r2_rects: Vec<&Parallelogram> = sel.r2.iter().map(|e| &e.rect).collect();
    let union_r2_area = sweep::union_measure(&sweep::collapse_stacks(&r2_rects));
    let q_int = q_integral(&sel.r1, q);
    let b = sum_r1_area.to_rat();
    let (ratio_union, ratio_q_normalized) = if b.is_zero() {
        (Rat::zero(), Rat::zero())
    } else {
        (&union_r2_area / &b, delta.pow(q - 1).to_rat() * &q_int / &b)
    };

    // Pointwise claims and the moment bound, per distinct root base.
    let mut roots: Vec<DyadicInterval> = sel.r1.iter().map(|r| r.base).collect();
    roots.sort_by_key(|b| (b.level, b.index));
    roots.dedup();
    if !check_claims {
        roots.clear();
    }
    let mut claims = ClaimsSummary { moment_bound_ok: true, ..Default::default() };
    let w = u.w();
    for root in &roots {
        let (s, fs) = verify_claims(root, &sel.r1, u, delta);
        claims.roots_checked += s.roots_checked;
        claims.points_checked += s.points_checked;
        claims.max_local_f = claims.max_local_f.max(s.max_local_f);
        falsifications.extend(fs);

        // ∫_R f^{q-1} over each root member R with this base.
        let analysis = ForestAnalysis::new(root, u, delta).expect("root within resolution");
        let under: Vec<Band> = sel
            .r1
            .iter()
            .filter(|r| root.contains_interval(&r.base))
            .map(|r| r.band())
            .collect();
        let rhs = (w * analysis.h().power_integral(q - 1)).to_rat();
        for r0 in sel.r1.iter().filter(|r| r.base == *root) {
            let lhs = sweep::count_power_in_region(&under, q - 1, &r0.band());
            if lhs * delta.pow(q - 1).to_rat() > rhs {
                claims.moment_bound_ok = false;
                falsifications.push(Falsification::new(
                    "moment-bound",
                    format!("∫_R f^{} over base {root} exceeds the h-moment bound", q - 1),
                ));
            }
        }
    }

    CoveringReport {
        n: u.n(),
        delta,
        q,
        count_input: family.len(),
        count_r1: sel.r1.len(),
        count_r2: sel.r2.len(),
        sum_r1_area,
        union_r2_area,
        q_integral: q_int,
        ratio_union,
        ratio_q_normalized,
        claims,
        falsifications,
        selection: sel,
    }
}

/// See [`verify_covering`].
#[derive(Clone, Debug)]
pub struct CoveringReport {
    pub n: u32,
    pub delta: Dyadic,
    pub q: u32,
    pub count_input: usize,
    pub count_r1: usize,
    pub count_r2: usize,
    pub sum_r1_area: Dyadic,
    pub union_r2_area: Rat,
    pub q_integral: Rat,
    /// `|∪ r2| / sum_{r1} |R|`.
    pub ratio_union: Rat,
    /// `delta^{q-1} ∫ (sum chi)^q / sum_{r1} |R|`.
    pub ratio_q_normalized: Rat,
    pub claims: ClaimsSummary,
    pub falsifications: Vec<Falsification>,
    pub selection: Selection,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::DyadicInterval;
    use crate::field::{gen_field, FieldGenSpec};
    use crate::maximal::{enumerate_family, FamilySpec};
    use rand::{seq::SliceRandom, SeedableRng};

    fn d(m: i128, e: i32) -> Dyadic {
        Dyadic::new(m, e)
    }

    fn pg(level: u32, index: u64, slope: u64, offset: Dyadic, n: u32) -> Parallelogram {
        Parallelogram::new(
            DyadicInterval::standard(level, index),
            SlopeCell::new(n - level, slope),
            offset,
            n,
        )
    }

    #[test]
    fn single_member_selection() {
        let r = pg(1, 0, 1, d(1, -3), 3);
        let sel = select(&[r]);
        assert_eq!(sel.r1, vec![r]);
        assert!(sel.r2.is_empty());
        assert!(check_selection(&sel, 1).is_empty());
    }

    #[test]
    fn offset_neighbors_get_evicted() {
        // Same base and slope, offsets w/2 apart: the second is inside the
        // first's dilate.
        let a = pg(1, 0, 1, Dyadic::ZERO, 3);
        let b = pg(1, 0, 1, d(1, -4), 3);
        let sel = select(&[b, a]); // input order must not matter
        assert_eq!(sel.r1, vec![a]);
        assert_eq!(sel.r2.len(), 1);
        assert_eq!(sel.r2[0].rect, b);
        assert_eq!(sel.r2[0].covered_by, vec![0]);
        assert!(check_selection(&sel, 2).is_empty());
    }

    #[test]
    fn q_integral_simple_cases() {
        let r = pg(2, 1, 1, d(1, -4), 4);
        assert_eq!(q_integral(&[r], 3), r.area().to_rat());
        // Fully disjoint translates add.
        let s = pg(2, 1, 1, d(1, 0), 4);
        assert_eq!(q_integral(&[r, s], 2), (r.area() + s.area()).to_rat());
        // Identical copies: 2^q times the area.
        let two_copies = q_integral(&[r, r], 2);
        assert_eq!(two_copies, r.area().mul_int(4).to_rat());
    }

    #[test]
    fn selection_deterministic_under_permutation() {
        let u = gen_field(&FieldGenSpec::IidUniform { seed: 12 }, 4).unwrap();
        let family = enumerate_family(&u, &FamilySpec::new(d(1, -2), 2)).unwrap();
        let sel = select(&family);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..3 {
            let mut shuffled = family.clone();
            shuffled.shuffle(&mut rng);
            let sel2 = select(&shuffled);
            assert_eq!(sel.r1, sel2.r1);
            let evicted: Vec<_> = sel.r2.iter().map(|e| e.rect).collect();
            let mut evicted2: Vec<_> = sel2.r2.iter().map(|e| e.rect).collect();
            // Eviction drain order within one pick follows input order, so
            // compare as sets keyed deterministically.
            evicted2.sort_by_key(|r| selection_key(r));
            let mut evicted_sorted = evicted.clone();
            evicted_sorted.sort_by_key(|r| selection_key(r));
            assert_eq!(evicted_sorted, evicted2);
        }
    }

    #[test]
    fn random_families_select_soundly() {
        for (seed, n, dlog) in [(50u64, 5u32, 2i32), (51, 5, 1), (52, 4, 3)] {
            let u = gen_field(&FieldGenSpec::IidUniform { seed }, n).unwrap();
            let family = enumerate_family(&u, &FamilySpec::new(Dyadic::inv_pow2(dlog as u32), 2)).unwrap();
            assert!(family.len() >= 50, "family too small: {}", family.len());
            let sel = select(&family);
            let fs = check_selection(&sel, family.len());
            assert!(fs.is_empty(), "{fs:?}");
        }
    }

    #[test]
    fn local_f_and_pairs_nested_configuration() {
        // A long member and a short member through a common point.
        let n = 4;
        let long = pg(0, 0, 7, Dyadic::ZERO, n); // slope value 15/32 over [0,1]
        let short = pg(2, 1, 1, d(1, -3), n); // base [1/4,1/2)
        let r1 = vec![long, short];
        // Point inside both: x = 1/4 sits at long's lower edge y = 15/32*1/4.
        let x = d(5, -4).to_rat(); // 0.3125
        let y_long = long.band().lower_at_rat(&x);
        let inside = &y_long + d(1, -6).to_rat();
        let got = local_f(&DyadicInterval::unit(), &r1, &x, &inside);
        let both = overlap_at(&r1, &x, &inside);
        assert_eq!(got, both);
        assert_eq!(local_f(&short.base, &r1, &x, &inside), if short.band().contains(&x, &inside) { 1 } else { 0 });
        // Points outside everything.
        assert_eq!(local_f(&DyadicInterval::unit(), &r1, &x, &d(10, 0).to_rat()), 0);
    }

    #[test]
    fn claims_hold_on_small_instances() {
        for (spec, n, dlog) in [
            (FieldGenSpec::IidUniform { seed: 60 }, 4u32, 2u32),
            (FieldGenSpec::CantorLacunary, 5, 3),
            (FieldGenSpec::Constant { cell: 3 }, 3, 1),
            (FieldGenSpec::TwoValue { a: 2, b: 13, block: 1 }, 4, 2),
        ] {
            let u = gen_field(&spec, n).unwrap();
            let delta = Dyadic::inv_pow2(dlog);
            let family = enumerate_family(&u, &FamilySpec::new(delta, 2)).unwrap();
            let report = verify_covering(&family, &u, delta, 2);
            assert!(report.falsifications.is_empty(), "{:?}", report.falsifications);
            assert!(report.claims.moment_bound_ok);
            assert!(report.claims.points_checked > 0);
            // Chebyshev ratio bound from the dilates.
            assert!(report.ratio_union <= Rat::from_integer(25.into()));
        }
    }

    #[test]
    fn constant_field_q_ratio_is_trivial() {
        // A family with a single member: A/B = 0 and the normalized q-ratio
        // equals delta^{q-1}.
        let u = gen_field(&FieldGenSpec::Constant { cell: 0 }, 3).unwrap();
        let delta = Dyadic::ONE;
        let r = pg(0, 0, 0, Dyadic::ZERO, 3);
        let report = verify_covering(&[r], &u, delta, 3);
        assert!(report.ratio_union.is_zero());
        assert_eq!(report.ratio_q_normalized, delta.pow(2).to_rat());
        assert!(report.falsifications.is_empty());
    }

    #[test]
    fn injection_on_constant_field() {
        let u = gen_field(&FieldGenSpec::Constant { cell: 9 }, 4).unwrap();
        let delta = d(1, -1);
        let analysis = ForestAnalysis::new(&DyadicInterval::unit(), &u, delta).unwrap();
        // Q at any x is exactly {([0,1], cell 9)}.
        let x = d(1, -2).to_rat();
        let (p, q) = pq_sets(&x, &Rat::zero(), &[], &analysis);
        assert!(p.is_empty());
        assert_eq!(q, vec![(DyadicInterval::unit(), SlopeCell::new(4, 9))]);
        // A member along the field injects into the root pair.
        let member = pg(2, 1, 2, d(1, -5), 4); // slope cell [1/2, 3/4) contains cell 9? 9>>2=2 yes
        let p = vec![(member.base, member.slope)];
        let map = injection_alpha(&p, &analysis).unwrap();
        assert_eq!(map[0].1, (DyadicInterval::unit(), SlopeCell::new(4, 9)));
    }

    #[test]
    fn injection_reports_missing_target() {
        let u = gen_field(&FieldGenSpec::Constant { cell: 9 }, 4).unwrap();
        let analysis = ForestAnalysis::new(&DyadicInterval::unit(), &u, d(1, -1)).unwrap();
        // A pair whose slope is disjoint from the field direction has no
        // admissible ancestor target.
        let p = vec![(DyadicInterval::standard(2, 0), SlopeCell::new(2, 0))];
        let err = injection_alpha(&p, &analysis).unwrap_err();
        assert_eq!(err[0].kind, "injection-missing-target");
    }
}
