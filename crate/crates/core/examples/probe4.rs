use std::time::Instant;
use dirmax_core::*;

fn main() {
    // Criterion 6 prototype: weak-type constants * delta across deltas and n.
    for spec in [FieldGenSpec::IidUniform { seed: 7 }, FieldGenSpec::CantorLacunary] {
        for f in [GridFunction::indicator_square(1, 0, 0), GridFunction::indicator_square(2, 2, 1)] {
            for p in [1.5f64, 2.0] {
                let mut per_n: Vec<Vec<f64>> = Vec::new();
                for n in [5u32, 6] {
                    let u = gen_field(&spec, n).unwrap();
                    let lambdas: Vec<Dyadic> = (1..=6).map(Dyadic::inv_pow2).collect();
                    let mut cs = Vec::new();
                    for dlog in 1..=4u32 {
                        let delta = Dyadic::inv_pow2(dlog);
                        let family = enumerate_family(&u, &FamilySpec::new(delta, 2)).unwrap();
                        let mf = maximal_fn(&f, &family);
                        let res = weak_type_constant(&mf, &f, p, &lambdas);
                        cs.push(res.constant * delta.to_f64());
                    }
                    per_n.push(cs);
                }
                let flat: Vec<f64> = per_n.iter().flatten().copied().collect();
                let (mn, mx) = (flat.iter().cloned().fold(f64::MAX, f64::min), flat.iter().cloned().fold(0.0, f64::max));
                let cross_n: f64 = per_n[0].iter().zip(&per_n[1]).map(|(a, b)| (a / b).max(b / a)).fold(0.0, f64::max);
                println!("{:?} f-lvl p={p}: c*delta per delta n5={:?} n6={:?} maxratio={:.3} cross_n={:.3}",
                    spec.label(), per_n[0].iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>(),
                    per_n[1].iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>(), mx/mn, cross_n);
            }
        }
    }
    // Criterion 7 prototype: arrangement sample sizes.
    for (n, dlog, od, levels) in [(2u32, 1u32, 2u32, None), (3, 1, 2, None), (3, 2, 2, None), (4, 2, 1, None), (5, 1, 1, Some(vec![3u32,4,5]))] {
        let u = gen_field(&FieldGenSpec::IidUniform { seed: 1 }, n).unwrap();
        let mut fs = FamilySpec::new(Dyadic::inv_pow2(dlog), od);
        if let Some(ls) = levels { fs = fs.with_levels(ls); }
        let family = enumerate_family(&u, &fs).unwrap();
        let f = GridFunction::indicator_square(1, 0, 0);
        let t0 = Instant::now();
        let mf = maximal_fn(&f, &family);
        let pts = mf.sample_points();
        let t_build = t0.elapsed();
        let t0 = Instant::now();
        let mut agree = 0usize;
        // memoized polygon oracle
        let mut memo: std::collections::HashMap<usize, Rat> = Default::default();
        for (x, y) in &pts {
            let mut best = Rat::new(0.into(), 1.into());
            for (i, r) in family.iter().enumerate() {
                if r.band().contains(x, y) {
                    let avg = memo.entry(i).or_insert_with(|| polygon_average(r, &f)).clone();
                    if avg > best { best = avg; }
                }
            }
            if mf.eval(x, y) == best { agree += 1; }
        }
        println!("n={n} od={od} family={} points={} build={:?} oracle={:?} agree={}",
            family.len(), pts.len(), t_build, t0.elapsed(), agree == pts.len());
    }
}
