use dirmax_core::*;

// Block staircase: 1/delta blocks, each block constant at a spread-out cell,
// so the root has exactly 1/delta slopes of popularity exactly delta.
fn block_staircase(n: u32, d: u32) -> OneVarField {
    let cols = 1usize << n;
    let cells: Vec<u64> = (0..cols).map(|i| ((i >> (n - d)) << (n - d)) as u64).collect();
    OneVarField::new(n, cells).unwrap()
}

fn main() {
    for p in [1.5f64, 2.0] {
        for f in [GridFunction::indicator_square(2, 0, 0), GridFunction::indicator_square(3, 1, 1)] {
            let mut per_n: Vec<Vec<f64>> = Vec::new();
            for n in [5u32, 6] {
                let lambdas: Vec<Dyadic> = (1..=7).map(Dyadic::inv_pow2).collect();
                let mut cs = Vec::new();
                for dlog in 1..=4u32 {
                    let delta = Dyadic::inv_pow2(dlog);
                    let u = block_staircase(n, dlog);
                    let family = enumerate_family(&u, &FamilySpec::new(delta, 2)).unwrap();
                    let mf = maximal_fn(&f, &family);
                    let res = weak_type_constant(&mf, &f, p, &lambdas);
                    cs.push(res.constant * delta.to_f64());
                }
                per_n.push(cs);
            }
            let flat: Vec<f64> = per_n.iter().flatten().copied().collect();
            let (mn, mx) = (flat.iter().cloned().fold(f64::MAX, f64::min), flat.iter().cloned().fold(0.0, f64::max));
            let cross: f64 = per_n[0].iter().zip(&per_n[1]).map(|(a, b)| (a / b).max(b / a)).fold(0.0, f64::max);
            println!("p={p}: n5={:?} n6={:?} allratio={:.3} cross_n={:.3}",
                per_n[0].iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>(),
                per_n[1].iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>(), mx/mn, cross);
        }
    }
}
