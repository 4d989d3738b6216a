use dirmax_core::*;

// Four groups, each filling a quarter of [0,1]: group j holds 2^{j-1} blocks
// whose values fan out across the slope range with popularity 2^{-j-1} each,
// so the number of delta-allowable directions doubles with every halving.
fn fan_field(n: u32) -> OneVarField {
    assert!(n >= 5);
    let cols = 1usize << n;
    let mut cells = vec![0u64; cols];
    for j in 1..=4u32 {
        let group_start = (j as usize - 1) * (cols / 4);
        let blocks = 1usize << (j - 1);
        let block_len = (cols / 4) / blocks;
        for b in 0..blocks {
            let value = ((2 * b as u64 + 1) << (n - j)) / 2; // (2b+1)/2^j as level-n index
            for c in 0..block_len {
                cells[group_start + b * block_len + c] = value;
            }
        }
    }
    OneVarField::new(n, cells).unwrap()
}

fn main() {
    for (alvl, ix, iy) in [(3u32, 2u64, 3u64), (4, 5, 7), (2, 1, 1)] {
        for p in [1.5f64, 2.0] {
            let mut per_n: Vec<Vec<f64>> = Vec::new();
            for n in [5u32, 6] {
                let u = fan_field(n);
                let f = GridFunction::indicator_square(alvl, ix, iy);
                let lambdas: Vec<Dyadic> = (1..=8).map(Dyadic::inv_pow2).collect();
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
            let cross: f64 = per_n[0].iter().zip(&per_n[1]).map(|(a, b)| (a / b).max(b / a)).fold(0.0, f64::max);
            println!("sq lvl {alvl} p={p}: n5={:?} n6={:?} allratio={:.3} cross_n={:.3}",
                per_n[0].iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>(),
                per_n[1].iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>(), mx/mn, cross);
        }
    }
}
