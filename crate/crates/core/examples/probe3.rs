use dirmax_core::*;

fn main() {
    let mut specs: Vec<FieldGenSpec> = vec![
        FieldGenSpec::CantorLacunary,
        FieldGenSpec::Staircase,
        FieldGenSpec::TwoValue { a: 0, b: 1, block: 1 },
        FieldGenSpec::TwoValue { a: 3, b: 200, block: 3 },
        FieldGenSpec::Constant { cell: 11 },
    ];
    for s in 0..32 {
        specs.push(FieldGenSpec::IidUniform { seed: s });
    }
    let mut max2 = Dyadic::ZERO;
    let mut max3 = Dyadic::ZERO;
    let mut max_osc = Dyadic::ZERO;
    let mut max_decay1 = Dyadic::ZERO;
    for n in 3..=8u32 {
        for spec in &specs {
            let u = gen_field(spec, n).unwrap();
            for dlog in [1u32, 2, 3] {
                let fa = ForestAnalysis::new(&DyadicInterval::unit(), &u, Dyadic::inv_pow2(dlog)).unwrap();
                let s2 = fa.jn_stats(2);
                let s3 = fa.jn_stats(3);
                if s2.moment > max2 { max2 = s2.moment; }
                if s3.moment > max3 { max3 = s3.moment; }
                let (osc, _) = fa.bmo_oscillation();
                if osc > max_osc { max_osc = osc; }
                if s2.decay[0].1 > max_decay1 { max_decay1 = s2.decay[0].1; }
            }
        }
    }
    println!("max ∫h^2 = {} ≈ {:.6}", max2, max2.to_f64());
    println!("max ∫h^3 = {} ≈ {:.6}", max3, max3.to_f64());
    println!("max osc  = {} ≈ {:.6}", max_osc, max_osc.to_f64());
    println!("max decay@1 = {} ≈ {:.6}", max_decay1, max_decay1.to_f64());
}
