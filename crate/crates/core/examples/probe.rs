use std::time::Instant;
use dirmax_core::*;

fn main() {
    for (label, spec) in [
        ("iid7", FieldGenSpec::IidUniform { seed: 7 }),
        ("cantor", FieldGenSpec::CantorLacunary),
        ("staircase", FieldGenSpec::Staircase),
    ] {
        let u = gen_field(&spec, 6).unwrap();
        for dlog in [1u32, 3, 5] {
            let delta = Dyadic::inv_pow2(dlog);
            let t0 = Instant::now();
            let family = enumerate_family(&u, &FamilySpec::new(delta, 2)).unwrap();
            let t_enum = t0.elapsed();
            let t0 = Instant::now();
            let sel = select(&family);
            let t_sel = t0.elapsed();
            let t0 = Instant::now();
            let q2 = q_integral(&sel.r1, 2);
            let t_q2 = t0.elapsed();
            let t0 = Instant::now();
            let q3 = q_integral(&sel.r1, 3);
            let t_q3 = t0.elapsed();
            let b = sel.sum_r1_area().to_rat();
            let rho2 = delta.pow(1).to_rat() * &q2 / &b;
            let rho3 = delta.pow(2).to_rat() * &q3 / &b;
            println!(
                "{label} delta=1/{:<3} family={:<6} r1={:<5} r2={:<6} enum={:?} sel={:?} q2={:?} q3={:?} rho2={:.4} rho3={:.4}",
                1 << dlog, family.len(), sel.r1.len(), sel.r2.len(),
                t_enum, t_sel, t_q2, t_q3, rat_to_f64(&rho2), rat_to_f64(&rho3)
            );
        }
    }
}
