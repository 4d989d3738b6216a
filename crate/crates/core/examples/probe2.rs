use std::time::Instant;
use dirmax_core::*;

fn main() {
    for (label, spec, n, dlog) in [
        ("iid7-n5", FieldGenSpec::IidUniform { seed: 7 }, 5u32, 2u32),
        ("iid7-n6", FieldGenSpec::IidUniform { seed: 7 }, 6, 2),
        ("cantor-n6", FieldGenSpec::CantorLacunary, 6, 3),
    ] {
        let u = gen_field(&spec, n).unwrap();
        let delta = Dyadic::inv_pow2(dlog);
        let family = enumerate_family(&u, &FamilySpec::new(delta, 2)).unwrap();
        let t0 = Instant::now();
        let report = verify_covering(&family, &u, delta, 2);
        println!(
            "{label}: family={} r1={} r2={} points={} roots={} maxf={} fals={} total={:?}",
            family.len(), report.count_r1, report.count_r2,
            report.claims.points_checked, report.claims.roots_checked,
            report.claims.max_local_f, report.falsifications.len(), t0.elapsed()
        );
        let t0 = Instant::now();
        let sel = select(&family);
        let fs = check_selection(&sel, family.len());
        println!("  check_selection: {:?} ({} falsifications)", t0.elapsed(), fs.len());
    }
}
