//! Scratch probe: staged elimination for the A.3 j=1 bivariate run.
use mle_elim::groebner::{eliminate_vars, GbConfig};
use mle_elim::models::{builtin_model, likelihood_system};
use num_bigint::BigInt;
use num_rational::BigRational;
use std::collections::BTreeMap;
use std::time::Instant;

fn main() {
    let m = builtin_model("grassmannian_2_4").unwrap();
    let sys = likelihood_system(&m).unwrap();
    let vals = [3613i64, 8447, 1274, 9031, 557];
    let j = 1usize;
    let mut values = BTreeMap::new();
    let mut bi = 0;
    for (k, u) in sys.parameters.iter().enumerate() {
        if k != j {
            values.insert(u.clone(), BigRational::from_integer(BigInt::from(vals[bi])));
            bi += 1;
        }
    }
    let gens = sys.specialize_with_hint(&values);
    let cfg = GbConfig::default();
    // Stage 1: eliminate the multipliers only.
    let t0 = Instant::now();
    let keep1: Vec<&str> = ["u1", "p12", "p13", "p14", "p23", "p24", "p34"].to_vec();
    let mid = eliminate_vars(&gens, &keep1, &cfg).unwrap();
    println!("stage1 (drop lams): {:?} -> {} gens", t0.elapsed(), mid.len());
    // Stage 2: eliminate the remaining probability variables.
    let t1 = Instant::now();
    match eliminate_vars(&mid, &["u1", "p12"], &cfg) {
        Ok(elim) => {
            println!("stage2: {:?} -> {} gens", t1.elapsed(), elim.len());
            for g in &elim {
                println!("  terms={} deg_u1={} deg_p12={}", g.num_terms(), g.degree("u1"), g.degree("p12"));
            }
        }
        Err(e) => println!("stage2 err after {:?}: {e}", t1.elapsed()),
    }
}
