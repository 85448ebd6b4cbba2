use super::*;
use num_bigint::BigInt;
use proptest::prelude::*;
use std::collections::BTreeMap;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn qr(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn uvars() -> VarSet {
    VarSet::new(["u0", "u1", "u2", "u3"])
}

fn parse(text: &str, vs: &VarSet) -> MultiPoly {
    parse_poly(text, vs).unwrap()
}

#[test]
fn parse_die_invariant() {
    let vs = VarSet::new(["p0", "p1", "p2", "p3"]);
    let p = parse("p0 + 2*p1 + 3*p2 - 4*p3", &vs);
    assert_eq!(p.num_terms(), 4);
    assert_eq!(p.degree("p1"), 1);
    assert_eq!(p.coeff_of("p3", 1), MultiPoly::from_int(&vs, -4));
    assert!(p.is_homogeneous(&["p0", "p1", "p2", "p3"]));
}

#[test]
fn parse_zero_and_grassmannian() {
    let vs = VarSet::new(["p12", "p13", "p14", "p23", "p24", "p34"]);
    assert!(parse("0", &vs).is_zero());
    let g = parse("p12*p34 - p13*p24 + p14*p23", &vs);
    assert_eq!(g.num_terms(), 3);
    assert_eq!(g.total_degree(), 2);
}

#[test]
fn parse_errors_carry_position() {
    let vs = VarSet::new(["p0"]);
    match parse_poly("p0 + @", &vs) {
        Err(ParseError::SyntaxError { pos, .. }) => assert_eq!(pos, 5),
        other => panic!("expected syntax error, got {other:?}"),
    }
    match parse_poly("p0 + q1", &vs) {
        Err(ParseError::UnknownVariable { name, pos }) => {
            assert_eq!(name, "q1");
            assert_eq!(pos, 5);
        }
        other => panic!("expected unknown variable, got {other:?}"),
    }
    // Implicit multiplication is not part of the grammar.
    assert!(parse_poly("2p0", &vs).is_err());
    assert!(parse_poly("p0/2", &vs).is_err());
}

#[test]
fn difference_of_squares() {
    let vs = VarSet::new(["u0", "u1"]);
    let a = parse("u0 + u1", &vs);
    let b = parse("u0 - u1", &vs);
    assert_eq!(a.mul(&b), parse("u0^2 - u1^2", &vs));
}

/// Oracle: multiply by convolving exponent vectors directly.
fn convolve(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    let (a, b) = MultiPoly::aligned(a, b);
    let mut acc: BTreeMap<Vec<u32>, BigRational> = BTreeMap::new();
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            let exps: Vec<u32> = ma
                .exponents()
                .iter()
                .zip(mb.exponents())
                .map(|(x, y)| x + y)
                .collect();
            *acc.entry(exps).or_insert_with(BigRational::zero) += ca * cb;
        }
    }
    MultiPoly::from_terms(
        a.vars(),
        acc.into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (Monomial::from_exponents(e), c)),
    )
}

#[test]
fn pow_of_su_matches_convolution_oracle() {
    let vs = uvars();
    let s = parse("u0 + u1 + u2 + u3", &vs);
    let sq = s.pow(2);
    assert_eq!(sq.num_terms(), 10);
    assert_eq!(sq, convolve(&s, &s));
    assert_eq!(s.pow(3), convolve(&convolve(&s, &s), &s));
}

#[test]
fn substitute_specializes_die_equation() {
    // f0 of the die with u1->2, u2->12, u3->7 leaves f0 itself unchanged,
    // while f1 = p1*l1 + 2*p1*l2 - u1 becomes p1*l1 + 2*p1*l2 - 2.
    let vs = VarSet::new(["u0", "u1", "p0", "p1", "l1", "l2"]);
    let f1 = parse("p1*l1 + 2*p1*l2 - u1", &vs);
    let mut vals = BTreeMap::new();
    vals.insert("u1".to_string(), q(2));
    assert_eq!(f1.substitute_values(&vals), parse("p1*l1 + 2*p1*l2 - 2", &vs));
    let f0 = parse("p0*l1 + p0*l2 - u0", &vs);
    assert_eq!(f0.substitute(&BTreeMap::new()), f0);
}

#[test]
fn substitute_polynomial_binding() {
    // x0 -> S(u)*p0 turns x0^2 into S^2 p0^2.
    let xs = VarSet::new(["u0", "u1", "x0"]);
    let p = parse("x0^2 - u0*x0", &xs);
    let target = VarSet::new(["u0", "u1", "p0"]);
    let sp = parse("(u0 + u1)*p0", &target);
    let mut b = BTreeMap::new();
    b.insert("x0".to_string(), sp);
    let got = p.substitute(&b);
    let want = parse("(u0 + u1)^2*p0^2 - u0*(u0 + u1)*p0", &VarSet::new(["u0", "u1", "x0", "p0"]));
    assert_eq!(got, want);
}

#[test]
fn degree_conventions() {
    let vs = uvars();
    let z = MultiPoly::zero(&vs);
    assert_eq!(z.degree("u0"), -1);
    assert_eq!(z.total_degree(), -1);
    let c = MultiPoly::from_int(&vs, 7);
    assert_eq!(c.degree("u0"), 0);
    assert_eq!(c.total_degree(), 0);
}

#[test]
fn eval_point_su_at_5_6_11_32() {
    let vs = uvars();
    let s = parse("u0 + u1 + u2 + u3", &vs);
    let pt: BTreeMap<String, BigRational> = [("u0", 5), ("u1", 6), ("u2", 11), ("u3", 32)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), q(v)))
        .collect();
    assert_eq!(s.eval_point(&pt).unwrap(), q(54));
    let c = parse("3/4", &vs);
    assert_eq!(c.eval_point(&BTreeMap::new()).unwrap(), qr(3, 4));
    let err = s.eval_point(&BTreeMap::new());
    assert_eq!(err, Err(EvalError::UnboundVariable("u0".into())));
}

#[test]
fn eval_at_zero_gives_constant_term() {
    let vs = VarSet::new(["p0"]);
    let p = parse("p0^3 - 7/5*p0^2 + 481/1458*p0 - 5/243", &vs);
    let pt: BTreeMap<String, BigRational> = [("p0".to_string(), q(0))].into();
    assert_eq!(p.eval_point(&pt).unwrap(), qr(-5, 243));
}

/// Oracle: Horner evaluation along one variable at a time.
fn horner_eval(p: &MultiPoly, point: &BTreeMap<String, BigRational>) -> BigRational {
    fn go(p: &MultiPoly, vars: &[String], point: &BTreeMap<String, BigRational>) -> BigRational {
        match vars.first() {
            None => p.constant_value().expect("fully specialized"),
            Some(v) => {
                let d = p.degree(v).max(0);
                let x = &point[v];
                let mut acc = BigRational::zero();
                for k in (0..=d as u32).rev() {
                    acc = acc * x + go(&p.coeff_of(v, k), &vars[1..], point);
                }
                acc
            }
        }
    }
    go(p, p.vars().names(), point)
}

#[test]
fn gcd_constructed_common_factor() {
    let vs = VarSet::new(["u0", "p0"]);
    let a = parse("(u0 + 1)^2*(p0 - 2)", &vs);
    let b = parse("(u0 + 1)*(p0 + 5)", &vs);
    assert_eq!(gcd_poly(&a, &b), parse("u0 + 1", &vs));
    // gcd(p, p) = normalized p; gcd(a, 0) = normalized a.
    assert_eq!(gcd_poly(&a, &a), a.normalized());
    assert_eq!(gcd_poly(&a, &MultiPoly::zero(&vs)), a.normalized());
}

/// Oracle for coprimality: nonzero resultant in one variable implies no
/// common factor involving it; checked in both variables.
fn resultant_nonzero(a: &MultiPoly, b: &MultiPoly, v: &str) -> bool {
    let ca = a.coeff_vec(v);
    let cb = b.coeff_vec(v);
    let n = ca.len() - 1;
    let m = cb.len() - 1;
    let size = n + m;
    let vars = a.vars().clone();
    let mut rows: Vec<Vec<MultiPoly>> = vec![vec![MultiPoly::zero(&vars); size]; size];
    for i in 0..m {
        for (j, c) in ca.iter().rev().enumerate() {
            rows[i][i + j] = c.clone();
        }
    }
    for i in 0..n {
        for (j, c) in cb.iter().rev().enumerate() {
            rows[m + i][i + j] = c.clone();
        }
    }
    // Cofactor expansion: independent of the division-based routes.
    fn det(m: &[Vec<MultiPoly>]) -> MultiPoly {
        let n = m.len();
        if n == 1 {
            return m[0][0].clone();
        }
        let vars = m[0][0].vars().clone();
        let mut acc = MultiPoly::zero(&vars);
        for j in 0..n {
            if m[0][j].is_zero() {
                continue;
            }
            let minor: Vec<Vec<MultiPoly>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|(k, _)| *k != j)
                        .map(|(_, e)| e.clone())
                        .collect()
                })
                .collect();
            let term = m[0][j].mul(&det(&minor));
            acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        }
        acc
    }
    !det(&rows).is_zero()
}

#[test]
fn gcd_of_random_coprime_cubics_is_one() {
    // Dense bivariate cubics chosen by a fixed pseudo-random sweep; each
    // pair is certified coprime by a nonzero resultant before asserting.
    let vs = VarSet::new(["x", "y"]);
    let mut st = 0x9e3779b97f4a7c15u64;
    let mut next = move || {
        st ^= st << 13;
        st ^= st >> 7;
        st ^= st << 17;
        (st % 13) as i64 - 6
    };
    let mut checked = 0;
    for _ in 0..8 {
        let rand_cubic = |next: &mut dyn FnMut() -> i64| {
            let mut p = MultiPoly::zero(&vs);
            for i in 0..=3u32 {
                for j in 0..=(3 - i) {
                    let c = next();
                    if c != 0 {
                        let x = MultiPoly::var(&vs, "x").unwrap().pow(i);
                        let y = MultiPoly::var(&vs, "y").unwrap().pow(j);
                        p = p.add(&x.mul(&y).scale(&q(c)));
                    }
                }
            }
            p
        };
        let a = rand_cubic(&mut next);
        let b = rand_cubic(&mut next);
        if a.degree("x") < 1 || b.degree("x") < 1 || a.degree("y") < 1 || b.degree("y") < 1 {
            continue;
        }
        if resultant_nonzero(&a, &b, "x") && resultant_nonzero(&a, &b, "y") {
            checked += 1;
            assert_eq!(gcd_poly(&a, &b), MultiPoly::one(&vs));
        }
    }
    assert!(checked >= 3, "sweep produced too few certified-coprime pairs");
}

#[test]
fn squarefree_part_examples() {
    let vs = VarSet::new(["u0", "p0"]);
    let p = parse("(u0 + 1)^2*(u0 + 2)", &vs);
    assert_eq!(squarefree_part(&p), parse("(u0 + 1)*(u0 + 2)", &vs));
    let p = parse("p0^2 - 2*p0 + 1", &vs);
    assert_eq!(squarefree_part(&p), parse("p0 - 1", &vs));
}

#[test]
fn factor_multiplicity_examples() {
    let vs = VarSet::new(["u0"]);
    let f = parse("u0 + 21", &vs);
    let p = parse("10*(u0 + 21)^2", &vs);
    let (k, cof) = factor_multiplicity(&p, &f);
    assert_eq!(k, 2);
    assert_eq!(cof, MultiPoly::from_int(&vs, 10));

    let p = parse("-24*u0^2", &vs);
    let (k, cof) = factor_multiplicity(&p, &f);
    assert_eq!(k, 0);
    assert_eq!(cof, parse("-24*u0^2", &vs));
}

#[test]
fn lcoeff_and_coeff_of() {
    let vs = VarSet::new(["u0", "u1", "p0"]);
    let p = parse("10*(u0 + u1)^2*p0^3 - 43*u0*p0^2 + 2*u0", &vs);
    assert_eq!(p.degree("p0"), 3);
    assert_eq!(p.lcoeff("p0"), parse("10*(u0 + u1)^2", &vs));
    assert_eq!(p.coeff_of("p0", 1), MultiPoly::zero(&vs));
    assert_eq!(p.coeff_of("p0", 0), parse("2*u0", &vs));
}

#[test]
fn normalized_is_primitive_positive() {
    let vs = VarSet::new(["u0", "u1"]);
    let p = parse("4/6*u0 - 2*u1", &vs);
    let n = p.normalized();
    assert_eq!(n, parse("u0 - 3*u1", &vs));
    let m = parse("-2*u0 + 6*u1", &vs);
    assert_eq!(m.normalized(), parse("u0 - 3*u1", &vs));
}

fn arb_poly(vs: &VarSet, max_terms: usize, max_exp: u32) -> impl Strategy<Value = MultiPoly> {
    let n = vs.len();
    let vs = vs.clone();
    prop::collection::vec(
        (
            prop::collection::vec(0..=max_exp, n),
            -9i64..=9,
        ),
        0..=max_terms,
    )
    .prop_map(move |terms| {
        MultiPoly::from_terms(
            &vs,
            terms
                .into_iter()
                .map(|(e, c)| (Monomial::from_exponents(e), q(c))),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn add_commutes(
        (a, b) in (Just(uvars())).prop_flat_map(|vs| (arb_poly(&vs, 6, 3), arb_poly(&vs, 6, 3)))
    ) {
        prop_assert_eq!(a.add(&b), b.add(&a));
    }

    #[test]
    fn mul_associates(
        (a, b, c) in (Just(VarSet::new(["x", "y"]))).prop_flat_map(|vs| {
            (arb_poly(&vs, 4, 2), arb_poly(&vs, 4, 2), arb_poly(&vs, 4, 2))
        })
    ) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b), convolve(&a, &b));
    }

    #[test]
    fn additive_identity(a in (Just(uvars())).prop_flat_map(|vs| arb_poly(&vs, 6, 3))) {
        let z = MultiPoly::zero(a.vars());
        prop_assert_eq!(a.add(&z), a);
    }

    #[test]
    fn print_parse_roundtrip(a in (Just(uvars())).prop_flat_map(|vs| arb_poly(&vs, 8, 4))) {
        let text = a.to_string();
        let back = parse_poly(&text, a.vars()).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn horner_matches_term_eval(
        a in (Just(VarSet::new(["x", "y", "z"]))).prop_flat_map(|vs| arb_poly(&vs, 6, 3)),
        xs in prop::collection::vec(-5i64..=5, 3),
    ) {
        let pt: BTreeMap<String, BigRational> = ["x", "y", "z"]
            .iter()
            .zip(&xs)
            .map(|(k, v)| (k.to_string(), q(*v)))
            .collect();
        prop_assert_eq!(a.eval_point(&pt).unwrap(), horner_eval(&a, &pt));
    }

    #[test]
    fn squarefree_idempotent_on_products(
        e1 in 1u32..=2, e2 in 1u32..=2, c in 1i64..=4,
    ) {
        let vs = VarSet::new(["x", "y"]);
        let f = parse("x + y + 1", &vs);
        let g = parse("x - y", &vs);
        let p = f.pow(e1).mul(&g.pow(e2)).scale(&q(c));
        let s1 = squarefree_part(&p);
        prop_assert_eq!(squarefree_part(&s1.clone()), s1.clone());
        prop_assert!(p.div_exact(&s1).is_some());
        // gcd(sf, d sf/dv) is constant for every occurring variable.
        for v in ["x", "y"] {
            if s1.degree(v) > 0 {
                prop_assert!(gcd_poly(&s1, &s1.partial(v)).is_constant());
            }
        }
    }

    #[test]
    fn factor_multiplicity_reconstructs(
        k in 0u32..=3,
        (f, qq) in (Just(VarSet::new(["x", "y"]))).prop_flat_map(|vs| {
            (arb_poly(&vs, 3, 2), arb_poly(&vs, 3, 2))
        })
    ) {
        prop_assume!(!f.is_constant() && !f.is_zero());
        prop_assume!(!qq.is_zero());
        let p = f.pow(k).mul(&qq);
        let (m, cof) = factor_multiplicity(&p, &f);
        prop_assert!(m >= k);
        prop_assert_eq!(f.pow(m).mul(&cof), p);
        prop_assert!(cof.div_exact(&f).is_none());
    }
}
