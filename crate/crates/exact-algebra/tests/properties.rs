//! Randomized algebraic laws for the polynomial layer, plus the symbolic
//! elimination oracle for generic rank.

use exact_algebra::{q, MultiPoly, PolyMatrix, Q, RationalFunction, Var, VarSet};
use proptest::prelude::*;

fn vs3() -> VarSet {
    VarSet::coords_and_params(3, &['p'])
}

/// Random sparse polynomial in up to 4 symbols, small degree.
fn arb_poly() -> impl Strategy<Value = MultiPoly> {
    let term = (
        prop::collection::vec(0u16..3, 4),
        -6i64..=6,
        1i64..=3,
    );
    prop::collection::vec(term, 0..6).prop_map(|terms| {
        let vars = vs3();
        let mut acc = MultiPoly::zero(&vars);
        for (exps, n, d) in terms {
            acc = acc.add(&MultiPoly::monomial(&vars, exps, Q::new(n.into(), d.into())));
        }
        acc
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_distributivity(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
        prop_assert_eq!(a.add(&b).mul(&c), a.mul(&c).add(&b.mul(&c)));
    }

    #[test]
    fn ring_associativity(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
    }

    #[test]
    fn gcd_divides_and_cofactors_coprime(a in arb_poly(), b in arb_poly()) {
        let g = MultiPoly::gcd(&a, &b);
        if !a.is_zero() || !b.is_zero() {
            prop_assert!(!g.is_zero());
            let ca = a.divide_exact(&g);
            let cb = b.divide_exact(&g);
            prop_assert!(ca.is_some() && cb.is_some());
            if !a.is_zero() && !b.is_zero() {
                let g2 = MultiPoly::gcd(&ca.unwrap(), &cb.unwrap());
                prop_assert!(g2.is_constant());
            }
        }
    }

    #[test]
    fn gcd_recognizes_common_factor(a in arb_poly(), b in arb_poly(), f in arb_poly()) {
        prop_assume!(!f.is_constant());
        prop_assume!(!a.is_zero() || !b.is_zero());
        let g = MultiPoly::gcd(&a.mul(&f), &b.mul(&f));
        prop_assert!(a.mul(&f).divide_exact(&g).is_some());
        // f divides the gcd of multiples of f.
        prop_assert!(g.divide_exact(&f.primitive_part()).is_some());
    }

    #[test]
    fn rational_function_field_laws(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
        prop_assume!(!b.is_zero() && !c.is_zero());
        let x = RationalFunction::new(a.clone(), b.clone());
        let y = RationalFunction::new(c.clone(), b.clone());
        prop_assert_eq!(x.add(&y), RationalFunction::new(a.add(&c), b.clone()));
        if !a.is_zero() {
            prop_assert_eq!(x.div(&x), RationalFunction::one(&vs3()));
        }
    }
}

/// Symbolic rank by fraction-free elimination over the polynomial entries;
/// independent of the random-evaluation path it cross-checks.
fn symbolic_rank(m: &PolyMatrix<MultiPoly>) -> usize {
    let rf = m.map(|p| RationalFunction::from_poly(p.clone()));
    let mut a = rf.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let piv = (row..rows).find(|&i| !a.at(i, col).is_zero());
        let piv = match piv {
            Some(p) => p,
            None => continue,
        };
        for j in 0..cols {
            let tmp = a.at(piv, j).clone();
            a.set(piv, j, a.at(row, j).clone());
            a.set(row, j, tmp);
        }
        let inv = a.at(row, col).clone();
        for i in row + 1..rows {
            if a.at(i, col).is_zero() {
                continue;
            }
            let f = a.at(i, col).div(&inv);
            for j in 0..cols {
                let v = a.at(i, j).sub(&f.mul(a.at(row, j)));
                a.set(i, j, v);
            }
        }
        rank += 1;
        row += 1;
    }
    rank
}

#[test]
fn generic_rank_matches_symbolic_elimination() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let vars = vs3();
    let mono = |i: usize| MultiPoly::var(&vars, Var::Coord((i % 3 + 1) as u32));
    for trial in 0..30 {
        let n = 2 + trial % 5;
        let m = PolyMatrix::from_fn(n, n, |i, j| {
            match rng.gen_range(0..4) {
                0 => MultiPoly::zero(&vars),
                1 => mono(i + j),
                2 => mono(i).add(&mono(j + 1)),
                _ => mono(i).mul(&mono(j)).scale(&q(rng.gen_range(-3..=3))),
            }
        });
        let mut seed = 1u64;
        let sampled = m
            .generic_rank(
                |vs: &VarSet| {
                    seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    let mut s = seed;
                    Ok(vs
                        .vars()
                        .iter()
                        .map(|_| {
                            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                            q((s >> 40) as i64 % 1_000_000 + 7)
                        })
                        .collect())
                },
                5,
            )
            .unwrap();
        assert_eq!(sampled, symbolic_rank(&m), "matrix {trial}");
    }
}

#[test]
fn congruence_preserves_determinant_square() {
    // det(P M P^T) = det(P)^2 det(M) for integer P, exact.
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let vars = vs3();
    for _ in 0..10 {
        let n = 4;
        let m = PolyMatrix::from_fn(n, n, |i, j| {
            if i < j {
                MultiPoly::var(&vars, Var::Coord(((i + j) % 3 + 1) as u32))
                    .scale(&q(rng.gen_range(-2..=2)))
            } else if i > j {
                MultiPoly::zero(&vars)
            } else {
                MultiPoly::constant(&vars, q(rng.gen_range(1..=3)))
            }
        });
        // Make it symmetric-free: use M as-is (any square matrix works).
        let p = PolyMatrix::from_fn(n, n, |i, j| {
            MultiPoly::constant(&vars, q(if i == j { 1 } else { rng.gen_range(-1..=1) }))
        });
        let pm = mat_mul(&p, &m);
        let pt = PolyMatrix::from_fn(n, n, |i, j| p.at(j, i).clone());
        let pmpt = mat_mul(&pm, &pt);
        let dp = p.bareiss_determinant().unwrap();
        let dm = m.bareiss_determinant().unwrap();
        let lhs = pmpt.bareiss_determinant().unwrap();
        assert_eq!(lhs, dp.mul(&dp).mul(&dm));
    }
}

fn mat_mul(a: &PolyMatrix<MultiPoly>, b: &PolyMatrix<MultiPoly>) -> PolyMatrix<MultiPoly> {
    let vars = a.vars().unwrap().clone();
    PolyMatrix::from_fn(a.rows(), b.cols(), |i, j| {
        let mut acc = MultiPoly::zero(&vars);
        for k in 0..a.cols() {
            acc = acc.add(&a.at(i, k).mul(b.at(k, j)));
        }
        acc
    })
}

#[test]
fn pfaffian_squares_to_determinant_on_random_skew() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    let vars = vs3();
    for n in [2usize, 4, 6, 8] {
        let mut upper = std::collections::HashMap::new();
        for i in 0..n {
            for j in i + 1..n {
                let e: MultiPoly = match rng.gen_range(0..3) {
                    0 => MultiPoly::zero(&vars),
                    1 => MultiPoly::var(&vars, Var::Coord(rng.gen_range(1..=3))),
                    _ => MultiPoly::constant(&vars, q(rng.gen_range(-3..=3))),
                };
                upper.insert((i, j), e);
            }
        }
        let m = PolyMatrix::from_fn(n, n, |i, j| {
            if i < j {
                upper[&(i, j)].clone()
            } else if i > j {
                upper[&(j, i)].neg()
            } else {
                MultiPoly::zero(&vars)
            }
        });
        let pf = m.pfaffian().unwrap();
        assert_eq!(pf.mul(&pf), m.bareiss_determinant().unwrap(), "dim {n}");
    }
}
