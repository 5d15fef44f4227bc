use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use egrq_core::arith::{self, factor, is_squarefree_i64, kronecker_i64, squarefree_part_i64};
use egrq_core::constructor::{norm_equation_solvable, solve_norm_equation};
use egrq_core::quadfield::valuation;
use egrq_core::reduction::{tate, verify_egr};
use egrq_core::setzer::{self, GoodTable, Status};
use egrq_core::{CurveModel, FieldElement, QuadraticField};

fn table() -> &'static GoodTable {
    static T: OnceLock<GoodTable> = OnceLock::new();
    T.get_or_init(|| setzer::scan_good_d(10_000).unwrap())
}

fn squarefree_ms(bound: i64) -> Vec<i64> {
    (-bound..=bound)
        .filter(|&m| m != 0 && m != 1 && is_squarefree_i64(m))
        .collect()
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-1000i64..=1000, 1i64..=60).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
}

fn field_m() -> impl Strategy<Value = i64> {
    prop::sample::select(vec![
        -259, -15, -7, -5, -3, -2, -1, 2, 3, 5, 6, 7, 29, 33, 77, 395,
    ])
}

// arith

proptest! {
    #[test]
    fn squarefree_part_reconstructs(n in -1_000_000_000_000i64..=1_000_000_000_000) {
        prop_assume!(n != 0);
        let (d, t) = squarefree_part_i64(n).unwrap();
        prop_assert_eq!(d as i128 * (t as i128).pow(2), n as i128);
        prop_assert!(is_squarefree_i64(d));
    }
}

#[test]
fn kronecker_is_multiplicative_at_odd_primes() {
    for p in arith::sieve_primes(100).into_iter().filter(|&p| p > 2) {
        let p = p as i64;
        for a in -99i64..100 {
            for b in -99i64..100 {
                assert_eq!(
                    kronecker_i64(a, p) * kronecker_i64(b, p),
                    kronecker_i64(a * b, p),
                    "a = {a}, b = {b}, p = {p}"
                );
            }
        }
    }
}

#[test]
fn factor_reconstructs_random_integers() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100_000 {
        let n: i64 = rng.gen_range(-1_000_000_000_000..=1_000_000_000_000);
        if n == 0 {
            continue;
        }
        let f = factor(&BigInt::from(n)).unwrap();
        assert_eq!(f.value(), BigInt::from(n));
        assert!(f.primes().all(arith::is_prime));
    }
}

// quadfield

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]
    #[test]
    fn norm_is_multiplicative(m in field_m(), a in rational(), b in rational(), c in rational(), d in rational()) {
        let k = QuadraticField::new(m).unwrap();
        let x = FieldElement::new(k, a, b);
        let y = FieldElement::new(k, c, d);
        prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    /// `v_p(N x) = sum over P | p of f_P v_P(x)`.
    #[test]
    fn valuations_sum_to_norm_valuation(
        m in field_m(),
        p in prop::sample::select(arith::sieve_primes(50)),
        a in -5000i64..5000,
        b in -5000i64..5000,
    ) {
        let k = QuadraticField::new(m).unwrap();
        let x = &k.int(a) + &(&k.theta() * &k.int(b));
        prop_assume!(!x.is_zero());
        let n = x.norm().to_integer();
        let mut total = 0i64;
        for ideal in k.split_prime(p).unwrap() {
            total += ideal.residue_degree() as i64 * valuation(&x, &ideal).unwrap();
        }
        prop_assert_eq!(total, arith::valuation(&n, p) as i64);
    }
}

#[test]
fn integrality_matches_case_analysis() {
    for m in [-7, -5, -3, -2, -1, 2, 3, 5, 13, 29] {
        let k = QuadraticField::new(m).unwrap();
        for an in -12i64..=12 {
            for bn in -12i64..=12 {
                for den in 1i64..=4 {
                    let a = BigRational::new(an.into(), den.into());
                    let b = BigRational::new(bn.into(), den.into());
                    let x = FieldElement::new(k, a.clone(), b.clone());
                    let two_a = &a * BigRational::from_integer(2.into());
                    let two_b = &b * BigRational::from_integer(2.into());
                    let expect = if m.rem_euclid(4) == 1 {
                        two_a.is_integer()
                            && two_b.is_integer()
                            && (two_a.to_integer() - two_b.to_integer()).is_even()
                    } else {
                        a.is_integer() && b.is_integer()
                    };
                    assert_eq!(x.is_integral(), expect, "{x}");
                }
            }
        }
    }
}

// setzer

#[test]
fn good_d_records_satisfy_identities() {
    for r in table().records() {
        let k = (r.a as i128).pow(3) - 1728;
        assert_eq!(r.d as i128 * (r.t as i128).pow(2), k);
        assert_eq!(
            9 * k,
            r.d as i128 * (r.d1 as i128).pow(2) * (r.d2 as i128).pow(4)
        );
        assert!(is_squarefree_i64(r.d) && is_squarefree_i64(r.d1 as i64));
    }
}

#[test]
fn decide_ignores_candidate_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for m in squarefree_ms(150) {
        let cands = setzer::candidates(m).unwrap();
        let base = setzer::decide_over(m, &cands, table(), 8).unwrap();
        for _ in 0..3 {
            let mut shuffled = cands.clone();
            shuffled.shuffle(&mut rng);
            let v = setzer::decide_over(m, &shuffled, table(), 8).unwrap();
            assert_eq!(v.status, base.status, "m = {m}");
            assert_eq!(
                v.witness.as_ref().map(|w| (w.record.d, w.q)),
                base.witness.as_ref().map(|w| (w.record.d, w.q)),
                "m = {m}"
            );
        }
    }
}

/// Passing (a)-(e) makes `D x^2 - q y^2 = eps_D z^2` solvable; multiplying by
/// `D` this is `X^2 - m y^2 = eps_D D z^2`.
#[test]
fn passing_conditions_give_a_solvable_conic() {
    let mut passing = 0;
    for m in squarefree_ms(500) {
        for (d, q) in setzer::candidates(m).unwrap() {
            if !setzer::check_conditions(d, q).unwrap().pass() {
                continue;
            }
            passing += 1;
            let c = setzer::epsilon(d) as i64 * d;
            assert!(norm_equation_solvable(m, c), "D = {d}, q = {q}");
            let s = solve_norm_equation(m, c).unwrap();
            assert!(s.holds());
            assert_eq!(s.alpha.norm(), BigRational::from_integer(c.into()));
        }
    }
    assert!(passing > 100);
}

#[test]
fn every_yes_carries_a_verified_witness() {
    let mut yes = 0;
    for m in squarefree_ms(120) {
        let v = setzer::decide(m, table()).unwrap();
        if v.status != Status::Yes {
            assert!(v.witness.is_none());
            continue;
        }
        yes += 1;
        let w = v.witness.unwrap();
        let (egr, reports) = verify_egr(&w.curve).unwrap();
        assert!(egr, "m = {m}");
        assert!(reports.iter().all(|r| r.is_good()));
        assert_eq!(
            w.u.norm().abs(),
            (w.beta.norm()
                * BigRational::from_integer(w.record.d1.into()).pow(2)
                * rho_norm_factor(&w))
            .abs()
        );
    }
    assert!(yes >= 10, "{yes}");
}

fn rho_norm_factor(w: &egrq_core::Witness) -> BigRational {
    use egrq_core::constructor::{rho, UBranch};
    match w.branch {
        UBranch::Plus | UBranch::Minus => BigRational::one(),
        UBranch::PlusRho | UBranch::MinusRho => rho(w.u.field()).norm(),
    }
}

// reduction

fn sample_curves() -> Vec<CurveModel> {
    let mut out = Vec::new();
    for m in [6, 7, 14, 22, 26, 33, -259, 37, 65] {
        let v = setzer::decide(m, table()).unwrap();
        out.push(v.witness.unwrap().curve);
    }
    let k = QuadraticField::new(29).unwrap();
    let half = BigRational::new(1.into(), 2.into());
    let a = FieldElement::new(k, BigRational::from_integer(5.into()) * &half, half);
    let z = FieldElement::zero(k);
    out.push(CurveModel::new(k, [k.int(1), z.clone(), &a * &a, z.clone(), z]).unwrap());
    for (m, a4, a6) in [
        (6, -1, 0),
        (-7, 0, 1),
        (29, -25, 0),
        (5, 0, 3125),
        (2, -75, 875),
        (-1, 4, 4),
    ] {
        let k = QuadraticField::new(m).unwrap();
        out.push(CurveModel::short(k, k.int(a4), k.int(a6)).unwrap());
    }
    let k = QuadraticField::new(6).unwrap();
    out.push(CurveModel::short(k, k.int(0), k.sqrt_m()).unwrap());
    out
}

fn unit_of(k: QuadraticField) -> FieldElement {
    match k.m() {
        6 => FieldElement::from_ints(k, 5, 2),
        7 => FieldElement::from_ints(k, 8, 3),
        14 => FieldElement::from_ints(k, 15, 4),
        22 => FieldElement::from_ints(k, 197, 42),
        2 => FieldElement::from_ints(k, 1, 1),
        _ => k.int(-1),
    }
}

#[test]
fn egr_verdict_is_model_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let curves = sample_curves();
    assert!(curves.len() >= 16);
    for e in &curves {
        let (verdict, _) = verify_egr(e).unwrap();
        let k = e.field();
        for _ in 0..3 {
            let mut small =
                || &k.int(rng.gen_range(-4..=4)) + &(&k.theta() * &k.int(rng.gen_range(-4..=4)));
            let (r, s, t) = (small(), small(), small());
            let scale = match rng.gen_range(0..3) {
                0 => unit_of(k),
                1 => unit_of(k).inverse().unwrap(),
                _ => k.int(rng.gen_range(2..=5)).inverse().unwrap(),
            };
            let moved = e.rst(&r, &s, &t).scale_down(&scale);
            let (v2, _) = verify_egr(&moved).unwrap();
            assert_eq!(
                verdict, v2,
                "{e} moved by r = {r}, s = {s}, t = {t}, u = {scale}"
            );
        }
    }
}

#[test]
fn minimal_valuations_are_consistent() {
    for e in sample_curves() {
        let (egr, reports) = verify_egr(&e).unwrap();
        let mut norm_min = BigRational::one();
        for r in &reports {
            let p = BigInt::from(r.prime.p());
            norm_min *= BigRational::from_integer(p.pow(r.prime.residue_degree() * r.v_min_delta));
            if e.is_integral() {
                let v = valuation(e.discriminant(), &r.prime).unwrap();
                assert!(v >= r.v_min_delta as i64 && (v - r.v_min_delta as i64) % 12 == 0);
                assert_eq!(tate(&e, &r.prime).unwrap(), *r);
            }
        }
        assert_eq!(egr, norm_min.is_one(), "{e}");
        assert_eq!(egr, reports.iter().all(|r| r.is_good()));
    }
}
