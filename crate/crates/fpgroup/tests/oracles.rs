//! Abelianization and enumeration against independent computations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use pqw_fpgroup::{
    abelianization, smith_normal_form, todd_coxeter, EnumerationLimits, IntMatrix, Presentation, Word,
};

/// Invariant factors as ratios of determinantal divisors: `d_k` is the gcd
/// of all `k x k` minors and the `k`-th factor is `d_k / d_{k-1}`.
fn determinantal_factors(m: &[Vec<i64>]) -> Vec<BigInt> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut out = Vec::new();
    let mut prev = BigInt::from(1);
    for k in 1..=rows.min(cols) {
        let mut d = BigInt::zero();
        for r in subsets(rows, k) {
            for c in subsets(cols, k) {
                let minor: Vec<Vec<BigInt>> =
                    r.iter().map(|&i| c.iter().map(|&j| BigInt::from(m[i][j])).collect()).collect();
                d = d.gcd(&det(&minor));
            }
        }
        if d.is_zero() {
            break;
        }
        out.push(&d / &prev);
        prev = d;
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut with: Vec<Vec<usize>> = subsets(n - 1, k - 1);
    for s in &mut with {
        s.push(n - 1);
    }
    let mut all = subsets(n - 1, k);
    all.extend(with);
    all
}

fn det(m: &[Vec<BigInt>]) -> BigInt {
    if m.len() == 1 {
        return m[0][0].clone();
    }
    let mut total = BigInt::zero();
    for j in 0..m.len() {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> =
            m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| v.clone()).collect()).collect();
        let t = &m[0][j] * det(&minor);
        if j % 2 == 0 {
            total += t;
        } else {
            total -= t;
        }
    }
    total
}

fn exponent_matrix(p: &Presentation) -> Vec<Vec<i64>> {
    p.relators().iter().map(|r| r.exponent_vector(p.generator_count())).collect()
}

fn torsion_of(factors: &[BigInt]) -> Vec<u64> {
    factors.iter().filter(|d| **d > BigInt::from(1)).map(|d| d.try_into().unwrap()).collect()
}

fn orbifold_text(indices: &[u32]) -> String {
    let names: Vec<String> = (1..=indices.len()).map(|k| format!("c{k}")).collect();
    let mut s = format!("gens: {}\n", names.join(" "));
    for (n, m) in names.iter().zip(indices) {
        s.push_str(&format!("rel: {n}^{m}\n"));
    }
    s.push_str(&format!("rel: {}\n", names.join(" ")));
    s
}

#[test]
fn triangle_group_4_4_4() {
    let p = Presentation::parse(&orbifold_text(&[4, 4, 4])).unwrap();
    let oracle = determinantal_factors(&exponent_matrix(&p));
    assert_eq!(oracle, [1, 4, 4].map(BigInt::from));
    let ab = abelianization(&p);
    assert_eq!((ab.free_rank, ab.torsion_u64()), (0, torsion_of(&oracle)));
    assert_eq!(ab.torsion_u64(), [4, 4]);
}

#[test]
fn six_involutions() {
    let p = Presentation::parse(&orbifold_text(&[2; 6])).unwrap();
    let oracle = determinantal_factors(&exponent_matrix(&p));
    assert_eq!(torsion_of(&oracle), [2; 5]);
    let ab = abelianization(&p);
    assert_eq!((ab.free_rank, ab.torsion_u64()), (0, vec![2; 5]));
}

#[test]
fn free_group_abelianizes_freely() {
    let p = Presentation::parse("gens: a b\n").unwrap();
    let ab = abelianization(&p);
    assert_eq!((ab.free_rank, ab.torsion.len()), (2, 0));
}

#[test]
fn diag_2_3() {
    let m = IntMatrix::from_i64(2, 2, &[2, 0, 0, 3]);
    let s = smith_normal_form(&m);
    assert_eq!(s.invariant_factors(), determinantal_factors(&[vec![2, 0], vec![0, 3]]));
    assert_eq!(s.invariant_factors(), [1, 6].map(BigInt::from));
}

#[test]
fn klein_four_by_hand() {
    let p = Presentation::parse("gens: a b\nrel: a^2\nrel: b^2\nrel: a b a b\n").unwrap();
    assert_eq!(todd_coxeter(&p, &[], EnumerationLimits::default()).unwrap().index(), Some(4));
}

#[test]
fn commuting_cyclic_sweep() {
    for m in 1..=8 {
        for n in 1..=8 {
            let p = Presentation::parse(&format!("gens: a b\nrel: a^{m}\nrel: b^{n}\nrel: a b -a -b\n")).unwrap();
            let e = todd_coxeter(&p, &[], EnumerationLimits::default()).unwrap();
            assert_eq!(e.index(), Some(m * n), "Z{m} x Z{n}");
            let t = e.table().unwrap();
            for g in 0..2 {
                let mut perm = t.permutation(g);
                perm.sort_unstable();
                assert_eq!(perm, (0..m * n).collect::<Vec<_>>());
            }
            for r in p.relators() {
                assert!((0..t.len()).all(|c| t.trace(c, r) == c));
            }
        }
    }
}

proptest! {
    #[test]
    fn snf_matches_determinantal_divisors(rows in 1usize..4, cols in 1usize..4, seed in proptest::collection::vec(-9i64..10, 16)) {
        let m: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| seed[i * 4 + j]).collect()).collect();
        let s = smith_normal_form(&IntMatrix::from_i64(rows, cols, &m.concat()));
        let nonzero: Vec<BigInt> = s.invariant_factors().into_iter().filter(|d| !d.is_zero()).map(|d| d.abs()).collect();
        prop_assert_eq!(nonzero, determinantal_factors(&m));
    }

    #[test]
    fn relator_words_round_trip(letters in proptest::collection::vec(prop_oneof![-3i32..0, 1i32..4], 1..12)) {
        let w = Word::new(letters);
        prop_assume!(!w.is_empty());
        let p = Presentation::with_default_names(3, vec![w]).unwrap();
        let q = Presentation::parse(&p.to_text()).unwrap();
        prop_assert_eq!(q.to_text(), p.to_text());
    }
}
