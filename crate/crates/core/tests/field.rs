use lrpc::field::{poly, BinaryExt, ExtField, Gf2m, PrimeExt};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Products checked against schoolbook polynomial arithmetic over 𝔽_q.
fn check_against_polynomials<F: ExtField>(field: &F, trials: usize, seed: u64) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let base = field.base();
    for _ in 0..trials {
        let a = field.random(&mut rng);
        let b = field.random(&mut rng);
        let want = poly::mulmod(base, &field.coords(&a), &field.coords(&b), field.modulus());
        let mut got = field.coords(&field.mul(&a, &b));
        poly::trim(&mut got);
        assert_eq!(got, want, "q={} m={}", field.q(), field.m());
        if !field.is_zero(&a) {
            let inv = field.inv(&a).unwrap();
            assert_eq!(field.mul(&a, &inv), field.one());
        }
        let mut bytes = Vec::new();
        field.write_bytes(&a, &mut bytes);
        assert_eq!(bytes.len(), field.element_bytes());
        assert_eq!(field.read_bytes(&bytes).unwrap(), a);
    }
    assert!(field.inv(&field.zero()).is_err());
}

#[test]
fn binary_fields_match_polynomial_oracle() {
    for m in [1usize, 2, 3, 4, 5, 7, 13, 61, 71, 89, 113, 127] {
        let f = Gf2m::new(m).unwrap();
        check_against_polynomials(&f, 200, m as u64);
        check_against_polynomials(&f.clone().portable(), 200, m as u64);
    }
}

#[test]
fn bitsliced_fields_match_polynomial_oracle() {
    for m in [1usize, 2, 5, 31, 46, 49, 127] {
        check_against_polynomials(&BinaryExt::<2>::new(m).unwrap(), 100, m as u64);
        check_against_polynomials(&BinaryExt::<2>::new(m).unwrap().portable(), 100, m as u64);
    }
    for m in [3usize, 52, 55] {
        check_against_polynomials(&BinaryExt::<3>::new(m).unwrap(), 100, m as u64);
        check_against_polynomials(&BinaryExt::<3>::new(m).unwrap().portable(), 100, m as u64);
    }
    for m in [4usize, 31, 62] {
        check_against_polynomials(&BinaryExt::<4>::new(m).unwrap(), 100, m as u64);
    }
    check_against_polynomials(&BinaryExt::<8>::new(9).unwrap(), 100, 1);
}

#[test]
fn prime_fields_match_polynomial_oracle() {
    for (q, m) in [(3u32, 1usize), (3, 7), (3, 40), (5, 11), (7, 5), (251, 3)] {
        check_against_polynomials(&PrimeExt::new(q, m).unwrap(), 100, q as u64 * 1000 + m as u64);
    }
    assert!(PrimeExt::new(4, 3).is_err());
    assert!(PrimeExt::new(2, 3).is_err());
}

/// Log/antilog tables of 𝔽_{2^8} built from a brute-forced generator.
#[test]
fn gf256_matches_log_tables() {
    let f = Gf2m::new(8).unwrap();
    let all: Vec<[u128; 1]> = (1u128..256).map(|x| [x]).collect();
    // naive powering by repeated multiplication in the schoolbook oracle
    let naive_mul = |a: u128, b: u128| -> u128 {
        let c = poly::mulmod(f.base(), &f.coords(&[a]), &f.coords(&[b]), f.modulus());
        c.iter().enumerate().fold(0u128, |acc, (i, &x)| acc | ((x as u128) << i))
    };
    let generator = (2u128..256)
        .find(|&g| {
            let mut x = 1u128;
            (1..255).all(|_| {
                x = naive_mul(x, g);
                x != 1
            })
        })
        .unwrap();
    let mut exp = vec![0u128; 255];
    let mut log = vec![0usize; 256];
    let mut x = 1u128;
    for (i, e) in exp.iter_mut().enumerate() {
        *e = x;
        log[x as usize] = i;
        x = naive_mul(x, generator);
    }
    for a in &all {
        for b in &all {
            let want = exp[(log[a[0] as usize] + log[b[0] as usize]) % 255];
            assert_eq!(f.mul(a, b)[0], want);
        }
        assert_eq!(f.inv(a).unwrap()[0], exp[(255 - log[a[0] as usize]) % 255]);
    }
}

#[test]
fn moduli_for_shipped_degrees_are_pinned() {
    // sparse exponent lists; a change here breaks every stored key
    let pinned: [(usize, &[usize]); 9] = [
        (61, &[61, 5, 2, 1, 0]),
        (71, &[71, 5, 3, 1, 0]),
        (79, &[79, 4, 3, 2, 0]),
        (80, &[80, 7, 5, 3, 2, 1, 0]),
        (89, &[89, 6, 5, 3, 0]),
        (97, &[97, 6, 0]),
        (101, &[101, 7, 6, 1, 0]),
        (107, &[107, 7, 5, 3, 2, 1, 0]),
        (113, &[113, 5, 3, 2, 0]),
    ];
    for (m, exps) in pinned {
        let f = Gf2m::new(m).unwrap();
        let got: Vec<usize> = (0..=m).rev().filter(|&i| f.modulus()[i] == 1).collect();
        assert_eq!(got, exps, "m={m}");
    }
}

#[test]
fn unfolding_rank_is_rank_weight() {
    let f = BinaryExt::<2>::new(10).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    for _ in 0..100 {
        let n = rng.gen_range(1..8);
        let v: Vec<[u128; 2]> = (0..n).map(|_| f.random(&mut rng)).collect();
        let unfolded = lrpc::matrix::FqMatrix::from_rows(&lrpc::field::unfold(&f, &v));
        assert_eq!(unfolded.rank(f.base()), lrpc::field::rank_weight(&f, &v));
    }
}

fn gf2_71() -> &'static Gf2m {
    static F: std::sync::OnceLock<Gf2m> = std::sync::OnceLock::new();
    F.get_or_init(|| Gf2m::new(71).unwrap())
}

fn gf16_31() -> &'static BinaryExt<4> {
    static F: std::sync::OnceLock<BinaryExt<4>> = std::sync::OnceLock::new();
    F.get_or_init(|| BinaryExt::<4>::new(31).unwrap())
}

proptest! {
    #[test]
    fn ring_axioms_gf2_71(a in any::<u128>(), b in any::<u128>(), c in any::<u128>()) {
        let f = gf2_71();
        let mask = (1u128 << 71) - 1;
        let (a, b, c) = ([a & mask], [b & mask], [c & mask]);
        prop_assert_eq!(f.mul(&a, &f.mul(&b, &c)), f.mul(&f.mul(&a, &b), &c));
        prop_assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
        prop_assert_eq!(f.mul(&a, &b), f.mul(&b, &a));
    }

    #[test]
    fn scalar_action_is_linear_q16(a in any::<[u128; 4]>(), c in 0u8..16, d in 0u8..16) {
        let f = gf16_31();
        let mask = (1u128 << 31) - 1;
        let a = a.map(|p| p & mask);
        let cd = f.base().add(c, d);
        prop_assert_eq!(f.scale(&a, cd), f.add(&f.scale(&a, c), &f.scale(&a, d)));
        let embedded = f.from_coords(&[c]);
        prop_assert_eq!(f.scale(&a, c), f.mul(&a, &embedded));
    }
}
