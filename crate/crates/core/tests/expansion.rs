use lrpc::analysis::{contamination_rate, fprob_codim1_failure_q2};
use lrpc::expansion::{
    expand, expand_crypto, expand_fdecode, expand_fprob, rsr, ExpansionConfig, ExpansionFunction, ExpansionStatus,
};
use lrpc::field::{ExtField, Gf2m};
use lrpc::sim::{plant_instance, Cell, Planting};
use lrpc::subspace::Subspace;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

type Planted<E> = (Subspace<E>, Vec<E>, Subspace<E>);

/// Random E and F with dim EF = rd; returns (E, F basis, EF).
fn product_space<F: ExtField>(field: &F, r: usize, d: usize, rng: &mut ChaCha20Rng) -> Planted<F::Elem> {
    loop {
        let (e, _) = Subspace::random(field, r, rng).unwrap();
        let (f, _) = Subspace::random(field, d, rng).unwrap();
        let ef = e.product(field, &f);
        if ef.dim() == r * d {
            return (e, f.basis().to_vec(), ef);
        }
    }
}

#[test]
fn complete_inputs_are_returned_unchanged() {
    let f = Gf2m::new(41).unwrap();
    let mut g = rng(1);
    for (r, d) in [(2, 3), (3, 4), (4, 2)] {
        let (_, fb, ef) = product_space(&f, r, d, &mut g);
        for x in [expand_fdecode(&f, &ef, &fb, r).unwrap(), expand_fprob(&f, &ef, &fb, r).unwrap()] {
            assert_eq!(x.status, ExpansionStatus::Reached);
            assert_eq!(x.space, ef);
            assert_eq!(x.report.passes, 0);
            assert_eq!(x.report.intersections, 0);
            assert_eq!(x.report.dims_visited, vec![r * d]);
        }
    }
}

#[test]
fn crypto_expansion_uses_a_fixed_number_of_intersections() {
    let f = Gf2m::new(41).unwrap();
    let mut g = rng(2);
    let r = 2;
    for d in 3..=8 {
        let (_, fb, ef) = product_space(&f, r, d, &mut g);
        // complete input, then a deficient one
        let partial = Subspace::span(&f, &ef.basis()[..r * d - 2]);
        for s in [&ef, &partial] {
            let x = expand_crypto(&f, s, &fb, r).unwrap();
            assert_eq!(x.status, ExpansionStatus::Completed);
            assert_eq!(x.report.intersections as usize, (d - 1) + (d - 2), "d = {d}");
            assert_eq!(x.report.passes, 1);
        }
    }
}

#[test]
fn preconditions_are_enforced() {
    let f = Gf2m::new(13).unwrap();
    let mut g = rng(3);
    let (_, fb, ef) = product_space(&f, 2, 3, &mut g);
    // 3rd − 2 = 16 > 13
    assert!(expand_fdecode(&f, &ef, &fb, 2).is_err());
    let mut cfg = ExpansionConfig::new(ExpansionFunction::Fdecode);
    cfg.check_m = false;
    assert!(expand(&f, &ef, &fb, 2, cfg).is_ok());
    // 2rd − r = 10 ≤ 13
    assert!(expand_fprob(&f, &ef, &fb, 2).is_ok());
    assert!(expand_crypto(&f, &ef, &fb[..2], 2).is_err());
    assert!(expand_fprob(&f, &ef, &fb[..1], 2).is_err());
    assert!(expand_fprob(&f, &ef, &fb, 0).is_err());
}

#[test]
fn expansion_stays_inside_the_product_space() {
    let f = Gf2m::new(43).unwrap();
    let cases = [
        (ExpansionFunction::Fdecode, Cell { q: 2, m: 43, n: 16, k: 8, d: 2, r: 3 }),
        (ExpansionFunction::Fprob, Cell { q: 2, m: 43, n: 20, k: 10, d: 3, r: 3 }),
        (ExpansionFunction::Fprob, Cell { q: 2, m: 43, n: 24, k: 12, d: 4, r: 3 }),
        (ExpansionFunction::Crypto, Cell { q: 2, m: 43, n: 20, k: 10, d: 3, r: 3 }),
        (ExpansionFunction::Crypto, Cell { q: 2, m: 43, n: 24, k: 12, d: 4, r: 3 }),
    ];
    for (function, cell) in cases {
        for c in 1..=2 {
            for seed in 0..30 {
                let inst = plant_instance(&f, cell, Planting::ForcedCodim(c), &mut rng(100 + seed)).unwrap();
                let mut cfg = ExpansionConfig::new(function);
                cfg.record_snapshots = true;
                let x = expand(&f, &inst.truth.syndrome_space, inst.code.f_basis(), cell.r, cfg).unwrap();
                assert!(inst.truth.syndrome_space.is_subspace_of(&f, &x.space));
                for snap in &x.report.snapshots {
                    assert!(snap.is_subspace_of(&f, &inst.truth.ef), "{function:?} {cell:?} c = {c} seed {seed}");
                }
                assert!(x.space.dim() <= cell.rd());
            }
        }
    }
}

/// With d ≥ 3 the f_decode tuples with j = l share the vectors
/// f_i·f_k·f_j⁻¹·e for every e with f_i·e, f_k·e ∈ S, and those lie outside
/// EF. Below the guard they are accepted.
#[test]
fn fdecode_tuples_with_a_shared_denominator_can_leave_the_product_space() {
    let f = Gf2m::new(43).unwrap();
    let cell = Cell { q: 2, m: 43, n: 20, k: 10, d: 3, r: 3 };
    let mut escaped = 0;
    for seed in 0..60 {
        let inst = plant_instance(&f, cell, Planting::ForcedCodim(2), &mut rng(600 + seed)).unwrap();
        let s = &inst.truth.syndrome_space;
        let fb = inst.code.f_basis();
        let (fi, fj, fk) = (&fb[0], &fb[1], &fb[2]);
        let sj = s.scalar_shift(&f, fj).unwrap();
        let a = s.sum(&f, &sj.scale_by(&f, fi));
        let b = s.sum(&f, &sj.scale_by(&f, fk));
        let both = a.intersect(&f, &b);
        // e ∈ E with f_i·e, f_k·e ∈ S
        let common = inst
            .truth
            .e_space
            .intersect(&f, &s.scalar_shift(&f, fi).unwrap())
            .intersect(&f, &s.scalar_shift(&f, fk).unwrap());
        let ratio = f.mul(&f.mul(fi, fk), &f.inv(fj).unwrap());
        for e in common.basis() {
            let v = f.mul(&ratio, e);
            assert!(both.contains(&f, &v));
            assert!(!inst.truth.ef.contains(&f, &v));
        }
        let x = expand_fdecode(&f, s, fb, cell.r).unwrap();
        escaped += usize::from(!x.space.is_subspace_of(&f, &inst.truth.ef));
    }
    assert!(escaped > 0);
}

#[test]
fn iterated_expansion_is_monotone_and_bounded_by_the_codimension() {
    let f = Gf2m::new(43).unwrap();
    let cases = [
        (ExpansionFunction::Fdecode, Cell { q: 2, m: 43, n: 12, k: 6, d: 2, r: 3 }, 2),
        (ExpansionFunction::Fprob, Cell { q: 2, m: 43, n: 20, k: 12, d: 3, r: 3 }, 3),
    ];
    for (function, cell, max_c) in cases {
        for c in 1..=max_c {
            for seed in 0..20 {
                let inst = plant_instance(&f, cell, Planting::ForcedCodim(c), &mut rng(200 + seed)).unwrap();
                let x =
                    expand(&f, &inst.truth.syndrome_space, inst.code.f_basis(), cell.r, ExpansionConfig::new(function))
                        .unwrap();
                let dims = &x.report.dims_visited;
                assert_eq!(dims[0], cell.rd() - c);
                assert_eq!(dims.len(), x.report.passes + 1);
                assert!(dims.windows(2).all(|w| w[0] <= w[1]));
                if x.reached() {
                    assert!(x.report.passes <= c);
                    assert_eq!(x.space, inst.truth.ef);
                } else {
                    assert!(x.report.passes <= c + 1);
                }
            }
        }
    }
}

#[test]
fn rsr_of_zero_syndrome_is_the_zero_support() {
    let f = Gf2m::new(41).unwrap();
    let mut g = rng(4);
    let (_, fb, _) = product_space(&f, 3, 4, &mut g);
    let out = rsr(&f, &fb, &[f.zero(); 12], 3).unwrap();
    assert_eq!(out.support, Some(Subspace::zero()));
    assert_eq!(out.report.intersections, 0);
}

#[test]
fn rsr_recovers_codimension_one_supports() {
    let f = Gf2m::new(40).unwrap();
    let cell = Cell { q: 2, m: 40, n: 22, k: 11, d: 4, r: 3 };
    let trials = 400;
    let mut failures = 0;
    for seed in 0..trials {
        let inst = plant_instance(&f, cell, Planting::ForcedCodim(1), &mut rng(300 + seed)).unwrap();
        let out = rsr(&f, inst.code.f_basis(), &inst.syndrome, cell.r).unwrap();
        match out.support {
            Some(e) => assert_eq!(e, inst.truth.e_space, "seed {seed}"),
            None => failures += 1,
        }
    }
    // bound q^{(1−r)(d−2)} = 1/16; allow sampling noise
    let rate = failures as f64 / trials as f64;
    assert!(rate <= 2.0 * fprob_codim1_failure_q2(2, 4, 3), "rate {rate}");
}

#[test]
fn large_codimension_gives_failure_not_a_wrong_support() {
    let f = Gf2m::new(41).unwrap();
    let cell = Cell { q: 2, m: 41, n: 24, k: 12, d: 4, r: 4 };
    let mut failures = 0;
    for seed in 0..100 {
        let inst = plant_instance(&f, cell, Planting::ForcedCodim(4), &mut rng(400 + seed)).unwrap();
        let out = rsr(&f, inst.code.f_basis(), &inst.syndrome, cell.r).unwrap();
        match out.support {
            Some(e) => assert_eq!(e, inst.truth.e_space, "seed {seed}"),
            None => failures += 1,
        }
    }
    assert!(failures > 50, "{failures}");
}

#[test]
fn contamination_of_pairwise_intersections_matches_the_estimate() {
    let (m, r, d) = (13, 2, 3);
    let f = Gf2m::new(m).unwrap();
    let mut g = rng(5);
    let trials = 4000;
    let mut contaminated = 0;
    for _ in 0..trials {
        let (e, fb, ef) = product_space(&f, r, d, &mut g);
        let s0 = ef.scalar_shift(&f, &fb[0]).unwrap();
        let s1 = ef.scalar_shift(&f, &fb[1]).unwrap();
        let x = s0.intersect(&f, &s1);
        assert!(e.is_subspace_of(&f, &x));
        contaminated += usize::from(x.dim() > r);
    }
    let rate = contaminated as f64 / trials as f64;
    let est = contamination_rate(2, m, r, d);
    assert!(rate > est / 2.0 && rate < est * 2.0, "rate {rate} vs {est}");
}

#[test]
fn operation_counts_follow_the_loop_shape() {
    let f = Gf2m::new(43).unwrap();
    let cell = Cell { q: 2, m: 43, n: 20, k: 12, d: 3, r: 3 };
    let d = cell.d as u64;
    for seed in 0..10 {
        let inst = plant_instance(&f, cell, Planting::ForcedCodim(2), &mut rng(500 + seed)).unwrap();
        let s = &inst.truth.syndrome_space;
        let fb = inst.code.f_basis();
        let fd = expand_fdecode(&f, s, fb, cell.r).unwrap();
        let pairs = d * (d - 1);
        assert!(fd.report.intersections <= fd.report.passes as u64 * pairs * (pairs - 1));
        let fp = expand_fprob(&f, s, fb, cell.r).unwrap();
        // at most one fresh intersection per ordered pair, plus recomputation after each acceptance
        assert!(fp.report.intersections <= (fp.report.passes as u64 + fp.report.accepted as u64) * pairs);
        assert!(fp.report.linalg_ops > 0 && fd.report.linalg_ops > 0);
    }
}
