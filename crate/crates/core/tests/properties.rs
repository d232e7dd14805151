mod common;

use nalgebra::DVector;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use common::*;
use subprod_core::bilinear::{
    eval_m, extract_bilinear, factor_via_inverse_closed, nullstellensatz_degree_bound,
    FactorOptions,
};
use subprod_core::catalog::{lower_triangular, symmetric, unit_upper_constant_diagonal};
use subprod_core::geometry::psi_rank;
use subprod_core::mats::eye;
use subprod_core::pencil::{
    chain_factor, craig_sakamoto_check, glft_check, minrank, zero_product_probe, MinrankOptions,
};
use subprod_core::subspace::random_matrix;
use subprod_core::{numerical_rank, Field, Mat64, MatrixSubspace64, Tolerances, C};

fn tols() -> Tolerances {
    Tolerances::default()
}

fn field_of(real: bool) -> Field {
    if real {
        Field::Real
    } else {
        Field::Complex
    }
}

fn random_subspace(n: usize, d: usize, field: Field, seed: u64) -> MatrixSubspace64 {
    let mats = (0..d as u64)
        .map(|i| random_matrix(n, field, seed.wrapping_mul(1000).wrapping_add(i)))
        .collect();
    MatrixSubspace64::from_matrices(mats, field, tols()).unwrap()
}

fn gaussian(len: usize, field: Field, seed: u64) -> DVector<C<f64>> {
    let mut r = rng(seed);
    DVector::from_fn(len, |_, _| {
        let re: f64 = StandardNormal.sample(&mut r);
        let im: f64 = if field == Field::Real {
            0.0
        } else {
            StandardNormal.sample(&mut r)
        };
        C::new(re, im)
    })
}

fn c(x: f64) -> C<f64> {
    C::new(x, 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_is_idempotent(n in 2usize..5, d in 1usize..7, seed in any::<u64>(), real in any::<bool>()) {
        let field = field_of(real);
        let s = random_subspace(n, d, field, seed);
        let a = random_matrix(n, field, seed ^ 0xabc);
        let p = s.project(&a).unwrap();
        let m = s.membership(&p).unwrap();
        prop_assert!(m.inside);
        prop_assert!(m.residual < s.tol() * fro(&p).max(1.0));
        prop_assert!(fro(&(s.project(&p).unwrap() - &p)) < 1e-12 * fro(&p).max(1.0));
    }

    #[test]
    fn orthonormal_basis_reproduces_dimension(n in 2usize..5, d in 1usize..9, seed in any::<u64>(), real in any::<bool>()) {
        let field = field_of(real);
        let s = random_subspace(n, d, field, seed);
        let again = MatrixSubspace64::from_matrices(s.ortho_matrices(), field, tols()).unwrap();
        prop_assert_eq!(again.dim(), s.dim());
        prop_assert!(again.same_span(&s));
    }

    #[test]
    fn equivalence_transform_round_trip(n in 2usize..5, d in 1usize..6, seed in any::<u64>()) {
        let s = random_subspace(n, d, Field::Complex, seed);
        let x = random_matrix(n, Field::Complex, seed ^ 1);
        let y = random_matrix(n, Field::Complex, seed ^ 2);
        let there = s.equivalence_transform(&x, &y).unwrap();
        let back = there
            .equivalence_transform(&x.clone().try_inverse().unwrap(), &y.clone().try_inverse().unwrap())
            .unwrap();
        for b in s.raw_basis() {
            let m = back.membership(b).unwrap();
            prop_assert!(m.residual < 10.0 * s.tol() * fro(b).max(1.0), "{}", m.residual);
        }
    }

    #[test]
    fn numerical_rank_matches_exact_rank(
        len in 1usize..7,
        count in 1usize..7,
        target in 1usize..7,
        seed in any::<u64>(),
    ) {
        // vectors drawn from a `target`-dimensional integer lattice
        let mut r = rng(seed);
        let gens: Vec<Vec<i64>> = (0..target)
            .map(|_| (0..len).map(|_| r.random_range(-4i64..=4)).collect())
            .collect();
        let vectors: Vec<Vec<i64>> = (0..count)
            .map(|_| {
                let coef: Vec<i64> = (0..target).map(|_| r.random_range(-3i64..=3)).collect();
                (0..len).map(|i| gens.iter().zip(&coef).map(|(g, k)| g[i] * k).sum()).collect()
            })
            .collect();
        let expect = exact_rank(&vectors);
        let as_c: Vec<Vec<C<f64>>> = vectors
            .iter()
            .map(|v| v.iter().map(|&x| c(x as f64)).collect())
            .collect();
        let got = numerical_rank(&as_c, &tols()).unwrap();
        prop_assert_eq!(got, expect);
    }

    #[test]
    fn psi_rank_matches_exact_tangent_rank(n in 2usize..5, k in 1usize..4, seed in any::<u64>(), swap in any::<bool>()) {
        let k = k.min(n);
        let (b1, b2) = if swap {
            (ib_rank_rows(n, k), ib_rank_cols(n, k))
        } else {
            (ib_symmetric(n), ib_persymmetric(n))
        };
        let mut r = rng(seed);
        let v1 = icombination(&b1, 3, &mut r);
        let v2 = icombination(&b2, 3, &mut r);
        let span = |b: &[IMat]| {
            MatrixSubspace64::from_matrices(b.iter().map(to_mat).collect(), Field::Real, tols()).unwrap()
        };
        let got = psi_rank(&span(&b1), &span(&b2), &to_mat(&v1), &to_mat(&v2)).unwrap();
        prop_assert_eq!(got, exact_tangent_rank(&b1, &b2, &v1, &v2));
    }

    #[test]
    fn certified_minrank_is_equivalence_invariant(n in 2usize..6, mult in 1usize..4, seed in any::<u64>()) {
        let mult = mult.min(n);
        // W = P·diag(λ repeated mult times, distinct others)·P⁻¹
        let p = random_matrix(n, Field::Complex, seed);
        let mut d = Mat64::zeros(n, n);
        for i in 0..n {
            d[(i, i)] = if i < mult { c(0.5) } else { c(2.0 + i as f64) };
        }
        let w = &p * d * p.clone().try_inverse().unwrap();
        let y = random_matrix(n, Field::Complex, seed ^ 7);
        let s = MatrixSubspace64::from_matrices(vec![y.clone(), &w * &y], Field::Complex, tols()).unwrap();
        let base = minrank(&s, &MinrankOptions::default()).unwrap();
        prop_assert!(base.certified);
        prop_assert_eq!(base.value, if mult == n { n } else { n - mult });
        let x = random_matrix(n, Field::Complex, seed ^ 8);
        let z = random_matrix(n, Field::Complex, seed ^ 9);
        let moved = s.equivalence_transform(&x, &z).unwrap();
        let r = minrank(&moved, &MinrankOptions::default()).unwrap();
        prop_assert!(r.certified);
        prop_assert_eq!(r.value, base.value);
    }

    #[test]
    fn craig_sakamoto_booleans_agree(n in 2usize..6, split in 1usize..5, seed in any::<u64>(), orthogonal in any::<bool>()) {
        let split = split.min(n - 1);
        let (x1, x2) = if orthogonal {
            orthogonal_symmetric_pair(n, split, seed)
        } else {
            let g1 = random_matrix(n, Field::Real, seed);
            let g2 = random_matrix(n, Field::Real, seed ^ 3);
            (&g1 + g1.transpose(), &g2 + g2.transpose())
        };
        let cs = craig_sakamoto_check(&x1, &x2, n + 3, &tols()).unwrap();
        prop_assert_eq!(cs.zero_product, cs.det_identity);
        prop_assert_eq!(cs.zero_product, orthogonal);
    }

    #[test]
    fn chain_factor_reconstructs(n in 2usize..9, k in 1usize..6, seed in any::<u64>(), t_re in 0.2f64..3.0) {
        let k = k.min(n - 1);
        let xs = disjoint_chain(n, k, seed);
        let t = C::new(t_re, -0.5);
        let factors = chain_factor(t, &xs, &tols()).unwrap();
        let product = factors.iter().skip(1).fold(factors[0].clone(), |acc, f| acc * f);
        let target = xs.iter().fold(eye::<f64>(n) * t, |acc, x| acc + x);
        prop_assert!(fro(&(product - &target)) < 1e-10 * fro(&target));
    }

    #[test]
    fn probe_is_no_worse_than_grid_oracle(seed in any::<u64>()) {
        let a = [random_matrix(2, Field::Real, seed), random_matrix(2, Field::Real, seed ^ 11)];
        let b = [random_matrix(2, Field::Real, seed ^ 12), random_matrix(2, Field::Real, seed ^ 13)];
        let s1 = MatrixSubspace64::from_matrices(a.to_vec(), Field::Real, tols()).unwrap();
        let s2 = MatrixSubspace64::from_matrices(b.to_vec(), Field::Real, tols()).unwrap();
        let probe = zero_product_probe(&s1, &s2, 10, seed).unwrap();
        let grid = grid_min_product(&a, &b, 120);
        prop_assert!(probe.min_product_norm <= grid + 1e-9, "probe {} grid {}", probe.min_product_norm, grid);
    }

    #[test]
    fn bilinear_model_reproduces_products(d1 in 1usize..4, d2 in 1usize..4, seed in any::<u64>(), real in any::<bool>()) {
        let field = field_of(real);
        let s1 = random_subspace(3, d1, field, seed);
        let s2 = random_subspace(3, d2, field, seed ^ 5);
        let model = extract_bilinear(&s1, &s2).unwrap();
        let z = gaussian(model.j, field, seed ^ 21);
        let w = gaussian(model.kmj, field, seed ^ 22);
        let coords = model.apply(&z, &w).unwrap();
        let lhs = model.lin_element(&coords).unwrap();
        let rhs = s1.element(&z).unwrap() * s2.element(&w).unwrap();
        prop_assert!(fro(&(lhs - &rhs)) < 1e-10 * fro(&rhs).max(1.0));

        // bidegree (1, 1)
        let (sa, sb) = (C::new(1.5, -0.25), C::new(-0.75, 2.0));
        let scaled = eval_m(&model, &(&z * sa)).unwrap() * (&w * sb);
        let plain = eval_m(&model, &z).unwrap() * &w * (sa * sb);
        prop_assert!((scaled - &plain).norm() < 1e-12 * plain.norm().max(1.0));
    }

    #[test]
    fn factorization_meets_all_contracts(n in 2usize..6, seed in any::<u64>(), sym in any::<bool>()) {
        let (s1, s2) = if sym {
            let n = n.min(4);
            (symmetric::<f64>(n, Field::Real, tols()), symmetric(n, Field::Real, tols()))
        } else {
            (lower_triangular::<f64>(n, Field::Real, tols()), unit_upper_constant_diagonal(n, Field::Real, tols()))
        };
        let a = random_matrix(s1.n(), Field::Real, seed);
        match factor_via_inverse_closed(&a, &s1, &s2, &FactorOptions { seed, ..Default::default() }) {
            Ok(f) => {
                prop_assert!(s1.membership(&f.v1).unwrap().inside);
                prop_assert!(s2.membership(&f.v2).unwrap().inside);
                prop_assert!(f.relative_error < s1.tol());
            }
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn glft_witness_iff_gram_determinant_vanishes(n in 2usize..4, seed in any::<u64>(), planted in any::<bool>()) {
        let x2 = random_matrix(n, Field::Complex, seed);
        let x1 = if planted {
            let coef = gaussian(4, Field::Complex, seed ^ 31);
            let id = eye::<f64>(n);
            let num = &x2 * coef[0] - &id * coef[1];
            let den = &x2 * coef[2] - &id * coef[3];
            num * den.try_inverse().unwrap()
        } else {
            random_matrix(n, Field::Complex, seed ^ 32)
        };
        let gens = [eye::<f64>(n), x1.clone(), x2.clone(), &x1 * &x2];
        let gram = Mat64::from_fn(4, 4, |i, j| {
            gens[i].iter().zip(gens[j].iter()).map(|(a, b)| a.conj() * b).sum::<C<f64>>()
        });
        let norms: f64 = gens.iter().map(|g| fro(g).powi(2)).product();
        let rel_det = gram.determinant().norm() / norms;
        let dependent = rel_det < 1e-12;
        let w = glft_check(&x1, &x2, &tols()).unwrap();
        prop_assert_eq!(w.is_some(), dependent, "rel_det {:e}", rel_det);
        prop_assert_eq!(dependent, planted);
    }

    #[test]
    fn degree_bound_is_the_formula(d in 2u32..12, n in 1u32..12, k in 1u32..12) {
        let expect: u128 = if d >= 3 {
            (0..n).fold(1u128, |acc, _| acc * d as u128)
        } else {
            (0..n.min(k)).fold(1u128, |acc, _| acc * 2)
        };
        prop_assert_eq!(nullstellensatz_degree_bound(d, n, k).unwrap(), expect);
    }
}

/// `k` strictly upper-triangular blocks with disjoint supports and
/// `X_j·X_l = 0` for `j < l`.
pub fn disjoint_chain(n: usize, k: usize, seed: u64) -> Vec<Mat64> {
    // split 0..n into k+1 nonempty consecutive blocks
    let bounds: Vec<usize> = (0..=k + 1).map(|b| b * n / (k + 1)).collect();
    let block = |b: usize| bounds[b]..bounds[b + 1];
    let g = random_matrix(n, Field::Complex, seed);
    (1..=k)
        .map(|j| {
            let (rows, cols) = (block(k - j), block(k - j + 1));
            let mut x = Mat64::zeros(n, n);
            for i in rows.clone() {
                for l in cols.clone() {
                    x[(i, l)] = g[(i, l)];
                }
            }
            x
        })
        .collect()
}
