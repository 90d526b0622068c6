//! Property tests for the arithmetic and linear-algebra substrate.

use dho_core::field::FieldCtx;
use dho_core::linalg::{BitForm, BitMat, BitSubspace};
use dho_core::opsets::trace_form;
use proptest::prelude::*;

fn f512() -> FieldCtx {
    FieldCtx::new(2, 9, None).unwrap()
}

proptest! {
    #[test]
    fn trace_is_additive_and_transitive(x in 0u64..512, y in 0u64..512) {
        let f = f512();
        prop_assert_eq!(
            f.rel_trace(f.add(x, y), 3).unwrap(),
            f.add(f.rel_trace(x, 3).unwrap(), f.rel_trace(y, 3).unwrap())
        );
        // absolute trace factors through the relative one
        let t = f.rel_trace(x, 3).unwrap();
        let mut down = 0;
        let mut u = t;
        for _ in 0..3 {
            down = f.add(down, u);
            u = f.frobenius(u, 1);
        }
        prop_assert_eq!(f.abs_trace(x), down);
    }

    #[test]
    fn frobenius_is_a_field_automorphism(x in 0u64..512, y in 0u64..512, j in 0u32..9) {
        let f = f512();
        prop_assert_eq!(f.frobenius(f.add(x, y), j), f.add(f.frobenius(x, j), f.frobenius(y, j)));
        prop_assert_eq!(f.frobenius(f.mul(x, y), j), f.mul(f.frobenius(x, j), f.frobenius(y, j)));
        prop_assert_eq!(f.frobenius(x, 9), x);
    }

    #[test]
    fn rank_one_basics(a in 1u32..512, b in 1u32..512) {
        // nonzero inputs give rank exactly one, with E_{b,a} adjoint to E_{a,b}
        let f = f512();
        let form = trace_form(&f);
        let e = form.rank_one(a, b);
        prop_assert_eq!(e.rank(), 1);
        prop_assert_eq!(form.adjoint(&e), form.rank_one(b, a));
    }

    #[test]
    fn rank_one_scaling_invariance_f4(a in 1u64..64, b in 1u64..64, k in 1u64..4) {
        // E_{ka, k^{-1}b} = E_{a,b} for scalars k of the base field F_4
        let f64 = FieldCtx::new(2, 6, None).unwrap();
        let split = dho_core::linalg::SubfieldSplit::new(&f64, 2).unwrap();
        let sub = &split.sub;
        let form = dho_core::linalg::FForm::new(sub, split.trace_gram(&f64)).unwrap();
        let va = split.coords(a).to_vec();
        let vb = split.coords(b).to_vec();
        let scale = |c: u64, v: &[u64]| -> Vec<u64> { v.iter().map(|&x| sub.mul(c, x)).collect() };
        let lhs = form.rank_one(sub, &scale(k, &va), &scale(sub.inv(k), &vb));
        prop_assert_eq!(lhs, form.rank_one(sub, &va, &vb));
    }

    #[test]
    fn subspace_modular_law(rows_a in proptest::collection::vec(0u32..256, 1..4),
                            rows_b in proptest::collection::vec(0u32..256, 1..4)) {
        let a = BitSubspace::from_rows(8, rows_a);
        let b = BitSubspace::from_rows(8, rows_b);
        let inter = a.intersect(&b);
        let sum = a.sum(&b);
        prop_assert_eq!(inter.dim() + sum.dim(), a.dim() + b.dim());
        prop_assert!(sum.contains_space(&a));
        prop_assert!(a.contains_space(&inter));
    }

    #[test]
    fn adjoint_is_involutive_antiautomorphism(rows_s in proptest::collection::vec(0u32..32, 5),
                                              rows_t in proptest::collection::vec(0u32..32, 5)) {
        let f = FieldCtx::new(2, 5, None).unwrap();
        let form = trace_form(&f);
        let s = BitMat::from_rows(5, rows_s);
        let t = BitMat::from_rows(5, rows_t);
        prop_assert_eq!(form.adjoint(&form.adjoint(&t)), t.clone());
        prop_assert_eq!(form.adjoint(&s.mul(&t)), form.adjoint(&t).mul(&form.adjoint(&s)));
    }

    #[test]
    fn orthonormalization_reaches_the_dot_form(seed in 0u64..5000) {
        // random symmetric invertible gram with at least one diagonal 1
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15) | 1;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let n = 6;
        let mut rows = vec![0u32; n];
        for i in 0..n {
            for j in 0..=i {
                if next() & 1 == 1 {
                    rows[i] |= 1 << j;
                    rows[j] |= 1 << i;
                }
            }
        }
        let gram = BitMat::from_rows(n, rows);
        prop_assume!(gram.is_invertible());
        prop_assume!(gram.diagonal() != 0);
        let form = BitForm::new(gram.clone()).unwrap();
        let s = form.orthonormal_basis().unwrap();
        prop_assert_eq!(s.mul(&gram).mul(&s.transpose()), BitMat::identity(n));
    }
}
