use proptest::prelude::*;

use unitgraph::chars::{char_exponent_mat, Cyclotomic};
use unitgraph::gap::find_invertible_difference;
use unitgraph::gf::FieldCtx;
use unitgraph::matfq::{MatFq, MatrixSpace};
use unitgraph::spectra::{mult_landsberg, spectrum_n3, trace_identity_check};

const ORDERS: [u64; 8] = [2, 3, 4, 5, 7, 8, 9, 25];

fn field() -> impl Strategy<Value = std::sync::Arc<FieldCtx>> {
    prop::sample::select(ORDERS.to_vec()).prop_map(|q| FieldCtx::from_order(q).unwrap())
}

fn matrices(n: usize, count: usize) -> impl Strategy<Value = Vec<MatFq>> {
    field().prop_flat_map(move |f| {
        let q = f.q();
        prop::collection::vec(prop::collection::vec(0..q, n * n), count).prop_map(move |ms| {
            ms.into_iter()
                .map(|e| MatFq::from_values(&f, n, e).unwrap())
                .collect()
        })
    })
}

proptest! {
    #[test]
    fn field_axioms(f in field(), a in 0u32..1000, b in 0u32..1000, c in 0u32..1000) {
        let q = f.q();
        let (a, b, c) = (f.element(a % q).unwrap(), f.element(b % q).unwrap(), f.element(c % q).unwrap());
        let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
        let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.sub(&a).unwrap(), f.zero());
        if !a.is_zero() {
            prop_assert_eq!(a.mul(&a.inv().unwrap()).unwrap(), f.one());
            prop_assert_eq!(a.pow(q as u64 - 1), f.one());
        }
        // trace is additive and lands in the prime field
        let t = |x: &unitgraph::gf::FieldElement| x.abs_trace();
        prop_assert_eq!(t(&a.add(&b).unwrap()), (t(&a) + t(&b)) % f.p());
    }

    #[test]
    fn determinant_is_multiplicative(ms in matrices(3, 2)) {
        let (a, b) = (&ms[0], &ms[1]);
        prop_assert_eq!(a.mul(b).unwrap().det(), a.det().mul(&b.det()).unwrap());
        prop_assert_eq!(a.is_invertible(), a.rank() == 3);
        prop_assert_eq!(a.neg().is_invertible(), a.is_invertible());
    }

    #[test]
    fn character_is_additive(ms in matrices(2, 3)) {
        let (a, b, c) = (&ms[0], &ms[1], &ms[2]);
        let p = a.ctx().p();
        let sum = char_exponent_mat(a, &b.add(c).unwrap()).unwrap();
        let parts = char_exponent_mat(a, b).unwrap() + char_exponent_mat(a, c).unwrap();
        prop_assert_eq!(sum, parts % p);
        // the pairing is symmetric: tr(AB) = tr(BA)
        prop_assert_eq!(char_exponent_mat(a, b).unwrap(), char_exponent_mat(b, a).unwrap());
    }

    #[test]
    fn index_arithmetic(ms in matrices(2, 2)) {
        let space = MatrixSpace::new(ms[0].ctx(), 2, u64::MAX).unwrap();
        let (i, j) = (space.index_of(&ms[0]).unwrap(), space.index_of(&ms[1]).unwrap());
        prop_assert_eq!(space.matrix(i), ms[0].clone());
        prop_assert_eq!(space.matrix(space.sub_index(i, j)), ms[0].sub(&ms[1]).unwrap());
    }

    #[test]
    fn cyclotomic_ring_laws(p in prop::sample::select(vec![2u32, 3, 5, 7]),
                            xs in prop::collection::vec(-50i64..50, 7),
                            ys in prop::collection::vec(-50i64..50, 7),
                            zs in prop::collection::vec(-50i64..50, 7)) {
        let mk = |v: &[i64]| Cyclotomic::from_coeffs(p, v[..p as usize].to_vec()).unwrap();
        let (x, y, z) = (mk(&xs), mk(&ys), mk(&zs));
        prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
        prop_assert_eq!(
            x.mul(&y.add(&z).unwrap()).unwrap(),
            x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap()
        );
        prop_assert_eq!(x.conj().conj(), x.clone());
        prop_assert!(x.add(&x.scale(-1).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn closed_spectrum_identities(q in 2u64..200) {
        let s = spectrum_n3(q).unwrap();
        prop_assert!(trace_identity_check(&s));
        prop_assert_eq!(s.total_multiplicity().unwrap(), (q as i128).pow(9));
        for n in 1..=4usize {
            let total: i128 = (0..=n).map(|r| mult_landsberg(q.min(40), n, r).unwrap()).sum();
            prop_assert_eq!(total, (q.min(40) as i128).pow((n * n) as u32));
        }
    }

    #[test]
    fn witness_existence_is_symmetric(xs in prop::collection::vec(0u64..512, 1..12),
                                      ys in prop::collection::vec(0u64..512, 1..12)) {
        let f2 = FieldCtx::prime(2).unwrap();
        let space = MatrixSpace::new(&f2, 3, u64::MAX).unwrap();
        let x: Vec<MatFq> = xs.iter().map(|&i| space.matrix(i)).collect();
        let y: Vec<MatFq> = ys.iter().map(|&i| space.matrix(i)).collect();
        let forward = find_invertible_difference(&x, &y).unwrap();
        let backward = find_invertible_difference(&y, &x).unwrap();
        prop_assert_eq!(forward.is_some(), backward.is_some());
        if let Some(w) = forward {
            prop_assert!(w.b.sub(&w.a).unwrap().is_invertible());
        }
    }
}
