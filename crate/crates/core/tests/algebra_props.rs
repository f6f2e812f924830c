mod common;

use common::{modulus, oracle_matvec, oracle_mul};
use proptest::prelude::*;
use quatl1::{
    cone_membership, embed_vec4, extract_solution, interleave, left_mult_block, build_socp, NormOrder, QMatrix,
    QVector, Quaternion,
};

fn quat() -> impl Strategy<Value = Quaternion> {
    prop::array::uniform4(-10.0f64..10.0).prop_map(|c| Quaternion::from_components(c).unwrap())
}

fn qvec(max_len: usize) -> impl Strategy<Value = QVector> {
    prop::collection::vec(quat(), 0..=max_len).prop_map(QVector::new)
}

fn close(a: [f64; 4], b: [f64; 4], tol: f64) -> bool {
    a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= tol)
}

fn scale_of(qs: &[Quaternion]) -> f64 {
    qs.iter().map(|q| q.modulus()).product::<f64>().max(1.0)
}

proptest! {
    #[test]
    fn product_matches_oracle(p in quat(), q in quat()) {
        prop_assert!(close(p.mul(q).components(), oracle_mul(p.components(), q.components()), 1e-12 * scale_of(&[p, q])));
    }

    #[test]
    fn modulus_is_multiplicative(p in quat(), q in quat()) {
        let lhs = (p * q).modulus();
        let rhs = p.modulus() * q.modulus();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300));
    }

    #[test]
    fn conjugation_reverses_products(p in quat(), q in quat()) {
        let lhs = (p * q).conj().components();
        let rhs = (q.conj() * p.conj()).components();
        prop_assert!(close(lhs, rhs, 1e-12 * scale_of(&[p, q])));
    }

    #[test]
    fn times_conjugate_is_squared_modulus(q in quat()) {
        let prod = (q * q.conj()).components();
        let tol = 1e-12 * scale_of(&[q, q]);
        prop_assert!((prod[0] - q.norm_sqr()).abs() <= tol);
        prop_assert!(prod[1..].iter().all(|v| v.abs() <= tol));
    }

    #[test]
    fn multiplication_is_associative(p in quat(), q in quat(), r in quat()) {
        let lhs = ((p * q) * r).components();
        let rhs = (p * (q * r)).components();
        prop_assert!(close(lhs, rhs, 1e-12 * scale_of(&[p, q, r])));
    }

    #[test]
    fn l2_never_exceeds_l1(x in qvec(12)) {
        prop_assert!(x.norm(NormOrder::L2) <= x.norm(NormOrder::L1) * (1.0 + 1e-15));
    }

    #[test]
    fn left_block_applies_product(q in quat(), x in quat()) {
        let m = left_mult_block(q);
        let xs = x.components();
        let applied: [f64; 4] = std::array::from_fn(|r| (0..4).map(|c| m[r][c] * xs[c]).sum());
        prop_assert!(close(applied, oracle_mul(q.components(), xs), 1e-12 * scale_of(&[q, x])));
    }

    #[test]
    fn embedding_is_a_homomorphism(
        (a, x, t) in (1usize..=6, 1usize..=8).prop_flat_map(|(n, m)| (
            prop::collection::vec(quat(), n * m).prop_map(move |e| QMatrix::new(n, m, e).unwrap()),
            prop::collection::vec(quat(), m).prop_map(QVector::new),
            prop::collection::vec(-5.0f64..5.0, m),
        ))
    ) {
        let emb = build_socp(&a, &QVector::zeros(a.rows())).unwrap();
        let lhs = &emb.a_hat * interleave(&t, &x).unwrap();
        let y: QVector = oracle_matvec(&a, &x).into_iter().map(|c| Quaternion::from_components(c).unwrap()).collect();
        let rhs = embed_vec4(&y);
        prop_assert!((lhs - rhs).amax() <= 1e-12 * 100.0);
    }

    #[test]
    fn interleave_round_trips(x in qvec(8), seed in any::<u64>()) {
        let t: Vec<f64> = (0..x.len()).map(|i| (seed.wrapping_mul(i as u64 + 1) % 1000) as f64 / 7.0).collect();
        let (back, t_back) = extract_solution(interleave(&t, &x).unwrap().as_slice(), x.len()).unwrap();
        prop_assert_eq!(back, x);
        prop_assert_eq!(t_back, t);
    }

    #[test]
    fn block_norms_sum_to_l1(x in qvec(8)) {
        let t = vec![0.0; x.len()];
        let v = interleave(&t, &x).unwrap();
        let from_layout: f64 = v.as_slice().chunks(5).map(|b| modulus([b[1], b[2], b[3], b[4]])).sum();
        prop_assert!((from_layout - x.norm(NormOrder::L1)).abs() <= 1e-12 * (1.0 + from_layout));
    }

    #[test]
    fn objective_sums_bounds(
        x in prop::collection::vec(quat(), 1..=8).prop_map(QVector::new),
        quarters in prop::collection::vec(0u32..4096, 8),
    ) {
        // dyadic bounds keep every partial sum exact in any summation order
        let t: Vec<f64> = quarters[..x.len()].iter().map(|&k| k as f64 / 4.0).collect();
        let emb = build_socp(&QMatrix::from_fn(1, x.len(), |_, _| Quaternion::ONE), &QVector::zeros(1)).unwrap();
        let v = interleave(&t, &x).unwrap();
        prop_assert_eq!(emb.c_hat.dot(&v), t.iter().sum::<f64>());
    }

    #[test]
    fn modulus_bounds_lie_in_the_cones(x in qvec(8)) {
        let t: Vec<f64> = x.iter().map(|q| q.modulus()).collect();
        let v = interleave(&t, &x).unwrap();
        prop_assert!(cone_membership(v.as_slice(), &vec![5; x.len()], 1e-12).unwrap());
    }
}

#[test]
fn multiplication_table() {
    use Quaternion as Q;
    let neg_one = Q::from_real(-1.0).unwrap();
    assert_eq!(Q::I * Q::I, neg_one);
    assert_eq!(Q::J * Q::J, neg_one);
    assert_eq!(Q::K * Q::K, neg_one);
    assert_eq!(Q::I * Q::J, Q::K);
    assert_eq!(Q::J * Q::K, Q::I);
    assert_eq!(Q::K * Q::I, Q::J);
    assert_eq!(Q::J * Q::I, -Q::K);
    assert_eq!(Q::K * Q::J, -Q::I);
    assert_eq!(Q::I * Q::K, -Q::J);
}

#[test]
fn unit_blocks_match_basis_products() {
    for (q, name) in [(Quaternion::ONE, "1"), (Quaternion::I, "i"), (Quaternion::J, "j"), (Quaternion::K, "k")] {
        let m = left_mult_block(q);
        for c in 0..4 {
            let mut unit = [0.0; 4];
            unit[c] = 1.0;
            let expected = oracle_mul(q.components(), unit);
            for r in 0..4 {
                assert_eq!(m[r][c], expected[r], "unit {name}, entry ({r}, {c})");
            }
        }
    }
}

#[test]
fn matvec_matches_component_oracle() {
    let mut rng = common::rng(11);
    for _ in 0..20 {
        let a = common::rand_qmat(&mut rng, 3, 4);
        let x = common::rand_qvec(&mut rng, 4);
        let y = a.mul_vec(&x).unwrap();
        for (got, want) in y.iter().zip(oracle_matvec(&a, &x)) {
            assert!(close(got.components(), want, 1e-12));
        }
    }
}

#[test]
fn embedded_shapes() {
    let a = QMatrix::from_fn(1, 2, |_, c| if c == 0 { Quaternion::I } else { Quaternion::ONE });
    let emb = build_socp(&a, &QVector::zeros(1)).unwrap();
    assert_eq!(emb.c_hat.len(), 10);
    assert_eq!(emb.a_hat.shape(), (4, 10));
    assert_eq!(emb.y_hat.len(), 4);
    assert_eq!(emb.cone_dims, vec![5, 5]);
}
