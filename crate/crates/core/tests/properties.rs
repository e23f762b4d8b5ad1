use proptest::prelude::*;

use qsine::classical::solve::{dst1, extend_antisymmetric};
use qsine::io::{read_f64_binary, write_f64_binary};
use qsine::polyenc::{build_comparator, multinomial_angles, target_angle};
use qsine::reflection::{build_forward_shift, ShiftImpl};
use qsine::StateVector;

fn basis_image(c: &qsine::Circuit, index: usize) -> (usize, f64) {
    let mut s = StateVector::init_basis(c.num_qubits(), index).unwrap();
    s.apply_circuit(c).unwrap();
    let (i, a) = s
        .amplitudes()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .unwrap();
    (i, a.norm())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn comparator_sets_flag(n in 2usize..=7, t_frac in 0.0..1.0f64, k_frac in 0.0..1.0f64, flag in any::<bool>()) {
        let size = 1usize << n;
        let t = 1 + ((size - 1) as f64 * t_frac) as usize;
        let k = ((size as f64) * k_frac) as usize % size;
        let c = build_comparator(n, t).unwrap();
        let q = c.num_qubits();
        let input = (k << (q - n)) | (usize::from(flag) << (q - n - 1));
        let (out, amp) = basis_image(&c, input);
        let want = (k << (q - n)) | (usize::from(flag ^ (k >= t)) << (q - n - 1));
        prop_assert!((amp - 1.0).abs() < 1e-12);
        prop_assert_eq!(out, want);
    }

    #[test]
    fn forward_shift_is_increment(m in 2usize..=8, k_frac in 0.0..1.0f64, ripple in any::<bool>()) {
        let imp = if ripple { ShiftImpl::Ripple } else { ShiftImpl::Mcx };
        let c = build_forward_shift(m, imp).unwrap();
        let anc = c.num_qubits() - m;
        let k = ((1usize << m) as f64 * k_frac) as usize % (1 << m);
        let (out, amp) = basis_image(&c, k << anc);
        prop_assert!((amp - 1.0).abs() < 1e-12);
        prop_assert_eq!(out, ((k + 1) % (1 << m)) << anc);
    }

    #[test]
    fn multinomial_angles_sum_to_polynomial(
        m in 1usize..=6,
        coeffs in prop::collection::vec(-1.0..1.0f64, 1..=5),
    ) {
        let angles = multinomial_angles(&coeffs, m);
        for k in 0..1usize << m {
            let got: f64 = angles
                .iter()
                .filter(|a| {
                    (0..m).all(|s| a.subset >> s & 1 == 0 || k >> (m - 1 - s) & 1 == 1)
                })
                .map(|a| a.angle)
                .sum();
            let want = coeffs.iter().rev().fold(0.0, |acc, a| acc * k as f64 + a);
            prop_assert!((got - want).abs() <= 1e-9 * (1.0 + want.abs()), "k={} got {} want {}", k, got, want);
        }
    }

    #[test]
    fn antisymmetric_extension_is_odd(f in prop::collection::vec(-1.0..1.0f64, 1..=64)) {
        let mut f = f;
        f[0] = 0.0;
        let e = extend_antisymmetric(&f).unwrap();
        let n = e.len();
        prop_assert_eq!(n, 2 * f.len());
        for j in 1..n {
            prop_assert_eq!(e[j], -e[n - j]);
        }
        prop_assert_eq!(e[f.len()], 0.0);
    }

    #[test]
    fn sine_transform_is_an_involution(l in 2u32..=9, seed in any::<u64>()) {
        let m = 1usize << l;
        let f: Vec<f64> = (0..m).map(|i| if i == 0 { 0.0 } else { ((seed ^ (i as u64 * 0x9e37)) % 1000) as f64 / 500.0 - 1.0 }).collect();
        let back = dst1(&dst1(&f));
        for (a, b) in f.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn target_angle_inverts_sine(x in 0.0..=1.0f64) {
        let a = target_angle(1.0, x);
        prop_assert!((0.0..=std::f64::consts::FRAC_PI_2).contains(&a));
        prop_assert!((a.sin() - x).abs() < 1e-15);
    }

    #[test]
    fn binary_dump_round_trips(v in prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 0..100)) {
        let mut buf = Vec::new();
        write_f64_binary(&mut buf, &v).unwrap();
        prop_assert_eq!(read_f64_binary(buf.as_slice()).unwrap(), v);
    }
}
