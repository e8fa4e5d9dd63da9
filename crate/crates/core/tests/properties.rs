use std::sync::{Arc, OnceLock};

use hyptrace::algebra::{hs_norm, GroupAlgebraElement, SobolevParams};
use hyptrace::conjugacy::{is_finite_class, ClassFiniteness, DEFAULT_CLASS_BUDGET};
use hyptrace::enumerate::{enumerate_ball, DEFAULT_BUDGET_BYTES};
use hyptrace::fc::{fc_center, quotient_backend};
use hyptrace::length::LengthFunction;
use hyptrace::operator::{reduced_norm_profile, NormOptions};
use hyptrace::presets::{preset, PRESETS};
use hyptrace::traces::{chi_eval, trace_space_basis};
use hyptrace::{GroupBackend, GroupElement};
use num_complex::Complex64;
use proptest::prelude::*;

fn backends() -> &'static [(Arc<GroupBackend>, LengthFunction)] {
    static CELL: OnceLock<Vec<(Arc<GroupBackend>, LengthFunction)>> = OnceLock::new();
    CELL.get_or_init(|| {
        PRESETS
            .iter()
            .map(|name| {
                let g = preset(name).unwrap();
                let l = LengthFunction::for_backend(&g, 8).unwrap();
                (g, l)
            })
            .collect()
    })
}

/// Example 3 together with N = {e, a, a²} and G/N.
fn example_three() -> &'static (Arc<GroupBackend>, Vec<GroupElement>, Arc<GroupBackend>) {
    static CELL: OnceLock<(Arc<GroupBackend>, Vec<GroupElement>, Arc<GroupBackend>)> = OnceLock::new();
    CELL.get_or_init(|| {
        let g = preset("paper-example-3").unwrap();
        let n = fc_center(&g, 4, DEFAULT_BUDGET_BYTES).unwrap().elements;
        let q = quotient_backend(&g, &n).unwrap();
        (g, n, q)
    })
}

fn word(backend: &GroupBackend, letters: &[usize]) -> GroupElement {
    let k = backend.generators().len();
    backend.evaluate_word(&letters.iter().map(|i| i % k).collect::<Vec<_>>())
}

fn letters(max_len: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0usize..1024, 0..=max_len)
}

/// Up to five terms, each a word of length ≤ 3 with a complex coefficient.
fn algebra_terms() -> impl Strategy<Value = Vec<(Vec<usize>, f64, f64)>> {
    prop::collection::vec((letters(3), -2.0f64..2.0, -2.0f64..2.0), 1..=5)
}

fn algebra(backend: &Arc<GroupBackend>, terms: &[(Vec<usize>, f64, f64)]) -> GroupAlgebraElement {
    GroupAlgebraElement::from_terms(backend, terms.iter().map(|(w, re, im)| (word(backend, w), Complex64::new(*re, *im))))
        .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn normal_forms_agree_with_letter_by_letter_evaluation(w1 in letters(12), w2 in letters(12)) {
        for (g, _) in backends() {
            let joined: Vec<usize> = w1.iter().chain(&w2).copied().collect();
            let product = g.multiply(&word(g, &w1), &word(g, &w2)).unwrap();
            prop_assert_eq!(product, word(g, &joined), "{}", g.description());
        }
    }

    #[test]
    fn length_axioms(w1 in letters(4), w2 in letters(4)) {
        for (g, len) in backends() {
            let (a, b) = (word(g, &w1), word(g, &w2));
            let l = |x: &GroupElement| len.length(x).unwrap();
            prop_assert!(l(&g.multiply(&a, &b).unwrap()) <= l(&a) + l(&b));
            prop_assert_eq!(l(&g.invert(&a).unwrap()), l(&a));
            prop_assert!(l(&a) <= w1.len());
        }
        prop_assert_eq!(backends()[0].1.length(&backends()[0].0.identity()).unwrap(), 0);
    }

    #[test]
    fn quotient_multiplication_is_well_defined(w1 in letters(10), w2 in letters(10)) {
        let (g, _, q) = example_three();
        let (u, v) = (word(g, &w1), word(g, &w2));
        let via_cosets = q.multiply(&q.project(&u).unwrap(), &q.project(&v).unwrap()).unwrap();
        prop_assert_eq!(via_cosets, q.project(&g.multiply(&u, &v).unwrap()).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sobolev_norm_axioms(which in 0usize..6, f in algebra_terms(), h in algebra_terms(), k in -3.0f64..3.0) {
        let (g, len) = &backends()[which];
        let (f, h) = (algebra(g, &f), algebra(g, &h));
        let mut previous = 0.0;
        for s in [0.0, 1.0, 2.0] {
            let p = SobolevParams::new(s, len.clone()).unwrap();
            let norm = |x: &GroupAlgebraElement| hs_norm(x, &p).unwrap();
            let nf = norm(&f);
            prop_assert!(norm(&f.add(&h).unwrap()) <= nf + norm(&h) + 1e-12);
            prop_assert!((norm(&f.scale(Complex64::new(k, 0.0))) - k.abs() * nf).abs() <= 1e-12 * (1.0 + nf));
            prop_assert_eq!(nf == 0.0, f.is_zero());
            prop_assert!(nf >= previous - 1e-12, "norm decreased in s");
            previous = nf;
        }
    }

    #[test]
    fn quotient_map_is_one_lipschitz_with_bounded_defect(w in letters(6)) {
        let (g, n, q) = example_three();
        let base = LengthFunction::for_backend(g, 6).unwrap();
        let quotient = LengthFunction::for_backend(q, 6).unwrap();
        let x = word(g, &w);
        let (lg, lq) = (base.length(&x).unwrap(), quotient.length(&q.project(&x).unwrap()).unwrap());
        let diameter = n.iter().map(|m| base.length(m).unwrap()).max().unwrap();
        prop_assert!(lq <= lg);
        let lift = base.length(&q.lift(&q.project(&x).unwrap()).unwrap()).unwrap();
        prop_assert!(lift <= lq + diameter + 1, "lift {lift}, quotient {lq}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reduced_norm_bounds(which in prop::sample::select(vec![0usize, 1, 3, 5]), terms in algebra_terms()) {
        let (g, _) = &backends()[which];
        let f = algebra(g, &terms);
        let opts = NormOptions::default();
        let profile = reduced_norm_profile(&f, 3, &opts).unwrap();
        let star = reduced_norm_profile(&f.involution(), 3, &opts).unwrap();
        for w in profile.windows(2) {
            prop_assert!(w[1].value >= w[0].value);
        }
        for (a, b) in profile.iter().zip(&star) {
            prop_assert!(a.value <= f.l1_norm() * (1.0 + 1e-12));
            if a.converged && b.converged {
                prop_assert!((a.value - b.value).abs() <= 1e-9 * (1.0 + a.value), "{} vs {}", a.value, b.value);
            }
        }
    }

    #[test]
    fn traces_are_conjugation_invariant(which in prop::sample::select(vec![3usize, 4]), x in letters(6), h in letters(4)) {
        let (g, _) = &backends()[which];
        let space = trace_space_basis(g, 2, DEFAULT_BUDGET_BYTES).unwrap();
        let (x, h) = (word(g, &x), word(g, &h));
        let conj = g.conjugate(&x, &h).unwrap();
        for chi in &space.classes {
            let at = |y: &GroupElement| chi_eval(chi, &GroupAlgebraElement::delta(g, y).unwrap()).unwrap();
            prop_assert_eq!(at(&conj), at(&h));
            prop_assert_eq!(at(&h) == Complex64::new(1.0, 0.0), chi.contains(&h));
        }
    }
}

/// For g₁, g₂ ∈ N, Z(g₁) ∩ Z(g₂) has index at most |C(g₁)|·|C(g₂)|: the
/// ball B_4 splits into at most that many cosets, and g₁g₂ is again FC.
#[test]
fn centralizer_intersections_have_bounded_index() {
    let (g, n, _) = example_three();
    let ball = enumerate_ball(g, 4).unwrap();
    let class_size = |x: &GroupElement| match is_finite_class(g, x, DEFAULT_CLASS_BUDGET).unwrap() {
        ClassFiniteness::Finite(k) => k,
        other => panic!("{} is not FC: {other:?}", g.format_element(x)),
    };
    for g1 in n {
        for g2 in n {
            let commutes = |z: &GroupElement| {
                [g1, g2].iter().all(|c| g.multiply(z, c).unwrap() == g.multiply(c, z).unwrap())
            };
            let mut reps: Vec<GroupElement> = Vec::new();
            for (z, _) in ball.elements() {
                let zi = g.invert(&z).unwrap();
                if !reps.iter().any(|r| commutes(&g.multiply(&zi, r).unwrap())) {
                    reps.push(z);
                }
            }
            assert!(reps.len() <= class_size(g1) * class_size(g2), "{} cosets", reps.len());
            class_size(&g.multiply(g1, g2).unwrap());
        }
    }
}
