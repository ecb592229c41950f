//! Property tests over randomized states, measurements and epistemic measures.

use ontic_core::contextual::{
    context_distribution, context_entropy, min_context_entropy, mixture_context_drift,
    ContextSampler,
};
use ontic_core::hs_model::{hs_overlap, iota, is_delta, mix_epistemic, EpistemicState, OnticPoint};
use ontic_core::onto_model::{
    classify, predict, psi_complete_qubit_model, qm_overlap_classification, BornResponse,
    OntologicalModel, QmVerdict, ResponseFunction, Verdict,
};
use ontic_core::qcore::{
    bloch_vector, born_probability, density_from_pure, eigen_context, mix, shannon_entropy,
    trace_overlap, von_neumann_entropy, BlochVector, ComplexMatrix, Context, DensityMatrix, Povm,
    PureState,
};
use proptest::prelude::*;

const CASES: u32 = 500;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(CASES)
}

fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..1.0, n).prop_map(|w| {
        let total: f64 = w.iter().sum();
        w.into_iter().map(|x| x / total).collect()
    })
}

/// `Σ wᵢ |eᵢ⟩⟨eᵢ|` over a Haar-random basis.
fn random_density(dim: usize, seed: u64, w: &[f64]) -> DensityMatrix {
    let ctx = ContextSampler::new(seed).next_context(dim).unwrap();
    let parts: Vec<(f64, DensityMatrix)> = w
        .iter()
        .zip(ctx.basis())
        .map(|(&wi, e)| (wi, density_from_pure(e)))
        .collect();
    mix(&parts).unwrap()
}

fn density_strategy() -> impl Strategy<Value = DensityMatrix> {
    (2usize..=4, any::<u64>())
        .prop_flat_map(|(d, seed)| (Just(d), Just(seed), weights(d)))
        .prop_map(|(d, seed, w)| random_density(d, seed, &w))
}

fn qubit_density_strategy() -> impl Strategy<Value = DensityMatrix> {
    (any::<u64>(), weights(2)).prop_map(|(seed, w)| random_density(2, seed, &w))
}

/// Rank-one POVM from two random bases, each element `½|e⟩⟨e|`.
fn random_povm(dim: usize, seed: u64) -> Povm {
    let mut s = ContextSampler::new(seed);
    let (a, b) = (s.next_context(dim).unwrap(), s.next_context(dim).unwrap());
    let outcomes = a
        .basis()
        .iter()
        .chain(b.basis())
        .enumerate()
        .map(|(i, e)| (format!("k{i}"), e.projector().scale(0.5)))
        .collect();
    Povm::with_tolerance("random", outcomes, 1e-9).unwrap()
}

fn point_strategy() -> impl Strategy<Value = OnticPoint> {
    (0.0f64..=std::f64::consts::PI, 0.0f64..std::f64::consts::TAU)
        .prop_map(|(t, p)| OnticPoint::new(t, p).unwrap())
}

fn leaf_strategy() -> impl Strategy<Value = EpistemicState> {
    prop_oneof![
        (prop::collection::vec(point_strategy(), 1..4), any::<u64>()).prop_map(|(pts, seed)| {
            let w: Vec<f64> = (0..pts.len())
                .map(|i| 1.0 + ((seed >> (8 * i)) & 0xff) as f64)
                .collect();
            let total: f64 = w.iter().sum();
            EpistemicState::finite(
                pts.into_iter()
                    .zip(w)
                    .map(|(p, w)| (p, w / total))
                    .collect(),
            )
            .unwrap()
        }),
        (point_strategy(), 0.05f64..3.05)
            .prop_map(|(axis, angle)| { EpistemicState::ring(axis.direction(), angle).unwrap() }),
        Just(EpistemicState::UniformSphere),
    ]
}

fn epistemic_strategy() -> impl Strategy<Value = EpistemicState> {
    prop_oneof![
        3 => leaf_strategy(),
        1 => (leaf_strategy(), leaf_strategy(), 0.05f64..0.95)
            .prop_map(|(a, b, w)| mix_epistemic(&[(w, a), (1.0 - w, b)]).unwrap()),
    ]
}

fn outer_sum(parts: &[(f64, &PureState)], dim: usize) -> ComplexMatrix {
    parts.iter().fold(ComplexMatrix::zeros(dim), |acc, (w, e)| {
        &acc + &e.projector().scale(*w)
    })
}

proptest! {
    #![proptest_config(config())]

    // ---- qcore ----

    #[test]
    fn born_probabilities_sum_to_one(rho in density_strategy(), seed in any::<u64>()) {
        let m = random_povm(rho.dim(), seed);
        let total: f64 = m.labels().iter().map(|k| born_probability(&rho, &m, k).unwrap()).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn overlap_zero_test_is_symmetric(a in density_strategy(), seed in any::<u64>(), w in weights(4)) {
        let d = a.dim();
        let total: f64 = w[..d].iter().sum();
        let w: Vec<f64> = w[..d].iter().map(|x| x / total).collect();
        let b = random_density(d, seed, &w);
        let ab = trace_overlap(&a, &b).unwrap();
        let ba = trace_overlap(&b, &a).unwrap();
        prop_assert_eq!(ab.disjoint, ba.disjoint);
        prop_assert!((ab.value - ba.value).abs() < 1e-12);
    }

    #[test]
    fn pure_overlap_zero_test_matches_amplitude(dim in 2usize..=4, seed in any::<u64>(), orthogonal in any::<bool>()) {
        let mut s = ContextSampler::new(seed);
        let basis = s.next_context(dim).unwrap();
        let a = basis.basis()[0].clone();
        let b = if orthogonal { basis.basis()[1].clone() } else { s.next_pure_state(dim).unwrap() };
        let o = trace_overlap(&density_from_pure(&a), &density_from_pure(&b)).unwrap();
        let amp = a.inner(&b).unwrap().norm();
        prop_assert_eq!(o.disjoint, amp < 10f64.powf(-4.5));
        prop_assert!((o.value - amp * amp).abs() < 1e-12);
    }

    #[test]
    fn mixing_entropy_is_bounded_by_weight_entropy(
        dim in 2usize..=4,
        k in 2usize..=4,
        seed in any::<u64>(),
        orthogonal in any::<bool>(),
        w in weights(4),
    ) {
        let mut s = ContextSampler::new(seed);
        let (states, k) = if orthogonal {
            let k = k.min(dim);
            (s.next_context(dim).unwrap().basis()[..k].to_vec(), k)
        } else {
            ((0..k).map(|_| s.next_pure_state(dim).unwrap()).collect::<Vec<_>>(), k)
        };
        let total: f64 = w[..k].iter().sum();
        let w: Vec<f64> = w[..k].iter().map(|x| x / total).collect();
        let parts: Vec<(f64, DensityMatrix)> = w.iter().zip(&states).map(|(&wi, e)| (wi, density_from_pure(e))).collect();
        let vn = von_neumann_entropy(&mix(&parts).unwrap()).unwrap();
        let h = shannon_entropy(&w);
        prop_assert!(vn <= h + 1e-9);
        prop_assert_eq!((h - vn).abs() <= 1e-9, orthogonal, "vn {} h {}", vn, h);
    }

    #[test]
    fn eigen_context_reconstructs_state(rho in density_strategy()) {
        let eig = eigen_context(&rho);
        let parts: Vec<(f64, &PureState)> = eig.eigenvalues.iter().copied().zip(eig.context.basis()).collect();
        prop_assert!(outer_sum(&parts, rho.dim()).approx_eq(rho.matrix(), 1e-9));
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(Context::new(eig.context.basis().to_vec()).is_ok());
    }

    #[test]
    fn bloch_round_trip(rho in qubit_density_strategy()) {
        let r = bloch_vector(&rho).unwrap();
        prop_assert!(r.norm() <= 1.0 + 1e-9);
        prop_assert!(r.to_density().unwrap().approx_eq(&rho, 1e-9));
    }

    #[test]
    fn bloch_norm_detects_purity(theta in 0.0f64..=std::f64::consts::PI, phi in -10.0f64..10.0) {
        let psi = ontic_core::qcore::pure_from_bloch(theta, phi).unwrap();
        let r = bloch_vector(&density_from_pure(&psi)).unwrap();
        prop_assert!(r.is_pure(1e-9));
        let shrunk = BlochVector::new(0.9 * r.x, 0.9 * r.y, 0.9 * r.z);
        prop_assert!(!shrunk.is_pure(1e-9));
    }

    // ---- hs_model ----

    #[test]
    fn iota_is_linear(a in epistemic_strategy(), b in epistemic_strategy(), w in 0.0f64..=1.0) {
        let mixed = mix_epistemic(&[(w, a.clone()), (1.0 - w, b.clone())]).unwrap();
        let expected = mix(&[(w, iota(&a)), (1.0 - w, iota(&b))]).unwrap();
        prop_assert!(iota(&mixed).approx_eq(&expected, 1e-9));
    }

    #[test]
    fn iota_preserves_trace(e in epistemic_strategy()) {
        let tr = iota(&e).matrix().trace();
        prop_assert!((tr.re - 1.0).abs() < 1e-9 && tr.im.abs() < 1e-9);
    }

    #[test]
    fn iota_hits_every_sampled_state(rho in qubit_density_strategy()) {
        let eig = eigen_context(&rho);
        let atoms: Vec<(OnticPoint, f64)> = eig
            .context
            .basis()
            .iter()
            .zip(&eig.eigenvalues)
            .filter(|(_, &l)| l > 0.0)
            .map(|(e, &l)| {
                let r = bloch_vector(&density_from_pure(e)).unwrap();
                (OnticPoint::from_direction(r.to_array()).unwrap(), l)
            })
            .collect();
        let e = EpistemicState::finite(atoms).unwrap();
        prop_assert!(iota(&e).approx_eq(&rho, 1e-9));
    }

    #[test]
    fn distinct_deltas_do_not_overlap(p in point_strategy(), q in point_strategy()) {
        prop_assume!(!p.approx_eq(&q));
        let (a, b) = (EpistemicState::delta(p), EpistemicState::delta(q));
        prop_assert!(is_delta(&a).is_some() && is_delta(&b).is_some());
        prop_assert!(!hs_overlap(&a, &b));
    }

    #[test]
    fn hs_overlap_is_symmetric_and_reflexive(a in epistemic_strategy(), b in epistemic_strategy()) {
        prop_assert_eq!(hs_overlap(&a, &b), hs_overlap(&b, &a));
        prop_assert!(hs_overlap(&a, &a));
    }

    // ---- onto_model ----

    #[test]
    fn born_response_is_normalized(p in point_strategy(), seed in any::<u64>()) {
        let m = random_povm(2, seed);
        let total: f64 = m.labels().iter().map(|k| BornResponse.probability(&p, &m, k).unwrap()).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn classify_is_permutation_invariant(perm in Just(vec!["A", "B", "C", "D", "x+", "z+"]).prop_shuffle()) {
        let model = psi_complete_qubit_model();
        let reference = classify(&model, &["A", "B", "C", "D", "x+", "z+"]).unwrap();
        let shuffled = classify(&model, &perm).unwrap();
        prop_assert_eq!(reference, shuffled);
    }

    #[test]
    fn psi_complete_survives_subsets(points in prop::collection::vec(point_strategy(), 2..6), mask in any::<u8>()) {
        let mut model = OntologicalModel::new(BornResponse);
        let mut names = Vec::new();
        for (i, p) in points.iter().enumerate() {
            if points[..i].iter().any(|q| q.approx_eq(p)) {
                continue;
            }
            let name = format!("P{i}");
            model.insert_preparation(name.clone(), EpistemicState::delta(*p));
            names.push(name);
        }
        prop_assume!(names.len() >= 2);
        let all: Vec<&str> = names.iter().map(String::as_str).collect();
        prop_assert_eq!(classify(&model, &all).unwrap().verdict, Verdict::PsiComplete);
        let subset: Vec<&str> = all.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, n)| *n).collect();
        if subset.len() >= 2 {
            prop_assert_eq!(classify(&model, &subset).unwrap().verdict, Verdict::PsiComplete);
        }
    }

    #[test]
    fn qm_overlap_is_ontic_exactly_for_orthogonal_sets(dim in 2usize..=4, seed in any::<u64>(), k in 2usize..=5) {
        let mut s = ContextSampler::new(seed);
        let basis = s.next_context(dim).unwrap().basis().to_vec();
        let states: Vec<PureState> = if k <= dim {
            basis[..k].to_vec()
        } else {
            let mut v = basis.clone();
            v.push(s.next_pure_state(dim).unwrap());
            v
        };
        let verdict = qm_overlap_classification(&states).unwrap().verdict;
        prop_assert_eq!(verdict == QmVerdict::Ontic, states.len() <= dim);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn predict_matches_born_of_iota(e in epistemic_strategy(), seed in any::<u64>()) {
        let model = OntologicalModel::new(BornResponse).with_preparation("P", e.clone());
        let m = random_povm(2, seed);
        let rho = iota(&e);
        for k in m.labels() {
            let lhs = predict(&model, "P", &m, k).unwrap();
            let rhs = born_probability(&rho, &m, k).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-6, "{} vs {}", lhs, rhs);
        }
    }

    // ---- contextual ----

    #[test]
    fn context_entropy_is_bounded_below(rho in density_strategy(), seed in any::<u64>()) {
        let vn = von_neumann_entropy(&rho).unwrap();
        let mut s = ContextSampler::new(seed);
        for _ in 0..100 {
            let ctx = s.next_context(rho.dim()).unwrap();
            let dist = context_distribution(&rho, &ctx).unwrap();
            prop_assert!((dist.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            prop_assert!(context_entropy(&rho, &ctx).unwrap() >= vn - 1e-9);
        }
        let at_eigen = context_entropy(&rho, &eigen_context(&rho).context).unwrap();
        prop_assert!((at_eigen - vn).abs() < 1e-9);
    }

    #[test]
    fn min_context_entropy_is_monotone_in_samples(rho in density_strategy(), seed in any::<u64>(), n in 1usize..40) {
        let short = min_context_entropy(&rho, &mut ContextSampler::new(seed), n).unwrap();
        let long = min_context_entropy(&rho, &mut ContextSampler::new(seed), 2 * n).unwrap();
        prop_assert!(long.bits <= short.bits);
        prop_assert!(long.sampled_min <= short.sampled_min);
        prop_assert!(short.sampled_min >= short.bits - 1e-12);
    }

    #[test]
    fn drift_axis_moves_monotonically(a in point_strategy(), b in point_strategy()) {
        // Pure, non-commuting pair: neither equal nor antipodal.
        let dot: f64 = a.direction().iter().zip(b.direction()).map(|(x, y)| x * y).sum();
        prop_assume!(dot.abs() < 0.99);
        let rho1 = density_from_pure(&a.pure_state());
        let rho2 = density_from_pure(&b.pure_state());
        let weights: Vec<f64> = (1..20).map(|i| i as f64 / 20.0).collect();
        let rows = mixture_context_drift(&rho1, &rho2, &weights, 0, 4).unwrap();
        let b_dir = b.direction();
        let angles: Vec<f64> = rows
            .iter()
            .map(|r| {
                let axis = r.eigen_axis.unwrap().to_array();
                axis.iter().zip(b_dir).map(|(x, y)| x * y).sum::<f64>().clamp(-1.0, 1.0).acos()
            })
            .collect();
        prop_assert!(angles.windows(2).all(|w| w[1] > w[0]), "{:?}", angles);
    }
}

#[test]
fn random_density_helper_is_valid() {
    let rho = random_density(3, 1, &[0.5, 0.3, 0.2]);
    assert!(DensityMatrix::new(rho.matrix().clone()).is_ok());
}
