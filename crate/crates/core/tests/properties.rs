use std::collections::BTreeMap;

use proptest::prelude::*;

use bimodal::decision::{
    check_filtration, decide, filtrate, fmp_bound, frame_validates_logic, verify_refutation,
    LogicId,
};
use bimodal::formula::{parse, Formula, Modality};
use bimodal::kripke::{extension, frame_valid, holds, Model, Validity};
use bimodal::pmorph::{bisimulation_quotient, check_pmorphism};
use bimodal::random::{random_l_model, seeded};

fn arb_modality() -> impl Strategy<Value = Modality> {
    prop_oneof![Just(Modality::One), Just(Modality::Two)]
}

fn arb_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        1 => Just(Formula::Bottom),
        1 => Just(Formula::Top),
        6 => prop::sample::select(vec!["p", "q", "r"]).prop_map(Formula::var),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (arb_modality(), inner.clone()).prop_map(|(m, a)| Formula::boxed(m, a)),
            (arb_modality(), inner).prop_map(|(m, a)| Formula::diamond(m, a)),
        ]
    })
}

fn model(seed: u64, max: usize) -> Model {
    random_l_model(&mut seeded(seed), max, &["p", "q", "r"])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn render_parse_round_trip(f in arb_formula()) {
        prop_assert_eq!(parse(&f.render()).unwrap(), f);
    }

    #[test]
    fn normalize_is_idempotent(f in arb_formula()) {
        let n = f.normalize();
        prop_assert!(n.is_normalized());
        prop_assert_eq!(n.normalize(), n);
    }

    #[test]
    fn normalize_preserves_truth(f in arb_formula(), seed in any::<u64>()) {
        let m = model(seed, 8);
        prop_assert_eq!(extension(&m, &f).unwrap(), extension(&m, &f.normalize()).unwrap());
    }

    #[test]
    fn diamond_is_dual_box(f in arb_formula(), i in arb_modality(), seed in any::<u64>()) {
        let m = model(seed, 8);
        let dual = Formula::not(Formula::boxed(i, Formula::not(f.clone())));
        prop_assert_eq!(extension(&m, &Formula::diamond(i, f)).unwrap(), extension(&m, &dual).unwrap());
    }

    #[test]
    fn substitution_lemma(f in arb_formula(), g in arb_formula(), seed in any::<u64>()) {
        let m = model(seed, 8);
        let mut shifted = m.clone();
        shifted.valuation.insert("p".into(), extension(&m, &g).unwrap());
        prop_assert_eq!(
            extension(&m, &f.substitute("p", &g)).unwrap(),
            extension(&shifted, &f).unwrap()
        );
    }

    #[test]
    fn counterexamples_recheck(f in arb_formula(), seed in any::<u64>()) {
        let fr = model(seed, 6).frame;
        if let Validity::CounterExample { valuation, world } = frame_valid(&fr, &f).unwrap() {
            let m = Model::with_valuation(fr, valuation).unwrap();
            prop_assert!(!holds(&m, world, &f).unwrap());
        }
    }

    #[test]
    fn filtration_lemma(f in arb_formula(), seed in any::<u64>()) {
        prop_assume!(f.subformulas().len() <= 10);
        let m = model(seed, 30);
        let res = filtrate(&m, &f).unwrap();
        let check = check_filtration(&m, &f, &res).unwrap();
        prop_assert!(check.ok(), "{:?}", check);
        prop_assert!(res.classes() as u128 <= fmp_bound(&f));
    }

    #[test]
    fn bisimulation_quotient_preserves_truth(f in arb_formula(), seed in any::<u64>()) {
        let m = model(seed, 10);
        let letters: Vec<_> = ["p", "q", "r"].iter().map(|p| m.letter(p)).collect();
        let colour: Vec<usize> = m
            .frame
            .worlds()
            .map(|x| letters.iter().enumerate().map(|(i, s)| usize::from(s.contains(x)) << i).sum())
            .collect();
        let q = bisimulation_quotient(&m.frame, &colour);
        prop_assert!(check_pmorphism(&q).unwrap().ok());
        let mut val = BTreeMap::new();
        for p in ["p", "q", "r"] {
            let mut ws: Vec<usize> = m.letter(p).ones().map(|x| q.mapping[x]).collect();
            ws.sort_unstable();
            ws.dedup();
            val.insert(p.to_string(), ws);
        }
        let qm = Model::with_valuation(q.target.clone(), val).unwrap();
        let (a, b) = (extension(&m, &f).unwrap(), extension(&qm, &f).unwrap());
        for x in m.frame.worlds() {
            prop_assert_eq!(a.contains(x), b.contains(q.mapping[x]));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn decide_is_sound(f in arb_formula()) {
        prop_assume!(f.vars().len() <= 2);
        for lg in LogicId::ALL {
            let d = decide(&f, lg, 3).unwrap();
            prop_assert!(verify_refutation(&d, &f, lg).unwrap());
        }
    }

    #[test]
    fn random_models_are_l_models(seed in any::<u64>()) {
        let m = model(seed, 30);
        prop_assert!(m.frame.is_rooted());
        prop_assert!(frame_validates_logic(&m.frame, LogicId::LogicL).holds());
    }
}
