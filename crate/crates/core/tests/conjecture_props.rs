use proptest::prelude::*;
use rtcn_core::conjecture::{classify, enumerate_patterns, BaseMode, ClassLabel, Classifier};
use rtcn_core::network::Event;
use rtcn_core::pattern::{canonicalize, PatternSpec};

#[test]
fn degenerate_never_grows_into_normal() {
    let levels = enumerate_patterns(4);
    let mut c = Classifier::new(BaseMode::TrivialNormal);
    let mut ambiguous = 0;
    for p in levels.iter().flatten().filter(|p| !p.is_trivial()) {
        let shape = p.shape().unwrap();
        for e in shape.maximal_events().collect::<Vec<_>>() {
            let parts: Vec<PatternSpec> = shape
                .remove_event(e)
                .unwrap()
                .iter()
                .map(|s| s.to_spec())
                .collect();
            let any_degenerate = parts
                .iter()
                .any(|q| c.classify(q).unwrap() == ClassLabel::Degenerate);
            let labels: Vec<ClassLabel> = parts.iter().map(|q| c.classify(q).unwrap()).collect();
            if any_degenerate {
                assert_eq!(
                    rtcn_core::conjecture::combine(&labels),
                    ClassLabel::Degenerate,
                    "{p}"
                );
            }
        }
        let r = c.classification(p).unwrap();
        assert!(r.labels.contains(&r.last_event), "{p}");
        if r.is_ambiguous() {
            ambiguous += 1;
        }
    }
    println!(
        "sizes {:?}, ambiguous {ambiguous}",
        levels.iter().map(Vec::len).collect::<Vec<_>>()
    );
}

#[test]
fn modes_agree_beyond_the_catalog() {
    let mut a = Classifier::new(BaseMode::TrivialNormal);
    let mut b = Classifier::new(BaseMode::HeightOne);
    for p in enumerate_patterns(3).iter().flatten() {
        assert_eq!(a.classify(p).unwrap(), b.classify(p).unwrap(), "{p}");
    }
}

fn arb_pattern() -> impl Strategy<Value = PatternSpec> {
    (
        1usize..4,
        prop::collection::vec((any::<bool>(), 0usize..64, 0usize..64), 0..4),
    )
        .prop_filter_map("connected", |(k, raw)| {
            let mut events = Vec::new();
            for (step, (retic, i, j)) in raw.into_iter().enumerate() {
                let open = k + step;
                let (i, j) = (i % open, j % open);
                events.push(if retic && i != j {
                    Event::Retic(i, j)
                } else {
                    Event::Branch(i)
                });
            }
            PatternSpec::new(k, events).ok()
        })
}

proptest! {
    #[test]
    fn label_is_invariant_under_canonicalization(p in arb_pattern()) {
        let canon = canonicalize(&p).unwrap();
        prop_assert_eq!(classify(&p).unwrap(), classify(&canon.spec).unwrap());
        let mut c = Classifier::new(BaseMode::TrivialNormal);
        prop_assert_eq!(c.classify_all(&p).unwrap(), c.classify_all(&canon.spec).unwrap());
    }
}
