use super::*;
use crate::corpus::read_corpus;

const TAGS: &str = "#TAGSET\nDT\tDT\tNounModifier\nNN\tN\tNoun\nNNS\tN\tNoun\nVBD\tV\tVerb\nIN\tIN\tPreposition\n.\t.\tPunctuation\n#END\n";

fn corpus(body: &str) -> Corpus {
    read_corpus(format!("{TAGS}{body}").as_bytes()).unwrap()
}

fn toy() -> Corpus {
    corpus(
        "1\tThe\tDT\t2\n2\tdog\tNN\t3\n3\tsaw\tVBD\t0\n4\tthe\tDT\t5\n5\tcat\tNN\t3\n6\t.\t.\t3\n\n\
         1\tdogs\tNNS\t2\n2\tsaw\tVBD\t0\n3\tin\tIN\t2\n4\tthe\tDT\t5\n5\tsaw\tNN\t3\n",
    )
}

fn empty_model(kind: ModelKind) -> TrainedModel {
    train(ModelSpec::new(kind), &corpus(""), SmoothingConfig::default()).unwrap()
}

fn tw(form: &str, tag: &str) -> TaggedWord {
    TaggedWord {
        form: form.into(),
        tag: tag.into(),
        cap: CapClass::Down,
    }
}

fn structure(words: &[(&str, &str)], parents: &[usize]) -> DependencyStructure {
    DependencyStructure {
        words: words.iter().map(|(f, t)| tw(f, t)).collect(),
        parents: parents.to_vec(),
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9
}

#[test]
fn empty_tables_give_base_estimates() {
    let base = 0.01f64.ln();
    let x = empty_model(ModelKind::X);
    let bos = TaggedWord::special("BOS");
    assert!(close(
        x.trigram_factor(&bos, &bos, &tw("dog", "NN")).unwrap(),
        3.0 * base
    ));
    let c = empty_model(ModelKind::C);
    let eos = TaggedWord::special("EOS");
    let bokids = TaggedWord::special("BOKIDS");
    assert!(close(
        c.child_factor(&eos, &bokids, &tw("dog", "NN"), Dir::Left).unwrap(),
        3.0 * base
    ));
    let cd = empty_model(ModelKind::CDist);
    assert!(close(
        cd.distance_factor(&tw("a", "DT"), &tw("dog", "NN"), DistBucket::SevenPlus)
            .unwrap(),
        base
    ));
    let d = empty_model(ModelKind::D);
    assert!(close(
        d.link_factor(&tw("a", "DT"), &tw("dog", "NN"), &bokids, true, None)
            .unwrap(),
        base
    ));
}

#[test]
fn b2_parent_factor_adds_direction_term() {
    let b1 = empty_model(ModelKind::B1);
    let b2 = empty_model(ModelKind::B2);
    let (c, p) = (tw("the", "DT"), tw("dog", "NN"));
    let v1 = b1.parent_factor(&c, &p, None).unwrap();
    let v2 = b2.parent_factor(&c, &p, Some(Dir::Right)).unwrap();
    assert!(close(v2, v1 + 0.01f64.ln()));
    assert!(b2.parent_factor(&c, &p, None).is_err());
}

#[test]
fn factor_preconditions() {
    let c = empty_model(ModelKind::C);
    let bos = TaggedWord::special("BOS");
    assert!(matches!(
        c.trigram_factor(&bos, &bos, &tw("a", "DT")),
        Err(ModelError::UnsupportedFactor { .. })
    ));
    let d = empty_model(ModelKind::D);
    let bokids = TaggedWord::special("BOKIDS");
    assert!(d
        .link_factor(&tw("a", "DT"), &tw("dog", "NN"), &bokids, false, None)
        .is_err());
}

#[test]
fn observation_raises_trigram_estimate() {
    let m = train(
        ModelSpec::new(ModelKind::X),
        &corpus("1\tthe\tDT\t2\n2\tdog\tNN\t0\n"),
        SmoothingConfig::default(),
    )
    .unwrap();
    let bos = TaggedWord::special("BOS");
    let v = m.trigram_factor(&bos, &tw("the", "DT"), &tw("dog", "NN")).unwrap();
    assert!(v > 3.0 * 0.01f64.ln());
}

#[test]
fn single_word_traces() {
    let d = structure(&[("dog", "NN")], &[2]);
    let (score, trace) = empty_model(ModelKind::C).score_structure(&d).unwrap();
    assert_eq!(trace.len(), 5);
    assert!(close(score, trace.total()));
    let outcomes: Vec<&str> = trace.entries.iter().map(|e| e.outcome.as_str()).collect();
    assert_eq!(outcomes.iter().filter(|o| **o == "EOKIDS").count(), 4);
    let (_, trace) = empty_model(ModelKind::X).score_structure(&d).unwrap();
    assert_eq!(trace.len(), 2);
    assert_eq!(trace.entries[1].outcome, "EOS");
}

#[test]
fn model_a_scans_every_pair() {
    let m = empty_model(ModelKind::A);
    let d = structure(&[("the", "DT"), ("dog", "NN"), ("saw", "VBD")], &[2, 3, 4]);
    let (_, trace) = m.score_structure(&d).unwrap();
    assert_eq!(trace.count("trigram"), 4);
    // Each of the n + 1 heads considers every word other than itself.
    assert_eq!(trace.count("link"), 9);
}

#[test]
fn b3_is_c_times_x() {
    let c = toy();
    let [b3, cm, x] = [ModelKind::B3, ModelKind::C, ModelKind::X]
        .map(|k| train(ModelSpec::new(k), &c, SmoothingConfig::default()).unwrap());
    for s in c.sentences() {
        let d = s.gold_structure().unwrap();
        let lhs = b3.score(&d).unwrap();
        assert!(close(lhs, cm.score(&d).unwrap() + x.score(&d).unwrap()));
    }
}

#[test]
fn b_models_have_one_parent_factor_per_word() {
    let c = toy();
    for kind in [ModelKind::B1, ModelKind::B2, ModelKind::B3] {
        let m = train(ModelSpec::new(kind), &c, SmoothingConfig::default()).unwrap();
        let d = c.sentences().next().unwrap().gold_structure().unwrap();
        let (_, trace) = m.score_structure(&d).unwrap();
        let expected = if kind == ModelKind::B3 { 0 } else { d.len() };
        assert_eq!(trace.count("parent"), expected, "{kind}");
    }
}

#[test]
fn training_and_scoring_read_the_same_events() {
    let c = toy();
    for kind in ModelKind::ALL.into_iter().filter(|k| k.is_probabilistic()) {
        let m = train(ModelSpec::new(kind), &c, SmoothingConfig::default()).unwrap();
        for s in c.sentences() {
            let d = s.gold_structure().unwrap();
            let mut scored = m.scoring_lookups(&d).unwrap();
            let mut trained = m.training_lookups(&d).unwrap();
            scored.sort();
            trained.sort();
            if kind == ModelKind::D {
                let mut rest = trained.clone();
                for l in &scored {
                    let i = rest.iter().position(|r| r == l).expect("scored lookup was trained");
                    rest.remove(i);
                }
                assert!(rest.iter().all(|l| l.outcome == vec![crate::symbols::NO]));
            } else {
                assert_eq!(scored, trained, "{kind}");
            }
            for l in &scored {
                assert!(m.first_level_condition_count(l) >= 1, "{kind} {l:?}");
            }
        }
    }
}

#[test]
fn model_d_counts_stop_events() {
    // Two sentences, 3 + 2 words: (n + 1) heads times two sides.
    let c = corpus("1\tthe\tDT\t2\n2\tdog\tNN\t3\n3\tsaw\tVBD\t0\n\n1\tdogs\tNNS\t2\n2\tsaw\tVBD\t0\n");
    let m = train(ModelSpec::new(ModelKind::D), &c, SmoothingConfig::default()).unwrap();
    let mut stops = 0;
    let mut rejected_stops = 0;
    for s in c.sentences() {
        for l in m.training_lookups(&s.gold_structure().unwrap()).unwrap() {
            if l.family() == "link" && l.condition[1] == crate::symbols::EOKIDS {
                if l.outcome == vec![crate::symbols::YES] {
                    stops += 1;
                } else {
                    rejected_stops += 1;
                }
            }
        }
    }
    assert_eq!(stops, 2 * 4 + 2 * 3);
    // One rejected stop before every accepted link, including EOS's head.
    assert_eq!(rejected_stops, 3 + 2);
}

#[test]
fn nolex_word_factor_sees_only_the_tag() {
    let m = train(ModelSpec::new(ModelKind::CNoLex), &toy(), SmoothingConfig::default()).unwrap();
    let d = toy().sentences().next().unwrap().gold_structure().unwrap();
    let words: Vec<Lookup> = m
        .scoring_lookups(&d)
        .unwrap()
        .into_iter()
        .filter(|l| l.family().starts_with("child-word"))
        .collect();
    assert!(!words.is_empty());
    assert!(words.iter().all(|l| l.family() == "child-word-nolex"));
    // The only level of the word factor projects onto the child's tag.
    assert!(words.iter().all(|l| features::list_by_id(l.list).levels().len() == 1));
}

#[test]
fn save_load_is_bit_identical() {
    let c = toy();
    for kind in ModelKind::ALL {
        let spec = ModelSpec::new(kind);
        let m = train(spec, &c, SmoothingConfig::with_skip()).unwrap();
        let mut buf = Vec::new();
        m.save(&mut buf).unwrap();
        let back = TrainedModel::load(buf.as_slice()).unwrap();
        assert_eq!(back.spec(), spec);
        for s in c.sentences() {
            let d = s.gold_structure().unwrap();
            assert_eq!(m.score(&d).unwrap().to_bits(), back.score(&d).unwrap().to_bits());
            assert_eq!(baseline_parse(&m, s), baseline_parse(&back, s));
        }
    }
}

#[test]
fn ill_formed_and_foreign_tags_are_rejected() {
    let m = empty_model(ModelKind::C);
    assert!(matches!(
        m.score(&structure(&[("a", "DT"), ("b", "NN")], &[3, 3])),
        Err(ModelError::IllFormed(_))
    ));
    assert!(matches!(
        m.score(&structure(&[("a", "XX")], &[2])),
        Err(ModelError::UnknownTag(_))
    ));
}

#[test]
fn baseline_follows_modal_offsets() {
    let c = corpus(
        "1\tthe\tDT\t2\n2\tdog\tNN\t3\n3\tsaw\tVBD\t0\n\n\
         1\ta\tDT\t2\n2\tcat\tNN\t3\n3\tran\tVBD\t0\n\n\
         1\ta\tDT\t2\n2\tbig\tNN\t0\n",
    );
    let c = crate::corpus::attenuate_training_corpus(
        &c,
        &["the", "dog", "saw", "a", "cat"]
            .iter()
            .map(|s| s.to_string())
            .collect(),
    );
    let m = train(ModelSpec::new(ModelKind::Baseline), &c, SmoothingConfig::default()).unwrap();
    let s = Sentence::new(vec!["the".into(), "dog".into(), "hut".into(), "saw".into()]);
    let (tags, parents) = baseline_parse(&m, &s);
    // "ran" and "big" were attenuated to MORPH-SHORT, seen as VBD and NN once each;
    // the tie goes to the tag listed first.
    assert_eq!(tags, vec!["DT", "NN", "NN", "VBD"]);
    assert_eq!(parents[0], 2);
    // VBD's modal offset (to EOS at +1 from position 3) clamps to n + 1.
    assert_eq!(parents[3], 5);
}
