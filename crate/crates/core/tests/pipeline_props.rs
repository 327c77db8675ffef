mod common;

use common::derivation::{preliminary, word};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use unimorph_core::dataset::{
    read_inflections, Entry, InflectionRecord, InflectionWriter, SchemaMode,
};
use unimorph_core::derivation::{
    fuse, infer_affix, validate_affix, Confidence, DerivationRecord, TruncationHeuristic,
};
use unimorph_core::schema::ParseMode;
use unimorph_core::udeval::{
    evaluate, f_measure, read_conllu, MappingProfile, MatchMode, UnimorphIndex,
};
use unimorph_core::{FeatureBundle, Inventory, LanguageProfile};
proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn fuse_is_idempotent_and_lossless(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let input = preliminary(&mut rng);
        let (once, _) = fuse(input.clone());
        let (twice, conflicts) = fuse(once.clone());
        prop_assert_eq!(&twice, &once);
        prop_assert!(conflicts.is_empty());
        let mut shuffled = input.clone();
        shuffled.shuffle(&mut rng);
        prop_assert_eq!(&fuse(shuffled).0, &once);
        for r in &once {
            let group: Vec<&DerivationRecord> = input
                .iter()
                .filter(|x| (&x.language, &x.source, &x.target) == (&r.language, &r.source, &r.target))
                .collect();
            prop_assert!(!group.is_empty());
            if let Some(p) = &r.source_pos {
                prop_assert!(group.iter().any(|x| x.source_pos.as_ref() == Some(p)));
            }
            if let Some(p) = &r.target_pos {
                prop_assert!(group.iter().any(|x| x.target_pos.as_ref() == Some(p)));
            }
            if let Some(a) = &r.affix {
                prop_assert!(group.iter().any(|x| x.affix.as_ref() == Some(a)));
            }
        }
    }

    #[test]
    fn exact_inferences_validate(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let source = word(&mut rng, 1, 6);
        let target = if rng.gen_bool(0.5) { word(&mut rng, 1, 6) } else {
            let a = word(&mut rng, 1, 3);
            if rng.gen_bool(0.5) { format!("{a}{source}") } else { format!("{source}{a}") }
        };
        if source == target { return Ok(()); }
        if let Ok(inf) = infer_affix(&source, &target, TruncationHeuristic::default()) {
            prop_assert!(!inf.affix.text.is_empty());
            if inf.confidence == Confidence::Exact {
                let r = DerivationRecord::new("x", source, target).with_affix(inf.affix);
                prop_assert!(validate_affix(&r));
            }
        }
    }

    #[test]
    fn dataset_rows_round_trip(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let tags = ["N;NOM;SG", "N;DAT(PL)", "V;PRS;NOM(3,SG)", "ADJ;ACC(SG;PSSD;PSS(1,SG))"];
        let mut records = Vec::new();
        for _ in 0..rng.gen_range(1..10) {
            let mut r = InflectionRecord::new(word(&mut rng, 1, 5), word(&mut rng, 1, 8),
                FeatureBundle::parse_strict(tags.choose(&mut rng).unwrap()).unwrap());
            if rng.gen_bool(0.5) {
                let cut = r.form.char_indices().nth(1).map(|(i, _)| i);
                r.segmentation = Some(match cut {
                    Some(i) if rng.gen_bool(0.5) => vec![r.form[..i].to_string(), r.form[i..].to_string()],
                    _ => vec![r.form.clone()],
                });
            }
            records.push(r);
        }
        let mut w = InflectionWriter::new(Vec::new());
        for r in &records {
            w.write(r).unwrap();
        }
        let bytes = w.into_inner();
        let back: Vec<InflectionRecord> = read_inflections(bytes.as_slice(), SchemaMode::Auto, ParseMode::Strict)
            .map(|e| match e.unwrap() {
                Entry::Record { record, .. } => record,
                Entry::Diagnostic(d) => panic!("{d}"),
            })
            .collect();
        prop_assert_eq!(back, records);
    }

    #[test]
    fn f_measure_is_a_harmonic_mean(p in 0.0f64..=100.0, r in 0.0f64..=100.0) {
        let f = f_measure(p, r);
        prop_assert!((f - f_measure(r, p)).abs() < 1e-9);
        prop_assert!(f <= (p + r) / 2.0 + 1e-9);
        prop_assert!(f >= 0.0);
    }

    #[test]
    fn evaluation_ignores_token_order_and_duplicates(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let profile = MappingProfile::from_tsv(
            "NOUN\tN\nVERB\tV\nPUNCT\tDROP\nNumber=Sing\tSG\nNumber=Plur\tPL\nTense=Past\tPST\n",
            Inventory::standard(),
        ).unwrap();
        let words = ["a", "b", "c", "d"];
        let mut lines = Vec::new();
        for i in 0..rng.gen_range(0..25) {
            let w = words.choose(&mut rng).unwrap();
            let upos = ["NOUN", "VERB", "PUNCT"].choose(&mut rng).unwrap();
            let feats = ["_", "Number=Sing", "Number=Plur", "Tense=Past|Number=Sing"].choose(&mut rng).unwrap();
            lines.push(format!("{}\t{w}s\t{w}\t{upos}\t_\t{feats}\t0\troot\t_\t_", i + 1));
        }
        let (tokens, _) = read_conllu(lines.join("\n").as_bytes()).unwrap();
        let records: Vec<InflectionRecord> = words.iter().take(3).map(|w| {
            InflectionRecord::new(*w, format!("{w}s"), FeatureBundle::parse_strict("N;PL").unwrap())
        }).collect();
        let idx = UnimorphIndex::build(&records, &LanguageProfile::standard());
        let base = evaluate(&idx, &tokens, &profile, MatchMode::Exact);
        let mut t2 = tokens.clone();
        t2.extend(tokens.iter().cloned());
        t2.shuffle(&mut rng);
        let other = evaluate(&idx, &t2, &profile, MatchMode::Exact);
        prop_assert_eq!(&other.per_pos, &base.per_pos);
        prop_assert_eq!(other.overall, base.overall);
        let o = base.overall;
        prop_assert!(o.matched <= o.attempted && o.attempted <= o.total);
        let partial = evaluate(&idx, &tokens, &profile, MatchMode::Partial).overall;
        prop_assert!(partial.matched >= o.matched);
    }
}
