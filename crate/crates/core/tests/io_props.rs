#[path = "support/oracles.rs"]
mod oracles;

use oracles::{random_line_system, random_map};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use selfsim::dimension::{box_dimension_estimate, CoveringRecord};
use selfsim::io::{
    emit_covering_csv, example_document, examples_registry, parse_ifs_spec, read_covering_csv,
    serialize_ifs_spec, ExampleParams, IfsSpecDocument, RunConfig,
};
use selfsim::{Error, IfsSystem};

fn keys(ifs: &IfsSystem) -> Vec<selfsim::geometry::MapKey> {
    ifs.maps().iter().map(|m| m.key()).collect()
}

#[test]
fn bundled_examples_round_trip() {
    for e in examples_registry() {
        let doc = example_document(e.name, &ExampleParams::new()).unwrap();
        let text = serialize_ifs_spec(&doc);
        let back = parse_ifs_spec(&text).unwrap();
        assert_eq!(back, doc, "{}", e.name);
        assert_eq!(serialize_ifs_spec(&back), text);
        let ifs = doc.build(None).unwrap();
        assert_eq!(keys(&IfsSpecDocument::from_ifs(&ifs).build(None).unwrap()), keys(&ifs));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_systems_round_trip(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ifs = random_line_system(&mut rng, n);
        let text = serialize_ifs_spec(&IfsSpecDocument::from_ifs(&ifs));
        let back = parse_ifs_spec(&text).unwrap().build(None).unwrap();
        prop_assert_eq!(keys(&back), keys(&ifs));
    }

    #[test]
    fn double_systems_round_trip(seed in any::<u64>(), dim in 1usize..=2, n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // systems need contractions; redraw expanding maps
        let maps = (0..n)
            .map(|_| loop {
                let m = random_map(&mut rng, dim);
                if m.ratio().to_f64() < 1.0 {
                    break m;
                }
            })
            .collect();
        let ifs = IfsSystem::new("random", maps).unwrap();
        let back = parse_ifs_spec(&serialize_ifs_spec(&IfsSpecDocument::from_ifs(&ifs)))
            .unwrap()
            .build(None)
            .unwrap();
        for (a, b) in ifs.maps().iter().zip(back.maps()) {
            let (fa, fb) = (a.to_affine_f64(), b.to_affine_f64());
            for p in [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]] {
                let (x, y) = (fa.apply(p), fb.apply(p));
                prop_assert!((x[0] - y[0]).abs() <= 1e-12 && (x[1] - y[1]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn covering_csv_round_trip(
        rows in prop::collection::vec(
            (any::<bool>(), -10.0f64..10.0, -10.0f64..10.0, 1e-9f64..1.0, 1e-12f64..1.0, 0usize..1_000_000),
            0..40,
        ),
        note in "[a-z ,:=]{0,20}",
    ) {
        let records: Vec<CoveringRecord> = rows
            .iter()
            .map(|&(two, x, y, r, rho, count)| CoveringRecord {
                window_center: [x, if two { y } else { 0.0 }],
                dim: if two { 2 } else { 1 },
                r,
                rho,
                count,
            })
            .collect();
        let mut cfg = RunConfig::new();
        cfg.set("command", "dim").set("note", note.trim());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        emit_covering_csv(&records, &cfg, &path).unwrap();
        let (c2, r2) = read_covering_csv(&path).unwrap();
        prop_assert_eq!(r2, records);
        prop_assert_eq!(c2.get("command"), Some("dim"));
    }
}

#[test]
fn box_records_survive_csv() {
    let ifs = example_document("cantor-1d", &ExampleParams::new())
        .unwrap()
        .build(None)
        .unwrap();
    let est = box_dimension_estimate(&ifs, 4, 12).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("box.csv");
    let mut cfg = RunConfig::new();
    cfg.set("spec", "cantor-1d");
    emit_covering_csv(&est.records, &cfg, &path).unwrap();
    let (c2, r2) = read_covering_csv(&path).unwrap();
    assert_eq!(c2, cfg);
    assert_eq!(r2.len(), 9);
    assert_eq!(r2, est.records);
}

#[test]
fn malformed_specs_name_the_field() {
    let base = serialize_ifs_spec(&example_document("cantor-1d", &ExampleParams::new()).unwrap());
    let cases = [
        (base.replace("\"1/3\"", "\"abc\""), "maps[0]"),
        (base.replace("\"ambient_dim\": 1", "\"ambient_dim\": 3"), "ambient_dim"),
        (base.replace("\"exact\"", "\"quad\""), "backend"),
    ];
    for (text, field) in cases {
        match parse_ifs_spec(&text) {
            Err(e @ Error::Parse { .. }) => assert!(e.to_string().contains(field), "{e}"),
            other => panic!("expected parse error naming {field}, got {other:?}"),
        }
    }
    assert!(parse_ifs_spec("{").is_err());
}
