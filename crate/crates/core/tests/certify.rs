use kgcert::certify::{certify, generate_instance, CertifyError, CertifyOptions};
use kgcert::fixtures::toy_graph;
use kgcert::model::{CompletionRequest, MockMode, MockModel, Model, ModelDescriptor, ModelError};
use kgcert::prompting::{collect_evidence, Tier};
use kgcert::sampling::{extract_subgraph, SpecConfig, SpecKind};
use kgcert::seed::derive_rng;

fn spec(kind: SpecKind, n: usize) -> SpecConfig {
    let mut s = SpecConfig::new("Q1".into(), kind);
    s.n_samples = n;
    s
}

#[test]
fn always_correct_lower_bound_is_closed_form() {
    let (g, _) = toy_graph();
    let model = MockModel::new(MockMode::AlwaysCorrect, 1).unwrap();
    let (cert, log) = certify(&g, &spec(SpecKind::Vanilla, 20), &model, &CertifyOptions::default()).unwrap();
    assert_eq!((cert.results.n, cert.results.k), (20, 20));
    assert!((cert.results.lower - 0.025f64.powf(1.0 / 20.0)).abs() < 1e-10);
    assert_eq!(cert.results.upper, 1.0);
    assert_eq!(log.len(), 20);
    assert!(log.iter().enumerate().all(|(i, r)| r.index == i && r.verdict));
    let hop_total: usize = cert.results.per_hop.iter().map(|t| t.n).sum();
    assert_eq!(hop_total, 20);
}

#[test]
fn never_correct_upper_bound_is_closed_form() {
    let (g, _) = toy_graph();
    let model = MockModel::new(MockMode::FixedAccuracy(0.0), 1).unwrap();
    let (cert, _) = certify(&g, &spec(SpecKind::Shuffle, 20), &model, &CertifyOptions::default()).unwrap();
    assert_eq!(cert.results.k, 0);
    assert_eq!(cert.results.lower, 0.0);
    assert!((cert.results.upper - (1.0 - 0.025f64.powf(1.0 / 20.0))).abs() < 1e-10);
}

#[test]
fn always_distracted_picks_the_distractor() {
    let (g, _) = toy_graph();
    let model = MockModel::new(MockMode::AlwaysDistracted, 3).unwrap();
    let (cert, log) = certify(&g, &spec(SpecKind::ShuffleDistractor, 40), &model, &CertifyOptions::default()).unwrap();
    assert_eq!(cert.results.k, 0);
    assert!(log.iter().all(|r| r.chosen_option.is_some()));
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let (g, _) = toy_graph();
    let s = spec(SpecKind::ShuffleDistractor, 60);
    let model = MockModel::new(MockMode::FixedAccuracy(0.5), 9).unwrap();
    let run = |threads| certify(&g, &s, &model, &CertifyOptions { threads, ..Default::default() }).unwrap();
    let (a, la) = run(1);
    let (b, lb) = run(4);
    assert_eq!(a, b);
    assert_eq!(la, lb);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[test]
fn unknown_pivot_and_bad_config_fail_early() {
    let (g, _) = toy_graph();
    let model = MockModel::new(MockMode::AlwaysCorrect, 0).unwrap();
    let mut s = spec(SpecKind::Vanilla, 5);
    s.pivot = "nope".into();
    assert!(matches!(certify(&g, &s, &model, &CertifyOptions::default()), Err(CertifyError::Sampling(_))));
    let mut s = spec(SpecKind::Vanilla, 5);
    s.confidence = 1.5;
    assert!(certify(&g, &s, &model, &CertifyOptions::default()).is_err());
}

#[test]
fn exhausted_redraws_are_reported() {
    // A pivot without out-edges admits no path at all.
    let (g, _) = toy_graph();
    let model = MockModel::new(MockMode::AlwaysCorrect, 0).unwrap();
    let sink = g.node_ids().find(|id| g.out_degree(id) == 0).unwrap().clone();
    let s = SpecConfig { n_samples: 3, ..SpecConfig::new(sink, SpecKind::Vanilla) };
    let opts = CertifyOptions { max_redraws: 2, ..Default::default() };
    match certify(&g, &s, &model, &opts) {
        Err(CertifyError::RedrawsExhausted { attempts, .. }) => assert_eq!(attempts, 3),
        other => panic!("unexpected {other:?}"),
    }
}

struct Failing;

impl Model for Failing {
    fn complete(&self, _: &CompletionRequest<'_>) -> Result<String, ModelError> {
        Err(ModelError::HttpStatus(500))
    }

    fn descriptor(&self) -> ModelDescriptor {
        ModelDescriptor { name: "failing".into(), endpoint: None, mock: None }
    }
}

#[test]
fn model_errors_abort() {
    let (g, _) = toy_graph();
    let err = certify(&g, &spec(SpecKind::Vanilla, 5), &Failing, &CertifyOptions::default()).unwrap_err();
    assert!(matches!(err, CertifyError::Model { source: ModelError::HttpStatus(500), .. }));
}

#[test]
fn instances_carry_query_evidence_within_budget() {
    let (g, _) = toy_graph();
    let sub = extract_subgraph(&g, &"Q1".into(), 4).unwrap();
    for kind in SpecKind::ALL {
        let s = spec(kind, 1);
        for seed in 0..50 {
            let inst = generate_instance(&sub, &s, &mut derive_rng(seed, &[])).unwrap();
            let p = &inst.prompt;
            assert!(p.token_estimate <= s.token_budget);
            let path = &p.query.path;
            let ev = collect_evidence(&g, path, &p.options, inst.distractor.as_ref());
            for r in &ev.query {
                let block = p.context.iter().find(|b| b.owner == r.owner).expect("owner block");
                assert!(block.indices.contains(&r.index));
                assert_eq!(block.tier, Tier::QueryEvidence);
            }
        }
    }
}
