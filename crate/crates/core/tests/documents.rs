use mczcut::cutter::{self, DecompositionDocument};
use mczcut::harness::{gen_random_circuit, ExperimentConfig, RandomCircuitSpec};
use mczcut::sampler::stream_rng;
use mczcut::Circuit;

#[test]
fn random_circuit_document_roundtrip() {
    let c = gen_random_circuit(&RandomCircuitSpec::default(), 2, 3, &mut stream_rng(31, 0)).unwrap();
    let text = c.serialize();
    let back = Circuit::parse(&text).unwrap();
    assert_eq!(back, c);
    assert_eq!(back.serialize(), text);
    assert_eq!(back.find_cut().unwrap().order(), 5);
}

#[test]
fn decomposition_document_fields() {
    let d = cutter::decompose_mcz(1, 2).unwrap();
    let json = serde_json::to_value(d.to_document()).unwrap();
    assert_eq!(json["order"], 3);
    assert_eq!(json["kappa"], 4.5);
    let terms = json["terms"].as_array().unwrap();
    assert_eq!(terms.len(), d.len());
    let total: f64 = terms.iter().map(|t| t["coefficient"].as_f64().unwrap().abs()).sum();
    assert_eq!(total, 4.5);
    let back: DecompositionDocument = serde_json::from_value(json).unwrap();
    assert_eq!(back, d.to_document());
}

#[test]
fn experiment_config_defaults() {
    let c = ExperimentConfig::parse(
        r#"{"num_qubits": 5, "k": 2, "epsilon": 0.001, "mode": "pre-estimation",
            "repetitions": 10, "circuits_per_repetition": 5, "seed": 1, "out": "data"}"#,
    )
    .unwrap();
    assert_eq!(c.total_shots().unwrap(), 144_000_000);
    assert_eq!(c.kappa_budget, 6.0);
    assert_eq!(c.out.as_deref(), Some(std::path::Path::new("data")));
    assert!(ExperimentConfig::parse(r#"{"num_qubits": 5}"#).is_err());
}
