mod common;

use common::*;
use mfl_harness::{EpsilonRule, ExperimentConfig, HarnessError};

#[test]
fn examples_round_trip() {
    for name in ["hartree-theta0.toml", "nls-theta.toml"] {
        let cfg = example(name);
        let text = cfg.to_toml().unwrap();
        let again = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(cfg, again, "{name}");
        assert_eq!(text, again.to_toml().unwrap());
    }
}

#[test]
fn defaults_fill_in() {
    let cfg = example("hartree-theta0.toml");
    assert_eq!(cfg.lemmas.states, 100);
    assert_eq!(cfg.memory_cap, mfl_core::manybody::DEFAULT_MEMORY_CAP);
    let nls = example("nls-theta.toml");
    let eps = nls.ladder.epsilons(nls.model.epsilon());
    assert!((eps[0] - 2f64.powf(-0.55)).abs() < 1e-15);
}

fn rejects(edit: impl Fn(&mut toml::Table)) -> HarnessError {
    let text = std::fs::read_to_string(config_path("hartree-theta0.toml")).unwrap();
    let mut doc: toml::Table = text.parse().unwrap();
    edit(&mut doc);
    let err = ExperimentConfig::from_toml(&toml::to_string(&doc).unwrap()).unwrap_err();
    assert_eq!(err.exit_code(), 4, "{err}");
    err
}

fn section<'a>(doc: &'a mut toml::Table, key: &str) -> &'a mut toml::Table {
    doc.get_mut(key).unwrap().as_table_mut().unwrap()
}

#[test]
fn invalid_documents_are_config_errors() {
    rejects(|d| {
        section(d, "ladder").insert("n_values".into(), toml::Value::Array(vec![]));
    });
    rejects(|d| {
        d.insert("surprise".into(), toml::Value::Integer(1));
    });
    rejects(|d| {
        section(d, "run").insert("dt".into(), toml::Value::Float(0.3));
    });
    rejects(|d| {
        section(d, "initial").insert("center".into(), toml::Value::Array(vec![]));
    });
    rejects(|d| {
        section(d, "model").insert("theta".into(), toml::Value::Float(0.2));
    });
    rejects(|d| {
        d.remove("seed");
    });
}

#[test]
fn explicit_epsilons_must_match_the_ladder() {
    let mut cfg = example("hartree-theta0.toml");
    cfg.ladder.epsilon = EpsilonRule::Explicit { values: vec![0.5, 0.4] };
    assert_eq!(cfg.validate().unwrap_err().exit_code(), 4);
    cfg.ladder.epsilon = EpsilonRule::Explicit { values: vec![0.5, 0.4, 0.3] };
    cfg.validate().unwrap();
    assert_eq!(cfg.model_at(4, 0.3).domain.confined.epsilon, 0.3);
}
