//! Serialized outputs checked against the JSON schemas in `schemas/`.
//!
//! The validator covers the keywords the schemas use: `type`, `required`,
//! `properties`, `additionalProperties: false`, `items`, `enum`, `minimum`,
//! `maximum` and local `$ref`.

use serde_json::Value;
use ucs_core::family::make_family;
use ucs_core::search::{corpus_verify, exhaustive_corpus};
use ucs_core::witness::{counting_audit, falgas_ravry_chain, minimal_transversal};
use ucs_core::{bounds, SetFamily};

fn load(name: &str) -> Value {
    let path = format!("{}/schemas/{name}.schema.json", env!("CARGO_MANIFEST_DIR"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn type_ok(t: &str, v: &Value) -> bool {
    match t {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "number" => v.is_number(),
        "integer" => v.is_i64() || v.is_u64(),
        other => panic!("unsupported type {other}"),
    }
}

fn resolve<'a>(root: &'a Value, reference: &str) -> &'a Value {
    let pointer = reference.strip_prefix('#').expect("local ref");
    root.pointer(pointer)
        .unwrap_or_else(|| panic!("dangling ref {reference}"))
}

fn validate(root: &Value, schema: &Value, v: &Value, path: &str, errors: &mut Vec<String>) {
    if let Some(r) = schema.get("$ref").and_then(Value::as_str) {
        return validate(root, resolve(root, r), v, path, errors);
    }
    if let Some(t) = schema.get("type") {
        let ok = match t {
            Value::String(s) => type_ok(s, v),
            Value::Array(ts) => ts.iter().any(|t| type_ok(t.as_str().unwrap(), v)),
            _ => panic!("bad type keyword"),
        };
        if !ok {
            errors.push(format!("{path}: expected type {t}, got {v}"));
            return;
        }
    }
    if let Some(options) = schema.get("enum").and_then(Value::as_array) {
        if !options.contains(v) {
            errors.push(format!("{path}: {v} not in enum"));
        }
    }
    if let Some(x) = v.as_f64() {
        if let Some(min) = schema.get("minimum").and_then(Value::as_f64) {
            if x < min {
                errors.push(format!("{path}: {x} < minimum {min}"));
            }
        }
        if let Some(max) = schema.get("maximum").and_then(Value::as_f64) {
            if x > max {
                errors.push(format!("{path}: {x} > maximum {max}"));
            }
        }
    }
    if let Some(obj) = v.as_object() {
        for key in schema
            .get("required")
            .and_then(Value::as_array)
            .into_iter()
            .flatten()
        {
            let key = key.as_str().unwrap();
            if !obj.contains_key(key) {
                errors.push(format!("{path}: missing {key}"));
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        for (key, value) in obj {
            match props.and_then(|p| p.get(key)) {
                Some(sub) => validate(root, sub, value, &format!("{path}.{key}"), errors),
                None if schema.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    errors.push(format!("{path}: unexpected property {key}"))
                }
                None => {}
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), v.as_array()) {
        for (i, item) in arr.iter().enumerate() {
            validate(root, items, item, &format!("{path}[{i}]"), errors);
        }
    }
}

fn assert_conforms(name: &str, v: &Value) {
    let schema = load(name);
    let mut errors = Vec::new();
    validate(&schema, &schema, v, "$", &mut errors);
    assert!(errors.is_empty(), "{name}: {errors:#?}\n{v}");
}

fn json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap()
}

fn samples() -> Vec<SetFamily> {
    vec![
        make_family([vec![0], vec![1], vec![0, 1]]).unwrap(),
        make_family([
            vec![],
            vec![0],
            vec![0, 1],
            vec![0, 1, 2],
            vec![2],
            vec![0, 2],
        ])
        .unwrap(),
        make_family([vec![], vec![0], vec![1], vec![0, 1]]).unwrap(),
    ]
}

#[test]
fn validator_rejects_bad_instances() {
    let schema = load("family");
    let bad = serde_json::json!({"universe_size": 2, "members": [[0, 70]], "extra": 1});
    let mut errors = Vec::new();
    validate(&schema, &schema, &bad, "$", &mut errors);
    assert_eq!(errors.len(), 2, "{errors:?}");
    let mut errors = Vec::new();
    validate(
        &schema,
        &schema,
        &serde_json::json!({"members": []}),
        "$",
        &mut errors,
    );
    assert_eq!(errors.len(), 1);
}

#[test]
fn family_output_conforms() {
    for f in samples() {
        assert_conforms("family", &json(&f));
    }
}

#[test]
fn witness_outputs_conform() {
    for f in samples() {
        assert_conforms("chain_witness", &json(&falgas_ravry_chain(&f).unwrap()));
        assert_conforms(
            "transversal_report",
            &json(&minimal_transversal(&f).unwrap()),
        );
        assert_conforms("counting_audit", &json(&counting_audit(&f).unwrap()));
    }
}

#[test]
fn bound_reports_conform() {
    assert_conforms(
        "bound_report",
        &json(&bounds::bound_report::<f64>(13, None).unwrap()),
    );
    assert_conforms(
        "bound_report",
        &json(&bounds::bound_report::<f64>(100, Some(250)).unwrap()),
    );
    assert_conforms(
        "bound_report",
        &json(&bounds::bound_report::<f64>(2, Some(4)).unwrap()),
    );
    for f in samples() {
        assert_conforms("bound_report", &json(&bounds::applicability(&f).unwrap()));
    }
}

#[test]
fn corpus_report_conforms() {
    let mut corpus = exhaustive_corpus(2).unwrap();
    corpus.push(make_family([vec![0], vec![1]]).unwrap());
    let report = corpus_verify(corpus);
    assert_eq!(report.rejected.len(), 1);
    assert_conforms("corpus_report", &json(&report));
}
