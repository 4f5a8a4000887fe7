use anisons::config::RandomData;
use anisons::ExperimentConfig;
use serde_json::Value;

fn schema() -> Value {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/schema/experiment.schema.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

/// Every object node's property keys equal the serialized keys, and every
/// leaf default equals the serialized value.
fn check(node: &Value, value: &Value, at: &str) {
    if let Some(d) = node.get("default") {
        assert_eq!(d, value, "default at {at}");
    }
    let (Some(props), Value::Object(obj)) = (node.get("properties").and_then(Value::as_object), value) else {
        return;
    };
    let mut want: Vec<&String> = obj.keys().collect();
    let mut got: Vec<&String> = props.keys().collect();
    want.sort();
    got.sort();
    assert_eq!(got, want, "keys at {at}");
    for (k, v) in obj {
        check(&props[k], v, &format!("{at}/{k}"));
    }
}

#[test]
fn schema_matches_the_default_config() {
    let s = schema();
    let d = serde_json::to_value(ExperimentConfig::default()).unwrap();
    check(&s, &d, "");
}

#[test]
fn schema_documents_the_random_defaults() {
    let s = schema();
    let mut node = s["properties"]["random"].clone();
    node.as_object_mut().unwrap().remove("default");
    check(&node, &serde_json::to_value(RandomData::default()).unwrap(), "/random");
}

#[test]
fn every_leaf_has_a_default() {
    fn walk(node: &Value, at: &str) {
        let Some(props) = node.get("properties").and_then(Value::as_object) else { return };
        for (k, p) in props {
            if p.get("properties").is_none() && at != "/inputs" {
                assert!(p.get("default").is_some(), "{at}/{k} has no default");
            }
            walk(p, &format!("{at}/{k}"));
        }
    }
    walk(&schema(), "");
}
