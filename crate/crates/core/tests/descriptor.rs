use std::path::PathBuf;

use fusion_locality::descriptor::{Instance, InstanceDescriptor};
use fusion_locality::group::DEFAULT_GROUP_CAP;
use fusion_locality::Error;

fn bundled(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances").join(name)
}

fn build(text: &str) -> Result<Instance, Error> {
    InstanceDescriptor::from_json(text)?.build(DEFAULT_GROUP_CAP)
}

#[test]
fn bundled_descriptors_load() {
    let cases = [
        ("s3_abstract.json", 6, 3),
        ("s4.json", 24, 8),
        ("s5.json", 24, 8),
        ("s4_products.json", 24, 8),
        ("s4xc2.json", 48, 16),
    ];
    for (file, carrier, s) in cases {
        let inst = Instance::load(&bundled(file)).unwrap();
        assert_eq!(inst.locality.size(), carrier, "{file}");
        assert_eq!(inst.locality.s_labels().len(), s, "{file}");
        assert!(inst.locality.validate(3).passed(), "{file}");
    }
}

#[test]
fn named_sets_are_resolved_and_cut_to_the_carrier() {
    let inst = Instance::load(&bundled("s5.json")).unwrap();
    assert_eq!(inst.set("A5").len(), 12);
    assert_eq!(inst.set("V").len(), 4);
    assert_eq!(inst.set("S4").len(), 24);
    assert_eq!(inst.set("one").len(), 1);
    assert_eq!(inst.labels("one"), vec![inst.locality.identity()]);
}

#[test]
fn abstract_descriptor_infers_p() {
    let inst = Instance::load(&bundled("s3_abstract.json")).unwrap();
    assert_eq!(inst.locality.p(), 3);
    assert!(inst.group.is_none());
}

#[test]
fn one_line_generators_and_listed_elements() {
    let inst = build(
        r#"{"name": "s3", "group": {"degree": 3, "generators": [[2, 1, 3], [2, 3, 1]]}, "p": 3,
            "normal_subgroups": {"C3": {"elements": [[], [[1, 2, 3]], [[1, 3, 2]]]}}}"#,
    )
    .unwrap();
    assert_eq!(inst.group.as_ref().unwrap().order(), 6);
    assert_eq!(inst.set("C3").len(), 3);
    assert_eq!(inst.locality.s_labels().len(), 3);
}

#[test]
fn descriptor_errors() {
    let bad = [
        // not a bijection
        r#"{"name": "x", "group": {"degree": 3, "generators": [[1, 1, 2]]}, "p": 2}"#,
        // wrong generator length
        r#"{"name": "x", "group": {"degree": 3, "generators": [[1, 2]]}, "p": 2}"#,
        // cycle entry out of range
        r#"{"name": "x", "group": {"degree": 3, "cycles": [[[1, 4]]]}, "p": 2}"#,
        // unknown field
        r#"{"name": "x", "group": {"degree": 3, "cycles": []}, "p": 2, "colour": 1}"#,
        // duplicate set names
        r#"{"name": "x", "group": {"degree": 3, "cycles": []}, "p": 2, "normal_subgroups": {"A": [0]}, "k_choices": {"A": [0]}}"#,
        // dangling reference
        r#"{"name": "x", "group": {"degree": 3, "cycles": []}, "p": 2, "theorem1": [["A", "B"]]}"#,
        // neither group nor carrier
        r#"{"name": "x"}"#,
        // group without p
        r#"{"name": "x", "group": {"degree": 3, "cycles": []}}"#,
        // element not in the group
        r#"{"name": "x", "group": {"degree": 3, "cycles": [[[1, 2, 3]]]}, "p": 3, "k_choices": {"K": {"elements": [[[1, 2]]]}}}"#,
    ];
    for text in bad {
        let err = build(text).unwrap_err();
        assert!(matches!(err, Error::Descriptor(_) | Error::NotBijective { .. }), "{text}: {err:?}");
    }
}

#[test]
fn group_cap_applies() {
    let d = InstanceDescriptor::load(&bundled("s5.json")).unwrap();
    assert!(matches!(d.build(100), Err(Error::CapExceeded { .. })));
}
