use std::path::PathBuf;

use findef::algebra::from_json;
use findef::cli::{run, RunManifest};
use findef::definability::{check, Query, Verdict};
use findef::formula::SyntacticClass;
use findef::target::Target;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn findef(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let code = run(std::iter::once("findef").chain(args.iter().copied()), &mut out);
    (code, String::from_utf8(out).unwrap())
}

#[test]
fn check_exit_codes() {
    let starstar = data("stone3_starstar.json");
    let (code, out) = findef(&["check", &starstar, "--class", "pp", "--target", "f", "--sublanguage", "join,meet,star,zero,one"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("definable in pp"));

    let (code, out) = findef(&["check", &data("stone3_half.json"), "--class", "pp", "--target", "f"]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("map: (0) -> 0, (1) -> 2, (2) -> 2"), "{out}");

    let (code, out) = findef(&["check", &data("malformed.json"), "--class", "pp", "--target", "f"]);
    assert_eq!(code, 2);
    assert!(out.contains("5:45"), "{out}");

    let (code, _) = findef(&["check", &data("missing.json"), "--class", "pp", "--target", "f"]);
    assert_eq!(code, 2);
    let (code, _) = findef(&["check", "stone3", "--class", "nope", "--target", "f"]);
    assert_eq!(code, 2);
}

#[test]
fn resource_bound_is_exit_three() {
    let (code, out) = findef(&["check", &data("stone3_starstar.json"), "--class", "pp", "--target", "f", "--max-product-coords", "0"]);
    assert_eq!(code, 3, "{out}");
}

#[test]
fn json_verdict_round_trips() {
    let path = data("stone3_starstar.json");
    let a = from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    for class in ["atomic-conj", "pp", "open"] {
        let (code, out) = findef(&["--format", "json", "check", &path, "--class", class, "--target", "f"]);
        let parsed: Verdict = serde_json::from_str(&out).unwrap();
        assert_eq!(parsed.exit_code(), code);
        let target = Target::function("f");
        let lang = Query::complement_language(std::slice::from_ref(&a), &target).unwrap();
        let q = Query::new(vec![a.clone()], lang, target, class.parse::<SyntacticClass>().unwrap());
        assert_eq!(parsed, check(&q).unwrap());
    }
}

#[test]
fn manifests_are_deterministic() {
    let dir = std::env::temp_dir().join(format!("findef-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let body = |threads: &str, i: usize| {
        let path = dir.join(format!("m{threads}-{i}.json"));
        let p = path.to_string_lossy().into_owned();
        let (code, _) = findef(&["--threads", threads, "--manifest", &p, "check", &data("stone3_half.json"), "--class", "pp", "--target", "f"]);
        assert_eq!(code, 1);
        let mut m: RunManifest = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        m.wall_time_ms = 0;
        m
    };
    let first = body("1", 0);
    assert_eq!(first, body("1", 1));
    assert_eq!(first, body("4", 0));
    assert!(!first.resource_bound_hit);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn other_commands() {
    let (code, out) = findef(&["cong", "stone3", "--principal", "1", "2"]);
    assert_eq!((code, out.trim()), (0, "{{0}, {1, 2}}"));

    let (code, out) = findef(&["term", "bool2", "--discriminator"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("discriminator term: "));

    let (code, out) = findef(&["subalg", "stone3", "--generate", "1/2"]);
    assert_eq!((code, out.trim()), (0, "{0, 1, 2}"));

    let (code, out) = findef(&["hom", "--kind", "iso", "stone3"]);
    assert_eq!((code, out.trim()), (0, "(0, 1, 2)"));

    let (code, _) = findef(&["hom", "--kind", "emb", "stone3", "bool2"]);
    assert_eq!(code, 2, "signatures differ");

    let (code, out) = findef(&["cong", "stone3", "--cep"]);
    assert_eq!((code, out.trim()), (0, "congruence extension: holds"));

    let (code, out) = findef(&["term", "bool2", "--represent", "neg", "--sublanguage", "join,meet,zero,one", "--baker-pixley"]);
    assert_eq!(code, 1, "{out}");
    assert!(out.contains("does not contain"));
}
