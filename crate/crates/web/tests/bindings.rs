use flyterm_web::{check_json, compile_family_json, evaluate_json};

const T_EDGE: &str = "(add -1 2 (add 1 -1 (oplus (oplus (leaf 1) (leaf 2)) (leaf -1))))";

#[test]
fn evaluates_a_single_edge() {
    let v = evaluate_json(T_EDGE).unwrap();
    assert_eq!(v["graph"]["text"], "p digraph 2 1\na 1 1 2\n");
    assert_eq!(v["incidences"].as_array().unwrap().len(), 2);
}

#[test]
fn dangling_edge_is_reported_not_fatal() {
    let v = evaluate_json("(leaf -1)").unwrap();
    assert!(v["graph"]["error"].is_string());
    assert!(evaluate_json("(leaf").is_err());
}

#[test]
fn check_runs_guards() {
    assert_eq!(check_json("ct", T_EDGE).unwrap()["verdict"], "accepted");
    assert_eq!(check_json("ham-core", "(leaf -1)").unwrap()["verdict"], "guard_failed");
    let two_cycle = "(add -2 1 (add 2 -2 (add -1 2 (add 1 -1 (oplus (oplus (leaf 1) (leaf 2)) (oplus (leaf -1) (leaf -2)))))))";
    assert_eq!(check_json("dirham", two_cycle).unwrap()["verdict"], "accepted");
    assert!(check_json("nope", T_EDGE).is_err());
}

#[test]
fn families_compile() {
    let c = compile_family_json("cycle", 50, 0).unwrap();
    assert_eq!(c["dirham"], true);
    assert!(c["d_used"].as_u64().unwrap() <= 7);
    assert_eq!(compile_family_json("path", 50, 0).unwrap()["dirham"], false);
    assert!(compile_family_json("ktree", 30, 4).is_ok());
    assert!(compile_family_json("cycle", 0, 0).is_err());
    assert!(compile_family_json("star", 5, 0).is_err());
}
