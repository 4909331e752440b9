use flyterm::automata::registry;
use flyterm::oracle::{diff_run, GenConfig, Reference};

fn run(id: &str, trials: u64, vertices: (usize, usize)) {
    let cfg = GenConfig { seed: 0xd1ff, vertices, edges: (0, 9), ..GenConfig::default() };
    let r = diff_run(id, &Reference::Oracle, &cfg, trials).unwrap();
    eprintln!("{id}: accepted {} skipped {}", r.accepted, r.skipped);
    assert!(r.passed(), "{id}: {:#?}", &r.mismatches[..r.mismatches.len().min(3)]);
    assert!(r.skipped < trials / 2, "{id}: too many skipped");
    // both answers occur, so agreement is not vacuous
    assert!(r.accepted > 0 && r.accepted < trials - r.skipped, "{id}: accepted {} of {}", r.accepted, trials);
}

#[test]
fn every_registered_automaton_matches_its_oracle() {
    for e in registry::ENTRIES {
        let vertices = if matches!(e.id, "dirham" | "ham-core") { (0, 6) } else { (0, 7) };
        run(e.id, 400, vertices);
    }
}

#[test]
fn composed_edg_agrees_with_edg() {
    let cfg = GenConfig { seed: 5, ..GenConfig::default() };
    let r = diff_run("composed-edg", &Reference::Automaton("edg".into()), &cfg, 300).unwrap();
    assert!(r.passed(), "{:?}", r.mismatches.first());
}
