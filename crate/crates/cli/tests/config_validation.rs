use std::path::PathBuf;

use hartree_cli::{parse_config, parse_config_for, Kind};

fn violations(text: &str) -> Vec<String> {
    parse_config(text)
        .unwrap_err()
        .violations
        .iter()
        .map(|v| v.to_string())
        .collect()
}

#[test]
fn dimension_five_is_rejected_with_its_range() {
    let v = violations("kind = norms\ngrid.d = 5\n");
    assert_eq!(v.len(), 1, "{v:?}");
    assert!(v[0].starts_with("line 2: grid.d:"), "{}", v[0]);
    assert!(v[0].contains("1..=4"));
}

#[test]
fn duplicate_key_cites_both_lines() {
    let v = violations("kind = norms\ngrid.d = 2\n# comment\ngrid.d = 3\n");
    assert_eq!(v, vec!["lines 2, 4: duplicate key `grid.d`".to_string()]);
}

#[test]
fn unknown_key_is_named() {
    let v = violations("kind = norms\ngrid.d = 2\ngrid.M = 3\n");
    assert_eq!(v, vec!["line 3: unknown key `grid.M`".to_string()]);
}

#[test]
fn missing_required_keys_name_the_experiment() {
    let v = violations("kind = instability\nw.kind = delta\n");
    assert_eq!(v, vec!["experiment `instability` requires m, xi".to_string()]);
}

#[test]
fn every_violation_is_reported_at_once() {
    let v = violations("kind = simulate\nf.kind = plasma\ngrid.N = 12\nbogus\ndt = -1\n");
    let all = v.join("\n");
    for needle in [
        "line 4: expected `key = value`",
        "requires w.kind, T",
        "line 2: f.kind",
        "line 3: grid.N",
        "line 5: dt",
    ] {
        assert!(all.contains(needle), "missing `{needle}` in:\n{all}");
    }
}

#[test]
fn kind_must_match_the_command_line() {
    let err = parse_config_for(Some(Kind::Norms), "kind = picard\ngrid.d = 1\n").unwrap_err();
    assert!(err
        .to_string()
        .contains("declares kind `picard` but `norms` was requested"));
    assert!(parse_config_for(Some(Kind::Norms), "grid.d = 1\n").is_ok());
    assert!(parse_config("grid.d = 1\n")
        .unwrap_err()
        .to_string()
        .contains("missing required key `kind`"));
}

#[test]
fn shipped_configs_parse_and_echo_round_trips() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "conf") {
            let text = std::fs::read_to_string(&path).unwrap();
            let cfg = parse_config(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            let again = parse_config(&cfg.echo()).unwrap();
            assert_eq!(cfg, again, "{}", path.display());
            assert_eq!(again.echo(), cfg.echo());
            seen += 1;
        }
    }
    assert_eq!(seen, Kind::ALL.len());
}
