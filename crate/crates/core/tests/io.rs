//! Table files and the exec oracle line protocol.

mod common;

use common::game;
use shapint::game::{parse_table, read_table, write_table, ExecOracle};
use shapint::shapley::shapley_vector;
use shapint::{Coalition, Error, Game, GameSpec, ValueTable};

#[test]
fn written_table_reloads_identically() {
    let g = game("random:6,77");
    let table = g.exact_table().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("game.csv");
    write_table(std::fs::File::create(&path).unwrap(), &table).unwrap();
    let back = read_table(&path).unwrap();
    assert_eq!(back.values(), table.values());
    let reloaded = shapint::build_game(&GameSpec::Table { path }).unwrap();
    for mask in 0..64 {
        let c = Coalition::new(6, mask).unwrap();
        assert_eq!(
            reloaded.evaluate(&c).unwrap().to_bits(),
            g.evaluate(&c).unwrap().to_bits()
        );
    }
}

#[test]
fn three_player_table_answers_every_coalition() {
    let text = "mask,value\n000,0\n100,1\n010,2\n001,4\n110,3\n101,5\n011,6\n111,7.5\n";
    let g = Game::from_table(parse_table(text.as_bytes()).unwrap(), "t");
    assert_eq!(
        g.evaluate(&Coalition::from_mask_string("100", 3).unwrap())
            .unwrap(),
        1.0
    );
    assert_eq!(
        g.evaluate(&Coalition::from_mask_string("001", 3).unwrap())
            .unwrap(),
        4.0
    );
    assert_eq!(g.evaluate(&g.full()).unwrap(), 7.5);
}

#[test]
fn malformed_tables_name_the_problem() {
    let cases = [
        ("mask,value\n0,1\n0,2\n1,3\n", "duplicate mask 0"),
        ("mask,value\n00,1\n01,2\n11,3\n", "missing mask 10"),
        ("mask,value\n0,1\n1,nan\n", "finite"),
        ("mask,value\n0,1\n10,2\n", "expected 1 characters"),
        ("coalition,value\n0,1\n1,2\n", "header"),
    ];
    for (text, needle) in cases {
        let err = parse_table(text.as_bytes()).unwrap_err();
        assert!(
            matches!(err, Error::Config(_) | Error::Format { .. }),
            "{err}"
        );
        assert!(err.to_string().contains(needle), "{err} lacks {needle:?}");
    }
}

#[test]
fn exec_oracle_matches_in_process_values() {
    // echoes the number of present players for each mask
    let script = r#"while read m; do c=$(printf %s "$m" | tr -cd 1 | wc -c); echo "$c"; done"#;
    let g = Game::new(ExecOracle::spawn(5, script).unwrap(), "count").unwrap();
    let phi = shapley_vector(&g).unwrap();
    for x in phi.values {
        assert_eq!(x, 1.0);
    }
    assert_eq!(g.eval_count(), 32);
}

#[test]
fn exec_oracle_early_exit_is_an_oracle_error() {
    let g = Game::new(
        ExecOracle::spawn(4, "head -n 1 >/dev/null; echo 1").unwrap(),
        "short",
    )
    .unwrap();
    let err = g.exact_table().unwrap_err();
    assert!(matches!(err, Error::Oracle(_)), "{err}");
    // the session stays poisoned
    assert!(matches!(g.evaluate(&g.full()), Err(Error::Oracle(_))));
}

#[test]
fn exec_oracle_garbage_is_an_oracle_error() {
    let g = Game::new(
        ExecOracle::spawn(2, "while read m; do echo nope; done").unwrap(),
        "bad",
    )
    .unwrap();
    assert!(matches!(g.evaluate(&g.full()), Err(Error::Oracle(_))));
}

#[test]
fn derived_tables_keep_shape() {
    let t = ValueTable::from_fn(3, |m| m as f64).unwrap();
    assert_eq!(t.with_dummy(1.0).unwrap().n(), 4);
    assert_eq!(
        t.symmetrized(0, 2).unwrap().get(0b001),
        t.symmetrized(0, 2).unwrap().get(0b100)
    );
    assert!(t.add(&ValueTable::from_fn(2, |_| 0.0).unwrap()).is_err());
}
