use std::path::PathBuf;

use noonlab::core::schemes::{AngleRule, NoonPlan};
use noonlab::core::{run, Config};
use noonlab::dsl::{parse, ErrorKind};
use noonlab::exec::execute;
use noonlab::presets;
use proptest::prelude::*;

fn presets_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("presets")
}

#[test]
fn shipped_presets_match_generator() {
    for (name, text) in presets::all(8) {
        let shipped = std::fs::read_to_string(presets_dir().join(&name)).unwrap();
        assert_eq!(shipped, text, "{name} is stale; run `noonlab emit-presets`");
    }
}

#[test]
fn presets_round_trip() {
    for (name, text) in presets::all(8) {
        let ir = parse(&text).unwrap();
        let printed = ir.to_string();
        let again = parse(&printed).unwrap_or_else(|e| panic!("{name}: {e}\n{printed}"));
        assert_eq!(again, ir, "{name}");
        assert_eq!(again.to_string(), printed);
    }
}

#[test]
fn malformed_sources_are_positioned() {
    let cases: &[(&str, usize, usize, ErrorKind)] = &[
        (
            "mode a\nmode b\nbs a q theta=pi/4",
            3,
            6,
            ErrorKind::UndeclaredMode,
        ),
        ("mode a\nmode a", 2, 6, ErrorKind::DuplicateMode),
        ("mode a\n  beam a a", 2, 3, ErrorKind::UnknownDirective),
        (
            "mode a\nmode b\nbs a b theta=pi/*4",
            3,
            17,
            ErrorKind::Syntax,
        ),
        (
            "mode a\nmode b\nbs a b theta=(pi/4",
            3,
            19,
            ErrorKind::Syntax,
        ),
        (
            "mode a\nmode b\nbs a b theta=foo(1)",
            3,
            14,
            ErrorKind::Syntax,
        ),
        ("mode a\nmode b\nbs a b", 3, 7, ErrorKind::Syntax),
        ("mode a\ninput a -1", 2, 9, ErrorKind::Syntax),
        ("mode a\ninput a 1.5", 2, 9, ErrorKind::Syntax),
        ("mode a pol\nrot b theta=1", 2, 5, ErrorKind::UndeclaredMode),
        ("mode a\nrot a theta=1", 2, 1, ErrorKind::Semantic),
        (
            "mode a pol\nmode b\nbs a b theta=1",
            3,
            1,
            ErrorKind::Semantic,
        ),
        ("mode a pol\npbs - a -> a -", 2, 5, ErrorKind::Syntax),
        ("mode a pol\npbs a - > b c", 2, 9, ErrorKind::Syntax),
        (
            "mode a\nmode c\ndetect c = 1\ninject c 1",
            4,
            8,
            ErrorKind::UndeclaredMode,
        ),
        ("mode a\ninject z 1", 2, 8, ErrorKind::UndeclaredMode),
        (
            "mode a\nmode b\nbs a b theta=1\ninput a 1",
            4,
            1,
            ErrorKind::Semantic,
        ),
        ("mode a\ninput a 65", 2, 1, ErrorKind::Semantic),
        ("mode a;b", 1, 7, ErrorKind::Syntax),
        ("mode 1 pol\nmode 1H", 2, 6, ErrorKind::DuplicateMode),
    ];
    let mut wrong = Vec::new();
    for (src, line, column, kind) in cases {
        let err = parse(src).expect_err(src);
        if (err.line, err.column, err.kind) != (*line, *column, *kind) {
            wrong.push(format!(
                "{src:?}: got {}:{} {:?} ({err})",
                err.line, err.column, err.kind
            ));
        }
    }
    assert!(wrong.is_empty(), "{}", wrong.join("\n"));
}

#[test]
fn consumed_modes_name_their_detection() {
    let err = parse("mode a\nmode c\ndetect c = 1\ninject c 1").unwrap_err();
    assert_eq!(
        err.to_string(),
        "line 4: mode 'c' no longer exists after line 3"
    );
}

#[test]
fn fig1_through_the_language() {
    let ir = parse(&presets::fig1()).unwrap();
    let r = execute(&ir, &Config::default(), false).unwrap();
    assert!((r.probability - 1.0 / 18.0).abs() < 1e-12);
    let target = noonlab::core::schemes::singlet().unwrap();
    assert!(r.state.fidelity(&target).unwrap() >= 1.0 - 1e-10);
}

#[test]
fn noon_presets_match_engine_plans() {
    let cfg = Config::default();
    for p in 2..=8 {
        let ir = parse(&presets::noon(p, AngleRule::ZeroFactor).unwrap()).unwrap();
        let via_text = execute(&ir, &cfg, false).unwrap();
        let (input, circuit) = NoonPlan::new(p, AngleRule::ZeroFactor)
            .unwrap()
            .circuit()
            .unwrap();
        let direct = run(&circuit, &input, &cfg, false).unwrap();
        assert!(
            via_text.state.max_abs_diff(&direct.state).unwrap() < 1e-12,
            "P={p}"
        );
        assert!((via_text.probability - direct.probability).abs() < 1e-15);
    }
}

#[test]
fn execution_is_deterministic() {
    for (_, text) in presets::all(6) {
        let ir = parse(&text).unwrap();
        let a = execute(&ir, &Config::default(), true).unwrap();
        let b = execute(&parse(&text).unwrap(), &Config::default(), true).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.probability.to_bits(), b.probability.to_bits());
    }
}

#[test]
fn unitary_only_circuits_have_probability_one() {
    let ir = parse("mode a\nmode b pol\ninput a 2\ninput bV 1\nbs a bH theta=0.3\nrot b theta=1.1")
        .unwrap();
    assert_eq!(
        execute(&ir, &Config::default(), false).unwrap().probability,
        1.0
    );
}

fn within_source(src: &str, line: usize, column: usize) -> bool {
    let lines: Vec<&str> = src.lines().collect();
    line >= 1
        && line <= lines.len().max(1)
        && column >= 1
        && column <= lines.get(line - 1).map_or(0, |l| l.chars().count()) + 1
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// Random edits of a preset either parse or fail inside the source.
    #[test]
    fn errors_point_into_the_source(
        pos in 0usize..600,
        del in 0usize..4,
        insert in "[a-z0-9 =()*/#>;-]{0,3}",
        which in 0usize..3,
    ) {
        let base = match which {
            0 => presets::fig1(),
            1 => presets::fig2(3, &noonlab::dsl::Expr::quarter_pi()),
            _ => presets::noon(5, AngleRule::ZeroFactor).unwrap(),
        };
        let chars: Vec<char> = base.chars().collect();
        let at = pos % chars.len();
        let end = (at + del).min(chars.len());
        let src: String = chars[..at].iter().chain(insert.chars().collect::<Vec<_>>().iter()).chain(&chars[end..]).collect();
        if let Err(e) = parse(&src) {
            prop_assert!(within_source(&src, e.line, e.column), "{e} at {}:{} in\n{src}", e.line, e.column);
        }
    }

    /// Any angle expression survives printing and reparsing.
    #[test]
    fn expressions_round_trip(a in 0.0f64..10.0, b in 1u32..20, op in 0usize..4) {
        let text = match op {
            0 => format!("atan(1/sqrt({b}))-{a}"),
            1 => format!("-({a}+pi)/{b}*2"),
            2 => format!("acos(sqrt({b}/{}))", b + 1),
            _ => format!("{a}-({a}-pi/{b})"),
        };
        let e = noonlab::dsl::parse_expr(&text).unwrap();
        let again = noonlab::dsl::parse_expr(&e.to_string()).unwrap();
        prop_assert_eq!(&again, &e);
        prop_assert_eq!(again.eval().to_bits(), e.eval().to_bits());
    }
}
