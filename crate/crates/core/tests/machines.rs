use aca_core::tm::{builtin, parse_tm, tm_output, tm_run, tm_step, zigzag_machine, Move, TmConfiguration, BUILTIN_NAMES};
use proptest::prelude::*;

#[test]
fn zigzag_first_steps() {
    let tm = zigzag_machine();
    let c0 = TmConfiguration::initial(&tm, &[]);
    let c1 = tm_step(&tm, &c0);
    assert_eq!((tm.state_name(c1.state), c1.head), ("qL", -1));
    assert_eq!(tm.symbol_name(c1.read(tm.blank(), 0)), "1");
    let c2 = tm_step(&tm, &c1);
    assert_eq!((tm.state_name(c2.state), c2.head), ("qR", 0));
    assert_eq!(tm.format_word(&c2.window(tm.blank(), -1, 0)), "01");
}

#[test]
fn zigzag_has_no_final_states() {
    let tm = zigzag_machine();
    assert_eq!(tm.finals().count(), 0);
    assert_eq!(tm.num_states(), 2);
    assert_eq!(tm.num_symbols(), 3);
    let run = tm_run(&tm, &[], 500);
    assert!(!run.halted);
    assert_eq!(run.configs.len(), 501);
}

#[test]
fn unary_increment_output() {
    let tm = builtin("unary-inc").unwrap();
    let x = tm.parse_word("11").unwrap();
    let run = tm_run(&tm, &x, 100);
    assert!(run.halted);
    assert_eq!(tm.format_word(&tm_output(&tm, &run).unwrap()), "111");
}

#[test]
fn binary_counter_outputs() {
    let tm = builtin("bin-counter").unwrap();
    for (x, y) in [("", "1"), ("0", "1"), ("1", "10"), ("1011", "1100"), ("111", "1000")] {
        let run = tm_run(&tm, &tm.parse_word(x).unwrap(), 200);
        assert!(run.halted, "{x}");
        assert_eq!(tm.format_word(&tm_output(&tm, &run).unwrap()), y, "{x}");
    }
}

#[test]
fn palindrome_verdicts() {
    let tm = builtin("palindrome").unwrap();
    for (x, pal) in [("", true), ("0", true), ("01", false), ("0110", true), ("0100", false), ("10101", true)] {
        let run = tm_run(&tm, &tm.parse_word(x).unwrap(), 500);
        assert!(run.halted, "{x}");
        let accepted = tm.state_name(run.last().state) == "accept";
        assert_eq!(accepted, pal, "{x}");
    }
}

#[test]
fn initial_final_state_freezes_at_once() {
    let src = "machine idle\nblank _\ninput a\nwork a _\nstates h\ninitial h\nfinal h\n\
               delta h a -> h a R\ndelta h _ -> h _ R\n";
    let tm = parse_tm(src).unwrap();
    let run = tm_run(&tm, &tm.parse_word("aa").unwrap(), 10);
    assert_eq!(run.steps_to_halt, Some(0));
    assert!(run.configs.iter().all(|c| *c == run.configs[0]));
}

#[test]
fn parse_errors() {
    let partial = "machine m\nblank _\ninput a\nwork a _\nstates s\ninitial s\nfinal\ndelta s a -> s a R\n";
    assert!(parse_tm(partial).unwrap_err().to_string().contains("partial transition function"));
    let blank_in = "machine m\nblank _\ninput a _\nwork a _\nstates s\ninitial s\nfinal\n\
                    delta s a -> s a R\ndelta s _ -> s _ R\n";
    assert!(parse_tm(blank_in).unwrap_err().to_string().contains("blank in input alphabet"));
    let unknown = "machine m\nblank _\ninput a\nwork a _\nstates s\ninitial s\nfinal\n\
                   delta s a -> t a R\ndelta s _ -> s _ R\n";
    assert!(parse_tm(unknown).is_err());
}

#[test]
fn builtins_round_trip_through_source() {
    for name in BUILTIN_NAMES {
        let tm = builtin(name).unwrap();
        assert_eq!(parse_tm(&tm.to_source()).unwrap(), tm, "{name}");
    }
}

fn machine_and_input() -> impl Strategy<Value = (usize, Vec<usize>)> {
    (0..BUILTIN_NAMES.len(), proptest::collection::vec(0usize..2, 0..8))
}

proptest! {
    #[test]
    fn runs_are_deterministic((m, x) in machine_and_input(), n in 0usize..60) {
        let tm = builtin(BUILTIN_NAMES[m]).unwrap();
        let x: Vec<_> = x.iter().map(|&i| tm.input_symbols()[i % tm.input_symbols().len()]).collect();
        prop_assert_eq!(tm_run(&tm, &x, n).configs, tm_run(&tm, &x, n).configs);
    }

    #[test]
    fn head_locality_and_light_cone((m, x) in machine_and_input(), n in 0usize..60) {
        let tm = builtin(BUILTIN_NAMES[m]).unwrap();
        let x: Vec<_> = x.iter().map(|&i| tm.input_symbols()[i % tm.input_symbols().len()]).collect();
        let run = tm_run(&tm, &x, n);
        for (t, w) in run.configs.windows(2).enumerate() {
            let (a, b) = (&w[0], &w[1]);
            prop_assert!(!tm.is_final(a.state));
            prop_assert!(Move::from_offset(b.head - a.head).is_some());
            let lo = -(t as i64) - 3;
            let hi = x.len() as i64 + t as i64 + 3;
            for i in lo..=hi {
                if i != a.head {
                    prop_assert_eq!(a.read(tm.blank(), i), b.read(tm.blank(), i));
                }
            }
            let outside = b.tape.iter().any(|(&i, &s)| {
                s != tm.blank() && (i < -(t as i64) - 2 || i > x.len() as i64 + t as i64 + 1)
            });
            prop_assert!(!outside);
        }
    }

    #[test]
    fn halted_runs_freeze((m, x) in machine_and_input()) {
        let tm = builtin(BUILTIN_NAMES[m]).unwrap();
        let x: Vec<_> = x.iter().map(|&i| tm.input_symbols()[i % tm.input_symbols().len()]).collect();
        let run = tm_run(&tm, &x, 400);
        if let Some(h) = run.steps_to_halt {
            let frozen = &run.configs[h];
            prop_assert_eq!(&tm_step(&tm, frozen), frozen);
            prop_assert!(tm_output(&tm, &run).is_ok());
        } else {
            prop_assert!(tm_output(&tm, &run).is_err());
        }
    }
}
