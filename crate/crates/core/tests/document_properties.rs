use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use linklogic::cli::document::{GeometryDecl, Role};
use linklogic::cli::{parse, serialize, Document, Statement};
use linklogic::gates::GateKind;
use linklogic::sequential::ClockProgram;

fn pick<'a>(rng: &mut StdRng, from: &'a [String]) -> &'a String {
    &from[rng.random_range(0..from.len())]
}

/// A random document that declares everything before use and drives every
/// rail at most once.
fn random_document(seed: u64) -> Vec<Statement> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut body = Vec::new();
    let dual = |name: String, role| Statement::DualRail { name, role };
    let inputs: Vec<String> = (0..rng.random_range(1..4)).map(|i| format!("I{i}")).collect();
    let outputs: Vec<String> = (0..rng.random_range(1..4)).map(|i| format!("O{i}")).collect();
    let wires: Vec<String> = (0..rng.random_range(0..3)).map(|i| format!("W{i}")).collect();
    for n in &inputs {
        body.push(dual(n.clone(), Role::In));
    }
    for n in &outputs {
        body.push(dual(n.clone(), Role::Out));
    }
    for n in &wires {
        body.push(dual(n.clone(), Role::Wire));
    }
    for p in 0..rng.random_range(0..3) {
        body.push(Statement::Rail {
            name: format!("clk{p}"),
            clock: Some(p),
        });
    }
    let plain: Vec<String> = (0..5).map(|i| format!("P{i}")).collect();
    for n in &plain {
        body.push(Statement::Rail {
            name: n.clone(),
            clock: None,
        });
    }
    if rng.random_bool(0.5) {
        body.push(Statement::Balance {
            name: "bal".into(),
            input: plain[0].clone(),
            sides: [plain[1].clone(), plain[2].clone()],
            clock: rng.random_range(0..4),
        });
    }
    if rng.random_bool(0.5) {
        body.push(Statement::Lock {
            name: "lk".into(),
            halves: [plain[3].clone(), plain[4].clone()],
            clock: rng.random_range(0..4),
        });
    }

    let targets: Vec<String> = outputs.iter().chain(&wires).cloned().collect();
    for (i, t) in targets.iter().enumerate() {
        let src = pick(&mut rng, &inputs).clone();
        let other = pick(&mut rng, &inputs).clone();
        let clock = rng.random_range(0..4);
        let name = format!("e{i}");
        let s = match rng.random_range(0..6) {
            0 => {
                let kind = [GateKind::Nand, GateKind::Nor, GateKind::Xor, GateKind::And][rng.random_range(0..4)];
                Statement::Gate {
                    kind,
                    name,
                    pins: vec![("b".into(), other), ("x".into(), t.clone()), ("a".into(), src)],
                    clock,
                }
            }
            1 => Statement::Cell {
                name,
                input: src,
                output: t.clone(),
                clock,
            },
            2 => Statement::Chain {
                name,
                cells: rng.random_range(1..6),
                input: src,
                output: t.clone(),
                clock,
            },
            3 => Statement::Swap {
                name,
                src,
                dst: t.clone(),
                clock,
            },
            4 => {
                body.push(Statement::Copy {
                    name: format!("{name}c"),
                    src: format!("{src}.1"),
                    dsts: vec![format!("{t}.1")],
                    clock,
                });
                Statement::Copy {
                    name,
                    src: format!("{src}.0"),
                    dsts: vec![format!("{t}.0")],
                    clock,
                }
            }
            _ => {
                body.push(Statement::Copy {
                    name: format!("{name}c"),
                    src: format!("{src}.1"),
                    dsts: vec![format!("{t}.1")],
                    clock,
                });
                Statement::Merge {
                    name,
                    srcs: vec![format!("{src}.0"), format!("{other}.0")],
                    dst: format!("{t}.0"),
                    clock,
                }
            }
        };
        body.push(s);
    }
    for v in 0..rng.random_range(0..3) {
        let ports: Vec<String> = inputs.iter().chain(&outputs).cloned().collect();
        let len = rng.random_range(1..5);
        let mut values = Vec::new();
        for p in ports {
            if rng.random_bool(0.7) {
                values.push((p, (0..len).map(|_| rng.random_bool(0.5)).collect()));
            }
        }
        if !values.is_empty() {
            body.push(Statement::Vector {
                name: format!("v{v}"),
                values,
            });
        }
    }

    let mut head = Vec::new();
    if body.iter().any(Statement::is_sequential) || rng.random_bool(0.3) {
        head.push(Statement::Clock(ClockProgram::new(
            rng.random_range(0.0..0.3),
            rng.random_range(0.01..0.6),
            rng.random_range(0.0..0.3),
            rng.random_range(0.01..0.6),
        )));
    }
    if rng.random_bool(0.5) {
        head.push(Statement::Geometry(GeometryDecl {
            side_length: rng.random_range(0.1..3.0),
            stiffness: rng.random_range(0.1..10.0),
            rest_length: rng.random_range(0.1..3.0),
            theta_on: rng.random_range(0.1..1.5),
        }));
    }
    head.extend(body);
    head
}

proptest! {
    #[test]
    fn random_documents_round_trip(seed in any::<u64>()) {
        let statements = random_document(seed);
        let doc = Document::from_statements(statements.clone()).unwrap();
        prop_assert_eq!(&doc.statements, &statements);
        let text = serialize(&doc);
        let again = parse(&text).unwrap();
        prop_assert_eq!(&again, &doc);
        prop_assert_eq!(serialize(&again), text);
    }
}

#[test]
fn comments_and_spacing_do_not_change_the_document() {
    let plain = parse("dualrail A in\ndualrail X out\ngate not n a=A x=X clock=0\n").unwrap();
    let noisy = parse("# inverter\n\n  dualrail   A in   # the input\ndualrail X out\n\ngate not n clock=0 a=A x=X\n").unwrap();
    assert_eq!(noisy, plain);
    assert_ne!(noisy.lines(), plain.lines());
    assert_eq!(serialize(&noisy), serialize(&plain));
}
