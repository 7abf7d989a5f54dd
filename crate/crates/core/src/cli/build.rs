//! Elaboration of a parsed document into a lock/balance netlist.

use std::collections::BTreeMap;

use crate::gates::{build_gate, ElementKind, Netlist, NetlistError, RailId};
use crate::sequential::{buffer_cell, PHASES};

use super::document::{Document, Role, Statement};

fn bind(pairs: &[(&str, [RailId; 2])]) -> BTreeMap<String, [RailId; 2]> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

/// Builds the netlist described by `doc`.
///
/// Gates and cells become instances named after their statement. A chain
/// `r` of `n` cells becomes cells `r/c1`..`r/cn` joined by dual rails
/// `r/c1`..`r/c<n-1>`; cell `k` runs on phase `clock + k - 1`. A swap becomes
/// two copies `<name>.0` and `<name>.1` that cross the rails.
pub fn build_netlist(doc: &Document) -> Result<Netlist, NetlistError> {
    let mut net = Netlist::new("document");
    // clock rails first so that instances pick them up
    for s in &doc.statements {
        if let Statement::Rail { name, clock: Some(p) } = s {
            let r = net.add_rail(name.clone())?;
            net.add_clock(r, *p);
        }
    }
    for s in &doc.statements {
        match s {
            Statement::Clock(_) | Statement::Geometry(_) | Statement::Vector { .. } => {}
            Statement::Rail { name, clock } => {
                if clock.is_none() {
                    net.add_rail(name.clone())?;
                }
            }
            Statement::DualRail { name, role } => {
                let rails = net.add_dual_rail(name)?;
                match role {
                    Role::In => net.add_input(name.clone(), rails)?,
                    Role::Out => net.add_output(name.clone(), rails)?,
                    Role::Wire => {}
                }
            }
            Statement::Lock { name, halves, clock } => {
                let halves = [net.rail(&halves[0])?, net.rail(&halves[1])?];
                net.add_element(name.clone(), ElementKind::Lock { halves }, *clock, None);
            }
            Statement::Balance {
                name,
                input,
                sides,
                clock,
            } => {
                let kind = ElementKind::Balance {
                    input: net.rail(input)?,
                    sides: [net.rail(&sides[0])?, net.rail(&sides[1])?],
                };
                net.add_element(name.clone(), kind, *clock, None);
            }
            Statement::Copy { name, src, dsts, clock } => {
                let kind = ElementKind::Copy {
                    src: net.rail(src)?,
                    dsts: dsts.iter().map(|d| net.rail(d)).collect::<Result<_, _>>()?,
                };
                net.add_element(name.clone(), kind, *clock, None);
            }
            Statement::Merge { name, srcs, dst, clock } => {
                let kind = ElementKind::Merge {
                    srcs: srcs.iter().map(|s| net.rail(s)).collect::<Result<_, _>>()?,
                    dst: net.rail(dst)?,
                };
                net.add_element(name.clone(), kind, *clock, None);
            }
            Statement::Swap { name, src, dst, clock } => {
                let (s, d) = (net.dual_rail(src)?, net.dual_rail(dst)?);
                for v in 0..2 {
                    let kind = ElementKind::Copy {
                        src: s[1 - v],
                        dsts: vec![d[v]],
                    };
                    net.add_element(format!("{name}.{v}"), kind, *clock, None);
                }
            }
            Statement::Gate {
                kind,
                name,
                pins,
                clock,
            } => {
                let mut bindings = BTreeMap::new();
                for (pin, dual) in pins {
                    bindings.insert(pin.clone(), net.dual_rail(dual)?);
                }
                let cell = net.add_cell(name.clone())?;
                net.instantiate(&build_gate(*kind), name, &bindings, *clock, Some(cell))?;
            }
            Statement::Cell {
                name,
                input,
                output,
                clock,
            } => {
                let bindings = bind(&[("a", net.dual_rail(input)?), ("x", net.dual_rail(output)?)]);
                let cell = net.add_cell(name.clone())?;
                net.instantiate(&buffer_cell(), name, &bindings, *clock, Some(cell))?;
            }
            Statement::Chain {
                name,
                cells,
                input,
                output,
                clock,
            } => {
                let template = buffer_cell();
                let mut rails = net.dual_rail(input)?;
                for k in 1..=*cells {
                    let cell_name = format!("{name}/c{k}");
                    let out = if k == *cells {
                        net.dual_rail(output)?
                    } else {
                        net.add_dual_rail(&cell_name)?
                    };
                    let cell = net.add_cell(cell_name.clone())?;
                    let bindings = bind(&[("a", rails), ("x", out)]);
                    net.instantiate(&template, &cell_name, &bindings, (clock + k - 1) % PHASES, Some(cell))?;
                    rails = out;
                }
            }
        }
    }
    net.validate()?;
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::document::parse;
    use crate::gates::{truth_table, GateKind};

    #[test]
    fn nand_document_matches_library_gate() {
        let doc = parse("dualrail A in\ndualrail B in\ndualrail X out\ngate nand g1 a=A b=B x=X clock=0\n").unwrap();
        let net = build_netlist(&doc).unwrap();
        let t = truth_table(&net).unwrap();
        for (i, o) in &t.rows {
            assert_eq!(o, &GateKind::Nand.function(i));
        }
    }

    #[test]
    fn swap_inverts() {
        let doc = parse("dualrail A in\ndualrail B wire\ndualrail X out\ngate not n a=A x=B clock=0\n").unwrap();
        let mut statements = doc.statements.clone();
        statements.push(Statement::Swap {
            name: "s".into(),
            src: "B".into(),
            dst: "X".into(),
            clock: 0,
        });
        let doc = Document::from_statements(statements).unwrap();
        let net = build_netlist(&doc).unwrap();
        let t = truth_table(&net).unwrap();
        assert_eq!(t.rows, vec![(vec![false], vec![false]), (vec![true], vec![true])]);
    }

    #[test]
    fn chain_layout() {
        let doc = parse(
            "clock phases=4 rise=0.1 high=0.45 fall=0.1 low=0.35\ndualrail in in\ndualrail out out\n\
             chain r cells=4 in=in out=out\n",
        )
        .unwrap();
        let net = build_netlist(&doc).unwrap();
        assert_eq!(net.cells(), &["r/c1", "r/c2", "r/c3", "r/c4"]);
        assert_eq!(net.max_phase(), Some(3));
        assert!(net.rail("r/c3.1").is_ok());
    }
}
