//! The `.lnl` netlist format.
//!
//! One statement per line; `#` starts a comment that runs to the end of the
//! line. Names are `[A-Za-z_][A-Za-z0-9_]*`. A `dualrail X` declares the rails
//! `X.0` and `X.1`, which can then be used anywhere a rail is expected.
//!
//! ```text
//! clock phases=4 rise=<f> high=<f> fall=<f> low=<f>
//! geometry L=<f> k=<f> r=<f> theta_on=<f>
//! rail <name> [clock=<p>]
//! dualrail <name> in|out|wire
//! lock <name> <rail> <rail> [clock=<p>]
//! balance <name> in=<rail> s0=<rail> s1=<rail> clock=<p>
//! route copy <name> <rail> -> <rail>... [clock=<p>]
//! route merge <name> <rail>... -> <rail> [clock=<p>]
//! route swap <name> <dualrail> -> <dualrail> [clock=<p>]
//! gate <kind> <name> <pin>=<dualrail>... clock=<p>
//! cell <name> in=<dualrail> out=<dualrail> clock=<p>
//! chain <name> cells=<n> in=<dualrail> out=<dualrail> [clock=<p>]
//! vector <name> <port>=<bit>[,<bit>...]...
//! ```
//!
//! Key/value arguments may come in any order. `<p>` is a phase in `0..4`. A
//! rail with `clock=` is the clock of that phase. Everything must be declared
//! before it is used, and a document with clocked elements on a phase other
//! than 0 (or any `cell`/`chain`) needs exactly one `clock` line.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::gates::GateKind;
use crate::kinematics::LockGeometry;
use crate::sequential::{ClockProgram, PHASES};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    SyntaxError,
    UnknownName,
    DuplicateName,
    ForbiddenWiring,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParseErrorKind::SyntaxError => "SyntaxError",
            ParseErrorKind::UnknownName => "UnknownName",
            ParseErrorKind::DuplicateName => "DuplicateName",
            ParseErrorKind::ForbiddenWiring => "ForbiddenWiring",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    In,
    Out,
    Wire,
}

impl Role {
    fn keyword(self) -> &'static str {
        match self {
            Role::In => "in",
            Role::Out => "out",
            Role::Wire => "wire",
        }
    }
}

/// Lock geometry overrides; angles are not part of the declaration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryDecl {
    pub side_length: f64,
    pub stiffness: f64,
    pub rest_length: f64,
    pub theta_on: f64,
}

impl GeometryDecl {
    pub fn to_geometry(self) -> LockGeometry {
        LockGeometry {
            side_length: self.side_length,
            stiffness: self.stiffness,
            rest_length: self.rest_length,
            theta_on: self.theta_on,
            ..LockGeometry::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    Clock(ClockProgram),
    Geometry(GeometryDecl),
    Rail {
        name: String,
        clock: Option<usize>,
    },
    DualRail {
        name: String,
        role: Role,
    },
    Lock {
        name: String,
        halves: [String; 2],
        clock: usize,
    },
    Balance {
        name: String,
        input: String,
        sides: [String; 2],
        clock: usize,
    },
    Copy {
        name: String,
        src: String,
        dsts: Vec<String>,
        clock: usize,
    },
    Merge {
        name: String,
        srcs: Vec<String>,
        dst: String,
        clock: usize,
    },
    Swap {
        name: String,
        src: String,
        dst: String,
        clock: usize,
    },
    Gate {
        kind: GateKind,
        name: String,
        pins: Vec<(String, String)>,
        clock: usize,
    },
    Cell {
        name: String,
        input: String,
        output: String,
        clock: usize,
    },
    Chain {
        name: String,
        cells: usize,
        input: String,
        output: String,
        clock: usize,
    },
    Vector {
        name: String,
        values: Vec<(String, Vec<bool>)>,
    },
}

impl Statement {
    /// Whether this statement needs a four-phase clock to run.
    pub fn is_sequential(&self) -> bool {
        match self {
            Statement::Cell { .. } | Statement::Chain { .. } => true,
            Statement::Lock { clock, .. }
            | Statement::Balance { clock, .. }
            | Statement::Copy { clock, .. }
            | Statement::Merge { clock, .. }
            | Statement::Swap { clock, .. }
            | Statement::Gate { clock, .. } => *clock != 0,
            _ => false,
        }
    }
}

fn bits(values: &[bool]) -> String {
    values
        .iter()
        .map(|&b| if b { "1" } else { "0" })
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statement::Clock(c) => write!(
                f,
                "clock phases={PHASES} rise={} high={} fall={} low={}",
                c.rise, c.high, c.fall, c.low
            ),
            Statement::Geometry(g) => write!(
                f,
                "geometry L={} k={} r={} theta_on={}",
                g.side_length, g.stiffness, g.rest_length, g.theta_on
            ),
            Statement::Rail { name, clock } => {
                write!(f, "rail {name}")?;
                if let Some(p) = clock {
                    write!(f, " clock={p}")?;
                }
                Ok(())
            }
            Statement::DualRail { name, role } => write!(f, "dualrail {name} {}", role.keyword()),
            Statement::Lock { name, halves, clock } => {
                write!(f, "lock {name} {} {} clock={clock}", halves[0], halves[1])
            }
            Statement::Balance {
                name,
                input,
                sides,
                clock,
            } => write!(
                f,
                "balance {name} in={input} s0={} s1={} clock={clock}",
                sides[0], sides[1]
            ),
            Statement::Copy { name, src, dsts, clock } => {
                write!(f, "route copy {name} {src} -> {} clock={clock}", dsts.join(" "))
            }
            Statement::Merge { name, srcs, dst, clock } => {
                write!(f, "route merge {name} {} -> {dst} clock={clock}", srcs.join(" "))
            }
            Statement::Swap { name, src, dst, clock } => {
                write!(f, "route swap {name} {src} -> {dst} clock={clock}")
            }
            Statement::Gate {
                kind,
                name,
                pins,
                clock,
            } => {
                write!(f, "gate {kind} {name}")?;
                for (pin, rail) in pins {
                    write!(f, " {pin}={rail}")?;
                }
                write!(f, " clock={clock}")
            }
            Statement::Cell {
                name,
                input,
                output,
                clock,
            } => write!(f, "cell {name} in={input} out={output} clock={clock}"),
            Statement::Chain {
                name,
                cells,
                input,
                output,
                clock,
            } => write!(f, "chain {name} cells={cells} in={input} out={output} clock={clock}"),
            Statement::Vector { name, values } => {
                write!(f, "vector {name}")?;
                for (port, v) in values {
                    write!(f, " {port}={}", bits(v))?;
                }
                Ok(())
            }
        }
    }
}

/// A parsed netlist file. Equality compares statements only, not the lines
/// they came from.
#[derive(Debug, Clone, Default)]
pub struct Document {
    pub statements: Vec<Statement>,
    lines: Vec<usize>,
}

impl PartialEq for Document {
    fn eq(&self, other: &Self) -> bool {
        self.statements == other.statements
    }
}

impl Document {
    /// Builds a document from statements, checking them as the parser would.
    pub fn from_statements(statements: Vec<Statement>) -> Result<Self, ParseError> {
        parse(&serialize_statements(&statements))
    }

    /// Source line of each statement.
    pub fn lines(&self) -> &[usize] {
        &self.lines
    }

    pub fn clock(&self) -> Option<ClockProgram> {
        self.statements.iter().find_map(|s| match s {
            Statement::Clock(c) => Some(*c),
            _ => None,
        })
    }

    pub fn geometry(&self) -> LockGeometry {
        self.statements
            .iter()
            .find_map(|s| match s {
                Statement::Geometry(g) => Some(g.to_geometry()),
                _ => None,
            })
            .unwrap_or_default()
    }

    pub fn is_sequential(&self) -> bool {
        self.statements.iter().any(Statement::is_sequential)
    }

    pub fn vectors(&self) -> Vec<(&str, &[(String, Vec<bool>)])> {
        self.statements
            .iter()
            .filter_map(|s| match s {
                Statement::Vector { name, values } => Some((name.as_str(), values.as_slice())),
                _ => None,
            })
            .collect()
    }

    pub fn serialize(&self) -> String {
        serialize_statements(&self.statements)
    }
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

fn serialize_statements(statements: &[Statement]) -> String {
    let mut out = String::new();
    for s in statements {
        out.push_str(&s.to_string());
        out.push('\n');
    }
    out
}

pub fn serialize(doc: &Document) -> String {
    doc.serialize()
}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let code = line.split('#').next().unwrap_or("");
    let mut tokens = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (col, (byte, ch)) in code.char_indices().enumerate() {
        if ch.is_whitespace() {
            if let Some((b, c)) = start.take() {
                tokens.push(Token {
                    text: &code[b..byte],
                    column: c + 1,
                });
            }
        } else if start.is_none() {
            start = Some((byte, col));
        }
    }
    if let Some((b, c)) = start {
        tokens.push(Token {
            text: &code[b..],
            column: c + 1,
        });
    }
    tokens
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, Copy)]
struct RailInfo {
    clock: bool,
    input_port: bool,
}

#[derive(Default)]
struct Scope {
    rails: HashMap<String, RailInfo>,
    duals: HashMap<String, Role>,
    names: HashSet<String>,
    driven: HashSet<String>,
    clock_line: Option<usize>,
    sequential_line: Option<usize>,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
    /// Column just past the last token, for errors about missing arguments.
    end: usize,
}

impl<'a> Line<'a> {
    fn err(&self, kind: ParseErrorKind, column: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            kind,
            line: self.number,
            column,
            message: message.into(),
        }
    }

    fn syntax(&self, column: usize, message: impl Into<String>) -> ParseError {
        self.err(ParseErrorKind::SyntaxError, column, message)
    }

    fn token(&self, i: usize, what: &str) -> Result<Token<'a>, ParseError> {
        self.tokens
            .get(i)
            .copied()
            .ok_or_else(|| self.syntax(self.end, format!("expected {what}")))
    }

    fn ident(&self, i: usize, what: &str) -> Result<Token<'a>, ParseError> {
        let t = self.token(i, what)?;
        if is_ident(t.text) {
            Ok(t)
        } else {
            Err(self.syntax(t.column, format!("expected {what}, found `{}`", t.text)))
        }
    }

    /// Parses `key=value` tokens from `from` on. Every key in `required` must
    /// appear; keys in `optional` may.
    fn keys(
        &self,
        from: usize,
        required: &[&str],
        optional: &[&str],
    ) -> Result<HashMap<&'a str, Token<'a>>, ParseError> {
        let mut found = HashMap::new();
        for t in &self.tokens[from.min(self.tokens.len())..] {
            let Some((k, v)) = t.text.split_once('=') else {
                return Err(self.syntax(t.column, format!("expected key=value, found `{}`", t.text)));
            };
            if !required.contains(&k) && !optional.contains(&k) {
                return Err(self.syntax(t.column, format!("unexpected key `{k}`")));
            }
            let value = Token {
                text: v,
                column: t.column + k.chars().count() + 1,
            };
            if found.insert(k, value).is_some() {
                return Err(self.syntax(t.column, format!("key `{k}` given twice")));
            }
        }
        for k in required {
            if !found.contains_key(k) {
                return Err(self.syntax(self.end, format!("missing `{k}=`")));
            }
        }
        Ok(found)
    }

    fn float(&self, t: Token<'_>) -> Result<f64, ParseError> {
        t.text
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| self.syntax(t.column, format!("expected a finite number, found `{}`", t.text)))
    }

    fn phase(&self, t: Token<'_>) -> Result<usize, ParseError> {
        match t.text.parse::<usize>() {
            Ok(p) if p < PHASES => Ok(p),
            _ => Err(self.syntax(t.column, format!("expected a phase in 0..{PHASES}, found `{}`", t.text))),
        }
    }

    fn count(&self, t: Token<'_>) -> Result<usize, ParseError> {
        match t.text.parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(self.syntax(t.column, format!("expected a positive count, found `{}`", t.text))),
        }
    }
}

impl Scope {
    fn declare_name(&mut self, line: &Line<'_>, t: Token<'_>) -> Result<String, ParseError> {
        if !is_ident(t.text) {
            return Err(line.syntax(t.column, format!("expected a name, found `{}`", t.text)));
        }
        if !self.names.insert(t.text.to_string()) {
            return Err(line.err(
                ParseErrorKind::DuplicateName,
                t.column,
                format!("`{}` is already declared", t.text),
            ));
        }
        Ok(t.text.to_string())
    }

    fn declare_rail(&mut self, line: &Line<'_>, t: Token<'_>, info: RailInfo) -> Result<(), ParseError> {
        if self.rails.contains_key(t.text) || self.duals.contains_key(t.text) {
            return Err(line.err(
                ParseErrorKind::DuplicateName,
                t.column,
                format!("rail `{}` is already declared", t.text),
            ));
        }
        self.rails.insert(t.text.to_string(), info);
        Ok(())
    }

    fn rail(&self, line: &Line<'_>, t: Token<'_>) -> Result<String, ParseError> {
        if self.rails.contains_key(t.text) {
            Ok(t.text.to_string())
        } else {
            Err(line.err(
                ParseErrorKind::UnknownName,
                t.column,
                format!("rail `{}` is not declared", t.text),
            ))
        }
    }

    fn dual(&self, line: &Line<'_>, t: Token<'_>) -> Result<String, ParseError> {
        if self.duals.contains_key(t.text) {
            Ok(t.text.to_string())
        } else {
            Err(line.err(
                ParseErrorKind::UnknownName,
                t.column,
                format!("dual rail `{}` is not declared", t.text),
            ))
        }
    }

    fn drive(&mut self, line: &Line<'_>, t: Token<'_>, rail: &str) -> Result<(), ParseError> {
        let info = self.rails[rail];
        let reason = if info.clock {
            Some("is a clock rail")
        } else if info.input_port {
            Some("belongs to an input port")
        } else if !self.driven.insert(rail.to_string()) {
            Some("already has a driver")
        } else {
            None
        };
        match reason {
            Some(r) => Err(line.err(
                ParseErrorKind::ForbiddenWiring,
                t.column,
                format!("rail `{rail}` {r}"),
            )),
            None => Ok(()),
        }
    }

    fn drive_dual(&mut self, line: &Line<'_>, t: Token<'_>, dual: &str) -> Result<(), ParseError> {
        for v in 0..2 {
            self.drive(line, t, &format!("{dual}.{v}"))?;
        }
        Ok(())
    }
}

/// Splits `a b -> c d` into the names before and after the arrow.
fn arrow<'a>(line: &Line<'a>, from: usize) -> Result<(Vec<Token<'a>>, Vec<Token<'a>>, Option<Token<'a>>), ParseError> {
    let rest = &line.tokens[from.min(line.tokens.len())..];
    let Some(at) = rest.iter().position(|t| t.text == "->") else {
        return Err(line.syntax(line.end, "expected `->`"));
    };
    let mut after: Vec<Token<'a>> = rest[at + 1..].to_vec();
    let clock = match after.last() {
        Some(t) if t.text.contains('=') => after.pop(),
        _ => None,
    };
    Ok((rest[..at].to_vec(), after, clock))
}

fn route_clock(line: &Line<'_>, clock: Option<Token<'_>>) -> Result<usize, ParseError> {
    match clock {
        None => Ok(0),
        Some(t) => match t.text.split_once('=') {
            Some(("clock", v)) => line.phase(Token {
                text: v,
                column: t.column + 6,
            }),
            _ => Err(line.syntax(t.column, format!("unexpected `{}`", t.text))),
        },
    }
}

fn parse_statement(scope: &mut Scope, line: &Line<'_>) -> Result<Statement, ParseError> {
    let head = line.tokens[0];
    let stmt = match head.text {
        "clock" => {
            if let Some(first) = scope.clock_line {
                return Err(line.err(
                    ParseErrorKind::DuplicateName,
                    head.column,
                    format!("clock already declared on line {first}"),
                ));
            }
            scope.clock_line = Some(line.number);
            let k = line.keys(1, &["phases", "rise", "high", "fall", "low"], &[])?;
            if k["phases"].text != PHASES.to_string() {
                return Err(line.syntax(k["phases"].column, format!("only {PHASES}-phase clocks are supported")));
            }
            Statement::Clock(ClockProgram::new(
                line.float(k["rise"])?,
                line.float(k["high"])?,
                line.float(k["fall"])?,
                line.float(k["low"])?,
            ))
        }
        "geometry" => {
            let k = line.keys(1, &["L", "k", "r", "theta_on"], &[])?;
            Statement::Geometry(GeometryDecl {
                side_length: line.float(k["L"])?,
                stiffness: line.float(k["k"])?,
                rest_length: line.float(k["r"])?,
                theta_on: line.float(k["theta_on"])?,
            })
        }
        "rail" => {
            let t = line.ident(1, "a rail name")?;
            let k = line.keys(2, &[], &["clock"])?;
            let clock = k.get("clock").map(|&t| line.phase(t)).transpose()?;
            scope.declare_rail(
                line,
                t,
                RailInfo {
                    clock: clock.is_some(),
                    input_port: false,
                },
            )?;
            Statement::Rail {
                name: t.text.to_string(),
                clock,
            }
        }
        "dualrail" => {
            let t = line.ident(1, "a dual rail name")?;
            let r = line.token(2, "in, out or wire")?;
            let role = match r.text {
                "in" => Role::In,
                "out" => Role::Out,
                "wire" => Role::Wire,
                other => return Err(line.syntax(r.column, format!("expected in, out or wire, found `{other}`"))),
            };
            if let Some(extra) = line.tokens.get(3) {
                return Err(line.syntax(extra.column, format!("unexpected `{}`", extra.text)));
            }
            if scope.duals.contains_key(t.text) || scope.rails.contains_key(t.text) {
                return Err(line.err(
                    ParseErrorKind::DuplicateName,
                    t.column,
                    format!("rail `{}` is already declared", t.text),
                ));
            }
            let info = RailInfo {
                clock: false,
                input_port: role == Role::In,
            };
            for v in 0..2 {
                scope.rails.insert(format!("{}.{v}", t.text), info);
            }
            scope.duals.insert(t.text.to_string(), role);
            Statement::DualRail {
                name: t.text.to_string(),
                role,
            }
        }
        "lock" => {
            let name = scope.declare_name(line, line.token(1, "a lock name")?)?;
            let a = line.token(2, "a rail")?;
            let b = line.token(3, "a rail")?;
            let halves = [scope.rail(line, a)?, scope.rail(line, b)?];
            if halves[0] == halves[1] {
                return Err(line.err(ParseErrorKind::ForbiddenWiring, b.column, "a lock needs two distinct rails"));
            }
            let k = line.keys(4, &[], &["clock"])?;
            let clock = k.get("clock").map(|&t| line.phase(t)).transpose()?.unwrap_or(0);
            Statement::Lock { name, halves, clock }
        }
        "balance" => {
            let name = scope.declare_name(line, line.token(1, "a balance name")?)?;
            let k = line.keys(2, &["in", "s0", "s1", "clock"], &[])?;
            let input = scope.rail(line, k["in"])?;
            let sides = [scope.rail(line, k["s0"])?, scope.rail(line, k["s1"])?];
            if sides[0] == sides[1] || sides.contains(&input) {
                return Err(line.err(
                    ParseErrorKind::ForbiddenWiring,
                    k["s1"].column,
                    "a balance needs three distinct rails",
                ));
            }
            scope.drive(line, k["s0"], &sides[0])?;
            scope.drive(line, k["s1"], &sides[1])?;
            Statement::Balance {
                name,
                input,
                sides,
                clock: line.phase(k["clock"])?,
            }
        }
        "route" => {
            let kind = line.token(1, "copy, merge or swap")?;
            let name = scope.declare_name(line, line.token(2, "a route name")?)?;
            let (before, after, clock) = arrow(line, 3)?;
            let clock = route_clock(line, clock)?;
            match kind.text {
                "copy" => {
                    let [src] = before.as_slice() else {
                        return Err(line.syntax(kind.column, "a copy has exactly one source"));
                    };
                    if after.is_empty() {
                        return Err(line.syntax(line.end, "a copy needs at least one destination"));
                    }
                    let src = scope.rail(line, *src)?;
                    let mut dsts = Vec::new();
                    for t in &after {
                        let d = scope.rail(line, *t)?;
                        scope.drive(line, *t, &d)?;
                        dsts.push(d);
                    }
                    Statement::Copy { name, src, dsts, clock }
                }
                "merge" => {
                    let [dst] = after.as_slice() else {
                        return Err(line.syntax(kind.column, "a merge has exactly one destination"));
                    };
                    if before.is_empty() {
                        return Err(line.syntax(kind.column, "a merge needs at least one source"));
                    }
                    let srcs = before
                        .iter()
                        .map(|t| scope.rail(line, *t))
                        .collect::<Result<Vec<_>, _>>()?;
                    let d = scope.rail(line, *dst)?;
                    scope.drive(line, *dst, &d)?;
                    Statement::Merge {
                        name,
                        srcs,
                        dst: d,
                        clock,
                    }
                }
                "swap" => {
                    let ([src], [dst]) = (before.as_slice(), after.as_slice()) else {
                        return Err(line.syntax(kind.column, "a swap joins one dual rail to another"));
                    };
                    let s = scope.dual(line, *src)?;
                    let d = scope.dual(line, *dst)?;
                    scope.drive_dual(line, *dst, &d)?;
                    Statement::Swap {
                        name,
                        src: s,
                        dst: d,
                        clock,
                    }
                }
                other => return Err(line.syntax(kind.column, format!("expected copy, merge or swap, found `{other}`"))),
            }
        }
        "gate" => {
            let k = line.token(1, "a gate kind")?;
            let kind: GateKind = k.text.parse().map_err(|e: String| line.syntax(k.column, e))?;
            let name = scope.declare_name(line, line.token(2, "a gate name")?)?;
            let mut pins = Vec::new();
            let mut clock = None;
            let mut seen = BTreeSet::new();
            for t in &line.tokens[3..] {
                let Some((pin, value)) = t.text.split_once('=') else {
                    return Err(line.syntax(t.column, format!("expected pin=dualrail, found `{}`", t.text)));
                };
                let vt = Token {
                    text: value,
                    column: t.column + pin.chars().count() + 1,
                };
                if pin == "clock" {
                    if clock.replace(line.phase(vt)?).is_some() {
                        return Err(line.syntax(t.column, "key `clock` given twice"));
                    }
                    continue;
                }
                let is_input = kind.input_names().contains(&pin);
                if !is_input && !kind.output_names().contains(&pin) {
                    return Err(line.syntax(t.column, format!("gate {kind} has no pin `{pin}`")));
                }
                if !seen.insert(pin) {
                    return Err(line.syntax(t.column, format!("pin `{pin}` bound twice")));
                }
                let dual = scope.dual(line, vt)?;
                if !is_input {
                    scope.drive_dual(line, vt, &dual)?;
                }
                pins.push((pin.to_string(), dual));
            }
            for pin in kind.input_names().iter().chain(kind.output_names()) {
                if !seen.contains(pin) {
                    return Err(line.syntax(line.end, format!("gate {kind} needs pin `{pin}`")));
                }
            }
            let clock = clock.ok_or_else(|| line.syntax(line.end, "missing `clock=`"))?;
            Statement::Gate {
                kind,
                name,
                pins,
                clock,
            }
        }
        "cell" | "chain" => {
            let name = scope.declare_name(line, line.token(1, "a name")?)?;
            let is_chain = head.text == "chain";
            let k = if is_chain {
                line.keys(2, &["cells", "in", "out"], &["clock"])?
            } else {
                line.keys(2, &["in", "out", "clock"], &[])?
            };
            let input = scope.dual(line, k["in"])?;
            let output = scope.dual(line, k["out"])?;
            if input == output {
                return Err(line.err(ParseErrorKind::ForbiddenWiring, k["out"].column, "input and output must differ"));
            }
            scope.drive_dual(line, k["out"], &output)?;
            let clock = k.get("clock").map(|&t| line.phase(t)).transpose()?.unwrap_or(0);
            if is_chain {
                Statement::Chain {
                    name,
                    cells: line.count(k["cells"])?,
                    input,
                    output,
                    clock,
                }
            } else {
                Statement::Cell {
                    name,
                    input,
                    output,
                    clock,
                }
            }
        }
        "vector" => {
            let name = scope.declare_name(line, line.token(1, "a vector name")?)?;
            let mut values: Vec<(String, Vec<bool>)> = Vec::new();
            for t in &line.tokens[2..] {
                let Some((port, list)) = t.text.split_once('=') else {
                    return Err(line.syntax(t.column, format!("expected port=bits, found `{}`", t.text)));
                };
                let pt = Token { text: port, column: t.column };
                let port = scope.dual(line, pt)?;
                if scope.duals[&port] == Role::Wire {
                    return Err(line.err(
                        ParseErrorKind::UnknownName,
                        t.column,
                        format!("`{port}` is not a port"),
                    ));
                }
                if values.iter().any(|(p, _)| *p == port) {
                    return Err(line.syntax(t.column, format!("port `{port}` given twice")));
                }
                let bits = list
                    .split(',')
                    .map(|b| match b {
                        "0" => Ok(false),
                        "1" => Ok(true),
                        _ => Err(line.syntax(t.column, format!("expected bits 0 or 1, found `{list}`"))),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                values.push((port, bits));
            }
            if values.is_empty() {
                return Err(line.syntax(line.end, "a vector needs at least one port"));
            }
            Statement::Vector { name, values }
        }
        other => return Err(line.syntax(head.column, format!("unknown statement `{other}`"))),
    };
    if stmt.is_sequential() && scope.sequential_line.is_none() {
        scope.sequential_line = Some(line.number);
    }
    Ok(stmt)
}

pub fn parse(text: &str) -> Result<Document, ParseError> {
    let mut scope = Scope::default();
    let mut doc = Document::default();
    for (i, raw) in text.lines().enumerate() {
        let tokens = tokenize(raw);
        if tokens.is_empty() {
            continue;
        }
        let last = tokens[tokens.len() - 1];
        let line = Line {
            number: i + 1,
            end: last.column + last.text.chars().count(),
            tokens,
        };
        let stmt = parse_statement(&mut scope, &line)?;
        doc.statements.push(stmt);
        doc.lines.push(line.number);
    }
    if let (Some(line), None) = (scope.sequential_line, scope.clock_line) {
        return Err(ParseError {
            kind: ParseErrorKind::SyntaxError,
            line,
            column: 1,
            message: "clocked elements need a `clock` declaration".into(),
        });
    }
    Ok(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err(text: &str) -> ParseError {
        parse(text).unwrap_err()
    }

    #[test]
    fn grammar_example() {
        let doc = parse("dualrail A in\ndualrail B in\ndualrail X out\ngate nand g1 a=A b=B x=X clock=0\n").unwrap();
        assert_eq!(doc.statements.len(), 4);
        match &doc.statements[3] {
            Statement::Gate { kind, name, clock, pins } => {
                assert_eq!(*kind, GateKind::Nand);
                assert_eq!(name, "g1");
                assert_eq!(*clock, 0);
                assert_eq!(pins.len(), 3);
            }
            s => panic!("unexpected {s:?}"),
        }
        assert!(!doc.is_sequential());
    }

    #[test]
    fn unknown_rail_has_location() {
        let e = err("dualrail A in\n  dualrail X out\ngate not n a=A x=Q clock=0\n");
        assert_eq!(e.kind, ParseErrorKind::UnknownName);
        assert_eq!((e.line, e.column), (3, 18));
        assert_eq!(e.to_string(), "3:18: UnknownName: dual rail `Q` is not declared");
    }

    #[test]
    fn double_driver_is_forbidden() {
        let e = err("dualrail A in\ndualrail X out\ngate not n a=A x=X clock=0\ngate not m a=A x=X clock=0\n");
        assert_eq!(e.kind, ParseErrorKind::ForbiddenWiring);
        assert_eq!(e.line, 4);
        let e = err("dualrail A in\nrail s\nroute copy c1 s -> A.0\n");
        assert_eq!(e.kind, ParseErrorKind::ForbiddenWiring);
    }

    #[test]
    fn duplicates_and_syntax() {
        assert_eq!(err("rail a\nrail a\n").kind, ParseErrorKind::DuplicateName);
        assert_eq!(err("dualrail a in\nrail a.0\n").kind, ParseErrorKind::SyntaxError);
        assert_eq!(err("frobnicate\n").kind, ParseErrorKind::SyntaxError);
        assert_eq!(err("clock phases=3 rise=.1 high=.4 fall=.1 low=.4\n").kind, ParseErrorKind::SyntaxError);
        let e = err("dualrail A in\ndualrail X out\ncell c in=A out=X clock=1\n");
        assert_eq!((e.kind, e.line), (ParseErrorKind::SyntaxError, 3));
        let two = "clock phases=4 rise=0.1 high=0.45 fall=0.1 low=0.35\n";
        assert_eq!(err(&format!("{two}{two}")).kind, ParseErrorKind::DuplicateName);
    }

    #[test]
    fn comments_and_round_trip() {
        let text = "# register\nclock phases=4 rise=0.1 high=0.45 fall=0.1 low=0.35 # default\n\
                    dualrail in in\ndualrail out out\nchain r cells=4 in=in out=out\n\
                    vector v in=1,0,1,1\ngeometry L=1 k=2 r=1 theta_on=0.7853981633974483\n";
        let doc = parse(text).unwrap();
        assert_eq!(doc.lines(), &[2, 3, 4, 5, 6, 7]);
        assert!(doc.is_sequential());
        let again = parse(&doc.serialize()).unwrap();
        assert_eq!(doc, again);
        assert_eq!(doc.serialize(), again.serialize());
        assert_eq!(doc.geometry().stiffness, 2.0);
    }

    #[test]
    fn routes() {
        let text = "rail a\nrail b\nrail c\nroute copy k a -> b c clock=2\nrail d\nroute merge m b c -> d\n\
                    dualrail P wire\ndualrail Q wire\nroute swap s P -> Q\n";
        let e = parse(text).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::SyntaxError);
        let doc = parse(&format!("clock phases=4 rise=0.1 high=0.45 fall=0.1 low=0.35\n{text}")).unwrap();
        assert_eq!(parse(&doc.serialize()).unwrap(), doc);
    }
}
