//! Text formats: a small netlist language, cycle-tabular stimuli, grid
//! layouts, and trace export to CSV and VCD.
//!
//! Netlist grammar (one statement per line, `#` starts a comment,
//! keywords are case-insensitive):
//!
//! ```text
//! input A @0
//! fixed one +1
//! n1 = MV(A, one, q) @0
//! n2 = INV(n1) @1
//! n3 = BUF(n2) @2
//! output Q = n3
//! ```
//!
//! Signals may be referenced before their defining line, which is how
//! feedback loops are written.

use std::fmt::Write as _;

use indexmap::{IndexMap, IndexSet};
use thiserror::Error;

use crate::cell::{Cell, CellLayout, CellRole, Orientation};
use crate::netlist::{BuildError, GateKind, GateNetlist, NetlistBuilder, NodeId};
use crate::trace::{Stimuli, Trace};
use crate::types::{ClockZone, LogicLevel, Polarization};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown signal `{name}`")]
    UnknownSignal { line: usize, name: String },
    #[error("line {line}: `{name}` defined twice")]
    Redefined { line: usize, name: String },
    #[error(transparent)]
    Build(#[from] BuildError),
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, msg: msg.into() }
}

fn parse_zone(line: usize, tok: &str) -> Result<ClockZone, ParseError> {
    let digits = tok
        .strip_prefix('@')
        .ok_or_else(|| syntax(line, format!("expected zone annotation `@0..@3`, got `{tok}`")))?;
    let z: u8 = digits
        .parse()
        .map_err(|_| syntax(line, format!("bad zone `{tok}`")))?;
    ClockZone::new(z).map_err(|_| syntax(line, format!("zone `{tok}` out of range 0..=3")))
}

/// One statement of the netlist language, before name resolution.
enum Stmt {
    Input { name: String, zone: ClockZone },
    Fixed { name: String, pol: Polarization },
    Gate { name: String, op: GateOp, args: Vec<String>, zone: ClockZone },
    Output { name: String, src: String },
}

#[derive(Clone, Copy, PartialEq)]
enum GateOp {
    Mv,
    Inv,
    Buf,
}

fn parse_gate_rhs(line: usize, rhs: &str) -> Result<(GateOp, Vec<String>, ClockZone), ParseError> {
    // form: OP(a, b, c) @z
    let (call, zone_tok) = rhs
        .rsplit_once('@')
        .ok_or_else(|| syntax(line, "missing zone annotation"))?;
    let zone = parse_zone(line, &format!("@{}", zone_tok.trim()))?;
    let call = call.trim();
    let open = call
        .find('(')
        .ok_or_else(|| syntax(line, "expected `OP(args)`"))?;
    if !call.ends_with(')') {
        return Err(syntax(line, "missing `)`"));
    }
    let op = match call[..open].trim().to_ascii_uppercase().as_str() {
        "MV" => GateOp::Mv,
        "INV" => GateOp::Inv,
        "BUF" => GateOp::Buf,
        other => return Err(syntax(line, format!("unknown operation `{other}`"))),
    };
    let args: Vec<String> = call[open + 1..call.len() - 1]
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    let want = if op == GateOp::Mv { 3 } else { 1 };
    if args.len() != want {
        return Err(syntax(line, format!("expected {want} argument(s), got {}", args.len())));
    }
    Ok((op, args, zone))
}

/// Parses the netlist language into a validated-buildable netlist.
pub fn parse_netlist(text: &str) -> Result<GateNetlist, ParseError> {
    let mut stmts: Vec<(usize, Stmt)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let stripped = raw.split('#').next().unwrap().trim();
        if stripped.is_empty() {
            continue;
        }
        let lower = stripped.to_ascii_lowercase();
        let stmt = if let Some(rest) = lower
            .strip_prefix("input ")
            .map(|_| &stripped["input ".len()..])
        {
            let mut toks = rest.split_whitespace();
            let name = toks
                .next()
                .ok_or_else(|| syntax(line, "input needs a name"))?;
            let zone = parse_zone(line, toks.next().unwrap_or(""))?;
            if toks.next().is_some() {
                return Err(syntax(line, "trailing tokens after input declaration"));
            }
            Stmt::Input { name: name.into(), zone }
        } else if let Some(rest) = lower
            .strip_prefix("fixed ")
            .map(|_| &stripped["fixed ".len()..])
        {
            let mut toks = rest.split_whitespace();
            let name = toks
                .next()
                .ok_or_else(|| syntax(line, "fixed needs a name"))?;
            let pol = match toks.next() {
                Some("+1") => Polarization::PLUS_ONE,
                Some("-1") => Polarization::MINUS_ONE,
                other => {
                    return Err(syntax(
                        line,
                        format!("fixed polarization must be +1 or -1, got `{}`", other.unwrap_or("")),
                    ))
                }
            };
            Stmt::Fixed { name: name.into(), pol }
        } else if let Some(rest) = lower
            .strip_prefix("output ")
            .map(|_| &stripped["output ".len()..])
        {
            let (name, src) = rest
                .split_once('=')
                .ok_or_else(|| syntax(line, "output form is `output NAME = SIGNAL`"))?;
            Stmt::Output { name: name.trim().into(), src: src.trim().into() }
        } else if let Some((name, rhs)) = stripped.split_once('=') {
            let (op, args, zone) = parse_gate_rhs(line, rhs.trim())?;
            Stmt::Gate { name: name.trim().into(), op, args, zone }
        } else {
            return Err(syntax(line, format!("unrecognized statement `{stripped}`")));
        };
        stmts.push((line, stmt));
    }

    // first pass: create every named node (gates as reservations so that
    // feedback references resolve)
    let mut b = NetlistBuilder::new();
    let mut ids: IndexMap<String, NodeId> = IndexMap::new();
    for (line, stmt) in &stmts {
        let declared = match stmt {
            Stmt::Input { name, .. } | Stmt::Fixed { name, .. } | Stmt::Gate { name, .. } => {
                Some(name)
            }
            Stmt::Output { .. } => None,
        };
        if let Some(name) = declared {
            if ids.contains_key(name.as_str()) {
                return Err(ParseError::Redefined { line: *line, name: name.clone() });
            }
        }
        match stmt {
            Stmt::Input { name, zone } => {
                let id = b.input(name, *zone);
                ids.insert(name.clone(), id);
            }
            Stmt::Fixed { name, pol } => {
                let id = b.fixed(name, *pol);
                ids.insert(name.clone(), id);
            }
            Stmt::Gate { name, zone, .. } => {
                let id = b.reserve(name, *zone);
                ids.insert(name.clone(), id);
            }
            Stmt::Output { .. } => {}
        }
    }

    // second pass: resolve fan-ins and attach outputs
    let resolve = |line: usize, name: &str| -> Result<NodeId, ParseError> {
        ids.get(name)
            .copied()
            .ok_or_else(|| ParseError::UnknownSignal { line, name: name.to_string() })
    };
    for (line, stmt) in &stmts {
        match stmt {
            Stmt::Gate { name, op, args, .. } => {
                let id = ids[name.as_str()];
                let kind = match op {
                    GateOp::Mv => GateKind::Majority([
                        resolve(*line, &args[0])?,
                        resolve(*line, &args[1])?,
                        resolve(*line, &args[2])?,
                    ]),
                    GateOp::Inv => GateKind::Inverter(resolve(*line, &args[0])?),
                    GateOp::Buf => GateKind::Buffer(resolve(*line, &args[0])?),
                };
                b.define(id, kind);
            }
            Stmt::Output { name, src } => {
                b.output(name, resolve(*line, src)?);
            }
            _ => {}
        }
    }
    Ok(b.finish()?)
}

/// Renders a netlist back into the text language; `parse_netlist` of the
/// result reproduces the netlist.
pub fn render_netlist(net: &GateNetlist) -> String {
    let mut s = String::new();
    let name_of = |id: NodeId| net.node(id).name.as_str();
    for (_, node) in net.nodes() {
        let z = node.zone.index();
        match &node.kind {
            GateKind::Input => writeln!(s, "input {} @{z}", node.name).unwrap(),
            GateKind::Fixed(p) => {
                let sign = if p.value() > 0.0 { "+1" } else { "-1" };
                writeln!(s, "fixed {} {sign}", node.name).unwrap();
            }
            GateKind::Majority([a, b, c]) => writeln!(
                s,
                "{} = MV({}, {}, {}) @{z}",
                node.name,
                name_of(*a),
                name_of(*b),
                name_of(*c)
            )
            .unwrap(),
            GateKind::Inverter(a) => {
                writeln!(s, "{} = INV({}) @{z}", node.name, name_of(*a)).unwrap()
            }
            GateKind::Buffer(a) => {
                writeln!(s, "{} = BUF({}) @{z}", node.name, name_of(*a)).unwrap()
            }
            GateKind::Output(a) => {
                writeln!(s, "output {} = {}", node.name, name_of(*a)).unwrap()
            }
        }
    }
    s
}

/// Parses tabular stimuli: a whitespace-separated header of signal names,
/// then one row of 0/1 values per cycle.
pub fn parse_stimuli(text: &str) -> Result<Stimuli, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap().trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines
        .next()
        .ok_or_else(|| syntax(0, "empty stimuli file"))?;
    let names: Vec<&str> = header.split_whitespace().collect();
    let mut seen = IndexSet::new();
    for n in &names {
        if !seen.insert(*n) {
            return Err(ParseError::Redefined { line: hline, name: n.to_string() });
        }
    }
    let mut columns: Vec<Vec<bool>> = vec![Vec::new(); names.len()];
    for (line, row) in lines {
        let toks: Vec<&str> = row.split_whitespace().collect();
        if toks.len() != names.len() {
            return Err(syntax(
                line,
                format!("expected {} values, got {}", names.len(), toks.len()),
            ));
        }
        for (col, tok) in toks.iter().enumerate() {
            let bit = match *tok {
                "0" => false,
                "1" => true,
                other => return Err(syntax(line, format!("expected 0 or 1, got `{other}`"))),
            };
            columns[col].push(bit);
        }
    }
    let mut stim = Stimuli::new();
    for (name, bits) in names.iter().zip(columns) {
        stim.set(name, bits);
    }
    Ok(stim)
}

/// Parses a grid layout: one cell per line,
/// `x y standard|rotated normal|input:<name>|output:<name>|fixed zone [+1|-1]`.
pub fn parse_layout(text: &str) -> Result<CellLayout, ParseError> {
    let mut cells = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let stripped = raw.split('#').next().unwrap().trim();
        if stripped.is_empty() {
            continue;
        }
        let toks: Vec<&str> = stripped.split_whitespace().collect();
        if toks.len() < 5 {
            return Err(syntax(line, "cell form is `x y orientation role zone [polarization]`"));
        }
        let x: i32 = toks[0]
            .parse()
            .map_err(|_| syntax(line, format!("bad x `{}`", toks[0])))?;
        let y: i32 = toks[1]
            .parse()
            .map_err(|_| syntax(line, format!("bad y `{}`", toks[1])))?;
        let orientation = match toks[2].to_ascii_lowercase().as_str() {
            "standard" => Orientation::Standard,
            "rotated" => Orientation::Rotated,
            other => return Err(syntax(line, format!("unknown orientation `{other}`"))),
        };
        let role_tok = toks[3].to_ascii_lowercase();
        let zone = {
            let z: u8 = toks[4]
                .parse()
                .map_err(|_| syntax(line, format!("bad zone `{}`", toks[4])))?;
            ClockZone::new(z).map_err(|_| syntax(line, "zone out of range 0..=3"))?
        };
        let role = if role_tok == "normal" {
            CellRole::Normal
        } else if let Some(n) = role_tok.strip_prefix("input:") {
            CellRole::Input(n.to_string())
        } else if let Some(n) = role_tok.strip_prefix("output:") {
            CellRole::Output(n.to_string())
        } else if role_tok == "fixed" {
            let pol = match toks.get(5) {
                Some(&"+1") => Polarization::PLUS_ONE,
                Some(&"-1") => Polarization::MINUS_ONE,
                _ => return Err(syntax(line, "fixed cell needs a +1 or -1 polarization")),
            };
            CellRole::Fixed(pol)
        } else {
            return Err(syntax(line, format!("unknown role `{}`", toks[3])));
        };
        cells.push(Cell { x, y, zone, role, orientation });
    }
    Ok(CellLayout { cells })
}

/// Renders a layout in the grid format accepted by [`parse_layout`].
pub fn render_layout(layout: &CellLayout) -> String {
    let mut s = String::new();
    for c in &layout.cells {
        let orientation = match c.orientation {
            Orientation::Standard => "standard",
            Orientation::Rotated => "rotated",
        };
        let (role, suffix) = match &c.role {
            CellRole::Normal => ("normal".to_string(), String::new()),
            CellRole::Input(n) => (format!("input:{n}"), String::new()),
            CellRole::Output(n) => (format!("output:{n}"), String::new()),
            CellRole::Fixed(p) => (
                "fixed".to_string(),
                format!(" {}", if p.value() > 0.0 { "+1" } else { "-1" }),
            ),
        };
        writeln!(s, "{} {} {orientation} {role} {}{suffix}", c.x, c.y, c.zone.index()).unwrap();
    }
    s
}

/// CSV dump of a trace: `tick,<signal>,...` with `0`, `1`, or `x` cells.
pub fn trace_to_csv(trace: &Trace) -> String {
    let names: Vec<&str> = trace.names().collect();
    let mut s = String::from("tick");
    for n in &names {
        s.push(',');
        s.push_str(n);
    }
    s.push('\n');
    for tick in 0..trace.n_ticks() {
        write!(s, "{tick}").unwrap();
        for n in &names {
            write!(s, ",{}", trace.get(n).unwrap()[tick]).unwrap();
        }
        s.push('\n');
    }
    s
}

/// VCD dump of a trace, one timestep per tick, change-compressed.
pub fn trace_to_vcd(trace: &Trace, module: &str) -> String {
    let names: Vec<&str> = trace.names().collect();
    let mut s = String::new();
    s.push_str("$timescale 1ns $end\n");
    writeln!(s, "$scope module {module} $end").unwrap();
    let code = |i: usize| -> String {
        // printable short identifiers: ! " # ... per VCD convention
        let mut n = i;
        let mut out = String::new();
        loop {
            out.push((33 + (n % 94)) as u8 as char);
            n /= 94;
            if n == 0 {
                break;
            }
        }
        out
    };
    for (i, n) in names.iter().enumerate() {
        writeln!(s, "$var wire 1 {} {} $end", code(i), n).unwrap();
    }
    s.push_str("$upscope $end\n$enddefinitions $end\n");
    let ch = |l: LogicLevel| match l {
        LogicLevel::Zero => '0',
        LogicLevel::One => '1',
        LogicLevel::X => 'x',
    };
    let mut last: Vec<Option<LogicLevel>> = vec![None; names.len()];
    for tick in 0..trace.n_ticks() {
        let mut changes = String::new();
        for (i, n) in names.iter().enumerate() {
            let v = trace.get(n).unwrap()[tick];
            if last[i] != Some(v) {
                writeln!(changes, "{}{}", ch(v), code(i)).unwrap();
                last[i] = Some(v);
            }
        }
        if !changes.is_empty() {
            writeln!(s, "#{tick}").unwrap();
            s.push_str(&changes);
        }
    }
    writeln!(s, "#{}", trace.n_ticks()).unwrap();
    s
}
