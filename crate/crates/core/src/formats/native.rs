//! The native line-oriented text format.
//!
//! ```text
//! # comment
//! NET <name>                         net name, rest of the line
//! MODE strict|permissive
//! PLACE <name> [@<id>] <value>*      no values: the unit set {•}
//! TRANS <name> [@<id>] : <place>* -> <place>*
//! PAIR <value>* -> <value>*          adds a pair to the last TRANS
//! EMPTY                              the last TRANS has no pairs
//! ENTRY <place>
//! EXIT <place>
//! NEXT <n>                           next fresh node id
//! ```
//!
//! Values are integers, symbols or tuples such as `(A,3,PR)` without
//! spaces. Pair tuples follow the place order written on the `TRANS` line.
//! Blank lines and lines starting with `#` are ignored.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::color::{Atom, ColorSet, ColorValue, ColoredBuildError, ColoredNetBuilder, ColoredWorkflowNet, Mode};
use crate::net::NodeId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: {message}")]
    Semantic { line: usize, message: String },
    #[error(transparent)]
    Net(#[from] ColoredBuildError),
}

/// A whitespace-separated token with its 1-based column.
struct Token<'a> {
    column: usize,
    text: &'a str,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    let mut column = 0;
    let mut start_col = 0;
    for (byte, ch) in line.char_indices() {
        column += 1;
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token {
                    column: start_col,
                    text: &line[s..byte],
                });
            }
        } else if start.is_none() {
            start = Some(byte);
            start_col = column;
        }
    }
    if let Some(s) = start {
        out.push(Token {
            column: start_col,
            text: &line[s..],
        });
    }
    out
}

fn parse_value(text: &str) -> Option<ColorValue> {
    if let Some(inner) = text.strip_prefix('(') {
        let inner = inner.strip_suffix(')')?;
        let atoms: Vec<Atom> = inner.split(',').map(parse_atom).collect::<Option<_>>()?;
        return Some(ColorValue::Tuple(atoms));
    }
    Some(ColorValue::Atom(parse_atom(text)?))
}

fn parse_atom(text: &str) -> Option<Atom> {
    if text.is_empty() || text.contains(['(', ')', ',']) {
        return None;
    }
    Some(Atom::parse(text))
}

struct Parser {
    builder: ColoredNetBuilder,
    name: Option<String>,
    mode: Mode,
    ids: BTreeMap<String, NodeId>,
    places: BTreeMap<NodeId, ColorSet>,
    /// Current transition, its input and output places in written order.
    current: Option<(NodeId, Vec<NodeId>, Vec<NodeId>)>,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

impl Parser {
    fn place_ref(&self, line: usize, tok: &Token<'_>) -> Result<NodeId, FormatError> {
        match self.ids.get(tok.text) {
            Some(id) if self.places.contains_key(id) => Ok(*id),
            Some(_) => Err(syntax(line, tok.column, format!("{} is not a place", tok.text))),
            None => Err(syntax(line, tok.column, format!("unknown place {}", tok.text))),
        }
    }

    /// `<name> [@<id>]`, returning the explicit id and the index after it.
    fn name_and_id<'a>(
        line: usize,
        toks: &'a [Token<'a>],
        keyword: &Token<'_>,
    ) -> Result<(&'a str, Option<u32>, usize), FormatError> {
        let name = toks
            .get(1)
            .ok_or_else(|| syntax(line, keyword.column, format!("{} needs a name", keyword.text)))?;
        if let Some(tok) = toks.get(2) {
            if let Some(raw) = tok.text.strip_prefix('@') {
                let id = raw
                    .parse::<u32>()
                    .map_err(|_| syntax(line, tok.column, format!("bad node id {}", tok.text)))?;
                return Ok((name.text, Some(id), 3));
            }
        }
        Ok((name.text, None, 2))
    }

    fn declare(&mut self, line: usize, tok: &Token<'_>, id: NodeId) -> Result<(), FormatError> {
        if self.ids.insert(tok.text.to_string(), id).is_some() {
            return Err(syntax(line, tok.column, format!("duplicate name {}", tok.text)));
        }
        Ok(())
    }

    fn place(&mut self, line: usize, toks: &[Token<'_>]) -> Result<(), FormatError> {
        let (name, id, rest) = Self::name_and_id(line, toks, &toks[0])?;
        let mut values = Vec::new();
        for tok in &toks[rest..] {
            values.push(
                parse_value(tok.text)
                    .ok_or_else(|| syntax(line, tok.column, format!("bad value {}", tok.text)))?,
            );
        }
        let colors = if values.is_empty() {
            ColorSet::unit()
        } else {
            ColorSet::new(values).map_err(|e| FormatError::Semantic {
                line,
                message: format!("place {name}: {e}"),
            })?
        };
        let node = match id {
            Some(id) => self.builder.place_with_id(name, id, colors.clone()),
            None => self.builder.place(name, colors.clone()),
        };
        self.declare(line, &toks[1], node)?;
        self.places.insert(node, colors);
        Ok(())
    }

    fn transition(&mut self, line: usize, toks: &[Token<'_>]) -> Result<(), FormatError> {
        let (name, id, rest) = Self::name_and_id(line, toks, &toks[0])?;
        let colon = toks.get(rest).filter(|t| t.text == ":").ok_or_else(|| {
            let col = toks.get(rest).map_or(toks[toks.len() - 1].column, |t| t.column);
            syntax(line, col, "expected ':' after the transition name")
        })?;
        let body = &toks[rest + 1..];
        let arrow = body
            .iter()
            .position(|t| t.text == "->")
            .ok_or_else(|| syntax(line, colon.column, "expected '->' between input and output places"))?;
        let inputs = body[..arrow]
            .iter()
            .map(|t| self.place_ref(line, t))
            .collect::<Result<Vec<_>, _>>()?;
        let outputs = body[arrow + 1..]
            .iter()
            .map(|t| self.place_ref(line, t))
            .collect::<Result<Vec<_>, _>>()?;
        let node = match id {
            Some(id) => self.builder.transition_with_id(name, id, &inputs, &outputs),
            None => self.builder.transition(name, &inputs, &outputs),
        };
        self.declare(line, &toks[1], node)?;
        self.current = Some((node, inputs, outputs));
        Ok(())
    }

    fn pair(&mut self, line: usize, toks: &[Token<'_>]) -> Result<(), FormatError> {
        let Some((t, inputs, outputs)) = self.current.clone() else {
            return Err(syntax(line, toks[0].column, "PAIR before any TRANS"));
        };
        let body = &toks[1..];
        let arrow = body
            .iter()
            .position(|t| t.text == "->")
            .ok_or_else(|| syntax(line, toks[0].column, "expected '->' in PAIR"))?;
        let side = |toks: &[Token<'_>], places: &[NodeId]| -> Result<Vec<ColorValue>, FormatError> {
            if toks.len() != places.len() {
                let col = toks.first().map_or(toks.len(), |t| t.column);
                return Err(syntax(
                    line,
                    col.max(1),
                    format!("expected {} values, found {}", places.len(), toks.len()),
                ));
            }
            let mut out = Vec::new();
            for (tok, p) in toks.iter().zip(places) {
                let v = parse_value(tok.text)
                    .ok_or_else(|| syntax(line, tok.column, format!("bad value {}", tok.text)))?;
                if !self.places[p].contains(&v) {
                    let pname = self
                        .ids
                        .iter()
                        .find(|(_, id)| *id == p)
                        .map_or("?", |(n, _)| n.as_str());
                    return Err(FormatError::Semantic {
                        line,
                        message: format!("value {v} is not in the color set of {pname}"),
                    });
                }
                out.push(v);
            }
            Ok(out)
        };
        let u = side(&body[..arrow], &inputs)?;
        let v = side(&body[arrow + 1..], &outputs)?;
        self.builder.pair(t, (u, v));
        Ok(())
    }
}

/// Parses a native document. Workflow structure is not validated here; see
/// [`crate::net::validate`].
pub fn parse_native(text: &str) -> Result<ColoredWorkflowNet, FormatError> {
    let mut p = Parser {
        builder: ColoredNetBuilder::new("", Mode::Strict),
        name: None,
        mode: Mode::Strict,
        ids: BTreeMap::new(),
        places: BTreeMap::new(),
        current: None,
    };
    let mut next: Option<u32> = None;
    let mut entry = None;
    let mut exit = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let toks = tokenize(raw);
        let Some(head) = toks.first() else { continue };
        if head.text.starts_with('#') {
            continue;
        }
        match head.text {
            "NET" => {
                let rest = raw.trim_start().strip_prefix("NET").unwrap_or("").trim();
                p.name = Some(rest.to_string());
            }
            "MODE" => {
                let tok = toks.get(1).ok_or_else(|| syntax(line, head.column, "MODE needs a value"))?;
                p.mode = match tok.text {
                    "strict" => Mode::Strict,
                    "permissive" => Mode::Permissive,
                    other => return Err(syntax(line, tok.column, format!("unknown mode {other}"))),
                };
            }
            "PLACE" => p.place(line, &toks)?,
            "TRANS" => p.transition(line, &toks)?,
            "PAIR" => p.pair(line, &toks)?,
            "EMPTY" => {
                if p.current.is_none() {
                    return Err(syntax(line, head.column, "EMPTY before any TRANS"));
                }
            }
            "ENTRY" | "EXIT" => {
                let tok = toks
                    .get(1)
                    .ok_or_else(|| syntax(line, head.column, format!("{} needs a place", head.text)))?;
                let id = p.place_ref(line, tok)?;
                if head.text == "ENTRY" {
                    entry = Some(id);
                } else {
                    exit = Some(id);
                }
            }
            "NEXT" => {
                let tok = toks.get(1).ok_or_else(|| syntax(line, head.column, "NEXT needs a number"))?;
                next = Some(
                    tok.text
                        .parse()
                        .map_err(|_| syntax(line, tok.column, format!("bad number {}", tok.text)))?,
                );
            }
            other => return Err(syntax(line, head.column, format!("unknown keyword {other}"))),
        }
        if toks.len() > 1 && matches!(head.text, "MODE" | "ENTRY" | "EXIT" | "NEXT" | "EMPTY") {
            let extra = if head.text == "EMPTY" { 1 } else { 2 };
            if let Some(tok) = toks.get(extra) {
                return Err(syntax(line, tok.column, format!("unexpected {}", tok.text)));
            }
        }
    }
    let mut b = p.builder;
    b.set_name(p.name.as_deref().unwrap_or("net")).set_mode(p.mode);
    if let Some(e) = entry {
        b.entry(e);
    }
    if let Some(x) = exit {
        b.exit(x);
    }
    if let Some(n) = next {
        b.next_id(n);
    }
    Ok(b.build()?)
}

/// Serializes `cnet` so that [`parse_native`] gives back an equal net.
pub fn emit_native(cnet: &ColoredWorkflowNet) -> String {
    let net = cnet.net();
    let mut out = String::new();
    let _ = writeln!(out, "NET {}", cnet.name());
    let _ = writeln!(out, "MODE {}", cnet.mode());
    for p in net.places() {
        let _ = write!(out, "PLACE {} @{}", net.name(p), p.0);
        let colors = cnet.colors(p);
        if !colors.is_unit() {
            for v in colors.iter() {
                let _ = write!(out, " {v}");
            }
        }
        out.push('\n');
    }
    for t in net.transitions() {
        let lambda = cnet.transformer(t);
        let names = |ps: Vec<NodeId>| -> String {
            ps.iter().map(|p| format!(" {}", net.name(*p))).collect()
        };
        let _ = writeln!(
            out,
            "TRANS {} @{} :{} ->{}",
            net.name(t),
            t.0,
            names(lambda.input_places()),
            names(lambda.output_places())
        );
        if lambda.is_empty() {
            out.push_str("EMPTY\n");
        }
        for (u, v) in lambda.pairs() {
            let side = |xs: &Vec<ColorValue>| -> String { xs.iter().map(|x| format!(" {x}")).collect() };
            let _ = writeln!(out, "PAIR{} ->{}", side(u), side(v));
        }
    }
    let _ = writeln!(out, "ENTRY {}", net.name(net.entry()));
    let _ = writeln!(out, "EXIT {}", net.name(net.exit()));
    let _ = writeln!(out, "NEXT {}", net.next_id());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    #[test]
    fn round_trip_models() {
        for cnet in [
            models::small_loop(),
            models::small_loop_colored(),
            models::insurance(),
            models::insurance_err(),
            models::extended_insurance(),
        ] {
            let text = emit_native(&cnet);
            let back = parse_native(&text).unwrap();
            assert_eq!(back, cnet, "{}", cnet.name());
            assert_eq!(emit_native(&back), text);
        }
    }

    #[test]
    fn omitted_colors_default_to_unit() {
        let text = "NET tiny\nPLACE i\nPLACE o\nTRANS t : i -> o\nPAIR • -> •\nENTRY i\nEXIT o\n";
        let cnet = parse_native(text).unwrap();
        assert!(cnet.colors(cnet.net().entry()).is_unit());
        assert_eq!(cnet.name(), "tiny");
    }

    #[test]
    fn value_outside_color_set() {
        let text = "NET x\nPLACE i 1 2\nPLACE o 1 2\nTRANS t : i -> o\nPAIR 1 -> 3\n";
        match parse_native(text).unwrap_err() {
            FormatError::Semantic { line, message } => {
                assert_eq!(line, 5);
                assert!(message.contains("value 3"), "{message}");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn syntax_errors_carry_columns() {
        let err = parse_native("NET x\nPLACE i\nTRANS t i -> o\n").unwrap_err();
        assert_eq!(
            err,
            FormatError::Syntax {
                line: 3,
                column: 9,
                message: "expected ':' after the transition name".into()
            }
        );
        let err = parse_native("PLACE i\nBOGUS\n").unwrap_err();
        assert!(matches!(err, FormatError::Syntax { line: 2, column: 1, .. }));
    }

    #[test]
    fn strict_mode_names_uncovered_input() {
        let text = "NET x\nPLACE i 1 2\nPLACE o 1 2\nTRANS t : i -> o\nPAIR 1 -> 1\nENTRY i\nEXIT o\n";
        let err = parse_native(text).unwrap_err().to_string();
        assert!(err.contains("not left-total") && err.contains('2'), "{err}");
        let loose = text.replace("NET x\n", "NET x\nMODE permissive\n");
        assert!(parse_native(&loose).is_ok());
    }
}
