//! Concrete syntax of `.tg` programs and `.sig` signature files.
//!
//! ```text
//! # comment
//! label F : 1
//! label add : [int, int] -> [int]
//! inputs 3                      # or: inputs [int, int]
//! let n0 = F(i0)
//! let q, r = divmod(i0, i1)     # labels with several outputs
//! outputs n0, i2                # optionally followed by `: [int, int]`
//! ```
//!
//! `i<N>` always denotes input `N`; every other identifier refers to the
//! most recent `let` binding it.

use std::collections::BTreeMap;
use std::fmt;

use termgraph::{EdgeType, Hypergraph, Label, NodeRef, TypeId};
use thiserror::Error;

/// 1-based source position.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
#[error("{pos}: {message}")]
pub struct ParseError {
    pub pos: Pos,
    pub message: String,
}

fn err<T>(pos: Pos, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { pos, message: message.into() })
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Sig {
    Arity(usize),
    Typed(EdgeType),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LabelDecl {
    pub name: String,
    pub sig: Sig,
    pub pos: Pos,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Operand {
    Input(usize),
    Name(String),
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Input(i) => write!(f, "i{i}"),
            Operand::Name(n) => f.write_str(n),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Located<T> {
    pub value: T,
    pub pos: Pos,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LetDecl {
    pub names: Vec<Located<String>>,
    pub label: Located<String>,
    pub args: Vec<Located<Operand>>,
    pub pos: Pos,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Inputs {
    Count(usize),
    Typed(Vec<TypeId>),
}

impl Inputs {
    pub fn arity(&self) -> usize {
        match self {
            Inputs::Count(n) => *n,
            Inputs::Typed(ts) => ts.len(),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Program {
    pub labels: Vec<LabelDecl>,
    pub inputs: Located<Inputs>,
    pub lets: Vec<LetDecl>,
    pub outputs: Vec<Located<Operand>>,
    pub output_types: Option<Located<Vec<TypeId>>>,
    pub outputs_pos: Pos,
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Ident(String),
    Num(usize),
    Colon,
    Comma,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Eq,
    Arrow,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "`{n}`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrack => f.write_str("`[`"),
            Tok::RBrack => f.write_str("`]`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Arrow => f.write_str("`->`"),
        }
    }
}

fn lex(line: usize, text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut k = 0;
    while k < chars.len() {
        let c = chars[k];
        let pos = Pos { line, col: k + 1 };
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            k += 1;
            continue;
        }
        let start = k;
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while k < chars.len() && (chars[k].is_ascii_alphanumeric() || chars[k] == '_' || chars[k] == '\'') {
                k += 1;
            }
            toks.push((Tok::Ident(chars[start..k].iter().collect()), pos));
            continue;
        } else if c.is_ascii_digit() {
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            let digits: String = chars[start..k].iter().collect();
            match digits.parse() {
                Ok(n) => toks.push((Tok::Num(n), pos)),
                Err(_) => return err(pos, format!("number `{digits}` is too large")),
            }
            continue;
        } else {
            match c {
                ':' => Tok::Colon,
                ',' => Tok::Comma,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                '=' => Tok::Eq,
                '-' if chars.get(k + 1) == Some(&'>') => {
                    k += 1;
                    Tok::Arrow
                }
                _ => return err(pos, format!("unexpected character `{c}`")),
            }
        };
        k += 1;
        toks.push((tok, pos));
    }
    Ok(toks)
}

struct Line {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    end: Pos,
}

impl Line {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn next(&mut self, what: &str) -> Result<(Tok, Pos), ParseError> {
        match self.toks.get(self.at) {
            Some(t) => {
                self.at += 1;
                Ok(t.clone())
            }
            None => err(self.end, format!("expected {what}, found end of line")),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Pos, ParseError> {
        let (found, pos) = self.next(&tok.to_string())?;
        if found == tok {
            Ok(pos)
        } else {
            err(pos, format!("expected {tok}, found {found}"))
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self, what: &str) -> Result<Located<String>, ParseError> {
        match self.next(what)? {
            (Tok::Ident(s), pos) => Ok(Located { value: s, pos }),
            (t, pos) => err(pos, format!("expected {what}, found {t}")),
        }
    }

    fn num(&mut self, what: &str) -> Result<usize, ParseError> {
        match self.next(what)? {
            (Tok::Num(n), _) => Ok(n),
            (t, pos) => err(pos, format!("expected {what}, found {t}")),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.toks.get(self.at) {
            None => Ok(()),
            Some((t, pos)) => err(*pos, format!("unexpected {t} at end of line")),
        }
    }

    /// `[T, ...]`
    fn types(&mut self) -> Result<Vec<TypeId>, ParseError> {
        self.expect(Tok::LBrack)?;
        let mut ts = Vec::new();
        if self.eat(&Tok::RBrack) {
            return Ok(ts);
        }
        loop {
            ts.push(TypeId::new(self.ident("a type name")?.value));
            if self.eat(&Tok::RBrack) {
                return Ok(ts);
            }
            self.expect(Tok::Comma)?;
        }
    }

    fn operand(&mut self) -> Result<Located<Operand>, ParseError> {
        let Located { value, pos } = self.ident("an argument")?;
        let value = match input_index(&value) {
            Some(i) => Operand::Input(i),
            None => Operand::Name(value),
        };
        Ok(Located { value, pos })
    }

    /// Comma-separated operands up to (not including) `stop` or end of line.
    fn operands(&mut self, stop: Option<&Tok>) -> Result<Vec<Located<Operand>>, ParseError> {
        let mut args = Vec::new();
        if self.peek().is_none() || self.peek() == stop {
            return Ok(args);
        }
        loop {
            args.push(self.operand()?);
            if !self.eat(&Tok::Comma) {
                return Ok(args);
            }
        }
    }
}

/// `i<N>` names input `N`.
fn input_index(ident: &str) -> Option<usize> {
    let digits = ident.strip_prefix('i')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

fn label_decl(line: &mut Line) -> Result<LabelDecl, ParseError> {
    let Located { value: name, pos } = line.ident("a label name")?;
    line.expect(Tok::Colon)?;
    let sig = if line.peek() == Some(&Tok::LBrack) {
        let ins = line.types()?;
        line.expect(Tok::Arrow)?;
        let outs = line.types()?;
        Sig::Typed(EdgeType::new(ins, outs))
    } else {
        Sig::Arity(line.num("an arity or a type list")?)
    };
    line.finish()?;
    Ok(LabelDecl { name, sig, pos })
}

fn lines(text: &str) -> impl Iterator<Item = Result<Line, ParseError>> + '_ {
    text.lines().enumerate().filter_map(|(k, raw)| {
        let line = k + 1;
        match lex(line, raw) {
            Ok(toks) if toks.is_empty() => None,
            Ok(toks) => Some(Ok(Line { toks, at: 0, end: Pos { line, col: raw.chars().count() + 1 } })),
            Err(e) => Some(Err(e)),
        }
    })
}

/// A signature file: `label` lines and comments only.
pub fn parse_signatures(text: &str) -> Result<Vec<LabelDecl>, ParseError> {
    let mut decls = Vec::new();
    for line in lines(text) {
        let mut line = line?;
        let kw = line.ident("`label`")?;
        if kw.value != "label" {
            return err(kw.pos, format!("expected `label`, found `{}`", kw.value));
        }
        decls.push(label_decl(&mut line)?);
    }
    Ok(decls)
}

pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut labels = Vec::new();
    let mut inputs = None;
    let mut lets = Vec::new();
    let mut outputs: Option<((Vec<Located<Operand>>, Option<Located<Vec<TypeId>>>), Pos)> = None;
    let mut last = Pos { line: 1, col: 1 };
    for line in lines(text) {
        let mut line = line?;
        last = Pos { line: line.end.line + 1, col: 1 };
        let kw = line.ident("a keyword")?;
        if let Some((_, pos)) = &outputs {
            return err(kw.pos, format!("`outputs` on line {} must be the last line", pos.line));
        }
        match kw.value.as_str() {
            "label" => labels.push(label_decl(&mut line)?),
            "inputs" => {
                if inputs.is_some() {
                    return err(kw.pos, "duplicate `inputs` line");
                }
                let value = if line.peek() == Some(&Tok::LBrack) {
                    Inputs::Typed(line.types()?)
                } else {
                    Inputs::Count(line.num("an input count or a type list")?)
                };
                line.finish()?;
                inputs = Some(Located { value, pos: kw.pos });
            }
            "let" => {
                if inputs.is_none() {
                    return err(kw.pos, "`let` before `inputs`");
                }
                let mut names = vec![line.ident("a name")?];
                while line.eat(&Tok::Comma) {
                    names.push(line.ident("a name")?);
                }
                for n in &names {
                    if input_index(&n.value).is_some() || is_keyword(&n.value) {
                        return err(n.pos, format!("`{}` is reserved and cannot be bound", n.value));
                    }
                }
                line.expect(Tok::Eq)?;
                let label = line.ident("a label")?;
                line.expect(Tok::LParen)?;
                let args = line.operands(Some(&Tok::RParen))?;
                line.expect(Tok::RParen)?;
                line.finish()?;
                lets.push(LetDecl { names, label, args, pos: kw.pos });
            }
            "outputs" => {
                if inputs.is_none() {
                    return err(kw.pos, "`outputs` before `inputs`");
                }
                let args = line.operands(Some(&Tok::Colon))?;
                let types = if line.peek() == Some(&Tok::Colon) {
                    let pos = line.expect(Tok::Colon)?;
                    Some(Located { value: line.types()?, pos })
                } else {
                    None
                };
                line.finish()?;
                outputs = Some(((args, types), kw.pos));
            }
            other => return err(kw.pos, format!("unknown keyword `{other}`")),
        }
    }
    let Some(inputs) = inputs else {
        return err(last, "missing `inputs` line");
    };
    let Some(((outputs, output_types), outputs_pos)) = outputs else {
        return err(last, "missing `outputs` line");
    };
    Ok(Program { labels, inputs, lets, outputs, output_types, outputs_pos })
}

fn is_keyword(s: &str) -> bool {
    matches!(s, "label" | "inputs" | "let" | "outputs")
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum PrintError {
    #[error("label `{name}` is used with arities {first} and {second}")]
    LabelClash { name: String, first: usize, second: usize },
    #[error("graph has a cycle or an inner node without exactly one producer")]
    NotPrintable,
}

/// Print a jungle as a program. Inner node `j` is named `n<j>`; lets appear
/// in an order where every name is bound before use.
pub fn print_jungle(g: &Hypergraph) -> Result<String, PrintError> {
    if !g.is_jungle() || !g.is_acyclic() {
        return Err(PrintError::NotPrintable);
    }
    let mut labels: BTreeMap<&str, &Label> = BTreeMap::new();
    for e in g.edges() {
        if let Some(prev) = labels.insert(e.label.name(), &e.label) {
            if prev.arity() != e.label.arity() {
                return Err(PrintError::LabelClash {
                    name: e.label.name().to_owned(),
                    first: prev.arity(),
                    second: e.label.arity(),
                });
            }
        }
    }
    let mut out = String::new();
    for label in labels.values() {
        out += &format!("label {} : {}\n", label.name(), label.arity());
    }
    out += &format!("inputs {}\n", g.input_arity());
    let name = |n: &NodeRef| n.to_string();
    for e in topological(g) {
        let edge = &g.edges()[e];
        let args: Vec<String> = edge.inputs.iter().map(name).collect();
        out += &format!("let n{} = {}({})\n", edge.out, edge.label.name(), args.join(", "));
    }
    let outs: Vec<String> = g.output().iter().map(name).collect();
    if outs.is_empty() {
        out += "outputs\n";
    } else {
        out += &format!("outputs {}\n", outs.join(", "));
    }
    Ok(out)
}

/// Edge indices, producers first, ties broken by index.
fn topological(g: &Hypergraph) -> Vec<usize> {
    let producers = g.producers();
    let mut done = vec![false; g.edges().len()];
    let mut order = Vec::new();
    fn visit(g: &Hypergraph, producers: &[Vec<usize>], done: &mut [bool], order: &mut Vec<usize>, e: usize) {
        if done[e] {
            return;
        }
        done[e] = true;
        for input in &g.edges()[e].inputs {
            if let NodeRef::Inner(j) = input {
                visit(g, producers, done, order, producers[*j][0]);
            }
        }
        order.push(e);
    }
    for e in 0..g.edges().len() {
        visit(g, &producers, &mut done, &mut order, e);
    }
    order
}
