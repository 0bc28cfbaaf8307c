//! Text formats for problems (`.plan.txt`) and dialog specs (`.dlg.txt`).
//!
//! Both formats are line oriented with `#` comments. A problem file:
//!
//! ```text
//! problem two_op
//! var x { 0 1 }
//! init x=0
//! horizon 3
//! objective netbenefit            # or: discounted 1/2 | mincost [goal x=1]
//! op a { pre: x=0 ; eff: x=1 ; cost: 1 ; utility: 3 }
//! op b { pre: x=1 ; eff: x=0 ; cost: 1 ; utility: 1 }
//! ```
//!
//! A dialog spec:
//!
//! ```text
//! dialog water
//! turns 4
//! discount 9/10                   # optional
//! slot location { prompt: "Where?" ; answers: cityA cityB ; default: cityA ; cost: 1 }
//! query waterdata { requires: location ; cost: 2 ; utility: 0 }
//! advisory advise { requires: waterdata ; message: "Fine in {location}." ; cost: 0 ; utility: 10 }
//! ```
//!
//! Inside braces, newlines are insignificant. Every failure is reported as a
//! single [`SourceError`] with a 1-based line and column.

use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::dialog::{template_placeholders, Advisory, DialogSpec, Query, Slot, UNKNOWN};
use crate::model::{is_identifier, Objective, Operator, PartialState, Problem, State, ValueId, VariableDef};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    Lex,
    Syntax,
    Semantic,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorKind::Lex => "lex",
            ErrorKind::Syntax => "syntax",
            ErrorKind::Semantic => "semantic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub kind: ErrorKind,
}

impl fmt::Display for SourceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {} error: {}", self.line, self.column, self.kind, self.message)
    }
}

impl std::error::Error for SourceError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Str(String),
    Sym(char),
    Newline,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::Str(_) => f.write_str("string"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::Newline => f.write_str("end of line"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn err(pos: Pos, kind: ErrorKind, message: impl Into<String>) -> SourceError {
    SourceError { line: pos.line, column: pos.column, message: message.into(), kind }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, SourceError> {
    let mut toks = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        match c {
            '\n' => {
                chars.next();
                toks.push((Tok::Newline, pos));
                line += 1;
                column = 1;
            }
            ' ' | '\t' | '\r' => {
                chars.next();
                column += 1;
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    column += 1;
                }
            }
            '{' | '}' | '=' | ',' | ';' | ':' | '/' | '-' => {
                chars.next();
                column += 1;
                toks.push((Tok::Sym(c), pos));
            }
            '"' => {
                chars.next();
                column += 1;
                let mut s = String::new();
                loop {
                    let here = Pos { line, column };
                    match chars.next() {
                        None | Some('\n') => return Err(err(pos, ErrorKind::Lex, "unterminated string")),
                        Some('"') => {
                            column += 1;
                            break;
                        }
                        Some('\\') => {
                            column += 1;
                            let esc = match chars.next() {
                                Some('n') => '\n',
                                Some('t') => '\t',
                                Some('"') => '"',
                                Some('\\') => '\\',
                                _ => return Err(err(here, ErrorKind::Lex, "invalid escape sequence")),
                            };
                            column += 1;
                            s.push(esc);
                        }
                        Some(c) => {
                            column += 1;
                            s.push(c);
                        }
                    }
                }
                toks.push((Tok::Str(s), pos));
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut w = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                        w.push(c);
                        chars.next();
                        column += 1;
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Word(w), pos));
            }
            other => {
                return Err(err(pos, ErrorKind::Lex, format!("unexpected character {other:?}")));
            }
        }
    }
    toks.push((Tok::Eof, Pos { line, column }));
    Ok(toks)
}

#[derive(Debug, Clone)]
struct Name {
    text: String,
    pos: Pos,
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    /// Inside braces newlines are skipped.
    depth: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self, SourceError> {
        Ok(Parser { toks: lex(text)?, at: 0, depth: 0 })
    }

    fn skip_insignificant(&mut self) {
        if self.depth > 0 {
            while self.toks[self.at].0 == Tok::Newline {
                self.at += 1;
            }
        }
    }

    fn peek(&mut self) -> &Tok {
        self.skip_insignificant();
        &self.toks[self.at].0
    }

    fn pos(&mut self) -> Pos {
        self.skip_insignificant();
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        self.skip_insignificant();
        let t = self.toks[self.at].clone();
        if t.0 != Tok::Eof {
            self.at += 1;
        }
        t
    }

    fn unexpected<T>(&mut self, wanted: &str) -> Result<T, SourceError> {
        let (tok, pos) = self.bump();
        Err(err(pos, ErrorKind::Syntax, format!("expected {wanted}, found {tok}")))
    }

    fn skip_blank_lines(&mut self) {
        while self.toks[self.at].0 == Tok::Newline {
            self.at += 1;
        }
    }

    fn at_sym(&mut self, c: char) -> bool {
        *self.peek() == Tok::Sym(c)
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.at_sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<Pos, SourceError> {
        if self.at_sym(c) {
            Ok(self.bump().1)
        } else {
            self.unexpected(&format!("`{c}`"))
        }
    }

    fn open(&mut self) -> Result<(), SourceError> {
        self.expect_sym('{')?;
        self.depth += 1;
        Ok(())
    }

    fn close(&mut self) -> Result<(), SourceError> {
        if !self.at_sym('}') {
            return self.unexpected("`}`");
        }
        self.depth -= 1;
        self.bump();
        Ok(())
    }

    fn word(&mut self, wanted: &str) -> Result<Name, SourceError> {
        match self.peek().clone() {
            Tok::Word(w) => {
                let pos = self.bump().1;
                Ok(Name { text: w, pos })
            }
            _ => self.unexpected(wanted),
        }
    }

    fn ident(&mut self, wanted: &str) -> Result<Name, SourceError> {
        let name = self.word(wanted)?;
        if !is_identifier(&name.text) {
            return Err(err(name.pos, ErrorKind::Syntax, format!("`{}` is not a valid identifier", name.text)));
        }
        Ok(name)
    }

    fn string(&mut self) -> Result<String, SourceError> {
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.unexpected("a quoted string"),
        }
    }

    fn end_of_line(&mut self) -> Result<(), SourceError> {
        match self.peek() {
            Tok::Newline | Tok::Eof => {
                self.bump();
                Ok(())
            }
            _ => self.unexpected("end of line"),
        }
    }

    fn at_line_end(&mut self) -> bool {
        matches!(self.peek(), Tok::Newline | Tok::Eof)
    }

    /// `<digits>` or `<digits>/<digits>`; a leading `-` is rejected with
    /// `negative`.
    fn rational(&mut self, what: &str) -> Result<(Rational, Pos), SourceError> {
        let pos = self.pos();
        if self.at_sym('-') {
            return Err(err(pos, ErrorKind::Semantic, format!("{what} must not be negative")));
        }
        let numer = self.digits("a number")?;
        let denom = if self.eat_sym('/') {
            let dpos = self.pos();
            let d = self.digits("a denominator")?;
            if d.is_zero() {
                return Err(err(dpos, ErrorKind::Semantic, "denominator must be positive"));
            }
            d
        } else {
            BigInt::one()
        };
        Ok((Rational::new(numer, denom), pos))
    }

    fn digits(&mut self, wanted: &str) -> Result<BigInt, SourceError> {
        match self.peek().clone() {
            Tok::Word(w) if w.bytes().all(|b| b.is_ascii_digit()) => {
                self.bump();
                Ok(w.parse().expect("ascii digits"))
            }
            _ => self.unexpected(wanted),
        }
    }

    fn count(&mut self, what: &str) -> Result<(u64, Pos), SourceError> {
        let pos = self.pos();
        let n = self.digits(what)?;
        let n: u64 = n
            .try_into()
            .ok()
            .filter(|&n: &u64| n <= u32::MAX as u64)
            .ok_or_else(|| err(pos, ErrorKind::Semantic, format!("{what} is too large")))?;
        Ok((n, pos))
    }

    /// `<var>=<val>` pairs; `sep` separates them (`,` inside operators,
    /// optional commas elsewhere). `-` stands for the empty set when allowed.
    fn bindings(&mut self, commas_required: bool) -> Result<Vec<(Name, Name)>, SourceError> {
        let mut out = Vec::new();
        loop {
            let var = self.ident("a variable name")?;
            self.expect_sym('=')?;
            let val = self.word("a value")?;
            out.push((var, val));
            let comma = self.eat_sym(',');
            if commas_required {
                if !comma {
                    break;
                }
            } else if !comma && self.at_line_end() {
                break;
            }
        }
        Ok(out)
    }

    /// `key: value ; key: value ; ...` inside braces. `field` parses the
    /// value for a key and reports whether the key is known.
    fn fields(
        &mut self,
        required: &[&str],
        mut field: impl FnMut(&mut Self, &Name) -> Result<bool, SourceError>,
    ) -> Result<(), SourceError> {
        let open_pos = self.pos();
        self.open()?;
        let mut seen: HashSet<String> = HashSet::new();
        while !self.at_sym('}') {
            let key = self.ident("a field name")?;
            self.expect_sym(':')?;
            if !seen.insert(key.text.clone()) {
                return Err(err(key.pos, ErrorKind::Semantic, format!("field `{}` given twice", key.text)));
            }
            if !field(self, &key)? {
                return Err(err(key.pos, ErrorKind::Syntax, format!("unknown field `{}`", key.text)));
            }
            if !self.eat_sym(';') {
                break;
            }
        }
        self.close()?;
        if let Some(missing) = required.iter().find(|r| !seen.contains(**r)) {
            return Err(err(open_pos, ErrorKind::Semantic, format!("missing field `{missing}`")));
        }
        Ok(())
    }
}

struct RawVar {
    name: Name,
    values: Vec<Name>,
}

struct RawOp {
    name: Name,
    pre: Vec<(Name, Name)>,
    eff: Vec<(Name, Name)>,
    cost: Rational,
    utility: Rational,
}

enum RawObjective {
    NetBenefit,
    Discounted(Rational),
    MinCost(Option<Vec<(Name, Name)>>),
}

fn semantic(pos: Pos, message: impl Into<String>) -> SourceError {
    err(pos, ErrorKind::Semantic, message)
}

fn header(p: &mut Parser, keyword: &str) -> Result<(Name, Pos), SourceError> {
    p.skip_blank_lines();
    let pos = p.pos();
    match p.peek() {
        Tok::Word(w) if w == keyword => {
            p.bump();
        }
        _ => return p.unexpected(&format!("`{keyword} <name>`")),
    }
    let name = p.ident("a name")?;
    p.end_of_line()?;
    Ok((name, pos))
}

fn once<T>(slot: &mut Option<T>, value: T, pos: Pos, what: &str) -> Result<(), SourceError> {
    if slot.is_some() {
        return Err(semantic(pos, format!("duplicate `{what}` declaration")));
    }
    *slot = Some(value);
    Ok(())
}

/// Parses and validates a problem.
pub fn parse_problem(text: &str) -> Result<Problem<Rational>, SourceError> {
    let mut p = Parser::new(text)?;
    let (name, problem_pos) = header(&mut p, "problem")?;
    let mut vars: Vec<RawVar> = Vec::new();
    let mut ops: Vec<RawOp> = Vec::new();
    let mut init: Option<(Vec<(Name, Name)>, Pos)> = None;
    let mut horizon: Option<u64> = None;
    let mut objective: Option<RawObjective> = None;
    loop {
        p.skip_blank_lines();
        let kw = match p.peek().clone() {
            Tok::Eof => break,
            Tok::Word(_) => p.word("a declaration")?,
            _ => return p.unexpected("a declaration"),
        };
        match kw.text.as_str() {
            "var" => {
                let name = p.ident("a variable name")?;
                p.open()?;
                let mut values = Vec::new();
                while !p.at_sym('}') {
                    values.push(p.word("a value")?);
                }
                p.close()?;
                vars.push(RawVar { name, values });
            }
            "init" => {
                let b = if p.eat_sym('-') { Vec::new() } else { p.bindings(false)? };
                once(&mut init, (b, kw.pos), kw.pos, "init")?;
            }
            "horizon" => {
                let (k, pos) = p.count("horizon")?;
                if k == 0 {
                    return Err(semantic(pos, "horizon must be positive"));
                }
                once(&mut horizon, k, kw.pos, "horizon")?;
            }
            "objective" => {
                let which = p.word("netbenefit, discounted or mincost")?;
                let obj = match which.text.as_str() {
                    "netbenefit" => RawObjective::NetBenefit,
                    "discounted" => {
                        let pos = p.pos();
                        if p.at_sym('-') {
                            return Err(semantic(pos, "discount factor must lie in (0, 1]"));
                        }
                        let (g, pos) = p.rational("discount factor")?;
                        if g.is_zero() || g > Rational::one() {
                            return Err(semantic(pos, "discount factor must lie in (0, 1]"));
                        }
                        RawObjective::Discounted(g)
                    }
                    "mincost" => {
                        if p.at_line_end() {
                            RawObjective::MinCost(None)
                        } else {
                            let goal_kw = p.word("`goal`")?;
                            if goal_kw.text != "goal" {
                                return Err(err(goal_kw.pos, ErrorKind::Syntax, "expected `goal`"));
                            }
                            RawObjective::MinCost(Some(p.bindings(false)?))
                        }
                    }
                    other => {
                        return Err(err(which.pos, ErrorKind::Syntax, format!("unknown objective `{other}`")));
                    }
                };
                once(&mut objective, obj, kw.pos, "objective")?;
            }
            "op" => {
                let name = p.ident("an operator name")?;
                let mut pre = Vec::new();
                let mut eff = Vec::new();
                let mut cost = Rational::zero();
                let mut utility = Rational::zero();
                p.fields(&["pre", "eff", "cost", "utility"], |p, key| {
                    match key.text.as_str() {
                        "pre" | "eff" => {
                            let b = if p.eat_sym('-') { Vec::new() } else { p.bindings(true)? };
                            if key.text == "pre" {
                                pre = b;
                            } else {
                                eff = b;
                            }
                        }
                        "cost" => cost = p.rational("cost")?.0,
                        "utility" => utility = p.rational("utility")?.0,
                        _ => return Ok(false),
                    }
                    Ok(true)
                })?;
                ops.push(RawOp { name, pre, eff, cost, utility });
            }
            "problem" => return Err(semantic(kw.pos, "duplicate `problem` declaration")),
            other => return Err(err(kw.pos, ErrorKind::Syntax, format!("unknown declaration `{other}`"))),
        }
        p.end_of_line()?;
    }

    // resolution
    let mut variables = Vec::with_capacity(vars.len());
    let mut var_index: HashMap<&str, usize> = HashMap::new();
    for (i, v) in vars.iter().enumerate() {
        if var_index.insert(v.name.text.as_str(), i).is_some() {
            return Err(semantic(v.name.pos, format!("duplicate variable `{}`", v.name.text)));
        }
        if v.values.is_empty() {
            return Err(semantic(v.name.pos, format!("variable `{}` has an empty domain", v.name.text)));
        }
        let mut seen = HashSet::new();
        for val in &v.values {
            if !seen.insert(val.text.as_str()) {
                return Err(semantic(val.pos, format!("value `{}` listed twice in `{}`", val.text, v.name.text)));
            }
        }
        let def = VariableDef::new(v.name.text.clone(), v.values.iter().map(|n| n.text.clone()))
            .map_err(|e| semantic(v.name.pos, e.to_string()))?;
        variables.push(def);
    }
    let resolve = |pairs: &[(Name, Name)]| -> Result<PartialState, SourceError> {
        let mut out: Vec<(usize, ValueId)> = Vec::with_capacity(pairs.len());
        for (var, val) in pairs {
            let &idx = var_index
                .get(var.text.as_str())
                .ok_or_else(|| semantic(var.pos, format!("unknown variable `{}`", var.text)))?;
            let v = variables[idx].value_index(&val.text).ok_or_else(|| {
                semantic(val.pos, format!("value `{}` is not in the domain of `{}`", val.text, var.text))
            })?;
            if out.iter().any(|&(i, _)| i == idx) {
                return Err(semantic(var.pos, format!("variable `{}` is bound twice", var.text)));
            }
            out.push((idx, v));
        }
        Ok(PartialState::from_bindings(out).expect("duplicates rejected above"))
    };

    let mut operators = Vec::with_capacity(ops.len());
    let mut op_names = HashSet::new();
    for op in &ops {
        if !op_names.insert(op.name.text.as_str()) {
            return Err(semantic(op.name.pos, format!("duplicate operator `{}`", op.name.text)));
        }
        let o = Operator::new(
            op.name.text.clone(),
            resolve(&op.pre)?,
            resolve(&op.eff)?,
            op.cost.clone(),
            op.utility.clone(),
        )
        .map_err(|e| semantic(op.name.pos, e.to_string()))?;
        operators.push(o);
    }
    let (init_pairs, init_pos) = init.ok_or_else(|| semantic(problem_pos, "missing `init` declaration"))?;
    let partial = resolve(&init_pairs)?;
    if let Some((_, def)) = variables.iter().enumerate().find(|(i, _)| partial.get(*i).is_none()) {
        return Err(semantic(init_pos, format!("init does not bind variable `{}`", def.name())));
    }
    let s0 = State::new(partial.bindings().iter().map(|&(_, v)| v).collect());
    let horizon = horizon.ok_or_else(|| semantic(problem_pos, "missing `horizon` declaration"))?;
    let objective = match objective.ok_or_else(|| semantic(problem_pos, "missing `objective` declaration"))? {
        RawObjective::NetBenefit => Objective::NetBenefit,
        RawObjective::Discounted(gamma) => Objective::Discounted { gamma },
        RawObjective::MinCost(goal) => Objective::MinCost { goal: goal.as_deref().map(resolve).transpose()? },
    };
    Problem::new(name.text, variables, operators, s0, horizon as usize, objective)
        .map_err(|e| semantic(problem_pos, e.to_string()))
}

fn write_partial(out: &mut String, pr: &Problem<Rational>, p: &PartialState, sep: &str) {
    if p.is_empty() {
        out.push('-');
        return;
    }
    let parts: Vec<String> = p
        .bindings()
        .iter()
        .map(|&(var, val)| {
            let def = &pr.variables()[var];
            format!("{}={}", def.name(), def.value_name(val).expect("well-formed"))
        })
        .collect();
    out.push_str(&parts.join(sep));
}

/// Canonical text: variables, init, horizon, objective, then operators in
/// name order.
pub fn serialize_problem(pr: &Problem<Rational>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "problem {}", pr.name());
    for v in pr.variables() {
        let _ = writeln!(out, "var {} {{ {} }}", v.name(), v.domain().join(" "));
    }
    let init = pr
        .variables()
        .iter()
        .zip(pr.initial_state().values())
        .map(|(def, &val)| format!("{}={}", def.name(), def.value_name(val).expect("well-formed")))
        .collect::<Vec<_>>()
        .join(" ");
    let _ = writeln!(out, "init {}", if init.is_empty() { "-" } else { &init });
    let _ = writeln!(out, "horizon {}", pr.horizon());
    match pr.objective() {
        Objective::NetBenefit => out.push_str("objective netbenefit\n"),
        Objective::Discounted { gamma } => {
            let _ = writeln!(out, "objective discounted {gamma}");
        }
        Objective::MinCost { goal: None } => out.push_str("objective mincost\n"),
        Objective::MinCost { goal: Some(goal) } => {
            out.push_str("objective mincost goal ");
            write_partial(&mut out, pr, goal, " ");
            out.push('\n');
        }
    }
    for op in pr.operators() {
        let _ = write!(out, "op {} {{ pre: ", op.name());
        write_partial(&mut out, pr, op.pre(), ", ");
        out.push_str(" ; eff: ");
        write_partial(&mut out, pr, op.eff(), ", ");
        let _ = writeln!(out, " ; cost: {} ; utility: {} }}", op.cost(), op.utility());
    }
    out
}

struct RawSlot {
    name: Name,
    prompt: String,
    answers: Vec<Name>,
    default: Option<Name>,
    cost: Rational,
}

struct RawQuery {
    name: Name,
    requires: Vec<Name>,
    cost: Rational,
    utility: Rational,
}

struct RawAdvisory {
    name: Name,
    requires: Vec<Name>,
    message: String,
    message_pos: Pos,
    cost: Rational,
    utility: Rational,
}

fn name_list(p: &mut Parser, wanted: &str) -> Result<Vec<Name>, SourceError> {
    let mut out = vec![p.ident(wanted)?];
    while p.eat_sym(',') {
        out.push(p.ident(wanted)?);
    }
    Ok(out)
}

/// Parses and validates a dialog spec.
pub fn parse_dialog_spec(text: &str) -> Result<DialogSpec<Rational>, SourceError> {
    let mut p = Parser::new(text)?;
    let (name, dialog_pos) = header(&mut p, "dialog")?;
    let mut turns: Option<u64> = None;
    let mut discount: Option<Rational> = None;
    let mut slots: Vec<RawSlot> = Vec::new();
    let mut queries: Vec<RawQuery> = Vec::new();
    let mut advisories: Vec<RawAdvisory> = Vec::new();
    loop {
        p.skip_blank_lines();
        let kw = match p.peek().clone() {
            Tok::Eof => break,
            Tok::Word(_) => p.word("a declaration")?,
            _ => return p.unexpected("a declaration"),
        };
        match kw.text.as_str() {
            "turns" => {
                let (k, pos) = p.count("turns")?;
                if k == 0 {
                    return Err(semantic(pos, "turns must be positive"));
                }
                once(&mut turns, k, kw.pos, "turns")?;
            }
            "discount" => {
                let pos = p.pos();
                if p.at_sym('-') {
                    return Err(semantic(pos, "discount must lie in (0, 1]"));
                }
                let (g, pos) = p.rational("discount")?;
                if g.is_zero() || g > Rational::one() {
                    return Err(semantic(pos, "discount must lie in (0, 1]"));
                }
                once(&mut discount, g, kw.pos, "discount")?;
            }
            "slot" => {
                let name = p.ident("a slot name")?;
                let mut slot =
                    RawSlot { name, prompt: String::new(), answers: Vec::new(), default: None, cost: Rational::zero() };
                p.fields(&["prompt", "answers", "cost"], |p, key| {
                    match key.text.as_str() {
                        "prompt" => slot.prompt = p.string()?,
                        "answers" => {
                            slot.answers.push(p.word("an answer")?);
                            while matches!(p.peek(), Tok::Word(_)) {
                                slot.answers.push(p.word("an answer")?);
                            }
                        }
                        "default" => slot.default = Some(p.word("an answer")?),
                        "cost" => slot.cost = p.rational("cost")?.0,
                        _ => return Ok(false),
                    }
                    Ok(true)
                })?;
                slots.push(slot);
            }
            "query" => {
                let name = p.ident("a query name")?;
                let mut q = RawQuery { name, requires: Vec::new(), cost: Rational::zero(), utility: Rational::zero() };
                p.fields(&["requires", "cost", "utility"], |p, key| {
                    match key.text.as_str() {
                        "requires" => q.requires = name_list(p, "a slot name")?,
                        "cost" => q.cost = p.rational("cost")?.0,
                        "utility" => q.utility = p.rational("utility")?.0,
                        _ => return Ok(false),
                    }
                    Ok(true)
                })?;
                queries.push(q);
            }
            "advisory" => {
                let name = p.ident("an advisory name")?;
                let mut a = RawAdvisory {
                    name,
                    requires: Vec::new(),
                    message: String::new(),
                    message_pos: kw.pos,
                    cost: Rational::zero(),
                    utility: Rational::zero(),
                };
                p.fields(&["message", "cost", "utility"], |p, key| {
                    match key.text.as_str() {
                        "requires" => {
                            a.requires = if p.eat_sym('-') { Vec::new() } else { name_list(p, "a query name")? };
                        }
                        "message" => {
                            a.message_pos = p.pos();
                            a.message = p.string()?;
                        }
                        "cost" => a.cost = p.rational("cost")?.0,
                        "utility" => a.utility = p.rational("utility")?.0,
                        _ => return Ok(false),
                    }
                    Ok(true)
                })?;
                advisories.push(a);
            }
            "dialog" => return Err(semantic(kw.pos, "duplicate `dialog` declaration")),
            other => return Err(err(kw.pos, ErrorKind::Syntax, format!("unknown declaration `{other}`"))),
        }
        p.end_of_line()?;
    }

    let mut names: HashSet<&str> = HashSet::new();
    for n in
        slots.iter().map(|s| &s.name).chain(queries.iter().map(|q| &q.name)).chain(advisories.iter().map(|a| &a.name))
    {
        if !names.insert(n.text.as_str()) {
            return Err(semantic(n.pos, format!("duplicate name `{}`", n.text)));
        }
    }
    let mut out_slots = Vec::with_capacity(slots.len());
    for s in &slots {
        let mut seen = HashSet::new();
        for a in &s.answers {
            if a.text == UNKNOWN {
                return Err(semantic(a.pos, format!("`{UNKNOWN}` is reserved and cannot be an answer")));
            }
            if !seen.insert(a.text.as_str()) {
                return Err(semantic(a.pos, format!("answer `{}` listed twice", a.text)));
            }
        }
        let default = match &s.default {
            Some(d) if !seen.contains(d.text.as_str()) => {
                return Err(semantic(
                    d.pos,
                    format!("default `{}` is not one of the answers of `{}`", d.text, s.name.text),
                ));
            }
            Some(d) => d.text.clone(),
            None => s.answers[0].text.clone(),
        };
        out_slots.push(Slot {
            name: s.name.text.clone(),
            prompt: s.prompt.clone(),
            answers: s.answers.iter().map(|a| a.text.clone()).collect(),
            default_answer: default,
            ask_cost: s.cost.clone(),
        });
    }
    let slot_names: HashSet<&str> = slots.iter().map(|s| s.name.text.as_str()).collect();
    let query_names: HashSet<&str> = queries.iter().map(|q| q.name.text.as_str()).collect();
    let check_refs = |refs: &[Name], known: &HashSet<&str>, what: &str| -> Result<(), SourceError> {
        let mut seen = HashSet::new();
        for r in refs {
            if !known.contains(r.text.as_str()) {
                return Err(semantic(r.pos, format!("unknown {what} `{}`", r.text)));
            }
            if !seen.insert(r.text.as_str()) {
                return Err(semantic(r.pos, format!("{what} `{}` required twice", r.text)));
            }
        }
        Ok(())
    };
    let mut out_queries = Vec::with_capacity(queries.len());
    for q in &queries {
        check_refs(&q.requires, &slot_names, "slot")?;
        out_queries.push(Query {
            name: q.name.text.clone(),
            requires: q.requires.iter().map(|n| n.text.clone()).collect(),
            run_cost: q.cost.clone(),
            utility: q.utility.clone(),
        });
    }
    let mut out_advisories = Vec::with_capacity(advisories.len());
    for a in &advisories {
        check_refs(&a.requires, &query_names, "query")?;
        let holes = template_placeholders(&a.message)
            .ok_or_else(|| semantic(a.message_pos, "malformed `{slot}` placeholder"))?;
        if let Some(h) = holes.iter().find(|h| !slot_names.contains(*h)) {
            return Err(semantic(a.message_pos, format!("message refers to unknown slot `{h}`")));
        }
        out_advisories.push(Advisory {
            name: a.name.text.clone(),
            requires_queries: a.requires.iter().map(|n| n.text.clone()).collect(),
            message_template: a.message.clone(),
            cost: a.cost.clone(),
            utility: a.utility.clone(),
        });
    }
    let turns = turns.ok_or_else(|| semantic(dialog_pos, "missing `turns` declaration"))?;
    DialogSpec::new(name.text, out_slots, out_queries, out_advisories, turns as usize, discount)
        .map_err(|e| semantic(dialog_pos, e.to_string()))
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Canonical text for a dialog spec; elements keep their declaration order.
pub fn serialize_dialog_spec(ds: &DialogSpec<Rational>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "dialog {}", ds.name());
    let _ = writeln!(out, "turns {}", ds.max_turns());
    if let Some(d) = ds.discount() {
        let _ = writeln!(out, "discount {d}");
    }
    for s in ds.slots() {
        let _ = writeln!(
            out,
            "slot {} {{ prompt: {} ; answers: {} ; default: {} ; cost: {} }}",
            s.name,
            quote(&s.prompt),
            s.answers.join(" "),
            s.default_answer,
            s.ask_cost
        );
    }
    for q in ds.queries() {
        let _ = writeln!(
            out,
            "query {} {{ requires: {} ; cost: {} ; utility: {} }}",
            q.name,
            q.requires.join(", "),
            q.run_cost,
            q.utility
        );
    }
    for a in ds.advisories() {
        let requires = if a.requires_queries.is_empty() { "-".to_string() } else { a.requires_queries.join(", ") };
        let _ = writeln!(
            out,
            "advisory {} {{ requires: {} ; message: {} ; cost: {} ; utility: {} }}",
            a.name,
            requires,
            quote(&a.message_template),
            a.cost,
            a.utility
        );
    }
    out
}

/// Names of the dialog specs shipped with the library.
pub const BUILTIN_SPECS: &[&str] = &["water"];

/// Source text of a built-in dialog spec.
pub fn builtin_spec_text(name: &str) -> Option<&'static str> {
    match name {
        "water" => Some(include_str!("builtin/water.dlg.txt")),
        _ => None,
    }
}

/// A parsed built-in dialog spec.
pub fn builtin_spec(name: &str) -> Option<DialogSpec<Rational>> {
    builtin_spec_text(name).map(|text| parse_dialog_spec(text).expect("built-in specs parse"))
}
