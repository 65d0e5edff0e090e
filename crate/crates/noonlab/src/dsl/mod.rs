//! Line-oriented circuit language.
//!
//! ```text
//! mode <label> [pol]
//! input <label> <n>
//! bs <m1> <m2> theta=<expr>
//! rot <spatial> theta=<expr>
//! pbs <in1> <in2> -> <out1> <out2>      # '-' marks a vacuum input or a discarded output
//! inject <label> <n>
//! detect <label> = <n>
//! ```
//!
//! `mode` and `input` lines before the first circuit step describe the input
//! state; `mode` lines after it add vacuum modes mid-circuit.

mod expr;
mod lexer;

use std::collections::HashMap;
use std::fmt;

use noonlab_core::{
    Circuit, DetectionPattern, ElementSpec, Error as CoreError, FockState, ModeDecl, ModeRegistry,
    Occupation, Step, Target,
};

pub use expr::{BinOp, Expr, Func};
use lexer::{tokenize, Tok, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    UnknownDirective,
    UndeclaredMode,
    DuplicateMode,
    Semantic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub kind: ErrorKind,
}

impl ParseError {
    fn new(kind: ErrorKind, line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
            kind,
        }
    }

    /// The offending source line with a caret under the error column.
    pub fn snippet(&self, source: &str) -> Option<String> {
        let text = source.lines().nth(self.line.checked_sub(1)?)?;
        Some(format!(
            "{text}\n{}^",
            " ".repeat(self.column.saturating_sub(1))
        ))
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

/// A value with its source position. Equality ignores the position.
#[derive(Debug, Clone)]
pub struct Located<T> {
    pub value: T,
    pub line: usize,
    pub column: usize,
}

impl<T: PartialEq> PartialEq for Located<T> {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl<T> Located<T> {
    fn new(value: T, line: usize, column: usize) -> Self {
        Located {
            value,
            line,
            column,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Op {
    Declare {
        label: String,
        polarized: bool,
    },
    Bs {
        first: String,
        second: String,
        theta: Expr,
    },
    Rot {
        spatial: String,
        theta: Expr,
    },
    Pbs {
        in1: String,
        in2: Option<String>,
        out1: Option<String>,
        out2: Option<String>,
    },
    Inject {
        label: String,
        photons: u32,
    },
    Detect {
        label: String,
        count: u32,
    },
}

impl Op {
    pub fn theta(&self) -> Option<&Expr> {
        match self {
            Op::Bs { theta, .. } | Op::Rot { theta, .. } => Some(theta),
            _ => None,
        }
    }

    pub fn lower(&self) -> Step {
        match self {
            Op::Declare { label, polarized } => Step::Declare(ModeDecl {
                label: label.clone(),
                polarized: *polarized,
            }),
            Op::Bs {
                first,
                second,
                theta,
            } => Step::Element(ElementSpec::beam_splitter(first, second, theta.eval())),
            Op::Rot { spatial, theta } => {
                Step::Element(ElementSpec::rotator(spatial, theta.eval()))
            }
            Op::Pbs {
                in1,
                in2,
                out1,
                out2,
            } => Step::Element(ElementSpec::pbs(
                in1,
                in2.as_deref(),
                out1.as_deref(),
                out2.as_deref(),
            )),
            Op::Inject { label, photons } => Step::Element(ElementSpec::inject(label, *photons)),
            Op::Detect { label, count } => Step::Detect(DetectionPattern::single(label, *count)),
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let port = |p: &Option<String>| p.as_deref().unwrap_or("-").to_string();
        match self {
            Op::Declare {
                label,
                polarized: true,
            } => write!(f, "mode {label} pol"),
            Op::Declare { label, .. } => write!(f, "mode {label}"),
            Op::Bs {
                first,
                second,
                theta,
            } => write!(f, "bs {first} {second} theta={theta}"),
            Op::Rot { spatial, theta } => write!(f, "rot {spatial} theta={theta}"),
            Op::Pbs {
                in1,
                in2,
                out1,
                out2,
            } => write!(
                f,
                "pbs {in1} {} -> {} {}",
                port(in2),
                port(out1),
                port(out2)
            ),
            Op::Inject { label, photons } => write!(f, "inject {label} {photons}"),
            Op::Detect { label, count } => write!(f, "detect {label} = {count}"),
        }
    }
}

/// A tunable angle: `bs1`, `bs2`, ... and `rot1`, ... in step order.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameter {
    pub name: String,
    pub step: usize,
    pub line: usize,
}

/// Validated circuit description.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CircuitIr {
    /// Modes present in the input state.
    pub modes: Vec<Located<ModeDecl>>,
    /// Photon numbers of the input basis state; unlisted modes are empty.
    pub input: Vec<Located<(String, u32)>>,
    pub steps: Vec<Located<Op>>,
}

impl CircuitIr {
    pub fn registry(&self) -> noonlab_core::Result<ModeRegistry> {
        let mut reg = ModeRegistry::new();
        for m in &self.modes {
            reg.push(&m.value)?;
        }
        Ok(reg)
    }

    pub fn input_state(&self) -> noonlab_core::Result<FockState> {
        let reg = self.registry()?;
        let mut counts = vec![0u32; reg.len()];
        for item in &self.input {
            let (label, n) = &item.value;
            counts[reg.concrete(label)?] = *n;
        }
        FockState::basis_state(reg, Occupation::new(counts))
    }

    pub fn circuit(&self) -> Circuit {
        Circuit {
            steps: self.steps.iter().map(|s| s.value.lower()).collect(),
        }
    }

    pub fn parameters(&self) -> Vec<Parameter> {
        let (mut bs, mut rot) = (0, 0);
        let mut out = Vec::new();
        for (step, s) in self.steps.iter().enumerate() {
            let name = match s.value {
                Op::Bs { .. } => {
                    bs += 1;
                    format!("bs{bs}")
                }
                Op::Rot { .. } => {
                    rot += 1;
                    format!("rot{rot}")
                }
                _ => continue,
            };
            out.push(Parameter {
                name,
                step,
                line: s.line,
            });
        }
        out
    }

    pub fn parameter(&self, name: &str) -> Option<Parameter> {
        self.parameters().into_iter().find(|p| p.name == name)
    }
}

impl fmt::Display for CircuitIr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.modes {
            let d = &m.value;
            writeln!(
                f,
                "{}",
                Op::Declare {
                    label: d.label.clone(),
                    polarized: d.polarized,
                }
            )?;
        }
        for i in &self.input {
            writeln!(f, "input {} {}", i.value.0, i.value.1)?;
        }
        for s in &self.steps {
            writeln!(f, "{}", s.value)?;
        }
        Ok(())
    }
}

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
    line: usize,
    end_column: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn column(&self) -> usize {
        self.toks
            .get(self.pos)
            .map_or(self.end_column, |t| t.column)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::new(ErrorKind::Syntax, self.line, self.column(), message)
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {}", t.describe())),
            None => self.error(format!("expected {wanted}, found end of line")),
        }
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let t = self.toks.get(self.pos);
        self.pos += 1;
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, wanted: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn word(&mut self, wanted: &str) -> Result<(String, usize), ParseError> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let col = self.column();
                self.pos += 1;
                Ok((w.clone(), col))
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    fn label(&mut self) -> Result<(String, usize), ParseError> {
        self.word("a mode label")
    }

    /// A label or `-`.
    fn port(&mut self) -> Result<(Option<String>, usize), ParseError> {
        let col = self.column();
        if self.eat(&Tok::Minus) {
            return Ok((None, col));
        }
        self.word("a mode label or '-'").map(|(w, c)| (Some(w), c))
    }

    fn count(&mut self) -> Result<u32, ParseError> {
        let col = self.column();
        let (w, _) = self.word("a photon count")?;
        w.parse::<u32>().map_err(|_| {
            ParseError::new(
                ErrorKind::Syntax,
                self.line,
                col,
                format!("expected a photon count, found '{w}'"),
            )
        })
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Word(w)) if w == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.unexpected(&format!("'{kw}'"))),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.error(format!("unexpected {} at end of statement", t.describe()))),
        }
    }

    fn theta(&mut self) -> Result<Expr, ParseError> {
        self.keyword("theta")?;
        self.expect(&Tok::Eq, "'='")?;
        self.expr()
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat(&Tok::Plus) {
                BinOp::Add
            } else if self.eat(&Tok::Minus) {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Expr::bin(op, lhs, self.term()?);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat(&Tok::Star) {
                BinOp::Mul
            } else if self.eat(&Tok::Slash) {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            lhs = Expr::bin(op, lhs, self.unary()?);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(&Tok::Minus) {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let col = self.column();
        match self.bump().map(|t| &t.tok) {
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(e)
            }
            Some(Tok::Word(w)) if w.starts_with(|c: char| c.is_ascii_digit() || c == '.') => {
                match w.parse::<f64>() {
                    Ok(x) if x.is_finite() => Ok(Expr::Num(x)),
                    _ => Err(ParseError::new(
                        ErrorKind::Syntax,
                        self.line,
                        col,
                        format!("invalid number '{w}'"),
                    )),
                }
            }
            Some(Tok::Word(w)) if w == "pi" => Ok(Expr::Pi),
            Some(Tok::Word(w)) => match Func::from_name(w) {
                Some(f) => {
                    self.expect(&Tok::LParen, "'('")?;
                    let e = self.expr()?;
                    self.expect(&Tok::RParen, "')'")?;
                    Ok(Expr::call(f, e))
                }
                None => Err(ParseError::new(
                    ErrorKind::Syntax,
                    self.line,
                    col,
                    format!("unknown name '{w}' in expression"),
                )),
            },
            _ => {
                self.pos -= 1;
                Err(self.unexpected("an expression"))
            }
        }
    }
}

/// One parsed line before validation.
struct Statement {
    kind: StatementKind,
    /// Labels mentioned on the line with their columns.
    labels: Vec<(String, usize)>,
    column: usize,
}

enum StatementKind {
    Mode(ModeDecl),
    Input(String, u32),
    Step(Op),
}

fn parse_line(
    toks: &[Token],
    line: usize,
    end_column: usize,
) -> Result<Option<Statement>, ParseError> {
    let Some(first) = toks.first() else {
        return Ok(None);
    };
    let mut c = Cursor {
        toks,
        pos: 1,
        line,
        end_column,
    };
    let directive = match &first.tok {
        Tok::Word(w) => w.as_str(),
        t => {
            return Err(ParseError::new(
                ErrorKind::Syntax,
                line,
                first.column,
                format!("expected a directive, found {}", t.describe()),
            ))
        }
    };
    let mut labels = Vec::new();
    let kind = match directive {
        "mode" => {
            let (label, col) = c.label()?;
            let polarized = match c.peek() {
                Some(Tok::Word(w)) if w == "pol" => {
                    c.pos += 1;
                    true
                }
                _ => false,
            };
            labels.push((label.clone(), col));
            StatementKind::Mode(ModeDecl { label, polarized })
        }
        "input" => {
            let (label, col) = c.label()?;
            let n = c.count()?;
            labels.push((label.clone(), col));
            StatementKind::Input(label, n)
        }
        "bs" => {
            let (first, c1) = c.label()?;
            let (second, c2) = c.label()?;
            let theta = c.theta()?;
            labels.push((first.clone(), c1));
            labels.push((second.clone(), c2));
            StatementKind::Step(Op::Bs {
                first,
                second,
                theta,
            })
        }
        "rot" => {
            let (spatial, col) = c.label()?;
            let theta = c.theta()?;
            labels.push((spatial.clone(), col));
            StatementKind::Step(Op::Rot { spatial, theta })
        }
        "pbs" => {
            let (in1, c1) = c.label()?;
            let (in2, c2) = c.port()?;
            c.expect(&Tok::Arrow, "'->'")?;
            let (out1, c3) = c.port()?;
            let (out2, c4) = c.port()?;
            labels.push((in1.clone(), c1));
            for (l, col) in [(&in2, c2), (&out1, c3), (&out2, c4)] {
                if let Some(l) = l {
                    labels.push((l.clone(), col));
                }
            }
            StatementKind::Step(Op::Pbs {
                in1,
                in2,
                out1,
                out2,
            })
        }
        "inject" => {
            let (label, col) = c.label()?;
            let photons = c.count()?;
            labels.push((label.clone(), col));
            StatementKind::Step(Op::Inject { label, photons })
        }
        "detect" => {
            let (label, col) = c.label()?;
            c.expect(&Tok::Eq, "'='")?;
            let count = c.count()?;
            labels.push((label.clone(), col));
            StatementKind::Step(Op::Detect { label, count })
        }
        other => {
            return Err(ParseError::new(
                ErrorKind::UnknownDirective,
                line,
                first.column,
                format!("unknown directive '{other}'"),
            ))
        }
    };
    c.finish()?;
    Ok(Some(Statement {
        kind,
        labels,
        column: first.column,
    }))
}

/// Tracks the live registry by running each step on the zero state.
struct Validator {
    ir: CircuitIr,
    registry: ModeRegistry,
    /// `Some` once the first circuit step has been seen.
    live: Option<FockState>,
    /// Labels that no longer exist, with the line that removed them.
    gone: HashMap<String, usize>,
}

impl Validator {
    fn error(&self, err: CoreError, line: usize, st: &Statement) -> ParseError {
        let column_of = |label: &str| {
            st.labels
                .iter()
                .find(|(l, _)| l == label)
                .map_or(st.column, |(_, c)| *c)
        };
        match err {
            CoreError::UnknownMode(label) => {
                let message = match self.gone.get(&label) {
                    Some(at) => format!("mode '{label}' no longer exists after line {at}"),
                    None => format!("undeclared mode '{label}'"),
                };
                ParseError::new(ErrorKind::UndeclaredMode, line, column_of(&label), message)
            }
            CoreError::DuplicateMode(label) => ParseError::new(
                ErrorKind::DuplicateMode,
                line,
                column_of(&label),
                format!("mode '{label}' is already declared"),
            ),
            CoreError::InvalidLabel(label) => ParseError::new(
                ErrorKind::Syntax,
                line,
                column_of(&label),
                format!("invalid mode label '{label}'"),
            ),
            other => ParseError::new(ErrorKind::Semantic, line, st.column, other.to_string()),
        }
    }

    fn statement(&mut self, st: Statement, line: usize) -> Result<(), ParseError> {
        let column = st.column;
        match &st.kind {
            StatementKind::Mode(decl) => match self.live.take() {
                None => {
                    self.registry
                        .push(decl)
                        .map_err(|e| self.error(e, line, &st))?;
                    self.ir.modes.push(Located::new(decl.clone(), line, column));
                }
                Some(state) => {
                    let state = match state.extend_vacuum(decl) {
                        Ok(s) => s,
                        Err(e) => {
                            self.live = Some(state);
                            return Err(self.error(e, line, &st));
                        }
                    };
                    self.live = Some(state);
                    self.gone.remove(&decl.label);
                    self.ir.steps.push(Located::new(
                        Op::Declare {
                            label: decl.label.clone(),
                            polarized: decl.polarized,
                        },
                        line,
                        column,
                    ));
                }
            },
            StatementKind::Input(label, n) => {
                if self.live.is_some() {
                    return Err(ParseError::new(
                        ErrorKind::Semantic,
                        line,
                        column,
                        "input must come before the first circuit step",
                    ));
                }
                match self.registry.resolve(label) {
                    Ok(Target::Spatial { .. }) => {
                        return Err(self.error(
                            CoreError::AmbiguousPolarization(label.clone()),
                            line,
                            &st,
                        ))
                    }
                    Ok(_) => {}
                    Err(e) => return Err(self.error(e, line, &st)),
                }
                if self.ir.input.iter().any(|i| &i.value.0 == label) {
                    return Err(ParseError::new(
                        ErrorKind::Semantic,
                        line,
                        column,
                        format!("input for '{label}' is given twice"),
                    ));
                }
                let cap = noonlab_core::state::DEFAULT_PHOTON_CAP;
                if *n > cap {
                    return Err(self.error(
                        CoreError::PhotonCapExceeded {
                            mode: label.clone(),
                            count: *n,
                            cap,
                        },
                        line,
                        &st,
                    ));
                }
                self.ir
                    .input
                    .push(Located::new((label.clone(), *n), line, column));
            }
            StatementKind::Step(op) => {
                let state = match self.live.take() {
                    Some(s) => s,
                    None => FockState::zero(self.registry.clone()),
                };
                let before = state.registry().clone();
                let result = self.symbolic(op, &state);
                self.live = Some(state);
                let after = result.map_err(|e| self.error(e, line, &st))?;
                for m in before.modes() {
                    if after.registry().index_of(m.label()).is_none() {
                        self.gone.insert(m.label().to_string(), line);
                        if let Some(s) = m.spatial() {
                            self.gone.insert(s.to_string(), line);
                        }
                    }
                }
                for m in after.registry().modes() {
                    self.gone.remove(m.label());
                    if let Some(s) = m.spatial() {
                        self.gone.remove(s);
                    }
                }
                self.live = Some(after);
                self.ir.steps.push(Located::new(op.clone(), line, column));
            }
        }
        Ok(())
    }

    fn symbolic(&self, op: &Op, state: &FockState) -> noonlab_core::Result<FockState> {
        if let Op::Inject { label, .. } = op {
            // injection must target a declared mode
            state.registry().resolve(label)?;
        }
        match op.lower() {
            Step::Declare(d) => state.extend_vacuum(&d),
            Step::Element(e) => e.apply(state, &Default::default()),
            Step::Detect(p) => noonlab_core::postselect(state, &p).map(|h| h.state),
        }
    }
}

/// Parses and validates `source`, returning the first error.
pub fn parse(source: &str) -> Result<CircuitIr, ParseError> {
    let mut v = Validator {
        ir: CircuitIr::default(),
        registry: ModeRegistry::new(),
        live: None,
        gone: HashMap::new(),
    };
    for (i, text) in source.lines().enumerate() {
        let line = i + 1;
        let toks = tokenize(text, line)?;
        if let Some(st) = parse_line(&toks, line, text.chars().count() + 1)? {
            v.statement(st, line)?;
        }
    }
    Ok(v.ir)
}

/// Parses a standalone angle expression such as `pi/4`.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(text, 1)?;
    let mut c = Cursor {
        toks: &toks,
        pos: 0,
        line: 1,
        end_column: text.chars().count() + 1,
    };
    let e = c.expr()?;
    c.finish()?;
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_heralding_circuit() {
        let ir = parse("mode a\nmode c\ninput a 1\ninject c 1\nbs a c theta=pi/4\ndetect c = 1")
            .unwrap();
        assert_eq!(ir.modes.len(), 2);
        assert_eq!(ir.steps.len(), 3);
        let c = ir.circuit();
        assert_eq!(
            c.steps
                .iter()
                .filter(|s| matches!(s, Step::Detect(_)))
                .count(),
            1
        );
        assert_eq!(ir.parameters()[0].name, "bs1");
    }

    #[test]
    fn undeclared_mode_is_positioned() {
        let err = parse("bs a c theta=pi/4").unwrap_err();
        assert_eq!(err.kind, ErrorKind::UndeclaredMode);
        assert_eq!((err.line, err.column), (1, 4));
        assert_eq!(err.to_string(), "line 1: undeclared mode 'a'");
    }

    #[test]
    fn unknown_directive() {
        let err = parse("mode a\n\nswap a b").unwrap_err();
        assert_eq!(err.kind, ErrorKind::UnknownDirective);
        assert_eq!((err.line, err.column), (3, 1));
    }

    #[test]
    fn duplicate_mode() {
        let err = parse("mode a\nmode a pol").unwrap_err();
        assert_eq!(err.kind, ErrorKind::DuplicateMode);
        assert_eq!((err.line, err.column), (2, 6));
    }

    #[test]
    fn detected_modes_cannot_be_reused() {
        let err = parse("mode a\nmode c\ndetect c = 0\nbs a c theta=1").unwrap_err();
        assert_eq!(err.kind, ErrorKind::UndeclaredMode);
        assert_eq!(err.message, "mode 'c' no longer exists after line 3");
        assert_eq!(err.column, 6);
    }

    #[test]
    fn input_rules() {
        let e = parse("mode a\nbs a a theta=0").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Semantic);
        let e = parse("mode a\nmode b\nbs a b theta=0\ninput a 1").unwrap_err();
        assert_eq!((e.kind, e.line), (ErrorKind::Semantic, 4));
        let e = parse("mode p pol\ninput p 1").unwrap_err();
        assert_eq!(e.kind, ErrorKind::Semantic);
        let e = parse("mode a\ninput a 1\ninput a 2").unwrap_err();
        assert_eq!(e.line, 3);
    }

    #[test]
    fn syntax_errors_point_at_tokens() {
        let e = parse("mode a\nmode b\nbs a b theta=pi/").unwrap_err();
        assert_eq!((e.kind, e.line, e.column), (ErrorKind::Syntax, 3, 17));
        let e = parse("mode a\nmode b\nbs a b angle=1").unwrap_err();
        assert_eq!(e.column, 8);
        let e = parse("mode a\ninject a x").unwrap_err();
        assert_eq!(e.column, 10);
        let e = parse("mode a extra").unwrap_err();
        assert_eq!(e.column, 8);
    }

    #[test]
    fn pretty_print_round_trips() {
        let src = "mode 1 pol # first\nmode 2 pol\ninput 1H 1\nbs 1 2 theta = -(pi)/4 + 0.1\n\
                   pbs 1 - -> 3 4\nmode s pol\ninject sV 1\nbs 4 s theta=acos(sqrt(1/3))\ndetect s = 1\n";
        let ir = parse(src).unwrap();
        let printed = ir.to_string();
        assert!(printed.contains("bs 1 2 theta=-pi/4+0.1"));
        assert_eq!(parse(&printed).unwrap(), ir);
    }

    #[test]
    fn mid_circuit_modes_become_steps() {
        let ir = parse("mode a\nmode b\nbs a b theta=0\nmode c\ninject c 1").unwrap();
        assert_eq!(ir.modes.len(), 2);
        assert!(matches!(ir.steps[1].value, Op::Declare { .. }));
        assert_eq!(ir.steps[1].line, 4);
    }

    #[test]
    fn standalone_expressions() {
        assert_eq!(
            parse_expr("pi/2").unwrap().eval(),
            std::f64::consts::FRAC_PI_2
        );
        assert!(parse_expr("pi/").is_err());
        assert!(parse_expr("inf").is_err());
    }
}
