//! Expression language for elements of `C₀(ℝ) ⊕ CAP`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := '-' factor | number | 'i' | 'chi' '(' freq ')'
//!         | 'hat' '(' signed ',' signed ',' signed ')' | '(' expr ')'
//! freq   := signed ('*' symbol)? | '-'? symbol
//! number := decimal | integer '/' integer
//! ```
//!
//! Symbols are the built-in constants `pi`, `sqrt2`, `sqrt3`, `sqrt5`, `e`,
//! `phi` and any names registered in a [`SymbolTable`].

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::ap::APFunction;
use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, rational_gcd_all, Rational, Scalar};
use crate::fleischhack::{C0Function, ExtendedFunction};
use crate::frequency::{is_known_constant, FrequencyModule, Generator};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FreqLit {
    pub scale: Rational,
    /// `None` for rational frequencies.
    pub symbol: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rational),
    I,
    Chi(FreqLit),
    Hat(Rational, Rational, Rational),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

/// User-named generators, as name → decimal expansion.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SymbolTable {
    named: BTreeMap<String, String>,
}

const KEYWORDS: [&str; 3] = ["chi", "hat", "i"];

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn define(&mut self, name: &str, decimal: &str) -> Result<()> {
        let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid || KEYWORDS.contains(&name) || is_known_constant(name) {
            return Err(Error::InvalidGenerator(format!("cannot define symbol `{name}`")));
        }
        parse_rational(decimal)?;
        self.named.insert(name.to_string(), decimal.to_string());
        Ok(())
    }

    pub fn contains(&self, name: &str) -> bool {
        is_known_constant(name) || self.named.contains_key(name)
    }

    fn generator(&self, name: &str, scale: Rational) -> Result<Generator> {
        match self.named.get(name) {
            Some(decimal) => Generator::named(name, decimal, scale),
            None => Generator::constant(name, scale),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, column, message: String| Error::Syntax {
        line,
        column,
        message,
    };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let exp = i < chars.len()
                && matches!(chars[i], 'e' | 'E')
                && (chars.get(i + 1).is_some_and(char::is_ascii_digit)
                    || (matches!(chars.get(i + 1), Some('+' | '-'))
                        && chars.get(i + 2).is_some_and(char::is_ascii_digit)));
            if exp {
                i += 2;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            // p/q literal
            if i + 1 < chars.len()
                && chars[i] == '/'
                && chars[i + 1].is_ascii_digit()
                && chars[start..i].iter().all(char::is_ascii_digit)
            {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let q = parse_rational(&text)
                .map_err(|_| err(l0, c0, format!("malformed number `{text}`")))?;
            out.push(Token {
                tok: Tok::Num(q),
                line: l0,
                column: c0,
            });
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: l0,
                column: c0,
            });
        } else if "+-*(),".contains(c) {
            i += 1;
            out.push(Token {
                tok: Tok::Sym(c),
                line: l0,
                column: c0,
            });
        } else {
            return Err(err(l0, c0, format!("unexpected character `{c}`")));
        }
        col += i - start;
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    symbols: &'a SymbolTable,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, t: &Token, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        }
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Num(q) => format!("number `{}`", format_rational(q)),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::End => "end of input".into(),
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        let t = self.next();
        if t.tok == Tok::Sym(c) {
            Ok(())
        } else {
            Err(self.error(&t, format!("expected `{c}`, found {}", Self::describe(&t.tok))))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Sym('+') => {
                    self.next();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Sym('-') => {
                    self.next();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while self.peek().tok == Tok::Sym('*') {
            self.next();
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        let t = self.next();
        match &t.tok {
            Tok::Sym('-') => Ok(Expr::Neg(Box::new(self.factor()?))),
            Tok::Num(q) => Ok(Expr::Num(q.clone())),
            Tok::Sym('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) if name == "i" => Ok(Expr::I),
            Tok::Ident(name) if name == "chi" => {
                self.expect('(')?;
                let f = self.freq()?;
                self.expect(')')?;
                Ok(Expr::Chi(f))
            }
            Tok::Ident(name) if name == "hat" => {
                self.expect('(')?;
                let a = self.signed()?;
                self.expect(',')?;
                let b = self.signed()?;
                self.expect(',')?;
                let c = self.signed()?;
                self.expect(')')?;
                Ok(Expr::Hat(a, b, c))
            }
            Tok::Ident(name) if self.symbols.contains(name) => Err(self.error(
                &t,
                format!("symbol `{name}` may only appear inside chi(...)"),
            )),
            Tok::Ident(name) => Err(Error::UnknownSymbol(format!(
                "`{name}` at line {}, column {}",
                t.line, t.column
            ))),
            other => Err(self.error(&t, format!("unexpected {}", Self::describe(other)))),
        }
    }

    fn signed(&mut self) -> Result<Rational> {
        let negative = self.peek().tok == Tok::Sym('-');
        if negative {
            self.next();
        }
        let t = self.next();
        match t.tok.clone() {
            Tok::Num(q) => Ok(if negative { -q } else { q }),
            other => Err(self.error(&t, format!("expected a number, found {}", Self::describe(&other)))),
        }
    }

    fn symbol(&mut self) -> Result<String> {
        let t = self.next();
        match t.tok.clone() {
            Tok::Ident(name) if self.symbols.contains(&name) => Ok(name),
            Tok::Ident(name) => Err(Error::UnknownSymbol(format!(
                "`{name}` at line {}, column {}",
                t.line, t.column
            ))),
            other => Err(self.error(&t, format!("expected a symbol, found {}", Self::describe(&other)))),
        }
    }

    fn freq(&mut self) -> Result<FreqLit> {
        let negative = self.peek().tok == Tok::Sym('-');
        if matches!(self.tokens.get(self.pos + usize::from(negative)).map(|t| &t.tok), Some(Tok::Ident(_))) {
            if negative {
                self.next();
            }
            let symbol = self.symbol()?;
            let scale = if negative { -Rational::one() } else { Rational::one() };
            return Ok(FreqLit {
                scale,
                symbol: Some(symbol),
            });
        }
        let scale = self.signed()?;
        if self.peek().tok == Tok::Sym('*') {
            self.next();
            let symbol = self.symbol()?;
            return Ok(FreqLit {
                scale,
                symbol: Some(symbol),
            });
        }
        Ok(FreqLit {
            scale,
            symbol: None,
        })
    }
}

pub fn parse_expression(src: &str) -> Result<Expr> {
    parse_expression_with(src, &SymbolTable::new())
}

pub fn parse_expression_with(src: &str, symbols: &SymbolTable) -> Result<Expr> {
    let mut p = Parser {
        tokens: lex(src)?,
        pos: 0,
        symbols,
    };
    let e = p.expr()?;
    let t = p.next();
    if t.tok != Tok::End {
        return Err(p.error(&t, format!("unexpected {}", Parser::describe(&t.tok))));
    }
    Ok(e)
}

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 0,
        Expr::Mul(..) => 1,
        _ => 2,
    }
}

struct Wrapped<'a>(&'a Expr, bool);

impl fmt::Display for Wrapped<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for FreqLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.symbol {
            None => write!(f, "{}", format_rational(&self.scale)),
            Some(s) => write!(f, "{}*{s}", format_rational(&self.scale)),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(q) if q.is_negative() => write!(f, "(-{})", format_rational(&-q)),
            Expr::Num(q) => write!(f, "{}", format_rational(q)),
            Expr::I => write!(f, "i"),
            Expr::Chi(freq) => write!(f, "chi({freq})"),
            Expr::Hat(a, b, c) => write!(
                f,
                "hat({}, {}, {})",
                format_rational(a),
                format_rational(b),
                format_rational(c)
            ),
            Expr::Neg(x) => write!(f, "-{}", Wrapped(x, level(x) < 2)),
            Expr::Add(a, b) => write!(f, "{} + {}", a, Wrapped(b, level(b) == 0)),
            Expr::Sub(a, b) => write!(f, "{} - {}", a, Wrapped(b, level(b) == 0)),
            Expr::Mul(a, b) => write!(f, "{}*{}", Wrapped(a, level(a) == 0), Wrapped(b, level(b) < 2)),
        }
    }
}

impl Expr {
    pub fn frequencies(&self) -> Vec<FreqLit> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<FreqLit>) {
        match self {
            Expr::Chi(f) => out.push(f.clone()),
            Expr::Neg(x) => x.collect(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.collect(out);
                b.collect(out);
            }
            _ => {}
        }
    }
}

/// Smallest module containing every frequency of `exprs`: one generator per
/// symbol (scaled to the gcd of its multiples) plus one rational generator.
pub fn module_for(exprs: &[&Expr], symbols: &SymbolTable) -> Result<Arc<FrequencyModule>> {
    let mut groups: BTreeMap<Option<String>, Vec<Rational>> = BTreeMap::new();
    for e in exprs {
        for f in e.frequencies() {
            if !f.scale.is_zero() {
                groups.entry(f.symbol).or_default().push(f.scale);
            }
        }
    }
    if groups.is_empty() {
        return Ok(FrequencyModule::integers());
    }
    let gens = groups
        .into_iter()
        .map(|(symbol, scales)| {
            let g = rational_gcd_all(&scales);
            match symbol {
                None => Generator::rational(g),
                Some(name) => symbols.generator(&name, g),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    FrequencyModule::new(gens)
}

fn coords_in(module: &FrequencyModule, f: &FreqLit) -> Result<Vec<i64>> {
    let mut coords = vec![0; module.dim()];
    if f.scale.is_zero() {
        return Ok(coords);
    }
    let slot = module
        .generators()
        .iter()
        .position(|g| g.symbol() == f.symbol.as_deref())
        .ok_or_else(|| Error::InvalidInput(format!("frequency {f} is not in the module")))?;
    let ratio = &f.scale / module.generators()[slot].scale();
    if !ratio.is_integer() {
        return Err(Error::InvalidInput(format!("frequency {f} is not in the module")));
    }
    coords[slot] = ratio
        .to_integer()
        .try_into()
        .map_err(|_| Error::InvalidInput(format!("frequency {f} is too large")))?;
    Ok(coords)
}

pub fn lower(e: &Expr, module: &Arc<FrequencyModule>) -> Result<ExtendedFunction> {
    let constant = |s: Scalar| ExtendedFunction::from_ap(APFunction::constant(module, s));
    Ok(match e {
        Expr::Num(q) => constant(Scalar::rational(q.clone())),
        Expr::I => constant(Scalar::i()),
        Expr::Chi(f) => {
            let coords = coords_in(module, f)?;
            ExtendedFunction::from_ap(APFunction::character(&module.frequency(coords)?))
        }
        Expr::Hat(a, b, c) => {
            if !(a < b && b < c) {
                return Err(Error::InvalidInput(format!(
                    "hat({}, {}, {}) needs a < b < c",
                    format_rational(a),
                    format_rational(b),
                    format_rational(c)
                )));
            }
            ExtendedFunction::from_c0(C0Function::hat(a.clone(), b.clone(), c.clone())?, module)
        }
        Expr::Neg(x) => lower(x, module)?.neg(),
        Expr::Add(a, b) => lower(a, module)?.add(&lower(b, module)?)?,
        Expr::Sub(a, b) => lower(a, module)?.sub(&lower(b, module)?)?,
        Expr::Mul(a, b) => lower(a, module)?.mul(&lower(b, module)?)?,
    })
}

/// Parses and lowers `src` over the smallest module containing its frequencies.
pub fn compile(src: &str, symbols: &SymbolTable) -> Result<ExtendedFunction> {
    let e = parse_expression_with(src, symbols)?;
    lower(&e, &module_for(&[&e], symbols)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rational, Real};
    use std::f64::consts::PI;

    #[test]
    fn chi_two_over_integers() {
        let e = parse_expression("chi(2)").unwrap();
        assert_eq!(
            e,
            Expr::Chi(FreqLit {
                scale: int(2),
                symbol: None
            })
        );
        let m = module_for(&[&e], &SymbolTable::new()).unwrap();
        assert_eq!(m.generators()[0].scale(), &int(2));
        let f = compile("chi(2) + chi(1)", &SymbolTable::new()).unwrap();
        assert_eq!(f.module().generators()[0].scale(), &int(1));
        assert_eq!(f.ap.coefficient(&[2]), Scalar::one());
    }

    #[test]
    fn cosine_evaluates() {
        let f = compile("0.5*chi(1) + 0.5*chi(-1)", &SymbolTable::new()).unwrap();
        let v = f.eval(&Real::Float(PI / 3.0)).to_c64();
        assert!((v.re - 0.5).abs() < 1e-15 && v.im.abs() < 1e-15);
        let exact_t = f.eval(&Real::pi_multiple(rational(1, 3)));
        assert!(exact_t.approx_eq(&Scalar::rational(rational(1, 2)), 1e-15));
        assert_eq!(f.eval(&Real::pi_multiple(rational(1, 2))), Scalar::zero());
    }

    #[test]
    fn hat_lowers_to_triangle() {
        let f = compile("hat(-1,0,1)", &SymbolTable::new()).unwrap();
        assert_eq!(f.eval(&Real::zero()), Scalar::one());
        assert_eq!(f.eval(&Real::rational(rational(-1, 2))), Scalar::rational(rational(1, 2)));
        assert!(compile("hat(1,0,1)", &SymbolTable::new()).is_err());
        assert!(compile("hat(-1,0,1)*hat(0,1,2)", &SymbolTable::new()).is_err());
    }

    #[test]
    fn errors_carry_positions() {
        match parse_expression("chi(1) +\n  * 2") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            r => panic!("{r:?}"),
        }
        assert!(matches!(parse_expression("chi(1*tau)"), Err(Error::UnknownSymbol(_))));
        assert!(matches!(parse_expression("2 $"), Err(Error::Syntax { line: 1, column: 3, .. })));
        assert!(matches!(parse_expression("chi(1"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_expression(""), Err(Error::Syntax { .. })));
    }

    #[test]
    fn symbols_and_dependency() {
        let f = compile("chi(pi) + chi(1/2*pi) + chi(sqrt2)", &SymbolTable::new()).unwrap();
        assert_eq!(f.module().dim(), 2);
        let mut table = SymbolTable::new();
        table.define("twoRoot2", "2.8284271247461900976033774484193961571393437507538961").unwrap();
        let dep = compile("chi(sqrt2) + chi(twoRoot2)", &table);
        assert!(matches!(dep, Err(Error::DependentGenerators { .. })));
        assert!(table.define("pi", "3").is_err());
    }

    #[test]
    fn print_round_trips() {
        for src in [
            "chi(1) - (chi(2) - chi(3))",
            "-(chi(1) + 2)*i",
            "2*(3*chi(1/2*pi))",
            "hat(-1, 0, 3/2) + 0.25*chi(-2*sqrt2)",
            "--i - -chi(-pi)",
            "(1 + i)*(2 - i)*chi(e)",
        ] {
            let e = parse_expression(src).unwrap();
            let printed = e.to_string();
            assert_eq!(parse_expression(&printed).unwrap(), e, "{src} -> {printed}");
        }
    }
}
