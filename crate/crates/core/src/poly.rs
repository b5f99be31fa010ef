//! Noncommutative *-polynomials in named inputs.
//!
//! Text syntax, used by scenario files and tests:
//!
//! ```text
//! 0.5 x1 x2 + 0.5 x2 x1 - 2*x1'^2 + (x1 + x2)^2 + 3
//! ```
//!
//! Juxtaposition or `*` multiplies, `'` marks the adjoint of an input, `^n`
//! raises to a nonnegative integer power, and parentheses group. Coefficients
//! are real in the text syntax; complex coefficients use the record form.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::element::Element;
use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub input: usize,
    pub adjoint: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: C64,
    pub word: Vec<Letter>,
}

/// `Σ c_w w(x_1, …, x_n)` over words `w`; the empty word is the identity.
///
/// Evaluation returns the Hermitian part `(A + A*)/2` of the raw sum, so the
/// result is self-adjoint for any coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolyRecord", into = "PolyRecord")]
pub struct NcPolynomial {
    inputs: Vec<String>,
    terms: Vec<Term>,
}

impl NcPolynomial {
    pub fn new(inputs: Vec<String>, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            for l in &t.word {
                if l.input >= inputs.len() {
                    return Err(Error::InvalidArgument(format!(
                        "word letter {} out of range for {} inputs",
                        l.input,
                        inputs.len()
                    )));
                }
            }
        }
        Ok(NcPolynomial { inputs, terms }.normalized())
    }

    /// Inputs named `x1, …, xn`.
    pub fn standard_inputs(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("x{i}")).collect()
    }

    pub fn zero(inputs: Vec<String>) -> Self {
        NcPolynomial {
            inputs,
            terms: Vec::new(),
        }
    }

    pub fn constant(inputs: Vec<String>, c: C64) -> Self {
        NcPolynomial {
            inputs,
            terms: vec![Term {
                coeff: c,
                word: Vec::new(),
            }],
        }
        .normalized()
    }

    pub fn sum_of_inputs(inputs: Vec<String>) -> Self {
        let terms = (0..inputs.len())
            .map(|i| Term {
                coeff: C64::new(1.0, 0.0),
                word: vec![Letter {
                    input: i,
                    adjoint: false,
                }],
            })
            .collect();
        NcPolynomial { inputs, terms }
    }

    /// The single monomial `x_{i_1} ⋯ x_{i_k}`.
    pub fn monomial(inputs: Vec<String>, word: &[usize]) -> Self {
        let w = word
            .iter()
            .map(|&i| Letter {
                input: i,
                adjoint: false,
            })
            .collect();
        NcPolynomial {
            inputs,
            terms: vec![Term {
                coeff: C64::new(1.0, 0.0),
                word: w,
            }],
        }
    }

    /// Parse the text syntax over the given input names.
    pub fn parse<S: AsRef<str>>(inputs: &[S], expr: &str) -> Result<Self> {
        let inputs: Vec<String> = inputs.iter().map(|s| s.as_ref().to_string()).collect();
        let mut p = Parser {
            src: expr.as_bytes(),
            pos: 0,
            inputs: &inputs,
        };
        let terms = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(NcPolynomial {
            inputs: inputs.clone(),
            terms,
        }
        .normalized())
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn input_index(&self, name: &str) -> Option<usize> {
        self.inputs.iter().position(|n| n == name)
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|t| t.word.len()).max().unwrap_or(0)
    }

    /// Whether any term with nonzero coefficient contains input `i`.
    pub fn references(&self, i: usize) -> bool {
        self.terms.iter().any(|t| t.word.iter().any(|l| l.input == i))
    }

    /// Drop every term containing input `i`, i.e. substitute `x_i = 0`.
    pub fn without_input(&self, i: usize) -> Self {
        NcPolynomial {
            inputs: self.inputs.clone(),
            terms: self
                .terms
                .iter()
                .filter(|t| t.word.iter().all(|l| l.input != i))
                .cloned()
                .collect(),
        }
    }

    /// Merge equal words and drop zero coefficients; terms sorted by word.
    fn normalized(self) -> Self {
        let mut merged: BTreeMap<Vec<Letter>, C64> = BTreeMap::new();
        for t in self.terms {
            *merged.entry(t.word).or_insert(C64::new(0.0, 0.0)) += t.coeff;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| *c != C64::new(0.0, 0.0))
            .map(|(word, coeff)| Term { coeff, word })
            .collect();
        NcPolynomial {
            inputs: self.inputs,
            terms,
        }
    }

    /// Evaluate on elements bound positionally to the inputs, then take the
    /// Hermitian part.
    pub fn eval(&self, args: &[Element]) -> Result<Element> {
        if args.len() != self.inputs.len() {
            return Err(Error::Arity {
                expected: self.inputs.len(),
                got: args.len(),
            });
        }
        let Some(first) = args.first() else {
            return Err(Error::InvalidArgument(
                "evaluation needs at least one input to fix the shape".into(),
            ));
        };
        for a in &args[1..] {
            first.ensure_same_shape(a)?;
        }
        let shape = first.shape();
        let adjoints: Vec<Option<Element>> = (0..args.len())
            .map(|i| {
                self.terms
                    .iter()
                    .any(|t| t.word.iter().any(|l| l.input == i && l.adjoint))
                    .then(|| args[i].adjoint())
            })
            .collect();
        let mut acc = Element::zero(shape);
        for t in &self.terms {
            let mut prod: Option<Element> = None;
            for l in &t.word {
                let f = if l.adjoint {
                    adjoints[l.input].as_ref().expect("adjoint cached")
                } else {
                    &args[l.input]
                };
                prod = Some(match prod {
                    None => f.clone(),
                    Some(p) => &p * f,
                });
            }
            let p = prod.unwrap_or_else(|| Element::identity(shape));
            acc = acc + p.scale(t.coeff);
        }
        Ok(acc.hermitian_part())
    }

    /// Evaluate with bindings by input name.
    pub fn eval_named(&self, bindings: &BTreeMap<String, Element>) -> Result<Element> {
        let args = self
            .inputs
            .iter()
            .map(|n| bindings.get(n).cloned().ok_or_else(|| Error::UnboundInput(n.clone())))
            .collect::<Result<Vec<_>>>()?;
        self.eval(&args)
    }

    fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut word = a.word.clone();
                word.extend_from_slice(&b.word);
                terms.push(Term {
                    coeff: a.coeff * b.coeff,
                    word,
                });
            }
        }
        NcPolynomial {
            inputs: self.inputs.clone(),
            terms,
        }
        .normalized()
    }
}

impl fmt::Display for NcPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if t.coeff.im == 0.0 {
                write!(f, "{}", t.coeff.re)?;
            } else {
                write!(f, "({}{:+}i)", t.coeff.re, t.coeff.im)?;
            }
            for l in &t.word {
                write!(f, " {}{}", self.inputs[l.input], if l.adjoint { "'" } else { "" })?;
            }
        }
        Ok(())
    }
}

/// JSON form: `{"inputs": [...], "terms": [{"coeff": [re, im], "word": ["x1", "x2'"]}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyRecord {
    pub inputs: Vec<String>,
    pub terms: Vec<TermRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermRecord {
    pub coeff: [f64; 2],
    pub word: Vec<String>,
}

impl TryFrom<PolyRecord> for NcPolynomial {
    type Error = Error;
    fn try_from(rec: PolyRecord) -> Result<Self> {
        let mut terms = Vec::with_capacity(rec.terms.len());
        for t in &rec.terms {
            let word = t
                .word
                .iter()
                .map(|name| {
                    let (base, adjoint) = match name.strip_suffix('\'') {
                        Some(b) => (b, true),
                        None => (name.as_str(), false),
                    };
                    rec.inputs
                        .iter()
                        .position(|n| n == base)
                        .map(|input| Letter { input, adjoint })
                        .ok_or_else(|| Error::UnknownInput(base.to_string()))
                })
                .collect::<Result<Vec<_>>>()?;
            terms.push(Term {
                coeff: C64::new(t.coeff[0], t.coeff[1]),
                word,
            });
        }
        NcPolynomial::new(rec.inputs, terms)
    }
}

impl From<NcPolynomial> for PolyRecord {
    fn from(p: NcPolynomial) -> Self {
        let terms = p
            .terms
            .iter()
            .map(|t| TermRecord {
                coeff: [t.coeff.re, t.coeff.im],
                word: t
                    .word
                    .iter()
                    .map(|l| format!("{}{}", p.inputs[l.input], if l.adjoint { "'" } else { "" }))
                    .collect(),
            })
            .collect();
        PolyRecord {
            inputs: p.inputs,
            terms,
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    inputs: &'a [String],
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::PolyParse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn poly(&self, terms: Vec<Term>) -> NcPolynomial {
        NcPolynomial {
            inputs: self.inputs.to_vec(),
            terms,
        }
    }

    fn expr(&mut self) -> Result<Vec<Term>> {
        let mut acc: Vec<Term> = Vec::new();
        let mut sign = 1.0;
        match self.peek() {
            Some(b'+') => self.pos += 1,
            Some(b'-') => {
                self.pos += 1;
                sign = -1.0;
            }
            _ => {}
        }
        loop {
            let t = self.term()?;
            acc.extend(t.into_iter().map(|mut t| {
                t.coeff *= sign;
                t
            }));
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    sign = 1.0;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1.0;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Vec<Term>> {
        let first = self.factor()?;
        let mut acc = self.poly(first);
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    let f = self.poly(f);
                    acc = acc.mul(&f);
                }
                Some(c) if c == b'(' || c == b'.' || c.is_ascii_alphanumeric() || c == b'_' => {
                    let f = self.factor()?;
                    let f = self.poly(f);
                    acc = acc.mul(&f);
                }
                _ => return Ok(acc.terms),
            }
        }
    }

    fn factor(&mut self) -> Result<Vec<Term>> {
        let base = match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                self.poly(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_digit()
                        || self.src[self.pos] == b'.'
                        || self.src[self.pos] == b'e'
                        || self.src[self.pos] == b'E'
                        || ((self.src[self.pos] == b'-' || self.src[self.pos] == b'+')
                            && matches!(self.src[self.pos - 1], b'e' | b'E')))
                {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let v: f64 = text.parse().map_err(|_| Error::PolyParse {
                    pos: start,
                    msg: format!("bad number `{text}`"),
                })?;
                self.poly(vec![Term {
                    coeff: C64::new(v, 0.0),
                    word: Vec::new(),
                }])
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let input = self
                    .inputs
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| Error::UnknownInput(name.to_string()))?;
                let adjoint = if self.src.get(self.pos) == Some(&b'\'') {
                    self.pos += 1;
                    true
                } else {
                    false
                };
                self.poly(vec![Term {
                    coeff: C64::new(1.0, 0.0),
                    word: vec![Letter { input, adjoint }],
                }])
            }
            _ => return Err(self.err("expected a number, input name or `(`")),
        };
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let k: u32 = std::str::from_utf8(&self.src[start..self.pos])
                .expect("ascii")
                .parse()
                .map_err(|_| self.err("expected a nonnegative integer exponent"))?;
            let mut acc = self.poly(vec![Term {
                coeff: C64::new(1.0, 0.0),
                word: Vec::new(),
            }]);
            for _ in 0..k {
                acc = acc.mul(&base);
            }
            return Ok(acc.terms);
        }
        Ok(base.terms)
    }
}
