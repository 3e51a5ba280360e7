//! Exact multivariate polynomials over the rationals in the four parameters
//! `a, b, g, d` (printed as α, β, γ, δ).
//!
//! A [`Polynomial`] is a sparse map from [`Monomial`] to a nonzero
//! [`Rational`]. Every constructor and every operation returns the canonical
//! form, so structural equality is mathematical equality. Terms are ordered
//! by graded lexicographic order with `a > b > g > d`; rendering lists the
//! largest term first.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Arbitrary-precision rational number, always in lowest terms.
pub type Rational = BigRational;

/// Builds the rational `n/d`.
///
/// # Panics
/// Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Renders a rational as `num/den`, with integers printed without a slash.
pub fn rational_to_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `n`, `-n` or `n/d`.
pub fn parse_rational(text: &str) -> Result<Rational, ParseError> {
    let text = text.trim();
    let bad = || ParseError::new(0, format!("invalid rational `{text}`"));
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(ParseError::new(0, format!("zero denominator in `{text}`")));
    }
    Ok(Rational::new(n, d))
}

/// One of the four ring variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    /// α
    A,
    /// β
    B,
    /// γ
    G,
    /// δ
    D,
}

impl Var {
    /// All variables in index order.
    pub const ALL: [Var; 4] = [Var::A, Var::B, Var::G, Var::D];

    /// Position of the variable in exponent vectors and points.
    pub fn index(self) -> usize {
        self as usize
    }

    /// ASCII name used in text and JSON forms.
    pub fn ascii(self) -> &'static str {
        ["a", "b", "g", "d"][self.index()]
    }

    /// Greek name used in human output.
    pub fn greek(self) -> &'static str {
        ["α", "β", "γ", "δ"][self.index()]
    }

    /// Resolves `a`, `alpha` or `α` (and likewise for the others).
    pub fn from_name(name: &str) -> Option<Var> {
        match name {
            "a" | "alpha" | "α" => Some(Var::A),
            "b" | "beta" | "β" => Some(Var::B),
            "g" | "gamma" | "γ" => Some(Var::G),
            "d" | "delta" | "δ" => Some(Var::D),
            _ => None,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.ascii())
    }
}

/// Product of variable powers, stored as an exponent vector.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: [u32; 4],
}

impl Monomial {
    /// The constant monomial 1.
    pub fn one() -> Self {
        Monomial::default()
    }

    /// Builds a monomial from its exponent vector, indexed by [`Var::index`].
    pub fn from_exponents(exps: [u32; 4]) -> Self {
        Monomial { exps }
    }

    /// The monomial `v`.
    pub fn var(v: Var) -> Self {
        let mut exps = [0; 4];
        exps[v.index()] = 1;
        Monomial { exps }
    }

    /// Exponent of `v`.
    pub fn exponent(&self, v: Var) -> u32 {
        self.exps[v.index()]
    }

    /// Exponent vector indexed by [`Var::index`].
    pub fn exponents(&self) -> [u32; 4] {
        self.exps
    }

    /// Sum of the exponents.
    pub fn total_degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    /// True for the constant monomial.
    pub fn is_one(&self) -> bool {
        self.exps == [0; 4]
    }

    /// Exponent-wise sum.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = self.exps;
        for (e, o) in exps.iter_mut().zip(other.exps) {
            *e += o;
        }
        Monomial { exps }
    }

    /// Copy with the exponent of `v` set to zero.
    pub fn without(&self, v: Var) -> Monomial {
        let mut exps = self.exps;
        exps[v.index()] = 0;
        Monomial { exps }
    }

    fn render(&self, unicode: bool) -> String {
        let mut parts = Vec::new();
        for v in Var::ALL {
            let e = self.exponent(v);
            if e == 0 {
                continue;
            }
            if unicode {
                let mut s = v.greek().to_string();
                if e > 1 {
                    s.push_str(&superscript(e));
                }
                parts.push(s);
            } else if e == 1 {
                parts.push(v.ascii().to_string());
            } else {
                parts.push(format!("{}^{}", v.ascii(), e));
            }
        }
        parts.join(if unicode { "" } else { "*" })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic order with `a > b > g > d`.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree().cmp(&other.total_degree()).then_with(|| self.exps.cmp(&other.exps))
    }
}

fn superscript_digit(c: char) -> Option<u32> {
    match c {
        '⁰' => Some(0),
        '¹' => Some(1),
        '²' => Some(2),
        '³' => Some(3),
        '⁴'..='⁹' => Some(c as u32 - '⁴' as u32 + 4),
        _ => None,
    }
}

fn superscript(n: u32) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string().chars().map(|c| DIGITS[c.to_digit(10).unwrap_or(0) as usize]).collect()
}

/// A total assignment of rational values to the four variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point(pub [Rational; 4]);

impl Point {
    /// Point with the given values for a, b, g, d.
    pub fn new(a: Rational, b: Rational, g: Rational, d: Rational) -> Self {
        Point([a, b, g, d])
    }

    /// Point with integer coordinates.
    pub fn from_ints(values: [i64; 4]) -> Self {
        Point(values.map(|v| rat(v, 1)))
    }

    /// The origin.
    pub fn zero() -> Self {
        Point::from_ints([0; 4])
    }

    /// Copy with `v` replaced by `value`.
    pub fn with(&self, v: Var, value: Rational) -> Self {
        let mut p = self.clone();
        p.0[v.index()] = value;
        p
    }

    /// The point as a substitution of constants.
    pub fn to_assignment(&self) -> Assignment {
        Var::ALL.iter().map(|&v| (v, Polynomial::constant(self[v].clone()))).collect()
    }

    /// Builds a point from a map, failing when a variable is missing.
    pub fn from_map(map: &BTreeMap<Var, Rational>) -> Result<Self, PolyError> {
        let get = |v: Var| map.get(&v).cloned().ok_or(PolyError::MissingVariable(v));
        Ok(Point([get(Var::A)?, get(Var::B)?, get(Var::G)?, get(Var::D)?]))
    }
}

impl Index<Var> for Point {
    type Output = Rational;
    fn index(&self, v: Var) -> &Rational {
        &self.0[v.index()]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            Var::ALL.iter().map(|&v| format!("{}={}", v.ascii(), rational_to_string(&self[v]))).collect();
        f.write_str(&parts.join(","))
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let map: BTreeMap<&str, String> = Var::ALL.iter().map(|&v| (v.ascii(), rational_to_string(&self[v]))).collect();
        map.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: BTreeMap<String, String> = BTreeMap::deserialize(d)?;
        let mut map = BTreeMap::new();
        for (k, v) in raw {
            let var = Var::from_name(&k).ok_or_else(|| D::Error::custom(format!("unknown variable `{k}`")))?;
            map.insert(var, parse_rational(&v).map_err(D::Error::custom)?);
        }
        Point::from_map(&map).map_err(D::Error::custom)
    }
}

/// Simultaneous substitution `variable -> polynomial`.
pub type Assignment = BTreeMap<Var, Polynomial>;

/// Errors raised by polynomial evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    /// A point did not assign every variable.
    #[error("missing value for variable `{0}`")]
    MissingVariable(Var),
}

/// Error produced by the polynomial parser.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at offset {pos}: {msg}")]
pub struct ParseError {
    /// Byte offset of the offending token.
    pub pos: usize,
    /// Description of the problem.
    pub msg: String,
}

impl ParseError {
    fn new(pos: usize, msg: impl Into<String>) -> Self {
        ParseError { pos, msg: msg.into() }
    }
}

/// Exact polynomial in `a, b, g, d` with rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    /// The zero polynomial.
    pub fn zero() -> Self {
        Polynomial::default()
    }

    /// The constant 1.
    pub fn one() -> Self {
        Polynomial::constant(Rational::one())
    }

    /// Constant polynomial.
    pub fn constant(c: Rational) -> Self {
        Polynomial::term(c, Monomial::one())
    }

    /// Constant polynomial with an integer value.
    pub fn int(n: i64) -> Self {
        Polynomial::constant(rat(n, 1))
    }

    /// The polynomial `v`.
    pub fn var(v: Var) -> Self {
        Polynomial::term(Rational::one(), Monomial::var(v))
    }

    /// Single term `c * m`.
    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates.
    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(iter: I) -> Self {
        let mut p = Polynomial::zero();
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p.debug_check();
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn debug_check(&self) {
        debug_assert!(self.terms.values().all(|c| !c.is_zero()), "zero coefficient stored");
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Number of stored terms.
    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// True iff the term map is empty.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for constant polynomials, including zero.
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    /// Value of a constant polynomial.
    pub fn constant_value(&self) -> Option<Rational> {
        if self.is_zero() {
            Some(Rational::zero())
        } else if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    /// Coefficient of monomial `m`.
    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Largest term under graded lexicographic order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    /// Maximum total degree, `None` for zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    /// Degree in `v`, `None` for zero.
    pub fn degree_in(&self, v: Var) -> Option<u32> {
        self.terms.keys().map(|m| m.exponent(v)).max()
    }

    /// Variables that occur with a positive exponent.
    pub fn variables(&self) -> Vec<Var> {
        Var::ALL.into_iter().filter(|&v| self.terms.keys().any(|m| m.exponent(v) > 0)).collect()
    }

    /// Coefficient of `v^k` when viewed as a polynomial in `v`.
    pub fn coeff_in(&self, v: Var, k: u32) -> Polynomial {
        Polynomial::from_terms(
            self.terms.iter().filter(|(m, _)| m.exponent(v) == k).map(|(m, c)| (m.without(v), c.clone())),
        )
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    /// Product with a monomial term.
    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect() }
    }

    /// `self^n`.
    pub fn pow(&self, n: u32) -> Polynomial {
        let mut result = Polynomial::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Simultaneous substitution; unassigned variables pass through.
    pub fn substitute(&self, assignment: &Assignment) -> Polynomial {
        if assignment.is_empty() {
            return self.clone();
        }
        let mut powers: BTreeMap<(Var, u32), Polynomial> = BTreeMap::new();
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut kept = Monomial::one();
            let mut factor = Polynomial::constant(c.clone());
            for v in Var::ALL {
                let e = m.exponent(v);
                if e == 0 {
                    continue;
                }
                match assignment.get(&v) {
                    Some(q) => {
                        let pw = powers.entry((v, e)).or_insert_with(|| q.pow(e));
                        factor = &factor * &*pw;
                    }
                    None => {
                        let mut exps = kept.exponents();
                        exps[v.index()] = e;
                        kept = Monomial::from_exponents(exps);
                    }
                }
            }
            out = &out + &factor.mul_term(&kept, &Rational::one());
        }
        out
    }

    /// Exact value at a point.
    pub fn eval(&self, point: &Point) -> Rational {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut value = c.clone();
            for v in Var::ALL {
                let e = m.exponent(v);
                if e > 0 {
                    value *= num_traits::pow(point[v].clone(), e as usize);
                }
            }
            total += value;
        }
        total
    }

    /// Exact value at a point given as a map; every variable must be present.
    pub fn eval_map(&self, point: &BTreeMap<Var, Rational>) -> Result<Rational, PolyError> {
        Ok(self.eval(&Point::from_map(point)?))
    }

    /// Evaluates the variables in `point` that are present, leaving the rest symbolic.
    pub fn partial_eval(&self, values: &BTreeMap<Var, Rational>) -> Polynomial {
        let assignment: Assignment = values.iter().map(|(v, r)| (*v, Polynomial::constant(r.clone()))).collect();
        self.substitute(&assignment)
    }

    /// Divides by the leading coefficient, giving a representative of the
    /// class of `self` under nonzero rational scaling. Zero maps to zero.
    pub fn monic(&self) -> Polynomial {
        match self.leading_term() {
            Some((_, c)) => self.scale(&c.recip()),
            None => Polynomial::zero(),
        }
    }

    /// True when one polynomial is a nonzero rational multiple of the other.
    pub fn equal_up_to_scaling(&self, other: &Polynomial) -> bool {
        self.monic() == other.monic()
    }

    /// Human-readable rendering in ASCII or Unicode.
    pub fn render(&self, style: Style) -> String {
        let unicode = style == Style::Unicode;
        let minus = if unicode { "−" } else { "-" };
        if self.is_zero() {
            return "0".to_string();
        }
        let leading_negative = self.leading_term().map(|(_, c)| c.is_negative()).unwrap_or(false);
        if leading_negative && self.num_terms() > 1 {
            return format!("{minus}({})", (-self).render(style));
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            if i == 0 {
                if negative {
                    out.push_str(minus);
                }
            } else {
                out.push_str(if negative { minus } else { "+" });
            }
            out.push_str(&render_term(&c.abs(), m, unicode));
        }
        out
    }

    /// Parses text with the default variable names and no named constants.
    pub fn parse(text: &str) -> Result<Polynomial, ParseError> {
        Polynomial::parse_with(text, &Bindings::default())
    }

    /// Parses text, resolving identifiers through `bindings` first.
    pub fn parse_with(text: &str, bindings: &Bindings) -> Result<Polynomial, ParseError> {
        Parser::new(text, bindings)?.parse_all()
    }

    /// JSON-friendly term list.
    pub fn to_json_terms(&self) -> Vec<JsonTerm> {
        self.terms
            .iter()
            .rev()
            .map(|(m, c)| JsonTerm {
                coeff: format!("{}/{}", c.numer(), c.denom()),
                exps: Var::ALL
                    .iter()
                    .filter(|&&v| m.exponent(v) > 0)
                    .map(|&v| (v.ascii().to_string(), m.exponent(v)))
                    .collect(),
            })
            .collect()
    }

    /// Inverse of [`Polynomial::to_json_terms`].
    pub fn from_json_terms(terms: &[JsonTerm]) -> Result<Polynomial, ParseError> {
        let mut out = Vec::new();
        for t in terms {
            let c = parse_rational(&t.coeff)?;
            let mut exps = [0u32; 4];
            for (name, e) in &t.exps {
                let v = Var::from_name(name).ok_or_else(|| ParseError::new(0, format!("unknown variable `{name}`")))?;
                exps[v.index()] += e;
            }
            out.push((Monomial::from_exponents(exps), c));
        }
        Ok(Polynomial::from_terms(out))
    }
}

fn render_term(c: &Rational, m: &Monomial, unicode: bool) -> String {
    let mono = m.render(unicode);
    let numer = c.numer();
    let denom = c.denom();
    let mul = if unicode { "" } else { "*" };
    let mut s = String::new();
    if mono.is_empty() {
        s.push_str(&numer.to_string());
    } else if numer.is_one() {
        s.push_str(&mono);
    } else {
        s.push_str(&format!("{numer}{mul}{mono}"));
    }
    if !denom.is_one() {
        s.push_str(&format!("/{denom}"));
    }
    s
}

/// Output style for human rendering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Style {
    /// ASCII names `a,b,g,d`, round-trips through the parser.
    Ascii,
    /// Greek letters and superscripts.
    Unicode,
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Style::Ascii))
    }
}

impl FromStr for Polynomial {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Polynomial::parse(s)
    }
}

/// One term of the JSON encoding.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonTerm {
    /// Coefficient as `num/den`.
    pub coeff: String,
    /// Positive exponents keyed by ASCII variable name.
    pub exps: BTreeMap<String, u32>,
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json_terms().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let terms: Vec<JsonTerm> = Vec::deserialize(d)?;
        Polynomial::from_json_terms(&terms).map_err(D::Error::custom)
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out.debug_check();
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out.debug_check();
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out.debug_check();
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                (&self).$method(rhs)
            }
        }
        impl $tr<Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

/// Named constants available to the parser in addition to the variables.
#[derive(Clone, Debug, Default)]
pub struct Bindings {
    names: BTreeMap<String, Polynomial>,
}

impl Bindings {
    /// Empty binding set.
    pub fn new() -> Self {
        Bindings::default()
    }

    /// Adds or replaces a named constant.
    pub fn bind(mut self, name: &str, value: Polynomial) -> Self {
        self.names.insert(name.to_string(), value);
        self
    }

    /// Looks up a named constant.
    pub fn get(&self, name: &str) -> Option<&Polynomial> {
        self.names.get(name)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    bindings: &'a Bindings,
    len: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &str, bindings: &'a Bindings) -> Result<Self, ParseError> {
        let mut toks = Vec::new();
        let mut chars = text.char_indices().peekable();
        while let Some(&(pos, ch)) = chars.peek() {
            if ch.is_whitespace() {
                chars.next();
            } else if ch.is_ascii_digit() {
                let mut s = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_ascii_digit() {
                        s.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                let n: BigInt = s.parse().map_err(|_| ParseError::new(pos, "bad number"))?;
                toks.push((pos, Tok::Num(n)));
            } else if "αβγδη".contains(ch) {
                let name = if ch == 'η' { "eta".to_string() } else { ch.to_string() };
                toks.push((pos, Tok::Ident(name)));
                chars.next();
            } else if let Some(d) = superscript_digit(ch) {
                let mut n = BigInt::from(d);
                chars.next();
                while let Some(d) = chars.peek().and_then(|&(_, c)| superscript_digit(c)) {
                    n = n * 10 + d;
                    chars.next();
                }
                toks.push((pos, Tok::Op('^')));
                toks.push((pos, Tok::Num(n)));
            } else if ch.is_alphabetic() || ch == '_' {
                let mut s = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_alphabetic() || c == '_' {
                        s.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_ascii_digit() {
                        s.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push((pos, Tok::Ident(s)));
            } else if "+-*/^()[]−·".contains(ch) {
                let op = match ch {
                    '−' => '-',
                    '·' => '*',
                    c => c,
                };
                toks.push((pos, Tok::Op(op)));
                chars.next();
            } else {
                return Err(ParseError::new(pos, format!("unexpected character `{ch}`")));
            }
        }
        Ok(Parser { toks, idx: 0, bindings, len: text.len() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|(p, _)| *p).unwrap_or(self.len)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn parse_all(mut self) -> Result<Polynomial, ParseError> {
        if self.toks.is_empty() {
            return Err(ParseError::new(0, "empty expression"));
        }
        let p = self.expr()?;
        if self.idx != self.toks.len() {
            return Err(ParseError::new(self.pos(), "unexpected trailing input"));
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = if self.eat('-') {
            -self.term()?
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = acc + self.term()?;
            } else if self.eat('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn starts_primary(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Op('(')) | Some(Tok::Op('[')))
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc * self.unary()?;
            } else if self.eat('/') {
                let pos = self.pos();
                let divisor = self.unary()?;
                let c = divisor
                    .constant_value()
                    .ok_or_else(|| ParseError::new(pos, "division by a non-constant expression"))?;
                if c.is_zero() {
                    return Err(ParseError::new(pos, "division by zero"));
                }
                acc = acc.scale(&c.recip());
            } else if self.starts_primary() {
                acc = acc * self.power()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Polynomial, ParseError> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.primary()?;
        if self.eat('^') {
            let pos = self.pos();
            match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.idx += 1;
                    let e =
                        n.to_u32().filter(|&e| e <= 64).ok_or_else(|| ParseError::new(pos, "exponent too large"))?;
                    Ok(base.pow(e))
                }
                _ => Err(ParseError::new(pos, "expected a non-negative integer exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self) -> Result<Polynomial, ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.idx += 1;
                Ok(Polynomial::constant(Rational::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                self.idx += 1;
                if let Some(p) = self.bindings.get(&name) {
                    Ok(p.clone())
                } else if let Some(v) = Var::from_name(&name) {
                    Ok(Polynomial::var(v))
                } else {
                    Err(ParseError::new(pos, format!("unknown identifier `{name}`")))
                }
            }
            Some(Tok::Op(open @ ('(' | '['))) => {
                self.idx += 1;
                let inner = self.expr()?;
                let close = if open == '(' { ')' } else { ']' };
                if !self.eat(close) {
                    return Err(ParseError::new(self.pos(), format!("expected `{close}`")));
                }
                Ok(inner)
            }
            Some(tok) => Err(ParseError::new(pos, format!("unexpected token {tok:?}"))),
            None => Err(ParseError::new(pos, "unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Polynomial {
        Polynomial::parse(s).unwrap()
    }

    #[test]
    fn add_merges_and_cancels() {
        assert_eq!(p("a^2") + p("b^2"), p("a^2+b^2"));
        assert!((p("a*b") + p("-a*b")).is_zero());
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(p("a-b") * p("a+b"), p("a^2-b^2"));
        assert!((p("a+d") * Polynomial::zero()).is_zero());
    }

    #[test]
    fn scale_cases() {
        assert_eq!(p("a^2").scale(&rat(1, 2)), p("a^2/2"));
        assert_eq!(p("a*b/2").scale(&rat(-2, 1)), p("-a*b"));
        assert!(p("a+b").scale(&rat(0, 1)).is_zero());
    }

    #[test]
    fn substitute_cases() {
        let mut s = Assignment::new();
        s.insert(Var::A, Polynomial::zero());
        assert!(p("2*a^2*b").substitute(&s).is_zero());
        let mut s = Assignment::new();
        s.insert(Var::B, Polynomial::zero());
        s.insert(Var::G, Polynomial::zero());
        assert_eq!(p("a^2+b*g").substitute(&s), p("a^2"));
        let mut s = Assignment::new();
        s.insert(Var::B, p("a"));
        assert!(p("a/2*(a^2-b^2)").substitute(&s).is_zero());
    }

    #[test]
    fn substitution_is_simultaneous() {
        let mut s = Assignment::new();
        s.insert(Var::A, p("b"));
        s.insert(Var::B, p("a"));
        assert_eq!(p("a^2*b").substitute(&s), p("b^2*a"));
    }

    #[test]
    fn eval_cases() {
        assert_eq!(p("a^2+b^2").eval(&Point::from_ints([3, 4, 0, 0])), rat(25, 1));
        assert_eq!(Polynomial::zero().eval(&Point::from_ints([1, 2, 3, 4])), rat(0, 1));
        let mut m = BTreeMap::new();
        m.insert(Var::A, rat(1, 1));
        assert_eq!(p("a").eval_map(&m), Err(PolyError::MissingVariable(Var::B)));
    }

    #[test]
    fn render_negated_sum() {
        assert_eq!(p("-a^2-b^2").to_string(), "-(a^2+b^2)");
        assert_eq!(p("3*a^3/2").to_string(), "3*a^3/2");
        assert_eq!(p("a^2*b/4 - 1/3").to_string(), "a^2*b/4-1/3");
        assert_eq!(p("-a*b").to_string(), "-a*b");
        assert_eq!(p("-a^2-b^2").render(Style::Unicode), "−(α²+β²)");
    }

    #[test]
    fn render_round_trips() {
        for s in ["-(a^2+b^2)", "3*a^3/2-a*b*g+7/5", "a^2*b*g*d^3-2/3*d", "0", "-1/2"] {
            let q = p(s);
            assert_eq!(p(&q.to_string()), q, "{s}");
        }
    }

    #[test]
    fn json_round_trips() {
        let q = p("3*a^3/2-a*b*g+7/5");
        let text = serde_json::to_string(&q).unwrap();
        assert_eq!(
            text,
            r#"[{"coeff":"3/2","exps":{"a":3}},{"coeff":"-1/1","exps":{"a":1,"b":1,"g":1}},{"coeff":"7/5","exps":{}}]"#
        );
        let back: Polynomial = serde_json::from_str(&text).unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn parser_features() {
        assert_eq!(p("2a^2b"), p("2*a^2*b"));
        assert_eq!(p("α(β+γ)"), p("a*b+a*g"));
        assert_eq!(p("αβ²−γ³δ"), p("a*b^2-g^3*d"));
        assert_eq!(p("α¹⁰"), p("a^10"));
        assert_eq!(p("[a-b]^2"), p("a^2-2*a*b+b^2"));
        assert_eq!(p("-a^2"), p("-(a^2)"));
        let env = Bindings::new().bind("eta", Polynomial::int(-1));
        assert_eq!(Polynomial::parse_with("a*eta+eta^2", &env).unwrap(), p("1-a"));
        assert!(Polynomial::parse("a/b").is_err());
        assert!(Polynomial::parse("(a+b").is_err());
        assert!(Polynomial::parse("x").is_err());
        assert!(Polynomial::parse("").is_err());
        assert!(Polynomial::parse("a/0").is_err());
    }

    #[test]
    fn grlex_order() {
        assert!(Monomial::var(Var::A) > Monomial::var(Var::B));
        assert!(Monomial::from_exponents([0, 0, 0, 2]) > Monomial::var(Var::A));
        assert_eq!(p("b+a^2+d").leading_term().unwrap().0, &Monomial::from_exponents([2, 0, 0, 0]));
    }

    #[test]
    fn scaling_classes() {
        assert!(p("2*a^2*b").equal_up_to_scaling(&p("-a^2*b/2")));
        assert!(!p("a^2*b").equal_up_to_scaling(&p("a*b^2")));
        assert!(Polynomial::zero().equal_up_to_scaling(&Polynomial::zero()));
    }
}
