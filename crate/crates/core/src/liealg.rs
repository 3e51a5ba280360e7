//! The seven three-dimensional Lorentzian Lie algebra families, their
//! structure constants and constraint sets, the fixed metric diag(1,1,-1),
//! and rational sampling on constraint varieties.

use std::fmt;
use std::ops::{Add, Index, Neg, Sub};
use std::str::FromStr;

use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{rat, Assignment, Point, Polynomial, Rational, Style, Var};

/// The seven families `G1`..`G7`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    G1,
    G2,
    G3,
    G4,
    G5,
    G6,
    G7,
}

impl Family {
    /// All families in order.
    pub const ALL: [Family; 7] = [Family::G1, Family::G2, Family::G3, Family::G4, Family::G5, Family::G6, Family::G7];

    /// True for the only family that depends on the sign `eta`.
    pub fn uses_eta(self) -> bool {
        self == Family::G4
    }

    /// The `eta` values to instantiate: both signs for G4, none otherwise.
    pub fn eta_branches(self) -> Vec<Option<Eta>> {
        if self.uses_eta() {
            vec![Some(Eta::Plus), Some(Eta::Minus)]
        } else {
            vec![None]
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G{}", *self as usize + 1)
    }
}

impl FromStr for Family {
    type Err = LieError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_uppercase();
        Family::ALL.into_iter().find(|f| f.to_string() == t).ok_or_else(|| LieError::UnknownFamily(s.to_string()))
    }
}

/// The sign `eta = ±1` of family G4.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Eta {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
}

impl Eta {
    /// Numeric value ±1.
    pub fn value(self) -> i64 {
        match self {
            Eta::Plus => 1,
            Eta::Minus => -1,
        }
    }

    /// The value as a constant polynomial.
    pub fn poly(self) -> Polynomial {
        Polynomial::int(self.value())
    }
}

impl fmt::Display for Eta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Eta::Plus => "+1",
            Eta::Minus => "-1",
        })
    }
}

impl FromStr for Eta {
    type Err = LieError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "+1" | "1" | "+" | "plus" => Ok(Eta::Plus),
            "-1" | "-" | "minus" => Ok(Eta::Minus),
            other => Err(LieError::BadEta(other.to_string())),
        }
    }
}

/// Errors raised while instantiating a Lie algebra.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error("unknown family `{0}` (expected G1..G7)")]
    UnknownFamily(String),
    #[error("invalid eta `{0}` (expected +1 or -1)")]
    BadEta(String),
    #[error("family G4 requires eta = +1 or -1")]
    MissingEta,
    #[error("eta applies only to family G4, not {0}")]
    UnexpectedEta(Family),
    #[error("constraint violated: {0}")]
    ConstraintViolation(String),
}

/// A vector in the pseudo-orthonormal frame `e1, e2, e3`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FrameVector(pub [Polynomial; 3]);

impl FrameVector {
    /// The zero vector.
    pub fn zero() -> Self {
        FrameVector::default()
    }

    /// Basis vector `e_{i+1}` for `i` in 0..3.
    pub fn basis(i: usize) -> Self {
        let mut v = FrameVector::zero();
        v.0[i] = Polynomial::one();
        v
    }

    /// Vector from three components.
    pub fn new(c1: Polynomial, c2: Polynomial, c3: Polynomial) -> Self {
        FrameVector([c1, c2, c3])
    }

    /// Parses three component expressions.
    pub fn parse(c: [&str; 3]) -> Result<Self, crate::poly::ParseError> {
        Ok(FrameVector([Polynomial::parse(c[0])?, Polynomial::parse(c[1])?, Polynomial::parse(c[2])?]))
    }

    /// True when every component is zero.
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Polynomial::is_zero)
    }

    /// Multiplies every component by a polynomial.
    pub fn scale_poly(&self, s: &Polynomial) -> FrameVector {
        FrameVector(std::array::from_fn(|i| &self.0[i] * s))
    }

    /// Multiplies every component by a rational.
    pub fn scale(&self, s: &Rational) -> FrameVector {
        FrameVector(std::array::from_fn(|i| self.0[i].scale(s)))
    }

    /// Component-wise substitution.
    pub fn substitute(&self, a: &Assignment) -> FrameVector {
        FrameVector(std::array::from_fn(|i| self.0[i].substitute(a)))
    }

    /// Component-wise evaluation.
    pub fn eval(&self, p: &Point) -> [Rational; 3] {
        std::array::from_fn(|i| self.0[i].eval(p))
    }

    /// Human rendering as a combination of `e1, e2, e3`.
    pub fn render(&self, style: Style) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (i, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let basis =
                if style == Style::Unicode { format!("e{}", ["₁", "₂", "₃"][i]) } else { format!("e{}", i + 1) };
            let text = c.render(style);
            let minus = if style == Style::Unicode { "−" } else { "-" };
            let term = if c == &Polynomial::one() {
                basis
            } else if c == &-Polynomial::one() {
                format!("{minus}{basis}")
            } else if c.num_terms() == 1 && !c.is_constant() || c.is_constant() {
                let sep = if style == Style::Unicode { "" } else { "*" };
                format!("{text}{sep}{basis}")
            } else {
                let sep = if style == Style::Unicode { "" } else { "*" };
                if let Some(stripped) = text.strip_prefix(&format!("{minus}(")) {
                    format!("{minus}({stripped}{sep}{basis}")
                } else {
                    format!("({text}){sep}{basis}")
                }
            };
            parts.push(term);
        }
        if parts.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, p) in parts.into_iter().enumerate() {
            if i > 0 && !(p.starts_with('-') || p.starts_with('−')) {
                out.push('+');
            }
            out.push_str(&p);
        }
        out
    }
}

impl Index<usize> for FrameVector {
    type Output = Polynomial;
    fn index(&self, i: usize) -> &Polynomial {
        &self.0[i]
    }
}

impl Add for &FrameVector {
    type Output = FrameVector;
    fn add(self, rhs: &FrameVector) -> FrameVector {
        FrameVector(std::array::from_fn(|i| &self.0[i] + &rhs.0[i]))
    }
}

impl Sub for &FrameVector {
    type Output = FrameVector;
    fn sub(self, rhs: &FrameVector) -> FrameVector {
        FrameVector(std::array::from_fn(|i| &self.0[i] - &rhs.0[i]))
    }
}

impl Neg for &FrameVector {
    type Output = FrameVector;
    fn neg(self) -> FrameVector {
        FrameVector(std::array::from_fn(|i| -&self.0[i]))
    }
}

impl fmt::Display for FrameVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Style::Ascii))
    }
}

/// Diagonal of the Gram matrix of the frame: `e3` is timelike.
pub const SIGNATURE: [i64; 3] = [1, 1, -1];

/// The Lorentzian metric `g(X,Y) = X1 Y1 + X2 Y2 - X3 Y3`.
pub fn metric(x: &FrameVector, y: &FrameVector) -> Polynomial {
    let mut out = Polynomial::zero();
    for (i, &s) in SIGNATURE.iter().enumerate() {
        out = out + (&x.0[i] * &y.0[i]).scale(&rat(s, 1));
    }
    out
}

/// Equalities required to vanish and inequations required to be nonzero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintSet {
    /// Polynomials required to be zero.
    pub equalities: Vec<Polynomial>,
    /// Polynomials required to be nonzero.
    pub inequations: Vec<Polynomial>,
}

impl ConstraintSet {
    /// Adds an equality unless it is already present.
    pub fn push_equality(&mut self, p: Polynomial) {
        if !self.equalities.contains(&p) {
            self.equalities.push(p);
        }
    }

    /// Adds an inequation unless it is already present.
    pub fn push_inequation(&mut self, p: Polynomial) {
        if !self.inequations.contains(&p) {
            self.inequations.push(p);
        }
    }

    /// Checks a point, returning a description of the first violated constraint.
    pub fn check_point(&self, p: &Point) -> Result<(), String> {
        for e in &self.equalities {
            if !e.eval(p).is_zero() {
                return Err(format!("{e} = 0"));
            }
        }
        for q in &self.inequations {
            if q.eval(p).is_zero() {
                return Err(format!("{q} != 0"));
            }
        }
        Ok(())
    }

    /// True when the point satisfies every constraint.
    pub fn admits(&self, p: &Point) -> bool {
        self.check_point(p).is_ok()
    }
}

/// A Lie algebra on the Lorentzian frame, symbolic or at a rational point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    family: Option<Family>,
    eta: Option<Eta>,
    structure: [[FrameVector; 3]; 3],
    constraints: ConstraintSet,
    point: Option<Point>,
}

fn p(s: &str) -> Polynomial {
    Polynomial::parse(s).expect("built-in polynomial")
}

fn v(c: [&str; 3]) -> FrameVector {
    FrameVector::parse(c).expect("built-in vector")
}

fn full_structure(c12: FrameVector, c13: FrameVector, c23: FrameVector) -> [[FrameVector; 3]; 3] {
    let z = FrameVector::zero;
    [[z(), c12.clone(), c13.clone()], [-&c12, z(), c23.clone()], [-&c13, -&c23, z()]]
}

impl LieAlgebra {
    /// Instantiates a family symbolically, or at `numeric` when given.
    ///
    /// `eta` must be supplied exactly when `family` is G4. A numeric
    /// instance is checked against every equality and inequation.
    pub fn make_group(family: Family, eta: Option<Eta>, numeric: Option<&Point>) -> Result<Self, LieError> {
        match (family.uses_eta(), eta) {
            (true, None) => return Err(LieError::MissingEta),
            (false, Some(_)) => return Err(LieError::UnexpectedEta(family)),
            _ => {}
        }
        let mut cs = ConstraintSet::default();
        let (c12, c13, c23) = match family {
            Family::G1 => {
                cs.push_inequation(p("a"));
                (v(["a", "0", "-b"]), v(["-a", "-b", "0"]), v(["b", "a", "a"]))
            }
            Family::G2 => {
                cs.push_inequation(p("g"));
                (v(["0", "g", "-b"]), v(["0", "-b", "-g"]), v(["a", "0", "0"]))
            }
            Family::G3 => (v(["0", "0", "-g"]), v(["0", "-b", "0"]), v(["a", "0", "0"])),
            Family::G4 => {
                let e = eta.expect("checked above").poly();
                let c12 = FrameVector::new(Polynomial::zero(), Polynomial::int(-1), e.scale(&rat(2, 1)) - p("b"));
                (c12, v(["0", "-b", "1"]), v(["a", "0", "0"]))
            }
            Family::G5 => {
                cs.push_equality(p("a*g+b*d"));
                cs.push_inequation(p("a+d"));
                (v(["0", "0", "0"]), v(["a", "b", "0"]), v(["g", "d", "0"]))
            }
            Family::G6 => {
                cs.push_equality(p("a*g-b*d"));
                cs.push_inequation(p("a+d"));
                (v(["0", "a", "b"]), v(["0", "g", "d"]), v(["0", "0", "0"]))
            }
            Family::G7 => {
                cs.push_equality(p("a*g"));
                cs.push_inequation(p("a+d"));
                (v(["-a", "-b", "-b"]), v(["a", "b", "b"]), v(["g", "d", "d"]))
            }
        };
        let symbolic = LieAlgebra {
            family: Some(family),
            eta,
            structure: full_structure(c12, c13, c23),
            constraints: cs,
            point: None,
        };
        match numeric {
            None => Ok(symbolic),
            Some(pt) => symbolic.at_point(pt),
        }
    }

    /// Numeric instance at `pt`, checked against the constraints.
    pub fn at_point(&self, pt: &Point) -> Result<Self, LieError> {
        self.constraints.check_point(pt).map_err(LieError::ConstraintViolation)?;
        let a = pt.to_assignment();
        let structure = std::array::from_fn(|i| std::array::from_fn(|j| self.structure[i][j].substitute(&a)));
        Ok(LieAlgebra {
            family: self.family,
            eta: self.eta,
            structure,
            constraints: ConstraintSet::default(),
            point: Some(pt.clone()),
        })
    }

    /// Algebra from raw structure constants `[e1,e2]`, `[e1,e3]`, `[e2,e3]`, for tests.
    #[doc(hidden)]
    pub fn from_structure_constants(c12: FrameVector, c13: FrameVector, c23: FrameVector) -> Self {
        LieAlgebra {
            family: None,
            eta: None,
            structure: full_structure(c12, c13, c23),
            constraints: ConstraintSet::default(),
            point: None,
        }
    }

    /// The abelian algebra, for tests.
    #[doc(hidden)]
    pub fn abelian() -> Self {
        LieAlgebra::from_structure_constants(FrameVector::zero(), FrameVector::zero(), FrameVector::zero())
    }

    /// Family tag, `None` for raw test algebras.
    pub fn family(&self) -> Option<Family> {
        self.family
    }

    /// Sign of G4.
    pub fn eta(&self) -> Option<Eta> {
        self.eta
    }

    /// Constraint set carried by a symbolic algebra.
    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }

    /// The rational point of a numeric instance.
    pub fn point(&self) -> Option<&Point> {
        self.point.as_ref()
    }

    /// `[e_{i+1}, e_{j+1}]`.
    pub fn structure(&self, i: usize, j: usize) -> &FrameVector {
        &self.structure[i][j]
    }

    /// Variables occurring in the structure constants.
    pub fn parameters(&self) -> Vec<Var> {
        Var::ALL
            .into_iter()
            .filter(|v| self.structure.iter().flatten().any(|fv| fv.0.iter().any(|c| c.variables().contains(v))))
            .collect()
    }

    /// Bilinear extension of the structure constants.
    pub fn bracket(&self, x: &FrameVector, y: &FrameVector) -> FrameVector {
        let mut out = FrameVector::zero();
        for i in 0..3 {
            if x.0[i].is_zero() {
                continue;
            }
            for j in 0..3 {
                if y.0[j].is_zero() || i == j {
                    continue;
                }
                let coeff = &x.0[i] * &y.0[j];
                out = &out + &self.structure[i][j].scale_poly(&coeff);
            }
        }
        out
    }

    /// Jacobi residuals on all basis triples, checked at sampled variety points.
    pub fn jacobi_check<R: Rng>(&self, rng: &mut R, points: usize) -> JacobiReport {
        let mut residuals = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let (x, y, z) = (FrameVector::basis(i), FrameVector::basis(j), FrameVector::basis(k));
                    let t1 = self.bracket(&x, &self.bracket(&y, &z));
                    let t2 = self.bracket(&y, &self.bracket(&z, &x));
                    let t3 = self.bracket(&z, &self.bracket(&x, &y));
                    let r = &(&t1 + &t2) + &t3;
                    if !r.is_zero() {
                        residuals.push(([i + 1, j + 1, k + 1], r));
                    }
                }
            }
        }
        let sampler = VarietySampler::new(&self.constraints, &Assignment::new(), &self.parameters());
        let mut checked = 0;
        let mut failures = Vec::new();
        for _ in 0..points {
            let Some(pt) = sampler.sample(rng, 1000) else { break };
            checked += 1;
            for (label, r) in &residuals {
                if r.eval(&pt).iter().any(|c| !c.is_zero()) {
                    failures.push((*label, pt.clone()));
                }
            }
        }
        JacobiReport {
            passed: checked == points && failures.is_empty(),
            symbolic_residuals: residuals,
            points_checked: checked,
            failures,
        }
    }

    /// Machine-readable description for listings.
    pub fn describe(&self) -> FamilyDescription {
        FamilyDescription {
            family: self.family.map(|f| f.to_string()).unwrap_or_else(|| "custom".into()),
            eta: self.eta.map(|e| e.to_string()),
            brackets: Brackets {
                e1e2: self.structure[0][1].0.iter().map(|c| c.to_string()).collect(),
                e1e3: self.structure[0][2].0.iter().map(|c| c.to_string()).collect(),
                e2e3: self.structure[1][2].0.iter().map(|c| c.to_string()).collect(),
            },
            equalities: self.constraints.equalities.iter().map(|c| c.to_string()).collect(),
            inequations: self.constraints.inequations.iter().map(|c| c.to_string()).collect(),
        }
    }
}

/// Outcome of [`LieAlgebra::jacobi_check`].
#[derive(Clone, Debug)]
pub struct JacobiReport {
    /// True when every residual vanished at every sampled point.
    pub passed: bool,
    /// Jacobi residuals that are not identically zero before using the constraints.
    pub symbolic_residuals: Vec<([usize; 3], FrameVector)>,
    /// Number of variety points evaluated.
    pub points_checked: usize,
    /// Residuals that were nonzero at some sampled point.
    pub failures: Vec<([usize; 3], Point)>,
}

/// JSON description of a family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyDescription {
    pub family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<String>,
    pub brackets: Brackets,
    pub equalities: Vec<String>,
    pub inequations: Vec<String>,
}

/// Bracket components of a family description.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Brackets {
    pub e1e2: Vec<String>,
    pub e1e3: Vec<String>,
    pub e2e3: Vec<String>,
}

/// Draws a rational with numerator in [-10, 10] and denominator in [1, 10].
pub fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    rat(rng.random_range(-10..=10), rng.random_range(1..=10))
}

/// Rational point sampler for a constraint variety, optionally restricted by
/// an assignment.
///
/// Each equality is handled by one of two rules once the assignment has been
/// applied: a single monomial is satisfied by setting one of its variables to
/// zero (chosen at random per draw), otherwise the equality is solved for a
/// variable in which it is linear, after the remaining free variables are
/// drawn. Draws with a vanishing leading coefficient are rejected, as are
/// draws violating any constraint.
#[derive(Clone, Debug)]
pub struct VarietySampler {
    constraints: ConstraintSet,
    assignment: Assignment,
    free: Vec<Var>,
    rules: Vec<Rule>,
}

#[derive(Clone, Debug)]
enum Rule {
    Branch(Vec<Var>),
    Solve(Var, Polynomial),
    Check,
}

impl VarietySampler {
    /// Builds a sampler over `params`; variables outside `params` are fixed to zero
    /// unless assigned.
    pub fn new(constraints: &ConstraintSet, assignment: &Assignment, params: &[Var]) -> Self {
        let free: Vec<Var> = params.iter().copied().filter(|v| !assignment.contains_key(v)).collect();
        let mut taken: Vec<Var> = Vec::new();
        let mut rules = Vec::new();
        for e in &constraints.equalities {
            let e = e.substitute(assignment);
            if e.is_zero() {
                continue;
            }
            let vars: Vec<Var> = e.variables().into_iter().filter(|v| free.contains(v) && !taken.contains(v)).collect();
            if e.num_terms() == 1 && !vars.is_empty() {
                rules.push(Rule::Branch(vars));
                continue;
            }
            let solve = vars.iter().rev().copied().find(|&v| e.degree_in(v) == Some(1));
            match solve {
                Some(v) => {
                    taken.push(v);
                    rules.push(Rule::Solve(v, e));
                }
                None => rules.push(Rule::Check),
            }
        }
        VarietySampler { constraints: constraints.clone(), assignment: assignment.clone(), free, rules }
    }

    /// One admissible point, or `None` after `max_attempts` rejected draws.
    pub fn sample<R: Rng>(&self, rng: &mut R, max_attempts: usize) -> Option<Point> {
        for _ in 0..max_attempts {
            if let Some(pt) = self.draw(rng) {
                return Some(pt);
            }
        }
        None
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> Option<Point> {
        let mut values: std::collections::BTreeMap<Var, Rational> = std::collections::BTreeMap::new();
        let mut zeroed: Vec<Var> = Vec::new();
        for r in &self.rules {
            if let Rule::Branch(vars) = r {
                if vars.iter().any(|v| zeroed.contains(v)) {
                    continue;
                }
                zeroed.push(vars[rng.random_range(0..vars.len())]);
            }
        }
        let solved: Vec<Var> =
            self.rules.iter().filter_map(|r| if let Rule::Solve(v, _) = r { Some(*v) } else { None }).collect();
        for &v in &self.free {
            if zeroed.contains(&v) {
                values.insert(v, Rational::zero());
            } else if !solved.contains(&v) {
                values.insert(v, random_rational(rng));
            }
        }
        for r in &self.rules {
            if let Rule::Solve(v, e) = r {
                if zeroed.contains(v) {
                    continue;
                }
                let e = e.partial_eval(&values);
                if e.variables() != vec![*v] && !e.is_zero() {
                    return None;
                }
                if e.is_zero() {
                    values.insert(*v, random_rational(rng));
                    continue;
                }
                let c1 = e.coeff_in(*v, 1).constant_value()?;
                let c0 = e.coeff_in(*v, 0).constant_value()?;
                if c1.is_zero() {
                    return None;
                }
                values.insert(*v, -c0 / c1);
            }
        }
        let base = Point(std::array::from_fn(|i| values.get(&Var::ALL[i]).cloned().unwrap_or_else(Rational::zero)));
        let mut pt = base.clone();
        for (v, poly) in &self.assignment {
            pt = pt.with(*v, poly.eval(&base));
        }
        if self.constraints.admits(&pt) {
            Some(pt)
        } else {
            None
        }
    }
}
