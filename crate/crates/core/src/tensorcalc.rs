//! Curvature, Ricci, symmetrized Ricci, covariant derivatives of
//! (0,2)-tensors and torsion computed from a connection, plus uniform
//! text and JSON rendering of every computed table.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::connection::{Connection, ConnectionKind};
use crate::liealg::{metric, FrameVector, LieAlgebra};
use crate::poly::{rat, Assignment, Polynomial, Style};

/// `R(e_i, e_j) e_k` for all basis triples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Curvature {
    r: [[[FrameVector; 3]; 3]; 3],
}

impl Curvature {
    /// `R(e_{i+1}, e_{j+1}) e_{k+1}`.
    pub fn get(&self, i: usize, j: usize, k: usize) -> &FrameVector {
        &self.r[i][j][k]
    }

    /// Component-wise substitution.
    pub fn substitute(&self, a: &Assignment) -> Curvature {
        Curvature {
            r: std::array::from_fn(|i| std::array::from_fn(|j| std::array::from_fn(|k| self.r[i][j][k].substitute(a)))),
        }
    }
}

/// A (0,2)-tensor `ω(e_i, e_j)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tensor02 {
    w: [[Polynomial; 3]; 3],
}

impl Tensor02 {
    /// Tensor from its component matrix.
    pub fn new(w: [[Polynomial; 3]; 3]) -> Tensor02 {
        Tensor02 { w }
    }

    /// `ω(e_{i+1}, e_{j+1})`.
    pub fn get(&self, i: usize, j: usize) -> &Polynomial {
        &self.w[i][j]
    }

    /// Bilinear extension `ω(X, Y)`.
    pub fn apply(&self, x: &FrameVector, y: &FrameVector) -> Polynomial {
        let mut out = Polynomial::zero();
        for i in 0..3 {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..3 {
                if y[j].is_zero() || self.w[i][j].is_zero() {
                    continue;
                }
                out = out + &(&x[i] * &y[j]) * &self.w[i][j];
            }
        }
        out
    }

    /// True when `ω(e_i,e_j) = ω(e_j,e_i)` identically.
    pub fn is_symmetric(&self) -> bool {
        (0..3).all(|i| (0..3).all(|j| self.w[i][j] == self.w[j][i]))
    }

    /// True when every component vanishes.
    pub fn is_zero(&self) -> bool {
        self.w.iter().flatten().all(Polynomial::is_zero)
    }

    /// Component-wise substitution.
    pub fn substitute(&self, a: &Assignment) -> Tensor02 {
        Tensor02 { w: std::array::from_fn(|i| std::array::from_fn(|j| self.w[i][j].substitute(a))) }
    }
}

/// A (0,3)-tensor `(∇_{e_i} ω)(e_j, e_k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor03 {
    d: [[[Polynomial; 3]; 3]; 3],
}

impl Tensor03 {
    /// `(∇_{e_{i+1}} ω)(e_{j+1}, e_{k+1})`.
    pub fn get(&self, i: usize, j: usize, k: usize) -> &Polynomial {
        &self.d[i][j][k]
    }

    /// Component-wise substitution.
    pub fn substitute(&self, a: &Assignment) -> Tensor03 {
        Tensor03 {
            d: std::array::from_fn(|i| std::array::from_fn(|j| std::array::from_fn(|k| self.d[i][j][k].substitute(a)))),
        }
    }
}

/// Torsion `T(e_i, e_j)` for all basis pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionTensor {
    t: [[FrameVector; 3]; 3],
}

impl TorsionTensor {
    /// `T(e_{i+1}, e_{j+1})`.
    pub fn get(&self, i: usize, j: usize) -> &FrameVector {
        &self.t[i][j]
    }

    /// Bilinear extension `T(X, Y)`.
    pub fn apply(&self, x: &FrameVector, y: &FrameVector) -> FrameVector {
        let mut out = FrameVector::zero();
        for i in 0..3 {
            for j in 0..3 {
                if x[i].is_zero() || y[j].is_zero() {
                    continue;
                }
                out = &out + &self.t[i][j].scale_poly(&(&x[i] * &y[j]));
            }
        }
        out
    }

    /// True when every component vanishes.
    pub fn is_zero(&self) -> bool {
        self.t.iter().flatten().all(FrameVector::is_zero)
    }

    /// Component-wise substitution.
    pub fn substitute(&self, a: &Assignment) -> TorsionTensor {
        TorsionTensor { t: std::array::from_fn(|i| std::array::from_fn(|j| self.t[i][j].substitute(a))) }
    }
}

/// `R(X,Y)Z = ∇_X ∇_Y Z - ∇_Y ∇_X Z - ∇_{[X,Y]} Z` on basis triples.
pub fn curvature(c: &Connection) -> Curvature {
    let l = c.algebra();
    let r = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            std::array::from_fn(|k| {
                if i == j {
                    return FrameVector::zero();
                }
                let (ei, ej) = (FrameVector::basis(i), FrameVector::basis(j));
                let a = c.apply(&ei, c.nabla(j, k));
                let b = c.apply(&ej, c.nabla(i, k));
                let br = c.apply(l.structure(i, j), &FrameVector::basis(k));
                &(&a - &b) - &br
            })
        })
    });
    Curvature { r }
}

/// `ρ(X,Y) = -g(R(X,e1)Y,e1) - g(R(X,e2)Y,e2) + g(R(X,e3)Y,e3)`.
pub fn ricci(r: &Curvature) -> Tensor02 {
    let w = std::array::from_fn(|x| {
        std::array::from_fn(|y| {
            let mut out = Polynomial::zero();
            for k in 0..3 {
                let term = metric(r.get(x, k, y), &FrameVector::basis(k));
                out = if k < 2 { out - term } else { out + term };
            }
            out
        })
    });
    Tensor02 { w }
}

/// `ρ̃(X,Y) = (ρ(X,Y) + ρ(Y,X)) / 2`.
pub fn symmetrize(rho: &Tensor02) -> Tensor02 {
    let half = rat(1, 2);
    Tensor02 { w: std::array::from_fn(|i| std::array::from_fn(|j| (&rho.w[i][j] + &rho.w[j][i]).scale(&half))) }
}

/// `(∇_{e_i} ω)(e_j, e_k) = -ω(∇_{e_i} e_j, e_k) - ω(e_j, ∇_{e_i} e_k)` for
/// a tensor with constant frame components.
pub fn cov_deriv_02(c: &Connection, omega: &Tensor02) -> Tensor03 {
    let d = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            std::array::from_fn(|k| {
                let (ej, ek) = (FrameVector::basis(j), FrameVector::basis(k));
                -(omega.apply(c.nabla(i, j), &ek) + omega.apply(&ej, c.nabla(i, k)))
            })
        })
    });
    Tensor03 { d }
}

/// `T(X,Y) = ∇_X Y - ∇_Y X - [X,Y]` on basis pairs.
pub fn torsion(c: &Connection) -> TorsionTensor {
    let l = c.algebra();
    let t = std::array::from_fn(|i| std::array::from_fn(|j| &(c.nabla(i, j) - c.nabla(j, i)) - l.structure(i, j)));
    TorsionTensor { t }
}

/// `(∇_{e_i} g)(e_j, e_k)` for the metric, as a check on metric compatibility.
pub fn metric_derivative(c: &Connection) -> Tensor03 {
    let g = Tensor02 {
        w: std::array::from_fn(|i| std::array::from_fn(|j| metric(&FrameVector::basis(i), &FrameVector::basis(j)))),
    };
    cov_deriv_02(c, &g)
}

/// The computed objects selectable on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectKind {
    Connection,
    Curvature,
    Ricci,
    RicciSym,
    Torsion,
    NablaRicciSym,
}

impl ObjectKind {
    /// All objects in order.
    pub const ALL: [ObjectKind; 6] = [
        ObjectKind::Connection,
        ObjectKind::Curvature,
        ObjectKind::Ricci,
        ObjectKind::RicciSym,
        ObjectKind::Torsion,
        ObjectKind::NablaRicciSym,
    ];

    /// Name used on the command line and in data files.
    pub fn name(self) -> &'static str {
        match self {
            ObjectKind::Connection => "connection",
            ObjectKind::Curvature => "curvature",
            ObjectKind::Ricci => "ricci",
            ObjectKind::RicciSym => "ricci-sym",
            ObjectKind::Torsion => "torsion",
            ObjectKind::NablaRicciSym => "nabla-ricci-sym",
        }
    }

    /// Number of frame indices addressing one entry.
    pub fn arity(self) -> usize {
        match self {
            ObjectKind::Connection | ObjectKind::Ricci | ObjectKind::RicciSym | ObjectKind::Torsion => 2,
            ObjectKind::Curvature | ObjectKind::NablaRicciSym => 3,
        }
    }

    /// True when an entry is a vector, false when it is a scalar.
    pub fn is_vector_valued(self) -> bool {
        matches!(self, ObjectKind::Connection | ObjectKind::Curvature | ObjectKind::Torsion)
    }
}

impl fmt::Display for ObjectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Error for an unrecognised object name.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown object `{0}` (expected connection, curvature, ricci, ricci-sym, torsion or nabla-ricci-sym)")]
pub struct UnknownObject(pub String);

impl FromStr for ObjectKind {
    type Err = UnknownObject;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ObjectKind::ALL.into_iter().find(|o| o.name() == s.trim()).ok_or_else(|| UnknownObject(s.to_string()))
    }
}

/// One table entry: a frame vector or a scalar.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Vector(FrameVector),
    Scalar(Polynomial),
}

impl Entry {
    /// True when the entry vanishes.
    pub fn is_zero(&self) -> bool {
        match self {
            Entry::Vector(v) => v.is_zero(),
            Entry::Scalar(p) => p.is_zero(),
        }
    }

    /// Human rendering.
    pub fn render(&self, style: Style) -> String {
        match self {
            Entry::Vector(v) => v.render(style),
            Entry::Scalar(p) => p.render(style),
        }
    }
}

/// Every object derived from one connection on one algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Geometry {
    pub connection: Connection,
    pub curvature: Curvature,
    pub ricci: Tensor02,
    pub ricci_sym: Tensor02,
    pub nabla_ricci_sym: Tensor03,
    pub torsion: TorsionTensor,
}

impl Geometry {
    /// Computes all objects for `kind` on `l`.
    pub fn compute(kind: ConnectionKind, l: &LieAlgebra) -> Geometry {
        let connection = Connection::build(kind, l);
        let curvature = curvature(&connection);
        let ricci = ricci(&curvature);
        let ricci_sym = symmetrize(&ricci);
        let nabla_ricci_sym = cov_deriv_02(&connection, &ricci_sym);
        let torsion = torsion(&connection);
        Geometry { connection, curvature, ricci, ricci_sym, nabla_ricci_sym, torsion }
    }

    /// Connection kind.
    pub fn kind(&self) -> ConnectionKind {
        self.connection.kind()
    }

    /// Entry of `object` at zero-based indices.
    pub fn entry(&self, object: ObjectKind, at: &[usize]) -> Entry {
        match object {
            ObjectKind::Connection => Entry::Vector(self.connection.nabla(at[0], at[1]).clone()),
            ObjectKind::Curvature => Entry::Vector(self.curvature.get(at[0], at[1], at[2]).clone()),
            ObjectKind::Ricci => Entry::Scalar(self.ricci.get(at[0], at[1]).clone()),
            ObjectKind::RicciSym => Entry::Scalar(self.ricci_sym.get(at[0], at[1]).clone()),
            ObjectKind::Torsion => Entry::Vector(self.torsion.get(at[0], at[1]).clone()),
            ObjectKind::NablaRicciSym => Entry::Scalar(self.nabla_ricci_sym.get(at[0], at[1], at[2]).clone()),
        }
    }

    /// Index tuples listed when printing `object`: every tuple, except that
    /// antisymmetric objects list only `i < j`.
    pub fn listed_indices(object: ObjectKind) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        match object {
            ObjectKind::Connection | ObjectKind::Ricci | ObjectKind::RicciSym => {
                for i in 0..3 {
                    for j in 0..3 {
                        out.push(vec![i, j]);
                    }
                }
            }
            ObjectKind::Torsion => {
                for i in 0..3 {
                    for j in i + 1..3 {
                        out.push(vec![i, j]);
                    }
                }
            }
            ObjectKind::Curvature => {
                for i in 0..3 {
                    for j in i + 1..3 {
                        for k in 0..3 {
                            out.push(vec![i, j, k]);
                        }
                    }
                }
            }
            ObjectKind::NablaRicciSym => {
                for i in 0..3 {
                    for j in 0..3 {
                        for k in 0..3 {
                            out.push(vec![i, j, k]);
                        }
                    }
                }
            }
        }
        out
    }

    /// Human rendering of one object, one entry per line.
    pub fn render(&self, object: ObjectKind, style: Style) -> String {
        let mut out = String::new();
        for at in Geometry::listed_indices(object) {
            let lhs = entry_label(object, self.kind(), &at, style);
            out.push_str(&format!("{lhs} = {}\n", self.entry(object, &at).render(style)));
        }
        out
    }

    /// JSON rendering of one object.
    pub fn to_json(&self, object: ObjectKind) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = Geometry::listed_indices(object)
            .into_iter()
            .map(|at| {
                let label: Vec<usize> = at.iter().map(|i| i + 1).collect();
                serde_json::json!({ "at": label, "value": self.entry(object, &at) })
            })
            .collect();
        serde_json::json!({
            "connection": self.kind().name(),
            "object": object.name(),
            "entries": entries,
        })
    }
}

/// Left-hand side label such as `R^B(e1,e2)e3` or `(∇ᴮ_e₁ρ̃)(e₂,e₂)`.
pub fn entry_label(object: ObjectKind, kind: ConnectionKind, at: &[usize], style: Style) -> String {
    let u = style == Style::Unicode;
    let e = |i: usize| if u { format!("e{}", ["₁", "₂", "₃"][i]) } else { format!("e{}", i + 1) };
    let sup = if u {
        match kind {
            ConnectionKind::LeviCivita => "ᴸ",
            ConnectionKind::Bott => "ᴮ",
            ConnectionKind::Canonical => "ᶜ",
            ConnectionKind::KobayashiNomizu => "ᵏ",
        }
        .to_string()
    } else {
        format!("^{}", kind.symbol())
    };
    match object {
        ObjectKind::Connection => {
            let nabla = if u { "∇" } else { "nabla" };
            format!("{nabla}{sup}_{} {}", e(at[0]), e(at[1]))
        }
        ObjectKind::Curvature => format!("R{sup}({},{}){}", e(at[0]), e(at[1]), e(at[2])),
        ObjectKind::Ricci => format!("{}{sup}({},{})", if u { "ρ" } else { "rho" }, e(at[0]), e(at[1])),
        ObjectKind::RicciSym => format!("{}{sup}({},{})", if u { "ρ̃" } else { "rho~" }, e(at[0]), e(at[1])),
        ObjectKind::Torsion => format!("T{sup}({},{})", e(at[0]), e(at[1])),
        ObjectKind::NablaRicciSym => {
            let (nabla, rho) = if u { ("∇", "ρ̃") } else { ("nabla", "rho~") };
            format!("({nabla}{sup}_{} {rho})({},{})", e(at[0]), e(at[1]), e(at[2]))
        }
    }
}
