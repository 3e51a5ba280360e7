//! Levi-Civita, Bott, canonical and Kobayashi–Nomizu connections as
//! coefficient tables over the left-invariant frame, together with the
//! product structure `J` and its Levi-Civita derivative.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::liealg::{metric, Eta, FrameVector, LieAlgebra, LieError, SIGNATURE};
use crate::poly::{rat, Bindings, Point, Polynomial};

/// The four connections supported by the engine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConnectionKind {
    #[serde(rename = "levi-civita")]
    LeviCivita,
    #[serde(rename = "bott")]
    Bott,
    #[serde(rename = "canonical")]
    Canonical,
    #[serde(rename = "kn")]
    KobayashiNomizu,
}

impl ConnectionKind {
    /// All kinds in order.
    pub const ALL: [ConnectionKind; 4] =
        [ConnectionKind::LeviCivita, ConnectionKind::Bott, ConnectionKind::Canonical, ConnectionKind::KobayashiNomizu];

    /// The three kinds that carry classification theorems.
    pub const AUDITED: [ConnectionKind; 3] =
        [ConnectionKind::Bott, ConnectionKind::Canonical, ConnectionKind::KobayashiNomizu];

    /// Short name used on the command line and in reports.
    pub fn name(self) -> &'static str {
        match self {
            ConnectionKind::LeviCivita => "levi-civita",
            ConnectionKind::Bott => "bott",
            ConnectionKind::Canonical => "canonical",
            ConnectionKind::KobayashiNomizu => "kn",
        }
    }

    /// Single-letter superscript used in human output.
    pub fn symbol(self) -> &'static str {
        match self {
            ConnectionKind::LeviCivita => "L",
            ConnectionKind::Bott => "B",
            ConnectionKind::Canonical => "c",
            ConnectionKind::KobayashiNomizu => "k",
        }
    }
}

impl fmt::Display for ConnectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Error for an unrecognised connection name.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown connection `{0}` (expected levi-civita, bott, canonical or kn)")]
pub struct UnknownConnection(pub String);

impl FromStr for ConnectionKind {
    type Err = UnknownConnection;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "levi-civita" | "lc" | "l" => Ok(ConnectionKind::LeviCivita),
            "bott" | "b" => Ok(ConnectionKind::Bott),
            "canonical" | "c" => Ok(ConnectionKind::Canonical),
            "kn" | "k" | "kobayashi-nomizu" => Ok(ConnectionKind::KobayashiNomizu),
            _ => Err(UnknownConnection(s.to_string())),
        }
    }
}

/// The product structure `J e1 = e1`, `J e2 = e2`, `J e3 = -e3`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ProductStructure;

impl ProductStructure {
    /// Applies `J` to a vector.
    pub fn apply(self, x: &FrameVector) -> FrameVector {
        FrameVector::new(x[0].clone(), x[1].clone(), -&x[2])
    }
}

/// Projection onto `D = span{e1, e2}`.
pub fn project_d(x: &FrameVector) -> FrameVector {
    FrameVector::new(x[0].clone(), x[1].clone(), Polynomial::zero())
}

/// Projection onto `D⊥ = span{e3}`.
pub fn project_d_perp(x: &FrameVector) -> FrameVector {
    FrameVector::new(Polynomial::zero(), Polynomial::zero(), x[2].clone())
}

/// A connection given by `∇_{e_i} e_j` for every basis pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    kind: ConnectionKind,
    table: [[FrameVector; 3]; 3],
    algebra: LieAlgebra,
}

impl Connection {
    /// Builds the connection of the given kind.
    pub fn build(kind: ConnectionKind, l: &LieAlgebra) -> Connection {
        match kind {
            ConnectionKind::LeviCivita => levi_civita(l),
            ConnectionKind::Bott => bott(l),
            ConnectionKind::Canonical => canonical(l),
            ConnectionKind::KobayashiNomizu => kobayashi_nomizu(l),
        }
    }

    /// Connection from an explicit table, for tests.
    #[doc(hidden)]
    pub fn from_table(kind: ConnectionKind, table: [[FrameVector; 3]; 3], algebra: &LieAlgebra) -> Connection {
        Connection { kind, table, algebra: algebra.clone() }
    }

    /// Which connection this is.
    pub fn kind(&self) -> ConnectionKind {
        self.kind
    }

    /// The owning algebra.
    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    /// `∇_{e_{i+1}} e_{j+1}`.
    pub fn nabla(&self, i: usize, j: usize) -> &FrameVector {
        &self.table[i][j]
    }

    /// Coefficient `Γ^k_{ij}` with zero-based indices.
    pub fn gamma(&self, k: usize, i: usize, j: usize) -> &Polynomial {
        &self.table[i][j][k]
    }

    /// Bilinear extension `∇_X Y`.
    pub fn apply(&self, x: &FrameVector, y: &FrameVector) -> FrameVector {
        let mut out = FrameVector::zero();
        for i in 0..3 {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..3 {
                if y[j].is_zero() {
                    continue;
                }
                out = &out + &self.table[i][j].scale_poly(&(&x[i] * &y[j]));
            }
        }
        out
    }

    /// Symbolic table evaluated at a point of the algebra's constraint set.
    pub fn at_point(&self, pt: &Point) -> Result<Connection, LieError> {
        let algebra = self.algebra.at_point(pt)?;
        let assignment = pt.to_assignment();
        let table = std::array::from_fn(|i| std::array::from_fn(|j| self.table[i][j].substitute(&assignment)));
        Ok(Connection { kind: self.kind, table, algebra })
    }
}

/// Levi-Civita connection from the Koszul formula on left-invariant fields.
pub fn levi_civita(l: &LieAlgebra) -> Connection {
    let half = rat(1, 2);
    let table = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let comps: [Polynomial; 3] = std::array::from_fn(|k| {
                let ek = FrameVector::basis(k);
                let ei = FrameVector::basis(i);
                let ej = FrameVector::basis(j);
                let koszul =
                    metric(l.structure(i, j), &ek) - metric(l.structure(j, k), &ei) + metric(l.structure(k, i), &ej);
                koszul.scale(&(&half * rat(SIGNATURE[k], 1)))
            });
            FrameVector(comps)
        })
    });
    Connection { kind: ConnectionKind::LeviCivita, table, algebra: l.clone() }
}

/// Bott connection for the split `D = span{e1,e2}`, `D⊥ = span{e3}`.
pub fn bott(l: &LieAlgebra) -> Connection {
    let lc = levi_civita(l);
    let table = std::array::from_fn(|i| {
        std::array::from_fn(|j| match (i < 2, j < 2) {
            (true, true) => project_d(lc.nabla(i, j)),
            (false, true) => project_d(l.structure(i, j)),
            (true, false) => project_d_perp(l.structure(i, j)),
            (false, false) => project_d_perp(lc.nabla(i, j)),
        })
    });
    Connection { kind: ConnectionKind::Bott, table, algebra: l.clone() }
}

/// `(∇ᴸ_X J) Y = ∇ᴸ_X (J Y) - J ∇ᴸ_X Y` for the Levi-Civita connection `lc`.
pub fn nabla_j_with(lc: &Connection, x: &FrameVector, y: &FrameVector) -> FrameVector {
    let j = ProductStructure;
    &lc.apply(x, &j.apply(y)) - &j.apply(&lc.apply(x, y))
}

/// `(∇ᴸ_X J) Y` for the algebra `l`.
pub fn nabla_j(l: &LieAlgebra, x: &FrameVector, y: &FrameVector) -> FrameVector {
    nabla_j_with(&levi_civita(l), x, y)
}

/// Canonical connection `∇ᶜ_X Y = ∇ᴸ_X Y - ½ (∇ᴸ_X J) J Y`.
pub fn canonical(l: &LieAlgebra) -> Connection {
    let lc = levi_civita(l);
    let table = canonical_table(&lc);
    Connection { kind: ConnectionKind::Canonical, table, algebra: l.clone() }
}

fn canonical_table(lc: &Connection) -> [[FrameVector; 3]; 3] {
    let j = ProductStructure;
    let half = rat(1, 2);
    std::array::from_fn(|i| {
        std::array::from_fn(|k| {
            let (ei, ek) = (FrameVector::basis(i), FrameVector::basis(k));
            lc.nabla(i, k) - &nabla_j_with(lc, &ei, &j.apply(&ek)).scale(&half)
        })
    })
}

/// Kobayashi–Nomizu connection
/// `∇ᵏ_X Y = ∇ᶜ_X Y - ¼ [(∇ᴸ_Y J) J X - (∇ᴸ_{JY} J) X]`.
pub fn kobayashi_nomizu(l: &LieAlgebra) -> Connection {
    let lc = levi_civita(l);
    let c = canonical_table(&lc);
    let j = ProductStructure;
    let quarter = rat(1, 4);
    let table = std::array::from_fn(|i| {
        std::array::from_fn(|k| {
            let (ei, ek) = (FrameVector::basis(i), FrameVector::basis(k));
            let bracket = &nabla_j_with(&lc, &ek, &j.apply(&ei)) - &nabla_j_with(&lc, &j.apply(&ek), &ei);
            &c[i][k] - &bracket.scale(&quarter)
        })
    });
    Connection { kind: ConnectionKind::KobayashiNomizu, table, algebra: l.clone() }
}

/// Abbreviations used in the canonical and Kobayashi–Nomizu tables of G3 and G4.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedConstants {
    pub m1: Polynomial,
    pub m2: Polynomial,
    pub m3: Polynomial,
    pub n1: Polynomial,
    pub n2: Polynomial,
    pub n3: Polynomial,
}

impl DerivedConstants {
    /// The six constants for the given sign.
    pub fn new(eta: Eta) -> DerivedConstants {
        let p = |s: &str| Polynomial::parse_with(s, &Bindings::new().bind("eta", eta.poly())).expect("built-in");
        DerivedConstants {
            m1: p("(a-b-g)/2"),
            m2: p("(a-b+g)/2"),
            m3: p("(a+b-g)/2"),
            n1: p("a/2+eta-b"),
            n2: p("a/2-eta"),
            n3: p("a/2+eta"),
        }
    }

    /// Parser bindings for `m1..m3`, and for `eta, n1..n3` when a sign is given.
    pub fn bindings(eta: Option<Eta>) -> Bindings {
        let c = DerivedConstants::new(eta.unwrap_or(Eta::Plus));
        let b = Bindings::new().bind("m1", c.m1).bind("m2", c.m2).bind("m3", c.m3);
        match eta {
            Some(e) => b.bind("eta", e.poly()).bind("n1", c.n1).bind("n2", c.n2).bind("n3", c.n3),
            None => b,
        }
    }
}
