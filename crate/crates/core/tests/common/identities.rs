//! Symbolic identities checked against independent formulas. Each check
//! returns the number of identities verified, or a description of the first
//! failure.

use super::{all_algebras, all_cases, label, variety_points};
use liecodazzi::classify::{defect, CaseId, PolySystem, Structure};
use liecodazzi::connection::{Connection, ConnectionKind};
use liecodazzi::liealg::{metric, FrameVector, LieAlgebra};
use liecodazzi::poly::{rat, Monomial, Point, Polynomial, Rational};
use liecodazzi::tensorcalc::{curvature, metric_derivative, ricci, symmetrize, torsion, Geometry};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Outcome = Result<usize, String>;

fn e(i: usize) -> FrameVector {
    FrameVector::basis(i)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

pub fn rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=9).prop_map(|(n, d)| rat(n, d))
}

pub fn polynomial() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(([0u32..3, 0u32..3, 0u32..3, 0u32..3], rational()), 0..6)
        .prop_map(|terms| Polynomial::from_terms(terms.into_iter().map(|(e, c)| (Monomial::from_exponents(e), c))))
}

pub fn point() -> impl Strategy<Value = Point> {
    (rational(), rational(), rational(), rational()).prop_map(|(a, b, g, d)| Point::new(a, b, g, d))
}

/// Commutative ring axioms and the evaluation homomorphism on `cases` random inputs.
pub fn ring_axioms(cases: u32) -> Outcome {
    let config = ProptestConfig { cases, failure_persistence: None, ..ProptestConfig::default() };
    let mut runner = proptest::test_runner::TestRunner::new(config);
    runner
        .run(&(polynomial(), polynomial(), polynomial(), point()), |(p, q, r, x)| {
            prop_assert_eq!(&p + &q, &q + &p);
            prop_assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
            prop_assert!((&p + &(-&p)).is_zero());
            prop_assert_eq!(&p * &q, &q * &p);
            prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
            prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
            prop_assert_eq!(&p * &Polynomial::one(), p.clone());
            prop_assert_eq!(&p + &Polynomial::zero(), p.clone());
            prop_assert_eq!((&p * &q).eval(&x), p.eval(&x) * q.eval(&x));
            prop_assert_eq!((&p + &q).eval(&x), p.eval(&x) + q.eval(&x));
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok(cases as usize)
}

/// `[x,x] = 0` and `[x,y] = -[y,x]` on basis vectors of every family.
pub fn bracket_antisymmetry() -> Outcome {
    let mut n = 0;
    for l in all_algebras() {
        for i in 0..3 {
            for j in 0..3 {
                ensure(l.bracket(&e(i), &e(j)) == -&l.bracket(&e(j), &e(i)), || format!("{} [e{i},e{j}]", label(&l)))?;
                n += 1;
            }
        }
    }
    Ok(n)
}

/// Jacobi residuals vanish at `points` variety points per family.
pub fn jacobi(points: usize) -> Outcome {
    let mut n = 0;
    for (k, l) in all_algebras().into_iter().enumerate() {
        let report = l.jacobi_check(&mut ChaCha8Rng::seed_from_u64(1000 + k as u64), points);
        ensure(report.passed && report.points_checked == points, || {
            format!("{}: {} points, failures {:?}", label(&l), report.points_checked, report.failures)
        })?;
        n += report.points_checked;
    }
    Ok(n)
}

/// Levi-Civita: `∇_x y - ∇_y x = [x,y]` and `g(∇_x y, z) + g(y, ∇_x z) = 0`.
pub fn levi_civita() -> Outcome {
    let mut n = 0;
    for l in all_algebras() {
        let lc = Connection::build(ConnectionKind::LeviCivita, &l);
        for i in 0..3 {
            for j in 0..3 {
                let t = &(lc.nabla(i, j) - lc.nabla(j, i)) - &l.bracket(&e(i), &e(j));
                ensure(t.is_zero(), || format!("{} torsion at ({i},{j}) = {t}", label(&l)))?;
                for k in 0..3 {
                    let g = metric(lc.nabla(i, j), &e(k)) + metric(&e(j), lc.nabla(i, k));
                    ensure(g.is_zero(), || format!("{} (nabla_{i} g)({j},{k}) = {g}", label(&l)))?;
                    n += 1;
                }
            }
        }
        ensure(torsion(&lc).is_zero(), || format!("{} torsion tensor", label(&l)))?;
        let mg = metric_derivative(&lc);
        ensure((0..27).all(|m| mg.get(m / 9, m / 3 % 3, m % 3).is_zero()), || {
            format!("{} metric derivative", label(&l))
        })?;
    }
    Ok(n)
}

/// Curvature and torsion are antisymmetric in their first two slots, and
/// curvature equals `∇_x ∇_y z - ∇_y ∇_x z - ∇_[x,y] z`.
pub fn curvature_torsion_antisymmetry() -> Outcome {
    let mut n = 0;
    for l in all_algebras() {
        for kind in ConnectionKind::ALL {
            let c = Connection::build(kind, &l);
            let r = curvature(&c);
            let t = torsion(&c);
            for i in 0..3 {
                for j in 0..3 {
                    ensure(t.get(i, j) == &-t.get(j, i), || format!("{} {kind} T({i},{j})", label(&l)))?;
                    for k in 0..3 {
                        ensure(r.get(i, j, k) == &-r.get(j, i, k), || format!("{} {kind} R({i},{j}){k}", label(&l)))?;
                        let direct = &(&c.apply(&e(i), c.nabla(j, k)) - &c.apply(&e(j), c.nabla(i, k)))
                            - &c.apply(&l.bracket(&e(i), &e(j)), &e(k));
                        ensure(r.get(i, j, k) == &direct, || format!("{} {kind} R({i},{j}){k} formula", label(&l)))?;
                        n += 1;
                    }
                }
            }
        }
    }
    Ok(n)
}

/// The symmetrized Ricci tensor is the average of `ρ(x,y)` and `ρ(y,x)`.
pub fn symmetrized_ricci() -> Outcome {
    let mut n = 0;
    for l in all_algebras() {
        for kind in ConnectionKind::ALL {
            let rho = ricci(&curvature(&Connection::build(kind, &l)));
            let sym = symmetrize(&rho);
            for i in 0..3 {
                for j in 0..3 {
                    let avg = (rho.get(i, j) + rho.get(j, i)).scale(&rat(1, 2));
                    ensure(sym.get(i, j) == &avg && sym.get(i, j) == sym.get(j, i), || {
                        format!("{} {kind} ({i},{j})", label(&l))
                    })?;
                    n += 1;
                }
            }
        }
    }
    Ok(n)
}

/// `f` and `f~` are antisymmetric in their first two arguments.
pub fn defect_antisymmetry() -> Outcome {
    let mut n = 0;
    for l in all_algebras() {
        for kind in ConnectionKind::AUDITED {
            let geo = Geometry::compute(kind, &l);
            for structure in Structure::ALL {
                let f = defect(&geo.connection, &geo.ricci_sym, structure);
                for (a, b, j) in (0..27).map(|m| (m / 9, m / 3 % 3, m % 3)) {
                    ensure(f[a][b][j] == -&f[b][a][j], || format!("{} {kind} {structure:?} ({a},{b},{j})", label(&l)))?;
                    n += 1;
                }
            }
        }
    }
    Ok(n)
}

/// `f~ - f = ω(T(e_a,e_b), e_j)` for every audited case, with the torsion
/// rebuilt from the connection table and the bracket.
pub fn quasistat_minus_codazzi() -> Outcome {
    let mut n = 0;
    for case in all_cases().into_iter().filter(|c| c.structure == Structure::Codazzi) {
        let cod = PolySystem::for_case(case).map_err(|e| e.to_string())?;
        let qs = PolySystem::for_case(CaseId { structure: Structure::Quasistat, ..case }).map_err(|e| e.to_string())?;
        let l = LieAlgebra::make_group(case.family, case.eta, None).map_err(|e| e.to_string())?;
        let geo = Geometry::compute(case.connection, &l);
        let c = &geo.connection;
        for (x, y) in cod.entries.iter().zip(&qs.entries) {
            let [a, b, j] = x.label.map(|m| m - 1);
            let t = &(c.nabla(a, b) - c.nabla(b, a)) - &l.bracket(&e(a), &e(b));
            let term = (0..3).fold(Polynomial::zero(), |acc, k| acc + (&t.0[k] * geo.ricci_sym.get(k, j)));
            ensure(x.label == y.label && &y.value - &x.value == term, || format!("{case} {:?}", x.label))?;
            n += 1;
        }
    }
    Ok(n)
}

/// Every object computed from the numeric instance at `points` variety
/// points equals the symbolic object evaluated there.
pub fn dual_path(points: usize) -> Outcome {
    let mut n = 0;
    for (k, l) in all_algebras().into_iter().enumerate() {
        let pts = variety_points(&l, points, 500 + k as u64);
        for kind in ConnectionKind::ALL {
            let sym = Geometry::compute(kind, &l);
            for pt in &pts {
                let num = Geometry::compute(kind, &l.at_point(pt).map_err(|e| e.to_string())?);
                let asg = pt.to_assignment();
                let ctx = || format!("{} {kind} at {pt}", label(&l));
                for i in 0..3 {
                    for j in 0..3 {
                        ensure(&sym.connection.nabla(i, j).substitute(&asg) == num.connection.nabla(i, j), ctx)?;
                    }
                }
                ensure(sym.curvature.substitute(&asg) == num.curvature, ctx)?;
                ensure(sym.ricci.substitute(&asg) == num.ricci, ctx)?;
                ensure(sym.ricci_sym.substitute(&asg) == num.ricci_sym, ctx)?;
                ensure(sym.nabla_ricci_sym.substitute(&asg) == num.nabla_ricci_sym, ctx)?;
                ensure(sym.torsion.substitute(&asg) == num.torsion, ctx)?;
                n += 1;
            }
        }
    }
    Ok(n)
}
