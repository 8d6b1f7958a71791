//! Graded Poisson brackets of degree `k = −n` on split graded manifolds, their
//! compatibility with `Q`, the map `♯` and the symplectic case.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adjoint::{adjoint_basis, mu_inverse, mu_nabla, TmConnections};
use crate::dgmod::{dual_basis, ComponentTable};
use crate::gca::{AlgebraElement, Derivation, Gens, Slot};
use crate::lie2::{split_gens, SplitLie2Data};
use crate::linalg::{self, Matrix};
use crate::report::CheckReport;
use crate::scalars::{Poly, PolyVec, Rational};
use crate::weil::{build_weil_from_vf, dee_coefficients, row_basis, WeilAlgebra};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PoissonError {
    #[error("{{{a}, {b}}} has degree {found}, expected {expected}")]
    DegreeMismatch { a: String, b: String, expected: i32, found: i32 },
    #[error("bracket table is not graded skew-symmetric at ({0}, {1})")]
    NotSkew(String, String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("cannot parse bracket value: {0}")]
    Parse(String),
    #[error("not a self-dual 2-representation: {0}")]
    SelfDual(String),
}

fn koszul(a: i32, b: i32) -> bool {
    (a * b).rem_euclid(2) == 1
}

/// Bracket table on generator pairs, extended by the graded Leibniz rule.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedPoissonData {
    pub gens: Gens,
    pub degree: i32,
    table: BTreeMap<(Slot, Slot), AlgebraElement>,
}

/// One JSON bracket entry `{"a": "t1", "b": "t2", "value": "1"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketEntry {
    pub a: String,
    pub b: String,
    pub value: String,
}

impl GradedPoissonData {
    pub fn zero(gens: &Gens, degree: i32) -> Self {
        GradedPoissonData {
            gens: gens.clone(),
            degree,
            table: BTreeMap::new(),
        }
    }

    /// Entries for one ordering of each pair; the other ordering is filled in by skew-symmetry.
    pub fn new(
        gens: &Gens,
        degree: i32,
        entries: impl IntoIterator<Item = (Slot, Slot, AlgebraElement)>,
    ) -> Result<Self, PoissonError> {
        let mut p = GradedPoissonData::zero(gens, degree);
        for (a, b, v) in entries {
            p.insert(a, b, v)?;
        }
        Ok(p)
    }

    fn insert(&mut self, a: Slot, b: Slot, v: AlgebraElement) -> Result<(), PoissonError> {
        let gs = &self.gens;
        let expected = gs.slot_degree(a) + gs.slot_degree(b) + self.degree;
        if let Some(found) = v.degrees().into_iter().find(|&d| d != expected) {
            return Err(PoissonError::DegreeMismatch {
                a: gs.slot_name(a),
                b: gs.slot_name(b),
                expected,
                found,
            });
        }
        let flipped = self.skew_partner(a, b, &v);
        let clash = |t: &BTreeMap<(Slot, Slot), AlgebraElement>, key: (Slot, Slot), val: &AlgebraElement| {
            t.get(&key).is_some_and(|old| old != val)
        };
        if clash(&self.table, (a, b), &v) || clash(&self.table, (b, a), &flipped) || (a == b && flipped != v) {
            return Err(PoissonError::NotSkew(gs.slot_name(a), gs.slot_name(b)));
        }
        if !v.is_zero() {
            self.table.insert((a, b), v);
            self.table.insert((b, a), flipped);
        }
        Ok(())
    }

    /// `{b, a}` from `{a, b} = v`.
    fn skew_partner(&self, a: Slot, b: Slot, v: &AlgebraElement) -> AlgebraElement {
        let k = self.degree;
        let (da, db) = (self.gens.slot_degree(a), self.gens.slot_degree(b));
        if koszul(da + k, db + k) {
            v.clone()
        } else {
            v.neg()
        }
    }

    pub fn from_entries(gens: &Gens, degree: i32, entries: &[BracketEntry]) -> Result<Self, PoissonError> {
        let slot = |n: &str| gens.parse_slot(n).ok_or_else(|| PoissonError::UnknownGenerator(n.to_string()));
        let mut out = Vec::new();
        for e in entries {
            let v = AlgebraElement::parse(gens, &e.value).map_err(|err| PoissonError::Parse(err.to_string()))?;
            out.push((slot(&e.a)?, slot(&e.b)?, v));
        }
        GradedPoissonData::new(gens, degree, out)
    }

    /// Entries with `a ≤ b` in slot order.
    pub fn entries(&self) -> Vec<BracketEntry> {
        self.table
            .iter()
            .filter(|((a, b), _)| a <= b)
            .map(|((a, b), v)| BracketEntry {
                a: self.gens.slot_name(*a),
                b: self.gens.slot_name(*b),
                value: v.to_string(),
            })
            .collect()
    }

    pub fn get(&self, a: Slot, b: Slot) -> AlgebraElement {
        self.table.get(&(a, b)).cloned().unwrap_or_else(|| AlgebraElement::zero(&self.gens))
    }

    /// `Ham(g) = {g, ·}`, a derivation of degree `|g| + k`.
    pub fn ham(&self, g: Slot) -> Derivation {
        let mut d = Derivation::zero(&self.gens, self.gens.slot_degree(g) + self.degree);
        for h in self.gens.slots() {
            d.set(h, self.get(g, h));
        }
        d
    }

    /// `Ham(ξ)` for a homogeneous element, from `{ξ, h} = −(−1)^{(|ξ|+k)(|h|+k)}{h, ξ}`.
    pub fn ham_of(&self, xi: &AlgebraElement, degree: i32) -> Derivation {
        let k = self.degree;
        let mut d = Derivation::zero(&self.gens, degree + k);
        for h in self.gens.slots() {
            let v = self.ham(h).apply(xi);
            let flip = koszul(degree + k, self.gens.slot_degree(h) + k);
            d.set(h, if flip { v } else { v.neg() });
        }
        d
    }

    /// `{ξ, η}` for arbitrary elements.
    pub fn bracket(&self, xi: &AlgebraElement, eta: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero(&self.gens);
        for (deg, part) in xi.homogeneous_parts() {
            out = out.add(&self.ham_of(&part, deg).apply(eta));
        }
        out
    }

    fn slot_elem(&self, s: Slot) -> AlgebraElement {
        AlgebraElement::slot(&self.gens, s)
    }
}

/// Graded skew-symmetry, degrees and Jacobi on all generator triples.
pub fn poisson_axioms_check(p: &GradedPoissonData) -> CheckReport {
    let gs = &p.gens;
    let k = p.degree;
    let slots = gs.slots();
    let mut rep = CheckReport::new("poisson");
    let mut skew = Vec::new();
    let mut degree = Vec::new();
    for &a in &slots {
        for &b in &slots {
            let v = p.get(a, b);
            if p.skew_partner(a, b, &v) != p.get(b, a) {
                skew.push(format!("({}, {})", gs.slot_name(a), gs.slot_name(b)));
            }
            let want = gs.slot_degree(a) + gs.slot_degree(b) + k;
            if v.degrees().into_iter().any(|d| d != want) {
                degree.push(format!("({}, {}): {v}", gs.slot_name(a), gs.slot_name(b)));
            }
        }
    }
    rep.clause("skew", skew);
    rep.clause("degree", degree);
    let mut jac = Vec::new();
    for &a in &slots {
        for &b in &slots {
            for &c in &slots {
                let (ea, eb, ec) = (p.slot_elem(a), p.slot_elem(b), p.slot_elem(c));
                let lhs = p.bracket(&ea, &p.bracket(&eb, &ec));
                let r1 = p.bracket(&p.bracket(&ea, &eb), &ec);
                let r2 = p.bracket(&eb, &p.bracket(&ea, &ec));
                let sign = koszul(gs.slot_degree(a) + k, gs.slot_degree(b) + k);
                let defect = if sign { lhs.sub(&r1).add(&r2) } else { lhs.sub(&r1).sub(&r2) };
                if !defect.is_zero() {
                    jac.push(format!("({}, {}, {}): {defect}", gs.slot_name(a), gs.slot_name(b), gs.slot_name(c)));
                }
            }
        }
    }
    rep.clause("jacobi", jac);
    rep
}

/// `T(g, h) = Q{g,h} − {Qg,h} − (−1)^{|g|+k}{g,Qh}` on generator pairs.
pub fn compatibility_defects(p: &GradedPoissonData, q: &Derivation) -> BTreeMap<(Slot, Slot), AlgebraElement> {
    let gs = &p.gens;
    let mut out = BTreeMap::new();
    for a in gs.slots() {
        for b in gs.slots() {
            let (ea, eb) = (p.slot_elem(a), p.slot_elem(b));
            let t1 = q.apply(&p.get(a, b));
            let t2 = p.bracket(&q.apply(&ea), &eb);
            let t3 = p.bracket(&ea, &q.apply(&eb));
            let t = if koszul(gs.slot_degree(a) + p.degree, 1) { t1.sub(&t2).add(&t3) } else { t1.sub(&t2).sub(&t3) };
            if !t.is_zero() {
                out.insert((a, b), t);
            }
        }
    }
    out
}

fn pair_witnesses(gs: &Gens, m: &BTreeMap<(Slot, Slot), AlgebraElement>) -> Vec<String> {
    m.iter()
        .map(|((a, b), v)| format!("({}, {}): {v}", gs.slot_name(*a), gs.slot_name(*b)))
        .collect()
}

pub fn compatibility_check(p: &GradedPoissonData, q: &Derivation) -> CheckReport {
    let mut rep = CheckReport::new("compatibility");
    rep.clause("q_derivation", pair_witnesses(&p.gens, &compatibility_defects(p, q)));
    rep
}

/// `♯(Σ c_g 𝐝g) = Σ (−1)^{|c_g|} c_g Ham(g)` on a Weil 1-form of total degree `form_degree`.
pub fn sharp_form(p: &GradedPoissonData, w: &WeilAlgebra, form: &AlgebraElement, form_degree: i32) -> Result<Derivation, String> {
    let coeffs = dee_coefficients(w, form)?;
    let mut out = Derivation::zero(&p.gens, form_degree - 1 + p.degree);
    for (idx, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let slot = if idx < w.m { Slot::Base(idx) } else { Slot::Gen(idx - w.m) };
        let c = w.restrict(c, &p.gens).ok_or("coefficient outside q = 0")?;
        let ham = p.ham(slot);
        for (deg, part) in c.homogeneous_parts() {
            let part = if deg.rem_euclid(2) == 1 { part.neg() } else { part };
            out = out.add(&ham.left_mul(&part));
        }
    }
    Ok(out)
}

/// `A_g = ℒ_Q(♯𝐝g) + ♯(ℒ_Q 𝐝g)` evaluated on every generator `h`.
pub fn antimorphism_defects(p: &GradedPoissonData, q: &Derivation) -> Result<BTreeMap<(Slot, Slot), AlgebraElement>, String> {
    let w = build_weil_from_vf(q);
    let gs = &p.gens;
    let mut out = BTreeMap::new();
    for g in gs.slots() {
        let dg = w.dee.apply(&w.embed(&p.slot_elem(g)));
        let lq_dg = w.lie_q.apply(&dg);
        let a = q.commutator(&p.ham(g)).add(&sharp_form(p, &w, &lq_dg, gs.slot_degree(g) + 2)?);
        for h in gs.slots() {
            let v = a.value(h);
            if !v.is_zero() {
                out.insert((g, h), v.clone());
            }
        }
    }
    Ok(out)
}

/// `♯∘ℒ_Q = −ℒ_Q∘♯` on every `𝐝g`, plus the identity `A_g(h) = T(g, h)`.
pub fn sharp_antimorphism_check(p: &GradedPoissonData, q: &Derivation) -> CheckReport {
    let mut rep = CheckReport::new("sharp_antimorphism");
    match antimorphism_defects(p, q) {
        Err(e) => {
            rep.clause("antimorphism", vec![e]);
        }
        Ok(a) => {
            let t = compatibility_defects(p, q);
            let mismatch: Vec<String> = a
                .keys()
                .chain(t.keys())
                .filter(|key| a.get(key) != t.get(key))
                .map(|(g, h)| format!("({}, {})", p.gens.slot_name(*g), p.gens.slot_name(*h)))
                .collect();
            rep.clause("antimorphism", pair_witnesses(&p.gens, &a));
            rep.clause("proof_identity", mismatch);
        }
    }
    rep
}

/// `{g, h}` on all generator pairs as a rational matrix, when every entry is constant.
pub fn sharp_matrix(p: &GradedPoissonData) -> Result<Matrix, String> {
    let slots = p.gens.slots();
    let mut m = linalg::zeros(slots.len(), slots.len());
    for (i, &a) in slots.iter().enumerate() {
        for (j, &b) in slots.iter().enumerate() {
            let v = p.get(a, b);
            if v.terms().any(|(mono, c)| !mono.is_one() || c.as_constant().is_none()) {
                return Err(format!("{{{}, {}}} = {v} is not constant", p.gens.slot_name(a), p.gens.slot_name(b)));
            }
            m[i][j] = v.body().as_constant().unwrap_or_else(Rational::zero);
        }
    }
    Ok(m)
}

/// Invertibility of `♯` on generators, and `♯∘♯⁻¹ = ♯⁻¹∘♯ = id` with `♯⁻¹` built
/// from the same bracket. Only constant brackets are in scope.
pub fn symplectic_check(p: &GradedPoissonData) -> CheckReport {
    let mut rep = CheckReport::new("symplectic");
    let slots = p.gens.slots();
    if slots.is_empty() {
        rep.clause("invertible", vec![]);
        rep.clause("sharp_squared", vec![]);
        return rep;
    }
    let m = match sharp_matrix(p) {
        Ok(m) => m,
        Err(e) => {
            rep.clause("invertible", vec![e]);
            return rep;
        }
    };
    let n = slots.len();
    let kernel: Vec<String> = linalg::nullspace(&m, n)
        .into_iter()
        .map(|v| {
            let terms: Vec<String> = v
                .iter()
                .zip(&slots)
                .filter(|(c, _)| !c.is_zero())
                .map(|(c, s)| format!("{}·𝐝{}", crate::scalars::format_rational(c), p.gens.slot_name(*s)))
                .collect();
            format!("kernel: {}", terms.join(" + "))
        })
        .collect();
    let inv = linalg::inverse(&m);
    rep.clause("invertible", kernel);
    let mut sq = Vec::new();
    if let Some(inv) = inv {
        let id = linalg::identity(n);
        if linalg::mat_mul(&m, &inv) != id {
            sq.push("♯∘♯⁻¹ ≠ id".into());
        }
        if linalg::mat_mul(&inv, &m) != id {
            sq.push("♯⁻¹∘♯ ≠ id".into());
        }
    } else {
        sq.push("♯ has no inverse".into());
    }
    rep.clause("sharp_squared", sq);
    rep
}

/// Components of `♯` from the coadjoint basis to the adjoint basis, through
/// the row identification of `𝐝τ`, `𝐝b` and `μ_∇⁻¹`.
pub fn sharp_components(p: &GradedPoissonData, d: &SplitLie2Data, tm: &TmConnections) -> Result<ComponentTable, String> {
    let q = crate::lie2::compile_homological_vf(d);
    let w = build_weil_from_vf(&q);
    let rows = row_basis(&w, d, tm);
    let mu = mu_nabla(d, tm);
    let basis = adjoint_basis(d);
    let co = dual_basis(&basis);
    let mut values = Vec::new();
    for (j, r) in rows.iter().enumerate() {
        let der = sharp_form(p, &w, r, co.degree(j) + 1)?;
        values.push(mu_inverse(d, &mu, &der));
    }
    Ok(ComponentTable::from_values(d.gens(), &co, &basis, &values))
}

/// Self-dual 2-representation of a Lie algebroid `B` on `Q*[1] ⊕ Q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfDual2RepData {
    pub nvars: usize,
    pub rq: usize,
    pub rb: usize,
    /// `anchor[ν]` = ρ_B(b_ν).
    pub anchor: Vec<PolyVec>,
    /// `bracket[ν][μ]` = [b_ν, b_μ].
    pub bracket: Vec<Vec<PolyVec>>,
    /// `partial[a][c]` = ⟨∂_Q τ^a, τ^c⟩, symmetric.
    pub partial: Vec<Vec<Poly>>,
    /// `conn[ν][a][c]`: `∇_{b_ν} τ^a = Σ_c conn[ν][a][c] τ^c`.
    pub conn: Vec<Vec<Vec<Poly>>>,
    /// `curvature[ν][μ][a][c]`: `R(b_ν, b_μ) = Σ_{a<c} curvature[ν][μ][a][c] τ^aτ^c`.
    pub curvature: Vec<Vec<Vec<Vec<Poly>>>>,
}

impl SelfDual2RepData {
    pub fn zero(nvars: usize, rq: usize, rb: usize) -> Self {
        let z = Poly::zero(nvars);
        SelfDual2RepData {
            nvars,
            rq,
            rb,
            anchor: vec![vec![z.clone(); nvars]; rb],
            bracket: vec![vec![vec![z.clone(); rb]; rb]; rb],
            partial: vec![vec![z.clone(); rq]; rq],
            conn: vec![vec![vec![z.clone(); rq]; rq]; rb],
            curvature: vec![vec![vec![vec![z; rq]; rq]; rb]; rb],
        }
    }

    fn validate(&self) -> Result<(), PoissonError> {
        let err = |s: &str| Err(PoissonError::SelfDual(s.to_string()));
        let (rq, rb) = (self.rq, self.rb);
        if self.anchor.len() != rb
            || self.bracket.len() != rb
            || self.partial.len() != rq
            || self.conn.len() != rb
            || self.curvature.len() != rb
        {
            return err("shape");
        }
        for a in 0..rq {
            for c in 0..rq {
                if self.partial[a][c] != self.partial[c][a] {
                    return err("∂_Q is not symmetric");
                }
            }
        }
        for n in 0..rb {
            for m in 0..rb {
                let neg: PolyVec = self.bracket[m][n].iter().map(|p| -p).collect();
                if self.bracket[n][m] != neg {
                    return err("bracket on B is not skew");
                }
                for a in 0..rq {
                    for c in 0..rq {
                        let r = &self.curvature[n][m][a][c];
                        if r != &-&self.curvature[m][n][a][c] || r != &-&self.curvature[n][m][c][a] {
                            return err("R is not skew in both pairs of arguments");
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Degree −2 bracket: `{b,b′} = [b,b′] − R(b,b′)`, `{b,τ} = ∇_bτ`, `{b,f} = ρ_B(b)f`, `{τ,τ′} = ⟨∂_Qτ,τ′⟩`.
pub fn poisson_from_selfdual2rep(s: &SelfDual2RepData) -> Result<GradedPoissonData, PoissonError> {
    s.validate()?;
    let gs = split_gens(s.nvars, s.rq, s.rb);
    let (rq, rb) = (s.rq, s.rb);
    let tau = |a: usize| AlgebraElement::generator(&gs, a);
    let b = |n: usize| AlgebraElement::generator(&gs, rq + n);
    let mut entries = Vec::new();
    for n in 0..rb {
        for m in n..rb {
            let mut v = AlgebraElement::zero(&gs);
            for l in 0..rb {
                v = v.add(&b(l).scale_poly(&s.bracket[n][m][l]));
            }
            for a in 0..rq {
                for c in a + 1..rq {
                    v = v.sub(&tau(a).mul(&tau(c)).scale_poly(&s.curvature[n][m][a][c]));
                }
            }
            entries.push((Slot::Gen(rq + n), Slot::Gen(rq + m), v));
        }
        for a in 0..rq {
            let mut v = AlgebraElement::zero(&gs);
            for c in 0..rq {
                v = v.add(&tau(c).scale_poly(&s.conn[n][a][c]));
            }
            entries.push((Slot::Gen(rq + n), Slot::Gen(a), v));
        }
        for i in 0..s.nvars {
            entries.push((Slot::Gen(rq + n), Slot::Base(i), AlgebraElement::from_poly(&gs, s.anchor[n][i].clone())));
        }
    }
    for a in 0..rq {
        for c in a..rq {
            entries.push((Slot::Gen(a), Slot::Gen(c), AlgebraElement::from_poly(&gs, s.partial[a][c].clone())));
        }
    }
    GradedPoissonData::new(&gs, -2, entries)
}

/// Point-base pairing bracket `{τ^a, τ^b} = P^{ab}` of degree −2.
pub fn pairing_bracket(gs: &Gens, p: &Matrix) -> Result<GradedPoissonData, PoissonError> {
    let mut entries = Vec::new();
    for (a, row) in p.iter().enumerate() {
        for (c, v) in row.iter().enumerate().skip(a) {
            entries.push((Slot::Gen(a), Slot::Gen(c), AlgebraElement::constant(gs, v.clone())));
        }
    }
    GradedPoissonData::new(gs, -2, entries)
}

pub mod fixtures {
    use super::*;
    use crate::lie2::{killing_form, so3_constants};

    /// so(3) over a point with `{τ^a, τ^b}` the inverse Killing form.
    pub fn so3_pair() -> (SplitLie2Data, GradedPoissonData) {
        let d = crate::lie2::fixtures::so3_point();
        let p = linalg::inverse(&killing_form(&so3_constants(), 3)).expect("Killing form of so(3) is nondegenerate");
        let bracket = pairing_bracket(d.gens(), &p).expect("symmetric pairing");
        (d, bracket)
    }

    /// Adds 1 to `{τ^1, τ^1}`, which breaks ad-invariance.
    pub fn so3_pair_noninvariant() -> (SplitLie2Data, GradedPoissonData) {
        let (d, _) = so3_pair();
        let mut p = linalg::inverse(&killing_form(&so3_constants(), 3)).expect("nondegenerate");
        p[0][0] += Rational::one();
        let bracket = pairing_bracket(d.gens(), &p).expect("symmetric pairing");
        (d, bracket)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie2::{aff1_constants, fixtures as lf};
    use crate::scalars::ratio;

    #[test]
    fn so3_pair_is_compatible_and_symplectic() {
        let (d, p) = fixtures::so3_pair();
        let q = crate::lie2::compile_homological_vf(&d);
        assert!(poisson_axioms_check(&p).passed());
        assert!(compatibility_check(&p, &q).passed());
        let r = sharp_antimorphism_check(&p, &q);
        assert!(r.passed(), "{:?}", r);
        assert!(symplectic_check(&p).passed());
        let m = sharp_matrix(&p).unwrap();
        assert_eq!(m[0][0], ratio(-1, 2));
    }

    #[test]
    fn noninvariant_pairing_fails_on_same_witnesses() {
        let (d, p) = fixtures::so3_pair_noninvariant();
        let q = crate::lie2::compile_homological_vf(&d);
        let c = compatibility_check(&p, &q);
        let a = sharp_antimorphism_check(&p, &q);
        assert!(!c.passed());
        assert!(!a.get("antimorphism").unwrap().passed);
        assert!(a.get("proof_identity").unwrap().passed);
        assert_eq!(c.get("q_derivation").unwrap().witnesses, a.get("antimorphism").unwrap().witnesses);
    }

    #[test]
    fn skew_violation_rejected() {
        let gs = split_gens(0, 2, 0);
        let one = AlgebraElement::one(&gs);
        let r = GradedPoissonData::new(&gs, -2, [(Slot::Gen(0), Slot::Gen(1), one.clone()), (Slot::Gen(1), Slot::Gen(0), one.neg())]);
        assert!(matches!(r, Err(PoissonError::NotSkew(_, _))));
        let r = GradedPoissonData::new(&gs, -2, [(Slot::Gen(0), Slot::Gen(1), AlgebraElement::generator(&gs, 0))]);
        assert!(matches!(r, Err(PoissonError::DegreeMismatch { .. })));
    }

    #[test]
    fn degenerate_pairing_is_not_symplectic() {
        let gs = split_gens(0, 2, 0);
        let p = pairing_bracket(&gs, &vec![vec![Rational::one(), Rational::zero()], vec![Rational::zero(), Rational::zero()]]).unwrap();
        let r = symplectic_check(&p);
        let w = &r.get("invertible").unwrap().witnesses;
        assert_eq!(w, &vec!["kernel: 1·𝐝t2".to_string()]);
        assert!(!symplectic_check(&GradedPoissonData::zero(&gs, -2)).passed());
    }

    #[test]
    fn zero_bracket_everywhere() {
        let d = lf::string_so3();
        let q = crate::lie2::compile_homological_vf(&d);
        let p = GradedPoissonData::zero(d.gens(), -2);
        assert!(poisson_axioms_check(&p).passed());
        assert!(compatibility_check(&p, &q).passed());
        assert!(sharp_antimorphism_check(&p, &q).passed());
        let z = poisson_from_selfdual2rep(&SelfDual2RepData::zero(0, 2, 1)).unwrap();
        assert_eq!(z.entries(), vec![]);
    }

    #[test]
    fn so3_pair_from_selfdual_rep() {
        let (_, p) = fixtures::so3_pair();
        let mut s = SelfDual2RepData::zero(0, 3, 0);
        for a in 0..3 {
            s.partial[a][a] = Poly::constant(0, ratio(-1, 2));
        }
        assert_eq!(poisson_from_selfdual2rep(&s).unwrap(), p);
    }

    fn aff1_on_line(partial: i64, weight: i64) -> SelfDual2RepData {
        // B = aff(1) with [b1, b2] = b2, acting on rank-1 Q by ∇_{b1}τ = weight·τ.
        let c = aff1_constants();
        let mut s = SelfDual2RepData::zero(0, 1, 2);
        for n in 0..2 {
            for m in 0..2 {
                let mut e1 = vec![Rational::zero(); 2];
                let mut e2 = vec![Rational::zero(); 2];
                e1[n] = Rational::one();
                e2[m] = Rational::one();
                s.bracket[n][m] = crate::lie2::lie_bracket(&c, 2, &e1, &e2).into_iter().map(|r| Poly::constant(0, r)).collect();
            }
        }
        s.partial[0][0] = Poly::int(0, partial);
        s.conn[0][0][0] = Poly::int(0, weight);
        s
    }

    #[test]
    fn aff1_selfdual_rep() {
        let p = poisson_from_selfdual2rep(&aff1_on_line(1, 0)).unwrap();
        let r = poisson_axioms_check(&p);
        assert!(r.passed(), "{:?}", r.failing());
        // A nonzero weight is not compatible with a nonzero symmetric ∂_Q.
        let p = poisson_from_selfdual2rep(&aff1_on_line(1, 1)).unwrap();
        assert!(!poisson_axioms_check(&p).get("jacobi").unwrap().passed);
        let p = poisson_from_selfdual2rep(&aff1_on_line(0, 1)).unwrap();
        assert!(poisson_axioms_check(&p).passed());
    }

    #[test]
    fn selfdual_rejects_asymmetric_partial() {
        let mut s = SelfDual2RepData::zero(0, 2, 0);
        s.partial[0][1] = Poly::int(0, 1);
        assert!(matches!(poisson_from_selfdual2rep(&s), Err(PoissonError::SelfDual(_))));
    }

    #[test]
    fn sharp_components_of_so3_pair() {
        let (d, p) = fixtures::so3_pair();
        let t = sharp_components(&p, &d, &TmConnections::trivial(&d)).unwrap();
        let one = t.mono(&[]);
        for (mono, mat) in &t.table {
            for (j, row) in mat.iter().enumerate() {
                for (k, v) in row.iter().enumerate() {
                    let want = if mono == &one && j == k { Poly::constant(0, ratio(-1, 2)) } else { Poly::zero(0) };
                    assert_eq!(v, &want, "{j} {k}");
                }
            }
        }
    }

    #[test]
    fn lie_bialgebra_degree_minus_one() {
        // n = 1 over a point: Q is the CE differential of aff(1); the bracket
        // {τ^a, τ^b} is a Lie bracket on aff(1)*, compatible iff it is a 1-cocycle.
        let d = lf::lie_algebra(&aff1_constants(), 2);
        let q = crate::lie2::compile_homological_vf(&d);
        let gs = d.gens();
        let zero = GradedPoissonData::new(gs, -1, [(Slot::Gen(0), Slot::Gen(1), AlgebraElement::zero(gs))]).unwrap();
        assert!(compatibility_check(&zero, &q).passed());
        for g in 0..2 {
            let p = GradedPoissonData::new(gs, -1, [(Slot::Gen(0), Slot::Gen(1), AlgebraElement::generator(gs, g))]).unwrap();
            assert!(poisson_axioms_check(&p).passed());
            let c = compatibility_check(&p, &q);
            let a = sharp_antimorphism_check(&p, &q);
            assert_eq!(c.passed(), a.get("antimorphism").unwrap().passed);
            assert!(a.get("proof_identity").unwrap().passed, "{:?}", a);
        }
    }

    #[test]
    fn sharp_components_of_selfdual_rep() {
        // Abelian B of rank 2 acting on rank-2 Q; R(b1, b2) = 3 τ1τ2.
        let mut s = SelfDual2RepData::zero(0, 2, 2);
        s.conn[0][0][0] = Poly::int(0, 1);
        s.conn[0][1][1] = Poly::int(0, 2);
        s.conn[0][0][1] = Poly::int(0, 5);
        for (n, m, sign) in [(0, 1, 3), (1, 0, -3)] {
            s.curvature[n][m][0][1] = Poly::int(0, sign);
            s.curvature[n][m][1][0] = Poly::int(0, -sign);
        }
        let p = poisson_from_selfdual2rep(&s).unwrap();
        assert!(poisson_axioms_check(&p).passed());
        let d = SplitLie2Data::zero(0, 2, 2);
        let t = sharp_components(&p, &d, &TmConnections::trivial(&d)).unwrap();
        let (q, beta) = (|a: usize| a, |n: usize| 2 + n);
        for n in 0..2 {
            for a in 0..2 {
                let mat = t.get(&t.mono(&[d.tau(a)]));
                for c in 0..2 {
                    // ♯₁(q_a)b_ν = −∇^Q_{b_ν} q_a with ∇^Q dual to ∇^{Q*}.
                    assert_eq!(mat[beta(n)][q(c)], s.conn[n][c][a]);
                }
            }
            let mat = t.get(&t.mono(&[d.tau(0), d.tau(1)]));
            for m in 0..2 {
                // ♯₂(q1, q2)b_ν paired with b_μ is −⟨R(b_ν, b_μ)q1, q2⟩.
                assert_eq!(mat[beta(n)][beta(m)], -&s.curvature[n][m][0][1]);
            }
        }
    }
}
