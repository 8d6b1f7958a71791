//! DG modules over the function algebra of a split Lie 2-algebroid and
//! representations up to homotopy.
//!
//! An operator is stored by its values on basis sections and extended by
//! `𝒟(ξe) = P(ξ)e + (−1)^{d|ξ|} F(ξ) 𝒟(e)`, where `P` is an optional
//! derivation of the same degree `d` and `F` an optional algebra map.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_traits::Zero;
use thiserror::Error;

use crate::algebroid::{fmt_vec, Connection};
use crate::gca::{AlgebraElement, AlgebraMap, Basis, Derivation, GeneratorSet, Gens, ModuleElement, Monomial, SectionBasis, Slot};
use crate::lie2::{compile_homological_vf, SplitLie2Data};
use crate::linalg;
use crate::report::CheckReport;
use crate::scalars::{vec_is_zero, Poly, PolyVec, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DgError {
    #[error("component shape violation: {0}")]
    Shape(String),
    #[error("modules live over different algebras")]
    MismatchedAlgebra,
    #[error("cohomology needs a point base, got {0} base coordinates")]
    NonPointBase(usize),
    #[error("element is not Q-closed: Q(ξ) = {0}")]
    NotClosed(String),
    #[error("operator degree {0} where {1} is required")]
    Degree(i32, i32),
}

/// `(number of degree-1 factors, number of degree-2 factors)` of a monomial.
pub fn shape(gs: &GeneratorSet, m: &Monomial) -> (u32, u32) {
    (m.count_of_degree(gs, 1), m.count_of_degree(gs, 2))
}

fn slot_shape(gs: &GeneratorSet, s: Slot) -> (i64, i64) {
    match s {
        Slot::Base(_) => (0, 0),
        Slot::Gen(g) => match gs.degree(g) {
            1 => (1, 0),
            2 => (0, 1),
            _ => (0, 0),
        },
    }
}

/// Splitting of a homological vector field by the change of shape it causes.
#[derive(Clone, Debug)]
pub struct QParts {
    /// Shape change (1,0): the part acting as `d_Q` and `d_∇`.
    pub d: Derivation,
    /// Shape change (−1,1): `τ ↦ ℓ*τ`.
    pub partial: Derivation,
    /// Shape change (3,−1): `b ↦ −⟨ω,b⟩`.
    pub omega: Derivation,
    /// Anything else; zero for split structures.
    pub rest: Derivation,
}

pub fn q_parts(q: &Derivation) -> QParts {
    let gs = q.gens().clone();
    let delta = move |s: Slot, m: &Monomial| {
        let (t, b) = shape(&gs, m);
        let (t0, b0) = slot_shape(&gs, s);
        (t as i64 - t0, b as i64 - b0)
    };
    let d1 = delta.clone();
    let d2 = delta.clone();
    let d3 = delta.clone();
    QParts {
        d: q.filter_values(move |s, m| d1(s, m) == (1, 0)),
        partial: q.filter_values(move |s, m| d2(s, m) == (-1, 1)),
        omega: q.filter_values(move |s, m| d3(s, m) == (3, -1)),
        rest: q.filter_values(move |s, m| ![(1, 0), (-1, 1), (3, -1)].contains(&delta(s, m))),
    }
}

/// A degree-`degree` operator between free modules, determined by basis values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleOperator {
    pub gens: Gens,
    pub src: Basis,
    pub dst: Basis,
    pub degree: i32,
    /// Derivation part acting on coefficients (requires `src == dst`).
    pub q: Option<Derivation>,
    /// Algebra map applied to coefficients before multiplying.
    pub alg: Option<AlgebraMap>,
    pub values: Vec<ModuleElement>,
}

pub type RepOperator = ModuleOperator;

impl ModuleOperator {
    /// Operator with `𝒟(ξe) = Q(ξ)e + (−1)^{|ξ|}ξ𝒟(e)`.
    pub fn rep(q: &Derivation, basis: &Basis, values: Vec<ModuleElement>) -> Self {
        ModuleOperator {
            gens: q.gens().clone(),
            src: basis.clone(),
            dst: basis.clone(),
            degree: q.degree(),
            q: Some(q.clone()),
            alg: None,
            values,
        }
    }

    /// Left-linear map `ξe ↦ (−1)^{d|ξ|}ξ 𝒟(e)`.
    pub fn linear(gs: &Gens, src: &Basis, dst: &Basis, degree: i32, values: Vec<ModuleElement>) -> Self {
        ModuleOperator {
            gens: gs.clone(),
            src: src.clone(),
            dst: dst.clone(),
            degree,
            q: None,
            alg: None,
            values,
        }
    }

    /// `ξe ↦ P(ξ)e`.
    pub fn coefficientwise(p: &Derivation, basis: &Basis) -> Self {
        let gs = p.gens().clone();
        ModuleOperator {
            values: (0..basis.len()).map(|_| ModuleElement::zero(&gs, basis)).collect(),
            gens: gs,
            src: basis.clone(),
            dst: basis.clone(),
            degree: p.degree(),
            q: Some(p.clone()),
            alg: None,
        }
    }

    pub fn identity(gs: &Gens, basis: &Basis) -> Self {
        let values = (0..basis.len()).map(|j| ModuleElement::section(gs, basis, j)).collect();
        ModuleOperator::linear(gs, basis, basis, 0, values)
    }

    pub fn with_algebra_map(mut self, f: AlgebraMap) -> Self {
        self.alg = Some(f);
        self
    }

    pub fn apply(&self, m: &ModuleElement) -> ModuleElement {
        let gs = &self.gens;
        let mut out = ModuleElement::zero(gs, &self.dst);
        for (j, xi) in m.terms() {
            if let Some(q) = &self.q {
                let qx = q.apply(xi);
                if !qx.is_zero() {
                    out.add_term(*j, qx);
                }
            }
            for (mono, p) in xi.terms() {
                let t = AlgebraElement::term(gs, mono.clone(), p.clone());
                let t = match &self.alg {
                    Some(f) => f.apply(&t),
                    None => t,
                };
                let v = self.values[*j].left_mul(&t);
                out = if (self.degree * mono.degree(gs)).rem_euclid(2) == 1 {
                    out.sub(&v)
                } else {
                    out.add(&v)
                };
            }
        }
        out
    }

    /// Values of `self ∘ other` on the basis of `other.src`.
    pub fn after(&self, other: &ModuleOperator) -> Vec<ModuleElement> {
        other.values.iter().map(|v| self.apply(v)).collect()
    }

    /// Values of `self ∘ self` on basis sections.
    pub fn square(&self) -> Vec<ModuleElement> {
        self.after(self)
    }

    pub fn sub_values(&self, other: &ModuleOperator) -> Vec<ModuleElement> {
        self.values.iter().zip(&other.values).map(|(a, b)| a.sub(b)).collect()
    }
}

fn basis_witnesses(basis: &Basis, vals: &[ModuleElement]) -> Vec<String> {
    vals.iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(j, v)| format!("{}: {}", basis.names[j], v))
        .collect()
}

/// `𝒟(𝒟(e)) = 0` on every basis section.
pub fn d_square_check(d: &ModuleOperator) -> CheckReport {
    let mut rep = CheckReport::new("d_square");
    rep.clause("d_squared", basis_witnesses(&d.src, &d.square()));
    rep
}

/// Matrix `[j][k]` of base polynomials.
pub type PolyMat = Vec<PolyVec>;

fn zero_mat(nvars: usize, rows: usize, cols: usize) -> PolyMat {
    vec![vec![Poly::zero(nvars); cols]; rows]
}

fn mat_is_zero(m: &PolyMat) -> bool {
    m.iter().all(|r| vec_is_zero(r))
}

/// Coefficient tables of an operator or morphism:
/// `𝒟(e_j) = Σ_{m} m · Σ_k table[m][j][k] f_k` over graded monomials `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentTable {
    pub gens: Gens,
    pub src: Basis,
    pub dst: Basis,
    pub table: BTreeMap<Monomial, PolyMat>,
}

impl ComponentTable {
    pub fn new(gens: &Gens, src: &Basis, dst: &Basis) -> Self {
        ComponentTable {
            gens: gens.clone(),
            src: src.clone(),
            dst: dst.clone(),
            table: BTreeMap::new(),
        }
    }

    pub fn get(&self, m: &Monomial) -> PolyMat {
        self.table
            .get(m)
            .cloned()
            .unwrap_or_else(|| zero_mat(self.gens.nvars(), self.src.len(), self.dst.len()))
    }

    pub fn set(&mut self, m: Monomial, mat: PolyMat) {
        if mat_is_zero(&mat) {
            self.table.remove(&m);
        } else {
            self.table.insert(m, mat);
        }
    }

    pub fn add_entry(&mut self, m: &Monomial, j: usize, k: usize, p: &Poly) {
        let mut mat = self.get(m);
        mat[j][k] = &mat[j][k] + p;
        self.set(m.clone(), mat);
    }

    pub fn mono(&self, factors: &[usize]) -> Monomial {
        let mut m = Monomial::one(self.gens.len());
        for &g in factors {
            m.0[g] += 1;
        }
        m
    }

    pub fn values(&self) -> Vec<ModuleElement> {
        let gs = &self.gens;
        (0..self.src.len())
            .map(|j| {
                let mut v = ModuleElement::zero(gs, &self.dst);
                for (m, mat) in &self.table {
                    for (k, p) in mat[j].iter().enumerate() {
                        if !p.is_zero() {
                            v.add_term(k, AlgebraElement::term(gs, m.clone(), p.clone()));
                        }
                    }
                }
                v
            })
            .collect()
    }

    pub fn from_values(gs: &Gens, src: &Basis, dst: &Basis, values: &[ModuleElement]) -> Self {
        let mut t = ComponentTable::new(gs, src, dst);
        for (j, v) in values.iter().enumerate() {
            for (k, coeff) in v.terms() {
                for (m, p) in coeff.terms() {
                    t.add_entry(m, j, *k, p);
                }
            }
        }
        t
    }

    /// Entries whose shape or degree is not allowed.
    fn violations(&self, allowed: &[(u32, u32)], degree: i32) -> Vec<String> {
        let gs = &self.gens;
        let mut out = Vec::new();
        for (m, mat) in &self.table {
            let sh = shape(gs, m);
            for (j, row) in mat.iter().enumerate() {
                for (k, p) in row.iter().enumerate() {
                    if p.is_zero() {
                        continue;
                    }
                    let deg_ok = m.degree(gs) + self.dst.degree(k) == self.src.degree(j) + degree;
                    if !allowed.contains(&sh) || !deg_ok {
                        out.push(format!(
                            "{} ↦ ({})·{}{}",
                            self.src.names[j],
                            p,
                            AlgebraElement::monomial_string(gs, m),
                            self.dst.names[k]
                        ));
                    }
                }
            }
        }
        out
    }
}

/// Shapes of the components `∂, ∇, ω₂, ω₃, φ₀, φ₁`.
pub const REP3_SHAPES: [(u32, u32); 6] = [(0, 0), (1, 0), (2, 0), (3, 0), (0, 1), (1, 1)];
/// Shapes of the morphism components `μ₀, μ₁, μ₂, μᵇ`.
pub const MORPHISM_SHAPES: [(u32, u32); 4] = [(0, 0), (1, 0), (2, 0), (0, 1)];

/// Component form of a 3-term representation up to homotopy.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rep3Data {
    pub q: Derivation,
    pub rq: usize,
    pub rb: usize,
    pub components: ComponentTable,
}

impl Rep3Data {
    pub fn zero(d: &SplitLie2Data, basis: &Basis) -> Self {
        Rep3Data {
            q: compile_homological_vf(d),
            rq: d.rq(),
            rb: d.rb,
            components: ComponentTable::new(d.gens(), basis, basis),
        }
    }

    pub fn basis(&self) -> &Basis {
        &self.components.src
    }

    pub fn partial(&self) -> PolyMat {
        self.components.get(&self.components.mono(&[]))
    }

    /// `∇_{q_a}` as a matrix `[j][k]`.
    pub fn nabla(&self, a: usize) -> PolyMat {
        self.components.get(&self.components.mono(&[a]))
    }

    pub fn omega2(&self, a: usize, b: usize) -> PolyMat {
        self.components.get(&self.components.mono(&[a, b]))
    }

    pub fn omega3(&self, a: usize, b: usize, c: usize) -> PolyMat {
        self.components.get(&self.components.mono(&[a, b, c]))
    }

    pub fn phi0(&self, mu: usize) -> PolyMat {
        self.components.get(&self.components.mono(&[self.rq + mu]))
    }

    pub fn phi1(&self, mu: usize, a: usize) -> PolyMat {
        self.components.get(&self.components.mono(&[a, self.rq + mu]))
    }

    /// Component at a given coefficient shape, as a linear operator.
    fn shape_operator(&self, sh: (u32, u32)) -> ModuleOperator {
        let gs = &self.components.gens;
        let mut t = ComponentTable::new(gs, self.basis(), self.basis());
        for (m, mat) in &self.components.table {
            if shape(gs, m) == sh {
                t.set(m.clone(), mat.clone());
            }
        }
        ModuleOperator::linear(gs, self.basis(), self.basis(), 1, t.values())
    }
}

pub fn operator_from_components(c: &Rep3Data) -> ModuleOperator {
    ModuleOperator::rep(&c.q, c.basis(), c.components.values())
}

pub fn components_from_operator(op: &ModuleOperator, rq: usize, rb: usize) -> Result<Rep3Data, DgError> {
    let q = op.q.clone().ok_or(DgError::Shape("operator has no derivation part".into()))?;
    if op.degree != 1 {
        return Err(DgError::Degree(op.degree, 1));
    }
    let components = ComponentTable::from_values(&op.gens, &op.src, &op.dst, &op.values);
    let bad = components.violations(&REP3_SHAPES, 1);
    if !bad.is_empty() {
        return Err(DgError::Shape(bad.join("; ")));
    }
    Ok(Rep3Data { q, rq, rb, components })
}

/// Equations of a 3-term representation, each the sum of the component
/// compositions landing in one coefficient shape of `𝒟²`.
pub fn rep3_check(c: &Rep3Data) -> CheckReport {
    let basis = c.basis().clone();
    let gs = c.components.gens.clone();
    let parts = q_parts(&c.q);
    let p = c.shape_operator((0, 0));
    let w2 = c.shape_operator((2, 0));
    let w3 = c.shape_operator((3, 0));
    let f0 = c.shape_operator((0, 1));
    let f1 = c.shape_operator((1, 1));
    let mut conn = c.shape_operator((1, 0));
    conn.q = Some(parts.d.clone());
    let kp = ModuleOperator::coefficientwise(&parts.partial, &basis);
    let kw = ModuleOperator::coefficientwise(&parts.omega, &basis);

    let zero = || vec![ModuleElement::zero(&gs, &basis); basis.len()];
    let sum = |pairs: &[(&ModuleOperator, &ModuleOperator)]| {
        let mut acc = zero();
        for (y, x) in pairs {
            for (a, v) in acc.iter_mut().zip(y.after(x)) {
                *a = a.add(&v);
            }
        }
        acc
    };
    let equations: Vec<(&str, Vec<ModuleElement>)> = vec![
        ("complex", sum(&[(&p, &p)])),
        ("chain", sum(&[(&p, &conn), (&conn, &p)])),
        ("1", sum(&[(&p, &w2), (&conn, &conn), (&w2, &p)])),
        ("2", sum(&[(&p, &f0), (&kp, &conn), (&f0, &p)])),
        ("3", sum(&[(&p, &w3), (&conn, &w2), (&w2, &conn), (&w3, &p), (&kw, &f0)])),
        ("4", sum(&[(&conn, &f0), (&f0, &conn), (&p, &f1), (&f1, &p), (&kp, &w2)])),
        ("5", sum(&[(&conn, &w3), (&w3, &conn), (&w2, &w2), (&kw, &f1)])),
        ("6", sum(&[(&conn, &f1), (&f1, &conn), (&w2, &f0), (&f0, &w2), (&kp, &w3)])),
        ("7", sum(&[(&f0, &f0), (&kp, &f1)])),
    ];
    let mut residual = operator_from_components(c).square();
    for (_, vals) in &equations {
        for (r, v) in residual.iter_mut().zip(vals) {
            *r = r.sub(v);
        }
    }
    let mut rep = CheckReport::new("rep3");
    for (id, vals) in equations {
        rep.clause(id, basis_witnesses(&basis, &vals));
    }
    rep.clause("residual", basis_witnesses(&basis, &residual));
    rep
}

/// Trivial line module `𝒟 = Q` on functions.
pub fn trivial_line(q: &Derivation) -> ModuleOperator {
    let basis = SectionBasis::new(vec!["1".into()], vec![0]);
    ModuleOperator::rep(q, &basis, vec![ModuleElement::zero(q.gens(), &basis)])
}

/// Module of a Q-connection on an ungraded bundle `E = E₀`.
pub fn connection_module(d: &SplitLie2Data, conn: &Connection, names: Vec<String>) -> ModuleOperator {
    let gs = d.gens();
    let n = conn.target_rank;
    let basis = SectionBasis::new(names, vec![0; n]);
    let values = (0..n)
        .map(|j| {
            let mut v = ModuleElement::zero(gs, &basis);
            for a in 0..d.rq() {
                for k in 0..n {
                    let p = &conn.gamma[a][j][k];
                    if !p.is_zero() {
                        v.add_term(k, AlgebraElement::term(gs, Monomial::single(gs.len(), d.tau(a)), p.clone()));
                    }
                }
            }
            v
        })
        .collect();
    ModuleOperator::rep(&compile_homological_vf(d), &basis, values)
}

/// 1-term representation: `∇` flat and `∇_{ℓ(β)} = 0`.
pub fn rep1_check(d: &SplitLie2Data, conn: &Connection) -> CheckReport {
    let mut rep = CheckReport::new("rep1");
    rep.clause("flat", conn.curvature_defects());
    let mut ell = Vec::new();
    for mu in 0..d.rb {
        for j in 0..conn.target_rank {
            let e = crate::scalars::unit_vec(d.nvars(), conn.target_rank, j);
            let v = conn.covariant(&d.ell[mu], &e);
            if !vec_is_zero(&v) {
                ell.push(format!("∇_ℓ(β{}) e{} = {}", mu + 1, j + 1, fmt_vec(&v)));
            }
        }
    }
    rep.clause("ell_flat", ell);
    rep
}

/// Graded pairing `⟨Σξ_i e^i, Σζ_j e_j⟩ = Σ (−1)^{|e^i||ζ_i|} ξ_i ζ_i`.
pub fn pair(psi: &ModuleElement, eta: &ModuleElement) -> AlgebraElement {
    let gs = psi.gens().clone();
    let mut out = AlgebraElement::zero(&gs);
    for (i, xi) in psi.terms() {
        let zeta = eta.coefficient(*i);
        let odd_e = psi.basis().degree(*i).rem_euclid(2) == 1;
        for (m, p) in zeta.terms() {
            let t = AlgebraElement::term(&gs, m.clone(), p.clone());
            let prod = xi.mul(&t);
            out = if odd_e && m.degree(&gs).rem_euclid(2) == 1 {
                out.sub(&prod)
            } else {
                out.add(&prod)
            };
        }
    }
    out
}

pub fn dual_basis(b: &Basis) -> Basis {
    SectionBasis::new(
        b.names.iter().map(|n| format!("{n}*")).collect(),
        (0..b.len()).map(|i| -b.degree(i)).collect(),
    )
}

/// Dual module, characterised by `Q⟨ψ,η⟩ = ⟨𝒟ψ,η⟩ + (−1)^{|ψ|}⟨ψ,𝒟η⟩`.
pub fn dual(d: &ModuleOperator) -> ModuleOperator {
    let gs = &d.gens;
    let basis = dual_basis(&d.src);
    let n = d.src.len();
    let mut values = vec![ModuleElement::zero(gs, &basis); n];
    for (j, dj) in d.values.iter().enumerate() {
        for (i, zeta) in dj.terms() {
            let odd_e = d.src.degree(*i).rem_euclid(2) == 1;
            for (m, p) in zeta.terms() {
                let odd_z = m.degree(gs).rem_euclid(2) == 1;
                let mut coeff = AlgebraElement::term(gs, m.clone(), p.clone());
                // η_{ij} = −(−1)^{|e_i|}(−1)^{|e_i||ζ_ji|} ζ_ji
                let neg = !(odd_e ^ (odd_e && odd_z));
                if neg {
                    coeff = coeff.neg();
                }
                values[*i].add_term(j, coeff);
            }
        }
    }
    ModuleOperator {
        gens: gs.clone(),
        src: basis.clone(),
        dst: basis,
        degree: d.degree,
        q: d.q.clone(),
        alg: None,
        values,
    }
}

/// Failures of the dual pairing identity on all basis pairs.
pub fn dual_pairing_defects(d: &ModuleOperator, dd: &ModuleOperator) -> Vec<String> {
    let gs = &d.gens;
    let q = d.q.as_ref().expect("representation operator");
    let mut out = Vec::new();
    for i in 0..dd.src.len() {
        for j in 0..d.src.len() {
            let psi = ModuleElement::section(gs, &dd.src, i);
            let eta = ModuleElement::section(gs, &d.src, j);
            let v = pairing_defect(q, d, dd, &psi, &eta);
            if !v.is_zero() {
                out.push(format!("({}, {}): {}", dd.src.names[i], d.src.names[j], v));
            }
        }
    }
    out
}

/// `Q⟨ψ,η⟩ − ⟨𝒟*ψ,η⟩ − (−1)^{|ψ|}⟨ψ,𝒟η⟩` for homogeneous `ψ`.
pub fn pairing_defect(
    q: &Derivation,
    d: &ModuleOperator,
    dd: &ModuleOperator,
    psi: &ModuleElement,
    eta: &ModuleElement,
) -> AlgebraElement {
    let deg = psi.degrees().into_iter().next().unwrap_or(0);
    let lhs = q.apply(&pair(psi, eta));
    let t1 = pair(&dd.apply(psi), eta);
    let t2 = pair(psi, &d.apply(eta));
    let t2 = if deg.rem_euclid(2) == 1 { t2.neg() } else { t2 };
    lhs.sub(&t1).sub(&t2)
}

/// Product `(ξe)⊗(ζf) = (−1)^{|e||ζ|} ξζ e⊗f` into the tensor basis.
fn tensor_elems(a: &ModuleElement, b: &ModuleElement, basis: &Basis, nb: usize) -> ModuleElement {
    let gs = a.gens().clone();
    let mut out = ModuleElement::zero(&gs, basis);
    for (i, xi) in a.terms() {
        let odd_e = a.basis().degree(*i).rem_euclid(2) == 1;
        for (j, zeta) in b.terms() {
            let mut prod = AlgebraElement::zero(&gs);
            for (m, p) in zeta.terms() {
                let t = xi.mul(&AlgebraElement::term(&gs, m.clone(), p.clone()));
                prod = if odd_e && m.degree(&gs).rem_euclid(2) == 1 {
                    prod.sub(&t)
                } else {
                    prod.add(&t)
                };
            }
            out.add_term(i * nb + j, prod);
        }
    }
    out
}

pub fn tensor(d1: &ModuleOperator, d2: &ModuleOperator) -> Result<ModuleOperator, DgError> {
    if d1.gens != d2.gens || d1.q != d2.q {
        return Err(DgError::MismatchedAlgebra);
    }
    let gs = &d1.gens;
    let (b1, b2) = (&d1.src, &d2.src);
    let (n1, n2) = (b1.len(), b2.len());
    let basis = SectionBasis::new(
        (0..n1)
            .cartesian_product(0..n2)
            .map(|(i, j)| format!("{}⊗{}", b1.names[i], b2.names[j]))
            .collect(),
        (0..n1)
            .cartesian_product(0..n2)
            .map(|(i, j)| b1.degree(i) + b2.degree(j))
            .collect(),
    );
    let mut values = Vec::new();
    for i in 0..n1 {
        for j in 0..n2 {
            let e = ModuleElement::section(gs, b1, i);
            let f = ModuleElement::section(gs, b2, j);
            let mut v = tensor_elems(&d1.values[i], &f, &basis, n2);
            let right = tensor_elems(&e, &d2.values[j], &basis, n2);
            v = if b1.degree(i).rem_euclid(2) == 1 {
                v.sub(&right)
            } else {
                v.add(&right)
            };
            values.push(v);
        }
    }
    Ok(ModuleOperator {
        gens: gs.clone(),
        src: basis.clone(),
        dst: basis,
        degree: d1.degree,
        q: d1.q.clone(),
        alg: None,
        values,
    })
}

/// `Hom(E, F) = E* ⊗ F`.
pub fn hom(d1: &ModuleOperator, d2: &ModuleOperator) -> Result<ModuleOperator, DgError> {
    tensor(&dual(d1), d2)
}

/// Right tensoring with `ℝ[k]`: sections relabelled, degrees lowered by k, `𝒟[k] = 𝒟`.
pub fn shift(d: &ModuleOperator, k: i32) -> ModuleOperator {
    let basis = SectionBasis::new(
        d.src.names.iter().map(|n| shifted_name(n, k)).collect(),
        (0..d.src.len()).map(|i| d.src.degree(i) - k).collect(),
    );
    ModuleOperator {
        gens: d.gens.clone(),
        src: basis.clone(),
        dst: basis.clone(),
        degree: d.degree,
        q: d.q.clone(),
        alg: None,
        values: d.values.iter().map(|v| v.rebase(&basis)).collect(),
    }
}

fn shifted_name(n: &str, k: i32) -> String {
    let (base, old) = match n.rsplit_once('[') {
        Some((b, rest)) => match rest.trim_end_matches(']').parse::<i32>() {
            Ok(v) => (b.to_string(), v),
            Err(_) => (n.to_string(), 0),
        },
        None => (n.to_string(), 0),
    };
    match old + k {
        0 => base,
        s => format!("{base}[{s}]"),
    }
}

/// The isomorphism `e ↦ e⊗1` from `E` to `E[k]`. It shifts degrees by `−k`
/// but is right-linear, so it is applied without Koszul signs.
pub fn shift_iso(d: &ModuleOperator, shifted: &ModuleOperator) -> ModuleOperator {
    let gs = &d.gens;
    let values = (0..d.src.len()).map(|j| ModuleElement::section(gs, &shifted.src, j)).collect();
    ModuleOperator::linear(gs, &d.src, &shifted.src, 0, values)
}

pub fn direct_sum(d1: &ModuleOperator, d2: &ModuleOperator) -> Result<ModuleOperator, DgError> {
    if d1.gens != d2.gens || d1.q != d2.q {
        return Err(DgError::MismatchedAlgebra);
    }
    let n1 = d1.src.len();
    let basis = SectionBasis::new(
        d1.src.names.iter().chain(&d2.src.names).cloned().collect(),
        (0..n1).map(|i| d1.src.degree(i)).chain((0..d2.src.len()).map(|i| d2.src.degree(i))).collect(),
    );
    let gs = &d1.gens;
    let embed = |v: &ModuleElement, offset: usize| {
        let mut w = ModuleElement::zero(gs, &basis);
        for (k, c) in v.terms() {
            w.add_term(offset + k, c.clone());
        }
        w
    };
    let values = d1.values.iter().map(|v| embed(v, 0)).chain(d2.values.iter().map(|v| embed(v, n1))).collect();
    Ok(ModuleOperator {
        gens: gs.clone(),
        src: basis.clone(),
        dst: basis,
        degree: d1.degree,
        q: d1.q.clone(),
        alg: None,
        values,
    })
}

/// Graded symmetric (`antisym = false`) or exterior power of a module.
pub fn power(d: &ModuleOperator, k: usize, antisym: bool) -> ModuleOperator {
    let gs = &d.gens;
    let b = &d.src;
    let n = b.len();
    // Σ-sign of swapping adjacent sections e, f
    let swap_odd = |i: usize, j: usize| {
        let s = (b.degree(i) * b.degree(j)).rem_euclid(2) == 1;
        s ^ antisym
    };
    let allowed = |w: &[usize]| w.windows(2).all(|p| p[0] != p[1] || !swap_odd(p[0], p[0]));
    let words: Vec<Vec<usize>> = (0..n)
        .combinations_with_replacement(k)
        .filter(|w| allowed(w))
        .collect();
    let index: BTreeMap<Vec<usize>, usize> = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let sep = if antisym { "∧" } else { "⊙" };
    let basis = SectionBasis::new(
        words.iter().map(|w| w.iter().map(|&i| b.names[i].clone()).join(sep)).collect(),
        words.iter().map(|w| w.iter().map(|&i| b.degree(i)).sum()).collect(),
    );
    // Sort a word by adjacent swaps; None when it vanishes.
    let normalize = |w: &[usize]| -> Option<(bool, Vec<usize>)> {
        let mut v = w.to_vec();
        let mut neg = false;
        for i in 0..v.len() {
            for j in 0..v.len() - 1 - i {
                if v[j] > v[j + 1] {
                    if swap_odd(v[j], v[j + 1]) {
                        neg = !neg;
                    }
                    v.swap(j, j + 1);
                }
            }
        }
        allowed(&v).then_some((neg, v))
    };
    let values = words
        .iter()
        .map(|w| {
            let mut out = ModuleElement::zero(gs, &basis);
            let mut prefix_deg = 0;
            for (pos, &i) in w.iter().enumerate() {
                // e_1 … 𝒟(e_pos) … e_k with 𝒟 moved past the prefix
                let outer_neg = (d.degree * prefix_deg).rem_euclid(2) == 1;
                for (t, coeff) in d.values[i].terms() {
                    for (m, p) in coeff.terms() {
                        // move the coefficient past the prefix sections
                        let cd = m.degree(gs);
                        let mut neg = outer_neg ^ ((cd * prefix_deg).rem_euclid(2) == 1);
                        let mut word = w.to_vec();
                        word[pos] = *t;
                        let Some((sneg, sorted)) = normalize(&word) else { continue };
                        neg ^= sneg;
                        let c = AlgebraElement::term(gs, m.clone(), p.clone());
                        out.add_term(index[&sorted], if neg { c.neg() } else { c });
                    }
                }
                prefix_deg += b.degree(i);
            }
            out
        })
        .collect();
    ModuleOperator {
        gens: gs.clone(),
        src: basis.clone(),
        dst: basis,
        degree: d.degree,
        q: d.q.clone(),
        alg: None,
        values,
    }
}

/// Module constructions by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModuleKind {
    Dual,
    Tensor,
    Hom,
    Sym(usize),
    Antisym(usize),
    Shift(i32),
    DirectSum,
}

pub fn build_module(kind: ModuleKind, args: &[&ModuleOperator]) -> Result<ModuleOperator, DgError> {
    let need = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(DgError::Shape(format!("{kind:?} takes {n} modules, got {}", args.len())))
        }
    };
    match kind {
        ModuleKind::Dual => need(1).map(|_| dual(args[0])),
        ModuleKind::Tensor => need(2).and_then(|_| tensor(args[0], args[1])),
        ModuleKind::Hom => need(2).and_then(|_| hom(args[0], args[1])),
        ModuleKind::Sym(k) => need(1).map(|_| power(args[0], k, false)),
        ModuleKind::Antisym(k) => need(1).map(|_| power(args[0], k, true)),
        ModuleKind::Shift(k) => need(1).map(|_| shift(args[0], k)),
        ModuleKind::DirectSum => need(2).and_then(|_| direct_sum(args[0], args[1])),
    }
}

/// Component form of a morphism `μ = μ₀ + μ₁ + μ₂ + μᵇ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepMorphismData {
    pub components: ComponentTable,
    pub alg: Option<AlgebraMap>,
}

impl RepMorphismData {
    pub fn identity(gs: &Gens, basis: &Basis) -> Self {
        let op = ModuleOperator::identity(gs, basis);
        RepMorphismData {
            components: ComponentTable::from_values(gs, basis, basis, &op.values),
            alg: None,
        }
    }

    pub fn operator(&self) -> ModuleOperator {
        let c = &self.components;
        let mut op = ModuleOperator::linear(&c.gens, &c.src, &c.dst, 0, c.values());
        op.alg = self.alg.clone();
        op
    }

    pub fn from_operator(op: &ModuleOperator) -> Result<Self, DgError> {
        let components = ComponentTable::from_values(&op.gens, &op.src, &op.dst, &op.values);
        let bad = components.violations(&MORPHISM_SHAPES, op.degree);
        if !bad.is_empty() {
            return Err(DgError::Shape(bad.join("; ")));
        }
        Ok(RepMorphismData {
            components,
            alg: op.alg.clone(),
        })
    }

    pub fn mu(&self, factors: &[usize]) -> PolyMat {
        self.components.get(&self.components.mono(factors))
    }
}

/// `μ∘𝒟_E − 𝒟_F∘μ` grouped by coefficient shape: `1_i` at `(i,0)`,
/// `2` at `(0,1)`, `3` at `(1,1)`, everything else in `residual`.
pub fn morphism_check(mu: &ModuleOperator, src: &ModuleOperator, dst: &ModuleOperator) -> CheckReport {
    let gs = &mu.gens;
    let sign_neg = mu.degree.rem_euclid(2) == 1;
    let lhs = mu.after(src);
    let rhs = dst.after(mu);
    let defects: Vec<ModuleElement> = lhs
        .iter()
        .zip(&rhs)
        .map(|(a, b)| if sign_neg { a.add(b) } else { a.sub(b) })
        .collect();
    let buckets = |keep: &dyn Fn((u32, u32)) -> bool| -> Vec<String> {
        let vals: Vec<ModuleElement> = defects.iter().map(|v| v.filter(|m, _| keep(shape(gs, m)))).collect();
        basis_witnesses(&mu.src, &vals)
    };
    let mut rep = CheckReport::new("morphism");
    for i in 0..=4u32 {
        rep.clause(format!("1_{i}"), buckets(&|s| s == (i, 0)));
    }
    rep.clause("2", buckets(&|s| s == (0, 1)));
    rep.clause("3", buckets(&|s| s == (1, 1)));
    rep.clause("residual", buckets(&|s| s.1 > 1 || (s.1 == 1 && s.0 > 1) || (s.1 == 0 && s.0 > 4)));
    rep
}

/// `E_ξ = ℝ[0] ⊕ ℝ[1−k]` with `𝒟(e₁) = 0` and `𝒟(e₂) = ξ e₁`.
pub fn q_closed_rep(q: &Derivation, xi: &AlgebraElement, k: i32) -> Result<ModuleOperator, DgError> {
    let qx = q.apply(xi);
    if !qx.is_zero() {
        return Err(DgError::NotClosed(qx.to_string()));
    }
    if xi.homogeneous_degree().is_some_and(|d| d != k) {
        return Err(DgError::Degree(xi.homogeneous_degree().unwrap_or(0), k));
    }
    let gs = q.gens();
    let basis = SectionBasis::new(vec!["e1".into(), "e2".into()], vec![0, k - 1]);
    let values = vec![ModuleElement::zero(gs, &basis), ModuleElement::single(gs, &basis, 0, xi.clone())];
    Ok(ModuleOperator::rep(q, &basis, values))
}

/// `μ(e₁) = e₁`, `μ(e₂) = ξ″e₁ + e₂` from `E_ξ` to `E_ξ′` when `ξ − ξ′ = Q(ξ″)`.
pub fn q_closed_iso(src: &ModuleOperator, xi2: &AlgebraElement) -> ModuleOperator {
    let gs = &src.gens;
    let b = &src.src;
    let mut e2 = ModuleElement::section(gs, b, 1);
    e2.add_term(0, xi2.clone());
    ModuleOperator::linear(gs, b, b, 0, vec![ModuleElement::section(gs, b, 0), e2])
}

/// Monomials of total degree `d` in the graded generators (no base variables).
pub fn graded_monomials(gs: &GeneratorSet, d: i32) -> Vec<Monomial> {
    let n = gs.len();
    let mut out = Vec::new();
    let mut cur = vec![0u32; n];
    fn rec(gs: &GeneratorSet, i: usize, left: i32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == gs.len() {
            if left == 0 {
                out.push(Monomial(cur.clone()));
            }
            return;
        }
        let deg = gs.degree(i);
        let max = if deg <= 0 {
            0
        } else if gs.is_odd(i) {
            1.min(left / deg)
        } else {
            left / deg
        };
        for e in 0..=max.max(0) {
            cur[i] = e as u32;
            rec(gs, i + 1, left - e * deg, cur, out);
        }
        cur[i] = 0;
    }
    if d >= 0 {
        rec(gs, 0, d, &mut cur, &mut out);
    }
    let _ = n;
    out
}

/// Degree-`n` cochains `m·e_j` of a module over a point.
fn cochain_basis(d: &ModuleOperator, n: i32) -> Vec<(Monomial, usize)> {
    (0..d.src.len())
        .flat_map(|j| {
            graded_monomials(&d.gens, n - d.src.degree(j))
                .into_iter()
                .map(move |m| (m, j))
        })
        .collect()
}

/// Cochain basis entries: a coefficient monomial and a section index.
pub type CochainBasis = Vec<(Monomial, usize)>;

/// Matrix of `𝒟` from degree `n` to `n + 1` cochains (rows = targets).
pub fn differential_matrix(d: &ModuleOperator, n: i32) -> (CochainBasis, CochainBasis, linalg::Matrix) {
    let src = cochain_basis(d, n);
    let dst = cochain_basis(d, n + 1);
    let index: BTreeMap<(Monomial, usize), usize> = dst.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
    let mut mat = linalg::zeros(dst.len(), src.len());
    for (c, (m, j)) in src.iter().enumerate() {
        let el = ModuleElement::single(&d.gens, &d.src, *j, AlgebraElement::term(&d.gens, m.clone(), Poly::one(0)));
        for (k, coeff) in d.apply(&el).terms() {
            for (mm, p) in coeff.terms() {
                let r = index[&(mm.clone(), *k)];
                mat[r][c] = &mat[r][c] + p.constant_term();
            }
        }
    }
    (src, dst, mat)
}

/// Cohomology dimensions for degrees `lo..=hi` of a module over a point.
pub fn cohomology_dims(d: &ModuleOperator, lo: i32, hi: i32) -> Result<Vec<usize>, DgError> {
    if d.gens.nvars() != 0 {
        return Err(DgError::NonPointBase(d.gens.nvars()));
    }
    let rank_of = |n: i32| {
        let (_, _, m) = differential_matrix(d, n);
        if m.is_empty() {
            0
        } else {
            linalg::rank(&m)
        }
    };
    Ok((lo..=hi)
        .map(|n| {
            let dim = cochain_basis(d, n).len();
            dim - rank_of(n) - rank_of(n - 1)
        })
        .collect())
}

/// Rational zero for callers building tables by hand.
pub fn rzero() -> Rational {
    Rational::zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie2::{fixtures, so3_constants, LieConstants};
    use crate::scalars::rat;

    fn so3_q() -> Derivation {
        compile_homological_vf(&fixtures::so3_point())
    }

    #[test]
    fn trivial_line_squares_to_zero() {
        for name in fixtures::LIE2_FIXTURES {
            let d = fixtures::by_name(name).unwrap();
            assert!(d_square_check(&trivial_line(&compile_homological_vf(&d))).passed());
        }
    }

    #[test]
    fn cohomology_of_small_lie_algebras() {
        let mut ab = LieConstants::new();
        ab.insert((0, 1), vec![rat(0), rat(0)]);
        let q = compile_homological_vf(&fixtures::lie_algebra(&ab, 2));
        assert_eq!(cohomology_dims(&trivial_line(&q), 0, 2).unwrap(), vec![1, 2, 1]);
        assert_eq!(cohomology_dims(&trivial_line(&so3_q()), 0, 3).unwrap(), vec![1, 0, 0, 1]);
        let zero = Derivation::zero(q.gens(), 1);
        assert_eq!(cohomology_dims(&trivial_line(&zero), 0, 3).unwrap(), vec![1, 2, 1, 0]);
    }

    #[test]
    fn cohomology_rejects_base() {
        let q = compile_homological_vf(&fixtures::tangent_r2());
        assert!(matches!(cohomology_dims(&trivial_line(&q), 0, 1), Err(DgError::NonPointBase(2))));
    }

    #[test]
    fn component_round_trip_and_stray_terms() {
        let d = fixtures::string_so3();
        let q = compile_homological_vf(&d);
        let gs = d.gens().clone();
        let basis = SectionBasis::new(vec!["e".into(), "f".into()], vec![0, -1]);
        let mut e = ModuleElement::zero(&gs, &basis);
        e.add_term(1, AlgebraElement::parse(&gs, "t1*t2 - 2*b1").unwrap());
        e.add_term(0, AlgebraElement::parse(&gs, "t3").unwrap());
        let op = ModuleOperator::rep(&q, &basis, vec![e, ModuleElement::section(&gs, &basis, 0)]);
        let c = components_from_operator(&op, 3, 1).unwrap();
        assert_eq!(operator_from_components(&c), op);
        let mut bad = ModuleElement::zero(&gs, &basis);
        bad.add_term(0, AlgebraElement::parse(&gs, "b1*b1").unwrap());
        let op = ModuleOperator::rep(&q, &basis, vec![ModuleElement::zero(&gs, &basis), bad]);
        assert!(matches!(components_from_operator(&op, 3, 1), Err(DgError::Shape(_))));
    }

    #[test]
    fn rep1_agrees_with_operator() {
        let d = fixtures::tangent_r2();
        let flat = Connection::trivial(d.q.clone(), 1);
        assert!(rep1_check(&d, &flat).passed());
        assert!(d_square_check(&connection_module(&d, &flat, vec!["e".into()])).passed());
        let mut curved = Connection::trivial(d.q.clone(), 1);
        curved.gamma[0][0][0] = Poly::var(2, 1);
        let r = rep1_check(&d, &curved);
        assert!(!r.get("flat").unwrap().passed);
        assert!(!d_square_check(&connection_module(&d, &curved, vec!["e".into()])).passed());
    }

    #[test]
    fn rep3_matches_d_square_for_q_closed() {
        let d = fixtures::string_so3();
        let q = compile_homological_vf(&d);
        let xi = AlgebraElement::parse(d.gens(), "t1*t2*t3").unwrap();
        let op = q_closed_rep(&q, &xi, 3).unwrap();
        assert!(d_square_check(&op).passed());
        let xi2 = AlgebraElement::parse(d.gens(), "t1*t2 + 2*b1").unwrap();
        let xi_p = xi.sub(&q.apply(&xi2));
        let op_p = q_closed_rep(&q, &xi_p, 3).unwrap();
        let mu = q_closed_iso(&op, &xi2);
        assert!(morphism_check(&mu, &op, &op_p).passed());
        assert!(!morphism_check(&mu, &op, &op).passed());
        assert!(q_closed_rep(&q, &AlgebraElement::parse(d.gens(), "t1").unwrap(), 1).is_err());
    }

    #[test]
    fn dual_and_double_dual() {
        let d = fixtures::string_so3();
        let q = compile_homological_vf(&d);
        let xi = AlgebraElement::parse(d.gens(), "t1*t2*t3").unwrap();
        let op = q_closed_rep(&q, &xi, 3).unwrap();
        let dd = dual(&op);
        assert!(dual_pairing_defects(&op, &dd).is_empty());
        assert!(d_square_check(&dd).passed());
        let table = |m: &ModuleOperator| ComponentTable::from_values(&m.gens, &m.src, &m.dst, &m.values).table;
        assert_eq!(table(&dual(&dd)), table(&op));
        let line = trivial_line(&q);
        assert_eq!(table(&dual(&line)), table(&line));
    }

    #[test]
    fn tensor_sum_shift_and_powers_square_to_zero() {
        let d = fixtures::string_so3();
        let q = compile_homological_vf(&d);
        let xi = AlgebraElement::parse(d.gens(), "t1*t2*t3").unwrap();
        let op = q_closed_rep(&q, &xi, 3).unwrap();
        let line = trivial_line(&q);
        for m in [
            tensor(&op, &op).unwrap(),
            hom(&op, &op).unwrap(),
            direct_sum(&op, &line).unwrap(),
            shift(&op, 1),
            power(&op, 2, false),
            power(&op, 2, true),
            power(&op, 3, false),
        ] {
            assert!(d_square_check(&m).passed(), "{:?}", m.src.names);
        }
        let back = shift(&shift(&op, 1), -1);
        assert_eq!(back, op);
        let s = shift(&op, 2);
        assert!(morphism_check(&shift_iso(&op, &s), &op, &s).passed());
    }

    #[test]
    fn so3_constants_used() {
        assert_eq!(so3_constants().len(), 3);
    }
}
