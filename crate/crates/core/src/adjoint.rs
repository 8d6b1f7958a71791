//! Adjoint and coadjoint representations of a split Lie 2-algebroid.
//!
//! The adjoint complex is `TM[0] ⊕ Q[1] ⊕ B*[2]` with basis `X_i, q_a, β_μ`.
//! Its differential is defined by transport of `ℒ_Q = [Q, ·]` through
//! `μ_∇: X ↦ ∇_X, q ↦ q̂, β ↦ β̂`; the closed formulas are checked against it.

use itertools::Itertools;
use thiserror::Error;

use crate::algebroid::{basic_data, fmt_vec, koszul_d, AlgebroidError, BasicData, Connection, DullAlgebroid, FormValued};
use crate::dgmod::{
    components_from_operator, dual, dual_basis, dual_pairing_defects, morphism_check, ComponentTable, DgError,
    ModuleOperator, Rep3Data,
};
use crate::gca::{AlgebraElement, AlgebraMap, Basis, Derivation, ModuleElement, Monomial, SectionBasis, Slot};
use crate::lie2::{compile_homological_vf, conjugate_by_splitting, extract_data_from_vf, splitting_map, Lie2Error, SplitLie2Data};
use crate::report::CheckReport;
use crate::scalars::{unit_vec, vec_add, vec_is_zero, vec_neg, vec_sub, Poly, PolyVec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AdjointError {
    #[error(transparent)]
    Algebroid(#[from] AlgebroidError),
    #[error(transparent)]
    Dg(#[from] DgError),
    #[error(transparent)]
    Lie2(#[from] Lie2Error),
    #[error("σ is not antisymmetric at ({0}, {1})")]
    NotAntisymmetric(usize, usize),
    #[error("connection shape mismatch: {0}")]
    Shape(String),
}

/// TM-connections on Q and on B*.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TmConnections {
    pub on_q: Connection,
    pub on_bstar: Connection,
}

impl TmConnections {
    pub fn trivial(d: &SplitLie2Data) -> Self {
        let tm = DullAlgebroid::tangent(d.nvars());
        TmConnections {
            on_q: Connection::trivial(tm.clone(), d.rq()),
            on_bstar: Connection::trivial(tm, d.rb),
        }
    }

    /// `gamma_q[i][a]` = `∇_{∂_i} q_a`, `gamma_b[i][μ]` = `∇_{∂_i} β_μ`.
    pub fn new(d: &SplitLie2Data, gamma_q: Vec<Vec<PolyVec>>, gamma_b: Vec<Vec<PolyVec>>) -> Result<Self, AdjointError> {
        let tm = DullAlgebroid::tangent(d.nvars());
        Ok(TmConnections {
            on_q: Connection::new(tm.clone(), d.rq(), gamma_q)?,
            on_bstar: Connection::new(tm, d.rb, gamma_b)?,
        })
    }

    fn check(&self, d: &SplitLie2Data) -> Result<(), AdjointError> {
        let m = d.nvars();
        if self.on_q.source.rank != m || self.on_q.target_rank != d.rq() {
            return Err(AdjointError::Shape("TM-connection on Q".into()));
        }
        if self.on_bstar.source.rank != m || self.on_bstar.target_rank != d.rb {
            return Err(AdjointError::Shape("TM-connection on B*".into()));
        }
        Ok(())
    }

    fn x(&self, i: usize) -> PolyVec {
        let m = self.on_q.source.rank;
        unit_vec(m, m, i)
    }

    /// `∇_{∂_i} q`.
    pub fn nq(&self, i: usize, q: &[Poly]) -> PolyVec {
        self.on_q.covariant(&self.x(i), q)
    }

    /// `∇_{∂_i} β`.
    pub fn nb(&self, i: usize, beta: &[Poly]) -> PolyVec {
        self.on_bstar.covariant(&self.x(i), beta)
    }
}

/// Basis `X_1…X_m` (degree 0), `q_1…` (degree −1), `β_1…` (degree −2).
pub fn adjoint_basis(d: &SplitLie2Data) -> Basis {
    let (m, rq, rb) = (d.nvars(), d.rq(), d.rb);
    let names = (0..m)
        .map(|i| format!("X{}", i + 1))
        .chain((0..rq).map(|a| format!("q{}", a + 1)))
        .chain((0..rb).map(|mu| format!("β{}", mu + 1)))
        .collect();
    let degrees = std::iter::repeat_n(0, m)
        .chain(std::iter::repeat_n(-1, rq))
        .chain(std::iter::repeat_n(-2, rb))
        .collect();
    SectionBasis::new(names, degrees)
}

struct Idx {
    m: usize,
    rq: usize,
}

impl Idx {
    fn of(d: &SplitLie2Data) -> Self {
        Idx { m: d.nvars(), rq: d.rq() }
    }
    fn x(&self, i: usize) -> usize {
        i
    }
    fn q(&self, a: usize) -> usize {
        self.m + a
    }
    fn b(&self, mu: usize) -> usize {
        self.m + self.rq + mu
    }
}

/// `μ_∇` on basis sections.
pub fn mu_nabla(d: &SplitLie2Data, tm: &TmConnections) -> Vec<Derivation> {
    let gs = d.gens();
    let (m, rq, rb) = (d.nvars(), d.rq(), d.rb);
    let dual_q = tm.on_q.dual();
    let dual_b = tm.on_bstar.dual();
    let mut out = Vec::new();
    for i in 0..m {
        let mut der = Derivation::zero(gs, 0);
        der.set(Slot::Base(i), AlgebraElement::one(gs));
        for a in 0..rq {
            let mut v = AlgebraElement::zero(gs);
            for c in 0..rq {
                v = v.add(&AlgebraElement::generator(gs, d.tau(c)).scale_poly(&dual_q.gamma[i][a][c]));
            }
            der.set(Slot::Gen(d.tau(a)), v);
        }
        for nu in 0..rb {
            let mut v = AlgebraElement::zero(gs);
            for la in 0..rb {
                v = v.add(&AlgebraElement::generator(gs, d.b(la)).scale_poly(&dual_b.gamma[i][nu][la]));
            }
            der.set(Slot::Gen(d.b(nu)), v);
        }
        out.push(der);
    }
    out.extend((0..rq).map(|a| Derivation::coordinate(gs, d.tau(a))));
    out.extend((0..rb).map(|mu| Derivation::coordinate(gs, d.b(mu))));
    out
}

pub fn mu_apply(mu: &[Derivation], gs: &crate::gca::Gens, e: &ModuleElement) -> Derivation {
    let mut out: Option<Derivation> = None;
    for (j, xi) in e.terms() {
        let t = mu[*j].left_mul(xi);
        out = Some(match out {
            None => t,
            Some(o) => o.add(&t),
        });
    }
    out.unwrap_or_else(|| Derivation::zero(gs, 0))
}

/// `μ_∇⁻¹` of a vector field.
pub fn mu_inverse(d: &SplitLie2Data, mu: &[Derivation], v: &Derivation) -> ModuleElement {
    let gs = d.gens();
    let basis = adjoint_basis(d);
    let idx = Idx::of(d);
    let (m, rq, rb) = (d.nvars(), d.rq(), d.rb);
    let mut out = ModuleElement::zero(gs, &basis);
    let xs: Vec<AlgebraElement> = (0..m).map(|i| v.value(Slot::Base(i)).clone()).collect();
    for (i, c) in xs.iter().enumerate() {
        out.add_term(idx.x(i), c.clone());
    }
    let residual = |g: usize| {
        let mut c = v.value(Slot::Gen(g)).clone();
        for (i, xi) in xs.iter().enumerate() {
            c = c.sub(&xi.mul(mu[i].value(Slot::Gen(g))));
        }
        c
    };
    for a in 0..rq {
        out.add_term(idx.q(a), residual(d.tau(a)));
    }
    for nu in 0..rb {
        out.add_term(idx.b(nu), residual(d.b(nu)));
    }
    out
}

/// `𝒟 = μ_∇⁻¹ ∘ ℒ_Q ∘ μ_∇` as a module operator.
pub fn adjoint_operator_via_lie_derivative(d: &SplitLie2Data, tm: &TmConnections) -> ModuleOperator {
    let q = compile_homological_vf(d);
    let mu = mu_nabla(d, tm);
    let values = mu.iter().map(|m| mu_inverse(d, &mu, &q.commutator(m))).collect();
    ModuleOperator::rep(&q, &adjoint_basis(d), values)
}

pub fn adjoint_via_lie_derivative(d: &SplitLie2Data, tm: &TmConnections) -> Result<Rep3Data, AdjointError> {
    tm.check(d)?;
    let op = adjoint_operator_via_lie_derivative(d, tm);
    Ok(components_from_operator(&op, d.rq(), d.rb)?)
}

/// `(∇_{∂_i} ω)(q_{a_1}, …)` for a B*-valued form on Q.
pub fn covariant_form(tm: &TmConnections, form: &FormValued, i: usize, idx: &[usize]) -> PolyVec {
    let r = form.source_rank;
    let m = form.nvars;
    let args: Vec<PolyVec> = idx.iter().map(|&a| unit_vec(m, r, a)).collect();
    let mut out = tm.nb(i, &form.eval(idx));
    for s in 0..args.len() {
        let mut a2 = args.clone();
        a2[s] = tm.nq(i, &args[s]);
        out = vec_sub(&out, &form.eval_sections(&a2));
    }
    out
}

fn put(t: &mut ComponentTable, mono: &Monomial, row: usize, col0: usize, v: &[Poly]) {
    for (k, p) in v.iter().enumerate() {
        if !p.is_zero() {
            t.add_entry(mono, row, col0 + k, p);
        }
    }
}

/// Closed formulas for `(∂, ∇, ω₂, ω₃, φ₀, φ₁)` of the adjoint representation.
pub fn build_adjoint_rep(d: &SplitLie2Data, tm: &TmConnections) -> Result<Rep3Data, AdjointError> {
    tm.check(d)?;
    let gs = d.gens();
    let basis = adjoint_basis(d);
    let idx = Idx::of(d);
    let (m, rq, rb) = (d.nvars(), d.rq(), d.rb);
    let basic = basic_data(&tm.on_q, &d.q)?;
    let nstar = d.connection_bstar();
    let mut t = ComponentTable::new(gs, &basis, &basis);
    let qs = |a: usize| d.q.basis_section(a);
    let bs = |mu: usize| d.bstar_basis(mu);
    let xs = |i: usize| unit_vec(m, m, i);

    let one = t.mono(&[]);
    for a in 0..rq {
        put(&mut t, &one, idx.q(a), idx.x(0), &d.q.anchor[a]);
    }
    for mu in 0..rb {
        put(&mut t, &one, idx.b(mu), idx.q(0), &vec_neg(&d.ell[mu]));
    }
    for c in 0..rq {
        let mono = t.mono(&[d.tau(c)]);
        for mu in 0..rb {
            put(&mut t, &mono, idx.b(mu), idx.b(0), &nstar.along(c, &bs(mu)));
        }
        for a in 0..rq {
            put(&mut t, &mono, idx.q(a), idx.q(0), &basic.on_q.along(c, &qs(a)));
        }
        for i in 0..m {
            put(&mut t, &mono, idx.x(i), idx.x(0), &basic.on_tm.along(c, &xs(i)));
        }
    }
    for (a, b) in (0..rq).tuple_combinations() {
        let mono = t.mono(&[d.tau(a), d.tau(b)]);
        for c in 0..rq {
            put(&mut t, &mono, idx.q(c), idx.b(0), &vec_neg(&d.omega.eval(&[a, b, c])));
        }
        for i in 0..m {
            put(&mut t, &mono, idx.x(i), idx.q(0), &vec_neg(&basic.curvature[a][b][i]));
        }
    }
    for (a, b, c) in (0..rq).tuple_combinations() {
        let mono = t.mono(&[d.tau(a), d.tau(b), d.tau(c)]);
        for i in 0..m {
            put(&mut t, &mono, idx.x(i), idx.b(0), &vec_neg(&covariant_form(tm, &d.omega, i, &[a, b, c])));
        }
    }
    for mu in 0..rb {
        let mono = t.mono(&[d.b(mu)]);
        for a in 0..rq {
            let v = vec_sub(&tm.on_bstar.covariant(&d.q.anchor[a], &bs(mu)), &nstar.along(a, &bs(mu)));
            put(&mut t, &mono, idx.q(a), idx.b(0), &v);
        }
        for i in 0..m {
            let v = vec_sub(&d.ell_of(&tm.nb(i, &bs(mu))), &tm.nq(i, &d.ell[mu]));
            put(&mut t, &mono, idx.x(i), idx.q(0), &v);
        }
        for a in 0..rq {
            let mono = t.mono(&[d.tau(a), d.b(mu)]);
            for i in 0..m {
                put(&mut t, &mono, idx.x(i), idx.b(0), &phi1(d, tm, &basic, mu, a, i));
            }
        }
    }
    Ok(Rep3Data {
        q: compile_homological_vf(d),
        rq,
        rb,
        components: t,
    })
}

/// `φ₁(β,q)X = ∇_X∇*_qβ − ∇*_q∇_Xβ − ∇*_{∇_Xq}β + ∇_{∇^bas_qX}β`.
fn phi1(d: &SplitLie2Data, tm: &TmConnections, basic: &BasicData, mu: usize, a: usize, i: usize) -> PolyVec {
    let m = d.nvars();
    let nstar = d.connection_bstar();
    let beta = d.bstar_basis(mu);
    let q = d.q.basis_section(a);
    let x = unit_vec(m, m, i);
    let t1 = tm.nb(i, &nstar.covariant(&q, &beta));
    let t2 = nstar.covariant(&q, &tm.nb(i, &beta));
    let t3 = nstar.covariant(&tm.nq(i, &q), &beta);
    let t4 = tm.on_bstar.covariant(&basic.on_tm.covariant(&q, &x), &beta);
    vec_add(&vec_sub(&vec_sub(&t1, &t2), &t3), &t4)
}

fn shape_name(s: (u32, u32)) -> &'static str {
    match s {
        (0, 0) => "partial",
        (1, 0) => "connection",
        (2, 0) => "omega2",
        (3, 0) => "omega3",
        (0, 1) => "phi0",
        (1, 1) => "phi1",
        _ => "other",
    }
}

/// Componentwise differences between two component tables, keyed by component name.
pub fn compare_components(a: &ComponentTable, b: &ComponentTable) -> Vec<(&'static str, String)> {
    let gs = &a.gens;
    let keys: std::collections::BTreeSet<&Monomial> = a.table.keys().chain(b.table.keys()).collect();
    let mut out = Vec::new();
    for k in keys {
        let (ma, mb) = (a.get(k), b.get(k));
        for j in 0..ma.len() {
            let diff = vec_sub(&ma[j], &mb[j]);
            if !vec_is_zero(&diff) {
                out.push((
                    shape_name(crate::dgmod::shape(gs, k)),
                    format!("{}·{}: {} vs {}", AlgebraElement::monomial_string(gs, k), a.src.names[j], fmt_vec(&ma[j]), fmt_vec(&mb[j])),
                ));
            }
        }
    }
    out
}

const COMPONENTS: [&str; 6] = ["partial", "connection", "omega2", "omega3", "phi0", "phi1"];

fn component_report(name: &str, diffs: Vec<(&'static str, String)>) -> CheckReport {
    let mut rep = CheckReport::new(name);
    for c in COMPONENTS.iter().chain(std::iter::once(&"other")) {
        rep.clause(*c, diffs.iter().filter(|(k, _)| k == c).map(|(_, w)| w.clone()).collect());
    }
    rep
}

/// Closed formulas against transport, component by component, plus `𝒟² = 0`
/// and the seven equations.
pub fn adjoint_cross_check(d: &SplitLie2Data, tm: &TmConnections) -> Result<CheckReport, AdjointError> {
    let explicit = build_adjoint_rep(d, tm)?;
    let transported = adjoint_via_lie_derivative(d, tm)?;
    let mut rep = component_report("adjoint", compare_components(&explicit.components, &transported.components));
    let op = crate::dgmod::operator_from_components(&explicit);
    rep.absorb("d_square", crate::dgmod::d_square_check(&op));
    rep.absorb("rep3", crate::dgmod::rep3_check(&explicit));
    Ok(rep)
}

/// The coadjoint table: `−ρ*`, `−ℓ*`, dual connections, `τ∘ω₂`, `−b∘ω₂`,
/// `τ∘φ₀`, `−b∘φ₀`, `−b∘ω₃`, `−b∘φ₁`.
pub fn build_coadjoint_rep(ad: &Rep3Data) -> Rep3Data {
    let c = &ad.components;
    let basis = dual_basis(&c.src);
    let gs = &c.gens;
    let mut t = ComponentTable::new(gs, &basis, &basis);
    for (mono, mat) in &c.table {
        let sh = crate::dgmod::shape(gs, mono);
        for (j, row) in mat.iter().enumerate() {
            for (k, z) in row.iter().enumerate() {
                if z.is_zero() {
                    continue;
                }
                let target_is_q = c.src.degree(k) == -1;
                let keep = (matches!(sh, (2, 0) | (0, 1)) && target_is_q) || (sh == (0, 0) && c.src.degree(j) == -2);
                let v = if keep { z.clone() } else { -z };
                t.add_entry(mono, k, j, &v);
            }
        }
    }
    Rep3Data {
        q: ad.q.clone(),
        rq: ad.rq,
        rb: ad.rb,
        components: t,
    }
}

/// Coadjoint table against the general dual construction and the pairing identity.
pub fn coadjoint_cross_check(ad: &Rep3Data) -> CheckReport {
    let co = build_coadjoint_rep(ad);
    let op = crate::dgmod::operator_from_components(ad);
    let dop = dual(&op);
    let from_dual = ComponentTable::from_values(&dop.gens, &dop.src, &dop.dst, &dop.values);
    let mut rep = component_report("coadjoint", compare_components(&co.components, &from_dual));
    rep.clause("pairing", dual_pairing_defects(&op, &crate::dgmod::operator_from_components(&co)));
    rep.absorb("d_square", crate::dgmod::d_square_check(&crate::dgmod::operator_from_components(&co)));
    rep
}

/// `μ = id ⊕ (∇′ − ∇)` from `ad_∇` to `ad_∇′`.
pub fn change_of_connection(d: &SplitLie2Data, tm: &TmConnections, tm2: &TmConnections) -> ModuleOperator {
    let gs = d.gens();
    let basis = adjoint_basis(d);
    let idx = Idx::of(d);
    let mut t = ComponentTable::new(gs, &basis, &basis);
    let one = t.mono(&[]);
    for j in 0..basis.len() {
        t.add_entry(&one, j, j, &Poly::one(d.nvars()));
    }
    for i in 0..d.nvars() {
        for c in 0..d.rq() {
            let q = d.q.basis_section(c);
            let v = vec_sub(&tm2.nq(i, &q), &tm.nq(i, &q));
            { let mono = t.mono(&[d.tau(c)]); put(&mut t, &mono, idx.x(i), idx.q(0), &v); }
        }
        for la in 0..d.rb {
            let beta = d.bstar_basis(la);
            let v = vec_sub(&tm2.nb(i, &beta), &tm.nb(i, &beta));
            { let mono = t.mono(&[d.b(la)]); put(&mut t, &mono, idx.x(i), idx.b(0), &v); }
        }
    }
    ModuleOperator::linear(gs, &basis, &basis, 0, t.values())
}

/// `μ_∇′⁻¹ ∘ μ_∇` on basis sections.
pub fn change_of_connection_transport(d: &SplitLie2Data, tm: &TmConnections, tm2: &TmConnections) -> ModuleOperator {
    let mu = mu_nabla(d, tm);
    let mu2 = mu_nabla(d, tm2);
    let basis = adjoint_basis(d);
    let values = mu.iter().map(|v| mu_inverse(d, &mu2, v)).collect();
    ModuleOperator::linear(d.gens(), &basis, &basis, 0, values)
}

fn value_diffs(basis: &Basis, a: &[ModuleElement], b: &[ModuleElement]) -> Vec<String> {
    a.iter()
        .zip(b)
        .enumerate()
        .filter(|(_, (x, y))| x != y)
        .map(|(j, (x, y))| format!("{}: {} vs {}", basis.names[j], x, y))
        .collect()
}

pub fn change_of_connection_check(d: &SplitLie2Data, tm: &TmConnections, tm2: &TmConnections) -> Result<CheckReport, AdjointError> {
    tm.check(d)?;
    tm2.check(d)?;
    let mu = change_of_connection(d, tm, tm2);
    let back = change_of_connection(d, tm2, tm);
    let basis = adjoint_basis(d);
    let mut rep = CheckReport::new("change_of_connection");
    rep.clause("transport", value_diffs(&basis, &mu.values, &change_of_connection_transport(d, tm, tm2).values));
    let ad = adjoint_operator_via_lie_derivative(d, tm);
    let ad2 = adjoint_operator_via_lie_derivative(d, tm2);
    rep.absorb("morphism", morphism_check(&mu, &ad, &ad2));
    let id = ModuleOperator::identity(d.gens(), &basis);
    rep.clause("inverse", value_diffs(&basis, &back.after(&mu), &id.values));
    Ok(rep)
}

/// Full antisymmetric table `σ[a][b] ∈ Γ(B*)` to a 2-form.
pub fn sigma_from_table(d: &SplitLie2Data, table: &[Vec<PolyVec>]) -> Result<FormValued, AdjointError> {
    let rq = d.rq();
    for a in 0..rq {
        for b in 0..rq {
            if !vec_is_zero(&vec_add(&table[a][b], &table[b][a])) {
                return Err(AdjointError::NotAntisymmetric(a + 1, b + 1));
            }
        }
    }
    Ok(FormValued::from_fn(d.nvars(), 2, rq, d.rb, |idx| table[idx[0]][idx[1]].clone()))
}

/// Result of a change of splitting.
#[derive(Clone, Debug)]
pub struct SplittingChange {
    pub data: SplitLie2Data,
    /// `μ^σ: ad¹ → ad²` with coefficients pushed through the splitting map.
    pub morphism: ModuleOperator,
    pub report: CheckReport,
}

/// `V ↦ F∘V∘F⁻¹` for an algebra automorphism given with its inverse.
fn conjugate_derivation(f: &AlgebraMap, finv: &AlgebraMap, v: &Derivation) -> Derivation {
    let gs = v.gens();
    let mut out = Derivation::zero(gs, v.degree());
    for s in gs.slots() {
        let pre = match s {
            Slot::Base(_) => AlgebraElement::slot(gs, s),
            Slot::Gen(g) => finv.image(g).clone(),
        };
        out.set(s, f.apply(&v.apply(&pre)));
    }
    out
}

/// `μ^σ` in closed form: identity, `τ^a σ(q_a, q_b)` on `q_b` and
/// `−τ^aτ^b (∇_{∂_i}σ)(q_a, q_b)` on `X_i`.
pub fn splitting_morphism(d: &SplitLie2Data, sigma: &FormValued, tm: &TmConnections) -> ModuleOperator {
    let gs = d.gens();
    let basis = adjoint_basis(d);
    let idx = Idx::of(d);
    let mut t = ComponentTable::new(gs, &basis, &basis);
    let one = t.mono(&[]);
    for j in 0..basis.len() {
        t.add_entry(&one, j, j, &Poly::one(d.nvars()));
    }
    for a in 0..d.rq() {
        for b in 0..d.rq() {
            { let mono = t.mono(&[d.tau(a)]); put(&mut t, &mono, idx.q(b), idx.b(0), &sigma.eval(&[a, b])); }
        }
    }
    for (a, b) in (0..d.rq()).tuple_combinations() {
        for i in 0..d.nvars() {
            { let mono = t.mono(&[d.tau(a), d.tau(b)]); put(&mut t, &mono, idx.x(i), idx.b(0), &vec_neg(&covariant_form(tm, sigma, i, &[a, b]))); }
        }
    }
    ModuleOperator::linear(gs, &basis, &basis, 0, t.values()).with_algebra_map(splitting_map(d, sigma, 1))
}

/// Change of splitting by `σ`: the second splitting has `Q₂ = F∘Q₁∘F⁻¹` with
/// `F(b) = b + σ*b`. Reports the displayed relations, the six identity groups
/// between the adjoint representations and the morphism `μ^σ`.
pub fn change_of_splitting(d: &SplitLie2Data, sigma: &FormValued, tm: &TmConnections) -> Result<SplittingChange, AdjointError> {
    tm.check(d)?;
    if sigma.k != 2 || sigma.source_rank != d.rq() || sigma.value_rank != d.rb || sigma.nvars != d.nvars() {
        return Err(AdjointError::Shape("σ must be a B*-valued 2-form on Q".into()));
    }
    let neg_sigma = FormValued::zero(sigma.nvars, 2, sigma.source_rank, sigma.value_rank).sub(sigma);
    let q2 = conjugate_by_splitting(d, &neg_sigma);
    let d2 = extract_data_from_vf(&q2, d.nvars(), d.rq(), d.rb)?;
    let (m, rq, rb) = (d.nvars(), d.rq(), d.rb);
    let mut rep = CheckReport::new("change_of_splitting");
    let qs = |a: usize| d.q.basis_section(a);
    let bs = |mu: usize| d.bstar_basis(mu);
    let xs = |i: usize| unit_vec(m, m, i);
    let sig = |q1: &PolyVec, q2: &PolyVec| sigma.eval_sections(&[q1.clone(), q2.clone()]);
    let lsig = |q1: &PolyVec, q2: &PolyVec| d.ell_of(&sig(q1, q2));
    let push = |v: &mut Vec<String>, label: String, diff: PolyVec| {
        if !vec_is_zero(&diff) {
            v.push(format!("{label}: {}", fmt_vec(&diff)));
        }
    };

    let n1 = d.connection_bstar();
    let n2 = d2.connection_bstar();
    let dsigma = koszul_d(&d2.q, Some(&n1), sigma)?;

    let mut f = Vec::new();
    for (a, b) in (0..rq).tuple_combinations() {
        let lhs = d2.q.bracket_of(&qs(a), &qs(b));
        let rhs = vec_sub(&d.q.bracket_of(&qs(a), &qs(b)), &lsig(&qs(a), &qs(b)));
        push(&mut f, format!("[q{},q{}]", a + 1, b + 1), vec_sub(&lhs, &rhs));
    }
    rep.clause("bracket", f);
    let mut f = Vec::new();
    for a in 0..rq {
        for mu in 0..rb {
            let rhs = vec_sub(&n1.along(a, &bs(mu)), &sig(&qs(a), &d.ell[mu]));
            push(&mut f, format!("∇*_q{} β{}", a + 1, mu + 1), vec_sub(&n2.along(a, &bs(mu)), &rhs));
        }
    }
    rep.clause("connection", f);
    let mut f = Vec::new();
    for (a, b, c) in (0..rq).tuple_combinations() {
        let rhs = vec_add(&d.omega.eval(&[a, b, c]), &dsigma.eval(&[a, b, c]));
        push(&mut f, format!("ω(q{},q{},q{})", a + 1, b + 1, c + 1), vec_sub(&d2.omega.eval(&[a, b, c]), &rhs));
    }
    rep.clause("omega", f);
    rep.absorb("axioms", crate::lie2::lie2_axioms_check(&d2));

    // The two adjoint representations, component by component.
    let ad1 = build_adjoint_rep(d, tm)?;
    let ad2 = build_adjoint_rep(&d2, tm)?;
    let idx = Idx::of(d);
    let col = |rep: &Rep3Data, mono: &[usize], row: usize, from: usize, len: usize| -> PolyVec {
        let mat = rep.components.get(&rep.components.mono(mono));
        mat[row][from..from + len].to_vec()
    };
    let b1 = basic_data(&tm.on_q, &d.q)?;
    let b2 = basic_data(&tm.on_q, &d2.q)?;

    let mut f = Vec::new();
    if d2.ell != d.ell {
        f.push("ℓ changed".to_string());
    }
    if d2.q.anchor != d.q.anchor {
        f.push("ρ changed".to_string());
    }
    rep.clause("ad.partial", f);

    let mut f = Vec::new();
    for a in 0..rq {
        for b in 0..rq {
            let rhs = vec_sub(&b1.on_q.along(a, &qs(b)), &lsig(&qs(a), &qs(b)));
            push(&mut f, format!("∇bas_q{} q{}", a + 1, b + 1), vec_sub(&b2.on_q.along(a, &qs(b)), &rhs));
        }
        for i in 0..m {
            push(&mut f, format!("∇bas_q{} X{}", a + 1, i + 1), vec_sub(&b2.on_tm.along(a, &xs(i)), &b1.on_tm.along(a, &xs(i))));
        }
        for mu in 0..rb {
            let rhs = vec_sub(&n1.along(a, &bs(mu)), &sig(&qs(a), &d.ell[mu]));
            push(&mut f, format!("∇*_q{} β{}", a + 1, mu + 1), vec_sub(&n2.along(a, &bs(mu)), &rhs));
        }
    }
    rep.clause("ad.connection", f);

    let mut f = Vec::new();
    for (a, b) in (0..rq).tuple_combinations() {
        let mono = [d.tau(a), d.tau(b)];
        for c in 0..rq {
            let rhs = vec_sub(&col(&ad1, &mono, idx.q(c), idx.b(0), rb), &dsigma.eval(&[a, b, c]));
            push(&mut f, format!("ω₂(q{},q{})q{}", a + 1, b + 1, c + 1), vec_sub(&col(&ad2, &mono, idx.q(c), idx.b(0), rb), &rhs));
        }
        for i in 0..m {
            let mut rhs = col(&ad1, &mono, idx.x(i), idx.q(0), rq);
            rhs = vec_sub(&rhs, &tm.nq(i, &lsig(&qs(a), &qs(b))));
            rhs = vec_add(&rhs, &lsig(&qs(a), &tm.nq(i, &qs(b))));
            rhs = vec_sub(&rhs, &lsig(&qs(b), &tm.nq(i, &qs(a))));
            push(&mut f, format!("ω₂(q{},q{})X{}", a + 1, b + 1, i + 1), vec_sub(&col(&ad2, &mono, idx.x(i), idx.q(0), rq), &rhs));
        }
    }
    rep.clause("ad.omega2", f);

    let mut f = Vec::new();
    for (a, b, c) in (0..rq).tuple_combinations() {
        let mono = [d.tau(a), d.tau(b), d.tau(c)];
        for i in 0..m {
            let rhs = vec_sub(&col(&ad1, &mono, idx.x(i), idx.b(0), rb), &covariant_form(tm, &dsigma, i, &[a, b, c]));
            push(&mut f, format!("ω₃(q{},q{},q{})X{}", a + 1, b + 1, c + 1, i + 1), vec_sub(&col(&ad2, &mono, idx.x(i), idx.b(0), rb), &rhs));
        }
    }
    rep.clause("ad.omega3", f);

    let mut f = Vec::new();
    for mu in 0..rb {
        let mono = [d.b(mu)];
        for a in 0..rq {
            let rhs = vec_add(&col(&ad1, &mono, idx.q(a), idx.b(0), rb), &sig(&qs(a), &d.ell[mu]));
            push(&mut f, format!("φ₀(β{})q{}", mu + 1, a + 1), vec_sub(&col(&ad2, &mono, idx.q(a), idx.b(0), rb), &rhs));
        }
        for i in 0..m {
            push(
                &mut f,
                format!("φ₀(β{})X{}", mu + 1, i + 1),
                vec_sub(&col(&ad2, &mono, idx.x(i), idx.q(0), rq), &col(&ad1, &mono, idx.x(i), idx.q(0), rq)),
            );
        }
    }
    rep.clause("ad.phi0", f);

    let mut f = Vec::new();
    for mu in 0..rb {
        for a in 0..rq {
            let mono = [d.tau(a), d.b(mu)];
            for i in 0..m {
                let q = qs(a);
                let mut rhs = col(&ad1, &mono, idx.x(i), idx.b(0), rb);
                rhs = vec_add(&rhs, &sig(&tm.nq(i, &q), &d.ell[mu]));
                rhs = vec_add(&rhs, &sig(&q, &d.ell_of(&tm.nb(i, &bs(mu)))));
                rhs = vec_sub(&rhs, &tm.nb(i, &sig(&q, &d.ell[mu])));
                push(&mut f, format!("φ₁(β{},q{})X{}", mu + 1, a + 1, i + 1), vec_sub(&col(&ad2, &mono, idx.x(i), idx.b(0), rb), &rhs));
            }
        }
    }
    rep.clause("ad.phi1", f);

    // μ^σ in closed form against transport, then as a morphism.
    let f_map = splitting_map(d, sigma, 1);
    let finv = splitting_map(d, sigma, -1);
    let mu1 = mu_nabla(d, tm);
    let mu2 = mu_nabla(&d2, tm);
    let basis = adjoint_basis(d);
    let transported: Vec<ModuleElement> = mu1
        .iter()
        .map(|v| mu_inverse(&d2, &mu2, &conjugate_derivation(&f_map, &finv, v)))
        .collect();
    let morphism = splitting_morphism(d, sigma, tm);
    rep.clause("morphism_transport", value_diffs(&basis, &morphism.values, &transported));
    let src = adjoint_operator_via_lie_derivative(d, tm);
    let dst = adjoint_operator_via_lie_derivative(&d2, tm);
    rep.absorb("morphism", morphism_check(&morphism, &src, &dst));
    let back = splitting_morphism(&d2, &neg_sigma, tm);
    let id = ModuleOperator::identity(d.gens(), &basis);
    rep.clause("inverse", value_diffs(&basis, &back.after(&morphism), &id.values));
    Ok(SplittingChange {
        data: d2,
        morphism,
        report: rep,
    })
}
