//! Split Lie 2-algebroids `Q[1] ⊕ B*[2]`: structure data, the five axioms,
//! translation to and from the homological vector field, Lie 2-algebras over
//! a point and the shipped fixtures.

use std::collections::BTreeMap;
use std::sync::Arc;

use itertools::Itertools;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebroid::{fmt_vec, koszul_d, AlgebroidError, Connection, DullAlgebroid, FormValued};
use crate::gca::{AlgebraElement, AlgebraMap, Derivation, GcaError, Generator, GeneratorSet, Gens, Monomial, Slot};
use crate::linalg::{self, Matrix};
use crate::report::CheckReport;
use crate::scalars::{rat, unit_vec, vec_add, vec_is_zero, vec_neg, vec_scale, vec_sub, zero_vec, Poly, PolyVec, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Lie2Error {
    #[error(transparent)]
    Algebroid(#[from] AlgebroidError),
    #[error(transparent)]
    Gca(#[from] GcaError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("vector field not of split Lie 2-algebroid shape: {0}")]
    NotSplitShape(String),
    #[error("bracket is not a Lie bracket: {0}")]
    JacobiFailure(String),
    #[error("bracket not antisymmetric: {0}")]
    NotAntisymmetric(String),
}

/// Data `(ρ, [·,·], ℓ, ∇, ω)` of a split Lie 2-algebroid over an m-dimensional chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitLie2Data {
    pub q: Arc<DullAlgebroid>,
    pub rb: usize,
    /// `ell[μ] = ℓ(β_μ) ∈ Γ(Q)`.
    pub ell: Vec<PolyVec>,
    /// `nabla[a][ν][λ]`: `∇_{q_a} b_ν = Σ_λ nabla[a][ν][λ] b_λ`.
    pub nabla: Vec<Vec<PolyVec>>,
    /// `ω(q_a, q_b, q_c) ∈ Γ(B*)` on increasing triples.
    pub omega: FormValued,
    gens: Gens,
}

pub fn tau_name(a: usize) -> String {
    format!("t{}", a + 1)
}

pub fn b_name(mu: usize) -> String {
    format!("b{}", mu + 1)
}

/// Generator set `{τ^a (deg 1), b^μ (deg 2)}` over m base coordinates.
pub fn split_gens(m: usize, rq: usize, rb: usize) -> Gens {
    let gens = (0..rq)
        .map(|a| Generator::new(tau_name(a), 1))
        .chain((0..rb).map(|mu| Generator::new(b_name(mu), 2)))
        .collect();
    GeneratorSet::new(m, gens).expect("valid generator names")
}

impl SplitLie2Data {
    pub fn new(
        q: Arc<DullAlgebroid>,
        rb: usize,
        ell: Vec<PolyVec>,
        nabla: Vec<Vec<PolyVec>>,
        omega: FormValued,
    ) -> Result<Self, Lie2Error> {
        let (m, rq) = (q.nvars, q.rank);
        if ell.len() != rb || ell.iter().any(|v| v.len() != rq) {
            return Err(Lie2Error::Shape("ell must be rb x rq".into()));
        }
        if nabla.len() != rq || nabla.iter().any(|r| r.len() != rb || r.iter().any(|v| v.len() != rb)) {
            return Err(Lie2Error::Shape("nabla must be rq x rb x rb".into()));
        }
        if omega.k != 3 || omega.source_rank != rq || omega.value_rank != rb || omega.nvars != m {
            return Err(Lie2Error::Shape("omega must be a B*-valued 3-form on Q".into()));
        }
        Ok(SplitLie2Data {
            gens: split_gens(m, rq, rb),
            q,
            rb,
            ell,
            nabla,
            omega,
        })
    }

    pub fn zero(m: usize, rq: usize, rb: usize) -> Self {
        let q = DullAlgebroid::new(m, vec![zero_vec(m, m); rq], vec![vec![zero_vec(m, rq); rq]; rq]).unwrap();
        SplitLie2Data::new(
            q,
            rb,
            vec![zero_vec(m, rq); rb],
            vec![vec![zero_vec(m, rb); rb]; rq],
            FormValued::zero(m, 3, rq, rb),
        )
        .unwrap()
    }

    pub fn nvars(&self) -> usize {
        self.q.nvars
    }

    pub fn rq(&self) -> usize {
        self.q.rank
    }

    pub fn gens(&self) -> &Gens {
        &self.gens
    }

    pub fn tau(&self, a: usize) -> usize {
        a
    }

    pub fn b(&self, mu: usize) -> usize {
        self.rq() + mu
    }

    /// Q-connection on B.
    pub fn connection_b(&self) -> Connection {
        Connection::new(self.q.clone(), self.rb, self.nabla.clone()).expect("shape checked")
    }

    /// Dual Q-connection on B*.
    pub fn connection_bstar(&self) -> Connection {
        self.connection_b().dual()
    }

    /// `ℓ(β)` for an arbitrary section of B*.
    pub fn ell_of(&self, beta: &[Poly]) -> PolyVec {
        let mut out = zero_vec(self.nvars(), self.rq());
        for (mu, c) in beta.iter().enumerate() {
            if !c.is_zero() {
                out = vec_add(&out, &vec_scale(c, &self.ell[mu]));
            }
        }
        out
    }

    pub fn bstar_basis(&self, mu: usize) -> PolyVec {
        unit_vec(self.nvars(), self.rb, mu)
    }
}

/// The degree-1 vector field with `Q(f) = ρ*df`, `Q(τ) = d_Qτ + ℓ*τ` and
/// `Q(b) = d_∇b − ⟨ω, b⟩`.
pub fn compile_homological_vf(d: &SplitLie2Data) -> Derivation {
    let gs = d.gens();
    let (m, rq, rb) = (d.nvars(), d.rq(), d.rb);
    let t = |a: usize| AlgebraElement::generator(gs, d.tau(a));
    let bg = |mu: usize| AlgebraElement::generator(gs, d.b(mu));
    let mut q = Derivation::zero(gs, 1);
    for i in 0..m {
        let mut v = AlgebraElement::zero(gs);
        for a in 0..rq {
            v = v.add(&t(a).scale_poly(&d.q.anchor[a][i]));
        }
        q.set(Slot::Base(i), v);
    }
    for c in 0..rq {
        let mut v = AlgebraElement::zero(gs);
        for (a, b) in (0..rq).tuple_combinations() {
            v = v.sub(&t(a).mul(&t(b)).scale_poly(&d.q.bracket[a][b][c]));
        }
        for mu in 0..rb {
            v = v.add(&bg(mu).scale_poly(&d.ell[mu][c]));
        }
        q.set(Slot::Gen(d.tau(c)), v);
    }
    for nu in 0..rb {
        let mut v = AlgebraElement::zero(gs);
        for a in 0..rq {
            for la in 0..rb {
                v = v.add(&t(a).mul(&bg(la)).scale_poly(&d.nabla[a][nu][la]));
            }
        }
        v = v.sub(&omega_pairing(d, nu));
        q.set(Slot::Gen(d.b(nu)), v);
    }
    q
}

/// `⟨ω, b_ν⟩ = Σ_{a<b<c} ω^ν_{abc} τ^a τ^b τ^c ∈ Ω³(Q)`.
pub fn omega_pairing(d: &SplitLie2Data, nu: usize) -> AlgebraElement {
    let gs = d.gens();
    let mut v = AlgebraElement::zero(gs);
    for (idx, val) in &d.omega.values {
        let mono = idx
            .iter()
            .fold(AlgebraElement::one(gs), |acc, a| acc.mul(&AlgebraElement::generator(gs, d.tau(*a))));
        v = v.add(&mono.scale_poly(&val[nu]));
    }
    v
}

/// Reads `(ρ, [·,·], ℓ, ∇, ω)` back from a vector field of split shape.
pub fn extract_data_from_vf(q: &Derivation, m: usize, rq: usize, rb: usize) -> Result<SplitLie2Data, Lie2Error> {
    let expected = split_gens(m, rq, rb);
    if **q.gens() != *expected {
        return Err(Lie2Error::NotSplitShape("generator set differs from the split layout".into()));
    }
    if q.degree() != 1 {
        return Err(Lie2Error::NotSplitShape(format!("degree {} ≠ 1", q.degree())));
    }
    let gs = q.gens().clone();
    let n = rq + rb;
    let mono = |pairs: &[usize]| {
        let mut mo = Monomial::one(n);
        for &g in pairs {
            mo.0[g] += 1;
        }
        mo
    };
    let bad = |slot: Slot, mo: &Monomial| {
        Lie2Error::NotSplitShape(format!(
            "Q({}) has term {}",
            gs.slot_name(slot),
            AlgebraElement::monomial_string(&gs, mo)
        ))
    };
    let mut anchor = vec![zero_vec(m, m); rq];
    for i in 0..m {
        let v = q.value(Slot::Base(i));
        for (mo, p) in v.terms() {
            match (0..rq).find(|&a| *mo == mono(&[a])) {
                Some(a) => anchor[a][i] = p.clone(),
                None => return Err(bad(Slot::Base(i), mo)),
            }
        }
    }
    let mut upper = BTreeMap::new();
    let mut ell = vec![zero_vec(m, rq); rb];
    for c in 0..rq {
        let v = q.value(Slot::Gen(c));
        'terms: for (mo, p) in v.terms() {
            for (a, b) in (0..rq).tuple_combinations() {
                if *mo == mono(&[a, b]) {
                    upper.entry((a, b)).or_insert_with(|| zero_vec(m, rq))[c] = -p;
                    continue 'terms;
                }
            }
            for mu in 0..rb {
                if *mo == mono(&[rq + mu]) {
                    ell[mu][c] = p.clone();
                    continue 'terms;
                }
            }
            return Err(bad(Slot::Gen(c), mo));
        }
    }
    let mut nabla = vec![vec![zero_vec(m, rb); rb]; rq];
    let mut omega_vals: BTreeMap<Vec<usize>, PolyVec> = BTreeMap::new();
    for nu in 0..rb {
        let v = q.value(Slot::Gen(rq + nu));
        'terms2: for (mo, p) in v.terms() {
            for a in 0..rq {
                for la in 0..rb {
                    if *mo == mono(&[a, rq + la]) {
                        nabla[a][nu][la] = p.clone();
                        continue 'terms2;
                    }
                }
            }
            for (a, b, c) in (0..rq).tuple_combinations() {
                if *mo == mono(&[a, b, c]) {
                    omega_vals.entry(vec![a, b, c]).or_insert_with(|| zero_vec(m, rb))[nu] = -p;
                    continue 'terms2;
                }
            }
            return Err(bad(Slot::Gen(rq + nu), mo));
        }
    }
    let q_alg = DullAlgebroid::from_upper(m, anchor, &upper)?;
    let omega = FormValued::from_fn(m, 3, rq, rb, |idx| {
        omega_vals.get(idx).cloned().unwrap_or_else(|| zero_vec(m, rb))
    });
    SplitLie2Data::new(q_alg, rb, ell, nabla, omega)
}

/// Clauses (i)–(v) plus the two anchor conditions implicit in the notion of
/// a dull bracket compatible with ℓ, each on basis tuples.
///
/// Clause (iii) is `Jac + ℓ∘ω = 0`, the sign forced by `Q² = 0` for the
/// vector field of [`compile_homological_vf`] together with clause (iv).
pub fn lie2_axioms_check(d: &SplitLie2Data) -> CheckReport {
    let (rq, rb) = (d.rq(), d.rb);
    let nd = d.connection_bstar();
    let beta = |mu| d.bstar_basis(mu);
    let mut rep = CheckReport::new("lie2_axioms");

    rep.clause("anchor_bracket", d.q.anchor_defects());
    let mut anchor_ell = Vec::new();
    for mu in 0..rb {
        let v = d.q.anchor_of(&d.ell[mu]);
        if !vec_is_zero(&v) {
            anchor_ell.push(format!("ρ(ℓ(β{})) = {}", mu + 1, fmt_vec(&v)));
        }
    }
    rep.clause("anchor_ell", anchor_ell);

    let mut c1 = Vec::new();
    for mu in 0..rb {
        for nu in mu..rb {
            let v = vec_add(
                &nd.covariant(&d.ell[mu], &beta(nu)),
                &nd.covariant(&d.ell[nu], &beta(mu)),
            );
            if !vec_is_zero(&v) {
                c1.push(format!("(β{}, β{}): {}", mu + 1, nu + 1, fmt_vec(&v)));
            }
        }
    }
    rep.clause("i", c1);

    let mut c2 = Vec::new();
    for a in 0..rq {
        for mu in 0..rb {
            let lhs = d.q.bracket_of(&d.q.basis_section(a), &d.ell[mu]);
            let rhs = d.ell_of(&nd.along(a, &beta(mu)));
            let v = vec_sub(&lhs, &rhs);
            if !vec_is_zero(&v) {
                c2.push(format!("(q{}, β{}): {}", a + 1, mu + 1, fmt_vec(&v)));
            }
        }
    }
    rep.clause("ii", c2);

    let mut c3 = Vec::new();
    for (a, b, c) in (0..rq).tuple_combinations() {
        let v = vec_add(&d.q.jacobiator(a, b, c), &d.ell_of(&d.omega.eval(&[a, b, c])));
        if !vec_is_zero(&v) {
            c3.push(format!("(q{}, q{}, q{}): {}", a + 1, b + 1, c + 1, fmt_vec(&v)));
        }
    }
    rep.clause("iii", c3);

    let mut c4 = Vec::new();
    for (a, b) in (0..rq).tuple_combinations() {
        let curv = nd.curvature(a, b);
        for mu in 0..rb {
            let w = d.omega.eval_sections(&[d.q.basis_section(a), d.q.basis_section(b), d.ell[mu].clone()]);
            let v = vec_add(&curv[mu], &w);
            if !vec_is_zero(&v) {
                c4.push(format!("(q{}, q{}, β{}): {}", a + 1, b + 1, mu + 1, fmt_vec(&v)));
            }
        }
    }
    rep.clause("iv", c4);

    let dw = koszul_d(&d.q, Some(&nd), &d.omega).expect("shapes agree");
    let c5 = dw
        .values
        .iter()
        .map(|(idx, v)| {
            format!(
                "({}): {}",
                idx.iter().map(|a| format!("q{}", a + 1)).join(", "),
                fmt_vec(v)
            )
        })
        .collect();
    rep.clause("v", c5);
    rep
}

/// `Q² = 0` checked on generators of the compiled vector field.
pub fn q_square_check(d: &SplitLie2Data) -> CheckReport {
    let q = compile_homological_vf(d);
    let failures = q
        .square_check()
        .expect("compiled field has degree 1")
        .into_iter()
        .map(|(s, v)| format!("Q²({}) = {}", d.gens().slot_name(s), v))
        .collect();
    let mut rep = CheckReport::new("q_square");
    rep.clause("q_squared", failures);
    rep
}

/// One mutable structure constant of split Lie 2-algebroid data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Entry {
    Anchor { a: usize, i: usize },
    Bracket { a: usize, b: usize, c: usize },
    Ell { mu: usize, a: usize },
    Nabla { a: usize, nu: usize, la: usize },
    Omega { a: usize, b: usize, c: usize, nu: usize },
}

impl std::fmt::Display for Entry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Entry::Anchor { a, i } => write!(f, "anchor[q{}][x{}]", a + 1, i + 1),
            Entry::Bracket { a, b, c } => write!(f, "bracket[q{},q{}][q{}]", a + 1, b + 1, c + 1),
            Entry::Ell { mu, a } => write!(f, "ell[β{}][q{}]", mu + 1, a + 1),
            Entry::Nabla { a, nu, la } => write!(f, "nabla[q{}][b{}][b{}]", a + 1, nu + 1, la + 1),
            Entry::Omega { a, b, c, nu } => write!(f, "omega[q{},q{},q{}][β{}]", a + 1, b + 1, c + 1, nu + 1),
        }
    }
}

impl SplitLie2Data {
    pub fn entries(&self) -> Vec<Entry> {
        let (m, rq, rb) = (self.nvars(), self.rq(), self.rb);
        let mut out = Vec::new();
        for a in 0..rq {
            for i in 0..m {
                out.push(Entry::Anchor { a, i });
            }
        }
        for (a, b) in (0..rq).tuple_combinations() {
            for c in 0..rq {
                out.push(Entry::Bracket { a, b, c });
            }
        }
        for mu in 0..rb {
            for a in 0..rq {
                out.push(Entry::Ell { mu, a });
            }
        }
        for a in 0..rq {
            for nu in 0..rb {
                for la in 0..rb {
                    out.push(Entry::Nabla { a, nu, la });
                }
            }
        }
        for (a, b, c) in (0..rq).tuple_combinations() {
            for nu in 0..rb {
                out.push(Entry::Omega { a, b, c, nu });
            }
        }
        out
    }

    pub fn entry(&self, e: Entry) -> Poly {
        match e {
            Entry::Anchor { a, i } => self.q.anchor[a][i].clone(),
            Entry::Bracket { a, b, c } => self.q.bracket[a][b][c].clone(),
            Entry::Ell { mu, a } => self.ell[mu][a].clone(),
            Entry::Nabla { a, nu, la } => self.nabla[a][nu][la].clone(),
            Entry::Omega { a, b, c, nu } => self.omega.eval(&[a, b, c])[nu].clone(),
        }
    }

    /// Copy with `delta` added to one entry (skew partners updated).
    pub fn mutate(&self, e: Entry, delta: &Poly) -> SplitLie2Data {
        let mut anchor = self.q.anchor.clone();
        let mut bracket = self.q.bracket.clone();
        let mut ell = self.ell.clone();
        let mut nabla = self.nabla.clone();
        let mut omega = self.omega.clone();
        match e {
            Entry::Anchor { a, i } => anchor[a][i] = &anchor[a][i] + delta,
            Entry::Bracket { a, b, c } => {
                bracket[a][b][c] = &bracket[a][b][c] + delta;
                bracket[b][a][c] = &bracket[b][a][c] - delta;
            }
            Entry::Ell { mu, a } => ell[mu][a] = &ell[mu][a] + delta,
            Entry::Nabla { a, nu, la } => nabla[a][nu][la] = &nabla[a][nu][la] + delta,
            Entry::Omega { a, b, c, nu } => {
                let key = vec![a, b, c];
                let mut v = omega.eval(&key);
                v[nu] = &v[nu] + delta;
                if vec_is_zero(&v) {
                    omega.values.remove(&key);
                } else {
                    omega.values.insert(key, v);
                }
            }
        }
        let q = DullAlgebroid::new(self.nvars(), anchor, bracket).expect("mutation keeps skew symmetry");
        SplitLie2Data::new(q, self.rb, ell, nabla, omega).expect("mutation keeps shapes")
    }

    /// Random single-entry mutation with a nonzero rational or monomial shift.
    pub fn random_mutation<R: Rng>(&self, rng: &mut R) -> Option<(Entry, Poly, SplitLie2Data)> {
        let entries = self.entries();
        if entries.is_empty() {
            return None;
        }
        let e = entries[rng.gen_range(0..entries.len())];
        let m = self.nvars();
        let mut num = rng.gen_range(1..=3i64);
        if rng.gen_bool(0.5) {
            num = -num;
        }
        let den = rng.gen_range(1..=2i64);
        let c = Rational::new(num.into(), den.into());
        let delta = if m > 0 && rng.gen_bool(0.3) {
            let mut exps = vec![0u32; m];
            exps[rng.gen_range(0..m)] = 1;
            Poly::monomial(c, exps)
        } else {
            Poly::constant(m, c)
        };
        Some((e, delta.clone(), self.mutate(e, &delta)))
    }
}

/// Lie 2-algebra on `g0 →ℓ g1` with constant brackets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lie2AlgebraData {
    pub dim0: usize,
    pub dim1: usize,
    /// `ell[y] = ℓ(e0_y) ∈ g1`.
    pub ell: Vec<Vec<Rational>>,
    /// `br11[x][y] = [e1_x, e1_y] ∈ g1`.
    pub br11: Vec<Vec<Vec<Rational>>>,
    /// `br10[x][y] = [e1_x, e0_y] ∈ g0`.
    pub br10: Vec<Vec<Vec<Rational>>>,
    /// `br111` on increasing triples, values in g0.
    pub br111: BTreeMap<Vec<usize>, Vec<Rational>>,
}

fn rzero(n: usize) -> Vec<Rational> {
    vec![Rational::zero(); n]
}

fn radd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn rsub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn rscale(c: &Rational, a: &[Rational]) -> Vec<Rational> {
    a.iter().map(|x| c * x).collect()
}

fn rfmt(v: &[Rational]) -> String {
    format!("[{}]", v.iter().map(crate::scalars::format_rational).join(", "))
}

impl Lie2AlgebraData {
    pub fn new(
        ell: Vec<Vec<Rational>>,
        br11: Vec<Vec<Vec<Rational>>>,
        br10: Vec<Vec<Vec<Rational>>>,
        br111: BTreeMap<Vec<usize>, Vec<Rational>>,
        dim0: usize,
        dim1: usize,
    ) -> Result<Self, Lie2Error> {
        for x in 0..dim1 {
            for y in 0..dim1 {
                if radd(&br11[x][y], &br11[y][x]).iter().any(|c| !c.is_zero()) {
                    return Err(Lie2Error::NotAntisymmetric(format!("[e{},e{}]", x + 1, y + 1)));
                }
            }
        }
        for k in br111.keys() {
            if k.len() != 3 || !(k[0] < k[1] && k[1] < k[2]) {
                return Err(Lie2Error::NotAntisymmetric(format!("trilinear key {k:?} not increasing")));
            }
        }
        Ok(Lie2AlgebraData {
            dim0,
            dim1,
            ell,
            br11,
            br10,
            br111,
        })
    }

    fn b11(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let mut out = rzero(self.dim1);
        for i in 0..self.dim1 {
            for j in 0..self.dim1 {
                let c = &x[i] * &y[j];
                if !c.is_zero() {
                    out = radd(&out, &rscale(&c, &self.br11[i][j]));
                }
            }
        }
        out
    }

    fn b10(&self, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
        let mut out = rzero(self.dim0);
        for i in 0..self.dim1 {
            for j in 0..self.dim0 {
                let c = &x[i] * &y[j];
                if !c.is_zero() {
                    out = radd(&out, &rscale(&c, &self.br10[i][j]));
                }
            }
        }
        out
    }

    fn tri_basis(&self, idx: &[usize]) -> Vec<Rational> {
        match crate::algebroid::sort_sign(idx) {
            None => rzero(self.dim0),
            Some((neg, s)) => {
                let v = self.br111.get(&s).cloned().unwrap_or_else(|| rzero(self.dim0));
                if neg {
                    rscale(&-Rational::one(), &v)
                } else {
                    v
                }
            }
        }
    }

    fn b111(&self, x: &[Rational], y: &[Rational], z: &[Rational]) -> Vec<Rational> {
        let mut out = rzero(self.dim0);
        for i in 0..self.dim1 {
            for j in 0..self.dim1 {
                for k in 0..self.dim1 {
                    let c = &x[i] * &y[j] * &z[k];
                    if !c.is_zero() {
                        out = radd(&out, &rscale(&c, &self.tri_basis(&[i, j, k])));
                    }
                }
            }
        }
        out
    }

    fn l(&self, y: &[Rational]) -> Vec<Rational> {
        let mut out = rzero(self.dim1);
        for (j, c) in y.iter().enumerate() {
            if !c.is_zero() {
                out = radd(&out, &rscale(c, &self.ell[j]));
            }
        }
        out
    }

    fn e1(&self, i: usize) -> Vec<Rational> {
        let mut v = rzero(self.dim1);
        v[i] = Rational::one();
        v
    }

    fn e0(&self, i: usize) -> Vec<Rational> {
        let mut v = rzero(self.dim0);
        v[i] = Rational::one();
        v
    }
}

/// Items (1)–(5) including the ten-term higher Jacobi identity, by basis enumeration.
/// Item (3) reads `Jac = −ℓ[x,y,z]`, matching clause (iii) of [`lie2_axioms_check`].
pub fn lie2_algebra_axioms_check(g: &Lie2AlgebraData) -> CheckReport {
    let (n0, n1) = (g.dim0, g.dim1);
    let mut rep = CheckReport::new("lie2_algebra_axioms");
    let mut f1 = Vec::new();
    for x in 0..n0 {
        for y in x..n0 {
            let v = radd(&g.b10(&g.ell[x], &g.e0(y)), &g.b10(&g.ell[y], &g.e0(x)));
            if v.iter().any(|c| !c.is_zero()) {
                f1.push(format!("(y{}, y{}): {}", x + 1, y + 1, rfmt(&v)));
            }
        }
    }
    rep.clause("1", f1);
    let mut f2 = Vec::new();
    for x in 0..n1 {
        for y in 0..n0 {
            let v = rsub(&g.b11(&g.e1(x), &g.ell[y]), &g.l(&g.br10[x][y]));
            if v.iter().any(|c| !c.is_zero()) {
                f2.push(format!("(x{}, y{}): {}", x + 1, y + 1, rfmt(&v)));
            }
        }
    }
    rep.clause("2", f2);
    let mut f3 = Vec::new();
    for (x, y, z) in (0..n1).tuple_combinations() {
        let (ex, ey, ez) = (g.e1(x), g.e1(y), g.e1(z));
        let jac = rsub(
            &rsub(&g.b11(&ex, &g.b11(&ey, &ez)), &g.b11(&g.b11(&ex, &ey), &ez)),
            &g.b11(&ey, &g.b11(&ex, &ez)),
        );
        let v = radd(&jac, &g.l(&g.tri_basis(&[x, y, z])));
        if v.iter().any(|c| !c.is_zero()) {
            f3.push(format!("(x{}, x{}, x{}): {}", x + 1, y + 1, z + 1, rfmt(&v)));
        }
    }
    rep.clause("3", f3);
    let mut f4 = Vec::new();
    for x in 0..n1 {
        for y in 0..n1 {
            for z in 0..n0 {
                let (ex, ey, ez) = (g.e1(x), g.e1(y), g.e0(z));
                let lhs = rsub(
                    &radd(&g.b10(&g.b11(&ex, &ey), &ez), &g.b10(&ey, &g.b10(&ex, &ez))),
                    &g.b10(&ex, &g.b10(&ey, &ez)),
                );
                let v = rsub(&lhs, &g.b111(&ex, &ey, &g.ell[z]));
                if v.iter().any(|c| !c.is_zero()) {
                    f4.push(format!("(x{}, x{}, y{}): {}", x + 1, y + 1, z + 1, rfmt(&v)));
                }
            }
        }
    }
    rep.clause("4", f4);
    let mut f5 = Vec::new();
    for idx in (0..4).map(|_| 0..n1).multi_cartesian_product() {
        let (x, y, z, w) = (g.e1(idx[0]), g.e1(idx[1]), g.e1(idx[2]), g.e1(idx[3]));
        let terms: [(i64, Vec<Rational>); 10] = [
            (1, g.b10(&x, &g.b111(&y, &z, &w))),
            (-1, g.b10(&y, &g.b111(&x, &z, &w))),
            (1, g.b10(&z, &g.b111(&x, &y, &w))),
            (-1, g.b10(&w, &g.b111(&x, &y, &z))),
            (-1, g.b111(&g.b11(&x, &y), &z, &w)),
            (1, g.b111(&g.b11(&x, &z), &y, &w)),
            (-1, g.b111(&g.b11(&x, &w), &y, &z)),
            (-1, g.b111(&g.b11(&y, &z), &x, &w)),
            (1, g.b111(&g.b11(&y, &w), &x, &z)),
            (-1, g.b111(&g.b11(&z, &w), &x, &y)),
        ];
        let total = terms
            .iter()
            .fold(rzero(n0), |acc, (s, v)| radd(&acc, &rscale(&rat(*s), v)));
        if total.iter().any(|c| !c.is_zero()) {
            f5.push(format!(
                "({}): {}",
                idx.iter().map(|i| format!("x{}", i + 1)).join(", "),
                rfmt(&total)
            ));
        }
    }
    rep.clause("5", f5);
    rep
}

/// Point-base split data with `Q = g1`, `B* = g0`, `∇*_x y = [x, y]`, `ω = [·,·,·]`.
pub fn lie2_algebra_to_split(g: &Lie2AlgebraData) -> SplitLie2Data {
    let (n0, n1) = (g.dim0, g.dim1);
    let pv = |v: &[Rational]| -> PolyVec { v.iter().map(|c| Poly::constant(0, c.clone())).collect() };
    let bracket = (0..n1).map(|x| (0..n1).map(|y| pv(&g.br11[x][y])).collect()).collect();
    let q = DullAlgebroid::new(0, vec![vec![]; n1], bracket).expect("antisymmetry checked at construction");
    let ell = (0..n0).map(|y| pv(&g.ell[y])).collect();
    // ∇*_{q_a} β_λ = Σ_ν dual[a][λ][ν] β_ν with dual[a][λ][ν] = −nabla[a][ν][λ].
    let nabla = (0..n1)
        .map(|a| {
            (0..n0)
                .map(|nu| (0..n0).map(|la| Poly::constant(0, -g.br10[a][la][nu].clone())).collect())
                .collect()
        })
        .collect();
    let omega = FormValued::from_fn(0, 3, n1, n0, |idx| pv(&g.tri_basis(idx)));
    SplitLie2Data::new(q, n0, ell, nabla, omega).expect("consistent shapes")
}

/// Inverse of [`lie2_algebra_to_split`] for point-base data.
pub fn split_to_lie2_algebra(d: &SplitLie2Data) -> Result<Lie2AlgebraData, Lie2Error> {
    if d.nvars() != 0 {
        return Err(Lie2Error::Shape("Lie 2-algebras live over a point".into()));
    }
    let (n0, n1) = (d.rb, d.rq());
    let c = |p: &Poly| p.constant_term();
    let rv = |v: &PolyVec| -> Vec<Rational> { v.iter().map(c).collect() };
    let br11 = (0..n1).map(|x| (0..n1).map(|y| rv(&d.q.bracket[x][y])).collect()).collect();
    let br10 = (0..n1)
        .map(|a| (0..n0).map(|la| (0..n0).map(|nu| -c(&d.nabla[a][nu][la])).collect()).collect())
        .collect();
    let ell = d.ell.iter().map(rv).collect();
    let br111 = d.omega.values.iter().map(|(k, v)| (k.clone(), rv(v))).collect();
    Lie2AlgebraData::new(ell, br11, br10, br111, n0, n1)
}

/// Structure constants of a Lie algebra, `[e_i, e_j]` for `i < j`.
pub type LieConstants = BTreeMap<(usize, usize), Vec<Rational>>;

pub fn lie_bracket(c: &LieConstants, n: usize, x: &[Rational], y: &[Rational]) -> Vec<Rational> {
    let mut out = rzero(n);
    for ((i, j), v) in c {
        let coeff = &x[*i] * &y[*j] - &x[*j] * &y[*i];
        if !coeff.is_zero() {
            out = radd(&out, &rscale(&coeff, v));
        }
    }
    out
}

pub fn lie_jacobi_defects(c: &LieConstants, n: usize) -> Vec<String> {
    let e = |i: usize| {
        let mut v = rzero(n);
        v[i] = Rational::one();
        v
    };
    let br = |x: &[Rational], y: &[Rational]| lie_bracket(c, n, x, y);
    (0..n)
        .tuple_combinations()
        .filter_map(|(i, j, k)| {
            let (a, b, cc) = (e(i), e(j), e(k));
            let s = radd(&radd(&br(&a, &br(&b, &cc)), &br(&b, &br(&cc, &a))), &br(&cc, &br(&a, &b)));
            s.iter().any(|x| !x.is_zero()).then(|| format!("(e{}, e{}, e{}): {}", i + 1, j + 1, k + 1, rfmt(&s)))
        })
        .collect()
}

/// Derivations of a Lie algebra as n×n matrices (column l = D e_l).
pub fn lie_derivations(c: &LieConstants, n: usize) -> Vec<Matrix> {
    let idx = |k: usize, l: usize| k * n + l;
    let coeff = |i: usize, j: usize, k: usize| -> Rational {
        if i < j {
            c.get(&(i, j)).map_or_else(Rational::zero, |v| v[k].clone())
        } else if i > j {
            c.get(&(j, i)).map_or_else(Rational::zero, |v| -v[k].clone())
        } else {
            Rational::zero()
        }
    };
    let mut rows = Vec::new();
    for (i, j) in (0..n).tuple_combinations() {
        for r in 0..n {
            let mut row = rzero(n * n);
            // D[e_i,e_j] − [De_i,e_j] − [e_i,De_j] at component r
            for k in 0..n {
                row[idx(r, k)] += coeff(i, j, k);
                row[idx(k, i)] -= coeff(k, j, r);
                row[idx(k, j)] -= coeff(i, k, r);
            }
            rows.push(row);
        }
    }
    linalg::nullspace(&rows, n * n)
        .into_iter()
        .map(|v| (0..n).map(|k| (0..n).map(|l| v[idx(k, l)].clone()).collect()).collect())
        .collect()
}

/// Coordinates of `target` in the span of `basis` (flattened matrices).
fn coords(basis: &[Matrix], target: &Matrix) -> Option<Vec<Rational>> {
    let flat = |m: &Matrix| -> Vec<Rational> { m.iter().flatten().cloned().collect() };
    let cols: Vec<Vec<Rational>> = basis.iter().map(flat).collect();
    let t = flat(target);
    let rows = t.len();
    let mut aug: Matrix = (0..rows)
        .map(|r| cols.iter().map(|c| c[r].clone()).chain(std::iter::once(t[r].clone())).collect())
        .collect();
    let pivots = linalg::rref(&mut aug);
    let k = basis.len();
    if pivots.contains(&k) {
        return None;
    }
    let mut sol = rzero(k);
    for (r, &p) in pivots.iter().enumerate() {
        sol[p] = aug[r][k].clone();
    }
    Some(sol)
}

/// The derivation Lie 2-algebra `ad: g → Der(g)`.
pub fn build_derivation_lie2(c: &LieConstants, n: usize) -> Result<Lie2AlgebraData, Lie2Error> {
    let defects = lie_jacobi_defects(c, n);
    if !defects.is_empty() {
        return Err(Lie2Error::JacobiFailure(defects.join("; ")));
    }
    let der = lie_derivations(c, n);
    let d = der.len();
    let e = |i: usize| {
        let mut v = rzero(n);
        v[i] = Rational::one();
        v
    };
    let ad = |x: usize| -> Matrix {
        let cols: Vec<Vec<Rational>> = (0..n).map(|l| lie_bracket(c, n, &e(x), &e(l))).collect();
        (0..n).map(|k| (0..n).map(|l| cols[l][k].clone()).collect()).collect()
    };
    let ell = (0..n)
        .map(|x| coords(&der, &ad(x)).expect("inner derivations are derivations"))
        .collect();
    let br11 = (0..d)
        .map(|a| {
            (0..d)
                .map(|b| {
                    let comm = linalg::mat_mul(&der[a], &der[b])
                        .iter()
                        .zip(linalg::mat_mul(&der[b], &der[a]))
                        .map(|(r1, r2)| rsub(r1, &r2))
                        .collect();
                    coords(&der, &comm).expect("derivations close under commutators")
                })
                .collect()
        })
        .collect();
    let br10 = (0..d)
        .map(|a| (0..n).map(|y| linalg::mat_vec(&der[a], &e(y))).collect())
        .collect();
    Lie2AlgebraData::new(ell, br11, br10, BTreeMap::new(), n, d)
}

pub fn so3_constants() -> LieConstants {
    let v = |a: i64, b: i64, c: i64| vec![rat(a), rat(b), rat(c)];
    let mut c = LieConstants::new();
    c.insert((0, 1), v(0, 0, 1));
    c.insert((1, 2), v(1, 0, 0));
    c.insert((0, 2), v(0, -1, 0));
    c
}

pub fn aff1_constants() -> LieConstants {
    let mut c = LieConstants::new();
    c.insert((0, 1), vec![rat(0), rat(1)]);
    c
}

pub fn constants_to_upper(c: &LieConstants, nvars: usize) -> BTreeMap<(usize, usize), PolyVec> {
    c.iter()
        .map(|(k, v)| (*k, v.iter().map(|x| Poly::constant(nvars, x.clone())).collect()))
        .collect()
}

/// so(3) brackets over a point as polynomial sections.
pub fn so3_bracket() -> BTreeMap<(usize, usize), PolyVec> {
    constants_to_upper(&so3_constants(), 0)
}

/// Killing form of a Lie algebra, `K(x,y) = tr(ad_x ad_y)`.
pub fn killing_form(c: &LieConstants, n: usize) -> Matrix {
    let e = |i: usize| {
        let mut v = rzero(n);
        v[i] = Rational::one();
        v
    };
    let ad = |x: usize| -> Matrix {
        let cols: Vec<Vec<Rational>> = (0..n).map(|l| lie_bracket(c, n, &e(x), &e(l))).collect();
        (0..n).map(|k| (0..n).map(|l| cols[l][k].clone()).collect()).collect()
    };
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let p = linalg::mat_mul(&ad(i), &ad(j));
                    (0..n).map(|k| p[k][k].clone()).sum()
                })
                .collect()
        })
        .collect()
}

/// Fixtures shared by tests, the CLI and the acceptance suite.
pub mod fixtures {
    use super::*;

    pub fn abelian() -> SplitLie2Data {
        SplitLie2Data::zero(0, 2, 1)
    }

    pub fn aff1_derivation() -> SplitLie2Data {
        let g = build_derivation_lie2(&aff1_constants(), 2).expect("aff(1) is a Lie algebra");
        lie2_algebra_to_split(&g)
    }

    /// so(3) with `g0 = ℝ`, `ℓ = 0` and `ω(x,y,z) = K([x,y],z)`.
    pub fn string_so3() -> SplitLie2Data {
        let c = so3_constants();
        let k = killing_form(&c, 3);
        let e = |i: usize| {
            let mut v = rzero(3);
            v[i] = Rational::one();
            v
        };
        let mut br111 = BTreeMap::new();
        for (x, y, z) in (0..3).tuple_combinations() {
            let xy = lie_bracket(&c, 3, &e(x), &e(y));
            let val: Rational = (0..3).map(|i| &xy[i] * &k[i][z]).sum();
            if !val.is_zero() {
                br111.insert(vec![x, y, z], vec![val]);
            }
        }
        let br11 = (0..3).map(|x| (0..3).map(|y| lie_bracket(&c, 3, &e(x), &e(y))).collect()).collect();
        let g = Lie2AlgebraData::new(vec![rzero(3)], br11, vec![vec![rzero(1)]; 3], br111, 1, 3)
            .expect("string data is antisymmetric");
        lie2_algebra_to_split(&g)
    }

    /// `Q = Tℝ²` with ρ = id and the coordinate bracket; B = 0.
    pub fn tangent_r2() -> SplitLie2Data {
        let q = DullAlgebroid::tangent(2);
        SplitLie2Data::new(q, 0, vec![], vec![vec![]; 2], FormValued::zero(2, 3, 2, 0)).unwrap()
    }

    /// TM-connection on Q = Tℝ² with the single Christoffel symbol `∇_{∂x}∂y = x∂x`.
    pub fn tangent_r2_connection() -> Connection {
        let mut c = Connection::trivial(DullAlgebroid::tangent(2), 2);
        c.gamma[0][1] = vec![Poly::var(2, 0), Poly::zero(2)];
        c
    }

    /// Point base, `Q = so(3)`, `B = 0`.
    pub fn so3_point() -> SplitLie2Data {
        let q = DullAlgebroid::from_upper(0, vec![vec![]; 3], &so3_bracket()).unwrap();
        SplitLie2Data::new(q, 0, vec![], vec![vec![]; 3], FormValued::zero(0, 3, 3, 0)).unwrap()
    }

    /// Point base Lie algebra with `B = 0` from structure constants.
    pub fn lie_algebra(c: &LieConstants, n: usize) -> SplitLie2Data {
        let q = DullAlgebroid::from_upper(0, vec![vec![]; n], &constants_to_upper(c, 0)).unwrap();
        SplitLie2Data::new(q, 0, vec![], vec![vec![]; n], FormValued::zero(0, 3, n, 0)).unwrap()
    }

    pub fn by_name(name: &str) -> Option<SplitLie2Data> {
        match name {
            "FX-ABELIAN" => Some(abelian()),
            "FX-AFF1DER" => Some(aff1_derivation()),
            "FX-STRING-SO3" => Some(string_so3()),
            "FX-TANGENT-R2" => Some(tangent_r2()),
            "FX-SO3-PAIR" => Some(so3_point()),
            _ => None,
        }
    }

    pub const LIE2_FIXTURES: [&str; 4] = ["FX-ABELIAN", "FX-AFF1DER", "FX-STRING-SO3", "FX-TANGENT-R2"];
}


/// `b^ν ↦ b^ν + s·Σ_{a<b} σ^ν_{ab} τ^a τ^b` with `s = ±1`.
pub fn splitting_map(d: &SplitLie2Data, sigma: &FormValued, s: i64) -> AlgebraMap {
    let gs = d.gens();
    let mut f = AlgebraMap::identity(gs);
    for nu in 0..d.rb {
        let mut img = AlgebraElement::generator(gs, d.b(nu));
        for (idx, val) in &sigma.values {
            let tt = AlgebraElement::generator(gs, d.tau(idx[0])).mul(&AlgebraElement::generator(gs, d.tau(idx[1])));
            img = img.add(&tt.scale_poly(&val[nu]).scale_int(s));
        }
        f.set_image(d.b(nu), img);
    }
    f
}

/// `F⁻¹ ∘ Q ∘ F` for the splitting map `F` of `sigma`.
pub fn conjugate_by_splitting(d: &SplitLie2Data, sigma: &FormValued) -> Derivation {
    let q = compile_homological_vf(d);
    let f = splitting_map(d, sigma, 1);
    let finv = splitting_map(d, sigma, -1);
    let mut out = Derivation::zero(d.gens(), 1);
    for slot in d.gens().slots() {
        let img = match slot {
            Slot::Base(_) => AlgebraElement::slot(d.gens(), slot),
            Slot::Gen(g) => f.image(g).clone(),
        };
        out.set(slot, finv.apply(&q.apply(&img)));
    }
    out
}

/// Zero section of Q for the data.
pub fn zero_q(d: &SplitLie2Data) -> PolyVec {
    zero_vec(d.nvars(), d.rq())
}

pub fn neg_vec(v: &PolyVec) -> PolyVec {
    vec_neg(v)
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fixtures_pass_both_checks() {
        for name in fixtures::LIE2_FIXTURES {
            let d = by_name(name).unwrap();
            let ax = lie2_axioms_check(&d);
            assert!(ax.passed(), "{name}: {:?}", ax.failing());
            assert!(q_square_check(&d).passed(), "{name}");
        }
    }

    #[test]
    fn abelian_compiles_to_zero() {
        assert!(compile_homological_vf(&abelian()).is_zero());
        let z = Derivation::zero(abelian().gens(), 1);
        assert_eq!(extract_data_from_vf(&z, 0, 2, 1).unwrap(), abelian());
    }

    #[test]
    fn round_trips() {
        for name in fixtures::LIE2_FIXTURES {
            let d = by_name(name).unwrap();
            let q = compile_homological_vf(&d);
            assert_eq!(extract_data_from_vf(&q, d.nvars(), d.rq(), d.rb).unwrap(), d, "{name}");
        }
    }

    #[test]
    fn extraction_rejects_stray_terms() {
        let d = abelian();
        let gs = d.gens().clone();
        let mut q = Derivation::zero(&gs, 1);
        q.set(Slot::Gen(2), AlgebraElement::parse(&gs, "t1*b1").unwrap());
        assert!(extract_data_from_vf(&q, 0, 2, 1).is_ok());
        q.set(Slot::Gen(0), AlgebraElement::parse(&gs, "t1*t2").unwrap().add(&AlgebraElement::parse(&gs, "t1*t2*t1").unwrap()));
        q.set(Slot::Gen(1), AlgebraElement::parse(&gs, "b1*t1*t2").unwrap());
        assert!(matches!(extract_data_from_vf(&q, 0, 2, 1), Err(Lie2Error::NotSplitShape(_))));
    }

    #[test]
    fn lie_algebra_compiles_to_chevalley_eilenberg() {
        // dτ^c(e_a, e_b) = −τ^c([e_a, e_b]); as an element: −½ Σ_{a,b} C^c_ab τ^a τ^b.
        let d = so3_point();
        let q = compile_homological_vf(&d);
        let gs = d.gens().clone();
        let c = so3_constants();
        for k in 0..3 {
            let mut ce = AlgebraElement::zero(&gs);
            for a in 0..3 {
                for b in 0..3 {
                    let mut ea = rzero(3);
                    ea[a] = Rational::one();
                    let mut eb = rzero(3);
                    eb[b] = Rational::one();
                    let coeff = lie_bracket(&c, 3, &ea, &eb)[k].clone() * crate::scalars::ratio(-1, 2);
                    let tt = AlgebraElement::generator(&gs, a).mul(&AlgebraElement::generator(&gs, b));
                    ce = ce.add(&tt.scale(&coeff));
                }
            }
            assert_eq!(q.value(Slot::Gen(k)), &ce);
        }
    }

    #[test]
    fn string_cartan_form() {
        let d = string_so3();
        assert_eq!(d.omega.eval(&[0, 1, 2]), vec![Poly::int(0, -2)]);
        let q = compile_homological_vf(&d);
        let gs = d.gens().clone();
        assert_eq!(q.value(Slot::Gen(3)), &AlgebraElement::parse(&gs, "2*t1*t2*t3").unwrap());
    }

    #[test]
    fn derivation_dimensions() {
        let mut ab = LieConstants::new();
        ab.insert((0, 1), vec![rat(0), rat(0)]);
        assert_eq!(build_derivation_lie2(&ab, 2).unwrap().dim1, 4);
        assert_eq!(build_derivation_lie2(&aff1_constants(), 2).unwrap().dim1, 2);
        assert_eq!(build_derivation_lie2(&so3_constants(), 3).unwrap().dim1, 3);
        for (c, n) in [(ab, 2), (aff1_constants(), 2), (so3_constants(), 3)] {
            let g = build_derivation_lie2(&c, n).unwrap();
            assert!(lie2_algebra_axioms_check(&g).passed());
        }
    }

    #[test]
    fn non_lie_input_rejected() {
        let mut c = so3_constants();
        c.insert((0, 1), vec![rat(0), rat(0), rat(2)]);
        c.insert((0, 2), vec![rat(1), rat(0), rat(0)]);
        assert!(matches!(build_derivation_lie2(&c, 3), Err(Lie2Error::JacobiFailure(_))));
    }

    #[test]
    fn broken_antisymmetry_rejected() {
        let br11 = vec![vec![vec![rat(1)]]];
        assert!(Lie2AlgebraData::new(vec![], br11, vec![vec![]], BTreeMap::new(), 0, 1).is_err());
    }

    #[test]
    fn string_lie2_algebra_round_trip() {
        let d = string_so3();
        let g = split_to_lie2_algebra(&d).unwrap();
        assert!(lie2_algebra_axioms_check(&g).passed());
        assert_eq!(lie2_algebra_to_split(&g), d);
    }

    #[test]
    fn splitting_conjugate_satisfies_axioms() {
        let d = lie2_algebra_to_split(&build_derivation_lie2(&so3_constants(), 3).unwrap());
        let sigma = FormValued::from_fn(0, 2, 3, 3, |idx| {
            vec![Poly::int(0, idx[0] as i64 + 1), Poly::int(0, -2), Poly::int(0, idx[1] as i64)]
        });
        let q2 = conjugate_by_splitting(&d, &sigma);
        assert!(q2.square_check().unwrap().is_empty());
        let d2 = extract_data_from_vf(&q2, 0, 3, 3).unwrap();
        assert!(!d2.omega.is_zero());
        let jac = d2.q.jacobiator(0, 1, 2);
        assert!(!vec_is_zero(&jac));
        assert_eq!(jac, vec_neg(&d2.ell_of(&d2.omega.eval(&[0, 1, 2]))));
        let r = lie2_axioms_check(&d2);
        assert!(r.passed(), "{:?}", r);
        assert!(lie2_algebra_axioms_check(&split_to_lie2_algebra(&d2).unwrap()).passed());
        for mu in 0..3 {
            for a in 0..3 {
                let m = d2.mutate(Entry::Ell { mu, a }, &Poly::int(0, 1));
                assert_eq!(lie2_axioms_check(&m).passed(), q_square_check(&m).passed());
            }
        }
    }

    #[test]
    fn mutations_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for name in fixtures::LIE2_FIXTURES {
            let d = by_name(name).unwrap();
            for _ in 0..20 {
                let (e, delta, m) = d.random_mutation(&mut rng).unwrap();
                let ax = lie2_axioms_check(&m).passed();
                let sq = q_square_check(&m).passed();
                assert_eq!(ax, sq, "{name} {e} += {delta}");
            }
        }
    }
}
