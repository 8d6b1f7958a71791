//! Dull and Lie algebroids with polynomial structure functions, connections,
//! forms with values in a bundle, Koszul differentials and basic connections.

use std::collections::BTreeMap;
use std::sync::Arc;

use itertools::Itertools;
use thiserror::Error;

use crate::report::CheckReport;
use crate::scalars::{unit_vec, vec_add, vec_is_zero, vec_neg, vec_scale, vec_sub, zero_vec, Poly, PolyVec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebroidError {
    #[error("bracket not skew-symmetric at ({0}, {1})")]
    NotSkew(usize, usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Anchored bundle with a skew bracket `[e_a, e_b] = Σ_c C_ab^c e_c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DullAlgebroid {
    pub nvars: usize,
    pub rank: usize,
    /// `anchor[a]` is the vector field ρ(e_a).
    pub anchor: Vec<PolyVec>,
    /// `bracket[a][b]` is the section [e_a, e_b].
    pub bracket: Vec<Vec<PolyVec>>,
}

impl DullAlgebroid {
    pub fn new(
        nvars: usize,
        anchor: Vec<PolyVec>,
        bracket: Vec<Vec<PolyVec>>,
    ) -> Result<Arc<Self>, AlgebroidError> {
        let rank = anchor.len();
        if anchor.iter().any(|v| v.len() != nvars) {
            return Err(AlgebroidError::Shape("anchor rows must have length m".into()));
        }
        if bracket.len() != rank || bracket.iter().any(|r| r.len() != rank || r.iter().any(|v| v.len() != rank)) {
            return Err(AlgebroidError::Shape("bracket must be r x r x r".into()));
        }
        for a in 0..rank {
            for b in a..rank {
                if vec_add(&bracket[a][b], &bracket[b][a]).iter().any(|p| !p.is_zero()) {
                    return Err(AlgebroidError::NotSkew(a, b));
                }
            }
        }
        Ok(Arc::new(DullAlgebroid {
            nvars,
            rank,
            anchor,
            bracket,
        }))
    }

    /// Builds from the upper triangle `a < b` of the bracket.
    pub fn from_upper(
        nvars: usize,
        anchor: Vec<PolyVec>,
        upper: &BTreeMap<(usize, usize), PolyVec>,
    ) -> Result<Arc<Self>, AlgebroidError> {
        let rank = anchor.len();
        let mut bracket = vec![vec![zero_vec(nvars, rank); rank]; rank];
        for (&(a, b), v) in upper {
            if a >= b || b >= rank || v.len() != rank {
                return Err(AlgebroidError::Shape(format!("bad bracket entry ({a}, {b})")));
            }
            bracket[a][b] = v.clone();
            bracket[b][a] = vec_neg(v);
        }
        DullAlgebroid::new(nvars, anchor, bracket)
    }

    /// TM with the coordinate frame.
    pub fn tangent(nvars: usize) -> Arc<Self> {
        let anchor = (0..nvars).map(|i| unit_vec(nvars, nvars, i)).collect();
        let bracket = vec![vec![zero_vec(nvars, nvars); nvars]; nvars];
        Arc::new(DullAlgebroid {
            nvars,
            rank: nvars,
            anchor,
            bracket,
        })
    }

    pub fn zero_section(&self) -> PolyVec {
        zero_vec(self.nvars, self.rank)
    }

    pub fn basis_section(&self, a: usize) -> PolyVec {
        unit_vec(self.nvars, self.rank, a)
    }

    pub fn anchor_of(&self, q: &[Poly]) -> PolyVec {
        let mut out = zero_vec(self.nvars, self.nvars);
        for (a, qa) in q.iter().enumerate() {
            if !qa.is_zero() {
                out = vec_add(&out, &vec_scale(qa, &self.anchor[a]));
            }
        }
        out
    }

    /// Full bracket with the anchor Leibniz terms.
    pub fn bracket_of(&self, q1: &[Poly], q2: &[Poly]) -> PolyVec {
        let mut out = zero_vec(self.nvars, self.rank);
        for a in 0..self.rank {
            if q1[a].is_zero() {
                continue;
            }
            for b in 0..self.rank {
                if q2[b].is_zero() {
                    continue;
                }
                out = vec_add(&out, &vec_scale(&(&q1[a] * &q2[b]), &self.bracket[a][b]));
            }
        }
        let x1 = self.anchor_of(q1);
        let x2 = self.anchor_of(q2);
        for c in 0..self.rank {
            out[c] = &(&out[c] + &q2[c].directional(&x1)) - &q1[c].directional(&x2);
        }
        out
    }

    pub fn jacobiator(&self, a: usize, b: usize, c: usize) -> PolyVec {
        let (ea, eb, ec) = (self.basis_section(a), self.basis_section(b), self.basis_section(c));
        let t1 = self.bracket_of(&ea, &self.bracket_of(&eb, &ec));
        let t2 = self.bracket_of(&self.bracket_of(&ea, &eb), &ec);
        let t3 = self.bracket_of(&eb, &self.bracket_of(&ea, &ec));
        vec_sub(&vec_sub(&t1, &t2), &t3)
    }

    pub fn jacobi_defects(&self) -> Vec<String> {
        (0..self.rank)
            .tuple_combinations()
            .filter_map(|(a, b, c)| {
                let j = self.jacobiator(a, b, c);
                (!vec_is_zero(&j)).then(|| format!("Jac(e{},e{},e{}) = {}", a + 1, b + 1, c + 1, fmt_vec(&j)))
            })
            .collect()
    }

    pub fn anchor_defects(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (a, b) in (0..self.rank).tuple_combinations() {
            let lhs = self.anchor_of(&self.bracket[a][b]);
            let rhs = vf_bracket(&self.anchor[a], &self.anchor[b]);
            let diff = vec_sub(&lhs, &rhs);
            if !vec_is_zero(&diff) {
                out.push(format!("ρ[e{},e{}] − [ρe{},ρe{}] = {}", a + 1, b + 1, a + 1, b + 1, fmt_vec(&diff)));
            }
        }
        out
    }

    pub fn is_lie(&self) -> bool {
        self.anchor_defects().is_empty() && self.jacobi_defects().is_empty()
    }
}

/// Lie bracket of polynomial vector fields.
pub fn vf_bracket(x: &[Poly], y: &[Poly]) -> PolyVec {
    x.iter()
        .zip(y)
        .map(|(xi, yi)| &yi.directional(x) - &xi.directional(y))
        .collect()
}

pub fn fmt_vec(v: &[Poly]) -> String {
    format!("[{}]", v.iter().map(|p| p.to_string()).join(", "))
}

pub fn anchor_compat_check(d: &DullAlgebroid) -> CheckReport {
    let mut r = CheckReport::new("anchor_compat");
    r.clause("anchor_bracket", d.anchor_defects());
    r
}

pub fn jacobiator(d: &DullAlgebroid, a: usize, b: usize, c: usize) -> PolyVec {
    d.jacobiator(a, b, c)
}

/// S-connection on a trivialized bundle E: `∇_{s_a} e_α = Σ_β gamma[a][α][β] e_β`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    pub source: Arc<DullAlgebroid>,
    pub target_rank: usize,
    pub gamma: Vec<Vec<PolyVec>>,
}

impl Connection {
    pub fn new(source: Arc<DullAlgebroid>, target_rank: usize, gamma: Vec<Vec<PolyVec>>) -> Result<Self, AlgebroidError> {
        if gamma.len() != source.rank
            || gamma.iter().any(|r| r.len() != target_rank || r.iter().any(|v| v.len() != target_rank))
        {
            return Err(AlgebroidError::Shape("christoffel table has wrong shape".into()));
        }
        Ok(Connection {
            source,
            target_rank,
            gamma,
        })
    }

    pub fn trivial(source: Arc<DullAlgebroid>, target_rank: usize) -> Self {
        let nv = source.nvars;
        let gamma = vec![vec![zero_vec(nv, target_rank); target_rank]; source.rank];
        Connection {
            source,
            target_rank,
            gamma,
        }
    }

    pub fn nvars(&self) -> usize {
        self.source.nvars
    }

    /// `∇_s e` for arbitrary sections.
    pub fn covariant(&self, s: &[Poly], e: &[Poly]) -> PolyVec {
        let x = self.source.anchor_of(s);
        let mut out: PolyVec = e.iter().map(|p| p.directional(&x)).collect();
        for (a, sa) in s.iter().enumerate() {
            if sa.is_zero() {
                continue;
            }
            for (al, ea) in e.iter().enumerate() {
                if ea.is_zero() {
                    continue;
                }
                out = vec_add(&out, &vec_scale(&(sa * ea), &self.gamma[a][al]));
            }
        }
        out
    }

    /// `∇_{s_a} e` for a basis section of the source.
    pub fn along(&self, a: usize, e: &[Poly]) -> PolyVec {
        self.covariant(&self.source.basis_section(a), e)
    }

    /// Dual connection on E*: `⟨∇*ε, e⟩ = ρ⟨ε,e⟩ − ⟨ε, ∇e⟩`.
    pub fn dual(&self) -> Connection {
        let n = self.target_rank;
        let gamma = (0..self.source.rank)
            .map(|a| {
                (0..n)
                    .map(|al| (0..n).map(|be| -&self.gamma[a][be][al]).collect())
                    .collect()
            })
            .collect();
        Connection {
            source: self.source.clone(),
            target_rank: n,
            gamma,
        }
    }

    /// Column α of the result is `R(s_a, s_b) e_α`.
    pub fn curvature(&self, a: usize, b: usize) -> Vec<PolyVec> {
        let bracket = &self.source.bracket[a][b];
        (0..self.target_rank)
            .map(|al| {
                let e = unit_vec(self.nvars(), self.target_rank, al);
                let t1 = self.along(a, &self.along(b, &e));
                let t2 = self.along(b, &self.along(a, &e));
                let t3 = self.covariant(bracket, &e);
                vec_sub(&vec_sub(&t1, &t2), &t3)
            })
            .collect()
    }

    pub fn curvature_defects(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (a, b) in (0..self.source.rank).tuple_combinations() {
            for (al, v) in self.curvature(a, b).iter().enumerate() {
                if !vec_is_zero(v) {
                    out.push(format!("R(s{},s{})e{} = {}", a + 1, b + 1, al + 1, fmt_vec(v)));
                }
            }
        }
        out
    }
}

/// E-valued k-form on a dull algebroid, stored on strictly increasing index tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormValued {
    pub nvars: usize,
    pub k: usize,
    pub source_rank: usize,
    pub value_rank: usize,
    pub values: BTreeMap<Vec<usize>, PolyVec>,
}

/// Sign of the permutation sorting `idx`, or `None` on a repeated index.
pub fn sort_sign(idx: &[usize]) -> Option<(bool, Vec<usize>)> {
    let mut v = idx.to_vec();
    let mut neg = false;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                neg = !neg;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((neg, v))
}

impl FormValued {
    pub fn zero(nvars: usize, k: usize, source_rank: usize, value_rank: usize) -> Self {
        FormValued {
            nvars,
            k,
            source_rank,
            value_rank,
            values: BTreeMap::new(),
        }
    }

    /// Builds from a function on sorted index tuples.
    pub fn from_fn(
        nvars: usize,
        k: usize,
        source_rank: usize,
        value_rank: usize,
        f: impl Fn(&[usize]) -> PolyVec,
    ) -> Self {
        let mut out = FormValued::zero(nvars, k, source_rank, value_rank);
        for idx in (0..source_rank).combinations(k) {
            let v = f(&idx);
            if !vec_is_zero(&v) {
                out.values.insert(idx, v);
            }
        }
        out
    }

    pub fn eval(&self, idx: &[usize]) -> PolyVec {
        match sort_sign(idx) {
            None => zero_vec(self.nvars, self.value_rank),
            Some((neg, sorted)) => match self.values.get(&sorted) {
                None => zero_vec(self.nvars, self.value_rank),
                Some(v) if neg => vec_neg(v),
                Some(v) => v.clone(),
            },
        }
    }

    /// Multilinear evaluation on arbitrary sections.
    pub fn eval_sections(&self, args: &[PolyVec]) -> PolyVec {
        let mut out = zero_vec(self.nvars, self.value_rank);
        for idx in (0..self.k).map(|_| 0..self.source_rank).multi_cartesian_product() {
            let mut coeff = Poly::one(self.nvars);
            for (arg, &i) in args.iter().zip(&idx) {
                coeff = &coeff * &arg[i];
                if coeff.is_zero() {
                    break;
                }
            }
            if coeff.is_zero() {
                continue;
            }
            out = vec_add(&out, &vec_scale(&coeff, &self.eval(&idx)));
        }
        if self.k == 0 {
            return self.eval(&[]);
        }
        out
    }

    pub fn add(&self, other: &FormValued) -> FormValued {
        FormValued::from_fn(self.nvars, self.k, self.source_rank, self.value_rank, |idx| {
            vec_add(&self.eval(idx), &other.eval(idx))
        })
    }

    pub fn sub(&self, other: &FormValued) -> FormValued {
        FormValued::from_fn(self.nvars, self.k, self.source_rank, self.value_rank, |idx| {
            vec_sub(&self.eval(idx), &other.eval(idx))
        })
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }
}

/// Koszul differential `d_∇`; with `conn = None` the values are functions
/// differentiated through the anchor.
pub fn koszul_d(
    d: &DullAlgebroid,
    conn: Option<&Connection>,
    tau: &FormValued,
) -> Result<FormValued, AlgebroidError> {
    if tau.source_rank != d.rank {
        return Err(AlgebroidError::Shape("form source rank differs from algebroid rank".into()));
    }
    if let Some(c) = conn {
        if c.target_rank != tau.value_rank || c.source.rank != d.rank {
            return Err(AlgebroidError::Shape("connection does not match form values".into()));
        }
    }
    let k = tau.k;
    let nv = d.nvars;
    let act = |a: usize, v: &PolyVec| -> PolyVec {
        match conn {
            Some(c) => c.along(a, v),
            None => v.iter().map(|p| p.directional(&d.anchor[a])).collect(),
        }
    };
    Ok(FormValued::from_fn(nv, k + 1, d.rank, tau.value_rank, |idx| {
        let mut out = zero_vec(nv, tau.value_rank);
        for i in 0..=k {
            let rest: Vec<usize> = idx.iter().enumerate().filter(|(p, _)| *p != i).map(|(_, v)| *v).collect();
            let t = act(idx[i], &tau.eval(&rest));
            out = if i % 2 == 0 { vec_add(&out, &t) } else { vec_sub(&out, &t) };
        }
        for i in 0..=k {
            for j in i + 1..=k {
                let rest: Vec<usize> = idx
                    .iter()
                    .enumerate()
                    .filter(|(p, _)| *p != i && *p != j)
                    .map(|(_, v)| *v)
                    .collect();
                let br = &d.bracket[idx[i]][idx[j]];
                let mut t = zero_vec(nv, tau.value_rank);
                for (c, coeff) in br.iter().enumerate() {
                    if coeff.is_zero() {
                        continue;
                    }
                    let mut args = vec![c];
                    args.extend(&rest);
                    t = vec_add(&t, &vec_scale(coeff, &tau.eval(&args)));
                }
                out = if (i + j) % 2 == 0 { vec_add(&out, &t) } else { vec_sub(&out, &t) };
            }
        }
        out
    }))
}

/// The basic Q-connections on Q and TM and the basic curvature induced by a
/// TM-connection on Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicData {
    pub on_q: Connection,
    pub on_tm: Connection,
    /// `curvature[a][b][j]` is `R^bas(q_a, q_b) ∂_j ∈ Γ(Q)`.
    pub curvature: Vec<Vec<Vec<PolyVec>>>,
}

impl BasicData {
    pub fn curvature_on(&self, a: usize, b: usize, x: &[Poly]) -> PolyVec {
        let nv = x.len();
        let rank = self.on_q.target_rank;
        let mut out = zero_vec(nv, rank);
        for (j, xj) in x.iter().enumerate() {
            if !xj.is_zero() {
                out = vec_add(&out, &vec_scale(xj, &self.curvature[a][b][j]));
            }
        }
        out
    }
}

pub fn basic_data(conn: &Connection, d: &Arc<DullAlgebroid>) -> Result<BasicData, AlgebroidError> {
    let nv = d.nvars;
    let r = d.rank;
    if conn.source.rank != nv || conn.target_rank != r {
        return Err(AlgebroidError::Shape("expected a TM-connection on Q".into()));
    }
    let gamma_q: Vec<Vec<PolyVec>> = (0..r)
        .map(|a| {
            (0..r)
                .map(|b| vec_add(&d.bracket[a][b], &conn.covariant(&d.anchor[b], &d.basis_section(a))))
                .collect()
        })
        .collect();
    let gamma_tm: Vec<Vec<PolyVec>> = (0..r)
        .map(|a| {
            (0..nv)
                .map(|j| {
                    let dj = unit_vec(nv, nv, j);
                    let br = vf_bracket(&d.anchor[a], &dj);
                    vec_add(&br, &d.anchor_of(&conn.covariant(&dj, &d.basis_section(a))))
                })
                .collect()
        })
        .collect();
    let on_q = Connection::new(d.clone(), r, gamma_q)?;
    let on_tm = Connection::new(d.clone(), nv, gamma_tm)?;
    let curvature = (0..r)
        .map(|a| {
            (0..r)
                .map(|b| {
                    (0..nv)
                        .map(|j| {
                            let x = unit_vec(nv, nv, j);
                            let (qa, qb) = (d.basis_section(a), d.basis_section(b));
                            let nxa = conn.covariant(&x, &qa);
                            let nxb = conn.covariant(&x, &qb);
                            let mut v = vec_neg(&conn.covariant(&x, &d.bracket_of(&qa, &qb)));
                            v = vec_add(&v, &d.bracket_of(&nxa, &qb));
                            v = vec_add(&v, &d.bracket_of(&qa, &nxb));
                            v = vec_add(&v, &conn.covariant(&on_tm.covariant(&qb, &x), &qa));
                            vec_sub(&v, &conn.covariant(&on_tm.covariant(&qa, &x), &qb))
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    Ok(BasicData {
        on_q,
        on_tm,
        curvature,
    })
}

/// The three identities relating basic connections, basic curvature and the Jacobiator.
pub fn basic_identity_check(conn: &Connection, d: &Arc<DullAlgebroid>) -> Result<CheckReport, AlgebroidError> {
    let bd = basic_data(conn, d)?;
    let r = d.rank;
    let nv = d.nvars;
    let mut first = Vec::new();
    let mut second = Vec::new();
    let mut third = Vec::new();
    for a in 0..r {
        for b in 0..r {
            let lhs = bd.on_tm.along(a, &d.anchor[b]);
            let rhs = d.anchor_of(&bd.on_q.along(a, &d.basis_section(b)));
            let diff = vec_sub(&lhs, &rhs);
            if !vec_is_zero(&diff) {
                first.push(format!("(q{}, q{}): {}", a + 1, b + 1, fmt_vec(&diff)));
            }
        }
    }
    for (a, b) in (0..r).tuple_combinations() {
        let r_tm = bd.on_tm.curvature(a, b);
        for j in 0..nv {
            let diff = vec_sub(&d.anchor_of(&bd.curvature[a][b][j]), &r_tm[j]);
            if !vec_is_zero(&diff) {
                second.push(format!("(q{}, q{}, ∂{}): {}", a + 1, b + 1, j + 1, fmt_vec(&diff)));
            }
        }
        let r_q = bd.on_q.curvature(a, b);
        for c in 0..r {
            let lhs = vec_add(&bd.curvature_on(a, b, &d.anchor[c]), &d.jacobiator(a, b, c));
            let diff = vec_sub(&lhs, &r_q[c]);
            if !vec_is_zero(&diff) {
                third.push(format!("(q{}, q{}, q{}): {}", a + 1, b + 1, c + 1, fmt_vec(&diff)));
            }
        }
    }
    let mut rep = CheckReport::new("basic_identities");
    rep.clause("anchor_intertwines", first)
        .clause("anchor_curvature", second)
        .clause("curvature_jacobiator", third);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, n: usize) -> Poly {
        Poly::parse(s, n).unwrap()
    }

    fn tangent_conn(entry: &str) -> Connection {
        let tm = DullAlgebroid::tangent(2);
        let mut c = Connection::trivial(tm, 2);
        c.gamma[0][1] = vec![p(entry, 2), p("0", 2)];
        c
    }

    #[test]
    fn skew_enforced() {
        let bad = vec![vec![vec![Poly::int(0, 1)]]];
        assert!(matches!(
            DullAlgebroid::new(0, vec![vec![]], bad),
            Err(AlgebroidError::NotSkew(0, 0))
        ));
    }

    #[test]
    fn anchor_compat_cases() {
        assert!(anchor_compat_check(&DullAlgebroid::tangent(2)).passed());
        // [e1,e2] = e2 with ρ(e1) = ∂x, ρ(e2) = x∂x fails: [∂x, x∂x] = ∂x ≠ ρ(e2).
        let mut upper = BTreeMap::new();
        upper.insert((0, 1), vec![p("0", 1), p("1", 1)]);
        let d = DullAlgebroid::from_upper(1, vec![vec![p("1", 1)], vec![p("x1", 1)]], &upper).unwrap();
        let r = anchor_compat_check(&d);
        assert!(!r.passed());
    }

    #[test]
    fn so3_jacobi_and_perturbation() {
        let so3 = crate::lie2::so3_bracket();
        let d = DullAlgebroid::from_upper(0, vec![vec![]; 3], &so3).unwrap();
        assert!(d.jacobi_defects().is_empty());
        let mut bad = so3.clone();
        bad.insert((0, 1), vec![Poly::int(0, 1), Poly::int(0, 0), Poly::int(0, 1)]);
        let d = DullAlgebroid::from_upper(0, vec![vec![]; 3], &bad).unwrap();
        assert!(!d.jacobi_defects().is_empty());
    }

    #[test]
    fn koszul_zero_form_is_anchor_derivative() {
        let d = DullAlgebroid::tangent(2);
        let f = FormValued::from_fn(2, 0, 2, 1, |_| vec![p("x1^2*x2", 2)]);
        let df = koszul_d(&d, None, &f).unwrap();
        assert_eq!(df.eval(&[0]), vec![p("2*x1*x2", 2)]);
        assert_eq!(df.eval(&[1]), vec![p("x1^2", 2)]);
        assert!(koszul_d(&d, None, &df).unwrap().is_zero());
    }

    #[test]
    fn koszul_square_detects_anchor_failure() {
        let mut upper = BTreeMap::new();
        upper.insert((0, 1), vec![p("0", 1), p("1", 1)]);
        let d = DullAlgebroid::from_upper(1, vec![vec![p("1", 1)], vec![p("x1", 1)]], &upper).unwrap();
        let f = FormValued::from_fn(1, 0, 2, 1, |_| vec![p("x1", 1)]);
        let ddf = koszul_d(&d, None, &koszul_d(&d, None, &f).unwrap()).unwrap();
        assert!(!ddf.is_zero());
    }

    #[test]
    fn fixture_connection_is_flat_and_curved_variant_is_not() {
        // ∇_{∂x}∂y = x∂x: R(∂x,∂y)∂y = −∇_{∂y}(x∂x) = 0.
        assert!(tangent_conn("x1").curvature_defects().is_empty());
        // ∇_{∂x}∂y = y∂x: R(∂x,∂y)∂y = −∂x.
        let r = tangent_conn("x2").curvature(0, 1);
        assert_eq!(r[1], vec![p("-1", 2), p("0", 2)]);
    }

    #[test]
    fn square_of_covariant_differential_is_curvature() {
        let c = tangent_conn("x2");
        let d = c.source.clone();
        let e = FormValued::from_fn(2, 0, 2, 2, |_| vec![p("0", 2), p("1", 2)]);
        let dde = koszul_d(&d, Some(&c), &koszul_d(&d, Some(&c), &e).unwrap()).unwrap();
        assert_eq!(dde.eval(&[0, 1]), c.curvature(0, 1)[1]);
    }

    #[test]
    fn dual_connection_pairing() {
        let c = tangent_conn("x1*x2");
        let dual = c.dual();
        let eps = vec![p("x2", 2), p("x1^2", 2)];
        let e = vec![p("1 + x1", 2), p("x2", 2)];
        let pair = |a: &PolyVec, b: &PolyVec| a.iter().zip(b).fold(Poly::zero(2), |acc, (x, y)| &acc + &(x * y));
        for a in 0..2 {
            let lhs = pair(&eps, &e).directional(&c.source.anchor[a]);
            let rhs = &pair(&dual.along(a, &eps), &e) + &pair(&eps, &c.along(a, &e));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn tangent_fixture_basic_data() {
        let c = tangent_conn("x1");
        let d = DullAlgebroid::tangent(2);
        let bd = basic_data(&c, &d).unwrap();
        // ∇^bas_X Y = [X,Y] + ∇_Y X
        assert_eq!(bd.on_q.along(1, &d.basis_section(0)), vec![p("x1", 2), p("0", 2)]);
        // R^bas(∂x,∂y)∂x = [∂x, x∂x] + ∇_{x∂x}∂x = ∂x
        assert_eq!(bd.curvature[0][1][0], vec![p("1", 2), p("0", 2)]);
        assert!(vec_is_zero(&bd.curvature[0][1][1]));
        assert!(basic_identity_check(&c, &d).unwrap().passed());
    }
}
