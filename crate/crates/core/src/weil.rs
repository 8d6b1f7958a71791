//! Weil algebra of a split Lie 2-algebroid.
//!
//! Generators `τ^a (1,0)`, `b^μ (2,0)`, `𝐝x_i (0,1)`, `𝐝τ^a (1,1)`, `𝐝b^μ (2,1)`
//! over the base polynomials; `𝐝`, `i_Q` and `ℒ_Q = [i_Q, 𝐝]` act as derivations.

use num_integer::binomial;

use crate::adjoint::{build_adjoint_rep, build_coadjoint_rep, mu_nabla, TmConnections};
use crate::dgmod::operator_from_components;
use crate::gca::{AlgebraElement, Derivation, Generator, GeneratorSet, Gens, Monomial, Slot};
use crate::lie2::{b_name, compile_homological_vf, tau_name, SplitLie2Data};
use crate::report::CheckReport;

#[derive(Clone, Debug)]
pub struct WeilAlgebra {
    pub gens: Gens,
    pub m: usize,
    pub rq: usize,
    pub rb: usize,
    /// The homological vector field on the split generators.
    pub q: Derivation,
    pub dee: Derivation,
    pub i_q: Derivation,
    pub lie_q: Derivation,
}

impl WeilAlgebra {
    pub fn tau(&self, a: usize) -> usize {
        a
    }
    pub fn b(&self, mu: usize) -> usize {
        self.rq + mu
    }
    pub fn dx(&self, i: usize) -> usize {
        self.rq + self.rb + i
    }
    pub fn dtau(&self, a: usize) -> usize {
        self.rq + self.rb + self.m + a
    }
    pub fn db(&self, mu: usize) -> usize {
        2 * self.rq + self.rb + self.m + mu
    }

    /// `𝐝` applied to a slot as a generator index.
    fn dee_of(&self, s: Slot) -> Option<usize> {
        match s {
            Slot::Base(i) => Some(self.dx(i)),
            Slot::Gen(g) if g < self.rq + self.rb => Some(g + self.rq + self.rb + self.m),
            Slot::Gen(_) => None,
        }
    }

    /// Embeds an element of the split algebra.
    pub fn embed(&self, a: &AlgebraElement) -> AlgebraElement {
        let n = self.gens.len();
        let mut out = AlgebraElement::zero(&self.gens);
        for (mono, p) in a.terms() {
            let mut e = mono.0.clone();
            e.resize(n, 0);
            out.add_term(Monomial(e), p.clone());
        }
        out
    }

    /// Inverse of `embed` on elements of `q`-degree 0.
    pub fn restrict(&self, a: &AlgebraElement, split: &Gens) -> Option<AlgebraElement> {
        let k = split.len();
        let mut out = AlgebraElement::zero(split);
        for (mono, p) in a.terms() {
            if mono.0[k..].iter().any(|&e| e != 0) {
                return None;
            }
            out.add_term(Monomial(mono.0[..k].to_vec()), p.clone());
        }
        Some(out)
    }
}

pub fn weil_gens(m: usize, rq: usize, rb: usize) -> Gens {
    let split: Vec<Generator> = (0..rq)
        .map(|a| Generator::new(tau_name(a), 1))
        .chain((0..rb).map(|mu| Generator::new(b_name(mu), 2)))
        .collect();
    weil_gens_over(m, &split)
}

fn weil_gens_over(m: usize, split: &[Generator]) -> Gens {
    let mut g: Vec<Generator> = split.iter().map(|x| Generator::bigraded(x.name.clone(), x.degree, 0)).collect();
    g.extend((0..m).map(|i| Generator::bigraded(format!("dx{}", i + 1), 0, 1)));
    g.extend(split.iter().map(|x| Generator::bigraded(format!("d{}", x.name), x.degree, 1)));
    GeneratorSet::new(m, g).expect("valid Weil generator names")
}

pub fn build_weil(d: &SplitLie2Data) -> WeilAlgebra {
    build_weil_from_vf(&compile_homological_vf(d))
}

/// Weil algebra of any degree-1 vector field on generators of degrees 1 and 2
/// (degree-1 generators first).
pub fn build_weil_from_vf(q: &Derivation) -> WeilAlgebra {
    let split = q.gens();
    let m = split.nvars();
    let rq = split.generators().iter().filter(|g| g.degree == 1).count();
    let rb = split.len() - rq;
    let gens = weil_gens_over(m, split.generators());
    let mut w = WeilAlgebra {
        gens: gens.clone(),
        m,
        rq,
        rb,
        q: q.clone(),
        dee: Derivation::zero(&gens, 1),
        i_q: Derivation::zero(&gens, 0),
        lie_q: Derivation::zero(&gens, 1),
    };
    let mut dee = Derivation::zero(&gens, 1);
    let mut i_q = Derivation::zero(&gens, 0);
    for s in split.slots() {
        let dg = w.dee_of(s).expect("split slot has a differential");
        dee.set(s, AlgebraElement::generator(&gens, dg));
        i_q.set(Slot::Gen(dg), w.embed(q.value(s)));
    }
    w.lie_q = i_q.commutator(&dee);
    w.dee = dee;
    w.i_q = i_q;
    w
}

fn nonzero_values(name: &str, der: &Derivation) -> Vec<String> {
    let gs = der.gens();
    gs.slots()
        .into_iter()
        .filter(|&s| !der.value(s).is_zero())
        .map(|s| format!("{name}({}) = {}", gs.slot_name(s), der.value(s)))
        .collect()
}

/// `𝐝² = 0`, `ℒ_Q² = 0`, `[ℒ_Q, 𝐝] = 0` on every generator, plus `ℒ_Q = Q` on the split generators.
pub fn weil_double_complex_check(w: &WeilAlgebra) -> CheckReport {
    let mut rep = CheckReport::new("weil");
    rep.clause("dee_squared", nonzero_values("𝐝²", &w.dee.commutator(&w.dee)));
    rep.clause("lie_q_squared", nonzero_values("ℒ_Q²", &w.lie_q.commutator(&w.lie_q)));
    rep.clause("lie_q_dee", nonzero_values("[ℒ_Q,𝐝]", &w.lie_q.commutator(&w.dee)));
    let restricts: Vec<String> = w
        .q
        .gens()
        .slots()
        .into_iter()
        .filter(|&s| w.lie_q.value(s) != &w.embed(w.q.value(s)))
        .map(|s| format!("ℒ_Q({}) ≠ Q", w.gens.slot_name(s)))
        .collect();
    rep.clause("restricts_to_q", restricts);
    rep
}

fn multichoose(n: u64, k: u64) -> u64 {
    if n == 0 {
        return u64::from(k == 0);
    }
    binomial(n + k - 1, k)
}

/// Rank of `W^{p,q}` as a free module over the base functions.
pub fn split_weil_dims(m: usize, rq: usize, rb: usize, p: usize, q: usize) -> u64 {
    let (m, rq, rb) = (m as u64, rq as u64, rb as u64);
    let (p, q) = (p as u64, q as u64);
    let mut total = 0;
    for w in 0..=q.min(rb) {
        for v in 0..=(q - w) {
            let u = q - w - v;
            if u > m || 2 * w + v > p {
                continue;
            }
            let rest = p - 2 * w - v;
            for s in 0..=rest / 2 {
                let r = rest - 2 * s;
                if r > rq {
                    continue;
                }
                total += binomial(m, u) * binomial(rq, r) * multichoose(rq, v) * binomial(rb, w) * multichoose(rb, s);
            }
        }
    }
    total
}

/// Number of generator monomials of bidegree `(p, q)`.
pub fn brute_force_weil_dims(m: usize, rq: usize, rb: usize, p: usize, q: usize) -> u64 {
    let gs = weil_gens(m, rq, rb);
    let bideg: Vec<(i32, i32, bool)> = gs
        .generators()
        .iter()
        .map(|g| {
            let (a, b) = g.bidegree.expect("Weil generators are bigraded");
            (a, b, g.is_odd())
        })
        .collect();
    fn go(bideg: &[(i32, i32, bool)], i: usize, p: i32, q: i32) -> u64 {
        if i == bideg.len() {
            return u64::from(p == 0 && q == 0);
        }
        let (gp, gq, odd) = bideg[i];
        let max_e = if odd { 1 } else { i32::MAX };
        let mut total = 0;
        let mut e = 0;
        while e <= max_e && gp * e <= p && gq * e <= q {
            total += go(bideg, i + 1, p - gp * e, q - gq * e);
            e += 1;
        }
        total
    }
    go(&bideg, 0, p as i32, q as i32)
}

/// Row basis `𝐝x_i`, `𝐝τ^a − d_{∇*}τ^a`, `𝐝b^μ − d_{∇*}b^μ` of the `q = 1` row.
pub fn row_basis(w: &WeilAlgebra, d: &SplitLie2Data, tm: &TmConnections) -> Vec<AlgebraElement> {
    let mu = mu_nabla(d, tm);
    let gs = &w.gens;
    let conn_part = |g: usize| {
        let mut out = AlgebraElement::zero(gs);
        for (i, mu_i) in mu.iter().enumerate().take(w.m) {
            let dx = AlgebraElement::generator(gs, w.dx(i));
            out = out.add(&dx.mul(&w.embed(mu_i.value(Slot::Gen(g)))));
        }
        out
    };
    let mut out: Vec<AlgebraElement> = (0..w.m).map(|i| AlgebraElement::generator(gs, w.dx(i))).collect();
    for a in 0..w.rq {
        out.push(AlgebraElement::generator(gs, w.dtau(a)).sub(&conn_part(d.tau(a))));
    }
    for mu_ in 0..w.rb {
        out.push(AlgebraElement::generator(gs, w.db(mu_)).sub(&conn_part(d.b(mu_))));
    }
    out
}

/// Coefficients `c_g` with `x = Σ c_g·𝐝g` for `x` in the `q = 1` row, indexed
/// `𝐝x_1…𝐝x_m` then `𝐝` of each split generator.
pub fn dee_coefficients(w: &WeilAlgebra, x: &AlgebraElement) -> Result<Vec<AlgebraElement>, String> {
    let gs = &w.gens;
    let first = w.rq + w.rb;
    let mut out = vec![AlgebraElement::zero(gs); gs.len() - first];
    for (mono, p) in x.terms() {
        let hits: Vec<usize> = (first..gs.len()).filter(|&g| mono.0[g] > 0).collect();
        if hits.len() != 1 || mono.0[hits[0]] != 1 {
            return Err(format!("{} is not in the q = 1 row", AlgebraElement::monomial_string(gs, mono)));
        }
        let mut rest = mono.clone();
        rest.0[hits[0]] = 0;
        out[hits[0] - first].add_term(rest, p.clone());
    }
    Ok(out)
}

/// Coordinates of a row element in the row basis, as split-algebra elements.
pub fn row_coordinates(
    w: &WeilAlgebra,
    d: &SplitLie2Data,
    basis: &[AlgebraElement],
    x: &AlgebraElement,
) -> Result<Vec<AlgebraElement>, String> {
    let c = dee_coefficients(w, x)?;
    let mut coords = vec![AlgebraElement::zero(&w.gens); basis.len()];
    let mut rest = x.clone();
    for j in w.m..basis.len() {
        coords[j] = c[j].clone();
        rest = rest.sub(&c[j].mul(&basis[j]));
    }
    let c = dee_coefficients(w, &rest)?;
    coords[..w.m].clone_from_slice(&c[..w.m]);
    if c[w.m..].iter().any(|e| !e.is_zero()) {
        return Err("row basis decomposition left a non-𝐝x remainder".into());
    }
    coords
        .iter()
        .map(|e| w.restrict(e, d.gens()).ok_or_else(|| "coefficient outside q = 0".to_string()))
        .collect()
}

/// `ℒ_Q` on the `q = 1` row against the coadjoint differential, and `𝐝` on the
/// degree-0 generators against `τ + d_{∇*}τ`, `b + d_{∇*}b`.
pub fn weil_row_vs_coadjoint_check(d: &SplitLie2Data, tm: &TmConnections) -> CheckReport {
    let mut rep = CheckReport::new("weil_row");
    let w = build_weil(d);
    let basis = row_basis(&w, d, tm);
    let co = match build_adjoint_rep(d, tm) {
        Ok(ad) => operator_from_components(&build_coadjoint_rep(&ad)),
        Err(e) => {
            rep.clause("coadjoint", vec![e.to_string()]);
            return rep;
        }
    };
    let mut failures = Vec::new();
    for (j, e) in basis.iter().enumerate() {
        match row_coordinates(&w, d, &basis, &w.lie_q.apply(e)) {
            Err(msg) => failures.push(format!("{}: {msg}", co.src.names[j])),
            Ok(coords) => {
                let expected = &co.values[j];
                for (k, c) in coords.iter().enumerate() {
                    let want = expected.coefficient(k);
                    if c != &want {
                        failures.push(format!("{} → {}: {} vs {}", co.src.names[j], co.src.names[k], c, want));
                    }
                }
            }
        }
    }
    rep.clause("lie_q_row", failures);

    let dual_q = tm.on_q.dual();
    let dual_b = tm.on_bstar.dual();
    let mut failures = Vec::new();
    let gs = &w.gens;
    // `𝐝x·f = (−1)^{|f|} f·𝐝x`, hence `sign`.
    let mut check = |label: String, dg: &AlgebraElement, own: usize, conn: Vec<Vec<AlgebraElement>>, sign: i64| {
        match row_coordinates(&w, d, &basis, dg) {
            Err(msg) => failures.push(format!("{label}: {msg}")),
            Ok(coords) => {
                for (k, c) in coords.iter().enumerate() {
                    let want = if k == own {
                        AlgebraElement::one(d.gens())
                    } else if k < w.m {
                        conn[k].iter().fold(AlgebraElement::zero(d.gens()), |acc, t| acc.add(t)).scale_int(sign)
                    } else {
                        AlgebraElement::zero(d.gens())
                    };
                    if c != &want {
                        failures.push(format!("{label} → {}: {} vs {}", co.src.names[k], c, want));
                    }
                }
            }
        }
    };
    for a in 0..w.rq {
        let conn = (0..w.m)
            .map(|i| {
                (0..w.rq)
                    .map(|c| AlgebraElement::generator(d.gens(), d.tau(c)).scale_poly(&dual_q.gamma[i][a][c]))
                    .collect()
            })
            .collect();
        check(format!("𝐝{}", tau_name(a)), &w.dee.apply(&AlgebraElement::generator(gs, w.tau(a))), w.m + a, conn, -1);
    }
    for mu in 0..w.rb {
        let conn = (0..w.m)
            .map(|i| {
                (0..w.rb)
                    .map(|l| AlgebraElement::generator(d.gens(), d.b(l)).scale_poly(&dual_b.gamma[i][mu][l]))
                    .collect()
            })
            .collect();
        check(format!("𝐝{}", b_name(mu)), &w.dee.apply(&AlgebraElement::generator(gs, w.b(mu))), w.m + w.rq + mu, conn, 1);
    }
    rep.clause("dee_split", failures);
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie2::fixtures;

    fn tm_for(name: &str, d: &SplitLie2Data) -> TmConnections {
        let mut tm = TmConnections::trivial(d);
        if name == "FX-TANGENT-R2" {
            tm.on_q = fixtures::tangent_r2_connection();
        }
        tm
    }

    #[test]
    fn double_complex_on_fixtures() {
        for name in fixtures::LIE2_FIXTURES {
            let d = fixtures::by_name(name).unwrap();
            let r = weil_double_complex_check(&build_weil(&d));
            assert!(r.passed(), "{name}: {:?}", r.failing());
        }
    }

    #[test]
    fn abelian_lie_q_vanishes() {
        let w = build_weil(&fixtures::abelian());
        assert!(w.lie_q.is_zero());
    }

    #[test]
    fn lie_q_on_dee_generators() {
        let d = fixtures::aff1_derivation();
        let w = build_weil(&d);
        for a in 0..d.rq() {
            let q_tau = w.embed(w.q.value(Slot::Gen(d.tau(a))));
            assert_eq!(w.lie_q.value(Slot::Gen(w.dtau(a))), &w.dee.apply(&q_tau).neg());
        }
    }

    #[test]
    fn broken_q_breaks_lie_q_square() {
        let d = fixtures::string_so3();
        let bad = d.mutate(crate::lie2::Entry::Bracket { a: 0, b: 1, c: 0 }, &crate::scalars::Poly::int(0, 1));
        let r = weil_double_complex_check(&build_weil(&bad));
        assert!(!r.get("lie_q_squared").unwrap().passed);
    }

    #[test]
    fn dims_match_brute_force() {
        assert_eq!(split_weil_dims(0, 3, 1, 0, 0), 1);
        assert_eq!(split_weil_dims(0, 3, 1, 1, 1), 3);
        assert_eq!(split_weil_dims(0, 3, 1, 2, 1), 10);
        for (m, rq, rb) in [(0, 2, 1), (0, 3, 1), (0, 2, 2), (2, 2, 0), (1, 3, 2)] {
            for p in 0..=6 {
                for q in 0..=6 {
                    assert_eq!(split_weil_dims(m, rq, rb, p, q), brute_force_weil_dims(m, rq, rb, p, q), "{m},{rq},{rb} @ ({p},{q})");
                }
            }
        }
    }

    #[test]
    fn row_matches_coadjoint() {
        for name in fixtures::LIE2_FIXTURES {
            let d = fixtures::by_name(name).unwrap();
            let r = weil_row_vs_coadjoint_check(&d, &tm_for(name, &d));
            assert!(r.passed(), "{name}: {:#?}", r.clauses.iter().filter(|c| !c.passed).collect::<Vec<_>>());
        }
    }
}
