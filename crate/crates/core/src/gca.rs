//! Free graded-commutative algebra over the polynomial ring ℚ[x1..xm], graded
//! derivations and free modules over it.
//!
//! Monomials are stored in canonical generator order; every reordering goes
//! through [`mono_mul`], which is the single source of Koszul signs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::scalars::{format_rational, parse_rational, Poly, Rational, ScalarError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GcaError {
    #[error("elements live over different generator sets")]
    MismatchedGenerators,
    #[error("invalid generator set: {0}")]
    InvalidGenerators(String),
    #[error("derivation must have odd degree, got {0}")]
    EvenDerivation(i32),
    #[error("pairing undefined on sections ({0}, {1})")]
    UndefinedPairing(String, String),
    #[error("cannot parse element {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: i32,
    /// Optional bidegree (p, q) with p + q = degree.
    pub bidegree: Option<(i32, i32)>,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: i32) -> Self {
        Generator {
            name: name.into(),
            degree,
            bidegree: None,
        }
    }

    pub fn bigraded(name: impl Into<String>, p: i32, q: i32) -> Self {
        Generator {
            name: name.into(),
            degree: p + q,
            bidegree: Some((p, q)),
        }
    }

    pub fn is_odd(&self) -> bool {
        self.degree.rem_euclid(2) == 1
    }
}

/// Base coordinates `x1..xm` (degree 0) plus graded generators of positive degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    nvars: usize,
    gens: Vec<Generator>,
}

pub type Gens = Arc<GeneratorSet>;

fn is_base_name(s: &str) -> bool {
    s.strip_prefix('x')
        .map(|r| !r.is_empty() && r.chars().all(|c| c.is_ascii_digit()))
        .unwrap_or(false)
}

impl GeneratorSet {
    pub fn new(nvars: usize, gens: Vec<Generator>) -> Result<Gens, GcaError> {
        let mut seen = BTreeSet::new();
        for g in &gens {
            if g.degree < 1 {
                return Err(GcaError::InvalidGenerators(format!(
                    "generator {} has degree {} < 1",
                    g.name, g.degree
                )));
            }
            if g.name.is_empty()
                || !g.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                || g.name.chars().next().unwrap().is_ascii_digit()
                || is_base_name(&g.name)
            {
                return Err(GcaError::InvalidGenerators(format!(
                    "bad generator name {:?}",
                    g.name
                )));
            }
            if !seen.insert(g.name.clone()) {
                return Err(GcaError::InvalidGenerators(format!(
                    "duplicate generator name {}",
                    g.name
                )));
            }
        }
        Ok(Arc::new(GeneratorSet { nvars, gens }))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn gen(&self, i: usize) -> &Generator {
        &self.gens[i]
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.gens[i].degree
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.gens[i].is_odd()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    /// Names of all slots: base coordinates first, then generators.
    pub fn slot_name(&self, slot: Slot) -> String {
        match slot {
            Slot::Base(i) => format!("x{}", i + 1),
            Slot::Gen(g) => self.gens[g].name.clone(),
        }
    }

    pub fn slots(&self) -> Vec<Slot> {
        (0..self.nvars)
            .map(Slot::Base)
            .chain((0..self.gens.len()).map(Slot::Gen))
            .collect()
    }

    pub fn slot_degree(&self, slot: Slot) -> i32 {
        match slot {
            Slot::Base(_) => 0,
            Slot::Gen(g) => self.gens[g].degree,
        }
    }

    pub fn parse_slot(&self, name: &str) -> Option<Slot> {
        if is_base_name(name) {
            let i: usize = name[1..].parse().ok()?;
            (i >= 1 && i <= self.nvars).then_some(Slot::Base(i - 1))
        } else {
            self.index_of(name).map(Slot::Gen)
        }
    }
}

/// A base coordinate or a graded generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Base(usize),
    Gen(usize),
}

fn same(a: &Gens, b: &Gens) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Exponent vector over the graded generators; odd exponents are 0 or 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn single(n: usize, i: usize) -> Self {
        let mut m = Monomial::one(n);
        m.0[i] = 1;
        m
    }

    pub fn degree(&self, gs: &GeneratorSet) -> i32 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, e)| *e as i32 * gs.degree(i))
            .sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|e| *e == 0)
    }

    /// Number of generator factors of the given degree, with multiplicity.
    pub fn count_of_degree(&self, gs: &GeneratorSet, d: i32) -> u32 {
        self.0
            .iter()
            .enumerate()
            .filter(|(i, _)| gs.degree(*i) == d)
            .map(|(_, e)| *e)
            .sum()
    }

    /// Bidegree (Σp, Σq) for generators carrying a bidegree tag.
    pub fn bidegree(&self, gs: &GeneratorSet) -> (i32, i32) {
        let mut p = 0;
        let mut q = 0;
        for (i, e) in self.0.iter().enumerate() {
            let (gp, gq) = gs.gen(i).bidegree.unwrap_or((gs.degree(i), 0));
            p += gp * *e as i32;
            q += gq * *e as i32;
        }
        (p, q)
    }
}

/// Product of canonical monomials: `Some((negative, m))` or `None` when an odd
/// generator repeats.
pub fn mono_mul(gs: &GeneratorSet, a: &Monomial, b: &Monomial) -> Option<(bool, Monomial)> {
    let n = a.0.len();
    let mut out = Vec::with_capacity(n);
    let mut swaps = 0u32;
    // Each odd factor of b moves left past every odd factor of a with larger index.
    let mut odd_a_above = 0u32;
    let mut odd_a_counts = vec![0u32; n + 1];
    for i in (0..n).rev() {
        odd_a_counts[i] = odd_a_above;
        if gs.is_odd(i) {
            odd_a_above += a.0[i];
        }
    }
    for i in 0..n {
        let e = a.0[i] + b.0[i];
        if gs.is_odd(i) {
            if e > 1 {
                return None;
            }
            if b.0[i] == 1 {
                swaps += odd_a_counts[i];
            }
        }
        out.push(e);
    }
    Some((swaps % 2 == 1, Monomial(out)))
}

/// Element of ℚ[x] ⊗ ∧(odd) ⊗ S(even).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElement {
    gs: Gens,
    terms: BTreeMap<Monomial, Poly>,
}

impl AlgebraElement {
    pub fn zero(gs: &Gens) -> Self {
        AlgebraElement {
            gs: gs.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn from_poly(gs: &Gens, p: Poly) -> Self {
        let mut a = AlgebraElement::zero(gs);
        a.add_term(Monomial::one(gs.len()), p);
        a
    }

    pub fn one(gs: &Gens) -> Self {
        AlgebraElement::from_poly(gs, Poly::one(gs.nvars()))
    }

    pub fn constant(gs: &Gens, c: Rational) -> Self {
        AlgebraElement::from_poly(gs, Poly::constant(gs.nvars(), c))
    }

    pub fn base_var(gs: &Gens, i: usize) -> Self {
        AlgebraElement::from_poly(gs, Poly::var(gs.nvars(), i))
    }

    pub fn generator(gs: &Gens, i: usize) -> Self {
        AlgebraElement::term(gs, Monomial::single(gs.len(), i), Poly::one(gs.nvars()))
    }

    pub fn slot(gs: &Gens, s: Slot) -> Self {
        match s {
            Slot::Base(i) => AlgebraElement::base_var(gs, i),
            Slot::Gen(g) => AlgebraElement::generator(gs, g),
        }
    }

    pub fn term(gs: &Gens, m: Monomial, p: Poly) -> Self {
        let mut a = AlgebraElement::zero(gs);
        a.add_term(m, p);
        a
    }

    pub fn gens(&self) -> &Gens {
        &self.gs
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Poly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Poly {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| Poly::zero(self.gs.nvars()))
    }

    /// The generator-free part.
    pub fn body(&self) -> Poly {
        self.coefficient(&Monomial::one(self.gs.len()))
    }

    pub fn add_term(&mut self, m: Monomial, p: Poly) {
        if p.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(slot) => {
                *slot = &*slot + &p;
                if slot.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, p);
            }
        }
    }

    /// Set of degrees of the terms.
    pub fn degrees(&self) -> BTreeSet<i32> {
        self.terms.keys().map(|m| m.degree(&self.gs)).collect()
    }

    /// `Some(d)` when every term has degree d (zero is homogeneous of any degree).
    pub fn homogeneous_degree(&self) -> Option<i32> {
        let d = self.degrees();
        if d.len() == 1 {
            d.into_iter().next()
        } else {
            None
        }
    }

    pub fn homogeneous_parts(&self) -> BTreeMap<i32, AlgebraElement> {
        let mut out: BTreeMap<i32, AlgebraElement> = BTreeMap::new();
        for (m, p) in &self.terms {
            out.entry(m.degree(&self.gs))
                .or_insert_with(|| AlgebraElement::zero(&self.gs))
                .add_term(m.clone(), p.clone());
        }
        out
    }

    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> AlgebraElement {
        AlgebraElement {
            gs: self.gs.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, p)| (m.clone(), p.clone()))
                .collect(),
        }
    }

    pub fn try_add(&self, other: &AlgebraElement) -> Result<AlgebraElement, GcaError> {
        if !same(&self.gs, &other.gs) {
            return Err(GcaError::MismatchedGenerators);
        }
        let mut out = self.clone();
        for (m, p) in &other.terms {
            out.add_term(m.clone(), p.clone());
        }
        Ok(out)
    }

    pub fn add(&self, other: &AlgebraElement) -> AlgebraElement {
        self.try_add(other).expect("same generator set")
    }

    pub fn sub(&self, other: &AlgebraElement) -> AlgebraElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> AlgebraElement {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> AlgebraElement {
        if c.is_zero() {
            return AlgebraElement::zero(&self.gs);
        }
        AlgebraElement {
            gs: self.gs.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, p)| (m.clone(), p.scale(c)))
                .collect(),
        }
    }

    pub fn scale_int(&self, c: i64) -> AlgebraElement {
        self.scale(&crate::scalars::rat(c))
    }

    pub fn scale_poly(&self, f: &Poly) -> AlgebraElement {
        let mut out = AlgebraElement::zero(&self.gs);
        for (m, p) in &self.terms {
            out.add_term(m.clone(), f * p);
        }
        out
    }

    pub fn try_mul(&self, other: &AlgebraElement) -> Result<AlgebraElement, GcaError> {
        if !same(&self.gs, &other.gs) {
            return Err(GcaError::MismatchedGenerators);
        }
        let mut out = AlgebraElement::zero(&self.gs);
        for (m1, p1) in &self.terms {
            for (m2, p2) in &other.terms {
                if let Some((neg, m)) = mono_mul(&self.gs, m1, m2) {
                    let p = p1 * p2;
                    out.add_term(m, if neg { -p } else { p });
                }
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &AlgebraElement) -> AlgebraElement {
        self.try_mul(other).expect("same generator set")
    }

    pub fn pow(&self, e: u32) -> AlgebraElement {
        let mut out = AlgebraElement::one(&self.gs);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Substitutes `x_i ↦ point[i]` in every coefficient.
    pub fn eval_base(&self, point: &[Rational]) -> BTreeMap<Monomial, Rational> {
        self.terms
            .iter()
            .map(|(m, p)| (m.clone(), p.eval(point)))
            .filter(|(_, c)| !c.is_zero())
            .collect()
    }

    /// Monomial written with generator names, e.g. `t1*b1^2`.
    pub fn monomial_string(gs: &GeneratorSet, m: &Monomial) -> String {
        let parts: Vec<String> = m
            .0
            .iter()
            .enumerate()
            .filter(|(_, e)| **e > 0)
            .map(|(i, e)| {
                if *e == 1 {
                    gs.gen(i).name.clone()
                } else {
                    format!("{}^{}", gs.gen(i).name, e)
                }
            })
            .collect();
        parts.join("*")
    }

    /// Parses sums of products such as `2*x1*t1*t2 - 1/2*b1`. Factors are
    /// multiplied left to right, so `t2*t1` parses to `-t1*t2`.
    pub fn parse(gs: &Gens, input: &str) -> Result<AlgebraElement, GcaError> {
        let err = |reason: &str| GcaError::Parse {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err("empty input"));
        }
        let bytes = s.as_bytes();
        let mut chunks: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for (idx, ch) in s.chars().enumerate() {
            if (ch == '+' || ch == '-') && !(idx > 0 && bytes[idx - 1] == b'^') {
                if !cur.is_empty() {
                    chunks.push((neg, std::mem::take(&mut cur)));
                } else if idx > 0 {
                    return Err(err("dangling sign"));
                }
                neg = ch == '-';
            } else {
                cur.push(ch);
            }
        }
        if cur.is_empty() {
            return Err(err("trailing sign"));
        }
        chunks.push((neg, cur));
        let mut out = AlgebraElement::zero(gs);
        for (neg, chunk) in chunks {
            let mut t = AlgebraElement::one(gs);
            for factor in chunk.split('*') {
                if factor.is_empty() {
                    return Err(err("empty factor"));
                }
                let (base, pow) = match factor.split_once('^') {
                    Some((b, p)) => (b, p.parse::<u32>().map_err(|_| err("bad exponent"))?),
                    None => (factor, 1),
                };
                let f = if let Some(slot) = gs.parse_slot(base) {
                    AlgebraElement::slot(gs, slot)
                } else if let Some(c) = parse_rational(base) {
                    AlgebraElement::constant(gs, c)
                } else {
                    return Err(err(&format!("unknown factor {base}")));
                };
                t = t.mul(&f.pow(pow));
            }
            out = if neg { out.sub(&t) } else { out.add(&t) };
        }
        Ok(out)
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, p) in &self.terms {
            let gen_part = AlgebraElement::monomial_string(&self.gs, m);
            for (e, c) in p.terms().collect::<Vec<_>>().into_iter().rev() {
                let negative = c.is_negative();
                let mag = c.abs();
                if first {
                    if negative {
                        write!(f, "-")?;
                    }
                } else {
                    write!(f, "{}", if negative { " - " } else { " + " })?;
                }
                first = false;
                let mut factors = Vec::new();
                let bare = e.total() == 0 && gen_part.is_empty();
                if !mag.is_one() || bare {
                    factors.push(format_rational(&mag));
                }
                for (i, k) in e.0.iter().enumerate() {
                    match k {
                        0 => {}
                        1 => factors.push(format!("x{}", i + 1)),
                        _ => factors.push(format!("x{}^{}", i + 1, k)),
                    }
                }
                if !gen_part.is_empty() {
                    factors.push(gen_part.clone());
                }
                write!(f, "{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Graded derivation given by its values on base coordinates and generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    gs: Gens,
    degree: i32,
    base: Vec<AlgebraElement>,
    gens: Vec<AlgebraElement>,
}

impl Derivation {
    pub fn zero(gs: &Gens, degree: i32) -> Self {
        Derivation {
            gs: gs.clone(),
            degree,
            base: vec![AlgebraElement::zero(gs); gs.nvars()],
            gens: vec![AlgebraElement::zero(gs); gs.len()],
        }
    }

    /// `∂/∂g` for a generator g, degree −|g|.
    pub fn coordinate(gs: &Gens, g: usize) -> Self {
        let mut d = Derivation::zero(gs, -gs.degree(g));
        d.gens[g] = AlgebraElement::one(gs);
        d
    }

    /// `∂/∂x_i`, degree 0.
    pub fn base_coordinate(gs: &Gens, i: usize) -> Self {
        let mut d = Derivation::zero(gs, 0);
        d.base[i] = AlgebraElement::one(gs);
        d
    }

    pub fn gens(&self) -> &Gens {
        &self.gs
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn value(&self, s: Slot) -> &AlgebraElement {
        match s {
            Slot::Base(i) => &self.base[i],
            Slot::Gen(g) => &self.gens[g],
        }
    }

    pub fn set(&mut self, s: Slot, v: AlgebraElement) {
        match s {
            Slot::Base(i) => self.base[i] = v,
            Slot::Gen(g) => self.gens[g] = v,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.base.iter().chain(&self.gens).all(AlgebraElement::is_zero)
    }

    /// Slots whose value does not have degree `slot degree + self degree`.
    pub fn degree_violations(&self) -> Vec<Slot> {
        self.gs
            .slots()
            .into_iter()
            .filter(|s| {
                let target = self.gs.slot_degree(*s) + self.degree;
                self.value(*s).degrees().iter().any(|d| *d != target)
            })
            .collect()
    }

    pub fn apply(&self, a: &AlgebraElement) -> AlgebraElement {
        let gs = &self.gs;
        let n = gs.nvars();
        let mut out = AlgebraElement::zero(gs);
        for (m, c) in a.terms() {
            let mono = AlgebraElement::term(gs, m.clone(), Poly::one(n));
            for i in 0..n {
                if self.base[i].is_zero() {
                    continue;
                }
                let dc = c.partial(i).expect("index in range");
                if dc.is_zero() {
                    continue;
                }
                out = out.add(&self.base[i].mul(&mono).scale_poly(&dc));
            }
            let mut prefix_deg = 0;
            for k in 0..m.0.len() {
                let e = m.0[k];
                if e == 0 {
                    continue;
                }
                if !self.gens[k].is_zero() {
                    let mut pre = Monomial::one(gs.len());
                    pre.0[..k].copy_from_slice(&m.0[..k]);
                    let mut suf = Monomial::one(gs.len());
                    suf.0[k + 1..].copy_from_slice(&m.0[k + 1..]);
                    let mut mid = Monomial::one(gs.len());
                    mid.0[k] = e - 1;
                    let pre = AlgebraElement::term(gs, pre, c.clone());
                    let suf = AlgebraElement::term(gs, suf, Poly::one(n));
                    let mid = AlgebraElement::term(gs, mid, Poly::int(n, e as i64));
                    let mut piece = pre.mul(&mid).mul(&self.gens[k]).mul(&suf);
                    if (self.degree * prefix_deg).rem_euclid(2) == 1 {
                        piece = piece.neg();
                    }
                    out = out.add(&piece);
                }
                prefix_deg += e as i32 * gs.degree(k);
            }
        }
        out
    }

    fn map_values(&self, degree: i32, f: impl Fn(&AlgebraElement) -> AlgebraElement) -> Derivation {
        Derivation {
            gs: self.gs.clone(),
            degree,
            base: self.base.iter().map(&f).collect(),
            gens: self.gens.iter().map(&f).collect(),
        }
    }

    pub fn add(&self, other: &Derivation) -> Derivation {
        assert!(same(&self.gs, &other.gs), "same generator set");
        let deg = if self.is_zero() { other.degree } else { self.degree };
        Derivation {
            gs: self.gs.clone(),
            degree: deg,
            base: self.base.iter().zip(&other.base).map(|(a, b)| a.add(b)).collect(),
            gens: self.gens.iter().zip(&other.gens).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Derivation) -> Derivation {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Derivation {
        self.map_values(self.degree, AlgebraElement::neg)
    }

    pub fn scale(&self, c: &Rational) -> Derivation {
        self.map_values(self.degree, |v| v.scale(c))
    }

    /// `ξ·D`, a derivation of degree |ξ| + |D| for homogeneous ξ.
    pub fn left_mul(&self, xi: &AlgebraElement) -> Derivation {
        let deg = xi.homogeneous_degree().unwrap_or(0) + self.degree;
        self.map_values(deg, |v| xi.mul(v))
    }

    /// Keeps only the terms of every value accepted by `keep`.
    pub fn filter_values(&self, keep: impl Fn(Slot, &Monomial) -> bool) -> Derivation {
        let mut d = Derivation::zero(&self.gs, self.degree);
        for s in self.gs.slots() {
            d.set(s, self.value(s).filter(|m| keep(s, m)));
        }
        d
    }

    pub fn try_commutator(&self, other: &Derivation) -> Result<Derivation, GcaError> {
        if !same(&self.gs, &other.gs) {
            return Err(GcaError::MismatchedGenerators);
        }
        let sign_neg = (self.degree * other.degree).rem_euclid(2) == 0;
        let mut d = Derivation::zero(&self.gs, self.degree + other.degree);
        for s in self.gs.slots() {
            let a = self.apply(other.value(s));
            let b = other.apply(self.value(s));
            d.set(s, if sign_neg { a.sub(&b) } else { a.add(&b) });
        }
        Ok(d)
    }

    /// Graded commutator `[D1, D2] = D1 D2 − (−1)^{|D1||D2|} D2 D1`.
    pub fn commutator(&self, other: &Derivation) -> Derivation {
        self.try_commutator(other).expect("same generator set")
    }

    /// Slots g with `D(D(g)) ≠ 0`, paired with the offending value.
    pub fn square_check(&self) -> Result<Vec<(Slot, AlgebraElement)>, GcaError> {
        if self.degree.rem_euclid(2) == 0 {
            return Err(GcaError::EvenDerivation(self.degree));
        }
        Ok(self
            .gs
            .slots()
            .into_iter()
            .filter_map(|s| {
                let v = self.apply(self.value(s));
                (!v.is_zero()).then_some((s, v))
            })
            .collect())
    }
}

/// Algebra homomorphism fixing the base coordinates, given on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraMap {
    gs: Gens,
    images: Vec<AlgebraElement>,
}

impl AlgebraMap {
    pub fn identity(gs: &Gens) -> Self {
        AlgebraMap {
            gs: gs.clone(),
            images: (0..gs.len()).map(|g| AlgebraElement::generator(gs, g)).collect(),
        }
    }

    pub fn set_image(&mut self, g: usize, v: AlgebraElement) {
        self.images[g] = v;
    }

    pub fn image(&self, g: usize) -> &AlgebraElement {
        &self.images[g]
    }

    pub fn apply(&self, a: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero(&self.gs);
        for (m, p) in a.terms() {
            let mut t = AlgebraElement::from_poly(&self.gs, p.clone());
            for (g, e) in m.0.iter().enumerate() {
                if *e > 0 {
                    t = t.mul(&self.images[g].pow(*e));
                }
            }
            out = out.add(&t);
        }
        out
    }
}

/// Graded basis of a free module: section names and degrees (|e| = −n for e ∈ E_n).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionBasis {
    pub names: Vec<String>,
    pub degrees: Vec<i32>,
}

pub type Basis = Arc<SectionBasis>;

impl SectionBasis {
    pub fn new(names: Vec<String>, degrees: Vec<i32>) -> Basis {
        assert_eq!(names.len(), degrees.len());
        Arc::new(SectionBasis { names, degrees })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.degrees[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

/// Finite sum Σ ξ_e ⊗ e with coefficients on the left.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleElement {
    gs: Gens,
    basis: Basis,
    terms: BTreeMap<usize, AlgebraElement>,
}

impl ModuleElement {
    pub fn zero(gs: &Gens, basis: &Basis) -> Self {
        ModuleElement {
            gs: gs.clone(),
            basis: basis.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn section(gs: &Gens, basis: &Basis, i: usize) -> Self {
        ModuleElement::single(gs, basis, i, AlgebraElement::one(gs))
    }

    pub fn single(gs: &Gens, basis: &Basis, i: usize, coeff: AlgebraElement) -> Self {
        let mut m = ModuleElement::zero(gs, basis);
        m.add_term(i, coeff);
        m
    }

    pub fn gens(&self) -> &Gens {
        &self.gs
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&usize, &AlgebraElement)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, i: usize) -> AlgebraElement {
        self.terms
            .get(&i)
            .cloned()
            .unwrap_or_else(|| AlgebraElement::zero(&self.gs))
    }

    pub fn add_term(&mut self, i: usize, coeff: AlgebraElement) {
        if coeff.is_zero() {
            return;
        }
        let merged = match self.terms.remove(&i) {
            Some(c) => c.add(&coeff),
            None => coeff,
        };
        if !merged.is_zero() {
            self.terms.insert(i, merged);
        }
    }

    pub fn add(&self, other: &ModuleElement) -> ModuleElement {
        assert!(same(&self.gs, &other.gs) && self.basis == other.basis);
        let mut out = self.clone();
        for (i, c) in &other.terms {
            out.add_term(*i, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &ModuleElement) -> ModuleElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ModuleElement {
        self.map_coeffs(AlgebraElement::neg)
    }

    pub fn scale(&self, c: &Rational) -> ModuleElement {
        self.map_coeffs(|a| a.scale(c))
    }

    pub fn map_coeffs(&self, f: impl Fn(&AlgebraElement) -> AlgebraElement) -> ModuleElement {
        let mut out = ModuleElement::zero(&self.gs, &self.basis);
        for (i, c) in &self.terms {
            out.add_term(*i, f(c));
        }
        out
    }

    /// `ξ·(Σ ζ ⊗ e) = Σ ξζ ⊗ e`.
    pub fn left_mul(&self, xi: &AlgebraElement) -> ModuleElement {
        self.map_coeffs(|c| xi.mul(c))
    }

    /// Degrees `|ξ| + |e|` of all terms.
    pub fn degrees(&self) -> BTreeSet<i32> {
        let mut out = BTreeSet::new();
        for (i, c) in &self.terms {
            for d in c.degrees() {
                out.insert(d + self.basis.degree(*i));
            }
        }
        out
    }

    /// Keeps terms `ξ_m ⊗ e` accepted by `keep(m, e)`.
    pub fn filter(&self, keep: impl Fn(&Monomial, usize) -> bool) -> ModuleElement {
        let mut out = ModuleElement::zero(&self.gs, &self.basis);
        for (i, c) in &self.terms {
            out.add_term(*i, c.filter(|m| keep(m, *i)));
        }
        out
    }

    /// Reinterprets the coefficients over another basis with the same length.
    pub fn rebase(&self, basis: &Basis) -> ModuleElement {
        assert_eq!(basis.len(), self.basis.len());
        ModuleElement {
            gs: self.gs.clone(),
            basis: basis.clone(),
            terms: self.terms.clone(),
        }
    }
}

impl fmt::Display for ModuleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(i, c)| format!("({}) ⊗ {}", c, self.basis.names[*i]))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Bilinear pairing on basis sections with values in a third module.
pub type PairingTable = BTreeMap<(usize, usize), ModuleElement>;

/// `(ξ⊗e) ∧_h (ζ⊗f) = (−1)^{|e||ζ|} ξζ ⊗ h(e,f)`, extended bilinearly.
pub fn wedge_h(
    omega: &ModuleElement,
    eta: &ModuleElement,
    h: &PairingTable,
    target: &Basis,
) -> Result<ModuleElement, GcaError> {
    let gs = omega.gens();
    let mut out = ModuleElement::zero(gs, target);
    for (e, xi) in omega.terms() {
        for (fi, zeta) in eta.terms() {
            let value = h.get(&(*e, *fi)).ok_or_else(|| {
                GcaError::UndefinedPairing(
                    omega.basis().names[*e].clone(),
                    eta.basis().names[*fi].clone(),
                )
            })?;
            let de = omega.basis().degree(*e);
            for (dz, zpart) in zeta.homogeneous_parts() {
                let mut coeff = xi.mul(&zpart);
                if (de * dz).rem_euclid(2) == 1 {
                    coeff = coeff.neg();
                }
                out = out.add(&value.left_mul(&coeff));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gs() -> Gens {
        GeneratorSet::new(
            1,
            vec![
                Generator::new("t1", 1),
                Generator::new("t2", 1),
                Generator::new("b1", 2),
            ],
        )
        .unwrap()
    }

    fn el(gs: &Gens, s: &str) -> AlgebraElement {
        AlgebraElement::parse(gs, s).unwrap()
    }

    #[test]
    fn odd_generators_anticommute() {
        let g = gs();
        let t1 = el(&g, "t1");
        let t2 = el(&g, "t2");
        assert_eq!(t1.mul(&t2), el(&g, "t1*t2"));
        assert_eq!(t2.mul(&t1), el(&g, "t1*t2").neg());
        assert!(t1.mul(&t1).is_zero());
        assert_eq!(el(&g, "b1").mul(&t1), el(&g, "t1*b1"));
    }

    #[test]
    fn sign_matches_transposition_count() {
        let g = gs();
        // t2 * (t1 * b1) needs one odd transposition.
        let lhs = el(&g, "t2").mul(&el(&g, "t1*b1"));
        assert_eq!(lhs, el(&g, "t1*t2*b1").neg());
    }

    #[test]
    fn parse_display_round_trip() {
        let g = gs();
        for s in ["2*x1*t1*t2 - 1/3*b1", "0", "t2*t1", "x1^2*b1^2 + t1 - 7"] {
            let a = el(&g, s);
            assert_eq!(el(&g, &a.to_string()), a);
        }
        assert!(AlgebraElement::parse(&g, "t3").is_err());
    }

    #[test]
    fn leibniz_odd_derivation() {
        let g = gs();
        let mut d = Derivation::zero(&g, 1);
        d.set(Slot::Gen(0), el(&g, "b1"));
        d.set(Slot::Gen(1), el(&g, "x1*b1"));
        // D(t1 t2) = D(t1) t2 − t1 D(t2)
        let got = d.apply(&el(&g, "t1*t2"));
        assert_eq!(got, el(&g, "t2*b1 - x1*t1*b1"));
        assert!(d.apply(&AlgebraElement::one(&g)).is_zero());
        let dt1 = Derivation::coordinate(&g, 0);
        assert_eq!(dt1.apply(&el(&g, "t1*t2")), el(&g, "t2"));
    }

    #[test]
    fn base_coordinates_differentiate_coefficients() {
        let g = gs();
        let mut d = Derivation::zero(&g, 1);
        d.set(Slot::Base(0), el(&g, "t1"));
        assert_eq!(d.apply(&el(&g, "x1^2*t2")), el(&g, "2*x1*t1*t2"));
    }

    #[test]
    fn commutator_of_odd_with_itself_doubles_square() {
        let g = gs();
        let mut d = Derivation::zero(&g, 1);
        d.set(Slot::Gen(0), el(&g, "t1*t2"));
        d.set(Slot::Gen(1), el(&g, "b1"));
        let c = d.commutator(&d);
        for s in g.slots() {
            assert_eq!(c.value(s), &d.apply(&d.apply(&AlgebraElement::slot(&g, s))).scale_int(2));
        }
        let c2 = Derivation::coordinate(&g, 0).commutator(&Derivation::coordinate(&g, 1));
        assert!(c2.is_zero());
    }

    #[test]
    fn square_check_rejects_even() {
        let g = gs();
        assert!(matches!(
            Derivation::zero(&g, 0).square_check(),
            Err(GcaError::EvenDerivation(0))
        ));
        assert!(Derivation::zero(&g, 1).square_check().unwrap().is_empty());
    }

    #[test]
    fn wedge_sign_rule() {
        let g = gs();
        let e = SectionBasis::new(vec!["e".into()], vec![-1]);
        let f = SectionBasis::new(vec!["f".into()], vec![0]);
        let h_basis = SectionBasis::new(vec!["h".into()], vec![-1]);
        let mut table = PairingTable::new();
        table.insert((0, 0), ModuleElement::section(&g, &h_basis, 0));
        let omega = ModuleElement::single(&g, &e, 0, el(&g, "x1"));
        let eta = ModuleElement::single(&g, &f, 0, el(&g, "t1"));
        let w = wedge_h(&omega, &eta, &table, &h_basis).unwrap();
        assert_eq!(w, ModuleElement::single(&g, &h_basis, 0, el(&g, "x1*t1").neg()));
        let one = ModuleElement::section(&g, &e, 0);
        let onef = ModuleElement::section(&g, &f, 0);
        assert_eq!(
            wedge_h(&one, &onef, &table, &h_basis).unwrap(),
            ModuleElement::section(&g, &h_basis, 0)
        );
        assert!(wedge_h(&one, &onef, &PairingTable::new(), &h_basis).is_err());
    }

    #[test]
    fn generator_set_validation() {
        assert!(GeneratorSet::new(0, vec![Generator::new("a", 1), Generator::new("a", 2)]).is_err());
        assert!(GeneratorSet::new(0, vec![Generator::new("x1", 1)]).is_err());
        assert!(GeneratorSet::new(0, vec![Generator::new("a", 0)]).is_err());
    }
}
