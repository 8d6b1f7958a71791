//! Exact coefficients: rationals and multivariate polynomials over ℚ in
//! base coordinates `x1..xm`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("variable count mismatch: {0} vs {1}")]
    VarCountMismatch(usize, usize),
    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("cannot parse polynomial {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(Rational::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(Rational::from_integer(n))
    }
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exponent vector ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Exponent(pub Vec<u32>);

impl Exponent {
    pub fn zero(n: usize) -> Self {
        Exponent(vec![0; n])
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in `nvars` variables with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponent, Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Poly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(Exponent::zero(nvars), c);
        }
        p
    }

    pub fn int(nvars: usize, c: i64) -> Self {
        Poly::constant(nvars, rat(c))
    }

    pub fn one(nvars: usize) -> Self {
        Poly::int(nvars, 1)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable x{} out of range", i + 1);
        let mut e = Exponent::zero(nvars);
        e.0[i] = 1;
        let mut p = Poly::zero(nvars);
        p.terms.insert(e, Rational::one());
        p
    }

    pub fn monomial(coeff: Rational, exps: Vec<u32>) -> Self {
        let nvars = exps.len();
        let mut p = Poly::zero(nvars);
        if !coeff.is_zero() {
            p.terms.insert(Exponent(exps), coeff);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The constant coefficient.
    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Exponent::zero(self.nvars))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// `Some(c)` when the polynomial is the constant `c`.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                (e.total() == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Exponent::total).max()
    }

    fn add_term(&mut self, e: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (e.clone(), v * c))
                .collect(),
        }
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly, ScalarError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly, ScalarError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly, ScalarError> {
        self.check_vars(other)?;
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = Exponent(e1.0.iter().zip(&e2.0).map(|(a, b)| a + b).collect());
                out.add_term(e, c1 * c2);
            }
        }
        Ok(out)
    }

    fn check_vars(&self, other: &Poly) -> Result<(), ScalarError> {
        if self.nvars != other.nvars {
            return Err(ScalarError::VarCountMismatch(self.nvars, other.nvars));
        }
        Ok(())
    }

    /// ∂/∂x_i.
    pub fn partial(&self, i: usize) -> Result<Poly, ScalarError> {
        if i >= self.nvars {
            return Err(ScalarError::IndexOutOfRange {
                index: i,
                nvars: self.nvars,
            });
        }
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            let k = e.0[i];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2.0[i] -= 1;
            out.add_term(e2, c * rat(k as i64));
        }
        Ok(out)
    }

    /// Derivative along a vector field given by its components.
    pub fn directional(&self, field: &[Poly]) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (i, fi) in field.iter().enumerate() {
            if fi.is_zero() {
                continue;
            }
            out = &out + &(fi * &self.partial(i).expect("field length matches variables"));
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, k) in point.iter().zip(&e.0) {
                for _ in 0..*k {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }

    /// Parses strings like `"2*x1^2*x2 - 1/3"`.
    pub fn parse(input: &str, nvars: usize) -> Result<Poly, ScalarError> {
        let err = |reason: &str| ScalarError::Parse {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(err("empty input"));
        }
        let mut out = Poly::zero(nvars);
        let mut chunks: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for (idx, ch) in s.chars().enumerate() {
            if (ch == '+' || ch == '-') && !(idx > 0 && s.as_bytes()[idx - 1] == b'^') {
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
        for (neg, chunk) in chunks {
            let mut coeff = Rational::one();
            let mut exps = vec![0u32; nvars];
            for factor in chunk.split('*') {
                if factor.is_empty() {
                    return Err(err("empty factor"));
                }
                if let Some(rest) = factor.strip_prefix('x') {
                    let (idx, pow) = match rest.split_once('^') {
                        Some((i, p)) => (i, p.parse::<u32>().map_err(|_| err("bad exponent"))?),
                        None => (rest, 1),
                    };
                    let i: usize = idx.parse().map_err(|_| err("bad variable index"))?;
                    if i == 0 || i > nvars {
                        return Err(err("variable index out of range"));
                    }
                    exps[i - 1] += pow;
                } else {
                    let c = parse_rational(factor).ok_or_else(|| err("bad coefficient"))?;
                    coeff *= c;
                }
            }
            if neg {
                coeff = -coeff;
            }
            out.add_term(Exponent(exps), coeff);
        }
        Ok(out)
    }
}

/// Checked arithmetic entry point.
pub fn poly_arith(a: &Poly, b: &Poly, op: PolyOp) -> Result<Poly, ScalarError> {
    match op {
        PolyOp::Add => a.try_add(b),
        PolyOp::Sub => a.try_sub(b),
        PolyOp::Mul => a.try_mul(b),
    }
}

pub fn poly_partial(a: &Poly, i: usize) -> Result<Poly, ScalarError> {
    a.partial(i)
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if negative { " - " } else { " + " })?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || e.total() == 0 {
                factors.push(format_rational(&mag));
            }
            for (i, p) in e.0.iter().enumerate() {
                match p {
                    0 => {}
                    1 => factors.push(format!("x{}", i + 1)),
                    _ => factors.push(format!("x{}^{}", i + 1, p)),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.try_add(rhs).expect("polynomial variable counts agree")
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.try_sub(rhs).expect("polynomial variable counts agree")
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.try_mul(rhs).expect("polynomial variable counts agree")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Rational::one())
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// Vector of polynomials, the coordinate form of a section of a trivial bundle.
pub type PolyVec = Vec<Poly>;

pub fn zero_vec(nvars: usize, len: usize) -> PolyVec {
    vec![Poly::zero(nvars); len]
}

pub fn unit_vec(nvars: usize, len: usize, i: usize) -> PolyVec {
    let mut v = zero_vec(nvars, len);
    v[i] = Poly::one(nvars);
    v
}

pub fn vec_add(a: &[Poly], b: &[Poly]) -> PolyVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Poly], b: &[Poly]) -> PolyVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(f: &Poly, a: &[Poly]) -> PolyVec {
    a.iter().map(|x| f * x).collect()
}

pub fn vec_neg(a: &[Poly]) -> PolyVec {
    a.iter().map(|x| -x).collect()
}

pub fn vec_is_zero(a: &[Poly]) -> bool {
    a.iter().all(Poly::is_zero)
}

pub fn vec_to_strings(a: &[Poly]) -> Vec<String> {
    a.iter().map(|p| p.to_string()).collect()
}
