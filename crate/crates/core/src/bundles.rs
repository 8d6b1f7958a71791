//! Graded vector bundles over the chart, treated as free modules with
//! labelled frames, graded maps between them and complexes.
//!
//! Indices: a bundle is `⊕ E_n[n]`; the component in upper degree k is
//! `E^k = E_{-k}`, and a section of `E_n` has degree `-n`.

use std::collections::BTreeMap;

use itertools::Itertools;
use thiserror::Error;

use crate::report::CheckReport;
use crate::scalars::Poly;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BundleError {
    #[error("power must be nonnegative, got {0}")]
    NegativePower(i64),
    #[error("variable count mismatch: {0} vs {1}")]
    VarCountMismatch(usize, usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Upper degree k ↔ lower index n = −k.
pub fn lower_index(upper: i32) -> i32 {
    -upper
}

pub fn upper_degree(lower: i32) -> i32 {
    -lower
}

/// A graded bundle with a frame of labelled sections, keyed by lower index n.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradedBundle {
    pub nvars: usize,
    pub components: BTreeMap<i32, Vec<String>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Construction {
    Dual,
    Tensor,
    Hom,
    Sym(i64),
    Antisym(i64),
    Shift(i32),
    DirectSum,
}

impl GradedBundle {
    pub fn new(nvars: usize) -> Self {
        GradedBundle {
            nvars,
            components: BTreeMap::new(),
        }
    }

    /// Adds a component `E_n` with sections named `prefix1..prefixr`.
    pub fn with_component(mut self, lower: i32, prefix: &str, rank: usize) -> Self {
        let labels = (1..=rank).map(|i| format!("{prefix}{i}"));
        self.components.entry(lower).or_default().extend(labels);
        self
    }

    pub fn with_labels(mut self, lower: i32, labels: Vec<String>) -> Self {
        self.components.entry(lower).or_default().extend(labels);
        self
    }

    pub fn rank(&self, lower: i32) -> usize {
        self.components.get(&lower).map_or(0, Vec::len)
    }

    pub fn rank_upper(&self, upper: i32) -> usize {
        self.rank(lower_index(upper))
    }

    pub fn total_rank(&self) -> usize {
        self.components.values().map(Vec::len).sum()
    }

    /// Nonzero ranks keyed by lower index.
    pub fn ranks(&self) -> BTreeMap<i32, usize> {
        self.components
            .iter()
            .filter(|(_, v)| !v.is_empty())
            .map(|(k, v)| (*k, v.len()))
            .collect()
    }

    /// All sections with their degrees (−n), ordered by lower index.
    pub fn sections(&self) -> Vec<(String, i32)> {
        self.components
            .iter()
            .flat_map(|(n, labels)| labels.iter().map(move |l| (l.clone(), -n)))
            .collect()
    }

    pub fn dual(&self) -> GradedBundle {
        let mut out = GradedBundle::new(self.nvars);
        for (n, labels) in &self.components {
            out.components
                .insert(-n, labels.iter().map(|l| dual_label(l)).collect());
        }
        out
    }

    pub fn tensor(&self, other: &GradedBundle) -> GradedBundle {
        let mut out = GradedBundle::new(self.nvars);
        for (i, a) in &self.components {
            for (j, b) in &other.components {
                let entry = out.components.entry(i + j).or_default();
                for (x, y) in a.iter().cartesian_product(b) {
                    entry.push(format!("{x}⊗{y}"));
                }
            }
        }
        out
    }

    pub fn hom(&self, other: &GradedBundle) -> GradedBundle {
        let mut out = GradedBundle::new(self.nvars);
        for (i, a) in &self.components {
            for (j, b) in &other.components {
                let entry = out.components.entry(j - i).or_default();
                for (x, y) in a.iter().cartesian_product(b) {
                    entry.push(format!("{x}→{y}"));
                }
            }
        }
        out
    }

    fn power(&self, k: i64, symmetric: bool) -> Result<GradedBundle, BundleError> {
        if k < 0 {
            return Err(BundleError::NegativePower(k));
        }
        let secs: Vec<(String, i32)> = self.sections();
        let mut out = GradedBundle::new(self.nvars);
        if k == 0 {
            out.components.insert(0, vec!["1".into()]);
            return Ok(out);
        }
        for combo in (0..secs.len()).combinations_with_replacement(k as usize) {
            let repeats_ok = combo.iter().dedup_with_count().all(|(c, &i)| {
                // Graded symmetric powers forbid repeats of odd sections;
                // graded antisymmetric powers forbid repeats of even ones.
                let odd = secs[i].1.rem_euclid(2) == 1;
                c == 1 || (symmetric != odd)
            });
            if !repeats_ok {
                continue;
            }
            let deg: i32 = combo.iter().map(|&i| secs[i].1).sum();
            let sep = if symmetric { "·" } else { "∧" };
            let label = combo.iter().map(|&i| secs[i].0.as_str()).join(sep);
            out.components.entry(-deg).or_default().push(label);
        }
        Ok(out)
    }

    pub fn sym(&self, k: i64) -> Result<GradedBundle, BundleError> {
        self.power(k, true)
    }

    pub fn antisym(&self, k: i64) -> Result<GradedBundle, BundleError> {
        self.power(k, false)
    }

    /// `E[k]^i = E^{i+k}`: the lower index of every component grows by k.
    pub fn shift(&self, k: i32) -> GradedBundle {
        let mut out = GradedBundle::new(self.nvars);
        for (n, labels) in &self.components {
            out.components.insert(n + k, labels.clone());
        }
        out
    }

    pub fn direct_sum(&self, other: &GradedBundle) -> GradedBundle {
        let mut out = self.clone();
        for (n, labels) in &other.components {
            out.components.entry(*n).or_default().extend(labels.clone());
        }
        out
    }
}

fn dual_label(l: &str) -> String {
    match l.strip_suffix('*') {
        Some(base) => base.to_string(),
        None => format!("{l}*"),
    }
}

/// Applies a construction to one or two bundles.
pub fn build_construction(
    kind: Construction,
    a: &GradedBundle,
    b: Option<&GradedBundle>,
) -> Result<GradedBundle, BundleError> {
    if let Some(b) = b {
        if a.nvars != b.nvars {
            return Err(BundleError::VarCountMismatch(a.nvars, b.nvars));
        }
    }
    let second = || b.ok_or_else(|| BundleError::Shape("construction needs two bundles".into()));
    Ok(match kind {
        Construction::Dual => a.dual(),
        Construction::Tensor => a.tensor(second()?),
        Construction::Hom => a.hom(second()?),
        Construction::Sym(k) => a.sym(k)?,
        Construction::Antisym(k) => a.antisym(k)?,
        Construction::Shift(k) => a.shift(k),
        Construction::DirectSum => a.direct_sum(second()?),
    })
}

/// Degree-k map with one Poly matrix per source upper degree i: `E^i → F^{i+k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    pub degree: i32,
    pub blocks: BTreeMap<i32, Vec<Vec<Poly>>>,
}

impl GradedMap {
    pub fn zero(degree: i32) -> Self {
        GradedMap {
            degree,
            blocks: BTreeMap::new(),
        }
    }

    pub fn block(&self, upper: i32) -> Option<&Vec<Vec<Poly>>> {
        self.blocks.get(&upper)
    }

    /// `(self ∘ other)` on the component of upper degree i.
    pub fn compose_at(&self, other: &GradedMap, upper: i32, nvars: usize) -> Option<Vec<Vec<Poly>>> {
        let inner = other.blocks.get(&upper)?;
        let outer = self.blocks.get(&(upper + other.degree))?;
        let rows = outer.len();
        let mid = inner.len();
        let cols = inner.first().map_or(0, Vec::len);
        let mut out = vec![vec![Poly::zero(nvars); cols]; rows];
        for i in 0..rows {
            for k in 0..mid {
                for j in 0..cols {
                    out[i][j] = &out[i][j] + &(&outer[i][k] * &inner[k][j]);
                }
            }
        }
        Some(out)
    }

    pub fn check_shapes(&self, src: &GradedBundle, dst: &GradedBundle) -> Result<(), BundleError> {
        for (i, m) in &self.blocks {
            let rows = dst.rank_upper(i + self.degree);
            let cols = src.rank_upper(*i);
            if m.len() != rows || m.iter().any(|r| r.len() != cols) {
                return Err(BundleError::Shape(format!(
                    "block at upper degree {i} should be {rows}x{cols}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexData {
    pub bundle: GradedBundle,
    pub differential: GradedMap,
}

impl ComplexData {
    pub fn shift(&self, k: i32) -> ComplexData {
        let blocks = self
            .differential
            .blocks
            .iter()
            .map(|(i, m)| (i - k, m.clone()))
            .collect();
        ComplexData {
            bundle: self.bundle.shift(k),
            differential: GradedMap { degree: 1, blocks },
        }
    }
}

fn square_defects(c: &ComplexData) -> Vec<String> {
    let nv = c.bundle.nvars;
    let mut out = Vec::new();
    for i in c.differential.blocks.keys() {
        if let Some(sq) = c.differential.compose_at(&c.differential, *i, nv) {
            for (r, row) in sq.iter().enumerate() {
                for (col, p) in row.iter().enumerate() {
                    if !p.is_zero() {
                        out.push(format!("degree {i}: (∂∂)[{r}][{col}] = {p}"));
                    }
                }
            }
        }
    }
    out
}

/// Verifies `∂∘∂ = 0` in every degree, for the complex and its shift by one.
pub fn complex_check(c: &ComplexData) -> Result<CheckReport, BundleError> {
    if c.differential.degree != 1 {
        return Err(BundleError::Shape("differential must have degree 1".into()));
    }
    c.differential.check_shapes(&c.bundle, &c.bundle)?;
    let mut r = CheckReport::new("complex");
    r.clause("square_zero", square_defects(c));
    r.clause("shifted_square_zero", square_defects(&c.shift(1)));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_negates_degree() {
        let e = GradedBundle::new(0).with_component(1, "q", 2);
        let d = e.dual();
        assert_eq!(d.rank_upper(1), 2);
        assert_eq!(d.dual(), e);
    }

    #[test]
    fn shift_of_trivial_line() {
        let r = GradedBundle::new(0).with_component(0, "e", 1);
        assert_eq!(r.shift(1).rank(1), 1);
        assert_eq!(r.shift(1).rank(0), 0);
    }

    #[test]
    fn symmetric_square_rank() {
        let e = GradedBundle::new(0).with_component(0, "v", 2);
        assert_eq!(e.sym(2).unwrap().total_rank(), 3);
        assert_eq!(e.antisym(2).unwrap().total_rank(), 1);
        let odd = GradedBundle::new(0).with_component(1, "q", 2);
        assert_eq!(odd.sym(2).unwrap().total_rank(), 1);
        assert_eq!(odd.antisym(2).unwrap().total_rank(), 3);
        assert!(matches!(e.sym(-1), Err(BundleError::NegativePower(-1))));
    }

    #[test]
    fn hom_ranks_match_dual_tensor() {
        let e = GradedBundle::new(0)
            .with_component(0, "a", 1)
            .with_component(1, "b", 2);
        let f = GradedBundle::new(0)
            .with_component(-1, "c", 3)
            .with_component(2, "d", 1);
        assert_eq!(e.hom(&f).ranks(), e.dual().tensor(&f).ranks());
    }

    #[test]
    fn complex_detects_bad_square() {
        let e = GradedBundle::new(0)
            .with_component(0, "a", 1)
            .with_component(-1, "b", 1)
            .with_component(-2, "c", 1);
        let mut d = GradedMap::zero(1);
        d.blocks.insert(0, vec![vec![Poly::int(0, 1)]]);
        d.blocks.insert(1, vec![vec![Poly::int(0, 0)]]);
        let c = ComplexData {
            bundle: e.clone(),
            differential: d.clone(),
        };
        assert!(complex_check(&c).unwrap().passed());
        d.blocks.insert(1, vec![vec![Poly::int(0, 2)]]);
        let bad = ComplexData {
            bundle: e,
            differential: d,
        };
        let r = complex_check(&bad).unwrap();
        assert!(!r.passed());
        assert!(r.clauses[0].witnesses[0].contains("degree 0"));
    }
}
