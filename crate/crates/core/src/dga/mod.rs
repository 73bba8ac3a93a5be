//! Finite-type dg-algebras with a weight decomposition.
//!
//! Elements are dense coordinate vectors over a basis ordered by degree.
//! Products are stored sparsely as expansions of basis pairs; pairs that
//! are absent multiply to zero.

mod cohomology;
mod massey;

use std::collections::BTreeMap;
use std::ops::Range;

use serde::Serialize;

use crate::complexes::{Complex, DegreeMap, Variance};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::Matrix;
use crate::weights::Modulus;

pub use cohomology::{algebra_purity, cohomology_algebra, connectivity, Cohomology, Connectivity};
pub use massey::{
    k_massey, low_degree_bound, triple_massey, vanishing_predicate, MasseyOptions, MasseyResult, Vanishing,
};

/// Sparse vector: `(basis index, nonzero coefficient)`.
pub type Sparse = Vec<(usize, Scalar)>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasisElement {
    pub label: String,
    pub degree: i64,
    pub weight: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedDga {
    field: Field,
    modulus: Modulus,
    basis: Vec<BasisElement>,
    unit: usize,
    mult: BTreeMap<(usize, usize), Sparse>,
    diff: Matrix,
}

impl WeightedDga {
    /// Structural checks only (shapes, ordering, unit placement); the
    /// algebraic axioms are checked by [`validate`].
    pub fn new(
        field: Field,
        modulus: Modulus,
        basis: Vec<BasisElement>,
        unit: usize,
        products: Vec<(usize, usize, Vec<Scalar>)>,
        diff: Matrix,
    ) -> Result<Self> {
        let dim = basis.len();
        if unit >= dim {
            return Err(Error::InvalidAlgebra("the unit index is out of range".into()));
        }
        if basis[unit].degree != 0 || basis[unit].weight != 0 {
            return Err(Error::InvalidAlgebra("the unit must have degree 0 and weight 0".into()));
        }
        for (i, b) in basis.iter().enumerate() {
            if b.degree < 0 {
                return Err(Error::NegativeDegree(b.degree));
            }
            if modulus.reduce(b.weight) != b.weight {
                return Err(Error::Grading(format!("weight {} of {:?} is not canonical", b.weight, b.label)));
            }
            if i > 0 && basis[i - 1].degree > b.degree {
                return Err(Error::InvalidAlgebra("basis must be ordered by degree".into()));
            }
        }
        if diff.shape() != (dim, dim) || diff.field() != field {
            return Err(Error::Shape(format!("differential must be {dim} x {dim} over the algebra's field")));
        }
        let mut mult = BTreeMap::new();
        for (i, j, coeffs) in products {
            if i >= dim || j >= dim || coeffs.len() != dim {
                return Err(Error::Shape(format!("product entry ({i}, {j}) does not fit a {dim}-dimensional basis")));
            }
            let sparse = to_sparse(field, &coeffs);
            if mult.insert((i, j), sparse).is_some() {
                return Err(Error::InvalidAlgebra(format!("product ({i}, {j}) given twice")));
            }
        }
        Ok(Self { field, modulus, basis, unit, mult, diff }.with_unit_products())
    }

    /// Same as [`new`](Self::new) with products already sparse.
    pub fn from_sparse(
        field: Field,
        modulus: Modulus,
        basis: Vec<BasisElement>,
        unit: usize,
        mult: BTreeMap<(usize, usize), Sparse>,
        diff: Matrix,
    ) -> Result<Self> {
        let dense = mult
            .into_iter()
            .map(|((i, j), s)| {
                let mut v = vec![field.zero(); basis.len()];
                for (k, c) in s {
                    v[k] = c;
                }
                (i, j, v)
            })
            .collect();
        Self::new(field, modulus, basis, unit, dense, diff)
    }

    /// Fills in `1 * x = x * 1 = x` for pairs not given explicitly.
    fn with_unit_products(mut self) -> Self {
        let one = self.field.one();
        for i in 0..self.dim() {
            self.mult.entry((self.unit, i)).or_insert_with(|| vec![(i, one.clone())]);
            self.mult.entry((i, self.unit)).or_insert_with(|| vec![(i, one.clone())]);
        }
        self
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn diff(&self) -> &Matrix {
        &self.diff
    }

    pub fn products(&self) -> &BTreeMap<(usize, usize), Sparse> {
        &self.mult
    }

    pub fn top_degree(&self) -> i64 {
        self.basis.last().map_or(0, |b| b.degree)
    }

    /// Basis indices of degree `n` (contiguous).
    pub fn degree_range(&self, n: i64) -> Range<usize> {
        let start = self.basis.partition_point(|b| b.degree < n);
        let end = self.basis.partition_point(|b| b.degree <= n);
        start..end
    }

    pub fn degree_dim(&self, n: i64) -> usize {
        self.degree_range(n).len()
    }

    pub fn zero_vector(&self) -> Vec<Scalar> {
        vec![self.field.zero(); self.dim()]
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Scalar> {
        let mut v = self.zero_vector();
        v[i] = self.field.one();
        v
    }

    pub fn unit_vector(&self) -> Vec<Scalar> {
        self.basis_vector(self.unit)
    }

    pub fn product(&self, i: usize, j: usize) -> &[(usize, Scalar)] {
        self.mult.get(&(i, j)).map_or(&[], Vec::as_slice)
    }

    pub fn mul(&self, u: &[Scalar], v: &[Scalar]) -> Vec<Scalar> {
        let f = self.field;
        let mut out = self.zero_vector();
        let nu: Vec<usize> = (0..u.len()).filter(|&i| !f.is_zero(&u[i])).collect();
        let nv: Vec<usize> = (0..v.len()).filter(|&j| !f.is_zero(&v[j])).collect();
        for &i in &nu {
            for &j in &nv {
                let p = self.product(i, j);
                if p.is_empty() {
                    continue;
                }
                let c = f.mul(&u[i], &v[j]);
                for (k, s) in p {
                    out[*k] = f.mul_add(&out[*k], &c, s);
                }
            }
        }
        out
    }

    pub fn d(&self, v: &[Scalar]) -> Vec<Scalar> {
        self.diff.mul_vec(v)
    }

    pub fn is_zero(&self, v: &[Scalar]) -> bool {
        v.iter().all(|c| self.field.is_zero(c))
    }

    /// The degree of a nonzero homogeneous vector.
    pub fn degree_of(&self, v: &[Scalar]) -> Option<i64> {
        homogeneous(v, self.field, |i| self.basis[i].degree)
    }

    /// The weight of a nonzero weight-homogeneous vector.
    pub fn weight_of(&self, v: &[Scalar]) -> Option<i64> {
        homogeneous(v, self.field, |i| self.basis[i].weight)
    }

    pub fn has_zero_differential(&self) -> bool {
        self.diff.is_zero()
    }

    /// Basis indices of degree `n` and weight `p`.
    pub fn summand(&self, n: i64, p: i64) -> Vec<usize> {
        self.degree_range(n).filter(|&i| self.basis[i].weight == p).collect()
    }

    pub fn distinct_weights(&self) -> Vec<i64> {
        let mut w: Vec<i64> = self.basis.iter().map(|b| b.weight).collect();
        w.sort_unstable();
        w.dedup();
        w
    }

    /// `d : A^n -> A^{n+1}` in the degreewise bases.
    pub fn d_block(&self, n: i64) -> Matrix {
        let (src, tgt) = (self.degree_range(n), self.degree_range(n + 1));
        self.diff.block(tgt.start, src.start, tgt.len(), src.len())
    }

    /// The underlying cochain complex (own degrees `0..=top`).
    pub fn complex(&self) -> Complex {
        let top = self.top_degree();
        let dims: BTreeMap<i64, usize> = (0..=top).map(|n| (n, self.degree_dim(n))).collect();
        let diffs: BTreeMap<i64, Matrix> = (0..top).map(|n| (n, self.d_block(n))).collect();
        Complex::new(self.field, Variance::Cohomological, &dims, &diffs).expect("d^2 = 0 is checked by validate")
    }

    /// Splits a global `dim' x dim` matrix into degree blocks keyed by the
    /// internal degree of [`complex`](Self::complex).
    pub fn degree_blocks(source: &WeightedDga, target: &WeightedDga, global: &Matrix) -> DegreeMap {
        let v = Variance::Cohomological;
        (0..=source.top_degree().max(target.top_degree()))
            .map(|n| {
                let (s, t) = (source.degree_range(n), target.degree_range(n));
                let m = if s.is_empty() && t.is_empty() {
                    Matrix::zeros(source.field, 0, 0)
                } else if s.is_empty() || t.is_empty() || t.end > global.rows() || s.end > global.cols() {
                    Matrix::zeros(source.field, t.len(), s.len())
                } else {
                    global.block(t.start, s.start, t.len(), s.len())
                };
                (v.internal(n), m)
            })
            .filter(|(_, m)| m.rows() > 0 || m.cols() > 0)
            .collect()
    }

    /// Inverse of [`degree_blocks`](Self::degree_blocks).
    pub fn global_map(source: &WeightedDga, target: &WeightedDga, blocks: &DegreeMap) -> Matrix {
        let v = Variance::Cohomological;
        let mut g = Matrix::zeros(source.field, target.dim(), source.dim());
        for (&k, m) in blocks {
            let n = v.internal(k);
            let (s, t) = (source.degree_range(n), target.degree_range(n));
            if m.shape() == (t.len(), s.len()) && !s.is_empty() && !t.is_empty() {
                g.set_block(t.start, s.start, m);
            }
        }
        g
    }

    /// Drops everything above degree `top`; products landing there become zero.
    pub fn truncate(&self, top: i64) -> WeightedDga {
        let keep = self.basis.partition_point(|b| b.degree <= top);
        let basis = self.basis[..keep].to_vec();
        let mult = self
            .mult
            .iter()
            .filter(|((i, j), _)| *i < keep && *j < keep)
            .map(|(&k, s)| (k, s.iter().filter(|(t, _)| *t < keep).cloned().collect::<Sparse>()))
            .filter(|(_, s)| !s.is_empty())
            .collect();
        let diff = self.diff.block(0, 0, keep, keep);
        WeightedDga { field: self.field, modulus: self.modulus, basis, unit: self.unit, mult, diff }
    }

    /// The same algebra in the basis given by the columns of `p`, which must
    /// be invertible with degree- and weight-homogeneous columns in degree order.
    pub fn change_basis(&self, p: &Matrix, labels: Vec<String>) -> Result<WeightedDga> {
        let inv = p.inverse().ok_or_else(|| Error::Shape("change of basis is not invertible".into()))?;
        let cols = p.columns();
        let mut basis = Vec::with_capacity(cols.len());
        for (c, label) in cols.iter().zip(labels) {
            let degree = self.degree_of(c).ok_or_else(|| Error::Grading(format!("{label} is not degree-homogeneous")))?;
            let weight = self.weight_of(c).ok_or_else(|| Error::Grading(format!("{label} is not weight-homogeneous")))?;
            basis.push(BasisElement { label, degree, weight });
        }
        let unit = cols
            .iter()
            .position(|c| *c == self.unit_vector())
            .ok_or_else(|| Error::InvalidAlgebra("the new basis does not contain the unit".into()))?;
        let mut mult = BTreeMap::new();
        for i in 0..cols.len() {
            for j in 0..cols.len() {
                let prod = inv.mul_vec(&self.mul(&cols[i], &cols[j]));
                let sparse = to_sparse(self.field, &prod);
                if !sparse.is_empty() {
                    mult.insert((i, j), sparse);
                }
            }
        }
        let diff = inv.mul(&self.diff).mul(p);
        WeightedDga::from_sparse(self.field, self.modulus, basis, unit, mult, diff)
    }

    fn is_default_unit_product(&self, i: usize, j: usize, s: &Sparse) -> bool {
        let other = if i == self.unit { j } else if j == self.unit { i } else { return false };
        s.len() == 1 && s[0].0 == other && self.field.is_one(&s[0].1)
    }

    /// The structure constants as dense triples, for serialization.
    pub fn dense_products(&self) -> Vec<(usize, usize, Vec<Scalar>)> {
        self.mult
            .iter()
            .filter(|((i, j), s)| !self.is_default_unit_product(*i, *j, s))
            .map(|(&(i, j), s)| {
                let mut v = self.zero_vector();
                for (k, c) in s {
                    v[*k] = c.clone();
                }
                (i, j, v)
            })
            .collect()
    }
}

fn to_sparse(field: Field, v: &[Scalar]) -> Sparse {
    v.iter().enumerate().filter(|(_, c)| !field.is_zero(c)).map(|(i, c)| (i, c.clone())).collect()
}

fn homogeneous(v: &[Scalar], field: Field, key: impl Fn(usize) -> i64) -> Option<i64> {
    let mut it = (0..v.len()).filter(|&i| !field.is_zero(&v[i])).map(key);
    let first = it.next()?;
    it.all(|k| k == first).then_some(first)
}

#[derive(Clone, Debug, Serialize)]
pub struct Violation {
    pub kind: &'static str,
    pub locus: Vec<String>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn into_result(self) -> Result<()> {
        match self.violations.first() {
            None => Ok(()),
            Some(v) => Err(Error::InvalidAlgebra(format!("{} at {}: {}", v.kind, v.locus.join(", "), v.detail))),
        }
    }
}

const MAX_VIOLATIONS: usize = 64;

/// Checks grading, weights, `d^2 = 0`, Leibniz, associativity and the unit
/// on all basis pairs and triples.
pub fn validate(a: &WeightedDga) -> ValidationReport {
    let mut out = Vec::new();
    let f = a.field;
    let label = |i: usize| a.basis[i].label.clone();
    let push = |out: &mut Vec<Violation>, kind, locus, detail: String| {
        if out.len() < MAX_VIOLATIONS {
            out.push(Violation { kind, locus, detail });
        }
    };

    for j in 0..a.dim() {
        for i in 0..a.dim() {
            if f.is_zero(a.diff.get(i, j)) {
                continue;
            }
            if a.basis[i].degree != a.basis[j].degree + 1 {
                push(&mut out, "degree", vec![label(j)], format!("d has a component on {} of the wrong degree", label(i)));
            } else if a.basis[i].weight != a.basis[j].weight {
                push(&mut out, "weight", vec![label(j)], format!("d does not preserve weight (component on {})", label(i)));
            }
        }
    }
    for (&(i, j), s) in &a.mult {
        let deg = a.basis[i].degree + a.basis[j].degree;
        let w = a.modulus.reduce(a.basis[i].weight + a.basis[j].weight);
        for (k, _) in s {
            if a.basis[*k].degree != deg {
                push(&mut out, "degree", vec![label(i), label(j)], format!("product has a component on {} of the wrong degree", label(*k)));
            } else if a.basis[*k].weight != w {
                push(&mut out, "weight", vec![label(i), label(j)], format!("product is not of weight {w} (component on {})", label(*k)));
            }
        }
    }
    if !a.diff.mul(&a.diff).is_zero() {
        let dd = a.diff.mul(&a.diff);
        let j = (0..a.dim()).find(|&j| dd.column(j).iter().any(|c| !f.is_zero(c))).unwrap_or(0);
        push(&mut out, "d^2", vec![label(j)], "d^2 is nonzero".into());
    }
    let unit = a.unit_vector();
    if !a.is_zero(&a.d(&unit)) {
        push(&mut out, "unit", vec![label(a.unit)], "d(1) is nonzero".into());
    }
    let basis: Vec<Vec<Scalar>> = (0..a.dim()).map(|i| a.basis_vector(i)).collect();
    let diffs: Vec<Vec<Scalar>> = basis.iter().map(|e| a.d(e)).collect();
    let top = a.top_degree();
    for i in 0..a.dim() {
        if a.mul(&unit, &basis[i]) != basis[i] || a.mul(&basis[i], &unit) != basis[i] {
            push(&mut out, "unit", vec![label(i)], "1 is not a two-sided unit".into());
        }
        for j in 0..a.dim() {
            if a.basis[i].degree + a.basis[j].degree > top + 1 {
                continue;
            }
            let xy = a.mul(&basis[i], &basis[j]);
            let lhs = a.d(&xy);
            let s = f.sign(a.basis[i].degree);
            let r1 = a.mul(&diffs[i], &basis[j]);
            let r2 = a.mul(&basis[i], &diffs[j]);
            let rhs: Vec<Scalar> = r1.iter().zip(&r2).map(|(p, q)| f.mul_add(p, &s, q)).collect();
            if lhs != rhs {
                push(&mut out, "leibniz", vec![label(i), label(j)], "d(xy) differs from dx y + (-1)^|x| x dy".into());
            }
        }
    }
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            if a.basis[i].degree + a.basis[j].degree > top {
                continue;
            }
            let xy = a.mul(&basis[i], &basis[j]);
            for k in 0..a.dim() {
                if a.basis[i].degree + a.basis[j].degree + a.basis[k].degree > top {
                    continue;
                }
                let yz = a.mul(&basis[j], &basis[k]);
                if a.mul(&xy, &basis[k]) != a.mul(&basis[i], &yz) {
                    push(&mut out, "associativity", vec![label(i), label(j), label(k)], "(xy)z differs from x(yz)".into());
                }
            }
        }
    }
    ValidationReport { ok: out.is_empty(), violations: out }
}

/// A `[x]/(x^{k+1})`-style algebra helper used by tests and generators:
/// one basis element per listed `(label, degree, weight)`, products given
/// by index triples `(i, j, k, coefficient)`.
pub fn from_table(
    field: Field,
    modulus: Modulus,
    basis: &[(&str, i64, i64)],
    products: &[(usize, usize, usize, i64)],
    diff: &[(usize, usize, i64)],
) -> Result<WeightedDga> {
    let dim = basis.len();
    let elems = basis.iter().map(|&(l, n, p)| BasisElement { label: l.into(), degree: n, weight: p }).collect();
    let mut mult: BTreeMap<(usize, usize), Sparse> = BTreeMap::new();
    for &(i, j, k, c) in products {
        mult.entry((i, j)).or_default().push((k, field.from_i64(c)));
    }
    let mut d = Matrix::zeros(field, dim, dim);
    for &(src, tgt, c) in diff {
        d.set(tgt, src, field.from_i64(c));
    }
    WeightedDga::from_sparse(field, modulus, elems, 0, mult, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> Field {
        Field::Prime(7)
    }

    /// `F_7[x]/(x^3)`, `|x| = 2`, `w(x) = 1`, `m = 3`.
    fn truncated_poly() -> WeightedDga {
        from_table(
            f7(),
            Modulus::Cyclic(3),
            &[("1", 0, 0), ("x", 2, 1), ("x2", 4, 2)],
            &[(1, 1, 2, 1)],
            &[],
        )
        .unwrap()
    }

    #[test]
    fn polynomial_algebra_is_valid() {
        let a = truncated_poly();
        let r = validate(&a);
        assert!(r.ok, "{:?}", r.violations);
        assert_eq!(a.degree_range(2), 1..2);
        assert_eq!(a.degree_dim(3), 0);
        assert_eq!(a.complex().external_dims(), BTreeMap::from([(0, 1), (2, 1), (4, 1)]));
    }

    #[test]
    fn weight_breaking_product_is_located() {
        let a = from_table(
            f7(),
            Modulus::Cyclic(3),
            &[("1", 0, 0), ("x", 2, 1), ("x2", 4, 0)],
            &[(1, 1, 2, 1)],
            &[],
        )
        .unwrap();
        let r = validate(&a);
        assert!(!r.ok);
        assert_eq!(r.violations[0].kind, "weight");
        assert_eq!(r.violations[0].locus, vec!["x".to_string(), "x".to_string()]);
    }

    #[test]
    fn leibniz_violation_is_located() {
        let a = from_table(
            f7(),
            Modulus::Cyclic(1),
            &[("1", 0, 0), ("x", 1, 0), ("y", 1, 0), ("xy", 2, 0)],
            &[(1, 2, 3, 1)],
            &[(2, 1, 1)],
        );
        let r = validate(&a.unwrap());
        assert!(r.violations.iter().any(|v| v.kind == "degree"));

        // e idempotent in degree 0 with d e = y but e y = y e = 0
        let a = from_table(
            f7(),
            Modulus::Cyclic(1),
            &[("1", 0, 0), ("e", 0, 0), ("y", 1, 0)],
            &[(1, 1, 1, 1)],
            &[(1, 2, 1)],
        )
        .unwrap();
        let r = validate(&a);
        assert!(r.violations.iter().any(|v| v.kind == "leibniz" && v.locus == vec!["e".to_string(), "e".to_string()]));
    }

    #[test]
    fn associativity_violation_is_located() {
        let a = from_table(
            f7(),
            Modulus::Cyclic(1),
            &[("1", 0, 0), ("x", 1, 0), ("y", 1, 0), ("xy", 2, 0), ("xyx", 3, 0)],
            &[(1, 2, 3, 1), (3, 1, 4, 1)],
            &[],
        )
        .unwrap();
        let r = validate(&a);
        // (xy)x = xyx but x(yx) = 0
        assert!(r.violations.iter().any(|v| v.kind == "associativity"));
    }

    #[test]
    fn unsorted_basis_rejected() {
        let r = from_table(f7(), Modulus::Cyclic(1), &[("1", 0, 0), ("x", 2, 0), ("y", 1, 0)], &[], &[]);
        assert!(matches!(r, Err(Error::InvalidAlgebra(_))));
    }

    #[test]
    fn truncation_and_blocks() {
        let a = truncated_poly();
        let t = a.truncate(2);
        assert_eq!(t.dim(), 2);
        assert!(validate(&t).ok);
        let x = t.basis_vector(1);
        assert!(t.is_zero(&t.mul(&x, &x)));
        let id = Matrix::identity(f7(), 3);
        let blocks = WeightedDga::degree_blocks(&a, &a, &id);
        assert_eq!(WeightedDga::global_map(&a, &a, &blocks), id);
    }
}
