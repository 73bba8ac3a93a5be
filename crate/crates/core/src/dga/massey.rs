//! Matric Massey products via defining systems.
//!
//! For classes `x_1, ..., x_k` a defining system is a family `x_{ij}`
//! (`i <= j`, `(i, j) != (1, k)`) with `x_{ii}` representing `x_i` and
//! `d x_{ij} = sum_q xbar_{iq} x_{q+1,j}`, where `xbar = (-1)^{1+|x|} x`.
//! Shifting `x_{ij}` by a coboundary does not change the set of values, so
//! each entry ranges over a particular solution plus the chosen cocycle
//! representatives of cohomology. The two entries of length `k - 1` enter
//! the value linearly and are handled by one linear solve per choice of the
//! shorter entries.

use num_rational::Rational64;
use serde::Serialize;

use super::{Cohomology, WeightedDga};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::Matrix;

#[derive(Clone, Debug)]
pub struct MasseyOptions {
    /// Parameter dimension cap for exhaustive search over `F_l`.
    pub max_parameters: usize,
    /// Parameter dimension cap over `Q`.
    pub max_rational_parameters: usize,
    /// Over `Q`, parameters run through `-grid..=grid`.
    pub rational_grid: i64,
    /// Hard cap on the number of defining systems visited.
    pub max_systems: u64,
    pub max_samples: usize,
}

impl Default for MasseyOptions {
    fn default() -> Self {
        Self { max_parameters: 12, max_rational_parameters: 6, rational_grid: 2, max_systems: 1 << 20, max_samples: 32 }
    }
}

#[derive(Clone, Debug)]
pub struct MasseyResult {
    pub order: usize,
    pub defined: bool,
    /// Class of the first value found.
    pub representative: Option<Vec<Scalar>>,
    /// Columns spanning the linear indeterminacy `x_1 H + H x_k`.
    pub indeterminacy: Matrix,
    /// Distinct value classes modulo nothing, one per visited system (capped).
    pub samples: Vec<Vec<Scalar>>,
    /// `None` when the search was cut off without finding zero.
    pub contains_zero: Option<bool>,
    pub search_exhausted: bool,
    pub systems_checked: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Vanishing {
    ForcedVanish,
    NotForced,
}

/// All `k`-fold Massey products vanish when `alpha (k - 2) / m` is not an integer.
pub fn vanishing_predicate(alpha: Rational64, m: u64, k: usize) -> Vanishing {
    let t = alpha * Rational64::from_integer(k as i64 - 2) / Rational64::from_integer(m as i64);
    if t.is_integer() {
        Vanishing::NotForced
    } else {
        Vanishing::ForcedVanish
    }
}

/// `ceil(m r / alpha) + 2r + 1`.
pub fn low_degree_bound(alpha: Rational64, m: u64, r: i64) -> i64 {
    (Rational64::from_integer(m as i64 * r) / alpha).ceil().to_integer() + 2 * r + 1
}

pub fn triple_massey(
    a: &WeightedDga,
    h: &Cohomology,
    x: &[Scalar],
    y: &[Scalar],
    z: &[Scalar],
) -> Result<MasseyResult> {
    k_massey(a, h, &[x.to_vec(), y.to_vec(), z.to_vec()], &MasseyOptions::default())
}

struct Search<'a> {
    a: &'a WeightedDga,
    h: &'a Cohomology,
    opts: &'a MasseyOptions,
    k: usize,
    degrees: Vec<i64>,
    weights: Option<Vec<i64>>,
    /// `(i, j)` entries of length below `k - 1`, in order of length.
    lower: Vec<(usize, usize)>,
    grid: Vec<Scalar>,
    indeterminacy: Matrix,
    systems: u64,
    truncated: bool,
    obstruction: Option<(usize, usize)>,
    found_zero: bool,
    samples: Vec<Vec<Scalar>>,
    representative: Option<Vec<Scalar>>,
}

pub fn k_massey(a: &WeightedDga, h: &Cohomology, classes: &[Vec<Scalar>], opts: &MasseyOptions) -> Result<MasseyResult> {
    let k = classes.len();
    if k < 3 {
        return Err(Error::InvalidAlgebra("Massey products need at least three classes".into()));
    }
    let f = a.field();
    let hdim = h.algebra.dim();
    let mut reps = Vec::with_capacity(k);
    let mut degrees = Vec::with_capacity(k);
    let mut weights = Vec::with_capacity(k);
    for c in classes {
        if c.len() != hdim {
            return Err(Error::Shape(format!("class vectors must have length {hdim}")));
        }
        let d = h.algebra.degree_of(c).ok_or_else(|| {
            Error::InvalidAlgebra("Massey inputs must be nonzero classes of a single degree".into())
        })?;
        degrees.push(d);
        weights.push(h.algebra.weight_of(c));
        reps.push(h.representative(c));
    }
    let weights = weights.into_iter().collect::<Option<Vec<i64>>>();
    let lower: Vec<(usize, usize)> =
        (1..k - 2).flat_map(|len| (0..k - len).map(move |i| (i, i + len))).collect();
    let grid = match f {
        Field::Prime(_) => f.elements().expect("finite field"),
        Field::Rational => (-opts.rational_grid..=opts.rational_grid).map(|v| f.from_i64(v)).collect(),
    };

    let mut table: Vec<Vec<Option<Vec<Scalar>>>> = vec![vec![None; k]; k];
    for (i, r) in reps.into_iter().enumerate() {
        table[i][i] = Some(r);
    }
    let mut s = Search {
        a,
        h,
        opts,
        k,
        degrees,
        weights,
        lower,
        grid,
        indeterminacy: Matrix::zeros(f, hdim, 0),
        systems: 0,
        truncated: false,
        obstruction: None,
        found_zero: false,
        samples: Vec::new(),
        representative: None,
    };
    s.indeterminacy = s.linear_part(&table);
    let params: usize = s.lower.iter().map(|&(i, j)| s.classes_in(s.entry_degree(i, j)).len()).sum();
    let cap = match f {
        Field::Prime(_) => opts.max_parameters,
        Field::Rational => opts.max_rational_parameters,
    };
    if params > cap {
        s.truncated = true;
    }
    s.descend(0, &mut table)?;
    if s.systems == 0 {
        let (i, j) = s.obstruction.unwrap_or((0, k - 1));
        return Err(Error::MasseyUndefined { i: i + 1, j: j + 1 });
    }
    let exhausted = !s.truncated && !(f == Field::Rational && params > 0);
    let contains_zero = if s.found_zero {
        Some(true)
    } else if exhausted {
        Some(false)
    } else {
        None
    };
    Ok(MasseyResult {
        order: k,
        defined: true,
        representative: s.representative,
        indeterminacy: s.indeterminacy,
        samples: s.samples,
        contains_zero,
        search_exhausted: exhausted,
        systems_checked: s.systems,
    })
}

impl Search<'_> {
    fn entry_degree(&self, i: usize, j: usize) -> i64 {
        self.degrees[i..=j].iter().sum::<i64>() - (j - i) as i64
    }

    /// Cocycle representatives of the cohomology basis in degree `n`.
    fn classes_in(&self, n: i64) -> Vec<Vec<Scalar>> {
        let r = self.h.algebra.degree_range(n);
        r.map(|c| self.h.section.column(c)).collect()
    }

    fn bar(&self, v: &[Scalar], degree: i64) -> Vec<Scalar> {
        let f = self.a.field();
        let s = f.sign(1 + degree);
        v.iter().map(|c| f.mul(c, &s)).collect()
    }

    fn rhs(&self, i: usize, j: usize, table: &[Vec<Option<Vec<Scalar>>>]) -> Vec<Scalar> {
        let f = self.a.field();
        let mut out = self.a.zero_vector();
        for q in i..j {
            let left = table[i][q].as_ref().expect("shorter entries are filled first");
            let right = table[q + 1][j].as_ref().expect("shorter entries are filled first");
            let p = self.a.mul(&self.bar(left, self.entry_degree(i, q)), right);
            for (o, v) in out.iter_mut().zip(&p) {
                *o = f.add(o, v);
            }
        }
        out
    }

    /// Solves `d x = rhs` in degree `n`.
    fn solve(&self, n: i64, rhs: &[Scalar]) -> Option<Vec<Scalar>> {
        let a = self.a;
        let (src, tgt) = (a.degree_range(n), a.degree_range(n + 1));
        let local: Vec<Scalar> = rhs[tgt.clone()].to_vec();
        if rhs.iter().enumerate().any(|(t, c)| !tgt.contains(&t) && !a.field().is_zero(c)) {
            return None;
        }
        let x = if src.is_empty() {
            if local.iter().all(|c| a.field().is_zero(c)) {
                Vec::new()
            } else {
                return None;
            }
        } else if tgt.is_empty() {
            vec![a.field().zero(); src.len()]
        } else {
            a.d_block(n).solve(&local)?.particular
        };
        let mut out = a.zero_vector();
        for (o, v) in out[src].iter_mut().zip(x) {
            *o = v;
        }
        Some(out)
    }

    fn check_bookkeeping(&self, i: usize, j: usize, v: &[Scalar]) -> Result<()> {
        if self.a.is_zero(v) {
            return Ok(());
        }
        let n = self.entry_degree(i, j);
        if self.a.degree_of(v) != Some(n) {
            return Err(Error::Internal(format!("defining-system entry ({}, {}) is not of degree {n}", i + 1, j + 1)));
        }
        if let Some(w) = &self.weights {
            let expected = self.a.modulus().reduce(w[i..=j].iter().sum());
            if self.a.weight_of(v) != Some(expected) {
                return Err(Error::Internal(format!(
                    "defining-system entry ({}, {}) is not of weight {expected}",
                    i + 1,
                    j + 1
                )));
            }
        }
        Ok(())
    }

    /// Classes of `xbar c x_k` and `xbar_1 c` for `c` over the cohomology
    /// basis in the two top entry degrees.
    fn linear_part(&self, table: &[Vec<Option<Vec<Scalar>>>]) -> Matrix {
        let k = self.k;
        let f = self.a.field();
        let first = table[0][0].as_ref().expect("diagonal");
        let last = table[k - 1][k - 1].as_ref().expect("diagonal");
        let mut cols = Vec::new();
        let n1 = self.entry_degree(0, k - 2);
        for c in self.classes_in(n1) {
            cols.push(self.h.class_of(&self.a.mul(&self.bar(&c, n1), last)));
        }
        let b = self.bar(first, self.degrees[0]);
        for c in self.classes_in(self.entry_degree(1, k - 1)) {
            cols.push(self.h.class_of(&self.a.mul(&b, &c)));
        }
        let m = Matrix::from_columns(f, self.h.algebra.dim(), &cols);
        if m.cols() == 0 {
            m
        } else {
            m.image_basis()
        }
    }

    fn descend(&mut self, pos: usize, table: &mut Vec<Vec<Option<Vec<Scalar>>>>) -> Result<()> {
        if self.truncated && self.systems >= self.opts.max_systems {
            return Ok(());
        }
        if pos == self.lower.len() {
            return self.finish(table);
        }
        let (i, j) = self.lower[pos];
        let rhs = self.rhs(i, j, table);
        if !self.a.is_zero(&self.a.d(&rhs)) {
            return Err(Error::Internal(format!("defining-system equation ({}, {}) has a non-closed right side", i + 1, j + 1)));
        }
        let n = self.entry_degree(i, j);
        let Some(particular) = self.solve(n, &rhs) else {
            self.obstruction.get_or_insert((i, j));
            return Ok(());
        };
        self.check_bookkeeping(i, j, &particular)?;
        let classes = self.classes_in(n);
        let f = self.a.field();
        let mut digits = vec![0usize; classes.len()];
        loop {
            let mut v = particular.clone();
            for (c, &d) in classes.iter().zip(&digits) {
                let t = &self.grid[d];
                for (o, e) in v.iter_mut().zip(c) {
                    *o = f.mul_add(o, t, e);
                }
            }
            table[i][j] = Some(v);
            self.descend(pos + 1, table)?;
            if self.found_zero || (self.systems >= self.opts.max_systems) {
                if self.systems >= self.opts.max_systems {
                    self.truncated = true;
                }
                break;
            }
            if !advance(&mut digits, self.grid.len()) {
                break;
            }
        }
        table[i][j] = None;
        Ok(())
    }

    fn finish(&mut self, table: &mut [Vec<Option<Vec<Scalar>>>]) -> Result<()> {
        let k = self.k;
        let f = self.a.field();
        let mut tops = Vec::new();
        for (i, j) in [(0, k - 2), (1, k - 1)] {
            let rhs = self.rhs(i, j, table);
            if !self.a.is_zero(&self.a.d(&rhs)) {
                return Err(Error::Internal(format!("defining-system equation ({}, {}) has a non-closed right side", i + 1, j + 1)));
            }
            let Some(p) = self.solve(self.entry_degree(i, j), &rhs) else {
                self.obstruction.get_or_insert((i, j));
                return Ok(());
            };
            self.check_bookkeeping(i, j, &p)?;
            tops.push(((i, j), p));
        }
        for ((i, j), p) in tops {
            table[i][j] = Some(p);
        }
        let value = self.rhs(0, k - 1, table);
        table[0][k - 2] = None;
        table[1][k - 1] = None;
        if !self.a.is_zero(&self.a.d(&value)) {
            return Err(Error::Internal("Massey value is not a cocycle".into()));
        }
        self.check_bookkeeping_value(&value)?;
        let class = self.h.class_of(&value);
        self.systems += 1;
        if self.representative.is_none() {
            self.representative = Some(class.clone());
        }
        if self.samples.len() < self.opts.max_samples && !self.samples.contains(&class) {
            self.samples.push(class.clone());
        }
        let neg: Vec<Scalar> = class.iter().map(|c| f.neg(c)).collect();
        let hits_zero = class.iter().all(|c| f.is_zero(c))
            || (self.indeterminacy.cols() > 0 && self.indeterminacy.solve(&neg).is_some());
        if hits_zero {
            self.found_zero = true;
        }
        Ok(())
    }

    fn check_bookkeeping_value(&self, v: &[Scalar]) -> Result<()> {
        if self.a.is_zero(v) {
            return Ok(());
        }
        let n = self.entry_degree(0, self.k - 1) + 1;
        if self.a.degree_of(v) != Some(n) {
            return Err(Error::Internal(format!("Massey value is not of degree {n}")));
        }
        if let Some(w) = &self.weights {
            let expected = self.a.modulus().reduce(w.iter().sum());
            if self.a.weight_of(v) != Some(expected) {
                return Err(Error::Internal(format!("Massey value is not of weight {expected}")));
            }
        }
        Ok(())
    }
}

/// Odometer increment; false after the last tuple.
fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::{cohomology_algebra, from_table};
    use crate::weights::Modulus;

    #[test]
    fn predicate_examples() {
        let one = Rational64::from_integer(1);
        assert_eq!(vanishing_predicate(one, 4, 3), Vanishing::ForcedVanish);
        assert_eq!(vanishing_predicate(one, 4, 6), Vanishing::NotForced);
        assert_eq!(low_degree_bound(Rational64::new(1, 2), 3, 1), 6 + 3);
        assert_eq!(low_degree_bound(one, 4, 1), 4 + 3);
    }

    #[test]
    fn zero_differential_products_contain_zero() {
        let f = Field::Prime(5);
        // exterior-type algebra on a, b in degree 1 with ab = ba = 0
        let a = from_table(f, Modulus::Cyclic(1), &[("1", 0, 0), ("a", 1, 0), ("b", 1, 0)], &[], &[]).unwrap();
        let h = cohomology_algebra(&a).unwrap();
        let x = h.algebra.basis_vector(1);
        let y = h.algebra.basis_vector(2);
        let r = triple_massey(&a, &h, &x, &y, &x).unwrap();
        assert!(r.defined);
        assert_eq!(r.contains_zero, Some(true));
        assert!(r.representative.unwrap().iter().all(|c| f.is_zero(c)));
        let r = k_massey(&a, &h, &[x.clone(), y.clone(), x.clone(), y.clone()], &MasseyOptions::default()).unwrap();
        assert_eq!(r.contains_zero, Some(true));
        assert!(r.search_exhausted);
    }

    #[test]
    fn undefined_when_products_survive() {
        let f = Field::Prime(5);
        let a = from_table(
            f,
            Modulus::Cyclic(1),
            &[("1", 0, 0), ("a", 1, 0), ("b", 1, 0), ("ab", 2, 0)],
            &[(1, 2, 3, 1)],
            &[],
        )
        .unwrap();
        let h = cohomology_algebra(&a).unwrap();
        let x = h.algebra.basis_vector(1);
        let y = h.algebra.basis_vector(2);
        let r = triple_massey(&a, &h, &x, &y, &y);
        assert!(matches!(r, Err(Error::MasseyUndefined { i: 1, j: 2 })));
    }

    #[test]
    fn odometer_visits_every_tuple() {
        let mut d = vec![0, 0];
        let mut n = 1;
        while advance(&mut d, 3) {
            n += 1;
        }
        assert_eq!(n, 9);
    }
}
