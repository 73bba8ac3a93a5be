use std::collections::BTreeMap;

use num_rational::Rational64;
use serde::Serialize;

use super::{BasisElement, Sparse, WeightedDga};
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::linalg::Matrix;
use crate::weights::{pure_weight, PurityEntry, PurityReport};

/// `H^*(A)` as a zero-differential algebra, with the chosen cocycle
/// representatives (`section`) and the class map on cocycles (`projection`),
/// both in global coordinates.
#[derive(Clone, Debug)]
pub struct Cohomology {
    pub algebra: WeightedDga,
    pub section: Matrix,
    pub projection: Matrix,
}

impl Cohomology {
    pub fn class_of(&self, cocycle: &[Scalar]) -> Vec<Scalar> {
        self.projection.mul_vec(cocycle)
    }

    pub fn representative(&self, class: &[Scalar]) -> Vec<Scalar> {
        self.section.mul_vec(class)
    }

    /// `dim H^n` keyed by degree, zeros omitted.
    pub fn betti(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for b in self.algebra.basis() {
            *out.entry(b.degree).or_insert(0) += 1;
        }
        out
    }
}

/// Cohomology computed weight by weight so every class is homogeneous; the
/// class of `1` comes first in degree 0.
pub fn cohomology_algebra(a: &WeightedDga) -> Result<Cohomology> {
    let f = a.field();
    let dim = a.dim();
    let mut columns: Vec<Vec<Scalar>> = Vec::new();
    let mut proj_rows: Vec<Vec<Scalar>> = Vec::new();
    let mut basis = Vec::new();
    let mut unit = None;
    for n in 0..=a.top_degree() {
        for p in a.distinct_weights() {
            let idx = a.summand(n, p);
            if idx.is_empty() {
                continue;
            }
            let above = a.summand(n + 1, p);
            let below = a.summand(n - 1, p);
            let d_out = a.diff().select_rows(&above).select_columns(&idx);
            let d_in = a.diff().select_rows(&idx).select_columns(&below);
            let cycles = d_out.kernel_basis();
            let boundaries = d_in.image_basis();
            let local_unit = idx.iter().position(|&i| i == a.unit());
            let candidates = match local_unit {
                Some(u) if d_out.column(u).iter().all(|c| f.is_zero(c)) => {
                    let mut e = vec![f.zero(); idx.len()];
                    e[u] = f.one();
                    let mut cols = vec![e];
                    cols.extend(cycles.columns());
                    Matrix::from_columns(f, idx.len(), &cols)
                }
                _ => cycles,
            };
            let picked = boundaries.extend_with(&candidates);
            let section = candidates.select_columns(&picked);
            let k = idx.len();
            let partial = Matrix::hstack(f, k, &[&boundaries, &section]);
            let filler = partial.extend_with(&Matrix::identity(f, k));
            let frame = Matrix::hstack(f, k, &[&partial, &Matrix::identity(f, k).select_columns(&filler)]);
            let inv = frame.inverse().expect("completed basis is invertible");
            for j in 0..section.cols() {
                let mut col = vec![f.zero(); dim];
                for (r, &i) in idx.iter().enumerate() {
                    col[i] = section.get(r, j).clone();
                }
                let mut row = vec![f.zero(); dim];
                for (c, &i) in idx.iter().enumerate() {
                    row[i] = inv.get(boundaries.cols() + j, c).clone();
                }
                if n == 0 && p == 0 && j == 0 && local_unit.is_some() && picked.first() == Some(&0) {
                    unit = Some(basis.len());
                }
                let label = match col.iter().enumerate().filter(|(_, c)| !f.is_zero(c)).collect::<Vec<_>>()[..] {
                    [(i, c)] if f.is_one(c) => format!("[{}]", a.basis()[i].label),
                    _ => format!("h{n}.{}", basis.len()),
                };
                basis.push(BasisElement { label, degree: n, weight: p });
                columns.push(col);
                proj_rows.push(row);
            }
        }
    }
    let unit = unit.ok_or_else(|| Error::InvalidAlgebra("the unit is a coboundary, so the cohomology is zero".into()))?;
    let section = Matrix::from_columns(f, dim, &columns);
    let projection = Matrix::from_rows(f, proj_rows);
    let hdim = basis.len();
    let projection = if hdim == 0 { Matrix::zeros(f, 0, dim) } else { projection };
    let mut mult: BTreeMap<(usize, usize), Sparse> = BTreeMap::new();
    for i in 0..hdim {
        for j in 0..hdim {
            if basis[i].degree + basis[j].degree > a.top_degree() {
                continue;
            }
            let prod = a.mul(&columns[i], &columns[j]);
            let class = projection.mul_vec(&prod);
            let sparse: Sparse =
                class.into_iter().enumerate().filter(|(_, c)| !f.is_zero(c)).collect();
            if !sparse.is_empty() {
                mult.insert((i, j), sparse);
            }
        }
    }
    let algebra = WeightedDga::from_sparse(f, a.modulus(), basis, unit, mult, Matrix::zeros(f, hdim, hdim))?;
    Ok(Cohomology { algebra, section, projection })
}

/// `H^n(A)^p = 0` unless `p = alpha n` (mod `m`), read off the
/// weight-homogeneous cohomology basis.
pub fn algebra_purity(a: &WeightedDga, alpha: Rational64) -> Result<PurityReport> {
    a.modulus().check_alpha(alpha)?;
    let h = cohomology_algebra(a)?;
    let mut counts: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    for b in h.algebra.basis() {
        *counts.entry((b.degree, b.weight)).or_insert(0) += 1;
    }
    let entries: Vec<PurityEntry> = counts
        .into_iter()
        .map(|((degree, weight), dim)| {
            let expected = pure_weight(degree, alpha, a.modulus());
            PurityEntry { degree, weight, dim, expected, ok: expected == Some(weight) }
        })
        .collect();
    let first_violation = entries.iter().find(|e| !e.ok).map(|e| (e.degree, e.weight));
    Ok(PurityReport { pure: first_violation.is_none(), alpha: alpha.to_string(), modulus: a.modulus(), entries, first_violation })
}

#[derive(Clone, Debug, Serialize)]
pub struct Connectivity {
    /// Largest `r` with `H^i = 0` for `1 <= i <= r` (capped at the top degree).
    pub r: i64,
    pub simply_connected: bool,
    pub betti: BTreeMap<i64, usize>,
}

pub fn connectivity(a: &WeightedDga) -> Result<Connectivity> {
    let h = cohomology_algebra(a)?;
    let betti = h.betti();
    let h0 = betti.get(&0).copied().unwrap_or(0);
    if h0 != 1 {
        return Err(Error::NotConnected(format!("H^0 has dimension {h0}")));
    }
    let top = a.top_degree();
    let r = (1..=top).find(|n| betti.contains_key(n)).map_or(top, |n| n - 1);
    let simply_connected = !betti.contains_key(&1);
    Ok(Connectivity { r, simply_connected, betti })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::from_table;
    use crate::field::Field;
    use crate::weights::Modulus;

    fn f5() -> Field {
        Field::Prime(5)
    }

    #[test]
    fn zero_differential_gives_the_algebra_back() {
        let a = from_table(
            f5(),
            Modulus::Cyclic(4),
            &[("1", 0, 0), ("x", 2, 1), ("x2", 4, 2)],
            &[(1, 1, 2, 1)],
            &[],
        )
        .unwrap();
        let h = cohomology_algebra(&a).unwrap();
        assert_eq!(h.algebra, WeightedDga { basis: relabel(&a), ..a.clone() });
        assert!(h.section.is_identity());
        let c = connectivity(&a).unwrap();
        assert_eq!(c.r, 1);
        assert!(c.simply_connected);
    }

    fn relabel(a: &WeightedDga) -> Vec<BasisElement> {
        a.basis().iter().map(|b| BasisElement { label: format!("[{}]", b.label), ..b.clone() }).collect()
    }

    #[test]
    fn acyclic_augmentation_ideal_gives_ground_field() {
        // 1, u in degree 1, v in degree 2 with d u = v
        let a = from_table(f5(), Modulus::Cyclic(1), &[("1", 0, 0), ("u", 1, 0), ("v", 2, 0)], &[], &[(1, 2, 1)])
            .unwrap();
        let h = cohomology_algebra(&a).unwrap();
        assert_eq!(h.algebra.dim(), 1);
        assert_eq!(connectivity(&a).unwrap().r, 2);
    }

    #[test]
    fn two_stage_betti_numbers() {
        // exterior algebra on a, b in degree 1 with d a = 0, d b = 0; plus c
        // in degree 1 and ab in degree 2 with d c = ab: kills ab, c is not a cocycle
        let a = from_table(
            f5(),
            Modulus::Cyclic(1),
            &[("1", 0, 0), ("a", 1, 0), ("b", 1, 0), ("c", 1, 0), ("ab", 2, 0)],
            &[(1, 2, 4, 1), (2, 1, 4, -1)],
            &[(3, 4, 1)],
        )
        .unwrap();
        assert!(crate::dga::validate(&a).ok);
        let h = cohomology_algebra(&a).unwrap();
        assert_eq!(h.betti(), BTreeMap::from([(0, 1), (1, 2)]));
        // [a][b] = [ab] = 0
        assert!(h.algebra.product(1, 2).is_empty());
        assert!(!connectivity(&a).unwrap().simply_connected);
    }

    #[test]
    fn purity_of_truncated_polynomial() {
        let a = from_table(
            f5(),
            Modulus::Cyclic(4),
            &[("1", 0, 0), ("x", 2, 1), ("x2", 4, 2)],
            &[(1, 1, 2, 1)],
            &[],
        )
        .unwrap();
        assert!(algebra_purity(&a, Rational64::new(1, 2)).unwrap().pure);
        let r = algebra_purity(&a, Rational64::from_integer(1)).unwrap();
        assert_eq!(r.first_violation, Some((2, 1)));
    }

    #[test]
    fn disconnected_is_rejected() {
        let a = from_table(f5(), Modulus::Cyclic(1), &[("1", 0, 0), ("e", 0, 0)], &[(1, 1, 1, 1)], &[]).unwrap();
        assert!(matches!(connectivity(&a), Err(Error::NotConnected(_))));
    }
}
