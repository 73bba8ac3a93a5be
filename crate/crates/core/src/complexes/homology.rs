use std::collections::BTreeMap;

use serde::Serialize;

use super::{block, check_chain_map, Complex, DegreeMap, Variance};
use crate::error::Result;
use crate::field::Field;
use crate::linalg::Matrix;

/// Homology in one degree. `section` has cycle columns representing the
/// chosen homology basis; `projection` is defined on all of `C_n` and is
/// exact on cycles (it kills boundaries and inverts `section`).
#[derive(Clone, Debug)]
pub struct DegreeHomology {
    pub cycles: Matrix,
    pub boundaries: Matrix,
    pub section: Matrix,
    pub projection: Matrix,
}

impl DegreeHomology {
    pub fn dim(&self) -> usize {
        self.section.cols()
    }
}

#[derive(Clone, Debug)]
pub struct HomologyData {
    field: Field,
    variance: Variance,
    degrees: BTreeMap<i64, DegreeHomology>,
}

impl HomologyData {
    pub fn degree(&self, n: i64) -> Option<&DegreeHomology> {
        self.degrees.get(&n)
    }

    pub fn dim(&self, n: i64) -> usize {
        self.degrees.get(&n).map_or(0, DegreeHomology::dim)
    }

    /// `Q_n` as a `h_n x dim C_n` matrix (zero-sized outside the support).
    pub fn projection(&self, n: i64, chain_dim: usize) -> Matrix {
        match self.degrees.get(&n) {
            Some(d) => d.projection.clone(),
            None => Matrix::zeros(self.field, 0, chain_dim),
        }
    }

    pub fn section(&self, n: i64, chain_dim: usize) -> Matrix {
        match self.degrees.get(&n) {
            Some(d) => d.section.clone(),
            None => Matrix::zeros(self.field, chain_dim, 0),
        }
    }

    /// Nonzero Betti numbers keyed by own degree.
    pub fn betti(&self) -> BTreeMap<i64, usize> {
        self.degrees
            .iter()
            .filter(|(_, d)| d.dim() > 0)
            .map(|(&n, d)| (self.variance.internal(n), d.dim()))
            .collect()
    }

    /// The homology as a zero-differential complex.
    pub fn as_complex(&self) -> Complex {
        let dims = self.degrees.iter().map(|(&n, d)| (n, d.dim())).collect();
        Complex::from_internal(self.field, self.variance, &dims, &DegreeMap::new())
            .expect("zero differential")
    }
}

pub fn homology(c: &Complex) -> HomologyData {
    let field = c.field();
    let mut degrees = BTreeMap::new();
    for n in c.degrees() {
        let dim = c.dim(n);
        let cycles = c.d(n).kernel_basis();
        let boundaries = c.d(n + 1).image_basis();
        let picked = boundaries.extend_with(&cycles);
        let section = cycles.select_columns(&picked);
        let b = boundaries.cols();
        let h = section.cols();
        let partial = Matrix::hstack(field, dim, &[&boundaries, &section]);
        let filler = partial.extend_with(&Matrix::identity(field, dim));
        let frame = Matrix::hstack(
            field,
            dim,
            &[&partial, &Matrix::identity(field, dim).select_columns(&filler)],
        );
        let inv = frame.inverse().expect("completed basis is invertible");
        let rows: Vec<usize> = (b..b + h).collect();
        let projection = inv.select_rows(&rows);
        degrees.insert(n, DegreeHomology { cycles, boundaries, section, projection });
    }
    HomologyData { field, variance: c.variance(), degrees }
}

/// `H(f)` in the fixed bases: `Q' f S`.
pub fn induced_map(
    src: &Complex,
    tgt: &Complex,
    f: &DegreeMap,
    hs: &HomologyData,
    ht: &HomologyData,
) -> Result<DegreeMap> {
    check_chain_map(src, tgt, f)?;
    Ok(induced_unchecked(src, tgt, f, hs, ht))
}

pub(crate) fn induced_unchecked(
    src: &Complex,
    tgt: &Complex,
    f: &DegreeMap,
    hs: &HomologyData,
    ht: &HomologyData,
) -> DegreeMap {
    let field = src.field();
    let lo = *src.degrees().start().min(tgt.degrees().start());
    let hi = *src.degrees().end().max(tgt.degrees().end());
    (lo..=hi)
        .filter(|&n| hs.dim(n) > 0 || ht.dim(n) > 0)
        .map(|n| {
            let fb = block(f, field, n, tgt.dim(n), src.dim(n));
            let m = ht.projection(n, tgt.dim(n)).mul(&fb).mul(&hs.section(n, src.dim(n)));
            (n, m)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeVerdict {
    /// Own degree of the complex.
    pub degree: i64,
    pub source_dim: usize,
    pub target_dim: usize,
    pub rank: usize,
    pub iso: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct QisoReport {
    pub ok: bool,
    pub bound: Option<i64>,
    pub degrees: Vec<DegreeVerdict>,
    pub first_failure: Option<i64>,
}

/// Whether `H_i(f)` is an isomorphism for every own degree `i <= bound`
/// (all degrees when `bound` is `None`).
pub fn is_n_quasi_iso(src: &Complex, tgt: &Complex, f: &DegreeMap, bound: Option<i64>) -> Result<QisoReport> {
    let hs = super::homology(src);
    let ht = super::homology(tgt);
    let h = induced_map(src, tgt, f, &hs, &ht)?;
    Ok(qiso_report(src.variance(), &h, &hs, &ht, bound))
}

pub(crate) fn qiso_report(
    variance: Variance,
    induced: &DegreeMap,
    hs: &HomologyData,
    ht: &HomologyData,
    bound: Option<i64>,
) -> QisoReport {
    let mut degrees: Vec<DegreeVerdict> = induced
        .iter()
        .map(|(&n, m)| {
            let rank = m.rank();
            let (s, t) = (hs.dim(n), ht.dim(n));
            DegreeVerdict { degree: variance.internal(n), source_dim: s, target_dim: t, rank, iso: s == t && rank == s }
        })
        .filter(|v| bound.is_none_or(|b| v.degree <= b))
        .collect();
    degrees.sort_by_key(|v| v.degree);
    let first_failure = degrees.iter().find(|v| !v.iso).map(|v| v.degree);
    QisoReport { ok: first_failure.is_none(), bound, degrees, first_failure }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> Field {
        Field::Prime(7)
    }

    #[test]
    fn zero_differential_homology_is_everything() {
        let f = f7();
        let c = Complex::zero_differential(f, Variance::Homological, &BTreeMap::from([(0, 2), (1, 3)]));
        let h = homology(&c);
        assert_eq!(h.betti(), BTreeMap::from([(0, 2), (1, 3)]));
        assert!(h.degree(1).unwrap().section.is_identity());
    }

    #[test]
    fn identity_differential_is_acyclic() {
        let f = f7();
        let c = Complex::new(
            f,
            Variance::Homological,
            &BTreeMap::from([(0, 1), (1, 1)]),
            &BTreeMap::from([(1, Matrix::identity(f, 1))]),
        )
        .unwrap();
        assert!(homology(&c).betti().is_empty());
    }

    #[test]
    fn interval_exchange_dims() {
        // 0 -> F -(0)-> F^2 -([1 0])-> F -> 0 in degrees 2, 1, 0
        let f = f7();
        let c = Complex::new(
            f,
            Variance::Homological,
            &BTreeMap::from([(0, 1), (1, 2), (2, 1)]),
            &BTreeMap::from([
                (1, Matrix::from_i64(f, &[&[1, 0]])),
                (2, Matrix::zeros(f, 2, 1)),
            ]),
        )
        .unwrap();
        let h = homology(&c);
        assert_eq!((h.dim(0), h.dim(1), h.dim(2)), (0, 1, 1));
        let d1 = h.degree(1).unwrap();
        assert!(d1.projection.mul(&d1.section).is_identity());
    }

    #[test]
    fn projection_kills_boundaries() {
        let f = f7();
        let c = Complex::new(
            f,
            Variance::Homological,
            &BTreeMap::from([(0, 2), (1, 2)]),
            &BTreeMap::from([(1, Matrix::from_i64(f, &[&[1, 0], &[2, 0]]))]),
        )
        .unwrap();
        let h = homology(&c);
        let d0 = h.degree(0).unwrap();
        assert_eq!(d0.dim(), 1);
        assert!(d0.projection.mul(&d0.boundaries).is_zero());
    }

    #[test]
    fn nullhomotopic_map_induces_zero() {
        // C: F --id--> F (degrees 1 -> 0) plus a cycle in degree 0; f = d h + h d
        let f = f7();
        let c = Complex::new(
            f,
            Variance::Homological,
            &BTreeMap::from([(0, 2), (1, 1)]),
            &BTreeMap::from([(1, Matrix::from_i64(f, &[&[1], &[0]]))]),
        )
        .unwrap();
        // h_0 : C_0 -> C_1 picks the first coordinate
        let h0 = Matrix::from_i64(f, &[&[1, 3]]);
        let map = DegreeMap::from([(0, c.d(1).mul(&h0)), (1, h0.mul(&c.d(1)))]);
        let hd = homology(&c);
        let ind = induced_map(&c, &c, &map, &hd, &hd).unwrap();
        assert!(ind.values().all(Matrix::is_zero));
        let scalar: DegreeMap = c.degrees().map(|n| (n, Matrix::scalar(f, c.dim(n), f.from_i64(2)))).collect();
        let ind = induced_map(&c, &c, &scalar, &hd, &hd).unwrap();
        assert_eq!(ind[&0], Matrix::scalar(f, 1, f.from_i64(2)));
    }

    #[test]
    fn quasi_iso_bounds() {
        let f = f7();
        let c = Complex::zero_differential(f, Variance::Homological, &BTreeMap::from([(0, 1), (1, 1), (2, 1)]));
        let id = c.identity();
        assert!(is_n_quasi_iso(&c, &c, &id, Some(5)).unwrap().ok);
        let mut kill = id.clone();
        kill.insert(2, Matrix::zeros(f, 1, 1));
        let r = is_n_quasi_iso(&c, &c, &kill, Some(2)).unwrap();
        assert!(!r.ok);
        assert_eq!(r.first_failure, Some(2));
        assert!(is_n_quasi_iso(&c, &c, &kill, Some(1)).unwrap().ok);
    }
}
