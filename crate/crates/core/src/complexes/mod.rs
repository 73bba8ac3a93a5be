//! Bounded complexes over a field, optionally with a chain endomorphism.
//!
//! Storage is always homological: a cohomological complex keeps `C^n` at
//! homological degree `-n`, so `d^n : C^n -> C^{n+1}` is the stored
//! `d_{-n}`. Every degree argument on [`Complex`] and on the maps in this
//! module is homological ("internal"); [`Variance::internal`] converts.

mod ho;
mod homology;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::Matrix;

pub use ho::{
    differential, find_homotopy, ho_compose, homology_model, mapping_cylinder, HoMorphism, HomologyModel,
    PreMorphism,
};
pub use homology::{homology, induced_map, is_n_quasi_iso, DegreeHomology, HomologyData, QisoReport};

/// Degreewise matrices keyed by the source's internal degree.
pub type DegreeMap = BTreeMap<i64, Matrix>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    Homological,
    Cohomological,
}

impl Variance {
    /// Converts between this variance's own degrees and internal ones (an
    /// involution).
    pub fn internal(self, degree: i64) -> i64 {
        match self {
            Variance::Homological => degree,
            Variance::Cohomological => -degree,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    field: Field,
    variance: Variance,
    lo: i64,
    dims: Vec<usize>,
    /// `diffs[k] = d_{lo+k} : C_{lo+k} -> C_{lo+k-1}`.
    diffs: Vec<Matrix>,
}

impl Complex {
    /// Builds a complex from dimensions and differentials indexed by the
    /// variance's own degrees; the differential keyed by `n` leaves degree `n`.
    /// Missing differentials are zero.
    pub fn new(
        field: Field,
        variance: Variance,
        dims: &BTreeMap<i64, usize>,
        diffs: &BTreeMap<i64, Matrix>,
    ) -> Result<Self> {
        let internal_dims: BTreeMap<i64, usize> =
            dims.iter().map(|(&n, &d)| (variance.internal(n), d)).collect();
        let mut internal_diffs = DegreeMap::new();
        for (&n, m) in diffs {
            if m.field() != field {
                return Err(Error::InvalidComplex(format!("differential at {n} has the wrong field")));
            }
            internal_diffs.insert(variance.internal(n), m.clone());
        }
        Self::from_internal(field, variance, &internal_dims, &internal_diffs)
    }

    pub fn from_internal(
        field: Field,
        variance: Variance,
        dims: &BTreeMap<i64, usize>,
        diffs: &DegreeMap,
    ) -> Result<Self> {
        let nonzero: Vec<i64> = dims.iter().filter(|(_, &d)| d > 0).map(|(&n, _)| n).collect();
        let (lo, hi) = match (nonzero.first(), nonzero.last()) {
            (Some(&lo), Some(&hi)) => (lo, hi),
            _ => (0, -1),
        };
        let dim_at = |n: i64| dims.get(&n).copied().unwrap_or(0);
        let mut out = Complex { field, variance, lo, dims: Vec::new(), diffs: Vec::new() };
        for n in lo..=hi {
            out.dims.push(dim_at(n));
        }
        for (&n, m) in diffs {
            let expect = (dim_at(n - 1), dim_at(n));
            if m.shape() != expect {
                return Err(Error::Shape(format!(
                    "differential out of internal degree {n} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    expect.0,
                    expect.1
                )));
            }
        }
        for n in lo..=hi {
            let m = match diffs.get(&n) {
                Some(m) => m.clone(),
                None => Matrix::zeros(field, dim_at(n - 1), dim_at(n)),
            };
            out.diffs.push(m);
        }
        for n in lo + 1..=hi {
            if !out.d(n - 1).mul(&out.d(n)).is_zero() {
                return Err(Error::InvalidComplex(format!(
                    "d o d != 0 at degree {}",
                    variance.internal(n)
                )));
            }
        }
        Ok(out)
    }

    pub fn zero_differential(field: Field, variance: Variance, dims: &BTreeMap<i64, usize>) -> Self {
        let internal: BTreeMap<i64, usize> =
            dims.iter().map(|(&n, &d)| (variance.internal(n), d)).collect();
        Self::from_internal(field, variance, &internal, &DegreeMap::new()).expect("zero differential")
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Internal degrees with (possibly) nonzero chain groups.
    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        if self.dims.is_empty() {
            #[allow(clippy::reversed_empty_ranges)]
            return 0..=-1;
        }
        self.lo..=self.lo + self.dims.len() as i64 - 1
    }

    pub fn dim(&self, n: i64) -> usize {
        let k = n - self.lo;
        if k < 0 {
            return 0;
        }
        self.dims.get(k as usize).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// `d_n : C_n -> C_{n-1}` (zero outside the support).
    pub fn d(&self, n: i64) -> Matrix {
        let k = n - self.lo;
        if k >= 0 && (k as usize) < self.diffs.len() {
            self.diffs[k as usize].clone()
        } else {
            Matrix::zeros(self.field, self.dim(n - 1), self.dim(n))
        }
    }

    /// `(own degree, dim)` for every nonzero chain group.
    pub fn external_dims(&self) -> BTreeMap<i64, usize> {
        self.degrees()
            .filter(|&n| self.dim(n) > 0)
            .map(|n| (self.variance.internal(n), self.dim(n)))
            .collect()
    }

    /// Nonzero differentials keyed by own degree.
    pub fn external_diffs(&self) -> BTreeMap<i64, Matrix> {
        self.degrees()
            .map(|n| (n, self.d(n)))
            .filter(|(_, m)| m.rows() > 0 && m.cols() > 0 && !m.is_zero())
            .map(|(n, m)| (self.variance.internal(n), m))
            .collect()
    }

    pub fn has_zero_differential(&self) -> bool {
        self.diffs.iter().all(Matrix::is_zero)
    }

    /// The zero map `C_n -> other_{n - shift}`.
    pub fn zero_block(&self, other: &Complex, n: i64, shift: i64) -> Matrix {
        Matrix::zeros(self.field, other.dim(n - shift), self.dim(n))
    }

    /// Identity chain map.
    pub fn identity(&self) -> DegreeMap {
        self.degrees().map(|n| (n, Matrix::identity(self.field, self.dim(n)))).collect()
    }
}

/// Looks up `map[n]`, falling back to the zero `rows x cols` matrix.
pub fn block(map: &DegreeMap, field: Field, n: i64, rows: usize, cols: usize) -> Matrix {
    match map.get(&n) {
        Some(m) => {
            debug_assert_eq!(m.shape(), (rows, cols), "block at degree {n}");
            m.clone()
        }
        None => Matrix::zeros(field, rows, cols),
    }
}

/// Checks shapes and `d' f = f d` for a degree-0 map.
pub fn check_chain_map(src: &Complex, tgt: &Complex, f: &DegreeMap) -> Result<()> {
    let field = src.field();
    for (&n, m) in f {
        if m.shape() != (tgt.dim(n), src.dim(n)) {
            return Err(Error::Shape(format!(
                "map at degree {} is {}x{}, expected {}x{}",
                src.variance().internal(n),
                m.rows(),
                m.cols(),
                tgt.dim(n),
                src.dim(n)
            )));
        }
    }
    let lo = src.degrees().start().min(tgt.degrees().start()).to_owned();
    let hi = src.degrees().end().max(tgt.degrees().end()).to_owned() + 1;
    for n in lo..=hi {
        let fn_ = block(f, field, n, tgt.dim(n), src.dim(n));
        let fm = block(f, field, n - 1, tgt.dim(n - 1), src.dim(n - 1));
        if tgt.d(n).mul(&fn_) != fm.mul(&src.d(n)) {
            return Err(Error::NotChainMap { degree: src.variance().internal(n) });
        }
    }
    Ok(())
}

pub fn compose_maps(g: &DegreeMap, f: &DegreeMap, src: &Complex, mid: &Complex, tgt: &Complex) -> DegreeMap {
    let field = src.field();
    src.degrees()
        .map(|n| {
            let fb = block(f, field, n, mid.dim(n), src.dim(n));
            let gb = block(g, field, n, tgt.dim(n), mid.dim(n));
            (n, gb.mul(&fb))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndoComplex {
    complex: Complex,
    endo: DegreeMap,
}

impl EndoComplex {
    /// `endo` keyed by internal degree; missing entries are zero.
    pub fn new(complex: Complex, endo: DegreeMap) -> Result<Self> {
        let field = complex.field();
        let mut full = DegreeMap::new();
        for n in complex.degrees() {
            let d = complex.dim(n);
            let m = match endo.get(&n) {
                Some(m) if m.shape() == (d, d) => m.clone(),
                Some(m) => {
                    return Err(Error::Shape(format!(
                        "endomorphism at degree {} is {}x{}, expected {d}x{d}",
                        complex.variance().internal(n),
                        m.rows(),
                        m.cols()
                    )))
                }
                None => Matrix::zeros(field, d, d),
            };
            full.insert(n, m);
        }
        if let Some((&n, _)) = endo.iter().find(|(&n, m)| complex.dim(n) == 0 && m.rows() > 0) {
            return Err(Error::Shape(format!("endomorphism given outside the support at {n}")));
        }
        check_chain_map(&complex, &complex, &full).map_err(|e| match e {
            Error::NotChainMap { degree } => {
                Error::InvalidComplex(format!("endomorphism does not commute with d at degree {degree}"))
            }
            other => other,
        })?;
        Ok(Self { complex, endo: full })
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn endo(&self) -> &DegreeMap {
        &self.endo
    }

    pub fn field(&self) -> Field {
        self.complex.field()
    }

    /// `phi_n` (the empty matrix outside the support).
    pub fn phi(&self, n: i64) -> Matrix {
        let d = self.complex.dim(n);
        block(&self.endo, self.field(), n, d, d)
    }
}

/// Where each summand `C_a (x) C'_b` sits inside the total degree `a + b`.
#[derive(Clone, Debug)]
pub struct TensorLayout {
    /// Per total degree: `(a, b, offset)` in basis order.
    pub summands: BTreeMap<i64, Vec<(i64, i64, usize)>>,
}

impl TensorLayout {
    pub fn new(left: &Complex, right: &Complex) -> Self {
        let mut summands: BTreeMap<i64, Vec<(i64, i64)>> = BTreeMap::new();
        for a in left.degrees() {
            for b in right.degrees() {
                if left.dim(a) > 0 && right.dim(b) > 0 {
                    summands.entry(a + b).or_default().push((a, b));
                }
            }
        }
        let variance = left.variance();
        let summands = summands
            .into_iter()
            .map(|(n, mut v)| {
                // order by the left factor's own degree
                v.sort_by_key(|&(a, _)| variance.internal(a));
                let mut off = 0;
                let placed = v
                    .into_iter()
                    .map(|(a, b)| {
                        let at = off;
                        off += left.dim(a) * right.dim(b);
                        (a, b, at)
                    })
                    .collect();
                (n, placed)
            })
            .collect();
        Self { summands }
    }

    pub fn offset(&self, n: i64, a: i64) -> Option<usize> {
        self.summands.get(&n)?.iter().find(|s| s.0 == a).map(|s| s.2)
    }

    pub fn dim(&self, n: i64, left: &Complex, right: &Complex) -> usize {
        self.summands
            .get(&n)
            .map_or(0, |v| v.iter().map(|&(a, b, _)| left.dim(a) * right.dim(b)).sum())
    }
}

/// Total complex with `d(x (x) y) = dx (x) y + (-1)^{|x|} x (x) dy`.
pub fn tensor(left: &Complex, right: &Complex) -> Result<Complex> {
    Ok(tensor_with_layout(left, right)?.0)
}

pub fn tensor_with_layout(left: &Complex, right: &Complex) -> Result<(Complex, TensorLayout)> {
    if left.field() != right.field() {
        return Err(Error::InvalidComplex("tensor factors over different fields".into()));
    }
    if left.variance() != right.variance() {
        return Err(Error::VarianceMismatch("tensor factors have different variance".into()));
    }
    let field = left.field();
    let layout = TensorLayout::new(left, right);
    let dims: BTreeMap<i64, usize> =
        layout.summands.keys().map(|&n| (n, layout.dim(n, left, right))).collect();
    let mut diffs = DegreeMap::new();
    for (&n, summands) in &layout.summands {
        let rows = dims.get(&(n - 1)).copied().unwrap_or(0);
        let mut m = Matrix::zeros(field, rows, dims[&n]);
        for &(a, b, col) in summands {
            if let Some(row) = layout.offset(n - 1, a - 1) {
                let blk = left.d(a).kron(&Matrix::identity(field, right.dim(b)));
                m.set_block(row, col, &blk);
            }
            if let Some(row) = layout.offset(n - 1, a) {
                let blk = Matrix::identity(field, left.dim(a))
                    .kron(&right.d(b))
                    .scale(&field.sign(a));
                m.set_block(row, col, &blk);
            }
        }
        diffs.insert(n, m);
    }
    let c = Complex::from_internal(field, left.variance(), &dims, &diffs)?;
    Ok((c, layout))
}

/// `f (x) g` for degree-0 maps, in the layouts of source and target tensors.
pub fn tensor_maps(
    f: &DegreeMap,
    g: &DegreeMap,
    src: (&Complex, &Complex, &TensorLayout),
    tgt: (&Complex, &Complex, &TensorLayout),
) -> DegreeMap {
    let field = src.0.field();
    let mut out = DegreeMap::new();
    for (&n, summands) in &src.2.summands {
        let mut m = Matrix::zeros(field, tgt.2.dim(n, tgt.0, tgt.1), src.2.dim(n, src.0, src.1));
        for &(a, b, col) in summands {
            if let Some(row) = tgt.2.offset(n, a) {
                let fa = block(f, field, a, tgt.0.dim(a), src.0.dim(a));
                let gb = block(g, field, b, tgt.1.dim(b), src.1.dim(b));
                m.set_block(row, col, &fa.kron(&gb));
            }
        }
        out.insert(n, m);
    }
    out
}

pub fn tensor_endo(x: &EndoComplex, y: &EndoComplex) -> Result<EndoComplex> {
    let (c, layout) = tensor_with_layout(x.complex(), y.complex())?;
    let endo = tensor_maps(
        x.endo(),
        y.endo(),
        (x.complex(), y.complex(), &layout),
        (x.complex(), y.complex(), &layout),
    );
    EndoComplex::new(c, endo)
}

/// The complex `F` concentrated in degree 0.
pub fn unit(field: Field, variance: Variance) -> Complex {
    Complex::zero_differential(field, variance, &BTreeMap::from([(0, 1)]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> Field {
        Field::Prime(7)
    }

    /// 0 -> F --id--> F -> 0 in degrees 1, 0.
    fn interval(field: Field) -> Complex {
        Complex::new(
            field,
            Variance::Homological,
            &BTreeMap::from([(0, 1), (1, 1)]),
            &BTreeMap::from([(1, Matrix::identity(field, 1))]),
        )
        .unwrap()
    }

    #[test]
    fn rejects_nonzero_square() {
        let f = f7();
        let err = Complex::new(
            f,
            Variance::Homological,
            &BTreeMap::from([(0, 1), (1, 1), (2, 1)]),
            &BTreeMap::from([(1, Matrix::identity(f, 1)), (2, Matrix::identity(f, 1))]),
        );
        assert!(matches!(err, Err(Error::InvalidComplex(_))));
    }

    #[test]
    fn cohomological_storage_is_negated() {
        let f = f7();
        let c = Complex::new(
            f,
            Variance::Cohomological,
            &BTreeMap::from([(0, 1), (1, 1)]),
            &BTreeMap::from([(0, Matrix::identity(f, 1))]),
        )
        .unwrap();
        assert_eq!(c.degrees(), -1..=0);
        assert_eq!(c.d(0).shape(), (1, 1));
        assert_eq!(c.external_dims(), BTreeMap::from([(0, 1), (1, 1)]));
        assert_eq!(c.external_diffs().keys().copied().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn tensor_with_unit() {
        let c = interval(f7());
        let t = tensor(&c, &unit(f7(), Variance::Homological)).unwrap();
        assert_eq!(t, c);
    }

    #[test]
    fn tensor_of_intervals_is_acyclic_with_signs() {
        let f = f7();
        let c = interval(f);
        let t = tensor(&c, &c).unwrap();
        assert_eq!(t.external_dims(), BTreeMap::from([(0, 1), (1, 2), (2, 1)]));
        // degree-1 basis e0(x)e1, e1(x)e0; d(e1(x)e1) = e0(x)e1 - e1(x)e0
        assert_eq!(t.d(2), Matrix::from_i64(f, &[&[1], &[-1]]));
        assert_eq!(t.d(1), Matrix::from_i64(f, &[&[1, 1]]));
        let h = homology(&t);
        assert!(t.degrees().all(|n| h.dim(n) == 0));
    }

    #[test]
    fn tensor_endo_of_scalars() {
        let f = f7();
        let c = interval(f);
        let q = f.from_i64(2);
        let endo: DegreeMap = c.degrees().map(|n| (n, Matrix::scalar(f, 1, q.clone()))).collect();
        let x = EndoComplex::new(c, endo).unwrap();
        let t = tensor_endo(&x, &x).unwrap();
        for n in t.complex().degrees() {
            let d = t.complex().dim(n);
            assert_eq!(t.phi(n), Matrix::scalar(f, d, f.from_i64(4)));
        }
    }

    #[test]
    fn endo_must_commute() {
        let f = f7();
        let c = interval(f);
        let endo = DegreeMap::from([(0, Matrix::identity(f, 1)), (1, Matrix::zeros(f, 1, 1))]);
        assert!(EndoComplex::new(c, endo).is_err());
    }
}
