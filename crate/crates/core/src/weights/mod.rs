//! Weight gradings from a Frobenius-type endomorphism and purity.
//!
//! Over `F_l` the weight-`p` summand is the generalized eigenspace of
//! `q^p`, with `p` taken mod `h`. Over `Q` only eigenvalues `q^k` are
//! handled; they get the integer weight `2k`.

mod tau;
mod zigzag;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::complexes::{homology, Complex, DegreeMap, EndoComplex, HomologyData};
use crate::error::{Error, Result};
use crate::field::{Field, FieldConfig, Scalar};
use crate::linalg::Matrix;

pub use tau::{
    check_monoidality, psi_map, t_leq_n, truncation_tau, MonoidalityReport, Psi, Tau, Truncation,
};
pub use zigzag::formality_zigzag_complex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Modulus {
    Cyclic(u64),
    Integers,
}

impl Modulus {
    pub fn reduce(self, p: i64) -> i64 {
        match self {
            Modulus::Cyclic(m) => p.rem_euclid(m as i64),
            Modulus::Integers => p,
        }
    }

    /// `0 < alpha < m` for `Z/m`; `alpha > 0` for `Z`.
    pub fn check_alpha(self, alpha: Rational64) -> Result<()> {
        if !alpha.is_positive() {
            return Err(Error::InvalidAlpha(format!("{alpha} is not positive")));
        }
        if let Modulus::Cyclic(m) = self {
            if alpha >= Rational64::from_integer(m as i64) {
                return Err(Error::InvalidAlpha(format!("{alpha} is not below the modulus {m}")));
            }
        }
        Ok(())
    }

    /// `N = floor((m - 1) / alpha)`; `None` (no truncation) for `Z`.
    pub fn formality_bound(self, alpha: Rational64) -> Option<i64> {
        match self {
            Modulus::Cyclic(m) => Some(((Rational64::from_integer(m as i64 - 1)) / alpha).floor().to_integer()),
            Modulus::Integers => None,
        }
    }
}

impl Serialize for Modulus {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Modulus::Cyclic(m) => s.serialize_u64(*m),
            Modulus::Integers => s.serialize_str("Z"),
        }
    }
}

impl<'de> Deserialize<'de> for Modulus {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(0) => Err(serde::de::Error::custom("modulus must be positive")),
            Raw::N(m) => Ok(Modulus::Cyclic(m)),
            Raw::S(s) if s == "Z" => Ok(Modulus::Integers),
            Raw::S(s) => Err(serde::de::Error::custom(format!("modulus {s:?} is neither a positive integer nor \"Z\""))),
        }
    }
}

/// `ceil(p / alpha)` for `alpha > 0`.
pub fn weight_threshold(p: i64, alpha: Rational64) -> i64 {
    (Rational64::from_integer(p) / alpha).ceil().to_integer()
}

/// The weight forced on degree `n` by `alpha`-purity, if `alpha n` is integral.
pub fn pure_weight(n: i64, alpha: Rational64, modulus: Modulus) -> Option<i64> {
    let w = alpha * Rational64::from_integer(n);
    w.is_integer().then(|| modulus.reduce(w.to_integer()))
}

pub fn parse_alpha(text: &str) -> Result<Rational64> {
    let text = text.trim();
    let (n, d) = text.split_once('/').unwrap_or((text, "1"));
    let n: i64 = n.trim().parse().map_err(|_| Error::Parse(format!("bad rational {text:?}")))?;
    let d: i64 = d.trim().parse().map_err(|_| Error::Parse(format!("bad rational {text:?}")))?;
    if d == 0 {
        return Err(Error::Parse(format!("zero denominator in {text:?}")));
    }
    Ok(Rational64::new(n, d))
}

pub fn order_of_q(cfg: &FieldConfig) -> Result<u64> {
    if cfg.characteristic == 0 {
        return Err(Error::InvalidField("the order of q is only defined over F_l".into()));
    }
    Ok(FieldConfig::new(cfg.characteristic, cfg.q)?.h)
}

/// Splits `V` into generalized eigenspaces of `phi` for `q^0, ..., q^{h-1}`.
pub fn tate_grade_module(phi: &Matrix, cfg: &FieldConfig) -> Result<Vec<(i64, Matrix)>> {
    let field = phi.field();
    if !matches!(field, Field::Prime(_)) || cfg.field() != field {
        return Err(Error::InvalidField("Tate gradings need coefficients in F_l".into()));
    }
    if !phi.is_square() {
        return Err(Error::Shape("endomorphism is not square".into()));
    }
    if !phi.is_invertible() {
        return Err(Error::SingularEndomorphism { degree: 0 });
    }
    let mut parts = Vec::new();
    let mut total = 0;
    for p in 0..cfg.h as i64 {
        let e = phi.generalized_eigenspace(&cfg.q_power(p));
        if e.cols() > 0 {
            total += e.cols();
            parts.push((p, e));
        }
    }
    if total < phi.rows() {
        return Err(Error::NotTate { degree: 0, defect: phi.rows() - total });
    }
    Ok(parts)
}

/// Splits `V` over `Q` by eigenvalues `q^k` (weight `2k`).
pub fn weil_grade_module(phi: &Matrix, cfg: &FieldConfig) -> Result<Vec<(i64, Matrix)>> {
    let field = phi.field();
    if field != Field::Rational {
        return Err(Error::InvalidField("Weil gradings need rational coefficients".into()));
    }
    if !phi.is_square() {
        return Err(Error::Shape("endomorphism is not square".into()));
    }
    if !phi.is_invertible() {
        return Err(Error::SingularEndomorphism { degree: 0 });
    }
    let n = phi.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut parts = Vec::new();
    let mut total = 0;
    if cfg.q == 1 {
        let e = phi.generalized_eigenspace(&field.one());
        total = e.cols();
        if total > 0 {
            parts.push((0, e));
        }
    } else {
        // Cauchy bounds on |root| and |1/root| limit the candidate powers.
        let poly = phi.char_poly();
        let coeffs: Vec<BigRational> = poly.coeffs().iter().map(rat).collect();
        let upper = BigRational::one() + coeffs[..n].iter().map(|c| c.abs()).max().unwrap_or_default();
        let c0 = coeffs[0].abs();
        let lower = BigRational::one() + coeffs[1..].iter().map(|c| c.abs() / &c0).max().unwrap_or_default();
        let q = BigRational::from_integer(BigInt::from(cfg.q));
        let mut candidates = vec![0i64];
        let mut power = q.clone();
        let mut k = 1;
        while power <= upper {
            candidates.push(k);
            power *= &q;
            k += 1;
        }
        let mut power = q.clone();
        let mut k = -1;
        while power <= lower {
            candidates.push(k);
            power *= &q;
            k -= 1;
        }
        candidates.sort_unstable();
        for k in candidates {
            let e = phi.generalized_eigenspace(&cfg.q_power(k));
            if e.cols() > 0 {
                total += e.cols();
                parts.push((2 * k, e));
            }
        }
    }
    if total < n {
        return Err(Error::UnsupportedWeil(format!(
            "{} dimension(s) have eigenvalues that are not integer powers of q = {}",
            n - total,
            cfg.q
        )));
    }
    Ok(parts)
}

fn rat(s: &Scalar) -> BigRational {
    match s {
        Scalar::Rat(r) => r.clone(),
        Scalar::Mod(v) => BigRational::from_integer(BigInt::from(*v)),
    }
}

/// Summand bases per own degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightGrading {
    pub modulus: Modulus,
    pub splitting: BTreeMap<i64, Vec<(i64, Matrix)>>,
}

/// A complex whose chain groups carry weight labels preserved by `d`.
///
/// The complex is stored in adapted coordinates: within each degree the
/// basis is sorted by weight, and `frame[n]` expresses the adapted basis in
/// the coordinates the complex was given in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedComplex {
    complex: Complex,
    modulus: Modulus,
    weights: BTreeMap<i64, Vec<i64>>,
    frame: DegreeMap,
}

impl GradedComplex {
    /// Labels keyed by internal degree; the basis is taken as given.
    pub fn new(complex: Complex, weights: BTreeMap<i64, Vec<i64>>, modulus: Modulus) -> Result<Self> {
        let frame = complex.identity();
        Self::assemble(complex, weights, modulus, frame)
    }

    fn assemble(
        complex: Complex,
        weights: BTreeMap<i64, Vec<i64>>,
        modulus: Modulus,
        frame: DegreeMap,
    ) -> Result<Self> {
        let v = complex.variance();
        for n in complex.degrees() {
            let labels = weights.get(&n).map_or(&[][..], Vec::as_slice);
            if labels.len() != complex.dim(n) {
                return Err(Error::Grading(format!(
                    "degree {} has {} weight labels for dimension {}",
                    v.internal(n),
                    labels.len(),
                    complex.dim(n)
                )));
            }
            if let Some(&p) = labels.iter().find(|&&p| modulus.reduce(p) != p) {
                return Err(Error::Grading(format!("weight {p} is not a canonical representative")));
            }
        }
        if let Some((&n, _)) = weights.iter().find(|(&n, l)| complex.dim(n) == 0 && !l.is_empty()) {
            return Err(Error::Grading(format!("weights given outside the support at {}", v.internal(n))));
        }
        let g = Self { complex, modulus, weights, frame };
        for n in g.complex.degrees() {
            let d = g.complex.d(n);
            for i in 0..d.rows() {
                for j in 0..d.cols() {
                    if !d.field().is_zero(d.get(i, j)) && g.weights[&(n - 1)][i] != g.weights[&n][j] {
                        return Err(Error::Grading(format!(
                            "d does not preserve weights at degree {}",
                            v.internal(n)
                        )));
                    }
                }
            }
        }
        Ok(g)
    }

    /// Changes basis to the given summands and checks that `d` preserves them.
    pub fn from_grading(complex: &Complex, grading: &WeightGrading) -> Result<Self> {
        let v = complex.variance();
        let mut frames = DegreeMap::new();
        let mut weights = BTreeMap::new();
        for n in complex.degrees() {
            let mut parts: Vec<(i64, Matrix)> =
                grading.splitting.get(&v.internal(n)).cloned().unwrap_or_default();
            parts.sort_by_key(|(p, _)| *p);
            let dim = complex.dim(n);
            let blocks: Vec<&Matrix> = parts.iter().map(|(_, b)| b).collect();
            if blocks.iter().any(|b| b.rows() != dim) {
                return Err(Error::Grading(format!("summand basis at degree {} has the wrong length", v.internal(n))));
            }
            let frame = Matrix::hstack(complex.field(), dim, &blocks);
            if !frame.is_square() || !frame.is_invertible() {
                return Err(Error::Grading(format!(
                    "summands at degree {} do not form a direct-sum decomposition",
                    v.internal(n)
                )));
            }
            let labels = parts.iter().flat_map(|(p, b)| std::iter::repeat_n(grading.modulus.reduce(*p), b.cols())).collect();
            weights.insert(n, labels);
            frames.insert(n, frame);
        }
        Self::with_frames(complex, frames, weights, grading.modulus)
    }

    fn with_frames(
        complex: &Complex,
        frames: DegreeMap,
        weights: BTreeMap<i64, Vec<i64>>,
        modulus: Modulus,
    ) -> Result<Self> {
        let field = complex.field();
        let mut dims = BTreeMap::new();
        let mut diffs = DegreeMap::new();
        let inverses: DegreeMap = frames.iter().map(|(&n, f)| (n, f.inverse().expect("invertible frame"))).collect();
        for n in complex.degrees() {
            dims.insert(n, complex.dim(n));
            let inv = inverses.get(&(n - 1)).cloned().unwrap_or_else(|| Matrix::zeros(field, 0, 0));
            let fr = &frames[&n];
            diffs.insert(n, inv.mul(&complex.d(n)).mul(fr));
        }
        let adapted = Complex::from_internal(field, complex.variance(), &dims, &diffs)?;
        Self::assemble(adapted, weights, modulus, frames)
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    /// Weight labels at internal degree `n`.
    pub fn weights(&self, n: i64) -> &[i64] {
        self.weights.get(&n).map_or(&[], Vec::as_slice)
    }

    pub fn all_weights(&self) -> &BTreeMap<i64, Vec<i64>> {
        &self.weights
    }

    pub fn frame(&self) -> &DegreeMap {
        &self.frame
    }

    pub fn indices_of_weight(&self, n: i64, p: i64) -> Vec<usize> {
        self.weights(n).iter().enumerate().filter(|(_, &w)| w == p).map(|(i, _)| i).collect()
    }

    pub fn distinct_weights(&self) -> Vec<i64> {
        let mut w: Vec<i64> = self.weights.values().flatten().copied().collect();
        w.sort_unstable();
        w.dedup();
        w
    }

    /// Summand bases in the original coordinates, keyed by own degree.
    pub fn grading(&self) -> WeightGrading {
        let v = self.complex.variance();
        let splitting = self
            .complex
            .degrees()
            .filter(|&n| self.complex.dim(n) > 0)
            .map(|n| {
                let parts = self
                    .distinct_weights()
                    .into_iter()
                    .filter_map(|p| {
                        let idx = self.indices_of_weight(n, p);
                        (!idx.is_empty()).then(|| (p, self.frame[&n].select_columns(&idx)))
                    })
                    .collect();
                (v.internal(n), parts)
            })
            .collect();
        WeightGrading { modulus: self.modulus, splitting }
    }

    /// `(own degree, weight) -> dimension` of the chain groups.
    pub fn summand_dims(&self) -> BTreeMap<(i64, i64), usize> {
        let v = self.complex.variance();
        let mut out = BTreeMap::new();
        for (&n, labels) in &self.weights {
            for &p in labels {
                *out.entry((v.internal(n), p)).or_insert(0) += 1;
            }
        }
        out
    }

    /// Weight-preserving tensor product; labels add (mod `m`).
    pub fn tensor(&self, other: &GradedComplex) -> Result<(GradedComplex, crate::complexes::TensorLayout)> {
        if self.modulus != other.modulus {
            return Err(Error::Grading("tensor factors have different weight moduli".into()));
        }
        let (c, layout) = crate::complexes::tensor_with_layout(&self.complex, &other.complex)?;
        let mut weights = BTreeMap::new();
        for (&n, summands) in &layout.summands {
            let mut labels = Vec::new();
            for &(a, b, _) in summands {
                for &p in self.weights(a) {
                    for &p2 in other.weights(b) {
                        labels.push(self.modulus.reduce(p + p2));
                    }
                }
            }
            weights.insert(n, labels);
        }
        Ok((GradedComplex::new(c, weights, self.modulus)?, layout))
    }
}

/// Grades each degree of `x` by the generalized eigenspaces of `phi`
/// (Tate over `F_l`, Weil over `Q`). Fails unless `x` is chainwise Tate
/// (resp. Weil); pass through the homology model first otherwise.
pub fn grade_endo_complex(x: &EndoComplex, cfg: &FieldConfig) -> Result<GradedComplex> {
    let c = x.complex();
    let v = c.variance();
    let modulus = match c.field() {
        Field::Prime(_) => Modulus::Cyclic(cfg.h),
        Field::Rational => Modulus::Integers,
    };
    let mut frames = DegreeMap::new();
    let mut weights = BTreeMap::new();
    for n in c.degrees() {
        let phi = x.phi(n);
        let parts = match modulus {
            Modulus::Cyclic(_) => tate_grade_module(&phi, cfg),
            Modulus::Integers => weil_grade_module(&phi, cfg),
        }
        .map_err(|e| relocate(e, v.internal(n)))?;
        let blocks: Vec<&Matrix> = parts.iter().map(|(_, b)| b).collect();
        frames.insert(n, Matrix::hstack(c.field(), c.dim(n), &blocks));
        weights.insert(
            n,
            parts.iter().flat_map(|(p, b)| std::iter::repeat_n(*p, b.cols())).collect(),
        );
    }
    GradedComplex::with_frames(c, frames, weights, modulus)
}

fn relocate(e: Error, degree: i64) -> Error {
    match e {
        Error::NotTate { defect, .. } => Error::NotTate { degree, defect },
        Error::SingularEndomorphism { .. } => Error::SingularEndomorphism { degree },
        Error::UnsupportedWeil(msg) => Error::UnsupportedWeil(format!("degree {degree}: {msg}")),
        other => other,
    }
}

/// Homology with a weight label on every basis class.
#[derive(Clone, Debug)]
pub struct GradedHomology {
    pub data: HomologyData,
    pub weights: BTreeMap<i64, Vec<i64>>,
}

impl GradedHomology {
    pub fn as_graded_complex(&self, modulus: Modulus) -> GradedComplex {
        GradedComplex::new(self.data.as_complex(), self.weights.clone(), modulus)
            .expect("zero differential preserves any labels")
    }
}

pub fn graded_homology(a: &GradedComplex) -> GradedHomology {
    let c = a.complex();
    let data = homology(c);
    let field = c.field();
    let mut weights = BTreeMap::new();
    for n in c.degrees() {
        let Some(dh) = data.degree(n) else { continue };
        if dh.dim() == 0 {
            continue;
        }
        let labels = (0..dh.dim())
            .map(|j| {
                let col = dh.section.column(j);
                let mut support = col
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !field.is_zero(v))
                    .map(|(i, _)| a.weights(n)[i]);
                let p = support.next().expect("nonzero class");
                debug_assert!(support.all(|q| q == p), "inhomogeneous homology class");
                p
            })
            .collect();
        weights.insert(n, labels);
    }
    GradedHomology { data, weights }
}

#[derive(Clone, Debug, Serialize)]
pub struct PurityEntry {
    pub degree: i64,
    pub weight: i64,
    pub dim: usize,
    pub expected: Option<i64>,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PurityReport {
    pub pure: bool,
    pub alpha: String,
    pub modulus: Modulus,
    pub entries: Vec<PurityEntry>,
    pub first_violation: Option<(i64, i64)>,
}

impl PurityReport {
    pub fn into_result(self) -> Result<Self> {
        match self.first_violation {
            Some((degree, weight)) => Err(Error::Impure { degree, weight }),
            None => Ok(self),
        }
    }

    /// Keeps only degrees `<= n`.
    pub fn through(mut self, n: i64) -> Self {
        self.entries.retain(|e| e.degree <= n);
        self.first_violation = self.entries.iter().find(|e| !e.ok).map(|e| (e.degree, e.weight));
        self.pure = self.first_violation.is_none();
        self
    }
}

/// `H_n(A)^p = 0` unless `p = alpha n` (mod `m`); `alpha n` not integral
/// forces `H_n = 0`.
pub fn purity_check(a: &GradedComplex, alpha: Rational64) -> Result<PurityReport> {
    if let Modulus::Cyclic(m) = a.modulus() {
        if !alpha.is_positive() || alpha >= Rational64::from_integer(m as i64) {
            return Err(Error::InvalidAlpha(format!("{alpha} is outside (0, {m})")));
        }
    }
    let gh = graded_homology(a);
    let v = a.complex().variance();
    let mut counts: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    for (&n, labels) in &gh.weights {
        for &p in labels {
            *counts.entry((v.internal(n), p)).or_insert(0) += 1;
        }
    }
    let entries: Vec<PurityEntry> = counts
        .into_iter()
        .map(|((degree, weight), dim)| {
            let expected = pure_weight(degree, alpha, a.modulus());
            PurityEntry { degree, weight, dim, expected, ok: expected == Some(weight) }
        })
        .collect();
    let first_violation = entries.iter().find(|e| !e.ok).map(|e| (e.degree, e.weight));
    Ok(PurityReport {
        pure: first_violation.is_none(),
        alpha: alpha.to_string(),
        modulus: a.modulus(),
        entries,
        first_violation,
    })
}

/// Chainwise Tate defect: `sum over degrees of (dim - sum of q-power eigenspace dims)`.
pub fn tate_defect(x: &EndoComplex, cfg: &FieldConfig) -> usize {
    x.complex()
        .degrees()
        .map(|n| match tate_grade_module(&x.phi(n), cfg) {
            Ok(_) => 0,
            Err(Error::NotTate { defect, .. }) => defect,
            Err(_) => x.complex().dim(n),
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::Variance;

    fn cfg72() -> FieldConfig {
        FieldConfig::new(7, 2).unwrap()
    }

    #[test]
    fn order_examples() {
        assert_eq!(order_of_q(&cfg72()).unwrap(), 3);
        assert_eq!(order_of_q(&FieldConfig::new(5, 2).unwrap()).unwrap(), 4);
        assert_eq!(order_of_q(&FieldConfig::new(13, 1).unwrap()).unwrap(), 1);
    }

    #[test]
    fn tate_module_examples() {
        let cfg = cfg72();
        let f = cfg.field();
        let twist = Matrix::scalar(f, 1, cfg.q_power(2));
        let parts = tate_grade_module(&twist, &cfg).unwrap();
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].0, 2);
        let parts = tate_grade_module(&Matrix::identity(f, 2), &cfg).unwrap();
        assert_eq!(parts[0].0, 0);
        let m = Matrix::from_i64(f, &[&[2, 1, 0], &[0, 2, 0], &[0, 0, 1]]);
        let dims: Vec<(i64, usize)> =
            tate_grade_module(&m, &cfg).unwrap().into_iter().map(|(p, b)| (p, b.cols())).collect();
        assert_eq!(dims, vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn tate_defect_and_singular() {
        let cfg = cfg72();
        let f = cfg.field();
        // 3 is not a power of 2 mod 7 (powers are 1, 2, 4)
        let m = Matrix::diagonal(f, &[f.from_i64(3), f.one()]);
        assert!(matches!(tate_grade_module(&m, &cfg), Err(Error::NotTate { defect: 1, .. })));
        let s = Matrix::zeros(f, 1, 1);
        assert!(matches!(tate_grade_module(&s, &cfg), Err(Error::SingularEndomorphism { .. })));
    }

    #[test]
    fn weil_module_examples() {
        let cfg = FieldConfig::rational(2).unwrap();
        let q = Field::Rational;
        let parts = weil_grade_module(&Matrix::scalar(q, 2, q.from_i64(2)), &cfg).unwrap();
        assert_eq!(parts[0].0, 2);
        let parts = weil_grade_module(&Matrix::identity(q, 1), &cfg).unwrap();
        assert_eq!(parts[0].0, 0);
        let inv = weil_grade_module(&Matrix::scalar(q, 1, q.parse("1/4").unwrap()), &cfg).unwrap();
        assert_eq!(inv[0].0, -4);
        assert!(matches!(
            weil_grade_module(&Matrix::scalar(q, 1, q.from_i64(3)), &cfg),
            Err(Error::UnsupportedWeil(_))
        ));
    }

    fn single_degree(weights: &[i64], n: i64, m: u64) -> GradedComplex {
        let f = Field::Prime(7);
        let c = Complex::zero_differential(f, Variance::Homological, &BTreeMap::from([(n, weights.len())]));
        GradedComplex::new(c, BTreeMap::from([(n, weights.to_vec())]), Modulus::Cyclic(m)).unwrap()
    }

    #[test]
    fn purity_examples() {
        let f = Field::Prime(7);
        let empty = GradedComplex::new(
            Complex::zero_differential(f, Variance::Homological, &BTreeMap::new()),
            BTreeMap::new(),
            Modulus::Cyclic(3),
        )
        .unwrap();
        assert!(purity_check(&empty, Rational64::new(1, 2)).unwrap().pure);
        let r = purity_check(&single_degree(&[0], 1, 3), Rational64::from_integer(1)).unwrap();
        assert!(!r.pure);
        assert_eq!(r.first_violation, Some((1, 0)));
        assert!(purity_check(&single_degree(&[1], 1, 3), Rational64::from_integer(1)).unwrap().pure);
        // alpha n not integral forces vanishing
        assert!(!purity_check(&single_degree(&[0], 1, 3), Rational64::new(1, 2)).unwrap().pure);
        assert!(purity_check(&single_degree(&[1], 1, 3), Rational64::from_integer(3)).is_err());
    }

    #[test]
    fn grading_rejects_mixing_differential() {
        let f = Field::Prime(7);
        let c = Complex::new(
            f,
            Variance::Homological,
            &BTreeMap::from([(0, 1), (1, 1)]),
            &BTreeMap::from([(1, Matrix::identity(f, 1))]),
        )
        .unwrap();
        let bad = GradedComplex::new(c.clone(), BTreeMap::from([(0, vec![0]), (1, vec![1])]), Modulus::Cyclic(3));
        assert!(matches!(bad, Err(Error::Grading(_))));
        assert!(GradedComplex::new(c, BTreeMap::from([(0, vec![1]), (1, vec![1])]), Modulus::Cyclic(3)).is_ok());
    }

    #[test]
    fn grade_endo_complex_with_frames() {
        let cfg = cfg72();
        let f = cfg.field();
        let c = Complex::zero_differential(f, Variance::Homological, &BTreeMap::from([(0, 2)]));
        // eigenvalues 1 and 2 on a non-diagonal basis
        let p = Matrix::from_i64(f, &[&[1, 1], &[0, 1]]);
        let phi = p.mul(&Matrix::diagonal(f, &[f.from_i64(2), f.one()])).mul(&p.inverse().unwrap());
        let x = EndoComplex::new(c, DegreeMap::from([(0, phi.clone())])).unwrap();
        let g = grade_endo_complex(&x, &cfg).unwrap();
        assert_eq!(g.weights(0), &[0, 1]);
        let grading = g.grading();
        for (p, basis) in &grading.splitting[&0] {
            let lam = cfg.q_power(*p);
            assert_eq!(phi.mul(basis), basis.scale(&lam));
        }
        let back = GradedComplex::from_grading(x.complex(), &grading).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn modulus_json() {
        assert_eq!(serde_json::to_string(&Modulus::Integers).unwrap(), "\"Z\"");
        assert_eq!(serde_json::from_str::<Modulus>("3").unwrap(), Modulus::Cyclic(3));
        assert!(serde_json::from_str::<Modulus>("0").is_err());
    }

    #[test]
    fn bounds() {
        assert_eq!(Modulus::Cyclic(3).formality_bound(Rational64::new(1, 2)), Some(4));
        assert_eq!(Modulus::Cyclic(5).formality_bound(Rational64::from_integer(2)), Some(2));
        assert_eq!(weight_threshold(3, Rational64::new(3, 2)), 2);
        assert_eq!(weight_threshold(0, Rational64::new(3, 2)), 0);
        assert_eq!(pure_weight(3, Rational64::new(1, 2), Modulus::Cyclic(4)), None);
        assert_eq!(pure_weight(6, Rational64::new(3, 2), Modulus::Cyclic(4)), Some(1));
    }
}
