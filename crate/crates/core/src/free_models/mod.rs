//! Free (tensor-algebra) models of weighted dg-algebras, built one degree at
//! a time from the cohomology of the mapping cone, and the N-formality
//! witness extracted from a pure model.
//!
//! Cone convention throughout: `C(f)^n = M^{n+1} + A^n` with
//! `d(m, a) = (dm, fm - da)`. A cocycle `(m, a)` of degree `n` becomes a new
//! generator `v` of degree `n` with `dv = m` and `f(v) = a`.

mod formality;
mod tate;

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;

use num_rational::Rational64;
use serde::Serialize;

use crate::complexes::{is_n_quasi_iso, QisoReport};
use crate::dga::{algebra_purity, connectivity, validate, BasisElement, Sparse, WeightedDga};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::Matrix;
use crate::weights::{pure_weight, Modulus};

pub use formality::{
    formality_witness, massey_predictions, pipeline, predicate_report, MasseyPrediction, PipelineReport, PredicateReport,
    Route, Splitting,
};
pub use tate::{weighted_model_from_tate, TateModel};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub label: String,
    pub degree: i64,
    pub weight: i64,
}

/// A noncommutative polynomial: `(coefficient, word in generator indices)`.
pub type Poly = Vec<(Scalar, Vec<usize>)>;

/// A free graded algebra `T(V)` materialized up to `degree_cap`, with a map
/// of dg-algebras to a target.
#[derive(Clone, Debug)]
pub struct FreeModel {
    pub generators: Vec<Generator>,
    pub diff_on_gens: Vec<Poly>,
    pub degree_cap: i64,
    /// `f(v)` for each generator, in the target basis.
    pub map_to_target: Vec<Vec<Scalar>>,
    /// Basis words of [`algebra`](Self::algebra), in basis order.
    pub words: Vec<Vec<usize>>,
    pub algebra: WeightedDga,
    /// The target truncated at `degree_cap`.
    pub target: WeightedDga,
    /// Global matrix of `f` (target dim x model dim).
    pub map: Matrix,
}

impl FreeModel {
    /// The ground field mapping to the unit of `target`.
    pub fn trivial(target: &WeightedDga, cap: i64) -> Result<Self> {
        let modulus = target.modulus();
        Self::assemble(target.truncate(cap), modulus, Vec::new(), Vec::new(), Vec::new(), cap)
    }

    pub(crate) fn assemble(
        target: WeightedDga,
        modulus: Modulus,
        generators: Vec<Generator>,
        diff_on_gens: Vec<Poly>,
        map_to_target: Vec<Vec<Scalar>>,
        cap: i64,
    ) -> Result<Self> {
        let (algebra, words) = materialize(target.field(), modulus, &generators, &diff_on_gens, cap)?;
        let map = evaluate_words(&words, &map_to_target, &target);
        Ok(Self { generators, diff_on_gens, degree_cap: cap, map_to_target, words, algebra, target, map })
    }

    pub fn index_of(&self, word: &[usize]) -> Option<usize> {
        self.words.iter().position(|w| w == word)
    }

    pub fn poly_of(&self, v: &[Scalar]) -> Poly {
        let f = self.algebra.field();
        v.iter()
            .enumerate()
            .filter(|(_, c)| !f.is_zero(c))
            .map(|(i, c)| (c.clone(), self.words[i].clone()))
            .collect()
    }

    /// `f` split into blocks for [`is_n_quasi_iso`].
    pub fn map_blocks(&self) -> crate::complexes::DegreeMap {
        WeightedDga::degree_blocks(&self.algebra, &self.target, &self.map)
    }

    pub fn quasi_iso_report(&self, bound: Option<i64>) -> Result<QisoReport> {
        is_n_quasi_iso(&self.algebra.complex(), &self.target.complex(), &self.map_blocks(), bound)
    }

    /// Generator degrees and weights as `(degree, weight) -> count`.
    pub fn generator_profile(&self) -> BTreeMap<(i64, i64), usize> {
        let mut out = BTreeMap::new();
        for g in &self.generators {
            *out.entry((g.degree, g.weight)).or_insert(0) += 1;
        }
        out
    }
}

fn word_degree(gens: &[Generator], w: &[usize]) -> i64 {
    w.iter().map(|&g| gens[g].degree).sum()
}

/// All words of degree `<= cap`, ordered by degree, then length, then
/// lexicographically on generator indices. Generators must have degree >= 1.
pub fn enumerate_words(gens: &[Generator], cap: i64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for w in &frontier {
            let base = word_degree(gens, w);
            for (g, gen) in gens.iter().enumerate() {
                if base + gen.degree <= cap {
                    let mut v = w.clone();
                    v.push(g);
                    next.push(v);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out.sort_by(|a, b| (word_degree(gens, a), a.len(), a).cmp(&(word_degree(gens, b), b.len(), b)));
    out
}

fn word_label(gens: &[Generator], w: &[usize]) -> String {
    if w.is_empty() {
        "1".into()
    } else {
        w.iter().map(|&g| gens[g].label.as_str()).collect::<Vec<_>>().join("*")
    }
}

/// `T(V)` up to `cap` with `d` extended by the graded Leibniz rule.
pub fn materialize(
    field: Field,
    modulus: Modulus,
    gens: &[Generator],
    diffs: &[Poly],
    cap: i64,
) -> Result<(WeightedDga, Vec<Vec<usize>>)> {
    if let Some(g) = gens.iter().find(|g| g.degree < 1) {
        return Err(Error::Model(format!("generator {} has degree {} < 1", g.label, g.degree)));
    }
    let words = enumerate_words(gens, cap);
    let index: HashMap<&[usize], usize> = words.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();
    let dim = words.len();
    let degrees: Vec<i64> = words.iter().map(|w| word_degree(gens, w)).collect();
    let basis: Vec<BasisElement> = words
        .iter()
        .zip(&degrees)
        .map(|(w, &degree)| BasisElement {
            label: word_label(gens, w),
            degree,
            weight: modulus.reduce(w.iter().map(|&g| gens[g].weight).sum()),
        })
        .collect();
    let mut mult: BTreeMap<(usize, usize), Sparse> = BTreeMap::new();
    for (i, u) in words.iter().enumerate() {
        for (j, v) in words.iter().enumerate() {
            if i == 0 || j == 0 || degrees[i] + degrees[j] > cap {
                continue;
            }
            let uv = [u.as_slice(), v.as_slice()].concat();
            mult.insert((i, j), vec![(index[uv.as_slice()], field.one())]);
        }
    }
    let mut diff = Matrix::zeros(field, dim, dim);
    for (col, w) in words.iter().enumerate() {
        if degrees[col] >= cap {
            continue;
        }
        let mut prefix_degree = 0;
        for t in 0..w.len() {
            let sign = field.sign(prefix_degree);
            for (c, mono) in &diffs[w[t]] {
                let term = [&w[..t], mono.as_slice(), &w[t + 1..]].concat();
                let row = *index.get(term.as_slice()).ok_or_else(|| {
                    Error::Model(format!("d({}) leaves the materialized range", gens[w[t]].label))
                })?;
                let v = field.mul_add(diff.get(row, col), &sign, c);
                diff.set(row, col, v);
            }
            prefix_degree += gens[w[t]].degree;
        }
    }
    let algebra = WeightedDga::from_sparse(field, modulus, basis, 0, mult, diff)?;
    Ok((algebra, words))
}

/// Column `w` is the product of the images of the letters of `w`.
pub(crate) fn evaluate_words(words: &[Vec<usize>], images: &[Vec<Scalar>], target: &WeightedDga) -> Matrix {
    let f = target.field();
    let mut columns: Vec<Vec<Scalar>> = Vec::with_capacity(words.len());
    let mut done: HashMap<&[usize], usize> = HashMap::new();
    for (i, w) in words.iter().enumerate() {
        let col = match w.split_first() {
            None => target.unit_vector(),
            Some((&g, rest)) => {
                let tail = &columns[done[rest]];
                target.mul(&images[g], tail)
            }
        };
        columns.push(col);
        done.insert(w.as_slice(), i);
    }
    Matrix::from_columns(f, target.dim(), &columns)
}

pub(crate) fn poly_to_vec(words: &[Vec<usize>], p: &Poly, field: Field) -> Result<Vec<Scalar>> {
    let mut v = vec![field.zero(); words.len()];
    for (c, w) in p {
        let i = words
            .iter()
            .position(|x| x == w)
            .ok_or_else(|| Error::Model("monomial outside the materialized range".into()))?;
        v[i] = field.add(&v[i], c);
    }
    Ok(v)
}

pub(crate) fn vec_to_poly(words: &[Vec<usize>], v: &[Scalar], field: Field) -> Poly {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !field.is_zero(c))
        .map(|(i, c)| (c.clone(), words[i].clone()))
        .collect()
}

/// Block of a global map between the degree ranges of two algebras.
pub(crate) fn block_of(g: &Matrix, rows: Range<usize>, cols: Range<usize>) -> Matrix {
    g.block(rows.start, cols.start, rows.len(), cols.len())
}

/// `C(f)^k = M^{k+1} + A^k` and `d: C^k -> C^{k+1}`.
pub(crate) fn cone_differential(m: &WeightedDga, a: &WeightedDga, f: &Matrix, k: i64) -> Matrix {
    let field = m.field();
    let (m1, m2) = (m.degree_range(k + 1), m.degree_range(k + 2));
    let (a0, a1) = (a.degree_range(k), a.degree_range(k + 1));
    let mut d = Matrix::zeros(field, m2.len() + a1.len(), m1.len() + a0.len());
    d.set_block(0, 0, &block_of(m.diff(), m2.clone(), m1.clone()));
    d.set_block(m2.len(), 0, &block_of(f, a1.clone(), m1.clone()));
    d.set_block(m2.len(), m1.len(), &block_of(a.diff(), a1, a0).neg());
    d
}

/// A homogeneous basis of `H = ker d_out / im d_in` as cocycles (`section`,
/// fixed pivots), and the class map `projection` on cocycles.
pub(crate) fn cohomology_frame(d_out: &Matrix, d_in: &Matrix, dim: usize, field: Field) -> (Matrix, Matrix) {
    let cycles = if d_out.rows() == 0 { Matrix::identity(field, dim) } else { d_out.kernel_basis() };
    let boundaries = if d_in.cols() == 0 { Matrix::zeros(field, dim, 0) } else { d_in.image_basis() };
    let picked = boundaries.extend_with(&cycles);
    let section = cycles.select_columns(&picked);
    let partial = Matrix::hstack(field, dim, &[&boundaries, &section]);
    let filler = partial.extend_with(&Matrix::identity(field, dim));
    let frame = Matrix::hstack(field, dim, &[&partial, &Matrix::identity(field, dim).select_columns(&filler)]);
    let inv = frame.inverse().expect("completed basis is invertible");
    let rows: Vec<usize> = (boundaries.cols()..boundaries.cols() + section.cols()).collect();
    let projection = if rows.is_empty() { Matrix::zeros(field, 0, dim) } else { inv.select_rows(&rows) };
    (section, projection)
}

/// A lift of `p` (mod the modulus) in `[lo, hi]`, if any.
pub(crate) fn lift_in(p: i64, lo: Rational64, hi: Rational64, modulus: Modulus) -> Option<i64> {
    let start = lo.ceil().to_integer();
    let candidate = match modulus {
        Modulus::Integers => p,
        Modulus::Cyclic(m) => start + (p - start).rem_euclid(m as i64),
    };
    (Rational64::from_integer(candidate) >= lo && Rational64::from_integer(candidate) <= hi).then_some(candidate)
}

/// Both structural laws of a pure model: `d` vanishes on `M^n_{αn}` and
/// `M^{n+1}_{αn} = 0` whenever `αn <= m - 1`.
pub(crate) fn check_diagonal_laws(m: &WeightedDga, alpha: Rational64) -> Result<()> {
    let modulus = m.modulus();
    for n in 0..=m.top_degree() {
        let an = alpha * Rational64::from_integer(n);
        if !an.is_integer() {
            continue;
        }
        let an = an.to_integer();
        if let Modulus::Cyclic(mm) = modulus {
            if an > mm as i64 - 1 {
                continue;
            }
        }
        if n < m.top_degree() && !m.summand(n + 1, an).is_empty() {
            return Err(Error::Internal(format!("diagonal-closure law fails: M^{}_{} is nonzero", n + 1, an)));
        }
        for i in m.summand(n, an) {
            if !m.is_zero(&m.diff().column(i)) {
                return Err(Error::Internal(format!("d is nonzero on {} in M^{n}_{an}", m.basis()[i].label)));
            }
        }
    }
    Ok(())
}

/// Default truncation: `N = ⌊(m-1)/α⌋`, or the target's top degree for `Z`.
pub fn default_bound(a: &WeightedDga, alpha: Rational64) -> i64 {
    a.modulus().formality_bound(alpha).unwrap_or(a.top_degree())
}

pub(crate) fn require_simply_connected(a: &WeightedDga) -> Result<()> {
    let c = connectivity(a)?;
    if !c.simply_connected {
        return Err(Error::NotSimplyConnected(c.betti.get(&1).copied().unwrap_or(0)));
    }
    Ok(())
}

/// Attaches generators degree by degree (`n = 2..=N`) so that `f` becomes an
/// `N`-quasi-isomorphism; new generators of degree `n` and weight `p` form a
/// basis of `H^n(C(f))_p`.
pub fn build_free_model(a: &WeightedDga, alpha: Rational64, n_bound: Option<i64>) -> Result<(FreeModel, QisoReport)> {
    validate(a).into_result()?;
    require_simply_connected(a)?;
    algebra_purity(a, alpha)?.into_result()?;
    let n_max = n_bound.unwrap_or_else(|| default_bound(a, alpha));
    let cap = n_max + 2;
    let field = a.field();
    let modulus = a.modulus();
    let target = a.truncate(cap);
    let mut gens: Vec<Generator> = Vec::new();
    let mut diffs: Vec<Poly> = Vec::new();
    let mut images: Vec<Vec<Scalar>> = Vec::new();
    for n in 2..=n_max {
        let model = FreeModel::assemble(target.clone(), modulus, gens.clone(), diffs.clone(), images.clone(), cap)?;
        let m = &model.algebra;
        let d_out = cone_differential(m, &target, &model.map, n);
        let d_in = cone_differential(m, &target, &model.map, n - 1);
        let (m1, a0) = (m.degree_range(n + 1), target.degree_range(n));
        let (m2, a1) = (m.degree_range(n + 2), target.degree_range(n + 1));
        let (mp, ap) = (m.degree_range(n), target.degree_range(n - 1));
        let mut weights: Vec<i64> = m.distinct_weights();
        weights.extend(target.distinct_weights());
        weights.sort_unstable();
        weights.dedup();
        let mut local = 0;
        for p in weights {
            let pick = |range: &Range<usize>, alg: &WeightedDga, offset: usize| -> Vec<usize> {
                range.clone().filter(|&i| alg.basis()[i].weight == p).map(|i| i - range.start + offset).collect()
            };
            let here = [pick(&m1, m, 0), pick(&a0, &target, m1.len())].concat();
            let above = [pick(&m2, m, 0), pick(&a1, &target, m2.len())].concat();
            let below = [pick(&mp, m, 0), pick(&ap, &target, mp.len())].concat();
            if here.is_empty() {
                continue;
            }
            let dout = d_out.select_rows(&above).select_columns(&here);
            let din = d_in.select_rows(&here).select_columns(&below);
            let (section, _) = cohomology_frame(&dout, &din, here.len(), field);
            for j in 0..section.cols() {
                let mut dv = vec![field.zero(); m.dim()];
                let mut fv = vec![field.zero(); target.dim()];
                for (r, &i) in here.iter().enumerate() {
                    let c = section.get(r, j).clone();
                    if i < m1.len() {
                        dv[m1.start + i] = c;
                    } else {
                        fv[a0.start + i - m1.len()] = c;
                    }
                }
                let diagonal = pure_weight(n, alpha, modulus) == Some(p);
                let lo = alpha * Rational64::from_integer(n);
                let hi = alpha * Rational64::from_integer(2 * n - 2);
                if !diagonal && lift_in(p, lo, hi, modulus).is_none() {
                    return Err(Error::Internal(format!(
                        "weight-bound law fails: generator in degree {n} has weight {p} outside [{lo}, {hi}]"
                    )));
                }
                gens.push(Generator { label: format!("v{n}_{local}"), degree: n, weight: p });
                diffs.push(vec_to_poly(&model.words, &dv, field));
                images.push(fv);
                local += 1;
            }
        }
    }
    let model = FreeModel::assemble(target, modulus, gens, diffs, images, cap)?;
    finish_checks(&model)?;
    check_diagonal_laws(&model.algebra, alpha)?;
    let report = model.quasi_iso_report(Some(n_max))?;
    if !report.ok {
        return Err(Error::Model(format!(
            "f is not an isomorphism on cohomology in degree {}",
            report.first_failure.unwrap_or_default()
        )));
    }
    Ok((model, report))
}

pub(crate) fn finish_checks(model: &FreeModel) -> Result<()> {
    let m = &model.algebra;
    if !m.diff().mul(m.diff()).is_zero() {
        return Err(Error::Internal("the Leibniz extension of d does not square to zero".into()));
    }
    let fd = model.map.mul(m.diff());
    let df = model.target.diff().mul(&model.map);
    if fd != df {
        return Err(Error::Internal("f does not commute with the differentials".into()));
    }
    if let Some(g) = model.generators.iter().find(|g| g.degree > model.degree_cap - 2) {
        return Err(Error::Internal(format!("generator {} lies above N", g.label)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::from_table;

    fn f7() -> Field {
        Field::Prime(7)
    }

    fn p1() -> WeightedDga {
        from_table(f7(), Modulus::Cyclic(3), &[("1", 0, 0), ("x", 2, 1)], &[], &[]).unwrap()
    }

    #[test]
    fn words_are_length_lex_within_degree() {
        let gens = vec![
            Generator { label: "a".into(), degree: 2, weight: 0 },
            Generator { label: "b".into(), degree: 2, weight: 0 },
            Generator { label: "c".into(), degree: 4, weight: 0 },
        ];
        let w = enumerate_words(&gens, 4);
        assert_eq!(w, vec![vec![], vec![0], vec![1], vec![2], vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn leibniz_extension_squares_to_zero() {
        // d c = a b - b a on generators of degree 2, 2, 3
        let f = f7();
        let gens = vec![
            Generator { label: "a".into(), degree: 2, weight: 0 },
            Generator { label: "b".into(), degree: 2, weight: 0 },
            Generator { label: "c".into(), degree: 3, weight: 0 },
        ];
        let diffs = vec![vec![], vec![], vec![(f.one(), vec![0, 1]), (f.from_i64(-1), vec![1, 0])]];
        let (m, _) = materialize(f, Modulus::Cyclic(1), &gens, &diffs, 9).unwrap();
        assert!(m.diff().mul(m.diff()).is_zero());
        assert!(validate(&m).ok);
    }

    #[test]
    fn ground_field_needs_no_generators() {
        let k = from_table(f7(), Modulus::Cyclic(3), &[("1", 0, 0)], &[], &[]).unwrap();
        let (model, report) = build_free_model(&k, Rational64::new(1, 2), None).unwrap();
        assert!(model.generators.is_empty());
        assert!(report.ok);
    }

    #[test]
    fn projective_line_model() {
        let a = p1();
        let (model, report) = build_free_model(&a, Rational64::new(1, 2), None).unwrap();
        assert_eq!(model.degree_cap, 6);
        assert_eq!(model.generators[0].degree, 2);
        assert_eq!(model.generators[0].weight, 1);
        assert_eq!(model.generators.iter().filter(|g| g.degree == 2).count(), 1);
        assert!(report.ok);
        // Betti numbers of the model agree with the input through N = 4.
        let hm = crate::dga::cohomology_algebra(&model.algebra).unwrap().betti();
        let ha = crate::dga::cohomology_algebra(&a).unwrap().betti();
        for n in 0..=4 {
            assert_eq!(hm.get(&n), ha.get(&n), "degree {n}");
        }
    }

    #[test]
    fn impure_and_non_simply_connected_inputs_are_refused() {
        let a = p1();
        assert!(matches!(build_free_model(&a, Rational64::from_integer(1), None), Err(Error::Impure { .. })));
        let e = from_table(f7(), Modulus::Cyclic(3), &[("1", 0, 0), ("e", 1, 1)], &[], &[]).unwrap();
        assert!(matches!(build_free_model(&e, Rational64::from_integer(1), None), Err(Error::NotSimplyConnected(1))));
    }

    #[test]
    fn lifts() {
        let m = Modulus::Cyclic(3);
        assert_eq!(lift_in(2, Rational64::new(3, 2), Rational64::from_integer(2), m), Some(2));
        assert_eq!(lift_in(0, Rational64::from_integer(2), Rational64::from_integer(3), m), Some(3));
        assert_eq!(lift_in(1, Rational64::from_integer(2), Rational64::from_integer(3), m), None);
    }
}
