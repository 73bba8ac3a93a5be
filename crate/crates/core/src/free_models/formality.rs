//! The zig-zag `M -> M/B -> H(M/B) -> t<=N H(M)` for an α-pure model, and
//! the end-to-end pipeline from an input algebra.

use std::collections::BTreeMap;

use num_rational::Rational64;
use serde::Serialize;

use super::{build_free_model, check_diagonal_laws, default_bound, require_simply_connected, weighted_model_from_tate};
use super::Generator;
use crate::complexes::homology;
use crate::dga::{
    algebra_purity, cohomology_algebra, connectivity, low_degree_bound, validate, vanishing_predicate, Connectivity,
    Sparse, Vanishing, WeightedDga,
};
use crate::error::{Error, Result};
use crate::field::FieldConfig;
use crate::linalg::Matrix;
use crate::weights::{Modulus, PurityReport};
use crate::witness::{Direction, FormalityWitness, Node, Object, Stage};

/// Basis indices of `M = A + D + B`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Splitting {
    pub a: Vec<usize>,
    pub d: Vec<usize>,
    pub b: Vec<usize>,
}

fn classify(n: i64, p: i64, alpha: Rational64, modulus: Modulus) -> char {
    let an = alpha * Rational64::from_integer(n);
    if an.is_integer() && an.to_integer() == p {
        return 'd';
    }
    let above = Rational64::from_integer(p) > an;
    let low = match modulus {
        Modulus::Integers => true,
        Modulus::Cyclic(m) => an < Rational64::from_integer(m as i64 - 1),
    };
    if above && low {
        'a'
    } else {
        'b'
    }
}

pub fn splitting(m: &WeightedDga, alpha: Rational64) -> Splitting {
    let mut s = Splitting::default();
    for (i, e) in m.basis().iter().enumerate() {
        match classify(e.degree, e.weight, alpha, m.modulus()) {
            'a' => s.a.push(i),
            'd' => s.d.push(i),
            _ => s.b.push(i),
        }
    }
    s
}

fn support_within(v: &Sparse, allowed: &[bool]) -> bool {
    v.iter().all(|(k, _)| allowed[*k])
}

/// `B` is a two-sided ideal closed under `d`.
fn check_ideal(m: &WeightedDga, split: &Splitting) -> Result<()> {
    let mut in_b = vec![false; m.dim()];
    for &i in &split.b {
        in_b[i] = true;
    }
    for (&(i, j), v) in m.products() {
        if (in_b[i] || in_b[j]) && !support_within(v, &in_b) {
            return Err(Error::Internal(format!(
                "B is not an ideal: {} * {} leaves B",
                m.basis()[i].label,
                m.basis()[j].label
            )));
        }
    }
    let f = m.field();
    for &i in &split.b {
        let col = m.diff().column(i);
        if col.iter().enumerate().any(|(k, c)| !f.is_zero(c) && !in_b[k]) {
            return Err(Error::Internal(format!("d({}) leaves B", m.basis()[i].label)));
        }
    }
    Ok(())
}

/// `H^n(B) = 0` for own degrees `n <= bound`.
fn check_b_acyclic(m: &WeightedDga, split: &Splitting, bound: i64) -> Result<()> {
    let of_degree = |n: i64| -> Vec<usize> { split.b.iter().copied().filter(|&i| m.basis()[i].degree == n).collect() };
    for n in 0..=bound.min(m.top_degree() - 1) {
        let here = of_degree(n);
        if here.is_empty() {
            continue;
        }
        let d_out = m.diff().select_rows(&of_degree(n + 1)).select_columns(&here);
        let d_in = m.diff().select_rows(&here).select_columns(&of_degree(n - 1));
        let cycles = here.len() - d_out.rank();
        if cycles != d_in.rank() {
            return Err(Error::Internal(format!("H^{n}(B) has dimension {}", cycles - d_in.rank())));
        }
    }
    Ok(())
}

/// `M/B` on the basis `A + D` (original order) and the projection.
fn quotient(m: &WeightedDga, split: &Splitting) -> Result<(WeightedDga, Matrix, Vec<bool>)> {
    let field = m.field();
    let mut keep: Vec<usize> = split.a.iter().chain(&split.d).copied().collect();
    keep.sort_unstable();
    let mut new_index = vec![None; m.dim()];
    for (k, &i) in keep.iter().enumerate() {
        new_index[i] = Some(k);
    }
    let project = |v: &Sparse| -> Sparse {
        v.iter().filter_map(|(i, c)| new_index[*i].map(|k| (k, c.clone()))).collect()
    };
    let basis = keep.iter().map(|&i| m.basis()[i].clone()).collect();
    let mut mult = BTreeMap::new();
    for (&(i, j), v) in m.products() {
        if let (Some(a), Some(b)) = (new_index[i], new_index[j]) {
            let p = project(v);
            if !p.is_empty() {
                mult.insert((a, b), p);
            }
        }
    }
    let diff = m.diff().select_rows(&keep).select_columns(&keep);
    let unit = new_index[m.unit()].ok_or_else(|| Error::Internal("the unit lies in B".into()))?;
    let quotient = WeightedDga::from_sparse(field, m.modulus(), basis, unit, mult, diff)?;
    let mut pi = Matrix::zeros(field, keep.len(), m.dim());
    for (k, &i) in keep.iter().enumerate() {
        pi.set(k, i, field.one());
    }
    let mut is_a = vec![false; keep.len()];
    for &i in &split.a {
        is_a[new_index[i].expect("A is kept")] = true;
    }
    Ok((quotient, pi, is_a))
}

/// `H^*(M)` with the basis used by [`homology`] on the underlying complex,
/// so that the witness composite can be compared with the identity.
fn cohomology_in_complex_basis(m: &WeightedDga, top: i64) -> Result<(WeightedDga, Matrix)> {
    let h = cohomology_algebra(m)?;
    let c = m.complex();
    let hd = homology(&c);
    let field = m.field();
    let mut sections = Matrix::zeros(field, m.dim(), h.algebra.dim());
    let mut col = 0;
    for n in 0..=m.top_degree() {
        let r = m.degree_range(n);
        let s = hd.section(-n, r.len());
        for j in 0..s.cols() {
            for (i, v) in s.column(j).into_iter().enumerate() {
                sections.set(r.start + i, col, v);
            }
            col += 1;
        }
    }
    let change = h.projection.mul(&sections);
    let labels = (0..h.algebra.dim())
        .map(|j| {
            let class = change.column(j);
            let nz: Vec<usize> = (0..class.len()).filter(|&i| !field.is_zero(&class[i])).collect();
            match nz[..] {
                [i] if field.is_one(&class[i]) => h.algebra.basis()[i].label.clone(),
                _ => format!("c{}.{j}", h.algebra.basis()[nz.first().copied().unwrap_or(0)].degree),
            }
        })
        .collect();
    let algebra = h.algebra.change_basis(&change, labels)?;
    Ok((algebra.truncate(top), sections))
}

fn restrict_degree(g: &Matrix, src: &WeightedDga, tgt: &WeightedDga, n: i64) -> Matrix {
    let (s, t) = (src.degree_range(n), tgt.degree_range(n));
    g.block(t.start, s.start, t.len(), s.len())
}

/// Three-stage witness for a pure dg-algebra `m` (typically a free model):
/// `M -> M' = M/B -> H(M') -> t<=N H(M)`. `valid_through` caps the claim
/// for truncated models.
pub fn formality_witness(m: &WeightedDga, alpha: Rational64, valid_through: Option<i64>) -> Result<FormalityWitness> {
    validate(m).into_result()?;
    let purity = algebra_purity(m, alpha)?;
    match valid_through {
        Some(v) => purity.through(v).into_result()?,
        None => purity.into_result()?,
    };
    check_diagonal_laws(m, alpha)?;
    let field = m.field();
    let bound = match (m.modulus().formality_bound(alpha), valid_through) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    let n = bound.unwrap_or(m.top_degree()).min(m.top_degree());
    let split = splitting(m, alpha);
    check_ideal(m, &split)?;
    check_b_acyclic(m, &split, n)?;
    let (mq, pi, is_a) = quotient(m, &split)?;
    for (&(i, j), v) in mq.products() {
        if (is_a[i] || is_a[j]) && !support_within(v, &is_a) {
            return Err(Error::Internal(format!(
                "A*M' meets D: {} * {}",
                mq.basis()[i].label,
                mq.basis()[j].label
            )));
        }
    }
    let hq = cohomology_algebra(&mq)?;
    for (k, &a) in is_a.iter().enumerate() {
        if a && !hq.projection.column(k).iter().all(|c| field.is_zero(c)) {
            return Err(Error::Internal(format!("{} in A has a nonzero class", mq.basis()[k].label)));
        }
    }
    let (th, sections) = cohomology_in_complex_basis(m, n)?;
    // ι = (H(Qπ))^{-1} through degree N, zero above.
    let hqpi = hq.projection.mul(&pi).mul(&sections);
    let full_h = cohomology_algebra(m)?.algebra;
    let mut iota = Matrix::zeros(field, th.dim(), hq.algebra.dim());
    for d in 0..=n {
        let blk = restrict_degree(&hqpi, &full_h, &hq.algebra, d);
        let inv = blk
            .inverse()
            .or_else(|| (blk.rows() == 0 && blk.cols() == 0).then(|| blk.clone()))
            .ok_or_else(|| Error::Internal(format!("H^{d}(π) is not invertible")))?;
        let (s, t) = (hq.algebra.degree_range(d), th.degree_range(d));
        if inv.shape() == (t.len(), s.len()) && !s.is_empty() {
            iota.set_block(t.start, s.start, &inv);
        }
    }
    let mut w = FormalityWitness::new(Node { label: "M".into(), object: Object::Algebra(m.clone()) });
    w.push(
        Stage {
            label: "pi: M -> M/B".into(),
            direction: Direction::Forward,
            map: WeightedDga::degree_blocks(m, &mq, &pi),
            claimed_n: Some(n),
            verified_n: None,
        },
        Node { label: "M' = M/B".into(), object: Object::Algebra(mq.clone()) },
    );
    w.push(
        Stage {
            label: "M' -> H(M'): A to 0, D to D/Im d".into(),
            direction: Direction::Forward,
            map: WeightedDga::degree_blocks(&mq, &hq.algebra, &hq.projection),
            claimed_n: None,
            verified_n: None,
        },
        Node { label: "H(M')".into(), object: Object::Algebra(hq.algebra.clone()) },
    );
    w.push(
        Stage {
            label: "H(M') = t<=N H(M)".into(),
            direction: Direction::Forward,
            map: WeightedDga::degree_blocks(&hq.algebra, &th, &iota),
            claimed_n: Some(n),
            verified_n: None,
        },
        Node { label: format!("t<={n} H(M)"), object: Object::Algebra(th) },
    );
    w.overall_n = Some(n);
    w.metadata.insert("alpha".into(), alpha.to_string());
    w.metadata.insert("modulus".into(), serde_json::to_string(&m.modulus())?);
    w.metadata.insert(
        "weight_truncation".into(),
        match m.modulus() {
            Modulus::Integers => "none".into(),
            Modulus::Cyclic(_) => format!("N = {n}"),
        },
    );
    w.metadata.insert("splitting".into(), format!("A {} / D {} / B {}", split.a.len(), split.d.len(), split.b.len()));
    w.certify()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Zero differential: the input is its own model.
    FormalOnTheNose,
    FreeModel,
    TateModel,
}

#[derive(Clone, Debug, Serialize)]
pub struct MasseyPrediction {
    pub k: usize,
    pub vanishing: Vanishing,
}

#[derive(Clone, Debug, Serialize)]
pub struct PipelineReport {
    pub route: Route,
    pub overall_n: Option<i64>,
    pub alpha: String,
    pub modulus: Modulus,
    pub connectivity: Connectivity,
    pub purity: PurityReport,
    pub generators: Vec<Generator>,
    pub massey: Vec<MasseyPrediction>,
    /// Degree below which no nontrivial Massey product can live (`r`-connected).
    pub massey_low_degree_bound: Option<i64>,
}

/// Vanishing predicates for `k = 3..=max_k`, which need a finite modulus.
pub fn massey_predictions(alpha: Rational64, modulus: Modulus, max_k: usize) -> Vec<MasseyPrediction> {
    match modulus {
        Modulus::Cyclic(m) => {
            (3..=max_k).map(|k| MasseyPrediction { k, vanishing: vanishing_predicate(alpha, m, k) }).collect()
        }
        Modulus::Integers => Vec::new(),
    }
}

/// Verdicts that need no model: connectivity, purity of the stored
/// weights and the Massey predicates. Available when the pipeline refuses.
#[derive(Clone, Debug, Serialize)]
pub struct PredicateReport {
    pub alpha: String,
    pub modulus: Modulus,
    pub connectivity: Connectivity,
    pub purity: PurityReport,
    pub massey: Vec<MasseyPrediction>,
    pub massey_low_degree_bound: Option<i64>,
    /// `floor((m - 1) / alpha)`: what the witness path would certify.
    pub formality_bound: Option<i64>,
}

/// The modulus comes from `cfg` when `phi` is given, else from `a`.
pub fn predicate_report(a: &WeightedDga, phi: Option<&Matrix>, cfg: &FieldConfig, alpha: Rational64) -> Result<PredicateReport> {
    validate(a).into_result()?;
    let modulus = match phi {
        Some(_) if cfg.characteristic == 0 => Modulus::Integers,
        Some(_) => Modulus::Cyclic(cfg.validated()?.h),
        None => a.modulus(),
    };
    modulus.check_alpha(alpha)?;
    let connectivity = connectivity(a)?;
    let low = match modulus {
        Modulus::Cyclic(m) => Some(low_degree_bound(alpha, m, connectivity.r)),
        Modulus::Integers => None,
    };
    Ok(PredicateReport {
        alpha: alpha.to_string(),
        modulus,
        purity: algebra_purity(a, alpha)?,
        connectivity,
        massey: massey_predictions(alpha, modulus, 8),
        massey_low_degree_bound: low,
        formality_bound: modulus.formality_bound(alpha),
    })
}

fn prepend(front: Node, stage: Stage, inner: FormalityWitness) -> FormalityWitness {
    let mut w = FormalityWitness::new(front);
    let mut nodes = inner.nodes.into_iter();
    let first = nodes.next().expect("nonempty witness");
    w.push(stage, first);
    for (s, n) in inner.stages.into_iter().zip(nodes) {
        w.push(s, n);
    }
    w.overall_n = inner.overall_n;
    w.anchor = inner.anchor + 1;
    w.metadata = inner.metadata;
    w
}

/// Model, purity, Massey predictions and a certified witness for `a`.
/// With `φ` the model carries the weights of `φ`; without it the weights
/// stored on `a` are used.
pub fn pipeline(
    a: &WeightedDga,
    phi: Option<&Matrix>,
    cfg: &FieldConfig,
    alpha: Rational64,
) -> Result<(FormalityWitness, PipelineReport)> {
    validate(a).into_result()?;
    let conn = connectivity(a)?;
    require_simply_connected(a)?;
    let (witness, route, modulus, purity, generators) = match phi {
        Some(phi) => {
            let modulus = if cfg.characteristic == 0 { Modulus::Integers } else { Modulus::Cyclic(cfg.validated()?.h) };
            modulus.check_alpha(alpha)?;
            let n = modulus.formality_bound(alpha).unwrap_or(a.top_degree());
            let t = weighted_model_from_tate(a, phi, cfg, n)?;
            // past `n` the model need not match `A`, and its top degree is truncated
            let purity = algebra_purity(&t.model.algebra, alpha)?.through(n).into_result()?;
            let inner = formality_witness(&t.model.algebra, alpha, Some(n))?;
            let stage = Stage {
                label: "f: M -> A (weighted model)".into(),
                direction: Direction::Backward,
                map: t.model.map_blocks(),
                claimed_n: Some(n),
                verified_n: None,
            };
            let front = Node { label: "A".into(), object: Object::Algebra(t.model.target.clone()) };
            (prepend(front, stage, inner), Route::TateModel, modulus, purity, t.model.generators.clone())
        }
        None if a.has_zero_differential() => {
            let purity = algebra_purity(a, alpha)?.into_result()?;
            let w = formality_witness(a, alpha, None)?;
            (w, Route::FormalOnTheNose, a.modulus(), purity, Vec::new())
        }
        None => {
            let n = default_bound(a, alpha);
            let (model, _) = build_free_model(a, alpha, Some(n))?;
            let purity = algebra_purity(&model.algebra, alpha)?;
            let inner = formality_witness(&model.algebra, alpha, Some(n))?;
            let stage = Stage {
                label: "f: M -> A (free model)".into(),
                direction: Direction::Backward,
                map: model.map_blocks(),
                claimed_n: Some(n),
                verified_n: None,
            };
            let front = Node { label: "A".into(), object: Object::Algebra(model.target.clone()) };
            (prepend(front, stage, inner), Route::FreeModel, a.modulus(), purity, model.generators.clone())
        }
    };
    let mut witness = witness;
    witness.metadata.insert("route".into(), serde_json::to_string(&route)?.trim_matches('"').to_string());
    let witness = witness.certify()?;
    let low = match modulus {
        Modulus::Cyclic(m) => Some(low_degree_bound(alpha, m, conn.r)),
        Modulus::Integers => None,
    };
    let report = PipelineReport {
        route,
        overall_n: witness.overall_n,
        alpha: alpha.to_string(),
        modulus,
        connectivity: conn,
        purity,
        generators,
        massey: massey_predictions(alpha, modulus, 8),
        massey_low_degree_bound: low,
    };
    Ok((witness, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::from_table;
    use crate::field::Field;
    use crate::witness::verify;

    fn f7() -> Field {
        Field::Prime(7)
    }

    fn projective(n: usize) -> WeightedDga {
        let mut basis = vec![("1".to_string(), 0, 0)];
        for i in 1..=n {
            basis.push((format!("x{i}"), 2 * i as i64, (i as i64) % 3));
        }
        let labels: Vec<(&str, i64, i64)> = basis.iter().map(|(l, d, w)| (l.as_str(), *d, *w)).collect();
        let mut products = Vec::new();
        for i in 1..=n {
            for j in 1..=n {
                if i + j <= n {
                    products.push((i, j, i + j, 1));
                }
            }
        }
        from_table(f7(), Modulus::Cyclic(3), &labels, &products, &[]).unwrap()
    }

    #[test]
    fn zero_differential_input_is_formal_on_the_nose() {
        let a = projective(2);
        let cfg = FieldConfig::new(7, 2).unwrap();
        let (w, r) = pipeline(&a, None, &cfg, Rational64::new(1, 2)).unwrap();
        assert_eq!(r.route, Route::FormalOnTheNose);
        assert_eq!(w.overall_n, Some(4));
        assert!(verify(&w).unwrap().ok);
    }

    #[test]
    fn projective_plane_model_witness() {
        let a = projective(2);
        let (model, _) = build_free_model(&a, Rational64::new(1, 2), None).unwrap();
        let w = formality_witness(&model.algebra, Rational64::new(1, 2), Some(4)).unwrap();
        assert_eq!(w.overall_n, Some(4));
        let r = verify(&w).unwrap();
        assert!(r.ok, "{:?}", r.first_failure);
    }

    #[test]
    fn tate_route_through_the_pipeline() {
        let a = projective(3);
        let cfg = FieldConfig::new(7, 2).unwrap();
        let q: Vec<i64> = vec![1, 2, 4, 1];
        let rows: Vec<Vec<i64>> = (0..4).map(|i| (0..4).map(|j| if i == j { q[i] } else { 0 }).collect()).collect();
        let rows: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        let phi = Matrix::from_i64(f7(), &rows);
        let (w, r) = pipeline(&a, Some(&phi), &cfg, Rational64::new(1, 2)).unwrap();
        assert_eq!(r.route, Route::TateModel);
        assert_eq!(w.overall_n, Some(4));
        assert!(verify(&w).unwrap().ok);
    }

    #[test]
    fn truncated_top_degree_of_the_model_is_ignored() {
        // the P^1 model is materialized to degree 6, where v3*v3 looks like an impure class
        let a = projective(1);
        let cfg = FieldConfig::new(7, 2).unwrap();
        let phi = Matrix::from_i64(f7(), &[&[1, 0], &[0, 2]]);
        let (w, _) = pipeline(&a, Some(&phi), &cfg, Rational64::new(1, 2)).unwrap();
        assert_eq!(w.overall_n, Some(4));
        assert!(verify(&w).unwrap().ok);
    }

    #[test]
    fn splitting_of_a_pure_model() {
        let a = projective(1);
        let (model, _) = build_free_model(&a, Rational64::new(1, 2), None).unwrap();
        let s = splitting(&model.algebra, Rational64::new(1, 2));
        assert_eq!(s.a.len() + s.d.len() + s.b.len(), model.algebra.dim());
        assert!(s.d.contains(&0));
    }
}
