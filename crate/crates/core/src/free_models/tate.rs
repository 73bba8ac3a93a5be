//! Weighted free models of a dg-algebra with a Tate endomorphism.
//!
//! The cone carries `ψ(m, a) = (φm, φa - Fm)`. A basis of `H^n(C)` adapted
//! to the generalized eigenspaces of `H(ψ)` is lifted by a section `σ`; the
//! defect `ψσ - σH(ψ) = -dΣ` yields `φ` and `F` on the new generators, which
//! are then moved into generalized eigenspaces of `φ` so that weights are
//! read off the words.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{block_of, cohomology_frame, cone_differential, evaluate_words, finish_checks, poly_to_vec, vec_to_poly};
use super::{FreeModel, Generator, Poly};
use crate::complexes::{EndoComplex, HoMorphism, PreMorphism, QisoReport};
use crate::dga::{connectivity, validate, WeightedDga};
use crate::error::{Error, Result};
use crate::field::{FieldConfig, Scalar};
use crate::linalg::Matrix;
use crate::weights::{tate_grade_module, weil_grade_module, Modulus};

#[derive(Clone, Debug, Serialize)]
pub struct StageLog {
    pub degree: i64,
    pub cone_cohomology: usize,
    /// Weights of the generators attached at this stage.
    pub weights: Vec<i64>,
    /// `dψ = ψd` and the block identities of `ψ`, checked exactly.
    pub identities_hold: bool,
}

#[derive(Clone, Debug)]
pub struct TateModel {
    pub model: FreeModel,
    /// `φ` on the model (global, model dim square).
    pub phi: Matrix,
    pub phi_on_gens: Vec<Poly>,
    /// `F` on the model (target dim x model dim, degree -1).
    pub homotopy: Matrix,
    pub homotopy_on_gens: Vec<Vec<Scalar>>,
    /// `φ` on the truncated target.
    pub target_phi: Matrix,
    pub stages: Vec<StageLog>,
    pub qiso: QisoReport,
}

impl TateModel {
    /// `(f, F)` as a closed ho-morphism of endo-complexes; fails if `D(f, F) != 0`.
    pub fn ho_morphism(&self) -> Result<HoMorphism> {
        let m = &self.model.algebra;
        let a = &self.model.target;
        let src = EndoComplex::new(m.complex(), WeightedDga::degree_blocks(m, m, &self.phi))?;
        let tgt = EndoComplex::new(a.complex(), WeightedDga::degree_blocks(a, a, &self.target_phi))?;
        let map = PreMorphism { degree: 0, f: self.model.map_blocks(), big_f: homotopy_blocks(m, a, &self.homotopy) };
        HoMorphism::new(src, tgt, map)
    }
}

/// `F: M^n -> A^{n-1}` keyed by the internal degree `-n` of the source.
fn homotopy_blocks(m: &WeightedDga, a: &WeightedDga, g: &Matrix) -> crate::complexes::DegreeMap {
    (0..=m.top_degree())
        .map(|n| {
            let rows = if n >= 1 { a.degree_range(n - 1) } else { 0..0 };
            (-n, block_of(g, rows, m.degree_range(n)))
        })
        .collect()
}

fn eigenvalue(cfg: &FieldConfig, modulus: Modulus, weight: i64) -> Scalar {
    match modulus {
        Modulus::Integers => cfg.q_power(weight / 2),
        Modulus::Cyclic(_) => cfg.q_power(weight),
    }
}

fn grade(phi: &Matrix, cfg: &FieldConfig, degree: i64) -> Result<Vec<(i64, Matrix)>> {
    let parts = if cfg.characteristic == 0 { weil_grade_module(phi, cfg) } else { tate_grade_module(phi, cfg) };
    parts.map_err(|e| match e {
        Error::NotTate { defect, .. } => Error::NotTate { degree, defect },
        other => other,
    })
}

/// `F` on words from its values on generators, so that `dF + Fd = φf - fφ`
/// holds on products once it holds on generators.
fn extend_homotopy(
    words: &[Vec<usize>],
    gens: &[Generator],
    on_gens: &[Vec<Scalar>],
    f: &Matrix,
    phi_m: &Matrix,
    phi_a: &Matrix,
    a: &WeightedDga,
) -> Matrix {
    let field = a.field();
    let index: std::collections::HashMap<&[usize], usize> =
        words.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();
    let fphi = f.mul(phi_m);
    let phif = phi_a.mul(f);
    let mut columns: Vec<Vec<Scalar>> = Vec::with_capacity(words.len());
    for w in words {
        let col = match w.split_first() {
            None => vec![field.zero(); a.dim()],
            Some((&g, rest)) => {
                let r = index[rest];
                let gi = index[&w[..1]];
                let first = a.mul(&on_gens[g], &phif.column(r));
                let second = a.mul(&fphi.column(gi), &columns[r]);
                let sign = field.sign(gens[g].degree);
                first.iter().zip(&second).map(|(x, y)| field.mul_add(x, &sign, y)).collect()
            }
        };
        columns.push(col);
    }
    Matrix::from_columns(field, a.dim(), &columns)
}

/// `ψ^k` on `C^k = M^{k+1} + A^k`.
fn cone_psi(m: &WeightedDga, a: &WeightedDga, phi_m: &Matrix, phi_a: &Matrix, big_f: &Matrix, k: i64) -> Matrix {
    let (m1, a0) = (m.degree_range(k + 1), a.degree_range(k));
    let mut psi = Matrix::zeros(m.field(), m1.len() + a0.len(), m1.len() + a0.len());
    psi.set_block(0, 0, &block_of(phi_m, m1.clone(), m1.clone()));
    psi.set_block(m1.len(), 0, &block_of(big_f, a0.clone(), m1.clone()).neg());
    psi.set_block(m1.len(), m1.len(), &block_of(phi_a, a0.clone(), a0));
    psi
}

fn check_input(a: &WeightedDga, phi: &Matrix) -> Result<()> {
    validate(a).into_result()?;
    connectivity(a)?;
    if phi.shape() != (a.dim(), a.dim()) {
        return Err(Error::Shape(format!("φ must be {0} x {0}", a.dim())));
    }
    if phi.mul(a.diff()) != a.diff().mul(phi) {
        return Err(Error::InvalidAlgebra("φ does not commute with d".into()));
    }
    if phi.mul_vec(&a.unit_vector()) != a.unit_vector() {
        return Err(Error::InvalidAlgebra("φ does not fix the unit".into()));
    }
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            let lhs = phi.mul_vec(&a.mul(&a.basis_vector(i), &a.basis_vector(j)));
            if lhs != a.mul(&phi.column(i), &phi.column(j)) {
                return Err(Error::InvalidAlgebra(format!(
                    "φ is not multiplicative on ({}, {})",
                    a.basis()[i].label,
                    a.basis()[j].label
                )));
            }
        }
    }
    for n in 0..=a.top_degree() {
        let r = a.degree_range(n);
        let outside = (0..a.dim()).filter(|i| !r.contains(i));
        for i in outside {
            if r.clone().any(|j| !a.field().is_zero(phi.get(i, j))) {
                return Err(Error::InvalidAlgebra(format!("φ does not preserve degree {n}")));
            }
        }
    }
    Ok(())
}

struct State {
    gens: Vec<Generator>,
    diffs: Vec<Poly>,
    images: Vec<Vec<Scalar>>,
    phis: Vec<Poly>,
    homotopies: Vec<Vec<Scalar>>,
}

struct Materialized {
    model: FreeModel,
    phi: Matrix,
    homotopy: Matrix,
}

impl State {
    fn materialize(&self, target: &WeightedDga, target_phi: &Matrix, modulus: Modulus, cap: i64) -> Result<Materialized> {
        let model = FreeModel::assemble(
            target.clone(),
            modulus,
            self.gens.clone(),
            self.diffs.clone(),
            self.images.clone(),
            cap,
        )?;
        let field = target.field();
        let phi_images: Vec<Vec<Scalar>> =
            self.phis.iter().map(|p| poly_to_vec(&model.words, p, field)).collect::<Result<_>>()?;
        let phi = evaluate_words(&model.words, &phi_images, &model.algebra);
        let homotopy =
            extend_homotopy(&model.words, &self.gens, &self.homotopies, &model.map, &phi, target_phi, target);
        Ok(Materialized { model, phi, homotopy })
    }
}

/// A free model `M -> A` with weights from the generalized eigenspaces of
/// `φ`, attaching generators in degrees `1..=N` and materialized to `N + 2`.
pub fn weighted_model_from_tate(a: &WeightedDga, phi: &Matrix, cfg: &FieldConfig, n_max: i64) -> Result<TateModel> {
    let cfg = cfg.validated()?;
    if cfg.field() != a.field() {
        return Err(Error::InvalidField("φ's field configuration does not match the algebra".into()));
    }
    check_input(a, phi)?;
    let modulus = if cfg.characteristic == 0 { Modulus::Integers } else { Modulus::Cyclic(cfg.h) };
    let field = a.field();
    let cap = n_max + 2;
    let target = a.truncate(cap);
    let target_phi = phi.block(0, 0, target.dim(), target.dim());
    let mut state =
        State { gens: Vec::new(), diffs: Vec::new(), images: Vec::new(), phis: Vec::new(), homotopies: Vec::new() };
    let mut stages = Vec::new();
    for n in 1..=n_max {
        let Materialized { model, phi: phi_m, homotopy } = state.materialize(&target, &target_phi, modulus, cap)?;
        let m = &model.algebra;
        let f = &model.map;
        let d_out = cone_differential(m, &target, f, n);
        let d_in = cone_differential(m, &target, f, n - 1);
        let psi_prev = cone_psi(m, &target, &phi_m, &target_phi, &homotopy, n - 1);
        let psi = cone_psi(m, &target, &phi_m, &target_phi, &homotopy, n);
        let psi_next = cone_psi(m, &target, &phi_m, &target_phi, &homotopy, n + 1);
        let (mp, m1) = (m.degree_range(n), m.degree_range(n + 1));
        let (ap, a0) = (target.degree_range(n - 1), target.degree_range(n));
        let commutes = d_out.mul(&psi) == psi_next.mul(&d_out) && d_in.mul(&psi_prev) == psi.mul(&d_in);
        let blocks = psi.block(0, m1.len(), m1.len(), a0.len()).is_zero()
            && psi.block(0, 0, m1.len(), m1.len()) == block_of(&phi_m, m1.clone(), m1.clone())
            && psi.block(m1.len(), 0, a0.len(), m1.len()) == block_of(&homotopy, a0.clone(), m1.clone()).neg()
            && psi.block(m1.len(), m1.len(), a0.len(), a0.len()) == block_of(&target_phi, a0.clone(), a0.clone());
        if !commutes || !blocks {
            return Err(Error::Internal(format!("cone identities fail at stage {n}")));
        }
        let dim_c = m1.len() + a0.len();
        let (sigma0, proj) = cohomology_frame(&d_out, &d_in, dim_c, field);
        let h = sigma0.cols();
        if h == 0 {
            stages.push(StageLog { degree: n, cone_cohomology: 0, weights: Vec::new(), identities_hold: true });
            continue;
        }
        let h_psi = proj.mul(&psi).mul(&sigma0);
        let parts = grade(&h_psi, &cfg, n)?;
        let frame = Matrix::hstack(field, h, &parts.iter().map(|(_, e)| e).collect::<Vec<_>>());
        let weights: Vec<i64> = parts.iter().flat_map(|(w, e)| std::iter::repeat_n(modulus.reduce(*w), e.cols())).collect();
        let sigma = sigma0.mul(&frame);
        let hv = frame.inverse().expect("eigenspaces span").mul(&h_psi).mul(&frame);
        let defect = psi.mul(&sigma).sub(&sigma.mul(&hv));
        let big_sigma = d_in
            .solve_matrix(&defect.neg())
            .ok_or_else(|| Error::Internal(format!("no homotopy Σ at stage {n}")))?;
        let sigma1 = big_sigma.block(0, 0, mp.len(), h);
        let sigma2 = big_sigma.block(mp.len(), 0, ap.len(), h);
        // φ on M^n + V, then lifts of V into its generalized eigenspaces.
        let w_dim = mp.len() + h;
        let mut phi_w = Matrix::zeros(field, w_dim, w_dim);
        phi_w.set_block(0, 0, &block_of(&phi_m, mp.clone(), mp.clone()));
        phi_w.set_block(0, mp.len(), &sigma1.neg());
        phi_w.set_block(mp.len(), mp.len(), &hv);
        let mut lifts = Matrix::zeros(field, w_dim, h);
        let mut col = 0;
        for (w, e) in &parts {
            let g = phi_w.generalized_eigenspace(&eigenvalue(&cfg, modulus, *w));
            let g_v = g.block(mp.len(), 0, h, g.cols());
            for j in col..col + e.cols() {
                let mut target_e = vec![field.zero(); h];
                target_e[j] = field.one();
                let c = g_v
                    .solve(&target_e)
                    .ok_or_else(|| Error::Internal(format!("generator {j} has no eigen-lift at stage {n}")))?;
                lifts.set_block(0, j, &Matrix::column_vector(field, &g.mul_vec(&c.particular)));
            }
            col += e.cols();
        }
        let lift_m = lifts.block(0, 0, mp.len(), h);
        let embed = |v: &[Scalar], range: &std::ops::Range<usize>, dim: usize| -> Vec<Scalar> {
            let mut out = vec![field.zero(); dim];
            for (i, c) in v.iter().enumerate() {
                out[range.start + i] = c.clone();
            }
            out
        };
        let first = state.gens.len();
        let mut local = 0;
        for j in 0..h {
            let mj = embed(&lift_m.column(j), &mp, m.dim());
            let s = sigma.column(j);
            let dv = embed(&s[..m1.len()], &m1, m.dim());
            let dv: Vec<Scalar> = dv.iter().zip(m.d(&mj)).map(|(x, y)| field.add(x, &y)).collect();
            let fv = embed(&s[m1.len()..], &a0, target.dim());
            let fv: Vec<Scalar> = fv.iter().zip(f.mul_vec(&mj)).map(|(x, y)| field.add(x, &y)).collect();
            let hj = embed(&sigma2.column(j), &ap, target.dim());
            let hj: Vec<Scalar> = hj.iter().zip(homotopy.mul_vec(&mj)).map(|(x, y)| field.add(x, &y)).collect();
            // φ(g_j) = Σ_i H_ij g_i + (φ m_j - Σ1_j - Σ_i H_ij m_i)
            let mut old = phi_m.mul_vec(&mj);
            let s1 = embed(&sigma1.column(j), &mp, m.dim());
            let correction = lift_m.mul_vec(&hv.column(j));
            let correction = embed(&correction, &mp, m.dim());
            for i in 0..m.dim() {
                old[i] = field.sub(&field.sub(&old[i], &s1[i]), &correction[i]);
            }
            let mut phi_poly = vec_to_poly(&model.words, &old, field);
            for i in 0..h {
                let c = hv.get(i, j);
                if !field.is_zero(c) {
                    phi_poly.push((c.clone(), vec![first + i]));
                }
            }
            state.gens.push(Generator { label: format!("v{n}_{local}"), degree: n, weight: weights[j] });
            state.diffs.push(vec_to_poly(&model.words, &dv, field));
            state.images.push(fv);
            state.phis.push(phi_poly);
            state.homotopies.push(hj);
            local += 1;
        }
        stages.push(StageLog { degree: n, cone_cohomology: h, weights, identities_hold: true });
    }
    let Materialized { model, phi: phi_m, homotopy } = state.materialize(&target, &target_phi, modulus, cap)?;
    finish_checks(&model)?;
    check_weight_spaces(&model.algebra, &phi_m, &cfg)?;
    let qiso = model.quasi_iso_report(Some(n_max))?;
    if !qiso.ok {
        return Err(Error::Model(format!(
            "f is not an isomorphism on cohomology in degree {}",
            qiso.first_failure.unwrap_or_default()
        )));
    }
    let out = TateModel {
        model,
        phi: phi_m,
        phi_on_gens: state.phis,
        homotopy,
        homotopy_on_gens: state.homotopies,
        target_phi,
        stages,
        qiso,
    };
    out.ho_morphism().map_err(|e| Error::Internal(format!("extended (f, F) is not closed: {e}")))?;
    Ok(out)
}

/// Each `(degree, weight)` summand is `φ`-stable with the single eigenvalue
/// belonging to its weight.
fn check_weight_spaces(m: &WeightedDga, phi: &Matrix, cfg: &FieldConfig) -> Result<()> {
    let field = m.field();
    let mut summands: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (i, b) in m.basis().iter().enumerate() {
        summands.entry((b.degree, b.weight)).or_default().push(i);
    }
    for ((n, w), idx) in summands {
        let others: Vec<usize> = (0..m.dim()).filter(|i| !idx.contains(i)).collect();
        if !phi.select_rows(&others).select_columns(&idx).is_zero() {
            return Err(Error::Internal(format!("φ does not preserve M^{n}_{w}")));
        }
        let local = phi.select_rows(&idx).select_columns(&idx);
        let shifted = local.sub(&Matrix::scalar(field, idx.len(), eigenvalue(cfg, m.modulus(), w)));
        if !shifted.pow(idx.len() as u32).is_zero() {
            return Err(Error::Internal(format!("M^{n}_{w} is not a generalized eigenspace of φ")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::from_table;
    use crate::field::Field;

    /// `H(P^1)` plus an acyclic square-zero pair `u -> w` with a non-Tate
    /// eigenvalue and `φ(x) = qx + w`.
    fn cochain_p1(cfg: &FieldConfig) -> (WeightedDga, Matrix) {
        let f = cfg.field();
        let a = from_table(
            f,
            Modulus::Cyclic(1),
            &[("1", 0, 0), ("u", 1, 0), ("x", 2, 0), ("w", 2, 0)],
            &[],
            &[(1, 3, 1)],
        )
        .unwrap();
        let q = cfg.q as i64;
        let phi = Matrix::from_i64(f, &[&[1, 0, 0, 0], &[0, 3, 0, 0], &[0, 0, q, 0], &[0, 0, 1, 3]]);
        (a, phi)
    }

    #[test]
    fn cochain_projective_line_gets_weight_one_in_degree_two() {
        let cfg = FieldConfig::new(7, 2).unwrap();
        let (a, phi) = cochain_p1(&cfg);
        let t = weighted_model_from_tate(&a, &phi, &cfg, 4).unwrap();
        let g = &t.model.generators[0];
        assert_eq!((g.degree, g.weight), (2, 1));
        assert!(t.qiso.ok);
        assert!(t.stages.iter().all(|s| s.identities_hold));
        // F(g) = u makes the square with φ commute up to d u = w.
        let f = Field::Prime(7);
        assert_eq!(t.homotopy_on_gens[0], vec![f.zero(), f.one(), f.zero(), f.zero()]);
    }

    #[test]
    fn identity_endomorphism_gives_weight_zero() {
        let cfg = FieldConfig::new(7, 1).unwrap();
        let f = cfg.field();
        let a = from_table(f, Modulus::Cyclic(1), &[("1", 0, 0), ("x", 2, 0)], &[], &[]).unwrap();
        let t = weighted_model_from_tate(&a, &Matrix::identity(f, 2), &cfg, 4).unwrap();
        assert!(t.model.generators.iter().all(|g| g.weight == 0));
        assert!(t.model.generators.len() >= 2);
    }

    #[test]
    fn non_tate_cohomology_is_reported() {
        let cfg = FieldConfig::new(7, 2).unwrap();
        let f = cfg.field();
        let a = from_table(f, Modulus::Cyclic(1), &[("1", 0, 0), ("x", 2, 0)], &[], &[]).unwrap();
        let phi = Matrix::from_i64(f, &[&[1, 0], &[0, 3]]);
        assert!(matches!(
            weighted_model_from_tate(&a, &phi, &cfg, 4),
            Err(Error::NotTate { degree: 2, defect: 1 })
        ));
    }
}
