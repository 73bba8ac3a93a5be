//! The truncations `tau` and `t<=N` and the maps `Phi`, `Psi`, `Upsilon`.
//!
//! Both truncations need homological, non-negatively graded input.

use std::collections::BTreeMap;

use num_rational::Rational64;
use serde::Serialize;

use super::{graded_homology, purity_check, weight_threshold, GradedComplex, GradedHomology};
use crate::complexes::{block, tensor_maps, tensor_with_layout, Complex, DegreeMap, Variance};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

fn require_nonnegative(c: &Complex) -> Result<()> {
    if c.variance() != Variance::Homological {
        return Err(Error::VarianceMismatch("truncations need a homological complex".into()));
    }
    if !c.is_empty() && *c.degrees().start() < 0 {
        return Err(Error::NegativeDegree(*c.degrees().start()));
    }
    Ok(())
}

/// `tau A` with its inclusion `Phi` into `A`.
#[derive(Clone, Debug)]
pub struct Tau {
    pub graded: GradedComplex,
    pub inclusion: DegreeMap,
    /// Marks the basis vectors of `tau A` sitting in degree `ceil(p/alpha)`.
    pub critical: BTreeMap<i64, Vec<bool>>,
}

/// `(tau A)_n^p` is `A_n^p` above `ceil(p/alpha)`, `ker d` at it, `0` below.
pub fn truncation_tau(a: &GradedComplex, alpha: Rational64) -> Result<Tau> {
    let c = a.complex();
    require_nonnegative(c)?;
    a.modulus().check_alpha(alpha)?;
    let field = c.field();
    let mut inclusion = DegreeMap::new();
    let mut weights = BTreeMap::new();
    let mut critical = BTreeMap::new();
    for n in c.degrees() {
        let dim = c.dim(n);
        let mut columns: Vec<Vec<_>> = Vec::new();
        let mut labels = Vec::new();
        let mut marks = Vec::new();
        for p in a.distinct_weights() {
            let idx = a.indices_of_weight(n, p);
            if idx.is_empty() {
                continue;
            }
            let threshold = weight_threshold(p, alpha);
            if n > threshold {
                for &i in &idx {
                    let mut v = vec![field.zero(); dim];
                    v[i] = field.one();
                    columns.push(v);
                    labels.push(p);
                    marks.push(false);
                }
            } else if n == threshold {
                let rows = a.indices_of_weight(n - 1, p);
                let dp = c.d(n).select_rows(&rows).select_columns(&idx);
                let k = dp.kernel_basis();
                for j in 0..k.cols() {
                    let mut v = vec![field.zero(); dim];
                    for (r, &i) in idx.iter().enumerate() {
                        v[i] = k.get(r, j).clone();
                    }
                    columns.push(v);
                    labels.push(p);
                    marks.push(true);
                }
            }
        }
        inclusion.insert(n, Matrix::from_columns(field, dim, &columns));
        weights.insert(n, labels);
        critical.insert(n, marks);
    }
    let mut dims = BTreeMap::new();
    let mut diffs = DegreeMap::new();
    for n in c.degrees() {
        dims.insert(n, inclusion[&n].cols());
        let below = inclusion
            .get(&(n - 1))
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(field, 0, 0));
        let image = c.d(n).mul(&inclusion[&n]);
        let restricted = below
            .solve_matrix(&image)
            .ok_or_else(|| Error::Internal(format!("tau is not a subcomplex at degree {n}")))?;
        diffs.insert(n, restricted);
    }
    let tc = Complex::from_internal(field, c.variance(), &dims, &diffs)?;
    let graded = GradedComplex::new(tc, weights, a.modulus())?;
    Ok(Tau { graded, inclusion, critical })
}

/// `t<=N C` with the canonical projection `C -> t<=N C`.
#[derive(Clone, Debug)]
pub struct Truncation {
    pub complex: Complex,
    pub projection: DegreeMap,
}

/// `C_n` below `N`, `C_N / im d_{N+1}` at `N`, `0` above.
pub fn t_leq_n(c: &Complex, bound: i64) -> Result<Truncation> {
    require_nonnegative(c)?;
    let field = c.field();
    let mut dims = BTreeMap::new();
    let mut diffs = DegreeMap::new();
    let mut projection = DegreeMap::new();
    for n in c.degrees() {
        let dim = c.dim(n);
        if n < bound {
            dims.insert(n, dim);
            projection.insert(n, Matrix::identity(field, dim));
            diffs.insert(n, c.d(n));
        } else if n == bound {
            let b = c.d(n + 1).image_basis();
            let keep = b.extend_with(&Matrix::identity(field, dim));
            let complement = Matrix::identity(field, dim).select_columns(&keep);
            let frame = Matrix::hstack(field, dim, &[&b, &complement]);
            let inv = frame.inverse().expect("completed basis");
            let rows: Vec<usize> = (b.cols()..dim).collect();
            dims.insert(n, keep.len());
            projection.insert(n, inv.select_rows(&rows));
            diffs.insert(n, c.d(n).mul(&complement));
        } else {
            projection.insert(n, Matrix::zeros(field, 0, dim));
        }
    }
    let complex = Complex::from_internal(field, c.variance(), &dims, &diffs)?;
    let projection = projection
        .into_iter()
        .map(|(n, m)| if complex.dim(n) == 0 { (n, Matrix::zeros(field, 0, c.dim(n))) } else { (n, m) })
        .collect();
    Ok(Truncation { complex, projection })
}

/// The homology `H(A)` truncated at `N`, as a zero-differential graded complex.
fn truncated_homology(gh: &GradedHomology, a: &GradedComplex, bound: Option<i64>) -> Result<GradedComplex> {
    let hc = gh.data.as_complex();
    let field = hc.field();
    let dims: BTreeMap<i64, usize> =
        hc.degrees().filter(|&n| bound.is_none_or(|b| n <= b)).map(|n| (n, hc.dim(n))).collect();
    let weights = gh.weights.iter().filter(|(n, _)| dims.contains_key(n)).map(|(&n, w)| (n, w.clone())).collect();
    let c = Complex::from_internal(field, hc.variance(), &dims, &DegreeMap::new())?;
    GradedComplex::new(c, weights, a.modulus())
}

/// `Psi : tau A -> t<=N H(A)` together with `Upsilon : H(A) -> t<=N H(A)`.
#[derive(Clone, Debug)]
pub struct Psi {
    pub tau: Tau,
    pub homology: GradedHomology,
    /// `H(A)` as a zero-differential graded complex.
    pub full: GradedComplex,
    /// `t<=N H(A)`.
    pub target: GradedComplex,
    pub map: DegreeMap,
    pub upsilon: DegreeMap,
}

/// Kernel classes in degree `ceil(p/alpha) <= N` go to their homology
/// class; everything else goes to zero. Requires `alpha`-pure `A`.
pub fn psi_map(a: &GradedComplex, alpha: Rational64, bound: Option<i64>) -> Result<Psi> {
    purity_check(a, alpha)?.into_result()?;
    let tau = truncation_tau(a, alpha)?;
    let gh = graded_homology(a);
    let full = gh.as_graded_complex(a.modulus());
    let target = truncated_homology(&gh, a, bound)?;
    let field = a.complex().field();
    let tc = tau.graded.complex();
    let tg = target.complex();
    let mut map = DegreeMap::new();
    for n in tc.degrees() {
        let rows = tg.dim(n);
        let mut m = Matrix::zeros(field, rows, tc.dim(n));
        if rows > 0 {
            let q = gh.data.projection(n, a.complex().dim(n));
            let image = q.mul(&tau.inclusion[&n]);
            for (j, &crit) in tau.critical[&n].iter().enumerate() {
                if crit {
                    for i in 0..rows {
                        m.set(i, j, image.get(i, j).clone());
                    }
                }
            }
        }
        map.insert(n, m);
    }
    let fc = full.complex();
    let upsilon = fc
        .degrees()
        .map(|n| {
            let m = if tg.dim(n) > 0 { Matrix::identity(field, fc.dim(n)) } else { Matrix::zeros(field, 0, fc.dim(n)) };
            (n, m)
        })
        .collect();
    Ok(Psi { tau, homology: gh, full, target, map, upsilon })
}

#[derive(Clone, Debug, Serialize)]
pub struct MonoidalityReport {
    pub ok: bool,
    pub degrees_checked: Vec<i64>,
    pub first_failure: Option<i64>,
}

/// Compares `Psi(A (x) B) o mu` with `mu o (Psi(A) (x) Psi(B))` on
/// `tau A (x) tau B`, where `mu` is the inclusion into `tau(A (x) B)` on the
/// left and truncated Kunneth on the right.
pub fn check_monoidality(
    a: &GradedComplex,
    b: &GradedComplex,
    alpha: Rational64,
    bound: Option<i64>,
) -> Result<MonoidalityReport> {
    let (ab, layout) = a.tensor(b)?;
    let psi_a = psi_map(a, alpha, bound)?;
    let psi_b = psi_map(b, alpha, bound)?;
    let psi_ab = psi_map(&ab, alpha, bound)?;
    let field = a.complex().field();

    let (ta, tb) = (psi_a.tau.graded.complex(), psi_b.tau.graded.complex());
    let (tt, tt_layout) = tensor_with_layout(ta, tb)?;
    let incl = tensor_maps(
        &psi_a.tau.inclusion,
        &psi_b.tau.inclusion,
        (ta, tb, &tt_layout),
        (a.complex(), b.complex(), &layout),
    );
    let tab = psi_ab.tau.graded.complex();
    let mut mu_tau = DegreeMap::new();
    for n in tt.degrees() {
        let target_incl = block(&psi_ab.tau.inclusion, field, n, ab.complex().dim(n), tab.dim(n));
        let m = target_incl
            .solve_matrix(&block(&incl, field, n, ab.complex().dim(n), tt.dim(n)))
            .ok_or_else(|| Error::Internal(format!("tau A (x) tau B is not inside tau(A (x) B) at {n}")))?;
        mu_tau.insert(n, m);
    }

    let (ha, hb) = (psi_a.target.complex(), psi_b.target.complex());
    let (hh, hh_layout) = tensor_with_layout(ha, hb)?;
    let psi_tensor = tensor_maps(&psi_a.map, &psi_b.map, (ta, tb, &tt_layout), (ha, hb, &hh_layout));
    let hab = psi_ab.target.complex();
    let mut mu_h = DegreeMap::new();
    for n in hh.degrees() {
        let mut m = Matrix::zeros(field, hab.dim(n), hh.dim(n));
        if hab.dim(n) > 0 {
            let q = psi_ab.homology.data.projection(n, ab.complex().dim(n));
            for &(p, r, col) in &hh_layout.summands[&n] {
                let s = psi_a
                    .homology
                    .data
                    .section(p, a.complex().dim(p))
                    .kron(&psi_b.homology.data.section(r, b.complex().dim(r)));
                let mut lifted = Matrix::zeros(field, ab.complex().dim(n), s.cols());
                let off = layout.offset(n, p).expect("summand present in A (x) B");
                lifted.set_block(off, 0, &s);
                m.set_block(0, col, &q.mul(&lifted));
            }
        }
        mu_h.insert(n, m);
    }

    let mut degrees_checked = Vec::new();
    let mut first_failure = None;
    for n in tt.degrees() {
        let left = block(&psi_ab.map, field, n, hab.dim(n), tab.dim(n)).mul(&mu_tau[&n]);
        let right = block(&mu_h, field, n, hab.dim(n), hh.dim(n))
            .mul(&block(&psi_tensor, field, n, hh.dim(n), tt.dim(n)));
        degrees_checked.push(n);
        if left != right && first_failure.is_none() {
            first_failure = Some(n);
        }
    }
    Ok(MonoidalityReport { ok: first_failure.is_none(), degrees_checked, first_failure })
}
