//! Pre-morphisms between complexes with endomorphism and their calculus.
//!
//! A pre-morphism `(f, F)` of degree `n` has components
//! `f_k : C_k -> C'_{k-n}` and `F_k : C_k -> C'_{k-n+1}`, keyed by the
//! source degree `k`. Its differential has degree `n + 1`:
//!
//! ```text
//! D(f, F) = (d f - (-1)^n f d,  F d + (-1)^n d F + s(n) (f phi - phi' f))
//! ```
//!
//! with `s(n) = (-1)^{n(n-1)/2}`. For `n = 0` and `n = -1`, the only degrees
//! where ho-morphisms and homotopies live, `s(n) = (-1)^n`.

use std::collections::BTreeMap;

use super::homology::{homology, induced_unchecked, qiso_report, HomologyData, QisoReport};
use super::{block, check_chain_map, Complex, DegreeMap, EndoComplex};
use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::Matrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreMorphism {
    pub degree: i64,
    pub f: DegreeMap,
    pub big_f: DegreeMap,
}

fn sign_s(field: Field, n: i64) -> Scalar {
    field.sign(n * (n - 1) / 2)
}

impl PreMorphism {
    pub fn zero(src: &Complex, tgt: &Complex, degree: i64) -> Self {
        let f = src.degrees().map(|k| (k, src.zero_block(tgt, k, degree))).collect();
        let big_f = src.degrees().map(|k| (k, src.zero_block(tgt, k, degree - 1))).collect();
        Self { degree, f, big_f }
    }

    pub fn f_block(&self, src: &Complex, tgt: &Complex, k: i64) -> Matrix {
        block(&self.f, src.field(), k, tgt.dim(k - self.degree), src.dim(k))
    }

    pub fn big_f_block(&self, src: &Complex, tgt: &Complex, k: i64) -> Matrix {
        block(&self.big_f, src.field(), k, tgt.dim(k - self.degree + 1), src.dim(k))
    }

    pub fn check_shapes(&self, src: &Complex, tgt: &Complex) -> Result<()> {
        for (name, map, shift) in [("f", &self.f, self.degree), ("F", &self.big_f, self.degree - 1)] {
            for (&k, m) in map {
                if m.shape() != (tgt.dim(k - shift), src.dim(k)) {
                    return Err(Error::Shape(format!(
                        "{name} component at degree {k} is {}x{}, expected {}x{}",
                        m.rows(),
                        m.cols(),
                        tgt.dim(k - shift),
                        src.dim(k)
                    )));
                }
            }
        }
        Ok(())
    }

    fn combine(&self, other: &PreMorphism, src: &Complex, tgt: &Complex, minus: bool) -> PreMorphism {
        assert_eq!(self.degree, other.degree, "pre-morphism degrees differ");
        let op = |a: Matrix, b: Matrix| if minus { a.sub(&b) } else { a.add(&b) };
        let f = src
            .degrees()
            .map(|k| (k, op(self.f_block(src, tgt, k), other.f_block(src, tgt, k))))
            .collect();
        let big_f = src
            .degrees()
            .map(|k| (k, op(self.big_f_block(src, tgt, k), other.big_f_block(src, tgt, k))))
            .collect();
        PreMorphism { degree: self.degree, f, big_f }
    }

    pub fn add(&self, other: &PreMorphism, src: &Complex, tgt: &Complex) -> PreMorphism {
        self.combine(other, src, tgt, false)
    }

    pub fn sub(&self, other: &PreMorphism, src: &Complex, tgt: &Complex) -> PreMorphism {
        self.combine(other, src, tgt, true)
    }

    pub fn is_zero(&self) -> bool {
        self.f.values().chain(self.big_f.values()).all(Matrix::is_zero)
    }

    /// All entries of both components in a fixed order (source degree, f
    /// then F, row-major).
    fn flatten(&self, src: &Complex, tgt: &Complex) -> Vec<Scalar> {
        let mut out = Vec::new();
        for k in src.degrees() {
            out.extend_from_slice(self.f_block(src, tgt, k).entries());
            out.extend_from_slice(self.big_f_block(src, tgt, k).entries());
        }
        out
    }
}

/// `D(f, F)`, a pre-morphism of degree `n + 1`.
pub fn differential(p: &PreMorphism, src: &EndoComplex, tgt: &EndoComplex) -> PreMorphism {
    let (c, c2) = (src.complex(), tgt.complex());
    let field = c.field();
    let n = p.degree;
    let sgn = field.sign(n);
    let s = sign_s(field, n);
    let mut f = DegreeMap::new();
    let mut big_f = DegreeMap::new();
    for k in c.degrees() {
        let fk = p.f_block(c, c2, k);
        let fk1 = p.f_block(c, c2, k - 1);
        let bf = p.big_f_block(c, c2, k);
        let bf1 = p.big_f_block(c, c2, k - 1);
        let dk = c.d(k);
        let f_new = c2.d(k - n).mul(&fk).sub(&fk1.mul(&dk).scale(&sgn));
        let twist = fk.mul(&src.phi(k)).sub(&tgt.phi(k - n).mul(&fk));
        let big_new = bf1
            .mul(&dk)
            .add(&c2.d(k - n + 1).mul(&bf).scale(&sgn))
            .add(&twist.scale(&s));
        f.insert(k, f_new);
        big_f.insert(k, big_new);
    }
    PreMorphism { degree: n + 1, f, big_f }
}

/// A closed degree-0 pre-morphism together with its endpoints.
#[derive(Clone, Debug)]
pub struct HoMorphism {
    source: EndoComplex,
    target: EndoComplex,
    map: PreMorphism,
}

impl HoMorphism {
    pub fn new(source: EndoComplex, target: EndoComplex, map: PreMorphism) -> Result<Self> {
        if map.degree != 0 {
            return Err(Error::NotClosed(format!("degree {} is not 0", map.degree)));
        }
        map.check_shapes(source.complex(), target.complex())?;
        let d = differential(&map, &source, &target);
        if let Some(k) = first_nonzero(&d) {
            return Err(Error::NotClosed(format!(
                "D(f, F) != 0 at degree {}",
                source.complex().variance().internal(k)
            )));
        }
        Ok(Self { source, target, map })
    }

    pub fn identity(x: &EndoComplex) -> Self {
        let c = x.complex();
        let map = PreMorphism {
            degree: 0,
            f: c.identity(),
            big_f: PreMorphism::zero(c, c, 0).big_f,
        };
        Self { source: x.clone(), target: x.clone(), map }
    }

    pub fn source(&self) -> &EndoComplex {
        &self.source
    }

    pub fn target(&self) -> &EndoComplex {
        &self.target
    }

    pub fn map(&self) -> &PreMorphism {
        &self.map
    }

    pub fn f(&self) -> &DegreeMap {
        &self.map.f
    }

    pub fn quasi_iso_report(&self, bound: Option<i64>) -> Result<QisoReport> {
        super::is_n_quasi_iso(self.source.complex(), self.target.complex(), &self.map.f, bound)
    }
}

fn first_nonzero(p: &PreMorphism) -> Option<i64> {
    p.f.iter()
        .chain(p.big_f.iter())
        .filter(|(_, m)| !m.is_zero())
        .map(|(&k, _)| k)
        .min()
}

/// `(f, F) o (g, G) = (f g, F g + f G)`.
pub fn ho_compose(outer: &HoMorphism, inner: &HoMorphism) -> Result<HoMorphism> {
    if inner.target != outer.source {
        return Err(Error::Shape("ho-morphisms are not composable".into()));
    }
    let (x, y, z) = (inner.source.complex(), inner.target.complex(), outer.target.complex());
    let mut f = DegreeMap::new();
    let mut big_f = DegreeMap::new();
    for k in x.degrees() {
        let g = inner.map.f_block(x, y, k);
        let gg = inner.map.big_f_block(x, y, k);
        f.insert(k, outer.map.f_block(y, z, k).mul(&g));
        let a = outer.map.big_f_block(y, z, k).mul(&g);
        let b = outer.map.f_block(y, z, k + 1).mul(&gg);
        big_f.insert(k, a.add(&b));
    }
    HoMorphism::new(inner.source.clone(), outer.target.clone(), PreMorphism { degree: 0, f, big_f })
}

/// A degree `-1` pre-morphism `(h, H)` with `D(h, H) = (g - f, G - F)`, or
/// `None` when the two ho-morphisms are not homotopic.
pub fn find_homotopy(p: &HoMorphism, r: &HoMorphism) -> Result<Option<PreMorphism>> {
    if p.source != r.source || p.target != r.target {
        return Err(Error::Shape("ho-morphisms have different endpoints".into()));
    }
    let (src, tgt) = (&p.source, &p.target);
    let (c, c2) = (src.complex(), tgt.complex());
    let field = c.field();
    let goal = r.map.sub(&p.map, c, c2).flatten(c, c2);

    // one unknown per entry of h_k and H_k
    let mut slots: Vec<(i64, bool, usize, usize)> = Vec::new();
    for k in c.degrees() {
        for (is_big, rows) in [(false, c2.dim(k + 1)), (true, c2.dim(k + 2))] {
            for i in 0..rows {
                for j in 0..c.dim(k) {
                    slots.push((k, is_big, i, j));
                }
            }
        }
    }
    let zero = PreMorphism::zero(c, c2, -1);
    let columns: Vec<Vec<Scalar>> = slots
        .iter()
        .map(|&(k, is_big, i, j)| {
            let mut e = zero.clone();
            let target = if is_big { &mut e.big_f } else { &mut e.f };
            target.get_mut(&k).expect("full blocks").set(i, j, field.one());
            differential(&e, src, tgt).flatten(c, c2)
        })
        .collect();
    let system = Matrix::from_columns(field, goal.len(), &columns);
    let Some(sol) = system.solve(&goal) else {
        return Ok(None);
    };
    let mut h = zero;
    for (&(k, is_big, i, j), v) in slots.iter().zip(sol.particular) {
        let target = if is_big { &mut h.big_f } else { &mut h.f };
        target.get_mut(&k).expect("full blocks").set(i, j, v);
    }
    debug_assert_eq!(differential(&h, src, tgt).flatten(c, c2), goal);
    Ok(Some(h))
}

/// `Cyl_n = C_{n-1} + C'_n + C_n` with
///
/// ```text
///     | -d  0  0 |          | phi  0    0   |
/// D = | -f  d' 0 |,   psi = | -F   phi' 0   |
///     |  1  0  d |          | 0    0    phi |
/// ```
pub fn mapping_cylinder(p: &HoMorphism) -> Result<EndoComplex> {
    let (x, y) = (&p.source, &p.target);
    let (c, c2) = (x.complex(), y.complex());
    let field = c.field();
    let lo = *c.degrees().start().min(c2.degrees().start());
    let hi = (*c.degrees().end() + 1).max(*c2.degrees().end());
    let dims_of = |n: i64| (c.dim(n - 1), c2.dim(n), c.dim(n));
    let dims: BTreeMap<i64, usize> = (lo..=hi).map(|n| (n, c.dim(n - 1) + c2.dim(n) + c.dim(n))).collect();
    let mut diffs = DegreeMap::new();
    let mut endo = DegreeMap::new();
    for n in lo..=hi {
        let (a, b, e) = dims_of(n);
        let (a1, b1, _) = dims_of(n - 1);
        let mut d = Matrix::zeros(field, dims_of(n - 1).0 + b1 + c.dim(n - 1), a + b + e);
        d.set_block(0, 0, &c.d(n - 1).neg());
        d.set_block(a1, 0, &p.map.f_block(c, c2, n - 1).neg());
        d.set_block(a1, a, &c2.d(n));
        d.set_block(a1 + b1, 0, &Matrix::identity(field, a));
        d.set_block(a1 + b1, a + b, &c.d(n));
        diffs.insert(n, d);

        let mut psi = Matrix::zeros(field, a + b + e, a + b + e);
        psi.set_block(0, 0, &x.phi(n - 1));
        psi.set_block(a, 0, &p.map.big_f_block(c, c2, n - 1).neg());
        psi.set_block(a, a, &y.phi(n));
        psi.set_block(a + b, a + b, &x.phi(n));
        endo.insert(n, psi);
    }
    let cyl = Complex::from_internal(field, c.variance(), &dims, &diffs)
        .map_err(|e| Error::Internal(format!("cylinder differential: {e}")))?;
    let endo = endo.into_iter().filter(|(n, _)| cyl.dim(*n) > 0).collect();
    EndoComplex::new(cyl, endo).map_err(|e| Error::Internal(format!("cylinder endomorphism: {e}")))
}

/// `(H, H(phi))` with the ho-morphism `(S, F)` into `X` built from the
/// section `S` of `Z -> H` and `d F = phi S - S H(phi)`.
#[derive(Clone, Debug)]
pub struct HomologyModel {
    pub model: EndoComplex,
    pub map: HoMorphism,
    pub homology: HomologyData,
    pub report: QisoReport,
}

impl HomologyModel {
    pub fn quasi_iso(&self) -> bool {
        self.report.ok
    }
}

pub fn homology_model(x: &EndoComplex) -> Result<HomologyModel> {
    let c = x.complex();
    let hd = homology(c);
    let hc = hd.as_complex();
    let mut f = DegreeMap::new();
    let mut big_f = DegreeMap::new();
    let mut h_phi = DegreeMap::new();
    for n in hc.degrees() {
        let s = hd.section(n, c.dim(n));
        let q = hd.projection(n, c.dim(n));
        let hp = q.mul(&x.phi(n)).mul(&s);
        let rhs = x.phi(n).mul(&s).sub(&s.mul(&hp));
        let w = c.d(n + 1).solve_matrix(&rhs).ok_or_else(|| {
            Error::Internal(format!("phi S - S H(phi) is not a boundary at {}", c.variance().internal(n)))
        })?;
        f.insert(n, s);
        big_f.insert(n, w);
        h_phi.insert(n, hp);
    }
    let model = EndoComplex::new(hc.clone(), h_phi)?;
    let map = HoMorphism::new(model.clone(), x.clone(), PreMorphism { degree: 0, f, big_f })?;
    check_chain_map(&hc, c, map.f())?;
    let hm = homology(&hc);
    let induced = induced_unchecked(&hc, c, map.f(), &hm, &hd);
    if let Some((&n, _)) = induced.iter().find(|(_, m)| !m.is_identity()) {
        return Err(Error::Internal(format!("H(S) is not the identity at {n}")));
    }
    let report = qiso_report(c.variance(), &induced, &hm, &hd, None);
    Ok(HomologyModel { model, map, homology: hd, report })
}
