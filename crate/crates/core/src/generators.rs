//! Built-in inputs: projective spaces, the multiplicative group, Arnold
//! algebras of configuration spaces, and seeded random pure or Tate
//! instances.
//!
//! Weight conventions. Over `F_l` weights are Tate weights (the eigenvalue
//! `q^k` has weight `k`, modulus `h`). Over `Q` they are Weil weights
//! (`q^k` has weight `2k`, modulus `Z`), which doubles every advertised `α`.

use std::collections::BTreeMap;

use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complexes::{Complex, DegreeMap, EndoComplex, Variance};
use crate::dga::{algebra_purity, validate, BasisElement, Sparse, WeightedDga};
use crate::error::{Error, Result};
use crate::field::{Field, FieldConfig, Scalar};
use crate::linalg::{random_scalar, Matrix};
use crate::weights::{pure_weight, purity_check, GradedComplex, Modulus};

/// A weighted dg-algebra with its Frobenius-type endomorphism and the slope
/// it is pure of.
#[derive(Clone, Debug)]
pub struct Example {
    pub algebra: WeightedDga,
    /// Global matrix of `φ` on the algebra.
    pub phi: Matrix,
    pub alpha: Rational64,
}

impl Example {
    /// The underlying cochain complex with `φ` as an endomorphism.
    pub fn endo_complex(&self) -> Result<EndoComplex> {
        let a = &self.algebra;
        EndoComplex::new(a.complex(), WeightedDga::degree_blocks(a, a, &self.phi))
    }
}

fn modulus_for(cfg: &FieldConfig) -> Modulus {
    if cfg.characteristic == 0 {
        Modulus::Integers
    } else {
        Modulus::Cyclic(cfg.h)
    }
}

/// Weight of the eigenvalue `q^k` in the field's convention.
fn weight_of_power(cfg: &FieldConfig, k: i64) -> i64 {
    match modulus_for(cfg) {
        Modulus::Integers => 2 * k,
        m => m.reduce(k),
    }
}

fn weil_factor(cfg: &FieldConfig) -> i64 {
    if cfg.characteristic == 0 {
        2
    } else {
        1
    }
}

/// `H^*(P^n) = k[x]/x^{n+1}` with `|x| = 2` and `φ = q^i` on `x^i`.
/// Pure of slope `1/2` over `F_l`, `1` over `Q`.
pub fn projective_space(n: usize, cfg: &FieldConfig) -> Result<Example> {
    if n == 0 {
        return Err(Error::Parse("projective space needs n >= 1".into()));
    }
    let cfg = cfg.validated()?;
    let field = cfg.field();
    let modulus = modulus_for(&cfg);
    let basis = (0..=n)
        .map(|i| BasisElement {
            label: match i {
                0 => "1".into(),
                1 => "x".into(),
                _ => format!("x^{i}"),
            },
            degree: 2 * i as i64,
            weight: weight_of_power(&cfg, i as i64),
        })
        .collect();
    let mut mult = BTreeMap::new();
    for i in 1..=n {
        for j in 1..=n - i {
            mult.insert((i, j), vec![(i + j, field.one())]);
        }
    }
    let algebra = WeightedDga::from_sparse(field, modulus, basis, 0, mult, Matrix::zeros(field, n + 1, n + 1))?;
    let diag: Vec<Scalar> = (0..=n).map(|i| cfg.q_power(i as i64)).collect();
    let alpha = Rational64::new(weil_factor(&cfg), 2);
    Ok(Example { algebra, phi: Matrix::diagonal(field, &diag), alpha })
}

/// `H^*(G_m)`: `1` and `e` in degree 1 with `φ(e) = qe`. Pure of slope 1
/// over `F_l` and 2 over `Q`; not simply connected.
pub fn gm(cfg: &FieldConfig) -> Result<Example> {
    let cfg = cfg.validated()?;
    let field = cfg.field();
    let basis = vec![
        BasisElement { label: "1".into(), degree: 0, weight: 0 },
        BasisElement { label: "e".into(), degree: 1, weight: weight_of_power(&cfg, 1) },
    ];
    let algebra = WeightedDga::from_sparse(field, modulus_for(&cfg), basis, 0, BTreeMap::new(), Matrix::zeros(field, 2, 2))?;
    let phi = Matrix::diagonal(field, &[field.one(), cfg.q_power(1)]);
    Ok(Example { algebra, phi, alpha: Rational64::from_integer(weil_factor(&cfg)) })
}

type Pair = (usize, usize);

/// Normal form of a product of `ω_{ij}` (odd degree, `i < j`) in the
/// basis of monomials with strictly increasing `j`.
fn arnold_normal_form(mono: Vec<Pair>) -> Vec<(i64, Vec<Pair>)> {
    let mut out: BTreeMap<Vec<Pair>, i64> = BTreeMap::new();
    let mut stack = vec![(1i64, mono)];
    while let Some((c, mut m)) = stack.pop() {
        let mut sign = c;
        for pass in 0..m.len() {
            for t in 0..m.len().saturating_sub(1 + pass) {
                if (m[t].1, m[t].0) > (m[t + 1].1, m[t + 1].0) {
                    m.swap(t, t + 1);
                    sign = -sign;
                }
            }
        }
        if m.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        match m.windows(2).position(|w| w[0].1 == w[1].1) {
            None => *out.entry(m).or_insert(0) += sign,
            Some(t) => {
                // ω_aj ω_bj = ω_ab ω_bj - ω_ab ω_aj
                let (a, b, j) = (m[t].0, m[t + 1].0, m[t].1);
                let mut first = m.clone();
                first[t] = (a, b);
                first[t + 1] = (b, j);
                let mut second = m;
                second[t] = (a, b);
                second[t + 1] = (a, j);
                stack.push((sign, first));
                stack.push((-sign, second));
            }
        }
    }
    out.into_iter().filter(|(_, c)| *c != 0).map(|(m, c)| (c, m)).collect()
}

/// Monomials `ω_{i_1 j_1} ... ω_{i_k j_k}` with `j_1 < ... < j_k`.
fn arnold_basis(points: usize) -> Vec<Vec<Pair>> {
    let mut out: Vec<Vec<Pair>> = vec![Vec::new()];
    for j in 2..=points {
        let current = out.clone();
        for m in current {
            for i in 1..j {
                let mut next = m.clone();
                next.push((i, j));
                out.push(next);
            }
        }
    }
    out.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    out
}

/// Cohomology of the configuration space of `points` points in `C^d`:
/// generators `ω_ij` in degree `2d - 1`, weight `d` per factor. Pure of
/// slope `d/(2d-1)` over `F_l`, twice that over `Q`.
pub fn configuration_arnold(points: usize, d: usize, cfg: &FieldConfig) -> Result<Example> {
    if points < 2 || d < 1 {
        return Err(Error::Parse("configuration spaces need at least 2 points and d >= 1".into()));
    }
    let cfg = cfg.validated()?;
    let field = cfg.field();
    let monos = arnold_basis(points);
    let index: BTreeMap<&Vec<Pair>, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let deg = 2 * d as i64 - 1;
    let basis: Vec<BasisElement> = monos
        .iter()
        .map(|m| BasisElement {
            label: if m.is_empty() {
                "1".into()
            } else {
                m.iter().map(|(i, j)| format!("w{i}{j}")).collect::<Vec<_>>().join("*")
            },
            degree: deg * m.len() as i64,
            weight: weight_of_power(&cfg, (d * m.len()) as i64),
        })
        .collect();
    let mut mult: BTreeMap<(usize, usize), Sparse> = BTreeMap::new();
    for (i, u) in monos.iter().enumerate().skip(1) {
        for (j, v) in monos.iter().enumerate().skip(1) {
            if u.len() + v.len() >= points {
                continue;
            }
            let nf = arnold_normal_form([u.as_slice(), v.as_slice()].concat());
            let sparse: Sparse = nf.into_iter().map(|(c, m)| (index[&m], field.from_i64(c))).collect();
            if !sparse.is_empty() {
                mult.insert((i, j), sparse);
            }
        }
    }
    let dim = monos.len();
    let algebra =
        WeightedDga::from_sparse(field, modulus_for(&cfg), basis, 0, mult, Matrix::zeros(field, dim, dim))?;
    let phi_diag: Vec<Scalar> = monos.iter().map(|m| cfg.q_power((d * m.len()) as i64)).collect();
    let alpha = Rational64::new(weil_factor(&cfg) * d as i64, deg);
    Ok(Example { algebra, phi: Matrix::diagonal(field, &phi_diag), alpha })
}

/// `H^*(P^n)` plus an acyclic square-zero pair `u -> w` (degrees 1, 2) on
/// which `φ` has a non-Tate eigenvalue, with `φ(x) = qx + w`. All stored
/// weights are 0 (modulus 1): the weights must come from `φ`.
pub fn projective_cochains(n: usize, cfg: &FieldConfig) -> Result<(WeightedDga, Matrix)> {
    let cfg = cfg.validated()?;
    let field = cfg.field();
    let p = projective_space(n, &cfg)?;
    // basis: 1, u, x, w, x^2, ..., x^n
    let mut labels: Vec<(String, i64)> = vec![("1".into(), 0), ("u".into(), 1), ("x".into(), 2), ("w".into(), 2)];
    for i in 2..=n {
        labels.push((format!("x^{i}"), 2 * i as i64));
    }
    let pos_x = |i: usize| if i == 0 { 0 } else if i == 1 { 2 } else { i + 2 };
    let dim = labels.len();
    let basis = labels.iter().map(|(l, d)| BasisElement { label: l.clone(), degree: *d, weight: 0 }).collect();
    let mut mult = BTreeMap::new();
    for i in 1..=n {
        for j in 1..=n - i {
            mult.insert((pos_x(i), pos_x(j)), vec![(pos_x(i + j), field.one())]);
        }
    }
    let mut diff = Matrix::zeros(field, dim, dim);
    diff.set(3, 1, field.one());
    let algebra = WeightedDga::from_sparse(field, Modulus::Cyclic(1), basis, 0, mult, diff)?;
    let c = non_tate_scalar(&cfg);
    let mut phi = Matrix::zeros(field, dim, dim);
    for i in 0..=n {
        phi.set(pos_x(i), pos_x(i), p.phi.get(i, i).clone());
    }
    phi.set(1, 1, c.clone());
    phi.set(3, 3, c);
    phi.set(3, 2, field.one());
    Ok((algebra, phi))
}

/// A unit that is not a power of `q` when one exists (else `q`).
fn non_tate_scalar(cfg: &FieldConfig) -> Scalar {
    let field = cfg.field();
    if cfg.characteristic == 0 {
        return field.from_u64(if cfg.q == 1 { 2 } else { cfg.q + 1 });
    }
    let powers: Vec<Scalar> = (0..cfg.h as i64).map(|k| cfg.q_power(k)).collect();
    (2..cfg.characteristic)
        .map(|v| field.from_u64(v))
        .find(|s| !powers.contains(s))
        .unwrap_or_else(|| cfg.q_power(1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeBounds {
    pub max_degree: i64,
    /// Largest dimension of a planted homology summand.
    pub max_dim: usize,
    pub acyclic_pairs: usize,
}

impl Default for SizeBounds {
    fn default() -> Self {
        Self { max_degree: 6, max_dim: 2, acyclic_pairs: 3 }
    }
}

fn random_weight<R: Rng>(rng: &mut R, modulus: Modulus, max_degree: i64) -> i64 {
    match modulus {
        Modulus::Cyclic(m) => rng.gen_range(0..m as i64),
        Modulus::Integers => rng.gen_range(0..=2 * max_degree.max(1)),
    }
}

fn random_nonzero<R: Rng>(field: Field, rng: &mut R) -> Scalar {
    loop {
        let s = random_scalar(field, rng);
        if !field.is_zero(&s) {
            return s;
        }
    }
}

/// Random invertible matrix acting within each weight class of `weights`.
fn weight_block_change<R: Rng>(field: Field, weights: &[i64], rng: &mut R) -> Matrix {
    let n = weights.len();
    let mut p = Matrix::zeros(field, n, n);
    let mut classes: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, &w) in weights.iter().enumerate() {
        classes.entry(w).or_default().push(i);
    }
    for idx in classes.values() {
        let block = Matrix::random_invertible(field, idx.len(), rng);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                p.set(i, j, block.get(a, b).clone());
            }
        }
    }
    p
}

/// A homological α-pure graded complex in degrees `0..=max_degree`: pure
/// homology first, then acyclic weight-homogeneous pairs, then a random
/// change of basis inside every `(degree, weight)` summand.
pub fn random_pure_complex(
    seed: u64,
    field: Field,
    alpha: Rational64,
    modulus: Modulus,
    bounds: SizeBounds,
) -> Result<GradedComplex> {
    modulus.check_alpha(alpha)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = bounds.max_degree.max(0);
    let mut weights: BTreeMap<i64, Vec<i64>> = (0..=top).map(|n| (n, Vec::new())).collect();
    for n in 0..=top {
        if let Some(p) = pure_weight(n, alpha, modulus) {
            let k = rng.gen_range(0..=bounds.max_dim);
            weights.get_mut(&n).expect("degree present").extend(std::iter::repeat_n(p, k));
        }
    }
    // (source degree, source index, target index, coefficient)
    let mut edges = Vec::new();
    if top >= 1 {
        for _ in 0..bounds.acyclic_pairs {
            let n = rng.gen_range(1..=top);
            let w = random_weight(&mut rng, modulus, top);
            let s = weights[&n].len();
            let t = weights[&(n - 1)].len();
            weights.get_mut(&n).expect("degree present").push(w);
            weights.get_mut(&(n - 1)).expect("degree present").push(w);
            edges.push((n, s, t, random_nonzero(field, &mut rng)));
        }
    }
    let dims: BTreeMap<i64, usize> = weights.iter().map(|(&n, w)| (n, w.len())).collect();
    let mut diffs: BTreeMap<i64, Matrix> = (1..=top).map(|n| (n, Matrix::zeros(field, dims[&(n - 1)], dims[&n]))).collect();
    for (n, s, t, c) in edges {
        diffs.get_mut(&n).expect("degree present").set(t, s, c);
    }
    let changes: BTreeMap<i64, Matrix> =
        weights.iter().map(|(&n, w)| (n, weight_block_change(field, w, &mut rng))).collect();
    for n in 1..=top {
        let inv = changes[&n].inverse().expect("invertible by construction");
        let d = changes[&(n - 1)].mul(&diffs[&n]).mul(&inv);
        diffs.insert(n, d);
    }
    let complex = Complex::new(field, Variance::Homological, &dims, &diffs)?;
    let weights: BTreeMap<i64, Vec<i64>> = weights.into_iter().filter(|(_, w)| !w.is_empty()).collect();
    let g = GradedComplex::new(complex, weights, modulus)?;
    purity_check(&g, alpha)?.into_result()?;
    Ok(g)
}

/// A simply connected α-pure weighted dg-algebra: a truncated polynomial
/// algebra on even generators of pure weight, a square-zero acyclic part,
/// and a random change of basis inside every `(degree, weight)` summand.
pub fn random_pure_dga(
    seed: u64,
    field: Field,
    alpha: Rational64,
    modulus: Modulus,
    bounds: SizeBounds,
) -> Result<WeightedDga> {
    modulus.check_alpha(alpha)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = bounds.max_degree.max(0);
    let mut candidates: Vec<i64> =
        (1..=top / 2).map(|k| 2 * k).filter(|&n| pure_weight(n, alpha, modulus).is_some()).collect();
    candidates.shuffle(&mut rng);
    let count = if candidates.is_empty() { 0 } else { rng.gen_range(1..=candidates.len().min(2)) };
    let mut gens: Vec<i64> = candidates[..count].to_vec();
    gens.sort_unstable();
    // monomials as exponent vectors of degree <= top
    let mut monos: Vec<Vec<u32>> = vec![vec![0; gens.len()]];
    let mut frontier = monos.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for m in &frontier {
            for g in 0..gens.len() {
                let mut e = m.clone();
                e[g] += 1;
                let deg: i64 = e.iter().zip(&gens).map(|(&a, &d)| a as i64 * d).sum();
                if deg <= top && !monos.contains(&e) && !next.contains(&e) {
                    next.push(e);
                }
            }
        }
        monos.extend(next.iter().cloned());
        frontier = next;
    }
    let mono_degree = |e: &Vec<u32>| -> i64 { e.iter().zip(&gens).map(|(&a, &d)| a as i64 * d).sum() };
    // (label, degree, weight, kind): kind 0 monomial, 1 source u, 2 target w
    let mut elems: Vec<(String, i64, i64, usize, usize)> = monos
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let n = mono_degree(e);
            let label = if n == 0 {
                "1".into()
            } else {
                e.iter()
                    .enumerate()
                    .filter(|(_, &a)| a > 0)
                    .map(|(g, &a)| if a == 1 { format!("y{g}") } else { format!("y{g}^{a}") })
                    .collect::<Vec<_>>()
                    .join("*")
            };
            (label, n, pure_weight(n, alpha, modulus).expect("pure by choice of generators"), 0, i)
        })
        .collect();
    let mut pair_coeffs = Vec::new();
    if top >= 3 {
        for k in 0..bounds.acyclic_pairs {
            let n = rng.gen_range(2..top);
            let w = random_weight(&mut rng, modulus, top);
            elems.push((format!("u{k}"), n, w, 1, k));
            elems.push((format!("dw{k}"), n + 1, w, 2, k));
            pair_coeffs.push(random_nonzero(field, &mut rng));
        }
    }
    elems.sort_by_key(|e| e.1);
    let position = |kind: usize, id: usize| elems.iter().position(|e| e.3 == kind && e.4 == id).expect("present");
    let dim = elems.len();
    let basis: Vec<BasisElement> =
        elems.iter().map(|(l, n, w, _, _)| BasisElement { label: l.clone(), degree: *n, weight: *w }).collect();
    let mut mult = BTreeMap::new();
    for (i, a) in monos.iter().enumerate() {
        for (j, b) in monos.iter().enumerate() {
            let e: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
            if i == 0 || j == 0 || mono_degree(&e) > top {
                continue;
            }
            let k = monos.iter().position(|m| *m == e).expect("closed under products below top");
            mult.insert((position(0, i), position(0, j)), vec![(position(0, k), field.one())]);
        }
    }
    let mut diff = Matrix::zeros(field, dim, dim);
    for (k, c) in pair_coeffs.iter().enumerate() {
        diff.set(position(2, k), position(1, k), c.clone());
    }
    let unit = position(0, 0);
    let plain = WeightedDga::from_sparse(field, modulus, basis, unit, mult, diff)?;
    // basis change inside each (degree, weight) summand, fixing the unit
    let mut p = Matrix::zeros(field, dim, dim);
    let mut summands: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (i, b) in plain.basis().iter().enumerate() {
        summands.entry((b.degree, b.weight)).or_default().push(i);
    }
    for idx in summands.values() {
        let block = if idx.contains(&unit) {
            Matrix::identity(field, idx.len())
        } else {
            Matrix::random_invertible(field, idx.len(), &mut rng)
        };
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                p.set(i, j, block.get(a, b).clone());
            }
        }
    }
    let labels = plain.basis().iter().map(|b| b.label.clone()).collect();
    let a = plain.change_basis(&p, labels)?;
    validate(&a).into_result()?;
    algebra_purity(&a, alpha)?.into_result()?;
    Ok(a)
}

/// A planted Tate endo-complex together with the planted summand dimensions.
#[derive(Clone, Debug)]
pub struct RandomTate {
    pub complex: EndoComplex,
    /// `(own degree, weight) -> dimension` of the chain-level summands.
    pub planted: BTreeMap<(i64, i64), usize>,
    /// Dimensions with an eigenvalue outside the powers of `q`.
    pub contamination: usize,
}

/// Homological complex in degrees `0..=max_degree` whose endomorphism has
/// Jordan blocks with eigenvalues `q^k`, conjugated degreewise by random
/// invertible matrices. With `contaminate`, one extra acyclic pair carries
/// an eigenvalue that is not a power of `q` (when `F_l` has one).
pub fn random_tate(seed: u64, cfg: &FieldConfig, bounds: SizeBounds, contaminate: bool) -> Result<RandomTate> {
    let cfg = cfg.validated()?;
    let field = cfg.field();
    if cfg.characteristic == 0 {
        return Err(Error::InvalidField("random Tate complexes are generated over F_l".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let top = bounds.max_degree.max(0);
    // per degree: list of (eigenvalue, jordan size, weight or None)
    let mut blocks: BTreeMap<i64, Vec<(Scalar, usize, Option<i64>)>> = (0..=top).map(|n| (n, Vec::new())).collect();
    let mut planted: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    let mut edges = Vec::new();
    for n in 0..=top {
        for _ in 0..rng.gen_range(0..=bounds.max_dim) {
            let k = rng.gen_range(0..cfg.h as i64);
            let size = rng.gen_range(1..=2);
            blocks.get_mut(&n).expect("present").push((cfg.q_power(k), size, Some(k)));
            *planted.entry((n, k)).or_insert(0) += size;
        }
    }
    let mut pair = |n: i64, lambda: Scalar, size: usize, weight: Option<i64>, blocks: &mut BTreeMap<i64, Vec<_>>| {
        let s = blocks[&n].len();
        let t = blocks[&(n - 1)].len();
        blocks.get_mut(&n).expect("present").push((lambda.clone(), size, weight));
        blocks.get_mut(&(n - 1)).expect("present").push((lambda, size, weight));
        edges.push((n, s, t));
    };
    if top >= 1 {
        for _ in 0..bounds.acyclic_pairs {
            let n = rng.gen_range(1..=top);
            let k = rng.gen_range(0..cfg.h as i64);
            let size = rng.gen_range(1..=2);
            pair(n, cfg.q_power(k), size, Some(k), &mut blocks);
            *planted.entry((n, k)).or_insert(0) += size;
            *planted.entry((n - 1, k)).or_insert(0) += size;
        }
    }
    let mut contamination = 0;
    let bad = non_tate_scalar(&cfg);
    let powers: Vec<Scalar> = (0..cfg.h as i64).map(|k| cfg.q_power(k)).collect();
    if contaminate && top >= 1 && !powers.contains(&bad) {
        pair(1, bad, 1, None, &mut blocks);
        contamination = 2;
    }
    // assemble block-diagonal φ and d between matching blocks
    let offsets = |list: &Vec<(Scalar, usize, Option<i64>)>| -> Vec<usize> {
        list.iter().scan(0, |acc, b| {
            let o = *acc;
            *acc += b.1;
            Some(o)
        }).collect()
    };
    let dims: BTreeMap<i64, usize> = blocks.iter().map(|(&n, l)| (n, l.iter().map(|b| b.1).sum())).collect();
    let mut phis: BTreeMap<i64, Matrix> = BTreeMap::new();
    for (&n, list) in &blocks {
        let mut m = Matrix::zeros(field, dims[&n], dims[&n]);
        for (b, o) in list.iter().zip(offsets(list)) {
            for i in 0..b.1 {
                m.set(o + i, o + i, b.0.clone());
                if i + 1 < b.1 {
                    m.set(o + i, o + i + 1, field.one());
                }
            }
        }
        phis.insert(n, m);
    }
    let mut diffs: BTreeMap<i64, Matrix> = (1..=top).map(|n| (n, Matrix::zeros(field, dims[&(n - 1)], dims[&n]))).collect();
    for (n, s, t) in edges {
        let so = offsets(&blocks[&n])[s];
        let to = offsets(&blocks[&(n - 1)])[t];
        let c = random_nonzero(field, &mut rng);
        for i in 0..blocks[&n][s].1 {
            diffs.get_mut(&n).expect("present").set(to + i, so + i, c.clone());
        }
    }
    let changes: BTreeMap<i64, Matrix> =
        dims.iter().map(|(&n, &d)| (n, Matrix::random_invertible(field, d, &mut rng))).collect();
    let inverses: BTreeMap<i64, Matrix> =
        changes.iter().map(|(&n, p)| (n, p.inverse().expect("invertible by construction"))).collect();
    for n in 1..=top {
        diffs.insert(n, changes[&(n - 1)].mul(&diffs[&n]).mul(&inverses[&n]));
    }
    let endo: DegreeMap = phis.iter().map(|(&n, m)| (n, changes[&n].mul(m).mul(&inverses[&n]))).collect();
    let complex = Complex::new(field, Variance::Homological, &dims, &diffs)?;
    let endo: DegreeMap = endo.into_iter().filter(|(n, _)| complex.dim(*n) > 0).collect();
    Ok(RandomTate { complex: EndoComplex::new(complex, endo)?, planted, contamination })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::{cohomology_algebra, connectivity};
    use crate::weights::{grade_endo_complex, tate_defect};

    fn cfg7() -> FieldConfig {
        FieldConfig::new(7, 2).unwrap()
    }

    #[test]
    fn projective_line_has_two_basis_elements() {
        let p = projective_space(1, &cfg7()).unwrap();
        let w: Vec<i64> = p.algebra.basis().iter().map(|b| b.weight).collect();
        assert_eq!(w, vec![0, 1]);
        assert!(algebra_purity(&p.algebra, p.alpha).unwrap().pure);
        assert!(p.endo_complex().is_ok());
    }

    #[test]
    fn rational_projective_space_uses_weil_weights() {
        let p = projective_space(2, &FieldConfig::rational(3).unwrap()).unwrap();
        let w: Vec<i64> = p.algebra.basis().iter().map(|b| b.weight).collect();
        assert_eq!(w, vec![0, 2, 4]);
        assert_eq!(p.alpha, Rational64::from_integer(1));
        assert!(algebra_purity(&p.algebra, p.alpha).unwrap().pure);
    }

    #[test]
    fn gm_is_pure_and_not_simply_connected() {
        let g = gm(&cfg7()).unwrap();
        assert!(algebra_purity(&g.algebra, g.alpha).unwrap().pure);
        assert!(!connectivity(&g.algebra).unwrap().simply_connected);
    }

    #[test]
    fn arnold_relation_holds() {
        // ω12 ω23 + ω23 ω31 + ω31 ω12 = 0 with ω31 = ω13
        let terms = [vec![(1, 2), (2, 3)], vec![(2, 3), (1, 3)], vec![(1, 3), (1, 2)]];
        let mut total: BTreeMap<Vec<Pair>, i64> = BTreeMap::new();
        for t in terms {
            for (c, m) in arnold_normal_form(t) {
                *total.entry(m).or_insert(0) += c;
            }
        }
        assert!(total.values().all(|&c| c == 0));
    }

    #[test]
    fn configuration_algebra_is_valid_and_pure() {
        for d in 1..=2 {
            let c = configuration_arnold(4, d, &FieldConfig::new(5, 2).unwrap()).unwrap();
            assert!(validate(&c.algebra).ok);
            assert!(algebra_purity(&c.algebra, c.alpha).unwrap().pure);
            let betti = cohomology_algebra(&c.algebra).unwrap().betti();
            let k = 2 * d as i64 - 1;
            assert_eq!(betti, BTreeMap::from([(0, 1), (k, 6), (2 * k, 11), (3 * k, 6)]));
        }
    }

    #[test]
    fn random_pure_complexes_are_pure_and_deterministic() {
        let f = Field::Prime(7);
        for seed in 0..10 {
            let a = random_pure_complex(seed, f, Rational64::new(1, 2), Modulus::Cyclic(3), SizeBounds::default()).unwrap();
            let b = random_pure_complex(seed, f, Rational64::new(1, 2), Modulus::Cyclic(3), SizeBounds::default()).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn random_pure_dgas_validate() {
        for seed in 0..10 {
            let a = random_pure_dga(seed, Field::Prime(7), Rational64::new(1, 2), Modulus::Cyclic(3), SizeBounds::default())
                .unwrap();
            assert!(connectivity(&a).unwrap().simply_connected);
        }
    }

    #[test]
    fn random_tate_recovers_planted_dimensions() {
        let cfg = cfg7();
        for seed in 0..10 {
            let t = random_tate(seed, &cfg, SizeBounds::default(), false).unwrap();
            let g = grade_endo_complex(&t.complex, &cfg).unwrap();
            let dims: BTreeMap<(i64, i64), usize> = g.summand_dims().into_iter().filter(|(_, d)| *d > 0).collect();
            assert_eq!(dims, t.planted);
            let bad = random_tate(seed, &cfg, SizeBounds::default(), true).unwrap();
            assert_eq!(tate_defect(&bad.complex, &cfg), bad.contamination);
        }
    }
}
