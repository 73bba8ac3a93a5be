//! Formality witnesses: zig-zags of explicit maps between complexes or
//! dg-algebras, each claimed to be an `N`-quasi-isomorphism.
//!
//! Stage `i` joins `nodes[i]` and `nodes[i + 1]`; a forward stage maps
//! `nodes[i] -> nodes[i + 1]`, a backward one `nodes[i + 1] -> nodes[i]`.
//! [`verify`] trusts nothing stored besides the objects and the maps.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::complexes::{check_chain_map, homology, induced_map, is_n_quasi_iso, Complex, DegreeMap, QisoReport};
use crate::dga::WeightedDga;
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::linalg::Matrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Object {
    Complex(Complex),
    Algebra(WeightedDga),
}

impl Object {
    pub fn complex(&self) -> Complex {
        match self {
            Object::Complex(c) => c.clone(),
            Object::Algebra(a) => a.complex(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub label: String,
    pub object: Object,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub label: String,
    pub direction: Direction,
    /// Keyed by internal degree of the source complex.
    pub map: DegreeMap,
    /// `None` claims a quasi-isomorphism in all degrees.
    pub claimed_n: Option<i64>,
    /// Claimed verdicts, re-derived by [`verify`].
    pub verified_n: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalityWitness {
    pub nodes: Vec<Node>,
    pub stages: Vec<Stage>,
    pub overall_n: Option<i64>,
    /// The node whose homology basis the last node records.
    pub anchor: usize,
    pub metadata: BTreeMap<String, String>,
}

impl FormalityWitness {
    pub fn new(first: Node) -> Self {
        Self { nodes: vec![first], stages: Vec::new(), overall_n: None, anchor: 0, metadata: BTreeMap::new() }
    }

    pub fn push(&mut self, stage: Stage, node: Node) {
        self.stages.push(stage);
        self.nodes.push(node);
    }

    pub fn last(&self) -> &Node {
        self.nodes.last().expect("a witness has at least one node")
    }

    /// Stage endpoints in map order.
    pub fn endpoints(&self, i: usize) -> (&Node, &Node) {
        match self.stages[i].direction {
            Direction::Forward => (&self.nodes[i], &self.nodes[i + 1]),
            Direction::Backward => (&self.nodes[i + 1], &self.nodes[i]),
        }
    }

    /// Re-runs [`verify`] and stores the verdicts; fails if any stage does
    /// not meet `overall_n`.
    pub fn certify(mut self) -> Result<Self> {
        let report = check(&self, false)?;
        for (s, v) in self.stages.iter_mut().zip(&report.stages) {
            s.verified_n = v.verified_n;
        }
        match report.first_failure {
            None => Ok(self),
            Some(msg) => Err(Error::Internal(format!("witness does not verify: {msg}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StageVerdict {
    pub index: usize,
    pub label: String,
    pub chain_map: bool,
    pub multiplicative: Option<bool>,
    pub qiso: Option<QisoReport>,
    pub verified_n: Option<i64>,
    pub stored_matches: bool,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub ok: bool,
    pub overall_n: Option<i64>,
    pub stages: Vec<StageVerdict>,
    pub composite_identity: bool,
    pub first_failure: Option<String>,
}

/// `a >= b` where `None` is infinity.
fn at_least(a: Option<i64>, b: Option<i64>) -> bool {
    match (a, b) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(x), Some(y)) => x >= y,
    }
}

/// The degree (own) up to which a stage is a quasi-isomorphism, given a claim.
fn verified_bound(report: &QisoReport) -> Option<i64> {
    match report.first_failure {
        None => report.bound,
        Some(d) => Some(d - 1),
    }
}

fn multiplicative(src: &WeightedDga, tgt: &WeightedDga, map: &DegreeMap) -> bool {
    if src.field() != tgt.field() {
        return false;
    }
    let g = WeightedDga::global_map(src, tgt, map);
    if g.mul_vec(&src.unit_vector()) != tgt.unit_vector() {
        return false;
    }
    let top = src.top_degree().min(tgt.top_degree());
    let images: Vec<Vec<Scalar>> = (0..src.dim()).map(|i| g.column(i)).collect();
    for i in 0..src.dim() {
        for j in 0..src.dim() {
            if src.basis()[i].degree + src.basis()[j].degree > top {
                continue;
            }
            let lhs = g.mul_vec(&src.mul(&src.basis_vector(i), &src.basis_vector(j)));
            if lhs != tgt.mul(&images[i], &images[j]) {
                return false;
            }
        }
    }
    true
}

pub fn verify(w: &FormalityWitness) -> Result<WitnessReport> {
    check(w, true)
}

fn check(w: &FormalityWitness, compare_stored: bool) -> Result<WitnessReport> {
    if w.nodes.len() != w.stages.len() + 1 {
        return Err(Error::Shape("a witness needs exactly one more node than stages".into()));
    }
    if w.anchor >= w.nodes.len() {
        return Err(Error::Shape("anchor is out of range".into()));
    }
    let complexes: Vec<Complex> = w.nodes.iter().map(|n| n.object.complex()).collect();
    let mut stages = Vec::new();
    let mut first_failure = None;
    for (i, st) in w.stages.iter().enumerate() {
        let (s, t) = match st.direction {
            Direction::Forward => (i, i + 1),
            Direction::Backward => (i + 1, i),
        };
        let chain = check_chain_map(&complexes[s], &complexes[t], &st.map).is_ok();
        let mult = match (&w.nodes[s].object, &w.nodes[t].object) {
            (Object::Algebra(a), Object::Algebra(b)) => Some(multiplicative(a, b, &st.map)),
            _ => None,
        };
        let qiso = if chain { Some(is_n_quasi_iso(&complexes[s], &complexes[t], &st.map, st.claimed_n)?) } else { None };
        let verified_n = qiso.as_ref().and_then(verified_bound);
        let meets = qiso.is_some() && at_least(verified_n, w.overall_n);
        let stored_matches = !compare_stored || st.verified_n == verified_n;
        let ok = chain && mult != Some(false) && meets && stored_matches;
        if !ok && first_failure.is_none() {
            let why = if !chain {
                "not a chain map"
            } else if mult == Some(false) {
                "not multiplicative"
            } else if !meets {
                "quasi-isomorphism range below the overall N"
            } else {
                "stored verdict differs from the recomputed one"
            };
            first_failure = Some(format!("stage {i} ({}): {why}", st.label));
        }
        stages.push(StageVerdict {
            index: i,
            label: st.label.clone(),
            chain_map: chain,
            multiplicative: mult,
            qiso,
            verified_n,
            stored_matches,
            ok,
        });
    }
    let composite_identity = first_failure.is_none() && composite_is_identity(w, &complexes)?;
    if first_failure.is_none() && !composite_identity {
        first_failure = Some("the composite does not induce the identity on homology".into());
    }
    Ok(WitnessReport { ok: first_failure.is_none(), overall_n: w.overall_n, stages, composite_identity, first_failure })
}

/// From the anchor to the last node, composes `H(f)` for forward stages and
/// `H(f)^{-1}` for backward ones in own degrees up to `overall_n`.
fn composite_is_identity(w: &FormalityWitness, complexes: &[Complex]) -> Result<bool> {
    let last = complexes.last().expect("nonempty");
    if !last.has_zero_differential() {
        return Ok(false);
    }
    let hs: Vec<_> = complexes.iter().map(homology).collect();
    let anchor = &complexes[w.anchor];
    let field = anchor.field();
    let variance = anchor.variance();
    let in_range = |n: i64| w.overall_n.is_none_or(|b| variance.internal(n) <= b);
    let mut current: BTreeMap<i64, Matrix> = BTreeMap::new();
    for n in anchor.degrees() {
        if in_range(n) {
            current.insert(n, Matrix::identity(field, hs[w.anchor].dim(n)));
        }
    }
    for i in w.anchor..w.stages.len() {
        let st = &w.stages[i];
        let (s, t) = match st.direction {
            Direction::Forward => (i, i + 1),
            Direction::Backward => (i + 1, i),
        };
        let induced = induced_map(&complexes[s], &complexes[t], &st.map, &hs[s], &hs[t])?;
        let mut next = BTreeMap::new();
        for (&n, m) in &current {
            let rows = hs[i + 1].dim(n);
            let h = induced.get(&n).cloned().unwrap_or_else(|| Matrix::zeros(field, hs[t].dim(n), hs[s].dim(n)));
            let step = match st.direction {
                Direction::Forward => h,
                Direction::Backward => match h.inverse() {
                    Some(inv) => inv,
                    None if h.rows() == 0 && h.cols() == 0 => h,
                    None => return Ok(false),
                },
            };
            if step.cols() != m.rows() || step.rows() != rows {
                return Ok(false);
            }
            next.insert(n, step.mul(m));
        }
        current = next;
    }
    Ok(current.values().all(|m| m.rows() == 0 && m.cols() == 0 || m.is_identity()))
}
