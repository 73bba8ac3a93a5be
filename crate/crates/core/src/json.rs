//! Versioned JSON documents for every object the command line reads or
//! writes. Degrees in documents are always the variance's own degrees.
//!
//! Witness certificates carry a SHA-256 `integrity` digest of their
//! canonical serialization (object keys sorted, no whitespace, digest field
//! removed).

use std::collections::BTreeMap;

use num_rational::Rational64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::complexes::{Complex, DegreeMap, EndoComplex, Variance};
use crate::dga::{BasisElement, WeightedDga};
use crate::error::{Error, Result};
use crate::field::{Field, FieldConfig, Scalar};
use crate::free_models::FreeModel;
use crate::linalg::Matrix;
use crate::weights::{parse_alpha, GradedComplex, Modulus, WeightGrading};
use crate::witness::{Direction, FormalityWitness, Node, Object, Stage};

pub const SCHEMA: u32 = 1;

fn schema_error(pointer: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema { pointer: pointer.into(), message: message.into() }
}

/// Typed parse reporting failures with a JSON pointer.
pub fn from_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = pointer_of(e.path());
        schema_error(pointer, e.into_inner().to_string())
    })
}

fn from_value<T: DeserializeOwned>(v: Value) -> Result<T> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let pointer = pointer_of(e.path());
        schema_error(pointer, e.into_inner().to_string())
    })
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    if out.is_empty() {
        "/".into()
    } else {
        out
    }
}

fn check_header(schema: u32, kind: &str, expected: &[&str]) -> Result<()> {
    if schema != SCHEMA {
        return Err(schema_error("/schema", format!("unsupported schema version {schema}")));
    }
    if !expected.contains(&kind) {
        return Err(schema_error("/kind", format!("expected one of {expected:?}, found {kind:?}")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldDoc {
    /// 0 selects the rationals.
    pub characteristic: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
}

impl FieldDoc {
    pub fn of(field: Field, q: Option<u64>) -> Self {
        Self { characteristic: field.characteristic(), q }
    }

    pub fn field(&self, pointer: &str) -> Result<Field> {
        match self.characteristic {
            0 => Ok(Field::Rational),
            p if crate::field::is_prime(p) => Ok(Field::Prime(p)),
            p => Err(schema_error(format!("{pointer}/characteristic"), format!("{p} is not prime"))),
        }
    }

    pub fn config(&self) -> Result<Option<FieldConfig>> {
        self.q.map(|q| FieldConfig::new(self.characteristic, q)).transpose()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryDoc {
    Int(i64),
    Text(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<EntryDoc>>,
}

fn scalar_doc(s: &Scalar) -> EntryDoc {
    match s {
        Scalar::Mod(v) => EntryDoc::Int(*v as i64),
        Scalar::Rat(_) => EntryDoc::Text(s.to_string()),
    }
}

fn scalar_from(e: &EntryDoc, field: Field, pointer: &str) -> Result<Scalar> {
    match e {
        EntryDoc::Int(v) => Ok(field.from_i64(*v)),
        EntryDoc::Text(t) => field.parse(t).map_err(|err| schema_error(pointer, err.to_string())),
    }
}

impl MatrixDoc {
    pub fn of(m: &Matrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.to_rows().iter().map(|r| r.iter().map(scalar_doc).collect()).collect(),
        }
    }

    pub fn to_matrix(&self, field: Field, pointer: &str) -> Result<Matrix> {
        if self.entries.len() != self.rows {
            return Err(schema_error(
                format!("{pointer}/entries"),
                format!("{} rows given, {} declared", self.entries.len(), self.rows),
            ));
        }
        let mut rows = Vec::with_capacity(self.rows);
        for (i, r) in self.entries.iter().enumerate() {
            if r.len() != self.cols {
                return Err(schema_error(
                    format!("{pointer}/entries/{i}"),
                    format!("{} entries given, {} declared", r.len(), self.cols),
                ));
            }
            let row = r
                .iter()
                .enumerate()
                .map(|(j, e)| scalar_from(e, field, &format!("{pointer}/entries/{i}/{j}")))
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if self.rows == 0 {
            return Ok(Matrix::zeros(field, 0, self.cols));
        }
        Ok(Matrix::from_rows(field, rows))
    }
}

fn vector_doc(v: &[Scalar]) -> Vec<EntryDoc> {
    v.iter().map(scalar_doc).collect()
}

fn vector_from(v: &[EntryDoc], field: Field, pointer: &str) -> Result<Vec<Scalar>> {
    v.iter().enumerate().map(|(i, e)| scalar_from(e, field, &format!("{pointer}/{i}"))).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummandDoc {
    pub p: i64,
    /// Columns span the summand, in the complex's coordinates.
    pub basis: MatrixDoc,
}

/// Complex, endo-complex or graded complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDoc {
    pub schema: u32,
    pub kind: String,
    pub field: FieldDoc,
    pub variance: Variance,
    pub dims: BTreeMap<i64, usize>,
    #[serde(default)]
    pub diff: BTreeMap<i64, MatrixDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub endo: BTreeMap<i64, MatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Modulus>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub weights: BTreeMap<i64, Vec<SummandDoc>>,
}

/// A parsed complex document with whatever extra structure it carried.
#[derive(Clone, Debug)]
pub struct ComplexInput {
    pub complex: Complex,
    pub endo: Option<EndoComplex>,
    pub graded: Option<GradedComplex>,
    pub config: Option<FieldConfig>,
}

impl ComplexDoc {
    pub fn of_complex(c: &Complex, q: Option<u64>) -> Self {
        Self {
            schema: SCHEMA,
            kind: "complex".into(),
            field: FieldDoc::of(c.field(), q),
            variance: c.variance(),
            dims: c.external_dims(),
            diff: c.external_diffs().iter().map(|(&n, m)| (n, MatrixDoc::of(m))).collect(),
            endo: BTreeMap::new(),
            modulus: None,
            weights: BTreeMap::new(),
        }
    }

    pub fn of_endo(x: &EndoComplex, q: Option<u64>) -> Self {
        let c = x.complex();
        let mut doc = Self::of_complex(c, q);
        doc.kind = "endo-complex".into();
        doc.endo = c
            .degrees()
            .filter(|&n| c.dim(n) > 0)
            .map(|n| (c.variance().internal(n), MatrixDoc::of(&x.phi(n))))
            .collect();
        doc
    }

    /// Written in the graded complex's adapted basis, so every summand
    /// basis is a block of unit vectors.
    pub fn of_graded(g: &GradedComplex, q: Option<u64>) -> Self {
        let c = g.complex();
        let mut doc = Self::of_complex(c, q);
        doc.kind = "graded-complex".into();
        doc.modulus = Some(g.modulus());
        for n in c.degrees().filter(|&n| c.dim(n) > 0) {
            let id = Matrix::identity(c.field(), c.dim(n));
            let parts = g
                .distinct_weights()
                .into_iter()
                .filter_map(|p| {
                    let idx = g.indices_of_weight(n, p);
                    (!idx.is_empty()).then(|| SummandDoc { p, basis: MatrixDoc::of(&id.select_columns(&idx)) })
                })
                .collect();
            doc.weights.insert(c.variance().internal(n), parts);
        }
        doc
    }

    pub fn to_input(&self) -> Result<ComplexInput> {
        check_header(self.schema, &self.kind, &["complex", "endo-complex", "graded-complex"])?;
        let field = self.field.field("/field")?;
        let config = self.field.config()?;
        let mut diffs = BTreeMap::new();
        for (&n, m) in &self.diff {
            diffs.insert(n, m.to_matrix(field, &format!("/diff/{n}"))?);
        }
        let complex = Complex::new(field, self.variance, &self.dims, &diffs)?;
        let endo = if self.endo.is_empty() {
            None
        } else {
            let mut blocks = DegreeMap::new();
            for (&n, m) in &self.endo {
                blocks.insert(self.variance.internal(n), m.to_matrix(field, &format!("/endo/{n}"))?);
            }
            Some(EndoComplex::new(complex.clone(), blocks)?)
        };
        let graded = if self.weights.is_empty() && self.modulus.is_none() {
            None
        } else {
            let modulus = self
                .modulus
                .ok_or_else(|| schema_error("/modulus", "weights need a modulus"))?;
            let mut splitting = BTreeMap::new();
            for (&n, parts) in &self.weights {
                let mut list = Vec::new();
                for (i, s) in parts.iter().enumerate() {
                    list.push((s.p, s.basis.to_matrix(field, &format!("/weights/{n}/{i}/basis"))?));
                }
                splitting.insert(n, list);
            }
            Some(GradedComplex::from_grading(&complex, &WeightGrading { modulus, splitting })?)
        };
        Ok(ComplexInput { complex, endo, graded, config })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisDoc {
    pub label: String,
    pub deg: i64,
    pub weight: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DgaDoc {
    pub schema: u32,
    pub kind: String,
    pub field: FieldDoc,
    pub modulus: Modulus,
    #[serde(default)]
    pub unit: usize,
    pub basis: Vec<BasisDoc>,
    /// `(i, j, e_i e_j)` with the product as a dense coefficient vector.
    #[serde(default)]
    pub mult: Vec<(usize, usize, Vec<EntryDoc>)>,
    pub diff: MatrixDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<MatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
}

#[derive(Clone, Debug)]
pub struct DgaInput {
    pub algebra: WeightedDga,
    /// Global matrix of a Frobenius-type endomorphism, if supplied.
    pub phi: Option<Matrix>,
    pub alpha: Option<Rational64>,
    pub config: Option<FieldConfig>,
}

impl DgaDoc {
    pub fn of(a: &WeightedDga, q: Option<u64>) -> Self {
        Self {
            schema: SCHEMA,
            kind: "dga".into(),
            field: FieldDoc::of(a.field(), q),
            modulus: a.modulus(),
            unit: a.unit(),
            basis: a
                .basis()
                .iter()
                .map(|b| BasisDoc { label: b.label.clone(), deg: b.degree, weight: b.weight })
                .collect(),
            mult: a.dense_products().into_iter().map(|(i, j, v)| (i, j, vector_doc(&v))).collect(),
            diff: MatrixDoc::of(a.diff()),
            phi: None,
            alpha: None,
        }
    }

    pub fn with_phi(mut self, phi: &Matrix, alpha: Option<Rational64>) -> Self {
        self.phi = Some(MatrixDoc::of(phi));
        self.alpha = alpha.map(|a| a.to_string());
        self
    }

    pub fn to_input(&self) -> Result<DgaInput> {
        check_header(self.schema, &self.kind, &["dga"])?;
        let field = self.field.field("/field")?;
        let basis: Vec<BasisElement> = self
            .basis
            .iter()
            .map(|b| BasisElement { label: b.label.clone(), degree: b.deg, weight: b.weight })
            .collect();
        let mut products = Vec::new();
        for (k, (i, j, v)) in self.mult.iter().enumerate() {
            products.push((*i, *j, vector_from(v, field, &format!("/mult/{k}/2"))?));
        }
        let diff = self.diff.to_matrix(field, "/diff")?;
        let algebra = WeightedDga::new(field, self.modulus, basis, self.unit, products, diff)?;
        let phi = self.phi.as_ref().map(|m| m.to_matrix(field, "/phi")).transpose()?;
        let alpha = self
            .alpha
            .as_deref()
            .map(|a| parse_alpha(a).map_err(|e| schema_error("/alpha", e.to_string())))
            .transpose()?;
        Ok(DgaInput { algebra, phi, alpha, config: self.field.config()? })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDoc {
    pub label: String,
    pub degree: i64,
    pub weight: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeModelDoc {
    pub schema: u32,
    pub kind: String,
    pub field: FieldDoc,
    pub modulus: Modulus,
    pub degree_cap: i64,
    pub generators: Vec<GeneratorDoc>,
    /// `d(v)` as a list of `(coefficient, word of generator indices)`.
    pub diff_on_gens: Vec<Vec<(EntryDoc, Vec<usize>)>>,
    /// `f(v)` in the target basis.
    pub map_to_target: Vec<Vec<EntryDoc>>,
    pub target: DgaDoc,
}

impl FreeModelDoc {
    pub fn of(m: &FreeModel, q: Option<u64>) -> Self {
        Self {
            schema: SCHEMA,
            kind: "free-model".into(),
            field: FieldDoc::of(m.algebra.field(), q),
            modulus: m.algebra.modulus(),
            degree_cap: m.degree_cap,
            generators: m
                .generators
                .iter()
                .map(|g| GeneratorDoc { label: g.label.clone(), degree: g.degree, weight: g.weight })
                .collect(),
            diff_on_gens: m
                .diff_on_gens
                .iter()
                .map(|p| p.iter().map(|(c, w)| (scalar_doc(c), w.clone())).collect())
                .collect(),
            map_to_target: m.map_to_target.iter().map(|v| vector_doc(v)).collect(),
            target: DgaDoc::of(&m.target, q),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum ObjectDoc {
    Complex(ComplexDoc),
    Algebra(DgaDoc),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub label: String,
    pub object: ObjectDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageDoc {
    pub label: String,
    pub direction: Direction,
    pub claimed_n: Option<i64>,
    pub verified_n: Option<i64>,
    /// Blocks keyed by the own degree of the source.
    pub map: BTreeMap<i64, MatrixDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessDoc {
    pub schema: u32,
    pub kind: String,
    pub overall_n: Option<i64>,
    pub anchor: usize,
    #[serde(default)]
    pub metadata: BTreeMap<String, String>,
    pub nodes: Vec<NodeDoc>,
    pub stages: Vec<StageDoc>,
    #[serde(default)]
    pub integrity: String,
}

fn stage_source(w: &FormalityWitness, i: usize) -> &Node {
    w.endpoints(i).0
}

fn node_variance(n: &Node) -> Variance {
    match &n.object {
        Object::Complex(c) => c.variance(),
        Object::Algebra(_) => Variance::Cohomological,
    }
}

impl WitnessDoc {
    /// Serializes and seals the certificate.
    pub fn of(w: &FormalityWitness) -> Self {
        let nodes = w
            .nodes
            .iter()
            .map(|n| NodeDoc {
                label: n.label.clone(),
                object: match &n.object {
                    Object::Complex(c) => ObjectDoc::Complex(ComplexDoc::of_complex(c, None)),
                    Object::Algebra(a) => ObjectDoc::Algebra(DgaDoc::of(a, None)),
                },
            })
            .collect();
        let stages = w
            .stages
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let v = node_variance(stage_source(w, i));
                StageDoc {
                    label: s.label.clone(),
                    direction: s.direction,
                    claimed_n: s.claimed_n,
                    verified_n: s.verified_n,
                    map: s.map.iter().map(|(&n, m)| (v.internal(n), MatrixDoc::of(m))).collect(),
                }
            })
            .collect();
        let mut doc = Self {
            schema: SCHEMA,
            kind: "witness".into(),
            overall_n: w.overall_n,
            anchor: w.anchor,
            metadata: w.metadata.clone(),
            nodes,
            stages,
            integrity: String::new(),
        };
        doc.integrity = doc.digest();
        doc
    }

    /// SHA-256 of the canonical form with `integrity` left out.
    pub fn digest(&self) -> String {
        let mut v = serde_json::to_value(self).expect("documents serialize");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("integrity");
        }
        hex::encode(Sha256::digest(v.to_string().as_bytes()))
    }

    pub fn integrity_ok(&self) -> bool {
        self.integrity == self.digest()
    }

    pub fn to_witness(&self) -> Result<FormalityWitness> {
        check_header(self.schema, &self.kind, &["witness"])?;
        let mut nodes = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            let object = match &n.object {
                ObjectDoc::Complex(c) => Object::Complex(
                    c.to_input().map_err(|e| nested(e, &format!("/nodes/{i}/object/complex")))?.complex,
                ),
                ObjectDoc::Algebra(a) => Object::Algebra(
                    a.to_input().map_err(|e| nested(e, &format!("/nodes/{i}/object/algebra")))?.algebra,
                ),
            };
            nodes.push(Node { label: n.label.clone(), object });
        }
        if nodes.len() != self.stages.len() + 1 {
            return Err(schema_error("/nodes", "a witness needs exactly one more node than stages"));
        }
        let mut stages = Vec::new();
        for (i, s) in self.stages.iter().enumerate() {
            let src = match s.direction {
                Direction::Forward => &nodes[i],
                Direction::Backward => &nodes[i + 1],
            };
            let field = src.object.complex().field();
            let v = node_variance(src);
            let mut map = DegreeMap::new();
            for (&n, m) in &s.map {
                map.insert(v.internal(n), m.to_matrix(field, &format!("/stages/{i}/map/{n}"))?);
            }
            stages.push(Stage {
                label: s.label.clone(),
                direction: s.direction,
                map,
                claimed_n: s.claimed_n,
                verified_n: s.verified_n,
            });
        }
        Ok(FormalityWitness {
            nodes,
            stages,
            overall_n: self.overall_n,
            anchor: self.anchor,
            metadata: self.metadata.clone(),
        })
    }
}

fn nested(e: Error, prefix: &str) -> Error {
    match e {
        Error::Schema { pointer, message } => {
            let rest = if pointer == "/" { String::new() } else { pointer };
            Error::Schema { pointer: format!("{prefix}{rest}"), message }
        }
        other => other,
    }
}

/// Any document the command line accepts, dispatched on `"kind"`.
#[derive(Clone, Debug)]
pub enum Document {
    Complex(ComplexInput),
    Dga(DgaInput),
    Witness(Box<WitnessDoc>),
}

pub fn read_document(text: &str) -> Result<Document> {
    let v: Value = serde_json::from_str(text).map_err(|e| schema_error("/", e.to_string()))?;
    let kind = v
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| schema_error("/kind", "missing document kind"))?
        .to_string();
    match kind.as_str() {
        "complex" | "endo-complex" | "graded-complex" => {
            Ok(Document::Complex(from_value::<ComplexDoc>(v)?.to_input()?))
        }
        "dga" => Ok(Document::Dga(from_value::<DgaDoc>(v)?.to_input()?)),
        "witness" => Ok(Document::Witness(Box::new(from_value::<WitnessDoc>(v)?))),
        other => Err(schema_error("/kind", format!("unknown document kind {other:?}"))),
    }
}

pub fn to_pretty<T: Serialize>(doc: &T) -> String {
    serde_json::to_string_pretty(doc).expect("documents serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free_models::pipeline;
    use crate::generators::{projective_space, random_pure_complex, random_tate, SizeBounds};
    use crate::witness::verify;

    fn cfg7() -> FieldConfig {
        FieldConfig::new(7, 2).unwrap()
    }

    #[test]
    fn rational_matrix_roundtrip() {
        let f = Field::Rational;
        let m = Matrix::from_rows(f, vec![vec![f.parse("1/2").unwrap(), f.parse("-3").unwrap()]]);
        let text = to_pretty(&MatrixDoc::of(&m));
        assert!(text.contains("\"1/2\""));
        let back: MatrixDoc = from_str(&text).unwrap();
        assert_eq!(back.to_matrix(f, "").unwrap(), m);
    }

    #[test]
    fn endo_complex_roundtrip() {
        let t = random_tate(3, &cfg7(), SizeBounds::default(), false).unwrap();
        let text = to_pretty(&ComplexDoc::of_endo(&t.complex, Some(2)));
        match read_document(&text).unwrap() {
            Document::Complex(c) => {
                assert_eq!(c.endo.unwrap(), t.complex);
                assert_eq!(c.config, Some(cfg7()));
            }
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn graded_complex_roundtrip() {
        let g = random_pure_complex(5, Field::Prime(7), Rational64::new(1, 2), Modulus::Cyclic(3), SizeBounds::default())
            .unwrap();
        let doc = ComplexDoc::of_graded(&g, None);
        let back = from_str::<ComplexDoc>(&to_pretty(&doc)).unwrap().to_input().unwrap();
        let h = back.graded.unwrap();
        assert_eq!(h.complex(), g.complex());
        assert_eq!(h.all_weights(), g.all_weights());
    }

    #[test]
    fn dga_roundtrip_keeps_phi() {
        let p = projective_space(3, &cfg7()).unwrap();
        let doc = DgaDoc::of(&p.algebra, Some(2)).with_phi(&p.phi, Some(p.alpha));
        let back = from_str::<DgaDoc>(&to_pretty(&doc)).unwrap().to_input().unwrap();
        assert_eq!(back.algebra, p.algebra);
        assert_eq!(back.phi, Some(p.phi));
        assert_eq!(back.alpha, Some(p.alpha));
    }

    #[test]
    fn schema_errors_carry_pointers() {
        let bad = r#"{"schema":1,"kind":"dga","field":{"characteristic":7},"modulus":3,
            "basis":[{"label":"1","deg":0,"weight":0}],"diff":{"rows":1,"cols":1,"entries":[[0, 1]]}}"#;
        match read_document(bad) {
            Err(Error::Schema { pointer, .. }) => assert_eq!(pointer, "/diff/entries/0"),
            other => panic!("unexpected {other:?}"),
        }
        let bad = r#"{"schema":1,"kind":"dga","field":{"characteristic":7},"modulus":3,
            "basis":[{"label":"1","deg":"zero","weight":0}],"diff":{"rows":1,"cols":1,"entries":[[0]]}}"#;
        match read_document(bad) {
            Err(Error::Schema { pointer, .. }) => assert_eq!(pointer, "/basis/0/deg"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn certificate_roundtrip_and_integrity() {
        let p = projective_space(2, &cfg7()).unwrap();
        let (w, _) = pipeline(&p.algebra, Some(&p.phi), &cfg7(), p.alpha).unwrap();
        let doc = WitnessDoc::of(&w);
        assert!(doc.integrity_ok());
        let text = to_pretty(&doc);
        let back: WitnessDoc = from_str(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(to_pretty(&back), text);
        let w2 = back.to_witness().unwrap();
        assert_eq!(w2, w);
        assert!(verify(&w2).unwrap().ok);
        let mut tampered = back.clone();
        tampered.overall_n = Some(5);
        assert!(!tampered.integrity_ok());
    }
}
