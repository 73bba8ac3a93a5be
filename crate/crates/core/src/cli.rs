//! The `pureform` command line.
//!
//! Exit status: 0 when every check is green, 1 for a negative mathematical
//! verdict (impure, non-Tate, nonvanishing Massey product, failed
//! certificate), 2 for unreadable input or bad usage.

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::complexes::{homology, homology_model, mapping_cylinder};
use crate::dga::{algebra_purity, cohomology_algebra, k_massey, validate, MasseyOptions};
use crate::error::{Error, Result};
use crate::field::{Field, FieldConfig};
use crate::free_models::{build_free_model, pipeline, predicate_report, weighted_model_from_tate};
use crate::generators::{
    configuration_arnold, gm, projective_cochains, projective_space, random_pure_complex, random_pure_dga,
    random_tate, SizeBounds,
};
use crate::json::{read_document, to_pretty, ComplexDoc, DgaDoc, Document, FreeModelDoc, WitnessDoc};
use crate::weights::{formality_zigzag_complex, grade_endo_complex, parse_alpha, purity_check, tate_defect, Modulus};
use crate::witness::verify;

pub const FIELD_ENV: &str = "PUREFORM_FIELD";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "pureform", version, about = "Weight gradings, purity, Massey products and N-formality certificates")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Field characteristic (0 for Q).
    #[arg(long = "l", global = true)]
    pub characteristic: Option<u64>,
    #[arg(long, global = true)]
    pub q: Option<u64>,
    /// Default field as "l:q".
    #[arg(long = "field", env = FIELD_ENV, global = true, hide_env_values = true)]
    pub field: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Projective,
    ProjectiveCochains,
    Gm,
    Configuration,
    RandomPure,
    RandomPureDga,
    RandomTate,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit a built-in example.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        points: usize,
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        alpha: Option<String>,
        /// A positive integer or "Z".
        #[arg(long)]
        modulus: Option<String>,
        #[arg(long, default_value_t = 6)]
        max_degree: i64,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        #[arg(long, default_value_t = 3)]
        pairs: usize,
        #[arg(long)]
        contaminate: bool,
    },
    /// Check a document against its schema and axioms.
    Validate { input: Option<PathBuf> },
    /// Weight-grade an endo-complex.
    Grade { input: Option<PathBuf> },
    /// Check alpha-purity of a graded complex, endo-complex or dg-algebra.
    Purity {
        input: Option<PathBuf>,
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Mapping cylinder of the homology model of an endo-complex.
    Cylinder { input: Option<PathBuf> },
    /// Free (or weighted) model of a dg-algebra.
    Model {
        input: Option<PathBuf>,
        #[arg(long)]
        alpha: Option<String>,
        /// Degree through which the model must be a quasi-isomorphism.
        #[arg(long)]
        n: Option<i64>,
    },
    /// Emit an N-formality certificate.
    Witness {
        input: Option<PathBuf>,
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Re-check a certificate from its raw maps.
    Verify { input: Option<PathBuf> },
    /// Massey products of cohomology basis classes.
    Massey {
        input: Option<PathBuf>,
        /// Comma-separated cohomology basis indices.
        #[arg(long)]
        classes: Option<String>,
        /// Check every k-tuple of positive-degree basis classes.
        #[arg(long)]
        scan: Option<usize>,
        #[arg(long, default_value_t = 12)]
        max_parameters: usize,
    },
    /// Connectivity, purity, Massey predicates and the formality range.
    Report {
        input: Option<PathBuf>,
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Formality zig-zag of an endo-complex.
    Zigzag {
        input: Option<PathBuf>,
        #[arg(long)]
        alpha: Option<String>,
    },
}

/// A finished command: exit status plus both renderings.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub status: i32,
    pub json: Value,
    pub text: String,
}

impl Outcome {
    fn new(status: i32, json: Value, text: impl Into<String>) -> Self {
        Self { status, json, text: text.into() }
    }

    fn green<T: Serialize>(doc: &T, text: impl Into<String>) -> Self {
        Self::new(0, serde_json::to_value(doc).expect("documents serialize"), text)
    }
}

pub fn exit_status(e: &Error) -> i32 {
    match e {
        Error::NotTate { .. }
        | Error::Impure { .. }
        | Error::UnsupportedWeil(_)
        | Error::NotSimplyConnected(_)
        | Error::NotConnected(_)
        | Error::MasseyUndefined { .. }
        | Error::Model(_) => 1,
        _ => 2,
    }
}

fn read_input(path: &Option<PathBuf>) -> Result<String> {
    let mut text = String::new();
    match path {
        Some(p) if p.as_os_str() != "-" => text = std::fs::read_to_string(p)?,
        _ => {
            std::io::stdin().read_to_string(&mut text)?;
        }
    }
    Ok(text)
}

fn parse_field_pair(text: &str) -> Result<(u64, u64)> {
    let (l, q) = text
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("field {text:?} is not of the form l:q")))?;
    let l = l.trim().parse().map_err(|_| Error::Parse(format!("bad characteristic in {text:?}")))?;
    let q = q.trim().parse().map_err(|_| Error::Parse(format!("bad q in {text:?}")))?;
    Ok((l, q))
}

impl Cli {
    /// Flags first, then the document, then the default field, then `7:2`.
    fn config(&self, doc_field: Option<Field>, doc_cfg: Option<FieldConfig>) -> Result<FieldConfig> {
        let fallback = self.field.as_deref().map(parse_field_pair).transpose()?.unwrap_or((7, 2));
        let l = self
            .characteristic
            .or(doc_field.map(|f| f.characteristic()))
            .unwrap_or(fallback.0);
        let q = self
            .q
            .or(doc_cfg.filter(|c| c.characteristic == l).map(|c| c.q))
            .or((fallback.0 == l).then_some(fallback.1))
            .unwrap_or(2);
        let cfg = FieldConfig::new(l, q)?;
        if let Some(f) = doc_field {
            if f != cfg.field() {
                return Err(Error::InvalidField(format!("document is over {f} but the field is {}", cfg.field())));
            }
        }
        Ok(cfg)
    }
}

fn alpha_of(flag: &Option<String>, doc: Option<Rational64>) -> Result<Rational64> {
    match (flag, doc) {
        (Some(a), _) => parse_alpha(a),
        (None, Some(a)) => Ok(a),
        (None, None) => Err(Error::Parse("--alpha is required for this input".into())),
    }
}

fn parse_modulus(text: &str) -> Result<Modulus> {
    if text.trim() == "Z" {
        return Ok(Modulus::Integers);
    }
    match text.trim().parse::<u64>() {
        Ok(m) if m > 0 => Ok(Modulus::Cyclic(m)),
        _ => Err(Error::Parse(format!("modulus {text:?} is neither a positive integer nor Z"))),
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Gen { kind, n, points, d, seed, alpha, modulus, max_degree, max_dim, pairs, contaminate } => {
            let cfg = cli.config(None, None)?;
            let q = Some(cfg.q);
            let bounds = SizeBounds { max_degree: *max_degree, max_dim: *max_dim, acyclic_pairs: *pairs };
            let default_modulus = if cfg.characteristic == 0 { Modulus::Integers } else { Modulus::Cyclic(cfg.h) };
            let modulus = modulus.as_deref().map(parse_modulus).transpose()?.unwrap_or(default_modulus);
            let alpha = alpha.as_deref().map(parse_alpha).transpose()?;
            let (doc, text) = match kind {
                GenKind::Projective | GenKind::Gm | GenKind::Configuration => {
                    let ex = match kind {
                        GenKind::Projective => projective_space(*n, &cfg)?,
                        GenKind::Gm => gm(&cfg)?,
                        _ => configuration_arnold(*points, *d, &cfg)?,
                    };
                    let text = format!("{:?}: dim {}, alpha {}", kind, ex.algebra.dim(), ex.alpha);
                    (serde_json::to_value(DgaDoc::of(&ex.algebra, q).with_phi(&ex.phi, Some(ex.alpha)))?, text)
                }
                GenKind::ProjectiveCochains => {
                    let (a, phi) = projective_cochains(*n, &cfg)?;
                    let alpha = projective_space(*n, &cfg)?.alpha;
                    let text = format!("cochain-style P^{n}: dim {}", a.dim());
                    (serde_json::to_value(DgaDoc::of(&a, q).with_phi(&phi, Some(alpha)))?, text)
                }
                GenKind::RandomPure => {
                    let alpha = alpha.unwrap_or(Rational64::new(1, 2));
                    let g = random_pure_complex(*seed, cfg.field(), alpha, modulus, bounds)?;
                    let text = format!("random pure complex, seed {seed}, total dim {}", g.complex().total_dim());
                    (serde_json::to_value(ComplexDoc::of_graded(&g, q))?, text)
                }
                GenKind::RandomPureDga => {
                    let alpha = alpha.unwrap_or(Rational64::new(1, 2));
                    let a = random_pure_dga(*seed, cfg.field(), alpha, modulus, bounds)?;
                    let text = format!("random pure dg-algebra, seed {seed}, dim {}", a.dim());
                    let mut doc = DgaDoc::of(&a, q);
                    doc.alpha = Some(alpha.to_string());
                    (serde_json::to_value(doc)?, text)
                }
                GenKind::RandomTate => {
                    let t = random_tate(*seed, &cfg, bounds, *contaminate)?;
                    let text = format!(
                        "random Tate complex, seed {seed}, total dim {}, contamination {}",
                        t.complex.complex().total_dim(),
                        t.contamination
                    );
                    (serde_json::to_value(ComplexDoc::of_endo(&t.complex, q))?, text)
                }
            };
            Ok(Outcome::new(0, doc, text))
        }
        Command::Validate { input } => validate_cmd(&read_input(input)?),
        Command::Grade { input } => {
            let c = complex_input(&read_input(input)?)?;
            let endo = c.endo.ok_or_else(|| Error::Parse("grading needs an endo-complex".into()))?;
            let cfg = cli.config(Some(endo.field()), c.config)?;
            match grade_endo_complex(&endo, &cfg) {
                Ok(g) => {
                    let dims = g.summand_dims();
                    let text = dims.iter().map(|((n, p), k)| format!("degree {n} weight {p}: {k}")).collect::<Vec<_>>();
                    Ok(Outcome::green(&ComplexDoc::of_graded(&g, Some(cfg.q)), text.join("\n")))
                }
                Err(e @ (Error::NotTate { .. } | Error::UnsupportedWeil(_))) => {
                    let defect = tate_defect(&endo, &cfg);
                    Ok(Outcome::new(1, json!({"tate": false, "defect": defect, "error": e.to_string()}), e.to_string()))
                }
                Err(e) => Err(e),
            }
        }
        Command::Purity { input, alpha } => {
            let report = match read_document(&read_input(input)?)? {
                Document::Complex(c) => {
                    let graded = match (c.graded, c.endo) {
                        (Some(g), _) => g,
                        (None, Some(x)) => grade_endo_complex(&x, &cli.config(Some(x.field()), c.config)?)?,
                        (None, None) => return Err(Error::Parse("purity needs weights or an endomorphism".into())),
                    };
                    purity_check(&graded, alpha_of(alpha, None)?)?
                }
                Document::Dga(d) => algebra_purity(&d.algebra, alpha_of(alpha, d.alpha)?)?,
                Document::Witness(_) => return Err(Error::Parse("purity does not apply to certificates".into())),
            };
            let text = match report.first_violation {
                None => format!("pure of slope {}", report.alpha),
                Some((n, p)) => format!("impure: degree {n} carries weight {p}"),
            };
            let status = if report.pure { 0 } else { 1 };
            Ok(Outcome::new(status, serde_json::to_value(&report)?, text))
        }
        Command::Cylinder { input } => {
            let c = complex_input(&read_input(input)?)?;
            let x = c.endo.ok_or_else(|| Error::Parse("the cylinder needs an endo-complex".into()))?;
            let model = homology_model(&x)?;
            let cyl = mapping_cylinder(&model.map)?;
            let betti_cyl = homology(cyl.complex()).betti();
            let betti_x = homology(x.complex()).betti();
            let ok = model.quasi_iso() && betti_cyl == betti_x;
            let doc = json!({
                "quasi_iso": model.quasi_iso(),
                "homology_matches": betti_cyl == betti_x,
                "cylinder": ComplexDoc::of_endo(&cyl, c.config.map(|c| c.q)),
            });
            let text = format!("homology model quasi-iso: {}, dim H(Cyl) = dim H(X): {}", model.quasi_iso(), betti_cyl == betti_x);
            Ok(Outcome::new(if ok { 0 } else { 1 }, doc, text))
        }
        Command::Model { input, alpha, n } => {
            let d = dga_input(&read_input(input)?)?;
            let alpha = alpha_of(alpha, d.alpha)?;
            let cfg = cli.config(Some(d.algebra.field()), d.config)?;
            let (model, qiso_ok) = match &d.phi {
                Some(phi) => {
                    let m = if cfg.characteristic == 0 { Modulus::Integers } else { Modulus::Cyclic(cfg.h) };
                    let bound = n.or(m.formality_bound(alpha)).unwrap_or(d.algebra.top_degree());
                    let t = weighted_model_from_tate(&d.algebra, phi, &cfg, bound)?;
                    let ok = t.qiso.ok;
                    (t.model, ok)
                }
                None => {
                    let (m, report) = build_free_model(&d.algebra, alpha, *n)?;
                    (m, report.ok)
                }
            };
            let text = model
                .generators
                .iter()
                .map(|g| format!("{}: degree {}, weight {}", g.label, g.degree, g.weight))
                .collect::<Vec<_>>()
                .join("\n");
            let doc = FreeModelDoc::of(&model, Some(cfg.q));
            Ok(Outcome::new(if qiso_ok { 0 } else { 1 }, serde_json::to_value(doc)?, text))
        }
        Command::Witness { input, alpha } => match read_document(&read_input(input)?)? {
            Document::Dga(d) => {
                let alpha = alpha_of(alpha, d.alpha)?;
                let cfg = cli.config(Some(d.algebra.field()), d.config)?;
                let (w, report) = pipeline(&d.algebra, d.phi.as_ref(), &cfg, alpha)?;
                let text = format!("{:?} route, N = {}", report.route, show_n(w.overall_n));
                Ok(Outcome::green(&WitnessDoc::of(&w), text))
            }
            Document::Complex(c) => zigzag(cli, c, alpha),
            Document::Witness(_) => Err(Error::Parse("input is already a certificate".into())),
        },
        Command::Zigzag { input, alpha } => zigzag(cli, complex_input(&read_input(input)?)?, alpha),
        Command::Verify { input } => {
            let doc = match read_document(&read_input(input)?)? {
                Document::Witness(w) => w,
                _ => return Err(Error::Parse("verify needs a witness certificate".into())),
            };
            Ok(verify_certificate(&doc))
        }
        Command::Massey { input, classes, scan, max_parameters } => {
            let d = dga_input(&read_input(input)?)?;
            let opts = MasseyOptions { max_parameters: *max_parameters, ..MasseyOptions::default() };
            massey_cmd(&d.algebra, classes.as_deref(), *scan, &opts)
        }
        Command::Report { input, alpha } => {
            let d = dga_input(&read_input(input)?)?;
            let alpha = alpha_of(alpha, d.alpha)?;
            let cfg = cli.config(Some(d.algebra.field()), d.config)?;
            let predicates = predicate_report(&d.algebra, d.phi.as_ref(), &cfg, alpha)?;
            let forced: Vec<usize> = predicates
                .massey
                .iter()
                .filter(|p| p.vanishing == crate::dga::Vanishing::ForcedVanish)
                .map(|p| p.k)
                .collect();
            match pipeline(&d.algebra, d.phi.as_ref(), &cfg, alpha) {
                Ok((w, report)) => {
                    let text = format!(
                        "{:?} route, N = {}, forced Massey vanishing for k in {forced:?}",
                        report.route,
                        show_n(w.overall_n)
                    );
                    Ok(Outcome::new(0, json!({"witness": true, "pipeline": report, "predicates": predicates}), text))
                }
                Err(e) if exit_status(&e) == 1 => {
                    let text = format!("witness refused ({e}); forced Massey vanishing for k in {forced:?}");
                    Ok(Outcome::new(1, json!({"witness": false, "refused": e.to_string(), "predicates": predicates}), text))
                }
                Err(e) => Err(e),
            }
        }
    }
}

fn show_n(n: Option<i64>) -> String {
    n.map_or("infinity".into(), |n| n.to_string())
}

fn complex_input(text: &str) -> Result<crate::json::ComplexInput> {
    match read_document(text)? {
        Document::Complex(c) => Ok(c),
        _ => Err(Error::Parse("expected a complex document".into())),
    }
}

fn dga_input(text: &str) -> Result<crate::json::DgaInput> {
    match read_document(text)? {
        Document::Dga(d) => Ok(d),
        _ => Err(Error::Parse("expected a dg-algebra document".into())),
    }
}

fn zigzag(cli: &Cli, c: crate::json::ComplexInput, alpha: &Option<String>) -> Result<Outcome> {
    let x = c.endo.ok_or_else(|| Error::Parse("the zig-zag needs an endo-complex".into()))?;
    let cfg = cli.config(Some(x.field()), c.config)?;
    let w = formality_zigzag_complex(&x, alpha_of(alpha, None)?, &cfg)?;
    let text = format!("zig-zag with {} stages, N = {}", w.stages.len(), show_n(w.overall_n));
    Ok(Outcome::green(&WitnessDoc::of(&w), text))
}

fn validate_cmd(text: &str) -> Result<Outcome> {
    match read_document(text)? {
        Document::Complex(c) => {
            let what = if c.graded.is_some() {
                "graded complex"
            } else if c.endo.is_some() {
                "endo-complex"
            } else {
                "complex"
            };
            Ok(Outcome::new(0, json!({"valid": true, "kind": what}), format!("valid {what}")))
        }
        Document::Dga(d) => {
            let report = validate(&d.algebra);
            let text = if report.ok { "valid dg-algebra".to_string() } else { format!("{} violation(s)", report.violations.len()) };
            Ok(Outcome::new(if report.ok { 0 } else { 1 }, serde_json::to_value(&report)?, text))
        }
        Document::Witness(w) => {
            let ok = w.integrity_ok() && w.to_witness().is_ok();
            Ok(Outcome::new(if ok { 0 } else { 1 }, json!({"valid": ok, "kind": "witness"}), format!("certificate well-formed: {ok}")))
        }
    }
}

/// Integrity digest plus a from-scratch re-check of every stage.
pub fn verify_certificate(doc: &WitnessDoc) -> Outcome {
    let integrity = doc.integrity_ok();
    let checked = doc.to_witness().and_then(|w| verify(&w));
    let (ok, first_failure, report) = match checked {
        Ok(r) => (r.ok && integrity, r.first_failure.clone(), serde_json::to_value(&r).expect("reports serialize")),
        Err(e) => (false, Some(format!("certificate does not load: {e}")), Value::Null),
    };
    let first_failure = first_failure.or_else(|| (!integrity).then(|| "integrity digest mismatch".to_string()));
    let text = match &first_failure {
        None => format!("verified, N = {}", show_n(doc.overall_n)),
        Some(f) => format!("FAILED: {f}"),
    };
    Outcome::new(
        if ok { 0 } else { 1 },
        json!({"ok": ok, "integrity": integrity, "first_failure": first_failure, "report": report}),
        text,
    )
}

fn massey_cmd(a: &crate::dga::WeightedDga, classes: Option<&str>, scan: Option<usize>, opts: &MasseyOptions) -> Result<Outcome> {
    let h = cohomology_algebra(a)?;
    let hb = h.algebra.basis();
    let tuples: Vec<Vec<usize>> = match (classes, scan) {
        (Some(list), _) => {
            let idx = list
                .split(',')
                .map(|s| s.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad class index {s:?}"))))
                .collect::<Result<Vec<_>>>()?;
            if let Some(&bad) = idx.iter().find(|&&i| i >= hb.len()) {
                return Err(Error::Parse(format!("class index {bad} is out of range (H has dimension {})", hb.len())));
            }
            vec![idx]
        }
        (None, Some(k)) => {
            let positive: Vec<usize> = (0..hb.len()).filter(|&i| hb[i].degree > 0).collect();
            let mut out: Vec<Vec<usize>> = vec![Vec::new()];
            for _ in 0..k {
                out = out
                    .into_iter()
                    .flat_map(|t| positive.iter().map(move |&i| [t.clone(), vec![i]].concat()))
                    .collect();
            }
            out
        }
        (None, None) => return Err(Error::Parse("give --classes or --scan".into())),
    };
    let mut results = Vec::new();
    let mut nonvanishing = Vec::new();
    for t in &tuples {
        let cls: Vec<_> = t.iter().map(|&i| h.algebra.basis_vector(i)).collect();
        let r = match k_massey(a, &h, &cls, opts) {
            Ok(r) => r,
            Err(Error::MasseyUndefined { .. }) => {
                results.push(json!({"classes": t, "defined": false}));
                continue;
            }
            Err(e) => return Err(e),
        };
        if r.contains_zero == Some(false) {
            nonvanishing.push(t.clone());
        }
        results.push(json!({
            "classes": t,
            "labels": t.iter().map(|&i| hb[i].label.clone()).collect::<Vec<_>>(),
            "defined": r.defined,
            "contains_zero": r.contains_zero,
            "search_exhausted": r.search_exhausted,
            "systems_checked": r.systems_checked,
            "indeterminacy_dim": r.indeterminacy.cols(),
        }));
    }
    let text = if nonvanishing.is_empty() {
        format!("{} product(s) checked, none nonvanishing", tuples.len())
    } else {
        format!("nonvanishing Massey product(s): {nonvanishing:?}")
    };
    let status = if nonvanishing.is_empty() { 0 } else { 1 };
    Ok(Outcome::new(status, json!({"products": results, "nonvanishing": nonvanishing}), text))
}

/// Parses arguments, runs, writes the result and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(out) => {
            let body = match cli.format {
                Format::Json => to_pretty(&out.json),
                Format::Text => out.text.clone(),
            };
            if let Err(e) = emit(&cli, &body) {
                eprintln!("error: {e}");
                return 2;
            }
            out.status
        }
        Err(e) => {
            let status = exit_status(&e);
            match cli.format {
                Format::Json => {
                    let mut err = json!({"error": e.to_string(), "status": status});
                    if let Error::Schema { pointer, .. } = &e {
                        err["pointer"] = json!(pointer);
                    }
                    eprintln!("{}", to_pretty(&err));
                }
                Format::Text => eprintln!("error: {e}"),
            }
            status
        }
    }
}

fn emit(cli: &Cli, body: &str) -> Result<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, format!("{body}\n"))?,
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{body}")?;
        }
    }
    Ok(())
}
