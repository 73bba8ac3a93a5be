//! The zig-zag `X <- A <- tau A -> t<=N H(A) <- H(A)` for a Tate complex.

use num_rational::Rational64;

use super::{grade_endo_complex, psi_map, purity_check, GradedComplex};
use crate::complexes::{compose_maps, homology_model, EndoComplex, Variance};
use crate::error::{Error, Result};
use crate::field::FieldConfig;
use crate::witness::{Direction, FormalityWitness, Node, Object, Stage};

/// Grades `x` directly when it is chainwise Tate (Weil over `Q`), otherwise
/// grades its homology model; then runs `tau`, `Psi` and `Upsilon`.
pub fn formality_zigzag_complex(x: &EndoComplex, alpha: Rational64, cfg: &FieldConfig) -> Result<FormalityWitness> {
    let c = x.complex();
    if c.variance() != Variance::Homological {
        return Err(Error::VarianceMismatch("the zig-zag is built for homological complexes".into()));
    }
    let (graded, to_x, route) = match grade_endo_complex(x, cfg) {
        Ok(g) => {
            let frame = g.frame().clone();
            (g, frame, "chainwise")
        }
        Err(Error::NotTate { .. } | Error::UnsupportedWeil(_)) => {
            let model = homology_model(x)?;
            let g = grade_endo_complex(&model.model, cfg)?;
            let to_x = compose_maps(model.map.f(), g.frame(), g.complex(), model.model.complex(), c);
            (g, to_x, "homology model")
        }
        Err(e) => return Err(e),
    };
    graded.modulus().check_alpha(alpha)?;
    purity_check(&graded, alpha)?.into_result()?;
    let n = graded.modulus().formality_bound(alpha);
    let psi = psi_map(&graded, alpha, n)?;

    let mut w = FormalityWitness::new(Node { label: "X".into(), object: Object::Complex(c.clone()) });
    w.push(stage("weight-adapted basis", Direction::Backward, to_x, None), node("A", &graded));
    w.push(
        stage("Phi: tau A -> A", Direction::Backward, psi.tau.inclusion.clone(), None),
        node("tau A", &psi.tau.graded),
    );
    w.push(stage("Psi: tau A -> t<=N H(A)", Direction::Forward, psi.map.clone(), n), node("t<=N H(A)", &psi.target));
    w.push(stage("Upsilon: H(A) -> t<=N H(A)", Direction::Backward, psi.upsilon.clone(), n), node("H(A)", &psi.full));
    w.anchor = 1;
    w.overall_n = n;
    w.metadata.insert("alpha".into(), alpha.to_string());
    w.metadata.insert("modulus".into(), serde_json::to_string(&graded.modulus())?);
    w.metadata.insert("route".into(), route.into());
    w.certify()
}

fn stage(label: &str, direction: Direction, map: crate::complexes::DegreeMap, claimed_n: Option<i64>) -> Stage {
    Stage { label: label.into(), direction, map, claimed_n, verified_n: None }
}

fn node(label: &str, g: &GradedComplex) -> Node {
    Node { label: label.into(), object: Object::Complex(g.complex().clone()) }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::complexes::{Complex, DegreeMap};
    use crate::linalg::Matrix;
    use crate::witness::verify;

    #[test]
    fn pure_zero_differential_gives_trivial_witness() {
        let cfg = FieldConfig::new(7, 2).unwrap();
        let f = cfg.field();
        let c = Complex::zero_differential(f, Variance::Homological, &BTreeMap::from([(0, 1), (2, 1)]));
        // q^1 on degree 2: weight 1 = alpha * 2 for alpha = 1/2
        let phi = DegreeMap::from([(0, Matrix::identity(f, 1)), (2, Matrix::scalar(f, 1, cfg.q_power(1)))]);
        let x = EndoComplex::new(c, phi).unwrap();
        let w = formality_zigzag_complex(&x, Rational64::new(1, 2), &cfg).unwrap();
        assert_eq!(w.overall_n, Some(4));
        assert!(w.stages.iter().all(|s| s.map.values().all(|m| m.is_identity() || m.rows() == 0)));
        assert!(verify(&w).unwrap().ok);
    }

    #[test]
    fn gm_type_complex() {
        // weights 0 and 2 in degrees 0 and 1 (alpha = 2), l = 11, q = 2, h = 10
        let cfg = FieldConfig::new(11, 2).unwrap();
        let f = cfg.field();
        let c = Complex::zero_differential(f, Variance::Homological, &BTreeMap::from([(0, 1), (1, 1)]));
        let phi = DegreeMap::from([(0, Matrix::identity(f, 1)), (1, Matrix::scalar(f, 1, cfg.q_power(2)))]);
        let x = EndoComplex::new(c, phi).unwrap();
        let w = formality_zigzag_complex(&x, Rational64::from_integer(2), &cfg).unwrap();
        assert_eq!(w.overall_n, Some((cfg.h as i64 - 1) / 2));
    }

    #[test]
    fn non_tate_chains_go_through_the_model() {
        // an acyclic pair with eigenvalue 3 (not a power of 2 mod 7) next to a pure class
        let cfg = FieldConfig::new(7, 2).unwrap();
        let f = cfg.field();
        let c = Complex::new(
            f,
            Variance::Homological,
            &BTreeMap::from([(0, 2), (1, 1)]),
            &BTreeMap::from([(1, Matrix::from_i64(f, &[&[1], &[0]]))]),
        )
        .unwrap();
        let phi = DegreeMap::from([
            (0, Matrix::diagonal(f, &[f.from_i64(3), f.one()])),
            (1, Matrix::scalar(f, 1, f.from_i64(3))),
        ]);
        let x = EndoComplex::new(c, phi).unwrap();
        let w = formality_zigzag_complex(&x, Rational64::from_integer(1), &cfg).unwrap();
        assert_eq!(w.metadata["route"], "homology model");
        assert!(verify(&w).unwrap().ok);
    }

    #[test]
    fn impure_input_reports_locus() {
        let cfg = FieldConfig::new(7, 2).unwrap();
        let f = cfg.field();
        let c = Complex::zero_differential(f, Variance::Homological, &BTreeMap::from([(1, 1)]));
        let x = EndoComplex::new(c, DegreeMap::from([(1, Matrix::identity(f, 1))])).unwrap();
        let r = formality_zigzag_complex(&x, Rational64::from_integer(1), &cfg);
        assert!(matches!(r, Err(Error::Impure { degree: 1, weight: 0 })));
    }
}
