//! JSON documents read and written by the command-line tool.
//!
//! Complex numbers are `[re, im]` pairs. Certificate coordinates are
//! `{a_re, a_im, b}`. Non-finite report values are written as the strings
//! `"NaN"`, `"inf"` and `"-inf"`.

use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use tube_geodesics::circle::Arc;
use tube_geodesics::geodesic::{
    CandidateSpec, DiscBaseSpec, FacetSpec, HalfPlaneComponent, HalfPlaneSpec, StaircaseSpec, StripSpec, Transverse,
};
use tube_geodesics::solver::{Case, SolveOptions};
use tube_geodesics::verify::{ConditionReport, VerificationReport, Witness};
use tube_geodesics::{CircleMeasure, GeodesicSpec, QuadCertificate, QuadTerm, StaircaseDomain, TubeDomain, C64};

use crate::CliError;

pub type Cx = [f64; 2];

fn cx(z: C64) -> Cx {
    [z.re, z.im]
}

fn from_cx(z: Cx) -> C64 {
    Complex::new(z[0], z[1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Document {
    Domain(DomainDoc),
    GeodesicSpec(SpecDoc),
    SolveProblem(ProblemDoc),
    Report(ReportDoc),
    Trace(TraceDoc),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Domain(_) => "domain",
            Document::GeodesicSpec(_) => "geodesic_spec",
            Document::SolveProblem(_) => "solve_problem",
            Document::Report(_) => "report",
            Document::Trace(_) => "trace",
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        if text.trim().is_empty() {
            return Err(CliError::Malformed("empty document".into()));
        }
        serde_json::from_str(text).map_err(|e| CliError::Malformed(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents always serialize");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainDoc {
    HalfplaneProduct { n: usize },
    Strip {},
    Staircase { normals: Vec<[f64; 2]>, points: Vec<[f64; 2]> },
    DiscBase {},
}

impl DomainDoc {
    pub fn from_domain(d: &TubeDomain) -> Self {
        match d {
            TubeDomain::HalfPlaneProduct { n } => DomainDoc::HalfplaneProduct { n: *n },
            TubeDomain::Strip => DomainDoc::Strip {},
            TubeDomain::Staircase(s) => DomainDoc::Staircase { normals: s.normals().to_vec(), points: s.points().to_vec() },
            TubeDomain::DiscBase => DomainDoc::DiscBase {},
        }
    }

    pub fn to_domain(&self) -> Result<TubeDomain, CliError> {
        match self {
            DomainDoc::HalfplaneProduct { n } if *n == 0 => {
                Err(CliError::Invalid("halfplane_product needs n >= 1".into()))
            }
            DomainDoc::HalfplaneProduct { n } => Ok(TubeDomain::HalfPlaneProduct { n: *n }),
            DomainDoc::Strip {} => Ok(TubeDomain::Strip),
            DomainDoc::Staircase { normals, points } => StaircaseDomain::new(normals.clone(), points.clone())
                .map(TubeDomain::Staircase)
                .map_err(|v| CliError::Invalid(v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; "))),
            DomainDoc::DiscBase {} => Ok(TubeDomain::DiscBase),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub a_re: f64,
    pub a_im: f64,
    pub b: f64,
}

impl TermDoc {
    fn from_term(t: &QuadTerm) -> Self {
        Self { a_re: t.a.re, a_im: t.a.im, b: t.b }
    }

    fn to_term(self) -> QuadTerm {
        QuadTerm::new(Complex::new(self.a_re, self.a_im), self.b)
    }
}

fn certificate_doc(h: &QuadCertificate) -> Vec<TermDoc> {
    h.terms.iter().map(TermDoc::from_term).collect()
}

fn certificate(terms: &[TermDoc]) -> QuadCertificate {
    QuadCertificate::new(terms.iter().map(|t| t.to_term()).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentDoc {
    #[serde(default)]
    pub shift: f64,
    pub alpha: f64,
    pub atom: Cx,
    #[serde(default)]
    pub beta: f64,
}

impl ComponentDoc {
    fn from_component(c: &HalfPlaneComponent<f64>) -> Self {
        Self { shift: c.shift, alpha: c.alpha, atom: cx(c.atom), beta: c.beta }
    }

    fn to_component(self) -> HalfPlaneComponent<f64> {
        HalfPlaneComponent { shift: self.shift, alpha: self.alpha, atom: from_cx(self.atom), beta: self.beta }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransverseDoc {
    pub offset: Cx,
    #[serde(default)]
    pub slope: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomDoc {
    pub angle: f64,
    pub mass: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceDoc {
    pub start: f64,
    pub length: f64,
    pub weight: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureDoc {
    pub dim: usize,
    #[serde(default)]
    pub atoms: Vec<AtomDoc>,
    #[serde(default)]
    pub pieces: Vec<PieceDoc>,
}

impl MeasureDoc {
    fn from_measure(mu: &CircleMeasure) -> Self {
        Self {
            dim: mu.dim(),
            atoms: mu.atoms.iter().map(|a| AtomDoc { angle: a.angle, mass: a.mass.clone() }).collect(),
            pieces: mu
                .pieces
                .iter()
                .map(|p| PieceDoc { start: p.arc.start(), length: p.arc.length(), weight: p.weight.clone() })
                .collect(),
        }
    }

    fn to_measure(&self) -> Result<CircleMeasure, CliError> {
        let mut mu = CircleMeasure::zero(self.dim);
        for a in &self.atoms {
            mu = mu.with_atom(a.angle, a.mass.clone()).map_err(invalid)?;
        }
        for p in &self.pieces {
            let arc = Arc::new(p.start, p.length).map_err(invalid)?;
            mu = mu.with_density(arc, p.weight.clone()).map_err(invalid)?;
        }
        Ok(mu)
    }
}

fn invalid(e: tube_geodesics::Error) -> CliError {
    CliError::Invalid(e.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpecDoc {
    Halfplane { lead: usize, components: Vec<ComponentDoc> },
    Strip { h: TermDoc, #[serde(default)] offset: f64 },
    Staircase { h: Vec<TermDoc>, alpha: [f64; 2], atoms: [Cx; 2], #[serde(default)] beta: [f64; 2] },
    StaircaseFacet { facet: usize, normal: ComponentDoc, transverse: TransverseDoc },
    DiscBase { a: [Cx; 2], b: [f64; 2], #[serde(default)] offset: [f64; 2] },
    Candidate { measure: MeasureDoc, offset: Vec<f64>, h: Vec<TermDoc> },
}

impl SpecDoc {
    pub fn from_spec(spec: &GeodesicSpec) -> Result<Self, CliError> {
        Ok(match spec {
            GeodesicSpec::HalfPlane(s) => SpecDoc::Halfplane {
                lead: s.lead,
                components: s.components.iter().map(ComponentDoc::from_component).collect(),
            },
            GeodesicSpec::Strip(s) => SpecDoc::Strip { h: TermDoc { a_re: s.a.re, a_im: s.a.im, b: s.b }, offset: s.offset },
            GeodesicSpec::Staircase(s) => SpecDoc::Staircase {
                h: certificate_doc(&s.h),
                alpha: s.alpha,
                atoms: [cx(s.atoms[0]), cx(s.atoms[1])],
                beta: s.beta,
            },
            GeodesicSpec::Facet(s) => match &s.transverse {
                Transverse::Affine { offset, slope } => SpecDoc::StaircaseFacet {
                    facet: s.facet,
                    normal: ComponentDoc::from_component(&s.normal),
                    transverse: TransverseDoc { offset: cx(*offset), slope: *slope },
                },
                Transverse::Custom(_) => {
                    return Err(CliError::Invalid("custom transverse maps cannot be written to a document".into()))
                }
            },
            GeodesicSpec::DiscBase(s) => SpecDoc::DiscBase { a: [cx(s.a[0]), cx(s.a[1])], b: s.b, offset: s.offset },
            GeodesicSpec::Candidate(s) => SpecDoc::Candidate {
                measure: MeasureDoc::from_measure(&s.measure),
                offset: s.offset.clone(),
                h: certificate_doc(&s.certificate),
            },
        })
    }

    pub fn to_spec(&self) -> Result<GeodesicSpec, CliError> {
        Ok(match self {
            SpecDoc::Halfplane { lead, components } => GeodesicSpec::HalfPlane(HalfPlaneSpec {
                lead: *lead,
                components: components.iter().map(|c| c.to_component()).collect(),
            }),
            SpecDoc::Strip { h, offset } => GeodesicSpec::Strip(StripSpec { a: Complex::new(h.a_re, h.a_im), b: h.b, offset: *offset }),
            SpecDoc::Staircase { h, alpha, atoms, beta } => GeodesicSpec::Staircase(StaircaseSpec {
                h: certificate(h),
                alpha: *alpha,
                atoms: [from_cx(atoms[0]), from_cx(atoms[1])],
                beta: *beta,
            }),
            SpecDoc::StaircaseFacet { facet, normal, transverse } => GeodesicSpec::Facet(FacetSpec {
                facet: *facet,
                normal: normal.to_component(),
                transverse: Transverse::Affine { offset: from_cx(transverse.offset), slope: transverse.slope },
            }),
            SpecDoc::DiscBase { a, b, offset } => {
                GeodesicSpec::DiscBase(DiscBaseSpec { a: [from_cx(a[0]), from_cx(a[1])], b: *b, offset: *offset })
            }
            SpecDoc::Candidate { measure, offset, h } => GeodesicSpec::Candidate(CandidateSpec {
                measure: measure.to_measure()?,
                offset: offset.clone(),
                certificate: certificate(h),
            }),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptionsDoc {
    pub cases: Option<Vec<String>>,
    pub multistart: usize,
    pub seed: u64,
    pub max_iterations: usize,
}

impl Default for OptionsDoc {
    fn default() -> Self {
        let d = SolveOptions::default();
        Self { cases: None, multistart: d.multistart, seed: d.seed, max_iterations: d.max_iterations }
    }
}

impl OptionsDoc {
    pub fn to_options(&self) -> Result<SolveOptions, CliError> {
        let cases = match &self.cases {
            None => None,
            Some(names) => Some(names.iter().map(|n| parse_case(n)).collect::<Result<Vec<_>, _>>()?),
        };
        if self.multistart == 0 {
            return Err(CliError::Invalid("multistart must be at least 1".into()));
        }
        Ok(SolveOptions {
            cases,
            multistart: self.multistart,
            seed: self.seed,
            max_iterations: self.max_iterations,
            ..SolveOptions::default()
        })
    }
}

fn parse_case(name: &str) -> Result<Case, CliError> {
    let bad = || CliError::Invalid(format!("unknown solver case {name:?}"));
    match name {
        "both_atoms" => Ok(Case::BothAtoms),
        "no_atoms" => Ok(Case::NoAtoms),
        _ => {
            if let Some(l) = name.strip_prefix("atom_") {
                match l.parse::<usize>() {
                    Ok(l @ 1..=2) => Ok(Case::OneAtom(l - 1)),
                    _ => Err(bad()),
                }
            } else if let Some(j) = name.strip_prefix("facet_") {
                match j.parse::<usize>() {
                    Ok(j) if j >= 1 => Ok(Case::Facet(j)),
                    _ => Err(bad()),
                }
            } else {
                Err(bad())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDoc {
    pub domain: DomainDoc,
    pub z: Vec<Cx>,
    pub w: Vec<Cx>,
    #[serde(default)]
    pub options: OptionsDoc,
}

/// A real number that may be non-finite.
#[derive(Clone, Copy, Debug)]
pub struct Num(pub f64);

impl PartialEq for Num {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits() || self.0 == other.0
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let x = self.0;
        if x.is_nan() {
            s.serialize_str("NaN")
        } else if x.is_infinite() {
            s.serialize_str(if x > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(x)
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = Num;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or one of \"NaN\", \"inf\", \"-inf\"")
            }
            fn visit_f64<E>(self, v: f64) -> Result<Num, E> {
                Ok(Num(v))
            }
            fn visit_i64<E>(self, v: i64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_u64<E>(self, v: u64) -> Result<Num, E> {
                Ok(Num(v as f64))
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<Num, E> {
                match v {
                    "NaN" => Ok(Num(f64::NAN)),
                    "inf" => Ok(Num(f64::INFINITY)),
                    "-inf" => Ok(Num(f64::NEG_INFINITY)),
                    _ => Err(E::invalid_value(serde::de::Unexpected::Str(v), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<Cx>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Cx>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    pub value: Num,
    pub detail: String,
}

impl WitnessDoc {
    fn from_witness(w: &Witness) -> Self {
        Self {
            z: w.z.as_ref().map(|z| z.iter().copied().map(cx).collect()),
            lambda: w.lambda.map(cx),
            angle: w.angle,
            value: Num(w.value),
            detail: w.detail.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionDoc {
    pub condition: String,
    pub status: String,
    pub tolerance: Num,
    pub checked: usize,
    pub worst: Num,
    pub witnesses: Vec<WitnessDoc>,
}

impl ConditionDoc {
    fn from_report(c: &ConditionReport) -> Self {
        Self {
            condition: c.condition.name().into(),
            status: c.status.name().into(),
            tolerance: Num(c.tolerance),
            checked: c.checked,
            worst: Num(c.worst),
            witnesses: c.witnesses.iter().map(WitnessDoc::from_witness).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionDoc {
    pub case: String,
    pub sigma: f64,
    pub residual: f64,
    pub spec: SpecDoc,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttemptDoc {
    pub case: String,
    pub residual: Num,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDoc {
    pub command: String,
    pub status: String,
    #[serde(default)]
    pub conditions: Vec<ConditionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left_inverse_residual: Option<Num>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub root_counts: Vec<i64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<SolutionDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attempts: Vec<AttemptDoc>,
}

impl ReportDoc {
    pub fn new(command: &str, status: &str) -> Self {
        Self {
            command: command.into(),
            status: status.into(),
            conditions: Vec::new(),
            left_inverse_residual: None,
            root_counts: Vec::new(),
            notes: Vec::new(),
            solution: None,
            attempts: Vec::new(),
        }
    }

    pub fn from_report(command: &str, r: &VerificationReport) -> Self {
        Self {
            conditions: r.conditions.iter().map(ConditionDoc::from_report).collect(),
            left_inverse_residual: r.left_inverse_residual.map(Num),
            root_counts: r.root_counts.clone(),
            notes: r.notes.clone(),
            ..Self::new(command, r.status().name())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceDoc {
    pub radius: f64,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    #[serde(default)]
    pub boundary: Vec<[f64; 2]>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use tube_geodesics::geodesic::canonical_staircase_spec;

    fn round_trip(doc: &Document) -> Document {
        Document::parse(&doc.to_json()).unwrap()
    }

    #[test]
    fn domains_round_trip() {
        let domains = [
            TubeDomain::HalfPlaneProduct { n: 3 },
            TubeDomain::Strip,
            TubeDomain::Staircase(StaircaseDomain::canonical()),
            TubeDomain::DiscBase,
        ];
        for d in domains {
            let doc = Document::Domain(DomainDoc::from_domain(&d));
            assert_eq!(round_trip(&doc), doc);
            let Document::Domain(back) = round_trip(&doc) else { unreachable!() };
            assert_eq!(back.to_domain().unwrap(), d);
        }
    }

    #[test]
    fn specs_round_trip() {
        let docs = [
            SpecDoc::from_spec(&GeodesicSpec::Staircase(canonical_staircase_spec())).unwrap(),
            SpecDoc::Halfplane {
                lead: 0,
                components: vec![ComponentDoc { shift: 0.0, alpha: -2.0, atom: [0.6, 0.8], beta: 0.3 }],
            },
            SpecDoc::Strip { h: TermDoc { a_re: 0.5, a_im: 0.0, b: 1.0 }, offset: 0.25 },
            SpecDoc::StaircaseFacet {
                facet: 2,
                normal: ComponentDoc { shift: 0.0, alpha: -3.0, atom: [1.0, 0.0], beta: 0.0 },
                transverse: TransverseDoc { offset: [-1.0, 0.2], slope: 0.0 },
            },
            SpecDoc::DiscBase { a: [[0.1, 0.0], [0.0, 0.1]], b: [1.0, 1.0], offset: [0.0, 0.0] },
            SpecDoc::Candidate {
                measure: MeasureDoc {
                    dim: 1,
                    atoms: vec![AtomDoc { angle: 0.0, mass: vec![-1.0] }],
                    pieces: vec![PieceDoc { start: 1.0, length: 0.5, weight: vec![-0.25] }],
                },
                offset: vec![0.0],
                h: vec![TermDoc { a_re: 0.0, a_im: 0.0, b: 1.0 }],
            },
        ];
        for doc in docs {
            let spec = doc.to_spec().unwrap();
            assert_eq!(SpecDoc::from_spec(&spec).unwrap(), doc);
            let wrapped = Document::GeodesicSpec(doc);
            assert_eq!(round_trip(&wrapped), wrapped);
        }
    }

    #[test]
    fn non_finite_numbers_survive() {
        for x in [f64::NAN, f64::INFINITY, f64::NEG_INFINITY, -0.0, 1e-300, 0.1 + 0.2] {
            let text = serde_json::to_string(&Num(x)).unwrap();
            let back: Num = serde_json::from_str(&text).unwrap();
            assert_eq!(back, Num(x), "{text}");
        }
        assert!(serde_json::from_str::<Num>("\"big\"").is_err());
    }

    #[test]
    fn unknown_fields_and_kinds_are_rejected() {
        assert!(Document::parse(r#"{"kind": "domain", "type": "disc_base", "radius": 2}"#).is_err());
        assert!(Document::parse(r#"{"kind": "map", "type": "strip"}"#).is_err());
        assert!(Document::parse(r#"{"kind": "geodesic_spec", "type": "strip", "h": {"a_re": 1, "a_im": 0, "b": 2, "c": 0}}"#)
            .is_err());
        assert!(matches!(Document::parse("  \n"), Err(CliError::Malformed(_))));
    }

    #[test]
    fn solver_case_names() {
        assert_eq!(parse_case("both_atoms").unwrap(), Case::BothAtoms);
        assert_eq!(parse_case("atom_2").unwrap(), Case::OneAtom(1));
        assert_eq!(parse_case("no_atoms").unwrap(), Case::NoAtoms);
        assert_eq!(parse_case("facet_3").unwrap(), Case::Facet(3));
        for bad in ["atom_0", "atom_3", "facet_0", "facet_x", "all"] {
            assert!(matches!(parse_case(bad), Err(CliError::Invalid(_))), "{bad}");
        }
    }

    #[test]
    fn options_default_when_omitted() {
        let p: ProblemDoc =
            serde_json::from_str(r#"{"domain": {"type": "strip"}, "z": [[0, 0.5]], "w": [[1, -0.5]]}"#).unwrap();
        assert_eq!(p.options, OptionsDoc::default());
        let zero = OptionsDoc { multistart: 0, ..OptionsDoc::default() };
        assert!(zero.to_options().is_err());
    }
}
