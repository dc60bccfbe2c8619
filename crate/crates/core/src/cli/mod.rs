//! Batch commands over a workspace document. Each command returns a typed
//! report that serializes to deterministic JSON and has a one-paragraph
//! human summary.

mod doc;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use doc::{AmalgamDef, EmbedDef, GroupDef, HomDef, Options, PresentationDef, WorkspaceDoc};

use crate::amalgam::oracle::{check_against_oracle, Disagreement};
use crate::amalgam::{class_report, is_p_power, torsion_classes, AmalgamError, ClassReportEntry};
use crate::characters::{character_table, verify_table, CharacterError, CharacterTableJson};
use crate::group::GroupError;
use crate::ktheory::{gl_rank_check, k_ranks, GLRankInput, GLRankReport, KError, KReport};
use crate::modp::is_prime;
use crate::presentation::{
    build_model, certify_isomorphism, pair_coords, parse_presentation, search_degree_one,
    Certificate, CertifyFailure, PairChoice, PresentationError, PresentationKind, RingModel,
};
use crate::rational::Z;
use crate::repring::{compute, RFRingJson, RepRingError};

/// A command failure, with a module-qualified code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub code: String,
    pub message: String,
    /// A mathematical check failed, as opposed to malformed input.
    pub math: bool,
}

impl Failure {
    pub fn input(code: &str, msg: impl Into<String>) -> Self {
        Failure {
            code: code.into(),
            message: msg.into(),
            math: false,
        }
    }

    pub fn math(code: &str, msg: impl Into<String>) -> Self {
        Failure {
            code: code.into(),
            message: msg.into(),
            math: true,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.math {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}]: {}", self.code, self.message)
    }
}

impl std::error::Error for Failure {}

macro_rules! failure_from {
    ($t:ty, $math:expr) => {
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                #[allow(clippy::redundant_closure_call)]
                let math = ($math)(&e);
                Failure {
                    code: e.code().to_string(),
                    message: e.to_string(),
                    math,
                }
            }
        }
    };
}

failure_from!(GroupError, |_: &GroupError| false);
failure_from!(AmalgamError, |_: &AmalgamError| false);
failure_from!(CharacterError, |_: &CharacterError| true);
failure_from!(RepRingError, RepRingError::is_math_failure);
failure_from!(PresentationError, PresentationError::is_math_failure);
failure_from!(CertifyFailure, CertifyFailure::is_math_failure);
failure_from!(KError, KError::is_math_failure);

fn torsion_primes(orders: &[usize]) -> Vec<u64> {
    let mut ps: Vec<u64> = (2..=orders.iter().copied().max().unwrap_or(1) as u64)
        .filter(|&p| is_prime(p) && orders.iter().any(|&o| (o as u64).is_multiple_of(p)))
        .collect();
    ps.dedup();
    ps
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub bound: usize,
    pub pairs: usize,
    pub disagreements: Vec<Disagreement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassesReport {
    pub amalgam: String,
    pub n_torsion: usize,
    pub orders: Vec<usize>,
    pub include_identity_np: bool,
    pub n_p: BTreeMap<u64, usize>,
    pub classes: Vec<ClassReportEntry>,
    pub oracle: OracleSummary,
}

impl ClassesReport {
    pub fn summary(&self) -> String {
        format!(
            "{}: {} torsion classes, orders {:?}; n_p {:?}; oracle (bound {}) agrees on {} pairs",
            self.amalgam,
            self.n_torsion,
            self.orders,
            self.n_p,
            self.oracle.bound,
            self.oracle.pairs
        )
    }
}

/// Torsion classes with fusion certificates, checked against the word oracle.
pub fn cmd_classes(doc: &WorkspaceDoc, name: &str, opts: &Options) -> Result<ClassesReport, Failure> {
    let a = doc.amalgam(name, opts.cap)?;
    let t = torsion_classes(&a);
    t.verify_certificates(&a)
        .map_err(|e| Failure::math("amalgam-fusion/bad-certificate", e))?;
    let orders = t.orders();
    let n_p = torsion_primes(&orders)
        .into_iter()
        .map(|p| {
            let n = orders
                .iter()
                .filter(|&&o| is_p_power(o, p, opts.include_identity_np))
                .count();
            (p, n)
        })
        .collect();
    let (pairs, disagreements) = check_against_oracle(&a, &t, opts.oracle_bound);
    let report = ClassesReport {
        amalgam: name.to_string(),
        n_torsion: t.len(),
        orders,
        include_identity_np: opts.include_identity_np,
        n_p,
        classes: class_report(&a, &t),
        oracle: OracleSummary {
            bound: opts.oracle_bound,
            pairs,
            disagreements,
        },
    };
    if !report.oracle.disagreements.is_empty() {
        return Err(Failure::math(
            "amalgam-fusion/oracle-disagreement",
            format!("{:?}", report.oracle.disagreements),
        ));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingReport {
    pub amalgam: String,
    pub prime: Option<u64>,
    pub rank: usize,
    /// `n(Γ)`, or `n_p(Γ)` counted with the identity.
    pub torsion_count: usize,
    pub ring: RFRingJson,
}

impl RingReport {
    pub fn summary(&self) -> String {
        let which = match self.prime {
            Some(p) => format!("R_F({p})"),
            None => "R_F".into(),
        };
        format!(
            "{which}({}) has rank {} = number of torsion classes {}",
            self.amalgam, self.rank, self.torsion_count
        )
    }
}

pub fn cmd_ring(
    doc: &WorkspaceDoc,
    name: &str,
    prime: Option<u64>,
    opts: &Options,
) -> Result<RingReport, Failure> {
    let a = doc.amalgam(name, opts.cap)?;
    let ar = compute(&a)?;
    let ring = match prime {
        None => ar.ring.clone(),
        Some(p) => {
            let r = ar.p_local(p)?;
            let q = ar.p_local_by_projection(p)?;
            if r.rank() != q.rank() {
                return Err(Failure::math(
                    "rep-ring/p-local-mismatch",
                    format!("evaluation gives rank {}, projection {}", r.rank(), q.rank()),
                ));
            }
            r
        }
    };
    ring.check_structure()
        .map_err(|e| Failure::math("rep-ring/structure", e))?;
    let torsion_count = match prime {
        None => ar.classes.len(),
        Some(p) => ar
            .classes
            .orders()
            .into_iter()
            .filter(|&o| is_p_power(o, p, true))
            .count(),
    };
    if ring.rank() != torsion_count {
        return Err(Failure::math(
            "rep-ring/rank-mismatch",
            format!("rank {} but {} torsion classes", ring.rank(), torsion_count),
        ));
    }
    Ok(RingReport {
        amalgam: name.to_string(),
        prime,
        rank: ring.rank(),
        torsion_count,
        ring: ring.to_json(),
    })
}

/// How a generator's image is given on the command line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImageSpec {
    /// Left and right irreducible character rows.
    Pair(usize, usize),
    #[serde(with = "crate::rational::serde_z_vec")]
    Coords(Vec<Z>),
}

/// Parses `gen=pair:i,j` or `gen=coords:c1,c2,...`.
pub fn parse_map(s: &str) -> Result<(String, ImageSpec), Failure> {
    let bad = || {
        Failure::input(
            "cli/bad-map",
            format!("expected gen=pair:i,j or gen=coords:c1,...; got {s:?}"),
        )
    };
    let (g, rest) = s.split_once('=').ok_or_else(bad)?;
    let (kind, args) = rest.split_once(':').ok_or_else(bad)?;
    let nums: Vec<&str> = args.split(',').map(str::trim).collect();
    let spec = match kind.trim() {
        "pair" => match nums[..] {
            [i, j] => ImageSpec::Pair(i.parse().map_err(|_| bad())?, j.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        },
        "coords" => ImageSpec::Coords(
            nums.iter()
                .map(|x| x.parse::<Z>().map_err(|_| bad()))
                .collect::<Result<_, _>>()?,
        ),
        _ => return Err(bad()),
    };
    Ok((g.trim().to_string(), spec))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyMode {
    PresentationOnly,
    Isomorphism,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub presentation: String,
    pub kind: PresentationKind,
    pub generators: Vec<String>,
    pub relations: Vec<String>,
    pub mode: VerifyMode,
    pub model: RingModel,
    pub expected_rank: Option<usize>,
    pub against: Option<String>,
    pub prime: Option<u64>,
    pub choices: Option<Vec<PairChoice>>,
    pub tried: Option<usize>,
    pub certificate: Option<Certificate>,
}

impl VerifyReport {
    pub fn summary(&self) -> String {
        let mut s = format!(
            "{}: {} relations, consistent rank-{} model",
            self.presentation,
            self.relations.len(),
            self.model.rank()
        );
        if let Some(r) = self.expected_rank {
            s.push_str(&format!(" (expected rank {r})"));
        }
        match (&self.against, &self.certificate) {
            (Some(a), Some(c)) => {
                s.push_str(&format!(
                    "; isomorphic to R_F({a}) with determinant {}",
                    c.determinant
                ));
                if let Some(ch) = &self.choices {
                    for (g, pc) in self.generators.iter().zip(ch) {
                        s.push_str(&format!("; {g} = ({}, {})", pc.left, pc.right));
                    }
                }
            }
            _ => s.push_str("; presentation-only verification"),
        }
        s
    }
}

pub struct VerifyArgs<'a> {
    pub against: Option<&'a str>,
    pub prime: Option<u64>,
    pub maps: Vec<(String, ImageSpec)>,
    pub search_degree_one: bool,
}

pub fn cmd_verify(
    doc: &WorkspaceDoc,
    name: &str,
    args: &VerifyArgs,
    opts: &Options,
) -> Result<VerifyReport, Failure> {
    let def = doc.presentation(name)?;
    let p = parse_presentation(def.text())?;
    let model = build_model(&p)?;
    if let Some(r) = def.expected_rank() {
        if r != model.rank() {
            return Err(Failure::math(
                "ring-presentations/rank-mismatch",
                format!("model has rank {}, expected {r}", model.rank()),
            ));
        }
    }
    let mut report = VerifyReport {
        presentation: name.to_string(),
        kind: p.kind.clone(),
        generators: p.generators.clone(),
        relations: p.relation_strings(),
        mode: VerifyMode::PresentationOnly,
        model: model.clone(),
        expected_rank: def.expected_rank(),
        against: args.against.map(str::to_string),
        prime: args.prime,
        choices: None,
        tried: None,
        certificate: None,
    };
    let Some(against) = args.against else {
        if !args.maps.is_empty() || args.search_degree_one {
            return Err(Failure::input(
                "cli/missing-against",
                "--map and --search-degree-one need --against",
            ));
        }
        return Ok(report);
    };
    report.mode = VerifyMode::Isomorphism;
    let a = doc.amalgam(against, opts.cap)?;
    let ar = compute(&a)?;
    let ring = match args.prime {
        Some(q) => ar.p_local(q)?,
        None => ar.ring.clone(),
    };
    if args.search_degree_one {
        let hit = search_degree_one(&p, &model, &ar, &ring)?;
        report.choices = Some(hit.choices);
        report.tried = Some(hit.tried);
        report.certificate = Some(hit.certificate);
        return Ok(report);
    }
    let mut images = vec![];
    for g in &p.generators {
        let spec = args
            .maps
            .iter()
            .find(|(k, _)| k == g)
            .map(|(_, s)| s)
            .ok_or_else(|| Failure::input("cli/missing-map", format!("no image for {g}")))?;
        images.push(match spec {
            ImageSpec::Coords(c) => c.clone(),
            ImageSpec::Pair(i, j) => {
                let (nl, nr) = (ar.tables.left.len(), ar.tables.right.len());
                if *i >= nl || *j >= nr {
                    return Err(Failure::input(
                        "cli/bad-map",
                        format!("pair ({i}, {j}) out of range ({nl} x {nr} irreducibles)"),
                    ));
                }
                pair_coords(&ar, &ring, *i, *j)?.ok_or_else(|| {
                    CertifyFailure::ImageNotInLattice {
                        generator: g.clone(),
                    }
                })?
            }
        });
    }
    report.certificate = Some(certify_isomorphism(&p, &model, &ring, &images)?);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KtheoryReport {
    pub amalgam: String,
    #[serde(flatten)]
    pub report: KReport,
}

impl KtheoryReport {
    pub fn summary(&self) -> String {
        let r = &self.report;
        let mut s = format!(
            "{} at p={}: v_p = {} - {} - {} + {} = {}; rank K0 = {}, rank K1 = {}",
            self.amalgam,
            r.p,
            r.n_p_gamma,
            r.n_p_left,
            r.n_p_right,
            r.n_p_edge,
            r.v_p,
            r.rank_k0,
            r.rank_k1
        );
        if r.v_p_negative {
            s.push_str(" (warning: v_p < 0)");
        }
        s
    }
}

pub fn cmd_ktheory(
    doc: &WorkspaceDoc,
    name: &str,
    prime: u64,
    opts: &Options,
) -> Result<KtheoryReport, Failure> {
    let a = doc.amalgam(name, opts.cap)?;
    let ar = compute(&a)?;
    Ok(KtheoryReport {
        amalgam: name.to_string(),
        report: k_ranks(&ar, prime, opts.include_identity_np)?,
    })
}

pub fn glrank_summary(r: &GLRankReport) -> String {
    format!(
        "p={}, Cl={}, orbits {:?}: invariant rank {}, rank R_F = {} - ({} - 1) = {} = 1 + Cl",
        r.p, r.class_number, r.orbit_sizes, r.rank_invariants, r.rank_invariants, r.t, r.rank_rf
    )
}

pub fn cmd_glrank(p: u64, class_number: u64, orbits: &[u64]) -> Result<GLRankReport, Failure> {
    Ok(gl_rank_check(&GLRankInput {
        p,
        class_number,
        orbit_sizes: orbits.to_vec(),
    })?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartabReport {
    pub group: String,
    pub table: CharacterTableJson,
}

impl ChartabReport {
    pub fn summary(&self) -> String {
        let sq: u64 = self.table.degrees.iter().map(|d| d * d).sum();
        format!(
            "{}: order {}, {} classes, degrees {:?} (sum of squares {sq}), orthogonality verified",
            self.group,
            self.table.order,
            self.table.classes.len(),
            self.table.degrees
        )
    }
}

pub fn cmd_chartab(doc: &WorkspaceDoc, name: &str, opts: &Options) -> Result<ChartabReport, Failure> {
    let g = doc.group(name, opts.cap)?;
    let t = character_table(&g)?;
    verify_table(&t).map_err(|e| Failure::math("characters/verification", e))?;
    Ok(ChartabReport {
        group: name.to_string(),
        table: t.to_json(),
    })
}

/// Deterministic JSON text for a report.
pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
    s.push('\n');
    s
}

