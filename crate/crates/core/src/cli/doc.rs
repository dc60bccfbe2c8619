//! The JSON workspace document: named groups, homomorphisms, amalgams and
//! presentations.
//!
//! ```json
//! {
//!   "schema": 1,
//!   "groups": { "C4": {"cyclic": 4}, "C2": {"cyclic": 2},
//!               "S3": {"perm": {"degree": 3, "gens": [[[1,2,3]], [[1,2]]]}},
//!               "C2xC2": {"product": ["C2", "C2"]} },
//!   "homs": { "i": {"source": "C2", "target": "C4", "images": {"g": "g^2"}} },
//!   "amalgams": { "x": {"left": "C4", "right": "C4", "edge": "C2",
//!                       "embed_left": "i", "embed_right": {"g": "g^2"}} },
//!   "presentations": { "p": "ring Z[x] / x^2 = 1" }
//! }
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::Failure;
use crate::amalgam::{make_amalgam, Amalgam};
use crate::group::{
    cyclic, direct_product, from_permutations, hom_by_labels, FiniteGroup, GroupHom, DEFAULT_CAP,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupDef {
    Cyclic(usize),
    Product([String; 2]),
    Perm {
        degree: usize,
        gens: Vec<Vec<Vec<usize>>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomDef {
    pub source: String,
    pub target: String,
    /// Generator label of the source ↦ element label of the target.
    pub images: BTreeMap<String, String>,
}

/// An embedding given by name or inline as generator images.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EmbedDef {
    Named(String),
    Inline(BTreeMap<String, String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamDef {
    pub left: String,
    pub right: String,
    pub edge: String,
    pub embed_left: EmbedDef,
    pub embed_right: EmbedDef,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PresentationDef {
    Text(String),
    Annotated {
        text: String,
        /// Rank asserted from outside (e.g. a count of torsion classes).
        #[serde(default)]
        expected_rank: Option<usize>,
        #[serde(default)]
        note: Option<String>,
    },
}

impl PresentationDef {
    pub fn text(&self) -> &str {
        match self {
            PresentationDef::Text(t) => t,
            PresentationDef::Annotated { text, .. } => text,
        }
    }

    pub fn expected_rank(&self) -> Option<usize> {
        match self {
            PresentationDef::Text(_) => None,
            PresentationDef::Annotated { expected_rank, .. } => *expected_rank,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Options {
    pub cap: usize,
    pub oracle_bound: usize,
    pub include_identity_np: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            cap: DEFAULT_CAP,
            oracle_bound: 6,
            include_identity_np: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkspaceDoc {
    pub schema: u32,
    #[serde(default)]
    pub groups: BTreeMap<String, GroupDef>,
    #[serde(default)]
    pub homs: BTreeMap<String, HomDef>,
    #[serde(default)]
    pub amalgams: BTreeMap<String, AmalgamDef>,
    #[serde(default)]
    pub presentations: BTreeMap<String, PresentationDef>,
    #[serde(default)]
    pub options: Options,
}

fn input(code: &str, msg: impl Into<String>) -> Failure {
    Failure::input(code, msg)
}

impl WorkspaceDoc {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        let doc: WorkspaceDoc =
            serde_json::from_str(text).map_err(|e| input("cli/bad-document", e.to_string()))?;
        if doc.schema != SCHEMA_VERSION {
            return Err(input(
                "cli/schema",
                format!("unsupported schema {}, expected {SCHEMA_VERSION}", doc.schema),
            ));
        }
        Ok(doc)
    }

    pub fn group(&self, name: &str, cap: usize) -> Result<Arc<FiniteGroup>, Failure> {
        let mut cache = BTreeMap::new();
        self.group_inner(name, cap, &mut BTreeSet::new(), &mut cache)
    }

    fn group_inner(
        &self,
        name: &str,
        cap: usize,
        visiting: &mut BTreeSet<String>,
        cache: &mut BTreeMap<String, Arc<FiniteGroup>>,
    ) -> Result<Arc<FiniteGroup>, Failure> {
        if let Some(g) = cache.get(name) {
            return Ok(g.clone());
        }
        let def = self
            .groups
            .get(name)
            .ok_or_else(|| input("cli/unknown-name", format!("no group named {name}")))?;
        if !visiting.insert(name.to_string()) {
            return Err(input("cli/cyclic-definition", format!("group {name} refers to itself")));
        }
        let g = match def {
            GroupDef::Cyclic(n) => cyclic(*n, cap)?,
            GroupDef::Product([a, b]) => {
                let a = self.group_inner(a, cap, visiting, cache)?;
                let b = self.group_inner(b, cap, visiting, cache)?;
                direct_product(&a, &b, cap)?
            }
            GroupDef::Perm { degree, gens } => from_permutations(*degree, gens, cap)?,
        };
        visiting.remove(name);
        let g = Arc::new(g);
        cache.insert(name.to_string(), g.clone());
        Ok(g)
    }

    fn embedding(
        &self,
        def: &EmbedDef,
        source: &Arc<FiniteGroup>,
        target: &Arc<FiniteGroup>,
        source_name: &str,
        target_name: &str,
    ) -> Result<GroupHom, Failure> {
        let images = match def {
            EmbedDef::Named(h) => {
                let hd = self
                    .homs
                    .get(h)
                    .ok_or_else(|| input("cli/unknown-name", format!("no hom named {h}")))?;
                if hd.source != source_name || hd.target != target_name {
                    return Err(input(
                        "cli/hom-mismatch",
                        format!(
                            "hom {h} goes {} -> {}, needed {source_name} -> {target_name}",
                            hd.source, hd.target
                        ),
                    ));
                }
                &hd.images
            }
            EmbedDef::Inline(m) => m,
        };
        let pairs: Vec<(String, String)> =
            images.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        Ok(hom_by_labels(source.clone(), target.clone(), &pairs)?)
    }

    pub fn hom(&self, name: &str, cap: usize) -> Result<GroupHom, Failure> {
        let hd = self
            .homs
            .get(name)
            .ok_or_else(|| input("cli/unknown-name", format!("no hom named {name}")))?;
        let s = self.group(&hd.source, cap)?;
        let t = self.group(&hd.target, cap)?;
        self.embedding(&EmbedDef::Named(name.into()), &s, &t, &hd.source, &hd.target)
    }

    pub fn amalgam(&self, name: &str, cap: usize) -> Result<Amalgam, Failure> {
        let d = self
            .amalgams
            .get(name)
            .ok_or_else(|| input("cli/unknown-name", format!("no amalgam named {name}")))?;
        let left = self.group(&d.left, cap)?;
        let right = self.group(&d.right, cap)?;
        let edge = self.group(&d.edge, cap)?;
        let el = self.embedding(&d.embed_left, &edge, &left, &d.edge, &d.left)?;
        let er = self.embedding(&d.embed_right, &edge, &right, &d.edge, &d.right)?;
        Ok(make_amalgam(left, right, edge, el, er)?)
    }

    pub fn presentation(&self, name: &str) -> Result<&PresentationDef, Failure> {
        self.presentations
            .get(name)
            .ok_or_else(|| input("cli/unknown-name", format!("no presentation named {name}")))
    }

    /// Resolves every definition once, reporting the first problem.
    pub fn validate(&self) -> Result<(), Failure> {
        let cap = self.options.cap;
        for g in self.groups.keys() {
            self.group(g, cap)?;
        }
        for h in self.homs.keys() {
            self.hom(h, cap)?;
        }
        for a in self.amalgams.keys() {
            self.amalgam(a, cap)?;
        }
        for p in self.presentations.values() {
            crate::presentation::parse_presentation(p.text())?;
        }
        Ok(())
    }
}
