//! Versioned JSON form of a [`DissectionPlan`].
//!
//! Rationals are written as `"p/q"` strings and approximate values as the
//! shortest round-tripping decimal, so parsing and re-serializing an emitted
//! document reproduces it byte for byte.

use serde::{Deserialize, Serialize};

use crate::affine_types::AffineClass;
use crate::composition::Op;
use crate::geometry::{Point, Quad};
use crate::ratio::Ratio;
use crate::realizer::{Cut, DissectionPlan, Provenance};
use crate::treesearch::ExtTree;

pub const DOCUMENT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DocumentError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("unsupported document version {0}")]
    Version(u32),
    #[error("invalid {field}: {reason}")]
    Field { field: String, reason: String },
}

fn field_err(field: impl Into<String>, reason: impl ToString) -> DocumentError {
    DocumentError::Field {
        field: field.into(),
        reason: reason.to_string(),
    }
}

pub type PointDoc = [String; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassDoc {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<String>,
    /// Present when a parameter is approximate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamDoc {
    pub name: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeDoc {
    Node {
        op: String,
        #[serde(rename = "flipL")]
        flip_left: bool,
        #[serde(rename = "flipR")]
        flip_right: bool,
        left: Box<TreeDoc>,
        right: Box<TreeDoc>,
    },
    Leaf {
        leaf: bool,
    },
    Construction {
        construction: String,
        params: Vec<ParamDoc>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TileDoc {
    pub points: Vec<PointDoc>,
    pub class: ClassDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutDoc {
    pub parent: Vec<PointDoc>,
    pub segment: Vec<PointDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanDocument {
    pub version: u32,
    pub class: ClassDoc,
    pub gc: bool,
    pub tree: TreeDoc,
    pub root: Vec<PointDoc>,
    pub tiles: Vec<TileDoc>,
    #[serde(default)]
    pub cuts: Vec<CutDoc>,
    #[serde(default)]
    pub pinned: Vec<ParamDoc>,
    pub tol: String,
}

pub fn class_doc(c: &AffineClass) -> ClassDoc {
    let s = |r: &Ratio| Some(r.to_string());
    let tol = (!c.is_exact()).then(|| format!("{:?}", c.tol()));
    match c {
        AffineClass::Q { alpha, beta } => ClassDoc {
            kind: "Q".into(),
            alpha: s(alpha),
            beta: s(beta),
            gamma: None,
            tol,
        },
        AffineClass::T { gamma } => ClassDoc {
            kind: "T".into(),
            alpha: None,
            beta: None,
            gamma: s(gamma),
            tol,
        },
        AffineClass::P => ClassDoc {
            kind: "P".into(),
            alpha: None,
            beta: None,
            gamma: None,
            tol: None,
        },
    }
}

fn ratio(field: &str, s: &str, tol: f64) -> Result<Ratio, DocumentError> {
    Ratio::parse_with_tol(s, tol).map_err(|e| field_err(field, e))
}

pub fn parse_class(
    field: &str,
    d: &ClassDoc,
    default_tol: f64,
) -> Result<AffineClass, DocumentError> {
    let tol = match &d.tol {
        Some(t) => ratio(field, t, 0.0)?.to_f64(),
        None => default_tol,
    };
    let get = |name: &str, v: &Option<String>| -> Result<Ratio, DocumentError> {
        let s = v
            .as_ref()
            .ok_or_else(|| field_err(field, format!("missing {name}")))?;
        ratio(field, s, tol)
    };
    let extra = |v: &Option<String>, name: &str| match v {
        Some(_) => Err(field_err(
            field,
            format!("unexpected {name} for kind {}", d.kind),
        )),
        None => Ok(()),
    };
    let c = match d.kind.as_str() {
        "Q" => {
            extra(&d.gamma, "gamma")?;
            AffineClass::q(get("alpha", &d.alpha)?, get("beta", &d.beta)?)
        }
        "T" => {
            extra(&d.alpha, "alpha")?;
            extra(&d.beta, "beta")?;
            AffineClass::t(get("gamma", &d.gamma)?)
        }
        "P" => {
            extra(&d.alpha, "alpha")?;
            extra(&d.beta, "beta")?;
            extra(&d.gamma, "gamma")?;
            Ok(AffineClass::P)
        }
        other => return Err(field_err(field, format!("unknown kind {other:?}"))),
    };
    c.map_err(|e| field_err(field, e))
}

fn point_doc(p: &Point) -> PointDoc {
    [p.x.to_string(), p.y.to_string()]
}

fn points_doc(ps: &[Point]) -> Vec<PointDoc> {
    ps.iter().map(point_doc).collect()
}

fn parse_points<const N: usize>(
    field: &str,
    ps: &[PointDoc],
    tol: f64,
) -> Result<[Point; N], DocumentError> {
    if ps.len() != N {
        return Err(field_err(
            field,
            format!("expected {N} points, got {}", ps.len()),
        ));
    }
    let v = ps
        .iter()
        .map(|[x, y]| Ok(Point::new(ratio(field, x, tol)?, ratio(field, y, tol)?)))
        .collect::<Result<Vec<_>, DocumentError>>()?;
    Ok(v.try_into().expect("length checked"))
}

fn params_doc(ps: &[(String, Ratio)]) -> Vec<ParamDoc> {
    ps.iter()
        .map(|(name, v)| ParamDoc {
            name: name.clone(),
            value: v.to_string(),
        })
        .collect()
}

fn parse_params(
    field: &str,
    ps: &[ParamDoc],
    tol: f64,
) -> Result<Vec<(String, Ratio)>, DocumentError> {
    ps.iter()
        .map(|p| Ok((p.name.clone(), ratio(field, &p.value, tol)?)))
        .collect()
}

fn tree_doc(t: &ExtTree) -> TreeDoc {
    match t {
        ExtTree::Leaf => TreeDoc::Leaf { leaf: true },
        ExtTree::Node {
            op,
            left,
            left_flip,
            right,
            right_flip,
        } => TreeDoc::Node {
            op: op.name().into(),
            flip_left: *left_flip,
            flip_right: *right_flip,
            left: Box::new(tree_doc(left)),
            right: Box::new(tree_doc(right)),
        },
    }
}

fn parse_tree(d: &TreeDoc) -> Result<ExtTree, DocumentError> {
    match d {
        TreeDoc::Leaf { leaf: true } => Ok(ExtTree::Leaf),
        TreeDoc::Leaf { leaf: false } => Err(field_err("tree", "leaf must be true")),
        TreeDoc::Node {
            op,
            flip_left,
            flip_right,
            left,
            right,
        } => {
            let op =
                Op::parse(op).ok_or_else(|| field_err("tree", format!("unknown op {op:?}")))?;
            Ok(ExtTree::node(
                op,
                parse_tree(left)?,
                *flip_left,
                parse_tree(right)?,
                *flip_right,
            ))
        }
        TreeDoc::Construction { .. } => Err(field_err(
            "tree",
            "a construction cannot appear inside a tree",
        )),
    }
}

impl PlanDocument {
    pub fn from_plan(plan: &DissectionPlan) -> Self {
        let tile_class = class_doc(&plan.tile_class);
        PlanDocument {
            version: DOCUMENT_VERSION,
            class: class_doc(&plan.root_class),
            gc: plan.gc,
            tree: match &plan.provenance {
                Provenance::Tree(t) => tree_doc(t),
                Provenance::Construction { name, params } => TreeDoc::Construction {
                    construction: name.clone(),
                    params: params_doc(params),
                },
            },
            root: points_doc(&plan.root),
            tiles: plan
                .tiles
                .iter()
                .map(|t| TileDoc {
                    points: points_doc(t),
                    class: tile_class.clone(),
                })
                .collect(),
            cuts: plan
                .cuts
                .iter()
                .map(|c| CutDoc {
                    parent: points_doc(&c.parent),
                    segment: points_doc(&c.segment),
                })
                .collect(),
            pinned: params_doc(&plan.pinned),
            tol: plan.tol.to_string(),
        }
    }

    /// Validates the document and rebuilds the plan. All tiles must name the
    /// same class.
    pub fn to_plan(&self) -> Result<DissectionPlan, DocumentError> {
        if self.version != DOCUMENT_VERSION {
            return Err(DocumentError::Version(self.version));
        }
        let tol = ratio("tol", &self.tol, 0.0)?;
        if tol.is_negative() {
            return Err(field_err("tol", "negative"));
        }
        let t = tol.to_f64();
        let root_class = parse_class("class", &self.class, t)?;
        let first = self
            .tiles
            .first()
            .ok_or_else(|| field_err("tiles", "no tiles"))?;
        let tile_class = parse_class("tiles", &first.class, t)?;
        let mut tiles = Vec::with_capacity(self.tiles.len());
        for (k, tile) in self.tiles.iter().enumerate() {
            if tile.class != first.class {
                return Err(field_err(
                    format!("tiles[{k}]"),
                    "tiles name different classes",
                ));
            }
            tiles.push(parse_points::<4>(&format!("tiles[{k}]"), &tile.points, t)?);
        }
        let cuts = self
            .cuts
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let f = format!("cuts[{k}]");
                Ok(Cut {
                    parent: parse_points::<4>(&f, &c.parent, t)?,
                    segment: parse_points::<2>(&f, &c.segment, t)?,
                })
            })
            .collect::<Result<Vec<_>, DocumentError>>()?;
        let provenance = match &self.tree {
            TreeDoc::Construction {
                construction,
                params,
            } => Provenance::Construction {
                name: construction.clone(),
                params: parse_params("tree", params, t)?,
            },
            other => Provenance::Tree(parse_tree(other)?),
        };
        let root: Quad = parse_points::<4>("root", &self.root, t)?;
        Ok(DissectionPlan {
            root,
            root_class,
            tiles,
            tile_class,
            provenance,
            pinned: parse_params("pinned", &self.pinned, t)?,
            gc: self.gc,
            cuts,
            tol,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data");
        s.push('\n');
        s
    }

    /// Parses and validates a document.
    pub fn parse(s: &str) -> Result<Self, DocumentError> {
        let doc: PlanDocument =
            serde_json::from_str(s).map_err(|e| DocumentError::Json(e.to_string()))?;
        doc.to_plan()?;
        Ok(doc)
    }
}

pub fn plan_to_json(plan: &DissectionPlan) -> String {
    PlanDocument::from_plan(plan).to_json()
}

pub fn plan_from_json(s: &str) -> Result<DissectionPlan, DocumentError> {
    PlanDocument::parse(s)?.to_plan()
}
