//! JSON documents for groupoids, bisections, algebra elements and
//! homomorphism matrices, with a canonical writer.
//!
//! Canonical output sorts object keys, sorts compose triples and unit lists,
//! puts arrays of scalars (and arrays of such arrays) on one line, and ends
//! with a newline. Parsing a canonical document and writing it again
//! reproduces it byte for byte.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::algebra::{AlgebraElement, AlgebraError};
use crate::decomposition::{DecompositionError, HomMatrix};
use crate::groupoid::{Arrow, FiniteGroupoid, GroupoidError, GroupoidTables};
use crate::semigroup::{BisectionSemigroup, GermGroupoid};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed document: {0}")]
    Parse(String),
    #[error(transparent)]
    Groupoid(#[from] GroupoidError),
    #[error(transparent)]
    Matrix(#[from] DecompositionError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl IoError {
    /// 1 for unreadable or malformed input, 2 for documents that parse but
    /// describe something that is not a groupoid.
    pub fn exit_code(&self) -> i32 {
        match self {
            IoError::Groupoid(GroupoidError::Invalid(_)) => 2,
            _ => 1,
        }
    }
}

pub fn read_input(path: &str) -> Result<String, IoError> {
    let io = |e: std::io::Error| IoError::Io { path: path.to_string(), message: e.to_string() };
    if path == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s).map_err(io)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(io)
    }
}

/// Optional provenance of a document.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Meta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Value>,
}

/// The groupoid interchange document: the raw tables plus optional metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupoidDocument {
    #[serde(flatten)]
    pub tables: GroupoidTables,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
}

impl GroupoidDocument {
    pub fn from_groupoid(g: &FiniteGroupoid, meta: Option<Meta>) -> GroupoidDocument {
        GroupoidDocument { tables: g.to_tables(), meta }
    }

    pub fn parse(text: &str) -> Result<GroupoidDocument, IoError> {
        serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))
    }

    /// Sort units and compose triples; the groupoid described is unchanged.
    pub fn canonicalize(&mut self) {
        self.tables.units.sort_unstable();
        self.tables.compose.sort_unstable();
    }

    pub fn groupoid(&self) -> Result<FiniteGroupoid, GroupoidError> {
        FiniteGroupoid::from_tables(&self.tables)
    }

    pub fn to_json(&self) -> String {
        let mut doc = self.clone();
        doc.canonicalize();
        to_canonical_json(&doc)
    }
}

/// Parse and validate a groupoid document.
pub fn load_groupoid(text: &str) -> Result<(GroupoidDocument, Arc<FiniteGroupoid>), IoError> {
    let doc = GroupoidDocument::parse(text)?;
    let g = doc.groupoid()?;
    Ok((doc, Arc::new(g)))
}

/// Bisections as sorted arrow lists inside the groupoid envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BisectionDocument {
    pub groupoid: GroupoidDocument,
    pub bisections: Vec<Vec<Arrow>>,
}

impl BisectionDocument {
    pub fn new(bis: &BisectionSemigroup) -> BisectionDocument {
        BisectionDocument {
            groupoid: GroupoidDocument::from_groupoid(bis.groupoid(), None),
            bisections: bis.bisections().iter().map(|u| u.arrows().to_vec()).collect(),
        }
    }
}

/// A germ groupoid with the representative `(s, x)` of each arrow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GermDocument {
    #[serde(flatten)]
    pub groupoid: GroupoidDocument,
    pub germs: Vec<[usize; 2]>,
}

impl GermDocument {
    pub fn new(germs: &GermGroupoid) -> GermDocument {
        GermDocument {
            groupoid: GroupoidDocument::from_groupoid(&germs.groupoid, None),
            germs: germs.representatives.iter().map(|&(s, x)| [s, x]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementDocument {
    pub coeff: Vec<[f64; 2]>,
}

pub fn load_element(text: &str, g: &Arc<FiniteGroupoid>) -> Result<AlgebraElement, IoError> {
    let doc: ElementDocument = serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))?;
    Ok(AlgebraElement::new(g.clone(), doc.coeff.iter().map(|&[re, im]| Complex64::new(re, im)).collect())?)
}

pub fn element_document(f: &AlgebraElement) -> ElementDocument {
    ElementDocument { coeff: f.coeff().iter().map(|z| [z.re, z.im]).collect() }
}

/// A groupoid given inline or as a path relative to the referring document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DocRef {
    Path(String),
    Inline(GroupoidDocument),
}

impl DocRef {
    pub fn resolve(&self, base: Option<&Path>) -> Result<Arc<FiniteGroupoid>, IoError> {
        match self {
            DocRef::Inline(doc) => Ok(Arc::new(doc.groupoid()?)),
            DocRef::Path(p) => {
                let path: PathBuf = match base {
                    Some(dir) if Path::new(p).is_relative() => dir.join(p),
                    _ => PathBuf::from(p),
                };
                let text = read_input(&path.to_string_lossy())?;
                Ok(load_groupoid(&text)?.1)
            }
        }
    }
}

/// `HomMatrix` JSON: row-major `[re, im]` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomDocument {
    pub source: DocRef,
    pub target: DocRef,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl HomDocument {
    pub fn new(m: &HomMatrix) -> HomDocument {
        let e = m.entries();
        HomDocument {
            source: DocRef::Inline(GroupoidDocument::from_groupoid(m.source(), None)),
            target: DocRef::Inline(GroupoidDocument::from_groupoid(m.target(), None)),
            rows: e.nrows(),
            cols: e.ncols(),
            entries: (0..e.nrows()).flat_map(|i| (0..e.ncols()).map(move |j| [e[(i, j)].re, e[(i, j)].im])).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(self)
    }
}

/// Parse a homomorphism document; groupoid paths resolve against `base`.
pub fn load_hom(text: &str, base: Option<&Path>) -> Result<HomMatrix, IoError> {
    let doc: HomDocument = serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))?;
    if doc.entries.len() != doc.rows * doc.cols {
        return Err(IoError::Parse(format!(
            "{} entries given for a {}×{} matrix",
            doc.entries.len(),
            doc.rows,
            doc.cols
        )));
    }
    let source = doc.source.resolve(base)?;
    let target = doc.target.resolve(base)?;
    let entries = DMatrix::from_fn(doc.rows, doc.cols, |i, j| {
        let [re, im] = doc.entries[i * doc.cols + j];
        Complex64::new(re, im)
    });
    Ok(HomMatrix::new(source, target, entries)?)
}

/// Canonical JSON text of any serializable value.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("serializable value");
    let mut out = String::new();
    write_value(&v, 0, &mut out);
    out.push('\n');
    out
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|x| !x.is_array() && !x.is_object()),
        Value::Object(_) => false,
        _ => true,
    }
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(item, indent + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        Value::Array(items) if items.iter().all(is_flat) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(item, indent, out);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(item, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    #[test]
    fn document_round_trip_is_byte_exact() {
        let g = families::pair(2).unwrap();
        let meta = Meta { name: Some("R2".into()), family: Some("pair".into()), params: Some(serde_json::json!(2)) };
        let text = GroupoidDocument::from_groupoid(&g, Some(meta)).to_json();
        let (doc, back) = load_groupoid(&text).unwrap();
        assert_eq!(*back, g);
        assert_eq!(doc.to_json(), text);
        assert!(text.contains("\"compose\": [[0, 0, 0], "));
    }

    #[test]
    fn invalid_documents() {
        assert_eq!(GroupoidDocument::parse("{").unwrap_err().exit_code(), 1);
        let mut t = families::pair(2).unwrap().to_tables();
        t.src[0] = 1;
        let text = to_canonical_json(&GroupoidDocument { tables: t, meta: None });
        assert_eq!(load_groupoid(&text).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn hom_document_round_trip() {
        let g = Arc::new(families::cyclic_group(2).unwrap());
        let (_, m) = crate::decomposition::quotient_star_hom(&g);
        let text = HomDocument::new(&m).to_json();
        let back = load_hom(&text, None).unwrap();
        assert_eq!(back, m);
        assert_eq!(HomDocument::new(&back).to_json(), text);
    }

    #[test]
    fn hom_document_with_paths() {
        let dir = tempfile::tempdir().unwrap();
        let g = families::pair(2).unwrap();
        std::fs::write(dir.path().join("g.json"), GroupoidDocument::from_groupoid(&g, None).to_json()).unwrap();
        let mut entries = vec![[0.0, 0.0]; 16];
        for i in 0..4 {
            entries[i * 5] = [1.0, 0.0];
        }
        let doc = HomDocument {
            source: DocRef::Path("g.json".into()),
            target: DocRef::Path("g.json".into()),
            rows: 4,
            cols: 4,
            entries,
        };
        let m = load_hom(&doc.to_json(), Some(dir.path())).unwrap();
        assert_eq!(m, HomMatrix::identity(Arc::new(g)));
        assert!(matches!(load_hom(&doc.to_json(), None), Err(IoError::Io { .. })));
    }

    #[test]
    fn element_documents() {
        let g = Arc::new(families::pair(2).unwrap());
        let f = load_element(r#"{"coeff": [[1, 0], [0, 1], [0.5, 0], [0, 0]]}"#, &g).unwrap();
        assert_eq!(f.get(1), Complex64::new(0.0, 1.0));
        assert!(load_element(r#"{"coeff": [[1, 0]]}"#, &g).is_err());
    }
}
