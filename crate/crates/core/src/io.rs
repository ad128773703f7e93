//! JSON file formats for spaces, maps and witnesses.
//!
//! Complex numbers are `[re, im]` pairs; a matrix is an array of rows.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::linmap::LinearMapRep;
use crate::opspace::OperatorSpace;

pub type ComplexPair = [f64; 2];
pub type MatrixJson = Vec<Vec<ComplexPair>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceFile {
    pub label: String,
    pub ambient_dim: usize,
    pub basis: Vec<MatrixJson>,
}

/// A space given inline or as a path relative to the referring file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpaceRef {
    Path(String),
    Inline(SpaceFile),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapFile {
    pub label: String,
    pub domain: SpaceRef,
    pub codomain: SpaceRef,
    /// One entry per domain basis element, in codomain coordinates.
    pub action: Vec<Vec<ComplexPair>>,
}

pub fn matrix_to_json(m: &CMat) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<CMat> {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse("ragged matrix rows".into()));
    }
    Ok(CMat::from_fn(n, cols, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

fn coords_from_json(v: &[ComplexPair]) -> Vec<C64> {
    v.iter().map(|p| C64::new(p[0], p[1])).collect()
}

impl SpaceFile {
    pub fn from_space(space: &OperatorSpace) -> Self {
        Self {
            label: space.label().to_string(),
            ambient_dim: space.ambient_dim(),
            basis: space.basis().iter().map(matrix_to_json).collect(),
        }
    }

    pub fn to_space(&self) -> Result<OperatorSpace> {
        let basis = self.basis.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?;
        OperatorSpace::new(self.ambient_dim, basis, self.label.clone())
    }
}

impl MapFile {
    pub fn from_map(map: &LinearMapRep) -> Self {
        Self {
            label: map.label().to_string(),
            domain: SpaceRef::Inline(SpaceFile::from_space(map.domain())),
            codomain: SpaceRef::Inline(SpaceFile::from_space(map.codomain())),
            action: map
                .action()
                .iter()
                .map(|col| col.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }

    /// Resolve into a map; relative space paths are taken from `base_dir`.
    pub fn to_map(&self, base_dir: &Path) -> Result<LinearMapRep> {
        let domain = resolve_space(&self.domain, base_dir)?.into_shared();
        let codomain = if self.codomain == self.domain {
            domain.clone()
        } else {
            resolve_space(&self.codomain, base_dir)?.into_shared()
        };
        let action = self.action.iter().map(|c| coords_from_json(c)).collect();
        LinearMapRep::new(domain, codomain, action, self.label.clone())
    }
}

fn resolve_space(r: &SpaceRef, base_dir: &Path) -> Result<OperatorSpace> {
    match r {
        SpaceRef::Inline(s) => s.to_space(),
        SpaceRef::Path(p) => {
            let path = PathBuf::from(p);
            let path = if path.is_absolute() { path } else { base_dir.join(path) };
            load_space(&path)
        }
    }
}

pub fn parse_space(text: &str) -> Result<OperatorSpace> {
    serde_json::from_str::<SpaceFile>(text)?.to_space()
}

pub fn load_space(path: &Path) -> Result<OperatorSpace> {
    parse_space(&std::fs::read_to_string(path)?)
}

pub fn parse_map(text: &str, base_dir: &Path) -> Result<LinearMapRep> {
    serde_json::from_str::<MapFile>(text)?.to_map(base_dir)
}

pub fn load_map(path: &Path) -> Result<LinearMapRep> {
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_map(&std::fs::read_to_string(path)?, &base)
}

pub fn map_to_json(map: &LinearMapRep) -> String {
    serde_json::to_string_pretty(&MapFile::from_map(map)).expect("map file serializes")
}

/// Shared handle to a parsed space, for callers building maps by hand.
pub fn load_shared_space(path: &Path) -> Result<Arc<OperatorSpace>> {
    load_space(path).map(OperatorSpace::into_shared)
}

/// `f64` with `+inf` written as `null`.
pub(crate) mod inf_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

pub(crate) mod complex_vec {
    use super::ComplexPair;
    use crate::linalg::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<ComplexPair> = v.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let pairs = Vec::<ComplexPair>::deserialize(d)?;
        Ok(pairs.into_iter().map(|p| C64::new(p[0], p[1])).collect())
    }
}
