//! Input file formats. Every file carries `schema_version` and unknown fields
//! are rejected. Integers are JSON numbers or decimal strings; rationals are
//! strings `"p/q"` or integers.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use logtrop::complex::{BaseMap, ConeComplex, DegreeData};
use logtrop::curve::{ClassBeta, CombType, Edge, Leg, LegContact, Vertex};
use logtrop::enhance::{Component, ConstrainedMarking, ConstrainedNode, FreeNode, TorsorFlag, TransverseMapData};
use logtrop::lattice::IntMatrix;
use logtrop::tropmap::{Caps, LedgerEntry, LegData, PointCondition, TropicalMap};
use logtrop::{Int, Rat};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Text(String),
}

impl Num {
    pub fn int(&self) -> Result<Int, CliError> {
        match self {
            Num::Int(i) => Ok(Int::from(*i)),
            Num::Text(s) => Int::from_str(s.trim()).map_err(|_| CliError::schema(format!("{s:?} is not an integer"))),
        }
    }

    pub fn rat(&self) -> Result<Rat, CliError> {
        match self {
            Num::Int(i) => Ok(Rat::from_integer(Int::from(*i))),
            Num::Text(s) => Rat::from_str(s.trim()).map_err(|_| CliError::schema(format!("{s:?} is not a rational"))),
        }
    }
}

fn ints(xs: &[Num]) -> Result<Vec<Int>, CliError> {
    xs.iter().map(Num::int).collect()
}

fn rats(xs: &[Num]) -> Result<Vec<Rat>, CliError> {
    xs.iter().map(Num::rat).collect()
}

fn matrix(rows: &[Vec<Num>], cols: usize, what: &str) -> Result<IntMatrix, CliError> {
    let rows: Vec<Vec<Int>> = rows.iter().map(|r| ints(r)).collect::<Result<_, _>>()?;
    if rows.iter().any(|r| r.len() != cols) {
        return Err(CliError::schema(format!("{what}: every row needs {cols} entries")));
    }
    Ok(IntMatrix::from_rows(cols, &rows))
}

fn check_version(v: u32) -> Result<(), CliError> {
    if v != SCHEMA_VERSION {
        return Err(CliError::schema(format!("unsupported schema_version {v}, expected {SCHEMA_VERSION}")));
    }
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::schema(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::schema(format!("{}: {e}", path.display())))
}

fn sibling(base: &Path, rel: &str) -> PathBuf {
    base.parent().unwrap_or(Path::new(".")).join(rel)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    pub schema_version: u32,
    pub cells: Vec<CellIn>,
    pub face_maps: Vec<MapIn>,
    #[serde(default)]
    pub rho: Option<BTreeMap<String, Vec<Num>>>,
    #[serde(default)]
    pub degrees: Option<DegreesIn>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellIn {
    pub id: String,
    pub rank: usize,
    pub rays: Vec<Vec<Num>>,
}

/// A matrix from the lattice of `small` to that of `big`, as rows.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapIn {
    pub small: String,
    pub big: String,
    pub matrix: Vec<Vec<Num>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegreesIn {
    pub rank: usize,
    /// Pushforward `H₂(cell) → H₂(total)` per cell, as rows.
    pub cells: BTreeMap<String, Vec<Vec<Num>>>,
    #[serde(default)]
    pub push: Vec<MapIn>,
}

pub struct Loaded {
    pub complex: ConeComplex,
    pub rho: Option<BaseMap>,
    pub degrees: Option<DegreeData>,
}

impl Loaded {
    pub fn cell(&self, id: &str) -> Result<usize, CliError> {
        self.complex.index(id).ok_or_else(|| CliError::schema(format!("unknown cell {id:?}")))
    }

    pub fn require_rho(&self) -> Result<&BaseMap, CliError> {
        self.rho.as_ref().ok_or_else(|| CliError::schema("the complex file has no rho"))
    }
}

pub fn load_complex(path: &Path) -> Result<Loaded, CliError> {
    let f: ComplexFile = read_json(path)?;
    check_version(f.schema_version)?;
    let mut ranks = BTreeMap::new();
    let mut cells = Vec::new();
    for c in &f.cells {
        let rays: Vec<Vec<Int>> = c.rays.iter().map(|r| ints(r)).collect::<Result<_, _>>()?;
        if rays.iter().any(|r| r.len() != c.rank) {
            return Err(CliError::schema(format!("cell {:?}: rays need {} coordinates", c.id, c.rank)));
        }
        ranks.insert(c.id.clone(), c.rank);
        cells.push((c.id.clone(), c.rank, rays));
    }
    let rank_of = |id: &str| ranks.get(id).copied().ok_or_else(|| CliError::schema(format!("unknown cell {id:?}")));
    let mut maps = Vec::new();
    for m in &f.face_maps {
        let (rs, rb) = (rank_of(&m.small)?, rank_of(&m.big)?);
        if m.matrix.len() != rb {
            return Err(CliError::schema(format!("face map {} → {}: needs {rb} rows", m.small, m.big)));
        }
        maps.push((m.small.clone(), m.big.clone(), matrix(&m.matrix, rs, "face map")?));
    }
    let complex = ConeComplex::new(&cells, &maps)?;
    let rho = match &f.rho {
        None => None,
        Some(r) => {
            let cov: BTreeMap<String, Vec<Int>> =
                r.iter().map(|(k, v)| Ok((k.clone(), ints(v)?))).collect::<Result<_, CliError>>()?;
            Some(BaseMap::new(&complex, &cov)?)
        }
    };
    let degrees = match &f.degrees {
        None => None,
        Some(d) => {
            let mut tot = BTreeMap::new();
            for (id, rows) in &d.cells {
                if rows.len() != d.rank {
                    return Err(CliError::schema(format!("degrees of {id:?}: needs {} rows", d.rank)));
                }
                let cols = rows.first().map_or(0, Vec::len);
                tot.insert(id.clone(), matrix(rows, cols, "degree pushforward")?);
            }
            let mut push = Vec::new();
            for m in &d.push {
                let cols = m.matrix.first().map_or(0, Vec::len);
                push.push((m.small.clone(), m.big.clone(), matrix(&m.matrix, cols, "degree pushforward")?));
            }
            Some(DegreeData::new(&complex, d.rank, &tot, &push)?)
        }
    };
    Ok(Loaded { complex, rho, degrees })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeBody {
    pub vertices: Vec<VertexIn>,
    #[serde(default)]
    pub edges: Vec<EdgeIn>,
    #[serde(default)]
    pub legs: Vec<LegIn>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexIn {
    pub id: String,
    pub cell: String,
    #[serde(default)]
    pub genus: u32,
    #[serde(default)]
    pub class: Option<Vec<Num>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeIn {
    pub id: String,
    pub from: String,
    pub to: String,
    pub cell: String,
    pub u: Vec<Num>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegIn {
    pub id: String,
    pub vertex: String,
    pub cell: String,
    pub u: Vec<Num>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointIn {
    pub leg: String,
    pub cell: String,
    pub point: Vec<Num>,
}

/// A combinatorial type with optional point conditions on its legs.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeFile {
    pub schema_version: u32,
    #[serde(rename = "type")]
    pub body: TypeBody,
    #[serde(default)]
    pub points: Vec<PointIn>,
}

pub fn build_type(l: &Loaded, b: &TypeBody) -> Result<CombType, CliError> {
    let vid: BTreeMap<&str, usize> = b.vertices.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect();
    let vertex = |id: &str| vid.get(id).copied().ok_or_else(|| CliError::schema(format!("unknown vertex {id:?}")));
    let vertices = b
        .vertices
        .iter()
        .map(|v| {
            let class = v.class.as_deref().map(ints).transpose()?;
            Ok(Vertex { id: v.id.clone(), cell: l.cell(&v.cell)?, genus: v.genus, class })
        })
        .collect::<Result<_, CliError>>()?;
    let edges = b
        .edges
        .iter()
        .map(|e| {
            Ok(Edge { id: e.id.clone(), from: vertex(&e.from)?, to: vertex(&e.to)?, cell: l.cell(&e.cell)?, u: ints(&e.u)? })
        })
        .collect::<Result<_, CliError>>()?;
    let legs = b
        .legs
        .iter()
        .map(|g| Ok(Leg { id: g.id.clone(), vertex: vertex(&g.vertex)?, cell: l.cell(&g.cell)?, u: ints(&g.u)? }))
        .collect::<Result<_, CliError>>()?;
    Ok(CombType::new(&l.complex, vertices, edges, legs)?)
}

pub fn build_points(l: &Loaded, t: &CombType, pts: &[PointIn]) -> Result<Vec<PointCondition>, CliError> {
    pts.iter()
        .map(|p| {
            let leg = t.legs.iter().position(|g| g.id == p.leg).ok_or_else(|| CliError::schema(format!("unknown leg {:?}", p.leg)))?;
            Ok(PointCondition { leg, cell: l.cell(&p.cell)?, point: rats(&p.point)? })
        })
        .collect()
}

pub fn load_type(l: &Loaded, path: &Path) -> Result<(CombType, Vec<PointCondition>), CliError> {
    let f: TypeFile = read_json(path)?;
    check_version(f.schema_version)?;
    let t = build_type(l, &f.body)?;
    let p = build_points(l, &t, &f.points)?;
    Ok((t, p))
}

/// A type together with vertex positions and edge lengths.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub schema_version: u32,
    #[serde(rename = "type")]
    pub body: TypeBody,
    pub positions: BTreeMap<String, Vec<Num>>,
    #[serde(default)]
    pub lengths: BTreeMap<String, Num>,
}

pub fn load_map(l: &Loaded, path: &Path) -> Result<TropicalMap, CliError> {
    let f: MapFile = read_json(path)?;
    check_version(f.schema_version)?;
    let t = build_type(l, &f.body)?;
    let pos = t
        .vertices
        .iter()
        .map(|v| rats(f.positions.get(&v.id).ok_or_else(|| CliError::schema(format!("no position for vertex {:?}", v.id)))?))
        .collect::<Result<_, _>>()?;
    let len = t
        .edges
        .iter()
        .map(|e| f.lengths.get(&e.id).ok_or_else(|| CliError::schema(format!("no length for edge {:?}", e.id)))?.rat())
        .collect::<Result<_, _>>()?;
    if let Some(k) = f.positions.keys().find(|k| t.vertex_index(k).is_none()) {
        return Err(CliError::schema(format!("position for unknown vertex {k:?}")));
    }
    if let Some(k) = f.lengths.keys().find(|k| t.edge_index(k).is_none()) {
        return Err(CliError::schema(format!("length for unknown edge {k:?}")));
    }
    Ok(TropicalMap { t, pos, len })
}

/// Rigid types with user-supplied counts of their geometric contributions.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerFile {
    pub schema_version: u32,
    #[serde(default)]
    pub total_class: Option<Vec<Num>>,
    pub entries: Vec<LedgerEntryIn>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerEntryIn {
    pub label: String,
    /// Path of a type file, relative to the ledger file.
    #[serde(rename = "type")]
    pub type_file: String,
    pub count: Num,
}

pub fn load_ledger(l: &Loaded, path: &Path) -> Result<(Vec<LedgerEntry>, Option<Vec<Int>>), CliError> {
    let f: LedgerFile = read_json(path)?;
    check_version(f.schema_version)?;
    let entries = f
        .entries
        .iter()
        .map(|e| {
            let (t, points) = load_type(l, &sibling(path, &e.type_file))?;
            Ok(LedgerEntry { label: e.label.clone(), t, points, count: e.count.rat()? })
        })
        .collect::<Result<_, CliError>>()?;
    let total = f.total_class.as_deref().map(ints).transpose()?;
    Ok((entries, total))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransverseFile {
    pub schema_version: u32,
    pub components: Vec<ComponentIn>,
    #[serde(default)]
    pub nodes: Vec<NodeIn>,
    #[serde(default)]
    pub free_nodes: Vec<FreeNodeIn>,
    #[serde(default)]
    pub markings: Vec<MarkingIn>,
    #[serde(default = "auto")]
    pub torsor: String,
    /// The user's attestation that the markings include every smooth point
    /// over the codimension-one locus.
    #[serde(default)]
    pub markings_complete: bool,
}

fn auto() -> String {
    "auto".into()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentIn {
    pub id: String,
    pub target: String,
    pub mu: Num,
    #[serde(default)]
    pub genus: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeIn {
    pub id: String,
    pub branches: [String; 2],
    pub m1: Vec<Num>,
    pub m2: Vec<Num>,
    pub rho: Vec<Num>,
    pub w: [Num; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeNodeIn {
    pub id: String,
    pub branches: [String; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkingIn {
    pub id: String,
    pub component: String,
    pub m1: Vec<Num>,
    pub m2: Vec<Num>,
    pub rho: Vec<Num>,
    pub w: Num,
}

pub fn load_transverse(path: &Path) -> Result<(TransverseMapData, bool), CliError> {
    let f: TransverseFile = read_json(path)?;
    check_version(f.schema_version)?;
    let cid: BTreeMap<&str, usize> = f.components.iter().enumerate().map(|(i, c)| (c.id.as_str(), i)).collect();
    let comp = |id: &str| cid.get(id).copied().ok_or_else(|| CliError::schema(format!("unknown component {id:?}")));
    let components = f
        .components
        .iter()
        .map(|c| Ok(Component { id: c.id.clone(), target: c.target.clone(), mu: c.mu.int()?, genus: c.genus }))
        .collect::<Result<_, CliError>>()?;
    let nodes = f
        .nodes
        .iter()
        .map(|q| {
            Ok(ConstrainedNode {
                id: q.id.clone(),
                branches: (comp(&q.branches[0])?, comp(&q.branches[1])?),
                m1: ints(&q.m1)?,
                m2: ints(&q.m2)?,
                rho: ints(&q.rho)?,
                w: (q.w[0].int()?, q.w[1].int()?),
            })
        })
        .collect::<Result<_, CliError>>()?;
    let free_nodes = f
        .free_nodes
        .iter()
        .map(|q| Ok(FreeNode { id: q.id.clone(), branches: (comp(&q.branches[0])?, comp(&q.branches[1])?) }))
        .collect::<Result<_, CliError>>()?;
    let markings = f
        .markings
        .iter()
        .map(|p| {
            Ok(ConstrainedMarking {
                id: p.id.clone(),
                component: comp(&p.component)?,
                m1: ints(&p.m1)?,
                m2: ints(&p.m2)?,
                rho: ints(&p.rho)?,
                w: p.w.int()?,
            })
        })
        .collect::<Result<_, CliError>>()?;
    let torsor = match f.torsor.as_str() {
        "yes" => TorsorFlag::Yes,
        "no" => TorsorFlag::No,
        "auto" => TorsorFlag::Auto,
        other => return Err(CliError::schema(format!("torsor must be yes, no or auto, not {other:?}"))),
    };
    Ok((TransverseMapData { components, nodes, free_nodes, markings, torsor }, f.markings_complete))
}

/// A class `β` with per-leg data for the enumerator.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassFile {
    pub schema_version: u32,
    #[serde(default)]
    pub genus: u64,
    #[serde(default)]
    pub total_class: Option<Vec<Num>>,
    pub legs: Vec<ClassLegIn>,
    #[serde(default)]
    pub caps: Option<CapsIn>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContactIn {
    pub cell: String,
    pub u: Vec<Num>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassLegIn {
    pub id: String,
    /// `null` for contact order zero.
    #[serde(default)]
    pub contact: Option<ContactIn>,
    #[serde(default)]
    pub point: Option<PointAt>,
    /// Id of a leg that must share this leg's vertex.
    #[serde(default)]
    pub with: Option<String>,
    #[serde(default)]
    pub class: Option<Vec<Num>>,
    #[serde(default)]
    pub support: Option<Vec<Num>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointAt {
    pub cell: String,
    pub point: Vec<Num>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapsIn {
    pub max_vertices: usize,
    pub max_edges: usize,
    pub max_u: u32,
}

pub const DEFAULT_CAPS: Caps = Caps { max_vertices: 3, max_edges: 3, max_u: 1 };

pub fn load_class(l: &Loaded, path: &Path) -> Result<(ClassBeta, Vec<LegData>, Option<Caps>), CliError> {
    let f: ClassFile = read_json(path)?;
    check_version(f.schema_version)?;
    let mut contacts = Vec::new();
    let mut legs = Vec::new();
    for g in &f.legs {
        contacts.push(match &g.contact {
            None => LegContact::Zero,
            Some(c) => LegContact::In { cell: l.cell(&c.cell)?, u: ints(&c.u)? },
        });
        let with = match &g.with {
            None => None,
            Some(w) => Some(
                f.legs.iter().position(|h| &h.id == w).ok_or_else(|| CliError::schema(format!("unknown leg {w:?}")))?,
            ),
        };
        let point = match &g.point {
            None => None,
            Some(p) => Some((l.cell(&p.cell)?, rats(&p.point)?)),
        };
        legs.push(LegData {
            id: g.id.clone(),
            point,
            with,
            class: g.class.as_deref().map(ints).transpose()?,
            support: g.support.as_deref().map(ints).transpose()?,
        });
    }
    let total = f.total_class.as_deref().map(ints).transpose()?;
    let caps = f.caps.map(|c| Caps { max_vertices: c.max_vertices, max_edges: c.max_edges, max_u: c.max_u });
    Ok((ClassBeta { genus: f.genus, legs: contacts, total }, legs, caps))
}
