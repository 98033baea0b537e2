//! One function per subcommand.

use std::path::Path;

use logtrop::complex::{ray_multiplicity, slice, ConeComplex, Simplicity};
use logtrop::curve::CombType;
use logtrop::enhance::{enhancement_count, group_order_brute, Outcome as Count, Torsor};
use logtrop::monoid::{base_pullback, basic_monoid, free_coordinates};
use logtrop::tropmap::{
    balancing_defect, decomposition_terms, enumerate_rigid, is_rigid, map_multiplicity, moduli_polyhedron, Caps,
    Rigidity, TropicalMap,
};
use num_traits::Zero;
use serde_json::{json, Map, Value};

use crate::schema::{self, Loaded, SCHEMA_VERSION};
use crate::{int, ints, rat, rats, CliError, Outcome, EXIT_REFUSED};

#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    pub explain: bool,
    pub max_vertices: Option<usize>,
    pub max_edges: Option<usize>,
    pub max_u: Option<u32>,
}

fn done(mut report: Value, explain: Option<Vec<String>>) -> Result<Outcome, CliError> {
    report["schema_version"] = json!(SCHEMA_VERSION);
    if let Some(lines) = explain {
        report["explain"] = json!(lines);
    }
    Ok(Outcome { report, code: 0 })
}

pub fn type_json(c: &ConeComplex, t: &CombType) -> Value {
    let vertices: Vec<Value> = t
        .vertices
        .iter()
        .map(|v| {
            let mut o = json!({"id": v.id, "cell": c.id(v.cell), "genus": v.genus});
            if let Some(k) = &v.class {
                o["class"] = ints(k);
            }
            o
        })
        .collect();
    let edges: Vec<Value> = t
        .edges
        .iter()
        .map(|e| {
            json!({"id": e.id, "from": t.vertices[e.from].id, "to": t.vertices[e.to].id, "cell": c.id(e.cell), "u": ints(&e.u)})
        })
        .collect();
    let legs: Vec<Value> = t
        .legs
        .iter()
        .map(|l| json!({"id": l.id, "vertex": t.vertices[l.vertex].id, "cell": c.id(l.cell), "u": ints(&l.u)}))
        .collect();
    json!({"vertices": vertices, "edges": edges, "legs": legs})
}

pub fn map_json(c: &ConeComplex, m: &TropicalMap) -> Value {
    let positions: Map<String, Value> = m.t.vertices.iter().zip(&m.pos).map(|(v, p)| (v.id.clone(), rats(p))).collect();
    let lengths: Map<String, Value> = m.t.edges.iter().zip(&m.len).map(|(e, l)| (e.id.clone(), rat(l))).collect();
    json!({"type": type_json(c, &m.t), "positions": positions, "lengths": lengths})
}

fn balancing_lines(c: &ConeComplex, t: &CombType) -> Vec<String> {
    (0..t.vertices.len())
        .map(|v| match balancing_defect(c, t, v) {
            Some((cell, d)) => format!("balancing defect at {} in {}: {:?}", t.vertices[v].id, c.id(cell), show(&d)),
            None => format!("balancing defect at {}: no unique smallest common cell", t.vertices[v].id),
        })
        .collect()
}

fn show(xs: &[logtrop::Int]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

pub fn validate_complex(path: &Path, o: Options) -> Result<Outcome, CliError> {
    let l = schema::load_complex(path)?;
    let c = &l.complex;
    let r = c.report();
    let simplicity = match r.simplicity {
        Simplicity::Simple => "simple",
        Simplicity::MonodromyFree => "monodromy-free",
        Simplicity::Neither => "neither",
    };
    let missing: Vec<Value> =
        r.missing_faces.iter().map(|(id, rays)| json!({"cell": id, "rays": rays.iter().map(|x| ints(x)).collect::<Vec<_>>()})).collect();
    let mut out = json!({
        "cells": c.cells().len(),
        "closed_under_faces": r.closed_under_faces(),
        "saturated": r.saturated(),
        "simplicity": simplicity,
        "simplicity_witness": r.simplicity_witness,
        "missing_faces": missing,
        "unsaturated": r.unsaturated,
        "usable": r.is_usable(),
    });
    if let Some(rho) = &l.rho {
        let s = slice(c, rho);
        let cells: Vec<Value> = s
            .cells
            .iter()
            .map(|p| {
                json!({"cell": p.id, "dim": p.dim, "vertices": p.vertices.iter().map(|v| rats(v)).collect::<Vec<_>>(),
                       "recession": p.recession.iter().map(|v| ints(v)).collect::<Vec<_>>()})
            })
            .collect();
        out["slice"] = json!(cells);
    }
    let explain = o.explain.then(|| {
        c.face_maps().iter().map(|f| format!("face map {} → {}", c.id(f.small), c.id(f.big))).collect()
    });
    done(out, explain)
}

pub fn validate_map(cpath: &Path, mpath: &Path, o: Options) -> Result<Outcome, CliError> {
    let l = schema::load_complex(cpath)?;
    let m = schema::load_map(&l, mpath)?;
    let v = logtrop::tropmap::validate_map(&l.complex, l.rho.as_ref(), &m)?;
    let out = json!({
        "valid": v.is_none(),
        "violation": v.as_ref().map(|v| json!({"kind": v.kind(), "message": v.to_string()})),
    });
    done(out, o.explain.then(|| balancing_lines(&l.complex, &m.t)))
}

fn moduli_lines(l: &Loaded, t: &CombType, points: &[logtrop::tropmap::PointCondition]) -> Result<Vec<String>, CliError> {
    let p = moduli_polyhedron(&l.complex, l.rho.as_ref(), t, points)?;
    let mut lines = vec![
        format!("variables: {}", p.vars),
        format!("equalities: {}", p.equalities.len()),
        format!("open conditions: {}", p.open.len()),
        match p.dimension() {
            Some(d) => format!("moduli dimension: {d}"),
            None => "moduli space is empty".into(),
        },
    ];
    lines.extend(balancing_lines(&l.complex, t));
    Ok(lines)
}

pub fn rigid(cpath: &Path, tpath: &Path, o: Options) -> Result<Outcome, CliError> {
    let l = schema::load_complex(cpath)?;
    let (t, points) = schema::load_type(&l, tpath)?;
    let c = &l.complex;
    let out = match is_rigid(c, l.rho.as_ref(), &t, &points)? {
        Rigidity::Rigid(m) => json!({"rigid": true, "verdict": "rigid", "dimension": 0, "map": map_json(c, &m)}),
        Rigidity::Family { dimension, member, direction } => json!({
            "rigid": false, "verdict": "not rigid", "dimension": dimension,
            "map": map_json(c, &member), "direction": rats(&direction),
        }),
        Rigidity::Empty { reason } => json!({"rigid": false, "verdict": "empty", "reason": reason}),
    };
    let explain = if o.explain { Some(moduli_lines(&l, &t, &points)?) } else { None };
    done(out, explain)
}

pub fn multiplicity(cpath: &Path, tpath: &Path, o: Options) -> Result<Outcome, CliError> {
    let l = schema::load_complex(cpath)?;
    let (t, points) = schema::load_type(&l, tpath)?;
    let m = match is_rigid(&l.complex, l.rho.as_ref(), &t, &points)? {
        Rigidity::Rigid(m) => m,
        Rigidity::Family { dimension, .. } => {
            return Err(CliError::schema(format!("type is not rigid: moduli dimension {dimension}")))
        }
        Rigidity::Empty { reason } => return Err(CliError::schema(format!("type has no tropical map: {reason}"))),
    };
    let out = json!({"multiplicity": int(&map_multiplicity(&m)), "map": map_json(&l.complex, &m)});
    let explain = if o.explain { Some(moduli_lines(&l, &t, &points)?) } else { None };
    done(out, explain)
}

pub fn basic_monoid_cmd(cpath: &Path, tpath: &Path, o: Options) -> Result<Outcome, CliError> {
    let l = schema::load_complex(cpath)?;
    let (t, _) = schema::load_type(&l, tpath)?;
    let c = &l.complex;
    let b = basic_monoid(c, &t)?;
    let d = &b.dual;
    let mut variables = Vec::new();
    for (i, v) in t.vertices.iter().enumerate() {
        for k in 0..d.offsets[i + 1] - d.offsets[i] {
            variables.push(format!("{}[{k}]", v.id));
        }
    }
    variables.extend(t.edges.iter().map(|e| format!("length({})", e.id)));
    let mut out = json!({
        "rank": d.rank(),
        "free": b.q.is_free(),
        "hilbert_basis": b.q.generators().iter().map(|g| ints(g)).collect::<Vec<_>>(),
        "dual_rays": d.dual_cone.rays().iter().map(|g| ints(g)).collect::<Vec<_>>(),
        "dual_basis": d.basis.col_vecs().iter().map(|g| ints(g)).collect::<Vec<_>>(),
        "variables": variables,
    });
    if let Some(rho) = &l.rho {
        let r = base_pullback(rho, &t, &b)?;
        out["base"] = ints(&r);
        if b.q.is_free() {
            out["base_in_free_basis"] = ints(&free_coordinates(&b.q, &r)?);
        }
    }
    let explain = o.explain.then(|| {
        vec![
            format!("{} variables, lattice of rank {}", d.vars, d.rank()),
            format!("{} facets of Q∨", d.dual_cone.facets().len()),
        ]
    });
    done(out, explain)
}

pub fn enhance_count(path: &Path, o: Options) -> Result<Outcome, CliError> {
    let (d, attested) = schema::load_transverse(path)?;
    let r = enhancement_count(&d)?;
    let nodes: Vec<Value> = r
        .nodes
        .iter()
        .map(|n| {
            json!({"id": n.id, "index": int(&n.index), "length": rat(&n.length), "contact_order": ints(&n.contact_order),
                   "contact_length": int(&n.contact_length), "reduced_branching": int(&n.reduced_branching),
                   "edge_length": int(&n.edge_length)})
        })
        .collect();
    let issues: Vec<Value> = r.issues.iter().map(|i| json!({"site": i.site, "problem": i.problem.kind()})).collect();
    let torsor = match r.torsor {
        Torsor::Yes => "yes",
        Torsor::No => "no",
        Torsor::Unknown => "unknown",
    };
    let (verdict, count, reason, code) = match &r.outcome {
        Count::Count(n) => ("count", int(n), None, 0),
        Count::Empty(why) => ("empty", json!(0), Some(why.clone()), 0),
        Count::Refused(why) => ("refused", Value::Null, Some(why.clone()), EXIT_REFUSED),
        Count::NotPrelog => ("not-prelog", Value::Null, Some("the map is not pre-logarithmic".to_string()), 0),
    };
    let mut out = json!({
        "prelog": issues.is_empty(),
        "issues": issues,
        "nodes": nodes,
        "base_order": r.base_order.as_ref().map(int),
        "group_order": int(&r.group_order),
        "torsor": torsor,
        "torsor_reason": r.torsor_reason,
        "verdict": verdict,
        "count": count,
        "reason": reason,
        "basic_monoid_rank": 1 + d.free_nodes.len(),
        "markings_complete": attested,
    });
    if !attested {
        out["warning"] = json!("markings_complete is not attested; the count assumes every smooth point over the double locus is marked");
    }
    let explain = o.explain.then(|| {
        let mut lines: Vec<String> = r
            .nodes
            .iter()
            .map(|n| {
                format!(
                    "{}: Ind = {}, λ = {}, u = {:?}, ℓ(u) = {}, w̄ = {}, e = {}",
                    n.id,
                    n.index,
                    n.length,
                    show(&n.contact_order),
                    n.contact_length,
                    n.reduced_branching,
                    n.edge_length
                )
            })
            .collect();
        if let Some(b) = &r.base_order {
            lines.push(format!("b = {b}"));
        }
        lines.push(format!("|G| = {} (Smith normal form)", r.group_order));
        if let Some(g) = group_order_brute(&d, 10_000) {
            lines.push(format!("|G| = {g} (enumeration)"));
        }
        lines
    });
    let mut res = done(out, explain)?;
    res.code = code;
    Ok(res)
}

pub fn decompose(cpath: &Path, lpath: &Path, o: Options) -> Result<Outcome, CliError> {
    let l = schema::load_complex(cpath)?;
    let (entries, total) = schema::load_ledger(&l, lpath)?;
    let classes = match (&l.degrees, &total) {
        (Some(d), Some(a)) => Some((d, a.as_slice())),
        (None, Some(_)) => return Err(CliError::schema("total_class needs degree data in the complex file")),
        _ => None,
    };
    let ledger = decomposition_terms(&l.complex, l.rho.as_ref(), classes, &entries)?;
    let terms: Vec<Value> = ledger
        .terms
        .iter()
        .map(|t| {
            json!({"labels": t.labels, "multiplicity": int(&t.multiplicity), "automorphisms": t.automorphisms,
                   "coefficient": rat(&t.coefficient), "count": rat(&t.count), "contribution": rat(&t.contribution)})
        })
        .collect();
    let out = json!({"terms": terms, "total": rat(&ledger.total), "notes": ledger.notes});
    let explain = o.explain.then(|| {
        ledger
            .terms
            .iter()
            .map(|t| {
                format!(
                    "{}: m = {}, |Aut| = {}, m/|Aut| · N = {} · {} = {}",
                    t.labels.join(" = "),
                    t.multiplicity,
                    t.automorphisms,
                    t.coefficient,
                    t.count,
                    t.contribution
                )
            })
            .collect()
    });
    done(out, explain)
}

pub fn toric_check(cpath: &Path, o: Options) -> Result<Outcome, CliError> {
    let l = schema::load_complex(cpath)?;
    let rho = l.require_rho()?;
    let c = &l.complex;
    let mut rays = Map::new();
    let mut terms = Vec::new();
    let mut horizontal = Vec::new();
    for cell in c.cells().iter().filter(|x| x.rank() == 1) {
        let m = ray_multiplicity(c, rho, &cell.id)?;
        rays.insert(cell.id.clone(), int(&m));
        if m.is_zero() {
            horizontal.push(cell.id.clone());
        } else {
            terms.push(format!("{m}·D[{}]", cell.id));
        }
    }
    let out = json!({"multiplicities": rays, "fibre_divisor": terms.join(" + "), "horizontal": horizontal});
    let explain = o.explain.then(|| {
        c.cells()
            .iter()
            .filter(|x| x.rank() == 1)
            .map(|x| format!("{}: ρ = {:?} on generator {:?}", x.id, show(rho.covector(c.index(&x.id).unwrap())), show(&x.cone.rays()[0])))
            .collect()
    });
    done(out, explain)
}

pub fn enumerate(cpath: &Path, bpath: &Path, o: Options) -> Result<Outcome, CliError> {
    let l = schema::load_complex(cpath)?;
    let rho = l.require_rho()?;
    let (beta, legs, file_caps) = schema::load_class(&l, bpath)?;
    let base = file_caps.unwrap_or(schema::DEFAULT_CAPS);
    let caps = Caps {
        max_vertices: o.max_vertices.unwrap_or(base.max_vertices),
        max_edges: o.max_edges.unwrap_or(base.max_edges),
        max_u: o.max_u.unwrap_or(base.max_u),
    };
    let c = &l.complex;
    let e = enumerate_rigid(c, rho, &beta, &legs, l.degrees.as_ref(), caps)?;
    let rigid: Vec<Value> = e
        .rigid
        .iter()
        .map(|r| json!({"map": map_json(c, &r.map), "multiplicity": int(&r.multiplicity), "automorphisms": r.automorphisms}))
        .collect();
    let rejected: Vec<Value> = e.rejected.iter().map(|r| json!({"type": type_json(c, &r.t), "reason": r.reason})).collect();
    let out = json!({
        "caps": {"max_vertices": caps.max_vertices, "max_edges": caps.max_edges, "max_u": caps.max_u},
        "candidates": e.candidates,
        "rigid": rigid,
        "rejected": rejected,
    });
    let explain = o.explain.then(|| {
        e.rigid
            .iter()
            .map(|r| {
                let at: Vec<String> = r.t.legs.iter().map(|g| format!("{}@{}", g.id, r.t.vertices[g.vertex].id)).collect();
                format!("m = {}, |Aut| = {}: {}", r.multiplicity, r.automorphisms, at.join(" "))
            })
            .collect()
    });
    done(out, explain)
}
