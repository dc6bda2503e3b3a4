//! Signature grids: port-addressed multigraphs with a signature per vertex.
//!
//! Self-loops and parallel edges are allowed. Dangling ports turn a grid
//! into a gadget whose realized function takes its arguments in dangling
//! order.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::{HolantError, Result};
use crate::signatures::{parse_function, signature_to_json, Signature};

/// A vertex id plus a 1-based argument slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Port {
    pub vertex: usize,
    pub slot: usize,
}

impl Port {
    pub fn new(vertex: usize, slot: usize) -> Self {
        Port { vertex, slot }
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.vertex, self.slot)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Side::Left => "L",
            Side::Right => "R",
        }
    }

    pub fn from_tag(s: &str) -> Option<Side> {
        match s {
            "L" => Some(Side::Left),
            "R" => Some(Side::Right),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vertex {
    pub id: usize,
    pub sig: Signature,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SignatureGrid {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(Port, Port)>,
    pub dangling: Vec<Port>,
    pub bipartition: Option<BTreeMap<usize, Side>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub ok: bool,
    /// `(location, message)` pairs.
    pub issues: Vec<(String, String)>,
}

impl ValidationReport {
    pub fn to_json(&self) -> Value {
        json!({
            "ok": self.ok,
            "issues": self.issues.iter().map(|(w, m)| json!({"at": w, "message": m})).collect::<Vec<_>>(),
        })
    }

    pub fn into_result(self) -> Result<()> {
        if self.ok {
            Ok(())
        } else {
            let msg = self.issues.iter().map(|(w, m)| format!("{w}: {m}")).collect::<Vec<_>>().join("; ");
            Err(HolantError::Validation(msg))
        }
    }
}

impl SignatureGrid {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a vertex with the next free id and returns that id.
    pub fn add_vertex(&mut self, sig: Signature) -> usize {
        let id = self.vertices.iter().map(|v| v.id + 1).max().unwrap_or(0);
        self.vertices.push(Vertex { id, sig });
        id
    }

    pub fn add_vertex_with_id(&mut self, id: usize, sig: Signature) {
        self.vertices.push(Vertex { id, sig });
    }

    /// Joins `(u, su)` and `(v, sv)`; slots are 1-based.
    pub fn add_edge(&mut self, u: usize, su: usize, v: usize, sv: usize) {
        self.edges.push((Port::new(u, su), Port::new(v, sv)));
    }

    pub fn add_dangling(&mut self, v: usize, slot: usize) {
        self.dangling.push(Port::new(v, slot));
    }

    pub fn set_side(&mut self, v: usize, side: Side) {
        self.bipartition.get_or_insert_with(BTreeMap::new).insert(v, side);
    }

    pub fn is_closed(&self) -> bool {
        self.dangling.is_empty()
    }

    pub fn vertex(&self, id: usize) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.id == id)
    }

    /// Map from vertex id to its position in `vertices`.
    pub fn index(&self) -> HashMap<usize, usize> {
        self.vertices.iter().enumerate().map(|(i, v)| (v.id, i)).collect()
    }

    pub fn side(&self, id: usize) -> Option<Side> {
        self.bipartition.as_ref().and_then(|b| b.get(&id).copied())
    }

    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        let index = self.index();
        if index.len() != self.vertices.len() {
            issues.push(("grid".to_string(), "duplicate vertex id".to_string()));
        }
        let mut used: HashMap<Port, usize> = HashMap::new();
        let mut check_port = |p: &Port, at: String, issues: &mut Vec<(String, String)>| match index.get(&p.vertex) {
            None => issues.push((at, format!("unknown vertex {}", p.vertex))),
            Some(&i) => {
                let k = self.vertices[i].sig.arity();
                if p.slot == 0 || p.slot > k {
                    issues.push((at, format!("slot {} out of range for arity {k}", p.slot)));
                } else {
                    *used.entry(*p).or_default() += 1;
                }
            }
        };
        for (e, (a, b)) in self.edges.iter().enumerate() {
            check_port(a, format!("edge {e}"), &mut issues);
            check_port(b, format!("edge {e}"), &mut issues);
            if let Some(bip) = &self.bipartition {
                match (bip.get(&a.vertex), bip.get(&b.vertex)) {
                    (Some(x), Some(y)) if x == y => {
                        issues.push((format!("edge {e}"), "edge violates bipartition".to_string()));
                    }
                    _ => {}
                }
            }
        }
        for (d, p) in self.dangling.iter().enumerate() {
            check_port(p, format!("dangling {d}"), &mut issues);
        }
        for v in &self.vertices {
            for slot in 1..=v.sig.arity() {
                match used.get(&Port::new(v.id, slot)).copied().unwrap_or(0) {
                    0 => issues.push((format!("vertex {}", v.id), format!("port {slot} unbound"))),
                    1 => {}
                    n => issues.push((format!("vertex {}", v.id), format!("port {slot} used {n} times"))),
                }
            }
            if let Some(bip) = &self.bipartition {
                if !bip.contains_key(&v.id) {
                    issues.push((format!("vertex {}", v.id), "missing bipartition side".to_string()));
                }
            }
        }
        if let Some(bip) = &self.bipartition {
            for id in bip.keys() {
                if !index.contains_key(id) {
                    issues.push(("bipartition".to_string(), format!("unknown vertex {id}")));
                }
            }
        }
        ValidationReport { ok: issues.is_empty(), issues }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |msg: String| HolantError::Parse { pos: 0, msg };
        let obj = v.as_object().ok_or_else(|| bad("grid must be an object".into()))?;
        let mut g = SignatureGrid::new();
        let verts = obj.get("vertices").and_then(Value::as_array).ok_or_else(|| bad("missing \"vertices\" list".into()))?;
        for (i, vx) in verts.iter().enumerate() {
            let id = vx
                .get("id")
                .and_then(Value::as_u64)
                .ok_or_else(|| bad(format!("vertex #{i}: missing integer id")))? as usize;
            let lit = vx.get("fn").ok_or_else(|| bad(format!("vertex {id}: missing \"fn\"")))?;
            let sig = parse_function(lit).map_err(|e| match e {
                HolantError::Parse { pos, msg } => HolantError::Parse { pos, msg: format!("vertex {id}: {msg}") },
                other => other,
            })?;
            g.add_vertex_with_id(id, sig);
        }
        let port = |p: &Value, what: &str| -> Result<Port> {
            let a = p.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad(format!("{what}: port must be [id, slot]")))?;
            let n = |x: &Value| x.as_u64().map(|u| u as usize).ok_or_else(|| bad(format!("{what}: non-integer port")));
            Ok(Port::new(n(&a[0])?, n(&a[1])?))
        };
        if let Some(es) = obj.get("edges") {
            for (i, e) in es.as_array().ok_or_else(|| bad("\"edges\" must be a list".into()))?.iter().enumerate() {
                let pair = e.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad(format!("edge {i}: needs two ports")))?;
                let what = format!("edge {i}");
                g.edges.push((port(&pair[0], &what)?, port(&pair[1], &what)?));
            }
        }
        if let Some(ds) = obj.get("dangling") {
            for (i, d) in ds.as_array().ok_or_else(|| bad("\"dangling\" must be a list".into()))?.iter().enumerate() {
                g.dangling.push(port(d, &format!("dangling {i}"))?);
            }
        }
        if let Some(b) = obj.get("bipartition") {
            let m = b.as_object().ok_or_else(|| bad("\"bipartition\" must be an object".into()))?;
            let mut sides = BTreeMap::new();
            for (k, s) in m {
                let id: usize = k.parse().map_err(|_| bad(format!("bipartition key {k:?} is not an id")))?;
                let side = s.as_str().and_then(Side::from_tag).ok_or_else(|| bad(format!("vertex {id}: side must be \"L\" or \"R\"")))?;
                sides.insert(id, side);
            }
            g.bipartition = Some(sides);
        }
        Ok(g)
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert(
            "vertices".into(),
            self.vertices.iter().map(|v| json!({"id": v.id, "fn": signature_to_json(&v.sig)})).collect(),
        );
        obj.insert(
            "edges".into(),
            self.edges.iter().map(|(a, b)| json!([[a.vertex, a.slot], [b.vertex, b.slot]])).collect(),
        );
        obj.insert("dangling".into(), self.dangling.iter().map(|p| json!([p.vertex, p.slot])).collect());
        if let Some(b) = &self.bipartition {
            let m: Map<String, Value> = b.iter().map(|(k, s)| (k.to_string(), json!(s.tag()))).collect();
            obj.insert("bipartition".into(), Value::Object(m));
        }
        Value::Object(obj)
    }

    /// Parses and validates a grid file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| HolantError::Parse { pos: 0, msg: format!("{}: {e}", path.as_ref().display()) })?;
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| HolantError::Parse { pos: e.column(), msg: format!("line {}: {e}", e.line()) })?;
        let g = Self::from_json(&v)?;
        g.validate().into_result()?;
        Ok(g)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.to_json()).expect("json values serialise");
        std::fs::write(path.as_ref(), text)
            .map_err(|e| HolantError::Validation(format!("{}: {e}", path.as_ref().display())))
    }

    /// Renumbers `g1`'s vertices to `0..n1` and `g2`'s to `n1..`, keeping
    /// `g1`'s dangling ports first.
    pub fn disjoint_union(g1: &SignatureGrid, g2: &SignatureGrid) -> SignatureGrid {
        let mut out = SignatureGrid::new();
        let mut offset = 0;
        let mut any_bip = false;
        for g in [g1, g2] {
            let remap: HashMap<usize, usize> = g.vertices.iter().enumerate().map(|(i, v)| (v.id, offset + i)).collect();
            for v in &g.vertices {
                out.add_vertex_with_id(remap[&v.id], v.sig.clone());
            }
            let p = |p: &Port| Port::new(remap.get(&p.vertex).copied().unwrap_or(usize::MAX), p.slot);
            out.edges.extend(g.edges.iter().map(|(a, b)| (p(a), p(b))));
            out.dangling.extend(g.dangling.iter().map(p));
            if let Some(b) = &g.bipartition {
                any_bip = true;
                for (id, s) in b {
                    if let Some(&n) = remap.get(id) {
                        out.set_side(n, *s);
                    }
                }
            }
            offset += g.vertices.len();
        }
        if !any_bip {
            out.bipartition = None;
        }
        out
    }

    /// Maximum vertex degree (arity).
    pub fn max_arity(&self) -> usize {
        self.vertices.iter().map(|v| v.sig.arity()).max().unwrap_or(0)
    }
}
