//! Explicit truncated crystal graphs.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cartan::{IndexSet, Residue, Weight};
use crate::error::GraphError;
use crate::model::Crystal;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexRecord {
    pub depth: usize,
    pub wt: Weight,
    pub eps: Vec<i64>,
    pub phi: Vec<i64>,
}

/// A colored edge `(source key, color, target key)`.
pub type Edge = (String, u32, String);

/// Vertices reachable from the source by at most `depth` f-edges.
///
/// `edges` holds the f-edges between stored vertices; `raise` holds, for
/// every stored vertex `b` and color `i` with `e_i(b)` nonzero, the edge
/// `(b, i, e_i(b))` as computed by the model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrystalGraph {
    pub colors: IndexSet,
    pub depth: usize,
    pub source: String,
    pub vertices: BTreeMap<String, VertexRecord>,
    pub edges: BTreeSet<Edge>,
    pub raise: BTreeSet<Edge>,
}

/// Frontier-parallel breadth-first generation. Successors of a layer are
/// computed in parallel and merged in key order, so the result does not
/// depend on scheduling.
pub fn bfs_generate<C>(model: &C, depth: usize) -> CrystalGraph
where
    C: Crystal + Sync,
    C::Elem: Send + Sync,
{
    let colors = model.colors();
    let record = |x: &C::Elem, d: usize| VertexRecord {
        depth: d,
        wt: model.wt(x),
        eps: colors.residues().map(|i| model.eps(x, i)).collect(),
        phi: colors.residues().map(|i| model.phi(x, i)).collect(),
    };
    let top = model.highest();
    let source = model.key(&top);
    let mut vertices = BTreeMap::new();
    vertices.insert(source.clone(), record(&top, 0));
    let mut edges = BTreeSet::new();
    let mut raise = BTreeSet::new();
    let mut frontier = vec![(source.clone(), top)];

    for d in 0..=depth {
        let steps: Vec<(Vec<Edge>, Vec<(String, C::Elem)>, Vec<Edge>)> = frontier
            .par_iter()
            .map(|(k, x)| {
                let mut down = Vec::new();
                let mut up = Vec::new();
                let mut out = Vec::new();
                for i in colors.residues() {
                    if let Some(y) = model.e(x, i) {
                        up.push((k.clone(), i.0, model.key(&y)));
                    }
                    if d < depth {
                        if let Some(y) = model.f(x, i) {
                            let ky = model.key(&y);
                            down.push((k.clone(), i.0, ky.clone()));
                            out.push((ky, y));
                        }
                    }
                }
                (down, out, up)
            })
            .collect();
        let mut next: BTreeMap<String, C::Elem> = BTreeMap::new();
        for (down, out, up) in steps {
            edges.extend(down);
            raise.extend(up);
            for (k, y) in out {
                if !vertices.contains_key(&k) {
                    next.entry(k).or_insert(y);
                }
            }
        }
        let records: Vec<(String, VertexRecord)> =
            next.par_iter().map(|(k, y)| (k.clone(), record(y, d + 1))).collect();
        vertices.extend(records);
        frontier = next.into_iter().collect();
    }

    CrystalGraph { colors, depth, source, vertices, edges, raise }
}

/// Elements by depth, each layer sorted by key. Sequential counterpart of
/// [`bfs_generate`] for callers that need the elements themselves.
pub fn bfs_layers<C: Crystal>(model: &C, depth: usize) -> Vec<Vec<C::Elem>> {
    let top = model.highest();
    let mut seen = HashSet::from([model.key(&top)]);
    let mut layers = vec![vec![top]];
    for _ in 0..depth {
        let mut next = BTreeMap::new();
        for x in layers.last().expect("nonempty") {
            for i in model.colors().residues() {
                if let Some(y) = model.f(x, i) {
                    let k = model.key(&y);
                    if !seen.contains(&k) {
                        next.entry(k).or_insert(y);
                    }
                }
            }
        }
        seen.extend(next.keys().cloned());
        layers.push(next.into_values().collect());
    }
    layers
}

impl CrystalGraph {
    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.depth + 1];
        for v in self.vertices.values() {
            sizes[v.depth] += 1;
        }
        sizes
    }

    /// Number of f-edges leaving each layer.
    pub fn layer_edge_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.depth + 1];
        for (src, _, _) in &self.edges {
            if let Some(v) = self.vertices.get(src) {
                counts[v.depth] += 1;
            }
        }
        counts
    }

    pub fn keys_at_depth(&self, depth: usize) -> BTreeSet<String> {
        self.vertices.iter().filter(|(_, v)| v.depth == depth).map(|(k, _)| k.clone()).collect()
    }

    /// f-successor of `key` along color `i`, if stored.
    pub fn f_target(&self, key: &str, i: u32) -> Option<&str> {
        self.edges
            .range((key.to_string(), i, String::new())..)
            .next()
            .filter(|(s, c, _)| s == key && *c == i)
            .map(|(_, _, t)| t.as_str())
    }

    pub fn e_target(&self, key: &str, i: u32) -> Option<&str> {
        self.raise
            .range((key.to_string(), i, String::new())..)
            .next()
            .filter(|(s, c, _)| s == key && *c == i)
            .map(|(_, _, t)| t.as_str())
    }

    /// A shortest f-path from the source to every vertex.
    pub fn paths(&self) -> BTreeMap<String, Vec<u32>> {
        let mut out = BTreeMap::new();
        out.insert(self.source.clone(), Vec::new());
        let mut queue = VecDeque::from([self.source.clone()]);
        let mut adj: HashMap<&str, Vec<(u32, &str)>> = HashMap::new();
        for (s, c, t) in &self.edges {
            adj.entry(s.as_str()).or_default().push((*c, t.as_str()));
        }
        while let Some(k) = queue.pop_front() {
            let path = out[&k].clone();
            for &(c, t) in adj.get(k.as_str()).map(|v| v.as_slice()).unwrap_or(&[]) {
                if !out.contains_key(t) {
                    let mut p = path.clone();
                    p.push(c);
                    out.insert(t.to_string(), p);
                    queue.push_back(t.to_string());
                }
            }
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph crystal {\n");
        for k in self.vertices.keys() {
            let _ = writeln!(s, "  {k:?} [label={k:?}];");
        }
        for (a, c, b) in &self.edges {
            let _ = writeln!(s, "  {a:?} -> {b:?} [label=\"{c}\"];");
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let wire = Wire {
            schema: SCHEMA_VERSION,
            colors: self.colors.e(),
            depth: self.depth,
            source: self.source.clone(),
            vertices: self
                .vertices
                .iter()
                .map(|(k, v)| WireVertex {
                    key: k.clone(),
                    depth: v.depth,
                    wt: v.wt.clone(),
                    eps: v.eps.clone(),
                    phi: v.phi.clone(),
                })
                .collect(),
            edges: self.edges.iter().cloned().collect(),
            raise: self.raise.iter().cloned().collect(),
        };
        serde_json::to_value(wire).expect("graph serializes")
    }

    pub fn from_json(value: serde_json::Value) -> Result<Self, GraphError> {
        let schema = value.get("schema").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
        if schema != SCHEMA_VERSION {
            return Err(GraphError::Schema(schema));
        }
        let wire: Wire = serde_json::from_value(value)?;
        let colors = IndexSet::new(wire.colors)
            .map_err(|e| GraphError::Json(serde::de::Error::custom(e.to_string())))?;
        Ok(CrystalGraph {
            colors,
            depth: wire.depth,
            source: wire.source,
            vertices: wire
                .vertices
                .into_iter()
                .map(|v| (v.key, VertexRecord { depth: v.depth, wt: v.wt, eps: v.eps, phi: v.phi }))
                .collect(),
            edges: wire.edges.into_iter().collect(),
            raise: wire.raise.into_iter().collect(),
        })
    }

    pub fn export(&self, format: ExportFormat, path: &Path) -> Result<(), GraphError> {
        let text = match format {
            ExportFormat::Dot => self.to_dot(),
            ExportFormat::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json())?;
                s.push('\n');
                s
            }
        };
        fs::write(path, text).map_err(|source| GraphError::Io { path: path.to_path_buf(), source })
    }

    pub fn import(path: &Path) -> Result<Self, GraphError> {
        let text = fs::read_to_string(path)
            .map_err(|source| GraphError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(serde_json::from_str(&text)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

#[derive(Serialize, Deserialize)]
struct WireVertex {
    key: String,
    depth: usize,
    wt: Weight,
    eps: Vec<i64>,
    phi: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct Wire {
    schema: u32,
    colors: u32,
    depth: usize,
    source: String,
    vertices: Vec<WireVertex>,
    edges: Vec<Edge>,
    raise: Vec<Edge>,
}

/// One offending edge or vertex together with every failed condition there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub site: String,
    pub reasons: Vec<String>,
}

/// Checks the crystal axioms on every stored edge and vertex. Problems are
/// grouped by the f-edge slot `(source, color)` or vertex they concern.
pub fn check_axioms(g: &CrystalGraph) -> Vec<Violation> {
    let mut found: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut note = |site: String, reason: String| found.entry(site).or_default().push(reason);
    let colors = g.colors;

    for (k, v) in &g.vertices {
        for i in colors.residues() {
            let c = i.0 as usize;
            if v.phi[c] != v.eps[c] + colors.pair_weight(i, &v.wt) {
                note(format!("vertex {k}"), format!("phi_{c} != eps_{c} + <h_{c}, wt>"));
            }
            if v.eps[c] < 0 {
                note(format!("vertex {k}"), format!("eps_{c} is negative"));
            }
            let raised = g.e_target(k, i.0).is_some();
            if raised != (v.eps[c] > 0) {
                note(format!("vertex {k}"), format!("e_{c} zero does not match eps_{c} = 0"));
            }
        }
    }

    let mut incoming: BTreeMap<(&str, u32), usize> = BTreeMap::new();
    let mut outgoing: BTreeMap<(&str, u32), usize> = BTreeMap::new();
    for (a, c, b) in &g.edges {
        let site = format!("f_{c} from {a}");
        *outgoing.entry((a.as_str(), *c)).or_default() += 1;
        *incoming.entry((b.as_str(), *c)).or_default() += 1;
        if b == &g.source {
            note(site.clone(), "edge into the source".into());
        }
        let (Some(va), Some(vb)) = (g.vertices.get(a), g.vertices.get(b)) else {
            note(site, "endpoint is not a vertex".into());
            continue;
        };
        let i = Residue(*c);
        let ci = *c as usize;
        if vb.wt != &va.wt - &Weight::simple_root(i) {
            note(site.clone(), "wt does not drop by alpha".into());
        }
        if vb.eps[ci] != va.eps[ci] + 1 {
            note(site.clone(), "eps does not increase by one".into());
        }
        if vb.phi[ci] != va.phi[ci] - 1 {
            note(site.clone(), "phi does not decrease by one".into());
        }
        if g.e_target(b, *c) != Some(a.as_str()) {
            note(site, "e does not invert f".into());
        }
    }
    for ((k, c), n) in outgoing {
        if n > 1 {
            note(format!("f_{c} from {k}"), format!("{n} outgoing edges"));
        }
    }
    for ((k, c), n) in incoming {
        if n > 1 {
            note(format!("vertex {k}"), format!("{n} incoming f_{c} edges"));
        }
    }
    for (b, c, a) in &g.raise {
        let site = format!("f_{c} from {a}");
        match g.vertices.get(a) {
            None => note(site, format!("e_{c} of {b} leaves the graph")),
            Some(_) if g.f_target(a, *c) != Some(b.as_str()) => {
                note(site, format!("f does not invert e_{c} at {b}"))
            }
            Some(_) => {}
        }
    }

    let mut out: Vec<Violation> = Vec::new();
    for (site, mut reasons) in found {
        reasons.dedup();
        out.push(Violation { site, reasons });
    }
    out
}

/// Why two truncated graphs are not isomorphic: two color paths that reach
/// the same vertex in one graph and different vertices (or nothing) in the
/// other, or one path whose statistics disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IsoCounterexample {
    pub path1: Vec<u32>,
    pub path2: Option<Vec<u32>>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsoOutcome {
    /// Vertex map from the first graph to the second.
    Isomorphic(BTreeMap<String, String>),
    Counterexample(IsoCounterexample),
}

/// Transports `source -> source` along colored f-edges and checks that the
/// result is a well-defined bijection preserving `wt`, `eps` and `phi`.
/// `color_map[c]` is the color of the second graph matching color `c`.
pub fn check_isomorphism(
    g1: &CrystalGraph,
    g2: &CrystalGraph,
    color_map: &[u32],
) -> Result<IsoOutcome, GraphError> {
    let (n1, n2) = (g1.colors.e(), g2.colors.e());
    if n1 != n2 {
        return Err(GraphError::ColorMismatch(n1, n2));
    }
    let distinct: BTreeSet<u32> = color_map.iter().copied().collect();
    if color_map.len() != n1 as usize || distinct.len() != n1 as usize || distinct.iter().any(|&c| c >= n2)
    {
        return Err(GraphError::ColorMap { got: color_map.len(), expected: n1 as usize });
    }
    let fail = |path1: Vec<u32>, path2: Option<Vec<u32>>, reason: String| {
        Ok(IsoOutcome::Counterexample(IsoCounterexample { path1, path2, reason }))
    };

    let mut map: BTreeMap<String, String> = BTreeMap::new();
    let mut back: BTreeMap<String, String> = BTreeMap::new();
    let mut path: BTreeMap<String, Vec<u32>> = BTreeMap::new();
    let mut queue = VecDeque::new();
    map.insert(g1.source.clone(), g2.source.clone());
    back.insert(g2.source.clone(), g1.source.clone());
    path.insert(g1.source.clone(), Vec::new());
    queue.push_back(g1.source.clone());

    while let Some(a) = queue.pop_front() {
        let a2 = map[&a].clone();
        let pa = path[&a].clone();
        if let Some(reason) = stats_differ(g1, g2, &a, &a2, color_map) {
            return fail(pa, None, reason);
        }
        for c in 0..n1 {
            let c2 = color_map[c as usize];
            let mut p = pa.clone();
            p.push(c);
            match (g1.f_target(&a, c), g2.f_target(&a2, c2)) {
                (None, None) => {}
                (Some(_), None) => return fail(p, None, "edge missing in the second graph".into()),
                (None, Some(_)) => return fail(p, None, "edge missing in the first graph".into()),
                (Some(b), Some(b2)) => match (map.get(b), back.get(b2)) {
                    (Some(m), _) if m != b2 => {
                        return fail(path[b].clone(), Some(p), "paths merge only in the first graph".into())
                    }
                    (None, Some(pre)) => {
                        return fail(path[pre].clone(), Some(p), "paths merge only in the second graph".into())
                    }
                    (Some(_), _) => {}
                    (None, None) => {
                        map.insert(b.to_string(), b2.to_string());
                        back.insert(b2.to_string(), b.to_string());
                        path.insert(b.to_string(), p);
                        queue.push_back(b.to_string());
                    }
                },
            }
        }
    }

    if let Some(k) = g1.vertices.keys().find(|k| !map.contains_key(*k)) {
        let p = g1.paths().get(k).cloned().unwrap_or_default();
        return fail(p, None, format!("vertex {k} of the first graph is unreachable"));
    }
    if let Some(k) = g2.vertices.keys().find(|k| !back.contains_key(*k)) {
        let p = g2.paths().get(k).cloned().unwrap_or_default();
        return fail(p, None, format!("vertex {k} of the second graph has no preimage"));
    }
    Ok(IsoOutcome::Isomorphic(map))
}

fn stats_differ(g1: &CrystalGraph, g2: &CrystalGraph, a: &str, b: &str, color_map: &[u32]) -> Option<String> {
    let (Some(v1), Some(v2)) = (g1.vertices.get(a), g2.vertices.get(b)) else {
        return Some("edge target is not a vertex".into());
    };
    if v1.depth != v2.depth {
        return Some(format!("depth {} vs {}", v1.depth, v2.depth));
    }
    if v1.wt.relabel(|c| color_map[c as usize]) != v2.wt {
        return Some(format!("wt {} vs {}", v1.wt, v2.wt));
    }
    for (c, &c2) in color_map.iter().enumerate() {
        if v1.eps[c] != v2.eps[c2 as usize] {
            return Some(format!("eps_{c} {} vs {}", v1.eps[c], v2.eps[c2 as usize]));
        }
        if v1.phi[c] != v2.phi[c2 as usize] {
            return Some(format!("phi_{c} {} vs {}", v1.phi[c], v2.phi[c2 as usize]));
        }
    }
    None
}
