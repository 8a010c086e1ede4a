//! Simple undirected graphs, the standard families used throughout, Cartesian
//! products, and degeneracy (smallest-last) orderings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A simple undirected graph on vertices `0..n`.
///
/// Immutable after construction; adjacency lists are built eagerly and edges
/// are kept sorted as `(min, max)` pairs so that everything layered on top
/// (covers store one link per edge) has a stable edge order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph, rejecting loops, out-of-range endpoints and duplicate
    /// edges.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        if n == 0 {
            return Err(Error::Graph("graph must have at least one vertex".into()));
        }
        let mut norm: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Graph(format!(
                    "edge {}-{} out of range for {} vertices",
                    a, b, n
                )));
            }
            if a == b {
                return Err(Error::Graph(format!("loop at vertex {}", a)));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        if let Some(w) = norm.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Graph(format!(
                "duplicate edge {}-{}",
                w[0].0, w[0].1
            )));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &norm {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Graph {
            n,
            edges: norm,
            adj,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Edges as `(min, max)` pairs in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_index(u, v).is_some()
    }

    /// Position of edge `{u,v}` in [`Graph::edges`], if present.
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok()
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for &w in &self.adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.edges.len() == self.n - 1
    }

    /// True iff the graph is a single cycle on at least 3 vertices.
    pub fn is_cycle(&self) -> bool {
        self.n >= 3
            && self.edges.len() == self.n
            && self.is_connected()
            && (0..self.n).all(|v| self.degree(v) == 2)
    }

    /// Vertices of a cycle graph in cyclic order, starting at vertex 0 and
    /// moving towards its smaller neighbor.
    pub fn cycle_order(&self) -> Option<Vec<usize>> {
        if !self.is_cycle() {
            return None;
        }
        let mut order = vec![0usize];
        let mut prev = 0usize;
        let mut cur = self.adj[0][0];
        while cur != 0 {
            order.push(cur);
            let next = if self.adj[cur][0] == prev {
                self.adj[cur][1]
            } else {
                self.adj[cur][0]
            };
            prev = cur;
            cur = next;
        }
        Some(order)
    }

    /// Subgraph induced by `vertices` (sorted, deduplicated) together with
    /// the old-index list: new vertex `i` is `map[i]` in the original graph.
    pub fn induced(&self, vertices: &[usize]) -> Result<(Graph, Vec<usize>)> {
        let mut map: Vec<usize> = vertices.to_vec();
        map.sort_unstable();
        map.dedup();
        if map.is_empty() {
            return Err(Error::Graph("induced subgraph needs vertices".into()));
        }
        if *map.last().unwrap() >= self.n {
            return Err(Error::Graph("induced vertex out of range".into()));
        }
        let mut inv = vec![usize::MAX; self.n];
        for (new, &old) in map.iter().enumerate() {
            inv[old] = new;
        }
        let mut edges = Vec::new();
        for &(u, v) in &self.edges {
            if inv[u] != usize::MAX && inv[v] != usize::MAX {
                edges.push((inv[u], inv[v]));
            }
        }
        Ok((Graph::new(map.len(), &edges)?, map))
    }

    /// Cycle `C_n` with vertices `0..n` in cyclic order.
    pub fn cycle(n: usize) -> Result<Graph> {
        if n < 3 {
            return Err(Error::Graph(format!("cycle needs n >= 3, got {}", n)));
        }
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::new(n, &edges)
    }

    /// Path `P_n` on `n` vertices.
    pub fn path(n: usize) -> Result<Graph> {
        if n == 0 {
            return Err(Error::Graph("path needs n >= 1".into()));
        }
        let edges: Vec<_> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        Graph::new(n, &edges)
    }

    /// Complete graph `K_n`.
    pub fn complete(n: usize) -> Result<Graph> {
        if n == 0 {
            return Err(Error::Graph("complete graph needs n >= 1".into()));
        }
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph::new(n, &edges)
    }

    /// Complete bipartite `K_{a,b}`: the X part is `0..a`, the Y part is
    /// `a..a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Result<Graph> {
        if a == 0 || b == 0 {
            return Err(Error::Graph("complete bipartite parts must be nonempty".into()));
        }
        let mut edges = Vec::new();
        for u in 0..a {
            for v in 0..b {
                edges.push((u, a + v));
            }
        }
        Graph::new(a + b, &edges)
    }
}

/// Named graph families for the CLI surface.
pub fn standard_graph(kind: &str, params: &[usize]) -> Result<Graph> {
    match (kind, params) {
        ("cycle", [n]) => Graph::cycle(*n),
        ("path", [n]) => Graph::path(*n),
        ("complete", [n]) => Graph::complete(*n),
        ("complete_bipartite", [a, b]) => Graph::complete_bipartite(*a, *b),
        _ => Err(Error::Graph(format!(
            "unknown family {:?} with params {:?}",
            kind, params
        ))),
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphJson {
            n: self.n,
            edges: self.edges.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Graph, D::Error> {
        let raw = GraphJson::deserialize(d)?;
        Graph::new(raw.n, &raw.edges).map_err(serde::de::Error::custom)
    }
}

/// A smallest-last elimination ordering. `width` is the coloring number
/// col(G): every vertex has at most `width - 1` neighbors earlier in
/// `ordering`.
#[derive(Debug, Clone, Serialize)]
pub struct DegeneracyOrdering {
    pub ordering: Vec<usize>,
    pub width: usize,
}

/// Computes col(G) via smallest-last removal, ties broken by lowest index.
pub fn coloring_number(g: &Graph) -> DegeneracyOrdering {
    let n = g.vertex_count();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut removal = Vec::with_capacity(n);
    let mut width = 0usize;
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !removed[v])
            .min_by_key(|&v| (deg[v], v))
            .unwrap();
        width = width.max(deg[v] + 1);
        removed[v] = true;
        removal.push(v);
        for &w in g.neighbors(v) {
            if !removed[w] {
                deg[w] -= 1;
            }
        }
    }
    removal.reverse();
    DegeneracyOrdering {
        ordering: removal,
        width,
    }
}

/// The Cartesian product `G □ H`, keeping both factors and the bijection
/// between vertex pairs and flat indices.
///
/// Pair `(u, v)` with `u` in the left factor and `v` in the right factor maps
/// to flat index `v * |V(G)| + u`, so the fiber over a fixed right-factor
/// vertex is a contiguous block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductGraph {
    left: Graph,
    right: Graph,
    graph: Graph,
}

impl ProductGraph {
    pub fn new(left: &Graph, right: &Graph) -> ProductGraph {
        let nl = left.vertex_count();
        let nr = right.vertex_count();
        let mut edges = Vec::with_capacity(nl * right.edge_count() + nr * left.edge_count());
        for v in 0..nr {
            for &(a, b) in left.edges() {
                edges.push((v * nl + a, v * nl + b));
            }
        }
        for u in 0..nl {
            for &(a, b) in right.edges() {
                edges.push((a * nl + u, b * nl + u));
            }
        }
        let graph = Graph::new(nl * nr, &edges).expect("product of valid graphs is valid");
        ProductGraph {
            left: left.clone(),
            right: right.clone(),
            graph,
        }
    }

    pub fn left(&self) -> &Graph {
        &self.left
    }

    pub fn right(&self) -> &Graph {
        &self.right
    }

    /// The flat product graph.
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn index(&self, u: usize, v: usize) -> usize {
        debug_assert!(u < self.left.vertex_count() && v < self.right.vertex_count());
        v * self.left.vertex_count() + u
    }

    pub fn pair(&self, flat: usize) -> (usize, usize) {
        let nl = self.left.vertex_count();
        (flat % nl, flat / nl)
    }
}

#[derive(Serialize, Deserialize)]
struct ProductGraphJson {
    left: Graph,
    right: Graph,
    graph: Graph,
    /// `pairs[flat] = (u, v)`, the explicit pair-to-index table.
    pairs: Vec<(usize, usize)>,
}

impl Serialize for ProductGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs = (0..self.graph.vertex_count()).map(|i| self.pair(i)).collect();
        ProductGraphJson {
            left: self.left.clone(),
            right: self.right.clone(),
            graph: self.graph.clone(),
            pairs,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ProductGraph {
    fn deserialize<D: serde::Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<ProductGraph, D::Error> {
        let raw = ProductGraphJson::deserialize(d)?;
        let rebuilt = ProductGraph::new(&raw.left, &raw.right);
        if rebuilt.graph != raw.graph {
            return Err(serde::de::Error::custom("product graph does not match factors"));
        }
        let pairs: Vec<(usize, usize)> = (0..rebuilt.graph.vertex_count())
            .map(|i| rebuilt.pair(i))
            .collect();
        if pairs != raw.pairs {
            return Err(serde::de::Error::custom("pair table does not match index rule"));
        }
        Ok(rebuilt)
    }
}
