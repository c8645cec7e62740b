//! Undirected graphs and the dense matrices derived from them.
//!
//! Every proximity operator in this crate starts from one of the matrices
//! built here: the adjacency `A`, the degree matrix `D`, the Laplacian
//! `L = D - A`, its pseudoinverse `L+`, and the random-walk transition
//! matrix `R = D^-1 A`. Matrices are dense `nalgebra` matrices; graphs are
//! expected to be desk scale (a few thousand nodes at most).

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Dense row/column matrix used throughout the crate.
pub type DenseMatrix = DMatrix<f64>;

/// Absolute-plus-relative tolerance used by [`symmetric_eig`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Relative cutoff below which Laplacian eigenvalues count as zero in `L+`.
pub const PINV_RELATIVE_THRESHOLD: f64 = 1e-8;

/// Immutable undirected graph on nodes `0..n`.
///
/// Edges are stored once, as `(u, v, w)` with `u < v`, sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    labels: Option<Vec<i64>>,
}

impl Graph {
    /// Builds a graph from unweighted edges. Self-loops and duplicates
    /// (in either orientation) are rejected.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let weighted: Vec<_> = edges.iter().map(|&(u, v)| (u, v, 1.0)).collect();
        Self::with_weights(n, &weighted)
    }

    pub fn with_weights(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut out = Vec::with_capacity(edges.len());
        for &(u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u}, {v}) out of range for {n} nodes"
                )));
            }
            if u == v {
                return Err(Error::InvalidParameter(format!("self-loop on node {u}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u}, {v}) has non-positive weight {w}"
                )));
            }
            out.push((u.min(v), u.max(v), w));
        }
        out.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        if let Some(w) = out.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::InvalidParameter(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        Ok(Graph {
            n,
            edges: out,
            labels: None,
        })
    }

    /// Attaches one integer class per node.
    pub fn with_labels(mut self, labels: Vec<i64>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} nodes",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            labels: None,
        }
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &edges).expect("path edges are valid")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 nodes");
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::new(n, &edges).expect("cycle edges are valid")
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Self::new(n, &edges).expect("complete graph edges are valid")
    }

    /// `K_{1,leaves}` with the center at index 0.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Self::new(leaves + 1, &edges).expect("star edges are valid")
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let key = (u.min(v), u.max(v));
        self.edges
            .binary_search_by(|e| (e.0, e.1).cmp(&key))
            .is_ok()
    }

    /// Weighted degree of every node.
    pub fn degrees(&self) -> Vec<f64> {
        let mut deg = vec![0.0; self.n];
        for &(u, v, w) in &self.edges {
            deg[u] += w;
            deg[v] += w;
        }
        deg
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v, _) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    /// Errors with the first node of degree zero, if any.
    pub fn check_no_isolated(&self) -> Result<()> {
        match self.degrees().iter().position(|&d| d <= 0.0) {
            Some(node) => Err(Error::IsolatedNode { node }),
            None => Ok(()),
        }
    }

    /// Connected components, each sorted ascending, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let adj = self.neighbors();
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for start in 0..self.n {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![start];
            comp[start] = id;
            let mut head = 0;
            while head < members.len() {
                let u = members[head];
                head += 1;
                for &v in &adj[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = id;
                        members.push(v);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Induced subgraph on `nodes`; node `nodes[i]` becomes `i`.
    pub fn subgraph(&self, nodes: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.n];
        for (i, &u) in nodes.iter().enumerate() {
            index[u] = i;
        }
        let edges: Vec<_> = self
            .edges
            .iter()
            .filter(|&&(u, v, _)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|&(u, v, w)| (index[u], index[v], w))
            .collect();
        let labels = self
            .labels
            .as_ref()
            .map(|l| nodes.iter().map(|&u| l[u]).collect());
        let mut g = Graph::with_weights(nodes.len(), &edges).expect("induced edges are valid");
        g.labels = labels;
        g
    }

    /// Relabels node `i` as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Graph> {
        check_permutation(perm, self.n)?;
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|&(u, v, w)| (perm[u], perm[v], w))
            .collect();
        let mut g = Graph::with_weights(self.n, &edges)?;
        if let Some(labels) = &self.labels {
            let mut out = vec![0; self.n];
            for (i, &l) in labels.iter().enumerate() {
                out[perm[i]] = l;
            }
            g.labels = Some(out);
        }
        Ok(g)
    }

    /// Block-diagonal union: nodes of `other` are shifted by `self.n`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n;
        let edges: Vec<_> = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(u, v, w)| (u + shift, v + shift, w)))
            .collect();
        let mut g = Graph::with_weights(self.n + other.n, &edges).expect("union edges are valid");
        if let (Some(a), Some(b)) = (&self.labels, &other.labels) {
            g.labels = Some(a.iter().chain(b).copied().collect());
        }
        g
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "permutation of length {} for {n} nodes",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidParameter("not a permutation".into()));
        }
    }
    Ok(())
}

/// Original node identifiers, indexed by contiguous node index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeIds {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl NodeIds {
    fn intern(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.names.len();
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), i);
        i
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn get(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Mapping `names[i] -> i`; repeated names are an error.
    pub fn from_names(names: &[String]) -> Result<Self> {
        let mut ids = NodeIds::default();
        for (i, name) in names.iter().enumerate() {
            if ids.intern(name) != i {
                return Err(Error::InvalidParameter(format!("duplicate node id {name:?}")));
            }
        }
        Ok(ids)
    }

    /// Identity mapping `"0" -> 0, "1" -> 1, ...`.
    pub fn sequential(n: usize) -> Self {
        let mut ids = NodeIds::default();
        for i in 0..n {
            ids.intern(&i.to_string());
        }
        ids
    }
}

/// Result of reading an edge-list file.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub ids: NodeIds,
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
}

/// Reads a whitespace-separated edge list. Lines are `u v`, or `u v w` when
/// `weighted` is set; `#` starts a comment. Node tokens are arbitrary strings,
/// reindexed in order of first appearance.
pub fn load_edge_list(path: impl AsRef<Path>, weighted: bool) -> Result<LoadedGraph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, weighted)
}

pub fn parse_edge_list(text: &str, weighted: bool) -> Result<LoadedGraph> {
    let mut ids = NodeIds::default();
    let mut seen: HashMap<(usize, usize), ()> = HashMap::new();
    let mut edges = Vec::new();
    let mut self_loops = 0;
    let mut duplicates = 0;
    for (lineno, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let line_no = lineno + 1;
        if tokens.len() < 2 || tokens.len() > 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 2 or 3 tokens, found {}", tokens.len()),
            });
        }
        let w = match (weighted, tokens.get(2)) {
            (true, Some(tok)) => {
                let w: f64 = tok.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("bad weight {tok:?}"),
                })?;
                if !(w.is_finite() && w > 0.0) {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("weight must be positive, got {w}"),
                    });
                }
                w
            }
            _ => 1.0,
        };
        let u = ids.intern(tokens[0]);
        let v = ids.intern(tokens[1]);
        if u == v {
            self_loops += 1;
            continue;
        }
        let key = (u.min(v), u.max(v));
        if seen.insert(key, ()).is_some() {
            duplicates += 1;
            continue;
        }
        edges.push((key.0, key.1, w));
    }
    if self_loops > 0 {
        log::warn!("dropped {self_loops} self-loop line(s)");
    }
    let graph = Graph::with_weights(ids.len(), &edges)?;
    Ok(LoadedGraph {
        graph,
        ids,
        self_loops_dropped: self_loops,
        duplicates_dropped: duplicates,
    })
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Reads `node_id label` lines. Returns the labels in node-index order; a
/// leading header line whose label is not an integer is skipped. Nodes
/// without a label are an error.
pub fn load_labels(path: impl AsRef<Path>, ids: &NodeIds) -> Result<Vec<i64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_labels(&text, ids)
}

pub fn parse_labels(text: &str, ids: &NodeIds) -> Result<Vec<i64>> {
    let mut labels: Vec<Option<i64>> = vec![None; ids.len()];
    let mut first = true;
    for (lineno, raw) in text.lines().enumerate() {
        let tokens: Vec<&str> = strip_comment(raw).split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let line = lineno + 1;
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line,
                message: "expected `node_id label`".into(),
            });
        }
        let label: i64 = match tokens[1].parse() {
            Ok(l) => l,
            Err(_) if first => {
                first = false;
                continue;
            }
            Err(_) => {
                return Err(Error::Parse {
                    line,
                    message: format!("bad label {:?}", tokens[1]),
                })
            }
        };
        first = false;
        // Labels for nodes that never appear in an edge are ignored.
        if let Some(i) = ids.get(tokens[0]) {
            labels[i] = Some(label);
        }
    }
    labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| {
            l.ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("node {:?} has no label", ids.name(i)),
            })
        })
        .collect()
}

/// Writes a matrix as headerless CSV.
pub fn write_matrix_csv(m: &DenseMatrix, mut out: impl Write) -> std::io::Result<()> {
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format_float(m[(i, j)])).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

/// Shortest representation that round-trips through `str::parse::<f64>`.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

pub fn adjacency(g: &Graph) -> DenseMatrix {
    let mut a = DMatrix::zeros(g.n, g.n);
    for &(u, v, w) in &g.edges {
        a[(u, v)] = w;
        a[(v, u)] = w;
    }
    a
}

pub fn degree_matrix(g: &Graph) -> DenseMatrix {
    DMatrix::from_diagonal(&DVector::from_vec(g.degrees()))
}

/// Unnormalized Laplacian `L = D - A`.
pub fn laplacian(g: &Graph) -> DenseMatrix {
    let mut l = -adjacency(g);
    for (i, d) in g.degrees().into_iter().enumerate() {
        l[(i, i)] = d;
    }
    l
}

/// Random-walk transition matrix `R = D^-1 A`.
pub fn rw_transition(g: &Graph) -> Result<DenseMatrix> {
    g.check_no_isolated()?;
    let mut r = adjacency(g);
    for (i, d) in g.degrees().into_iter().enumerate() {
        r.row_mut(i).scale_mut(1.0 / d);
    }
    Ok(r)
}

/// Eigendecomposition of a symmetric matrix: eigenvalues ascending and the
/// matching orthonormal eigenvectors as columns.
pub fn symmetric_eig(m: &DenseMatrix) -> Result<(DVector<f64>, DenseMatrix)> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition of a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok((DVector::zeros(0), DMatrix::zeros(0, 0)));
    }
    let deviation = (m - m.transpose()).amax();
    if deviation > SYMMETRY_TOLERANCE * m.amax().max(1.0) {
        return Err(Error::Asymmetric { deviation });
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("symmetric_eig input"));
    }
    // Symmetrize exactly so the solver sees a symmetric input.
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    Ok((values, vectors))
}

/// `U f(Λ) U^T` for a symmetric matrix.
pub(crate) fn spectral_apply(
    values: &DVector<f64>,
    vectors: &DenseMatrix,
    f: impl Fn(f64) -> f64,
) -> DenseMatrix {
    let mut scaled = vectors.clone();
    for (k, &lambda) in values.iter().enumerate() {
        scaled.column_mut(k).scale_mut(f(lambda));
    }
    scaled * vectors.transpose()
}

/// Evaluates `f` on each connected component and scatters the results into a
/// block-diagonal `n x n` matrix. Entries between components are exactly zero.
pub(crate) fn per_component<F>(g: &Graph, f: F) -> Result<DenseMatrix>
where
    F: Fn(&Graph) -> Result<DenseMatrix>,
{
    let comps = g.components();
    if comps.len() == 1 {
        return f(g);
    }
    let mut out = DMatrix::zeros(g.n, g.n);
    for nodes in &comps {
        let block = f(&g.subgraph(nodes))?;
        for (bi, &i) in nodes.iter().enumerate() {
            for (bj, &j) in nodes.iter().enumerate() {
                out[(i, j)] = block[(bi, bj)];
            }
        }
    }
    Ok(out)
}

/// Moore-Penrose pseudoinverse of the Laplacian. Computed per connected
/// component; eigenvalues at or below `1e-8 * max eigenvalue` are treated as
/// zero.
pub fn laplacian_pinv(g: &Graph) -> Result<DenseMatrix> {
    per_component(g, |c| {
        let (values, vectors) = symmetric_eig(&laplacian(c))?;
        let cutoff = PINV_RELATIVE_THRESHOLD * values.max().max(0.0);
        Ok(spectral_apply(&values, &vectors, |lambda| {
            if lambda <= cutoff {
                0.0
            } else {
                1.0 / lambda
            }
        }))
    })
}

/// Errors unless every entry is finite.
pub(crate) fn ensure_finite(m: &DenseMatrix, what: &'static str) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn m(rows: &[&[f64]]) -> DenseMatrix {
        DMatrix::from_row_iterator(
            rows.len(),
            rows[0].len(),
            rows.iter().flat_map(|r| r.iter().copied()),
        )
    }

    #[test]
    fn loads_two_edge_path() {
        let g = parse_edge_list("0 1\n1 2", false).unwrap().graph;
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edges(), &[(0, 1, 1.0), (1, 2, 1.0)]);
    }

    #[test]
    fn duplicate_edges_collapse() {
        let loaded = parse_edge_list("0 1\n1 0", false).unwrap();
        assert_eq!(loaded.graph.edges(), &[(0, 1, 1.0)]);
        assert_eq!(loaded.duplicates_dropped, 1);
    }

    #[test]
    fn string_ids_round_trip() {
        let loaded = parse_edge_list("a b\nb c", false).unwrap();
        assert_eq!(loaded.graph, Graph::path(3));
        for (i, name) in ["a", "b", "c"].iter().enumerate() {
            assert_eq!(loaded.ids.get(name), Some(i));
            assert_eq!(loaded.ids.name(i), *name);
        }
    }

    #[test]
    fn comments_weights_and_self_loops() {
        let text = "# header\n0 1 2.5 # trailing\n\n1 1\n1 2 0.5\n";
        let loaded = parse_edge_list(text, true).unwrap();
        assert_eq!(loaded.self_loops_dropped, 1);
        assert_eq!(loaded.graph.edges(), &[(0, 1, 2.5), (1, 2, 0.5)]);
        let unweighted = parse_edge_list(text, false).unwrap();
        assert_eq!(unweighted.graph.edges(), &[(0, 1, 1.0), (1, 2, 1.0)]);
    }

    #[test]
    fn parse_error_reports_line() {
        match parse_edge_list("0 1\n2\n", false) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse_edge_list("0 1 x\n", true) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn labels_skip_header() {
        let ids = parse_edge_list("a b\nb c", false).unwrap().ids;
        let labels = parse_labels("node label\nc 2\na 0\nb 1\n", &ids).unwrap();
        assert_eq!(labels, vec![0, 1, 2]);
        assert!(parse_labels("a 0\nb 1\n", &ids).is_err());
    }

    #[test]
    fn adjacency_examples() {
        assert_eq!(
            adjacency(&Graph::path(3)),
            m(&[&[0., 1., 0.], &[1., 0., 1.], &[0., 1., 0.]])
        );
        assert_eq!(adjacency(&Graph::empty(2)), DMatrix::zeros(2, 2));
        assert_eq!(
            adjacency(&Graph::complete(3)),
            m(&[&[0., 1., 1.], &[1., 0., 1.], &[1., 1., 0.]])
        );
    }

    #[test]
    fn degree_examples() {
        let diag = |g: &Graph| degree_matrix(g).diagonal().iter().copied().collect::<Vec<_>>();
        assert_eq!(diag(&Graph::path(3)), vec![1., 2., 1.]);
        assert_eq!(diag(&Graph::complete(3)), vec![2., 2., 2.]);
        assert_eq!(diag(&Graph::star(3)), vec![3., 1., 1., 1.]);
    }

    #[test]
    fn laplacian_examples() {
        assert_eq!(
            laplacian(&Graph::path(3)),
            m(&[&[1., -1., 0.], &[-1., 2., -1.], &[0., -1., 1.]])
        );
        let (values, _) = symmetric_eig(&laplacian(&Graph::complete(3))).unwrap();
        assert_relative_eq!(values[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(values[1], 3.0, epsilon = 1e-12);
        assert_relative_eq!(values[2], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn rw_examples() {
        assert_eq!(
            rw_transition(&Graph::path(3)).unwrap(),
            m(&[&[0., 1., 0.], &[0.5, 0., 0.5], &[0., 1., 0.]])
        );
        let r = rw_transition(&Graph::complete(3)).unwrap();
        assert_eq!(r, m(&[&[0., 0.5, 0.5], &[0.5, 0., 0.5], &[0.5, 0.5, 0.]]));
        let g = Graph::new(3, &[(0, 1)]).unwrap();
        assert!(matches!(rw_transition(&g), Err(Error::IsolatedNode { node: 2 })));
    }

    #[test]
    fn eig_examples() {
        let (v, u) = symmetric_eig(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(v.as_slice(), &[1., 1., 1.]);
        assert_relative_eq!(u.transpose() * &u, DMatrix::identity(3, 3), epsilon = 1e-12);

        let (v, u) = symmetric_eig(&m(&[&[2., 0.], &[0., 5.]])).unwrap();
        assert_eq!(v.as_slice(), &[2., 5.]);
        assert_relative_eq!(u[(0, 0)].abs(), 1.0);
        assert_relative_eq!(u[(1, 1)].abs(), 1.0);

        // det(L - λI) for the 3-path: -λ(λ-1)(λ-3).
        let (v, _) = symmetric_eig(&laplacian(&Graph::path(3))).unwrap();
        for (got, want) in v.iter().zip([0.0, 1.0, 3.0]) {
            assert_relative_eq!(*got, want, epsilon = 1e-12);
        }

        assert!(matches!(
            symmetric_eig(&m(&[&[1., 2.], &[0., 1.]])),
            Err(Error::Asymmetric { .. })
        ));
    }

    #[test]
    fn pinv_examples() {
        assert_eq!(laplacian_pinv(&Graph::empty(3)).unwrap(), DMatrix::zeros(3, 3));

        let g = Graph::path(3);
        let l = laplacian(&g);
        let lp = laplacian_pinv(&g).unwrap();
        assert!((&l * &lp * &l - &l).norm() <= 1e-6);

        // Eigenvalues {0, 3, 3} give L+ = (1/9)(3I - J).
        let want = (DMatrix::identity(3, 3) * 3.0 - DMatrix::from_element(3, 3, 1.0)) / 9.0;
        assert_relative_eq!(laplacian_pinv(&Graph::complete(3)).unwrap(), want, epsilon = 1e-12);
    }

    #[test]
    fn pinv_disconnected_is_block_diagonal() {
        let g = Graph::path(3).disjoint_union(&Graph::complete(4));
        let lp = laplacian_pinv(&g).unwrap();
        for i in 0..3 {
            for j in 3..7 {
                assert_eq!(lp[(i, j)], 0.0);
                assert_eq!(lp[(j, i)], 0.0);
            }
        }
        let l = laplacian(&g);
        assert!((&l * &lp * &l - &l).norm() <= 1e-6);
    }

    #[test]
    fn components_and_subgraph() {
        let g = Graph::new(6, &[(0, 3), (3, 5), (1, 2)]).unwrap();
        assert_eq!(g.components(), vec![vec![0, 3, 5], vec![1, 2], vec![4]]);
        assert_eq!(g.subgraph(&[0, 3, 5]), Graph::path(3));
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Graph::new(2, &[(0, 0)]).is_err());
        assert!(Graph::new(2, &[(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(2, &[(0, 2)]).is_err());
        assert!(Graph::with_weights(2, &[(0, 1, -1.0)]).is_err());
    }

    #[test]
    fn matrix_csv_round_trips() {
        let a = m(&[&[0.1, -2.0], &[1.0 / 3.0, 1e-300]]);
        let mut buf = Vec::new();
        write_matrix_csv(&a, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let values: Vec<f64> = text
            .lines()
            .flat_map(|l| l.split(',').map(|t| t.parse::<f64>().unwrap()).collect::<Vec<_>>())
            .collect();
        assert_eq!(values, vec![0.1, -2.0, 1.0 / 3.0, 1e-300]);
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (2usize..12).prop_flat_map(|n| {
            proptest::collection::vec(proptest::bool::weighted(0.35), n * (n - 1) / 2).prop_map(
                move |bits| {
                    let mut edges = Vec::new();
                    let mut k = 0;
                    for i in 0..n {
                        for j in i + 1..n {
                            if bits[k] {
                                edges.push((i, j));
                            }
                            k += 1;
                        }
                    }
                    Graph::new(n, &edges).unwrap()
                },
            )
        })
    }

    proptest! {
        #[test]
        fn laplacian_annihilates_ones(g in arb_graph()) {
            let l = laplacian(&g);
            let ones = DVector::from_element(g.node_count(), 1.0);
            prop_assert!((l * ones).amax() <= 1e-12);
        }

        #[test]
        fn rw_rows_are_stochastic(g in arb_graph()) {
            if let Ok(r) = rw_transition(&g) {
                for row in r.row_iter() {
                    prop_assert!((row.sum() - 1.0).abs() <= 1e-12);
                }
            }
        }

        #[test]
        fn eig_reconstructs(g in arb_graph()) {
            let l = laplacian(&g);
            let (values, vectors) = symmetric_eig(&l).unwrap();
            let n = g.node_count();
            prop_assert!(values.as_slice().windows(2).all(|w| w[0] <= w[1]));
            let rebuilt = spectral_apply(&values, &vectors, |x| x);
            prop_assert!((rebuilt - &l).norm() <= 1e-6 * l.norm().max(1e-300));
            prop_assert!((vectors.transpose() * &vectors - DMatrix::identity(n, n)).amax() <= 1e-8);
        }

        #[test]
        fn pinv_axiom(g in arb_graph()) {
            let l = laplacian(&g);
            let lp = laplacian_pinv(&g).unwrap();
            prop_assert!((&l * &lp * &l - &l).norm() <= 1e-6);
        }
    }
}
