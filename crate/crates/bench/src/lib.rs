//! Shared fixtures for the benchmarks in `benches/`.

use proxemb::{generate_role_graph, Graph, Shape};

/// Noiseless house graph with `n_shapes` houses on a cycle of
/// `6 * n_shapes` nodes, so the node count is `11 * n_shapes`.
pub fn house_graph(n_shapes: usize) -> Graph {
    generate_role_graph(Shape::House, n_shapes, 6 * n_shapes, 0.0, 0)
        .expect("house parameters are valid")
        .graph
}
