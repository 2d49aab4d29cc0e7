use serde::{Deserialize, Serialize};

pub type Vertex = usize;

/// Directed graph with named vertices; undirected graphs store both arcs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub names: Vec<String>,
    /// Sorted out-neighbors per vertex.
    pub out: Vec<Vec<Vertex>>,
}

impl Graph {
    pub fn new(names: Vec<String>) -> Self {
        let n = names.len();
        Graph {
            names,
            out: vec![Vec::new(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn add_arc(&mut self, from: Vertex, to: Vertex) {
        if !self.out[from].contains(&to) {
            self.out[from].push(to);
            self.out[from].sort_unstable();
        }
    }

    pub fn add_edge(&mut self, a: Vertex, b: Vertex) {
        self.add_arc(a, b);
        self.add_arc(b, a);
    }

    pub fn out_degree(&self, v: Vertex) -> usize {
        self.out[v].len()
    }

    pub fn in_degree(&self, v: Vertex) -> usize {
        self.out.iter().filter(|o| o.contains(&v)).count()
    }

    pub fn has_arc(&self, from: Vertex, to: Vertex) -> bool {
        self.out[from].binary_search(&to).is_ok()
    }

    /// The same vertices with every arc made bidirectional.
    pub fn undirected(&self) -> Graph {
        let mut g = Graph::new(self.names.clone());
        for (v, outs) in self.out.iter().enumerate() {
            for &w in outs {
                g.add_edge(v, w);
            }
        }
        g
    }

    pub fn vertex(&self, name: &str) -> Option<Vertex> {
        self.names.iter().position(|n| n == name)
    }
}

/// `rows x cols` grid with 4-neighborhood adjacency. Vertex `r * cols + c` is
/// named `r{r}c{c}`.
pub fn grid(rows: usize, cols: usize) -> Graph {
    let names = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| format!("r{r}c{c}")))
        .collect();
    let mut g = Graph::new(names);
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                g.add_edge(v, v + 1);
            }
            if r + 1 < rows {
                g.add_edge(v, v + cols);
            }
        }
    }
    g
}

/// The 14-vertex directed search-game graph.
///
/// `e` is the attacker entry, `x` an intermediate vertex, then three rows
/// `a_i -> b_i -> c_i -> d_i` (i = 1..3) where `d_1..d_3` are the targets.
/// Cross-links: `a1<->a2`, `a3<->a2`, `c1<->c2`, `c3<->c2`, and one-way
/// `b1->b2`, `b3->b2`.
pub fn seg_graph() -> Graph {
    let names: Vec<String> = ["e", "x"]
        .into_iter()
        .map(String::from)
        .chain(["a", "b", "c", "d"].into_iter().flat_map(|col| {
            (1..=3).map(move |row| format!("{col}{row}"))
        }))
        .collect();
    let mut g = Graph::new(names);
    let v = |g: &Graph, n: &str| g.vertex(n).expect("named vertex");
    let arcs: &[(&str, &str)] = &[
        ("e", "x"),
        ("e", "a1"),
        ("e", "a2"),
        ("e", "a3"),
        ("x", "a1"),
        ("x", "a2"),
        ("x", "a3"),
        ("b1", "b2"),
        ("b3", "b2"),
    ];
    for (a, b) in arcs {
        let (a, b) = (v(&g, a), v(&g, b));
        g.add_arc(a, b);
    }
    for row in 1..=3 {
        for (from, to) in [("a", "b"), ("b", "c"), ("c", "d")] {
            let (a, b) = (v(&g, &format!("{from}{row}")), v(&g, &format!("{to}{row}")));
            g.add_arc(a, b);
        }
    }
    for (a, b) in [("a1", "a2"), ("a3", "a2"), ("c1", "c2"), ("c3", "c2")] {
        let (a, b) = (v(&g, a), v(&g, b));
        g.add_edge(a, b);
    }
    g
}

pub const SEG_ENTRY: &str = "e";
pub const SEG_TARGETS: [&str; 3] = ["d1", "d2", "d3"];
/// Defender start on the search graph (center of the lattice).
pub const SEG_DEFENDER_START: &str = "b2";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seg_graph_shape() {
        let g = seg_graph();
        assert_eq!(g.len(), 14);
        assert_eq!(g.out_degree(g.vertex(SEG_ENTRY).unwrap()), 4);
        assert_eq!(SEG_TARGETS.len(), 3);
        for t in SEG_TARGETS {
            let t = g.vertex(t).unwrap();
            assert!(g.in_degree(t) >= 1);
            assert_eq!(g.out_degree(t), 0);
        }
        let arc = |a: &str, b: &str| g.has_arc(g.vertex(a).unwrap(), g.vertex(b).unwrap());
        assert!(arc("b1", "b2") && !arc("b2", "b1"));
        assert!(arc("c3", "c2") && arc("c2", "c3"));
        assert!(!arc("a1", "e"));
        let arcs: usize = g.out.iter().map(Vec::len).sum();
        // 4 + 3 from e and x, 9 along rows, 2 one-way and 4 two-way links.
        assert_eq!(arcs, 4 + 3 + 9 + 2 + 8);
    }

    #[test]
    fn grid_is_four_connected() {
        let g = grid(4, 4);
        assert_eq!(g.len(), 16);
        assert_eq!(g.out_degree(0), 2);
        assert_eq!(g.out_degree(5), 4);
        assert!(g.has_arc(5, 1) && g.has_arc(1, 5) && !g.has_arc(0, 5));
    }
}
