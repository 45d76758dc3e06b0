use crate::error::{invalid, Result};

use super::EdgeBeliefs;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub confidence: f64,
}

/// A directed acyclic graph over named variables.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalDag {
    names: Vec<String>,
    edges: Vec<Edge>,
}

impl CausalDag {
    pub fn new(names: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        let d = names.len();
        for (k, e) in edges.iter().enumerate() {
            if e.from >= d || e.to >= d {
                return invalid(format!("edge {k} references a missing vertex"));
            }
            if e.from == e.to {
                return invalid(format!("edge {k} is a self-loop"));
            }
            if !(0.0..=1.0).contains(&e.confidence) {
                return invalid(format!("edge {k} has confidence outside [0, 1]"));
            }
            let dup = edges[..k].iter().any(|o| {
                (o.from == e.from && o.to == e.to) || (o.from == e.to && o.to == e.from)
            });
            if dup {
                return invalid(format!("edge {k} duplicates an earlier edge between the same vertices"));
            }
        }
        if topological_order(d, &edges).is_none() {
            return invalid("edges contain a directed cycle");
        }
        Ok(Self { names, edges })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edges.iter().any(|e| e.from == from && e.to == to)
    }

    pub fn topological_order(&self) -> Option<Vec<usize>> {
        topological_order(self.names.len(), &self.edges)
    }
}

/// Kahn's algorithm; `None` if the edges contain a cycle.
pub(crate) fn topological_order(d: usize, edges: &[Edge]) -> Option<Vec<usize>> {
    let mut indegree = vec![0usize; d];
    for e in edges {
        indegree[e.to] += 1;
    }
    let mut ready: Vec<usize> = (0..d).rev().filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(d);
    while let Some(v) = ready.pop() {
        order.push(v);
        for e in edges.iter().filter(|e| e.from == v) {
            indegree[e.to] -= 1;
            if indegree[e.to] == 0 {
                ready.push(e.to);
            }
        }
    }
    (order.len() == d).then_some(order)
}

/// Picks the most probable edge type for every pair (ties mean no edge),
/// then deletes the least confident edge until no directed cycle remains.
pub fn infer_dag(beliefs: &EdgeBeliefs) -> CausalDag {
    let d = beliefs.len();
    let mut edges = Vec::new();
    for i in 0..d {
        for j in i + 1..d {
            let f = beliefs.forward[i][j];
            let o = beliefs.independent[i][j];
            let b = beliefs.backward[i][j];
            if f > o && f > b {
                edges.push(Edge { from: i, to: j, confidence: f });
            } else if b > o && b > f {
                edges.push(Edge { from: j, to: i, confidence: b });
            }
        }
    }
    while topological_order(d, &edges).is_none() {
        let weakest = (0..edges.len())
            .min_by(|&a, &b| edges[a].confidence.total_cmp(&edges[b].confidence))
            .expect("a cycle has edges");
        edges.remove(weakest);
    }
    CausalDag { names: beliefs.names.clone(), edges }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(d: usize) -> Vec<String> {
        (0..d).map(|i| format!("X{i}")).collect()
    }

    #[test]
    fn all_independent_gives_empty_graph() {
        let b = EdgeBeliefs::from_forward_independent(names(4), |_, _| 0.0, |_, _| 1.0).unwrap();
        assert!(infer_dag(&b).edges().is_empty());
    }

    #[test]
    fn three_cycle_prunes_weakest() {
        let fwd = |i: usize, j: usize| match (i, j) {
            (0, 1) => 0.9,
            (1, 2) => 0.8,
            (2, 0) => 0.7,
            (1, 0) => 0.05,
            (2, 1) => 0.1,
            (0, 2) => 0.15,
            _ => 0.0,
        };
        let b = EdgeBeliefs::from_forward_independent(names(3), fwd, |i, j| 1.0 - (fwd(i, j) + fwd(j, i))).unwrap();
        let dag = infer_dag(&b);
        assert_eq!(dag.edges().len(), 2);
        assert!(dag.has_edge(0, 1) && dag.has_edge(1, 2));
        assert!(!dag.has_edge(2, 0));
    }

    #[test]
    fn ties_mean_no_edge() {
        let b = EdgeBeliefs::from_forward_independent(names(3), |_, _| 0.4, |_, _| 0.2).unwrap();
        assert!(infer_dag(&b).edges().is_empty());
    }

    #[test]
    fn constructor_rejects_bad_graphs() {
        let e = |from, to| Edge { from, to, confidence: 0.5 };
        assert!(CausalDag::new(names(2), vec![e(0, 0)]).is_err());
        assert!(CausalDag::new(names(2), vec![e(0, 1), e(1, 0)]).is_err());
        assert!(CausalDag::new(names(3), vec![e(0, 1), e(1, 2), e(2, 0)]).is_err());
        assert!(CausalDag::new(names(2), vec![e(0, 5)]).is_err());
        let ok = CausalDag::new(names(3), vec![e(0, 1), e(1, 2)]).unwrap();
        assert_eq!(ok.topological_order(), Some(vec![0, 1, 2]));
    }
}
