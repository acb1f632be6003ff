//! Random link graph between two qubit registers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};
use rayon::prelude::*;

use super::EntangleError;

/// First-success attempt counts for every `(a, b)` pair, row-major in `a`.
/// Each pair draws from its own stream of the seeded generator, so the result
/// does not depend on evaluation order.
pub fn draw_waiting_times(
    n_a: usize,
    n_b: usize,
    p_success: f64,
    seed: u64,
) -> Result<Vec<u64>, EntangleError> {
    let geo = Geometric::new(p_success).map_err(|_| {
        EntangleError::InvalidParams(format!("success probability {p_success} outside (0, 1]"))
    })?;
    Ok((0..n_a * n_b)
        .into_par_iter()
        .map(|pair| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(pair as u64);
            geo.sample(&mut rng).saturating_add(1)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    A(usize),
    B(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub attempts: u64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkGraph {
    pub edges: Vec<Edge>,
    /// Connected components, largest first; ties ordered by smallest node.
    pub components: Vec<Vec<Node>>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.0[hi] = lo;
        }
    }
}

/// Keeps pairs whose first success came before attempt `max_attempts`.
/// `errors` is optional per-pair link error, row-major like `waits`.
pub fn build_link_graph(
    n_a: usize,
    n_b: usize,
    waits: &[u64],
    max_attempts: u64,
    errors: Option<&[f64]>,
) -> Result<LinkGraph, EntangleError> {
    if waits.len() != n_a * n_b || errors.is_some_and(|e| e.len() != waits.len()) {
        return Err(EntangleError::InvalidParams(format!(
            "expected {} pair entries for a {n_a}×{n_b} register pair",
            n_a * n_b
        )));
    }
    if max_attempts == 0 {
        return Err(EntangleError::InvalidParams("M must be at least 1".into()));
    }
    let edges: Vec<Edge> = waits
        .iter()
        .enumerate()
        .filter(|(_, m)| **m < max_attempts)
        .map(|(i, &m)| Edge {
            a: i / n_b,
            b: i % n_b,
            attempts: m,
            error: errors.map_or(f64::NAN, |e| e[i]),
        })
        .collect();
    let mut uf = UnionFind((0..n_a + n_b).collect());
    for e in &edges {
        uf.union(e.a, n_a + e.b);
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<Node>> = Default::default();
    for x in 0..n_a + n_b {
        let node = if x < n_a {
            Node::A(x)
        } else {
            Node::B(x - n_a)
        };
        groups.entry(uf.find(x)).or_default().push(node);
    }
    let mut components: Vec<Vec<Node>> = groups.into_values().collect();
    components.sort_by(|x, y| y.len().cmp(&x.len()).then(x[0].cmp(&y[0])));
    Ok(LinkGraph { edges, components })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn attempt_limit_extremes() {
        let waits = draw_waiting_times(4, 3, 0.3, 7).unwrap();
        assert!(waits.iter().all(|m| *m >= 1));
        let empty = build_link_graph(4, 3, &waits, 1, None).unwrap();
        assert!(empty.edges.is_empty());
        assert_eq!(empty.components.len(), 7);
        let full = build_link_graph(4, 3, &waits, u64::MAX, None).unwrap();
        assert_eq!(full.edges.len(), 12);
        assert_eq!(full.components.len(), 1);
    }

    #[test]
    fn draws_are_order_independent() {
        let a = draw_waiting_times(5, 5, 0.01, 42).unwrap();
        let b = draw_waiting_times(5, 5, 0.01, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, draw_waiting_times(5, 5, 0.01, 43).unwrap());
    }
}
