//! Graph algorithms over explicit adjacency lists: strongly connected
//! components (iterative Tarjan), bottom SCCs, reachability and maximal
//! end components of MDP-shaped graphs.

use crate::game::{GameGraph, PlayerClass, VertexId, VertexSet};

/// Strongly connected components of `adj`, restricted to vertices where
/// `keep` is true. Components come out in reverse topological order:
/// every edge leaving a component points into an earlier one.
pub fn tarjan_scc(adj: &[Vec<usize>], keep: impl Fn(usize) -> bool) -> Vec<Vec<usize>> {
    const UNVISITED: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0usize;
    // (vertex, position in its adjacency list)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED || !keep(root) {
            continue;
        }
        call.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(top) = call.last_mut() {
            let v = top.0;
            if top.1 < adj[v].len() {
                let w = adj[v][top.1];
                top.1 += 1;
                if !keep(w) {
                    continue;
                }
                if index[w] == UNVISITED {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

/// Component index of every vertex (or `usize::MAX` when filtered out).
pub fn component_map(n: usize, comps: &[Vec<usize>]) -> Vec<usize> {
    let mut of = vec![usize::MAX; n];
    for (i, c) in comps.iter().enumerate() {
        for &v in c {
            of[v] = i;
        }
    }
    of
}

/// Bottom SCCs: components with no edge leaving them.
pub fn bottom_sccs(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let comps = tarjan_scc(adj, |_| true);
    let of = component_map(adj.len(), &comps);
    comps
        .into_iter()
        .enumerate()
        .filter(|(i, c)| c.iter().all(|&v| adj[v].iter().all(|&w| of[w] == *i)))
        .map(|(_, c)| c)
        .collect()
}

/// Vertices from which some vertex of `targets` is reachable.
pub fn backward_reachable(adj: &[Vec<usize>], targets: impl IntoIterator<Item = usize>) -> Vec<bool> {
    let n = adj.len();
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, row) in adj.iter().enumerate() {
        for &w in row {
            rev[w].push(v);
        }
    }
    let mut seen = vec![false; n];
    let mut queue: Vec<usize> = Vec::new();
    for t in targets {
        if !seen[t] {
            seen[t] = true;
            queue.push(t);
        }
    }
    while let Some(w) = queue.pop() {
        for &v in &rev[w] {
            if !seen[v] {
                seen[v] = true;
                queue.push(v);
            }
        }
    }
    seen
}

/// Maximal end components of `game` inside `within`, treating only
/// vertices of class `choice` as controllable; every other vertex must
/// keep all of its successors inside a component. A single vertex forms
/// a component only if it can loop on itself.
///
/// Components are returned sorted by their smallest vertex.
pub fn maximal_end_components(
    game: &GameGraph,
    within: &VertexSet,
    choice: PlayerClass,
) -> Vec<Vec<VertexId>> {
    let n = game.num_vertices();
    let mut alive: Vec<bool> = (0..n).map(|i| within.contains(VertexId(i))).collect();
    // Working successor lists: choice vertices lose individual edges,
    // other vertices are dropped whole.
    let mut adj: Vec<Vec<usize>> = game
        .vertices()
        .map(|v| game.post(v).map(|w| w.0).collect())
        .collect();

    loop {
        let comps = tarjan_scc(&adj, |v| alive[v]);
        let of = component_map(n, &comps);
        let mut changed = false;
        for v in 0..n {
            if !alive[v] {
                continue;
            }
            let c = of[v];
            if game.class(VertexId(v)) == choice {
                let before = adj[v].len();
                adj[v].retain(|&w| alive[w] && of[w] == c);
                changed |= adj[v].len() != before;
                if adj[v].is_empty() {
                    alive[v] = false;
                    changed = true;
                }
            } else if adj[v].iter().any(|&w| !alive[w] || of[w] != c) {
                alive[v] = false;
                changed = true;
            }
        }
        if !changed {
            let mut out: Vec<Vec<VertexId>> = comps
                .into_iter()
                .filter(|c| {
                    c.len() > 1 || adj[c[0]].contains(&c[0])
                })
                .filter(|c| c.iter().all(|&v| alive[v]))
                .map(|c| c.into_iter().map(VertexId).collect())
                .collect();
            out.sort();
            return out;
        }
    }
}
