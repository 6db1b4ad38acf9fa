//! Small directed-graph helpers over index-addressed nodes. Edge lists are
//! in declaration order and every routine here is deterministic with
//! respect to that order.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

/// A directed edge `(source, target)` between node indices.
pub type Arc = (usize, usize);

fn adjacency(n: usize, arcs: &[Arc], removed: &BTreeSet<usize>) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); n];
    for (i, &(s, t)) in arcs.iter().enumerate() {
        if !removed.contains(&i) {
            adj[s].push((t, i));
        }
    }
    adj
}

/// Finds one cycle as a list of arc indices, exploring nodes and arcs in
/// declaration order.
fn find_cycle(n: usize, arcs: &[Arc], removed: &BTreeSet<usize>) -> Option<Vec<usize>> {
    let adj = adjacency(n, arcs, removed);
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; n];
    for root in 0..n {
        if state[root] != 0 {
            continue;
        }
        // (node, next arc position, arc used to enter)
        let mut stack: Vec<(usize, usize, Option<usize>)> = vec![(root, 0, None)];
        state[root] = 1;
        while let Some(&mut (v, ref mut pos, _)) = stack.last_mut() {
            if *pos < adj[v].len() {
                let (w, arc) = adj[v][*pos];
                *pos += 1;
                match state[w] {
                    0 => {
                        state[w] = 1;
                        stack.push((w, 0, Some(arc)));
                    }
                    1 => {
                        let mut cycle = vec![arc];
                        for &(u, _, entered) in stack.iter().rev() {
                            if u == w {
                                break;
                            }
                            cycle.push(entered.expect("non-root frames have an entry arc"));
                        }
                        return Some(cycle);
                    }
                    _ => {}
                }
            } else {
                state[v] = 2;
                stack.pop();
            }
        }
    }
    None
}

/// Greedy feedback arc set: while a cycle remains, drop the arc on it
/// that was declared last. Removing the returned arcs leaves a DAG.
pub fn feedback_arcs(n: usize, arcs: &[Arc]) -> BTreeSet<usize> {
    let mut removed = BTreeSet::new();
    while let Some(cycle) = find_cycle(n, arcs, &removed) {
        let latest = *cycle.iter().max().expect("cycles are non-empty");
        removed.insert(latest);
    }
    removed
}

/// Kahn's algorithm, always releasing the lowest-index ready node. Arcs
/// listed in `skip` are ignored. Nodes on residual cycles are appended in
/// index order.
pub fn topo_order(n: usize, arcs: &[Arc], skip: &BTreeSet<usize>) -> Vec<usize> {
    let adj = adjacency(n, arcs, skip);
    let mut indeg = vec![0usize; n];
    for list in &adj {
        for &(t, _) in list {
            indeg[t] += 1;
        }
    }
    let mut ready: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&v| indeg[v] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    while let Some(Reverse(v)) = ready.pop() {
        order.push(v);
        placed[v] = true;
        for &(t, _) in &adj[v] {
            indeg[t] -= 1;
            if indeg[t] == 0 {
                ready.push(Reverse(t));
            }
        }
    }
    order.extend((0..n).filter(|&v| !placed[v]));
    order
}

/// Longest-path layering: sources sit on layer 0, every other node one
/// layer past its deepest predecessor. `arcs` must be acyclic once `skip`
/// is removed.
pub fn longest_path_layers(n: usize, arcs: &[Arc], skip: &BTreeSet<usize>) -> Vec<u32> {
    let order = topo_order(n, arcs, skip);
    let adj = adjacency(n, arcs, skip);
    let mut layer = vec![0u32; n];
    for v in order {
        for &(t, _) in &adj[v] {
            layer[t] = layer[t].max(layer[v] + 1);
        }
    }
    layer
}

/// Weakly connected components, each listed in index order; components
/// are ordered by their smallest member.
pub fn weak_components(n: usize, arcs: &[Arc]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(s, t) in arcs {
        let (a, b) = (find(&mut parent, s), find(&mut parent, t));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut comps: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; n];
    for v in 0..n {
        let r = find(&mut parent, v);
        if root_slot[r] == usize::MAX {
            root_slot[r] = comps.len();
            comps.push(Vec::new());
        }
        comps[root_slot[r]].push(v);
    }
    comps
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_cycle_drops_latest_arc() {
        let arcs = [(0, 1), (1, 2), (2, 0)];
        assert_eq!(feedback_arcs(3, &arcs), BTreeSet::from([2]));
    }

    #[test]
    fn dag_has_no_feedback() {
        let arcs = [(0, 1), (0, 2), (1, 3), (2, 3)];
        assert!(feedback_arcs(4, &arcs).is_empty());
        assert_eq!(longest_path_layers(4, &arcs, &BTreeSet::new()), vec![0, 1, 1, 2]);
    }

    #[test]
    fn self_loop_is_feedback() {
        assert_eq!(feedback_arcs(1, &[(0, 0)]), BTreeSet::from([0]));
    }

    #[test]
    fn topo_prefers_low_indices() {
        let arcs = [(2, 0)];
        assert_eq!(topo_order(3, &arcs, &BTreeSet::new()), vec![1, 2, 0]);
    }

    #[test]
    fn components() {
        let comps = weak_components(5, &[(0, 2), (3, 1)]);
        assert_eq!(comps, vec![vec![0, 2], vec![1, 3], vec![4]]);
    }
}
