//! Independent oracles and generators shared by the system-level tests.

#![allow(dead_code)]

pub mod dims;
pub mod layering;
pub mod sources;
pub mod typing;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All topological orders of a DAG on `n` vertices, in lexicographic order.
pub fn topological_orders(n: usize, arcs: &[(usize, usize)]) -> Vec<Vec<usize>> {
    fn go(
        n: usize,
        arcs: &[(usize, usize)],
        indeg: &mut Vec<usize>,
        placed: &mut Vec<bool>,
        prefix: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for v in 0..n {
            if placed[v] || indeg[v] != 0 {
                continue;
            }
            placed[v] = true;
            prefix.push(v);
            for &(s, t) in arcs {
                if s == v {
                    indeg[t] -= 1;
                }
            }
            go(n, arcs, indeg, placed, prefix, out);
            for &(s, t) in arcs {
                if s == v {
                    indeg[t] += 1;
                }
            }
            prefix.pop();
            placed[v] = false;
        }
    }
    let mut indeg = vec![0; n];
    for &(_, t) in arcs {
        indeg[t] += 1;
    }
    let mut out = Vec::new();
    go(n, arcs, &mut indeg, &mut vec![false; n], &mut Vec::new(), &mut out);
    out
}
