//! Ring perception via bridge finding.
//!
//! A bond is in a ring if and only if it is not a bridge of the bond graph;
//! an atom is in a ring if it is incident to at least one in-ring bond.
//! Bridges are found with an iterative low-link depth-first search so that
//! long chains cannot overflow the call stack.

use alloc::vec;
use alloc::vec::Vec;

use super::Molecule;

pub fn perceive_rings(m: &mut Molecule) {
    let n = m.atoms.len();
    let is_bridge = {
        let adj = &m.adjacency;
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut is_bridge = vec![false; m.bonds.len()];
        let mut timer = 0usize;
        // frame: (atom, bond taken to reach it or MAX, next adjacency slot)
        let mut stack: Vec<(usize, usize, usize)> = Vec::new();

        for start in 0..n {
            if disc[start] != usize::MAX {
                continue;
            }
            disc[start] = timer;
            low[start] = timer;
            timer += 1;
            stack.push((start, usize::MAX, 0));
            while let Some(frame) = stack.last_mut() {
                let (u, parent_bond) = (frame.0, frame.1);
                if frame.2 < adj[u].len() {
                    let (v, bi) = adj[u][frame.2];
                    frame.2 += 1;
                    if bi == parent_bond {
                        continue;
                    }
                    if disc[v] == usize::MAX {
                        disc[v] = timer;
                        low[v] = timer;
                        timer += 1;
                        stack.push((v, bi, 0));
                    } else if disc[v] < low[u] {
                        low[u] = disc[v];
                    }
                } else {
                    stack.pop();
                    if let Some(parent) = stack.last() {
                        let p = parent.0;
                        if low[u] < low[p] {
                            low[p] = low[u];
                        }
                        if low[u] > disc[p] {
                            is_bridge[parent_bond] = true;
                        }
                    }
                }
            }
        }
        is_bridge
    };

    for (bi, bond) in m.bonds.iter_mut().enumerate() {
        bond.in_ring = !is_bridge[bi];
    }
    for atom in &mut m.atoms {
        atom.in_ring = false;
    }
    for bi in 0..m.bonds.len() {
        if m.bonds[bi].in_ring {
            let (a, b) = (m.bonds[bi].a, m.bonds[bi].b);
            m.atoms[a].in_ring = true;
            m.atoms[b].in_ring = true;
        }
    }
}
