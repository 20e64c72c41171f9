//! SMILES serialization.
//!
//! Molecules that came from `parse_smiles` serialize back to their source
//! string verbatim. Programmatically built molecules are written by a
//! depth-first traversal: spanning-tree bonds inline, the remaining bonds as
//! ring closures with sequentially allocated numbers (`%nn` past 9).

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{Atom, BondOrder, Chirality, Molecule};
use crate::elements;

pub fn write_smiles(m: &Molecule) -> String {
    if !m.source.is_empty() {
        return m.source.clone();
    }
    write_built(m).0
}

/// Serializes ignoring `source`. Also returns the emission order: element
/// `k` is the original index of the `k`-th atom in the output, which makes
/// isomorphism checks on re-parse a straight permutation comparison.
pub fn write_built(m: &Molecule) -> (String, Vec<usize>) {
    let n = m.atoms.len();
    let mut visited = vec![false; n];
    let mut tree_children: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    let mut parent_bond: Vec<Option<usize>> = vec![None; n];
    let mut ring_opens: Vec<Vec<(u16, usize)>> = vec![Vec::new(); n];
    let mut ring_closes: Vec<Vec<(u16, usize)>> = vec![Vec::new(); n];
    let mut bond_used = vec![false; m.bonds.len()];
    let mut next_ring: u16 = 1;
    let mut roots = Vec::new();

    // Pass 1: spanning forest and ring-closure assignment, in preorder.
    for start in 0..n {
        if visited[start] {
            continue;
        }
        roots.push(start);
        visited[start] = true;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            let mut children = Vec::new();
            for &(v, bi) in m.neighbors(u) {
                if bond_used[bi] {
                    continue;
                }
                if visited[v] {
                    // back edge: opens at the earlier-emitted atom v
                    bond_used[bi] = true;
                    assert!(next_ring < 100, "more than 99 ring closures");
                    ring_opens[v].push((next_ring, bi));
                    ring_closes[u].push((next_ring, bi));
                    next_ring += 1;
                } else {
                    bond_used[bi] = true;
                    visited[v] = true;
                    parent_bond[v] = Some(bi);
                    children.push((v, bi));
                }
            }
            for &(v, _) in children.iter().rev() {
                stack.push(v);
            }
            tree_children[u] = children;
        }
    }

    // Pass 2: emission.
    enum Work {
        Atom(usize),
        Text(&'static str),
    }
    let mut out = String::new();
    let mut order = Vec::with_capacity(n);
    let mut work: Vec<Work> = Vec::new();
    for (ri, &root) in roots.iter().enumerate().rev() {
        if ri > 0 {
            work.push(Work::Text("."));
        }
        work.push(Work::Atom(root));
        // items must pop in "." then atom order per component
        let len = work.len();
        if ri > 0 {
            work.swap(len - 1, len - 2);
        }
    }
    while let Some(item) = work.pop() {
        match item {
            Work::Text(t) => out.push_str(t),
            Work::Atom(u) => {
                if let Some(bi) = parent_bond[u] {
                    out.push_str(bond_symbol(m, bi));
                }
                push_atom_symbol(&mut out, &m.atoms[u]);
                order.push(u);
                for &(num, bi) in ring_opens[u].iter().chain(&ring_closes[u]) {
                    out.push_str(bond_symbol(m, bi));
                    if num > 9 {
                        out.push_str(&format!("%{num:02}"));
                    } else {
                        out.push_str(&format!("{num}"));
                    }
                }
                let children = &tree_children[u];
                for (j, &(v, _)) in children.iter().enumerate().rev() {
                    if j + 1 == children.len() {
                        work.push(Work::Atom(v));
                    } else {
                        work.push(Work::Text(")"));
                        work.push(Work::Atom(v));
                        work.push(Work::Text("("));
                    }
                }
            }
        }
    }
    (out, order)
}

/// Bond symbol required for re-parsing to recover the same order. A single
/// bond between two aromatic atoms must be written explicitly, otherwise it
/// would re-parse as aromatic.
fn bond_symbol(m: &Molecule, bi: usize) -> &'static str {
    let bond = &m.bonds[bi];
    let both_aromatic = m.atoms[bond.a].aromatic && m.atoms[bond.b].aromatic;
    match bond.order {
        BondOrder::Double => "=",
        BondOrder::Triple => "#",
        BondOrder::Aromatic => {
            debug_assert!(both_aromatic, "aromatic bond between non-aromatic atoms");
            ""
        }
        BondOrder::Single => {
            if both_aromatic {
                "-"
            } else {
                ""
            }
        }
    }
}

fn push_atom_symbol(out: &mut String, atom: &Atom) {
    let bare_ok = !atom.is_bracket()
        && atom.formal_charge == 0
        && atom.isotope.is_none()
        && atom.chirality == Chirality::None
        && elements::in_organic_subset(&atom.element);
    if bare_ok {
        push_cased(out, &atom.element, atom.aromatic);
        return;
    }
    out.push('[');
    if let Some(iso) = atom.isotope {
        out.push_str(&format!("{iso}"));
    }
    push_cased(out, &atom.element, atom.aromatic);
    out.push_str(atom.chirality.suffix());
    match atom.total_h() {
        0 => {}
        1 => out.push('H'),
        h => out.push_str(&format!("H{h}")),
    }
    match atom.formal_charge {
        0 => {}
        1 => out.push('+'),
        -1 => out.push('-'),
        c if c > 0 => out.push_str(&format!("+{c}")),
        c => out.push_str(&format!("-{}", -c)),
    }
    out.push(']');
}

fn push_cased(out: &mut String, element: &str, aromatic: bool) {
    if aromatic {
        for ch in element.chars() {
            out.push(ch.to_ascii_lowercase());
        }
    } else {
        out.push_str(element);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mol::{parse_smiles, MolBuilder};

    #[test]
    fn parsed_molecules_serialize_to_their_source() {
        for s in ["C(=C)C1=CC=CC=C1", "c1ccccc1", "[NH4+]", "C/C=C\\C"] {
            let m = parse_smiles(s).unwrap();
            assert_eq!(write_smiles(&m), s);
        }
    }

    #[test]
    fn built_chain_round_trips_to_an_isomorphic_graph() {
        let mut b = MolBuilder::new();
        let c0 = b.atom("C", false);
        let c1 = b.atom("C", false);
        let o = b.atom("O", false);
        b.bond(c0, c1, BondOrder::Single).unwrap();
        b.bond(c1, o, BondOrder::Single).unwrap();
        let m = b.finish().unwrap();
        let (s, order) = write_built(&m);
        let re = parse_smiles(&s).unwrap();
        assert_eq!(re.atoms.len(), 3);
        for (k, &orig) in order.iter().enumerate() {
            assert_eq!(re.atoms[k].element, m.atoms[orig].element);
            assert_eq!(re.atoms[k].total_h(), m.atoms[orig].total_h());
        }
    }

    #[test]
    fn built_pyrrole_needs_its_bracket_hydrogen() {
        let mut b = MolBuilder::new();
        let n = b.bracket_atom("N", true, 0, 1, Chirality::None, None);
        let c: Vec<usize> = (0..4).map(|_| b.atom("C", true)).collect();
        b.bond(n, c[0], BondOrder::Aromatic).unwrap();
        b.bond(c[0], c[1], BondOrder::Aromatic).unwrap();
        b.bond(c[1], c[2], BondOrder::Aromatic).unwrap();
        b.bond(c[2], c[3], BondOrder::Aromatic).unwrap();
        b.bond(c[3], n, BondOrder::Aromatic).unwrap();
        let m = b.finish().unwrap();
        let s = write_smiles(&m);
        let re = parse_smiles(&s).unwrap();
        assert_eq!(re.atoms[0].total_h(), 1);
        assert!(re.atoms.iter().all(|a| a.in_ring));
    }
}
