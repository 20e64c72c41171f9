//! Molecular graphs parsed from SMILES.
//!
//! A [`Molecule`] is an attributed undirected graph: atoms in source order,
//! bonds with orders, ring membership from bridge analysis, and implicit
//! hydrogens resolved against the default-valence table. Aromaticity is
//! taken from lowercase notation as written; no perception or kekulization
//! is performed.

mod parse;
mod rings;
mod valence;
mod write;

pub use parse::parse_smiles;
pub use rings::perceive_rings;
pub use valence::compute_implicit_hydrogens;
pub use write::{write_built, write_smiles};

use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use thiserror::Error;

/// Tetrahedral chirality mark on a bracket atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Chirality {
    #[default]
    None,
    /// `@`
    AntiClockwise,
    /// `@@`
    Clockwise,
}

impl Chirality {
    pub fn suffix(self) -> &'static str {
        match self {
            Chirality::None => "",
            Chirality::AntiClockwise => "@",
            Chirality::Clockwise => "@@",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Contribution to an atom's bond-order sum. Aromatic bonds count 1;
    /// the extra slot consumed by an aromatic system is handled separately
    /// by the valence model.
    pub fn valence_units(self) -> u8 {
        match self {
            BondOrder::Single | BondOrder::Aromatic => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    /// Ordinal position in SMILES left-to-right atom order.
    pub index: usize,
    /// Element symbol in canonical case, e.g. "C", "Cl", "Se".
    pub element: String,
    /// Written lowercase in the source.
    pub aromatic: bool,
    pub formal_charge: i32,
    pub isotope: Option<u16>,
    pub chirality: Chirality,
    /// Bracket-atom hydrogen count. `Some` if and only if the atom was
    /// written in brackets (brackets without an H spec mean zero).
    pub explicit_h: Option<u8>,
    /// Computed from the valence model; always 0 for bracket atoms.
    pub implicit_h: u8,
    /// Lies on at least one simple cycle (set by ring perception).
    pub in_ring: bool,
}

impl Atom {
    /// Total hydrogen count, explicit plus implicit.
    pub fn total_h(&self) -> u8 {
        self.explicit_h.unwrap_or(0) + self.implicit_h
    }

    pub fn is_bracket(&self) -> bool {
        self.explicit_h.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
    /// Not a bridge of the bond graph (set by ring perception).
    pub in_ring: bool,
}

/// Attributed molecular graph. Immutable after construction and safe to
/// share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Molecule {
    pub atoms: Vec<Atom>,
    pub bonds: Vec<Bond>,
    /// Originating SMILES; empty for programmatically built molecules.
    pub source: String,
    /// Byte range of each atom's symbol in `source`, per atom. For bracket
    /// atoms the span covers the whole `[...]` expression.
    pub token_spans: Vec<Range<usize>>,
    /// adjacency[i] = (neighbor atom, bond index) pairs in bond-insertion order.
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl Molecule {
    pub(crate) fn new(
        atoms: Vec<Atom>,
        bonds: Vec<Bond>,
        source: String,
        token_spans: Vec<Range<usize>>,
    ) -> Self {
        let mut adjacency = alloc::vec![Vec::new(); atoms.len()];
        for (bi, bond) in bonds.iter().enumerate() {
            adjacency[bond.a].push((bond.b, bi));
            adjacency[bond.b].push((bond.a, bi));
        }
        Molecule {
            atoms,
            bonds,
            source,
            token_spans,
            adjacency,
        }
    }

    /// `(neighbor atom index, bond index)` pairs of atom `i`.
    pub fn neighbors(&self, i: usize) -> &[(usize, usize)] {
        &self.adjacency[i]
    }

    /// Sum of bond-order valence units at atom `i`.
    pub fn bond_order_sum(&self, i: usize) -> u8 {
        self.adjacency[i]
            .iter()
            .map(|&(_, bi)| self.bonds[bi].order.valence_units())
            .sum()
    }

    /// Number of aromatic bonds incident to atom `i`.
    pub fn aromatic_bond_count(&self, i: usize) -> usize {
        self.adjacency[i]
            .iter()
            .filter(|&&(_, bi)| self.bonds[bi].order == BondOrder::Aromatic)
            .count()
    }
}

/// Errors from SMILES parsing and molecule construction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MolError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("ring closure {digit} opened at byte {pos} is never closed")]
    RingClosure { digit: u16, pos: usize },
    #[error(
        "valence error on atom {atom} ({element}): bond order sum {bond_sum} \
         exceeds maximum allowed valence {max}"
    )]
    Valence {
        atom: usize,
        element: String,
        bond_sum: u8,
        max: u8,
    },
}

impl MolError {
    pub(crate) fn syntax(pos: usize, msg: impl Into<String>) -> Self {
        MolError::Syntax {
            pos,
            msg: msg.into(),
        }
    }
}

/// Incremental construction of molecules that did not come from a SMILES
/// string. `finish` resolves implicit hydrogens and ring membership.
#[derive(Debug, Default)]
pub struct MolBuilder {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
}

impl MolBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an atom relying on implicit-hydrogen resolution. Returns its index.
    pub fn atom(&mut self, element: &str, aromatic: bool) -> usize {
        self.push_atom(element, aromatic, 0, None, Chirality::None, None)
    }

    /// Adds a fully specified (bracket-style) atom. `explicit_h = Some(n)`
    /// pins the hydrogen count as a bracket atom would.
    pub fn bracket_atom(
        &mut self,
        element: &str,
        aromatic: bool,
        charge: i32,
        explicit_h: u8,
        chirality: Chirality,
        isotope: Option<u16>,
    ) -> usize {
        self.push_atom(
            element,
            aromatic,
            charge,
            Some(explicit_h),
            chirality,
            isotope,
        )
    }

    fn push_atom(
        &mut self,
        element: &str,
        aromatic: bool,
        charge: i32,
        explicit_h: Option<u8>,
        chirality: Chirality,
        isotope: Option<u16>,
    ) -> usize {
        let index = self.atoms.len();
        self.atoms.push(Atom {
            index,
            element: String::from(element),
            aromatic,
            formal_charge: charge,
            isotope,
            chirality,
            explicit_h,
            implicit_h: 0,
            in_ring: false,
        });
        index
    }

    pub fn bond(&mut self, a: usize, b: usize, order: BondOrder) -> Result<(), MolError> {
        if a == b {
            return Err(MolError::syntax(0, "self-bond is not allowed"));
        }
        if a >= self.atoms.len() || b >= self.atoms.len() {
            return Err(MolError::syntax(0, "bond references an unknown atom"));
        }
        if self
            .bonds
            .iter()
            .any(|bd| (bd.a == a && bd.b == b) || (bd.a == b && bd.b == a))
        {
            return Err(MolError::syntax(0, "duplicate bond between atoms"));
        }
        if order == BondOrder::Aromatic
            && !(self.atoms[a].aromatic && self.atoms[b].aromatic)
        {
            return Err(MolError::syntax(
                0,
                "aromatic bond requires two aromatic atoms",
            ));
        }
        self.bonds.push(Bond {
            a,
            b,
            order,
            in_ring: false,
        });
        Ok(())
    }

    pub fn finish(self) -> Result<Molecule, MolError> {
        let spans = alloc::vec![0..0; self.atoms.len()];
        let mut m = Molecule::new(self.atoms, self.bonds, String::new(), spans);
        valence::compute_implicit_hydrogens(&mut m)?;
        rings::perceive_rings(&mut m);
        Ok(m)
    }
}
