//! SMILES parser: byte-level scanner producing a [`Molecule`].
//!
//! Supports the organic subset, bracket atoms (isotope, chirality `@`/`@@`,
//! H count, charge), bond symbols `- = # / \`, branches, ring closures
//! (digits and `%nn`), and dot-separated components. Out-of-distribution
//! features (wildcard `*`, reaction `>`, quadruple bonds, explicit aromatic
//! bond `:`, atom classes, extended chirality) are rejected with a syntax
//! error rather than silently handled.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use super::{rings, valence, Atom, Bond, BondOrder, Chirality, MolError, Molecule};
use crate::elements;

/// Bond symbol seen but not yet attached to its second atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PendingBond {
    Single,
    Double,
    Triple,
    /// `/` — parsed as a single bond; the direction mark survives only in
    /// the source text.
    Up,
    /// `\`
    Down,
}

impl PendingBond {
    fn order(self) -> BondOrder {
        match self {
            PendingBond::Single | PendingBond::Up | PendingBond::Down => BondOrder::Single,
            PendingBond::Double => BondOrder::Double,
            PendingBond::Triple => BondOrder::Triple,
        }
    }
}

struct RingOpen {
    atom: usize,
    bond: Option<PendingBond>,
    pos: usize,
}

struct Parser<'a> {
    bytes: &'a [u8],
    i: usize,
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    spans: Vec<Range<usize>>,
    prev: Option<usize>,
    branch_stack: Vec<(Option<usize>, usize)>,
    pending: Option<(PendingBond, usize)>,
    rings: BTreeMap<u16, RingOpen>,
    /// Set after `.`; an atom must follow before the end of input.
    dot_pos: Option<usize>,
}

/// Parses a SMILES string into a molecular graph with implicit hydrogens and
/// ring membership resolved. Atom order equals left-to-right atom order in
/// the input.
pub fn parse_smiles(s: &str) -> Result<Molecule, MolError> {
    let bytes = s.as_bytes();
    if bytes.is_empty() {
        return Err(MolError::syntax(0, "empty input"));
    }
    if let Some(pos) = bytes.iter().position(|b| !b.is_ascii()) {
        return Err(MolError::syntax(pos, "non-ASCII byte in input"));
    }
    let mut p = Parser {
        bytes,
        i: 0,
        atoms: Vec::new(),
        bonds: Vec::new(),
        spans: Vec::new(),
        prev: None,
        branch_stack: Vec::new(),
        pending: None,
        rings: BTreeMap::new(),
        dot_pos: None,
    };
    p.run()?;
    let mut m = Molecule::new(p.atoms, p.bonds, String::from(s), p.spans);
    valence::compute_implicit_hydrogens(&mut m)?;
    rings::perceive_rings(&mut m);
    Ok(m)
}

impl<'a> Parser<'a> {
    fn run(&mut self) -> Result<(), MolError> {
        while self.i < self.bytes.len() {
            let pos = self.i;
            match self.bytes[pos] {
                b'[' => {
                    let atom = self.parse_bracket_atom()?;
                    self.add_atom(atom, pos..self.i)?;
                }
                b'%' | b'0'..=b'9' => self.ring_closure()?,
                b'(' => {
                    if let Some((_, bpos)) = self.pending {
                        return Err(MolError::syntax(
                            bpos,
                            "bond symbol cannot precede a branch opening",
                        ));
                    }
                    let Some(prev) = self.prev else {
                        return Err(MolError::syntax(pos, "branch opened before any atom"));
                    };
                    self.branch_stack.push((Some(prev), pos));
                    self.i += 1;
                }
                b')' => {
                    if let Some((_, bpos)) = self.pending {
                        return Err(MolError::syntax(bpos, "dangling bond symbol"));
                    }
                    let Some((restored, _)) = self.branch_stack.pop() else {
                        return Err(MolError::syntax(pos, "unmatched closing parenthesis"));
                    };
                    self.prev = restored;
                    self.i += 1;
                }
                b'-' => self.set_pending(PendingBond::Single)?,
                b'=' => self.set_pending(PendingBond::Double)?,
                b'#' => self.set_pending(PendingBond::Triple)?,
                b'/' => self.set_pending(PendingBond::Up)?,
                b'\\' => self.set_pending(PendingBond::Down)?,
                b'.' => {
                    if let Some((_, bpos)) = self.pending {
                        return Err(MolError::syntax(bpos, "bond symbol cannot precede '.'"));
                    }
                    if self.atoms.is_empty() {
                        return Err(MolError::syntax(pos, "'.' before any atom"));
                    }
                    self.prev = None;
                    self.dot_pos = Some(pos);
                    self.i += 1;
                }
                b':' => {
                    return Err(MolError::syntax(
                        pos,
                        "explicit aromatic bond ':' is not supported",
                    ));
                }
                b'*' => return Err(MolError::syntax(pos, "wildcard atom '*' is not supported")),
                b'>' => {
                    return Err(MolError::syntax(pos, "reaction symbol '>' is not supported"))
                }
                b'$' => {
                    return Err(MolError::syntax(pos, "quadruple bond '$' is not supported"))
                }
                _ => {
                    if let Some(atom) = self.parse_organic_atom() {
                        let end = self.i;
                        self.add_atom(atom, pos..end)?;
                    } else {
                        return Err(MolError::syntax(
                            pos,
                            format!("unexpected character '{}'", self.bytes[pos] as char),
                        ));
                    }
                }
            }
        }
        if let Some((_, bpos)) = self.pending {
            return Err(MolError::syntax(bpos, "dangling bond symbol at end of input"));
        }
        if let Some((_, bpos)) = self.branch_stack.first() {
            return Err(MolError::syntax(*bpos, "unclosed branch"));
        }
        if let Some((&digit, open)) = self.rings.iter().next() {
            return Err(MolError::RingClosure {
                digit,
                pos: open.pos,
            });
        }
        if let Some(pos) = self.dot_pos {
            if self.prev.is_none() {
                return Err(MolError::syntax(pos, "expected an atom after '.'"));
            }
        }
        if self.atoms.is_empty() {
            return Err(MolError::syntax(0, "no atoms in input"));
        }
        Ok(())
    }

    fn set_pending(&mut self, bond: PendingBond) -> Result<(), MolError> {
        let pos = self.i;
        if self.pending.is_some() {
            return Err(MolError::syntax(pos, "two bond symbols in a row"));
        }
        if self.prev.is_none() {
            return Err(MolError::syntax(pos, "bond symbol before any atom"));
        }
        self.pending = Some((bond, pos));
        self.i += 1;
        Ok(())
    }

    /// Parses a bare organic-subset atom at the cursor, advancing past it.
    /// Returns `None` (cursor untouched) if the bytes match no such atom.
    fn parse_organic_atom(&mut self) -> Option<Atom> {
        let rest = &self.bytes[self.i..];
        let (symbol, aromatic, len) = match rest {
            [b'C', b'l', ..] => ("Cl", false, 2),
            [b'B', b'r', ..] => ("Br", false, 2),
            [b'B', ..] => ("B", false, 1),
            [b'C', ..] => ("C", false, 1),
            [b'N', ..] => ("N", false, 1),
            [b'O', ..] => ("O", false, 1),
            [b'P', ..] => ("P", false, 1),
            [b'S', ..] => ("S", false, 1),
            [b'F', ..] => ("F", false, 1),
            [b'I', ..] => ("I", false, 1),
            [b'b', ..] => ("B", true, 1),
            [b'c', ..] => ("C", true, 1),
            [b'n', ..] => ("N", true, 1),
            [b'o', ..] => ("O", true, 1),
            [b'p', ..] => ("P", true, 1),
            [b's', ..] => ("S", true, 1),
            _ => return None,
        };
        self.i += len;
        Some(Atom {
            index: 0,
            element: String::from(symbol),
            aromatic,
            formal_charge: 0,
            isotope: None,
            chirality: Chirality::None,
            explicit_h: None,
            implicit_h: 0,
            in_ring: false,
        })
    }

    fn parse_bracket_atom(&mut self) -> Result<Atom, MolError> {
        let start = self.i;
        self.i += 1; // consume '['

        let isotope = self.read_number(3).map(|v| v as u16);

        let (element, aromatic) = self.parse_bracket_symbol(start)?;

        let mut chirality = Chirality::None;
        if self.peek() == Some(b'@') {
            self.i += 1;
            if self.peek() == Some(b'@') {
                self.i += 1;
                chirality = Chirality::Clockwise;
            } else {
                chirality = Chirality::AntiClockwise;
            }
        }

        let mut explicit_h = 0u8;
        if self.peek() == Some(b'H') {
            self.i += 1;
            explicit_h = self.read_number(2).unwrap_or(1) as u8;
        }

        let mut charge = 0i32;
        match self.peek() {
            Some(sign @ (b'+' | b'-')) => {
                self.i += 1;
                let unit: i32 = if sign == b'+' { 1 } else { -1 };
                if let Some(n) = self.read_number(2) {
                    charge = unit * n as i32;
                } else {
                    charge = unit;
                    while self.peek() == Some(sign) {
                        self.i += 1;
                        charge += unit;
                    }
                }
                if charge.abs() > 15 {
                    return Err(MolError::syntax(start, "charge magnitude above 15"));
                }
            }
            _ => {}
        }

        if self.peek() == Some(b':') {
            return Err(MolError::syntax(
                self.i,
                "atom class is not supported",
            ));
        }
        if self.peek() != Some(b']') {
            return Err(MolError::syntax(
                self.i.min(self.bytes.len()),
                "expected ']' to close bracket atom",
            ));
        }
        self.i += 1;

        Ok(Atom {
            index: 0,
            element,
            aromatic,
            formal_charge: charge,
            isotope,
            chirality,
            explicit_h: Some(explicit_h),
            implicit_h: 0,
            in_ring: false,
        })
    }

    /// Element symbol inside brackets: longest known match, with lowercase
    /// spellings (`c`, `se`, ...) marking aromaticity.
    fn parse_bracket_symbol(&mut self, bracket_start: usize) -> Result<(String, bool), MolError> {
        let rest = &self.bytes[self.i..];
        // Two-letter aromatic spellings allowed by the aromatic subset.
        for (low, canon) in [("se", "Se"), ("as", "As")] {
            if rest.starts_with(low.as_bytes()) {
                self.i += 2;
                return Ok((String::from(canon), true));
            }
        }
        match rest {
            [a @ b'A'..=b'Z', b @ b'a'..=b'z', ..] => {
                let two: String = [*a as char, *b as char].iter().collect();
                if elements::is_element(&two) {
                    self.i += 2;
                    return Ok((two, false));
                }
                let one = String::from(*a as char);
                if elements::is_element(&one) {
                    self.i += 1;
                    return Ok((one, false));
                }
                Err(MolError::syntax(
                    self.i,
                    format!("unknown element '{two}'"),
                ))
            }
            [a @ b'A'..=b'Z', ..] => {
                let one = String::from(*a as char);
                if elements::is_element(&one) {
                    self.i += 1;
                    Ok((one, false))
                } else {
                    Err(MolError::syntax(
                        self.i,
                        format!("unknown element '{}'", *a as char),
                    ))
                }
            }
            [a @ (b'b' | b'c' | b'n' | b'o' | b'p' | b's'), ..] => {
                let canon = (*a as char).to_ascii_uppercase();
                self.i += 1;
                Ok((String::from(canon), true))
            }
            _ => Err(MolError::syntax(
                bracket_start,
                "expected element symbol in bracket atom",
            )),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.i).copied()
    }

    /// Reads up to `max_digits` decimal digits; `None` if the cursor is not
    /// on a digit.
    fn read_number(&mut self, max_digits: usize) -> Option<u32> {
        let mut val: u32 = 0;
        let mut seen = 0;
        while seen < max_digits {
            match self.peek() {
                Some(d @ b'0'..=b'9') => {
                    val = val * 10 + (d - b'0') as u32;
                    seen += 1;
                    self.i += 1;
                }
                _ => break,
            }
        }
        (seen > 0).then_some(val)
    }

    fn add_atom(&mut self, mut atom: Atom, span: Range<usize>) -> Result<(), MolError> {
        let index = self.atoms.len();
        atom.index = index;
        if let Some(prev) = self.prev {
            let order = match self.pending.take() {
                Some((pb, _)) => pb.order(),
                None => self.default_order(prev, &atom),
            };
            self.bonds.push(Bond {
                a: prev,
                b: index,
                order,
                in_ring: false,
            });
        } else if let Some((_, bpos)) = self.pending {
            return Err(MolError::syntax(bpos, "bond symbol without a left atom"));
        }
        self.atoms.push(atom);
        self.spans.push(span);
        self.prev = Some(index);
        self.dot_pos = None;
        Ok(())
    }

    /// An unspecified bond is aromatic when both endpoints are aromatic,
    /// otherwise single.
    fn default_order(&self, a: usize, b: &Atom) -> BondOrder {
        if self.atoms[a].aromatic && b.aromatic {
            BondOrder::Aromatic
        } else {
            BondOrder::Single
        }
    }

    fn ring_closure(&mut self) -> Result<(), MolError> {
        let pos = self.i;
        let digit: u16 = if self.bytes[pos] == b'%' {
            self.i += 1;
            match self.read_number(2) {
                Some(v) if self.i == pos + 3 => v as u16,
                _ => {
                    return Err(MolError::syntax(
                        pos,
                        "'%' ring closure requires exactly two digits",
                    ))
                }
            }
        } else {
            self.i += 1;
            (self.bytes[pos] - b'0') as u16
        };
        let Some(u) = self.prev else {
            return Err(MolError::syntax(pos, "ring closure before any atom"));
        };
        let pending = self.pending.take().map(|(pb, _)| pb);
        if let Some(open) = self.rings.remove(&digit) {
            let v = open.atom;
            if v == u {
                return Err(MolError::syntax(pos, "ring bond to the same atom"));
            }
            if self
                .bonds
                .iter()
                .any(|bd| (bd.a == u && bd.b == v) || (bd.a == v && bd.b == u))
            {
                return Err(MolError::syntax(pos, "duplicate bond between atoms"));
            }
            let order = match (open.bond, pending) {
                (None, None) => {
                    if self.atoms[u].aromatic && self.atoms[v].aromatic {
                        BondOrder::Aromatic
                    } else {
                        BondOrder::Single
                    }
                }
                (Some(x), None) | (None, Some(x)) => x.order(),
                (Some(x), Some(y)) => {
                    if x.order() == y.order() {
                        x.order()
                    } else {
                        return Err(MolError::syntax(
                            pos,
                            "ring closure bond symbols disagree",
                        ));
                    }
                }
            };
            self.bonds.push(Bond {
                a: v,
                b: u,
                order,
                in_ring: false,
            });
        } else {
            self.rings.insert(
                digit,
                RingOpen {
                    atom: u,
                    bond: pending,
                    pos,
                },
            );
        }
        Ok(())
    }
}
