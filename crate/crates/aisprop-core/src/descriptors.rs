//! Structure-derived molecular descriptors. Molecular weight is the one
//! target property computed here; QED and logP are ingested as dataset
//! labels, never computed.

use alloc::string::String;

use thiserror::Error;

use crate::elements;
use crate::mol::Molecule;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DescriptorError {
    #[error("no atomic weight for element '{0}'")]
    UnknownElement(String),
}

/// Molecular weight in g/mol: standard atomic weights per atom (the integer
/// mass number stands in when an isotope is specified) plus 1.008 per
/// hydrogen, explicit or implicit.
pub fn mol_weight(m: &Molecule) -> Result<f64, DescriptorError> {
    let mut total = 0.0;
    for atom in &m.atoms {
        let w = match atom.isotope {
            Some(mass) => f64::from(mass),
            None => elements::standard_weight(&atom.element)
                .ok_or_else(|| DescriptorError::UnknownElement(atom.element.clone()))?,
        };
        total += w + elements::HYDROGEN_WEIGHT * f64::from(atom.total_h());
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mol::parse_smiles;

    fn mw(s: &str) -> f64 {
        mol_weight(&parse_smiles(s).unwrap()).unwrap()
    }

    #[test]
    fn water_from_bare_oxygen() {
        assert!((mw("O") - 18.015).abs() < 0.01);
    }

    #[test]
    fn styrene_is_c8h8() {
        assert!((mw("C(=C)C1=CC=CC=C1") - 104.15).abs() < 0.01);
    }

    #[test]
    fn isotope_uses_the_mass_number() {
        assert!((mw("[13CH4]") - 17.03).abs() < 0.01);
    }

    #[test]
    fn explicit_hydrogen_atoms_count_like_any_atom() {
        assert!((mw("[H][H]") - 2.016).abs() < 1e-9);
    }

    #[test]
    fn charged_fragments_sum_per_component() {
        // ammonium chloride as a two-component SMILES
        assert!((mw("[NH4+].[Cl-]") - (14.007 + 4.032 + 35.45)).abs() < 1e-9);
    }
}
