//! Implicit-hydrogen resolution against the default-valence table.

use super::{MolError, Molecule};
use crate::elements;

/// Fills `implicit_h` for every atom.
///
/// Bracket atoms keep their written hydrogen count and get zero implicit
/// hydrogens. Organic-subset atoms fill up to the smallest allowed valence
/// that covers their bond-order sum (aromatic bonds counting one unit);
/// an atom written aromatic with at least two aromatic bonds donates one
/// additional valence slot to the ring system where room allows. A bond sum
/// above the largest table entry is a valence error.
pub fn compute_implicit_hydrogens(m: &mut Molecule) -> Result<(), MolError> {
    for i in 0..m.atoms.len() {
        if m.atoms[i].is_bracket() {
            m.atoms[i].implicit_h = 0;
            continue;
        }
        let Some(table) = elements::default_valences(&m.atoms[i].element) else {
            // Builder-made atom outside the organic subset: no implicit H.
            m.atoms[i].implicit_h = 0;
            continue;
        };
        let bond_sum = m.bond_order_sum(i);
        let Some(&valence) = table.iter().find(|&&v| v >= bond_sum) else {
            return Err(MolError::Valence {
                atom: i,
                element: m.atoms[i].element.clone(),
                bond_sum,
                max: *table.last().expect("valence table is non-empty"),
            });
        };
        let aromatic_slot = u8::from(m.atoms[i].aromatic && m.aromatic_bond_count(i) >= 2);
        m.atoms[i].implicit_h = (valence - bond_sum).saturating_sub(aromatic_slot);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use crate::mol::parse_smiles;

    fn implicit(s: &str) -> Vec<u8> {
        parse_smiles(s).unwrap().atoms.iter().map(|a| a.implicit_h).collect()
    }

    #[test]
    fn oxygen_fills_to_two() {
        assert_eq!(implicit("O"), vec![2]);
    }

    #[test]
    fn benzene_carbons_carry_one_hydrogen() {
        assert_eq!(implicit("c1ccccc1"), vec![1; 6]);
    }

    #[test]
    fn sulfone_sulfur_expands_to_valence_six() {
        // bond sum 5 steps S past 2 and 4 up to 6
        let m = parse_smiles("S(=O)(=O)O").unwrap();
        assert_eq!(m.atoms[0].implicit_h, 1);
    }

    #[test]
    fn pyridine_nitrogen_has_no_hydrogen() {
        assert_eq!(implicit("n1ccccc1"), vec![0, 1, 1, 1, 1, 1]);
    }

    #[test]
    fn furan_oxygen_has_no_room_for_the_aromatic_slot() {
        assert_eq!(implicit("o1cccc1"), vec![0, 1, 1, 1, 1]);
    }

    #[test]
    fn fused_aromatic_junction_carbons_carry_no_hydrogen() {
        // naphthalene: atoms 3 and 8 are the ring-fusion carbons
        let h = implicit("c1ccc2ccccc2c1");
        assert_eq!(h.iter().filter(|&&x| x == 0).count(), 2);
        assert_eq!(h.iter().sum::<u8>(), 8);
    }

    #[test]
    fn tetravalent_nitrogen_steps_to_next_valence() {
        // neutral N with four single bonds fills to valence 5
        let m = parse_smiles("N(C)(C)(C)C").unwrap();
        assert_eq!(m.atoms[0].implicit_h, 1);
    }

    #[test]
    fn carbon_with_five_bonds_is_a_valence_error() {
        let err = parse_smiles("C(C)(C)(C)(C)C").unwrap_err();
        assert!(matches!(err, crate::mol::MolError::Valence { atom: 0, .. }));
    }

    #[test]
    fn bracket_atoms_never_gain_implicit_hydrogens() {
        let m = parse_smiles("[NH4+]").unwrap();
        assert_eq!(m.atoms[0].explicit_h, Some(4));
        assert_eq!(m.atoms[0].implicit_h, 0);
        assert_eq!(m.atoms[0].formal_charge, 1);
    }
}
