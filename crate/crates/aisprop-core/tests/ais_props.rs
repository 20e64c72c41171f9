//! AIS tokenizer properties: exact round trips, atom-token bijection, ring
//! flags against the graph, concatenation identity for the SMILES arm, and
//! rendering injectivity over the chemical alphabet.

use aisprop_core::ais::{
    ais_to_smiles, parse_token, smiles_atom_tokenize, smiles_to_ais, AisToken, AtomEnv,
    NeighborSym,
};
use aisprop_core::mol::{parse_smiles, Chirality};
use proptest::prelude::*;

const CORPUS: &[&str] = &[
    "C",
    "CCO",
    "c1ccccc1",
    "C(=C)C1=CC=CC=C1",
    "N[C@@H](C)C(=O)O",
    "CC(C)Cc1ccc(cc1)C(C)C(=O)O",
    "c1ccc2[nH]ccc2c1",
    "O=C(O)c1ccccc1OC(=O)C",
    "[NH4+].[Cl-]",
    "C/C=C\\C(=O)O",
    "S(=O)(=O)(O)c1ccccc1",
    "c1cc[n-]n1",
    "[13CH4]",
    "O=[N+]([O-])c1ccccc1",
    "C%10CCCCC%10",
    "CN1CCC[C@H]1c1cccnc1",
];

#[test]
fn round_trip_is_exact_on_the_corpus() {
    for s in CORPUS {
        let seq = smiles_to_ais(s).unwrap();
        assert_eq!(&ais_to_smiles(&seq).unwrap(), s, "round trip of {s}");
    }
}

#[test]
fn atom_tokens_biject_with_atoms_in_order() {
    for s in CORPUS {
        let seq = smiles_to_ais(s).unwrap();
        let m = parse_smiles(s).unwrap();
        let atom_tokens: Vec<&AtomEnv> = seq
            .tokens
            .iter()
            .filter_map(|t| match t {
                AisToken::Atom(env) => Some(env),
                _ => None,
            })
            .collect();
        assert_eq!(atom_tokens.len(), m.atoms.len(), "{s}");
        for (env, atom) in atom_tokens.iter().zip(&m.atoms) {
            assert_eq!(env.element, atom.element, "{s}");
            assert_eq!(env.aromatic, atom.aromatic, "{s}");
            assert_eq!(env.h_count, atom.total_h(), "{s}");
            assert_eq!(env.in_ring, atom.in_ring, "{s}: ring flag");
            assert_eq!(env.charge, atom.formal_charge, "{s}");
        }
    }
}

#[test]
fn heavy_atom_count_equals_atom_token_count() {
    for s in CORPUS {
        let seq = smiles_to_ais(s).unwrap();
        let m = parse_smiles(s).unwrap();
        let heavy = m.atoms.iter().filter(|a| a.element != "H").count();
        let tokens = seq
            .tokens
            .iter()
            .filter(|t| matches!(t, AisToken::Atom(_)))
            .count();
        assert_eq!(tokens, heavy, "{s}");
    }
}

#[test]
fn smiles_tokenization_concatenates_to_the_source() {
    for s in CORPUS {
        assert_eq!(smiles_atom_tokenize(s).unwrap().concat(), *s);
    }
}

#[test]
fn rendered_tokens_parse_back_to_equal_payloads() {
    for s in CORPUS {
        let seq = smiles_to_ais(s).unwrap();
        for tok in &seq.tokens {
            let rendered = tok.render();
            let back = parse_token(&rendered).unwrap();
            assert_eq!(back.render(), rendered, "{s}: {rendered}");
            if let (AisToken::Atom(a), AisToken::Atom(b)) = (tok, &back) {
                assert_eq!(a.element, b.element);
                assert_eq!(a.aromatic, b.aromatic);
                assert_eq!(a.h_count, b.h_count);
                assert_eq!(a.charge, b.charge);
                assert_eq!(a.isotope, b.isotope);
                assert_eq!(a.chirality, b.chirality);
                assert_eq!(a.in_ring, b.in_ring);
                assert_eq!(a.neighbors, b.neighbors);
            }
        }
    }
}

// ---- rendering injectivity ------------------------------------------------

/// The alphabet the pipeline actually produces (organic subset, aromatic
/// forms, and common bracket elements). Concatenated neighbor strings are
/// unambiguous over this set.
const NEIGHBOR_SYMBOLS: &[(&str, bool)] = &[
    ("B", false),
    ("C", false),
    ("N", false),
    ("O", false),
    ("P", false),
    ("S", false),
    ("F", false),
    ("Cl", false),
    ("Br", false),
    ("I", false),
    ("Si", false),
    ("Se", false),
    ("B", true),
    ("C", true),
    ("N", true),
    ("O", true),
    ("P", true),
    ("S", true),
    ("Se", true),
    ("As", true),
];

fn env_strategy() -> impl Strategy<Value = AtomEnv> {
    let element = prop::sample::select(vec![
        ("C", false),
        ("N", false),
        ("O", false),
        ("S", false),
        ("Cl", false),
        ("C", true),
        ("N", true),
        ("S", true),
        ("Se", true),
    ]);
    let neighbors = prop::collection::vec(0usize..NEIGHBOR_SYMBOLS.len(), 0..4);
    (
        element,
        prop::option::of(1u16..40),
        0u8..5,
        -2i32..3,
        any::<bool>(),
        0usize..3,
        neighbors,
    )
        .prop_map(
            |((elem, arom), isotope, h, charge, ring, chir, nbr_idx)| {
                let mut neighbors: Vec<NeighborSym> = nbr_idx
                    .into_iter()
                    .map(|i| NeighborSym {
                        element: NEIGHBOR_SYMBOLS[i].0.to_string(),
                        aromatic: NEIGHBOR_SYMBOLS[i].1,
                    })
                    .collect();
                neighbors.sort_by(|a, b| {
                    (a.element.to_uppercase(), a.aromatic)
                        .cmp(&(b.element.to_uppercase(), b.aromatic))
                });
                AtomEnv {
                    element: elem.to_string(),
                    aromatic: arom,
                    isotope,
                    chirality: match chir {
                        0 => Chirality::None,
                        1 => Chirality::AntiClockwise,
                        _ => Chirality::Clockwise,
                    },
                    h_count: h,
                    charge,
                    in_ring: ring,
                    neighbors,
                    src_span: None,
                }
            },
        )
}

fn semantic_eq(a: &AtomEnv, b: &AtomEnv) -> bool {
    a.element == b.element
        && a.aromatic == b.aromatic
        && a.isotope == b.isotope
        && a.chirality == b.chirality
        && a.h_count == b.h_count
        && a.charge == b.charge
        && a.in_ring == b.in_ring
        && a.neighbors == b.neighbors
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn rendering_is_injective_over_field_tuples(a in env_strategy(), b in env_strategy()) {
        if !semantic_eq(&a, &b) {
            prop_assert_ne!(a.render(), b.render());
        } else {
            prop_assert_eq!(a.render(), b.render());
        }
    }

    #[test]
    fn rendered_atom_tokens_always_reparse(env in env_strategy()) {
        let rendered = env.render();
        let back = parse_token(&rendered).unwrap();
        prop_assert_eq!(back.render(), rendered);
    }
}
