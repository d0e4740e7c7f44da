//! XYZ reader; connectivity is inferred from covalent radii.

use super::{Atom, Bond, Element, MolecularGraph};
use crate::error::{Error, Result};

/// Two atoms are bonded when their separation is at most this multiple of
/// the summed covalent radii.
pub const BOND_TOLERANCE: f64 = 1.15;

pub(super) fn parse(text: &str) -> Result<MolecularGraph> {
    let mut lines = text.lines();
    let count_line = lines.next().ok_or_else(|| Error::parse(1, "empty file"))?;
    let n_atoms = count_line
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::parse(1, format!("invalid atom count {count_line:?}")))?;
    let name = lines
        .next()
        .ok_or_else(|| Error::parse(2, "missing comment line"))?
        .trim()
        .to_string();

    let mut atoms = Vec::with_capacity(n_atoms);
    for i in 0..n_atoms {
        let line_no = 3 + i;
        let line = lines.next().ok_or_else(|| {
            Error::parse(
                line_no,
                format!("atom count mismatch: declared {n_atoms}, found {i}"),
            )
        })?;
        let mut it = line.split_whitespace();
        let symbol = it
            .next()
            .ok_or_else(|| Error::parse(line_no, "missing element symbol"))?;
        let element = Element::from_symbol(symbol)
            .ok_or_else(|| Error::parse(line_no, format!("unknown element symbol {symbol:?}")))?;
        let mut position = [0.0; 3];
        for (axis, slot) in position.iter_mut().enumerate() {
            let tok = it
                .next()
                .ok_or_else(|| Error::parse(line_no, format!("missing coordinate {axis}")))?;
            let v = tok
                .parse::<f64>()
                .map_err(|_| Error::parse(line_no, format!("invalid coordinate {tok:?}")))?;
            if !v.is_finite() {
                return Err(Error::parse(line_no, "non-finite coordinate"));
            }
            *slot = v;
        }
        atoms.push(Atom {
            element,
            isotope: None,
            position,
        });
    }
    for (extra, line) in lines.enumerate() {
        if !line.trim().is_empty() {
            return Err(Error::parse(
                3 + n_atoms + extra,
                format!("atom count mismatch: more than {n_atoms} atom lines"),
            ));
        }
    }

    let mut graph = MolecularGraph::new(name, atoms);
    for bond in infer_bonds(&graph.atoms) {
        graph
            .add_bond(bond)
            .expect("inferred bonds are unique and in range");
    }
    Ok(graph)
}

/// Bonds between every pair closer than [`BOND_TOLERANCE`] × (r_i + r_j).
pub fn infer_bonds(atoms: &[Atom]) -> Vec<Bond> {
    let mut bonds = Vec::new();
    for i in 0..atoms.len() {
        for j in (i + 1)..atoms.len() {
            let limit = BOND_TOLERANCE
                * (atoms[i].element.covalent_radius() + atoms[j].element.covalent_radius());
            if atoms[i].distance(&atoms[j]) <= limit {
                bonds.push(Bond::new(i, j, 1));
            }
        }
    }
    bonds
}
