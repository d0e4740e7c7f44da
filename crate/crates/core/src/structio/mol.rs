//! MDL MOL V2000 reader and writer (counts line, atom block, bond block).

use std::fmt::Write as _;

use super::{Atom, Bond, Element, MolecularGraph};
use crate::error::{Error, Result};

fn field(line: &str, start: usize, end: usize) -> &str {
    let end = end.min(line.len());
    if start >= end {
        ""
    } else {
        line.get(start..end).unwrap_or("").trim()
    }
}

fn parse_usize(text: &str, line: usize, what: &str) -> Result<usize> {
    text.trim()
        .parse::<usize>()
        .map_err(|_| Error::parse(line, format!("invalid {what}: {text:?}")))
}

fn parse_f64(text: &str, line: usize, what: &str) -> Result<f64> {
    let v = text
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::parse(line, format!("invalid {what}: {text:?}")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, format!("non-finite {what}")));
    }
    Ok(v)
}

pub(super) fn parse(text: &str) -> Result<MolecularGraph> {
    let lines: Vec<&str> = text.lines().collect();
    if lines.len() < 4 {
        return Err(Error::parse(
            lines.len().max(1),
            "truncated header: expected 3 header lines and a counts line",
        ));
    }
    let name = lines[0].trim().to_string();
    let counts = lines[3];
    let counts_no = 4;
    if counts.contains("V3000") {
        return Err(Error::parse(counts_no, "V3000 molfiles are not supported"));
    }
    let (n_atoms, n_bonds) = {
        let a = field(counts, 0, 3);
        let b = field(counts, 3, 6);
        match (a.parse::<usize>(), b.parse::<usize>()) {
            (Ok(a), Ok(b)) => (a, b),
            _ => {
                let mut it = counts.split_whitespace();
                let a = parse_usize(it.next().unwrap_or(""), counts_no, "atom count")?;
                let b = parse_usize(it.next().unwrap_or(""), counts_no, "bond count")?;
                (a, b)
            }
        }
    };
    if lines.len() < 4 + n_atoms + n_bonds {
        return Err(Error::parse(
            lines.len(),
            format!(
                "atom count mismatch: counts line declares {n_atoms} atoms and {n_bonds} bonds but the file ends early"
            ),
        ));
    }

    let mut atoms = Vec::with_capacity(n_atoms);
    for i in 0..n_atoms {
        let line_no = 5 + i;
        let line = lines[4 + i];
        let parsed = if line.len() >= 34 {
            let x = parse_f64(field(line, 0, 10), line_no, "x coordinate");
            let y = parse_f64(field(line, 10, 20), line_no, "y coordinate");
            let z = parse_f64(field(line, 20, 30), line_no, "z coordinate");
            match (x, y, z) {
                (Ok(x), Ok(y), Ok(z)) => Some(([x, y, z], field(line, 31, 34).to_string())),
                _ => None,
            }
        } else {
            None
        };
        let (position, symbol) = match parsed {
            Some(p) => p,
            None => {
                let mut it = line.split_whitespace();
                let x = parse_f64(it.next().unwrap_or(""), line_no, "x coordinate")?;
                let y = parse_f64(it.next().unwrap_or(""), line_no, "y coordinate")?;
                let z = parse_f64(it.next().unwrap_or(""), line_no, "z coordinate")?;
                let sym = it
                    .next()
                    .ok_or_else(|| Error::parse(line_no, "missing element symbol"))?;
                ([x, y, z], sym.to_string())
            }
        };
        let element = Element::from_symbol(&symbol)
            .ok_or_else(|| Error::parse(line_no, format!("unknown element symbol {symbol:?}")))?;
        atoms.push(Atom {
            element,
            isotope: None,
            position,
        });
    }

    let mut bonds = Vec::with_capacity(n_bonds);
    for i in 0..n_bonds {
        let line_no = 5 + n_atoms + i;
        let line = lines[4 + n_atoms + i];
        let (a, b, order) = {
            let fixed = (
                field(line, 0, 3).parse::<usize>(),
                field(line, 3, 6).parse::<usize>(),
                field(line, 6, 9).parse::<u8>(),
            );
            match fixed {
                (Ok(a), Ok(b), Ok(o)) => (a, b, o),
                _ => {
                    let mut it = line.split_whitespace();
                    let a = parse_usize(it.next().unwrap_or(""), line_no, "bond atom")?;
                    let b = parse_usize(it.next().unwrap_or(""), line_no, "bond atom")?;
                    let o = it
                        .next()
                        .unwrap_or("")
                        .parse::<u8>()
                        .map_err(|_| Error::parse(line_no, "invalid bond order"))?;
                    (a, b, o)
                }
            }
        };
        if a == 0 || b == 0 || a > n_atoms || b > n_atoms {
            return Err(Error::parse(
                line_no,
                format!("bond index out of range: {a}-{b}"),
            ));
        }
        bonds.push((line_no, Bond::new(a - 1, b - 1, order)));
    }

    // Property block: only isotopes are honoured, everything else is skipped.
    for (offset, line) in lines.iter().enumerate().skip(4 + n_atoms + n_bonds) {
        let line_no = offset + 1;
        if line.starts_with("M  END") {
            break;
        }
        if let Some(rest) = line.strip_prefix("M  ISO") {
            let mut it = rest.split_whitespace();
            let count = parse_usize(it.next().unwrap_or(""), line_no, "isotope entry count")?;
            for _ in 0..count {
                let idx = parse_usize(it.next().unwrap_or(""), line_no, "isotope atom")?;
                let mass = parse_usize(it.next().unwrap_or(""), line_no, "isotope mass")?;
                if idx == 0 || idx > n_atoms {
                    return Err(Error::parse(line_no, "isotope atom index out of range"));
                }
                atoms[idx - 1].isotope = Some(mass as u16);
            }
        }
    }

    let mut graph = MolecularGraph::new(name, atoms);
    for (line_no, bond) in bonds {
        graph
            .add_bond(bond)
            .map_err(|e| Error::parse(line_no, e.to_string()))?;
    }
    Ok(graph)
}

pub(super) fn write(graph: &MolecularGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", graph.name);
    let _ = writeln!(out, "  zulf");
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:>3}{:>3}  0  0  0  0  0  0  0  0999 V2000",
        graph.atoms.len(),
        graph.bonds.len()
    );
    for atom in &graph.atoms {
        let [x, y, z] = atom.position;
        let _ = writeln!(
            out,
            "{x:>10.4}{y:>10.4}{z:>10.4} {:<3} 0  0  0  0  0  0  0  0  0  0  0  0",
            atom.element.symbol()
        );
    }
    for bond in &graph.bonds {
        let _ = writeln!(
            out,
            "{:>3}{:>3}{:>3}  0",
            bond.atoms.0 + 1,
            bond.atoms.1 + 1,
            bond.order
        );
    }
    let isotopes: Vec<(usize, u16)> = graph
        .atoms
        .iter()
        .enumerate()
        .filter_map(|(i, a)| a.isotope.map(|m| (i + 1, m)))
        .collect();
    for chunk in isotopes.chunks(8) {
        let _ = write!(out, "M  ISO{:>3}", chunk.len());
        for (i, m) in chunk {
            let _ = write!(out, " {i:>3} {m:>3}");
        }
        let _ = writeln!(out);
    }
    let _ = writeln!(out, "M  END");
    out
}
