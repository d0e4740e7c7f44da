//! Element table with single-bond covalent radii (Å) used for bond inference.

use std::fmt;

use serde::{Deserialize, Serialize};

struct ElementData {
    symbol: &'static str,
    number: u8,
    covalent_radius: f64,
}

const TABLE: &[ElementData] = &[
    ElementData {
        symbol: "H",
        number: 1,
        covalent_radius: 0.37,
    },
    ElementData {
        symbol: "He",
        number: 2,
        covalent_radius: 0.32,
    },
    ElementData {
        symbol: "Li",
        number: 3,
        covalent_radius: 1.34,
    },
    ElementData {
        symbol: "Be",
        number: 4,
        covalent_radius: 0.90,
    },
    ElementData {
        symbol: "B",
        number: 5,
        covalent_radius: 0.82,
    },
    ElementData {
        symbol: "C",
        number: 6,
        covalent_radius: 0.77,
    },
    ElementData {
        symbol: "N",
        number: 7,
        covalent_radius: 0.75,
    },
    ElementData {
        symbol: "O",
        number: 8,
        covalent_radius: 0.73,
    },
    ElementData {
        symbol: "F",
        number: 9,
        covalent_radius: 0.71,
    },
    ElementData {
        symbol: "Ne",
        number: 10,
        covalent_radius: 0.69,
    },
    ElementData {
        symbol: "Na",
        number: 11,
        covalent_radius: 1.54,
    },
    ElementData {
        symbol: "Mg",
        number: 12,
        covalent_radius: 1.30,
    },
    ElementData {
        symbol: "Al",
        number: 13,
        covalent_radius: 1.18,
    },
    ElementData {
        symbol: "Si",
        number: 14,
        covalent_radius: 1.11,
    },
    ElementData {
        symbol: "P",
        number: 15,
        covalent_radius: 1.06,
    },
    ElementData {
        symbol: "S",
        number: 16,
        covalent_radius: 1.02,
    },
    ElementData {
        symbol: "Cl",
        number: 17,
        covalent_radius: 0.99,
    },
    ElementData {
        symbol: "Ar",
        number: 18,
        covalent_radius: 0.97,
    },
    ElementData {
        symbol: "K",
        number: 19,
        covalent_radius: 1.96,
    },
    ElementData {
        symbol: "Ca",
        number: 20,
        covalent_radius: 1.74,
    },
    ElementData {
        symbol: "Fe",
        number: 26,
        covalent_radius: 1.25,
    },
    ElementData {
        symbol: "Co",
        number: 27,
        covalent_radius: 1.26,
    },
    ElementData {
        symbol: "Ni",
        number: 28,
        covalent_radius: 1.21,
    },
    ElementData {
        symbol: "Cu",
        number: 29,
        covalent_radius: 1.38,
    },
    ElementData {
        symbol: "Zn",
        number: 30,
        covalent_radius: 1.31,
    },
    ElementData {
        symbol: "Se",
        number: 34,
        covalent_radius: 1.16,
    },
    ElementData {
        symbol: "Br",
        number: 35,
        covalent_radius: 1.14,
    },
    ElementData {
        symbol: "I",
        number: 53,
        covalent_radius: 1.33,
    },
];

/// A chemical element from the shipped table.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Element(u8);

impl Element {
    pub const H: Element = Element(0);
    pub const C: Element = Element(5);
    pub const N: Element = Element(6);
    pub const O: Element = Element(7);
    pub const S: Element = Element(15);

    /// Look up a symbol, case-insensitively on everything after the first letter.
    pub fn from_symbol(symbol: &str) -> Option<Element> {
        let symbol = symbol.trim();
        TABLE
            .iter()
            .position(|e| e.symbol.eq_ignore_ascii_case(symbol))
            .map(|i| Element(i as u8))
    }

    pub fn symbol(self) -> &'static str {
        TABLE[self.0 as usize].symbol
    }

    pub fn atomic_number(self) -> u8 {
        TABLE[self.0 as usize].number
    }

    pub fn covalent_radius(self) -> f64 {
        TABLE[self.0 as usize].covalent_radius
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl TryFrom<String> for Element {
    type Error = String;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Element::from_symbol(&value).ok_or_else(|| format!("unknown element symbol {value:?}"))
    }
}

impl From<Element> for String {
    fn from(e: Element) -> String {
        e.symbol().to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_constants_match_table() {
        assert_eq!(Element::H.symbol(), "H");
        assert_eq!(Element::C.symbol(), "C");
        assert_eq!(Element::N.symbol(), "N");
        assert_eq!(Element::O.symbol(), "O");
        assert_eq!(Element::S.symbol(), "S");
    }

    #[test]
    fn lookup_is_case_insensitive() {
        assert_eq!(Element::from_symbol("CL").unwrap().symbol(), "Cl");
        assert_eq!(Element::from_symbol("br").unwrap().atomic_number(), 35);
        assert!(Element::from_symbol("Xx").is_none());
    }
}
