use super::{Axis, PauliTerm, SpinHamiltonian};
use crate::constants::dipolar_strength_hz;
use crate::error::{Error, Result};
use crate::spinham::CouplingTable;
use crate::structio::{bond_distance_matrix, displacement, MolecularGraph, RegimeConfig, SpinSite};

/// Relative magnitude below which a dipolar tensor component is dropped.
const DIPOLAR_ZERO: f64 = 1e-12;

/// Builds the zero-field Hamiltonian for `sites`; register qubit `i` is `sites[i]`.
///
/// Scalar pairs within `max_bond_separation` bonds contribute
/// `(J/4)(XX + YY + ZZ)`. With dipolar terms enabled, every pair within
/// `r_cut` contributes `(s·b/4)(δ_ab - 3 r̂_a r̂_b) σ^a σ^b`, where `s` is the
/// regime's dipolar scale and `b` the dipolar strength in Hz.
pub fn build_hamiltonian(
    graph: &MolecularGraph,
    sites: &[SpinSite],
    regime: &RegimeConfig,
    table: &CouplingTable,
) -> Result<SpinHamiltonian> {
    regime.validate()?;
    if let Some(s) = sites.iter().find(|s| s.atom_index >= graph.atoms.len()) {
        return Err(Error::domain(format!(
            "spin site references atom {} but the structure has {} atoms",
            s.atom_index,
            graph.atoms.len()
        )));
    }
    let hops = bond_distance_matrix(graph);
    let dipolar_scale = regime.dipolar_scale();
    let mut terms = Vec::new();

    for (i, a) in sites.iter().enumerate() {
        for (j, b) in sites.iter().enumerate().skip(i + 1) {
            if let Some(k) = hops.get(a.atom_index, b.atom_index) {
                if k >= 1 && k <= regime.max_bond_separation {
                    let j_hz = table.lookup(a.species, b.species, k)?;
                    if j_hz != 0.0 {
                        for axis in Axis::ALL {
                            terms.push(PauliTerm::two_site(j_hz / 4.0, (i, axis), (j, axis)));
                        }
                    }
                }
            }

            if dipolar_scale > 0.0 {
                let pa = graph.atoms[a.atom_index].position;
                let pb = graph.atoms[b.atom_index].position;
                let d = displacement(pa, pb);
                let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                if r > 0.0 && r <= regime.r_cut {
                    let strength = dipolar_scale * dipolar_strength_hz(a.gamma, b.gamma, r);
                    let unit = [d[0] / r, d[1] / r, d[2] / r];
                    for ax in Axis::ALL {
                        for bx in Axis::ALL {
                            let delta = if ax == bx { 1.0 } else { 0.0 };
                            let tensor = delta - 3.0 * unit[ax.index()] * unit[bx.index()];
                            if tensor.abs() < DIPOLAR_ZERO {
                                continue;
                            }
                            terms.push(PauliTerm::two_site(
                                strength * tensor / 4.0,
                                (i, ax),
                                (j, bx),
                            ));
                        }
                    }
                }
            }
        }
    }
    SpinHamiltonian::new(sites.len(), terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structio::{
        parse_structure, select_spin_sites, Atom, Bond, DipolarMode, Element, Nucleus, NucleusSet,
        StructureFormat,
    };

    fn proton_pair(distance: f64, bonded: bool) -> MolecularGraph {
        let mut g = MolecularGraph::new(
            "hh",
            vec![
                Atom::new(Element::H, [0.0, 0.0, 0.0]),
                Atom::new(Element::H, [0.0, 0.0, distance]),
            ],
        );
        if bonded {
            g.add_bond(Bond::new(0, 1, 1)).unwrap();
        }
        g
    }

    fn hh_table(j: f64) -> CouplingTable {
        let mut t = CouplingTable::empty();
        t.set(Nucleus::H1, Nucleus::H1, vec![j]).unwrap();
        t
    }

    #[test]
    fn single_scalar_pair() {
        let g = proton_pair(0.74, true);
        let regime = RegimeConfig::default();
        let sites = select_spin_sites(&g, &regime);
        let h = build_hamiltonian(&g, &sites, &regime, &hh_table(280.0)).unwrap();
        assert_eq!(h.n_terms(), 3);
        for (term, axis) in h.terms().iter().zip(Axis::ALL) {
            assert_eq!(term.coefficient, 70.0);
            assert_eq!(term.factors, vec![(0, axis), (1, axis)]);
        }
        assert_eq!(h.alpha(), 210.0);
    }

    #[test]
    fn dipolar_pair_along_z() {
        // r̂ = ẑ: tensor diag(1, 1, -2), so XX = YY = b/4 and ZZ = -b/2.
        let g = proton_pair(2.0, false);
        let regime = RegimeConfig::new(NucleusSet::Proton, DipolarMode::Full);
        let sites = select_spin_sites(&g, &regime);
        let h = build_hamiltonian(&g, &sites, &regime, &hh_table(0.0)).unwrap();
        assert_eq!(h.n_terms(), 3);
        let b = dipolar_strength_hz(sites[0].gamma, sites[1].gamma, 2.0);
        assert!((b - 1.50e4).abs() < 0.01 * 1.50e4);
        assert!((h.terms()[0].coefficient - b / 4.0).abs() < 1e-9 * b);
        assert!((h.terms()[2].coefficient + b / 2.0).abs() < 1e-9 * b);

        let rdc = RegimeConfig {
            dipolar_mode: DipolarMode::Rdc,
            kappa: 1e-3,
            ..regime.clone()
        };
        let h_rdc = build_hamiltonian(&g, &sites, &rdc, &hh_table(0.0)).unwrap();
        for (full, scaled) in h.terms().iter().zip(h_rdc.terms()) {
            assert!(
                (scaled.coefficient - 1e-3 * full.coefficient).abs()
                    <= 1e-15 * full.coefficient.abs()
            );
        }
    }

    #[test]
    fn dipolar_cutoff_applies() {
        let g = proton_pair(4.5, false);
        let regime = RegimeConfig::new(NucleusSet::Proton, DipolarMode::Full);
        let sites = select_spin_sites(&g, &regime);
        let h = build_hamiltonian(&g, &sites, &regime, &hh_table(0.0)).unwrap();
        assert_eq!(h.n_terms(), 0);
    }

    #[test]
    fn oblique_pair_has_cross_terms() {
        let mut g = proton_pair(1.0, false);
        g.atoms[1].position = [1.0, 1.0, 1.0];
        let regime = RegimeConfig::new(NucleusSet::Proton, DipolarMode::Full);
        let sites = select_spin_sites(&g, &regime);
        let h = build_hamiltonian(&g, &sites, &regime, &hh_table(0.0)).unwrap();
        // r̂ = (1,1,1)/√3 makes every diagonal component vanish: δ - 3/3 = 0.
        assert_eq!(h.n_terms(), 6);
        assert!(h.terms().iter().all(|t| t.factors[0].1 != t.factors[1].1));
    }

    #[test]
    fn missing_species_pair_is_a_config_error() {
        let text = include_str!("../../tests/fixtures/methane.mol");
        let g = parse_structure(text.as_bytes(), StructureFormat::MolV2000).unwrap();
        let regime = RegimeConfig::new(NucleusSet::Heteronuclear, DipolarMode::None);
        let sites = select_spin_sites(&g, &regime);
        let err = build_hamiltonian(&g, &sites, &regime, &hh_table(7.0)).unwrap_err();
        assert!(
            matches!(err, Error::Config(ref m) if m.contains("CH")),
            "{err}"
        );
    }
}
