use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::SquareClass;

/// A vector in `F₂^r`, stored as one bool per coordinate.
pub type F2Vector = Vec<bool>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Independence {
    pub independent: bool,
    /// Indices of a subset of the inputs whose product is a square; present iff dependent.
    pub certificate: Option<Vec<usize>>,
}

struct Row {
    coords: BTreeSet<u64>,
    combo: BTreeSet<usize>,
}

/// Incremental echelon form keyed by leading (largest) coordinate.
#[derive(Default)]
struct Echelon {
    rows: BTreeMap<u64, Row>,
}

impl Echelon {
    /// Reduces `coords` (tagged with `combo`); returns the combination when it reduces to zero.
    fn insert(&mut self, mut coords: BTreeSet<u64>, mut combo: BTreeSet<usize>) -> Option<BTreeSet<usize>> {
        while let Some(&lead) = coords.iter().next_back() {
            match self.rows.get(&lead) {
                Some(row) => {
                    coords = coords.symmetric_difference(&row.coords).copied().collect();
                    combo = combo.symmetric_difference(&row.combo).copied().collect();
                }
                None => {
                    self.rows.insert(lead, Row { coords, combo });
                    return None;
                }
            }
        }
        Some(combo)
    }
}

/// F₂-linear independence of square classes.
///
/// Classes are processed in order; the certificate is the dependency closed by the
/// first index at which the rank stops growing.
pub fn f2_independent(classes: &[SquareClass]) -> Independence {
    let mut ech = Echelon::default();
    for (i, c) in classes.iter().enumerate() {
        if let Some(combo) = ech.insert(c.coordinates(), BTreeSet::from([i])) {
            return Independence {
                independent: false,
                certificate: Some(combo.into_iter().collect()),
            };
        }
    }
    Independence {
        independent: true,
        certificate: None,
    }
}

/// A basis of the kernel of `n ↦ ∏ classes[i]^{n_i}`.
pub fn kernel_basis(classes: &[SquareClass]) -> Vec<F2Vector> {
    let r = classes.len();
    let mut ech = Echelon::default();
    let mut basis = Vec::new();
    for (i, c) in classes.iter().enumerate() {
        if let Some(combo) = ech.insert(c.coordinates(), BTreeSet::from([i])) {
            let mut v = vec![false; r];
            for j in combo {
                v[j] = true;
            }
            basis.push(v);
        }
    }
    basis
}
