//! Galois actions on Picard lattices of the compactified and affine surfaces.

use serde::Serialize;

use super::groups::{h1_cyclic, BicyclicComplex, CohomologyGroup, FiniteGroupAction};
use super::matrix::Mat;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct Generator {
    pub name: String,
    pub order: u32,
    pub matrix: Mat,
}

#[derive(Debug, Clone, Serialize)]
pub struct LatticeAction {
    pub key: &'static str,
    pub description: &'static str,
    pub basis: Vec<String>,
    pub generators: Vec<Generator>,
    /// Relations among the basis classes that are recorded but not used.
    pub notes: Vec<&'static str>,
    /// The group stated for this action, as invariant factors.
    pub expected_h1: Vec<i128>,
}

impl LatticeAction {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn generator(&self, name: &str) -> Option<&Mat> {
        self.generators
            .iter()
            .find(|g| g.name == name)
            .map(|g| &g.matrix)
    }

    /// Declared orders hold and all generators commute.
    pub fn check_relations(&self) -> Result<()> {
        for g in &self.generators {
            if g.matrix.order(g.order) != Some(g.order) {
                return Err(Error::RelationsViolated(format!(
                    "{} does not have order {}",
                    g.name, g.order
                )));
            }
        }
        for (i, g) in self.generators.iter().enumerate() {
            for h in &self.generators[i + 1..] {
                if g.matrix.mul(&h.matrix) != h.matrix.mul(&g.matrix) {
                    return Err(Error::RelationsViolated(format!(
                        "{} and {} do not commute",
                        g.name, h.name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> Result<FiniteGroupAction> {
        let gens: Vec<(Mat, u32)> = self
            .generators
            .iter()
            .map(|g| (g.matrix.clone(), g.order))
            .collect();
        FiniteGroupAction::abelian(&gens)
    }

    pub fn bicyclic(&self) -> Result<BicyclicComplex> {
        match self.generators.as_slice() {
            [t, s] => BicyclicComplex::new(&t.matrix, t.order, &s.matrix, s.order),
            _ => Err(Error::Hypothesis(format!(
                "{} has {} generators",
                self.key,
                self.generators.len()
            ))),
        }
    }

    /// `H¹` by the cyclic formula, the bicyclic complex, or crossed homomorphisms,
    /// depending on the number of generators.
    pub fn h1(&self) -> Result<CohomologyGroup> {
        self.check_relations()?;
        match self.generators.as_slice() {
            [g] => h1_cyclic(&g.matrix, g.order),
            [_, _] => self.bicyclic()?.h1(),
            _ => self.group()?.h1(),
        }
    }
}

/// Parses `"2l - l1 - l2"` style combinations over the given basis names.
fn combo(basis: &[&str], text: &str) -> Vec<i128> {
    let mut v = vec![0i128; basis.len()];
    let cleaned = text.replace(' ', "").replace('-', "+-");
    for term in cleaned.split('+').filter(|t| !t.is_empty()) {
        let (sign, rest) = term.strip_prefix('-').map_or((1, term), |r| (-1, r));
        let split = rest
            .find(|ch: char| !ch.is_ascii_digit())
            .expect("term names a basis element");
        let coeff: i128 = if split == 0 {
            1
        } else {
            rest[..split].parse().unwrap()
        };
        let name = &rest[split..];
        let idx = basis
            .iter()
            .position(|b| *b == name)
            .unwrap_or_else(|| panic!("unknown basis element {name}"));
        v[idx] += sign * coeff;
    }
    v
}

fn action(basis: &[&str], images: &[&str]) -> Mat {
    Mat::from_images(&images.iter().map(|t| combo(basis, t)).collect::<Vec<_>>())
}

const PROJECTIVE: [&str; 7] = ["l", "l1", "l2", "l3", "l4", "l5", "l6"];
const AFFINE: [&str; 4] = ["l1", "l2", "l3", "l4"];

fn projective_case(
    key: &'static str,
    description: &'static str,
    images: [&str; 7],
) -> LatticeAction {
    LatticeAction {
        key,
        description,
        basis: PROJECTIVE.iter().map(|s| s.to_string()).collect(),
        generators: vec![Generator {
            name: "sigma".into(),
            order: 2,
            matrix: action(&PROJECTIVE, &images),
        }],
        notes: vec![
            "(l, l) = 1",
            "(l, l_i) = 0 for 1 <= i <= 6",
            "H_j = l - l_j - l_(j+3) for 1 <= j <= 3",
        ],
        expected_h1: vec![],
    }
}

fn affine_sigma() -> Mat {
    action(&AFFINE, &["l1", "l1 - l3", "l1 - l2", "l1 + l4 - l2 - l3"])
}

fn affine_theta() -> Mat {
    action(&AFFINE, &["-l1", "l3 - l1", "l2 - l1", "l2 + l3 - l1 - l4"])
}

fn affine_tau() -> Mat {
    action(&AFFINE, &["l1", "l1 - l3", "l1 - l2", "-l4"])
}

const AFFINE_NOTES: [&str; 1] =
    ["Pic of the affine surface: Z l + Σ Z l_i modulo l - l_j - l_(j+3), basis l1..l4"];

pub const CATALOG_KEYS: [&str; 6] = [
    "prop2.2-case1",
    "prop2.2-case2",
    "prop2.2-case3",
    "prop2.2-case4",
    "prop2.3",
    "lemma5.1",
];

/// The Galois actions on Picard lattices for each field configuration, by key.
pub fn picard_action_catalog() -> Vec<LatticeAction> {
    // Images of l, l1, …, l6 under the generator negating √a.
    vec![
        projective_case(
            "prop2.2-case1",
            "degree-2 splitting field, √m and √(m−4a) rational",
            [
                "2l - l2 - l3 - l4",
                "l1",
                "l - l3 - l4",
                "l - l2 - l4",
                "l - l2 - l3",
                "l5",
                "l6",
            ],
        ),
        projective_case(
            "prop2.2-case2",
            "degree-2 splitting field, √m rational, √(m−4a) not",
            [
                "4l - 2l1 - 2l5 - 2l6 - l2 - l3 - l4",
                "2l - l1 - l2 - l3 - l5 - l6",
                "l - l1 - l6",
                "l - l1 - l5",
                "l - l5 - l6",
                "2l - l1 - l3 - l4 - l5 - l6",
                "2l - l1 - l2 - l4 - l5 - l6",
            ],
        ),
        projective_case(
            "prop2.2-case3",
            "degree-2 splitting field, √(m−4a) rational, √m not",
            [
                "3l - l2 - l3 - 2l4 - l5 - l6",
                "l1",
                "l - l3 - l4",
                "l - l2 - l4",
                "2l - l2 - l3 - l4 - l5 - l6",
                "l - l4 - l6",
                "l - l4 - l5",
            ],
        ),
        projective_case(
            "prop2.2-case4",
            "degree-2 splitting field, neither √m nor √(m−4a) rational",
            [
                "3l - 2l1 - l2 - l3 - l5 - l6",
                "2l - l1 - l2 - l3 - l5 - l6",
                "l - l1 - l6",
                "l - l1 - l5",
                "l4",
                "l - l1 - l3",
                "l - l1 - l2",
            ],
        ),
        LatticeAction {
            key: "prop2.3",
            description: "degree-8 splitting field, G = <sigma, tau, theta> ≅ (Z/2)³",
            basis: AFFINE.iter().map(|s| s.to_string()).collect(),
            generators: vec![
                Generator {
                    name: "sigma".into(),
                    order: 2,
                    matrix: affine_sigma(),
                },
                Generator {
                    name: "tau".into(),
                    order: 2,
                    matrix: affine_tau(),
                },
                Generator {
                    name: "theta".into(),
                    order: 2,
                    matrix: affine_theta(),
                },
            ],
            notes: AFFINE_NOTES.to_vec(),
            expected_h1: vec![2, 2],
        },
        LatticeAction {
            key: "lemma5.1",
            description:
                "degree-4 splitting field Q(√a, √m) with √(m−4a)/√(ma) rational, G = <sigma, tau>",
            basis: AFFINE.iter().map(|s| s.to_string()).collect(),
            generators: vec![
                Generator {
                    name: "sigma".into(),
                    order: 2,
                    matrix: affine_theta(),
                },
                Generator {
                    name: "tau".into(),
                    order: 2,
                    matrix: affine_tau(),
                },
            ],
            notes: AFFINE_NOTES
                .iter()
                .copied()
                .chain(["l1 + l4 = l2 + l5"])
                .collect(),
            expected_h1: vec![2, 4],
        },
    ]
}

pub fn catalog_entry(key: &str) -> Result<LatticeAction> {
    picard_action_catalog()
        .into_iter()
        .find(|e| e.key == key)
        .ok_or_else(|| Error::UnknownKey(key.to_string()))
}

/// `l̄₅ = l̄₁ + l̄₄ − l̄₂` in the affine basis.
pub fn l5_bar() -> Vec<i128> {
    vec![1, -1, 0, 1]
}

/// The cocycle `(x₁l̄₁ + x₂(l̄₃ − l̄₁ − l̄₂) − y₂(l̄₃ − l̄₄), y₁(l̄₁ − l̄₂ − l̄₃) + y₂l̄₄)`.
pub fn order_four_family(x1: i128, x2: i128, y1: i128, y2: i128) -> (Vec<i128>, Vec<i128>) {
    let a = vec![x1 - x2, -x2, x2 - y2, y2];
    let b = vec![y1, -y1, -y1, y2];
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parser() {
        assert_eq!(
            combo(&PROJECTIVE, "2l - l1 - l2 - l3 - l5 - l6"),
            vec![2, -1, -1, -1, 0, -1, -1]
        );
        assert_eq!(combo(&AFFINE, "-l4"), vec![0, 0, 0, -1]);
    }

    #[test]
    fn catalog_rows() {
        let c2 = catalog_entry("prop2.2-case2").unwrap();
        assert_eq!(
            c2.generator("sigma").unwrap().column(1),
            vec![2, -1, -1, -1, 0, -1, -1]
        );
        let p23 = catalog_entry("prop2.3").unwrap();
        assert_eq!(p23.generator("theta").unwrap().column(0), vec![-1, 0, 0, 0]);
        let l51 = catalog_entry("lemma5.1").unwrap();
        assert_eq!(l51.generator("tau").unwrap().column(3), vec![0, 0, 0, -1]);
        assert!(matches!(catalog_entry("nope"), Err(Error::UnknownKey(_))));
    }

    #[test]
    fn relations_hold() {
        for e in picard_action_catalog() {
            e.check_relations()
                .unwrap_or_else(|err| panic!("{}: {err}", e.key));
        }
    }

    #[test]
    fn family_members_are_cocycles() {
        let cx = catalog_entry("lemma5.1").unwrap().bicyclic().unwrap();
        assert_eq!(order_four_family(2, 1, 0, 1), (l5_bar(), vec![0, 0, 0, 1]));
        for x1 in -2..=2 {
            for x2 in -2..=2 {
                for y1 in -2..=2 {
                    for y2 in -3..=3 {
                        let (a, b) = order_four_family(x1, x2, y1, y2);
                        assert!(cx.is_cocycle(&a, &b));
                    }
                }
            }
        }
    }

    #[test]
    fn stated_groups() {
        for e in picard_action_catalog() {
            assert_eq!(
                e.h1().unwrap().invariant_factors,
                e.expected_h1,
                "{}",
                e.key
            );
        }
        let g = catalog_entry("prop2.3").unwrap();
        let via_table = g.group().unwrap().h1().unwrap();
        assert_eq!(via_table.invariant_factors, vec![2, 2]);
        let l = catalog_entry("lemma5.1").unwrap();
        assert_eq!(
            l.group().unwrap().h1().unwrap().invariant_factors,
            vec![2, 4]
        );
    }

    #[test]
    fn four_torsion_family() {
        let cx = catalog_entry("lemma5.1").unwrap().bicyclic().unwrap();
        assert_eq!(cx.class_order(&l5_bar(), &[0, 0, 0, 1]).unwrap(), 4);
        for y2 in [1, 3, 5] {
            for (x1, x2, y1) in binary_triples() {
                let (a, b) = order_four_family(x1, x2, y1, y2);
                assert_eq!(cx.class_order(&a, &b).unwrap(), 4, "{x1} {x2} {y1} {y2}");
            }
        }
    }

    #[test]
    fn invariants_of_tau_fixed_part() {
        // Pic^tau = <l1, l2 - l3>, on which sigma acts by -1.
        let minus = Mat::from_rows(&[vec![-1, 0], vec![0, -1]]);
        assert!(super::super::groups::h2_cyclic(&minus, 2)
            .unwrap()
            .is_trivial());
        assert_eq!(h1_cyclic(&minus, 2).unwrap().invariant_factors, vec![2, 2]);
    }

    fn binary_triples() -> Vec<(i128, i128, i128)> {
        let mut out = Vec::new();
        for x1 in 0..2 {
            for x2 in 0..2 {
                for y1 in 0..2 {
                    out.push((x1, x2, y1));
                }
            }
        }
        out
    }
}
