//! Cohomology of cyclic, bicyclic and small finite groups with coefficients in a lattice.

use std::fmt;

use serde::{Serialize, Serializer};

use super::matrix::{smith_normal_form, Mat};
use crate::error::{Error, Result};

/// A finitely generated abelian group `⊕ Z/d_i`, listed with each factor
/// dividing the next. A factor `0` stands for a copy of `Z`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CohomologyGroup {
    pub invariant_factors: Vec<i128>,
}

impl CohomologyGroup {
    pub fn trivial() -> Self {
        CohomologyGroup {
            invariant_factors: Vec::new(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        !self.invariant_factors.contains(&0)
    }

    pub fn order(&self) -> Option<i128> {
        self.is_finite()
            .then(|| self.invariant_factors.iter().product())
    }

    pub fn exponent(&self) -> Option<i128> {
        self.is_finite().then(|| {
            self.invariant_factors
                .iter()
                .fold(1, |acc, &d| num_integer::lcm(acc, d))
        })
    }
}

impl Serialize for CohomologyGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.invariant_factors.serialize(s)
    }
}

impl fmt::Display for CohomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|&d| if d == 0 { "Z".into() } else { format!("Z/{d}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `ker(outgoing) / im(incoming)` for integer matrices with `outgoing · incoming = 0`.
pub fn homology(outgoing: &Mat, incoming: &Mat) -> Result<CohomologyGroup> {
    if outgoing.cols() != incoming.rows() || !outgoing.mul(incoming).is_zero() {
        return Err(Error::RelationsViolated(
            "maps do not compose to zero".into(),
        ));
    }
    let s = smith_normal_form(outgoing);
    let n = outgoing.cols();
    // Kernel basis: the last n − rank columns of V; coordinates via V⁻¹.
    let coords = s.v_inv.mul(incoming);
    let k = n - s.rank;
    let mut sub = Mat::zeros(k, incoming.cols());
    for i in 0..k {
        for j in 0..incoming.cols() {
            sub[(i, j)] = coords[(s.rank + i, j)];
        }
    }
    debug_assert!((0..s.rank).all(|i| (0..incoming.cols()).all(|j| coords[(i, j)] == 0)));
    Ok(cokernel(&sub))
}

/// `Z^rows / (column span)`.
pub fn cokernel(m: &Mat) -> CohomologyGroup {
    let s = smith_normal_form(m);
    let mut factors: Vec<i128> = s.diagonal().into_iter().filter(|&d| d != 1).collect();
    factors.extend(std::iter::repeat_n(0, m.rows() - s.rank));
    CohomologyGroup {
        invariant_factors: factors,
    }
}

fn check_order(t: &Mat, n: u32) -> Result<()> {
    if !t.is_square() || n == 0 || t.pow(n) != Mat::identity(t.rows()) {
        return Err(Error::RelationsViolated(format!(
            "matrix does not satisfy T^{n} = I"
        )));
    }
    Ok(())
}

/// `H¹(Z/n, M) = ker(N) / im(1 − T)`.
pub fn h1_cyclic(t: &Mat, n: u32) -> Result<CohomologyGroup> {
    check_order(t, n)?;
    homology(&t.norm(n), &t.delta())
}

/// `Ĥ⁰ = H²(Z/n, M) = ker(1 − T) / im(N)`.
pub fn h2_cyclic(t: &Mat, n: u32) -> Result<CohomologyGroup> {
    check_order(t, n)?;
    homology(&t.delta(), &t.norm(n))
}

/// The first three differentials of the standard complex for `⟨t⟩ × ⟨s⟩`, acting
/// on column vectors `M`, `M²`, `M³`, `M⁴`.
#[derive(Debug, Clone)]
pub struct BicyclicComplex {
    pub t: Mat,
    pub n: u32,
    pub s: Mat,
    pub m: u32,
    pub d0: Mat,
    pub d1: Mat,
    pub d2: Mat,
}

impl BicyclicComplex {
    pub fn new(t: &Mat, n: u32, s: &Mat, m: u32) -> Result<Self> {
        check_order(t, n)?;
        check_order(s, m)?;
        if t.rows() != s.rows() || t.mul(s) != s.mul(t) {
            return Err(Error::RelationsViolated("generators do not commute".into()));
        }
        let r = t.rows();
        let (dt, ds, nt, ns) = (t.delta(), s.delta(), t.norm(n), s.norm(m));
        let (mdt, mnt) = (dt.scale(-1), nt.scale(-1));
        let d0 = Mat::blocks(&[vec![Some(&dt)], vec![Some(&ds)]], r, r);
        let d1 = Mat::blocks(
            &[
                vec![Some(&nt), None],
                vec![Some(&ds), Some(&mdt)],
                vec![None, Some(&ns)],
            ],
            r,
            r,
        );
        let d2 = Mat::blocks(
            &[
                vec![Some(&dt), None, None],
                vec![Some(&ds), Some(&mnt), None],
                vec![None, Some(&ns), Some(&dt)],
                vec![None, None, Some(&ds)],
            ],
            r,
            r,
        );
        Ok(BicyclicComplex {
            t: t.clone(),
            n,
            s: s.clone(),
            m,
            d0,
            d1,
            d2,
        })
    }

    pub fn rank(&self) -> usize {
        self.t.rows()
    }

    pub fn h1(&self) -> Result<CohomologyGroup> {
        homology(&self.d1, &self.d0)
    }

    pub fn h2(&self) -> Result<CohomologyGroup> {
        homology(&self.d2, &self.d1)
    }

    pub fn is_cocycle(&self, a: &[i128], b: &[i128]) -> bool {
        let ab: Vec<i128> = a.iter().chain(b).copied().collect();
        ab.len() == 2 * self.rank() && self.d1.apply(&ab).iter().all(|&x| x == 0)
    }

    /// Order of the class of the cocycle `(a, b)` in `H¹`.
    pub fn class_order(&self, a: &[i128], b: &[i128]) -> Result<u64> {
        if !self.is_cocycle(a, b) {
            return Err(Error::NotCocycle);
        }
        let c: Vec<i128> = a.iter().chain(b).copied().collect();
        lattice_order(&self.d0, &c)
    }
}

/// Least `k ≥ 1` with `k·c` in the column span of `m`.
fn lattice_order(m: &Mat, c: &[i128]) -> Result<u64> {
    let s = smith_normal_form(m);
    let uc = s.u.apply(c);
    let mut k: i128 = 1;
    for (i, &x) in uc.iter().enumerate() {
        if i < s.rank {
            let d = s.d[(i, i)];
            k = num_integer::lcm(k, d / num_integer::gcd(d, x));
        } else if x != 0 {
            return Err(Error::RelationsViolated("class has infinite order".into()));
        }
    }
    Ok(k as u64)
}

/// `H¹(Z/n × Z/m, M)` from the bicyclic complex, `t` of order `n`, `s` of order `m`.
pub fn h1_bicyclic(t: &Mat, n: u32, s: &Mat, m: u32) -> Result<CohomologyGroup> {
    BicyclicComplex::new(t, n, s, m)?.h1()
}

/// A finite group by multiplication table, `table[g][h] = gh`, acting on `Z^r`.
#[derive(Debug, Clone)]
pub struct FiniteGroupAction {
    pub table: Vec<Vec<usize>>,
    pub action: Vec<Mat>,
}

pub const MAX_GROUP_ORDER: usize = 16;

impl FiniteGroupAction {
    pub fn new(table: Vec<Vec<usize>>, action: Vec<Mat>) -> Result<Self> {
        let n = table.len();
        if n == 0 || n > MAX_GROUP_ORDER || action.len() != n || table.iter().any(|r| r.len() != n)
        {
            return Err(Error::Hypothesis(format!(
                "group of order {n} with {} matrices",
                action.len()
            )));
        }
        for g in 0..n {
            for h in 0..n {
                let gh = table[g][h];
                if gh >= n || action[g].mul(&action[h]) != action[gh] {
                    return Err(Error::NotHomomorphism(format!("ρ({g})ρ({h}) ≠ ρ({gh})")));
                }
            }
        }
        Ok(FiniteGroupAction { table, action })
    }

    /// The abelian group generated by commuting matrices of the given orders,
    /// elements indexed by exponent vectors in mixed radix.
    pub fn abelian(generators: &[(Mat, u32)]) -> Result<Self> {
        let orders: Vec<u32> = generators.iter().map(|g| g.1).collect();
        let size: usize = orders.iter().map(|&o| o as usize).product();
        if size > MAX_GROUP_ORDER {
            return Err(Error::Hypothesis(format!("group of order {size}")));
        }
        let digits = |mut k: usize| -> Vec<u32> {
            orders
                .iter()
                .map(|&o| {
                    let d = (k % o as usize) as u32;
                    k /= o as usize;
                    d
                })
                .collect()
        };
        let index = |e: &[u32]| -> usize {
            e.iter()
                .zip(&orders)
                .rev()
                .fold(0, |acc, (&d, &o)| acc * o as usize + d as usize)
        };
        let r = generators.first().map_or(0, |g| g.0.rows());
        let action: Vec<Mat> = (0..size)
            .map(|k| {
                digits(k)
                    .iter()
                    .zip(generators)
                    .fold(Mat::identity(r), |acc, (&e, (g, _))| acc.mul(&g.pow(e)))
            })
            .collect();
        let table = (0..size)
            .map(|g| {
                (0..size)
                    .map(|h| {
                        let e: Vec<u32> = digits(g)
                            .iter()
                            .zip(digits(h))
                            .zip(&orders)
                            .map(|((a, b), o)| (a + b) % o)
                            .collect();
                        index(&e)
                    })
                    .collect()
            })
            .collect();
        FiniteGroupAction::new(table, action)
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn rank(&self) -> usize {
        self.action[0].rows()
    }

    /// Crossed-homomorphism conditions `c(gh) − c(g) − g·c(h) = 0` on `c ∈ M^G`.
    pub fn cocycle_conditions(&self) -> Mat {
        let (n, r) = (self.order(), self.rank());
        let mut out = Mat::zeros(n * n * r, n * r);
        for g in 0..n {
            for h in 0..n {
                let row0 = (g * n + h) * r;
                let gh = self.table[g][h];
                for i in 0..r {
                    out[(row0 + i, gh * r + i)] += 1;
                    out[(row0 + i, g * r + i)] -= 1;
                    for j in 0..r {
                        out[(row0 + i, h * r + j)] -= self.action[g][(i, j)];
                    }
                }
            }
        }
        out
    }

    /// `v ↦ (g·v − v)_g`.
    pub fn coboundary(&self) -> Mat {
        let (n, r) = (self.order(), self.rank());
        let id = Mat::identity(r);
        let blocks: Vec<Mat> = self.action.iter().map(|g| g.sub(&id)).collect();
        let grid: Vec<Vec<Option<&Mat>>> = blocks.iter().map(|b| vec![Some(b)]).collect();
        let out = Mat::blocks(&grid, r, r);
        debug_assert_eq!(out.rows(), n * r);
        out
    }

    pub fn h1(&self) -> Result<CohomologyGroup> {
        homology(&self.cocycle_conditions(), &self.coboundary())
    }
}

/// `H¹(G, M)` from crossed homomorphisms modulo principal ones.
pub fn h1_finite_group(table: Vec<Vec<usize>>, action: Vec<Mat>) -> Result<CohomologyGroup> {
    FiniteGroupAction::new(table, action)?.h1()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(x: i128) -> Mat {
        Mat::from_rows(&[vec![x]])
    }

    #[test]
    fn cyclic_on_rank_one() {
        assert!(h1_cyclic(&scalar(1), 2).unwrap().is_trivial());
        assert_eq!(
            h1_cyclic(&scalar(-1), 2).unwrap().invariant_factors,
            vec![2]
        );
        assert!(h2_cyclic(&scalar(-1), 2).unwrap().is_trivial());
        assert_eq!(h2_cyclic(&scalar(1), 2).unwrap().invariant_factors, vec![2]);
        assert!(h1_cyclic(&scalar(-1), 3).is_err());
    }

    #[test]
    fn permutation_module_is_induced() {
        // Z/3 permuting Z³ cyclically is induced, so both groups vanish.
        let p = Mat::from_images(&[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]);
        assert!(h1_cyclic(&p, 3).unwrap().is_trivial());
        assert!(h2_cyclic(&p, 3).unwrap().is_trivial());
    }

    #[test]
    fn bicyclic_small_cases() {
        let one = scalar(1);
        let neg = scalar(-1);
        assert!(h1_bicyclic(&one, 2, &one, 2).unwrap().is_trivial());
        let sign = h1_bicyclic(&neg, 2, &neg, 2).unwrap();
        let table = FiniteGroupAction::abelian(&[(neg.clone(), 2), (neg.clone(), 2)]).unwrap();
        assert_eq!(sign, table.h1().unwrap());
        assert_eq!(sign.invariant_factors, vec![2]);
        let cx = BicyclicComplex::new(&neg, 2, &one, 2).unwrap();
        assert!(cx.d1.mul(&cx.d0).is_zero());
        assert!(cx.d2.mul(&cx.d1).is_zero());
    }

    #[test]
    fn trivial_action_has_no_h1() {
        let g = FiniteGroupAction::abelian(&[
            (Mat::identity(3), 2),
            (Mat::identity(3), 2),
            (Mat::identity(3), 2),
        ])
        .unwrap();
        assert_eq!(g.order(), 8);
        assert!(g.h1().unwrap().is_trivial());
    }

    #[test]
    fn non_homomorphism_is_rejected() {
        let table = vec![vec![0, 1], vec![1, 0]];
        let bad = vec![Mat::identity(1), scalar(2)];
        assert!(matches!(
            h1_finite_group(table, bad),
            Err(Error::NotHomomorphism(_))
        ));
    }

    #[test]
    fn orders_of_classes() {
        let neg = scalar(-1);
        let one = scalar(1);
        let cx = BicyclicComplex::new(&neg, 2, &one, 2).unwrap();
        assert_eq!(cx.class_order(&[0], &[0]).unwrap(), 1);
        assert_eq!(cx.class_order(&[1], &[0]).unwrap(), 2);
        assert_eq!(cx.class_order(&[1], &[1]), Err(Error::NotCocycle));
    }
}
