//! Reproducible analyses: per-surface reports, family batches, cohomology tables
//! and the self-test suite.

mod family;
mod selftest;

use std::fmt::Write as _;

use serde::Serialize;

use crate::brauer::{
    relevant_places, standard_classes, verdict_for, Caps, InvariantProfile, ProfileStatus, Verdict,
};
use crate::cohomology::{catalog_entry, l5_bar, CohomologyGroup};
use crate::error::{Error, Result};
use crate::geometry::{incidence_matrix, line_on_surface, lines_catalog};
use crate::padic::{field_degree, is_perfect_square, Invariant, Place};
use crate::search::{box_search, Triple};
use crate::solubility::{check_params, soluble_closed_form, Solubility};

pub use family::{cmd_family, family_spec, Clause, FamilyReport, FamilySpec, FAMILIES};
pub use selftest::{
    cmd_selftest, criterion, random_commuting_involutions, CriterionOutcome, CriterionStatus,
    HilbertFn, SelftestConfig, SelftestReport, CRITERIA,
};

pub const SCHEMA: u32 = 1;

/// Points listed in a report; the count is always complete.
const LISTED_POINTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalyzeOptions {
    pub prec_cap: Option<u32>,
    pub box_bound: u64,
    /// Indices into the standard classes; `None` keeps all three.
    pub classes: Option<Vec<usize>>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            prec_cap: None,
            box_bound: 100,
            classes: None,
        }
    }
}

impl AnalyzeOptions {
    pub fn caps(&self) -> Caps {
        Caps {
            max_level: self.prec_cap,
            ..Caps::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlaceSolubility {
    pub place: Place,
    pub soluble: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoxSummary {
    pub bound: u64,
    pub count: usize,
    pub points: Vec<Triple>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub a: i64,
    pub m: i64,
    pub warnings: Vec<String>,
    pub field_degree: u32,
    pub solubility: Vec<PlaceSolubility>,
    pub classes: Vec<String>,
    pub profiles: Vec<InvariantProfile>,
    pub verdict: Verdict,
    pub certifying_classes: Vec<String>,
    pub box_search: BoxSummary,
    /// Present when the splitting field has degree 8.
    pub thm11_consistency: Option<bool>,
}

impl AnalysisReport {
    pub fn profile(&self, place: Place, class: &str) -> Option<&InvariantProfile> {
        self.profiles
            .iter()
            .find(|p| p.place == place && p.class == class)
    }
}

pub fn cmd_analyze(a: i64, m: i64, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    check_params(a, m)?;
    let mut warnings = Vec::new();
    if is_perfect_square(a as i128) {
        warnings.push(format!("a = {a} is a square: √a ∈ Q"));
    }
    let all = standard_classes(a, m)?;
    let classes = match &opts.classes {
        None => all,
        Some(idx) => idx
            .iter()
            .map(|&i| {
                all.get(i)
                    .cloned()
                    .ok_or_else(|| Error::UnknownKey(format!("class index {i}")))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let places = relevant_places(a, m);
    let v = verdict_for(&classes, a, m, &places, &opts.caps())?;
    let mut sol_places = places.clone();
    if !sol_places.contains(&Place::Prime(3)) {
        sol_places.insert(2, Place::Prime(3));
    }
    let solubility = sol_places
        .into_iter()
        .map(|place| PlaceSolubility {
            place,
            soluble: match place {
                Place::Infinite => true,
                Place::Prime(p) => soluble_closed_form(a, m, p) == Solubility::Soluble,
            },
        })
        .collect();
    let points = box_search(a, m, opts.box_bound);
    let degree = field_degree(a, m)?;
    Ok(AnalysisReport {
        schema: SCHEMA,
        a,
        m,
        warnings,
        field_degree: degree,
        solubility,
        classes: v.classes,
        profiles: v.places,
        verdict: v.verdict,
        certifying_classes: v.certifying_classes,
        box_search: BoxSummary {
            bound: opts.box_bound,
            count: points.len(),
            points: points.into_iter().take(LISTED_POINTS).collect(),
        },
        thm11_consistency: (degree == 8).then(|| crate::brauer::thm11_consistency(a, m)),
    })
}

fn invariant_set(s: &std::collections::BTreeSet<Invariant>) -> String {
    let items: Vec<String> = s.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

pub fn render_analysis(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "surface: {}x^2 + y^2 + z^2 - xyz = {}", r.a, r.m);
    for w in &r.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    let _ = writeln!(out, "field degree: {}", r.field_degree);
    let sol: Vec<String> = r
        .solubility
        .iter()
        .map(|s| format!("{}:{}", s.place, if s.soluble { "yes" } else { "no" }))
        .collect();
    let _ = writeln!(out, "local solubility: {}", sol.join(" "));
    if r.verdict != Verdict::LocallyInsoluble {
        let _ = writeln!(out, "invariant profiles:");
        for p in &r.profiles {
            let status = match p.status {
                ProfileStatus::Exhaustive => "",
                ProfileStatus::Sampled => " (sampled)",
                ProfileStatus::Inconclusive => " (inconclusive)",
            };
            let _ = writeln!(
                out,
                "  {:>4}  {:<22} {}{}",
                p.place.to_string(),
                p.class,
                invariant_set(&p.achieved),
                status
            );
        }
    }
    let _ = writeln!(out, "verdict: {}", r.verdict);
    if !r.certifying_classes.is_empty() {
        let _ = writeln!(out, "certified by: {}", r.certifying_classes.join(", "));
    }
    let _ = writeln!(
        out,
        "integral points with max |coord| <= {}: {}",
        r.box_search.bound, r.box_search.count
    );
    for t in &r.box_search.points {
        let _ = writeln!(out, "  ({}, {}, {})", t[0], t[1], t[2]);
    }
    if let Some(ok) = r.thm11_consistency {
        let _ = writeln!(out, "m - 4a in <-1, 2, 3, primes of gcd(a, m)>: {ok}");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderFourWitness {
    pub a: Vec<i128>,
    pub b: Vec<i128>,
    pub order: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CohomologyReport {
    pub schema: u32,
    pub key: String,
    pub description: String,
    pub rank: usize,
    pub basis: Vec<String>,
    pub h1: CohomologyGroup,
    pub witness: Option<OrderFourWitness>,
}

pub fn cmd_cohomology(key: &str) -> Result<CohomologyReport> {
    let entry = catalog_entry(key)?;
    let h1 = entry.h1()?;
    let witness = if entry.key == "lemma5.1" {
        let cx = entry.bicyclic()?;
        let b: Vec<i128> = entry
            .basis
            .iter()
            .map(|name| i128::from(name == "l4"))
            .collect();
        let a = l5_bar();
        let order = cx.class_order(&a, &b)?;
        Some(OrderFourWitness { a, b, order })
    } else {
        None
    };
    Ok(CohomologyReport {
        schema: SCHEMA,
        key: entry.key.to_string(),
        description: entry.description.to_string(),
        rank: entry.rank(),
        basis: entry.basis.clone(),
        h1,
        witness,
    })
}

pub fn render_cohomology(r: &CohomologyReport) -> String {
    let mut out = format!(
        "{}: {}\nrank {} on ({})\nH^1 = {}\n",
        r.key,
        r.description,
        r.rank,
        r.basis.join(", "),
        r.h1
    );
    if let Some(w) = &r.witness {
        let _ = writeln!(out, "class ({:?}, {:?}) has order {}", w.a, w.b, w.order);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinesReport {
    pub schema: u32,
    pub a: i64,
    pub m: i64,
    pub labels: Vec<String>,
    pub on_surface: Vec<bool>,
    pub incidence: Vec<Vec<u8>>,
}

pub fn cmd_lines(a: i64, m: i64) -> Result<LinesReport> {
    let lines = lines_catalog(a, m)?;
    let on_surface = lines
        .iter()
        .map(|l| line_on_surface(l, a, m))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<_> = lines.iter().collect();
    Ok(LinesReport {
        schema: SCHEMA,
        a,
        m,
        labels: lines.iter().map(|l| l.label.clone()).collect(),
        on_surface,
        incidence: incidence_matrix(&refs)?,
    })
}

pub fn render_lines(r: &LinesReport) -> String {
    let mut out = String::new();
    let on = r.on_surface.iter().filter(|&&b| b).count();
    let _ = writeln!(out, "{on} of {} lines lie on the surface", r.labels.len());
    for (i, label) in r.labels.iter().enumerate() {
        let row: String = r.incidence[i]
            .iter()
            .map(|&v| if v == 1 { '1' } else { '.' })
            .collect();
        let meets = r.incidence[i].iter().filter(|&&v| v == 1).count();
        let _ = writeln!(out, "{label:<10} {row}  meets {meets}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analyze_obstruction() {
        let r = cmd_analyze(
            3,
            14,
            &AnalyzeOptions {
                box_bound: 50,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::ObstructionCertified);
        assert_eq!(r.box_search.count, 0);
        assert_eq!(r.thm11_consistency, Some(true));
        assert!(render_analysis(&r).contains("verdict: ObstructionCertified"));
    }

    #[test]
    fn analyze_blocked() {
        let r = cmd_analyze(
            5,
            3,
            &AnalyzeOptions {
                box_bound: 10,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.verdict, Verdict::LocallyInsoluble);
        let blocked: Vec<Place> = r
            .solubility
            .iter()
            .filter(|s| !s.soluble)
            .map(|s| s.place)
            .collect();
        assert_eq!(blocked, vec![Place::Prime(2)]);
        assert!(matches!(
            cmd_analyze(1, 4, &AnalyzeOptions::default()),
            Err(Error::Degenerate { .. })
        ));
    }

    #[test]
    fn analyze_warns_on_square_a() {
        let r = cmd_analyze(
            4,
            3,
            &AnalyzeOptions {
                box_bound: 3,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn analyze_is_deterministic() {
        let opts = AnalyzeOptions {
            box_bound: 30,
            ..Default::default()
        };
        let one = serde_json::to_string(&cmd_analyze(10, 43, &opts).unwrap()).unwrap();
        let two = serde_json::to_string(&cmd_analyze(10, 43, &opts).unwrap()).unwrap();
        assert_eq!(one, two);
        assert!(one.starts_with("{\"schema\":1,"));
    }

    #[test]
    fn cohomology_reports() {
        let r = cmd_cohomology("lemma5.1").unwrap();
        assert_eq!(r.h1.invariant_factors, vec![2, 4]);
        assert_eq!(r.witness.unwrap().order, 4);
        assert!(cmd_cohomology("prop2.2-case3").unwrap().h1.is_trivial());
        assert_eq!(
            cmd_cohomology("prop2.3").unwrap().h1.invariant_factors,
            vec![2, 2]
        );
        assert!(matches!(cmd_cohomology("nope"), Err(Error::UnknownKey(_))));
    }

    #[test]
    fn lines_report() {
        let r = cmd_lines(2, 3).unwrap();
        assert!(r.on_surface.iter().all(|&b| b));
        // Every line on a smooth cubic surface meets exactly ten others.
        assert!(r
            .incidence
            .iter()
            .all(|row| row.iter().filter(|&&v| v == 1).count() == 10));
    }
}
