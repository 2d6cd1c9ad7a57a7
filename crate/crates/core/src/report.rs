//! Every check for one arity, gathered into a certificate, and sweeps over
//! all arities up to a leaf count.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::CellComplex;
use crate::cuts::{valid_classes, ClassSet};
use crate::error::{Error, Result};
use crate::homology::{les_consistency, HomologySummary};
use crate::nerve::{build_nerve, nerve_homology};
use crate::trees::{arities_up_to, Arity, DEFAULT_SIZE_GUARD};

/// Version tag written into every report.
pub const SCHEMA: &str = "cloven-report/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Check {
    pub fn pass() -> Self {
        Check {
            pass: true,
            witness: None,
        }
    }

    pub fn fail(witness: impl Into<String>) -> Self {
        Check {
            pass: false,
            witness: Some(witness.into()),
        }
    }

    fn from_result(r: std::result::Result<(), String>) -> Self {
        match r {
            Ok(()) => Check::pass(),
            Err(w) => Check::fail(w),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checks {
    pub d_squared_zero: Check,
    pub full_contractible: Check,
    pub y_concentrated_degree_zero: Check,
    pub clov_bouquet_shape: Check,
    pub clov_torsion_free: Check,
    pub nerve_matches_clov: Check,
    pub les_consistent: Check,
    /// Only for two outputs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k2_rank_formula: Option<Check>,
    pub subfamilies_acyclic: Check,
    pub nerve_dimension_bound: Check,
}

impl Checks {
    /// Every present check with its field name, in declaration order.
    pub fn named(&self) -> Vec<(&'static str, &Check)> {
        let mut out = vec![
            ("d_squared_zero", &self.d_squared_zero),
            ("full_contractible", &self.full_contractible),
            (
                "y_concentrated_degree_zero",
                &self.y_concentrated_degree_zero,
            ),
            ("clov_bouquet_shape", &self.clov_bouquet_shape),
            ("clov_torsion_free", &self.clov_torsion_free),
            ("nerve_matches_clov", &self.nerve_matches_clov),
            ("les_consistent", &self.les_consistent),
        ];
        if let Some(c) = &self.k2_rank_formula {
            out.push(("k2_rank_formula", c));
        }
        out.push(("subfamilies_acyclic", &self.subfamilies_acyclic));
        out.push(("nerve_dimension_bound", &self.nerve_dimension_bound));
        out
    }

    pub fn all_pass(&self) -> bool {
        self.named().iter().all(|(_, c)| c.pass)
    }
}

/// Cells per syzygy degree; the bivalent-free part in its own grading.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub full: Vec<usize>,
    pub y_part: Vec<usize>,
    pub clov_quotient: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyTables {
    pub full_cohomology: HomologySummary,
    pub y_cohomology: HomologySummary,
    pub clov_cohomology: HomologySummary,
    pub clov_homology: HomologySummary,
    pub nerve_homology: HomologySummary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NerveInfo {
    pub vertices: usize,
    pub f_vector: Vec<usize>,
    pub dimension: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubfamilyInfo {
    /// Nerve simplices, each checked as a subfamily complex.
    pub families: usize,
    /// Cells left after reducing the full complex within class strata.
    pub residual_cells: usize,
}

/// SHA-256 digests of the three complexes (see [`CellComplex::digest`]).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Digests {
    pub full: String,
    pub y_part: String,
    pub clov_quotient: String,
}

/// Wall-clock milliseconds per stage.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timings {
    pub build_ms: u64,
    pub split_ms: u64,
    pub homology_ms: u64,
    pub nerve_ms: u64,
    pub subfamilies_ms: u64,
    pub digests_ms: u64,
    pub total_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    pub arity: String,
    pub k: usize,
    pub inputs: Vec<usize>,
    pub n_leaves: usize,
    pub census: Census,
    /// Absent when the differential fails to square to zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homology: Option<HomologyTables>,
    pub nerve: NerveInfo,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subfamilies: Option<SubfamilyInfo>,
    /// Rank of `H^{k-2}` of the bivalent quotient.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clov_top_rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub digests: Option<Digests>,
    pub checks: Checks,
    pub all_pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub guard: usize,
    /// Include wall-clock timings; reports are then no longer reproducible
    /// byte for byte.
    pub timings: bool,
    pub digests: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            guard: DEFAULT_SIZE_GUARD,
            timings: false,
            digests: true,
        }
    }
}

fn at_stage<'a>(arity: &'a Arity, stage: &'static str) -> impl Fn(Error) -> Error + 'a {
    move |source| Error::Stage {
        arity: arity.to_string(),
        stage,
        source: Box::new(source),
    }
}

fn ms(t: Instant) -> u64 {
    t.elapsed().as_millis() as u64
}

fn skipped() -> Check {
    Check::fail("not evaluated: the differential does not square to zero")
}

/// Builds the complexes of `arity` and runs every check.
pub fn verify_arity(arity: &Arity, opts: &VerifyOptions) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut timings = Timings::default();
    let k = arity.k();

    let t = Instant::now();
    let full = CellComplex::build_full_unchecked(arity, opts.guard)
        .map_err(at_stage(arity, "enumerate"))?;
    timings.build_ms = ms(t);

    let t = Instant::now();
    let mut defects = Vec::new();
    if let Some((d, cell)) = full.square_defect() {
        defects.push(format!("full complex, degree {d}, cell {cell}"));
    }
    if let Some((from, to)) = full.class_growth_witness() {
        defects.push(format!(
            "contraction {from} -> {to} gains a cut class, so the pieces are not subquotients"
        ));
    }
    let (y, clov) = if defects.is_empty() {
        full.split_y_and_clov().map_err(at_stage(arity, "split"))?
    } else {
        (full.clone(), full.clone())
    };
    timings.split_ms = ms(t);

    let t = Instant::now();
    let nerve = build_nerve(arity).map_err(at_stage(arity, "nerve"))?;
    let nerve_info = NerveInfo {
        vertices: nerve.vertices.len(),
        f_vector: nerve.f_vector(),
        dimension: nerve.dimension(),
    };
    let nerve_dimension_bound = match nerve.dimension() {
        Some(d) if d + 2 > k => Check::fail(format!(
            "nerve has dimension {d} > k - 2 = {}, e.g. facet {}",
            k - 2,
            nerve
                .facets()
                .into_iter()
                .find(|f| f.len() > k - 1)
                .map(|f| f
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(" "))
                .unwrap_or_default()
        )),
        _ => Check::pass(),
    };
    timings.nerve_ms = ms(t);

    let census = Census {
        full: full.census(),
        y_part: if defects.is_empty() {
            y.census()
        } else {
            Vec::new()
        },
        clov_quotient: if defects.is_empty() {
            clov.census()
        } else {
            Vec::new()
        },
    };

    if !defects.is_empty() {
        let checks = Checks {
            d_squared_zero: Check::fail(defects.join("; ")),
            full_contractible: skipped(),
            y_concentrated_degree_zero: skipped(),
            clov_bouquet_shape: skipped(),
            clov_torsion_free: skipped(),
            nerve_matches_clov: skipped(),
            les_consistent: skipped(),
            k2_rank_formula: (k == 2).then(skipped),
            subfamilies_acyclic: skipped(),
            nerve_dimension_bound,
        };
        timings.total_ms = ms(start);
        return Ok(VerificationReport {
            schema: SCHEMA.into(),
            arity: arity.to_string(),
            k,
            inputs: arity.inputs().to_vec(),
            n_leaves: arity.n_leaves(),
            census,
            homology: None,
            nerve: nerve_info,
            subfamilies: None,
            clov_top_rank: None,
            digests: None,
            all_pass: false,
            checks,
            timings: opts.timings.then_some(timings),
        });
    }

    let t = Instant::now();
    let full_cohomology = full.cohomology();
    let y_cohomology = y.cohomology();
    let (clov_cohomology, clov_homology) = clov.homology_pair();
    let nerve_h = nerve_homology(&nerve);
    timings.homology_ms = ms(t);

    let t = Instant::now();
    let reduction = full.class_filtered_reduction();
    let families: Vec<ClassSet> = nerve.families().map(|f| f.into_iter().collect()).collect();
    let subfamilies_acyclic = families
        .par_iter()
        .map(|&set| {
            let Some(bottom) = reduction.bottom_degree(set) else {
                return Err(format!(
                    "family [{}] is realizable but no cell carries it",
                    classes_text(set)
                ));
            };
            let (co, ho) = reduction.subfamily_homology(set);
            if co.is_point_at(bottom) && ho.is_point_at(bottom) {
                Ok(())
            } else {
                Err(format!(
                    "family [{}]: cohomology {}, homology {}, expected a point in degree {bottom}",
                    classes_text(set),
                    betti_text(&co),
                    betti_text(&ho)
                ))
            }
        })
        .find_first(|r| r.is_err())
        .unwrap_or(Ok(()));
    let subfamilies = SubfamilyInfo {
        families: families.len(),
        residual_cells: reduction.census().iter().sum(),
    };
    timings.subfamilies_ms = ms(t);

    let full_contractible = Check::from_result(if full_cohomology.is_point_at(0) {
        Ok(())
    } else {
        Err(format!(
            "cohomology of the full complex is {}",
            betti_text(&full_cohomology)
        ))
    });

    let y_concentrated_degree_zero =
        Check::from_result(match y_cohomology.support().iter().find(|&&d| d > 0) {
            _ if !y_cohomology.is_torsion_free() => {
                Err(format!("torsion in {}", betti_text(&y_cohomology)))
            }
            Some(d) => Err(format!(
                "H^{d} of the bivalent-free part is nonzero: {}",
                betti_text(&y_cohomology)
            )),
            None => Ok(()),
        });

    let clov_bouquet_shape = Check::from_result(bouquet_shape(&clov_homology, k));
    let clov_torsion_free = Check::from_result(
        if clov_cohomology.is_torsion_free() && clov_homology.is_torsion_free() {
            Ok(())
        } else {
            Err(format!(
                "cohomology {}, homology {}",
                betti_text(&clov_cohomology),
                betti_text(&clov_homology)
            ))
        },
    );
    let nerve_matches_clov = Check::from_result(
        if nerve_h.betti_trimmed() == clov_homology.betti_trimmed() && nerve_h.is_torsion_free() {
            Ok(())
        } else {
            Err(format!(
                "nerve {} against quotient {}",
                betti_text(&nerve_h),
                betti_text(&clov_homology)
            ))
        },
    );
    let les_consistent = Check::from_result(
        les_consistency(&y_cohomology, &clov_cohomology, &full_cohomology, k).map_err(|v| {
            format!(
                "{}: expected {}, observed {}",
                v.identity, v.expected, v.observed
            )
        }),
    );
    let k2_rank_formula = (k == 2).then(|| {
        let (i1, i2) = (arity.inputs()[0], arity.inputs()[1]);
        let product = (i1 + 1) * (i2 + 1);
        let observed = (
            clov_homology.rank(0),
            y_cohomology.rank(0),
            valid_classes(arity).len(),
        );
        Check::from_result(if observed == (product, product - 1, product) {
            Ok(())
        } else {
            Err(format!(
                "expected rank H_0(clov) = {product}, rank H^0(y) = {}, {product} classes; \
                 observed {}, {}, {}",
                product - 1,
                observed.0,
                observed.1,
                observed.2
            ))
        })
    });

    let t = Instant::now();
    let digests = opts.digests.then(|| Digests {
        full: full.digest(),
        y_part: y.digest(),
        clov_quotient: clov.digest(),
    });
    timings.digests_ms = ms(t);

    let checks = Checks {
        d_squared_zero: Check::pass(),
        full_contractible,
        y_concentrated_degree_zero,
        clov_bouquet_shape,
        clov_torsion_free,
        nerve_matches_clov,
        les_consistent,
        k2_rank_formula,
        subfamilies_acyclic: Check::from_result(subfamilies_acyclic),
        nerve_dimension_bound,
    };
    timings.total_ms = ms(start);
    Ok(VerificationReport {
        schema: SCHEMA.into(),
        arity: arity.to_string(),
        k,
        inputs: arity.inputs().to_vec(),
        n_leaves: arity.n_leaves(),
        census,
        clov_top_rank: Some(clov_cohomology.rank(k - 2)),
        homology: Some(HomologyTables {
            full_cohomology,
            y_cohomology,
            clov_cohomology,
            clov_homology,
            nerve_homology: nerve_h,
        }),
        nerve: nerve_info,
        subfamilies: Some(subfamilies),
        digests,
        all_pass: checks.all_pass(),
        checks,
        timings: opts.timings.then_some(timings),
    })
}

/// Chain homology of a wedge of `(k-2)`-spheres: rank one in degree 0 for
/// `k >= 3`, free groups only in degrees 0 and `k - 2`.
fn bouquet_shape(h: &HomologySummary, k: usize) -> std::result::Result<(), String> {
    let top = k - 2;
    let bad = h.groups.iter().find(|g| {
        let allowed = g.degree == 0 || g.degree == top;
        !g.torsion.is_empty() || (!allowed && g.rank > 0)
    });
    if let Some(g) = bad {
        return Err(format!(
            "degree {} carries {} outside a bouquet of {top}-spheres",
            g.degree,
            betti_text(h)
        ));
    }
    match h.rank(0) {
        0 => Err("empty quotient".into()),
        r if top > 0 && r != 1 => Err(format!("{r} components, expected 1")),
        _ => Ok(()),
    }
}

fn classes_text(set: ClassSet) -> String {
    set.to_vec()
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Ranks by degree, torsion appended as `+Z/t`.
pub fn betti_text(h: &HomologySummary) -> String {
    let parts: Vec<String> = h
        .groups
        .iter()
        .map(|g| {
            let mut s = g.rank.to_string();
            for t in &g.torsion {
                write!(s, "+Z/{t}").unwrap();
            }
            s
        })
        .collect();
    format!("({})", parts.join(","))
}

/// Human-readable rendering of a report.
pub fn render_text(r: &VerificationReport) -> String {
    let mut out = String::new();
    let verdict = if r.all_pass { "PASS" } else { "FAIL" };
    writeln!(out, "arity {}  N={}  {verdict}", r.arity, r.n_leaves).unwrap();
    writeln!(out, "  census full {:?}", r.census.full).unwrap();
    writeln!(out, "  census y_part {:?}", r.census.y_part).unwrap();
    writeln!(out, "  census clov_quotient {:?}", r.census.clov_quotient).unwrap();
    if let Some(h) = &r.homology {
        writeln!(out, "  H^*(full)  {}", betti_text(&h.full_cohomology)).unwrap();
        writeln!(out, "  H^*(y)     {}", betti_text(&h.y_cohomology)).unwrap();
        writeln!(out, "  H^*(clov)  {}", betti_text(&h.clov_cohomology)).unwrap();
        writeln!(out, "  H_*(clov)  {}", betti_text(&h.clov_homology)).unwrap();
        writeln!(out, "  H_*(nerve) {}", betti_text(&h.nerve_homology)).unwrap();
    }
    if let Some(rank) = r.clov_top_rank {
        writeln!(out, "  rank H^{}(clov) = {rank}", r.k - 2).unwrap();
    }
    if let (Some(h), 2) = (&r.homology, r.k) {
        writeln!(
            out,
            "  clov rank {}, y rank {}",
            h.clov_homology.rank(0),
            h.y_cohomology.rank(0)
        )
        .unwrap();
    }
    writeln!(
        out,
        "  nerve: {} vertices, f-vector {:?}",
        r.nerve.vertices, r.nerve.f_vector
    )
    .unwrap();
    if let Some(s) = &r.subfamilies {
        writeln!(
            out,
            "  subfamilies: {} families, {} residual cells",
            s.families, s.residual_cells
        )
        .unwrap();
    }
    if let Some(d) = &r.digests {
        writeln!(out, "  sha256 full {}", d.full).unwrap();
    }
    for (name, c) in r.checks.named() {
        match &c.witness {
            None => writeln!(out, "  [pass] {name}").unwrap(),
            Some(w) => writeln!(out, "  [FAIL] {name}: {w}").unwrap(),
        }
    }
    if let Some(t) = &r.timings {
        writeln!(
            out,
            "  time: build {} ms, split {} ms, homology {} ms, nerve {} ms, subfamilies {} ms, digests {} ms, total {} ms",
            t.build_ms, t.split_ms, t.homology_ms, t.nerve_ms, t.subfamilies_ms, t.digests_ms, t.total_ms
        )
        .unwrap();
    }
    out
}

#[derive(Clone, Debug)]
pub struct BatchOptions {
    pub max_leaves: usize,
    pub k_min: usize,
    pub k_max: usize,
    /// Representatives with at most this many leaves are recomputed at
    /// their first other rotation and compared.
    pub rotation_sample_max_leaves: usize,
    pub verify: VerifyOptions,
}

impl BatchOptions {
    pub fn new(max_leaves: usize) -> Self {
        BatchOptions {
            max_leaves,
            k_min: 2,
            k_max: max_leaves,
            rotation_sample_max_leaves: 6,
            verify: VerifyOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchEntry {
    /// The rotation with the largest input list.
    pub arity: String,
    /// The other rotations, covered by this entry.
    pub aliases: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<VerificationReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RotationCheck {
    pub arity: String,
    pub rotation: String,
    pub consistent: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchReport {
    pub schema: String,
    pub max_leaves: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub entries: Vec<BatchEntry>,
    pub rotation_checks: Vec<RotationCheck>,
    pub all_pass: bool,
}

/// Arities with `k_min <= k <= k_max` and at most `max_leaves` leaves, one
/// per rotation class, each with its other rotations.
pub fn rotation_classes(max_leaves: usize, k_min: usize, k_max: usize) -> Vec<(Arity, Vec<Arity>)> {
    arities_up_to(max_leaves, k_min, k_max)
        .into_iter()
        .filter(|a| a.rotation_representative() == *a)
        .map(|a| {
            let mut others: Vec<Arity> = a.rotations().into_iter().skip(1).collect();
            others.sort_by(|x, y| y.inputs().cmp(x.inputs()));
            (a, others)
        })
        .collect()
}

/// The parts of a report that must not change under rotation.
fn rotation_mismatch(a: &VerificationReport, b: &VerificationReport) -> Option<String> {
    if a.census != b.census {
        return Some(format!("census {:?} vs {:?}", a.census, b.census));
    }
    if a.homology != b.homology {
        return Some("homology tables differ".into());
    }
    if a.nerve != b.nerve {
        return Some(format!(
            "nerve f-vector {:?} vs {:?}",
            a.nerve.f_vector, b.nerve.f_vector
        ));
    }
    if a.all_pass != b.all_pass {
        return Some("verdicts differ".into());
    }
    None
}

/// Reports for every rotation class of arities in range, in the order of
/// [`rotation_classes`]. Failures of single arities are recorded and the
/// sweep continues.
pub fn batch(opts: &BatchOptions) -> Result<BatchReport> {
    if opts.max_leaves > opts.verify.guard.min(crate::trees::MAX_LEAVES) {
        return Err(Error::SizeGuard {
            arity: format!("batch up to {} leaves", opts.max_leaves),
            n_leaves: opts.max_leaves,
            guard: opts.verify.guard.min(crate::trees::MAX_LEAVES),
        });
    }
    let classes = rotation_classes(opts.max_leaves, opts.k_min, opts.k_max);
    let entries: Vec<BatchEntry> = classes
        .par_iter()
        .map(|(a, others)| {
            let (report, error) = match verify_arity(a, &opts.verify) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            BatchEntry {
                arity: a.to_string(),
                aliases: others.iter().map(ToString::to_string).collect(),
                report,
                error,
            }
        })
        .collect();
    let rotation_checks: Vec<RotationCheck> = classes
        .par_iter()
        .zip(&entries)
        .filter(|((a, others), _)| {
            a.n_leaves() <= opts.rotation_sample_max_leaves && !others.is_empty()
        })
        .map(|((_, others), entry)| {
            let alias = &others[0];
            let witness = match (&entry.report, verify_arity(alias, &opts.verify)) {
                (Some(r), Ok(s)) => rotation_mismatch(r, &s),
                (None, Err(_)) => None,
                (_, Err(e)) => Some(format!("rotation failed: {e}")),
                (None, Ok(_)) => Some("representative failed, rotation did not".into()),
            };
            RotationCheck {
                arity: entry.arity.clone(),
                rotation: alias.to_string(),
                consistent: witness.is_none(),
                witness,
            }
        })
        .collect();
    let all_pass = entries
        .iter()
        .all(|e| e.report.as_ref().is_some_and(|r| r.all_pass))
        && rotation_checks.iter().all(|c| c.consistent);
    Ok(BatchReport {
        schema: SCHEMA.into(),
        max_leaves: opts.max_leaves,
        k_min: opts.k_min,
        k_max: opts.k_max,
        entries,
        rotation_checks,
        all_pass,
    })
}

/// One line per arity, then the rotation checks.
pub fn render_batch_text(b: &BatchReport) -> String {
    let mut out = String::new();
    for e in &b.entries {
        let aliases = if e.aliases.is_empty() {
            String::new()
        } else {
            format!("  (also {})", e.aliases.join(" "))
        };
        match (&e.report, &e.error) {
            (Some(r), _) => {
                let verdict = if r.all_pass { "PASS" } else { "FAIL" };
                let failed: Vec<&str> = r
                    .checks
                    .named()
                    .into_iter()
                    .filter(|(_, c)| !c.pass)
                    .map(|(n, _)| n)
                    .collect();
                let cells: usize = r.census.full.iter().sum();
                write!(out, "{verdict} {}  cells {cells}", e.arity).unwrap();
                if let Some(rank) = r.clov_top_rank {
                    write!(out, "  rank H^{}(clov) {rank}", r.k - 2).unwrap();
                }
                if !failed.is_empty() {
                    write!(out, "  failed: {}", failed.join(", ")).unwrap();
                }
                writeln!(out, "{aliases}").unwrap();
            }
            (None, Some(err)) => writeln!(out, "ERROR {}  {err}{aliases}", e.arity).unwrap(),
            (None, None) => unreachable!("entry has a report or an error"),
        }
    }
    for c in &b.rotation_checks {
        let verdict = if c.consistent { "same" } else { "DIFFERENT" };
        write!(out, "rotation {} ~ {}: {verdict}", c.arity, c.rotation).unwrap();
        if let Some(w) = &c.witness {
            write!(out, " ({w})").unwrap();
        }
        out.push('\n');
    }
    writeln!(
        out,
        "{} arities, {}",
        b.entries.len(),
        if b.all_pass { "all pass" } else { "FAILURES" }
    )
    .unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ar(s: &str) -> Arity {
        s.parse().unwrap()
    }

    #[test]
    fn smallest_arities_pass() {
        for s in ["(2;0,0)", "(2;1,0)", "(3;0,0,0)"] {
            let r = verify_arity(&ar(s), &VerifyOptions::default()).unwrap();
            assert!(r.all_pass, "{}", render_text(&r));
        }
    }

    #[test]
    fn two_outputs_ranks() {
        let r = verify_arity(&ar("(2;1,0)"), &VerifyOptions::default()).unwrap();
        let h = r.homology.unwrap();
        assert_eq!(h.clov_homology.rank(0), 2);
        assert_eq!(h.y_cohomology.rank(0), 1);
        let r = verify_arity(&ar("(2;0,0)"), &VerifyOptions::default()).unwrap();
        assert!(r.census.y_part.iter().all(|&n| n == 0));
        assert_eq!(r.homology.unwrap().y_cohomology.rank(0), 0);
    }

    #[test]
    fn three_outputs_top_rank() {
        let r = verify_arity(&ar("(3;0,0,0)"), &VerifyOptions::default()).unwrap();
        assert_eq!(r.clov_top_rank, Some(1));
        assert_eq!(r.nerve.f_vector, vec![3, 3]);
    }

    #[test]
    fn reports_are_reproducible_without_timings() {
        let a = ar("(3;1,0,0)");
        let one =
            serde_json::to_string(&verify_arity(&a, &VerifyOptions::default()).unwrap()).unwrap();
        let two =
            serde_json::to_string(&verify_arity(&a, &VerifyOptions::default()).unwrap()).unwrap();
        assert_eq!(one, two);
        let timed = VerifyOptions {
            timings: true,
            ..VerifyOptions::default()
        };
        assert!(verify_arity(&a, &timed).unwrap().timings.is_some());
    }

    #[test]
    fn rotation_classes_up_to_three_leaves() {
        let classes = rotation_classes(3, 2, 3);
        let names: Vec<(String, Vec<String>)> = classes
            .iter()
            .map(|(a, o)| (a.to_string(), o.iter().map(ToString::to_string).collect()))
            .collect();
        assert_eq!(
            names,
            vec![
                ("(2;0,0)".to_string(), vec![]),
                ("(2;1,0)".to_string(), vec!["(2;0,1)".to_string()]),
                ("(3;0,0,0)".to_string(), vec![]),
            ]
        );
    }

    #[test]
    fn batch_up_to_four_leaves() {
        let b = batch(&BatchOptions::new(4)).unwrap();
        assert!(b.all_pass, "{}", render_batch_text(&b));
        assert!(b
            .entries
            .iter()
            .all(|e| e.report.as_ref().unwrap().checks.d_squared_zero.pass));
        let e = b.entries.iter().find(|e| e.arity == "(2;1,1)").unwrap();
        assert_eq!(
            e.report
                .as_ref()
                .unwrap()
                .homology
                .as_ref()
                .unwrap()
                .clov_homology
                .rank(0),
            4
        );
        assert!(!b.rotation_checks.is_empty());
        assert!(b.rotation_checks.iter().all(|c| c.consistent));
    }

    #[test]
    fn batch_rejects_guard() {
        let mut opts = BatchOptions::new(9);
        opts.verify.guard = 8;
        assert!(matches!(batch(&opts), Err(Error::SizeGuard { .. })));
    }
}
