//! Rank identities forced by the long exact sequence of the bivalent-free
//! subcomplex, the full complex, and the bivalent quotient.

use serde::{Deserialize, Serialize};

use super::HomologySummary;

/// The first identity that fails, with both sides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LesViolation {
    pub identity: String,
    pub expected: usize,
    pub observed: usize,
}

/// Checks the cohomology ranks of the bivalent-free part `y` (in its own
/// grading), the quotient `clov` and the full complex `full` of an arity
/// with `k` outputs.
///
/// With the full complex a point at degree 0 and `y` sitting from degree
/// `k - 1` up, the sequence gives `H^0(clov) = Z` and
/// `rank H^{k-2}(clov) = rank H^0(y)` for `k >= 3`, and
/// `rank H^0(clov) = 1 + rank H^0(y)` for `k = 2`. Every other degree of
/// `clov` and `y` must vanish.
pub fn les_consistency(
    y: &HomologySummary,
    clov: &HomologySummary,
    full: &HomologySummary,
    k: usize,
) -> Result<(), LesViolation> {
    let fail = |identity: String, expected: usize, observed: usize| {
        Err(LesViolation {
            identity,
            expected,
            observed,
        })
    };
    if !full.is_point_at(0) {
        let observed = full.betti().iter().sum();
        return fail("full complex is Z in degree 0 only".into(), 1, observed);
    }
    let y0 = y.rank(0);
    if k == 2 {
        if clov.rank(0) != 1 + y0 {
            return fail(
                "rank H^0(clov) = 1 + rank H^0(y)".into(),
                1 + y0,
                clov.rank(0),
            );
        }
    } else {
        if clov.rank(0) != 1 {
            return fail("rank H^0(clov) = 1".into(), 1, clov.rank(0));
        }
        if clov.rank(k - 2) != y0 {
            return fail(
                format!("rank H^{}(clov) = rank H^0(y)", k - 2),
                y0,
                clov.rank(k - 2),
            );
        }
    }
    for g in &clov.groups {
        if g.degree != 0 && g.degree != k - 2 && (g.rank > 0 || !g.torsion.is_empty()) {
            return fail(format!("H^{}(clov) = 0", g.degree), 0, g.rank);
        }
    }
    for g in &y.groups {
        if g.degree != 0 && (g.rank > 0 || !g.torsion.is_empty()) {
            return fail(format!("H^{}(y) = 0", g.degree), 0, g.rank);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::{Group, Variance};

    fn summary(betti: &[usize]) -> HomologySummary {
        HomologySummary {
            variance: Variance::Cohomology,
            groups: betti
                .iter()
                .enumerate()
                .map(|(degree, &rank)| Group {
                    degree,
                    rank,
                    torsion: Vec::new(),
                })
                .collect(),
            euler_characteristic: betti
                .iter()
                .enumerate()
                .map(|(s, &b)| if s % 2 == 0 { b as i64 } else { -(b as i64) })
                .sum(),
        }
    }

    #[test]
    fn two_outputs() {
        let full = summary(&[1, 0]);
        assert!(les_consistency(&summary(&[1]), &summary(&[2, 0]), &full, 2).is_ok());
        assert!(les_consistency(&summary(&[]), &summary(&[1]), &summary(&[1]), 2).is_ok());
        let err = les_consistency(&summary(&[1]), &summary(&[1, 0]), &full, 2).unwrap_err();
        assert_eq!((err.expected, err.observed), (2, 1));
    }

    #[test]
    fn three_outputs() {
        let full = summary(&[1, 0, 0]);
        assert!(les_consistency(&summary(&[1]), &summary(&[1, 1, 0]), &full, 3).is_ok());
        let err = les_consistency(&summary(&[2]), &summary(&[1, 1, 0]), &full, 3).unwrap_err();
        assert_eq!(err.identity, "rank H^1(clov) = rank H^0(y)");
        assert!(les_consistency(&summary(&[1, 1]), &summary(&[1, 1, 0]), &full, 3).is_err());
    }
}
