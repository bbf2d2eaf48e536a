//! Bundled design matrices of the published example codes and their
//! reference cycle counts.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cycles::count_md_cycles;
use crate::error::{Error, Result};
use crate::grade::ProbDistMatrix;
use crate::matrix::{IntGrid, LiftingMatrix, PartitioningMatrix, RelocationMatrix};
use crate::params::CodeParams;

const FILES: &[(&str, &str)] = &[
    ("gdmd1_distribution.json", include_str!("../fixtures/gdmd1_distribution.json")),
    ("gdmd1_relocation.txt", include_str!("../fixtures/gdmd1_relocation.txt")),
    ("gdmd3_distribution.json", include_str!("../fixtures/gdmd3_distribution.json")),
    ("gdmd3_relocation.txt", include_str!("../fixtures/gdmd3_relocation.txt")),
    ("sc1_lifting.txt", include_str!("../fixtures/sc1_lifting.txt")),
    ("sc1_partitioning.txt", include_str!("../fixtures/sc1_partitioning.txt")),
    ("sc3_lifting.txt", include_str!("../fixtures/sc3_lifting.txt")),
    ("sc3_partitioning.txt", include_str!("../fixtures/sc3_partitioning.txt")),
];

const CHECKSUMS: &str = include_str!("../fixtures/SHA256SUMS");

/// Raw contents of a bundled fixture file.
pub fn fixture_file(name: &str) -> Result<&'static str> {
    FILES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| Error::UnknownCase(name.to_string()))
}

/// Compares every bundled file against the checksum list; returns the
/// names whose digests differ.
pub fn checksum_mismatches() -> Vec<String> {
    CHECKSUMS
        .lines()
        .filter_map(|l| l.split_once("  "))
        .filter(|(digest, name)| {
            fixture_file(name).map_or(true, |body| {
                let got: String = Sha256::digest(body.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
                got != *digest
            })
        })
        .map(|(_, name)| name.to_string())
        .collect()
}

/// One bundled design with its published cycle count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixtureCase {
    pub name: String,
    pub params: CodeParams,
    pub partitioning: String,
    pub lifting: String,
    /// Absent for plain SC codes.
    pub relocation: Option<String>,
    /// Published GRADE distribution, when one is printed.
    pub distribution: Option<String>,
    pub cycle_length: usize,
    pub expected: u64,
}

impl FixtureCase {
    pub fn partitioning(&self) -> Result<PartitioningMatrix> {
        PartitioningMatrix::new(IntGrid::parse_any(fixture_file(&self.partitioning)?)?, &self.params)
    }

    pub fn lifting(&self) -> Result<LiftingMatrix> {
        LiftingMatrix::new(IntGrid::parse_any(fixture_file(&self.lifting)?)?, &self.params)
    }

    /// The printed relocation matrix, or all zeros for SC codes.
    pub fn relocation(&self) -> Result<RelocationMatrix> {
        match &self.relocation {
            Some(f) => RelocationMatrix::new(IntGrid::parse_any(fixture_file(f)?)?, &self.params),
            None => Ok(RelocationMatrix::zeros(&self.params)),
        }
    }

    /// The printed distribution, renormalized since its entries are rounded.
    pub fn distribution(&self) -> Result<Option<ProbDistMatrix>> {
        #[derive(Deserialize)]
        struct Printed {
            coeffs: Vec<Vec<f64>>,
        }
        self.distribution
            .as_deref()
            .map(|f| {
                let printed: Printed = serde_json::from_str(fixture_file(f)?)?;
                ProbDistMatrix::from_weights(&printed.coeffs)
            })
            .transpose()
    }
}

/// Named bundled cases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixtureManifest {
    pub cases: Vec<FixtureCase>,
}

impl FixtureManifest {
    pub fn bundled() -> Self {
        let code1 = |l, m_copies| CodeParams::new(4, 17, 17, l, 1, m_copies).expect("valid");
        let code3 = |l, m_copies| CodeParams::new(3, 19, 23, l, 2, m_copies).expect("valid");
        let case = |name: &str, params, code: &str, reloc: Option<&str>, dist: Option<&str>, len, expected| FixtureCase {
            name: name.into(),
            params,
            partitioning: format!("{code}_partitioning.txt"),
            lifting: format!("{code}_lifting.txt"),
            relocation: reloc.map(String::from),
            distribution: dist.map(String::from),
            cycle_length: len,
            expected,
        };
        FixtureManifest {
            cases: vec![
                case("sc-1.1", code1(30, 1), "sc1", None, None, 6, 79_917),
                case(
                    "gdmd-1.1",
                    code1(10, 3),
                    "sc1",
                    Some("gdmd1_relocation.txt"),
                    Some("gdmd1_distribution.json"),
                    6,
                    6_375,
                ),
                case("sc-3.1", code3(40, 1), "sc3", None, None, 8, 1_397_319),
                case(
                    "gdmd-3.1",
                    code3(10, 4),
                    "sc3",
                    Some("gdmd3_relocation.txt"),
                    Some("gdmd3_distribution.json"),
                    8,
                    239_752,
                ),
            ],
        }
    }

    /// Looks a case up by name; `sc-1` and `sc-3` name the long versions of
    /// the two SC codes, whose counts are the published ones.
    pub fn case(&self, name: &str) -> Result<&FixtureCase> {
        let name = match name {
            "sc-1" => "sc-1.1",
            "sc-3" => "sc-3.1",
            other => other,
        };
        self.cases
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownCase(name.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub case: String,
    pub cycle_length: usize,
    pub expected: u64,
    pub actual: u64,
    pub passed: bool,
}

/// Counts the cycles of `H_MD` for the given design and compares with `expected`.
pub fn verify_design(
    k: &PartitioningMatrix,
    lifting: &LiftingMatrix,
    relocation: &RelocationMatrix,
    params: &CodeParams,
    cycle_length: usize,
    expected: u64,
) -> Result<VerifyReport> {
    let actual = count_md_cycles(k, lifting, relocation, params, cycle_length / 2)?;
    Ok(VerifyReport {
        case: String::new(),
        cycle_length,
        expected,
        actual,
        passed: actual == expected,
    })
}

/// Runs [`verify_design`] on a bundled case.
pub fn verify_case(name: &str) -> Result<VerifyReport> {
    let manifest = FixtureManifest::bundled();
    let c = manifest.case(name)?;
    let report = verify_design(
        &c.partitioning()?,
        &c.lifting()?,
        &c.relocation()?,
        &c.params,
        c.cycle_length,
        c.expected,
    )?;
    Ok(VerifyReport { case: c.name.clone(), ..report })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksums_match() {
        assert!(checksum_mismatches().is_empty(), "{:?}", checksum_mismatches());
        assert_eq!(CHECKSUMS.lines().count(), FILES.len());
    }

    #[test]
    fn every_case_loads_and_round_trips() {
        for c in FixtureManifest::bundled().cases {
            let k = c.partitioning().unwrap();
            let l = c.lifting().unwrap();
            let m = c.relocation().unwrap();
            for grid in [k.grid(), l.grid(), m.grid()] {
                assert_eq!(&grid.to_string().parse::<IntGrid>().unwrap(), grid);
                assert_eq!(&IntGrid::from_json(&grid.to_json()).unwrap(), grid);
            }
            if let Some(p) = c.distribution().unwrap() {
                assert_eq!(p.copies(), c.params.copies);
                let back = ProbDistMatrix::from_json(&p.to_json()).unwrap();
                for (a, b) in back.as_slice().iter().zip(p.as_slice()) {
                    assert!((a - b).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn printed_densities() {
        let m = FixtureManifest::bundled();
        let p1 = m.case("gdmd-1.1").unwrap().distribution().unwrap().unwrap();
        assert!((p1.relocation_percent() - 26.56).abs() < 1e-9);
        let p3 = m.case("gdmd-3.1").unwrap().distribution().unwrap().unwrap();
        assert!((p3.relocation_percent() - 26.05).abs() < 0.01);
        assert!(matches!(m.case("nope"), Err(Error::UnknownCase(_))));
        assert_eq!(m.case("sc-3").unwrap().name, "sc-3.1");
    }
}
