use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters `(gamma, kappa, z, L, m, M)` of an MD-SC code family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    /// Column weight of the underlying block code (rows of the base matrix).
    pub gamma: usize,
    /// Row weight of the underlying block code (columns of the base matrix).
    pub kappa: usize,
    /// Circulant size.
    pub z: usize,
    /// Number of replicas.
    #[serde(rename = "L")]
    pub coupling_len: usize,
    /// Memory: number of component matrices minus one.
    #[serde(rename = "m")]
    pub memory: usize,
    /// Number of SC copies joined by relocations.
    #[serde(rename = "M", default = "one")]
    pub copies: usize,
}

fn one() -> usize {
    1
}

impl CodeParams {
    /// Builds a parameter set, checking only the structural constraints the
    /// matrix builders rely on.
    pub fn new(
        gamma: usize,
        kappa: usize,
        z: usize,
        coupling_len: usize,
        memory: usize,
        copies: usize,
    ) -> Result<Self> {
        let p = CodeParams {
            gamma,
            kappa,
            z,
            coupling_len,
            memory,
            copies,
        };
        p.check_structure()?;
        Ok(p)
    }

    pub fn check_structure(&self) -> Result<()> {
        if self.gamma == 0 || self.kappa == 0 {
            return Err(Error::InvalidParams("gamma and kappa must be positive".into()));
        }
        if self.z == 0 {
            return Err(Error::InvalidParams("z must be positive".into()));
        }
        if self.coupling_len == 0 {
            return Err(Error::InvalidParams("L must be positive".into()));
        }
        if self.copies == 0 {
            return Err(Error::InvalidParams("M must be at least 1".into()));
        }
        Ok(())
    }

    /// Full design-flow constraints: `gamma >= 3`, `kappa > gamma`,
    /// `L > m`, `z >= 2`.
    pub fn validate(&self) -> Result<()> {
        self.check_structure()?;
        if self.gamma < 3 {
            return Err(Error::InvalidParams(format!("gamma = {} < 3", self.gamma)));
        }
        if self.kappa <= self.gamma {
            return Err(Error::InvalidParams(format!(
                "kappa = {} must exceed gamma = {}",
                self.kappa, self.gamma
            )));
        }
        if self.coupling_len <= self.memory {
            return Err(Error::InvalidParams(format!(
                "L = {} must exceed m = {}",
                self.coupling_len, self.memory
            )));
        }
        if self.z < 2 {
            return Err(Error::InvalidParams("z must be at least 2".into()));
        }
        Ok(())
    }

    pub fn with_coupling_len(self, coupling_len: usize) -> Self {
        CodeParams { coupling_len, ..self }
    }

    pub fn with_copies(self, copies: usize) -> Self {
        CodeParams { copies, ..self }
    }

    /// Block rows of the SC protograph, `(m + L) * gamma`.
    pub fn sc_block_rows(&self) -> usize {
        (self.memory + self.coupling_len) * self.gamma
    }

    /// Block columns of the SC protograph, `L * kappa`.
    pub fn sc_block_cols(&self) -> usize {
        self.coupling_len * self.kappa
    }

    /// Code length of the MD-SC code in bits.
    pub fn md_length(&self) -> usize {
        self.copies * self.sc_block_cols() * self.z
    }

    /// Design rate `1 - rows / cols` of the (MD-)SC parity-check matrix.
    pub fn design_rate(&self) -> f64 {
        1.0 - self.sc_block_rows() as f64 / self.sc_block_cols() as f64
    }
}

pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for t in 0..k {
        acc = acc * (n - t) as f64 / (t + 1) as f64;
    }
    acc.round()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_keys_follow_the_code_tuple() {
        let p = CodeParams::new(4, 17, 17, 10, 1, 3).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"gamma":4,"kappa":17,"z":17,"L":10,"m":1,"M":3}"#);
        let back: CodeParams = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn design_constraints() {
        assert!(CodeParams::new(3, 17, 23, 10, 2, 4).unwrap().validate().is_ok());
        assert!(CodeParams::new(2, 17, 23, 10, 2, 4).unwrap().validate().is_err());
        assert!(CodeParams::new(4, 4, 23, 10, 2, 4).unwrap().validate().is_err());
        assert!(CodeParams::new(3, 5, 23, 2, 2, 4).unwrap().validate().is_err());
        assert!(CodeParams::new(3, 5, 1, 10, 2, 4).unwrap().validate().is_err());
        assert!(CodeParams::new(3, 5, 5, 10, 2, 0).is_err());
    }

    #[test]
    fn table_lengths_and_rates() {
        // GD-MD Code 1.1 and GD-MD Code 3.1
        let p1 = CodeParams::new(4, 17, 17, 10, 1, 3).unwrap();
        assert_eq!(p1.md_length(), 8670);
        assert!((p1.design_rate() - 0.74).abs() < 0.005);
        let p3 = CodeParams::new(3, 19, 23, 10, 2, 4).unwrap();
        assert_eq!(p3.md_length(), 17480);
        assert!((p3.design_rate() - 0.81).abs() < 0.005);
        // SC Code 1.1: same length with L = 30 and one copy
        let sc = p1.with_coupling_len(30).with_copies(1);
        assert_eq!(sc.md_length(), 8670);
        assert!((sc.design_rate() - 0.76).abs() < 0.005);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(17, 3), 680.0);
        assert_eq!(binomial(4, 3), 4.0);
        assert_eq!(binomial(3, 4), 0.0);
        assert!(is_prime(23) && is_prime(17) && !is_prime(9) && !is_prime(1));
    }
}
