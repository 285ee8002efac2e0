use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{bail, Result};

/// Sparse polynomial with nonnegative integer coefficients in a fixed list of
/// named variables. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct MomentPolynomial {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, BigUint>,
}

impl MomentPolynomial {
    pub fn zero(vars: &[&str]) -> Self {
        Self {
            vars: vars.iter().map(|v| v.to_string()).collect(),
            terms: BTreeMap::new(),
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exps: &[u32], coeff: impl Into<BigUint>) {
        assert_eq!(exps.len(), self.vars.len(), "exponent arity");
        let coeff = coeff.into();
        if coeff.is_zero() {
            return;
        }
        *self.terms.entry(exps.to_vec()).or_default() += coeff;
    }

    pub fn coeff(&self, exps: &[u32]) -> BigUint {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    /// Terms in descending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigUint)> {
        self.terms.iter().rev().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Largest exponent of variable `var` over all terms.
    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[var]).max()
    }

    /// Total degree.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn evaluate(&self, point: &[BigUint]) -> Result<BigUint> {
        self.check_arity(point.len())?;
        let mut total = BigUint::zero();
        for (exps, c) in &self.terms {
            let mut term = c.clone();
            for (x, &e) in point.iter().zip(exps) {
                term *= x.pow(e);
            }
            total += term;
        }
        Ok(total)
    }

    pub fn evaluate_f64(&self, point: &[f64]) -> Result<f64> {
        self.check_arity(point.len())?;
        Ok(self
            .terms
            .iter()
            .map(|(exps, c)| {
                let mono: f64 = point.iter().zip(exps).map(|(x, &e)| x.powi(e as i32)).product();
                c.to_f64().unwrap_or(f64::INFINITY) * mono
            })
            .sum())
    }

    fn check_arity(&self, n: usize) -> Result<()> {
        if n != self.vars.len() {
            bail!(
                Validation,
                "polynomial in {:?} evaluated at {n} values",
                self.vars
            );
        }
        Ok(())
    }

    pub fn mul(&self, other: &MomentPolynomial) -> Result<MomentPolynomial> {
        if self.vars != other.vars {
            bail!(Validation, "variable lists differ: {:?} vs {:?}", self.vars, other.vars);
        }
        let mut out = MomentPolynomial {
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
        };
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(&e, ca * cb);
            }
        }
        Ok(out)
    }

    /// For a polynomial in `(d, s)`, substitutes `s = c d²` and returns the
    /// resulting univariate polynomial in `d`, highest power first.
    pub fn substitute_s(&self, c: &BigRational) -> Result<Vec<(u32, BigRational)>> {
        if self.vars.len() != 2 || self.vars[1] != "s" {
            bail!(Validation, "substitution s = c d^2 needs variables (d, s), got {:?}", self.vars);
        }
        let mut out: BTreeMap<u32, BigRational> = BTreeMap::new();
        for (exps, coeff) in &self.terms {
            let power = exps[0] + 2 * exps[1];
            let value = BigRational::from_integer(BigInt::from(coeff.clone())) * c.pow(exps[1] as i32);
            *out.entry(power).or_insert_with(BigRational::zero) += value;
        }
        Ok(out
            .into_iter()
            .rev()
            .filter(|(_, v)| !v.is_zero())
            .collect())
    }

    /// Terms carrying the largest exponent of the first variable.
    pub fn leading_terms(&self) -> Vec<(Vec<u32>, BigUint)> {
        let Some(top) = self.degree_in(0) else {
            return Vec::new();
        };
        self.terms()
            .filter(|(e, _)| e[0] == top)
            .map(|(e, c)| (e.to_vec(), c.clone()))
            .collect()
    }
}

impl fmt::Debug for MomentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MomentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exps, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut factors = Vec::new();
            if !c.is_one() || exps.iter().all(|&e| e == 0) {
                factors.push(c.to_string());
            }
            for (v, &e) in self.vars.iter().zip(exps) {
                match e {
                    0 => {}
                    1 => factors.push(v.clone()),
                    _ => factors.push(format!("{v}^{e}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exps: Vec<u32>,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    vars: Vec<String>,
    terms: Vec<TermJson>,
}

impl Serialize for MomentPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson {
            vars: self.vars.clone(),
            terms: self
                .terms()
                .map(|(e, c)| TermJson {
                    exps: e.to_vec(),
                    coeff: c.to_string(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MomentPolynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = PolyJson::deserialize(deserializer)?;
        let mut poly = MomentPolynomial {
            vars: raw.vars,
            terms: BTreeMap::new(),
        };
        for t in raw.terms {
            if t.exps.len() != poly.vars.len() {
                return Err(D::Error::custom("exponent arity does not match vars"));
            }
            let c: BigUint = t.coeff.parse().map_err(D::Error::custom)?;
            if c.is_zero() {
                return Err(D::Error::custom("zero coefficients are not stored"));
            }
            poly.add_term(&t.exps, c);
        }
        Ok(poly)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(vars: &[&str], terms: &[(&[u32], u64)]) -> MomentPolynomial {
        let mut p = MomentPolynomial::zero(vars);
        for (e, c) in terms {
            p.add_term(e, BigUint::from(*c));
        }
        p
    }

    #[test]
    fn json_is_sorted_descending() {
        let p = poly(&["d"], &[(&[3], 2), (&[5], 2)]);
        assert_eq!(
            serde_json::to_string(&p).unwrap(),
            r#"{"vars":["d"],"terms":[{"exps":[5],"coeff":"2"},{"exps":[3],"coeff":"2"}]}"#
        );
        let back: MomentPolynomial = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn evaluation_and_substitution() {
        let p = poly(&["d", "s"], &[(&[2, 2], 1), (&[4, 1], 1)]);
        assert_eq!(
            p.evaluate(&[BigUint::from(3u32), BigUint::from(2u32)]).unwrap(),
            BigUint::from(36u32 + 162)
        );
        let half = BigRational::new(1.into(), 2.into());
        let sub = p.substitute_s(&half).unwrap();
        assert_eq!(sub, vec![(6, BigRational::new(3.into(), 4.into()))]);
        assert!(p.evaluate(&[BigUint::one()]).is_err());
    }

    #[test]
    fn display_and_product() {
        let p = poly(&["n"], &[(&[3], 2), (&[1], 1)]);
        assert_eq!(p.to_string(), "2*n^3 + n");
        let sq = p.mul(&p).unwrap();
        assert_eq!(sq.to_string(), "4*n^6 + 4*n^4 + n^2");
        assert_eq!(MomentPolynomial::zero(&["d"]).to_string(), "0");
    }
}
