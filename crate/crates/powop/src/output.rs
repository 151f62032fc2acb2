//! Machine-readable output schemas shared by the library and the CLI.
//!
//! Series documents look like
//! `{"p":3,"padic_precision":32,"terms":[{"exp":3,"coeff":"1"},...],"truncation_floor":-3}`
//! with coefficients as signed-minimal decimal strings: human-diffable,
//! precision-explicit, and language-neutral. Parsing an emitted document and
//! re-serializing it reproduces the bytes exactly.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{HLaurentSeries, SeriesPrecision};
use crate::padic::PadicContext;
use crate::wpoly::HPolynomial;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesTermJson {
    pub exp: i64,
    pub coeff: String,
}

/// JSON document for a Laurent series with explicit p-adic precision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub p: u64,
    pub padic_precision: u32,
    pub terms: Vec<SeriesTermJson>,
    pub truncation_floor: Option<i64>,
}

impl SeriesJson {
    pub fn from_series(series: &HLaurentSeries) -> Self {
        SeriesJson {
            p: series.context().p(),
            padic_precision: series.context().precision(),
            terms: series
                .signed_terms_desc()
                .into_iter()
                .map(|(exp, coeff)| SeriesTermJson {
                    exp,
                    coeff: coeff.to_string(),
                })
                .collect(),
            truncation_floor: series.truncation_floor(),
        }
    }

    /// Rebuild the series; the window is widened to hold every listed term.
    pub fn to_series(&self) -> Result<HLaurentSeries> {
        let ctx = PadicContext::new(self.p, self.padic_precision)?;
        let top = self.terms.iter().map(|t| t.exp).max().unwrap_or(0);
        let max_exp = top.max(2 * self.p as i64);
        let prec = match self.truncation_floor {
            Some(floor) => SeriesPrecision::with_floor(ctx, max_exp, floor)?,
            None => SeriesPrecision::new(ctx, max_exp),
        };
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let coeff = BigInt::from_str(&t.coeff)
                .map_err(|e| Error::MalformedSeries(format!("coefficient {:?}: {e}", t.coeff)))?;
            terms.push((t.exp, coeff));
        }
        Ok(HLaurentSeries::from_terms(prec, terms))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyTermJson {
    pub exp: u32,
    pub coeff: String,
}

/// Terms of an exact integer polynomial in descending exponent order.
pub fn poly_terms_json(poly: &HPolynomial) -> Vec<PolyTermJson> {
    poly.signed_terms_desc()
        .into_iter()
        .map(|(exp, coeff)| PolyTermJson {
            exp: exp as u32,
            coeff: coeff.to_string(),
        })
        .collect()
}

/// Mixed-type coefficient list for the `w_i` table: constants as JSON numbers
/// when they fit, h-dependent entries (and oversized constants) as strings.
pub fn wpoly_json_values(coeffs: &[HPolynomial]) -> serde_json::Value {
    let values: Vec<serde_json::Value> = coeffs
        .iter()
        .map(|c| {
            if c.is_constant() {
                let v = c.coefficient(0);
                match v.to_i64() {
                    Some(small) => serde_json::Value::from(small),
                    None => serde_json::Value::from(v.to_string()),
                }
            } else {
                serde_json::Value::from(c.to_string())
            }
        })
        .collect();
    serde_json::Value::from(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_json_round_trips_byte_exactly() {
        let ctx = PadicContext::new(3, 16).unwrap();
        let prec = SeriesPrecision::new(ctx, 6);
        let series = HLaurentSeries::from_terms(
            prec,
            [
                (3, BigInt::from(1)),
                (0, BigInt::from(594)),
                (-1, BigInt::from(-1158)),
            ],
        );
        let doc = SeriesJson::from_series(&series);
        let emitted = serde_json::to_string(&doc).unwrap();
        let parsed: SeriesJson = serde_json::from_str(&emitted).unwrap();
        let rebuilt = parsed.to_series().unwrap();
        let re_emitted = serde_json::to_string(&SeriesJson::from_series(&rebuilt)).unwrap();
        assert_eq!(emitted, re_emitted);
        assert_eq!(rebuilt, series);
    }

    #[test]
    fn floor_survives_round_trip() {
        let ctx = PadicContext::new(3, 8).unwrap();
        let prec = SeriesPrecision::new(ctx, 6);
        let series = HLaurentSeries::from_terms(
            prec,
            [(1, BigInt::from(5)), (-4, BigInt::from(9))],
        )
        .truncate_below(-3)
        .unwrap();
        let doc = SeriesJson::from_series(&series);
        assert_eq!(doc.truncation_floor, Some(-3));
        assert_eq!(doc.terms.len(), 1);
        let rebuilt = doc.to_series().unwrap();
        assert_eq!(rebuilt.truncation_floor(), Some(-3));
    }

    #[test]
    fn malformed_coefficient_rejected() {
        let doc = SeriesJson {
            p: 3,
            padic_precision: 4,
            terms: vec![SeriesTermJson {
                exp: 0,
                coeff: "12x".into(),
            }],
            truncation_floor: None,
        };
        assert!(matches!(doc.to_series(), Err(Error::MalformedSeries(_))));
    }

    #[test]
    fn wpoly_values_are_mixed() {
        let coeffs = crate::wpoly::w_coefficients(3).unwrap();
        let v = wpoly_json_values(&coeffs);
        assert_eq!(v.to_string(), r#"[3,"-h",12,-6,1]"#);
    }
}
