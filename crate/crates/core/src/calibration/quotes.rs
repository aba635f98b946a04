use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Instrument classes that can be quoted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QuoteKind {
    /// Dividend futures on `[expiry, tenor_or_T2]`, quoted as a price.
    DivFuture,
    /// Spot or forward starting par swap rate with annual fixed payments.
    SwapRate,
    /// Payer swaption, Bachelier volatility.
    SwaptionNormalVol,
    /// Call on the dividends paid over `[expiry, tenor_or_T2]`, Black volatility.
    DivOptionBlackVol,
    /// Call on the fundamental stock, Black-Scholes volatility.
    StockOptionBsVol,
    /// Fundamental stock price.
    IndexLevel,
}

impl QuoteKind {
    pub const ALL: [QuoteKind; 6] = [
        QuoteKind::DivFuture,
        QuoteKind::SwapRate,
        QuoteKind::SwaptionNormalVol,
        QuoteKind::DivOptionBlackVol,
        QuoteKind::StockOptionBsVol,
        QuoteKind::IndexLevel,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QuoteKind::DivFuture => "div_future",
            QuoteKind::SwapRate => "swap_rate",
            QuoteKind::SwaptionNormalVol => "swaption_normal_vol",
            QuoteKind::DivOptionBlackVol => "div_option_black_vol",
            QuoteKind::StockOptionBsVol => "stock_option_bs_vol",
            QuoteKind::IndexLevel => "index_level",
        }
    }

    /// Error measure natural to the class: relative for prices, absolute
    /// for rates and volatilities.
    pub fn relative(self) -> bool {
        matches!(self, QuoteKind::DivFuture | QuoteKind::IndexLevel)
    }

    pub fn is_option(self) -> bool {
        matches!(
            self,
            QuoteKind::SwaptionNormalVol | QuoteKind::DivOptionBlackVol | QuoteKind::StockOptionBsVol
        )
    }

    /// Unit in which absolute errors are measured: one basis point for rates
    /// and normal vols, one vol point for Black vols.
    pub fn unit(self) -> f64 {
        match self {
            QuoteKind::SwapRate | QuoteKind::SwaptionNormalVol => 1e-4,
            QuoteKind::DivOptionBlackVol | QuoteKind::StockOptionBsVol => 1e-2,
            QuoteKind::DivFuture | QuoteKind::IndexLevel => 1.0,
        }
    }
}

impl fmt::Display for QuoteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QuoteKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        QuoteKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown quote kind '{s}'")))
    }
}

/// One market quote.
#[derive(Debug, Clone, PartialEq)]
pub struct InstrumentQuote {
    pub kind: QuoteKind,
    pub expiry: f64,
    /// Second date (`T2`) for dividend products, tenor for swaps.
    pub tenor_or_t2: f64,
    /// `None` is at the money.
    pub strike: Option<f64>,
    pub value: f64,
    /// `None` selects [`InstrumentQuote::default_weight`].
    pub weight: Option<f64>,
}

impl InstrumentQuote {
    pub fn new(kind: QuoteKind, expiry: f64, tenor_or_t2: f64, strike: Option<f64>, value: f64) -> Self {
        InstrumentQuote {
            kind,
            expiry,
            tenor_or_t2,
            strike,
            value,
            weight: None,
        }
    }

    /// Weight that makes one unit of error count the same in every class:
    /// `1/(0.01 F)²` for relative classes, so that one percent weighs as
    /// much as one basis point, and `1/unit²` otherwise.
    pub fn default_weight(&self) -> f64 {
        let s = if self.kind.relative() { 0.01 * self.value.abs() } else { self.kind.unit() };
        1.0 / (s * s).max(f64::MIN_POSITIVE)
    }

    pub fn effective_weight(&self) -> f64 {
        self.weight.unwrap_or_else(|| self.default_weight())
    }

    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(format!("{} quote: {m}", self.kind)));
        if !self.value.is_finite() {
            return bad("value must be finite");
        }
        if self.weight.is_some_and(|w| !(w.is_finite() && w >= 0.0)) {
            return bad("weight must be finite and non-negative");
        }
        if self.strike.is_some_and(|k| !k.is_finite()) {
            return bad("strike must be finite");
        }
        match self.kind {
            QuoteKind::DivFuture | QuoteKind::DivOptionBlackVol => {
                if !(self.expiry >= 0.0 && self.tenor_or_t2 > self.expiry) {
                    return bad("need 0 <= T1 < T2");
                }
            }
            QuoteKind::SwapRate => {
                if !(self.expiry >= 0.0 && self.tenor_or_t2 > 0.0) {
                    return bad("need start >= 0 and tenor > 0");
                }
            }
            QuoteKind::SwaptionNormalVol => {
                if !(self.expiry > 0.0 && self.tenor_or_t2 > 0.0) {
                    return bad("need expiry > 0 and tenor > 0");
                }
            }
            QuoteKind::StockOptionBsVol => {
                if !(self.expiry > 0.0) {
                    return bad("need expiry > 0");
                }
            }
            QuoteKind::IndexLevel => {}
        }
        if self.kind.is_option() && !(self.value > 0.0) {
            return bad("volatility must be positive");
        }
        Ok(())
    }
}

fn number(field: &str, what: &str, line: usize) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: bad {what} '{field}'")))
}

fn optional(field: &str, what: &str, line: usize, none: &[&str]) -> Result<Option<f64>> {
    let f = field.trim();
    if none.iter().any(|n| f.eq_ignore_ascii_case(n)) {
        Ok(None)
    } else {
        number(f, what, line).map(Some)
    }
}

pub const QUOTE_HEADER: [&str; 6] = ["kind", "expiry", "tenor_or_T2", "strike", "value", "weight"];

/// Reads a quote CSV with header `kind,expiry,tenor_or_T2,strike,value,weight`.
///
/// `strike` may be `atm` or empty; `weight` may be empty for the default.
pub fn read_quotes<R: Read>(r: R) -> Result<Vec<InstrumentQuote>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(r);
    let header = rdr.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != QUOTE_HEADER {
        return Err(Error::Parse(format!(
            "quote header must be '{}', got '{}'",
            QUOTE_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let q = InstrumentQuote {
            kind: rec[0].parse()?,
            expiry: number(&rec[1], "expiry", line)?,
            tenor_or_t2: number(&rec[2], "tenor_or_T2", line)?,
            strike: optional(&rec[3], "strike", line, &["", "atm"])?,
            value: number(&rec[4], "value", line)?,
            weight: optional(&rec[5], "weight", line, &[""])?,
        };
        q.check().map_err(|e| Error::Parse(format!("line {line}: {e}")))?;
        out.push(q);
    }
    Ok(out)
}

pub fn write_quotes<W: Write>(w: W, quotes: &[InstrumentQuote]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Io(e.to_string());
    wr.write_record(QUOTE_HEADER).map_err(io)?;
    for q in quotes {
        wr.write_record([
            q.kind.name().to_string(),
            format!("{:?}", q.expiry),
            format!("{:?}", q.tenor_or_t2),
            match (q.strike, q.kind.is_option()) {
                (Some(k), _) => format!("{k:?}"),
                (None, true) => "atm".into(),
                (None, false) => String::new(),
            },
            format!("{:?}", q.value),
            q.weight.map_or(String::new(), |w| format!("{w:?}")),
        ])
        .map_err(io)?;
    }
    wr.flush().map_err(Error::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let mut qs = vec![
            InstrumentQuote::new(QuoteKind::DivFuture, 1.0, 2.0, None, 1.2345),
            InstrumentQuote::new(QuoteKind::SwaptionNormalVol, 1.0, 5.0, Some(0.021), 0.0062),
        ];
        qs[1].weight = Some(3.0);
        let mut buf = Vec::new();
        write_quotes(&mut buf, &qs).unwrap();
        assert_eq!(read_quotes(buf.as_slice()).unwrap(), qs);
    }

    #[test]
    fn rejects_bad_rows() {
        let text = "kind,expiry,tenor_or_T2,strike,value,weight\ndiv_future,2,1,,1.0,\n";
        assert!(matches!(read_quotes(text.as_bytes()), Err(Error::Parse(_))));
        let text = "kind,expiry,tenor_or_T2,strike,value,weight\nbond,2,1,,1.0,\n";
        assert!(read_quotes(text.as_bytes()).is_err());
    }
}
