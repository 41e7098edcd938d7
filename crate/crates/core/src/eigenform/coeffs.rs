use std::fmt::Write as _;
use std::path::Path;

use rug::{Assign, Complex, Float, Integer};

use super::spec::EigenformSpec;
use crate::error::{Error, Result};
use crate::numerics::{parse_real, BigComplex};

/// Largest n_max accepted by [`delta_coefficients`].
pub const DEFAULT_MAX_COEFFS: usize = 2_000_000;

/// A single Fourier coefficient: exact where possible, decimal otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coefficient {
    Exact(Integer),
    Decimal { re: String, im: Option<String> },
}

impl Coefficient {
    pub fn as_integer(&self) -> Option<&Integer> {
        match self {
            Coefficient::Exact(v) => Some(v),
            Coefficient::Decimal { .. } => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coefficient::Exact(v) => v.is_zero(),
            Coefficient::Decimal { .. } => self.to_complex(64).is_zero(),
        }
    }

    pub fn to_complex(&self, prec: u32) -> BigComplex {
        match self {
            Coefficient::Exact(v) => Complex::with_val(prec, v),
            Coefficient::Decimal { re, im } => {
                let r = parse_real(re, prec).unwrap_or_else(|_| Float::with_val(prec, f64::NAN));
                let i = im
                    .as_deref()
                    .map(|s| parse_real(s, prec).unwrap_or_else(|_| Float::with_val(prec, f64::NAN)))
                    .unwrap_or_else(|| Float::new(prec));
                Complex::with_val(prec, (r, i))
            }
        }
    }

    fn render(&self) -> String {
        match self {
            Coefficient::Exact(v) => v.to_string(),
            Coefficient::Decimal { re, im: None } => re.clone(),
            Coefficient::Decimal { re, im: Some(im) } => format!("{re} {im}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientSource {
    EtaProduct,
    File,
}

/// a_1, ..., a_{n_max}. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientTable {
    coeffs: Vec<Coefficient>,
    source: CoefficientSource,
}

impl CoefficientTable {
    pub fn new(coeffs: Vec<Coefficient>, source: CoefficientSource) -> Result<Self> {
        match coeffs.first() {
            None => return Err(Error::InvalidArgument("empty coefficient table".into())),
            Some(a1) => {
                let one = match a1 {
                    Coefficient::Exact(v) => *v == 1,
                    Coefficient::Decimal { .. } => {
                        let z = a1.to_complex(256);
                        *z.real() == 1 && z.imag().is_zero()
                    }
                };
                if !one {
                    return Err(Error::Normalization(format!("a_1 must be 1, got {}", a1.render())));
                }
            }
        }
        Ok(Self { coeffs, source })
    }

    pub fn from_integers(values: &[i64]) -> Result<Self> {
        Self::new(
            values.iter().map(|&v| Coefficient::Exact(Integer::from(v))).collect(),
            CoefficientSource::File,
        )
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len()
    }

    pub fn source(&self) -> CoefficientSource {
        self.source
    }

    /// a_n for 1 ≤ n ≤ n_max.
    pub fn get(&self, n: usize) -> &Coefficient {
        &self.coeffs[n - 1]
    }

    pub fn coefficients(&self) -> &[Coefficient] {
        &self.coeffs
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs.iter().all(|c| c.as_integer().is_some())
    }

    /// Exact values when every entry is an integer.
    pub fn integers(&self) -> Option<Vec<Integer>> {
        self.coeffs.iter().map(|c| c.as_integer().cloned()).collect()
    }

    pub fn to_complex(&self, prec: u32) -> Vec<BigComplex> {
        self.coeffs.iter().map(|c| c.to_complex(prec)).collect()
    }

    /// A copy with a_n replaced, for fault injection in consistency checks.
    pub fn with_entry(&self, n: usize, value: Coefficient) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs[n - 1] = value;
        Self {
            coeffs,
            source: CoefficientSource::File,
        }
    }

    /// The first `n` coefficients.
    pub fn truncated(&self, n: usize) -> Self {
        Self {
            coeffs: self.coeffs[..n.min(self.coeffs.len())].to_vec(),
            source: self.source,
        }
    }
}

/// ∏_{m≥1}(1 − q^m) to degree n by Euler's pentagonal number theorem.
fn euler_function(n: usize) -> Vec<i8> {
    let mut p = vec![0i8; n + 1];
    p[0] = 1;
    let mut k: i64 = 1;
    loop {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let g1 = (k * (3 * k - 1) / 2) as usize;
        let g2 = (k * (3 * k + 1) / 2) as usize;
        if g1 > n {
            break;
        }
        p[g1] = sign;
        if g2 <= n {
            p[g2] = sign;
        }
        k += 1;
    }
    p
}

/// τ(1), ..., τ(n_max) from q·∏(1 − q^m)^24.
pub fn delta_coefficients(n_max: usize) -> Result<CoefficientTable> {
    delta_coefficients_with_budget(n_max, DEFAULT_MAX_COEFFS)
}

pub fn delta_coefficients_with_budget(n_max: usize, budget: usize) -> Result<CoefficientTable> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    if n_max > budget {
        return Err(Error::Resource(format!(
            "n_max = {n_max} exceeds the coefficient budget {budget}"
        )));
    }
    // F = P^24 with P·F' = 24·P'·F, i.e.
    // n f_n = Σ_{j=1}^{n} (25 j − n) p_j f_{n−j}; P is sparse.
    let deg = n_max - 1;
    let p = euler_function(deg);
    let support: Vec<usize> = (1..=deg).filter(|&j| p[j] != 0).collect();
    let mut f: Vec<Integer> = Vec::with_capacity(deg + 1);
    f.push(Integer::from(1));
    let mut acc = Integer::new();
    for n in 1..=deg {
        acc.assign(0);
        for &j in support.iter().take_while(|&&j| j <= n) {
            let w = (25 * j as i64 - n as i64) * p[j] as i64;
            acc += Integer::from(&f[n - j] * w);
        }
        f.push(Integer::from(acc.div_exact_ref(&Integer::from(n))));
    }
    Ok(CoefficientTable {
        coeffs: f.into_iter().map(Coefficient::Exact).collect(),
        source: CoefficientSource::EtaProduct,
    })
}

fn parse_value(tok: &str, line: usize) -> Result<(bool, String)> {
    if let Ok(v) = tok.parse::<Integer>() {
        return Ok((true, v.to_string()));
    }
    parse_real(tok, 64).map_err(|_| Error::Parse {
        line,
        msg: format!("bad coefficient {tok:?}"),
    })?;
    Ok((false, tok.to_string()))
}

/// Parse the "n value [imag]" format; '#' starts a comment.
pub fn parse_coefficients(text: &str) -> Result<CoefficientTable> {
    let mut coeffs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        if toks.len() < 2 || toks.len() > 3 {
            return Err(Error::Parse {
                line,
                msg: format!("expected \"n value\", got {body:?}"),
            });
        }
        let n: usize = toks[0].parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad index {:?}", toks[0]),
        })?;
        if n != coeffs.len() + 1 {
            return Err(Error::Parse {
                line,
                msg: format!("expected index {}, got {n}", coeffs.len() + 1),
            });
        }
        let (exact, re) = parse_value(toks[1], line)?;
        let im = match toks.get(2) {
            Some(t) => Some(parse_value(t, line)?.1),
            None => None,
        };
        let c = match (exact, im) {
            (true, None) => Coefficient::Exact(re.parse().expect("validated integer")),
            (_, im) => Coefficient::Decimal { re, im },
        };
        coeffs.push(c);
    }
    if coeffs.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "no coefficients".into(),
        });
    }
    CoefficientTable::new(coeffs, CoefficientSource::File)
}

pub fn load_coefficients(path: &Path, spec: &EigenformSpec) -> Result<CoefficientTable> {
    let text = std::fs::read_to_string(path)?;
    if let Some(header) = text.lines().next().and_then(CacheHeader::parse) {
        if !header.matches(spec) {
            return Err(Error::InvalidArgument(format!(
                "{} holds coefficients for k={} C={} P={}",
                path.display(),
                header.weight,
                header.level,
                header.sign_exponent
            )));
        }
    }
    parse_coefficients(&text)
}

/// Header line of a cached coefficient file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CacheHeader {
    pub weight: u32,
    pub level: u64,
    pub sign_exponent: u8,
    pub n_max: usize,
}

impl CacheHeader {
    pub fn for_table(spec: &EigenformSpec, table: &CoefficientTable) -> Self {
        Self {
            weight: spec.weight(),
            level: spec.level(),
            sign_exponent: spec.sign_exponent(),
            n_max: table.n_max(),
        }
    }

    pub fn parse(line: &str) -> Option<Self> {
        let rest = line.trim().strip_prefix('#')?.trim().strip_prefix("eigenform")?;
        let mut h = (None, None, None, None);
        for kv in rest.split_whitespace() {
            let (k, v) = kv.split_once('=')?;
            match k {
                "k" => h.0 = v.parse().ok(),
                "C" => h.1 = v.parse().ok(),
                "P" => h.2 = v.parse().ok(),
                "nmax" => h.3 = v.parse().ok(),
                _ => return None,
            }
        }
        Some(Self {
            weight: h.0?,
            level: h.1?,
            sign_exponent: h.2?,
            n_max: h.3?,
        })
    }

    pub fn matches(&self, spec: &EigenformSpec) -> bool {
        self.weight == spec.weight() && self.level == spec.level() && self.sign_exponent == spec.sign_exponent()
    }

    pub fn render(&self) -> String {
        format!(
            "# eigenform k={} C={} P={} nmax={}",
            self.weight, self.level, self.sign_exponent, self.n_max
        )
    }
}

pub fn format_coefficients(table: &CoefficientTable, spec: &EigenformSpec) -> String {
    let mut out = CacheHeader::for_table(spec, table).render();
    out.push('\n');
    for (i, c) in table.coefficients().iter().enumerate() {
        let _ = writeln!(out, "{} {}", i + 1, c.render());
    }
    out
}

pub fn write_coefficients(path: &Path, table: &CoefficientTable, spec: &EigenformSpec) -> Result<()> {
    std::fs::write(path, format_coefficients(table, spec))?;
    Ok(())
}

/// Reads a cached table if its header matches `spec` and covers `n_max`.
pub fn read_cached(path: &Path, spec: &EigenformSpec, n_max: usize) -> Option<CoefficientTable> {
    let text = std::fs::read_to_string(path).ok()?;
    let header = CacheHeader::parse(text.lines().next()?)?;
    if !header.matches(spec) || header.n_max < n_max {
        return None;
    }
    let table = parse_coefficients(&text).ok()?;
    (table.n_max() >= n_max).then(|| table.truncated(n_max))
}
