use rug::{Complex, Float};

use crate::error::{Error, Result};

/// Arbitrary-precision real scalar.
pub type BigReal = Float;
/// Arbitrary-precision complex scalar.
pub type BigComplex = Complex;

pub const MIN_BITS: u32 = 64;
pub const MIN_GUARD_BITS: u32 = 16;
pub const DEFAULT_GUARD_BITS: u32 = 32;

/// Working precision for every numeric operation.
///
/// Evaluations run at `bits + guard_bits` and results are rounded back to
/// `bits`. The context is immutable once built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    bits: u32,
    guard_bits: u32,
}

impl PrecisionContext {
    pub fn new(bits: u32) -> Result<Self> {
        Self::with_guard(bits, DEFAULT_GUARD_BITS)
    }

    pub fn with_guard(bits: u32, guard_bits: u32) -> Result<Self> {
        if bits < MIN_BITS {
            return Err(Error::InvalidArgument(format!(
                "precision must be at least {MIN_BITS} bits, got {bits}"
            )));
        }
        if guard_bits < MIN_GUARD_BITS {
            return Err(Error::InvalidArgument(format!(
                "guard bits must be at least {MIN_GUARD_BITS}, got {guard_bits}"
            )));
        }
        Ok(Self { bits, guard_bits })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn guard_bits(&self) -> u32 {
        self.guard_bits
    }

    /// Precision used for intermediate computations.
    pub fn work_prec(&self) -> u32 {
        self.bits + self.guard_bits
    }

    /// A context with `extra` more working bits and the same guard.
    pub fn raised(&self, extra: u32) -> Self {
        Self {
            bits: self.bits + extra,
            guard_bits: self.guard_bits,
        }
    }

    /// 2^{-bits} as an f64.
    pub fn eps(&self) -> f64 {
        (-(self.bits as f64)).exp2()
    }

    /// 2^{-(bits+guard)} as an f64.
    pub fn work_eps(&self) -> f64 {
        (-(self.work_prec() as f64)).exp2()
    }

    pub fn real<T>(&self, v: T) -> BigReal
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.work_prec(), v)
    }

    pub fn complex<T>(&self, v: T) -> BigComplex
    where
        Complex: rug::Assign<T>,
    {
        Complex::with_val(self.work_prec(), v)
    }

    /// Round a working-precision value back to `bits`.
    pub fn round(&self, z: &BigComplex) -> BigComplex {
        Complex::with_val(self.bits, z)
    }

    pub fn round_real(&self, x: &BigReal) -> BigReal {
        Float::with_val(self.bits, x)
    }

    pub fn pi(&self) -> BigReal {
        Float::with_val(self.work_prec(), rug::float::Constant::Pi)
    }
}

/// A value together with an estimate of its absolute error.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub abs_err: f64,
}

impl<T> Estimate<T> {
    pub fn new(value: T, abs_err: f64) -> Self {
        Self { value, abs_err }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Estimate<U> {
        Estimate {
            value: f(self.value),
            abs_err: self.abs_err,
        }
    }
}

impl Estimate<BigComplex> {
    /// Relative error, `abs_err / |value|` (infinite for a zero value).
    pub fn rel_err(&self) -> f64 {
        let m = abs_f64(&self.value);
        if m == 0.0 {
            f64::INFINITY
        } else {
            self.abs_err / m
        }
    }
}

/// |z| as an f64. Saturates to ±inf/0 outside the f64 exponent range.
pub fn abs_f64(z: &BigComplex) -> f64 {
    Float::with_val(64, z.abs_ref()).to_f64()
}

/// log2 |z|, valid far beyond the f64 exponent range.
pub fn log2_abs(z: &BigComplex) -> f64 {
    let a = Float::with_val(64, z.abs_ref());
    if a.is_zero() {
        return f64::NEG_INFINITY;
    }
    a.log2().to_f64()
}

pub(crate) fn check_finite(z: &BigComplex, what: &str) -> Result<()> {
    if z.real().is_finite() && z.imag().is_finite() {
        Ok(())
    } else {
        Err(Error::Precision(format!("{what} produced a non-finite value")))
    }
}

/// Parse a decimal string at the given precision.
pub fn parse_real(s: &str, prec: u32) -> Result<BigReal> {
    Float::parse(s.trim())
        .map(|p| Float::with_val(prec, p))
        .map_err(|e| Error::InvalidArgument(format!("bad number {s:?}: {e}")))
}

/// Decimal rendering carrying all `bits` of the value.
pub fn to_decimal(x: &BigReal) -> String {
    let digits = (x.prec() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1;
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(digits))
}
