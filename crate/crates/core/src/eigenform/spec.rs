use rug::{Complex, Float};

use crate::arith::gcd;
use crate::error::{Error, Result};
use crate::numerics::{abs_f64, BigComplex, PrecisionContext};

/// Nebentypus values indexed by residue mod the level.
///
/// Each unit residue carries an exact angle j/m with χ(r) = e^{2πi j/m}, so
/// unit modulus and multiplicativity hold exactly at every precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Character {
    modulus: u64,
    angles: Vec<Option<(u64, u64)>>,
}

fn reduce(j: u64, m: u64) -> (u64, u64) {
    let j = j % m;
    let g = gcd(j, m).max(1);
    (j / g, m / g)
}

impl Character {
    /// The principal character mod `modulus`.
    pub fn trivial(modulus: u64) -> Self {
        let modulus = modulus.max(1);
        let angles = (0..modulus).map(|r| (gcd(r, modulus) == 1).then_some((0, 1))).collect();
        Self { modulus, angles }
    }

    /// A character from exact angles; `None` marks χ(r) = 0.
    ///
    /// Angles must be present exactly on residues coprime to the modulus and
    /// the table must be multiplicative.
    pub fn from_angles(modulus: u64, angles: Vec<Option<(u64, u64)>>) -> Result<Self> {
        if modulus == 0 || angles.len() as u64 != modulus {
            return Err(Error::InvalidArgument(format!(
                "character table needs {modulus} values, got {}",
                angles.len()
            )));
        }
        let mut reduced = Vec::with_capacity(angles.len());
        for (r, a) in angles.into_iter().enumerate() {
            let coprime = gcd(r as u64, modulus) == 1;
            match (coprime, a) {
                (true, Some((_, 0))) => return Err(Error::InvalidArgument(format!("χ({r}) has a zero denominator"))),
                (true, Some((j, m))) => reduced.push(Some(reduce(j, m))),
                (true, None) => {
                    return Err(Error::InvalidArgument(format!(
                        "χ({r}) must be a unit since gcd({r}, {modulus}) = 1"
                    )))
                }
                (false, None) => reduced.push(None),
                (false, Some(_)) => {
                    return Err(Error::InvalidArgument(format!(
                        "χ({r}) must vanish since gcd({r}, {modulus}) > 1"
                    )))
                }
            }
        }
        let chi = Self {
            modulus,
            angles: reduced,
        };
        for a in 0..modulus {
            for b in a..modulus {
                let lhs = match (chi.angle(a), chi.angle(b)) {
                    (Some((j1, m1)), Some((j2, m2))) => Some(reduce(j1 * m2 + j2 * m1, m1 * m2)),
                    _ => None,
                };
                if lhs != chi.angle(a * b) {
                    return Err(Error::InvalidArgument(format!("χ is not multiplicative at ({a}, {b})")));
                }
            }
        }
        Ok(chi)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The reduced angle j/m of χ(n), or None when χ(n) = 0.
    pub fn angle(&self, n: u64) -> Option<(u64, u64)> {
        self.angles[(n % self.modulus) as usize]
    }

    /// χ(n) when it is an integer (0 or ±1).
    pub fn exact_value(&self, n: u64) -> Option<i64> {
        match self.angle(n) {
            None => Some(0),
            Some((0, _)) => Some(1),
            Some((1, 2)) => Some(-1),
            _ => None,
        }
    }

    pub fn is_trivial(&self) -> bool {
        *self == Self::trivial(self.modulus)
    }

    pub fn is_real(&self) -> bool {
        (0..self.modulus).all(|r| self.exact_value(r).is_some())
    }

    pub fn complex(&self, n: u64, prec: u32) -> BigComplex {
        match self.angle(n) {
            None => Complex::with_val(prec, 0),
            Some((j, m)) => {
                let theta = Float::with_val(prec, rug::float::Constant::Pi) * 2u32 * j / m;
                Complex::with_val(prec, (theta.clone().cos(), theta.sin()))
            }
        }
    }

    /// |χ(n)| = 1 on units, checked numerically at the context tolerance.
    pub fn check_unitary(&self, ctx: &PrecisionContext) -> Result<()> {
        let tol = 2f64.powi(-(ctx.bits() as i32) + 8);
        for r in 0..self.modulus {
            if gcd(r, self.modulus) == 1 {
                let m = abs_f64(&self.complex(r, ctx.work_prec()));
                if (m - 1.0).abs() > tol {
                    return Err(Error::Tolerance(format!("|χ({r})| = {m}")));
                }
            }
        }
        Ok(())
    }
}

/// Identifies the L-function: weight, level, functional-equation sign
/// exponent and nebentypus.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenformSpec {
    weight: u32,
    level: u64,
    sign_exponent: u8,
    chi: Character,
}

impl EigenformSpec {
    pub fn new(weight: u32, level: u64, sign_exponent: u8) -> Result<Self> {
        Self::with_character(weight, level, sign_exponent, Character::trivial(level))
    }

    pub fn with_character(weight: u32, level: u64, sign_exponent: u8, chi: Character) -> Result<Self> {
        if weight == 0 || !weight.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "weight must be a positive even integer, got {weight}"
            )));
        }
        if level == 0 {
            return Err(Error::InvalidArgument("level must be positive".into()));
        }
        if sign_exponent > 1 {
            return Err(Error::InvalidArgument(format!(
                "sign exponent must be 0 or 1, got {sign_exponent}"
            )));
        }
        if chi.modulus() != level {
            return Err(Error::InvalidArgument(format!(
                "character modulus {} does not match level {level}",
                chi.modulus()
            )));
        }
        Ok(Self {
            weight,
            level,
            sign_exponent,
            chi,
        })
    }

    /// The modular discriminant Δ: weight 12, level 1, even sign.
    pub fn delta() -> Self {
        Self::new(12, 1, 0).expect("valid spec")
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn sign_exponent(&self) -> u8 {
        self.sign_exponent
    }

    /// (-1)^P
    pub fn sign(&self) -> i32 {
        if self.sign_exponent == 0 {
            1
        } else {
            -1
        }
    }

    pub fn chi(&self) -> &Character {
        &self.chi
    }

    /// Real part of the critical line, k/2.
    pub fn center(&self) -> f64 {
        self.weight as f64 / 2.0
    }
}
