use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fock::{gaussian_state, C64};

fn gcd(mut a: i64, mut b: i64) -> i64 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Exact reduced rational `p/q` with `q >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fraction {
    p: i64,
    q: i64,
}

impl Fraction {
    pub const ZERO: Fraction = Fraction { p: 0, q: 1 };

    pub fn new(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidParameter("fraction denominator must be non-zero".into()));
        }
        let sign = if q < 0 { -1 } else { 1 };
        let (p, q) = (p * sign, q * sign);
        if p == 0 {
            return Ok(Self::ZERO);
        }
        let g = gcd(p, q);
        Ok(Self { p: p / g, q: q / g })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn is_zero(&self) -> bool {
        self.p == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.p as f64 / self.q as f64
    }

    pub fn neg(&self) -> Fraction {
        Fraction { p: -self.p, q: self.q }
    }

    pub fn sub(&self, other: &Fraction) -> Fraction {
        Fraction::new(self.p * other.q - other.p * self.q, self.q * other.q).expect("non-zero denominator")
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

impl FromStr for Fraction {
    type Err = Error;

    /// Parses `"p/q"` or a bare integer `"p"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("cannot parse fraction {s:?}"));
        let s = s.trim();
        match s.split_once('/') {
            Some((p, q)) => {
                let p: i64 = p.trim().parse().map_err(|_| bad())?;
                let q: i64 = q.trim().parse().map_err(|_| bad())?;
                if p.unsigned_abs() > 1 << 31 || q.unsigned_abs() > 1 << 31 {
                    return Err(bad());
                }
                Fraction::new(p, q)
            }
            None => {
                let p: i64 = s.parse().map_err(|_| bad())?;
                if p.unsigned_abs() > 1 << 31 {
                    return Err(bad());
                }
                Fraction::new(p, 1)
            }
        }
    }
}

/// Phase `-pi f N^2 / (2 s^2)` of the interface factor on `|N>`, reduced
/// exactly with integer arithmetic before the single float conversion.
pub(crate) fn interface_angle(f: &Fraction, s: u32, n: usize) -> f64 {
    let period = 4 * f.q as i128 * (s as i128) * (s as i128);
    let x = (f.p as i128 * (n as i128) * (n as i128)).rem_euclid(period);
    -PI * x as f64 / (2.0 * f.q as f64 * (s as f64) * (s as f64))
}

/// Fock amplitudes `theta_n` of a finite-energy code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AmplitudeSpec {
    /// `theta_n = sqrt(2^-K C(K, n))`, `n in [0, K]`.
    Binomial { k: u32 },
    /// `theta_n = <n | alpha, r>` with `|alpha, r> = D(alpha) S(r) |0>`.
    Gaussian { alpha: C64, r: C64 },
}

impl AmplitudeSpec {
    pub fn gaussian_real(alpha: f64, r: f64) -> Self {
        Self::Gaussian { alpha: C64::new(alpha, 0.0), r: C64::new(r, 0.0) }
    }

    /// Amplitudes with a trimmed `< 1e-15` tail, renormalized, first non-zero
    /// entry real and positive.
    pub fn amplitudes(&self) -> Result<Vec<C64>> {
        let mut theta = match *self {
            AmplitudeSpec::Binomial { k } => binomial_amplitudes(k),
            AmplitudeSpec::Gaussian { alpha, r } => gaussian_amplitudes(alpha, r)?,
        };
        trim_and_fix_phase(&mut theta);
        Ok(theta)
    }

    /// Mean of `n` under `|theta_n|^2` without building the amplitudes.
    pub fn mean_index(&self) -> f64 {
        match *self {
            AmplitudeSpec::Binomial { k } => k as f64 / 2.0,
            AmplitudeSpec::Gaussian { alpha, r } => alpha.norm_sqr() + r.norm().sinh().powi(2),
        }
    }
}

fn binomial_amplitudes(k: u32) -> Vec<C64> {
    let k_f = k as f64;
    let mut ln_c = 0.0f64;
    (0..=k)
        .map(|n| {
            if n > 0 {
                ln_c += ((k_f - n as f64 + 1.0) / n as f64).ln();
            }
            C64::new((0.5 * (ln_c - k_f * std::f64::consts::LN_2)).exp(), 0.0)
        })
        .collect()
}

fn gaussian_amplitudes(alpha: C64, r: C64) -> Result<Vec<C64>> {
    let rr = r.norm();
    let mean = alpha.norm_sqr() + rr.sinh().powi(2);
    let var = alpha.norm_sqr() * (2.0 * rr).exp() + 2.0 * (rr.sinh() * rr.cosh()).powi(2);
    let mut dim = (mean + 10.0 * var.sqrt() + 24.0).ceil() as usize;
    loop {
        match gaussian_state(alpha, r, dim) {
            Ok(state) => return Ok(state.as_slice().to_vec()),
            Err(Error::TruncationInsufficient { .. }) if dim < 4096 => dim *= 2,
            Err(e) => return Err(e),
        }
    }
}

fn trim_and_fix_phase(theta: &mut Vec<C64>) {
    let mut tail = 0.0;
    let mut keep = theta.len();
    while keep > 1 {
        let next = tail + theta[keep - 1].norm_sqr();
        if next >= 1e-15 {
            break;
        }
        tail = next;
        keep -= 1;
    }
    theta.truncate(keep);
    let norm = theta.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let lead = theta.iter().find(|z| z.norm() > 1e-12 * norm).copied().unwrap_or(C64::new(1.0, 0.0));
    let fix = lead.conj() / (lead.norm() * norm);
    for z in theta.iter_mut() {
        *z *= fix;
    }
}

/// Broad lattice family of a code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeKind {
    /// `f = 0`.
    Rectangular,
    /// `s = 1`, `f != 0`.
    Oblique,
    /// `s > 1`, `f = 1/2`.
    Diamond,
    /// Any other `s > 1`, `f != 0`.
    Sheared,
}

/// Gauge parameters `(s, f)` and amplitudes of one NP code.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeParams {
    pub s: u32,
    pub f: Fraction,
    pub amplitude: AmplitudeSpec,
    /// Fock truncation; `None` picks one from the amplitude support.
    pub dim: Option<usize>,
}

impl CodeParams {
    pub fn new(s: u32, f: Fraction, amplitude: AmplitudeSpec) -> Result<Self> {
        if s == 0 {
            return Err(Error::InvalidParameter("rotation parameter s must be >= 1".into()));
        }
        if f.p().abs() >= f.q() {
            return Err(Error::InvalidParameter(format!("|f| = |{f}| must be < 1")));
        }
        Ok(Self { s, f, amplitude, dim: None })
    }

    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = Some(dim);
        self
    }

    /// Number distance `q s`.
    pub fn d_n(&self) -> i64 {
        self.f.q() * self.s as i64
    }

    /// Phase distance `pi / s`.
    pub fn d_phi(&self) -> f64 {
        PI / self.s as f64
    }

    /// `f pi / s`.
    pub fn shear_angle(&self) -> f64 {
        PI * self.f.p() as f64 / (self.f.q() as f64 * self.s as f64)
    }

    pub fn kind(&self) -> LatticeKind {
        match (self.s, self.f) {
            (_, f) if f.is_zero() => LatticeKind::Rectangular,
            (1, _) => LatticeKind::Oblique,
            (_, f) if f.p() == 1 && f.q() == 2 => LatticeKind::Diamond,
            _ => LatticeKind::Sheared,
        }
    }

    /// Short label: `rnp`, `onp`, `dnp` or `np`.
    pub fn kind_label(&self) -> &'static str {
        match self.kind() {
            LatticeKind::Rectangular => "rnp",
            LatticeKind::Oblique => "onp",
            LatticeKind::Diamond => "dnp",
            LatticeKind::Sheared => "np",
        }
    }

    /// `n_bar_code = s sum n |theta_n|^2`, from the amplitude family directly.
    pub fn nominal_nbar(&self) -> f64 {
        self.s as f64 * self.amplitude.mean_index()
    }
}
