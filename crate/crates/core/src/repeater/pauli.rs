use nalgebra::Matrix4;

use crate::fock::C64;
use crate::qec::LogicalChannel;

/// Single-qubit Pauli channel with probabilities in the order `I, X, Y, Z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliChannel {
    pub p: [f64; 4],
}

/// `(x, z)` bits of `I, X, Y, Z`.
const BITS: [(u8, u8); 4] = [(0, 0), (1, 0), (1, 1), (0, 1)];

fn index(bits: (u8, u8)) -> usize {
    BITS.iter().position(|&b| b == bits).expect("valid Pauli bits")
}

fn pauli_matrix(idx: usize) -> [[C64; 2]; 2] {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match idx {
        0 => [[one, z], [z, one]],
        1 => [[z, one], [one, z]],
        2 => [[z, -i], [i, z]],
        _ => [[one, z], [z, -one]],
    }
}

impl PauliChannel {
    pub const PERFECT: PauliChannel = PauliChannel { p: [1.0, 0.0, 0.0, 0.0] };

    /// `p_X + p_Y`: flips seen by a Z-basis measurement.
    pub fn qber_z(&self) -> f64 {
        self.p[1] + self.p[2]
    }

    /// `p_Z + p_Y`: flips seen by an X-basis measurement.
    pub fn qber_x(&self) -> f64 {
        self.p[3] + self.p[2]
    }

    /// Channel `self` followed by `next`.
    pub fn then(&self, next: &PauliChannel) -> PauliChannel {
        let mut p = [0.0; 4];
        for (a, pa) in self.p.iter().enumerate() {
            for (b, pb) in next.p.iter().enumerate() {
                let (xa, za) = BITS[a];
                let (xb, zb) = BITS[b];
                p[index((xa ^ xb, za ^ zb))] += pa * pb;
            }
        }
        PauliChannel { p }
    }

    /// `n` identical hops.
    pub fn repeated(&self, n: u64) -> PauliChannel {
        let mut acc = PauliChannel::PERFECT;
        let mut base = *self;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.then(&base);
            }
            base = base.then(&base);
            k >>= 1;
        }
        acc
    }

    /// Process matrix in the `LogicalChannel` layout.
    pub fn process(&self) -> Matrix4<C64> {
        let mut out = Matrix4::zeros();
        for (idx, &w) in self.p.iter().enumerate() {
            let pm = pauli_matrix(idx);
            for mu in 0..2 {
                for nu in 0..2 {
                    for a in 0..2 {
                        for b in 0..2 {
                            out[(a * 2 + b, mu * 2 + nu)] += pm[a][mu] * pm[b][nu].conj() * w;
                        }
                    }
                }
            }
        }
        out
    }
}

/// Pauli twirl of a process matrix: `p_P = 1/4 sum_{mu nu} (P E(|mu><nu|) P)_{mu nu}`.
pub fn twirl_process(process: &Matrix4<C64>) -> PauliChannel {
    let mut p = [0.0; 4];
    for (idx, slot) in p.iter_mut().enumerate() {
        let pm = pauli_matrix(idx);
        let mut acc = C64::new(0.0, 0.0);
        for mu in 0..2 {
            for nu in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        // (P^dag E P)_{mu nu} = sum_ab conj(P_{a mu}) E_ab P_{b nu}
                        acc += pm[a][mu].conj() * process[(a * 2 + b, mu * 2 + nu)] * pm[b][nu];
                    }
                }
            }
        }
        *slot = acc.re / 4.0;
    }
    PauliChannel { p }
}

/// Twirl with leaked weight charged to `Y`, which corrupts both bases.
pub fn pauli_twirl(lc: &LogicalChannel) -> PauliChannel {
    let mut ch = twirl_process(&lc.process);
    ch.p[2] += lc.leakage;
    ch
}

/// Binary entropy in bits.
pub fn h2(e: f64) -> f64 {
    if e <= 0.0 || e >= 1.0 {
        return 0.0;
    }
    -e * e.log2() - (1.0 - e) * (1.0 - e).log2()
}

/// Asymptotic BB84 key fraction `max(0, 1 - h2(e_x) - h2(e_z))`.
pub fn key_fraction(ch: &PauliChannel) -> f64 {
    (1.0 - h2(ch.qber_x()) - h2(ch.qber_z())).max(0.0)
}
