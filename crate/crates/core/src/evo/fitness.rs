use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

/// `(Cost(x), 2*LP(x))`, both minimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fitness {
    pub cost: u64,
    pub lp2: u64,
}

impl Fitness {
    pub fn new(cost: u64, lp2: u64) -> Self {
        Self { cost, lp2 }
    }

    /// `Cost + 2*LP`.
    pub fn cost_plus_two_lp(&self) -> u64 {
        self.cost + self.lp2
    }

    /// `2*(Cost + LP)`; only compared against the same form.
    pub fn twice_cost_plus_lp(&self) -> u64 {
        2 * self.cost + self.lp2
    }

    pub fn is_cover(&self) -> bool {
        self.lp2 == 0
    }
}

pub fn dominates_weak(a: &Fitness, b: &Fitness) -> bool {
    a.cost <= b.cost && a.lp2 <= b.lp2
}

pub fn dominates_strong(a: &Fitness, b: &Fitness) -> bool {
    dominates_weak(a, b) && a != b
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BoxIndex {
    pub b1: u64,
    pub b2: u64,
}

/// Smallest `k >= 0` with `(1 + 1/(2n))^k >= num/den`, for `num >= den >= 1`.
///
/// A floating-point logarithm gives the starting guess; the answer is then
/// settled by exact comparison of `(2n+1)^k * den` against `(2n)^k * num`.
pub fn box_exponent(n: usize, num: u64, den: u64) -> u64 {
    assert!(n >= 1 && den >= 1 && num >= den);
    if num == den {
        return 0;
    }
    let n2 = 2 * n as u64;
    let holds = |k: u64| -> bool {
        let k = u32::try_from(k).expect("box exponent fits u32");
        BigUint::from(n2 + 1).pow(k) * den >= BigUint::from(n2).pow(k) * num
    };
    let ratio = num as f64 / den as f64;
    let guess = (ratio.ln() / (1.0 + 1.0 / n2 as f64).ln()).ceil().max(0.0) as u64;
    let mut k = guess.saturating_sub(2);
    while k > 0 && holds(k - 1) {
        k -= 1;
    }
    while !holds(k) {
        k += 1;
    }
    k
}

/// `b1 = ceil(log_{1+d}(1 + Cost))`, `b2 = ceil(log_{1+d}(1 + LP))`, `d = 1/(2n)`.
pub fn box_index(fit: &Fitness, n: usize) -> BoxIndex {
    BoxIndex {
        b1: box_exponent(n, 1 + fit.cost, 1),
        // 1 + lp2/2 = (2 + lp2) / 2
        b2: box_exponent(n, 2 + fit.lp2, 2),
    }
}

/// Number of box rows (and columns) that can be occupied:
/// `1 + ceil(log_{1+d}(1 + n*W_max))`.
pub fn box_grid_side(n: usize, w_max: u64) -> u64 {
    1 + box_exponent(n, 1 + n as u64 * w_max, 1)
}
