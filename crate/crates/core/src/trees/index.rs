use std::fmt;

use serde::{Deserialize, Serialize};

/// Space-time multi-index `(t, x)` with parabolic weight `2t + x`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex {
    pub t: u32,
    pub x: u32,
}

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex { t: 0, x: 0 };
    pub const T: MultiIndex = MultiIndex { t: 1, x: 0 };
    pub const X: MultiIndex = MultiIndex { t: 0, x: 1 };

    pub const fn new(t: u32, x: u32) -> Self {
        MultiIndex { t, x }
    }

    /// Unit vector `e_i`; `i = 0` is time, `i = 1` is space.
    pub fn unit(i: usize) -> Self {
        match i {
            0 => Self::T,
            1 => Self::X,
            _ => panic!("multi-index direction {i} out of range"),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.t == 0 && self.x == 0
    }

    pub fn weight(&self) -> u32 {
        2 * self.t + self.x
    }

    /// `k! = k_t! * k_x!`.
    pub fn factorial(&self) -> u64 {
        factorial(self.t) * factorial(self.x)
    }

    pub fn checked_sub(&self, other: MultiIndex) -> Option<MultiIndex> {
        Some(MultiIndex { t: self.t.checked_sub(other.t)?, x: self.x.checked_sub(other.x)? })
    }

    pub fn le(&self, other: &MultiIndex) -> bool {
        self.t <= other.t && self.x <= other.x
    }

    /// `binom(n, k) = binom(n_t, k_t) * binom(n_x, k_x)`, zero unless `k <= n`.
    pub fn binomial(n: MultiIndex, k: MultiIndex) -> u64 {
        if !k.le(&n) {
            return 0;
        }
        binomial(n.t, k.t) * binomial(n.x, k.x)
    }

    /// All `β` with `0 <= β <= self`.
    pub fn below(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        (0..=self.t).flat_map(move |t| (0..=self.x).map(move |x| MultiIndex { t, x }))
    }
}

impl std::ops::Add for MultiIndex {
    type Output = MultiIndex;
    fn add(self, rhs: MultiIndex) -> MultiIndex {
        MultiIndex { t: self.t + rhs.t, x: self.x + rhs.x }
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.t, self.x)
    }
}

/// Edge index `α = (h, ᾱ)`: `h` parameter derivatives and a space-time part.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ParamIndex {
    pub h: u32,
    pub st: MultiIndex,
}

impl ParamIndex {
    pub const ZERO: ParamIndex = ParamIndex { h: 0, st: MultiIndex::ZERO };
    /// `v_c`
    pub const C: ParamIndex = ParamIndex { h: 1, st: MultiIndex::ZERO };
    /// `v_x`
    pub const X: ParamIndex = ParamIndex { h: 0, st: MultiIndex::X };
    /// `v_t`
    pub const T: ParamIndex = ParamIndex { h: 0, st: MultiIndex::T };
    /// `v_cc`
    pub const CC: ParamIndex = ParamIndex { h: 2, st: MultiIndex::ZERO };
    /// `v_cx`
    pub const CX: ParamIndex = ParamIndex { h: 1, st: MultiIndex::X };

    pub const fn new(h: u32, t: u32, x: u32) -> Self {
        ParamIndex { h, st: MultiIndex::new(t, x) }
    }

    pub const fn space_time(st: MultiIndex) -> Self {
        ParamIndex { h: 0, st }
    }

    pub fn is_zero(&self) -> bool {
        self.h == 0 && self.st.is_zero()
    }

    /// `α + (n, 0)`
    pub fn raise_h(&self, n: u32) -> Self {
        ParamIndex { h: self.h + n, st: self.st }
    }

    pub fn add_st(&self, k: MultiIndex) -> Self {
        ParamIndex { h: self.h, st: self.st + k }
    }

    pub fn checked_sub_st(&self, k: MultiIndex) -> Option<Self> {
        Some(ParamIndex { h: self.h, st: self.st.checked_sub(k)? })
    }

    /// `|α|` counting parameter derivatives and the parabolic weight.
    pub fn order(&self) -> u32 {
        self.h + self.st.weight()
    }

    /// Suffix used in symbol names: `c` repeated `h` times, then `t`s and `x`s.
    pub fn suffix(&self) -> String {
        let mut s = String::new();
        s.extend(std::iter::repeat_n('c', self.h as usize));
        s.extend(std::iter::repeat_n('t', self.st.t as usize));
        s.extend(std::iter::repeat_n('x', self.st.x as usize));
        s
    }
}

impl fmt::Display for ParamIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.h, self.st.t, self.st.x)
    }
}

pub fn factorial(n: u32) -> u64 {
    (1..=n as u64).product()
}

pub fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}
