use std::fmt;

use crate::trees::ParamIndex;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FuncBase {
    A,
    F,
    G,
    K,
    H,
}

impl FuncBase {
    pub fn name(&self) -> char {
        match self {
            FuncBase::A => 'a',
            FuncBase::F => 'f',
            FuncBase::G => 'g',
            FuncBase::K => 'k',
            FuncBase::H => 'h',
        }
    }

    pub fn from_name(c: char) -> Option<FuncBase> {
        Some(match c {
            'a' => FuncBase::A,
            'f' => FuncBase::F,
            'g' => FuncBase::G,
            'k' => FuncBase::K,
            'h' => FuncBase::H,
            _ => return None,
        })
    }
}

/// Generators of the polynomial ring underlying [`super::SymExpr`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// `base^{(n)}(u)`
    Func(FuncBase, u32),
    /// `u`, identified with `v_{(0,0)}`
    U,
    /// `∂_x u` as an independent symbol
    Ux,
    /// `v_α` for `α ≠ 0`
    V(ParamIndex),
    /// formal parameter `c` of renormalisation constants
    Param,
}

impl Atom {
    pub fn func(base: FuncBase, n: u32) -> Atom {
        Atom::Func(base, n)
    }

    /// `v_α`, with `v_0 = u`.
    pub fn v(alpha: ParamIndex) -> Atom {
        if alpha.is_zero() {
            Atom::U
        } else {
            Atom::V(alpha)
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Func(b, n) if *n <= 3 => write!(f, "{}{}", b.name(), "'".repeat(*n as usize)),
            Atom::Func(b, n) => write!(f, "{}{{{}}}", b.name(), n),
            Atom::U => write!(f, "u"),
            Atom::Ux => write!(f, "ux"),
            Atom::V(a) => write!(f, "v_{}", a.suffix()),
            Atom::Param => write!(f, "c"),
        }
    }
}
