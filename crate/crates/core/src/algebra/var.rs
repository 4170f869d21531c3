use std::fmt;
use std::sync::Arc;

pub type Name = Arc<str>;

/// A symbol of the polynomial rings used throughout the pipeline.
///
/// The derived `Ord` is the canonical global variable order: parameters
/// lowest, then program values by step (step 0 holds initial values), the
/// presented loop-head values, counters, exponential symbols, factorial
/// symbols, zero-power indicators and finally auxiliary tags.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Var {
    /// Symbolic constant that no loop body assigns.
    Param(Name),
    /// Value of program variable `name` at step `step`; step 0 is the initial value.
    Prog { step: u32, name: Name },
    /// Value of program variable `name` at the loop head, used for presentation.
    Cur(Name),
    /// Iteration counter of the inner loop executed at `step`.
    Counter(u32),
    /// Stands for `theta_index^n` of the inner loop executed at `step`.
    Exp { step: u32, index: u32 },
    /// Stands for `(n + zeta_index)` falling-factorial `n` of the inner loop at `step`.
    Fact { step: u32, index: u32 },
    /// Stands for `0^n`, i.e. 1 if the inner loop at `step` ran zero times.
    ZeroPow(u32),
    /// Tag variable introduced by saturation and intersection.
    Aux(u32),
}

impl Var {
    pub fn param(name: &str) -> Var {
        Var::Param(name.into())
    }

    pub fn prog(name: &str, step: u32) -> Var {
        Var::Prog { step, name: name.into() }
    }

    pub fn initial(name: &str) -> Var {
        Var::prog(name, 0)
    }

    pub fn cur(name: &str) -> Var {
        Var::Cur(name.into())
    }

    pub fn is_aux(&self) -> bool {
        matches!(self, Var::Aux(_))
    }

    /// Step index for step-scoped symbols.
    pub fn step(&self) -> Option<u32> {
        match self {
            Var::Prog { step, .. }
            | Var::Counter(step)
            | Var::Exp { step, .. }
            | Var::Fact { step, .. }
            | Var::ZeroPow(step) => Some(*step),
            _ => None,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Param(name) | Var::Cur(name) => write!(f, "{name}"),
            Var::Prog { step, name } => write!(f, "{name}_{step}"),
            Var::Counter(step) => write!(f, "n_{step}"),
            Var::Exp { step, index } => write!(f, "y{index}_{step}"),
            Var::Fact { step, index } => write!(f, "z{index}_{step}"),
            Var::ZeroPow(step) => write!(f, "w_{step}"),
            Var::Aux(k) => write!(f, "t{k}"),
        }
    }
}
