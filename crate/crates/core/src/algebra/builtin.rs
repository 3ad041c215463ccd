use std::fmt;
use std::str::FromStr;

use super::{dense, hall, StratifiedLieAlgebra};
use crate::error::{CarnotError, Result};

/// Names accepted by [`builtin`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    Heisenberg(usize),
    Engel,
    G235,
    Free { rank: usize, step: usize },
}

impl FromStr for Builtin {
    type Err = CarnotError;

    /// Accepts `heisenberg`, `heisenberg(k)`, `engel`, `g235`, `free(m,step)`.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
        let unknown = || CarnotError::UnknownBuiltin(s.to_string());
        let args = |body: &str| -> Result<Vec<usize>> {
            body.strip_suffix(')')
                .ok_or_else(unknown)?
                .split(',')
                .map(|a| a.parse::<usize>().map_err(|_| unknown()))
                .collect()
        };
        match t.as_str() {
            "heisenberg" => Ok(Builtin::Heisenberg(1)),
            "engel" => Ok(Builtin::Engel),
            "g235" => Ok(Builtin::G235),
            _ => {
                if let Some(rest) = t.strip_prefix("heisenberg(") {
                    match args(rest)?.as_slice() {
                        [k] if *k >= 1 => Ok(Builtin::Heisenberg(*k)),
                        _ => Err(unknown()),
                    }
                } else if let Some(rest) = t.strip_prefix("free(") {
                    match args(rest)?.as_slice() {
                        [m, st] if *m >= 2 && *st >= 1 => Ok(Builtin::Free { rank: *m, step: *st }),
                        _ => Err(unknown()),
                    }
                } else {
                    Err(unknown())
                }
            }
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Builtin::Heisenberg(k) => write!(f, "heisenberg({k})"),
            Builtin::Engel => write!(f, "engel"),
            Builtin::G235 => write!(f, "g235"),
            Builtin::Free { rank, step } => write!(f, "free({rank},{step})"),
        }
    }
}

impl Builtin {
    pub fn build(self) -> Result<StratifiedLieAlgebra> {
        match self {
            Builtin::Heisenberg(k) => {
                let n = 2 * k + 1;
                let mut a = StratifiedLieAlgebra::new(self.to_string(), vec![2 * k, 1])?;
                for i in 0..k {
                    a.set_bracket(i, k + i, &dense(n, &[(2 * k, 1)]))?;
                }
                Ok(a)
            }
            Builtin::Engel => {
                let mut a = StratifiedLieAlgebra::new("engel", vec![2, 1, 1])?;
                a.set_bracket(0, 1, &dense(4, &[(2, 1)]))?;
                a.set_bracket(0, 2, &dense(4, &[(3, 1)]))?;
                Ok(a)
            }
            Builtin::G235 => {
                let mut a = StratifiedLieAlgebra::new("g235", vec![2, 1, 2])?;
                a.set_bracket(0, 1, &dense(5, &[(2, 1)]))?;
                a.set_bracket(0, 2, &dense(5, &[(3, 1)]))?;
                a.set_bracket(1, 2, &dense(5, &[(4, 1)]))?;
                Ok(a)
            }
            Builtin::Free { rank, step } => hall::free_nilpotent(rank, step),
        }
    }
}

/// Standard algebras by name; see [`Builtin`] for the accepted spellings.
pub fn builtin(name: &str) -> Result<StratifiedLieAlgebra> {
    name.parse::<Builtin>()?.build()
}
