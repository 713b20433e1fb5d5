use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_WORKING_BITS: u32 = 192;
pub const DEFAULT_MAX_BITS: u32 = 1 << 20;
pub const DEFAULT_ESCALATION_FACTOR: u32 = 2;

/// Binary precision policy shared by every certified computation.
///
/// A computation starts at `working_bits`. When it reports
/// [`Error::Undecided`], the precision is multiplied by
/// `escalation_factor` and the computation is retried, until `max_bits`
/// is exceeded and [`Error::PrecisionExhausted`] is returned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionContext {
    pub working_bits: u32,
    pub max_bits: u32,
    pub escalation_factor: u32,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext {
            working_bits: DEFAULT_WORKING_BITS,
            max_bits: DEFAULT_MAX_BITS,
            escalation_factor: DEFAULT_ESCALATION_FACTOR,
        }
    }
}

impl PrecisionContext {
    pub fn new(working_bits: u32, max_bits: u32, escalation_factor: u32) -> Result<Self> {
        if working_bits < 64 {
            return Err(Error::Precondition(format!(
                "working_bits must be at least 64, got {working_bits}"
            )));
        }
        if working_bits > max_bits {
            return Err(Error::Precondition(format!(
                "working_bits {working_bits} exceeds max_bits {max_bits}"
            )));
        }
        if escalation_factor < 2 {
            return Err(Error::Precondition(format!(
                "escalation_factor must be at least 2, got {escalation_factor}"
            )));
        }
        Ok(PrecisionContext {
            working_bits,
            max_bits,
            escalation_factor,
        })
    }

    /// Same policy, starting from at least `bits`.
    pub fn at_least(&self, bits: u32) -> Self {
        PrecisionContext {
            working_bits: self.working_bits.max(bits).min(self.max_bits),
            ..*self
        }
    }

    /// Run `f` at increasing precision until it stops reporting
    /// [`Error::Undecided`].
    pub fn escalate<T>(&self, mut f: impl FnMut(u32) -> Result<T>) -> Result<T> {
        let mut bits = self.working_bits;
        loop {
            match f(bits) {
                Err(Error::Undecided { .. }) => {
                    if bits >= self.max_bits {
                        return Err(Error::PrecisionExhausted {
                            max_bits: self.max_bits,
                        });
                    }
                    bits = bits
                        .saturating_mul(self.escalation_factor)
                        .min(self.max_bits);
                }
                other => return other,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_policies() {
        assert!(PrecisionContext::new(32, 1024, 2).is_err());
        assert!(PrecisionContext::new(2048, 1024, 2).is_err());
        assert!(PrecisionContext::new(128, 1024, 1).is_err());
        assert!(PrecisionContext::new(64, 64, 2).is_ok());
    }

    #[test]
    fn escalation_doubles_then_gives_up() {
        let ctx = PrecisionContext::new(64, 1024, 2).unwrap();
        let mut seen = Vec::new();
        let out: Result<()> = ctx.escalate(|bits| {
            seen.push(bits);
            Err(Error::Undecided { bits })
        });
        assert_eq!(seen, vec![64, 128, 256, 512, 1024]);
        assert!(matches!(
            out,
            Err(Error::PrecisionExhausted { max_bits: 1024 })
        ));

        let got = ctx
            .escalate(|bits| {
                if bits < 256 {
                    Err(Error::Undecided { bits })
                } else {
                    Ok(bits)
                }
            })
            .unwrap();
        assert_eq!(got, 256);
    }
}
