//! Scheme configurations and their validation rules.

use crate::error::{Error, Result};
use crate::mapping;

/// Constellation family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstellationKind {
    Psk,
    Qam,
    Pam,
}

/// Detector choice for the receive-side schemes. `Ml` searches every legal
/// hypothesis; `Greedy` picks the per-antenna magnitude (or quadrature
/// component) argmax and demaps locally.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Detector {
    Ml,
    Greedy,
}

/// Tagged union selecting one of the eleven schemes plus its parameters.
///
/// Dimension conventions: `nt`/`nr` are transmit/receive antenna counts,
/// `n` is the metasurface element (or RF mirror) count, `ng` the number of
/// element groups, `na` the number of active antennas or groups, and `m`
/// the constellation order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeConfig {
    Sm { nt: usize, nr: usize, m: usize, kind: ConstellationKind },
    Gsm { nt: usize, nr: usize, na: usize, m: usize, kind: ConstellationKind },
    Qsm { nt: usize, nr: usize, m: usize, kind: ConstellationKind },
    Rsm { nt: usize, nr: usize, m: usize, kind: ConstellationKind, detector: Detector },
    Rqsm { nt: usize, nr: usize, m: usize, kind: ConstellationKind, detector: Detector },
    Mbm { mirrors: usize, nr: usize, m: usize, kind: ConstellationKind },
    RisMimo { n: usize, ng: usize, m: usize, kind: ConstellationKind },
    RisGsm { n: usize, ng: usize, na: usize, m: usize, kind: ConstellationKind },
    RisQsm { n: usize, ng: usize, na: usize, m: usize, kind: ConstellationKind },
    /// `symbol: None` sends a bare carrier: the receive-antenna index is the
    /// only payload.
    RisRsm {
        n: usize,
        nr: usize,
        symbol: Option<(ConstellationKind, usize)>,
        detector: Detector,
    },
    /// `pam_order: None` carries one sign bit per branch; `Some(m)` feeds an
    /// `M`-PAM symbol plus a single quadrature sign bit.
    RisRqsm { n: usize, nr: usize, pam_order: Option<usize> },
}

impl SchemeConfig {
    /// Stable lowercase tag (also the CLI scheme name).
    pub fn tag(&self) -> &'static str {
        match self {
            SchemeConfig::Sm { .. } => "sm",
            SchemeConfig::Gsm { .. } => "gsm",
            SchemeConfig::Qsm { .. } => "qsm",
            SchemeConfig::Rsm { .. } => "rsm",
            SchemeConfig::Rqsm { .. } => "rqsm",
            SchemeConfig::Mbm { .. } => "mbm",
            SchemeConfig::RisMimo { .. } => "ris-mimo",
            SchemeConfig::RisGsm { .. } => "ris-gsm",
            SchemeConfig::RisQsm { .. } => "ris-qsm",
            SchemeConfig::RisRsm { .. } => "ris-rsm",
            SchemeConfig::RisRqsm { .. } => "ris-rqsm",
        }
    }

    /// Checks every structural constraint of the scheme.
    pub fn validate(&self) -> Result<()> {
        fn dim(v: usize, what: &str) -> Result<()> {
            if v == 0 {
                Err(Error::invalid(alloc::format!("{what} must be >= 1")))
            } else {
                Ok(())
            }
        }
        fn order(kind: ConstellationKind, m: usize) -> Result<()> {
            let bits = mapping::log2_exact(m)?;
            if kind == ConstellationKind::Qam && bits % 2 != 0 {
                return Err(Error::invalid("QAM order must be square (4, 16, 64, ...)"));
            }
            Ok(())
        }
        fn pow2(v: usize, what: &str) -> Result<()> {
            if v.is_power_of_two() {
                Ok(())
            } else {
                Err(Error::invalid(alloc::format!("{what} must be a power of two")))
            }
        }
        match *self {
            SchemeConfig::Sm { nt, nr, m, kind } => {
                dim(nt, "N_T")?;
                dim(nr, "N_R")?;
                order(kind, m)
            }
            SchemeConfig::Gsm { nt, nr, na, m, kind } => {
                dim(nt, "N_T")?;
                dim(nr, "N_R")?;
                if na < 2 || na > nt.saturating_sub(1) {
                    return Err(Error::invalid("GSM requires 2 <= N_A <= N_T - 1"));
                }
                order(kind, m)
            }
            SchemeConfig::Qsm { nt, nr, m, kind } => {
                dim(nt, "N_T")?;
                dim(nr, "N_R")?;
                order(kind, m)
            }
            SchemeConfig::Rsm { nt, nr, m, kind, .. }
            | SchemeConfig::Rqsm { nt, nr, m, kind, .. } => {
                dim(nr, "N_R")?;
                if nt < nr {
                    return Err(Error::invalid("zero-forcing requires N_T >= N_R"));
                }
                // Power-of-two N_R makes every receive antenna a legal target,
                // which is what keeps the transmit-power normalization exact.
                pow2(nr, "N_R")?;
                order(kind, m)
            }
            SchemeConfig::Mbm { mirrors, nr, m, kind } => {
                dim(mirrors, "mirror count")?;
                dim(nr, "N_R")?;
                if mirrors > 16 {
                    return Err(Error::invalid("more than 16 RF mirrors is unsupported (2^N states)"));
                }
                order(kind, m)
            }
            SchemeConfig::RisMimo { n, ng, m, kind } => {
                dim(n, "N")?;
                dim(ng, "N_G")?;
                if n % ng != 0 {
                    return Err(Error::invalid("N_G must divide N"));
                }
                if ng > 16 {
                    return Err(Error::invalid("more than 16 groups is unsupported (M^N_G hypotheses)"));
                }
                order(kind, m)
            }
            SchemeConfig::RisGsm { n, ng, na, m, kind }
            | SchemeConfig::RisQsm { n, ng, na, m, kind } => {
                dim(n, "N")?;
                dim(ng, "N_G")?;
                if n % ng != 0 {
                    return Err(Error::invalid("N_G must divide N"));
                }
                if na == 0 || na > ng {
                    return Err(Error::invalid("active group count requires 1 <= N_A <= N_G"));
                }
                order(kind, m)
            }
            SchemeConfig::RisRsm { n, nr, symbol, .. } => {
                dim(n, "N")?;
                dim(nr, "N_R")?;
                pow2(nr, "N_R")?;
                if let Some((kind, m)) = symbol {
                    order(kind, m)?;
                } else if nr < 2 {
                    return Err(Error::invalid("RIS-RSM without a symbol needs N_R >= 2 to carry bits"));
                }
                Ok(())
            }
            SchemeConfig::RisRqsm { n, nr, pam_order } => {
                dim(n, "N")?;
                dim(nr, "N_R")?;
                pow2(nr, "N_R")?;
                if n % 2 != 0 {
                    return Err(Error::invalid("RIS-RQSM splits the surface into two halves: N must be even"));
                }
                if let Some(m) = pam_order {
                    order(ConstellationKind::Pam, m)?;
                }
                Ok(())
            }
        }
    }
}
