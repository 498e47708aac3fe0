//! Scheme catalog for the `se` command: RF-chain bookkeeping and assembly of
//! a minimal valid config from command-line parameters.

use srmimo_core::config::{ConstellationKind, Detector, SchemeConfig};

use crate::scenario::parse_modulation;

pub const TAGS: [&str; 11] = [
    "sm", "gsm", "qsm", "rsm", "rqsm", "mbm", "ris-mimo", "ris-gsm", "ris-qsm", "ris-rsm",
    "ris-rqsm",
];

/// RF chains / transmit antennas, as quoted in the scheme comparison table.
pub fn chains_label(tag: &str) -> &'static str {
    match tag {
        "sm" | "gsm" | "qsm" => "1/N_T",
        "rsm" | "rqsm" => "N_T/N_T",
        _ => "1/1",
    }
}

/// Parameters accepted by `se`; each scheme consumes the subset it needs.
#[derive(Debug, Default)]
pub struct SeParams {
    pub nt: Option<usize>,
    pub nr: Option<usize>,
    pub na: Option<usize>,
    pub n: Option<usize>,
    pub ng: Option<usize>,
    pub mirrors: Option<usize>,
    pub m: Option<usize>,
    pub modulation: Option<String>,
    pub pam: Option<usize>,
}

/// Builds a config carrying the SE-relevant parameters; fields that do not
/// affect spectral efficiency (e.g. `nr` for SM, the element count for RIS
/// schemes) receive small structurally-valid defaults.
pub fn se_config(scheme: &str, p: &SeParams) -> Result<SchemeConfig, String> {
    let req = |v: Option<usize>, flag: &str| {
        v.ok_or_else(|| format!("scheme `{scheme}` requires --{flag}"))
    };
    // `--modulation qam16` names a family; a bare `--m 16` assumes PSK, which
    // has the same spectral efficiency as any other order-16 family.
    let modulation = |required: bool| -> Result<Option<(ConstellationKind, usize)>, String> {
        match (&p.modulation, p.m) {
            (Some(_), Some(_)) => Err("--modulation and --m conflict; pass one".into()),
            (Some(text), None) => parse_modulation(text).map(Some),
            (None, Some(m)) => Ok(Some((ConstellationKind::Psk, m))),
            (None, None) if required => {
                Err(format!("scheme `{scheme}` requires --modulation or --m"))
            }
            (None, None) => Ok(None),
        }
    };
    Ok(match scheme {
        "sm" => {
            let (kind, m) = modulation(true)?.unwrap();
            SchemeConfig::Sm { nt: req(p.nt, "nt")?, nr: p.nr.unwrap_or(1), m, kind }
        }
        "gsm" => {
            let (kind, m) = modulation(true)?.unwrap();
            SchemeConfig::Gsm {
                nt: req(p.nt, "nt")?,
                nr: p.nr.unwrap_or(1),
                na: req(p.na, "na")?,
                m,
                kind,
            }
        }
        "qsm" => {
            let (kind, m) = modulation(true)?.unwrap();
            SchemeConfig::Qsm { nt: req(p.nt, "nt")?, nr: p.nr.unwrap_or(1), m, kind }
        }
        "rsm" | "rqsm" => {
            let (kind, m) = modulation(true)?.unwrap();
            let nr = req(p.nr, "nr")?;
            let nt = p.nt.unwrap_or(nr);
            if scheme == "rsm" {
                SchemeConfig::Rsm { nt, nr, m, kind, detector: Detector::Ml }
            } else {
                SchemeConfig::Rqsm { nt, nr, m, kind, detector: Detector::Ml }
            }
        }
        "mbm" => {
            let (kind, m) = modulation(true)?.unwrap();
            SchemeConfig::Mbm { mirrors: req(p.mirrors, "mirrors")?, nr: p.nr.unwrap_or(1), m, kind }
        }
        "ris-mimo" => {
            let (kind, m) = modulation(true)?.unwrap();
            let ng = req(p.ng, "ng")?;
            SchemeConfig::RisMimo { n: p.n.unwrap_or(ng * 32), ng, m, kind }
        }
        "ris-gsm" | "ris-qsm" => {
            let (kind, m) = modulation(true)?.unwrap();
            let ng = req(p.ng, "ng")?;
            let n = p.n.unwrap_or(ng * 32);
            let na = req(p.na, "na")?;
            if scheme == "ris-gsm" {
                SchemeConfig::RisGsm { n, ng, na, m, kind }
            } else {
                SchemeConfig::RisQsm { n, ng, na, m, kind }
            }
        }
        "ris-rsm" => SchemeConfig::RisRsm {
            n: p.n.unwrap_or(128),
            nr: req(p.nr, "nr")?,
            symbol: modulation(false)?,
            detector: Detector::Greedy,
        },
        "ris-rqsm" => SchemeConfig::RisRqsm {
            n: p.n.unwrap_or(128),
            nr: req(p.nr, "nr")?,
            pam_order: p.pam,
        },
        other => {
            return Err(format!("unknown scheme `{other}`; valid: {}", TAGS.join(" ")));
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use srmimo_core::mapping::spectral_efficiency;

    fn se_of(scheme: &str, p: SeParams) -> usize {
        spectral_efficiency(&se_config(scheme, &p).unwrap()).unwrap()
    }

    #[test]
    fn quoted_instances() {
        assert_eq!(se_of("sm", SeParams { nt: Some(2), m: Some(2), ..Default::default() }), 2);
        assert_eq!(
            se_of("rsm", SeParams { nr: Some(4), modulation: Some("qam16".into()), ..Default::default() }),
            6
        );
        assert_eq!(
            se_of("ris-qsm", SeParams { ng: Some(4), na: Some(2), m: Some(4), ..Default::default() }),
            4
        );
        assert_eq!(se_of("mbm", SeParams { mirrors: Some(2), m: Some(4), ..Default::default() }), 4);
        assert_eq!(se_of("ris-rqsm", SeParams { nr: Some(2), ..Default::default() }), 4);
    }

    #[test]
    fn missing_parameters_are_named() {
        let e = se_config("gsm", &SeParams { nt: Some(4), m: Some(4), ..Default::default() }).unwrap_err();
        assert!(e.contains("--na"));
        let e = se_config("sm", &SeParams { nt: Some(4), ..Default::default() }).unwrap_err();
        assert!(e.contains("--modulation"));
    }

    #[test]
    fn modulation_and_m_conflict() {
        let p = SeParams {
            nt: Some(4),
            m: Some(4),
            modulation: Some("qam16".into()),
            ..Default::default()
        };
        assert!(se_config("sm", &p).unwrap_err().contains("conflict"));
    }

    #[test]
    fn chain_labels() {
        assert_eq!(chains_label("sm"), "1/N_T");
        assert_eq!(chains_label("rqsm"), "N_T/N_T");
        assert_eq!(chains_label("ris-rsm"), "1/1");
        assert_eq!(chains_label("mbm"), "1/1");
    }
}
