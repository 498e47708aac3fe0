//! Line-oriented scenario files.
//!
//! A scenario is a list of `key = value` lines with exactly one `[scheme]`
//! section; keys before the section header configure the sweep, keys after
//! it configure the scheme. `#`/`;` start comments. Unknown or duplicate
//! keys are hard errors so typos cannot silently fall back to defaults.
//!
//! ```text
//! # 6 bpcu spatial modulation
//! seed = 1
//! snr = 0:2:22          # start:stop:step in dB (or a single value)
//! min_errors = 200
//! max_bits = 2000000
//! out = sm_6bpcu.csv
//!
//! [sm]
//! nt = 4
//! nr = 4
//! modulation = qam16
//! ```

use std::collections::BTreeMap;
use std::fmt;

use srmimo_core::config::{ConstellationKind, Detector, SchemeConfig};
use srmimo_core::sim::SimSpec;

/// Parse-level failure with its position; rendered as `file:line:col: msg`.
#[derive(Debug)]
pub struct ParseError {
    pub file: String,
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: {}", self.file, self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

/// A parsed scenario: the simulation spec plus the optional output path.
#[derive(Debug)]
pub struct Scenario {
    pub spec: SimSpec,
    pub out: Option<String>,
}

struct Entry {
    line: usize,
    col: usize,
    value: String,
    used: bool,
}

struct Section {
    keys: BTreeMap<String, Entry>,
}

impl Section {
    fn take(&mut self, key: &str) -> Option<&Entry> {
        if let Some(e) = self.keys.get_mut(key) {
            e.used = true;
            // Reborrow immutably for the caller.
            return self.keys.get(key);
        }
        None
    }
}

fn err(file: &str, line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    ParseError { file: file.to_string(), line, col, msg: msg.into() }
}

/// `"a:b:step"` (inclusive) or a single dB value.
pub fn parse_snr_grid(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{}` is not a number", s.trim()))
            .and_then(|v| if v.is_finite() { Ok(v) } else { Err(format!("`{s}` is not finite")) })
    };
    match parts.as_slice() {
        [one] => Ok(vec![num(one)?]),
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if step <= 0.0 {
                return Err("SNR step must be positive".into());
            }
            if stop < start {
                return Err("SNR stop must not be below start".into());
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| start + i as f64 * step).collect())
        }
        _ => Err("expected `value` or `start:stop:step`".into()),
    }
}

/// `psk<M>`, `qam<M>` or `pam<M>`, e.g. `qam16`.
pub fn parse_modulation(text: &str) -> Result<(ConstellationKind, usize), String> {
    let (kind, rest) = if let Some(r) = text.strip_prefix("psk") {
        (ConstellationKind::Psk, r)
    } else if let Some(r) = text.strip_prefix("qam") {
        (ConstellationKind::Qam, r)
    } else if let Some(r) = text.strip_prefix("pam") {
        (ConstellationKind::Pam, r)
    } else {
        return Err(format!("`{text}` is not a modulation; use psk<M>, qam<M> or pam<M>"));
    };
    let m: usize = rest.parse().map_err(|_| format!("`{text}` has no valid order"))?;
    Ok((kind, m))
}

fn parse_detector(text: &str) -> Result<Detector, String> {
    match text {
        "ml" => Ok(Detector::Ml),
        "greedy" => Ok(Detector::Greedy),
        other => Err(format!("`{other}` is not a detector; use ml or greedy")),
    }
}

pub fn parse_scenario(text: &str, file: &str) -> Result<Scenario, ParseError> {
    let mut globals = Section { keys: BTreeMap::new() };
    let mut section: Option<(String, usize, usize, Section)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find(['#', ';']) {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        if line.trim().is_empty() {
            continue;
        }
        let col_of = |needle: &str| raw.find(needle).map_or(1, |p| p + 1);
        let trimmed = line.trim();
        if let Some(inner) = trimmed.strip_prefix('[') {
            let Some(tag) = inner.strip_suffix(']') else {
                return Err(err(file, line_no, col_of("["), "unterminated section header"));
            };
            let tag = tag.trim().to_string();
            if let Some((_, l, _, _)) = &section {
                return Err(err(
                    file,
                    line_no,
                    col_of("["),
                    format!("second scheme section (first at line {l}); a scenario holds exactly one"),
                ));
            }
            section = Some((tag, line_no, col_of("["), Section { keys: BTreeMap::new() }));
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(err(file, line_no, col_of(trimmed), "expected `key = value`"));
        };
        let key = line[..eq].trim().to_string();
        let value = line[eq + 1..].trim().to_string();
        if key.is_empty() || value.is_empty() {
            return Err(err(file, line_no, col_of(trimmed), "expected `key = value`"));
        }
        let target = match &mut section {
            Some((_, _, _, s)) => s,
            None => &mut globals,
        };
        let col = col_of(&key);
        if target.keys.contains_key(&key) {
            return Err(err(file, line_no, col, format!("duplicate key `{key}`")));
        }
        target.keys.insert(key, Entry { line: line_no, col, value, used: false });
    }

    let Some((tag, sec_line, sec_col, mut sec)) = section else {
        return Err(err(file, 1, 1, "missing `[scheme]` section"));
    };

    // -- sweep-level keys ---------------------------------------------------
    let mut spec_snr: Option<Vec<f64>> = None;
    let mut seed = 0u64;
    let mut stop = srmimo_core::sim::StopRule::default();
    let mut out: Option<String> = None;

    if let Some(e) = globals.take("snr") {
        spec_snr = Some(parse_snr_grid(&e.value).map_err(|m| err(file, e.line, e.col, m))?);
    }
    if let Some(e) = globals.take("seed") {
        seed = e.value.parse().map_err(|_| err(file, e.line, e.col, "seed must be an unsigned integer"))?;
    }
    if let Some(e) = globals.take("min_errors") {
        stop.min_errors =
            e.value.parse().map_err(|_| err(file, e.line, e.col, "min_errors must be an unsigned integer"))?;
    }
    if let Some(e) = globals.take("max_bits") {
        stop.max_bits =
            e.value.parse().map_err(|_| err(file, e.line, e.col, "max_bits must be an unsigned integer"))?;
    }
    if let Some(e) = globals.take("out") {
        out = Some(e.value.clone());
    }
    if let Some((k, e)) = globals.keys.iter().find(|(_, e)| !e.used) {
        return Err(err(file, e.line, e.col, format!("unknown key `{k}`")));
    }
    let Some(snr_db) = spec_snr else {
        return Err(err(file, 1, 1, "missing required key `snr`"));
    };

    // -- scheme section -----------------------------------------------------
    let missing = |key: &str| {
        err(file, sec_line, sec_col, format!("scheme `{tag}` requires key `{key}`"))
    };
    macro_rules! req {
        ($sec:expr, $key:literal, usize) => {
            match $sec.take($key) {
                Some(e) => e
                    .value
                    .parse::<usize>()
                    .map_err(|_| err(file, e.line, e.col, concat!($key, " must be an unsigned integer")))?,
                None => return Err(missing($key)),
            }
        };
        ($sec:expr, $key:literal, modulation) => {
            match $sec.take($key) {
                Some(e) => parse_modulation(&e.value).map_err(|m| err(file, e.line, e.col, m))?,
                None => return Err(missing($key)),
            }
        };
    }
    macro_rules! opt_detector {
        ($sec:expr, $default:expr) => {
            match $sec.take("detector") {
                Some(e) => parse_detector(&e.value).map_err(|m| err(file, e.line, e.col, m))?,
                None => $default,
            }
        };
    }

    let scheme = match tag.as_str() {
        "sm" => {
            let nt = req!(sec, "nt", usize);
            let nr = req!(sec, "nr", usize);
            let (kind, m) = req!(sec, "modulation", modulation);
            SchemeConfig::Sm { nt, nr, m, kind }
        }
        "gsm" => {
            let nt = req!(sec, "nt", usize);
            let nr = req!(sec, "nr", usize);
            let na = req!(sec, "na", usize);
            let (kind, m) = req!(sec, "modulation", modulation);
            SchemeConfig::Gsm { nt, nr, na, m, kind }
        }
        "qsm" => {
            let nt = req!(sec, "nt", usize);
            let nr = req!(sec, "nr", usize);
            let (kind, m) = req!(sec, "modulation", modulation);
            SchemeConfig::Qsm { nt, nr, m, kind }
        }
        "rsm" => {
            let nt = req!(sec, "nt", usize);
            let nr = req!(sec, "nr", usize);
            let (kind, m) = req!(sec, "modulation", modulation);
            SchemeConfig::Rsm { nt, nr, m, kind, detector: opt_detector!(sec, Detector::Ml) }
        }
        "rqsm" => {
            let nt = req!(sec, "nt", usize);
            let nr = req!(sec, "nr", usize);
            let (kind, m) = req!(sec, "modulation", modulation);
            SchemeConfig::Rqsm { nt, nr, m, kind, detector: opt_detector!(sec, Detector::Ml) }
        }
        "mbm" => {
            let mirrors = req!(sec, "mirrors", usize);
            let nr = req!(sec, "nr", usize);
            let (kind, m) = req!(sec, "modulation", modulation);
            SchemeConfig::Mbm { mirrors, nr, m, kind }
        }
        "ris-mimo" => {
            let n = req!(sec, "n", usize);
            let ng = req!(sec, "ng", usize);
            let (kind, m) = req!(sec, "modulation", modulation);
            SchemeConfig::RisMimo { n, ng, m, kind }
        }
        "ris-gsm" => {
            let n = req!(sec, "n", usize);
            let ng = req!(sec, "ng", usize);
            let na = req!(sec, "na", usize);
            let (kind, m) = req!(sec, "modulation", modulation);
            SchemeConfig::RisGsm { n, ng, na, m, kind }
        }
        "ris-qsm" => {
            let n = req!(sec, "n", usize);
            let ng = req!(sec, "ng", usize);
            let na = req!(sec, "na", usize);
            let (kind, m) = req!(sec, "modulation", modulation);
            SchemeConfig::RisQsm { n, ng, na, m, kind }
        }
        "ris-rsm" => {
            let n = req!(sec, "n", usize);
            let nr = req!(sec, "nr", usize);
            let symbol = match sec.take("modulation") {
                Some(e) => Some(parse_modulation(&e.value).map_err(|m| err(file, e.line, e.col, m))?),
                None => None,
            };
            SchemeConfig::RisRsm { n, nr, symbol, detector: opt_detector!(sec, Detector::Greedy) }
        }
        "ris-rqsm" => {
            let n = req!(sec, "n", usize);
            let nr = req!(sec, "nr", usize);
            let pam_order = match sec.take("pam") {
                Some(e) => Some(
                    e.value
                        .parse::<usize>()
                        .map_err(|_| err(file, e.line, e.col, "pam must be an unsigned integer"))?,
                ),
                None => None,
            };
            SchemeConfig::RisRqsm { n, nr, pam_order }
        }
        other => {
            return Err(err(
                file,
                sec_line,
                sec_col,
                format!(
                    "unknown scheme `{other}`; valid: sm gsm qsm rsm rqsm mbm ris-mimo ris-gsm ris-qsm ris-rsm ris-rqsm"
                ),
            ));
        }
    };
    if let Some((k, e)) = sec.keys.iter().find(|(_, e)| !e.used) {
        return Err(err(file, e.line, e.col, format!("unknown key `{k}` for scheme `{tag}`")));
    }

    let mut spec = SimSpec::new(scheme, snr_db, seed);
    spec.stop = stop;
    Ok(Scenario { spec, out })
}
