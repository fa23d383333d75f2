//! Parsers for command-line values. All of them reject rather than clamp.

use pompeiu_core::{Error, Result};

/// Upper bound on the number of indices a range may expand to.
pub const MAX_INDICES: usize = 100_000;

/// Upper bound on the length of a real list.
pub const MAX_REALS: usize = 100_000;

/// Requested wavenumber: a positive value or the shape-dependent default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Wavenumber {
    /// First zero of `J_1` divided by the shape's mean radius.
    Auto,
    Value(f64),
}

fn invalid(msg: String) -> Error {
    Error::InvalidInput(msg)
}

fn parse_finite(s: &str) -> Result<f64> {
    let t = s.trim();
    let v: f64 = t
        .parse()
        .map_err(|_| invalid(format!("not a number: {t:?}")))?;
    if !v.is_finite() {
        return Err(invalid(format!("not a finite number: {t:?}")));
    }
    Ok(v)
}

/// `"auto"` or a finite positive real.
pub fn parse_wavenumber(s: &str) -> Result<Wavenumber> {
    let t = s.trim();
    if t == "auto" {
        return Ok(Wavenumber::Auto);
    }
    let k = parse_finite(t).map_err(|_| invalid(format!("k must be \"auto\" or a positive number, got {t:?}")))?;
    if k <= 0.0 {
        return Err(invalid(format!("k must be positive, got {t}")));
    }
    Ok(Wavenumber::Value(k))
}

/// Comma-separated items, each `n` or an inclusive range `a..b` with `a <= b`.
/// Order is preserved and duplicates are kept.
pub fn parse_index_range(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in s.split(',') {
        let item = item.trim();
        if item.is_empty() {
            return Err(invalid(format!("empty item in index list {s:?}")));
        }
        let (lo, hi) = match item.split_once("..") {
            Some((a, b)) => (parse_index(a)?, parse_index(b)?),
            None => {
                let n = parse_index(item)?;
                (n, n)
            }
        };
        if lo > hi {
            return Err(invalid(format!("range {item:?} is decreasing")));
        }
        let len = hi - lo + 1;
        if out.len() + len > MAX_INDICES {
            return Err(invalid(format!("index list expands to more than {MAX_INDICES} entries")));
        }
        out.extend(lo..=hi);
    }
    Ok(out)
}

fn parse_index(s: &str) -> Result<usize> {
    let t = s.trim();
    if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
        return Err(invalid(format!("not a non-negative integer: {t:?}")));
    }
    t.parse()
        .map_err(|_| invalid(format!("index out of range: {t:?}")))
}

/// Comma-separated finite reals, at least one.
pub fn parse_real_list(s: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in s.split(',') {
        if out.len() == MAX_REALS {
            return Err(invalid(format!("list longer than {MAX_REALS} entries")));
        }
        out.push(parse_finite(item)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavenumber_forms() {
        assert_eq!(parse_wavenumber("auto").unwrap(), Wavenumber::Auto);
        assert_eq!(parse_wavenumber(" 2.5 ").unwrap(), Wavenumber::Value(2.5));
        for bad in ["", "Auto", "0", "-1", "nan", "inf", "1e400", "k"] {
            assert!(parse_wavenumber(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn index_ranges_are_inclusive() {
        assert_eq!(parse_index_range("0..20").unwrap().len(), 21);
        assert_eq!(parse_index_range("3").unwrap(), vec![3]);
        assert_eq!(parse_index_range("1..2, 5,5").unwrap(), vec![1, 2, 5, 5]);
        for bad in ["", "2..1", "-1", "1..", "..3", "a", "1,,2", "+1", "0..100000"] {
            assert!(parse_index_range(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn real_lists() {
        assert_eq!(parse_real_list("1, 2.5,-3e-2").unwrap(), vec![1.0, 2.5, -0.03]);
        for bad in ["", "1,", "x", "1,nan", "inf"] {
            assert!(parse_real_list(bad).is_err(), "{bad}");
        }
    }
}
