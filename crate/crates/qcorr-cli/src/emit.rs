//! Deterministic numeric emission: 9 significant digits, `%.9g`-style.

/// Formats with 9 significant digits, trimming trailing zeros; falls back
/// to scientific notation outside a readable exponent range.
pub fn sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let s = format!("{v:.decimals$}");
        trim_zeros(&s)
    } else {
        let s = format!("{v:.8e}");
        // normalize exponent form: strip trailing zeros in the mantissa
        if let Some((mant, e)) = s.split_once('e') {
            format!("{}e{}", trim_zeros(mant), e)
        } else {
            s
        }
    }
}

fn trim_zeros(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    let t = s.trim_end_matches('0');
    t.trim_end_matches('.').to_string()
}

/// Rounds to 9 significant digits, for JSON documents that should carry the
/// same precision as the CSV output.
pub fn round9(v: f64) -> f64 {
    sig9(v).parse().unwrap_or(v)
}
