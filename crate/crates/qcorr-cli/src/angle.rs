//! Angle literals: plain radians or exact `pi` fractions (`pi/6`, `2pi/3`,
//! `0.5pi`).

pub fn parse_angle(text: &str) -> Result<f64, String> {
    let t = text.trim();
    if let Some(idx) = t.find("pi") {
        let (coef_s, rest) = (&t[..idx], &t[idx + 2..]);
        let coef: f64 = if coef_s.is_empty() {
            1.0
        } else {
            coef_s
                .parse()
                .map_err(|_| format!("bad coefficient in angle literal: {text:?}"))?
        };
        let denom: f64 = if rest.is_empty() {
            1.0
        } else if let Some(d) = rest.strip_prefix('/') {
            let v: f64 = d
                .parse()
                .map_err(|_| format!("bad denominator in angle literal: {text:?}"))?;
            if v == 0.0 {
                return Err(format!("zero denominator in angle literal: {text:?}"));
            }
            v
        } else {
            return Err(format!("unrecognized angle literal: {text:?}"));
        };
        Ok(coef * std::f64::consts::PI / denom)
    } else {
        t.parse()
            .map_err(|_| format!("unrecognized angle literal: {text:?}"))
    }
}

pub fn parse_angle_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(parse_angle)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions_parse_exactly() {
        assert_eq!(parse_angle("pi/6").unwrap(), std::f64::consts::PI / 6.0);
        assert_eq!(parse_angle("pi/4").unwrap(), std::f64::consts::FRAC_PI_4);
        assert_eq!(parse_angle("pi").unwrap(), std::f64::consts::PI);
        assert_eq!(parse_angle("2pi/3").unwrap(), 2.0 * std::f64::consts::PI / 3.0);
        assert_eq!(parse_angle("0.5pi").unwrap(), 0.5 * std::f64::consts::PI);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert!(parse_angle("pj/4").is_err());
        assert!(parse_angle("pi/0").is_err());
        assert_eq!(
            parse_angle_list("pi/6,pi/4").unwrap(),
            vec![std::f64::consts::PI / 6.0, std::f64::consts::FRAC_PI_4]
        );
    }
}
