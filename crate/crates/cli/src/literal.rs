//! Complex literals: `a`, `ai`, `a+bi`, `a-bi` with decimal reals.

use bergman_core::C64;

use crate::CliError;

fn parse_real(field: &str, s: &str) -> Result<f64, CliError> {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let digits_ok = {
        let mut parts = mantissa.splitn(2, '.');
        let int = parts.next().unwrap_or("");
        let frac = parts.next();
        let all_digits = |t: &str| t.chars().all(|c| c.is_ascii_digit());
        all_digits(int)
            && frac.map_or(true, all_digits)
            && (!int.is_empty() || frac.is_some_and(|f| !f.is_empty()))
    };
    let exp_ok = exponent.map_or(true, |e| {
        let e = e.strip_prefix(['+', '-']).unwrap_or(e);
        !e.is_empty() && e.chars().all(|c| c.is_ascii_digit())
    });
    if !(digits_ok && exp_ok) {
        return Err(CliError::parse(field, format!("`{s}` is not a decimal real")));
    }
    s.parse::<f64>()
        .map_err(|e| CliError::parse(field, format!("`{s}`: {e}")))
}

/// Parses one complex literal.
pub fn parse_complex(field: &str, s: &str) -> Result<C64, CliError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(CliError::parse(field, "empty complex literal"));
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(C64::new(parse_real(field, s)?, 0.0));
    };
    // split at the last sign that is neither leading nor part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => {
            let re = parse_real(field, &body[..i])?;
            let im = parse_real(field, &body[i..])?;
            Ok(C64::new(re, im))
        }
        None => Ok(C64::new(0.0, parse_real(field, body)?)),
    }
}

/// Comma-separated list of complex literals.
pub fn parse_point(field: &str, s: &str) -> Result<Vec<C64>, CliError> {
    s.split(',').map(|t| parse_complex(field, t)).collect()
}

/// Canonical form: shortest round-trip decimals, imaginary part only when nonzero.
pub fn format_complex(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

pub fn format_point(z: &[C64]) -> String {
    z.iter().map(|c| format_complex(*c)).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> C64 {
        parse_complex("x", s).unwrap()
    }

    #[test]
    fn grammar() {
        assert_eq!(p("0.3"), C64::new(0.3, 0.0));
        assert_eq!(p("-2i"), C64::new(0.0, -2.0));
        assert_eq!(p("0.3+0.4i"), C64::new(0.3, 0.4));
        assert_eq!(p("0.3-0.4i"), C64::new(0.3, -0.4));
        assert_eq!(p("-.5-1e-3i"), C64::new(-0.5, -1e-3));
        assert_eq!(p("1e-3+2i"), C64::new(1e-3, 2.0));
    }

    #[test]
    fn rejects_malformed() {
        for s in ["", "i", "abc", "0.3+i", "1..2", "0.3+0.4j", "+-1", "1e", "0x10"] {
            assert!(parse_complex("point", s).is_err(), "{s}");
        }
        let err = parse_complex("point", "zz").unwrap_err().to_string();
        assert!(err.contains("point"));
    }

    #[test]
    fn canonical_forms() {
        for (raw, canon) in [
            ("0.30+0.40i", "0.3+0.4i"),
            ("0.5", "0.5"),
            ("0+2i", "2i"),
            ("1-0i", "1"),
            ("-0.25-1.5i", "-0.25-1.5i"),
            ("2.5e-1i", "0.25i"),
        ] {
            assert_eq!(format_complex(p(raw)), canon);
            assert_eq!(format_complex(p(canon)), canon);
        }
    }

    #[test]
    fn points() {
        let z = parse_point("point", "0.1+0.2i, -0.3").unwrap();
        assert_eq!(format_point(&z), "0.1+0.2i,-0.3");
    }
}
