//! Text syntax: `c * (a m + b n)^k * ...`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::{LinFormError, LinearForm, RationalPolynomialFL};

fn err(input: &str, reason: impl Into<String>) -> LinFormError {
    LinFormError::Parse {
        input: input.to_string(),
        reason: reason.into(),
    }
}

pub(super) fn parse_form(s: &str) -> Result<LinearForm, LinFormError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(err(s, "empty form"));
    }
    let (mut alpha, mut beta) = (0i64, 0i64);
    let bytes = t.as_bytes();
    let mut i = 0;
    let mut first = true;
    while i < bytes.len() {
        let mut sign = 1i64;
        if bytes[i] == b'+' || bytes[i] == b'-' {
            if bytes[i] == b'-' {
                sign = -1;
            }
            i += 1;
        } else if !first {
            return Err(err(s, "expected '+' or '-'"));
        }
        first = false;
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let coef: i64 = if i == start {
            1
        } else {
            t[start..i].parse().map_err(|_| err(s, "bad coefficient"))?
        };
        if i < bytes.len() && bytes[i] == b'*' {
            i += 1;
        }
        match bytes.get(i) {
            Some(b'm') => alpha += sign * coef,
            Some(b'n') => beta += sign * coef,
            _ => return Err(err(s, "expected 'm' or 'n'")),
        }
        i += 1;
    }
    LinearForm::new(alpha, beta)
}

fn parse_exponent(s: &str, rest: &str) -> Result<i32, LinFormError> {
    let rest = rest.trim();
    if rest.is_empty() {
        return Ok(1);
    }
    let e = rest
        .strip_prefix('^')
        .ok_or_else(|| err(s, "expected '^' after factor"))?
        .trim()
        .trim_start_matches('(')
        .trim_end_matches(')');
    e.trim().parse().map_err(|_| err(s, "bad exponent"))
}

fn parse_constant(s: &str, tok: &str) -> Result<BigRational, LinFormError> {
    let (num, den) = match tok.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (tok.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err(s, format!("bad constant {tok:?}")))?;
    let den: BigInt = den.parse().map_err(|_| err(s, format!("bad constant {tok:?}")))?;
    if den == BigInt::from(0) {
        return Err(err(s, "zero denominator"));
    }
    Ok(BigRational::new(num, den))
}

/// Splits on `*` outside parentheses.
fn split_top(s: &str) -> Result<Vec<&str>, LinFormError> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(err(s, "unbalanced parentheses"));
                }
            }
            '*' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(err(s, "unbalanced parentheses"));
    }
    out.push(&s[start..]);
    Ok(out)
}

pub(super) fn parse_rp(s: &str) -> Result<RationalPolynomialFL, LinFormError> {
    let mut c = BigRational::one();
    let mut factors = Vec::new();
    for tok in split_top(s)? {
        let tok = tok.trim();
        if tok.is_empty() {
            return Err(err(s, "empty factor"));
        }
        if let Some(inner) = tok.strip_prefix('(') {
            let close = inner.find(')').ok_or_else(|| err(s, "missing ')'"))?;
            let form = parse_form(&inner[..close])?;
            let k = parse_exponent(s, &inner[close + 1..])?;
            factors.push((form, k));
        } else if tok.starts_with(['m', 'n']) {
            let form = parse_form(&tok[..1])?;
            let k = parse_exponent(s, &tok[1..])?;
            factors.push((form, k));
        } else {
            c *= parse_constant(s, tok)?;
        }
    }
    RationalPolynomialFL::new(c, factors)
}
