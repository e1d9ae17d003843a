//! Helpers around [`BigRational`], the only coefficient type in the kernel.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Reduced `p` or `p/q` form, sign in front.
pub fn format_q(value: &Q) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Parses `p`, `-p` or `p/q` (with optional sign). No decimals.
pub fn parse_q(text: &str) -> Option<Q> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let is_int = |s: &str| {
        let digits = s.strip_prefix('-').or_else(|| s.strip_prefix('+')).unwrap_or(s);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !is_int(num) || !den.bytes().all(|b| b.is_ascii_digit()) || den.is_empty() {
        return None;
    }
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Q::new(n, d))
}

/// Writes `coefficient * body` the way terms appear inside a sum, where the
/// sign has already been emitted by the caller. `body` empty means a scalar.
pub(crate) fn scaled_body(magnitude: &Q, body: &str) -> String {
    debug_assert!(!magnitude.is_negative());
    if body.is_empty() {
        format_q(magnitude)
    } else if magnitude.is_one() {
        body.to_string()
    } else {
        format!("{}*{}", format_q(magnitude), body)
    }
}

/// Joins signed terms into `t0 + t1 - t2` form; `0` when empty.
pub(crate) fn join_signed<I>(terms: I) -> String
where
    I: IntoIterator<Item = (bool, String)>,
{
    let mut out = String::new();
    for (negative, body) in terms {
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else if negative {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&body);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
