//! Plain-text rendering of sums such as `u0^2/2 - 1/24 + (eps/24) u2`.

use num_traits::{One, Signed, Zero};

use crate::numbers::Rat;
use crate::scalar::{Gauss, ParamKey};

fn power(name: &str, e: u32) -> Option<String> {
    match e {
        0 => None,
        1 => Some(name.to_string()),
        _ => Some(format!("{name}^{e}")),
    }
}

pub fn param_symbol(k: &ParamKey) -> String {
    [power("c", k.c), power("eps", k.eps), power("mu", k.mu)]
        .into_iter()
        .flatten()
        .collect::<Vec<_>>()
        .join(" ")
}

/// Renders `r * sym` without its sign; `sym` may be empty.
fn magnitude(r: &Rat, sym: &str) -> String {
    let r = r.abs();
    let (n, d) = (r.numer().clone(), r.denom().clone());
    match (sym.is_empty(), d.is_one(), n.is_one()) {
        (true, true, _) => n.to_string(),
        (true, false, _) => format!("{n}/{d}"),
        (false, true, true) => sym.to_string(),
        (false, true, false) => format!("{n} {sym}"),
        (false, false, true) => format!("{sym}/{d}"),
        (false, false, false) => format!("{n} {sym}/{d}"),
    }
}

/// Signed pieces for a Gaussian coefficient times a symbol.
fn pieces(g: &Gauss, sym: &str) -> Vec<(bool, String)> {
    let mut out = Vec::new();
    if !g.re.is_zero() {
        out.push((g.re.is_negative(), magnitude(&g.re, sym)));
    }
    if !g.im.is_zero() {
        let isym = if sym.is_empty() { "i".to_string() } else { format!("i {sym}") };
        out.push((g.im.is_negative(), magnitude(&g.im, &isym)));
    }
    out
}

/// Joins terms into `a + b - c`; empty input renders as `0`.
pub fn sum(items: &[(Gauss, String)]) -> String {
    let mut s = String::new();
    for (g, sym) in items {
        for (neg, body) in pieces(g, sym) {
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            s.push_str(&body);
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

/// Wraps a rendered sum in parentheses when it has more than one term.
pub fn group(body: &str) -> String {
    let inner = body.trim_start_matches('-');
    if inner.contains(" + ") || inner.contains(" - ") {
        format!("({body})")
    } else {
        body.to_string()
    }
}

/// Joins per-power bodies as `b0 + (eps/24) b1 + (eps/24)^2 b2 ...`; `parts` holds
/// `(j, rendered coefficient of (eps/24)^j)` with zero bodies already removed.
pub fn eps_grouped(parts: &[(u32, String)]) -> String {
    let mut out = String::new();
    for (j, body) in parts {
        let (neg, text) = if *j == 0 {
            match body.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, body.clone()),
            }
        } else {
            let prefix = if *j == 1 { "(eps/24)".to_string() } else { format!("(eps/24)^{j}") };
            let grouped = group(body);
            match grouped.strip_prefix('-') {
                Some(rest) => (true, format!("{prefix} {rest}")),
                None => (false, format!("{prefix} {grouped}")),
            }
        };
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&text);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::rat;

    #[test]
    fn renders_paper_style() {
        let items = vec![
            (Gauss::from_rat(rat(1, 2)), "u0^2".to_string()),
            (Gauss::from_rat(rat(-1, 24)), String::new()),
            (Gauss::from_rat(rat(7, 10)), "u2^2".to_string()),
        ];
        assert_eq!(sum(&items), "u0^2/2 - 1/24 + 7 u2^2/10");
        assert_eq!(sum(&[]), "0");
        assert_eq!(group("a - b"), "(a - b)");
        assert_eq!(group("u2"), "u2");
        assert_eq!(sum(&[(Gauss::new(Rat::one(), rat(-2, 1)), "c".into())]), "c - 2 i c");
        let parts = vec![(0, "-1/24".to_string()), (1, "-u2".to_string()), (2, "u0 - u4".to_string())];
        assert_eq!(eps_grouped(&parts), "-1/24 - (eps/24) u2 + (eps/24)^2 (u0 - u4)");
    }
}
