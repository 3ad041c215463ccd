//! Plain-text group definitions.
//!
//! ```text
//! # Engel algebra
//! name = engel
//! strata = [2, 1, 1]
//! [ (1,1), (1,2) ] = 1*(2,1)
//! [ (1,1), (2,1) ] = (3,1)
//! ```
//!
//! Coefficients are rationals `num` or `num/den`; a missing coefficient means 1.

use num_traits::{One, Zero};

use super::{BasisIndex, StratifiedLieAlgebra};
use crate::error::{CarnotError, Result};
use crate::rational::{fmt_q, parse_q, Q};

fn parse_err(line: usize, msg: impl std::fmt::Display) -> CarnotError {
    CarnotError::Parse(format!("line {line}: {msg}"))
}

fn parse_index(text: &str, line: usize) -> Result<BasisIndex> {
    let inner = text
        .trim()
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| parse_err(line, format!("expected (layer,slot), got `{text}`")))?;
    let (l, v) = inner
        .split_once(',')
        .ok_or_else(|| parse_err(line, format!("expected (layer,slot), got `{text}`")))?;
    let p = |s: &str| s.trim().parse::<usize>().map_err(|_| parse_err(line, format!("bad index `{text}`")));
    Ok(BasisIndex::new(p(l)?, p(v)?))
}

/// Splits `a + b - c` at top-level signs, keeping each sign with its term.
fn split_terms(rhs: &str) -> Vec<String> {
    let mut terms = Vec::new();
    let mut cur = String::new();
    let mut depth = 0i32;
    let mut prev_significant: Option<char> = None;
    for ch in rhs.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        let unary = matches!(prev_significant, None | Some('*') | Some('/') | Some('+') | Some('-'));
        if depth == 0 && (ch == '+' || ch == '-') && !unary && !cur.trim().is_empty() {
            terms.push(std::mem::take(&mut cur));
        }
        if !ch.is_whitespace() {
            prev_significant = Some(ch);
        }
        cur.push(ch);
    }
    if !cur.trim().is_empty() {
        terms.push(cur);
    }
    terms
}

fn parse_term(term: &str, line: usize) -> Result<(Q, BasisIndex)> {
    let t: String = term.chars().filter(|c| !c.is_whitespace()).collect();
    let t = t.strip_prefix('+').unwrap_or(&t);
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-Q::one(), rest.to_string()),
        None => (Q::one(), t.to_string()),
    };
    let (coeff, idx) = match body.rsplit_once('*') {
        Some((c, i)) => (parse_q(c).map_err(|e| parse_err(line, e))?, i.to_string()),
        None => (Q::one(), body),
    };
    Ok((sign * coeff, parse_index(&idx, line)?))
}

/// Parses a group-definition file into an algebra. Structural problems
/// (bad indices, malformed lines) are errors; axiom violations are left
/// for [`StratifiedLieAlgebra::validate`].
pub fn parse_group_file(text: &str) -> Result<StratifiedLieAlgebra> {
    let mut name = String::from("custom");
    let mut alg: Option<StratifiedLieAlgebra> = None;
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let a = alg.as_mut().ok_or_else(|| parse_err(ln, "bracket before `strata = [...]`"))?;
            let (lhs, rhs) = rest
                .split_once(']')
                .ok_or_else(|| parse_err(ln, "missing `]`"))?;
            let rhs = rhs
                .trim()
                .strip_prefix('=')
                .ok_or_else(|| parse_err(ln, "missing `=`"))?;
            let close = lhs.find(')').ok_or_else(|| parse_err(ln, "malformed pair"))?;
            let first = parse_index(&lhs[..=close], ln)?;
            let second = parse_index(lhs[close + 1..].trim().trim_start_matches(','), ln)?;
            let n = a.dim();
            let mut value = vec![Q::zero(); n];
            let rhs = rhs.trim();
            if rhs != "0" {
                for term in split_terms(rhs) {
                    let (c, idx) = parse_term(&term, ln)?;
                    value[a.index(idx).map_err(|e| parse_err(ln, e))?] += c;
                }
            }
            let x = a.index(first).map_err(|e| parse_err(ln, e))?;
            let y = a.index(second).map_err(|e| parse_err(ln, e))?;
            a.set_bracket(x, y, &value)?;
        } else if let Some((key, val)) = line.split_once('=') {
            match key.trim() {
                "strata" => {
                    if alg.is_some() {
                        return Err(parse_err(ln, "duplicate strata"));
                    }
                    let inner = val
                        .trim()
                        .strip_prefix('[')
                        .and_then(|v| v.strip_suffix(']'))
                        .ok_or_else(|| parse_err(ln, "strata must look like [d1, ..., ds]"))?;
                    let dims = inner
                        .split(',')
                        .map(|d| d.trim().parse::<usize>().map_err(|_| parse_err(ln, format!("bad stratum `{d}`"))))
                        .collect::<Result<Vec<_>>>()?;
                    alg = Some(StratifiedLieAlgebra::new(name.clone(), dims)?);
                }
                "name" => {
                    name = val.trim().to_string();
                    if let Some(a) = alg.as_mut() {
                        a.name = name.clone();
                    }
                }
                other => return Err(parse_err(ln, format!("unknown key `{other}`"))),
            }
        } else {
            return Err(parse_err(ln, format!("cannot parse `{line}`")));
        }
    }
    alg.ok_or_else(|| CarnotError::Parse("missing `strata = [...]`".into()))
}

/// Inverse of [`parse_group_file`].
pub fn write_group_file(a: &StratifiedLieAlgebra) -> String {
    let dims: Vec<String> = a.strata().iter().map(ToString::to_string).collect();
    let mut out = format!("name = {}\nstrata = [{}]\n", a.name(), dims.join(", "));
    for (&(x, y), targets) in a.nonzero_brackets() {
        let rhs: Vec<String> = targets
            .iter()
            .map(|(k, c)| format!("{}*{}", fmt_q(c), a.basis_index(*k)))
            .collect();
        out.push_str(&format!("[ {}, {} ] = {}\n", a.basis_index(x), a.basis_index(y), rhs.join(" + ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::builtin;
    use crate::rational::{q_frac, q_int};

    #[test]
    fn parses_engel_with_comments() {
        let text = "# engel\nstrata = [2,1,1]\n[ (1,1), (1,2) ] = 1*(2,1)  # defining\n[ (1,1),(2,1) ] = (3,1)\n";
        let a = parse_group_file(text).unwrap();
        assert_eq!(a.strata(), &[2, 1, 1]);
        assert_eq!(a.structure_constant(0, 2, 3), q_int(1));
        assert!(a.validate().all_passed());
    }

    #[test]
    fn signs_and_fractions() {
        let text = "strata = [2, 2]\n[ (1,2), (1,1) ] = -1/2*(2,1) - (2,2) + 3*(2,1)\n";
        let a = parse_group_file(text).unwrap();
        assert_eq!(a.structure_constant(0, 1, 2), q_frac(-5, 2));
        assert_eq!(a.structure_constant(0, 1, 3), q_int(1));
    }

    #[test]
    fn roundtrip_builtins() {
        for name in ["g235", "free(3,3)", "heisenberg(2)"] {
            let a = builtin(name).unwrap();
            let b = parse_group_file(&write_group_file(&a)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn structural_errors() {
        assert!(parse_group_file("[ (1,1), (1,2) ] = (2,1)").is_err());
        assert!(parse_group_file("strata = [2,1]\n[ (1,1), (1,3) ] = (2,1)").is_err());
        assert!(parse_group_file("strata = [2,1]\n[ (1,1), (1,2) ] = 1/0*(2,1)").is_err());
        assert!(parse_group_file("strata = [2,1]\nfoo").is_err());
        assert!(parse_group_file("# nothing").is_err());
    }
}
