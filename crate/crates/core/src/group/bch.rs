//! Dynkin's form of the Baker–Campbell–Hausdorff series, truncated at the step.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::algebra::StratifiedLieAlgebra;
use crate::poly::Polynomial;
use crate::rational::{q_int, Q};

/// Coefficient of each word over `{X = 0, Y = 1}` in Dynkin's series, where
/// the word `w1 w2 … wk` stands for `[w1, [w2, … [w_{k-1}, w_k]]]`.
pub fn dynkin_words(max_len: usize) -> BTreeMap<Vec<u8>, Q> {
    let mut out: BTreeMap<Vec<u8>, Q> = BTreeMap::new();
    let mut factorial = vec![Q::one()];
    for k in 1..=max_len {
        let prev = factorial[k - 1].clone();
        factorial.push(prev * q_int(k as i64));
    }

    // Each block is (r_i, s_i) with r_i + s_i >= 1; blocks concatenate X^r Y^s.
    fn recurse(
        blocks: &mut Vec<(usize, usize)>,
        len: usize,
        max_len: usize,
        factorial: &[Q],
        out: &mut BTreeMap<Vec<u8>, Q>,
    ) {
        if !blocks.is_empty() {
            let m = blocks.len();
            let mut c = Q::new(
                if m % 2 == 1 { 1.into() } else { (-1).into() },
                (m as i64).into(),
            );
            c /= q_int(len as i64);
            let mut word = Vec::with_capacity(len);
            for &(r, s) in blocks.iter() {
                c /= &factorial[r] * &factorial[s];
                word.extend(std::iter::repeat(0u8).take(r));
                word.extend(std::iter::repeat(1u8).take(s));
            }
            *out.entry(word).or_insert_with(Q::zero) += c;
        }
        for r in 0..=max_len - len {
            for s in 0..=max_len - len - r {
                if r + s == 0 {
                    continue;
                }
                blocks.push((r, s));
                recurse(blocks, len + r + s, max_len, factorial, out);
                blocks.pop();
            }
        }
    }

    recurse(&mut Vec::new(), 0, max_len, &factorial, &mut out);
    out.retain(|w, c| !c.is_zero() && !ends_in_repeat(w));
    out
}

fn ends_in_repeat(w: &[u8]) -> bool {
    w.len() >= 2 && w[w.len() - 1] == w[w.len() - 2]
}

/// BCH product `log(exp x · exp y)` over any coefficient ring.
pub fn bch_generic<R: crate::rational::Ring>(alg: &StratifiedLieAlgebra, x: &[R], y: &[R]) -> Vec<R> {
    let words = dynkin_words(alg.step());
    let mut memo: BTreeMap<Vec<u8>, Vec<R>> = BTreeMap::new();
    memo.insert(vec![0], x.to_vec());
    memo.insert(vec![1], y.to_vec());
    let mut out = vec![R::zero(); alg.dim()];
    for (word, c) in &words {
        let value = nested(alg, word, &mut memo);
        for (o, v) in out.iter_mut().zip(&value) {
            if !v.is_zero() {
                o.add_assign(&v.scale_q(c));
            }
        }
    }
    out
}

fn nested<R: crate::rational::Ring>(alg: &StratifiedLieAlgebra, word: &[u8], memo: &mut BTreeMap<Vec<u8>, Vec<R>>) -> Vec<R> {
    if let Some(v) = memo.get(word) {
        return v.clone();
    }
    let head = memo[&word[..1].to_vec()].clone();
    let tail = nested(alg, &word[1..], memo);
    let v = alg.bracket_generic(&head, &tail);
    memo.insert(word.to_vec(), v.clone());
    v
}

/// The group law as `n` polynomials in `x_0..x_{n-1}, y_0..y_{n-1}` (variables `0..2n`).
pub fn group_law(alg: &StratifiedLieAlgebra) -> Vec<Polynomial> {
    let n = alg.dim();
    let x: Vec<Polynomial> = (0..n).map(Polynomial::var).collect();
    let y: Vec<Polynomial> = (0..n).map(|a| Polynomial::var(n + a)).collect();
    bch_generic(alg, &x, &y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::builtin;
    use crate::rational::q_frac;

    fn lin(a: &[Q], ca: Q, b: &[Q], cb: Q) -> Vec<Q> {
        a.iter().zip(b).map(|(u, v)| u * &ca + v * &cb).collect()
    }

    /// Explicit BCH through degree four.
    fn oracle(alg: &StratifiedLieAlgebra, x: &[Q], y: &[Q]) -> Vec<Q> {
        let br = |a: &[Q], b: &[Q]| alg.bracket_generic(a, b);
        let xy = br(x, y);
        let xxy = br(x, &xy);
        let yxy = br(y, &xy);
        let yxxy = br(y, &xxy);
        let mut out = lin(x, q_int(1), y, q_int(1));
        out = lin(&out, q_int(1), &xy, q_frac(1, 2));
        out = lin(&out, q_int(1), &xxy, q_frac(1, 12));
        out = lin(&out, q_int(1), &yxy, q_frac(-1, 12));
        lin(&out, q_int(1), &yxxy, q_frac(-1, 24))
    }

    #[test]
    fn matches_explicit_series_through_step_four() {
        let alg = builtin("free(2,4)").unwrap();
        let n = alg.dim();
        let x: Vec<Q> = (0..n).map(|i| q_frac(i as i64 * 3 - 7, 5)).collect();
        let y: Vec<Q> = (0..n).map(|i| q_frac(11 - 2 * i as i64, 3)).collect();
        assert_eq!(bch_generic(&alg, &x, &y), oracle(&alg, &x, &y));
    }
}
