//! Exact rational arithmetic helpers used by the polytope layer.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;
pub type QVec = Vec<Q>;

/// Longest rational literal accepted by [`parse_rational`].
pub const MAX_LITERAL_LEN: usize = 64;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qfrac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qvec(xs: &[i64]) -> QVec {
    xs.iter().map(|&x| q(x)).collect()
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Ratio of huge integers: fall back to scaled division.
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn to_f64_vec(xs: &[Q]) -> Vec<f64> {
    xs.iter().map(to_f64).collect()
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn dot_qf(a: &[Q], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| to_f64(x) * y).sum()
}

/// Exact binary value of a finite float.
pub fn from_f64(x: f64) -> Option<Q> {
    Q::from_float(x)
}

/// Formats as `p/q`, or `p` when the denominator is one.
pub fn format_rational(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `p/q`, a signed integer, or a plain decimal such as `-0.125` or `2.5e-3`.
pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    if s.is_empty() || s.len() > MAX_LITERAL_LEN {
        return None;
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_int(num)?;
        let d = parse_int(den)?;
        if d.is_zero() {
            return None;
        }
        return Some(Q::new(n, d));
    }
    parse_decimal(s)
}

fn parse_int(s: &str) -> Option<BigInt> {
    let s = s.trim();
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn parse_decimal(s: &str) -> Option<Q> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = s[i + 1..].parse().ok()?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    if exponent.abs() > 40 {
        return None;
    }
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Q::from_integer(digits.parse::<BigInt>().ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    if scale >= 0 {
        value *= Q::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Q::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -value } else { value })
}

/// Solves the square system `m x = rhs` exactly; `None` when singular.
pub fn solve(m: &[QVec], rhs: &[Q]) -> Option<QVec> {
    let n = m.len();
    let mut a: Vec<QVec> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for k in col..=n {
            a[col][k] = &a[col][k] * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for k in col..=n {
                    let delta = &factor * &a[col][k];
                    a[r][k] -= delta;
                }
            }
        }
    }
    Some(a.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Rank of a list of row vectors.
pub fn rank(rows: &[QVec]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut a: Vec<QVec> = rows.to_vec();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..a.len() {
            if !a[i][c].is_zero() {
                let factor = &a[i][c] / &a[r][c];
                for k in c..cols {
                    let delta = &factor * &a[r][k];
                    a[i][k] -= delta;
                }
            }
        }
        r += 1;
        if r == a.len() {
            break;
        }
    }
    r
}

/// Dimension of the affine hull of `points` (`0` for a single point).
pub fn affine_rank(points: &[&QVec]) -> usize {
    match points.split_first() {
        None => 0,
        Some((p0, rest)) => {
            let diffs: Vec<QVec> = rest
                .iter()
                .map(|p| p.iter().zip(p0.iter()).map(|(a, b)| a - b).collect())
                .collect();
            rank(&diffs)
        }
    }
}

/// Determinant by exact elimination.
pub fn det(m: &[QVec]) -> Q {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let factor = &a[i][c] / &a[c][c];
                for k in c..n {
                    let delta = &factor * &a[c][k];
                    a[i][k] -= delta;
                }
            }
        }
    }
    d
}

pub fn abs(x: &Q) -> Q {
    x.abs()
}

pub fn is_integral(x: &Q) -> bool {
    x.is_integer()
}

pub fn factorial(n: usize) -> Q {
    Q::from_integer((1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(parse_rational("3/6"), Some(qfrac(1, 2)));
        assert_eq!(parse_rational("-7"), Some(q(-7)));
        assert_eq!(parse_rational("0.125"), Some(qfrac(1, 8)));
        assert_eq!(parse_rational("-2.5e-1"), Some(qfrac(-1, 4)));
        assert_eq!(parse_rational("1e2"), Some(q(100)));
        assert_eq!(parse_rational(".5"), Some(qfrac(1, 2)));
        for bad in ["", "1/0", "abc", "1/2/3", "--1", ".", "1e999", "0x10", "1.2.3"] {
            assert_eq!(parse_rational(bad), None, "{bad}");
        }
    }

    #[test]
    fn format_is_inverse_of_parse() {
        for s in ["1/3", "-5", "0", "22/7"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
    }

    #[test]
    fn solve_and_det() {
        let m = vec![qvec(&[2, 1]), qvec(&[1, 3])];
        let x = solve(&m, &qvec(&[3, 5])).unwrap();
        assert_eq!(x, vec![qfrac(4, 5), qfrac(7, 5)]);
        assert_eq!(det(&m), q(5));
        assert!(solve(&[qvec(&[1, 2]), qvec(&[2, 4])], &qvec(&[1, 1])).is_none());
        assert_eq!(rank(&[qvec(&[1, 2]), qvec(&[2, 4])]), 1);
    }
}
