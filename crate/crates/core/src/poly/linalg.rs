use super::RationalFunction;
use crate::error::{Error, Result};

pub type Matrix = Vec<Vec<RationalFunction>>;

/// `J[i][j] = ∂fs[i]/∂x_{vars[j]}`.
pub fn jacobian(fs: &[RationalFunction], vars: &[usize]) -> Matrix {
    fs.iter()
        .map(|f| vars.iter().map(|&j| f.derive(j)).collect())
        .collect()
}

pub fn jacobian_det(fs: &[RationalFunction], vars: &[usize]) -> Result<RationalFunction> {
    if fs.len() != vars.len() {
        return Err(Error::dim(format!(
            "{} functions against {} variables",
            fs.len(),
            vars.len()
        )));
    }
    let nvars = fs
        .first()
        .map(|f| f.nvars())
        .ok_or_else(|| Error::dim("empty jacobian"))?;
    Ok(det(&jacobian(fs, vars), nvars))
}

/// Determinant by cofactor expansion along the first row. Division-free, so
/// the result keeps the denominators of the entries only.
pub fn det(m: &Matrix, nvars: usize) -> RationalFunction {
    let n = m.len();
    let cols: Vec<usize> = (0..n).collect();
    det_minor(m, 0, &cols, nvars)
}

fn det_minor(m: &Matrix, row: usize, cols: &[usize], nvars: usize) -> RationalFunction {
    if cols.is_empty() {
        return RationalFunction::one(nvars);
    }
    if cols.len() == 1 {
        return m[row][cols[0]].clone();
    }
    let mut acc = RationalFunction::zero(nvars);
    for (pos, &c) in cols.iter().enumerate() {
        let entry = &m[row][c];
        if entry.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&k| k != c).collect();
        let term = entry * &det_minor(m, row + 1, &rest, nvars);
        acc = if pos % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

/// Solves `m · v = b` exactly by Gaussian elimination over the field of
/// rational functions. Fails with [`Error::Singular`] when the determinant is
/// identically zero; vanishing at particular points is not detected here.
pub fn solve_linear(m: &Matrix, b: &[RationalFunction]) -> Result<Vec<RationalFunction>> {
    let n = m.len();
    if b.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(Error::dim("solve_linear expects a square system"));
    }
    let mut a: Matrix = m.to_vec();
    let mut rhs: Vec<RationalFunction> = b.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !a[r][col].is_zero())
            .min_by_key(|&r| a[r][col].numerator().len())
            .ok_or(Error::Singular)?;
        a.swap(col, pivot);
        rhs.swap(col, pivot);
        let inv = a[col][col].inv()?;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] * &inv;
            for c in col..n {
                let t = &factor * &a[col][c];
                a[r][c] = &a[r][c] - &t;
            }
            let t = &factor * &rhs[col];
            rhs[r] = &rhs[r] - &t;
        }
    }
    let mut x: Vec<RationalFunction> = vec![RationalFunction::zero(rhs[0].nvars()); n];
    for r in (0..n).rev() {
        let mut acc = rhs[r].clone();
        for c in r + 1..n {
            acc = &acc - &(&a[r][c] * &x[c]);
        }
        x[r] = acc.checked_div(&a[r][r])?;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_expr;

    fn vars() -> Vec<String> {
        vec!["x1".into(), "x2".into()]
    }
    fn p(s: &str) -> RationalFunction {
        parse_expr(s, &vars()).unwrap()
    }

    #[test]
    fn jacobian_determinants() {
        assert_eq!(jacobian_det(&[p("x1"), p("x2")], &[0, 1]).unwrap(), p("1"));
        assert_eq!(jacobian_det(&[p("x1^2"), p("x2")], &[0, 1]).unwrap(), p("2*x1"));
        assert!(jacobian_det(&[p("x1"), p("x1")], &[0, 1]).unwrap().is_zero());
    }

    #[test]
    fn solves_systems() {
        let id = vec![vec![p("1"), p("0")], vec![p("0"), p("1")]];
        let b = vec![p("x1/(1+x2)"), p("x2^3")];
        assert_eq!(solve_linear(&id, &b).unwrap(), b);

        let m = vec![vec![p("2*x1"), p("0")], vec![p("0"), p("1")]];
        let sol = solve_linear(&m, &[p("4*x1^3"), p("1")]).unwrap();
        assert_eq!(sol, vec![p("2*x1^2"), p("1")]);
    }

    #[test]
    fn singular_matrix() {
        let m = vec![vec![p("x1"), p("x1")], vec![p("x1"), p("x1")]];
        assert_eq!(solve_linear(&m, &[p("1"), p("1")]).unwrap_err(), Error::Singular);
    }
}
