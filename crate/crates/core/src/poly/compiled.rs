use super::{Polynomial, RationalFunction};

/// Rational function with coefficients rounded to `f64`, for inner loops
/// (Newton iterations) where exact evaluation is too slow. Not used for any
/// value that is reported exactly.
#[derive(Clone, Debug)]
pub struct CompiledRational {
    num: CompiledPoly,
    den: Vec<(CompiledPoly, i32)>,
}

#[derive(Clone, Debug)]
struct CompiledPoly {
    terms: Vec<(f64, Vec<i32>)>,
}

impl CompiledPoly {
    fn new(p: &Polynomial) -> Self {
        CompiledPoly {
            terms: p.to_f64_terms(),
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, e)| {
                e.iter()
                    .zip(x)
                    .fold(*c, |acc, (&k, &v)| if k == 0 { acc } else { acc * v.powi(k) })
            })
            .sum()
    }
}

impl CompiledRational {
    pub fn new(f: &RationalFunction) -> Self {
        CompiledRational {
            num: CompiledPoly::new(f.numerator()),
            den: f
                .denominator_factors()
                .iter()
                .map(|(q, e)| (CompiledPoly::new(q), *e as i32))
                .collect(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let d: f64 = self.den.iter().map(|(q, e)| q.eval(x).powi(*e)).product();
        self.num.eval(x) / d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_expr;

    #[test]
    fn matches_exact_evaluation_closely() {
        let vars = vec!["x".to_string(), "y".to_string()];
        let f = parse_expr("(4+x)^3/x^2 + y/(1+x*y)", &vars).unwrap();
        let c = CompiledRational::new(&f);
        let p = [1.375, 0.25];
        let exact = f.eval_f64(&p).unwrap();
        assert!((c.eval(&p) - exact).abs() <= 1e-13 * exact.abs());
    }
}
