//! Real polynomials and Sturm-sequence root isolation.

use serde::{Deserialize, Serialize};

/// Coefficients in ascending order: `c[0] + c[1] x + …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<f64>,
}

/// A real root located by [`Poly::real_roots`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub value: f64,
    /// `|p'(value)| ≥ 1e-9 · scale`.
    pub simple: bool,
}

impl Poly {
    /// Trailing (highest-order) zeros are dropped.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::new(vec![0.0]);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    /// Largest coefficient magnitude.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()))
    }

    /// Cauchy bound: every root satisfies `|x| < bound`.
    pub fn root_bound(&self) -> f64 {
        let lead = *self.coeffs.last().unwrap();
        if lead == 0.0 {
            return 0.0;
        }
        let m = self.coeffs[..self.degree()]
            .iter()
            .fold(0.0_f64, |m, c| m.max((c / lead).abs()));
        1.0 + m
    }

    /// Quotient and remainder of `self / d`. Remainder coefficients below
    /// `eps` relative to the operands' scale are set to zero.
    fn div_rem(&self, d: &Poly, eps: f64) -> (Poly, Poly) {
        let mut r = self.coeffs.clone();
        let dd = d.degree();
        let lead = d.coeffs[dd];
        let scale = self.scale().max(d.scale());
        let mut q = vec![0.0; r.len().saturating_sub(dd).max(1)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1;
            let f = r[k] / lead;
            q[k - dd] = f;
            for (j, &c) in d.coeffs.iter().enumerate() {
                r[k - dd + j] -= f * c;
            }
            r.pop();
        }
        for c in &mut r {
            if c.abs() <= eps * scale {
                *c = 0.0;
            }
        }
        (Poly::new(q), Poly::new(r))
    }

    /// `p / gcd(p, p')`: same roots, all simple.
    pub fn square_free(&self) -> Poly {
        let seq = self.sturm_sequence();
        let g = seq.last().unwrap();
        if seq.len() < 2 || g.degree() == 0 {
            return self.clone();
        }
        self.div_rem(g, 0.0).0
    }

    /// `p, p', -rem(p, p'), …`.
    pub fn sturm_sequence(&self) -> Vec<Poly> {
        let mut seq = vec![self.clone(), self.derivative()];
        while !seq.last().unwrap().is_zero() && seq.last().unwrap().degree() > 0 {
            let n = seq.len();
            let r = seq[n - 2].div_rem(&seq[n - 1], 1e-13).1;
            if r.is_zero() {
                break;
            }
            seq.push(Poly::new(r.coeffs.iter().map(|c| -c).collect()));
        }
        seq.retain(|p| !p.is_zero());
        seq
    }

    /// Number of distinct real roots in `(a, b]`.
    pub fn count_roots(&self, a: f64, b: f64) -> usize {
        let seq = self.sturm_sequence();
        sign_changes(&seq, a).saturating_sub(sign_changes(&seq, b))
    }

    /// Distinct real roots, ascending, refined by bisection to `tol`.
    pub fn real_roots(&self, tol: f64) -> Vec<Root> {
        if self.is_zero() || self.degree() == 0 {
            return Vec::new();
        }
        // locate on the square-free part, where every root changes sign
        let sf = self.square_free();
        let seq = sf.sturm_sequence();
        let b = self.root_bound().max(sf.root_bound());
        let mut roots = Vec::new();
        isolate(&sf, &seq, -b, b, tol, &mut roots, 0);
        let dp = self.derivative();
        let scale = self.scale();
        roots
            .into_iter()
            .map(|x| Root {
                value: x,
                simple: dp.eval(x).abs() >= 1e-9 * scale * (1.0 + x.abs()).powi(self.degree() as i32 - 1),
            })
            .collect()
    }
}

fn sign_changes(seq: &[Poly], x: f64) -> usize {
    let mut count = 0;
    let mut prev = 0.0;
    for p in seq {
        let v = p.eval(x);
        if v == 0.0 {
            continue;
        }
        if prev != 0.0 && (v > 0.0) != (prev > 0.0) {
            count += 1;
        }
        prev = v;
    }
    count
}

fn isolate(p: &Poly, seq: &[Poly], a: f64, b: f64, tol: f64, out: &mut Vec<f64>, depth: usize) {
    let n = sign_changes(seq, a).saturating_sub(sign_changes(seq, b));
    if n == 0 {
        return;
    }
    if b - a <= tol || depth > 200 {
        out.push(0.5 * (a + b));
        return;
    }
    if n == 1 {
        out.push(bisect_single(p, seq, a, b, tol));
        return;
    }
    let m = 0.5 * (a + b);
    isolate(p, seq, a, m, tol, out, depth + 1);
    isolate(p, seq, m, b, tol, out, depth + 1);
}

/// Bisection for the single root in `(a, b]`: on the sign of `p` once it
/// brackets, on the Sturm count before that.
fn bisect_single(p: &Poly, seq: &[Poly], mut a: f64, mut b: f64, tol: f64) -> f64 {
    if p.eval(b) == 0.0 {
        return b;
    }
    let vb = sign_changes(seq, b);
    while p.eval(a) * p.eval(b) > 0.0 && b - a > tol {
        let m = 0.5 * (a + b);
        if sign_changes(seq, m) > vb {
            a = m;
        } else {
            b = m;
        }
    }
    let mut fa = p.eval(a);
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = p.eval(m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_derivative() {
        let p = Poly::new(vec![1.0, -3.0, 0.0, 2.0, 0.0]);
        assert_eq!(p.degree(), 3);
        assert_eq!(p.eval(2.0), 11.0);
        assert_eq!(p.derivative().coeffs(), &[-3.0, 0.0, 6.0]);
    }

    #[test]
    fn distinct_roots() {
        // (x+2)(x-1)(x-3)
        let p = Poly::new(vec![6.0, -5.0, -2.0, 1.0]);
        let roots = p.real_roots(1e-13);
        let vals: Vec<f64> = roots.iter().map(|r| r.value).collect();
        assert_eq!(vals.len(), 3);
        for (got, want) in vals.iter().zip([-2.0, 1.0, 3.0]) {
            assert!((got - want).abs() < 1e-10);
        }
        assert!(roots.iter().all(|r| r.simple));
        assert_eq!(p.count_roots(-10.0, 0.0), 1);
    }

    #[test]
    fn double_root_is_not_simple() {
        // (x+1)^2 (x-2)
        let p = Poly::new(vec![-2.0, -3.0, 0.0, 1.0]);
        let roots = p.real_roots(1e-13);
        assert_eq!(roots.len(), 2, "{roots:?}");
        assert!(!roots[0].simple && (roots[0].value + 1.0).abs() < 1e-6, "{roots:?}");
        assert!(roots[1].simple && (roots[1].value - 2.0).abs() < 1e-10);
    }

    #[test]
    fn triple_root_and_square_free_part() {
        // (x+1)^3 (x-0.5) = x^4 + 2.5x^3 + 1.5x^2 - 0.5x - 0.5
        let p = Poly::new(vec![-0.5, -0.5, 1.5, 2.5, 1.0]);
        assert_eq!(p.square_free().degree(), 2);
        let roots = p.real_roots(1e-14);
        assert_eq!(roots.len(), 2, "{roots:?}");
        assert!(!roots[0].simple && (roots[0].value + 1.0).abs() < 1e-9);
        assert!(roots[1].simple && (roots[1].value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn no_real_roots() {
        assert!(Poly::new(vec![1.0, 0.0, 1.0]).real_roots(1e-12).is_empty());
        assert!(Poly::new(vec![3.0]).real_roots(1e-12).is_empty());
    }

    #[test]
    fn close_roots_are_separated() {
        // (x - 1)(x - 1.001)
        let p = Poly::new(vec![1.001, -2.001, 1.0]);
        let roots = p.real_roots(1e-14);
        assert_eq!(roots.len(), 2);
        assert!((roots[0].value - 1.0).abs() < 1e-9);
        assert!((roots[1].value - 1.001).abs() < 1e-9);
    }
}
