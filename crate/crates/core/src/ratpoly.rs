//! Exact piecewise-polynomial calculus over the rationals.
//!
//! Self-convolutions of the interval indicator are piecewise polynomials with
//! rational coefficients; evaluating them exactly gives the product-form
//! diagram values without any floating-point error to argue about.

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

pub type Rat = Ratio<BigInt>;

pub fn rat(n: i64, d: i64) -> Rat {
    Ratio::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_from_f64(x: f64) -> Option<Rat> {
    Ratio::from_float(x)
}

/// Dense polynomial, coefficients low degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<Rat>);

impl Poly {
    pub fn zero() -> Self {
        Poly(vec![])
    }

    pub fn constant(c: Rat) -> Self {
        if c.is_zero() {
            Poly(vec![])
        } else {
            Poly(vec![c])
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    fn trim(mut self) -> Self {
        while self.0.last().map_or(false, |c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.0.iter().rev() {
            acc = acc * x + rat_to_f64(c);
        }
        acc
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let mut out = vec![Rat::zero(); n];
        for (i, c) in self.0.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.0.iter().enumerate() {
            out[i] += c;
        }
        Poly(out).trim()
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out).trim()
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        Poly(self.0.iter().map(|a| a * c).collect()).trim()
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Poly {
        let mut out = vec![Rat::zero(); self.0.len() + 1];
        for (i, c) in self.0.iter().enumerate() {
            out[i + 1] = c / Rat::from(BigInt::from(i as i64 + 1));
        }
        Poly(out).trim()
    }

    /// Substitute x = alpha + beta t, returning a polynomial in t.
    pub fn compose_linear(&self, alpha: &Rat, beta: &Rat) -> Poly {
        // Horner in the substituted variable
        let lin = Poly(vec![alpha.clone(), beta.clone()]).trim();
        let mut acc = Poly::zero();
        for c in self.0.iter().rev() {
            acc = acc.mul(&lin).add(&Poly::constant(c.clone()));
        }
        acc
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    // Ratio<BigInt> has no lossless to_f64 for huge numerators; go through
    // a scaled conversion that stays exact for the sizes we meet.
    let n = r.numer();
    let d = r.denom();
    big_to_f64(n) / big_to_f64(d)
}

fn big_to_f64(n: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    n.to_f64().unwrap_or(f64::NAN)
}

/// Piecewise polynomial with bounded support; pieces[i] lives on
/// [breaks[i], breaks[i+1]], the function is zero outside.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePoly {
    pub breaks: Vec<Rat>,
    pub pieces: Vec<Poly>,
}

impl PiecewisePoly {
    /// Indicator of [-l/2, l/2].
    pub fn indicator(l: &Rat) -> Self {
        assert!(l.is_positive());
        let half = l / Rat::from(BigInt::from(2));
        PiecewisePoly {
            breaks: vec![-half.clone(), half],
            pieces: vec![Poly::constant(Rat::one())],
        }
    }

    pub fn support(&self) -> (&Rat, &Rat) {
        (
            self.breaks.first().expect("nonempty"),
            self.breaks.last().expect("nonempty"),
        )
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return Rat::zero();
        }
        // last interval is closed on the right
        let mut idx = self.pieces.len() - 1;
        for i in 0..self.pieces.len() {
            if x < &self.breaks[i + 1] {
                idx = i;
                break;
            }
        }
        self.pieces[idx].eval(x)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        rat_to_f64(&self.eval(&rat_from_f64(x).expect("finite x")))
    }

    /// Definite integral over the whole support.
    pub fn integral(&self) -> Rat {
        let mut total = Rat::zero();
        for (i, p) in self.pieces.iter().enumerate() {
            let anti = p.antiderivative();
            total += anti.eval(&self.breaks[i + 1]) - anti.eval(&self.breaks[i]);
        }
        total
    }

    /// Pointwise product; support is the intersection.
    pub fn mul(&self, other: &PiecewisePoly) -> Option<PiecewisePoly> {
        let lo = self.support().0.clone().max(other.support().0.clone());
        let hi = self.support().1.clone().min(other.support().1.clone());
        if lo >= hi {
            return None;
        }
        let mut breaks: Vec<Rat> = self
            .breaks
            .iter()
            .chain(other.breaks.iter())
            .filter(|b| **b >= lo && **b <= hi)
            .cloned()
            .collect();
        breaks.push(lo);
        breaks.push(hi);
        breaks.sort();
        breaks.dedup();
        let mut pieces = Vec::with_capacity(breaks.len() - 1);
        for w in breaks.windows(2) {
            let mid = (&w[0] + &w[1]) / Rat::from(BigInt::from(2));
            let p = self.piece_at(&mid);
            let q = other.piece_at(&mid);
            pieces.push(match (p, q) {
                (Some(p), Some(q)) => p.mul(q),
                _ => Poly::zero(),
            });
        }
        Some(PiecewisePoly { breaks, pieces })
    }

    fn piece_at(&self, x: &Rat) -> Option<&Poly> {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return None;
        }
        for i in 0..self.pieces.len() {
            if x < &self.breaks[i + 1] {
                return Some(&self.pieces[i]);
            }
        }
        self.pieces.last()
    }

    /// Convolution (self * other)(t) = int self(x) other(t - x) dx, exact.
    pub fn convolve(&self, other: &PiecewisePoly) -> PiecewisePoly {
        let mut breaks: Vec<Rat> = Vec::new();
        for a in &self.breaks {
            for b in &other.breaks {
                breaks.push(a + b);
            }
        }
        breaks.sort();
        breaks.dedup();
        let two = Rat::from(BigInt::from(2));
        let mut pieces: Vec<Poly> = Vec::with_capacity(breaks.len() - 1);
        for w in breaks.windows(2) {
            let tm = (&w[0] + &w[1]) / &two;
            let mut acc = Poly::zero();
            for (i, p) in self.pieces.iter().enumerate() {
                let (pa, pb) = (&self.breaks[i], &self.breaks[i + 1]);
                for (j, q) in other.pieces.iter().enumerate() {
                    let (qa, qb) = (&other.breaks[j], &other.breaks[j + 1]);
                    // x-range: [max(pa, t - qb), min(pb, t - qa)]
                    let lo_is_const = pa >= &(&tm - qb);
                    let hi_is_const = pb <= &(&tm - qa);
                    let lo_mid = if lo_is_const { pa.clone() } else { &tm - qb };
                    let hi_mid = if hi_is_const { pb.clone() } else { &tm - qa };
                    if lo_mid >= hi_mid {
                        continue;
                    }
                    let integrand_x = product_in_x(p, q); // coeff of x^k is Poly in t
                    let anti: Vec<Poly> = antiderivative_in_x(&integrand_x);
                    let hi_poly = if hi_is_const {
                        eval_in_x_at(&anti, pb, &Rat::zero())
                    } else {
                        eval_in_x_at(&anti, &(-qa.clone()), &Rat::one())
                    };
                    let lo_poly = if lo_is_const {
                        eval_in_x_at(&anti, pa, &Rat::zero())
                    } else {
                        eval_in_x_at(&anti, &(-qb.clone()), &Rat::one())
                    };
                    acc = acc.add(&hi_poly).add(&lo_poly.scale(&-Rat::one()));
                }
            }
            pieces.push(acc);
        }
        PiecewisePoly { breaks, pieces }.cleaned()
    }

    /// n-fold self convolution (n >= 1).
    pub fn self_convolution(&self, n: u32) -> PiecewisePoly {
        assert!(n >= 1);
        let mut out = self.clone();
        for _ in 1..n {
            out = out.convolve(self);
        }
        out
    }

    fn cleaned(mut self) -> Self {
        // drop zero pieces at the ends so support() stays tight
        while self.pieces.first().map_or(false, |p| p.is_zero()) && self.pieces.len() > 1 {
            self.pieces.remove(0);
            self.breaks.remove(0);
        }
        while self.pieces.last().map_or(false, |p| p.is_zero()) && self.pieces.len() > 1 {
            self.pieces.pop();
            self.breaks.pop();
        }
        self
    }
}

/// p(x) * q(t - x) as a polynomial in x whose coefficients are polys in t.
fn product_in_x(p: &Poly, q: &Poly) -> Vec<Poly> {
    // q(t - x) = sum_j x^j * [sum_{k>=j} c_k C(k,j) (-1)^j t^{k-j}]
    let deg_q = q.0.len();
    let mut q_in_x: Vec<Poly> = Vec::with_capacity(deg_q);
    for j in 0..deg_q {
        let mut coeffs = vec![Rat::zero(); deg_q - j];
        for k in j..deg_q {
            let c = &q.0[k];
            if c.is_zero() {
                continue;
            }
            let mut term = c * Rat::from(binomial(k, j));
            if j % 2 == 1 {
                term = -term;
            }
            coeffs[k - j] += term;
        }
        q_in_x.push(Poly(coeffs).trim());
    }
    // multiply by p(x) (x-degree convolution)
    let mut out = vec![Poly::zero(); p.0.len() + q_in_x.len()];
    for (i, a) in p.0.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in q_in_x.iter().enumerate() {
            out[i + j] = out[i + j].add(&b.scale(a));
        }
    }
    out
}

fn antiderivative_in_x(coeffs: &[Poly]) -> Vec<Poly> {
    let mut out = vec![Poly::zero(); coeffs.len() + 1];
    for (k, c) in coeffs.iter().enumerate() {
        let inv = Ratio::new(BigInt::one(), BigInt::from(k as i64 + 1));
        out[k + 1] = c.scale(&inv);
    }
    out
}

/// Evaluate a polynomial-in-x (with poly-in-t coefficients) at x = alpha + beta t.
fn eval_in_x_at(coeffs: &[Poly], alpha: &Rat, beta: &Rat) -> Poly {
    let lin = Poly(vec![alpha.clone(), beta.clone()]).trim();
    let mut acc = Poly::zero();
    for c in coeffs.iter().rev() {
        acc = acc.mul(&lin).add(c);
    }
    acc
}

fn binomial(n: usize, k: usize) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> PiecewisePoly {
        PiecewisePoly::indicator(&rat(1, 1))
    }

    #[test]
    fn triangle_from_two_indicators() {
        let tri = unit().convolve(&unit());
        // (phi * phi)(t) = 1 - |t| on [-1, 1]
        assert_eq!(tri.eval(&rat(0, 1)), rat(1, 1));
        assert_eq!(tri.eval(&rat(1, 2)), rat(1, 2));
        assert_eq!(tri.eval(&rat(-3, 4)), rat(1, 4));
        assert_eq!(tri.eval(&rat(1, 1)), rat(0, 1));
        assert_eq!(tri.integral(), rat(1, 1));
    }

    #[test]
    fn three_fold_convolution_values() {
        let c3 = unit().self_convolution(3);
        // phi^{*3}(0) = 3/4, support [-3/2, 3/2], mass 1
        assert_eq!(c3.eval(&rat(0, 1)), rat(3, 4));
        assert_eq!(c3.eval(&rat(1, 1)), rat(1, 8));
        assert_eq!(c3.integral(), rat(1, 1));
        let (lo, hi) = c3.support();
        assert_eq!(lo, &rat(-3, 2));
        assert_eq!(hi, &rat(3, 2));
    }

    #[test]
    fn four_fold_convolution_values() {
        let c4 = unit().self_convolution(4);
        assert_eq!(c4.eval(&rat(0, 1)), rat(2, 3));
        assert_eq!(c4.integral(), rat(1, 1));
        // cubic B-spline value at 1: 1/6 (in the unit-interval normalization: (2-|t|)^3/6 at t=1)
        assert_eq!(c4.eval(&rat(1, 1)), rat(1, 6));
    }

    #[test]
    fn product_and_integral() {
        let tri = unit().convolve(&unit());
        let prod = tri.mul(&tri).unwrap();
        // int (1-|t|)^2 dt over [-1,1] = 2/3
        assert_eq!(prod.integral(), rat(2, 3));
        let trip = prod.mul(&tri).unwrap();
        // int (1-|t|)^3 = 1/2
        assert_eq!(trip.integral(), rat(1, 2));
    }

    #[test]
    fn scaled_indicator_mass() {
        let l = rat(7, 3);
        let ind = PiecewisePoly::indicator(&l);
        assert_eq!(ind.integral(), l);
        let c2 = ind.convolve(&ind);
        assert_eq!(c2.integral(), &l * &l);
        assert_eq!(c2.eval(&rat(0, 1)), l);
    }
}
