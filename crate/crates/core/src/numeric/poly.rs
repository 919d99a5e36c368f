use num_traits::{One, Signed, Zero};

use super::{int, ldl, Mat, Rat};
use crate::error::{Error, Result};

/// Polynomial with rational coefficients, lowest degree first. The zero
/// polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(Vec<Rat>);

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lead(&self) -> &Rat {
        self.0.last().expect("non-zero polynomial")
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.0.iter().rev().fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    /// Quotient and remainder of euclidean division.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let mut rem = self.0.clone();
        let dd = divisor.degree();
        if self.is_zero() || self.degree() < dd {
            return (Poly::new(vec![]), self.clone());
        }
        let mut quot = vec![Rat::zero(); self.degree() - dd + 1];
        let lead = divisor.lead();
        for shift in (0..quot.len()).rev() {
            let c = &rem[shift + dd] / lead;
            if c.is_zero() {
                continue;
            }
            for (i, d) in divisor.0.iter().enumerate() {
                rem[shift + i] -= &c * d;
            }
            quot[shift] = c;
        }
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let lead = self.lead().clone();
        Poly::new(self.0.iter().map(|c| c / &lead).collect())
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `self / gcd(self, self')`: same roots, all simple.
    pub fn square_free(&self) -> Poly {
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            self.monic()
        } else {
            self.div_rem(&g).0.monic()
        }
    }
}

/// Characteristic polynomial `det(xI - m)` by Faddeev-LeVerrier, lowest
/// degree first and monic.
pub fn char_poly(m: &Mat) -> Result<Poly> {
    if !m.is_square() {
        return Err(Error::dim(format!(
            "characteristic polynomial needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let mut coeffs = vec![Rat::zero(); n + 1];
    coeffs[n] = Rat::one();
    let mut acc = Mat::zeros(n, n);
    for k in 1..=n {
        // acc = m * acc_prev + c_{n-k+1} I
        let mut next = m.mul(&acc)?;
        for i in 0..n {
            let v = next.get(i, i) + &coeffs[n - k + 1];
            next.set(i, i, v);
        }
        acc = next;
        let tr = m.mul(&acc)?.trace();
        coeffs[n - k] = -tr / int(k as i64);
    }
    Ok(Poly::new(coeffs))
}

/// Sturm sequence of a square-free polynomial.
#[derive(Clone, Debug)]
pub struct SturmChain(Vec<Poly>);

impl SturmChain {
    pub fn new(p: &Poly) -> Self {
        let p = p.square_free();
        let mut chain = vec![p.clone(), p.derivative()];
        while !chain.last().unwrap().is_zero() {
            let len = chain.len();
            let (_, r) = chain[len - 2].div_rem(&chain[len - 1]);
            chain.push(Poly::new(r.0.into_iter().map(|c| -c).collect()));
        }
        chain.pop();
        SturmChain(chain)
    }

    fn sign_changes(&self, x: &Rat) -> usize {
        let signs: Vec<bool> = self
            .0
            .iter()
            .map(|p| p.eval(x))
            .filter(|v| !v.is_zero())
            .map(|v| v.is_positive())
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Number of distinct real roots in the half-open interval `(lo, hi]`.
    pub fn count_roots(&self, lo: &Rat, hi: &Rat) -> usize {
        assert!(lo <= hi, "empty interval");
        self.sign_changes(lo) - self.sign_changes(hi)
    }
}

/// Certified rational lower bound `L` for the smallest eigenvalue of a
/// positive definite symmetric matrix: `0 < L <= λ_min` and `λ_min - L <= eps`.
///
/// Bisects with Sturm counts on the characteristic polynomial, starting from
/// `(0, min diagonal]` (a diagonal entry is a Rayleigh quotient, hence an upper
/// bound for `λ_min`).
pub fn eigenvalue_lower_bound(q: &Mat, eps: &Rat) -> Result<Rat> {
    super::check_positive(eps, "eps")?;
    ldl(q)?;
    let chain = SturmChain::new(&char_poly(q)?);
    let zero = Rat::zero();
    let mut lo = Rat::zero();
    let mut hi = (0..q.rows())
        .map(|i| q.get(i, i).clone())
        .min()
        .ok_or_else(|| Error::invalid("empty matrix has no eigenvalues"))?;
    debug_assert!(chain.count_roots(&zero, &hi) >= 1);
    while &hi - &lo > *eps || lo.is_zero() {
        let mid = (&lo + &hi) / int(2);
        if chain.count_roots(&zero, &mid) == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
