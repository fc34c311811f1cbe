use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use super::monomial::Monomial;
use crate::scalar::Real;

/// Coefficients with absolute value below this are dropped on construction.
pub const DROP_TOL: f64 = 1e-12;

/// Sparse polynomial with real coefficients in a fixed number of variables.
///
/// The zero polynomial has an empty term map and no degree.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    from = "PolynomialRepr<T>",
    into = "PolynomialRepr<T>",
    bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>")
)]
pub struct Polynomial<T: Real> {
    nvars: usize,
    terms: BTreeMap<Monomial, T>,
}

#[derive(Serialize, Deserialize)]
struct PolynomialRepr<T> {
    nvars: usize,
    terms: Vec<(Monomial, T)>,
}

impl<T: Real> From<PolynomialRepr<T>> for Polynomial<T> {
    fn from(r: PolynomialRepr<T>) -> Self {
        Polynomial::from_terms(r.nvars, r.terms)
    }
}

impl<T: Real> From<Polynomial<T>> for PolynomialRepr<T> {
    fn from(p: Polynomial<T>) -> Self {
        PolynomialRepr {
            nvars: p.nvars,
            terms: p.terms.into_iter().collect(),
        }
    }
}

impl<T: Real> Polynomial<T> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        Self::from_terms(nvars, [(Monomial::one(nvars), c)])
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        Self::from_terms(nvars, [(Monomial::var(nvars, index), T::one())])
    }

    pub fn monomial(m: Monomial, c: T) -> Self {
        let n = m.nvars();
        Self::from_terms(n, [(m, c)])
    }

    /// Builds a polynomial, summing repeated monomials and dropping
    /// coefficients below [`DROP_TOL`].
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, T)>) -> Self {
        let mut map = BTreeMap::new();
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars, "monomial arity mismatch");
            *map.entry(m).or_insert_with(T::zero) += c;
        }
        let mut p = Polynomial { nvars, terms: map };
        p.prune(T::of(DROP_TOL));
        p
    }

    /// Removes every coefficient with `|c| < tol`.
    pub fn prune(&mut self, tol: T) {
        self.terms.retain(|_, c| c.abs() >= tol);
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &T)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> T {
        self.terms.get(m).copied().unwrap_or_else(T::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Leading term under graded lex order.
    pub fn leading_term(&self) -> Option<(&Monomial, T)> {
        self.terms
            .iter()
            .max_by(|a, b| a.0.grlex_cmp(b.0))
            .map(|(m, c)| (m, *c))
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(m, c)| (m.clone(), *c * s)))
    }

    /// Rescales so the leading coefficient is one.
    pub fn monic(&self) -> Self {
        match self.leading_term() {
            Some((_, c)) => self.scale(T::one() / c),
            None => self.clone(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(a, c)| (a.mul(m), *c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.nvars, T::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, point: &[T]) -> T {
        assert_eq!(point.len(), self.nvars);
        self.terms.iter().fold(T::zero(), |acc, (m, c)| {
            let v = m
                .exponents()
                .iter()
                .zip(point)
                .fold(T::one(), |v, (&e, &x)| v * x.powi(e as i32));
            acc + *c * v
        })
    }

    /// Largest absolute coefficient difference, treating missing terms as zero.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for (m, c) in &self.terms {
            worst = worst.max((*c - other.coeff(m)).abs());
        }
        for (m, c) in &other.terms {
            if !self.terms.contains_key(m) {
                worst = worst.max(c.abs());
            }
        }
        worst
    }

    /// Formats coefficients with at most `digits` significant digits.
    pub fn to_string_rounded(&self, digits: usize) -> String {
        let mut s = String::new();
        self.write_terms(&mut s, |c| {
            let v = c.as_f64();
            let r: f64 = format!("{:.*e}", digits.saturating_sub(1), v).parse().unwrap_or(v);
            format!("{r}")
        })
        .expect("writing to a String");
        s
    }

    fn write_terms(&self, out: &mut impl fmt::Write, fmt_coeff: impl Fn(T) -> String) -> fmt::Result {
        if self.terms.is_empty() {
            return out.write_str("0");
        }
        let mut sorted: Vec<_> = self.terms.iter().collect();
        sorted.sort_by(|a, b| b.0.grlex_cmp(a.0));
        for (i, (m, &c)) in sorted.into_iter().enumerate() {
            let neg = c < T::zero();
            let mag = c.abs();
            match (i, neg) {
                (0, true) => out.write_str("-")?,
                (0, false) => {}
                (_, true) => out.write_str(" - ")?,
                (_, false) => out.write_str(" + ")?,
            }
            let text = fmt_coeff(mag);
            if m.is_one() {
                out.write_str(&text)?;
            } else {
                if text != "1" {
                    write!(out, "{text}*")?;
                }
                write!(out, "{m}")?;
            }
        }
        Ok(())
    }
}

impl<T: Real> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_terms(f, |c| format!("{c}"))
    }
}

impl<T: Real> fmt::Debug for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

impl<T: Real> Add for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn add(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        assert_eq!(self.nvars, rhs.nvars);
        Polynomial::from_terms(
            self.nvars,
            self.terms.iter().chain(rhs.terms.iter()).map(|(m, c)| (m.clone(), *c)),
        )
    }
}

impl<T: Real> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn sub(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        self + &(-rhs)
    }
}

impl<T: Real> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn neg(self) -> Polynomial<T> {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -*c)).collect(),
        }
    }
}

impl<T: Real> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn mul(self, rhs: &Polynomial<T>) -> Polynomial<T> {
        assert_eq!(self.nvars, rhs.nvars);
        Polynomial::from_terms(
            self.nvars,
            self.terms
                .iter()
                .flat_map(|(a, ca)| rhs.terms.iter().map(move |(b, cb)| (a.mul(b), *ca * *cb))),
        )
    }
}
