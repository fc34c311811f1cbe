use std::collections::HashMap;

use super::monomial::Monomial;

/// `binom(n, k)`, exact for the sizes used here.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All monomials of total degree `≤ d` in `n` variables, indexed in graded
/// order: ascending degree, lexicographically descending within a degree.
///
/// For `n = 2, d = 1` the order is `(1, x, y)`; for `d = 3` it continues
/// `x², xy, y², x³, x²y, xy², y³`. The degree-`d−1` basis is a prefix of the
/// degree-`d` basis.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    nvars: usize,
    degree: usize,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    /// `degree_start[e]` is the first position of degree `e`.
    degree_start: Vec<usize>,
}

impl MonomialBasis {
    pub fn new(nvars: usize, degree: usize) -> Self {
        let mut monomials = Vec::with_capacity(binomial(nvars + degree, nvars));
        let mut degree_start = Vec::with_capacity(degree + 2);
        for e in 0..=degree {
            degree_start.push(monomials.len());
            let mut buf = vec![0u32; nvars];
            push_of_degree(&mut buf, 0, e as u32, &mut monomials);
        }
        degree_start.push(monomials.len());
        let index = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        MonomialBasis {
            nvars,
            degree,
            monomials,
            index,
            degree_start,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn monomial(&self, i: usize) -> &Monomial {
        &self.monomials[i]
    }

    pub fn position(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Number of basis monomials of degree `≤ e`.
    pub fn count_up_to(&self, e: usize) -> usize {
        self.degree_start[(e + 1).min(self.degree + 1)]
    }

    /// Position of `monomial(i) · monomial(j)` if it is still in the basis.
    pub fn product_position(&self, i: usize, j: usize) -> Option<usize> {
        self.position(&self.monomials[i].mul(&self.monomials[j]))
    }
}

fn push_of_degree(buf: &mut [u32], var: usize, remaining: u32, out: &mut Vec<Monomial>) {
    if var + 1 == buf.len() {
        buf[var] = remaining;
        out.push(Monomial::new(buf.to_vec()));
        return;
    }
    if buf.is_empty() {
        if remaining == 0 {
            out.push(Monomial::new(Vec::new()));
        }
        return;
    }
    for e in (0..=remaining).rev() {
        buf[var] = e;
        push_of_degree(buf, var + 1, remaining - e, out);
    }
    buf[var] = 0;
}
