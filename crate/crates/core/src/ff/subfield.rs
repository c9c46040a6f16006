use std::sync::Arc;

use super::{gcd, mod_inverse, FieldDesc, FieldElem};
use crate::error::{Error, Result};

/// A fixed embedding of `GF(p^d)` into `GF(p^{dm})`.
///
/// The canonical moduli of the two fields are unrelated, so the embedding is
/// pinned by sending the small field's `x` to the root of its modulus with
/// the smallest code in the big field. Norm and trace are computed in the
/// big field and pulled back through this embedding.
#[derive(Clone, Debug)]
pub struct Embedding {
    small: Arc<FieldDesc>,
    big: Arc<FieldDesc>,
    degree: u32,
    /// `(Q - 1) / (q - 1)`
    cofactor: u64,
    /// exponent of the image of the small generator in the big field
    image: u64,
    /// inverse of `image / cofactor` mod `q - 1`
    unit_inv: u64,
}

impl Embedding {
    pub fn new(small: Arc<FieldDesc>, big: Arc<FieldDesc>) -> Result<Embedding> {
        let not_sub = Error::NotASubfield {
            p: small.p(),
            small: small.n(),
            big: big.n(),
        };
        if small.p() != big.p() || big.n() % small.n() != 0 {
            return Err(not_sub);
        }
        let degree = big.n() / small.n();
        let small_order = small.unit_order() as u64;
        let big_order = big.unit_order() as u64;
        let cofactor = big_order / small_order;

        let image = if degree == 1 {
            1
        } else {
            let root = smallest_root(&small, &big, cofactor);
            let coeffs = small.coefficients(small.generator());
            let mut acc = FieldElem::ZERO;
            for &c in coeffs.iter().rev() {
                acc = big.add(big.mul(acc, root), big.from_int(c as i64));
            }
            acc.exponent().expect("image of a generator is nonzero") as u64
        };
        debug_assert_eq!(image % cofactor, 0);
        let unit = image / cofactor;
        debug_assert_eq!(gcd(unit, small_order), 1);
        let unit_inv = mod_inverse(unit, small_order).expect("embedding is injective");
        Ok(Embedding {
            small,
            big,
            degree,
            cofactor,
            image,
            unit_inv,
        })
    }

    pub fn small(&self) -> &Arc<FieldDesc> {
        &self.small
    }

    pub fn big(&self) -> &Arc<FieldDesc> {
        &self.big
    }

    /// `[big : small]`
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn embed(&self, x: FieldElem) -> FieldElem {
        match x.exponent() {
            None => FieldElem::ZERO,
            Some(e) => self.big.pow_gen(
                ((e as u128 * self.image as u128) % self.big.unit_order() as u128) as i64,
            ),
        }
    }

    /// Pulls an element of the image back to the small field.
    pub fn restrict(&self, x: FieldElem) -> Option<FieldElem> {
        match x.exponent() {
            None => Some(FieldElem::ZERO),
            Some(e) if e as u64 % self.cofactor == 0 => {
                let j = e as u64 / self.cofactor;
                let m = self.small.unit_order() as u64;
                Some(FieldElem::from_exponent(
                    ((j as u128 * self.unit_inv as u128) % m as u128) as u32,
                ))
            }
            Some(_) => None,
        }
    }

    /// `Nm(x) = x^((Q-1)/(q-1))`, as an element of the small field.
    pub fn norm(&self, x: FieldElem) -> FieldElem {
        let y = self
            .big
            .pow(x, self.cofactor as i64)
            .expect("nonnegative power");
        self.restrict(y).expect("norm lies in the subfield")
    }

    /// `Tr(x) = sum_{i<m} x^(q^i)`, as an element of the small field.
    pub fn trace(&self, x: FieldElem) -> FieldElem {
        let q = self.small.q() as i64;
        let mut acc = FieldElem::ZERO;
        let mut y = x;
        for _ in 0..self.degree {
            acc = self.big.add(acc, y);
            y = self.big.pow(y, q).expect("nonnegative power");
        }
        self.restrict(acc).expect("trace lies in the subfield")
    }
}

fn eval_small_modulus(small: &FieldDesc, big: &FieldDesc, r: FieldElem) -> FieldElem {
    let mut acc = FieldElem::ZERO;
    for &c in small.modulus().iter().rev() {
        acc = big.add(big.mul(acc, r), big.from_int(c as i64));
    }
    acc
}

fn smallest_root(small: &FieldDesc, big: &FieldDesc, cofactor: u64) -> FieldElem {
    std::iter::once(FieldElem::ZERO)
        .chain((0..small.unit_order() as u64).map(|j| big.pow_gen((j * cofactor) as i64)))
        .filter(|&r| eval_small_modulus(small, big, r).is_zero())
        .min_by_key(|&r| big.code(r))
        .expect("the small modulus splits in the big field")
}
