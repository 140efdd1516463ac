//! Coefficient rings: integers mod p^N, the unramified ring W, the residue
//! field, O_K = W[u]/(E), dense matrices and Smith normal form.

pub mod matrix;
pub mod modint;
pub mod ok;
pub mod residue;
pub mod snf;
pub mod spec;
pub mod witt;

pub use matrix::{MatRing, Matrix};
pub use ok::{OkElem, OkRing, Valuation};
pub use residue::ResidueField;
pub use snf::{smith_normal_form, SnfResult};
pub use spec::RingSpec;
pub use witt::WittRing;

use std::fmt::Debug;

/// A commutative-or-not ring given by a context object; elements are plain
/// values and all arithmetic goes through the context.
pub trait Ring: Clone + Send + Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;

    /// Characteristic-type modulus used to reduce integer factors.
    fn int_modulus(&self) -> u64;
    /// Multiply by an integer already reduced mod `int_modulus()`.
    fn mul_int(&self, a: &Self::Elem, n: u64) -> Self::Elem;

    fn from_int(&self, n: i64) -> Self::Elem {
        let m = self.int_modulus();
        self.mul_int(&self.one(), modint::reduce_i64(n, m))
    }

    fn add_assign(&self, a: &mut Self::Elem, b: &Self::Elem) {
        *a = self.add(a, b);
    }
}

/// Rings carrying a left action of O_K scalars.
pub trait OkModule: Ring {
    fn ok_scale(&self, s: &OkElem, a: &Self::Elem) -> Self::Elem;
}
