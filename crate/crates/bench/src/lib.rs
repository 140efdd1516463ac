//! Fixtures shared by the kernel benchmarks.

use prismkit::cohomology::monomials;
use prismkit::corpus;
use prismkit::{Crystal, OkElem, OkRing, PdSeries};

/// Dense series in `nvars` variables with random coefficients.
pub fn dense_series(ok: &OkRing, nvars: usize, cap: usize, seed: u64) -> PdSeries<OkElem> {
    let mut r = corpus::rng(seed);
    let mut s = PdSeries::zero(nvars, cap);
    for m in monomials(nvars, cap) {
        let c = ok.random(&mut r);
        s.add_term(ok, m, c);
    }
    s
}

/// The p = 3 ramified ring at precision 6.
pub fn ramified_ring() -> OkRing {
    corpus::standard_rings(6).swap_remove(2)
}

pub fn admissible_crystal(ok: &OkRing, rank: usize, seed: u64) -> Crystal {
    corpus::random_admissible_crystal(ok, rank, &mut corpus::rng(seed)).expect("admissible crystal")
}

