//! Inputs shared by the benchmarks.

use rnc_core::rnc::{psi_lifted, random_parameters, random_transform, sample_moment_curve};
use rnc_core::{BracketPolynomial, PointConfiguration, SubsetI};

pub const PASCAL_FOUR_TERM: &str =
    "[145][256][361][234]-[245][356][461][123]+[245][356][361][124]-[245][256][361][134]";

/// `d+4` points on a transformed moment curve.
pub fn curve_sample(d: usize, seed: u64) -> PointConfiguration {
    let transform = random_transform(d + 1, seed);
    sample_moment_curve(d, &random_parameters(d + 4, seed), Some(&transform)).expect("distinct parameters")
}

/// The lifted quartic for the first 6-subset in dimension `d`.
pub fn lifted_quartic(d: usize) -> BracketPolynomial {
    let i = SubsetI::all(d + 4).swap_remove(0);
    psi_lifted(&i, d).expect("d >= 3")
}
