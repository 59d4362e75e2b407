//! Brute-force permutation and partition sums behind the odd-dimensional
//! combinatorial constant.
//!
//! For a permutation `σ` of `{0..n}` fixing a pivot `p`, the weight `C_{σ,p}`
//! sums over partitions of `{j ≠ p}` into `σ`-invariant blocks of size one or
//! two. Blocks are classified as singletons (class 1), fixed pairs (class 2)
//! and swapped pairs (class 3); only partitions with an even number of
//! singletons contribute.

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::exact::{rational, rational_pow, ExactScalar};
use super::{double_factorial, CombinatoricsError};

/// Which permutations the signed sum ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PermutationScope {
    /// Involutions fixing the pivot; every other permutation has an empty
    /// partition set and contributes zero.
    Involutions,
    /// All of `S_n`, filtered on `σ(p) = p`. Stricter but factorial cost.
    Full,
}

/// Sizes of the three block classes of a partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PartitionRecord {
    pub singletons: usize,
    pub fixed_pairs: usize,
    pub swapped_pairs: usize,
}

impl PartitionRecord {
    pub fn blocks(&self) -> usize {
        self.singletons + self.fixed_pairs + self.swapped_pairs
    }

    pub fn covered(&self) -> usize {
        self.singletons + 2 * (self.fixed_pairs + self.swapped_pairs)
    }
}

/// Cycle structure of an involution fixing the pivot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CycleType {
    pub n: usize,
    pub two_cycles: usize,
}

impl CycleType {
    pub fn sign(&self) -> i64 {
        if self.two_cycles.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

/// Returns the cycle type if `sigma` is a product of disjoint transpositions.
pub fn cycle_type(sigma: &[usize]) -> Option<CycleType> {
    let mut two_cycles = 0;
    for (i, &s) in sigma.iter().enumerate() {
        if sigma[s] != i {
            return None;
        }
        if s > i {
            two_cycles += 1;
        }
    }
    Some(CycleType {
        n: sigma.len(),
        two_cycles,
    })
}

/// Sign of an arbitrary permutation, by cycle decomposition.
pub fn permutation_sign(sigma: &[usize]) -> i64 {
    let mut seen = vec![false; sigma.len()];
    let mut sign = 1;
    for start in 0..sigma.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            j = sigma[j];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// All partitions of `items` into blocks of size one or two.
fn small_block_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![Vec::new()];
    };
    let mut out = Vec::new();
    for mut tail in small_block_partitions(rest) {
        tail.push(vec![first]);
        out.push(tail);
    }
    for (idx, &partner) in rest.iter().enumerate() {
        let remaining: Vec<usize> = rest
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != idx)
            .map(|(_, &v)| v)
            .collect();
        for mut tail in small_block_partitions(&remaining) {
            tail.push(vec![first, partner]);
            out.push(tail);
        }
    }
    out
}

/// Classifies a partition under `sigma`; `None` if some block is not invariant.
fn classify(blocks: &[Vec<usize>], sigma: &[usize]) -> Option<PartitionRecord> {
    let mut record = PartitionRecord {
        singletons: 0,
        fixed_pairs: 0,
        swapped_pairs: 0,
    };
    for block in blocks {
        match block.as_slice() {
            [a] => {
                if sigma[*a] != *a {
                    return None;
                }
                record.singletons += 1;
            }
            [a, b] => {
                if sigma[*a] == *a && sigma[*b] == *b {
                    record.fixed_pairs += 1;
                } else if sigma[*a] == *b && sigma[*b] == *a {
                    record.swapped_pairs += 1;
                } else {
                    return None;
                }
            }
            _ => unreachable!("blocks have size one or two"),
        }
    }
    Some(record)
}

/// σ-invariant partitions of `{j ≠ pivot}` into blocks of size at most two.
pub fn invariant_partitions(sigma: &[usize], pivot: usize) -> Vec<PartitionRecord> {
    let items: Vec<usize> = (0..sigma.len()).filter(|&j| j != pivot).collect();
    small_block_partitions(&items)
        .iter()
        .filter_map(|blocks| classify(blocks, sigma))
        .collect()
}

fn partition_weight(n: usize, record: &PartitionRecord) -> Result<ExactScalar, CombinatoricsError> {
    let blocks = record.blocks() as u32;
    let minus_inv = rational(-1, n as i64 + 2);
    let pair_factor = rational(1, n as i64 + 4);
    let dfact = double_factorial(record.singletons as i64 - 1)?;
    let mut coeff = rational_pow(&minus_inv, blocks);
    coeff *= BigRational::from_integer(dfact);
    coeff *= rational_pow(&pair_factor, (record.fixed_pairs + record.swapped_pairs) as u32);
    let exponent = record.blocks() as i32 - (record.singletons / 2) as i32;
    Ok(ExactScalar::new(coeff, exponent))
}

/// `C_{σ,p}` by explicit enumeration of partitions.
pub fn c_sigma_p_bruteforce(
    n: usize,
    sigma: &[usize],
    pivot: usize,
) -> Result<ExactScalar, CombinatoricsError> {
    if sigma.len() != n || pivot >= n {
        return Err(CombinatoricsError::InvalidPermutation);
    }
    let mut check = sigma.to_vec();
    check.sort_unstable();
    if check.iter().enumerate().any(|(i, &v)| i != v) {
        return Err(CombinatoricsError::InvalidPermutation);
    }
    if sigma[pivot] != pivot {
        return Err(CombinatoricsError::PivotMoved { pivot });
    }
    let mut total = ExactScalar::zero();
    for record in invariant_partitions(sigma, pivot) {
        if record.singletons % 2 != 0 {
            continue;
        }
        total = total.checked_add(&partition_weight(n, &record)?)?;
    }
    Ok(total)
}

/// Involutions of `{0..n}` fixing `pivot`, as permutation vectors.
pub fn involutions_fixing(n: usize, pivot: usize) -> Vec<Vec<usize>> {
    let items: Vec<usize> = (0..n).filter(|&j| j != pivot).collect();
    small_block_partitions(&items)
        .into_iter()
        .map(|blocks| {
            let mut sigma: Vec<usize> = (0..n).collect();
            for block in blocks {
                if let [a, b] = block.as_slice() {
                    sigma[*a] = *b;
                    sigma[*b] = *a;
                }
            }
            sigma
        })
        .collect()
}

/// `Σ_σ ε(σ) C_{σ,p}` by brute force, no closed-form check.
pub fn signed_permutation_sum_bruteforce(
    n: usize,
    pivot: usize,
    scope: PermutationScope,
) -> Result<ExactScalar, CombinatoricsError> {
    if n == 0 || pivot >= n {
        return Err(CombinatoricsError::InvalidDimension(n));
    }
    let perms: Vec<Vec<usize>> = match scope {
        PermutationScope::Involutions => involutions_fixing(n, pivot),
        PermutationScope::Full => (0..n)
            .permutations(n)
            .filter(|sigma| sigma[pivot] == pivot)
            .collect(),
    };
    let mut total = ExactScalar::zero();
    for sigma in perms {
        let term = c_sigma_p_bruteforce(n, &sigma, pivot)?;
        let signed = if permutation_sign(&sigma) < 0 { -term } else { term };
        total = total.checked_add(&signed)?;
    }
    Ok(total)
}

/// Closed form `(n−1)!/((n−1)/2)! · (2π²/((n+2)² Vol))^{(n−1)/2}` for odd `n`,
/// zero for even `n`.
pub fn signed_permutation_sum_closed_form(n: usize) -> ExactScalar {
    if n == 0 || n.is_multiple_of(2) {
        return ExactScalar::zero();
    }
    let half = (n - 1) / 2;
    let mut ratio = BigInt::one();
    for m in (half + 1)..n {
        ratio *= m;
    }
    // 2π²/((n+2)²Vol) = (1/(2(n+2)²)) · (4π²/Vol)
    let base = rational(1, 2 * (n as i64 + 2) * (n as i64 + 2));
    let coeff = BigRational::from_integer(ratio) * rational_pow(&base, half as u32);
    ExactScalar::new(coeff, half as i32)
}

/// Brute-force signed sum over involutions, checked against the closed form.
pub fn signed_permutation_sum(n: usize) -> Result<ExactScalar, CombinatoricsError> {
    let brute = signed_permutation_sum_bruteforce(n, 0, PermutationScope::Involutions)?;
    let closed = signed_permutation_sum_closed_form(n);
    if brute != closed {
        return Err(CombinatoricsError::ClosedFormMismatch {
            n,
            bruteforce: brute.to_string(),
            closed: closed.to_string(),
        });
    }
    Ok(brute)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn third(n: i64, d: i64, m: i32) -> ExactScalar {
        ExactScalar::new(rational(n, d), m)
    }

    #[test]
    fn identity_in_dimension_three() {
        let c = c_sigma_p_bruteforce(3, &[0, 1, 2], 0).unwrap();
        assert_eq!(c, third(2, 175, 1));
    }

    #[test]
    fn transposition_in_dimension_three() {
        let c = c_sigma_p_bruteforce(3, &[0, 2, 1], 0).unwrap();
        assert_eq!(c, third(-1, 35, 1));
    }

    #[test]
    fn three_cycle_contributes_nothing() {
        let c = c_sigma_p_bruteforce(3, &[1, 2, 0], 2);
        assert!(matches!(c, Err(CombinatoricsError::PivotMoved { .. })));
        let c = c_sigma_p_bruteforce(4, &[0, 2, 3, 1], 0).unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn moved_pivot_is_rejected() {
        assert!(matches!(
            c_sigma_p_bruteforce(3, &[1, 0, 2], 0),
            Err(CombinatoricsError::PivotMoved { pivot: 0 })
        ));
    }

    #[test]
    fn small_sums() {
        assert_eq!(signed_permutation_sum(1).unwrap(), ExactScalar::one());
        assert_eq!(signed_permutation_sum(3).unwrap(), third(1, 25, 1));
        assert!(signed_permutation_sum(2).unwrap().is_zero());
    }

    #[test]
    fn every_contribution_has_fixed_exponent() {
        for n in [3usize, 5, 7] {
            for sigma in involutions_fixing(n, 0) {
                let c = c_sigma_p_bruteforce(n, &sigma, 0).unwrap();
                if !c.is_zero() {
                    assert_eq!(c.monomial_exponent(), ((n - 1) / 2) as i32);
                }
            }
        }
    }

    #[test]
    fn full_scope_matches_involutions() {
        for n in 1..=5 {
            for pivot in 0..n {
                let full = signed_permutation_sum_bruteforce(n, pivot, PermutationScope::Full).unwrap();
                let inv =
                    signed_permutation_sum_bruteforce(n, pivot, PermutationScope::Involutions).unwrap();
                assert_eq!(full, inv, "n={n} pivot={pivot}");
            }
        }
    }

    #[test]
    fn partition_records_satisfy_size_identity() {
        for sigma in involutions_fixing(6, 2) {
            for r in invariant_partitions(&sigma, 2) {
                assert_eq!(r.covered(), 5);
            }
        }
    }

    #[test]
    fn involution_counts() {
        // involutions of a 4-element set: 10
        assert_eq!(involutions_fixing(5, 0).len(), 10);
        assert_eq!(cycle_type(&[1, 0, 3, 2]).unwrap().sign(), 1);
        assert!(cycle_type(&[1, 2, 0]).is_none());
        assert_eq!(permutation_sign(&[1, 2, 0]), 1);
        assert_eq!(permutation_sign(&[1, 0, 2]), -1);
    }
}
