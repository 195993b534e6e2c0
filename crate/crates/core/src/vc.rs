//! Brute-force VC dimension over finite domains.

use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Result};
use crate::hypothesis::FiniteClass;
use crate::point::Point;

/// Largest domain the subset enumeration accepts.
pub const VC_DOMAIN_LIMIT: usize = 20;

/// VC dimension of a family of subsets of `domain`.
///
/// Shattering is hereditary, so sizes are tried in increasing order and the
/// search stops at the first size with no shattered subset. A family of `n`
/// distinct traces cannot shatter more than `log2 n` points, which bounds
/// the sizes tried.
pub fn vc_dimension(domain: &[Point], family: &[BTreeSet<Point>]) -> Result<usize> {
    if domain.len() > VC_DOMAIN_LIMIT {
        return Err(Error::VcGuardExceeded { size: domain.len(), limit: VC_DOMAIN_LIMIT });
    }
    let masks: Vec<u32> = family
        .iter()
        .map(|set| domain.iter().enumerate().filter(|(_, p)| set.contains(p)).fold(0u32, |m, (i, _)| m | (1 << i)))
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    Ok(vc_of_masks(domain.len(), &masks))
}

pub(crate) fn vc_of_masks(n: usize, masks: &[u32]) -> usize {
    if masks.is_empty() {
        return 0;
    }
    let max_k = (usize::BITS - 1 - masks.len().leading_zeros()) as usize;
    let mut best = 0;
    for k in 1..=max_k.min(n) {
        let shattered_some = subsets_of_size(n, k).any(|b| {
            let traces: HashSet<u32> = masks.iter().map(|m| m & b).collect();
            traces.len() == 1 << k
        });
        if !shattered_some {
            break;
        }
        best = k;
    }
    best
}

fn subsets_of_size(n: usize, k: usize) -> impl Iterator<Item = u32> {
    (0u32..(1u32 << n)).filter(move |b| b.count_ones() as usize == k)
}

/// VC dimension of a finite class restricted to `domain` (sets are the
/// 1-preimages).
pub fn class_vc_dimension(class: &FiniteClass, domain: &[Point]) -> Result<usize> {
    let sets = crate::loss::positive_sets(class, domain)?;
    vc_dimension(domain, &sets)
}
