//! Free groups. Letter `2i` is the i-th generator and `2i+1` its inverse, so a
//! letter doubles as its position in the symmetric generating set.

use super::NormalForm;

pub(crate) struct FreeGroup {
    pub(crate) rank: usize,
}

pub(crate) fn mul(a: &[u8], b: &[u8]) -> NormalForm {
    let mut out = NormalForm::with_capacity(a.len() + b.len());
    out.extend_from_slice(a);
    for &l in b {
        if out.last() == Some(&(l ^ 1)) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub(crate) fn inv(a: &[u8]) -> NormalForm {
    a.iter().rev().map(|&l| l ^ 1).collect()
}

pub(crate) fn valid(rank: usize, a: &[u8]) -> bool {
    a.iter().all(|&l| (l as usize) < 2 * rank) && a.windows(2).all(|w| w[0] != w[1] ^ 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_at_the_junction() {
        assert_eq!(mul(&[0, 2], &[3, 0]).as_slice(), &[0, 0]);
        assert_eq!(mul(&[0, 2], &[3, 1]).as_slice(), &[] as &[u8]);
        assert_eq!(inv(&[0, 2]).as_slice(), &[3, 1]);
        assert!(valid(2, &[0, 2, 1]));
        assert!(!valid(2, &[0, 1]));
        assert!(!valid(1, &[2]));
    }
}
