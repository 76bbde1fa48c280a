//! Subsets of the ground set `{0, .., n-1}` as bitmasks: bit `k` is mode `k`.

pub fn members(mask: usize) -> Vec<usize> {
    (0..usize::BITS as usize).filter(|&k| mask >> k & 1 == 1).collect()
}

pub fn mask_of(indices: &[usize]) -> usize {
    indices.iter().fold(0, |m, &k| m | 1 << k)
}

pub fn complement(mask: usize, n: usize) -> usize {
    !mask & ((1 << n) - 1)
}

/// Occupation string with mode 1 leftmost, e.g. `11010`.
pub fn bitstring(mask: usize, n: usize) -> String {
    (0..n).map(|k| if mask >> k & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn parse_bitstring(s: &str) -> Option<usize> {
    s.chars().enumerate().try_fold(0usize, |m, (k, c)| match c {
        '0' => Some(m),
        '1' => Some(m | 1 << k),
        _ => None,
    })
}

/// 1-based set notation, e.g. `{1,2,4}`.
pub fn label(mask: usize) -> String {
    let parts: Vec<String> = members(mask).iter().map(|k| (k + 1).to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let m = mask_of(&[0, 1, 3]);
        assert_eq!(m, 0b1011);
        assert_eq!(members(m), vec![0, 1, 3]);
        assert_eq!(bitstring(m, 5), "11010");
        assert_eq!(parse_bitstring("11010"), Some(m));
        assert_eq!(label(m), "{1,2,4}");
        assert_eq!(label(0), "{}");
        assert_eq!(complement(m, 5), 0b10100);
    }
}
