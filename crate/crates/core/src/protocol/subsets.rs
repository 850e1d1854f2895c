use std::cmp::Ordering;

use crate::error::{CedaError, Result};

/// All subsets of size `1..=max_order`, by size then lexicographically by
/// position in `features`.
pub fn enumerate_subsets(features: &[String], max_order: usize) -> Result<Vec<Vec<String>>> {
    if max_order < 1 {
        return Err(CedaError::invalid("max_order must be at least 1"));
    }
    if max_order > features.len() {
        return Err(CedaError::invalid(format!(
            "max_order {max_order} exceeds the number of features ({})",
            features.len()
        )));
    }
    let n = features.len();
    let mut out = Vec::new();
    for k in 1..=max_order {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            out.push(idx.iter().map(|&i| features[i].clone()).collect());
            let Some(pos) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
                break;
            };
            idx[pos] += 1;
            for j in pos + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    Ok(out)
}

/// Orders names with embedded numbers numerically: `X2 < X10`.
pub(crate) fn natural_cmp(a: &str, b: &str) -> Ordering {
    let mut x = a.as_bytes();
    let mut y = b.as_bytes();
    loop {
        match (x.first(), y.first()) {
            (None, None) => return Ordering::Equal,
            (None, _) => return Ordering::Less,
            (_, None) => return Ordering::Greater,
            (Some(p), Some(q)) if p.is_ascii_digit() && q.is_ascii_digit() => {
                let dx = x.iter().take_while(|c| c.is_ascii_digit()).count();
                let dy = y.iter().take_while(|c| c.is_ascii_digit()).count();
                let nx = trim_zeros(&x[..dx]);
                let ny = trim_zeros(&y[..dy]);
                let o = nx.len().cmp(&ny.len()).then_with(|| nx.cmp(ny));
                if o.is_ne() {
                    return o;
                }
                x = &x[dx..];
                y = &y[dy..];
            }
            (Some(p), Some(q)) => {
                if p != q {
                    return p.cmp(q);
                }
                x = &x[1..];
                y = &y[1..];
            }
        }
    }
}

fn trim_zeros(d: &[u8]) -> &[u8] {
    let z = d.iter().take_while(|&&c| c == b'0').count();
    &d[z.min(d.len().saturating_sub(1))..]
}

/// Canonical form of a subset: members in natural order.
pub(crate) fn canonical(subset: &[String]) -> Vec<String> {
    let mut s = subset.to_vec();
    s.sort_by(|a, b| natural_cmp(a, b).then_with(|| a.cmp(b)));
    s
}

/// Display label of a subset, members joined by `_`.
pub fn subset_label(subset: &[String]) -> String {
    subset.join("_")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("X{i}")).collect()
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_subsets(&names(4), 4).unwrap().len(), 15);
        assert_eq!(enumerate_subsets(&names(10), 2).unwrap().len(), 55);
        assert_eq!(enumerate_subsets(&names(10), 6).unwrap().len(), 847);
        assert!(enumerate_subsets(&names(3), 0).is_err());
        assert!(enumerate_subsets(&names(3), 4).is_err());
    }

    #[test]
    fn order() {
        let s = enumerate_subsets(&names(3), 2).unwrap();
        let flat: Vec<String> = s.iter().map(|v| v.join(",")).collect();
        assert_eq!(flat, ["X1", "X2", "X3", "X1,X2", "X1,X3", "X2,X3"]);
    }

    #[test]
    fn natural() {
        assert_eq!(natural_cmp("X2", "X10"), Ordering::Less);
        assert_eq!(natural_cmp("X10", "X9"), Ordering::Greater);
        assert_eq!(natural_cmp("a", "b"), Ordering::Less);
        assert_eq!(canonical(&["X10".into(), "X2".into()]), vec!["X2", "X10"]);
    }
}
