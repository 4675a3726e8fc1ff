/// Visits subsets of `set` in order of increasing size, lexicographic by
/// position within each size, up to `max_size` elements. Stops early and
/// returns the subset when `f` returns true.
pub(crate) fn find_subset<F>(set: &[usize], max_size: Option<usize>, mut f: F) -> Option<Vec<usize>>
where
    F: FnMut(&[usize]) -> bool,
{
    let limit = max_size.map_or(set.len(), |m| m.min(set.len()));
    let mut buf = Vec::with_capacity(limit);
    for k in 0..=limit {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            buf.clear();
            buf.extend(idx.iter().map(|&i| set[i]));
            if f(&buf) {
                return Some(buf);
            }
            // advance to the next k-combination
            let n = set.len();
            let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
                break;
            };
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    None
}
