use anyhow::{bail, Context, Result};

/// Parses `3`, `3,5,7`, `0..20` or a mix like `2..4,9` into a sorted list.
/// Ranges are inclusive. The empty string gives an empty list.
pub fn parse_list(text: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: usize = lo
                .trim()
                .parse()
                .with_context(|| format!("bad range start in `{part}`"))?;
            let hi: usize = hi
                .trim()
                .parse()
                .with_context(|| format!("bad range end in `{part}`"))?;
            if lo > hi {
                bail!("empty range `{part}`");
            }
            out.extend(lo..=hi);
        } else {
            out.push(part.parse().with_context(|| format!("bad number `{part}`"))?);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}
