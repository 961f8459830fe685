use crate::error::{EcneError, Result};

/// Area under the ROC curve in Mann–Whitney form: the fraction of
/// (positive, negative) pairs ranked correctly, ties counting one half.
/// A label above 0.5 marks a positive.
pub fn auc(scores: &[(f64, f64)]) -> Result<f64> {
    if scores.iter().any(|(s, _)| s.is_nan()) {
        return Err(EcneError::InvalidArgument("NaN score".into()));
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (mut pos, mut neg) = (0u64, 0u64);
    // twice the credited pair count, so ties stay integral
    let mut credit2 = 0u128;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        let (mut p, mut q) = (0u64, 0u64);
        while j < sorted.len() && sorted[j].0 == sorted[i].0 {
            if sorted[j].1 > 0.5 {
                p += 1;
            } else {
                q += 1;
            }
            j += 1;
        }
        credit2 += 2 * u128::from(p) * u128::from(neg) + u128::from(p) * u128::from(q);
        pos += p;
        neg += q;
        i = j;
    }
    if pos == 0 || neg == 0 {
        return Err(EcneError::InvalidArgument(
            "AUC needs at least one positive and one negative".into(),
        ));
    }
    Ok(credit2 as f64 / (2.0 * pos as f64 * neg as f64))
}
