use std::io::Write;

use serde::Serialize;

use super::output::ScanPoint;
use crate::error::{Error, Result};
use crate::format::sig;

/// Extremes of `I_tot` over the trials whose `p_max` falls in `(p_lo, p_hi]`
/// (the first bin also includes `p_lo`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvelopeBin {
    pub p_lo: f64,
    pub p_hi: f64,
    pub min_total: f64,
    pub max_total: f64,
    pub count: u64,
}

/// Splits `[1/d, 1]` into `bins` equal intervals and returns the occupied
/// ones in order. A point on an edge goes to the lower bin.
pub fn envelope(points: &[ScanPoint], bins: usize) -> Result<Vec<EnvelopeBin>> {
    let first = points
        .first()
        .ok_or_else(|| Error::Argument("envelope of an empty record set".into()))?;
    if bins == 0 {
        return Err(Error::Argument("need at least one bin".into()));
    }
    let d = first.d;
    if points.iter().any(|p| p.d != d) {
        return Err(Error::Argument("records mix different dimensions".into()));
    }
    let lo = 1.0 / d as f64;
    let width = (1.0 - lo) / bins as f64;
    let mut acc: Vec<Option<EnvelopeBin>> = vec![None; bins];
    for p in points {
        let offset = (p.p_max - lo) / width;
        let idx = if offset <= 0.0 {
            0
        } else {
            (offset.ceil() as usize).saturating_sub(1).min(bins - 1)
        };
        let bin = acc[idx].get_or_insert_with(|| EnvelopeBin {
            p_lo: lo + idx as f64 * width,
            p_hi: lo + (idx + 1) as f64 * width,
            min_total: f64::INFINITY,
            max_total: f64::NEG_INFINITY,
            count: 0,
        });
        bin.min_total = bin.min_total.min(p.total);
        bin.max_total = bin.max_total.max(p.total);
        bin.count += 1;
    }
    Ok(acc.into_iter().flatten().collect())
}

pub fn write_envelope_csv<W: Write>(bins: &[EnvelopeBin], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["p_lo", "p_hi", "min_I_tot", "max_I_tot", "count"])?;
    for b in bins {
        w.write_record([
            sig(b.p_lo),
            sig(b.p_hi),
            sig(b.min_total),
            sig(b.max_total),
            b.count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
