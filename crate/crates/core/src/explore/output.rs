use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::scan::TrialRecord;
use crate::error::{Error, Result};
use crate::format::{rounded_json, sig};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Jsonl,
}

/// Column order: `seed, stream, d, M, D, p_max, I_1..I_M, I_tot`, then
/// `bound:<name>` for every bound, then `violated:<name>` for every bound.
pub fn write_csv<W: Write>(records: &[TrialRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let Some(first) = records.first() else {
        w.flush()?;
        return Ok(());
    };
    let mut header: Vec<String> = ["seed", "stream", "d", "M", "D", "p_max"].map(String::from).to_vec();
    header.extend((1..=first.m).map(|m| format!("I_{m}")));
    header.push("I_tot".into());
    header.extend(first.bounds.iter().map(|b| format!("bound:{}", b.name)));
    header.extend(first.bounds.iter().map(|b| format!("violated:{}", b.name)));
    w.write_record(&header)?;
    for r in records {
        if r.m != first.m || r.bounds.len() != first.bounds.len() {
            return Err(Error::Structural("records of one CSV must share M and bound set".into()));
        }
        let mut row = vec![
            r.seed.to_string(),
            r.stream.to_string(),
            r.d.to_string(),
            r.m.to_string(),
            r.outcomes.to_string(),
            sig(r.p_max),
        ];
        row.extend(r.per_basis_info.iter().map(|&i| sig(i)));
        row.push(sig(r.total));
        row.extend(r.bounds.iter().map(|b| sig(b.value)));
        row.extend(r.bounds.iter().map(|b| u8::from(b.violated).to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// One JSON object per line, floats rounded to 12 significant digits.
pub fn write_jsonl<W: Write>(records: &[TrialRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, &rounded_json(r)?)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// The columns of a scan CSV that the envelope needs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanPoint {
    pub d: usize,
    pub p_max: f64,
    pub total: f64,
}

pub fn read_csv_points<R: Read>(input: R) -> Result<Vec<ScanPoint>> {
    let mut rdr = csv::Reader::from_reader(input);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("scan CSV has no '{name}' column")))
    };
    let (cd, cp, ct) = (col("d")?, col("p_max")?, col("I_tot")?);
    let mut points = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = |c: usize| rec.get(c).unwrap_or("");
        let parse_err = |c: usize| Error::Parse(format!("row {}: bad value '{}'", line + 1, field(c)));
        points.push(ScanPoint {
            d: field(cd).parse().map_err(|_| parse_err(cd))?,
            p_max: field(cp).parse().map_err(|_| parse_err(cp))?,
            total: field(ct).parse().map_err(|_| parse_err(ct))?,
        });
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explore::{scan, ScanConfig};
    use crate::mub::standard_mubs;
    use crate::sampling::PriorMode;

    #[test]
    fn csv_header_and_round_trip_of_points() {
        let fam = standard_mubs(2, 3).unwrap();
        let cfg = ScanConfig::new(2, 3, 50, 4).with_priors(PriorMode::UniformSimplex);
        let out = scan(&cfg, &fam).unwrap();
        let mut buf = Vec::new();
        write_csv(&out.records, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        let header = text.lines().next().unwrap();
        assert!(header.starts_with("seed,stream,d,M,D,p_max,I_1,I_2,I_3,I_tot,bound:"));
        assert!(header.contains("violated:QubitThree"));
        assert_eq!(text.lines().count(), 51);

        let points = read_csv_points(&buf[..]).unwrap();
        assert_eq!(points.len(), 50);
        for (p, r) in points.iter().zip(&out.records) {
            assert_eq!(p.d, 2);
            assert!((p.total - r.total).abs() <= 1e-11 * r.total.abs().max(1e-300) + 1e-300);
        }
    }

    #[test]
    fn jsonl_lines_parse() {
        let fam = standard_mubs(3, 2).unwrap();
        let out = scan(&ScanConfig::new(3, 2, 5, 4), &fam).unwrap();
        let mut buf = Vec::new();
        write_jsonl(&out.records, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        for line in text.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert_eq!(v["d"], 3);
            assert!(v.get("wall_time_s").is_none());
        }
    }

    #[test]
    fn missing_column_is_parse_error() {
        let text = "d,p_max\n2,0.5\n";
        assert!(matches!(read_csv_points(text.as_bytes()), Err(Error::Parse(_))));
    }
}
