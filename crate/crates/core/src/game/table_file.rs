//! CSV value tables: header `mask,value`, one row per coalition.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::coalition::{full_mask, Coalition};
use crate::error::{config, Error, Result};

use super::{ValueTable, MAX_TABLE_PLAYERS};

pub fn read_table(path: &Path) -> Result<ValueTable> {
    let file = std::fs::File::open(path)
        .map_err(|e| config(format!("cannot open table {}: {e}", path.display())))?;
    parse_table(file).map_err(|e| match e {
        Error::Config(msg) => config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Parses a complete table. Duplicate or missing masks are errors.
pub fn parse_table<R: Read>(reader: R) -> Result<ValueTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| config(format!("unreadable table header: {e}")))?
        .clone();
    if headers.len() != 2 || &headers[0] != "mask" || &headers[1] != "value" {
        return Err(config(format!(
            "table header must be `mask,value`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut n: Option<usize> = None;
    let mut rows: HashMap<u64, f64> = HashMap::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| config(format!("unreadable table row: {e}")))?;
        let row = line + 2;
        if record.len() != 2 {
            return Err(config(format!(
                "row {row}: expected 2 fields, found {}",
                record.len()
            )));
        }
        let mask_text = &record[0];
        let width = *n.get_or_insert(mask_text.chars().count());
        if width == 0 || width > MAX_TABLE_PLAYERS {
            return Err(config(format!(
                "row {row}: mask width {width} outside 1..={MAX_TABLE_PLAYERS}"
            )));
        }
        let coalition = Coalition::from_mask_string(mask_text, width)
            .map_err(|e| config(format!("row {row}: mask {mask_text:?}: {e}")))?;
        let value: f64 = record[1].parse().map_err(|_| {
            config(format!(
                "row {row}: value {:?} is not a decimal",
                &record[1]
            ))
        })?;
        if !value.is_finite() {
            return Err(config(format!("row {row}: value {value} is not finite")));
        }
        if rows.insert(coalition.mask(), value).is_some() {
            return Err(config(format!("duplicate mask {mask_text}")));
        }
    }
    let n = n.ok_or_else(|| config("table has no rows"))?;
    let mut values = Vec::with_capacity(1 << n);
    for mask in 0..=full_mask(n) {
        match rows.get(&mask) {
            Some(&x) => values.push(x),
            None => {
                return Err(config(format!(
                    "missing mask {} ({} of {} rows present)",
                    Coalition::from_raw(n, mask),
                    rows.len(),
                    1u64 << n
                )))
            }
        }
    }
    ValueTable::new(n, values)
}

/// Writes every coalition in ascending mask order with shortest
/// round-trip decimal values.
pub fn write_table<W: Write>(writer: W, table: &ValueTable) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io = |e: csv::Error| config(format!("cannot write table: {e}"));
    w.write_record(["mask", "value"]).map_err(io)?;
    for (mask, x) in table.values().iter().enumerate() {
        let c = Coalition::from_raw(table.n(), mask as u64);
        w.write_record([c.to_mask_string(), format!("{x:?}")])
            .map_err(io)?;
    }
    w.flush()
        .map_err(|e| config(format!("cannot write table: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_complete_table() {
        let text = "mask,value\n00,0\n10,1.5\n01,-2\n11,1e-3\n";
        let t = parse_table(text.as_bytes()).unwrap();
        assert_eq!(t.n(), 2);
        assert_eq!(t.values(), &[0.0, 1.5, -2.0, 1e-3]);
    }

    #[test]
    fn duplicate_mask_is_named() {
        let text = "mask,value\n00,0\n10,1\n10,2\n11,3\n";
        let err = parse_table(text.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("duplicate mask 10"), "{err}");
    }

    #[test]
    fn missing_mask_is_named() {
        let text = "mask,value\n00,0\n10,1\n11,3\n";
        let err = parse_table(text.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("missing mask 01"), "{err}");
    }

    #[test]
    fn rejects_bad_rows() {
        for text in [
            "m,v\n0,1\n1,2\n",
            "mask,value\n0,1\n10,2\n",
            "mask,value\n0,abc\n1,2\n",
            "mask,value\n0,NaN\n1,2\n",
            "mask,value\n",
        ] {
            assert!(
                matches!(parse_table(text.as_bytes()), Err(Error::Config(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn write_then_parse_is_identity() {
        let t =
            ValueTable::new(3, vec![0.1, -0.0, 1e-300, 3.0, -7.25, 1.0 / 3.0, 2e20, 5.0]).unwrap();
        let mut buf = Vec::new();
        write_table(&mut buf, &t).unwrap();
        let back = parse_table(buf.as_slice()).unwrap();
        for (a, b) in t.values().iter().zip(back.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
