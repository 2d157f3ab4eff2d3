use std::io::{Read, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::field::{Parity, RadialField};
use super::grid::RadialGrid;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Serialize, Deserialize)]
struct Row<T> {
    r: T,
    value: T,
}

/// Writes `r,value` rows.
pub fn write_csv<T: Real>(f: &RadialField<T>, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for (&r, &value) in f.nodes().iter().zip(f.values()) {
        w.serialize(Row { r, value })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `r,value` rows; the nodes must start at 0 and increase strictly.
pub fn read_csv<T: Real>(input: impl Read, parity: Parity) -> Result<RadialField<T>> {
    let mut rdr = csv::Reader::from_reader(input);
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    for row in rdr.deserialize::<Row<T>>() {
        let row = row?;
        nodes.push(row.r);
        values.push(row.value);
    }
    let grid = RadialGrid::from_nodes(nodes)?;
    RadialField::new(Arc::new(grid), values, parity)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real"))]
struct FieldDoc<T> {
    parity: Parity,
    r: Vec<T>,
    value: Vec<T>,
}

pub fn to_json<T: Real>(f: &RadialField<T>) -> Result<String> {
    let doc = FieldDoc {
        parity: f.parity(),
        r: f.nodes().to_vec(),
        value: f.values().to_vec(),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn from_json<T: Real>(text: &str) -> Result<RadialField<T>> {
    let doc: FieldDoc<T> = serde_json::from_str(text)?;
    if doc.r.len() != doc.value.len() {
        return Err(Error::Invalid(format!(
            "{} radii but {} values",
            doc.r.len(),
            doc.value.len()
        )));
    }
    let grid = RadialGrid::from_nodes(doc.r)?;
    RadialField::new(Arc::new(grid), doc.value, doc.parity)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RadialField<f64> {
        let g = Arc::new(RadialGrid::sinh(5.0, 20, 1.5).unwrap());
        RadialField::from_fn(g, Parity::Even, |r: f64| (-r).exp()).unwrap()
    }

    #[test]
    fn csv_roundtrip() {
        let f = sample();
        let mut buf = Vec::new();
        write_csv(&f, &mut buf).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("r,value\n"));
        let g: RadialField<f64> = read_csv(&buf[..], Parity::Even).unwrap();
        assert_eq!(g.values(), f.values());
        assert_eq!(g.nodes(), f.nodes());
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let f = sample();
        let g: RadialField<f64> = from_json(&to_json(&f).unwrap()).unwrap();
        assert_eq!(g.values(), f.values());
        let bad = r#"{"parity":"even","r":[0,1,2,3,2.5,5,6,7],"value":[0,0,0,0,0,0,0,0]}"#;
        assert!(matches!(from_json::<f64>(bad), Err(Error::NonMonotoneNodes(4))));
        let csv = "r,value\n0,1\n1,1\n0.5,1\n3,1\n4,1\n5,1\n6,1\n7,1\n";
        assert!(read_csv::<f64>(csv.as_bytes(), Parity::Even).is_err());
    }
}
