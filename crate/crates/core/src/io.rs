//! Grid dumps (CSV and raw little-endian binary), fit reports and gate-count rows.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyenc::FitReportRow;
use crate::transpile::GateCount;

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub index: usize,
    pub x: f64,
    pub value: f64,
}

/// Writes `index,x,value` rows with a header.
pub fn write_grid_csv<W: Write>(w: W, x: &[f64], values: &[f64]) -> Result<()> {
    if x.len() != values.len() {
        return Err(Error::Layout(format!(
            "{} coordinates for {} values",
            x.len(),
            values.len()
        )));
    }
    let mut out = csv::Writer::from_writer(w);
    for (index, (&x, &value)) in x.iter().zip(values).enumerate() {
        out.serialize(GridRow { index, x, value })
            .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_grid_csv<R: Read>(r: R) -> Result<Vec<GridRow>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .collect::<std::result::Result<Vec<GridRow>, _>>()
        .map_err(csv_err)
}

/// Little-endian `u64` element count followed by the values as `f64`.
pub fn write_f64_binary<W: Write>(mut w: W, values: &[f64]) -> Result<()> {
    w.write_all(&(values.len() as u64).to_le_bytes())?;
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_f64_binary<R: Read>(mut r: R) -> Result<Vec<f64>> {
    let mut head = [0u8; 8];
    r.read_exact(&mut head)?;
    let n = u64::from_le_bytes(head) as usize;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != 8 * n {
        return Err(Error::Io(format!(
            "header announces {n} values, found {} bytes",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect())
}

pub fn write_fit_report<W: Write>(w: W, rows: &[FitReportRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateCountRow {
    pub circuit_name: String,
    pub n_qubits: usize,
    pub n_ancilla: usize,
    pub cnot: usize,
    pub u3: usize,
    pub total: usize,
}

impl GateCountRow {
    pub fn new(name: impl Into<String>, n_qubits: usize, count: &GateCount) -> Self {
        GateCountRow {
            circuit_name: name.into(),
            n_qubits,
            n_ancilla: count.num_ancilla,
            cnot: count.cnot_count,
            u3: count.u3_count,
            total: count.total,
        }
    }
}

pub fn write_gate_counts<W: Write>(w: W, rows: &[GateCountRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_csv_round_trip() {
        let mut buf = Vec::new();
        write_grid_csv(&mut buf, &[0.0, 0.5], &[1.25, -3.0]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("index,x,value\n0,0.0,1.25\n"));
        let rows = read_grid_csv(buf.as_slice()).unwrap();
        assert_eq!(
            rows[1],
            GridRow {
                index: 1,
                x: 0.5,
                value: -3.0
            }
        );
        assert!(write_grid_csv(Vec::new(), &[0.0], &[]).is_err());
    }

    #[test]
    fn binary_round_trip() {
        let v = vec![1.0, -2.5, f64::MIN_POSITIVE, 1e300];
        let mut buf = Vec::new();
        write_f64_binary(&mut buf, &v).unwrap();
        assert_eq!(buf.len(), 8 + 8 * v.len());
        assert_eq!(&buf[..8], &4u64.to_le_bytes());
        assert_eq!(read_f64_binary(buf.as_slice()).unwrap(), v);
        assert!(read_f64_binary(&buf[..20]).is_err());
    }

    #[test]
    fn report_headers() {
        let mut buf = Vec::new();
        write_fit_report(
            &mut buf,
            &[FitReportRow {
                segment_lo: 1,
                segment_hi: 8,
                degree: 3,
                max_fit_error: 0.5,
            }],
        )
        .unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("segment_lo,segment_hi,degree,max_fit_error\n1,8,3,0.5"));
        let mut buf = Vec::new();
        let c = GateCount {
            cnot_count: 3,
            u3_count: 4,
            total: 7,
            num_ancilla: 1,
        };
        write_gate_counts(&mut buf, &[GateCountRow::new("u_f", 5, &c)]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "circuit_name,n_qubits,n_ancilla,cnot,u3,total\nu_f,5,1,3,4,7\n"
        );
    }
}
