//! Long-format reshaping of experiment tables.

use std::io::{Read, Write};

use anyhow::{anyhow, bail, Result};

/// Melts a wide CSV into `series,x,y` rows.
///
/// `x` names the abscissa column (first column when `None`). Values of the
/// `group` columns label each series; every other column is a value column.
/// With several value columns the column name is appended to the label.
pub fn melt<R: Read, W: Write>(
    input: R,
    output: W,
    x: Option<&str>,
    group: &[String],
) -> Result<()> {
    let mut reader = csv::Reader::from_reader(input);
    let mut writer = csv::Writer::from_writer(output);
    writer.write_record(["series", "x", "y"])?;
    let headers = reader.headers()?.clone();
    if headers.is_empty() {
        writer.flush()?;
        return Ok(());
    }
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| anyhow!("no column named '{name}'"))
    };
    let xi = match x {
        Some(name) => col(name)?,
        None => 0,
    };
    let gi: Vec<usize> = group.iter().map(|g| col(g)).collect::<Result<_>>()?;
    let values: Vec<usize> = (0..headers.len())
        .filter(|i| *i != xi && !gi.contains(i))
        .collect();
    if values.is_empty() {
        bail!("no value columns left after x and group");
    }
    for rec in reader.records() {
        let rec = rec?;
        let label: Vec<&str> = gi.iter().map(|&i| &rec[i]).collect();
        for &v in &values {
            let y = &rec[v];
            y.parse::<f64>()
                .map_err(|_| anyhow!("column '{}' holds non-numeric '{y}'", &headers[v]))?;
            let series = if label.is_empty() {
                headers[v].to_string()
            } else if values.len() == 1 {
                label.join("/")
            } else {
                format!("{}/{}", label.join("/"), &headers[v])
            };
            writer.write_record([series.as_str(), &rec[xi], y])?;
        }
    }
    writer.flush()?;
    Ok(())
}
