//! CSV exchange for signals and numeric tables.
//!
//! Numbers are written in Rust's shortest round-trip form, so writing is
//! deterministic and reading back is exact.

use std::io::{Read, Write};

use crate::error::{structural, MregError, Result};
use crate::gelfand::SpaceTag;
use crate::spectral::{Signal, TimeGrid};
use crate::C64;

/// Header `t, re_0, im_0, re_1, im_1, …`.
pub fn signal_header(dim: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for i in 0..dim {
        h.push(format!("re_{i}"));
        h.push(format!("im_{i}"));
    }
    h
}

/// One row per grid time.
pub fn write_signal_csv<W: Write>(w: W, s: &Signal) -> Result<()> {
    let grid = s.grid();
    let rows: Vec<Vec<f64>> = (0..grid.n_points())
        .map(|j| {
            let mut row = vec![grid.time(j)];
            for z in s.at(j) {
                row.push(z.re);
                row.push(z.im);
            }
            row
        })
        .collect();
    let header = signal_header(s.dim());
    let refs: Vec<&str> = header.iter().map(String::as_str).collect();
    write_table_csv(w, &refs, &rows)
}

/// Reads a signal written by [`write_signal_csv`]; the times must match the grid.
pub fn read_signal_csv<R: Read>(r: R, grid: &TimeGrid, space: SpaceTag) -> Result<Signal> {
    let (header, rows) = read_table_csv(r)?;
    if header.len() < 3 || header.len() % 2 == 0 || header[0] != "t" {
        return structural("signal CSV needs columns t, re_0, im_0, …");
    }
    let dim = (header.len() - 1) / 2;
    if rows.len() != grid.n_points() {
        return structural(format!("{} rows for a grid of {} points", rows.len(), grid.n_points()));
    }
    let tol = 1e-9 * grid.spacing();
    let mut values = Vec::with_capacity(rows.len() * dim);
    for (j, row) in rows.iter().enumerate() {
        if (row[0] - grid.time(j)).abs() > tol {
            return structural(format!("row {j} has time {}, grid time is {}", row[0], grid.time(j)));
        }
        values.extend((0..dim).map(|i| C64::new(row[1 + 2 * i], row[2 + 2 * i])));
    }
    Signal::new(grid.clone(), dim, values, space)
}

/// Writes a header and numeric rows. Non-finite cells are a data error.
pub fn write_table_csv<W: Write>(w: W, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for (k, row) in rows.iter().enumerate() {
        if row.len() != header.len() {
            return structural(format!("row {k} has {} cells, header has {}", row.len(), header.len()));
        }
        if let Some(x) = row.iter().find(|x| !x.is_finite()) {
            return Err(MregError::Data(format!("row {k} contains the non-finite value {x}")));
        }
        out.write_record(row.iter().map(|x| x.to_string()))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a header and numeric rows of equal length.
pub fn read_table_csv<R: Read>(r: R) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|c| {
                c.parse::<f64>()
                    .map_err(|_| MregError::Data(format!("row {k}: '{c}' is not a number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

/// Headerless numeric matrix (coefficient and kernel sidecars).
pub fn read_matrix_csv<R: Read>(r: R) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(r);
    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let row = rec?
            .iter()
            .map(|c| {
                c.parse::<f64>()
                    .map_err(|_| MregError::Data(format!("row {k}: '{c}' is not a number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        if row.iter().any(|x| !x.is_finite()) {
            return Err(MregError::Data(format!("row {k} contains a non-finite value")));
        }
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signal_round_trip_is_exact() {
        let grid = TimeGrid::new(16, 3.0).unwrap();
        let s = Signal::from_fn(grid.clone(), 2, SpaceTag::H, |t, out| {
            out[0] = C64::new(t.sin(), 1.0 / 3.0);
            out[1] = C64::new(-t * t, t.exp());
        })
        .unwrap();
        let mut buf = Vec::new();
        write_signal_csv(&mut buf, &s).unwrap();
        let back = read_signal_csv(buf.as_slice(), &grid, SpaceTag::H).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn non_finite_cells_are_rejected() {
        let err = write_table_csv(Vec::new(), &["a"], &[vec![f64::NAN]]).unwrap_err();
        assert!(matches!(err, MregError::Data(_)));
    }

    #[test]
    fn ragged_matrix_is_an_error() {
        assert!(read_matrix_csv("1,2\n3\n".as_bytes()).is_err());
        assert_eq!(read_matrix_csv("1, 2\n3,4\n".as_bytes()).unwrap(), vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
    }
}
