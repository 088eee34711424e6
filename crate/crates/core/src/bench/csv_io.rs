//! Trace CSV files: one header row, one row per iteration, 17 significant
//! digits, `NaN` for values that do not apply.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::solver::IterationRecord;

pub const COLUMNS: [&str; 15] = [
    "k",
    "f",
    "gap_norm",
    "reg_gap_norm",
    "beta",
    "gamma",
    "b",
    "c",
    "dx_norm",
    "dy_norm",
    "potential",
    "monitor_slack",
    "gap_x_norm",
    "gap_y_norm",
    "unit_gap_norm",
];

fn fmt(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidTrace(format!("{other:?}")),
    }
}

pub fn write_trace_csv<W: Write>(out: W, records: &[IterationRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(COLUMNS).map_err(csv_err)?;
    for r in records {
        let vals = [
            r.f_value,
            r.gap_norm,
            r.reg_gap_norm,
            r.beta,
            r.gamma,
            r.b,
            r.c,
            r.dx_norm,
            r.dy_norm,
            r.potential,
            r.monitor_slack,
            r.gap_x_norm,
            r.gap_y_norm,
            r.unit_gap_norm,
        ];
        let mut row = Vec::with_capacity(COLUMNS.len());
        row.push(r.k.to_string());
        row.extend(vals.iter().map(|&v| fmt(v)));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace_csv<R: Read>(input: R) -> Result<Vec<IterationRecord>> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != COLUMNS {
        return Err(Error::InvalidTrace(format!(
            "unexpected header: {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    let mut out = Vec::new();
    for (i, row) in rd.records().enumerate() {
        let row = row.map_err(csv_err)?;
        let bad = |what: &str| Error::InvalidTrace(format!("row {}: bad {what}", i + 2));
        let k: usize = row[0].parse().map_err(|_| bad("k"))?;
        let mut v = [0.0; 14];
        for (j, slot) in v.iter_mut().enumerate() {
            *slot = row[j + 1].parse().map_err(|_| bad(COLUMNS[j + 1]))?;
        }
        out.push(IterationRecord {
            k,
            f_value: v[0],
            gap_norm: v[1],
            reg_gap_norm: v[2],
            beta: v[3],
            gamma: v[4],
            b: v[5],
            c: v[6],
            dx_norm: v[7],
            dy_norm: v[8],
            potential: v[9],
            monitor_slack: v[10],
            gap_x_norm: v[11],
            gap_y_norm: v[12],
            unit_gap_norm: v[13],
        });
    }
    Ok(out)
}
