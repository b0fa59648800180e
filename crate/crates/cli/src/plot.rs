//! gnuplot-friendly data files from scan CSVs.

use crate::{CliError, Result};

/// Whitespace-separated columns under a `#` header block.
///
/// `columns` selects and orders columns (all when empty). Each name in `log`
/// gets an extra `log10(name)` column; nonpositive values become `nan`.
pub fn plot_data(csv_text: &str, columns: &[String], log: &[String]) -> Result<String> {
    let mut rd = csv::ReaderBuilder::new().flexible(false).from_reader(csv_text.as_bytes());
    let parse = |e: csv::Error| CliError::ParseFailure(e.to_string());
    let header: Vec<String> = if csv_text.trim().is_empty() {
        Vec::new()
    } else {
        rd.headers().map_err(parse)?.iter().map(String::from).collect()
    };
    let pick: Vec<usize> = if columns.is_empty() {
        (0..header.len()).collect()
    } else {
        columns
            .iter()
            .map(|c| {
                header
                    .iter()
                    .position(|h| h == c)
                    .ok_or_else(|| CliError::ParseFailure(format!("no column `{c}`")))
            })
            .collect::<Result<_>>()?
    };
    let logs: Vec<usize> = log
        .iter()
        .map(|c| {
            header
                .iter()
                .position(|h| h == c)
                .ok_or_else(|| CliError::ParseFailure(format!("no column `{c}`")))
        })
        .collect::<Result<_>>()?;
    let mut names: Vec<String> = pick.iter().map(|&i| header[i].clone()).collect();
    names.extend(logs.iter().map(|&i| format!("log10({})", header[i])));

    let mut out = String::from("# locstab plot data\n");
    out.push_str(&format!("# columns: {}\n", names.join(" ")));
    if header.is_empty() {
        return Ok(out);
    }
    for rec in rd.records() {
        let rec = rec.map_err(parse)?;
        let mut cells: Vec<String> = pick.iter().map(|&i| cell(&rec[i])).collect();
        for &i in &logs {
            cells.push(match rec[i].trim().parse::<f64>() {
                Ok(v) if v > 0.0 => format!("{}", v.log10()),
                _ => "nan".into(),
            });
        }
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    Ok(out)
}

fn cell(s: &str) -> String {
    let s = s.trim();
    if s.is_empty() {
        "nan".into()
    } else if s.parse::<f64>().is_ok() {
        s.into()
    } else {
        format!("\"{s}\"")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_header_only() {
        let out = plot_data("", &[], &[]).unwrap();
        assert_eq!(out.lines().count(), 2);
        assert!(out.lines().all(|l| l.starts_with('#')));
    }

    #[test]
    fn selects_and_logs() {
        let csv = "model,r,traj_error\ntfim,1,0.01\ntfim,2,\n";
        let out = plot_data(csv, &["r".into()], &["traj_error".into()]).unwrap();
        let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows, vec!["1 -2", "2 nan"]);
        assert!(plot_data(csv, &["nope".into()], &[]).is_err());
    }
}
