//! CSV emission with a commented metadata block.

use crate::runner::RunOutput;
use std::io::Write;
use std::path::Path;

pub const SIGN_CONVENTIONS: &str =
    "Q > 0 when energy leaves the bath (flows into the system); W > 0 when work is done on the composite; U = W + Q; deltaQ = <H_B - R^dag H_B R>; Qprime = Q + deltaQ; Wprime = W - deltaQ";
pub const UNITS: &str = "hbar = 1; energies in model units; time in inverse model frequency; entropies, Sigma, I in nats; betaStar in inverse energy";

/// Format a value so that parsing it back reproduces the same f64.
pub fn format_value(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

pub fn render(out: &RunOutput) -> String {
    let mut s = String::new();
    s.push_str(&format!("# nonconj {}\n", env!("CARGO_PKG_VERSION")));
    s.push_str(&format!("# config: {}\n", out.config.echo));
    let params: Vec<String> = out.bundle_params.iter().map(|(k, v, u)| format!("{k}={} [{u}]", format_value(*v))).collect();
    s.push_str(&format!("# parameters: {}\n", params.join("; ")));
    s.push_str(&format!("# grid: t_end={} steps={} dt={}\n", format_value(out.grid.t_end), out.grid.steps, format_value(out.grid.dt())));
    s.push_str(&format!("# units: {UNITS}\n"));
    s.push_str(&format!("# signs: {SIGN_CONVENTIONS}\n"));
    s.push_str(&format!("# convergence: {}\n", out.convergence.summary()));
    s.push_str(&format!("# identities asserted: {}\n", out.ledger.identities_apply));
    for w in &out.ledger.warnings {
        s.push_str(&format!("# warning: {w}\n"));
    }
    s.push_str(&out.config.columns.join(","));
    s.push('\n');
    for r in &out.ledger.rows {
        let vals: Vec<String> = out.config.columns.iter().map(|c| format_value(r.get(c).unwrap())).collect();
        s.push_str(&vals.join(","));
        s.push('\n');
    }
    s
}

pub fn emit_table(out: &RunOutput, path: &Path) -> std::io::Result<()> {
    if out.ledger.rows.is_empty() {
        return Err(std::io::Error::new(std::io::ErrorKind::InvalidData, "ledger is empty"));
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(render(out).as_bytes())?;
    f.flush()
}

/// Parsed CSV body: header and numeric rows, metadata lines skipped.
pub fn parse_table(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), String> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines.next().ok_or("missing header")?.split(',').map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, l) in lines.enumerate() {
        let row: Vec<f64> = l.split(',').map(|x| x.parse::<f64>().map_err(|e| format!("row {i}: {e}"))).collect::<Result<_, _>>()?;
        if row.len() != header.len() {
            return Err(format!("row {i} has {} fields, header has {}", row.len(), header.len()));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_round_trip() {
        for x in [0.0, -0.0, 1.0 / 3.0, 6.02214076e23, -1.2345678901234567e-300, f64::MIN_POSITIVE, std::f64::consts::PI] {
            assert_eq!(format_value(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
        assert!(format_value(f64::NAN).parse::<f64>().unwrap().is_nan());
    }

    #[test]
    fn parse_rejects_ragged_rows() {
        assert!(parse_table("# m\na,b\n1,2\n3\n").is_err());
        let (h, r) = parse_table("# m\na,b\n1,2\n").unwrap();
        assert_eq!(h, vec!["a", "b"]);
        assert_eq!(r, vec![vec![1.0, 2.0]]);
    }
}
