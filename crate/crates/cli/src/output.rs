use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

use schurlab::report::GridData;
use schurlab::SpectralReport;

use crate::run::RunReport;

pub const SPECTRUM_CSV: &str = "spectrum.csv";
pub const PSEUDOSPECTRUM_CSV: &str = "pseudospectrum.csv";
pub const REPORT_JSON: &str = "report.json";

/// 17 significant digits, enough to round-trip any `f64`.
fn num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:.16e}")
    }
}

pub fn spectrum_csv(reports: &[SpectralReport]) -> String {
    let mut s = String::from("re,im,residual,method,model,N\n");
    for r in reports {
        for p in &r.eigenpairs {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                num(p.re),
                num(p.im),
                num(p.residual),
                r.method_tag.as_str(),
                r.model_tag,
                r.n
            );
        }
    }
    s
}

pub fn pseudospectrum_csv(g: &GridData) -> String {
    let mut s = String::from("re,im,sigma_min\n");
    for (i, re) in g.re.iter().enumerate() {
        for (j, im) in g.im.iter().enumerate() {
            let _ = writeln!(s, "{},{},{}", num(*re), num(*im), num(g.values[i][j]));
        }
    }
    s
}

pub fn write_all(dir: &Path, report: &RunReport) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    let put = |name: &str, body: String| {
        let path = dir.join(name);
        fs::write(&path, body).with_context(|| format!("writing {}", path.display()))
    };
    put(SPECTRUM_CSV, spectrum_csv(&report.reports))?;
    if let Some(g) = report.reports.iter().find_map(|r| r.grid_data.as_ref()) {
        put(PSEUDOSPECTRUM_CSV, pseudospectrum_csv(g))?;
    }
    let mut json = serde_json::to_string_pretty(report).context("serializing report")?;
    json.push('\n');
    put(REPORT_JSON, json)
}

#[cfg(test)]
mod tests {
    use super::*;
    use schurlab::MethodTag;

    #[test]
    fn csv_rows_round_trip_doubles() {
        let mut r = SpectralReport::new("damped_wave", MethodTag::BlockEig, 4);
        let x = 0.1 + 0.2;
        r.push(schurlab::C64::new(x, -1.0 / 3.0), 1e-17);
        let csv = spectrum_csv(&[r]);
        let row = csv.lines().nth(1).unwrap();
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[0].parse::<f64>().unwrap(), x);
        assert_eq!(cols[1].parse::<f64>().unwrap(), -1.0 / 3.0);
        assert_eq!(&cols[3..], ["block_eig", "damped_wave", "4"]);
    }
}
