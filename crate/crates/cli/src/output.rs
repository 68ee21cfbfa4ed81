//! Spectrum files: CSV and JSON writers and readers.

use thiserror::Error;
use tripod_eit::{Configuration, SpectrumRow, SpectrumTable};

use crate::config::OutputFormat;

pub const CSV_HEADER: &str = "config,power_mW,b_mG,delta_hz,re_chi,im_chi,transmission";

#[derive(Debug, Error)]
pub enum ReadError {
    #[error("line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Table(#[from] tripod_eit::Error),
}

/// `{config}_P{power}mW_B{field}mG.{ext}`
pub fn spectrum_file_name(config: Configuration, power_mw: f64, b_mg: f64, format: OutputFormat) -> String {
    format!("{config}_P{}mW_B{}mG.{}", tidy(power_mw), tidy(b_mg), format.extension())
}

fn tidy(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

/// Twelve significant digits in scientific notation; −0 is written as 0.
pub fn format_float(v: f64) -> String {
    format!("{:.11e}", tidy(v))
}

pub fn render(table: &SpectrumTable, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => to_csv(table),
        OutputFormat::Json => to_json(table),
    }
}

pub fn to_csv(table: &SpectrumTable) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(CSV_HEADER.split(',')).expect("in-memory write");
    for r in table.rows() {
        let mut record = vec![r.config.as_str().to_string()];
        record.extend([r.power_mw, r.b_mg, r.delta_hz, r.re_chi, r.im_chi, r.transmission].map(format_float));
        w.write_record(&record).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

pub fn to_json(table: &SpectrumTable) -> String {
    let rows: Vec<SpectrumRow> = table
        .rows()
        .iter()
        .map(|r| SpectrumRow {
            power_mw: tidy(r.power_mw),
            b_mg: tidy(r.b_mg),
            delta_hz: tidy(r.delta_hz),
            re_chi: tidy(r.re_chi),
            im_chi: tidy(r.im_chi),
            transmission: tidy(r.transmission),
            ..*r
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&rows).expect("rows serialize");
    s.push('\n');
    s
}

pub fn parse(text: &str, format: OutputFormat) -> Result<SpectrumTable, ReadError> {
    match format {
        OutputFormat::Csv => parse_csv(text),
        OutputFormat::Json => parse_json(text),
    }
}

pub fn parse_csv(text: &str) -> Result<SpectrumTable, ReadError> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| ReadError::Csv { line: 1, message: e.to_string() })?;
    if header.iter().ne(CSV_HEADER.split(',')) {
        let found: Vec<&str> = header.iter().collect();
        return Err(ReadError::Csv { line: 1, message: format!("unexpected header `{}`", found.join(",")) });
    }
    let rows = reader
        .deserialize::<SpectrumRow>()
        .map(|row| {
            row.map_err(|e| ReadError::Csv {
                line: e.position().map_or(0, |p| p.line() as usize),
                message: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SpectrumTable::from_rows(rows)?)
}

pub fn parse_json(text: &str) -> Result<SpectrumTable, ReadError> {
    let rows: Vec<SpectrumRow> = serde_json::from_str(text)?;
    Ok(SpectrumTable::from_rows(rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use tripod_eit::{Backend, SweepSpec};

    #[test]
    fn float_format() {
        assert_eq!(format_float(-0.0), "0.00000000000e0");
        assert_eq!(format_float(-300000.0), "-3.00000000000e5");
        assert_eq!(format_float(0.123456789012345), "1.23456789012e-1");
    }

    #[test]
    fn file_names() {
        assert_eq!(
            spectrum_file_name(Configuration::Config2, 22.0, 10.0, OutputFormat::Csv),
            "config2_P22mW_B10mG.csv"
        );
        assert_eq!(
            spectrum_file_name(Configuration::Config1, 0.5, -0.0, OutputFormat::Json),
            "config1_P0.5mW_B0mG.json"
        );
    }

    #[test]
    fn rejects_bad_csv() {
        assert!(matches!(parse_csv("a,b\n"), Err(ReadError::Csv { line: 1, .. })));
        let text = format!("{CSV_HEADER}\nconfig1,1,0,0,0\n");
        assert!(matches!(parse_csv(&text), Err(ReadError::Csv { line: 2, .. })));
        let text = format!("{CSV_HEADER}\nconfig3,1,0,0,0,0,1\n");
        assert!(matches!(parse_csv(&text), Err(ReadError::Csv { line: 2, .. })));
    }

    fn table(points: usize, power: f64, b: f64) -> SpectrumTable {
        let spec = SweepSpec {
            backend: Backend::Analytic,
            points,
            powers_mw: vec![power],
            b_fields_mg: vec![b],
            ..SweepSpec::new(Configuration::Config2)
        };
        tripod_eit::run_sweep(&spec).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn written_files_are_fixed_points(points in 3usize..60, power in 0.0..40.0f64, b in -40.0..40.0f64) {
            let t = table(points, power, b);
            let csv = to_csv(&t);
            prop_assert_eq!(to_csv(&parse_csv(&csv).unwrap()), csv);
            let json = to_json(&t);
            let back = parse_json(&json).unwrap();
            prop_assert_eq!(to_json(&back), json);
            prop_assert_eq!(back, t);
        }
    }
}
