//! CSV and text emitters. Numbers are printed with six significant digits in
//! the style of C's `%g`, so output files are stable across platforms.

use std::io::Write;

use crate::pathloss::PathLossSample;

pub const SAMPLE_HEADER: [&str; 10] = [
    "D",
    "H",
    "d_los",
    "d_ref_g",
    "d_ref_b",
    "num_wr",
    "dphi_g_rad",
    "dphi_b_rad",
    "pl_db",
    "clipped",
];

/// `%g`-style formatting with six significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_fraction(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!(
            "{}e{sign}{:02}",
            trim_fraction(mantissa.to_string()),
            exp.abs()
        )
    }
}

fn trim_fraction(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

pub fn write_samples<W: Write>(w: W, samples: &[PathLossSample]) -> csv::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(SAMPLE_HEADER)?;
    for s in samples {
        out.write_record([
            fmt_sig(s.distance),
            fmt_sig(s.altitude),
            fmt_sig(s.d_los),
            fmt_sig(s.d_ref_g),
            fmt_sig(s.d_ref_b),
            s.num_wr.to_string(),
            fmt_sig(s.dphi_g),
            fmt_sig(s.dphi_b),
            fmt_sig(s.pl_db),
            u8::from(s.clipped).to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
