//! FIELD-CSV v1:
//!
//! ```text
//! # harmlab-field v1
//! # d=<int> n=<int> length=<float> side=<physical|frequency>
//! index,re,im
//! …
//! ```
//!
//! Rows are in row-major storage order; frequency-side rows therefore run
//! over `k = −n/2 … n/2−1` in increasing order on each axis. Floats are
//! written in shortest round-trip form, so export/import is bit-exact.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{Grid, SampledField, Side};

pub const FIELD_MAGIC: &str = "# harmlab-field v1";

pub fn field_to_string(field: &SampledField) -> String {
    let g = field.grid();
    let mut out = String::with_capacity(32 * field.values().len() + 64);
    out.push_str(FIELD_MAGIC);
    out.push('\n');
    let _ = writeln!(
        out,
        "# d={} n={} length={} side={}",
        g.dim(),
        g.points_per_axis(),
        g.side_length(),
        field.side()
    );
    for (i, v) in field.values().iter().enumerate() {
        let _ = writeln!(out, "{i},{},{}", v.re, v.im);
    }
    out
}

fn parse_header(line: &str) -> Result<(Grid, Side)> {
    let rest = line
        .strip_prefix("# ")
        .ok_or_else(|| Error::Format(format!("bad metadata line `{line}`")))?;
    let mut d = None;
    let mut n = None;
    let mut length = None;
    let mut side = None;
    for tok in rest.split_whitespace() {
        let (key, val) = tok
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("bad metadata token `{tok}`")))?;
        let bad = || Error::Format(format!("bad value in `{tok}`"));
        match key {
            "d" => d = Some(val.parse::<usize>().map_err(|_| bad())?),
            "n" => n = Some(val.parse::<usize>().map_err(|_| bad())?),
            "length" => length = Some(val.parse::<f64>().map_err(|_| bad())?),
            "side" => {
                side = Some(match val {
                    "physical" => Side::Physical,
                    "frequency" => Side::Frequency,
                    _ => return Err(bad()),
                })
            }
            _ => return Err(Error::Format(format!("unknown metadata key `{key}`"))),
        }
    }
    let missing = |k: &str| Error::Format(format!("metadata is missing `{k}`"));
    let grid = Grid::new(
        d.ok_or_else(|| missing("d"))?,
        n.ok_or_else(|| missing("n"))?,
        length.ok_or_else(|| missing("length"))?,
    )?;
    Ok((grid, side.ok_or_else(|| missing("side"))?))
}

pub fn field_from_str(text: &str) -> Result<SampledField> {
    let mut lines = text.lines();
    match lines.next() {
        Some(l) if l.trim_end() == FIELD_MAGIC => {}
        Some(l) => return Err(Error::Format(format!("unsupported header `{l}`"))),
        None => return Err(Error::Format("empty input".into())),
    }
    let (grid, side) = parse_header(
        lines
            .next()
            .ok_or_else(|| Error::Format("missing metadata line".into()))?
            .trim_end(),
    )?;
    let mut values = Vec::with_capacity(grid.total_points());
    for (row, line) in lines.enumerate() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let bad = || Error::Format(format!("bad row {row}: `{line}`"));
        let idx: usize = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let re: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let im: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        if parts.next().is_some() || idx != values.len() {
            return Err(bad());
        }
        values.push(Complex64::new(re, im));
    }
    SampledField::new(grid, side, values)
}

pub fn export_field(field: &SampledField, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, field_to_string(field))?;
    Ok(())
}

pub fn import_field(path: impl AsRef<Path>) -> Result<SampledField> {
    field_from_str(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::forward;
    use crate::grid::{generate, GeneratorSpec};
    use proptest::prelude::*;

    #[test]
    fn file_roundtrip_and_side_tag() {
        let g = Grid::new(2, 8, 1.5).unwrap();
        let f = generate(&g, &GeneratorSpec::RandomGaussian { seed: 3 }).unwrap();
        let spec = forward(&f).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("spec.csv");
        export_field(&spec, &path).unwrap();
        let back = import_field(&path).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.side(), Side::Frequency);
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# harmlab-field v1\n# d=2 n=8 length=1.5 side=frequency\n0,"));
    }

    #[test]
    fn rejects_malformed_input() {
        let g = Grid::new(1, 4, 1.0).unwrap();
        let text = field_to_string(&SampledField::zeros(g, Side::Physical));
        let v2 = text.replacen("v1", "v2", 1);
        assert!(matches!(field_from_str(&v2), Err(Error::Format(_))));
        let short: String = text.lines().take(4).map(|l| format!("{l}\n")).collect();
        assert!(field_from_str(&short).is_err());
        let bad_side = text.replace("side=physical", "side=spectral");
        assert!(field_from_str(&bad_side).is_err());
        let odd = text.replace("n=4", "n=5");
        assert!(matches!(field_from_str(&odd), Err(Error::InvalidGrid(_))));
        let shuffled = text.replacen("\n0,", "\n1,", 1);
        assert!(field_from_str(&shuffled).is_err());
        assert!(field_from_str("").is_err());
    }

    proptest! {
        #[test]
        fn text_roundtrip_is_bit_exact(vals in proptest::collection::vec((-1e300f64..1e300, -1e-300f64..1e-300), 8)) {
            let g = Grid::new(1, 8, 0.1).unwrap();
            let f = SampledField::new(g, Side::Physical, vals.iter().map(|&(a, b)| Complex64::new(a, b)).collect()).unwrap();
            let back = field_from_str(&field_to_string(&f)).unwrap();
            for (x, y) in back.values().iter().zip(f.values()) {
                prop_assert_eq!(x.re.to_bits(), y.re.to_bits());
                prop_assert_eq!(x.im.to_bits(), y.im.to_bits());
            }
        }
    }
}
