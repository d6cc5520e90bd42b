use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const MIN_SPECTRUM_POINTS: usize = 8;

/// Contrast (positive dip depth) against microwave frequency in MHz.
#[derive(Debug, Clone, PartialEq)]
pub struct OdmrSpectrum {
    frequency: Vec<f64>,
    contrast: Vec<f64>,
}

impl OdmrSpectrum {
    pub fn new(frequency: Vec<f64>, contrast: Vec<f64>) -> Result<Self> {
        if frequency.len() != contrast.len() {
            return Err(Error::Spectrum(format!(
                "{} frequencies but {} contrast values",
                frequency.len(),
                contrast.len()
            )));
        }
        if frequency.len() < MIN_SPECTRUM_POINTS {
            return Err(Error::Spectrum(format!(
                "need at least {MIN_SPECTRUM_POINTS} points, got {}",
                frequency.len()
            )));
        }
        if frequency.iter().chain(&contrast).any(|v| !v.is_finite()) {
            return Err(Error::Spectrum("non-finite value".into()));
        }
        if let Some(k) = frequency.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Spectrum(format!(
                "frequencies must increase strictly (at {} MHz)",
                frequency[k + 1]
            )));
        }
        Ok(Self { frequency, contrast })
    }

    pub fn frequency(&self) -> &[f64] {
        &self.frequency
    }

    pub fn contrast(&self) -> &[f64] {
        &self.contrast
    }

    pub fn len(&self) -> usize {
        self.frequency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequency.is_empty()
    }

    pub fn span(&self) -> (f64, f64) {
        (self.frequency[0], self.frequency[self.len() - 1])
    }

    /// Same frequencies with new contrast values.
    pub fn with_contrast(&self, contrast: Vec<f64>) -> Result<Self> {
        Self::new(self.frequency.clone(), contrast)
    }

    /// Parses two numeric columns (frequency_mhz, contrast) separated by whitespace or a
    /// comma. Blank lines and lines starting with '#' are skipped. With `negate`, raw
    /// fluorescence-decrease values are flipped to positive contrast.
    pub fn parse(text: &str, negate: bool) -> Result<Self> {
        let mut f = Vec::new();
        let mut c = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|ch: char| ch == ',' || ch.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(Error::Spectrum(format!("line {}: expected 2 columns, got {}", n + 1, cols.len())));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::Spectrum(format!("line {}: cannot parse '{s}'", n + 1)))
            };
            f.push(parse(cols[0])?);
            let v = parse(cols[1])?;
            c.push(if negate { -v } else { v });
        }
        Self::new(f, c)
    }

    pub fn read(path: &Path, negate: bool) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Spectrum(format!("{}: {e}", path.display())))?;
        Self::parse(&text, negate)
    }

    /// Text form accepted by [`OdmrSpectrum::parse`], with round-trip float formatting.
    pub fn to_text(&self) -> String {
        let mut s = String::from("# frequency_mhz contrast\n");
        for (f, c) in self.frequency.iter().zip(&self.contrast) {
            s.push_str(&format!("{f:?} {c:?}\n"));
        }
        s
    }
}

/// Evenly spaced frequency grid including both ends.
pub fn linear_grid(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let h = (stop - start) / (count - 1) as f64;
            (0..count).map(|k| if k + 1 == count { stop } else { start + h * k as f64 }).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_mixed_separators_and_comments() {
        let text = "# header\n\n1,0.1\n2 0.2\n3\t0.3\n4, 0.4\n5 0.5\n6 0.6\n7 0.7\n8 -0.8\n";
        let s = OdmrSpectrum::parse(text, false).unwrap();
        assert_eq!(s.len(), 8);
        assert_eq!(s.contrast()[7], -0.8);
        let n = OdmrSpectrum::parse(text, true).unwrap();
        assert_eq!(n.contrast()[0], -0.1);
    }

    #[test]
    fn parse_errors() {
        assert!(OdmrSpectrum::parse("1 2 3\n", false).is_err());
        assert!(OdmrSpectrum::parse("1 x\n", false).is_err());
        let short: String = (0..7).map(|k| format!("{k} 0\n")).collect();
        assert!(matches!(OdmrSpectrum::parse(&short, false), Err(Error::Spectrum(_))));
        let unsorted = "1 0\n2 0\n3 0\n3 0\n4 0\n5 0\n6 0\n7 0\n";
        assert!(OdmrSpectrum::parse(unsorted, false).is_err());
    }

    #[test]
    fn text_round_trip_is_exact() {
        let f = linear_grid(1000.0, 1800.0, 9);
        let c: Vec<f64> = f.iter().map(|x| (x / 37.0).sin() * 1e-3).collect();
        let s = OdmrSpectrum::new(f, c).unwrap();
        assert_eq!(OdmrSpectrum::parse(&s.to_text(), false).unwrap(), s);
    }
}
