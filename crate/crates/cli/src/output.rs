// Copyright 2026 The cfm Authors
//
// Licensed under the Apache license, version 2.0 (the "license");
// you may not use this file except in compliance with the license.
// You may obtain a copy of the license at
//
//     http://www.apache.org/licenses/license-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the license is distributed on an "as is" basis,
// without warranties or conditions of any kind, either express or implied.
// See the license for the specific language governing permissions and
// limitations under the license.

//! Number formatting and table rendering.

/// `x` with `digits` significant digits, `%g` style: trailing zeros are
/// dropped and exponents below −5 or beyond the precision switch to
/// scientific notation.
pub fn sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Right-aligned columns separated by two spaces.
pub fn aligned(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        cells.iter().zip(&width).map(|(c, w)| format!("{c:>w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
    };
    let mut out = line(header.to_vec());
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}

pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig(1.0, 9), "1");
        assert_eq!(sig(-0.25, 9), "-0.25");
        assert_eq!(sig(1.0 / 3.0, 9), "0.333333333");
        assert_eq!(sig(-178.79853812345, 9), "-178.798538");
        assert_eq!(sig(1.6475234e-3, 9), "0.0016475234");
        assert_eq!(sig(1.23456789e-7, 6), "1.23457e-07");
        assert_eq!(sig(8065.47, 6), "8065.47");
        assert_eq!(sig(2.41797e14, 6), "2.41797e+14");
        assert_eq!(sig(999999.96, 6), "1e+06");
        assert_eq!(sig(0.0, 9), "0");
    }

    #[test]
    fn sig_round_trips_to_the_requested_precision() {
        for x in [std::f64::consts::PI, -1e-9 / 7.0, 12345.678912345, 6.02214076e23] {
            let back: f64 = sig(x, 9).parse().unwrap();
            assert!(((back - x) / x).abs() < 5e-9);
        }
    }

    #[test]
    fn tables() {
        let rows = vec![vec!["1".to_string(), "-1".to_string()], vec!["10".to_string(), "-0.01".to_string()]];
        assert_eq!(aligned(&["n", "E"], &rows), " n      E\n 1     -1\n10  -0.01\n");
        assert_eq!(csv(&["n", "E"], &rows), "n,E\n1,-1\n10,-0.01\n");
    }
}
