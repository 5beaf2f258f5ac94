//! Number formatting and CSV rendering.
//!
//! Values are printed with 15 significant digits — enough to identify a
//! double uniquely on re-parse, so emitted files round-trip byte-identically
//! — in plain decimal when the exponent allows it and scientific notation
//! otherwise, with trailing zeros trimmed.

/// Formats with 15 significant digits: plain decimal for exponents in
/// `[-4, 15)`, scientific (`1.5e-7` style) outside, trailing zeros trimmed.
pub fn format_g15(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if v.is_nan() {
        return "nan".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf" } else { "-inf" }.to_string();
    }

    let a = v.abs();
    let sci = format!("{a:.14e}");
    let (mant, exp) = sci.split_once('e').expect("{:.14e} always carries an exponent");
    let e: i32 = exp.parse().expect("exponent is an integer");
    let digits: Vec<u8> = mant.bytes().filter(u8::is_ascii_digit).collect();
    debug_assert_eq!(digits.len(), 15);

    let body = if (-4..15).contains(&e) {
        let mut s = String::new();
        if e < 0 {
            s.push_str("0.");
            for _ in 0..(-e - 1) {
                s.push('0');
            }
            s.extend(digits.iter().map(|&d| d as char));
        } else {
            let split = (e + 1) as usize;
            s.extend(digits[..split].iter().map(|&d| d as char));
            if split < digits.len() {
                s.push('.');
                s.extend(digits[split..].iter().map(|&d| d as char));
            }
        }
        trim_fraction(s)
    } else {
        format!("{}e{}", trim_fraction(mant.to_string()), e)
    };
    if v < 0.0 {
        format!("-{body}")
    } else {
        body
    }
}

/// Removes trailing zeros after a decimal point, and the point itself when
/// nothing remains behind it.
fn trim_fraction(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// Joins header and rows with comma delimiters and LF line endings
/// (trailing newline included).
pub fn render_csv(header: &[String], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Splits CSV text back into header and rows (exact inverse of
/// [`render_csv`] on its own output).
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<String>>), String> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| "empty CSV".to_string())?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for line in lines {
        let row: Vec<String> = line.split(',').map(str::to_string).collect();
        if row.len() != header.len() {
            return Err(format!(
                "row has {} fields, header has {}",
                row.len(),
                header.len()
            ));
        }
        rows.push(row);
    }
    Ok((header, rows))
}
