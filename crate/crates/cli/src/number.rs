/// Renders `x` with `digits` significant digits in plain decimal notation,
/// dropping trailing zeros. Very large or very small magnitudes fall back to
/// exponent notation.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "NA".into()
        } else if x > 0.0 {
            "Inf".into()
        } else {
            "-Inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.clamp(1, 17);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let body: String = mantissa.chars().filter(char::is_ascii_digit).collect();

    if !(-7..21).contains(&exp) {
        let m = trim_fraction(mantissa.to_string());
        return format!("{m}e{exp}");
    }

    let mut s = String::new();
    if negative {
        s.push('-');
    }
    if exp < 0 {
        s.push_str("0.");
        s.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
        s.push_str(&body);
    } else {
        let int_len = exp as usize + 1;
        if body.len() <= int_len {
            s.push_str(&body);
            s.extend(std::iter::repeat_n('0', int_len - body.len()));
        } else {
            s.push_str(&body[..int_len]);
            s.push('.');
            s.push_str(&body[int_len..]);
        }
    }
    trim_fraction(s)
}

fn trim_fraction(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}
