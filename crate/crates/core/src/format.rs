/// Fixed 17-significant-digit scientific notation, enough to round-trip
/// any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
