/// Shortest decimal representation that parses back to the same `f64`.
pub fn shortest(x: f64) -> String {
    format!("{x:?}")
}
