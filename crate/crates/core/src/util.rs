//! Small helpers shared by several modules.

use alloc::collections::BTreeSet;
use alloc::string::String;

/// Greatest common divisor of the absolute values; `gcd(0, 0) = 0`.
pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a as i64
}

/// Least common multiple of two positive numbers.
pub(crate) fn lcm(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        return 0;
    }
    (a / gcd(a, b)) * b
}

/// Returns `base` if it is not in `taken`, otherwise `base` followed by as
/// many primes as needed to make it fresh. The chosen name is inserted into
/// `taken`.
pub(crate) fn fresh_name(base: String, taken: &mut BTreeSet<String>) -> String {
    let mut name = base;
    while taken.contains(&name) {
        name.push('\'');
    }
    taken.insert(name.clone());
    name
}

/// Renders a time index for use inside a generated symbol: negative values
/// are written with a leading `n` so that the result stays an identifier.
pub(crate) fn time_tag(t: i64) -> String {
    if t < 0 {
        alloc::format!("n{}", t.unsigned_abs())
    } else {
        alloc::format!("{t}")
    }
}
