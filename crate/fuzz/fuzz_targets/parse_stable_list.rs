#![no_main]

use cm_realize::changemaker::{build_cm_lattice, parse_stable_list};
use cm_realize::Rational;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(stable) = parse_stable_list(s) else { return };
    if stable.len() <= 8 && stable.iter().all(|&x| (-50..=50).contains(&x)) {
        let _ = build_cm_lattice(&Rational::new(133, 2), &stable);
    }
});
