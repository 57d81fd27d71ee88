#![no_main]

use cm_realize::knots::{alexander, Knot};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(k) = s.parse::<Knot>() else { return };
    assert_eq!(k.to_string().parse::<Knot>().unwrap(), k);
    // keep the polynomial small enough to be cheap
    if k.genus() < 5_000 {
        assert_eq!(alexander(&k).at_one(), 1);
    }
});
