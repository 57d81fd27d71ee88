#![no_main]

use cm_realize::lattice::GramLattice;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(g) = GramLattice::from_json(s) {
        assert_eq!(g.gram.len(), g.rank);
        if g.rank <= 12 {
            let _ = g.is_positive_definite();
            let _ = g.determinant();
        }
    }
});
