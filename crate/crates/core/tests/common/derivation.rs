use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;
use unimorph_core::derivation::{Affix, DerivationRecord};

pub fn word(rng: &mut StdRng, min: usize, max: usize) -> String {
    let n = rng.gen_range(min..=max);
    (0..n)
        .map(|_| *['a', 'b', 'c', 'é'].choose(rng).unwrap())
        .collect()
}

pub fn preliminary(rng: &mut StdRng) -> Vec<DerivationRecord> {
    let n = rng.gen_range(0..30);
    let lemmas: Vec<String> = (0..6).map(|_| word(rng, 2, 5)).collect();
    let mut out = Vec::new();
    while out.len() < n {
        let s = lemmas.choose(rng).unwrap().clone();
        let t = lemmas.choose(rng).unwrap().clone();
        if s == t {
            continue;
        }
        let mut r = DerivationRecord::new(*["ita", "fra"].choose(rng).unwrap(), s, t);
        if rng.gen_bool(0.6) {
            r.source_pos = Some(["N", "V", "ADJ"].choose(rng).unwrap().to_string());
        }
        if rng.gen_bool(0.6) {
            r.target_pos = Some(["N", "ADV", "ADJ"].choose(rng).unwrap().to_string());
        }
        if rng.gen_bool(0.6) {
            let text = word(rng, 1, 3);
            r.affix = Some(if rng.gen_bool(0.5) {
                Affix::suffix(text)
            } else {
                Affix::prefix(text)
            });
        }
        out.push(r);
    }
    out
}
