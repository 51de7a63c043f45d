//! Bundled preset configurations, one per studied inequality.

/// `(name, description, embedded JSON)`.
pub const PRESETS: &[(&str, &str, &str)] = &[
    (
        "lemma23-landau",
        "Landau-type inequality ratio over a smooth validation family",
        include_str!("../presets/lemma23-landau.json"),
    ),
    (
        "lemma23-sharpness",
        "sharpness exponent of the Landau inequality on the edge-bump family",
        include_str!("../presets/lemma23-sharpness.json"),
    ),
    (
        "theoremD-hardy-littlewood",
        "fractional-integral boundedness, operator basis equal to the norm weight",
        include_str!("../presets/theoremD-hardy-littlewood.json"),
    ),
    (
        "theorem26-hardy-littlewood",
        "fractional-integral boundedness across bases with moment projection",
        include_str!("../presets/theorem26-hardy-littlewood.json"),
    ),
    (
        "theorem32-ulyanov-k",
        "sharp Ulyanov inequality for spectral K-functionals",
        include_str!("../presets/theorem32-ulyanov-k.json"),
    ),
    (
        "theorem41-ratios",
        "phi-derivative vs spectral-derivative ratio sweep over single modes",
        include_str!("../presets/theorem41-ratios.json"),
    ),
    (
        "theorem44-ulyanov-moduli",
        "sharp Ulyanov inequality for Ditzian-Totik moduli",
        include_str!("../presets/theorem44-ulyanov-moduli.json"),
    ),
    (
        "remarkA-moduli-p1-qinf",
        "moduli Ulyanov inequality at (p, q) = (1, inf) with order r + 2",
        include_str!("../presets/remarkA-moduli-p1-qinf.json"),
    ),
    (
        "nikolskii",
        "Nikolskii inequality sweep over modes and random draws",
        include_str!("../presets/nikolskii.json"),
    ),
    (
        "two-weight-markov",
        "two-weight phi-derivative inequality sweep",
        include_str!("../presets/two-weight-markov.json"),
    ),
];

pub fn find(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _, _)| *n == name).map(|(_, _, text)| *text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    #[test]
    fn at_least_six_presets() {
        assert!(PRESETS.len() >= 6);
    }

    #[test]
    fn preset_names_unique_and_stable() {
        let mut names: Vec<&str> = PRESETS.iter().map(|(n, _, _)| *n).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), PRESETS.len());
        assert!(find("nikolskii").is_some());
        assert!(find("no-such-preset").is_none());
    }

    #[test]
    fn every_preset_parses() {
        for (name, _, text) in PRESETS {
            let cfg = ExperimentConfig::from_json(text);
            assert!(cfg.is_ok(), "preset {name} does not parse: {cfg:?}");
        }
    }
}
