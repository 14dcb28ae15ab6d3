//! Built-in example systems, embedded so the CLI works without files.

use crate::error::Result;
use crate::model::LvSystem;

/// Cyclic three-species competition with a strict box and an interior
/// coexistence point at (1/6, 1/6, 1/6).
pub const MAY_LEONARD_JSON: &str = include_str!("../presets/may_leonard.json");

/// The cyclic block of [`MAY_LEONARD_JSON`] plus a symmetric fourth
/// competitor with low growth; nonexistence is certified up to
/// `sigma_4 = 1/4`.
pub const LV4_JSON: &str = include_str!("../presets/lv4.json");

/// Classic bistable two-species competition (both exclusion states
/// stable, coexistence at (1/3, 1/3) unstable).
pub const BISTABLE_TWO_SPECIES_JSON: &str = include_str!("../presets/bistable_two_species.json");

/// Look a preset up by name; accepts either the bare name or a
/// `.json`-suffixed file name so CLI paths that do not exist on disk can
/// fall back to the embedded copy.
pub fn by_name(name: &str) -> Option<&'static str> {
    let stem = name.strip_suffix(".json").unwrap_or(name);
    match stem {
        "may_leonard" => Some(MAY_LEONARD_JSON),
        "lv4" => Some(LV4_JSON),
        "bistable_two_species" => Some(BISTABLE_TWO_SPECIES_JSON),
        _ => None,
    }
}

/// Names accepted by [`by_name`], for error messages.
pub const NAMES: [&str; 3] = ["may_leonard", "lv4", "bistable_two_species"];

pub fn may_leonard() -> Result<LvSystem> {
    LvSystem::from_json(MAY_LEONARD_JSON)
}

pub fn lv4() -> Result<LvSystem> {
    LvSystem::from_json(LV4_JSON)
}

pub fn bistable_two_species() -> Result<LvSystem> {
    LvSystem::from_json(BISTABLE_TWO_SPECIES_JSON)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::enumerate_equilibria;

    #[test]
    fn presets_parse() {
        assert_eq!(may_leonard().unwrap().n(), 3);
        assert_eq!(lv4().unwrap().n(), 4);
        assert_eq!(bistable_two_species().unwrap().n(), 2);
    }

    #[test]
    fn lookup_accepts_both_spellings() {
        assert!(by_name("lv4").is_some());
        assert!(by_name("lv4.json").is_some());
        assert!(by_name("unknown").is_none());
    }

    #[test]
    fn may_leonard_has_interior_coexistence() {
        let sys = may_leonard().unwrap();
        let set = enumerate_equilibria(&sys).unwrap();
        let target = [1.0 / 6.0; 3];
        assert!(
            set.equilibria
                .iter()
                .any(|e| e.support == [0, 1, 2] && set.min_distance(&target) < 1e-9),
            "coexistence point missing"
        );
    }
}
