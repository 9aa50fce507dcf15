//! Named example chains shipped with the crate.

use crate::error::{Error, Result};
use crate::rates::RateSpec;

const ENTRIES: &[(&str, &str)] = &[
    ("unit", include_str!("../gallery/unit.json")),
    (
        "exit-geometric",
        include_str!("../gallery/exit-geometric.json"),
    ),
    (
        "entrance-geometric",
        include_str!("../gallery/entrance-geometric.json"),
    ),
    ("regular", include_str!("../gallery/regular.json")),
    (
        "random-ergodic-1",
        include_str!("../gallery/random-ergodic-1.json"),
    ),
    (
        "random-ergodic-2",
        include_str!("../gallery/random-ergodic-2.json"),
    ),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    ENTRIES.iter().map(|(n, _)| *n)
}

pub fn get(name: &str) -> Result<RateSpec> {
    let (_, text) = ENTRIES.iter().find(|(n, _)| *n == name).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "no gallery chain named {name:?}; known: {}",
            names().collect::<Vec<_>>().join(", ")
        ))
    })?;
    RateSpec::from_json(text)
}

pub fn all() -> Vec<(&'static str, RateSpec)> {
    ENTRIES
        .iter()
        .map(|(n, t)| {
            (
                *n,
                RateSpec::from_json(t).expect("gallery chains are valid"),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::{classify_boundary, BirthDeathRates, BoundaryClass, TailPolicy};

    #[test]
    fn classes() {
        let want = [
            ("unit", BoundaryClass::Natural),
            ("exit-geometric", BoundaryClass::Exit),
            ("entrance-geometric", BoundaryClass::Entrance),
            ("regular", BoundaryClass::Regular),
            ("random-ergodic-1", BoundaryClass::Natural),
            ("random-ergodic-2", BoundaryClass::Natural),
        ];
        for (name, class) in want {
            let c = get(name).unwrap();
            assert_eq!(
                classify_boundary(&c, &TailPolicy::default()).class,
                class,
                "{name}"
            );
        }
        let e = get("exit-geometric").unwrap();
        assert_eq!(e.birth(3), 8.0);
        assert!(get("nope").is_err());
    }
}
